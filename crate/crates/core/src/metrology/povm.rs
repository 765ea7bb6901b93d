use num_complex::Complex64;

use super::{MetrologyError, SUPPORT_CUTOFF};
use crate::matcore::{hermitian_eig, ComplexMatrix, Eigensystem, HERMITIAN_TOL};
use crate::sensor::DensityMatrix;

/// A generalized measurement: Hermitian PSD effects summing to the identity.
#[derive(Clone, Debug)]
pub struct Povm {
    effects: Vec<ComplexMatrix>,
}

impl Povm {
    /// Validates completeness (within 1e-10 per entry) and positivity
    /// (eigenvalues >= -1e-12) of every effect.
    pub fn new(effects: Vec<ComplexMatrix>) -> Result<Self, MetrologyError> {
        let dim = match effects.first() {
            Some(e) => e.dim(),
            None => return Err(MetrologyError::InvalidPovm("no effects".into())),
        };
        let mut sum = ComplexMatrix::zeros(dim);
        for (i, e) in effects.iter().enumerate() {
            if e.dim() != dim {
                return Err(MetrologyError::InvalidPovm(format!(
                    "effect {i} has dimension {} but expected {dim}",
                    e.dim()
                )));
            }
            if !e.is_hermitian(HERMITIAN_TOL) {
                return Err(MetrologyError::InvalidPovm(format!(
                    "effect {i} is not Hermitian"
                )));
            }
            let min = hermitian_eig(e)?.eigenvalues[0];
            if min < -1e-12 {
                return Err(MetrologyError::InvalidPovm(format!(
                    "effect {i} has eigenvalue {min}"
                )));
            }
            sum = &sum + e;
        }
        if sum.max_abs_diff(&ComplexMatrix::identity(dim)) > 1e-10 {
            return Err(MetrologyError::InvalidPovm(
                "effects do not sum to the identity".into(),
            ));
        }
        Ok(Self { effects })
    }

    /// Rank-one projective measurement onto an orthonormal basis.
    pub fn projective(basis: &[Vec<Complex64>]) -> Result<Self, MetrologyError> {
        Self::new(
            basis
                .iter()
                .map(|v| ComplexMatrix::outer(v, v))
                .collect(),
        )
    }

    /// Projective measurement in the eigenbasis of a decomposition; with the
    /// SLD's eigensystem this is the optimal measurement.
    pub fn from_eigensystem(eig: &Eigensystem) -> Result<Self, MetrologyError> {
        Self::projective(&eig.eigenvectors)
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    /// Outcome distribution Tr[E_x rho].
    pub fn outcome_probabilities(&self, rho: &DensityMatrix) -> Vec<f64> {
        self.effects
            .iter()
            .map(|e| (e * rho.matrix()).trace().re)
            .collect()
    }
}

/// Fisher information of the outcome distribution of `povm` on the family
/// (rho, drho): sum_x (Tr[E_x drho])^2 / Tr[E_x rho].
///
/// Outcomes with both probability and sensitivity at or below the cutoff are
/// dropped; probability at the cutoff with sensitivity above it means the
/// quotient genuinely diverges and is an error.
pub fn classical_fisher_information(
    rho: &DensityMatrix,
    drho: &ComplexMatrix,
    povm: &Povm,
) -> Result<f64, MetrologyError> {
    classical_fisher_information_with_cutoff(rho, drho, povm, SUPPORT_CUTOFF)
}

pub fn classical_fisher_information_with_cutoff(
    rho: &DensityMatrix,
    drho: &ComplexMatrix,
    povm: &Povm,
    cutoff: f64,
) -> Result<f64, MetrologyError> {
    let mut total = 0.0;
    for (index, e) in povm.effects.iter().enumerate() {
        let prob = (e * rho.matrix()).trace().re;
        let sens = (e * drho).trace().re;
        if prob <= cutoff {
            if sens.abs() > cutoff {
                return Err(MetrologyError::SingularOutcome { index });
            }
            continue;
        }
        total += sens * sens / prob;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrology::{qfi, sld, ParameterizedState};
    use crate::sensor::{SensorParams, ThermalFamily};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fig3_family() -> ThermalFamily {
        ThermalFamily::new(SensorParams::symmetric(1.0, 0.1, 1.0, 1.0, 1.0)).unwrap()
    }

    /// Orthonormal basis from Gram-Schmidt on random complex vectors.
    fn random_basis(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Vec<Complex64>> {
        let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
        while basis.len() < dim {
            let mut v: Vec<Complex64> = (0..dim)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            for b in &basis {
                let overlap: Complex64 = b.iter().zip(&v).map(|(bi, vi)| bi.conj() * vi).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= overlap * bi;
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-6 {
                for z in &mut v {
                    *z /= norm;
                }
                basis.push(v);
            }
        }
        basis
    }

    #[test]
    fn trivial_povm_carries_no_information() {
        let povm = Povm::new(vec![ComplexMatrix::identity(2)]).unwrap();
        let rho = DensityMatrix::new(ComplexMatrix::identity(2).scale_re(0.5)).unwrap();
        let drho = ComplexMatrix::from_real_rows(&[&[0.1, 0.0], &[0.0, -0.1]]);
        assert_eq!(
            classical_fisher_information(&rho, &drho, &povm).unwrap(),
            0.0
        );
    }

    #[test]
    fn povm_validation_rejects_bad_sets() {
        // incomplete
        let half = ComplexMatrix::identity(2).scale_re(0.5);
        assert!(Povm::new(vec![half]).is_err());
        // negative effect
        let plus = ComplexMatrix::from_real_rows(&[&[1.5, 0.0], &[0.0, 1.5]]);
        let minus = ComplexMatrix::from_real_rows(&[&[-0.5, 0.0], &[0.0, -0.5]]);
        assert!(Povm::new(vec![plus, minus]).is_err());
    }

    #[test]
    fn sld_basis_measurement_attains_qfi() {
        let family = fig3_family();
        let rho = family.evaluate(0.5).unwrap();
        let drho = family.derivative(0.5).unwrap().unwrap();
        let l = sld(&rho, &drho).unwrap();
        let l_eig = hermitian_eig(&l).unwrap();
        let povm = Povm::from_eigensystem(&l_eig).unwrap();
        let cfi = classical_fisher_information(&rho, &drho, &povm).unwrap();
        let report = qfi(&family, 0.5).unwrap();
        assert!(
            (cfi - report.total).abs() <= 1e-8 * report.total,
            "cfi {cfi} vs qfi {}",
            report.total
        );
    }

    #[test]
    fn random_projective_povms_never_beat_qfi() {
        let family = fig3_family();
        let rho = family.evaluate(0.5).unwrap();
        let drho = family.derivative(0.5).unwrap().unwrap();
        let bound = qfi(&family, 0.5).unwrap().total;
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..100 {
            let povm = Povm::projective(&random_basis(&mut rng, 4)).unwrap();
            let cfi = classical_fisher_information(&rho, &drho, &povm).unwrap();
            assert!(cfi <= bound * (1.0 + 1e-9), "cfi {cfi} exceeds qfi {bound}");
        }
    }

    #[test]
    fn singular_outcome_detected() {
        let rho = DensityMatrix::new(ComplexMatrix::from_real_rows(&[
            &[1.0, 0.0],
            &[0.0, 0.0],
        ]))
        .unwrap();
        let drho = ComplexMatrix::from_real_rows(&[&[-1.0, 0.0], &[0.0, 1.0]]);
        let povm = Povm::projective(&[
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(
            classical_fisher_information(&rho, &drho, &povm),
            Err(MetrologyError::SingularOutcome { index: 1 })
        ));
    }

    #[test]
    fn outcome_probabilities_are_normalized() {
        let family = fig3_family();
        let rho = family.evaluate(0.7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        let povm = Povm::projective(&random_basis(&mut rng, 4)).unwrap();
        let probs = povm.outcome_probabilities(&rho);
        assert!((probs.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
        assert!(probs.iter().all(|&p| p >= -1e-12));
    }
}
