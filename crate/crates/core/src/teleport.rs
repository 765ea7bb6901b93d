//! Standard teleportation through a mixed two-qubit resource: the channel
//! acts on the input as a Pauli mixture weighted by the resource's Bell-basis
//! populations. Includes the closed-form teleported thermal output and the
//! Uhlmann fidelity.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matcore::{hermitian_eig, matrix_sqrt, tensor_product, ComplexMatrix, MatError};
use crate::metrology::ParameterizedState;
use crate::sensor::{
    thermal_state_derivative, ClosedFormElements, DensityMatrix, SensorError, SensorParams,
    StateError, ThermalPoint,
};

/// Best teleportation fidelity achievable with a classical channel alone.
pub const CLASSICAL_FIDELITY_THRESHOLD: f64 = 2.0 / 3.0;

/// Channel probabilities in [-PROB_TOL, 0) are floating-point noise and get
/// clamped; anything lower is rejected.
pub const PROB_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum TeleportError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("channel probability {value} below the noise-clamp threshold")]
    NegativeProbability { value: f64 },
    #[error("angle {name} = {value} outside its range")]
    AngleOutOfRange { name: &'static str, value: f64 },
    #[error(transparent)]
    Sensor(#[from] SensorError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Mat(#[from] MatError),
}

/// Pauli matrix sigma_i, i = 0..3 (identity, x, y, z).
pub fn pauli(i: usize) -> ComplexMatrix {
    let c = Complex64::new;
    match i {
        0 => ComplexMatrix::identity(2),
        1 => ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]),
        2 => ComplexMatrix::from_fn(2, |r, s| match (r, s) {
            (0, 1) => c(0.0, -1.0),
            (1, 0) => c(0.0, 1.0),
            _ => c(0.0, 0.0),
        }),
        3 => ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]),
        _ => panic!("pauli index {i} out of range"),
    }
}

/// The four Bell projectors B_0..B_3, generated from B_0 by local Pauli
/// conjugation: B_i = (sigma_0 x sigma_i) B_0 (sigma_0 x sigma_i).
#[derive(Clone, Debug)]
pub struct BellBasis {
    pub projectors: [ComplexMatrix; 4],
}

pub fn bell_basis() -> BellBasis {
    let mut b0 = ComplexMatrix::zeros(4);
    for i in [0usize, 3] {
        for j in [0usize, 3] {
            b0[(i, j)] = Complex64::new(0.5, 0.0);
        }
    }
    let make = |i: usize| {
        let u = tensor_product(&pauli(0), &pauli(i)).expect("2x2 kron fits");
        &(&u * &b0) * &u
    };
    BellBasis {
        projectors: [b0.clone(), make(1), make(2), make(3)],
    }
}

/// Amplitude/phase parameterization of the pure teleportation input
/// |psi_in> = cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputState {
    pub theta: f64,
    pub phi: f64,
}

impl InputState {
    pub fn new(theta: f64, phi: f64) -> Result<Self, TeleportError> {
        let s = Self { theta, phi };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), TeleportError> {
        if !self.theta.is_finite() || !(0.0..=std::f64::consts::PI).contains(&self.theta) {
            return Err(TeleportError::AngleOutOfRange {
                name: "theta",
                value: self.theta,
            });
        }
        if !self.phi.is_finite()
            || !(0.0..2.0 * std::f64::consts::PI).contains(&self.phi)
        {
            return Err(TeleportError::AngleOutOfRange {
                name: "phi",
                value: self.phi,
            });
        }
        Ok(())
    }

    pub fn ket(&self) -> [Complex64; 2] {
        [
            Complex64::new((self.theta / 2.0).cos(), 0.0),
            Complex64::from_polar((self.theta / 2.0).sin(), self.phi),
        ]
    }
}

/// rho_in = |psi_in><psi_in|.
pub fn input_state(s: &InputState) -> Result<DensityMatrix, TeleportError> {
    let ket = s.ket();
    Ok(DensityMatrix::new(ComplexMatrix::outer(&ket, &ket))?)
}

/// Bell-basis populations of the resource state.
#[derive(Clone, Copy, Debug)]
pub struct ChannelProbabilities {
    pub p: [f64; 4],
}

/// p_i = Tr[B_i rho_ch], clamped against sub-tolerance floating-point
/// negatives and renormalized to sum exactly to the computed total.
pub fn channel_probabilities(
    rho_ch: &DensityMatrix,
) -> Result<ChannelProbabilities, TeleportError> {
    if rho_ch.dim() != 4 {
        return Err(TeleportError::DimensionMismatch {
            left: rho_ch.dim(),
            right: 4,
        });
    }
    let basis = bell_basis();
    let mut p = [0.0f64; 4];
    for (slot, b) in p.iter_mut().zip(&basis.projectors) {
        let val = (b * rho_ch.matrix()).trace().re;
        if val < -PROB_TOL {
            return Err(TeleportError::NegativeProbability { value: val });
        }
        *slot = val.max(0.0);
    }
    let total: f64 = p.iter().sum();
    for slot in &mut p {
        *slot /= total;
    }
    Ok(ChannelProbabilities { p })
}

/// rho_out = sum_i Tr[B_i rho_ch] sigma_i rho_in sigma_i.
pub fn teleport_output(
    rho_ch: &DensityMatrix,
    rho_in: &DensityMatrix,
) -> Result<DensityMatrix, TeleportError> {
    if rho_in.dim() != 2 {
        return Err(TeleportError::DimensionMismatch {
            left: rho_in.dim(),
            right: 2,
        });
    }
    let probs = channel_probabilities(rho_ch)?;
    let mut out = ComplexMatrix::zeros(2);
    for (i, &pi) in probs.p.iter().enumerate() {
        let s = pauli(i);
        out = &out + &(&(&s * rho_in.matrix()) * &s).scale_re(pi);
    }
    Ok(DensityMatrix::new(out)?)
}

/// Teleported thermal output straight from the closed-form channel elements
/// (symmetric point). Cross-checked against [`teleport_output`] composed with
/// the spectral thermal state.
pub fn teleport_output_closed_form(
    p: &SensorParams,
    t: &ThermalPoint,
    s: &InputState,
) -> Result<DensityMatrix, TeleportError> {
    s.validate()?;
    let e = ClosedFormElements::evaluate(p, t)?;
    let (st, ct) = (s.theta.sin(), s.theta.cos());
    let (sp, cp) = (s.phi.sin(), s.phi.cos());
    let denom = 2.0 * e.f1;
    let diag_shift = (e.b1 + e.b2) * ct / denom;
    let off = Complex64::new(-st * e.f2 * cp / denom, -st * (e.b1 - e.b2) * sp / denom);
    let mat = ComplexMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 0) => Complex64::new(0.5 - diag_shift, 0.0),
        (1, 1) => Complex64::new(0.5 + diag_shift, 0.0),
        (0, 1) => off,
        _ => off.conj(),
    });
    Ok(DensityMatrix::new(mat)?)
}

/// Uhlmann fidelity f = (Tr sqrt(sqrt(rho_in) rho_out sqrt(rho_in)))^2.
///
/// Eigenvalues of the sandwiched matrix below 1e-13 of the largest one are
/// treated as exact zeros: for rank-deficient inputs they are pure rounding
/// noise, and sqrt would otherwise amplify eps-sized noise to ~1e-8.
pub fn uhlmann_fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64, TeleportError> {
    if a.dim() != b.dim() {
        return Err(TeleportError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let sqrt_a = denoised_sqrt(a.matrix())?;
    let sandwiched = (&(&sqrt_a * b.matrix()) * &sqrt_a).hermitized();
    let eig = hermitian_eig(&sandwiched)?;
    let floor = eig.eigenvalues.last().copied().unwrap_or(0.0).max(0.0) * 1e-13;
    let trace_sqrt: f64 = eig
        .eigenvalues
        .iter()
        .map(|&l| if l > floor { l.sqrt() } else { 0.0 })
        .sum();
    Ok(trace_sqrt * trace_sqrt)
}

/// Square root with the same relative noise floor on the spectrum.
fn denoised_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix, TeleportError> {
    let eig = hermitian_eig(m)?;
    let top = eig.eigenvalues.last().copied().unwrap_or(0.0).max(0.0);
    let floor = top * 1e-13;
    for &l in &eig.eigenvalues {
        if l < -crate::matcore::SQRT_CLAMP {
            // delegate the error reporting to the plain matrix sqrt
            return Ok(matrix_sqrt(m)?);
        }
    }
    Ok(eig.map_eigenvalues(|l| if l > floor { l.sqrt() } else { 0.0 }))
}

/// Fidelity between two states of equal dimension. Takes the pure-input
/// shortcut f = Tr[rho_in rho_out] when `rho_in` is pure within 1e-10;
/// otherwise evaluates the general Uhlmann formula.
pub fn fidelity(rho_in: &DensityMatrix, rho_out: &DensityMatrix) -> Result<f64, TeleportError> {
    if rho_in.dim() != rho_out.dim() {
        return Err(TeleportError::DimensionMismatch {
            left: rho_in.dim(),
            right: rho_out.dim(),
        });
    }
    if rho_in.is_pure() {
        Ok((rho_in.matrix() * rho_out.matrix()).trace().re)
    } else {
        uhlmann_fidelity(rho_in, rho_out)
    }
}

/// The teleported thermal output as a temperature-parameterized family.
///
/// The derivative uses the linearity of the channel: the Pauli sandwiches
/// sigma_i rho_in sigma_i are temperature-independent, so
/// d rho_out / dT = sum_i Tr[B_i d rho_ch/dT] sigma_i rho_in sigma_i.
#[derive(Clone, Debug)]
pub struct TeleportedFamily {
    params: SensorParams,
    input: InputState,
    bell: BellBasis,
    sandwiches: [ComplexMatrix; 4],
}

impl TeleportedFamily {
    pub fn new(params: SensorParams, input: InputState) -> Result<Self, TeleportError> {
        input.validate()?;
        params.validate()?;
        let rho_in = input_state(&input)?;
        let sandwiches = std::array::from_fn(|i| {
            let s = pauli(i);
            &(&s * rho_in.matrix()) * &s
        });
        Ok(Self {
            params,
            input,
            bell: bell_basis(),
            sandwiches,
        })
    }

    pub fn input(&self) -> &InputState {
        &self.input
    }
}

impl ParameterizedState for TeleportedFamily {
    fn evaluate(&self, theta: f64) -> Result<DensityMatrix, crate::Error> {
        let t = ThermalPoint::new(theta)?;
        Ok(teleport_output_closed_form(&self.params, &t, &self.input)?)
    }

    fn derivative(&self, theta: f64) -> Result<Option<ComplexMatrix>, crate::Error> {
        let t = ThermalPoint::new(theta)?;
        let dch = thermal_state_derivative(&self.params, &t)?;
        let mut out = ComplexMatrix::zeros(2);
        for (b, sandwich) in self.bell.projectors.iter().zip(&self.sandwiches) {
            let dp = (b * &dch).trace().re;
            out = &out + &sandwich.scale_re(dp);
        }
        Ok(Some(out))
    }

    fn domain(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn fig3_params() -> SensorParams {
        SensorParams::symmetric(1.0, 0.1, 1.0, 1.0, 1.0)
    }

    fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> DensityMatrix {
        let g = ComplexMatrix::from_fn(dim, |_, _| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let psd = &g * &g.adjoint();
        let trace = psd.trace().re;
        DensityMatrix::new(psd.scale_re(1.0 / trace)).unwrap()
    }

    #[test]
    fn bell_zero_projector_entries() {
        let b = bell_basis();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if (i == 0 || i == 3) && (j == 0 || j == 3) {
                    0.5
                } else {
                    0.0
                };
                assert_eq!(b.projectors[0][(i, j)], c(expect, 0.0));
            }
        }
    }

    #[test]
    fn bell_basis_is_complete_orthogonal_rank_one() {
        let b = bell_basis();
        let mut sum = ComplexMatrix::zeros(4);
        for p in &b.projectors {
            sum = &sum + p;
            // projector: B^2 = B, trace 1
            assert!((p * p).max_abs_diff(p) <= 1e-14);
            assert!((p.trace().re - 1.0).abs() <= 1e-14);
            let eig = hermitian_eig(p).unwrap();
            assert!((eig.eigenvalues[3] - 1.0).abs() <= 1e-14);
            assert!(eig.eigenvalues[2].abs() <= 1e-14);
        }
        assert!(sum.max_abs_diff(&ComplexMatrix::identity(4)) <= 1e-14);
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    let prod = &b.projectors[i] * &b.projectors[j];
                    assert!(prod.frobenius_norm() <= 1e-14);
                }
            }
        }
    }

    #[test]
    fn input_state_poles_and_equator() {
        let zero = input_state(&InputState::new(0.0, 0.0).unwrap()).unwrap();
        assert!((zero.matrix()[(0, 0)].re - 1.0).abs() <= 1e-15);

        let plus = input_state(&InputState::new(PI / 2.0, 0.0).unwrap()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((plus.matrix()[(i, j)] - c(0.5, 0.0)).norm() <= 1e-15);
            }
        }

        for phi in [0.0, 1.0, 3.0] {
            let one = input_state(&InputState::new(PI, phi).unwrap()).unwrap();
            assert!((one.matrix()[(1, 1)].re - 1.0).abs() <= 1e-12);
            assert!(one.matrix()[(0, 1)].norm() <= 1e-12);
            assert!(one.is_pure());
        }
    }

    #[test]
    fn angle_validation() {
        assert!(InputState::new(-0.1, 0.0).is_err());
        assert!(InputState::new(PI + 0.1, 0.0).is_err());
        assert!(InputState::new(1.0, 2.0 * PI).is_err());
        assert!(InputState::new(1.0, -0.5).is_err());
    }

    #[test]
    fn probabilities_of_reference_channels() {
        let b = bell_basis();
        let bell0 = DensityMatrix::new(b.projectors[0].clone()).unwrap();
        let p = channel_probabilities(&bell0).unwrap().p;
        assert!((p[0] - 1.0).abs() <= 1e-14);
        assert!(p[1].abs() <= 1e-14 && p[2].abs() <= 1e-14 && p[3].abs() <= 1e-14);

        let mixed = DensityMatrix::new(ComplexMatrix::identity(4).scale_re(0.25)).unwrap();
        for pi in channel_probabilities(&mixed).unwrap().p {
            assert!((pi - 0.25).abs() <= 1e-14);
        }
    }

    #[test]
    fn probabilities_match_thermal_entry_combinations() {
        let p = fig3_params();
        let t = ThermalPoint::new(0.5).unwrap();
        let rho = crate::sensor::thermal_state_closed_form(&p, &t).unwrap();
        let probs = channel_probabilities(&rho).unwrap().p;
        let m = rho.matrix();
        let expect = [
            m[(0, 0)].re + m[(0, 3)].re,
            m[(1, 1)].re + m[(1, 2)].re,
            m[(1, 1)].re - m[(1, 2)].re,
            m[(0, 0)].re - m[(0, 3)].re,
        ];
        for (a, b) in probs.iter().zip(&expect) {
            assert!((a - b).abs() <= 1e-12);
        }
        assert!((probs.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn perfect_and_depolarizing_channels() {
        let b = bell_basis();
        let perfect = DensityMatrix::new(b.projectors[0].clone()).unwrap();
        let mixed = DensityMatrix::new(ComplexMatrix::identity(4).scale_re(0.25)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let input = InputState::new(rng.gen_range(0.0..PI), rng.gen_range(0.0..2.0 * PI))
                .unwrap();
            let rho_in = input_state(&input).unwrap();
            let out = teleport_output(&perfect, &rho_in).unwrap();
            assert!(out.matrix().max_abs_diff(rho_in.matrix()) <= 1e-14);

            let depol = teleport_output(&mixed, &rho_in).unwrap();
            let half = ComplexMatrix::identity(2).scale_re(0.5);
            assert!(depol.matrix().max_abs_diff(&half) <= 1e-14);
        }
    }

    #[test]
    fn closed_form_matches_channel_composition() {
        let p = SensorParams::symmetric(1.0, 0.05, 0.5, 1.0, 1.0);
        let t = ThermalPoint::new(0.5).unwrap();
        let input = InputState::new(PI / 2.0, PI).unwrap();
        let rho_ch = crate::sensor::thermal_state_closed_form(&p, &t).unwrap();
        let composed = teleport_output(&rho_ch, &input_state(&input).unwrap()).unwrap();
        let direct = teleport_output_closed_form(&p, &t, &input).unwrap();
        assert!(composed.matrix().max_abs_diff(direct.matrix()) <= 1e-12);
    }

    #[test]
    fn closed_form_limits() {
        let p = fig3_params();
        // theta = 0 kills the off-diagonals
        let t = ThermalPoint::new(0.3).unwrap();
        let e = ClosedFormElements::evaluate(&p, &t).unwrap();
        let out = teleport_output_closed_form(&p, &t, &InputState::new(0.0, 0.0).unwrap())
            .unwrap();
        assert!(out.matrix()[(0, 1)].norm() <= 1e-15);
        let expect00 = (e.f1 - (e.b1 + e.b2)) / (2.0 * e.f1);
        assert!((out.matrix()[(0, 0)].re - expect00).abs() <= 1e-14);

        // high temperature depolarizes completely
        let hot = ThermalPoint::new(1e308).unwrap();
        let out = teleport_output_closed_form(&p, &hot, &InputState::new(1.0, 1.0).unwrap())
            .unwrap();
        assert!(out
            .matrix()
            .max_abs_diff(&ComplexMatrix::identity(2).scale_re(0.5))
            <= 1e-14);
    }

    #[test]
    fn channel_preserves_trace_and_positivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..500 {
            let rho_ch = random_density(&mut rng, 4);
            let rho_in = random_density(&mut rng, 2);
            let out = teleport_output(&rho_ch, &rho_in).unwrap();
            assert!((out.matrix().trace().re - 1.0).abs() <= 1e-12);
            assert!(out.eigenvalues().unwrap()[0] >= -1e-12);
        }
    }

    #[test]
    fn channel_is_unital() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let half = DensityMatrix::new(ComplexMatrix::identity(2).scale_re(0.5)).unwrap();
        for _ in 0..50 {
            let rho_ch = random_density(&mut rng, 4);
            let out = teleport_output(&rho_ch, &half).unwrap();
            assert!(out.matrix().max_abs_diff(half.matrix()) <= 1e-12);
        }
    }

    #[test]
    fn fidelity_reference_values() {
        let zero = input_state(&InputState::new(0.0, 0.0).unwrap()).unwrap();
        let one = input_state(&InputState::new(PI, 0.0).unwrap()).unwrap();
        let half = DensityMatrix::new(ComplexMatrix::identity(2).scale_re(0.5)).unwrap();

        assert!((fidelity(&zero, &zero).unwrap() - 1.0).abs() <= 1e-12);
        assert!(fidelity(&zero, &one).unwrap().abs() <= 1e-12);
        assert!((fidelity(&zero, &half).unwrap() - 0.5).abs() <= 1e-12);
        // same mixed state on both sides
        assert!((uhlmann_fidelity(&half, &half).unwrap() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn pure_shortcut_agrees_with_uhlmann() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..200 {
            let input = InputState::new(rng.gen_range(0.0..PI), rng.gen_range(0.0..2.0 * PI))
                .unwrap();
            let rho_in = input_state(&input).unwrap();
            let rho_out = random_density(&mut rng, 2);
            let shortcut = fidelity(&rho_in, &rho_out).unwrap();
            let general = uhlmann_fidelity(&rho_in, &rho_out).unwrap();
            assert!(
                (shortcut - general).abs() <= 1e-10,
                "shortcut {shortcut} vs uhlmann {general}"
            );
            assert!((-1e-12..=1.0 + 1e-12).contains(&shortcut));
        }
    }

    #[test]
    fn fidelity_dimension_mismatch() {
        let a = DensityMatrix::new(ComplexMatrix::identity(2).scale_re(0.5)).unwrap();
        let b = DensityMatrix::new(ComplexMatrix::identity(4).scale_re(0.25)).unwrap();
        assert!(matches!(
            fidelity(&a, &b),
            Err(TeleportError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn teleported_family_derivative_matches_finite_difference() {
        let family = TeleportedFamily::new(
            SensorParams::symmetric(0.05, 2.0, 1.0, 1.0, 1.0),
            InputState::new(PI / 2.0, PI / 6.0).unwrap(),
        )
        .unwrap();
        let analytic = family.derivative(0.5).unwrap().unwrap();
        assert!(analytic.trace().norm() <= 1e-12);
        let fd = crate::metrology::finite_difference(&family, 0.5, None).unwrap();
        let rel = (&fd - &analytic).frobenius_norm() / analytic.frobenius_norm();
        assert!(rel <= 1e-6, "relative error {rel}");
    }
}
