//! The two-dissimilar-charge-qubit sensor: electrostatic energies, the 4x4
//! Hamiltonian, its analytic spectrum at the symmetric operating point, and
//! the Gibbs thermal state through two independent routes (generic spectral
//! decomposition vs. the closed-form matrix elements), plus the analytic
//! temperature derivative d rho / dT.
//!
//! Units: hbar = k_B = 1; all energies and temperatures are dimensionless.
//! Basis ordering everywhere is {|00>, |10>, |01>, |11>} (first qubit label
//! is the fast index).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matcore::{
    fix_phase_and_normalize, hermitian_eig, partial_trace_left, ComplexMatrix, Eigensystem,
    MatError,
};
use crate::metrology::ParameterizedState;

/// Trace and positivity slack accepted by [`DensityMatrix::new`].
pub const DENSITY_TOL: f64 = 1e-12;
/// A state counts as pure when Tr[rho^2] is within this of one.
pub const PURITY_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum SensorError {
    #[error("temperature must be positive and finite, got {value}")]
    NonPositiveTemperature { value: f64 },
    #[error("operation requires the symmetric operating point (ng1 = ng2 = 0.5)")]
    NotSymmetricPoint,
    #[error("invalid sensor parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    State(#[from] StateError),
}

#[derive(Debug, Error)]
pub enum StateError {
    #[error("density matrix is not Hermitian within tolerance")]
    NotHermitian,
    #[error("density matrix trace {trace} is not 1 within tolerance")]
    TraceNotOne { trace: f64 },
    #[error("density matrix has eigenvalue {min_eigenvalue} below -1e-12")]
    NotPositive { min_eigenvalue: f64 },
    #[error(transparent)]
    Mat(#[from] MatError),
}

/// Josephson, charging and mutual-coupling energies plus the two gate
/// charges. The closed-form routes additionally require the symmetric point
/// ng1 = ng2 = 0.5.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensorParams {
    pub ej1: f64,
    pub ej2: f64,
    pub em: f64,
    pub ec1: f64,
    pub ec2: f64,
    pub ng1: f64,
    pub ng2: f64,
}

impl SensorParams {
    /// Parameters at the symmetric operating point.
    pub fn symmetric(ej1: f64, ej2: f64, em: f64, ec1: f64, ec2: f64) -> Self {
        Self {
            ej1,
            ej2,
            em,
            ec1,
            ec2,
            ng1: 0.5,
            ng2: 0.5,
        }
    }

    pub fn is_symmetric_point(&self) -> bool {
        self.ng1 == 0.5 && self.ng2 == 0.5
    }

    pub fn validate(&self) -> Result<(), SensorError> {
        let fields = [
            ("ej1", self.ej1),
            ("ej2", self.ej2),
            ("em", self.em),
            ("ec1", self.ec1),
            ("ec2", self.ec2),
        ];
        for (name, value) in fields {
            if !value.is_finite() || value < 0.0 {
                return Err(SensorError::InvalidParameter(format!(
                    "{name} must be a nonnegative finite energy, got {value}"
                )));
            }
        }
        if !self.ng1.is_finite() || !self.ng2.is_finite() {
            return Err(SensorError::InvalidParameter(
                "gate charges must be finite".into(),
            ));
        }
        Ok(())
    }

    fn require_symmetric(&self) -> Result<(), SensorError> {
        if self.is_symmetric_point() {
            Ok(())
        } else {
            Err(SensorError::NotSymmetricPoint)
        }
    }
}

/// A temperature sample with its cached inverse.
#[derive(Clone, Copy, Debug)]
pub struct ThermalPoint {
    temperature: f64,
    beta: f64,
}

impl ThermalPoint {
    pub fn new(temperature: f64) -> Result<Self, SensorError> {
        if !temperature.is_finite() || temperature <= 0.0 {
            return Err(SensorError::NonPositiveTemperature { value: temperature });
        }
        Ok(Self {
            temperature,
            beta: 1.0 / temperature,
        })
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Total electrostatic energy E_{n1 n2} for occupation numbers n1, n2 in {0, 1}.
pub fn electrostatic_energy(p: &SensorParams, n1: u8, n2: u8) -> f64 {
    debug_assert!(n1 <= 1 && n2 <= 1);
    let d1 = p.ng1 - n1 as f64;
    let d2 = p.ng2 - n2 as f64;
    p.ec1 * d1 * d1 + p.ec2 * d2 * d2 + p.em * d1 * d2
}

/// The 4x4 two-qubit Hamiltonian: electrostatic energies on the diagonal,
/// -E_J1/2 coupling the first-qubit flips and -E_J2/2 the second-qubit flips.
pub fn build_hamiltonian(p: &SensorParams) -> ComplexMatrix {
    let e00 = electrostatic_energy(p, 0, 0);
    let e10 = electrostatic_energy(p, 1, 0);
    let e01 = electrostatic_energy(p, 0, 1);
    let e11 = electrostatic_energy(p, 1, 1);
    let j1 = -0.5 * p.ej1;
    let j2 = -0.5 * p.ej2;
    ComplexMatrix::from_real_rows(&[
        &[e00, j1, j2, 0.0],
        &[j1, e10, 0.0, j2],
        &[j2, 0.0, e01, j1],
        &[0.0, j2, j1, e11],
    ])
}

/// Analytic spectrum at the symmetric point.
///
/// `eps` keeps the closed-form labelling eps = [S - R1/4, S + R1/4,
/// S - R2/4, S + R2/4] with S = (E_c1 + E_c2)/4 (not globally sorted: the
/// R1 pair sits inside the R2 pair since R2 >= R1). `vecs[k]` is the unit
/// eigenvector paired with `eps[k]`.
#[derive(Clone, Debug)]
pub struct SensorSpectrum {
    pub eps: [f64; 4],
    pub r1: f64,
    pub r2: f64,
    pub vecs: Vec<Vec<Complex64>>,
    /// Set when R1 = 0 (E_J1 = E_J2 and E_m = 0): the inner eigenpair is
    /// fully degenerate and its basis is an arbitrary choice.
    pub degenerate: bool,
}

fn embed(a: f64, b: f64, antisymmetric: bool) -> Vec<Complex64> {
    let sign = if antisymmetric { -1.0 } else { 1.0 };
    let mut v = vec![
        Complex64::new(a, 0.0),
        Complex64::new(b, 0.0),
        Complex64::new(sign * b, 0.0),
        Complex64::new(sign * a, 0.0),
    ];
    fix_phase_and_normalize(&mut v);
    v
}

/// Closed-form eigenvalues and eigenvectors of [`build_hamiltonian`] at the
/// symmetric point.
///
/// The eigenvector coefficients are evaluated in the division-free form
/// (k, m + r) per exchange-symmetry sector, which stays finite for
/// E_J1 = E_J2 where the textbook quotient form diverges; the sign
/// assignment is the one that satisfies H v = eps v (checked against the
/// numeric eigensolver in the test suite).
pub fn analytic_spectrum(p: &SensorParams) -> Result<SensorSpectrum, SensorError> {
    p.validate()?;
    p.require_symmetric()?;

    let shift = (p.ec1 + p.ec2) / 4.0;
    let dj = p.ej1 - p.ej2;
    let sj = p.ej1 + p.ej2;
    let r1 = (4.0 * dj * dj + p.em * p.em).sqrt();
    let r2 = (4.0 * sj * sj + p.em * p.em).sqrt();

    // 2x2 sector problem [[m, -k], [-k, -m]]: eigenvector (k, m + r) for -r
    // and (m + r, -k) for +r, r = sqrt(k^2 + m^2).
    let m = p.em / 4.0;
    let sector = |k: f64, r_quarter: f64| -> ([f64; 2], [f64; 2]) {
        if k == 0.0 && m + r_quarter == 0.0 {
            // fully degenerate sector; any orthonormal basis works
            ([1.0, 0.0], [0.0, 1.0])
        } else {
            ([k, m + r_quarter], [m + r_quarter, -k])
        }
    };
    let (lo1, hi1) = sector(dj / 2.0, r1 / 4.0);
    let (lo2, hi2) = sector(sj / 2.0, r2 / 4.0);

    Ok(SensorSpectrum {
        eps: [
            shift - r1 / 4.0,
            shift + r1 / 4.0,
            shift - r2 / 4.0,
            shift + r2 / 4.0,
        ],
        r1,
        r2,
        vecs: vec![
            embed(lo1[0], lo1[1], true),
            embed(hi1[0], hi1[1], true),
            embed(lo2[0], lo2[1], false),
            embed(hi2[0], hi2[1], false),
        ],
        degenerate: r1 <= 1e-12,
    })
}

/// Trace-one PSD Hermitian matrix (2x2 or 4x4). Validated on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self, StateError> {
        if !mat.is_hermitian(DENSITY_TOL) {
            return Err(StateError::NotHermitian);
        }
        let trace = mat.trace();
        if (trace.re - 1.0).abs() > DENSITY_TOL || trace.im.abs() > DENSITY_TOL {
            return Err(StateError::TraceNotOne { trace: trace.re });
        }
        let eig = hermitian_eig(&mat)?;
        let min = eig.eigenvalues[0];
        if min < -DENSITY_TOL {
            return Err(StateError::NotPositive {
                min_eigenvalue: min,
            });
        }
        Ok(Self { mat })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    /// Tr[rho^2].
    pub fn purity(&self) -> f64 {
        (&self.mat * &self.mat).trace().re
    }

    pub fn is_pure(&self) -> bool {
        (self.purity() - 1.0).abs() <= PURITY_TOL
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>, StateError> {
        Ok(hermitian_eig(&self.mat)?.eigenvalues)
    }

    /// Reduced state of qubit 1 (traces out qubit 2).
    pub fn reduced_qubit1(&self) -> Result<DensityMatrix, StateError> {
        DensityMatrix::new(partial_trace_left(&self.mat))
    }
}

/// Gibbs state plus diagnostics from the spectral route.
pub struct GibbsSolution {
    pub state: DensityMatrix,
    /// Boltzmann weights matched to `eigensystem` order (ascending energy).
    pub weights: Vec<f64>,
    /// ln Z; reported as a log to stay finite at low temperature.
    pub log_partition: f64,
    pub eigensystem: Eigensystem,
}

/// Thermal state by diagonalizing the Hamiltonian: rho = sum_n w_n |psi_n><psi_n|
/// with w_n = exp(-beta (eps_n - eps_min)) / sum_m exp(-beta (eps_m - eps_min)).
///
/// Works at any gate charge. Subtracting eps_min keeps the exponentials in
/// range at low temperature and makes the result invariant under uniform
/// spectral shifts.
pub fn gibbs_state_full(p: &SensorParams, t: &ThermalPoint) -> Result<GibbsSolution, SensorError> {
    p.validate()?;
    let h = build_hamiltonian(p);
    let eig = hermitian_eig(&h)?;
    let eps_min = eig.eigenvalues[0];
    let raw: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&e| (-t.beta() * (e - eps_min)).exp())
        .collect();
    let z_shifted: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / z_shifted).collect();

    let n = eig.dim();
    let mat = ComplexMatrix::from_fn(n, |i, j| {
        (0..n)
            .map(|k| eig.eigenvectors[k][i] * eig.eigenvectors[k][j].conj() * weights[k])
            .sum()
    });
    Ok(GibbsSolution {
        state: DensityMatrix::new(mat)?,
        weights,
        log_partition: z_shifted.ln() - t.beta() * eps_min,
        eigensystem: eig,
    })
}

pub fn gibbs_state(p: &SensorParams, t: &ThermalPoint) -> Result<DensityMatrix, SensorError> {
    Ok(gibbs_state_full(p, t)?.state)
}

/// Hyperbolic building blocks of the closed-form thermal state, evaluated in
/// overflow-safe scaled form.
///
/// `f1`, `f2`, `b1`, `b2`, `c1`, `c2` carry a common factor exp(-scale) with
/// scale = max(A1, A2), and `d` carries exp(+scale); the scale cancels in
/// every density-matrix entry, which are all ratios of these quantities.
/// Without the scaling, cosh(A) overflows once T drops below about R/2800.
#[derive(Clone, Copy, Debug)]
pub struct ClosedFormElements {
    pub r1: f64,
    pub r2: f64,
    pub a1: f64,
    pub a2: f64,
    pub f1: f64,
    pub f2: f64,
    pub b1: f64,
    pub b2: f64,
    pub c1: f64,
    pub c2: f64,
    pub d: f64,
    /// The common exponent factored out of the hyperbolic functions.
    pub scale: f64,
}

/// Scaled cosh/sinh pair: (cosh(a) e^{-scale}, sinh(a) e^{-scale}).
fn scaled_hyperbolic(a: f64, scale: f64) -> (f64, f64) {
    let ep = (a - scale).exp();
    let en = (-a - scale).exp();
    (0.5 * (ep + en), 0.5 * (ep - en))
}

impl ClosedFormElements {
    pub fn evaluate(p: &SensorParams, t: &ThermalPoint) -> Result<Self, SensorError> {
        p.validate()?;
        p.require_symmetric()?;

        let dj = p.ej1 - p.ej2;
        let sj = p.ej1 + p.ej2;
        let r1 = (4.0 * dj * dj + p.em * p.em).sqrt();
        let r2 = (4.0 * sj * sj + p.em * p.em).sqrt();
        let a1 = r1 / (4.0 * t.temperature());
        let a2 = r2 / (4.0 * t.temperature());
        let scale = a1.max(a2);

        let (c1h, s1h) = scaled_hyperbolic(a1, scale);
        let (c2h, s2h) = scaled_hyperbolic(a2, scale);

        // sinh(A_i)/R_i stays finite as R_i -> 0; only the exact-zero case
        // (which forces the numerator coefficient to zero too) needs a guard.
        let ratio1 = if r1 == 0.0 { 0.0 } else { s1h / r1 };
        let ratio2 = if r2 == 0.0 { 0.0 } else { s2h / r2 };

        Ok(Self {
            r1,
            r2,
            a1,
            a2,
            f1: c1h + c2h,
            f2: c1h - c2h,
            b1: p.em * ratio1,
            b2: p.em * ratio2,
            c1: dj * ratio1,
            c2: sj * ratio2,
            d: 1.0 / (2.0 * (c1h + c2h)),
            scale,
        })
    }
}

/// Entries (rho11, rho22, rho14, rho23, rho12, rho13); everything else
/// follows from the symmetry pattern of the closed form.
fn closed_form_entries(e: &ClosedFormElements) -> (f64, f64, f64, f64, f64, f64) {
    let q = 4.0 * e.f1;
    (
        (e.f1 - e.b1 - e.b2) / q,
        (e.f1 + e.b1 + e.b2) / q,
        (e.b1 - e.b2 - e.f2) / q,
        (-e.b1 + e.b2 - e.f2) / q,
        (e.c1 + e.c2) / (2.0 * e.f1),
        (e.c2 - e.c1) / (2.0 * e.f1),
    )
}

fn assemble_symmetric(
    r11: f64,
    r22: f64,
    r14: f64,
    r23: f64,
    r12: f64,
    r13: f64,
) -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        &[r11, r12, r13, r14],
        &[r12, r22, r23, r13],
        &[r13, r23, r22, r12],
        &[r14, r13, r12, r11],
    ])
}

/// Thermal state from the closed-form matrix elements (symmetric point only).
/// Independent of the spectral route; the two agreeing is the module's
/// central cross-check.
pub fn thermal_state_closed_form(
    p: &SensorParams,
    t: &ThermalPoint,
) -> Result<DensityMatrix, SensorError> {
    let e = ClosedFormElements::evaluate(p, t)?;
    let (r11, r22, r14, r23, r12, r13) = closed_form_entries(&e);
    Ok(DensityMatrix::new(assemble_symmetric(
        r11, r22, r14, r23, r12, r13,
    ))?)
}

/// Analytic d rho / dT of the closed-form thermal state, via
/// dA_i/dT = -A_i/T. Traceless and Hermitian by construction.
pub fn thermal_state_derivative(
    p: &SensorParams,
    t: &ThermalPoint,
) -> Result<ComplexMatrix, SensorError> {
    p.validate()?;
    p.require_symmetric()?;

    let e = ClosedFormElements::evaluate(p, t)?;
    let temp = t.temperature();
    let (c1h, s1h) = scaled_hyperbolic(e.a1, e.scale);
    let (c2h, s2h) = scaled_hyperbolic(e.a2, e.scale);

    let da1 = -e.a1 / temp;
    let da2 = -e.a2 / temp;
    let df1 = s1h * da1 + s2h * da2;
    let df2 = s1h * da1 - s2h * da2;
    let dratio1 = if e.r1 == 0.0 { 0.0 } else { c1h * da1 / e.r1 };
    let dratio2 = if e.r2 == 0.0 { 0.0 } else { c2h * da2 / e.r2 };
    let db1 = p.em * dratio1;
    let db2 = p.em * dratio2;
    let dc1 = (p.ej1 - p.ej2) * dratio1;
    let dc2 = (p.ej1 + p.ej2) * dratio2;

    // d/dT [x / (s f1)] = (x' f1 - x f1') / (s f1^2); the common exp(-scale)
    // of numerator and denominator pieces cancels.
    let quot = |x: f64, dx: f64, s: f64| (dx * e.f1 - x * df1) / (s * e.f1 * e.f1);

    let dr11 = quot(e.f1 - e.b1 - e.b2, df1 - db1 - db2, 4.0);
    let dr22 = -dr11; // rho11 + rho22 = 1/2 identically
    let dr14 = quot(e.b1 - e.b2 - e.f2, db1 - db2 - df2, 4.0);
    let dr23 = quot(-e.b1 + e.b2 - e.f2, -db1 + db2 - df2, 4.0);
    let dr12 = quot(e.c1 + e.c2, dc1 + dc2, 2.0);
    let dr13 = quot(e.c2 - e.c1, dc2 - dc1, 2.0);

    Ok(assemble_symmetric(dr11, dr22, dr14, dr23, dr12, dr13))
}

/// The sensor's thermal state as a temperature-parameterized family, with
/// the analytic derivative. Symmetric point only (closed-form route).
#[derive(Clone, Debug)]
pub struct ThermalFamily {
    params: SensorParams,
}

impl ThermalFamily {
    pub fn new(params: SensorParams) -> Result<Self, SensorError> {
        params.validate()?;
        params.require_symmetric()?;
        Ok(Self { params })
    }

    pub fn params(&self) -> &SensorParams {
        &self.params
    }
}

impl ParameterizedState for ThermalFamily {
    fn evaluate(&self, theta: f64) -> Result<DensityMatrix, crate::Error> {
        let t = ThermalPoint::new(theta)?;
        Ok(thermal_state_closed_form(&self.params, &t)?)
    }

    fn derivative(&self, theta: f64) -> Result<Option<ComplexMatrix>, crate::Error> {
        let t = ThermalPoint::new(theta)?;
        Ok(Some(thermal_state_derivative(&self.params, &t)?))
    }

    fn domain(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }
}

/// Qubit 1's marginal of the thermal family (partial trace over qubit 2).
#[derive(Clone, Debug)]
pub struct ReducedThermalFamily {
    inner: ThermalFamily,
}

impl ReducedThermalFamily {
    pub fn new(params: SensorParams) -> Result<Self, SensorError> {
        Ok(Self {
            inner: ThermalFamily::new(params)?,
        })
    }
}

impl ParameterizedState for ReducedThermalFamily {
    fn evaluate(&self, theta: f64) -> Result<DensityMatrix, crate::Error> {
        Ok(self.inner.evaluate(theta)?.reduced_qubit1().map_err(SensorError::from)?)
    }

    fn derivative(&self, theta: f64) -> Result<Option<ComplexMatrix>, crate::Error> {
        // partial trace is linear, so it commutes with d/dT
        Ok(self
            .inner
            .derivative(theta)?
            .map(|d| partial_trace_left(&d)))
    }

    fn domain(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }
}

/// Gibbs family of an arbitrary fixed Hermitian matrix, parameterized by
/// temperature, with the analytic derivative
/// dw_n/dT = w_n (eps_n - <eps>) / T^2. Used as the test-family generator
/// for the estimation engine.
#[derive(Clone, Debug)]
pub struct GibbsFamily {
    eig: Eigensystem,
}

impl GibbsFamily {
    pub fn new(hamiltonian: &ComplexMatrix) -> Result<Self, SensorError> {
        Ok(Self {
            eig: hermitian_eig(hamiltonian)?,
        })
    }

    fn weights(&self, t: &ThermalPoint) -> Vec<f64> {
        let eps_min = self.eig.eigenvalues[0];
        let raw: Vec<f64> = self
            .eig
            .eigenvalues
            .iter()
            .map(|&e| (-t.beta() * (e - eps_min)).exp())
            .collect();
        let z: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / z).collect()
    }
}

impl ParameterizedState for GibbsFamily {
    fn evaluate(&self, theta: f64) -> Result<DensityMatrix, crate::Error> {
        let t = ThermalPoint::new(theta)?;
        let w = self.weights(&t);
        let n = self.eig.dim();
        let mat = ComplexMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| self.eig.eigenvectors[k][i] * self.eig.eigenvectors[k][j].conj() * w[k])
                .sum()
        });
        Ok(DensityMatrix::new(mat).map_err(SensorError::from)?)
    }

    fn derivative(&self, theta: f64) -> Result<Option<ComplexMatrix>, crate::Error> {
        let t = ThermalPoint::new(theta)?;
        let w = self.weights(&t);
        let mean: f64 = w
            .iter()
            .zip(&self.eig.eigenvalues)
            .map(|(wk, ek)| wk * ek)
            .sum();
        let t2 = theta * theta;
        let dw: Vec<f64> = w
            .iter()
            .zip(&self.eig.eigenvalues)
            .map(|(wk, ek)| wk * (ek - mean) / t2)
            .collect();
        let n = self.eig.dim();
        Ok(Some(ComplexMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| self.eig.eigenvectors[k][i] * self.eig.eigenvectors[k][j].conj() * dw[k])
                .sum()
        })))
    }

    fn domain(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }
}
