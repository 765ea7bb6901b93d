//! Single-parameter quantum estimation: QFI in eigenbasis form with its
//! classical/quantum split, the symmetric logarithmic derivative, the
//! Hilbert-Schmidt speed, classical Fisher information for a fixed POVM,
//! classical alpha-distances/speeds and a central-difference derivative
//! oracle.

mod povm;
mod speed;

pub use povm::{classical_fisher_information, classical_fisher_information_with_cutoff, Povm};
pub use speed::{classical_distance_alpha, classical_statistical_speed, DistanceVariant};

use num_complex::Complex64;
use thiserror::Error;

use crate::matcore::{hermitian_eig, ComplexMatrix, MatError};
use crate::sensor::{DensityMatrix, StateError};

/// Eigenvalue pairs with lambda_n + lambda_m at or below this are outside the
/// support and excluded from the QFI/SLD sums. Overridable through the
/// `*_with_cutoff` variants (the CLI exposes it via THERMOPROBE_CUTOFF).
pub const SUPPORT_CUTOFF: f64 = 1e-12;

/// Pairs closer than this are treated as degenerate: the quantum term's
/// (lambda_n - lambda_m)^2 weight vanishes there, so they contribute zero to
/// the split-form sum.
pub const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum MetrologyError {
    #[error("outcome {index} has vanishing probability but non-vanishing sensitivity")]
    SingularOutcome { index: usize },
    #[error("probability vectors have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("finite-difference estimates did not stabilize")]
    NoConvergence,
    #[error("step would leave the family's parameter domain")]
    DomainEdge,
    #[error("invalid POVM: {0}")]
    InvalidPovm(String),
    #[error("invalid alpha {0}; the distance family needs alpha >= 1")]
    InvalidAlpha(f64),
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// A family of states rho(theta). Implementations may supply an analytic
/// derivative; otherwise the engine falls back to [`finite_difference`].
///
/// Evaluation must be pure: sweep engines rely on grid points being
/// evaluable in any order with identical results.
pub trait ParameterizedState {
    fn evaluate(&self, theta: f64) -> Result<DensityMatrix, crate::Error>;

    /// Analytic d rho / d theta when available. Must be traceless.
    fn derivative(&self, _theta: f64) -> Result<Option<ComplexMatrix>, crate::Error> {
        Ok(None)
    }

    /// Open interval of valid parameter values.
    fn domain(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
}

/// Which derivative fed a QFI evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivativeSource {
    Analytic,
    FiniteDifference,
}

/// QFI of a state family at one parameter value, with the classical/quantum
/// decomposition and support-cutoff diagnostics.
#[derive(Clone, Debug)]
pub struct QfiReport {
    /// Pair-sum value 2 sum_{nm} |<n|drho|m>|^2 / (lambda_n + lambda_m).
    pub total: f64,
    /// Population part: sum_p (d lambda_p)^2 / lambda_p.
    pub classical_part: f64,
    /// Eigenbasis-rotation part.
    pub quantum_part: f64,
    /// Unordered eigenvalue pairs dropped by the support cutoff.
    pub skipped_terms: usize,
    /// Largest |<n|drho|m>| among dropped pairs.
    pub max_dropped_numerator: f64,
    pub derivative_source: DerivativeSource,
    pub cutoff: f64,
}

impl QfiReport {
    /// True when dropped terms carried weight above noise, signalling genuine
    /// rank-boundary sensitivity.
    pub fn degenerate_support(&self) -> bool {
        self.skipped_terms > 0 && self.max_dropped_numerator > 1e-10
    }

    /// Cramer-Rao bound on the estimator variance after `repetitions`
    /// independent measurements.
    pub fn min_variance(&self, repetitions: u64) -> f64 {
        1.0 / (repetitions as f64 * self.total)
    }
}

/// QFI from an explicit state/derivative pair.
pub fn qfi_from_derivative(
    rho: &DensityMatrix,
    drho: &ComplexMatrix,
    cutoff: f64,
    source: DerivativeSource,
) -> Result<QfiReport, MetrologyError> {
    let eig = hermitian_eig(rho.matrix())?;
    let basis = eig.basis_matrix();
    // drho in the eigenbasis of rho
    let w = &(&basis.adjoint() * drho) * &basis;
    let n = eig.dim();
    let lambda = &eig.eigenvalues;

    let mut total = 0.0;
    let mut classical = 0.0;
    let mut quantum = 0.0;
    let mut skipped = 0usize;
    let mut max_dropped = 0.0f64;

    for a in 0..n {
        for b in 0..n {
            let s = lambda[a] + lambda[b];
            let num = w[(a, b)].norm_sqr();
            if s <= cutoff {
                if a <= b {
                    skipped += 1;
                    max_dropped = max_dropped.max(num.sqrt());
                }
                continue;
            }
            total += 2.0 * num / s;
            if a == b {
                let diag = w[(a, a)].re;
                classical += diag * diag / lambda[a];
            } else if (lambda[a] - lambda[b]).abs() > DEGENERACY_TOL {
                // <m|d psi_n> = <m|drho|n> / (lambda_n - lambda_m) on
                // non-degenerate pairs; the (lambda_n - lambda_m)^2 weight
                // cancels the denominator.
                quantum += 2.0 * num / s;
            }
        }
    }

    Ok(QfiReport {
        total,
        classical_part: classical,
        quantum_part: quantum,
        skipped_terms: skipped,
        max_dropped_numerator: max_dropped,
        derivative_source: source,
        cutoff,
    })
}

/// QFI of `state` at `at` with the default support cutoff, preferring the
/// family's analytic derivative and falling back to the central-difference
/// oracle.
pub fn qfi(state: &dyn ParameterizedState, at: f64) -> Result<QfiReport, crate::Error> {
    qfi_with_cutoff(state, at, SUPPORT_CUTOFF)
}

pub fn qfi_with_cutoff(
    state: &dyn ParameterizedState,
    at: f64,
    cutoff: f64,
) -> Result<QfiReport, crate::Error> {
    let rho = state.evaluate(at)?;
    let (drho, source) = match state.derivative(at)? {
        Some(d) => (d, DerivativeSource::Analytic),
        None => (
            finite_difference(state, at, None)?,
            DerivativeSource::FiniteDifference,
        ),
    };
    Ok(qfi_from_derivative(&rho, &drho, cutoff, source)?)
}

/// Symmetric logarithmic derivative: L with (L rho + rho L)/2 = drho on the
/// support of rho. Matrix elements between null-space vectors are zero.
pub fn sld(rho: &DensityMatrix, drho: &ComplexMatrix) -> Result<ComplexMatrix, MetrologyError> {
    sld_with_cutoff(rho, drho, SUPPORT_CUTOFF)
}

pub fn sld_with_cutoff(
    rho: &DensityMatrix,
    drho: &ComplexMatrix,
    cutoff: f64,
) -> Result<ComplexMatrix, MetrologyError> {
    debug_assert!(drho.trace().norm() <= 1e-10, "drho must be traceless");
    let eig = hermitian_eig(rho.matrix())?;
    let basis = eig.basis_matrix();
    let w = &(&basis.adjoint() * drho) * &basis;
    let n = eig.dim();
    let l_eigen = ComplexMatrix::from_fn(n, |a, b| {
        let s = eig.eigenvalues[a] + eig.eigenvalues[b];
        if s > cutoff {
            2.0 / s * w[(a, b)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(&(&basis * &l_eigen) * &basis.adjoint())
}

/// Hilbert-Schmidt speed sqrt(Tr[drho^2] / 2); needs no diagonalization.
pub fn hss(drho: &ComplexMatrix) -> f64 {
    drho.frobenius_norm() / 2.0f64.sqrt()
}

/// Hermitized central difference (rho(at+h) - rho(at-h)) / 2h.
///
/// Default step h = max(1e-6, 1e-4 |at|). Errs with `DomainEdge` when a
/// stencil point would leave the family's domain (e.g. T - h <= 0 for
/// temperature families).
pub fn finite_difference(
    state: &dyn ParameterizedState,
    at: f64,
    step: Option<f64>,
) -> Result<ComplexMatrix, crate::Error> {
    let h = step.unwrap_or((1e-4 * at.abs()).max(1e-6));
    let (lo, hi) = state.domain();
    if at - h <= lo || at + h >= hi {
        return Err(MetrologyError::DomainEdge.into());
    }
    let plus = state.evaluate(at + h)?;
    let minus = state.evaluate(at - h)?;
    let diff = (plus.matrix() - minus.matrix()).scale_re(1.0 / (2.0 * h));
    Ok(diff.hermitized())
}
