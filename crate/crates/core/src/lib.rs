//! Sensitivity analysis for a two-qubit charge-qubit thermometer.
//!
//! The crate models a pair of dissimilar superconducting charge qubits in
//! thermal equilibrium, teleports the sensor state through the standard
//! Bell-measurement channel, and quantifies how well either end of the
//! protocol can estimate the bath temperature via the quantum Fisher
//! information and the Hilbert-Schmidt speed.
//!
//! Modules:
//! - [`matcore`]: small dense complex Hermitian linear algebra (deterministic
//!   Jacobi eigensolver, spectral functions, Kronecker products).
//! - [`sensor`]: the two-qubit Hamiltonian, analytic spectrum, Gibbs state by
//!   two independent routes and the analytic temperature derivative.
//! - [`teleport`]: Bell basis, generalized depolarizing channel, closed-form
//!   teleported output and Uhlmann fidelity.
//! - [`metrology`]: QFI/SLD/HSS/CFI estimation engine plus classical
//!   statistical speeds and a finite-difference oracle.
//! - [`sweep`]: temperature-sweep engine, figure presets and CSV/JSON/SVG
//!   export.
//! - [`selftest`]: the acceptance suite run by `thermoprobe selftest`.

pub mod matcore;
pub mod metrology;
pub mod selftest;
pub mod sensor;
pub mod sweep;
pub mod teleport;

pub use matcore::{ComplexMatrix, Eigensystem, MatError};
pub use metrology::{
    DerivativeSource, DistanceVariant, MetrologyError, ParameterizedState, Povm, QfiReport,
    SUPPORT_CUTOFF,
};
pub use sensor::{
    DensityMatrix, SensorError, SensorParams, SensorSpectrum, StateError, ThermalPoint,
};
pub use sweep::{
    ExportFormat, FigurePreset, Scenario, ScenarioSpec, Spacing, SvgMetric, SweepError,
    SweepOptions, SweepResult, SweepRow, TGrid, Vary, VaryField,
};
pub use teleport::{
    BellBasis, ChannelProbabilities, InputState, TeleportError, CLASSICAL_FIDELITY_THRESHOLD,
};

use thiserror::Error;

/// Any error the toolkit can produce, for callers that cross module
/// boundaries (state families, the sweep engine, the CLI).
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Sensor(#[from] SensorError),
    #[error(transparent)]
    Teleport(#[from] TeleportError),
    #[error(transparent)]
    Metrology(#[from] MetrologyError),
    #[error(transparent)]
    Sweep(#[from] SweepError),
}

impl Error {
    /// True for failures of iterative numerics (as opposed to invalid input);
    /// the CLI maps these to a distinct exit code.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Mat(MatError::NoConvergence { .. }) => true,
            Error::Metrology(MetrologyError::NoConvergence) => true,
            Error::Metrology(MetrologyError::Mat(MatError::NoConvergence { .. })) => true,
            Error::Sensor(SensorError::Mat(MatError::NoConvergence { .. })) => true,
            Error::State(StateError::Mat(MatError::NoConvergence { .. })) => true,
            Error::Teleport(TeleportError::Mat(MatError::NoConvergence { .. })) => true,
            Error::Sweep(SweepError::At { source, .. }) => source.is_numerical(),
            _ => false,
        }
    }
}
