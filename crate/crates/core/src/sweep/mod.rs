//! Sweep engine: runs the direct (sensor-side) and remote (teleported)
//! thermometry scenarios over temperature grids and collects per-point
//! QFI/HSS/fidelity rows ready for export.

mod export;
mod presets;

pub use export::{
    export, export_with_metric, to_csv, to_json, to_svg, ExportFormat, SvgMetric, CSV_HEADER,
};
pub use presets::{figure_preset, FigurePreset};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrology::{
    hss, qfi_with_cutoff, ParameterizedState, QfiReport, SUPPORT_CUTOFF,
};
use crate::sensor::{ReducedThermalFamily, SensorParams, ThermalFamily};
use crate::teleport::{fidelity, input_state, InputState, TeleportedFamily};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep specification: {0}")]
    Invalid(String),
    #[error("unknown figure preset '{0}'")]
    UnknownPreset(String),
    #[error("sweep failed at vary={vary_value:?}, T={t}: {source}")]
    At {
        vary_value: Option<f64>,
        t: f64,
        source: Box<crate::Error>,
    },
    #[error("export failed: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Direct,
    Remote,
    Both,
}

impl Scenario {
    pub fn direct(self) -> bool {
        matches!(self, Scenario::Direct | Scenario::Both)
    }

    pub fn remote(self) -> bool {
        matches!(self, Scenario::Remote | Scenario::Both)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

/// Temperature grid. Points are closed-form functions of the index, so
/// refining a grid keeps every shared point bit-identical.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl TGrid {
    pub fn points(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                let frac = i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.t_min + (self.t_max - self.t_min) * frac,
                    Spacing::Log => self.t_min * (self.t_max / self.t_min).powf(frac),
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VaryField {
    Ej1,
    Ej2,
    Em,
}

impl VaryField {
    pub fn name(self) -> &'static str {
        match self {
            VaryField::Ej1 => "ej1",
            VaryField::Ej2 => "ej2",
            VaryField::Em => "em",
        }
    }

    fn apply(self, params: &SensorParams, value: f64) -> SensorParams {
        let mut p = *params;
        match self {
            VaryField::Ej1 => p.ej1 = value,
            VaryField::Ej2 => p.ej2 = value,
            VaryField::Em => p.em = value,
        }
        p
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vary {
    pub field: VaryField,
    pub values: Vec<f64>,
}

/// Full description of a sweep; the JSON spec-file format mirrors these
/// field names exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub scenario: Scenario,
    pub params: SensorParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<InputState>,
    pub t_grid: TGrid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vary: Option<Vary>,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<(), SweepError> {
        let invalid = |msg: String| Err(SweepError::Invalid(msg));
        self.params
            .validate()
            .map_err(|e| SweepError::Invalid(e.to_string()))?;
        if !self.params.is_symmetric_point() {
            return invalid("sweeps run at the symmetric operating point (ng1 = ng2 = 0.5)".into());
        }
        if !(self.t_grid.t_min.is_finite() && self.t_grid.t_min > 0.0) {
            return invalid(format!("t_min must be positive, got {}", self.t_grid.t_min));
        }
        if !(self.t_grid.t_max.is_finite() && self.t_grid.t_max >= self.t_grid.t_min) {
            return invalid(format!(
                "t_max must be >= t_min, got {} < {}",
                self.t_grid.t_max, self.t_grid.t_min
            ));
        }
        if self.t_grid.count < 2 {
            return invalid(format!("grid needs at least 2 points, got {}", self.t_grid.count));
        }
        if let Some(vary) = &self.vary {
            if vary.values.is_empty() {
                return invalid("vary.values must be non-empty".into());
            }
            if vary.values.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return invalid("vary.values must be nonnegative finite energies".into());
            }
        }
        match &self.input {
            Some(input) => input
                .validate()
                .map_err(|e| SweepError::Invalid(e.to_string()))?,
            None => {
                if self.scenario.remote() {
                    return invalid("remote scenario requires an input state (theta, phi)".into());
                }
            }
        }
        Ok(())
    }
}

/// One grid point's worth of output. Columns outside the requested scenario
/// stay `None` and export as empty CSV cells / JSON nulls.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub vary_value: Option<f64>,
    pub t: f64,
    pub qfi_direct: Option<f64>,
    pub hss_direct: Option<f64>,
    pub qfi_remote: Option<f64>,
    pub hss_remote: Option<f64>,
    pub fidelity: Option<f64>,
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    /// Eigenvalue pairs excluded by the support cutoff, summed over the
    /// scenarios computed for this row.
    pub skipped_terms: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepMeta {
    pub spec: ScenarioSpec,
    pub version: String,
    pub support_cutoff: f64,
    pub reduced: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub meta: SweepMeta,
}

#[derive(Clone, Debug)]
pub struct SweepOptions {
    /// Support cutoff for the QFI sums (THERMOPROBE_CUTOFF via the CLI).
    pub support_cutoff: f64,
    /// Compute the direct scenario on qubit 1's reduced state instead of the
    /// full two-qubit thermal state.
    pub reduced: bool,
    /// Free-form annotations echoed into the result metadata.
    pub notes: Vec<String>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            support_cutoff: SUPPORT_CUTOFF,
            reduced: false,
            notes: Vec::new(),
        }
    }
}

fn check_finite(name: &str, value: f64) -> Result<f64, crate::Error> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(crate::Error::Sweep(SweepError::Invalid(format!(
            "{name} evaluated to a non-finite value"
        ))))
    }
}

struct RemoteContext {
    family: TeleportedFamily,
    rho_in: crate::sensor::DensityMatrix,
}

/// Runs every (vary value, temperature) grid point of the spec. Rows come out
/// sorted by (vary value, T) ascending and the whole computation is
/// deterministic: identical specs give byte-identical exports.
pub fn run_sweep(spec: &ScenarioSpec, opts: &SweepOptions) -> Result<SweepResult, SweepError> {
    spec.validate()?;
    let cutoff = opts.support_cutoff;
    let grid = spec.t_grid.points();

    let mut groups: Vec<Option<f64>> = match &spec.vary {
        Some(vary) => {
            let mut values = vary.values.clone();
            values.sort_by(|a, b| a.partial_cmp(b).unwrap());
            values.into_iter().map(Some).collect()
        }
        None => vec![None],
    };
    groups.dedup();

    let mut rows = Vec::with_capacity(groups.len() * grid.len());
    for group in &groups {
        let params = match (group, &spec.vary) {
            (Some(value), Some(vary)) => vary.field.apply(&spec.params, *value),
            _ => spec.params,
        };
        let at = |t: f64, e: crate::Error| SweepError::At {
            vary_value: *group,
            t,
            source: Box::new(e),
        };

        let thermal = ThermalFamily::new(params).map_err(|e| at(f64::NAN, e.into()))?;
        let reduced = if opts.reduced && spec.scenario.direct() {
            Some(ReducedThermalFamily::new(params).map_err(|e| at(f64::NAN, e.into()))?)
        } else {
            None
        };
        let remote = if spec.scenario.remote() {
            let input = spec.input.expect("validated above");
            Some(RemoteContext {
                family: TeleportedFamily::new(params, input).map_err(|e| at(f64::NAN, e.into()))?,
                rho_in: input_state(&input).map_err(|e| at(f64::NAN, e.into()))?,
            })
        } else {
            None
        };

        for &t in &grid {
            rows.push(
                evaluate_row(&thermal, reduced.as_ref(), remote.as_ref(), *group, t, cutoff, spec)
                    .map_err(|e| at(t, e))?,
            );
        }
    }

    Ok(SweepResult {
        rows,
        meta: SweepMeta {
            spec: spec.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            support_cutoff: cutoff,
            reduced: opts.reduced,
            notes: opts.notes.clone(),
        },
    })
}

fn evaluate_row(
    thermal: &ThermalFamily,
    reduced: Option<&ReducedThermalFamily>,
    remote: Option<&RemoteContext>,
    vary_value: Option<f64>,
    t: f64,
    cutoff: f64,
    spec: &ScenarioSpec,
) -> Result<SweepRow, crate::Error> {
    let rho_ch = thermal.evaluate(t)?;
    let probs = crate::teleport::channel_probabilities(&rho_ch)?;

    let mut skipped = 0usize;
    let mut qfi_direct = None;
    let mut hss_direct = None;
    if spec.scenario.direct() {
        let report: QfiReport = match reduced {
            Some(family) => qfi_with_cutoff(family, t, cutoff)?,
            None => qfi_with_cutoff(thermal, t, cutoff)?,
        };
        skipped += report.skipped_terms;
        qfi_direct = Some(check_finite("qfi_direct", report.total)?);
        let drho = match reduced {
            Some(family) => family.derivative(t)?.expect("analytic derivative"),
            None => thermal.derivative(t)?.expect("analytic derivative"),
        };
        hss_direct = Some(check_finite("hss_direct", hss(&drho))?);
    }

    let mut qfi_remote = None;
    let mut hss_remote = None;
    let mut fidelity_col = None;
    if let Some(ctx) = remote {
        let report = qfi_with_cutoff(&ctx.family, t, cutoff)?;
        skipped += report.skipped_terms;
        qfi_remote = Some(check_finite("qfi_remote", report.total)?);
        let drho = ctx.family.derivative(t)?.expect("analytic derivative");
        hss_remote = Some(check_finite("hss_remote", hss(&drho))?);
        let rho_out = ctx.family.evaluate(t)?;
        fidelity_col = Some(check_finite("fidelity", fidelity(&ctx.rho_in, &rho_out)?)?);
    }

    Ok(SweepRow {
        vary_value,
        t,
        qfi_direct,
        hss_direct,
        qfi_remote,
        hss_remote,
        fidelity: fidelity_col,
        p0: probs.p[0],
        p1: probs.p[1],
        p2: probs.p[2],
        p3: probs.p[3],
        skipped_terms: skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn basic_spec() -> ScenarioSpec {
        ScenarioSpec {
            scenario: Scenario::Both,
            params: SensorParams::symmetric(1.0, 0.1, 1.0, 1.0, 1.0),
            input: Some(InputState { theta: PI / 2.0, phi: PI / 2.0 }),
            t_grid: TGrid {
                t_min: 0.05,
                t_max: 5.0,
                count: 20,
                spacing: Spacing::Linear,
            },
            vary: None,
        }
    }

    #[test]
    fn validation_catches_bad_specs() {
        let mut spec = basic_spec();
        spec.t_grid.t_min = 0.0;
        assert!(matches!(spec.validate(), Err(SweepError::Invalid(_))));

        let mut spec = basic_spec();
        spec.t_grid.count = 1;
        assert!(spec.validate().is_err());

        let mut spec = basic_spec();
        spec.input = None;
        assert!(spec.validate().is_err());
        spec.scenario = Scenario::Direct;
        assert!(spec.validate().is_ok());

        let mut spec = basic_spec();
        spec.vary = Some(Vary { field: VaryField::Em, values: vec![] });
        assert!(spec.validate().is_err());

        let mut spec = basic_spec();
        spec.params.ng1 = 0.4;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn saturated_grid_has_vanishing_sensitivity() {
        let mut spec = basic_spec();
        spec.t_grid = TGrid {
            t_min: 1e6,
            t_max: 1e6,
            count: 2,
            spacing: Spacing::Linear,
        };
        let result = run_sweep(&spec, &SweepOptions::default()).unwrap();
        assert_eq!(result.rows.len(), 2);
        for row in &result.rows {
            assert!(row.qfi_direct.unwrap() < 1e-8);
            assert!(row.hss_direct.unwrap() < 1e-8);
            assert!(row.qfi_remote.unwrap() < 1e-8);
            assert!(row.hss_remote.unwrap() < 1e-8);
        }
    }

    #[test]
    fn rows_are_sorted_and_complete() {
        let mut spec = basic_spec();
        spec.vary = Some(Vary {
            field: VaryField::Em,
            values: vec![2.0, 0.5, 1.0], // deliberately unsorted
        });
        let result = run_sweep(&spec, &SweepOptions::default()).unwrap();
        assert_eq!(result.rows.len(), 3 * 20);
        let mut last = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for row in &result.rows {
            let key = (row.vary_value.unwrap(), row.t);
            assert!(key >= last);
            last = key;
            let psum = row.p0 + row.p1 + row.p2 + row.p3;
            assert!((psum - 1.0).abs() <= 1e-10);
            let f = row.fidelity.unwrap();
            assert!((0.0..=1.0 + 1e-12).contains(&f));
        }
    }

    #[test]
    fn direct_only_rows_leave_remote_columns_empty() {
        let mut spec = basic_spec();
        spec.scenario = Scenario::Direct;
        spec.input = None;
        let result = run_sweep(&spec, &SweepOptions::default()).unwrap();
        for row in &result.rows {
            assert!(row.qfi_direct.is_some());
            assert!(row.qfi_remote.is_none());
            assert!(row.fidelity.is_none());
        }
    }

    #[test]
    fn remote_only_rows_leave_direct_columns_empty() {
        let mut spec = basic_spec();
        spec.scenario = Scenario::Remote;
        let result = run_sweep(&spec, &SweepOptions::default()).unwrap();
        for row in &result.rows {
            assert!(row.qfi_direct.is_none());
            assert!(row.hss_direct.is_none());
            assert!(row.qfi_remote.is_some());
            assert!(row.fidelity.is_some());
            // channel probabilities come from the resource state regardless
            assert!((row.p0 + row.p1 + row.p2 + row.p3 - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn grid_refinement_keeps_shared_points() {
        let coarse = basic_spec();
        let mut fine = basic_spec();
        fine.t_grid.count = 2 * coarse.t_grid.count - 1;
        let a = run_sweep(&coarse, &SweepOptions::default()).unwrap();
        let b = run_sweep(&fine, &SweepOptions::default()).unwrap();
        for (i, row) in a.rows.iter().enumerate() {
            let counterpart = &b.rows[2 * i];
            assert_eq!(row.t.to_bits(), counterpart.t.to_bits());
            assert_eq!(row.qfi_direct, counterpart.qfi_direct);
            assert_eq!(row.qfi_remote, counterpart.qfi_remote);
            assert_eq!(row.fidelity, counterpart.fidelity);
        }
    }

    #[test]
    fn reduced_flag_switches_direct_state() {
        let spec = basic_spec();
        let full = run_sweep(&spec, &SweepOptions::default()).unwrap();
        let reduced = run_sweep(
            &spec,
            &SweepOptions {
                reduced: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(reduced.meta.reduced);
        // the marginal carries less information than the full state
        for (a, b) in full.rows.iter().zip(&reduced.rows) {
            assert!(b.qfi_direct.unwrap() <= a.qfi_direct.unwrap() * (1.0 + 1e-9));
            // remote columns are untouched by the flag
            assert_eq!(a.qfi_remote, b.qfi_remote);
        }
    }

    #[test]
    fn log_spacing_is_geometric() {
        let grid = TGrid {
            t_min: 0.1,
            t_max: 10.0,
            count: 3,
            spacing: Spacing::Log,
        };
        let pts = grid.points();
        assert!((pts[0] - 0.1).abs() <= 1e-15);
        assert!((pts[1] - 1.0).abs() <= 1e-12);
        assert!((pts[2] - 10.0).abs() <= 1e-12);
    }

    #[test]
    fn spec_file_round_trip_uses_exact_field_names() {
        let text = r#"{
            "scenario": "both",
            "params": {"ej1": 1.0, "ej2": 0.1, "em": 1.0, "ec1": 1.0, "ec2": 1.0, "ng1": 0.5, "ng2": 0.5},
            "input": {"theta": 1.5707963267948966, "phi": 0.5235987755982988},
            "t_grid": {"t_min": 0.05, "t_max": 5.0, "count": 10, "spacing": "linear"},
            "vary": {"field": "em", "values": [0.5, 1.0]}
        }"#;
        let spec: ScenarioSpec = serde_json::from_str(text).unwrap();
        assert_eq!(spec.scenario, Scenario::Both);
        assert_eq!(spec.vary.as_ref().unwrap().field, VaryField::Em);
        spec.validate().unwrap();
        let back = serde_json::to_string(&spec).unwrap();
        let again: ScenarioSpec = serde_json::from_str(&back).unwrap();
        assert_eq!(spec, again);
    }
}
