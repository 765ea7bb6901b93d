use std::f64::consts::PI;
use std::str::FromStr;

use super::{Scenario, ScenarioSpec, Spacing, SweepError, TGrid, Vary, VaryField};
use crate::sensor::SensorParams;
use crate::teleport::InputState;

/// Canned parameter sets reproducing the published sensitivity figures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigurePreset {
    Fig2a,
    Fig2b,
    Fig2c,
    Fig2d,
    Fig3a,
    Fig3b,
    Fig4,
    Fig5,
}

impl FigurePreset {
    pub const ALL: [FigurePreset; 8] = [
        FigurePreset::Fig2a,
        FigurePreset::Fig2b,
        FigurePreset::Fig2c,
        FigurePreset::Fig2d,
        FigurePreset::Fig3a,
        FigurePreset::Fig3b,
        FigurePreset::Fig4,
        FigurePreset::Fig5,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigurePreset::Fig2a => "fig2a",
            FigurePreset::Fig2b => "fig2b",
            FigurePreset::Fig2c => "fig2c",
            FigurePreset::Fig2d => "fig2d",
            FigurePreset::Fig3a => "fig3a",
            FigurePreset::Fig3b => "fig3b",
            FigurePreset::Fig4 => "fig4",
            FigurePreset::Fig5 => "fig5",
        }
    }
}

impl FromStr for FigurePreset {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, SweepError> {
        FigurePreset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| SweepError::UnknownPreset(s.to_string()))
    }
}

const DEFAULT_GRID: TGrid = TGrid {
    t_min: 0.05,
    t_max: 5.0,
    count: 200,
    spacing: Spacing::Linear,
};

/// Sweep values used when a preset varies one coupling. The preset's base
/// parameter set carries the largest value so that single-point diagnostics
/// run in the strong-coupling regime the figures emphasize (the weakest
/// couplings freeze the state solid at the grid's low end).
const VARY_VALUES: [f64; 4] = [0.5, 1.0, 2.0, 4.0];
const VARY_BASE: f64 = 4.0;

/// Builds the ScenarioSpec for a preset plus human-readable annotations that
/// end up in the export metadata. All presets run both scenarios on the
/// default 200-point linear grid over T in [0.05, 5].
pub fn figure_preset(preset: FigurePreset) -> (ScenarioSpec, Vec<String>) {
    let half_pi = PI / 2.0;
    let spec = |ej1: f64, ej2: f64, em: f64, theta: f64, phi: f64, vary: Option<VaryField>| {
        ScenarioSpec {
            scenario: Scenario::Both,
            params: SensorParams::symmetric(ej1, ej2, em, 1.0, 1.0),
            input: Some(InputState { theta, phi }),
            t_grid: DEFAULT_GRID,
            vary: vary.map(|field| Vary {
                field,
                values: VARY_VALUES.to_vec(),
            }),
        }
    };
    match preset {
        FigurePreset::Fig2a => (
            spec(VARY_BASE, 0.05, 4.0, half_pi, half_pi, Some(VaryField::Ej1)),
            vec!["varies the first Josephson energy".into()],
        ),
        FigurePreset::Fig2b => (
            spec(0.06, VARY_BASE, 3.0, half_pi, half_pi, Some(VaryField::Ej2)),
            vec!["varies the second Josephson energy".into()],
        ),
        FigurePreset::Fig2c => (
            spec(2.0, 0.8, VARY_BASE, PI / 4.0, PI / 3.0, Some(VaryField::Em)),
            vec![
                "varies the mutual coupling energy".into(),
                "input angles fixed to theta = pi/4, phi = pi/3 (the source figure's angle \
                 definition is self-referential)"
                    .into(),
            ],
        ),
        FigurePreset::Fig2d => (
            spec(1.0, 1.3, VARY_BASE, half_pi, half_pi, Some(VaryField::Em)),
            vec!["varies the mutual coupling energy".into()],
        ),
        FigurePreset::Fig3a => (
            spec(1.0, 0.1, 1.0, half_pi, half_pi, None),
            vec!["direct-scenario QFI/HSS comparison".into()],
        ),
        FigurePreset::Fig3b => (
            spec(1.0, 0.1, 1.0, half_pi, half_pi, None),
            vec!["remote-scenario QFI/HSS comparison".into()],
        ),
        FigurePreset::Fig4 => (
            spec(0.05, 2.0, 1.0, half_pi, PI / 6.0, None),
            vec!["direct vs remote sensitivity comparison".into()],
        ),
        FigurePreset::Fig5 => (
            spec(1.0, 0.05, 0.5, half_pi, PI, None),
            vec!["fidelity and remote HSS across temperature".into()],
        ),
    }
}
