//! thermoprobe: sensitivity sweeps for a two-qubit charge-qubit thermometer.
//!
//! Exit codes: 0 on success, 1 on validation errors, 2 on numerical
//! convergence failures.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use thermoprobe_core::sweep::{
    export_with_metric, figure_preset, run_sweep, ExportFormat, FigurePreset, Scenario,
    ScenarioSpec, Spacing, SvgMetric, SweepOptions, TGrid, Vary, VaryField,
};
use thermoprobe_core::{InputState, SensorParams, SUPPORT_CUTOFF};

#[derive(Parser)]
#[command(
    name = "thermoprobe",
    version,
    about = "Temperature-sensitivity analysis of a capacitively coupled two-qubit thermometer",
    long_about = "Runs direct (sensor-side) and remote (teleported) thermometry scenarios \
                  over temperature grids and reports QFI, Hilbert-Schmidt speed, channel \
                  probabilities and teleportation fidelity as CSV, JSON or SVG."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep described by explicit flags or a JSON spec file
    Sweep(SweepArgs),
    /// Run a canned figure preset (fig2a..fig2d, fig3a, fig3b, fig4, fig5)
    Figure(FigureArgs),
    /// Run the full oracle/property suite and report one line per criterion
    Selftest,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VaryArg {
    Ej1,
    Ej2,
    Em,
}

impl From<VaryArg> for VaryField {
    fn from(v: VaryArg) -> VaryField {
        match v {
            VaryArg::Ej1 => VaryField::Ej1,
            VaryArg::Ej2 => VaryField::Ej2,
            VaryArg::Em => VaryField::Em,
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    /// JSON file with the full sweep specification (replaces the flags below)
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Josephson energy of the first qubit
    #[arg(long)]
    ej1: Option<f64>,
    /// Josephson energy of the second qubit
    #[arg(long)]
    ej2: Option<f64>,
    /// Mutual coupling energy
    #[arg(long)]
    em: Option<f64>,
    /// Charging energy of the first qubit
    #[arg(long, default_value_t = 1.0)]
    ec1: f64,
    /// Charging energy of the second qubit
    #[arg(long, default_value_t = 1.0)]
    ec2: f64,
    /// Input-state amplitude angle (radians)
    #[arg(long)]
    theta: Option<f64>,
    /// Input-state phase angle (radians)
    #[arg(long)]
    phi: Option<f64>,
    /// Lowest grid temperature
    #[arg(long)]
    tmin: Option<f64>,
    /// Highest grid temperature
    #[arg(long)]
    tmax: Option<f64>,
    /// Number of grid points
    #[arg(long)]
    points: Option<usize>,
    /// Logarithmic instead of linear temperature spacing
    #[arg(long)]
    log: bool,
    /// Sweep one coupling over several values
    #[arg(long, value_enum)]
    vary: Option<VaryArg>,
    /// Comma-separated values for the varied coupling
    #[arg(long, value_delimiter = ',')]
    values: Vec<f64>,
    /// Evaluate the direct scenario on qubit 1's reduced state
    #[arg(long)]
    reduced: bool,
    /// Output file
    #[arg(long)]
    out: PathBuf,
    /// Output format: csv, json or svg
    #[arg(long, default_value = "csv")]
    format: String,
    /// Column plotted by svg output (defaults to remote QFI when available)
    #[arg(long)]
    svg_metric: Option<String>,
}

#[derive(Args)]
struct FigureArgs {
    /// Preset name: fig2a, fig2b, fig2c, fig2d, fig3a, fig3b, fig4 or fig5
    name: String,
    /// Output file
    #[arg(long)]
    out: PathBuf,
    /// Output format: csv, json or svg
    #[arg(long, default_value = "csv")]
    format: String,
    /// Column plotted by svg output
    #[arg(long)]
    svg_metric: Option<String>,
}

enum CliError {
    Validation(String),
    Numerical(String),
}

impl From<thermoprobe_core::Error> for CliError {
    fn from(e: thermoprobe_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

impl From<thermoprobe_core::SweepError> for CliError {
    fn from(e: thermoprobe_core::SweepError) -> Self {
        thermoprobe_core::Error::from(e).into()
    }
}

/// THERMOPROBE_CUTOFF overrides the default support cutoff (diagnostics
/// only; selftest ignores it).
fn cutoff_from_env() -> Result<f64, CliError> {
    match std::env::var("THERMOPROBE_CUTOFF") {
        Ok(text) => {
            let value: f64 = text.parse().map_err(|_| {
                CliError::Validation(format!("THERMOPROBE_CUTOFF='{text}' is not a number"))
            })?;
            if !value.is_finite() || value <= 0.0 {
                return Err(CliError::Validation(format!(
                    "THERMOPROBE_CUTOFF must be a positive number, got {value}"
                )));
            }
            Ok(value)
        }
        Err(_) => Ok(SUPPORT_CUTOFF),
    }
}

fn require<T: Copy>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Validation(format!("missing required flag --{flag}")))
}

fn spec_from_args(args: &SweepArgs) -> Result<ScenarioSpec, CliError> {
    if let Some(path) = &args.spec {
        let explicit_flags = args.ej1.is_some()
            || args.ej2.is_some()
            || args.em.is_some()
            || args.theta.is_some()
            || args.phi.is_some()
            || args.tmin.is_some()
            || args.tmax.is_some()
            || args.points.is_some()
            || args.vary.is_some()
            || !args.values.is_empty();
        if explicit_flags {
            return Err(CliError::Validation(
                "--spec replaces the explicit sweep flags; pass one or the other".into(),
            ));
        }
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        return serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("invalid spec file: {e}")));
    }

    let vary = match (args.vary, args.values.is_empty()) {
        (Some(field), false) => Some(Vary {
            field: field.into(),
            values: args.values.clone(),
        }),
        (Some(_), true) => {
            return Err(CliError::Validation(
                "--vary needs --values a,b,c".into(),
            ))
        }
        (None, false) => {
            return Err(CliError::Validation(
                "--values needs --vary ej1|ej2|em".into(),
            ))
        }
        (None, true) => None,
    };

    Ok(ScenarioSpec {
        scenario: Scenario::Both,
        params: SensorParams::symmetric(
            require(args.ej1, "ej1")?,
            require(args.ej2, "ej2")?,
            require(args.em, "em")?,
            args.ec1,
            args.ec2,
        ),
        input: Some(InputState {
            theta: require(args.theta, "theta")?,
            phi: require(args.phi, "phi")?,
        }),
        t_grid: TGrid {
            t_min: require(args.tmin, "tmin")?,
            t_max: require(args.tmax, "tmax")?,
            count: require(args.points, "points")?,
            spacing: if args.log { Spacing::Log } else { Spacing::Linear },
        },
        vary,
    })
}

fn parse_outputs(
    format: &str,
    svg_metric: &Option<String>,
) -> Result<(ExportFormat, Option<SvgMetric>), CliError> {
    let format = ExportFormat::from_str(format).map_err(CliError::from)?;
    let metric = match svg_metric {
        Some(name) => Some(SvgMetric::from_str(name).map_err(CliError::from)?),
        None => None,
    };
    Ok((format, metric))
}

fn run_and_export(
    spec: &ScenarioSpec,
    opts: &SweepOptions,
    out: &std::path::Path,
    format: ExportFormat,
    metric: Option<SvgMetric>,
) -> Result<(), CliError> {
    let result = run_sweep(spec, opts)?;
    export_with_metric(&result, format, out, metric)?;
    println!("wrote {} rows to {}", result.rows.len(), out.display());
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let spec = spec_from_args(args)?;
    let (format, metric) = parse_outputs(&args.format, &args.svg_metric)?;
    let opts = SweepOptions {
        support_cutoff: cutoff_from_env()?,
        reduced: args.reduced,
        notes: Vec::new(),
    };
    run_and_export(&spec, &opts, &args.out, format, metric)
}

fn cmd_figure(args: &FigureArgs) -> Result<(), CliError> {
    let preset = FigurePreset::from_str(&args.name).map_err(CliError::from)?;
    let (spec, notes) = figure_preset(preset);
    let (format, metric) = parse_outputs(&args.format, &args.svg_metric)?;
    let opts = SweepOptions {
        support_cutoff: cutoff_from_env()?,
        reduced: false,
        notes,
    };
    run_and_export(&spec, &opts, &args.out, format, metric)
}

fn cmd_selftest() -> ExitCode {
    let outcomes = thermoprobe_core::selftest::run_all();
    for outcome in &outcomes {
        println!("{}", outcome.line());
    }
    let errored = outcomes
        .iter()
        .any(|o| o.verdict == thermoprobe_core::selftest::Verdict::Error);
    let failed = outcomes.iter().any(|o| !o.passed());
    let passed = outcomes.iter().filter(|o| o.passed()).count();
    println!("{passed}/{} criteria passed", outcomes.len());
    if errored {
        ExitCode::from(2)
    } else if failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sweep(args) => cmd_sweep(args),
        Command::Figure(args) => cmd_figure(args),
        Command::Selftest => return cmd_selftest(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("numerical error: {msg}");
            ExitCode::from(2)
        }
    }
}
