use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::{SweepError, SweepResult};

/// Exact column layout of the CSV export.
pub const CSV_HEADER: &str =
    "vary_value,T,qfi_direct,hss_direct,qfi_remote,hss_remote,fidelity,p0,p1,p2,p3,skipped_terms";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
    Svg,
}

impl FromStr for ExportFormat {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, SweepError> {
        match s {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            "svg" => Ok(ExportFormat::Svg),
            other => Err(SweepError::Invalid(format!(
                "unknown export format '{other}' (expected csv, json or svg)"
            ))),
        }
    }
}

/// Which column an SVG export plots against temperature.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SvgMetric {
    QfiDirect,
    HssDirect,
    QfiRemote,
    HssRemote,
    Fidelity,
}

impl SvgMetric {
    pub fn name(self) -> &'static str {
        match self {
            SvgMetric::QfiDirect => "qfi_direct",
            SvgMetric::HssDirect => "hss_direct",
            SvgMetric::QfiRemote => "qfi_remote",
            SvgMetric::HssRemote => "hss_remote",
            SvgMetric::Fidelity => "fidelity",
        }
    }

    /// Remote QFI when the sweep produced it, otherwise direct QFI.
    pub fn default_for(result: &SweepResult) -> SvgMetric {
        if result.rows.iter().any(|r| r.qfi_remote.is_some()) {
            SvgMetric::QfiRemote
        } else {
            SvgMetric::QfiDirect
        }
    }

    fn extract(self, row: &super::SweepRow) -> Option<f64> {
        match self {
            SvgMetric::QfiDirect => row.qfi_direct,
            SvgMetric::HssDirect => row.hss_direct,
            SvgMetric::QfiRemote => row.qfi_remote,
            SvgMetric::HssRemote => row.hss_remote,
            SvgMetric::Fidelity => row.fidelity,
        }
    }
}

impl FromStr for SvgMetric {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, SweepError> {
        [
            SvgMetric::QfiDirect,
            SvgMetric::HssDirect,
            SvgMetric::QfiRemote,
            SvgMetric::HssRemote,
            SvgMetric::Fidelity,
        ]
        .into_iter()
        .find(|m| m.name() == s)
        .ok_or_else(|| SweepError::Invalid(format!("unknown svg metric '{s}'")))
    }
}

fn fmt_opt(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v}"),
        None => String::new(),
    }
}

/// CSV rendering: the pinned header plus one line per row, numbers in
/// shortest-round-trip decimal form, absent columns as empty cells.
pub fn to_csv(result: &SweepResult) -> String {
    let mut out = String::with_capacity(64 * (result.rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in &result.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt_opt(row.vary_value),
            row.t,
            fmt_opt(row.qfi_direct),
            fmt_opt(row.hss_direct),
            fmt_opt(row.qfi_remote),
            fmt_opt(row.hss_remote),
            fmt_opt(row.fidelity),
            row.p0,
            row.p1,
            row.p2,
            row.p3,
            row.skipped_terms,
        );
    }
    out
}

pub fn to_json(result: &SweepResult) -> Result<String, SweepError> {
    let mut text = serde_json::to_string_pretty(result)
        .map_err(|e| SweepError::Invalid(format!("json serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

const SVG_WIDTH: f64 = 720.0;
const SVG_HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 24.0;
const MARGIN_BOTTOM: f64 = 56.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

fn svg_num(v: f64) -> String {
    format!("{v:.3}")
}

/// Line plot of one metric against T, one polyline per vary value. Plots of
/// the fidelity column carry a dashed horizontal rule at the classical
/// threshold 2/3.
pub fn to_svg(result: &SweepResult, metric: SvgMetric) -> String {
    let points: Vec<(Option<f64>, f64, f64)> = result
        .rows
        .iter()
        .filter_map(|row| metric.extract(row).map(|v| (row.vary_value, row.t, v)))
        .collect();

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">"#
    );
    let _ = writeln!(
        out,
        r#"  <rect width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="white"/>"#
    );

    if points.is_empty() {
        let _ = writeln!(
            out,
            r#"  <text x="{:.1}" y="{:.1}" text-anchor="middle" font-family="sans-serif">no data for column {}</text>"#,
            SVG_WIDTH / 2.0,
            SVG_HEIGHT / 2.0,
            metric.name()
        );
        out.push_str("</svg>\n");
        return out;
    }

    let (x0, x1) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.1), hi.max(p.1))
        });
    let (mut y0, mut y1) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.2), hi.max(p.2))
        });
    if metric == SvgMetric::Fidelity {
        // keep the classical threshold in frame
        y0 = y0.min(2.0 / 3.0);
        y1 = y1.max(2.0 / 3.0);
    }
    if (y1 - y0).abs() < 1e-300 {
        y1 = y0 + 1.0;
    }
    let x_span = if (x1 - x0).abs() < 1e-300 { 1.0 } else { x1 - x0 };
    let plot_w = SVG_WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = SVG_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + (x - x0) / x_span * plot_w;
    let sy = |y: f64| MARGIN_TOP + (1.0 - (y - y0) / (y1 - y0)) * plot_h;

    // axes
    let _ = writeln!(
        out,
        r#"  <line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="black"/>"#,
        MARGIN_LEFT,
        MARGIN_TOP + plot_h,
        MARGIN_LEFT + plot_w,
        MARGIN_TOP + plot_h
    );
    let _ = writeln!(
        out,
        r#"  <line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="black"/>"#,
        MARGIN_LEFT,
        MARGIN_TOP,
        MARGIN_LEFT,
        MARGIN_TOP + plot_h
    );
    for k in 0..=4 {
        let frac = k as f64 / 4.0;
        let xv = x0 + frac * (x1 - x0);
        let yv = y0 + frac * (y1 - y0);
        let _ = writeln!(
            out,
            r#"  <text x="{:.1}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="11">{}</text>"#,
            sx(xv),
            MARGIN_TOP + plot_h + 18.0,
            svg_num(xv)
        );
        let _ = writeln!(
            out,
            r#"  <text x="{:.1}" y="{:.1}" text-anchor="end" font-family="sans-serif" font-size="11">{}</text>"#,
            MARGIN_LEFT - 6.0,
            sy(yv) + 4.0,
            svg_num(yv)
        );
    }
    // axis labels
    let _ = writeln!(
        out,
        r#"  <text x="{:.1}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="13">T</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        SVG_HEIGHT - 12.0
    );
    let _ = writeln!(
        out,
        r#"  <text x="16" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 16 {:.1})">{}</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        metric.name()
    );

    if metric == SvgMetric::Fidelity {
        let y = sy(2.0 / 3.0);
        let _ = writeln!(
            out,
            r#"  <line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="gray" stroke-dasharray="6 4"/>"#,
            MARGIN_LEFT,
            MARGIN_LEFT + plot_w
        );
        let _ = writeln!(
            out,
            r#"  <text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" fill="gray">2/3</text>"#,
            MARGIN_LEFT + plot_w - 30.0,
            y - 5.0
        );
    }

    // one series per vary value, in row order (already sorted)
    type Series = (Option<f64>, Vec<(f64, f64)>);
    let mut series: Vec<Series> = Vec::new();
    for (vary, t, v) in &points {
        match series.last_mut() {
            Some((key, pts)) if key == vary => pts.push((*t, *v)),
            _ => series.push((*vary, vec![(*t, *v)])),
        }
    }
    for (idx, (vary, pts)) in series.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let path: Vec<String> = pts
            .iter()
            .map(|(t, v)| format!("{:.2},{:.2}", sx(*t), sy(*v)))
            .collect();
        let _ = writeln!(
            out,
            r#"  <polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            path.join(" ")
        );
        let label = match vary {
            Some(v) => format!(
                "{} = {v}",
                result
                    .meta
                    .spec
                    .vary
                    .as_ref()
                    .map(|vr| vr.field.name())
                    .unwrap_or("vary")
            ),
            None => metric.name().to_string(),
        };
        let _ = writeln!(
            out,
            r#"  <text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" fill="{color}">{label}</text>"#,
            MARGIN_LEFT + plot_w - 110.0,
            MARGIN_TOP + 14.0 * (idx as f64 + 1.0)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Renders `result` in the requested format and writes it to `path`.
pub fn export(result: &SweepResult, format: ExportFormat, path: &Path) -> Result<(), SweepError> {
    export_with_metric(result, format, path, None)
}

/// Like [`export`], with an explicit SVG column choice.
pub fn export_with_metric(
    result: &SweepResult,
    format: ExportFormat,
    path: &Path,
    svg_metric: Option<SvgMetric>,
) -> Result<(), SweepError> {
    let payload = match format {
        ExportFormat::Csv => to_csv(result),
        ExportFormat::Json => to_json(result)?,
        ExportFormat::Svg => to_svg(
            result,
            svg_metric.unwrap_or_else(|| SvgMetric::default_for(result)),
        ),
    };
    std::fs::write(path, payload)?;
    Ok(())
}
