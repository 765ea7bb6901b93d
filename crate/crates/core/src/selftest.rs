//! The full oracle/property suite behind `thermoprobe selftest` and the
//! acceptance test target: route equivalences, estimation-theory
//! cross-checks and the figure-level sensitivity claims, each with its
//! tolerance pinned in code.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use crate::matcore::{hermitian_eig, ComplexMatrix};
use crate::metrology::{
    classical_fisher_information, finite_difference, hss, qfi, qfi_from_derivative,
    DerivativeSource, ParameterizedState, Povm, SUPPORT_CUTOFF,
};
use crate::sensor::{
    gibbs_state, thermal_state_closed_form, thermal_state_derivative, GibbsFamily, SensorParams,
    ThermalFamily, ThermalPoint,
};
use crate::sweep::{
    figure_preset, run_sweep, to_csv, FigurePreset, SweepOptions, SweepResult,
};
use crate::teleport::{
    fidelity, input_state, teleport_output, teleport_output_closed_form, InputState,
    TeleportedFamily, CLASSICAL_FIDELITY_THRESHOLD,
};

/// Seed for every randomized check; the suite is fully deterministic.
const SEED: u64 = 0x7468_6572_6d6f;

/// Fidelity of the teleported fig5 state at the lowest grid temperature,
/// frozen from the pipeline itself (golden value; the source figure only
/// supports the qualitative threshold claim).
pub const FIG5_FIDELITY_AT_T_MIN: f64 = 0.7251344900299668;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// The check could not be evaluated (numerical failure inside).
    Error,
}

#[derive(Clone, Debug)]
pub struct CriterionOutcome {
    pub name: &'static str,
    pub verdict: Verdict,
    pub detail: String,
}

impl CriterionOutcome {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn line(&self) -> String {
        let tag = match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Error => "ERROR",
        };
        format!("{tag} {} — {}", self.name, self.detail)
    }
}

fn outcome(name: &'static str, run: impl FnOnce() -> Result<(bool, String), crate::Error>) -> CriterionOutcome {
    match run() {
        Ok((true, detail)) => CriterionOutcome {
            name,
            verdict: Verdict::Pass,
            detail,
        },
        Ok((false, detail)) => CriterionOutcome {
            name,
            verdict: Verdict::Fail,
            detail,
        },
        Err(e) => CriterionOutcome {
            name,
            verdict: Verdict::Error,
            detail: e.to_string(),
        },
    }
}

/// Random Hermitian matrix with entries drawn uniformly from [-1, 1].
pub fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
    .hermitized()
}

/// Gram-Schmidt orthonormal basis from random complex vectors.
pub fn random_orthonormal_basis(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Vec<Complex64>> {
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

fn preset_parameter_sets() -> Vec<(SensorParams, InputState)> {
    let mut sets = Vec::new();
    for preset in FigurePreset::ALL {
        let (spec, _) = figure_preset(preset);
        let input = spec.input.expect("presets define an input");
        sets.push((spec.params, input));
        if let Some(vary) = &spec.vary {
            for &value in &vary.values {
                let mut p = spec.params;
                match vary.field {
                    crate::sweep::VaryField::Ej1 => p.ej1 = value,
                    crate::sweep::VaryField::Ej2 => p.ej2 = value,
                    crate::sweep::VaryField::Em => p.em = value,
                }
                sets.push((p, input));
            }
        }
    }
    sets
}

fn preset_sweep(preset: FigurePreset) -> Result<SweepResult, crate::Error> {
    let (spec, notes) = figure_preset(preset);
    Ok(run_sweep(
        &spec,
        &SweepOptions {
            notes,
            ..Default::default()
        },
    )?)
}

/// Gibbs-vs-closed-form agreement over the 20x20 (E_J1, E_m) grid at three
/// temperatures; max entrywise deviation must stay within 1e-10.
pub fn thermal_route_equivalence() -> CriterionOutcome {
    outcome("thermal-route-equivalence", || {
        let mut worst: f64 = 0.0;
        let mut worst_min_eig: f64 = f64::INFINITY;
        for i in 0..20 {
            for j in 0..20 {
                let ej1 = 0.01 + (4.0 - 0.01) * i as f64 / 19.0;
                let em = 0.01 + (4.0 - 0.01) * j as f64 / 19.0;
                let p = SensorParams::symmetric(ej1, 0.1, em, 1.0, 1.0);
                for t in [0.05, 0.5, 5.0] {
                    let tp = ThermalPoint::new(t)?;
                    let spectral = gibbs_state(&p, &tp)?;
                    let closed = thermal_state_closed_form(&p, &tp)?;
                    worst = worst.max(spectral.matrix().max_abs_diff(closed.matrix()));
                    for rho in [&spectral, &closed] {
                        worst_min_eig = worst_min_eig
                            .min(rho.eigenvalues().map_err(crate::sensor::SensorError::from)?[0]);
                    }
                }
            }
        }
        let pass = worst <= 1e-10 && worst_min_eig >= -1e-12;
        Ok((pass, format!(
            "max entrywise route deviation {worst:.3e} (tol 1e-10), min eigenvalue {worst_min_eig:.3e}"
        )))
    })
}

/// Closed-form teleported output against the Bell-composition channel over
/// every figure parameter set, 50 temperatures and 8 input-angle pairs.
pub fn teleport_closed_form_equivalence() -> CriterionOutcome {
    outcome("teleport-closed-form", || {
        let angles = [
            (0.0, 0.0),
            (PI / 2.0, 0.0),
            (PI / 2.0, PI / 2.0),
            (PI / 2.0, PI),
            (PI / 4.0, PI / 3.0),
            (PI, 0.0),
            (2.0, 4.0),
            (1.0, 5.5),
        ];
        let mut worst: f64 = 0.0;
        for (params, _) in preset_parameter_sets() {
            for k in 0..50 {
                let t = 0.05 + (5.0 - 0.05) * k as f64 / 49.0;
                let tp = ThermalPoint::new(t)?;
                let rho_ch = thermal_state_closed_form(&params, &tp)?;
                for (theta, phi) in angles {
                    let input = InputState::new(theta, phi)?;
                    let composed = teleport_output(&rho_ch, &input_state(&input)?)?;
                    let direct = teleport_output_closed_form(&params, &tp, &input)?;
                    worst = worst.max(composed.matrix().max_abs_diff(direct.matrix()));
                }
            }
        }
        Ok((worst <= 1e-10, format!(
            "max entrywise channel deviation {worst:.3e} (tol 1e-10)"
        )))
    })
}

fn random_families(count: usize) -> Result<Vec<GibbsFamily>, crate::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..count)
        .map(|_| Ok(GibbsFamily::new(&random_hermitian(&mut rng, 4))?))
        .collect()
}

/// Pair-sum, classical/quantum split and SLD-trace QFI routes agree to 1e-8
/// relative on 200 random full-rank thermal families.
pub fn qfi_triple_route_agreement() -> CriterionOutcome {
    outcome("qfi-triple-route", || {
        let mut worst: f64 = 0.0;
        for family in random_families(200)? {
            let rho = family.evaluate(1.0)?;
            let drho = family.derivative(1.0)?.expect("analytic derivative");
            let report =
                qfi_from_derivative(&rho, &drho, SUPPORT_CUTOFF, DerivativeSource::Analytic)
                    .map_err(crate::Error::from)?;
            let split = report.classical_part + report.quantum_part;
            let l = crate::metrology::sld(&rho, &drho).map_err(crate::Error::from)?;
            let trace_route = (&(rho.matrix() * &l) * &l).trace().re;
            worst = worst
                .max((report.total - split).abs() / report.total)
                .max((report.total - trace_route).abs() / report.total);
        }
        Ok((worst <= 1e-8, format!(
            "worst relative route disagreement {worst:.3e} over 200 families (tol 1e-8)"
        )))
    })
}

/// Measuring in the SLD eigenbasis reproduces the QFI; arbitrary projective
/// measurements never beat it.
pub fn sld_measurement_optimality() -> CriterionOutcome {
    outcome("sld-optimality", || {
        let families = random_families(200)?;
        let mut worst_opt: f64 = 0.0;
        for family in &families {
            let rho = family.evaluate(1.0)?;
            let drho = family.derivative(1.0)?.expect("analytic derivative");
            let bound = qfi_from_derivative(&rho, &drho, SUPPORT_CUTOFF, DerivativeSource::Analytic)
                .map_err(crate::Error::from)?
                .total;
            let l = crate::metrology::sld(&rho, &drho).map_err(crate::Error::from)?;
            let povm = Povm::from_eigensystem(&hermitian_eig(&l).map_err(crate::Error::from)?)
                .map_err(crate::Error::from)?;
            let cfi =
                classical_fisher_information(&rho, &drho, &povm).map_err(crate::Error::from)?;
            worst_opt = worst_opt.max((cfi - bound).abs() / bound);
        }

        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0xbeef);
        let mut worst_excess: f64 = 0.0;
        for family in families.iter().take(100) {
            let rho = family.evaluate(1.0)?;
            let drho = family.derivative(1.0)?.expect("analytic derivative");
            let bound = qfi_from_derivative(&rho, &drho, SUPPORT_CUTOFF, DerivativeSource::Analytic)
                .map_err(crate::Error::from)?
                .total;
            let povm = Povm::projective(&random_orthonormal_basis(&mut rng, 4))
                .map_err(crate::Error::from)?;
            let cfi =
                classical_fisher_information(&rho, &drho, &povm).map_err(crate::Error::from)?;
            worst_excess = worst_excess.max((cfi - bound) / bound);
        }

        let pass = worst_opt <= 1e-8 && worst_excess <= 1e-9;
        Ok((pass, format!(
            "SLD-basis CFI off by {worst_opt:.3e} rel (tol 1e-8); worst random-POVM excess {worst_excess:.3e} (tol 1e-9)"
        )))
    })
}

/// Analytic d rho / dT against the central-difference oracle at 20
/// temperatures per figure preset, 1e-6 relative Frobenius.
pub fn derivative_cross_check() -> CriterionOutcome {
    outcome("derivative-cross-check", || {
        let mut worst: f64 = 0.0;
        for preset in FigurePreset::ALL {
            let (spec, _) = figure_preset(preset);
            let family = ThermalFamily::new(spec.params)?;
            for k in 0..20 {
                let t = 0.05 + (5.0 - 0.05) * k as f64 / 19.0;
                let analytic = thermal_state_derivative(&spec.params, &ThermalPoint::new(t)?)?;
                let fd = finite_difference(&family, t, None)?;
                let rel = (&fd - &analytic).frobenius_norm() / analytic.frobenius_norm();
                worst = worst.max(rel);
            }
        }
        Ok((worst <= 1e-6, format!(
            "worst relative Frobenius deviation {worst:.3e} (tol 1e-6)"
        )))
    })
}

/// Direct sensing is at least as sensitive as remote sensing: on the fig4
/// preset pointwise, and as the channel-monotonicity inequality on every
/// preset.
pub fn direct_beats_remote() -> CriterionOutcome {
    outcome("direct-beats-remote", || {
        let mut worst_ratio: f64 = 0.0;
        for preset in FigurePreset::ALL {
            let result = preset_sweep(preset)?;
            for row in &result.rows {
                let direct = row.qfi_direct.expect("both scenarios run");
                let remote = row.qfi_remote.expect("both scenarios run");
                if direct > 0.0 {
                    worst_ratio = worst_ratio.max(remote / direct);
                }
                if remote > direct * (1.0 + 1e-9) {
                    return Ok((false, format!(
                        "{}: remote QFI {remote} exceeds direct {direct} at T={}",
                        preset.name(),
                        row.t
                    )));
                }
            }
        }
        Ok((true, format!(
            "remote/direct QFI ratio <= {worst_ratio:.6} across all presets (tol 1+1e-9)"
        )))
    })
}

/// fig5: teleportation fidelity at the lowest grid temperature clears the
/// classical threshold and matches the frozen pipeline value; fidelity
/// decreases toward the hot end.
pub fn low_temperature_fidelity() -> CriterionOutcome {
    outcome("low-temperature-fidelity", || {
        let (spec, _) = figure_preset(FigurePreset::Fig5);
        let input = spec.input.expect("fig5 has an input");
        let rho_in = input_state(&input)?;
        let family = TeleportedFamily::new(spec.params, input)?;
        let f_cold = fidelity(&rho_in, &family.evaluate(spec.t_grid.t_min)?)?;
        let f_hot = fidelity(&rho_in, &family.evaluate(spec.t_grid.t_max)?)?;

        let above_threshold = f_cold > CLASSICAL_FIDELITY_THRESHOLD;
        let matches_golden =
            (f_cold - FIG5_FIDELITY_AT_T_MIN).abs() <= 1e-9 * FIG5_FIDELITY_AT_T_MIN;
        let decreasing = f_hot < f_cold;
        let pass = above_threshold && matches_golden && decreasing;
        Ok((pass, format!(
            "f(T=0.05) = {f_cold:.12} (threshold 2/3, golden {FIG5_FIDELITY_AT_T_MIN}), f(T=5) = {f_hot:.12}"
        )))
    })
}

fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = f64::NEG_INFINITY;
    let mut idx = 0;
    for (i, v) in values.enumerate() {
        if v > best {
            best = v;
            idx = i;
        }
    }
    idx
}

/// QFI and HSS peak at the same grid location (within 2 steps) for the fig3
/// presets, direct columns on fig3a and remote columns on fig3b.
pub fn qfi_hss_extremum_alignment() -> CriterionOutcome {
    outcome("qfi-hss-extrema", || {
        let direct = preset_sweep(FigurePreset::Fig3a)?;
        let qd = argmax(direct.rows.iter().map(|r| r.qfi_direct.unwrap()));
        let hd = argmax(direct.rows.iter().map(|r| r.hss_direct.unwrap()));

        let remote = preset_sweep(FigurePreset::Fig3b)?;
        let qr = argmax(remote.rows.iter().map(|r| r.qfi_remote.unwrap()));
        let hr = argmax(remote.rows.iter().map(|r| r.hss_remote.unwrap()));

        let d1 = qd.abs_diff(hd);
        let d2 = qr.abs_diff(hr);
        Ok((d1 <= 2 && d2 <= 2, format!(
            "argmax offsets: direct |{qd}-{hd}| = {d1}, remote |{qr}-{hr}| = {d2} (tol 2 grid steps)"
        )))
    })
}

/// Increasing the mutual coupling never lowers the remote sensitivity peak
/// (fig2d vary set).
pub fn coupling_improves_remote_sensitivity() -> CriterionOutcome {
    outcome("coupling-improves-sensitivity", || {
        let result = preset_sweep(FigurePreset::Fig2d)?;
        let mut peaks: Vec<(f64, f64)> = Vec::new();
        for row in &result.rows {
            let v = row.vary_value.expect("fig2d varies em");
            let q = row.qfi_remote.expect("remote scenario runs");
            match peaks.last_mut() {
                Some((value, peak)) if *value == v => *peak = peak.max(q),
                _ => peaks.push((v, q)),
            }
        }
        let ordered = peaks.windows(2).all(|w| w[1].1 >= w[0].1);
        let summary: Vec<String> = peaks
            .iter()
            .map(|(v, p)| format!("em={v}: {p:.4}"))
            .collect();
        Ok((ordered, format!("remote QFI peaks [{}]", summary.join(", "))))
    })
}

/// At T = 1e6 a weakly coupled sensor saturates: thermal state at I/4,
/// teleported output at I/2, and both sensitivities at numerical zero.
pub fn high_temperature_saturation() -> CriterionOutcome {
    outcome("high-temperature-saturation", || {
        // Weak couplings keep the leading deviation beta*||H||/4 under the
        // 1e-8 gate at this temperature.
        let params = SensorParams::symmetric(0.05, 0.01, 0.02, 1.0, 1.0);
        let input = InputState::new(PI / 2.0, PI / 2.0)?;
        let t = 1e6;
        let tp = ThermalPoint::new(t)?;

        let rho_ch = thermal_state_closed_form(&params, &tp)?;
        let dev_ch = rho_ch
            .matrix()
            .max_abs_diff(&ComplexMatrix::identity(4).scale_re(0.25));

        let rho_out = teleport_output_closed_form(&params, &tp, &input)?;
        let dev_out = rho_out
            .matrix()
            .max_abs_diff(&ComplexMatrix::identity(2).scale_re(0.5));

        let thermal = ThermalFamily::new(params)?;
        let remote = TeleportedFamily::new(params, input)?;
        let qfi_direct = qfi(&thermal, t)?.total;
        let qfi_remote = qfi(&remote, t)?.total;
        let hss_direct = hss(&thermal.derivative(t)?.expect("analytic"));
        let hss_remote = hss(&remote.derivative(t)?.expect("analytic"));

        let pass = dev_ch <= 1e-8
            && dev_out <= 1e-8
            && qfi_direct < 1e-8
            && qfi_remote < 1e-8
            && hss_direct < 1e-8
            && hss_remote < 1e-8;
        Ok((pass, format!(
            "|rho_ch - I/4| = {dev_ch:.3e}, |rho_out - I/2| = {dev_out:.3e}, \
             QFI (direct {qfi_direct:.3e}, remote {qfi_remote:.3e}), \
             HSS (direct {hss_direct:.3e}, remote {hss_remote:.3e}); all tol 1e-8"
        )))
    })
}

/// The fig4 pipeline rendered twice gives byte-identical CSV.
pub fn export_determinism() -> CriterionOutcome {
    outcome("export-determinism", || {
        let a = to_csv(&preset_sweep(FigurePreset::Fig4)?);
        let b = to_csv(&preset_sweep(FigurePreset::Fig4)?);
        Ok((a == b, format!(
            "two renders of the fig4 sweep: {} bytes each, identical = {}",
            a.len(),
            a == b
        )))
    })
}

/// Runs every acceptance criterion in order.
pub fn run_all() -> Vec<CriterionOutcome> {
    vec![
        thermal_route_equivalence(),
        teleport_closed_form_equivalence(),
        qfi_triple_route_agreement(),
        sld_measurement_optimality(),
        derivative_cross_check(),
        direct_beats_remote(),
        low_temperature_fidelity(),
        qfi_hss_extremum_alignment(),
        coupling_improves_remote_sensitivity(),
        high_temperature_saturation(),
        export_determinism(),
    ]
}
