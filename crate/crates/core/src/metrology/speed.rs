use super::MetrologyError;

/// Which member of the alpha-distance family to evaluate.
///
/// `RootTransformed` is the form with probabilities raised to 1/alpha before
/// differencing (a generalized Hellinger distance); `PlainDifference` uses
/// |p_x - q_x|^alpha directly, which is the classical counterpart of the
/// Hilbert-Schmidt speed at alpha = 2. The two disagree for alpha = 2
/// (Hellinger vs. Euclidean), so both are kept behind this flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistanceVariant {
    RootTransformed,
    PlainDifference,
}

/// d_alpha(p, q) = (1/2 sum_x |...|^alpha)^(1/alpha) over the selected
/// variant.
pub fn classical_distance_alpha(
    p: &[f64],
    q: &[f64],
    alpha: f64,
    variant: DistanceVariant,
) -> Result<f64, MetrologyError> {
    if p.len() != q.len() {
        return Err(MetrologyError::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    if !alpha.is_finite() || alpha < 1.0 {
        return Err(MetrologyError::InvalidAlpha(alpha));
    }
    debug_assert!(p.iter().all(|&x| x >= -1e-12));
    debug_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
    debug_assert!((q.iter().sum::<f64>() - 1.0).abs() <= 1e-10);

    let inv = 1.0 / alpha;
    let sum: f64 = p
        .iter()
        .zip(q)
        .map(|(&pi, &qi)| {
            let diff = match variant {
                DistanceVariant::RootTransformed => {
                    pi.max(0.0).powf(inv) - qi.max(0.0).powf(inv)
                }
                DistanceVariant::PlainDifference => pi - qi,
            };
            diff.abs().powf(alpha)
        })
        .sum();
    Ok((0.5 * sum).powf(inv))
}

/// One-sided derivative of theta -> d_alpha(p(theta0 + theta), p(theta0)) at
/// theta -> 0+, by forward differencing with step halving until two
/// successive estimates agree to 1e-6 relative. Errs after 20 halvings.
pub fn classical_statistical_speed(
    family: impl Fn(f64) -> Vec<f64>,
    at: f64,
    alpha: f64,
    variant: DistanceVariant,
) -> Result<f64, MetrologyError> {
    let base = family(at);
    let mut h = 1e-2 * at.abs().max(1.0);
    let mut previous: Option<f64> = None;
    for _ in 0..=20 {
        let probe = family(at + h);
        let estimate = classical_distance_alpha(&probe, &base, alpha, variant)? / h;
        if let Some(prev) = previous {
            if (estimate - prev).abs() <= 1e-6 * estimate.abs() + 1e-15 {
                return Ok(estimate);
            }
        }
        previous = Some(estimate);
        h *= 0.5;
    }
    Err(MetrologyError::NoConvergence)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_of_identical_distributions_is_zero() {
        let p = [0.2, 0.3, 0.5];
        for variant in [DistanceVariant::RootTransformed, DistanceVariant::PlainDifference] {
            assert_eq!(classical_distance_alpha(&p, &p, 2.0, variant).unwrap(), 0.0);
        }
    }

    #[test]
    fn orthogonal_point_masses() {
        let p = [1.0, 0.0];
        let q = [0.0, 1.0];
        // alpha = 1: 1/2 (1 + 1) = 1
        let d1 = classical_distance_alpha(&p, &q, 1.0, DistanceVariant::RootTransformed).unwrap();
        assert!((d1 - 1.0).abs() <= 1e-15);
        // alpha = 2 under both variants: (1/2 (1 + 1))^(1/2) = 1
        for variant in [DistanceVariant::RootTransformed, DistanceVariant::PlainDifference] {
            let d2 = classical_distance_alpha(&p, &q, 2.0, variant).unwrap();
            assert!((d2 - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn length_mismatch_rejected() {
        assert!(matches!(
            classical_distance_alpha(&[1.0], &[0.5, 0.5], 2.0, DistanceVariant::PlainDifference),
            Err(MetrologyError::LengthMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn alpha_below_one_rejected() {
        assert!(matches!(
            classical_distance_alpha(&[1.0], &[1.0], 0.5, DistanceVariant::PlainDifference),
            Err(MetrologyError::InvalidAlpha(_))
        ));
    }

    #[test]
    fn constant_family_has_zero_speed() {
        let speed = classical_statistical_speed(
            |_| vec![0.4, 0.6],
            1.0,
            2.0,
            DistanceVariant::PlainDifference,
        )
        .unwrap();
        assert_eq!(speed, 0.0);
    }

    #[test]
    fn bloch_family_speed_matches_brute_force() {
        let family = |t: f64| vec![0.5 + t, 0.5 - t];
        // plain variant at alpha = 2 is the classical analogue of the
        // Hilbert-Schmidt speed of diag(1/2 + t, 1/2 - t), which is exactly 1
        let speed =
            classical_statistical_speed(family, 0.0, 2.0, DistanceVariant::PlainDifference)
                .unwrap();
        assert!((speed - 1.0).abs() <= 1e-6, "speed {speed}");

        // brute-force oracle at a fixed small step
        let h = 1e-6;
        let oracle = classical_distance_alpha(
            &family(h),
            &family(0.0),
            2.0,
            DistanceVariant::PlainDifference,
        )
        .unwrap()
            / h;
        assert!((speed - oracle).abs() <= 1e-6 * oracle.abs());
    }

    #[test]
    fn hellinger_form_speed_of_bloch_family() {
        // as-printed variant at alpha = 2: speed = sqrt(F_classical / 8)
        // with F = 4 at p = 1/2, i.e. 1/sqrt(2)
        let family = |t: f64| vec![0.5 + t, 0.5 - t];
        let speed =
            classical_statistical_speed(family, 0.0, 2.0, DistanceVariant::RootTransformed)
                .unwrap();
        let expect = 0.5f64.sqrt();
        assert!((speed - expect).abs() <= 1e-5, "speed {speed}");
    }

    #[test]
    fn cusp_family_never_stabilizes() {
        // sqrt growth makes the forward estimate scale like h^{-1/2}, so
        // successive halvings keep changing it by a factor sqrt(2)
        let family = |t: f64| {
            let eps = 0.1 * t.abs().sqrt();
            vec![0.5 + eps, 0.5 - eps]
        };
        assert!(matches!(
            classical_statistical_speed(family, 0.0, 2.0, DistanceVariant::PlainDifference),
            Err(MetrologyError::NoConvergence)
        ));
    }

    #[test]
    fn speed_converges_on_smooth_families() {
        // exponential-decay family: d/dt at t0 = 1 known in closed form via
        // p0'(1) = -e^{-1}
        let family = |t: f64| {
            let p0 = (-t).exp();
            vec![p0, 1.0 - p0]
        };
        let speed =
            classical_statistical_speed(family, 1.0, 2.0, DistanceVariant::PlainDifference)
                .unwrap();
        let expect = (-1.0f64).exp(); // sqrt(1/2 * 2 * p0'^2) = |p0'|
        assert!((speed - expect).abs() <= 1e-5 * expect);
    }
}
