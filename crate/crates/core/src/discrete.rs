//! Curvature/torsion estimation from sampled curves and least-squares fits of
//! the profile families back onto the estimates.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frenet::{SampledCurve, Vec3};
use crate::profiles::{detect_family, ProfileFamily, RationalLinearProfile, FAMILY_TOL};

/// Points per finite-difference stencil.
const STENCIL: usize = 5;

/// `|α′ × α″|` below which torsion is undefined.
pub const DEGENERATE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntrinsicRow {
    pub s: f64,
    pub kappa: f64,
    pub tau: f64,
}

/// Estimated `(s, κ̂, τ̂)` rows, one per curve sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntrinsicSamples {
    rows: Vec<IntrinsicRow>,
}

impl IntrinsicSamples {
    pub fn new(rows: Vec<IntrinsicRow>) -> Result<Self> {
        if let Some(i) = rows.windows(2).position(|w| !(w[0].s < w[1].s)) {
            return Err(Error::Domain(format!(
                "arc length not strictly increasing at row {}",
                i + 1
            )));
        }
        if let Some(r) = rows.iter().find(|r| !(r.kappa >= 0.0) || !r.tau.is_finite()) {
            return Err(Error::Domain(format!(
                "invalid curvature/torsion ({}, {}) at s = {}",
                r.kappa, r.tau, r.s
            )));
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[IntrinsicRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows without the first and last sample, whose one-sided stencils are
    /// the least accurate.
    pub fn interior(&self) -> &[IntrinsicRow] {
        if self.rows.len() <= 2 {
            &[]
        } else {
            &self.rows[1..self.rows.len() - 1]
        }
    }

    pub fn kappa_series(&self) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r.s, r.kappa)).collect()
    }

    pub fn tau_series(&self) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r.s, r.tau)).collect()
    }
}

/// Finite-difference weights (Fornberg) for derivatives `0..=order` at `z`
/// from values at `nodes`. `w[k][j]` multiplies `f(nodes[j])` for the
/// `k`-th derivative.
pub fn fd_weights(z: f64, nodes: &[f64], order: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut w = vec![vec![0.0; n]; order + 1];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - z;
    w[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - z;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    w[k][i] = c1 * (k as f64 * w[k - 1][i - 1] - c5 * w[k][i - 1]) / c2;
                }
                w[0][i] = -c1 * c5 * w[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                w[k][j] = (c4 * w[k][j] - k as f64 * w[k - 1][j]) / c3;
            }
            w[0][j] = c4 * w[0][j] / c3;
        }
        c1 = c2;
    }
    w
}

/// Index range of the `width`-point stencil used at sample `i` of `n`:
/// centred where possible, shifted inward at the ends.
fn stencil(i: usize, n: usize, width: usize) -> std::ops::Range<usize> {
    let half = width / 2;
    let start = i.saturating_sub(half).min(n - width);
    start..start + width
}

fn combine(weights: &[f64], values: &[Vec3]) -> Vec3 {
    weights
        .iter()
        .zip(values)
        .fold(Vec3::zeros(), |acc, (w, v)| acc + *w * v)
}

/// Estimate curvature and torsion at every sample of `curve`.
///
/// With frames, `κ = |T′|` and `τ = −⟨B′, N⟩` from finite differences of the
/// frame vectors. Without frames, the first three derivatives of position
/// come from a local degree-four interpolant and
/// `κ = |α′×α″| / |α′|³`, `τ = ⟨α′×α″, α‴⟩ / |α′×α″|²`.
pub fn estimate_curvature_torsion(curve: &SampledCurve) -> Result<IntrinsicSamples> {
    let n = curve.len();
    if n < STENCIL {
        return Err(Error::InsufficientData {
            needed: STENCIL,
            got: n,
        });
    }
    let rows = match curve.frames() {
        Some(frames) => {
            let tangents: Vec<Vec3> = frames.iter().map(|f| f.tangent).collect();
            let binormals: Vec<Vec3> = frames.iter().map(|f| f.binormal).collect();
            (0..n)
                .map(|i| {
                    let r = stencil(i, n, STENCIL);
                    let w = fd_weights(curve.s()[i], &curve.s()[r.clone()], 1);
                    let dt = combine(&w[1], &tangents[r.clone()]);
                    let db = combine(&w[1], &binormals[r]);
                    IntrinsicRow {
                        s: curve.s()[i],
                        kappa: dt.norm(),
                        tau: -db.dot(&frames[i].normal),
                    }
                })
                .collect()
        }
        None => {
            let p = curve.positions();
            let mut rows = Vec::with_capacity(n);
            for i in 0..n {
                let r = stencil(i, n, STENCIL);
                let s = curve.s()[i];
                let w = fd_weights(s, &curve.s()[r.clone()], 3);
                // differences from the centre point; the weights annihilate constants
                let local: Vec<Vec3> = p[r].iter().map(|q| q - p[i]).collect();
                let d1 = combine(&w[1], &local);
                let d2 = combine(&w[2], &local);
                let d3 = combine(&w[3], &local);
                let cross = d1.cross(&d2);
                let cn = cross.norm();
                if cn < DEGENERATE_TOL {
                    return Err(Error::Degenerate {
                        s,
                        reason: format!("|α′ × α″| = {cn:e}, torsion undefined"),
                    });
                }
                rows.push(IntrinsicRow {
                    s,
                    kappa: cn / d1.norm().powi(3),
                    tau: cross.dot(&d3) / (cn * cn),
                });
            }
            rows
        }
    };
    IntrinsicSamples::new(rows)
}

/// Fitted profile coefficients with residuals of the fitted model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    pub family: ProfileFamily,
    pub coefficients: RationalLinearProfile,
    pub rms_residual: f64,
    pub max_residual: f64,
    pub n_points: usize,
}

impl FitResult {
    pub(crate) fn from_residuals(
        family: ProfileFamily,
        coefficients: RationalLinearProfile,
        residuals: impl IntoIterator<Item = f64>,
    ) -> Self {
        let (mut sum_sq, mut max, mut n) = (0.0, 0.0_f64, 0usize);
        for r in residuals {
            let r = if r.is_nan() { f64::INFINITY } else { r.abs() };
            sum_sq += r * r;
            max = max.max(r);
            n += 1;
        }
        Self {
            family,
            coefficients,
            rms_residual: if n == 0 { 0.0 } else { (sum_sq / n as f64).sqrt() },
            max_residual: max,
            n_points: n,
        }
    }

    fn of_profile(p: RationalLinearProfile, family: ProfileFamily, xs: &[(f64, f64)]) -> Self {
        let residuals = xs
            .iter()
            .map(|&(s, v)| p.eval(s).map_or(f64::INFINITY, |f| f - v));
        Self::from_residuals(family, p, residuals)
    }
}

fn distinct_count(xs: &[(f64, f64)]) -> usize {
    let mut s: Vec<f64> = xs.iter().map(|x| x.0).collect();
    s.sort_by(f64::total_cmp);
    s.dedup();
    s.len()
}

fn check_finite(xs: &[(f64, f64)]) -> Result<()> {
    match xs.iter().find(|(s, v)| !s.is_finite() || !v.is_finite()) {
        Some((s, v)) => Err(Error::Domain(format!("non-finite sample ({s}, {v})"))),
        None => Ok(()),
    }
}

/// Least-squares constant (the mean).
pub fn fit_constant(xs: &[(f64, f64)]) -> Result<FitResult> {
    if xs.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    check_finite(xs)?;
    let mean = xs.iter().map(|x| x.1).sum::<f64>() / xs.len() as f64;
    let p = RationalLinearProfile::constant(mean)?;
    Ok(FitResult::of_profile(p, ProfileFamily::Constant, xs))
}

/// Least-squares line `a·s + b`.
pub fn fit_linear(xs: &[(f64, f64)]) -> Result<FitResult> {
    if xs.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: xs.len(),
        });
    }
    check_finite(xs)?;
    if distinct_count(xs) < 2 {
        return Err(Error::Rank("all abscissae are equal".into()));
    }
    let n = xs.len() as f64;
    let s_mean = xs.iter().map(|x| x.0).sum::<f64>() / n;
    let v_mean = xs.iter().map(|x| x.1).sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(s, v) in xs {
        sxx += (s - s_mean) * (s - s_mean);
        sxy += (s - s_mean) * (v - v_mean);
    }
    let a = sxy / sxx;
    let b = v_mean - a * s_mean;
    let p = RationalLinearProfile::linear(a, b)?;
    Ok(FitResult::of_profile(p, detect_family(&p, FAMILY_TOL), xs))
}

/// Least-squares rational-linear fit `(a·s + b)/(c·s + d)`.
///
/// Solves the linearized homogeneous system `v·(c·s + d) − (a·s + b) = 0`
/// through the right singular vector of the smallest singular value, then
/// reports residuals of the true quotient. Constant data is returned as the
/// constant profile since its null space is two-dimensional.
pub fn fit_rational_linear(xs: &[(f64, f64)]) -> Result<FitResult> {
    check_finite(xs)?;
    let distinct = distinct_count(xs);
    if distinct < 4 {
        return Err(Error::InsufficientData {
            needed: 4,
            got: distinct,
        });
    }
    let constant = fit_constant(xs)?;
    let mean = constant.coefficients.b();
    if constant.max_residual <= 1e-14 * mean.abs().max(1.0) {
        return Ok(constant);
    }

    // column scaling for conditioning
    let s_scale = xs.iter().fold(0.0_f64, |m, x| m.max(x.0.abs())).max(f64::MIN_POSITIVE);
    let v_scale = xs.iter().fold(0.0_f64, |m, x| m.max(x.1.abs())).max(f64::MIN_POSITIVE);
    let design = DMatrix::from_fn(xs.len(), 4, |i, j| {
        let (s, v) = (xs[i].0 / s_scale, xs[i].1 / v_scale);
        match j {
            0 => s,
            1 => 1.0,
            2 => -v * s,
            _ => -v,
        }
    });
    let svd = design.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sigma = |k: usize| svd.singular_values[order[k]];
    if sigma(2) <= 1e-12 * sigma(0) {
        return Err(Error::Rank(format!(
            "design matrix has rank < 3 (singular values {:?})",
            svd.singular_values.as_slice()
        )));
    }
    let null = v_t.row(order[3]);
    let (a, b, c, d) = (
        null[0] * v_scale / s_scale,
        null[1] * v_scale,
        null[2] / s_scale,
        null[3],
    );
    let p = RationalLinearProfile::new(a, b, c, d)
        .map_err(|_| Error::Rank("fitted denominator vanishes identically".into()))?;
    Ok(FitResult::of_profile(p, detect_family(&p, FAMILY_TOL), xs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frenet::{exact_helix, integrate_frenet, FrenetState};
    use crate::profiles::ProfilePair;
    use nalgebra::Rotation3;
    use proptest::prelude::*;

    fn linear_pair(k: (f64, f64), t: (f64, f64), lo: f64, hi: f64) -> ProfilePair {
        ProfilePair::new(
            RationalLinearProfile::linear(k.0, k.1).unwrap(),
            RationalLinearProfile::linear(t.0, t.1).unwrap(),
            lo,
            hi,
        )
        .unwrap()
    }

    fn integrate(pp: &ProfilePair, step: f64) -> SampledCurve {
        integrate_frenet(pp, step, &FrenetState::canonical(0.0)).unwrap()
    }

    fn max_abs_diff(a: &IntrinsicSamples, b: &IntrinsicSamples) -> (f64, f64) {
        a.rows().iter().zip(b.rows()).fold((0.0, 0.0), |(k, t), (x, y)| {
            (
                f64::max(k, (x.kappa - y.kappa).abs()),
                f64::max(t, (x.tau - y.tau).abs()),
            )
        })
    }

    #[test]
    fn fd_weights_reproduce_polynomials() {
        let nodes = [0.0, 0.1, 0.25, 0.3, 0.5];
        let w = fd_weights(0.2, &nodes, 3);
        let f = |x: f64| 1.0 + 2.0 * x - x * x + 0.5 * x.powi(3);
        let vals: Vec<f64> = nodes.iter().map(|&x| f(x)).collect();
        let d = |k: usize| w[k].iter().zip(&vals).map(|(a, b)| a * b).sum::<f64>();
        assert!((d(0) - f(0.2)).abs() < 1e-13);
        assert!((d(1) - (2.0 - 0.4 + 1.5 * 0.04)).abs() < 1e-11);
        assert!((d(2) - (-2.0 + 3.0 * 0.2)).abs() < 1e-9);
        assert!((d(3) - 3.0).abs() < 1e-7);
    }

    #[test]
    fn circle_estimates() {
        let pp = linear_pair((0.0, 0.5), (0.0, 0.0), 0.0, 6.0);
        let curve = integrate(&pp, 1e-3);
        for est in [
            estimate_curvature_torsion(&curve).unwrap(),
            estimate_curvature_torsion(&curve.positions_only()).unwrap(),
        ] {
            for r in est.rows() {
                assert!((r.kappa - 0.5).abs() < 1e-5, "{r:?}");
                assert!(r.tau.abs() < 1e-5, "{r:?}");
            }
        }
    }

    #[test]
    fn helix_estimates_from_closed_form() {
        let states: Vec<_> = (0..2000).map(|i| exact_helix(1.0, 1.0, i as f64 * 1e-3)).collect();
        let curve = SampledCurve::from_states(states, None).unwrap();
        for est in [
            estimate_curvature_torsion(&curve).unwrap(),
            estimate_curvature_torsion(&curve.positions_only()).unwrap(),
        ] {
            for r in est.rows() {
                assert!((r.kappa - 1.0).abs() < 1e-5 && (r.tau - 1.0).abs() < 1e-5, "{r:?}");
            }
        }
    }

    #[test]
    fn integrated_profiles_recovered_pointwise() {
        let pp = linear_pair((0.3, 0.1), (0.2, 0.05), 0.0, 10.0);
        let curve = integrate(&pp, 1e-3);
        let by_frames = estimate_curvature_torsion(&curve).unwrap();
        let by_positions = estimate_curvature_torsion(&curve.positions_only()).unwrap();
        for r in by_frames.rows() {
            assert!((r.kappa - pp.kappa_at(r.s).unwrap()).abs() < 1e-4);
            assert!((r.tau - pp.tau_at(r.s).unwrap()).abs() < 1e-4);
        }
        let (dk, dt) = max_abs_diff(&by_frames, &by_positions);
        assert!(dk < 1e-4 && dt < 1e-4, "frame/position disagreement {dk:e} {dt:e}");
    }

    #[test]
    fn estimates_are_rigid_motion_invariant() {
        let pp = linear_pair((0.3, 0.1), (0.2, 0.05), 0.0, 10.0);
        let rot = Rotation3::from_euler_angles(0.4, 1.2, -2.3);
        let shift = Vec3::new(3.0, -1.0, 7.5);

        let fine = integrate(&pp, 1e-3);
        let moved = fine.transformed(&rot, &shift);
        let (dk, dt) = max_abs_diff(
            &estimate_curvature_torsion(&fine).unwrap(),
            &estimate_curvature_torsion(&moved).unwrap(),
        );
        assert!(dk <= 1e-9 && dt <= 1e-9, "frames: {dk:e} {dt:e}");

        let coarse = integrate(&pp, 5e-2).positions_only();
        let moved = coarse.transformed(&rot, &shift);
        let (dk, dt) = max_abs_diff(
            &estimate_curvature_torsion(&coarse).unwrap(),
            &estimate_curvature_torsion(&moved).unwrap(),
        );
        assert!(dk <= 1e-9 && dt <= 1e-9, "positions: {dk:e} {dt:e}");
    }

    #[test]
    fn straight_segment_is_degenerate_without_frames() {
        let s: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let p = s.iter().map(|&x| Vec3::new(x, 0.0, 0.0)).collect();
        let curve = SampledCurve::from_positions(s, p).unwrap();
        assert!(matches!(
            estimate_curvature_torsion(&curve),
            Err(Error::Degenerate { .. })
        ));
    }

    #[test]
    fn too_few_samples() {
        let s = vec![0.0, 1.0, 2.0];
        let p = vec![Vec3::zeros(); 3];
        let curve = SampledCurve::from_positions(s, p).unwrap();
        assert!(matches!(
            estimate_curvature_torsion(&curve),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn fit_linear_examples() {
        let f = fit_linear(&[(0.0, 1.0), (1.0, 2.0), (2.0, 3.0)]).unwrap();
        assert_eq!(f.family, ProfileFamily::Linear);
        assert!((f.coefficients.a() - 1.0).abs() < 1e-15 && (f.coefficients.b() - 1.0).abs() < 1e-15);
        assert!(f.rms_residual < 1e-15);

        let f = fit_linear(&[(0.0, 5.0), (1.0, 5.0), (2.0, 5.0)]).unwrap();
        assert_eq!(f.family, ProfileFamily::Constant);
        assert_eq!(f.coefficients.b(), 5.0);

        assert!(matches!(fit_linear(&[(1.0, 1.0), (1.0, 2.0)]), Err(Error::Rank(_))));
    }

    #[test]
    fn fit_linear_noisy() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let xs: Vec<_> = (0..200)
            .map(|i| {
                let s = i as f64 * 0.05;
                (s, 0.3 * s + 0.1 + rng.random_range(-1e-6..1e-6))
            })
            .collect();
        let f = fit_linear(&xs).unwrap();
        assert!((f.coefficients.a() - 0.3).abs() < 1e-5);
        assert!((f.coefficients.b() - 0.1).abs() < 1e-5);
    }

    #[test]
    fn fit_rational_examples() {
        let xs: Vec<_> = [0.0, 0.5, 1.0, 2.0, 3.0]
            .iter()
            .map(|&s| (s, (s + 1.0) / (2.0 * s + 1.0)))
            .collect();
        let f = fit_rational_linear(&xs).unwrap();
        let want = RationalLinearProfile::new(1.0, 1.0, 2.0, 1.0).unwrap();
        for (g, w) in f.coefficients.coefficients().iter().zip(want.coefficients()) {
            assert!((g - w).abs() < 1e-10);
        }
        assert!(f.rms_residual < 1e-10);
        assert_eq!(f.family, ProfileFamily::RationalLinear);

        let xs: Vec<_> = (0..6).map(|i| (i as f64, 0.5)).collect();
        let f = fit_rational_linear(&xs).unwrap();
        assert_eq!(f.family, ProfileFamily::Constant);
        assert_eq!(f.coefficients.coefficients(), [0.0, 0.5, 0.0, 1.0]);

        let xs: Vec<_> = (0..50)
            .map(|i| {
                let s = i as f64 * 0.2;
                (s, (0.3 * s + 0.1) / (0.2 * s + 0.05))
            })
            .collect();
        let f = fit_rational_linear(&xs).unwrap();
        let want = RationalLinearProfile::new(0.3, 0.1, 0.2, 0.05).unwrap();
        for (g, w) in f.coefficients.coefficients().iter().zip(want.coefficients()) {
            assert!((g - w).abs() < 1e-6);
        }
    }

    #[test]
    fn fit_rational_needs_four_abscissae() {
        let xs = [(0.0, 1.0), (1.0, 2.0), (2.0, 0.0), (2.0, 1.0)];
        assert!(matches!(
            fit_rational_linear(&xs),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn fit_rational_on_line_is_linear() {
        let xs: Vec<_> = (0..10).map(|i| (i as f64, 2.0 * i as f64 - 3.0)).collect();
        let f = fit_rational_linear(&xs).unwrap();
        assert_eq!(f.family, ProfileFamily::Linear);
        assert!(f.max_residual < 1e-10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn integrate_estimate_fit_round_trip(
            ka in -0.2..0.2f64, kb in 0.8..1.5f64, ta in -0.3..0.3f64, tb in -1.0..1.0f64
        ) {
            let pp = linear_pair((ka, kb), (ta, tb), 0.0, 3.0);
            let est = estimate_curvature_torsion(&integrate(&pp, 1e-3)).unwrap();
            let interior = IntrinsicSamples::new(est.interior().to_vec()).unwrap();
            let fk = fit_linear(&interior.kappa_series()).unwrap().coefficients;
            let ft = fit_linear(&interior.tau_series()).unwrap().coefficients;
            prop_assert!((fk.a() - ka).abs() < 1e-3 && (fk.b() - kb).abs() < 1e-3);
            prop_assert!((ft.a() - ta).abs() < 1e-3 && (ft.b() - tb).abs() < 1e-3);
        }

        #[test]
        fn exact_lines_fit_with_tiny_residual(a in -10.0..10.0f64, b in -10.0..10.0f64) {
            let xs: Vec<_> = (0..30).map(|i| { let s = i as f64 * 0.37; (s, a * s + b) }).collect();
            let f = fit_linear(&xs).unwrap();
            let scale = xs.iter().fold(1.0_f64, |m, x| m.max(x.1.abs()));
            prop_assert!(f.rms_residual <= 1e-12 * scale);
        }
    }
}
