//! Membership tests for the spiral taxonomy: planar Cornu, Euler, logarithmic
//! and generalized Euler spirals, general helices, rectifying and Bertrand
//! curves.
//!
//! Every predicate is a least-squares fit of a profile family to a derived
//! series (κ, τ, 1/κ, 1/τ, τ/κ, κ/τ) followed by a residual test. The same
//! machinery runs on exact profile pairs (sampled on a fine grid) and on
//! curvature/torsion estimated from a sampled curve.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::discrete::{
    fit_constant, fit_linear, fit_rational_linear, FitResult, IntrinsicRow, IntrinsicSamples,
};
use crate::error::{Error, Result};
use crate::profiles::{detect_family, ProfilePair, RationalLinearProfile, FAMILY_TOL};

/// Residual tolerance for exact profile pairs.
pub const PROFILE_TOL: f64 = 1e-9;
/// Residual tolerance for estimated samples.
pub const SAMPLES_TOL: f64 = 1e-3;

/// Grid size used to sample a profile pair.
const PROFILE_GRID: usize = 257;
/// Minimum number of rows needed to classify.
const MIN_ROWS: usize = 6;
/// Denominators smaller than this (relative to the series scale) are skipped
/// when forming ratios.
const RATIO_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SpiralLabel {
    PlanarCornu,
    EulerSpiral,
    LogarithmicSpiral,
    GeneralizedEuler,
    GeneralHelix,
    Rectifying,
    Bertrand,
}

impl SpiralLabel {
    pub fn name(self) -> &'static str {
        match self {
            SpiralLabel::PlanarCornu => "PlanarCornu",
            SpiralLabel::EulerSpiral => "EulerSpiral",
            SpiralLabel::LogarithmicSpiral => "LogarithmicSpiral",
            SpiralLabel::GeneralizedEuler => "GeneralizedEuler",
            SpiralLabel::GeneralHelix => "GeneralHelix",
            SpiralLabel::Rectifying => "Rectifying",
            SpiralLabel::Bertrand => "Bertrand",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RatioOrientation {
    #[serde(rename = "kappa/tau")]
    KappaOverTau,
    #[serde(rename = "tau/kappa")]
    TauOverKappa,
}

/// Labels, the fits that justified them, and the tolerance used.
///
/// `fits` is keyed by label name; labels that need two fits (Euler and
/// logarithmic spirals) use `<label>.kappa` and `<label>.tau`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub labels: BTreeSet<SpiralLabel>,
    pub fits: BTreeMap<String, FitResult>,
    pub tol_used: f64,
    pub ratio_orientation: BTreeMap<SpiralLabel, RatioOrientation>,
    /// Labels added by the taxonomy inclusions rather than by a direct fit.
    pub inferred: BTreeSet<SpiralLabel>,
    pub notes: Vec<String>,
}

impl ClassificationReport {
    pub fn has(&self, label: SpiralLabel) -> bool {
        self.labels.contains(&label)
    }
}

#[derive(Debug, Clone, Copy)]
pub enum ClassifyInput<'a> {
    Profile(&'a ProfilePair),
    Samples(&'a IntrinsicSamples),
}

impl<'a> From<&'a ProfilePair> for ClassifyInput<'a> {
    fn from(pp: &'a ProfilePair) -> Self {
        ClassifyInput::Profile(pp)
    }
}

impl<'a> From<&'a IntrinsicSamples> for ClassifyInput<'a> {
    fn from(s: &'a IntrinsicSamples) -> Self {
        ClassifyInput::Samples(s)
    }
}

impl ClassifyInput<'_> {
    /// Default tolerance for this kind of input.
    pub fn default_tol(&self) -> f64 {
        match self {
            ClassifyInput::Profile(_) => PROFILE_TOL,
            ClassifyInput::Samples(_) => SAMPLES_TOL,
        }
    }

    /// `(s, κ, τ)` rows; estimated samples lose their endpoint rows unless
    /// `include_endpoints` is set.
    fn rows(&self, include_endpoints: bool) -> Result<Vec<IntrinsicRow>> {
        let rows = match self {
            ClassifyInput::Profile(pp) => pp
                .grid(PROFILE_GRID)
                .into_iter()
                .map(|s| {
                    Ok(IntrinsicRow {
                        s,
                        kappa: pp.kappa_at(s)?,
                        tau: pp.tau_at(s)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?,
            ClassifyInput::Samples(samples) if include_endpoints => samples.rows().to_vec(),
            ClassifyInput::Samples(samples) => samples.interior().to_vec(),
        };
        if rows.len() < MIN_ROWS {
            return Err(Error::InsufficientData {
                needed: MIN_ROWS,
                got: rows.len(),
            });
        }
        Ok(rows)
    }
}

fn scale_of(xs: &[(f64, f64)]) -> f64 {
    xs.iter().fold(1.0_f64, |m, x| m.max(x.1.abs()))
}

/// Residual test relative to the magnitude of the fitted series.
fn fits(fit: &FitResult, xs: &[(f64, f64)], tol: f64) -> bool {
    fit.max_residual <= tol * scale_of(xs)
}

/// `num/den` on rows where the denominator is not negligible.
fn ratio_series(
    rows: &[IntrinsicRow],
    num: impl Fn(&IntrinsicRow) -> f64,
    den: impl Fn(&IntrinsicRow) -> f64,
) -> Vec<(f64, f64)> {
    let den_scale = rows.iter().fold(1.0_f64, |m, r| m.max(den(r).abs()));
    rows.iter()
        .filter(|r| den(r).abs() > RATIO_FLOOR * den_scale)
        .map(|r| (r.s, num(r) / den(r)))
        .collect()
}

/// Simplest of constant, linear and rational-linear that fits `xs`, or the
/// best failing candidate.
fn fit_rational_family(xs: &[(f64, f64)], tol: f64) -> Option<FitResult> {
    let candidates = [
        fit_constant(xs).ok(),
        fit_linear(xs).ok(),
        fit_rational_linear(xs).ok(),
    ];
    let candidates: Vec<FitResult> = candidates.into_iter().flatten().collect();
    candidates
        .iter()
        .find(|f| fits(f, xs, tol))
        .or_else(|| {
            candidates
                .iter()
                .min_by(|a, b| a.max_residual.total_cmp(&b.max_residual))
        })
        .copied()
}

/// Least-squares Bertrand constants `(λ, μ)` with `λκ + μτ ≈ 1`.
///
/// The result stores `λ` and `μ` in the `a` and `b` coefficient slots
/// (`c = 0`, `d = 1`); residuals are those of `λκ(s) + μτ(s) − 1`. A
/// rank-one system returns its minimum-norm solution when that solution is
/// exact.
pub fn fit_bertrand(input: ClassifyInput<'_>) -> Result<FitResult> {
    let rows = match input {
        ClassifyInput::Profile(_) => input.rows(true)?,
        ClassifyInput::Samples(s) => s.rows().to_vec(),
    };
    bertrand_rows(&rows)
}

fn bertrand_rows(rows: &[IntrinsicRow]) -> Result<FitResult> {
    if rows.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: rows.len(),
        });
    }
    let a = DMatrix::from_fn(rows.len(), 2, |i, j| if j == 0 { rows[i].kappa } else { rows[i].tau });
    let ones = DVector::from_element(rows.len(), 1.0);
    let svd = a.svd(true, true);
    let sigma_max = svd.singular_values.max();
    if !(sigma_max > 0.0) {
        return Err(Error::Rank("curvature and torsion vanish identically".into()));
    }
    let full_rank = svd.singular_values.min() > 1e-12 * sigma_max;
    let sol = svd
        .solve(&ones, 1e-12 * sigma_max)
        .map_err(|e| Error::Rank(e.to_string()))?;
    let (lambda, mu) = (sol[0], sol[1]);
    let residuals: Vec<f64> = rows
        .iter()
        .map(|r| lambda * r.kappa + mu * r.tau - 1.0)
        .collect();
    let coefficients = RationalLinearProfile::linear(lambda, mu)?;
    let fit = FitResult::from_residuals(
        detect_family(&coefficients, FAMILY_TOL),
        coefficients,
        residuals,
    );
    if !full_rank && fit.max_residual > 1e-9 {
        return Err(Error::Rank(
            "(κ, τ) samples are collinear through the origin; λκ + μτ = 1 has no solution".into(),
        ));
    }
    Ok(fit)
}

/// Classify with the default tolerance for the input kind.
pub fn classify_default(input: ClassifyInput<'_>) -> Result<ClassificationReport> {
    classify(input, input.default_tol())
}

/// Assign taxonomy labels by residual tests at `tol`.
pub fn classify(input: ClassifyInput<'_>, tol: f64) -> Result<ClassificationReport> {
    classify_with(input, tol, false)
}

/// [`classify`] with control over whether endpoint rows of estimated samples
/// take part.
pub fn classify_with(
    input: ClassifyInput<'_>,
    tol: f64,
    include_endpoints: bool,
) -> Result<ClassificationReport> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let rows = input.rows(include_endpoints)?;
    let mut report = ClassificationReport {
        labels: BTreeSet::new(),
        fits: BTreeMap::new(),
        tol_used: tol,
        ratio_orientation: BTreeMap::new(),
        inferred: BTreeSet::new(),
        notes: Vec::new(),
    };
    use SpiralLabel::*;

    let kappa: Vec<(f64, f64)> = rows.iter().map(|r| (r.s, r.kappa)).collect();
    let tau: Vec<(f64, f64)> = rows.iter().map(|r| (r.s, r.tau)).collect();
    let kappa_lin = fit_linear(&kappa)?;
    let tau_lin = fit_linear(&tau)?;
    let kappa_linear = fits(&kappa_lin, &kappa, tol);
    let tau_linear = fits(&tau_lin, &tau, tol);
    let kappa_constant = fits(&fit_constant(&kappa)?, &kappa, tol);

    let tau_max = tau.iter().fold(0.0_f64, |m, x| m.max(x.1.abs()));
    if tau_max <= tol && kappa_linear && !kappa_constant {
        report.labels.insert(PlanarCornu);
        report.fits.insert(PlanarCornu.name().into(), kappa_lin);
    }

    if kappa_linear && tau_linear {
        report.labels.insert(EulerSpiral);
        report.fits.insert("EulerSpiral.kappa".into(), kappa_lin);
        report.fits.insert("EulerSpiral.tau".into(), tau_lin);
    }

    // reciprocal radii; every row must have nonzero κ and τ
    let inv_kappa = ratio_series(&rows, |_| 1.0, |r| r.kappa);
    let inv_tau = ratio_series(&rows, |_| 1.0, |r| r.tau);
    if inv_kappa.len() == rows.len() && inv_tau.len() == rows.len() {
        let fk = fit_linear(&inv_kappa)?;
        let ft = fit_linear(&inv_tau)?;
        if fits(&fk, &inv_kappa, tol) && fits(&ft, &inv_tau, tol) {
            report.labels.insert(LogarithmicSpiral);
            report.fits.insert("LogarithmicSpiral.kappa".into(), fk);
            report.fits.insert("LogarithmicSpiral.tau".into(), ft);
        }
    }

    let tau_over_kappa = ratio_series(&rows, |r| r.tau, |r| r.kappa);
    let kappa_over_tau = ratio_series(&rows, |r| r.kappa, |r| r.tau);
    if tau_over_kappa.len() >= 2 {
        let constant = fit_constant(&tau_over_kappa)?;
        let linear = fit_linear(&tau_over_kappa)?;
        if fits(&constant, &tau_over_kappa, tol) {
            report.labels.insert(GeneralHelix);
            report.fits.insert(GeneralHelix.name().into(), constant);
            report.ratio_orientation.insert(GeneralHelix, RatioOrientation::TauOverKappa);
        } else if fits(&linear, &tau_over_kappa, tol) {
            report.labels.insert(Rectifying);
            report.fits.insert(Rectifying.name().into(), linear);
            report.ratio_orientation.insert(Rectifying, RatioOrientation::TauOverKappa);
        }
    }

    let mut generalized: Option<(FitResult, RatioOrientation, f64)> = None;
    for (xs, orientation) in [
        (&kappa_over_tau, RatioOrientation::KappaOverTau),
        (&tau_over_kappa, RatioOrientation::TauOverKappa),
    ] {
        let Some(fit) = fit_rational_family(xs, tol) else {
            continue;
        };
        if !fits(&fit, xs, tol) {
            continue;
        }
        let relative = fit.max_residual / scale_of(xs);
        if generalized.as_ref().is_none_or(|g| relative < g.2) {
            generalized = Some((fit, orientation, relative));
        }
    }
    if let Some((fit, orientation, _)) = generalized {
        report.labels.insert(GeneralizedEuler);
        report.fits.insert(GeneralizedEuler.name().into(), fit);
        report.ratio_orientation.insert(GeneralizedEuler, orientation);
    }

    // λ = 0 only says τ is constant, which does not make a Bertrand curve
    let bertrand = bertrand_rows(&rows);
    let kappa_scale = kappa.iter().fold(0.0_f64, |m, x| m.max(x.1.abs()));
    match &bertrand {
        Ok(fit) if fit.max_residual <= tol && fit.coefficients.a().abs() * kappa_scale > tol => {
            report.labels.insert(Bertrand);
            report.fits.insert(Bertrand.name().into(), *fit);
        }
        Ok(fit) if fit.max_residual <= tol => report.notes.push(format!(
            "λκ + μτ = 1 holds only with λ = {:.3e} (constant torsion), not a Bertrand relation",
            fit.coefficients.a()
        )),
        Ok(fit) => report.notes.push(format!(
            "Bertrand fit max residual {:.3e} exceeds tolerance",
            fit.max_residual
        )),
        Err(e) => report.notes.push(format!("Bertrand fit failed: {e}")),
    }

    close_taxonomy(&mut report, &bertrand);
    Ok(report)
}

/// Add labels implied by the taxonomy inclusions and note each addition.
fn close_taxonomy(report: &mut ClassificationReport, bertrand: &Result<FitResult>) {
    use SpiralLabel::*;
    let implications = [
        (EulerSpiral, GeneralizedEuler),
        (LogarithmicSpiral, GeneralizedEuler),
        (GeneralHelix, GeneralizedEuler),
        (EulerSpiral, Bertrand),
    ];
    for (premise, conclusion) in implications {
        if report.has(premise) && !report.has(conclusion) {
            report.labels.insert(conclusion);
            report.inferred.insert(conclusion);
            let detail = match (conclusion, bertrand) {
                (Bertrand, Ok(fit)) => {
                    format!(" (direct λκ + μτ = 1 fit: max residual {:.3e})", fit.max_residual)
                }
                (Bertrand, Err(e)) => format!(" (direct fit: {e})"),
                _ => String::new(),
            };
            report.notes.push(format!(
                "{} implied by {}{}",
                conclusion.name(),
                premise.name(),
                detail
            ));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::estimate_curvature_torsion;
    use crate::frenet::{integrate_frenet, FrenetState};
    use proptest::prelude::*;
    use SpiralLabel::*;

    fn lin(a: f64, b: f64) -> RationalLinearProfile {
        RationalLinearProfile::linear(a, b).unwrap()
    }

    fn recip(a: f64, b: f64) -> RationalLinearProfile {
        RationalLinearProfile::reciprocal_linear(a, b).unwrap()
    }

    fn pair(k: RationalLinearProfile, t: RationalLinearProfile, lo: f64, hi: f64) -> ProfilePair {
        ProfilePair::new(k, t, lo, hi).unwrap()
    }

    fn labels(pp: &ProfilePair) -> BTreeSet<SpiralLabel> {
        classify(pp.into(), PROFILE_TOL).unwrap().labels
    }

    fn assert_invariants(r: &ClassificationReport) {
        if r.has(EulerSpiral) {
            assert!(r.has(GeneralizedEuler) && r.has(Bertrand));
        }
        if r.has(LogarithmicSpiral) || r.has(GeneralHelix) {
            assert!(r.has(GeneralizedEuler));
        }
    }

    #[test]
    fn planar_cornu() {
        let l = labels(&pair(lin(1.0, 1.0), lin(0.0, 0.0), 0.0, 5.0));
        assert!(l.contains(&PlanarCornu) && l.contains(&GeneralizedEuler));
        // constant curvature is a circle, not a Cornu spiral
        let l = labels(&pair(lin(0.0, 1.0), lin(0.0, 0.0), 0.0, 5.0));
        assert!(!l.contains(&PlanarCornu));
        // clothoid through the inflection point
        let l = labels(&pair(lin(1.0, 0.0), lin(0.0, 0.0), 0.0, 5.0));
        assert!(l.contains(&PlanarCornu));
    }

    #[test]
    fn euler_spiral_exact_labels() {
        let l = labels(&pair(lin(2.0, 1.0), lin(3.0, 4.0), 0.0, 5.0));
        assert_eq!(l, BTreeSet::from([EulerSpiral, GeneralizedEuler, Bertrand]));
    }

    #[test]
    fn logarithmic_spiral_exact_labels() {
        let l = labels(&pair(recip(1.0, 1.0), recip(2.0, 3.0), 0.0, 5.0));
        assert_eq!(l, BTreeSet::from([LogarithmicSpiral, GeneralizedEuler]));
    }

    #[test]
    fn circular_helix() {
        let l = labels(&pair(lin(0.0, 3.0), lin(0.0, 3.0), 0.0, 5.0));
        for label in [GeneralHelix, GeneralizedEuler, Bertrand, EulerSpiral] {
            assert!(l.contains(&label), "{label:?} missing from {l:?}");
        }
        assert!(!l.contains(&Rectifying) && !l.contains(&PlanarCornu));
    }

    #[test]
    fn rectifying() {
        let r = classify((&pair(lin(0.0, 5.0), lin(2.0, 1.0), 0.0, 5.0)).into(), PROFILE_TOL).unwrap();
        assert!(r.has(Rectifying));
        let fit = r.fits["Rectifying"].coefficients;
        assert!((fit.a() - 0.4).abs() < 1e-12 && (fit.b() - 0.2).abs() < 1e-12);
        assert_eq!(r.ratio_orientation[&Rectifying], RatioOrientation::TauOverKappa);
    }

    #[test]
    fn non_member_has_no_generalized_label() {
        // τ/κ = (s+2)/(s² + 1) is outside the rational-linear family
        let samples: Vec<IntrinsicRow> = (0..100)
            .map(|i| {
                let s = 1.0 + i as f64 * 0.01;
                IntrinsicRow { s, kappa: s * s + 1.0, tau: s + 2.0 }
            })
            .collect();
        let samples = IntrinsicSamples::new(samples).unwrap();
        let r = classify(ClassifyInput::Samples(&samples), PROFILE_TOL).unwrap();
        assert!(r.labels.is_empty(), "{:?}", r.labels);
    }

    #[test]
    fn bertrand_examples() {
        let f = fit_bertrand((&pair(lin(1.0, 1.0), lin(2.0, 1.0), 0.0, 3.0)).into()).unwrap();
        assert!((f.coefficients.a() - 2.0).abs() < 1e-9 && (f.coefficients.b() + 1.0).abs() < 1e-9);
        assert!(f.rms_residual < 1e-12);

        let f = fit_bertrand((&pair(lin(0.0, 1.0), lin(0.0, 0.0), 0.0, 3.0)).into()).unwrap();
        assert!((f.coefficients.a() - 1.0).abs() < 1e-12);
        assert_eq!(f.coefficients.b(), 0.0);
        assert!(f.rms_residual < 1e-15);
    }

    /// Brute-force scan over a (λ, μ) grid with λ bounded away from zero:
    /// κ = s², τ = 1 on [1, 2] only satisfies λκ + μτ = 1 with λ = 0.
    #[test]
    fn bertrand_withheld_for_quadratic_curvature() {
        let rows: Vec<IntrinsicRow> = (0..=50)
            .map(|i| {
                let s = 1.0 + i as f64 / 50.0;
                IntrinsicRow { s, kappa: s * s, tau: 1.0 }
            })
            .collect();
        let mut best = f64::INFINITY;
        for i in (-300..=300).filter(|i: &i32| i.abs() >= 1) {
            for j in -300..=300 {
                let (l, m) = (i as f64 * 0.01, j as f64 * 0.01);
                let worst = rows.iter().map(|r| (l * r.kappa + m * r.tau - 1.0).abs()).fold(0.0, f64::max);
                best = best.min(worst);
            }
        }
        assert!(best > 1e-3, "grid found near-solution {best}");

        let samples = IntrinsicSamples::new(rows).unwrap();
        let f = fit_bertrand(ClassifyInput::Samples(&samples)).unwrap();
        assert!(f.coefficients.a().abs() < 1e-12 && (f.coefficients.b() - 1.0).abs() < 1e-12);
        for tol in [PROFILE_TOL, SAMPLES_TOL] {
            let r = classify_with(ClassifyInput::Samples(&samples), tol, true).unwrap();
            assert!(!r.has(Bertrand));
        }
    }

    #[test]
    fn bertrand_rank_error_for_proportional_profiles() {
        let pp = pair(lin(1.0, 0.0), lin(2.0, 0.0), 1.0, 2.0);
        assert!(matches!(fit_bertrand((&pp).into()), Err(Error::Rank(_))));
        // Euler spiral still carries the Bertrand label by inclusion, with a note
        let r = classify((&pp).into(), PROFILE_TOL).unwrap();
        assert!(r.has(Bertrand) && r.inferred.contains(&Bertrand));
        assert!(r.notes.iter().any(|n| n.contains("Bertrand implied by EulerSpiral")));
    }

    #[test]
    fn too_few_rows() {
        let rows: Vec<IntrinsicRow> = (0..5)
            .map(|i| IntrinsicRow { s: i as f64, kappa: 1.0, tau: 0.0 })
            .collect();
        let samples = IntrinsicSamples::new(rows).unwrap();
        assert!(matches!(
            classify_default(ClassifyInput::Samples(&samples)),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn profile_and_estimated_samples_agree() {
        let cases = [
            pair(lin(0.3, 0.1), lin(0.2, 0.05), 0.0, 10.0),
            pair(lin(1.0, 1.0), lin(0.0, 0.0), 0.0, 5.0),
            pair(lin(0.0, 1.0), lin(0.0, 1.0), 0.0, 8.0),
            pair(lin(0.0, 2.0), lin(0.5, 0.5), 0.0, 4.0),
            pair(recip(0.5, 1.0), recip(0.25, 1.0), 0.0, 6.0),
        ];
        for pp in &cases {
            let exact = classify(pp.into(), SAMPLES_TOL).unwrap();
            let curve = integrate_frenet(pp, 1e-3, &FrenetState::canonical(0.0)).unwrap();
            let est = estimate_curvature_torsion(&curve).unwrap();
            let approx = classify((&est).into(), SAMPLES_TOL).unwrap();
            assert_eq!(exact.labels, approx.labels, "{pp:?}");
        }
    }

    fn linear_pair_strategy() -> impl Strategy<Value = ProfilePair> {
        (-1.0..1.0f64, 0.5..2.0f64, -1.0..1.0f64, -2.0..2.0f64).prop_map(|(ka, kb, ta, tb)| {
            // shift the curvature intercept so κ > 0 on [0, 1]
            let kb = kb + (-ka).max(0.0);
            pair(lin(ka, kb), lin(ta, tb), 0.0, 1.0)
        })
    }

    fn reciprocal_pair_strategy() -> impl Strategy<Value = ProfilePair> {
        (0.0..2.0f64, 0.5..2.0f64, -2.0..2.0f64, 0.5..2.0f64).prop_map(|(ka, kb, ta, tb)| {
            let tb = if ta < 0.0 { tb - 2.0 * ta } else { tb };
            pair(recip(ka, kb), recip(ta, tb), 0.0, 1.0)
        })
    }

    proptest! {
        #[test]
        fn implication_chain_linear(pp in linear_pair_strategy()) {
            let r = classify((&pp).into(), PROFILE_TOL).unwrap();
            prop_assert!(r.has(EulerSpiral));
            assert_invariants(&r);
        }

        #[test]
        fn implication_chain_reciprocal(pp in reciprocal_pair_strategy()) {
            let r = classify((&pp).into(), PROFILE_TOL).unwrap();
            prop_assert!(r.has(LogarithmicSpiral));
            assert_invariants(&r);
        }

        #[test]
        fn bertrand_exact_for_linear_with_slopes(
            ka in 0.1..2.0f64, kb in 0.5..2.0f64, ta in 0.1..2.0f64, tb in -2.0..2.0f64
        ) {
            // keep the Bertrand constant c₃ = ta·kb − ka·tb away from zero
            prop_assume!((ta * kb - ka * tb).abs() > 1e-3);
            let pp = pair(lin(ka, kb), lin(ta, tb), 0.0, 2.0);
            let f = fit_bertrand((&pp).into()).unwrap();
            prop_assert!(f.rms_residual <= 1e-10, "rms {}", f.rms_residual);
        }

        #[test]
        fn ratio_labels_scale_coherent(pp in linear_pair_strategy(), k in 0.1..10.0f64) {
            let r = classify((&pp).into(), PROFILE_TOL).unwrap();
            let scaled: Vec<IntrinsicRow> = pp.grid(257).into_iter().map(|s| IntrinsicRow {
                s, kappa: k * pp.kappa_at(s).unwrap(), tau: k * pp.tau_at(s).unwrap(),
            }).collect();
            let scaled = IntrinsicSamples::new(scaled).unwrap();
            let rs = classify_with((&scaled).into(), PROFILE_TOL, true).unwrap();
            for label in [GeneralHelix, GeneralizedEuler, Rectifying] {
                prop_assert_eq!(r.has(label), rs.has(label), "{:?}", label);
            }
        }
    }
}
