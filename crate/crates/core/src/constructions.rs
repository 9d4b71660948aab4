//! Derived objects along a curve and the checks that characterize spirals
//! through them: the Darboux curve `W = τT + κB`, the reciprocal curve
//! `U = T/κ + B/τ`, the offset curve `β = α + (as+b)T + (cs+d)B + λN`, and
//! the ruled surface `Φ(s, v) = α(s) + v[(as+b)T + (cs+d)B]`.

use serde::Serialize;

use crate::discrete::{estimate_curvature_torsion, fd_weights};
use crate::error::{Error, Result};
use crate::frenet::{Frame, SampledCurve, Vec3};
use crate::profiles::{ProfilePair, RationalLinearProfile};

/// Parameters at which symbolic checks are evaluated.
const CHECK_GRID: usize = 513;

/// Outcome of one theorem check; `passed` iff `max_violation ≤ tol`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub max_violation: f64,
    pub tol: f64,
    #[serde(rename = "profile")]
    pub violation_profile: Vec<(f64, f64)>,
    /// Set when the curve is a general helix, which the geodesic
    /// characterizations exclude by hypothesis.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub helix_excluded: bool,
    /// Normal component of the second derivative, where the check has one.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub normal_component: Vec<(f64, f64)>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    fn from_profile(name: impl Into<String>, tol: f64, profile: Vec<(f64, f64)>) -> Self {
        let max_violation = profile
            .iter()
            .map(|p| if p.1.is_nan() { f64::INFINITY } else { p.1 })
            .fold(0.0, f64::max);
        Self {
            name: name.into(),
            passed: max_violation <= tol,
            max_violation,
            tol,
            violation_profile: profile,
            helix_excluded: false,
            normal_component: Vec::new(),
            notes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Indicatrix {
    Tangent,
    Binormal,
}

/// Affine director coefficients `(a, b, c, d)` giving `(a·s + b)` and `(c·s + d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Director {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Director {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    /// Tangent weight `a·s + b`.
    pub fn t_weight(&self, s: f64) -> f64 {
        self.a * s + self.b
    }

    /// Binormal weight `c·s + d`.
    pub fn b_weight(&self, s: f64) -> f64 {
        self.c * s + self.d
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0.0 && self.b == 0.0 && self.c == 0.0 && self.d == 0.0
    }
}

/// Curvature and torsion at each sample: from the attached profile when
/// present, otherwise estimated from the frames.
fn intrinsics(curve: &SampledCurve) -> Result<Vec<(f64, f64)>> {
    if curve.frames().is_none() {
        return Err(Error::MissingFrames);
    }
    match curve.profile() {
        Some(pp) => curve
            .s()
            .iter()
            .map(|&s| Ok((pp.kappa_at(s)?, pp.tau_at(s)?)))
            .collect(),
        None => {
            let est = estimate_curvature_torsion(curve).map_err(|_| Error::MissingIntrinsics)?;
            Ok(est.rows().iter().map(|r| (r.kappa, r.tau)).collect())
        }
    }
}

/// The trace `s ↦ τ(s)T(s) + κ(s)B(s)`.
pub fn darboux_curve(curve: &SampledCurve) -> Result<SampledCurve> {
    let kt = intrinsics(curve)?;
    let frames = curve.frames().ok_or(Error::MissingFrames)?;
    let points = frames
        .iter()
        .zip(&kt)
        .map(|(f, &(k, t))| t * f.tangent + k * f.binormal)
        .collect();
    SampledCurve::from_positions(curve.s().to_vec(), points)
}

/// The trace `s ↦ T(s)/κ(s) + B(s)/τ(s)`.
pub fn reciprocal_darboux_curve(curve: &SampledCurve) -> Result<SampledCurve> {
    let kt = intrinsics(curve)?;
    let frames = curve.frames().ok_or(Error::MissingFrames)?;
    let mut points = Vec::with_capacity(frames.len());
    for ((f, &(k, t)), &s) in frames.iter().zip(&kt).zip(curve.s()) {
        if k == 0.0 {
            return Err(Error::Division { what: "curvature", s });
        }
        if t == 0.0 {
            return Err(Error::Division { what: "torsion", s });
        }
        points.push(f.tangent / k + f.binormal / t);
    }
    SampledCurve::from_positions(curve.s().to_vec(), points)
}

fn check_grid(pp: &ProfilePair) -> Vec<f64> {
    pp.grid(CHECK_GRID)
}

/// Largest `|κτ′ − τκ′|`, zero exactly for general helices.
fn helix_defect(
    kappa: &RationalLinearProfile,
    tau: &RationalLinearProfile,
    grid: &[f64],
) -> Result<f64> {
    let mut worst = 0.0_f64;
    for &s in grid {
        let d = kappa.eval(s)? * tau.derivative(s)? - tau.eval(s)? * kappa.derivative(s)?;
        worst = worst.max(d.abs());
    }
    Ok(worst)
}

fn flag_helix(report: &mut CheckReport, pp: &ProfilePair, grid: &[f64]) -> Result<()> {
    let scale = grid
        .iter()
        .map(|&s| pp.kappa_at(s).map(|k| k * k))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(1.0, f64::max);
    if helix_defect(pp.kappa(), pp.tau(), grid)? <= report.tol * scale {
        report.helix_excluded = true;
        report.notes.push(
            "τ/κ is constant: the curve is a general helix, which the characterization excludes"
                .into(),
        );
    }
    Ok(())
}

/// `W″ = τ″T + κ″B + (κτ′ − τκ′)N` is parallel to `N` (the geodesic
/// condition with surface normal `N`) iff `κ″ = τ″ = 0`.
pub fn check_darboux_geodesic(pp: &ProfilePair, tol: f64) -> Result<CheckReport> {
    let grid = check_grid(pp);
    let (k, t) = (pp.kappa(), pp.tau());
    let mut profile = Vec::with_capacity(grid.len());
    let mut normal = Vec::with_capacity(grid.len());
    for &s in &grid {
        let off_normal = k.second_derivative(s)?.abs().max(t.second_derivative(s)?.abs());
        profile.push((s, off_normal));
        normal.push((s, k.eval(s)? * t.derivative(s)? - t.eval(s)? * k.derivative(s)?));
    }
    let mut report = CheckReport::from_profile("darboux", tol, profile);
    report.normal_component = normal;
    if report.passed {
        report
            .notes
            .push("W″ ∥ N forces affine κ and τ, an Euler spiral; this is stronger than τ/κ being a ratio of affine functions (generalized Euler spiral)".into());
    }
    flag_helix(&mut report, pp, &grid)?;
    Ok(report)
}

fn reciprocal_of(p: &RationalLinearProfile, what: &'static str, pp: &ProfilePair) -> Result<RationalLinearProfile> {
    if p.is_zero() {
        return Err(Error::Division { what, s: pp.s_min() });
    }
    if let Some(&s) = p.zeros(pp.s_min(), pp.s_max()).first() {
        return Err(Error::Division { what, s });
    }
    p.reciprocal()
}

/// `U″` is parallel to `N` iff `(1/κ)″ = (1/τ)″ = 0`, i.e. both radii are affine.
pub fn reciprocal_darboux_check(pp: &ProfilePair, tol: f64) -> Result<CheckReport> {
    let grid = check_grid(pp);
    let (k, t) = (pp.kappa(), pp.tau());
    let rk = reciprocal_of(k, "curvature", pp)?;
    let rt = reciprocal_of(t, "torsion", pp)?;
    let mut profile = Vec::with_capacity(grid.len());
    let mut normal = Vec::with_capacity(grid.len());
    for &s in &grid {
        let off_normal = rk.second_derivative(s)?.abs().max(rt.second_derivative(s)?.abs());
        profile.push((s, off_normal));
        normal.push((s, rk.derivative(s)? * k.eval(s)? - rt.derivative(s)? * t.eval(s)?));
    }
    let mut report = CheckReport::from_profile("reciprocal", tol, profile);
    report.normal_component = normal;
    if report.passed {
        report
            .notes
            .push("U″ ∥ N forces affine radii 1/κ and 1/τ: a logarithmic spiral".into());
    }
    flag_helix(&mut report, pp, &grid)?;
    Ok(report)
}

/// `β(s) = α(s) + (a·s + b)T + (c·s + d)B + λN`, pointwise.
pub fn offset_curve_beta(curve: &SampledCurve, dir: Director, lambda: f64) -> Result<SampledCurve> {
    let frames = curve.frames().ok_or(Error::MissingFrames)?;
    let points = curve
        .s()
        .iter()
        .zip(curve.positions())
        .zip(frames)
        .map(|((&s, p), f)| offset_point(p, f, dir, lambda, s))
        .collect();
    SampledCurve::from_positions(curve.s().to_vec(), points)
}

fn offset_point(p: &Vec3, f: &Frame, dir: Director, lambda: f64, s: f64) -> Vec3 {
    p + dir.t_weight(s) * f.tangent + dir.b_weight(s) * f.binormal + lambda * f.normal
}

/// Frame components `(T, N, B)` of `β′`, from differentiating `β` with the
/// Frenet equations: `(1 + a − λκ, κ(as+b) − τ(cs+d), c + λτ)`.
pub fn beta_tangent(pp: &ProfilePair, dir: Director, lambda: f64, s: f64) -> Result<[f64; 3]> {
    let (k, t) = (pp.kappa_at(s)?, pp.tau_at(s)?);
    Ok([
        1.0 + dir.a - lambda * k,
        k * dir.t_weight(s) - t * dir.b_weight(s),
        dir.c + lambda * t,
    ])
}

/// `β` and the tangent (or binormal) indicatrix form an involute-evolute
/// pair iff `β′` is orthogonal to the indicatrix tangent, `N` (or `−N`).
pub fn check_involute_evolute(
    pp: &ProfilePair,
    dir: Director,
    tol: f64,
    indicatrix: Indicatrix,
) -> Result<CheckReport> {
    let sign = match indicatrix {
        Indicatrix::Tangent => 1.0,
        Indicatrix::Binormal => -1.0,
    };
    let profile = check_grid(pp)
        .into_iter()
        .map(|s| Ok((s, (sign * beta_tangent(pp, dir, 0.0, s)?[1]).abs())))
        .collect::<Result<Vec<_>>>()?;
    let name = match indicatrix {
        Indicatrix::Tangent => "involute-tangent",
        Indicatrix::Binormal => "involute-binormal",
    };
    Ok(CheckReport::from_profile(name, tol, profile))
}

/// `det(T, X, X′) = −(c·s + d)·[(a·s + b)κ − (c·s + d)τ]` for the director
/// `X = (a·s + b)T + (c·s + d)B`; the ruled surface is developable iff it
/// vanishes identically.
pub fn developability_determinant(pp: &ProfilePair, dir: Director, s: f64) -> Result<f64> {
    let (k, t) = (pp.kappa_at(s)?, pp.tau_at(s)?);
    let bw = dir.b_weight(s);
    Ok(-bw * (dir.t_weight(s) * k - bw * t))
}

pub fn check_developable(pp: &ProfilePair, dir: Director, tol: f64) -> Result<CheckReport> {
    if dir.is_zero() {
        return Err(Error::Domain("director coefficients are all zero".into()));
    }
    let profile = check_grid(pp)
        .into_iter()
        .map(|s| Ok((s, developability_determinant(pp, dir, s)?.abs())))
        .collect::<Result<Vec<_>>>()?;
    let mut report = CheckReport::from_profile("developable", tol, profile);
    if dir.c != 0.0 {
        let root = -dir.d / dir.c;
        if (pp.s_min()..=pp.s_max()).contains(&root) {
            report.notes.push(format!(
                "c·s + d vanishes at s = {root}; the determinant is zero there for any κ, τ"
            ));
        }
    }
    Ok(report)
}

/// Sampled patch of `Φ(s, v) = α(s) + v·X(s)`, row-major over `(s, v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RuledSurfacePatch {
    pub base: SampledCurve,
    pub director: Director,
    pub v_min: f64,
    pub v_max: f64,
    pub n_s: usize,
    pub n_v: usize,
    pub grid: Vec<Vec3>,
}

impl RuledSurfacePatch {
    pub fn point(&self, i: usize, j: usize) -> Vec3 {
        self.grid[i * self.n_v + j]
    }

    pub fn v_values(&self) -> Vec<f64> {
        let h = (self.v_max - self.v_min) / (self.n_v - 1) as f64;
        (0..self.n_v)
            .map(|j| {
                if j == self.n_v - 1 {
                    self.v_max
                } else {
                    self.v_min + j as f64 * h
                }
            })
            .collect()
    }

    /// Largest distance between two grid points.
    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.grid.iter().fold(
            (Vec3::repeat(f64::INFINITY), Vec3::repeat(f64::NEG_INFINITY)),
            |(lo, hi), p| (lo.inf(p), hi.sup(p)),
        );
        (hi - lo).norm()
    }
}

pub fn ruled_surface(
    curve: &SampledCurve,
    dir: Director,
    v_min: f64,
    v_max: f64,
    n_v: usize,
) -> Result<RuledSurfacePatch> {
    let frames = curve.frames().ok_or(Error::MissingFrames)?;
    if n_v < 2 {
        return Err(Error::Domain(format!("need at least 2 rulings samples, got {n_v}")));
    }
    if !(v_min <= v_max) {
        return Err(Error::Domain(format!("empty ruling range [{v_min}, {v_max}]")));
    }
    let mut patch = RuledSurfacePatch {
        base: curve.clone(),
        director: dir,
        v_min,
        v_max,
        n_s: curve.len(),
        n_v,
        grid: Vec::with_capacity(curve.len() * n_v),
    };
    let vs = patch.v_values();
    for ((&s, p), f) in curve.s().iter().zip(curve.positions()).zip(frames) {
        let x = dir.t_weight(s) * f.tangent + dir.b_weight(s) * f.binormal;
        patch.grid.extend(vs.iter().map(|&v| p + v * x));
    }
    Ok(patch)
}

/// Finite-difference derivatives of order 1 and 2 along one grid axis.
fn axis_weights(nodes: &[f64]) -> Vec<(std::ops::Range<usize>, Vec<Vec<f64>>)> {
    let n = nodes.len();
    let width = n.min(5);
    (0..n)
        .map(|i| {
            let start = i.saturating_sub(width / 2).min(n - width);
            let r = start..start + width;
            let w = fd_weights(nodes[i], &nodes[r.clone()], 2);
            (r, w)
        })
        .collect()
}

/// Gaussian curvature `K = (LN − M²)/(EG − F²)` at every grid point, from
/// finite-difference fundamental forms. Row-major like the grid.
pub fn gaussian_curvature(patch: &RuledSurfacePatch) -> Result<Vec<f64>> {
    if patch.n_s < 3 || patch.v_max == patch.v_min {
        return Err(Error::Degenerate {
            s: patch.base.s()[0],
            reason: "patch needs ≥ 3 samples along s and a nonzero ruling range".into(),
        });
    }
    let s_nodes = patch.base.s();
    let v_nodes = patch.v_values();
    let ws = axis_weights(s_nodes);
    let wv = axis_weights(&v_nodes);
    let at = |i: usize, j: usize| patch.point(i, j);

    let mut out = Vec::with_capacity(patch.grid.len());
    for (i, (rs, w_s)) in ws.iter().enumerate() {
        for (j, (rv, w_v)) in wv.iter().enumerate() {
            let mut phi_s = Vec3::zeros();
            let mut phi_ss = Vec3::zeros();
            for (k, ii) in rs.clone().enumerate() {
                let q = at(ii, j) - at(i, j);
                phi_s += w_s[1][k] * q;
                phi_ss += w_s[2][k] * q;
            }
            let mut phi_v = Vec3::zeros();
            let mut phi_vv = Vec3::zeros();
            for (k, jj) in rv.clone().enumerate() {
                let q = at(i, jj) - at(i, j);
                phi_v += w_v[1][k] * q;
                phi_vv += w_v[2][k] * q;
            }
            let mut phi_sv = Vec3::zeros();
            for (ks, ii) in rs.clone().enumerate() {
                for (kv, jj) in rv.clone().enumerate() {
                    phi_sv += w_s[1][ks] * w_v[1][kv] * (at(ii, jj) - at(i, j));
                }
            }
            let cross = phi_s.cross(&phi_v);
            let area = cross.norm();
            if area < 1e-12 * phi_s.norm().max(1.0) * phi_v.norm().max(1.0) {
                return Err(Error::Degenerate {
                    s: s_nodes[i],
                    reason: format!("surface is singular at v = {}", v_nodes[j]),
                });
            }
            let n = cross / area;
            let (e, f, g) = (phi_s.dot(&phi_s), phi_s.dot(&phi_v), phi_v.dot(&phi_v));
            let (l, m, nn) = (phi_ss.dot(&n), phi_sv.dot(&n), phi_vv.dot(&n));
            out.push((l * nn - m * m) / (e * g - f * f));
        }
    }
    Ok(out)
}

/// Default numeric tolerance on `|K|`: `1e-6` relative to the patch scale,
/// i.e. `|K|·diameter² ≤ 1e-6`.
pub fn default_tol_k(patch: &RuledSurfacePatch) -> f64 {
    let d = patch.diameter().max(f64::MIN_POSITIVE);
    1e-6 / (d * d)
}

/// Developability from the estimated Gaussian curvature: passed iff
/// `max|K| ≤ tol_k`. The profile holds the largest `|K|` per base sample.
pub fn check_developable_numeric(patch: &RuledSurfacePatch, tol_k: f64) -> Result<CheckReport> {
    let k = gaussian_curvature(patch)?;
    let profile = patch
        .base
        .s()
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let row = &k[i * patch.n_v..(i + 1) * patch.n_v];
            (s, row.iter().fold(0.0_f64, |m, x| m.max(x.abs())))
        })
        .collect();
    Ok(CheckReport::from_profile("developable-numeric", tol_k, profile))
}
