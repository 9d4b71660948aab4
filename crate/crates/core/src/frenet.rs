//! Frenet–Serret synthesis of space curves from curvature/torsion profiles.
//!
//! The frame `R = [T N B]` obeys `R' = R·[ω]×` with the body-frame Darboux
//! vector `ω = (τ, 0, κ)`. Each step is a fourth-order Runge–Kutta–Munthe-Kaas
//! update: stage increments live in the Lie algebra so(3), and the frame is
//! advanced by one exact rotation, so orthonormality only degrades by
//! round-off. Position follows from `α' = T` with the same stage weights.

use nalgebra::{Matrix3, Rotation3, Vector3};

use crate::error::{Error, Result};
use crate::profiles::ProfilePair;

pub type Vec3 = Vector3<f64>;

/// Number of steps used when no step is given.
pub const DEFAULT_STEPS: usize = 4096;

/// Right-handed orthonormal moving frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub tangent: Vec3,
    pub normal: Vec3,
    pub binormal: Vec3,
}

impl Frame {
    /// `T = x̂`, `N = ŷ`, `B = ẑ`.
    pub fn canonical() -> Self {
        Self::from_matrix(&Matrix3::identity())
    }

    /// Columns are `T`, `N`, `B`.
    pub fn from_matrix(m: &Matrix3<f64>) -> Self {
        Self {
            tangent: m.column(0).into_owned(),
            normal: m.column(1).into_owned(),
            binormal: m.column(2).into_owned(),
        }
    }

    pub fn to_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_columns(&[self.tangent, self.normal, self.binormal])
    }

    /// Largest entry of `RᵀR − I`.
    pub fn gram_deviation(&self) -> f64 {
        let m = self.to_matrix();
        (m.transpose() * m - Matrix3::identity()).amax()
    }

    /// Largest component of `B − T × N`.
    pub fn handedness_error(&self) -> f64 {
        (self.binormal - self.tangent.cross(&self.normal)).amax()
    }

    pub fn is_orthonormal(&self, tol: f64) -> bool {
        self.gram_deviation() <= tol && self.handedness_error() <= tol
    }

    pub fn rotated(&self, rotation: &Rotation3<f64>) -> Self {
        Self {
            tangent: rotation * self.tangent,
            normal: rotation * self.normal,
            binormal: rotation * self.binormal,
        }
    }
}

/// Position and frame at one arc-length parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrenetState {
    pub s: f64,
    pub position: Vec3,
    pub frame: Frame,
}

impl FrenetState {
    /// Origin with the canonical frame.
    pub fn canonical(s: f64) -> Self {
        Self {
            s,
            position: Vec3::zeros(),
            frame: Frame::canonical(),
        }
    }
}

/// An ordered sequence of curve samples, optionally with frames and the
/// profile pair it was synthesized from.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    s: Vec<f64>,
    positions: Vec<Vec3>,
    frames: Option<Vec<Frame>>,
    profile: Option<ProfilePair>,
}

impl SampledCurve {
    pub fn from_states(states: Vec<FrenetState>, profile: Option<ProfilePair>) -> Result<Self> {
        let s = states.iter().map(|st| st.s).collect();
        let positions = states.iter().map(|st| st.position).collect();
        let frames = states.iter().map(|st| st.frame).collect();
        Self::build(s, positions, Some(frames), profile)
    }

    pub fn from_positions(s: Vec<f64>, positions: Vec<Vec3>) -> Result<Self> {
        Self::build(s, positions, None, None)
    }

    fn build(
        s: Vec<f64>,
        positions: Vec<Vec3>,
        frames: Option<Vec<Frame>>,
        profile: Option<ProfilePair>,
    ) -> Result<Self> {
        if s.len() != positions.len() || frames.as_ref().is_some_and(|f| f.len() != s.len()) {
            return Err(Error::Domain("sample arrays have different lengths".into()));
        }
        if let Some(i) = s.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(Error::Domain(format!(
                "arc length not strictly increasing at row {}",
                i + 1
            )));
        }
        Ok(Self {
            s,
            positions,
            frames,
            profile,
        })
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn frames(&self) -> Option<&[Frame]> {
        self.frames.as_deref()
    }

    pub fn profile(&self) -> Option<&ProfilePair> {
        self.profile.as_ref()
    }

    pub fn state(&self, i: usize) -> Option<FrenetState> {
        let frame = *self.frames.as_ref()?.get(i)?;
        Some(FrenetState {
            s: self.s[i],
            position: self.positions[i],
            frame,
        })
    }

    /// Same samples with frames and profile dropped.
    pub fn positions_only(&self) -> Self {
        Self {
            s: self.s.clone(),
            positions: self.positions.clone(),
            frames: None,
            profile: None,
        }
    }

    /// Apply `x ↦ R·x + t` to positions and `R` to frames.
    pub fn transformed(&self, rotation: &Rotation3<f64>, translation: &Vec3) -> Self {
        Self {
            s: self.s.clone(),
            positions: self
                .positions
                .iter()
                .map(|p| rotation * p + translation)
                .collect(),
            frames: self
                .frames
                .as_ref()
                .map(|fs| fs.iter().map(|f| f.rotated(rotation)).collect()),
            profile: self.profile,
        }
    }
}

/// Body-frame Darboux vector `(τ, 0, κ)`.
fn darboux_body(pp: &ProfilePair, s: f64) -> Result<Vec3> {
    let kappa = pp.kappa_at(s).map_err(domain)?;
    let tau = pp.tau_at(s).map_err(domain)?;
    if kappa.is_nan() || kappa < 0.0 {
        return Err(Error::ProfileDomain(format!(
            "curvature {kappa} is not positive at s = {s}"
        )));
    }
    Ok(Vec3::new(tau, 0.0, kappa))
}

fn domain(e: Error) -> Error {
    match e {
        Error::Pole { s } => Error::ProfileDomain(format!("profile pole at s = {s}")),
        other => other,
    }
}

/// Truncated inverse of the dexp map for right-trivialized so(3) flows,
/// `θ' = ω + ½ θ×ω + 1/12 θ×(θ×ω)`; exact to the order RK4 needs.
fn dexp_inv(theta: &Vec3, omega: &Vec3) -> Vec3 {
    let tw = theta.cross(omega);
    omega + 0.5 * tw + theta.cross(&tw) / 12.0
}

fn exp_so3(theta: &Vec3) -> Matrix3<f64> {
    Rotation3::new(*theta).into_inner()
}

/// Sample parameters from `s_min` to `s_max` every `step`, with a final
/// partial step when the span is not a multiple of `step`.
fn sample_grid(s_min: f64, s_max: f64, step: f64) -> Vec<f64> {
    let span = s_max - s_min;
    let full = (span / step + 1e-9).floor() as usize;
    let mut grid: Vec<f64> = (0..=full).map(|k| s_min + k as f64 * step).collect();
    let last = *grid.last().unwrap();
    if s_max - last > 1e-9 * step {
        grid.push(s_max);
    } else {
        *grid.last_mut().unwrap() = s_max;
    }
    grid
}

/// Integrate the Frenet–Serret system of `pp` from `init` on `[s_min, s_max]`.
///
/// `init.s` is ignored; the first output state sits at `pp.s_min()`.
pub fn integrate_frenet(pp: &ProfilePair, step: f64, init: &FrenetState) -> Result<SampledCurve> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::Step(format!("step must be positive, got {step}")));
    }
    if step >= pp.span() {
        return Err(Error::Step(format!(
            "step {step} is not smaller than the interval length {}",
            pp.span()
        )));
    }
    if !init.frame.is_orthonormal(1e-9) {
        return Err(Error::Domain(
            "initial frame is not right-handed orthonormal".into(),
        ));
    }

    let grid = sample_grid(pp.s_min(), pp.s_max(), step);
    let mut states = Vec::with_capacity(grid.len());
    let mut frame = init.frame.to_matrix();
    let mut position = init.position;
    states.push(FrenetState {
        s: grid[0],
        position,
        frame: Frame::from_matrix(&frame),
    });

    let e1 = Vec3::x();
    for w in grid.windows(2) {
        let (s0, h) = (w[0], w[1] - w[0]);
        let w1 = darboux_body(pp, s0)?;
        let wm = darboux_body(pp, s0 + 0.5 * h)?;
        let w4 = darboux_body(pp, w[1])?;

        let k1 = w1;
        let th2 = 0.5 * h * k1;
        let k2 = dexp_inv(&th2, &wm);
        let th3 = 0.5 * h * k2;
        let k3 = dexp_inv(&th3, &wm);
        let th4 = h * k3;
        let k4 = dexp_inv(&th4, &w4);
        let theta = h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        // stage tangents R·exp(θᵢ)·x̂
        let t1 = frame * e1;
        let t2 = frame * (exp_so3(&th2) * e1);
        let t3 = frame * (exp_so3(&th3) * e1);
        let t4 = frame * (exp_so3(&th4) * e1);
        position += h / 6.0 * (t1 + 2.0 * t2 + 2.0 * t3 + t4);
        frame *= exp_so3(&theta);

        states.push(FrenetState {
            s: w[1],
            position,
            frame: Frame::from_matrix(&frame),
        });
    }
    SampledCurve::from_states(states, Some(*pp))
}

/// `integrate_frenet` with the default step and the canonical initial state.
pub fn integrate_default(pp: &ProfilePair) -> Result<SampledCurve> {
    integrate_frenet(
        pp,
        pp.span() / DEFAULT_STEPS as f64,
        &FrenetState::canonical(pp.s_min()),
    )
}

/// Closed-form circular helix with constant `kappa0 > 0` and `tau0`, started
/// at the origin with the canonical frame.
///
/// # Panics
///
/// If `kappa0` is not positive.
pub fn exact_helix(kappa0: f64, tau0: f64, s: f64) -> FrenetState {
    assert!(kappa0 > 0.0, "exact_helix needs positive curvature");
    let c = kappa0.hypot(tau0);
    let axis = Vec3::new(tau0, 0.0, kappa0) / c;
    // x̂ split into its component along the axis and the rotating remainder
    let along = tau0 / c;
    let radial = Vec3::x() - along * axis;
    let ortho = axis.cross(&Vec3::x());
    let (sn, cs) = (c * s).sin_cos();

    let position = along * s * axis + sn / c * radial + (1.0 - cs) / c * ortho;
    let tangent = along * axis + cs * radial + sn * ortho;
    let normal = (c / kappa0) * (-sn * radial + cs * ortho);
    let binormal = tangent.cross(&normal);
    FrenetState {
        s,
        position,
        frame: Frame {
            tangent,
            normal,
            binormal,
        },
    }
}

/// Planar clothoid `(∫₀ˢ cos θ, ∫₀ˢ sin θ)` with `θ(t) = a·t²/2 + b·t`, by
/// adaptive Simpson quadrature to `1e-10` absolute.
pub fn planar_clothoid_reference(a: f64, b: f64, s: f64) -> Result<[f64; 2]> {
    if a == 0.0 {
        return Err(Error::Domain("clothoid reference needs a ≠ 0".into()));
    }
    let f = |t: f64| {
        let (sn, cs) = (0.5 * a * t * t + b * t).sin_cos();
        [cs, sn]
    };
    adaptive_simpson(&f, 0.0, s, 1e-10)
}

const MAX_DEPTH: u32 = 48;

fn adaptive_simpson<F: Fn(f64) -> [f64; 2]>(f: &F, lo: f64, hi: f64, tol: f64) -> Result<[f64; 2]> {
    let flo = f(lo);
    let fhi = f(hi);
    let mid = 0.5 * (lo + hi);
    let fmid = f(mid);
    let whole = simpson(lo, hi, flo, fmid, fhi);
    let mut worst = 0.0;
    let out = simpson_step(f, lo, hi, flo, fmid, fhi, whole, tol, MAX_DEPTH, &mut worst);
    if worst > tol {
        return Err(Error::Quadrature { tol, estimate: worst });
    }
    Ok(out)
}

fn simpson(lo: f64, hi: f64, flo: [f64; 2], fmid: [f64; 2], fhi: [f64; 2]) -> [f64; 2] {
    let w = (hi - lo) / 6.0;
    [0, 1].map(|k| w * (flo[k] + 4.0 * fmid[k] + fhi[k]))
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> [f64; 2]>(
    f: &F,
    lo: f64,
    hi: f64,
    flo: [f64; 2],
    fmid: [f64; 2],
    fhi: [f64; 2],
    whole: [f64; 2],
    tol: f64,
    depth: u32,
    worst: &mut f64,
) -> [f64; 2] {
    let mid = 0.5 * (lo + hi);
    let (lm, rm) = (0.5 * (lo + mid), 0.5 * (mid + hi));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(lo, mid, flo, flm, fmid);
    let right = simpson(mid, hi, fmid, frm, fhi);
    let err = [0, 1]
        .map(|k| (left[k] + right[k] - whole[k]).abs())
        .into_iter()
        .fold(0.0, f64::max);
    let richardson = |k: usize| left[k] + right[k] + (left[k] + right[k] - whole[k]) / 15.0;
    if err <= 15.0 * tol {
        return [richardson(0), richardson(1)];
    }
    if depth == 0 {
        *worst = f64::max(*worst, err / 15.0);
        return [richardson(0), richardson(1)];
    }
    let l = simpson_step(f, lo, mid, flo, flm, fmid, left, 0.5 * tol, depth - 1, worst);
    let r = simpson_step(f, mid, hi, fmid, frm, fhi, right, 0.5 * tol, depth - 1, worst);
    [l[0] + r[0], l[1] + r[1]]
}
