//! Scalar curvature and torsion profiles of the form `s ↦ (a·s + b) / (c·s + d)`.
//!
//! One four-coefficient type covers every family the spiral taxonomy needs:
//! constants, affine profiles (`c = 0`), reciprocals of affine profiles
//! (`a = 0`) and general rational-linear quotients.

use serde::Serialize;

use crate::error::{Error, Result};

/// Relative size below which `c·s + d` is treated as a pole.
pub const POLE_TOL: f64 = 1e-12;

/// Coefficient threshold (on sup-normalized coefficients) used to demote a
/// profile to a simpler family.
pub const FAMILY_TOL: f64 = 1e-8;

/// `s ↦ (a·s + b) / (c·s + d)`, stored in canonical form.
///
/// Canonical form: when `c = 0` the coefficients are divided by `d` so that
/// `d = 1`; otherwise they are scaled so that `c > 0` and
/// `max(|a|, |b|, |c|, |d|) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RationalLinearProfile {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ProfileFamily {
    Constant,
    Linear,
    ReciprocalLinear,
    RationalLinear,
}

impl ProfileFamily {
    /// Whether every member of `self` is also a member of `other`.
    pub fn is_within(self, other: ProfileFamily) -> bool {
        use ProfileFamily::*;
        match (self, other) {
            (x, y) if x == y => true,
            (_, RationalLinear) => true,
            (Constant, Linear) | (Constant, ReciprocalLinear) => true,
            _ => false,
        }
    }
}

impl RationalLinearProfile {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        if ![a, b, c, d].iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidProfile(format!(
                "non-finite coefficient in ({a}, {b}, {c}, {d})"
            )));
        }
        if c == 0.0 && d == 0.0 {
            return Err(Error::InvalidProfile(
                "denominator c·s + d is identically zero".into(),
            ));
        }
        Ok(Self { a, b, c, d }.canonical())
    }

    /// `a·s + b`.
    pub fn linear(a: f64, b: f64) -> Result<Self> {
        Self::new(a, b, 0.0, 1.0)
    }

    pub fn constant(value: f64) -> Result<Self> {
        Self::new(0.0, value, 0.0, 1.0)
    }

    /// `1 / (a·s + b)`.
    pub fn reciprocal_linear(a: f64, b: f64) -> Result<Self> {
        Self::new(0.0, 1.0, a, b)
    }

    pub fn coefficients(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn d(&self) -> f64 {
        self.d
    }

    fn canonical(self) -> Self {
        let Self { a, b, c, d } = self;
        if c == 0.0 {
            return Self {
                a: a / d,
                b: b / d,
                c: 0.0,
                d: 1.0,
            };
        }
        // divide rather than multiply so the largest entry lands on exactly ±1
        let m = sup_norm([a, b, c, d]) * c.signum();
        Self {
            a: a / m,
            b: b / m,
            c: c / m,
            d: d / m,
        }
    }

    /// Coefficients scaled to unit sup-norm, used for scale-free comparisons.
    pub fn normalized_coefficients(&self) -> [f64; 4] {
        let m = sup_norm(self.coefficients());
        self.coefficients().map(|x| x / m)
    }

    /// True when the denominator is the constant 1 (affine profile).
    pub fn is_affine(&self) -> bool {
        self.c == 0.0
    }

    /// True when the numerator is identically zero.
    pub fn is_zero(&self) -> bool {
        self.a == 0.0 && self.b == 0.0
    }

    fn denominator(&self, s: f64) -> Result<f64> {
        let den = self.c * s + self.d;
        if den.abs() < POLE_TOL * (self.c.abs() * s.abs()).max(1.0) {
            return Err(Error::Pole { s });
        }
        Ok(den)
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        let den = self.denominator(s)?;
        Ok((self.a * s + self.b) / den)
    }

    pub fn derivative(&self, s: f64) -> Result<f64> {
        let den = self.denominator(s)?;
        Ok(self.cross() / (den * den))
    }

    pub fn second_derivative(&self, s: f64) -> Result<f64> {
        let den = self.denominator(s)?;
        Ok(-2.0 * self.c * self.cross() / (den * den * den))
    }

    /// `a·d − b·c`; zero exactly when the profile is constant.
    fn cross(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// `1 / p`, which swaps numerator and denominator.
    pub fn reciprocal(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Family(
                "reciprocal of the zero profile is undefined".into(),
            ));
        }
        Self::new(self.c, self.d, self.a, self.b)
    }

    /// Roots of the denominator inside `[s_min, s_max]`, ascending.
    pub fn poles(&self, s_min: f64, s_max: f64) -> Vec<f64> {
        if self.c == 0.0 {
            return Vec::new();
        }
        let root = -self.d / self.c;
        if (s_min..=s_max).contains(&root) {
            vec![root]
        } else {
            Vec::new()
        }
    }

    /// Roots of the numerator inside `[s_min, s_max]` (excluding a zero profile).
    pub fn zeros(&self, s_min: f64, s_max: f64) -> Vec<f64> {
        if self.a == 0.0 {
            return Vec::new();
        }
        let root = -self.b / self.a;
        if (s_min..=s_max).contains(&root) {
            vec![root]
        } else {
            Vec::new()
        }
    }
}

fn sup_norm(v: [f64; 4]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Most specific family of `p`, comparing sup-normalized coefficients against `tol`.
pub fn detect_family(p: &RationalLinearProfile, tol: f64) -> ProfileFamily {
    let [a, b, c, d] = p.normalized_coefficients();
    if (a * d - b * c).abs() <= tol {
        ProfileFamily::Constant
    } else if c.abs() <= tol {
        ProfileFamily::Linear
    } else if a.abs() <= tol {
        ProfileFamily::ReciprocalLinear
    } else {
        ProfileFamily::RationalLinear
    }
}

/// Intrinsic data of a curve: curvature and torsion profiles on `[s_min, s_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfilePair {
    kappa: RationalLinearProfile,
    tau: RationalLinearProfile,
    s_min: f64,
    s_max: f64,
}

impl ProfilePair {
    /// Validates the interval, pole-freeness of both profiles and positivity
    /// of the curvature.
    ///
    /// Profiles in this family are monotone between poles, so checking the
    /// endpoints is enough. The curvature may vanish at one endpoint (an
    /// inflection at the start of a clothoid) but must be positive inside.
    pub fn new(
        kappa: RationalLinearProfile,
        tau: RationalLinearProfile,
        s_min: f64,
        s_max: f64,
    ) -> Result<Self> {
        if !(s_min.is_finite() && s_max.is_finite()) || s_min >= s_max {
            return Err(Error::ProfileDomain(format!(
                "interval [{s_min}, {s_max}] is empty or not finite"
            )));
        }
        for (name, p) in [("kappa", &kappa), ("tau", &tau)] {
            if let Some(&pole) = p.poles(s_min, s_max).first() {
                return Err(Error::ProfileDomain(format!(
                    "{name} has a pole at s = {pole} inside [{s_min}, {s_max}]"
                )));
            }
        }
        let k0 = kappa.eval(s_min)?;
        let k1 = kappa.eval(s_max)?;
        if k0 < 0.0 || k1 < 0.0 || (k0 == 0.0 && k1 == 0.0) {
            return Err(Error::ProfileDomain(format!(
                "curvature must be positive on [{s_min}, {s_max}] (kappa = {k0} at start, {k1} at end)"
            )));
        }
        Ok(Self {
            kappa,
            tau,
            s_min,
            s_max,
        })
    }

    pub fn kappa(&self) -> &RationalLinearProfile {
        &self.kappa
    }
    pub fn tau(&self) -> &RationalLinearProfile {
        &self.tau
    }
    pub fn s_min(&self) -> f64 {
        self.s_min
    }
    pub fn s_max(&self) -> f64 {
        self.s_max
    }
    pub fn span(&self) -> f64 {
        self.s_max - self.s_min
    }

    pub fn kappa_at(&self, s: f64) -> Result<f64> {
        self.kappa.eval(s)
    }
    pub fn tau_at(&self, s: f64) -> Result<f64> {
        self.tau.eval(s)
    }

    /// `n ≥ 2` evenly spaced parameters covering the closed interval.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        let n = n.max(2);
        let h = self.span() / (n - 1) as f64;
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    self.s_max
                } else {
                    self.s_min + i as f64 * h
                }
            })
            .collect()
    }
}

/// The quotient κ/τ of two affine profiles, as one rational-linear profile.
pub fn ratio_profile(pp: &ProfilePair) -> Result<RationalLinearProfile> {
    let (k, t) = (pp.kappa(), pp.tau());
    if !k.is_affine() || !t.is_affine() {
        return Err(Error::Family(
            "ratio_profile needs affine curvature and torsion; the quotient of general \
             rational-linear profiles leaves the family"
                .into(),
        ));
    }
    if t.is_zero() {
        return Err(Error::Family("torsion is identically zero".into()));
    }
    RationalLinearProfile::new(k.a(), k.b(), t.a(), t.b())
}
