//! `PSL(2,R)` as unit-determinant matrices modulo sign, acting on the circle
//! through `x = tan(θ/2)`.
//!
//! Conventions: `T(p) = [[1,p],[0,1]]`, `S(s) = [[1,0],[s,1]]`,
//! `D(τ) = diag(e^{τ/2}, e^{-τ/2})` and `R(t)` the `SO(2)` matrix of angle
//! `t/2`, which rotates the circle by `t`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::diffeo::CircleDiffeo;
use crate::error::{Error, Result};
use crate::interval::canonical_angle;
use crate::trig::TrigPoly;

pub type Mat2 = [[f64; 2]; 2];

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

pub fn mat_max_diff(a: &Mat2, b: &Mat2) -> f64 {
    (0..4)
        .map(|i| (a[i / 2][i % 2] - b[i / 2][i % 2]).abs())
        .fold(0.0, f64::max)
}

pub(crate) fn so2(angle: f64) -> Mat2 {
    let (s, c) = angle.sin_cos();
    [[c, s], [-s, c]]
}

/// Entries at or below this fraction of the largest one are skipped when
/// fixing the sign.
const SIGN_CUTOFF: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Generator {
    T,
    S,
    D,
    R,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawMoebius {
    m: Mat2,
}

/// Element of `PSL(2,R)`: determinant one, first significant entry (row
/// major) positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMoebius", into = "RawMoebius")]
pub struct MoebiusElement {
    m: Mat2,
}

impl TryFrom<RawMoebius> for MoebiusElement {
    type Error = Error;

    fn try_from(r: RawMoebius) -> Result<Self> {
        MoebiusElement::from_matrix(r.m)
    }
}

impl From<MoebiusElement> for RawMoebius {
    fn from(g: MoebiusElement) -> Self {
        RawMoebius { m: g.m }
    }
}

impl MoebiusElement {
    pub fn identity() -> Self {
        Self {
            m: [[1.0, 0.0], [0.0, 1.0]],
        }
    }

    /// Accepts any matrix of positive determinant and rescales it.
    pub fn from_matrix(m: Mat2) -> Result<Self> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if !(det.is_finite() && det > 0.0) || m.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NotInPsl(format!("determinant {det}")));
        }
        Ok(Self::normalized(m, det))
    }

    fn normalized(mut m: Mat2, det: f64) -> Self {
        let s = 1.0 / det.sqrt();
        let scale = m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
        let lead = m
            .iter()
            .flatten()
            .copied()
            .find(|v| v.abs() > SIGN_CUTOFF * scale)
            .unwrap_or(1.0);
        let s = if lead < 0.0 { -s } else { s };
        for v in m.iter_mut().flatten() {
            // + 0.0 turns -0.0 into 0.0
            *v = *v * s + 0.0;
        }
        Self { m }
    }

    pub fn matrix(&self) -> Mat2 {
        self.m
    }

    pub fn generator(kind: Generator, value: f64) -> Self {
        match kind {
            Generator::T => Self::translation(value),
            Generator::S => Self::special_conformal(value),
            Generator::D => Self::dilation(value),
            Generator::R => Self::rotation(value),
        }
    }

    pub fn translation(p: f64) -> Self {
        Self::normalized([[1.0, p], [0.0, 1.0]], 1.0)
    }

    pub fn special_conformal(s: f64) -> Self {
        Self::normalized([[1.0, 0.0], [s, 1.0]], 1.0)
    }

    pub fn dilation(tau: f64) -> Self {
        let a = (0.5 * tau).exp();
        Self::normalized([[a, 0.0], [0.0, 1.0 / a]], 1.0)
    }

    pub fn rotation(t: f64) -> Self {
        Self::normalized(so2(0.5 * t), 1.0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let m = mat_mul(&self.m, &other.m);
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        Self::normalized(m, det)
    }

    pub fn inverse(&self) -> Self {
        let [[a, b], [c, d]] = self.m;
        Self::normalized([[d, -b], [-c, a]], 1.0)
    }

    /// Largest entrywise difference, minimized over the sign ambiguity.
    pub fn distance(&self, other: &Self) -> f64 {
        let neg = other.m.map(|r| r.map(|v| -v));
        mat_max_diff(&self.m, &other.m).min(mat_max_diff(&self.m, &neg))
    }

    /// The same map written as `z ↦ (αz + β)/(β̄z + ᾱ)` on the unit circle.
    pub fn su11(&self) -> (Complex64, Complex64) {
        let [[a, b], [c, d]] = self.m;
        (
            Complex64::new(0.5 * (a + d), 0.5 * (b - c)),
            Complex64::new(0.5 * (d - a), 0.5 * (b + c)),
        )
    }

    /// Image of the angle `θ`, in `[0, 2π)`.
    pub fn act_on_circle(&self, theta: f64) -> f64 {
        let (alpha, beta) = self.su11();
        let z = Complex64::from_polar(1.0, theta);
        let w = (alpha * z + beta) / (beta.conj() * z + alpha.conj());
        canonical_angle(w.arg())
    }

    // 2 arg α + 2 Arg(1 + q e^{-iθ}) with principal branches; continuous in θ.
    fn raw_displacement(&self, theta: f64) -> (f64, f64) {
        let (alpha, beta) = self.su11();
        let q = beta / alpha;
        let w = q * Complex64::from_polar(1.0, -theta);
        let one = Complex64::new(1.0, 0.0);
        (
            2.0 * alpha.arg() + 2.0 * (one + w).arg(),
            -2.0 * (w / (one + w)).re,
        )
    }

    fn branch_offset(&self) -> f64 {
        let u0 = self.raw_displacement(0.0).0;
        -TAU * ((u0 - PI) / TAU).ceil()
    }

    /// Displacement `u(θ)` of the canonical lift (`u(0) ∈ (-π, π]`) and its
    /// derivative.
    pub fn lift_displacement(&self, theta: f64) -> (f64, f64) {
        let (u, du) = self.raw_displacement(theta);
        (u + self.branch_offset(), du)
    }

    /// `g = T(p) D(τ) R(t)` with `t ∈ [0, 2π)`.
    pub fn iwasawa(&self) -> IwasawaCoords {
        let [[a, b], [c, d]] = self.m;
        let r2 = c * c + d * d;
        let mut s = (-c).atan2(d) + 0.0;
        let mut sign = 1.0;
        if s < 0.0 {
            s += PI;
            sign = -1.0;
        }
        if s >= PI {
            s -= PI;
            sign = -sign;
        }
        let (sn, cs) = s.sin_cos();
        let r = r2.sqrt();
        let p = sign * (b * cs - a * sn) / r;
        IwasawaCoords {
            p,
            tau: -r2.ln(),
            t: 2.0 * s,
        }
    }

    pub fn from_iwasawa(c: &IwasawaCoords) -> Self {
        Self::translation(c.p)
            .mul(&Self::dilation(c.tau))
            .mul(&Self::rotation(c.t))
    }

    /// Circle diffeomorphism of this element, with the Fourier series of the
    /// lift displacement summed in closed form:
    /// `u(θ) = 2 arg α + 2 Σ_n (-1)^{n+1} Im(q^n e^{-inθ}) / n`, `q = β/α`.
    ///
    /// Fails with `ModeOverflow` when `|q|` is so close to one that the
    /// series needs more than `cfg.max_modes` terms.
    pub fn to_diffeo(&self, cfg: &Config) -> Result<CircleDiffeo> {
        let (alpha, beta) = self.su11();
        let q = beta / alpha;
        let r = q.norm();
        let mut coeffs = vec![Complex64::new(2.0 * alpha.arg(), 0.0)];
        if r > 0.0 {
            // tail after n terms ≤ 2 r^{n+1} / ((n+1)(1-r))
            let mut n = 0usize;
            let mut rn = 1.0;
            loop {
                n += 1;
                rn *= r;
                if 2.0 * rn * r / ((n + 1) as f64 * (1.0 - r)) < cfg.trim_tail {
                    break;
                }
                if n > cfg.max_modes {
                    return Err(Error::ModeOverflow { cap: cfg.max_modes });
                }
            }
            let qc = q.conj();
            let mut pw = Complex64::new(1.0, 0.0);
            for k in 1..=n {
                pw *= qc;
                let sign = if k % 2 == 1 { 2.0 } else { -2.0 };
                coeffs.push(Complex64::new(0.0, sign / k as f64) * pw);
            }
        }
        CircleDiffeo::from_displacement(TrigPoly::from_coeffs(coeffs), cfg)
    }
}

/// `(p, τ, t)` with `g = T(p) D(τ) R(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IwasawaCoords {
    pub p: f64,
    pub tau: f64,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TsKind {
    #[serde(rename = "T")]
    Translation,
    #[serde(rename = "S")]
    SpecialConformal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TsFactor {
    pub kind: TsKind,
    pub param: f64,
}

impl TsFactor {
    pub fn t(param: f64) -> Self {
        Self {
            kind: TsKind::Translation,
            param,
        }
    }

    pub fn s(param: f64) -> Self {
        Self {
            kind: TsKind::SpecialConformal,
            param,
        }
    }

    pub fn element(&self) -> MoebiusElement {
        match self.kind {
            TsKind::Translation => MoebiusElement::translation(self.param),
            TsKind::SpecialConformal => MoebiusElement::special_conformal(self.param),
        }
    }
}

/// Matrix product of the word in the order written.
pub fn word_element(word: &[TsFactor]) -> MoebiusElement {
    word.iter()
        .fold(MoebiusElement::identity(), |acc, f| acc.mul(&f.element()))
}

/// `D(τ) = S(-(e^{τ/2}-1)e^{-τ/2}) T(1) S(e^{τ/2}-1) T(-e^{-τ/2})`.
pub fn dilation_word(tau: f64) -> Vec<TsFactor> {
    let a = (0.5 * tau).exp();
    let b = (-0.5 * tau).exp();
    vec![
        TsFactor::s(-(a - 1.0) * b),
        TsFactor::t(1.0),
        TsFactor::s(a - 1.0),
        TsFactor::t(-b),
    ]
}

/// Smallest `|sin(α/2)|` at which the three-factor rotation identity is
/// used directly.
pub const ROTATION_SPLIT: f64 = 0.1;

/// `R(α) = S(c) T(sin(α/2)) S(c)` with `c = (cos(α/2) - 1)/sin(α/2)`.
///
/// Where `sin(α/2)` is small the identity degenerates; the angle is then
/// halved (after adding a full turn when `α` sits near a multiple of `4π`,
/// which leaves the `PSL` element unchanged). `R(0)` gives the empty word.
pub fn rotation_word(alpha: f64) -> Vec<TsFactor> {
    let (s, c) = (0.5 * alpha).sin_cos();
    if s.abs() >= ROTATION_SPLIT {
        let k = (c - 1.0) / s;
        return vec![TsFactor::s(k), TsFactor::t(s), TsFactor::s(k)];
    }
    if c > 0.0 {
        if s.abs() <= 1e-15 {
            return Vec::new();
        }
        return rotation_word(alpha + TAU);
    }
    let mut w = rotation_word(0.5 * alpha);
    w.extend(rotation_word(0.5 * alpha));
    w
}

/// `[T(p)] ++ dilation_word(τ) ++ rotation_word(t)` from the Iwasawa
/// coordinates, omitting parts whose parameter vanishes.
pub fn ts_word(g: &MoebiusElement) -> Vec<TsFactor> {
    let c = g.iwasawa();
    let mut w = Vec::new();
    if c.p != 0.0 {
        w.push(TsFactor::t(c.p));
    }
    if c.tau != 0.0 {
        w.extend(dilation_word(c.tau));
    }
    if c.t != 0.0 {
        w.extend(rotation_word(c.t));
    }
    w
}
