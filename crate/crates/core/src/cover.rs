//! The universal cover of `PSL(2,R)`, realized as a Möbius element together
//! with the value at `0` of a chosen lift of its circle action.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::centered_angle;
use crate::moebius::{Mat2, MoebiusElement};

/// Steps used by the path tracker before any refinement.
const TRACK_STEPS: usize = 256;
const TRACK_MAX_DEPTH: usize = 40;

#[derive(Debug, Serialize, Deserialize)]
struct RawCover {
    m: Mat2,
    lift0: f64,
}

/// Element of `PSL(2,R)~`. Deck transformations shift `lift_at_zero` by
/// multiples of `2π`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCover", into = "RawCover")]
pub struct CoverElement {
    base: MoebiusElement,
    lift0: f64,
}

impl TryFrom<RawCover> for CoverElement {
    type Error = Error;

    fn try_from(r: RawCover) -> Result<Self> {
        CoverElement::new(MoebiusElement::from_matrix(r.m)?, r.lift0)
    }
}

impl From<CoverElement> for RawCover {
    fn from(c: CoverElement) -> Self {
        RawCover {
            m: c.base.matrix(),
            lift0: c.lift0,
        }
    }
}

impl CoverElement {
    /// Checks that `lift0` projects onto the image of `0` under `base`.
    pub fn new(base: MoebiusElement, lift0: f64) -> Result<Self> {
        let image = base.act_on_circle(0.0);
        if centered_angle(lift0 - image).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "lift value {lift0} does not project onto {image}"
            )));
        }
        Ok(Self { base, lift0 })
    }

    pub fn identity() -> Self {
        Self {
            base: MoebiusElement::identity(),
            lift0: 0.0,
        }
    }

    /// Lift of `g` whose value at `0` is the image angle in `(-π, π]` plus
    /// `2π · branch`.
    pub fn make(g: &MoebiusElement, branch: i64) -> Self {
        Self {
            base: *g,
            lift0: centered_angle(g.act_on_circle(0.0)) + TAU * branch as f64,
        }
    }

    pub fn base(&self) -> MoebiusElement {
        self.base
    }

    pub fn lift_at_zero(&self) -> f64 {
        self.lift0
    }

    /// Covering projection.
    pub fn project(&self) -> MoebiusElement {
        self.base
    }

    /// Deck transformation by `k` full turns.
    pub fn deck(&self, k: i64) -> Self {
        Self {
            base: self.base,
            lift0: self.lift0 + TAU * k as f64,
        }
    }

    /// Pinned lift `φ̃(x)` in closed form.
    pub fn lift(&self, x: f64) -> f64 {
        let shift = self.lift0 - self.base.lift_displacement(0.0).0;
        let k = (shift / TAU).round();
        x + self.base.lift_displacement(x).0 + TAU * k
    }

    /// Pinned lift `φ̃(x)`, obtained by following the circle action from `0`
    /// to `x` and unwrapping; a step whose angular increment exceeds `π/2`
    /// is subdivided.
    ///
    /// A wrapped increment cannot reveal a step that advances by nearly a
    /// full turn, so the step count is also raised until `h · sup φ̃' < π/4`.
    pub fn track_lift(&self, x: f64) -> f64 {
        let (alpha, beta) = self.base.su11();
        let sup_derivative = (alpha.norm() + beta.norm()).powi(2);
        let steps = TRACK_STEPS.max((x.abs() * sup_derivative / FRAC_PI_4).ceil() as usize);
        let h = x / steps as f64;
        let mut value = self.lift0;
        for i in 0..steps {
            let a = h * i as f64;
            value = self.track_step(value, a, a + h, 0);
        }
        value
    }

    fn track_step(&self, value: f64, a: f64, b: f64, depth: usize) -> f64 {
        let d = centered_angle(self.base.act_on_circle(b) - value);
        if d.abs() > FRAC_PI_2 && depth < TRACK_MAX_DEPTH {
            let mid = 0.5 * (a + b);
            let v = self.track_step(value, a, mid, depth + 1);
            return self.track_step(v, mid, b, depth + 1);
        }
        value + d
    }

    /// Group law: bases multiply and the lifts compose,
    /// `lift0 = φ̃_self(φ̃_other(0))`.
    pub fn compose(&self, other: &CoverElement) -> CoverElement {
        Self {
            base: self.base.mul(&other.base),
            lift0: self.track_lift(other.lift0),
        }
    }

    pub fn inverse(&self) -> CoverElement {
        let inv = self.base.inverse();
        // φ̃⁻¹(0) is the x with φ̃(x) = 0; the inverse's lift at 0 is that x
        let approx = CoverElement::make(&inv, 0);
        let target = approx.lift0;
        // choose the branch so that φ̃(lift0) = 0
        let k = (-self.track_lift(target) / TAU).round();
        approx.deck(k as i64)
    }

    /// Distance in `(base, lift)` coordinates.
    pub fn distance(&self, other: &CoverElement) -> f64 {
        self.base
            .distance(&other.base)
            .max((self.lift0 - other.lift0).abs())
    }
}
