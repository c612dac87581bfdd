//! Proper open arcs of the circle and finite coverings by them.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduces an angle to `[0, 2π)`.
pub fn canonical_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Reduces an angle to `(-π, π]`.
pub fn centered_angle(x: f64) -> f64 {
    let r = canonical_angle(x);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

#[derive(Debug, Deserialize)]
struct RawInterval {
    a: f64,
    b: f64,
}

/// Open arc `(a, b)` of the circle with `a < b < a + 2π` and `a ∈ [0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInterval")]
pub struct IntervalS1 {
    a: f64,
    b: f64,
}

impl TryFrom<RawInterval> for IntervalS1 {
    type Error = Error;

    fn try_from(r: RawInterval) -> Result<Self> {
        IntervalS1::new(r.a, r.b)
    }
}

impl IntervalS1 {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || b <= a || b - a >= TAU {
            return Err(Error::InvalidArgument(format!(
                "({a}, {b}) is not a proper arc"
            )));
        }
        let ca = canonical_angle(a);
        Ok(Self {
            a: ca,
            b: ca + (b - a),
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    /// Representative of `x` in `[a, a + 2π)`.
    pub fn lift(&self, x: f64) -> f64 {
        self.a + canonical_angle(x - self.a)
    }

    pub fn contains_point(&self, x: f64) -> bool {
        let y = self.lift(x);
        y > self.a && y < self.b
    }

    /// `other ⊆ self` as closed arcs.
    pub fn contains(&self, other: &IntervalS1) -> bool {
        let oa = self.lift(other.a);
        oa >= self.a && oa + other.length() <= self.b
    }

    /// `closure(other) ⊂ self`.
    pub fn contains_closure(&self, other: &IntervalS1) -> bool {
        let oa = self.lift(other.a);
        oa > self.a && oa + other.length() < self.b
    }

    /// Cuts `fraction · length` off both ends.
    pub fn shrink(&self, fraction: f64) -> Result<Self> {
        let d = fraction * self.length();
        Self::new(self.a + d, self.b - d)
    }

    /// The open complement of the closure, `(b, a + 2π)`.
    pub fn complement(&self) -> Self {
        Self::new(self.b, self.a + TAU).expect("complement of a proper arc is proper")
    }
}

#[derive(Debug, Deserialize)]
struct RawCovering {
    intervals: Vec<IntervalS1>,
}

/// Finite covering of the circle by proper arcs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCovering")]
pub struct Covering {
    intervals: Vec<IntervalS1>,
}

impl TryFrom<RawCovering> for Covering {
    type Error = Error;

    fn try_from(r: RawCovering) -> Result<Self> {
        Covering::new(r.intervals)
    }
}

/// First point of the circle left uncovered by the open arcs, if any.
///
/// A union of open arcs is the whole circle iff every endpoint lies inside
/// some arc, so only endpoints need checking.
pub(crate) fn uncovered_point(arcs: &[IntervalS1]) -> Option<f64> {
    if arcs.is_empty() {
        return Some(0.0);
    }
    arcs.iter()
        .flat_map(|i| [i.a, canonical_angle(i.b)])
        .find(|&x| !arcs.iter().any(|j| j.contains_point(x)))
}

impl Covering {
    pub fn new(intervals: Vec<IntervalS1>) -> Result<Self> {
        if let Some(angle) = uncovered_point(&intervals) {
            return Err(Error::CoverageGap { angle });
        }
        Ok(Self { intervals })
    }

    /// `m` arcs of equal `length` centred at `offset + 2πk/m`.
    pub fn uniform(m: usize, length: f64, offset: f64) -> Result<Self> {
        let arcs = (0..m)
            .map(|k| {
                let c = offset + TAU * k as f64 / m as f64;
                IntervalS1::new(c - 0.5 * length, c + 0.5 * length)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(arcs)
    }

    pub fn intervals(&self) -> &[IntervalS1] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}
