//! Smooth partitions of unity subordinate to a covering by proper arcs.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::{centered_angle, uncovered_point, Covering, IntervalS1};
use crate::trig::grid;

/// Points used to measure `sup Σ |λ_i'|`.
const DERIVATIVE_SCAN_POINTS: usize = 1 << 14;

/// Partition of unity built from `exp(-1/(1-s²))` bumps on shrunken arcs,
/// normalized by their sum.
///
/// Weights are evaluated in closed form, so `Σ λ_i = 1` holds to rounding
/// and `λ_i` vanishes identically off its shrunken arc.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionOfUnity {
    cover: Covering,
    supports: Vec<IntervalS1>,
    derivative_sum_sup: f64,
    margins: Vec<f64>,
}

// exp(-1/(1-s²)) on the arc and its derivative in x.
fn bump(arc: &IntervalS1, x: f64) -> (f64, f64) {
    let w = 0.5 * arc.length();
    let s = centered_angle(x - arc.center()) / w;
    if s.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let q = 1.0 - s * s;
    let b = (-1.0 / q).exp();
    (b, b * (-2.0 * s / (q * q)) / w)
}

impl PartitionOfUnity {
    /// Places a bump on each covering arc shrunk by `margin_fraction` of its
    /// length at both ends.
    pub fn build(cover: &Covering, margin_fraction: f64) -> Result<Self> {
        if !(margin_fraction > 0.0 && margin_fraction < 0.5) {
            return Err(Error::InvalidArgument(format!(
                "margin fraction {margin_fraction} outside (0, 0.5)"
            )));
        }
        let supports = cover
            .intervals()
            .iter()
            .map(|i| i.shrink(margin_fraction))
            .collect::<Result<Vec<_>>>()?;
        if let Some(angle) = uncovered_point(&supports) {
            return Err(Error::CoverageGap { angle });
        }
        let margins = cover
            .intervals()
            .iter()
            .map(|i| margin_fraction * i.length())
            .collect();
        let mut p = Self {
            cover: cover.clone(),
            supports,
            derivative_sum_sup: 0.0,
            margins,
        };
        p.derivative_sum_sup = grid(DERIVATIVE_SCAN_POINTS)
            .into_iter()
            .map(|x| p.derivative_abs_sum(x))
            .fold(0.0, f64::max);
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.supports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.supports.is_empty()
    }

    pub fn cover(&self) -> &Covering {
        &self.cover
    }

    pub fn interval(&self, i: usize) -> IntervalS1 {
        self.cover.intervals()[i]
    }

    /// Closed supports of the weights.
    pub fn supports(&self) -> &[IntervalS1] {
        &self.supports
    }

    /// `sup_x Σ_i |λ_i'(x)|`
    pub fn derivative_sum_sup(&self) -> f64 {
        self.derivative_sum_sup
    }

    /// Arc distance from `supp λ_i` to the complement of `I_i`.
    pub fn margins(&self) -> &[f64] {
        &self.margins
    }

    fn total(&self, x: f64) -> (f64, f64) {
        self.supports.iter().fold((0.0, 0.0), |(s, ds), arc| {
            let (b, db) = bump(arc, x);
            (s + b, ds + db)
        })
    }

    /// `λ_i(x)` and `λ_i'(x)`.
    pub fn weight(&self, i: usize, x: f64) -> (f64, f64) {
        let (s, ds) = self.total(x);
        let (b, db) = bump(&self.supports[i], x);
        (b / s, (db * s - b * ds) / (s * s))
    }

    /// `Σ_{i<k} λ_i(x)` and its derivative.
    pub fn partial_sum(&self, k: usize, x: f64) -> (f64, f64) {
        if k == 0 {
            return (0.0, 0.0);
        }
        if k >= self.len() {
            return (1.0, 0.0);
        }
        let (s, ds) = self.total(x);
        let (b, db) = self.supports[..k].iter().fold((0.0, 0.0), |(a, da), arc| {
            let (b, db) = bump(arc, x);
            (a + b, da + db)
        });
        (b / s, (db * s - b * ds) / (s * s))
    }

    fn derivative_abs_sum(&self, x: f64) -> f64 {
        let (s, ds) = self.total(x);
        self.supports
            .iter()
            .map(|arc| {
                let (b, db) = bump(arc, x);
                ((db * s - b * ds) / (s * s)).abs()
            })
            .sum()
    }

    /// Largest admissible neighbourhood radius, scaled by `safety`.
    ///
    /// Below `1 / sup Σ|λ'|` every interpolant `Ψ_k` stays monotone; below
    /// the smallest margin a displacement cannot move `supp λ_k` out of `I_k`.
    pub fn epsilon_max(&self, safety: f64) -> f64 {
        let margin = self.margins.iter().copied().fold(f64::INFINITY, f64::min);
        safety * (1.0 / self.derivative_sum_sup).min(margin)
    }
}
