//! Orientation-preserving diffeomorphisms of the circle, stored through the
//! displacement `u` of a lift `φ̃(x) = x + u(x)`.

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::interval::IntervalS1;
use crate::roots::solve_increasing;
use crate::trig::{fit_adaptive, grid, TrigPoly};

/// Points in the write-once evaluation cache.
pub const CACHE_POINTS: usize = 1024;

/// Samples of the lift and its derivative on the uniform cache grid.
#[derive(Debug, Clone)]
pub struct GridCache {
    pub x: Vec<f64>,
    pub lift: Vec<f64>,
    pub derivative: Vec<f64>,
}

/// Smooth orientation-preserving circle diffeomorphism.
///
/// The displacement is a real trigonometric polynomial, so periodicity of
/// `u` holds by construction. Constructors reject non-monotone lifts and
/// shift the mean so that `u(0) ∈ (-π, π]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(into = "DiffeoJson", try_from = "DiffeoJson")]
pub struct CircleDiffeo {
    disp: TrigPoly,
    cache: OnceLock<GridCache>,
}

impl PartialEq for CircleDiffeo {
    fn eq(&self, other: &Self) -> bool {
        self.disp == other.disp
    }
}

/// Wire form: `u(x) = mean + Σ cos[k]·cos((k+1)x) + sin[k]·sin((k+1)x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffeoJson {
    pub mean: f64,
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
}

impl From<CircleDiffeo> for DiffeoJson {
    fn from(d: CircleDiffeo) -> Self {
        Self {
            mean: d.disp.mean(),
            cos: d.disp.cos_coeffs(),
            sin: d.disp.sin_coeffs(),
        }
    }
}

impl TryFrom<DiffeoJson> for CircleDiffeo {
    type Error = Error;

    fn try_from(j: DiffeoJson) -> Result<Self> {
        CircleDiffeo::make(&j.cos, &j.sin, j.mean, &Config::default())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffeoMetrics {
    /// `sup |u|`
    pub sup_displacement: f64,
    /// `inf φ̃'`
    pub inf_derivative: f64,
    /// `sup 2|sin(u/2)|`, the chordal displacement on the unit circle.
    pub chordal_sup: f64,
}

/// Outcome of a support scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    Empty,
    Full,
    Arc(IntervalS1),
}

fn grid_size(min: usize, degree: usize, factor: usize) -> usize {
    min.max(factor * (degree + 1)).next_power_of_two()
}

// Amount to add to the mean so that u(0) lands in (-π, π].
fn branch_shift(u0: f64) -> f64 {
    -TAU * ((u0 - PI) / TAU).ceil()
}

impl CircleDiffeo {
    pub fn identity() -> Self {
        Self::trusted(TrigPoly::zero())
    }

    /// Rigid rotation by `angle` (reduced to the canonical branch).
    pub fn rotation(angle: f64) -> Self {
        let mut u = TrigPoly::constant(angle);
        u.add_constant(branch_shift(angle));
        Self::trusted(u)
    }

    /// `u(x) = mean + Σ cos[k]·cos((k+1)x) + sin[k]·sin((k+1)x)`.
    pub fn make(cos: &[f64], sin: &[f64], mean: f64, cfg: &Config) -> Result<Self> {
        if !(cos.iter().chain(sin).all(|c| c.is_finite()) && mean.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        Self::from_displacement(TrigPoly::from_cos_sin(mean, cos, sin), cfg)
    }

    /// Validates monotonicity and moves the lift to the canonical branch.
    pub fn from_displacement(mut u: TrigPoly, cfg: &Config) -> Result<Self> {
        let m = grid_size(cfg.grid_points, u.degree(), 8);
        let min_derivative = u
            .derivative()
            .sample(m)
            .into_iter()
            .fold(f64::INFINITY, |acc, d| acc.min(1.0 + d));
        if min_derivative <= cfg.derivative_floor {
            return Err(Error::NotADiffeomorphism { min_derivative });
        }
        let shift = branch_shift(u.eval(0.0));
        u.add_constant(shift);
        Ok(Self::trusted(u))
    }

    fn trusted(disp: TrigPoly) -> Self {
        Self {
            disp,
            cache: OnceLock::new(),
        }
    }

    pub fn displacement(&self) -> &TrigPoly {
        &self.disp
    }

    pub fn mode_count(&self) -> usize {
        self.disp.degree()
    }

    pub fn is_identity(&self) -> bool {
        self.disp.is_zero()
    }

    /// `Some(angle)` when this is a rigid rotation.
    pub fn as_rotation(&self) -> Option<f64> {
        self.disp.is_constant().then(|| self.disp.mean())
    }

    /// The lift `φ̃(x) = x + u(x)`.
    pub fn evaluate(&self, x: f64) -> f64 {
        x + self.disp.eval(x)
    }

    /// `φ̃'(x)`.
    pub fn derivative_at(&self, x: f64) -> f64 {
        1.0 + self.disp.eval_d(x).1
    }

    pub fn grid_cache(&self) -> &GridCache {
        self.cache.get_or_init(|| {
            let x = grid(CACHE_POINTS);
            let u = self.disp.sample(CACHE_POINTS);
            let du = self.disp.derivative().sample(CACHE_POINTS);
            GridCache {
                lift: x.iter().zip(&u).map(|(x, u)| x + u).collect(),
                derivative: du.iter().map(|d| 1.0 + d).collect(),
                x,
            }
        })
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &CircleDiffeo, cfg: &Config) -> Result<CircleDiffeo> {
        if other.is_identity() {
            return Ok(self.clone());
        }
        if self.is_identity() {
            return Ok(other.clone());
        }
        if let Some(c) = other.as_rotation() {
            let mut u = self.disp.shifted(c);
            u.add_constant(c);
            return Self::from_displacement(u, cfg);
        }
        if let Some(c) = self.as_rotation() {
            let mut u = other.disp.clone();
            u.add_constant(c);
            return Self::from_displacement(u, cfg);
        }
        let start = 4 * (self.mode_count().max(other.mode_count()) + 1);
        let u = fit_adaptive(start, cfg, |xs| {
            let inner = other.disp.sample(xs.len());
            let pts: Vec<f64> = xs.iter().zip(&inner).map(|(x, v)| x + v).collect();
            let mut outer = vec![0.0; xs.len()];
            self.disp.eval_many(&pts, &mut outer);
            Ok(inner.iter().zip(&outer).map(|(a, b)| a + b).collect())
        })?;
        Self::from_displacement(u, cfg)
    }

    /// Solves `φ̃(x) = y` for one target.
    pub fn preimage(&self, y: f64, cfg: &Config) -> Result<f64> {
        let bound = self.disp.abs_sum();
        let x0 = y - self.disp.eval(y);
        solve_increasing(
            |x| {
                let (v, d) = self.disp.eval_d(x);
                (x + v, 1.0 + d)
            },
            y,
            y - bound - 1e-12,
            y + bound + 1e-12,
            x0,
            cfg.newton_tol,
            cfg.newton_max_iter,
        )
    }

    /// Inverse diffeomorphism, from per-node Newton solves on the monotone
    /// lift followed by a spectral refit.
    pub fn invert(&self, cfg: &Config) -> Result<CircleDiffeo> {
        if self.is_identity() {
            return Ok(Self::identity());
        }
        if let Some(c) = self.as_rotation() {
            return Ok(Self::rotation(-c));
        }
        let u = fit_adaptive(4 * (self.mode_count() + 1), cfg, |ys| {
            ys.iter()
                .map(|&y| self.preimage(y, cfg).map(|x| x - y))
                .collect()
        })?;
        Self::from_displacement(u, cfg)
    }

    pub fn metrics(&self) -> DiffeoMetrics {
        if let Some(c) = self.as_rotation() {
            return DiffeoMetrics {
                sup_displacement: c.abs(),
                inf_derivative: 1.0,
                chordal_sup: 2.0 * (0.5 * c).sin().abs(),
            };
        }
        let m = grid_size(CACHE_POINTS, self.mode_count(), 16);
        let h = TAU / m as f64;
        let du = self.disp.derivative();
        let ddu = du.derivative();

        let u = self.disp.sample(m);
        let (j, _) = argmax(u.iter().map(|v| v.abs()));
        let x = polish_critical(&du, &ddu, TAU * j as f64 / m as f64, h);
        let sup = u[j].abs().max(self.disp.eval(x).abs());

        let d = du.sample(m);
        let (j, _) = argmax(d.iter().map(|v| -v));
        let dddu = ddu.derivative();
        let x = polish_critical(&ddu, &dddu, TAU * j as f64 / m as f64, h);
        let inf = 1.0 + d[j].min(du.eval(x));

        let chordal = if sup <= PI {
            2.0 * (0.5 * sup).sin()
        } else {
            u.iter()
                .map(|v| 2.0 * (0.5 * v).sin().abs())
                .fold(0.0, f64::max)
        };
        DiffeoMetrics {
            sup_displacement: sup,
            inf_derivative: inf,
            chordal_sup: chordal,
        }
    }

    /// `sup |u| < ε · inf φ̃'`, measured with the lift displacement, and
    /// `sup |u| < π` so that the canonical branch is meaningful.
    pub fn in_neighborhood(&self, eps: f64) -> bool {
        let m = self.metrics();
        m.sup_displacement < PI && m.sup_displacement < eps * m.inf_derivative
    }

    /// Smallest arc outside of which `|u| ≤ tol` and `|u'| ≤ tol`.
    pub fn support(&self, tol: f64) -> Support {
        let m = grid_size(4096, self.mode_count(), 16);
        let du = self.disp.derivative();
        let u = self.disp.sample(m);
        let d = du.sample(m);
        let active: Vec<bool> = u
            .iter()
            .zip(&d)
            .map(|(u, d)| u.abs() > tol || d.abs() > tol)
            .collect();
        let Some(first) = active.iter().position(|&a| a) else {
            return Support::Empty;
        };
        // Circular runs of inactive nodes, as (start, len), scanning from an
        // active node.
        let mut gaps: Vec<(usize, usize)> = Vec::new();
        let mut run: Option<(usize, usize)> = None;
        for step in 1..=m {
            let j = (first + step) % m;
            if active[j] {
                if let Some(r) = run.take() {
                    gaps.push(r);
                }
            } else {
                run = Some(match run {
                    Some((s, l)) => (s, l + 1),
                    None => (j, 1),
                });
            }
        }
        let Some(longest) = gaps.iter().map(|g| g.1).max() else {
            return Support::Full;
        };
        let level = |x: f64| {
            let (v, dv) = self.disp.eval_d(x);
            v.abs().max(dv.abs()) - tol
        };
        let node = |j: usize| TAU * j as f64 / m as f64;
        let mut best: Option<IntervalS1> = None;
        for &(start, len) in gaps.iter().filter(|g| g.1 == longest) {
            // last active node before the gap and first one after it
            let before = (start + m - 1) % m;
            let after = (start + len) % m;
            let left = boundary(&level, node(after), node(after) - TAU / m as f64);
            let lo = node(before);
            let right = boundary(&level, lo, lo + TAU / m as f64);
            let mut len_arc = right - left;
            len_arc = len_arc.rem_euclid(TAU);
            if len_arc == 0.0 || len_arc >= TAU - 1e-12 {
                return Support::Full;
            }
            let arc = match IntervalS1::new(left, left + len_arc) {
                Ok(a) => a,
                Err(_) => return Support::Full,
            };
            if best.is_none_or(|b| arc.a() < b.a()) {
                best = Some(arc);
            }
        }
        best.map_or(Support::Full, Support::Arc)
    }

    /// Sup-norm distance between the circle maps, on a grid fine enough for
    /// both displacements. Lifts differing by a deck shift are at distance 0.
    pub fn sup_distance(&self, other: &CircleDiffeo) -> f64 {
        let diff = self.disp.sub(&other.disp);
        let m = grid_size(CACHE_POINTS, diff.degree(), 4);
        let s = diff.sample(m);
        let shift = TAU * (s[0] / TAU).round();
        s.iter().map(|v| (v - shift).abs()).fold(0.0, f64::max)
    }

    /// Scales the displacement, `x ↦ x + λ u(x)`.
    pub fn interpolate(&self, lambda: f64) -> CircleDiffeo {
        Self::trusted(self.disp.scaled(lambda))
    }
}

fn argmax(it: impl Iterator<Item = f64>) -> (usize, f64) {
    it.enumerate().fold(
        (0, f64::NEG_INFINITY),
        |b, (i, v)| if v > b.1 { (i, v) } else { b },
    )
}

// Newton on f' = 0 started at a grid extremum; stays within one spacing.
fn polish_critical(df: &TrigPoly, ddf: &TrigPoly, x0: f64, h: f64) -> f64 {
    let mut x = x0;
    for _ in 0..8 {
        let dd = ddf.eval(x);
        if dd == 0.0 {
            break;
        }
        let next = x - df.eval(x) / dd;
        if (next - x0).abs() > h {
            return x0;
        }
        if (next - x).abs() < 1e-15 {
            return next;
        }
        x = next;
    }
    x
}

// Bisection for the crossing of `level` between an active and an inactive point.
fn boundary(level: &impl Fn(f64) -> f64, active: f64, inactive: f64) -> f64 {
    let (mut a, mut b) = (active, inactive);
    if level(b) > 0.0 {
        return b;
    }
    for _ in 0..50 {
        let mid = 0.5 * (a + b);
        if level(mid) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    a
}
