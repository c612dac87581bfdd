//! Factorization of near-identity diffeomorphisms into pieces localized in
//! the arcs of a covering, and the slicing that brings arbitrary
//! diffeomorphisms into that neighbourhood.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::diffeo::{CircleDiffeo, Support};
use crate::error::{Error, Result};
use crate::interval::IntervalS1;
use crate::partition::PartitionOfUnity;
use crate::roots::solve_increasing;
use crate::trig::{fit_adaptive, TrigPoly};

/// Smallest grid on which localized factors are refitted; the bump profile
/// needs a few hundred harmonics to reach the refit tolerance.
const LOCALIZED_GRID: usize = 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizedFactor {
    pub interval: IntervalS1,
    pub diffeo: CircleDiffeo,
}

/// Ordered factors; the first factor acts first.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LocalizedWord {
    pub factors: Vec<LocalizedFactor>,
}

impl LocalizedWord {
    pub fn new(factors: Vec<LocalizedFactor>) -> Self {
        Self { factors }
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn extend(&mut self, other: &LocalizedWord) {
        self.factors.extend(other.factors.iter().cloned());
    }

    /// Reversed word of inverted factors; each inverse keeps its interval.
    pub fn inverse(&self, cfg: &Config) -> Result<LocalizedWord> {
        let factors = self
            .factors
            .iter()
            .rev()
            .map(|f| {
                Ok(LocalizedFactor {
                    interval: f.interval,
                    diffeo: f.diffeo.invert(cfg)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(LocalizedWord { factors })
    }

    /// Index of the first factor whose support at `tol` leaves its interval.
    pub fn support_violation(&self, tol: f64) -> Option<usize> {
        self.factors
            .iter()
            .position(|f| match f.diffeo.support(tol) {
                Support::Empty => false,
                Support::Full => true,
                Support::Arc(arc) => !f.interval.contains(&arc),
            })
    }

    /// Largest `sup |u|` over the factors.
    pub fn max_factor_displacement(&self) -> f64 {
        self.factors
            .iter()
            .map(|f| f.diffeo.metrics().sup_displacement)
            .fold(0.0, f64::max)
    }

    /// Ordered composition, first factor acting first.
    ///
    /// Grid points are pushed through every factor and only the final
    /// displacement is refitted, so intermediate products are never
    /// truncated.
    pub fn product(&self, cfg: &Config) -> Result<CircleDiffeo> {
        let active: Vec<&TrigPoly> = self
            .factors
            .iter()
            .map(|f| f.diffeo.displacement())
            .filter(|u| !u.is_zero())
            .collect();
        match active.len() {
            0 => return Ok(CircleDiffeo::identity()),
            1 => return CircleDiffeo::from_displacement(active[0].clone(), cfg),
            _ => {}
        }
        let u = fit_adaptive(LOCALIZED_GRID, cfg, |xs| {
            let mut ys = xs.to_vec();
            let mut step = vec![0.0; xs.len()];
            for u in &active {
                u.eval_many(&ys, &mut step);
                for (y, s) in ys.iter_mut().zip(&step) {
                    *y += s;
                }
            }
            Ok(ys.iter().zip(xs).map(|(y, x)| y - x).collect())
        })?;
        CircleDiffeo::from_displacement(u, cfg)
    }
}

pub fn word_product(word: &LocalizedWord, cfg: &Config) -> Result<CircleDiffeo> {
    word.product(cfg)
}

/// `Ψ_k[φ](x) = x + Σ_{i<k} λ_i(x) u(x)` with `k` counted from zero, so
/// `psi(.., 0)` is the identity and `psi(.., m)` is `φ`.
///
/// Fails when the derivative lower bound
/// `inf min(1, φ̃') - sup Σ|λ'| · sup |u|` is not positive.
pub fn psi(
    phi: &CircleDiffeo,
    p: &PartitionOfUnity,
    k: usize,
    cfg: &Config,
) -> Result<CircleDiffeo> {
    if k > p.len() {
        return Err(Error::InvalidArgument(format!(
            "index {k} exceeds partition size {}",
            p.len()
        )));
    }
    if k == 0 || phi.is_identity() {
        return Ok(CircleDiffeo::identity());
    }
    let bound = derivative_lower_bound(phi, p);
    if bound <= 0.0 {
        return Err(Error::NotADiffeomorphism {
            min_derivative: bound,
        });
    }
    if k == p.len() {
        return Ok(phi.clone());
    }
    let u = phi.displacement();
    let disp = fit_adaptive((4 * (u.degree() + 1)).max(LOCALIZED_GRID), cfg, |xs| {
        let values = u.sample(xs.len());
        Ok(xs
            .iter()
            .zip(values)
            .map(|(&x, v)| p.partial_sum(k, x).0 * v)
            .collect())
    })?;
    CircleDiffeo::from_displacement(disp, cfg)
}

/// `inf min(1, φ̃') - sup Σ|λ'| · sup |u|`, the lower bound every `Ψ_k[φ]'`
/// satisfies.
pub fn derivative_lower_bound(phi: &CircleDiffeo, p: &PartitionOfUnity) -> f64 {
    let m = phi.metrics();
    m.inf_derivative.min(1.0) - p.derivative_sum_sup() * m.sup_displacement
}

/// Splits `φ` into `Ξ_1, …, Ξ_m` with `Ξ_k = Ψ_k ∘ Ψ_{k-1}⁻¹` supported in
/// the `k`-th covering arc, so that `Ξ_m ∘ … ∘ Ξ_1 = φ`.
///
/// At a node `y`, with `x = Ψ_{k-1}⁻¹(y)`, the displacement of `Ξ_k` is
/// exactly `λ_k(x) u(x)`; it is sampled that way and refitted once.
pub fn localize(phi: &CircleDiffeo, p: &PartitionOfUnity, cfg: &Config) -> Result<LocalizedWord> {
    let eps = p.epsilon_max(1.0);
    let metrics = phi.metrics();
    if !(metrics.sup_displacement < PI && metrics.sup_displacement < eps * metrics.inf_derivative) {
        return Err(Error::OutsideNeighborhood {
            displacement: metrics.sup_displacement,
            bound: eps * metrics.inf_derivative,
        });
    }
    let intervals = p.cover().intervals();
    if phi.is_identity() {
        return Ok(LocalizedWord::new(
            intervals
                .iter()
                .map(|&interval| LocalizedFactor {
                    interval,
                    diffeo: CircleDiffeo::identity(),
                })
                .collect(),
        ));
    }
    let u = phi.displacement();
    let bound = u.abs_sum() + 1e-12;
    let start = (4 * (u.degree() + 1)).max(LOCALIZED_GRID);
    let mut factors = Vec::with_capacity(p.len());
    for (k, &interval) in intervals.iter().enumerate() {
        let disp = fit_adaptive(start, cfg, |ys| {
            ys.iter()
                .map(|&y| {
                    let x = if k == 0 {
                        y
                    } else {
                        solve_increasing(
                            |x| {
                                let (s, ds) = p.partial_sum(k, x);
                                let (v, dv) = u.eval_d(x);
                                (x + s * v, 1.0 + ds * v + s * dv)
                            },
                            y,
                            y - bound,
                            y + bound,
                            y - p.partial_sum(k, y).0 * u.eval(y),
                            cfg.newton_tol,
                            cfg.newton_max_iter,
                        )?
                    };
                    Ok(p.weight(k, x).0 * u.eval(x))
                })
                .collect()
        })?;
        factors.push(LocalizedFactor {
            interval,
            diffeo: CircleDiffeo::from_displacement(disp, cfg)?,
        });
    }
    Ok(LocalizedWord::new(factors))
}

/// `x ↦ x + λ (φ̃(x) - x)` for `λ ∈ [0, 1]`.
pub fn interpolation_path(phi: &CircleDiffeo, lambda: f64) -> Result<CircleDiffeo> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidArgument(format!(
            "λ = {lambda} outside [0, 1]"
        )));
    }
    Ok(phi.interpolate(lambda))
}

/// Writes `φ = f_{n-1} ∘ … ∘ f_0` with `f_k = φ_{(k+1)/n} ∘ φ_{k/n}⁻¹`, the
/// number of slices doubling until every factor lies in the admissible
/// neighbourhood of `p`. Factors are returned in the order they act.
pub fn slice_factorize(
    phi: &CircleDiffeo,
    p: &PartitionOfUnity,
    cfg: &Config,
) -> Result<Vec<CircleDiffeo>> {
    let sup = phi.metrics().sup_displacement;
    if sup >= PI {
        return Err(Error::InvalidArgument(format!(
            "sup |u| = {sup} is not below π"
        )));
    }
    let eps = p.epsilon_max(1.0);
    if phi.in_neighborhood(eps) {
        return Ok(vec![phi.clone()]);
    }
    // each slice moves points by exactly u(x)/n, so sup|u|/n < ε is necessary
    let mut n = 2;
    while sup / n as f64 >= eps && n <= cfg.slice_cap {
        n *= 2;
    }
    while n <= cfg.slice_cap {
        let slices = slices(phi, n, cfg)?;
        if slices.iter().all(|s| s.in_neighborhood(eps)) {
            return Ok(slices);
        }
        n *= 2;
    }
    Err(Error::SlicingFailure {
        slices: cfg.slice_cap,
    })
}

fn slices(phi: &CircleDiffeo, n: usize, cfg: &Config) -> Result<Vec<CircleDiffeo>> {
    let nf = n as f64;
    if let Some(c) = phi.as_rotation() {
        return Ok(vec![CircleDiffeo::rotation(c / nf); n]);
    }
    let u = phi.displacement();
    let bound = u.abs_sum() + 1e-12;
    let start = 4 * (u.degree() + 1);
    (0..n)
        .map(|k| {
            let t = k as f64 / nf;
            let disp = fit_adaptive(start, cfg, |ys| {
                ys.iter()
                    .map(|&y| {
                        let x = solve_increasing(
                            |x| {
                                let (v, dv) = u.eval_d(x);
                                (x + t * v, 1.0 + t * dv)
                            },
                            y,
                            y - bound,
                            y + bound,
                            y - t * u.eval(y),
                            cfg.newton_tol,
                            cfg.newton_max_iter,
                        )?;
                        Ok(u.eval(x) / nf)
                    })
                    .collect()
            })?;
            CircleDiffeo::from_displacement(disp, cfg)
        })
        .collect()
}

/// Three proper arcs covering `i` such that the closure of the third lies
/// in the complement of `j` and each of the first two, joined with `j`, fits
/// in a proper arc. Returned as `[I_1, I_2, I_3]`; together they cover `i`,
/// not the whole circle.
pub fn three_interval_cover(i: &IntervalS1, j: &IntervalS1) -> Result<[IntervalS1; 3]> {
    let jc = j.complement();
    if !i.contains(&jc) {
        return Err(Error::NotApplicable);
    }
    let l = jc.length();
    if l / 4.0 < 1e-9 {
        return Err(Error::Infeasible(format!(
            "complement of J has length {l:.3e}"
        )));
    }
    // J' = (d, e) inside I in I's frame
    let d = i.lift(jc.a());
    let e = d + l;
    let i1 = IntervalS1::new(i.a(), d + 0.5 * l)?;
    let i3 = IntervalS1::new(d + 0.25 * l, e - 0.25 * l)?;
    let i2 = IntervalS1::new(e - 0.5 * l, i.b())?;

    let slack = 1e-9;
    let hull1 = IntervalS1::new(j.a() - slack, j.a() + j.length() + 0.5 * l + slack)?;
    let hull2 = IntervalS1::new(e - 0.5 * l - slack, e + j.length() + slack)?;
    let ok = jc.contains_closure(&i3)
        && hull1.contains(&i1)
        && hull1.contains(j)
        && hull2.contains(&i2)
        && hull2.contains(j);
    if !ok {
        return Err(Error::Infeasible("containment check failed".into()));
    }
    let arcs = [i1, i2, i3];
    let n = 4096;
    let covered = (1..n).all(|s| {
        let x = i.a() + i.length() * s as f64 / n as f64;
        arcs.iter().any(|a| a.contains_point(x))
    });
    if !covered {
        return Err(Error::Infeasible("arcs leave part of I uncovered".into()));
    }
    Ok([arcs[0], arcs[1], arcs[2]])
}
