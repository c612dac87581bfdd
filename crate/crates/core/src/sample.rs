//! Seeded random test objects shared by the property suites, the CLI
//! `check` command and the benchmarks.

use std::f64::consts::TAU;

use rand::Rng;

use crate::config::Config;
use crate::diffeo::CircleDiffeo;
use crate::error::Result;
use crate::moebius::{IwasawaCoords, MoebiusElement};
use crate::trig::TrigPoly;

/// Random smooth diffeomorphism with `modes` harmonics decaying like
/// `exp(-k/decay)`, scaled so that `sup |u| ≈ sup_target` while
/// `sup |u'| ≤ 1/2`.
pub fn random_diffeo<R: Rng>(
    rng: &mut R,
    modes: usize,
    decay: f64,
    sup_target: f64,
    cfg: &Config,
) -> Result<CircleDiffeo> {
    let cos: Vec<f64> = (1..=modes)
        .map(|k| rng.gen_range(-1.0..1.0) * (-(k as f64) / decay).exp())
        .collect();
    let sin: Vec<f64> = (1..=modes)
        .map(|k| rng.gen_range(-1.0..1.0) * (-(k as f64) / decay).exp())
        .collect();
    let mean = rng.gen_range(-0.5..0.5) * (-1.0 / decay).exp();
    let u = TrigPoly::from_cos_sin(mean, &cos, &sin);
    let m = (16 * (modes + 1)).next_power_of_two().max(1024);
    let sup = u.sample(m).iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let dsup = u
        .derivative()
        .sample(m)
        .iter()
        .fold(0.0f64, |a, v| a.max(v.abs()));
    let scale = (sup_target / sup).min(0.5 / dsup);
    CircleDiffeo::from_displacement(u.scaled(scale), cfg)
}

/// `T(p) D(τ) R(t)` with `|p| ≤ p_max`, `|τ| ≤ tau_max`, `t ∈ [0, 2π)`.
pub fn random_moebius<R: Rng>(rng: &mut R, p_max: f64, tau_max: f64) -> MoebiusElement {
    MoebiusElement::from_iwasawa(&IwasawaCoords {
        p: rng.gen_range(-p_max..=p_max),
        tau: rng.gen_range(-tau_max..=tau_max),
        t: rng.gen_range(0.0..TAU),
    })
}

/// Random element with matrix entries of moderate size.
pub fn random_matrix_element<R: Rng>(rng: &mut R) -> MoebiusElement {
    loop {
        let m = [
            [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)],
            [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)],
        ];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det > 0.1 {
            return MoebiusElement::from_matrix(m).expect("positive determinant");
        }
    }
}
