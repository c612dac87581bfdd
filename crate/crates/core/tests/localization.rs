use std::f64::consts::{PI, TAU};

use diffloc::localize::{interpolation_path, localize, psi, slice_factorize, word_product};
use diffloc::sample::random_diffeo;
use diffloc::trig::fit_adaptive;
use diffloc::{CircleDiffeo, Config, Covering, IntervalS1, LocalizedWord, PartitionOfUnity};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

// arcs of length π starting at 0, 2π/3, 4π/3
fn three_arcs() -> PartitionOfUnity {
    let arcs = (0..3)
        .map(|k| {
            let a = TAU * k as f64 / 3.0;
            IntervalS1::new(a, a + PI).unwrap()
        })
        .collect();
    PartitionOfUnity::build(&Covering::new(arcs).unwrap(), 0.05).unwrap()
}

fn cfg() -> Config {
    Config {
        modes: 256,
        ..Config::default()
    }
}

fn admissible(seed: u64, p: &PartitionOfUnity, fraction: f64) -> CircleDiffeo {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eps = p.epsilon_max(1.0);
    // sup|u'| ≤ 1/2 keeps inf φ' ≥ 1/2, so the neighbourhood needs sup|u| < ε/2
    random_diffeo(&mut rng, 16, 5.0, fraction * 0.5 * eps, &cfg()).unwrap()
}

// Grid evaluation of a bump partition built here from scratch.
fn reference_weights(p: &PartitionOfUnity, x: f64) -> Vec<f64> {
    let bumps: Vec<f64> = p
        .supports()
        .iter()
        .map(|arc| {
            let mut y = x;
            while y < arc.a() {
                y += TAU;
            }
            while y >= arc.a() + TAU {
                y -= TAU;
            }
            if y >= arc.b() {
                return 0.0;
            }
            let s = (2.0 * y - arc.a() - arc.b()) / (arc.b() - arc.a());
            (-1.0 / (1.0 - s * s)).exp()
        })
        .collect();
    let total: f64 = bumps.iter().sum();
    bumps.iter().map(|b| b / total).collect()
}

#[test]
fn partitions_sum_to_one() {
    let two = PartitionOfUnity::build(&Covering::uniform(2, 1.5 * PI, 0.0).unwrap(), 0.1).unwrap();
    for p in [two, three_arcs()] {
        for i in 0..4096 {
            let x = TAU * i as f64 / 4096.0;
            let w: Vec<f64> = (0..p.len()).map(|k| p.weight(k, x).0).collect();
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            assert!(w.iter().all(|&v| (0.0..=1.0).contains(&v)));
            for (a, b) in w.iter().zip(reference_weights(&p, x)) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn weights_vanish_near_interval_ends() {
    let p = three_arcs();
    for k in 0..p.len() {
        let arc = p.interval(k);
        assert!(p.margins()[k] > 0.0);
        for i in 0..20000 {
            let x = TAU * i as f64 / 20000.0;
            if p.weight(k, x).0 > 0.0 {
                let y = arc.lift(x);
                let gap = (y - arc.a()).min(arc.b() - y);
                assert!(arc.contains_point(x) && gap >= p.margins()[k] - 1e-12);
            }
        }
    }
}

#[test]
fn derivative_sum_is_measured() {
    let p = three_arcs();
    let h = 1e-6;
    let mut sup = 0.0f64;
    for i in 0..20000 {
        let x = TAU * i as f64 / 20000.0;
        let s: f64 = (0..p.len())
            .map(|k| ((p.weight(k, x + h).0 - p.weight(k, x - h).0) / (2.0 * h)).abs())
            .sum();
        sup = sup.max(s);
    }
    assert!((p.derivative_sum_sup() - sup).abs() < 1e-3 * sup);
    let eps = p.epsilon_max(0.9);
    let expect = 0.9 * (1.0 / p.derivative_sum_sup()).min(0.05 * PI);
    assert!((eps - expect).abs() < 1e-15);
}

#[test]
fn localization_round_trip() {
    let c = cfg();
    let p = three_arcs();
    for seed in 0..20 {
        let phi = admissible(seed, &p, 0.9);
        assert!(phi.in_neighborhood(p.epsilon_max(1.0)));
        let w = localize(&phi, &p, &c).unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(w.support_violation(1e-8), None, "seed {seed}");
        let r = word_product(&w, &c).unwrap().sup_distance(&phi);
        assert!(r < 1e-8, "seed {seed}: {r}");
    }
    let w = localize(&CircleDiffeo::identity(), &p, &c).unwrap();
    assert!(w.factors.iter().all(|f| f.diffeo.is_identity()));
}

#[test]
fn telescoping_and_derivative_bound() {
    let c = cfg();
    let p = three_arcs();
    for seed in 100..105 {
        let phi = admissible(seed, &p, 0.95);
        let w = localize(&phi, &p, &c).unwrap();
        let m = phi.metrics();
        let bound = m.inf_derivative.min(1.0) - p.derivative_sum_sup() * m.sup_displacement;
        assert!(bound > 0.0);
        let mut prev = psi(&phi, &p, 0, &c).unwrap();
        assert!(prev.is_identity());
        for k in 1..=p.len() {
            let cur = psi(&phi, &p, k, &c).unwrap();
            assert!(cur.metrics().inf_derivative >= bound - 1e-8);
            let step = w.factors[k - 1].diffeo.compose(&prev, &c).unwrap();
            assert!(step.sup_distance(&cur) < 1e-9);
            prev = cur;
        }
        assert!(prev.sup_distance(&phi) == 0.0);
    }
}

#[test]
fn first_psi_is_weighted_displacement() {
    let c = cfg();
    let p = three_arcs();
    let e0 = 0.5 * p.epsilon_max(1.0);
    let phi = CircleDiffeo::make(&[], &[e0], 0.0, &c).unwrap();
    let one = psi(&phi, &p, 1, &c).unwrap();
    for i in 0..500 {
        let x = TAU * i as f64 / 500.0;
        let want = x + p.weight(0, x).0 * e0 * x.sin();
        assert!((one.evaluate(x) - want).abs() < 1e-11);
    }
}

#[test]
fn locally_supported_diffeo_is_its_own_first_factor() {
    // λ_1 ≡ 1 on (0.283π, 0.717π)
    let c = cfg();
    let p = three_arcs();
    let bump = |x: f64| {
        let s = (x.rem_euclid(TAU) - 1.55) / 0.45;
        if s.abs() >= 1.0 {
            0.0
        } else {
            0.02 * (-1.0 / (1.0 - s * s)).exp()
        }
    };
    let u = fit_adaptive(1024, &c, |xs| Ok(xs.iter().map(|&x| bump(x)).collect())).unwrap();
    let phi = CircleDiffeo::from_displacement(u, &c).unwrap();
    let w = localize(&phi, &p, &c).unwrap();
    assert!(w.factors[0].diffeo.sup_distance(&phi) < 1e-10);
    for f in &w.factors[1..] {
        assert!(f.diffeo.sup_distance(&CircleDiffeo::identity()) < 1e-10);
    }
}

#[test]
fn localizing_maps_are_lipschitz_along_a_path() {
    let c = cfg();
    let p = three_arcs();
    let phi = admissible(7, &p, 0.9);
    let t = 0.5;
    let base = localize(&interpolation_path(&phi, t).unwrap(), &p, &c).unwrap();
    for k in 0..p.len() {
        let ratios: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&h| {
                let moved = localize(&interpolation_path(&phi, t + h).unwrap(), &p, &c).unwrap();
                moved.factors[k]
                    .diffeo
                    .sup_distance(&base.factors[k].diffeo)
                    / h
            })
            .collect();
        let (lo, hi) = ratios
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
        assert!(hi.is_finite() && hi < 2.0 * lo, "{ratios:?}");
    }
}

#[test]
fn interpolation_scales_displacement() {
    let c = cfg();
    let phi = CircleDiffeo::make(&[], &[0.3], 0.0, &c).unwrap();
    assert!(interpolation_path(&phi, 0.0).unwrap().is_identity());
    assert_eq!(interpolation_path(&phi, 1.0).unwrap(), phi);
    let half = interpolation_path(&phi, 0.5).unwrap();
    assert_eq!(half, CircleDiffeo::make(&[], &[0.15], 0.0, &c).unwrap());
    let big = admissible(3, &three_arcs(), 40.0);
    for l in [0.1, 0.4, 0.8] {
        let s = interpolation_path(&big, l)
            .unwrap()
            .metrics()
            .sup_displacement;
        assert!((s - l * big.metrics().sup_displacement).abs() < 1e-12);
    }
}

#[test]
fn rotation_slices_into_equal_rotations() {
    let c = cfg();
    let p = three_arcs();
    let eps = p.epsilon_max(1.0);
    let slices = slice_factorize(&CircleDiffeo::rotation(3.0), &p, &c).unwrap();
    let n = 2f64.powf((3.0 / eps).log2().ceil()) as usize;
    assert_eq!(slices.len(), n);
    for s in &slices {
        assert!((s.as_rotation().unwrap() - 3.0 / n as f64).abs() < 1e-15);
        assert!(s.in_neighborhood(eps));
    }
}

fn compose_all(fs: &[CircleDiffeo], c: &Config) -> CircleDiffeo {
    fs.iter().fold(CircleDiffeo::identity(), |acc, f| {
        f.compose(&acc, c).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn slicing_then_localizing_reconstructs(seed in any::<u64>()) {
        let c = cfg();
        let p = three_arcs();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = random_diffeo(&mut rng, 8, 3.0, 1.5, &c).unwrap();
        let slices = slice_factorize(&phi, &p, &c).unwrap();
        let eps = p.epsilon_max(1.0);
        prop_assert!(slices.iter().all(|s| s.in_neighborhood(eps)));
        prop_assert!(compose_all(&slices, &c).sup_distance(&phi) < 1e-8);
        let mut word = LocalizedWord::default();
        for s in &slices {
            word.extend(&localize(s, &p, &c).unwrap());
        }
        prop_assert_eq!(word.support_violation(1e-8), None);
        prop_assert!(word_product(&word, &c).unwrap().sup_distance(&phi) < 1e-7);
    }
}
