use std::f64::consts::{PI, TAU};

use diffloc::cocycle::{
    bott_cocycle, bott_cocycle_with, cocycle_from_section, cocycle_identity_defect,
    cover_trivialize, sign_cocycle, SignSection,
};
use diffloc::moebius::Mat2;
use diffloc::sample::{random_diffeo, random_matrix_element};
use diffloc::{CircleDiffeo, Config, CoverElement, MoebiusElement};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut m = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    m
}

fn diff(a: &Mat2, b: &Mat2) -> f64 {
    (0..4)
        .map(|i| (a[i / 2][i % 2] - b[i / 2][i % 2]).abs())
        .fold(0.0, f64::max)
}

fn triples(seed: u64, n: usize) -> Vec<[MoebiusElement; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            [
                random_matrix_element(&mut rng),
                random_matrix_element(&mut rng),
                random_matrix_element(&mut rng),
            ]
        })
        .collect()
}

#[test]
fn sign_cocycle_is_exact() {
    for [g, h, k] in triples(1, 1000) {
        assert_eq!(cocycle_identity_defect(sign_cocycle, &g, &h, &k), 0.0);
        let v = sign_cocycle(&g, &h);
        assert!(v == Complex64::new(1.0, 0.0) || v == Complex64::new(-1.0, 0.0));
    }
}

#[test]
fn sign_cocycle_examples() {
    let one = Complex64::new(1.0, 0.0);
    let r = MoebiusElement::rotation(1.5 * PI);
    assert_eq!(sign_cocycle(&r, &r), -one);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        let g = random_matrix_element(&mut rng);
        assert_eq!(sign_cocycle(&MoebiusElement::identity(), &g), one);
        let a = MoebiusElement::translation(rng.gen_range(-5.0..5.0));
        let b = MoebiusElement::translation(rng.gen_range(-5.0..5.0));
        assert_eq!(sign_cocycle(&a, &b), one);
    }
}

#[test]
fn representatives_project_back() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let g = random_matrix_element(&mut rng);
        let m = SignSection.representative(&g);
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        assert!((det - 1.0).abs() < 1e-12);
        assert!(MoebiusElement::from_matrix(m).unwrap().distance(&g) < 1e-12);
        assert!(g.iwasawa().t < TAU);
    }
}

#[test]
fn coboundaries_and_perturbations() {
    let b = |g: &MoebiusElement| {
        let c = g.iwasawa();
        Complex64::from_polar(1.0, c.p + 0.3 * c.tau + c.t.sin())
    };
    let omega = |g: &MoebiusElement, h: &MoebiusElement| cocycle_from_section(b, g, h);
    for [g, h, k] in triples(4, 100) {
        assert!(cocycle_identity_defect(omega, &g, &h, &k) < 1e-12);
        assert!((omega(&g, &h).norm() - 1.0).abs() < 1e-12);
    }
    let g0 = MoebiusElement::translation(0.5);
    let bent = |g: &MoebiusElement, h: &MoebiusElement| {
        let v = sign_cocycle(g, h);
        if g.distance(&g0) < 1e-12 {
            v * Complex64::from_polar(1.0, 0.1)
        } else {
            v
        }
    };
    let worst = triples(5, 20)
        .iter()
        // in the middle slot the perturbed value enters the identity once
        .map(|[g, _, k]| cocycle_identity_defect(bent, g, &g0, k))
        .fold(0.0, f64::max);
    assert!(worst > 0.09);
}

#[test]
fn trivialization_is_a_homomorphism() {
    let id = [[1.0, 0.0], [0.0, 1.0]];
    assert!(diff(&cover_trivialize(&CoverElement::identity()), &id) < 1e-15);
    let full = CoverElement::new(MoebiusElement::identity(), TAU).unwrap();
    assert!(diff(&cover_trivialize(&full), &[[-1.0, 0.0], [0.0, -1.0]]) < 1e-10);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..100 {
        let a = CoverElement::make(&random_matrix_element(&mut rng), rng.gen_range(-3..=3));
        let b = CoverElement::make(&random_matrix_element(&mut rng), rng.gen_range(-3..=3));
        let lhs = cover_trivialize(&a.compose(&b));
        let rhs = mul(&cover_trivialize(&a), &cover_trivialize(&b));
        assert!(
            diff(&lhs, &rhs)
                < 1e-10 * (1.0 + rhs.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())))
        );
        let ta = cover_trivialize(&a);
        assert!(diff(&cover_trivialize(&a.deck(2)), &ta) < 1e-12);
        let neg = ta.map(|r| r.map(|v| -v));
        assert!(diff(&cover_trivialize(&a.deck(1)), &neg) < 1e-12);
        assert!(
            MoebiusElement::from_matrix(ta)
                .unwrap()
                .distance(&a.project())
                < 1e-12
        );
    }
}

#[test]
fn trivialization_agrees_with_sign_section_near_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let m = [
            [1.0 + rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2)],
            [rng.gen_range(-0.2..0.2), 1.0 + rng.gen_range(-0.2..0.2)],
        ];
        let g = MoebiusElement::from_matrix(m).unwrap();
        // branch 0 near the identity, off the t-wraparound of the section
        if g.iwasawa().t > PI {
            continue;
        }
        let a = CoverElement::make(&g, 0);
        assert!(diff(&cover_trivialize(&a), &SignSection.representative(&g)) < 1e-12);
    }
}

fn diffeos(seed: u64) -> Vec<CircleDiffeo> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..3)
        .map(|_| random_diffeo(&mut rng, 6, 3.0, 0.6, &Config::default()).unwrap())
        .collect()
}

// trapezoid rule evaluated with direct trig sums
fn reference_bott(phi: &CircleDiffeo, psi: &CircleDiffeo, n: usize) -> f64 {
    let terms = |d: &CircleDiffeo, x: f64| {
        let u = d.displacement();
        let (mut v, mut d1, mut d2) = (u.mean(), 0.0, 0.0);
        for (k, (a, b)) in u.cos_coeffs().iter().zip(u.sin_coeffs()).enumerate() {
            let k = (k + 1) as f64;
            let (s, c) = (k * x).sin_cos();
            v += a * c + b * s;
            d1 += k * (b * c - a * s);
            d2 -= k * k * (a * c + b * s);
        }
        (x + v, 1.0 + d1, d2)
    };
    (0..n)
        .map(|i| {
            let x = TAU * i as f64 / n as f64;
            let (y, dp, ddp) = terms(psi, x);
            let (_, df, _) = terms(phi, y);
            df.ln() * ddp / dp
        })
        .sum::<f64>()
        * TAU
        / n as f64
}

#[test]
fn bott_cocycle_identity() {
    let cfg = Config::default();
    for seed in 0..50 {
        let v = diffeos(seed);
        let (f, g, h) = (&v[0], &v[1], &v[2]);
        let fg = f.compose(g, &cfg).unwrap();
        let gh = g.compose(h, &cfg).unwrap();
        let defect =
            bott_cocycle(f, g) + bott_cocycle(&fg, h) - bott_cocycle(f, &gh) - bott_cocycle(g, h);
        assert!(defect.abs() < 1e-8, "seed {seed}: {defect}");
    }
    let v = diffeos(99);
    let b = bott_cocycle(&v[0], &v[1]);
    assert!((b - bott_cocycle_with(&v[0], &v[1], 4096)).abs() < 1e-12);
    assert!((b - reference_bott(&v[0], &v[1], 4096)).abs() < 1e-10);
    assert!(b.abs() > 1e-6);
}

#[test]
fn bott_vanishes_on_rotations_and_identity() {
    let v = diffeos(5);
    let rot = CircleDiffeo::rotation(0.8);
    assert_eq!(bott_cocycle(&CircleDiffeo::identity(), &v[0]), 0.0);
    assert_eq!(bott_cocycle(&v[0], &CircleDiffeo::identity()), 0.0);
    assert_eq!(bott_cocycle(&rot, &v[0]), 0.0);
    assert_eq!(bott_cocycle(&v[0], &rot), 0.0);
}
