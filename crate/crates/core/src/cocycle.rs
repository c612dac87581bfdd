//! Scalar 2-cocycles: those induced by sections, the `±1` cocycle of the
//! double cover `SL(2,R) → PSL(2,R)` and its trivialization over the
//! universal cover, and the Bott cocycle on circle diffeomorphisms.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::cover::CoverElement;
use crate::diffeo::CircleDiffeo;
use crate::moebius::{mat_mul, so2, Mat2, MoebiusElement};

/// Points of the periodic trapezoid rule in [`bott_cocycle`].
pub const BOTT_QUADRATURE_POINTS: usize = 2048;

pub trait Group: Clone {
    fn identity() -> Self;
    fn op(&self, other: &Self) -> Self;
}

impl Group for MoebiusElement {
    fn identity() -> Self {
        MoebiusElement::identity()
    }

    fn op(&self, other: &Self) -> Self {
        self.mul(other)
    }
}

impl Group for CoverElement {
    fn identity() -> Self {
        CoverElement::identity()
    }

    fn op(&self, other: &Self) -> Self {
        self.compose(other)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalarCocycleSample<G> {
    pub g: G,
    pub h: G,
    /// `[re, im]`
    pub value: [f64; 2],
}

impl<G> ScalarCocycleSample<G> {
    pub fn new(g: G, h: G, value: Complex64) -> Self {
        Self {
            g,
            h,
            value: [value.re, value.im],
        }
    }
}

/// `s(g) s(h) s(gh)⁻¹` for a section with unit-modulus values.
pub fn cocycle_from_section<G, F>(section: F, g: &G, h: &G) -> Complex64
where
    G: Group,
    F: Fn(&G) -> Complex64,
{
    section(g) * section(h) / section(&g.op(h))
}

/// `|ω(g,h) ω(gh,k) - ω(g,hk) ω(h,k)|`.
pub fn cocycle_identity_defect<G, F>(omega: F, g: &G, h: &G, k: &G) -> f64
where
    G: Group,
    F: Fn(&G, &G) -> Complex64,
{
    let gh = g.op(h);
    let hk = h.op(k);
    (omega(g, h) * omega(&gh, k) - omega(g, &hk) * omega(h, k)).norm()
}

/// Section `PSL(2,R) → SL(2,R)` picking the sign for which the rotation part
/// of the Iwasawa factorization has `SO(2)` angle in `[0, π)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SignSection;

fn frobenius(a: &Mat2, b: &Mat2) -> f64 {
    a[0][0] * b[0][0] + a[0][1] * b[0][1] + a[1][0] * b[1][0] + a[1][1] * b[1][1]
}

fn negate(m: &Mat2) -> Mat2 {
    m.map(|r| r.map(|v| -v))
}

impl SignSection {
    pub fn representative(&self, g: &MoebiusElement) -> Mat2 {
        let c = g.iwasawa();
        let e = (0.5 * c.tau).exp();
        let upper = [[e, c.p / e], [0.0, 1.0 / e]];
        let target = mat_mul(&upper, &so2(0.5 * c.t));
        let m = g.matrix();
        if frobenius(&m, &target) >= 0.0 {
            m
        } else {
            negate(&m)
        }
    }

    /// The `σ = ±1` with `s(g) s(h) = σ s(gh)`.
    pub fn cocycle(&self, g: &MoebiusElement, h: &MoebiusElement) -> Complex64 {
        let prod = mat_mul(&self.representative(g), &self.representative(h));
        let rep = self.representative(&g.mul(h));
        let sigma = if frobenius(&prod, &rep) >= 0.0 {
            1.0
        } else {
            -1.0
        };
        Complex64::new(sigma, 0.0)
    }
}

pub fn sign_cocycle(g: &MoebiusElement, h: &MoebiusElement) -> Complex64 {
    SignSection.cocycle(g, h)
}

/// `SL(2,R)` matrix reached by lifting a path from the identity to `a`.
///
/// The path runs through Iwasawa coordinates, `s ↦ T(sp) D(sτ) R(s t*)`,
/// with `t* = t + 2πk` chosen so that its circle lift ends at
/// `a.lift_at_zero()`. The `T D` part is contractible and lifts with
/// positive diagonal; `R(s t*)` lifts to the `SO(2)` rotation by `s t*/2`.
/// The result is a homomorphism `PSL(2,R)~ → SL(2,R)`.
pub fn cover_trivialize(a: &CoverElement) -> Mat2 {
    let c = a.base().iwasawa();
    let e = (0.5 * c.tau).exp();
    let upper = [[e, c.p / e], [0.0, 1.0 / e]];
    // circle lift of T(p)D(τ) joined to the identity: its α has positive
    // real part, so principal arguments are continuous along the path
    let upper_el = MoebiusElement::from_matrix(upper).expect("unit determinant");
    let (alpha, beta) = upper_el.su11();
    let q = beta / alpha;
    let one = Complex64::new(1.0, 0.0);
    let lift_upper =
        |x: f64| x + 2.0 * alpha.arg() + 2.0 * (one + q * Complex64::from_polar(1.0, -x)).arg();
    let k = ((a.lift_at_zero() - lift_upper(c.t)) / TAU).round();
    mat_mul(&upper, &so2(0.5 * (c.t + TAU * k)))
}

/// `∫₀^{2π} log φ̃'(ψ̃(x)) · ψ̃''(x)/ψ̃'(x) dx` by the periodic trapezoid rule.
pub fn bott_cocycle(phi: &CircleDiffeo, psi: &CircleDiffeo) -> f64 {
    bott_cocycle_with(phi, psi, BOTT_QUADRATURE_POINTS)
}

pub fn bott_cocycle_with(phi: &CircleDiffeo, psi: &CircleDiffeo, points: usize) -> f64 {
    let v = psi.displacement();
    let dv = v.derivative();
    let ddv = dv.derivative();
    let inner: Vec<f64> = crate::trig::grid(points)
        .iter()
        .zip(v.sample(points))
        .map(|(x, u)| x + u)
        .collect();
    let mut outer_d = vec![0.0; points];
    phi.displacement()
        .derivative()
        .eval_many(&inner, &mut outer_d);
    let d1 = dv.sample(points);
    let d2 = ddv.sample(points);
    let sum: f64 = outer_d
        .iter()
        .zip(d1.iter().zip(&d2))
        .map(|(od, (a, b))| (1.0 + od).ln() * b / (1.0 + a))
        .sum();
    sum * TAU / points as f64
}
