//! Seeded property suite behind `diffloc check`. Every property reports the
//! worst value it measured against its tolerance; nothing time-dependent is
//! recorded, so a seed fixes the report byte for byte.

use std::f64::consts::TAU;

use diffloc::cocycle::{bott_cocycle, cocycle_identity_defect, cover_trivialize, sign_cocycle};
use diffloc::localize::{localize, psi, slice_factorize};
use diffloc::moebius::{
    dilation_word, mat_max_diff, mat_mul, rotation_word, ts_word, word_element,
};
use diffloc::sample::{random_diffeo, random_matrix_element, random_moebius};
use diffloc::words::{translation_word, word_product, WordBuilder};
use diffloc::{
    CircleDiffeo, Config, CoverElement, MoebiusElement, PartitionOfUnity, Result, TsKind,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::commands::default_covering;
use crate::Suite;

#[derive(Debug, Serialize)]
pub struct Property {
    pub suite: &'static str,
    pub name: &'static str,
    pub samples: usize,
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub suite: &'static str,
    pub seed: u64,
    pub passed: bool,
    pub properties: Vec<Property>,
}

struct Runner {
    seed: u64,
    salt: u64,
    props: Vec<Property>,
}

impl Runner {
    fn rng(&mut self) -> ChaCha8Rng {
        self.salt += 1;
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ self.salt)
    }

    /// `f` returns the sample count and the worst measured value. A zero
    /// tolerance demands an exact zero.
    fn prop<F>(&mut self, suite: &'static str, name: &'static str, tolerance: f64, f: F)
    where
        F: FnOnce(&mut ChaCha8Rng) -> Result<(usize, f64)>,
    {
        let mut rng = self.rng();
        let p = match f(&mut rng) {
            Ok((samples, worst)) => Property {
                suite,
                name,
                samples,
                worst,
                tolerance,
                passed: worst < tolerance || (tolerance == 0.0 && worst == 0.0),
                error: None,
            },
            Err(e) => Property {
                suite,
                name,
                samples: 0,
                worst: f64::NAN,
                tolerance,
                passed: false,
                error: Some(e.to_string()),
            },
        };
        self.props.push(p);
    }
}

fn max(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

fn smooth(rng: &mut ChaCha8Rng, sup: f64, cfg: &Config) -> Result<CircleDiffeo> {
    random_diffeo(rng, 8, 3.0, sup, cfg)
}

/// Large low-frequency diffeomorphism: mean up to 1.5 and `|u'| ≤ 0.9`.
fn large(rng: &mut ChaCha8Rng, cfg: &Config) -> Result<CircleDiffeo> {
    let (r1, a1) = (rng.gen_range(0.3..0.6), rng.gen_range(0.0..TAU));
    let (r2, a2) = (rng.gen_range(0.0..0.15), rng.gen_range(0.0..TAU));
    let mean = rng.gen_range(-1.5..1.5);
    CircleDiffeo::make(
        &[r1 * a1.cos(), r2 * a2.cos()],
        &[r1 * a1.sin(), r2 * a2.sin()],
        mean,
        cfg,
    )
}

fn action_gap(d: &CircleDiffeo, g: &MoebiusElement) -> f64 {
    max((0..1024).map(|i| {
        let x = TAU * (i as f64 + 0.5) / 1024.0;
        let gap = (d.evaluate(x) - g.act_on_circle(x)).rem_euclid(TAU);
        gap.min(TAU - gap)
    }))
}

pub fn run(suite: Suite, seed: u64, cfg: &Config) -> Report {
    let mut r = Runner {
        seed,
        salt: 0,
        props: Vec::new(),
    };
    let all = suite == Suite::All;
    if all || suite == Suite::Circle {
        circle(&mut r, cfg);
    }
    if all || suite == Suite::Localization {
        localization(&mut r, cfg);
    }
    if all || suite == Suite::Moebius {
        moebius(&mut r, cfg);
    }
    if all || suite == Suite::Cocycle {
        cocycles(&mut r, cfg);
    }
    if all || suite == Suite::Words {
        words(&mut r, cfg);
    }
    Report {
        suite: suite.name(),
        seed,
        passed: r.props.iter().all(|p| p.passed),
        properties: r.props,
    }
}

fn circle(r: &mut Runner, cfg: &Config) {
    const S: &str = "circle";
    r.prop(S, "associativity", 1e-9, |rng| {
        let mut worst: f64 = 0.0;
        for _ in 0..5 {
            let (f, g, h) = (
                smooth(rng, 1.0, cfg)?,
                smooth(rng, 1.0, cfg)?,
                smooth(rng, 1.0, cfg)?,
            );
            let a = f.compose(&g, cfg)?.compose(&h, cfg)?;
            let b = f.compose(&g.compose(&h, cfg)?, cfg)?;
            worst = worst.max(a.sup_distance(&b));
        }
        Ok((5, worst))
    });
    r.prop(S, "inverse", 1e-9, |rng| {
        let mut worst: f64 = 0.0;
        for _ in 0..5 {
            let f = smooth(rng, 1.2, cfg)?;
            let id = f.compose(&f.invert(cfg)?, cfg)?;
            worst = worst.max(id.sup_distance(&CircleDiffeo::identity()));
        }
        Ok((5, worst))
    });
    r.prop(S, "equivariance", 1e-11, |rng| {
        let f = smooth(rng, 1.5, cfg)?;
        let worst = max((0..100).map(|_| {
            let x: f64 = rng.gen_range(-50.0..50.0);
            (f.evaluate(x + TAU) - f.evaluate(x) - TAU).abs()
        }));
        Ok((100, worst))
    });
    r.prop(S, "neighbourhood_transition", 1e-8, |rng| {
        let mut worst: f64 = 0.0;
        for _ in 0..5 {
            let sup = rng.gen_range(0.05..1.0);
            let f = smooth(rng, sup, cfg)?;
            let m = f.metrics();
            let ratio = m.sup_displacement / m.inf_derivative;
            let (mut lo, mut hi) = (0.0, 2.0 * ratio);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if f.in_neighborhood(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            worst = worst.max((hi - ratio).abs() / ratio);
        }
        Ok((5, worst))
    });
}

fn localization(r: &mut Runner, cfg: &Config) {
    const S: &str = "localization";
    let p = match PartitionOfUnity::build(&default_covering(), cfg.margin_fraction) {
        Ok(p) => p,
        Err(e) => {
            r.prop(S, "partition", 0.0, |_| Err(e));
            return;
        }
    };
    let eps = p.epsilon_max(1.0);
    let sample = |rng: &mut ChaCha8Rng| smooth(rng, 0.45 * eps, cfg);
    r.prop(S, "round_trip", 1e-8, |rng| {
        let mut worst: f64 = 0.0;
        for _ in 0..5 {
            let phi = sample(rng)?;
            let w = localize(&phi, &p, cfg)?;
            worst = worst.max(word_product(&w, cfg)?.sup_distance(&phi));
        }
        Ok((5, worst))
    });
    r.prop(S, "factor_supports", 0.0, |rng| {
        let mut bad = 0;
        for _ in 0..5 {
            let w = localize(&sample(rng)?, &p, cfg)?;
            bad += usize::from(w.support_violation(1e-8).is_some());
        }
        Ok((5, bad as f64))
    });
    r.prop(S, "identity_factors", 0.0, |_| {
        let w = localize(&CircleDiffeo::identity(), &p, cfg)?;
        Ok((
            1,
            w.factors.iter().filter(|f| !f.diffeo.is_identity()).count() as f64,
        ))
    });
    r.prop(S, "telescoping", 1e-9, |rng| {
        let phi = sample(rng)?;
        let w = localize(&phi, &p, cfg)?;
        let mut prev = CircleDiffeo::identity();
        let mut worst: f64 = 0.0;
        for k in 1..=p.len() {
            let cur = psi(&phi, &p, k, cfg)?;
            worst = worst.max(
                w.factors[k - 1]
                    .diffeo
                    .compose(&prev, cfg)?
                    .sup_distance(&cur),
            );
            prev = cur;
        }
        Ok((p.len(), worst))
    });
    r.prop(S, "derivative_bound", 1e-8, |rng| {
        let mut shortfall: f64 = 0.0;
        for _ in 0..3 {
            let phi = sample(rng)?;
            let m = phi.metrics();
            let bound = m.inf_derivative.min(1.0) - p.derivative_sum_sup() * m.sup_displacement;
            for k in 1..=p.len() {
                shortfall = shortfall.max(bound - psi(&phi, &p, k, cfg)?.metrics().inf_derivative);
            }
        }
        Ok((3, shortfall))
    });
    r.prop(S, "slicing", 1e-7, |rng| {
        let mut worst: f64 = 0.0;
        for phi in [CircleDiffeo::rotation(3.0), large(rng, cfg)?] {
            let slices = slice_factorize(&phi, &p, cfg)?;
            if !slices.iter().all(|s| s.in_neighborhood(eps)) {
                return Ok((2, f64::INFINITY));
            }
            let mut acc = CircleDiffeo::identity();
            for s in &slices {
                acc = s.compose(&acc, cfg)?;
            }
            worst = worst.max(acc.sup_distance(&phi));
        }
        Ok((2, worst))
    });
}

fn moebius(r: &mut Runner, cfg: &Config) {
    const S: &str = "moebius";
    r.prop(S, "dilation_identity", 1e-12, |_| {
        let worst = max((-30..=30).map(|i| {
            let tau = 0.1 * i as f64;
            mat_max_diff(
                &word_element(&dilation_word(tau)).matrix(),
                &MoebiusElement::dilation(tau).matrix(),
            )
        }));
        Ok((61, worst))
    });
    r.prop(S, "rotation_identity", 1e-11, |_| {
        let worst = max((0..2000).map(|i| {
            let a = 4.0 * std::f64::consts::PI * i as f64 / 2000.0;
            word_element(&rotation_word(a)).distance(&MoebiusElement::rotation(a))
        }));
        Ok((2000, worst))
    });
    r.prop(S, "iwasawa_reconstruction", 1e-12, |rng| {
        let worst = max((0..200).map(|_| {
            let g = random_matrix_element(rng);
            MoebiusElement::from_iwasawa(&g.iwasawa()).distance(&g)
        }));
        Ok((200, worst))
    });
    r.prop(S, "ts_word_product", 1e-10, |rng| {
        let worst = max((0..50).map(|_| {
            let g = random_moebius(rng, 5.0, 3.0);
            word_element(&ts_word(&g)).distance(&g)
        }));
        Ok((50, worst))
    });
    r.prop(S, "to_diffeo_homomorphism", 1e-8, |rng| {
        let mut worst: f64 = 0.0;
        for _ in 0..5 {
            let g = random_moebius(rng, 1.5, 1.5);
            let h = random_moebius(rng, 1.5, 1.5);
            let lhs = g.to_diffeo(cfg)?.compose(&h.to_diffeo(cfg)?, cfg)?;
            worst = worst.max(lhs.sup_distance(&g.mul(&h).to_diffeo(cfg)?));
        }
        Ok((5, worst))
    });
    r.prop(S, "cover_winding", 1e-9, |_| {
        let worst = max([2usize, 3, 8].iter().map(|&n| {
            let step = CoverElement::make(&MoebiusElement::rotation(TAU / n as f64), 0);
            let total = (1..n).fold(step, |acc, _| acc.compose(&step));
            (total.lift_at_zero() - TAU)
                .abs()
                .max(total.project().distance(&MoebiusElement::identity()))
        }));
        Ok((3, worst))
    });
    r.prop(S, "cover_associativity", 1e-9, |rng| {
        let el = |rng: &mut ChaCha8Rng| {
            let g = random_matrix_element(rng);
            CoverElement::make(&g, rng.gen_range(-2..=2))
        };
        let worst = max((0..20).map(|_| {
            let (a, b, c) = (el(rng), el(rng), el(rng));
            a.compose(&b)
                .compose(&c)
                .distance(&a.compose(&b.compose(&c)))
        }));
        Ok((20, worst))
    });
}

fn cocycles(r: &mut Runner, cfg: &Config) {
    const S: &str = "cocycle";
    r.prop(S, "sign_identity", 0.0, |rng| {
        let worst = max((0..200).map(|_| {
            let (g, h, k) = (
                random_matrix_element(rng),
                random_matrix_element(rng),
                random_matrix_element(rng),
            );
            cocycle_identity_defect(sign_cocycle, &g, &h, &k)
        }));
        Ok((200, worst))
    });
    r.prop(S, "trivialization_homomorphism", 1e-10, |rng| {
        let worst = max((0..20).map(|_| {
            let a = CoverElement::make(&random_matrix_element(rng), rng.gen_range(-3..=3));
            let b = CoverElement::make(&random_matrix_element(rng), rng.gen_range(-3..=3));
            let rhs = mat_mul(&cover_trivialize(&a), &cover_trivialize(&b));
            let scale = 1.0 + rhs.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
            mat_max_diff(&cover_trivialize(&a.compose(&b)), &rhs) / scale
        }));
        Ok((20, worst))
    });
    r.prop(S, "bott_identity", 1e-8, |rng| {
        let mut worst: f64 = 0.0;
        for _ in 0..5 {
            let (f, g, h) = (
                smooth(rng, 0.6, cfg)?,
                smooth(rng, 0.6, cfg)?,
                smooth(rng, 0.6, cfg)?,
            );
            let d = bott_cocycle(&f, &g) + bott_cocycle(&f.compose(&g, cfg)?, &h)
                - bott_cocycle(&f, &g.compose(&h, cfg)?)
                - bott_cocycle(&g, &h);
            worst = worst.max(d.abs());
        }
        Ok((5, worst))
    });
    r.prop(S, "bott_rotations", 1e-15, |rng| {
        let f = smooth(rng, 0.6, cfg)?;
        let rot = CircleDiffeo::rotation(rng.gen_range(-3.0..3.0));
        Ok((
            2,
            bott_cocycle(&rot, &f)
                .abs()
                .max(bott_cocycle(&f, &rot).abs()),
        ))
    });
}

fn words(r: &mut Runner, cfg: &Config) {
    const S: &str = "words";
    let p = match PartitionOfUnity::build(&default_covering(), cfg.margin_fraction) {
        Ok(p) => p,
        Err(e) => {
            r.prop(S, "partition", 0.0, |_| Err(e));
            return;
        }
    };
    r.prop(S, "moebius_word_product", 1e-6, |rng| {
        let builder = WordBuilder::new(&p, cfg)?;
        let mut worst: f64 = 0.0;
        for _ in 0..2 {
            let g = random_moebius(rng, 5.0, 3.0);
            let w = builder.word(&g)?;
            if w.support_violation(1e-8).is_some() {
                return Ok((2, f64::INFINITY));
            }
            worst = worst.max(action_gap(&word_product(&w, cfg)?, &g));
        }
        Ok((2, worst))
    });
    r.prop(S, "translation_word", 1e-7, |_| {
        let step = match cfg.step {
            Some(s) => s,
            None => diffloc::words::default_step(TsKind::Translation, &p, cfg)?,
        };
        let w = translation_word(5.0, &p, step, cfg)?;
        let target = MoebiusElement::translation(5.0).to_diffeo(cfg)?;
        Ok((1, word_product(&w, cfg)?.sup_distance(&target)))
    });
}
