//! One function per subcommand. Each takes the parsed JSON input and returns
//! the `result` object of the report.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use diffloc::cocycle::{bott_cocycle, cover_trivialize, sign_cocycle};
use diffloc::localize::{localize as localize_word, slice_factorize};
use diffloc::moebius::{self, mat_max_diff, mat_mul, word_element, Mat2, TsFactor};
use diffloc::words::{word_product, WordBuilder, WordStats};
use diffloc::{CircleDiffeo, Config, CoverElement, Covering, MoebiusElement, PartitionOfUnity};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use crate::Failure;

/// Covering used when the input names none: three arcs of length 1.6π
/// centred at 0, 2π/3 and 4π/3.
pub fn default_covering() -> Covering {
    Covering::uniform(3, 1.6 * PI, 0.0).expect("arcs overlap")
}

fn field<T: DeserializeOwned>(input: &Value, key: &str) -> Result<T, Failure> {
    let v = input
        .get(key)
        .ok_or_else(|| Failure::invalid(format!("missing field `{key}`")))?;
    serde_json::from_value(v.clone()).map_err(|e| Failure::invalid(format!("`{key}`: {e}")))
}

fn whole<T: DeserializeOwned>(input: &Value) -> Result<T, Failure> {
    serde_json::from_value(input.clone()).map_err(|e| Failure::invalid(e.to_string()))
}

fn partition(input: &Value, cfg: &Config) -> Result<PartitionOfUnity, Failure> {
    let cover = match input.get("covering") {
        Some(_) => field(input, "covering")?,
        None => default_covering(),
    };
    Ok(PartitionOfUnity::build(&cover, cfg.margin_fraction)?)
}

fn partition_summary(p: &PartitionOfUnity, cfg: &Config) -> Value {
    json!({
        "covering": p.cover(),
        "supports": p.supports(),
        "derivative_sum_sup": p.derivative_sum_sup(),
        "margins": p.margins(),
        "epsilon_max": p.epsilon_max(cfg.safety),
    })
}

fn compose_in_order(fs: &[CircleDiffeo], cfg: &Config) -> Result<CircleDiffeo, Failure> {
    let mut acc = CircleDiffeo::identity();
    for f in fs {
        acc = f.compose(&acc, cfg)?;
    }
    Ok(acc)
}

// Largest angular gap between the diffeomorphism and the Möbius action.
fn action_residual(d: &CircleDiffeo, g: &MoebiusElement, points: usize) -> f64 {
    (0..points)
        .map(|i| {
            let x = TAU * i as f64 / points as f64;
            let gap = (d.evaluate(x) - g.act_on_circle(x)).rem_euclid(TAU);
            gap.min(TAU - gap)
        })
        .fold(0.0, f64::max)
}

pub fn localize(input: &Value, cfg: &Config) -> Result<Value, Failure> {
    let phi: CircleDiffeo = field(input, "diffeo")?;
    let p = partition(input, cfg)?;
    let word = localize_word(&phi, &p, cfg)?;
    let residual = word_product(&word, cfg)?.sup_distance(&phi);
    Ok(json!({
        "partition": partition_summary(&p, cfg),
        "word": word,
        "residual": residual,
        "support_violation": word.support_violation(cfg.support_tol),
    }))
}

pub fn slice(input: &Value, cfg: &Config) -> Result<Value, Failure> {
    let phi: CircleDiffeo = field(input, "diffeo")?;
    let p = partition(input, cfg)?;
    let slices = slice_factorize(&phi, &p, cfg)?;
    let residual = compose_in_order(&slices, cfg)?.sup_distance(&phi);
    let sups: Vec<f64> = slices
        .iter()
        .map(|s| s.metrics().sup_displacement)
        .collect();
    Ok(json!({
        "epsilon_max": p.epsilon_max(1.0),
        "count": slices.len(),
        "sup_displacements": sups,
        "slices": slices,
        "residual": residual,
    }))
}

pub fn iwasawa(input: &Value) -> Result<Value, Failure> {
    let g: MoebiusElement = whole(input)?;
    let c = g.iwasawa();
    let back = MoebiusElement::from_iwasawa(&c);
    Ok(json!({ "iwasawa": c, "reconstruction_error": back.distance(&g) }))
}

fn word_report(word: &[TsFactor], target: &MoebiusElement) -> Value {
    json!({
        "word": word,
        "length": word.len(),
        "product_error": word_element(word).distance(target),
    })
}

pub fn ts_word(input: &Value) -> Result<Value, Failure> {
    let g: MoebiusElement = whole(input)?;
    Ok(word_report(&moebius::ts_word(&g), &g))
}

fn finite(name: &str, v: f64) -> Result<(), Failure> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Failure::invalid(format!("{name} must be finite")))
    }
}

pub fn dilation_word(tau: f64) -> Result<Value, Failure> {
    finite("tau", tau)?;
    Ok(word_report(
        &moebius::dilation_word(tau),
        &MoebiusElement::dilation(tau),
    ))
}

pub fn rotation_word(alpha: f64) -> Result<Value, Failure> {
    finite("alpha", alpha)?;
    Ok(word_report(
        &moebius::rotation_word(alpha),
        &MoebiusElement::rotation(alpha),
    ))
}

pub fn moebius_word(input: &Value, cfg: &Config) -> Result<Value, Failure> {
    let g: MoebiusElement = match input.get("m") {
        Some(_) => whole(input)?,
        None => field(input, "element")?,
    };
    let p = partition(input, cfg)?;
    let builder = WordBuilder::new(&p, cfg)?;
    let word = builder.word(&g)?;
    let product = word_product(&word, cfg)?;
    let stats = WordStats {
        length: word.len(),
        max_factor_displacement: word.max_factor_displacement(),
        residual: action_residual(&product, &g, cfg.grid_points),
    };
    Ok(json!({
        "ts_word": moebius::ts_word(&g),
        "translation_step": builder.translation_step(),
        "special_conformal_step": builder.special_conformal_step(),
        "epsilon_max": p.epsilon_max(1.0),
        "stats": stats,
        "support_violation": word.support_violation(cfg.support_tol),
    }))
}

fn elements<T: DeserializeOwned>(input: &Value, key: &str) -> Result<Vec<T>, Failure> {
    let v: Vec<T> = field(input, key)?;
    if v.is_empty() {
        return Err(Failure::invalid(format!("`{key}` is empty")));
    }
    Ok(v)
}

pub fn cover(input: &Value) -> Result<Value, Failure> {
    let els: Vec<CoverElement> = elements(input, "elements")?;
    let product = els
        .iter()
        .fold(CoverElement::identity(), |acc, e| acc.compose(e));
    let mats: Vec<Mat2> = els.iter().map(cover_trivialize).collect();
    let direct = mats
        .iter()
        .fold([[1.0, 0.0], [0.0, 1.0]], |acc, m| mat_mul(&acc, m));
    let trivial = cover_trivialize(&product);
    Ok(json!({
        "product": product,
        "projection": product.project(),
        "trivializations": mats,
        "product_trivialization": trivial,
        "homomorphism_defect": mat_max_diff(&trivial, &direct),
    }))
}

pub fn cocycle(input: &Value) -> Result<Value, Failure> {
    let els: Vec<MoebiusElement> = elements(input, "elements")?;
    let table: Vec<Vec<f64>> = els
        .iter()
        .map(|g| els.iter().map(|h| sign_cocycle(g, h).re).collect())
        .collect();
    let mut defect: f64 = 0.0;
    for g in &els {
        for h in &els {
            for k in &els {
                defect = defect.max(diffloc::cocycle::cocycle_identity_defect(
                    sign_cocycle,
                    g,
                    h,
                    k,
                ));
            }
        }
    }
    Ok(json!({ "table": table, "max_identity_defect": defect }))
}

pub fn bott(input: &Value, cfg: &Config) -> Result<Value, Failure> {
    let ds: Vec<CircleDiffeo> = elements(input, "diffeos")?;
    let table: Vec<Vec<f64>> = ds
        .iter()
        .map(|f| ds.iter().map(|g| bott_cocycle(f, g)).collect())
        .collect();
    let mut defect: f64 = 0.0;
    for (i, f) in ds.iter().enumerate() {
        for (j, g) in ds.iter().enumerate() {
            let fg = f.compose(g, cfg)?;
            for (k, h) in ds.iter().enumerate() {
                let gh = g.compose(h, cfg)?;
                let d = table[i][j] + bott_cocycle(&fg, h) - bott_cocycle(f, &gh) - table[j][k];
                defect = defect.max(d.abs());
            }
        }
    }
    Ok(json!({ "table": table, "max_identity_defect": defect }))
}

pub fn grid(input: &Value, cfg: &Config) -> Result<String, Failure> {
    let phi: CircleDiffeo = match input.get("diffeo") {
        Some(_) => field(input, "diffeo")?,
        None => whole(input)?,
    };
    let n = cfg.grid_points;
    let mut out = String::from("x,phi,dphi\n");
    for i in 0..n {
        let x = TAU * i as f64 / n as f64;
        let _ = writeln!(
            out,
            "{x:.17e},{:.17e},{:.17e}",
            phi.evaluate(x),
            phi.derivative_at(x)
        );
    }
    Ok(out)
}
