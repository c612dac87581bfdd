//! Localized words for Möbius transformations: small translations and
//! special conformal maps are localized directly, larger ones are written
//! as powers of a fixed small step followed by a remainder, and a general
//! element is expanded through its translation / special conformal word.

use serde::Serialize;

use crate::config::Config;
use crate::error::{Error, Result};
pub use crate::localize::word_product;
use crate::localize::{localize, LocalizedWord};
use crate::moebius::{ts_word, MoebiusElement, TsFactor, TsKind};
use crate::partition::PartitionOfUnity;

fn generator(kind: TsKind, value: f64) -> MoebiusElement {
    TsFactor { kind, param: value }.element()
}

/// Localization of a single generator lying in the admissible neighbourhood.
pub fn small_generator_word(
    kind: TsKind,
    value: f64,
    p: &PartitionOfUnity,
    cfg: &Config,
) -> Result<LocalizedWord> {
    let d = generator(kind, value).to_diffeo(cfg)?;
    localize(&d, p, cfg)
}

fn admissible(kind: TsKind, step: f64, p: &PartitionOfUnity, cfg: &Config) -> Result<bool> {
    Ok(generator(kind, step)
        .to_diffeo(cfg)?
        .in_neighborhood(p.epsilon_max(1.0)))
}

/// Largest power of one half whose generator passes the neighbourhood test.
pub fn default_step(kind: TsKind, p: &PartitionOfUnity, cfg: &Config) -> Result<f64> {
    let mut step = 1.0;
    for _ in 0..60 {
        if admissible(kind, step, p, cfg)? {
            return Ok(step);
        }
        step *= 0.5;
    }
    Err(Error::StepTooLarge { step })
}

/// Writes one-parameter subgroup elements `X(v)` as
/// `X(step)^{n} · X(v - n·step)` with `n = ⌊v/step⌋`, each piece localized.
/// Negative `n` uses the inverse of the step block.
#[derive(Debug, Clone)]
pub struct Periodizer<'a> {
    kind: TsKind,
    step: f64,
    partition: &'a PartitionOfUnity,
    block: LocalizedWord,
    inverse_block: LocalizedWord,
    cfg: Config,
}

impl<'a> Periodizer<'a> {
    pub fn new(kind: TsKind, step: f64, p: &'a PartitionOfUnity, cfg: &Config) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "step {step} must be positive"
            )));
        }
        if !admissible(kind, step, p, cfg)? {
            return Err(Error::StepTooLarge { step });
        }
        let block = small_generator_word(kind, step, p, cfg)?;
        let inverse_block = block.inverse(cfg)?;
        Ok(Self {
            kind,
            step,
            partition: p,
            block,
            inverse_block,
            cfg: cfg.clone(),
        })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn word(&self, value: f64) -> Result<LocalizedWord> {
        let n = (value / self.step).floor();
        let rem = (value - n * self.step).clamp(0.0, self.step);
        let m = self.partition.len();
        let blocks = n.abs() + 1.0;
        if blocks * m as f64 > self.cfg.word_cap as f64 {
            return Err(Error::WordTooLong {
                cap: self.cfg.word_cap,
            });
        }
        let unit = if n < 0.0 {
            &self.inverse_block
        } else {
            &self.block
        };
        let mut w = LocalizedWord::default();
        w.factors.reserve(blocks as usize * m);
        for _ in 0..n.abs() as usize {
            w.extend(unit);
        }
        // remainder may round up to a full step
        let tail = if rem == self.step {
            self.block.clone()
        } else {
            small_generator_word(self.kind, rem, self.partition, &self.cfg)?
        };
        w.extend(&tail);
        Ok(w)
    }
}

pub fn translation_word(
    t: f64,
    p: &PartitionOfUnity,
    step: f64,
    cfg: &Config,
) -> Result<LocalizedWord> {
    Periodizer::new(TsKind::Translation, step, p, cfg)?.word(t)
}

pub fn special_conformal_word(
    s: f64,
    p: &PartitionOfUnity,
    step: f64,
    cfg: &Config,
) -> Result<LocalizedWord> {
    Periodizer::new(TsKind::SpecialConformal, step, p, cfg)?.word(s)
}

/// Translation and special conformal periodizers over one partition, built
/// once and reused for many elements.
#[derive(Debug, Clone)]
pub struct WordBuilder<'a> {
    translations: Periodizer<'a>,
    specials: Periodizer<'a>,
    word_cap: usize,
}

impl<'a> WordBuilder<'a> {
    /// Steps come from `cfg.step` when set, otherwise from [`default_step`].
    pub fn new(p: &'a PartitionOfUnity, cfg: &Config) -> Result<Self> {
        let step_for = |kind| match cfg.step {
            Some(s) => Ok(s),
            None => default_step(kind, p, cfg),
        };
        Ok(Self {
            translations: Periodizer::new(
                TsKind::Translation,
                step_for(TsKind::Translation)?,
                p,
                cfg,
            )?,
            specials: Periodizer::new(
                TsKind::SpecialConformal,
                step_for(TsKind::SpecialConformal)?,
                p,
                cfg,
            )?,
            word_cap: cfg.word_cap,
        })
    }

    pub fn translation_step(&self) -> f64 {
        self.translations.step()
    }

    pub fn special_conformal_step(&self) -> f64 {
        self.specials.step()
    }

    /// Localized word for `g`: its translation / special conformal word with
    /// every factor periodized and localized. The last matrix factor acts
    /// first on the circle, so the matrix word is expanded backwards.
    pub fn word(&self, g: &MoebiusElement) -> Result<LocalizedWord> {
        let mut word = LocalizedWord::default();
        for f in ts_word(g).iter().rev() {
            let piece = match f.kind {
                TsKind::Translation => self.translations.word(f.param)?,
                TsKind::SpecialConformal => self.specials.word(f.param)?,
            };
            if word.len() + piece.len() > self.word_cap {
                return Err(Error::WordTooLong { cap: self.word_cap });
            }
            word.extend(&piece);
        }
        Ok(word)
    }
}

/// One-off [`WordBuilder::word`].
pub fn moebius_word(
    g: &MoebiusElement,
    p: &PartitionOfUnity,
    cfg: &Config,
) -> Result<LocalizedWord> {
    if ts_word(g).is_empty() {
        return Ok(LocalizedWord::default());
    }
    WordBuilder::new(p, cfg)?.word(g)
}

/// Summary emitted by the CLI for a word.
#[derive(Debug, Clone, Serialize)]
pub struct WordStats {
    pub length: usize,
    pub max_factor_displacement: f64,
    pub residual: f64,
}
