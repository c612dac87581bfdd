//! Numerical toolkit for the circle diffeomorphism group and its Möbius
//! subgroup.
//!
//! * [`diffeo`]: diffeomorphisms as spectral lift displacements.
//! * [`partition`], [`localize`]: partitions of unity, the interpolants
//!   `Ψ_k`, localising maps `Ξ_k` and the slicing of large diffeomorphisms.
//! * [`moebius`], [`cover`]: `PSL(2,R)`, its Iwasawa coordinates, words in
//!   translations and special conformal maps, and the universal cover.
//! * [`cocycle`]: section-induced 2-cocycles, the double-cover
//!   trivialization and the Bott cocycle.
//! * [`words`]: localized words realising Möbius transformations.

pub mod cocycle;
pub mod config;
pub mod cover;
pub mod diffeo;
pub mod error;
pub mod interval;
pub mod localize;
pub mod moebius;
pub mod partition;
pub mod roots;
pub mod sample;
pub mod trig;
pub mod words;

pub use config::Config;
pub use cover::CoverElement;
pub use diffeo::{CircleDiffeo, DiffeoMetrics, Support};
pub use error::{Error, Result};
pub use interval::{Covering, IntervalS1};
pub use localize::{LocalizedFactor, LocalizedWord};
pub use moebius::{Generator, IwasawaCoords, MoebiusElement, TsFactor, TsKind};
pub use partition::PartitionOfUnity;
