//! Numerical tolerances and resolution limits shared by every operation.

use serde::{Deserialize, Serialize};

/// Tolerances and resolution knobs.
///
/// Every operation that refits, inverts or tests membership reads its
/// thresholds from here, so a single value can be passed through a whole
/// pipeline (and echoed back by the CLI for reproducibility).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    /// Minimum number of harmonics used when a refit starts.
    pub modes: usize,
    /// Hard cap on harmonics of any fitted displacement.
    pub max_modes: usize,
    /// Size of the uniform sampling grid used by caches and dumps.
    pub grid_points: usize,
    /// A lift with `min (1 + u')` at or below this is rejected.
    pub derivative_floor: f64,
    /// A refit is accepted once the upper half of its resolved spectrum
    /// sums to less than this, or once every coefficient there is below it
    /// and the spectrum has flattened into rounding noise.
    pub refit_tail: f64,
    /// Trailing coefficients are dropped while their summed magnitude stays
    /// below this.
    pub trim_tail: f64,
    /// Residual tolerance of the per-node Newton solves.
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    /// Fraction of each covering interval cut off at both ends before the
    /// bump functions are placed.
    pub margin_fraction: f64,
    /// Factor applied to the admissible neighbourhood radius.
    pub safety: f64,
    /// Largest number of slices tried by `slice_factorize`.
    pub slice_cap: usize,
    /// Largest number of factors a localized word may grow to.
    pub word_cap: usize,
    /// Step for the translation / special conformal periodization. `None`
    /// picks the largest admissible power of one half.
    pub step: Option<f64>,
    /// Tolerance at which factor supports are measured.
    pub support_tol: f64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            modes: 128,
            max_modes: 4096,
            grid_points: 1024,
            derivative_floor: 1e-10,
            refit_tail: 1e-12,
            trim_tail: 1e-14,
            newton_tol: 1e-12,
            newton_max_iter: 50,
            margin_fraction: 0.1,
            safety: 0.9,
            slice_cap: 1 << 14,
            word_cap: 100_000,
            step: None,
            support_tol: 1e-8,
        }
    }
}
