//! Real trigonometric polynomials `u(x) = Re Σ_k c_k e^{ikx}`.
//!
//! `c_0` is the (real) mean and `c_k = a_k - i b_k` for the harmonic
//! `a_k cos kx + b_k sin kx`. Uniform-grid work goes through the FFT;
//! scattered points are evaluated by Horner's rule in `z = e^{ix}`.

use std::cell::RefCell;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::config::Config;
use crate::error::{Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft(buf: &mut [Complex64], inverse: bool) {
    let plan = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(buf.len())
        } else {
            p.plan_fft_forward(buf.len())
        }
    });
    plan.process(buf);
}

/// Uniform grid `2πj/m`, `j = 0..m`.
pub fn grid(m: usize) -> Vec<f64> {
    (0..m).map(|j| TAU * j as f64 / m as f64).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    coeffs: Vec<Complex64>,
}

const CHUNK: usize = 16;

impl TrigPoly {
    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(c: f64) -> Self {
        Self {
            coeffs: vec![Complex64::new(c, 0.0)],
        }
    }

    /// `mean + Σ cos[k]·cos((k+1)x) + sin[k]·sin((k+1)x)`.
    pub fn from_cos_sin(mean: f64, cos: &[f64], sin: &[f64]) -> Self {
        let n = cos.len().max(sin.len());
        let mut coeffs = Vec::with_capacity(n + 1);
        coeffs.push(Complex64::new(mean, 0.0));
        for k in 0..n {
            let a = cos.get(k).copied().unwrap_or(0.0);
            let b = sin.get(k).copied().unwrap_or(0.0);
            coeffs.push(Complex64::new(a, -b));
        }
        Self { coeffs }
    }

    pub fn from_coeffs(mut coeffs: Vec<Complex64>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        coeffs[0].im = 0.0;
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    pub fn cos_coeffs(&self) -> Vec<f64> {
        self.coeffs[1..].iter().map(|c| c.re).collect()
    }

    pub fn sin_coeffs(&self) -> Vec<f64> {
        self.coeffs[1..].iter().map(|c| -c.im).collect()
    }

    /// Highest harmonic carried.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// `Σ |c_k|`, an upper bound for `sup |u|`.
    pub fn abs_sum(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let z = Complex64::from_polar(1.0, x);
        let mut acc = *self.coeffs.last().unwrap();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc * z + c;
        }
        acc.re
    }

    /// Value and first derivative at `x`.
    pub fn eval_d(&self, x: f64) -> (f64, f64) {
        let z = Complex64::from_polar(1.0, x);
        let mut acc = *self.coeffs.last().unwrap();
        let mut dacc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev().skip(1) {
            dacc = dacc * z + acc;
            acc = acc * z + c;
        }
        // u' = Re(i z P'(z))
        (acc.re, -(z * dacc).im)
    }

    /// Evaluates at scattered points. Points are processed in blocks so the
    /// inner Horner loop runs across points rather than along one chain.
    pub fn eval_many(&self, xs: &[f64], out: &mut [f64]) {
        assert_eq!(xs.len(), out.len());
        let n = self.coeffs.len();
        if n == 1 {
            out.fill(self.coeffs[0].re);
            return;
        }
        let last = self.coeffs[n - 1];
        let mut zr = [0.0; CHUNK];
        let mut zi = [0.0; CHUNK];
        let mut ar = [0.0; CHUNK];
        let mut ai = [0.0; CHUNK];
        for (xc, oc) in xs.chunks(CHUNK).zip(out.chunks_mut(CHUNK)) {
            let len = xc.len();
            for j in 0..len {
                let (s, c) = xc[j].sin_cos();
                zr[j] = c;
                zi[j] = s;
                ar[j] = last.re;
                ai[j] = last.im;
            }
            // full-width lanes keep the loop vectorizable; stale lanes are ignored
            for c in self.coeffs[..n - 1].iter().rev() {
                for j in 0..CHUNK {
                    let r = ar[j] * zr[j] - ai[j] * zi[j] + c.re;
                    let i = ar[j] * zi[j] + ai[j] * zr[j] + c.im;
                    ar[j] = r;
                    ai[j] = i;
                }
            }
            oc.copy_from_slice(&ar[..len]);
        }
    }

    /// Derivative `u'`.
    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * Complex64::new(0.0, k as f64))
            .collect();
        Self { coeffs }
    }

    /// Values on the uniform grid of `m` points. Harmonics at or above `m`
    /// are folded onto their aliases, so the values are exact for any degree.
    pub fn sample(&self, m: usize) -> Vec<f64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        for (k, c) in self.coeffs.iter().enumerate() {
            buf[k % m] += c;
        }
        fft(&mut buf, true);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// Least-squares (interpolating) fit of samples on the uniform grid. The
    /// Nyquist harmonic is dropped so the result is a real polynomial of
    /// degree `m/2 - 1`.
    pub fn fit(samples: &[f64]) -> Self {
        let m = samples.len();
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft(&mut buf, false);
        let scale = 1.0 / m as f64;
        let top = m.div_ceil(2);
        let mut coeffs = Vec::with_capacity(top);
        coeffs.push(Complex64::new(buf[0].re * scale, 0.0));
        for c in buf.iter().take(top).skip(1) {
            coeffs.push(c * (2.0 * scale));
        }
        Self { coeffs }
    }

    /// Drops trailing harmonics whose summed magnitude stays within `tol`.
    pub fn trimmed(mut self, tol: f64) -> Self {
        let mut acc = 0.0;
        while self.coeffs.len() > 1 {
            let c = self.coeffs.last().unwrap().norm();
            if acc + c > tol {
                break;
            }
            acc += c;
            self.coeffs.pop();
        }
        self
    }

    /// `max_{lo ≤ k < hi} |c_k|`.
    pub fn band_max(&self, lo: usize, hi: usize) -> f64 {
        let hi = hi.min(self.coeffs.len());
        self.coeffs
            .get(lo..hi)
            .map_or(0.0, |b| b.iter().fold(0.0, |a, c| a.max(c.norm())))
    }

    /// Cuts the spectrum after the last harmonic above `level`.
    pub fn chopped(mut self, level: f64) -> Self {
        while self.coeffs.len() > 1 && self.coeffs.last().unwrap().norm() <= level {
            self.coeffs.pop();
        }
        self
    }

    /// `Σ_{k ≥ from} |c_k|`.
    pub fn tail(&self, from: usize) -> f64 {
        self.coeffs.iter().skip(from).map(|c| c.norm()).sum()
    }

    /// `x ↦ u(x + a)`.
    pub fn shifted(&self, a: f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * Complex64::from_polar(1.0, k as f64 * a))
            .collect();
        Self::from_coeffs(coeffs)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add_constant(&mut self, c: f64) {
        self.coeffs[0].re += c;
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        let coeffs = (0..n)
            .map(|k| {
                self.coeffs.get(k).copied().unwrap_or(zero)
                    - other.coeffs.get(k).copied().unwrap_or(zero)
            })
            .collect();
        Self { coeffs }
    }
}

/// Fits a periodic function known only through grid samples, doubling the
/// grid until the upper half of the resolved spectrum is below
/// `cfg.refit_tail`.
///
/// Samples carrying accumulated rounding error have a flat spectral floor,
/// and on a flat floor the tail sum grows with the grid. If every harmonic in
/// the top octave is below `cfg.refit_tail` and that octave has not decayed
/// relative to the one beneath it, the floor has been reached: the fit is
/// accepted and cut where the spectrum meets the floor.
///
/// `sampler` receives the grid abscissae and returns the function values.
pub fn fit_adaptive<F>(min_points: usize, cfg: &Config, mut sampler: F) -> Result<TrigPoly>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let mut m = min_points.max(2 * cfg.modes).max(16).next_power_of_two();
    loop {
        if m / 2 - 1 > cfg.max_modes {
            return Err(Error::ModeOverflow { cap: cfg.max_modes });
        }
        let xs = grid(m);
        let values = sampler(&xs)?;
        let p = TrigPoly::fit(&values);
        if p.tail(m / 4) < cfg.refit_tail {
            return Ok(p.trimmed(cfg.trim_tail));
        }
        let top = p.band_max(m / 4, m / 2);
        if top < cfg.refit_tail && top > 0.25 * p.band_max(m / 8, m / 4) {
            return Ok(p.chopped(2.0 * top));
        }
        m *= 2;
    }
}
