//! Compensated summation, sample statistics, and log-log least squares.

use serde::Serialize;

use crate::error::{Error, Result};

/// Kahan compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

pub fn kahan_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut acc = KahanSum::new();
    for x in xs {
        acc.add(x);
    }
    acc.value()
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MeanStderr {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

/// Sample mean and standard error (sample std / sqrt(n)); requires n >= 2.
pub fn mean_stderr(xs: &[f64]) -> Result<MeanStderr> {
    let n = xs.len();
    if n < 2 {
        return Err(Error::invalid("need at least 2 samples"));
    }
    let mean = kahan_sum(xs.iter().copied()) / n as f64;
    let ss = kahan_sum(xs.iter().map(|x| (x - mean) * (x - mean)));
    let std = (ss / (n as f64 - 1.0)).sqrt();
    Ok(MeanStderr {
        mean,
        stderr: std / (n as f64).sqrt(),
        n,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PowerLawFit {
    /// Slope of the ordinary least-squares line through (ln x, ln y).
    pub exponent: f64,
    /// exp(intercept): the fitted prefactor in y = prefactor * x^exponent.
    pub prefactor: f64,
}

/// OLS fit of `y = c * x^a` on log-log axes. Rejects fewer than two points
/// and nonpositive coordinates.
pub fn power_law_fit(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 2 {
        return Err(Error::invalid("power-law fit needs at least 2 points"));
    }
    if points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return Err(Error::invalid("power-law fit needs positive coordinates"));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let xbar = kahan_sum(xs.iter().copied()) / n;
    let ybar = kahan_sum(ys.iter().copied()) / n;
    let sxy = kahan_sum(xs.iter().zip(&ys).map(|(x, y)| (x - xbar) * (y - ybar)));
    let sxx = kahan_sum(xs.iter().map(|x| (x - xbar) * (x - xbar)));
    if sxx == 0.0 {
        return Err(Error::invalid("power-law fit needs at least 2 distinct x"));
    }
    let slope = sxy / sxx;
    Ok(PowerLawFit {
        exponent: slope,
        prefactor: (ybar - slope * xbar).exp(),
    })
}
