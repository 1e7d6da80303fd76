//! Log-linear fit of ‖S_k - S‖∞ ≈ C σ^{-k}.

use serde::{Deserialize, Serialize};

use super::{local_matrix, norm_inf};
use crate::schemes::SubdivisionScheme;
use crate::symbols::ols;
use crate::{Error, Result};

/// Differences below this are treated as rounding noise.
pub const NOISE_FLOOR: f64 = 1e3 * f64::EPSILON;

const MIN_POINTS: usize = 5;
const TAIL_POINTS: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub k: Vec<u32>,
    /// ‖S_k - S‖∞ for each k.
    pub norms: Vec<f64>,
    /// Whether the point entered the fit (above the noise floor).
    pub used: Vec<bool>,
    pub slope: f64,
    pub intercept: f64,
    pub sigma: f64,
    pub c: f64,
    /// Root-mean-square residual of the log fit.
    pub residual: f64,
    /// σ from slope ± 1.96 standard errors.
    pub sigma_band: (f64, f64),
    /// σ fitted over the last few usable points only.
    pub tail_sigma: Option<f64>,
}

impl DecayFit {
    /// C σ^{-k}.
    pub fn fitted(&self, k: u32) -> f64 {
        self.c * self.sigma.powi(-(k as i32))
    }

    /// Rows (k, norm, fitted value).
    pub fn rows(&self) -> Vec<(u32, f64, f64)> {
        self.k
            .iter()
            .zip(&self.norms)
            .map(|(&k, &v)| (k, v, self.fitted(k)))
            .collect()
    }
}

/// Fits the decay of ‖S_k - S‖∞ against the stationary reference over `ks`.
pub fn decay_fit(
    scheme: &dyn SubdivisionScheme,
    n: usize,
    ks: std::ops::RangeInclusive<u32>,
) -> Result<DecayFit> {
    let k: Vec<u32> = ks.collect();
    if k.len() < MIN_POINTS {
        return Err(Error::InsufficientPoints(k.len()));
    }
    let reference = local_matrix(&scheme.reference(), 1, n)?;
    let mut norms = Vec::with_capacity(k.len());
    for &j in &k {
        let sk = local_matrix(scheme, j, n)?;
        norms.push(norm_inf(&(sk.dense() - reference.dense())));
    }
    fit_series(k, norms)
}

/// Same fit for an arbitrary series.
pub fn fit_series(k: Vec<u32>, norms: Vec<f64>) -> Result<DecayFit> {
    let used: Vec<bool> = norms.iter().map(|&v| v >= NOISE_FLOOR).collect();
    let count = used.iter().filter(|&&u| u).count();
    if count == 0 {
        return Err(Error::AllBelowNoiseFloor);
    }
    if count < MIN_POINTS {
        return Err(Error::InsufficientPoints(count));
    }
    let (x, y): (Vec<f64>, Vec<f64>) = k
        .iter()
        .zip(&norms)
        .zip(&used)
        .filter(|(_, &u)| u)
        .map(|((&k, &v), _)| (k as f64, v.ln()))
        .unzip();
    let (slope, intercept) = ols(&x, &y);
    let ssr: f64 = x
        .iter()
        .zip(&y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let se = (ssr / (m - 2.0) / sxx).sqrt();
    let tail_sigma = (x.len() >= TAIL_POINTS + 2).then(|| {
        let s = x.len() - TAIL_POINTS;
        (-ols(&x[s..], &y[s..]).0).exp()
    });
    Ok(DecayFit {
        k,
        norms,
        used,
        slope,
        intercept,
        sigma: (-slope).exp(),
        c: intercept.exp(),
        residual: (ssr / m).sqrt(),
        sigma_band: ((-(slope + 1.96 * se)).exp(), (-(slope - 1.96 * se)).exp()),
        tail_sigma,
    })
}
