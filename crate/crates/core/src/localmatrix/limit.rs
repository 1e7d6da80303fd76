//! Limit point r_c = q₀ + β₀ of a non-stationary scheme at an extraordinary
//! element.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{decay_fit, local_matrix, spectrum, to_points_matrix, SpectrumOptions};
use crate::schemes::SubdivisionScheme;
use crate::{Error, Result, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitOptions {
    /// Stop once ‖y_{k+1} - y_k‖∞ < tol·‖d₁‖∞.
    pub tol: f64,
    pub k_max: usize,
    /// Run the spectrum and decay gates first.
    pub check_gates: bool,
    pub spectrum: SpectrumOptions,
}

impl Default for LimitOptions {
    fn default() -> Self {
        LimitOptions {
            tol: 1e-13,
            k_max: 200,
            check_gates: true,
            spectrum: SpectrumOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitPoint {
    pub q0: Vec3,
    pub beta0: Vec3,
    pub r_c: Vec3,
    /// Number of y_k computed.
    pub iterations: usize,
    /// ‖y_{k+1} - y_k‖∞, k = 1, 2, …
    pub increments: Vec<f64>,
    /// Successive quotients of `increments`.
    pub increment_ratios: Vec<f64>,
    /// ‖x̃₀ᵀ(y_{k+1} - y_k)‖₁, the increment of the limit-point estimate.
    pub projected_increments: Vec<f64>,
    pub projected_ratios: Vec<f64>,
    /// ‖y_k - 1·β₀ᵀ‖∞, k = 1, 2, …
    pub deviations: Vec<f64>,
}

fn norm_rows(m: &DMatrix<f64>) -> f64 {
    super::norm_inf(m)
}

fn ratios(v: &[f64]) -> Vec<f64> {
    v.windows(2)
        .map(|w| if w[0] == 0.0 { 0.0 } else { w[1] / w[0] })
        .collect()
}

fn to_vec3(v: &nalgebra::RowDVector<f64>) -> Vec3 {
    [v[0], v[1], v[2]]
}

/// Computes q₀ = d₁ᵀx̃₀ from the stationary reference and β₀ from the limit
/// of y_k = S^(k)d₁ - S^k d₁.
pub fn limit_point(
    scheme: &dyn SubdivisionScheme,
    n: usize,
    d1: &[Vec3],
    opts: &LimitOptions,
) -> Result<LimitPoint> {
    let reference = local_matrix(&scheme.reference(), 1, n)?;
    if d1.len() != reference.size() {
        return Err(Error::ShapeMismatch(format!(
            "{} control points, expected {}",
            d1.len(),
            reference.size()
        )));
    }
    let spec = spectrum(&reference, &opts.spectrum)?;
    if opts.check_gates {
        if !spec.flags.convergence_gate() {
            return Err(Error::GateFailed(format!(
                "stationary spectrum at n = {n}: {:?}",
                spec.flags
            )));
        }
        if !scheme.is_stationary() {
            match decay_fit(scheme, n, 1..=15) {
                Ok(f) if f.sigma > 1.0 => {}
                Err(Error::AllBelowNoiseFloor) => {}
                Ok(f) => {
                    return Err(Error::GateFailed(format!(
                        "decay sigma {} <= 1 at n = {n}",
                        f.sigma
                    )))
                }
                Err(e) => return Err(e),
            }
        }
    }

    let d = to_points_matrix(d1);
    let dnorm = norm_rows(&d);
    let xt = DVector::from_column_slice(&spec.x0_tilde);
    let x0 = DVector::from_column_slice(&spec.x0);
    let q0 = to_vec3(&(xt.transpose() * &d));
    let s = reference.dense();

    let mut p = local_matrix(scheme, 1, n)?.dense() * &d;
    let mut q = s * &d;
    let mut y = &p - &q;
    let mut ys = vec![y.clone()];
    let mut increments = Vec::new();
    let mut projected = Vec::new();
    let mut converged = dnorm == 0.0;
    let mut k = 1;
    while !converged && k < opts.k_max {
        k += 1;
        p = local_matrix(scheme, k as u32, n)?.dense() * &p;
        q = s * &q;
        let next = &p - &q;
        let diff = &next - &y;
        let inc = norm_rows(&diff);
        increments.push(inc);
        projected.push((xt.transpose() * &diff).iter().map(|x| x.abs()).sum());
        y = next;
        ys.push(y.clone());
        converged = inc < opts.tol * dnorm;
    }
    if !converged {
        return Err(Error::NotConverged {
            iterations: k,
            increment: increments.last().copied().unwrap_or(f64::NAN),
        });
    }
    let big_n = d1.len() as f64;
    let beta0 = to_vec3(&((x0.transpose() * &y) / big_n));
    let deviations = ys
        .iter()
        .map(|yk| {
            let mut m = yk.clone();
            for mut row in m.row_iter_mut() {
                for c in 0..3 {
                    row[c] -= beta0[c];
                }
            }
            norm_rows(&m)
        })
        .collect();
    Ok(LimitPoint {
        q0,
        beta0,
        r_c: [q0[0] + beta0[0], q0[1] + beta0[1], q0[2] + beta0[2]],
        iterations: ys.len(),
        increment_ratios: ratios(&increments),
        projected_ratios: ratios(&projected),
        increments,
        projected_increments: projected,
        deviations,
    })
}
