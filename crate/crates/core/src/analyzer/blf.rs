//! Basic limit functions of the regular masks.

use serde::{Deserialize, Serialize};

use crate::grid::{Grid2, Support};
use crate::schemes::SubdivisionScheme;
use crate::{Error, Result};

/// φ_k sampled after L refinements of the delta sequence at level k.
#[derive(Clone, Debug, PartialEq)]
pub struct BLFSample {
    pub start_level: u32,
    pub depth: u32,
    pub values: Grid2,
    /// 2^L (φ[I + e_j] - φ[I]) for j = 1, 2.
    pub differences: [Grid2; 2],
}

/// Partition-of-unity check: sums of the grid over each of the 4^L cosets
/// of 2^L Z².
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionValue {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// max - min ≤ tol.
    pub constant: bool,
}

impl BLFSample {
    pub fn partition_value(&self, tol: f64) -> PartitionValue {
        let step = 1i64 << self.depth;
        let g = &self.values;
        let mut sums = vec![0.0; (step * step) as usize];
        let hi = g.hi();
        for i in g.lo[0]..=hi[0] {
            for j in g.lo[1]..=hi[1] {
                let r = i.rem_euclid(step) * step + j.rem_euclid(step);
                sums[r as usize] += g.get(i, j)[0];
            }
        }
        let min = sums.iter().copied().fold(f64::INFINITY, f64::min);
        let max = sums.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        PartitionValue {
            min,
            max,
            mean: sums.iter().sum::<f64>() / sums.len() as f64,
            constant: max - min <= tol,
        }
    }
}

/// Applies c^(k), …, c^(k+L-1) to the delta sequence at the origin.
pub fn basic_limit_function(
    scheme: &dyn SubdivisionScheme,
    k: u32,
    depth: u32,
) -> Result<BLFSample> {
    if depth < 4 {
        return Err(Error::InsufficientPoints(depth as usize));
    }
    let mut g = Grid2::zeros([0, 0], [1, 1], 1);
    g.get_mut(0, 0)[0] = 1.0;
    for l in 0..depth {
        g = g.refine(&scheme.regular_mask(k + l), Support::Full);
    }
    let scale = 2f64.powi(depth as i32);
    let diff = |axis: usize| {
        let mut d = g.clone();
        let hi = g.hi();
        for i in g.lo[0]..=hi[0] {
            for j in g.lo[1]..=hi[1] {
                let (ni, nj) = if axis == 0 { (i + 1, j) } else { (i, j + 1) };
                let next = if g.contains(ni, nj) {
                    g.get(ni, nj)[0]
                } else {
                    0.0
                };
                d.get_mut(i, j)[0] = scale * (next - g.get(i, j)[0]);
            }
        }
        d
    };
    let differences = [diff(0), diff(1)];
    Ok(BLFSample {
        start_level: k,
        depth,
        values: g,
        differences,
    })
}

/// sup |a - b| over the union of both grids (zero outside each).
pub fn sup_diff(a: &Grid2, b: &Grid2) -> f64 {
    let lo = [a.lo[0].min(b.lo[0]), a.lo[1].min(b.lo[1])];
    let (ha, hb) = (a.hi(), b.hi());
    let hi = [ha[0].max(hb[0]), ha[1].max(hb[1])];
    let at = |g: &Grid2, i: i64, j: i64| {
        if g.contains(i, j) {
            g.get(i, j)[0]
        } else {
            0.0
        }
    };
    let mut worst: f64 = 0.0;
    for i in lo[0]..=hi[0] {
        for j in lo[1]..=hi[1] {
            worst = worst.max((at(a, i, j) - at(b, i, j)).abs());
        }
    }
    worst
}
