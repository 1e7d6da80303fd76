//! Bivariate masks, Laurent symbols, the subdivision operator norm,
//! divided-difference factorization and asymptotic equivalence.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Remainder tolerance for symbol division.
pub const DIVISIBILITY_TOL: f64 = 1e-12;
/// Largest imaginary part accepted when reading a symbol back as a mask.
pub const REALNESS_TOL: f64 = 1e-12;

/// Finite mask c_α stored row-major; `data[i * dims[1] + j]` is the
/// coefficient at α = offset + (i, j). The first index pairs with z₁.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mask2D {
    pub offset: [i64; 2],
    pub dims: [usize; 2],
    pub data: Vec<f64>,
}

impl Mask2D {
    pub fn new(offset: [i64; 2], rows: &[Vec<f64>]) -> Self {
        let dims = [rows.len(), rows.first().map_or(0, Vec::len)];
        assert!(rows.iter().all(|r| r.len() == dims[1]), "ragged mask rows");
        Mask2D {
            offset,
            dims,
            data: rows.concat(),
        }
    }

    pub fn zeros(offset: [i64; 2], dims: [usize; 2]) -> Self {
        Mask2D {
            offset,
            dims,
            data: vec![0.0; dims[0] * dims[1]],
        }
    }

    /// Tensor product u ⊗ v with u indexed from `offset[0]`, v from `offset[1]`.
    pub fn tensor(offset: [i64; 2], u: &[f64], v: &[f64]) -> Self {
        let rows: Vec<Vec<f64>> = u
            .iter()
            .map(|&a| v.iter().map(|&b| a * b).collect())
            .collect();
        Mask2D::new(offset, &rows)
    }

    /// Coefficient at absolute index α (zero outside the support).
    pub fn coeff(&self, a: [i64; 2]) -> f64 {
        let i = a[0] - self.offset[0];
        let j = a[1] - self.offset[1];
        if i < 0 || j < 0 || i >= self.dims[0] as i64 || j >= self.dims[1] as i64 {
            return 0.0;
        }
        self.data[i as usize * self.dims[1] + j as usize]
    }

    /// Last index per axis (inclusive).
    pub fn hi(&self) -> [i64; 2] {
        [
            self.offset[0] + self.dims[0] as i64 - 1,
            self.offset[1] + self.dims[1] as i64 - 1,
        ]
    }

    pub fn scaled(&self, s: f64) -> Mask2D {
        Mask2D {
            offset: self.offset,
            dims: self.dims,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    /// a - b on the union of both supports.
    pub fn sub(&self, other: &Mask2D) -> Mask2D {
        let lo = [
            self.offset[0].min(other.offset[0]),
            self.offset[1].min(other.offset[1]),
        ];
        let (ha, hb) = (self.hi(), other.hi());
        let hi = [ha[0].max(hb[0]), ha[1].max(hb[1])];
        let dims = [(hi[0] - lo[0] + 1) as usize, (hi[1] - lo[1] + 1) as usize];
        let mut out = Mask2D::zeros(lo, dims);
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                let a = [lo[0] + i as i64, lo[1] + j as i64];
                out.data[i * dims[1] + j] = self.coeff(a) - other.coeff(a);
            }
        }
        out
    }

    /// Σ_β c_{α-2β} for the cosets α = (0,0), (0,1), (1,0), (1,1).
    pub fn coset_sums(&self) -> [f64; 4] {
        self.coset_fold(|x| x)
    }

    fn coset_fold(&self, f: impl Fn(f64) -> f64) -> [f64; 4] {
        let mut s = [0.0; 4];
        for i in 0..self.dims[0] {
            for j in 0..self.dims[1] {
                let a0 = (self.offset[0] + i as i64).rem_euclid(2) as usize;
                let a1 = (self.offset[1] + j as i64).rem_euclid(2) as usize;
                s[2 * a0 + a1] += f(self.data[i * self.dims[1] + j]);
            }
        }
        s
    }

    pub fn sup_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn to_symbol(&self) -> LaurentSymbol {
        LaurentSymbol {
            offset: self.offset,
            dims: self.dims,
            data: self.data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }
}

/// ‖S_c‖∞: the largest coset sum of |c|.
pub fn operator_norm(c: &Mask2D) -> f64 {
    c.coset_fold(f64::abs).into_iter().fold(0.0, f64::max)
}

/// sup_α |a_α - b_α| with supports aligned by their offsets.
pub fn mask_distance(a: &Mask2D, b: &Mask2D) -> f64 {
    a.sub(b).sup_norm()
}

/// Mask of the composed operator S_{c_L} ⋯ S_{c_1}, whose symbol is
/// c_L(z) c_{L-1}(z²) ⋯ c_1(z^{2^{L-1}}).
pub fn iterated_mask(masks: &[Mask2D]) -> Mask2D {
    let mut acc = match masks.first() {
        Some(m) => m.clone(),
        None => return Mask2D::new([0, 0], &[vec![1.0]]),
    };
    for c in &masks[1..] {
        // new[I] = Σ_β c[I - 2β] acc[β]  (acc is the mask of the first steps)
        let lo = [
            2 * acc.offset[0] + c.offset[0],
            2 * acc.offset[1] + c.offset[1],
        ];
        let dims = [
            2 * (acc.dims[0] - 1) + c.dims[0],
            2 * (acc.dims[1] - 1) + c.dims[1],
        ];
        let mut out = Mask2D::zeros(lo, dims);
        for i in 0..acc.dims[0] {
            for j in 0..acc.dims[1] {
                let w = acc.data[i * acc.dims[1] + j];
                if w == 0.0 {
                    continue;
                }
                for a in 0..c.dims[0] {
                    for b in 0..c.dims[1] {
                        let r = 2 * i + a;
                        let s = 2 * j + b;
                        out.data[r * dims[1] + s] += w * c.data[a * c.dims[1] + b];
                    }
                }
            }
        }
        acc = out;
    }
    acc
}

/// ‖S_{c_L} ⋯ S_{c_1}‖∞: largest sum of |C| over the cosets modulo 2^L.
pub fn iterated_operator_norm(masks: &[Mask2D]) -> f64 {
    let c = iterated_mask(masks);
    let q = 1i64 << masks.len();
    let mut sums = vec![0.0; (q * q) as usize];
    for i in 0..c.dims[0] {
        for j in 0..c.dims[1] {
            let a0 = (c.offset[0] + i as i64).rem_euclid(q);
            let a1 = (c.offset[1] + j as i64).rem_euclid(q);
            sums[(a0 * q + a1) as usize] += c.data[i * c.dims[1] + j].abs();
        }
    }
    sums.into_iter().fold(0.0, f64::max)
}

/// Direction of a divided difference.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    E1,
    E2,
}

impl Direction {
    pub fn axis(self) -> usize {
        match self {
            Direction::E1 => 0,
            Direction::E2 => 1,
        }
    }
}

/// c(z) = Σ c_α z^α with complex coefficients, same layout as [`Mask2D`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaurentSymbol {
    pub offset: [i64; 2],
    pub dims: [usize; 2],
    pub data: Vec<Complex64>,
}

impl LaurentSymbol {
    /// p(z₁) q(z₂) with p, q given as coefficient lists starting at the offsets.
    pub fn tensor(offset: [i64; 2], p: &[Complex64], q: &[Complex64]) -> Self {
        let mut data = Vec::with_capacity(p.len() * q.len());
        for a in p {
            for b in q {
                data.push(a * b);
            }
        }
        LaurentSymbol {
            offset,
            dims: [p.len(), q.len()],
            data,
        }
    }

    pub fn coeff(&self, a: [i64; 2]) -> Complex64 {
        let i = a[0] - self.offset[0];
        let j = a[1] - self.offset[1];
        if i < 0 || j < 0 || i >= self.dims[0] as i64 || j >= self.dims[1] as i64 {
            return Complex64::new(0.0, 0.0);
        }
        self.data[i as usize * self.dims[1] + j as usize]
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        LaurentSymbol {
            offset: self.offset,
            dims: self.dims,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    /// Product with (1 + z_j).
    pub fn times_one_plus(&self, dir: Direction) -> Self {
        let ax = dir.axis();
        let mut dims = self.dims;
        dims[ax] += 1;
        let mut data = vec![Complex64::new(0.0, 0.0); dims[0] * dims[1]];
        for i in 0..self.dims[0] {
            for j in 0..self.dims[1] {
                let v = self.data[i * self.dims[1] + j];
                data[i * dims[1] + j] += v;
                let (si, sj) = if ax == 0 { (i + 1, j) } else { (i, j + 1) };
                data[si * dims[1] + sj] += v;
            }
        }
        LaurentSymbol {
            offset: self.offset,
            dims,
            data,
        }
    }

    /// Reads the coefficients back as a real mask.
    pub fn to_mask(&self) -> Result<Mask2D> {
        let worst = self.data.iter().fold(0.0, |m: f64, c| m.max(c.im.abs()));
        if worst > REALNESS_TOL {
            return Err(Error::NonRealSymbol(worst));
        }
        Ok(Mask2D {
            offset: self.offset,
            dims: self.dims,
            data: self.data.iter().map(|c| c.re).collect(),
        })
    }

    pub fn max_abs_diff(&self, other: &LaurentSymbol) -> f64 {
        let lo = [
            self.offset[0].min(other.offset[0]),
            self.offset[1].min(other.offset[1]),
        ];
        let hi = [
            (self.offset[0] + self.dims[0] as i64).max(other.offset[0] + other.dims[0] as i64),
            (self.offset[1] + self.dims[1] as i64).max(other.offset[1] + other.dims[1] as i64),
        ];
        let mut worst: f64 = 0.0;
        for a in lo[0]..hi[0] {
            for b in lo[1]..hi[1] {
                worst = worst.max((self.coeff([a, b]) - other.coeff([a, b])).norm());
            }
        }
        worst
    }
}

/// Multiplies 1-D polynomials given by coefficient lists (lowest power first).
pub fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// b with 2c(z) = (1 + z_j) b(z), by synthetic division along axis j:
/// b_0 = 2c_0, b_i = 2c_i - b_{i-1}; the remainder 2c_M - b_{M-1} must vanish.
pub fn divided_difference_symbol(c: &LaurentSymbol, dir: Direction) -> Result<LaurentSymbol> {
    let ax = dir.axis();
    let len = c.dims[ax];
    if len < 2 {
        let remainder = c.data.iter().fold(0.0, |m: f64, x| m.max(2.0 * x.norm()));
        if remainder > DIVISIBILITY_TOL {
            return Err(Error::NotDivisible {
                direction: ax + 1,
                remainder,
            });
        }
        let mut dims = c.dims;
        dims[ax] = 1;
        return Ok(LaurentSymbol {
            offset: c.offset,
            dims,
            data: vec![Complex64::new(0.0, 0.0); dims[0] * dims[1]],
        });
    }
    let other = c.dims[1 - ax];
    let mut dims = c.dims;
    dims[ax] = len - 1;
    let mut data = vec![Complex64::new(0.0, 0.0); dims[0] * dims[1]];
    let at = |d: [usize; 2], i: usize, o: usize| if ax == 0 { i * d[1] + o } else { o * d[1] + i };
    let mut worst: f64 = 0.0;
    for o in 0..other {
        let mut prev = Complex64::new(0.0, 0.0);
        for i in 0..len - 1 {
            let b = 2.0 * c.data[at(c.dims, i, o)] - prev;
            data[at(dims, i, o)] = b;
            prev = b;
        }
        let rem = 2.0 * c.data[at(c.dims, len - 1, o)] - prev;
        worst = worst.max(rem.norm());
    }
    if worst > DIVISIBILITY_TOL {
        return Err(Error::NotDivisible {
            direction: ax + 1,
            remainder: worst,
        });
    }
    Ok(LaurentSymbol {
        offset: c.offset,
        dims,
        data,
    })
}

/// True iff c(z) is divisible by both (1 + z₁) and (1 + z₂).
pub fn has_smoothing_factor(c: &LaurentSymbol) -> bool {
    divided_difference_symbol(c, Direction::E1).is_ok()
        && divided_difference_symbol(c, Direction::E2).is_ok()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Converged,
    Diverging,
    Inconclusive,
}

/// Partial sums of (2^k)^order · ‖S_{c^(k)} - S_c‖∞.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceEstimate {
    pub order: u32,
    pub k_max: u32,
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    /// Geometric ratio fitted over the last ten nonzero terms.
    pub tail_ratio: Option<f64>,
    pub verdict: Verdict,
}

impl EquivalenceEstimate {
    pub fn total(&self) -> f64 {
        self.partial_sums.last().copied().unwrap_or(0.0)
    }

    /// Rows (k, term, partial sum).
    pub fn rows(&self) -> Vec<(u32, f64, f64)> {
        (0..self.terms.len())
            .map(|i| (i as u32 + 1, self.terms[i], self.partial_sums[i]))
            .collect()
    }
}

/// Least-squares slope and intercept of y against x.
pub(crate) fn ols(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Asymptotic equivalence of order 0 or 1 between the level masks and a
/// stationary reference, summed for k = 1..=k_max.
pub fn asymptotic_equivalence(
    order: u32,
    masks: &dyn Fn(u32) -> Mask2D,
    reference: &Mask2D,
    k_max: u32,
) -> EquivalenceEstimate {
    assert!(k_max >= 8, "k_max must be at least 8");
    let mut terms = Vec::with_capacity(k_max as usize);
    let mut partial_sums = Vec::with_capacity(k_max as usize);
    let mut acc = 0.0;
    for k in 1..=k_max {
        let t = 2f64.powi((k * order) as i32) * operator_norm(&masks(k).sub(reference));
        acc += t;
        terms.push(t);
        partial_sums.push(acc);
    }
    let tail = &terms[terms.len() - 10..];
    let first_k = k_max - 9;
    let (tail_ratio, verdict) = if tail.iter().all(|&t| t == 0.0) {
        (None, Verdict::Converged)
    } else {
        let pts: Vec<(f64, f64)> = tail
            .iter()
            .enumerate()
            .filter(|(_, &t)| t > 0.0)
            .map(|(i, &t)| ((first_k + i as u32) as f64, t.ln()))
            .collect();
        if pts.len() < 3 {
            let last = *terms.last().unwrap();
            let v = if last < 1e-10 * acc {
                Verdict::Converged
            } else {
                Verdict::Inconclusive
            };
            (None, v)
        } else {
            let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
            let ratio = ols(&x, &y).0.exp();
            let last = *terms.last().unwrap();
            let v = if ratio < 1.0 && last < 1e-10 * acc {
                Verdict::Converged
            } else if ratio >= 1.0 {
                Verdict::Diverging
            } else {
                Verdict::Inconclusive
            };
            (Some(ratio), v)
        }
    };
    EquivalenceEstimate {
        order,
        k_max,
        terms,
        partial_sums,
        tail_ratio,
        verdict,
    }
}
