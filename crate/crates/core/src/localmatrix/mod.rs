//! Block-circulant local subdivision matrices around extraordinary elements.

mod decay;
mod eigen;
mod limit;
pub(crate) mod spectrum;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::schemes::{BlockSet, SubdivisionScheme};
use crate::{Error, Result, Vec3};

pub use decay::{decay_fit, fit_series, DecayFit, NOISE_FLOOR};
pub use eigen::complex_eigenvalues;
pub use limit::{limit_point, LimitOptions, LimitPoint};
pub use spectrum::{
    dense_eigenvalues, spectrum, spectrum_of_matrix, EigenCluster, Spectrum, SpectrumFlags,
    SpectrumOptions,
};

/// S = Circ(B_0, …, B_{n-1}): row block i, column block j holds B_{(j-i) mod n}.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockCirculantMatrix {
    n: usize,
    m: usize,
    blocks: Vec<DMatrix<f64>>,
    dense: DMatrix<f64>,
    /// S̃ of size p·n+1 for vertex-centred matrices.
    compact: Option<DMatrix<f64>>,
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    n: usize,
    m: usize,
    vertex_centred: bool,
    blocks: Vec<Vec<Vec<f64>>>,
}

impl Serialize for BlockCirculantMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            n: self.n,
            m: self.m,
            vertex_centred: self.compact.is_some(),
            blocks: self.blocks.iter().map(rows_of).collect(),
        }
        .serialize(s)
    }
}

pub(crate) fn rows_of(b: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..b.nrows())
        .map(|r| (0..b.ncols()).map(|c| b[(r, c)]).collect())
        .collect()
}

fn circulant(blocks: &[DMatrix<f64>]) -> DMatrix<f64> {
    let n = blocks.len();
    let m = blocks[0].nrows();
    let mut dense = DMatrix::zeros(n * m, n * m);
    for i in 0..n {
        for j in 0..n {
            let b = &blocks[(j + n - i) % n];
            dense.view_mut((i * m, j * m), (m, m)).copy_from(b);
        }
    }
    dense
}

/// Face-centred matrix from B_0 … B_{n-1}.
pub fn assemble_face_matrix(blocks: &[DMatrix<f64>]) -> Result<BlockCirculantMatrix> {
    let n = blocks.len();
    if n < 3 {
        return Err(Error::UnsupportedValence(n));
    }
    let m = blocks[0].nrows();
    if blocks.iter().any(|b| b.nrows() != m || b.ncols() != m) {
        return Err(Error::ShapeMismatch(
            "blocks must be equal-size squares".into(),
        ));
    }
    Ok(BlockCirculantMatrix {
        n,
        m,
        dense: circulant(blocks),
        blocks: blocks.to_vec(),
        compact: None,
    })
}

/// Vertex-centred matrix: B_j = [[α̃/n, β̃ᵀ], [γ̃/n, B̃_j]], which acts on the
/// control vector with the centre repeated once per sector.
pub fn assemble_vertex_matrix(
    alpha: f64,
    beta: &DVector<f64>,
    gamma: &DVector<f64>,
    blocks: &[DMatrix<f64>],
) -> Result<BlockCirculantMatrix> {
    let n = blocks.len();
    if n < 3 {
        return Err(Error::UnsupportedValence(n));
    }
    let p = beta.len();
    if gamma.len() != p || blocks.iter().any(|b| b.nrows() != p || b.ncols() != p) {
        return Err(Error::ShapeMismatch(format!(
            "beta {}, gamma {}, blocks must be {p}x{p}",
            beta.len(),
            gamma.len()
        )));
    }
    let nf = n as f64;
    let full: Vec<DMatrix<f64>> = blocks
        .iter()
        .map(|bt| {
            let mut b = DMatrix::zeros(p + 1, p + 1);
            b[(0, 0)] = alpha / nf;
            for s in 0..p {
                b[(0, s + 1)] = beta[s];
                b[(s + 1, 0)] = gamma[s] / nf;
            }
            b.view_mut((1, 1), (p, p)).copy_from(bt);
            b
        })
        .collect();
    let mut compact = DMatrix::zeros(p * n + 1, p * n + 1);
    compact[(0, 0)] = alpha;
    for j in 0..n {
        for s in 0..p {
            compact[(0, 1 + j * p + s)] = beta[s];
            compact[(1 + j * p + s, 0)] = gamma[s];
        }
    }
    for i in 0..n {
        for j in 0..n {
            compact
                .view_mut((1 + i * p, 1 + j * p), (p, p))
                .copy_from(&blocks[(j + n - i) % n]);
        }
    }
    Ok(BlockCirculantMatrix {
        n,
        m: p + 1,
        dense: circulant(&full),
        blocks: full,
        compact: Some(compact),
    })
}

impl BlockCirculantMatrix {
    pub fn from_blocks(set: &BlockSet) -> Result<Self> {
        match set {
            BlockSet::Dual { blocks } => assemble_face_matrix(blocks),
            BlockSet::Primal {
                alpha,
                beta,
                gamma,
                blocks,
            } => assemble_vertex_matrix(*alpha, beta, gamma, blocks),
        }
    }

    pub fn valence(&self) -> usize {
        self.n
    }

    pub fn block_size(&self) -> usize {
        self.m
    }

    pub fn size(&self) -> usize {
        self.n * self.m
    }

    pub fn blocks(&self) -> &[DMatrix<f64>] {
        &self.blocks
    }

    pub fn dense(&self) -> &DMatrix<f64> {
        &self.dense
    }

    /// S̃ for vertex-centred matrices.
    pub fn compact(&self) -> Option<&DMatrix<f64>> {
        self.compact.as_ref()
    }

    pub fn is_vertex_centred(&self) -> bool {
        self.compact.is_some()
    }

    pub fn norm_inf(&self) -> f64 {
        norm_inf(&self.dense)
    }

    /// Σ_i ‖B_i‖∞, an upper bound for ‖S‖∞.
    pub fn block_norm_sum(&self) -> f64 {
        self.blocks.iter().map(norm_inf).sum()
    }

    /// S·d for an N×3 control vector.
    pub fn apply(&self, d: &[Vec3]) -> Result<Vec<Vec3>> {
        if d.len() != self.size() {
            return Err(Error::ShapeMismatch(format!(
                "{} rows for a {}x{} matrix",
                d.len(),
                self.size(),
                self.size()
            )));
        }
        Ok(from_points_matrix(&(&self.dense * to_points_matrix(d))))
    }

    /// Ŝ_l = Σ_j B_j ω^{jl}, ω = e^{2πi/n}, for l = 0..n-1.
    pub fn fourier_blocks(&self) -> Vec<DMatrix<Complex64>> {
        fourier_block_diagonalize(self)
    }
}

/// Ŝ_l = Σ_j B_j ω^{jl} with ω = e^{2πi/n}, l = 0..n-1. The vector
/// (z, ω^l z, ω^{2l} z, …) is an eigenvector of S whenever z is one of Ŝ_l.
pub fn fourier_block_diagonalize(s: &BlockCirculantMatrix) -> Vec<DMatrix<Complex64>> {
    let n = s.n;
    (0..n)
        .map(|l| {
            let mut acc = DMatrix::<Complex64>::zeros(s.m, s.m);
            for (j, b) in s.blocks.iter().enumerate() {
                let w = Complex64::from_polar(
                    1.0,
                    2.0 * std::f64::consts::PI * ((j * l) % n) as f64 / n as f64,
                );
                acc += b.map(|x| Complex64::new(x, 0.0)) * w;
            }
            acc
        })
        .collect()
}

/// Max row sum of absolute values.
pub fn norm_inf(a: &DMatrix<f64>) -> f64 {
    a.row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub(crate) fn to_points_matrix(d: &[Vec3]) -> DMatrix<f64> {
    DMatrix::from_fn(d.len(), 3, |r, c| d[r][c])
}

pub(crate) fn from_points_matrix(m: &DMatrix<f64>) -> Vec<Vec3> {
    (0..m.nrows())
        .map(|r| [m[(r, 0)], m[(r, 1)], m[(r, 2)]])
        .collect()
}

/// Local matrix S_k of `scheme` at valence n.
pub fn local_matrix(
    scheme: &dyn SubdivisionScheme,
    k: u32,
    n: usize,
) -> Result<BlockCirculantMatrix> {
    BlockCirculantMatrix::from_blocks(&scheme.local_blocks(k, n)?)
}

/// S^(k) = S_k S_{k-1} ⋯ S_1 (identity for k = 0), dense.
pub fn product_chain(scheme: &dyn SubdivisionScheme, n: usize, k: u32) -> Result<DMatrix<f64>> {
    let size = n * match scheme.kind() {
        crate::schemes::SchemeKind::Dual => scheme.sector_size(),
        crate::schemes::SchemeKind::Primal => scheme.sector_size() + 1,
    };
    let mut acc = DMatrix::identity(size, size);
    for j in 1..=k {
        acc = local_matrix(scheme, j, n)?.dense() * acc;
    }
    Ok(acc)
}

/// Residual and scale of M^(k) = M^k + Σ_{j=1}^{k} M^{k-j}(M_j - M)M^(j-1),
/// where `ms[j-1]` is M_j.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceCheck {
    pub residual: f64,
    /// Largest ∞-norm among the products formed on either side.
    pub scale: f64,
}

pub fn recurrence_check(
    ms: &[DMatrix<f64>],
    m: &DMatrix<f64>,
    k: usize,
) -> Result<RecurrenceCheck> {
    let size = m.nrows();
    if ms.len() < k
        || ms
            .iter()
            .chain([m])
            .any(|x| x.nrows() != size || x.ncols() != size)
    {
        return Err(Error::ShapeMismatch(
            "need k square matrices of equal size".into(),
        ));
    }
    let mut scale: f64 = 0.0;
    // prods[j] = M^(j), pows[j] = M^j
    let mut prods = vec![DMatrix::identity(size, size)];
    let mut pows = vec![DMatrix::identity(size, size)];
    for j in 1..=k {
        prods.push(&ms[j - 1] * &prods[j - 1]);
        pows.push(m * &pows[j - 1]);
        scale = scale.max(norm_inf(&prods[j])).max(norm_inf(&pows[j]));
    }
    let mut rhs = pows[k].clone();
    for j in 1..=k {
        let term = &pows[k - j] * (&ms[j - 1] - m) * &prods[j - 1];
        scale = scale.max(norm_inf(&term));
        rhs += term;
    }
    Ok(RecurrenceCheck {
        residual: norm_inf(&(&prods[k] - rhs)),
        scale,
    })
}

/// ‖M^(k) - (M^k + Σ_j M^{k-j}(M_j - M)M^(j-1))‖∞.
pub fn recurrence_residual(ms: &[DMatrix<f64>], m: &DMatrix<f64>, k: usize) -> Result<f64> {
    Ok(recurrence_check(ms, m, k)?.residual)
}
