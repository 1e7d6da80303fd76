//! Eigenvalues, multiplicities and the dominant/subdominant eigenvectors of
//! local subdivision matrices.

use faer::complex_native::c64;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{complex_eigenvalues, fourier_block_diagonalize, norm_inf, BlockCirculantMatrix};
use crate::{Error, Result};

/// Tolerances relative to ‖S‖∞.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumOptions {
    /// Eigenvalues closer than this (times ‖S‖∞) form one cluster.
    pub cluster_tol: f64,
    /// Singular values below this (times ‖S‖∞) count as zero.
    pub rank_tol: f64,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions {
            cluster_tol: 1e-8,
            rank_tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenCluster {
    /// Mean of the members.
    pub value: Complex64,
    pub algebraic: usize,
    /// Dimension of the numerical null space of S - λI; only computed for
    /// the dominant and subdominant clusters.
    pub geometric: Option<usize>,
    /// Largest distance of a member from the mean.
    pub spread: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumFlags {
    pub dominant_is_one: bool,
    pub dominant_simple: bool,
    pub all_ones_eigenvector: bool,
    pub subdominant_real: bool,
    pub subdominant_double: bool,
    pub subdominant_nondefective: bool,
    /// Every other eigenvalue is strictly smaller in modulus than λ₁.
    pub subdominant_gap: bool,
}

impl SpectrumFlags {
    /// λ₀ = 1 simple with eigenvector (1, …, 1).
    pub fn convergence_gate(&self) -> bool {
        self.dominant_is_one && self.dominant_simple && self.all_ones_eigenvector
    }

    /// Convergence gate plus λ₁ real, double, non-defective and isolated.
    pub fn normal_gate(&self) -> bool {
        self.convergence_gate()
            && self.subdominant_real
            && self.subdominant_double
            && self.subdominant_nondefective
            && self.subdominant_gap
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub size: usize,
    pub norm_inf: f64,
    /// Sorted by decreasing modulus, then real part, then imaginary part.
    pub eigenvalues: Vec<Complex64>,
    pub clusters: Vec<EigenCluster>,
    pub lambda0: Complex64,
    pub lambda1: Option<Complex64>,
    /// Largest modulus outside the λ₀ and λ₁ clusters (and λ₁'s conjugate).
    pub lambda2_modulus: Option<f64>,
    /// Right eigenvector for λ₀, scaled to sum to its length.
    pub x0: Vec<f64>,
    /// Left eigenvector for λ₀ with x̃₀ᵀx₀ = 1.
    pub x0_tilde: Vec<f64>,
    /// max_i |x₀[i] - 1|.
    pub x0_ones_deviation: f64,
    /// ‖x̃₀ᵀS - λ₀x̃₀ᵀ‖∞.
    pub left_residual: f64,
    /// x₁⁰, x₁¹ when λ₁ is real and double.
    pub subdominant_vectors: Option<[Vec<f64>; 2]>,
    pub min_singular_value: f64,
    pub flags: SpectrumFlags,
}

/// Eigenvalues of S through a dense real Schur decomposition; the compact
/// S̃ is used for vertex-centred matrices.
pub fn dense_eigenvalues(s: &BlockCirculantMatrix) -> Vec<Complex64> {
    sort_eigenvalues(real_eigenvalues(s.compact().unwrap_or(s.dense())))
}

/// Eigenvalues of a real matrix through faer's real Schur route.
pub(crate) fn real_eigenvalues(a: &DMatrix<f64>) -> Vec<Complex64> {
    let m = faer::Mat::<f64>::from_fn(a.nrows(), a.ncols(), |r, c| a[(r, c)]);
    m.eigenvalues::<c64>()
        .into_iter()
        .map(|z| Complex64::new(z.re, z.im))
        .collect()
}

fn sort_eigenvalues(mut v: Vec<Complex64>) -> Vec<Complex64> {
    v.sort_by(|a, b| {
        let (ma, mb) = (a.norm(), b.norm());
        if (ma - mb).abs() > 1e-12 * ma.max(mb).max(1.0) {
            mb.total_cmp(&ma)
        } else {
            b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im))
        }
    });
    v
}

/// Fourier-route eigenvalues: Ŝ₀ in full and, for vertex-centred matrices,
/// the p×p trailing blocks of Ŝ_l for l ≠ 0 (their first row and column
/// vanish). The multiset equals the spectrum of S̃.
fn fourier_eigenvalues(s: &BlockCirculantMatrix) -> Vec<Complex64> {
    let blocks = fourier_block_diagonalize(s);
    let mut eig = Vec::with_capacity(s.size());
    for (l, b) in blocks.iter().enumerate() {
        if s.is_vertex_centred() && l != 0 {
            let p = b.nrows() - 1;
            eig.extend(complex_eigenvalues(&b.view((1, 1), (p, p)).into_owned()));
        } else {
            eig.extend(complex_eigenvalues(b));
        }
    }
    sort_eigenvalues(eig)
}

fn cluster(eigs: &[Complex64], tol: f64) -> Vec<EigenCluster> {
    let mut groups: Vec<Vec<Complex64>> = Vec::new();
    for &z in eigs {
        match groups.iter_mut().find(|g| (g[0] - z).norm() <= tol) {
            Some(g) => g.push(z),
            None => groups.push(vec![z]),
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let mean = g.iter().sum::<Complex64>() / g.len() as f64;
            EigenCluster {
                value: mean,
                algebraic: g.len(),
                geometric: None,
                spread: g.iter().map(|z| (z - mean).norm()).fold(0.0, f64::max),
            }
        })
        .collect()
}

/// Singular values of a complex matrix, ascending.
fn complex_singular_values(a: &DMatrix<Complex64>) -> Vec<f64> {
    let m = faer::Mat::<c64>::from_fn(a.nrows(), a.ncols(), |r, c| {
        c64::new(a[(r, c)].re, a[(r, c)].im)
    });
    let mut v: Vec<f64> = m.singular_values();
    v.sort_by(f64::total_cmp);
    v
}

/// Singular values (ascending) and the matching right singular vectors as
/// rows.
fn real_sorted_svd(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let m = faer::Mat::<f64>::from_fn(a.nrows(), a.ncols(), |r, c| a[(r, c)]);
    let svd = m.svd();
    let s = svd.s_diagonal();
    let v = svd.v();
    let mut idx: Vec<usize> = (0..s.nrows()).collect();
    idx.sort_by(|&i, &j| s.read(i).total_cmp(&s.read(j)));
    let vals = idx.iter().map(|&i| s.read(i)).collect();
    let rows = DMatrix::from_fn(idx.len(), v.nrows(), |r, c| v.read(c, idx[r]));
    (vals, rows)
}

fn shifted(a: &DMatrix<f64>, lambda: Complex64) -> DMatrix<Complex64> {
    let mut m = a.map(|x| Complex64::new(x, 0.0));
    for i in 0..m.nrows() {
        m[(i, i)] -= lambda;
    }
    m
}

fn geometric_multiplicity(a: &DMatrix<f64>, lambda: Complex64, thresh: f64) -> usize {
    complex_singular_values(&shifted(a, lambda))
        .iter()
        .filter(|&&s| s <= thresh)
        .count()
}

/// Null vector of a - λI for real λ (smallest right singular vector).
fn real_null_vector(a: &DMatrix<f64>, lambda: f64) -> Vec<f64> {
    let mut m = a.clone();
    for i in 0..m.nrows() {
        m[(i, i)] -= lambda;
    }
    let (_, rows) = real_sorted_svd(&m);
    rows.row(0).iter().copied().collect()
}

/// Spectrum of a block-circulant local subdivision matrix. Eigenvalues come
/// from the Fourier blocks; x₀ and x̃₀ from Ŝ₀; ranks and x₁⁰, x₁¹ from S
/// (S̃ for vertex-centred matrices).
pub fn spectrum(s: &BlockCirculantMatrix, opts: &SpectrumOptions) -> Result<Spectrum> {
    let a = s.compact().unwrap_or(s.dense()).clone();
    let eigs = fourier_eigenvalues(s);
    let hat0 = fourier_block_diagonalize(s)[0].map(|z| z.re);
    let n = s.valence();
    let m = s.block_size();
    let vertex = s.is_vertex_centred();
    let replicate = |z: &[f64]| -> Vec<f64> { (0..n).flat_map(|_| z.iter().copied()).collect() };
    let expand = |v: &[f64]| -> Vec<f64> {
        if !vertex {
            return v.to_vec();
        }
        let p = m - 1;
        (0..n)
            .flat_map(|j| {
                std::iter::once(v[0]).chain(v[1 + j * p..1 + (j + 1) * p].iter().copied())
            })
            .collect()
    };
    analyze(
        s.dense(),
        &a,
        eigs,
        opts,
        |lambda| replicate(&real_null_vector(&hat0, lambda)),
        |lambda| replicate(&real_null_vector(&hat0.transpose(), lambda)),
        expand,
    )
}

/// Spectrum of an arbitrary square matrix through the dense route.
pub fn spectrum_of_matrix(a: &DMatrix<f64>, opts: &SpectrumOptions) -> Result<Spectrum> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::ShapeMismatch(
            "square non-empty matrix required".into(),
        ));
    }
    let eigs = sort_eigenvalues(real_eigenvalues(a));
    analyze(
        a,
        a,
        eigs,
        opts,
        |lambda| real_null_vector(a, lambda),
        |lambda| real_null_vector(&a.transpose(), lambda),
        |v| v.to_vec(),
    )
}

fn analyze(
    dense: &DMatrix<f64>,
    a: &DMatrix<f64>,
    eigs: Vec<Complex64>,
    opts: &SpectrumOptions,
    right0: impl Fn(f64) -> Vec<f64>,
    left0: impl Fn(f64) -> Vec<f64>,
    expand: impl Fn(&[f64]) -> Vec<f64>,
) -> Result<Spectrum> {
    let norm = norm_inf(dense);
    let scale = if norm > 0.0 { norm } else { 1.0 };
    let ctol = opts.cluster_tol * scale;
    let rtol = opts.rank_tol * scale;

    let (svals, _) = real_sorted_svd(a);
    let smin = svals[0];
    if smin <= rtol {
        return Err(Error::SingularMatrix(smin));
    }

    let mut clusters = cluster(&eigs, ctol);
    let lambda0 = clusters[0].value;
    let lambda1 = clusters.get(1).map(|c| c.value);
    for c in clusters.iter_mut().take(2) {
        c.geometric = Some(geometric_multiplicity(a, c.value, rtol));
    }
    let lambda2_modulus = lambda1.and_then(|l1| {
        clusters
            .iter()
            .skip(2)
            .filter(|c| (c.value - l1.conj()).norm() > ctol)
            .map(|c| c.value.norm())
            .fold(None, |acc: Option<f64>, x| {
                Some(acc.map_or(x, |a| a.max(x)))
            })
    });

    let l0 = lambda0.re;
    let mut x0 = right0(l0);
    let total: f64 = x0.iter().sum();
    if total != 0.0 {
        let f = x0.len() as f64 / total;
        x0.iter_mut().for_each(|x| *x *= f);
    }
    let x0_ones_deviation = x0.iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max);
    let mut x0_tilde = left0(l0);
    let dot: f64 = x0_tilde.iter().zip(&x0).map(|(a, b)| a * b).sum();
    if dot != 0.0 {
        x0_tilde.iter_mut().for_each(|x| *x /= dot);
    }
    let xt = nalgebra::DVector::from_column_slice(&x0_tilde);
    let left_residual = (dense.transpose() * &xt - &xt * l0).amax();

    let c0 = &clusters[0];
    let mut flags = SpectrumFlags {
        dominant_is_one: (lambda0 - 1.0).norm() <= ctol,
        dominant_simple: c0.algebraic == 1
            && clusters
                .get(1)
                .map_or(true, |c| c.value.norm() < lambda0.norm() - ctol),
        all_ones_eigenvector: x0_ones_deviation <= opts.cluster_tol,
        ..Default::default()
    };
    let mut subdominant_vectors = None;
    if let Some(c1) = clusters.get(1) {
        flags.subdominant_real = c1.value.im.abs() <= ctol;
        flags.subdominant_double = c1.algebraic == 2;
        flags.subdominant_nondefective = c1.geometric == Some(2);
        flags.subdominant_gap = lambda2_modulus.map_or(true, |m2| m2 < c1.value.norm() - ctol);
        if flags.subdominant_real && flags.subdominant_double {
            let mut m = a.clone();
            for i in 0..m.nrows() {
                m[(i, i)] -= c1.value.re;
            }
            let (_, rows) = real_sorted_svd(&m);
            let v0: Vec<f64> = rows.row(0).iter().copied().collect();
            let v1: Vec<f64> = rows.row(1).iter().copied().collect();
            subdominant_vectors = Some([expand(&v0), expand(&v1)]);
        }
    }

    Ok(Spectrum {
        size: dense.nrows(),
        norm_inf: norm,
        eigenvalues: eigs,
        clusters,
        lambda0,
        lambda1,
        lambda2_modulus,
        x0,
        x0_tilde,
        x0_ones_deviation,
        left_residual,
        subdominant_vectors,
        min_singular_value: smin,
        flags,
    })
}
