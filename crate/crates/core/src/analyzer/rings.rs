//! Surface rings around an extraordinary element, limit normals and the
//! characteristic map.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::grid::{canonical_loc, patch_row, Grid2, SectorLoc, Support};
use crate::localmatrix::{local_matrix, spectrum, to_points_matrix, SpectrumOptions};
use crate::mesh::LocalPatch;
use crate::schemes::{SchemeKind, SubdivisionScheme};
use crate::symbols::Mask2D;
use crate::{Error, Result, Vec3};

/// Lower corners of the three cells of a sector in level-(k+1) units; each
/// cell is a unit square.
pub const CELL_ORIGINS: [[i64; 2]; 3] = [[1, 0], [1, 1], [0, 1]];

/// One cell ω_k^[j] sampled on a res×res grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RingCell {
    pub sector: usize,
    /// 0: [1,2]×[0,1], 1: [1,2]², 2: [0,1]×[1,2] in level-(k+1) units.
    pub cell: usize,
    pub res: usize,
    /// Sample (i, j) at index i·res + j, i along u.
    pub points: Vec<Vec3>,
}

impl RingCell {
    pub fn point(&self, i: usize, j: usize) -> Vec3 {
        self.points[i * self.res + j]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RingSample {
    pub level: u32,
    pub depth: u32,
    pub res: usize,
    pub cells: Vec<RingCell>,
}

impl RingSample {
    /// (u, v) of sample (i, j) of a cell, in the sector frame. Cells cover
    /// 2^{1-k} ≤ max(u, v) ≤ 2^{2-k}.
    pub fn parameter(&self, cell: usize, i: usize, j: usize) -> (f64, f64) {
        let scale = 2f64.powi(1 - self.level as i32);
        let step = 1.0 / (self.res - 1) as f64;
        let o = CELL_ORIGINS[cell];
        (
            scale * (o[0] as f64 + i as f64 * step),
            scale * (o[1] as f64 + j as f64 * step),
        )
    }

    pub fn num_samples(&self) -> usize {
        self.cells.len() * self.res * self.res
    }
}

/// Cell values with an arbitrary number of channels.
pub(crate) struct CellGrid {
    pub sector: usize,
    pub cell: usize,
    pub res: usize,
    pub channels: usize,
    pub data: Vec<f64>,
}

impl CellGrid {
    pub fn get(&self, i: usize, j: usize) -> &[f64] {
        let o = (i * self.res + j) * self.channels;
        &self.data[o..o + self.channels]
    }
}

struct Level<'a> {
    kind: SchemeKind,
    n: usize,
    coarse: &'a DMatrix<f64>,
    fine: &'a DMatrix<f64>,
    mask: &'a Mask2D,
}

impl Level<'_> {
    fn row(&self, m: &DMatrix<f64>, loc: SectorLoc) -> Option<Vec<f64>> {
        let r = patch_row(self.kind, self.n, loc)?;
        Some(m.row(r).iter().copied().collect())
    }

    fn coarse_at(&self, j: usize, a: i64, b: i64) -> Option<Vec<f64>> {
        self.row(self.coarse, canonical_loc(self.kind, self.n, j, a, b)?)
    }

    /// Level-(k+1) point: from S_k d_k inside the patch, otherwise from the
    /// regular mask applied to level-k points.
    fn fine_at(&self, j: usize, a: i64, b: i64) -> Result<Vec<f64>> {
        let loc = canonical_loc(self.kind, self.n, j, a, b)
            .ok_or_else(|| Error::ShapeMismatch(format!("no point at ({a}, {b})")))?;
        if let Some(v) = self.row(self.fine, loc) {
            return Ok(v);
        }
        let SectorLoc::Sector { j, a, b } = loc else {
            unreachable!("centre is always in the patch");
        };
        let o = self.mask.offset;
        let hi = self.mask.hi();
        let mut acc = vec![0.0; self.coarse.ncols()];
        let range =
            |i: i64, ax: usize| (i - hi[ax]).div_euclid(2) - 1..=(i - o[ax]).div_euclid(2) + 1;
        for aa in range(a, 0) {
            for bb in range(b, 1) {
                let w = self.mask.coeff([a - 2 * aa, b - 2 * bb]);
                if w == 0.0 {
                    continue;
                }
                let v = self.coarse_at(j, aa, bb).ok_or_else(|| {
                    Error::InsufficientRegularCollar(format!(
                        "level point ({a}, {b}) of sector {j} needs ({aa}, {bb})"
                    ))
                })?;
                for (x, y) in acc.iter_mut().zip(&v) {
                    *x += w * y;
                }
            }
        }
        Ok(acc)
    }
}

/// Control grid of one cell at level k+1: CC needs the 4×4 bicubic support,
/// DS the 3×3 biquadratic support.
fn cell_control(level: &Level, j: usize, cell: usize) -> Result<Grid2> {
    let o = CELL_ORIGINS[cell];
    let (lo, size) = match level.kind {
        SchemeKind::Primal => ([o[0] - 1, o[1] - 1], 4),
        SchemeKind::Dual => ([o[0] - 1, o[1] - 1], 3),
    };
    let ch = level.coarse.ncols();
    let mut g = Grid2::zeros(lo, [size, size], ch);
    for a in lo[0]..lo[0] + size as i64 {
        for b in lo[1]..lo[1] + size as i64 {
            let v = level.fine_at(j, a, b)?;
            g.get_mut(a, b).copy_from_slice(&v);
        }
    }
    Ok(g)
}

/// Limit value at the final-level node or knot with integer position (x, y).
fn limit_stencil(kind: SchemeKind, g: &Grid2, x: i64, y: i64, out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    match kind {
        SchemeKind::Primal => {
            const W: [f64; 3] = [1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0];
            for (p, wp) in W.iter().enumerate() {
                for (q, wq) in W.iter().enumerate() {
                    let v = g.get(x + p as i64 - 1, y + q as i64 - 1);
                    for c in 0..out.len() {
                        out[c] += wp * wq * v[c];
                    }
                }
            }
        }
        SchemeKind::Dual => {
            for (da, db) in [(-1, -1), (0, -1), (-1, 0), (0, 0)] {
                let v = g.get(x + da, y + db);
                for c in 0..out.len() {
                    out[c] += 0.25 * v[c];
                }
            }
        }
    }
}

/// The 3n cells of ring k computed from level-k data `dk` (N × channels).
pub(crate) fn ring_cells(
    scheme: &dyn SubdivisionScheme,
    n: usize,
    dk: &DMatrix<f64>,
    k: u32,
    depth: u32,
) -> Result<Vec<CellGrid>> {
    let kind = scheme.kind();
    let sk = local_matrix(scheme, k, n)?;
    if sk.size() != dk.nrows() {
        return Err(Error::ShapeMismatch(format!(
            "{} control rows, expected {}",
            dk.nrows(),
            sk.size()
        )));
    }
    let fine = sk.dense() * dk;
    let mask = scheme.regular_mask(k);
    let level = Level {
        kind,
        n,
        coarse: dk,
        fine: &fine,
        mask: &mask,
    };
    let masks: Vec<Mask2D> = (1..=depth).map(|l| scheme.regular_mask(k + l)).collect();
    let scale = 1i64 << depth;
    let res = scale as usize + 1;
    let ch = dk.ncols();
    let mut cells = Vec::with_capacity(3 * n);
    for j in 0..n {
        for cell in 0..3 {
            let mut g = cell_control(&level, j, cell)?;
            for m in &masks {
                g = g.refine(m, Support::Interior);
            }
            let o = CELL_ORIGINS[cell];
            let mut data = vec![0.0; res * res * ch];
            for i in 0..res {
                for jj in 0..res {
                    let x = o[0] * scale + i as i64;
                    let y = o[1] * scale + jj as i64;
                    let off = (i * res + jj) * ch;
                    limit_stencil(kind, &g, x, y, &mut data[off..off + ch]);
                }
            }
            cells.push(CellGrid {
                sector: j,
                cell,
                res,
                channels: ch,
                data,
            });
        }
    }
    Ok(cells)
}

/// Rings r_1 … r_{k_max} of the surface generated from the patch control
/// points. Ring k is sampled on its 3n cells by refining the level-(k+1)
/// control grid of each cell `depth` more times and evaluating the regular
/// limit stencil.
pub fn generate_rings(
    scheme: &dyn SubdivisionScheme,
    patch: &LocalPatch,
    k_max: u32,
    depth: u32,
) -> Result<Vec<RingSample>> {
    if patch.kind != scheme.kind() {
        return Err(Error::ShapeMismatch(format!(
            "{:?} patch for a {:?} scheme",
            patch.kind,
            scheme.kind()
        )));
    }
    let n = patch.n;
    let reference = local_matrix(&scheme.reference(), 1, n)?;
    let spec = spectrum(&reference, &SpectrumOptions::default())?;
    if !spec.flags.convergence_gate() {
        return Err(Error::GateFailed(format!(
            "stationary spectrum at n = {n}: {:?}",
            spec.flags
        )));
    }
    let mut d = to_points_matrix(&patch.points);
    let mut rings = Vec::with_capacity(k_max as usize);
    for k in 1..=k_max {
        let cells = ring_cells(scheme, n, &d, k, depth)?;
        let res = cells[0].res;
        rings.push(RingSample {
            level: k,
            depth,
            res,
            cells: cells
                .into_iter()
                .map(|c| RingCell {
                    sector: c.sector,
                    cell: c.cell,
                    res: c.res,
                    points: c.data.chunks(3).map(|p| [p[0], p[1], p[2]]).collect(),
                })
                .collect(),
        });
        d = local_matrix(scheme, k, n)?.dense() * d;
    }
    Ok(rings)
}

/// Partial derivatives with respect to the sample indices: centred inside,
/// one-sided on the cell border.
fn partials(
    res: usize,
    get: &dyn Fn(usize, usize, usize) -> f64,
    i: usize,
    j: usize,
    c: usize,
) -> (f64, f64) {
    let d = |lo: usize, hi: usize, f: &dyn Fn(usize) -> f64| (f(hi) - f(lo)) / (hi - lo) as f64;
    let du = d(i.saturating_sub(1), (i + 1).min(res - 1), &|t| get(t, j, c));
    let dv = d(j.saturating_sub(1), (j + 1).min(res - 1), &|t| get(i, t, c));
    (du, dv)
}

fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(a: Vec3) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

/// Unnormalized normals ∂_u r × ∂_v r of every sample of a ring, per cell.
pub fn ring_normals(ring: &RingSample) -> Vec<Vec<Vec3>> {
    ring.cells
        .iter()
        .map(|cell| {
            let res = cell.res;
            let get = |i: usize, j: usize, c: usize| cell.points[i * res + j][c];
            let mut out = Vec::with_capacity(res * res);
            for i in 0..res {
                for j in 0..res {
                    let mut du = [0.0; 3];
                    let mut dv = [0.0; 3];
                    for c in 0..3 {
                        let (a, b) = partials(res, &get, i, j, c);
                        du[c] = a;
                        dv[c] = b;
                    }
                    out.push(cross(du, dv));
                }
            }
            out
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalEstimate {
    /// Area-weighted mean normal of the last ring.
    pub n_inf: Vec3,
    pub levels: Vec<u32>,
    /// Largest angle (radians) between a ring normal and n_∞, per ring.
    pub max_angle: Vec<f64>,
    /// Largest distance from a ring sample to r_c, per ring.
    pub max_distance: Vec<f64>,
    /// Samples skipped because the normal was degenerate, per ring.
    pub degenerate: Vec<usize>,
}

/// Limit normal and per-ring angular deviations.
pub fn estimate_limit_normal(rings: &[RingSample], r_c: Vec3) -> Result<NormalEstimate> {
    if rings.len() < 3 {
        return Err(Error::InsufficientPoints(rings.len()));
    }
    let normals: Vec<Vec<Vec<Vec3>>> = rings.iter().map(ring_normals).collect();
    let mut degenerate = Vec::with_capacity(rings.len());
    let mut thresholds = Vec::with_capacity(rings.len());
    for (ring, ns) in rings.iter().zip(&normals) {
        let scale = ns.iter().flatten().map(|&v| norm(v)).fold(0.0, f64::max);
        let thresh = 1e-12 * scale;
        let bad = ns.iter().flatten().filter(|&&v| norm(v) <= thresh).count();
        let total = ring.num_samples();
        if scale == 0.0 || bad * 100 > total {
            return Err(Error::DegenerateNormals { bad, total });
        }
        degenerate.push(bad);
        thresholds.push(thresh);
    }
    let last = normals.last().expect("at least three rings");
    let mut sum = [0.0; 3];
    for v in last.iter().flatten() {
        for c in 0..3 {
            sum[c] += v[c];
        }
    }
    let len = norm(sum);
    if len == 0.0 {
        return Err(Error::DegenerateNormals {
            bad: rings.last().unwrap().num_samples(),
            total: rings.last().unwrap().num_samples(),
        });
    }
    let n_inf = sum.map(|x| x / len);
    let mut max_angle = Vec::with_capacity(rings.len());
    let mut max_distance = Vec::with_capacity(rings.len());
    for ((ring, ns), &thresh) in rings.iter().zip(&normals).zip(&thresholds) {
        let mut worst: f64 = 0.0;
        for v in ns.iter().flatten() {
            let l = norm(*v);
            if l <= thresh {
                continue;
            }
            let cos = (v[0] * n_inf[0] + v[1] * n_inf[1] + v[2] * n_inf[2]) / l;
            let sin = norm(cross(*v, n_inf)) / l;
            worst = worst.max(sin.atan2(cos));
        }
        max_angle.push(worst);
        let dist = ring
            .cells
            .iter()
            .flat_map(|c| c.points.iter())
            .map(|p| norm([p[0] - r_c[0], p[1] - r_c[1], p[2] - r_c[2]]))
            .fold(0.0, f64::max);
        max_distance.push(dist);
    }
    Ok(NormalEstimate {
        n_inf,
        levels: rings.iter().map(|r| r.level).collect(),
        max_angle,
        max_distance,
        degenerate,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobianSignReport {
    pub valence: usize,
    pub res: usize,
    pub samples: usize,
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
    pub min_abs_det: f64,
    pub max_abs_det: f64,
    /// min|det| / max|det|.
    pub margin: f64,
    pub sign: i8,
    pub pass: bool,
}

/// Options for the characteristic-map check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharMapOptions {
    /// Samples per cell edge (rounded up to 2^d + 1).
    pub grid: usize,
    /// Required min|det| / max|det|.
    pub margin: f64,
    /// Exchange x₁⁰ and x₁¹.
    pub swap: bool,
}

impl Default for CharMapOptions {
    fn default() -> Self {
        CharMapOptions {
            grid: 64,
            margin: 1e-6,
            swap: false,
        }
    }
}

/// Samples det J of the planar ring Ψ̄ = Φ̄ᵀ(x₁⁰, x₁¹) of the stationary scheme.
pub fn sample_characteristic_ring(
    stat: &dyn SubdivisionScheme,
    n: usize,
    opts: &CharMapOptions,
) -> Result<JacobianSignReport> {
    let s = local_matrix(stat, 1, n)?;
    let spec = spectrum(&s, &SpectrumOptions::default())?;
    let f = spec.flags;
    let vectors = match (
        &spec.subdominant_vectors,
        f.subdominant_real && f.subdominant_double && f.subdominant_nondefective,
    ) {
        (Some(v), true) => v,
        _ => return Err(Error::DefectiveSubdominant),
    };
    let (a, b) = if opts.swap {
        (&vectors[1], &vectors[0])
    } else {
        (&vectors[0], &vectors[1])
    };
    let d = DMatrix::from_fn(a.len(), 2, |r, c| if c == 0 { a[r] } else { b[r] });
    let depth = (opts.grid.max(2) as f64).log2().ceil() as u32;
    let cells = ring_cells(stat, n, &d, 1, depth)?;
    let res = cells[0].res;
    let mut dets = Vec::with_capacity(cells.len() * res * res);
    for cell in &cells {
        let get = |i: usize, j: usize, c: usize| cell.get(i, j)[c];
        for i in 0..res {
            for j in 0..res {
                let (xu, xv) = partials(res, &get, i, j, 0);
                let (yu, yv) = partials(res, &get, i, j, 1);
                dets.push(xu * yv - xv * yu);
            }
        }
    }
    let max_abs = dets.iter().map(|d| d.abs()).fold(0.0, f64::max);
    let min_abs = dets.iter().map(|d| d.abs()).fold(f64::INFINITY, f64::min);
    let positive = dets.iter().filter(|&&d| d > 0.0).count();
    let negative = dets.iter().filter(|&&d| d < 0.0).count();
    let zero = dets.len() - positive - negative;
    let margin = if max_abs > 0.0 {
        min_abs / max_abs
    } else {
        0.0
    };
    let sign = if negative == 0 && zero == 0 {
        1
    } else if positive == 0 && zero == 0 {
        -1
    } else {
        0
    };
    Ok(JacobianSignReport {
        valence: n,
        res,
        samples: dets.len(),
        positive,
        negative,
        zero,
        min_abs_det: min_abs,
        max_abs_det: max_abs,
        margin,
        sign,
        pass: sign != 0 && margin >= opts.margin,
    })
}
