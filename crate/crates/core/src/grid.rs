//! Regular control grids, mask refinement on them, and the sector frames
//! used around extraordinary elements.

use crate::schemes::SchemeKind;
use crate::symbols::Mask2D;

/// Which refined points to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Support {
    /// Every point that receives a contribution (zero padding outside).
    Full,
    /// Only points whose whole stencil lies inside the old grid.
    Interior,
}

/// A rectangular block of grid values with `channels` components per node,
/// addressed by absolute integer indices starting at `lo`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid2 {
    pub lo: [i64; 2],
    pub dims: [usize; 2],
    pub channels: usize,
    pub data: Vec<f64>,
}

impl Grid2 {
    pub fn zeros(lo: [i64; 2], dims: [usize; 2], channels: usize) -> Self {
        Grid2 {
            lo,
            dims,
            channels,
            data: vec![0.0; dims[0] * dims[1] * channels],
        }
    }

    /// Last valid index per axis.
    pub fn hi(&self) -> [i64; 2] {
        [
            self.lo[0] + self.dims[0] as i64 - 1,
            self.lo[1] + self.dims[1] as i64 - 1,
        ]
    }

    pub fn contains(&self, i: i64, j: i64) -> bool {
        let hi = self.hi();
        i >= self.lo[0] && i <= hi[0] && j >= self.lo[1] && j <= hi[1]
    }

    fn offset(&self, i: i64, j: i64) -> usize {
        debug_assert!(self.contains(i, j), "({i}, {j}) outside grid");
        let r = (i - self.lo[0]) as usize;
        let c = (j - self.lo[1]) as usize;
        (r * self.dims[1] + c) * self.channels
    }

    pub fn get(&self, i: i64, j: i64) -> &[f64] {
        let o = self.offset(i, j);
        &self.data[o..o + self.channels]
    }

    pub fn get_mut(&mut self, i: i64, j: i64) -> &mut [f64] {
        let o = self.offset(i, j);
        &mut self.data[o..o + self.channels]
    }

    /// One refinement step: new[I] = Σ_α c[I - 2α] old[α].
    pub fn refine(&self, mask: &Mask2D, support: Support) -> Grid2 {
        let o = mask.offset;
        let s = mask.dims;
        let hi = self.hi();
        let full_lo = [2 * self.lo[0] + o[0], 2 * self.lo[1] + o[1]];
        let full_dims = [2 * (self.dims[0] - 1) + s[0], 2 * (self.dims[1] - 1) + s[1]];
        let mut full = Grid2::zeros(full_lo, full_dims, self.channels);
        let ch = self.channels;
        for i in self.lo[0]..=hi[0] {
            for j in self.lo[1]..=hi[1] {
                let src = self.offset(i, j);
                for bi in 0..s[0] {
                    for bj in 0..s[1] {
                        let w = mask.data[bi * s[1] + bj];
                        if w == 0.0 {
                            continue;
                        }
                        let ni = 2 * i + o[0] + bi as i64;
                        let nj = 2 * j + o[1] + bj as i64;
                        let dst = full.offset(ni, nj);
                        for c in 0..ch {
                            full.data[dst + c] += w * self.data[src + c];
                        }
                    }
                }
            }
        }
        match support {
            Support::Full => full,
            Support::Interior => {
                // I is interior iff ceil((I-o-s+1)/2) >= lo and floor((I-o)/2) <= hi
                let mut lo = [0i64; 2];
                let mut top = [0i64; 2];
                for ax in 0..2 {
                    let (ol, sl) = (o[ax], s[ax] as i64);
                    lo[ax] = 2 * self.lo[ax] + ol + sl - 2;
                    top[ax] = 2 * hi[ax] + ol + 1;
                }
                full.crop(lo, top)
            }
        }
    }

    /// Sub-block with inclusive corners `lo`, `hi`.
    pub fn crop(&self, lo: [i64; 2], hi: [i64; 2]) -> Grid2 {
        let dims = [
            (hi[0] - lo[0] + 1).max(0) as usize,
            (hi[1] - lo[1] + 1).max(0) as usize,
        ];
        let mut out = Grid2::zeros(lo, dims, self.channels);
        for i in lo[0]..=hi[0] {
            for j in lo[1]..=hi[1] {
                let src = self.offset(i, j);
                let dst = out.offset(i, j);
                out.data[dst..dst + self.channels]
                    .copy_from_slice(&self.data[src..src + self.channels]);
            }
        }
        out
    }
}

/// Position in the sector frames around an extraordinary element.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SectorLoc {
    Center,
    Sector { j: usize, a: i64, b: i64 },
}

/// Maps grid index (a, b) in the frame of sector `j` to the sector that owns
/// it. Primal frames put the centre at (0, 0) and own a ≥ 1, b ≥ 0; dual
/// frames place index (a, b) at (a + 1/2, b + 1/2) and own a, b ≥ 0. Moving
/// to sector j+1 rotates by (x, y) -> (y, -x); primal indices (a, 0) with
/// a < 0 lie on the ray of sector j+2. Returns `None` for indices in the
/// wedge that does not exist for general n.
pub fn canonical_loc(kind: SchemeKind, n: usize, j: usize, a: i64, b: i64) -> Option<SectorLoc> {
    let next = (j + 1) % n;
    let prev = (j + n - 1) % n;
    match kind {
        SchemeKind::Primal => {
            if a == 0 && b == 0 {
                Some(SectorLoc::Center)
            } else if a >= 1 && b >= 0 {
                Some(SectorLoc::Sector { j, a, b })
            } else if a <= 0 && b >= 1 {
                Some(SectorLoc::Sector {
                    j: next,
                    a: b,
                    b: -a,
                })
            } else if a >= 0 && b <= -1 {
                Some(SectorLoc::Sector {
                    j: prev,
                    a: -b,
                    b: a,
                })
            } else if a <= -1 && b == 0 {
                // on the ray of sector j+2
                canonical_loc(kind, n, next, 0, -a)
            } else {
                None
            }
        }
        SchemeKind::Dual => {
            if a >= 0 && b >= 0 {
                Some(SectorLoc::Sector { j, a, b })
            } else if a < 0 && b >= 0 {
                Some(SectorLoc::Sector {
                    j: next,
                    a: b,
                    b: -1 - a,
                })
            } else if a >= 0 && b < 0 {
                Some(SectorLoc::Sector {
                    j: prev,
                    a: -1 - b,
                    b: a,
                })
            } else {
                None
            }
        }
    }
}

/// Row of a patch (block size m) holding canonical sector index (a, b), if
/// that index belongs to the patch.
pub fn patch_row(kind: SchemeKind, n: usize, loc: SectorLoc) -> Option<usize> {
    match (kind, loc) {
        (SchemeKind::Primal, SectorLoc::Center) => Some(0),
        (SchemeKind::Primal, SectorLoc::Sector { j, a, b }) => {
            let r = match (a, b) {
                (1, 0) => 1,
                (1, 1) => 2,
                (2, 0) => 3,
                (2, 1) => 4,
                (2, 2) => 5,
                (1, 2) => 6,
                _ => return None,
            };
            Some(j * 7 + r)
        }
        (SchemeKind::Dual, SectorLoc::Sector { j, a, b }) => {
            let r = match (a, b) {
                (0, 0) => 0,
                (1, 0) => 1,
                (1, 1) => 2,
                (0, 1) => 3,
                _ => return None,
            };
            debug_assert!(j < n);
            Some(j * 4 + r)
        }
        (SchemeKind::Dual, SectorLoc::Center) => None,
    }
}
