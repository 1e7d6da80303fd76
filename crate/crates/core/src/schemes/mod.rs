//! Named schemes: stationary Doo-Sabin and Catmull-Clark, trigonometric
//! Doo-Sabin and exponential Catmull-Clark, each as a level-indexed source of
//! regular masks and extraordinary-element blocks.

mod refine;

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::symbols::{LaurentSymbol, Mask2D};
use crate::{Error, Result};

pub use refine::refine_mesh;

/// Dual schemes act around extraordinary faces, primal ones around
/// extraordinary vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Dual,
    Primal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    DooSabin,
    CatmullClark,
}

/// θ is either real or purely imaginary; `Imag(t)` stands for θ = i·t.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Theta {
    Real(f64),
    Imag(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Parameter {
    Stationary,
    Trig { h: f64 },
    Exp { theta: Theta },
}

/// Blocks of the local matrix at one level.
#[derive(Clone, Debug, PartialEq)]
pub enum BlockSet {
    /// B_0 … B_{n-1}.
    Dual { blocks: Vec<DMatrix<f64>> },
    /// α̃, β̃, γ̃ and B̃_0 … B̃_{n-1}.
    Primal {
        alpha: f64,
        beta: DVector<f64>,
        gamma: DVector<f64>,
        blocks: Vec<DMatrix<f64>>,
    },
}

impl BlockSet {
    pub fn valence(&self) -> usize {
        match self {
            BlockSet::Dual { blocks } | BlockSet::Primal { blocks, .. } => blocks.len(),
        }
    }

    pub fn scaled(&self, s: f64) -> BlockSet {
        match self {
            BlockSet::Dual { blocks } => BlockSet::Dual {
                blocks: blocks.iter().map(|b| b * s).collect(),
            },
            BlockSet::Primal {
                alpha,
                beta,
                gamma,
                blocks,
            } => BlockSet::Primal {
                alpha: alpha * s,
                beta: beta * s,
                gamma: gamma * s,
                blocks: blocks.iter().map(|b| b * s).collect(),
            },
        }
    }

    /// Largest absolute entry difference (α̃, β̃, γ̃ included).
    pub fn max_abs_diff(&self, other: &BlockSet) -> f64 {
        let mat = |a: &[DMatrix<f64>], b: &[DMatrix<f64>]| {
            a.iter()
                .zip(b)
                .map(|(x, y)| (x - y).amax())
                .fold(0.0, f64::max)
        };
        match (self, other) {
            (BlockSet::Dual { blocks: a }, BlockSet::Dual { blocks: b }) if a.len() == b.len() => {
                mat(a, b)
            }
            (
                BlockSet::Primal {
                    alpha: a0,
                    beta: a1,
                    gamma: a2,
                    blocks: a3,
                },
                BlockSet::Primal {
                    alpha: b0,
                    beta: b1,
                    gamma: b2,
                    blocks: b3,
                },
            ) if a3.len() == b3.len() => (a0 - b0)
                .abs()
                .max((a1 - b1).amax())
                .max((a2 - b2).amax())
                .max(mat(a3, b3)),
            _ => f64::INFINITY,
        }
    }
}

/// Level-k coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum LevelCoefficients {
    /// a_k, b_k, c_{4,k}; c_{n,k} via [`LevelCoefficients::c_n`].
    TrigDs {
        k: u32,
        h: f64,
        a: f64,
        b: f64,
        c4: f64,
    },
    ExpCc {
        k: u32,
        v: f64,
        a4: f64,
        b4: f64,
        c4: f64,
        d: f64,
        e: f64,
    },
}

impl LevelCoefficients {
    /// c_{n,k} of the trigonometric Doo-Sabin rule.
    pub fn c_n(&self, n: usize) -> f64 {
        match *self {
            LevelCoefficients::TrigDs { k, h, .. } => {
                let (c1, c0) = trig_cosines(h, k);
                1.0 / (4.0 * n as f64 * c1 * c1 * c0 * c0)
            }
            LevelCoefficients::ExpCc { .. } => self.extraordinary(n).2,
        }
    }

    /// (a_{n,k}, b_{n,k}, c_{n,k}) of the exponential Catmull-Clark vertex rule.
    pub fn extraordinary(&self, n: usize) -> (f64, f64, f64) {
        match *self {
            LevelCoefficients::ExpCc { v, .. } => {
                let n = n as f64;
                let w = (v + 1.0) * (v + 1.0);
                let b = 2.0 * (2.0 * v + 1.0) / (n * n * w);
                let c = 1.0 / (n * n * w);
                (1.0 - n * (b + c), b, c)
            }
            LevelCoefficients::TrigDs { .. } => (f64::NAN, f64::NAN, self.c_n(n)),
        }
    }
}

fn trig_cosines(h: f64, k: u32) -> (f64, f64) {
    let c1 = (h / 2f64.powi(k as i32)).cos();
    let c0 = (h / 2f64.powi(k as i32 - 1)).cos();
    (c1, c0)
}

/// v_k = cos(θ/2^k) for real θ and cosh(Im θ/2^k) for imaginary θ.
pub fn vk(theta: Theta, k: u32) -> f64 {
    let s = 2f64.powi(k as i32);
    match theta {
        Theta::Real(t) => (t / s).cos(),
        Theta::Imag(t) => (t / s).cosh(),
    }
}

/// Trigonometric Doo-Sabin coefficients a_k, b_k, c_{4,k} for parameter h.
pub fn trig_ds_coefficients(h: f64, k: u32) -> LevelCoefficients {
    let (c1, c0) = trig_cosines(h, k);
    let q = c1 * c1;
    LevelCoefficients::TrigDs {
        k,
        h,
        a: 1.0 / (4.0 * q * c0) + 1.0 / (4.0 * q),
        b: 1.0 / (8.0 * q * c0),
        c4: 1.0 / (16.0 * q * c0 * c0),
    }
}

/// Exponential Catmull-Clark coefficients for level parameter v.
pub fn exp_cc_coefficients(v: f64, k: u32) -> LevelCoefficients {
    let w = (v + 1.0) * (v + 1.0);
    let t = 2.0 * v + 1.0;
    LevelCoefficients::ExpCc {
        k,
        v,
        a4: t * t / (4.0 * w),
        b4: 2.0 * t / (16.0 * w),
        c4: 1.0 / (16.0 * w),
        d: t / (4.0 * (v + 1.0)),
        e: 1.0 / (8.0 * (v + 1.0)),
    }
}

/// A level-indexed subdivision scheme.
pub trait SubdivisionScheme: Send + Sync {
    /// CLI-style identifier.
    fn id(&self) -> String;
    fn kind(&self) -> SchemeKind;
    fn is_stationary(&self) -> bool;
    /// Stationary scheme this one is compared against.
    fn reference(&self) -> SchemeDescriptor;
    fn regular_mask(&self, k: u32) -> Mask2D;
    fn local_blocks(&self, k: u32, n: usize) -> Result<BlockSet>;
    /// Closed-form factored symbol, where the family provides one.
    fn factored_symbol(&self, _k: u32) -> Option<LaurentSymbol> {
        None
    }
    /// Points per sector.
    fn sector_size(&self) -> usize {
        match self.kind() {
            SchemeKind::Dual => 4,
            SchemeKind::Primal => 6,
        }
    }
}

/// One of the four families with its parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeDescriptor {
    pub family: Family,
    pub parameter: Parameter,
    /// Scale every level so the regular mask has unit coset sums.
    pub normalized: bool,
}

impl SchemeDescriptor {
    pub fn ds() -> Self {
        SchemeDescriptor {
            family: Family::DooSabin,
            parameter: Parameter::Stationary,
            normalized: false,
        }
    }

    pub fn cc() -> Self {
        SchemeDescriptor {
            family: Family::CatmullClark,
            parameter: Parameter::Stationary,
            normalized: false,
        }
    }

    /// h must lie in [0, π/3).
    pub fn trig_ds(h: f64) -> Result<Self> {
        if !(h.is_finite() && (0.0..std::f64::consts::FRAC_PI_3).contains(&h)) {
            return Err(Error::ParameterDomain(format!("h = {h} not in [0, pi/3)")));
        }
        Ok(SchemeDescriptor {
            family: Family::DooSabin,
            parameter: Parameter::Trig { h },
            normalized: false,
        })
    }

    /// θ must lie in [0, π) or i·(0, 2 acosh 500).
    pub fn exp_cc(theta: Theta) -> Result<Self> {
        let ok = match theta {
            Theta::Real(t) => t.is_finite() && (0.0..std::f64::consts::PI).contains(&t),
            Theta::Imag(t) => t.is_finite() && t > 0.0 && t < 2.0 * 500f64.acosh(),
        };
        if !ok {
            return Err(Error::ParameterDomain(format!(
                "theta = {theta:?} not in [0, pi) or i(0, 2 acosh 500)"
            )));
        }
        Ok(SchemeDescriptor {
            family: Family::CatmullClark,
            parameter: Parameter::Exp { theta },
            normalized: false,
        })
    }

    pub fn with_normalized(mut self, normalized: bool) -> Self {
        self.normalized = normalized;
        self
    }

    pub fn coefficients(&self, k: u32) -> LevelCoefficients {
        match (self.family, self.parameter) {
            (Family::DooSabin, Parameter::Trig { h }) => trig_ds_coefficients(h, k),
            (Family::DooSabin, _) => LevelCoefficients::TrigDs {
                k,
                h: 0.0,
                a: 0.5,
                b: 0.125,
                c4: 1.0 / 16.0,
            },
            (Family::CatmullClark, Parameter::Exp { theta }) => {
                exp_cc_coefficients(vk(theta, k), k)
            }
            (Family::CatmullClark, _) => LevelCoefficients::ExpCc {
                k,
                v: 1.0,
                a4: 9.0 / 16.0,
                b4: 3.0 / 32.0,
                c4: 1.0 / 64.0,
                d: 3.0 / 8.0,
                e: 1.0 / 16.0,
            },
        }
    }

    fn raw_mask(&self, k: u32) -> Mask2D {
        match (self.family, self.parameter) {
            (Family::DooSabin, Parameter::Stationary) => Mask2D::new(
                [-1, -1],
                &[
                    vec![1.0, 3.0, 3.0, 1.0],
                    vec![3.0, 9.0, 9.0, 3.0],
                    vec![3.0, 9.0, 9.0, 3.0],
                    vec![1.0, 3.0, 3.0, 1.0],
                ],
            )
            .scaled(1.0 / 16.0),
            (Family::CatmullClark, Parameter::Stationary) => Mask2D::new(
                [-2, -2],
                &[
                    vec![1.0 / 64.0, 1.0 / 16.0, 3.0 / 32.0, 1.0 / 16.0, 1.0 / 64.0],
                    vec![1.0 / 16.0, 1.0 / 4.0, 3.0 / 8.0, 1.0 / 4.0, 1.0 / 16.0],
                    vec![3.0 / 32.0, 3.0 / 8.0, 9.0 / 16.0, 3.0 / 8.0, 3.0 / 32.0],
                    vec![1.0 / 16.0, 1.0 / 4.0, 3.0 / 8.0, 1.0 / 4.0, 1.0 / 16.0],
                    vec![1.0 / 64.0, 1.0 / 16.0, 3.0 / 32.0, 1.0 / 16.0, 1.0 / 64.0],
                ],
            ),
            _ => match self.coefficients(k) {
                LevelCoefficients::TrigDs { a, b, c4, .. } => {
                    let (e, m) = (b + c4, a + c4);
                    Mask2D::new(
                        [-1, -1],
                        &[
                            vec![c4, e, e, c4],
                            vec![e, m, m, e],
                            vec![e, m, m, e],
                            vec![c4, e, e, c4],
                        ],
                    )
                }
                LevelCoefficients::ExpCc {
                    a4, b4, c4, d, e, ..
                } => Mask2D::new(
                    [-2, -2],
                    &[
                        vec![c4, e, b4, e, c4],
                        vec![e, 0.25, d, 0.25, e],
                        vec![b4, d, a4, d, b4],
                        vec![e, 0.25, d, 0.25, e],
                        vec![c4, e, b4, e, c4],
                    ],
                ),
            },
        }
    }

    /// Reciprocal of the common coset sum of the raw level-k mask.
    pub fn normalization_factor(&self, k: u32) -> Result<f64> {
        let s = self.raw_mask(k).coset_sums();
        let (lo, hi) = s
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
                (a.min(x), b.max(x))
            });
        if hi - lo > 1e-12 {
            return Err(Error::NonConstantCosetSums(s));
        }
        Ok(1.0 / s[0])
    }

    fn scale(&self, k: u32) -> f64 {
        if self.normalized {
            self.normalization_factor(k).unwrap_or(1.0)
        } else {
            1.0
        }
    }

    fn raw_blocks(&self, k: u32, n: usize) -> Result<BlockSet> {
        if n < 3 {
            return Err(Error::UnsupportedValence(n));
        }
        let nf = n as f64;
        Ok(match (self.family, self.coefficients(k)) {
            (Family::DooSabin, LevelCoefficients::TrigDs { a, b, c4, .. }) => {
                let e = if self.parameter == Parameter::Stationary {
                    DsEntries {
                        a_cn: 1.0 / (4.0 * nf) + 0.5,
                        b_cn: 1.0 / (4.0 * nf) + 0.125,
                        cn: 1.0 / (4.0 * nf),
                        a_c4: 9.0 / 16.0,
                        b_c4: 3.0 / 16.0,
                        c4: 1.0 / 16.0,
                    }
                } else {
                    let cn = self.coefficients(k).c_n(n);
                    DsEntries {
                        a_cn: a + cn,
                        b_cn: b + cn,
                        cn,
                        a_c4: a + c4,
                        b_c4: b + c4,
                        c4,
                    }
                };
                ds_blocks(n, &e)
            }
            (
                Family::CatmullClark,
                co @ LevelCoefficients::ExpCc {
                    a4, b4, c4, d, e, ..
                },
            ) => {
                let (alpha, bn, cn) = if self.parameter == Parameter::Stationary {
                    (
                        1.0 - 7.0 / (4.0 * nf),
                        3.0 / (2.0 * nf * nf),
                        1.0 / (4.0 * nf * nf),
                    )
                } else {
                    co.extraordinary(n)
                };
                let beta = DVector::from_vec(vec![bn, cn, 0.0, 0.0, 0.0, 0.0]);
                let gamma = DVector::from_vec(vec![d, 0.25, b4, e, c4, e]);
                let blocks = cc_blocks(n, a4, b4, c4, d, e);
                BlockSet::Primal {
                    alpha,
                    beta,
                    gamma,
                    blocks,
                }
            }
            _ => unreachable!("family and coefficients always agree"),
        })
    }

    pub fn family_name(&self) -> &'static str {
        match (self.family, self.parameter) {
            (Family::DooSabin, Parameter::Stationary) => "ds",
            (Family::CatmullClark, Parameter::Stationary) => "cc",
            (Family::DooSabin, _) => "trig-ds",
            (Family::CatmullClark, _) => "exp-cc",
        }
    }
}

struct DsEntries {
    a_cn: f64,
    b_cn: f64,
    cn: f64,
    a_c4: f64,
    b_c4: f64,
    c4: f64,
}

fn ds_blocks(n: usize, e: &DsEntries) -> BlockSet {
    let mut blocks = vec![DMatrix::zeros(4, 4); n];
    let b0 = &mut blocks[0];
    b0[(0, 0)] = e.a_cn;
    b0[(1, 0)] = e.a_c4;
    b0[(1, 1)] = e.b_c4;
    b0[(2, 0)] = e.a_c4;
    b0[(2, 1)] = e.b_c4;
    b0[(2, 2)] = e.c4;
    b0[(2, 3)] = e.b_c4;
    b0[(3, 0)] = e.a_c4;
    b0[(3, 3)] = e.b_c4;
    let b1 = &mut blocks[1];
    b1[(0, 0)] = e.b_cn;
    b1[(3, 0)] = e.b_c4;
    b1[(3, 1)] = e.c4;
    for b in blocks.iter_mut().take(n - 1).skip(2) {
        b[(0, 0)] = e.cn;
    }
    let bl = &mut blocks[n - 1];
    bl[(0, 0)] = e.b_cn;
    bl[(1, 0)] = e.b_c4;
    bl[(1, 3)] = e.c4;
    BlockSet::Dual { blocks }
}

fn cc_blocks(n: usize, a4: f64, b4: f64, c4: f64, d: f64, e: f64) -> Vec<DMatrix<f64>> {
    let q = 0.25;
    let mut blocks = vec![DMatrix::zeros(6, 6); n];
    blocks[0] = DMatrix::from_row_slice(
        6,
        6,
        &[
            d, e, 0.0, 0.0, 0.0, 0.0, //
            q, q, 0.0, 0.0, 0.0, 0.0, //
            a4, b4, b4, c4, 0.0, 0.0, //
            d, d, e, e, 0.0, 0.0, //
            b4, a4, c4, b4, c4, b4, //
            e, d, 0.0, 0.0, 0.0, e,
        ],
    );
    blocks[1] = DMatrix::from_row_slice(
        6,
        6,
        &[
            e, 0.0, 0.0, 0.0, 0.0, 0.0, //
            q, 0.0, 0.0, 0.0, 0.0, 0.0, //
            c4, 0.0, 0.0, 0.0, 0.0, 0.0, //
            e, 0.0, 0.0, 0.0, 0.0, 0.0, //
            b4, 0.0, c4, 0.0, 0.0, 0.0, //
            d, 0.0, e, 0.0, 0.0, 0.0,
        ],
    );
    blocks[n - 1] = DMatrix::from_row_slice(
        6,
        6,
        &[
            e, e, 0.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 0.0, 0.0, 0.0, //
            c4, b4, 0.0, 0.0, 0.0, c4, //
            0.0, 0.0, 0.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        ],
    );
    blocks
}

impl SubdivisionScheme for SchemeDescriptor {
    fn id(&self) -> String {
        self.to_string()
    }

    fn kind(&self) -> SchemeKind {
        match self.family {
            Family::DooSabin => SchemeKind::Dual,
            Family::CatmullClark => SchemeKind::Primal,
        }
    }

    fn is_stationary(&self) -> bool {
        self.parameter == Parameter::Stationary
    }

    fn reference(&self) -> SchemeDescriptor {
        SchemeDescriptor {
            family: self.family,
            parameter: Parameter::Stationary,
            normalized: false,
        }
    }

    fn regular_mask(&self, k: u32) -> Mask2D {
        let m = self.raw_mask(k);
        if self.normalized {
            m.scaled(self.scale(k))
        } else {
            m
        }
    }

    fn local_blocks(&self, k: u32, n: usize) -> Result<BlockSet> {
        let b = self.raw_blocks(k, n)?;
        Ok(if self.normalized {
            b.scaled(self.scale(k))
        } else {
            b
        })
    }

    /// Trig-DS: e^{iφ} p(z₁) p(z₂) / ((e^{2iφ}+1)² (e^{iφ}+1)²) with
    /// p(z) = (1+z)(z+e^{iφ})(z e^{iφ}+1), φ = h/2^{k-1}.
    /// Exp-CC: q(z₁) q(z₂) / (4 (w+1)⁴) with q(z) = (1+z)²(z w+1)(z+w),
    /// w = e^{iθ/2^k}. Offsets match the masks.
    fn factored_symbol(&self, k: u32) -> Option<LaurentSymbol> {
        let one = Complex64::new(1.0, 0.0);
        let sym = match (self.family, self.parameter) {
            (Family::DooSabin, p) => {
                let h = match p {
                    Parameter::Trig { h } => h,
                    _ => 0.0,
                };
                let phi = h / 2f64.powi(k as i32 - 1);
                let w = Complex64::from_polar(1.0, phi);
                let p1 = crate::symbols::poly_mul(
                    &crate::symbols::poly_mul(&[one, one], &[w, one]),
                    &[one, w],
                );
                let w2 = Complex64::from_polar(1.0, 2.0 * phi);
                let den = (w2 + one).powi(2) * (w + one).powi(2);
                LaurentSymbol::tensor([-1, -1], &p1, &p1).scaled(w / den)
            }
            (Family::CatmullClark, p) => {
                let w = match p {
                    Parameter::Exp {
                        theta: Theta::Real(t),
                    } => Complex64::from_polar(1.0, t / 2f64.powi(k as i32)),
                    Parameter::Exp {
                        theta: Theta::Imag(t),
                    } => Complex64::new((-t / 2f64.powi(k as i32)).exp(), 0.0),
                    _ => one,
                };
                let q = crate::symbols::poly_mul(
                    &crate::symbols::poly_mul(&[one, one], &[one, one]),
                    &crate::symbols::poly_mul(&[one, w], &[w, one]),
                );
                let den = 4.0 * (w + one).powi(4);
                LaurentSymbol::tensor([-2, -2], &q, &q).scaled(one / den)
            }
        };
        Some(sym.scaled(Complex64::new(self.scale(k), 0.0)))
    }
}

impl fmt::Display for SchemeDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.parameter {
            Parameter::Stationary => write!(f, "{}", self.family_name()),
            Parameter::Trig { h } => write!(f, "trig-ds:h={h}"),
            Parameter::Exp {
                theta: Theta::Real(t),
            } => write!(f, "exp-cc:theta={t}"),
            Parameter::Exp {
                theta: Theta::Imag(t),
            } => write!(f, "exp-cc:theta={t}i"),
        }
    }
}

fn parse_real(s: &str, id: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::UnknownScheme(id.to_string()))
}

impl FromStr for SchemeDescriptor {
    type Err = Error;

    /// `ds`, `cc`, `trig-ds:h=<real>`, `exp-cc:theta=<real>`,
    /// `exp-cc:theta=<real>i`.
    fn from_str(id: &str) -> Result<Self> {
        let id = id.trim();
        match id {
            "ds" => return Ok(Self::ds()),
            "cc" => return Ok(Self::cc()),
            _ => {}
        }
        if let Some(v) = id.strip_prefix("trig-ds:h=") {
            return Self::trig_ds(parse_real(v, id)?);
        }
        if let Some(v) = id.strip_prefix("exp-cc:theta=") {
            let theta = match v.strip_suffix('i') {
                Some(im) => Theta::Imag(parse_real(im, id)?),
                None => Theta::Real(parse_real(v, id)?),
            };
            return Self::exp_cc(theta);
        }
        Err(Error::UnknownScheme(id.to_string()))
    }
}

/// A stationary scheme whose regular masks carry an extra ε·4^{-k} on one
/// corner entry. It stays asymptotically equivalent to its base but its
/// symbols lose the (1+z₁)(1+z₂) factor, which makes it a counterexample
/// for the normal-continuity hypotheses.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbedScheme {
    pub base: SchemeDescriptor,
    pub eps: f64,
}

impl SubdivisionScheme for PerturbedScheme {
    fn id(&self) -> String {
        format!("{}-perturbed:eps={}", self.base.family_name(), self.eps)
    }

    fn kind(&self) -> SchemeKind {
        self.base.kind()
    }

    fn is_stationary(&self) -> bool {
        false
    }

    fn reference(&self) -> SchemeDescriptor {
        self.base.reference()
    }

    fn regular_mask(&self, k: u32) -> Mask2D {
        let mut m = self.base.regular_mask(k);
        m.data[0] += self.eps * 4f64.powi(-(k as i32));
        m
    }

    fn local_blocks(&self, k: u32, n: usize) -> Result<BlockSet> {
        self.base.local_blocks(k, n)
    }
}

/// Parses any scheme id, including `ds-perturbed:eps=<real>` and
/// `cc-perturbed:eps=<real>`.
pub fn parse_scheme(id: &str) -> Result<Box<dyn SubdivisionScheme>> {
    let id = id.trim();
    for (prefix, base) in [
        ("ds-perturbed:eps=", SchemeDescriptor::ds()),
        ("cc-perturbed:eps=", SchemeDescriptor::cc()),
    ] {
        if let Some(v) = id.strip_prefix(prefix) {
            return Ok(Box::new(PerturbedScheme {
                base,
                eps: parse_real(v, id)?,
            }));
        }
    }
    Ok(Box::new(id.parse::<SchemeDescriptor>()?))
}
