//! Eigenvalues of small complex matrices: Householder reduction to
//! Hessenberg form followed by shifted QR with Givens rotations.

use nalgebra::DMatrix;
use num_complex::Complex64;

const MAX_SWEEPS_PER_EIGENVALUE: usize = 300;

fn hessenberg(a: &mut DMatrix<Complex64>) {
    let n = a.nrows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let len = n - k - 1;
        let mut v: Vec<Complex64> = (0..len).map(|i| a[(k + 1 + i, k)]).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let phase = if v[0].norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            v[0] / v[0].norm()
        };
        v[0] += phase * norm;
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vn == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vn;
        }
        // A <- (I - 2vv*) A
        for c in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..len {
                s += v[i].conj() * a[(k + 1 + i, c)];
            }
            for i in 0..len {
                a[(k + 1 + i, c)] -= 2.0 * v[i] * s;
            }
        }
        // A <- A (I - 2vv*)
        for r in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..len {
                s += a[(r, k + 1 + i)] * v[i];
            }
            for i in 0..len {
                a[(r, k + 1 + i)] -= 2.0 * s * v[i].conj();
            }
        }
        for i in k + 2..n {
            a[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
}

/// Eigenvalue of the 2×2 block [[a, b], [c, d]] closest to d.
fn wilkinson(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - 4.0 * det).sqrt();
    let l1 = (tr + disc) / 2.0;
    let l2 = (tr - disc) / 2.0;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// All eigenvalues of a square complex matrix, in no particular order.
///
/// # Panics
/// If the matrix is not square.
pub fn complex_eigenvalues(m: &DMatrix<Complex64>) -> Vec<Complex64> {
    assert_eq!(m.nrows(), m.ncols(), "square matrix required");
    let n = m.nrows();
    let mut a = m.clone();
    hessenberg(&mut a);
    let mut eig = Vec::with_capacity(n);
    if n == 0 {
        return eig;
    }
    let mut hi = n - 1;
    let mut iter = 0usize;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let s = a[(l - 1, l - 1)].norm() + a[(l, l)].norm();
            let s = if s == 0.0 { 1.0 } else { s };
            if a[(l, l - 1)].norm() <= f64::EPSILON * s {
                a[(l, l - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig.push(a[(hi, hi)]);
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > MAX_SWEEPS_PER_EIGENVALUE {
            // give up on this block and report its diagonal
            for i in (l..=hi).rev() {
                eig.push(a[(i, i)]);
            }
            if l == 0 {
                return eig;
            }
            hi = l - 1;
            iter = 0;
            continue;
        }
        let mu = if iter % 11 == 10 {
            a[(hi, hi)] + a[(hi, hi - 1)].norm()
        } else {
            wilkinson(
                a[(hi - 1, hi - 1)],
                a[(hi - 1, hi)],
                a[(hi, hi - 1)],
                a[(hi, hi)],
            )
        };
        for i in l..=hi {
            a[(i, i)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for i in l..hi {
            let x = a[(i, i)];
            let y = a[(i + 1, i)];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            if r == 0.0 {
                rots.push((Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)));
                continue;
            }
            let (c, s) = (x / r, y / r);
            for j in i..=hi {
                let (u, w) = (a[(i, j)], a[(i + 1, j)]);
                a[(i, j)] = c.conj() * u + s.conj() * w;
                a[(i + 1, j)] = -s * u + c * w;
            }
            rots.push((c, s));
        }
        for (k, &(c, s)) in rots.iter().enumerate() {
            let i = l + k;
            for r in l..=(i + 1).min(hi) {
                let (u, w) = (a[(r, i)], a[(r, i + 1)]);
                a[(r, i)] = u * c + w * s;
                a[(r, i + 1)] = -u * s.conj() + w * c.conj();
            }
        }
        for i in l..=hi {
            a[(i, i)] += mu;
        }
    }
    eig.push(a[(0, 0)]);
    eig
}
