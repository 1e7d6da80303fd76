#![allow(dead_code)]

use std::f64::consts::PI;

use nssubdiv::mesh::{refine_topology_primal, QuadMesh, RawMesh};
use nssubdiv::schemes::{refine_mesh, SchemeDescriptor};
use nssubdiv::Vec3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec3> {
    (0..n)
        .map(|_| {
            [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ]
        })
        .collect()
}

pub fn cube_raw() -> RawMesh {
    RawMesh {
        vertices: vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [1.0, 1.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [1.0, 0.0, 1.0],
            [1.0, 1.0, 1.0],
            [0.0, 1.0, 1.0],
        ],
        faces: vec![
            vec![0, 3, 2, 1],
            vec![4, 5, 6, 7],
            vec![0, 1, 5, 4],
            vec![1, 2, 6, 5],
            vec![2, 3, 7, 6],
            vec![3, 0, 4, 7],
        ],
    }
}

pub fn cube() -> QuadMesh {
    QuadMesh::from_raw(cube_raw()).unwrap()
}

/// Grid index of torus vertex (i, j).
pub fn torus_id(nv: usize, i: usize, j: usize) -> usize {
    i * nv + j
}

/// Regular nu × nv torus; vertex (i, j) has id i·nv + j.
pub fn torus(nu: usize, nv: usize) -> QuadMesh {
    let mut verts = Vec::new();
    for i in 0..nu {
        for j in 0..nv {
            let (a, b) = (
                2.0 * PI * i as f64 / nu as f64,
                2.0 * PI * j as f64 / nv as f64,
            );
            let r = 3.0 + b.cos();
            verts.push([r * a.cos(), r * a.sin(), b.sin()]);
        }
    }
    let mut faces = Vec::new();
    for i in 0..nu {
        for j in 0..nv {
            let (i1, j1) = ((i + 1) % nu, (j + 1) % nv);
            faces.push(vec![
                torus_id(nv, i, j),
                torus_id(nv, i1, j),
                torus_id(nv, i1, j1),
                torus_id(nv, i, j1),
            ]);
        }
    }
    QuadMesh::new(verts, faces).unwrap()
}

/// Prism over an n-gon; slightly irregular unless `symmetric` is set.
pub fn prism(n: usize, symmetric: bool) -> QuadMesh {
    let mut v = Vec::new();
    for z in [-1.0, 1.0] {
        for i in 0..n {
            let t = 2.0 * PI * i as f64 / n as f64;
            let (r, dz) = if symmetric {
                (1.0, 0.0)
            } else {
                (1.0 + 0.1 * i as f64, 0.05 * (i % 2) as f64)
            };
            v.push([r * t.cos(), t.sin(), z * (1.0 + dz)]);
        }
    }
    let mut f = vec![(0..n).rev().collect::<Vec<_>>(), (n..2 * n).collect()];
    for i in 0..n {
        let j = (i + 1) % n;
        f.push(vec![i, j, n + j, n + i]);
    }
    QuadMesh::new(v, f).unwrap()
}

/// Prism after two stationary Doo-Sabin steps: face 0 is an n-gon with a
/// regular collar.
pub fn ds_test_mesh(n: usize, symmetric: bool) -> QuadMesh {
    let mut m = prism(n, symmetric);
    for k in 1..=2 {
        m = refine_mesh(&SchemeDescriptor::ds(), &m, k).unwrap();
    }
    m
}

/// Prism after a topological primal split and one Catmull-Clark step. The
/// returned vertex is the valence-n centre of the bottom face.
pub fn cc_test_mesh(n: usize, symmetric: bool) -> (QuadMesh, usize) {
    let p = prism(n, symmetric);
    let centre = p.num_vertices() + p.num_edges();
    let m = refine_topology_primal(&p).unwrap();
    let m = refine_mesh(&SchemeDescriptor::cc(), &m, 1).unwrap();
    (m, centre)
}

/// Open mesh made of one n-gon and `rings` layers of quads around it.
pub fn polygon_with_collar(n: usize, rings: usize) -> RawMesh {
    let r = rings + 1;
    let id = |j: usize, a: usize, b: usize| (j % n) * r * r + a * r + b;
    let mut vertices = vec![[0.0; 3]; n * r * r];
    for j in 0..n {
        for a in 0..r {
            for b in 0..r {
                let (x, y) = (a as f64 + 0.5, b as f64 + 0.5);
                let rad = (x * x + y * y).sqrt();
                let phi = 2.0 * PI * j as f64 / n as f64 + y.atan2(x) * 4.0 / n as f64;
                vertices[id(j, a, b)] = [rad * phi.cos(), rad * phi.sin(), 0.1 * rad * rad];
            }
        }
    }
    let mut faces = vec![(0..n).map(|j| id(j, 0, 0)).collect::<Vec<_>>()];
    for j in 0..n {
        for a in 0..r - 1 {
            for b in 0..r - 1 {
                faces.push(vec![
                    id(j, a, b),
                    id(j, a + 1, b),
                    id(j, a + 1, b + 1),
                    id(j, a, b + 1),
                ]);
            }
        }
        for b in 0..r - 1 {
            faces.push(vec![
                id(j + 1, b, 0),
                id(j, 0, b),
                id(j, 0, b + 1),
                id(j + 1, b + 1, 0),
            ]);
        }
    }
    RawMesh { vertices, faces }
}

pub fn dist(a: Vec3, b: Vec3) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Uniform cubic B-spline centred at 0.
pub fn bspline3(x: f64) -> f64 {
    let t = x.abs();
    if t < 1.0 {
        2.0 / 3.0 - t * t + t * t * t / 2.0
    } else if t < 2.0 {
        (2.0 - t).powi(3) / 6.0
    } else {
        0.0
    }
}

/// Uniform quadratic B-spline centred at 0.
pub fn bspline2(x: f64) -> f64 {
    let t = x.abs();
    if t < 0.5 {
        0.75 - t * t
    } else if t < 1.5 {
        (1.5 - t).powi(2) / 2.0
    } else {
        0.0
    }
}

/// Tensor B-spline surface over a periodic control grid whose node (i, j)
/// sits at (i + shift, j + shift).
pub fn periodic_spline(
    ctrl: &dyn Fn(usize, usize) -> Vec3,
    dims: [usize; 2],
    basis: fn(f64) -> f64,
    shift: f64,
    s: f64,
    t: f64,
) -> Vec3 {
    let mut out = [0.0; 3];
    let (i0, j0) = (s.floor() as i64, t.floor() as i64);
    for i in i0 - 3..=i0 + 3 {
        for j in j0 - 3..=j0 + 3 {
            let w = basis(s - i as f64 - shift) * basis(t - j as f64 - shift);
            if w == 0.0 {
                continue;
            }
            let p = ctrl(
                i.rem_euclid(dims[0] as i64) as usize,
                j.rem_euclid(dims[1] as i64) as usize,
            );
            for c in 0..3 {
                out[c] += w * p[c];
            }
        }
    }
    out
}
