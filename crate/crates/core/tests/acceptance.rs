//! Acceptance checks. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any fails.

mod common;

use std::time::{Duration, Instant};

use common::*;
use nalgebra::DMatrix;
use nssubdiv::analyzer::*;
use nssubdiv::grid::{Grid2, Support};
use nssubdiv::localmatrix::*;
use nssubdiv::mesh::{extract_local_neighborhood, Element, QuadMesh};
use nssubdiv::schemes::*;
use nssubdiv::symbols::*;
use nssubdiv::Vec3;
use rand::Rng;

const SETTINGS: [&str; 4] = [
    "trig-ds:h=0.0625",
    "trig-ds:h=1",
    "exp-cc:theta=3",
    "exp-cc:theta=10i",
];

fn scheme(id: &str) -> Box<dyn SubdivisionScheme> {
    parse_scheme(id).unwrap()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn c01_stationary_reduction() -> Outcome {
    let pairs = [
        (
            SchemeDescriptor::trig_ds(0.0).unwrap(),
            SchemeDescriptor::ds(),
        ),
        (
            SchemeDescriptor::exp_cc(Theta::Real(0.0)).unwrap(),
            SchemeDescriptor::cc(),
        ),
    ];
    let mut worst: f64 = 0.0;
    for (ns, stat) in &pairs {
        let m = stat.regular_mask(1);
        for k in 1..=20 {
            worst = worst.max(
                ns.regular_mask(k)
                    .sub(&m)
                    .data
                    .iter()
                    .fold(0.0, |a, x| a.max(x.abs())),
            );
            for n in 5..=10 {
                let a = local_matrix(ns, k, n).unwrap();
                let b = local_matrix(stat, 1, n).unwrap();
                worst = worst.max((a.dense() - b.dense()).amax());
            }
        }
    }
    outcome(worst <= 1e-15, format!("max abs error {worst:.1e}"))
}

fn c02_spectrum_gate() -> Outcome {
    let mut bad = Vec::new();
    let mut range = (f64::INFINITY, 0.0f64);
    for id in ["ds", "cc"] {
        for n in 5..=10 {
            let s = local_matrix(scheme(id).as_ref(), 1, n).unwrap();
            let sp = spectrum(&s, &SpectrumOptions::default()).unwrap();
            let f = sp.flags;
            let l1 = sp.lambda1.unwrap_or_default();
            let ok = (sp.lambda0.re - 1.0).abs() < 1e-10
                && sp.lambda0.im.abs() < 1e-10
                && f.dominant_simple
                && sp.x0_ones_deviation < 1e-10
                && l1.im.abs() < 1e-10
                && f.subdominant_double
                && f.subdominant_nondefective
                && l1.re > 0.5
                && l1.re < 1.0;
            range = (range.0.min(l1.re), range.1.max(l1.re));
            if !ok {
                bad.push(format!("{id} n={n}"));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("lambda1 in [{:.4}, {:.4}] {bad:?}", range.0, range.1),
    )
}

fn c03_decay_rate() -> Outcome {
    let mut bad = Vec::new();
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for id in SETTINGS {
        let s = scheme(id);
        for n in 5..=10 {
            let fit = decay_fit(s.as_ref(), n, 1..=15).unwrap();
            let stat = local_matrix(&s.reference(), 1, n).unwrap();
            let l1 = spectrum(&stat, &SpectrumOptions::default())
                .unwrap()
                .lambda1
                .unwrap()
                .re;
            lo = lo.min(fit.sigma);
            hi = hi.max(fit.sigma);
            if !(3.8..=4.2).contains(&fit.sigma) || fit.sigma <= 1.0 / l1 {
                bad.push(format!("{id} n={n} sigma={:.3}", fit.sigma));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("sigma in [{lo:.3}, {hi:.3}] {bad:?}"),
    )
}

fn c04_order1_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    for id in SETTINGS {
        let s = scheme(id);
        let reference = s.reference().regular_mask(1);
        let e = asymptotic_equivalence(1, &|k| s.regular_mask(k), &reference, 50);
        let (s40, s50) = (e.partial_sums[39], e.partial_sums[49]);
        worst = worst.max((s50 - s40) / s40);
    }
    outcome(
        worst < 1e-8,
        format!("max relative growth 40->50: {worst:.1e}"),
    )
}

fn c05_recurrence() -> Outcome {
    let mut r = rng(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let k = r.gen_range(1..=10);
        let mut random = || DMatrix::from_fn(12, 12, |_, _| r.gen_range(-1.0..1.0) / 6.0);
        let m = random();
        let ms: Vec<DMatrix<f64>> = (0..k).map(|_| random()).collect();
        let c = recurrence_check(&ms, &m, k).unwrap();
        worst = worst.max(c.residual / c.scale.max(f64::MIN_POSITIVE));
    }
    outcome(worst <= 1e-12, format!("max residual/scale {worst:.1e}"))
}

fn c06_bounded_products() -> Outcome {
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    for id in SETTINGS {
        let s = scheme(id);
        for n in 5..=10 {
            let first = local_matrix(s.as_ref(), 1, n).unwrap();
            let mut acc = first.dense().clone();
            let mut norms = vec![norm_inf(&acc)];
            for k in 2..=40 {
                acc = local_matrix(s.as_ref(), k, n).unwrap().dense() * acc;
                norms.push(norm_inf(&acc));
            }
            let head = norms[..10].iter().sum::<f64>() / 10.0;
            let tail = norms[30..].iter().sum::<f64>() / 10.0;
            worst = worst.max(tail / head);
            if tail > 1.05 * head {
                bad.push(format!("{id} n={n}"));
            }
        }
    }
    outcome(bad.is_empty(), format!("max tail/head {worst:.4} {bad:?}"))
}

fn c07_limit_point() -> Outcome {
    let mut r = rng(7);
    let opts = LimitOptions::default();
    let mut ratio_lo = f64::INFINITY;
    let mut ratio_hi: f64 = 0.0;
    let mut linear: f64 = 0.0;
    let mut beta_zero = true;
    for id in SETTINGS {
        let s = scheme(id);
        let rows = local_matrix(s.as_ref(), 1, 5).unwrap().size();
        let a = random_points(&mut r, rows);
        let b = random_points(&mut r, rows);
        let la = limit_point(s.as_ref(), 5, &a, &opts).unwrap();
        // ‖y_{k+1} - y_k‖ / ‖y_k - y_{k-1}‖ for k = 5..12
        for q in &la.increment_ratios[3..=10] {
            ratio_lo = ratio_lo.min(*q);
            ratio_hi = ratio_hi.max(*q);
        }
        let lb = limit_point(s.as_ref(), 5, &b, &opts).unwrap();
        let sum: Vec<Vec3> = a
            .iter()
            .zip(&b)
            .map(|(x, y)| [x[0] + 2.0 * y[0], x[1] + 2.0 * y[1], x[2] + 2.0 * y[2]])
            .collect();
        let ls = limit_point(s.as_ref(), 5, &sum, &opts).unwrap();
        let want = [0, 1, 2].map(|c| la.r_c[c] + 2.0 * lb.r_c[c]);
        linear = linear.max(dist(ls.r_c, want));

        let stat = s.reference();
        let st = limit_point(&stat, 5, &a, &opts).unwrap();
        beta_zero &= st.beta0 == [0.0; 3];
    }
    let ratios_ok = ratio_lo >= 0.2 && ratio_hi <= 0.32;
    outcome(
        ratios_ok && beta_zero && linear <= 1e-10,
        format!("increment ratios in [{ratio_lo:.3}, {ratio_hi:.3}], stationary beta0 = 0: {beta_zero}, linearity {linear:.1e}"),
    )
}

fn test_patch(s: &dyn SubdivisionScheme) -> nssubdiv::mesh::LocalPatch {
    match s.kind() {
        SchemeKind::Dual => {
            extract_local_neighborhood(&ds_test_mesh(5, false), Element::Face(0), SchemeKind::Dual)
        }
        SchemeKind::Primal => {
            let (m, v) = cc_test_mesh(5, false);
            extract_local_neighborhood(&m, Element::Vertex(v), SchemeKind::Primal)
        }
    }
    .unwrap()
}

fn c08_normal_continuity() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for id in SETTINGS {
        let s = scheme(id);
        let patch = test_patch(s.as_ref());
        let lp = limit_point(s.as_ref(), 5, &patch.points, &LimitOptions::default()).unwrap();
        let rings = generate_rings(s.as_ref(), &patch, 8, 6).unwrap();
        assert_eq!(rings[0].res, 65);
        let est = estimate_limit_normal(&rings, lp.r_c).unwrap();
        let theta = &est.max_angle[2..8];
        let violations = theta
            .windows(2)
            .filter(|w| w[1] >= w[0] && w[0] > 1e-9)
            .count();
        let last = theta[5].to_degrees();
        ok &= violations <= 1 && last < 1.0;
        detail.push(format!(
            "{id}: theta_8={last:.3}deg violations={violations}"
        ));
    }
    outcome(ok, detail.join(", "))
}

fn c09_characteristic_map() -> Outcome {
    let mut bad = Vec::new();
    let mut min_margin = f64::INFINITY;
    for id in ["ds", "cc"] {
        let s = scheme(id);
        for n in 5..=10 {
            let run = |grid| {
                let opts = CharMapOptions {
                    grid,
                    ..Default::default()
                };
                sample_characteristic_ring(s.as_ref(), n, &opts).unwrap()
            };
            let (coarse, fine) = (run(32), run(64));
            min_margin = min_margin.min(fine.margin);
            let ok = coarse.pass
                && fine.pass
                && fine.samples >= 10_000
                && fine.margin >= 1e-6
                && coarse.sign == fine.sign
                && fine.sign != 0;
            if !ok {
                bad.push(format!("{id} n={n}"));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("min margin {min_margin:.2e} {bad:?}"),
    )
}

fn c10_regular_region() -> Outcome {
    let mut r = rng(10);
    let dims = [8usize, 8];
    let mut g = Grid2::zeros([0, 0], dims, 3);
    let mut ctrl = vec![[0.0; 3]; dims[0] * dims[1]];
    for i in 0..dims[0] {
        for j in 0..dims[1] {
            let p = [i as f64, j as f64, r.gen_range(-0.5..0.5)];
            ctrl[i * dims[1] + j] = p;
            g.get_mut(i as i64, j as i64).copy_from_slice(&p);
        }
    }
    let mask = SchemeDescriptor::cc().regular_mask(1);
    let depth = 8;
    for _ in 0..depth {
        g = g.refine(&mask, Support::Interior);
    }
    let h = 2f64.powi(-depth);
    let oracle = |s: f64, t: f64| {
        let mut out = [0.0; 3];
        for (idx, p) in ctrl.iter().enumerate() {
            let w = bspline3(s - (idx / dims[1]) as f64) * bspline3(t - (idx % dims[1]) as f64);
            for c in 0..3 {
                out[c] += w * p[c];
            }
        }
        out
    };
    let hi = g.hi();
    let (mut limit_dev, mut raw_dev): (f64, f64) = (0.0, 0.0);
    let mut samples = 0;
    for i in (g.lo[0] + 1..hi[0]).step_by(13) {
        for j in (g.lo[1] + 1..hi[1]).step_by(13) {
            let mut lim = [0.0; 3];
            for (di, wi) in [(-1, 1.0), (0, 4.0), (1, 1.0)] {
                for (dj, wj) in [(-1, 1.0), (0, 4.0), (1, 1.0)] {
                    let p = g.get(i + di, j + dj);
                    for c in 0..3 {
                        lim[c] += wi * wj / 36.0 * p[c];
                    }
                }
            }
            let want = oracle(i as f64 * h, j as f64 * h);
            let p = g.get(i, j);
            limit_dev = limit_dev.max(dist(lim, want));
            raw_dev = raw_dev.max(dist([p[0], p[1], p[2]], want));
            samples += 1;
        }
    }
    outcome(
        limit_dev <= 1e-6 && samples > 1000,
        format!("{samples} samples, deviation {limit_dev:.1e} (raw control points {raw_dev:.1e})"),
    )
}

fn c11_divided_differences() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for id in SETTINGS.iter().chain(&["ds", "cc"]) {
        let s = scheme(id);
        for k in 1..=20 {
            let c = s.regular_mask(k).to_symbol();
            for dir in [Direction::E1, Direction::E2] {
                match divided_difference_symbol(&c, dir) {
                    Ok(b) => {
                        let back = b
                            .times_one_plus(dir)
                            .scaled(num_complex::Complex64::new(0.5, 0.0));
                        worst = worst.max(back.max_abs_diff(&c));
                    }
                    Err(_) => failures += 1,
                }
            }
        }
    }
    outcome(
        worst <= 1e-13 && failures == 0,
        format!("max coefficient error {worst:.1e}, {failures} not divisible"),
    )
}

/// Closed quad mesh with valence-3 and valence-5 vertices and a dent, so its
/// dual has extraordinary faces and it is not convex.
fn hull_test_mesh() -> QuadMesh {
    let mut m = prism(5, false);
    let mut v = m.vertices().to_vec();
    v[7] = [v[7][0] * 0.4, v[7][1] * 0.4, v[7][2] * 0.6];
    v[2][2] -= 0.7;
    m = m.with_vertices(v).unwrap();
    m
}

/// Supporting planes (unit normal, offset) of the convex hull of `pts`,
/// found by testing every triple.
fn hull_planes(pts: &[Vec3]) -> Vec<(Vec3, f64)> {
    let mut planes = Vec::new();
    let sub = |a: Vec3, b: Vec3| [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    let dot = |a: Vec3, b: Vec3| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            for k in j + 1..pts.len() {
                let (u, w) = (sub(pts[j], pts[i]), sub(pts[k], pts[i]));
                let nrm = [
                    u[1] * w[2] - u[2] * w[1],
                    u[2] * w[0] - u[0] * w[2],
                    u[0] * w[1] - u[1] * w[0],
                ];
                let len = dot(nrm, nrm).sqrt();
                if len < 1e-12 {
                    continue;
                }
                let nrm = nrm.map(|x| x / len);
                let off = dot(nrm, pts[i]);
                let side: Vec<f64> = pts.iter().map(|p| dot(nrm, *p) - off).collect();
                if side.iter().all(|&s| s <= 1e-12) {
                    planes.push((nrm, off));
                } else if side.iter().all(|&s| s >= -1e-12) {
                    planes.push((nrm.map(|x| -x), -off));
                }
            }
        }
    }
    planes
}

fn c12_convex_hull() -> Outcome {
    let input = hull_test_mesh();
    let planes = hull_planes(input.vertices());
    let s = SchemeDescriptor::trig_ds(1.0)
        .unwrap()
        .with_normalized(true);
    let mut m = input.clone();
    let mut outward: f64 = f64::NEG_INFINITY;
    let mut count = 0;
    for k in 1..=4 {
        m = refine_mesh(&s, &m, k).unwrap();
        for p in m.vertices() {
            for (nrm, off) in &planes {
                outward = outward.max(nrm[0] * p[0] + nrm[1] * p[1] + nrm[2] * p[2] - off);
            }
            count += 1;
        }
    }
    outcome(
        outward <= 1e-9 && !planes.is_empty(),
        format!("{count} refined vertices, max outward distance {outward:.1e}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 12] = [
        (
            "1 stationary reduction",
            c01_stationary_reduction,
            Duration::from_secs(1),
        ),
        ("2 spectrum gate", c02_spectrum_gate, Duration::from_secs(1)),
        ("3 decay rate", c03_decay_rate, Duration::from_secs(5)),
        (
            "4 order-1 equivalence",
            c04_order1_equivalence,
            Duration::from_secs(1),
        ),
        (
            "5 recurrence identity",
            c05_recurrence,
            Duration::from_secs(1),
        ),
        (
            "6 bounded products",
            c06_bounded_products,
            Duration::from_secs(2),
        ),
        (
            "7 limit point and rate",
            c07_limit_point,
            Duration::from_secs(2),
        ),
        (
            "8 normal continuity",
            c08_normal_continuity,
            Duration::from_secs(30),
        ),
        (
            "9 characteristic map",
            c09_characteristic_map,
            Duration::from_secs(20),
        ),
        (
            "10 regular region",
            c10_regular_region,
            Duration::from_secs(5),
        ),
        (
            "11 divided differences",
            c11_divided_differences,
            Duration::from_secs(1),
        ),
        ("12 convex hull", c12_convex_hull, Duration::from_secs(2)),
    ];
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let pass = out.pass && took < budget;
        if !pass {
            failed += 1;
        }
        println!(
            "{} criterion {name}: {} [{:.2}s of {}s]",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
