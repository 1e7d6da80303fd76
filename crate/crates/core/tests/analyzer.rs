mod common;

use common::*;
use nssubdiv::analyzer::*;
use nssubdiv::localmatrix::{limit_point, LimitOptions};
use nssubdiv::mesh::{extract_local_neighborhood, Element, LocalPatch, QuadMesh};
use nssubdiv::schemes::*;
use nssubdiv::{Error, Vec3};

fn scheme(id: &str) -> Box<dyn SubdivisionScheme> {
    parse_scheme(id).unwrap()
}

fn reports(ns: &str, stat: &str, n: usize) -> (ConditionReport, ConditionReport) {
    let (a, b) = (scheme(ns), scheme(stat));
    let opts = AnalysisOptions::default();
    (
        verify_convergence_conditions(a.as_ref(), b.as_ref(), n, &opts).unwrap(),
        verify_normal_continuity_conditions(a.as_ref(), b.as_ref(), n, &opts).unwrap(),
    )
}

#[test]
fn trig_ds_passes_both_theorems() {
    let (c, g) = reports("trig-ds:h=1", "ds", 5);
    assert_eq!(c.verdict, Status::Pass, "{:?}", c.failed());
    assert_eq!(g.verdict, Status::Pass, "{:?}", g.failed());
    let sigma = c.hypothesis("iii_decay").unwrap().evidence["sigma"]
        .as_f64()
        .unwrap();
    assert!((sigma - 4.0).abs() < 0.2, "{sigma}");
    let (_, g) = reports("trig-ds:h=0.0625", "ds", 5);
    assert_eq!(g.verdict, Status::Pass, "{:?}", g.failed());
}

#[test]
fn stationary_against_itself() {
    for (a, n) in [("ds", 5), ("cc", 7)] {
        let (c, g) = reports(a, a, n);
        assert_eq!(c.verdict, Status::Pass, "{a}: {:?}", c.failed());
        assert_eq!(g.verdict, Status::Pass, "{a}: {:?}", g.failed());
    }
}

#[test]
fn exp_cc_passes() {
    let (c, _) = reports("exp-cc:theta=3", "cc", 9);
    assert_eq!(c.verdict, Status::Pass, "{:?}", c.failed());
    let (_, g) = reports("exp-cc:theta=10i", "cc", 6);
    assert_eq!(g.verdict, Status::Pass, "{:?}", g.failed());
}

#[test]
fn missing_factor_fails_level_hypothesis() {
    let (c, g) = reports("ds-perturbed:eps=0.01", "ds", 5);
    assert_eq!(g.verdict, Status::Fail);
    assert_eq!(
        g.hypothesis("ii_level_smoothing_factor").unwrap().status,
        Status::Fail
    );
    assert!(g
        .hypothesis("ii_level_smoothing_factor")
        .unwrap()
        .evidence
        .to_string()
        .contains("divisib"));
    assert_eq!(
        g.hypothesis("i_smoothing_factor").unwrap().status,
        Status::Pass
    );
    assert_eq!(
        c.hypothesis("ii_asymptotic_equivalence_order0")
            .unwrap()
            .status,
        Status::Pass
    );
}

#[test]
fn low_valence_is_not_a_pass() {
    let (c, _) = reports("cc", "cc", 4);
    assert_eq!(c.hypothesis("valence_range").unwrap().status, Status::Warn);
    assert_ne!(c.verdict, Status::Pass);
    let (c, _) = reports("cc", "cc", 3);
    assert_eq!(c.verdict, Status::Fail);
}

#[test]
fn incompatible_schemes() {
    let e = verify_convergence_conditions(
        scheme("trig-ds:h=1").as_ref(),
        scheme("cc").as_ref(),
        5,
        &AnalysisOptions::default(),
    );
    assert!(matches!(e, Err(Error::IncompatibleSchemes(_))));
}

#[test]
fn verdict_is_conjunction_of_hypotheses() {
    for (a, b, n) in [
        ("trig-ds:h=1", "ds", 6),
        ("ds-perturbed:eps=0.01", "ds", 5),
        ("cc", "cc", 4),
    ] {
        let (c, g) = reports(a, b, n);
        for r in [c, g] {
            let all = r.hypotheses.iter().all(|h| h.status == Status::Pass);
            assert_eq!(all, r.verdict == Status::Pass);
            let back: ConditionReport = serde_json::from_str(&r.to_json()).unwrap();
            assert_eq!(back.verdict, r.verdict);
            assert_eq!(back.hypotheses.len(), r.hypotheses.len());
        }
    }
}

#[test]
fn characteristic_map_sign() {
    let opts = CharMapOptions::default();
    let ds = sample_characteristic_ring(scheme("ds").as_ref(), 5, &opts).unwrap();
    assert!(
        ds.pass && ds.samples >= 10_000 && ds.negative * ds.positive == 0,
        "{ds:?}"
    );
    let cc = sample_characteristic_ring(scheme("cc").as_ref(), 4, &opts).unwrap();
    assert!(cc.pass, "{cc:?}");

    let swapped = CharMapOptions { swap: true, ..opts };
    let ds2 = sample_characteristic_ring(scheme("ds").as_ref(), 5, &swapped).unwrap();
    assert!(ds2.pass);
    assert_eq!(ds2.sign, -ds.sign);
    assert_eq!((ds2.positive, ds2.negative), (ds.negative, ds.positive));
}

fn ds_patch(m: &QuadMesh, f: usize) -> LocalPatch {
    extract_local_neighborhood(m, Element::Face(f), SchemeKind::Dual).unwrap()
}

fn cc_patch(m: &QuadMesh, v: usize) -> LocalPatch {
    extract_local_neighborhood(m, Element::Vertex(v), SchemeKind::Primal).unwrap()
}

const NT: usize = 8;

fn grid_pos(id: usize) -> [f64; 2] {
    [(id / NT) as f64, (id % NT) as f64]
}

/// Offset from `b` to `a` on the periodic grid.
fn wrapped(a: usize, b: usize) -> [f64; 2] {
    let (p, q) = (grid_pos(a), grid_pos(b));
    let w = |d: f64| {
        let h = NT as f64 / 2.0;
        if d > h {
            d - NT as f64
        } else if d < -h {
            d + NT as f64
        } else {
            d
        }
    };
    [w(p[0] - q[0]), w(p[1] - q[1])]
}

#[test]
fn cc_rings_match_bicubic_spline() {
    let m = torus(NT, NT);
    let verts = m.vertices().to_vec();
    let ctrl = move |i: usize, j: usize| verts[torus_id(NT, i, j)];
    let c = torus_id(NT, 3, 4);
    let patch = cc_patch(&m, c);
    let rings = generate_rings(scheme("cc").as_ref(), &patch, 3, 6).unwrap();
    let base = grid_pos(c);
    let mut worst: f64 = 0.0;
    for ring in &rings {
        for cell in &ring.cells {
            let j = cell.sector;
            let dx = wrapped(patch.vertex_ids[j * 7 + 1], c);
            let dy = wrapped(patch.vertex_ids[((j + 1) % 4) * 7 + 1], c);
            for i in 0..cell.res {
                for jj in 0..cell.res {
                    let (u, v) = ring.parameter(cell.cell, i, jj);
                    let (x, y) = (u / 2.0, v / 2.0);
                    let s = base[0] + x * dx[0] + y * dy[0];
                    let t = base[1] + x * dx[1] + y * dy[1];
                    let want = periodic_spline(&ctrl, [NT, NT], bspline3, 0.0, s, t);
                    worst = worst.max(dist(want, cell.point(i, jj)));
                }
            }
        }
    }
    assert!(worst < 1e-6, "{worst:e}");
}

#[test]
fn ds_rings_match_biquadratic_spline() {
    let m = torus(NT, NT);
    let verts = m.vertices().to_vec();
    let ctrl = move |i: usize, j: usize| verts[torus_id(NT, i, j)];
    let f = 3 * NT + 4;
    let patch = ds_patch(&m, f);
    let rings = generate_rings(scheme("ds").as_ref(), &patch, 3, 6).unwrap();
    let corner = |j: usize| patch.vertex_ids[(j % 4) * 4];
    let origin = grid_pos(corner(0));
    let rel = |j: usize| {
        let w = wrapped(corner(j), corner(0));
        [origin[0] + w[0], origin[1] + w[1]]
    };
    let centre = {
        let p: Vec<[f64; 2]> = (0..4).map(rel).collect();
        [
            (p[0][0] + p[1][0] + p[2][0] + p[3][0]) / 4.0,
            (p[0][1] + p[1][1] + p[2][1] + p[3][1]) / 4.0,
        ]
    };
    let mut worst: f64 = 0.0;
    for ring in &rings {
        for cell in &ring.cells {
            let j = cell.sector;
            let (vj, next, prev) = (rel(j), rel(j + 1), rel(j + 3));
            let dx = [vj[0] - next[0], vj[1] - next[1]];
            let dy = [vj[0] - prev[0], vj[1] - prev[1]];
            for i in 0..cell.res {
                for jj in 0..cell.res {
                    let (u, v) = ring.parameter(cell.cell, i, jj);
                    let (x, y) = (u / 2.0, v / 2.0);
                    let s = centre[0] + x * dx[0] + y * dy[0];
                    let t = centre[1] + x * dx[1] + y * dy[1];
                    let want = periodic_spline(&ctrl, [NT, NT], bspline2, 0.0, s, t);
                    worst = worst.max(dist(want, cell.point(i, jj)));
                }
            }
        }
    }
    assert!(worst < 1e-6, "{worst:e}");
}

fn cell<'a>(ring: &'a RingSample, sector: usize, c: usize) -> &'a RingCell {
    ring.cells
        .iter()
        .find(|x| x.sector == sector && x.cell == c)
        .unwrap()
}

/// Largest mismatch along the boundaries shared inside a ring and between
/// consecutive rings.
fn seam_gap(rings: &[RingSample], n: usize) -> f64 {
    let mut worst: f64 = 0.0;
    let mut see = |a: Vec3, b: Vec3| worst = worst.max(dist(a, b));
    for (k, ring) in rings.iter().enumerate() {
        let r = ring.res;
        let half = (r - 1) / 2;
        for s in 0..n {
            let (a, b, c) = (cell(ring, s, 0), cell(ring, s, 1), cell(ring, s, 2));
            let next_a = cell(ring, (s + 1) % n, 0);
            for t in 0..r {
                see(a.point(t, r - 1), b.point(t, 0));
                see(b.point(0, t), c.point(r - 1, t));
                see(c.point(0, t), next_a.point(t, 0));
            }
            if let Some(outer) = rings.get(k + 1) {
                let (a1, b1, c1) = (cell(outer, s, 0), cell(outer, s, 1), cell(outer, s, 2));
                for t in 0..r {
                    let pa = if t <= half {
                        a1.point(r - 1, 2 * t)
                    } else {
                        b1.point(r - 1, 2 * t - (r - 1))
                    };
                    see(a.point(0, t), pa);
                    let pc = if t <= half {
                        c1.point(2 * t, r - 1)
                    } else {
                        b1.point(2 * t - (r - 1), r - 1)
                    };
                    see(c.point(t, 0), pc);
                }
            }
        }
    }
    worst
}

#[test]
fn rings_form_one_continuous_piece() {
    let m = ds_test_mesh(5, false);
    let rings = generate_rings(scheme("ds").as_ref(), &ds_patch(&m, 0), 4, 4).unwrap();
    assert!(seam_gap(&rings, 5) < 1e-10);

    let (m, v) = cc_test_mesh(5, false);
    let rings = generate_rings(scheme("cc").as_ref(), &cc_patch(&m, v), 4, 4).unwrap();
    assert!(seam_gap(&rings, 5) < 1e-10);

    // non-stationary rings use the stationary limit stencil on the last net
    let rings = generate_rings(scheme("exp-cc:theta=3").as_ref(), &cc_patch(&m, v), 4, 4).unwrap();
    assert!(seam_gap(&rings, 5) < 1e-3);
}

#[test]
fn rings_shrink_onto_limit_point() {
    let s = scheme("trig-ds:h=1");
    let patch = ds_patch(&ds_test_mesh(5, false), 0);
    let lp = limit_point(s.as_ref(), 5, &patch.points, &LimitOptions::default()).unwrap();
    let rings = generate_rings(s.as_ref(), &patch, 7, 4).unwrap();
    let est = estimate_limit_normal(&rings, lp.r_c).unwrap();
    for w in est.max_distance.windows(2) {
        assert!(w[1] < w[0], "{:?}", est.max_distance);
    }
    let last = *est.max_distance.last().unwrap();
    assert!(last < 0.05 * est.max_distance[0]);
}

#[test]
fn rings_reject_wrong_patch_kind() {
    let patch = ds_patch(&ds_test_mesh(5, false), 0);
    assert!(matches!(
        generate_rings(scheme("cc").as_ref(), &patch, 3, 4),
        Err(Error::ShapeMismatch(_))
    ));
}

#[test]
fn planar_data_has_vertical_normals() {
    let mut patch = ds_patch(&ds_test_mesh(5, true), 0);
    for p in &mut patch.points {
        p[2] = 0.0;
    }
    let rings = generate_rings(scheme("trig-ds:h=1").as_ref(), &patch, 4, 4).unwrap();
    for ring in &rings {
        for v in ring_normals(ring).iter().flatten() {
            let len = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if len > 0.0 {
                assert!((v[2].abs() / len - 1.0).abs() < 1e-12);
            }
        }
    }
    let est = estimate_limit_normal(&rings, [0.0; 3]).unwrap();
    assert!((est.n_inf[2].abs() - 1.0).abs() < 1e-12);
}

#[test]
fn normal_deviation_decreases_around_vertex() {
    let s = scheme("exp-cc:theta=3");
    let (m, v) = cc_test_mesh(5, false);
    let patch = cc_patch(&m, v);
    let lp = limit_point(s.as_ref(), 5, &patch.points, &LimitOptions::default()).unwrap();
    let rings = generate_rings(s.as_ref(), &patch, 7, 5).unwrap();
    let est = estimate_limit_normal(&rings, lp.r_c).unwrap();
    for w in est.max_angle[2..].windows(2) {
        assert!(w[1] < w[0], "{:?}", est.max_angle);
    }
    assert!(estimate_limit_normal(&rings[..2], lp.r_c).is_err());
}

#[test]
fn symmetric_vertex_has_axial_normal() {
    let (m, v) = cc_test_mesh(5, true);
    let patch = cc_patch(&m, v);
    let s = scheme("exp-cc:theta=10i");
    let lp = limit_point(s.as_ref(), 5, &patch.points, &LimitOptions::default()).unwrap();
    let rings = generate_rings(s.as_ref(), &patch, 5, 4).unwrap();
    let est = estimate_limit_normal(&rings, lp.r_c).unwrap();
    assert!(
        est.n_inf[0].abs() < 1e-6 && est.n_inf[1].abs() < 1e-6,
        "{:?}",
        est.n_inf
    );
}

#[test]
fn basic_limit_functions() {
    let trig = SchemeDescriptor::trig_ds(1.0)
        .unwrap()
        .with_normalized(true);
    for k in [1, 5] {
        let phi = basic_limit_function(&trig, k, 6).unwrap();
        let pv = phi.partition_value(1e-8);
        assert!(pv.constant && (pv.mean - 1.0).abs() < 1e-12, "{pv:?}");
    }
    let raw = basic_limit_function(scheme("trig-ds:h=1").as_ref(), 1, 6).unwrap();
    assert!(raw.partition_value(1e-8).constant);

    let bar = basic_limit_function(&SchemeDescriptor::ds(), 1, 6).unwrap();
    let far = sup_diff(
        &basic_limit_function(&trig, 1, 6).unwrap().values,
        &bar.values,
    );
    let near = sup_diff(
        &basic_limit_function(&trig, 6, 6).unwrap().values,
        &bar.values,
    );
    assert!(near < far && near > 0.0, "{near} {far}");

    assert!(matches!(
        basic_limit_function(&trig, 1, 3),
        Err(Error::InsufficientPoints(3))
    ));
}

#[test]
fn blf_derivatives_converge() {
    let exp = SchemeDescriptor::exp_cc(Theta::Real(3.0)).unwrap();
    let bar = basic_limit_function(&SchemeDescriptor::cc(), 1, 5).unwrap();
    let gaps: Vec<f64> = (1..=6)
        .map(|k| {
            let phi = basic_limit_function(&exp, k, 5).unwrap();
            sup_diff(&phi.differences[0], &bar.differences[0])
                .max(sup_diff(&phi.differences[1], &bar.differences[1]))
        })
        .collect();
    for w in gaps.windows(2) {
        assert!(w[1] < w[0], "{gaps:?}");
    }
}
