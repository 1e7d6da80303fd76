use nssubdiv::schemes::{SchemeDescriptor, SubdivisionScheme, Theta};
use nssubdiv::symbols::*;
use nssubdiv::Error;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn binomial_row(m: usize) -> Vec<Complex64> {
    let mut row = vec![c(1.0)];
    for _ in 0..m {
        row = poly_mul(&row, &[c(1.0), c(1.0)]);
    }
    row
}

#[test]
fn operator_norms() {
    let ds = SchemeDescriptor::ds().regular_mask(1);
    let cc = SchemeDescriptor::cc().regular_mask(1);
    assert!((operator_norm(&ds) - 1.0).abs() < 1e-15);
    assert!((operator_norm(&cc) - 1.0).abs() < 1e-15);
    assert_eq!(ds.coset_sums(), [1.0; 4]);
    assert_eq!(operator_norm(&Mask2D::zeros([0, 0], [3, 3])), 0.0);
}

#[test]
fn operator_norm_takes_the_worst_coset() {
    // coset (0,0) sums to 3, the others to 1 or 0
    let m = Mask2D::new([0, 0], &[vec![2.0, -1.0], vec![1.0, 0.0]]);
    assert_eq!(operator_norm(&m), 2.0);
    let m = Mask2D::new([0, 0], &[vec![2.0, -1.0, 1.0], vec![1.0, 0.0, 0.0]]);
    assert_eq!(operator_norm(&m), 3.0);
}

#[test]
fn mask_distances() {
    let ds = SchemeDescriptor::ds().regular_mask(1);
    assert_eq!(mask_distance(&ds, &ds), 0.0);
    let h0 = SchemeDescriptor::trig_ds(0.0).unwrap();
    assert_eq!(mask_distance(&h0.regular_mask(1), &ds), 0.0);

    // sup distance at h = 1, k = 1 is positive and below (A + 2B + C)/4
    // with the frozen coefficient-bound constants
    let h1 = SchemeDescriptor::trig_ds(1.0).unwrap();
    let d = mask_distance(&h1.regular_mask(1), &ds);
    let (a, b, c4) = match h1.coefficients(1) {
        nssubdiv::schemes::LevelCoefficients::TrigDs { a, b, c4, .. } => (a, b, c4),
        _ => unreachable!(),
    };
    let direct = (a - 0.5).abs() + 2.0 * (b - 0.125).abs() + 4.0 * (c4 - 1.0 / 16.0).abs();
    let (ca, cb, cc) = (1.71, 0.71, 3.45);
    assert!(
        d > 0.0 && d <= direct && d <= (ca + 2.0 * cb + cc) / 4.0,
        "{d}"
    );
}

#[test]
fn divided_difference_examples() {
    // (1+z₁)³(1+z₂)³/16 → (1+z₁)²(1+z₂)³/8
    let cube = binomial_row(3);
    let sym = LaurentSymbol::tensor([0, 0], &cube, &cube).scaled(c(1.0 / 16.0));
    let b = divided_difference_symbol(&sym, Direction::E1).unwrap();
    let want = LaurentSymbol::tensor([0, 0], &binomial_row(2), &cube).scaled(c(1.0 / 8.0));
    assert!(b.max_abs_diff(&want) < 1e-15);

    // (1+z₁)/2 → 1
    let half = LaurentSymbol::tensor([0, 0], &[c(0.5), c(0.5)], &[c(1.0)]);
    let b = divided_difference_symbol(&half, Direction::E1).unwrap();
    let one = LaurentSymbol::tensor([0, 0], &[c(1.0)], &[c(1.0)]);
    assert!(b.max_abs_diff(&one) < 1e-15);

    // 1 + z₁z₂ is not divisible by 1 + z₁
    let diag = LaurentSymbol {
        offset: [0, 0],
        dims: [2, 2],
        data: vec![c(1.0), c(0.0), c(0.0), c(1.0)],
    };
    assert!(matches!(
        divided_difference_symbol(&diag, Direction::E1),
        Err(Error::NotDivisible { direction: 1, .. })
    ));
}

#[test]
fn smoothing_factor_detection() {
    let cc = SchemeDescriptor::cc().regular_mask(1).to_symbol();
    assert!(has_smoothing_factor(&cc));
    let quartic =
        LaurentSymbol::tensor([-2, -2], &binomial_row(4), &binomial_row(4)).scaled(c(1.0 / 64.0));
    assert!(cc.max_abs_diff(&quartic) < 1e-15);

    let delta = LaurentSymbol::tensor([0, 0], &[c(1.0)], &[c(1.0)]);
    assert!(!has_smoothing_factor(&delta));

    for h in [0.0, 1.0 / 16.0, 0.5, 1.0] {
        let s = SchemeDescriptor::trig_ds(h).unwrap();
        for k in 1..=20 {
            assert!(
                has_smoothing_factor(&s.regular_mask(k).to_symbol()),
                "h={h} k={k}"
            );
        }
    }
}

#[test]
fn factored_symbols_match_masks() {
    let schemes = [
        SchemeDescriptor::ds(),
        SchemeDescriptor::cc(),
        SchemeDescriptor::trig_ds(1.0).unwrap(),
        SchemeDescriptor::trig_ds(1.0 / 16.0).unwrap(),
        SchemeDescriptor::exp_cc(Theta::Real(3.0)).unwrap(),
        SchemeDescriptor::exp_cc(Theta::Imag(10.0)).unwrap(),
    ];
    for s in schemes {
        for k in 1..=20 {
            let f = s.factored_symbol(k).unwrap();
            let m = s.regular_mask(k).to_symbol();
            assert!(
                f.max_abs_diff(&m) < 1e-13,
                "{s} k={k}: {}",
                f.max_abs_diff(&m)
            );
        }
    }
}

#[test]
fn equivalence_examples() {
    let ds = SchemeDescriptor::ds();
    let reference = ds.regular_mask(1);

    let trig = SchemeDescriptor::trig_ds(1.0).unwrap();
    let e = asymptotic_equivalence(1, &|k| trig.regular_mask(k), &reference, 40);
    assert_eq!(e.verdict, Verdict::Converged);
    // terms decay like 2^k / 4^k until the masks agree in floating point
    for k in 5..15 {
        let r = e.terms[k] / e.terms[k - 1];
        assert!((r - 0.5).abs() < 0.01, "k={k} ratio {r}");
    }

    let same = asymptotic_equivalence(1, &|k| ds.regular_mask(k), &reference, 40);
    assert!(same.partial_sums.iter().all(|&s| s == 0.0));
    assert_eq!(same.verdict, Verdict::Converged);

    let exp = SchemeDescriptor::exp_cc(Theta::Imag(10.0)).unwrap();
    let cc = SchemeDescriptor::cc().regular_mask(1);
    let e = asymptotic_equivalence(1, &|k| exp.regular_mask(k), &cc, 40);
    assert_eq!(e.verdict, Verdict::Converged);
    assert_eq!(e.rows().len(), 40);
}

#[test]
fn non_equivalent_sequence_diverges() {
    let ds = SchemeDescriptor::ds().regular_mask(1);
    let cc = SchemeDescriptor::cc().regular_mask(1);
    // a constant offset never dies out
    let e = asymptotic_equivalence(0, &|_| cc.clone(), &ds, 40);
    assert_ne!(e.verdict, Verdict::Converged);
    // a 2^{-k} perturbation is order-0 but not order-1 equivalent
    let slow = |k: u32| {
        let mut m = ds.clone();
        m.data[0] += 2f64.powi(-(k as i32));
        m
    };
    let e = asymptotic_equivalence(1, &slow, &ds, 40);
    assert_ne!(e.verdict, Verdict::Converged);
}

#[test]
fn iterated_masks() {
    let ds = SchemeDescriptor::ds().regular_mask(1);
    let two = iterated_mask(&[ds.clone(), ds.clone()]);
    assert!((two.data.iter().sum::<f64>() - 16.0).abs() < 1e-13);
    assert!((iterated_operator_norm(&[ds.clone(), ds]) - 1.0).abs() < 1e-14);
}

fn small_poly() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, 1..5)
}

proptest! {
    #[test]
    fn division_inverts_multiplication(p in small_poly(), q in small_poly(), dir in prop::bool::ANY) {
        let p: Vec<Complex64> = p.into_iter().map(c).collect();
        let q: Vec<Complex64> = q.into_iter().map(c).collect();
        let d = if dir { Direction::E1 } else { Direction::E2 };
        let base = LaurentSymbol::tensor([-1, 0], &p, &q);
        let prod = base.times_one_plus(d);
        let back = divided_difference_symbol(&prod.scaled(c(0.5)), d).unwrap();
        // 2·(prod/2)/(1+z) = base
        prop_assert!(back.max_abs_diff(&base) < 1e-12);
    }

    #[test]
    fn operator_norm_is_subadditive(a in prop::collection::vec(-1.0f64..1.0, 16), b in prop::collection::vec(-1.0f64..1.0, 16)) {
        let rows = |v: &[f64]| v.chunks(4).map(|r| r.to_vec()).collect::<Vec<_>>();
        let ma = Mask2D::new([-1, -1], &rows(&a));
        let mb = Mask2D::new([-1, -1], &rows(&b));
        let mut sum = ma.clone();
        for (x, y) in sum.data.iter_mut().zip(&mb.data) {
            *x += y;
        }
        prop_assert!(operator_norm(&sum) <= operator_norm(&ma) + operator_norm(&mb) + 1e-12);
        prop_assert!(operator_norm(&ma.scaled(-2.0)) - 2.0 * operator_norm(&ma) < 1e-12);
    }
}
