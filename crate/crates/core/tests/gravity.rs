use gravity_core::combinatorics::TreeInsertion;
use gravity_core::gk::{compare_operads, grav_gk_compose, grav_gk_presentation, GravityElementGK};
use gravity_core::linalg::{LinearMap, Rational, SparseVec};
use gravity_core::operad::{
    check_axioms, check_getzler_relations, grading_automorphism, getzler_defect, CompositionKey, OperadPresentation,
    PresentationDoc, JACOBI_CONVENTION,
};
use gravity_core::westerland::{
    check_suboperad, grav_w_compose, grav_w_presentation, grav_w_space, GravityElementW,
};
use gravity_core::Error;
use proptest::prelude::*;

fn q(v: i64) -> Rational {
    Rational::from(v)
}

fn tree(r: usize, s: usize, i: usize) -> TreeInsertion {
    TreeInsertion::new(r, s, i).unwrap()
}

#[test]
fn bracket_squares_golden() {
    let b = GravityElementW::basis_element(2, 1, 0).unwrap();
    let first = grav_w_compose(&tree(2, 2, 1), &b, &b).unwrap();
    assert_eq!(first.coords().to_dense(), vec![q(1), q(0)]);
    let second = grav_w_compose(&tree(2, 2, 2), &b, &b).unwrap();
    assert_eq!(second.coords().to_dense(), vec![q(-1), q(-1)]);

    let g = GravityElementGK::basis_element(2, 1, 0).unwrap();
    assert_eq!(grav_gk_compose(&tree(2, 2, 1), &g, &g).unwrap().coords(), first.coords());
    assert_eq!(grav_gk_compose(&tree(2, 2, 2), &g, &g).unwrap().coords(), second.coords());
}

#[test]
fn jacobi_in_arity_three() {
    // the three composites of the bracket with itself, summed with the plain sign
    let p = grav_w_presentation(3).unwrap();
    let d = getzler_defect(&p, 3, 0, JACOBI_CONVENTION).unwrap();
    assert_eq!(d.dim(), 2);
    assert!(d.is_zero());
    let g = grav_gk_presentation(3).unwrap();
    assert!(getzler_defect(&g, 3, 0, JACOBI_CONVENTION).unwrap().is_zero());
}

#[test]
fn getzler_examples() {
    let p = grav_w_presentation(4).unwrap();
    for (k, l) in [(2, 1), (3, 1), (4, 0), (2, 2)] {
        let report = check_getzler_relations(&p, k, l).unwrap();
        assert!(report.passed(), "{report:#?}");
    }
    assert!(matches!(getzler_defect(&p, 2, 0, JACOBI_CONVENTION), Err(Error::OutOfRange { .. })));
    assert!(matches!(getzler_defect(&p, 4, 1, JACOBI_CONVENTION), Err(Error::OutOfRange { .. })));
}

#[test]
fn suboperad_examples() {
    for (r, s, i) in [(2, 2, 1), (3, 2, 2), (1, 1, 1), (4, 2, 4)] {
        let report = check_suboperad(r, s, i).unwrap();
        assert!(report.passed(), "{report:#?}");
        assert!(report.outcomes[0].cases > 0);
    }
}

#[test]
fn both_models_satisfy_axioms_to_five() {
    for p in [grav_w_presentation(5).unwrap(), grav_gk_presentation(5).unwrap()] {
        let report = check_axioms(&p, 5);
        assert!(report.passed(), "{report:#?}");
    }
}

#[test]
fn corrupted_constant_breaks_associativity() {
    let mut p = grav_w_presentation(4).unwrap();
    let key = CompositionKey::new(tree(2, 2, 1), 1, 1);
    let m = &p.compositions[&key];
    let corrupted = LinearMap::from_dense(&[vec![q(-1)], vec![q(0)]], m.source().clone(), m.target().clone()).unwrap();
    p.compositions.insert(key, corrupted);
    let report = check_axioms(&p, 4);
    assert!(!report.passed());
    let failing: Vec<_> = report.outcomes.iter().filter(|o| !o.passed()).map(|o| o.check.as_str()).collect();
    assert!(failing.contains(&"sequential associativity"), "{failing:?}");
}

#[test]
fn grading_examples() {
    let p = grav_w_presentation(4).unwrap();
    let a2 = grading_automorphism(&q(2), &p).unwrap();
    let v = SparseVec::unit(p.dim(4, 2), 3);
    assert_eq!(a2.apply(4, 2, &v), v.scale(&q(4)));
    let a3 = grading_automorphism(&q(3), &p).unwrap();
    let a6 = grading_automorphism(&q(6), &p).unwrap();
    assert_eq!(a2.then(&a3).unwrap(), a6);
    assert!(matches!(grading_automorphism(&q(0), &p), Err(Error::ZeroScalar)));
}

#[test]
fn comparison_small_bounds() {
    for max in 1..=3 {
        let report = compare_operads(max).unwrap();
        assert!(report.passed());
        assert!(report.entries.is_empty());
    }
}

#[test]
fn presentation_document_round_trip() {
    let p = grav_w_presentation(4).unwrap();
    let js = serde_json::to_string(&p.to_document()).unwrap();
    let doc: PresentationDoc = serde_json::from_str(&js).unwrap();
    let back = OperadPresentation::from_document(&doc).unwrap();
    assert_eq!(back, p);
    let v: serde_json::Value = serde_json::from_str(&js).unwrap();
    assert_eq!(v["schema"], "gravity-operad/1");
    let first = &v["compositions"][0];
    for field in ["r", "s", "i", "deg_x", "deg_y", "matrix"] {
        assert!(first.get(field).is_some(), "{field}");
    }
}

#[test]
fn weights_follow_degree() {
    for n in 1..=5 {
        for c in grav_w_space(n).unwrap() {
            assert_eq!(c.weight, -2 * c.degree as i64);
        }
    }
}

fn composable() -> impl Strategy<Value = (TreeInsertion, usize, usize, usize, usize)> {
    (1usize..=5, 1usize..=5)
        .prop_filter("total arity", |(r, s)| r + s - 1 <= 6)
        .prop_flat_map(|(r, s)| (Just(r), Just(s), 1..=r, 0usize..16, 0usize..16))
        .prop_map(|(r, s, i, a, b)| {
            let p = if r == 1 { 0 } else { 1 + a % (r - 1) };
            let q = if s == 1 { 0 } else { 1 + b % (s - 1) };
            (tree(r, s, i), p, q, a, b)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_adds_degrees((t, p, q, a, b) in composable()) {
        let x_dim = grav_w_space(t.r()).unwrap().into_iter().find(|c| c.degree == p).map_or(0, |c| c.dim);
        let y_dim = grav_w_space(t.s()).unwrap().into_iter().find(|c| c.degree == q).map_or(0, |c| c.dim);
        prop_assume!(x_dim > 0 && y_dim > 0);
        let x = GravityElementW::basis_element(t.r(), p, a % x_dim).unwrap();
        let y = GravityElementW::basis_element(t.s(), q, b % y_dim).unwrap();
        let z = grav_w_compose(&t, &x, &y).unwrap();
        prop_assert_eq!(z.n(), t.n());
        prop_assert_eq!(z.degree(), p + q);
        let xg = GravityElementGK::basis_element(t.r(), p, a % x_dim).unwrap();
        let yg = GravityElementGK::basis_element(t.s(), q, b % y_dim).unwrap();
        let zg = grav_gk_compose(&t, &xg, &yg).unwrap();
        prop_assert_eq!(zg.coords(), z.coords());
    }
}
