mod common;

use common::*;
use gravity_core::arnold::{basis, cocompose, straighten, ArnoldElement};
use gravity_core::circle::moduli_basis;
use gravity_core::combinatorics::TreeInsertion;
use gravity_core::gk::{residue, residue_class};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

fn random_word(rng: &mut impl Rng, n: usize, len: usize) -> Vec<(usize, usize)> {
    (0..len)
        .map(|_| {
            let a = rng.gen_range(1..=n);
            let mut b = rng.gen_range(1..=n);
            while b == a {
                b = rng.gen_range(1..=n);
            }
            (a, b)
        })
        .collect()
}

fn random_tree(rng: &mut impl Rng, n: usize) -> TreeInsertion {
    let r = rng.gen_range(1..=n);
    let s = n + 1 - r;
    TreeInsertion::new(r, s, rng.gen_range(1..=r)).unwrap()
}

#[test]
fn straightening_matches_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..150 {
        let n = rng.gen_range(3..=6);
        let len = rng.gen_range(1..=(n - 1).min(4));
        let word = random_word(&mut rng, n, len);
        let x = straighten(&word, 1, n).unwrap();
        for _ in 0..3 {
            let z = configuration(&mut rng, n);
            assert!(forms_agree(&element_form(&x, &z), &word_form(&word, &z), TOL), "{word:?} -> {x}");
        }
    }
}

#[test]
fn arnold_relation_vanishes_numerically() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let z = configuration(&mut rng, 3);
    let mut acc = Form::new();
    for word in [[(1, 2), (2, 3)], [(2, 3), (3, 1)], [(3, 1), (1, 2)]] {
        add_scaled(&mut acc, &word_form(&word, &z), 1.0);
    }
    assert!(forms_agree(&acc, &Form::new(), TOL));
}

#[test]
fn cocomposition_matches_collision_limit() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..100 {
        let n = rng.gen_range(2..=6);
        let t = random_tree(&mut rng, n);
        let k = rng.gen_range(0..n);
        let b = basis(n, k);
        let m = b.monomials()[rng.gen_range(0..b.len())].clone();
        let x = ArnoldElement::from_monomial(n, m);
        let image = cocompose(&t, &x).unwrap();
        for _ in 0..3 {
            let xs = configuration(&mut rng, t.r());
            let ws = configuration(&mut rng, t.s());
            let chart = CollisionChart { t, x: &xs, w: &ws, eps: 1e-12 };
            let lhs = CollisionChart::restrict_fixed_eps(&chart.element_form(&x));
            assert!(forms_agree(&lhs, &chart.tensor_form(&image), TOL), "{t} {x}");
        }
    }
}

#[test]
fn residue_example_by_limit() {
    let t = TreeInsertion::new(2, 2, 1).unwrap();
    let x = straighten(&[(1, 2)], 1, 3).unwrap().sub(&straighten(&[(1, 3)], 1, 3).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let xs = configuration(&mut rng, 2);
    let ws = configuration(&mut rng, 2);
    let chart = CollisionChart { t, x: &xs, w: &ws, eps: 1e-12 };
    let res = chart.residue_part(&chart.element_form(&x));
    let exact = residue(&t, &x).unwrap();
    assert_eq!(exact.to_string(), "1*(1 ⊗ 1)");
    assert!(forms_agree(&res, &chart.tensor_form(&exact), TOL));
}

#[test]
fn residues_of_moduli_classes_match_limit() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for n in 3..=5 {
        for t in TreeInsertion::all_up_to(n, false).into_iter().filter(|t| t.n() == n) {
            for k in 1..n - 1 {
                for class in moduli_basis(n, k).unwrap().classes() {
                    let exact = residue_class(&t, class).unwrap();
                    let xs = configuration(&mut rng, t.r());
                    let ws = configuration(&mut rng, t.s());
                    let chart = CollisionChart { t, x: &xs, w: &ws, eps: 1e-12 };
                    let res = chart.residue_part(&chart.element_form(class.underlying()));
                    assert!(forms_agree(&res, &chart.tensor_form(&exact), TOL), "{t} {}", class.underlying());
                }
            }
        }
    }
}

#[test]
fn oracle_detects_sign_errors() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let word = [(1, 3), (2, 3)];
    let x = straighten(&word, 1, 3).unwrap();
    let z = configuration(&mut rng, 3);
    assert!(forms_agree(&element_form(&x, &z), &word_form(&word, &z), TOL));
    let flipped = x.scale(&gravity_core::linalg::Rational::from(-1));
    assert!(!forms_agree(&element_form(&flipped, &z), &word_form(&word, &z), TOL));
}
