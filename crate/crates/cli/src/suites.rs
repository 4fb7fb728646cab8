use gravity_core::arnold::{basis, multiply, straighten, ArnoldElement, ArnoldTensor};
use gravity_core::circle::{delta_contract, delta_matrix, moduli_basis};
use gravity_core::combinatorics::TreeInsertion;
use gravity_core::gk::{compare_operads, grav_gk_presentation, residue_class, ComparisonReport};
use gravity_core::linalg::{rank, Rational};
use gravity_core::operad::{check_axioms, check_getzler_relations, check_grading_action, CheckOutcome, Report};
use gravity_core::westerland::{check_suboperad, grav_w_presentation};
use gravity_core::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Arnold,
    Delta,
    Westerland,
    Gk,
    Compare,
    Relations,
    All,
}

#[derive(Serialize)]
pub struct VerifyOutput {
    pub schema: &'static str,
    pub suite: Suite,
    pub max_arity: usize,
    pub seed: u64,
    pub passed: bool,
    pub reports: Vec<Report>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<ComparisonReport>,
}

fn coefficients(from: usize, to: usize) -> Vec<usize> {
    let mut c = vec![1usize];
    for j in from..=to {
        let mut next = vec![0; c.len() + 1];
        for (k, v) in c.iter().enumerate() {
            next[k] += v;
            next[k + 1] += v * j;
        }
        c = next;
    }
    c
}

fn random_monomial(rng: &mut ChaCha8Rng, n: usize, k: usize) -> ArnoldElement {
    let b = basis(n, k);
    ArnoldElement::from_monomial(n, b.monomials()[rng.gen_range(0..b.len())].clone())
}

fn arnold(max: usize, seed: u64) -> Result<Report> {
    let mut report = Report::new(format!("Arnold algebra up to arity {max}"));
    let mut dims = CheckOutcome::new("Poincaré polynomial");
    for n in 1..=max {
        for (k, e) in coefficients(1, n - 1).into_iter().enumerate() {
            let got = basis(n, k).len();
            dims.record(got == e, || format!("|basis({n},{k})| = {got}, expected {e}"));
        }
    }
    report.push(dims);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut relation = CheckOutcome::new("Arnold relation straightens to zero");
    let mut assoc = CheckOutcome::new("product is associative and graded commutative");
    for n in 3..=max.max(3) {
        for a in 1..=n {
            for b in a + 1..=n {
                for c in b + 1..=n {
                    let mut acc = ArnoldElement::zero(n, 2);
                    for w in [[(a, b), (b, c)], [(b, c), (c, a)], [(c, a), (a, b)]] {
                        acc = acc.add(&straighten(&w, 1, n)?)?;
                    }
                    relation.record(acc.is_zero(), || format!("relation ({a},{b},{c}) in arity {n} gives {acc}"));
                }
            }
        }
    }
    for _ in 0..200 {
        let n = rng.gen_range(2..=max.max(2));
        let (p, q) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let r = rng.gen_range(0..n);
        let (x, y, z) = (random_monomial(&mut rng, n, p), random_monomial(&mut rng, n, q), random_monomial(&mut rng, n, r));
        let left = multiply(&multiply(&x, &y)?, &z)?;
        let right = multiply(&x, &multiply(&y, &z)?)?;
        let xy = multiply(&x, &y)?;
        let yx = multiply(&y, &x)?.scale(&Rational::sign(p * q));
        let same = |a: &ArnoldElement, b: &ArnoldElement| a == b || (a.is_zero() && b.is_zero());
        assoc.record(same(&left, &right) && same(&xy, &yx), || format!("fails on {x}, {y}, {z}"));
    }
    report.push(relation);
    report.push(assoc);
    Ok(report)
}

fn delta(max: usize, seed: u64) -> Result<Report> {
    let mut report = Report::new(format!("circle action up to arity {max}"));
    let mut square = CheckOutcome::new("Δ*² = 0");
    let mut exact = CheckOutcome::new("ker Δ* = im Δ*");
    for n in 1..=max {
        for k in 0..n {
            for m in basis(n, k).monomials() {
                let x = ArnoldElement::from_monomial(n, m.clone());
                square.record(delta_contract(&delta_contract(&x)).is_zero(), || format!("on {x}"));
            }
            if n >= 2 {
                let ker = moduli_basis(n, k)?;
                let image = delta_matrix(n, k + 1);
                let contained = (0..image.cols()).all(|c| ker.coordinates(&image.column(c)).is_ok());
                exact.record(contained && ker.len() == rank(&image), || format!("arity {n} degree {k}"));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut derivation = CheckOutcome::new("Δ* is a derivation");
    for _ in 0..300 {
        let n = rng.gen_range(2..=max.max(2));
        let a = rng.gen_range(1..n);
        let b = rng.gen_range(0..n - a);
        let (x, y) = (random_monomial(&mut rng, n, a), random_monomial(&mut rng, n, b));
        let lhs = delta_contract(&multiply(&x, &y)?);
        let first = multiply(&delta_contract(&x), &y)?;
        let second = multiply(&x, &delta_contract(&y))?.scale(&Rational::sign(a));
        let rhs = first.add(&second)?;
        derivation.record(lhs == rhs || (lhs.is_zero() && rhs.is_zero()), || format!("on {x} · {y}"));
    }
    report.push(square);
    report.push(derivation);
    report.push(exact);
    Ok(report)
}

fn westerland(max: usize) -> Result<Vec<Report>> {
    let mut stability = Report::new(format!("suboperad stability up to arity {max}"));
    let mut all = CheckOutcome::new("ker Δ stable under every ∘_i");
    for t in TreeInsertion::all_up_to(max, true) {
        for o in check_suboperad(t.r(), t.s(), t.i())?.outcomes {
            all.merge(o);
        }
    }
    stability.push(all);
    let p = grav_w_presentation(max)?;
    Ok(vec![stability, check_axioms(&p, max)])
}

fn delta_closed_factors(t: &TreeInsertion, x: &ArnoldTensor) -> bool {
    let mut left = ArnoldTensor::zero(t.r(), t.s(), x.degree().saturating_sub(1));
    let mut right = left.clone();
    for ((l, r), c) in x.terms() {
        for (m, v) in delta_contract(&ArnoldElement::from_monomial(t.r(), l.clone())).terms() {
            left.add_term(m.clone(), r.clone(), v * c);
        }
        for (m, v) in delta_contract(&ArnoldElement::from_monomial(t.s(), r.clone())).terms() {
            right.add_term(l.clone(), m.clone(), v * c);
        }
    }
    left.is_zero() && right.is_zero()
}

fn gk(max: usize) -> Result<Vec<Report>> {
    let mut residues = Report::new(format!("residues up to arity {max}"));
    let mut closed = CheckOutcome::new("residues are Δ*-closed in both factors");
    for t in TreeInsertion::all_up_to(max, false) {
        for k in 1..t.n() - 1 {
            for class in moduli_basis(t.n(), k)?.classes() {
                let res = residue_class(&t, class)?;
                closed.record(delta_closed_factors(&t, &res), || format!("{t} on {}", class.underlying()));
            }
        }
    }
    residues.push(closed);
    let p = grav_gk_presentation(max)?;
    Ok(vec![residues, check_axioms(&p, max)])
}

fn relations(max: usize) -> Result<Vec<Report>> {
    let mut out = Vec::new();
    let scalars = [Rational::from(2), Rational::from(3), Rational::from(-1)];
    for p in [grav_w_presentation(max)?, grav_gk_presentation(max)?] {
        for k in 2..=max {
            for l in 0..=max - k {
                if k + l >= 3 {
                    out.push(check_getzler_relations(&p, k, l)?);
                }
            }
        }
        out.push(check_grading_action(&p, &scalars, max)?);
    }
    Ok(out)
}

pub fn run(suite: Suite, max: usize, seed: u64) -> Result<VerifyOutput> {
    let mut reports = Vec::new();
    let mut comparison = None;
    let wants = |s: Suite| suite == s || suite == Suite::All;
    if wants(Suite::Arnold) {
        reports.push(arnold(max, seed)?);
    }
    if wants(Suite::Delta) {
        reports.push(delta(max, seed)?);
    }
    if wants(Suite::Westerland) {
        reports.extend(westerland(max)?);
    }
    if wants(Suite::Gk) {
        reports.extend(gk(max)?);
    }
    if wants(Suite::Compare) {
        comparison = Some(compare_operads(max)?);
    }
    if wants(Suite::Relations) {
        reports.extend(relations(max)?);
    }
    let passed = reports.iter().all(Report::passed) && comparison.as_ref().map_or(true, ComparisonReport::passed);
    Ok(VerifyOutput { schema: gravity_core::operad::SCHEMA, suite, max_arity: max, seed, passed, reports, comparison })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_coefficients() {
        assert_eq!(coefficients(2, 3), vec![1, 5, 6]);
        assert_eq!(coefficients(1, 0), vec![1]);
    }

    #[test]
    fn small_suites_pass() {
        for suite in [Suite::Arnold, Suite::Delta, Suite::Relations] {
            assert!(run(suite, 4, 3).unwrap().passed);
        }
    }
}
