//! Finite presentations of graded symmetric operads and the checks run on them.
//!
//! A presentation stores, per arity, the graded basis; per tree `t(r,s,i)` and
//! degree pair, the matrix of `∘_i` from `P(r)_p ⊗ P(s)_q` (source index
//! `a * dim P(s)_q + b`) to `P(r+s-1)_{p+q}`; and per arity the matrices of the
//! adjacent transpositions acting on the left.
//!
//! Conventions checked by [`check_axioms`], with `|x|` the degree:
//! * `(x ∘_i y) ∘_{i+j-1} z = x ∘_i (y ∘_j z)`
//! * `(x ∘_i y) ∘_{j+s-1} z = (-1)^{|y||z|} (x ∘_j z) ∘_i y` for `i < j`, `s` the arity of `y`
//! * `σx ∘_{σ(i)} τy = (σ ∘_i τ)·(x ∘_i y)`

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circle::weight;
use crate::combinatorics::{Permutation, TreeInsertion};
use crate::error::{Error, Result};
use crate::linalg::{BasisTag, LinearMap, Rational, SparseVec};

pub const SCHEMA: &str = "gravity-operad/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CompositionKey {
    pub tree: TreeInsertion,
    pub deg_x: usize,
    pub deg_y: usize,
}

impl CompositionKey {
    pub fn new(tree: TreeInsertion, deg_x: usize, deg_y: usize) -> Self {
        CompositionKey { tree, deg_x, deg_y }
    }
}

/// What a concrete operad has to provide to be presented.
pub trait OperadModel: Sync {
    fn name(&self) -> String;
    /// Graded basis of arity `n`: `(degree, labels)` for every nonzero degree.
    fn component(&self, n: usize) -> Result<Vec<(usize, Vec<String>)>>;
    fn composition(&self, key: &CompositionKey) -> Result<LinearMap>;
    /// Action of `s_j = (j j+1)` on the degree-`degree` part of arity `n`.
    fn transposition(&self, n: usize, j: usize, degree: usize) -> Result<LinearMap>;
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedComponent {
    pub degree: usize,
    pub dim: usize,
    pub weight: i64,
    pub labels: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArityComponent {
    pub n: usize,
    pub components: Vec<GradedComponent>,
    /// `transpositions[j-1][degree]`
    pub transpositions: Vec<BTreeMap<usize, LinearMap>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperadPresentation {
    pub name: String,
    pub max_arity: usize,
    pub arities: Vec<ArityComponent>,
    pub compositions: BTreeMap<CompositionKey, LinearMap>,
}

fn space_tag(n: usize, k: usize) -> BasisTag {
    BasisTag::new(format!("P({n})_{k}"))
}

fn pair_tag(r: usize, p: usize, s: usize, q: usize) -> BasisTag {
    BasisTag::new(format!("P({r})_{p}⊗P({s})_{q}"))
}

impl OperadPresentation {
    pub fn from_model(model: &dyn OperadModel, max_arity: usize) -> Result<Self> {
        let arities = (1..=max_arity)
            .into_par_iter()
            .map(|n| {
                let comps = model.component(n)?;
                let components = comps
                    .into_iter()
                    .map(|(degree, labels)| GradedComponent {
                        degree,
                        dim: labels.len(),
                        weight: weight(degree as i64),
                        labels,
                    })
                    .collect::<Vec<_>>();
                let mut transpositions = Vec::new();
                for j in 1..n {
                    let mut per_degree = BTreeMap::new();
                    for c in &components {
                        per_degree.insert(c.degree, model.transposition(n, j, c.degree)?);
                    }
                    transpositions.push(per_degree);
                }
                Ok(ArityComponent { n, components, transpositions })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut keys = Vec::new();
        for tree in TreeInsertion::all_up_to(max_arity, true) {
            for cx in &arities[tree.r() - 1].components {
                for cy in &arities[tree.s() - 1].components {
                    keys.push(CompositionKey::new(tree, cx.degree, cy.degree));
                }
            }
        }
        let compositions = keys
            .into_par_iter()
            .map(|key| Ok((key, model.composition(&key)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(OperadPresentation { name: model.name(), max_arity, arities, compositions })
    }

    pub fn dim(&self, n: usize, k: usize) -> usize {
        self.arities
            .get(n.wrapping_sub(1))
            .and_then(|a| a.components.iter().find(|c| c.degree == k))
            .map_or(0, |c| c.dim)
    }

    pub fn degrees(&self, n: usize) -> Vec<usize> {
        self.arities.get(n.wrapping_sub(1)).map_or(Vec::new(), |a| a.components.iter().map(|c| c.degree).collect())
    }

    pub fn basis_vectors(&self, n: usize, k: usize) -> Vec<SparseVec> {
        let d = self.dim(n, k);
        (0..d).map(|i| SparseVec::unit(d, i)).collect()
    }

    /// `x ∘_i y` on coordinate vectors.
    pub fn compose(&self, tree: &TreeInsertion, p: usize, x: &SparseVec, q: usize, y: &SparseVec) -> SparseVec {
        let out_dim = self.dim(tree.n(), p + q);
        let Some(m) = self.compositions.get(&CompositionKey::new(*tree, p, q)) else {
            return SparseVec::zero(out_dim);
        };
        let dy = self.dim(tree.s(), q);
        let mut pairs = Vec::new();
        for (a, xa) in x.entries() {
            for (b, yb) in y.entries() {
                pairs.push((a * dy + b, xa * yb));
            }
        }
        m.apply(&SparseVec::from_pairs(m.cols(), pairs)).expect("composition dimensions")
    }

    pub fn transposition(&self, n: usize, j: usize, k: usize) -> Option<&LinearMap> {
        self.arities.get(n - 1)?.transpositions.get(j - 1)?.get(&k)
    }

    /// Left action of a permutation of the arity-`g.len()` labels.
    pub fn act(&self, g: &Permutation, k: usize, v: &SparseVec) -> SparseVec {
        let n = g.len();
        let mut out = v.clone();
        for j in g.adjacent_word().into_iter().rev() {
            out = self.transposition(n, j, k).expect("transposition present").apply(&out).expect("dims");
        }
        out
    }

    /// The unit of arity 1, degree 0.
    pub fn unit(&self) -> Option<SparseVec> {
        (self.dim(1, 0) == 1 && self.degrees(1) == [0]).then(|| SparseVec::unit(1, 0))
    }

    /// `γ(x; z_1, ..., z_m)` computed as `(...(x ∘_m z_m) ∘_{m-1} ...) ∘_1 z_1`.
    pub fn brace(&self, x: (usize, usize, &SparseVec), args: &[(usize, usize, SparseVec)]) -> Result<(usize, usize, SparseVec)> {
        let (mut arity, mut deg, mut acc) = (x.0, x.1, x.2.clone());
        if args.len() != arity {
            return Err(Error::DimensionMismatch { expected: arity, found: args.len() });
        }
        for (slot, (za, zd, z)) in args.iter().enumerate().rev() {
            let t = TreeInsertion::new(arity, *za, slot + 1)?;
            acc = self.compose(&t, deg, &acc, *zd, z);
            arity = t.n();
            deg += zd;
        }
        Ok((arity, deg, acc))
    }

    pub fn to_document(&self) -> PresentationDoc {
        PresentationDoc {
            schema: SCHEMA.to_string(),
            name: self.name.clone(),
            max_arity: self.max_arity,
            arities: self
                .arities
                .iter()
                .map(|a| ArityDoc { n: a.n, components: a.components.clone() })
                .collect(),
            compositions: self
                .compositions
                .iter()
                .map(|(k, m)| StructureConstants::new(k, m))
                .collect(),
            transpositions: self
                .arities
                .iter()
                .flat_map(|a| {
                    a.transpositions.iter().enumerate().flat_map(move |(j, per)| {
                        per.iter().map(move |(deg, m)| TranspositionDoc {
                            n: a.n,
                            j: j + 1,
                            degree: *deg,
                            matrix: m.to_dense(),
                        })
                    })
                })
                .collect(),
        }
    }

    pub fn from_document(doc: &PresentationDoc) -> Result<Self> {
        if doc.schema != SCHEMA {
            return Err(Error::Parse { offset: 0, message: format!("unknown schema `{}`", doc.schema) });
        }
        let mut arities: Vec<ArityComponent> = doc
            .arities
            .iter()
            .map(|a| ArityComponent {
                n: a.n,
                components: a.components.clone(),
                transpositions: vec![BTreeMap::new(); a.n.saturating_sub(1)],
            })
            .collect();
        for t in &doc.transpositions {
            let tag = space_tag(t.n, t.degree);
            let m = dense_or_empty(&t.matrix, arities[t.n - 1].components.iter().find(|c| c.degree == t.degree).map_or(0, |c| c.dim), tag.clone(), tag)?;
            arities[t.n - 1].transpositions[t.j - 1].insert(t.degree, m);
        }
        let mut compositions = BTreeMap::new();
        for c in &doc.compositions {
            let tree = TreeInsertion::new(c.r, c.s, c.i)?;
            let key = CompositionKey::new(tree, c.deg_x, c.deg_y);
            let dim_of = |n: usize, k: usize| {
                arities.get(n - 1).and_then(|a| a.components.iter().find(|x| x.degree == k)).map_or(0, |x| x.dim)
            };
            let rows = dim_of(tree.n(), c.deg_x + c.deg_y);
            let cols = dim_of(c.r, c.deg_x) * dim_of(c.s, c.deg_y);
            let m = LinearMap::from_dense(&c.matrix, pair_tag(c.r, c.deg_x, c.s, c.deg_y), space_tag(tree.n(), c.deg_x + c.deg_y))?;
            let m = if c.matrix.is_empty() {
                LinearMap::zero(rows, cols, m.source().clone(), m.target().clone())
            } else {
                m
            };
            compositions.insert(key, m);
        }
        Ok(OperadPresentation { name: doc.name.clone(), max_arity: doc.max_arity, arities, compositions })
    }
}

fn dense_or_empty(values: &[Vec<Rational>], dim: usize, src: BasisTag, dst: BasisTag) -> Result<LinearMap> {
    if values.is_empty() {
        Ok(LinearMap::zero(dim, dim, src, dst))
    } else {
        LinearMap::from_dense(values, src, dst)
    }
}

/// Structure constants of one `∘_i` in the export format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureConstants {
    pub r: usize,
    pub s: usize,
    pub i: usize,
    pub deg_x: usize,
    pub deg_y: usize,
    pub matrix: Vec<Vec<Rational>>,
}

impl StructureConstants {
    pub fn new(key: &CompositionKey, m: &LinearMap) -> Self {
        StructureConstants {
            r: key.tree.r(),
            s: key.tree.s(),
            i: key.tree.i(),
            deg_x: key.deg_x,
            deg_y: key.deg_y,
            matrix: m.to_dense(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArityDoc {
    pub n: usize,
    pub components: Vec<GradedComponent>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranspositionDoc {
    pub n: usize,
    pub j: usize,
    pub degree: usize,
    pub matrix: Vec<Vec<Rational>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationDoc {
    pub schema: String,
    pub name: String,
    pub max_arity: usize,
    pub arities: Vec<ArityDoc>,
    pub compositions: Vec<StructureConstants>,
    pub transpositions: Vec<TranspositionDoc>,
}

/// Outcome of one family of checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub check: String,
    pub cases: usize,
    pub failure_count: usize,
    /// First few failures, in a deterministic order.
    pub failures: Vec<String>,
}

const MAX_LISTED_FAILURES: usize = 20;

impl CheckOutcome {
    pub fn new(check: impl Into<String>) -> Self {
        CheckOutcome { check: check.into(), cases: 0, failure_count: 0, failures: Vec::new() }
    }

    pub fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failure_count += 1;
            if self.failures.len() < MAX_LISTED_FAILURES {
                self.failures.push(detail());
            }
        }
    }

    pub fn merge(&mut self, other: CheckOutcome) {
        self.cases += other.cases;
        self.failure_count += other.failure_count;
        for f in other.failures {
            if self.failures.len() < MAX_LISTED_FAILURES {
                self.failures.push(f);
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub title: String,
    pub outcomes: Vec<CheckOutcome>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report { title: title.into(), outcomes: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed())
    }

    pub fn push(&mut self, o: CheckOutcome) {
        self.outcomes.push(o);
    }
}

/// Merges per-cell outcomes computed in parallel, in input order.
fn collect_cells<T: Sync>(name: &str, cells: &[T], f: impl Fn(&T) -> CheckOutcome + Sync) -> CheckOutcome {
    let parts: Vec<CheckOutcome> = cells.par_iter().map(&f).collect();
    let mut total = CheckOutcome::new(name);
    for p in parts {
        total.merge(p);
    }
    total
}

fn triples(bound: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for r in 1..=bound {
        for s in 1..=bound {
            for u in 1..=bound {
                if r + s + u <= bound + 2 {
                    out.push((r, s, u));
                }
            }
        }
    }
    out
}

/// Exhaustive check of the operad axioms on basis elements, up to total arity `bound`.
pub fn check_axioms(p: &OperadPresentation, bound: usize) -> Report {
    let bound = bound.min(p.max_arity);
    let mut report = Report::new(format!("operad axioms for {} up to arity {bound}", p.name));
    report.push(check_coxeter(p, bound));
    report.push(check_units(p, bound));
    report.push(check_sequential(p, bound));
    report.push(check_parallel(p, bound));
    report.push(check_equivariance(p, bound));
    report
}

fn check_coxeter(p: &OperadPresentation, bound: usize) -> CheckOutcome {
    let mut out = CheckOutcome::new("coxeter relations");
    for n in 2..=bound {
        for k in p.degrees(n) {
            let d = p.dim(n, k);
            let id = LinearMap::identity(d, space_tag(n, k));
            let s = |j: usize| p.transposition(n, j, k).cloned().unwrap_or_else(|| LinearMap::zero(d, d, space_tag(n, k), space_tag(n, k)));
            let same = |a: &LinearMap, b: &LinearMap| a.to_dense() == b.to_dense();
            for j in 1..n {
                let sj = s(j);
                out.record(same(&sj.compose(&sj).unwrap(), &id), || format!("s_{j}^2 != 1 in arity {n} degree {k}"));
                if j + 1 < n {
                    let b = sj.compose(&s(j + 1)).unwrap();
                    let cube = b.compose(&b).unwrap().compose(&b).unwrap();
                    out.record(same(&cube, &id), || format!("(s_{j} s_{})^3 != 1 in arity {n} degree {k}", j + 1));
                }
                for l in j + 2..n {
                    let sl = s(l);
                    out.record(same(&sj.compose(&sl).unwrap(), &sl.compose(&sj).unwrap()), || {
                        format!("s_{j} s_{l} != s_{l} s_{j} in arity {n} degree {k}")
                    });
                }
            }
        }
    }
    out
}

fn check_units(p: &OperadPresentation, bound: usize) -> CheckOutcome {
    let mut out = CheckOutcome::new("unit laws");
    let Some(e) = p.unit() else {
        out.record(false, || "no one-dimensional arity-1 degree-0 unit".to_string());
        return out;
    };
    for n in 1..=bound {
        for k in p.degrees(n) {
            for v in p.basis_vectors(n, k) {
                let left = p.compose(&TreeInsertion::new(1, n, 1).unwrap(), 0, &e, k, &v);
                out.record(left == v, || format!("1 ∘_1 x != x for arity {n} degree {k}"));
                for i in 1..=n {
                    let right = p.compose(&TreeInsertion::new(n, 1, i).unwrap(), k, &v, 0, &e);
                    out.record(right == v, || format!("x ∘_{i} 1 != x for arity {n} degree {k}"));
                }
            }
        }
    }
    out
}

fn check_sequential(p: &OperadPresentation, bound: usize) -> CheckOutcome {
    let mut cells = Vec::new();
    for (r, s, u) in triples(bound) {
        for i in 1..=r {
            for j in 1..=s {
                cells.push((r, s, u, i, j));
            }
        }
    }
    collect_cells("sequential associativity", &cells, |&(r, s, u, i, j)| {
        let mut out = CheckOutcome::new("");
        let t_xy = TreeInsertion::new(r, s, i).unwrap();
        let t_xy_z = TreeInsertion::new(r + s - 1, u, i + j - 1).unwrap();
        let t_yz = TreeInsertion::new(s, u, j).unwrap();
        let t_x_yz = TreeInsertion::new(r, s + u - 1, i).unwrap();
        for a in p.degrees(r) {
            for b in p.degrees(s) {
                for c in p.degrees(u) {
                    for x in p.basis_vectors(r, a) {
                        for y in p.basis_vectors(s, b) {
                            let xy = p.compose(&t_xy, a, &x, b, &y);
                            for z in p.basis_vectors(u, c) {
                                let lhs = p.compose(&t_xy_z, a + b, &xy, c, &z);
                                let yz = p.compose(&t_yz, b, &y, c, &z);
                                let rhs = p.compose(&t_x_yz, a, &x, b + c, &yz);
                                out.record(lhs == rhs, || {
                                    format!("(x ∘_{i} y) ∘_{} z != x ∘_{i} (y ∘_{j} z), arities ({r},{s},{u}), degrees ({a},{b},{c})", i + j - 1)
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    })
}

fn check_parallel(p: &OperadPresentation, bound: usize) -> CheckOutcome {
    let mut cells = Vec::new();
    for (r, s, u) in triples(bound) {
        for i in 1..=r {
            for j in i + 1..=r {
                cells.push((r, s, u, i, j));
            }
        }
    }
    collect_cells("parallel composition", &cells, |&(r, s, u, i, j)| {
        let mut out = CheckOutcome::new("");
        let t1 = TreeInsertion::new(r, s, i).unwrap();
        let t2 = TreeInsertion::new(r + s - 1, u, j + s - 1).unwrap();
        let t3 = TreeInsertion::new(r, u, j).unwrap();
        let t4 = TreeInsertion::new(r + u - 1, s, i).unwrap();
        for a in p.degrees(r) {
            for b in p.degrees(s) {
                for c in p.degrees(u) {
                    let sign = Rational::sign(b * c);
                    for x in p.basis_vectors(r, a) {
                        for y in p.basis_vectors(s, b) {
                            let xy = p.compose(&t1, a, &x, b, &y);
                            for z in p.basis_vectors(u, c) {
                                let lhs = p.compose(&t2, a + b, &xy, c, &z);
                                let xz = p.compose(&t3, a, &x, c, &z);
                                let rhs = p.compose(&t4, a + c, &xz, b, &y).scale(&sign);
                                out.record(lhs == rhs, || {
                                    format!("parallel ∘_{i}, ∘_{j} fails, arities ({r},{s},{u}), degrees ({a},{b},{c})")
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    })
}

fn check_equivariance(p: &OperadPresentation, bound: usize) -> CheckOutcome {
    let trees: Vec<_> = TreeInsertion::all_up_to(bound, true);
    collect_cells("equivariance", &trees, |t| {
        let mut out = CheckOutcome::new("");
        let (r, s, i) = (t.r(), t.s(), t.i());
        let mut gens: Vec<(Permutation, Permutation)> = Vec::new();
        for j in 1..r {
            gens.push((Permutation::transposition(r, j, j + 1), Permutation::identity(s)));
        }
        for j in 1..s {
            gens.push((Permutation::identity(r), Permutation::transposition(s, j, j + 1)));
        }
        for (sigma, tau) in gens {
            let block = Permutation::block_compose(&sigma, i, &tau);
            let moved = TreeInsertion::new(r, s, sigma.apply(i)).unwrap();
            for a in p.degrees(r) {
                for b in p.degrees(s) {
                    for x in p.basis_vectors(r, a) {
                        let sx = p.act(&sigma, a, &x);
                        for y in p.basis_vectors(s, b) {
                            let ty = p.act(&tau, b, &y);
                            let lhs = p.compose(&moved, a, &sx, b, &ty);
                            let rhs = p.act(&block, a + b, &p.compose(t, a, &x, b, &y));
                            out.record(lhs == rhs, || {
                                format!("equivariance fails for {t}, σ={sigma:?}, τ={tau:?}, degrees ({a},{b})")
                            });
                        }
                    }
                }
            }
        }
        out
    })
}

/// The grading automorphism `α_r(x) = r^|x| x`, as diagonal matrices per arity and degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradingAutomorphism {
    pub scalar: Rational,
    pub maps: BTreeMap<(usize, usize), LinearMap>,
}

pub fn grading_automorphism(r: &Rational, p: &OperadPresentation) -> Result<GradingAutomorphism> {
    if r.is_zero() {
        return Err(Error::ZeroScalar);
    }
    let mut maps = BTreeMap::new();
    for a in &p.arities {
        for c in &a.components {
            let f = r.pow(c.degree as i32);
            maps.insert((a.n, c.degree), LinearMap::identity(c.dim, space_tag(a.n, c.degree)).scale(&f));
        }
    }
    Ok(GradingAutomorphism { scalar: r.clone(), maps })
}

impl GradingAutomorphism {
    /// `self ∘ other`
    pub fn then(&self, other: &GradingAutomorphism) -> Result<GradingAutomorphism> {
        let mut maps = BTreeMap::new();
        for (key, m) in &self.maps {
            let o = other.maps.get(key).ok_or(Error::DimensionMismatch { expected: 1, found: 0 })?;
            maps.insert(*key, m.compose(o)?);
        }
        Ok(GradingAutomorphism { scalar: &self.scalar * &other.scalar, maps })
    }

    pub fn apply(&self, n: usize, k: usize, v: &SparseVec) -> SparseVec {
        self.maps[&(n, k)].apply(v).expect("dims")
    }
}

/// `α_r ∘ α_s = α_{rs}` and `α_r(x ∘_i y) = α_r(x) ∘_i α_r(y)` as matrix identities.
pub fn check_grading_action(p: &OperadPresentation, scalars: &[Rational], bound: usize) -> Result<Report> {
    let mut report = Report::new(format!("grading automorphisms of {} up to arity {bound}", p.name));
    let mut product = CheckOutcome::new("α_r ∘ α_s = α_rs");
    let mut commute = CheckOutcome::new("α_r commutes with compositions");
    for r in scalars {
        let ar = grading_automorphism(r, p)?;
        for s in scalars {
            let as_ = grading_automorphism(s, p)?;
            let prod = grading_automorphism(&(r * s), p)?;
            product.record(ar.then(&as_)? == prod, || format!("α_{r} ∘ α_{s} != α_{}", r * s));
        }
        for (key, m) in p.compositions.iter().filter(|(k, _)| k.tree.n() <= bound) {
            let (t, a, b) = (key.tree, key.deg_x, key.deg_y);
            let da = &ar.maps[&(t.r(), a)];
            let db = &ar.maps[&(t.s(), b)];
            let dab = &ar.maps[&(t.n(), a + b)];
            let lhs = dab.compose(m).unwrap();
            let both = da.kron(db);
            let rhs = m.compose(&both).unwrap();
            commute.record(lhs.to_dense() == rhs.to_dense(), || format!("α_{r} fails to commute with {t} degrees ({a},{b})"));
        }
    }
    report.push(product);
    report.push(commute);
    Ok(report)
}

/// Sign convention for the generalized Jacobi relations: inputs are treated
/// as symbols of parity `input_parity` when `x_a, x_b` are extracted to the front.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JacobiConvention {
    pub input_parity: usize,
    pub rhs_sign: i64,
}

/// The convention under which the relations are certified.
pub const JACOBI_CONVENTION: JacobiConvention = JacobiConvention { input_parity: 0, rhs_sign: 1 };

fn generator(p: &OperadPresentation, m: usize) -> Result<SparseVec> {
    if p.dim(m, 1) != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: p.dim(m, 1) });
    }
    Ok(SparseVec::unit(1, 0))
}

/// `Σ_{a<b} ε(a,b) {{x_a,x_b}, x_1..^a..^b..x_k, y_1..y_l} - ({{x_1..x_k}, y_1..y_l} or 0)`
/// as a vector in degree 2 of arity `k + l`.
pub fn getzler_defect(p: &OperadPresentation, k: usize, l: usize, conv: JacobiConvention) -> Result<SparseVec> {
    let total = k + l;
    if k < 2 || total < 3 {
        return Err(Error::OutOfRange { what: "k + l", value: total, min: 3, max: p.max_arity });
    }
    if total > p.max_arity {
        return Err(Error::OutOfRange { what: "k + l", value: total, min: 3, max: p.max_arity });
    }
    let outer = generator(p, total - 1)?;
    let bracket = generator(p, 2)?;
    let unit = p.unit().ok_or(Error::DimensionMismatch { expected: 1, found: 0 })?;
    let mut args = vec![(2usize, 1usize, bracket.clone())];
    args.extend((0..total - 2).map(|_| (1usize, 0usize, unit.clone())));
    let (_, deg, base) = p.brace((total - 1, 1, &outer), &args)?;
    debug_assert_eq!(deg, 2);
    let mut acc = SparseVec::zero(p.dim(total, 2));
    for a in 1..=k {
        for b in a + 1..=k {
            let rest = (1..=total).filter(|&c| c != a && c != b);
            let images: Vec<usize> = [a, b].into_iter().chain(rest).collect();
            let pi = Permutation::from_images(&images)?;
            let eps = Rational::sign(conv.input_parity * (a - 1 + b - 2));
            acc = acc.axpy(&eps, &p.act(&pi, 2, &base));
        }
    }
    if l > 0 {
        let inner = generator(p, k)?;
        let outer = generator(p, l + 1)?;
        let mut args = vec![(k, 1usize, inner)];
        args.extend((0..l).map(|_| (1usize, 0usize, unit.clone())));
        let (_, _, rhs) = p.brace((l + 1, 1, &outer), &args)?;
        acc = acc.axpy(&Rational::from(-conv.rhs_sign), &rhs);
    }
    Ok(acc)
}

/// Checks the generalized Jacobi relation for `(k, l)` under [`JACOBI_CONVENTION`],
/// and records which conventions of the candidate set hold.
pub fn check_getzler_relations(p: &OperadPresentation, k: usize, l: usize) -> Result<Report> {
    let mut report = Report::new(format!("generalized Jacobi relation k={k} l={l} in {}", p.name));
    let mut main = CheckOutcome::new(format!("k={k} l={l} (input parity {}, rhs sign {})", JACOBI_CONVENTION.input_parity, JACOBI_CONVENTION.rhs_sign));
    let defect = getzler_defect(p, k, l, JACOBI_CONVENTION)?;
    main.record(defect.is_zero(), || format!("nonzero defect {:?}", defect.to_dense()));
    report.push(main);
    if !report.passed() {
        let mut holding = Vec::new();
        for input_parity in 0..2 {
            for rhs_sign in [1, -1] {
                let conv = JacobiConvention { input_parity, rhs_sign };
                if getzler_defect(p, k, l, conv)?.is_zero() {
                    holding.push(format!("{conv:?}"));
                }
            }
        }
        let mut alt = CheckOutcome::new(format!("conventions that hold: [{}]", holding.join(", ")));
        alt.cases = 1;
        report.push(alt);
    }
    Ok(report)
}

/// The operad with a single degree-0 operation in every arity.
pub struct TrivialOperad;

impl OperadModel for TrivialOperad {
    fn name(&self) -> String {
        "trivial".into()
    }

    fn component(&self, n: usize) -> Result<Vec<(usize, Vec<String>)>> {
        Ok(vec![(0, vec![format!("μ{n}")])])
    }

    fn composition(&self, key: &CompositionKey) -> Result<LinearMap> {
        let t = key.tree;
        LinearMap::new(1, 1, [(0, 0, Rational::one())], pair_tag(t.r(), 0, t.s(), 0), space_tag(t.n(), 0))
    }

    fn transposition(&self, n: usize, _j: usize, degree: usize) -> Result<LinearMap> {
        Ok(LinearMap::identity(1, space_tag(n, degree)))
    }
}

pub(crate) fn composition_tags(key: &CompositionKey) -> (BasisTag, BasisTag) {
    let t = key.tree;
    (pair_tag(t.r(), key.deg_x, t.s(), key.deg_y), space_tag(t.n(), key.deg_x + key.deg_y))
}

pub(crate) fn arity_tag(n: usize, k: usize) -> BasisTag {
    space_tag(n, k)
}
