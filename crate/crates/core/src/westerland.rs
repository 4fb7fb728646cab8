//! Gravity as `ker Δ` inside the homology of the little disks, with the
//! composition inherited from the little disks.
//!
//! Homology `H_k(Conf_n)` is the dual of `basis(n, k)`. A degree-`k` gravity
//! element in arity `n >= 2` carries coordinates `c` over the dual of
//! `moduli_basis(n, k-1)`; it is identified with the homology class
//! `h(β) = Σ_j c_j · (μ_j-coordinate of Δ*β)`. The image of this transfer
//! embedding is exactly `ker Δ` in degree `k`. Arity 1 is the unit line in degree 0.

use std::collections::HashMap;
use std::sync::Arc;

use once_cell::sync::Lazy;
use parking_lot::Mutex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arnold::{action_matrix, basis, cocompose_matrix};
use crate::circle::{delta_matrix, moduli_basis, weight};
use crate::combinatorics::{Permutation, TreeInsertion};
use crate::error::{Error, Result};
use crate::linalg::{kernel_basis, BasisTag, LinearMap, Rational, SpanSolver, SparseVec};
use crate::operad::{
    arity_tag, composition_tags, CheckOutcome, CompositionKey, GradedComponent, OperadModel, OperadPresentation,
    Report,
};

/// Degrees carried by gravity in arity `n`.
pub fn grav_degrees(n: usize) -> std::ops::RangeInclusive<usize> {
    if n <= 1 {
        0..=0
    } else {
        1..=n - 1
    }
}

pub(crate) fn check_degree(n: usize, k: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::OutOfRange { what: "n", value: n, min: 1, max: usize::MAX });
    }
    let d = grav_degrees(n);
    if !d.contains(&k) {
        return Err(Error::OutOfRange { what: "degree", value: k, min: *d.start(), max: *d.end() });
    }
    Ok(())
}

/// Basis labels shared by both gravity models: the dual of each moduli class.
pub fn grav_labels(n: usize, k: usize) -> Result<Vec<String>> {
    check_degree(n, k)?;
    if n == 1 {
        return Ok(vec!["1".into()]);
    }
    Ok(moduli_basis(n, k - 1)?.classes().iter().map(|c| format!("δ[{}]", c.underlying())).collect())
}

/// The canonical basis of `Grav(n)`, graded.
pub fn grav_w_space(n: usize) -> Result<Vec<GradedComponent>> {
    grav_degrees(n)
        .map(|k| {
            let labels = grav_labels(n, k)?;
            Ok(GradedComponent { degree: k, dim: labels.len(), weight: weight(k as i64), labels })
        })
        .filter(|c| !matches!(c, Ok(c) if c.dim == 0))
        .collect()
}

/// The transfer embedding `Grav(n)_k -> H_k(Conf_n)` and its inverse on the image.
#[derive(Debug)]
pub struct Transfer {
    embedding: LinearMap,
    solver: SpanSolver,
}

impl Transfer {
    /// Columns are homology classes over the dual of `basis(n, k)`.
    pub fn embedding(&self) -> &LinearMap {
        &self.embedding
    }

    /// Gravity coordinates of a homology class; `NotInSpan` outside `ker Δ`.
    pub fn solve(&self, h: &SparseVec) -> Result<Vec<Rational>> {
        self.solver.solve(h)
    }
}

static TRANSFERS: Lazy<Mutex<HashMap<(usize, usize), Arc<Transfer>>>> = Lazy::new(Default::default);

pub fn transfer(n: usize, k: usize) -> Result<Arc<Transfer>> {
    check_degree(n, k)?;
    if let Some(hit) = TRANSFERS.lock().get(&(n, k)) {
        return Ok(hit.clone());
    }
    let source = BasisTag::new(format!("gravW({n})_{k}"));
    let embedding = if n == 1 {
        LinearMap::identity(1, basis(1, 0).tag()).with_tags(source, basis(1, 0).tag())
    } else {
        let moduli = moduli_basis(n, k - 1)?;
        let delta = delta_matrix(n, k);
        let b = basis(n, k);
        let mut entries = Vec::new();
        for beta in 0..b.len() {
            for (j, c) in moduli.coordinates(&delta.column(beta))?.into_iter().enumerate() {
                if !c.is_zero() {
                    entries.push((beta, j, c));
                }
            }
        }
        LinearMap::new(b.len(), moduli.len(), entries, source, b.tag())?
    };
    let columns: Vec<SparseVec> = (0..embedding.cols()).map(|j| embedding.column(j)).collect();
    let solver = SpanSolver::new(embedding.rows(), &columns)?;
    let t = Arc::new(Transfer { embedding, solver });
    Ok(TRANSFERS.lock().entry((n, k)).or_insert(t).clone())
}

/// An element of `Grav^W(n)` of homogeneous degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GravityElementW {
    n: usize,
    degree: usize,
    coords: SparseVec,
}

impl GravityElementW {
    pub fn new(n: usize, degree: usize, coords: SparseVec) -> Result<Self> {
        let dim = transfer(n, degree)?.embedding.cols();
        if coords.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: coords.dim() });
        }
        Ok(GravityElementW { n, degree, coords })
    }

    pub fn basis_element(n: usize, degree: usize, idx: usize) -> Result<Self> {
        let dim = transfer(n, degree)?.embedding.cols();
        if idx >= dim {
            return Err(Error::OutOfRange { what: "basis index", value: idx, min: 0, max: dim.saturating_sub(1) });
        }
        Ok(GravityElementW { n, degree, coords: SparseVec::unit(dim, idx) })
    }

    pub fn unit() -> Self {
        GravityElementW { n: 1, degree: 0, coords: SparseVec::unit(1, 0) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coords(&self) -> &SparseVec {
        &self.coords
    }

    /// The homology class, over the dual of `basis(n, degree)`.
    pub fn to_homology(&self) -> SparseVec {
        transfer(self.n, self.degree).unwrap().embedding.apply(&self.coords).unwrap()
    }

    pub fn from_homology(n: usize, degree: usize, h: &SparseVec) -> Result<Self> {
        let coords = transfer(n, degree)?.solve(h)?;
        Ok(GravityElementW { n, degree, coords: SparseVec::from_dense(&coords) })
    }
}

/// Homology composition `H_p(Conf_r) ⊗ H_q(Conf_s) -> H_{p+q}(Conf_n)` of basis duals:
/// the transpose of the cocomposition matrix.
pub fn homology_composition(t: &TreeInsertion, p: usize, q: usize) -> LinearMap {
    cocompose_matrix(t, p, q).transpose()
}

static COMPOSITIONS: Lazy<Mutex<HashMap<CompositionKey, Arc<LinearMap>>>> = Lazy::new(Default::default);

/// Structure constants of `∘_i` on `Grav^W`, in the canonical bases.
pub fn grav_w_composition_matrix(t: &TreeInsertion, p: usize, q: usize) -> Result<Arc<LinearMap>> {
    check_degree(t.r(), p)?;
    check_degree(t.s(), q)?;
    let key = CompositionKey::new(*t, p, q);
    if let Some(hit) = COMPOSITIONS.lock().get(&key) {
        return Ok(hit.clone());
    }
    let (er, es, en) = (transfer(t.r(), p)?, transfer(t.s(), q)?, transfer(t.n(), p + q)?);
    let image = homology_composition(t, p, q).compose(&er.embedding.kron(&es.embedding))?;
    let mut entries = Vec::new();
    for col in 0..image.cols() {
        let coords = en.solve(&image.column(col))?;
        entries.extend(coords.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(row, c)| (row, col, c)));
    }
    let (src, dst) = composition_tags(&key);
    let m = Arc::new(LinearMap::new(en.embedding.cols(), image.cols(), entries, src, dst)?);
    Ok(COMPOSITIONS.lock().entry(key).or_insert(m).clone())
}

pub fn grav_w_compose(t: &TreeInsertion, x: &GravityElementW, y: &GravityElementW) -> Result<GravityElementW> {
    if x.n != t.r() || y.n != t.s() {
        return Err(Error::AmbientMismatch { left: x.n, right: t.r() });
    }
    let m = grav_w_composition_matrix(t, x.degree, y.degree)?;
    let dy = y.coords.dim();
    let pairs = x
        .coords
        .entries()
        .iter()
        .flat_map(|(a, xa)| y.coords.entries().iter().map(move |(b, yb)| (a * dy + b, xa * yb)));
    let coords = m.apply(&SparseVec::from_pairs(m.cols(), pairs))?;
    Ok(GravityElementW { n: t.n(), degree: x.degree + y.degree, coords })
}

/// Basis of `ker(Δ: H_k(Conf_n) -> H_{k+1}(Conf_n))`, computed directly.
pub fn homology_kernel(n: usize, k: usize) -> Vec<SparseVec> {
    kernel_basis(&delta_matrix(n, k + 1).transpose())
}

/// Stability of `ker Δ` under `∘_i` of the little disks, exhaustive on basis pairs.
pub fn check_suboperad(r: usize, s: usize, i: usize) -> Result<Report> {
    let t = TreeInsertion::new(r, s, i)?;
    let mut out = CheckOutcome::new(format!("ker Δ stable under {t}"));
    for p in 0..r {
        let kr = homology_kernel(r, p);
        for q in 0..s {
            let ks = homology_kernel(s, q);
            if kr.is_empty() || ks.is_empty() {
                continue;
            }
            let comp = homology_composition(&t, p, q);
            let delta_t = delta_matrix(t.n(), p + q + 1).transpose();
            let ds = ks[0].dim();
            for (a, h1) in kr.iter().enumerate() {
                for (b, h2) in ks.iter().enumerate() {
                    let pairs = h1
                        .entries()
                        .iter()
                        .flat_map(|(u, x)| h2.entries().iter().map(move |(v, y)| (u * ds + v, x * y)));
                    let h = comp.apply(&SparseVec::from_pairs(comp.cols(), pairs))?;
                    let defect = delta_t.apply(&h)?;
                    out.record(defect.is_zero(), || {
                        format!("degrees ({p},{q}), kernel pair ({a},{b}): Δ of composite = {:?}", defect.to_dense())
                    });
                }
            }
        }
    }
    let mut report = Report::new(format!("suboperad stability {t}"));
    report.push(out);
    Ok(report)
}

/// Action of `s_j` on `Grav^W(n)_k`: the dual action on homology, pulled back through the transfer.
pub fn grav_w_transposition(n: usize, j: usize, k: usize) -> Result<LinearMap> {
    check_degree(n, k)?;
    if j == 0 || j >= n {
        return Err(Error::OutOfRange { what: "j", value: j, min: 1, max: n.saturating_sub(1) });
    }
    let e = transfer(n, k)?;
    let g = Permutation::transposition(n, j, j + 1);
    let image = action_matrix(&g, k).transpose().compose(&e.embedding)?;
    let mut entries = Vec::new();
    for col in 0..image.cols() {
        let coords = e.solve(&image.column(col))?;
        entries.extend(coords.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(row, c)| (row, col, c)));
    }
    let tag = arity_tag(n, k);
    LinearMap::new(image.cols(), image.cols(), entries, tag.clone(), tag)
}

pub struct WesterlandModel;

impl OperadModel for WesterlandModel {
    fn name(&self) -> String {
        "GravW".into()
    }

    fn component(&self, n: usize) -> Result<Vec<(usize, Vec<String>)>> {
        Ok(grav_w_space(n)?.into_iter().map(|c| (c.degree, c.labels)).collect())
    }

    fn composition(&self, key: &CompositionKey) -> Result<LinearMap> {
        Ok((*grav_w_composition_matrix(&key.tree, key.deg_x, key.deg_y)?).clone())
    }

    fn transposition(&self, n: usize, j: usize, degree: usize) -> Result<LinearMap> {
        grav_w_transposition(n, j, degree)
    }
}

pub fn grav_w_presentation(max_arity: usize) -> Result<OperadPresentation> {
    warm_up(max_arity);
    OperadPresentation::from_model(&WesterlandModel, max_arity)
}

/// Fills the shared caches in parallel, largest arities first.
pub(crate) fn warm_up(max_arity: usize) {
    let mut cells: Vec<(usize, usize)> =
        (2..=max_arity).flat_map(|n| grav_degrees(n).map(move |k| (n, k))).collect();
    cells.sort_by_key(|&(n, k)| std::cmp::Reverse(basis(n, k).len()));
    cells.par_iter().for_each(|&(n, k)| {
        let _ = transfer(n, k);
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims(n: usize) -> Vec<(usize, usize)> {
        grav_w_space(n).unwrap().iter().map(|c| (c.degree, c.dim)).collect()
    }

    #[test]
    fn space_dimensions() {
        assert_eq!(dims(1), vec![(0, 1)]);
        assert_eq!(dims(2), vec![(1, 1)]);
        assert_eq!(dims(3), vec![(1, 1), (2, 2)]);
        assert_eq!(dims(4), vec![(1, 1), (2, 5), (3, 6)]);
        assert!(grav_w_space(0).is_err());
    }

    #[test]
    fn transfer_image_is_kernel() {
        for n in 2..=5 {
            for k in grav_degrees(n) {
                let e = transfer(n, k).unwrap();
                let kernel = homology_kernel(n, k);
                assert_eq!(kernel.len(), e.embedding().cols(), "n={n} k={k}");
                for h in &kernel {
                    assert!(e.solve(h).is_ok());
                }
            }
        }
    }

    #[test]
    fn unit_insertions_are_identity() {
        let b = GravityElementW::basis_element(2, 1, 0).unwrap();
        let u = GravityElementW::unit();
        assert_eq!(grav_w_compose(&TreeInsertion::new(1, 2, 1).unwrap(), &u, &b).unwrap(), b);
        for i in 1..=2 {
            assert_eq!(grav_w_compose(&TreeInsertion::new(2, 1, i).unwrap(), &b, &u).unwrap(), b);
        }
        for k in 1..=3 {
            for idx in 0..transfer(4, k).unwrap().embedding().cols() {
                let x = GravityElementW::basis_element(4, k, idx).unwrap();
                assert_eq!(grav_w_compose(&TreeInsertion::new(1, 4, 1).unwrap(), &u, &x).unwrap(), x);
                assert_eq!(grav_w_compose(&TreeInsertion::new(4, 1, 3).unwrap(), &x, &u).unwrap(), x);
            }
        }
    }

    #[test]
    fn composition_adds_degrees() {
        let b = GravityElementW::basis_element(2, 1, 0).unwrap();
        let x = GravityElementW::basis_element(3, 2, 1).unwrap();
        let z = grav_w_compose(&TreeInsertion::new(3, 2, 2).unwrap(), &x, &b).unwrap();
        assert_eq!((z.n(), z.degree()), (4, 3));
        assert!(grav_w_compose(&TreeInsertion::new(3, 2, 2).unwrap(), &b, &x).is_err());
    }

    #[test]
    fn suboperad_small() {
        for (r, s, i) in [(2, 2, 1), (3, 2, 2), (1, 1, 1), (2, 3, 2)] {
            assert!(check_suboperad(r, s, i).unwrap().passed());
        }
    }

    #[test]
    fn from_homology_rejects_non_kernel() {
        let h = SparseVec::unit(basis(3, 1).len(), 0);
        assert!(matches!(GravityElementW::from_homology(3, 1, &h), Err(Error::NotInSpan { .. })));
    }
}
