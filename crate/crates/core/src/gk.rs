//! Gravity from residues along the boundary divisors of `M_{0,n+1}`.
//!
//! The residue along the divisor of `t(r,s,i)` sends a monomial to
//! `Σ_l (-1)^(l-1) [factor l lies inside the block] · cocompose(remaining factors)`.
//! Composition on `Grav(n)_k`, the dual of `H^{k-1}(M_{0,n+1})`, is the dual of the
//! residue with the sign `(-1)^(deg x - 1)` from the suspension.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use once_cell::sync::Lazy;
use parking_lot::Mutex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arnold::{
    action_matrix, basis, cocompose_matrix, cocompose_word, ArnoldElement, ArnoldTensor, OmegaGenerator,
};
use crate::circle::{delta_contract, moduli_basis, ModuliClass, ModuliSpace};
use crate::combinatorics::{Permutation, TreeInsertion};
use crate::error::{Error, Result};
use crate::linalg::{BasisTag, LinearMap, Rational, SparseVec};
use crate::operad::{arity_tag, composition_tags, CompositionKey, OperadModel, OperadPresentation};
use crate::westerland::{check_degree, grav_degrees, grav_labels, grav_w_composition_matrix, grav_w_transposition, warm_up};

/// Matrix of `ι_B: basis(n, m) -> basis(n, m-1)`, deleting the factors inside the block.
pub fn iota_matrix(t: &TreeInsertion, m: usize) -> LinearMap {
    let n = t.n();
    let src = basis(n, m);
    if m == 0 {
        return LinearMap::zero(0, src.len(), src.tag(), BasisTag::new(format!("arnold({n},-1)")));
    }
    let dst = basis(n, m - 1);
    let mut entries = Vec::new();
    for (col, mono) in src.monomials().iter().enumerate() {
        for (l, g) in mono.generators().iter().enumerate() {
            if t.in_block(g.a()) && t.in_block(g.b()) {
                entries.push((dst.index_of(&mono.without(l)).unwrap(), col, Rational::sign(l)));
            }
        }
    }
    LinearMap::new(dst.len(), src.len(), entries, src.tag(), dst.tag()).unwrap()
}

/// Residue of an arbitrary (not necessarily straightened) word of generators.
pub fn residue_of_word(t: &TreeInsertion, word: &[(usize, usize)], coeff: &Rational) -> Result<ArnoldTensor> {
    let gens = word
        .iter()
        .map(|&(a, b)| {
            if a.max(b) > t.n() {
                return Err(Error::LabelOutOfRange { label: a.max(b), n: t.n() });
            }
            OmegaGenerator::new(a, b)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = ArnoldTensor::zero(t.r(), t.s(), gens.len().saturating_sub(1));
    for (l, g) in gens.iter().enumerate() {
        if t.in_block(g.a()) && t.in_block(g.b()) {
            let mut rest = gens.clone();
            rest.remove(l);
            let c = if l % 2 == 0 { coeff.clone() } else { -coeff };
            cocompose_word(t, &rest, &c, &mut out);
        }
    }
    Ok(out)
}

fn residue_unchecked(t: &TreeInsertion, x: &ArnoldElement) -> Result<ArnoldTensor> {
    if x.n() != t.n() {
        return Err(Error::AmbientMismatch { left: x.n(), right: t.n() });
    }
    let mut out = ArnoldTensor::zero(t.r(), t.s(), x.degree().saturating_sub(1));
    for (m, c) in x.terms() {
        let word: Vec<(usize, usize)> = m.generators().iter().map(|g| (g.a(), g.b())).collect();
        out.add_scaled(&residue_of_word(t, &word, c)?, &Rational::one());
    }
    Ok(out)
}

/// Residue of a `Δ*`-closed element; `NotDeltaClosed` otherwise.
pub fn residue(t: &TreeInsertion, x: &ArnoldElement) -> Result<ArnoldTensor> {
    if !delta_contract(x).is_zero() {
        return Err(Error::NotDeltaClosed);
    }
    residue_unchecked(t, x)
}

pub fn residue_class(t: &TreeInsertion, x: &ModuliClass) -> Result<ArnoldTensor> {
    residue_unchecked(t, x.underlying())
}

/// The residue of `t` on `H^k(M_{0,n+1})` in moduli coordinates, split by the
/// degree `p` of the left factor: `blocks[p]` maps to `moduli(r,p) ⊗ moduli(s,k-1-p)`.
#[derive(Clone, Debug)]
pub struct ResidueMap {
    pub tree: TreeInsertion,
    pub k: usize,
    pub blocks: BTreeMap<usize, LinearMap>,
}

/// Coordinates of a tensor (row index `a * |right| + b`) in `left ⊗ right` moduli bases.
fn kunneth_coordinates(v: &SparseVec, left: &ModuliSpace, right: &ModuliSpace) -> Result<Vec<(usize, Rational)>> {
    let (bl, br) = (basis(left.n(), left.k()).len(), basis(right.n(), right.k()).len());
    let mut rows: BTreeMap<usize, Vec<(usize, Rational)>> = BTreeMap::new();
    for (idx, c) in v.entries() {
        rows.entry(idx / br).or_default().push((idx % br, c.clone()));
    }
    let mut cols: BTreeMap<usize, Vec<(usize, Rational)>> = BTreeMap::new();
    for (a, row) in rows {
        for (b, c) in right.coordinates(&SparseVec::from_pairs(br, row))?.into_iter().enumerate() {
            if !c.is_zero() {
                cols.entry(b).or_default().push((a, c));
            }
        }
    }
    let mut out = Vec::new();
    for (b, col) in cols {
        for (a, c) in left.coordinates(&SparseVec::from_pairs(bl, col))?.into_iter().enumerate() {
            if !c.is_zero() {
                out.push((a * right.len() + b, c));
            }
        }
    }
    Ok(out)
}

static RESIDUES: Lazy<Mutex<HashMap<(TreeInsertion, usize), Arc<ResidueMap>>>> = Lazy::new(Default::default);

pub fn residue_map(t: &TreeInsertion, k: usize) -> Result<Arc<ResidueMap>> {
    if t.r() < 2 || t.s() < 2 {
        return Err(Error::OutOfRange { what: "arity of a residue factor", value: t.r().min(t.s()), min: 2, max: usize::MAX });
    }
    if let Some(hit) = RESIDUES.lock().get(&(*t, k)) {
        return Ok(hit.clone());
    }
    let source = moduli_basis(t.n(), k)?;
    let iota = iota_matrix(t, k);
    let mut blocks = BTreeMap::new();
    if k >= 1 {
        let images: Vec<SparseVec> = source.vectors().iter().map(|v| iota.apply(v)).collect::<Result<_>>()?;
        for p in 0..k {
            let q = k - 1 - p;
            if p > t.r() - 2 || q > t.s() - 2 {
                continue;
            }
            let (left, right) = (moduli_basis(t.r(), p)?, moduli_basis(t.s(), q)?);
            let c = cocompose_matrix(t, p, q);
            let mut entries = Vec::new();
            for (col, w) in images.iter().enumerate() {
                for (row, v) in kunneth_coordinates(&c.apply(w)?, &left, &right)? {
                    entries.push((row, col, v));
                }
            }
            let target = BasisTag::new(format!("{}⊗{}", left.tag().0, right.tag().0));
            blocks.insert(p, LinearMap::new(left.len() * right.len(), source.len(), entries, source.tag(), target)?);
        }
    }
    let m = Arc::new(ResidueMap { tree: *t, k, blocks });
    Ok(RESIDUES.lock().entry((*t, k)).or_insert(m).clone())
}

/// An element of `Grav^GK(n)`: coordinates over the dual of `moduli_basis(n, degree-1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GravityElementGK {
    n: usize,
    degree: usize,
    coords: SparseVec,
}

pub fn grav_gk_dim(n: usize, k: usize) -> Result<usize> {
    check_degree(n, k)?;
    Ok(if n == 1 { 1 } else { moduli_basis(n, k - 1)?.len() })
}

impl GravityElementGK {
    pub fn new(n: usize, degree: usize, coords: SparseVec) -> Result<Self> {
        let dim = grav_gk_dim(n, degree)?;
        if coords.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: coords.dim() });
        }
        Ok(GravityElementGK { n, degree, coords })
    }

    pub fn basis_element(n: usize, degree: usize, idx: usize) -> Result<Self> {
        let dim = grav_gk_dim(n, degree)?;
        if idx >= dim {
            return Err(Error::OutOfRange { what: "basis index", value: idx, min: 0, max: dim.saturating_sub(1) });
        }
        Ok(GravityElementGK { n, degree, coords: SparseVec::unit(dim, idx) })
    }

    pub fn unit() -> Self {
        GravityElementGK { n: 1, degree: 0, coords: SparseVec::unit(1, 0) }
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

    /// Pairing with a `Δ*`-closed class of degree `degree - 1`.
    pub fn pair(&self, mu: &ModuliClass) -> Result<Rational> {
        let space = moduli_basis(self.n, self.degree.wrapping_sub(1))?;
        let c = space.coordinates_of(mu.underlying())?;
        Ok(self.coords.entries().iter().map(|(j, x)| x * &c[*j]).sum())
    }
}

/// Structure constants of `∘_i` on `Grav^GK` in the canonical bases.
pub fn grav_gk_composition_matrix(t: &TreeInsertion, p: usize, q: usize) -> Result<LinearMap> {
    check_degree(t.r(), p)?;
    check_degree(t.s(), q)?;
    let key = CompositionKey::new(*t, p, q);
    let (src, dst) = composition_tags(&key);
    if t.r() == 1 {
        return Ok(LinearMap::identity(grav_gk_dim(t.s(), q)?, src.clone()).with_tags(src, dst));
    }
    if t.s() == 1 {
        return Ok(LinearMap::identity(grav_gk_dim(t.r(), p)?, src.clone()).with_tags(src, dst));
    }
    let res = residue_map(t, p + q - 1)?;
    let block = &res.blocks[&(p - 1)];
    Ok(block.transpose().scale(&Rational::sign(p - 1)).with_tags(src, dst))
}

pub fn grav_gk_compose(t: &TreeInsertion, x: &GravityElementGK, y: &GravityElementGK) -> Result<GravityElementGK> {
    if x.n != t.r() || y.n != t.s() {
        return Err(Error::AmbientMismatch { left: x.n, right: t.r() });
    }
    let m = grav_gk_composition_matrix(t, x.degree, y.degree)?;
    let dy = y.coords.dim();
    let pairs = x
        .coords
        .entries()
        .iter()
        .flat_map(|(a, xa)| y.coords.entries().iter().map(move |(b, yb)| (a * dy + b, xa * yb)));
    let coords = m.apply(&SparseVec::from_pairs(m.cols(), pairs))?;
    Ok(GravityElementGK { n: t.n(), degree: x.degree + y.degree, coords })
}

/// Action of `s_j` on `Grav^GK(n)_k`: the transpose of its action on moduli classes.
pub fn grav_gk_transposition(n: usize, j: usize, k: usize) -> Result<LinearMap> {
    check_degree(n, k)?;
    if j == 0 || j >= n {
        return Err(Error::OutOfRange { what: "j", value: j, min: 1, max: n.saturating_sub(1) });
    }
    let space = moduli_basis(n, k - 1)?;
    let act = action_matrix(&Permutation::transposition(n, j, j + 1), k - 1);
    let mut entries = Vec::new();
    for (col, v) in space.vectors().iter().enumerate() {
        for (row, c) in space.coordinates(&act.apply(v)?)?.into_iter().enumerate() {
            if !c.is_zero() {
                // transpose: (row, col) of the cohomology action becomes (col, row)
                entries.push((col, row, c));
            }
        }
    }
    let tag = arity_tag(n, k);
    LinearMap::new(space.len(), space.len(), entries, tag.clone(), tag)
}

pub struct GkModel;

impl OperadModel for GkModel {
    fn name(&self) -> String {
        "GravGK".into()
    }

    fn component(&self, n: usize) -> Result<Vec<(usize, Vec<String>)>> {
        grav_degrees(n)
            .map(|k| Ok((k, grav_labels(n, k)?)))
            .filter(|c| !matches!(c, Ok((_, l)) if l.is_empty()))
            .collect()
    }

    fn composition(&self, key: &CompositionKey) -> Result<LinearMap> {
        grav_gk_composition_matrix(&key.tree, key.deg_x, key.deg_y)
    }

    fn transposition(&self, n: usize, j: usize, degree: usize) -> Result<LinearMap> {
        grav_gk_transposition(n, j, degree)
    }
}

pub fn grav_gk_presentation(max_arity: usize) -> Result<OperadPresentation> {
    OperadPresentation::from_model(&GkModel, max_arity)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Mismatch,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonEntry {
    pub tree: TreeInsertion,
    pub deg_x: usize,
    pub deg_y: usize,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub max_arity: usize,
    pub cells_compared: usize,
    pub actions_compared: usize,
    /// Mismatching cells only, sorted by tree and degrees.
    pub entries: Vec<ComparisonEntry>,
    pub action_mismatches: Vec<String>,
}

impl ComparisonReport {
    pub fn passed(&self) -> bool {
        self.entries.is_empty() && self.action_mismatches.is_empty()
    }
}

fn classify(w: &LinearMap, gk: &LinearMap) -> Option<String> {
    let (dw, dg) = (w.to_dense(), gk.to_dense());
    if dw == dg {
        return None;
    }
    if dw.len() != dg.len() || dw.first().map(Vec::len) != dg.first().map(Vec::len) {
        return Some(format!("structural mismatch: shapes {}x{} vs {}x{}", w.rows(), w.cols(), gk.rows(), gk.cols()));
    }
    let negated = gk.scale(&Rational::from(-1)).to_dense();
    let (row, col) = dw
        .iter()
        .enumerate()
        .flat_map(|(r, row)| row.iter().enumerate().map(move |(c, v)| (r, c, v)))
        .find(|(r, c, v)| **v != dg[*r][*c])
        .map(|(r, c, _)| (r, c))
        .unwrap();
    let first = format!("entry ({row},{col}): W = {}, GK = {}", dw[row][col], dg[row][col]);
    if dw == negated {
        Some(format!("uniform-sign discrepancy: W = -GK; {first}"))
    } else {
        Some(format!("structural mismatch: {first}"))
    }
}

/// Compares the structure constants and symmetric-group actions of both models
/// for all trees with `r + s - 1 <= max_arity`.
pub fn compare_operads(max_arity: usize) -> Result<ComparisonReport> {
    warm_up(max_arity);
    let mut keys = Vec::new();
    for t in TreeInsertion::all_up_to(max_arity, true) {
        for p in grav_degrees(t.r()) {
            for q in grav_degrees(t.s()) {
                if grav_gk_dim(t.r(), p)? > 0 && grav_gk_dim(t.s(), q)? > 0 {
                    keys.push(CompositionKey::new(t, p, q));
                }
            }
        }
    }
    let results = keys
        .par_iter()
        .map(|key| {
            let w = grav_w_composition_matrix(&key.tree, key.deg_x, key.deg_y)?;
            let gk = grav_gk_composition_matrix(&key.tree, key.deg_x, key.deg_y)?;
            Ok(classify(&w, &gk).map(|detail| ComparisonEntry {
                tree: key.tree,
                deg_x: key.deg_x,
                deg_y: key.deg_y,
                status: Status::Mismatch,
                detail,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut cells = Vec::new();
    for n in 2..=max_arity {
        for j in 1..n {
            for k in grav_degrees(n) {
                cells.push((n, j, k));
            }
        }
    }
    let actions = cells
        .par_iter()
        .map(|&(n, j, k)| {
            let w = grav_w_transposition(n, j, k)?;
            let gk = grav_gk_transposition(n, j, k)?;
            Ok((w.to_dense() != gk.to_dense()).then(|| format!("s_{j} on arity {n} degree {k} differs")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ComparisonReport {
        max_arity,
        cells_compared: keys.len(),
        actions_compared: cells.len(),
        entries: results.into_iter().flatten().collect(),
        action_mismatches: actions.into_iter().flatten().collect(),
    })
}
