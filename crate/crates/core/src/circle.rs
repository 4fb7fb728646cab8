//! The circle-action operator, realized on cohomology as the degree -1
//! derivation `Δ*` with `Δ*(w(a,b)) = 1`, and the model of the cohomology of
//! `M_{0,n+1}` as `ker Δ*` inside the Arnold algebra.

use std::collections::HashMap;
use std::sync::Arc;

use once_cell::sync::Lazy;
use parking_lot::Mutex;
use serde::{Deserialize, Serialize};

use crate::arnold::{basis, ArnoldElement, ArnoldMonomial};
use crate::error::{Error, Result};
use crate::linalg::{kernel_basis, BasisTag, LinearMap, Rational, SpanSolver, SparseVec};

/// `Σ_l (-1)^(l-1)` (monomial with its l-th generator deleted).
pub fn delta_contract(x: &ArnoldElement) -> ArnoldElement {
    if x.degree() == 0 {
        return ArnoldElement::zero(x.n(), 0);
    }
    let mut terms: Vec<(ArnoldMonomial, Rational)> = Vec::new();
    for (m, c) in x.terms() {
        for l in 0..m.degree() {
            let coeff = if l % 2 == 0 { c.clone() } else { -c };
            terms.push((m.without(l), coeff));
        }
    }
    ArnoldElement::from_terms(x.n(), x.degree() - 1, terms)
}

/// Matrix of `Δ*: H^k -> H^{k-1}` in the admissible bases (zero map for `k = 0`).
pub fn delta_matrix(n: usize, k: usize) -> LinearMap {
    let src = basis(n, k);
    if k == 0 {
        return LinearMap::zero(0, src.len(), src.tag(), BasisTag::new(format!("arnold({n},-1)")));
    }
    let dst = basis(n, k - 1);
    let mut entries = Vec::new();
    for (col, m) in src.monomials().iter().enumerate() {
        for l in 0..m.degree() {
            let row = dst.index_of(&m.without(l)).expect("deletion keeps admissibility");
            entries.push((row, col, Rational::sign(l)));
        }
    }
    LinearMap::new(dst.len(), src.len(), entries, src.tag(), dst.tag()).unwrap()
}

/// Weight of the degree-`k` part of the gravity operad.
pub fn weight(k: i64) -> i64 {
    -2 * k
}

/// A `Δ*`-closed class, i.e. a class of `H^k(M_{0,n+1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuliClass {
    underlying: ArnoldElement,
}

impl ModuliClass {
    pub fn new(x: ArnoldElement) -> Result<Self> {
        if !delta_contract(&x).is_zero() {
            return Err(Error::NotDeltaClosed);
        }
        Ok(ModuliClass { underlying: x })
    }

    pub fn underlying(&self) -> &ArnoldElement {
        &self.underlying
    }

    pub fn n(&self) -> usize {
        self.underlying.n()
    }

    pub fn k(&self) -> usize {
        self.underlying.degree()
    }

    /// Weight of the corresponding homology class, which sits in gravity degree `k + 1`.
    pub fn weight(&self) -> i64 {
        weight(self.k() as i64 + 1)
    }
}

#[derive(Serialize)]
struct ModuliClassDoc<'a> {
    n: usize,
    k: usize,
    weight: i64,
    element: &'a ArnoldElement,
}

impl Serialize for ModuliClass {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ModuliClassDoc { n: self.n(), k: self.k(), weight: self.weight(), element: &self.underlying }
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ModuliClass {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Doc {
            element: ArnoldElement,
        }
        let doc = Doc::deserialize(deserializer)?;
        ModuliClass::new(doc.element).map_err(serde::de::Error::custom)
    }
}

/// Echelonized basis of `ker(Δ*: H^k(Conf_n) -> H^{k-1}(Conf_n))` with a coordinate solver.
#[derive(Debug)]
pub struct ModuliSpace {
    n: usize,
    k: usize,
    classes: Vec<ModuliClass>,
    vectors: Vec<SparseVec>,
    solver: SpanSolver,
}

impl ModuliSpace {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn classes(&self) -> &[ModuliClass] {
        &self.classes
    }

    /// Basis vectors as coordinates over `basis(n, k)`.
    pub fn vectors(&self) -> &[SparseVec] {
        &self.vectors
    }

    pub fn tag(&self) -> BasisTag {
        BasisTag::new(format!("moduli({},{})", self.n, self.k))
    }

    /// Coordinates of a `Δ*`-closed vector (over `basis(n,k)`) in this basis.
    pub fn coordinates(&self, v: &SparseVec) -> Result<Vec<Rational>> {
        self.solver.solve(v).map_err(|e| match e {
            Error::NotInSpan { .. } => Error::NotDeltaClosed,
            other => other,
        })
    }

    pub fn coordinates_of(&self, x: &ArnoldElement) -> Result<Vec<Rational>> {
        if x.n() != self.n {
            return Err(Error::AmbientMismatch { left: x.n(), right: self.n });
        }
        if x.is_zero() {
            return Ok(vec![Rational::zero(); self.len()]);
        }
        if x.degree() != self.k {
            return Err(Error::NotHomogeneous { first: self.k, second: x.degree() });
        }
        self.coordinates(&x.to_vector())
    }
}

static MODULI: Lazy<Mutex<HashMap<(usize, usize), Arc<ModuliSpace>>>> = Lazy::new(Default::default);

/// Basis of `H^k(M_{0,n+1})` realized as `ker Δ*`, for `n >= 2`.
pub fn moduli_basis(n: usize, k: usize) -> Result<Arc<ModuliSpace>> {
    if n < 2 {
        return Err(Error::OutOfRange { what: "n", value: n, min: 2, max: usize::MAX });
    }
    if let Some(hit) = MODULI.lock().get(&(n, k)) {
        return Ok(hit.clone());
    }
    let dim = basis(n, k).len();
    let vectors = kernel_basis(&delta_matrix(n, k));
    let classes = vectors
        .iter()
        .map(|v| ModuliClass { underlying: ArnoldElement::from_vector(n, k, v) })
        .collect();
    let solver = SpanSolver::new(dim, &vectors)?;
    let space = Arc::new(ModuliSpace { n, k, classes, vectors, solver });
    Ok(MODULI.lock().entry((n, k)).or_insert(space).clone())
}
