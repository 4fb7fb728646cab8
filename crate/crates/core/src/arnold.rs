//! The cohomology ring of the configuration space of `n` points in the plane,
//! presented by degree-1 generators `w(a,b)` subject to graded commutativity
//! and the Arnold relation.
//!
//! Basis: monomials `w(a1,b1)...w(ak,bk)` with `b1 < ... < bk` and `al < bl`.
//! Any word is rewritten into this basis by sorting generators by their
//! larger label and, when two generators share it, applying
//! `w(a,b)w(c,b) = w(a,c)w(c,b) - w(a,c)w(a,b)` for `a < c < b`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use once_cell::sync::Lazy;
use parking_lot::Mutex;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{Permutation, TreeInsertion};
use crate::error::{Error, Result};
use crate::linalg::{BasisTag, LinearMap, Rational, SparseVec};

/// `w(a,b) = w(b,a)`, stored with `a < b`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct OmegaGenerator {
    a: u8,
    b: u8,
}

impl OmegaGenerator {
    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a == b || a == 0 || b == 0 || a > u8::MAX as usize || b > u8::MAX as usize {
            return Err(Error::InvalidGenerator { a, b });
        }
        Ok(OmegaGenerator::normalized(a, b))
    }

    fn normalized(a: usize, b: usize) -> Self {
        debug_assert!(a != b);
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        OmegaGenerator { a: a as u8, b: b as u8 }
    }

    pub fn a(&self) -> usize {
        self.a as usize
    }

    pub fn b(&self) -> usize {
        self.b as usize
    }
}

impl fmt::Display for OmegaGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w({},{})", self.a, self.b)
    }
}

/// An admissible monomial. The empty monomial is the unit.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArnoldMonomial(Vec<OmegaGenerator>);

impl ArnoldMonomial {
    pub fn one() -> Self {
        ArnoldMonomial(Vec::new())
    }

    pub fn new(gens: Vec<OmegaGenerator>) -> Result<Self> {
        if !is_admissible(&gens) {
            return Err(Error::Parse { offset: 0, message: "monomial is not admissible".into() });
        }
        Ok(ArnoldMonomial(gens))
    }

    pub fn generators(&self) -> &[OmegaGenerator] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn max_label(&self) -> usize {
        self.0.last().map_or(0, |g| g.b())
    }

    /// The monomial with the generator at `pos` removed (still admissible).
    pub fn without(&self, pos: usize) -> ArnoldMonomial {
        let mut g = self.0.clone();
        g.remove(pos);
        ArnoldMonomial(g)
    }
}

impl fmt::Display for ArnoldMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for g in &self.0 {
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for ArnoldMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn is_admissible(gens: &[OmegaGenerator]) -> bool {
    gens.windows(2).all(|w| w[0].b < w[1].b)
}

/// Ordered basis of the degree-`k` part on `n` labels.
#[derive(Debug)]
pub struct ArnoldBasis {
    n: usize,
    k: usize,
    monomials: Vec<ArnoldMonomial>,
    index: HashMap<ArnoldMonomial, usize>,
}

impl ArnoldBasis {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[ArnoldMonomial] {
        &self.monomials
    }

    pub fn index_of(&self, m: &ArnoldMonomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn tag(&self) -> BasisTag {
        BasisTag::new(format!("arnold({},{})", self.n, self.k))
    }
}

static BASES: Lazy<Mutex<HashMap<(usize, usize), Arc<ArnoldBasis>>>> = Lazy::new(Default::default);

/// Admissible monomials of degree `k` on `n` labels, in lexicographic order.
pub fn basis(n: usize, k: usize) -> Arc<ArnoldBasis> {
    if let Some(b) = BASES.lock().get(&(n, k)) {
        return b.clone();
    }
    let mut monomials = Vec::new();
    let mut current = Vec::new();
    enumerate(n, k, 2, &mut current, &mut monomials);
    monomials.sort();
    let index = monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
    let built = Arc::new(ArnoldBasis { n, k, monomials, index });
    BASES.lock().entry((n, k)).or_insert(built).clone()
}

fn enumerate(n: usize, k: usize, next_b: usize, current: &mut Vec<OmegaGenerator>, out: &mut Vec<ArnoldMonomial>) {
    if current.len() == k {
        out.push(ArnoldMonomial(current.clone()));
        return;
    }
    for b in next_b..=n {
        if n - b + 1 < k - current.len() {
            break;
        }
        for a in 1..b {
            current.push(OmegaGenerator::normalized(a, b));
            enumerate(n, k, b + 1, current, out);
            current.pop();
        }
    }
}

/// A homogeneous element: sparse rational combination of admissible monomials.
#[derive(Clone, PartialEq, Eq)]
pub struct ArnoldElement {
    n: usize,
    degree: usize,
    terms: BTreeMap<ArnoldMonomial, Rational>,
}

impl ArnoldElement {
    pub fn zero(n: usize, degree: usize) -> Self {
        ArnoldElement { n, degree, terms: BTreeMap::new() }
    }

    pub fn one(n: usize) -> Self {
        Self::from_monomial(n, ArnoldMonomial::one())
    }

    pub fn from_monomial(n: usize, m: ArnoldMonomial) -> Self {
        assert!(m.max_label() <= n);
        let degree = m.degree();
        ArnoldElement { n, degree, terms: BTreeMap::from([(m, Rational::one())]) }
    }

    /// The single generator `w(a,b)`.
    pub fn generator(n: usize, a: usize, b: usize) -> Result<Self> {
        straighten(&[(a, b)], 1, n)
    }

    pub fn from_terms(n: usize, degree: usize, terms: impl IntoIterator<Item = (ArnoldMonomial, Rational)>) -> Self {
        let mut out = ArnoldElement::zero(n, degree);
        for (m, c) in terms {
            assert_eq!(m.degree(), degree);
            out.add_term(m, c);
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<ArnoldMonomial, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &ArnoldMonomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    fn add_term(&mut self, m: ArnoldMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &ArnoldElement) -> Result<ArnoldElement> {
        if self.n != other.n {
            return Err(Error::AmbientMismatch { left: self.n, right: other.n });
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.degree != other.degree {
            return Err(Error::NotHomogeneous { first: self.degree, second: other.degree });
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &ArnoldElement) -> Result<ArnoldElement> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> ArnoldElement {
        let mut out = ArnoldElement::zero(self.n, self.degree);
        if !c.is_zero() {
            out.terms = self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect();
        }
        out
    }

    /// Coordinates in `basis(n, degree)`.
    pub fn to_vector(&self) -> SparseVec {
        let b = basis(self.n, self.degree);
        SparseVec::from_pairs(
            b.len(),
            self.terms.iter().map(|(m, c)| (b.index_of(m).expect("admissible monomial in basis"), c.clone())),
        )
    }

    pub fn from_vector(n: usize, degree: usize, v: &SparseVec) -> ArnoldElement {
        let b = basis(n, degree);
        assert_eq!(v.dim(), b.len());
        ArnoldElement {
            n,
            degree,
            terms: v.entries().iter().map(|(i, c)| (b.monomials()[*i].clone(), c.clone())).collect(),
        }
    }

    /// Re-home the element on a larger label set.
    pub fn with_ambient(&self, n: usize) -> Result<ArnoldElement> {
        if let Some(m) = self.terms.keys().find(|m| m.max_label() > n) {
            return Err(Error::LabelOutOfRange { label: m.max_label(), n });
        }
        Ok(ArnoldElement { n, ..self.clone() })
    }

    pub fn max_label(&self) -> usize {
        self.terms.keys().map(|m| m.max_label()).max().unwrap_or(0)
    }
}

impl fmt::Display for ArnoldElement {
    /// Terms are printed in descending basis order: `w(1,3) - w(1,2)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (idx, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let abs = c.abs();
            if m.degree() == 0 {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ArnoldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[n={} k={}] {}", self.n, self.degree, self)
    }
}

#[derive(Serialize, Deserialize)]
struct ElementDoc {
    n: usize,
    degree: usize,
    terms: Vec<TermDoc>,
}

#[derive(Serialize, Deserialize)]
struct TermDoc {
    monomial: String,
    coeff: Rational,
}

impl Serialize for ArnoldElement {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ElementDoc {
            n: self.n,
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermDoc { monomial: m.to_string(), coeff: c.clone() })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ArnoldElement {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = ElementDoc::deserialize(deserializer)?;
        let mut out = ArnoldElement::zero(doc.n, doc.degree);
        for t in doc.terms {
            let term = crate::expr::parse_expression(&t.monomial, Some(doc.n)).map_err(serde::de::Error::custom)?;
            if !term.is_zero() && term.degree() != doc.degree {
                return Err(serde::de::Error::custom("term degree differs from element degree"));
            }
            out = out.add(&term.scale(&t.coeff)).map_err(serde::de::Error::custom)?;
        }
        Ok(out)
    }
}

/// Rewrites a word of generators into the admissible basis, accumulating
/// integer coefficients.
fn straighten_into(mut word: Vec<OmegaGenerator>, mut coeff: i64, out: &mut HashMap<Vec<OmegaGenerator>, i64>) {
    // odd generators: each adjacent swap flips the sign
    for i in 1..word.len() {
        let mut j = i;
        while j > 0 && (word[j - 1].b, word[j - 1].a) > (word[j].b, word[j].a) {
            word.swap(j - 1, j);
            coeff = -coeff;
            j -= 1;
        }
    }
    if word.windows(2).any(|w| w[0] == w[1]) {
        return;
    }
    match word.windows(2).position(|w| w[0].b == w[1].b) {
        None => *out.entry(word).or_insert(0) += coeff,
        Some(j) => {
            let (a, c, b) = (word[j].a as usize, word[j + 1].a as usize, word[j].b as usize);
            let mut first = word.clone();
            first[j] = OmegaGenerator::normalized(a, c);
            first[j + 1] = OmegaGenerator::normalized(c, b);
            straighten_into(first, coeff, out);
            let mut second = word;
            second[j] = OmegaGenerator::normalized(a, c);
            second[j + 1] = OmegaGenerator::normalized(a, b);
            straighten_into(second, -coeff, out);
        }
    }
}

static STRAIGHTEN_CACHE: Lazy<Mutex<HashMap<Vec<OmegaGenerator>, Arc<Vec<(ArnoldMonomial, i64)>>>>> =
    Lazy::new(Default::default);

/// Straightening of a word of generators, memoized.
pub(crate) fn straighten_word(word: &[OmegaGenerator]) -> Arc<Vec<(ArnoldMonomial, i64)>> {
    if is_admissible(word) {
        return Arc::new(vec![(ArnoldMonomial(word.to_vec()), 1)]);
    }
    if let Some(hit) = STRAIGHTEN_CACHE.lock().get(word) {
        return hit.clone();
    }
    let mut acc = HashMap::new();
    straighten_into(word.to_vec(), 1, &mut acc);
    let mut terms: Vec<_> =
        acc.into_iter().filter(|(_, c)| *c != 0).map(|(w, c)| (ArnoldMonomial(w), c)).collect();
    terms.sort();
    let terms = Arc::new(terms);
    STRAIGHTEN_CACHE.lock().insert(word.to_vec(), terms.clone());
    terms
}

fn check_labels(n: usize, a: usize, b: usize) -> Result<()> {
    if a == b {
        return Err(Error::InvalidGenerator { a, b });
    }
    for label in [a, b] {
        if label == 0 || label > n {
            return Err(Error::LabelOutOfRange { label, n });
        }
    }
    Ok(())
}

/// Class of `sign * w(a1,b1) ... w(ak,bk)` in the admissible basis.
pub fn straighten(word: &[(usize, usize)], sign: i32, n: usize) -> Result<ArnoldElement> {
    let mut gens = Vec::with_capacity(word.len());
    for &(a, b) in word {
        check_labels(n, a, b)?;
        gens.push(OmegaGenerator::normalized(a, b));
    }
    let mut out = ArnoldElement::zero(n, gens.len());
    let s = Rational::from(sign as i64);
    for (m, c) in straighten_word(&gens).iter() {
        out.add_term(m.clone(), Rational::from(*c) * &s);
    }
    Ok(out)
}

/// Graded-commutative product.
pub fn multiply(x: &ArnoldElement, y: &ArnoldElement) -> Result<ArnoldElement> {
    if x.n != y.n {
        return Err(Error::AmbientMismatch { left: x.n, right: y.n });
    }
    let mut out = ArnoldElement::zero(x.n, x.degree + y.degree);
    let mut word = Vec::with_capacity(out.degree);
    for (mx, cx) in &x.terms {
        for (my, cy) in &y.terms {
            word.clear();
            word.extend_from_slice(&mx.0);
            word.extend_from_slice(&my.0);
            let c = cx * cy;
            for (m, k) in straighten_word(&word).iter() {
                out.add_term(m.clone(), Rational::from(*k) * &c);
            }
        }
    }
    Ok(out)
}

/// Relabels every `w(a,b)` to `w(g(a),g(b))` and straightens.
pub fn sn_act(g: &Permutation, x: &ArnoldElement) -> Result<ArnoldElement> {
    if g.len() != x.n {
        return Err(Error::AmbientMismatch { left: g.len(), right: x.n });
    }
    let mut out = ArnoldElement::zero(x.n, x.degree);
    for (m, c) in &x.terms {
        let word: Vec<_> = m.0.iter().map(|w| OmegaGenerator::normalized(g.apply(w.a()), g.apply(w.b()))).collect();
        for (mm, k) in straighten_word(&word).iter() {
            out.add_term(mm.clone(), Rational::from(*k) * c);
        }
    }
    Ok(out)
}

/// Matrix of `sn_act(g, -)` on `basis(n, k)`.
pub fn action_matrix(g: &Permutation, k: usize) -> LinearMap {
    let n = g.len();
    let b = basis(n, k);
    let columns: Vec<SparseVec> = b
        .monomials()
        .iter()
        .map(|m| sn_act(g, &ArnoldElement::from_monomial(n, m.clone())).unwrap().to_vector())
        .collect();
    LinearMap::from_columns(b.len(), &columns, b.tag(), b.tag()).unwrap()
}

/// Element of `A(r) ⊗ A(s)`; each term is a pair of admissible monomials.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ArnoldTensor {
    r: usize,
    s: usize,
    degree: usize,
    terms: BTreeMap<(ArnoldMonomial, ArnoldMonomial), Rational>,
}

impl ArnoldTensor {
    pub fn zero(r: usize, s: usize, degree: usize) -> Self {
        ArnoldTensor { r, s, degree, terms: BTreeMap::new() }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn s(&self) -> usize {
        self.s
    }

    /// Total degree.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<(ArnoldMonomial, ArnoldMonomial), Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, left: ArnoldMonomial, right: ArnoldMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let key = (left, right);
        let v = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
        *v += c;
        if v.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add_scaled(&mut self, other: &ArnoldTensor, c: &Rational) {
        for ((l, r), v) in &other.terms {
            self.add_term(l.clone(), r.clone(), v * c);
        }
    }

    /// Terms whose left factor has degree `p`, as a coefficient matrix over
    /// `basis(r,p) x basis(s, degree-p)`.
    pub fn component(&self, p: usize) -> BTreeMap<(usize, usize), Rational> {
        let (bl, br) = (basis(self.r, p), basis(self.s, self.degree - p));
        self.terms
            .iter()
            .filter(|((l, _), _)| l.degree() == p)
            .map(|((l, r), v)| ((bl.index_of(l).unwrap(), br.index_of(r).unwrap()), v.clone()))
            .collect()
    }

    pub fn from_pairs(r: usize, s: usize, pairs: &[(ArnoldElement, ArnoldElement)]) -> Result<ArnoldTensor> {
        let degree = pairs.first().map_or(0, |(a, b)| a.degree() + b.degree());
        let mut out = ArnoldTensor::zero(r, s, degree);
        for (x, y) in pairs {
            if x.n != r || y.n != s {
                return Err(Error::AmbientMismatch { left: x.n, right: r });
            }
            for (mx, cx) in &x.terms {
                for (my, cy) in &y.terms {
                    out.add_term(mx.clone(), my.clone(), cx * cy);
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for ArnoldTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, ((l, r), c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*({l} ⊗ {r})")?;
        }
        Ok(())
    }
}

/// Image of one generator under the cocomposition of `t`.
pub(crate) enum Side {
    Outer(OmegaGenerator),
    Inner(OmegaGenerator),
}

pub(crate) fn split_generator(t: &TreeInsertion, g: OmegaGenerator) -> Side {
    match (t.inner_label(g.a()), t.inner_label(g.b())) {
        (Some(a), Some(b)) => Side::Inner(OmegaGenerator::normalized(a, b)),
        _ => Side::Outer(OmegaGenerator::normalized(t.outer_label(g.a()), t.outer_label(g.b()))),
    }
}

/// Cocomposition of a single word of generators, both factors straightened.
pub(crate) fn cocompose_word(t: &TreeInsertion, word: &[OmegaGenerator], coeff: &Rational, out: &mut ArnoldTensor) {
    let mut outer = Vec::new();
    let mut inner = Vec::new();
    // sign of moving every inner generator past the outer ones that follow it
    let mut odd = false;
    for &g in word {
        match split_generator(t, g) {
            Side::Outer(w) => {
                if inner.len() % 2 == 1 {
                    odd = !odd;
                }
                outer.push(w);
            }
            Side::Inner(w) => inner.push(w),
        }
    }
    let c = if odd { -coeff } else { coeff.clone() };
    let left = straighten_word(&outer);
    if left.is_empty() {
        return;
    }
    let right = straighten_word(&inner);
    for (ml, kl) in left.iter() {
        for (mr, kr) in right.iter() {
            out.add_term(ml.clone(), mr.clone(), Rational::from(kl * kr) * &c);
        }
    }
}

/// The algebra map `A(n) -> A(r) ⊗ A(s)` dual to inserting an `s`-configuration
/// at point `i` of an `r`-configuration.
pub fn cocompose(t: &TreeInsertion, x: &ArnoldElement) -> Result<ArnoldTensor> {
    if x.n != t.n() {
        return Err(Error::AmbientMismatch { left: x.n, right: t.n() });
    }
    let mut out = ArnoldTensor::zero(t.r(), t.s(), x.degree);
    for (m, c) in &x.terms {
        cocompose_word(t, &m.0, c, &mut out);
    }
    Ok(out)
}

type CocomposeKey = (TreeInsertion, usize, usize);

static COCOMPOSE_CACHE: Lazy<Mutex<HashMap<CocomposeKey, Arc<LinearMap>>>> = Lazy::new(Default::default);

/// Matrix of the `(p, q)` component of `cocompose(t)` from `basis(n, p+q)` to
/// `basis(r, p) ⊗ basis(s, q)` (row index `left * |basis(s,q)| + right`).
pub fn cocompose_matrix(t: &TreeInsertion, p: usize, q: usize) -> Arc<LinearMap> {
    if let Some(hit) = COCOMPOSE_CACHE.lock().get(&(*t, p, q)) {
        return hit.clone();
    }
    let d = p + q;
    let src = basis(t.n(), d);
    let mut per_p: BTreeMap<usize, Vec<(usize, usize, Rational)>> = BTreeMap::new();
    for (col, m) in src.monomials().iter().enumerate() {
        let mut out = ArnoldTensor::zero(t.r(), t.s(), d);
        cocompose_word(t, &m.0, &Rational::one(), &mut out);
        for ((l, r), c) in out.terms {
            let lp = l.degree();
            let right_len = basis(t.s(), d - lp).len();
            let row = basis(t.r(), lp).index_of(&l).unwrap() * right_len + basis(t.s(), d - lp).index_of(&r).unwrap();
            per_p.entry(lp).or_default().push((row, col, c));
        }
    }
    let mut cache = COCOMPOSE_CACHE.lock();
    for lp in 0..=d {
        let (bl, br) = (basis(t.r(), lp), basis(t.s(), d - lp));
        let entries = per_p.remove(&lp).unwrap_or_default();
        let target = BasisTag::new(format!("{}⊗{}", bl.tag().0, br.tag().0));
        let m = LinearMap::new(bl.len() * br.len(), src.len(), entries, src.tag(), target).unwrap();
        cache.entry((*t, lp, d - lp)).or_insert_with(|| Arc::new(m));
    }
    cache[&(*t, p, q)].clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(n: usize, word: &[(usize, usize)]) -> ArnoldElement {
        straighten(word, 1, n).unwrap()
    }

    fn q(v: i64) -> Rational {
        Rational::from(v)
    }

    /// `[t^k] prod_{j=from}^{to} (1 + j t)`
    fn poly_coeffs(from: usize, to: usize) -> Vec<u64> {
        let mut c = vec![1u64];
        for j in from..=to {
            let mut next = vec![0u64; c.len() + 1];
            for (k, v) in c.iter().enumerate() {
                next[k] += v;
                next[k + 1] += v * j as u64;
            }
            c = next;
        }
        c
    }

    #[test]
    fn small_bases() {
        assert_eq!(basis(2, 1).monomials().iter().map(|m| m.to_string()).collect::<Vec<_>>(), ["w(1,2)"]);
        assert_eq!(
            basis(3, 2).monomials().iter().map(|m| m.to_string()).collect::<Vec<_>>(),
            ["w(1,2)w(1,3)", "w(1,2)w(2,3)"]
        );
        assert!(basis(3, 3).is_empty());
        assert_eq!(basis(1, 0).len(), 1);
    }

    #[test]
    fn basis_sizes_match_poincare_polynomial() {
        for n in 1..=7 {
            let expected = poly_coeffs(1, n - 1);
            for k in 0..=n {
                assert_eq!(basis(n, k).len() as u64, expected.get(k).copied().unwrap_or(0), "n={n} k={k}");
            }
        }
        assert_eq!((0..7).map(|k| basis(7, k).len()).sum::<usize>(), 5040);
    }

    #[test]
    fn square_vanishes() {
        assert!(w(2, &[(1, 2), (1, 2)]).is_zero());
    }

    #[test]
    fn straighten_shared_max_label() {
        let x = w(3, &[(1, 3), (2, 3)]);
        let expected = w(3, &[(1, 2), (2, 3)]).sub(&w(3, &[(1, 2), (1, 3)])).unwrap();
        assert_eq!(x, expected);
        assert_eq!(x.to_string(), "w(1,2)w(2,3) - w(1,2)w(1,3)");
        assert!(w(3, &[(1, 2), (2, 3), (1, 3)]).is_zero());
    }

    #[test]
    fn invalid_generator() {
        assert!(matches!(straighten(&[(1, 1)], 1, 3), Err(Error::InvalidGenerator { .. })));
        assert!(matches!(straighten(&[(1, 4)], 1, 3), Err(Error::LabelOutOfRange { .. })));
    }

    #[test]
    fn arnold_relation_straightens_to_zero() {
        for n in 3..=6 {
            for a in 1..=n {
                for b in a + 1..=n {
                    for c in b + 1..=n {
                        let rel = w(n, &[(a, b), (b, c)])
                            .add(&w(n, &[(b, c), (a, c)]))
                            .unwrap()
                            .add(&w(n, &[(a, c), (a, b)]))
                            .unwrap();
                        assert!(rel.is_zero(), "{a} {b} {c}");
                    }
                }
            }
        }
    }

    #[test]
    fn straighten_idempotent_on_basis() {
        for k in 0..5 {
            for m in basis(5, k).monomials() {
                let word: Vec<_> = m.generators().iter().map(|g| (g.a(), g.b())).collect();
                assert_eq!(straighten(&word, 1, 5).unwrap(), ArnoldElement::from_monomial(5, m.clone()));
            }
        }
    }

    #[test]
    fn multiply_examples() {
        let x = w(3, &[(1, 2)]);
        assert_eq!(multiply(&x, &ArnoldElement::one(3)).unwrap(), x);
        assert_eq!(multiply(&x, &w(3, &[(1, 3)])).unwrap(), w(3, &[(1, 2), (1, 3)]));
        assert!(matches!(multiply(&x, &ArnoldElement::one(4)), Err(Error::AmbientMismatch { .. })));
    }

    #[test]
    fn action_examples() {
        let x = w(3, &[(1, 2)]);
        assert_eq!(sn_act(&Permutation::transposition(3, 1, 2), &x).unwrap(), x);
        assert_eq!(sn_act(&Permutation::transposition(3, 2, 3), &x).unwrap(), w(3, &[(1, 3)]));
        let cycle = Permutation::from_images(&[2, 3, 1]).unwrap();
        let y = sn_act(&cycle, &w(3, &[(1, 2), (1, 3)])).unwrap();
        assert_eq!(y, w(3, &[(2, 3), (1, 2)]));
        assert_eq!(y, w(3, &[(1, 2), (2, 3)]).scale(&q(-1)));
    }

    #[test]
    fn cocompose_matrix_matches_cocompose() {
        for t in TreeInsertion::all_up_to(5, true) {
            for d in 0..t.n() {
                for (col, m) in basis(t.n(), d).monomials().iter().enumerate() {
                    let direct = cocompose(&t, &ArnoldElement::from_monomial(t.n(), m.clone())).unwrap();
                    for p in 0..=d {
                        let column = cocompose_matrix(&t, p, d - p).column(col);
                        let width = basis(t.s(), d - p).len();
                        let expected: BTreeMap<_, _> = direct.component(p).into_iter().collect();
                        let got: BTreeMap<_, _> =
                            column.entries().iter().map(|(i, v)| ((i / width, i % width), v.clone())).collect();
                        assert_eq!(got, expected, "{t} {m} p={p}");
                    }
                }
            }
        }
    }

    #[test]
    fn cocompose_examples() {
        let t = TreeInsertion::new(2, 2, 1).unwrap();
        let c = cocompose(&t, &w(3, &[(1, 2)])).unwrap();
        let expected = ArnoldTensor::from_pairs(2, 2, &[(ArnoldElement::one(2), w(2, &[(1, 2)]))]).unwrap();
        assert_eq!(c, expected);
        let c = cocompose(&t, &w(3, &[(1, 3)])).unwrap();
        let expected = ArnoldTensor::from_pairs(2, 2, &[(w(2, &[(1, 2)]), ArnoldElement::one(2))]).unwrap();
        assert_eq!(c, expected);
        let c = cocompose(&t, &w(3, &[(1, 3), (2, 3)])).unwrap();
        assert!(c.is_zero());
        assert!(cocompose(&t, &w(4, &[(1, 3)])).is_err());
    }

    #[test]
    fn display_orders_descending() {
        let x = w(3, &[(1, 3)]).sub(&w(3, &[(1, 2)])).unwrap();
        assert_eq!(x.to_string(), "w(1,3) - w(1,2)");
        assert_eq!(ArnoldElement::zero(3, 1).to_string(), "0");
        assert_eq!(ArnoldElement::one(3).scale(&Rational::new(-1, 2)).to_string(), "-1/2");
        assert_eq!(w(3, &[(1, 2)]).scale(&Rational::new(2, 3)).to_string(), "2/3*w(1,2)");
    }

    #[test]
    fn element_json() {
        let x = w(3, &[(1, 3), (2, 3)]);
        let js = serde_json::to_string(&x).unwrap();
        let back: ArnoldElement = serde_json::from_str(&js).unwrap();
        assert_eq!(back, x);
    }
}
