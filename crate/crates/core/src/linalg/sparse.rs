use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Rational;
use crate::error::{Error, Result};

/// Sparse coordinate vector: sorted `(index, value)` pairs, no explicit zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SparseVec {
    dim: usize,
    entries: Vec<(usize, Rational)>,
}

impl SparseVec {
    pub fn zero(dim: usize) -> Self {
        SparseVec { dim, entries: Vec::new() }
    }

    pub fn unit(dim: usize, idx: usize) -> Self {
        assert!(idx < dim);
        SparseVec { dim, entries: vec![(idx, Rational::one())] }
    }

    /// Builds a vector from arbitrary `(index, value)` pairs; duplicates are summed.
    pub fn from_pairs(dim: usize, pairs: impl IntoIterator<Item = (usize, Rational)>) -> Self {
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        for (i, v) in pairs {
            assert!(i < dim, "index {i} out of range for dimension {dim}");
            *acc.entry(i).or_insert_with(Rational::zero) += v;
        }
        SparseVec {
            dim,
            entries: acc.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        }
    }

    pub fn from_dense(values: &[Rational]) -> Self {
        SparseVec {
            dim: values.len(),
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i, v.clone()))
                .collect(),
        }
    }

    pub fn to_dense(&self) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.dim];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, Rational)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, idx: usize) -> Rational {
        match self.entries.binary_search_by_key(&idx, |(i, _)| *i) {
            Ok(pos) => self.entries[pos].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn scale(&self, c: &Rational) -> SparseVec {
        if c.is_zero() {
            return SparseVec::zero(self.dim);
        }
        SparseVec {
            dim: self.dim,
            entries: self.entries.iter().map(|(i, v)| (*i, v * c)).collect(),
        }
    }

    /// `self + c * other`
    pub fn axpy(&self, c: &Rational, other: &SparseVec) -> SparseVec {
        assert_eq!(self.dim, other.dim);
        SparseVec { dim: self.dim, entries: row_axpy(&self.entries, c, &other.entries) }
    }

    pub fn dot(&self, other: &SparseVec) -> Rational {
        let (mut a, mut b) = (0, 0);
        let mut acc = Rational::zero();
        while a < self.entries.len() && b < other.entries.len() {
            let (ia, ib) = (self.entries[a].0, other.entries[b].0);
            if ia == ib {
                acc += &self.entries[a].1 * &other.entries[b].1;
                a += 1;
                b += 1;
            } else if ia < ib {
                a += 1;
            } else {
                b += 1;
            }
        }
        acc
    }
}

type Row = Vec<(usize, Rational)>;

/// `a + c * b` on sorted sparse rows.
fn row_axpy(a: &[(usize, Rational)], c: &Rational, b: &[(usize, Rational)]) -> Row {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            out.push((b[j].0, c * &b[j].1));
            j += 1;
        } else {
            let v = &a[i].1 + &(c * &b[j].1);
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn row_get(row: &[(usize, Rational)], col: usize) -> Option<&Rational> {
    row.binary_search_by_key(&col, |(c, _)| *c).ok().map(|p| &row[p].1)
}

/// Reduced row-echelon form: pivot rows sorted by ascending pivot column, leading entries 1.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub cols: usize,
    pub pivots: Vec<usize>,
    pub rows: Vec<Vec<(usize, Rational)>>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Sparse Gauss-Jordan elimination.
///
/// Columns are eliminated in ascending order. Among the rows whose leading
/// column is the current one, the row with fewest nonzeros becomes the pivot.
/// The reduced form is unique, so the pivot choice only affects fill-in.
pub fn reduced_echelon(cols: usize, rows: Vec<Vec<(usize, Rational)>>) -> Echelon {
    let mut buckets: BTreeMap<usize, Vec<Row>> = BTreeMap::new();
    for row in rows.into_iter().filter(|r| !r.is_empty()) {
        debug_assert!(row.windows(2).all(|w| w[0].0 < w[1].0));
        buckets.entry(row[0].0).or_default().push(row);
    }
    let mut pivots = Vec::new();
    let mut prows: Vec<Row> = Vec::new();
    while let Some((col, mut bucket)) = buckets.pop_first() {
        let k = (0..bucket.len()).min_by_key(|&k| bucket[k].len()).unwrap();
        let mut pivot = bucket.swap_remove(k);
        let inv = pivot[0].1.recip();
        if !inv.is_one() {
            for (_, v) in pivot.iter_mut() {
                *v *= &inv;
            }
        }
        for row in bucket {
            let c = -&row[0].1;
            let reduced = row_axpy(&row, &c, &pivot);
            if let Some(&(lead, _)) = reduced.first() {
                buckets.entry(lead).or_default().push(reduced);
            }
        }
        pivots.push(col);
        prows.push(pivot);
    }
    for idx in (0..prows.len()).rev() {
        let col = pivots[idx];
        let pivot = prows[idx].clone();
        for row in prows.iter_mut().take(idx) {
            if let Some(v) = row_get(row, col) {
                let c = -v;
                *row = row_axpy(row, &c, &pivot);
            }
        }
    }
    Echelon { cols, pivots, rows: prows }
}

/// Opaque identifier of an ordered basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisTag(pub String);

impl BasisTag {
    pub fn new(s: impl Into<String>) -> Self {
        BasisTag(s.into())
    }
}

/// Sparse rational matrix between two tagged bases. Columns index the source basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearMap {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, Rational)>,
    source: BasisTag,
    target: BasisTag,
}

impl LinearMap {
    pub fn new(
        rows: usize,
        cols: usize,
        entries: impl IntoIterator<Item = (usize, usize, Rational)>,
        source: BasisTag,
        target: BasisTag,
    ) -> Result<Self> {
        let mut acc: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for (r, c, v) in entries {
            if r >= rows || c >= cols {
                return Err(Error::IndexOutOfRange { row: r, col: c, rows, cols });
            }
            *acc.entry((r, c)).or_insert_with(Rational::zero) += v;
        }
        Ok(LinearMap {
            rows,
            cols,
            entries: acc.into_iter().filter(|(_, v)| !v.is_zero()).map(|((r, c), v)| (r, c, v)).collect(),
            source,
            target,
        })
    }

    pub fn zero(rows: usize, cols: usize, source: BasisTag, target: BasisTag) -> Self {
        LinearMap { rows, cols, entries: Vec::new(), source, target }
    }

    pub fn identity(dim: usize, tag: BasisTag) -> Self {
        LinearMap {
            rows: dim,
            cols: dim,
            entries: (0..dim).map(|i| (i, i, Rational::one())).collect(),
            source: tag.clone(),
            target: tag,
        }
    }

    /// Builds a map from its columns, i.e. the images of the source basis vectors.
    pub fn from_columns(rows: usize, columns: &[SparseVec], source: BasisTag, target: BasisTag) -> Result<Self> {
        let mut entries = Vec::new();
        for (c, col) in columns.iter().enumerate() {
            if col.dim() != rows {
                return Err(Error::DimensionMismatch { expected: rows, found: col.dim() });
            }
            entries.extend(col.entries().iter().map(|(r, v)| (*r, c, v.clone())));
        }
        LinearMap::new(rows, columns.len(), entries, source, target)
    }

    pub fn from_dense(values: &[Vec<Rational>], source: BasisTag, target: BasisTag) -> Result<Self> {
        let rows = values.len();
        let cols = values.first().map_or(0, |r| r.len());
        let mut entries = Vec::new();
        for (r, row) in values.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: row.len() });
            }
            entries.extend(row.iter().enumerate().map(|(c, v)| (r, c, v.clone())));
        }
        LinearMap::new(rows, cols, entries, source, target)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[(usize, usize, Rational)] {
        &self.entries
    }

    pub fn source(&self) -> &BasisTag {
        &self.source
    }

    pub fn target(&self) -> &BasisTag {
        &self.target
    }

    pub fn get(&self, row: usize, col: usize) -> Rational {
        match self.entries.binary_search_by(|(r, c, _)| (*r, *c).cmp(&(row, col))) {
            Ok(p) => self.entries[p].2.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn row_vectors(&self) -> Vec<SparseVec> {
        let mut rows: Vec<Row> = vec![Vec::new(); self.rows];
        for (r, c, v) in &self.entries {
            rows[*r].push((*c, v.clone()));
        }
        rows.into_iter().map(|entries| SparseVec { dim: self.cols, entries }).collect()
    }

    pub fn column(&self, col: usize) -> SparseVec {
        SparseVec {
            dim: self.rows,
            entries: self.entries.iter().filter(|(_, c, _)| *c == col).map(|(r, _, v)| (*r, v.clone())).collect(),
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        let mut out = vec![vec![Rational::zero(); self.cols]; self.rows];
        for (r, c, v) in &self.entries {
            out[*r][*c] = v.clone();
        }
        out
    }

    pub fn transpose(&self) -> LinearMap {
        let mut entries: Vec<_> = self.entries.iter().map(|(r, c, v)| (*c, *r, v.clone())).collect();
        entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        LinearMap {
            rows: self.cols,
            cols: self.rows,
            entries,
            source: self.target.clone(),
            target: self.source.clone(),
        }
    }

    pub fn scale(&self, c: &Rational) -> LinearMap {
        let entries = if c.is_zero() {
            Vec::new()
        } else {
            self.entries.iter().map(|(r, col, v)| (*r, *col, v * c)).collect()
        };
        LinearMap { entries, ..self.clone() }
    }

    pub fn apply(&self, v: &SparseVec) -> Result<SparseVec> {
        if v.dim() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: v.dim() });
        }
        let dense = v.to_dense();
        let mut out = vec![Rational::zero(); self.rows];
        for (r, c, m) in &self.entries {
            if !dense[*c].is_zero() {
                out[*r] += m * &dense[*c];
            }
        }
        Ok(SparseVec::from_dense(&out))
    }

    /// `self ∘ rhs`; the target of `rhs` must be the source of `self`.
    pub fn compose(&self, rhs: &LinearMap) -> Result<LinearMap> {
        if rhs.target != self.source {
            return Err(Error::BasisMismatch { expected: self.source.0.clone(), found: rhs.target.0.clone() });
        }
        if rhs.rows != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: rhs.rows });
        }
        let mut by_row: Vec<Row> = vec![Vec::new(); rhs.rows];
        for (r, c, v) in &rhs.entries {
            by_row[*r].push((*c, v.clone()));
        }
        let mut acc: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for (r, k, a) in &self.entries {
            for (c, b) in &by_row[*k] {
                *acc.entry((*r, *c)).or_insert_with(Rational::zero) += a * b;
            }
        }
        Ok(LinearMap {
            rows: self.rows,
            cols: rhs.cols,
            entries: acc.into_iter().filter(|(_, v)| !v.is_zero()).map(|((r, c), v)| (r, c, v)).collect(),
            source: rhs.source.clone(),
            target: self.target.clone(),
        })
    }

    pub fn add(&self, rhs: &LinearMap) -> Result<LinearMap> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch { expected: self.rows * self.cols, found: rhs.rows * rhs.cols });
        }
        LinearMap::new(
            self.rows,
            self.cols,
            self.entries.iter().chain(rhs.entries.iter()).cloned(),
            self.source.clone(),
            self.target.clone(),
        )
    }

    /// Kronecker product; source index `a * other.cols + b`.
    pub fn kron(&self, other: &LinearMap) -> LinearMap {
        let mut entries = Vec::with_capacity(self.entries.len() * other.entries.len());
        for (ra, ca, va) in &self.entries {
            for (rb, cb, vb) in &other.entries {
                entries.push((ra * other.rows + rb, ca * other.cols + cb, va * vb));
            }
        }
        entries.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
        LinearMap {
            rows: self.rows * other.rows,
            cols: self.cols * other.cols,
            entries,
            source: BasisTag(format!("{}⊗{}", self.source.0, other.source.0)),
            target: BasisTag(format!("{}⊗{}", self.target.0, other.target.0)),
        }
    }

    pub fn with_tags(mut self, source: BasisTag, target: BasisTag) -> LinearMap {
        self.source = source;
        self.target = target;
        self
    }

    pub fn echelon(&self) -> Echelon {
        let rows = self.row_vectors().into_iter().map(|v| v.entries).collect();
        reduced_echelon(self.cols, rows)
    }
}

/// Rank over Q.
pub fn rank(m: &LinearMap) -> usize {
    m.echelon().rank()
}

/// Echelonized basis of the kernel: leading entries 1, leading positions ascending.
pub fn kernel_basis(m: &LinearMap) -> Vec<SparseVec> {
    let ech = m.echelon();
    let cols = m.cols();
    let mut is_pivot = vec![false; cols];
    for &p in &ech.pivots {
        is_pivot[p] = true;
    }
    // column f of the echelon rows, per free column
    let mut free_col_entries: BTreeMap<usize, Vec<(usize, Rational)>> = BTreeMap::new();
    for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
        for (c, v) in row {
            if !is_pivot[*c] {
                free_col_entries.entry(*c).or_default().push((p, -v));
            }
        }
    }
    let raw: Vec<Row> = (0..cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = free_col_entries.remove(&f).unwrap_or_default();
            v.push((f, Rational::one()));
            v.sort_by_key(|(c, _)| *c);
            v
        })
        .collect();
    reduced_echelon(cols, raw)
        .rows
        .into_iter()
        .map(|entries| SparseVec { dim: cols, entries })
        .collect()
}

/// Solver for coordinates with respect to a fixed linearly independent family.
#[derive(Clone, Debug)]
pub struct SpanSolver {
    dim: usize,
    len: usize,
    pivots: Vec<usize>,
    // echelon rows restricted to the ambient coordinates
    reduced: Vec<Row>,
    // echelon row i = sum_j transform[i][j] * basis_j
    transform: Vec<Row>,
}

impl SpanSolver {
    pub fn new(dim: usize, basis: &[SparseVec]) -> Result<Self> {
        let mut rows = Vec::with_capacity(basis.len());
        for (j, b) in basis.iter().enumerate() {
            if b.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: b.dim() });
            }
            let mut row = b.entries().to_vec();
            row.push((dim + j, Rational::one()));
            rows.push(row);
        }
        let ech = reduced_echelon(dim + basis.len(), rows);
        if ech.rank() < basis.len() || ech.pivots.iter().any(|&p| p >= dim) {
            return Err(Error::DependentBasis);
        }
        let mut reduced = Vec::with_capacity(ech.rank());
        let mut transform = Vec::with_capacity(ech.rank());
        for row in ech.rows {
            let split = row.partition_point(|(c, _)| *c < dim);
            let (a, b) = row.split_at(split);
            reduced.push(a.to_vec());
            transform.push(b.iter().map(|(c, v)| (c - dim, v.clone())).collect());
        }
        Ok(SpanSolver { dim, len: basis.len(), pivots: ech.pivots, reduced, transform })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn solve(&self, v: &SparseVec) -> Result<Vec<Rational>> {
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: v.dim() });
        }
        let mut residual = v.to_dense();
        let mut coords = vec![Rational::zero(); self.len];
        for (i, &p) in self.pivots.iter().enumerate() {
            let d = residual[p].clone();
            if d.is_zero() {
                continue;
            }
            for (c, x) in &self.reduced[i] {
                residual[*c] -= &(&d * x);
            }
            for (j, t) in &self.transform[i] {
                coords[*j] += &d * t;
            }
        }
        if let Some(idx) = residual.iter().position(|x| !x.is_zero()) {
            return Err(Error::NotInSpan { index: idx });
        }
        Ok(coords)
    }
}

/// Coordinates of `v` in the span of the independent family `basis`.
pub fn coordinates_in_span(v: &SparseVec, basis: &[SparseVec]) -> Result<Vec<Rational>> {
    SpanSolver::new(v.dim(), basis)?.solve(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tag() -> BasisTag {
        BasisTag::new("t")
    }

    fn q(v: i64) -> Rational {
        Rational::from(v)
    }

    fn dense(rows: &[&[i64]]) -> LinearMap {
        let v: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
        LinearMap::from_dense(&v, tag(), tag()).unwrap()
    }

    #[test]
    fn kernel_of_zero_map() {
        let m = LinearMap::zero(2, 2, tag(), tag());
        let k = kernel_basis(&m);
        assert_eq!(k, vec![SparseVec::unit(2, 0), SparseVec::unit(2, 1)]);
    }

    #[test]
    fn kernel_of_row_of_ones() {
        let k = kernel_basis(&dense(&[&[1, 1]]));
        assert_eq!(k.len(), 1);
        assert_eq!(k[0].to_dense(), vec![q(1), q(-1)]);
    }

    #[test]
    fn identity_and_zero_rank() {
        assert_eq!(rank(&LinearMap::identity(3, tag())), 3);
        assert_eq!(rank(&LinearMap::zero(4, 5, tag(), tag())), 0);
    }

    #[test]
    fn explicit_zero_entries_dropped() {
        let m = LinearMap::new(2, 2, vec![(0, 0, q(0)), (1, 1, q(2)), (1, 1, q(-2))], tag(), tag()).unwrap();
        assert!(m.is_zero());
        assert!(LinearMap::new(1, 1, vec![(1, 0, q(1))], tag(), tag()).is_err());
    }

    #[test]
    fn coordinates_basic_cases() {
        let b = vec![
            SparseVec::from_dense(&[q(1), q(2), q(0)]),
            SparseVec::from_dense(&[q(0), q(1), q(1)]),
        ];
        assert_eq!(coordinates_in_span(&b[0], &b).unwrap(), vec![q(1), q(0)]);
        assert_eq!(coordinates_in_span(&SparseVec::zero(3), &b).unwrap(), vec![q(0), q(0)]);
        let outside = SparseVec::unit(3, 2);
        assert!(matches!(coordinates_in_span(&outside, &b), Err(Error::NotInSpan { .. })));
    }

    #[test]
    fn dependent_basis_rejected() {
        let b = vec![SparseVec::unit(2, 0), SparseVec::unit(2, 0).scale(&q(3))];
        assert!(matches!(SpanSolver::new(2, &b), Err(Error::DependentBasis)));
    }

    #[test]
    fn compose_checks_tags() {
        let a = LinearMap::identity(2, BasisTag::new("a"));
        let b = LinearMap::identity(2, BasisTag::new("b"));
        assert!(matches!(a.compose(&b), Err(Error::BasisMismatch { .. })));
        let m = dense(&[&[1, 2], &[3, 4]]);
        let sq = m.compose(&m).unwrap();
        assert_eq!(sq.to_dense(), vec![vec![q(7), q(10)], vec![q(15), q(22)]]);
    }
}
