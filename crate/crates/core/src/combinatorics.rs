//! Labels, permutations, Koszul signs and the one-edge trees `t(r,s,i)`.

use std::fmt;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bijection of `{1..k}`. Stored 0-based; the public API speaks 1-based labels.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(k: usize) -> Self {
        Permutation((0..k).collect())
    }

    /// From the list of images `[p(1), ..., p(k)]`.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let k = images.len();
        let mut seen = vec![false; k];
        for &x in images {
            if x == 0 || x > k || seen[x - 1] {
                return Err(Error::InvalidPermutation(k));
            }
            seen[x - 1] = true;
        }
        Ok(Permutation(images.iter().map(|x| x - 1).collect()))
    }

    /// The transposition exchanging labels `a` and `b`.
    pub fn transposition(k: usize, a: usize, b: usize) -> Self {
        let mut p = Self::identity(k);
        p.0.swap(a - 1, b - 1);
        p
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// Image of the 1-based label `a`.
    pub fn apply(&self, a: usize) -> usize {
        self.0[a - 1] + 1
    }

    pub fn images(&self) -> Vec<usize> {
        self.0.iter().map(|x| x + 1).collect()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len());
        Permutation(other.0.iter().map(|&x| self.0[x]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x] = i;
        }
        Permutation(inv)
    }

    pub fn inversions(&self) -> usize {
        let mut count = 0;
        for a in 0..self.len() {
            for b in a + 1..self.len() {
                if self.0[a] > self.0[b] {
                    count += 1;
                }
            }
        }
        count
    }

    /// A word `[j1, ..., jm]` with `self = s_{j1} ∘ ... ∘ s_{jm}`, where `s_j`
    /// exchanges `j` and `j+1`.
    pub fn adjacent_word(&self) -> Vec<usize> {
        let mut list = self.0.clone();
        let mut swaps = Vec::new();
        let k = list.len();
        for pass in 0..k {
            for j in 0..k.saturating_sub(pass + 1) {
                if list[j] > list[j + 1] {
                    list.swap(j, j + 1);
                    swaps.push(j + 1);
                }
            }
        }
        swaps.reverse();
        swaps
    }

    /// The block permutation `sigma ∘_i tau` of `{1..r+s-1}`: the block
    /// `{i..i+s-1}` is permuted internally by `tau` and moved as a whole by `sigma`.
    pub fn block_compose(sigma: &Permutation, i: usize, tau: &Permutation) -> Permutation {
        let (r, s) = (sigma.len(), tau.len());
        let t = TreeInsertion::new(r, s, i).expect("slot in range");
        let target = TreeInsertion::new(r, s, sigma.apply(i)).expect("slot in range");
        let images = (1..=t.n())
            .map(|c| {
                let o = sigma.apply(t.outer_label(c));
                match t.inner_label(c) {
                    Some(inner) => target.first_label_of(o) + tau.apply(inner) - 1,
                    None => target.first_label_of(o),
                }
            })
            .collect::<Vec<_>>();
        Permutation::from_images(&images).expect("block composition is a bijection")
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.images())
    }
}

/// A permutation of graded symbols: the symbol at position `a` (degree
/// `degrees[a-1]`) moves to position `perm(a)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedPermutation {
    pub perm: Permutation,
    pub degrees: Vec<i64>,
}

impl GradedPermutation {
    pub fn new(perm: Permutation, degrees: Vec<i64>) -> Result<Self> {
        if perm.len() != degrees.len() {
            return Err(Error::DimensionMismatch { expected: perm.len(), found: degrees.len() });
        }
        Ok(GradedPermutation { perm, degrees })
    }

    /// Degrees listed by the positions the symbols end up in.
    pub fn permuted_degrees(&self) -> Vec<i64> {
        let mut out = vec![0; self.degrees.len()];
        for (a, d) in self.degrees.iter().enumerate() {
            out[self.perm.apply(a + 1) - 1] = *d;
        }
        out
    }
}

/// Koszul sign of reordering graded symbols: `(-1)^{d_a d_b}` for every pair
/// whose relative order is reversed.
pub fn koszul_sign(p: &GradedPermutation) -> i32 {
    let k = p.perm.len();
    let mut odd = false;
    for a in 1..=k {
        for b in a + 1..=k {
            if p.perm.apply(a) > p.perm.apply(b) && (p.degrees[a - 1] * p.degrees[b - 1]).rem_euclid(2) == 1 {
                odd = !odd;
            }
        }
    }
    if odd {
        -1
    } else {
        1
    }
}

/// The tree `t(r,s,i)`: an `s`-corolla grafted on leaf `i` of an `r`-corolla.
/// Composite labels `{1..n}`, `n = r+s-1`; the grafted leaves are the block
/// `{i..i+s-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "TreeSpec", into = "TreeSpec")]
pub struct TreeInsertion {
    r: usize,
    s: usize,
    i: usize,
}

#[derive(Serialize, Deserialize)]
struct TreeSpec {
    r: usize,
    s: usize,
    i: usize,
}

impl TryFrom<TreeSpec> for TreeInsertion {
    type Error = Error;
    fn try_from(t: TreeSpec) -> Result<Self> {
        TreeInsertion::new(t.r, t.s, t.i)
    }
}

impl From<TreeInsertion> for TreeSpec {
    fn from(t: TreeInsertion) -> Self {
        TreeSpec { r: t.r, s: t.s, i: t.i }
    }
}

impl TreeInsertion {
    pub fn new(r: usize, s: usize, i: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::OutOfRange { what: "r", value: r, min: 1, max: usize::MAX });
        }
        if s == 0 {
            return Err(Error::OutOfRange { what: "s", value: s, min: 1, max: usize::MAX });
        }
        if i == 0 || i > r {
            return Err(Error::OutOfRange { what: "i", value: i, min: 1, max: r });
        }
        Ok(TreeInsertion { r, s, i })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn n(&self) -> usize {
        self.r + self.s - 1
    }

    pub fn inner_block(&self) -> RangeInclusive<usize> {
        self.i..=self.i + self.s - 1
    }

    pub fn in_block(&self, c: usize) -> bool {
        self.inner_block().contains(&c)
    }

    /// Outer label of a composite label; the whole block collapses to `i`.
    pub fn outer_label(&self, c: usize) -> usize {
        debug_assert!((1..=self.n()).contains(&c));
        if c < self.i {
            c
        } else if c < self.i + self.s {
            self.i
        } else {
            c - self.s + 1
        }
    }

    pub fn inner_label(&self, c: usize) -> Option<usize> {
        self.in_block(c).then(|| c - self.i + 1)
    }

    /// Smallest composite label whose outer label is `o`.
    pub fn first_label_of(&self, o: usize) -> usize {
        if o <= self.i {
            o
        } else {
            o + self.s - 1
        }
    }

    /// Outer relabeling indexed by composite label (entry 0 unused).
    pub fn outer_relabel(&self) -> Vec<usize> {
        std::iter::once(0).chain((1..=self.n()).map(|c| self.outer_label(c))).collect()
    }

    /// Inner relabeling `B -> {1..s}` as `(composite, inner)` pairs.
    pub fn inner_relabel(&self) -> Vec<(usize, usize)> {
        self.inner_block().map(|c| (c, c - self.i + 1)).collect()
    }

    /// All trees with `2 <= n <= max_n` (or `1 <= n` when `include_units`).
    pub fn all_up_to(max_n: usize, include_units: bool) -> Vec<TreeInsertion> {
        let min_arity = if include_units { 1 } else { 2 };
        let mut out = Vec::new();
        for n in 1..=max_n {
            for r in min_arity..=n {
                let s = n + 1 - r;
                if s < min_arity {
                    continue;
                }
                for i in 1..=r {
                    out.push(TreeInsertion { r, s, i });
                }
            }
        }
        out
    }
}

impl fmt::Display for TreeInsertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t({},{},{})", self.r, self.s, self.i)
    }
}
