//! Independent oracles used by the integration tests.
//!
//! The numeric oracle evaluates `ω(a,b)` as the holomorphic form
//! `d log(z_a - z_b)` at a configuration and compares wedge products through
//! their coordinate minors.

#![allow(dead_code)]

use std::collections::BTreeMap;

use gravity_core::arnold::{ArnoldElement, ArnoldTensor};
use gravity_core::combinatorics::TreeInsertion;
use num_complex::Complex64;
use rand::Rng;

/// `[t^k] Π_{j=from}^{to} (1 + j t)` for all `k`.
pub fn product_coefficients(from: usize, to: usize) -> Vec<u64> {
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

/// A 1-form on `dim` coordinates.
pub type OneForm = Vec<Complex64>;

/// Coefficients of a k-form over increasing index sets.
pub type Form = BTreeMap<Vec<usize>, Complex64>;

fn subsets(dim: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, dim: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..dim {
            cur.push(i);
            rec(i + 1, dim, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, dim, k, &mut Vec::new(), &mut out);
    out
}

fn det(mut m: Vec<Vec<Complex64>>) -> Complex64 {
    let k = m.len();
    let mut acc = Complex64::new(1.0, 0.0);
    for col in 0..k {
        let pivot = (col..k).max_by(|&a, &b| m[a][col].norm().partial_cmp(&m[b][col].norm()).unwrap()).unwrap();
        if m[pivot][col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            m.swap(pivot, col);
            acc = -acc;
        }
        acc *= m[col][col];
        for row in col + 1..k {
            let f = m[row][col] / m[col][col];
            for c in col..k {
                let v = m[col][c];
                m[row][c] -= f * v;
            }
        }
    }
    acc
}

/// `θ_1 ∧ ... ∧ θ_k` on `dim` coordinates.
pub fn wedge(forms: &[OneForm], dim: usize) -> Form {
    let k = forms.len();
    subsets(dim, k)
        .into_iter()
        .map(|idx| {
            let m = forms.iter().map(|f| idx.iter().map(|&i| f[i]).collect()).collect();
            let d = if k == 0 { Complex64::new(1.0, 0.0) } else { det(m) };
            (idx, d)
        })
        .collect()
}

pub fn add_scaled(acc: &mut Form, other: &Form, c: f64) {
    for (k, v) in other {
        *acc.entry(k.clone()).or_insert(Complex64::new(0.0, 0.0)) += v * c;
    }
}

/// `d log(z_a - z_b)` at the configuration `z` (labels 1-based).
pub fn dlog(z: &[Complex64], a: usize, b: usize) -> OneForm {
    let inv = 1.0 / (z[a - 1] - z[b - 1]);
    let mut f = vec![Complex64::new(0.0, 0.0); z.len()];
    f[a - 1] = inv;
    f[b - 1] = -inv;
    f
}

/// The form of a word of generators at `z`.
pub fn word_form(word: &[(usize, usize)], z: &[Complex64]) -> Form {
    let forms: Vec<OneForm> = word.iter().map(|&(a, b)| dlog(z, a, b)).collect();
    wedge(&forms, z.len())
}

pub fn element_form(x: &ArnoldElement, z: &[Complex64]) -> Form {
    let mut acc = Form::new();
    for (m, c) in x.terms() {
        let word: Vec<(usize, usize)> = m.generators().iter().map(|g| (g.a(), g.b())).collect();
        add_scaled(&mut acc, &word_form(&word, z), c.to_f64());
    }
    acc
}

/// Random configuration of `n` distinct points in the unit square.
pub fn configuration(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

/// Local coordinates near the divisor of `t`: `z_c = x_{outer(c)} + ε w_{inner(c)}`
/// for `c` in the block, `z_c = x_{outer(c)}` otherwise. Variables are ordered
/// `(ε, x_1..x_r, w_1..w_s)`.
pub struct CollisionChart<'a> {
    pub t: TreeInsertion,
    pub x: &'a [Complex64],
    pub w: &'a [Complex64],
    pub eps: f64,
}

impl CollisionChart<'_> {
    pub fn dim(&self) -> usize {
        1 + self.t.r() + self.t.s()
    }

    /// Pull back of `d log(z_a - z_b)`, computed without cancellation.
    pub fn dlog(&self, a: usize, b: usize) -> OneForm {
        let t = &self.t;
        let r = t.r();
        let mut f = vec![Complex64::new(0.0, 0.0); self.dim()];
        match (t.inner_label(a), t.inner_label(b)) {
            (Some(ia), Some(ib)) => {
                // d log(ε (w_a - w_b)) = dε/ε + d log(w_a - w_b)
                let inv = 1.0 / (self.w[ia - 1] - self.w[ib - 1]);
                f[0] = Complex64::new(1.0 / self.eps, 0.0);
                f[1 + r + ia - 1] += inv;
                f[1 + r + ib - 1] -= inv;
            }
            (ia, ib) => {
                let (oa, ob) = (t.outer_label(a), t.outer_label(b));
                let wa = ia.map_or(Complex64::new(0.0, 0.0), |i| self.w[i - 1]);
                let wb = ib.map_or(Complex64::new(0.0, 0.0), |i| self.w[i - 1]);
                let diff = (self.x[oa - 1] - self.x[ob - 1]) + self.eps * (wa - wb);
                let inv = 1.0 / diff;
                f[0] = (wa - wb) * inv;
                f[1 + oa - 1] += inv;
                f[1 + ob - 1] -= inv;
                if let Some(i) = ia {
                    f[1 + r + i - 1] += self.eps * inv;
                }
                if let Some(i) = ib {
                    f[1 + r + i - 1] -= self.eps * inv;
                }
            }
        }
        f
    }

    pub fn word_form(&self, word: &[(usize, usize)]) -> Form {
        let forms: Vec<OneForm> = word.iter().map(|&(a, b)| self.dlog(a, b)).collect();
        wedge(&forms, self.dim())
    }

    pub fn element_form(&self, x: &ArnoldElement) -> Form {
        let mut acc = Form::new();
        for (m, c) in x.terms() {
            let word: Vec<(usize, usize)> = m.generators().iter().map(|g| (g.a(), g.b())).collect();
            add_scaled(&mut acc, &self.word_form(&word), c.to_f64());
        }
        acc
    }

    /// Components of a form not involving `dε` (ε held fixed).
    pub fn restrict_fixed_eps(form: &Form) -> Form {
        form.iter().filter(|(k, _)| k.first() != Some(&0)).map(|(k, v)| (k.clone(), *v)).collect()
    }

    /// `lim ε · (coefficient of dε ∧ ...)`, with `dε` moved to the front.
    pub fn residue_part(&self, form: &Form) -> Form {
        form.iter()
            .filter(|(k, _)| k.first() == Some(&0))
            .map(|(k, v)| (k[1..].to_vec(), v * self.eps))
            .collect()
    }

    /// `α' ⊗ α''` as the form `α'(x) ∧ α''(w)` in the same variables (ε slot unused).
    pub fn tensor_form(&self, x: &ArnoldTensor) -> Form {
        let r = self.t.r();
        let mut acc = Form::new();
        for ((l, rt), c) in x.terms() {
            let mut forms = Vec::new();
            for g in l.generators() {
                let inv = 1.0 / (self.x[g.a() - 1] - self.x[g.b() - 1]);
                let mut f = vec![Complex64::new(0.0, 0.0); self.dim()];
                f[1 + g.a() - 1] = inv;
                f[1 + g.b() - 1] = -inv;
                forms.push(f);
            }
            for g in rt.generators() {
                let inv = 1.0 / (self.w[g.a() - 1] - self.w[g.b() - 1]);
                let mut f = vec![Complex64::new(0.0, 0.0); self.dim()];
                f[1 + r + g.a() - 1] = inv;
                f[1 + r + g.b() - 1] = -inv;
                forms.push(f);
            }
            add_scaled(&mut acc, &wedge(&forms, self.dim()), c.to_f64());
        }
        acc
    }
}

/// `|a - b| <= tol * max(1, largest coefficient)` on every coordinate.
pub fn forms_agree(a: &Form, b: &Form, tol: f64) -> bool {
    let scale = a.values().chain(b.values()).map(|v| v.norm()).fold(1.0, f64::max);
    let zero = Complex64::new(0.0, 0.0);
    a.keys().chain(b.keys()).all(|k| {
        let d = a.get(k).unwrap_or(&zero) - b.get(k).unwrap_or(&zero);
        d.norm() <= tol * scale
    })
}
