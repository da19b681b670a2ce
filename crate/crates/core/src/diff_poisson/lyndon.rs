//! Lyndon-Shirshov words in differential letters, and the associative
//! composition check for the envelope of a finite-dimensional Lie algebra.
//!
//! Words use the max convention: an LS word is strictly greater than every
//! proper rotation of itself.

use std::collections::BTreeMap;
use std::fmt;

use crate::coeff::{binomial, Q};

use super::{DiffGenerator, Letter, Lie};

pub fn is_ls_word(w: &[DiffGenerator]) -> bool {
    !w.is_empty() && (1..w.len()).all(|i| w.iter().gt(w[i..].iter().chain(&w[..i])))
}

/// No `p q` with `p` plain and `p > q` as letters of `B`.
pub fn is_reduced(w: &[DiffGenerator]) -> bool {
    w.windows(2).all(|p| !(p[0].order == 0 && p[0].base > p[1].base))
}

/// `[w] = [[u], [v]]` with `v` the longest proper LS suffix.
pub fn standard_bracketing(w: &[DiffGenerator]) -> Lie {
    assert!(is_ls_word(w), "not an LS word");
    if w.len() == 1 {
        return Lie::Gen(w[0].clone());
    }
    let split = (1..w.len()).find(|&i| is_ls_word(&w[i..])).expect("last letter is LS");
    Lie::bracket(standard_bracketing(&w[..split]), standard_bracketing(&w[split..]))
}

/// Standard bracketings of the reduced LS words of length `degree` and
/// weight `weight` over `alphabet`, letters repeating freely.
pub fn ls_basis(alphabet: &[Letter], degree: usize, weight: i64) -> Vec<Lie> {
    let derivs = weight + 1;
    if degree == 0 || derivs < 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut word = Vec::with_capacity(degree);
    fn go(alphabet: &[Letter], degree: usize, left: u32, word: &mut Vec<DiffGenerator>, out: &mut Vec<Lie>) {
        if word.len() == degree {
            if left == 0 && is_reduced(word) && is_ls_word(word) {
                out.push(standard_bracketing(word));
            }
            return;
        }
        for l in alphabet {
            for k in 0..=left {
                word.push(DiffGenerator::new(l.clone(), k));
                go(alphabet, degree, left - k, word, out);
                word.pop();
            }
        }
    }
    go(alphabet, degree, derivs as u32, &mut word, &mut out);
    out.sort();
    out
}

/// Structure constants: `[e_i, e_j] = sum_k c[i][j][k] e_k`.
#[derive(Clone, Debug)]
pub struct LieTable {
    pub dim: usize,
    pub c: Vec<Vec<Vec<Q>>>,
}

impl LieTable {
    /// From the brackets `[e_i, e_j]` for `i < j`; the rest follows by
    /// antisymmetry.
    pub fn from_brackets(dim: usize, brackets: &[(usize, usize, Vec<i64>)]) -> LieTable {
        let mut c = vec![vec![vec![Q::zero(); dim]; dim]; dim];
        for (i, j, v) in brackets {
            for (k, x) in v.iter().enumerate() {
                c[*i][*j][k] = Q::from_int(*x);
                c[*j][*i][k] = Q::from_int(-x);
            }
        }
        LieTable { dim, c }
    }

    pub fn sl2() -> LieTable {
        // e0 = e, e1 = f, e2 = h
        LieTable::from_brackets(3, &[(0, 1, vec![0, 0, 1]), (2, 0, vec![2, 0, 0]), (2, 1, vec![0, -2, 0])])
    }

    pub fn nonabelian2() -> LieTable {
        LieTable::from_brackets(2, &[(0, 1, vec![0, 1])])
    }

    pub fn heisenberg() -> LieTable {
        LieTable::from_brackets(3, &[(0, 1, vec![0, 0, 1])])
    }

    fn bracket(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.dim];
        for (i, a) in x.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in y.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                for (k, o) in out.iter_mut().enumerate() {
                    *o += &(&(a * b) * &self.c[i][j][k]);
                }
            }
        }
        out
    }

    /// Triples `(i, j, k)` whose Jacobi sum is nonzero.
    pub fn jacobi_violations(&self) -> Vec<(usize, usize, usize)> {
        let e = |i: usize| {
            let mut v = vec![Q::zero(); self.dim];
            v[i] = Q::one();
            v
        };
        let mut out = Vec::new();
        for i in 0..self.dim {
            for j in 0..self.dim {
                for k in 0..self.dim {
                    let t1 = self.bracket(&e(i), &self.bracket(&e(j), &e(k)));
                    let t2 = self.bracket(&e(j), &self.bracket(&e(k), &e(i)));
                    let t3 = self.bracket(&e(k), &self.bracket(&e(i), &e(j)));
                    if (0..self.dim).any(|m| !(&(&t1[m] + &t2[m]) + &t3[m]).is_zero()) {
                        out.push((i, j, k));
                    }
                }
            }
        }
        out
    }
}

/// A letter `e_i^(n)`; ordered by index, then by decreasing order.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
struct ALetter(usize, u32);

impl Ord for ALetter {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.0.cmp(&o.0).then_with(|| o.1.cmp(&self.1))
    }
}

impl PartialOrd for ALetter {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}

type APoly = BTreeMap<Vec<ALetter>, Q>;

fn push(p: &mut APoly, w: Vec<ALetter>, c: Q) {
    let s = p.remove(&w).unwrap_or_default() + c;
    if !s.is_zero() {
        p.insert(w, s);
    }
}

/// `x y^(k)` for `x` plain and `x > y` in index.
fn redex(w: &[ALetter]) -> Option<usize> {
    w.windows(2).position(|p| p[0].1 == 0 && p[0].0 > p[1].0)
}

/// `x y^(k) -> y^(k) x + [x,y]^(k) - sum_i C(k,i) (x^(i) y^(k-i) - y^(k-i) x^(i))`.
fn reduce(t: &LieTable, mut f: APoly) -> APoly {
    let mut out = APoly::new();
    while let Some((w, c)) = f.pop_last() {
        let Some(i) = redex(&w) else {
            push(&mut out, w, c);
            continue;
        };
        let (x, y) = (w[i], w[i + 1]);
        let k = y.1;
        let with = |mid: &[ALetter]| [&w[..i], mid, &w[i + 2..]].concat();
        push(&mut f, with(&[y, x]), c.clone());
        for (j, s) in t.c[x.0][y.0].iter().enumerate() {
            push(&mut f, with(&[ALetter(j, k)]), &c * s);
        }
        for m in 1..=k {
            let b = &c * &binomial(k, m);
            push(&mut f, with(&[ALetter(x.0, m), ALetter(y.0, k - m)]), -b.clone());
            push(&mut f, with(&[ALetter(y.0, k - m), ALetter(x.0, m)]), b);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositionFailure {
    pub a: usize,
    pub b: usize,
    pub d: usize,
    pub order: u32,
    pub remainder: String,
}

impl fmt::Display for CompositionFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "e{} e{} e{}^({}) leaves {}",
            self.a, self.b, self.d, self.order, self.remainder
        )
    }
}

/// Compositions of `a b` with `b d^(m)` for `a > b > d`, `m <= max_order`,
/// in the associative envelope; each must reduce to zero.
pub fn check_lemma1(t: &LieTable, max_order: u32) -> Vec<CompositionFailure> {
    let rel = |x: usize, y: ALetter| -> APoly {
        let mut p = APoly::new();
        push(&mut p, vec![ALetter(x, 0), y], Q::one());
        push(&mut p, vec![y, ALetter(x, 0)], -Q::one());
        for (j, s) in t.c[x][y.0].iter().enumerate() {
            push(&mut p, vec![ALetter(j, y.1)], -s.clone());
        }
        for m in 1..=y.1 {
            let b = binomial(y.1, m);
            push(&mut p, vec![ALetter(x, m), ALetter(y.0, y.1 - m)], b.clone());
            push(&mut p, vec![ALetter(y.0, y.1 - m), ALetter(x, m)], -b);
        }
        p
    };
    let mut out = Vec::new();
    for a in 0..t.dim {
        for b in 0..a {
            for d in 0..b {
                for m in 0..=max_order {
                    let dm = ALetter(d, m);
                    let mut s = APoly::new();
                    for (w, c) in rel(a, ALetter(b, 0)) {
                        let mut w = w;
                        w.push(dm);
                        push(&mut s, w, c);
                    }
                    for (w, c) in rel(b, dm) {
                        let mut v = vec![ALetter(a, 0)];
                        v.extend(w);
                        push(&mut s, v, -c);
                    }
                    let r = reduce(t, s);
                    if !r.is_empty() {
                        let remainder = r
                            .iter()
                            .map(|(w, c)| {
                                let w: Vec<String> = w.iter().map(|l| format!("e{}^({})", l.0, l.1)).collect();
                                format!("{c}*{}", w.join(""))
                            })
                            .collect::<Vec<_>>()
                            .join(" + ");
                        out.push(CompositionFailure {
                            a,
                            b,
                            d,
                            order: m,
                            remainder,
                        });
                    }
                }
            }
        }
    }
    out
}
