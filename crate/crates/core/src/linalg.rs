//! Exact sparse row reduction.

use std::collections::{BTreeMap, HashMap};

use crate::coeff::Q;
use crate::element::OperadElement;
use crate::order::{MonomialOrder, OrderKey};
use crate::tree::TreeMonomial;

/// Sparse vector over column indices, sorted by index. Column 0 is the
/// greatest monomial, so the leading entry is the first one.
pub type SparseVec = Vec<(u32, Q)>;

/// `a + c * b`.
pub fn axpy(a: &[(u32, Q)], c: &Q, b: &[(u32, Q)]) -> SparseVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, c * &b[j].1));
            j += 1;
        } else {
            let s = &a[i].1 + &(c * &b[j].1);
            if !s.is_zero() {
                out.push((a[i].0, s));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn scale(v: &[(u32, Q)], c: &Q) -> SparseVec {
    v.iter().map(|(i, x)| (*i, c * x)).collect()
}

/// Accumulates `c * v` into a dense-keyed map; cheaper than repeated merges
/// when many vectors are summed.
pub fn accumulate(acc: &mut HashMap<u32, Q>, c: &Q, v: &[(u32, Q)]) {
    for (i, x) in v {
        let e = acc.entry(*i).or_default();
        *e = &*e + &(c * x);
    }
}

pub fn from_map(acc: HashMap<u32, Q>) -> SparseVec {
    let mut v: SparseVec = acc.into_iter().filter(|(_, x)| !x.is_zero()).collect();
    v.sort_unstable_by_key(|e| e.0);
    v
}

/// Row echelon form keyed by pivot column; rows are monic.
#[derive(Debug, Clone, Default)]
pub struct Echelon {
    rows: HashMap<u32, SparseVec>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = &u32> {
        self.rows.keys()
    }

    pub fn row(&self, pivot: u32) -> Option<&SparseVec> {
        self.rows.get(&pivot)
    }

    /// Eliminates every pivot column from `v`.
    pub fn reduce(&self, mut v: SparseVec) -> SparseVec {
        let mut k = 0;
        while k < v.len() {
            let col = v[k].0;
            if let Some(row) = self.rows.get(&col) {
                let c = -&v[k].1;
                v = axpy(&v, &c, row);
            } else {
                k += 1;
            }
        }
        v
    }

    /// Adds `v` to the span; returns the new pivot if `v` was independent.
    pub fn insert(&mut self, v: SparseVec) -> Option<u32> {
        let v = self.reduce(v);
        let (col, lead) = v.first()?.clone();
        let v = scale(&v, &lead.inv());
        self.rows.insert(col, v);
        Some(col)
    }

    /// Back-substitution so no row contains another row's pivot.
    pub fn interreduce(&mut self) {
        let mut piv: Vec<u32> = self.rows.keys().copied().collect();
        // largest column index first: those rows only involve smaller monomials
        piv.sort_unstable_by(|a, b| b.cmp(a));
        let mut done: HashMap<u32, SparseVec> = HashMap::with_capacity(piv.len());
        for p in piv {
            let row = self.rows.remove(&p).expect("pivot row");
            let mut v = row;
            let mut k = 1;
            while k < v.len() {
                let col = v[k].0;
                if let Some(r) = done.get(&col) {
                    let c = -&v[k].1;
                    v = axpy(&v, &c, r);
                } else {
                    k += 1;
                }
            }
            done.insert(p, v);
        }
        self.rows = done;
    }

    pub fn into_rows(self) -> HashMap<u32, SparseVec> {
        self.rows
    }
}

/// Span of operad elements with membership tests, pivots chosen by `order`.
#[derive(Debug, Clone)]
pub struct RowSpace {
    order: MonomialOrder,
    rows: BTreeMap<OrderKey, (TreeMonomial, OperadElement)>,
}

impl RowSpace {
    pub fn new(order: MonomialOrder) -> Self {
        RowSpace {
            order,
            rows: BTreeMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Remainder of `e` after eliminating every pivot monomial.
    pub fn reduce(&self, e: &OperadElement) -> OperadElement {
        let mut work: BTreeMap<OrderKey, (TreeMonomial, Q)> = e
            .iter()
            .map(|(t, c)| (self.order.key(t), (t.clone(), c.clone())))
            .collect();
        let mut cursor: Option<OrderKey> = None;
        loop {
            let next = match &cursor {
                None => work.keys().next_back().cloned(),
                Some(k) => work.range(..k.clone()).next_back().map(|(k, _)| k.clone()),
            };
            let Some(key) = next else { break };
            if let Some((_, row)) = self.rows.get(&key) {
                let c = work[&key].1.clone();
                for (t, d) in row.iter() {
                    let k = self.order.key(t);
                    let entry = work.entry(k.clone()).or_insert_with(|| (t.clone(), Q::zero()));
                    entry.1 = &entry.1 - &(&c * d);
                    if entry.1.is_zero() {
                        work.remove(&k);
                    }
                }
            }
            cursor = Some(key);
        }
        OperadElement::from_terms(e.arity(), work.into_values().map(|(t, c)| (c, t))).expect("same arity")
    }

    pub fn contains(&self, e: &OperadElement) -> bool {
        self.reduce(e).is_zero()
    }

    /// Returns whether `e` enlarged the span.
    pub fn insert(&mut self, e: &OperadElement) -> bool {
        let r = self.reduce(e);
        let Some((lead, _)) = r.lead(self.order) else {
            return false;
        };
        let lead = lead.clone();
        let r = r.monic(self.order);
        self.rows.insert(self.order.key(&lead), (lead, r));
        true
    }

    pub fn rows(&self) -> impl Iterator<Item = &OperadElement> {
        self.rows.values().map(|(_, e)| e)
    }
}
