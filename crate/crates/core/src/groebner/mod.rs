//! Operadic Gröbner bases: rewriting to normal form, S-polynomials,
//! arity-stratified completion and basis files.

mod engine;
mod persist;

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use thiserror::Error;

use crate::coeff::Q;
use crate::element::OperadElement;
use crate::order::{MonomialOrder, OrderKey};
use crate::tree::{overlaps, shuffle_partitions, Occurrence, PatternIndex, Signature, TreeMonomial};

pub use engine::{buchberger, buchberger_with, CompletionOptions, CompletionStats, LevelStats};
pub use persist::{load_basis, parse_basis, save_basis, BASIS_FORMAT_VERSION};

#[derive(Debug, Error)]
pub enum GroebnerError {
    #[error("arity {arity} exceeds the completed range (max arity {max})")]
    ArityExceeded { arity: usize, max: usize },
    #[error("basis was computed under order `{basis}`, request uses `{requested}`")]
    OrderMismatch { basis: String, requested: String },
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("unsupported presentation: {0}")]
    Unsupported(String),
    #[error("basis file line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("basis file checksum mismatch")]
    Checksum,
    #[error("unsupported basis format version `{0}`")]
    Version(String),
    #[error("basis is not interreduced: {0}")]
    NotInterreduced(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// `lead -> tail`: the relation `lead - tail` with `lead` above every tail
/// monomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteRule {
    pub lead: TreeMonomial,
    pub tail: OperadElement,
}

impl RewriteRule {
    pub fn polynomial(&self) -> OperadElement {
        let mut e = OperadElement::monomial(self.lead.clone());
        e.add_scaled(&Q::from_int(-1), &self.tail).expect("same arity");
        e
    }

    pub fn arity(&self) -> usize {
        self.lead.arity()
    }
}

#[derive(Debug, Clone)]
pub struct GroebnerBasis {
    presentation_name: String,
    signature: Signature,
    order: MonomialOrder,
    max_arity: usize,
    rules: Vec<RewriteRule>,
    index: PatternIndex<usize>,
}

impl PartialEq for GroebnerBasis {
    fn eq(&self, other: &Self) -> bool {
        self.presentation_name == other.presentation_name
            && self.signature == other.signature
            && self.order == other.order
            && self.max_arity == other.max_arity
            && self.rules == other.rules
    }
}

impl GroebnerBasis {
    /// Assembles a basis; rules are sorted by arity, then by lead descending.
    pub fn new(
        presentation_name: impl Into<String>,
        signature: Signature,
        order: MonomialOrder,
        max_arity: usize,
        mut rules: Vec<RewriteRule>,
    ) -> Self {
        rules.sort_by(|a, b| {
            a.arity()
                .cmp(&b.arity())
                .then_with(|| order.key(&b.lead).cmp(&order.key(&a.lead)))
        });
        let mut index = PatternIndex::default();
        for (i, r) in rules.iter().enumerate() {
            index.insert(r.lead.clone(), i);
        }
        GroebnerBasis {
            presentation_name: presentation_name.into(),
            signature,
            order,
            max_arity,
            rules,
            index,
        }
    }

    pub fn presentation_name(&self) -> &str {
        &self.presentation_name
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn max_arity(&self) -> usize {
        self.max_arity
    }

    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    pub fn rules_of_arity(&self, n: usize) -> impl Iterator<Item = &RewriteRule> {
        self.rules.iter().filter(move |r| r.arity() == n)
    }

    pub fn rule_counts(&self) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for r in &self.rules {
            *m.entry(r.arity()).or_insert(0) += 1;
        }
        m
    }

    pub(crate) fn index(&self) -> &PatternIndex<usize> {
        &self.index
    }

    fn check_arity(&self, n: usize) -> Result<(), GroebnerError> {
        if n > self.max_arity {
            return Err(GroebnerError::ArityExceeded {
                arity: n,
                max: self.max_arity,
            });
        }
        Ok(())
    }

    /// The first divisor of `t` among the rule leads, in preorder.
    pub fn first_divisor(&self, t: &TreeMonomial) -> Option<(usize, Occurrence)> {
        self.index.first_match(t).map(|(&i, o)| (i, o))
    }

    /// Every divisor of `t` among the rule leads.
    pub fn divisors(&self, t: &TreeMonomial) -> Vec<(usize, Occurrence)> {
        self.index.matches(t).into_iter().map(|(&i, o)| (i, o)).collect()
    }

    pub fn is_normal(&self, t: &TreeMonomial) -> bool {
        self.first_divisor(t).is_none()
    }

    /// Normal form, always rewriting the greatest reducible monomial at its
    /// first divisor.
    pub fn reduce(&self, f: &OperadElement) -> Result<OperadElement, GroebnerError> {
        self.check_arity(f.arity())?;
        let mut work = Work::new(self.order, f);
        let mut out = OperadElement::zero(f.arity());
        while let Some((t, c)) = work.pop_greatest() {
            match self.first_divisor(&t) {
                None => out.add_term(c, t),
                Some((rid, occ)) => work.rewrite(&t, &c, &occ, &self.rules[rid].tail),
            }
        }
        Ok(out)
    }

    /// Like [`reduce`](Self::reduce) but refuses a request tagged with another order.
    pub fn reduce_as(&self, f: &OperadElement, order: MonomialOrder) -> Result<OperadElement, GroebnerError> {
        if order != self.order {
            return Err(GroebnerError::OrderMismatch {
                basis: self.order.id().into(),
                requested: order.id().into(),
            });
        }
        self.reduce(f)
    }

    /// Normal form reached by rewriting a random reducible monomial at a
    /// random divisor at every step.
    pub fn reduce_randomized<R: Rng>(&self, f: &OperadElement, rng: &mut R) -> Result<OperadElement, GroebnerError> {
        self.check_arity(f.arity())?;
        let mut work = Work::new(self.order, f);
        let mut divisors: HashMap<TreeMonomial, Vec<(usize, Occurrence)>> = HashMap::new();
        loop {
            let reducible: Vec<OrderKey> = work
                .terms
                .iter()
                .filter(|(_, (t, _))| {
                    !divisors
                        .entry(t.clone())
                        .or_insert_with(|| self.divisors(t))
                        .is_empty()
                })
                .map(|(k, _)| k.clone())
                .collect();
            if reducible.is_empty() {
                break;
            }
            let key = &reducible[rng.gen_range(0..reducible.len())];
            let (t, c) = work.terms.remove(key).expect("present");
            let ds = &divisors[&t];
            let (rid, occ) = &ds[rng.gen_range(0..ds.len())];
            work.rewrite(&t, &c, occ, &self.rules[*rid].tail);
        }
        OperadElement::from_terms(f.arity(), work.terms.into_values().map(|(t, c)| (c, t)))
            .map_err(|e| GroebnerError::Unsupported(e.to_string()))
    }

    /// All normal monomials of arity `n`, built root-first from normal children.
    pub fn normal_monomials(&self, n: usize) -> Result<Vec<TreeMonomial>, GroebnerError> {
        self.check_arity(n)?;
        if self.signature.generators().iter().any(|g| g.arity < 2) {
            return Err(GroebnerError::Unsupported("unary generators".into()));
        }
        let mut table: Vec<Vec<TreeMonomial>> = vec![Vec::new(), vec![TreeMonomial::identity()]];
        for k in 2..=n {
            let mut level = Vec::new();
            for g in 0..self.signature.len() as u8 {
                let a = self.signature.arity(g);
                for pi in shuffle_partitions(k, a as usize) {
                    let lists: Vec<&Vec<TreeMonomial>> = pi.blocks().iter().map(|b| &table[b.len()]).collect();
                    crate::tree::for_each_product(&lists, &mut |children| {
                        let m = TreeMonomial::graft_root(g, a, &pi, children);
                        if self.index.matches_at(&m, 0).is_empty() {
                            level.push(m);
                        }
                    });
                }
            }
            table.push(level);
        }
        Ok(table.swap_remove(n))
    }

    /// Checks the interreduction invariant and that every tail sits below its lead.
    pub fn check_interreduced(&self) -> Result<(), GroebnerError> {
        for (i, r) in self.rules.iter().enumerate() {
            for (j, _) in self.divisors(&r.lead) {
                if j != i {
                    return Err(GroebnerError::NotInterreduced(format!(
                        "lead of rule {i} is divisible by lead of rule {j}"
                    )));
                }
            }
            let lk = self.order.key(&r.lead);
            for t in r.tail.monomials() {
                if !self.is_normal(t) {
                    return Err(GroebnerError::NotInterreduced(format!("tail of rule {i} is reducible")));
                }
                if self.order.key(t) >= lk {
                    return Err(GroebnerError::NotInterreduced(format!("tail of rule {i} is not below its lead")));
                }
            }
        }
        Ok(())
    }
}

/// S-polynomials of two rules: for each overlap of their leads, the
/// difference of the two one-step rewrites.
pub fn s_polynomials(r1: &RewriteRule, r2: &RewriteRule, max_arity: usize) -> Vec<OperadElement> {
    overlaps(&r1.lead, &r2.lead, max_arity)
        .into_iter()
        .map(|o| {
            let a = OperadElement::graft_at(&o.monomial, &o.first, &r1.tail).expect("valid occurrence");
            let b = OperadElement::graft_at(&o.monomial, &o.second, &r2.tail).expect("valid occurrence");
            a.sub(&b).expect("same arity")
        })
        .collect()
}

/// Working polynomial keyed by monomial order.
struct Work {
    order: MonomialOrder,
    terms: BTreeMap<OrderKey, (TreeMonomial, Q)>,
}

impl Work {
    fn new(order: MonomialOrder, f: &OperadElement) -> Self {
        Work {
            order,
            terms: f.iter().map(|(t, c)| (order.key(t), (t.clone(), c.clone()))).collect(),
        }
    }

    fn pop_greatest(&mut self) -> Option<(TreeMonomial, Q)> {
        self.terms.pop_last().map(|(_, v)| v)
    }

    fn add(&mut self, t: TreeMonomial, c: Q) {
        let k = self.order.key(&t);
        match self.terms.entry(k) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert((t, c));
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = &o.get().1 + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    o.get_mut().1 = s;
                }
            }
        }
    }

    /// Replaces `c * t` by `c * graft(t, occ, tail)`.
    fn rewrite(&mut self, t: &TreeMonomial, c: &Q, occ: &Occurrence, tail: &OperadElement) {
        for (s, d) in tail.iter() {
            self.add(t.graft(occ, s), c * d);
        }
    }
}
