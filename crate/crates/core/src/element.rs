//! Linear combinations of shuffle tree monomials with rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::coeff::Q;
use crate::order::MonomialOrder;
use crate::tree::{parse_monomial_prefix, Occurrence, ShufflePartition, Signature, TreeError, TreeMonomial};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ElementError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("arity mismatch: {0} vs {1}")]
    Arity(usize, usize),
    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("occurrence does not fit the host monomial")]
    BadOccurrence,
}

/// A homogeneous element of the free shuffle operad. Zero coefficients are
/// never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct OperadElement {
    arity: usize,
    terms: BTreeMap<TreeMonomial, Q>,
}

impl OperadElement {
    pub fn zero(arity: usize) -> Self {
        OperadElement {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(t: TreeMonomial) -> Self {
        Self::term(Q::one(), t)
    }

    pub fn term(c: Q, t: TreeMonomial) -> Self {
        let mut e = Self::zero(t.arity());
        if !c.is_zero() {
            e.terms.insert(t, c);
        }
        e
    }

    /// Sums `(coefficient, monomial)` pairs; all monomials must share an arity.
    pub fn from_terms(arity: usize, terms: impl IntoIterator<Item = (Q, TreeMonomial)>) -> Result<Self, ElementError> {
        let mut e = Self::zero(arity);
        for (c, t) in terms {
            if t.arity() != arity {
                return Err(ElementError::Arity(arity, t.arity()));
            }
            e.add_term(c, t);
        }
        Ok(e)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, t: &TreeMonomial) -> Q {
        self.terms.get(t).cloned().unwrap_or_default()
    }

    /// Terms in structural storage order.
    pub fn iter(&self) -> impl Iterator<Item = (&TreeMonomial, &Q)> {
        self.terms.iter()
    }

    pub fn monomials(&self) -> impl Iterator<Item = &TreeMonomial> {
        self.terms.keys()
    }

    /// Terms sorted by `order`, greatest first.
    pub fn sorted_terms(&self, order: MonomialOrder) -> Vec<(&TreeMonomial, &Q)> {
        let mut v: Vec<_> = self.terms.iter().map(|(t, c)| (order.key(t), t, c)).collect();
        v.sort_by(|a, b| b.0.cmp(&a.0));
        v.into_iter().map(|(_, t, c)| (t, c)).collect()
    }

    pub fn lead(&self, order: MonomialOrder) -> Option<(&TreeMonomial, &Q)> {
        self.terms.iter().max_by(|a, b| order.key(a.0).cmp(&order.key(b.0)))
    }

    pub fn add_term(&mut self, c: Q, t: TreeMonomial) {
        debug_assert_eq!(t.arity(), self.arity);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(t) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add_scaled(&mut self, c: &Q, other: &OperadElement) -> Result<(), ElementError> {
        if other.arity != self.arity {
            return Err(ElementError::Arity(self.arity, other.arity));
        }
        for (t, d) in &other.terms {
            self.add_term(c * d, t.clone());
        }
        Ok(())
    }

    pub fn add(&self, other: &OperadElement) -> Result<OperadElement, ElementError> {
        let mut e = self.clone();
        e.add_scaled(&Q::one(), other)?;
        Ok(e)
    }

    pub fn sub(&self, other: &OperadElement) -> Result<OperadElement, ElementError> {
        let mut e = self.clone();
        e.add_scaled(&Q::from_int(-1), other)?;
        Ok(e)
    }

    pub fn scale(&self, c: &Q) -> OperadElement {
        if c.is_zero() {
            return Self::zero(self.arity);
        }
        OperadElement {
            arity: self.arity,
            terms: self.terms.iter().map(|(t, d)| (t.clone(), c * d)).collect(),
        }
    }

    /// Divides through by the leading coefficient.
    pub fn monic(&self, order: MonomialOrder) -> OperadElement {
        match self.lead(order) {
            Some((_, c)) => self.scale(&c.inv()),
            None => self.clone(),
        }
    }

    /// Bilinear shuffle composition `f ∘_π (g_1, .., g_k)`.
    pub fn shuffle_compose(&self, pi: &ShufflePartition, gs: &[OperadElement]) -> Result<OperadElement, ElementError> {
        if gs.len() != self.arity || pi.blocks().len() != self.arity {
            return Err(ElementError::Arity(self.arity, gs.len()));
        }
        for (b, g) in pi.blocks().iter().zip(gs) {
            if b.len() != g.arity {
                return Err(ElementError::Arity(b.len(), g.arity));
            }
        }
        let mut out = OperadElement::zero(pi.size());
        let lists: Vec<Vec<(&TreeMonomial, &Q)>> = gs.iter().map(|g| g.terms.iter().collect()).collect();
        let refs: Vec<&Vec<(&TreeMonomial, &Q)>> = lists.iter().collect();
        for (f, c) in &self.terms {
            crate::tree::for_each_product(&refs, &mut |choice| {
                let monos: Vec<TreeMonomial> = choice.iter().map(|(t, _)| (*t).clone()).collect();
                let coeff = choice.iter().fold(c.clone(), |acc, (_, d)| &acc * *d);
                let t = f.compose(pi, &monos).expect("shapes checked");
                out.add_term(coeff, t);
            });
        }
        Ok(out)
    }

    /// Replaces the divisor of `host` at `occ` by `replacement`, linearly.
    pub fn graft_at(host: &TreeMonomial, occ: &Occurrence, replacement: &OperadElement) -> Result<OperadElement, ElementError> {
        if occ.hanging.len() != replacement.arity || occ.root >= host.nodes().len() {
            return Err(ElementError::BadOccurrence);
        }
        let mut out = OperadElement::zero(host.arity());
        for (t, c) in &replacement.terms {
            out.add_term(c.clone(), host.graft(occ, t));
        }
        Ok(out)
    }

    pub fn parse(text: &str, sig: &Signature) -> Result<OperadElement, ElementError> {
        parse_element(text, sig)
    }

    pub fn display<'a>(&'a self, sig: &'a Signature, order: MonomialOrder) -> ElementDisplay<'a> {
        ElementDisplay { e: self, sig, order }
    }
}

impl fmt::Debug for OperadElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

pub struct ElementDisplay<'a> {
    e: &'a OperadElement,
    sig: &'a Signature,
    order: MonomialOrder,
}

impl fmt::Display for ElementDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.e.is_zero() {
            return f.write_str("0");
        }
        for (i, (t, c)) in self.e.sorted_terms(self.order).into_iter().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, false) => {}
                (0, true) => f.write_str("-")?,
                (_, false) => f.write_str(" + ")?,
                (_, true) => f.write_str(" - ")?,
            }
            let a = c.abs();
            if a.is_one() {
                write!(f, "{}", t.display(self.sig))?;
            } else {
                write!(f, "{a} {}", t.display(self.sig))?;
            }
        }
        Ok(())
    }
}

fn parse_element(text: &str, sig: &Signature) -> Result<OperadElement, ElementError> {
    let b = text.as_bytes();
    let mut pos = 0;
    let skip = |pos: &mut usize| {
        while *pos < b.len() && b[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    let err = |pos: usize, msg: &str| ElementError::Parse {
        pos,
        msg: msg.to_string(),
    };
    skip(&mut pos);
    if text.trim() == "0" {
        return Err(err(pos, "the zero element has no arity; write at least one term"));
    }
    let mut terms: Vec<(Q, TreeMonomial)> = Vec::new();
    let mut first = true;
    while pos < b.len() {
        let mut sign = Q::one();
        match b[pos] {
            b'+' => {
                pos += 1;
            }
            b'-' => {
                sign = Q::from_int(-1);
                pos += 1;
            }
            _ if first => {}
            _ => return Err(err(pos, "expected `+` or `-`")),
        }
        first = false;
        skip(&mut pos);
        let mut coeff = Q::one();
        if pos < b.len() && b[pos].is_ascii_digit() {
            let start = pos;
            while pos < b.len() && (b[pos].is_ascii_digit() || b[pos] == b'/') {
                pos += 1;
            }
            let lit = &text[start..pos];
            let mut look = pos;
            skip(&mut look);
            let is_coeff = lit.contains('/')
                || (look < b.len() && (b[look] == b'*' || b[look].is_ascii_alphabetic() || b[look] == b'_'));
            if is_coeff {
                coeff = lit.parse().map_err(|_| err(start, "bad coefficient"))?;
                pos = look;
                if pos < b.len() && b[pos] == b'*' {
                    pos += 1;
                    skip(&mut pos);
                }
            } else {
                pos = start;
            }
        }
        if pos >= b.len() {
            return Err(err(pos, "expected a monomial"));
        }
        let (t, end) = parse_monomial_prefix(text, pos, sig).map_err(|e| match e {
            TreeError::Parse { pos, msg } => ElementError::Parse { pos, msg },
            other => ElementError::Tree(other),
        })?;
        t.validate()?;
        pos = end;
        skip(&mut pos);
        terms.push((&sign * &coeff, t));
    }
    if terms.is_empty() {
        return Err(err(0, "empty element"));
    }
    let arity = terms[0].1.arity();
    OperadElement::from_terms(arity, terms)
}
