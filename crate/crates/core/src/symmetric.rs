//! Multilinear identities in the symmetric signature (a Novikov-type product
//! `a o b` and an anticommutative bracket `[a, b]`) and their conversion to
//! shuffle tree polynomials.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::coeff::Q;
use crate::element::OperadElement;
use crate::linalg::RowSpace;
use crate::order::MonomialOrder;
use crate::tree::{Gen, Node, Signature, TreeMonomial};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymmetricError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("identity is not multilinear: variable `{0}` repeats in a term")]
    NotMultilinear(char),
    #[error("terms use different variable sets")]
    Inhomogeneous,
    #[error("conversion dictionary has no image for `{0}`")]
    IncompleteDictionary(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymTree {
    Var(u8),
    /// `l o r`
    Nu(Box<SymTree>, Box<SymTree>),
    /// `[l, r]`
    Mu(Box<SymTree>, Box<SymTree>),
}

impl SymTree {
    fn vars(&self, out: &mut Vec<u8>) {
        match self {
            SymTree::Var(v) => out.push(*v),
            SymTree::Nu(a, b) | SymTree::Mu(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }

    fn uses_nu(&self) -> bool {
        match self {
            SymTree::Var(_) => false,
            SymTree::Nu(..) => true,
            SymTree::Mu(a, b) => a.uses_nu() || b.uses_nu(),
        }
    }

    fn uses_mu(&self) -> bool {
        match self {
            SymTree::Var(_) => false,
            SymTree::Mu(..) => true,
            SymTree::Nu(a, b) => a.uses_mu() || b.uses_mu(),
        }
    }
}

/// A multilinear symmetric identity: a rational combination of symmetric
/// monomials over variables named by lowercase letters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricRelation {
    /// Variable names, indexed by the `u8` in [`SymTree::Var`].
    pub vars: Vec<char>,
    pub terms: BTreeMap<SymTree, Q>,
}

/// Images of the symmetric generators: `a o b` is `nu.0(a b)` when `a`
/// carries the smaller leaf and `nu.1(b a)` otherwise; `[a, b]` is `mu(a b)`
/// or `-mu(b a)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dictionary {
    pub nu: Option<(Gen, Gen)>,
    pub mu: Option<Gen>,
}

impl Dictionary {
    /// `x`, `y`, `z` looked up by name in `sig`; missing names stay unmapped.
    pub fn standard(sig: &Signature) -> Dictionary {
        let nu = match (sig.index_of("x"), sig.index_of("y")) {
            (Some(x), Some(y)) => Some((x, y)),
            _ => None,
        };
        Dictionary {
            nu,
            mu: sig.index_of("z"),
        }
    }
}

impl SymmetricRelation {
    pub fn parse(text: &str) -> Result<SymmetricRelation, SymmetricError> {
        let mut p = SymParser {
            src: text.as_bytes(),
            pos: 0,
            names: BTreeSet::new(),
        };
        // first pass collects variable names so indices follow alphabetical order
        for c in text.chars() {
            if c.is_ascii_lowercase() && c != 'o' {
                p.names.insert(c);
            }
        }
        let vars: Vec<char> = p.names.iter().copied().collect();
        let lhs = p.sum(&vars)?;
        p.ws();
        let lin = if p.peek() == Some(b'=') {
            p.pos += 1;
            let rhs = p.sum(&vars)?;
            lin_add(lhs, &rhs, &Q::from_int(-1))
        } else {
            lhs
        };
        p.ws();
        if p.pos != p.src.len() {
            return Err(p.err("trailing input"));
        }
        let rel = SymmetricRelation { vars, terms: lin };
        rel.check_multilinear()?;
        Ok(rel)
    }

    fn check_multilinear(&self) -> Result<(), SymmetricError> {
        let mut expected: Option<Vec<u8>> = None;
        for t in self.terms.keys() {
            let mut vs = Vec::new();
            t.vars(&mut vs);
            vs.sort_unstable();
            if let Some(w) = vs.windows(2).find(|w| w[0] == w[1]) {
                return Err(SymmetricError::NotMultilinear(self.vars[w[0] as usize]));
            }
            match &expected {
                None => expected = Some(vs),
                Some(e) if *e != vs => return Err(SymmetricError::Inhomogeneous),
                _ => {}
            }
        }
        Ok(())
    }

    pub fn degree(&self) -> usize {
        self.vars.len()
    }

    /// Shuffle image of the identity with variable `i` placed at leaf `labels[i]`.
    pub fn to_shuffle(&self, labels: &[u8], dict: &Dictionary) -> Result<OperadElement, SymmetricError> {
        let mut out = OperadElement::zero(self.vars.len());
        for (t, c) in &self.terms {
            let (nodes, sign) = convert(t, labels, dict)?;
            out.add_term(c * &Q::from_int(sign), TreeMonomial::from_nodes_unchecked(nodes));
        }
        Ok(out)
    }
}

fn lin_add(mut a: BTreeMap<SymTree, Q>, b: &BTreeMap<SymTree, Q>, c: &Q) -> BTreeMap<SymTree, Q> {
    for (t, d) in b {
        let s = a.get(t).cloned().unwrap_or_default() + c * d;
        if s.is_zero() {
            a.remove(t);
        } else {
            a.insert(t.clone(), s);
        }
    }
    a
}

fn lin_product(a: &BTreeMap<SymTree, Q>, b: &BTreeMap<SymTree, Q>, bracket: bool) -> BTreeMap<SymTree, Q> {
    let mut out = BTreeMap::new();
    for (s, c) in a {
        for (t, d) in b {
            let prod = if bracket {
                SymTree::Mu(Box::new(s.clone()), Box::new(t.clone()))
            } else {
                SymTree::Nu(Box::new(s.clone()), Box::new(t.clone()))
            };
            let mut single = BTreeMap::new();
            single.insert(prod, c * d);
            out = lin_add(out, &single, &Q::one());
        }
    }
    out
}

fn min_leaf(nodes: &[Node]) -> u8 {
    nodes
        .iter()
        .filter_map(|n| match n {
            Node::Leaf(l) => Some(*l),
            _ => None,
        })
        .min()
        .expect("nonempty")
}

fn convert(t: &SymTree, labels: &[u8], dict: &Dictionary) -> Result<(Vec<Node>, i64), SymmetricError> {
    match t {
        SymTree::Var(v) => Ok((vec![Node::Leaf(labels[*v as usize])], 1)),
        SymTree::Nu(a, b) | SymTree::Mu(a, b) => {
            let (na, sa) = convert(a, labels, dict)?;
            let (nb, sb) = convert(b, labels, dict)?;
            let ordered = min_leaf(&na) < min_leaf(&nb);
            let (gen, sign) = match t {
                SymTree::Nu(..) => {
                    let (x, y) = dict.nu.ok_or(SymmetricError::IncompleteDictionary("o"))?;
                    (if ordered { x } else { y }, 1)
                }
                _ => {
                    let z = dict.mu.ok_or(SymmetricError::IncompleteDictionary("[,]"))?;
                    (z, if ordered { 1 } else { -1 })
                }
            };
            let mut nodes = vec![Node::Op { gen, arity: 2 }];
            if ordered {
                nodes.extend(na);
                nodes.extend(nb);
            } else {
                nodes.extend(nb);
                nodes.extend(na);
            }
            Ok((nodes, sa * sb * sign))
        }
    }
}

/// The orbit of `rel` under all relabelings, reduced to a linearly
/// independent list. Relabelings are visited in lexicographic order of the
/// tuple (leaf of the first variable, leaf of the second, ..), and an image
/// is kept when it is not in the span of those kept before it.
pub fn symmetric_to_shuffle(rel: &SymmetricRelation, dict: &Dictionary) -> Result<Vec<OperadElement>, SymmetricError> {
    for t in rel.terms.keys() {
        if t.uses_nu() && dict.nu.is_none() {
            return Err(SymmetricError::IncompleteDictionary("o"));
        }
        if t.uses_mu() && dict.mu.is_none() {
            return Err(SymmetricError::IncompleteDictionary("[,]"));
        }
    }
    let n = rel.degree();
    let mut space = RowSpace::new(MonomialOrder::PathLex);
    let mut out = Vec::new();
    for labels in lex_permutations(n) {
        let e = rel.to_shuffle(&labels, dict)?;
        if space.insert(&e) {
            out.push(e);
        }
    }
    Ok(out)
}

/// Every shuffle image of `rel`, one per relabeling, in lexicographic order.
pub fn full_orbit(rel: &SymmetricRelation, dict: &Dictionary) -> Result<Vec<OperadElement>, SymmetricError> {
    lex_permutations(rel.degree())
        .into_iter()
        .map(|l| rel.to_shuffle(&l, dict))
        .collect()
}

/// Permutations of `1..=n` in lexicographic order.
pub fn lex_permutations(n: usize) -> Vec<Vec<u8>> {
    let mut cur: Vec<u8> = (1..=n as u8).collect();
    let mut out = vec![cur.clone()];
    loop {
        let Some(i) = (1..cur.len()).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..cur.len()).rev().find(|&j| cur[j] > cur[i - 1]).expect("exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}

impl fmt::Display for SymmetricRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &SymTree, vars: &[char], top: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match t {
                SymTree::Var(v) => write!(f, "{}", vars[*v as usize]),
                SymTree::Mu(a, b) => {
                    f.write_str("[")?;
                    go(a, vars, true, f)?;
                    f.write_str(", ")?;
                    go(b, vars, true, f)?;
                    f.write_str("]")
                }
                SymTree::Nu(a, b) => {
                    if !top {
                        f.write_str("(")?;
                    }
                    go(a, vars, false, f)?;
                    f.write_str(" o ")?;
                    go(b, vars, false, f)?;
                    if !top {
                        f.write_str(")")?;
                    }
                    Ok(())
                }
            }
        }
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (t, c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if i > 0 || c.is_negative() {
                write!(f, "{}{}", if i > 0 { " " } else { "" }, sign)?;
                if i > 0 {
                    f.write_str(" ")?;
                }
            }
            if !c.abs().is_one() {
                write!(f, "{}*", c.abs())?;
            }
            go(t, &self.vars, true, f)?;
        }
        Ok(())
    }
}

struct SymParser<'a> {
    src: &'a [u8],
    pos: usize,
    names: BTreeSet<char>,
}

type Lin = BTreeMap<SymTree, Q>;

impl SymParser<'_> {
    fn err(&self, msg: &str) -> SymmetricError {
        SymmetricError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn sum(&mut self, vars: &[char]) -> Result<Lin, SymmetricError> {
        let mut acc = Lin::new();
        let mut first = true;
        loop {
            self.ws();
            let mut sign = Q::one();
            match self.peek() {
                Some(b'+') => self.pos += 1,
                Some(b'-') => {
                    sign = Q::from_int(-1);
                    self.pos += 1;
                }
                _ if first => {}
                _ => return Ok(acc),
            }
            first = false;
            self.ws();
            let mut coeff = Q::one();
            if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit() || c == b'/') {
                    self.pos += 1;
                }
                let lit = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                coeff = lit.parse().map_err(|_| self.err("bad coefficient"))?;
                self.ws();
                if self.peek() == Some(b'*') {
                    self.pos += 1;
                }
            }
            let t = self.product(vars)?;
            acc = lin_add(acc, &t, &(&sign * &coeff));
        }
    }

    fn product(&mut self, vars: &[char]) -> Result<Lin, SymmetricError> {
        let left = self.atom(vars)?;
        self.ws();
        if self.is_circ() {
            self.eat_circ();
            let right = self.atom(vars)?;
            self.ws();
            if self.is_circ() {
                return Err(self.err("ambiguous chain of `o`; add parentheses"));
            }
            return Ok(lin_product(&left, &right, false));
        }
        Ok(left)
    }

    fn is_circ(&self) -> bool {
        match self.peek() {
            Some(b'o') => !self.src.get(self.pos + 1).is_some_and(|c| c.is_ascii_alphanumeric()),
            Some(0xE2) => self.src[self.pos..].starts_with("∘".as_bytes()),
            _ => false,
        }
    }

    fn eat_circ(&mut self) {
        if self.peek() == Some(b'o') {
            self.pos += 1;
        } else {
            self.pos += "∘".len();
        }
    }

    fn atom(&mut self, vars: &[char]) -> Result<Lin, SymmetricError> {
        self.ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.sum(vars)?;
                self.ws();
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'[') => {
                self.pos += 1;
                let a = self.sum(vars)?;
                self.ws();
                if self.peek() != Some(b',') {
                    return Err(self.err("expected `,`"));
                }
                self.pos += 1;
                let b = self.sum(vars)?;
                self.ws();
                if self.peek() != Some(b']') {
                    return Err(self.err("expected `]`"));
                }
                self.pos += 1;
                Ok(lin_product(&a, &b, true))
            }
            Some(c) if c.is_ascii_lowercase() && c != b'o' => {
                self.pos += 1;
                let idx = vars.iter().position(|&v| v == c as char).expect("collected") as u8;
                let mut l = Lin::new();
                l.insert(SymTree::Var(idx), Q::one());
                Ok(l)
            }
            _ => Err(self.err("expected a variable, `(` or `[`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xyz() -> Signature {
        Signature::binary(&["x", "y", "z"])
    }

    #[test]
    fn parse_and_expand() {
        let r = SymmetricRelation::parse("([a, b o c] - [b, a o c]) o d").unwrap();
        assert_eq!(r.terms.len(), 2);
        assert_eq!(r.vars, vec!['a', 'b', 'c', 'd']);
        assert!(SymmetricRelation::parse("a o b o c").is_err());
        assert!(matches!(SymmetricRelation::parse("[a, a o b]"), Err(SymmetricError::NotMultilinear('a'))));
        assert!(matches!(SymmetricRelation::parse("a o b - a"), Err(SymmetricError::Inhomogeneous)));
    }

    #[test]
    fn conversion_rules() {
        let sig = xyz();
        let d = Dictionary::standard(&sig);
        let r = SymmetricRelation::parse("(b o a) o c").unwrap();
        let e = r.to_shuffle(&[1, 2, 3], &d).unwrap();
        assert_eq!(e, OperadElement::parse("x(y(1 2) 3)", &sig).unwrap());
        let r = SymmetricRelation::parse("[c, b o a]").unwrap();
        let e = r.to_shuffle(&[1, 2, 3], &d).unwrap();
        assert_eq!(e, OperadElement::parse("-z(y(1 2) 3)", &sig).unwrap());
    }

    #[test]
    fn jacobi_orbit_collapses() {
        let sig = xyz();
        let r = SymmetricRelation::parse("[[a,b],c] - [a,[b,c]] - [[a,c],b]").unwrap();
        let out = symmetric_to_shuffle(&r, &Dictionary::standard(&sig)).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0], OperadElement::parse("z(z(1 2) 3) - z(1 z(2 3)) - z(z(1 3) 2)", &sig).unwrap());
    }

    #[test]
    fn missing_dictionary_entry() {
        let sig = Signature::binary(&["z"]);
        let r = SymmetricRelation::parse("a o b").unwrap();
        assert!(matches!(
            symmetric_to_shuffle(&r, &Dictionary::standard(&sig)),
            Err(SymmetricError::IncompleteDictionary(_))
        ));
    }

    #[test]
    fn lex_permutation_order() {
        assert_eq!(lex_permutations(3), vec![
            vec![1, 2, 3], vec![1, 3, 2], vec![2, 1, 3],
            vec![2, 3, 1], vec![3, 1, 2], vec![3, 2, 1]
        ]);
        assert_eq!(lex_permutations(5).len(), 120);
    }
}
