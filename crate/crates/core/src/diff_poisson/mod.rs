//! Differential Poisson envelopes of free GD-algebras.
//!
//! Letters are elements of a basis `B` of the free GD-algebra: normal gd
//! monomials over a set of atomic variables. A differential letter `b^(n)`
//! is a letter with a derivative order, Lie words are bracket trees of
//! differential letters and a differential monomial is a commutative product
//! of Lie words. Juxtaposition `a b'` stands for the GD product `a o b` and
//! the Poisson bracket `{a, b}` of two plain letters is the GD bracket.

mod ambiguity;
mod lyndon;
mod rewrite;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::coeff::Q;
use crate::element::OperadElement;
use crate::groebner::{GroebnerBasis, GroebnerError};
use crate::symmetric::Dictionary;
use crate::tree::{Node, ShufflePartition, TreeMonomial};

pub use ambiguity::{candidate_monomials, enumerate_ambiguities, rule_applications, Ambiguity, Residue};
pub use lyndon::{check_lemma1, is_ls_word, is_reduced, ls_basis, standard_bracketing, CompositionFailure, LieTable};
pub use rewrite::{DiffRule, RuleApp, TraceStep};

/// Highest degree the ambiguity machinery is set up for.
pub const MAX_DEGREE: usize = 5;

#[derive(Debug, Error)]
pub enum DiffError {
    #[error("expected weight -1, found {0}")]
    Weight(i64),
    #[error("variable {0} occurs twice")]
    NotMultilinear(u8),
    #[error("degree {degree} is above the supported ceiling {max}")]
    Degree { degree: usize, max: usize },
    #[error("rule {0} does not apply here")]
    NotApplicable(String),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
}

/// An element of `B`: a gd-normal monomial whose leaves are the atomic
/// variables `labels` (sorted).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Letter {
    labels: Vec<u8>,
    tree: TreeMonomial,
}

impl Letter {
    pub fn atom(label: u8) -> Letter {
        Letter {
            labels: vec![label],
            tree: TreeMonomial::identity(),
        }
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn tree(&self) -> &TreeMonomial {
        &self.tree
    }

    pub fn is_atom(&self) -> bool {
        self.labels.len() == 1
    }
}

/// Atoms compare by label; larger letters come after smaller ones.
impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.labels
            .len()
            .cmp(&other.labels.len())
            .then_with(|| self.labels.cmp(&other.labels))
            .then_with(|| self.tree.cmp(&other.tree))
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

fn var_name(label: u8) -> String {
    if (1..=26).contains(&label) {
        ((b'a' + label - 1) as char).to_string()
    } else {
        format!("x{label}")
    }
}

/// Renders gd generators in the symmetric signature: `x(A B)` is `A∘B`,
/// `y(A B)` is `B∘A`, `z(A B)` is `[A,B]`.
fn render_tree(nodes: &[Node], i: usize, labels: &[u8], out: &mut String) -> usize {
    match nodes[i] {
        Node::Leaf(l) => {
            out.push_str(&var_name(labels[l as usize - 1]));
            i + 1
        }
        Node::Op { gen, .. } => {
            let mut a = String::new();
            let mut b = String::new();
            let j = render_tree(nodes, i + 1, labels, &mut a);
            let k = render_tree(nodes, j, labels, &mut b);
            let wrap = |s: String, at: usize| match nodes[at] {
                Node::Op { gen: 0 | 1, .. } => format!("({s})"),
                _ => s,
            };
            match gen {
                0 => out.push_str(&format!("{}∘{}", wrap(a, i + 1), wrap(b, j))),
                1 => out.push_str(&format!("{}∘{}", wrap(b, j), wrap(a, i + 1))),
                _ => out.push_str(&format!("[{a},{b}]")),
            }
            k
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        render_tree(self.tree.nodes(), 0, &self.labels, &mut s);
        f.write_str(&s)
    }
}

/// `b^(n)`. Ordered by `(b, -n)`: a higher derivative of the same letter is smaller.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DiffGenerator {
    pub base: Letter,
    pub order: u32,
}

impl DiffGenerator {
    pub fn new(base: Letter, order: u32) -> Self {
        DiffGenerator { base, order }
    }

    pub fn atom(label: u8, order: u32) -> Self {
        DiffGenerator::new(Letter::atom(label), order)
    }

    /// `wt(b^(n)) = n - 1`.
    pub fn weight(&self) -> i64 {
        self.order as i64 - 1
    }
}

impl Ord for DiffGenerator {
    fn cmp(&self, other: &Self) -> Ordering {
        self.base.cmp(&other.base).then_with(|| other.order.cmp(&self.order))
    }
}

impl PartialOrd for DiffGenerator {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DiffGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = self.base.to_string();
        let composite = !self.base.is_atom() && self.order > 0 && !base.starts_with('[');
        if composite {
            write!(f, "({base})")?;
        } else {
            f.write_str(&base)?;
        }
        match self.order {
            0..=3 => f.write_str(&"'".repeat(self.order as usize)),
            n => write!(f, "^({n})"),
        }
    }
}

impl fmt::Debug for DiffGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A Lie word in differential letters; `Bracket(u, v)` is `{u, v}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Lie {
    Gen(DiffGenerator),
    Bracket(Box<Lie>, Box<Lie>),
}

impl Lie {
    pub fn atom(label: u8, order: u32) -> Lie {
        Lie::Gen(DiffGenerator::atom(label, order))
    }

    pub fn bracket(u: Lie, v: Lie) -> Lie {
        Lie::Bracket(Box::new(u), Box::new(v))
    }

    /// Total derivative order.
    pub fn derivs(&self) -> u32 {
        match self {
            Lie::Gen(g) => g.order,
            Lie::Bracket(u, v) => u.derivs() + v.derivs(),
        }
    }

    /// Number of differential letters.
    pub fn len(&self) -> usize {
        match self {
            Lie::Gen(_) => 1,
            Lie::Bracket(u, v) => u.len() + v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `wt(u') = wt(u) + 1`, `wt({u, v}) = wt(u) + wt(v) + 1`.
    pub fn weight(&self) -> i64 {
        match self {
            Lie::Gen(g) => g.weight(),
            Lie::Bracket(u, v) => u.weight() + v.weight() + 1,
        }
    }

    pub fn plain(&self) -> Option<&Letter> {
        match self {
            Lie::Gen(g) if g.order == 0 => Some(&g.base),
            _ => None,
        }
    }

    pub fn generators(&self) -> Vec<&DiffGenerator> {
        let mut out = Vec::new();
        fn walk<'a>(t: &'a Lie, out: &mut Vec<&'a DiffGenerator>) {
            match t {
                Lie::Gen(g) => out.push(g),
                Lie::Bracket(u, v) => {
                    walk(u, out);
                    walk(v, out);
                }
            }
        }
        walk(self, &mut out);
        out
    }

    /// Subterm at `path` (`false` = left, `true` = right).
    pub fn at(&self, path: &[bool]) -> Option<&Lie> {
        match (self, path.split_first()) {
            (_, None) => Some(self),
            (Lie::Bracket(u, v), Some((&side, rest))) => if side { v } else { u }.at(rest),
            _ => None,
        }
    }

    pub(crate) fn replace(&self, path: &[bool], with: Lie) -> Lie {
        match (self, path.split_first()) {
            (_, None) => with,
            (Lie::Bracket(u, v), Some((&side, rest))) => {
                if side {
                    Lie::Bracket(u.clone(), Box::new(v.replace(rest, with)))
                } else {
                    Lie::Bracket(Box::new(u.replace(rest, with)), v.clone())
                }
            }
            _ => panic!("path leaves the tree"),
        }
    }

    /// Paths to every bracket node, preorder.
    pub fn bracket_paths(&self) -> Vec<Vec<bool>> {
        let mut out = Vec::new();
        fn walk(t: &Lie, cur: &mut Vec<bool>, out: &mut Vec<Vec<bool>>) {
            if let Lie::Bracket(u, v) = t {
                out.push(cur.clone());
                cur.push(false);
                walk(u, cur, out);
                cur.pop();
                cur.push(true);
                walk(v, cur, out);
                cur.pop();
            }
        }
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    /// Paths to every letter, preorder.
    pub fn leaf_paths(&self) -> Vec<Vec<bool>> {
        let mut out = Vec::new();
        fn walk(t: &Lie, cur: &mut Vec<bool>, out: &mut Vec<Vec<bool>>) {
            match t {
                Lie::Gen(_) => out.push(cur.clone()),
                Lie::Bracket(u, v) => {
                    cur.push(false);
                    walk(u, cur, out);
                    cur.pop();
                    cur.push(true);
                    walk(v, cur, out);
                    cur.pop();
                }
            }
        }
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    /// Derivative orders in place of letters; two-letter brackets are
    /// unoriented, and with `loose` every bracket is.
    pub fn shape(&self, loose: bool) -> String {
        match self {
            Lie::Gen(g) => g.order.to_string(),
            Lie::Bracket(u, v) => {
                let (mut a, mut b) = (u.shape(loose), v.shape(loose));
                let both_letters = matches!((&**u, &**v), (Lie::Gen(_), Lie::Gen(_)));
                if (loose || both_letters) && b < a {
                    std::mem::swap(&mut a, &mut b);
                }
                format!("[{a},{b}]")
            }
        }
    }
}

impl fmt::Display for Lie {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lie::Gen(g) => write!(f, "{g}"),
            Lie::Bracket(u, v) => write!(f, "{{{u},{v}}}"),
        }
    }
}

impl fmt::Debug for Lie {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A commutative product of Lie words, stored sorted.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DMonomial(Vec<Lie>);

impl DMonomial {
    pub fn new(mut factors: Vec<Lie>) -> Self {
        factors.sort();
        DMonomial(factors)
    }

    pub fn factors(&self) -> &[Lie] {
        &self.0
    }

    pub fn weight(&self) -> i64 {
        self.0.iter().map(Lie::weight).sum()
    }

    /// Number of atomic variables.
    pub fn degree(&self) -> usize {
        self.labels().len()
    }

    pub fn labels(&self) -> Vec<u8> {
        self.0
            .iter()
            .flat_map(|t| t.generators().into_iter().flat_map(|g| g.base.labels.clone()))
            .collect()
    }

    pub fn check_multilinear(&self) -> Result<(), DiffError> {
        let mut ls = self.labels();
        ls.sort_unstable();
        match ls.windows(2).find(|w| w[0] == w[1]) {
            Some(w) => Err(DiffError::NotMultilinear(w[0])),
            None => Ok(()),
        }
    }

    /// Factor shapes, sorted and space separated.
    pub fn shape(&self, loose: bool) -> String {
        let mut v: Vec<String> = self.0.iter().map(|t| t.shape(loose)).collect();
        v.sort();
        v.join(" ")
    }

    pub(crate) fn without(&self, skip: &[usize]) -> Vec<Lie> {
        self.0
            .iter()
            .enumerate()
            .filter(|(i, _)| !skip.contains(i))
            .map(|(_, t)| t.clone())
            .collect()
    }
}

impl fmt::Display for DMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.0 {
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for DMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn write_terms<T: fmt::Display>(f: &mut fmt::Formatter<'_>, terms: impl Iterator<Item = (T, Q)>) -> fmt::Result {
    let mut first = true;
    for (t, c) in terms {
        let neg = c.is_negative();
        let a = c.abs();
        match (first, neg) {
            (true, true) => f.write_str("-")?,
            (true, false) => {}
            (false, true) => f.write_str(" - ")?,
            (false, false) => f.write_str(" + ")?,
        }
        if !a.is_one() {
            write!(f, "{a} ")?;
        }
        write!(f, "{t}")?;
        first = false;
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

/// Rational combination of differential monomials.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct DPoly {
    terms: BTreeMap<DMonomial, Q>,
}

impl DPoly {
    pub fn zero() -> Self {
        DPoly::default()
    }

    pub fn monomial(m: DMonomial) -> Self {
        let mut p = DPoly::zero();
        p.add_term(Q::one(), m);
        p
    }

    pub fn add_term(&mut self, c: Q, m: DMonomial) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m);
        match e {
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

    pub fn add_scaled(&mut self, c: &Q, other: &DPoly) {
        for (m, d) in &other.terms {
            self.add_term(c * d, m.clone());
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&DMonomial, &Q)> {
        self.terms.iter()
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
}

impl fmt::Display for DPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.terms.iter().map(|(m, c)| (m, c.clone())))
    }
}

impl fmt::Debug for DPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// An element of the span of `B`.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct GdExpression {
    terms: BTreeMap<Letter, Q>,
}

impl GdExpression {
    pub fn zero() -> Self {
        GdExpression::default()
    }

    pub fn letter(l: Letter) -> Self {
        let mut e = GdExpression::zero();
        e.add_term(Q::one(), l);
        e
    }

    pub fn add_term(&mut self, c: Q, l: Letter) {
        if c.is_zero() {
            return;
        }
        let s = self.terms.get(&l).cloned().unwrap_or_default() + c;
        if s.is_zero() {
            self.terms.remove(&l);
        } else {
            self.terms.insert(l, s);
        }
    }

    pub fn add_scaled(&mut self, c: &Q, other: &GdExpression) {
        for (l, d) in &other.terms {
            self.add_term(c * d, l.clone());
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Letter, &Q)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The same element as a shuffle polynomial over `1..n`, `n` the number
    /// of variables; the variables are renumbered in increasing order.
    pub fn to_operad(&self) -> OperadElement {
        let n = self.terms.keys().next().map_or(0, |l| l.labels.len());
        let mut e = OperadElement::zero(n);
        for (l, c) in &self.terms {
            e.add_term(c.clone(), l.tree.clone());
        }
        e
    }
}

impl fmt::Display for GdExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.terms.iter().map(|(l, c)| (l, c.clone())))
    }
}

impl fmt::Debug for GdExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `wt` of a differential monomial: variables weigh `-1`, each derivative
/// adds one, each bracket adds one and products add.
pub fn weight(m: &DMonomial) -> i64 {
    m.weight()
}

/// GD operations on letters, computed in the free GD operad with a completed
/// gd basis.
pub struct DiffPoisson<'a> {
    gd: &'a GroebnerBasis,
    dict: Dictionary,
}

impl<'a> DiffPoisson<'a> {
    pub fn new(gd: &'a GroebnerBasis) -> Self {
        let dict = Dictionary::standard(gd.signature());
        DiffPoisson { gd, dict }
    }

    pub fn basis(&self) -> &GroebnerBasis {
        self.gd
    }

    fn combine(&self, a: &Letter, b: &Letter, bracket: bool) -> Result<GdExpression, DiffError> {
        let mut labels: Vec<u8> = a.labels.iter().chain(&b.labels).copied().collect();
        labels.sort_unstable();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(DiffError::NotMultilinear(w[0]));
        }
        let pos = |l: &Letter| -> Vec<u8> {
            l.labels
                .iter()
                .map(|x| labels.binary_search(x).expect("present") as u8 + 1)
                .collect()
        };
        let (pa, pb) = (pos(a), pos(b));
        let ordered = pa[0] < pb[0];
        let (first, second, fp, sp) = if ordered { (a, b, pa, pb) } else { (b, a, pb, pa) };
        let pi = ShufflePartition::new(vec![fp, sp]).expect("disjoint blocks");
        let (gen, sign) = if bracket {
            (self.dict.mu.expect("gd has a bracket"), if ordered { 1 } else { -1 })
        } else {
            let (x, y) = self.dict.nu.expect("gd has a product");
            (if ordered { x } else { y }, 1)
        };
        let t = TreeMonomial::graft_root(gen, 2, &pi, &[&first.tree, &second.tree]);
        let reduced = self.gd.reduce(&OperadElement::term(Q::from_int(sign), t))?;
        let mut out = GdExpression::zero();
        for (t, c) in reduced.iter() {
            out.add_term(
                c.clone(),
                Letter {
                    labels: labels.clone(),
                    tree: t.clone(),
                },
            );
        }
        Ok(out)
    }

    /// `a o b` in `B`.
    pub fn circ(&self, a: &Letter, b: &Letter) -> Result<GdExpression, DiffError> {
        self.combine(a, b, false)
    }

    /// `[a, b]` in `B`.
    pub fn gd_bracket(&self, a: &Letter, b: &Letter) -> Result<GdExpression, DiffError> {
        self.combine(a, b, true)
    }

    pub fn circ_expr(&self, a: &GdExpression, b: &GdExpression) -> Result<GdExpression, DiffError> {
        self.bilinear(a, b, false)
    }

    pub fn bracket_expr(&self, a: &GdExpression, b: &GdExpression) -> Result<GdExpression, DiffError> {
        self.bilinear(a, b, true)
    }

    fn bilinear(&self, a: &GdExpression, b: &GdExpression, bracket: bool) -> Result<GdExpression, DiffError> {
        let mut out = GdExpression::zero();
        for (x, c) in a.iter() {
            for (y, d) in b.iter() {
                out.add_scaled(&(c * d), &self.combine(x, y, bracket)?);
            }
        }
        Ok(out)
    }

    /// Value of a derivative-free Lie word.
    pub fn evaluate(&self, t: &Lie) -> Result<GdExpression, DiffError> {
        match t {
            Lie::Gen(g) => {
                assert_eq!(g.order, 0, "derivative-free word expected");
                Ok(GdExpression::letter(g.base.clone()))
            }
            Lie::Bracket(u, v) => self.bracket_expr(&self.evaluate(u)?, &self.evaluate(v)?),
        }
    }
}

#[cfg(test)]
mod tests;
