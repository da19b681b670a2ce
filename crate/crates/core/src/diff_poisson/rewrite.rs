//! The rewriting rules of the differential Poisson envelope and the normal
//! form of weight `-1` elements.
//!
//! - `IG1`: `a q^(n) -> (a o q)^(n-1) - sum_{i=1}^{n-1} C(n-1,i) a^(i) q^(n-i)`
//! - `IG2`: `{p, q^(n)} -> [p,q]^(n) - sum_{i=1}^{n} C(n,i) {p^(i), q^(n-i)}` for `p > q`
//! - `IGP`: `a W` with `W` a Lie word holding a letter `q^(n)`, `n >= 1`:
//!   write `W = sum ad_C(q^(n))` and push `a` inside with the Leibniz rule.
//! - `GD`: a derivative-free bracket is evaluated in `B`.

use std::collections::BTreeMap;
use std::fmt;

use crate::coeff::{binomial, Q};

use super::{DMonomial, DPoly, DiffError, DiffGenerator, DiffPoisson, GdExpression, Letter, Lie};

/// A rule applied at a definite place of a monomial. Factor indices refer to
/// the sorted factor list, paths to positions inside a factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleApp {
    Ig1 { plain: usize, letter: usize },
    Ig2 { factor: usize, path: Vec<bool> },
    IgPois { plain: usize, factor: usize, leaf: Vec<bool> },
}

impl RuleApp {
    pub fn id(&self) -> &'static str {
        match self {
            RuleApp::Ig1 { .. } => "IG1",
            RuleApp::Ig2 { .. } => "IG2",
            RuleApp::IgPois { .. } => "IGP",
        }
    }

    /// Factors read by the rule.
    pub fn factors(&self) -> Vec<usize> {
        match *self {
            RuleApp::Ig1 { plain, letter } => vec![plain, letter],
            RuleApp::Ig2 { factor, .. } => vec![factor],
            RuleApp::IgPois { plain, factor, .. } => vec![plain, factor],
        }
    }
}

impl fmt::Display for RuleApp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path = |p: &[bool]| p.iter().map(|&b| if b { 'R' } else { 'L' }).collect::<String>();
        match self {
            RuleApp::Ig1 { plain, letter } => write!(f, "IG1({plain},{letter})"),
            RuleApp::Ig2 { factor, path: p } => write!(f, "IG2({factor}@{})", path(p)),
            RuleApp::IgPois { plain, factor, leaf } => write!(f, "IGP({plain},{factor}@{})", path(leaf)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub rule: &'static str,
    pub before: String,
    pub after: String,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} -> {}", self.rule, self.before, self.after)
    }
}

/// One instance of a rule: a monomial and what it is replaced by.
#[derive(Clone, Debug)]
pub struct DiffRule {
    pub id: &'static str,
    pub lhs: DMonomial,
    pub rhs: DPoly,
}

impl fmt::Display for DiffRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} -> {}", self.id, self.lhs, self.rhs)
    }
}

type Word = Vec<DiffGenerator>;

fn add_word(acc: &mut BTreeMap<Word, Q>, w: Word, c: Q) {
    let s = acc.remove(&w).unwrap_or_default() + c;
    if !s.is_zero() {
        acc.insert(w, s);
    }
}

/// `ad_u` as a combination of products `ad_{c1} ... ad_{ck}`.
fn adword(u: &Lie) -> BTreeMap<Word, Q> {
    match u {
        Lie::Gen(g) => BTreeMap::from([(vec![g.clone()], Q::one())]),
        Lie::Bracket(p, q) => {
            let (ap, aq) = (adword(p), adword(q));
            let mut out = BTreeMap::new();
            for (x, c) in &ap {
                for (y, d) in &aq {
                    add_word(&mut out, [x.clone(), y.clone()].concat(), c * d);
                    add_word(&mut out, [y.clone(), x.clone()].concat(), -(c * d));
                }
            }
            out
        }
    }
}

/// `w = sum c ad_C(leaf)`.
fn chain(w: &Lie, path: &[bool]) -> BTreeMap<Word, Q> {
    match (w, path.split_first()) {
        (Lie::Gen(_), None) => BTreeMap::from([(Vec::new(), Q::one())]),
        (Lie::Bracket(u, v), Some((&side, rest))) => {
            let (outer, inner, sign) = if side {
                (adword(u), chain(v, rest), Q::one())
            } else {
                (adword(v), chain(u, rest), -Q::one())
            };
            let mut out = BTreeMap::new();
            for (x, c) in &outer {
                for (y, d) in &inner {
                    add_word(&mut out, [x.clone(), y.clone()].concat(), &sign * &(c * d));
                }
            }
            out
        }
        _ => panic!("path does not end at a letter"),
    }
}

/// `ad_{c1} ... ad_{ck}(t) = {c1, {c2, ... {ck, t}}}`.
fn ad(seq: &[DiffGenerator], t: Lie) -> Lie {
    seq.iter().rev().fold(t, |acc, c| Lie::bracket(Lie::Gen(c.clone()), acc))
}

/// `(S, complement)` for every subsequence `S` of `c`, order kept.
fn splits(c: &[DiffGenerator]) -> Vec<(Word, Word)> {
    (0u32..1 << c.len())
        .map(|mask| {
            let (mut s, mut t) = (Vec::new(), Vec::new());
            for (i, g) in c.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    s.push(g.clone());
                } else {
                    t.push(g.clone());
                }
            }
            (s, t)
        })
        .collect()
}

fn with_rest(rest: &[Lie], new: impl IntoIterator<Item = Lie>) -> DMonomial {
    DMonomial::new(rest.iter().cloned().chain(new).collect())
}

fn gen(base: &Letter, order: u32) -> Lie {
    Lie::Gen(DiffGenerator::new(base.clone(), order))
}

/// Sign and letters `(p, q, n)` when the bracket is an `IG2` redex.
fn ig2_redex(t: &Lie) -> Option<(Q, &Letter, &DiffGenerator)> {
    let Lie::Bracket(u, v) = t else { return None };
    let (Lie::Gen(x), Lie::Gen(y)) = (&**u, &**v) else { return None };
    if x.order == 0 && y.order > 0 && x.base > y.base {
        Some((Q::one(), &x.base, y))
    } else if y.order == 0 && x.order > 0 && y.base > x.base {
        Some((-Q::one(), &y.base, x))
    } else {
        None
    }
}

/// `(k, plain-free factors, letters in derivative-carrying factors)`.
fn measure(m: &DMonomial) -> (usize, usize, usize) {
    let f = m.factors();
    let zero = f.iter().filter(|t| t.derivs() == 0).count();
    let letters = f.iter().filter(|t| t.derivs() > 0).map(Lie::len).sum();
    (f.len(), zero, letters)
}

impl DiffPoisson<'_> {
    /// Applications of the rules that fit `m`.
    pub fn applicable(&self, m: &DMonomial) -> Vec<RuleApp> {
        super::ambiguity::rule_applications(m)
    }

    /// The result of one rewriting step.
    pub fn apply(&self, m: &DMonomial, app: &RuleApp) -> Result<DPoly, DiffError> {
        let bad = || DiffError::NotApplicable(format!("{app} on {m}"));
        let f = m.factors();
        let mut out = DPoly::zero();
        match app {
            RuleApp::Ig1 { plain, letter } => {
                let a = f.get(*plain).and_then(Lie::plain).ok_or_else(bad)?;
                let Some(Lie::Gen(q)) = f.get(*letter) else { return Err(bad()) };
                if q.order == 0 || plain == letter {
                    return Err(bad());
                }
                let n = q.order;
                let rest = m.without(&[*plain, *letter]);
                for (l, c) in self.circ(a, &q.base)?.iter() {
                    out.add_term(c.clone(), with_rest(&rest, [gen(l, n - 1)]));
                }
                for i in 1..n {
                    out.add_term(-binomial(n - 1, i), with_rest(&rest, [gen(a, i), gen(&q.base, n - i)]));
                }
            }
            RuleApp::Ig2 { factor, path } => {
                let w = f.get(*factor).ok_or_else(bad)?;
                let node = w.at(path).ok_or_else(bad)?;
                let (sign, p, q) = ig2_redex(node).ok_or_else(bad)?;
                let n = q.order;
                let rest = m.without(&[*factor]);
                for (l, c) in self.gd_bracket(p, &q.base)?.iter() {
                    out.add_term(&sign * c, with_rest(&rest, [w.replace(path, gen(l, n))]));
                }
                for i in 1..=n {
                    let t = Lie::bracket(gen(p, i), gen(&q.base, n - i));
                    out.add_term(-(&sign * &binomial(n, i)), with_rest(&rest, [w.replace(path, t)]));
                }
            }
            RuleApp::IgPois { plain, factor, leaf } => {
                let a = f.get(*plain).and_then(Lie::plain).ok_or_else(bad)?;
                let w = f.get(*factor).ok_or_else(bad)?;
                if !matches!(w, Lie::Bracket(..)) {
                    return Err(bad());
                }
                let Some(Lie::Gen(q)) = w.at(leaf) else { return Err(bad()) };
                if q.order == 0 {
                    return Err(bad());
                }
                let n = q.order;
                let rest = m.without(&[*plain, *factor]);
                let circ = self.circ(a, &q.base)?;
                for (seq, coef) in chain(w, leaf) {
                    for (l, c) in circ.iter() {
                        out.add_term(&coef * c, with_rest(&rest, [ad(&seq, gen(l, n - 1))]));
                    }
                    for (s, t) in splits(&seq) {
                        for i in 1..n {
                            let c = -(&coef * &binomial(n - 1, i));
                            out.add_term(c, with_rest(&rest, [ad(&s, gen(a, i)), ad(&t, gen(&q.base, n - i))]));
                        }
                        if !s.is_empty() {
                            out.add_term(-coef.clone(), with_rest(&rest, [ad(&s, gen(a, 0)), ad(&t, q_gen(q))]));
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Derivative-free sub-brackets evaluated in `B`.
    fn simplify(&self, t: &Lie) -> Result<Vec<(Q, Lie)>, DiffError> {
        if t.derivs() == 0 {
            if let Lie::Gen(_) = t {
                return Ok(vec![(Q::one(), t.clone())]);
            }
            let e = self.evaluate(t)?;
            return Ok(e.iter().map(|(l, c)| (c.clone(), gen(l, 0))).collect());
        }
        match t {
            Lie::Gen(_) => Ok(vec![(Q::one(), t.clone())]),
            Lie::Bracket(u, v) => {
                let (su, sv) = (self.simplify(u)?, self.simplify(v)?);
                let mut out = Vec::new();
                for (c, x) in &su {
                    for (d, y) in &sv {
                        out.push((c * d, Lie::bracket(x.clone(), y.clone())));
                    }
                }
                Ok(out)
            }
        }
    }

    fn simplify_monomial(&self, m: &DMonomial) -> Result<DPoly, DiffError> {
        let mut acc: Vec<(Q, Vec<Lie>)> = vec![(Q::one(), Vec::new())];
        for t in m.factors() {
            let s = self.simplify(t)?;
            let mut next = Vec::with_capacity(acc.len() * s.len());
            for (c, fs) in &acc {
                for (d, x) in &s {
                    let mut g = fs.clone();
                    g.push(x.clone());
                    next.push((c * d, g));
                }
            }
            acc = next;
        }
        let mut out = DPoly::zero();
        for (c, fs) in acc {
            out.add_term(c, DMonomial::new(fs));
        }
        Ok(out)
    }

    /// The rule the normal form applies to `m`, which has no derivative-free
    /// brackets left and at least two factors.
    fn choose(&self, m: &DMonomial) -> Option<RuleApp> {
        let f = m.factors();
        let plain = f.iter().position(|t| t.plain().is_some())?;
        let factor = f.iter().position(|t| t.derivs() > 0)?;
        Some(match &f[factor] {
            Lie::Gen(_) => RuleApp::Ig1 { plain, letter: factor },
            w => {
                let leaf = w
                    .leaf_paths()
                    .into_iter()
                    .find(|p| matches!(w.at(p), Some(Lie::Gen(g)) if g.order > 0))
                    .expect("derivative somewhere");
                RuleApp::IgPois { plain, factor, leaf }
            }
        })
    }

    pub fn normal_form(&self, f: &DPoly) -> Result<GdExpression, DiffError> {
        self.run(f, None)
    }

    pub fn normal_form_traced(&self, f: &DPoly, trace: &mut Vec<TraceStep>) -> Result<GdExpression, DiffError> {
        self.run(f, Some(trace))
    }

    fn run(&self, f: &DPoly, mut trace: Option<&mut Vec<TraceStep>>) -> Result<GdExpression, DiffError> {
        for (m, _) in f.iter() {
            if m.weight() != -1 {
                return Err(DiffError::Weight(m.weight()));
            }
            m.check_multilinear()?;
        }
        let mut work: BTreeMap<DMonomial, Q> = f.iter().map(|(m, c)| (m.clone(), c.clone())).collect();
        let mut out = GdExpression::zero();
        while let Some((m, c)) = work.pop_last() {
            let before = measure(&m);
            let simple = self.simplify_monomial(&m)?;
            let (rule, next) = if simple != DPoly::monomial(m.clone()) {
                ("GD", simple)
            } else if let [Lie::Gen(g)] = m.factors() {
                debug_assert_eq!(g.order, 0);
                out.add_term(c, g.base.clone());
                continue;
            } else {
                let app = self.choose(&m).ok_or_else(|| DiffError::NotApplicable(m.to_string()))?;
                (app.id(), self.apply(&m, &app)?)
            };
            for (n, _) in next.iter() {
                let after = measure(n);
                if rule == "GD" {
                    assert!(after <= before, "GD step grew {m} into {n}");
                } else {
                    assert!(after < before, "{rule} did not decrease {m} into {n}");
                }
            }
            if let Some(t) = trace.as_deref_mut() {
                t.push(TraceStep {
                    rule,
                    before: m.to_string(),
                    after: next.to_string(),
                });
            }
            for (n, d) in next.iter() {
                let s = work.remove(n).unwrap_or_default() + &c * d;
                if !s.is_zero() {
                    work.insert(n.clone(), s);
                }
            }
        }
        Ok(out)
    }

    /// `{p, q^(n)} -> ...` for `p > q` in `letters` and `n <= max_order`;
    /// for `n = 0` the right side is the bracket in `B`.
    pub fn lie_rewrite_rules(&self, letters: &[Letter], max_order: u32) -> Result<Vec<DiffRule>, DiffError> {
        let mut out = Vec::new();
        for p in letters {
            for q in letters.iter().filter(|q| *q < p) {
                for n in 0..=max_order {
                    let lhs = DMonomial::new(vec![Lie::bracket(gen(p, 0), gen(q, n))]);
                    let rhs = if n == 0 {
                        let mut r = DPoly::zero();
                        for (l, c) in self.gd_bracket(p, q)?.iter() {
                            r.add_term(c.clone(), DMonomial::new(vec![gen(l, 0)]));
                        }
                        r
                    } else {
                        self.apply(&lhs, &RuleApp::Ig2 { factor: 0, path: Vec::new() })?
                    };
                    out.push(DiffRule { id: "IG2", lhs, rhs });
                }
            }
        }
        Ok(out)
    }

    /// Weight `-1` rules `a b'` and `a {c1, {c2, ... {ck, b'}}}` over distinct
    /// letters, at most `max_letters` of them, with the right side in normal
    /// form.
    pub fn poisson_rewrite_rules(&self, letters: &[Letter], max_letters: usize) -> Result<Vec<DiffRule>, DiffError> {
        let mut out = Vec::new();
        for (i, a) in letters.iter().enumerate() {
            let others: Vec<&Letter> = letters.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, l)| l).collect();
            let mut seqs: Vec<Vec<&Letter>> = others.iter().map(|l| vec![*l]).collect();
            while let Some(seq) = seqs.pop() {
                if seq.len() + 1 < max_letters {
                    for l in &others {
                        if !seq.contains(l) {
                            let mut s = vec![*l];
                            s.extend(&seq);
                            seqs.push(s);
                        }
                    }
                }
                let (b, cs) = seq.split_last().expect("nonempty");
                let w = cs.iter().rev().fold(gen(b, 1), |acc, c| Lie::bracket(gen(c, 0), acc));
                let lhs = DMonomial::new(vec![gen(a, 0), w.clone()]);
                let pos = |t: &Lie| lhs.factors().iter().position(|x| x == t).expect("factor");
                let app = if cs.is_empty() {
                    RuleApp::Ig1 { plain: pos(&gen(a, 0)), letter: pos(&w) }
                } else {
                    RuleApp::IgPois {
                        plain: pos(&gen(a, 0)),
                        factor: pos(&w),
                        leaf: vec![true; cs.len()],
                    }
                };
                let nf = self.normal_form(&self.apply(&lhs, &app)?)?;
                let mut rhs = DPoly::zero();
                for (l, c) in nf.iter() {
                    rhs.add_term(c.clone(), DMonomial::new(vec![gen(l, 0)]));
                }
                out.push(DiffRule { id: app.id(), lhs, rhs });
            }
        }
        out.sort_by(|x, y| x.lhs.cmp(&y.lhs));
        Ok(out)
    }
}

fn q_gen(q: &DiffGenerator) -> Lie {
    Lie::Gen(q.clone())
}
