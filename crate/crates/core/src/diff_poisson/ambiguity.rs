//! Critical pairs of the rewriting rules on multilinear weight `-1`
//! monomials, and their residues in the free GD-algebra.

use std::fmt;

use crate::element::OperadElement;
use crate::groebner::GroebnerBasis;
use crate::par::{self, Parallelism};

use super::lyndon::{is_ls_word, standard_bracketing};
use super::rewrite::RuleApp;
use super::{DMonomial, DiffError, DiffGenerator, DiffPoisson, GdExpression, Lie, MAX_DEGREE};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ambiguity {
    pub monomial: DMonomial,
    pub first: RuleApp,
    pub second: RuleApp,
}

impl Ambiguity {
    /// Factor shapes with derivative orders in place of letters.
    pub fn family(&self) -> String {
        self.monomial.shape(false)
    }

    /// [`Ambiguity::family`] with all brackets unoriented.
    pub fn loose_family(&self) -> String {
        self.monomial.shape(true)
    }
}

impl fmt::Display for Ambiguity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}  {} / {}", self.monomial, self.first, self.second)
    }
}

#[derive(Clone, Debug)]
pub struct Residue {
    pub ambiguity: Ambiguity,
    pub first: GdExpression,
    pub second: GdExpression,
    /// `first - second`, reduced.
    pub residue: OperadElement,
}

/// Every rule application that fits `m`.
pub fn rule_applications(m: &DMonomial) -> Vec<RuleApp> {
    let f = m.factors();
    let plains: Vec<usize> = (0..f.len()).filter(|&i| f[i].plain().is_some()).collect();
    let mut out = Vec::new();
    for (j, t) in f.iter().enumerate() {
        match t {
            Lie::Gen(g) if g.order > 0 => {
                out.extend(plains.iter().map(|&plain| RuleApp::Ig1 { plain, letter: j }));
            }
            Lie::Gen(_) => {}
            Lie::Bracket(..) => {
                for path in t.bracket_paths() {
                    let node = t.at(&path).expect("path");
                    if let Lie::Bracket(u, v) = node {
                        if let (Lie::Gen(x), Lie::Gen(y)) = (&**u, &**v) {
                            let redex = (x.order == 0 && y.order > 0 && x.base > y.base)
                                || (y.order == 0 && x.order > 0 && y.base > x.base);
                            if redex {
                                out.push(RuleApp::Ig2 { factor: j, path });
                            }
                        }
                    }
                }
                for leaf in t.leaf_paths() {
                    if matches!(t.at(&leaf), Some(Lie::Gen(g)) if g.order > 0) {
                        out.extend(plains.iter().map(|&plain| RuleApp::IgPois {
                            plain,
                            factor: j,
                            leaf: leaf.clone(),
                        }));
                    }
                }
            }
        }
    }
    out
}

fn overlapping(x: &RuleApp, y: &RuleApp) -> bool {
    let same_kind = matches!(
        (x, y),
        (RuleApp::Ig1 { .. }, RuleApp::Ig1 { .. }) | (RuleApp::Ig2 { .. }, RuleApp::Ig2 { .. })
    );
    !same_kind && x.factors().iter().any(|i| y.factors().contains(i))
}

/// Set partitions of `items`, blocks in order of their first element.
fn set_partitions(items: &[u8]) -> Vec<Vec<Vec<u8>>> {
    let Some((&first, rest)) = items.split_first() else {
        return vec![Vec::new()];
    };
    let mut out = Vec::new();
    for p in set_partitions(rest) {
        let mut alone = vec![vec![first]];
        alone.extend(p.iter().cloned());
        out.push(alone);
        for i in 0..p.len() {
            let mut q = p.clone();
            q[i].insert(0, first);
            out.push(q);
        }
    }
    out
}

/// Ways to write `total` as an ordered sum of `parts` nonnegative integers.
fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    (0..=total)
        .flat_map(|k| {
            compositions(total - k, parts - 1).into_iter().map(move |mut c| {
                c.insert(0, k);
                c
            })
        })
        .collect()
}

fn permutations<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x.clone());
            out.push(p);
        }
    }
    out
}

fn has_plain_bracket(t: &Lie) -> bool {
    match t {
        Lie::Gen(_) => false,
        Lie::Bracket(u, v) => t.derivs() == 0 || has_plain_bracket(u) || has_plain_bracket(v),
    }
}

/// Factors a block of letters can form: a single letter, or the standard
/// bracketing of an LS arrangement with no derivative-free sub-bracket.
fn block_factors(gens: &[DiffGenerator]) -> Vec<Lie> {
    if gens.len() == 1 {
        return vec![Lie::Gen(gens[0].clone())];
    }
    permutations(gens)
        .into_iter()
        .filter(|w| is_ls_word(w))
        .map(|w| standard_bracketing(&w))
        .filter(|t| !has_plain_bracket(t))
        .collect()
}

/// Multilinear weight `-1` monomials in `1..=n` with at least one bracket.
pub fn candidate_monomials(n: usize) -> Vec<DMonomial> {
    let labels: Vec<u8> = (1..=n as u8).collect();
    let mut out = Vec::new();
    for blocks in set_partitions(&labels) {
        let k = blocks.len();
        if k < 2 || blocks.iter().all(|b| b.len() == 1) {
            continue;
        }
        for orders in compositions(k as u32 - 1, n) {
            let options: Vec<Vec<Lie>> = blocks
                .iter()
                .map(|b| block_factors(&b.iter().map(|&l| DiffGenerator::atom(l, orders[l as usize - 1])).collect::<Vec<_>>()))
                .collect();
            let mut acc: Vec<Vec<Lie>> = vec![Vec::new()];
            for opts in &options {
                acc = acc
                    .iter()
                    .flat_map(|fs| {
                        opts.iter().map(move |t| {
                            let mut g = fs.clone();
                            g.push(t.clone());
                            g
                        })
                    })
                    .collect();
            }
            out.extend(acc.into_iter().map(DMonomial::new));
        }
    }
    out.sort();
    out
}

/// Overlapping pairs of rule applications on the candidate monomials of
/// degree `n`.
pub fn enumerate_ambiguities(n: usize) -> Result<Vec<Ambiguity>, DiffError> {
    if n > MAX_DEGREE {
        return Err(DiffError::Degree {
            degree: n,
            max: MAX_DEGREE,
        });
    }
    let mut out = Vec::new();
    for m in candidate_monomials(n) {
        let apps = rule_applications(&m);
        for (i, x) in apps.iter().enumerate() {
            for y in &apps[i + 1..] {
                if overlapping(x, y) {
                    out.push(Ambiguity {
                        monomial: m.clone(),
                        first: x.clone(),
                        second: y.clone(),
                    });
                }
            }
        }
    }
    Ok(out)
}

impl DiffPoisson<'_> {
    /// Normal forms of the two one-step rewrites and their difference modulo
    /// `modulo`.
    pub fn critical_pair_residue(&self, amb: &Ambiguity, modulo: &GroebnerBasis) -> Result<Residue, DiffError> {
        let first = self.normal_form(&self.apply(&amb.monomial, &amb.first)?)?;
        let second = self.normal_form(&self.apply(&amb.monomial, &amb.second)?)?;
        let n = amb.monomial.degree();
        let mut diff = OperadElement::zero(n);
        for (e, sign) in [(&first, 1), (&second, -1)] {
            let op = e.to_operad();
            if !op.is_zero() {
                diff.add_scaled(&crate::coeff::Q::from_int(sign), &op).expect("same arity");
            }
        }
        let residue = modulo.reduce(&diff)?;
        Ok(Residue {
            ambiguity: amb.clone(),
            first,
            second,
            residue,
        })
    }

    pub fn residues(
        &self,
        ambs: &[Ambiguity],
        modulo: &GroebnerBasis,
        mode: Parallelism,
    ) -> Result<Vec<Residue>, DiffError> {
        par::map(mode, ambs, |a| self.critical_pair_residue(a, modulo))
            .into_iter()
            .collect()
    }
}
