//! Arity-stratified completion.
//!
//! Arity `k` is handled once arities below `k` are complete. Every arity-`k`
//! monomial whose root children are normal (a "root form") gets a normal
//! form modulo the lower rules, computed in increasing monomial order so each
//! rewrite only needs forms already known. An arbitrary monomial is reduced
//! children first through the lower levels' tables and then looked up as a
//! combination of root forms. The new rules of arity `k` are the reduced row
//! echelon form of the remainders of all arity-`k` relations and of all
//! S-polynomials whose overlap has arity `k`.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use crate::coeff::Q;
use crate::element::OperadElement;
use crate::linalg::{accumulate, axpy, from_map, Echelon, SparseVec};
use crate::order::MonomialOrder;
use crate::par::{self, Parallelism};
use crate::presentation::Presentation;
use crate::tree::{all_monomials, for_each_product, shuffle_partitions, Occurrence, PatternIndex, Signature, TreeMonomial};

use super::{GroebnerBasis, GroebnerError, RewriteRule};

#[derive(Debug, Clone)]
pub struct CompletionOptions {
    pub max_arity: usize,
    pub order: MonomialOrder,
    pub parallelism: Parallelism,
    /// Refuse a level with more monomials than this.
    pub max_level_monomials: usize,
    pub time_limit: Option<Duration>,
}

impl CompletionOptions {
    pub fn new(max_arity: usize) -> Self {
        CompletionOptions {
            max_arity,
            order: MonomialOrder::PathLex,
            parallelism: Parallelism::default(),
            max_level_monomials: 5_000_000,
            time_limit: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LevelStats {
    pub arity: usize,
    pub monomials: usize,
    pub root_forms: usize,
    pub candidates: usize,
    pub critical_pairs: usize,
    pub new_rules: usize,
    pub normal: usize,
    pub millis: u128,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CompletionStats {
    pub levels: Vec<LevelStats>,
}

impl CompletionStats {
    /// Normal monomial counts for arities `1..`.
    pub fn dimensions(&self) -> Vec<usize> {
        std::iter::once(1).chain(self.levels.iter().map(|l| l.normal)).collect()
    }
}

pub fn buchberger(p: &Presentation, max_arity: usize) -> Result<GroebnerBasis, GroebnerError> {
    buchberger_with(p, &CompletionOptions::new(max_arity)).map(|(b, _)| b)
}

struct Level {
    /// Monomials with no divisor among lower leads, greatest first.
    basis: Vec<TreeMonomial>,
    is_normal: Vec<bool>,
    /// Normal forms of every monomial of this arity; only kept when a higher
    /// level needs them.
    phi: HashMap<TreeMonomial, SparseVec>,
}

impl Level {
    fn normal_monomials(&self) -> Vec<TreeMonomial> {
        self.basis
            .iter()
            .zip(&self.is_normal)
            .filter(|(_, &n)| n)
            .map(|(t, _)| t.clone())
            .collect()
    }
}

struct Ctx<'a> {
    sig: &'a Signature,
    levels: &'a [Level],
    /// Root-form normal forms at the level being built.
    psi: &'a HashMap<TreeMonomial, SparseVec>,
}

impl Ctx<'_> {
    /// Normal form of an arity-`k` monomial: children through the lower
    /// tables, then root forms through `psi`.
    fn phi(&self, m: &TreeMonomial) -> SparseVec {
        let (g, pi, subs) = m.decompose().expect("not a leaf");
        let arity = self.sig.arity(g);
        let vecs: Vec<&SparseVec> = subs
            .iter()
            .map(|s| self.levels[s.arity()].phi.get(s).expect("lower level table"))
            .collect();
        if vecs.iter().all(|v| v.len() == 1 && v[0].1.is_one()) {
            let children: Vec<&TreeMonomial> = vecs
                .iter()
                .zip(&subs)
                .map(|(v, s)| &self.levels[s.arity()].basis[v[0].0 as usize])
                .collect();
            let rf = TreeMonomial::graft_root(g, arity, &pi, &children);
            return self.psi.get(&rf).expect("root form already reduced").clone();
        }
        let mut acc: HashMap<u32, Q> = HashMap::new();
        let lists: Vec<&SparseVec> = vecs;
        let sizes: Vec<usize> = subs.iter().map(|s| s.arity()).collect();
        let refs: Vec<&Vec<(u32, Q)>> = lists.to_vec();
        for_each_product(&refs, &mut |choice| {
            let mut c = Q::one();
            let mut children = Vec::with_capacity(choice.len());
            for (k, (idx, d)) in choice.iter().enumerate() {
                c = &c * d;
                children.push(&self.levels[sizes[k]].basis[*idx as usize]);
            }
            let rf = TreeMonomial::graft_root(g, arity, &pi, &children);
            let v = self.psi.get(&rf).expect("root form already reduced");
            accumulate(&mut acc, &c, v);
        });
        from_map(acc)
    }

    fn phi_element(&self, e: &OperadElement) -> SparseVec {
        let mut acc: HashMap<u32, Q> = HashMap::new();
        for (t, c) in e.iter() {
            accumulate(&mut acc, c, &self.phi(t));
        }
        from_map(acc)
    }

    /// Normal form of `graft(m, occ, tail)`.
    fn phi_graft(&self, m: &TreeMonomial, occ: &Occurrence, tail: &OperadElement) -> SparseVec {
        let mut acc: HashMap<u32, Q> = HashMap::new();
        for (t, c) in tail.iter() {
            accumulate(&mut acc, c, &self.phi(&m.graft(occ, t)));
        }
        from_map(acc)
    }
}

pub fn buchberger_with(p: &Presentation, opts: &CompletionOptions) -> Result<(GroebnerBasis, CompletionStats), GroebnerError> {
    let sig = &p.signature;
    if sig.generators().iter().any(|g| g.arity < 2) {
        return Err(GroebnerError::Unsupported(
            "unary generators give infinitely many monomials per arity".into(),
        ));
    }
    let max = opts.max_arity.max(1);
    if p.max_relation_arity() > max {
        return Err(GroebnerError::ArityExceeded {
            arity: p.max_relation_arity(),
            max,
        });
    }
    let start = Instant::now();
    let order = opts.order;
    let mode = opts.parallelism;
    let by_arity = p.relations_by_arity();
    let mut rules: Vec<RewriteRule> = Vec::new();
    let mut index: PatternIndex<usize> = PatternIndex::default();
    let mut stats = CompletionStats::default();
    let leaf = TreeMonomial::identity();
    let mut levels: Vec<Level> = vec![
        Level {
            basis: Vec::new(),
            is_normal: Vec::new(),
            phi: HashMap::new(),
        },
        Level {
            basis: vec![leaf.clone()],
            is_normal: vec![true],
            phi: HashMap::from([(leaf, vec![(0u32, Q::one())])]),
        },
    ];
    let check_time = || -> Result<(), GroebnerError> {
        if let Some(limit) = opts.time_limit {
            if start.elapsed() > limit {
                return Err(GroebnerError::BudgetExceeded(format!("time limit of {limit:?}")));
            }
        }
        Ok(())
    };

    for k in 2..=max {
        let level_start = Instant::now();
        check_time()?;

        // root forms over normal children, in increasing order
        let normal_lists: Vec<Vec<TreeMonomial>> = levels.iter().map(Level::normal_monomials).collect();
        let mut roots: Vec<TreeMonomial> = Vec::new();
        for g in 0..sig.len() as u8 {
            let a = sig.arity(g);
            for pi in shuffle_partitions(k, a as usize) {
                let lists: Vec<&Vec<TreeMonomial>> = pi.blocks().iter().map(|b| &normal_lists[b.len()]).collect();
                for_each_product(&lists, &mut |children| {
                    roots.push(TreeMonomial::graft_root(g, a, &pi, children));
                });
            }
        }
        if roots.len() > opts.max_level_monomials {
            return Err(GroebnerError::BudgetExceeded(format!(
                "{} root forms at arity {k}",
                roots.len()
            )));
        }
        let keys = par::map(mode, &roots, |t| order.key(t));
        let mut perm: Vec<usize> = (0..roots.len()).collect();
        perm.sort_unstable_by(|&a, &b| keys[a].cmp(&keys[b]));
        let roots: Vec<TreeMonomial> = perm.into_iter().map(|i| roots[i].clone()).collect();
        let root_div: Vec<Option<(usize, Occurrence)>> = par::map(mode, &roots, |m| {
            index.matches_at(m, 0).into_iter().next().map(|(&r, o)| (r, o))
        });
        // columns: candidates greatest first
        let basis: Vec<TreeMonomial> = roots
            .iter()
            .zip(&root_div)
            .rev()
            .filter(|(_, d)| d.is_none())
            .map(|(t, _)| t.clone())
            .collect();
        let col: HashMap<&TreeMonomial, u32> = basis.iter().enumerate().map(|(i, t)| (t, i as u32)).collect();

        let mut psi: HashMap<TreeMonomial, SparseVec> = HashMap::with_capacity(roots.len());
        for (m, d) in roots.iter().zip(&root_div) {
            let v = match d {
                None => vec![(col[m], Q::one())],
                Some((rid, occ)) => {
                    let ctx = Ctx {
                        sig,
                        levels: &levels,
                        psi: &psi,
                    };
                    ctx.phi_graft(m, occ, &rules[*rid].tail)
                }
            };
            psi.insert(m.clone(), v);
        }
        check_time()?;

        let mut echelon = Echelon::new();
        let ctx = Ctx {
            sig,
            levels: &levels,
            psi: &psi,
        };
        for r in by_arity.get(&k).into_iter().flatten() {
            echelon.insert(ctx.phi_element(r));
        }

        // S-polynomials: overlaps of lower leads covering a whole monomial
        let all = if rules.is_empty() {
            Vec::new()
        } else {
            all_monomials(sig, k).map_err(|e| GroebnerError::Unsupported(e.to_string()))?
        };
        if all.len() > opts.max_level_monomials {
            return Err(GroebnerError::BudgetExceeded(format!("{} monomials at arity {k}", all.len())));
        }
        let mut critical_pairs = 0usize;
        for chunk in all.chunks(4096) {
            check_time()?;
            let found = par::map(mode, chunk, |m| critical_remainders(&ctx, &index, &rules, m));
            for (pairs, rems) in found {
                critical_pairs += pairs;
                for r in rems {
                    echelon.insert(r);
                }
            }
        }
        echelon.interreduce();

        let rows = echelon.into_rows();
        let mut is_normal = vec![true; basis.len()];
        let mut pivots: Vec<u32> = rows.keys().copied().collect();
        pivots.sort_unstable();
        for &p in &pivots {
            is_normal[p as usize] = false;
            let row = &rows[&p];
            let tail = OperadElement::from_terms(
                k,
                row[1..].iter().map(|(i, c)| (-c, basis[*i as usize].clone())),
            )
            .expect("arity k");
            let lead = basis[p as usize].clone();
            index.insert(lead.clone(), rules.len());
            rules.push(RewriteRule { lead, tail });
        }
        let new_rules = pivots.len();
        let normal = is_normal.iter().filter(|&&b| b).count();

        // final root-form normal forms and, if needed above, the full table
        let reduce_row = |v: &SparseVec| -> SparseVec {
            let mut v = v.clone();
            let mut i = 0;
            while i < v.len() {
                if let Some(row) = rows.get(&v[i].0) {
                    let c = -&v[i].1;
                    v = axpy(&v, &c, row);
                } else {
                    i += 1;
                }
            }
            v
        };
        let psi_final: HashMap<TreeMonomial, SparseVec> = if rows.is_empty() {
            psi
        } else {
            let entries: Vec<(&TreeMonomial, &SparseVec)> = psi.iter().collect();
            let reduced = par::map(mode, &entries, |(t, v)| ((*t).clone(), reduce_row(v)));
            reduced.into_iter().collect()
        };
        let mut phi = HashMap::new();
        if k < max {
            let all = if all.is_empty() {
                all_monomials(sig, k).map_err(|e| GroebnerError::Unsupported(e.to_string()))?
            } else {
                all
            };
            let ctx = Ctx {
                sig,
                levels: &levels,
                psi: &psi_final,
            };
            let vs = par::map(mode, &all, |m| ctx.phi(m));
            phi = all.into_iter().zip(vs).collect();
        }
        stats.levels.push(LevelStats {
            arity: k,
            monomials: phi.len(),
            root_forms: roots.len(),
            candidates: basis.len(),
            critical_pairs,
            new_rules,
            normal,
            millis: level_start.elapsed().as_millis(),
        });
        levels.push(Level { basis, is_normal, phi });
    }
    let basis = GroebnerBasis::new(p.name.clone(), sig.clone(), order, max, rules);
    Ok((basis, stats))
}

/// Remainders of the S-polynomials whose overlap is exactly `m`. Returns the
/// number of overlapping pairs and the nonzero remainders along a spanning
/// forest of the pair graph.
fn critical_remainders(
    ctx: &Ctx<'_>,
    index: &PatternIndex<usize>,
    rules: &[RewriteRule],
    m: &TreeMonomial,
) -> (usize, Vec<SparseVec>) {
    if index.matches_at(m, 0).is_empty() {
        return (0, Vec::new());
    }
    let ds: Vec<(usize, Occurrence)> = index.matches(m).into_iter().map(|(&r, o)| (r, o)).collect();
    if ds.len() < 2 {
        return (0, Vec::new());
    }
    let degree = m.degree();
    let mut parent: Vec<usize> = (0..ds.len()).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let mut pairs = 0;
    let mut edges = Vec::new();
    for i in 0..ds.len() {
        for j in i + 1..ds.len() {
            let (a, b) = (&ds[i].1, &ds[j].1);
            if !a.shares_vertex(b) {
                continue;
            }
            let mut union: Vec<usize> = a.vertices.iter().chain(&b.vertices).copied().collect();
            union.sort_unstable();
            union.dedup();
            if union.len() != degree {
                continue;
            }
            pairs += 1;
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri] = rj;
                edges.push((i, j));
            }
        }
    }
    let mut cache: HashMap<usize, SparseVec> = HashMap::new();
    let mut out = Vec::new();
    for (i, j) in edges {
        for t in [i, j] {
            cache
                .entry(t)
                .or_insert_with(|| ctx.phi_graft(m, &ds[t].1, &rules[ds[t].0].tail));
        }
        let r = axpy(&cache[&i], &Q::from_int(-1), &cache[&j]);
        if !r.is_empty() {
            out.push(r);
        }
    }
    (pairs, out)
}
