//! Admissible orders on shuffle tree monomials.
//!
//! Both orders are path-lexicographic: first the number of internal
//! vertices, then the root-to-leaf generator words of leaves `1..n` compared
//! degree-lexicographically, then the leaf labels read left to right in the
//! planar picture. They differ only in the ranking of generators.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::tree::{Node, TreeError, TreeMonomial};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MonomialOrder {
    /// Generators ranked in declaration order.
    #[default]
    PathLex,
    /// Generators ranked in reverse declaration order.
    PathLexRev,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown monomial order `{0}` (expected `pathlex` or `pathlex-rev`)")]
pub struct UnknownOrder(pub String);

/// Byte string whose lexicographic order is the monomial order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderKey(Box<[u8]>);

impl OrderKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl MonomialOrder {
    pub const ALL: [MonomialOrder; 2] = [MonomialOrder::PathLex, MonomialOrder::PathLexRev];

    pub fn id(self) -> &'static str {
        match self {
            MonomialOrder::PathLex => "pathlex",
            MonomialOrder::PathLexRev => "pathlex-rev",
        }
    }

    fn letter(self, gen: u8) -> u8 {
        match self {
            MonomialOrder::PathLex => gen + 1,
            MonomialOrder::PathLexRev => 255 - gen,
        }
    }

    pub fn key(self, t: &TreeMonomial) -> OrderKey {
        let nodes = t.nodes();
        let n = t.arity();
        let mut words: Vec<Vec<u8>> = vec![Vec::new(); n + 1];
        let mut perm = Vec::with_capacity(n);
        // stack of (letter, remaining children)
        let mut path: Vec<(u8, u8)> = Vec::new();
        for node in nodes {
            match *node {
                Node::Op { gen, arity } => path.push((self.letter(gen), arity)),
                Node::Leaf(l) => {
                    words[l as usize] = path.iter().map(|p| p.0).collect();
                    perm.push(l);
                    while let Some(top) = path.last_mut() {
                        top.1 -= 1;
                        if top.1 > 0 {
                            break;
                        }
                        path.pop();
                    }
                }
            }
        }
        let mut key = Vec::with_capacity(1 + 2 * n + nodes.len() * 2);
        key.push(t.degree() as u8);
        for w in &words[1..] {
            key.push(w.len() as u8);
            key.extend_from_slice(w);
        }
        key.extend_from_slice(&perm);
        OrderKey(key.into_boxed_slice())
    }

    pub fn compare(self, a: &TreeMonomial, b: &TreeMonomial) -> Result<Ordering, TreeError> {
        if a.arity() != b.arity() {
            return Err(TreeError::ArityDiffers(a.arity(), b.arity()));
        }
        Ok(self.key(a).cmp(&self.key(b)))
    }
}

impl fmt::Display for MonomialOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for MonomialOrder {
    type Err = UnknownOrder;

    fn from_str(s: &str) -> Result<Self, UnknownOrder> {
        match s {
            "pathlex" => Ok(MonomialOrder::PathLex),
            "pathlex-rev" => Ok(MonomialOrder::PathLexRev),
            other => Err(UnknownOrder(other.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{all_monomials, ShufflePartition, Signature};
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn sig() -> Signature {
        Signature::binary(&["x", "y", "z"])
    }

    #[test]
    fn generator_rank_decides_single_vertex() {
        let s = sig();
        let x = TreeMonomial::parse("x(1 2)", &s).unwrap();
        let y = TreeMonomial::parse("y(1 2)", &s).unwrap();
        let z = TreeMonomial::parse("z(1 2)", &s).unwrap();
        let o = MonomialOrder::PathLex;
        assert_eq!(o.compare(&x, &y).unwrap(), Ordering::Less);
        assert_eq!(o.compare(&y, &z).unwrap(), Ordering::Less);
        assert_eq!(MonomialOrder::PathLexRev.compare(&x, &z).unwrap(), Ordering::Greater);
        let l = TreeMonomial::identity();
        assert_eq!(o.compare(&l, &l).unwrap(), Ordering::Equal);
        assert!(o.compare(&l, &x).is_err());
    }

    #[test]
    fn keys_are_injective() {
        let s = sig();
        for n in 1..=5 {
            let all = all_monomials(&s, n).unwrap();
            for o in MonomialOrder::ALL {
                let keys: HashSet<OrderKey> = all.iter().map(|t| o.key(t)).collect();
                assert_eq!(keys.len(), all.len(), "arity {n}, {o}");
            }
        }
    }

    #[test]
    fn total_order_on_arity_three() {
        // a key order is automatically a total preorder; injectivity makes it total
        let s = sig();
        let all = all_monomials(&s, 3).unwrap();
        let o = MonomialOrder::PathLex;
        for a in &all {
            for b in &all {
                let ab = o.compare(a, b).unwrap();
                assert_eq!(ab, o.compare(b, a).unwrap().reverse());
                assert_eq!(ab == Ordering::Equal, a == b);
                for c in &all {
                    if ab == Ordering::Less && o.compare(b, c).unwrap() == Ordering::Less {
                        assert_eq!(o.compare(a, c).unwrap(), Ordering::Less);
                    }
                }
            }
        }
    }

    /// Random context: either compose the monomial into a random outer tree
    /// or compose random trees into its leaves.
    fn contexts(t: &TreeMonomial, u: &TreeMonomial, seed: u64) -> Option<(TreeMonomial, TreeMonomial)> {
        use rand::{Rng, SeedableRng};
        let s = sig();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = t.arity();
        if rng.gen_bool(0.5) {
            // outer: f of arity k with t plugged at leaf i
            let k = rng.gen_range(2..=3usize);
            let outer = all_monomials(&s, k).unwrap();
            let f = &outer[rng.gen_range(0..outer.len())];
            let i = rng.gen_range(0..k);
            let total = n + k - 1;
            let sizes: Vec<usize> = (0..k).map(|j| if j == i { n } else { 1 }).collect();
            let parts: Vec<ShufflePartition> = crate::tree::shuffle_partitions(total, k)
                .into_iter()
                .filter(|p| p.blocks().iter().map(Vec::len).eq(sizes.iter().copied()))
                .collect();
            if parts.is_empty() {
                return None;
            }
            let pi = &parts[rng.gen_range(0..parts.len())];
            let mut gs = vec![TreeMonomial::identity(); k];
            gs[i] = t.clone();
            let a = f.compose(pi, &gs).unwrap();
            gs[i] = u.clone();
            let b = f.compose(pi, &gs).unwrap();
            Some((a, b))
        } else {
            // inner: plug random monomials into the leaves of t and u
            let sizes: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=2usize)).collect();
            let total: usize = sizes.iter().sum();
            let parts: Vec<ShufflePartition> = crate::tree::shuffle_partitions(total, n)
                .into_iter()
                .filter(|p| p.blocks().iter().map(Vec::len).eq(sizes.iter().copied()))
                .collect();
            if parts.is_empty() {
                return None;
            }
            let pi = &parts[rng.gen_range(0..parts.len())];
            let gs: Vec<TreeMonomial> = sizes
                .iter()
                .map(|&k| {
                    let all = all_monomials(&s, k).unwrap();
                    all[rng.gen_range(0..all.len())].clone()
                })
                .collect();
            Some((t.compose(pi, &gs).unwrap(), u.compose(pi, &gs).unwrap()))
        }
    }

    /// Every pair of monomials of arity at most 4 keeps its comparison after
    /// one generator is composed above or below.
    #[test]
    fn admissible_under_elementary_compositions() {
        let s = sig();
        let leaf = TreeMonomial::identity();
        let gens: Vec<TreeMonomial> = all_monomials(&s, 2).unwrap();
        for o in MonomialOrder::ALL {
            for n in 2..=4 {
                let ms = all_monomials(&s, n).unwrap();
                let exts: Vec<Vec<TreeMonomial>> = ms
                    .iter()
                    .map(|a| {
                        let mut e = Vec::new();
                        for g in &gens {
                            for pi in crate::tree::shuffle_partitions(n + 1, n) {
                                if let Some(i) = pi.blocks().iter().position(|b| b.len() == 2) {
                                    let mut gs = vec![leaf.clone(); n];
                                    gs[i] = g.clone();
                                    e.push(a.compose(&pi, &gs).unwrap());
                                }
                            }
                            for pi in crate::tree::shuffle_partitions(n + 1, 2) {
                                let gs = match (pi.blocks()[0].len(), pi.blocks()[1].len()) {
                                    (k, 1) if k == n => [a.clone(), leaf.clone()],
                                    (1, k) if k == n => [leaf.clone(), a.clone()],
                                    _ => continue,
                                };
                                e.push(g.compose(&pi, &gs).unwrap());
                            }
                        }
                        e
                    })
                    .collect();
                for i in 0..ms.len() {
                    for j in 0..ms.len() {
                        if o.key(&ms[i]) >= o.key(&ms[j]) {
                            continue;
                        }
                        for (x, y) in exts[i].iter().zip(&exts[j]) {
                            assert!(o.key(x) < o.key(y), "{o}: {:?} < {:?} but {:?} >= {:?}", ms[i], ms[j], x, y);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn tie_break_survives_grafting_into_a_leaf() {
        let s = sig();
        let p = |t: &str| TreeMonomial::parse(t, &s).unwrap();
        let o = MonomialOrder::PathLex;
        assert!(o.key(&p("y(y(1 3) y(2 4))")) < o.key(&p("y(y(1 4) y(2 3))")));
        assert!(o.key(&p("y(y(1 x(3 5)) y(2 4))")) < o.key(&p("y(y(1 4) y(2 x(3 5)))")));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(400))]
        #[test]
        fn admissible_under_composition(n in 2usize..=4, i in any::<usize>(), j in any::<usize>(),
                                        seed in any::<u64>(), rev in any::<bool>()) {
            let s = sig();
            let all = all_monomials(&s, n).unwrap();
            let a = &all[i % all.len()];
            let b = &all[j % all.len()];
            prop_assume!(a != b);
            let o = if rev { MonomialOrder::PathLexRev } else { MonomialOrder::PathLex };
            let (lo, hi) = if o.key(a) < o.key(b) { (a, b) } else { (b, a) };
            if let Some((ca, cb)) = contexts(lo, hi, seed) {
                prop_assert!(o.key(&ca) < o.key(&cb), "{:?} {:?}", ca, cb);
            }
        }
    }
}
