//! Shuffle tree monomials.
//!
//! A monomial is stored as its preorder node sequence. Every internal
//! vertex carries a generator index and its arity; leaves carry their label.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

pub type Gen = u8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("generator `{name}` expects {expected} children, got {got}")]
    ArityMismatch {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("leaf labeling is not shuffle-admissible: {0}")]
    NotShuffle(String),
    #[error("leaf labels must be exactly 1..={0}")]
    BadLabels(usize),
    #[error("arity mismatch: {0} vs {1}")]
    ArityDiffers(usize, usize),
    #[error("invalid signature: {0}")]
    BadSignature(String),
    #[error("invalid shuffle partition: {0}")]
    BadPartition(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneratorSymbol {
    pub name: String,
    pub arity: u8,
}

/// The generators of a free shuffle operad, in their rank order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    gens: Vec<GeneratorSymbol>,
}

impl Signature {
    pub fn new(gens: Vec<GeneratorSymbol>) -> Result<Self, TreeError> {
        if gens.is_empty() {
            return Err(TreeError::BadSignature("no generators".into()));
        }
        if gens.len() > 64 {
            return Err(TreeError::BadSignature("too many generators".into()));
        }
        let mut seen = BTreeSet::new();
        for g in &gens {
            if g.arity == 0 {
                return Err(TreeError::BadSignature(format!("`{}` has arity 0", g.name)));
            }
            let ok = g
                .name
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && g.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ok {
                return Err(TreeError::BadSignature(format!("bad name `{}`", g.name)));
            }
            if !seen.insert(g.name.clone()) {
                return Err(TreeError::BadSignature(format!("duplicate `{}`", g.name)));
            }
        }
        Ok(Signature { gens })
    }

    /// Binary generators with the given names.
    pub fn binary(names: &[&str]) -> Self {
        Signature::new(
            names
                .iter()
                .map(|n| GeneratorSymbol {
                    name: n.to_string(),
                    arity: 2,
                })
                .collect(),
        )
        .expect("valid binary signature")
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn generators(&self) -> &[GeneratorSymbol] {
        &self.gens
    }

    pub fn name(&self, g: Gen) -> &str {
        &self.gens[g as usize].name
    }

    pub fn arity(&self, g: Gen) -> u8 {
        self.gens[g as usize].arity
    }

    pub fn index_of(&self, name: &str) -> Option<Gen> {
        self.gens.iter().position(|g| g.name == name).map(|i| i as Gen)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Leaf(u8),
    Op { gen: Gen, arity: u8 },
}

/// A shuffle tree monomial. The derived ordering is structural and only used
/// for canonical storage; monomial orders live in [`crate::order`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeMonomial {
    nodes: Vec<Node>,
}

/// Ordered blocks `I_1, .., I_m` of `{1..n}` with increasing minima.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ShufflePartition {
    blocks: Vec<Vec<u8>>,
}

impl ShufflePartition {
    pub fn new(mut blocks: Vec<Vec<u8>>) -> Result<Self, TreeError> {
        let mut all = Vec::new();
        for b in &mut blocks {
            if b.is_empty() {
                return Err(TreeError::BadPartition("empty block".into()));
            }
            b.sort_unstable();
            all.extend_from_slice(b);
        }
        all.sort_unstable();
        if all.iter().enumerate().any(|(i, &l)| l as usize != i + 1) {
            return Err(TreeError::BadPartition("blocks must cover 1..n once".into()));
        }
        if blocks.windows(2).any(|w| w[0][0] >= w[1][0]) {
            return Err(TreeError::BadPartition("block minima must increase".into()));
        }
        Ok(ShufflePartition { blocks })
    }

    /// The partition `{1}, {2}, .., {n}`.
    pub fn trivial(n: usize) -> Self {
        ShufflePartition {
            blocks: (1..=n as u8).map(|i| vec![i]).collect(),
        }
    }

    pub fn blocks(&self) -> &[Vec<u8>] {
        &self.blocks
    }

    pub fn size(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }
}

/// Every shuffle partition of `{1..n}` into exactly `m` blocks.
pub fn shuffle_partitions(n: usize, m: usize) -> Vec<ShufflePartition> {
    let mut out = Vec::new();
    if m == 0 || m > n {
        return out;
    }
    // restricted growth strings: element i joins an open block or opens the next
    fn rec(i: usize, n: usize, m: usize, blocks: &mut Vec<Vec<u8>>, out: &mut Vec<ShufflePartition>) {
        if i > n {
            if blocks.len() == m {
                out.push(ShufflePartition {
                    blocks: blocks.clone(),
                });
            }
            return;
        }
        if m - blocks.len() > n - i + 1 {
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(i as u8);
            rec(i + 1, n, m, blocks, out);
            blocks[b].pop();
        }
        if blocks.len() < m {
            blocks.push(vec![i as u8]);
            rec(i + 1, n, m, blocks, out);
            blocks.pop();
        }
    }
    rec(1, n, m, &mut Vec::new(), &mut out);
    out
}

/// One embedding of a pattern as a divisor of a host monomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Occurrence {
    /// Child indices leading from the host root to the divisor's root.
    pub path: Vec<usize>,
    /// Preorder index of the divisor's root in the host.
    pub root: usize,
    /// Host preorder indices of the divisor's internal vertices.
    pub vertices: Vec<usize>,
    /// `hanging[j]` is the host subtree plugged into pattern leaf `j + 1`.
    pub hanging: Vec<usize>,
    /// `leaf_map[j]` is the minimal host leaf below pattern leaf `j + 1`.
    pub leaf_map: Vec<u8>,
}

impl Occurrence {
    pub fn shares_vertex(&self, other: &Occurrence) -> bool {
        self.vertices.iter().any(|v| other.vertices.contains(v))
    }
}

impl TreeMonomial {
    pub fn leaf(label: u8) -> Self {
        TreeMonomial {
            nodes: vec![Node::Leaf(label)],
        }
    }

    /// The arity-one identity monomial.
    pub fn identity() -> Self {
        Self::leaf(1)
    }

    /// Builds `gen(children..)` where children already carry final labels.
    pub fn op(sig: &Signature, gen: Gen, children: Vec<TreeMonomial>) -> Result<Self, TreeError> {
        let expected = sig.arity(gen) as usize;
        if children.len() != expected {
            return Err(TreeError::ArityMismatch {
                name: sig.name(gen).to_string(),
                expected,
                got: children.len(),
            });
        }
        let mut nodes = vec![Node::Op {
            gen,
            arity: expected as u8,
        }];
        let mut prev_min = 0u8;
        for c in &children {
            let m = c.min_leaf();
            if m <= prev_min {
                return Err(TreeError::NotShuffle(format!(
                    "child minima not increasing under `{}`",
                    sig.name(gen)
                )));
            }
            prev_min = m;
            nodes.extend_from_slice(&c.nodes);
        }
        let t = TreeMonomial { nodes };
        t.check_labels()?;
        Ok(t)
    }

    pub(crate) fn from_nodes_unchecked(nodes: Vec<Node>) -> Self {
        let t = TreeMonomial { nodes };
        debug_assert!(t.validate().is_ok(), "malformed monomial {:?}", t.nodes);
        t
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self.nodes[0], Node::Leaf(_))
    }

    pub fn arity(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf(_))).count()
    }

    /// Number of internal vertices.
    pub fn degree(&self) -> usize {
        self.nodes.len() - self.arity()
    }

    pub fn root_gen(&self) -> Option<Gen> {
        match self.nodes[0] {
            Node::Op { gen, .. } => Some(gen),
            Node::Leaf(_) => None,
        }
    }

    /// Leaf labels in planar order.
    pub fn leaf_word(&self) -> Vec<u8> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Leaf(l) => Some(*l),
                _ => None,
            })
            .collect()
    }

    pub fn min_leaf(&self) -> u8 {
        self.subtree_min(0)
    }

    /// One past the last preorder index of the subtree rooted at `i`.
    pub fn subtree_end(&self, i: usize) -> usize {
        subtree_end(&self.nodes, i)
    }

    pub fn subtree_min(&self, i: usize) -> u8 {
        let end = self.subtree_end(i);
        self.nodes[i..end]
            .iter()
            .filter_map(|n| match n {
                Node::Leaf(l) => Some(*l),
                _ => None,
            })
            .min()
            .expect("subtree has a leaf")
    }

    /// Preorder indices of the children of vertex `i`.
    pub fn children(&self, i: usize) -> Vec<usize> {
        children(&self.nodes, i)
    }

    /// The subtree at `i` with its own labels kept.
    pub fn subtree(&self, i: usize) -> TreeMonomial {
        TreeMonomial {
            nodes: self.nodes[i..self.subtree_end(i)].to_vec(),
        }
    }

    /// Child subtrees of the root, relabeled to `1..k` each, together with
    /// the shuffle partition of the root's leaves.
    pub fn decompose(&self) -> Option<(Gen, ShufflePartition, Vec<TreeMonomial>)> {
        let gen = self.root_gen()?;
        let mut blocks = Vec::new();
        let mut subs = Vec::new();
        for c in self.children(0) {
            let mut sub = self.subtree(c);
            let mut labels = sub.leaf_word();
            labels.sort_unstable();
            sub.standardize();
            blocks.push(labels);
            subs.push(sub);
        }
        Some((gen, ShufflePartition { blocks }, subs))
    }

    /// Renames leaves to `1..n` preserving their relative order.
    pub fn standardize(&mut self) {
        let mut labels = self.leaf_word();
        labels.sort_unstable();
        let mut rank = [0u8; 256];
        for (r, &l) in labels.iter().enumerate() {
            rank[l as usize] = r as u8 + 1;
        }
        for n in &mut self.nodes {
            if let Node::Leaf(l) = n {
                *l = rank[*l as usize];
            }
        }
    }

    /// Applies `f` to every leaf label.
    pub fn relabel(&self, f: impl Fn(u8) -> u8) -> TreeMonomial {
        TreeMonomial {
            nodes: self
                .nodes
                .iter()
                .map(|n| match n {
                    Node::Leaf(l) => Node::Leaf(f(*l)),
                    op => *op,
                })
                .collect(),
        }
    }

    fn check_labels(&self) -> Result<(), TreeError> {
        let mut labels = self.leaf_word();
        let n = labels.len();
        labels.sort_unstable();
        let mut prev = 0u8;
        for &l in &labels {
            if l == prev || l == 0 {
                return Err(TreeError::NotShuffle("repeated leaf label".into()));
            }
            prev = l;
        }
        let _ = n;
        Ok(())
    }

    /// Full well-formedness check: structure, label set `1..n`, shuffle condition.
    pub fn validate(&self) -> Result<(), TreeError> {
        if self.nodes.is_empty() || subtree_end(&self.nodes, 0) != self.nodes.len() {
            return Err(TreeError::NotShuffle("malformed node sequence".into()));
        }
        let mut labels = self.leaf_word();
        let n = labels.len();
        labels.sort_unstable();
        if labels.iter().enumerate().any(|(i, &l)| l as usize != i + 1) {
            return Err(TreeError::BadLabels(n));
        }
        for i in 0..self.nodes.len() {
            if let Node::Op { .. } = self.nodes[i] {
                let mins: Vec<u8> = self.children(i).iter().map(|&c| self.subtree_min(c)).collect();
                if mins.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(TreeError::NotShuffle(format!(
                        "child minima {mins:?} at vertex {i}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn parse(text: &str, sig: &Signature) -> Result<TreeMonomial, TreeError> {
        let mut p = MonoParser {
            src: text.as_bytes(),
            pos: 0,
            sig,
        };
        p.skip_ws();
        let t = p.monomial()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("trailing input"));
        }
        let n = t.arity();
        let mut labels = t.leaf_word();
        labels.sort_unstable();
        if labels.iter().enumerate().any(|(i, &l)| l as usize != i + 1) {
            return Err(TreeError::BadLabels(n));
        }
        t.validate()?;
        Ok(t)
    }

    pub fn display<'a>(&'a self, sig: &'a Signature) -> MonomialDisplay<'a> {
        MonomialDisplay { t: self, sig }
    }

    /// Shuffle composition: leaf `i` of `self` receives `gs[i-1]`, whose labels
    /// are spread over block `i` of `pi` in increasing order.
    pub fn compose(&self, pi: &ShufflePartition, gs: &[TreeMonomial]) -> Result<TreeMonomial, TreeError> {
        let n = self.arity();
        if gs.len() != n || pi.blocks.len() != n {
            return Err(TreeError::ArityDiffers(n, gs.len()));
        }
        for (b, g) in pi.blocks.iter().zip(gs) {
            if b.len() != g.arity() {
                return Err(TreeError::ArityDiffers(b.len(), g.arity()));
            }
        }
        let mut nodes = Vec::with_capacity(self.nodes.len() + gs.iter().map(|g| g.nodes.len()).sum::<usize>());
        for node in &self.nodes {
            match node {
                Node::Leaf(l) => {
                    let i = *l as usize - 1;
                    let block = &pi.blocks[i];
                    nodes.extend(gs[i].nodes.iter().map(|m| match m {
                        Node::Leaf(k) => Node::Leaf(block[*k as usize - 1]),
                        op => *op,
                    }));
                }
                op => nodes.push(*op),
            }
        }
        Ok(TreeMonomial::from_nodes_unchecked(nodes))
    }

    /// Builds `gen(children..)` from standardized children and a partition.
    pub fn graft_root(gen: Gen, arity: u8, pi: &ShufflePartition, children: &[&TreeMonomial]) -> TreeMonomial {
        let mut nodes = Vec::with_capacity(1 + children.iter().map(|c| c.nodes.len()).sum::<usize>());
        nodes.push(Node::Op { gen, arity });
        for (block, c) in pi.blocks.iter().zip(children) {
            nodes.extend(c.nodes.iter().map(|m| match m {
                Node::Leaf(k) => Node::Leaf(block[*k as usize - 1]),
                op => *op,
            }));
        }
        TreeMonomial::from_nodes_unchecked(nodes)
    }

    /// Replaces the divisor at `occ` by `replacement` (a monomial of the
    /// pattern's arity). The result is again a shuffle tree.
    pub fn graft(&self, occ: &Occurrence, replacement: &TreeMonomial) -> TreeMonomial {
        let end = self.subtree_end(occ.root);
        let mut nodes = Vec::with_capacity(self.nodes.len() + replacement.nodes.len());
        nodes.extend_from_slice(&self.nodes[..occ.root]);
        for node in &replacement.nodes {
            match node {
                Node::Leaf(j) => {
                    let h = occ.hanging[*j as usize - 1];
                    nodes.extend_from_slice(&self.nodes[h..self.subtree_end(h)]);
                }
                op => nodes.push(*op),
            }
        }
        nodes.extend_from_slice(&self.nodes[end..]);
        TreeMonomial::from_nodes_unchecked(nodes)
    }

    fn path_to(&self, target: usize) -> Vec<usize> {
        let mut path = Vec::new();
        let mut cur = 0;
        while cur != target {
            let ch = self.children(cur);
            let k = ch
                .iter()
                .rposition(|&c| c <= target)
                .expect("target inside subtree");
            path.push(k);
            cur = ch[k];
        }
        path
    }

    /// Matches `pattern` with its root at host vertex `v`, if the shapes,
    /// generators and standardized hanging minima all agree.
    pub fn occurrence_at(&self, pattern: &TreeMonomial, v: usize) -> Option<Occurrence> {
        let mut vertices = Vec::new();
        let mut slots: Vec<(u8, usize)> = Vec::new();
        let mut stack = vec![(0usize, v)];
        while let Some((p, h)) = stack.pop() {
            match pattern.nodes[p] {
                Node::Leaf(l) => slots.push((l, h)),
                Node::Op { gen, arity } => {
                    match self.nodes[h] {
                        Node::Op { gen: hg, arity: ha } if hg == gen && ha == arity => {}
                        _ => return None,
                    }
                    vertices.push(h);
                    let pc = pattern.children(p);
                    let hc = self.children(h);
                    for (a, b) in pc.into_iter().zip(hc).rev() {
                        stack.push((a, b));
                    }
                }
            }
        }
        // slots are in planar order; the pattern leaf labels must be the
        // ranks of the hanging minima
        let mins: Vec<u8> = slots.iter().map(|&(_, h)| self.subtree_min(h)).collect();
        let mut sorted = mins.clone();
        sorted.sort_unstable();
        let mut hanging = vec![0usize; slots.len()];
        let mut leaf_map = vec![0u8; slots.len()];
        for (&(l, h), m) in slots.iter().zip(&mins) {
            let rank = sorted.binary_search(m).expect("present") + 1;
            if rank != l as usize {
                return None;
            }
            hanging[rank - 1] = h;
            leaf_map[rank - 1] = *m;
        }
        Some(Occurrence {
            path: self.path_to(v),
            root: v,
            vertices,
            hanging,
            leaf_map,
        })
    }

    /// All connected divisors rooted at vertex `v` that contain at least one
    /// internal vertex, as standardized patterns with their occurrences.
    pub fn cuts_at(&self, v: usize) -> Vec<(TreeMonomial, Occurrence)> {
        if matches!(self.nodes[v], Node::Leaf(_)) {
            return Vec::new();
        }
        // each partial cut: pattern nodes with placeholder leaves, host
        // vertices, hanging host positions in planar order
        type Partial = (Vec<Node>, Vec<usize>, Vec<usize>);
        fn expand(t: &TreeMonomial, h: usize, include: bool) -> Vec<Partial> {
            if !include || matches!(t.nodes[h], Node::Leaf(_)) {
                return vec![(vec![Node::Leaf(0)], Vec::new(), vec![h])];
            }
            let mut acc: Vec<Partial> = vec![(vec![t.nodes[h]], vec![h], Vec::new())];
            for c in t.children(h) {
                let mut opts = expand(t, c, false);
                if matches!(t.nodes[c], Node::Op { .. }) {
                    opts.extend(expand(t, c, true));
                }
                let mut next = Vec::with_capacity(acc.len() * opts.len());
                for (an, av, ah) in &acc {
                    for (on, ov, oh) in &opts {
                        let mut n = an.clone();
                        n.extend_from_slice(on);
                        let mut vv = av.clone();
                        vv.extend_from_slice(ov);
                        let mut hh = ah.clone();
                        hh.extend_from_slice(oh);
                        next.push((n, vv, hh));
                    }
                }
                acc = next;
            }
            acc
        }
        let path = self.path_to(v);
        expand(self, v, true)
            .into_iter()
            .map(|(mut pnodes, vertices, slots)| {
                let mins: Vec<u8> = slots.iter().map(|&h| self.subtree_min(h)).collect();
                let mut order: Vec<usize> = (0..slots.len()).collect();
                order.sort_unstable_by_key(|&i| mins[i]);
                let mut rank = vec![0u8; slots.len()];
                for (r, &i) in order.iter().enumerate() {
                    rank[i] = r as u8 + 1;
                }
                let mut k = 0;
                for n in &mut pnodes {
                    if let Node::Leaf(l) = n {
                        *l = rank[k];
                        k += 1;
                    }
                }
                let hanging = order.iter().map(|&i| slots[i]).collect();
                let leaf_map = order.iter().map(|&i| mins[i]).collect();
                (
                    TreeMonomial::from_nodes_unchecked(pnodes),
                    Occurrence {
                        path: path.clone(),
                        root: v,
                        vertices,
                        hanging,
                        leaf_map,
                    },
                )
            })
            .collect()
    }

    /// Preorder indices of the internal vertices.
    pub fn internal_vertices(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&i| matches!(self.nodes[i], Node::Op { .. }))
            .collect()
    }
}

fn subtree_end(nodes: &[Node], i: usize) -> usize {
    let mut need = 1usize;
    let mut j = i;
    while need > 0 {
        match nodes[j] {
            Node::Leaf(_) => need -= 1,
            Node::Op { arity, .. } => need += arity as usize - 1,
        }
        j += 1;
    }
    j
}

fn children(nodes: &[Node], i: usize) -> Vec<usize> {
    match nodes[i] {
        Node::Leaf(_) => Vec::new(),
        Node::Op { arity, .. } => {
            let mut out = Vec::with_capacity(arity as usize);
            let mut j = i + 1;
            for _ in 0..arity {
                out.push(j);
                j = subtree_end(nodes, j);
            }
            out
        }
    }
}

/// Every occurrence of `pattern` as a divisor of `host`.
pub fn find_occurrences(pattern: &TreeMonomial, host: &TreeMonomial) -> Vec<Occurrence> {
    if pattern.arity() > host.arity() {
        return Vec::new();
    }
    if pattern.is_leaf() {
        // the identity divides everything exactly at each leaf
        return (0..host.nodes.len())
            .filter(|&i| matches!(host.nodes[i], Node::Leaf(_)) && host.nodes.len() == 1)
            .map(|i| Occurrence {
                path: Vec::new(),
                root: i,
                vertices: Vec::new(),
                hanging: vec![i],
                leaf_map: vec![host.min_leaf()],
            })
            .collect();
    }
    host.internal_vertices()
        .into_iter()
        .filter_map(|v| host.occurrence_at(pattern, v))
        .collect()
}

/// A monomial together with two occurrences that jointly cover it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Overlap {
    pub monomial: TreeMonomial,
    pub first: Occurrence,
    pub second: Occurrence,
}

/// Minimal monomials of arity at most `max_arity` containing occurrences of
/// `t1` and `t2` that share an internal vertex. When `t1 == t2` the two
/// occurrences must differ.
pub fn overlaps(t1: &TreeMonomial, t2: &TreeMonomial, max_arity: usize) -> Vec<Overlap> {
    joint_multiples(t1, t2, max_arity, true)
}

/// The monomials of [`overlaps`], deduplicated and sorted structurally.
pub fn common_multiples(t1: &TreeMonomial, t2: &TreeMonomial, max_arity: usize) -> Vec<TreeMonomial> {
    let set: BTreeSet<TreeMonomial> = overlaps(t1, t2, max_arity)
        .into_iter()
        .map(|o| o.monomial)
        .collect();
    set.into_iter().collect()
}

/// Like [`common_multiples`] but also admitting occurrences that merely
/// touch: the root of one sits directly on a leaf slot of the other.
pub fn adjacent_multiples(t1: &TreeMonomial, t2: &TreeMonomial, max_arity: usize) -> Vec<TreeMonomial> {
    let set: BTreeSet<TreeMonomial> = joint_multiples(t1, t2, max_arity, false)
        .into_iter()
        .map(|o| o.monomial)
        .collect();
    set.into_iter().collect()
}

/// Unlabeled planar shape: preorder nodes with every leaf labeled 0.
fn shape_of(t: &TreeMonomial) -> Vec<Node> {
    t.nodes
        .iter()
        .map(|n| match n {
            Node::Leaf(_) => Node::Leaf(0),
            op => *op,
        })
        .collect()
}

/// Places shape `b` with its root at preorder position `at` of shape `a`,
/// requiring agreement on common internal vertices. Returns the union shape
/// and the root position of `b` inside it.
fn merge_shapes(a: &[Node], b: &[Node], at: usize) -> Option<Vec<Node>> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    out.extend_from_slice(&a[..at]);
    // walk both from the anchor
    fn walk(a: &[Node], ia: usize, b: &[Node], ib: usize, out: &mut Vec<Node>) -> Option<(usize, usize)> {
        match (a[ia], b[ib]) {
            (Node::Leaf(_), _) => {
                let eb = subtree_end(b, ib);
                out.extend_from_slice(&b[ib..eb]);
                Some((ia + 1, eb))
            }
            (_, Node::Leaf(_)) => {
                let ea = subtree_end(a, ia);
                out.extend_from_slice(&a[ia..ea]);
                Some((ea, ib + 1))
            }
            (Node::Op { gen: g1, arity: k1 }, Node::Op { gen: g2, arity: k2 }) => {
                if g1 != g2 || k1 != k2 {
                    return None;
                }
                out.push(a[ia]);
                let (mut ja, mut jb) = (ia + 1, ib + 1);
                for _ in 0..k1 {
                    let (na, nb) = walk(a, ja, b, jb, out)?;
                    ja = na;
                    jb = nb;
                }
                Some((ja, jb))
            }
        }
    }
    let (end_a, _) = walk(a, at, b, 0, &mut out)?;
    out.extend_from_slice(&a[end_a..]);
    Some(out)
}

/// Shapes where `b`'s root hangs directly off a leaf slot of `a`.
fn stack_shapes(a: &[Node], b: &[Node]) -> Vec<Vec<Node>> {
    let mut out = Vec::new();
    for i in 0..a.len() {
        if matches!(a[i], Node::Leaf(_)) {
            let mut s = a[..i].to_vec();
            s.extend_from_slice(b);
            s.extend_from_slice(&a[i + 1..]);
            out.push(s);
        }
    }
    out
}

/// All shuffle-admissible labelings of a shape with `n` leaves.
pub(crate) fn shuffle_labelings(shape: &[Node]) -> Vec<TreeMonomial> {
    let n = shape.iter().filter(|x| matches!(x, Node::Leaf(_))).count();
    let mut out = Vec::new();
    let mut labels: Vec<u8> = (1..=n as u8).collect();
    permute(&mut labels, 0, &mut |perm| {
        let mut k = 0;
        let nodes: Vec<Node> = shape
            .iter()
            .map(|x| match x {
                Node::Leaf(_) => {
                    k += 1;
                    Node::Leaf(perm[k - 1])
                }
                op => *op,
            })
            .collect();
        let t = TreeMonomial { nodes };
        if t.validate().is_ok() {
            out.push(t);
        }
    });
    out
}

fn permute(xs: &mut [u8], k: usize, f: &mut impl FnMut(&[u8])) {
    if k == xs.len() {
        f(xs);
        return;
    }
    for i in k..xs.len() {
        xs.swap(k, i);
        permute(xs, k + 1, f);
        xs.swap(k, i);
    }
}

fn joint_multiples(t1: &TreeMonomial, t2: &TreeMonomial, max_arity: usize, shared_only: bool) -> Vec<Overlap> {
    if t1.is_leaf() || t2.is_leaf() {
        return Vec::new();
    }
    let s1 = shape_of(t1);
    let s2 = shape_of(t2);
    let mut shapes: BTreeSet<Vec<Node>> = BTreeSet::new();
    for (a, b) in [(&s1, &s2), (&s2, &s1)] {
        for at in 0..a.len() {
            if matches!(a[at], Node::Op { .. }) {
                if let Some(s) = merge_shapes(a, b, at) {
                    shapes.insert(s);
                }
            }
        }
        if !shared_only {
            shapes.extend(stack_shapes(a, b));
        }
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for shape in shapes {
        let arity = shape.iter().filter(|x| matches!(x, Node::Leaf(_))).count();
        if arity > max_arity {
            continue;
        }
        let degree = shape.len() - arity;
        for m in shuffle_labelings(&shape) {
            let o1 = find_occurrences(t1, &m);
            let o2 = find_occurrences(t2, &m);
            for a in &o1 {
                for b in &o2 {
                    if t1 == t2 && a == b {
                        continue;
                    }
                    let shared = a.shares_vertex(b);
                    if shared_only && !shared {
                        continue;
                    }
                    let mut union: Vec<usize> = a.vertices.iter().chain(&b.vertices).copied().collect();
                    union.sort_unstable();
                    union.dedup();
                    if union.len() != degree {
                        continue;
                    }
                    if !shared && !touching(&m, a, b) {
                        continue;
                    }
                    if seen.insert((m.clone(), a.root, b.root)) {
                        out.push(Overlap {
                            monomial: m.clone(),
                            first: a.clone(),
                            second: b.clone(),
                        });
                    }
                }
            }
        }
    }
    out
}

fn touching(m: &TreeMonomial, a: &Occurrence, b: &Occurrence) -> bool {
    a.vertices.iter().any(|&v| m.children(v).contains(&b.root))
        || b.vertices.iter().any(|&v| m.children(v).contains(&a.root))
}

/// Every arity-`n` monomial over `sig`, by composing at the root. Unary
/// generators would make this infinite and are rejected.
pub fn all_monomials(sig: &Signature, n: usize) -> Result<Vec<TreeMonomial>, TreeError> {
    if sig.generators().iter().any(|g| g.arity < 2) {
        return Err(TreeError::BadSignature(
            "enumeration needs generators of arity at least 2".into(),
        ));
    }
    let mut table: Vec<Vec<TreeMonomial>> = vec![Vec::new(), vec![TreeMonomial::identity()]];
    for k in 2..=n {
        let mut level = Vec::new();
        for g in 0..sig.len() as Gen {
            let a = sig.arity(g) as usize;
            for pi in shuffle_partitions(k, a) {
                let lists: Vec<&Vec<TreeMonomial>> = pi.blocks.iter().map(|b| &table[b.len()]).collect();
                for_each_product(&lists, &mut |children| {
                    level.push(TreeMonomial::graft_root(g, a as u8, &pi, children));
                });
            }
        }
        table.push(level);
    }
    Ok(table.swap_remove(n.max(1)))
}

/// Calls `f` on every choice of one element from each list.
pub(crate) fn for_each_product<'a, T>(lists: &[&'a Vec<T>], f: &mut impl FnMut(&[&'a T])) {
    fn rec<'a, T>(lists: &[&'a Vec<T>], i: usize, cur: &mut Vec<&'a T>, f: &mut impl FnMut(&[&'a T])) {
        if i == lists.len() {
            f(cur);
            return;
        }
        for x in lists[i].iter() {
            cur.push(x);
            rec(lists, i + 1, cur, f);
            cur.pop();
        }
    }
    rec(lists, 0, &mut Vec::with_capacity(lists.len()), f);
}

/// Maps each standardized divisor pattern to a value; used to look up every
/// divisor of a host in one pass over its cuts.
#[derive(Debug, Clone)]
pub struct PatternIndex<V> {
    map: HashMap<TreeMonomial, V>,
}

impl<V> Default for PatternIndex<V> {
    fn default() -> Self {
        PatternIndex { map: HashMap::new() }
    }
}

impl<V> PatternIndex<V> {
    pub fn insert(&mut self, pattern: TreeMonomial, v: V) {
        self.map.insert(pattern, v);
    }

    pub fn get(&self, pattern: &TreeMonomial) -> Option<&V> {
        self.map.get(pattern)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Divisors with root at `v`.
    pub fn matches_at<'a>(&'a self, host: &TreeMonomial, v: usize) -> Vec<(&'a V, Occurrence)> {
        if self.map.is_empty() {
            return Vec::new();
        }
        host.cuts_at(v)
            .into_iter()
            .filter_map(|(p, occ)| self.map.get(&p).map(|val| (val, occ)))
            .collect()
    }

    /// All divisors of `host`, vertices visited in preorder.
    pub fn matches<'a>(&'a self, host: &TreeMonomial) -> Vec<(&'a V, Occurrence)> {
        host.internal_vertices()
            .into_iter()
            .flat_map(|v| self.matches_at(host, v))
            .collect()
    }

    /// The first divisor in preorder, smallest cut first.
    pub fn first_match<'a>(&'a self, host: &TreeMonomial) -> Option<(&'a V, Occurrence)> {
        if self.map.is_empty() {
            return None;
        }
        host.internal_vertices()
            .into_iter()
            .find_map(|v| self.matches_at(host, v).into_iter().next())
    }
}

struct MonoParser<'a> {
    src: &'a [u8],
    pos: usize,
    sig: &'a Signature,
}

impl MonoParser<'_> {
    fn err(&self, msg: &str) -> TreeError {
        TreeError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_whitespace() || self.src[self.pos] == b',') {
            self.pos += 1;
        }
    }

    fn monomial(&mut self) -> Result<TreeMonomial, TreeError> {
        let start = self.pos;
        match self.src.get(self.pos) {
            Some(c) if c.is_ascii_digit() => {
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                let v: u32 = s.parse().map_err(|_| self.err("bad leaf label"))?;
                if v == 0 || v > 200 {
                    self.pos = start;
                    return Err(self.err("leaf label out of range"));
                }
                Ok(TreeMonomial::leaf(v as u8))
            }
            Some(c) if c.is_ascii_alphabetic() || *c == b'_' => {
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                let gen = self
                    .sig
                    .index_of(name)
                    .ok_or_else(|| TreeError::UnknownGenerator(name.to_string()))?;
                self.skip_inline_ws();
                if self.src.get(self.pos) != Some(&b'(') {
                    return Err(self.err("expected `(`"));
                }
                self.pos += 1;
                let mut children = Vec::new();
                loop {
                    self.skip_ws();
                    match self.src.get(self.pos) {
                        Some(b')') => {
                            self.pos += 1;
                            break;
                        }
                        None => return Err(self.err("unclosed `(`")),
                        _ => children.push(self.monomial()?),
                    }
                }
                let at = start;
                TreeMonomial::op(self.sig, gen, children).map_err(|e| match e {
                    TreeError::NotShuffle(m) => TreeError::NotShuffle(format!("{m} (offset {at})")),
                    other => other,
                })
            }
            _ => Err(self.err("expected a leaf label or generator")),
        }
    }

    fn skip_inline_ws(&mut self) {
        while self.pos < self.src.len() && (self.src[self.pos] == b' ' || self.src[self.pos] == b'\t') {
            self.pos += 1;
        }
    }
}

/// Parses a monomial that starts at byte `pos` of `src`; returns the monomial
/// and the offset just past it. Used by the element parser.
pub(crate) fn parse_monomial_prefix(src: &str, pos: usize, sig: &Signature) -> Result<(TreeMonomial, usize), TreeError> {
    let mut p = MonoParser {
        src: src.as_bytes(),
        pos,
        sig,
    };
    let t = p.monomial()?;
    Ok((t, p.pos))
}

pub struct MonomialDisplay<'a> {
    t: &'a TreeMonomial,
    sig: &'a Signature,
}

impl fmt::Display for MonomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &TreeMonomial, i: usize, sig: &Signature, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match t.nodes[i] {
                Node::Leaf(l) => write!(f, "{l}"),
                Node::Op { gen, .. } => {
                    write!(f, "{}(", sig.name(gen))?;
                    for (k, c) in t.children(i).into_iter().enumerate() {
                        if k > 0 {
                            f.write_str(" ")?;
                        }
                        go(t, c, sig, f)?;
                    }
                    f.write_str(")")
                }
            }
        }
        go(self.t, 0, self.sig, f)
    }
}

impl fmt::Debug for TreeMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &TreeMonomial, i: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match t.nodes[i] {
                Node::Leaf(l) => write!(f, "{l}"),
                Node::Op { gen, .. } => {
                    write!(f, "g{gen}(")?;
                    for (k, c) in t.children(i).into_iter().enumerate() {
                        if k > 0 {
                            f.write_str(" ")?;
                        }
                        go(t, c, f)?;
                    }
                    f.write_str(")")
                }
            }
        }
        go(self, 0, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xyz() -> Signature {
        Signature::binary(&["x", "y", "z"])
    }

    fn m(s: &str) -> TreeMonomial {
        TreeMonomial::parse(s, &xyz()).unwrap()
    }

    #[test]
    fn arity_and_degree() {
        assert_eq!(m("x(1 2)").arity(), 2);
        assert_eq!(m("1").arity(), 1);
        assert_eq!(m("z(z(1 2) 3)").arity(), 3);
        assert_eq!(m("z(z(1 2) 3)").degree(), 2);
    }

    #[test]
    fn parse_print_round_trip() {
        let sig = xyz();
        for s in ["x(y(1 3) 2)", "z(1 x(2 3))", "1", "y(z(x(1 4) 2) 3)"] {
            assert_eq!(m(s).display(&sig).to_string(), s);
        }
    }

    #[test]
    fn parse_rejects_non_shuffle() {
        let sig = xyz();
        assert!(matches!(TreeMonomial::parse("x(2 1)", &sig), Err(TreeError::NotShuffle(_))));
        assert!(matches!(TreeMonomial::parse("x(1 3)", &sig), Err(TreeError::BadLabels(_))));
        assert!(matches!(TreeMonomial::parse("w(1 2)", &sig), Err(TreeError::UnknownGenerator(_))));
        assert!(matches!(TreeMonomial::parse("x(1 2 3)", &sig), Err(TreeError::ArityMismatch { .. })));
        assert!(TreeMonomial::parse("x(1 2", &sig).is_err());
    }

    #[test]
    fn monomial_counts() {
        // 3^(n-1) (2n-3)!!
        let sig = xyz();
        let counts: Vec<usize> = (1..=5).map(|n| all_monomials(&sig, n).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 3, 27, 405, 8505]);
        for t in all_monomials(&sig, 4).unwrap() {
            t.validate().unwrap();
        }
    }

    #[test]
    fn partitions_counted_by_stirling() {
        assert_eq!(shuffle_partitions(4, 2).len(), 7);
        assert_eq!(shuffle_partitions(5, 3).len(), 25);
        assert!(ShufflePartition::new(vec![vec![2], vec![1]]).is_err());
    }

    #[test]
    fn occurrences_of_bracket_in_nested_bracket() {
        let occ = find_occurrences(&m("z(1 2)"), &m("z(z(1 2) 3)"));
        assert_eq!(occ.len(), 2);
        assert!(find_occurrences(&m("x(1 2)"), &m("z(1 2)")).is_empty());
        let t = m("x(z(1 3) 2)");
        let same = find_occurrences(&t, &t);
        assert_eq!(same.len(), 1);
        assert_eq!(same[0].root, 0);
    }

    #[test]
    fn occurrence_respects_leaf_order() {
        // z(z(1 3) 2) contains z(1 2) at the root but not z(z(1 2) 3)
        assert!(find_occurrences(&m("z(z(1 2) 3)"), &m("z(z(1 3) 2)")).is_empty());
        let occ = find_occurrences(&m("z(z(1 3) 2)"), &m("x(z(z(1 4) 2) 3)"));
        assert_eq!(occ.len(), 1);
        assert_eq!(occ[0].path, vec![0]);
        assert_eq!(occ[0].leaf_map, vec![1, 2, 4]);
    }

    #[test]
    fn graft_of_pattern_reconstructs_host() {
        let sig = xyz();
        for host in all_monomials(&sig, 4).unwrap() {
            for v in host.internal_vertices() {
                for (p, occ) in host.cuts_at(v) {
                    assert_eq!(host.graft(&occ, &p), host);
                    assert_eq!(host.occurrence_at(&p, v).as_ref(), Some(&occ));
                }
            }
        }
    }

    #[test]
    fn compose_unit_and_example() {
        let f = m("z(1 2)");
        let id = TreeMonomial::identity();
        assert_eq!(f.compose(&ShufflePartition::trivial(2), &[id.clone(), id.clone()]).unwrap(), f);
        let pi = ShufflePartition::new(vec![vec![1, 2], vec![3]]).unwrap();
        assert_eq!(f.compose(&pi, &[m("z(1 2)"), id]).unwrap(), m("z(z(1 2) 3)"));
    }

    #[test]
    fn overlap_of_distinct_generators_is_empty() {
        assert!(common_multiples(&m("x(1 2)"), &m("z(1 2)"), 5).is_empty());
        assert!(common_multiples(&m("z(1 2)"), &m("z(1 2)"), 5).is_empty());
    }

    #[test]
    fn adjacent_self_multiples_at_arity_three() {
        let z = adjacent_multiples(&m("z(1 2)"), &m("z(1 2)"), 3);
        let want: BTreeSet<_> = ["z(z(1 2) 3)", "z(1 z(2 3))", "z(z(1 3) 2)"].into_iter().map(m).collect();
        assert_eq!(z.into_iter().collect::<BTreeSet<_>>(), want);
        let x = adjacent_multiples(&m("x(1 2)"), &m("x(1 2)"), 3);
        assert_eq!(x.len(), 3);
    }
}
