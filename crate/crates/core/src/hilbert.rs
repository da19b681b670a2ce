//! Dimension tables: normal monomials per arity under a completed basis.

use std::collections::BTreeMap;
use std::fmt;

use crate::groebner::{GroebnerBasis, GroebnerError};
use crate::par::{self, Parallelism};
use crate::tree::{for_each_product, shuffle_partitions, TreeMonomial};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionTable {
    pub presentation_name: String,
    pub order_id: String,
    pub entries: BTreeMap<usize, usize>,
}

impl DimensionTable {
    pub fn dims(&self) -> Vec<usize> {
        self.entries.values().copied().collect()
    }

    /// `n,dim` header followed by one row per arity.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,dim\n");
        for (n, d) in &self.entries {
            s.push_str(&format!("{n},{d}\n"));
        }
        s
    }
}

/// Two aligned rows, arities above dimensions.
impl fmt::Display for DimensionTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} ({})", self.presentation_name, self.order_id)?;
        let widths: Vec<usize> = self
            .entries
            .iter()
            .map(|(n, d)| n.to_string().len().max(d.to_string().len()))
            .collect();
        write!(f, "n  ")?;
        for ((n, _), w) in self.entries.iter().zip(&widths) {
            write!(f, " {n:>w$}")?;
        }
        write!(f, "\ndim")?;
        for ((_, d), w) in self.entries.iter().zip(&widths) {
            write!(f, " {d:>w$}")?;
        }
        writeln!(f)
    }
}

pub fn count_normal_monomials(b: &GroebnerBasis, n: usize) -> Result<usize, GroebnerError> {
    count_with(b, n, Parallelism::default())
}

/// Normal monomials of arity `n` are exactly the root forms over normal
/// children that have no divisor rooted at the root, so only the lower
/// arities are materialized and the top level is counted in parallel over
/// (generator, partition) pairs.
pub fn count_with(b: &GroebnerBasis, n: usize, mode: Parallelism) -> Result<usize, GroebnerError> {
    if n > b.max_arity() {
        return Err(GroebnerError::ArityExceeded {
            arity: n,
            max: b.max_arity(),
        });
    }
    if n < 2 {
        return Ok(n);
    }
    let lower: Vec<Vec<TreeMonomial>> = std::iter::once(Ok(Vec::new()))
        .chain((1..n).map(|k| b.normal_monomials(k)))
        .collect::<Result<_, _>>()?;
    let sig = b.signature();
    let jobs: Vec<(u8, crate::tree::ShufflePartition)> = (0..sig.len() as u8)
        .flat_map(|g| shuffle_partitions(n, sig.arity(g) as usize).into_iter().map(move |pi| (g, pi)))
        .collect();
    let counts = par::map(mode, &jobs, |(g, pi)| {
        let a = sig.arity(*g);
        let lists: Vec<&Vec<TreeMonomial>> = pi.blocks().iter().map(|blk| &lower[blk.len()]).collect();
        let mut c = 0usize;
        for_each_product(&lists, &mut |children| {
            let m = TreeMonomial::graft_root(*g, a, pi, children);
            if b.index().matches_at(&m, 0).is_empty() {
                c += 1;
            }
        });
        c
    });
    Ok(counts.into_iter().sum())
}

pub fn emit_table(b: &GroebnerBasis, up_to: usize) -> Result<DimensionTable, GroebnerError> {
    let entries = (1..=up_to)
        .map(|n| count_normal_monomials(b, n).map(|d| (n, d)))
        .collect::<Result<_, _>>()?;
    Ok(DimensionTable {
        presentation_name: b.presentation_name().to_string(),
        order_id: b.order().id().to_string(),
        entries,
    })
}
