//! Finite-dimensional GD-algebras given by structure constants: axiom
//! checks, the classification of the 2-dimensional ones, and verification
//! of explicit differential Poisson envelopes.

mod envelope;
pub mod poly;

use std::fmt;

use thiserror::Error;

use crate::coeff::Q;

pub use envelope::{
    bracket1, bracket1_check, case2_envelope, case2_envelope_printed, case3_envelope, rederive_table,
    verify_embedding, Bracket1Report, Check, EmbeddingReport, EnvelopeSpec,
};

#[derive(Debug, Error)]
pub enum GdModelError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Precondition(String),
    #[error("relations are not a Groebner basis: S-polynomial of {0} and {1} does not reduce to 0")]
    NotGroebner(usize, usize),
    #[error("axioms fail: {0}")]
    Axioms(String),
}

/// Structure constants: `e_i o e_j = sum_k circ[i][j][k] e_k`, likewise for
/// the bracket, which is kept antisymmetric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GDTable {
    dim: usize,
    circ: Vec<Vec<Vec<Q>>>,
    bracket: Vec<Vec<Vec<Q>>>,
}

pub type Vector = Vec<Q>;

fn ints(v: &[i64]) -> Vector {
    v.iter().map(|&x| Q::from_int(x)).collect()
}

fn axpy(acc: &mut [Q], c: &Q, v: &[Q]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += &(c * b);
    }
}

impl GDTable {
    pub fn zero(dim: usize) -> GDTable {
        let z = vec![vec![vec![Q::zero(); dim]; dim]; dim];
        GDTable {
            dim,
            circ: z.clone(),
            bracket: z,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn set_circ(&mut self, i: usize, j: usize, v: Vector) {
        assert_eq!(v.len(), self.dim);
        self.circ[i][j] = v;
    }

    /// Sets `[e_i, e_j]` and `[e_j, e_i]`.
    pub fn set_bracket(&mut self, i: usize, j: usize, v: Vector) {
        assert_eq!(v.len(), self.dim);
        assert!(i != j || v.iter().all(Q::is_zero), "[e_i, e_i] must vanish");
        self.bracket[j][i] = v.iter().map(|x| -x).collect();
        self.bracket[i][j] = v;
    }

    pub fn with_circ(mut self, i: usize, j: usize, v: &[i64]) -> Self {
        self.set_circ(i, j, ints(v));
        self
    }

    pub fn with_bracket(mut self, i: usize, j: usize, v: &[i64]) -> Self {
        self.set_bracket(i, j, ints(v));
        self
    }

    pub fn basis(&self, i: usize) -> Vector {
        let mut v = vec![Q::zero(); self.dim];
        v[i] = Q::one();
        v
    }

    fn bilinear(&self, c: &[Vec<Vec<Q>>], x: &[Q], y: &[Q]) -> Vector {
        let mut out = vec![Q::zero(); self.dim];
        for (i, a) in x.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in y.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                axpy(&mut out, &(a * b), &c[i][j]);
            }
        }
        out
    }

    pub fn circ(&self, x: &[Q], y: &[Q]) -> Vector {
        self.bilinear(&self.circ, x, y)
    }

    pub fn bracket(&self, x: &[Q], y: &[Q]) -> Vector {
        self.bilinear(&self.bracket, x, y)
    }

    pub fn is_bracket_zero(&self) -> bool {
        self.bracket.iter().flatten().flatten().all(Q::is_zero)
    }

    /// The table in the basis `rows` (given in old coordinates).
    pub fn change_basis(&self, rows: &[Vector]) -> Result<GDTable, GdModelError> {
        let n = self.dim;
        if rows.len() != n || rank(rows) != n {
            return Err(GdModelError::Precondition("change of basis is not invertible".into()));
        }
        let coords = |v: Vector| solve(rows, &v).expect("rows span the space");
        let mut t = GDTable::zero(n);
        for i in 0..n {
            for j in 0..n {
                t.circ[i][j] = coords(self.circ(&rows[i], &rows[j]));
                t.bracket[i][j] = coords(self.bracket(&rows[i], &rows[j]));
            }
        }
        Ok(t)
    }

    /// `dim n`, then `circ i j = c1 .. cn` and `bracket i j = ..` lines with
    /// 1-based indices; `#` starts a comment. Bracket entries not listed
    /// follow from antisymmetry.
    pub fn parse(text: &str) -> Result<GDTable, GdModelError> {
        let mut table: Option<GDTable> = None;
        let mut set: Vec<(usize, usize)> = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = no + 1;
            let l = raw.split('#').next().unwrap_or("").trim();
            if l.is_empty() {
                continue;
            }
            let err = |msg: &str| GdModelError::Parse {
                line,
                msg: msg.to_string(),
            };
            let mut words = l.split_whitespace();
            match words.next() {
                Some("dim") => {
                    if table.is_some() {
                        return Err(err("`dim` given twice"));
                    }
                    let n: usize = words
                        .next()
                        .and_then(|w| w.parse().ok())
                        .filter(|&n| n > 0)
                        .ok_or_else(|| err("expected a positive dimension"))?;
                    table = Some(GDTable::zero(n));
                }
                Some(op @ ("circ" | "bracket")) => {
                    let t = table.as_mut().ok_or_else(|| err("`dim` must come first"))?;
                    let (lhs, rhs) = l.split_once('=').ok_or_else(|| err("expected `=`"))?;
                    let idx: Vec<usize> = lhs
                        .split_whitespace()
                        .skip(1)
                        .map(|w| w.parse::<usize>().ok().filter(|&i| (1..=t.dim).contains(&i)))
                        .collect::<Option<_>>()
                        .ok_or_else(|| err("bad index"))?;
                    let [i, j] = idx[..] else { return Err(err("expected two indices")) };
                    let v: Vector = rhs
                        .split_whitespace()
                        .map(|w| w.parse::<Q>().ok())
                        .collect::<Option<_>>()
                        .ok_or_else(|| err("bad coefficient"))?;
                    if v.len() != t.dim {
                        return Err(err("vector length differs from dim"));
                    }
                    let (i, j) = (i - 1, j - 1);
                    if op == "circ" {
                        t.set_circ(i, j, v);
                    } else {
                        if i == j && v.iter().any(|x| !x.is_zero()) {
                            return Err(err("[e_i, e_i] must be zero"));
                        }
                        let neg: Vector = v.iter().map(|x| -x).collect();
                        if set.contains(&(j, i)) && t.bracket[i][j] != v {
                            return Err(err("bracket is not antisymmetric"));
                        }
                        set.push((i, j));
                        t.bracket[i][j] = v;
                        t.bracket[j][i] = neg;
                    }
                }
                _ => return Err(err("expected `dim`, `circ` or `bracket`")),
            }
        }
        table.ok_or(GdModelError::Parse {
            line: 0,
            msg: "missing `dim`".into(),
        })
    }
}

impl fmt::Display for GDTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dim {}", self.dim)?;
        let row = |v: &Vector| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        for i in 0..self.dim {
            for j in 0..self.dim {
                if self.circ[i][j].iter().any(|x| !x.is_zero()) {
                    writeln!(f, "circ {} {} = {}", i + 1, j + 1, row(&self.circ[i][j]))?;
                }
            }
        }
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                if self.bracket[i][j].iter().any(|x| !x.is_zero()) {
                    writeln!(f, "bracket {} {} = {}", i + 1, j + 1, row(&self.bracket[i][j]))?;
                }
            }
        }
        Ok(())
    }
}

/// Rank of a list of vectors.
fn rank(rows: &[Vector]) -> usize {
    let mut m: Vec<Vector> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].inv();
        let pivot: Vector = m[r].iter().map(|x| x * &inv).collect();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = -row[c].clone();
                axpy(row, &f, &pivot);
            }
        }
        m[r] = pivot;
        r += 1;
    }
    r
}

/// Coefficients expressing `v` in the span of `rows`, if it lies there.
fn solve(rows: &[Vector], v: &[Q]) -> Option<Vector> {
    let n = rows.len();
    let len = v.len();
    // columns: one per row vector, then the target
    let mut m: Vec<Vector> = (0..len)
        .map(|k| rows.iter().map(|r| r[k].clone()).chain(std::iter::once(v[k].clone())).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..len).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].inv();
        let pivot: Vector = m[r].iter().map(|x| x * &inv).collect();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = -row[c].clone();
                axpy(row, &f, &pivot);
            }
        }
        m[r] = pivot;
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    let mut x = vec![Q::zero(); n];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][n].clone();
    }
    Some(x)
}

pub(crate) fn solve_in_span(rows: &[Vector], v: &[Q]) -> Option<Vector> {
    solve(rows, v)
}

pub(crate) fn rank_of(rows: &[Vector]) -> usize {
    rank(rows)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomResult {
    pub name: &'static str,
    /// First failing basis triple, 0-based.
    pub witness: Option<(usize, usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub results: Vec<AxiomResult>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.witness.is_none())
    }

    pub fn get(&self, name: &str) -> Option<&AxiomResult> {
        self.results.iter().find(|r| r.name == name)
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            match r.witness {
                None => writeln!(f, "{}: pass", r.name)?,
                Some((i, j, k)) => writeln!(f, "{}: FAIL at (e{}, e{}, e{})", r.name, i + 1, j + 1, k + 1)?,
            }
        }
        Ok(())
    }
}

fn sum(parts: &[(i64, Vector)]) -> Vector {
    let n = parts[0].1.len();
    let mut out = vec![Q::zero(); n];
    for (c, v) in parts {
        axpy(&mut out, &Q::from_int(*c), v);
    }
    out
}

/// Left symmetry, right commutativity, Jacobi and the compatibility
/// identity `[a, b o c] - [c, b o a] + [b, a] o c - [b, c] o a - b o [a, c] = 0`,
/// each on all basis triples.
pub fn check_gd_axioms(t: &GDTable) -> AxiomReport {
    type Law = fn(&GDTable, &Vector, &Vector, &Vector) -> Vector;
    let laws: [(&'static str, Law); 4] = [
        ("left-symmetry", |t, a, b, c| {
            sum(&[
                (1, t.circ(&t.circ(a, b), c)),
                (-1, t.circ(a, &t.circ(b, c))),
                (-1, t.circ(&t.circ(b, a), c)),
                (1, t.circ(b, &t.circ(a, c))),
            ])
        }),
        ("right-commutativity", |t, a, b, c| {
            sum(&[(1, t.circ(&t.circ(a, b), c)), (-1, t.circ(&t.circ(a, c), b))])
        }),
        ("jacobi", |t, a, b, c| {
            sum(&[
                (1, t.bracket(&t.bracket(a, b), c)),
                (-1, t.bracket(a, &t.bracket(b, c))),
                (-1, t.bracket(&t.bracket(a, c), b)),
            ])
        }),
        ("gd1", |t, a, b, c| {
            sum(&[
                (1, t.bracket(a, &t.circ(b, c))),
                (-1, t.bracket(c, &t.circ(b, a))),
                (1, t.circ(&t.bracket(b, a), c)),
                (-1, t.circ(&t.bracket(b, c), a)),
                (-1, t.circ(b, &t.bracket(a, c))),
            ])
        }),
    ];
    let n = t.dim;
    let results = laws
        .iter()
        .map(|(name, law)| {
            let witness = (0..n * n * n)
                .map(|x| (x / (n * n), x / n % n, x % n))
                .find(|&(i, j, k)| law(t, &t.basis(i), &t.basis(j), &t.basis(k)).iter().any(|q| !q.is_zero()));
            AxiomResult { name, witness }
        })
        .collect();
    AxiomReport { results }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    /// Zero bracket.
    Novikov,
    /// `alpha = gamma = delta = 0`: only the bracket is nonzero.
    LieOnly,
    Case1 { alpha: Q, gamma: Q, delta: Q },
    Case2 { alpha: Q, delta: Q },
    Case3 { delta: Q },
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Novikov => f.write_str("novikov"),
            Classification::LieOnly => f.write_str("lie-only"),
            Classification::Case1 { alpha, gamma, delta } => {
                write!(f, "case 1 (alpha={alpha}, gamma={gamma}, delta={delta})")
            }
            Classification::Case2 { alpha, delta } => write!(f, "case 2 (alpha={alpha}, delta={delta})"),
            Classification::Case3 { delta } => write!(f, "case 3 (delta={delta})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Classified {
    pub class: Classification,
    /// `u, v` in the input coordinates, with `[u, v] = v`; the input basis
    /// for the Novikov branch.
    pub basis: Vec<Vector>,
    pub normalized: GDTable,
    /// Basis and table of the model the envelope is built on: `(Mult_Table-2)`
    /// style for case 2 and `delta = 1` for case 3.
    pub model_basis: Vec<Vector>,
    pub model: GDTable,
}

pub fn classify_2dim(t: &GDTable) -> Result<Classified, GdModelError> {
    if t.dim != 2 {
        return Err(GdModelError::Precondition(format!("dimension {} is not 2", t.dim)));
    }
    let report = check_gd_axioms(t);
    if !report.passed() {
        return Err(GdModelError::Axioms(report.to_string().trim_end().replace('\n', "; ")));
    }
    if t.is_bracket_zero() {
        return Ok(Classified {
            class: Classification::Novikov,
            basis: vec![t.basis(0), t.basis(1)],
            normalized: t.clone(),
            model_basis: vec![t.basis(0), t.basis(1)],
            model: t.clone(),
        });
    }
    let w = t.bracket(&t.basis(0), &t.basis(1));
    // [e_i, w] = lambda_i w on a nonabelian 2-dimensional Lie algebra
    let (i, lambda) = (0..2)
        .find_map(|i| {
            let b = t.bracket(&t.basis(i), &w);
            let l = solve(std::slice::from_ref(&w), &b).expect("derived algebra is an ideal");
            (!l[0].is_zero()).then(|| (i, l[0].clone()))
        })
        .expect("nonabelian");
    let u: Vector = t.basis(i).iter().map(|x| x / &lambda).collect();
    let basis = vec![u, w];
    let n = t.change_basis(&basis)?;
    let (uu, uv, vu, vv) = (&n.circ[0][0], &n.circ[0][1], &n.circ[1][0], &n.circ[1][1]);
    let alpha = uu[0].clone();
    let delta = uu[1].clone();
    let gamma = uv[1].clone();
    let shape_ok = uv[0].is_zero() && vu[0].is_zero() && vu[1] == alpha && vv.iter().all(Q::is_zero);
    if !shape_ok {
        return Err(GdModelError::Axioms(format!("normalized table has an unexpected shape:\n{n}")));
    }
    let scaled = |c: &Q, v: &Vector| -> Vector { v.iter().map(|x| c * x).collect() };
    let (class, model_basis) = if alpha != gamma {
        (
            Classification::Case1 {
                alpha,
                gamma,
                delta,
            },
            basis.clone(),
        )
    } else if !alpha.is_zero() {
        // u/alpha - delta/alpha^2 v
        let mut u2 = scaled(&alpha.inv(), &basis[0]);
        axpy(&mut u2, &-(&delta / &(&alpha * &alpha)), &basis[1]);
        (Classification::Case2 { alpha, delta }, vec![u2, basis[1].clone()])
    } else if !delta.is_zero() {
        (
            Classification::Case3 { delta: delta.clone() },
            vec![basis[0].clone(), scaled(&delta, &basis[1])],
        )
    } else {
        (Classification::LieOnly, basis.clone())
    };
    let model = t.change_basis(&model_basis)?;
    Ok(Classified {
        class,
        basis,
        normalized: n,
        model_basis,
        model,
    })
}

/// `[u,v] = v/alpha, u o u = u, u o v = v o u = v, v o v = 0`.
pub fn mult_table_2(alpha: &Q) -> GDTable {
    let mut t = GDTable::zero(2);
    t.set_bracket(0, 1, vec![Q::zero(), alpha.inv()]);
    t.set_circ(0, 0, ints(&[1, 0]));
    t.set_circ(0, 1, ints(&[0, 1]));
    t.set_circ(1, 0, ints(&[0, 1]));
    t
}

/// `[u,v] = v, u o u = v`, other products zero.
pub fn case3_table() -> GDTable {
    GDTable::zero(2).with_bracket(0, 1, &[0, 1]).with_circ(0, 0, &[0, 1])
}

/// The general 2-dimensional shape with `[u,v] = v`.
pub fn general_table(alpha: &Q, gamma: &Q, delta: &Q) -> GDTable {
    let mut t = GDTable::zero(2);
    t.set_bracket(0, 1, vec![Q::zero(), Q::one()]);
    t.set_circ(0, 0, vec![alpha.clone(), delta.clone()]);
    t.set_circ(0, 1, vec![Q::zero(), gamma.clone()]);
    t.set_circ(1, 0, vec![Q::zero(), alpha.clone()]);
    t
}

#[cfg(test)]
mod tests;
