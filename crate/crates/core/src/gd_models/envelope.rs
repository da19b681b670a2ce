//! Differential Poisson envelopes presented as commutative polynomial
//! quotients with a bracket and a derivation given on the variables.

use std::collections::BTreeMap;
use std::fmt;

use crate::coeff::Q;

use super::poly::{buchberger_failures, normal_monomials, Mono, Poly, PolyDisplay};
use super::{rank_of, solve_in_span, GDTable, GdModelError, Vector};

#[derive(Clone, Debug)]
pub struct EnvelopeSpec {
    pub names: Vec<String>,
    /// A Groebner basis of the ideal under deg-lex.
    pub relations: Vec<Poly>,
    /// `{x_i, x_j}` for `i < j`; the rest by antisymmetry.
    pub bracket: BTreeMap<(u32, u32), Poly>,
    pub derivation: Vec<Poly>,
    /// Image of each basis vector of the table.
    pub embedding: Vec<Poly>,
}

impl EnvelopeSpec {
    fn on_vars(&self, a: u32, b: u32) -> Poly {
        match a.cmp(&b) {
            std::cmp::Ordering::Equal => Poly::zero(),
            std::cmp::Ordering::Less => self.bracket.get(&(a, b)).cloned().unwrap_or_default(),
            std::cmp::Ordering::Greater => self.on_vars(b, a).scale(&-Q::one()),
        }
    }

    pub fn bracket(&self, f: &Poly, g: &Poly) -> Poly {
        f.bracket(g, &mut |a, b| self.on_vars(a, b))
    }

    pub fn d(&self, f: &Poly) -> Poly {
        f.derive(&mut |v| self.derivation[v as usize].clone())
    }

    pub fn nf(&self, f: &Poly) -> Poly {
        f.reduce(&self.relations)
    }

    pub fn var(&self, name: &str) -> Poly {
        Poly::var(self.names.iter().position(|n| n == name).expect("known variable") as u32)
    }

    pub fn show(&self, f: &Poly) -> String {
        let names = |v: u32| self.names[v as usize].clone();
        PolyDisplay { poly: f, names: &names }.to_string()
    }

    fn nvars(&self) -> u32 {
        self.names.len() as u32
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingReport {
    pub checks: Vec<Check>,
}

impl EmbeddingReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.witness.is_none())
    }

    pub fn failed(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| c.witness.is_some()).map(|c| c.name).collect()
    }
}

impl fmt::Display for EmbeddingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            match &c.witness {
                None => writeln!(f, "{}: pass", c.name)?,
                Some(w) => writeln!(f, "{}: FAIL {w}", c.name)?,
            }
        }
        Ok(())
    }
}

fn first_failure<T>(items: impl IntoIterator<Item = T>, mut bad: impl FnMut(&T) -> Option<String>) -> Option<String> {
    items.into_iter().find_map(|x| bad(&x))
}

/// Coordinates of normal forms over their joint monomial support.
fn coordinates(polys: &[Poly]) -> (Vec<Mono>, Vec<Vector>) {
    let mut support: Vec<Mono> = polys.iter().flat_map(|p| p.terms().map(|(m, _)| m.clone())).collect();
    support.sort();
    support.dedup();
    let rows = polys.iter().map(|p| support.iter().map(|m| p.coeff(m)).collect()).collect();
    (support, rows)
}

/// The GD table induced on the span of the images by `x o y = x d(y)` and
/// the bracket, if the span is closed under both and the images are
/// independent.
pub fn rederive_table(e: &EnvelopeSpec) -> Result<GDTable, GdModelError> {
    let images: Vec<Poly> = e.embedding.iter().map(|p| e.nf(p)).collect();
    let n = images.len();
    let mut products = Vec::new();
    for x in &images {
        for y in &images {
            products.push(e.nf(&x.mul(&e.d(y))));
            products.push(e.nf(&e.bracket(x, y)));
        }
    }
    let all: Vec<Poly> = images.iter().chain(&products).cloned().collect();
    let (_, rows) = coordinates(&all);
    let (basis, rest) = rows.split_at(n);
    if rank_of(basis) != n {
        return Err(GdModelError::Precondition("images are linearly dependent".into()));
    }
    let mut t = GDTable::zero(n);
    for i in 0..n {
        for j in 0..n {
            let k = 2 * (i * n + j);
            let circ = solve_in_span(basis, &rest[k])
                .ok_or_else(|| GdModelError::Precondition(format!("e{} o e{} leaves the span", i + 1, j + 1)))?;
            let br = solve_in_span(basis, &rest[k + 1])
                .ok_or_else(|| GdModelError::Precondition(format!("[e{}, e{}] leaves the span", i + 1, j + 1)))?;
            t.circ[i][j] = circ;
            t.bracket[i][j] = br;
        }
    }
    Ok(t)
}

/// Checks, in order: Jacobi on the variables, `{x, I} ⊆ I`, `d(I) ⊆ I`,
/// `d{f,g} = {df,g} + {f,dg}` on the variables and on all pairs of normal
/// monomials of degree at most `truncation`, independence of the images,
/// and that `x o y = x d(y)` and the bracket reproduce `t`.
pub fn verify_embedding(t: &GDTable, e: &EnvelopeSpec, truncation: usize) -> Result<EmbeddingReport, GdModelError> {
    if let Some(&(i, j)) = buchberger_failures(&e.relations).first() {
        return Err(GdModelError::NotGroebner(i, j));
    }
    let n = e.nvars();
    let vars: Vec<u32> = (0..n).collect();
    let x = |v: u32| Poly::var(v);
    let mut checks = Vec::new();

    let triples = (0..n).flat_map(|i| (i + 1..n).flat_map(move |j| (j + 1..n).map(move |k| (i, j, k))));
    checks.push(Check {
        name: "jacobi",
        witness: first_failure(triples, |&(i, j, k)| {
            let (a, b, c) = (x(i), x(j), x(k));
            let s = e
                .bracket(&a, &e.bracket(&b, &c))
                .add(&e.bracket(&b, &e.bracket(&c, &a)))
                .add(&e.bracket(&c, &e.bracket(&a, &b)));
            let r = e.nf(&s);
            (!r.is_zero()).then(|| {
                format!(
                    "at ({}, {}, {}): {}",
                    e.names[i as usize],
                    e.names[j as usize],
                    e.names[k as usize],
                    e.show(&r)
                )
            })
        }),
    });

    let pairs: Vec<(u32, usize)> = vars.iter().flat_map(|&v| (0..e.relations.len()).map(move |r| (v, r))).collect();
    checks.push(Check {
        name: "bracket-ideal",
        witness: first_failure(&pairs, |&&(v, r)| {
            let s = e.nf(&e.bracket(&x(v), &e.relations[r]));
            (!s.is_zero()).then(|| format!("{{{}, {}}} = {}", e.names[v as usize], e.show(&e.relations[r]), e.show(&s)))
        }),
    });

    checks.push(Check {
        name: "derivation-ideal",
        witness: first_failure(&e.relations, |r| {
            let s = e.nf(&e.d(r));
            (!s.is_zero()).then(|| format!("d({}) = {}", e.show(r), e.show(&s)))
        }),
    });

    let defect = |f: &Poly, g: &Poly| {
        e.nf(&e
            .d(&e.bracket(f, g))
            .sub(&e.bracket(&e.d(f), g))
            .sub(&e.bracket(f, &e.d(g))))
    };
    let var_pairs: Vec<(u32, u32)> = vars.iter().flat_map(|&i| vars.iter().map(move |&j| (i, j))).collect();
    let basis: Vec<Poly> = normal_monomials(&e.relations, n, truncation)
        .into_iter()
        .map(|m| Poly::term(Q::one(), m))
        .collect();
    let mono_pairs: Vec<(usize, usize)> =
        (0..basis.len()).flat_map(|i| (i + 1..basis.len()).map(move |j| (i, j))).collect();
    let witness = first_failure(&var_pairs, |&&(i, j)| {
        let s = defect(&x(i), &x(j));
        (!s.is_zero()).then(|| format!("on ({}, {}): {}", e.names[i as usize], e.names[j as usize], e.show(&s)))
    })
    .or_else(|| {
        first_failure(&mono_pairs, |&&(i, j)| {
            let s = defect(&basis[i], &basis[j]);
            (!s.is_zero()).then(|| format!("on ({}, {}): {}", e.show(&basis[i]), e.show(&basis[j]), e.show(&s)))
        })
    });
    checks.push(Check {
        name: "derivation-bracket",
        witness,
    });

    let images: Vec<Poly> = e.embedding.iter().map(|p| e.nf(p)).collect();
    let (_, rows) = coordinates(&images);
    checks.push(Check {
        name: "independent",
        witness: (rank_of(&rows) != images.len() || images.len() != t.dim())
            .then(|| format!("rank {} for {} images", rank_of(&rows), images.len())),
    });

    let witness = match rederive_table(e) {
        Ok(r) if &r == t => None,
        Ok(r) => Some(format!("induced table differs:\n{r}")),
        Err(err) => Some(err.to_string()),
    };
    checks.push(Check {
        name: "structure-constants",
        witness,
    });
    Ok(EmbeddingReport { checks })
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn q(n: i64) -> Q {
    Q::from_int(n)
}

/// `Q[x, e]/(e^2)` with `{x, e} = e/alpha`, `d = d/dx`, `u -> x`, `v -> ex`.
pub fn case2_envelope(alpha: &Q) -> EnvelopeSpec {
    let (x, e) = (Poly::var(0), Poly::var(1));
    EnvelopeSpec {
        names: names(&["x", "e"]),
        relations: vec![e.mul(&e)],
        bracket: BTreeMap::from([((0, 1), e.scale(&alpha.inv()))]),
        derivation: vec![Poly::constant(Q::one()), Poly::zero()],
        embedding: vec![x.clone(), e.mul(&x)],
    }
}

/// [`case2_envelope`] with `d(e) = e/alpha`, which is the second derivation
/// `d_2` evaluated on `e` rather than `d_1`.
pub fn case2_envelope_printed(alpha: &Q) -> EnvelopeSpec {
    let mut s = case2_envelope(alpha);
    s.derivation[1] = Poly::var(1).scale(&alpha.inv());
    s
}

/// `Q[u, v, u', v']` modulo the eight relations, with the bracket on the
/// variables and `d(u) = u'`, `d(v) = v'`, `d(u') = d(v') = 0`.
pub fn case3_envelope() -> EnvelopeSpec {
    let (u, v, u1, v1) = (Poly::var(0), Poly::var(1), Poly::var(2), Poly::var(3));
    let relations = vec![
        u.mul(&u1).sub(&v),
        u.mul(&v1),
        v.mul(&u1),
        v.mul(&v1),
        v.mul(&v),
        u1.mul(&u1).sub(&v1),
        u1.mul(&v1),
        v1.mul(&v1),
    ];
    let bracket = BTreeMap::from([
        ((0, 1), v.clone()),
        ((0, 2), u1.clone()),
        ((0, 3), v1.scale(&q(2))),
        ((1, 2), v1.clone()),
        ((1, 3), Poly::zero()),
        ((2, 3), Poly::zero()),
    ]);
    EnvelopeSpec {
        names: names(&["u", "v", "u'", "v'"]),
        relations,
        bracket,
        derivation: vec![u1, v1, Poly::zero(), Poly::zero()],
        embedding: vec![u, v],
    }
}

/// Variable id of `u^(m)` (`sym = 0`) or `v^(m)` (`sym = 1`).
fn gen_id(sym: u32, order: u32) -> u32 {
    2 * order + sym
}

/// `{a^(m), b^(n)} = ((n-1) a^(m+1) b^(n) - (m-1) a^(m) b^(n+1)) / (gamma - alpha)`
/// on generator ids, for `a, b` in `{u, v}`.
pub fn bracket1(alpha: &Q, gamma: &Q, x: u32, y: u32) -> Poly {
    let k = (gamma - alpha).inv();
    let (m, n) = ((x / 2) as i64, (y / 2) as i64);
    Poly::term(&k * &q(n - 1), vec![x + 2, y]).add(&Poly::term(&k * &q(-(m - 1)), vec![x, y + 2]))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bracket1Report {
    pub jacobi_triples: usize,
    pub derivation_pairs: usize,
    pub failures: Vec<String>,
}

impl Bracket1Report {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Jacobi on all triples of distinct generators `u^(m), v^(n)` with orders
/// at most `max_order`, `d{x,y} = {dx,y} + {x,dy}` on all pairs, and
/// `{x, y} = [x, y]` for `x, y` in `{u, v}` once `a b'` is read as `a o b`
/// in the table with `[u,v] = v`, `u o v = gamma v`, `v o u = alpha v`.
pub fn bracket1_check(alpha: &Q, gamma: &Q, max_order: u32) -> Result<Bracket1Report, GdModelError> {
    if alpha == gamma {
        return Err(GdModelError::Precondition("bracket1 needs alpha != gamma".into()));
    }
    let br = |f: &Poly, g: &Poly| f.bracket(g, &mut |a, b| bracket1(alpha, gamma, a, b));
    let d = |f: &Poly| f.derive(&mut |v| Poly::var(v + 2));
    let name = |id: u32| {
        let s = if id.is_multiple_of(2) { "u" } else { "v" };
        format!("{s}^({})", id / 2)
    };
    let gens: Vec<u32> = (0..=max_order).flat_map(|o| [gen_id(0, o), gen_id(1, o)]).collect();
    let mut failures = Vec::new();
    let mut jacobi_triples = 0;
    for (i, &a) in gens.iter().enumerate() {
        for (j, &b) in gens.iter().enumerate().skip(i + 1) {
            for &c in &gens[j + 1..] {
                jacobi_triples += 1;
                let (x, y, z) = (Poly::var(a), Poly::var(b), Poly::var(c));
                let s = br(&x, &br(&y, &z)).add(&br(&y, &br(&z, &x))).add(&br(&z, &br(&x, &y)));
                if !s.is_zero() {
                    failures.push(format!("jacobi at ({}, {}, {})", name(a), name(b), name(c)));
                }
            }
        }
    }
    let mut derivation_pairs = 0;
    for &a in &gens {
        for &b in &gens {
            derivation_pairs += 1;
            let (x, y) = (Poly::var(a), Poly::var(b));
            let s = d(&br(&x, &y)).sub(&br(&d(&x), &y)).sub(&br(&x, &d(&y)));
            if !s.is_zero() {
                failures.push(format!("derivation on ({}, {})", name(a), name(b)));
            }
        }
    }
    // a b' -> a o b with u o u unused in degree 2 brackets
    let circ = |a: u32, b: u32| -> Poly {
        match (a, b) {
            (0, 1) => Poly::var(1).scale(gamma),
            (1, 0) => Poly::var(1).scale(alpha),
            _ => Poly::zero(),
        }
    };
    let descend = |p: &Poly| -> Poly {
        let mut out = Poly::zero();
        for (m, c) in p.terms() {
            let r = match m[..] {
                [a, b] if a < 2 && (2..4).contains(&b) => circ(a, b - 2),
                [a, b] if b < 2 && (2..4).contains(&a) => circ(b, a - 2),
                _ => Poly::term(Q::one(), m.clone()),
            };
            out = out.add(&r.scale(c));
        }
        out
    };
    let want = [(0, 1, Poly::var(1)), (1, 0, Poly::var(1).scale(&-Q::one())), (0, 0, Poly::zero()), (1, 1, Poly::zero())];
    for (a, b, w) in want {
        let got = descend(&br(&Poly::var(a), &Poly::var(b)));
        if got != w {
            failures.push(format!("{{{}, {}}} does not descend to the table bracket", name(a), name(b)));
        }
    }
    Ok(Bracket1Report {
        jacobi_triples,
        derivation_pairs,
        failures,
    })
}
