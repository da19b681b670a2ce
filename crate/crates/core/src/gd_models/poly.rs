//! Commutative polynomials over Q in numbered variables, with deg-lex
//! division and the Buchberger criterion.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::coeff::Q;

/// Sorted multiset of variable ids.
pub type Mono = Vec<u32>;

#[derive(Clone, Default, PartialEq, Eq)]
pub struct Poly {
    terms: BTreeMap<Mono, Q>,
}

fn exps(m: &Mono, n: usize) -> Vec<u32> {
    let mut e = vec![0; n];
    for &v in m {
        e[v as usize] += 1;
    }
    e
}

/// Total degree first, then the exponent of variable 0, variable 1, ..
pub fn deglex(a: &Mono, b: &Mono) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        let n = a.iter().chain(b).max().map_or(0, |&v| v as usize + 1);
        exps(a, n).cmp(&exps(b, n))
    })
}

pub fn divides(a: &Mono, b: &Mono) -> bool {
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j == b.len() || b[j] != x {
            return false;
        }
        j += 1;
    }
    true
}

/// `b / a` for `a | b`.
fn quotient(b: &Mono, a: &Mono) -> Mono {
    let mut out = b.clone();
    for x in a {
        let i = out.iter().position(|y| y == x).expect("divisible");
        out.remove(i);
    }
    out
}

fn lcm(a: &Mono, b: &Mono) -> Mono {
    let mut out = a.clone();
    out.extend(quotient(b, &gcd(a, b)));
    out.sort_unstable();
    out
}

fn gcd(a: &Mono, b: &Mono) -> Mono {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn constant(c: Q) -> Poly {
        Poly::term(c, Vec::new())
    }

    pub fn var(v: u32) -> Poly {
        Poly::term(Q::one(), vec![v])
    }

    pub fn term(c: Q, mut m: Mono) -> Poly {
        m.sort_unstable();
        let mut p = Poly::zero();
        p.add_term(c, m);
        p
    }

    pub fn add_term(&mut self, c: Q, m: Mono) {
        if c.is_zero() {
            return;
        }
        let s = self.terms.remove(&m).unwrap_or_default() + c;
        if !s.is_zero() {
            self.terms.insert(m, s);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Mono) -> Q {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(c.clone(), m.clone());
        }
        r
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> Poly {
        let mut r = Poly::zero();
        for (m, d) in &self.terms {
            r.add_term(c * d, m.clone());
        }
        r
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut r = Poly::zero();
        for (a, c) in &self.terms {
            for (b, d) in &o.terms {
                let mut m = a.clone();
                m.extend(b);
                m.sort_unstable();
                r.add_term(c * d, m);
            }
        }
        r
    }

    pub fn pow(&self, n: u32) -> Poly {
        (0..n).fold(Poly::constant(Q::one()), |acc, _| acc.mul(self))
    }

    pub fn lead(&self) -> Option<(&Mono, &Q)> {
        self.terms.iter().max_by(|a, b| deglex(a.0, b.0))
    }

    /// `(variable, multiplicity, monomial with one copy removed)` for each
    /// distinct variable of `m`.
    fn partials(m: &Mono) -> Vec<(u32, u32, Mono)> {
        let mut out: Vec<(u32, u32, Mono)> = Vec::new();
        for (i, &v) in m.iter().enumerate() {
            if let Some(last) = out.last_mut() {
                if last.0 == v {
                    last.1 += 1;
                    continue;
                }
            }
            let mut rest = m.clone();
            rest.remove(i);
            out.push((v, 1, rest));
        }
        out
    }

    /// `sum_v (df/dv) * image(v)`: the derivation with the given values on variables.
    pub fn derive(&self, image: &mut impl FnMut(u32) -> Poly) -> Poly {
        let mut r = Poly::zero();
        for (m, c) in &self.terms {
            for (v, k, rest) in Poly::partials(m) {
                let coef = c * &Q::from_int(k as i64);
                r = r.add(&Poly::term(coef, rest).mul(&image(v)));
            }
        }
        r
    }

    /// Biderivation extending `on_vars`.
    pub fn bracket(&self, o: &Poly, on_vars: &mut impl FnMut(u32, u32) -> Poly) -> Poly {
        let mut r = Poly::zero();
        for (a, c) in &self.terms {
            for (b, d) in &o.terms {
                for (x, k, ra) in Poly::partials(a) {
                    for (y, l, rb) in Poly::partials(b) {
                        let coef = &(c * d) * &Q::from_int((k * l) as i64);
                        let mut rest = ra.clone();
                        rest.extend(&rb);
                        r = r.add(&Poly::term(coef, rest).mul(&on_vars(x, y)));
                    }
                }
            }
        }
        r
    }

    /// Remainder of full division by `basis` under deg-lex.
    pub fn reduce(&self, basis: &[Poly]) -> Poly {
        let leads: Vec<(Mono, Q)> = basis
            .iter()
            .map(|g| {
                let (m, c) = g.lead().expect("nonzero basis element");
                (m.clone(), c.clone())
            })
            .collect();
        let mut f = self.clone();
        let mut rem = Poly::zero();
        while let Some((m, c)) = f.lead().map(|(m, c)| (m.clone(), c.clone())) {
            match leads.iter().position(|(l, _)| divides(l, &m)) {
                Some(i) => {
                    let q = Poly::term(&c / &leads[i].1, quotient(&m, &leads[i].0));
                    f = f.sub(&q.mul(&basis[i]));
                }
                None => {
                    f.terms.remove(&m);
                    rem.add_term(c, m);
                }
            }
        }
        rem
    }
}

/// S-polynomial remainders that fail to vanish, as index pairs.
pub fn buchberger_failures(basis: &[Poly]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let (a, ca) = basis[i].lead().expect("nonzero");
            let (b, cb) = basis[j].lead().expect("nonzero");
            let l = lcm(a, b);
            let s = Poly::term(ca.inv(), quotient(&l, a))
                .mul(&basis[i])
                .sub(&Poly::term(cb.inv(), quotient(&l, b)).mul(&basis[j]));
            if !s.reduce(basis).is_zero() {
                out.push((i, j));
            }
        }
    }
    out
}

/// Monomials of degree at most `max_degree` in `nvars` variables divisible
/// by no leading monomial of `basis`.
pub fn normal_monomials(basis: &[Poly], nvars: u32, max_degree: usize) -> Vec<Mono> {
    let leads: Vec<Mono> = basis.iter().map(|g| g.lead().expect("nonzero").0.clone()).collect();
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_degree {
        let mut next = Vec::new();
        for m in &layer {
            let start = m.last().copied().unwrap_or(0);
            for v in start..nvars {
                let mut k = m.clone();
                k.push(v);
                if !leads.iter().any(|l| divides(l, &k)) {
                    next.push(k);
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Renders with the given variable names.
pub struct PolyDisplay<'a> {
    pub poly: &'a Poly,
    pub names: &'a dyn Fn(u32) -> String,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<(&Mono, &Q)> = self.poly.terms.iter().collect();
        terms.sort_by(|a, b| deglex(b.0, a.0));
        if terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            f.write_str(match (i, neg) {
                (0, true) => "-",
                (0, false) => "",
                (_, true) => " - ",
                _ => " + ",
            })?;
            let vars: Vec<String> = m.iter().map(|&v| (self.names)(v)).collect();
            match (a.is_one(), vars.is_empty()) {
                (true, true) => write!(f, "1")?,
                (true, false) => write!(f, "{}", vars.join("*"))?,
                (false, true) => write!(f, "{a}")?,
                (false, false) => write!(f, "{a}*{}", vars.join("*"))?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = |v: u32| format!("x{v}");
        write!(f, "{}", PolyDisplay { poly: self, names: &names })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(v: u32) -> Poly {
        Poly::var(v)
    }

    #[test]
    fn order_and_division() {
        assert_eq!(deglex(&vec![0], &vec![1]), Ordering::Greater);
        assert_eq!(deglex(&vec![1, 1], &vec![0]), Ordering::Greater);
        assert!(divides(&vec![0, 1], &vec![0, 0, 1]));
        assert!(!divides(&vec![1, 1], &vec![0, 1]));
        // x0^2 x1 mod (x0 x1 - x1) = x1
        let g = x(0).mul(&x(1)).sub(&x(1));
        let f = x(0).mul(&x(0)).mul(&x(1));
        assert_eq!(f.reduce(&[g]), x(1));
    }

    #[test]
    fn buchberger_criterion() {
        // {x^2 - y, xy - 1} is not a Groebner basis for deg-lex
        let g1 = x(0).mul(&x(0)).sub(&x(1));
        let g2 = x(0).mul(&x(1)).sub(&Poly::constant(Q::one()));
        assert!(!buchberger_failures(&[g1.clone(), g2.clone()]).is_empty());
        // monomial ideals always are
        assert!(buchberger_failures(&[x(0).mul(&x(0)), x(0).mul(&x(1))]).is_empty());
    }

    #[test]
    fn derivation_and_bracket_are_leibniz() {
        let f = x(0).pow(3).add(&x(1).scale(&Q::from_int(2)));
        // d(x0) = x1, d(x1) = 0
        let df = f.derive(&mut |v| if v == 0 { x(1) } else { Poly::zero() });
        assert_eq!(df, x(0).pow(2).mul(&x(1)).scale(&Q::from_int(3)));
        // {x0, x1} = 1
        let mut br = |a: u32, b: u32| match (a, b) {
            (0, 1) => Poly::constant(Q::one()),
            (1, 0) => Poly::constant(-Q::one()),
            _ => Poly::zero(),
        };
        let p = x(0).pow(2).bracket(&x(1).pow(3), &mut br);
        assert_eq!(p, x(0).mul(&x(1).pow(2)).scale(&Q::from_int(6)));
    }
}
