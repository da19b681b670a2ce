use proptest::prelude::*;

use super::poly::{buchberger_failures, Poly};
use super::*;

fn q(n: i64) -> Q {
    Q::from_int(n)
}

/// Integer structure constants, for an oracle that avoids `GDTable`.
type Raw = [[[i64; 2]; 2]; 2];

fn raw_mul(m: &Raw, x: [i64; 2], y: [i64; 2]) -> [i64; 2] {
    let mut out = [0; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                out[k] += x[i] * y[j] * m[i][j][k];
            }
        }
    }
    out
}

fn raw_gd1(c: &Raw, b: &Raw, x: [i64; 2], y: [i64; 2], z: [i64; 2]) -> [i64; 2] {
    let terms = [
        raw_mul(b, x, raw_mul(c, y, z)),
        raw_mul(b, z, raw_mul(c, y, x)).map(|v| -v),
        raw_mul(c, raw_mul(b, y, x), z),
        raw_mul(c, raw_mul(b, y, z), x).map(|v| -v),
        raw_mul(c, y, raw_mul(b, x, z)).map(|v| -v),
    ];
    terms.iter().fold([0, 0], |acc, t| [acc[0] + t[0], acc[1] + t[1]])
}

fn table_of(c: &Raw, b: &Raw) -> GDTable {
    let mut t = GDTable::zero(2);
    for i in 0..2 {
        for j in 0..2 {
            t = t.with_circ(i, j, &c[i][j]);
            if i < j {
                t = t.with_bracket(i, j, &b[i][j]);
            }
        }
    }
    t
}

#[test]
fn axioms_on_known_tables() {
    assert!(check_gd_axioms(&GDTable::zero(3)).passed());
    assert!(check_gd_axioms(&case3_table()).passed());
    assert!(check_gd_axioms(&mult_table_2(&q(3))).passed());
    // [u,v] = v, u o v = v satisfies everything
    let t = GDTable::zero(2).with_bracket(0, 1, &[0, 1]).with_circ(0, 1, &[0, 1]);
    assert!(check_gd_axioms(&t).passed());
}

#[test]
fn gd1_failure_agrees_with_direct_evaluation() {
    // e1 o e2 = -e1 - e2, e2 o e2 = e1 + e2, [e1,e2] = e2
    let c: Raw = [[[0, 0], [-1, -1]], [[0, 0], [1, 1]]];
    let b: Raw = [[[0, 0], [0, 1]], [[0, -1], [0, 0]]];
    let t = table_of(&c, &b);
    let r = check_gd_axioms(&t);
    assert!(!r.passed());
    assert_eq!(r.get("left-symmetry").unwrap().witness, None);
    assert_eq!(r.get("right-commutativity").unwrap().witness, None);
    assert_eq!(r.get("jacobi").unwrap().witness, None);
    assert_eq!(r.get("gd1").unwrap().witness, Some((0, 0, 1)));
    let e = [[1, 0], [0, 1]];
    assert_eq!(raw_gd1(&c, &b, e[0], e[0], e[1]), [1, 0]);
    assert!(r.to_string().contains("gd1: FAIL at (e1, e1, e2)"));
    assert!(matches!(classify_2dim(&t), Err(GdModelError::Axioms(_))));
}

#[test]
fn parse_round_trip_and_errors() {
    let text = "# case 3\ndim 2\ncirc 1 1 = 0 1\nbracket 1 2 = 0 1\n";
    let t = GDTable::parse(text).unwrap();
    assert_eq!(t, case3_table());
    assert_eq!(GDTable::parse(&t.to_string()).unwrap(), t);
    assert!(matches!(GDTable::parse("dim 2\ncirc 3 1 = 0 1\n"), Err(GdModelError::Parse { line: 2, .. })));
    assert!(matches!(GDTable::parse("circ 1 1 = 0 1\n"), Err(GdModelError::Parse { .. })));
    assert!(matches!(GDTable::parse("dim 2\nbracket 1 1 = 0 1\n"), Err(GdModelError::Parse { .. })));
}

#[test]
fn classification_of_the_models() {
    let c = classify_2dim(&mult_table_2(&q(1))).unwrap();
    assert_eq!(c.class, Classification::Case2 { alpha: q(1), delta: q(0) });
    assert_eq!(c.model, mult_table_2(&q(1)));

    let c = classify_2dim(&case3_table()).unwrap();
    assert_eq!(c.class, Classification::Case3 { delta: q(1) });
    assert_eq!(c.model, case3_table());

    let t = GDTable::zero(2).with_circ(0, 0, &[1, 0]);
    assert_eq!(classify_2dim(&t).unwrap().class, Classification::Novikov);

    let t = general_table(&q(0), &q(0), &q(0));
    assert_eq!(classify_2dim(&t).unwrap().class, Classification::LieOnly);

    let t = general_table(&q(0), &q(1), &q(5));
    assert!(matches!(classify_2dim(&t).unwrap().class, Classification::Case1 { .. }));
    assert!(matches!(classify_2dim(&GDTable::zero(3)), Err(GdModelError::Precondition(_))));
}

#[test]
fn case2_model_with_delta() {
    let t = general_table(&q(2), &q(2), &q(3));
    let c = classify_2dim(&t).unwrap();
    assert_eq!(c.class, Classification::Case2 { alpha: q(2), delta: q(3) });
    assert_eq!(c.model, mult_table_2(&q(2)));
}

fn small() -> impl Strategy<Value = i64> {
    -3i64..=3
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn alpha_and_gamma_survive_basis_change(
        a in small(), g in small(), d in small(),
        m in proptest::array::uniform4(small()),
    ) {
        let det = m[0] * m[3] - m[1] * m[2];
        prop_assume!(det != 0);
        let t = general_table(&q(a), &q(g), &q(d));
        let rows = vec![vec![q(m[0]), q(m[1])], vec![q(m[2]), q(m[3])]];
        let s = t.change_basis(&rows).unwrap();
        prop_assert!(check_gd_axioms(&s).passed());
        let (c0, c1) = (classify_2dim(&t).unwrap(), classify_2dim(&s).unwrap());
        let ag = |c: &Classification| match c {
            Classification::Case1 { alpha, gamma, .. } => (alpha.clone(), gamma.clone()),
            Classification::Case2 { alpha, .. } => (alpha.clone(), alpha.clone()),
            _ => (q(0), q(0)),
        };
        prop_assert_eq!(ag(&c0.class), ag(&c1.class));
        prop_assert_eq!(ag(&c1.class), (q(a), q(g)));
        // the normalized table has [u, v] = v in the input basis
        let (u, v) = (&c1.basis[0], &c1.basis[1]);
        prop_assert_eq!(&s.bracket(u, v), v);
    }

    #[test]
    fn tables_passing_the_axioms_classify(
        c in proptest::array::uniform8(-1i64..=1),
        b in -1i64..=1, b2 in -1i64..=1,
    ) {
        let raw: Raw = [[[c[0], c[1]], [c[2], c[3]]], [[c[4], c[5]], [c[6], c[7]]]];
        let br: Raw = [[[0, 0], [b, b2]], [[-b, -b2], [0, 0]]];
        let t = table_of(&raw, &br);
        let e = [[1, 0], [0, 1]];
        let oracle = (0..8).all(|x| raw_gd1(&raw, &br, e[x / 4], e[x / 2 % 2], e[x % 2]) == [0, 0]);
        let r = check_gd_axioms(&t);
        prop_assert_eq!(oracle, r.get("gd1").unwrap().witness.is_none());
        if r.passed() {
            prop_assert!(classify_2dim(&t).is_ok());
        }
    }
}

#[test]
fn case2_envelope_embeds() {
    for a in [1, 2, -3] {
        let t = mult_table_2(&q(a));
        let r = verify_embedding(&t, &case2_envelope(&q(a)), 4).unwrap();
        assert!(r.ok(), "{r}");
        assert_eq!(rederive_table(&case2_envelope(&q(a))).unwrap(), t);
    }
}

#[test]
fn printed_case2_derivation_fails() {
    let t = mult_table_2(&q(2));
    let r = verify_embedding(&t, &case2_envelope_printed(&q(2)), 4).unwrap();
    assert!(!r.ok());
    assert!(r.failed().contains(&"structure-constants"), "{r}");
}

#[test]
fn case3_envelope_embeds() {
    let e = case3_envelope();
    assert!(buchberger_failures(&e.relations).is_empty());
    let r = verify_embedding(&case3_table(), &e, 6).unwrap();
    assert!(r.ok(), "{r}");
    // u u' = v in the quotient, so d(u^2) = 2v
    let u = e.var("u");
    assert_eq!(e.nf(&e.d(&u.mul(&u))), e.var("v").scale(&q(2)));
}

#[test]
fn corrupted_case3_bracket_is_caught() {
    let mut e = case3_envelope();
    e.bracket.insert((0, 3), e.var("v'"));
    let r = verify_embedding(&case3_table(), &e, 6).unwrap();
    assert!(!r.ok());
}

#[test]
fn non_groebner_relations_are_rejected() {
    let mut e = case3_envelope();
    let (x, y) = (Poly::var(0), Poly::var(1));
    e.relations = vec![x.mul(&x).sub(&y), x.mul(&y).sub(&Poly::constant(q(1)))];
    assert!(matches!(verify_embedding(&case3_table(), &e, 2), Err(GdModelError::NotGroebner(..))));
}

#[test]
fn case1_bracket() {
    let r = bracket1_check(&q(0), &q(1), 3).unwrap();
    assert!(r.ok(), "{:?}", r.failures);
    assert_eq!(r.jacobi_triples, 56);
    assert_eq!(r.derivation_pairs, 64);
    // proportional to 1/(gamma - alpha)
    let (x, y) = (0, 3);
    assert_eq!(bracket1(&q(1), &q(3), x, y), bracket1(&q(0), &q(1), x, y).scale(&Q::new(1, 2)));
    assert!(bracket1_check(&q(2), &q(-1), 2).unwrap().ok());
    assert!(matches!(bracket1_check(&q(1), &q(1), 2), Err(GdModelError::Precondition(_))));
}
