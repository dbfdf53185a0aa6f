use proptest::prelude::*;

use setbranch::expr::{BinaryOp, Expr, UnaryOp};
use setbranch::instance_io::{parse_instance, serialize_instance, ParseError};
use setbranch::{Constraint, Problem, Value};

fn expr_strategy(arity: usize) -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![(0..arity).prop_map(Expr::var), (-5i64..6).prop_map(Expr::constant)];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (prop::sample::select(UnaryOp::ALL.to_vec()), inner.clone()).prop_map(|(op, e)| Expr::unary(op, e)),
            (prop::sample::select(BinaryOp::ALL.to_vec()), inner.clone(), inner)
                .prop_map(|(op, a, b)| Expr::binary(op, a, b)),
        ]
    })
}

#[derive(Debug, Clone)]
enum Rel {
    Allowed(Vec<Vec<usize>>),
    Forbidden(Vec<Vec<usize>>),
    Int(Expr),
}

/// Domains as sorted distinct values; constraints as (scope picks, relation)
/// with table entries given as domain indices.
fn problem_strategy() -> impl Strategy<Value = Problem> {
    let domains = prop::collection::vec(prop::collection::btree_set(-20i64..20, 1..6), 1..6);
    domains.prop_flat_map(|domains| {
        let n = domains.len();
        let domains: Vec<Vec<Value>> = domains.into_iter().map(|d| d.into_iter().collect()).collect();
        let cons = prop::collection::vec(
            (prop::sample::subsequence((0..n).collect::<Vec<_>>(), 1..=n.min(3)), 0..3u8).prop_flat_map(
                |(scope, kind)| {
                    let arity = scope.len();
                    let rows = prop::collection::vec(prop::collection::vec(0usize..5, arity), 0..5);
                    let rel = match kind {
                        0 => rows.prop_map(Rel::Allowed).boxed(),
                        1 => rows.prop_map(Rel::Forbidden).boxed(),
                        _ => expr_strategy(arity).prop_map(Rel::Int).boxed(),
                    };
                    (Just(scope), rel)
                },
            ),
            0..5,
        );
        (Just(domains), cons)
    })
    .prop_map(|(domains, cons)| {
        let mut b = Problem::builder();
        for (i, d) in domains.iter().enumerate() {
            b.var(format!("v{i}"), d.iter().copied());
        }
        for (scope, rel) in cons {
            let pick = |rows: Vec<Vec<usize>>| -> Vec<Vec<Value>> {
                rows.into_iter()
                    .map(|r| r.iter().zip(&scope).map(|(&i, &x)| domains[x][i % domains[x].len()]).collect())
                    .collect()
            };
            let c = match rel {
                Rel::Allowed(rows) => Constraint::allowed(scope.clone(), pick(rows)),
                Rel::Forbidden(rows) => Constraint::forbidden(scope.clone(), pick(rows)),
                Rel::Int(e) => Constraint::intensional(scope.clone(), e),
            };
            b.constraint(c);
        }
        b.build().expect("generated problems are well formed")
    })
}

fn all_tuples(p: &Problem, scope: &[usize]) -> Vec<Vec<Value>> {
    let mut out = vec![Vec::new()];
    for &x in scope {
        out = out
            .into_iter()
            .flat_map(|t| p.original_domain(x).iter().map(move |&v| [t.clone(), vec![v]].concat()))
            .collect();
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn serialize_then_parse_is_identity(p in problem_strategy()) {
        let text = serialize_instance(&p);
        let q = parse_instance(&text).unwrap();
        prop_assert_eq!(serialize_instance(&q), text);
        prop_assert_eq!(q.names(), p.names());
        prop_assert_eq!(q.original_domains(), p.original_domains());
        for (a, b) in p.constraints().iter().zip(q.constraints()) {
            prop_assert_eq!(a.scope(), b.scope());
            for t in all_tuples(&p, a.scope()) {
                prop_assert_eq!(a.check_tuple(&t), b.check_tuple(&t));
            }
        }
    }

    #[test]
    fn parser_never_panics_on_noise(text in "[ -~\n]{0,200}") {
        let _ = parse_instance(&text);
    }

    #[test]
    fn parser_never_panics_on_token_soup(
        words in prop::collection::vec(
            prop::sample::select(vec![
                "var", "con", "ext", "int", "allowed", "forbidden", "in", "x", "y", "csp", "1", "-3", "0..2",
                "..", "(", ")", "{", "}", ",", ":", "ne(", "add(", "\n", "#",
            ]),
            0..60,
        )
    ) {
        let _ = parse_instance(&words.join(" "));
    }
}

#[test]
fn format_examples() {
    let text = "csp 1\r\nvar x 0..2 # trailing comment\nvar y in {5,1,3}\ncon ext allowed (x,y) : (0,1) (2,5)\n\
                con ext forbidden (y,x) :\ncon int (x,y) : lt(add(x,-3),y)\n";
    let p = parse_instance(text).unwrap();
    assert_eq!(p.original_domain(1), &[1, 3, 5]);
    assert!(p.constraints()[0].check_tuple(&[2, 5]));
    assert!(!p.constraints()[0].check_tuple(&[1, 5]));
    assert!(p.constraints()[1].check_tuple(&[1, 0]));
    assert_eq!(
        serialize_instance(&p),
        "var x 0..2\nvar y in {1,3,5}\ncon ext allowed (x,y) : (0,1) (2,5)\ncon ext forbidden (y,x) :\n\
         con int (x,y) : lt(add(x,-3),y)\n"
    );
}

#[test]
fn error_positions() {
    assert!(matches!(
        parse_instance("var x 0..2\ncon int (x,z) : ne(x,z)\n"),
        Err(ParseError::UndeclaredVariable { line: 2, .. })
    ));
    assert!(matches!(
        parse_instance("var x 0..2\nvar y 0..2\ncon ext allowed (x,y) : (0,1,2)\n"),
        Err(ParseError::ArityMismatch { line: 3, expected: 2, got: 3 })
    ));
    assert!(matches!(
        parse_instance("var x 0..2\nvar y 0..2\ncon ext allowed (x,y) : (0,7)\n"),
        Err(ParseError::ValueOutsideDomain { line: 3, value: 7, .. })
    ));
    assert!(matches!(parse_instance("var x 0..2\nvar x 0..1\n"), Err(ParseError::Invalid { line: 2, .. })));
    assert!(matches!(parse_instance("var x 2..0\n"), Err(ParseError::Syntax { .. }) | Err(ParseError::Invalid { .. })));
}
