mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use setbranch::generators::{gen_coloring, gen_forced, gen_langford, gen_pigeons, gen_qwh, gen_randomb, GenSpec};
use setbranch::model::Relation;
use setbranch::{verify, Problem};

fn pairs_and_tables(p: &Problem) -> (BTreeSet<Vec<usize>>, Vec<usize>) {
    let scopes = p.constraints().iter().map(|c| c.scope().to_vec()).collect();
    let sizes = p
        .constraints()
        .iter()
        .map(|c| match c.relation() {
            Relation::Forbidden(t) => t.rows().iter().collect::<BTreeSet<_>>().len(),
            other => panic!("model B uses forbidden tables, got {other:?}"),
        })
        .collect();
    (scopes, sizes)
}

#[test]
fn small_families_against_brute_force() {
    for n in 2..=5 {
        assert!(common::brute_force(&gen_pigeons(n).unwrap()).is_none(), "pigeons {n}");
    }
    for n in 2..=4 {
        let sat = common::brute_force(&gen_langford(n).unwrap()).is_some();
        assert_eq!(sat, n % 4 == 0 || n % 4 == 3, "langford {n}");
    }
    // a triangle needs three colors
    let tri = "coloring n=3 edges=3 k=2".parse::<GenSpec>().unwrap().generate().unwrap().problem;
    assert!(common::brute_force(&tri).is_none());
    let tri3 = gen_coloring(3, 3, 3, 0).unwrap();
    assert!(common::brute_force(&tri3).is_some());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn model_b_has_exact_counts(n in 2usize..9, d in 1usize..5, seed in any::<u64>(), a in any::<u16>(), b in any::<u16>()) {
        let p1 = 1 + a as usize % (n * (n - 1) / 2);
        let p2 = 1 + b as usize % (d * d);
        let p = gen_randomb(n, d, p1, p2, seed).unwrap();
        let (scopes, sizes) = pairs_and_tables(&p);
        prop_assert_eq!(scopes.len(), p1);
        prop_assert!(scopes.iter().all(|s| s.len() == 2 && s[0] < s[1]));
        prop_assert!(sizes.iter().all(|&k| k == p2));
        prop_assert_eq!(setbranch::instance_io::serialize_instance(&p),
            setbranch::instance_io::serialize_instance(&gen_randomb(n, d, p1, p2, seed).unwrap()));
    }

    #[test]
    fn forced_instances_keep_their_solution(n in 2usize..8, d in 2usize..5, seed in any::<u64>(), a in any::<u16>(), b in any::<u16>()) {
        let p1 = 1 + a as usize % (n * (n - 1) / 2);
        let p2 = 1 + b as usize % (d * d - 1);
        let g = gen_forced(n, d, p1, p2, seed).unwrap();
        let planted = g.planted.unwrap();
        prop_assert!(verify(&g.problem, &planted));
        let (_, sizes) = pairs_and_tables(&g.problem);
        prop_assert!(sizes.iter().all(|&k| k == p2));
        prop_assert!(common::brute_force(&g.problem).is_some());
    }

    #[test]
    fn qwh_plants_a_latin_square(order in 2usize..7, seed in any::<u64>(), h in any::<u16>()) {
        let holes = h as usize % (order * order + 1);
        let g = gen_qwh(order, holes, seed).unwrap();
        let sq = g.planted.unwrap();
        for r in 0..order {
            let row: BTreeSet<_> = (0..order).map(|c| sq[r * order + c]).collect();
            let col: BTreeSet<_> = (0..order).map(|c| sq[c * order + r]).collect();
            prop_assert_eq!(row.len(), order);
            prop_assert_eq!(col.len(), order);
        }
        prop_assert!(verify(&g.problem, &sq));
        let open = (0..order * order).filter(|&x| g.problem.original_domain(x).len() > 1).count();
        prop_assert_eq!(open, holes);
    }

    #[test]
    fn coloring_has_exact_edges(n in 1usize..10, k in 1usize..4, seed in any::<u64>(), e in any::<u16>()) {
        let edges = e as usize % (n * (n - 1) / 2 + 1);
        let p = gen_coloring(n, edges, k, seed).unwrap();
        let scopes: BTreeSet<_> = p.constraints().iter().map(|c| c.scope().to_vec()).collect();
        prop_assert_eq!(scopes.len(), edges);
        prop_assert!(p.original_domains().iter().all(|d| d.len() == k));
    }

    #[test]
    fn spec_text_round_trips(n in 2u64..30, d in 1u64..9, seed in any::<u64>(), fam in 0usize..6) {
        let text = match fam {
            0 => format!("pigeons n={n}"),
            1 => format!("langford n={n}"),
            2 => format!("randomb n={n} d={d} p1=1 p2=1 seed={seed}"),
            3 => format!("forced n={n} d={} p1=1 p2=1 seed={seed}", d + 1),
            4 => format!("qwh order={n} holes={d} seed={seed}"),
            _ => format!("coloring n={n} edges=1 k={d} seed={seed}"),
        };
        let spec: GenSpec = text.parse().unwrap();
        let again: GenSpec = spec.to_string().parse().unwrap();
        prop_assert_eq!(spec, again);
        prop_assert!(spec.name().starts_with(spec.family_name()));
    }
}

#[test]
fn bad_parameters_are_rejected() {
    assert!(gen_pigeons(1).is_err());
    assert!(gen_randomb(4, 2, 7, 1, 0).is_err());
    assert!(gen_randomb(4, 2, 6, 5, 0).is_err());
    assert!(gen_forced(4, 2, 6, 4, 0).is_err());
    assert!(gen_qwh(3, 10, 0).is_err());
    assert!(gen_coloring(3, 4, 2, 0).is_err());
    assert!("qwh order=5".parse::<GenSpec>().is_err());
    assert!("pigeons n=x".parse::<GenSpec>().is_err());
}
