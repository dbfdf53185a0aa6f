//! Independent oracles shared by the integration suites. Nothing here calls
//! into the solver's propagation, heuristics or clustering code.

#![allow(dead_code)]

use setbranch::expr::{BinaryOp, Expr};
use setbranch::generators::gen_randomb;
use setbranch::rng::XorShift64Star;
use setbranch::{Constraint, Problem, Value};

/// Plain backtracking over the original domains, checking each constraint
/// once its scope is fully assigned. Returns the first solution in
/// lexicographic order.
pub fn brute_force(problem: &Problem) -> Option<Vec<Value>> {
    let n = problem.num_vars();
    let mut watch: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (c, cons) in problem.constraints().iter().enumerate() {
        let last = *cons.scope().iter().max().expect("non-empty scope");
        watch[last].push(c);
    }
    let mut assignment = vec![0; n];
    fn go(p: &Problem, watch: &[Vec<usize>], a: &mut Vec<Value>, x: usize) -> bool {
        if x == a.len() {
            return true;
        }
        for &v in p.original_domain(x) {
            a[x] = v;
            let ok = watch[x].iter().all(|&c| {
                let cons = &p.constraints()[c];
                let t: Vec<Value> = cons.scope().iter().map(|&y| a[y]).collect();
                cons.check_tuple(&t)
            });
            if ok && go(p, watch, a, x + 1) {
                return true;
            }
        }
        false
    }
    go(problem, &watch, &mut assignment, 0).then_some(assignment)
}

/// Naive GAC closure: sweep every (constraint, variable, value) with a full
/// product search for support until nothing changes. `None` on wipeout.
pub fn naive_gac(problem: &Problem, mut domains: Vec<Vec<Value>>) -> Option<Vec<Vec<Value>>> {
    loop {
        let mut changed = false;
        for cons in problem.constraints() {
            let scope = cons.scope();
            for (pos, &x) in scope.iter().enumerate() {
                let before = domains[x].len();
                let keep: Vec<Value> = domains[x]
                    .iter()
                    .copied()
                    .filter(|&a| {
                        let mut t = vec![0; scope.len()];
                        t[pos] = a;
                        supported(cons, &domains, &mut t, 0, pos)
                    })
                    .collect();
                if keep.is_empty() {
                    return None;
                }
                if keep.len() != before {
                    domains[x] = keep;
                    changed = true;
                }
            }
        }
        if !changed {
            return Some(domains);
        }
    }
}

fn supported(cons: &Constraint, domains: &[Vec<Value>], t: &mut Vec<Value>, p: usize, fixed: usize) -> bool {
    if p == t.len() {
        return cons.check_tuple(t);
    }
    if p == fixed {
        return supported(cons, domains, t, p + 1, fixed);
    }
    for &v in &domains[cons.scope()[p]] {
        t[p] = v;
        if supported(cons, domains, t, p + 1, fixed) {
            return true;
        }
    }
    false
}

/// Small mixed instance: a model-B core (n <= 6, d <= 5) plus, for some
/// seeds, an extra ternary intensional and a ternary table constraint.
pub fn random_small(seed: u64) -> Problem {
    let mut rng = XorShift64Star::new(seed);
    let n = 2 + rng.below(5) as usize;
    let d = 2 + rng.below(4) as usize;
    let pairs = n * (n - 1) / 2;
    let p1 = 1 + rng.below(pairs as u64) as usize;
    let p2 = 1 + rng.below((d * d) as u64 - 1) as usize;
    let base = gen_randomb(n, d, p1, p2, rng.next_u64()).expect("valid model B parameters");
    if n < 3 || rng.below(2) == 0 {
        return base;
    }
    let mut b = Problem::builder();
    for x in 0..n {
        b.var(base.name(x), base.original_domain(x).iter().copied());
    }
    for c in base.constraints() {
        b.constraint(c.clone());
    }
    let picked = rng.sample(&(0..n).collect::<Vec<_>>(), 3);
    // x + y != z + k
    let k = rng.below(3) as Value;
    b.constraint(Constraint::intensional(
        picked.clone(),
        Expr::binary(
            BinaryOp::Ne,
            Expr::binary(BinaryOp::Add, Expr::var(0), Expr::var(1)),
            Expr::binary(BinaryOp::Add, Expr::var(2), Expr::constant(k)),
        ),
    ));
    let picked = rng.sample(&(0..n).collect::<Vec<_>>(), 3);
    let mut rows = Vec::new();
    for _ in 0..(d * d) {
        rows.push((0..3).map(|_| rng.below(d as u64) as Value).collect::<Vec<_>>());
    }
    b.constraint(Constraint::allowed(picked, rows));
    b.build().expect("valid instance")
}

/// BIC of a hard 1-D clustering given as groups of scores, with shared
/// variance SSE/(n-k) floored at 1e-9 and 2k parameters.
pub fn oracle_bic(groups: &[Vec<f64>]) -> f64 {
    let n: usize = groups.iter().map(Vec::len).sum();
    let k = groups.len();
    let nf = n as f64;
    let mut sse = 0.0;
    let mut loglik = 0.0;
    for g in groups {
        let mu = g.iter().sum::<f64>() / g.len() as f64;
        sse += g.iter().map(|s| (s - mu) * (s - mu)).sum::<f64>();
        loglik += g.len() as f64 * (g.len() as f64 / nf).ln();
    }
    let var = if n > k { (sse / (n - k) as f64).max(1e-9) } else { 1e-9 };
    loglik += -nf / 2.0 * (2.0 * std::f64::consts::PI * var).ln() - sse / (2.0 * var);
    loglik - k as f64 * nf.ln()
}

/// Best BIC over every way of cutting the sorted distinct scores into at
/// most `kmax` contiguous runs (equal scores stay together).
pub fn best_contiguous_bic(scores: &[f64], kmax: usize) -> (f64, usize) {
    let mut sorted = scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut runs: Vec<Vec<f64>> = Vec::new();
    for s in sorted {
        match runs.last_mut() {
            Some(r) if r[0] == s => r.push(s),
            _ => runs.push(vec![s]),
        }
    }
    let m = runs.len();
    let mut best = (f64::NEG_INFINITY, 0);
    // cut positions i mean "boundary after run i"; at most kmax - 1 of them
    let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
    while let Some(cuts) = stack.pop() {
        let mut groups: Vec<Vec<f64>> = vec![Vec::new()];
        for (i, r) in runs.iter().enumerate() {
            groups.last_mut().unwrap().extend(r);
            if cuts.contains(&i) {
                groups.push(Vec::new());
            }
        }
        let b = oracle_bic(&groups);
        if b > best.0 {
            best = (b, groups.len());
        }
        if cuts.len() + 1 < kmax {
            let from = cuts.last().map_or(0, |&c| c + 1);
            for next in from..m.saturating_sub(1) {
                let mut more = cuts.clone();
                more.push(next);
                stack.push(more);
            }
        }
    }
    best
}

/// Checks the structural promises of a clustering: disjoint non-empty
/// cover, contiguity in score order, equal scores together, descending
/// means, and k within bounds.
pub fn check_clustering(scores: &[f64], c: &setbranch::clustering::Clustering, kmax: usize) -> Result<(), String> {
    let n = scores.len();
    let mut owner = vec![usize::MAX; n];
    for (j, cluster) in c.clusters.iter().enumerate() {
        if cluster.is_empty() {
            return Err(format!("cluster {j} empty"));
        }
        for &i in cluster {
            if i >= n || owner[i] != usize::MAX {
                return Err(format!("index {i} out of range or repeated"));
            }
            owner[i] = j;
        }
    }
    if owner.contains(&usize::MAX) {
        return Err("not a cover".into());
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut seen_done = vec![false; c.clusters.len()];
    for w in order.windows(2) {
        let (a, b) = (w[0], w[1]);
        if scores[a] == scores[b] && owner[a] != owner[b] {
            return Err(format!("equal scores {} split", scores[a]));
        }
        if owner[a] != owner[b] {
            seen_done[owner[a]] = true;
            if seen_done[owner[b]] {
                return Err("cluster not contiguous in score order".into());
            }
        }
    }
    let means: Vec<f64> =
        c.clusters.iter().map(|g| g.iter().map(|&i| scores[i]).sum::<f64>() / g.len() as f64).collect();
    if means.windows(2).any(|w| w[0] < w[1]) {
        return Err(format!("means not descending: {means:?}"));
    }
    let mut distinct: Vec<f64> = scores.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if c.k() > kmax.min(distinct.len()) {
        return Err(format!("k = {} exceeds bound", c.k()));
    }
    Ok(())
}
