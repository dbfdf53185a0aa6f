//! dom/wdeg variable ordering and Geelen's promise value scoring.

use crate::bits;
use crate::model::{Compiled, SearchState, Value, VarId};

/// Promise scores are products of support counts; they saturate at
/// `u128::MAX`, which only matters for ordering.
pub type Promise = u128;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScoredValue {
    pub value: Value,
    pub score: Promise,
}

/// Sum of the weights of constraints on `x` that involve at least one other
/// unassigned variable.
pub fn wdeg(state: &SearchState, x: VarId) -> u64 {
    let problem = state.problem();
    problem
        .constraints_of(x)
        .iter()
        .filter(|&&c| problem.constraint(c).scope().iter().any(|&y| y != x && !state.is_assigned(y)))
        .map(|&c| state.weights()[c])
        .sum()
}

/// Unassigned variable with the smallest `|D(x)| / wdeg(x)`; a zero weighted
/// degree counts as an infinite ratio and ties go to the smaller id.
/// `None` when every variable is assigned.
pub fn select_variable(state: &SearchState) -> Option<VarId> {
    let mut best: Option<(VarId, u64, u64)> = None;
    for x in 0..state.problem().num_vars() {
        if state.is_assigned(x) {
            continue;
        }
        let size = state.size(x) as u64;
        let w = wdeg(state, x);
        let better = match best {
            None => true,
            Some((_, bs, bw)) => ratio_less(size, w, bs, bw),
        };
        if better {
            best = Some((x, size, w));
        }
    }
    best.map(|(x, _, _)| x)
}

/// `s1/w1 < s2/w2` with `s/0 = +inf`.
fn ratio_less(s1: u64, w1: u64, s2: u64, w2: u64) -> bool {
    match (w1, w2) {
        (0, _) => false,
        (_, 0) => true,
        _ => (s1 as u128) * (w2 as u128) < (s2 as u128) * (w1 as u128),
    }
}

/// Product, over unassigned neighbours `y` sharing a binary constraint with
/// `x`, of the number of values of `y` compatible with `x = a` under every
/// binary constraint on the pair.
pub fn promise(state: &SearchState, x: VarId, a: Value) -> ScoredValue {
    let problem = state.problem();
    let i = problem.value_index(x, a).expect("value not in the original domain");
    let mut score: Promise = 1;
    let mut row: Vec<u64> = Vec::new();
    for nb in problem.neighbors(x) {
        let y = nb.var;
        if state.is_assigned(y) {
            continue;
        }
        row.clear();
        row.extend_from_slice(state.dom_words(y));
        let mut generic = Vec::new();
        for &c in &nb.constraints {
            let pos = if problem.constraint(c).scope()[0] == x { 0 } else { 1 };
            match problem.compiled(c) {
                Compiled::Binary { rows, stride } => {
                    let st = stride[pos];
                    for (w, m) in row.iter_mut().zip(&rows[pos][i * st..(i + 1) * st]) {
                        *w &= m;
                    }
                }
                _ => generic.push((c, pos)),
            }
        }
        let count = if generic.is_empty() {
            row.iter().map(|w| w.count_ones() as usize).sum()
        } else {
            let dom = problem.original_domain(y);
            bits::ones(&row)
                .filter(|&j| {
                    generic.iter().all(|&(c, pos)| {
                        let t = if pos == 0 { [a, dom[j]] } else { [dom[j], a] };
                        problem.constraint(c).check_tuple(&t)
                    })
                })
                .count()
        };
        score = score.saturating_mul(count as Promise);
    }
    ScoredValue { value: a, score }
}

/// Current domain of `x` scored afresh, by descending promise then ascending
/// value.
pub fn score_domain(state: &SearchState, x: VarId) -> Vec<ScoredValue> {
    let mut scored: Vec<ScoredValue> = state.values(x).map(|a| promise(state, x, a)).collect();
    scored.sort_by(|p, q| q.score.cmp(&p.score).then(p.value.cmp(&q.value)));
    scored
}
