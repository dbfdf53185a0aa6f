//! (G)AC-3 propagation with dom/wdeg conflict weighting.
//!
//! Arcs are `(constraint, scope position)` pairs held in a FIFO queue without
//! duplicates. When a revision empties a domain, the weight of the revising
//! constraint goes up by one and propagation stops.

use crate::bits;
use crate::model::{Compiled, ConsId, Relation, SearchState, Value, VarId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropagationResult {
    Consistent,
    Wipeout { var: VarId, constraint: ConsId },
}

impl PropagationResult {
    pub fn is_consistent(self) -> bool {
        matches!(self, PropagationResult::Consistent)
    }
}

/// Removes every value of `x` without a support in `c` over the current
/// domains; returns whether anything was removed.
///
/// Panics if `x` is not in the scope of `c`.
pub fn revise(state: &mut SearchState, c: ConsId, x: VarId) -> bool {
    let pos = state
        .problem()
        .constraint(c)
        .scope()
        .iter()
        .position(|&v| v == x)
        .expect("variable not in constraint scope");
    revise_pos(state, c, pos)
}

fn revise_pos(state: &mut SearchState, c: ConsId, pos: usize) -> bool {
    let problem = state.problem();
    let cons = problem.constraint(c);
    let x = cons.scope()[pos];
    let mut doomed = std::mem::take(&mut state.scratch);
    doomed.clear();
    match problem.compiled(c) {
        Compiled::Binary { rows, stride } => {
            let y = cons.scope()[1 - pos];
            let dy = state.dom_words(y);
            let st = stride[pos];
            for i in bits::ones(state.dom_words(x)) {
                if !bits::intersects(&rows[pos][i * st..(i + 1) * st], dy) {
                    doomed.push(i);
                }
            }
        }
        Compiled::Table { supports } => {
            let Relation::Allowed(table) = cons.relation() else {
                unreachable!("table index built for allowed relations only")
            };
            for i in bits::ones(state.dom_words(x)) {
                let supported = supports[pos][i].iter().any(|&t| {
                    let row = &table.rows()[t as usize];
                    cons.scope().iter().zip(row).enumerate().all(|(p, (&y, &v))| {
                        p == pos || problem.value_index(y, v).is_some_and(|j| state.has_index(y, j))
                    })
                });
                if !supported {
                    doomed.push(i);
                }
            }
        }
        Compiled::Generic => {
            let others: Vec<Vec<Value>> = cons.scope().iter().map(|&y| state.domain(y)).collect();
            let dom = problem.original_domain(x);
            for i in bits::ones(state.dom_words(x)) {
                if !has_product_support(cons, pos, dom[i], &others) {
                    doomed.push(i);
                }
            }
        }
    }
    for &i in &doomed {
        state.remove_index(x, i);
    }
    let changed = !doomed.is_empty();
    state.scratch = doomed;
    changed
}

/// Enumerates the current-domain product of the other scope positions in
/// ascending order, stopping at the first satisfying tuple.
fn has_product_support(cons: &crate::model::Constraint, pos: usize, a: Value, domains: &[Vec<Value>]) -> bool {
    let k = domains.len();
    if (0..k).any(|p| p != pos && domains[p].is_empty()) {
        return false;
    }
    let mut idx = vec![0usize; k];
    let mut tuple: Vec<Value> = (0..k).map(|p| if p == pos { a } else { domains[p][0] }).collect();
    loop {
        if cons.check_tuple(&tuple) {
            return true;
        }
        // odometer over positions other than `pos`, last position fastest
        let mut p = k;
        loop {
            if p == 0 {
                return false;
            }
            p -= 1;
            if p == pos {
                continue;
            }
            idx[p] += 1;
            if idx[p] < domains[p].len() {
                tuple[p] = domains[p][idx[p]];
                break;
            }
            idx[p] = 0;
            tuple[p] = domains[p][0];
        }
    }
}

fn enqueue(state: &mut SearchState, c: ConsId, pos: usize) {
    let id = state.problem().arc_id(c, pos);
    if !state.queued[id] {
        state.queued[id] = true;
        state.queue.push_back((c, pos));
    }
}

fn clear_queue(state: &mut SearchState) {
    while let Some((c, pos)) = state.queue.pop_front() {
        let id = state.problem().arc_id(c, pos);
        state.queued[id] = false;
    }
}

/// Runs AC-3 from the given `(constraint, variable)` arcs to a fixpoint.
pub fn propagate(state: &mut SearchState, seeds: impl IntoIterator<Item = (ConsId, VarId)>) -> PropagationResult {
    let problem = state.problem();
    for (c, x) in seeds {
        let pos = problem.constraint(c).scope().iter().position(|&v| v == x).expect("arc outside scope");
        enqueue(state, c, pos);
    }
    run_queue(state)
}

/// Propagates after the domain of `x` was changed by a decision: every arc
/// `(c, y)` with `x, y` in the scope of `c` and `y != x`.
pub fn propagate_var(state: &mut SearchState, x: VarId) -> PropagationResult {
    enqueue_neighbors(state, x, None);
    run_queue(state)
}

/// Full arc queue in `(constraint, variable)` order.
pub fn establish_root_gac(state: &mut SearchState) -> PropagationResult {
    let problem = state.problem();
    for c in 0..problem.num_constraints() {
        for &pos in problem.arc_order(c) {
            enqueue(state, c, pos);
        }
    }
    run_queue(state)
}

fn enqueue_neighbors(state: &mut SearchState, x: VarId, skip: Option<ConsId>) {
    let problem = state.problem();
    for &c in problem.constraints_of(x) {
        if Some(c) == skip {
            continue;
        }
        let scope = problem.constraint(c).scope();
        for &pos in problem.arc_order(c) {
            if scope[pos] != x {
                enqueue(state, c, pos);
            }
        }
    }
}

fn run_queue(state: &mut SearchState) -> PropagationResult {
    let problem = state.problem();
    while let Some((c, pos)) = state.queue.pop_front() {
        let id = problem.arc_id(c, pos);
        state.queued[id] = false;
        if revise_pos(state, c, pos) {
            let x = problem.constraint(c).scope()[pos];
            if state.size(x) == 0 {
                state.bump_weight(c);
                state.counters.wipeouts += 1;
                clear_queue(state);
                return PropagationResult::Wipeout { var: x, constraint: c };
            }
            enqueue_neighbors(state, x, Some(c));
        }
    }
    PropagationResult::Consistent
}
