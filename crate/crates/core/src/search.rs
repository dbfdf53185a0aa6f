//! MAC depth-first search over branch plans.
//!
//! Every applied decision (an assignment, a set reduction or a right-branch
//! removal) followed by propagation costs one node. Root propagation is free.

use std::fmt;

use web_time::Instant;

use crate::branching::{has_ties, plan_scored, PlanStyle, Scheme};
use crate::heuristics::{score_domain, select_variable};
use crate::model::{Counters, Level, Problem, SearchState, Value, VarId};
use crate::propagation::{establish_root_gac, propagate_var};

/// How often, in nodes, the wall clock is consulted.
const TIME_CHECK_PERIOD: u64 = 64;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Limits {
    pub wall_time_ms: Option<u64>,
    pub max_nodes: Option<u64>,
}

impl Limits {
    pub fn none() -> Self {
        Limits::default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    /// A full assignment, indexed by variable.
    Sat(Vec<Value>),
    Unsat,
    Limit,
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Status::Sat(_) => "sat",
            Status::Unsat => "unsat",
            Status::Limit => "limit",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunStats {
    pub nodes: u64,
    /// Left and enumerated branches; right branches are nodes but not decisions.
    pub decisions: u64,
    pub backtracks: u64,
    pub wipeouts: u64,
    pub elapsed_ms: f64,
    /// Variables branched on.
    pub choice_points: u64,
    /// Choice points whose scored domain had two equal promise scores.
    pub tied_choice_points: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub status: Status,
    pub stats: RunStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchKind {
    Left,
    Right,
    Enumerated(usize),
}

/// One applied decision: `LEVEL VAR {VALUES} L|R|E#i`. For right branches
/// the values are the ones removed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub level: usize,
    pub var: String,
    pub values: Vec<Value>,
    pub kind: BranchKind,
}

impl fmt::Display for TraceEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {{", self.level, self.var)?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("} ")?;
        match self.kind {
            BranchKind::Left => f.write_str("L"),
            BranchKind::Right => f.write_str("R"),
            BranchKind::Enumerated(i) => write!(f, "E#{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub scheme: Scheme,
    pub limits: Limits,
    /// Recorded with results. The search itself is deterministic.
    pub seed: u64,
    /// Collect a decision trace.
    pub trace: bool,
}

impl SolveConfig {
    pub fn new(scheme: impl Into<Scheme>) -> Self {
        SolveConfig { scheme: scheme.into(), limits: Limits::none(), seed: 0, trace: false }
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = true;
        self
    }
}

/// Solves `problem` from scratch.
pub fn solve(problem: &Problem, config: &SolveConfig) -> Outcome {
    solve_traced(problem, config).0
}

/// Like [`solve`], also returning the decision trace (empty unless
/// `config.trace` is set).
pub fn solve_traced(problem: &Problem, config: &SolveConfig) -> (Outcome, Vec<TraceEntry>) {
    solve_in(&mut SearchState::new(problem), config)
}

/// Runs the search on an existing state. On return the state is restored
/// to the domains it had on entry, while conflict weights and counters keep
/// their updates.
pub fn solve_in(state: &mut SearchState, config: &SolveConfig) -> (Outcome, Vec<TraceEntry>) {
    let start = Instant::now();
    let before = state.counters;
    let root = state.push_level();
    let mut search = Search { state, config, start, trace: Vec::new(), choice_points: 0, tied: 0 };
    let status = if !establish_root_gac(search.state).is_consistent() {
        Status::Unsat
    } else {
        match search.dfs(0) {
            Ok(Some(solution)) => Status::Sat(solution),
            Ok(None) => Status::Unsat,
            Err(LimitHit) => Status::Limit,
        }
    };
    search.state.undo_to(root);
    let Counters { nodes, decisions, backtracks, wipeouts } = search.state.counters;
    let stats = RunStats {
        nodes: nodes - before.nodes,
        decisions: decisions - before.decisions,
        backtracks: backtracks - before.backtracks,
        wipeouts: wipeouts - before.wipeouts,
        elapsed_ms: start.elapsed().as_secs_f64() * 1000.0,
        choice_points: search.choice_points,
        tied_choice_points: search.tied,
    };
    if let Status::Sat(assignment) = &status {
        assert!(verify(search.state.problem(), assignment), "search produced an invalid assignment");
    }
    (Outcome { status, stats }, search.trace)
}

/// Whether a total assignment satisfies every constraint.
pub fn verify(problem: &Problem, assignment: &[Value]) -> bool {
    if assignment.len() != problem.num_vars() {
        return false;
    }
    let mut tuple = Vec::new();
    problem.constraints().iter().all(|c| {
        tuple.clear();
        tuple.extend(c.scope().iter().map(|&x| assignment[x]));
        c.check_tuple(&tuple)
    })
}

struct LimitHit;

struct Search<'s, 'p> {
    state: &'s mut SearchState<'p>,
    config: &'s SolveConfig,
    start: Instant,
    trace: Vec<TraceEntry>,
    choice_points: u64,
    tied: u64,
}

impl Search<'_, '_> {
    /// Accounts for one decision about to be applied.
    fn node(&mut self) -> Result<(), LimitHit> {
        let limits = self.config.limits;
        let nodes = self.state.counters.nodes;
        if limits.max_nodes.is_some_and(|m| nodes >= m) {
            return Err(LimitHit);
        }
        if let Some(ms) = limits.wall_time_ms {
            if nodes.is_multiple_of(TIME_CHECK_PERIOD) && self.start.elapsed().as_millis() >= ms as u128 {
                return Err(LimitHit);
            }
        }
        self.state.counters.nodes += 1;
        Ok(())
    }

    fn record(&mut self, level: usize, x: VarId, values: &[Value], kind: BranchKind) {
        if self.config.trace {
            let var = self.state.problem().name(x).to_string();
            self.trace.push(TraceEntry { level, var, values: values.to_vec(), kind });
        }
    }

    /// Searches below a consistent state; the right branches of binary plans
    /// continue in the same frame one level deeper.
    fn dfs(&mut self, mut level: usize) -> Result<Option<Vec<Value>>, LimitHit> {
        let base = self.state.push_level();
        loop {
            let Some(x) = select_variable(self.state) else {
                let solution = (0..self.state.problem().num_vars())
                    .map(|y| self.state.assigned(y).expect("all singleton"))
                    .collect();
                return Ok(Some(solution));
            };
            let scored = score_domain(self.state, x);
            self.choice_points += 1;
            if has_ties(&scored) {
                self.tied += 1;
            }
            let plan = plan_scored(&self.config.scheme, self.state, x, &scored);
            match plan.style {
                PlanStyle::Enumerated => {
                    for (i, set) in plan.sets.iter().enumerate() {
                        if let Some(found) = self.try_branch(level, x, set, BranchKind::Enumerated(i))? {
                            return Ok(Some(found));
                        }
                    }
                    self.state.undo_to(base);
                    return Ok(None);
                }
                PlanStyle::Binary => {
                    let set = &plan.sets[0];
                    if let Some(found) = self.try_branch(level, x, set, BranchKind::Left)? {
                        return Ok(Some(found));
                    }
                    self.node()?;
                    self.record(level, x, set, BranchKind::Right);
                    for &v in set {
                        self.state.remove_value(x, v);
                    }
                    if self.state.size(x) == 0 || !propagate_var(self.state, x).is_consistent() {
                        self.state.counters.backtracks += 1;
                        self.state.undo_to(base);
                        return Ok(None);
                    }
                    level += 1;
                }
            }
        }
    }

    /// Reduces `x` to `set`, propagates and searches below; undoes the
    /// branch unless it led to a solution.
    fn try_branch(
        &mut self,
        level: usize,
        x: VarId,
        set: &[Value],
        kind: BranchKind,
    ) -> Result<Option<Vec<Value>>, LimitHit> {
        let mark: Level = self.state.push_level();
        self.node()?;
        self.state.counters.decisions += 1;
        self.record(level, x, set, kind);
        self.state.reduce_domain(x, set);
        if propagate_var(self.state, x).is_consistent() {
            if let Some(found) = self.dfs(level + 1)? {
                return Ok(Some(found));
            }
        } else {
            self.state.counters.backtracks += 1;
        }
        self.state.undo_to(mark);
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branching::SchemeKind;
    use crate::generators::{gen_forced, gen_langford, gen_pigeons, gen_qwh};

    #[test]
    fn pigeons_two_fails_at_root() {
        let p = gen_pigeons(2).unwrap();
        for k in SchemeKind::ALL {
            let out = solve(&p, &SolveConfig::new(k));
            assert_eq!(out.status, Status::Unsat);
            assert_eq!(out.stats.nodes, 0);
        }
    }

    #[test]
    fn full_square_needs_no_decisions() {
        let g = gen_qwh(4, 0, 9).unwrap();
        let out = solve(&g.problem, &SolveConfig::new(SchemeKind::TwoWay));
        assert_eq!(out.status, Status::Sat(g.planted.unwrap()));
        assert_eq!(out.stats.decisions, 0);
    }

    #[test]
    fn small_langford() {
        let p = gen_langford(3).unwrap();
        let q = gen_langford(5).unwrap();
        for k in SchemeKind::ALL {
            assert!(matches!(solve(&p, &SolveConfig::new(k)).status, Status::Sat(_)), "{k}");
            assert_eq!(solve(&q, &SolveConfig::new(k)).status, Status::Unsat, "{k}");
        }
    }

    #[test]
    fn verify_rejects_corruption() {
        let g = gen_forced(6, 4, 8, 5, 11).unwrap();
        let mut planted = g.planted.unwrap();
        assert!(verify(&g.problem, &planted));
        let c = &g.problem.constraints()[0];
        let x = c.scope()[0];
        let original = planted[x];
        // some other value of x must clash with the planted neighbour
        let clash = g.problem.original_domain(x).iter().copied().filter(|&v| v != original).any(|v| {
            planted[x] = v;
            !verify(&g.problem, &planted)
        });
        assert!(clash);
        assert!(!verify(&g.problem, &planted[1..]));
    }

    #[test]
    fn nodes_cover_decisions_and_trail_restores() {
        let p = gen_pigeons(5).unwrap();
        let mut state = SearchState::new(&p);
        let config = SolveConfig::new(SchemeKind::TwoWay).with_trace();
        let (out, trace) = solve_in(&mut state, &config);
        assert_eq!(out.status, Status::Unsat);
        assert!(out.stats.nodes >= out.stats.decisions);
        assert_eq!(trace.len() as u64, out.stats.nodes);
        assert_eq!(state.domains(), p.original_domains().to_vec());
        assert_eq!(trace[0].to_string(), "0 p0 {0} L");
    }

    #[test]
    fn node_limit_trips() {
        let p = gen_pigeons(7).unwrap();
        let config = SolveConfig::new(SchemeKind::DWay).with_limits(Limits { wall_time_ms: None, max_nodes: Some(10) });
        let out = solve(&p, &config);
        assert_eq!(out.status, Status::Limit);
        assert_eq!(out.stats.nodes, 10);
    }

    #[test]
    fn trace_format() {
        let e = TraceEntry { level: 3, var: "x".into(), values: vec![1, 4], kind: BranchKind::Enumerated(2) };
        assert_eq!(e.to_string(), "3 x {1,4} E#2");
    }
}
