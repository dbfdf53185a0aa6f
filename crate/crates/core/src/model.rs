//! Problem representation and the trailed search-time domain store.
//!
//! A [`Problem`] is immutable once built. Every run works on its own
//! [`SearchState`], which keeps current domains as bitsets over the original
//! domain indices and logs each deletion on a trail so that backtracking
//! restores domains exactly.

use std::collections::{HashSet, VecDeque};

use thiserror::Error;

use crate::bits;
use crate::expr::Expr;

pub type Value = i64;
pub type VarId = usize;
pub type ConsId = usize;

/// Binary constraints whose domain product is larger than this are checked
/// tuple by tuple instead of through a precomputed compatibility matrix.
const MATRIX_LIMIT: usize = 1 << 22;

/// A set of tuples, kept sorted and duplicate-free.
#[derive(Debug, Clone, Default)]
pub struct Table {
    rows: Vec<Vec<Value>>,
    index: HashSet<Vec<Value>>,
}

impl Table {
    pub fn new(rows: impl IntoIterator<Item = Vec<Value>>) -> Self {
        let mut rows: Vec<Vec<Value>> = rows.into_iter().collect();
        rows.sort();
        rows.dedup();
        let index = rows.iter().cloned().collect();
        Table { rows, index }
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn contains(&self, tuple: &[Value]) -> bool {
        self.index.contains(tuple)
    }
}

impl PartialEq for Table {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
    }
}

impl Eq for Table {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Relation {
    Allowed(Table),
    Forbidden(Table),
    Intensional(Expr),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    scope: Vec<VarId>,
    relation: Relation,
}

impl Constraint {
    pub fn new(scope: Vec<VarId>, relation: Relation) -> Self {
        Constraint { scope, relation }
    }

    pub fn allowed(scope: Vec<VarId>, tuples: impl IntoIterator<Item = Vec<Value>>) -> Self {
        Self::new(scope, Relation::Allowed(Table::new(tuples)))
    }

    pub fn forbidden(scope: Vec<VarId>, tuples: impl IntoIterator<Item = Vec<Value>>) -> Self {
        Self::new(scope, Relation::Forbidden(Table::new(tuples)))
    }

    pub fn intensional(scope: Vec<VarId>, expr: Expr) -> Self {
        Self::new(scope, Relation::Intensional(expr))
    }

    pub fn scope(&self) -> &[VarId] {
        &self.scope
    }

    pub fn relation(&self) -> &Relation {
        &self.relation
    }

    pub fn arity(&self) -> usize {
        self.scope.len()
    }

    /// Whether `tuple` (one value per scope position) satisfies the relation.
    /// An expression that fails to evaluate rejects the tuple.
    pub fn check_tuple(&self, tuple: &[Value]) -> bool {
        debug_assert_eq!(tuple.len(), self.scope.len());
        match &self.relation {
            Relation::Allowed(t) => t.contains(tuple),
            Relation::Forbidden(t) => !t.contains(tuple),
            Relation::Intensional(e) => match e.eval(tuple) {
                Ok(v) => v != 0,
                Err(err) => {
                    log::debug!("tuple {tuple:?} rejected: {err}");
                    false
                }
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("variable `{0}` has an empty domain")]
    EmptyDomain(String),
    #[error("variable `{var}` lists value {value} more than once")]
    DuplicateValue { var: String, value: Value },
    #[error("variable name `{0}` declared twice")]
    DuplicateName(String),
    #[error("constraint {0} has an empty scope")]
    EmptyScope(ConsId),
    #[error("constraint {constraint} mentions variable {var} more than once")]
    RepeatedScopeVar { constraint: ConsId, var: VarId },
    #[error("constraint {constraint} refers to unknown variable {var}")]
    UnknownVariable { constraint: ConsId, var: VarId },
    #[error("constraint {constraint}: tuple {tuple:?} has arity {got}, expected {expected}")]
    TupleArity { constraint: ConsId, tuple: Vec<Value>, got: usize, expected: usize },
    #[error("constraint {constraint}: tuple {tuple:?} has a value outside the declared domains")]
    TupleOutsideDomain { constraint: ConsId, tuple: Vec<Value> },
    #[error("constraint {0}: expression refers to a variable outside its scope")]
    ExprOutOfScope(ConsId),
}

/// Precomputed support structures, one per constraint.
#[derive(Debug, Clone)]
pub(crate) enum Compiled {
    /// `rows[p]` holds, for each original value index of `scope[p]`, a bitset
    /// over the original domain of the other variable; rows are `stride[p]`
    /// words wide.
    Binary { rows: [Vec<u64>; 2], stride: [usize; 2] },
    /// Allowed tuples indexed by (scope position, value index).
    Table { supports: Vec<Vec<Vec<u32>>> },
    Generic,
}

/// A variable sharing at least one binary constraint with another.
#[derive(Debug, Clone)]
pub(crate) struct Neighbor {
    pub var: VarId,
    pub constraints: Vec<ConsId>,
}

/// Immutable constraint satisfaction problem: variables with finite
/// ascending domains and a list of constraints over them.
#[derive(Debug, Clone)]
pub struct Problem {
    names: Vec<String>,
    domains: Vec<Vec<Value>>,
    constraints: Vec<Constraint>,
    contiguous: Vec<bool>,
    var_constraints: Vec<Vec<ConsId>>,
    compiled: Vec<Compiled>,
    neighbors: Vec<Vec<Neighbor>>,
    arc_offset: Vec<usize>,
    arc_order: Vec<Vec<usize>>,
}

impl PartialEq for Problem {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names
            && self.domains == other.domains
            && self.constraints == other.constraints
    }
}

impl Problem {
    /// Validates and indexes a problem. Domains are sorted ascending; they
    /// must be non-empty and free of duplicates.
    pub fn new(
        names: Vec<String>,
        domains: Vec<Vec<Value>>,
        constraints: Vec<Constraint>,
    ) -> Result<Self, ModelError> {
        assert_eq!(names.len(), domains.len(), "one domain per variable name");
        let mut seen = HashSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(ModelError::DuplicateName(n.clone()));
            }
        }
        let mut sorted = Vec::with_capacity(domains.len());
        for (name, mut dom) in names.iter().zip(domains) {
            if dom.is_empty() {
                return Err(ModelError::EmptyDomain(name.clone()));
            }
            dom.sort_unstable();
            if let Some(w) = dom.windows(2).find(|w| w[0] == w[1]) {
                return Err(ModelError::DuplicateValue { var: name.clone(), value: w[0] });
            }
            sorted.push(dom);
        }
        let domains = sorted;
        let n = domains.len();
        for (id, c) in constraints.iter().enumerate() {
            validate_constraint(id, c, &domains)?;
        }

        let contiguous = domains
            .iter()
            .map(|d| d[d.len() - 1] as i128 - d[0] as i128 + 1 == d.len() as i128)
            .collect();
        let mut var_constraints = vec![Vec::new(); n];
        for (id, c) in constraints.iter().enumerate() {
            for &x in &c.scope {
                var_constraints[x].push(id);
            }
        }
        let mut arc_offset = Vec::with_capacity(constraints.len() + 1);
        let mut total = 0;
        for c in &constraints {
            arc_offset.push(total);
            total += c.arity();
        }
        arc_offset.push(total);
        let arc_order = constraints
            .iter()
            .map(|c| {
                let mut pos: Vec<usize> = (0..c.arity()).collect();
                pos.sort_by_key(|&p| c.scope[p]);
                pos
            })
            .collect();

        let mut problem = Problem {
            names,
            domains,
            constraints,
            contiguous,
            var_constraints,
            compiled: Vec::new(),
            neighbors: Vec::new(),
            arc_offset,
            arc_order,
        };
        problem.compiled = problem.constraints.iter().map(|c| problem.compile(c)).collect();
        problem.neighbors = problem.build_neighbors();
        Ok(problem)
    }

    pub fn builder() -> ProblemBuilder {
        ProblemBuilder::default()
    }

    pub fn num_vars(&self) -> usize {
        self.domains.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn name(&self, x: VarId) -> &str {
        &self.names[x]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn original_domain(&self, x: VarId) -> &[Value] {
        &self.domains[x]
    }

    pub fn original_domains(&self) -> &[Vec<Value>] {
        &self.domains
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn constraint(&self, c: ConsId) -> &Constraint {
        &self.constraints[c]
    }

    /// Constraints whose scope contains `x`, in ascending id order.
    pub fn constraints_of(&self, x: VarId) -> &[ConsId] {
        &self.var_constraints[x]
    }

    /// Index of `v` within the original domain of `x`.
    #[inline]
    pub fn value_index(&self, x: VarId, v: Value) -> Option<usize> {
        let dom = &self.domains[x];
        if self.contiguous[x] {
            let lo = dom[0];
            if v < lo || v > dom[dom.len() - 1] {
                None
            } else {
                Some((v - lo) as usize)
            }
        } else {
            dom.binary_search(&v).ok()
        }
    }

    pub(crate) fn compiled(&self, c: ConsId) -> &Compiled {
        &self.compiled[c]
    }

    pub(crate) fn neighbors(&self, x: VarId) -> &[Neighbor] {
        &self.neighbors[x]
    }

    pub(crate) fn num_arcs(&self) -> usize {
        self.arc_offset[self.constraints.len()]
    }

    pub(crate) fn arc_id(&self, c: ConsId, pos: usize) -> usize {
        self.arc_offset[c] + pos
    }

    /// Scope positions of `c` ordered by variable id.
    pub(crate) fn arc_order(&self, c: ConsId) -> &[usize] {
        &self.arc_order[c]
    }

    fn compile(&self, c: &Constraint) -> Compiled {
        match (&c.relation, c.arity()) {
            (_, 2) => {
                let (x, y) = (c.scope[0], c.scope[1]);
                let (dx, dy) = (&self.domains[x], &self.domains[y]);
                if dx.len().saturating_mul(dy.len()) > MATRIX_LIMIT {
                    return Compiled::Generic;
                }
                let stride = [bits::words_for(dy.len()), bits::words_for(dx.len())];
                let mut rows = [vec![0u64; dx.len() * stride[0]], vec![0u64; dy.len() * stride[1]]];
                for (i, &a) in dx.iter().enumerate() {
                    for (j, &b) in dy.iter().enumerate() {
                        if c.check_tuple(&[a, b]) {
                            bits::set(&mut rows[0][i * stride[0]..(i + 1) * stride[0]], j);
                            bits::set(&mut rows[1][j * stride[1]..(j + 1) * stride[1]], i);
                        }
                    }
                }
                Compiled::Binary { rows, stride }
            }
            (Relation::Allowed(table), _) => {
                let mut supports: Vec<Vec<Vec<u32>>> =
                    c.scope.iter().map(|&x| vec![Vec::new(); self.domains[x].len()]).collect();
                for (t, row) in table.rows().iter().enumerate() {
                    for (p, &v) in row.iter().enumerate() {
                        // validated: every tuple value is in its domain
                        let i = self.value_index(c.scope[p], v).expect("validated tuple");
                        supports[p][i].push(t as u32);
                    }
                }
                Compiled::Table { supports }
            }
            _ => Compiled::Generic,
        }
    }

    fn build_neighbors(&self) -> Vec<Vec<Neighbor>> {
        let mut out: Vec<Vec<Neighbor>> = vec![Vec::new(); self.num_vars()];
        for (id, c) in self.constraints.iter().enumerate() {
            if c.arity() != 2 {
                continue;
            }
            for (x, y) in [(c.scope[0], c.scope[1]), (c.scope[1], c.scope[0])] {
                match out[x].iter_mut().find(|n| n.var == y) {
                    Some(n) => n.constraints.push(id),
                    None => out[x].push(Neighbor { var: y, constraints: vec![id] }),
                }
            }
        }
        for list in &mut out {
            list.sort_by_key(|n| n.var);
        }
        out
    }
}

fn validate_constraint(id: ConsId, c: &Constraint, domains: &[Vec<Value>]) -> Result<(), ModelError> {
    if c.scope.is_empty() {
        return Err(ModelError::EmptyScope(id));
    }
    let mut seen = HashSet::new();
    for &x in &c.scope {
        if x >= domains.len() {
            return Err(ModelError::UnknownVariable { constraint: id, var: x });
        }
        if !seen.insert(x) {
            return Err(ModelError::RepeatedScopeVar { constraint: id, var: x });
        }
    }
    match &c.relation {
        Relation::Allowed(t) | Relation::Forbidden(t) => {
            for row in t.rows() {
                if row.len() != c.arity() {
                    return Err(ModelError::TupleArity {
                        constraint: id,
                        tuple: row.clone(),
                        got: row.len(),
                        expected: c.arity(),
                    });
                }
                let inside = row
                    .iter()
                    .zip(&c.scope)
                    .all(|(v, &x)| domains[x].binary_search(v).is_ok());
                if !inside {
                    return Err(ModelError::TupleOutsideDomain { constraint: id, tuple: row.clone() });
                }
            }
        }
        Relation::Intensional(e) => {
            if e.max_var().is_some_and(|m| m >= c.arity()) {
                return Err(ModelError::ExprOutOfScope(id));
            }
        }
    }
    Ok(())
}

/// Incremental construction of a [`Problem`].
#[derive(Debug, Default, Clone)]
pub struct ProblemBuilder {
    names: Vec<String>,
    domains: Vec<Vec<Value>>,
    constraints: Vec<Constraint>,
}

impl ProblemBuilder {
    pub fn var(&mut self, name: impl Into<String>, domain: impl IntoIterator<Item = Value>) -> VarId {
        self.names.push(name.into());
        self.domains.push(domain.into_iter().collect());
        self.names.len() - 1
    }

    pub fn constraint(&mut self, c: Constraint) -> ConsId {
        self.constraints.push(c);
        self.constraints.len() - 1
    }

    pub fn build(self) -> Result<Problem, ModelError> {
        Problem::new(self.names, self.domains, self.constraints)
    }
}

/// Marker returned by [`SearchState::push_level`]; undoing to it restores the
/// domains that held when it was pushed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Level(pub usize);

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    pub nodes: u64,
    pub decisions: u64,
    pub backtracks: u64,
    pub wipeouts: u64,
}

/// Mutable per-run state: current domains, trail, conflict weights and
/// counters. A variable counts as assigned exactly when its current domain
/// is a singleton.
#[derive(Debug, Clone)]
pub struct SearchState<'p> {
    problem: &'p Problem,
    offsets: Vec<usize>,
    words: Vec<u64>,
    sizes: Vec<usize>,
    trail: Vec<(u32, u32)>,
    marks: Vec<usize>,
    weights: Vec<u64>,
    pub counters: Counters,
    pub(crate) queue: VecDeque<(ConsId, usize)>,
    pub(crate) queued: Vec<bool>,
    pub(crate) scratch: Vec<usize>,
}

impl<'p> SearchState<'p> {
    pub fn new(problem: &'p Problem) -> Self {
        let mut offsets = Vec::with_capacity(problem.num_vars() + 1);
        let mut words = Vec::new();
        for d in problem.original_domains() {
            offsets.push(words.len());
            words.extend(bits::full(d.len()));
        }
        offsets.push(words.len());
        SearchState {
            problem,
            offsets,
            words,
            sizes: problem.original_domains().iter().map(Vec::len).collect(),
            trail: Vec::new(),
            marks: Vec::new(),
            weights: vec![1; problem.num_constraints()],
            counters: Counters::default(),
            queue: VecDeque::new(),
            queued: vec![false; problem.num_arcs()],
            scratch: Vec::new(),
        }
    }

    pub fn problem(&self) -> &'p Problem {
        self.problem
    }

    /// Opens a new undo level. The first level of a fresh state is `Level(0)`.
    pub fn push_level(&mut self) -> Level {
        self.marks.push(self.trail.len());
        Level(self.marks.len() - 1)
    }

    /// Restores the domains that held when `level` was pushed and discards
    /// it together with every level above it.
    pub fn undo_to(&mut self, level: Level) {
        let Some(&mark) = self.marks.get(level.0) else {
            return;
        };
        while self.trail.len() > mark {
            let (x, i) = self.trail.pop().expect("trail above mark");
            let (x, i) = (x as usize, i as usize);
            let off = self.offsets[x];
            bits::set(&mut self.words[off..self.offsets[x + 1]], i);
            self.sizes[x] += 1;
        }
        self.marks.truncate(level.0);
    }

    /// Number of open levels.
    pub fn depth(&self) -> usize {
        self.marks.len()
    }

    pub fn size(&self, x: VarId) -> usize {
        self.sizes[x]
    }

    pub fn contains(&self, x: VarId, v: Value) -> bool {
        self.problem.value_index(x, v).is_some_and(|i| bits::test(self.dom_words(x), i))
    }

    /// Current domain of `x` in ascending order.
    pub fn values(&self, x: VarId) -> impl Iterator<Item = Value> + '_ {
        let dom = self.problem.original_domain(x);
        bits::ones(self.dom_words(x)).map(move |i| dom[i])
    }

    pub fn domain(&self, x: VarId) -> Vec<Value> {
        self.values(x).collect()
    }

    pub fn domains(&self) -> Vec<Vec<Value>> {
        (0..self.problem.num_vars()).map(|x| self.domain(x)).collect()
    }

    pub fn assigned(&self, x: VarId) -> Option<Value> {
        (self.sizes[x] == 1).then(|| self.values(x).next().expect("singleton"))
    }

    pub fn is_assigned(&self, x: VarId) -> bool {
        self.sizes[x] == 1
    }

    pub fn all_assigned(&self) -> bool {
        self.sizes.iter().all(|&s| s == 1)
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub(crate) fn bump_weight(&mut self, c: ConsId) {
        self.weights[c] += 1;
    }

    #[cfg(test)]
    pub(crate) fn set_weight(&mut self, c: ConsId, w: u64) {
        assert!(w >= 1);
        self.weights[c] = w;
    }

    #[inline]
    pub(crate) fn dom_words(&self, x: VarId) -> &[u64] {
        &self.words[self.offsets[x]..self.offsets[x + 1]]
    }

    #[inline]
    pub(crate) fn has_index(&self, x: VarId, i: usize) -> bool {
        bits::test(self.dom_words(x), i)
    }

    /// Removes the value at original index `i` of `x`, logging it.
    pub(crate) fn remove_index(&mut self, x: VarId, i: usize) -> bool {
        let off = self.offsets[x];
        let words = &mut self.words[off..self.offsets[x + 1]];
        if !bits::test(words, i) {
            return false;
        }
        bits::clear(words, i);
        self.sizes[x] -= 1;
        self.trail.push((x as u32, i as u32));
        true
    }

    /// Deletes `v` from the current domain of `x`; returns whether it was there.
    pub fn remove_value(&mut self, x: VarId, v: Value) -> bool {
        match self.problem.value_index(x, v) {
            Some(i) => self.remove_index(x, i),
            None => false,
        }
    }

    /// Intersects the current domain of `x` with `keep`; returns whether the
    /// domain became empty.
    pub fn reduce_domain(&mut self, x: VarId, keep: &[Value]) -> bool {
        let len = self.problem.original_domain(x).len();
        let mut mask = vec![0u64; bits::words_for(len)];
        for &v in keep {
            if let Some(i) = self.problem.value_index(x, v) {
                bits::set(&mut mask, i);
            }
        }
        let doomed: Vec<usize> = bits::ones(self.dom_words(x)).filter(|&i| !bits::test(&mask, i)).collect();
        for i in doomed {
            self.remove_index(x, i);
        }
        self.sizes[x] == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::BinaryOp;

    fn two_vars(d: &[Value]) -> Problem {
        let mut b = Problem::builder();
        b.var("x", d.iter().copied());
        b.var("y", d.iter().copied());
        b.build().unwrap()
    }

    #[test]
    fn push_level_on_fresh_state() {
        let p = two_vars(&[1, 2, 3]);
        let mut s = SearchState::new(&p);
        assert_eq!(s.push_level(), Level(0));
        assert_eq!(s.domains(), p.original_domains());
    }

    #[test]
    fn remove_and_undo() {
        let p = two_vars(&[1, 2]);
        let mut s = SearchState::new(&p);
        let l = s.push_level();
        assert!(s.remove_value(0, 2));
        assert_eq!(s.domain(0), vec![1]);
        assert!(!s.remove_value(0, 2));
        assert!(!s.remove_value(0, 7));
        s.undo_to(l);
        assert_eq!(s.domain(0), vec![1, 2]);
    }

    #[test]
    fn scripted_trail_restores_three_deletions() {
        let p = two_vars(&[0, 1, 2, 3]);
        let mut s = SearchState::new(&p);
        let before = s.domains();
        let l = s.push_level();
        s.remove_value(0, 1);
        s.remove_value(1, 3);
        s.remove_value(0, 2);
        assert_eq!(s.domains(), vec![vec![0, 3], vec![0, 1, 2]]);
        s.undo_to(l);
        assert_eq!(s.domains(), before);
        assert_eq!(s.depth(), 0);
    }

    #[test]
    fn nested_levels() {
        let p = two_vars(&[0, 1, 2, 3]);
        let mut s = SearchState::new(&p);
        let l0 = s.push_level();
        s.remove_value(0, 0);
        let l1 = s.push_level();
        s.remove_value(0, 1);
        s.undo_to(l1);
        assert_eq!(s.domain(0), vec![1, 2, 3]);
        s.undo_to(l0);
        assert_eq!(s.domain(0), vec![0, 1, 2, 3]);
    }

    #[test]
    fn reduce_domain_cases() {
        let p = two_vars(&[1, 2, 3, 4]);
        let mut s = SearchState::new(&p);
        assert!(!s.reduce_domain(0, &[2, 3]));
        assert_eq!(s.domain(0), vec![2, 3]);
        assert!(!s.reduce_domain(0, &[2, 3, 9]));
        assert_eq!(s.domain(0), vec![2, 3]);
        assert!(s.reduce_domain(1, &[5]));
        assert_eq!(s.size(1), 0);
    }

    #[test]
    fn check_tuple_kinds() {
        let allowed = Constraint::allowed(vec![0, 1], [vec![0, 1]]);
        assert!(allowed.check_tuple(&[0, 1]));
        assert!(!allowed.check_tuple(&[1, 0]));
        let ne = Constraint::intensional(vec![0, 1], Expr::binary(BinaryOp::Ne, Expr::var(0), Expr::var(1)));
        assert!(!ne.check_tuple(&[3, 3]));
        let forbidden = Constraint::forbidden(vec![0, 1], [vec![1, 1], vec![2, 2]]);
        assert!(forbidden.check_tuple(&[1, 2]));
        assert!(!forbidden.check_tuple(&[2, 2]));
        let div = Constraint::intensional(vec![0, 1], Expr::binary(BinaryOp::Div, Expr::var(0), Expr::var(1)));
        assert!(!div.check_tuple(&[4, 0]));
        assert!(div.check_tuple(&[4, 2]));
    }

    #[test]
    fn forbidden_is_complement_of_allowed() {
        // enumerate every forbidden subset of a 2x2 product (domains of size 2)
        // and every tuple over domains of size 4
        let dom: Vec<Value> = (0..4).collect();
        let product: Vec<Vec<Value>> =
            dom.iter().flat_map(|&a| dom.iter().map(move |&b| vec![a, b])).collect();
        for mask in [0u32, 1, 0b1010_0101_1100_0011, 0xffff, 0x8001, 0x0ff0] {
            let f: Vec<_> = product.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, t)| t.clone()).collect();
            let a: Vec<_> = product.iter().filter(|t| !f.contains(t)).cloned().collect();
            let cf = Constraint::forbidden(vec![0, 1], f);
            let ca = Constraint::allowed(vec![0, 1], a);
            for t in &product {
                assert_eq!(cf.check_tuple(t), ca.check_tuple(t), "{mask:#x} {t:?}");
            }
        }
    }

    #[test]
    fn validation_errors() {
        let bad_scope = Problem::new(
            vec!["x".into()],
            vec![vec![0, 1]],
            vec![Constraint::allowed(vec![0, 0], [vec![0, 0]])],
        );
        assert!(matches!(bad_scope, Err(ModelError::RepeatedScopeVar { .. })));
        let outside = Problem::new(vec!["x".into()], vec![vec![0, 1]], vec![Constraint::allowed(vec![0], [vec![5]])]);
        assert!(matches!(outside, Err(ModelError::TupleOutsideDomain { .. })));
        let dup = Problem::new(vec!["x".into()], vec![vec![1, 1]], vec![]);
        assert!(matches!(dup, Err(ModelError::DuplicateValue { .. })));
        let empty = Problem::new(vec!["x".into()], vec![vec![]], vec![]);
        assert!(matches!(empty, Err(ModelError::EmptyDomain(_))));
        let arity = Problem::new(vec!["x".into()], vec![vec![0]], vec![Constraint::allowed(vec![0], [vec![0, 0]])]);
        assert!(matches!(arity, Err(ModelError::TupleArity { .. })));
        let scope = Problem::new(
            vec!["x".into()],
            vec![vec![0]],
            vec![Constraint::intensional(vec![0], Expr::var(1))],
        );
        assert!(matches!(scope, Err(ModelError::ExprOutOfScope(0))));
    }

    #[test]
    fn value_index_sparse_and_contiguous() {
        let mut b = Problem::builder();
        b.var("a", [5, 1, 3]);
        b.var("b", -2..=2);
        let p = b.build().unwrap();
        assert_eq!(p.original_domain(0), &[1, 3, 5]);
        assert_eq!(p.value_index(0, 3), Some(1));
        assert_eq!(p.value_index(0, 2), None);
        assert_eq!(p.value_index(1, -2), Some(0));
        assert_eq!(p.value_index(1, 3), None);
    }

    #[test]
    fn arc_lookup() {
        let mut b = Problem::builder();
        for i in 0..3 {
            b.var(format!("v{i}"), 0..2);
        }
        b.constraint(Constraint::allowed(vec![2, 0], [vec![0, 0]]));
        b.constraint(Constraint::allowed(vec![1], [vec![0]]));
        b.constraint(Constraint::allowed(vec![0, 1, 2], [vec![0, 0, 0]]));
        let p = b.build().unwrap();
        assert_eq!(p.num_arcs(), 6);
        let ids: Vec<usize> = (0..3).flat_map(|c| (0..p.constraint(c).arity()).map(move |pos| (c, pos)))
            .map(|(c, pos)| p.arc_id(c, pos)).collect();
        assert_eq!(ids, (0..6).collect::<Vec<_>>());
        assert_eq!(p.arc_order(0), &[1, 0]);
    }
}
