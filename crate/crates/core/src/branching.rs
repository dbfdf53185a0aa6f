//! Branching schemes: turning a selected variable and its promise-scored
//! domain into an ordered list of value sets.

use std::fmt;
use std::str::FromStr;

use crate::clustering::{self, xmeans};
use crate::heuristics::{score_domain, ScoredValue};
use crate::model::{SearchState, Value, VarId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeKind {
    DWay,
    TwoWay,
    DomainSplit,
    TiesDWay,
    TiesTwoWay,
    ClustDWay,
    ClustTwoWay,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 7] = [
        SchemeKind::DWay,
        SchemeKind::TwoWay,
        SchemeKind::DomainSplit,
        SchemeKind::TiesDWay,
        SchemeKind::TiesTwoWay,
        SchemeKind::ClustDWay,
        SchemeKind::ClustTwoWay,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::DWay => "dway",
            SchemeKind::TwoWay => "2way",
            SchemeKind::DomainSplit => "split",
            SchemeKind::TiesDWay => "ties-dway",
            SchemeKind::TiesTwoWay => "ties-2way",
            SchemeKind::ClustDWay => "clust-dway",
            SchemeKind::ClustTwoWay => "clust-2way",
        }
    }

    /// Enumerated (d-way) or binary (2-way) branching style.
    pub fn style(self) -> PlanStyle {
        match self {
            SchemeKind::DWay | SchemeKind::TiesDWay | SchemeKind::ClustDWay => PlanStyle::Enumerated,
            _ => PlanStyle::Binary,
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown scheme `{0}` (expected one of dway, 2way, split, ties-dway, ties-2way, clust-dway, clust-2way)")]
pub struct UnknownScheme(pub String);

impl FromStr for SchemeKind {
    type Err = UnknownScheme;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SchemeKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| UnknownScheme(s.to_string()))
    }
}

pub const DEFAULT_THRESHOLD: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scheme {
    pub kind: SchemeKind,
    /// Set and split constructions apply only while the current domain is
    /// strictly larger than this fraction of the original domain.
    pub threshold: f64,
    /// Cluster cap for the clustering kinds.
    pub kmax: usize,
}

impl Scheme {
    pub fn new(kind: SchemeKind) -> Self {
        Scheme { kind, threshold: DEFAULT_THRESHOLD, kmax: clustering::DEFAULT_KMAX }
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        assert!((0.0..=1.0).contains(&threshold), "threshold must lie in [0, 1]");
        self.threshold = threshold;
        self
    }

    pub fn with_kmax(mut self, kmax: usize) -> Self {
        assert!(kmax >= 1, "kmax must be positive");
        self.kmax = kmax;
        self
    }
}

impl From<SchemeKind> for Scheme {
    fn from(kind: SchemeKind) -> Self {
        Scheme::new(kind)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanStyle {
    /// One branch per set, each reducing the choice-point domain to that set.
    Enumerated,
    /// Left branch reduces to `sets[0]`, right branch removes it.
    Binary,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchPlan {
    pub style: PlanStyle,
    pub var: VarId,
    /// Value sets in branch order, each ascending. Binary plans hold one set.
    pub sets: Vec<Vec<Value>>,
}

/// Scores the current domain of `x` and plans the branches.
pub fn plan(scheme: &Scheme, state: &SearchState, x: VarId) -> BranchPlan {
    plan_scored(scheme, state, x, &score_domain(state, x))
}

/// Plans from an already scored domain, as returned by `score_domain`
/// (descending promise, then ascending value).
pub fn plan_scored(scheme: &Scheme, state: &SearchState, x: VarId, scored: &[ScoredValue]) -> BranchPlan {
    debug_assert_eq!(scored.len(), state.size(x));
    let passes = threshold_passes(scheme.threshold, state.size(x), state.problem().original_domain(x).len());
    match scheme.kind {
        SchemeKind::DWay => dway(x, scored),
        SchemeKind::TwoWay => two_way(x, scored),
        SchemeKind::DomainSplit => {
            if passes {
                let half = scored.len().div_ceil(2);
                binary(x, scored[..half].iter().map(|s| s.value).collect())
            } else {
                two_way(x, scored)
            }
        }
        SchemeKind::TiesDWay | SchemeKind::TiesTwoWay => {
            let groups = if passes { tie_groups(scored) } else { Vec::new() };
            // one group per value gives the base scheme; a single group
            // would branch on the whole domain and make no progress
            if groups.len() <= 1 || groups.len() == scored.len() {
                fallback(scheme.kind, x, scored)
            } else {
                from_sets(scheme.kind, x, groups)
            }
        }
        SchemeKind::ClustDWay | SchemeKind::ClustTwoWay => {
            let groups = if passes { clusters(scored, scheme.kmax) } else { Vec::new() };
            if groups.len() <= 1 {
                fallback(scheme.kind, x, scored)
            } else {
                from_sets(scheme.kind, x, groups)
            }
        }
    }
}

/// `size > fraction * original`, strictly.
pub fn threshold_passes(fraction: f64, size: usize, original: usize) -> bool {
    size as f64 > fraction * original as f64
}

/// Whether any two values of a scored domain share a promise score.
pub fn has_ties(scored: &[ScoredValue]) -> bool {
    let mut scores: Vec<_> = scored.iter().map(|s| s.score).collect();
    scores.sort_unstable();
    scores.windows(2).any(|w| w[0] == w[1])
}

fn dway(x: VarId, scored: &[ScoredValue]) -> BranchPlan {
    BranchPlan { style: PlanStyle::Enumerated, var: x, sets: scored.iter().map(|s| vec![s.value]).collect() }
}

fn two_way(x: VarId, scored: &[ScoredValue]) -> BranchPlan {
    binary(x, vec![scored[0].value])
}

fn binary(x: VarId, mut set: Vec<Value>) -> BranchPlan {
    set.sort_unstable();
    BranchPlan { style: PlanStyle::Binary, var: x, sets: vec![set] }
}

fn fallback(kind: SchemeKind, x: VarId, scored: &[ScoredValue]) -> BranchPlan {
    match kind.style() {
        PlanStyle::Enumerated => dway(x, scored),
        PlanStyle::Binary => two_way(x, scored),
    }
}

fn from_sets(kind: SchemeKind, x: VarId, mut sets: Vec<Vec<Value>>) -> BranchPlan {
    for s in &mut sets {
        s.sort_unstable();
    }
    match kind.style() {
        PlanStyle::Enumerated => BranchPlan { style: PlanStyle::Enumerated, var: x, sets },
        PlanStyle::Binary => binary(x, sets.swap_remove(0)),
    }
}

/// Maximal runs of equal score, in descending score order.
fn tie_groups(scored: &[ScoredValue]) -> Vec<Vec<Value>> {
    let mut groups: Vec<Vec<Value>> = Vec::new();
    for (i, s) in scored.iter().enumerate() {
        if i > 0 && scored[i - 1].score == s.score {
            groups.last_mut().expect("previous group").push(s.value);
        } else {
            groups.push(vec![s.value]);
        }
    }
    groups
}

/// x-means over the scores, clustered in ascending value order so that
/// equal-mean clusters resolve toward the smaller minimum value.
fn clusters(scored: &[ScoredValue], kmax: usize) -> Vec<Vec<Value>> {
    let mut by_value: Vec<ScoredValue> = scored.to_vec();
    by_value.sort_by_key(|s| s.value);
    let scores: Vec<f64> = by_value.iter().map(|s| s.score as f64).collect();
    xmeans(&scores, kmax)
        .clusters
        .into_iter()
        .map(|c| c.into_iter().map(|i| by_value[i].value).collect())
        .collect()
}
