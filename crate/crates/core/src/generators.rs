//! Seeded generators for the synthetic benchmark families.
//!
//! Every generator is a pure function of its parameters and seed; the
//! randomness comes from [`XorShift64Star`] so instances are reproducible.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::expr::{BinaryOp, Expr};
use crate::model::{Constraint, Problem, Value};
use crate::rng::XorShift64Star;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("missing parameter `{0}`")]
    Missing(&'static str),
    #[error("malformed parameter `{0}`")]
    Malformed(String),
}

/// An instance together with a known solution, when the family plants one.
#[derive(Debug, Clone)]
pub struct Generated {
    pub problem: Problem,
    pub planted: Option<Vec<Value>>,
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, GenError> {
    Err(GenError::Invalid(msg.into()))
}

fn ne() -> Expr {
    Expr::binary(BinaryOp::Ne, Expr::var(0), Expr::var(1))
}

fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// `n` pigeons into `n - 1` holes: pairwise different values over `0..n-1`.
pub fn gen_pigeons(n: usize) -> Result<Problem, GenError> {
    if n < 2 {
        return invalid("pigeons needs n >= 2");
    }
    let mut b = Problem::builder();
    for i in 0..n {
        b.var(format!("p{i}"), 0..(n as Value - 1));
    }
    for (i, j) in all_pairs(n) {
        b.constraint(Constraint::intensional(vec![i, j], ne()));
    }
    Ok(b.build().expect("well-formed"))
}

/// Langford pairing L(2,n): positions `a_i`, `b_i` in `0..2n` of the two
/// copies of `i`, with `b_i = a_i + i + 1` and all positions distinct.
pub fn gen_langford(n: usize) -> Result<Problem, GenError> {
    if n < 2 {
        return invalid("langford needs n >= 2");
    }
    let mut b = Problem::builder();
    let top = 2 * n as Value - 1;
    for i in 1..=n {
        b.var(format!("a{i}"), 0..=top);
        b.var(format!("b{i}"), 0..=top);
    }
    for i in 1..=n {
        let (first, second) = (2 * (i - 1), 2 * (i - 1) + 1);
        let gap = Expr::binary(BinaryOp::Add, Expr::var(0), Expr::constant(i as Value + 1));
        b.constraint(Constraint::intensional(
            vec![first, second],
            Expr::binary(BinaryOp::Eq, Expr::var(1), gap),
        ));
    }
    for (i, j) in all_pairs(2 * n) {
        b.constraint(Constraint::intensional(vec![i, j], ne()));
    }
    Ok(b.build().expect("well-formed"))
}

fn check_model_b(n: usize, d: usize, p1: usize, p2: usize) -> Result<(), GenError> {
    if n < 2 || d < 1 {
        return invalid("model B needs n >= 2 and d >= 1");
    }
    if p1 == 0 || p1 > n * (n - 1) / 2 {
        return invalid(format!("p1 must lie in 1..={}", n * (n - 1) / 2));
    }
    if p2 == 0 || p2 > d * d {
        return invalid(format!("p2 must lie in 1..={}", d * d));
    }
    Ok(())
}

fn model_b(
    n: usize,
    d: usize,
    p1: usize,
    p2: usize,
    seed: u64,
    planted: Option<&[Value]>,
) -> Problem {
    let mut rng = XorShift64Star::new(seed);
    let mut b = Problem::builder();
    for i in 0..n {
        b.var(format!("x{i}"), 0..d as Value);
    }
    let mut pairs = rng.sample(&all_pairs(n), p1);
    pairs.sort_unstable();
    let tuples: Vec<Vec<Value>> =
        (0..d as Value).flat_map(|a| (0..d as Value).map(move |c| vec![a, c])).collect();
    for (i, j) in pairs {
        let pool: Vec<Vec<Value>> = match planted {
            Some(s) => tuples.iter().filter(|t| **t != [s[i], s[j]]).cloned().collect(),
            None => tuples.clone(),
        };
        let chosen = rng.sample(&pool, p2);
        b.constraint(Constraint::forbidden(vec![i, j], chosen));
    }
    b.build().expect("well-formed")
}

/// Model B: exactly `p1` constrained pairs, each forbidding exactly `p2`
/// of the `d^2` value pairs.
pub fn gen_randomb(n: usize, d: usize, p1: usize, p2: usize, seed: u64) -> Result<Problem, GenError> {
    check_model_b(n, d, p1, p2)?;
    Ok(model_b(n, d, p1, p2, seed, None))
}

/// Model B around a planted solution drawn first from the same stream; no
/// forbidden tuple agrees with it.
pub fn gen_forced(n: usize, d: usize, p1: usize, p2: usize, seed: u64) -> Result<Generated, GenError> {
    check_model_b(n, d, p1, p2)?;
    if p2 > d * d - 1 {
        return invalid("forced instances need p2 <= d^2 - 1");
    }
    let mut rng = XorShift64Star::new(seed ^ 0xF0F0_F0F0_F0F0_F0F0);
    let solution: Vec<Value> = (0..n).map(|_| rng.below(d as u64) as Value).collect();
    let problem = model_b(n, d, p1, p2, seed, Some(&solution));
    Ok(Generated { problem, planted: Some(solution) })
}

/// Quasigroup with holes. A cyclic Latin square with shuffled rows, columns
/// and symbols is blanked in `holes` cells. Every cell is a variable: blank
/// cells range over `0..order`, filled cells have their value as a singleton
/// domain plus a unary allowed constraint. Rows and columns are pairwise
/// different.
pub fn gen_qwh(order: usize, holes: usize, seed: u64) -> Result<Generated, GenError> {
    if order < 2 {
        return invalid("qwh needs order >= 2");
    }
    if holes > order * order {
        return invalid("more holes than cells");
    }
    let mut rng = XorShift64Star::new(seed);
    let mut rows: Vec<usize> = (0..order).collect();
    let mut cols: Vec<usize> = (0..order).collect();
    let mut syms: Vec<usize> = (0..order).collect();
    rng.shuffle(&mut rows);
    rng.shuffle(&mut cols);
    rng.shuffle(&mut syms);
    let square: Vec<Value> = (0..order * order)
        .map(|cell| syms[(rows[cell / order] + cols[cell % order]) % order] as Value)
        .collect();
    let mut cells: Vec<usize> = (0..order * order).collect();
    rng.shuffle(&mut cells);
    let mut blank = vec![false; order * order];
    for &c in &cells[..holes] {
        blank[c] = true;
    }

    let mut b = Problem::builder();
    for cell in 0..order * order {
        let name = format!("c{}_{}", cell / order, cell % order);
        if blank[cell] {
            b.var(name, 0..order as Value);
        } else {
            b.var(name, [square[cell]]);
        }
    }
    for cell in 0..order * order {
        if !blank[cell] {
            b.constraint(Constraint::allowed(vec![cell], [vec![square[cell]]]));
        }
    }
    for r in 0..order {
        for (i, j) in all_pairs(order) {
            b.constraint(Constraint::intensional(vec![r * order + i, r * order + j], ne()));
        }
    }
    for c in 0..order {
        for (i, j) in all_pairs(order) {
            b.constraint(Constraint::intensional(vec![i * order + c, j * order + c], ne()));
        }
    }
    Ok(Generated { problem: b.build().expect("well-formed"), planted: Some(square) })
}

/// Random simple graph with exactly `edges` edges, `k` colors.
pub fn gen_coloring(n: usize, edges: usize, k: usize, seed: u64) -> Result<Problem, GenError> {
    if n < 1 || k < 1 {
        return invalid("coloring needs n >= 1 and k >= 1");
    }
    if edges > n * (n - 1) / 2 {
        return invalid("more edges than vertex pairs");
    }
    let mut rng = XorShift64Star::new(seed);
    let mut chosen = rng.sample(&all_pairs(n), edges);
    chosen.sort_unstable();
    let mut b = Problem::builder();
    for i in 0..n {
        b.var(format!("v{i}"), 0..k as Value);
    }
    for (i, j) in chosen {
        b.constraint(Constraint::intensional(vec![i, j], ne()));
    }
    Ok(b.build().expect("well-formed"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Pigeons { n: usize },
    Langford { n: usize },
    RandomB { n: usize, d: usize, p1: usize, p2: usize },
    Forced { n: usize, d: usize, p1: usize, p2: usize },
    Qwh { order: usize, holes: usize },
    Coloring { n: usize, edges: usize, k: usize },
}

/// A family with its parameters and seed. Deterministic families ignore
/// the seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenSpec {
    pub family: Family,
    pub seed: u64,
}

impl GenSpec {
    pub fn generate(&self) -> Result<Generated, GenError> {
        let plain = |p: Result<Problem, GenError>| p.map(|problem| Generated { problem, planted: None });
        match self.family {
            Family::Pigeons { n } => plain(gen_pigeons(n)),
            Family::Langford { n } => plain(gen_langford(n)),
            Family::RandomB { n, d, p1, p2 } => plain(gen_randomb(n, d, p1, p2, self.seed)),
            Family::Forced { n, d, p1, p2 } => gen_forced(n, d, p1, p2, self.seed),
            Family::Qwh { order, holes } => gen_qwh(order, holes, self.seed),
            Family::Coloring { n, edges, k } => plain(gen_coloring(n, edges, k, self.seed)),
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self.family {
            Family::Pigeons { .. } => "pigeons",
            Family::Langford { .. } => "langford",
            Family::RandomB { .. } => "randomb",
            Family::Forced { .. } => "forced",
            Family::Qwh { .. } => "qwh",
            Family::Coloring { .. } => "coloring",
        }
    }

    /// Instance name; the text before the first `-` is the family.
    pub fn name(&self) -> String {
        let s = self.seed;
        match self.family {
            Family::Pigeons { n } => format!("pigeons-{n}"),
            Family::Langford { n } => format!("langford-2-{n}"),
            Family::RandomB { n, d, p1, p2 } => format!("randomb-{n}-{d}-{p1}-{p2}-s{s}"),
            Family::Forced { n, d, p1, p2 } => format!("forced-{n}-{d}-{p1}-{p2}-s{s}"),
            Family::Qwh { order, holes } => format!("qwh-{order}-{holes}-s{s}"),
            Family::Coloring { n, edges, k } => format!("coloring-{n}-{edges}-{k}-s{s}"),
        }
    }

    /// Builds a spec from a family name and `key=value` lookups.
    pub fn from_params(
        family: &str,
        get: impl Fn(&'static str) -> Option<u64>,
    ) -> Result<Self, GenError> {
        let need = |k: &'static str| get(k).map(|v| v as usize).ok_or(GenError::Missing(k));
        let family = match family {
            "pigeons" => Family::Pigeons { n: need("n")? },
            "langford" => Family::Langford { n: need("n")? },
            "randomb" => Family::RandomB { n: need("n")?, d: need("d")?, p1: need("p1")?, p2: need("p2")? },
            "forced" => Family::Forced { n: need("n")?, d: need("d")?, p1: need("p1")?, p2: need("p2")? },
            "qwh" => Family::Qwh { order: need("order")?, holes: need("holes")? },
            "coloring" => Family::Coloring { n: need("n")?, edges: need("edges")?, k: need("k")? },
            other => return Err(GenError::UnknownFamily(other.to_string())),
        };
        Ok(GenSpec { family, seed: get("seed").unwrap_or(0) })
    }
}

/// `FAMILY key=value ...`, e.g. `randomb n=6 d=4 p1=8 p2=5 seed=3`.
impl FromStr for GenSpec {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut words = s.split_whitespace();
        let family = words.next().ok_or(GenError::Missing("family"))?;
        let mut params = Vec::new();
        for w in words {
            let (k, v) = w.split_once('=').ok_or_else(|| GenError::Malformed(w.to_string()))?;
            let v: u64 = v.parse().map_err(|_| GenError::Malformed(w.to_string()))?;
            params.push((k.to_string(), v));
        }
        let spec = GenSpec::from_params(family, |k| params.iter().find(|(p, _)| p == k).map(|(_, v)| *v))?;
        Ok(spec)
    }
}

impl fmt::Display for GenSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.family_name())?;
        match self.family {
            Family::Pigeons { n } | Family::Langford { n } => write!(f, " n={n}")?,
            Family::RandomB { n, d, p1, p2 } | Family::Forced { n, d, p1, p2 } => {
                write!(f, " n={n} d={d} p1={p1} p2={p2}")?
            }
            Family::Qwh { order, holes } => write!(f, " order={order} holes={holes}")?,
            Family::Coloring { n, edges, k } => write!(f, " n={n} edges={edges} k={k}")?,
        }
        write!(f, " seed={}", self.seed)
    }
}
