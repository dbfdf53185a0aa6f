//! Scheme comparison statistics: sign-folded speedups, per-class speedup
//! tables, categorization buckets and paired t-tests with Student-t
//! confidence intervals.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::bench::RunRecord;

/// Times below this many milliseconds are raised to it before ratios are
/// taken, so sub-resolution runs do not divide by zero.
pub const TIME_FLOOR_MS: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("times must be positive (got {0} and {1})")]
    NonPositiveTime(f64, f64),
    #[error("a t-test needs at least two differences (got {0})")]
    TooFewPairs(usize),
    #[error("no `{scheme}` row for instance `{instance}`")]
    MissingBase { instance: String, scheme: String },
    #[error("no rows for baseline scheme `{0}`")]
    NoBaseline(String),
}

/// `r = t_other / t_base` folded so that the magnitude is at least 1:
/// `r` when `r >= 1`, otherwise `-1 / r`. Positive means the base is faster.
pub fn folded_ratio(t_other: f64, t_base: f64) -> Result<f64, StatsError> {
    if !(t_other > 0.0 && t_base > 0.0) {
        return Err(StatsError::NonPositiveTime(t_other, t_base));
    }
    let r = t_other / t_base;
    Ok(if r >= 1.0 { r } else { -1.0 / r })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TTestReport {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator).
    pub sd: f64,
    /// `mean / (sd / sqrt(n))`; 0 when every difference is 0.
    pub t: f64,
    /// Student-t 0.975 quantile with n - 1 degrees of freedom.
    pub t_crit: f64,
    pub ci95: (f64, f64),
}

pub fn paired_ttest(diffs: &[f64]) -> Result<TTestReport, StatsError> {
    let n = diffs.len();
    if n < 2 {
        return Err(StatsError::TooFewPairs(n));
    }
    let nf = n as f64;
    let mean = diffs.iter().sum::<f64>() / nf;
    let sd = (diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (nf - 1.0)).sqrt();
    let se = sd / nf.sqrt();
    let t = if se > 0.0 {
        mean / se
    } else if mean == 0.0 {
        0.0
    } else {
        mean.signum() * f64::INFINITY
    };
    let t_crit = student_t_quantile(0.975, nf - 1.0);
    let half = t_crit * se;
    Ok(TTestReport { n, mean, sd, t, t_crit, ci95: (mean - half, mean + half) })
}

/// Lanczos approximation (g = 7, nine terms).
fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, &c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let (qab, qap, qam) = (a + b, a + 1.0, a - 1.0);
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=300 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-15 {
            break;
        }
    }
    h
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn regularized_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let front = (ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln()).exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

pub fn student_t_cdf(t: f64, df: f64) -> f64 {
    let tail = 0.5 * regularized_beta(df / 2.0, 0.5, df / (df + t * t));
    if t >= 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// Inverse Student-t CDF by bisection on [`student_t_cdf`].
pub fn student_t_quantile(p: f64, df: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0 && df > 0.0, "quantile needs 0 < p < 1 and df > 0");
    if p == 0.5 {
        return 0.0;
    }
    if p < 0.5 {
        return -student_t_quantile(1.0 - p, df);
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while student_t_cdf(hi, df) < p {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if student_t_cdf(mid, df) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn floored(ms: f64) -> f64 {
    ms.max(TIME_FLOOR_MS)
}

/// Instance class: the name up to the first `-`.
pub fn instance_class(name: &str) -> &str {
    name.split('-').next().unwrap_or(name)
}

/// Times of both sides for every instance where neither run hit a limit.
#[derive(Debug, Clone, PartialEq)]
pub struct Pairing {
    pub scheme: String,
    /// `(instance, t_other, t_base)`, with floored times.
    pub pairs: Vec<(String, f64, f64)>,
    /// Instances with a limit outcome on either side.
    pub excluded: Vec<String>,
}

/// Pairs every scheme other than `base` with the base run on the same
/// instance (first seed seen). Schemes are returned in name order.
pub fn pair_with_base(records: &[RunRecord], base: &str) -> Result<Vec<Pairing>, StatsError> {
    let mut by_key: BTreeMap<(&str, &str), &RunRecord> = BTreeMap::new();
    for r in records {
        by_key.entry((r.instance.as_str(), r.scheme.as_str())).or_insert(r);
    }
    let instances: BTreeSet<&str> = records.iter().map(|r| r.instance.as_str()).collect();
    let schemes: BTreeSet<&str> = records.iter().map(|r| r.scheme.as_str()).filter(|&s| s != base).collect();
    if !records.iter().any(|r| r.scheme == base) {
        return Err(StatsError::NoBaseline(base.to_string()));
    }
    let mut out = Vec::new();
    for &scheme in &schemes {
        let mut pairing = Pairing { scheme: scheme.to_string(), pairs: Vec::new(), excluded: Vec::new() };
        for &inst in &instances {
            let Some(other) = by_key.get(&(inst, scheme)) else { continue };
            let Some(b) = by_key.get(&(inst, base)) else {
                return Err(StatsError::MissingBase { instance: inst.to_string(), scheme: base.to_string() });
            };
            if other.status == "limit" || b.status == "limit" {
                pairing.excluded.push(inst.to_string());
            } else {
                pairing.pairs.push((inst.to_string(), floored(other.elapsed_ms), floored(b.elapsed_ms)));
            }
        }
        out.push(pairing);
    }
    Ok(out)
}

/// Share of instances per speedup bucket for one scheme against the base.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryRow {
    pub scheme: String,
    pub instances: usize,
    /// Percentages with `t_base / t_other` folded above 1, 2 and 3.
    pub faster: [f64; 3],
    /// Percentages with the fold below -1, -2 and -3.
    pub slower: [f64; 3],
    pub excluded: usize,
}

pub fn categorize(records: &[RunRecord], base: &str) -> Result<Vec<CategoryRow>, StatsError> {
    pair_with_base(records, base)?.into_iter().map(|p| categorize_pairing(&p)).collect()
}

fn categorize_pairing(p: &Pairing) -> Result<CategoryRow, StatsError> {
    let mut faster = [0usize; 3];
    let mut slower = [0usize; 3];
    for (_, t_other, t_base) in &p.pairs {
        let f = folded_ratio(*t_base, *t_other)?;
        for (i, bound) in [1.0, 2.0, 3.0].into_iter().enumerate() {
            faster[i] += (f > bound) as usize;
            slower[i] += (f < -bound) as usize;
        }
    }
    let n = p.pairs.len();
    let pct = |c: usize| if n == 0 { 0.0 } else { 100.0 * c as f64 / n as f64 };
    Ok(CategoryRow {
        scheme: p.scheme.clone(),
        instances: n,
        faster: faster.map(pct),
        slower: slower.map(pct),
        excluded: p.excluded.len(),
    })
}

/// Mean folded ratio `fold(t_other / t_base)` per (class, scheme); positive
/// means the base was faster on average.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeedupTable {
    pub base: String,
    pub schemes: Vec<String>,
    /// `(class, instances, one cell per scheme)`; a cell is `None` when the
    /// class has no comparable pair for that scheme.
    pub rows: Vec<(String, usize, Vec<Option<f64>>)>,
}

pub fn speedup_table(records: &[RunRecord], base: &str) -> Result<SpeedupTable, StatsError> {
    let pairings = pair_with_base(records, base)?;
    let classes: BTreeSet<&str> = records.iter().map(|r| instance_class(&r.instance)).collect();
    let mut rows = Vec::new();
    for class in classes {
        let count =
            records.iter().filter(|r| r.scheme == base && instance_class(&r.instance) == class).count();
        let mut cells = Vec::new();
        for p in &pairings {
            let ratios = p
                .pairs
                .iter()
                .filter(|(inst, _, _)| instance_class(inst) == class)
                .map(|(_, o, b)| folded_ratio(*o, *b))
                .collect::<Result<Vec<f64>, _>>()?;
            cells.push((!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64));
        }
        rows.push((class.to_string(), count, cells));
    }
    Ok(SpeedupTable { base: base.to_string(), schemes: pairings.into_iter().map(|p| p.scheme).collect(), rows })
}

/// Paired t-test per scheme on `t_base - t_other` (ms); `None` for schemes
/// with fewer than two comparable instances.
pub fn ttests(records: &[RunRecord], base: &str) -> Result<Vec<(String, Option<TTestReport>)>, StatsError> {
    Ok(pair_with_base(records, base)?
        .into_iter()
        .map(|p| {
            let diffs: Vec<f64> = p.pairs.iter().map(|(_, o, b)| b - o).collect();
            (p.scheme, paired_ttest(&diffs).ok())
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReportSections {
    pub speedups: bool,
    pub categorize: bool,
    pub ttest: bool,
}

impl ReportSections {
    pub fn all() -> Self {
        ReportSections { speedups: true, categorize: true, ttest: true }
    }
}

/// Plain-text report with the requested sections.
pub fn render_report(records: &[RunRecord], base: &str, sections: ReportSections) -> Result<String, StatsError> {
    let mut out = String::new();
    let instances: BTreeSet<&str> = records.iter().map(|r| r.instance.as_str()).collect();
    let _ = writeln!(out, "results: {} runs over {} instances, baseline {base}", records.len(), instances.len());
    if sections.speedups {
        let table = speedup_table(records, base)?;
        let _ = writeln!(out, "\n== mean folded time ratio vs {base} (positive: {base} faster) ==");
        let _ = write!(out, "{:<12} {:>5}", "class", "n");
        for s in &table.schemes {
            let _ = write!(out, " {s:>11}");
        }
        out.push('\n');
        for (class, n, cells) in &table.rows {
            let _ = write!(out, "{class:<12} {n:>5}");
            for c in cells {
                match c {
                    Some(v) => {
                        let _ = write!(out, " {v:>11.2}");
                    }
                    None => {
                        let _ = write!(out, " {:>11}", "-");
                    }
                }
            }
            out.push('\n');
        }
    }
    if sections.categorize {
        let rows = categorize(records, base)?;
        let _ = writeln!(out, "\n== share of instances by speedup over {base} (%) ==");
        let _ = writeln!(
            out,
            "{:<11} {:>5} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7} {:>8}",
            "scheme", "n", ">1", ">2", ">3", "<1", "<2", "<3", "excluded"
        );
        for r in rows {
            let _ = writeln!(
                out,
                "{:<11} {:>5} {:>7.1} {:>7.1} {:>7.1} {:>7.1} {:>7.1} {:>7.1} {:>8}",
                r.scheme,
                r.instances,
                r.faster[0],
                r.faster[1],
                r.faster[2],
                r.slower[0],
                r.slower[1],
                r.slower[2],
                r.excluded
            );
        }
    }
    if sections.ttest {
        let _ = writeln!(out, "\n== paired t-test on {base} time minus scheme time (ms) ==");
        let _ = writeln!(out, "{:<11} {:>5} {:>12} {:>12} {:>9} {:>27}", "scheme", "n", "mean", "sd", "t", "95% ci");
        for (scheme, report) in ttests(records, base)? {
            match report {
                Some(r) => {
                    let ci = format!("({:.3}, {:.3})", r.ci95.0, r.ci95.1);
                    let _ = writeln!(
                        out,
                        "{scheme:<11} {:>5} {:>12.3} {:>12.3} {:>9.3} {ci:>27}",
                        r.n, r.mean, r.sd, r.t
                    );
                }
                None => {
                    let _ = writeln!(out, "{scheme:<11} too few comparable instances");
                }
            }
        }
    }
    Ok(out)
}
