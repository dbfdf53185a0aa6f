//! One-dimensional x-means over value scores.
//!
//! Starting from a single cluster, every cluster tries a local 2-means split
//! seeded at its centroid plus and minus one local standard deviation; a
//! split is kept when it raises the local BIC, after which a global k-means
//! pass re-fits all centroids. Model scoring follows the identical spherical
//! Gaussian model: shared variance `sum (s - mu)^2 / (n - k)`, mixing weights
//! `n_j / n`, and `p = 2k` free parameters penalised by `(p / 2) ln n`.

/// Lower bound on the shared variance, so zero-distortion clusterings still
/// have a finite score.
pub const VARIANCE_FLOOR: f64 = 1e-9;
/// Lloyd iterations per k-means call.
pub const MAX_ITERATIONS: usize = 200;
pub const DEFAULT_KMAX: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeans {
    /// Cluster label per score, `0..centroids.len()`.
    pub assignment: Vec<usize>,
    pub centroids: Vec<f64>,
    /// Sum of squared distances to the assigned centroid.
    pub distortion: f64,
}

impl KMeans {
    pub fn k(&self) -> usize {
        self.centroids.len()
    }
}

/// Mean computed relative to the first element, exact for constant input.
fn mean(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let mut it = values.clone();
    let Some(first) = it.next() else { return f64::NAN };
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + (v - first), n + 1));
    first + sum / n as f64
}

fn nearest(centroids: &[f64], s: f64) -> usize {
    let mut best = 0;
    let mut best_d = (s - centroids[0]).abs();
    for (j, &c) in centroids.iter().enumerate().skip(1) {
        let d = (s - c).abs();
        if d < best_d {
            best = j;
            best_d = d;
        }
    }
    best
}

/// Means of the non-empty clusters, relabelling the assignment to match.
fn refit(scores: &[f64], assignment: &mut [usize], k: usize) -> Vec<f64> {
    let mut remap = vec![usize::MAX; k];
    let mut centroids = Vec::new();
    for (j, slot) in remap.iter_mut().enumerate() {
        let members = scores.iter().zip(assignment.iter()).filter(|(_, &a)| a == j).map(|(&s, _)| s);
        if members.clone().next().is_some() {
            *slot = centroids.len();
            centroids.push(mean(members));
        }
    }
    for a in assignment.iter_mut() {
        *a = remap[*a];
    }
    centroids
}

fn distortion(scores: &[f64], assignment: &[usize], centroids: &[f64]) -> f64 {
    scores.iter().zip(assignment).map(|(&s, &a)| (s - centroids[a]).powi(2)).sum()
}

/// Lloyd's algorithm from the given centroids. Ties in distance go to the
/// lower-indexed centroid; clusters that empty out are dropped.
pub fn kmeans_1d(scores: &[f64], initial: &[f64]) -> KMeans {
    assert!(!initial.is_empty() && !scores.is_empty(), "k-means needs scores and centroids");
    let mut assignment: Vec<usize> = scores.iter().map(|&s| nearest(initial, s)).collect();
    let mut centroids = refit(scores, &mut assignment, initial.len());
    for _ in 1..MAX_ITERATIONS {
        let next: Vec<usize> = scores.iter().map(|&s| nearest(&centroids, s)).collect();
        if next == assignment {
            break;
        }
        assignment = next;
        centroids = refit(scores, &mut assignment, centroids.len());
    }
    let distortion = distortion(scores, &assignment, &centroids);
    KMeans { assignment, centroids, distortion }
}

/// Bayesian information criterion of a hard clustering (higher is better).
pub fn bic(scores: &[f64], assignment: &[usize], centroids: &[f64]) -> f64 {
    let mut counts = vec![0usize; centroids.len()];
    for &a in assignment {
        counts[a] += 1;
    }
    bic_parts(scores.len(), &counts, distortion(scores, assignment, centroids))
}

fn bic_parts(n: usize, counts: &[usize], sse: f64) -> f64 {
    let k = counts.len();
    let nf = n as f64;
    let variance = if n > k { (sse / (n - k) as f64).max(VARIANCE_FLOOR) } else { VARIANCE_FLOOR };
    let mixing: f64 = counts.iter().filter(|&&c| c > 0).map(|&c| c as f64 * (c as f64 / nf).ln()).sum();
    let loglik = mixing - 0.5 * nf * (2.0 * std::f64::consts::PI * variance).ln() - sse / (2.0 * variance);
    let params = 2 * k;
    loglik - params as f64 / 2.0 * nf.ln()
}

/// An ordered partition of score indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    /// Indices into the clustered scores, ascending within each cluster.
    /// Clusters are ordered by descending mean score.
    pub clusters: Vec<Vec<usize>>,
    pub centroids: Vec<f64>,
}

impl Clustering {
    pub fn k(&self) -> usize {
        self.clusters.len()
    }
}

fn two_distinct(values: &[f64]) -> bool {
    values.iter().any(|&v| v != values[0])
}

/// Clusters `scores` into at most `kmax` groups, choosing k by BIC.
pub fn xmeans(scores: &[f64], kmax: usize) -> Clustering {
    assert!(!scores.is_empty(), "nothing to cluster");
    let kmax = kmax.max(1);
    let mut km = kmeans_1d(scores, &[mean(scores.iter().copied())]);
    while km.k() < kmax {
        let mut next = Vec::with_capacity(kmax);
        let mut accepted = 0;
        for (j, &c) in km.centroids.iter().enumerate() {
            let members: Vec<f64> =
                scores.iter().zip(&km.assignment).filter(|(_, &a)| a == j).map(|(&s, _)| s).collect();
            if km.k() + accepted < kmax && two_distinct(&members) {
                if let Some(children) = try_split(&members, c) {
                    next.extend(children);
                    accepted += 1;
                    continue;
                }
            }
            next.push(c);
        }
        if accepted == 0 {
            break;
        }
        next.sort_by(f64::total_cmp);
        km = kmeans_1d(scores, &next);
    }
    let greedy = regroup(scores, &km);
    refine(scores, greedy, kmax)
}

/// Upper bound on the partitions examined by [`refine`].
pub const REFINE_BUDGET: u64 = 200_000;

/// Greedy splitting cannot reach k = 3 when no 2-split beats k = 1 (three
/// evenly spaced groups, for instance). Every cut of the sorted distinct
/// scores into at most `kmax` runs is scored, and the greedy result is
/// replaced only by a strictly better one. Skipped when the number of cuts
/// exceeds [`REFINE_BUDGET`].
fn refine(scores: &[f64], greedy: Clustering, kmax: usize) -> Clustering {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
    // run r covers order[starts[r]..starts[r + 1]]
    let mut starts = vec![0];
    for i in 1..order.len() {
        if scores[order[i]] != scores[order[i - 1]] {
            starts.push(i);
        }
    }
    let m = starts.len();
    starts.push(order.len());
    let kmax = kmax.min(m);
    if kmax <= 1 || partition_count(m, kmax) > REFINE_BUDGET {
        return greedy;
    }
    // sse[a][b]: distortion of runs a..b as one cluster
    let mut sse = vec![vec![0.0; m + 1]; m];
    for a in 0..m {
        for b in a + 1..=m {
            let members = order[starts[a]..starts[b]].iter().map(|&i| scores[i]);
            let mu = mean(members.clone());
            sse[a][b] = members.map(|s| (s - mu).powi(2)).sum();
        }
    }
    let n = scores.len();
    let greedy_counts: Vec<usize> = greedy.clusters.iter().map(Vec::len).collect();
    let greedy_sse: f64 = greedy
        .clusters
        .iter()
        .zip(&greedy.centroids)
        .map(|(c, &mu)| c.iter().map(|&i| (scores[i] - mu).powi(2)).sum::<f64>())
        .sum();
    let mut best_bic = bic_parts(n, &greedy_counts, greedy_sse);
    let mut best: Option<Vec<usize>> = None;
    let mut cuts = vec![0usize];
    let mut counts = Vec::with_capacity(kmax);
    // depth-first over ascending cut positions; `cuts` holds run starts
    #[allow(clippy::too_many_arguments)]
    fn walk(
        cuts: &mut Vec<usize>,
        counts: &mut Vec<usize>,
        m: usize,
        kmax: usize,
        n: usize,
        starts: &[usize],
        sse: &[Vec<f64>],
        best_bic: &mut f64,
        best: &mut Option<Vec<usize>>,
    ) {
        let last = *cuts.last().expect("first cut");
        counts.clear();
        let mut total = 0.0;
        for w in cuts.windows(2) {
            counts.push(starts[w[1]] - starts[w[0]]);
            total += sse[w[0]][w[1]];
        }
        counts.push(starts[m] - starts[last]);
        total += sse[last][m];
        let b = bic_parts(n, counts, total);
        if b > *best_bic + 1e-12 * best_bic.abs().max(1.0) {
            *best_bic = b;
            *best = Some(cuts.clone());
        }
        if cuts.len() < kmax {
            for next in last + 1..m {
                cuts.push(next);
                walk(cuts, counts, m, kmax, n, starts, sse, best_bic, best);
                cuts.pop();
            }
        }
    }
    walk(&mut cuts, &mut counts, m, kmax, n, &starts, &sse, &mut best_bic, &mut best);
    let Some(mut cuts) = best else { return greedy };
    cuts.push(m);
    let mut groups: Vec<(f64, Vec<usize>)> = cuts
        .windows(2)
        .map(|w| {
            let mut members: Vec<usize> = order[starts[w[0]]..starts[w[1]]].to_vec();
            members.sort_unstable();
            (mean(members.iter().map(|&i| scores[i])), members)
        })
        .collect();
    groups.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1[0].cmp(&b.1[0])));
    let (centroids, clusters) = groups.into_iter().unzip();
    Clustering { clusters, centroids }
}

/// Number of ways to cut `m` runs into at most `kmax` contiguous groups,
/// saturating.
fn partition_count(m: usize, kmax: usize) -> u64 {
    let mut total: u64 = 0;
    let mut binom: u64 = 1; // C(m - 1, j)
    for j in 0..kmax {
        total = total.saturating_add(binom);
        binom = binom.saturating_mul((m - 1 - j) as u64) / (j as u64 + 1);
    }
    total
}

/// Local 2-means split of one cluster; the child centroids when the split
/// improves the cluster's own BIC.
fn try_split(members: &[f64], centroid: f64) -> Option<[f64; 2]> {
    let m = members.len() as f64;
    let sd = (members.iter().map(|s| (s - centroid).powi(2)).sum::<f64>() / m).sqrt();
    let mut seeds = [centroid - sd, centroid + sd];
    if seeds[0] >= seeds[1] {
        // spread below float resolution at this magnitude
        let lo = members.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = members.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        seeds = [lo, hi];
    }
    let child = kmeans_1d(members, &seeds);
    if child.k() != 2 {
        return None;
    }
    let parent = bic(members, &vec![0; members.len()], &[centroid]);
    let split = bic(members, &child.assignment, &child.centroids);
    (split > parent).then(|| [child.centroids[0], child.centroids[1]])
}

/// Final pass: every distinct score goes to the cluster holding most of its
/// occurrences (ties to the higher-mean cluster), then clusters are sorted by
/// descending mean.
fn regroup(scores: &[f64], km: &KMeans) -> Clustering {
    let k = km.k();
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
    let mut label = vec![0usize; scores.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let mut votes = vec![0usize; k];
        for &idx in &order[i..j] {
            votes[km.assignment[idx]] += 1;
        }
        let winner = (0..k)
            .max_by(|&a, &b| votes[a].cmp(&votes[b]).then(km.centroids[a].total_cmp(&km.centroids[b])))
            .expect("k >= 1");
        for &idx in &order[i..j] {
            label[idx] = winner;
        }
        i = j;
    }
    let mut clusters: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (idx, &l) in label.iter().enumerate() {
        clusters[l].push(idx);
    }
    let mut groups: Vec<(f64, Vec<usize>)> = clusters
        .into_iter()
        .filter(|c| !c.is_empty())
        .map(|c| (mean(c.iter().map(|&i| scores[i])), c))
        .collect();
    groups.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1[0].cmp(&b.1[0])));
    let (centroids, clusters) = groups.into_iter().unzip();
    Clustering { clusters, centroids }
}
