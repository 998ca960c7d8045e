//! Clustering over feature footprints: Lloyd's k-means with k-means++
//! seeding, DBSCAN with a deterministic border rule, silhouette scoring,
//! the DBSCAN parameter grid, and the silhouette-vs-cluster-count
//! selection policy (cap of 30 clusters).
//!
//! Everything is deterministic given (input, seed): assignment ties go to
//! the lowest center index, border points join the first cluster that
//! reaches them in seed-index order, and grid cells are assembled in grid
//! order regardless of how many threads computed them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{squared_distance, Matrix};
use crate::rng::Rng;

#[derive(Debug, Error)]
pub enum ClusterError {
    #[error("too few points: needed {needed}, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("point {0} has a non-finite coordinate")]
    NonFinitePoint(usize),
    #[error("silhouette undefined: fewer than 2 non-noise clusters")]
    UndefinedScore,
    #[error("no feasible candidate:\n{0}")]
    NoFeasibleCandidate(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KMeansConfig {
    pub k: usize,
    pub n_init: usize,
    pub max_iter: usize,
    /// Relative inertia improvement below which a run stops.
    pub tol: f64,
    pub seed: u64,
}

impl KMeansConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            n_init: 10,
            max_iter: 300,
            tol: 1e-4,
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DbscanConfig {
    /// Closed-ball Euclidean neighborhood radius.
    pub eps: f64,
    /// Minimum neighborhood size (the point itself counts).
    pub min_pts: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusterAlgorithm {
    KMeans,
    Dbscan,
}

/// A fitted clustering: per-point labels (noise = -1) plus the
/// diagnostics the selection policy consumes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterModel {
    pub algorithm: ClusterAlgorithm,
    /// Point index -> cluster id; non-noise ids are 0..cluster_count-1.
    pub assignments: Vec<i64>,
    /// k-means centers (empty for DBSCAN).
    pub centers: Vec<Vec<f64>>,
    pub silhouette: Option<f64>,
    pub cluster_count: usize,
    pub largest_fraction: f64,
    pub noise_fraction: f64,
    /// Set when all input points were identical but k > 1 was requested.
    pub degenerate: bool,
    pub inertia: Option<f64>,
    /// Inertia after each assignment pass of the winning restart.
    pub inertia_trace: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub cluster_count: usize,
    pub largest_fraction: f64,
    pub noise_fraction: f64,
}

/// Feasibility gate for model selection: bounded cluster count and no
/// megacluster swallowing nearly every point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionPolicy {
    pub max_clusters: usize,
    pub min_clusters: usize,
    pub max_largest_fraction: f64,
}

impl Default for SelectionPolicy {
    fn default() -> Self {
        Self {
            max_clusters: 30,
            min_clusters: 2,
            max_largest_fraction: 0.95,
        }
    }
}

/// Precomputed pairwise Euclidean distances with per-point neighbor
/// lists sorted by distance; shared across an entire DBSCAN grid.
pub struct PairwiseDistances {
    n: usize,
    dist: Vec<f64>,
    sorted: Vec<u32>,
}

impl PairwiseDistances {
    pub fn from_matrix(points: &Matrix) -> Self {
        let n = points.n_rows();
        let mut dist = vec![0.0f64; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = squared_distance(points.row(i), points.row(j)).sqrt();
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        let mut sorted = vec![0u32; n * n];
        for i in 0..n {
            let row = &mut sorted[i * n..(i + 1) * n];
            for (slot, j) in row.iter_mut().zip(0..n as u32) {
                *slot = j;
            }
            let d = &dist[i * n..(i + 1) * n];
            row.sort_unstable_by(|&a, &b| {
                d[a as usize].total_cmp(&d[b as usize]).then(a.cmp(&b))
            });
        }
        Self { n, dist, sorted }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    /// Indices within the closed ball of radius eps around i (self included).
    pub fn neighbors(&self, i: usize, eps: f64) -> &[u32] {
        let row = &self.sorted[i * self.n..(i + 1) * self.n];
        let d = &self.dist[i * self.n..(i + 1) * self.n];
        let count = row.partition_point(|&j| d[j as usize] <= eps);
        &row[..count]
    }
}

fn check_points(points: &Matrix) -> Result<(), ClusterError> {
    for i in 0..points.n_rows() {
        if points.row(i).iter().any(|v| !v.is_finite()) {
            return Err(ClusterError::NonFinitePoint(i));
        }
    }
    Ok(())
}

fn inertia_of(points: &Matrix, centers: &[Vec<f64>], labels: &[usize]) -> f64 {
    labels
        .iter()
        .enumerate()
        .map(|(i, &c)| squared_distance(points.row(i), &centers[c]))
        .sum()
}

/// Nearest center index; ties resolve to the lowest index.
fn nearest_center(point: &[f64], centers: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (c, center) in centers.iter().enumerate() {
        let d = squared_distance(point, center);
        if d < best_d {
            best_d = d;
            best = c;
        }
    }
    best
}

fn kmeans_plus_plus(points: &Matrix, k: usize, rng: &mut Rng) -> Vec<Vec<f64>> {
    let n = points.n_rows();
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let first = rng.next_below(n as u64) as usize;
    centers.push(points.row(first).to_vec());
    chosen.push(first);

    let mut d2 = vec![f64::INFINITY; n];
    while centers.len() < k {
        let latest = centers.last().unwrap();
        let mut total = 0.0;
        for i in 0..n {
            let d = squared_distance(points.row(i), latest);
            if d < d2[i] {
                d2[i] = d;
            }
            total += d2[i];
        }
        let pick = if total > 0.0 {
            let mut target = rng.next_f64() * total;
            let mut pick = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                target -= w;
                if target < 0.0 {
                    pick = i;
                    break;
                }
            }
            pick
        } else {
            // all remaining mass is zero; take the lowest unchosen index
            (0..n).find(|i| !chosen.contains(i)).unwrap_or(0)
        };
        centers.push(points.row(pick).to_vec());
        chosen.push(pick);
    }
    centers
}

struct LloydRun {
    labels: Vec<usize>,
    centers: Vec<Vec<f64>>,
    inertia: f64,
    trace: Vec<f64>,
}

fn lloyd(points: &Matrix, config: &KMeansConfig, rng: &mut Rng) -> LloydRun {
    let n = points.n_rows();
    let dims = points.n_cols();
    let mut centers = kmeans_plus_plus(points, config.k, rng);
    let mut labels = vec![0usize; n];
    let mut trace = Vec::new();
    let mut prev_inertia = f64::INFINITY;

    for _ in 0..config.max_iter.max(1) {
        for i in 0..n {
            labels[i] = nearest_center(points.row(i), &centers);
        }
        let inertia = inertia_of(points, &centers, &labels);
        trace.push(inertia);

        // means of assigned points; empty clusters keep their center
        let mut sums = vec![vec![0.0f64; dims]; config.k];
        let mut counts = vec![0usize; config.k];
        for (i, &c) in labels.iter().enumerate() {
            counts[c] += 1;
            for (s, v) in sums[c].iter_mut().zip(points.row(i)) {
                *s += v;
            }
        }
        for c in 0..config.k {
            if counts[c] > 0 {
                for s in &mut sums[c] {
                    *s /= counts[c] as f64;
                }
                centers[c] = sums[c].clone();
            }
        }

        if prev_inertia.is_finite() {
            let improvement = prev_inertia - inertia;
            if improvement <= config.tol * prev_inertia.max(f64::MIN_POSITIVE) {
                break;
            }
        }
        prev_inertia = inertia;
    }

    // final assignment against the updated centers
    for i in 0..n {
        labels[i] = nearest_center(points.row(i), &centers);
    }
    let inertia = inertia_of(points, &centers, &labels);
    trace.push(inertia);

    LloydRun {
        labels,
        centers,
        inertia,
        trace,
    }
}

/// Lloyd's algorithm with k-means++ seeding, best of `n_init` restarts
/// by final inertia.
pub fn kmeans_fit(points: &Matrix, config: &KMeansConfig) -> Result<ClusterModel, ClusterError> {
    let n = points.n_rows();
    if n == 0 || config.k == 0 || config.k > n {
        return Err(ClusterError::TooFewPoints {
            needed: config.k.max(1),
            got: n,
        });
    }
    check_points(points)?;

    let first_row = points.row(0);
    let all_identical = (1..n).all(|i| points.row(i) == first_row);
    if all_identical && config.k > 1 {
        let assignments = vec![0i64; n];
        let dist = distribution(&assignments);
        return Ok(ClusterModel {
            algorithm: ClusterAlgorithm::KMeans,
            assignments,
            centers: vec![first_row.to_vec(); config.k],
            silhouette: None,
            cluster_count: dist.cluster_count,
            largest_fraction: dist.largest_fraction,
            noise_fraction: dist.noise_fraction,
            degenerate: true,
            inertia: Some(0.0),
            inertia_trace: vec![0.0],
        });
    }

    let mut best: Option<LloydRun> = None;
    for restart in 0..config.n_init.max(1) {
        let mut rng = Rng::substream(config.seed, "kmeans_restart", restart as u64);
        let run = lloyd(points, config, &mut rng);
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    let run = best.unwrap();

    // compact away empty clusters, preserving center order
    let mut used: Vec<usize> = run.labels.to_vec();
    used.sort_unstable();
    used.dedup();
    let remap: std::collections::BTreeMap<usize, usize> =
        used.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let assignments: Vec<i64> = run.labels.iter().map(|c| remap[c] as i64).collect();
    let centers: Vec<Vec<f64>> = used.iter().map(|&c| run.centers[c].clone()).collect();

    let dist = distribution(&assignments);
    Ok(ClusterModel {
        algorithm: ClusterAlgorithm::KMeans,
        assignments,
        centers,
        silhouette: None,
        cluster_count: dist.cluster_count,
        largest_fraction: dist.largest_fraction,
        noise_fraction: dist.noise_fraction,
        degenerate: false,
        inertia: Some(run.inertia),
        inertia_trace: run.trace,
    })
}

/// Density expansion given precomputed core flags.
fn dbscan_expand(pd: &PairwiseDistances, eps: f64, core: &[bool]) -> ClusterModel {
    let n = pd.len();
    let mut labels = vec![-1i64; n];
    let mut assigned = 0usize;
    let mut cluster = 0i64;
    let mut stack = Vec::new();
    'seeds: for seed in 0..n {
        if !core[seed] || labels[seed] != -1 {
            continue;
        }
        labels[seed] = cluster;
        assigned += 1;
        stack.push(seed);
        while let Some(p) = stack.pop() {
            for &q in pd.neighbors(p, eps) {
                let q = q as usize;
                if labels[q] == -1 {
                    labels[q] = cluster;
                    assigned += 1;
                    if core[q] {
                        stack.push(q);
                    }
                }
            }
            if assigned == n {
                // everything claimed; remaining expansion is a no-op
                stack.clear();
                break 'seeds;
            }
        }
        cluster += 1;
    }

    let dist = distribution(&labels);
    ClusterModel {
        algorithm: ClusterAlgorithm::Dbscan,
        assignments: labels,
        centers: Vec::new(),
        silhouette: None,
        cluster_count: dist.cluster_count,
        largest_fraction: dist.largest_fraction,
        noise_fraction: dist.noise_fraction,
        degenerate: false,
        inertia: None,
        inertia_trace: Vec::new(),
    }
}

/// DBSCAN against a prebuilt distance structure.
pub fn dbscan_with_distances(pd: &PairwiseDistances, config: &DbscanConfig) -> ClusterModel {
    let core: Vec<bool> = (0..pd.len())
        .map(|i| pd.neighbors(i, config.eps).len() >= config.min_pts)
        .collect();
    dbscan_expand(pd, config.eps, &core)
}

/// Density clustering: core points have >= min_pts neighbors within the
/// closed eps-ball (self included); clusters are the connected core
/// components plus the border points each cluster reaches first.
pub fn dbscan_fit(points: &Matrix, config: &DbscanConfig) -> Result<ClusterModel, ClusterError> {
    if points.n_rows() == 0 {
        return Err(ClusterError::TooFewPoints { needed: 1, got: 0 });
    }
    check_points(points)?;
    Ok(dbscan_with_distances(
        &PairwiseDistances::from_matrix(points),
        config,
    ))
}

/// Mean silhouette over non-noise points; noise is excluded entirely.
pub fn silhouette(points: &Matrix, assignments: &[i64]) -> Result<f64, ClusterError> {
    assert_eq!(points.n_rows(), assignments.len());
    check_points(points)?;
    silhouette_with_distances(&PairwiseDistances::from_matrix(points), assignments)
}

/// Silhouette against a prebuilt distance structure.
///
/// Points in singleton clusters score 0, as do exact-duplicate points
/// with a = b = 0.
pub fn silhouette_with_distances(
    pd: &PairwiseDistances,
    assignments: &[i64],
) -> Result<f64, ClusterError> {
    let n = pd.len();
    let k = assignments.iter().copied().max().unwrap_or(-1) + 1;
    if k < 2 {
        return Err(ClusterError::UndefinedScore);
    }
    let k = k as usize;
    let mut sizes = vec![0usize; k];
    for &label in assignments {
        if label >= 0 {
            sizes[label as usize] += 1;
        }
    }
    if sizes.iter().filter(|&&s| s > 0).count() < 2 {
        return Err(ClusterError::UndefinedScore);
    }

    let mut total = 0.0;
    let mut counted = 0usize;
    let mut sums = vec![0.0f64; k];
    for i in 0..n {
        let own = assignments[i];
        if own < 0 {
            continue;
        }
        let own = own as usize;
        counted += 1;
        if sizes[own] == 1 {
            continue; // singleton scores 0
        }
        sums.iter_mut().for_each(|s| *s = 0.0);
        let row = i * n;
        for (j, &label) in assignments.iter().enumerate() {
            if label >= 0 {
                sums[label as usize] += pd.dist[row + j];
            }
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let mut b = f64::INFINITY;
        for (c, &size) in sizes.iter().enumerate() {
            if c != own && size > 0 {
                let mean = sums[c] / size as f64;
                if mean < b {
                    b = mean;
                }
            }
        }
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    Ok(total / counted as f64)
}

/// Cluster count (noise excluded), largest-cluster share of non-noise
/// points, and noise share of all points.
pub fn distribution(assignments: &[i64]) -> Distribution {
    let mut counts: std::collections::BTreeMap<i64, usize> = std::collections::BTreeMap::new();
    let mut noise = 0usize;
    for &label in assignments {
        if label < 0 {
            noise += 1;
        } else {
            *counts.entry(label).or_insert(0) += 1;
        }
    }
    let non_noise: usize = counts.values().sum();
    let largest = counts.values().copied().max().unwrap_or(0);
    Distribution {
        cluster_count: counts.len(),
        largest_fraction: if non_noise > 0 {
            largest as f64 / non_noise as f64
        } else {
            0.0
        },
        noise_fraction: if assignments.is_empty() {
            0.0
        } else {
            noise as f64 / assignments.len() as f64
        },
    }
}

/// Default DBSCAN grid rows: min_pts 5..=20.
pub fn default_min_pts_values() -> Vec<usize> {
    (5..=20).collect()
}

/// Default DBSCAN grid columns: eps 0.1..=1.5, step 0.1.
pub fn default_eps_values() -> Vec<f64> {
    (1..=15).map(|i| i as f64 / 10.0).collect()
}

/// Every (min_pts, eps) pair evaluated with silhouette and distribution;
/// cells run in parallel but the output is always in grid order
/// (min_pts-major, then eps).
pub fn grid_search_dbscan(
    points: &Matrix,
    min_pts_values: &[usize],
    eps_values: &[f64],
) -> Result<Vec<(DbscanConfig, ClusterModel)>, ClusterError> {
    if points.n_rows() == 0 {
        return Err(ClusterError::TooFewPoints { needed: 1, got: 0 });
    }
    check_points(points)?;
    let pd = PairwiseDistances::from_matrix(points);
    Ok(grid_search_dbscan_with_distances(&pd, min_pts_values, eps_values))
}

/// Grid search against a prebuilt distance structure.
///
/// Neighbor counts are shared across the min_pts column of each eps, and
/// identical partitions are scored once; cached values are bit-identical
/// to recomputation, so the output never depends on scheduling.
pub fn grid_search_dbscan_with_distances(
    pd: &PairwiseDistances,
    min_pts_values: &[usize],
    eps_values: &[f64],
) -> Vec<(DbscanConfig, ClusterModel)> {
    use std::collections::HashMap;
    use std::sync::Mutex;

    let silhouette_cache: Mutex<HashMap<Vec<i64>, Option<f64>>> = Mutex::new(HashMap::new());

    let columns: Vec<Vec<(DbscanConfig, ClusterModel)>> = eps_values
        .par_iter()
        .map(|&eps| {
            let counts: Vec<usize> = (0..pd.len()).map(|i| pd.neighbors(i, eps).len()).collect();
            let mut by_core: HashMap<Vec<bool>, ClusterModel> = HashMap::new();
            min_pts_values
                .iter()
                .map(|&min_pts| {
                    let core: Vec<bool> = counts.iter().map(|&c| c >= min_pts).collect();
                    let model = by_core
                        .entry(core)
                        .or_insert_with_key(|core| {
                            let mut model = dbscan_expand(pd, eps, core);
                            let cached = silhouette_cache
                                .lock()
                                .unwrap()
                                .get(&model.assignments)
                                .copied();
                            model.silhouette = match cached {
                                Some(score) => score,
                                None => {
                                    let score =
                                        silhouette_with_distances(pd, &model.assignments).ok();
                                    silhouette_cache
                                        .lock()
                                        .unwrap()
                                        .insert(model.assignments.clone(), score);
                                    score
                                }
                            };
                            model
                        })
                        .clone();
                    (DbscanConfig { eps, min_pts }, model)
                })
                .collect()
        })
        .collect();

    // emit in (min_pts, eps) grid order
    let mut out = Vec::with_capacity(min_pts_values.len() * eps_values.len());
    for mi in 0..min_pts_values.len() {
        for column in &columns {
            out.push(column[mi].clone());
        }
    }
    out
}

/// Fills in the silhouette diagnostic of an already-fitted model.
pub fn attach_silhouette(model: &mut ClusterModel, pd: &PairwiseDistances) {
    model.silhouette = silhouette_with_distances(pd, &model.assignments).ok();
}

/// Picks the feasible candidate with the highest silhouette; ties break
/// to fewer clusters, then smaller largest fraction, then input order.
/// Returns the index into `candidates`.
pub fn select_model(
    candidates: &[ClusterModel],
    policy: &SelectionPolicy,
) -> Result<usize, ClusterError> {
    let mut best: Option<(usize, f64, usize, f64)> = None;
    let mut reasons: Vec<String> = Vec::new();
    for (i, model) in candidates.iter().enumerate() {
        let reason = if model.cluster_count < policy.min_clusters {
            format!("candidate {i}: {} clusters < min {}", model.cluster_count, policy.min_clusters)
        } else if model.cluster_count > policy.max_clusters {
            format!("candidate {i}: {} clusters > max {}", model.cluster_count, policy.max_clusters)
        } else if model.largest_fraction > policy.max_largest_fraction {
            format!(
                "candidate {i}: largest cluster {:.1}% > {:.1}%",
                100.0 * model.largest_fraction,
                100.0 * policy.max_largest_fraction
            )
        } else if model.silhouette.is_none() {
            format!("candidate {i}: silhouette undefined")
        } else {
            let score = model.silhouette.unwrap();
            let key = (i, score, model.cluster_count, model.largest_fraction);
            let better = match &best {
                None => true,
                Some((_, s, c, l)) => {
                    score > *s
                        || (score == *s && model.cluster_count < *c)
                        || (score == *s && model.cluster_count == *c && model.largest_fraction < *l)
                }
            };
            if better {
                best = Some(key);
            }
            continue;
        };
        reasons.push(reason);
    }
    best.map(|(i, _, _, _)| i)
        .ok_or_else(|| ClusterError::NoFeasibleCandidate(reasons.join("\n")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn points_1d(values: &[f64]) -> Matrix {
        Matrix::from_vec(values.len(), 1, values.to_vec())
    }

    fn random_points(rng: &mut Rng, n: usize, d: usize, span: f64) -> Matrix {
        let data: Vec<f64> = (0..n * d).map(|_| rng.next_f64_range(0.0, span)).collect();
        Matrix::from_vec(n, d, data)
    }

    /// Plain BFS reference DBSCAN used as the independent oracle.
    fn dbscan_reference(points: &Matrix, eps: f64, min_pts: usize) -> Vec<i64> {
        let n = points.n_rows();
        let neighborhoods: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| {
                        crate::matrix::euclidean_distance(points.row(i), points.row(j)) <= eps
                    })
                    .collect()
            })
            .collect();
        let core: Vec<bool> = neighborhoods.iter().map(|nb| nb.len() >= min_pts).collect();
        let mut labels = vec![-1i64; n];
        let mut cluster = 0i64;
        for seed in 0..n {
            if !core[seed] || labels[seed] != -1 {
                continue;
            }
            let mut queue = std::collections::VecDeque::from([seed]);
            labels[seed] = cluster;
            while let Some(p) = queue.pop_front() {
                for &q in &neighborhoods[p] {
                    if labels[q] == -1 {
                        labels[q] = cluster;
                        if core[q] {
                            queue.push_back(q);
                        }
                    }
                }
            }
            cluster += 1;
        }
        labels
    }

    /// Canonical relabeling: clusters numbered by first occurrence.
    fn canonical(labels: &[i64]) -> Vec<i64> {
        let mut map = std::collections::BTreeMap::new();
        let mut next = 0i64;
        labels
            .iter()
            .map(|&l| {
                if l < 0 {
                    -1
                } else {
                    *map.entry(l).or_insert_with(|| {
                        let id = next;
                        next += 1;
                        id
                    })
                }
            })
            .collect()
    }

    #[test]
    fn kmeans_recovers_two_groups_exactly() {
        let points = points_1d(&[0.0, 1.0, 10.0, 11.0]);
        let model = kmeans_fit(&points, &KMeansConfig::new(2, 7)).unwrap();

        // oracle: enumerate all 2-partitions, centers at means
        let mut best_inertia = f64::INFINITY;
        let mut best_mask = 0u32;
        for mask in 1u32..(1 << 4) - 1 {
            let (mut sa, mut na, mut sb, mut nb) = (0.0, 0usize, 0.0, 0usize);
            for (i, v) in [0.0, 1.0, 10.0, 11.0].iter().enumerate() {
                if mask & (1 << i) != 0 {
                    sa += v;
                    na += 1;
                } else {
                    sb += v;
                    nb += 1;
                }
            }
            let (ma, mb) = (sa / na as f64, sb / nb as f64);
            let inertia: f64 = [0.0, 1.0, 10.0, 11.0]
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let c = if mask & (1 << i) != 0 { ma } else { mb };
                    (v - c) * (v - c)
                })
                .sum();
            if inertia < best_inertia {
                best_inertia = inertia;
                best_mask = mask;
            }
        }
        assert_eq!(best_mask & 0b0011, 0b0011 & best_mask); // sanity
        // best partition must be {0,1} vs {10,11}
        let same_01 = model.assignments[0] == model.assignments[1];
        let same_23 = model.assignments[2] == model.assignments[3];
        let split = model.assignments[0] != model.assignments[2];
        assert!(same_01 && same_23 && split, "{:?}", model.assignments);
        assert!((model.inertia.unwrap() - best_inertia).abs() < 1e-12);

        let mut centers: Vec<f64> = model.centers.iter().map(|c| c[0]).collect();
        centers.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(centers, vec![0.5, 10.5]);
    }

    #[test]
    fn kmeans_k_equals_n_gives_zero_inertia() {
        let points = points_1d(&[1.0, 5.0, 9.0]);
        let model = kmeans_fit(&points, &KMeansConfig::new(3, 3)).unwrap();
        assert_eq!(model.cluster_count, 3);
        assert!(model.inertia.unwrap() < 1e-18);
        let mut sorted = model.assignments.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 2]);
    }

    #[test]
    fn kmeans_trace_nonincreasing_on_random_runs() {
        let mut rng = Rng::seed_from(5);
        for run in 0..50 {
            let n = 8 + rng.next_below(40) as usize;
            let d = 1 + rng.next_below(4) as usize;
            let points = random_points(&mut rng, n, d, 10.0);
            let k = 2 + rng.next_below(4.min(n as u64 - 1)) as usize;
            let model = kmeans_fit(&points, &KMeansConfig::new(k, run)).unwrap();
            for w in model.inertia_trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-9, "trace {:?}", model.inertia_trace);
            }
        }
    }

    #[test]
    fn kmeans_assignments_are_nearest_center() {
        let mut rng = Rng::seed_from(11);
        for run in 0..20 {
            let points = random_points(&mut rng, 40, 3, 5.0);
            let model = kmeans_fit(&points, &KMeansConfig::new(4, run)).unwrap();
            for i in 0..40 {
                let nearest = nearest_center(points.row(i), &model.centers);
                assert_eq!(model.assignments[i], nearest as i64);
            }
        }
    }

    #[test]
    fn kmeans_identical_points_flagged() {
        let points = Matrix::from_rows(&vec![vec![2.0, 2.0]; 6]);
        let model = kmeans_fit(&points, &KMeansConfig::new(3, 1)).unwrap();
        assert!(model.degenerate);
        assert_eq!(model.centers.len(), 3);
        assert_eq!(model.cluster_count, 1);
        assert!(model.assignments.iter().all(|&a| a == 0));
    }

    #[test]
    fn kmeans_rejects_k_above_n() {
        let err = kmeans_fit(&points_1d(&[1.0, 2.0]), &KMeansConfig::new(3, 1)).unwrap_err();
        assert!(matches!(err, ClusterError::TooFewPoints { .. }));
    }

    #[test]
    fn kmeans_deterministic_for_seed() {
        let mut rng = Rng::seed_from(13);
        let points = random_points(&mut rng, 50, 2, 8.0);
        let a = kmeans_fit(&points, &KMeansConfig::new(5, 99)).unwrap();
        let b = kmeans_fit(&points, &KMeansConfig::new(5, 99)).unwrap();
        assert_eq!(a.assignments, b.assignments);
        assert_eq!(a.centers, b.centers);
    }

    #[test]
    fn dbscan_toy_line() {
        let points = points_1d(&[0.0, 1.0, 2.0, 10.0]);
        let model = dbscan_fit(&points, &DbscanConfig { eps: 1.5, min_pts: 2 }).unwrap();
        assert_eq!(model.assignments, vec![0, 0, 0, -1]);
        assert_eq!(model.cluster_count, 1);
        assert_eq!(model.noise_fraction, 0.25);
    }

    #[test]
    fn dbscan_huge_eps_single_cluster() {
        let mut rng = Rng::seed_from(21);
        let points = random_points(&mut rng, 30, 2, 1.0);
        let model = dbscan_fit(&points, &DbscanConfig { eps: 100.0, min_pts: 1 }).unwrap();
        assert_eq!(model.cluster_count, 1);
        assert_eq!(model.noise_fraction, 0.0);
    }

    #[test]
    fn dbscan_matches_reference_on_random_instances() {
        let mut rng = Rng::seed_from(31);
        for _ in 0..200 {
            let n = 5 + rng.next_below(96) as usize;
            let d = 1 + rng.next_below(3) as usize;
            let points = random_points(&mut rng, n, d, 4.0);
            let config = DbscanConfig {
                eps: rng.next_f64_range(0.05, 2.0),
                min_pts: 1 + rng.next_below(8) as usize,
            };
            let model = dbscan_fit(&points, &config).unwrap();
            let expected = dbscan_reference(&points, config.eps, config.min_pts);
            assert_eq!(
                canonical(&model.assignments),
                canonical(&expected),
                "n={n} config={config:?}"
            );
        }
    }

    #[test]
    fn dbscan_permutation_stable_as_partition() {
        let mut rng = Rng::seed_from(37);
        let n = 60;
        let points = random_points(&mut rng, n, 2, 3.0);
        let config = DbscanConfig { eps: 0.5, min_pts: 3 };
        let base = dbscan_fit(&points, &config).unwrap();

        // random permutation
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.next_below(i as u64 + 1) as usize;
            perm.swap(i, j);
        }
        let permuted_rows: Vec<Vec<f64>> = perm.iter().map(|&i| points.row(i).to_vec()).collect();
        let permuted = Matrix::from_rows(&permuted_rows);
        let shuffled = dbscan_fit(&permuted, &config).unwrap();

        // map back: labels as a partition of the original point set
        let mut back = vec![0i64; n];
        for (new_idx, &orig_idx) in perm.iter().enumerate() {
            back[orig_idx] = shuffled.assignments[new_idx];
        }
        // noise sets identical
        let noise_a: Vec<bool> = base.assignments.iter().map(|&l| l < 0).collect();
        let noise_b: Vec<bool> = back.iter().map(|&l| l < 0).collect();
        assert_eq!(noise_a, noise_b);
        // same-cluster relation identical
        for i in 0..n {
            for j in (i + 1)..n {
                if base.assignments[i] >= 0 && base.assignments[j] >= 0 {
                    assert_eq!(
                        base.assignments[i] == base.assignments[j],
                        back[i] == back[j],
                        "pair ({i},{j})"
                    );
                }
            }
        }
    }

    /// Per-point silhouette oracle with plain nested loops.
    fn silhouette_oracle(points: &Matrix, labels: &[i64]) -> f64 {
        let n = points.n_rows();
        let mut total = 0.0;
        let mut counted = 0;
        for i in 0..n {
            if labels[i] < 0 {
                continue;
            }
            counted += 1;
            let own = labels[i];
            let own_size = labels.iter().filter(|&&l| l == own).count();
            if own_size == 1 {
                continue;
            }
            let a: f64 = (0..n)
                .filter(|&j| j != i && labels[j] == own)
                .map(|j| crate::matrix::euclidean_distance(points.row(i), points.row(j)))
                .sum::<f64>()
                / (own_size - 1) as f64;
            let mut b = f64::INFINITY;
            let other_labels: std::collections::BTreeSet<i64> =
                labels.iter().copied().filter(|&l| l >= 0 && l != own).collect();
            for other in other_labels {
                let members: Vec<usize> = (0..n).filter(|&j| labels[j] == other).collect();
                let mean = members
                    .iter()
                    .map(|&j| crate::matrix::euclidean_distance(points.row(i), points.row(j)))
                    .sum::<f64>()
                    / members.len() as f64;
                b = b.min(mean);
            }
            if a.max(b) > 0.0 {
                total += (b - a) / a.max(b);
            }
        }
        total / counted as f64
    }

    #[test]
    fn silhouette_tight_far_clusters() {
        let points = points_1d(&[0.0, 0.1, 10.0, 10.1]);
        let labels = vec![0, 0, 1, 1];
        let score = silhouette(&points, &labels).unwrap();
        assert!(score > 0.9);
        let oracle = silhouette_oracle(&points, &labels);
        assert!((score - oracle).abs() < 1e-12);
    }

    #[test]
    fn silhouette_single_cluster_undefined() {
        let points = points_1d(&[0.0, 1.0, 2.0]);
        assert!(matches!(
            silhouette(&points, &[0, 0, 0]),
            Err(ClusterError::UndefinedScore)
        ));
        assert!(matches!(
            silhouette(&points, &[-1, -1, 0]),
            Err(ClusterError::UndefinedScore)
        ));
    }

    #[test]
    fn silhouette_matches_oracle_on_random_labelings() {
        let mut rng = Rng::seed_from(43);
        for _ in 0..60 {
            let n = 5 + rng.next_below(60) as usize;
            let d = 1 + rng.next_below(4) as usize;
            let points = random_points(&mut rng, n, d, 5.0);
            let k = 2 + rng.next_below(4) as usize;
            let labels: Vec<i64> = (0..n)
                .map(|_| {
                    if rng.next_f64() < 0.15 {
                        -1
                    } else {
                        rng.next_below(k as u64) as i64
                    }
                })
                .collect();
            let non_noise_clusters: std::collections::BTreeSet<i64> =
                labels.iter().copied().filter(|&l| l >= 0).collect();
            if non_noise_clusters.len() < 2 {
                continue;
            }
            let score = silhouette(&points, &labels).unwrap();
            let oracle = silhouette_oracle(&points, &labels);
            assert!((score - oracle).abs() < 1e-9, "{score} vs {oracle}");
            assert!((-1.0..=1.0).contains(&score));
        }
    }

    #[test]
    fn distribution_fixtures() {
        let d = distribution(&[0, 0, 0, 1]);
        assert_eq!(d.cluster_count, 2);
        assert_eq!(d.largest_fraction, 0.75);
        assert_eq!(d.noise_fraction, 0.0);

        let d = distribution(&[-1, -1, 0, 0]);
        assert_eq!(d.cluster_count, 1);
        assert_eq!(d.largest_fraction, 1.0);
        assert_eq!(d.noise_fraction, 0.5);
    }

    #[test]
    fn distribution_matches_recount() {
        let mut rng = Rng::seed_from(51);
        for _ in 0..50 {
            let n = 1 + rng.next_below(50) as usize;
            let labels: Vec<i64> = (0..n).map(|_| rng.next_range(-1, 4)).collect();
            let d = distribution(&labels);
            let clusters: std::collections::BTreeSet<i64> =
                labels.iter().copied().filter(|&l| l >= 0).collect();
            assert_eq!(d.cluster_count, clusters.len());
        }
    }

    #[test]
    fn grid_has_240_cells() {
        let mut rng = Rng::seed_from(53);
        let points = random_points(&mut rng, 25, 2, 1.0);
        let grid =
            grid_search_dbscan(&points, &default_min_pts_values(), &default_eps_values()).unwrap();
        assert_eq!(grid.len(), 240);
        assert_eq!(grid[0].0, DbscanConfig { eps: 0.1, min_pts: 5 });
        assert_eq!(grid[239].0, DbscanConfig { eps: 1.5, min_pts: 20 });
    }

    #[test]
    fn grid_on_identical_points() {
        let points = Matrix::from_rows(&vec![vec![1.0, 1.0]; 25]);
        let grid =
            grid_search_dbscan(&points, &default_min_pts_values(), &default_eps_values()).unwrap();
        for (config, model) in &grid {
            assert_eq!(model.cluster_count, 1, "{config:?}");
            assert!(model.silhouette.is_none());
        }
    }

    #[test]
    fn grid_recovers_planted_blobs() {
        let mut rng = Rng::seed_from(59);
        let mut rows = Vec::new();
        for _ in 0..30 {
            rows.push(vec![rng.next_f64_range(0.0, 0.2), rng.next_f64_range(0.0, 0.2)]);
        }
        for _ in 0..30 {
            rows.push(vec![rng.next_f64_range(1.0, 1.2), rng.next_f64_range(1.0, 1.2)]);
        }
        let points = Matrix::from_rows(&rows);
        let grid =
            grid_search_dbscan(&points, &default_min_pts_values(), &default_eps_values()).unwrap();
        let found = grid.iter().any(|(_, m)| {
            m.cluster_count == 2
                && m.noise_fraction == 0.0
                && m.assignments[..30].iter().all(|&l| l == m.assignments[0])
                && m.assignments[30..].iter().all(|&l| l == m.assignments[30])
        });
        assert!(found);
    }

    fn candidate(silhouette: Option<f64>, clusters: usize, largest: f64) -> ClusterModel {
        ClusterModel {
            algorithm: ClusterAlgorithm::Dbscan,
            assignments: Vec::new(),
            centers: Vec::new(),
            silhouette,
            cluster_count: clusters,
            largest_fraction: largest,
            noise_fraction: 0.0,
            degenerate: false,
            inertia: None,
            inertia_trace: Vec::new(),
        }
    }

    #[test]
    fn select_prefers_higher_silhouette() {
        let candidates = vec![
            candidate(Some(0.5), 4, 0.4),
            candidate(Some(0.7), 6, 0.5),
        ];
        assert_eq!(select_model(&candidates, &SelectionPolicy::default()).unwrap(), 1);
    }

    #[test]
    fn select_rejects_over_cap() {
        let candidates = vec![candidate(Some(0.9), 31, 0.2)];
        let err = select_model(&candidates, &SelectionPolicy::default()).unwrap_err();
        let ClusterError::NoFeasibleCandidate(diag) = err else {
            panic!()
        };
        assert!(diag.contains("31 clusters > max 30"), "{diag}");
    }

    #[test]
    fn select_tie_breaks_on_fewer_clusters() {
        let candidates = vec![
            candidate(Some(0.6), 9, 0.3),
            candidate(Some(0.6), 5, 0.3),
            candidate(Some(0.6), 5, 0.2),
        ];
        // same silhouette: 5 clusters beat 9; then smaller largest fraction
        assert_eq!(select_model(&candidates, &SelectionPolicy::default()).unwrap(), 2);
    }

    #[test]
    fn select_respects_megacluster_gate() {
        let candidates = vec![
            candidate(Some(0.95), 2, 0.99),
            candidate(Some(0.4), 8, 0.5),
        ];
        assert_eq!(select_model(&candidates, &SelectionPolicy::default()).unwrap(), 1);
    }

    #[test]
    fn select_stable_under_permutation_when_fully_ordered() {
        let a = candidate(Some(0.7), 4, 0.4);
        let b = candidate(Some(0.5), 3, 0.3);
        let c = candidate(Some(0.6), 6, 0.6);
        let forward = vec![a.clone(), b.clone(), c.clone()];
        let backward = vec![c, b, a];
        let i = select_model(&forward, &SelectionPolicy::default()).unwrap();
        let j = select_model(&backward, &SelectionPolicy::default()).unwrap();
        assert_eq!(forward[i].silhouette, backward[j].silhouette);
    }
}
