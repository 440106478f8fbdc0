//! Random walks driven by the transition matrix `P[i, j] = w(i, j) / d_i`.
//!
//! Randomness is keyed: a [`RandomSource`] is a `(seed, stream)` pair and
//! every batch of [`TRIAL_BATCH`] trials draws from its own derived stream.
//! Integer hit counts from different batches are summed, so the result of a
//! trial loop does not depend on how batches are spread over workers.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::distr::Distribution;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::graph::WeightedGraph;

/// Trials per derived stream.
pub const TRIAL_BATCH: u64 = 4096;

/// Degree above which the cumulative scan switches to compensated summation.
pub const COMPENSATED_SCAN_DEGREE: usize = 1000;

/// Seed plus stream id; equal sources produce identical draws everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RandomSource {
    pub seed: u64,
    pub stream: u64,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self { seed, stream: 0 }
    }

    /// Independent sub-stream identified by `tag`.
    pub fn child(&self, tag: u64) -> Self {
        Self {
            seed: self.seed,
            stream: splitmix64(self.stream ^ splitmix64(tag)),
        }
    }

    /// Sub-stream identified by a tuple of indices.
    pub fn descend(&self, tags: &[u64]) -> Self {
        tags.iter().fold(*self, |s, &t| s.child(t))
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Result of a hit-probability estimate: `hits / trials`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HitEstimate {
    pub value: f64,
    pub hits: u64,
    pub trials: u64,
    /// Hoeffding radius `√(ln(2/ζ) / (2r))`.
    pub radius: f64,
    pub zeta: f64,
}

/// Two-sided Hoeffding radius for `trials` samples in `[0, 1]` at failure budget `zeta`.
pub fn hoeffding_radius(trials: u64, zeta: f64) -> f64 {
    ((2.0 / zeta).ln() / (2.0 * trials as f64)).sqrt()
}

/// Neighbor choice by one uniform draw and a running cumulative sum.
/// Uses `O(1)` scratch regardless of degree.
pub(crate) fn scan_pick(g: &WeightedGraph, v: usize, u: f64) -> usize {
    let list = g.neighbors(v);
    let target = u * g.degree(v);
    if list.len() > COMPENSATED_SCAN_DEGREE {
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for &(j, w) in list {
            let t = sum + w;
            comp += if sum.abs() >= w.abs() { (sum - t) + w } else { (w - t) + sum };
            sum = t;
            if sum + comp > target {
                return j;
            }
        }
    } else {
        let mut sum = 0.0;
        for &(j, w) in list {
            sum += w;
            if sum > target {
                return j;
            }
        }
    }
    list.last().map(|&(j, _)| j).unwrap_or(v)
}

/// Step sampler over a fixed graph.
pub struct WalkEngine<'g> {
    graph: &'g WeightedGraph,
    alias: Option<Vec<WeightedAliasIndex<f64>>>,
}

impl<'g> WalkEngine<'g> {
    /// Linear-scan sampling; the auditable path.
    pub fn scan(graph: &'g WeightedGraph) -> Result<Self> {
        graph.check_no_isolated()?;
        Ok(Self { graph, alias: None })
    }

    /// Alias-table sampling: `O(1)` per step, `O(|E|)` tables.
    pub fn alias(graph: &'g WeightedGraph) -> Result<Self> {
        graph.check_no_isolated()?;
        let tables = (0..graph.n())
            .map(|v| {
                let w: Vec<f64> = graph.neighbors(v).iter().map(|&(_, w)| w).collect();
                WeightedAliasIndex::new(w).map_err(|e| domain(format!("alias table: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            graph,
            alias: Some(tables),
        })
    }

    /// Alias tables pay off only when some vertex has many neighbors.
    pub fn auto(graph: &'g WeightedGraph) -> Result<Self> {
        let max_deg = (0..graph.n()).map(|v| graph.neighbors(v).len()).max().unwrap_or(0);
        if max_deg > 16 {
            Self::alias(graph)
        } else {
            Self::scan(graph)
        }
    }

    pub fn graph(&self) -> &'g WeightedGraph {
        self.graph
    }

    #[inline]
    pub fn step<R: RngCore>(&self, v: usize, rng: &mut R) -> usize {
        match &self.alias {
            Some(tables) => self.graph.neighbors(v)[tables[v].sample(rng)].0,
            None => scan_pick(self.graph, v, rng.random::<f64>()),
        }
    }

    pub fn walk<R: RngCore>(&self, start: usize, k: u64, rng: &mut R) -> usize {
        (0..k).fold(start, |v, _| self.step(v, rng))
    }

    /// `counts[s][v]`: how many of `trials` walks from `start` sit on `v`
    /// after `s` steps, for `s = 0..=max_k`. One walk of length `max_k`
    /// serves every prefix length.
    pub fn occupancy(
        &self,
        start: usize,
        max_k: usize,
        trials: u64,
        source: &RandomSource,
        workers: usize,
    ) -> Vec<Vec<u64>> {
        let n = self.graph.n();
        let job = |batch: u64, len: u64| {
            let mut counts = vec![vec![0u64; n]; max_k + 1];
            let mut rng = source.child(batch).rng();
            for _ in 0..len {
                let mut v = start;
                counts[0][v] += 1;
                for row in counts.iter_mut().skip(1) {
                    v = self.step(v, &mut rng);
                    row[v] += 1;
                }
            }
            counts
        };
        batched(trials, workers, job, |mut a, b| {
            for (ra, rb) in a.iter_mut().zip(b) {
                for (x, y) in ra.iter_mut().zip(rb) {
                    *x += y;
                }
            }
            a
        })
        .unwrap_or_else(|| vec![vec![0; n]; max_k + 1])
    }
}

/// One step from `v`: neighbor `j` with probability `w(v, j) / d_v`.
pub fn walk_step<R: RngCore>(g: &WeightedGraph, v: usize, rng: &mut R) -> Result<usize> {
    if g.degree(v) <= 0.0 {
        return Err(Error::IsolatedVertex(v));
    }
    Ok(scan_pick(g, v, rng.random::<f64>()))
}

/// Endpoint of a `k`-step walk from `start`.
pub fn walk_k<R: RngCore>(g: &WeightedGraph, start: usize, k: u64, rng: &mut R) -> Result<usize> {
    let mut v = start;
    for _ in 0..k {
        v = walk_step(g, v, rng)?;
    }
    Ok(v)
}

/// Fraction of `trials` walks of length `k` from `start` that end on `target`.
pub fn hit_prob_estimate(
    g: &WeightedGraph,
    start: usize,
    target: usize,
    k: u64,
    trials: u64,
    zeta: f64,
    source: &RandomSource,
    workers: usize,
) -> Result<HitEstimate> {
    if trials == 0 {
        return Err(domain("at least one trial is required"));
    }
    if !(zeta > 0.0 && zeta < 1.0) {
        return Err(domain(format!("failure budget {zeta} outside (0, 1)")));
    }
    for v in [start, target] {
        if v >= g.n() {
            return Err(Error::Index { index: v, n: g.n() });
        }
    }
    if k > 0 {
        g.check_no_isolated()?;
    }
    let engine = WalkEngine { graph: g, alias: None };
    let hits = batched(
        trials,
        workers,
        |batch, len| {
            let mut rng = source.child(batch).rng();
            (0..len)
                .filter(|_| engine.walk(start, k, &mut rng) == target)
                .count() as u64
        },
        |a, b| a + b,
    )
    .unwrap_or(0);
    Ok(HitEstimate {
        value: hits as f64 / trials as f64,
        hits,
        trials,
        radius: hoeffding_radius(trials, zeta),
        zeta,
    })
}

fn pool(workers: usize) -> Arc<rayon::ThreadPool> {
    static POOLS: OnceLock<Mutex<HashMap<usize, Arc<rayon::ThreadPool>>>> = OnceLock::new();
    let mut pools = POOLS.get_or_init(Default::default).lock().unwrap();
    pools
        .entry(workers)
        .or_insert_with(|| {
            Arc::new(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .build()
                    .expect("thread pool"),
            )
        })
        .clone()
}

/// Split `trials` into [`TRIAL_BATCH`]-sized batches, run `job(batch_index,
/// batch_len)` on each and fold the results with `combine`. `combine` must
/// be associative and commutative for the result to be worker-independent.
pub(crate) fn batched<T, F, C>(trials: u64, workers: usize, job: F, combine: C) -> Option<T>
where
    T: Send,
    F: Fn(u64, u64) -> T + Sync + Send,
    C: Fn(T, T) -> T + Sync + Send,
{
    let batches = trials.div_ceil(TRIAL_BATCH);
    let len = |b: u64| TRIAL_BATCH.min(trials - b * TRIAL_BATCH);
    if workers <= 1 || batches <= 1 {
        (0..batches).map(|b| job(b, len(b))).reduce(&combine)
    } else {
        pool(workers).install(|| {
            (0..batches)
                .into_par_iter()
                .map(|b| job(b, len(b)))
                .reduce_with(&combine)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators::*;

    fn tv(empirical: &[u64], exact: &[f64]) -> f64 {
        let total: u64 = empirical.iter().sum();
        empirical
            .iter()
            .zip(exact)
            .map(|(&c, &p)| (c as f64 / total as f64 - p).abs())
            .sum::<f64>()
            / 2.0
    }

    #[test]
    fn k2_step_is_deterministic() {
        let g = complete(2);
        let mut rng = RandomSource::new(1).rng();
        for _ in 0..100 {
            assert_eq!(walk_step(&g, 0, &mut rng).unwrap(), 1);
        }
    }

    #[test]
    fn weighted_step_frequencies() {
        let g = WeightedGraph::from_edges(3, &[(0, 1, 3.0), (0, 2, 1.0)]).unwrap();
        let mut rng = RandomSource::new(2).rng();
        let mut counts = [0u64; 3];
        for _ in 0..100_000 {
            counts[walk_step(&g, 0, &mut rng).unwrap()] += 1;
        }
        assert!(tv(&counts, &[0.0, 0.75, 0.25]) < 0.02);
    }

    #[test]
    fn triangle_step_is_uniform_over_neighbors() {
        let g = complete(3);
        let mut rng = RandomSource::new(3).rng();
        let mut counts = [0u64; 3];
        for _ in 0..100_000 {
            counts[walk_step(&g, 0, &mut rng).unwrap()] += 1;
        }
        assert_eq!(counts[0], 0);
        assert!(tv(&counts, &[0.0, 0.5, 0.5]) < 0.02);
    }

    #[test]
    fn isolated_vertex_is_rejected() {
        let g = WeightedGraph::from_edges(3, &[(0, 1, 1.0)]).unwrap();
        let mut rng = RandomSource::new(0).rng();
        assert_eq!(walk_step(&g, 2, &mut rng), Err(Error::IsolatedVertex(2)));
        assert_eq!(walk_k(&g, 2, 0, &mut rng), Ok(2));
    }

    #[test]
    fn walk_k_examples() {
        let mut rng = RandomSource::new(4).rng();
        assert_eq!(walk_k(&cycle(5), 3, 0, &mut rng).unwrap(), 3);
        for _ in 0..50 {
            assert_eq!(walk_k(&complete(2), 0, 2, &mut rng).unwrap(), 0);
        }
        let p3 = path(3);
        let mut counts = [0u64; 3];
        for _ in 0..100_000 {
            counts[walk_k(&p3, 0, 2, &mut rng).unwrap()] += 1;
        }
        assert_eq!(counts[1], 0);
        assert!(tv(&counts, &[0.5, 0.0, 0.5]) < 0.02);
    }

    #[test]
    fn hit_estimate_examples() {
        let src = RandomSource::new(5);
        let k2 = complete(2);
        let one = hit_prob_estimate(&k2, 0, 1, 1, 1000, 0.05, &src, 1).unwrap();
        assert_eq!(one.value, 1.0);
        let zero = hit_prob_estimate(&k2, 0, 1, 2, 1000, 0.05, &src, 1).unwrap();
        assert_eq!(zero.value, 0.0);
        let k3 = hit_prob_estimate(&complete(3), 0, 0, 2, 100_000, 0.05, &src, 1).unwrap();
        assert!((k3.value - 0.5).abs() < 0.01);
        assert_eq!(k3.value, k3.hits as f64 / 100_000.0);
        assert!((k3.radius - ((2.0f64 / 0.05).ln() / 2e5).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn hit_estimate_is_worker_independent() {
        let g = connected_erdos_renyi(12, 0.3, 0.5, 2.0, 9);
        let src = RandomSource::new(11);
        let a = hit_prob_estimate(&g, 0, 3, 4, 50_000, 0.1, &src, 1).unwrap();
        let b = hit_prob_estimate(&g, 0, 3, 4, 50_000, 0.1, &src, 4).unwrap();
        let c = hit_prob_estimate(&g, 0, 3, 4, 50_000, 0.1, &src, 1).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn occupancy_matches_single_endpoint_counts() {
        let g = cycle(6);
        let engine = WalkEngine::scan(&g).unwrap();
        let src = RandomSource::new(12);
        let occ = engine.occupancy(0, 4, 10_000, &src, 1);
        assert_eq!(occ[0][0], 10_000);
        for row in &occ {
            assert_eq!(row.iter().sum::<u64>(), 10_000);
        }
        assert_eq!(occ, engine.occupancy(0, 4, 10_000, &src, 3));
    }

    #[test]
    fn alias_and_scan_agree_in_law() {
        let g = star(40);
        let scan = WalkEngine::scan(&g).unwrap();
        let alias = WalkEngine::alias(&g).unwrap();
        let src = RandomSource::new(13);
        let a = scan.occupancy(0, 1, 100_000, &src, 1);
        let b = alias.occupancy(0, 1, 100_000, &src, 1);
        let exact: Vec<f64> = (0..41).map(|j| if j == 0 { 0.0 } else { 1.0 / 40.0 }).collect();
        assert!(tv(&a[1], &exact) < 0.02);
        assert!(tv(&b[1], &exact) < 0.02);
    }

    #[test]
    fn compensated_scan_reaches_every_neighbor() {
        let g = star(1500);
        assert_eq!(scan_pick(&g, 0, 0.0), 1);
        assert_eq!(scan_pick(&g, 0, 0.999_999_999), 1500);
        assert_eq!(scan_pick(&g, 0, 0.5), 751);
    }

    #[test]
    fn children_are_distinct_and_stable() {
        let s = RandomSource::new(7);
        assert_ne!(s.child(0), s.child(1));
        assert_eq!(s.child(3), s.child(3));
        assert_eq!(s.descend(&[1, 2]), s.child(1).child(2));
        let mut a = s.rng();
        let mut b = s.rng();
        assert_eq!(a.next_u64(), b.next_u64());
    }
}
