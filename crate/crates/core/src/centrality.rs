//! Strictly local centrality scores, threshold killing, rooted-ball digests
//! for empirical local-convergence checks, and the branching-process
//! estimator for the killed local limit.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::degrees::{AlphaSequence, DegreeDistribution};
use crate::graphs::{GraphError, HalfEdgeGraph};

#[derive(Debug, Error)]
pub enum CentralityError {
    #[error("damping factor must lie in (0, 1), got {0}")]
    DampingOutOfRange(f64),
    #[error("kill sequence must be 0/1-valued; degree {degree} has {value}")]
    NotThresholdKill { degree: usize, value: f64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreKind {
    DegreeRank,
    FinitePagerank,
}

/// Per-vertex centrality values; dead vertices hold NaN.
#[derive(Debug, Clone)]
pub struct CentralityScores {
    pub values: Vec<f64>,
    /// Walk/truncation radius of the score's definition (0 for degree rank,
    /// the step count for truncated PageRank). The spanned-ball locality
    /// radius is one more than this; see [`LocalMeasure::radius`].
    pub radius: usize,
    pub kind: ScoreKind,
}

/// Degree centrality as rank/n over live vertices, ties broken by a uniform
/// random permutation. Higher degree means higher score.
pub fn degree_rank_centrality(g: &HalfEdgeGraph, rng: &mut impl Rng) -> CentralityScores {
    let mut order: Vec<(usize, u64, usize)> = g
        .live_vertices()
        .map(|v| (g.degree(v), rng.random::<u64>(), v))
        .collect();
    order.sort_unstable();
    let n = order.len() as f64;
    let mut values = vec![f64::NAN; g.vertex_slots()];
    for (rank, &(_, _, v)) in order.iter().enumerate() {
        values[v] = (rank + 1) as f64 / n;
    }
    CentralityScores {
        values,
        radius: 0,
        kind: ScoreKind::DegreeRank,
    }
}

/// PageRank truncated after `steps` walk steps, graph-normalized so that the
/// mean over vertices is `1 - c^(steps+1)`.
///
/// The walk follows half-edges, so multi-edges weigh with multiplicity and a
/// self-loop returns twice; degree-0 vertices are absorbing.
pub fn finite_radius_pagerank(
    g: &HalfEdgeGraph,
    c: f64,
    steps: usize,
) -> Result<CentralityScores, CentralityError> {
    if !(c > 0.0 && c < 1.0) {
        return Err(CentralityError::DampingOutOfRange(c));
    }
    let slots = g.vertex_slots();
    let mut mass = vec![0.0f64; slots];
    for v in g.live_vertices() {
        mass[v] = 1.0;
    }
    let mut score = vec![0.0f64; slots];
    let mut coeff = 1.0 - c;
    for step in 0..=steps {
        for v in g.live_vertices() {
            score[v] += coeff * mass[v];
        }
        coeff *= c;
        if step == steps {
            break;
        }
        let mut next = vec![0.0f64; slots];
        for v in g.live_vertices() {
            let d = g.degree(v);
            if d == 0 {
                next[v] += mass[v];
            } else {
                let share = mass[v] / d as f64;
                for u in g.neighbors(v) {
                    next[u] += share;
                }
            }
        }
        mass = next;
    }
    let mut values = vec![f64::NAN; slots];
    for v in g.live_vertices() {
        values[v] = score[v];
    }
    Ok(CentralityScores {
        values,
        radius: steps,
        kind: ScoreKind::FinitePagerank,
    })
}

/// Deletes every vertex whose score exceeds `threshold`; returns the number
/// removed.
pub fn kill_by_threshold(
    g: &mut HalfEdgeGraph,
    scores: &CentralityScores,
    threshold: f64,
) -> Result<usize, CentralityError> {
    if scores.values.len() != g.vertex_slots() {
        return Err(GraphError::ScoresMismatch {
            have: scores.values.len(),
            need: g.vertex_slots(),
        }
        .into());
    }
    let victims: Vec<usize> = g
        .live_vertices()
        .filter(|&v| scores.values[v] > threshold)
        .collect();
    g.delete_vertices(&victims);
    Ok(victims.len())
}

/// Digest of a rooted ball under neighborhood refinement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallHash {
    pub digest: u64,
    pub radius: usize,
}

fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

fn fold(acc: u64, v: u64) -> u64 {
    mix(acc ^ mix(v))
}

const DEAD_ROOT_DIGEST: u64 = 0x6465616421; // balls of removed roots all agree

/// Rooted-ball digest: `radius` rounds of hashing sorted neighbor-digest
/// multisets inside the ball, seeded by within-ball degree. Isomorphic balls
/// always collide (exact on trees); distinct balls may too, rarely.
pub fn ball_hash(g: &HalfEdgeGraph, root: usize, radius: usize) -> BallHash {
    if !g.is_live(root) {
        return BallHash {
            digest: DEAD_ROOT_DIGEST,
            radius,
        };
    }
    // Collect the ball by BFS.
    let mut local: HashMap<usize, usize> = HashMap::new();
    let mut members: Vec<usize> = vec![root];
    local.insert(root, 0);
    let mut frontier = vec![root];
    for _ in 0..radius {
        let mut next = Vec::new();
        for &v in &frontier {
            for u in g.neighbors(v) {
                if let std::collections::hash_map::Entry::Vacant(slot) = local.entry(u) {
                    slot.insert(members.len());
                    members.push(u);
                    next.push(u);
                }
            }
        }
        frontier = next;
    }
    // Adjacency of the spanned subgraph, with multiplicity.
    let adjacency: Vec<Vec<usize>> = members
        .iter()
        .map(|&v| {
            g.neighbors(v)
                .filter_map(|u| local.get(&u).copied())
                .collect()
        })
        .collect();
    let mut labels: Vec<u64> = adjacency.iter().map(|a| mix(a.len() as u64)).collect();
    let mut scratch = Vec::new();
    for _ in 0..radius {
        let mut next = Vec::with_capacity(labels.len());
        for (i, adj) in adjacency.iter().enumerate() {
            scratch.clear();
            scratch.extend(adj.iter().map(|&j| labels[j]));
            scratch.sort_unstable();
            let mut h = mix(labels[i]);
            for &s in &scratch {
                h = fold(h, s);
            }
            next.push(h);
        }
        labels = next;
    }
    let mut all = labels.clone();
    all.sort_unstable();
    let mut digest = fold(mix(radius as u64), labels[0]);
    for &s in &all {
        digest = fold(digest, s);
    }
    BallHash { digest, radius }
}

/// A deterministic strictly local score used for threshold killing.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LocalMeasure {
    /// Raw degree.
    DegreeThreshold,
    /// Finite-radius PageRank truncated after `steps` walk steps.
    FinitePagerank { c: f64, steps: usize },
}

impl LocalMeasure {
    /// Locality radius: the smallest `N` such that the score is a function
    /// of the spanned `N`-ball. A vertex's degree is only visible in its
    /// 1-ball, and a `steps`-step walk weighs by degrees of vertices up to
    /// `steps - 1` away, so truncated PageRank needs `steps + 1`.
    pub fn radius(&self) -> usize {
        match self {
            LocalMeasure::DegreeThreshold => 1,
            LocalMeasure::FinitePagerank { steps, .. } => *steps + 1,
        }
    }

    /// Per-vertex score values on live vertices.
    pub fn scores(&self, g: &HalfEdgeGraph) -> Result<Vec<f64>, CentralityError> {
        match self {
            LocalMeasure::DegreeThreshold => {
                let mut values = vec![f64::NAN; g.vertex_slots()];
                for v in g.live_vertices() {
                    values[v] = g.degree(v) as f64;
                }
                Ok(values)
            }
            LocalMeasure::FinitePagerank { c, steps } => {
                Ok(finite_radius_pagerank(g, *c, *steps)?.values)
            }
        }
    }

    /// The killed graph `G(R, r)`.
    pub fn killed(
        &self,
        g: &HalfEdgeGraph,
        threshold: f64,
    ) -> Result<HalfEdgeGraph, CentralityError> {
        let scores = self.scores(g)?;
        let mut killed = g.clone();
        let victims: Vec<usize> = killed
            .live_vertices()
            .filter(|&v| scores[v] > threshold)
            .collect();
        killed.delete_vertices(&victims);
        Ok(killed)
    }
}

/// Result of checking that equal wide balls imply equal killed balls.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub pairs_sampled: usize,
    /// Pairs whose `(2N + l)`-ball digests agreed.
    pub digest_matches: usize,
    /// Matched pairs whose killed `l`-ball digests disagreed; must be 0 up to
    /// hash collisions.
    pub violations: usize,
}

/// Over sampled vertex pairs: whenever the `(2N + l)`-balls around the pair
/// hash equal in `g`, the `l`-balls in the killed graph must hash equal too
/// (a removed root is its own digest class).
pub fn killed_ball_consistency_check(
    g: &HalfEdgeGraph,
    measure: LocalMeasure,
    threshold: f64,
    probe_radius: usize,
    pairs: usize,
    rng: &mut impl Rng,
) -> Result<ConsistencyReport, CentralityError> {
    let killed = measure.killed(g, threshold)?;
    let wide = 2 * measure.radius() + probe_radius;
    let live: Vec<usize> = g.live_vertices().collect();
    let mut digest_matches = 0;
    let mut violations = 0;
    if live.len() < 2 {
        return Ok(ConsistencyReport {
            pairs_sampled: 0,
            digest_matches,
            violations,
        });
    }
    let mut wide_cache: HashMap<usize, u64> = HashMap::new();
    let mut killed_cache: HashMap<usize, u64> = HashMap::new();
    for _ in 0..pairs {
        let a = live[rng.random_range(0..live.len())];
        let b = live[rng.random_range(0..live.len())];
        if a == b {
            continue;
        }
        let da = *wide_cache
            .entry(a)
            .or_insert_with(|| ball_hash(g, a, wide).digest);
        let db = *wide_cache
            .entry(b)
            .or_insert_with(|| ball_hash(g, b, wide).digest);
        if da != db {
            continue;
        }
        digest_matches += 1;
        let ka = *killed_cache
            .entry(a)
            .or_insert_with(|| ball_hash(&killed, a, probe_radius).digest);
        let kb = *killed_cache
            .entry(b)
            .or_insert_with(|| ball_hash(&killed, b, probe_radius).digest);
        if ka != kb {
            violations += 1;
        }
    }
    Ok(ConsistencyReport {
        pairs_sampled: pairs,
        digest_matches,
        violations,
    })
}

/// Monte Carlo estimates of the killed local limit's survival probability
/// and expected inverse component size.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocalLimitEstimate {
    pub zeta: f64,
    pub zeta_stderr: f64,
    pub inv_component_mean: f64,
    pub inv_stderr: f64,
    pub cutoff: usize,
    pub samples: usize,
}

/// Grows the killed unimodular branching process: root degree from `p`,
/// offspring degrees from the size-biased law, vertices of killed degrees
/// removed. Components exceeding `cutoff` count as surviving, which biases
/// `zeta` up and the inverse-size mean down by the mass of finite components
/// larger than `cutoff`; both shrink as `cutoff` grows.
///
/// A killed root contributes 0 to both functionals: a removed vertex belongs
/// to no component of the killed graph.
pub fn local_limit_estimates(
    p: &DegreeDistribution,
    kill: &AlphaSequence,
    cutoff: usize,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<LocalLimitEstimate, CentralityError> {
    let mut killed_degree = vec![false; p.d_max() + 1];
    for j in p.support() {
        let v = kill.fraction(j); // degrees the sequence omits are kept
        if v != 0.0 && v != 1.0 {
            return Err(CentralityError::NotThresholdKill {
                degree: j,
                value: v,
            });
        }
        killed_degree[j] = v == 1.0;
    }
    let pairs = p.to_pairs();
    let mean = p.mean();
    let mut root_cdf = Vec::with_capacity(pairs.len());
    let mut biased_cdf = Vec::with_capacity(pairs.len());
    let (mut acc_root, mut acc_biased) = (0.0, 0.0);
    for &(j, m) in &pairs {
        acc_root += m;
        acc_biased += j as f64 * m / mean;
        root_cdf.push((acc_root, j));
        biased_cdf.push((acc_biased, j));
    }
    fn draw(cdf: &[(f64, usize)], rng: &mut impl Rng) -> usize {
        let u: f64 = rng.random();
        cdf.iter()
            .find(|&&(c, _)| u < c)
            .map(|&(_, j)| j)
            .unwrap_or(cdf[cdf.len() - 1].1)
    }

    let mut survivors = 0usize;
    let mut inv_sum = 0.0f64;
    let mut inv_sq_sum = 0.0f64;
    for _ in 0..samples {
        let root = draw(&root_cdf, rng);
        if killed_degree[root] {
            continue; // removed root: 0 to both functionals
        }
        let mut size = 1usize;
        let mut open_edges = root as u64;
        let mut surviving = false;
        while open_edges > 0 {
            open_edges -= 1;
            let j = draw(&biased_cdf, rng);
            if !killed_degree[j] {
                size += 1;
                open_edges += (j - 1) as u64;
                if size > cutoff {
                    surviving = true;
                    break;
                }
            }
        }
        if surviving {
            survivors += 1;
        } else {
            let x = 1.0 / size as f64;
            inv_sum += x;
            inv_sq_sum += x * x;
        }
    }
    let n = samples as f64;
    let zeta = survivors as f64 / n;
    let inv_mean = inv_sum / n;
    let inv_var = (inv_sq_sum / n - inv_mean * inv_mean).max(0.0);
    Ok(LocalLimitEstimate {
        zeta,
        zeta_stderr: (zeta * (1.0 - zeta) / n).sqrt(),
        inv_component_mean: inv_mean,
        inv_stderr: (inv_var / n).sqrt(),
        cutoff,
        samples,
    })
}
