//! Half-edge multigraphs: configuration-model sampling, vertex removal by
//! degree class or quantile, vertex explosion, and component measurements.
//!
//! Vertex ids stay stable across removal (removed vertices are tombstoned,
//! not compacted), so experiments can correlate pre- and post-removal state.
//! Self-loops and multi-edges are kept; a self-loop contributes 2 to its
//! vertex's degree and counts as one edge.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::degrees::{AlphaSequence, DegreeDistribution};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("degree sum {0} is odd; half-edges cannot be matched")]
    OddDegreeSum(usize),
    #[error("limiting convention asks for {want} removals in degree class {degree}, only {have} present")]
    InfeasibleRemoval {
        degree: usize,
        want: usize,
        have: usize,
    },
    #[error("red vertex {vertex} has degree {degree}, expected 1")]
    RedDegree { vertex: usize, degree: usize },
    #[error("scores cover {have} vertices, graph has {need}")]
    ScoresMismatch { have: usize, need: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexLabel {
    Normal,
    Red,
}

/// Which count the per-class removal quota is based on.
#[derive(Debug, Clone, Copy)]
pub enum RemovalConvention<'a> {
    /// `floor(n_j r_j)` with the empirical class sizes.
    Empirical,
    /// `floor(n p_j r_j)` with the limiting distribution.
    Limiting(&'a DegreeDistribution),
}

/// Which end of the degree order a quantile removal targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantileSide {
    Top,
    Bottom,
}

/// Multigraph stored as matched half-edge pairs.
#[derive(Debug, Clone)]
pub struct HalfEdgeGraph {
    // owner[h] = vertex the half-edge h is attached to.
    owner: Vec<usize>,
    // matching[h] = partner half-edge; an involution with no fixed points.
    matching: Vec<usize>,
    // incident[v] = live half-edges at v; empty for dead vertices.
    incident: Vec<Vec<usize>>,
    alive: Vec<bool>,
    label: Vec<VertexLabel>,
    live: usize,
}

/// Component statistics from a union-find pass.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentSummary {
    pub component_count: usize,
    pub giant_vertices: usize,
    pub giant_edges: usize,
    /// Degree histogram of the largest component (current degrees).
    pub giant_per_degree: BTreeMap<usize, usize>,
    /// All component sizes, descending.
    pub sizes: Vec<usize>,
}

/// Degrees drawn i.i.d. from `p`; if the sum comes out odd, one uniformly
/// chosen vertex gets its degree bumped by 1 (the repair vanishes as n grows).
pub fn sample_degree_sequence(p: &DegreeDistribution, n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let pairs = p.to_pairs();
    let mut cumulative = Vec::with_capacity(pairs.len());
    let mut acc = 0.0;
    for &(j, m) in &pairs {
        acc += m;
        cumulative.push((acc, j));
    }
    let mut degrees = Vec::with_capacity(n);
    let mut sum = 0usize;
    for _ in 0..n {
        let u: f64 = rng.random();
        let j = cumulative
            .iter()
            .find(|&&(c, _)| u < c)
            .map(|&(_, j)| j)
            .unwrap_or(pairs[pairs.len() - 1].0);
        degrees.push(j);
        sum += j;
    }
    if sum % 2 == 1 {
        let idx = rng.random_range(0..n);
        degrees[idx] += 1;
    }
    degrees
}

impl HalfEdgeGraph {
    /// Uniform configuration model on the given degrees: the half-edge array
    /// is shuffled and consecutive entries are paired, which induces the
    /// uniform distribution over perfect matchings.
    pub fn sample(degrees: &[usize], rng: &mut impl Rng) -> Result<Self, GraphError> {
        let total: usize = degrees.iter().sum();
        if total % 2 == 1 {
            return Err(GraphError::OddDegreeSum(total));
        }
        let mut owner = Vec::with_capacity(total);
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); degrees.len()];
        for (v, &d) in degrees.iter().enumerate() {
            for _ in 0..d {
                incident[v].push(owner.len());
                owner.push(v);
            }
        }
        let mut order: Vec<usize> = (0..total).collect();
        order.shuffle(rng);
        let mut matching = vec![0usize; total];
        for pair in order.chunks_exact(2) {
            matching[pair[0]] = pair[1];
            matching[pair[1]] = pair[0];
        }
        Ok(Self {
            owner,
            matching,
            incident,
            alive: vec![true; degrees.len()],
            label: vec![VertexLabel::Normal; degrees.len()],
            live: degrees.len(),
        })
    }

    /// Deterministic construction from an explicit edge list (tests, dumps).
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut owner = Vec::with_capacity(edges.len() * 2);
        let mut matching = Vec::with_capacity(edges.len() * 2);
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(u, v) in edges {
            let h1 = owner.len();
            let h2 = h1 + 1;
            owner.push(u);
            owner.push(v);
            matching.push(h2);
            matching.push(h1);
            incident[u].push(h1);
            incident[v].push(h2);
        }
        Self {
            owner,
            matching,
            incident,
            alive: vec![true; n],
            label: vec![VertexLabel::Normal; n],
            live: n,
        }
    }

    /// Allocated vertex slots, including tombstones.
    pub fn vertex_slots(&self) -> usize {
        self.alive.len()
    }

    pub fn live_count(&self) -> usize {
        self.live
    }

    pub fn is_live(&self, v: usize) -> bool {
        self.alive.get(v).copied().unwrap_or(false)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incident.get(v).map_or(0, Vec::len)
    }

    pub fn label(&self, v: usize) -> VertexLabel {
        self.label[v]
    }

    pub fn live_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.alive.len()).filter(move |&v| self.alive[v])
    }

    /// Live red vertices (explosion output).
    pub fn red_count(&self) -> usize {
        self.live_vertices()
            .filter(|&v| self.label[v] == VertexLabel::Red)
            .count()
    }

    /// Neighbor of `v` across half-edge `h` (which must belong to `v`).
    fn across(&self, h: usize) -> usize {
        self.owner[self.matching[h]]
    }

    /// Live neighbors with multiplicity; a self-loop lists `v` twice.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.incident[v].iter().map(move |&h| self.across(h))
    }

    /// Live edge count; each self-loop counts once.
    pub fn edge_count(&self) -> usize {
        self.live_vertices().map(|v| self.degree(v)).sum::<usize>() / 2
    }

    /// Canonical live edge multiset, sorted `(min, max)` pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for v in self.live_vertices() {
            for &h in &self.incident[v] {
                if h < self.matching[h] {
                    let u = self.across(h);
                    out.push((v.min(u), v.max(u)));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// The half-edge matching as sorted `(h, partner)` pairs with `h < partner`.
    pub fn matching_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.matching.len() / 2);
        for v in self.live_vertices() {
            for &h in &self.incident[v] {
                if h < self.matching[h] {
                    out.push((h, self.matching[h]));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Live degree histogram.
    pub fn degree_histogram(&self) -> BTreeMap<usize, usize> {
        let mut hist = BTreeMap::new();
        for v in self.live_vertices() {
            *hist.entry(self.degree(v)).or_insert(0) += 1;
        }
        hist
    }

    /// Deletes vertices with all incident edges; dead and repeated ids are
    /// ignored.
    pub fn delete_vertices(&mut self, victims: &[usize]) {
        let mut touched: Vec<usize> = Vec::new();
        for &v in victims {
            if !self.alive[v] {
                continue;
            }
            self.alive[v] = false;
            self.live -= 1;
            for &h in &self.incident[v] {
                touched.push(self.owner[self.matching[h]]);
            }
        }
        for &v in victims {
            self.incident[v].clear();
        }
        touched.sort_unstable();
        touched.dedup();
        for u in touched {
            if self.alive[u] {
                let matching = &self.matching;
                let owner = &self.owner;
                let alive = &self.alive;
                self.incident[u].retain(|&h| alive[owner[matching[h]]]);
            }
        }
    }

    /// Replaces each victim of degree d by d red degree-one vertices carrying
    /// its half-edges; the matching is untouched. Degree-one victims are
    /// relabeled in place, so vertex counts follow
    /// `n_after = n + sum (d_v - 1)`.
    pub fn explode_vertices(&mut self, victims: &[usize]) {
        for &v in victims {
            if !self.alive[v] {
                continue;
            }
            match self.degree(v) {
                0 => {
                    self.alive[v] = false;
                    self.live -= 1;
                }
                1 => self.label[v] = VertexLabel::Red,
                _ => {
                    self.alive[v] = false;
                    self.live -= 1;
                    let half_edges = std::mem::take(&mut self.incident[v]);
                    for h in half_edges {
                        let nv = self.alive.len();
                        self.owner[h] = nv;
                        self.alive.push(true);
                        self.label.push(VertexLabel::Red);
                        self.incident.push(vec![h]);
                        self.live += 1;
                    }
                }
            }
        }
    }

    /// Removes all red vertices and their single incident edges. Composing
    /// [`Self::explode_vertices`] with this equals direct deletion.
    pub fn strip_red(&mut self) -> Result<(), GraphError> {
        let red: Vec<usize> = self
            .live_vertices()
            .filter(|&v| self.label[v] == VertexLabel::Red)
            .collect();
        for &v in &red {
            if self.degree(v) != 1 {
                return Err(GraphError::RedDegree {
                    vertex: v,
                    degree: self.degree(v),
                });
            }
        }
        self.delete_vertices(&red);
        Ok(())
    }

    fn degree_classes(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in self.live_vertices() {
            classes.entry(self.degree(v)).or_default().push(v);
        }
        classes
    }

    fn choose(ids: &[usize], quota: usize, rng: &mut impl Rng) -> Vec<usize> {
        rand::seq::index::sample(rng, ids.len(), quota.min(ids.len()))
            .into_iter()
            .map(|i| ids[i])
            .collect()
    }

    /// Per-degree-class removal: `floor(n_j r_j)` (or `floor(n p_j r_j)` under
    /// the limiting convention) vertices of each degree j, chosen uniformly
    /// without replacement. Degrees the sequence does not mention keep their
    /// class intact. Returns the number of removed vertices.
    pub fn remove_by_alpha_sequence(
        &mut self,
        r: &AlphaSequence,
        convention: RemovalConvention,
        rng: &mut impl Rng,
    ) -> Result<usize, GraphError> {
        let n = self.live_count();
        let classes = self.degree_classes();
        let empty = Vec::new();
        let mut victims = Vec::new();
        match convention {
            RemovalConvention::Empirical => {
                for (&degree, ids) in classes.iter().filter(|&(&d, _)| d > 0) {
                    let quota = (ids.len() as f64 * r.fraction(degree)).floor() as usize;
                    victims.extend(Self::choose(ids, quota, rng));
                }
            }
            RemovalConvention::Limiting(p) => {
                // Quotas come from the limiting law, so a class can be asked
                // for more vertices than the sample holds.
                for degree in p.support() {
                    let ids = classes.get(&degree).unwrap_or(&empty);
                    let want = (n as f64 * p.mass(degree) * r.fraction(degree)).floor() as usize;
                    if want > ids.len() {
                        return Err(GraphError::InfeasibleRemoval {
                            degree,
                            want,
                            have: ids.len(),
                        });
                    }
                    victims.extend(Self::choose(ids, want, rng));
                }
            }
        }
        self.delete_vertices(&victims);
        Ok(victims.len())
    }

    /// Removes exactly `floor(alpha n)` vertices of highest (or lowest)
    /// degree, breaking ties inside the boundary class uniformly at random.
    pub fn remove_quantile_fraction(
        &mut self,
        alpha: f64,
        side: QuantileSide,
        rng: &mut impl Rng,
    ) -> usize {
        let quota = (alpha * self.live_count() as f64).floor() as usize;
        let classes = self.degree_classes();
        let ordered: Vec<&Vec<usize>> = match side {
            QuantileSide::Top => classes.values().rev().collect(),
            QuantileSide::Bottom => classes.values().collect(),
        };
        let mut victims = Vec::with_capacity(quota);
        let mut remaining = quota;
        for ids in ordered {
            if remaining == 0 {
                break;
            }
            if ids.len() <= remaining {
                victims.extend_from_slice(ids);
                remaining -= ids.len();
            } else {
                victims.extend(Self::choose(ids, remaining, rng));
                remaining = 0;
            }
        }
        self.delete_vertices(&victims);
        victims.len()
    }

    /// Union-find over the matched pairs of live vertices.
    pub fn components(&self) -> ComponentSummary {
        let n = self.alive.len();
        let mut parent: Vec<usize> = (0..n).collect();
        let mut size = vec![1usize; n];

        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]]; // path halving
                x = parent[x];
            }
            x
        }

        for v in self.live_vertices() {
            for &h in &self.incident[v] {
                let u = self.across(h);
                let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                if ru != rv {
                    if size[ru] < size[rv] {
                        parent[ru] = rv;
                        size[rv] += size[ru];
                    } else {
                        parent[rv] = ru;
                        size[ru] += size[rv];
                    }
                }
            }
        }

        let mut component_sizes: BTreeMap<usize, usize> = BTreeMap::new();
        for v in self.live_vertices() {
            *component_sizes.entry(find(&mut parent, v)).or_insert(0) += 1;
        }
        let mut sizes: Vec<usize> = component_sizes.values().copied().collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));

        let giant_root = component_sizes
            .iter()
            .max_by_key(|&(_, &s)| s)
            .map(|(&root, _)| root);
        let (mut giant_vertices, mut giant_half_edges) = (0usize, 0usize);
        let mut giant_per_degree: BTreeMap<usize, usize> = BTreeMap::new();
        if let Some(root) = giant_root {
            for v in self.live_vertices() {
                if find(&mut parent, v) == root {
                    giant_vertices += 1;
                    giant_half_edges += self.degree(v);
                    *giant_per_degree.entry(self.degree(v)).or_insert(0) += 1;
                }
            }
        }

        ComponentSummary {
            component_count: sizes.len(),
            giant_vertices,
            giant_edges: giant_half_edges / 2,
            giant_per_degree,
            sizes,
        }
    }

    /// Text dump: `v <id> <degree> <label>` lines, then `e <u> <v>` per edge.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for v in self.live_vertices() {
            let label = match self.label[v] {
                VertexLabel::Normal => "normal",
                VertexLabel::Red => "red",
            };
            out.push_str(&format!("v {} {} {}\n", v, self.degree(v), label));
        }
        for (u, v) in self.edges() {
            out.push_str(&format!("e {} {}\n", u, v));
        }
        out
    }
}
