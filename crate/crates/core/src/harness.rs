//! Experiment runner binding the closed-form predictions to simulation:
//! JSON-specified experiments, seeded parallel replicas, CSV/JSON reports.
//!
//! Replicas draw from per-replica RNG streams, so output is byte-identical
//! for a given spec and seed regardless of thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::centrality::{finite_radius_pagerank, kill_by_threshold, CentralityError};
use crate::degrees::{alpha_of, dominates, AlphaSequence, DegreeDistribution, DegreesError};
use crate::graphs::{
    sample_degree_sequence, GraphError, HalfEdgeGraph, QuantileSide, RemovalConvention,
};
use crate::rng::{stream, Purpose};
use crate::theory::{giant_fractions, TheoryError, TheoryReport, SOLVER_TOL};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("n_grid must be non-empty and strictly increasing")]
    BadGrid,
    #[error("replicas must be at least 1")]
    NoReplicas,
    #[error("alpha {0} outside [0, 1]")]
    BadAlpha(f64),
    #[error("sequences disagree on removal mass: {0} vs {1}")]
    MixedAlpha(f64, f64),
    #[error("no sequences to compare")]
    NothingToCompare,
    #[error(transparent)]
    Degrees(#[from] DegreesError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Centrality(#[from] CentralityError),
}

/// How vertices are removed in an experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RemovalSpec {
    /// Per-degree-class fractions.
    AlphaSequence {
        r: AlphaSequence,
        /// Quotas `floor(n p_j r_j)` instead of the default `floor(n_j r_j)`.
        #[serde(default)]
        limiting: bool,
    },
    /// Highest-degree `alpha` proportion.
    Top { alpha: f64 },
    /// Lowest-degree `alpha` proportion.
    Bottom { alpha: f64 },
    /// Degree-independent fraction `alpha`.
    Uniform { alpha: f64 },
    /// Threshold kill on finite-radius PageRank scores.
    Pagerank {
        c: f64,
        steps: usize,
        threshold: f64,
    },
}

impl RemovalSpec {
    /// The removal sequence this spec converges to, when degree-class based.
    pub fn theory_sequence(
        &self,
        p: &DegreeDistribution,
    ) -> Result<Option<AlphaSequence>, HarnessError> {
        let quantile = |alpha: f64, top: bool| -> Result<AlphaSequence, HarnessError> {
            if !(0.0..=1.0).contains(&alpha) {
                return Err(HarnessError::BadAlpha(alpha));
            }
            Ok(if alpha == 0.0 {
                AlphaSequence::zeros(p.d_max())
            } else if alpha == 1.0 {
                AlphaSequence::ones(p.d_max())
            } else if top {
                crate::degrees::top_quantile_sequence(p, alpha)?.0
            } else {
                crate::degrees::bottom_quantile_sequence(p, alpha)?.0
            })
        };
        Ok(match self {
            RemovalSpec::AlphaSequence { r, .. } => Some(r.clone()),
            RemovalSpec::Top { alpha } => Some(quantile(*alpha, true)?),
            RemovalSpec::Bottom { alpha } => Some(quantile(*alpha, false)?),
            RemovalSpec::Uniform { alpha } => Some(AlphaSequence::uniform(*alpha, p.d_max())?),
            RemovalSpec::Pagerank { .. } => None,
        })
    }
}

/// One experiment: a distribution, a removal rule, and a grid of graph sizes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub p: DegreeDistribution,
    pub removal: RemovalSpec,
    pub n_grid: Vec<usize>,
    pub replicas: usize,
    pub seed: u64,
    /// Optional CSV output path, consumed by the CLI.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.n_grid.is_empty() || self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(HarnessError::BadGrid);
        }
        if self.replicas == 0 {
            return Err(HarnessError::NoReplicas);
        }
        Ok(())
    }
}

/// One sampled graph's measurements.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRow {
    pub n: usize,
    pub replica: usize,
    /// Derived RNG stream key for this replica.
    pub stream: u64,
    /// Fraction of vertices actually removed.
    pub removed_fraction: f64,
    pub component_count: usize,
    pub giant_vertices: usize,
    pub giant_edges: usize,
}

/// Gap between empirical means and the closed-form prediction at one n.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Deviation {
    pub n: usize,
    pub v_gap: f64,
    pub e_gap: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub rows: Vec<RunRow>,
    pub theory: Option<TheoryReport>,
    pub deviations: Vec<Deviation>,
}

fn simulate_one(
    p: &DegreeDistribution,
    removal: &RemovalSpec,
    n: usize,
    seed: u64,
    replica_key: u64,
) -> Result<(usize, crate::graphs::ComponentSummary), HarnessError> {
    let degrees = sample_degree_sequence(
        p,
        n,
        &mut stream(seed, replica_key, Purpose::DegreeSampling),
    );
    let max_degree = degrees.iter().copied().max().unwrap_or(1);
    let mut g = HalfEdgeGraph::sample(&degrees, &mut stream(seed, replica_key, Purpose::Matching))?;
    let mut removal_rng = stream(seed, replica_key, Purpose::Removal);
    let removed = match removal {
        RemovalSpec::AlphaSequence { r, limiting } => {
            let convention = if *limiting {
                RemovalConvention::Limiting(p)
            } else {
                RemovalConvention::Empirical
            };
            g.remove_by_alpha_sequence(r, convention, &mut removal_rng)?
        }
        RemovalSpec::Uniform { alpha } => {
            let r = AlphaSequence::uniform(*alpha, max_degree)?;
            g.remove_by_alpha_sequence(&r, RemovalConvention::Empirical, &mut removal_rng)?
        }
        RemovalSpec::Top { alpha } => {
            g.remove_quantile_fraction(*alpha, QuantileSide::Top, &mut removal_rng)
        }
        RemovalSpec::Bottom { alpha } => {
            g.remove_quantile_fraction(*alpha, QuantileSide::Bottom, &mut removal_rng)
        }
        RemovalSpec::Pagerank {
            c,
            steps,
            threshold,
        } => {
            let scores = finite_radius_pagerank(&g, *c, *steps)?;
            kill_by_threshold(&mut g, &scores, *threshold)?
        }
    };
    Ok((removed, g.components()))
}

/// Runs the experiment: every `(n, replica)` cell independently in parallel,
/// with the closed-form prediction attached when the removal is
/// degree-class based.
pub fn run(spec: &ExperimentSpec) -> Result<RunReport, HarnessError> {
    spec.validate()?;
    let theory = match spec.removal.theory_sequence(&spec.p)? {
        Some(r) => Some(giant_fractions(&spec.p, &r, SOLVER_TOL)?),
        None => None,
    };
    let jobs: Vec<(usize, usize)> = (0..spec.n_grid.len())
        .flat_map(|ni| (0..spec.replicas).map(move |rep| (ni, rep)))
        .collect();
    let rows: Result<Vec<RunRow>, HarnessError> = jobs
        .par_iter()
        .map(|&(ni, rep)| {
            let n = spec.n_grid[ni];
            let key = (ni * spec.replicas + rep) as u64;
            let (removed, summary) = simulate_one(&spec.p, &spec.removal, n, spec.seed, key)?;
            Ok(RunRow {
                n,
                replica: rep,
                stream: key,
                removed_fraction: removed as f64 / n as f64,
                component_count: summary.component_count,
                giant_vertices: summary.giant_vertices,
                giant_edges: summary.giant_edges,
            })
        })
        .collect();
    let mut rows = rows?;
    rows.sort_by_key(|row| (row.n, row.replica));

    let mut deviations = Vec::new();
    if let Some(theory) = &theory {
        for &n in &spec.n_grid {
            let group: Vec<&RunRow> = rows.iter().filter(|row| row.n == n).collect();
            let count = group.len() as f64;
            let v_mean: f64 = group
                .iter()
                .map(|row| row.giant_vertices as f64 / row.n as f64)
                .sum::<f64>()
                / count;
            let e_mean: f64 = group
                .iter()
                .map(|row| row.giant_edges as f64 / row.n as f64)
                .sum::<f64>()
                / count;
            deviations.push(Deviation {
                n,
                v_gap: (v_mean - theory.rho).abs(),
                e_gap: (e_mean - theory.e).abs(),
            });
        }
    }
    Ok(RunReport {
        rows,
        theory,
        deviations,
    })
}

/// CSV rendering with the fixed header `n,alpha,seed,K,v_giant,e_giant`.
/// `alpha` is the removed fraction of the row; `seed` is the replica stream.
pub fn report_csv(report: &RunReport) -> String {
    let mut out = String::from("n,alpha,seed,K,v_giant,e_giant\n");
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.n,
            row.removed_fraction,
            row.stream,
            row.component_count,
            row.giant_vertices,
            row.giant_edges
        ));
    }
    out
}

/// One compared sequence: prediction plus empirical means.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompareRow {
    pub index: usize,
    pub alpha: f64,
    pub rho_theory: f64,
    pub e_theory: f64,
    pub v_mean: f64,
    pub e_mean: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompareTable {
    /// Rows sorted by predicted giant size, smallest first.
    pub rows: Vec<CompareRow>,
    /// Dominance-order violations among the predictions; empty on success.
    pub violations: Vec<String>,
}

/// Compares equal-alpha removal sequences: theory side exactly, empirical
/// side by seeded replicas, and asserts the dominance ordering of every
/// comparable pair.
pub fn compare_sequences(
    p: &DegreeDistribution,
    sequences: &[AlphaSequence],
    n: usize,
    replicas: usize,
    seed: u64,
) -> Result<CompareTable, HarnessError> {
    if sequences.is_empty() {
        return Err(HarnessError::NothingToCompare);
    }
    let alpha0 = alpha_of(p, &sequences[0]);
    for r in sequences {
        let a = alpha_of(p, r);
        if (a - alpha0).abs() > 1e-9 {
            return Err(HarnessError::MixedAlpha(alpha0, a));
        }
    }
    let jobs: Vec<(usize, usize)> = (0..sequences.len())
        .flat_map(|si| (0..replicas).map(move |rep| (si, rep)))
        .collect();
    let sums: Result<Vec<(usize, f64, f64)>, HarnessError> = jobs
        .par_iter()
        .map(|&(si, rep)| {
            let key = (si * replicas + rep) as u64;
            let removal = RemovalSpec::AlphaSequence {
                r: sequences[si].clone(),
                limiting: false,
            };
            let (_, summary) = simulate_one(p, &removal, n, seed, key)?;
            Ok((
                si,
                summary.giant_vertices as f64 / n as f64,
                summary.giant_edges as f64 / n as f64,
            ))
        })
        .collect();
    let sums = sums?;

    let mut rows = Vec::new();
    for (si, r) in sequences.iter().enumerate() {
        let theory = giant_fractions(p, r, SOLVER_TOL)?;
        let mine: Vec<&(usize, f64, f64)> = sums.iter().filter(|&&(s, _, _)| s == si).collect();
        let count = mine.len() as f64;
        rows.push(CompareRow {
            index: si,
            alpha: alpha_of(p, r),
            rho_theory: theory.rho,
            e_theory: theory.e,
            v_mean: mine.iter().map(|&&(_, v, _)| v).sum::<f64>() / count,
            e_mean: mine.iter().map(|&&(_, _, e)| e).sum::<f64>() / count,
        });
    }

    let mut violations = Vec::new();
    for i in 0..sequences.len() {
        for j in 0..sequences.len() {
            if i == j || !dominates(p, &sequences[i], &sequences[j]) {
                continue;
            }
            // sequences[i] ≼_p sequences[j]: the dominating removal destroys
            // more, so its giant must be no larger.
            let (rho_i, rho_j) = (rows[i].rho_theory, rows[j].rho_theory);
            if rho_j > rho_i + 1e-9 {
                violations.push(format!(
                    "rho ordering violated: seq {j} dominates seq {i} but rho {rho_j} > {rho_i}"
                ));
            }
            let (e_i, e_j) = (rows[i].e_theory, rows[j].e_theory);
            if e_j > e_i + 1e-9 {
                violations.push(format!(
                    "edge ordering violated between seq {i} and seq {j}: {e_j} > {e_i}"
                ));
            }
        }
    }
    rows.sort_by(|a, b| a.rho_theory.total_cmp(&b.rho_theory));
    Ok(CompareTable { rows, violations })
}
