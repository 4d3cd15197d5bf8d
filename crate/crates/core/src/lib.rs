//! Giant components of configuration models under centrality-based vertex
//! removal: closed-form predictions, critical removal thresholds,
//! stochastic-order comparisons, and large-scale Monte Carlo verification.
//!
//! - [`degrees`]: degree laws, removal sequences, dominance machinery
//! - [`theory`]: fixed-point solver, giant fractions, bounds, derivatives
//! - [`graphs`]: half-edge multigraphs, sampling, removal, components
//! - [`centrality`]: local scores, threshold killing, ball digests,
//!   branching-process estimates
//! - [`harness`]: seeded reproducible experiments and reports

pub mod centrality;
pub mod degrees;
pub mod graphs;
pub mod harness;
pub mod rng;
pub mod theory;

pub use centrality::{
    ball_hash, degree_rank_centrality, finite_radius_pagerank, kill_by_threshold,
    killed_ball_consistency_check, local_limit_estimates, BallHash, CentralityScores,
    LocalLimitEstimate, LocalMeasure,
};
pub use degrees::{
    alpha_of, apply_epsilon_transform, bottom_quantile_sequence, decompose_to_transforms,
    dominates, dominating_delta, top_quantile_sequence, AlphaSequence, DegreeDistribution,
    EpsilonTransform, FiniteMeasure,
};
pub use graphs::{
    sample_degree_sequence, ComponentSummary, HalfEdgeGraph, QuantileSide, RemovalConvention,
    VertexLabel,
};
pub use harness::{compare_sequences, run, CompareTable, ExperimentSpec, RemovalSpec, RunReport};
pub use theory::{
    bounds, cm_order_compare, critical_alpha, derivative_report, explode, giant_fractions,
    janson_luczak, nu_r, solve_eta, RemovalMode, TheoryReport, SOLVER_TOL,
};
