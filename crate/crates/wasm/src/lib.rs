//! Browser bindings for the demo page: removal curves over alpha, a full
//! prediction for one removal sequence, and a small in-browser simulation.
//!
//! Every function takes and returns JSON strings; errors come back as
//! `{"error": "..."}` so the page can surface them without unwinding.

use serde::Serialize;
use wasm_bindgen::prelude::wasm_bindgen;

use cmkill::degrees::{alpha_of, AlphaSequence, DegreeDistribution};
use cmkill::graphs::{sample_degree_sequence, HalfEdgeGraph, QuantileSide, RemovalConvention};
use cmkill::harness::RemovalSpec;
use cmkill::rng::{stream, Purpose};
use cmkill::theory::{critical_alpha, giant_fractions, RemovalMode, SOLVER_TOL};

fn fail(e: impl std::fmt::Display) -> String {
    serde_json::json!({ "error": e.to_string() }).to_string()
}

#[derive(Serialize)]
struct CurvePoint {
    alpha: f64,
    nu_r: f64,
    rho: f64,
    e: f64,
}

#[derive(Serialize)]
struct ModeCurve {
    mode: RemovalMode,
    critical_alpha: Option<f64>,
    points: Vec<CurvePoint>,
}

#[derive(Serialize)]
struct Curves {
    mean_degree: f64,
    nu: f64,
    curves: Vec<ModeCurve>,
}

fn removal_spec(mode: RemovalMode, alpha: f64) -> RemovalSpec {
    match mode {
        RemovalMode::Top => RemovalSpec::Top { alpha },
        RemovalMode::Bottom => RemovalSpec::Bottom { alpha },
        RemovalMode::Uniform => RemovalSpec::Uniform { alpha },
    }
}

/// Giant-fraction curves over a grid of removal proportions, one per mode,
/// with the critical proportion of each.
#[wasm_bindgen]
pub fn removal_curves(p_json: &str, points: usize) -> String {
    let p: DegreeDistribution = match serde_json::from_str(p_json) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let (mean, nu) = p.moments();
    let steps = points.clamp(16, 2048);
    let mut curves = Vec::new();
    for mode in [RemovalMode::Top, RemovalMode::Uniform, RemovalMode::Bottom] {
        let critical = critical_alpha(&p, mode, 1e-9).ok();
        let mut pts = Vec::with_capacity(steps);
        for i in 0..steps {
            let alpha = (i as f64 + 0.5) / steps as f64;
            let Some(r) = removal_spec(mode, alpha).theory_sequence(&p).ok().flatten() else {
                continue;
            };
            match giant_fractions(&p, &r, SOLVER_TOL) {
                Ok(report) => pts.push(CurvePoint {
                    alpha,
                    nu_r: report.nu_r,
                    rho: report.rho,
                    e: report.e,
                }),
                Err(e) => return fail(e),
            }
        }
        curves.push(ModeCurve {
            mode,
            critical_alpha: critical,
            points: pts,
        });
    }
    serde_json::to_string(&Curves {
        mean_degree: mean,
        nu,
        curves,
    })
    .unwrap_or_else(fail)
}

/// Full prediction (fractions plus bounds) for an explicit removal sequence.
#[wasm_bindgen]
pub fn theory_report(p_json: &str, r_json: &str) -> String {
    let p: DegreeDistribution = match serde_json::from_str(p_json) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let r: AlphaSequence = match serde_json::from_str(r_json) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    match giant_fractions(&p, &r, SOLVER_TOL) {
        Ok(report) => serde_json::json!({
            "alpha": alpha_of(&p, &r),
            "report": report,
        })
        .to_string(),
        Err(e) => fail(e),
    }
}

#[derive(Serialize)]
struct SimulationSummary {
    n: usize,
    removed: usize,
    component_count: usize,
    giant_fraction: f64,
    edge_fraction: f64,
    /// Largest component sizes, descending (at most 12).
    top_components: Vec<usize>,
    theory_rho: Option<f64>,
    theory_e: Option<f64>,
}

/// Samples one configuration model, removes by mode at `alpha`, and returns
/// component statistics next to the prediction.
#[wasm_bindgen]
pub fn simulate_components(p_json: &str, mode: &str, alpha: f64, n: usize, seed: u64) -> String {
    let p: DegreeDistribution = match serde_json::from_str(p_json) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let mode: RemovalMode = match serde_json::from_str(&format!("\"{mode}\"")) {
        Ok(m) => m,
        Err(e) => return fail(e),
    };
    if !(0.0..=1.0).contains(&alpha) {
        return fail("alpha must lie in [0, 1]");
    }
    let n = n.clamp(100, 200_000);
    let degrees = sample_degree_sequence(&p, n, &mut stream(seed, 0, Purpose::DegreeSampling));
    let mut g = match HalfEdgeGraph::sample(&degrees, &mut stream(seed, 0, Purpose::Matching)) {
        Ok(g) => g,
        Err(e) => return fail(e),
    };
    let mut rng = stream(seed, 0, Purpose::Removal);
    let removed = match mode {
        RemovalMode::Top => g.remove_quantile_fraction(alpha, QuantileSide::Top, &mut rng),
        RemovalMode::Bottom => g.remove_quantile_fraction(alpha, QuantileSide::Bottom, &mut rng),
        RemovalMode::Uniform => {
            let max_degree = degrees.iter().copied().max().unwrap_or(1);
            let r = match AlphaSequence::uniform(alpha, max_degree) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            match g.remove_by_alpha_sequence(&r, RemovalConvention::Empirical, &mut rng) {
                Ok(count) => count,
                Err(e) => return fail(e),
            }
        }
    };
    let summary = g.components();
    let theory = if alpha > 0.0 && alpha < 1.0 {
        removal_spec(mode, alpha)
            .theory_sequence(&p)
            .ok()
            .flatten()
            .and_then(|r| giant_fractions(&p, &r, SOLVER_TOL).ok())
    } else {
        None
    };
    let out = SimulationSummary {
        n,
        removed,
        component_count: summary.component_count,
        giant_fraction: summary.giant_vertices as f64 / n as f64,
        edge_fraction: summary.giant_edges as f64 / n as f64,
        top_components: summary.sizes.iter().copied().take(12).collect(),
        theory_rho: theory.as_ref().map(|t| t.rho),
        theory_e: theory.as_ref().map(|t| t.e),
    };
    serde_json::to_string(&out).unwrap_or_else(fail)
}
