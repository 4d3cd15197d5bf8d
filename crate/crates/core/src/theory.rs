//! Closed-form predictions for the giant component of a configuration model
//! after per-degree-class vertex removal.
//!
//! Everything here is deterministic numerics: the exploded degree law, the
//! half-edge extinction fixed point, giant vertex/edge fractions, critical
//! removal thresholds, analytic bounds, and the perturbation derivatives.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::degrees::{
    alpha_of, bottom_quantile_sequence, degree_weighted_alpha, top_quantile_sequence,
    upward_transport, AlphaSequence, DegreeDistribution, DegreesError, EpsilonTransform,
    FiniteMeasure, MassMove,
};

/// Default fixed-point solver tolerance: the residual of the defining
/// equation is driven below `tol * E[D]`.
pub const SOLVER_TOL: f64 = 1e-12;

/// Degenerate-input threshold for the exploded normalizer.
const BETA_MIN: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum TheoryError {
    #[error("exploded normalizer beta = {0} is degenerate")]
    DegenerateBeta(f64),
    #[error("no sign change found for the extinction bracket; the process sits at criticality")]
    BracketNotFound,
    #[error("fixed-point residual {residual} did not reach tolerance {tol}")]
    NoConvergence { residual: f64, tol: f64 },
    #[error("no giant exists at alpha = 0 (nu = {0} <= 1)")]
    NoGiantAtZero(f64),
    #[error("sequence is subcritical after the transform (nu_r = {0} <= 1)")]
    SubcriticalTransform(f64),
    #[error(transparent)]
    Degrees(#[from] DegreesError),
}

/// Degree law of the vertex-exploded graph, with its normalizer
/// `beta = E[D r_D] + 1 - alpha`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExplodedDistribution {
    pub p_tilde: DegreeDistribution,
    pub beta: f64,
}

/// Analytic bounds attached to a [`TheoryReport`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoundsReport {
    /// `eta >= E[D r_D] / E[D]`.
    pub eta_lower: f64,
    /// `E[D(eta - r_D)](1 - eta) <= rho`.
    pub rho_lower: f64,
    /// `rho <= E[D(1 - r_D)](1 - eta)` (mean-value bound).
    pub rho_upper_mvt: f64,
    /// `rho <= E[D(1 - r_D)]^2 / E[D]`.
    pub rho_upper_quad: f64,
    /// `1 - alpha - 2 E[D r_D]^2 / E[D]`: an upper bound on the discounted
    /// fraction `rho - 2 E[D r_D] eta`, not on `rho` itself.
    pub rho_upper_alpha: f64,
    /// `e <= E[D(1 - r_D)]^2 / (2 E[D])`.
    pub e_upper: f64,
    /// `1 - alpha - 2 alpha^2 E[D]`: the sharper variant of
    /// `rho_upper_alpha` when removal correlates positively with degree.
    pub rho_upper_poscorr: f64,
    /// Whether `Cov(D, r_D) >= 0`, the condition for `rho_upper_poscorr`.
    pub positively_correlated: bool,
}

/// Closed-form prediction for one `(p, r)` pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TheoryReport {
    pub nu_r: f64,
    pub eta: f64,
    pub rho: f64,
    pub e: f64,
    pub supercritical: bool,
    pub bounds: BoundsReport,
}

/// Closed-form derivatives of `eta`, `rho`, `e` along a mass-lowering
/// transform at parameter `eps`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DerivativeReport {
    pub deta: f64,
    pub drho: f64,
    pub de: f64,
    pub a_eps: f64,
    pub b_eps: f64,
}

/// Giant-component law of the untouched configuration model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurvivalReport {
    pub eta: f64,
    pub rho: f64,
    /// Per-degree giant fractions `p_j (1 - eta^j)`.
    pub per_degree: Vec<(usize, f64)>,
    pub e: f64,
}

/// Outcome of comparing two degree distributions in the tail-sum order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CmOrderReport {
    pub dominated: bool,
    pub rho_p: f64,
    pub rho_q: f64,
    /// Upward mass moves taking `p` to `q`; empty when not dominated.
    pub transforms: Vec<MassMove>,
    /// `rho_p <= rho_q + tol` whenever `dominated` holds.
    pub ordering_ok: bool,
}

/// Mode of quantile-style removal used for critical thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemovalMode {
    Top,
    Bottom,
    Uniform,
}

// The exploded generating function enters every formula only through
// beta * g_r and its derivatives, which stay finite even when beta is tiny:
//   beta * g_r(s)   = sum_i (1 - r_i) p_i s^i + E[D r_D] s
//   beta * g_r'(s)  = sum_i i (1 - r_i) p_i s^{i-1} + E[D r_D]
//   beta * g_r''(s) = sum_i i (i-1) (1 - r_i) p_i s^{i-2}
fn beta_g(p: &DegreeDistribution, r: &AlphaSequence, s: f64) -> f64 {
    let linear = degree_weighted_alpha(p, r) * s;
    p.support()
        .map(|i| (1.0 - r.fraction(i)) * p.mass(i) * s.powi(i as i32))
        .sum::<f64>()
        + linear
}

fn beta_g_prime(p: &DegreeDistribution, r: &AlphaSequence, s: f64) -> f64 {
    let constant = degree_weighted_alpha(p, r);
    p.support()
        .map(|i| i as f64 * (1.0 - r.fraction(i)) * p.mass(i) * s.powi(i as i32 - 1))
        .sum::<f64>()
        + constant
}

fn beta_g_double_prime(p: &DegreeDistribution, r: &AlphaSequence, s: f64) -> f64 {
    p.support()
        .map(|i| {
            let deg = i as f64;
            deg * (deg - 1.0) * (1.0 - r.fraction(i)) * p.mass(i) * s.powi(i as i32 - 2)
        })
        .sum()
}

/// Post-removal branching ratio `nu_r = E[D(D-1)(1-r_D)] / E[D]`; the removed
/// graph keeps a giant iff this exceeds 1.
pub fn nu_r(p: &DegreeDistribution, r: &AlphaSequence) -> f64 {
    let num: f64 = p
        .support()
        .map(|j| {
            let jf = j as f64;
            jf * (jf - 1.0) * (1.0 - r.fraction(j)) * p.mass(j)
        })
        .sum();
    num / p.mean()
}

/// Degree law after exploding the removed vertices into degree-one stubs.
pub fn explode(
    p: &DegreeDistribution,
    r: &AlphaSequence,
) -> Result<ExplodedDistribution, TheoryError> {
    let e_dr = degree_weighted_alpha(p, r);
    let alpha = alpha_of(p, r);
    let beta = e_dr + 1.0 - alpha;
    if beta <= BETA_MIN {
        return Err(TheoryError::DegenerateBeta(beta));
    }
    let mut pairs: Vec<(usize, f64)> = Vec::new();
    let p1_tilde = (e_dr + p.mass(1) * (1.0 - r.fraction(1))) / beta;
    if p1_tilde > 0.0 {
        pairs.push((1, p1_tilde));
    }
    for i in p.support().filter(|&i| i != 1) {
        let m = p.mass(i) * (1.0 - r.fraction(i)) / beta;
        if m > 0.0 {
            pairs.push((i, m));
        }
    }
    // The exploded masses sum to 1 by construction of beta; renormalize the
    // rounding residue so the invariant holds exactly.
    let total: f64 = pairs.iter().map(|&(_, m)| m).sum();
    for pair in &mut pairs {
        pair.1 /= total;
    }
    Ok(ExplodedDistribution {
        p_tilde: DegreeDistribution::from_pairs(&pairs)?,
        beta,
    })
}

fn bisect<F: Fn(f64) -> f64>(h: F, target_scale: f64, tol: f64) -> Result<f64, TheoryError> {
    // h(0) >= 0 and h(1) = 0 with h < 0 just left of 1 in the supercritical
    // regime; exclude the spurious root at 1 by shrinking the right endpoint
    // geometrically until the sign is confirmed.
    let mut delta = 1e-3;
    let mut hi = 1.0 - delta;
    let mut found = false;
    for _ in 0..60 {
        hi = 1.0 - delta;
        if h(hi) < 0.0 {
            found = true;
            break;
        }
        delta *= 0.5;
    }
    if !found {
        return Err(TheoryError::BracketNotFound);
    }
    let mut lo = 0.0;
    let limit = tol * target_scale;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let hm = h(mid);
        if hm.abs() <= limit {
            return Ok(mid);
        }
        if hm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo).abs() < f64::EPSILON {
            break;
        }
    }
    let mid = 0.5 * (lo + hi);
    let residual = h(mid).abs();
    if residual <= limit {
        Ok(mid)
    } else {
        Err(TheoryError::NoConvergence {
            residual,
            tol: limit,
        })
    }
}

/// Half-edge extinction probability `eta`: the smallest solution of
/// `beta_r g_r'(eta) = E[D] eta`.
///
/// Conventions: subcritical sequences return 1; when the exploded law has no
/// degree-one mass the extinction probability is 0.
pub fn solve_eta(p: &DegreeDistribution, r: &AlphaSequence, tol: f64) -> Result<f64, TheoryError> {
    let (mean, _) = p.moments();
    if nu_r(p, r) <= 1.0 {
        return Ok(1.0);
    }
    let p1_tilde_mass = degree_weighted_alpha(p, r) + p.mass(1) * (1.0 - r.fraction(1));
    if p1_tilde_mass <= BETA_MIN {
        return Ok(0.0);
    }
    bisect(|x| beta_g_prime(p, r, x) - mean * x, mean, tol)
}

fn bounds_at(p: &DegreeDistribution, r: &AlphaSequence, eta: f64) -> BoundsReport {
    let (mean, _) = p.moments();
    let alpha = alpha_of(p, r);
    let e_dr = degree_weighted_alpha(p, r);
    let kept = mean - e_dr; // E[D(1 - r_D)]
    BoundsReport {
        eta_lower: e_dr / mean,
        rho_lower: (mean * eta - e_dr) * (1.0 - eta),
        rho_upper_mvt: kept * (1.0 - eta),
        rho_upper_quad: kept * kept / mean,
        rho_upper_alpha: 1.0 - alpha - 2.0 * e_dr * e_dr / mean,
        e_upper: kept * kept / (2.0 * mean),
        rho_upper_poscorr: 1.0 - alpha - 2.0 * alpha * alpha * mean,
        positively_correlated: e_dr - mean * alpha >= -1e-15,
    }
}

/// The analytic bound record, evaluated at a solved `eta`.
pub fn bounds(p: &DegreeDistribution, r: &AlphaSequence, eta: f64) -> BoundsReport {
    bounds_at(p, r, eta)
}

/// Full closed-form prediction: branching ratio, extinction probability,
/// vertex fraction `rho`, edge fraction `e`, and the bound record.
pub fn giant_fractions(
    p: &DegreeDistribution,
    r: &AlphaSequence,
    tol: f64,
) -> Result<TheoryReport, TheoryError> {
    let nur = nu_r(p, r);
    let (mean, _) = p.moments();
    let alpha = alpha_of(p, r);
    let e_dr = degree_weighted_alpha(p, r);
    if nur <= 1.0 {
        return Ok(TheoryReport {
            nu_r: nur,
            eta: 1.0,
            rho: 0.0,
            e: 0.0,
            supercritical: false,
            bounds: bounds_at(p, r, 1.0),
        });
    }
    let eta = solve_eta(p, r, tol)?;
    // rho = beta (1 - g(eta)) - E[D r_D](1 - eta), which collapses to
    // 1 - alpha - sum_i (1 - r_i) p_i eta^i: a kept vertex of degree i is
    // outside the giant exactly when all i half-edge explorations die.
    let rho = (1.0 - alpha - (beta_g(p, r, eta) - e_dr * eta)).max(0.0);
    let e = (0.5 * mean * (1.0 - eta * eta) - e_dr * (1.0 - eta)).max(0.0);
    Ok(TheoryReport {
        nu_r: nur,
        eta,
        rho,
        e,
        supercritical: true,
        bounds: bounds_at(p, r, eta),
    })
}

/// Giant law of the plain configuration model: solves `g_D'(eta) = E[D] eta`
/// and returns vertex, per-degree, and edge fractions.
///
/// This is an independent route from [`giant_fractions`]: it never builds the
/// removal machinery, so the two can cross-check each other at `r = 0`.
pub fn janson_luczak(p: &DegreeDistribution, tol: f64) -> Result<SurvivalReport, TheoryError> {
    let (mean, _) = p.moments();
    let criterion: f64 = p
        .support()
        .map(|j| {
            let jf = j as f64;
            jf * (jf - 2.0) * p.mass(j)
        })
        .sum();
    let eta = if criterion <= 0.0 {
        1.0
    } else if p.mass(1) <= BETA_MIN {
        0.0
    } else {
        bisect(|x| p.pgf_prime(x) - mean * x, mean, tol)?
    };
    let rho = (1.0 - p.pgf(eta)).max(0.0);
    let per_degree = p
        .support()
        .map(|j| (j, p.mass(j) * (1.0 - eta.powi(j as i32))))
        .collect();
    let e = (0.5 * mean * (1.0 - eta * eta)).max(0.0);
    Ok(SurvivalReport {
        eta,
        rho,
        per_degree,
        e,
    })
}

fn mode_sequence(
    p: &DegreeDistribution,
    mode: RemovalMode,
    alpha: f64,
) -> Result<AlphaSequence, TheoryError> {
    Ok(match mode {
        RemovalMode::Top => top_quantile_sequence(p, alpha)?.0,
        RemovalMode::Bottom => bottom_quantile_sequence(p, alpha)?.0,
        RemovalMode::Uniform => AlphaSequence::uniform(alpha, p.d_max())?,
    })
}

/// Critical removal proportion for a removal mode: the boundary between the
/// supercritical and subcritical regimes of `alpha -> nu_{r(alpha)}`.
///
/// `nu_{r(alpha)}` is monotone nonincreasing in `alpha` for each mode, so the
/// boundary is found by bisection; the returned point satisfies
/// `|nu_{r(alpha)} - 1| <= tol`.
pub fn critical_alpha(
    p: &DegreeDistribution,
    mode: RemovalMode,
    tol: f64,
) -> Result<f64, TheoryError> {
    let (_, nu) = p.moments();
    if nu <= 1.0 {
        return Err(TheoryError::NoGiantAtZero(nu));
    }
    let f = |alpha: f64| -> Result<f64, TheoryError> {
        Ok(nu_r(p, &mode_sequence(p, mode, alpha)?) - 1.0)
    };
    let mut lo = 0.0; // f(0) = nu - 1 > 0
    let mut hi = 1.0 - 1e-12;
    if f(hi)? >= 0.0 {
        // Everything but a vanishing sliver removed and still supercritical;
        // the critical proportion is 1 to solver precision.
        return Ok(1.0);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm.abs() <= tol {
            return Ok(mid);
        }
        if fm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo).abs() < f64::EPSILON {
            break;
        }
    }
    let mid = 0.5 * (lo + hi);
    let residual = f(mid)?.abs();
    if residual <= tol {
        Ok(mid)
    } else {
        Err(TheoryError::NoConvergence { residual, tol })
    }
}

/// Closed-form derivatives of extinction probability and giant fractions
/// along the transform `(k, l)` at parameter `eps`, evaluated at the
/// transformed sequence.
///
/// In the supercritical regime `deta < 0` while `drho > 0` and `de > 0`:
/// lowering removal mass always grows the giant.
pub fn derivative_report(
    p: &DegreeDistribution,
    r: &AlphaSequence,
    k: usize,
    l: usize,
    eps: f64,
    tol: f64,
) -> Result<DerivativeReport, TheoryError> {
    let t = EpsilonTransform { k, l, eps };
    let r_eps = crate::degrees::apply_epsilon_transform(p, r, &t)?;
    let nur = nu_r(p, &r_eps);
    if nur <= 1.0 {
        return Err(TheoryError::SubcriticalTransform(nur));
    }
    let eta = solve_eta(p, &r_eps, tol)?;
    let (mean, _) = p.moments();
    let kf = k as f64;
    let lf = l as f64;
    let klf = (k + l) as f64;

    let numerator = klf * eta.powi((k + l) as i32 - 1) - kf * eta.powi(k as i32 - 1) - lf;
    let denominator = mean - beta_g_double_prime(p, &r_eps, eta);
    let deta = numerator / denominator;

    // Both giant derivatives share the drift factor E[D(eta - r_D^eps)]:
    // differentiating rho(eps) through the fixed point cancels the explicit
    // eps terms, leaving -A deta + B with A the drift and B = eta^k(1-eta^l).
    let drift = mean * eta - degree_weighted_alpha(p, &r_eps);
    let de = -deta * drift + lf * (1.0 - eta);

    let a_eps = drift;
    let b_eps = eta.powi(k as i32) * (1.0 - eta.powi(l as i32));
    let drho = -a_eps * deta + b_eps;

    Ok(DerivativeReport {
        deta,
        drho,
        de,
        a_eps,
        b_eps,
    })
}

/// Compares the plain-CM giants of two degree laws under the tail-sum order:
/// if `p ≼_st q` then `rho_CM(p) <= rho_CM(q)`, with the upward transform
/// chain taking `p` to `q` as a witness.
pub fn cm_order_compare(
    p: &DegreeDistribution,
    q: &DegreeDistribution,
    tol: f64,
) -> Result<CmOrderReport, TheoryError> {
    let dominated = p.stochastically_dominated_by(q);
    let rho_p = janson_luczak(p, tol)?.rho;
    let rho_q = janson_luczak(q, tol)?.rho;
    let transforms = if dominated {
        upward_transport(
            &FiniteMeasure::from_distribution(p),
            &FiniteMeasure::from_distribution(q),
        )?
    } else {
        Vec::new()
    };
    Ok(CmOrderReport {
        dominated,
        rho_p,
        rho_q,
        transforms,
        ordering_ok: !dominated || rho_p <= rho_q + tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p13() -> DegreeDistribution {
        DegreeDistribution::from_pairs(&[(1, 0.5), (3, 0.5)]).unwrap()
    }

    fn seq(vals: &[(usize, f64)]) -> AlphaSequence {
        AlphaSequence::from_pairs(vals).unwrap()
    }

    #[test]
    fn explode_identity_without_removal() {
        let p = p13();
        let out = explode(&p, &AlphaSequence::zeros(3)).unwrap();
        assert_eq!(out.beta, 1.0);
        for j in 1..=3 {
            assert!((out.p_tilde.mass(j) - p.mass(j)).abs() < 1e-15);
        }
    }

    #[test]
    fn explode_uniform_on_regular() {
        let p = DegreeDistribution::atom(3);
        let alpha = 0.2;
        let r = AlphaSequence::uniform(alpha, 3).unwrap();
        let out = explode(&p, &r).unwrap();
        let beta = 1.0 + 2.0 * alpha;
        assert!((out.beta - beta).abs() < 1e-15);
        assert!((out.p_tilde.mass(1) - 3.0 * alpha / beta).abs() < 1e-14);
        assert!((out.p_tilde.mass(3) - (1.0 - alpha) / beta).abs() < 1e-14);
    }

    #[test]
    fn explode_recycles_degree_one() {
        let p = DegreeDistribution::atom(1);
        let out = explode(&p, &AlphaSequence::ones(1)).unwrap();
        assert!((out.beta - 1.0).abs() < 1e-15);
        assert!((out.p_tilde.mass(1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn nu_r_reduces_to_nu() {
        let p = p13();
        assert!((nu_r(&p, &AlphaSequence::zeros(3)) - p.nu()).abs() < 1e-15);
    }

    #[test]
    fn nu_r_uniform_on_regular() {
        let p = DegreeDistribution::atom(3);
        for alpha in [0.0, 0.1, 0.45] {
            let r = AlphaSequence::uniform(alpha, 3).unwrap();
            assert!((nu_r(&p, &r) - 2.0 * (1.0 - alpha)).abs() < 1e-14);
        }
    }

    #[test]
    fn nu_r_top_quantile_value() {
        let p = p13();
        let (r, _) = top_quantile_sequence(&p, 0.25).unwrap();
        assert!((nu_r(&p, &r) - 0.75).abs() < 1e-14);
    }

    #[test]
    fn eta_closed_form_on_regular() {
        let p = DegreeDistribution::atom(3);
        for alpha in [0.1, 0.25, 0.4] {
            let r = AlphaSequence::uniform(alpha, 3).unwrap();
            let eta = solve_eta(&p, &r, SOLVER_TOL).unwrap();
            assert!(
                (eta - alpha / (1.0 - alpha)).abs() < 1e-11,
                "alpha={alpha}: eta={eta}"
            );
        }
    }

    #[test]
    fn eta_subcritical_convention() {
        let p = p13();
        let (r, _) = top_quantile_sequence(&p, 0.25).unwrap();
        assert_eq!(solve_eta(&p, &r, SOLVER_TOL).unwrap(), 1.0);
    }

    #[test]
    fn eta_zero_without_degree_one_mass() {
        let p = DegreeDistribution::atom(3);
        assert_eq!(
            solve_eta(&p, &AlphaSequence::zeros(3), SOLVER_TOL).unwrap(),
            0.0
        );
    }

    #[test]
    fn giant_fractions_regular_uniform() {
        // Uniform removal on a regular graph is site percolation: the kept
        // root survives unless all three explorations die, so
        // rho = (1 - alpha)(1 - eta^3) with eta = alpha/(1 - alpha).
        let p = DegreeDistribution::atom(3);
        let r = AlphaSequence::uniform(0.1, 3).unwrap();
        let report = giant_fractions(&p, &r, SOLVER_TOL).unwrap();
        let eta = 1.0 / 9.0;
        let rho = 0.9 * (1.0 - eta * eta * eta);
        let e = 1.5 * (1.0 - eta * eta) - 0.3 * (1.0 - eta);
        assert!((report.eta - eta).abs() < 1e-11);
        assert!((report.rho - rho).abs() < 1e-10);
        assert!((report.e - e).abs() < 1e-10);
    }

    #[test]
    fn alpha_bounds_cap_the_discounted_fraction_not_rho() {
        // For uniform removal on the 3-regular graph the true giant
        // (0.8988, checked against simulation and the percolation argument)
        // exceeds both eta-independent caps (0.84); they bound
        // rho - 2 E[D r_D] eta instead.
        let p = DegreeDistribution::atom(3);
        let r = AlphaSequence::uniform(0.1, 3).unwrap();
        let report = giant_fractions(&p, &r, SOLVER_TOL).unwrap();
        let e_dr = degree_weighted_alpha(&p, &r);
        let discounted = report.rho - 2.0 * e_dr * report.eta;
        assert!(report.rho > report.bounds.rho_upper_alpha);
        assert!(report.rho > report.bounds.rho_upper_poscorr);
        assert!(discounted <= report.bounds.rho_upper_alpha + 1e-12);
        assert!(report.bounds.positively_correlated);
        assert!(discounted <= report.bounds.rho_upper_poscorr + 1e-12);
    }

    #[test]
    fn giant_fractions_no_removal_two_atoms() {
        let p = p13();
        let report = giant_fractions(&p, &AlphaSequence::zeros(3), SOLVER_TOL).unwrap();
        assert!((report.eta - 1.0 / 3.0).abs() < 1e-11);
        assert!((report.rho - 44.0 / 54.0).abs() < 1e-10);
        assert!((report.e - 8.0 / 9.0).abs() < 1e-10);
    }

    #[test]
    fn giant_fractions_subcritical_branch() {
        let p = p13();
        let (r, _) = top_quantile_sequence(&p, 0.25).unwrap();
        let report = giant_fractions(&p, &r, SOLVER_TOL).unwrap();
        assert!(!report.supercritical);
        assert_eq!(report.rho, 0.0);
        assert_eq!(report.e, 0.0);
    }

    #[test]
    fn janson_luczak_examples() {
        let jl = janson_luczak(&p13(), SOLVER_TOL).unwrap();
        assert!((jl.eta - 1.0 / 3.0).abs() < 1e-11);
        assert!((jl.rho - 44.0 / 54.0).abs() < 1e-10);

        let jl = janson_luczak(&DegreeDistribution::atom(3), SOLVER_TOL).unwrap();
        assert_eq!(jl.eta, 0.0);
        assert_eq!(jl.rho, 1.0);
        assert!((jl.e - 1.5).abs() < 1e-15);

        let jl = janson_luczak(&DegreeDistribution::atom(1), SOLVER_TOL).unwrap();
        assert_eq!(jl.eta, 1.0);
        assert_eq!(jl.rho, 0.0);
    }

    #[test]
    fn bounds_examples() {
        let p = DegreeDistribution::atom(3);
        let r = AlphaSequence::uniform(0.1, 3).unwrap();
        let eta = solve_eta(&p, &r, SOLVER_TOL).unwrap();
        let b = bounds(&p, &r, eta);
        assert!((b.eta_lower - 0.1).abs() < 1e-14);
        assert!(eta >= b.eta_lower - 1e-12);

        let p = p13();
        let r0 = AlphaSequence::zeros(3);
        let report = giant_fractions(&p, &r0, SOLVER_TOL).unwrap();
        assert!((report.bounds.rho_lower - 4.0 / 9.0).abs() < 1e-10);
        assert!((report.bounds.rho_upper_mvt - 4.0 / 3.0).abs() < 1e-10);
        assert!(report.rho >= report.bounds.rho_lower - 1e-12);
        assert!(report.rho <= report.bounds.rho_upper_mvt + 1e-12);
    }

    #[test]
    fn bounds_full_removal_degenerates_cleanly() {
        let p = p13();
        let report = giant_fractions(&p, &AlphaSequence::ones(3), SOLVER_TOL).unwrap();
        assert_eq!(report.rho, 0.0);
        assert!(report.bounds.rho_upper_mvt >= 0.0);
        assert!(report.bounds.rho_upper_quad >= 0.0);
    }

    #[test]
    fn critical_alpha_examples() {
        let p = DegreeDistribution::atom(3);
        for mode in [RemovalMode::Top, RemovalMode::Bottom, RemovalMode::Uniform] {
            let ac = critical_alpha(&p, mode, 1e-10).unwrap();
            assert!((ac - 0.5).abs() < 1e-9, "{mode:?}: {ac}");
        }
        let p = p13();
        let top = critical_alpha(&p, RemovalMode::Top, 1e-10).unwrap();
        assert!((top - 1.0 / 6.0).abs() < 1e-9, "top: {top}");
        let bottom = critical_alpha(&p, RemovalMode::Bottom, 1e-10).unwrap();
        assert!((bottom - 2.0 / 3.0).abs() < 1e-9, "bottom: {bottom}");
    }

    #[test]
    fn critical_alpha_requires_giant() {
        let p = DegreeDistribution::atom(1);
        assert!(matches!(
            critical_alpha(&p, RemovalMode::Top, 1e-10),
            Err(TheoryError::NoGiantAtZero(_))
        ));
    }

    #[test]
    fn derivative_report_at_zero_matches_stated_coefficients() {
        let p = p13();
        let r = seq(&[(1, 0.1), (3, 0.3)]);
        let rep = derivative_report(&p, &r, 1, 2, 0.0, SOLVER_TOL).unwrap();
        let eta = solve_eta(&p, &r, SOLVER_TOL).unwrap();
        let drift = p.mean() * eta - degree_weighted_alpha(&p, &r);
        assert!((rep.a_eps - drift).abs() < 1e-12);
        assert!((rep.b_eps - eta.powi(1) * (1.0 - eta.powi(2))).abs() < 1e-12);
        assert!(rep.deta < 0.0);
        assert!(rep.drho > 0.0);
        assert!(rep.de > 0.0);
    }

    // Closed-form oracle on support {1, 3}: the fixed point is a quadratic
    // c2(eps) x^2 - E[D] x + c0(eps) = 0 with coefficients linear in eps, so
    // deta is available from the implicit-function quotient of the explicit
    // coefficients, independently of the generic formula.
    #[test]
    fn derivative_matches_quadratic_oracle() {
        let a = 0.4;
        let p = DegreeDistribution::from_pairs(&[(1, a), (3, 1.0 - a)]).unwrap();
        let r = seq(&[(1, 0.05), (3, 0.4)]);
        let eps = 0.05;
        let rep = derivative_report(&p, &r, 1, 2, eps, SOLVER_TOL).unwrap();

        let mean = 3.0 - 2.0 * a;
        let c2 = 3.0 * (1.0 - a) * (1.0 - r.fraction(3)) + 3.0 * eps;
        let c0 = a + 3.0 * (1.0 - a) * r.fraction(3) - 3.0 * eps;
        let eta = (mean - (mean * mean - 4.0 * c2 * c0).sqrt()) / (2.0 * c2);
        // dh/deps = 3(x^2 - 1); dh/dx = 2 c2 x - mean; deta = -(dh/deps)/(dh/dx)
        let oracle = -(3.0 * (eta * eta - 1.0)) / (2.0 * c2 * eta - mean);
        assert!(
            (rep.deta - oracle).abs() <= 1e-8 * oracle.abs(),
            "formula {} vs oracle {}",
            rep.deta,
            oracle
        );
    }

    #[test]
    fn derivative_numerator_vanishes_at_one() {
        // (k+l) x^{k+l-1} - k x^{k-1} - l -> 0 as x -> 1.
        for (k, l) in [(1usize, 1usize), (2, 3), (4, 1)] {
            let x: f64 = 1.0 - 1e-9;
            let v = ((k + l) as f64) * x.powi((k + l) as i32 - 1)
                - (k as f64) * x.powi(k as i32 - 1)
                - l as f64;
            assert!(v.abs() < 1e-7);
        }
    }

    #[test]
    fn derivative_rejects_subcritical() {
        let p = p13();
        let (r, _) = top_quantile_sequence(&p, 0.25).unwrap(); // nu_r = 0.75
        let r = {
            // put a little mass at degree 1 so the transform has room
            let mut r = r;
            r.set(1, 0.1).unwrap();
            r
        };
        assert!(matches!(
            derivative_report(&p, &r, 1, 2, 0.0, SOLVER_TOL),
            Err(TheoryError::SubcriticalTransform(_))
        ));
    }

    #[test]
    fn cm_order_compare_examples() {
        let p = p13();
        let report = cm_order_compare(&p, &p, SOLVER_TOL).unwrap();
        assert!(report.dominated);
        assert_eq!(report.rho_p, report.rho_q);

        let q = DegreeDistribution::atom(3);
        let report = cm_order_compare(&p, &q, SOLVER_TOL).unwrap();
        assert!(report.dominated);
        assert!(report.ordering_ok);
        assert!((report.rho_p - 44.0 / 54.0).abs() < 1e-10);
        assert_eq!(report.rho_q, 1.0);
        assert!(!report.transforms.is_empty());

        let report = cm_order_compare(&q, &p, SOLVER_TOL).unwrap();
        assert!(!report.dominated);
        assert!(report.transforms.is_empty());
    }

    #[test]
    fn exploded_criterion_matches_nu_r_sign() {
        // E[D~(D~-2)] > 0 iff nu_r > 1; checked, not assumed.
        let p = p13();
        for r in [
            AlphaSequence::zeros(3),
            seq(&[(1, 0.2), (3, 0.4)]),
            top_quantile_sequence(&p, 0.25).unwrap().0,
        ] {
            let ex = explode(&p, &r).unwrap();
            let criterion: f64 = ex
                .p_tilde
                .support()
                .map(|j| {
                    let jf = j as f64;
                    jf * (jf - 2.0) * ex.p_tilde.mass(j)
                })
                .sum();
            assert_eq!(criterion > 0.0, nu_r(&p, &r) > 1.0);
        }
    }
}
