//! Degree distributions, per-degree removal fractions, quantile removal
//! sequences, and the stochastic-dominance machinery (mass transforms and
//! the two decomposition algorithms built on them).
//!
//! Degree 0 is not representable: every distribution here lives on
//! `{1, ..., d_max}` and all sums run from degree 1 upward.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Tolerance for mass identities (normalization, alpha preservation).
pub const MASS_TOL: f64 = 1e-12;

/// Below this, a mass difference is treated as zero when building transforms.
const ZERO_MASS: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum DegreesError {
    #[error("degree 0 is not representable; support starts at 1")]
    ZeroDegree,
    #[error("mass at degree {degree} is negative: {mass}")]
    NegativeMass { degree: usize, mass: f64 },
    #[error("masses sum to {total:.17}, expected 1 within 1e-12")]
    NotNormalized { total: f64 },
    #[error("empty support")]
    EmptySupport,
    #[error("fraction at degree {degree} is {value}, outside [0, 1]")]
    FractionOutOfRange { degree: usize, value: f64 },
    #[error("alpha must lie in (0, 1), got {0}")]
    AlphaOutOfRange(f64),
    #[error("sequence covers degrees up to {have}, but degree {need} carries mass")]
    SupportNotCovered { have: usize, need: usize },
    #[error("transform touches degree {0}, which has no mass")]
    MasslessCoordinate(usize),
    #[error("transform gap must be at least 1")]
    ZeroGap,
    #[error("eps {eps} exceeds removable mass {available} at degree {degree}")]
    EpsTooLarge {
        degree: usize,
        eps: f64,
        available: f64,
    },
    #[error("transform pushes fraction at degree {degree} to {value} > 1")]
    FractionOverflow { degree: usize, value: f64 },
    #[error("removal masses differ: {0} vs {1}")]
    AlphaMismatch(f64, f64),
    #[error("tail-sum ordering fails first at degree {0}")]
    NotDominated(usize),
    #[error("degree key {0:?} is not a positive integer")]
    BadDegreeKey(String),
}

/// Finite-support law of the limiting degree `D`: `mass(j)` for `j >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    // mass[j] = P(D = j); index 0 kept as padding and always zero.
    mass: Vec<f64>,
}

impl DegreeDistribution {
    /// Builds a distribution from `(degree, mass)` pairs and validates the
    /// invariants, reporting the first violated one.
    pub fn from_pairs(pairs: &[(usize, f64)]) -> Result<Self, DegreesError> {
        let d_max = pairs.iter().map(|&(j, _)| j).max().unwrap_or(0);
        if d_max == 0 {
            return Err(DegreesError::EmptySupport);
        }
        let mut mass = vec![0.0; d_max + 1];
        for &(j, m) in pairs {
            if j == 0 {
                return Err(DegreesError::ZeroDegree);
            }
            if m < 0.0 || !m.is_finite() {
                return Err(DegreesError::NegativeMass { degree: j, mass: m });
            }
            mass[j] += m;
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(DegreesError::NotNormalized { total });
        }
        Ok(Self { mass })
    }

    /// Single atom at `degree`.
    pub fn atom(degree: usize) -> Self {
        Self::from_pairs(&[(degree, 1.0)]).expect("atom is valid")
    }

    /// Power law `p_j ∝ j^{-exponent}` truncated at `d_max` and renormalized.
    ///
    /// Truncation is the approximation knob: heavier tails need a larger
    /// `d_max` before the moments stabilize.
    pub fn truncated_power_law(exponent: f64, d_max: usize) -> Result<Self, DegreesError> {
        if d_max == 0 {
            return Err(DegreesError::EmptySupport);
        }
        let raw: Vec<(usize, f64)> = (1..=d_max)
            .map(|j| (j, (j as f64).powf(-exponent)))
            .collect();
        let total: f64 = raw.iter().map(|&(_, w)| w).sum();
        let pairs: Vec<(usize, f64)> = raw.into_iter().map(|(j, w)| (j, w / total)).collect();
        Self::from_pairs(&pairs)
    }

    pub fn d_max(&self) -> usize {
        self.mass.len() - 1
    }

    /// `P(D = j)`; zero beyond the stored range.
    pub fn mass(&self, j: usize) -> f64 {
        self.mass.get(j).copied().unwrap_or(0.0)
    }

    /// Degrees carrying positive mass, ascending.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        (1..self.mass.len()).filter(move |&j| self.mass[j] > 0.0)
    }

    /// `(E[D], nu)` where `nu = E[D(D-1)]/E[D]`.
    pub fn moments(&self) -> (f64, f64) {
        let mut mean = 0.0;
        let mut second = 0.0;
        for j in self.support() {
            let jf = j as f64;
            mean += jf * self.mass[j];
            second += jf * (jf - 1.0) * self.mass[j];
        }
        (mean, second / mean)
    }

    pub fn mean(&self) -> f64 {
        self.moments().0
    }

    /// Branching ratio `E[D(D-1)]/E[D]`; the graph has a giant iff this exceeds 1.
    pub fn nu(&self) -> f64 {
        self.moments().1
    }

    /// `P(D >= k)`.
    pub fn tail(&self, k: usize) -> f64 {
        (k..self.mass.len()).map(|j| self.mass[j]).sum()
    }

    /// `P(D <= k)`.
    pub fn head(&self, k: usize) -> f64 {
        (1..=k.min(self.d_max())).map(|j| self.mass[j]).sum()
    }

    /// Probability generating function `g_D(s)`.
    pub fn pgf(&self, s: f64) -> f64 {
        self.support()
            .map(|j| self.mass[j] * s.powi(j as i32))
            .sum()
    }

    /// `g_D'(s)`.
    pub fn pgf_prime(&self, s: f64) -> f64 {
        self.support()
            .map(|j| j as f64 * self.mass[j] * s.powi(j as i32 - 1))
            .sum()
    }

    /// Tail-sum stochastic order on distributions: `self ≼_st other`.
    pub fn stochastically_dominated_by(&self, other: &DegreeDistribution) -> bool {
        let d = self.d_max().max(other.d_max());
        (1..=d).all(|k| self.tail(k) <= other.tail(k) + MASS_TOL)
    }

    pub fn to_pairs(&self) -> Vec<(usize, f64)> {
        self.support().map(|j| (j, self.mass[j])).collect()
    }
}

/// Per-degree removal fractions `r_j ∈ [0, 1]`; together with a distribution
/// they remove an `alpha = Σ p_j r_j` proportion of vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaSequence {
    // r[j] is the fraction of the degree-j class to remove; index 0 unused.
    r: Vec<f64>,
}

impl AlphaSequence {
    pub fn from_pairs(pairs: &[(usize, f64)]) -> Result<Self, DegreesError> {
        let d_max = pairs.iter().map(|&(j, _)| j).max().unwrap_or(0);
        if d_max == 0 {
            return Err(DegreesError::EmptySupport);
        }
        let mut r = vec![0.0; d_max + 1];
        for &(j, v) in pairs {
            if j == 0 {
                return Err(DegreesError::ZeroDegree);
            }
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(DegreesError::FractionOutOfRange {
                    degree: j,
                    value: v,
                });
            }
            r[j] = v;
        }
        Ok(Self { r })
    }

    /// All-zero sequence on `{1, ..., d_max}` (no removal).
    pub fn zeros(d_max: usize) -> Self {
        Self {
            r: vec![0.0; d_max + 1],
        }
    }

    /// All-one sequence (full removal).
    pub fn ones(d_max: usize) -> Self {
        let mut r = vec![1.0; d_max + 1];
        r[0] = 0.0;
        Self { r }
    }

    /// Constant sequence `r_j = value`, the uniform removal.
    pub fn uniform(value: f64, d_max: usize) -> Result<Self, DegreesError> {
        if !(0.0..=1.0).contains(&value) {
            return Err(DegreesError::FractionOutOfRange { degree: 1, value });
        }
        let mut r = vec![value; d_max + 1];
        r[0] = 0.0;
        Ok(Self { r })
    }

    pub fn d_max(&self) -> usize {
        self.r.len() - 1
    }

    /// `r_j`; zero beyond the stored range.
    pub fn fraction(&self, j: usize) -> f64 {
        self.r.get(j).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, j: usize, value: f64) -> Result<(), DegreesError> {
        if j == 0 || j >= self.r.len() {
            return Err(DegreesError::SupportNotCovered {
                have: self.d_max(),
                need: j,
            });
        }
        if !(0.0..=1.0).contains(&value) {
            return Err(DegreesError::FractionOutOfRange { degree: j, value });
        }
        self.r[j] = value;
        Ok(())
    }

    /// Extends to `d_max`, repeating the last stored coordinate. Used when a
    /// sampled degree sequence overshoots the distribution's support (parity
    /// repair can bump one vertex past `d_max`).
    pub fn extended(&self, d_max: usize) -> Self {
        if d_max <= self.d_max() {
            return self.clone();
        }
        let last = self.r[self.r.len() - 1];
        let mut r = self.r.clone();
        r.resize(d_max + 1, last);
        Self { r }
    }

    pub fn to_pairs(&self) -> Vec<(usize, f64)> {
        (1..self.r.len()).map(|j| (j, self.r[j])).collect()
    }

    /// Zero-filled copy covering at least `d_max` (absent degrees mean 0).
    fn widened(&self, d_max: usize) -> Self {
        let mut r = self.r.clone();
        if d_max >= r.len() {
            r.resize(d_max + 1, 0.0);
        }
        Self { r }
    }
}

/// A non-negative measure on degrees, e.g. the removal measure `q_j = p_j r_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMeasure {
    mass: Vec<f64>, // index 0 unused
}

impl FiniteMeasure {
    pub fn new(mass: Vec<f64>) -> Result<Self, DegreesError> {
        for (j, &m) in mass.iter().enumerate().skip(1) {
            if m < 0.0 || !m.is_finite() {
                return Err(DegreesError::NegativeMass { degree: j, mass: m });
            }
        }
        Ok(Self { mass })
    }

    pub fn from_distribution(p: &DegreeDistribution) -> Self {
        Self {
            mass: p.mass.clone(),
        }
    }

    pub fn value(&self, j: usize) -> f64 {
        self.mass.get(j).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.mass.len().max(1) - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().skip(1).sum()
    }

    /// `Σ_{j >= k} mass(j)`.
    pub fn tail(&self, k: usize) -> f64 {
        (k..self.mass.len()).map(|j| self.mass[j]).sum()
    }

    /// Tail-sum stochastic order: `self ≼_st other`.
    pub fn dominated_by(&self, other: &FiniteMeasure) -> bool {
        self.first_dominance_violation(other).is_none()
    }

    /// First `K` at which `tail(K) > other.tail(K)`, if any.
    pub fn first_dominance_violation(&self, other: &FiniteMeasure) -> Option<usize> {
        let d = self.len().max(other.len());
        (1..=d).find(|&k| self.tail(k) > other.tail(k) + MASS_TOL)
    }
}

/// One elementary move of removal mass `eps` from degree `k + l` down to
/// degree `k`: `r_k += eps/p_k`, `r_{k+l} -= eps/p_{k+l}`. Preserves alpha.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonTransform {
    pub k: usize,
    pub l: usize,
    pub eps: f64,
}

/// Mass `eps` moved between two degrees of a measure (`src` to `dst`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassMove {
    pub src: usize,
    pub dst: usize,
    pub eps: f64,
}

/// `alpha = Σ p_j r_j`, the asymptotic proportion of removed vertices.
pub fn alpha_of(p: &DegreeDistribution, r: &AlphaSequence) -> f64 {
    p.support().map(|j| p.mass(j) * r.fraction(j)).sum()
}

/// `E[D r_D] = Σ j p_j r_j`.
pub fn degree_weighted_alpha(p: &DegreeDistribution, r: &AlphaSequence) -> f64 {
    p.support()
        .map(|j| j as f64 * p.mass(j) * r.fraction(j))
        .sum()
}

/// The removal measure `q = (p_j r_j)_j`.
pub fn removal_measure(p: &DegreeDistribution, r: &AlphaSequence) -> FiniteMeasure {
    let mut mass = vec![0.0; p.d_max() + 1];
    for j in p.support() {
        mass[j] = p.mass(j) * r.fraction(j);
    }
    FiniteMeasure { mass }
}

/// Removal of the top `alpha` proportion by degree: the sequence is zero
/// below the top quantile `k_alpha`, one above it, and fills the remainder
/// `(alpha - P(D > k_alpha))/p_{k_alpha}` at the quantile itself.
///
/// Returns the sequence and `k_alpha`.
pub fn top_quantile_sequence(
    p: &DegreeDistribution,
    alpha: f64,
) -> Result<(AlphaSequence, usize), DegreesError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(DegreesError::AlphaOutOfRange(alpha));
    }
    // k_alpha = max { k : P(D >= k) >= alpha }; its class has positive mass.
    let k_alpha = (1..=p.d_max())
        .rev()
        .find(|&k| p.tail(k) >= alpha)
        .expect("alpha < 1 = P(D >= 1)");
    let mut r = AlphaSequence::zeros(p.d_max());
    for j in k_alpha + 1..=p.d_max() {
        r.r[j] = 1.0;
    }
    let above = p.tail(k_alpha + 1);
    r.r[k_alpha] = ((alpha - above) / p.mass(k_alpha)).clamp(0.0, 1.0);
    Ok((r, k_alpha))
}

/// Removal of the bottom `alpha` proportion by degree; mirror of
/// [`top_quantile_sequence`] with ones below the bottom quantile `l_alpha`.
pub fn bottom_quantile_sequence(
    p: &DegreeDistribution,
    alpha: f64,
) -> Result<(AlphaSequence, usize), DegreesError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(DegreesError::AlphaOutOfRange(alpha));
    }
    let l_alpha = (1..=p.d_max())
        .find(|&l| p.head(l) >= alpha)
        .expect("alpha < 1 = P(D <= d_max)");
    let mut r = AlphaSequence::zeros(p.d_max());
    for j in 1..l_alpha {
        r.r[j] = 1.0;
    }
    let below = if l_alpha > 1 {
        p.head(l_alpha - 1)
    } else {
        0.0
    };
    r.r[l_alpha] = ((alpha - below) / p.mass(l_alpha)).clamp(0.0, 1.0);
    Ok((r, l_alpha))
}

/// Applies one mass-lowering transform; the result differs from `r` only at
/// `k` and `k + l` and removes the same total proportion.
pub fn apply_epsilon_transform(
    p: &DegreeDistribution,
    r: &AlphaSequence,
    t: &EpsilonTransform,
) -> Result<AlphaSequence, DegreesError> {
    let (k, hi) = (t.k, t.k + t.l);
    if t.l == 0 {
        return Err(DegreesError::ZeroGap);
    }
    if p.mass(k) <= 0.0 {
        return Err(DegreesError::MasslessCoordinate(k));
    }
    if p.mass(hi) <= 0.0 {
        return Err(DegreesError::MasslessCoordinate(hi));
    }
    let available = p.mass(hi) * r.fraction(hi);
    if t.eps < 0.0 || t.eps > available + ZERO_MASS {
        return Err(DegreesError::EpsTooLarge {
            degree: hi,
            eps: t.eps,
            available,
        });
    }
    let mut out = r.widened(p.d_max());
    let new_low = r.fraction(k) + t.eps / p.mass(k);
    if new_low > 1.0 + ZERO_MASS {
        return Err(DegreesError::FractionOverflow {
            degree: k,
            value: new_low,
        });
    }
    out.r[k] = new_low.clamp(0.0, 1.0);
    out.r[hi] = (r.fraction(hi) - t.eps / p.mass(hi)).clamp(0.0, 1.0);
    Ok(out)
}

/// Tail-sum partial order on sequences: true iff `a ≼_p b`, i.e. the removal
/// measure of `a` is stochastically dominated by that of `b`.
pub fn dominates(p: &DegreeDistribution, a: &AlphaSequence, b: &AlphaSequence) -> bool {
    removal_measure(p, a).dominated_by(&removal_measure(p, b))
}

/// Transport plan between measures of equal total mass with `to ≼_st from`:
/// a chain of downward moves (src > dst) taking `from` to `to`, every
/// intermediate measure non-negative.
///
/// Gains and losses are matched in ascending degree order, so moves come out
/// sorted by source coordinate.
pub(crate) fn downward_transport(
    from: &FiniteMeasure,
    to: &FiniteMeasure,
) -> Result<Vec<MassMove>, DegreesError> {
    let total_from = from.total();
    let total_to = to.total();
    if (total_from - total_to).abs() > MASS_TOL {
        return Err(DegreesError::AlphaMismatch(total_from, total_to));
    }
    if let Some(k) = to.first_dominance_violation(from) {
        return Err(DegreesError::NotDominated(k));
    }
    let d = from.len().max(to.len());
    let mut gains: Vec<(usize, f64)> = Vec::new();
    let mut losses: Vec<(usize, f64)> = Vec::new();
    for j in 1..=d {
        let diff = to.value(j) - from.value(j);
        if diff > ZERO_MASS {
            gains.push((j, diff));
        } else if diff < -ZERO_MASS {
            losses.push((j, -diff));
        }
    }
    let mut moves = Vec::new();
    let (mut gi, mut li) = (0, 0);
    while gi < gains.len() && li < losses.len() {
        let (gdeg, grem) = gains[gi];
        let (ldeg, lrem) = losses[li];
        // Dominance keeps cumulative gains ahead of cumulative losses, so
        // the gain coordinate always sits strictly below the loss coordinate.
        if gdeg >= ldeg {
            return Err(DegreesError::NotDominated(ldeg));
        }
        let eps = grem.min(lrem);
        moves.push(MassMove {
            src: ldeg,
            dst: gdeg,
            eps,
        });
        gains[gi].1 -= eps;
        losses[li].1 -= eps;
        if gains[gi].1 <= ZERO_MASS {
            gi += 1;
        }
        if losses[li].1 <= ZERO_MASS {
            li += 1;
        }
    }
    Ok(moves)
}

/// Upward transport plan for `from ≼_st to`: moves with src < dst taking
/// `from` to `to`. Built by flipping the downward plan of the reverse pair.
pub fn upward_transport(
    from: &FiniteMeasure,
    to: &FiniteMeasure,
) -> Result<Vec<MassMove>, DegreesError> {
    let mut moves = downward_transport(to, from)?;
    moves.reverse();
    for m in &mut moves {
        std::mem::swap(&mut m.src, &mut m.dst);
    }
    Ok(moves)
}

/// Decomposes a dominated pair into elementary transforms: for `r2 ≼_p r` of
/// equal alpha, returns transforms that, applied to `r` in order, reproduce
/// `r2`. Every intermediate sequence is a valid alpha-sequence.
pub fn decompose_to_transforms(
    p: &DegreeDistribution,
    r: &AlphaSequence,
    r2: &AlphaSequence,
) -> Result<Vec<EpsilonTransform>, DegreesError> {
    let (a1, a2) = (alpha_of(p, r), alpha_of(p, r2));
    if (a1 - a2).abs() > MASS_TOL {
        return Err(DegreesError::AlphaMismatch(a1, a2));
    }
    let moves = downward_transport(&removal_measure(p, r), &removal_measure(p, r2))?;
    Ok(moves
        .into_iter()
        .map(|m| EpsilonTransform {
            k: m.dst,
            l: m.src - m.dst,
            eps: m.eps,
        })
        .collect())
}

/// Fold of [`apply_epsilon_transform`] over a transform chain.
pub fn replay_transforms(
    p: &DegreeDistribution,
    r: &AlphaSequence,
    transforms: &[EpsilonTransform],
) -> Result<AlphaSequence, DegreesError> {
    let mut cur = r.clone();
    for t in transforms {
        cur = apply_epsilon_transform(p, &cur, t)?;
    }
    Ok(cur)
}

/// Given an `alpha`-sequence `r` and an `(alpha + eps)`-sequence `r2` with
/// `r ≼_p r2`, builds the smallest extra removal `delta` (an `eps`-sequence)
/// with `r + delta` still dominated by `r2`.
///
/// The construction scans left to right: wherever `r2` falls below `r`, the
/// shortfall is deferred to the first degree at which the running mass
/// difference turns positive again, and the lump is placed there.
pub fn dominating_delta(
    p: &DegreeDistribution,
    r: &AlphaSequence,
    r2: &AlphaSequence,
) -> Result<AlphaSequence, DegreesError> {
    let (a1, a2) = (alpha_of(p, r), alpha_of(p, r2));
    if a2 < a1 - MASS_TOL {
        return Err(DegreesError::AlphaMismatch(a1, a2));
    }
    if !dominates(p, r, r2) {
        let q = removal_measure(p, r);
        let q2 = removal_measure(p, r2);
        return Err(DegreesError::NotDominated(
            q.first_dominance_violation(&q2).unwrap_or(1),
        ));
    }
    let d = p.d_max();
    let mut delta = AlphaSequence::zeros(d);
    if (a2 - a1).abs() <= MASS_TOL {
        return Ok(delta);
    }
    let rr = |j: usize| r.fraction(j);
    let rr2 = |j: usize| r2.fraction(j);
    let mut i = 1;
    while i <= d {
        // Next degree where r2 drops strictly below r; everything before it
        // takes the plain difference.
        let k = (i..=d).find(|&j| rr2(j) < rr(j) - ZERO_MASS);
        let k = match k {
            None => {
                for j in i..=d {
                    delta.r[j] = (rr2(j) - rr(j)).max(0.0);
                }
                break;
            }
            Some(k) => k,
        };
        for j in i..k {
            delta.r[j] = (rr2(j) - rr(j)).max(0.0);
        }
        // First degree past k where the running mass difference recovers.
        let mut acc = 0.0;
        let mut lump = None;
        for j in k..=d {
            acc += p.mass(j) * (rr2(j) - rr(j));
            if j > k && acc > ZERO_MASS {
                lump = Some((j, acc));
                break;
            }
        }
        match lump {
            Some((l, acc)) => {
                // delta is zero on [k, l); the recovered mass lands at l.
                delta.r[l] = acc / p.mass(l);
                i = l + 1;
            }
            None => break, // tail difference is exhausted; nothing to place
        }
    }
    Ok(delta)
}

/// Coordinatewise sum `r + delta`, clamped into [0, 1] at rounding level.
pub fn add_sequences(
    r: &AlphaSequence,
    delta: &AlphaSequence,
) -> Result<AlphaSequence, DegreesError> {
    let d = r.d_max().max(delta.d_max());
    let mut out = AlphaSequence::zeros(d);
    for j in 1..=d {
        let v = r.fraction(j) + delta.fraction(j);
        if v > 1.0 + ZERO_MASS {
            return Err(DegreesError::FractionOverflow {
                degree: j,
                value: v,
            });
        }
        out.r[j] = v.clamp(0.0, 1.0);
    }
    Ok(out)
}

// JSON: degree-keyed maps with decimal-string keys, e.g. {"1": 0.5, "3": 0.5}.

fn serialize_degree_map<S: Serializer>(
    pairs: &[(usize, f64)],
    serializer: S,
) -> Result<S::Ok, S::Error> {
    let mut map = serializer.serialize_map(Some(pairs.len()))?;
    for (j, v) in pairs {
        map.serialize_entry(&j.to_string(), v)?;
    }
    map.end()
}

fn collect_degree_map<'de, A: MapAccess<'de>>(
    mut access: A,
) -> Result<Vec<(usize, f64)>, A::Error> {
    let mut pairs = Vec::new();
    while let Some((key, value)) = access.next_entry::<String, f64>()? {
        let degree: usize = key
            .parse()
            .map_err(|_| serde::de::Error::custom(DegreesError::BadDegreeKey(key)))?;
        pairs.push((degree, value));
    }
    Ok(pairs)
}

impl Serialize for DegreeDistribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serialize_degree_map(&self.to_pairs(), serializer)
    }
}

impl<'de> Deserialize<'de> for DegreeDistribution {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = DegreeDistribution;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from degree strings to masses")
            }
            fn visit_map<A: MapAccess<'de>>(self, access: A) -> Result<Self::Value, A::Error> {
                let pairs = collect_degree_map(access)?;
                DegreeDistribution::from_pairs(&pairs).map_err(serde::de::Error::custom)
            }
        }
        deserializer.deserialize_map(V)
    }
}

impl Serialize for AlphaSequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serialize_degree_map(&self.to_pairs(), serializer)
    }
}

impl<'de> Deserialize<'de> for AlphaSequence {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = AlphaSequence;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from degree strings to removal fractions")
            }
            fn visit_map<A: MapAccess<'de>>(self, access: A) -> Result<Self::Value, A::Error> {
                let pairs = collect_degree_map(access)?;
                AlphaSequence::from_pairs(&pairs).map_err(serde::de::Error::custom)
            }
        }
        deserializer.deserialize_map(V)
    }
}

/// Degree histogram view used in reports.
pub fn degree_map(pairs: &[(usize, f64)]) -> BTreeMap<usize, f64> {
    pairs.iter().copied().collect()
}
