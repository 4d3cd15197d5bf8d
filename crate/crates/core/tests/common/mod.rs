//! Shared generators for the randomized property suites. Everything is
//! driven by explicit ChaCha streams so failures replay exactly.

// Each test binary compiles its own copy; not every binary uses every helper.
#![allow(dead_code)]

use cmkill::degrees::{
    alpha_of, apply_epsilon_transform, AlphaSequence, DegreeDistribution, EpsilonTransform,
};
use cmkill::theory::nu_r;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn test_rng(seed: u64) -> ChaCha8Rng {
    cmkill::rng::stream(seed, 0, cmkill::rng::Purpose::Estimator)
}

/// Random finite-support distribution: 2-5 atoms among degrees 1..=12.
pub fn random_distribution(rng: &mut ChaCha8Rng) -> DegreeDistribution {
    let support_size = rng.random_range(2..=5);
    let mut degrees: Vec<usize> = (1..=12).collect();
    degrees.shuffle(rng);
    let mut chosen: Vec<usize> = degrees[..support_size].to_vec();
    chosen.sort_unstable();
    let weights: Vec<f64> = (0..support_size)
        .map(|_| rng.random_range(0.05..1.0))
        .collect();
    let total: f64 = weights.iter().sum();
    let pairs: Vec<(usize, f64)> = chosen
        .into_iter()
        .zip(weights)
        .map(|(j, w)| (j, w / total))
        .collect();
    DegreeDistribution::from_pairs(&pairs).expect("generator output is valid")
}

/// Random distribution with a comfortably supercritical branching ratio.
pub fn random_supercritical(rng: &mut ChaCha8Rng) -> DegreeDistribution {
    loop {
        let p = random_distribution(rng);
        if p.nu() > 1.15 {
            return p;
        }
    }
}

/// Random removal fractions, `r_j ~ U(0, cap)` on the support of `p`.
pub fn random_sequence(p: &DegreeDistribution, cap: f64, rng: &mut ChaCha8Rng) -> AlphaSequence {
    let pairs: Vec<(usize, f64)> = p
        .support()
        .map(|j| (j, rng.random_range(0.0..cap)))
        .collect();
    AlphaSequence::from_pairs(&pairs).expect("generator output is valid")
}

/// Random `(p, r)` pair that stays supercritical after removal.
pub fn random_supercritical_pair(rng: &mut ChaCha8Rng) -> (DegreeDistribution, AlphaSequence) {
    loop {
        let p = random_supercritical(rng);
        let r = random_sequence(&p, 0.5, rng);
        if nu_r(&p, &r) > 1.1 {
            return (p, r);
        }
    }
}

/// One random valid mass-lowering transform on `r`, if any coordinate pair
/// has room.
pub fn random_transform(
    p: &DegreeDistribution,
    r: &AlphaSequence,
    rng: &mut ChaCha8Rng,
) -> Option<EpsilonTransform> {
    let support: Vec<usize> = p.support().collect();
    for _ in 0..40 {
        let k = support[rng.random_range(0..support.len())];
        let hi = support[rng.random_range(0..support.len())];
        if k >= hi {
            continue;
        }
        let room = (p.mass(hi) * r.fraction(hi)).min(p.mass(k) * (1.0 - r.fraction(k)));
        if room < 1e-9 {
            continue;
        }
        let eps = rng.random_range(0.1..0.9) * room;
        return Some(EpsilonTransform { k, l: hi - k, eps });
    }
    None
}

/// Applies up to `steps` random transforms; the result is dominated by `r`
/// with the same alpha.
pub fn random_down_chain(
    p: &DegreeDistribution,
    r: &AlphaSequence,
    steps: usize,
    rng: &mut ChaCha8Rng,
) -> AlphaSequence {
    let mut cur = r.clone();
    for _ in 0..steps {
        if let Some(t) = random_transform(p, &cur, rng) {
            cur = apply_epsilon_transform(p, &cur, &t).expect("generated transform is valid");
        }
    }
    cur
}

/// Pair `(r, r2)` with equal alpha and `r2 ≼_p r`.
pub fn random_dominated_pair(
    p: &DegreeDistribution,
    rng: &mut ChaCha8Rng,
) -> (AlphaSequence, AlphaSequence) {
    let r = random_sequence(p, 0.7, rng);
    let steps = rng.random_range(1..=4);
    let r2 = random_down_chain(p, &r, steps, rng);
    (r, r2)
}

/// Pair `(r, r2)` with `alpha(r2) = alpha(r) + eps`, `eps > 0`, and `r ≼_p r2`.
pub fn random_unequal_dominating_pair(
    p: &DegreeDistribution,
    rng: &mut ChaCha8Rng,
) -> (AlphaSequence, AlphaSequence) {
    loop {
        let base = random_sequence(p, 0.4, rng);
        // Coordinatewise bump keeps every tail sum at least as large.
        let pairs: Vec<(usize, f64)> = p
            .support()
            .map(|j| (j, (base.fraction(j) + rng.random_range(0.0..0.4)).min(1.0)))
            .collect();
        let r2 = AlphaSequence::from_pairs(&pairs).unwrap();
        // Lowering mass inside r only shrinks its tails, so dominance holds
        // while the alphas stay apart.
        let r = random_down_chain(p, &base, rng.random_range(0..3), rng);
        let eps = alpha_of(p, &r2) - alpha_of(p, &r);
        if eps > 1e-3 && eps < 0.3 {
            return (r, r2);
        }
    }
}

/// Random stochastically ordered distribution pair `p ≼_st q`, built by
/// pushing mass of `p` upward.
pub fn random_ordered_distributions(
    rng: &mut ChaCha8Rng,
) -> (DegreeDistribution, DegreeDistribution) {
    let p = random_distribution(rng);
    let d_top = 14;
    let mut mass: Vec<f64> = (0..=d_top).map(|j| p.mass(j)).collect();
    let moves = rng.random_range(1..=4);
    for _ in 0..moves {
        let support: Vec<usize> = (1..=d_top).filter(|&j| mass[j] > 1e-6).collect();
        let lo = support[rng.random_range(0..support.len())];
        if lo + 1 > d_top {
            continue;
        }
        let hi = rng.random_range(lo + 1..=d_top);
        let eps = rng.random_range(0.1..0.8) * mass[lo];
        mass[lo] -= eps;
        mass[hi] += eps;
    }
    let pairs: Vec<(usize, f64)> = (1..=d_top)
        .filter(|&j| mass[j] > 0.0)
        .map(|j| (j, mass[j]))
        .collect();
    let q = DegreeDistribution::from_pairs(&pairs).expect("mass moves preserve normalization");
    (p, q)
}
