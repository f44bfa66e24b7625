//! Shared helpers for the integration test suites: random family
//! generation backed by the exact tests, comparison slack matching the
//! library's, and independent brute-force oracles.

#![allow(dead_code)]

use discrete_fwer::exact::{
    binomial_exact, fisher_exact, fisher_exact_lower, PoissonPairInput, TwoByTwoInput,
};
use discrete_fwer::{DiscreteNull, Family, Hypothesis};
use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `a <= b` with the same relative slack the library uses for support and
/// critical-value comparisons.
pub fn leq(a: f64, b: f64) -> bool {
    a <= b + discrete_fwer::REL_TOL * b.abs()
}

/// One hypothesis with a support drawn from a random exact test (two-sided
/// or one-sided Fisher, or conditional binomial) and an observed p-value
/// drawn uniformly from that support.
pub fn random_hypothesis(rng: &mut ChaCha8Rng, max_total: u64) -> Hypothesis {
    let c = rng.random_range(0..=max_total);
    let result = match rng.random_range(0..3u8) {
        0 | 1 => {
            let pairs = [(25u64, 25u64), (40, 30), (600, 650)];
            let (n1, n2) = pairs[rng.random_range(0..pairs.len())];
            let x1 = rng.random_range(0..=c.min(n1));
            let input = TwoByTwoInput::new(x1, c - x1, n1, n2).unwrap();
            if rng.random_bool(0.5) {
                fisher_exact(&input).unwrap()
            } else {
                fisher_exact_lower(&input).unwrap()
            }
        }
        _ => {
            let x1 = rng.random_range(0..=c);
            binomial_exact(&PoissonPairInput::new(x1, c - x1)).unwrap()
        }
    };
    let observed = result.support[rng.random_range(0..result.support.len())];
    Hypothesis::new(observed, DiscreteNull::new(result.support).unwrap())
}

/// A family of 1..=max_m hypotheses with supports from random exact tests.
pub fn random_family(rng: &mut ChaCha8Rng, max_m: usize) -> Family {
    let m = rng.random_range(1..=max_m);
    Family::new((0..m).map(|_| random_hypothesis(rng, 12)).collect()).unwrap()
}

/// A family whose hypotheses all share one support (drawn from a random
/// conditional binomial), with independent observed values.
pub fn random_identical_support_family(rng: &mut ChaCha8Rng, max_m: usize) -> Family {
    let c = rng.random_range(1..=12u64);
    let x1 = rng.random_range(0..=c);
    let support = binomial_exact(&PoissonPairInput::new(x1, c - x1))
        .unwrap()
        .support;
    let m = rng.random_range(1..=max_m);
    Family::new(
        (0..m)
            .map(|_| {
                let observed = support[rng.random_range(0..support.len())];
                Hypothesis::new(observed, DiscreteNull::new(support.clone()).unwrap())
            })
            .collect(),
    )
    .unwrap()
}

/// Rejection set (original indices) of a decision.
pub fn rejection_set(rejected: &[bool]) -> Vec<usize> {
    rejected
        .iter()
        .enumerate()
        .filter_map(|(i, &r)| r.then_some(i))
        .collect()
}

pub fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.contains(x))
}

// ---------------------------------------------------------------------------
// Independent brute-force oracles
// ---------------------------------------------------------------------------

/// Naive modified-Bonferroni critical constant: linear scan of the union of
/// supports, tracking the largest point whose CDF sum stays within alpha.
pub fn mbonf_critical_naive(family: &Family, alpha: f64) -> f64 {
    let mut points: Vec<f64> = family
        .hypotheses()
        .iter()
        .flat_map(|h| h.null.support().iter().copied())
        .collect();
    points.sort_by(f64::total_cmp);
    let mut best = None;
    for &p in &points {
        let total: f64 = family
            .hypotheses()
            .iter()
            .map(|h| {
                // naive CDF: largest support element <= p, linear scan
                h.null
                    .support()
                    .iter()
                    .copied()
                    .filter(|&s| leq(s, p))
                    .fold(0.0, f64::max)
            })
            .sum();
        if leq(total, alpha) {
            best = Some(p);
        }
    }
    best.unwrap_or(alpha / family.len() as f64)
}

/// Literal Tarone counting function over a subset of hypotheses.
fn m_count(family: &Family, active: &[usize], gamma: f64, k: usize) -> usize {
    active
        .iter()
        .filter(|&&j| leq(family.hypotheses()[j].null.min_attainable(), gamma / k as f64))
        .count()
}

fn k_of(family: &Family, active: &[usize], gamma: f64) -> usize {
    (1..=active.len())
        .find(|&k| m_count(family, active, gamma, k) <= k)
        .unwrap()
}

/// Whether hypothesis `i` is rejected at level `alpha` by the modified
/// Tarone rule restricted to `active`: exists `gamma <= alpha` with
/// `P_i <= gamma / K(gamma)`. Scans the finite candidate grid
/// `{k p_j*} union {k P_j}` intersected with `(0, alpha]`.
pub fn mod_tarone_rejects_on(family: &Family, active: &[usize], i: usize, alpha: f64) -> bool {
    let p_i = family.hypotheses()[i].observed_p;
    candidate_gammas(family, active)
        .into_iter()
        .filter(|&g| g > 0.0 && leq(g, alpha))
        .any(|g| leq(p_i, g / k_of(family, active, g) as f64))
}

/// Brute-force modified-Tarone adjusted p-value over the candidate grid:
/// the smallest rejecting `gamma`, capped at 1.
pub fn mod_tarone_adjusted_naive(family: &Family, i: usize) -> f64 {
    let active: Vec<usize> = (0..family.len()).collect();
    let p_i = family.hypotheses()[i].observed_p;
    candidate_gammas(family, &active)
        .into_iter()
        .filter(|&g| g > 0.0 && leq(p_i, g / k_of(family, &active, g) as f64))
        .fold(f64::INFINITY, f64::min)
        .min(1.0)
}

fn candidate_gammas(family: &Family, active: &[usize]) -> Vec<f64> {
    let mut gs = Vec::new();
    for k in 1..=active.len() {
        for &j in active {
            let h = &family.hypotheses()[j];
            gs.push(k as f64 * h.null.min_attainable());
            gs.push(k as f64 * h.observed_p);
        }
    }
    gs.retain(|&g| g > 0.0 && g <= 1.0 + discrete_fwer::REL_TOL);
    gs
}

/// The literal Tarone-Holm loop at level `alpha`: reject everything the
/// modified Tarone rule flags within the active set, remove the whole batch,
/// repeat until no rejection.
pub fn tarone_holm_loop(family: &Family, alpha: f64) -> Vec<bool> {
    let mut rejected = vec![false; family.len()];
    let mut active: Vec<usize> = (0..family.len()).collect();
    loop {
        let batch: Vec<usize> = active
            .iter()
            .copied()
            .filter(|&i| mod_tarone_rejects_on(family, &active, i, alpha))
            .collect();
        if batch.is_empty() {
            return rejected;
        }
        for i in batch {
            rejected[i] = true;
            active.retain(|&j| j != i);
        }
    }
}

// ---------------------------------------------------------------------------
// Exact rational arithmetic for the test tails
// ---------------------------------------------------------------------------

pub mod rational {
    use num::bigint::BigInt;
    use num::rational::BigRational;
    use num::traits::{One, ToPrimitive, Zero};

    pub fn big_choose(n: u64, k: u64) -> BigInt {
        if k > n {
            return BigInt::zero();
        }
        let k = k.min(n - k);
        let mut result = BigInt::one();
        for i in 0..k {
            result *= BigInt::from(n - i);
            result /= BigInt::from(i + 1);
        }
        result
    }

    pub fn to_f64(r: &BigRational) -> f64 {
        r.numer().to_f64().unwrap() / r.denom().to_f64().unwrap()
    }

    /// Exact hypergeometric pmf of the group-1 count given margins.
    pub fn hyper_pmf(n1: u64, n2: u64, c: u64) -> Vec<BigRational> {
        let lo = c.saturating_sub(n2);
        let hi = c.min(n1);
        let denom = big_choose(n1 + n2, c);
        (lo..=hi)
            .map(|k| BigRational::new(big_choose(n1, k) * big_choose(n2, c - k), denom.clone()))
            .collect()
    }

    pub fn binom_half_pmf(c: u64) -> Vec<BigRational> {
        let denom = BigInt::one() << c;
        (0..=c)
            .map(|k| BigRational::new(big_choose(c, k), denom.clone()))
            .collect()
    }

    /// Exact two-sided minimum-likelihood p-values.
    pub fn two_sided(pmf: &[BigRational]) -> Vec<BigRational> {
        pmf.iter()
            .map(|p0| pmf.iter().filter(|p| *p <= p0).sum())
            .collect()
    }

    /// Exact lower-tail p-values.
    pub fn lower_tail(pmf: &[BigRational]) -> Vec<BigRational> {
        let mut running = BigRational::zero();
        pmf.iter()
            .map(|p| {
                running += p;
                running.clone()
            })
            .collect()
    }

    /// Asserts that a computed support/observed pair matches the exact
    /// attainable values within 1e-12 relative error.
    pub fn assert_matches(support: &[f64], observed: f64, exact: &[BigRational], obs_idx: usize) {
        let mut want: Vec<f64> = exact.iter().map(to_f64).collect();
        want.sort_by(f64::total_cmp);
        want.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
        assert_eq!(
            support.len(),
            want.len(),
            "support size mismatch: {support:?} vs {want:?}"
        );
        for (s, w) in support.iter().zip(&want) {
            assert!(
                (s - w).abs() <= 1e-12 * w.abs(),
                "support value {s} vs exact {w}"
            );
        }
        let want_obs = to_f64(&exact[obs_idx]);
        assert!(
            (observed - want_obs).abs() <= 1e-12 * want_obs.abs(),
            "observed {observed} vs exact {want_obs}"
        );
    }
}
