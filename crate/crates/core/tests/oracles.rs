//! Independent-oracle equivalence tests.
//!
//! Every numerically delicate path is checked against a slower, independent
//! computation: exact rational arithmetic for the test tails, a brute-force
//! candidate-grid scan for the modified Tarone adjusted p-values, naive
//! enumeration for the modified Bonferroni critical constant, and the
//! literal reject-and-repeat loop for Tarone-Holm.

mod common;

use common::rational;
use common::{leq, mbonf_critical_naive, mod_tarone_adjusted_naive, random_family, rng, tarone_holm_loop};
use discrete_fwer::exact::{
    binomial_exact, fisher_exact, fisher_exact_lower, PoissonPairInput, TwoByTwoInput,
};
use discrete_fwer::procedures::{
    mbonf_critical, mholm_adjusted, mholm_step_down, mhoch_adjusted, mhoch_step_up,
    mod_tarone_adjusted, tarone_holm_adjusted,
};

#[test]
fn fisher_two_sided_matches_exact_rational_up_to_c20() {
    for &(n1, n2) in &[(600u64, 650u64), (25, 25), (9, 7)] {
        for c in 0..=20u64 {
            let pmf = rational::hyper_pmf(n1, n2, c);
            let exact = rational::two_sided(&pmf);
            let lo = c.saturating_sub(n2);
            for x1 in lo..=c.min(n1) {
                let r = fisher_exact(&TwoByTwoInput::new(x1, c - x1, n1, n2).unwrap()).unwrap();
                rational::assert_matches(&r.support, r.observed_p, &exact, (x1 - lo) as usize);
            }
        }
    }
}

#[test]
fn fisher_lower_matches_exact_rational_up_to_c20() {
    for &(n1, n2) in &[(600u64, 650u64), (25, 25), (9, 7)] {
        for c in 0..=20u64 {
            let pmf = rational::hyper_pmf(n1, n2, c);
            let exact = rational::lower_tail(&pmf);
            let lo = c.saturating_sub(n2);
            for x1 in lo..=c.min(n1) {
                let r =
                    fisher_exact_lower(&TwoByTwoInput::new(x1, c - x1, n1, n2).unwrap()).unwrap();
                rational::assert_matches(&r.support, r.observed_p, &exact, (x1 - lo) as usize);
            }
        }
    }
}

#[test]
fn binomial_matches_exact_rational_up_to_c20() {
    for c in 0..=20u64 {
        let pmf = rational::binom_half_pmf(c);
        let exact = rational::lower_tail(&pmf);
        for x1 in 0..=c {
            let r = binomial_exact(&PoissonPairInput::new(x1, c - x1)).unwrap();
            rational::assert_matches(&r.support, r.observed_p, &exact, x1 as usize);
        }
    }
}

#[test]
fn log_choose_matches_big_integer_product() {
    // the exact coefficient still fits in f64's range, so its logarithm is
    // an independent high-precision reference
    let cases = [(1250u64, 16u64), (600, 13), (650, 20), (80, 40)];
    for (n, k) in cases {
        let exact = rational::big_choose(n, k);
        let want = num::traits::ToPrimitive::to_f64(&exact).unwrap().ln();
        let got = discrete_fwer::exact::log_choose(n, k).unwrap();
        assert!(
            (got - want).abs() <= 1e-12 * want.abs(),
            "ln C({n},{k}): {got} vs {want}"
        );
    }
}

#[test]
fn support_union_matches_naive_set_union() {
    let naive = |family: &discrete_fwer::Family, from_rank: usize| -> Vec<f64> {
        let mut all: Vec<f64> = family.sorted_order()[from_rank - 1..]
            .iter()
            .flat_map(|&i| family.hypotheses()[i].null.support().iter().copied())
            .collect();
        all.sort_by(f64::total_cmp);
        all.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
        all
    };

    let clinical = discrete_fwer::clinical::family().unwrap();
    for from_rank in 1..=clinical.len() {
        assert_eq!(clinical.support_union(from_rank).unwrap(), naive(&clinical, from_rank));
    }

    let mut rng = rng(0x0515);
    for _ in 0..100 {
        let family = random_family(&mut rng, 6);
        for from_rank in 1..=family.len() {
            assert_eq!(family.support_union(from_rank).unwrap(), naive(&family, from_rank));
        }
    }
}

#[test]
fn mod_tarone_adjusted_matches_grid_scan() {
    let mut rng = rng(0xAAFE);
    for _ in 0..300 {
        let family = random_family(&mut rng, 4);
        for (i, &adjusted) in mod_tarone_adjusted(&family).iter().enumerate() {
            let naive = mod_tarone_adjusted_naive(&family, i);
            assert!(
                (adjusted - naive).abs() <= 1e-9,
                "hypothesis {i}: {adjusted} vs grid {naive}"
            );
        }
    }
}

#[test]
fn mbonf_critical_matches_naive_enumeration() {
    let mut rng = rng(0xBEEF);
    for trial in 0..300 {
        let family = random_family(&mut rng, 6);
        let alpha = 0.01 + 0.98 * (trial as f64 / 300.0);
        let fast = mbonf_critical(&family, alpha).unwrap();
        let naive = mbonf_critical_naive(&family, alpha);
        assert!(
            (fast - naive).abs() <= 1e-12 * naive.abs(),
            "alpha={alpha}: {fast} vs naive {naive}"
        );
    }
}

#[test]
fn tarone_holm_adjusted_matches_literal_loop() {
    let mut rng = rng(0xC0FFEE);
    let alphas: Vec<f64> = (1..40).map(|i| i as f64 / 40.0).collect();
    for _ in 0..120 {
        let family = random_family(&mut rng, 5);
        let adjusted = tarone_holm_adjusted(&family);
        for &alpha in &alphas {
            let loop_rejected = tarone_holm_loop(&family, alpha);
            let adj_rejected: Vec<bool> = adjusted.iter().map(|&a| leq(a, alpha)).collect();
            assert_eq!(
                loop_rejected, adj_rejected,
                "alpha={alpha}, adjusted={adjusted:?}"
            );
        }
    }
}

#[test]
fn mholm_and_mhoch_step_rules_match_adjusted() {
    let mut rng = rng(0xD00D);
    let alphas: Vec<f64> = (1..=50).map(|i| i as f64 / 51.0).collect();
    for _ in 0..150 {
        let family = random_family(&mut rng, 6);
        let holm_adj = mholm_adjusted(&family);
        let hoch_adj = mhoch_adjusted(&family);
        for &alpha in &alphas {
            let down = mholm_step_down(&family, alpha).unwrap();
            let want: Vec<bool> = holm_adj.iter().map(|&a| leq(a, alpha)).collect();
            assert_eq!(down, want, "mholm alpha={alpha}");
            let up = mhoch_step_up(&family, alpha).unwrap();
            let want: Vec<bool> = hoch_adj.iter().map(|&a| leq(a, alpha)).collect();
            assert_eq!(up, want, "mhoch alpha={alpha}");
        }
    }
}
