//! Monte Carlo estimation of FWER, minimal power, and mean rejections.
//!
//! Two designs are supported, matching common two-group count settings:
//!
//! * **FET** — per hypothesis, binomial event counts `X_1 ~ Bin(N, p_1)`,
//!   `X_2 ~ Bin(N, p_2)` per arm, tested one-sided against `p_1 < p_2` with
//!   the Fisher exact test conditional on the realized margins.
//! * **BET** — per hypothesis, Poisson counts `X_1 ~ Poi(l_1)`,
//!   `X_2 ~ Poi(l_2)`, tested one-sided against `l_1 < l_2` with the
//!   conditional binomial test. With block correlation `rho > 0`, counts
//!   share common Poisson components within the true-null and false-null
//!   blocks, preserving the marginals while inducing pairwise correlation
//!   `rho` within each block.
//!
//! Replicates are independent work units: replicate `r` draws from its own
//! ChaCha stream derived from `(seed, r)`, so results are bit-identical for
//! a fixed seed regardless of how many worker threads run them.

use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use rand_distr::{Binomial, Distribution, Poisson};
use rayon::prelude::*;

use crate::exact::{binomial_exact, fisher_exact_lower, PoissonPairInput, TwoByTwoInput};
use crate::procedures::{apply, ProcedureId};
use crate::{Error, Family, Hypothesis, Result};

/// Which exact test drives the simulated hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestKind {
    Fet,
    Bet,
}

impl std::str::FromStr for TestKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fet" => Ok(TestKind::Fet),
            "bet" => Ok(TestKind::Bet),
            _ => Err(Error::InvalidConfig(format!(
                "test_kind must be FET or BET, got {s:?}"
            ))),
        }
    }
}

/// One Monte Carlo scenario.
///
/// `null_rates` and `alt_rates` are per-arm parameters `(group 1, group 2)`:
/// success probabilities for FET, Poisson means for BET. The first
/// `round(m * pi0)` hypotheses are true nulls.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub test_kind: TestKind,
    pub m: usize,
    pub pi0: f64,
    /// Per-arm binomial sample size `N` (FET only).
    pub sample_size: u64,
    pub null_rates: (f64, f64),
    pub alt_rates: (f64, f64),
    /// Within-block pairwise correlation (BET only), in `[0, 1)`.
    pub rho: f64,
    /// Replicate count `B`.
    pub replicates: u64,
    pub alpha: f64,
    pub seed: u64,
}

impl SimConfig {
    /// FET scenario with the standard rates: null `p = 0.1` in both arms,
    /// alternative `0.1` vs `0.2`.
    pub fn fet(m: usize, pi0: f64, sample_size: u64) -> Self {
        Self {
            test_kind: TestKind::Fet,
            m,
            pi0,
            sample_size,
            null_rates: (0.1, 0.1),
            alt_rates: (0.1, 0.2),
            rho: 0.0,
            replicates: 2000,
            alpha: 0.05,
            seed: 0,
        }
    }

    /// BET scenario with the standard rates: null `lambda = 2` in both arms,
    /// alternative `2` vs `10`.
    pub fn bet(m: usize, pi0: f64, rho: f64) -> Self {
        Self {
            test_kind: TestKind::Bet,
            m,
            pi0,
            sample_size: 0,
            null_rates: (2.0, 2.0),
            alt_rates: (2.0, 10.0),
            rho,
            replicates: 2000,
            alpha: 0.05,
            seed: 0,
        }
    }

    /// Number of true null hypotheses, `m0 = round(m * pi0)` clamped to
    /// `0..=m`.
    pub fn true_null_count(&self) -> usize {
        ((self.m as f64 * self.pi0).round() as usize).min(self.m)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.m == 0 {
            return fail("m must be at least 1".into());
        }
        if !(self.pi0 > 0.0 && self.pi0 <= 1.0) {
            return fail(format!("pi0 must be in (0, 1], got {}", self.pi0));
        }
        if self.replicates == 0 {
            return fail("B must be at least 1".into());
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return fail(format!("alpha must be in (0, 1), got {}", self.alpha));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return fail(format!("rho must be in [0, 1), got {}", self.rho));
        }
        match self.test_kind {
            TestKind::Fet => {
                if self.sample_size == 0 {
                    return fail("N (per-arm sample size) must be at least 1".into());
                }
                for p in [
                    self.null_rates.0,
                    self.null_rates.1,
                    self.alt_rates.0,
                    self.alt_rates.1,
                ] {
                    if !(0.0..=1.0).contains(&p) {
                        return fail(format!("FET rates must be probabilities, got {p}"));
                    }
                }
                if self.rho != 0.0 {
                    return fail("block correlation is only supported for BET".into());
                }
            }
            TestKind::Bet => {
                for l in [
                    self.null_rates.0,
                    self.null_rates.1,
                    self.alt_rates.0,
                    self.alt_rates.1,
                ] {
                    if l <= 0.0 {
                        return fail(format!("BET rates must be positive, got {l}"));
                    }
                }
                // the shared group-1 component assumes one common rate
                if self.rho > 0.0 && self.null_rates.0 != self.alt_rates.0 {
                    return fail(
                        "block-dependent BET requires equal group-1 rates for nulls and alternatives"
                            .into(),
                    );
                }
            }
        }
        Ok(())
    }
}

/// Estimates for one procedure over `B` replicates.
///
/// `fwer` is the fraction of replicates rejecting at least one true null;
/// `min_power` the fraction rejecting at least one false null. When the
/// scenario has no false nulls (`pi0 = 1`), minimal power is reported as 0
/// with `min_power_defined = false`. Standard errors are binomial:
/// `sqrt(r (1 - r) / B)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub procedure: ProcedureId,
    pub fwer: f64,
    pub fwer_se: f64,
    pub min_power: f64,
    pub min_power_se: f64,
    pub min_power_defined: bool,
    pub mean_rejections: f64,
}

/// splitmix64 finalizer over `(seed, r)`; gives every replicate its own
/// well-separated ChaCha seed.
fn mix(seed: u64, r: u64) -> u64 {
    let mut z = seed ^ r.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic per-replicate stream.
pub fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(seed, replicate))
}

fn draw_binomial<R: Rng>(rng: &mut R, n: u64, p: f64) -> Result<u64> {
    let dist = Binomial::new(n, p)
        .map_err(|e| Error::InvalidConfig(format!("binomial({n}, {p}): {e}")))?;
    Ok(dist.sample(rng))
}

fn draw_poisson<R: Rng>(rng: &mut R, lambda: f64) -> Result<u64> {
    if lambda == 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(lambda)
        .map_err(|e| Error::InvalidConfig(format!("poisson({lambda}): {e}")))?;
    Ok(dist.sample(rng) as u64)
}

fn truth_labels(cfg: &SimConfig) -> Vec<bool> {
    let m0 = cfg.true_null_count();
    (0..cfg.m).map(|i| i < m0).collect()
}

/// One FET replicate: independent binomial pairs per hypothesis, tested
/// one-sided conditional on the realized margins. Returns the family and
/// per-hypothesis true-null labels.
pub fn gen_fet_replicate<R: Rng>(cfg: &SimConfig, rng: &mut R) -> Result<(Family, Vec<bool>)> {
    let truth = truth_labels(cfg);
    let n = cfg.sample_size;
    let hypotheses = truth
        .iter()
        .map(|&is_null| {
            let (p1, p2) = if is_null { cfg.null_rates } else { cfg.alt_rates };
            let x1 = draw_binomial(rng, n, p1)?;
            let x2 = draw_binomial(rng, n, p2)?;
            let result = fisher_exact_lower(&TwoByTwoInput::new(x1, x2, n, n)?)?;
            Ok(Hypothesis::from(result))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((Family::new(hypotheses)?, truth))
}

fn bet_family(xs: Vec<(u64, u64)>) -> Result<Family> {
    let hypotheses = xs
        .into_iter()
        .map(|(x1, x2)| Ok(Hypothesis::from(binomial_exact(&PoissonPairInput::new(x1, x2))?)))
        .collect::<Result<Vec<_>>>()?;
    Family::new(hypotheses)
}

/// One independent BET replicate: per hypothesis, a pair of independent
/// Poisson counts fed to the conditional binomial test.
pub fn gen_bet_replicate_indep<R: Rng>(cfg: &SimConfig, rng: &mut R) -> Result<(Family, Vec<bool>)> {
    let truth = truth_labels(cfg);
    let xs = truth
        .iter()
        .map(|&is_null| {
            let (l1, l2) = if is_null { cfg.null_rates } else { cfg.alt_rates };
            Ok((draw_poisson(rng, l1)?, draw_poisson(rng, l2)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((bet_family(xs)?, truth))
}

/// Draws the block-dependent Poisson counts: all group-1 counts share one
/// component `Y01 ~ Poi(rho l1)`, the true-null group-2 block shares one at
/// rate `rho * l2_null`, and the false-null block one at `rho * l2_alt`, so
/// every marginal stays Poisson at its configured rate while within-block
/// pairs have correlation `rho`.
fn draw_block_counts<R: Rng>(cfg: &SimConfig, rng: &mut R) -> Result<Vec<(u64, u64)>> {
    let truth = truth_labels(cfg);
    let rho = cfg.rho;
    let l1 = cfg.null_rates.0;

    let shared1 = draw_poisson(rng, rho * l1)?;
    let x1: Vec<u64> = (0..cfg.m)
        .map(|_| Ok(draw_poisson(rng, (1.0 - rho) * l1)? + shared1))
        .collect::<Result<_>>()?;

    let shared2_null = draw_poisson(rng, rho * cfg.null_rates.1)?;
    let shared2_alt = draw_poisson(rng, rho * cfg.alt_rates.1)?;
    let x2: Vec<u64> = truth
        .iter()
        .map(|&is_null| {
            let (l2, shared) = if is_null {
                (cfg.null_rates.1, shared2_null)
            } else {
                (cfg.alt_rates.1, shared2_alt)
            };
            Ok(draw_poisson(rng, (1.0 - rho) * l2)? + shared)
        })
        .collect::<Result<_>>()?;

    Ok(x1.into_iter().zip(x2).collect())
}

/// One block-dependent BET replicate: shared Poisson components within the
/// true-null and false-null blocks induce pairwise correlation `rho` while
/// preserving every marginal; the two groups stay independent.
pub fn gen_bet_replicate_block<R: Rng>(cfg: &SimConfig, rng: &mut R) -> Result<(Family, Vec<bool>)> {
    let truth = truth_labels(cfg);
    let xs = draw_block_counts(cfg, rng)?;
    Ok((bet_family(xs)?, truth))
}

/// Draws one replicate according to the configured design.
pub fn gen_replicate<R: Rng>(cfg: &SimConfig, rng: &mut R) -> Result<(Family, Vec<bool>)> {
    match (cfg.test_kind, cfg.rho) {
        (TestKind::Fet, _) => gen_fet_replicate(cfg, rng),
        (TestKind::Bet, 0.0) => gen_bet_replicate_indep(cfg, rng),
        (TestKind::Bet, _) => gen_bet_replicate_block(cfg, rng),
    }
}

fn binomial_se(rate: f64, b: u64) -> f64 {
    (rate * (1.0 - rate) / b as f64).sqrt()
}

/// Runs `B` replicates and aggregates per-procedure estimates.
///
/// Replicates run in parallel; each uses its own `(seed, r)` stream and the
/// aggregation is a fixed-order reduction, so the output is independent of
/// the worker count.
pub fn estimate(cfg: &SimConfig, procedures: &[ProcedureId]) -> Result<Vec<SimResult>> {
    cfg.validate()?;
    if procedures.is_empty() {
        return Err(Error::InvalidConfig("no procedures requested".into()));
    }
    let per_replicate: Vec<Vec<(bool, bool, usize)>> = (0..cfg.replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = replicate_rng(cfg.seed, r);
            let (family, is_true_null) = gen_replicate(cfg, &mut rng)?;
            procedures
                .iter()
                .map(|&id| {
                    let decision = apply(id, &family, cfg.alpha)?;
                    let any_true_null = decision
                        .rejected
                        .iter()
                        .zip(&is_true_null)
                        .any(|(&rej, &null)| rej && null);
                    let any_false_null = decision
                        .rejected
                        .iter()
                        .zip(&is_true_null)
                        .any(|(&rej, &null)| rej && !null);
                    Ok((any_true_null, any_false_null, decision.rejection_count()))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let b = cfg.replicates;
    let has_false_nulls = cfg.true_null_count() < cfg.m;
    Ok(procedures
        .iter()
        .enumerate()
        .map(|(j, &procedure)| {
            let mut v_hits = 0u64;
            let mut s_hits = 0u64;
            let mut rejections = 0u64;
            for rep in &per_replicate {
                let (any_true, any_false, count) = rep[j];
                v_hits += any_true as u64;
                s_hits += any_false as u64;
                rejections += count as u64;
            }
            let fwer = v_hits as f64 / b as f64;
            let min_power = if has_false_nulls {
                s_hits as f64 / b as f64
            } else {
                0.0
            };
            SimResult {
                procedure,
                fwer,
                fwer_se: binomial_se(fwer, b),
                min_power,
                min_power_se: if has_false_nulls {
                    binomial_se(min_power, b)
                } else {
                    0.0
                },
                min_power_defined: has_false_nulls,
                mean_rejections: rejections as f64 / b as f64,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(SimConfig::fet(5, 0.2, 25).validate().is_ok());
        assert!(SimConfig::fet(0, 0.2, 25).validate().is_err());
        assert!(SimConfig::fet(5, 0.0, 25).validate().is_err());
        assert!(SimConfig::fet(5, 0.2, 0).validate().is_err());
        assert!(SimConfig::bet(5, 0.4, 0.5).validate().is_ok());
        assert!(SimConfig::bet(5, 0.4, 1.0).validate().is_err());
        let mut cfg = SimConfig::bet(5, 0.4, 0.5);
        cfg.alt_rates.0 = 3.0; // group-1 rates must match under block dependence
        assert!(cfg.validate().is_err());
        cfg.rho = 0.0;
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn true_null_count_rounds() {
        assert_eq!(SimConfig::fet(10, 0.2, 25).true_null_count(), 2);
        assert_eq!(SimConfig::fet(5, 0.2, 25).true_null_count(), 1);
        assert_eq!(SimConfig::fet(5, 0.5, 25).true_null_count(), 3); // round half up
        assert_eq!(SimConfig::fet(5, 1.0, 25).true_null_count(), 5);
    }

    #[test]
    fn replicates_are_deterministic() {
        let cfg = SimConfig::fet(5, 0.2, 25);
        let draw = |r: u64| {
            let mut rng = replicate_rng(cfg.seed, r);
            let (family, _) = gen_fet_replicate(&cfg, &mut rng).unwrap();
            family
                .hypotheses()
                .iter()
                .map(|h| h.observed_p)
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(3), draw(3));
        assert_ne!(draw(3), draw(4));
    }

    #[test]
    fn estimate_is_thread_count_independent() {
        let mut cfg = SimConfig::fet(5, 0.4, 25);
        cfg.replicates = 64;
        cfg.seed = 7;
        let procs = [ProcedureId::MBonf, ProcedureId::Tarone, ProcedureId::Bonferroni];
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| estimate(&cfg, &procs).unwrap());
        let multi = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| estimate(&cfg, &procs).unwrap());
        assert_eq!(single, multi);
    }

    #[test]
    fn full_null_reports_undefined_power() {
        let mut cfg = SimConfig::fet(4, 1.0, 25);
        cfg.replicates = 50;
        let results = estimate(&cfg, &[ProcedureId::MBonf]).unwrap();
        assert!(!results[0].min_power_defined);
        assert_eq!(results[0].min_power, 0.0);
    }

    #[test]
    fn single_replicate_rates_are_zero_or_one() {
        let mut cfg = SimConfig::bet(5, 0.4, 0.0);
        cfg.replicates = 1;
        for r in estimate(&cfg, &[ProcedureId::MHolm, ProcedureId::Holm]).unwrap() {
            assert!(r.fwer == 0.0 || r.fwer == 1.0);
            assert!(r.min_power == 0.0 || r.min_power == 1.0);
        }
    }

    #[test]
    fn block_generator_induces_target_correlation() {
        // m = 2 with one false null: check corr(X_11, X_21) = rho within the
        // true marginals, and that the false-null group-2 mean stays 10.
        let cfg = SimConfig::bet(2, 0.5, 0.5);
        let reps = 100_000;
        let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        let mut sum_x22 = 0.0;
        for r in 0..reps {
            let mut rng = replicate_rng(11, r);
            let counts = draw_block_counts(&cfg, &mut rng).unwrap();
            let (a, b) = (counts[0].0 as f64, counts[1].0 as f64);
            sx += a;
            sy += b;
            sxx += a * a;
            syy += b * b;
            sxy += a * b;
            sum_x22 += counts[1].1 as f64; // false-null group-2 count
        }
        let n = reps as f64;
        let cov = sxy / n - (sx / n) * (sy / n);
        let var_a = sxx / n - (sx / n) * (sx / n);
        let var_b = syy / n - (sy / n) * (sy / n);
        let corr = cov / (var_a * var_b).sqrt();
        assert!((corr - 0.5).abs() < 0.01, "sample correlation {corr}");

        let mean_x22 = sum_x22 / n;
        let tol = 3.0 * (10.0_f64 / n).sqrt();
        assert!((mean_x22 - 10.0).abs() < tol, "false-null group-2 mean {mean_x22}");
    }

    #[test]
    fn independent_and_block_rho_zero_agree_in_distribution() {
        // With rho = 0 the shared components vanish; check first moments.
        let cfg = SimConfig::bet(3, 0.5, 0.0);
        let reps = 20_000;
        let mut mean_indep = 0.0;
        let mut mean_block = 0.0;
        for r in 0..reps {
            let mut rng = replicate_rng(5, r);
            let (f, _) = gen_bet_replicate_indep(&cfg, &mut rng).unwrap();
            mean_indep += f.hypotheses()[0].observed_p;
            let mut rng = replicate_rng(5, r + reps);
            let (f, _) = gen_bet_replicate_block(&cfg, &mut rng).unwrap();
            mean_block += f.hypotheses()[0].observed_p;
        }
        mean_indep /= reps as f64;
        mean_block /= reps as f64;
        assert!(
            (mean_indep - mean_block).abs() < 0.01,
            "{mean_indep} vs {mean_block}"
        );
    }
}
