//! FWER-controlling multiple testing procedures.
//!
//! Four conventional baselines (Bonferroni, Sidak, Holm, Hochberg), three
//! procedures built on minimal attainable p-values (Tarone, modified Tarone,
//! Tarone-Holm), and three procedures that use the full null CDFs (modified
//! Bonferroni, modified Holm, modified Hochberg).
//!
//! Every procedure except plain Tarone is alpha-consistent and exposes
//! adjusted p-values; for those, the level-alpha decision is exactly
//! `adjusted <= alpha`. Plain Tarone rejects against the data-dependent
//! constant `alpha / K(alpha)` and has no well-defined adjusted p-value.
//!
//! Notation used in the comments below: `m` hypotheses with observed
//! p-values `P_i`, minimal attainable values `p_i*`, null CDFs `F_i`;
//! ranks `(1)..(m)` order the observed p-values ascending.

use crate::{leq_tol, Error, Family, Result};

/// Identifies one of the ten implemented procedures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProcedureId {
    Bonferroni,
    Sidak,
    Holm,
    Hochberg,
    Tarone,
    ModTarone,
    TaroneHolm,
    MBonf,
    MHolm,
    MHoch,
}

impl ProcedureId {
    pub const ALL: [ProcedureId; 10] = [
        ProcedureId::Bonferroni,
        ProcedureId::Sidak,
        ProcedureId::Holm,
        ProcedureId::Hochberg,
        ProcedureId::Tarone,
        ProcedureId::ModTarone,
        ProcedureId::TaroneHolm,
        ProcedureId::MBonf,
        ProcedureId::MHolm,
        ProcedureId::MHoch,
    ];

    /// Canonical short name (also the CLI column name).
    pub fn name(&self) -> &'static str {
        match self {
            ProcedureId::Bonferroni => "bonf",
            ProcedureId::Sidak => "sidak",
            ProcedureId::Holm => "holm",
            ProcedureId::Hochberg => "hochberg",
            ProcedureId::Tarone => "tarone",
            ProcedureId::ModTarone => "modtarone",
            ProcedureId::TaroneHolm => "taroneholm",
            ProcedureId::MBonf => "mbonf",
            ProcedureId::MHolm => "mholm",
            ProcedureId::MHoch => "mhoch",
        }
    }
}

impl std::str::FromStr for ProcedureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "bonf" | "bonferroni" => Ok(ProcedureId::Bonferroni),
            "sidak" => Ok(ProcedureId::Sidak),
            "holm" => Ok(ProcedureId::Holm),
            "hochberg" | "hoch" => Ok(ProcedureId::Hochberg),
            "tarone" => Ok(ProcedureId::Tarone),
            "modtarone" | "modifiedtarone" | "tstar" => Ok(ProcedureId::ModTarone),
            "taroneholm" => Ok(ProcedureId::TaroneHolm),
            "mbonf" | "modifiedbonferroni" => Ok(ProcedureId::MBonf),
            "mholm" | "modifiedholm" => Ok(ProcedureId::MHolm),
            "mhoch" | "modifiedhochberg" => Ok(ProcedureId::MHoch),
            _ => Err(Error::UnknownProcedure(s.to_string())),
        }
    }
}

impl std::fmt::Display for ProcedureId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// The outcome of applying one procedure to a family at level `alpha`.
///
/// `rejected` and `adjusted_p` follow the family's original hypothesis
/// order. For every procedure exposing adjusted p-values, `rejected[i]`
/// holds iff `adjusted_p[i] <= alpha`; plain Tarone carries
/// `adjusted_p = None` because it is not alpha-consistent.
///
/// `critical` records the constants used for audit output: one constant for
/// single-step procedures, `m` rank-wise constants for stepwise ones, and
/// empty for modified Tarone and Tarone-Holm, whose rejection regions have
/// no closed-form constants.
#[derive(Debug, Clone)]
pub struct Decision {
    pub procedure: ProcedureId,
    pub alpha: f64,
    pub rejected: Vec<bool>,
    pub adjusted_p: Option<Vec<f64>>,
    pub critical: Vec<f64>,
}

impl Decision {
    /// Number of rejected hypotheses.
    pub fn rejection_count(&self) -> usize {
        self.rejected.iter().filter(|&&r| r).count()
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::OutOfRange {
            name: "alpha",
            range: "(0, 1)",
            value: alpha,
        });
    }
    Ok(())
}

/// Scatters rank-ordered values back to the original hypothesis order.
fn unrank(family: &Family, by_rank: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; family.len()];
    for (r, &orig) in family.sorted_order().iter().enumerate() {
        out[orig] = by_rank[r];
    }
    out
}

// ---------------------------------------------------------------------------
// Conventional baselines
// ---------------------------------------------------------------------------

/// Bonferroni: `min(1, m * P_i)`.
pub fn bonferroni_adjusted(family: &Family) -> Vec<f64> {
    let m = family.len() as f64;
    family
        .hypotheses()
        .iter()
        .map(|h| (m * h.observed_p).min(1.0))
        .collect()
}

/// Sidak: `1 - (1 - P_i)^m`.
pub fn sidak_adjusted(family: &Family) -> Vec<f64> {
    let m = family.len() as i32;
    family
        .hypotheses()
        .iter()
        .map(|h| 1.0 - (1.0 - h.observed_p).powi(m))
        .collect()
}

/// Holm step-down: running max over ranks of `min(1, (m-i+1) * P_(i))`.
pub fn holm_adjusted(family: &Family) -> Vec<f64> {
    let m = family.len();
    let mut by_rank = Vec::with_capacity(m);
    let mut running = 0.0_f64;
    for (r, &orig) in family.sorted_order().iter().enumerate() {
        let v = ((m - r) as f64 * family.observed(orig)).min(1.0);
        running = running.max(v);
        by_rank.push(running);
    }
    unrank(family, &by_rank)
}

/// Hochberg step-up: running min from the largest rank downward of
/// `min(1, (m-i+1) * P_(i))`.
pub fn hochberg_adjusted(family: &Family) -> Vec<f64> {
    let m = family.len();
    let mut by_rank = vec![0.0; m];
    let mut running = 1.0_f64;
    for r in (0..m).rev() {
        let orig = family.sorted_order()[r];
        let v = ((m - r) as f64 * family.observed(orig)).min(1.0);
        running = running.min(v);
        by_rank[r] = running;
    }
    unrank(family, &by_rank)
}

// ---------------------------------------------------------------------------
// Tarone-type procedures (minimal attainable p-values only)
// ---------------------------------------------------------------------------

/// `M(gamma, k) = #{ i in I : p_i* <= gamma / k }` over the given original
/// indices.
fn m_count(family: &Family, indices: &[usize], gamma: f64, k: usize) -> usize {
    let threshold = gamma / k as f64;
    indices
        .iter()
        .filter(|&&i| leq_tol(family.min_attainable(i), threshold))
        .count()
}

/// `K(alpha) = min{ 1 <= k <= |I| : M(alpha, k) <= k }`. Always exists
/// because `M(alpha, |I|) <= |I|`.
fn k_of(family: &Family, indices: &[usize], gamma: f64) -> usize {
    (1..=indices.len())
        .find(|&k| m_count(family, indices, gamma, k) <= k)
        .expect("M(gamma, |I|) <= |I|")
}

/// Tarone's procedure at level `alpha`: reject `H_i` iff
/// `P_i <= alpha / K(alpha)`.
///
/// Exposes no adjusted p-values: the procedure is not alpha-consistent, so
/// the usual "smallest level at which rejected" quantity is not an adjusted
/// p-value.
pub fn tarone(family: &Family, alpha: f64) -> Result<Decision> {
    check_alpha(alpha)?;
    let all: Vec<usize> = (0..family.len()).collect();
    let k = k_of(family, &all, alpha);
    let threshold = alpha / k as f64;
    let rejected = family
        .hypotheses()
        .iter()
        .map(|h| leq_tol(h.observed_p, threshold))
        .collect();
    Ok(Decision {
        procedure: ProcedureId::Tarone,
        alpha,
        rejected,
        adjusted_p: None,
        critical: vec![threshold],
    })
}

/// Modified Tarone adjusted p-values over the index set `indices`.
///
/// `H_i` is rejected at level `alpha` iff `P_i <= gamma / K(gamma)` for some
/// `gamma <= alpha`; the candidate minima occur only at `gamma = k * P_i`
/// with `M(k P_i, k) <= k`, so the adjusted value is the smallest such
/// candidate, capped at 1.
fn mod_tarone_adjusted_on(family: &Family, indices: &[usize], i: usize) -> f64 {
    let p = family.observed(i);
    let mut best = f64::INFINITY;
    for k in 1..=indices.len() {
        let gamma = k as f64 * p;
        if m_count(family, indices, gamma, k) <= k {
            best = best.min(gamma);
        }
    }
    debug_assert!(best.is_finite(), "k = |I| is always feasible");
    best.min(1.0)
}

/// Modified Tarone: alpha-consistent single-step procedure on minimal
/// attainable p-values.
pub fn mod_tarone_adjusted(family: &Family) -> Vec<f64> {
    let all: Vec<usize> = (0..family.len()).collect();
    (0..family.len())
        .map(|i| mod_tarone_adjusted_on(family, &all, i))
        .collect()
}

/// Tarone-Holm: step-down procedure that reapplies the modified Tarone rule
/// to the active set after each rejection.
///
/// Adjusted p-values by sequential elimination: at each stage, the
/// hypothesis with the smallest stage value receives the running max of
/// stage values and leaves the active set. Removal shrinks `M_I` and the
/// stage values of the survivors, so this reproduces the literal
/// reject-and-repeat loop at every level simultaneously.
pub fn tarone_holm_adjusted(family: &Family) -> Vec<f64> {
    let m = family.len();
    let mut adjusted = vec![1.0; m];
    let mut active: Vec<usize> = (0..m).collect();
    let mut running = 0.0_f64;
    while !active.is_empty() {
        let (pos, value) = active
            .iter()
            .enumerate()
            .map(|(pos, &i)| (pos, mod_tarone_adjusted_on(family, &active, i)))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(active[a.0].cmp(&active[b.0])))
            .unwrap();
        running = running.max(value);
        adjusted[active[pos]] = running;
        active.remove(pos);
    }
    adjusted
}

// ---------------------------------------------------------------------------
// Modified procedures (full null CDFs)
// ---------------------------------------------------------------------------

/// Largest `p` in the rank-`from_rank` support union with
/// `sum of F_(j)(p) <= alpha`, if any. The CDF sum is nondecreasing in `p`,
/// so binary search over the union applies.
fn max_feasible_union_point(family: &Family, from_rank: usize, alpha: f64) -> Result<Option<f64>> {
    let union = family.support_union(from_rank)?;
    let feasible =
        union.partition_point(|&p| leq_tol(family.sum_cdf_unchecked(from_rank, p), alpha));
    Ok((feasible > 0).then(|| union[feasible - 1]))
}

/// Critical constant of the modified Bonferroni procedure:
/// `s* = max{ p in union of supports : sum_i F_i(p) <= alpha }`, falling
/// back to `alpha / m` when no union point qualifies.
pub fn mbonf_critical(family: &Family, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(max_feasible_union_point(family, 1, alpha)?
        .unwrap_or(alpha / family.len() as f64))
}

/// Modified Bonferroni adjusted p-values: `min(1, sum_j F_j(P_i))`.
pub fn mbonf_adjusted(family: &Family) -> Vec<f64> {
    family
        .hypotheses()
        .iter()
        .map(|h| family.sum_cdf_unchecked(1, h.observed_p).min(1.0))
        .collect()
}

/// Rank-wise critical constants shared by the modified Holm (step-down) and
/// modified Hochberg (step-up) procedures:
/// `alpha_i = max{ p in union of supports of ranks i..m : sum F_(j)(p) <= alpha }`
/// when the maximum exists, else `max(alpha_{i-1}, alpha / (m - i + 1))`.
///
/// The constants depend on the observed ordering, so they are recomputed per
/// dataset.
pub fn mholm_critical(family: &Family, alpha: f64) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    let m = family.len();
    let mut constants = Vec::with_capacity(m);
    let mut prev = 0.0_f64;
    for rank in 1..=m {
        let c = match max_feasible_union_point(family, rank, alpha)? {
            Some(p) => p,
            None => prev.max(alpha / (m - rank + 1) as f64),
        };
        constants.push(c);
        prev = c;
    }
    Ok(constants)
}

/// Modified Holm adjusted p-values:
/// rank 1: `min(1, sum_{j=1..m} F_(j)(P_(1)))`; rank i: running max with
/// `min(1, sum_{j=i..m} F_(j)(P_(i)))`.
pub fn mholm_adjusted(family: &Family) -> Vec<f64> {
    let m = family.len();
    let mut by_rank = Vec::with_capacity(m);
    let mut running = 0.0_f64;
    for (r, &orig) in family.sorted_order().iter().enumerate() {
        let s = family.sum_cdf_unchecked(r + 1, family.observed(orig)).min(1.0);
        running = running.max(s);
        by_rank.push(running);
    }
    unrank(family, &by_rank)
}

/// Modified Hochberg adjusted p-values:
/// rank m: `F_(m)(P_(m))`; rank i: `min(adjusted_(i+1), sum_{j=i..m} F_(j)(P_(i)))`.
///
/// The downward min cascade starts at `F_(m)(P_(m)) <= 1`, so every value is
/// already in `[0, 1]` without clipping.
pub fn mhoch_adjusted(family: &Family) -> Vec<f64> {
    let m = family.len();
    let mut by_rank = vec![0.0; m];
    let mut running = f64::INFINITY;
    for r in (0..m).rev() {
        let orig = family.sorted_order()[r];
        let s = family.sum_cdf_unchecked(r + 1, family.observed(orig));
        running = running.min(s);
        by_rank[r] = running;
    }
    debug_assert!(by_rank.iter().all(|&v| (0.0..=1.0).contains(&v)));
    unrank(family, &by_rank)
}

/// Modified Holm level-alpha decision via the step-down loop over the
/// critical constants: reject ranks `1..=i*` where
/// `i* = max{ i : P_(1) <= alpha_1, ..., P_(i) <= alpha_i }`.
///
/// Agrees with `mholm_adjusted(...) <= alpha` for every family and level.
pub fn mholm_step_down(family: &Family, alpha: f64) -> Result<Vec<bool>> {
    let constants = mholm_critical(family, alpha)?;
    let mut rejected = vec![false; family.len()];
    for (r, &orig) in family.sorted_order().iter().enumerate() {
        if !leq_tol(family.observed(orig), constants[r]) {
            break;
        }
        rejected[orig] = true;
    }
    Ok(rejected)
}

/// Modified Hochberg level-alpha decision via the step-up rule on the same
/// constants: reject ranks `1..=i*` where `i* = max{ i : P_(i) <= alpha_i }`.
pub fn mhoch_step_up(family: &Family, alpha: f64) -> Result<Vec<bool>> {
    let constants = mholm_critical(family, alpha)?;
    let mut rejected = vec![false; family.len()];
    let order = family.sorted_order();
    let i_star = (0..family.len())
        .rev()
        .find(|&r| leq_tol(family.observed(order[r]), constants[r]));
    if let Some(i_star) = i_star {
        for &orig in &order[..=i_star] {
            rejected[orig] = true;
        }
    }
    Ok(rejected)
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

fn decision_from_adjusted(
    procedure: ProcedureId,
    alpha: f64,
    adjusted: Vec<f64>,
    critical: Vec<f64>,
) -> Decision {
    let rejected = adjusted.iter().map(|&a| leq_tol(a, alpha)).collect();
    Decision {
        procedure,
        alpha,
        rejected,
        adjusted_p: Some(adjusted),
        critical,
    }
}

/// Applies the named procedure to the family at level `alpha`.
pub fn apply(procedure: ProcedureId, family: &Family, alpha: f64) -> Result<Decision> {
    check_alpha(alpha)?;
    let m = family.len();
    let holm_constants = || (1..=m).map(|i| alpha / (m - i + 1) as f64).collect();
    Ok(match procedure {
        ProcedureId::Bonferroni => decision_from_adjusted(
            procedure,
            alpha,
            bonferroni_adjusted(family),
            vec![alpha / m as f64],
        ),
        ProcedureId::Sidak => decision_from_adjusted(
            procedure,
            alpha,
            sidak_adjusted(family),
            vec![1.0 - (1.0 - alpha).powf(1.0 / m as f64)],
        ),
        ProcedureId::Holm => {
            decision_from_adjusted(procedure, alpha, holm_adjusted(family), holm_constants())
        }
        ProcedureId::Hochberg => {
            decision_from_adjusted(procedure, alpha, hochberg_adjusted(family), holm_constants())
        }
        ProcedureId::Tarone => tarone(family, alpha)?,
        ProcedureId::ModTarone => {
            decision_from_adjusted(procedure, alpha, mod_tarone_adjusted(family), vec![])
        }
        ProcedureId::TaroneHolm => {
            decision_from_adjusted(procedure, alpha, tarone_holm_adjusted(family), vec![])
        }
        ProcedureId::MBonf => decision_from_adjusted(
            procedure,
            alpha,
            mbonf_adjusted(family),
            vec![mbonf_critical(family, alpha)?],
        ),
        ProcedureId::MHolm => decision_from_adjusted(
            procedure,
            alpha,
            mholm_adjusted(family),
            mholm_critical(family, alpha)?,
        ),
        ProcedureId::MHoch => decision_from_adjusted(
            procedure,
            alpha,
            mhoch_adjusted(family),
            mholm_critical(family, alpha)?,
        ),
    })
}
