//! Exact conditional tests for count data.
//!
//! Both tests here are *discrete*: conditional on the observed margins, the
//! test statistic has a finite support, so the p-value can only attain
//! finitely many values. Each function therefore returns not just the
//! observed p-value but the complete set of attainable p-values, which is
//! what the modified procedures in [`crate::procedures`] consume.
//!
//! * [`fisher_exact`] — two-sided Fisher exact test for a 2x2 table,
//!   conditional on both margins (minimum-likelihood rule: the p-value at an
//!   outcome is the total probability of all outcomes no more likely).
//! * [`fisher_exact_lower`] — one-sided variant (lower tail of the group-1
//!   count), for alternatives where group 2 has the larger rate.
//! * [`binomial_exact`] — conditional binomial test for a pair of Poisson
//!   counts: given the total `c`, the group-1 count is `Bin(c, 1/2)` under
//!   the null; the p-value is its lower tail.
//!
//! Probability mass is anchored at the modal outcome in log space (via
//! log-gamma), extended across the support by exact integer ratio
//! recurrences, and accumulated with compensated summation, so totals like
//! `n1 + n2 = 1250` are handled without loss.

use crate::{eq_tol, Error, Result, REL_TOL};

/// Observed counts for a 2x2 table: `x1` of `n1` in group 1, `x2` of `n2`
/// in group 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoByTwoInput {
    pub x1: u64,
    pub x2: u64,
    pub n1: u64,
    pub n2: u64,
}

impl TwoByTwoInput {
    /// Validates `x1 <= n1`, `x2 <= n2`, and positive group sizes.
    pub fn new(x1: u64, x2: u64, n1: u64, n2: u64) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return Err(Error::InvalidCounts(format!(
                "group sizes must be positive, got n1={n1}, n2={n2}"
            )));
        }
        if x1 > n1 || x2 > n2 {
            return Err(Error::InvalidCounts(format!(
                "event counts exceed group sizes: x1={x1}/n1={n1}, x2={x2}/n2={n2}"
            )));
        }
        Ok(Self { x1, x2, n1, n2 })
    }

    fn total(&self) -> u64 {
        self.x1 + self.x2
    }
}

/// A pair of Poisson counts, compared conditionally on their total.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PoissonPairInput {
    pub x1: u64,
    pub x2: u64,
}

impl PoissonPairInput {
    pub fn new(x1: u64, x2: u64) -> Self {
        Self { x1, x2 }
    }
}

/// The outcome of an exact test: the observed p-value together with every
/// p-value the test could have produced given the conditioning margins.
///
/// Invariants: `support` is strictly increasing, every element is in
/// `(0, 1]`, the last element is exactly `1.0`, and `observed_p` is an
/// element of `support`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactTestResult {
    pub observed_p: f64,
    pub support: Vec<f64>,
}

impl ExactTestResult {
    /// Smallest attainable p-value.
    pub fn min_attainable(&self) -> f64 {
        self.support[0]
    }
}

/// Natural log of the binomial coefficient `C(n, k)`, via log-gamma.
///
/// Exact for `k == 0` and `k == n`; otherwise accurate to well within
/// 1e-12 relative error.
pub fn log_choose(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return Err(Error::InvalidCounts(format!("log_choose: k={k} > n={n}")));
    }
    if k == 0 || k == n {
        return Ok(0.0);
    }
    let (n, k) = (n as f64, k as f64);
    Ok(libm::lgamma(n + 1.0) - libm::lgamma(k + 1.0) - libm::lgamma(n - k + 1.0))
}

/// Neumaier variant of Kahan summation: tracks lost low-order bits so long
/// tails of tiny terms accumulate without cancellation error.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Fills a pmf vector from an anchor value by ratio recurrences, then
/// normalizes by the compensated total. The anchor (the modal outcome,
/// evaluated in log space) only sets the scale, so its log-gamma error
/// cancels in the normalization; the ratio steps are exact integer
/// quotients, leaving each mass accurate to a few ulps.
fn pmf_from_ratios(
    len: usize,
    mode: usize,
    ln_mode: f64,
    ratio_up: impl Fn(usize) -> f64,
) -> Vec<f64> {
    let mut pmf = vec![0.0; len];
    pmf[mode] = ln_mode.exp();
    for i in mode + 1..len {
        pmf[i] = pmf[i - 1] * ratio_up(i);
    }
    for i in (0..mode).rev() {
        let r = ratio_up(i + 1);
        pmf[i] = if r > 0.0 { pmf[i + 1] / r } else { 0.0 };
    }
    let mut total = CompensatedSum::default();
    for &p in &pmf {
        total.add(p);
    }
    let scale = 1.0 / total.value();
    for p in &mut pmf {
        *p *= scale;
    }
    pmf
}

/// Conditional pmf of the group-1 count for a 2x2 table with both margins
/// fixed: `k ~ Hypergeometric(n1 + n2, n1, c)` for `k` in the attainable
/// range. Returns `(lo, pmf)` where `pmf[i]` is the mass at `k = lo + i`.
fn hypergeometric_pmf(n1: u64, n2: u64, c: u64) -> Result<(u64, Vec<f64>)> {
    let lo = c.saturating_sub(n2);
    let hi = c.min(n1);
    // mode of the hypergeometric, clamped into the attainable range
    let mode = (((c + 1) * (n1 + 1)) / (n1 + n2 + 2)).clamp(lo, hi);
    let ln_mode = log_choose(n1, mode)? + log_choose(n2, c - mode)? - log_choose(n1 + n2, c)?;
    // pmf(k) / pmf(k-1) = (n1 - k + 1)(c - k + 1) / (k (n2 - c + k))
    let ratio_up = |i: usize| {
        let k = lo + i as u64;
        ((n1 - k + 1) as f64 * (c - k + 1) as f64) / (k as f64 * (n2 + k - c) as f64)
    };
    Ok((lo, pmf_from_ratios((hi - lo + 1) as usize, (mode - lo) as usize, ln_mode, ratio_up)))
}

/// Assembles an [`ExactTestResult`] from per-outcome attainable p-values.
///
/// `attained[i]` is the p-value produced by outcome `i`; `observed` indexes
/// the observed outcome. Values are sorted, merged at [`REL_TOL`] relative
/// tolerance, zero (underflowed) values dropped, and the maximum snapped to
/// exactly 1.
fn assemble(attained: &[f64], observed: usize) -> ExactTestResult {
    let mut support: Vec<f64> = attained.iter().copied().filter(|&v| v > 0.0).collect();
    support.sort_by(f64::total_cmp);
    support.dedup_by(|a, b| eq_tol(*a, *b));
    let last = support
        .last_mut()
        .expect("at least one outcome has positive probability");
    // The maximum attainable value is exactly 1 (the total mass); the
    // computed total carries only summation noise.
    debug_assert!((*last - 1.0).abs() < 1e-9, "max attainable p-value is 1");
    *last = 1.0;

    // Map the observed outcome's value to its canonical support
    // representative, so `observed_p` is an element of `support` exactly.
    let raw = attained[observed];
    let observed_p = if raw <= 0.0 {
        // Complete underflow of the observed outcome's tail; the smallest
        // representable support value is the closest faithful stand-in.
        support[0]
    } else {
        let idx = support.partition_point(|&s| s < raw);
        if idx < support.len() && eq_tol(support[idx], raw) {
            support[idx]
        } else {
            debug_assert!(idx > 0 && eq_tol(support[idx - 1], raw));
            support[idx - 1]
        }
    };
    ExactTestResult { observed_p, support }
}

/// Two-sided p-values under the minimum-likelihood rule: the p-value at
/// outcome `k` is the total mass of outcomes no more likely than `k`.
///
/// Ties in the pmf (exact for symmetric distributions, and near-exact from
/// rounding) are grouped at [`REL_TOL`] relative tolerance so tied outcomes
/// share one attainable value.
fn min_likelihood_pvalues(pmf: &[f64]) -> Vec<f64> {
    let n = pmf.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| pmf[a].total_cmp(&pmf[b]).then(a.cmp(&b)));

    let mut attained = vec![0.0; n];
    let mut running = CompensatedSum::default();
    let mut i = 0;
    while i < n {
        // One tie group: every pmf within relative tolerance of the anchor.
        let anchor = pmf[order[i]];
        let mut j = i;
        while j < n && pmf[order[j]] <= anchor + REL_TOL * anchor {
            running.add(pmf[order[j]]);
            j += 1;
        }
        let cumulative = running.value();
        for &k in &order[i..j] {
            attained[k] = cumulative;
        }
        i = j;
    }
    attained
}

/// Lower-tail p-values `t(i) = sum of pmf[0..=i]`, accumulated from the
/// small end for accuracy.
fn lower_tail_pvalues(pmf: &[f64]) -> Vec<f64> {
    let mut running = CompensatedSum::default();
    pmf.iter()
        .map(|&p| {
            running.add(p);
            running.value()
        })
        .collect()
}

/// Two-sided Fisher exact test, conditional on both margins.
///
/// Under the null the group-1 count `K` given the total `c = x1 + x2`
/// follows `Hypergeometric(n1 + n2, n1, c)`; the p-value at `k` is the
/// total probability of all outcomes with pmf no larger than pmf(k). The
/// degenerate table `c = 0` yields `observed_p = 1` with support `[1]`.
pub fn fisher_exact(input: &TwoByTwoInput) -> Result<ExactTestResult> {
    let (lo, pmf) = hypergeometric_pmf(input.n1, input.n2, input.total())?;
    let attained = min_likelihood_pvalues(&pmf);
    Ok(assemble(&attained, (input.x1 - lo) as usize))
}

/// One-sided Fisher exact test: lower tail of the group-1 count.
///
/// Small `x1` relative to the margins is significant, matching alternatives
/// where group 2 has the larger event rate.
pub fn fisher_exact_lower(input: &TwoByTwoInput) -> Result<ExactTestResult> {
    let (lo, pmf) = hypergeometric_pmf(input.n1, input.n2, input.total())?;
    let attained = lower_tail_pvalues(&pmf);
    Ok(assemble(&attained, (input.x1 - lo) as usize))
}

/// Exact binomial test for a Poisson pair, conditional on the total.
///
/// Given `c = x1 + x2`, the group-1 count is `Bin(c, 1/2)` under the null
/// of equal rates; the p-value is the lower tail at `x1`, so small group-1
/// counts are significant (alternatives where group 2 has the larger rate).
pub fn binomial_exact(input: &PoissonPairInput) -> Result<ExactTestResult> {
    let c = input.x1 + input.x2;
    let mode = c / 2;
    let ln_mode = log_choose(c, mode)? - c as f64 * std::f64::consts::LN_2;
    // pmf(k) / pmf(k-1) = (c - k + 1) / k at p = 1/2
    let ratio_up = |k: usize| (c as f64 - k as f64 + 1.0) / k as f64;
    let pmf = pmf_from_ratios(c as usize + 1, mode as usize, ln_mode, ratio_up);
    let attained = lower_tail_pvalues(&pmf);
    Ok(assemble(&attained, input.x1 as usize))
}
