//! Null models for discrete p-values and families of hypotheses.
//!
//! Under the null, a discrete test's p-value is uniform *on its attainable
//! support*: `Pr(P <= u) = u` exactly when `u` is attainable, and otherwise
//! equals the largest attainable value below `u`. [`DiscreteNull`] captures
//! that step CDF; [`Family`] holds an ordered collection of hypotheses and
//! provides the rank-dependent support unions and CDF sums the stepwise
//! procedures are built on.

use crate::{eq_tol, Error, Result, REL_TOL};

/// The attainable support of one hypothesis's null p-value distribution.
///
/// Invariants (checked at construction): non-empty, strictly increasing,
/// every element in `(0, 1]`, last element exactly `1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteNull {
    support: Vec<f64>,
}

impl DiscreteNull {
    pub fn new(support: Vec<f64>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidSupport("support is empty".into()));
        }
        if support.iter().any(|&s| !(s > 0.0 && s <= 1.0) || s.is_nan()) {
            return Err(Error::InvalidSupport(
                "support elements must lie in (0, 1]".into(),
            ));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSupport(
                "support must be strictly increasing".into(),
            ));
        }
        if *support.last().unwrap() != 1.0 {
            return Err(Error::InvalidSupport(
                "largest attainable p-value must be exactly 1".into(),
            ));
        }
        Ok(Self { support })
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    /// Smallest attainable p-value (the basis of Tarone-type procedures).
    pub fn min_attainable(&self) -> f64 {
        self.support[0]
    }

    /// The true-null CDF `F(u) = Pr(P <= u)`: the largest attainable value
    /// `<= u`, or 0 below the support. `F(u) <= u` always, with equality
    /// exactly on the support.
    ///
    /// Errors if `u` is outside `[0, 1]`.
    pub fn cdf(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::OutOfRange {
                name: "u",
                range: "[0, 1]",
                value: u,
            });
        }
        Ok(self.cdf_unchecked(u))
    }

    /// CDF lookup with relative slack, so a support value recomputed through
    /// a different floating-point path still satisfies `F(u) = u`.
    pub(crate) fn cdf_unchecked(&self, u: f64) -> f64 {
        let bound = u + REL_TOL * u.abs();
        let idx = self.support.partition_point(|&s| s <= bound);
        if idx == 0 {
            0.0
        } else {
            self.support[idx - 1]
        }
    }

    /// Whether `p` is an attainable value (within relative tolerance).
    pub fn contains(&self, p: f64) -> bool {
        let idx = self.support.partition_point(|&s| s < p);
        idx < self.support.len() && eq_tol(self.support[idx], p)
            || idx > 0 && eq_tol(self.support[idx - 1], p)
    }
}

/// One hypothesis: an observed p-value together with its null model.
#[derive(Debug, Clone)]
pub struct Hypothesis {
    pub observed_p: f64,
    pub null: DiscreteNull,
    pub label: Option<String>,
}

impl Hypothesis {
    pub fn new(observed_p: f64, null: DiscreteNull) -> Self {
        Self {
            observed_p,
            null,
            label: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }
}

impl From<crate::exact::ExactTestResult> for Hypothesis {
    fn from(result: crate::exact::ExactTestResult) -> Self {
        let null = DiscreteNull::new(result.support)
            .expect("exact test results satisfy the support invariants");
        Hypothesis::new(result.observed_p, null)
    }
}

/// An ordered family of hypotheses under simultaneous test.
///
/// Immutable after construction; the sort order by observed p-value (ties
/// broken by original index, so decisions are deterministic) is computed
/// once and shared by all procedures.
#[derive(Debug, Clone)]
pub struct Family {
    hypotheses: Vec<Hypothesis>,
    /// `order[r]` = original index of the rank-`r` (0-based) hypothesis.
    order: Vec<usize>,
}

impl Family {
    pub fn new(hypotheses: Vec<Hypothesis>) -> Result<Self> {
        if hypotheses.is_empty() {
            return Err(Error::InvalidFamily("family must contain at least one hypothesis".into()));
        }
        for (i, h) in hypotheses.iter().enumerate() {
            if !h.null.contains(h.observed_p) {
                return Err(Error::InvalidFamily(format!(
                    "hypothesis {i}: observed p-value {} is not attainable",
                    h.observed_p
                )));
            }
        }
        let mut order: Vec<usize> = (0..hypotheses.len()).collect();
        order.sort_by(|&a, &b| {
            hypotheses[a]
                .observed_p
                .total_cmp(&hypotheses[b].observed_p)
                .then(a.cmp(&b))
        });
        Ok(Self { hypotheses, order })
    }

    /// Number of hypotheses, `m`.
    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    /// Always false: construction requires m >= 1.
    pub fn is_empty(&self) -> bool {
        self.hypotheses.is_empty()
    }

    pub fn hypotheses(&self) -> &[Hypothesis] {
        &self.hypotheses
    }

    /// Original indices in ascending order of observed p-value.
    pub fn sorted_order(&self) -> &[usize] {
        &self.order
    }

    /// The hypothesis of 1-based rank `rank` in the observed ordering.
    pub fn ranked(&self, rank: usize) -> Result<&Hypothesis> {
        self.check_rank(rank)?;
        Ok(&self.hypotheses[self.order[rank - 1]])
    }

    fn check_rank(&self, rank: usize) -> Result<()> {
        if rank == 0 || rank > self.len() {
            return Err(Error::RankOutOfRange {
                rank,
                m: self.len(),
            });
        }
        Ok(())
    }

    /// Sorted, de-duplicated union of the supports of the hypotheses ranked
    /// `from_rank..=m` (1-based). `from_rank = 1` is the union over the
    /// whole family.
    pub fn support_union(&self, from_rank: usize) -> Result<Vec<f64>> {
        self.check_rank(from_rank)?;
        let mut union: Vec<f64> = self.order[from_rank - 1..]
            .iter()
            .flat_map(|&i| self.hypotheses[i].null.support().iter().copied())
            .collect();
        union.sort_by(f64::total_cmp);
        union.dedup_by(|a, b| eq_tol(*a, *b));
        Ok(union)
    }

    /// `sum of F_(j)(p)` over ranks `j = from_rank..=m`: nondecreasing and
    /// piecewise constant in `p`, with jumps only at union support points.
    pub fn sum_cdf(&self, from_rank: usize, p: f64) -> Result<f64> {
        self.check_rank(from_rank)?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfRange {
                name: "p",
                range: "[0, 1]",
                value: p,
            });
        }
        Ok(self.sum_cdf_unchecked(from_rank, p))
    }

    pub(crate) fn sum_cdf_unchecked(&self, from_rank: usize, p: f64) -> f64 {
        self.order[from_rank - 1..]
            .iter()
            .map(|&i| self.hypotheses[i].null.cdf_unchecked(p))
            .sum()
    }

    /// Convenience accessors used throughout the procedures.
    pub(crate) fn observed(&self, original_index: usize) -> f64 {
        self.hypotheses[original_index].observed_p
    }

    pub(crate) fn min_attainable(&self, original_index: usize) -> f64 {
        self.hypotheses[original_index].null.min_attainable()
    }
}
