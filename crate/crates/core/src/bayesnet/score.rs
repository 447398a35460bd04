//! Leaf scores for decision-tree structure learning (log base 2).
//!
//! `BdePenalized` is the Dirichlet-multinomial marginal likelihood of the
//! leaf's binary counts under a symmetric prior with pseudo-count `s` per
//! value, minus `0.5 * log2(N)` bits for the leaf's parameter. `Bic` is the
//! maximum-likelihood log-likelihood with the same per-leaf penalty.
//!
//! With integer counts the gamma ratios telescope:
//! `ln Γ(s + m) - ln Γ(s) = Σ_{k<m} ln(s + k)`, so no gamma function
//! approximation is needed.

use crate::error::{BoaError, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Metric {
    #[default]
    BdePenalized,
    Bic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreParams<F> {
    pub metric: Metric,
    /// Number of data points; sets the per-leaf penalty.
    pub data_size: usize,
    /// Dirichlet pseudo-count per value (BDe only).
    pub pseudo_count: F,
}

impl<F: Scalar> ScoreParams<F> {
    pub fn new(metric: Metric, data_size: usize) -> Self {
        ScoreParams {
            metric,
            data_size,
            pseudo_count: F::one(),
        }
    }

    pub fn with_data_size(self, data_size: usize) -> Self {
        ScoreParams { data_size, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.data_size == 0 {
            return Err(BoaError::invalid("score data size must be >= 1"));
        }
        if !(self.pseudo_count > F::zero()) {
            return Err(BoaError::invalid("pseudo-count must be positive"));
        }
        Ok(())
    }

    pub fn leaf_penalty(&self) -> F {
        F::of(0.5) * F::from_count(self.data_size as u64).log2()
    }
}

fn rising_log_sum<F: Scalar>(start: F, len: u64) -> F {
    (0..len).map(|k| (start + F::from_count(k)).ln()).sum()
}

fn xlog2x_over<F: Scalar>(count: u64, total: u64) -> F {
    if count == 0 {
        F::zero()
    } else {
        let c = F::from_count(count);
        c * (c / F::from_count(total)).log2()
    }
}

/// Score of a leaf holding `m0` zeros and `m1` ones of its target variable.
pub fn leaf_score<F: Scalar>(m0: u64, m1: u64, params: &ScoreParams<F>) -> F {
    let likelihood = match params.metric {
        Metric::BdePenalized => {
            let s = params.pseudo_count;
            let ln = rising_log_sum(s, m0) + rising_log_sum(s, m1)
                - rising_log_sum(s + s, m0 + m1);
            ln / F::of(std::f64::consts::LN_2)
        }
        Metric::Bic => xlog2x_over::<F>(m0, m0 + m1) + xlog2x_over::<F>(m1, m0 + m1),
    };
    likelihood - params.leaf_penalty()
}

/// Precomputed leaf scores for counts up to a fixed total, used in the
/// learner's inner loop.
#[derive(Debug, Clone)]
pub(crate) struct ScoreTable<F> {
    metric: Metric,
    penalty: F,
    /// BDe: Σ_{k<m} ln(s+k); BIC: m·log2(m).
    single: Vec<F>,
    /// BDe only: Σ_{k<m} ln(2s+k).
    double: Vec<F>,
}

impl<F: Scalar> ScoreTable<F> {
    pub(crate) fn new(params: &ScoreParams<F>, max_count: usize) -> Self {
        let mut single = Vec::with_capacity(max_count + 1);
        let mut double = Vec::new();
        match params.metric {
            Metric::BdePenalized => {
                let s = params.pseudo_count;
                double.reserve(max_count + 1);
                let (mut a, mut b) = (F::zero(), F::zero());
                for k in 0..=max_count {
                    single.push(a);
                    double.push(b);
                    let kf = F::from_count(k as u64);
                    a += (s + kf).ln();
                    b += (s + s + kf).ln();
                }
            }
            Metric::Bic => {
                single.push(F::zero());
                for k in 1..=max_count {
                    let kf = F::from_count(k as u64);
                    single.push(kf * kf.log2());
                }
            }
        }
        ScoreTable {
            metric: params.metric,
            penalty: params.leaf_penalty(),
            single,
            double,
        }
    }

    #[inline]
    pub(crate) fn score(&self, m0: u64, m1: u64) -> F {
        let (m0, m1) = (m0 as usize, m1 as usize);
        let likelihood = match self.metric {
            Metric::BdePenalized => {
                (self.single[m0] + self.single[m1] - self.double[m0 + m1])
                    / F::of(std::f64::consts::LN_2)
            }
            // m0 log(m0/m) + m1 log(m1/m) = m0 log m0 + m1 log m1 - m log m
            Metric::Bic => self.single[m0] + self.single[m1] - self.single[m0 + m1],
        };
        likelihood - self.penalty
    }
}
