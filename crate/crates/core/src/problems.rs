//! Benchmark fitness functions: onemax and concatenated traps.
//!
//! Trap blocks are consecutive, disjoint groups of `k` positions. The
//! optimizer never sees block boundaries; it only calls [`Problem::evaluate`]
//! and [`Problem::is_success`].

use std::fmt;

use crate::error::{BoaError, Result};
use crate::population::BitString;
use crate::scalar::Scalar;

pub const DEFAULT_SUCCESS_THRESHOLD: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    Onemax,
    /// Concatenated trap with the given block size (4 or 5 in the experiments).
    ConcatenatedTrap { block_size: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Problem {
    kind: ProblemKind,
    n: usize,
}

/// Trap of order `k` on a block with `ones` ones: `k` at the optimum,
/// `k - 1 - ones` elsewhere.
pub fn trap(k: usize, ones: usize) -> i64 {
    if ones == k {
        k as i64
    } else {
        k as i64 - 1 - ones as i64
    }
}

impl Problem {
    pub fn onemax(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(BoaError::invalid("onemax needs n >= 1"));
        }
        Ok(Problem {
            kind: ProblemKind::Onemax,
            n,
        })
    }

    pub fn trap(block_size: usize, n: usize) -> Result<Self> {
        if block_size < 2 {
            return Err(BoaError::invalid("trap block size must be at least 2"));
        }
        if n == 0 || n % block_size != 0 {
            return Err(BoaError::invalid(format!(
                "trap of order {block_size} needs n divisible by {block_size} (got n={n})"
            )));
        }
        Ok(Problem {
            kind: ProblemKind::ConcatenatedTrap { block_size },
            n,
        })
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Short identifier: `onemax`, `trap4`, `trap5`, ...
    pub fn id(&self) -> String {
        match self.kind {
            ProblemKind::Onemax => "onemax".to_string(),
            ProblemKind::ConcatenatedTrap { block_size } => format!("trap{block_size}"),
        }
    }

    pub fn optimum_value(&self) -> f64 {
        self.n as f64
    }

    fn check_len(&self, bits: &BitString) -> Result<()> {
        if bits.len() != self.n {
            return Err(BoaError::invalid(format!(
                "expected {} bits, got {}",
                self.n,
                bits.len()
            )));
        }
        Ok(())
    }

    pub fn evaluate<F: Scalar>(&self, bits: &BitString) -> Result<F> {
        self.check_len(bits)?;
        let value = match self.kind {
            ProblemKind::Onemax => bits.count_ones() as i64,
            ProblemKind::ConcatenatedTrap { block_size } => (0..self.n / block_size)
                .map(|b| trap(block_size, bits.count_ones_in(b * block_size, block_size)))
                .sum(),
        };
        Ok(F::of(value as f64))
    }

    /// Fraction of positions matching the optimum (all ones for every problem here).
    pub fn fraction_correct(&self, bits: &BitString) -> Result<f64> {
        self.check_len(bits)?;
        Ok(bits.count_ones() as f64 / self.n as f64)
    }

    pub fn is_success(&self, bits: &BitString, threshold: f64) -> Result<bool> {
        if !(threshold > 0.0 && threshold <= 1.0) {
            return Err(BoaError::invalid(format!(
                "success threshold must lie in (0, 1], got {threshold}"
            )));
        }
        // Compare counts to avoid rounding at the boundary (45/50 vs 0.9).
        self.check_len(bits)?;
        let ones = bits.count_ones() as f64;
        Ok(ones >= (threshold * self.n as f64) - 1e-9)
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.id(), self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_stream;

    fn with_ones(n: usize, ones: usize) -> BitString {
        let mut bits = BitString::zeros(n);
        for i in 0..ones {
            bits.set(i, true);
        }
        bits
    }

    #[test]
    fn onemax_all_ones() {
        let p = Problem::onemax(50).unwrap();
        assert_eq!(p.evaluate::<f64>(&BitString::ones(50)).unwrap(), 50.0);
        assert_eq!(p.optimum_value(), 50.0);
    }

    #[test]
    fn trap_tables() {
        assert_eq!(trap(4, 4), 4);
        assert_eq!(trap(4, 0), 3);
        assert_eq!(trap(4, 3), 0);
        assert_eq!(trap(5, 5), 5);
        assert_eq!(trap(5, 0), 4);
        assert_eq!(trap(5, 4), 0);
    }

    #[test]
    fn traps_are_deceptive() {
        for k in 2..=8 {
            for u in 0..k - 1 {
                assert!(trap(k, u) > trap(k, u + 1));
            }
            let max = (0..=k).map(|u| trap(k, u)).max().unwrap();
            assert_eq!(max, trap(k, k));
            assert_eq!((0..=k).filter(|&u| trap(k, u) == max).count(), 1);
        }
    }

    #[test]
    fn trap_needs_divisible_length() {
        assert!(Problem::trap(4, 41).is_err());
        assert!(Problem::trap(5, 50).is_ok());
        let p = Problem::trap(4, 40).unwrap();
        assert_eq!(p.optimum_value(), 40.0);
    }

    #[test]
    fn length_mismatch_rejected() {
        let p = Problem::onemax(10).unwrap();
        assert!(p.evaluate::<f64>(&BitString::zeros(9)).is_err());
        assert!(p.fraction_correct(&BitString::zeros(11)).is_err());
        assert!(p.is_success(&BitString::zeros(11), 0.9).is_err());
    }

    #[test]
    fn blockwise_matches_bruteforce() {
        let mut rng = derive_stream(99, 0);
        for &k in &[4usize, 5] {
            let n = 10 * k;
            let p = Problem::trap(k, n).unwrap();
            for _ in 0..10_000 {
                let bits = BitString::random(n, &mut rng);
                let v: Vec<bool> = bits.iter().collect();
                let brute: i64 = v
                    .chunks(k)
                    .map(|c| {
                        let u = c.iter().filter(|&&b| b).count();
                        if u == k { k as i64 } else { k as i64 - 1 - u as i64 }
                    })
                    .sum();
                let f = p.evaluate::<f64>(&bits).unwrap();
                assert_eq!(f, brute as f64);
                assert_eq!(f.to_bits(), p.evaluate::<f64>(&bits).unwrap().to_bits());
            }
        }
    }

    #[test]
    fn fraction_and_success() {
        let p = Problem::onemax(50).unwrap();
        assert_eq!(p.fraction_correct(&BitString::ones(50)).unwrap(), 1.0);
        assert_eq!(p.fraction_correct(&BitString::zeros(50)).unwrap(), 0.0);
        assert_eq!(p.fraction_correct(&with_ones(50, 45)).unwrap(), 0.9);
        assert!(p.is_success(&with_ones(50, 45), 0.9).unwrap());
        assert!(!p.is_success(&with_ones(50, 44), 0.9).unwrap());
        // 89.9% rounded down: 899 of 1000.
        let big = Problem::onemax(1000).unwrap();
        assert!(!big.is_success(&with_ones(1000, 899), 0.9).unwrap());
        assert!(big.is_success(&with_ones(1000, 900), 0.9).unwrap());
        assert!(p.is_success(&BitString::ones(50), 1.0).unwrap());
        assert!(!p.is_success(&with_ones(50, 49), 1.0).unwrap());
        assert!(p.is_success(&BitString::ones(50), 0.0).is_err());
    }

    #[test]
    fn f32_evaluation_agrees() {
        let p = Problem::trap(5, 50).unwrap();
        let bits = with_ones(50, 23);
        assert_eq!(p.evaluate::<f32>(&bits).unwrap() as f64, p.evaluate::<f64>(&bits).unwrap());
    }
}
