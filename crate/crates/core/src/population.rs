//! Bit-string individuals and populations.

use std::fmt;

use rand::Rng;

use crate::error::{BoaError, Result};
use crate::rng::RandomStream;
use crate::scalar::Scalar;

const WORD_BITS: usize = 64;

/// Fixed-length binary string packed into 64-bit words.
///
/// Bits beyond `len` in the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        BitString {
            words: vec![0; len.div_ceil(WORD_BITS)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut bits = Self::zeros(len);
        for i in 0..len {
            bits.set(i, true);
        }
        bits
    }

    pub fn from_bools(values: &[bool]) -> Self {
        let mut bits = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            bits.set(i, v);
        }
        bits
    }

    /// Parses a string of `0`/`1` characters.
    pub fn parse(text: &str) -> Result<Self> {
        let values = text
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(BoaError::invalid(format!("not a bit: {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_bools(&values))
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut bits = Self::zeros(len);
        for word in bits.words.iter_mut() {
            *word = rng.next_u64();
        }
        bits.clear_tail();
        bits
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, index: usize) -> bool {
        debug_assert!(index < self.len);
        (self.words[index / WORD_BITS] >> (index % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, index: usize, value: bool) {
        assert!(index < self.len, "bit index {index} out of range {}", self.len);
        let mask = 1u64 << (index % WORD_BITS);
        if value {
            self.words[index / WORD_BITS] |= mask;
        } else {
            self.words[index / WORD_BITS] &= !mask;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of ones among positions `[start, start + width)`.
    pub fn count_ones_in(&self, start: usize, width: usize) -> usize {
        assert!(start + width <= self.len, "range {start}+{width} out of {}", self.len);
        let mut count = 0;
        let mut i = start;
        while i < start + width {
            let offset = i % WORD_BITS;
            let take = (WORD_BITS - offset).min(start + width - i);
            let mask = if take == WORD_BITS { u64::MAX } else { ((1u64 << take) - 1) << offset };
            count += (self.words[i / WORD_BITS] & mask).count_ones() as usize;
            i += take;
        }
        count
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for bit in self.iter() {
            f.write_str(if bit { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

/// Where an individual's fitness came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Unevaluated,
    /// Computed by the true fitness function.
    Actual,
    /// Predicted by the fitness model.
    Estimated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual<F> {
    bits: BitString,
    fitness: F,
    provenance: Provenance,
}

impl<F: Scalar> Individual<F> {
    pub fn new(bits: BitString) -> Self {
        Individual {
            bits,
            fitness: F::zero(),
            provenance: Provenance::Unevaluated,
        }
    }

    pub fn with_actual(bits: BitString, fitness: F) -> Self {
        Individual {
            bits,
            fitness,
            provenance: Provenance::Actual,
        }
    }

    pub fn with_estimate(bits: BitString, fitness: F) -> Self {
        Individual {
            bits,
            fitness,
            provenance: Provenance::Estimated,
        }
    }

    pub fn bits(&self) -> &BitString {
        &self.bits
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Assigned fitness, or `None` while unevaluated.
    pub fn fitness(&self) -> Option<F> {
        match self.provenance {
            Provenance::Unevaluated => None,
            _ => Some(self.fitness),
        }
    }

    pub(crate) fn fitness_or_err(&self) -> Result<F> {
        self.fitness()
            .ok_or_else(|| BoaError::contract("individual has no fitness assigned"))
    }

    pub fn assign_actual(&mut self, fitness: F) {
        self.fitness = fitness;
        self.provenance = Provenance::Actual;
    }

    pub fn assign_estimate(&mut self, fitness: F) {
        self.fitness = fitness;
        self.provenance = Provenance::Estimated;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population<F> {
    members: Vec<Individual<F>>,
    generation: usize,
}

impl<F: Scalar> Population<F> {
    /// Builds a population; all members must share one string length.
    pub fn new(members: Vec<Individual<F>>, generation: usize) -> Result<Self> {
        if members.is_empty() {
            return Err(BoaError::invalid("population must not be empty"));
        }
        let len = members[0].bits.len();
        if members.iter().any(|m| m.bits.len() != len) {
            return Err(BoaError::invalid("members differ in string length"));
        }
        Ok(Population {
            members,
            generation,
        })
    }

    pub fn members(&self) -> &[Individual<F>] {
        &self.members
    }

    pub fn members_mut(&mut self) -> &mut [Individual<F>] {
        &mut self.members
    }

    pub fn into_members(self) -> Vec<Individual<F>> {
        self.members
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn string_len(&self) -> usize {
        self.members[0].bits.len()
    }
}

/// Draws `size` uniformly random strings of `n` bits, all unevaluated.
pub fn random_population<F: Scalar>(
    n: usize,
    size: usize,
    rng: &mut RandomStream,
) -> Result<Population<F>> {
    if n == 0 || size == 0 {
        return Err(BoaError::invalid(format!(
            "random population needs n >= 1 and size >= 1 (got n={n}, size={size})"
        )));
    }
    let members = (0..size)
        .map(|_| Individual::new(BitString::random(n, rng)))
        .collect();
    Population::new(members, 0)
}

/// Index of the member with the highest assigned fitness; lowest index wins ties.
pub fn best_index<F: Scalar>(members: &[Individual<F>]) -> Result<usize> {
    let mut best: Option<(usize, F)> = None;
    for (i, m) in members.iter().enumerate() {
        let f = m.fitness_or_err()?;
        match best {
            Some((_, bf)) if f <= bf => {}
            _ => best = Some((i, f)),
        }
    }
    best.map(|(i, _)| i)
        .ok_or_else(|| BoaError::invalid("empty population"))
}

pub fn best_of<F: Scalar>(pop: &Population<F>) -> Result<&Individual<F>> {
    best_index(&pop.members).map(|i| &pop.members[i])
}
