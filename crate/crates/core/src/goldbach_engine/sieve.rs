//! Segmented sieve of Eratosthenes with a primality bitmap.

use rayon::prelude::*;

use super::GoldbachError;

/// Largest sieve limit accepted by [`sieve_primes`] (about 0.6 GB of tables).
pub const DEFAULT_MAX_LIMIT: u64 = 1_000_000_000;
const SEGMENT: u64 = 1 << 18;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
    bits: Vec<u64>,
    class_modulus: Option<u64>,
    classes: Vec<u32>,
}

fn small_primes(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn sieve_segment(lo: u64, hi: u64, base: &[u64]) -> Vec<u64> {
    // numbers in [lo, hi)
    let len = (hi - lo) as usize;
    let mut composite = vec![false; len];
    for &p in base {
        if p * p >= hi {
            break;
        }
        let mut start = (p * p).max(lo.div_ceil(p) * p);
        while start < hi {
            composite[(start - lo) as usize] = true;
            start += p;
        }
    }
    (lo.max(2)..hi).filter(|&x| !composite[(x - lo) as usize]).collect()
}

/// All primes up to `limit` under the default memory budget.
pub fn sieve_primes(limit: u64) -> Result<PrimeTable, GoldbachError> {
    sieve_primes_with_budget(limit, DEFAULT_MAX_LIMIT)
}

pub fn sieve_primes_with_budget(limit: u64, max_limit: u64) -> Result<PrimeTable, GoldbachError> {
    if limit > max_limit {
        return Err(GoldbachError::LimitTooLarge { limit, max: max_limit });
    }
    let base = small_primes((limit as f64).sqrt() as u64 + 1);
    let segments: Vec<(u64, u64)> = (0..=limit / SEGMENT)
        .map(|s| (s * SEGMENT, ((s + 1) * SEGMENT).min(limit + 1)))
        .filter(|(lo, hi)| lo < hi)
        .collect();
    let primes: Vec<u64> = segments
        .par_iter()
        .map(|&(lo, hi)| sieve_segment(lo, hi, &base))
        .collect::<Vec<_>>()
        .concat();
    let mut bits = vec![0u64; (limit / 64 + 1) as usize];
    for &p in &primes {
        bits[(p / 64) as usize] |= 1 << (p % 64);
    }
    Ok(PrimeTable {
        limit,
        primes,
        bits,
        class_modulus: None,
        classes: Vec::new(),
    })
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Panics above the limit.
    pub fn is_prime(&self, x: u64) -> bool {
        assert!(x <= self.limit, "{x} is beyond the sieve limit {}", self.limit);
        self.bits[(x / 64) as usize] >> (x % 64) & 1 == 1
    }

    /// Primes congruent to 1 mod 3, ascending.
    pub fn one_mod_three(&self) -> Vec<u64> {
        self.primes.iter().copied().filter(|p| p % 3 == 1).collect()
    }

    /// Records every prime's residue modulo `w`.
    pub fn index_classes(&mut self, w: u64) {
        assert!(w > 0 && w <= u32::MAX as u64);
        self.classes = self.primes.iter().map(|p| (p % w) as u32).collect();
        self.class_modulus = Some(w);
    }

    pub fn class_modulus(&self) -> Option<u64> {
        self.class_modulus
    }

    /// Residue of the i-th prime modulo the indexed modulus.
    pub fn class_of(&self, i: usize) -> Option<u32> {
        self.class_modulus.map(|_| self.classes[i])
    }

    pub fn primes_in_class(&self, w: u64, b: u64) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().copied().filter(move |p| p % w == b)
    }
}

/// Primality by trial division, for moduli and interval endpoints.
pub fn is_prime_small(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn next_prime(mut n: u64) -> u64 {
    while !is_prime_small(n) {
        n += 1;
    }
    n
}
