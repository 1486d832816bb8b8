//! Arithmetic in Z_m for squarefree m: unit sets, CRT splits and sumsets.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ResidueError {
    #[error("modulus must be at least 1")]
    ZeroModulus,
    #[error("{m} is not squarefree: {p}^2 divides it")]
    NotSquarefree { m: u64, p: u64 },
    #[error("a mod-3 class filter needs 3 | m, got m = {0}")]
    FilterRequiresThree(u64),
    #[error("({m1}, {m2}) is not a coprime factorization of {m}")]
    NotCoprimeSplit { m: u64, m1: u64, m2: u64 },
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("empty residue set")]
    EmptySet,
    #[error("{0} is not prime")]
    CompositeModulus(u64),
}

/// A squarefree modulus together with its prime factors (ascending).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SquarefreeModulus {
    m: u64,
    primes: Vec<u64>,
}

/// Trial-division factorization; rejects any repeated prime factor.
pub fn factorize_squarefree(m: u64) -> Result<SquarefreeModulus, ResidueError> {
    if m == 0 {
        return Err(ResidueError::ZeroModulus);
    }
    let mut rest = m;
    let mut primes = Vec::new();
    let mut p = 2u64;
    while p * p <= rest {
        if rest.is_multiple_of(p) {
            rest /= p;
            if rest.is_multiple_of(p) {
                return Err(ResidueError::NotSquarefree { m, p });
            }
            primes.push(p);
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        primes.push(rest);
    }
    Ok(SquarefreeModulus { m, primes })
}

impl SquarefreeModulus {
    pub fn new(m: u64) -> Result<Self, ResidueError> {
        factorize_squarefree(m)
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn is_odd(&self) -> bool {
        self.m % 2 == 1
    }

    pub fn is_prime(&self) -> bool {
        self.primes.len() == 1
    }

    pub fn divisible_by(&self, d: u64) -> bool {
        self.m.is_multiple_of(d)
    }

    /// Euler's totient; for squarefree m this is the product of (p - 1).
    pub fn phi(&self) -> u64 {
        self.primes.iter().map(|p| p - 1).product()
    }

    pub fn is_unit(&self, x: u64) -> bool {
        (x % self.m).gcd(&self.m) == 1
    }

    pub fn units(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.m).filter(move |&x| self.is_unit(x))
    }

    pub fn reduce(&self, x: i64) -> u64 {
        x.rem_euclid(self.m as i64) as u64
    }
}

impl fmt::Display for SquarefreeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.m)
    }
}

/// Optional restriction applied on top of the unit group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassFilter {
    None,
    OneModThree,
    ZeroModThree,
}

/// A subset of Z_m stored as a bit set over the canonical residues [0, m).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ResidueSet {
    modulus: SquarefreeModulus,
    words: Vec<u64>,
}

impl fmt::Debug for ResidueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} (mod {})", self.to_vec(), self.modulus.m)
    }
}

fn word_count(m: u64) -> usize {
    (m as usize).div_ceil(64)
}

impl ResidueSet {
    pub fn empty(modulus: &SquarefreeModulus) -> Self {
        ResidueSet {
            modulus: modulus.clone(),
            words: vec![0; word_count(modulus.m)],
        }
    }

    /// Builds a set from arbitrary integers, reducing each into [0, m).
    pub fn from_residues<I>(modulus: &SquarefreeModulus, residues: I) -> Self
    where
        I: IntoIterator<Item = i64>,
    {
        let mut set = Self::empty(modulus);
        for r in residues {
            set.insert(modulus.reduce(r));
        }
        set
    }

    pub fn modulus(&self) -> &SquarefreeModulus {
        &self.modulus
    }

    pub fn insert(&mut self, x: u64) {
        let x = x % self.modulus.m;
        self.words[(x / 64) as usize] |= 1 << (x % 64);
    }

    pub fn contains(&self, x: u64) -> bool {
        let x = x % self.modulus.m;
        self.words[(x / 64) as usize] >> (x % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as u64;
                w &= w - 1;
                Some(i as u64 * 64 + b)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.iter().collect()
    }

    pub fn is_subset(&self, other: &ResidueSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn intersection(&self, other: &ResidueSet) -> Result<ResidueSet, ResidueError> {
        self.same_modulus(other)?;
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        Ok(ResidueSet {
            modulus: self.modulus.clone(),
            words,
        })
    }

    fn same_modulus(&self, other: &ResidueSet) -> Result<(), ResidueError> {
        if self.modulus.m != other.modulus.m {
            return Err(ResidueError::ModulusMismatch(self.modulus.m, other.modulus.m));
        }
        Ok(())
    }

    /// ORs the rotation `x -> x + k (mod m)` of `self` into `dst`.
    fn rotate_or_into(&self, k: u64, dst: &mut [u64]) {
        let m = self.modulus.m;
        let k = k % m;
        if k == 0 {
            for (d, s) in dst.iter_mut().zip(&self.words) {
                *d |= s;
            }
            return;
        }
        // bits [0, m - k) move up by k, bits [m - k, m) wrap down by m - k
        shl_or(&self.words, k, m, dst);
        shr_or(&self.words, m - k, dst);
    }

    /// The pairwise sumset {a + b mod m}.
    pub fn sumset(&self, other: &ResidueSet) -> Result<ResidueSet, ResidueError> {
        self.same_modulus(other)?;
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = Self::empty(&self.modulus);
        for a in small.iter() {
            large.rotate_or_into(a, &mut out.words);
        }
        Ok(out)
    }
}

fn shl_or(src: &[u64], k: u64, m: u64, dst: &mut [u64]) {
    let ws = (k / 64) as usize;
    let bs = k % 64;
    for i in (ws..dst.len()).rev() {
        let j = i - ws;
        let mut v = src[j] << bs;
        if bs > 0 && j > 0 {
            v |= src[j - 1] >> (64 - bs);
        }
        dst[i] |= v;
    }
    let tail = m % 64;
    if tail != 0 {
        let last = dst.len() - 1;
        dst[last] &= (1u64 << tail) - 1;
    }
}

#[allow(clippy::needless_range_loop)]
fn shr_or(src: &[u64], k: u64, dst: &mut [u64]) {
    let ws = (k / 64) as usize;
    let bs = k % 64;
    for i in 0..dst.len() {
        let j = i + ws;
        if j >= src.len() {
            break;
        }
        let mut v = src[j] >> bs;
        if bs > 0 && j + 1 < src.len() {
            v |= src[j + 1] << (64 - bs);
        }
        dst[i] |= v;
    }
}

/// Units of Z_m, optionally restricted to one class mod 3.
pub fn unit_class_set(
    modulus: &SquarefreeModulus,
    filter: ClassFilter,
) -> Result<ResidueSet, ResidueError> {
    if filter != ClassFilter::None && !modulus.divisible_by(3) {
        return Err(ResidueError::FilterRequiresThree(modulus.m));
    }
    let mut set = ResidueSet::empty(modulus);
    for x in modulus.units() {
        let keep = match filter {
            ClassFilter::None => true,
            ClassFilter::OneModThree => x % 3 == 1,
            // units are never divisible by 3 when 3 | m, so this is empty by construction
            ClassFilter::ZeroModThree => x % 3 == 0,
        };
        if keep {
            set.insert(x);
        }
    }
    Ok(set)
}

/// All residues in [0, m) that are divisible by 3 (requires 3 | m).
pub fn zero_mod_three_classes(modulus: &SquarefreeModulus) -> Result<ResidueSet, ResidueError> {
    if !modulus.divisible_by(3) {
        return Err(ResidueError::FilterRequiresThree(modulus.m));
    }
    Ok(ResidueSet::from_residues(
        modulus,
        (0..modulus.m as i64).step_by(3),
    ))
}

/// Z_m identified with Z_{m1} x Z_{m2} for a coprime factorization m = m1 m2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrtSplit {
    m: u64,
    m1: u64,
    m2: u64,
    /// idempotent that is 1 mod m1 and 0 mod m2
    e1: u64,
    /// idempotent that is 0 mod m1 and 1 mod m2
    e2: u64,
}

pub fn crt_split(modulus: &SquarefreeModulus, m1: u64, m2: u64) -> Result<CrtSplit, ResidueError> {
    let m = modulus.m;
    if m1 == 0 || m2 == 0 || m1.checked_mul(m2) != Some(m) || m1.gcd(&m2) != 1 {
        return Err(ResidueError::NotCoprimeSplit { m, m1, m2 });
    }
    let e1 = idempotent(m1, m2);
    let e2 = idempotent(m2, m1);
    Ok(CrtSplit { m, m1, m2, e1, e2 })
}

/// Returns e in [0, a*b) with e = 1 mod a and e = 0 mod b.
fn idempotent(a: u64, b: u64) -> u64 {
    if a == 1 {
        return 0;
    }
    let g = (b as i128).extended_gcd(&(a as i128));
    // g.x * b + g.y * a = 1
    let inv_b = g.x.rem_euclid(a as i128);
    ((inv_b * b as i128) % (a as i128 * b as i128)) as u64
}

impl CrtSplit {
    pub fn factors(&self) -> (u64, u64) {
        (self.m1, self.m2)
    }

    pub fn split(&self, x: u64) -> (u64, u64) {
        let x = x % self.m;
        (x % self.m1, x % self.m2)
    }

    pub fn combine(&self, u: u64, v: u64) -> u64 {
        let m = self.m as u128;
        ((self.e1 as u128 * (u % self.m1) as u128 + self.e2 as u128 * (v % self.m2) as u128) % m)
            as u64
    }
}

/// A + B + C computed with two pairwise passes.
pub fn triple_sumset(
    a: &ResidueSet,
    b: &ResidueSet,
    c: &ResidueSet,
) -> Result<ResidueSet, ResidueError> {
    a.sumset(b)?.sumset(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CauchyDavenportCheck {
    pub bound: u64,
    pub actual: u64,
    pub holds: bool,
}

/// Compares |A1 + A2 + A3| with min(p, |A1| + |A2| + |A3| - 2) in Z_p.
pub fn cauchy_davenport_check(
    sets: [&ResidueSet; 3],
) -> Result<CauchyDavenportCheck, ResidueError> {
    let modulus = sets[0].modulus();
    if !modulus.is_prime() {
        return Err(ResidueError::CompositeModulus(modulus.m()));
    }
    if sets.iter().any(|s| s.is_empty()) {
        return Err(ResidueError::EmptySet);
    }
    let sum = triple_sumset(sets[0], sets[1], sets[2])?;
    let sizes: u64 = sets.iter().map(|s| s.len() as u64).sum();
    let bound = modulus.m().min(sizes - 2);
    let actual = sum.len() as u64;
    Ok(CauchyDavenportCheck {
        bound,
        actual,
        holds: actual >= bound,
    })
}
