//! Subsets of the primes congruent to 1 mod 3, with measured relative density.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use rand::distributions::{Bernoulli, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::sieve::PrimeTable;
use super::GoldbachError;
use crate::report::Exact;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum SubsetRule {
    All,
    /// primes whose residue mod `q` lies in `classes`
    Pattern { q: u64, classes: Vec<u64> },
    /// each prime kept independently with probability `p`
    Bernoulli { p: f64, seed: u64 },
    Custom { members: Vec<u64> },
}

fn list<T: FromStr>(s: &str, what: &str) -> Result<Vec<T>, GoldbachError> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| GoldbachError::InvalidRule(format!("bad {what} {t:?}")))
        })
        .collect()
}

/// Accepts `all`, `pattern:Q:C1,C2,..`, `bernoulli:P:SEED` and `custom:X1,X2,..`.
impl FromStr for SubsetRule {
    type Err = GoldbachError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let bad = || GoldbachError::InvalidRule(format!("cannot parse rule {s:?}"));
        match parts.as_slice() {
            ["all"] => Ok(SubsetRule::All),
            ["pattern", q, classes] => Ok(SubsetRule::Pattern {
                q: q.parse().map_err(|_| bad())?,
                classes: list(classes, "class")?,
            }),
            ["bernoulli", p, seed] => Ok(SubsetRule::Bernoulli {
                p: p.parse().map_err(|_| bad())?,
                seed: seed.parse().map_err(|_| bad())?,
            }),
            ["bernoulli", p] => Ok(SubsetRule::Bernoulli {
                p: p.parse().map_err(|_| bad())?,
                seed: 0,
            }),
            ["custom", members] => Ok(SubsetRule::Custom {
                members: list(members, "member")?,
            }),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for SubsetRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        match self {
            SubsetRule::All => write!(f, "all"),
            SubsetRule::Pattern { q, classes } => write!(f, "pattern:{q}:{}", join(classes)),
            SubsetRule::Bernoulli { p, seed } => write!(f, "bernoulli:{p}:{seed}"),
            SubsetRule::Custom { members } => write!(f, "custom:{}", join(members)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensitySubset {
    rule: SubsetRule,
    limit: u64,
    /// all primes 1 mod 3 up to the limit
    universe: Vec<u64>,
    mask: Vec<bool>,
    measured_density: Rational,
}

impl DensitySubset {
    pub fn rule(&self) -> &SubsetRule {
        &self.rule
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn members(&self) -> Vec<u64> {
        self.iter().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.universe.iter().zip(&self.mask).filter(|(_, m)| **m).map(|(p, _)| *p)
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|m| **m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn universe_len(&self) -> usize {
        self.universe.len()
    }

    /// |A| / |P_{1,3} up to the limit|, or 0 when there are no such primes.
    pub fn measured_density(&self) -> &Rational {
        &self.measured_density
    }

    pub fn recompute_density(&self) -> Rational {
        if self.universe.is_empty() {
            return Rational::from_integer(0.into());
        }
        Rational::new(self.len().into(), self.universe.len().into())
    }

    /// Members up to `bound`.
    pub fn members_up_to(&self, bound: u64) -> Vec<u64> {
        self.iter().take_while(|&p| p <= bound).collect()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.universe
            .binary_search(&x)
            .map(|i| self.mask[i])
            .unwrap_or(false)
    }

    pub fn summary(&self) -> SubsetSummary {
        SubsetSummary {
            rule: self.rule.to_string(),
            limit: self.limit,
            size: self.len(),
            universe: self.universe.len(),
            measured_density: Exact(self.measured_density.clone()),
            measured_density_approx: crate::Scalar::to_f64(&self.measured_density),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetSummary {
    pub rule: String,
    pub limit: u64,
    pub size: usize,
    pub universe: usize,
    pub measured_density: Exact,
    pub measured_density_approx: f64,
}

pub fn build_subset(rule: &SubsetRule, table: &PrimeTable) -> Result<DensitySubset, GoldbachError> {
    let universe = table.one_mod_three();
    let mask: Vec<bool> = match rule {
        SubsetRule::All => vec![true; universe.len()],
        SubsetRule::Pattern { q, classes } => {
            if *q == 0 || classes.is_empty() {
                return Err(GoldbachError::InvalidRule("pattern needs q > 0 and at least one class".into()));
            }
            for &c in classes {
                if c >= *q || c.gcd(q) != 1 {
                    return Err(GoldbachError::InvalidRule(format!("{c} is not a reduced residue mod {q}")));
                }
                if q % 3 == 0 && c % 3 != 1 {
                    return Err(GoldbachError::InvalidRule(format!("class {c} mod {q} is not 1 mod 3")));
                }
            }
            universe.iter().map(|p| classes.contains(&(p % q))).collect()
        }
        SubsetRule::Bernoulli { p, seed } => {
            let dist = Bernoulli::new(*p)
                .map_err(|_| GoldbachError::InvalidRule(format!("probability {p} is not in [0, 1]")))?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            universe.iter().map(|_| dist.sample(&mut rng)).collect()
        }
        SubsetRule::Custom { members } => {
            for &x in members {
                if x > table.limit() || !table.is_prime(x) || x % 3 != 1 {
                    return Err(GoldbachError::InvalidRule(format!(
                        "{x} is not a prime 1 mod 3 up to {}",
                        table.limit()
                    )));
                }
            }
            universe.iter().map(|p| members.contains(p)).collect()
        }
    };
    let mut s = DensitySubset {
        rule: rule.clone(),
        limit: table.limit(),
        universe,
        mask,
        measured_density: Rational::from_integer(0.into()),
    };
    s.measured_density = s.recompute_density();
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::goldbach_engine::sieve_primes;

    #[test]
    fn parse_round_trip() {
        for s in ["all", "pattern:15:1,7", "bernoulli:0.55:1", "custom:7,13,19"] {
            let r: SubsetRule = s.parse().unwrap();
            assert_eq!(r.to_string(), s);
        }
        assert!("pattern:15".parse::<SubsetRule>().is_err());
        assert!("bernoulli:x:1".parse::<SubsetRule>().is_err());
        assert!("nothing".parse::<SubsetRule>().is_err());
    }

    #[test]
    fn rules() {
        let t = sieve_primes(100).unwrap();
        let all = build_subset(&SubsetRule::All, &t).unwrap();
        assert_eq!(all.measured_density(), &Rational::from_integer(1.into()));
        let pat = build_subset(&"pattern:15:1,7".parse().unwrap(), &t).unwrap();
        assert_eq!(pat.members(), vec![7, 31, 37, 61, 67, 97]);
        assert_eq!(pat.recompute_density(), *pat.measured_density());
        assert!(pat.contains(37) && !pat.contains(43) && !pat.contains(38));
        let custom = build_subset(&"custom:7,13,19".parse().unwrap(), &t).unwrap();
        assert_eq!(custom.members(), vec![7, 13, 19]);
        assert_eq!(custom.members_up_to(13), vec![7, 13]);
        for bad in ["pattern:15:2", "pattern:15:5", "pattern:15:4,16", "custom:11", "custom:91", "bernoulli:1.5:0"] {
            assert!(build_subset(&bad.parse().unwrap(), &t).is_err(), "{bad}");
        }
    }

    #[test]
    fn bernoulli_is_seeded() {
        let t = sieve_primes(100_000).unwrap();
        let r: SubsetRule = "bernoulli:0.55:1".parse().unwrap();
        let a = build_subset(&r, &t).unwrap();
        assert_eq!(a, build_subset(&r, &t).unwrap());
        let d = crate::Scalar::to_f64(a.measured_density());
        assert!((d - 0.55).abs() < 0.03, "{d}");
        assert!(a.iter().all(|p| p % 3 == 1 && t.is_prime(p)));
    }
}
