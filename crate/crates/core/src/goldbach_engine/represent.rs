//! Ordered representation counts n = p1 + p2 + p3 with every p_i in A.

use serde::{Deserialize, Serialize};

use super::ntt::{cube_counts, MAX_TRANSFORM_LEN};
use super::subset::DensitySubset;
use super::GoldbachError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountMethod {
    Direct,
    Convolution,
}

impl std::str::FromStr for CountMethod {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "direct" => Ok(CountMethod::Direct),
            "convolution" => Ok(CountMethod::Convolution),
            other => Err(format!("unknown method {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Targets {
    /// inclusive range
    Range(u64, u64),
    List(Vec<u64>),
}

impl Targets {
    fn values(&self) -> Vec<u64> {
        match self {
            Targets::Range(lo, hi) => (*lo..=*hi).collect(),
            Targets::List(v) => v.clone(),
        }
    }

    fn max(&self) -> Option<u64> {
        match self {
            Targets::Range(lo, hi) if lo <= hi => Some(*hi),
            Targets::Range(..) => None,
            Targets::List(v) => v.iter().copied().max(),
        }
    }
}

/// Counts for every n in `[0, max_target]` by an explicit triple loop over
/// sorted members.
pub fn direct_counts(members: &[u64], max_target: u64) -> Vec<u64> {
    let mut sorted: Vec<u64> = members.iter().copied().filter(|&x| x <= max_target).collect();
    sorted.sort_unstable();
    let mut counts = vec![0u64; max_target as usize + 1];
    for &x in &sorted {
        for &y in &sorted {
            if x + y > max_target {
                break;
            }
            for &z in &sorted {
                let s = x + y + z;
                if s > max_target {
                    break;
                }
                counts[s as usize] += 1;
            }
        }
    }
    counts
}

/// Counts for every n in `[0, max_target]` by exact transform cubing. Members
/// above the largest target are dropped, and the transform covers three times
/// the largest remaining member, so nothing wraps around.
pub fn convolution_counts(members: &[u64], max_target: u64) -> Vec<u64> {
    let kept: Vec<u64> = members.iter().copied().filter(|&x| x <= max_target).collect();
    let mut counts = cube_counts(&kept);
    counts.resize(max_target as usize + 1, 0);
    counts
}

fn counts_for(members: &[u64], max_target: u64, method: CountMethod) -> Vec<u64> {
    match method {
        CountMethod::Direct => direct_counts(members, max_target),
        CountMethod::Convolution => convolution_counts(members, max_target),
    }
}

fn check_range(a: &DensitySubset, max: u64) -> Result<(), GoldbachError> {
    let bound = 3 * a.limit();
    if max > bound {
        return Err(GoldbachError::TargetOutOfRange { n: max, max: bound });
    }
    let len = 3 * a.limit().min(max) + 1;
    if len > MAX_TRANSFORM_LEN {
        return Err(GoldbachError::TransformTooLarge { len, max: MAX_TRANSFORM_LEN });
    }
    Ok(())
}

/// `(n, count)` for each target.
pub fn count_representations(
    a: &DensitySubset,
    targets: &Targets,
    method: CountMethod,
) -> Result<Vec<(u64, u64)>, GoldbachError> {
    let Some(max) = targets.max() else {
        return Ok(Vec::new());
    };
    check_range(a, max)?;
    let counts = counts_for(&a.members(), max, method);
    Ok(targets.values().into_iter().map(|n| (n, counts[n as usize])).collect())
}

/// Integers odd and divisible by 3, i.e. `n = 3 mod 6`.
pub fn is_admissible_target(n: u64) -> bool {
    n % 6 == 3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub n_lo: u64,
    pub n_hi: u64,
    pub admissible_checked: u64,
    pub exceptional: Vec<u64>,
    pub min_count: Option<u64>,
    /// nonzero counts at n not 0 mod 3
    pub obstruction_breaks: u64,
    #[serde(skip)]
    pub counts: Vec<(u64, u64)>,
}

/// Admissible n in `[n_lo, n_hi]` with no representation. Also records any
/// nonzero count at n not divisible by 3, which cannot happen for A inside the
/// primes 1 mod 3.
pub fn scan_targets(a: &DensitySubset, n_lo: u64, n_hi: u64) -> Result<ScanReport, GoldbachError> {
    check_range(a, n_hi)?;
    let counts = convolution_counts(&a.members(), n_hi);
    Ok(scan_counts(&counts, n_lo, n_hi))
}

/// [`scan_targets`] over precomputed counts.
pub fn scan_counts(counts: &[u64], n_lo: u64, n_hi: u64) -> ScanReport {
    let mut r = ScanReport {
        n_lo,
        n_hi,
        admissible_checked: 0,
        exceptional: Vec::new(),
        min_count: None,
        obstruction_breaks: 0,
        counts: Vec::new(),
    };
    for n in n_lo..=n_hi.min(counts.len() as u64 - 1) {
        let c = counts[n as usize];
        if n % 3 != 0 && c != 0 {
            r.obstruction_breaks += 1;
        }
        if is_admissible_target(n) {
            r.admissible_checked += 1;
            r.counts.push((n, c));
            r.min_count = Some(r.min_count.map_or(c, |m| m.min(c)));
            if c == 0 {
                r.exceptional.push(n);
            }
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::goldbach_engine::{build_subset, sieve_primes, SubsetRule};
    use proptest::prelude::*;

    fn subset(limit: u64, rule: &str) -> DensitySubset {
        build_subset(&rule.parse::<SubsetRule>().unwrap(), &sieve_primes(limit).unwrap()).unwrap()
    }

    #[test]
    fn small_examples() {
        let a = subset(100, "custom:7,13,19");
        for m in [CountMethod::Direct, CountMethod::Convolution] {
            let c = count_representations(&a, &Targets::List(vec![39, 21, 40]), m).unwrap();
            assert_eq!(c, vec![(39, 7), (21, 1), (40, 0)]);
        }
        assert_eq!(
            count_representations(&a, &Targets::Range(1, 301), CountMethod::Direct),
            Err(GoldbachError::TargetOutOfRange { n: 301, max: 300 })
        );
    }

    #[test]
    fn modular_obstruction_and_empty_set() {
        let a = subset(2000, "all");
        let r = scan_targets(&a, 0, 6000).unwrap();
        assert_eq!(r.obstruction_breaks, 0);
        let empty = subset(2000, "custom:");
        let r = scan_targets(&empty, 100, 200).unwrap();
        assert_eq!(r.exceptional.len() as u64, r.admissible_checked);
        assert_eq!(r.exceptional.first(), Some(&105));
    }

    #[test]
    fn pattern_subset_misses_twelve_mod_fifteen() {
        let a = subset(20_000, "pattern:15:1,7");
        let counts = convolution_counts(&a.members(), 60_000);
        for n in (12..=60_000).step_by(15) {
            assert_eq!(counts[n], 0, "{n}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn direct_equals_convolution(p in 0.05f64..1.0, seed in any::<u64>()) {
            let a = subset(3000, &format!("bernoulli:{p}:{seed}"));
            let m = a.members();
            prop_assert_eq!(direct_counts(&m, 9000), convolution_counts(&m, 9000));
        }
    }
}
