//! Hypothesis checks and randomized counterexample search for the averaged
//! sequence lemmas.
//!
//! Samples are sorted integer sequences `u` in `[0, D]`, scaled by the largest
//! `t <= 1` for which the hypothesis still holds. The scaled entries share one
//! denominator, so both hypothesis and conclusion are checked in exact `i128`
//! arithmetic. A sparse subsample is re-checked with big rationals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{Rational, Scalar};

/// Resolution of the raw integer samples.
pub const SAMPLE_RESOLUTION: i128 = 1 << 10;
const CHUNK: u64 = 4096;
const CROSS_CHECK_EVERY: u64 = 997;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SequenceError {
    #[error("n must be even and at least {min}, got {n}")]
    BadLength { n: usize, min: usize },
    #[error("sequences must have equal length")]
    LengthMismatch,
    #[error("entries must lie in [0, 1]")]
    OutOfRange,
    #[error("sequences must be non-increasing")]
    NotMonotone,
}

/// Which right-hand side the hypothesis uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HypothesisForm {
    /// `P(i, j, k) <= (a_i + b_j + c_k) / 2`
    IndexWise,
    /// `P(i, j, k) <= (a_1 + a_2 + a_3) / 2`, read literally; symmetric only
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    /// a = b = c, conclusion `A <= 1/2`
    Symmetric,
    /// independent a, b, c, conclusion `AB + BC + CA <= (A + B + C) / 2`
    Asymmetric,
}

impl std::str::FromStr for SearchMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "symmetric" => Ok(SearchMode::Symmetric),
            "asymmetric" => Ok(SearchMode::Asymmetric),
            other => Err(format!("unknown mode {other:?}, expected symmetric or asymmetric")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceTriple<S> {
    a: Vec<S>,
    b: Vec<S>,
    c: Vec<S>,
}

fn check_seq<S: Scalar>(s: &[S]) -> Result<(), SequenceError> {
    if s.iter().any(|v| *v < S::zero() || *v > S::one()) {
        return Err(SequenceError::OutOfRange);
    }
    if s.windows(2).any(|w| w[0] < w[1]) {
        return Err(SequenceError::NotMonotone);
    }
    Ok(())
}

impl<S: Scalar> SequenceTriple<S> {
    pub fn new(a: Vec<S>, b: Vec<S>, c: Vec<S>) -> Result<Self, SequenceError> {
        let n = a.len();
        if n < 6 || !n.is_multiple_of(2) {
            return Err(SequenceError::BadLength { n, min: 6 });
        }
        if b.len() != n || c.len() != n {
            return Err(SequenceError::LengthMismatch);
        }
        for s in [&a, &b, &c] {
            check_seq(s)?;
        }
        Ok(SequenceTriple { a, b, c })
    }

    pub fn symmetric(a: Vec<S>) -> Result<Self, SequenceError> {
        Self::new(a.clone(), a.clone(), a)
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn is_symmetric(&self) -> bool {
        self.a == self.b && self.b == self.c
    }

    pub fn averages(&self) -> [S; 3] {
        let n = S::from_int(self.n() as i64);
        let avg = |s: &[S]| s.iter().fold(S::zero(), |acc, v| acc + v.clone()) / n.clone();
        [avg(&self.a), avg(&self.b), avg(&self.c)]
    }

    /// Conclusion of the symmetric lemma on `a`.
    pub fn symmetric_conclusion(&self) -> bool {
        self.averages()[0] <= S::from_ratio(1, 2)
    }

    pub fn asymmetric_conclusion(&self) -> bool {
        let [x, y, z] = self.averages();
        x.clone() * y.clone() + y.clone() * z.clone() + z.clone() * x.clone() <= (x + y + z) / S::from_int(2)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub holds: bool,
    pub witness_triple: Option<[usize; 3]>,
}

/// Index triples with `i + j + k >= n`, in lexicographic order. Symmetric
/// sequences only need `i <= j <= k`.
fn triples(n: usize, unordered: bool) -> impl Iterator<Item = [usize; 3]> {
    (0..n).flat_map(move |i| {
        let j0 = if unordered { i } else { 0 };
        (j0..n).flat_map(move |j| {
            let k0 = if unordered { j } else { 0 };
            (k0.max((n).saturating_sub(i + j))..n).map(move |k| [i, j, k])
        })
    })
}

/// Scans qualifying triples in lexicographic order and reports the first one
/// violating the hypothesis.
pub fn lemma_hypothesis_check<S: Scalar>(seq: &SequenceTriple<S>, form: HypothesisForm) -> HypothesisCheck {
    let n = seq.n();
    let half = S::from_ratio(1, 2);
    let literal = half.clone() * (seq.a[1].clone() + seq.a[2].clone() + seq.a[3].clone());
    for [i, j, k] in triples(n, seq.is_symmetric()) {
        let (x, y, z) = (&seq.a[i], &seq.b[j], &seq.c[k]);
        let p = x.clone() * y.clone() + y.clone() * z.clone() + z.clone() * x.clone();
        let rhs = match form {
            HypothesisForm::IndexWise => half.clone() * (x.clone() + y.clone() + z.clone()),
            HypothesisForm::Literal => literal.clone(),
        };
        if p > rhs {
            return HypothesisCheck {
                holds: false,
                witness_triple: Some([i, j, k]),
            };
        }
    }
    HypothesisCheck {
        holds: true,
        witness_triple: None,
    }
}

/// The hypothesis after `x = 4a - 1`: `x_i x_j + x_j x_k + x_k x_i <= 3`.
/// Its slack is 16 times the slack of the index-wise form.
pub fn transformed_slack<S: Scalar>(a: &S, b: &S, c: &S) -> S {
    let t = |v: &S| S::from_int(4) * v.clone() - S::one();
    let (x, y, z) = (t(a), t(b), t(c));
    S::from_int(3) - (x.clone() * y.clone() + y.clone() * z.clone() + z * x)
}

pub fn index_wise_slack<S: Scalar>(a: &S, b: &S, c: &S) -> S {
    S::from_ratio(1, 2) * (a.clone() + b.clone() + c.clone())
        - (a.clone() * b.clone() + b.clone() * c.clone() + c.clone() * a.clone())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub trial: u64,
    /// common denominator of the scaled sequences
    pub denominator: String,
    pub numerators: [Vec<String>; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub n: usize,
    pub mode: SearchMode,
    pub form: HypothesisForm,
    pub seed: u64,
    pub trials: u64,
    pub violations: u64,
    pub first_violation: Option<Violation>,
    /// samples whose scaled sequence hit the hypothesis boundary exactly
    pub boundary_samples: u64,
    /// samples re-verified with big rationals
    pub rational_cross_checks: u64,
    /// largest value of the conclusion's left side minus right side
    pub max_conclusion_excess: f64,
}

/// One scaled sample: entries `v / l` for each sequence.
struct Sample {
    v: [Vec<i128>; 3],
    l: i128,
    at_boundary: bool,
}

fn sorted_desc(rng: &mut ChaCha8Rng, n: usize) -> Vec<i128> {
    let mut u: Vec<i128> = (0..n).map(|_| rng.gen_range(0..=SAMPLE_RESOLUTION)).collect();
    u.sort_unstable_by(|x, y| y.cmp(x));
    u
}

/// Largest t in (0, 1] with the hypothesis holding for `t u / D`, as the pair
/// (sum, 2 * pair-product) attaining it, or None if t = 1 already works.
fn boundary_scale(u: &[Vec<i128>; 3], n: usize, form: HypothesisForm, unordered: bool) -> Option<(i128, i128)> {
    let d = SAMPLE_RESOLUTION;
    let literal = u[0][1] + u[0][2] + u[0][3];
    // t <= s D / (2 p); keep the smallest ratio s / p
    let mut best: Option<(i128, i128)> = None;
    for [i, j, k] in triples(n, unordered) {
        let (x, y, z) = (u[0][i], u[1][j], u[2][k]);
        let p = x * y + y * z + z * x;
        if p == 0 {
            continue;
        }
        let s = match form {
            HypothesisForm::IndexWise => x + y + z,
            HypothesisForm::Literal => literal,
        };
        match best {
            Some((bs, bp)) if s * bp >= bs * p => {}
            _ => best = Some((s, p)),
        }
    }
    let (s, p) = best?;
    // t = s D / (2 p) < 1 ?
    if s * d < 2 * p {
        Some((s, 2 * p))
    } else {
        None
    }
}

fn draw(rng: &mut ChaCha8Rng, n: usize, mode: SearchMode, form: HypothesisForm) -> Sample {
    let u: [Vec<i128>; 3] = match mode {
        SearchMode::Symmetric => {
            let a = sorted_desc(rng, n);
            [a.clone(), a.clone(), a]
        }
        SearchMode::Asymmetric => [sorted_desc(rng, n), sorted_desc(rng, n), sorted_desc(rng, n)],
    };
    // one sample in eight is pulled strictly inside the boundary
    let interior = rng.gen_range(0..8) == 0;
    let shrink: i128 = if interior { rng.gen_range(1..256) } else { 256 };
    let unordered = mode == SearchMode::Symmetric;
    let (mut v, mut l, at_boundary) = match boundary_scale(&u, n, form, unordered) {
        // entries u s / (2p)
        Some((s, two_p)) => (u.map(|x| x.into_iter().map(|e| e * s).collect::<Vec<_>>()), two_p, true),
        None => (u, SAMPLE_RESOLUTION, false),
    };
    if shrink != 256 {
        for seq in v.iter_mut() {
            for e in seq.iter_mut() {
                *e *= shrink;
            }
        }
        l *= 256;
    }
    Sample {
        v,
        l,
        at_boundary: at_boundary && shrink == 256,
    }
}

fn hypothesis_holds(s: &Sample, n: usize, form: HypothesisForm, unordered: bool) -> bool {
    let [a, b, c] = &s.v;
    let literal = a[1] + a[2] + a[3];
    triples(n, unordered).all(|[i, j, k]| {
        let (x, y, z) = (a[i], b[j], c[k]);
        let rhs = match form {
            HypothesisForm::IndexWise => x + y + z,
            HypothesisForm::Literal => literal,
        };
        2 * (x * y + y * z + z * x) <= s.l * rhs
    })
}

/// Conclusion excess scaled by `2 n^2 l^2` (symmetric: `2 n l`): positive means violated.
fn conclusion_excess(s: &Sample, n: usize, mode: SearchMode) -> (i128, f64) {
    let n = n as i128;
    let sums = s.v.clone().map(|x| x.iter().sum::<i128>());
    match mode {
        SearchMode::Symmetric => {
            let e = 2 * sums[0] - n * s.l;
            (e, e as f64 / (2 * n * s.l) as f64)
        }
        SearchMode::Asymmetric => {
            let [x, y, z] = sums;
            let e = 2 * (x * y + y * z + z * x) - n * s.l * (x + y + z);
            (e, e as f64 / (2 * n * n) as f64 / (s.l as f64 * s.l as f64))
        }
    }
}

fn to_rational_triple(s: &Sample) -> SequenceTriple<Rational> {
    let l = Rational::from_integer(s.l.into());
    let conv = |x: &Vec<i128>| x.iter().map(|&e| Rational::from_integer(e.into()) / &l).collect::<Vec<_>>();
    let [a, b, c] = &s.v;
    SequenceTriple::new(conv(a), conv(b), conv(c)).expect("scaled samples are valid sequences")
}

/// Searches for sequences satisfying the hypothesis but violating the
/// conclusion. Trials are split into fixed chunks, each with its own stream of
/// the seeded generator, so the result does not depend on thread count.
pub fn random_counterexample_search(
    n: usize,
    trials: u64,
    seed: u64,
    mode: SearchMode,
    form: HypothesisForm,
) -> Result<SearchReport, SequenceError> {
    let min = match mode {
        SearchMode::Symmetric => 6,
        SearchMode::Asymmetric => 10,
    };
    if n < min || !n.is_multiple_of(2) {
        return Err(SequenceError::BadLength { n, min });
    }
    let unordered = mode == SearchMode::Symmetric;
    let chunks = trials.div_ceil(CHUNK);
    let parts: Vec<SearchReport> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let mut r = SearchReport {
                n,
                mode,
                form,
                seed,
                trials: 0,
                violations: 0,
                first_violation: None,
                boundary_samples: 0,
                rational_cross_checks: 0,
                max_conclusion_excess: f64::NEG_INFINITY,
            };
            let start = chunk * CHUNK;
            for trial in start..(start + CHUNK).min(trials) {
                let s = draw(&mut rng, n, mode, form);
                let holds = hypothesis_holds(&s, n, form, unordered);
                assert!(holds, "scaled sample must satisfy the hypothesis");
                let (excess, ratio) = conclusion_excess(&s, n, mode);
                r.trials += 1;
                r.boundary_samples += s.at_boundary as u64;
                r.max_conclusion_excess = r.max_conclusion_excess.max(ratio);
                if trial % CROSS_CHECK_EVERY == 0 {
                    let seq = to_rational_triple(&s);
                    assert!(lemma_hypothesis_check(&seq, form).holds);
                    let ok = match mode {
                        SearchMode::Symmetric => seq.symmetric_conclusion(),
                        SearchMode::Asymmetric => seq.asymmetric_conclusion(),
                    };
                    assert_eq!(ok, excess <= 0, "integer and rational paths disagree");
                    r.rational_cross_checks += 1;
                }
                if excess > 0 {
                    r.violations += 1;
                    if r.first_violation.is_none() {
                        r.first_violation = Some(Violation {
                            trial,
                            denominator: s.l.to_string(),
                            numerators: s.v.map(|x| x.iter().map(|e| e.to_string()).collect()),
                        });
                    }
                }
            }
            r
        })
        .collect();
    let mut total = SearchReport {
        n,
        mode,
        form,
        seed,
        trials: 0,
        violations: 0,
        first_violation: None,
        boundary_samples: 0,
        rational_cross_checks: 0,
        max_conclusion_excess: f64::NEG_INFINITY,
    };
    for p in parts {
        total.trials += p.trials;
        total.violations += p.violations;
        total.boundary_samples += p.boundary_samples;
        total.rational_cross_checks += p.rational_cross_checks;
        total.max_conclusion_excess = total.max_conclusion_excess.max(p.max_conclusion_excess);
        if total.first_violation.is_none() {
            total.first_violation = p.first_violation;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::SmallRational;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn constant_half_is_boundary() {
        let seq = SequenceTriple::symmetric(vec![q(1, 2); 6]).unwrap();
        assert!(lemma_hypothesis_check(&seq, HypothesisForm::IndexWise).holds);
        assert_eq!(seq.averages()[0], q(1, 2));
        assert!(seq.symmetric_conclusion());
        let asym = SequenceTriple::new(vec![q(1, 2); 10], vec![q(1, 2); 10], vec![q(1, 2); 10]).unwrap();
        assert!(asym.asymmetric_conclusion());
        let [a, b, c] = asym.averages();
        assert_eq!(a.clone() * b.clone() + b.clone() * c.clone() + c.clone() * a.clone(), (a + b + c) / q(2, 1));
    }

    #[test]
    fn constant_one_fails_at_first_lex_triple() {
        let seq = SequenceTriple::symmetric(vec![SmallRational::from_int(1); 6]).unwrap();
        let r = lemma_hypothesis_check(&seq, HypothesisForm::IndexWise);
        assert!(!r.holds);
        assert_eq!(r.witness_triple, Some([0, 1, 5]));
    }

    #[test]
    fn trailing_zeros_hold() {
        // every qualifying triple has an index >= 2 when n = 6
        let mut a = vec![1.0f64, 1.0];
        a.extend([0.0; 4]);
        let seq = SequenceTriple::symmetric(a).unwrap();
        assert!(lemma_hypothesis_check(&seq, HypothesisForm::IndexWise).holds);
    }

    #[test]
    fn rejects_bad_sequences() {
        assert!(SequenceTriple::symmetric(vec![0.5f64; 7]).is_err());
        assert!(SequenceTriple::symmetric(vec![0.5f64; 4]).is_err());
        assert_eq!(
            SequenceTriple::symmetric(vec![0.1f64, 0.5, 0.5, 0.5, 0.5, 0.5]),
            Err(SequenceError::NotMonotone)
        );
        assert_eq!(SequenceTriple::symmetric(vec![1.5f64; 6]), Err(SequenceError::OutOfRange));
        assert!(random_counterexample_search(8, 10, 0, SearchMode::Asymmetric, HypothesisForm::IndexWise).is_err());
    }

    #[test]
    fn triple_enumeration() {
        let all: Vec<_> = triples(6, false).collect();
        let brute: Vec<_> = (0..6)
            .flat_map(|i| (0..6).flat_map(move |j| (0..6).map(move |k| [i, j, k])))
            .filter(|t| t.iter().sum::<usize>() >= 6)
            .collect();
        assert_eq!(all, brute);
        assert!(triples(6, true).all(|[i, j, k]| i <= j && j <= k && i + j + k >= 6));
        assert_eq!(triples(6, true).next(), Some([0, 1, 5]));
    }

    #[test]
    fn small_searches_find_nothing() {
        for (n, mode) in [(6, SearchMode::Symmetric), (10, SearchMode::Asymmetric)] {
            let r = random_counterexample_search(n, 3000, 7, mode, HypothesisForm::IndexWise).unwrap();
            assert_eq!(r.trials, 3000);
            assert_eq!(r.violations, 0, "{r:?}");
            assert!(r.boundary_samples > 0);
            assert!(r.rational_cross_checks > 0);
        }
    }

    #[test]
    fn search_is_deterministic() {
        let a = random_counterexample_search(8, 5000, 3, SearchMode::Symmetric, HypothesisForm::IndexWise).unwrap();
        let b = random_counterexample_search(8, 5000, 3, SearchMode::Symmetric, HypothesisForm::IndexWise).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn literal_form_runs() {
        let r = random_counterexample_search(6, 2000, 1, SearchMode::Symmetric, HypothesisForm::Literal).unwrap();
        assert_eq!(r.trials, 2000);
    }

    proptest! {
        #[test]
        fn transformed_slack_is_sixteen_times(a in 0i64..=64, b in 0i64..=64, c in 0i64..=64) {
            let (a, b, c) = (q(a, 64), q(b, 64), q(c, 64));
            prop_assert_eq!(transformed_slack(&a, &b, &c), q(16, 1) * index_wise_slack(&a, &b, &c));
        }

        #[test]
        fn symmetric_samples_pass_asymmetric_check(seed in 0u64..1000) {
            // a = b = c satisfying the hypothesis also meets the asymmetric conclusion
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = draw(&mut rng, 10, SearchMode::Symmetric, HypothesisForm::IndexWise);
            prop_assert!(hypothesis_holds(&s, 10, HypothesisForm::IndexWise, false));
            prop_assert!(conclusion_excess(&s, 10, SearchMode::Asymmetric).0 <= 0);
        }
    }
}
