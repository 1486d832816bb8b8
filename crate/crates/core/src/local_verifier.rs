//! Checks of the local sumset theorem over Z_m and of its Z_15 ingredient.
//!
//! Weights are generic over [`Scalar`] so strict inequalities such as
//! `sum f > phi(m)/4` and `f(a1) + f(a2) + f(a3) > 3/2` are decided exactly
//! when a rational type is used.

use rand::{seq::SliceRandom, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp_certifier::t_function;
use crate::residue_ring::{
    cauchy_davenport_check, triple_sumset, unit_class_set, zero_mod_three_classes, ClassFilter,
    CrtSplit, ResidueError, ResidueSet, SquarefreeModulus,
};
use crate::{Scalar, SmallRational};

/// Default cap on the number of subsets enumerated by [`verify_local_indicator`].
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 10_000_000;
/// Denominator bound for randomly drawn weight values.
pub const DEFAULT_DENOMINATOR: i64 = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LocalError {
    #[error(transparent)]
    Residue(#[from] ResidueError),
    #[error("modulus {0} is not divisible by 3")]
    ModulusNotDivisibleBy3(u64),
    #[error("modulus {0} is even")]
    EvenModulus(u64),
    #[error("{needed} subsets exceed the enumeration budget of {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error("weight at {residue} is outside [0, 1]")]
    WeightOutOfRange { residue: u64 },
    #[error("weight is nonzero at non-unit {residue}")]
    NonUnitWeight { residue: u64 },
    #[error("weight is nonzero at {residue}, outside the permitted classes mod 3")]
    SupportViolation { residue: u64 },
    #[error("expected modulus 15, got {0}")]
    WrongModulus(u64),
    #[error("target {0} is not divisible by 3")]
    BadTarget(u64),
    #[error("no triple of units sums to {target} with weight sum above 3/2")]
    NoWitness { target: u64 },
    #[error("weights of different moduli")]
    ModulusMismatch,
}

/// A function on Z_m that vanishes off the units, with values in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct UnitWeight<S> {
    modulus: SquarefreeModulus,
    values: Vec<S>,
    one_mod_three: bool,
}

impl<S: Scalar> UnitWeight<S> {
    /// Builds a weight from `(residue, value)` pairs; unlisted residues get 0
    /// and a later pair for the same class overwrites an earlier one.
    pub fn new<I>(modulus: &SquarefreeModulus, entries: I, one_mod_three: bool) -> Result<Self, LocalError>
    where
        I: IntoIterator<Item = (u64, S)>,
    {
        let m = modulus.m();
        let mut values = vec![S::zero(); m as usize];
        for (r, v) in entries {
            values[(r % m) as usize] = v;
        }
        let w = UnitWeight {
            modulus: modulus.clone(),
            values,
            one_mod_three,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn indicator(set: &ResidueSet, one_mod_three: bool) -> Result<Self, LocalError> {
        Self::new(set.modulus(), set.iter().map(|x| (x, S::one())), one_mod_three)
    }

    fn validate(&self) -> Result<(), LocalError> {
        if self.one_mod_three && !self.modulus.divisible_by(3) {
            return Err(ResidueError::FilterRequiresThree(self.modulus.m()).into());
        }
        for (r, v) in self.values.iter().enumerate() {
            let r = r as u64;
            if *v < S::zero() || *v > S::one() {
                return Err(LocalError::WeightOutOfRange { residue: r });
            }
            if v.is_zero() {
                continue;
            }
            if !self.modulus.is_unit(r) {
                return Err(LocalError::NonUnitWeight { residue: r });
            }
            if self.one_mod_three && r % 3 != 1 {
                return Err(LocalError::SupportViolation { residue: r });
            }
        }
        Ok(())
    }

    pub fn modulus(&self) -> &SquarefreeModulus {
        &self.modulus
    }

    pub fn value(&self, r: u64) -> &S {
        &self.values[(r % self.modulus.m()) as usize]
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn is_one_mod_three(&self) -> bool {
        self.one_mod_three
    }

    pub fn total(&self) -> S {
        self.values.iter().fold(S::zero(), |acc, v| acc + v.clone())
    }

    pub fn support(&self) -> ResidueSet {
        ResidueSet::from_residues(
            &self.modulus,
            self.values
                .iter()
                .enumerate()
                .filter(|(_, v)| *v > &S::zero())
                .map(|(r, _)| r as i64),
        )
    }

    /// Multiplies every value by `lambda` in (0, 1].
    pub fn scaled(&self, lambda: &S) -> Self {
        UnitWeight {
            modulus: self.modulus.clone(),
            values: self.values.iter().map(|v| v.clone() * lambda.clone()).collect(),
            one_mod_three: self.one_mod_three,
        }
    }

    /// True when `sum f > phi(m) / 4`.
    pub fn exceeds_quarter_density(&self) -> bool {
        self.total() * S::from_int(4) > S::from_int(self.modulus.phi() as i64)
    }
}

/// Three units with a given sum and their total weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalWitness<S> {
    pub a: [u64; 3],
    pub weight_sum: S,
}

impl<S: Scalar> LocalWitness<S> {
    /// Re-checks every invariant against the weights the witness came from.
    pub fn verify(&self, weights: [&UnitWeight<S>; 3], target: u64) -> bool {
        let md = weights[0].modulus();
        let m = md.m();
        let sum_ok = (self.a[0] + self.a[1] + self.a[2]) % m == target % m;
        let units_ok = self.a.iter().all(|&x| md.is_unit(x));
        let positive = (0..3).all(|i| *weights[i].value(self.a[i]) > S::zero());
        let total = (0..3).fold(S::zero(), |acc, i| acc + weights[i].value(self.a[i]).clone());
        let three_halves = S::from_ratio(3, 2);
        sum_ok && units_ok && positive && total == self.weight_sum && total > three_halves
    }
}

/// Best witness over ordered unit triples summing to `target`, lexicographically
/// smallest among maximizers. Returns `None` when no triple has positive weights.
fn best_triple<S: Scalar>(weights: [&UnitWeight<S>; 3], target: u64) -> Option<LocalWitness<S>> {
    let m = weights[0].modulus().m();
    let supports: Vec<Vec<u64>> = weights.iter().map(|w| w.support().to_vec()).collect();
    let mut best: Option<LocalWitness<S>> = None;
    for &a1 in &supports[0] {
        for &a2 in &supports[1] {
            let a3 = (2 * m + target % m - a1 - a2) % m;
            let v3 = weights[2].value(a3);
            if *v3 <= S::zero() {
                continue;
            }
            let sum = weights[0].value(a1).clone() + weights[1].value(a2).clone() + v3.clone();
            // (a1, a2) are visited in increasing order, so strict improvement keeps the
            // lexicographically smallest maximizer
            if best.as_ref().is_none_or(|b| sum > b.weight_sum) {
                best = Some(LocalWitness {
                    a: [a1, a2, a3],
                    weight_sum: sum,
                });
            }
        }
    }
    best
}

fn above_three_halves<S: Scalar>(w: Option<LocalWitness<S>>) -> Option<LocalWitness<S>> {
    w.filter(|w| w.weight_sum > S::from_ratio(3, 2))
}

fn check_local_modulus(modulus: &SquarefreeModulus) -> Result<(), LocalError> {
    if !modulus.is_odd() {
        return Err(LocalError::EvenModulus(modulus.m()));
    }
    if !modulus.divisible_by(3) {
        return Err(LocalError::ModulusNotDivisibleBy3(modulus.m()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessReport {
    pub holds: bool,
    pub missing_class: Option<u64>,
    pub sumset: Vec<u64>,
    /// sum of the indicator of {1, 7} over Z_15^*
    pub indicator_sum: i64,
    /// phi(15) / 4
    pub quarter_phi: i64,
}

/// A = {1, 7} in Z_15^* has A + A + A missing 12 while sum f = phi(15)/4.
pub fn verify_sharpness() -> SharpnessReport {
    let md = SquarefreeModulus::new(15).expect("15 is squarefree");
    let a = ResidueSet::from_residues(&md, [1, 7]);
    let sum = triple_sumset(&a, &a, &a).expect("same modulus");
    let zeros = zero_mod_three_classes(&md).expect("3 | 15");
    let missing: Vec<u64> = zeros.iter().filter(|&x| !sum.contains(x)).collect();
    let f = UnitWeight::<SmallRational>::indicator(&a, true).expect("valid indicator");
    let total = f.total();
    let quarter = SmallRational::new(md.phi() as i64, 4);
    SharpnessReport {
        holds: missing == [12] && total == quarter,
        missing_class: missing.first().copied(),
        sumset: sum.to_vec(),
        indicator_sum: total.to_integer(),
        quarter_phi: quarter.to_integer(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndicatorFailure {
    pub set: Vec<u64>,
    pub target: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndicatorReport {
    pub m: u64,
    pub min_size: usize,
    pub checked_subsets: u64,
    pub failures: Vec<IndicatorFailure>,
}

#[derive(Debug, Clone, Copy)]
pub struct IndicatorOptions {
    /// Smallest subset size checked; `None` means floor(phi(m)/4) + 1.
    pub min_size: Option<usize>,
    pub budget: u64,
}

impl Default for IndicatorOptions {
    fn default() -> Self {
        IndicatorOptions {
            min_size: None,
            budget: DEFAULT_ENUMERATION_BUDGET,
        }
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of subsets of the 1-mod-3 units that the exhaustive check would visit.
pub fn indicator_subset_count(modulus: &SquarefreeModulus, min_size: usize) -> u64 {
    let u = modulus.phi() / 2;
    (min_size as u64..=u).map(|k| binomial(u, k)).sum()
}

/// Rotation-based sumsets on a single u128, for m <= 128.
#[derive(Clone, Copy)]
struct Mask128 {
    m: u32,
    full: u128,
}

impl Mask128 {
    fn new(m: u64) -> Self {
        let full = if m == 128 { u128::MAX } else { (1u128 << m) - 1 };
        Mask128 { m: m as u32, full }
    }

    fn rotate(&self, x: u128, k: u32) -> u128 {
        if k == 0 {
            return x;
        }
        ((x << k) | (x >> (self.m - k))) & self.full
    }

    fn sumset(&self, a: u128, b: u128) -> u128 {
        let mut out = 0;
        let mut rest = a;
        while rest != 0 {
            let k = rest.trailing_zeros();
            rest &= rest - 1;
            out |= self.rotate(b, k);
        }
        out
    }
}

/// For every A within the 1-mod-3 units with |A| > phi(m)/4, checks that
/// A + A + A covers every class divisible by 3.
pub fn verify_local_indicator(
    modulus: &SquarefreeModulus,
    options: IndicatorOptions,
) -> Result<IndicatorReport, LocalError> {
    check_local_modulus(modulus)?;
    let units = unit_class_set(modulus, ClassFilter::OneModThree)?.to_vec();
    let zeros = zero_mod_three_classes(modulus)?;
    let min_size = options
        .min_size
        .unwrap_or((modulus.phi() / 4) as usize + 1);
    let needed = indicator_subset_count(modulus, min_size);
    if needed > options.budget {
        return Err(LocalError::BudgetExceeded {
            needed,
            budget: options.budget,
        });
    }
    let u = units.len() as u32;
    assert!(u < 64, "enumeration over {u} units cannot fit the budget");
    let total_masks = 1u64 << u;
    const CHUNK: u64 = 1 << 14;
    let chunks = total_masks.div_ceil(CHUNK);

    let check_chunk = |c: u64| -> (u64, Vec<IndicatorFailure>) {
        let mut checked = 0;
        let mut failures = Vec::new();
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(total_masks);
        for mask in lo..hi {
            if (mask.count_ones() as usize) < min_size {
                continue;
            }
            checked += 1;
            let members = units
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &x)| x);
            let missing = missing_targets(modulus, members.clone(), &zeros);
            for target in missing {
                failures.push(IndicatorFailure {
                    set: members.clone().collect(),
                    target,
                });
            }
        }
        (checked, failures)
    };

    let (checked, mut failures) = (0..chunks)
        .into_par_iter()
        .map(check_chunk)
        .reduce(
            || (0, Vec::new()),
            |(c1, mut f1), (c2, f2)| {
                f1.extend(f2);
                (c1 + c2, f1)
            },
        );
    failures.sort_by(|a, b| a.set.cmp(&b.set).then(a.target.cmp(&b.target)));
    Ok(IndicatorReport {
        m: modulus.m(),
        min_size,
        checked_subsets: checked,
        failures,
    })
}

fn missing_targets<I>(modulus: &SquarefreeModulus, members: I, zeros: &ResidueSet) -> Vec<u64>
where
    I: Iterator<Item = u64> + Clone,
{
    let m = modulus.m();
    if m <= 128 {
        let ring = Mask128::new(m);
        let a = members.fold(0u128, |acc, x| acc | 1 << x);
        let aaa = ring.sumset(a, ring.sumset(a, a));
        zeros.iter().filter(|&x| aaa >> x & 1 == 0).collect()
    } else {
        let a = ResidueSet::from_residues(modulus, members.map(|x| x as i64));
        let aaa = triple_sumset(&a, &a, &a).expect("same modulus");
        zeros.iter().filter(|&x| !aaa.contains(x)).collect()
    }
}

/// Draws a weight supported on the 1-mod-3 units with `sum f > phi(m)/4`.
///
/// The support is a uniformly chosen subset of size above phi(m)/4; values are
/// multiples of `1/denominator`, then pushed towards 1 just far enough (plus a
/// random margin) to clear the mean hypothesis.
pub fn sample_weight(
    modulus: &SquarefreeModulus,
    denominator: i64,
    rng: &mut impl Rng,
) -> Result<UnitWeight<SmallRational>, LocalError> {
    let units = unit_class_set(modulus, ClassFilter::OneModThree)?.to_vec();
    let phi = modulus.phi() as i64;
    let min_size = (phi / 4) as usize + 1;
    let size = rng.gen_range(min_size..=units.len());
    let support: Vec<u64> = units.choose_multiple(rng, size).copied().collect();
    let mut values: Vec<SmallRational> = support
        .iter()
        .map(|_| SmallRational::new(rng.gen_range(1..=denominator), denominator))
        .collect();
    let threshold = SmallRational::new(phi, 4);
    let total: SmallRational = values.iter().sum();
    if total <= threshold {
        let slack: SmallRational = values.iter().map(|v| SmallRational::from_integer(1) - v).sum();
        // smallest t with total + t * slack = threshold, then a random step towards 1
        let t0 = (threshold - total) / slack;
        let step = SmallRational::new(rng.gen_range(1..=denominator), denominator);
        let one = SmallRational::from_integer(1);
        let t = t0 + (one - t0) * step;
        for v in values.iter_mut() {
            *v = *v + (one - *v) * t;
        }
    }
    UnitWeight::new(modulus, support.into_iter().zip(values), true)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedFailure {
    pub trial: u64,
    pub target: u64,
    pub weights: Vec<(u64, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedReport {
    pub m: u64,
    pub trials: u64,
    pub seed: u64,
    pub failures: Vec<WeightedFailure>,
}

/// Random weights satisfying the hypothesis; every target divisible by 3 must
/// admit a witness.
pub fn random_weighted_check(
    modulus: &SquarefreeModulus,
    trials: u64,
    seed: u64,
) -> Result<WeightedReport, LocalError> {
    check_local_modulus(modulus)?;
    let zeros = zero_mod_three_classes(modulus)?.to_vec();
    let failures: Vec<WeightedFailure> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial);
            let f = sample_weight(modulus, DEFAULT_DENOMINATOR, &mut rng)?;
            assert!(f.exceeds_quarter_density());
            let mut out = Vec::new();
            for &x in &zeros {
                let w = above_three_halves(best_triple([&f, &f, &f], x));
                if !w.is_some_and(|w| w.verify([&f, &f, &f], x)) {
                    out.push(WeightedFailure {
                        trial,
                        target: x,
                        weights: f
                            .support()
                            .iter()
                            .map(|r| (r, f.value(r).to_string()))
                            .collect(),
                    });
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>, LocalError>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(WeightedReport {
        m: modulus.m(),
        trials,
        seed,
        failures,
    })
}

/// Searches for a witness under the local theorem's hypothesis, rejecting
/// weights that do not satisfy it.
pub fn find_local_witness<S: Scalar>(
    f: &UnitWeight<S>,
    target: u64,
) -> Result<Option<LocalWitness<S>>, LocalError> {
    check_local_modulus(f.modulus())?;
    if !target.is_multiple_of(3) {
        return Err(LocalError::BadTarget(target));
    }
    if !f.exceeds_quarter_density() {
        return Ok(None);
    }
    Ok(above_three_halves(best_triple([f, f, f], target)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringOutcome<S> {
    /// F1 F2 + F2 F3 + F3 F1 > 2 (F1 + F2 + F3)
    pub hypothesis_holds: bool,
    /// Best triple found, if its weight sum exceeds 3/2.
    pub witness: Option<LocalWitness<S>>,
}

/// Weights f1, f2, f3 on Z_15^* vanishing on the class 2 mod 3.
pub fn check_covering_instance<S: Scalar>(
    f: [&UnitWeight<S>; 3],
    target: u64,
) -> Result<CoveringOutcome<S>, LocalError> {
    for w in f {
        if w.modulus().m() != 15 {
            return Err(LocalError::WrongModulus(w.modulus().m()));
        }
        if let Some(r) = w.support().iter().find(|r| r % 3 == 2) {
            return Err(LocalError::SupportViolation { residue: r });
        }
    }
    if !target.is_multiple_of(3) {
        return Err(LocalError::BadTarget(target));
    }
    let totals: Vec<S> = f.iter().map(|w| w.total()).collect();
    let t = t_function(&totals[0], &totals[1], &totals[2]);
    let hypothesis_holds = t > S::zero();
    let witness = above_three_halves(best_triple(f, target));
    if hypothesis_holds && witness.is_none() {
        return Err(LocalError::NoWitness { target });
    }
    Ok(CoveringOutcome {
        hypothesis_holds,
        witness,
    })
}

/// Picks b1, b2, b3 with n = b1 + b2 + b3 (mod m), all f(b_i) > 0 and the
/// largest weight sum; ties go to the lexicographically smallest triple.
pub fn local_class_selection<S: Scalar>(
    f: &UnitWeight<S>,
    n: u64,
) -> Result<LocalWitness<S>, LocalError> {
    if !n.is_multiple_of(3) {
        return Err(LocalError::BadTarget(n));
    }
    let target = n % f.modulus().m();
    above_three_halves(best_triple([f, f, f], target)).ok_or(LocalError::NoWitness { target })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumsetStepReport {
    /// Ordered triples of subsets of {1, 4, 7, 13} with total size above 6.
    pub checked: u64,
    pub failures: Vec<[Vec<u64>; 3]>,
}

/// The combinatorial step inside the Z_15 argument: whenever
/// |A1| + |A2| + |A3| > 6 for subsets of {1, 4, 7, 13}, their images in Z_5
/// have a full sumset (Cauchy-Davenport-Chowla), so A1 + A2 + A3 covers
/// every class divisible by 3 in Z_15.
pub fn verify_z15_sumset_step() -> SumsetStepReport {
    let m15 = SquarefreeModulus::new(15).expect("squarefree");
    let m5 = SquarefreeModulus::new(5).expect("prime");
    let split: CrtSplit = crate::residue_ring::crt_split(&m15, 3, 5).expect("coprime");
    let ones = unit_class_set(&m15, ClassFilter::OneModThree)
        .expect("3 | 15")
        .to_vec();
    let zeros = zero_mod_three_classes(&m15).expect("3 | 15");
    let subsets: Vec<Vec<u64>> = (1u32..16)
        .map(|mask| {
            ones.iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &x)| x)
                .collect()
        })
        .collect();
    let mut checked = 0;
    let mut failures = Vec::new();
    for a in &subsets {
        for b in &subsets {
            for c in &subsets {
                if a.len() + b.len() + c.len() <= 6 {
                    continue;
                }
                checked += 1;
                let project = |s: &Vec<u64>| {
                    ResidueSet::from_residues(&m5, s.iter().map(|&x| split.split(x).1 as i64))
                };
                let (pa, pb, pc) = (project(a), project(b), project(c));
                let cd = cauchy_davenport_check([&pa, &pb, &pc]).expect("prime modulus");
                let lift = |s: &Vec<u64>| ResidueSet::from_residues(&m15, s.iter().map(|&x| x as i64));
                let sum = triple_sumset(&lift(a), &lift(b), &lift(c)).expect("same modulus");
                if !(cd.holds && cd.actual == 5 && zeros.is_subset(&sum)) {
                    failures.push([a.clone(), b.clone(), c.clone()]);
                }
            }
        }
    }
    SumsetStepReport { checked, failures }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;
    use proptest::prelude::*;

    fn md(m: u64) -> SquarefreeModulus {
        SquarefreeModulus::new(m).unwrap()
    }

    fn r(n: i64, d: i64) -> SmallRational {
        Ratio::new(n, d)
    }

    fn weight(m: u64, entries: &[(u64, SmallRational)]) -> UnitWeight<SmallRational> {
        UnitWeight::new(&md(m), entries.iter().cloned(), true).unwrap()
    }

    fn ind(m: u64, xs: &[u64]) -> UnitWeight<SmallRational> {
        weight(m, &xs.iter().map(|&x| (x, r(1, 1))).collect::<Vec<_>>())
    }

    #[test]
    fn sharpness() {
        let rep = verify_sharpness();
        assert!(rep.holds);
        assert_eq!(rep.missing_class, Some(12));
        assert_eq!(rep.sumset, vec![0, 3, 6, 9]);
        assert_eq!((rep.indicator_sum, rep.quarter_phi), (2, 2));
    }

    #[test]
    fn weight_validation() {
        let m15 = md(15);
        assert_eq!(
            UnitWeight::new(&m15, [(3, r(1, 2))], false),
            Err(LocalError::NonUnitWeight { residue: 3 })
        );
        assert_eq!(
            UnitWeight::new(&m15, [(2, r(1, 2))], true),
            Err(LocalError::SupportViolation { residue: 2 })
        );
        assert_eq!(
            UnitWeight::new(&m15, [(1, r(3, 2))], true),
            Err(LocalError::WeightOutOfRange { residue: 1 })
        );
        assert!(UnitWeight::new(&md(35), [(1, r(1, 2))], true).is_err());
        let f = weight(15, &[(1, r(1, 2)), (16, r(1, 4))]);
        // 16 reduces to 1 and overwrites the earlier entry
        assert_eq!(f.total(), r(1, 4));
        assert_eq!(f.support().to_vec(), vec![1]);
    }

    /// Oracle: every subset and every target with plain loops over Z_m.
    fn indicator_oracle(m: u64, min_size: usize) -> (u64, Vec<IndicatorFailure>) {
        let units: Vec<u64> = (1..m).filter(|&x| num_integer::gcd(x, m) == 1 && x % 3 == 1).collect();
        let mut checked = 0;
        let mut failures = Vec::new();
        for mask in 0u64..1 << units.len() {
            let set: Vec<u64> = (0..units.len()).filter(|i| mask >> i & 1 == 1).map(|i| units[i]).collect();
            if set.len() < min_size {
                continue;
            }
            checked += 1;
            for x in (0..m).step_by(3) {
                let hit = set.iter().any(|a| set.iter().any(|b| set.iter().any(|c| (a + b + c) % m == x)));
                if !hit {
                    failures.push(IndicatorFailure { set: set.clone(), target: x });
                }
            }
        }
        failures.sort_by(|a, b| a.set.cmp(&b.set).then(a.target.cmp(&b.target)));
        (checked, failures)
    }

    #[test]
    fn local_indicator_m15() {
        let rep = verify_local_indicator(&md(15), IndicatorOptions::default()).unwrap();
        assert_eq!(rep.checked_subsets, 5);
        assert!(rep.failures.is_empty());
        assert_eq!((rep.checked_subsets, rep.failures.clone()), indicator_oracle(15, 3));
    }

    #[test]
    fn local_indicator_lowered_threshold_finds_sharpness() {
        let opts = IndicatorOptions {
            min_size: Some(2),
            ..Default::default()
        };
        let rep = verify_local_indicator(&md(15), opts).unwrap();
        assert!(rep.failures.contains(&IndicatorFailure {
            set: vec![1, 7],
            target: 12
        }));
        assert_eq!((rep.checked_subsets, rep.failures), indicator_oracle(15, 2));
    }

    #[test]
    fn local_indicator_m21() {
        let rep = verify_local_indicator(&md(21), IndicatorOptions::default()).unwrap();
        assert_eq!(rep.min_size, 4);
        assert_eq!(rep.checked_subsets, 22);
        assert!(rep.failures.is_empty());
    }

    #[test]
    fn local_indicator_errors() {
        assert_eq!(
            verify_local_indicator(&md(30), IndicatorOptions::default()),
            Err(LocalError::EvenModulus(30))
        );
        assert_eq!(
            verify_local_indicator(&md(35), IndicatorOptions::default()),
            Err(LocalError::ModulusNotDivisibleBy3(35))
        );
        let tight = IndicatorOptions {
            min_size: None,
            budget: 10,
        };
        assert!(matches!(
            verify_local_indicator(&md(105), tight),
            Err(LocalError::BudgetExceeded { .. })
        ));
        assert_eq!(indicator_subset_count(&md(105), 13), 7_036_530);
    }

    #[test]
    fn random_weighted_m15() {
        let rep = random_weighted_check(&md(15), 2_000, 1).unwrap();
        assert!(rep.failures.is_empty());
        let again = random_weighted_check(&md(15), 2_000, 1).unwrap();
        assert_eq!(rep, again);
    }

    #[test]
    fn full_weight_witness() {
        let f = ind(15, &[1, 4, 7, 13]);
        let w = LocalWitness {
            a: [1, 7, 7],
            weight_sum: r(3, 1),
        };
        assert!(w.verify([&f, &f, &f], 0));
        let found = find_local_witness(&f, 0).unwrap().unwrap();
        assert!(found.verify([&f, &f, &f], 0));
        assert_eq!(found.weight_sum, r(3, 1));
    }

    #[test]
    fn boundary_weight_is_rejected() {
        // sum f = 2 = phi(15)/4 exactly
        let f = weight(15, &[(1, r(1, 2)), (4, r(1, 2)), (7, r(1, 2)), (13, r(1, 2))]);
        assert!(!f.exceeds_quarter_density());
        assert_eq!(find_local_witness(&f, 0).unwrap(), None);
    }

    #[test]
    fn covering_examples() {
        let full = ind(15, &[1, 4, 7, 13]);
        let out = check_covering_instance([&full, &full, &full], 12).unwrap();
        assert!(out.hypothesis_holds);
        assert!(out.witness.unwrap().verify([&full, &full, &full], 12));

        let two = ind(15, &[1, 4]);
        let out = check_covering_instance([&two, &two, &two], 0).unwrap();
        assert!(!out.hypothesis_holds);

        let zero = weight(15, &[]);
        for f1 in [&full, &two] {
            let out = check_covering_instance([f1, &full, &zero], 3).unwrap();
            assert!(!out.hypothesis_holds);
            assert!(out.witness.is_none());
        }

        let bad = UnitWeight::new(&md(15), [(2, r(1, 1))], false).unwrap();
        assert_eq!(
            check_covering_instance([&bad, &full, &full], 0),
            Err(LocalError::SupportViolation { residue: 2 })
        );
        let f21 = ind(21, &[1]);
        assert_eq!(
            check_covering_instance([&f21, &f21, &f21], 0),
            Err(LocalError::WrongModulus(21))
        );
        assert_eq!(
            check_covering_instance([&full, &full, &full], 1),
            Err(LocalError::BadTarget(1))
        );
    }

    #[test]
    fn f3_zero_never_satisfies_hypothesis() {
        // F1 F2 > 2 (F1 + F2) is impossible for F1, F2 <= 4
        for a in 0..=16 {
            for b in 0..=16 {
                let (f1, f2) = (r(a, 4), r(b, 4));
                assert!(f1 * f2 <= r(2, 1) * (f1 + f2));
            }
        }
    }

    #[test]
    fn class_selection_examples() {
        let f = ind(15, &[1, 4, 7]);
        let w = local_class_selection(&f, 12).unwrap();
        assert_eq!((w.a, w.weight_sum), ([1, 4, 7], r(3, 1)));
        let w = local_class_selection(&f, 0).unwrap();
        assert_eq!((w.a, w.weight_sum), ([1, 7, 7], r(3, 1)));
        assert!(w.verify([&f, &f, &f], 0));
        let sharp = ind(15, &[1, 7]);
        assert_eq!(
            local_class_selection(&sharp, 12),
            Err(LocalError::NoWitness { target: 12 })
        );
        assert_eq!(local_class_selection(&f, 4), Err(LocalError::BadTarget(4)));
    }

    #[test]
    fn class_selection_is_generic_over_floats() {
        let m15 = md(15);
        let f = UnitWeight::<f64>::new(&m15, [(1, 0.6), (4, 0.58), (7, 0.61), (13, 0.59)], true).unwrap();
        assert!(f.exceeds_quarter_density());
        let w = local_class_selection(&f, 999_999).unwrap();
        assert_eq!((w.a.iter().sum::<u64>()) % 15, 999_999 % 15);
        assert!(w.weight_sum > 1.5);
    }

    #[test]
    fn sumset_step_exhaustive() {
        let rep = verify_z15_sumset_step();
        assert!(rep.failures.is_empty());
        assert!(rep.checked > 0);
    }

    proptest! {
        #[test]
        fn scaling_preserves_support_and_indicator_witnesses(seed in any::<u64>(), k in 1i64..=8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = sample_weight(&md(15), DEFAULT_DENOMINATOR, &mut rng).unwrap();
            let g = f.scaled(&r(k, 8));
            prop_assert_eq!(f.support(), g.support());
            let support_ind = UnitWeight::<SmallRational>::indicator(&g.support(), true).unwrap();
            for x in [0u64, 3, 6, 9, 12] {
                prop_assert!(find_local_witness(&support_ind, x).unwrap().is_some());
            }
        }

        #[test]
        fn witnesses_are_monotone(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = sample_weight(&md(21), DEFAULT_DENOMINATOR, &mut rng).unwrap();
            // g >= f pointwise, still a valid weight
            let g = UnitWeight::new(
                f.modulus(),
                f.support().iter().map(|x| (x, ((*f.value(x) + r(1, 1)) / r(2, 1)).max(*f.value(x)))),
                true,
            ).unwrap();
            for x in (0..21).step_by(3) {
                let wf = find_local_witness(&f, x).unwrap();
                let wg = find_local_witness(&g, x).unwrap();
                prop_assert!(wf.is_some());
                prop_assert!(wg.is_some());
                prop_assert!(wf.unwrap().weight_sum <= wg.unwrap().weight_sum);
            }
        }

        #[test]
        fn sampled_weights_satisfy_hypothesis(seed in any::<u64>(), which in 0usize..3) {
            let m = [15u64, 21, 33][which];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = sample_weight(&md(m), DEFAULT_DENOMINATOR, &mut rng).unwrap();
            prop_assert!(f.exceeds_quarter_density());
            for x in (0..m).step_by(3) {
                let w = local_class_selection(&f, x).unwrap();
                prop_assert!(w.verify([&f, &f, &f], x));
            }
        }
    }
}
