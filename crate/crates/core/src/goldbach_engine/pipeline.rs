//! The W-trick reduction: local weights, class selection, cyclic majorants and
//! the triple convolution, run end to end on one target.

use serde::{Deserialize, Serialize};

use super::sieve::{is_prime_small, PrimeTable};
use super::spectrum::{spectrum, transference_diagnostics, TransferenceReport};
use super::subset::DensitySubset;
use super::GoldbachError;
use crate::local_verifier::{local_class_selection, UnitWeight};
use crate::residue_ring::SquarefreeModulus;

/// Sieve levels above this make the class search over Z_{W/2} too large.
pub const MAX_SIEVE_LEVEL: u64 = 13;
pub const DEFAULT_Z: u64 = 5;
pub const DEFAULT_KAPPA: f64 = 0.05;
pub const IDENTITY_TOL: f64 = 1e-9;

fn gcd(a: u64, b: u64) -> u64 {
    num_integer::Integer::gcd(&a, &b)
}

/// W = product of the primes up to z.
pub fn sieve_modulus(z: u64) -> Result<u64, GoldbachError> {
    if z < 3 {
        return Err(GoldbachError::SieveLevelTooSmall(z));
    }
    if z > MAX_SIEVE_LEVEL {
        return Err(GoldbachError::SieveLevelTooLarge { z, max: MAX_SIEVE_LEVEL });
    }
    Ok((2..=z).filter(|&p| is_prime_small(p)).product())
}

fn phi(w: u64) -> u64 {
    (1..w).filter(|&b| gcd(b, w) == 1).count() as u64
}

fn check_target(n: u64) -> Result<(), GoldbachError> {
    if n.is_multiple_of(2) {
        return Err(GoldbachError::BadTarget { n, reason: "n is even".into() });
    }
    if !n.is_multiple_of(3) {
        return Err(GoldbachError::BadTarget { n, reason: "n is not divisible by 3".into() });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassWeight {
    /// reduced residue mod W
    pub b: u64,
    /// the same class viewed in Z_m, m = W/2
    pub residue: u64,
    pub members: usize,
    /// phi(W) 3/(2n) sum log x, before the shift by delta/8
    pub raw: f64,
    /// max(raw - delta/8, 0), capped at 1
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalWeights {
    pub n: u64,
    pub z: u64,
    pub w: u64,
    pub m: u64,
    pub delta: f64,
    pub classes: Vec<ClassWeight>,
    /// classes whose shifted value exceeded 1 and was capped
    pub clipped_high: usize,
    /// classes set to 0 by the max(., 0)
    pub clipped_low: usize,
    /// members of A up to 2n/3 in a class not coprime to W
    pub skipped_members: usize,
    pub total: f64,
    pub quarter_phi: f64,
}

impl LocalWeights {
    pub fn weight(&self) -> UnitWeight<f64> {
        let md = SquarefreeModulus::new(self.m).expect("W/2 is squarefree");
        UnitWeight::new(&md, self.classes.iter().map(|c| (c.residue, c.value)), true)
            .expect("weights are valid by construction")
    }

    pub fn class(&self, b: u64) -> Option<&ClassWeight> {
        self.classes.iter().find(|c| c.b == b)
    }

    pub fn hypothesis_holds(&self) -> bool {
        self.total > self.quarter_phi
    }
}

/// f(b) for every reduced b mod W with b = 1 mod 3, reindexed to Z_{W/2}.
pub fn pipeline_weights(a: &DensitySubset, n: u64, z: u64, delta: f64) -> Result<LocalWeights, GoldbachError> {
    check_target(n)?;
    let w = sieve_modulus(z)?;
    let m = w / 2;
    let bound = 2 * n / 3;
    if bound > a.limit() {
        return Err(GoldbachError::InsufficientSieve { needed: bound, have: a.limit() });
    }
    let members = a.members_up_to(bound);
    if members.is_empty() {
        return Err(GoldbachError::BadTarget {
            n,
            reason: "A has no element up to 2n/3".into(),
        });
    }
    let mut logs = vec![0.0f64; w as usize];
    let mut counts = vec![0usize; w as usize];
    let mut skipped = 0;
    for &x in &members {
        let b = (x % w) as usize;
        if gcd(b as u64, w) != 1 {
            skipped += 1;
            continue;
        }
        logs[b] += (x as f64).ln();
        counts[b] += 1;
    }
    let phi_w = phi(w) as f64;
    let scale = phi_w * 3.0 / (2.0 * n as f64);
    let mut classes = Vec::new();
    let (mut high, mut low) = (0, 0);
    for b in (1..w).filter(|&b| gcd(b, w) == 1 && b % 3 == 1) {
        let raw = scale * logs[b as usize];
        let shifted = raw - delta / 8.0;
        let value = if shifted <= 0.0 {
            low += 1;
            0.0
        } else if shifted > 1.0 {
            high += 1;
            1.0
        } else {
            shifted
        };
        classes.push(ClassWeight {
            b,
            residue: b % m,
            members: counts[b as usize],
            raw,
            value,
        });
    }
    let total = classes.iter().map(|c| c.value).sum();
    Ok(LocalWeights {
        n,
        z,
        w,
        m,
        delta,
        classes,
        clipped_high: high,
        clipped_low: low,
        skipped_members: skipped,
        total,
        quarter_phi: phi_w / 4.0,
    })
}

/// Smallest prime in `[(1 + kappa) n / W, (1 + 2 kappa) n / W]`.
pub fn choose_cyclic_prime(n: u64, w: u64, kappa: f64) -> Result<u64, GoldbachError> {
    if kappa.is_nan() || kappa <= 0.0 {
        return Err(GoldbachError::NonPositiveKappa(kappa));
    }
    let lo = ((1.0 + kappa) * n as f64 / w as f64).ceil() as u64;
    let hi = ((1.0 + 2.0 * kappa) * n as f64 / w as f64).floor() as u64;
    let p = (lo..=hi)
        .find(|&x| is_prime_small(x))
        .ok_or(GoldbachError::NoPrimeInInterval { lo, hi })?;
    debug_assert!(is_prime_small(p) && lo <= p && p <= hi);
    Ok(p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorantProfile {
    pub z: u64,
    pub w: u64,
    pub b: u64,
    pub n_cyclic: u64,
    /// nu(k) = phi(W)/(W N) log(W k + b) when W k + b is prime, k in [0, N)
    #[serde(skip)]
    pub nu: Vec<f64>,
    /// nu restricted to A_b = {(x - b)/W : x in A, x <= 2n/3, x = b mod W}
    #[serde(skip)]
    pub f_restricted: Vec<f64>,
    #[serde(skip)]
    pub a_b: Vec<u64>,
}

pub fn build_majorant(table: &PrimeTable, z: u64, b: u64, n_cyclic: u64) -> Result<MajorantProfile, GoldbachError> {
    let w = sieve_modulus(z)?;
    if b >= w || gcd(b, w) != 1 {
        return Err(GoldbachError::NotReducedResidue { b, w });
    }
    let top = w * (n_cyclic - 1) + b;
    if top > table.limit() {
        return Err(GoldbachError::InsufficientSieve { needed: top, have: table.limit() });
    }
    let c = phi(w) as f64 / (w as f64 * n_cyclic as f64);
    let nu: Vec<f64> = (0..n_cyclic)
        .map(|k| {
            let x = w * k + b;
            if table.is_prime(x) {
                c * (x as f64).ln()
            } else {
                0.0
            }
        })
        .collect();
    Ok(MajorantProfile {
        z,
        w,
        b,
        n_cyclic,
        f_restricted: vec![0.0; nu.len()],
        nu,
        a_b: Vec::new(),
    })
}

impl MajorantProfile {
    /// Sets f = nu 1_{A_b} for the members of `a` up to 2n/3.
    pub fn restrict(&mut self, a: &DensitySubset, n: u64) {
        self.a_b = a
            .members_up_to(2 * n / 3)
            .into_iter()
            .filter(|x| x % self.w == self.b)
            .map(|x| (x - self.b) / self.w)
            .collect();
        self.f_restricted = vec![0.0; self.nu.len()];
        for &k in &self.a_b {
            self.f_restricted[k as usize] = self.nu[k as usize];
        }
    }

    pub fn is_majorized(&self) -> bool {
        self.f_restricted
            .iter()
            .zip(&self.nu)
            .all(|(f, v)| *f >= 0.0 && f <= v)
    }

    pub fn nu_mass(&self) -> f64 {
        self.nu.iter().sum()
    }

    pub fn f_mass(&self) -> f64 {
        self.f_restricted.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub z: u64,
    pub b: u64,
    pub n_cyclic: u64,
    /// nu^(0)
    pub mean: f64,
    pub mean_deviation: f64,
    pub sup_nonzero: f64,
    pub argmax_nonzero: Option<usize>,
    /// 2 log log z / z
    pub paper_bound: f64,
    pub ratio: f64,
    pub parseval_ok: bool,
    pub parseval_relative_error: f64,
}

pub fn decay_bound(z: u64) -> f64 {
    let z = z as f64;
    2.0 * z.ln().ln() / z
}

/// Largest nontrivial Fourier coefficient of nu against the asymptotic bound.
pub fn verify_decay(profile: &MajorantProfile, z: u64) -> Result<DecayReport, GoldbachError> {
    if z < 3 {
        return Err(GoldbachError::SieveLevelTooSmall(z));
    }
    let s = spectrum(&profile.nu);
    let bound = decay_bound(z);
    Ok(DecayReport {
        z,
        b: profile.b,
        n_cyclic: profile.n_cyclic,
        mean: s.mean,
        mean_deviation: (s.mean - 1.0).abs(),
        sup_nonzero: s.sup_nonzero,
        argmax_nonzero: s.argmax_nonzero,
        paper_bound: bound,
        ratio: s.sup_nonzero / bound,
        parseval_ok: s.parseval_ok,
        parseval_relative_error: s.parseval_relative_error,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineParams {
    pub n: u64,
    pub z: u64,
    pub delta: f64,
    pub kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassStage {
    pub b: u64,
    pub weight: f64,
    pub members: usize,
    /// delta_i = sum f_i
    pub mass: f64,
    /// 2n/(3 W N) raw(b)
    pub predicted_mass: f64,
    pub identity_relative_error: f64,
    /// delta_i >= 2 f(b)/3 + delta/20
    pub mean_bound_holds: bool,
    pub nu_mean: f64,
    pub nu_sup_nonzero: f64,
    pub f_lq_norms: std::collections::BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub params: PipelineParams,
    pub w: u64,
    pub m: u64,
    pub weights: LocalWeights,
    pub class_witness: [u64; 3],
    pub class_weight_sum: f64,
    pub n_cyclic: u64,
    pub target_x: u64,
    pub stages: Vec<ClassStage>,
    pub transference: TransferenceReport,
    /// primes p_i in A, p_i = b_i mod W, summing to n
    pub prime_witness: [u64; 3],
}

fn stage_failed(stage: &str, detail: String) -> GoldbachError {
    GoldbachError::StageFailed {
        stage: stage.to_string(),
        detail,
    }
}

/// Lifts a class of Z_m (m odd) to the odd representative mod 2m.
fn lift(r: u64, m: u64) -> u64 {
    if r % 2 == 1 {
        r
    } else {
        r + m
    }
}

/// Direct search for k_i in A_i with k1 + k2 + k3 = x.
fn direct_witness(sets: [&[u64]; 3], x: u64) -> Option<[u64; 3]> {
    let third: std::collections::HashSet<u64> = sets[2].iter().copied().collect();
    for &k1 in sets[0] {
        for &k2 in sets[1] {
            if k1 + k2 > x {
                break;
            }
            if third.contains(&(x - k1 - k2)) {
                return Some([k1, k2, x - k1 - k2]);
            }
        }
    }
    None
}

pub fn run_pipeline(table: &PrimeTable, a: &DensitySubset, params: &PipelineParams) -> Result<PipelineReport, GoldbachError> {
    let PipelineParams { n, z, delta, kappa } = *params;
    let weights = pipeline_weights(a, n, z, delta)?;
    let (w, m) = (weights.w, weights.m);
    if !weights.hypothesis_holds() {
        return Err(GoldbachError::HypothesisFailed {
            total: weights.total,
            quarter_phi: weights.quarter_phi,
        });
    }
    let f = weights.weight();
    let sel = local_class_selection(&f, n).map_err(|_| GoldbachError::NoWitness { target: n % m })?;
    let b = sel.a.map(|r| lift(r, m));
    if (b[0] + b[1] + b[2]) % w != n % w {
        return Err(stage_failed("lift", format!("{b:?} does not sum to {n} mod {w}")));
    }
    let n_cyclic = choose_cyclic_prime(n, w, kappa)?;
    let mut stages = Vec::new();
    let mut profiles = Vec::new();
    for &bi in &b {
        let mut p = build_majorant(table, z, bi, n_cyclic)?;
        p.restrict(a, n);
        if !p.is_majorized() {
            return Err(stage_failed("majorant", format!("f exceeds nu for class {bi}")));
        }
        let cw = weights.class(bi).expect("selected class has a weight");
        let mass = p.f_mass();
        let predicted = 2.0 * n as f64 / (3.0 * (w * n_cyclic) as f64) * cw.raw;
        let err = if predicted == 0.0 { mass.abs() } else { (mass - predicted).abs() / predicted };
        if err > IDENTITY_TOL {
            return Err(stage_failed("mean-identity", format!("class {bi}: {mass} vs {predicted}")));
        }
        let nu_s = spectrum(&p.nu);
        let f_s = spectrum(&p.f_restricted);
        if !nu_s.parseval_ok || !f_s.parseval_ok {
            return Err(stage_failed("parseval", format!("class {bi}")));
        }
        stages.push(ClassStage {
            b: bi,
            weight: cw.value,
            members: p.a_b.len(),
            mass,
            predicted_mass: predicted,
            identity_relative_error: err,
            mean_bound_holds: mass >= 2.0 * cw.value / 3.0 + delta / 20.0,
            nu_mean: nu_s.mean,
            nu_sup_nonzero: nu_s.sup_nonzero,
            f_lq_norms: f_s.lq_norms,
        });
        profiles.push(p);
    }
    let x = (n - b.iter().sum::<u64>()) / w;
    let transference = transference_diagnostics(
        [&profiles[0].f_restricted, &profiles[1].f_restricted, &profiles[2].f_restricted],
        (x % n_cyclic) as usize,
        delta,
    )?;
    let k = direct_witness([&profiles[0].a_b, &profiles[1].a_b, &profiles[2].a_b], x)
        .ok_or_else(|| stage_failed("direct-confirmation", format!("{x} is not in A1 + A2 + A3")))?;
    let primes = [0, 1, 2].map(|i| w * k[i] + b[i]);
    if primes.iter().sum::<u64>() != n || !primes.iter().all(|&p| a.contains(p)) {
        return Err(stage_failed("direct-confirmation", format!("{primes:?} is not a representation")));
    }
    Ok(PipelineReport {
        params: params.clone(),
        w,
        m,
        class_witness: b,
        class_weight_sum: sel.weight_sum,
        n_cyclic,
        target_x: x,
        stages,
        transference,
        prime_witness: primes,
        weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::goldbach_engine::{build_subset, sieve_primes, SubsetRule};

    fn setup(limit: u64, rule: &str) -> (PrimeTable, DensitySubset) {
        let t = sieve_primes(limit).unwrap();
        let a = build_subset(&rule.parse::<SubsetRule>().unwrap(), &t).unwrap();
        (t, a)
    }

    #[test]
    fn moduli() {
        assert_eq!(sieve_modulus(5), Ok(30));
        assert_eq!(sieve_modulus(3), Ok(6));
        assert_eq!(sieve_modulus(13), Ok(30030));
        assert!(sieve_modulus(2).is_err());
        assert!(sieve_modulus(17).is_err());
        assert_eq!(lift(7, 15), 7);
        assert_eq!(lift(4, 15), 19);
    }

    #[test]
    fn cyclic_prime() {
        assert_eq!(choose_cyclic_prime(1_000_000, 30, 0.05), Ok(35_023));
        assert_eq!(choose_cyclic_prime(1_000_000, 30, 0.0), Err(GoldbachError::NonPositiveKappa(0.0)));
        assert!(matches!(choose_cyclic_prime(30, 30, 0.01), Err(GoldbachError::NoPrimeInInterval { .. })));
    }

    #[test]
    fn majorant_values() {
        let t = sieve_primes(100_000).unwrap();
        let p = build_majorant(&t, 5, 7, 1009).unwrap();
        let c = 8.0 / (30.0 * 1009.0);
        assert!((p.nu[1] - c * 37f64.ln()).abs() < 1e-15);
        assert_eq!(p.nu[6], 0.0);
        assert_eq!(build_majorant(&t, 5, 6, 1009), Err(GoldbachError::NotReducedResidue { b: 6, w: 30 }));
        assert!(matches!(build_majorant(&t, 5, 7, 10_000), Err(GoldbachError::InsufficientSieve { .. })));
    }

    #[test]
    fn all_primes_at_z3() {
        let (_, a) = setup(200_000, "all");
        let wts = pipeline_weights(&a, 299_997, 3, 0.0).unwrap();
        assert_eq!((wts.w, wts.m), (6, 3));
        assert_eq!(wts.classes.len(), 1);
        assert_eq!(wts.classes[0].b, 1);
        assert!((wts.classes[0].raw - 1.0).abs() < 0.02, "{}", wts.classes[0].raw);
    }

    #[test]
    fn bad_targets() {
        let (t, a) = setup(10_000, "all");
        let p = |n| PipelineParams { n, z: 5, delta: 0.1, kappa: 0.05 };
        assert!(matches!(run_pipeline(&t, &a, &p(3000)), Err(GoldbachError::BadTarget { .. })));
        assert!(matches!(run_pipeline(&t, &a, &p(3001)), Err(GoldbachError::BadTarget { .. })));
    }

    #[test]
    fn dense_subset_succeeds() {
        let (t, a) = setup(400_000, "bernoulli:0.6:2");
        let delta = crate::Scalar::to_f64(a.measured_density()) - 0.5;
        let r = run_pipeline(&t, &a, &PipelineParams { n: 300_003, z: 5, delta, kappa: 0.05 }).unwrap();
        assert_eq!(r.prime_witness.iter().sum::<u64>(), 300_003);
        assert!(r.class_weight_sum > 1.5);
        assert!(r.transference.triple_sum > 0.0);
        assert!(r.stages.iter().all(|s| s.identity_relative_error <= IDENTITY_TOL));
    }

    #[test]
    fn pattern_subset_fails_hypothesis() {
        let (t, a) = setup(400_000, "pattern:15:1,7");
        let delta = crate::Scalar::to_f64(a.measured_density()) - 0.5;
        // 300027 = 12 mod 15
        let r = run_pipeline(&t, &a, &PipelineParams { n: 300_027, z: 5, delta, kappa: 0.05 });
        assert!(matches!(r, Err(GoldbachError::HypothesisFailed { .. }) | Err(GoldbachError::NoWitness { .. })), "{r:?}");
    }
}
