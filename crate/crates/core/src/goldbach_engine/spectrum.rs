//! Fourier transforms on Z_N with `f^(r) = sum_n f(n) exp(2 pi i r n / N)`.

use std::collections::BTreeMap;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::GoldbachError;

/// Exponents for the l^q diagnostics.
pub const DEFAULT_Q: [f64; 2] = [2.5, 3.0];
pub const PARSEVAL_TOL: f64 = 1e-9;
/// Largest N for which the triple sum is also computed by a direct double loop.
pub const DIRECT_TRIPLE_MAX: usize = 2048;

/// Full DFT in the positive-exponent convention.
pub fn dft(f: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    if buf.is_empty() {
        return buf;
    }
    // the unnormalized inverse transform uses exp(+2 pi i r n / N)
    FftPlanner::new().plan_fft_inverse(buf.len()).process(&mut buf);
    buf
}

/// O(N^2) reference transform.
pub fn dft_direct(f: &[f64]) -> Vec<Complex64> {
    let n = f.len();
    (0..n)
        .map(|r| {
            f.iter()
                .enumerate()
                .map(|(k, &v)| {
                    let angle = 2.0 * std::f64::consts::PI * ((r * k) % n) as f64 / n as f64;
                    Complex64::from_polar(v, angle)
                })
                .sum()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub n: usize,
    #[serde(skip)]
    pub coefficients: Vec<Complex64>,
    /// coefficient at r = 0, i.e. the total mass
    pub mean: f64,
    pub sup_nonzero: f64,
    pub argmax_nonzero: Option<usize>,
    /// q (as text) to (sum_r |f^(r)|^q)^(1/q)
    pub lq_norms: BTreeMap<String, f64>,
    pub parseval_relative_error: f64,
    pub parseval_ok: bool,
}

impl SpectrumReport {
    pub fn magnitudes(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.norm()).collect()
    }
}

pub fn spectrum(f: &[f64]) -> SpectrumReport {
    spectrum_with_q(f, &DEFAULT_Q)
}

pub fn spectrum_with_q(f: &[f64], qs: &[f64]) -> SpectrumReport {
    let coefficients = dft(f);
    let n = f.len();
    let mut sup = 0.0;
    let mut arg = None;
    for (r, c) in coefficients.iter().enumerate().skip(1) {
        if c.norm() > sup {
            sup = c.norm();
            arg = Some(r);
        }
    }
    let lq_norms = qs
        .iter()
        .map(|&q| {
            let s: f64 = coefficients.iter().map(|c| c.norm().powf(q)).sum();
            (format!("{q}"), s.powf(1.0 / q))
        })
        .collect();
    let lhs: f64 = coefficients.iter().map(|c| c.norm_sqr()).sum();
    let rhs = n as f64 * f.iter().map(|x| x * x).sum::<f64>();
    let err = if rhs == 0.0 { lhs.abs() } else { (lhs - rhs).abs() / rhs };
    SpectrumReport {
        n,
        mean: coefficients.first().map_or(0.0, |c| c.re),
        coefficients,
        sup_nonzero: sup,
        argmax_nonzero: arg,
        lq_norms,
        parseval_relative_error: err,
        parseval_ok: err <= PARSEVAL_TOL,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferenceReport {
    pub n: usize,
    pub x: usize,
    pub triple_sum: f64,
    /// same sum by the O(N^2) double loop, when N is small
    pub direct_triple_sum: Option<f64>,
    pub positive: bool,
    /// delta_i = sum f_i
    pub means: [f64; 3],
    /// min(delta_1, delta_2, delta_3, delta_1 + delta_2 + delta_3 - 1)
    pub mean_condition_value: f64,
    pub mean_condition_ok: bool,
}

/// `sum_{y,z} f1(y) f2(z) f3(x - y - z)` over Z_N, computed as
/// `(1/N) sum_r f1^(r) f2^(r) f3^(r) exp(-2 pi i r x / N)`. The mean condition
/// holds when its value is at least `delta > 0`.
pub fn transference_diagnostics(
    f: [&[f64]; 3],
    x: usize,
    delta: f64,
) -> Result<TransferenceReport, GoldbachError> {
    let n = f[0].len();
    if f[1].len() != n || f[2].len() != n || n == 0 {
        return Err(GoldbachError::MismatchedLength);
    }
    let x = x % n;
    let h: Vec<Vec<Complex64>> = f.iter().map(|g| dft(g)).collect();
    let mut total = Complex64::new(0.0, 0.0);
    #[allow(clippy::needless_range_loop)]
    for r in 0..n {
        let angle = -2.0 * std::f64::consts::PI * ((r * x) % n) as f64 / n as f64;
        total += h[0][r] * h[1][r] * h[2][r] * Complex64::from_polar(1.0, angle);
    }
    let triple_sum = total.re / n as f64;
    let direct = (n <= DIRECT_TRIPLE_MAX).then(|| direct_triple_sum(f, x));
    let means = [0, 1, 2].map(|i| f[i].iter().sum::<f64>());
    let value = means.iter().copied().fold(f64::INFINITY, f64::min).min(means.iter().sum::<f64>() - 1.0);
    Ok(TransferenceReport {
        n,
        x,
        triple_sum,
        direct_triple_sum: direct,
        positive: triple_sum > 0.0,
        means,
        mean_condition_value: value,
        mean_condition_ok: delta > 0.0 && value >= delta,
    })
}

pub fn direct_triple_sum(f: [&[f64]; 3], x: usize) -> f64 {
    let n = f[0].len();
    let mut s = 0.0;
    for y in 0..n {
        if f[0][y] == 0.0 {
            continue;
        }
        for z in 0..n {
            s += f[0][y] * f[1][z] * f[2][(x + 2 * n - y - z) % n];
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn delta_and_uniform() {
        let mut d = vec![0.0; 17];
        d[0] = 1.0;
        let s = spectrum(&d);
        assert!(s.coefficients.iter().all(|c| (c - Complex64::new(1.0, 0.0)).norm() < 1e-12));
        assert!((s.sup_nonzero - 1.0).abs() < 1e-12);
        let u = vec![1.0 / 17.0; 17];
        let s = spectrum(&u);
        assert!((s.mean - 1.0).abs() < 1e-12);
        assert!(s.sup_nonzero < 1e-12);
        assert!(s.parseval_ok);
    }

    #[test]
    fn sign_convention_matches_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f: Vec<f64> = (0..101).map(|_| rng.gen()).collect();
        for (a, b) in dft(&f).iter().zip(dft_direct(&f)) {
            assert!((a - b).norm() < 1e-9);
        }
        // f = delta at 1 gives exp(+2 pi i r / N)
        let mut e = vec![0.0; 8];
        e[1] = 1.0;
        assert!((dft(&e)[2] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn parseval_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in [2, 97, 1000, 4099] {
            let f: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0)).collect();
            let s = spectrum(&f);
            assert!(s.parseval_ok, "{}", s.parseval_relative_error);
            assert!(s.lq_norms.contains_key("2.5") && s.lq_norms.contains_key("3"));
        }
    }

    #[test]
    fn triple_sum_matches_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f: Vec<Vec<f64>> = (0..3).map(|_| (0..101).map(|_| rng.gen::<f64>()).collect()).collect();
        for x in [0, 5, 100] {
            let r = transference_diagnostics([&f[0], &f[1], &f[2]], x, 0.1).unwrap();
            let d = r.direct_triple_sum.unwrap();
            assert!((r.triple_sum - d).abs() <= 1e-9 * d.abs().max(1.0));
        }
        let zero = vec![0.0; 101];
        let r = transference_diagnostics([&f[0], &f[1], &zero], 3, 0.1).unwrap();
        assert!(r.triple_sum.abs() < 1e-9 && !r.mean_condition_ok);
        assert_eq!(
            transference_diagnostics([&f[0], &f[1], &zero[..50]], 0, 0.1),
            Err(GoldbachError::MismatchedLength)
        );
    }
}
