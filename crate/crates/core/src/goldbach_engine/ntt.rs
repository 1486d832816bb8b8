//! Exact integer cubing of an indicator polynomial via two number-theoretic
//! transforms and Garner recombination.

const P1: u64 = 998_244_353;
const P2: u64 = 469_762_049;
const GENERATOR: u64 = 3;
/// Both primes have 2^23 dividing p - 1.
pub const MAX_TRANSFORM_LEN: u64 = 1 << 23;

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn ntt(a: &mut [u64], invert: bool, p: u64) {
    let n = a.len();
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j ^= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let mut w = pow_mod(GENERATOR, (p - 1) / len as u64, p);
        if invert {
            w = pow_mod(w, p - 2, p);
        }
        let half = len / 2;
        let mut roots = Vec::with_capacity(half);
        let mut cur = 1;
        for _ in 0..half {
            roots.push(cur);
            cur = cur * w % p;
        }
        for chunk in a.chunks_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for ((u, v), r) in lo.iter_mut().zip(hi.iter_mut()).zip(&roots) {
                let t = *v * r % p;
                let x = *u;
                *u = if x + t >= p { x + t - p } else { x + t };
                *v = if x >= t { x - t } else { x + p - t };
            }
        }
        len <<= 1;
    }
    if invert {
        let inv = pow_mod(n as u64, p - 2, p);
        for x in a.iter_mut() {
            *x = *x * inv % p;
        }
    }
}

fn cube_mod(indicator: &[u64], size: usize, p: u64) -> Vec<u64> {
    let mut a = vec![0u64; size];
    a[..indicator.len()].copy_from_slice(indicator);
    ntt(&mut a, false, p);
    for x in a.iter_mut() {
        *x = *x * *x % p * *x % p;
    }
    ntt(&mut a, true, p);
    a
}

/// Ordered triple counts `c[n] = #{(x, y, z) in S^3 : x + y + z = n}` for
/// `n <= 3 max(S)`. Exact while every count is below `P1 * P2`, which holds
/// when `|S|^2 < P1 * P2` since the third element is determined.
pub fn cube_counts(members: &[u64]) -> Vec<u64> {
    let Some(&max) = members.iter().max() else {
        return Vec::new();
    };
    let k = members.len() as u128;
    assert!(k * k < P1 as u128 * P2 as u128, "counts could overflow the CRT range");
    let out_len = 3 * max as usize + 1;
    let size = out_len.next_power_of_two();
    assert!(size as u64 <= MAX_TRANSFORM_LEN, "transform length exceeds the root-of-unity order");
    let mut indicator = vec![0u64; max as usize + 1];
    for &x in members {
        indicator[x as usize] += 1;
    }
    let r1 = cube_mod(&indicator, size, P1);
    let r2 = cube_mod(&indicator, size, P2);
    // x = r1 + P1 * t with t = (r2 - r1) / P1 mod P2
    let inv = pow_mod(P1 % P2, P2 - 2, P2);
    r1.iter()
        .zip(&r2)
        .take(out_len)
        .map(|(&a, &b)| {
            let t = (b + P2 - a % P2) % P2 * inv % P2;
            let v = a as u128 + P1 as u128 * t as u128;
            u64::try_from(v).expect("count fits in u64")
        })
        .collect()
}
