//! Vertex enumeration by the double description method.
//!
//! Starts from the vertices of the unit cube and intersects one halfspace at a
//! time. Two vertices are adjacent when their common active constraints have
//! rank `n - 1`; rank is computed exactly over the integers, so the method
//! shares no code path with the simplex solver.

use crate::Scalar;

/// `coeffs . x <= rhs` with integer coefficients.
#[derive(Debug, Clone)]
pub struct Halfspace<S> {
    pub coeffs: Vec<i64>,
    pub rhs: S,
}

#[derive(Debug, Clone)]
pub struct Vertex<S> {
    pub point: Vec<S>,
    /// bit k set when the k-th constraint (cube facets first) is tight
    active: u128,
}

fn dot<S: Scalar>(coeffs: &[i64], x: &[S]) -> S {
    coeffs
        .iter()
        .zip(x)
        .filter(|(c, _)| **c != 0)
        .fold(S::zero(), |acc, (c, v)| acc + S::from_int(*c) * v.clone())
}

fn integer_rank(rows: &[Vec<i64>], n: usize) -> usize {
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| v as i128).collect())
        .collect();
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..m.len()).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(rank, p);
        let pivot_row = m[rank].clone();
        for row in m.iter_mut().skip(rank + 1) {
            if row[col] == 0 {
                continue;
            }
            let (a, b) = (pivot_row[col], row[col]);
            let mut g = 0i128;
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v = *v * a - pv * b;
                g = num_integer::gcd(g, *v);
            }
            if g > 1 {
                for v in row.iter_mut() {
                    *v /= g;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// All vertices of `{x in [0,1]^n : h.x <= rhs for each h}`.
pub fn enumerate_vertices<S: Scalar>(n: usize, halfspaces: &[Halfspace<S>]) -> Vec<Vertex<S>> {
    assert!(n <= 16, "cube start is exponential in the dimension");
    assert!(2 * n + halfspaces.len() <= 128, "active sets are stored in a u128");
    let mut rows: Vec<Vec<i64>> = Vec::with_capacity(2 * n + halfspaces.len());
    for k in 0..n {
        let mut lower = vec![0; n];
        lower[k] = -1;
        let mut upper = vec![0; n];
        upper[k] = 1;
        rows.push(lower);
        rows.push(upper);
    }
    let mut vertices: Vec<Vertex<S>> = (0u32..1 << n)
        .map(|bits| {
            let mut active = 0u128;
            let point = (0..n)
                .map(|k| {
                    if bits >> k & 1 == 1 {
                        active |= 1 << (2 * k + 1);
                        S::one()
                    } else {
                        active |= 1 << (2 * k);
                        S::zero()
                    }
                })
                .collect();
            Vertex { point, active }
        })
        .collect();

    for h in halfspaces {
        let idx = rows.len();
        rows.push(h.coeffs.clone());
        let slack: Vec<S> = vertices
            .iter()
            .map(|v| dot(&h.coeffs, &v.point) - h.rhs.clone())
            .collect();
        let inside: Vec<usize> = (0..vertices.len()).filter(|&i| slack[i] < S::zero()).collect();
        let outside: Vec<usize> = (0..vertices.len()).filter(|&i| slack[i] > S::zero()).collect();
        let mut next: Vec<Vertex<S>> = Vec::new();
        for (i, v) in vertices.iter().enumerate() {
            if slack[i].is_zero() {
                next.push(Vertex {
                    point: v.point.clone(),
                    active: v.active | 1 << idx,
                });
            } else if slack[i] < S::zero() {
                next.push(v.clone());
            }
        }
        for &i in &inside {
            for &j in &outside {
                let common = vertices[i].active & vertices[j].active;
                if (common.count_ones() as usize) < n - 1 {
                    continue;
                }
                let tight: Vec<Vec<i64>> = (0..idx)
                    .filter(|k| common >> k & 1 == 1)
                    .map(|k| rows[k].clone())
                    .collect();
                if integer_rank(&tight, n) != n - 1 {
                    continue;
                }
                let (si, sj) = (slack[i].clone(), slack[j].clone());
                let t = si.clone() / (si - sj);
                let point = vertices[i]
                    .point
                    .iter()
                    .zip(&vertices[j].point)
                    .map(|(a, b)| a.clone() + t.clone() * (b.clone() - a.clone()))
                    .collect();
                next.push(Vertex {
                    point,
                    active: common | 1 << idx,
                });
            }
        }
        vertices = next;
        if vertices.is_empty() {
            break;
        }
    }
    vertices
}
