//! Dense two-phase simplex with Bland's rule, generic over the field.
//!
//! Solves `maximize c.x  subject to  A x <= b, x >= 0`. Rows with a negative
//! right-hand side get an artificial variable and are handled in phase one.

use crate::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum SimplexOutcome<S> {
    Optimal { value: S, x: Vec<S> },
    Infeasible,
    Unbounded,
}

struct Tableau<S> {
    rows: Vec<Vec<S>>,
    rhs: Vec<S>,
    basis: Vec<usize>,
    obj: Vec<S>,
    obj_rhs: S,
    /// columns at or beyond this index may not enter the basis
    enterable: usize,
}

impl<S: Scalar> Tableau<S> {
    fn pivot(&mut self, p: usize, q: usize) {
        let piv = self.rows[p][q].clone();
        for v in self.rows[p].iter_mut() {
            *v = v.clone() / piv.clone();
        }
        self.rhs[p] = self.rhs[p].clone() / piv;
        let prow = self.rows[p].clone();
        let prhs = self.rhs[p].clone();
        for i in 0..self.rows.len() {
            if i == p || self.rows[i][q].is_zero() {
                continue;
            }
            let factor = self.rows[i][q].clone();
            for (v, pv) in self.rows[i].iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v = v.clone() - factor.clone() * pv.clone();
                }
            }
            self.rhs[i] = self.rhs[i].clone() - factor * prhs.clone();
        }
        if !self.obj[q].is_zero() {
            let factor = self.obj[q].clone();
            for (v, pv) in self.obj.iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v = v.clone() - factor.clone() * pv.clone();
                }
            }
            self.obj_rhs = self.obj_rhs.clone() - factor * prhs;
        }
        self.basis[p] = q;
    }

    /// Runs Bland pivots until optimal. Returns false when unbounded.
    fn run(&mut self) -> bool {
        loop {
            let entering = (0..self.enterable)
                .find(|&j| self.obj[j] < S::zero() && !self.obj[j].is_negligible());
            let Some(q) = entering else {
                return true;
            };
            let mut leave: Option<(usize, S)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][q];
                if *a <= S::zero() || a.is_negligible() {
                    continue;
                }
                let ratio = self.rhs[i].clone() / a.clone();
                let better = match &leave {
                    None => true,
                    Some((l, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*l])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((p, _)) => self.pivot(p, q),
                None => return false,
            }
        }
    }

    fn set_objective(&mut self, cost: &[S]) {
        let width = self.obj.len();
        let mut obj: Vec<S> = (0..width)
            .map(|j| -cost.get(j).cloned().unwrap_or_else(S::zero))
            .collect();
        let mut value = S::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = cost.get(b).cloned().unwrap_or_else(S::zero);
            if cb.is_zero() {
                continue;
            }
            for (o, t) in obj.iter_mut().zip(&self.rows[i]) {
                *o = o.clone() + cb.clone() * t.clone();
            }
            value = value + cb * self.rhs[i].clone();
        }
        self.obj = obj;
        self.obj_rhs = value;
    }
}

pub fn maximize<S: Scalar>(cost: &[S], constraints: &[(Vec<S>, S)]) -> SimplexOutcome<S> {
    let n = cost.len();
    let m = constraints.len();
    let negative: Vec<usize> = (0..m)
        .filter(|&i| constraints[i].1 < S::zero())
        .collect();
    let width = n + m + negative.len();
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for (i, (a, b)) in constraints.iter().enumerate() {
        assert_eq!(a.len(), n, "constraint width");
        let mut row = vec![S::zero(); width];
        if let Some(k) = negative.iter().position(|&r| r == i) {
            for (j, v) in a.iter().enumerate() {
                row[j] = -v.clone();
            }
            row[n + i] = -S::one();
            row[n + m + k] = S::one();
            rhs.push(-b.clone());
            basis.push(n + m + k);
        } else {
            row[..n].clone_from_slice(a);
            row[n + i] = S::one();
            rhs.push(b.clone());
            basis.push(n + i);
        }
        rows.push(row);
    }
    let mut t = Tableau {
        rows,
        rhs,
        basis,
        obj: vec![S::zero(); width],
        obj_rhs: S::zero(),
        enterable: width,
    };

    if !negative.is_empty() {
        let mut phase_one = vec![S::zero(); width];
        for k in 0..negative.len() {
            phase_one[n + m + k] = -S::one();
        }
        t.set_objective(&phase_one);
        t.run();
        if t.obj_rhs < S::zero() && !t.obj_rhs.is_negligible() {
            return SimplexOutcome::Infeasible;
        }
        // drive remaining (zero-level) artificials out of the basis
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= n + m {
                match (0..n + m).find(|&j| !t.rows[i][j].is_negligible()) {
                    Some(j) => t.pivot(i, j),
                    None => {
                        t.rows.remove(i);
                        t.rhs.remove(i);
                        t.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        t.enterable = n + m;
    }

    t.set_objective(cost);
    if !t.run() {
        return SimplexOutcome::Unbounded;
    }
    let mut x = vec![S::zero(); n];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = t.rhs[i].clone();
        }
    }
    SimplexOutcome::Optimal {
        value: t.obj_rhs,
        x,
    }
}
