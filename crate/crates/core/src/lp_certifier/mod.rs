//! Exact linear programs over support profiles of three weights on Z_15.
//!
//! For a profile (n1, n2, n3) the variables `y[i][j]`, `1 <= j <= n_i`, are the
//! sorted weight values of the i-th function on its support. The program
//! maximizes their sum subject to `y1[j1] + y2[j2] + y3[j3] <= 3/2` for every
//! index triple with `j1 + j2 + j3 > 6`.

mod simplex;
mod vertices;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use simplex::{maximize, SimplexOutcome};
pub use vertices::{enumerate_vertices, Halfspace, Vertex};

use crate::report::Exact;
use crate::{Rational, Scalar};

/// Instances up to this many variables are cross-checked by vertex enumeration.
pub const VERTEX_CHECK_MAX_VARS: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("profile {0:?} is not admissible")]
    ProfileNotAdmissible([u8; 3]),
    #[error("profile entries must satisfy 4 >= n1 >= n2 >= n3 >= 0, got {0:?}")]
    InvalidProfile([u8; 3]),
    #[error("the program is infeasible")]
    Infeasible,
    #[error("the program is unbounded")]
    Unbounded,
    #[error("simplex optimum {simplex} differs from vertex enumeration optimum {vertices}")]
    OracleMismatch { simplex: String, vertices: String },
    #[error("solved optima do not match the expected table: {}", .0.mismatch_summary())]
    TableMismatch(Box<LpTable>),
}

/// Support sizes n1 >= n2 >= n3 of three weights on {1, 4, 7, 13}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SupportProfile([u8; 3]);

impl SupportProfile {
    pub fn new(n1: u8, n2: u8, n3: u8) -> Result<Self, LpError> {
        if n1 > 4 || n1 < n2 || n2 < n3 {
            return Err(LpError::InvalidProfile([n1, n2, n3]));
        }
        Ok(SupportProfile([n1, n2, n3]))
    }

    pub fn sizes(&self) -> [u8; 3] {
        self.0
    }

    pub fn variable_count(&self) -> usize {
        self.0.iter().map(|&k| k as usize).sum()
    }

    /// n1 n2 + n2 n3 + n3 n1 > 2 (n1 + n2 + n3)
    pub fn is_admissible(&self) -> bool {
        let [a, b, c] = self.0.map(u32::from);
        a * b + b * c + c * a > 2 * (a + b + c)
    }
}

/// The admissible set M, in increasing lexicographic order.
pub fn admissible_profiles() -> Vec<SupportProfile> {
    let mut out = Vec::new();
    for a in 0..=4u8 {
        for b in 0..=a {
            for c in 0..=b {
                let p = SupportProfile([a, b, c]);
                if p.is_admissible() {
                    out.push(p);
                }
            }
        }
    }
    out
}

/// T(x, y, z) = xy + yz + zx - 2(x + y + z)
pub fn t_function<S: Scalar>(x: &S, y: &S, z: &S) -> S {
    let two = S::from_int(2);
    x.clone() * y.clone() + y.clone() * z.clone() + z.clone() * x.clone()
        - two * (x.clone() + y.clone() + z.clone())
}

/// T is nondecreasing in each argument on `x >= f1, y >= f2, z >= f3` exactly
/// when every pairwise sum of the lower corner is at least 2.
pub fn t_increasing_from<S: Scalar>(f1: &S, f2: &S, f3: &S) -> bool {
    let two = S::from_int(2);
    f1.clone() + f2.clone() >= two
        && f2.clone() + f3.clone() >= two
        && f1.clone() + f3.clone() >= two
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ConstraintKind {
    UpperBound { var: usize },
    Triple { j: [u8; 3] },
    Monotone { i: u8, j: u8 },
    F3Lower,
}

/// `coeffs . y <= rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint<S> {
    pub kind: ConstraintKind,
    pub coeffs: Vec<i64>,
    pub rhs: S,
}

impl<S: Scalar> LinearConstraint<S> {
    pub fn holds_at(&self, y: &[S]) -> bool {
        let lhs = self
            .coeffs
            .iter()
            .zip(y)
            .fold(S::zero(), |acc, (c, v)| acc + S::from_int(*c) * v.clone());
        lhs <= self.rhs
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpInstance<S> {
    profile: SupportProfile,
    /// (i, j) for each variable, both 1-based
    vars: Vec<(u8, u8)>,
    triples: Vec<[u8; 3]>,
    monotone: bool,
    f3_lower_bound: Option<S>,
}

/// Index triples with j1 + j2 + j3 > 6 and 1 <= j_i <= n_i.
pub fn triple_index_set(profile: SupportProfile) -> Vec<[u8; 3]> {
    let [a, b, c] = profile.sizes();
    let mut out = Vec::new();
    for j1 in 1..=a {
        for j2 in 1..=b {
            for j3 in 1..=c {
                if j1 + j2 + j3 > 6 {
                    out.push([j1, j2, j3]);
                }
            }
        }
    }
    out
}

/// Builds the program with monotonicity rows and an optional `F3 >= bound` row.
pub fn build_lp<S: Scalar>(
    profile: SupportProfile,
    extra_f3_lower_bound: Option<S>,
) -> Result<LpInstance<S>, LpError> {
    if !profile.is_admissible() {
        return Err(LpError::ProfileNotAdmissible(profile.sizes()));
    }
    let mut vars = Vec::new();
    for (i, &n) in profile.sizes().iter().enumerate() {
        for j in 1..=n {
            vars.push((i as u8 + 1, j));
        }
    }
    Ok(LpInstance {
        profile,
        vars,
        triples: triple_index_set(profile),
        monotone: true,
        f3_lower_bound: extra_f3_lower_bound,
    })
}

impl<S: Scalar> LpInstance<S> {
    pub fn profile(&self) -> SupportProfile {
        self.profile
    }

    pub fn variable_count(&self) -> usize {
        self.vars.len()
    }

    pub fn variables(&self) -> &[(u8, u8)] {
        &self.vars
    }

    pub fn triples(&self) -> &[[u8; 3]] {
        &self.triples
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    pub fn f3_lower_bound(&self) -> Option<&S> {
        self.f3_lower_bound.as_ref()
    }

    /// The same program without the ordering rows y[i][j] >= y[i][j+1].
    pub fn without_monotonicity(mut self) -> Self {
        self.monotone = false;
        self
    }

    fn var_index(&self, i: u8, j: u8) -> usize {
        self.vars
            .iter()
            .position(|&v| v == (i, j))
            .expect("variable in profile")
    }

    /// Every constraint except the implicit `y >= 0`.
    pub fn constraints(&self) -> Vec<LinearConstraint<S>> {
        let n = self.vars.len();
        let mut out = Vec::new();
        for var in 0..n {
            let mut coeffs = vec![0; n];
            coeffs[var] = 1;
            out.push(LinearConstraint {
                kind: ConstraintKind::UpperBound { var },
                coeffs,
                rhs: S::one(),
            });
        }
        if self.monotone {
            for &(i, j) in &self.vars {
                if j < self.profile.sizes()[(i - 1) as usize] {
                    let mut coeffs = vec![0; n];
                    coeffs[self.var_index(i, j + 1)] = 1;
                    coeffs[self.var_index(i, j)] = -1;
                    out.push(LinearConstraint {
                        kind: ConstraintKind::Monotone { i, j },
                        coeffs,
                        rhs: S::zero(),
                    });
                }
            }
        }
        for &t in &self.triples {
            let mut coeffs = vec![0; n];
            for (i, &j) in t.iter().enumerate() {
                coeffs[self.var_index(i as u8 + 1, j)] = 1;
            }
            out.push(LinearConstraint {
                kind: ConstraintKind::Triple { j: t },
                coeffs,
                rhs: S::from_ratio(3, 2),
            });
        }
        if let Some(bound) = &self.f3_lower_bound {
            let coeffs = self.vars.iter().map(|&(i, _)| if i == 3 { -1 } else { 0 }).collect();
            out.push(LinearConstraint {
                kind: ConstraintKind::F3Lower,
                coeffs,
                rhs: -bound.clone(),
            });
        }
        out
    }

    pub fn is_feasible_point(&self, y: &[S]) -> bool {
        y.len() == self.vars.len()
            && y.iter().all(|v| *v >= S::zero())
            && self.constraints().iter().all(|c| c.holds_at(y))
    }

    /// Per-function sums F1, F2, F3 at a point.
    pub fn block_sums(&self, y: &[S]) -> [S; 3] {
        let mut f = [S::zero(), S::zero(), S::zero()];
        for (&(i, _), v) in self.vars.iter().zip(y) {
            let k = (i - 1) as usize;
            f[k] = f[k].clone() + v.clone();
        }
        f
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VertexCheck<S> {
    pub optimum: S,
    pub vertex_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpCertificate<S> {
    pub profile: SupportProfile,
    pub monotone: bool,
    pub f3_lower_bound: Option<S>,
    pub optimum: S,
    pub primal_vertex: Vec<S>,
    pub constraints: Vec<LinearConstraint<S>>,
    /// Present when the instance is small enough for vertex enumeration.
    pub vertex_check: Option<VertexCheck<S>>,
}

fn objective_at<S: Scalar>(y: &[S]) -> S {
    y.iter().fold(S::zero(), |acc, v| acc + v.clone())
}

/// Maximizes S = sum y exactly, then re-verifies the vertex and (for up to
/// [`VERTEX_CHECK_MAX_VARS`] variables) compares against vertex enumeration.
pub fn solve_lp_exact<S: Scalar>(instance: &LpInstance<S>) -> Result<LpCertificate<S>, LpError> {
    let n = instance.variable_count();
    let constraints = instance.constraints();
    let rows: Vec<(Vec<S>, S)> = constraints
        .iter()
        .map(|c| (c.coeffs.iter().map(|&v| S::from_int(v)).collect(), c.rhs.clone()))
        .collect();
    let cost = vec![S::one(); n];
    let (optimum, y) = match maximize(&cost, &rows) {
        SimplexOutcome::Optimal { value, x } => (value, x),
        SimplexOutcome::Infeasible => return Err(LpError::Infeasible),
        SimplexOutcome::Unbounded => return Err(LpError::Unbounded),
    };
    assert!(instance.is_feasible_point(&y), "simplex returned an infeasible vertex");
    assert!(objective_at(&y) == optimum || (objective_at(&y) - optimum.clone()).is_negligible());

    let vertex_check = if n <= VERTEX_CHECK_MAX_VARS {
        let halfspaces: Vec<Halfspace<S>> = constraints
            .iter()
            .filter(|c| !matches!(c.kind, ConstraintKind::UpperBound { .. }))
            .map(|c| Halfspace {
                coeffs: c.coeffs.clone(),
                rhs: c.rhs.clone(),
            })
            .collect();
        let verts = enumerate_vertices(n, &halfspaces);
        let best = verts
            .iter()
            .map(|v| objective_at(&v.point))
            .fold(None::<S>, |acc, v| match acc {
                Some(a) if a >= v => Some(a),
                _ => Some(v),
            })
            .ok_or(LpError::Infeasible)?;
        if !(best == optimum || (best.clone() - optimum.clone()).is_negligible()) {
            return Err(LpError::OracleMismatch {
                simplex: format!("{optimum:?}"),
                vertices: format!("{best:?}"),
            });
        }
        Some(VertexCheck {
            optimum: best,
            vertex_count: verts.len(),
        })
    } else {
        None
    };

    Ok(LpCertificate {
        profile: instance.profile(),
        monotone: instance.is_monotone(),
        f3_lower_bound: instance.f3_lower_bound().cloned(),
        optimum,
        primal_vertex: y,
        constraints,
        vertex_check,
    })
}

/// What the table asserts for one program.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum Expectation {
    Exactly(Exact),
    AtMost(Exact),
}

impl std::fmt::Display for Expectation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Expectation::Exactly(e) => write!(f, "= {e}"),
            Expectation::AtMost(e) => write!(f, "<= {e}"),
        }
    }
}

impl Expectation {
    fn accepts(&self, v: &Rational) -> bool {
        match self {
            Expectation::Exactly(e) => &e.0 == v,
            Expectation::AtMost(e) => v <= &e.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub profile: [u8; 3],
    pub f3_lower_bound: Option<Exact>,
    pub optimum: Exact,
    pub optimum_without_monotonicity: Exact,
    pub vertex_count: Option<usize>,
    pub expected: Expectation,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpTable {
    pub rows: Vec<TableRow>,
}

impl LpTable {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(|r| r.matches)
    }

    pub fn mismatch_summary(&self) -> String {
        self.rows
            .iter()
            .filter(|r| !r.matches)
            .map(|r| format!("{:?} solved {}, expected {}", r.profile, r.optimum, r.expected))
            .collect::<Vec<_>>()
            .join("; ")
    }

    pub fn row(&self, profile: [u8; 3], f3_lower_bound: Option<&Rational>) -> Option<&TableRow> {
        self.rows
            .iter()
            .find(|r| r.profile == profile && r.f3_lower_bound.as_ref().map(|e| &e.0) == f3_lower_bound)
    }
}

/// Expected optimum of each program: 13/2 for (4,4,1), 31/5 for (4,4,2) and
/// at most 6 otherwise; the two constrained variants must also be at most 6.
pub fn table_expectation(profile: [u8; 3], f3_lower_bound: Option<&Rational>) -> Expectation {
    let q = |n, d| Exact(Rational::from_ratio(n, d));
    match (profile, f3_lower_bound) {
        ([4, 4, 1], None) => Expectation::Exactly(q(13, 2)),
        ([4, 4, 2], None) => Expectation::Exactly(q(31, 5)),
        _ => Expectation::AtMost(q(6, 1)),
    }
}

/// Solves every admissible profile (with and without monotonicity) and the two
/// constrained variants, comparing each against [`table_expectation`].
pub fn reproduce_table() -> Result<LpTable, LpError> {
    let mut cases: Vec<(SupportProfile, Option<Rational>)> =
        admissible_profiles().into_iter().map(|p| (p, None)).collect();
    cases.push((SupportProfile([4, 4, 2]), Some(Rational::from_int(1))));
    cases.push((SupportProfile([4, 4, 1]), Some(Rational::from_ratio(1, 2))));

    let mut rows = Vec::new();
    for (profile, bound) in cases {
        let inst = build_lp::<Rational>(profile, bound.clone())?;
        let cert = solve_lp_exact(&inst)?;
        let relaxed = solve_lp_exact(&inst.clone().without_monotonicity())?;
        let expected = table_expectation(profile.sizes(), bound.as_ref());
        rows.push(TableRow {
            profile: profile.sizes(),
            f3_lower_bound: bound.map(Exact),
            matches: expected.accepts(&cert.optimum),
            optimum: Exact(cert.optimum),
            optimum_without_monotonicity: Exact(relaxed.optimum),
            vertex_count: cert.vertex_check.map(|v| v.vertex_count),
            expected,
        });
    }
    let table = LpTable { rows };
    if table.all_match() {
        Ok(table)
    } else {
        Err(LpError::TableMismatch(Box::new(table)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintExport {
    #[serde(flatten)]
    pub kind: ConstraintKind,
    pub coeffs: Vec<i64>,
    pub rhs: Exact,
}

/// Self-contained certificate for third-party re-checking.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateExport {
    pub profile: [u8; 3],
    pub monotone: bool,
    pub f3_lower_bound: Option<Exact>,
    pub variables: Vec<(u8, u8)>,
    pub optimum: Exact,
    pub vertex: Vec<Exact>,
    pub constraints: Vec<ConstraintExport>,
    pub vertex_enumeration_optimum: Option<Exact>,
    pub vertex_count: Option<usize>,
}

impl CertificateExport {
    pub fn new(instance: &LpInstance<Rational>, cert: &LpCertificate<Rational>) -> Self {
        CertificateExport {
            profile: cert.profile.sizes(),
            monotone: cert.monotone,
            f3_lower_bound: cert.f3_lower_bound.clone().map(Exact),
            variables: instance.variables().to_vec(),
            optimum: Exact(cert.optimum.clone()),
            vertex: cert.primal_vertex.iter().cloned().map(Exact).collect(),
            constraints: cert
                .constraints
                .iter()
                .map(|c| ConstraintExport {
                    kind: c.kind,
                    coeffs: c.coeffs.clone(),
                    rhs: Exact(c.rhs.clone()),
                })
                .collect(),
            vertex_enumeration_optimum: cert.vertex_check.as_ref().map(|v| Exact(v.optimum.clone())),
            vertex_count: cert.vertex_check.as_ref().map(|v| v.vertex_count),
        }
    }

    /// Re-checks feasibility and the objective using only the exported data.
    pub fn recheck(&self) -> bool {
        let y: Vec<Rational> = self.vertex.iter().map(|e| e.0.clone()).collect();
        let nonneg = y.iter().all(|v| *v >= Rational::from_int(0));
        let rows = self.constraints.iter().all(|c| {
            let lhs = c
                .coeffs
                .iter()
                .zip(&y)
                .fold(Rational::from_int(0), |acc, (k, v)| acc + Rational::from_int(*k) * v);
            lhs <= c.rhs.0
        });
        nonneg && rows && objective_at(&y) == self.optimum.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn profile(a: u8, b: u8, c: u8) -> SupportProfile {
        SupportProfile::new(a, b, c).unwrap()
    }

    fn solve(p: SupportProfile, bound: Option<Rational>) -> Rational {
        solve_lp_exact(&build_lp(p, bound).unwrap()).unwrap().optimum
    }

    #[test]
    fn admissible_set() {
        let m: Vec<[u8; 3]> = admissible_profiles().iter().map(|p| p.sizes()).collect();
        assert!(m.contains(&[4, 4, 1]));
        assert!(!m.contains(&[4, 4, 0]));
        assert!(!m.contains(&[2, 2, 2]));
        assert_eq!(m.len(), 12);
        assert!(SupportProfile::new(3, 4, 1).is_err());
        assert!(SupportProfile::new(5, 4, 1).is_err());
    }

    #[test]
    fn triple_counts() {
        assert_eq!(triple_index_set(profile(4, 4, 1)).len(), 6);
        assert_eq!(triple_index_set(profile(4, 4, 2)).len(), 16);
        assert_eq!(triple_index_set(profile(4, 4, 4)).len(), 44);
        let inst = build_lp::<Rational>(profile(4, 4, 1), None).unwrap();
        let triples = inst
            .constraints()
            .iter()
            .filter(|c| matches!(c.kind, ConstraintKind::Triple { .. }))
            .count();
        assert_eq!(triples, 6);
        assert_eq!(
            build_lp::<Rational>(profile(4, 4, 0), None),
            Err(LpError::ProfileNotAdmissible([4, 4, 0]))
        );
    }

    #[test]
    fn headline_optima() {
        assert_eq!(solve(profile(4, 4, 1), None), q(13, 2));
        assert_eq!(solve(profile(3, 3, 3), None), q(45, 8));
        assert!(solve(profile(4, 4, 2), Some(q(1, 1))) <= q(6, 1));
        assert!(solve(profile(4, 4, 1), Some(q(1, 2))) <= q(6, 1));
    }

    #[test]
    fn four_four_two_optimum_is_37_over_6() {
        // exact value of the (4,4,2) program; strictly below 6.2
        assert_eq!(solve(profile(4, 4, 2), None), q(37, 6));
    }

    #[test]
    fn infeasible_bound() {
        let inst = build_lp(profile(3, 2, 2), Some(q(3, 1))).unwrap();
        assert_eq!(solve_lp_exact(&inst), Err(LpError::Infeasible));
    }

    #[test]
    fn constraints_never_raise_and_relaxation_never_lowers() {
        for p in admissible_profiles() {
            let base = build_lp::<Rational>(p, None).unwrap();
            let opt = solve_lp_exact(&base).unwrap().optimum;
            let relaxed = solve_lp_exact(&base.clone().without_monotonicity()).unwrap().optimum;
            assert!(relaxed >= opt, "{p:?}");
            for b in [q(1, 2), q(1, 1)] {
                if let Ok(c) = solve_lp_exact(&build_lp(p, Some(b)).unwrap()) {
                    assert!(c.optimum <= opt, "{p:?}");
                }
            }
        }
    }

    #[test]
    fn t_values() {
        assert_eq!(t_function(&q(13, 5), &q(13, 5), &q(1, 1)), q(-11, 25));
        assert_eq!(t_function(&q(3, 1), &q(3, 1), &q(1, 2)), q(-1, 1));
        assert_eq!(t_function(&q(2, 1), &q(2, 1), &q(2, 1)), q(0, 1));
        assert!(!t_increasing_from(&q(1, 2), &q(1, 2), &q(3, 1)));
        assert!(t_increasing_from(&q(2, 1), &q(2, 1), &q(1, 1)));
        assert!((t_function(&2.6f64, &2.6, &1.0) + 0.44).abs() < 1e-12);
    }

    #[test]
    fn float_lp_agrees() {
        let inst = build_lp::<f64>(profile(4, 4, 1), None).unwrap();
        let cert = solve_lp_exact(&inst).unwrap();
        assert!((cert.optimum - 6.5).abs() < 1e-9);
    }

    #[test]
    fn certificate_export_rechecks() {
        let inst = build_lp::<Rational>(profile(4, 4, 2), Some(q(1, 1))).unwrap();
        let cert = solve_lp_exact(&inst).unwrap();
        let export = CertificateExport::new(&inst, &cert);
        assert!(export.recheck());
        let json = serde_json::to_string(&export).unwrap();
        let back: CertificateExport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, export);
        let mut broken = export.clone();
        broken.optimum = Exact(q(7, 1));
        assert!(!broken.recheck());
    }

    proptest! {
        // with F1 + F2 + F3 <= 6 the strict hypothesis T > 0 always fails
        #[test]
        fn small_totals_fail_hypothesis(a in 0i64..=400, b in 0i64..=400, c in 0i64..=400) {
            let total = a + b + c;
            prop_assume!(total > 0);
            let scale = q(600, total);
            let f: Vec<Rational> = [a, b, c].iter().map(|&v| q(v, 100) * scale.clone().min(q(1, 1))).collect();
            let s = f[0].clone() + f[1].clone() + f[2].clone();
            prop_assume!(s <= q(6, 1));
            let pair = f[0].clone() * f[1].clone() + f[1].clone() * f[2].clone() + f[2].clone() * f[0].clone();
            prop_assert!(pair <= s.clone() * s.clone() / q(3, 1));
            prop_assert!(t_function(&f[0], &f[1], &f[2]) <= q(0, 1));
        }
    }
}
