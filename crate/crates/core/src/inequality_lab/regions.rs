//! The eight bounding expressions F(x, y) of the n = 6 case and their
//! certification by interval branch-and-bound.
//!
//! Each F has the shape
//! `c + a_y y + a_x x + a_s sqrt(3 + x^2) + (3 - xy)/(x + y) [+ h(y)] [+ r(x)]`
//! with `h(y) = (3 - y^2)/(2y)` and `r(x) = (3 - 2x/5)/(x + 2/5)`.

use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::interval::Interval;
use crate::report::Exact;
use crate::{Rational, RoundedFloat};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_DEPTH: u32 = 40;
/// Recursion levels below which sibling boxes are processed in parallel.
const PARALLEL_DEPTH: u32 = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegionError {
    #[error("region {0} does not exist (ids are 1..=8)")]
    UnknownRegion(u8),
    #[error("point ({x}, {y}) is outside region {region}")]
    OutOfRegion { region: u8, x: f64, y: f64 },
    #[error("tolerance must be positive, got {0}: equality points make tol = 0 uncertifiable by intervals")]
    InvalidTolerance(f64),
    #[error("region {region}: F({x}, {y}) >= {value} exceeds the target")]
    CertificationFailed { region: u8, x: f64, y: f64, value: f64 },
    #[error("region {region}: box {x:?} x {y:?} still undecided at depth {depth}")]
    DepthExceeded { region: u8, depth: u32, x: [f64; 2], y: [f64; 2] },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZCondition {
    AtMostTwoFifths,
    AtLeastTwoFifths,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub id: u8,
    /// constant term as (num, den)
    constant: (i64, i64),
    coeff_y: i64,
    coeff_x: i64,
    coeff_sqrt: i64,
    with_h: bool,
    with_r: bool,
    /// bounds as (num, den)
    pub x_range: [(i64, i64); 2],
    pub y_range: [(i64, i64); 2],
    /// upper y bound is `x` instead of `y_range[1]`
    pub y_at_most_x: bool,
    pub z_condition: Option<ZCondition>,
}

#[allow(clippy::too_many_arguments)]
const fn spec(
    id: u8,
    constant: (i64, i64),
    [coeff_y, coeff_x, coeff_sqrt]: [i64; 3],
    [with_h, with_r]: [bool; 2],
    x_range: [(i64, i64); 2],
    y_range: [(i64, i64); 2],
    y_at_most_x: bool,
    z_condition: Option<ZCondition>,
) -> RegionSpec {
    RegionSpec {
        id,
        constant,
        coeff_y,
        coeff_x,
        coeff_sqrt,
        with_h,
        with_r,
        x_range,
        y_range,
        y_at_most_x,
        z_condition,
    }
}

const ONE: (i64, i64) = (1, 1);
const TWO: (i64, i64) = (2, 1);
const THREE: (i64, i64) = (3, 1);
const FIVE_HALVES: (i64, i64) = (5, 2);

pub const REGIONS: [RegionSpec; 8] = [
    spec(1, ONE, [2, 0, 1], [false, false], [ONE, TWO], [(3, 5), ONE], false, None),
    spec(2, ONE, [1, -1, 2], [false, false], [TWO, THREE], [(3, 5), ONE], false, None),
    spec(3, ONE, [1, 0, 1], [true, false], [ONE, TWO], [ONE, TWO], true, None),
    spec(4, ONE, [1, -1, 2], [false, false], [TWO, FIVE_HALVES], [ONE, (17, 10)], false, None),
    spec(5, ONE, [1, 0, 1], [true, false], [TWO, FIVE_HALVES], [(17, 10), FIVE_HALVES], true, None),
    spec(6, ONE, [1, 0, 1], [true, false], [FIVE_HALVES, THREE], [(7, 5), THREE], true, None),
    spec(
        7,
        (7, 5),
        [1, 0, 1],
        [false, false],
        [FIVE_HALVES, THREE],
        [ONE, (7, 5)],
        false,
        Some(ZCondition::AtMostTwoFifths),
    ),
    spec(
        8,
        (0, 1),
        [1, -1, 2],
        [false, true],
        [FIVE_HALVES, THREE],
        [ONE, (7, 5)],
        false,
        Some(ZCondition::AtLeastTwoFifths),
    ),
];

pub fn region(id: u8) -> Result<&'static RegionSpec, RegionError> {
    REGIONS
        .iter()
        .find(|r| r.id == id)
        .ok_or(RegionError::UnknownRegion(id))
}

fn q((n, d): (i64, i64)) -> Rational {
    Rational::new(n.into(), d.into())
}

fn qf((n, d): (i64, i64)) -> f64 {
    n as f64 / d as f64
}

/// `rational + sqrt_coefficient * sqrt(radicand)`, exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurdValue {
    pub rational: Exact,
    pub sqrt_coefficient: i64,
    pub radicand: Exact,
}

impl SurdValue {
    pub fn to_f64(&self) -> f64 {
        self.rational.to_f64() + self.sqrt_coefficient as f64 * self.radicand.to_f64().sqrt()
    }

    /// Exact test of `value <= t`, for a nonnegative coefficient.
    pub fn at_most(&self, t: &Rational) -> bool {
        debug_assert!(self.sqrt_coefficient >= 0);
        let gap = t - &self.rational.0;
        if gap.is_negative() {
            return false;
        }
        let k = Rational::from_integer(self.sqrt_coefficient.into());
        &k * &k * &self.radicand.0 <= &gap * &gap
    }

    /// Exact test of `value >= t`, for a nonnegative coefficient.
    pub fn at_least(&self, t: &Rational) -> bool {
        let gap = t - &self.rational.0;
        if !gap.is_positive() {
            return true;
        }
        let k = Rational::from_integer(self.sqrt_coefficient.into());
        &k * &k * &self.radicand.0 >= &gap * &gap
    }
}

impl RegionSpec {
    pub fn x_bounds(&self) -> (Rational, Rational) {
        (q(self.x_range[0]), q(self.x_range[1]))
    }

    pub fn y_bounds(&self) -> (Rational, Rational) {
        (q(self.y_range[0]), q(self.y_range[1]))
    }

    pub fn contains_exact(&self, x: &Rational, y: &Rational) -> bool {
        let (xl, xh) = self.x_bounds();
        let (yl, yh) = self.y_bounds();
        *x >= xl && *x <= xh && *y >= yl && *y <= yh && (!self.y_at_most_x || y <= x)
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let [xl, xh] = self.x_range.map(qf);
        let [yl, yh] = self.y_range.map(qf);
        x >= xl && x <= xh && y >= yl && y <= yh && (!self.y_at_most_x || y <= x)
    }

    /// F at a rational point, with no domain check.
    pub fn eval_exact_unchecked(&self, x: &Rational, y: &Rational) -> SurdValue {
        let int = |v: i64| Rational::from_integer(v.into());
        let mut r = q(self.constant) + int(self.coeff_y) * y + int(self.coeff_x) * x;
        r += (int(3) - x * y) / (x + y);
        if self.with_h {
            r += (int(3) - y * y) / (int(2) * y);
        }
        if self.with_r {
            let t = q((2, 5));
            r += (int(3) - &t * x) / (x + &t);
        }
        SurdValue {
            rational: Exact(r),
            sqrt_coefficient: self.coeff_sqrt,
            radicand: Exact(int(3) + x * x),
        }
    }

    pub fn eval_exact(&self, x: &Rational, y: &Rational) -> Result<SurdValue, RegionError> {
        if !self.contains_exact(x, y) {
            return Err(RegionError::OutOfRegion {
                region: self.id,
                x: x.to_f64().unwrap_or(f64::NAN),
                y: y.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(self.eval_exact_unchecked(x, y))
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        let mut v = qf(self.constant)
            + self.coeff_y as f64 * y
            + self.coeff_x as f64 * x
            + self.coeff_sqrt as f64 * (3.0 + x * x).sqrt()
            + (3.0 - x * y) / (x + y);
        if self.with_h {
            v += (3.0 - y * y) / (2.0 * y);
        }
        if self.with_r {
            v += (3.0 - 0.4 * x) / (x + 0.4);
        }
        v
    }

    /// Natural interval extension of F.
    pub fn eval_interval<F: RoundedFloat>(&self, x: Interval<F>, y: Interval<F>) -> Interval<F> {
        let c = |n: i64| Interval::int(n);
        let x2 = x.sqr();
        let mut v = Interval::ratio(self.constant.0, self.constant.1)
            + c(self.coeff_y) * y
            + c(self.coeff_x) * x
            + c(self.coeff_sqrt) * (c(3) + x2).sqrt()
            + (c(3) + x2) / (x + y)
            - x;
        if self.with_h {
            v = v + Interval::ratio(3, 2) * y.recip() - Interval::ratio(1, 2) * y;
        }
        if self.with_r {
            let t = Interval::ratio(2, 5);
            v = v + Interval::ratio(79, 25) / (x + t) - t;
        }
        v
    }

    /// Interval enclosures of (dF/dx, dF/dy).
    pub fn gradient<F: RoundedFloat>(&self, x: Interval<F>, y: Interval<F>) -> (Interval<F>, Interval<F>) {
        let c = |n: i64| Interval::int(n);
        let x2 = x.sqr();
        let y2 = y.sqr();
        let sum2 = (x + y).sqr();
        let mut dx = c(self.coeff_sqrt) * x / (c(3) + x2).sqrt() + c(self.coeff_x) - (y2 + c(3)) / sum2;
        let mut dy = c(self.coeff_y) - (x2 + c(3)) / sum2;
        if self.with_h {
            dy = dy - Interval::ratio(3, 2) / y2 - Interval::ratio(1, 2);
        }
        if self.with_r {
            dx = dx - Interval::ratio(79, 25) / (x + Interval::ratio(2, 5)).sqr();
        }
        (dx, dy)
    }

    /// Enclosure of F over a box, tightened by monotonicity: along any axis where
    /// the gradient has constant sign the extremes sit on a face.
    pub fn enclose<F: RoundedFloat>(&self, x: Interval<F>, y: Interval<F>) -> Interval<F> {
        let (dx, dy) = self.gradient(x, y);
        let ends = |iv: Interval<F>, d: Interval<F>| {
            if d.is_nonnegative() {
                (Interval::point(iv.lo()), Interval::point(iv.hi()))
            } else if d.is_nonpositive() {
                (Interval::point(iv.hi()), Interval::point(iv.lo()))
            } else {
                (iv, iv)
            }
        };
        let (xmin, xmax) = ends(x, dx);
        let (ymin, ymax) = ends(y, dy);
        let lo = self.eval_interval(xmin, ymin).lo();
        let hi = self.eval_interval(xmax, ymax).hi();
        Interval::new(lo.min(hi), hi)
    }
}

/// F at a point of the region; floating evaluation.
pub fn region_eval(spec: &RegionSpec, point: (f64, f64)) -> Result<f64, RegionError> {
    let (x, y) = point;
    if !spec.contains(x, y) {
        return Err(RegionError::OutOfRegion { region: spec.id, x, y });
    }
    Ok(spec.eval_f64(x, y))
}

/// g(x, y, z) before the region-wise bounds.
pub fn g_function(x: f64, y: f64, z: f64) -> f64 {
    y + z + 1f64.min((3.0 - x * z) / (x + z)) + (3.0 - x * y) / (x + y) + (3.0 + x * x).sqrt()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CornerCheck {
    pub x: Exact,
    pub y: Exact,
    pub value: SurdValue,
    pub approx: String,
    pub at_most_target: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HotBox {
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub enclosure: [f64; 2],
    pub corners: Vec<CornerCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionCertificate {
    pub region: u8,
    pub target: Exact,
    pub tol: f64,
    pub max_depth: u32,
    /// max of the enclosure upper bounds over all leaf boxes
    pub certified_max_bound: f64,
    /// largest floating value of F seen at a box center
    pub max_sampled_value: f64,
    pub boxes_processed: u64,
    pub leaves: u64,
    pub deepest: u32,
    pub hot_boxes: Vec<HotBox>,
}

#[derive(Debug, Default)]
struct Search {
    boxes: u64,
    leaves: u64,
    deepest: u32,
    bound: f64,
    sampled: f64,
    hot: Vec<HotBox>,
}

impl Search {
    fn merge(mut self, other: Search) -> Search {
        self.boxes += other.boxes;
        self.leaves += other.leaves;
        self.deepest = self.deepest.max(other.deepest);
        self.bound = self.bound.max(other.bound);
        self.sampled = self.sampled.max(other.sampled);
        self.hot.extend(other.hot);
        self
    }
}

struct Job<'a> {
    spec: &'a RegionSpec,
    target: &'a Rational,
    cold_below: f64,
    certified_below: f64,
    fail_above: f64,
    max_depth: u32,
}

fn to_rational<F: RoundedFloat>(v: F) -> Rational {
    Rational::from_float(v.to_f64().expect("finite")).expect("finite")
}

impl Job<'_> {
    fn corners<F: RoundedFloat>(&self, x: Interval<F>, y: Interval<F>) -> Vec<CornerCheck> {
        let (xl, xh) = self.spec.x_bounds();
        let (yl, yh) = self.spec.y_bounds();
        let mut out: Vec<CornerCheck> = Vec::new();
        for cx in [x.lo(), x.hi()] {
            for cy in [y.lo(), y.hi()] {
                let px = to_rational(cx).clamp(xl.clone(), xh.clone());
                let mut py = to_rational(cy).clamp(yl.clone(), yh.clone());
                if self.spec.y_at_most_x && py > px {
                    py = px.clone();
                }
                if out.iter().any(|c| c.x.0 == px && c.y.0 == py) {
                    continue;
                }
                let value = self.spec.eval_exact_unchecked(&px, &py);
                out.push(CornerCheck {
                    approx: format!("{:.12}", value.to_f64()),
                    at_most_target: value.at_most(self.target),
                    x: Exact(px),
                    y: Exact(py),
                    value,
                });
            }
        }
        out
    }

    fn run<F: RoundedFloat>(&self, x: Interval<F>, y: Interval<F>, depth: u32) -> Result<Search, RegionError> {
        let mut s = Search {
            boxes: 1,
            deepest: depth,
            bound: f64::NEG_INFINITY,
            sampled: f64::NEG_INFINITY,
            ..Search::default()
        };
        if self.spec.y_at_most_x && y.lo() > x.hi() {
            s.boxes = 1;
            return Ok(s);
        }
        let f64_of = |v: F| v.to_f64().expect("finite");
        let cx = x.mid();
        let cy = if self.spec.y_at_most_x && y.mid() > cx { y.lo().max(cx.min(y.hi())) } else { y.mid() };
        let at_center = self.spec.eval_interval(Interval::point(cx), Interval::point(cy));
        s.sampled = f64_of(at_center.mid());
        if f64_of(at_center.lo()) > self.fail_above {
            return Err(RegionError::CertificationFailed {
                region: self.spec.id,
                x: f64_of(cx),
                y: f64_of(cy),
                value: f64_of(at_center.lo()),
            });
        }
        let enc = self.spec.enclose(x, y);
        let hi = f64_of(enc.hi());
        if hi <= self.cold_below {
            s.leaves = 1;
            s.bound = hi;
            return Ok(s);
        }
        if hi <= self.certified_below {
            let corners = self.corners(x, y);
            if let Some(bad) = corners.iter().find(|c| !c.at_most_target) {
                return Err(RegionError::CertificationFailed {
                    region: self.spec.id,
                    x: bad.x.to_f64(),
                    y: bad.y.to_f64(),
                    value: bad.value.to_f64(),
                });
            }
            s.leaves = 1;
            s.bound = hi;
            s.hot.push(HotBox {
                x: [f64_of(x.lo()), f64_of(x.hi())],
                y: [f64_of(y.lo()), f64_of(y.hi())],
                enclosure: [f64_of(enc.lo()), hi],
                corners,
            });
            return Ok(s);
        }
        if depth >= self.max_depth {
            return Err(RegionError::DepthExceeded {
                region: self.spec.id,
                depth,
                x: [f64_of(x.lo()), f64_of(x.hi())],
                y: [f64_of(y.lo()), f64_of(y.hi())],
            });
        }
        let ((x1, y1), (x2, y2)) = if x.width() >= y.width() {
            let (a, b) = x.bisect();
            ((a, y), (b, y))
        } else {
            let (a, b) = y.bisect();
            ((x, a), (x, b))
        };
        let (left, right) = if depth < PARALLEL_DEPTH {
            rayon::join(|| self.run(x1, y1, depth + 1), || self.run(x2, y2, depth + 1))
        } else {
            (self.run(x1, y1, depth + 1), self.run(x2, y2, depth + 1))
        };
        Ok(s.merge(left?).merge(right?))
    }
}

/// Outward-rounded box covering the region's bounding rectangle.
pub fn region_box<F: RoundedFloat>(spec: &RegionSpec) -> (Interval<F>, Interval<F>) {
    let cover = |lo: (i64, i64), hi: (i64, i64)| {
        Interval::new(Interval::<F>::ratio(lo.0, lo.1).lo(), Interval::<F>::ratio(hi.0, hi.1).hi())
    };
    let x = cover(spec.x_range[0], spec.x_range[1]);
    let y_hi = if spec.y_at_most_x { spec.x_range[1] } else { spec.y_range[1] };
    let y = cover(spec.y_range[0], y_hi);
    (x, y)
}

/// Proves F <= target + tol on the region, or reports why it could not.
pub fn certify_region_against<F: RoundedFloat>(
    spec: &RegionSpec,
    target: &Rational,
    tol: f64,
    max_depth: u32,
) -> Result<RegionCertificate, RegionError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(RegionError::InvalidTolerance(tol));
    }
    let approx = target.to_f64().expect("finite target");
    let t = Interval::new(approx.next_down(), approx.next_up());
    let tol_iv = Interval::point(tol);
    let job = Job {
        spec,
        target,
        cold_below: (t - tol_iv).lo(),
        certified_below: (t + tol_iv).lo(),
        fail_above: (t + tol_iv).hi(),
        max_depth,
    };
    let (x, y) = region_box::<F>(spec);
    let s = job.run(x, y, 0)?;
    Ok(RegionCertificate {
        region: spec.id,
        target: Exact(target.clone()),
        tol,
        max_depth,
        certified_max_bound: s.bound,
        max_sampled_value: s.sampled,
        boxes_processed: s.boxes,
        leaves: s.leaves,
        deepest: s.deepest,
        hot_boxes: s.hot,
    })
}

/// Proves F <= 6 + tol with exact corner checks in every hot box.
pub fn certify_region(spec: &RegionSpec, tol: f64, max_depth: u32) -> Result<RegionCertificate, RegionError> {
    certify_region_against::<f64>(spec, &Rational::from_integer(6.into()), tol, max_depth)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionOutcome {
    pub region: u8,
    pub certified: bool,
    pub certificate: Option<RegionCertificate>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionsReport {
    pub tol: f64,
    pub max_depth: u32,
    pub certified: usize,
    pub regions: Vec<RegionOutcome>,
}

impl RegionsReport {
    pub fn all_certified(&self) -> bool {
        self.certified == self.regions.len()
    }
}

pub fn certify_all_regions(tol: f64, max_depth: u32) -> Result<RegionsReport, RegionError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(RegionError::InvalidTolerance(tol));
    }
    let regions: Vec<RegionOutcome> = REGIONS
        .iter()
        .map(|r| match certify_region(r, tol, max_depth) {
            Ok(c) => RegionOutcome {
                region: r.id,
                certified: true,
                certificate: Some(c),
                error: None,
            },
            Err(e) => RegionOutcome {
                region: r.id,
                certified: false,
                certificate: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    Ok(RegionsReport {
        tol,
        max_depth,
        certified: regions.iter().filter(|r| r.certified).count(),
        regions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn spot_values() {
        let r1 = region(1).unwrap();
        assert_eq!(region_eval(r1, (1.0, 1.0)).unwrap(), 6.0);
        let v = region_eval(r1, (2.0, 1.0)).unwrap();
        assert!((v - (3.0 + 7f64.sqrt() + 1.0 / 3.0)).abs() < 1e-12);
        assert!(matches!(region_eval(r1, (0.5, 0.5)), Err(RegionError::OutOfRegion { .. })));
        assert!(region_eval(region(3).unwrap(), (1.5, 1.6)).is_err());
        assert_eq!(region(9), Err(RegionError::UnknownRegion(9)));
    }

    #[test]
    fn exact_equality_point() {
        let v = region(1).unwrap().eval_exact(&r(1, 1), &r(1, 1)).unwrap();
        assert_eq!(v.rational.0, r(4, 1));
        assert!(v.at_most(&r(6, 1)) && v.at_least(&r(6, 1)));
        assert!(!v.at_most(&r(5999, 1000)));
        let v3 = region(3).unwrap().eval_exact(&r(1, 1), &r(1, 1)).unwrap();
        assert!(v3.at_most(&r(6, 1)) && v3.at_least(&r(6, 1)));
    }

    #[test]
    fn region_one_certifies_with_hot_box_at_equality_point() {
        let c = certify_region(region(1).unwrap(), 1e-9, DEFAULT_MAX_DEPTH).unwrap();
        assert!(c.certified_max_bound <= 6.0 + 1e-9);
        assert!(!c.hot_boxes.is_empty());
        let near = c.hot_boxes.iter().any(|h| h.x[0] <= 1.0 && h.y[1] >= 1.0);
        assert!(near);
        assert!(c.hot_boxes.iter().all(|h| h.corners.iter().all(|k| k.at_most_target)));
    }

    #[test]
    fn region_four_certifies() {
        let c = certify_region(region(4).unwrap(), 1e-9, DEFAULT_MAX_DEPTH).unwrap();
        assert!(c.certified_max_bound <= 6.0);
    }

    #[test]
    fn negative_control_fails() {
        let res = certify_region_against::<f64>(region(1).unwrap(), &r(59, 10), 1e-6, DEFAULT_MAX_DEPTH);
        assert!(matches!(res, Err(RegionError::CertificationFailed { region: 1, .. })));
    }

    #[test]
    fn tolerance_must_be_positive() {
        assert_eq!(certify_all_regions(0.0, 40), Err(RegionError::InvalidTolerance(0.0)));
        assert!(certify_region(region(2).unwrap(), -1.0, 40).is_err());
    }

    #[test]
    fn deterministic() {
        let a = certify_region(region(3).unwrap(), 1e-6, 40).unwrap();
        let b = certify_region(region(3).unwrap(), 1e-6, 40).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_precision_boxes_also_certify() {
        let c = certify_region_against::<f32>(region(2).unwrap(), &r(6, 1), 1e-3, 40).unwrap();
        assert!(c.certified_max_bound <= 6.001);
    }

    #[test]
    fn enclosures_contain_exact_values_along_bisection_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for spec in &REGIONS {
            let (x0, y0) = region_box::<f64>(spec);
            for _ in 0..200 {
                let (xl, xh) = spec.x_bounds();
                let px = &xl + (&xh - &xl) * r(rng.gen_range(0..=1 << 20), 1 << 20);
                let (yl, mut yh) = spec.y_bounds();
                if spec.y_at_most_x {
                    yh = px.clone();
                }
                let py = &yl + (&yh - &yl) * r(rng.gen_range(0..=1 << 20), 1 << 20);
                let exact = spec.eval_exact(&px, &py).unwrap();
                let (mut x, mut y) = (x0, y0);
                for depth in 0..30 {
                    let e = spec.enclose(x, y);
                    assert!(exact.at_least(&Rational::from_float(e.lo()).unwrap()), "region {}", spec.id);
                    assert!(exact.at_most(&Rational::from_float(e.hi()).unwrap()), "region {}", spec.id);
                    let split_x = depth % 2 == 0;
                    let (iv, p) = if split_x { (x, &px) } else { (y, &py) };
                    let (a, b) = iv.bisect();
                    let pick = if *p <= Rational::from_float(a.hi()).unwrap() { a } else { b };
                    if split_x {
                        x = pick;
                    } else {
                        y = pick;
                    }
                }
            }
        }
    }

    #[test]
    fn bounding_expressions_dominate_g() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for spec in &REGIONS {
            for _ in 0..2000 {
                let [xl, xh] = spec.x_range.map(qf);
                let [yl, yh] = spec.y_range.map(qf);
                let x = rng.gen_range(xl..=xh);
                let y = rng.gen_range(yl..=if spec.y_at_most_x { x.min(yh) } else { yh });
                let s = (3.0 + x * x).sqrt();
                let mut z_hi = y.min(s - x).min((3.0 - y * y) / (2.0 * y));
                let mut z_lo = -1.0f64;
                match spec.z_condition {
                    Some(ZCondition::AtMostTwoFifths) => z_hi = z_hi.min(0.4),
                    Some(ZCondition::AtLeastTwoFifths) => z_lo = 0.4,
                    None => {}
                }
                if z_lo > z_hi {
                    continue;
                }
                let z = rng.gen_range(z_lo..=z_hi);
                assert!(g_function(x, y, z) <= spec.eval_f64(x, y) + 1e-12, "region {} at {x} {y} {z}", spec.id);
            }
        }
    }
}
