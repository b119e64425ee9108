//! The convex arc obtained by rolling the graph of `F = (1/4) int f` around
//! the origin, where `f` mixes a Cantor staircase with the identity.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use super::set::CantorSet;
use crate::error::{Error, Result};
use crate::vecops::{dot, rot90, unit};

/// Kinematic quantities of the arc at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub t: f64,
    /// `f(t) = (mu([0, t]) + t) / 2`
    pub f: f64,
    /// `F(t) = (1/4) int_0^t f`
    pub big_f: f64,
    /// `psi(t) = f(t) / (4 (1 - F(t)))`
    pub psi: f64,
    /// `theta(t) = atan(psi(t))`
    pub theta: f64,
    /// Certified bound on the error of `f` (the error of `F` is smaller).
    pub error_bound: f64,
}

impl CurvePoint {
    fn new(t: f64, stair: f64, stair_integral: f64, error_bound: f64) -> Self {
        let f = 0.5 * (stair + t);
        let big_f = 0.125 * (stair_integral + 0.5 * t * t);
        let psi = f / (4.0 * (1.0 - big_f));
        CurvePoint {
            t,
            f,
            big_f,
            psi,
            theta: psi.atan(),
            error_bound,
        }
    }

    /// `gamma(t) = (1 - F(t)) (cos t, sin t)`
    pub fn gamma(&self) -> [f64; 2] {
        let r = 1.0 - self.big_f;
        [r * self.t.cos(), r * self.t.sin()]
    }

    /// Unit tangent `beta(t)`, at angle `t + pi/2 + theta(t)`.
    pub fn beta(&self) -> [f64; 2] {
        unit(self.beta_angle())
    }

    pub fn beta_angle(&self) -> f64 {
        self.t + FRAC_PI_2 + self.theta
    }

    /// `w(t) = (1, psi) / |(1, psi)|`
    pub fn w(&self) -> [f64; 2] {
        unit(self.theta)
    }

    /// `1 / (4 (1 - F(t)))`
    pub fn q(&self) -> f64 {
        0.25 / (1.0 - self.big_f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SampleKind {
    Breakpoint,
    GapMidpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveSample {
    pub point: CurvePoint,
    pub kind: SampleKind,
}

/// Lower and upper bounds on a Lebesgue measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureBounds {
    pub level: u32,
    pub lower: f64,
    pub upper: f64,
}

/// The arc `Gamma` sampled at the level-`k` breakpoints and gap midpoints.
#[derive(Debug, Clone)]
pub struct CounterexampleCurve {
    cantor: CantorSet,
    level: u32,
    samples: Vec<CurveSample>,
    /// +1 if `R_{pi/2} beta` is the outward normal, -1 if it points inward.
    orientation: f64,
}

impl CounterexampleCurve {
    pub fn new(cantor: CantorSet, level: u32) -> Result<Self> {
        if level > cantor.level_cap() {
            return Err(Error::InvalidParameter(format!(
                "level {level} exceeds the level cap {}",
                cantor.level_cap()
            )));
        }
        if (cantor.branches() as f64).powi(level as i32) > 1e7 {
            return Err(Error::TooLarge((cantor.branches() as u64).saturating_pow(level)));
        }
        let mut samples = Vec::new();
        for (left, right, gap) in walk(&cantor, level) {
            samples.push(CurveSample {
                point: left,
                kind: SampleKind::Breakpoint,
            });
            samples.push(CurveSample {
                point: right,
                kind: SampleKind::Breakpoint,
            });
            if let Some(mid) = gap {
                samples.push(CurveSample {
                    point: mid,
                    kind: SampleKind::GapMidpoint,
                });
            }
        }
        // R_{pi/2} beta(t) is inward for this parameterization; fix the sign
        // from the data instead of assuming it.
        let inner: Vec<f64> = samples
            .iter()
            .map(|s| dot(&s.point.gamma(), &rot90(&s.point.beta())))
            .collect();
        let orientation = if inner.iter().all(|&v| v > 0.0) {
            1.0
        } else if inner.iter().all(|&v| v < 0.0) {
            -1.0
        } else {
            return Err(Error::InvalidParameter(
                "rotated tangent changes side along the arc".into(),
            ));
        };
        Ok(CounterexampleCurve {
            cantor,
            level,
            samples,
            orientation,
        })
    }

    pub fn cantor(&self) -> &CantorSet {
        &self.cantor
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn samples(&self) -> &[CurveSample] {
        &self.samples
    }

    pub fn orientation(&self) -> f64 {
        self.orientation
    }

    /// Evaluates the arc at an arbitrary parameter in `[0, 1]`.
    pub fn point(&self, t: f64) -> CurvePoint {
        let t = t.clamp(0.0, 1.0);
        let s = self.cantor.staircase(t);
        let i = self.cantor.staircase_integral(t);
        CurvePoint::new(t, s.value, i.value, 0.5 * s.error_bound)
    }

    pub fn end(&self) -> CurvePoint {
        self.samples.last().expect("nonempty").point
    }

    pub fn start(&self) -> CurvePoint {
        self.samples[0].point
    }

    /// Outward unit normal of the unit sphere at `gamma(t)`, obtained by a
    /// quarter turn of the tangent `beta(t)`.
    pub fn gauss_on_gamma(&self, t: f64) -> [f64; 2] {
        let n = rot90(&self.point(t).beta());
        [self.orientation * n[0], self.orientation * n[1]]
    }

    /// Polar angle of the outward normal at `gamma(t)`.
    pub fn normal_angle(&self, t: f64) -> f64 {
        let p = self.point(t);
        p.beta_angle() + if self.orientation > 0.0 { FRAC_PI_2 } else { -FRAC_PI_2 }
    }

    /// Strict monotonicity of `t + pi/2 + theta(t)` over the sample grid.
    pub fn beta_is_injective(&self) -> bool {
        self.samples
            .windows(2)
            .all(|p| p[1].point.beta_angle() > p[0].point.beta_angle())
    }

    /// Bounds on the Lebesgue measure of the set of tangent angles
    /// `{t + pi/2 + theta(t) : t in K}`, using the gaps up to `level`.
    ///
    /// The image of `K` under the increasing map `A(t) = t + theta(t)` is
    /// `[A(0), A(1)]` minus the images of the gaps; since the gaps have total
    /// length 1 its measure is `theta(1) - sum_gaps delta theta`. The gaps
    /// deeper than `level` lie inside level-`k` basic intervals `[a, b]`, and
    /// together contribute at most
    /// `(len/2 * q(b) + f(b) (q(b) - q(a))) / (1 + psi(a)^2)` per interval.
    pub fn image_measure_bounds(&self, level: u32) -> Result<MeasureBounds> {
        self.check_level(level)?;
        let mut gap_sum = 0.0;
        let mut truncation = 0.0;
        let mut last_right: Option<CurvePoint> = None;
        for (left, right, _) in walk(&self.cantor, level) {
            if let Some(prev) = last_right {
                gap_sum += left.theta - prev.theta;
            }
            let len = right.t - left.t;
            truncation += (0.5 * len * right.q() + right.f * (right.q() - left.q())) / (1.0 + left.psi * left.psi);
            last_right = Some(right);
        }
        let theta1 = last_right.expect("nonempty").theta;
        let upper = theta1 - gap_sum;
        Ok(MeasureBounds {
            level,
            lower: upper - truncation,
            upper,
        })
    }

    /// Bounds on the Lebesgue measure of `f(K)`; `f` has slope 1/2 on every gap.
    pub fn f_image_bounds(&self, level: u32) -> Result<MeasureBounds> {
        self.check_level(level)?;
        let gaps = self.cantor.gaps(level);
        let gap_image: f64 = gaps.iter().map(|g| 0.5 * (g.right - g.left)).sum();
        let upper = 1.0 - gap_image;
        Ok(MeasureBounds {
            level,
            lower: upper - 0.5 * self.cantor.covering_length(level),
            upper,
        })
    }

    fn check_level(&self, level: u32) -> Result<()> {
        if level > self.cantor.level_cap() || (self.cantor.branches() as f64).powi(level as i32) > 1e7 {
            return Err(Error::InvalidParameter(format!("level {level} is out of range")));
        }
        Ok(())
    }
}

/// Exact staircase data along the level-`k` covering: for every basic
/// interval its two endpoints and the midpoint of the gap that follows it.
fn walk(cantor: &CantorSet, level: u32) -> Vec<(CurvePoint, CurvePoint, Option<CurvePoint>)> {
    let ivs = cantor.intervals(level);
    let w = (cantor.branches() as f64).powi(-(level as i32));
    let mut out = Vec::with_capacity(ivs.len());
    let mut integral = 0.0;
    for (i, iv) in ivs.iter().enumerate() {
        let left = CurvePoint::new(iv.left, iv.stair, integral, 0.0);
        integral += iv.len * (iv.stair + 0.5 * w);
        let right_t = if i + 1 == ivs.len() { 1.0 } else { iv.left + iv.len };
        let top = if i + 1 == ivs.len() { 1.0 } else { iv.stair + w };
        let right = CurvePoint::new(right_t, top, integral, 0.0);
        let gap = ivs.get(i + 1).map(|next| {
            let mid = 0.5 * (right_t + next.left);
            let mid_pt = CurvePoint::new(mid, top, integral + (mid - right_t) * top, 0.0);
            integral += (next.left - right_t) * top;
            mid_pt
        });
        out.push((left, right, gap));
    }
    out
}

/// Grid-level check of the product rule for image measures: for `h = f g`
/// with `g` positive and increasing on `[1/n, 1]`, the total increment of
/// `h` over the level-`k` basic intervals inside `[1/n, 1]` dominates
/// `g(1/n)` times that of `f`. Returns `(h_increment, g(1/n) * f_increment)`.
pub fn product_measure_probe(cantor: &CantorSet, level: u32, g: impl Fn(f64) -> f64, n: u32) -> (f64, f64) {
    let start = 1.0 / n as f64;
    let w = (cantor.branches() as f64).powi(-(level as i32));
    let f = |t: f64, stair: f64| 0.5 * (stair + t);
    let (mut dh, mut df) = (0.0, 0.0);
    for iv in cantor.intervals(level) {
        if iv.left < start {
            continue;
        }
        let (a, b) = (iv.left, iv.left + iv.len);
        let (fa, fb) = (f(a, iv.stair), f(b, iv.stair + w));
        dh += fb * g(b) - fa * g(a);
        df += fb - fa;
    }
    (dh, g(start) * df)
}

/// Angle of the tangent at the end of the arc, `1 + pi/2 + theta(1)`.
pub fn end_tangent_angle(curve: &CounterexampleCurve) -> f64 {
    curve.end().beta_angle()
}

/// `pi/2 - 1`, the upper limit for `theta(1)`.
pub const THETA1_LIMIT: f64 = FRAC_PI_2 - 1.0;
