//! Self-similar Cantor sets on `[0, 1]` and their normalized staircases.

use serde::Serialize;

use crate::error::{Error, Result};

/// Cantor set with `m` equally spaced branches of ratio `r` in `[0, 1]`.
///
/// The first branch starts at 0, the last ends at 1, and consecutive
/// branches are separated by gaps of relative length `(1 - m r) / (m - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CantorSet {
    m: u32,
    r: f64,
    level_cap: u32,
}

/// Staircase value with a certified bracket `value +- error_bound`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StaircaseValue {
    pub value: f64,
    pub error_bound: f64,
}

/// A level-`k` basic interval together with its staircase range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasicInterval {
    pub left: f64,
    pub len: f64,
    /// Staircase value at `left`; the value at the right end is `stair + m^-k`.
    pub stair: f64,
}

/// A complementary interval of the set inside `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gap {
    pub left: f64,
    pub right: f64,
    /// Constant staircase value on the gap.
    pub stair: f64,
}

impl CantorSet {
    pub const DEFAULT_LEVEL_CAP: u32 = 40;

    pub fn new(m: u32, r: f64) -> Result<Self> {
        Self::with_level_cap(m, r, Self::DEFAULT_LEVEL_CAP)
    }

    pub fn with_level_cap(m: u32, r: f64, level_cap: u32) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidParameter(format!("branch count must be >= 2, got {m}")));
        }
        if !(r > 0.0) || !(r * (m as f64) < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "ratio must satisfy 0 < r < 1/m, got r = {r}, m = {m}"
            )));
        }
        if level_cap == 0 || level_cap > 64 {
            return Err(Error::InvalidParameter(format!(
                "level cap must be in 1..=64, got {level_cap}"
            )));
        }
        Ok(CantorSet { m, r, level_cap })
    }

    /// The middle-thirds set.
    pub fn triadic() -> Self {
        CantorSet::new(2, 1.0 / 3.0).expect("valid parameters")
    }

    pub fn branches(&self) -> u32 {
        self.m
    }

    pub fn ratio(&self) -> f64 {
        self.r
    }

    pub fn level_cap(&self) -> u32 {
        self.level_cap
    }

    /// Similarity dimension `log m / log(1/r)`.
    pub fn dimension(&self) -> f64 {
        (self.m as f64).ln() / (1.0 / self.r).ln()
    }

    /// Offset between consecutive branch starts, relative to the parent length.
    fn pitch(&self) -> f64 {
        (1.0 - self.r) / (self.m - 1) as f64
    }

    /// Relative gap length at each subdivision.
    pub fn gap_ratio(&self) -> f64 {
        self.pitch() - self.r
    }

    /// Total length `(m r)^k` of the level-`k` covering.
    pub fn covering_length(&self, level: u32) -> f64 {
        (self.m as f64 * self.r).powi(level as i32)
    }

    /// The `m^k` basic intervals of level `k`, left to right.
    pub fn intervals(&self, level: u32) -> Vec<BasicInterval> {
        let mut cur = vec![BasicInterval {
            left: 0.0,
            len: 1.0,
            stair: 0.0,
        }];
        let (m, pitch) = (self.m as usize, self.pitch());
        let mut weight = 1.0;
        for _ in 0..level {
            weight /= self.m as f64;
            let mut next = Vec::with_capacity(cur.len() * m);
            for iv in &cur {
                for j in 0..m {
                    next.push(BasicInterval {
                        left: iv.left + j as f64 * pitch * iv.len,
                        len: iv.len * self.r,
                        stair: iv.stair + j as f64 * weight,
                    });
                }
            }
            cur = next;
        }
        cur
    }

    /// All gaps of levels `1..=level`, left to right.
    pub fn gaps(&self, level: u32) -> Vec<Gap> {
        let ivs = self.intervals(level);
        let w = (self.m as f64).powi(-(level as i32));
        ivs.windows(2)
            .map(|p| Gap {
                left: p[0].left + p[0].len,
                right: p[1].left,
                stair: p[0].stair + w,
            })
            .collect()
    }

    /// Normalized measure `mu([0, t])` of the natural self-similar measure.
    ///
    /// Exact on gaps and at endpoints of basic intervals reached before the
    /// level cap; otherwise bracketed within `m^-k` at the truncation level.
    pub fn staircase(&self, t: f64) -> StaircaseValue {
        self.descend(t, |_, _, _, _| ()).0
    }

    /// `int_0^u mu([0, t]) dt` with a certified error bound.
    ///
    /// Gaps are integrated exactly; every complete basic interval of stair
    /// range `[c, c + W]` contributes `len (c + W/2)` (the staircase on it is
    /// an affine copy of the whole staircase, whose integral is 1/2 by the
    /// reflection symmetry `mu([0, 1 - t]) = 1 - mu([0, t])`). Only the
    /// partial interval at the truncation level is bracketed.
    pub fn staircase_integral(&self, u: f64) -> StaircaseValue {
        let mut integral = 0.0;
        let (_, (start, value, range, exact)) = self.descend(u, |_, len, stair, weight| {
            integral += len * (stair + 0.5 * weight);
        });
        let seg = (u.clamp(0.0, 1.0) - start).max(0.0);
        let half = if exact { 0.0 } else { 0.5 * seg * range };
        StaircaseValue {
            value: integral + seg * value + half,
            error_bound: half,
        }
    }

    /// Walks down the interval tree to `t`, reporting every complete piece
    /// (basic intervals and gaps) to the left of `t` through `full`, called
    /// as `full(left, len, value_at_left, range)`; gaps have range 0.
    ///
    /// Returns the staircase value and the last partial piece
    /// `(start, value_at_start, range, exact)`.
    fn descend<F: FnMut(f64, f64, f64, f64)>(&self, t: f64, mut full: F) -> (StaircaseValue, (f64, f64, f64, bool)) {
        if t <= 0.0 {
            return (exact(0.0), (0.0, 0.0, 0.0, true));
        }
        if t >= 1.0 {
            full(0.0, 1.0, 0.0, 1.0);
            return (exact(1.0), (1.0, 1.0, 0.0, true));
        }
        let (m, pitch, gap) = (self.m as usize, self.pitch(), self.gap_ratio());
        let (mut a, mut len, mut acc, mut weight) = (0.0f64, 1.0f64, 0.0f64, 1.0f64);
        for _ in 0..self.level_cap {
            let child_w = weight / self.m as f64;
            let child_len = len * self.r;
            if child_len <= 4.0 * f64::EPSILON * t {
                break;
            }
            let mut descended = false;
            for j in 0..m {
                let left = a + j as f64 * pitch * len;
                let right = left + child_len;
                let stair = acc + j as f64 * child_w;
                if j > 0 {
                    let gap_start = left - gap * len;
                    if t < left {
                        return (exact(stair), (gap_start, stair, 0.0, true));
                    }
                    full(gap_start, gap * len, stair, 0.0);
                }
                if t == left {
                    return (exact(stair), (left, stair, 0.0, true));
                }
                if t < right {
                    a = left;
                    len = child_len;
                    acc = stair;
                    weight = child_w;
                    descended = true;
                    break;
                }
                full(left, child_len, stair, child_w);
                if t == right || j == m - 1 {
                    return (exact(stair + child_w), (right, stair + child_w, 0.0, true));
                }
            }
            debug_assert!(descended);
        }
        let sv = StaircaseValue {
            value: acc + 0.5 * weight,
            error_bound: 0.5 * weight,
        };
        (sv, (a, acc, weight, false))
    }
}

fn exact(value: f64) -> StaircaseValue {
    StaircaseValue {
        value,
        error_bound: 0.0,
    }
}
