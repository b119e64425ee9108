//! Deterministic point clouds of self-similar sets: cell midpoints of the
//! generation-`g` cells of an iterated function system.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest number of points a generator will produce.
pub const MAX_POINTS: u64 = 1 << 24;

/// Cell midpoints of a self-similar set at some generation, stored flat.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointCloud {
    pub dim: usize,
    #[serde(skip)]
    pub coords: Vec<f64>,
    pub generation: u32,
    /// Diameter of the generation-level cells.
    pub resolution: f64,
    pub label: String,
    /// Natural base for box sizes (`1 / ratio` when that is an integer).
    pub base: u32,
}

impl PointCloud {
    pub fn new(dim: usize, coords: Vec<f64>, generation: u32, resolution: f64, label: &str, base: u32) -> Result<Self> {
        if dim == 0 || !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidParameter(
                "coordinate count is not a multiple of the dimension".into(),
            ));
        }
        if !(resolution >= 0.0) || base < 2 {
            return Err(Error::InvalidParameter("resolution must be >= 0 and base >= 2".into()));
        }
        Ok(PointCloud {
            dim,
            coords,
            generation,
            resolution,
            label: label.to_string(),
            base,
        })
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// Largest Euclidean distance between two points, by brute force on
    /// the bounding box corners for big clouds.
    pub fn bounding_diameter(&self) -> f64 {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in self.points() {
            for k in 0..self.dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        lo.iter().zip(&hi).map(|(a, b)| (b - a).powi(2)).sum::<f64>().sqrt()
    }

    /// Shifts every point by `v`.
    pub fn translated(&self, v: &[f64]) -> PointCloud {
        let mut out = self.clone();
        for p in out.coords.chunks_exact_mut(self.dim) {
            p.iter_mut().zip(v).for_each(|(c, d)| *c += d);
        }
        out
    }
}

/// A contracting similarity `x -> ratio * O x + shift` with `O` orthogonal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Similarity {
    pub ratio: f64,
    /// Row-major `dim x dim` orthogonal part.
    pub orthogonal: Vec<f64>,
    pub shift: Vec<f64>,
}

impl Similarity {
    /// `x -> ratio * x + shift`.
    pub fn scaling(ratio: f64, shift: &[f64]) -> Self {
        let n = shift.len();
        let mut o = vec![0.0; n * n];
        for i in 0..n {
            o[i * n + i] = 1.0;
        }
        Similarity {
            ratio,
            orthogonal: o,
            shift: shift.to_vec(),
        }
    }

    /// Planar `x -> ratio * R(angle) x + shift`.
    pub fn rotation(ratio: f64, angle: f64, shift: [f64; 2]) -> Self {
        let (s, c) = angle.sin_cos();
        Similarity {
            ratio,
            orthogonal: vec![c, -s, s, c],
            shift: shift.to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    fn apply_into(&self, x: &[f64], out: &mut Vec<f64>) {
        let n = self.dim();
        for i in 0..n {
            let row = &self.orthogonal[i * n..(i + 1) * n];
            out.push(self.ratio * row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + self.shift[i]);
        }
    }
}

fn natural_base(ratio: f64) -> u32 {
    let inv = 1.0 / ratio;
    let r = inv.round();
    if r >= 2.0 && (inv - r).abs() <= 1e-3 * r {
        r as u32
    } else {
        2
    }
}

/// Cell midpoints of the IFS at `generation`, starting from the unit cube.
///
/// Points are ordered lexicographically by the symbol sequence
/// `f_{i_1} o ... o f_{i_g}`. The open set condition is not checked.
pub fn ifs_attractor(maps: &[Similarity], generation: u32, label: &str) -> Result<PointCloud> {
    let first = maps
        .first()
        .ok_or_else(|| Error::InvalidParameter("an IFS needs at least one map".into()))?;
    let dim = first.dim();
    for m in maps {
        if m.dim() != dim || m.orthogonal.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: m.dim(),
            });
        }
        if !(m.ratio.abs() < 1.0) {
            return Err(Error::NotContracting(m.ratio));
        }
    }
    let count = (maps.len() as u64).checked_pow(generation).unwrap_or(u64::MAX);
    if count > MAX_POINTS {
        return Err(Error::TooLarge(count));
    }
    let mut pts = vec![0.5; dim];
    for _ in 0..generation {
        let mut next = Vec::with_capacity(pts.len() * maps.len());
        for m in maps {
            for p in pts.chunks_exact(dim) {
                m.apply_into(p, &mut next);
            }
        }
        pts = next;
    }
    let ratio = maps.iter().fold(0.0f64, |a, m| a.max(m.ratio.abs()));
    let resolution = ratio.powi(generation as i32) * (dim as f64).sqrt();
    PointCloud::new(dim, pts, generation, resolution, label, natural_base(ratio))
}

/// Midpoints of the generation-level squares of `C_r x C_r`.
pub fn cantor_product(r: f64, generation: u32) -> Result<PointCloud> {
    if !(r > 0.0 && r < 0.5) {
        return Err(Error::InvalidParameter(format!("ratio {r} must lie in (0, 1/2)")));
    }
    if generation > 12 {
        return Err(Error::TooLarge(4u64.saturating_pow(generation)));
    }
    let s = 1.0 - r;
    let maps: Vec<Similarity> = [[0.0, 0.0], [0.0, s], [s, 0.0], [s, s]]
        .iter()
        .map(|t| Similarity::scaling(r, t))
        .collect();
    ifs_attractor(&maps, generation, "cantor-product")
}

/// The four-corner set: ratio 1/4 copies at the corners of the unit square.
pub fn four_corner(generation: u32) -> Result<PointCloud> {
    if generation > 10 {
        return Err(Error::TooLarge(4u64.saturating_pow(generation)));
    }
    let maps: Vec<Similarity> = [[0.0, 0.0], [0.0, 0.75], [0.75, 0.0], [0.75, 0.75]]
        .iter()
        .map(|t| Similarity::scaling(0.25, t))
        .collect();
    ifs_attractor(&maps, generation, "four-corner")
}

/// One-dimensional Cantor set with two branches of ratio `r` in `[0, 1]`.
pub fn cantor_line(r: f64, generation: u32) -> Result<PointCloud> {
    if !(r > 0.0 && r < 0.5) {
        return Err(Error::InvalidParameter(format!("ratio {r} must lie in (0, 1/2)")));
    }
    let maps = [Similarity::scaling(r, &[0.0]), Similarity::scaling(r, &[1.0 - r])];
    ifs_attractor(&maps, generation, "cantor")
}

/// The unit interval as a cloud of `2^generation` cell midpoints.
pub fn segment(generation: u32) -> Result<PointCloud> {
    let maps = [Similarity::scaling(0.5, &[0.0]), Similarity::scaling(0.5, &[0.5])];
    ifs_attractor(&maps, generation, "segment")
}

/// The unit square as a cloud of `4^generation` cell midpoints.
pub fn unit_square(generation: u32) -> Result<PointCloud> {
    let maps: Vec<Similarity> = [[0.0, 0.0], [0.0, 0.5], [0.5, 0.0], [0.5, 0.5]]
        .iter()
        .map(|t| Similarity::scaling(0.5, t))
        .collect();
    ifs_attractor(&maps, generation, "square")
}

/// `n` equally spaced points on the Euclidean unit circle.
pub fn circle(n: usize) -> Result<PointCloud> {
    if n < 3 {
        return Err(Error::InvalidParameter("a circle cloud needs at least 3 points".into()));
    }
    let coords = (0..n)
        .flat_map(|i| {
            let t = TAU * i as f64 / n as f64;
            [t.cos(), t.sin()]
        })
        .collect();
    PointCloud::new(2, coords, 0, 2.0 * (std::f64::consts::PI / n as f64).sin(), "circle", 2)
}
