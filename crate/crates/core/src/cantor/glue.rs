//! Closing `Gamma` and `-Gamma` into the unit sphere of a planar norm.
//!
//! Everything is done in support-function space. Normal angles in
//! `[0, phi_end]` come from `Gamma`, with `phi_end = 1 + theta(1)`; the
//! range `(phi_end, pi)` is covered by a chain of circular arcs of positive
//! radii running from `gamma(1)` to `-gamma(0)`; the other half of the
//! table is the antipodal copy. Because consecutive pieces share both the
//! boundary point and the normal at each joint, `h` and `h'` are continuous.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::Serialize;

use super::curve::CounterexampleCurve;
use crate::error::{Error, Result};
use crate::norms::{NormModel, Provenance, SupportTable, TableDiagnostics};
use crate::search::bisect_increasing;
use crate::vecops::{dot, unit};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GlueOptions {
    pub rows: usize,
    /// Number of circular arcs in each glue piece.
    pub arcs: usize,
    /// Smallest admissible arc radius.
    pub min_radius: f64,
    /// Negates the arc radii before validation. Only useful to exercise the
    /// failure path.
    pub flip_curvature: bool,
}

impl Default for GlueOptions {
    fn default() -> Self {
        GlueOptions {
            rows: crate::norms::DEFAULT_ROWS,
            arcs: 16,
            min_radius: 1e-3,
            flip_curvature: false,
        }
    }
}

/// Norm assembled from a counterexample arc plus diagnostics.
#[derive(Debug, Clone)]
pub struct BuiltNorm {
    pub norm: NormModel,
    /// Normal angle where `Gamma` ends and the glue starts.
    pub phi_end: f64,
    pub radii: Vec<f64>,
    /// Largest `(h, h')` disagreement between neighbouring pieces at the joints.
    pub joint_mismatch: f64,
    pub diagnostics: TableDiagnostics,
}

#[derive(Debug, Clone)]
struct ArcChain {
    start_angle: f64,
    width: f64,
    radii: Vec<f64>,
    /// Boundary point at the start of every arc.
    starts: Vec<[f64; 2]>,
}

impl ArcChain {
    fn point(&self, phi: f64) -> [f64; 2] {
        let j = (((phi - self.start_angle) / self.width).floor().max(0.0) as usize).min(self.radii.len() - 1);
        let psi = self.start_angle + j as f64 * self.width;
        let (u0, u1) = (unit(psi), unit(phi));
        let r = self.radii[j];
        [
            self.starts[j][0] + r * (u1[0] - u0[0]),
            self.starts[j][1] + r * (u1[1] - u0[1]),
        ]
    }

    fn end(&self) -> [f64; 2] {
        let j = self.radii.len() - 1;
        let psi = self.start_angle + j as f64 * self.width;
        let (u0, u1) = (unit(psi), unit(psi + self.width));
        let r = self.radii[j];
        [
            self.starts[j][0] + r * (u1[0] - u0[0]),
            self.starts[j][1] + r * (u1[1] - u0[1]),
        ]
    }
}

/// Circular arcs with normals sweeping `[a, b]` that carry the boundary
/// from `from` to `to`. Radii are the least-squares correction of the
/// best single circle, `rho = c + V^T mu`, so they vary smoothly.
fn arc_chain(a: f64, b: f64, from: [f64; 2], to: [f64; 2], arcs: usize) -> ArcChain {
    let width = (b - a) / arcs as f64;
    let chords: Vec<[f64; 2]> = (0..arcs)
        .map(|j| {
            let (u0, u1) = (unit(a + j as f64 * width), unit(a + (j + 1) as f64 * width));
            [u1[0] - u0[0], u1[1] - u0[1]]
        })
        .collect();
    let d = [to[0] - from[0], to[1] - from[1]];
    let e = chords.iter().fold([0.0, 0.0], |s, v| [s[0] + v[0], s[1] + v[1]]);
    let c = dot(&d, &e) / dot(&e, &e);
    let resid = [d[0] - c * e[0], d[1] - c * e[1]];
    // (A A^T) mu = resid
    let (mut m00, mut m01, mut m11) = (0.0, 0.0, 0.0);
    for v in &chords {
        m00 += v[0] * v[0];
        m01 += v[0] * v[1];
        m11 += v[1] * v[1];
    }
    let det = m00 * m11 - m01 * m01;
    let mu = [
        (m11 * resid[0] - m01 * resid[1]) / det,
        (m00 * resid[1] - m01 * resid[0]) / det,
    ];
    let radii: Vec<f64> = chords.iter().map(|v| c + dot(v, &mu)).collect();
    let mut starts = Vec::with_capacity(arcs);
    let mut p = from;
    for (v, r) in chords.iter().zip(&radii) {
        starts.push(p);
        p = [p[0] + r * v[0], p[1] + r * v[1]];
    }
    ArcChain {
        start_angle: a,
        width,
        radii,
        starts,
    }
}

/// Builds the support-table norm whose unit sphere contains `Gamma`.
pub fn build_norm(curve: &CounterexampleCurve, options: GlueOptions) -> Result<BuiltNorm> {
    if !curve.beta_is_injective() {
        return Err(Error::GlueFailed("tangent angle of the arc is not increasing".into()));
    }
    if options.rows < 64 || !options.rows.is_multiple_of(2) || options.arcs == 0 {
        return Err(Error::InvalidParameter(
            "glue needs an even row count >= 64 and at least one arc".into(),
        ));
    }
    let end = curve.end();
    let start = curve.start();
    let phi_end = curve.normal_angle(1.0);
    if !(phi_end > 0.0 && phi_end < FRAC_PI_2) {
        return Err(Error::GlueFailed(format!(
            "arc normal range [0, {phi_end}] leaves no room for glue"
        )));
    }
    let from = end.gamma();
    let to = {
        let g = start.gamma();
        [-g[0], -g[1]]
    };
    let mut chain = arc_chain(phi_end, PI, from, to, options.arcs);
    if options.flip_curvature {
        chain.radii.iter_mut().for_each(|r| *r = -*r);
    }
    let min_r = chain.radii.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min_r >= options.min_radius) {
        return Err(Error::GlueFailed(format!(
            "glue arc radius {min_r:e} below {:e}",
            options.min_radius
        )));
    }

    let n = options.rows;
    let half = n / 2;
    let mut h = vec![0.0; n];
    let mut dh = vec![0.0; n];
    let mut prov = vec![Provenance::Gamma; n];
    for i in 0..half {
        let phi = TAU * i as f64 / n as f64;
        let (x, p) = if phi <= phi_end {
            // parameter whose normal angle is phi
            let t = bisect_increasing(|t| curve.normal_angle(t) - phi, 0.0, 1.0, 0.0);
            (curve.point(t).gamma(), Provenance::Gamma)
        } else {
            (chain.point(phi), Provenance::Glue)
        };
        let (u, du) = (unit(phi), unit(phi + FRAC_PI_2));
        h[i] = dot(&x, &u);
        dh[i] = dot(&x, &du);
        prov[i] = p;
        h[i + half] = h[i];
        dh[i + half] = dh[i];
        prov[i + half] = match p {
            Provenance::Gamma => Provenance::NegGamma,
            _ => Provenance::NegGlue,
        };
    }

    // (h, h') from both sides of each joint
    let support = |x: [f64; 2], phi: f64| (dot(&x, &unit(phi)), dot(&x, &unit(phi + FRAC_PI_2)));
    let gamma_side = {
        let r = 1.0 - end.big_f;
        (r * end.theta.cos(), -r * end.theta.sin())
    };
    let glue_side = support(chain.point(phi_end), phi_end);
    let glue_end = support(chain.end(), PI);
    let neg_gamma_side = (1.0 - start.big_f, 0.0);
    let joint_mismatch = (gamma_side.0 - glue_side.0)
        .abs()
        .max((gamma_side.1 - glue_side.1).abs())
        .max((glue_end.0 - neg_gamma_side.0).abs())
        .max((glue_end.1 - neg_gamma_side.1).abs());

    let table = SupportTable::new(h, dh, prov).map_err(|e| Error::GlueFailed(e.to_string()))?;
    let diagnostics = table.diagnostics();
    Ok(BuiltNorm {
        norm: NormModel::support_table(table),
        phi_end,
        radii: chain.radii,
        joint_mismatch,
        diagnostics,
    })
}
