//! Tabulated support functions of planar, centrally symmetric convex bodies.
//!
//! A row `(phi, h, dh)` stores the support value `h(phi) = max <x, u(phi)>`
//! over the unit ball and its derivative. Between rows the support function
//! is the cubic Hermite interpolant of `(h, dh)`, so the boundary point with
//! outward normal `u(phi)` is `h u + h' u'` and is continuous in `phi`.

use std::f64::consts::{PI, TAU};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::search::bisect_increasing;
use crate::vecops::{cross2, polar_angle, unit};

pub const DEFAULT_ROWS: usize = 4096;

/// Maximum tolerated `|h(phi + pi) - h(phi)|`.
pub const ANTIPODAL_TOL: f64 = 1e-10;

/// Which piece of a glued boundary a table row was generated from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Gamma,
    NegGamma,
    Glue,
    NegGlue,
    Loaded,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct Row {
    phi: f64,
    h: f64,
    dh: f64,
}

#[derive(Debug, Clone)]
pub struct SupportTable {
    h: Vec<f64>,
    dh: Vec<f64>,
    provenance: Vec<Provenance>,
    step: f64,
    /// Unwrapped polar angles of the boundary points at the nodes.
    node_angle: Vec<f64>,
}

/// Diagnostics of the table invariants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableDiagnostics {
    pub rows: usize,
    pub antipodal_defect: f64,
    /// Smallest discrete radius of curvature `h + h''` over the nodes.
    pub min_curvature_radius: f64,
}

impl SupportTable {
    /// Builds a table from support values at the angles `2 pi i / N`.
    ///
    /// Fails with `NotStrictlyConvex` if the discrete convexity proxy or the
    /// antipodal symmetry is violated.
    pub fn new(h: Vec<f64>, dh: Vec<f64>, provenance: Vec<Provenance>) -> Result<Self> {
        let n = h.len();
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "support table needs an even row count >= 8, got {n}"
            )));
        }
        if dh.len() != n || provenance.len() != n {
            return Err(Error::InvalidParameter("support table columns differ in length".into()));
        }
        if h.iter().chain(&dh).any(|v| !v.is_finite()) || h.iter().any(|&v| v <= 0.0) {
            return Err(Error::NotStrictlyConvex(
                "support values must be finite and positive".into(),
            ));
        }
        let step = TAU / n as f64;
        let mut table = SupportTable {
            h,
            dh,
            provenance,
            step,
            node_angle: Vec::new(),
        };
        let diag = table.diagnostics();
        if diag.antipodal_defect > ANTIPODAL_TOL {
            return Err(Error::NotStrictlyConvex(format!(
                "table is not antipodally symmetric (defect {:e})",
                diag.antipodal_defect
            )));
        }
        if !(diag.min_curvature_radius > 0.0) {
            return Err(Error::NotStrictlyConvex(format!(
                "discrete h + h'' reaches {:e}",
                diag.min_curvature_radius
            )));
        }
        table.node_angle = table.unwrapped_node_angles()?;
        Ok(table)
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn phi(&self, i: usize) -> f64 {
        i as f64 * self.step
    }

    pub fn h_values(&self) -> &[f64] {
        &self.h
    }

    pub fn dh_values(&self) -> &[f64] {
        &self.dh
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    /// Discrete radius of curvature at node `i`.
    ///
    /// `(h[i+1] + h[i-1] - 2 cos(d) h[i]) / (2 (1 - cos d))` is the exact
    /// analogue of `h + h''` for the polygon with normals on the grid; it is
    /// positive iff that polygon has a positive edge at the node.
    pub fn curvature_radius(&self, i: usize) -> f64 {
        let n = self.len();
        let (prev, next) = (self.h[(i + n - 1) % n], self.h[(i + 1) % n]);
        let c = self.step.cos();
        (prev + next - 2.0 * c * self.h[i]) / (2.0 * (1.0 - c))
    }

    pub fn diagnostics(&self) -> TableDiagnostics {
        let n = self.len();
        let half = n / 2;
        let antipodal_defect = (0..half)
            .map(|i| {
                (self.h[i] - self.h[i + half])
                    .abs()
                    .max((self.dh[i] - self.dh[i + half]).abs())
            })
            .fold(0.0, f64::max);
        let min_curvature_radius = (0..n).map(|i| self.curvature_radius(i)).fold(f64::INFINITY, f64::min);
        TableDiagnostics {
            rows: n,
            antipodal_defect,
            min_curvature_radius,
        }
    }

    fn unwrapped_node_angles(&self) -> Result<Vec<f64>> {
        let n = self.len();
        let mut out = Vec::with_capacity(n + 1);
        let mut prev = self.boundary_point_at_node(0);
        let mut acc = polar_angle(&prev);
        if acc > PI {
            acc -= TAU;
        }
        out.push(acc);
        for i in 1..=n {
            let p = self.boundary_point_at_node(i % n);
            let turn = cross2(&prev, &p).atan2(prev[0] * p[0] + prev[1] * p[1]);
            if !(turn > 0.0) {
                return Err(Error::NotStrictlyConvex(format!(
                    "boundary points do not advance counterclockwise at row {i}"
                )));
            }
            acc += turn;
            out.push(acc);
            prev = p;
        }
        let winding = out[n] - out[0];
        if (winding - TAU).abs() > 1e-9 {
            return Err(Error::NotStrictlyConvex(format!("boundary winds {winding} radians")));
        }
        Ok(out)
    }

    fn boundary_point_at_node(&self, i: usize) -> [f64; 2] {
        let phi = self.phi(i);
        let (u, du) = (unit(phi), unit(phi + PI / 2.0));
        [
            self.h[i] * u[0] + self.dh[i] * du[0],
            self.h[i] * u[1] + self.dh[i] * du[1],
        ]
    }

    /// Interpolated `(h, h', h'')` at an arbitrary angle.
    pub fn support(&self, phi: f64) -> (f64, f64, f64) {
        let n = self.len();
        let x = phi.rem_euclid(TAU) / self.step;
        let i = (x.floor() as usize).min(n - 1);
        let s = x - i as f64;
        let j = (i + 1) % n;
        let d = self.step;
        let (h0, h1) = (self.h[i], self.h[j]);
        let (m0, m1) = (self.dh[i] * d, self.dh[j] * d);
        let s2 = s * s;
        let s3 = s2 * s;
        let val =
            (2.0 * s3 - 3.0 * s2 + 1.0) * h0 + (s3 - 2.0 * s2 + s) * m0 + (-2.0 * s3 + 3.0 * s2) * h1 + (s3 - s2) * m1;
        let d1 = (6.0 * s2 - 6.0 * s) * h0
            + (3.0 * s2 - 4.0 * s + 1.0) * m0
            + (-6.0 * s2 + 6.0 * s) * h1
            + (3.0 * s2 - 2.0 * s) * m1;
        let d2 = (12.0 * s - 6.0) * h0 + (6.0 * s - 4.0) * m0 + (-12.0 * s + 6.0) * h1 + (6.0 * s - 2.0) * m1;
        (val, d1 / d, d2 / (d * d))
    }

    /// Boundary point of the unit ball whose outward normal is `u(phi)`.
    pub fn boundary_point(&self, phi: f64) -> [f64; 2] {
        let (h, dh, _) = self.support(phi);
        let (u, du) = (unit(phi), unit(phi + PI / 2.0));
        [h * u[0] + dh * du[0], h * u[1] + dh * du[1]]
    }

    /// Normal angle `phi` of the boundary point on the ray through `x`.
    ///
    /// Points in the lower half plane are reflected through the origin so
    /// that the result is exactly antipodally symmetric.
    pub(crate) fn normal_angle_of(&self, x: &[f64]) -> (f64, bool) {
        let flip = x[1] < 0.0 || (x[1] == 0.0 && x[0] < 0.0);
        let y = if flip { [-x[0], -x[1]] } else { [x[0], x[1]] };
        let n = self.len();
        let mut target = polar_angle(&y);
        // node_angle is unwrapped starting near 0; bring target into range.
        while target < self.node_angle[0] {
            target += TAU;
        }
        while target >= self.node_angle[n] {
            target -= TAU;
        }
        let i = self
            .node_angle
            .partition_point(|&a| a <= target)
            .saturating_sub(1)
            .min(n - 1);
        let (lo, hi) = (self.phi(i), self.phi(i) + self.step);
        let phi = bisect_increasing(
            |phi| {
                let p = self.boundary_point(phi);
                cross2(&y, &p)
            },
            lo,
            hi,
            0.0,
        );
        (phi, flip)
    }

    /// Writes the table as CSV with header `phi,h,dh`.
    pub fn write_csv<W: Write>(&self, out: W, header: Option<&str>, fmt: impl Fn(f64) -> String) -> Result<()> {
        let mut out = out;
        if let Some(line) = header {
            writeln!(out, "{line}").map_err(|e| Error::Io(e.to_string()))?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["phi", "h", "dh"])
            .map_err(|e| Error::Io(e.to_string()))?;
        for i in 0..self.len() {
            w.write_record([fmt(self.phi(i)), fmt(self.h[i]), fmt(self.dh[i])])
                .map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::Io(e.to_string()))
    }

    /// Reads a table written by [`SupportTable::write_csv`]; `#` lines are skipped.
    ///
    /// The angles must be uniform on `[0, 2 pi)`.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
        let mut h = Vec::new();
        let mut dh = Vec::new();
        let mut phis = Vec::new();
        for rec in rdr.deserialize::<Row>() {
            let row = rec.map_err(|e| Error::Io(e.to_string()))?;
            phis.push(row.phi);
            h.push(row.h);
            dh.push(row.dh);
        }
        let n = phis.len();
        if n == 0 {
            return Err(Error::Io("support table is empty".into()));
        }
        let step = TAU / n as f64;
        for (i, phi) in phis.iter().enumerate() {
            if (phi - i as f64 * step).abs() > 1e-9 {
                return Err(Error::Io(format!("row {i}: angle {phi} is not on the uniform grid")));
            }
        }
        let prov = vec![Provenance::Loaded; n];
        SupportTable::new(h, dh, prov)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ellipse_table(a: f64, b: f64, n: usize) -> SupportTable {
        // h(phi) = sqrt(a^2 cos^2 + b^2 sin^2)
        let mut h = Vec::new();
        let mut dh = Vec::new();
        for i in 0..n {
            let phi = TAU * i as f64 / n as f64;
            let (c, s) = (phi.cos(), phi.sin());
            let v = (a * a * c * c + b * b * s * s).sqrt();
            h.push(v);
            dh.push((b * b - a * a) * s * c / v);
        }
        SupportTable::new(h, dh, vec![Provenance::Loaded; n]).unwrap()
    }

    #[test]
    fn ellipse_boundary_points_lie_on_ellipse() {
        let t = ellipse_table(2.0, 1.0, 512);
        for k in 0..97 {
            let phi = 0.0123 + k as f64 * 0.0651;
            let p = t.boundary_point(phi);
            let r = (p[0] / 2.0).powi(2) + p[1].powi(2);
            assert!((r - 1.0).abs() < 1e-6, "phi={phi} r={r}");
        }
    }

    #[test]
    fn rejects_non_convex_and_asymmetric() {
        let n = 64;
        let mut h = vec![1.0; n];
        let dh = vec![0.0; n];
        h[5] = 1.2;
        h[5 + n / 2] = 1.2;
        assert!(matches!(
            SupportTable::new(h.clone(), dh.clone(), vec![Provenance::Loaded; n]),
            Err(Error::NotStrictlyConvex(_))
        ));
        let mut h = vec![1.0; n];
        h[3] = 1.0 + 1e-6;
        assert!(matches!(
            SupportTable::new(h, dh, vec![Provenance::Loaded; n]),
            Err(Error::NotStrictlyConvex(_))
        ));
    }

    #[test]
    fn csv_round_trip_preserves_rows() {
        let t = ellipse_table(1.5, 1.0, 64);
        let mut buf = Vec::new();
        t.write_csv(&mut buf, Some("# test"), |v| format!("{v:.17e}")).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.lines().nth(1).unwrap() == "phi,h,dh");
        let back = SupportTable::read_csv(&buf[..]).unwrap();
        assert_eq!(back.h_values(), t.h_values());
        assert_eq!(back.dh_values(), t.dh_values());
    }

    #[test]
    fn rejects_non_uniform_angles() {
        let csv = "phi,h,dh\n0,1,0\n0.5,1,0\n";
        assert!(matches!(SupportTable::read_csv(csv.as_bytes()), Err(Error::Io(_))));
    }
}
