use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::{norm_projector, LinearProjector};
use crate::error::{Error, Result};
use crate::norms::{HyperplaneNormal, NormModel};
use crate::vecops::unit;

type GMap = Arc<dyn Fn(&HyperplaneNormal) -> HyperplaneNormal + Send + Sync>;
type AngleFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Grid used to validate an angle function at construction.
const ANGLE_CHECK_GRID: usize = 720;

/// Smallest distance of a splitting angle from `0` and `pi`.
const SPLITTING_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FamilyProvenance {
    FromNorm,
    FromGmap,
    AngleFamily,
}

#[derive(Clone)]
enum Rule {
    Norm(NormModel),
    Gmap(GMap),
    Angle(AngleFn),
}

/// A rule assigning to each hyperplane `V` a linear projection `P_V`.
#[derive(Clone)]
pub struct ProjectionFamily {
    rule: Rule,
}

impl fmt::Debug for ProjectionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProjectionFamily")
            .field("provenance", &self.provenance())
            .finish()
    }
}

impl ProjectionFamily {
    /// Closest-point projections of a strictly convex norm.
    pub fn from_norm(norm: NormModel) -> Self {
        ProjectionFamily { rule: Rule::Norm(norm) }
    }

    pub fn provenance(&self) -> FamilyProvenance {
        match self.rule {
            Rule::Norm(_) => FamilyProvenance::FromNorm,
            Rule::Gmap(_) => FamilyProvenance::FromGmap,
            Rule::Angle(_) => FamilyProvenance::AngleFamily,
        }
    }

    /// The projection labelled by `V`. For a family built from a map `g`
    /// this is the orthogonal projection onto `g(V)`.
    pub fn projector(&self, v: &HyperplaneNormal) -> Result<LinearProjector> {
        match &self.rule {
            Rule::Norm(norm) => norm_projector(norm, v),
            Rule::Gmap(g) => {
                let target = g(v);
                let n = target.w().to_vec();
                LinearProjector::new(target, &n)
            }
            Rule::Angle(alpha) => {
                if v.dim() != 2 {
                    return Err(Error::DimensionMismatch {
                        expected: 2,
                        got: v.dim(),
                    });
                }
                let line = v.line_angle();
                let a = alpha(line);
                check_splitting(a)?;
                LinearProjector::new(v.clone(), &unit(line + a))
            }
        }
    }
}

/// The hyperplane `(ker P_V)^perp`, returned through its canonical normal.
pub fn associated_g(family: &ProjectionFamily, v: &HyperplaneNormal) -> Result<HyperplaneNormal> {
    let p = family.projector(v)?;
    HyperplaneNormal::new(p.kernel_dir())
}

/// The family `P_V = P^eucl_{g(V)}`.
pub fn family_from_gmap(
    gmap: impl Fn(&HyperplaneNormal) -> HyperplaneNormal + Send + Sync + 'static,
) -> ProjectionFamily {
    ProjectionFamily {
        rule: Rule::Gmap(Arc::new(gmap)),
    }
}

/// Planar family projecting onto each line `L` along the line that makes
/// the counterclockwise angle `alpha(L)` with `L`. The function receives the
/// direction angle of `L` in `[0, pi)`.
pub fn angle_family(alpha: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<ProjectionFamily> {
    for i in 0..ANGLE_CHECK_GRID {
        check_splitting(alpha(PI * i as f64 / ANGLE_CHECK_GRID as f64))?;
    }
    Ok(ProjectionFamily {
        rule: Rule::Angle(Arc::new(alpha)),
    })
}

fn check_splitting(a: f64) -> Result<()> {
    if !(a > SPLITTING_TOL && a < PI - SPLITTING_TOL) {
        return Err(Error::DegenerateSplitting(a));
    }
    Ok(())
}
