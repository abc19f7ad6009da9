//! Distributional curvature at the junction of piecewise warps.
//!
//! When the warps are continuous but only piecewise differentiable, the
//! curvature splits into three parts: a regular part (the smooth-region
//! values away from the junction, with one-sided limits at it), a jump part
//! (the difference of those limits), and a Dirac-delta part concentrated on
//! the junction hypersurface. [`DistributionalScalar`] carries all three for
//! a scalar quantity, with a product that refuses the ill-defined
//! combinations (delta times a discontinuous factor, delta times delta).
//!
//! The delta coefficients come entirely from second derivatives of the
//! warps: distributionally f'' = {f''} + [f'] delta_p, where [f'] is the
//! one-sided derivative jump. A junction is geometrically C^1 exactly when
//! every delta coefficient vanishes, which for positive warps happens
//! exactly when every [f_i'] is zero.

use thiserror::Error;

use crate::geometry::{Angles, FrameIndex, GeometryError, MultiplyWarpedSpacetime};
use crate::warpfn::{Side, WarpEvalError, WarpFunction};

/// A scalar with one-sided limits at a junction plus a Dirac coefficient
/// there. `left`/`right` are the limits from below/above; `delta` multiplies
/// the delta distribution supported on the junction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionalScalar {
    pub left: f64,
    pub right: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ProductError {
    #[error(
        "product of two delta terms is ill-defined (delta coefficients {lhs} and {rhs})"
    )]
    DeltaTimesDelta { lhs: f64, rhs: f64 },
    #[error(
        "delta term (coefficient {delta}) times a discontinuous factor \
         (jump {jump}) is ill-defined"
    )]
    DeltaTimesJump { delta: f64, jump: f64 },
}

impl DistributionalScalar {
    pub fn new(left: f64, right: f64, delta: f64) -> Self {
        DistributionalScalar { left, right, delta }
    }

    /// An ordinary scalar: equal one-sided limits, no delta part.
    pub fn classical(value: f64) -> Self {
        DistributionalScalar { left: value, right: value, delta: 0.0 }
    }

    /// Jump across the junction, right minus left.
    pub fn jump(&self) -> f64 {
        self.right - self.left
    }

    pub fn average(&self) -> f64 {
        0.5 * (self.left + self.right)
    }

    /// True when there is no delta part (the jump may still be nonzero).
    pub fn is_classical(&self) -> bool {
        self.delta == 0.0
    }

    pub fn neg(&self) -> Self {
        DistributionalScalar { left: -self.left, right: -self.right, delta: -self.delta }
    }

    pub fn add(&self, other: &Self) -> Self {
        DistributionalScalar {
            left: self.left + other.left,
            right: self.right + other.right,
            delta: self.delta + other.delta,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: f64) -> Self {
        DistributionalScalar {
            left: c * self.left,
            right: c * self.right,
            delta: c * self.delta,
        }
    }

    /// Product of two distributional scalars. The piecewise parts multiply
    /// sidewise; a delta part survives only against a factor that is
    /// continuous at the junction, sampled there. Delta times jump and delta
    /// times delta are rejected.
    pub fn try_mul(&self, other: &Self) -> Result<Self, ProductError> {
        if self.delta != 0.0 && other.delta != 0.0 {
            return Err(ProductError::DeltaTimesDelta { lhs: self.delta, rhs: other.delta });
        }
        let mut delta = 0.0;
        if self.delta != 0.0 {
            if other.jump() != 0.0 {
                return Err(ProductError::DeltaTimesJump {
                    delta: self.delta,
                    jump: other.jump(),
                });
            }
            delta += self.delta * other.left;
        }
        if other.delta != 0.0 {
            if self.jump() != 0.0 {
                return Err(ProductError::DeltaTimesJump {
                    delta: other.delta,
                    jump: self.jump(),
                });
            }
            delta += other.delta * self.left;
        }
        Ok(DistributionalScalar {
            left: self.left * other.left,
            right: self.right * other.right,
            delta,
        })
    }
}

/// Second derivative of a warp as a distribution at its junction:
/// one-sided limits of f'' plus a delta with coefficient [f'].
pub fn hessian_distributional(
    warp: &WarpFunction,
) -> Result<DistributionalScalar, WarpEvalError> {
    let p = warp.junction().ok_or(WarpEvalError::NoJunction)?;
    let l = warp.eval_jet(p, Side::Left)?;
    let r = warp.eval_jet(p, Side::Right)?;
    Ok(DistributionalScalar::new(l.d2, r.d2, r.d1 - l.d1))
}

/// Base-base Ricci component as a distribution at the junction:
/// Ric(dt,dt) = -sum_i d_i f_i''/f_i with f_i'' read distributionally.
/// Assembled through the [`DistributionalScalar`] algebra; every factor
/// multiplying a delta here is continuous, so the product is well defined.
pub fn ricci_tt_distributional(
    m: &MultiplyWarpedSpacetime,
) -> Result<DistributionalScalar, JunctionError> {
    let p = m.junction().ok_or(JunctionError::NoJunction)?;
    let mut sum = DistributionalScalar::classical(0.0);
    for (spec, warp) in m.fibers() {
        let l = warp.eval_jet(p, Side::Left)?;
        let r = warp.eval_jet(p, Side::Right)?;
        let hess = DistributionalScalar::new(l.d2, r.d2, r.d1 - l.d1);
        let recip = DistributionalScalar::new(1.0 / l.value, 1.0 / r.value, 0.0);
        let term = hess.try_mul(&recip)?.scale(spec.dim as f64);
        sum = sum.add(&term);
    }
    Ok(sum.neg())
}

/// Delta coefficient of Ric(dt,dt): -sum_i d_i [f_i']/f_i(p).
pub fn ricci_delta_tt(m: &MultiplyWarpedSpacetime) -> Result<f64, JunctionError> {
    Ok(ricci_tt_distributional(m)?.delta)
}

#[derive(Debug, Clone, Error)]
pub enum JunctionError {
    #[error("spacetime has no junction: all warps are smooth")]
    NoJunction,
    #[error(transparent)]
    Eval(#[from] WarpEvalError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Product(#[from] ProductError),
}

/// Per-fiber data at the junction.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberJunctionData {
    pub label: String,
    pub dim: usize,
    /// f_i(p); the warps are continuous, so this is side-independent up to
    /// the construction tolerance (the two-sided average is stored).
    pub warp_value: f64,
    /// Derivative jump [f_i'] = f_i'(p+) - f_i'(p-).
    pub warp_jump: f64,
    /// Jump of the shape-operator scalar f_i'/f_i, i.e. [f_i']/f_i(p).
    pub shape_jump: f64,
}

/// Delta coefficient of one diagonal Ricci entry, in both normalizations
/// (coordinate entries carry the chart factor at the report angle).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicciDeltaEntry {
    pub index: FrameIndex,
    pub coordinate: f64,
    pub orthonormal: f64,
}

/// Everything concentrated on the junction: per-fiber jumps, the delta
/// coefficients of the Ricci diagonal and of the scalar curvature, and the
/// resulting regularity class.
#[derive(Debug, Clone, PartialEq)]
pub struct JunctionReport {
    pub junction: f64,
    pub fibers: Vec<FiberJunctionData>,
    pub ricci_delta: Vec<RicciDeltaEntry>,
    /// Delta coefficient of the scalar curvature: 2 sum_i d_i [f_i']/f_i(p).
    pub scalar_delta: f64,
    /// True exactly when every delta coefficient vanishes; the metric is
    /// then C^1 across the junction and the curvature is an ordinary
    /// (locally bounded) tensor.
    pub is_c1: bool,
}

/// Analyze the junction of a spacetime whose warps declare one.
/// Returns `Ok(None)` when every warp is smooth.
pub fn analyze_junction(
    m: &MultiplyWarpedSpacetime,
    angles: &Angles,
) -> Result<Option<JunctionReport>, JunctionError> {
    let Some(p) = m.junction() else {
        return Ok(None);
    };
    let mut fibers = Vec::with_capacity(m.fibers().len());
    for (spec, warp) in m.fibers() {
        let l = warp.eval_jet(p, Side::Left)?;
        let r = warp.eval_jet(p, Side::Right)?;
        let warp_value = 0.5 * (l.value + r.value);
        let warp_jump = r.d1 - l.d1;
        fibers.push(FiberJunctionData {
            label: spec.label.clone(),
            dim: spec.dim,
            warp_value,
            warp_jump,
            shape_jump: warp_jump / warp_value,
        });
    }

    let tt_coordinate: f64 =
        -fibers.iter().map(|f| f.dim as f64 * f.shape_jump).sum::<f64>();
    let mut ricci_delta = Vec::with_capacity(m.dim());
    ricci_delta.push(RicciDeltaEntry {
        index: FrameIndex::Base,
        coordinate: tt_coordinate,
        // Division by the signed metric entry g_tt = -1.
        orthonormal: -tt_coordinate,
    });
    for (i, data) in fibers.iter().enumerate() {
        // Delta part of the fiber Ricci bracket comes from f_i f_i'' alone:
        // coefficient f_i(p) [f_i'].
        let bracket_delta = data.warp_value * data.warp_jump;
        for axis in 0..data.dim {
            ricci_delta.push(RicciDeltaEntry {
                index: FrameIndex::Fiber { fiber: i, axis },
                coordinate: bracket_delta * m.chart_factor(i, axis, angles),
                orthonormal: bracket_delta / (data.warp_value * data.warp_value),
            });
        }
    }
    let scalar_delta =
        2.0 * fibers.iter().map(|f| f.dim as f64 * f.shape_jump).sum::<f64>();
    let is_c1 = fibers.iter().all(|f| f.warp_jump == 0.0);
    Ok(Some(JunctionReport { junction: p, fibers, ricci_delta, scalar_delta, is_c1 }))
}
