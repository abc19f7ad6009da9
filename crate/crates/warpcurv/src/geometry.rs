//! Smooth-region curvature of multiply warped product spacetimes.
//!
//! The spacetime is an open interval with metric -dt^2, warped against a list
//! of constant-curvature Riemannian fibers: g = -dt^2 + sum_i f_i(t)^2 g_i.
//! All curvature here is evaluated off the junction (one side of it when the
//! warps are merely continuous); the distributional terms concentrated on the
//! junction live in the `junction` module.
//!
//! Conventions. Coordinate components follow R^r_{s m n} =
//! d_m G^r_{n s} - d_n G^r_{m s} + G^r_{m l} G^l_{n s} - G^r_{n l} G^l_{m s}
//! with Ric_{s n} = R^m_{s m n}; for the base direction this yields
//! Ric(dt, dt) = -sum_i d_i f_i''/f_i. "Orthonormal" entries are coordinate
//! entries divided by the signed diagonal metric entry, i.e. mixed components
//! R^m_m, so the base entry flips sign relative to the coordinate one.
//!
//! Fibers are realized in concrete charts: Cartesian coordinates for flat
//! fibers of any dimension, and for curved fibers (necessarily 2-dimensional
//! here) a polar chart scaled to sectional curvature k: (1/|k|)(dtheta^2 +
//! sin^2(theta) dphi^2) when k > 0, with sinh in place of sin when k < 0.
//! Components along the second polar axis carry the chart factor evaluated at
//! an explicit angle; reports default to theta = pi/2.

use thiserror::Error;

use crate::jet::Jet2;
use crate::warpfn::{Interval, Side, WarpEvalError, WarpFunction};

/// Coordinate direction in the product: the base, or one axis of one fiber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrameIndex {
    Base,
    Fiber { fiber: usize, axis: usize },
}

/// Geometric data of one fiber: a display label, its dimension, and its
/// constant sectional curvature.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberSpec {
    pub label: String,
    pub dim: usize,
    pub curvature: f64,
}

impl FiberSpec {
    pub fn new(
        label: impl Into<String>,
        dim: usize,
        curvature: f64,
    ) -> Result<Self, GeometryError> {
        let label = label.into();
        if dim == 0 {
            return Err(GeometryError::ZeroDimFiber { label });
        }
        if !curvature.is_finite() {
            return Err(GeometryError::BadCurvature { label, curvature });
        }
        if curvature != 0.0 && dim != 2 {
            return Err(GeometryError::UnsupportedChart { label, dim, curvature });
        }
        Ok(FiberSpec { label, dim, curvature })
    }
}

/// Angle at which chart-dependent components are evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angles {
    pub theta: f64,
}

impl Default for Angles {
    fn default() -> Self {
        Angles { theta: std::f64::consts::FRAC_PI_2 }
    }
}

#[derive(Debug, Clone, Error)]
pub enum GeometryError {
    #[error("spacetime needs at least one fiber")]
    NoFibers,
    #[error("fiber {label:?} has dimension 0")]
    ZeroDimFiber { label: String },
    #[error("fiber {label:?} has non-finite curvature {curvature}")]
    BadCurvature { label: String, curvature: f64 },
    #[error(
        "fiber {label:?}: no chart for dimension {dim} with curvature {curvature}; \
         curved fibers must be 2-dimensional"
    )]
    UnsupportedChart { label: String, dim: usize, curvature: f64 },
    #[error("fiber {label:?}: warp domain differs from the base interval")]
    DomainMismatch { label: String },
    #[error("piecewise warps declare different junctions ({a} and {b})")]
    MixedJunctions { a: f64, b: f64 },
    #[error("no fiber {fiber} or axis out of range in {index:?}")]
    BadIndex { fiber: usize, index: FrameIndex },
    #[error("chart is degenerate at theta = {theta} (polar axis)")]
    DegenerateChartPoint { theta: f64 },
    #[error(transparent)]
    Eval(#[from] WarpEvalError),
}

/// A multiply warped product spacetime: open base interval with metric
/// -dt^2, and fibers scaled by positive warp functions of t.
#[derive(Debug, Clone)]
pub struct MultiplyWarpedSpacetime {
    base: Interval,
    fibers: Vec<(FiberSpec, WarpFunction)>,
    junction: Option<f64>,
}

impl MultiplyWarpedSpacetime {
    pub fn new(
        base: Interval,
        fibers: Vec<(FiberSpec, WarpFunction)>,
    ) -> Result<Self, GeometryError> {
        if fibers.is_empty() {
            return Err(GeometryError::NoFibers);
        }
        let mut junction = None;
        for (spec, warp) in &fibers {
            if warp.domain() != base {
                return Err(GeometryError::DomainMismatch { label: spec.label.clone() });
            }
            if let Some(p) = warp.junction() {
                match junction {
                    None => junction = Some(p),
                    Some(q) if q == p => {}
                    Some(q) => return Err(GeometryError::MixedJunctions { a: q, b: p }),
                }
            }
        }
        Ok(MultiplyWarpedSpacetime { base, fibers, junction })
    }

    pub fn base(&self) -> Interval {
        self.base
    }

    pub fn fibers(&self) -> &[(FiberSpec, WarpFunction)] {
        &self.fibers
    }

    /// Junction shared by the piecewise warps, if any declares one.
    pub fn junction(&self) -> Option<f64> {
        self.junction
    }

    /// Total spacetime dimension: 1 + sum of fiber dimensions.
    pub fn dim(&self) -> usize {
        1 + self.fibers.iter().map(|(s, _)| s.dim).sum::<usize>()
    }

    /// Position of `index` in the flat coordinate ordering
    /// (base, fiber 0 axes, fiber 1 axes, ...).
    pub fn linear_index(&self, index: FrameIndex) -> Result<usize, GeometryError> {
        match index {
            FrameIndex::Base => Ok(0),
            FrameIndex::Fiber { fiber, axis } => {
                let spec = self
                    .fibers
                    .get(fiber)
                    .map(|(s, _)| s)
                    .ok_or(GeometryError::BadIndex { fiber, index })?;
                if axis >= spec.dim {
                    return Err(GeometryError::BadIndex { fiber, index });
                }
                let before: usize = self.fibers[..fiber].iter().map(|(s, _)| s.dim).sum();
                Ok(1 + before + axis)
            }
        }
    }

    /// Inverse of [`linear_index`].
    pub fn frame_index(&self, linear: usize) -> Option<FrameIndex> {
        if linear == 0 {
            return Some(FrameIndex::Base);
        }
        let mut rest = linear - 1;
        for (fiber, (spec, _)) in self.fibers.iter().enumerate() {
            if rest < spec.dim {
                return Some(FrameIndex::Fiber { fiber, axis: rest });
            }
            rest -= spec.dim;
        }
        None
    }

    /// All warp jets at (t, side), in fiber order.
    pub fn warp_jets(&self, t: f64, side: Side) -> Result<Vec<Jet2>, GeometryError> {
        self.fibers
            .iter()
            .map(|(_, w)| w.eval_jet(t, side).map_err(GeometryError::from))
            .collect()
    }

    /// Chart metric factor of one fiber axis (the diagonal entry of the fiber
    /// coordinate metric, before warping).
    pub(crate) fn chart_factor(&self, fiber: usize, axis: usize, angles: &Angles) -> f64 {
        let spec = &self.fibers[fiber].0;
        let k = spec.curvature;
        if k == 0.0 {
            1.0
        } else {
            let scale = 1.0 / k.abs();
            if axis == 0 {
                scale
            } else if k > 0.0 {
                scale * angles.theta.sin().powi(2)
            } else {
                scale * angles.theta.sinh().powi(2)
            }
        }
    }

    /// Signed diagonal metric entries at (t, side): -1 for the base, then
    /// f_i^2 times the chart factor for each fiber axis.
    pub fn metric_diag(
        &self,
        t: f64,
        side: Side,
        angles: &Angles,
    ) -> Result<Vec<f64>, GeometryError> {
        let jets = self.warp_jets(t, side)?;
        let mut diag = Vec::with_capacity(self.dim());
        diag.push(-1.0);
        for (i, (spec, _)) in self.fibers.iter().enumerate() {
            let f2 = jets[i].value * jets[i].value;
            for axis in 0..spec.dim {
                diag.push(f2 * self.chart_factor(i, axis, angles));
            }
        }
        Ok(diag)
    }

    /// Connection coefficient coupling the base to fiber `i`: f_i'/f_i.
    /// `nabla_dt V = (f_i'/f_i) V` for V tangent to fiber i.
    pub fn conn_base_fiber(&self, i: usize, t: f64, side: Side) -> Result<f64, GeometryError> {
        let jet = self.fiber_jet(i, t, side)?;
        Ok(jet.d1 / jet.value)
    }

    /// Shape-operator scalar of the fiber-i leaves with respect to the base
    /// normal: numerically equal to f_i'/f_i per unit fiber direction.
    pub fn second_fundamental_scalar(
        &self,
        i: usize,
        t: f64,
        side: Side,
    ) -> Result<f64, GeometryError> {
        self.conn_base_fiber(i, t, side)
    }

    /// Second derivative f_i'' of the warp of fiber `i`: the base-base
    /// Hessian coefficient of f_i in the smooth region.
    pub fn hessian_coeff(&self, i: usize, t: f64, side: Side) -> Result<f64, GeometryError> {
        Ok(self.fiber_jet(i, t, side)?.d2)
    }

    fn fiber_jet(&self, i: usize, t: f64, side: Side) -> Result<Jet2, GeometryError> {
        let (_, warp) = self
            .fibers
            .get(i)
            .ok_or(GeometryError::BadIndex { fiber: i, index: FrameIndex::Fiber { fiber: i, axis: 0 } })?;
        Ok(warp.eval_jet(t, side)?)
    }

    /// The bracket multiplying the fiber-i coordinate metric in the Ricci
    /// diagonal: k_i(d_i - 1) + f_i f_i'' + (d_i - 1) f_i'^2
    /// + f_i f_i' sum_{j != i} d_j f_j'/f_j.
    fn ricci_fiber_bracket(&self, i: usize, jets: &[Jet2]) -> f64 {
        let (spec, _) = &self.fibers[i];
        let d = spec.dim as f64;
        let f = jets[i];
        let mut cross = 0.0;
        for (j, (other, _)) in self.fibers.iter().enumerate() {
            if j != i {
                cross += other.dim as f64 * jets[j].d1 / jets[j].value;
            }
        }
        spec.curvature * (d - 1.0)
            + f.value * f.d2
            + (d - 1.0) * f.d1 * f.d1
            + f.value * f.d1 * cross
    }

    fn ricci_tt(&self, jets: &[Jet2]) -> f64 {
        let mut sum = 0.0;
        for (i, (spec, _)) in self.fibers.iter().enumerate() {
            sum += spec.dim as f64 * jets[i].d2 / jets[i].value;
        }
        -sum
    }

    /// All nonzero coordinate-basis Ricci components at (t, side); these are
    /// exactly the diagonal entries. Every mixed base-fiber and fiber-fiber
    /// pair vanishes identically.
    pub fn ricci_components(
        &self,
        t: f64,
        side: Side,
        angles: &Angles,
    ) -> Result<Vec<RicciEntry>, GeometryError> {
        let jets = self.warp_jets(t, side)?;
        let mut out = Vec::with_capacity(self.dim());
        let tt = self.ricci_tt(&jets);
        out.push(RicciEntry {
            index: FrameIndex::Base,
            coordinate: tt,
            // Division by the signed metric entry g_tt = -1.
            orthonormal: -tt,
        });
        for (i, (spec, _)) in self.fibers.iter().enumerate() {
            let bracket = self.ricci_fiber_bracket(i, &jets);
            let f2 = jets[i].value * jets[i].value;
            for axis in 0..spec.dim {
                out.push(RicciEntry {
                    index: FrameIndex::Fiber { fiber: i, axis },
                    coordinate: bracket * self.chart_factor(i, axis, angles),
                    orthonormal: bracket / f2,
                });
            }
        }
        Ok(out)
    }

    /// Scalar curvature at (t, side); independent of the chart angle.
    pub fn scalar_curvature(&self, t: f64, side: Side) -> Result<f64, GeometryError> {
        let jets = self.warp_jets(t, side)?;
        let mut s = -self.ricci_tt(&jets);
        for (i, (spec, _)) in self.fibers.iter().enumerate() {
            let f2 = jets[i].value * jets[i].value;
            s += spec.dim as f64 * self.ricci_fiber_bracket(i, &jets) / f2;
        }
        Ok(s)
    }

    /// Coordinate Riemann component R^rho_{sigma mu nu} at (t, side),
    /// assembled from the block case analysis:
    /// base-fiber blocks carry f_i''-type terms, distinct-fiber blocks carry
    /// f_i'f_j'-type terms, single-fiber blocks carry (k_i + f_i'^2)-type
    /// terms, and every other index pattern vanishes.
    pub fn riemann_component(
        &self,
        idx: [FrameIndex; 4],
        t: f64,
        side: Side,
        angles: &Angles,
    ) -> Result<f64, GeometryError> {
        for &index in &idx {
            self.linear_index(index)?;
        }
        let jets = self.warp_jets(t, side)?;
        let lowered = self.riemann_lowered(idx, &jets, angles);
        let diag = {
            // Signed metric entry of the first slot, for raising.
            match idx[0] {
                FrameIndex::Base => -1.0,
                FrameIndex::Fiber { fiber, axis } => {
                    let f = jets[fiber].value;
                    f * f * self.chart_factor(fiber, axis, angles)
                }
            }
        };
        if diag == 0.0 {
            return Err(GeometryError::DegenerateChartPoint { theta: angles.theta });
        }
        Ok(lowered / diag)
    }

    /// Fully lowered Riemann component R_{rho sigma mu nu}.
    fn riemann_lowered(&self, idx: [FrameIndex; 4], jets: &[Jet2], angles: &Angles) -> f64 {
        let block = |ix: FrameIndex| match ix {
            FrameIndex::Base => None,
            FrameIndex::Fiber { fiber, .. } => Some(fiber),
        };
        let axis_of = |ix: FrameIndex| match ix {
            FrameIndex::Base => 0,
            FrameIndex::Fiber { axis, .. } => axis,
        };
        let mut slots = idx;
        let mut sign = 1.0;
        let base_count = slots.iter().filter(|&&s| block(s).is_none()).count();

        // Diagonal fiber chart: (g_i)_{ab} = 0 unless a == b.
        let pair_factor = |fiber: usize, a: usize, b: usize| -> f64 {
            if a == b {
                self.chart_factor(fiber, a, angles)
            } else {
                0.0
            }
        };

        match base_count {
            2 => {
                // Nonzero only with one base index in each antisymmetric pair
                // and both fiber indices in the same fiber.
                let first_pair_bases =
                    slots[..2].iter().filter(|&&s| block(s).is_none()).count();
                if first_pair_bases != 1 {
                    return 0.0;
                }
                if block(slots[0]).is_some() {
                    slots.swap(0, 1);
                    sign = -sign;
                }
                if block(slots[2]).is_some() {
                    slots.swap(2, 3);
                    sign = -sign;
                }
                let (i, j) = (block(slots[1]).unwrap(), block(slots[3]).unwrap());
                if i != j {
                    return 0.0;
                }
                let f = jets[i];
                sign * -(f.value * f.d2)
                    * pair_factor(i, axis_of(slots[1]), axis_of(slots[3]))
            }
            0 => {
                let b: Vec<usize> = slots.iter().map(|&s| block(s).unwrap()).collect();
                if b.iter().all(|&x| x == b[0]) {
                    // All four in one constant-curvature fiber.
                    let i = b[0];
                    let f = jets[i];
                    let sectional = f.value * f.value
                        * (self.fibers[i].0.curvature + f.d1 * f.d1);
                    let (a0, a1, a2, a3) = (
                        axis_of(slots[0]),
                        axis_of(slots[1]),
                        axis_of(slots[2]),
                        axis_of(slots[3]),
                    );
                    return sectional
                        * (pair_factor(i, a0, a2) * pair_factor(i, a1, a3)
                            - pair_factor(i, a0, a3) * pair_factor(i, a1, a2));
                }
                // Exactly two fibers, two indices each, one of each per pair;
                // a pair living inside a single fiber gives zero.
                let mut counts = std::collections::HashMap::new();
                for &x in &b {
                    *counts.entry(x).or_insert(0usize) += 1;
                }
                if counts.len() != 2 || counts.values().any(|&c| c != 2) {
                    return 0.0;
                }
                if b[0] == b[1] {
                    return 0.0;
                }
                if b[2] != b[0] {
                    slots.swap(2, 3);
                    sign = -sign;
                }
                let i = block(slots[0]).unwrap();
                let j = block(slots[1]).unwrap();
                debug_assert_eq!(block(slots[2]), Some(i));
                debug_assert_eq!(block(slots[3]), Some(j));
                let (fi, fj) = (jets[i], jets[j]);
                sign * fi.value * fi.d1 * fj.value * fj.d1
                    * pair_factor(i, axis_of(slots[0]), axis_of(slots[2]))
                    * pair_factor(j, axis_of(slots[1]), axis_of(slots[3]))
            }
            _ => 0.0,
        }
    }
}

/// Diagonal Ricci entry in both normalizations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicciEntry {
    pub index: FrameIndex,
    pub coordinate: f64,
    pub orthonormal: f64,
}

/// Closed-form Ricci diagonal of the 4-dimensional double warped product
/// with a line fiber and a unit-sphere fiber, in coordinate order
/// (base, line, theta, phi). Kept as literal formulas, independent of the
/// general assembly, so the two routes can check each other.
pub fn ricci_diag_line_sphere(f1: Jet2, f2: Jet2, theta: f64) -> [f64; 4] {
    let r11 = -f1.d2 / f1.value - 2.0 * f2.d2 / f2.value;
    let r22 = f1.value * f1.d2 + 2.0 * f1.value * f1.d1 * f2.d1 / f2.value;
    let r33 =
        f1.d1 * f2.value * f2.d1 / f1.value + f2.d1 * f2.d1 + f2.value * f2.d2 + 1.0;
    let r44 = r33 * theta.sin().powi(2);
    [r11, r22, r33, r44]
}
