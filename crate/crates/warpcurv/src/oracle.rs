//! Independent curvature verification by finite differences.
//!
//! This module never touches the closed-form curvature formulas or the
//! derivative (jet) data of the warps. It samples metric *values* on a
//! stencil around a point, differentiates them numerically (central
//! differences with one optional Richardson extrapolation), and feeds the
//! results through the generic coordinate formulas for Christoffel symbols,
//! the Riemann tensor, and the Ricci tensor. Agreement with the analytic
//! path is then a genuine two-route check.
//!
//! Step-size tradeoff: with Richardson extrapolation the truncation error
//! of the second derivatives scales like h^4 while rounding error scales
//! like eps/h^2, so the usable window is roughly h in [1e-3, 1e-2] for
//! metrics with O(1) entries. The default step sits in that window; pushing
//! h much below 1e-4 makes the h^-2 rounding amplification dominate and the
//! comparison meaningless.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::geometry::{Angles, FrameIndex, GeometryError, MultiplyWarpedSpacetime};
use crate::warpfn::Side;

const POLE_MARGIN: f64 = 1e-6;

/// Step control for the finite-difference stencils.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    /// Half-width of the widest stencil; every sampled point lies within
    /// `h` of the evaluation point along each axis.
    pub h: f64,
    /// Apply one Richardson extrapolation step (h and h/2 stencils).
    pub richardson: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { h: 2e-3, richardson: true }
    }
}

#[derive(Debug, Clone, Error)]
pub enum OracleError {
    #[error("step h must be positive and finite, got {h}")]
    BadStep { h: f64 },
    #[error(
        "finite-difference stencil of half-width {h} at t = {t} leaves the domain ({a}, {b})"
    )]
    StencilOutsideDomain { t: f64, h: f64, a: f64, b: f64 },
    #[error(
        "stencil of half-width {h} at t = {t} straddles the junction at {p}; \
         move the point or shrink the step"
    )]
    StencilCrossesJunction { t: f64, h: f64, p: f64 },
    #[error(
        "theta = {theta} is within {margin} (plus the stencil width) of a chart \
         pole of fiber {label:?}"
    )]
    NearPole { theta: f64, margin: f64, label: String },
    #[error("metric is numerically singular at the evaluation point")]
    SingularMetric,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Metric data assembled at one point: the value, its inverse, and all
/// first and second coordinate derivatives, every derivative obtained by
/// finite differences of metric values.
#[derive(Debug, Clone)]
pub struct MetricAtPoint {
    /// Full coordinates (t, then fiber coordinates in linear order).
    pub point: Vec<f64>,
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    /// dg[k] = d g / d x^k.
    pub dg: Vec<DMatrix<f64>>,
    /// ddg[k][l] = d^2 g / (d x^k d x^l); symmetric in (k, l).
    pub ddg: Vec<Vec<DMatrix<f64>>>,
}

impl MetricAtPoint {
    pub fn dim(&self) -> usize {
        self.point.len()
    }
}

/// Rank-3 array of Christoffel symbols, indexed (upper, lower, lower).
#[derive(Debug, Clone)]
pub struct Tensor3 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    fn zeros(n: usize) -> Self {
        Tensor3 { n, data: vec![0.0; n * n * n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[(a * self.n + b) * self.n + c]
    }

    fn set(&mut self, a: usize, b: usize, c: usize, v: f64) {
        self.data[(a * self.n + b) * self.n + c] = v;
    }
}

/// Rank-4 array for the mixed Riemann tensor R^a_{b c d}.
#[derive(Debug, Clone)]
pub struct Tensor4 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    fn zeros(n: usize) -> Self {
        Tensor4 { n, data: vec![0.0; n * n * n * n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.data[((a * self.n + b) * self.n + c) * self.n + d]
    }

    fn set(&mut self, a: usize, b: usize, c: usize, d: usize, v: f64) {
        self.data[((a * self.n + b) * self.n + c) * self.n + d] = v;
    }
}

/// Metric value at explicit coordinates, assembled from warp values and
/// chart formulas only; no derivative information enters here.
fn metric_matrix(
    m: &MultiplyWarpedSpacetime,
    coords: &[f64],
) -> Result<DMatrix<f64>, GeometryError> {
    let t = coords[0];
    let n = m.dim();
    let mut g = DMatrix::zeros(n, n);
    g[(0, 0)] = -1.0;
    let mut li = 1;
    for (spec, warp) in m.fibers() {
        let f = warp.eval_jet(t, Side::Auto)?.value;
        let f2 = f * f;
        let k = spec.curvature;
        // The chart angle of a curved fiber is its first-axis coordinate.
        let first = li;
        for axis in 0..spec.dim {
            let factor = if k == 0.0 {
                1.0
            } else {
                let scale = 1.0 / k.abs();
                if axis == 0 {
                    scale
                } else {
                    let theta = coords[first];
                    if k > 0.0 {
                        scale * theta.sin().powi(2)
                    } else {
                        scale * theta.sinh().powi(2)
                    }
                }
            };
            g[(li, li)] = f2 * factor;
            li += 1;
        }
    }
    Ok(g)
}

/// Sample the metric around (t, angles) and build all derivatives needed
/// for curvature. Fails when the stencil would leave the domain, straddle
/// the junction, or probe a degenerate chart pole.
pub fn assemble_metric(
    m: &MultiplyWarpedSpacetime,
    t: f64,
    angles: &Angles,
    opts: &OracleOptions,
) -> Result<MetricAtPoint, OracleError> {
    let h = opts.h;
    if !(h > 0.0 && h.is_finite()) {
        return Err(OracleError::BadStep { h });
    }
    let base = m.base();
    if !(t - h > base.a && t + h < base.b) {
        return Err(OracleError::StencilOutsideDomain { t, h, a: base.a, b: base.b });
    }
    if let Some(p) = m.junction() {
        if (p - t).abs() <= h {
            return Err(OracleError::StencilCrossesJunction { t, h, p });
        }
    }

    let n = m.dim();
    let mut coords = vec![0.0; n];
    coords[0] = t;
    for (i, (spec, _)) in m.fibers().iter().enumerate() {
        if spec.curvature != 0.0 {
            let theta = angles.theta;
            let li = m.linear_index(FrameIndex::Fiber { fiber: i, axis: 0 })?;
            coords[li] = theta;
            let lo_ok = theta - h > POLE_MARGIN;
            let hi_ok = spec.curvature < 0.0 || theta + h < std::f64::consts::PI - POLE_MARGIN;
            if !(lo_ok && hi_ok) {
                return Err(OracleError::NearPole {
                    theta,
                    margin: POLE_MARGIN,
                    label: spec.label.clone(),
                });
            }
        }
    }

    let eval = |k: usize, dk: f64, l: usize, dl: f64| -> Result<DMatrix<f64>, OracleError> {
        let mut c = coords.clone();
        c[k] += dk;
        c[l] += dl;
        Ok(metric_matrix(m, &c)?)
    };

    let g = metric_matrix(m, &coords)?;
    let g_inv = g.clone().try_inverse().ok_or(OracleError::SingularMetric)?;
    if g_inv.iter().any(|v| !v.is_finite()) {
        return Err(OracleError::SingularMetric);
    }

    let mut dg = vec![DMatrix::zeros(n, n); n];
    let mut ddg = vec![vec![DMatrix::zeros(n, n); n]; n];

    for k in 0..n {
        let first = |hh: f64| -> Result<DMatrix<f64>, OracleError> {
            Ok((eval(k, hh, k, 0.0)? - eval(k, -hh, k, 0.0)?) / (2.0 * hh))
        };
        dg[k] = if opts.richardson {
            (first(0.5 * h)? * 4.0 - first(h)?) / 3.0
        } else {
            first(h)?
        };

        let second = |hh: f64| -> Result<DMatrix<f64>, OracleError> {
            Ok((eval(k, hh, k, 0.0)? + eval(k, -hh, k, 0.0)? - &g * 2.0) / (hh * hh))
        };
        ddg[k][k] = if opts.richardson {
            (second(0.5 * h)? * 4.0 - second(h)?) / 3.0
        } else {
            second(h)?
        };
    }

    for k in 0..n {
        for l in (k + 1)..n {
            let cross = |hh: f64| -> Result<DMatrix<f64>, OracleError> {
                Ok((eval(k, hh, l, hh)? - eval(k, hh, l, -hh)? - eval(k, -hh, l, hh)?
                    + eval(k, -hh, l, -hh)?)
                    / (4.0 * hh * hh))
            };
            let mixed = if opts.richardson {
                (cross(0.5 * h)? * 4.0 - cross(h)?) / 3.0
            } else {
                cross(h)?
            };
            ddg[k][l] = mixed.clone();
            ddg[l][k] = mixed;
        }
    }

    Ok(MetricAtPoint { point: coords, g, g_inv, dg, ddg })
}

/// Christoffel symbols G^a_{bc} = 1/2 g^{al}(d_b g_{lc} + d_c g_{lb} - d_l g_{bc}).
pub fn christoffel(at: &MetricAtPoint) -> Tensor3 {
    let n = at.dim();
    let mut gamma = Tensor3::zeros(n);
    for a in 0..n {
        for b in 0..n {
            for c in b..n {
                let mut sum = 0.0;
                for l in 0..n {
                    sum += at.g_inv[(a, l)]
                        * (at.dg[b][(l, c)] + at.dg[c][(l, b)] - at.dg[l][(b, c)]);
                }
                gamma.set(a, b, c, 0.5 * sum);
                gamma.set(a, c, b, 0.5 * sum);
            }
        }
    }
    gamma
}

/// Mixed Riemann tensor
/// R^a_{b c d} = d_c G^a_{d b} - d_d G^a_{c b} + G^a_{c l} G^l_{d b} - G^a_{d l} G^l_{c b}.
pub fn riemann(at: &MetricAtPoint) -> Tensor4 {
    let n = at.dim();
    let gamma = christoffel(at);

    // d g^{-1} / d x^k = -g^{-1} (d g / d x^k) g^{-1}.
    let dginv: Vec<DMatrix<f64>> =
        (0..n).map(|k| -(&at.g_inv * &at.dg[k] * &at.g_inv)).collect();

    // dgamma[k](a, b, c) = d_k G^a_{bc}.
    let mut dgamma: Vec<Tensor3> = Vec::with_capacity(n);
    for k in 0..n {
        let mut t = Tensor3::zeros(n);
        for a in 0..n {
            for b in 0..n {
                for c in b..n {
                    let mut sum = 0.0;
                    for l in 0..n {
                        sum += dginv[k][(a, l)]
                            * (at.dg[b][(l, c)] + at.dg[c][(l, b)] - at.dg[l][(b, c)]);
                        sum += at.g_inv[(a, l)]
                            * (at.ddg[k][b][(l, c)] + at.ddg[k][c][(l, b)]
                                - at.ddg[k][l][(b, c)]);
                    }
                    t.set(a, b, c, 0.5 * sum);
                    t.set(a, c, b, 0.5 * sum);
                }
            }
        }
        dgamma.push(t);
    }

    let mut r = Tensor4::zeros(n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut v = dgamma[c].get(a, d, b) - dgamma[d].get(a, c, b);
                    for l in 0..n {
                        v += gamma.get(a, c, l) * gamma.get(l, d, b)
                            - gamma.get(a, d, l) * gamma.get(l, c, b);
                    }
                    r.set(a, b, c, d, v);
                }
            }
        }
    }
    r
}

/// Ricci tensor Ric_{bd} = R^a_{b a d}.
pub fn ricci(at: &MetricAtPoint) -> DMatrix<f64> {
    let n = at.dim();
    let riem = riemann(at);
    let mut ric = DMatrix::zeros(n, n);
    for b in 0..n {
        for d in 0..n {
            let mut sum = 0.0;
            for a in 0..n {
                sum += riem.get(a, b, a, d);
            }
            ric[(b, d)] = sum;
        }
    }
    ric
}

/// One-call convenience: assemble the metric at (t, angles) and return the
/// finite-difference Ricci tensor.
pub fn oracle_ricci(
    m: &MultiplyWarpedSpacetime,
    t: f64,
    angles: &Angles,
    opts: &OracleOptions,
) -> Result<DMatrix<f64>, OracleError> {
    let at = assemble_metric(m, t, angles, opts)?;
    Ok(ricci(&at))
}
