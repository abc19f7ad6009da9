//! Curvature of multiply warped product spacetimes.
//!
//! A multiply warped product is a Lorentzian metric of the form
//! g = -dt^2 + sum_i f_i(t)^2 g_i on an open interval times a list of
//! constant-curvature Riemannian fibers. This crate computes its
//! connection coefficients, Riemann tensor, Ricci tensor, and scalar
//! curvature in closed form, and keeps working when the warps f_i are
//! merely continuous with one-sided derivatives at a single junction:
//! there the curvature becomes a distribution, splitting into one-sided
//! limits, jumps, and a Dirac delta on the junction hypersurface.
//!
//! Module map:
//! - [`jet`]: order-2 automatic differentiation values (f, f', f'').
//! - [`expr`]: the warp expression language (parser, evaluator, printer).
//! - [`warpfn`]: validated warp functions, smooth or piecewise, including
//!   numerically defined ones.
//! - [`geometry`]: smooth-region curvature of the product metric.
//! - [`junction`]: distributional curvature at the junction and the
//!   C^1-or-not classification.
//! - [`schwarzschild`]: the interior Schwarzschild solution realized as a
//!   double warped product, with its exact change of coordinates.
//! - [`oracle`]: an independent finite-difference curvature path used to
//!   cross-check the closed forms.
//! - [`report`]: grid evaluation and deterministic CSV output.
//!
//! All public types are `Send + Sync`; a spacetime can be shared across
//! threads and evaluated at many points in parallel.

pub mod expr;
pub mod geometry;
pub mod jet;
pub mod junction;
pub mod oracle;
pub mod report;
pub mod schwarzschild;
pub mod warpfn;

pub use geometry::{Angles, FiberSpec, FrameIndex, MultiplyWarpedSpacetime, RicciEntry};
pub use jet::Jet2;
pub use junction::{analyze_junction, DistributionalScalar, JunctionReport};
pub use oracle::{oracle_ricci, OracleOptions};
pub use report::{grid_report, CurvatureReport, ReportOptions};
pub use warpfn::{Interval, Side, WarpFunction};
