//! Warp functions: positive scale factors on the base interval, possibly
//! continuous but non-differentiable at a single junction point.
//!
//! A `WarpFunction` owns one branch (smooth case) or two branches meeting at a
//! junction `p`, and evaluates order-2 jets on a caller-selected side. Branches
//! are either parsed expression trees or numerically backed jet sources (used
//! by the interior Schwarzschild construction, where the warp comes from a
//! root-finding inversion rather than a formula in `t`).

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::expr::{self, parse_warp, ParsedWarp, WarpExpr};
use crate::jet::Jet2;

/// Number of interior positivity samples taken at construction.
const POSITIVITY_SAMPLES: usize = 1024;
/// Offset from each open endpoint for the two extra positivity samples.
const ENDPOINT_OFFSET: f64 = 1e-9;
/// Relative mismatch allowed between the one-sided values at the junction.
const CONTINUITY_TOL: f64 = 1e-9;

/// Open base interval (a, b).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self, WarpError> {
        if !a.is_finite() || !b.is_finite() || b - a < 1e-6 {
            return Err(WarpError::BadDomain { a, b });
        }
        Ok(Interval { a, b })
    }

    pub fn contains(&self, t: f64) -> bool {
        self.a < t && t < self.b
    }
}

/// Branch choice for one-sided evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    /// Pick the branch by the sign of `t - p`; exactly at the junction this
    /// is ambiguous and rejected.
    Auto,
}

/// Construction failure for a warp function.
#[derive(Debug, Clone, Error)]
pub enum WarpError {
    #[error(transparent)]
    Parse(#[from] expr::ParseError),
    #[error("domain ({a}, {b}) is not a usable open interval")]
    BadDomain { a: f64, b: f64 },
    #[error("junction {p} lies outside the open domain ({a}, {b})")]
    JunctionOutsideDomain { p: f64, a: f64, b: f64 },
    #[error("branches disagree at the junction: left limit {left}, right limit {right}")]
    Discontinuous { left: f64, right: f64 },
    #[error("warp is not positive at t = {t} (value {value})")]
    NonPositive { t: f64, value: f64 },
    #[error("warp evaluation failed at t = {t}: {source}")]
    Eval { t: f64, source: WarpEvalError },
}

/// Evaluation failure for a warp function.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum WarpEvalError {
    #[error("t = {t} lies outside the open domain ({a}, {b})")]
    OutsideDomain { t: f64, a: f64, b: f64 },
    #[error("side = auto is ambiguous exactly at the junction t = {p}")]
    AmbiguousSide { p: f64 },
    #[error("warp function has no junction")]
    NoJunction,
    #[error(transparent)]
    Expr(#[from] expr::EvalError),
}

/// A numerically backed branch: anything that can produce an order-2 jet.
pub trait JetSource: Send + Sync {
    fn jet(&self, t: f64) -> Result<Jet2, expr::EvalError>;
    /// Short human-readable description used in debug output.
    fn describe(&self) -> String;
}

#[derive(Clone)]
enum Branch {
    Expr(WarpExpr),
    Numeric(Arc<dyn JetSource>),
}

impl Branch {
    fn jet(&self, t: f64) -> Result<Jet2, expr::EvalError> {
        match self {
            Branch::Expr(e) => e.eval_jet(t),
            Branch::Numeric(s) => s.jet(t),
        }
    }

    fn describe(&self) -> String {
        match self {
            Branch::Expr(e) => e.to_string(),
            Branch::Numeric(s) => s.describe(),
        }
    }
}

impl fmt::Debug for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

/// A positive warp function on an open interval, C^0 across an optional
/// junction and evaluable to second order on either side of it.
#[derive(Debug, Clone)]
pub struct WarpFunction {
    left: Branch,
    right: Branch,
    junction: Option<f64>,
    domain: Interval,
}

impl WarpFunction {
    /// Build from a parsed warp (smooth expression or piecewise pair).
    pub fn from_parsed(parsed: ParsedWarp, domain: Interval) -> Result<Self, WarpError> {
        match parsed {
            ParsedWarp::Smooth(e) => Self::smooth(e, domain),
            ParsedWarp::Piecewise { junction, left, right } => {
                Self::piecewise(junction, left, right, domain)
            }
        }
    }

    /// Parse `text` and build on `domain` in one step.
    pub fn parse(text: &str, domain: Interval) -> Result<Self, WarpError> {
        Self::from_parsed(parse_warp(text)?, domain)
    }

    /// Smooth warp from a single expression.
    pub fn smooth(e: WarpExpr, domain: Interval) -> Result<Self, WarpError> {
        let w = WarpFunction {
            left: Branch::Expr(e.clone()),
            right: Branch::Expr(e),
            junction: None,
            domain,
        };
        w.validate()?;
        Ok(w)
    }

    /// Piecewise warp with branches `left` (t < p) and `right` (t > p).
    pub fn piecewise(
        p: f64,
        left: WarpExpr,
        right: WarpExpr,
        domain: Interval,
    ) -> Result<Self, WarpError> {
        let w = WarpFunction {
            left: Branch::Expr(left),
            right: Branch::Expr(right),
            junction: Some(p),
            domain,
        };
        w.validate()?;
        Ok(w)
    }

    /// Smooth warp backed by an arbitrary jet source.
    pub fn from_jet_source(source: Arc<dyn JetSource>, domain: Interval) -> Result<Self, WarpError> {
        let w = WarpFunction {
            left: Branch::Numeric(source.clone()),
            right: Branch::Numeric(source),
            junction: None,
            domain,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn junction(&self) -> Option<f64> {
        self.junction
    }

    /// Rendering of the warp for reports: the expression text, or the two
    /// branch texts for a piecewise warp.
    pub fn describe(&self) -> String {
        match self.junction {
            None => self.left.describe(),
            Some(p) => format!(
                "piecewise({p:?}; {}; {})",
                self.left.describe(),
                self.right.describe()
            ),
        }
    }

    /// Value and first two derivatives at `t` on the selected side.
    pub fn eval_jet(&self, t: f64, side: Side) -> Result<Jet2, WarpEvalError> {
        if !self.domain.contains(t) {
            return Err(WarpEvalError::OutsideDomain {
                t,
                a: self.domain.a,
                b: self.domain.b,
            });
        }
        let branch = match (self.junction, side) {
            (None, _) => &self.left,
            (Some(_), Side::Left) => &self.left,
            (Some(_), Side::Right) => &self.right,
            (Some(p), Side::Auto) => {
                if t < p {
                    &self.left
                } else if t > p {
                    &self.right
                } else {
                    return Err(WarpEvalError::AmbiguousSide { p });
                }
            }
        };
        Ok(branch.jet(t)?)
    }

    /// Jump of the first derivative across the junction: f'(p+) - f'(p-).
    pub fn jump(&self) -> Result<f64, WarpEvalError> {
        let p = self.junction.ok_or(WarpEvalError::NoJunction)?;
        let l = self.eval_jet(p, Side::Left)?;
        let r = self.eval_jet(p, Side::Right)?;
        Ok(r.d1 - l.d1)
    }

    fn validate(&self) -> Result<(), WarpError> {
        let Interval { a, b } = self.domain;
        if let Some(p) = self.junction {
            if !self.domain.contains(p) {
                return Err(WarpError::JunctionOutsideDomain { p, a, b });
            }
            let l = self
                .eval_jet(p, Side::Left)
                .map_err(|source| WarpError::Eval { t: p, source })?;
            let r = self
                .eval_jet(p, Side::Right)
                .map_err(|source| WarpError::Eval { t: p, source })?;
            let scale = l.value.abs().max(r.value.abs()).max(1.0);
            if (l.value - r.value).abs() > CONTINUITY_TOL * scale {
                return Err(WarpError::Discontinuous { left: l.value, right: r.value });
            }
            self.check_positive(p, l.value)?;
            self.check_positive(p, r.value)?;
        }
        let width = b - a;
        let check_at = |t: f64| -> Result<(), WarpError> {
            if self.junction == Some(t) {
                // One-sided values at the junction were checked above.
                return Ok(());
            }
            let jet = self
                .eval_jet(t, Side::Auto)
                .map_err(|source| WarpError::Eval { t, source })?;
            self.check_positive(t, jet.value)
        };
        check_at(a + ENDPOINT_OFFSET)?;
        check_at(b - ENDPOINT_OFFSET)?;
        for k in 0..POSITIVITY_SAMPLES {
            // Midpoint lattice: never lands on the interval endpoints.
            let t = a + width * (k as f64 + 0.5) / POSITIVITY_SAMPLES as f64;
            check_at(t)?;
        }
        Ok(())
    }

    fn check_positive(&self, t: f64, value: f64) -> Result<(), WarpError> {
        if value > 0.0 {
            Ok(())
        } else {
            Err(WarpError::NonPositive { t, value })
        }
    }
}
