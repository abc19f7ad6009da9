//! TOML spacetime configuration: strict parsing and construction.
//!
//! Unknown keys are rejected everywhere. The top-level `junction` field is
//! required exactly when some warp is piecewise, and must equal the
//! junction those warps declare; this keeps the config self-describing
//! without letting it contradict the warp expressions.
//!
//! Two special warp forms are resolved here rather than in the expression
//! grammar: `schwarzschild_f1(m=<mass>)` and `schwarzschild_f2(m=<mass>)`
//! bind the numerically defined interior black-hole warps.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use warpcurv::geometry::{FiberSpec, GeometryError, MultiplyWarpedSpacetime};
use warpcurv::schwarzschild::{f1_jet_source, f2_jet_source, SchwarzschildError};
use warpcurv::warpfn::{Interval, WarpError, WarpFunction};
use warpcurv::Angles;

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SpacetimeConfig {
    /// Junction shared by all piecewise warps; required iff one exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub junction: Option<f64>,
    pub base: BaseConfig,
    pub fibers: Vec<FiberConfig>,
    pub grid: GridConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angles: Option<AnglesConfig>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BaseConfig {
    pub t_min: f64,
    pub t_max: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FiberConfig {
    pub label: String,
    pub dim: usize,
    pub curvature: f64,
    pub warp: String,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub points: usize,
    pub t_min: f64,
    pub t_max: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AnglesConfig {
    pub theta: f64,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid TOML in {path}: {source}")]
    Toml { path: String, source: Box<toml::de::Error> },
    #[error("config needs at least one [[fibers]] entry")]
    NoFibers,
    #[error("fiber label {label:?} must match [A-Za-z0-9_-]+")]
    BadLabel { label: String },
    #[error("duplicate fiber label {label:?}")]
    DuplicateLabel { label: String },
    #[error("fiber {label:?}: bad warp: {reason}")]
    BadWarp { label: String, reason: String },
    #[error("fiber {label:?}: {source}")]
    Fiber { label: String, source: GeometryError },
    #[error("base interval: {source}")]
    Base { source: WarpError },
    #[error("spacetime: {source}")]
    Spacetime { source: GeometryError },
    #[error(
        "warp of fiber {label:?} is piecewise at {found}, but the top-level \
         junction field says {expected}"
    )]
    JunctionMismatch { label: String, found: f64, expected: f64 },
    #[error("top-level junction = {p} given, but no warp is piecewise")]
    JunctionWithoutPiecewise { p: f64 },
    #[error(
        "a warp is piecewise at {p}; add a matching top-level `junction = {p}` field"
    )]
    MissingJunction { p: f64 },
    #[error("grid needs at least 1 point")]
    EmptyGrid,
    #[error("grid with {points} points needs t_min < t_max; got [{t_min}, {t_max}]")]
    BadGridOrder { points: usize, t_min: f64, t_max: f64 },
    #[error("single-point grid needs t_min == t_max; got [{t_min}, {t_max}]")]
    SinglePointGrid { t_min: f64, t_max: f64 },
    #[error("grid [{t_min}, {t_max}] must lie strictly inside the base interval ({a}, {b})")]
    GridOutsideBase { t_min: f64, t_max: f64, a: f64, b: f64 },
    #[error("theta must be finite, got {theta}")]
    BadTheta { theta: f64 },
}

/// A fully validated configuration, ready to evaluate.
#[derive(Debug)]
pub struct BuiltConfig {
    pub spacetime: MultiplyWarpedSpacetime,
    pub grid: Vec<f64>,
    pub angles: Angles,
}

impl SpacetimeConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        toml::from_str(&text).map_err(|source| ConfigError::Toml {
            path: path.display().to_string(),
            source: Box::new(source),
        })
    }

    pub fn build(&self) -> Result<BuiltConfig, ConfigError> {
        let base = Interval::new(self.base.t_min, self.base.t_max)
            .map_err(|source| ConfigError::Base { source })?;

        if self.fibers.is_empty() {
            return Err(ConfigError::NoFibers);
        }
        let mut seen = std::collections::HashSet::new();
        let mut fibers = Vec::with_capacity(self.fibers.len());
        for f in &self.fibers {
            if f.label.is_empty()
                || !f.label.chars().all(|c| c.is_ascii_alphanumeric() || "_-".contains(c))
            {
                return Err(ConfigError::BadLabel { label: f.label.clone() });
            }
            if !seen.insert(f.label.clone()) {
                return Err(ConfigError::DuplicateLabel { label: f.label.clone() });
            }
            let spec = FiberSpec::new(f.label.clone(), f.dim, f.curvature)
                .map_err(|source| ConfigError::Fiber { label: f.label.clone(), source })?;
            let warp = build_warp(&f.label, &f.warp, base)?;
            fibers.push((spec, warp));
        }

        // Junction bookkeeping: the config field and the warps must agree.
        let declared: Vec<(String, f64)> = fibers
            .iter()
            .filter_map(|(s, w)| w.junction().map(|p| (s.label.clone(), p)))
            .collect();
        match (self.junction, declared.first()) {
            (None, Some((_, p))) => return Err(ConfigError::MissingJunction { p: *p }),
            (Some(p), None) => return Err(ConfigError::JunctionWithoutPiecewise { p }),
            (Some(expected), Some(_)) => {
                for (label, found) in &declared {
                    if *found != expected {
                        return Err(ConfigError::JunctionMismatch {
                            label: label.clone(),
                            found: *found,
                            expected,
                        });
                    }
                }
            }
            (None, None) => {}
        }

        let spacetime = MultiplyWarpedSpacetime::new(base, fibers)
            .map_err(|source| ConfigError::Spacetime { source })?;

        let grid = self.build_grid(base)?;
        let angles = match &self.angles {
            Some(a) if !a.theta.is_finite() => {
                return Err(ConfigError::BadTheta { theta: a.theta })
            }
            Some(a) => Angles { theta: a.theta },
            None => Angles::default(),
        };
        Ok(BuiltConfig { spacetime, grid, angles })
    }

    fn build_grid(&self, base: Interval) -> Result<Vec<f64>, ConfigError> {
        let g = &self.grid;
        if g.points == 0 {
            return Err(ConfigError::EmptyGrid);
        }
        if g.points == 1 && g.t_min != g.t_max {
            return Err(ConfigError::SinglePointGrid { t_min: g.t_min, t_max: g.t_max });
        }
        if g.points > 1 && !(g.t_min < g.t_max) {
            return Err(ConfigError::BadGridOrder {
                points: g.points,
                t_min: g.t_min,
                t_max: g.t_max,
            });
        }
        if !(g.t_min > base.a && g.t_max < base.b) {
            return Err(ConfigError::GridOutsideBase {
                t_min: g.t_min,
                t_max: g.t_max,
                a: base.a,
                b: base.b,
            });
        }
        if g.points == 1 {
            return Ok(vec![g.t_min]);
        }
        Ok((0..g.points)
            .map(|k| g.t_min + (g.t_max - g.t_min) * k as f64 / (g.points - 1) as f64)
            .collect())
    }
}

/// Resolve a warp string: a special interior-black-hole form, or an
/// expression in the warp language.
fn build_warp(label: &str, text: &str, base: Interval) -> Result<WarpFunction, ConfigError> {
    let bad = |reason: String| ConfigError::BadWarp { label: label.to_string(), reason };
    if let Some((which, mass)) = parse_special(text).map_err(bad)? {
        let source = match which {
            Special::F1 => f1_jet_source(mass),
            Special::F2 => f2_jet_source(mass),
        }
        .map_err(|e: SchwarzschildError| bad(e.to_string()))?;
        return WarpFunction::from_jet_source(source, base).map_err(|e| bad(e.to_string()));
    }
    WarpFunction::parse(text, base).map_err(|e| bad(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Special {
    F1,
    F2,
}

/// Recognize `schwarzschild_f1(m=<float>)` / `schwarzschild_f2(m=<float>)`.
/// Returns Ok(None) for ordinary expressions.
fn parse_special(text: &str) -> Result<Option<(Special, f64)>, String> {
    let t = text.trim();
    let (which, rest) = if let Some(r) = t.strip_prefix("schwarzschild_f1") {
        (Special::F1, r)
    } else if let Some(r) = t.strip_prefix("schwarzschild_f2") {
        (Special::F2, r)
    } else {
        return Ok(None);
    };
    let inner = rest
        .trim()
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| format!("expected schwarzschild_fN(m=<mass>), got {t:?}"))?;
    let value = inner
        .trim()
        .strip_prefix('m')
        .map(str::trim_start)
        .and_then(|s| s.strip_prefix('='))
        .ok_or_else(|| format!("expected m=<mass> inside the parentheses, got {inner:?}"))?;
    let mass: f64 = value
        .trim()
        .parse()
        .map_err(|_| format!("mass {value:?} is not a number"))?;
    Ok(Some((which, mass)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> SpacetimeConfig {
        toml::from_str(text).unwrap()
    }

    const CYLINDER: &str = r#"
        [base]
        t_min = -2.0
        t_max = 2.0

        [[fibers]]
        label = "line"
        dim = 1
        curvature = 0.0
        warp = "1"

        [[fibers]]
        label = "sphere"
        dim = 2
        curvature = 1.0
        warp = "1"

        [grid]
        points = 3
        t_min = -1.0
        t_max = 1.0
    "#;

    #[test]
    fn cylinder_builds() {
        let built = parse(CYLINDER).build().unwrap();
        assert_eq!(built.spacetime.dim(), 4);
        assert_eq!(built.grid, vec![-1.0, 0.0, 1.0]);
        assert_eq!(built.angles.theta, std::f64::consts::FRAC_PI_2);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let with_extra = CYLINDER.replace("[grid]", "wombat = 3\n[grid]");
        assert!(toml::from_str::<SpacetimeConfig>(&with_extra).is_err());
    }

    #[test]
    fn junction_field_rules() {
        let piecewise = CYLINDER.replace("warp = \"1\"\n", "warp = \"piecewise(0; 1; 1)\"\n");
        // Both warps piecewise, no junction field: rejected.
        assert!(matches!(
            parse(&piecewise).build().unwrap_err(),
            ConfigError::MissingJunction { p } if p == 0.0
        ));
        let with_field = format!("junction = 0.0\n{piecewise}");
        assert!(parse(&with_field).build().is_ok());
        let wrong_field = format!("junction = 0.5\n{piecewise}");
        assert!(matches!(
            parse(&wrong_field).build().unwrap_err(),
            ConfigError::JunctionMismatch { .. }
        ));
        let spurious = format!("junction = 0.5\n{CYLINDER}");
        assert!(matches!(
            parse(&spurious).build().unwrap_err(),
            ConfigError::JunctionWithoutPiecewise { p } if p == 0.5
        ));
    }

    #[test]
    fn label_rules() {
        let dup = CYLINDER.replace("label = \"line\"", "label = \"sphere\"");
        assert!(matches!(
            parse(&dup).build().unwrap_err(),
            ConfigError::DuplicateLabel { .. }
        ));
        let bad = CYLINDER.replace("label = \"line\"", "label = \"li ne\"");
        assert!(matches!(parse(&bad).build().unwrap_err(), ConfigError::BadLabel { .. }));
    }

    #[test]
    fn grid_rules() {
        let outside = CYLINDER.replace("t_max = 1.0", "t_max = 2.0");
        assert!(matches!(
            parse(&outside).build().unwrap_err(),
            ConfigError::GridOutsideBase { .. }
        ));
        let reversed = CYLINDER.replace("t_min = -1.0", "t_min = 1.5");
        assert!(matches!(
            parse(&reversed).build().unwrap_err(),
            ConfigError::BadGridOrder { .. }
        ));
        let single = CYLINDER
            .replace("points = 3", "points = 1")
            .replace("t_min = -1.0", "t_min = 1.0");
        assert_eq!(parse(&single).build().unwrap().grid, vec![1.0]);
    }

    #[test]
    fn special_warp_forms() {
        assert_eq!(
            parse_special("schwarzschild_f1(m=1.5)").unwrap(),
            Some((Special::F1, 1.5))
        );
        assert_eq!(
            parse_special("  schwarzschild_f2( m = 2 )  ").unwrap(),
            Some((Special::F2, 2.0))
        );
        assert_eq!(parse_special("cosh(t)").unwrap(), None);
        assert!(parse_special("schwarzschild_f1(mass=1)").is_err());
        assert!(parse_special("schwarzschild_f1(m=)").is_err());
        assert!(parse_special("schwarzschild_f2(m=1").is_err());
    }

    #[test]
    fn schwarzschild_config_builds() {
        let pi = std::f64::consts::PI;
        let text = format!(
            r#"
            [base]
            t_min = 0.0
            t_max = {pi:?}

            [[fibers]]
            label = "radial"
            dim = 1
            curvature = 0.0
            warp = "schwarzschild_f1(m=1)"

            [[fibers]]
            label = "sphere"
            dim = 2
            curvature = 1.0
            warp = "schwarzschild_f2(m=1)"

            [grid]
            points = 5
            t_min = {:?}
            t_max = {:?}
            "#,
            0.05 * pi,
            0.95 * pi
        );
        let built = parse(&text).build().unwrap();
        assert_eq!(built.spacetime.dim(), 4);
        assert!(built.spacetime.junction().is_none());
    }

    #[test]
    fn bad_warp_reports_the_fiber() {
        let broken = CYLINDER.replace("warp = \"1\"\n", "warp = \"1 +\"\n");
        match parse(&broken).build().unwrap_err() {
            ConfigError::BadWarp { label, .. } => assert_eq!(label, "line"),
            other => panic!("wrong error: {other}"),
        }
    }
}
