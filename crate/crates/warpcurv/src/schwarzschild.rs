//! The interior Schwarzschild solution as a multiply warped product.
//!
//! In Gaussian normal (proper-time) coordinates the region inside the
//! horizon of a mass-m Schwarzschild black hole takes the form
//! ds^2 = -dmu^2 + f1(mu)^2 drho^2 + f2(mu)^2 dOmega^2,
//! a double warped product over the interval (0, m*pi) with a line fiber
//! and a unit 2-sphere fiber. f2 is the areal radius nu expressed in the
//! proper time mu, and f1 = f2' = sqrt(2m/nu - 1).
//!
//! The change of variable is the cycloid-type integral
//! mu = F(nu) = 2m acos(sqrt((2m - nu)/(2m))) - sqrt(nu (2m - nu)),
//! increasing from F(0) = 0 to F(2m) = m*pi. Its inverse has no closed
//! form and is computed here by a bracketed Newton iteration, polished to
//! machine precision: downstream finite-difference checks divide by h^2,
//! so a sloppy inverse would dominate their error budget.
//!
//! Both warps reach the geometry code as jets in closed form in nu, and
//! those closed forms satisfy the vacuum equations identically in nu, so
//! the curvature residual of the built spacetime is pure rounding noise
//! regardless of the inversion error.

use std::f64::consts::PI;
use std::sync::Arc;

use thiserror::Error;

use crate::expr::EvalError;
use crate::geometry::{Angles, FiberSpec, GeometryError, MultiplyWarpedSpacetime};
use crate::jet::Jet2;
use crate::warpfn::{Interval, JetSource, Side, WarpError, WarpFunction};

#[derive(Debug, Clone, Error)]
pub enum SchwarzschildError {
    #[error("mass must be positive and finite, got {mass}")]
    BadMass { mass: f64 },
    #[error("proper time {mu} outside the interior range [0, {max}]")]
    OutsideRange { mu: f64, max: f64 },
    #[error("areal radius {nu} outside [0, {max}]")]
    RadiusOutsideRange { nu: f64, max: f64 },
    #[error("need at least 2 scan samples, got {samples}")]
    BadSamples { samples: usize },
    #[error("tolerance must satisfy 0 < tol < 1e-6, got {tolerance}")]
    BadTolerance { tolerance: f64 },
    #[error(transparent)]
    Warp(#[from] WarpError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Parameters for building and checking the interior solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchwarzschildParams {
    pub mass: f64,
    /// Number of scan points used by [`verify_ricci_flat`].
    pub samples: usize,
    /// Curvature residual allowed by [`verify_ricci_flat`].
    pub tolerance: f64,
}

impl SchwarzschildParams {
    pub fn new(mass: f64) -> Result<Self, SchwarzschildError> {
        check_mass(mass)?;
        Ok(SchwarzschildParams { mass, samples: 50, tolerance: 1e-12 })
    }

    pub fn with_samples(mut self, samples: usize) -> Result<Self, SchwarzschildError> {
        if samples < 2 {
            return Err(SchwarzschildError::BadSamples { samples });
        }
        self.samples = samples;
        Ok(self)
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self, SchwarzschildError> {
        if !(tolerance > 0.0 && tolerance < 1e-6) {
            return Err(SchwarzschildError::BadTolerance { tolerance });
        }
        self.tolerance = tolerance;
        Ok(self)
    }
}

fn check_mass(mass: f64) -> Result<(), SchwarzschildError> {
    if mass.is_finite() && mass > 0.0 {
        Ok(())
    } else {
        Err(SchwarzschildError::BadMass { mass })
    }
}

/// Elapsed proper time from the singularity as a function of areal radius:
/// F(nu) = 2m acos(sqrt((2m - nu)/(2m))) - sqrt(nu (2m - nu)) on [0, 2m].
pub fn proper_time(nu: f64, mass: f64) -> Result<f64, SchwarzschildError> {
    check_mass(mass)?;
    let max = 2.0 * mass;
    if !(0.0..=max).contains(&nu) {
        return Err(SchwarzschildError::RadiusOutsideRange { nu, max });
    }
    Ok(proper_time_raw(nu, mass))
}

/// F without domain checks; clamps shield the square roots from rounding
/// excursions just outside [0, 2m].
fn proper_time_raw(nu: f64, mass: f64) -> f64 {
    let two_m = 2.0 * mass;
    let ratio = ((two_m - nu) / two_m).clamp(0.0, 1.0);
    2.0 * mass * ratio.sqrt().acos() - (nu * (two_m - nu)).max(0.0).sqrt()
}

/// Areal radius as a function of proper time: the inverse of [`proper_time`]
/// on [0, m*pi]. Accurate to a few ulps; interior values are strictly
/// inside (0, 2m).
pub fn areal_radius(mu: f64, mass: f64) -> Result<f64, SchwarzschildError> {
    check_mass(mass)?;
    let max = mass * PI;
    if !(0.0..=max).contains(&mu) {
        return Err(SchwarzschildError::OutsideRange { mu, max });
    }
    if mu == 0.0 {
        return Ok(0.0);
    }
    if mu == max {
        return Ok(2.0 * mass);
    }
    Ok(invert_proper_time(mu, mass))
}

/// Bracketed Newton iteration for F(nu) = mu, with a bisection fallback
/// every other step so the bracket provably collapses. Runs until the
/// residual is exactly zero or the bracket has no interior floats left.
fn invert_proper_time(mu: f64, mass: f64) -> f64 {
    let two_m = 2.0 * mass;
    // Invariant: F(lo) < mu <= F(hi); iterates stay strictly inside (lo, hi),
    // so the result never touches the degenerate endpoints.
    let (mut lo, mut hi) = (0.0f64, two_m);
    let mut nu = 0.5 * (lo + hi);
    for iter in 0..256 {
        let f = proper_time_raw(nu, mass) - mu;
        if f == 0.0 {
            break;
        }
        if f < 0.0 {
            lo = nu;
        } else {
            hi = nu;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let next = if iter % 2 == 0 {
            // F'(nu) = sqrt(nu / (2m - nu)).
            let slope = (nu / (two_m - nu)).sqrt();
            let newton = nu - f / slope;
            if newton.is_finite() && newton > lo && newton < hi {
                newton
            } else {
                mid
            }
        } else {
            mid
        };
        nu = next;
    }
    nu
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum WarpComponent {
    /// Radial warp f1 = sqrt(2m/nu - 1).
    F1,
    /// Spherical warp f2 = nu.
    F2,
}

/// Numeric jet source for one interior warp. Jets are closed forms in
/// nu = nu(mu):
/// f2 = (nu, sqrt(2m/nu - 1), -m/nu^2),
/// f1 = (sqrt(2m/nu - 1), -m/nu^2, (2m/nu^3) sqrt(2m/nu - 1)).
#[derive(Debug, Clone)]
struct InteriorWarp {
    mass: f64,
    component: WarpComponent,
}

impl InteriorWarp {
    fn nu(&self, mu: f64) -> Result<f64, EvalError> {
        let nu = areal_radius(mu, self.mass)
            .map_err(|_| EvalError::Domain { op: "schwarzschild warp", arg: mu })?;
        if nu == 0.0 || nu == 2.0 * self.mass {
            // Jets degenerate at the singularity and the horizon.
            return Err(EvalError::Domain { op: "schwarzschild warp", arg: mu });
        }
        Ok(nu)
    }
}

impl JetSource for InteriorWarp {
    fn jet(&self, mu: f64) -> Result<Jet2, EvalError> {
        let m = self.mass;
        let nu = self.nu(mu)?;
        let slope = (2.0 * m / nu - 1.0).sqrt();
        let jet = match self.component {
            WarpComponent::F2 => Jet2 { value: nu, d1: slope, d2: -m / (nu * nu) },
            WarpComponent::F1 => Jet2 {
                value: slope,
                d1: -m / (nu * nu),
                d2: 2.0 * m / (nu * nu * nu) * slope,
            },
        };
        if jet.is_finite() {
            Ok(jet)
        } else {
            Err(EvalError::NonFinite { op: "schwarzschild warp" })
        }
    }

    fn describe(&self) -> String {
        match self.component {
            WarpComponent::F1 => format!("schwarzschild_f1(m={})", self.mass),
            WarpComponent::F2 => format!("schwarzschild_f2(m={})", self.mass),
        }
    }
}

/// Jet source for the radial warp f1(mu) = sqrt(2m/nu(mu) - 1).
pub fn f1_jet_source(mass: f64) -> Result<Arc<dyn JetSource>, SchwarzschildError> {
    check_mass(mass)?;
    Ok(Arc::new(InteriorWarp { mass, component: WarpComponent::F1 }))
}

/// Jet source for the spherical warp f2(mu) = nu(mu) (the areal radius).
pub fn f2_jet_source(mass: f64) -> Result<Arc<dyn JetSource>, SchwarzschildError> {
    check_mass(mass)?;
    Ok(Arc::new(InteriorWarp { mass, component: WarpComponent::F2 }))
}

/// Proper-time range of the interior: the open interval (0, m*pi).
pub fn interior_domain(mass: f64) -> Result<Interval, SchwarzschildError> {
    check_mass(mass)?;
    Ok(Interval::new(0.0, mass * PI)?)
}

/// Both interior warp jets at one proper time strictly inside (0, m*pi),
/// as (f1, f2).
pub fn interior_warp_jets(mu: f64, mass: f64) -> Result<(Jet2, Jet2), SchwarzschildError> {
    check_mass(mass)?;
    let max = mass * PI;
    if !(mu > 0.0 && mu < max) {
        return Err(SchwarzschildError::OutsideRange { mu, max });
    }
    let f1 = InteriorWarp { mass, component: WarpComponent::F1 };
    let f2 = InteriorWarp { mass, component: WarpComponent::F2 };
    let map = |_: EvalError| SchwarzschildError::OutsideRange { mu, max };
    Ok((f1.jet(mu).map_err(map)?, f2.jet(mu).map_err(map)?))
}

/// The interior Schwarzschild spacetime as a double warped product on
/// (0, m*pi): a flat line fiber warped by f1 and a unit 2-sphere fiber
/// warped by f2.
pub fn build_interior(mass: f64) -> Result<MultiplyWarpedSpacetime, SchwarzschildError> {
    build_interior_with_radial_tilt(mass, 0.0)
}

/// Interior solution with the spherical warp perturbed to f2 + epsilon*mu.
/// With epsilon = 0 this is the vacuum solution; any other value breaks
/// the field equations and serves as a negative control for curvature
/// checks.
pub fn build_interior_with_radial_tilt(
    mass: f64,
    epsilon: f64,
) -> Result<MultiplyWarpedSpacetime, SchwarzschildError> {
    let domain = interior_domain(mass)?;
    let f1 = WarpFunction::from_jet_source(f1_jet_source(mass)?, domain)?;
    let f2_source: Arc<dyn JetSource> = if epsilon == 0.0 {
        f2_jet_source(mass)?
    } else {
        Arc::new(TiltedWarp {
            inner: InteriorWarp { mass, component: WarpComponent::F2 },
            epsilon,
        })
    };
    let f2 = WarpFunction::from_jet_source(f2_source, domain)?;
    let fibers = vec![
        (FiberSpec::new("radial", 1, 0.0)?, f1),
        (FiberSpec::new("sphere", 2, 1.0)?, f2),
    ];
    Ok(MultiplyWarpedSpacetime::new(domain, fibers)?)
}

/// A jet source with a linear-in-mu perturbation added.
#[derive(Debug)]
struct TiltedWarp {
    inner: InteriorWarp,
    epsilon: f64,
}

impl JetSource for TiltedWarp {
    fn jet(&self, mu: f64) -> Result<Jet2, EvalError> {
        let base = self.inner.jet(mu)?;
        Ok(Jet2 { value: base.value + self.epsilon * mu, d1: base.d1 + self.epsilon, d2: base.d2 })
    }

    fn describe(&self) -> String {
        format!("{} + {:?}*t", self.inner.describe(), self.epsilon)
    }
}

/// Largest absolute orthonormal Ricci entry over an even scan of
/// [lo, hi], together with the scan point where it occurs.
pub fn flatness_scan(
    m: &MultiplyWarpedSpacetime,
    lo: f64,
    hi: f64,
    samples: usize,
) -> Result<(f64, f64), SchwarzschildError> {
    if samples < 2 {
        return Err(SchwarzschildError::BadSamples { samples });
    }
    let angles = Angles::default();
    let mut worst = (0.0f64, lo);
    for k in 0..samples {
        let t = lo + (hi - lo) * k as f64 / (samples - 1) as f64;
        for entry in m.ricci_components(t, Side::Auto, &angles)? {
            if entry.orthonormal.abs() > worst.0 {
                worst = (entry.orthonormal.abs(), t);
            }
        }
    }
    Ok(worst)
}

/// Outcome of scanning the interior solution for curvature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatnessReport {
    pub mass: f64,
    pub samples: usize,
    /// Largest |orthonormal Ricci entry| seen.
    pub max_abs_ricci: f64,
    /// Scan point where the maximum occurred.
    pub worst_mu: f64,
    /// Whether the maximum is within the requested tolerance.
    pub flat: bool,
}

/// Scan the interior solution across [0.05 m pi, 0.95 m pi] and compare
/// the worst orthonormal Ricci entry against `params.tolerance`. The
/// margins avoid the singularity and horizon endpoints where the chart
/// degenerates.
pub fn verify_ricci_flat(params: &SchwarzschildParams) -> Result<FlatnessReport, SchwarzschildError> {
    let spacetime = build_interior(params.mass)?;
    let span = params.mass * PI;
    let (max_abs_ricci, worst_mu) =
        flatness_scan(&spacetime, 0.05 * span, 0.95 * span, params.samples)?;
    Ok(FlatnessReport {
        mass: params.mass,
        samples: params.samples,
        max_abs_ricci,
        worst_mu,
        flat: max_abs_ricci <= params.tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0), "{a} vs {b}");
    }

    #[test]
    fn proper_time_limits() {
        for &m in &[1.0, 2.0, 0.7] {
            assert_eq!(proper_time(0.0, m).unwrap(), 0.0);
            close(proper_time(2.0 * m, m).unwrap(), m * PI, 1e-15);
            // Half radius: F(m) = m (pi/2 - 1).
            close(proper_time(m, m).unwrap(), m * (PI / 2.0 - 1.0), 1e-15);
        }
    }

    #[test]
    fn proper_time_is_increasing() {
        let m = 1.3;
        let mut prev = 0.0;
        for k in 1..=200 {
            let nu = 2.0 * m * k as f64 / 200.0;
            let mu = proper_time(nu, m).unwrap();
            assert!(mu > prev, "not increasing at nu = {nu}");
            prev = mu;
        }
    }

    #[test]
    fn inversion_round_trip() {
        for &m in &[1.0, 2.0, 0.4] {
            for k in 1..40 {
                let mu = m * PI * k as f64 / 40.0;
                let nu = areal_radius(mu, m).unwrap();
                assert!(nu > 0.0 && nu < 2.0 * m);
                // Residual in mu is at the rounding floor of F itself.
                close(proper_time(nu, m).unwrap(), mu, 5e-15);
            }
            // Points given in nu first round-trip too.
            for k in 1..40 {
                let nu = 2.0 * m * k as f64 / 40.0;
                let mu = proper_time(nu, m).unwrap();
                close(areal_radius(mu, m).unwrap(), nu, 1e-12);
            }
        }
    }

    #[test]
    fn endpoint_values() {
        let m = 1.7;
        assert_eq!(areal_radius(0.0, m).unwrap(), 0.0);
        assert_eq!(areal_radius(m * PI, m).unwrap(), 2.0 * m);
        close(areal_radius(m * (PI / 2.0 - 1.0), m).unwrap(), m, 1e-13);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            proper_time(3.0, 1.0).unwrap_err(),
            SchwarzschildError::RadiusOutsideRange { .. }
        ));
        assert!(matches!(
            areal_radius(-0.1, 1.0).unwrap_err(),
            SchwarzschildError::OutsideRange { .. }
        ));
        assert!(matches!(
            areal_radius(0.5, -1.0).unwrap_err(),
            SchwarzschildError::BadMass { .. }
        ));
        assert!(matches!(
            SchwarzschildParams::new(1.0).unwrap().with_tolerance(1e-5).unwrap_err(),
            SchwarzschildError::BadTolerance { .. }
        ));
    }

    #[test]
    fn warp_jets_match_finite_differences() {
        let m = 1.2;
        let h = 1e-6;
        for &mu in &[0.4, 1.1, 2.3, 3.2] {
            let (f1, f2) = interior_warp_jets(mu, m).unwrap();
            // f1 is the derivative of f2 by construction.
            assert_eq!(f1.value, f2.d1);
            assert_eq!(f1.d1, f2.d2);

            let (f1p, f2p) = interior_warp_jets(mu + h, m).unwrap();
            let (f1m, f2m) = interior_warp_jets(mu - h, m).unwrap();
            close(f2.d1, (f2p.value - f2m.value) / (2.0 * h), 1e-8);
            close(f1.d1, (f1p.value - f1m.value) / (2.0 * h), 1e-8);
            close(f1.d2, (f1p.d1 - f1m.d1) / (2.0 * h), 1e-8);
        }
    }

    #[test]
    fn mass_is_conserved_along_the_warp() {
        // ((f2')^2 + 1) f2 = 2m identically in the interior.
        for &m in &[1.0, 2.5] {
            for k in 1..30 {
                let mu = m * PI * k as f64 / 30.0 * 0.999;
                let (_, f2) = interior_warp_jets(mu, m).unwrap();
                close((f2.d1 * f2.d1 + 1.0) * f2.value, 2.0 * m, 1e-13);
            }
        }
    }

    #[test]
    fn interior_structure() {
        let m = build_interior(1.0).unwrap();
        assert_eq!(m.dim(), 4);
        assert_eq!(m.base(), Interval::new(0.0, PI).unwrap());
        assert!(m.junction().is_none());
        let fibers = m.fibers();
        assert_eq!(fibers[0].0.dim, 1);
        assert_eq!(fibers[0].0.curvature, 0.0);
        assert_eq!(fibers[1].0.dim, 2);
        assert_eq!(fibers[1].0.curvature, 1.0);
    }

    #[test]
    fn interior_is_ricci_flat() {
        for &mass in &[1.0, 2.0] {
            let params = SchwarzschildParams::new(mass).unwrap();
            let report = verify_ricci_flat(&params).unwrap();
            assert!(
                report.flat,
                "mass {mass}: residual {} at mu = {}",
                report.max_abs_ricci, report.worst_mu
            );
            assert!(report.max_abs_ricci <= 1e-12);
        }
    }

    #[test]
    fn tilted_interior_is_not_flat() {
        let m = build_interior_with_radial_tilt(1.0, 0.01).unwrap();
        let span = PI;
        let (max_abs, _) = flatness_scan(&m, 0.05 * span, 0.95 * span, 50).unwrap();
        assert!(max_abs > 1e-3, "tilt residual only {max_abs}");
    }

    #[test]
    fn describe_strings_round_trip_shapes() {
        assert_eq!(f1_jet_source(1.0).unwrap().describe(), "schwarzschild_f1(m=1)");
        assert_eq!(f2_jet_source(2.5).unwrap().describe(), "schwarzschild_f2(m=2.5)");
    }
}
