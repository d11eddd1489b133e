//! Adaptive integration over ℝ² and ℝ³.
//!
//! Every integral is computed in polar coordinates about a chosen center:
//! a graded, globally adaptive Gauss–Kronrod rule in the radius, an adaptive
//! rule over the sphere of directions, and an analytic power-law tail beyond
//! the truncation radius. Principal values are obtained by Richardson
//! extrapolation over a schedule of excluded balls.

pub(crate) mod gk;
mod pv;
pub(crate) mod radial;
pub(crate) mod sphere;

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{Point, ScalarField};

pub use pv::{integrate_pv, richardson, Extrapolation, PvKernel};
pub use radial::Upper;
pub use sphere::sphere_area;

pub(crate) use gk::Tolerance;
pub(crate) use radial::{RadialOut, RadialSpec};
pub(crate) use sphere::{Frame, Symmetry};

/// Where to stop integrating outward.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Truncation {
    /// Grow the radius until the estimated power-law tail is below
    /// `rel_tol/10` of the running value, then add the tail analytically.
    Auto,
    Radius(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub truncation: Truncation,
    /// Exclusion radii for principal values, strictly decreasing with ratio 2.
    pub pv_epsilons: Vec<f64>,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-9,
            abs_tol: 1e-13,
            truncation: Truncation::Auto,
            pv_epsilons: vec![0.02, 0.01, 0.005, 0.0025],
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tolerances must be positive (rel_tol = {}, abs_tol = {})",
                self.rel_tol, self.abs_tol
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidConfig("max_subdivisions must be > 0".into()));
        }
        if let Truncation::Radius(r) = self.truncation {
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::InvalidConfig(format!("truncation radius {r}")));
            }
        }
        let eps = &self.pv_epsilons;
        if eps.len() < 3 {
            return Err(Error::InvalidConfig(
                "at least three principal-value exclusion radii are required".into(),
            ));
        }
        if eps.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
            return Err(Error::InvalidConfig("exclusion radii must be positive".into()));
        }
        for w in eps.windows(2) {
            if !(w[1] < w[0]) {
                return Err(Error::InvalidConfig(
                    "exclusion radii must be strictly decreasing".into(),
                ));
            }
            if ((w[0] / w[1]) - 2.0).abs() > 1e-9 {
                return Err(Error::InvalidConfig(
                    "exclusion radii must shrink by a factor of 2".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub(crate) fn tolerance(&self) -> Tolerance {
        Tolerance {
            abs: self.abs_tol,
            rel: self.rel_tol,
            l1_relative: false,
        }
    }

    pub(crate) fn inner_tolerance(&self) -> Tolerance {
        Tolerance {
            abs: f64::MIN_POSITIVE,
            rel: (self.rel_tol * 0.1).max(1e-13),
            l1_relative: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub tail_correction: f64,
    pub evaluations: usize,
}

impl QuadResult {
    pub fn zero() -> Self {
        QuadResult {
            value: 0.0,
            error_estimate: 0.0,
            tail_correction: 0.0,
            evaluations: 0,
        }
    }

    pub fn scaled(self, s: f64) -> Self {
        QuadResult {
            value: self.value * s,
            error_estimate: self.error_estimate * s.abs(),
            tail_correction: self.tail_correction * s,
            evaluations: self.evaluations,
        }
    }
}

/// ∫ g(r) dr over (r_lo, r_hi).
///
/// An infinite upper limit needs the decay exponent of `g`.
pub fn integrate_radial<G>(g: G, r_lo: f64, r_hi: Upper, cfg: &QuadratureConfig) -> Result<QuadResult>
where
    G: Fn(f64) -> f64,
{
    integrate_radial_with(g, r_lo, r_hi, None, cfg)
}

/// [`integrate_radial`] with a known power-law behavior `g ~ r^origin_power`
/// at `r = 0`, removed by a substitution on the first panel.
pub fn integrate_radial_with<G>(
    g: G,
    r_lo: f64,
    r_hi: Upper,
    origin_power: Option<f64>,
    cfg: &QuadratureConfig,
) -> Result<QuadResult>
where
    G: Fn(f64) -> f64,
{
    cfg.validate()?;
    let h = |r: f64| [g(r)];
    let spec = RadialSpec {
        origin_power,
        ..RadialSpec::default()
    };
    let out = radial::integrate(&h, r_lo, r_hi, &spec, cfg, &cfg.tolerance(), "radial integral")?;
    Ok(QuadResult {
        value: out.value[0],
        error_estimate: out.error[0],
        tail_correction: out.tail[0],
        evaluations: out.evaluations,
    })
}

/// Polar-coordinate setup for integrating `g` about `center`.
pub(crate) fn polar_frame(g: &ScalarField, center: &Point) -> (Frame, Symmetry) {
    let dim = g.dim();
    if let Some(radial) = g.radial() {
        let d = radial.center - *center;
        if d.norm() <= 1e-14 * (1.0 + center.norm()) {
            return (Frame::new(dim, None), Symmetry::Constant);
        }
        return (Frame::new(dim, Some(d)), Symmetry::Axial);
    }
    let axis = g.focus().map(|f| f - *center).filter(|d| d.norm() > 0.0);
    (Frame::new(dim, axis), Symmetry::None)
}

/// Integrates `weight(r) · ∫_S integrand(center + rω) dω` over the radius.
#[allow(clippy::too_many_arguments)]
pub(crate) fn polar<const K: usize, W, G>(
    frame: &Frame,
    symmetry: Symmetry,
    center: &Point,
    lo: f64,
    hi: Upper,
    spec: &RadialSpec<'_>,
    weight: W,
    integrand: G,
    cfg: &QuadratureConfig,
    tol: &Tolerance,
    what: &'static str,
) -> Result<RadialOut<K>>
where
    W: Fn(f64) -> f64,
    G: Fn(&Point, f64, &Point) -> [f64; K],
{
    let inner_ok = Cell::new(true);
    let inner_evals = Cell::new(0usize);
    let h = |r: f64| {
        let w = weight(r);
        if w == 0.0 {
            return [0.0; K];
        }
        let mut inner_tol = cfg.inner_tolerance();
        if let Some(noise) = spec.noise {
            inner_tol.abs = inner_tol.abs.max(sphere::sphere_area(frame.dim) * noise(r));
        }
        let ang = sphere::integrate(
            frame,
            symmetry,
            &|omega: &Point| integrand(&center.offset(omega, r), r, omega),
            &inner_tol,
            cfg.max_subdivisions,
        );
        inner_evals.set(inner_evals.get() + ang.evaluations);
        if !ang.converged {
            inner_ok.set(false);
        }
        let mut v = ang.value;
        for x in v.iter_mut() {
            *x *= w;
        }
        v
    };
    let mut out = radial::integrate(&h, lo, hi, spec, cfg, tol, what)?;
    if !inner_ok.get() {
        return Err(Error::NonConvergence {
            what: "angular integral",
            subdivisions: cfg.max_subdivisions,
            partial: QuadResult {
                value: out.value[0],
                error_estimate: out.error[0],
                tail_correction: out.tail[0],
                evaluations: inner_evals.get(),
            },
        });
    }
    out.evaluations = inner_evals.get();
    Ok(out)
}

/// Radius about `center` beyond which `g` is in its asserted decay regime.
pub(crate) fn field_extent(g: &ScalarField, center: &Point) -> f64 {
    let focus = g
        .focus()
        .unwrap_or_else(|| Point::origin(g.dim()).expect("field dimension is valid"));
    let reach = g.decay().map_or(0.0, |d| d.valid_radius);
    2.0 * (center.dist(&focus) + reach)
}

/// Picks the polar center for a whole-space integral of `f`.
fn space_center(f: &ScalarField) -> Point {
    f.singularities()
        .first()
        .copied()
        .or_else(|| f.focus())
        .unwrap_or_else(|| Point::origin(f.dim()).expect("field dimension is valid"))
}

/// ∫_{ℝⁿ} f, with an analytic power-law tail driven by the decay hint.
pub fn integrate_space(f: &ScalarField, cfg: &QuadratureConfig) -> Result<QuadResult> {
    cfg.validate()?;
    let n = f.dim();
    let center = space_center(f);
    let hi = match (f.decay(), cfg.truncation) {
        (Some(d), _) if d.coefficient == 0.0 => return Ok(QuadResult::zero()),
        (Some(d), _) if d.exponent > n as f64 => Upper::Infinite {
            exponent: d.exponent - (n as f64 - 1.0),
        },
        (Some(d), Truncation::Auto) => {
            return Err(Error::NonIntegrable {
                exponent: d.exponent,
                required: n as f64,
            })
        }
        (None, Truncation::Auto) => {
            return Err(Error::MissingDecay(
                "whole-space integral needs a decay hint or an explicit truncation radius",
            ))
        }
        (_, Truncation::Radius(r)) => Upper::Finite(r),
    };
    let (frame, symmetry) = polar_frame(f, &center);
    let nm1 = (n - 1) as i32;
    let out = polar(
        &frame,
        symmetry,
        &center,
        0.0,
        hi,
        &RadialSpec {
            min_extent: field_extent(f, &center),
            ..RadialSpec::default()
        },
        |r| r.powi(nm1),
        |y, _, _| [f.eval(y)],
        cfg,
        &cfg.tolerance(),
        "whole-space integral",
    )?;
    Ok(QuadResult {
        value: out.value[0],
        error_estimate: out.error[0],
        tail_correction: out.tail[0],
        evaluations: out.evaluations,
    })
}

/// ∫_{B_R(center)} of several fields at once, on a shared node set.
pub(crate) fn integrate_ball<const K: usize, G>(
    dim: usize,
    center: &Point,
    radius: f64,
    frame: &Frame,
    symmetry: Symmetry,
    g: G,
    cfg: &QuadratureConfig,
) -> Result<RadialOut<K>>
where
    G: Fn(&Point) -> [f64; K],
{
    let nm1 = (dim - 1) as i32;
    polar(
        frame,
        symmetry,
        center,
        0.0,
        Upper::Finite(radius),
        &RadialSpec {
            scale: radius / 4.0,
            ..RadialSpec::default()
        },
        |r| r.powi(nm1),
        |y, _, _| g(y),
        cfg,
        &cfg.tolerance(),
        "ball integral",
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{make_radial_field, DecayHint};
    use std::f64::consts::PI;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn config_validation() {
        assert!(cfg().validate().is_ok());
        let mut c = cfg();
        c.pv_epsilons = vec![0.01, 0.02, 0.005];
        assert!(c.validate().is_err());
        c.pv_epsilons = vec![0.02, 0.01];
        assert!(c.validate().is_err());
        c.pv_epsilons = vec![0.03, 0.01, 0.005];
        assert!(c.validate().is_err());
        let mut c = cfg();
        c.rel_tol = 0.0;
        assert!(c.validate().is_err());
        let mut c = cfg();
        c.abs_tol = -1.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn radial_bubble_mass() {
        // 2πr μ²/(1+μ²r²)² over (0,∞) = π  (antiderivative −π/(1+μ²r²))
        let mu = 1.0;
        let r = integrate_radial(
            |r| 2.0 * PI * r * mu * mu / (1.0 + mu * mu * r * r).powi(2),
            0.0,
            Upper::Infinite { exponent: 3.0 },
            &cfg(),
        )
        .unwrap();
        assert!((r.value - PI).abs() < 1e-9 * PI, "{r:?}");
        assert!((r.value - PI).abs() <= r.error_estimate.max(1e-15));
    }

    #[test]
    fn radial_green_constant_integral() {
        // ∫ db/((1+b)√b) = π via b = tan²θ
        let r = integrate_radial_with(
            |b| 1.0 / ((1.0 + b) * b.sqrt()),
            0.0,
            Upper::Infinite { exponent: 1.5 },
            Some(-0.5),
            &cfg(),
        )
        .unwrap();
        assert!((r.value - PI).abs() < 1e-9, "{r:?}");
        assert!((r.value - PI).abs() <= r.error_estimate.max(1e-15));
    }

    #[test]
    fn empty_interval_is_zero() {
        let r = integrate_radial(|r| r.exp(), 1.0, Upper::Finite(1.0), &cfg()).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.error_estimate, 0.0);
    }

    #[test]
    fn radial_budget_exhaustion_is_an_error() {
        let mut c = cfg();
        c.max_subdivisions = 2;
        c.rel_tol = 1e-14;
        let r = integrate_radial(|r| (50.0 * r).sin().abs(), 0.0, Upper::Finite(10.0), &c);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn gaussian_normalization() {
        let f = make_radial_field(
            2,
            |r| (-PI * r * r).exp(),
            Point::origin(2).unwrap(),
            Some(DecayHint::new(10.0, 1.0, 5.0).unwrap()),
        )
        .unwrap();
        let r = integrate_space(&f, &cfg()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn singular_3d_integrand_from_formula() {
        // |y|⁻²(1+|y|²)⁻² over ℝ³ = π²
        let f = make_radial_field(
            3,
            |r| 1.0 / (r * r * (1.0 + r * r).powi(2)),
            Point::origin(3).unwrap(),
            Some(DecayHint::new(6.0, 1.0, 1.0).unwrap()),
        )
        .unwrap()
        .with_singularities(vec![Point::origin(3).unwrap()]);
        let r = integrate_space(&f, &cfg()).unwrap();
        assert!((r.value - PI * PI).abs() < 1e-8 * PI * PI, "{r:?}");
    }

    #[test]
    fn non_integrable_decay_is_rejected() {
        let f = make_radial_field(
            2,
            |r| 1.0 / (1.0 + r * r),
            Point::origin(2).unwrap(),
            Some(DecayHint::new(2.0, 1.0, 1.0).unwrap()),
        )
        .unwrap();
        assert!(matches!(
            integrate_space(&f, &cfg()),
            Err(Error::NonIntegrable { .. })
        ));
        let g = ScalarField::new(2, |_| 1.0).unwrap();
        assert!(matches!(integrate_space(&g, &cfg()), Err(Error::MissingDecay(_))));
    }

    #[test]
    fn off_center_non_radial_field() {
        // Gaussian translated to (1, -0.5) given without radial metadata
        let c = Point::xy(1.0, -0.5);
        let f = ScalarField::new(2, move |x| (-PI * x.dist(&c).powi(2)).exp())
            .unwrap()
            .with_decay(DecayHint::new(10.0, 1.0, 10.0).unwrap());
        let r = integrate_space(&f, &cfg()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-8, "{r:?}");
    }
}
