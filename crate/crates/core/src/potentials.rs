//! Riesz, logarithmic, Newtonian and Hartree potentials, the closed-form
//! integral I(γ), and the ball Green's function of the half-Laplacian.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{field_power, Point, ScalarField};
use crate::quadrature::{
    field_extent, integrate_radial_with, polar, polar_frame, QuadResult, QuadratureConfig, RadialSpec,
    Truncation, Upper,
};
use statrs::function::gamma::gamma;

fn check_point(g: &ScalarField, x: &Point) -> Result<()> {
    if x.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            got: x.dim(),
        });
    }
    Ok(())
}

/// Upper radial limit for integrating `g` against a weight growing like
/// `r^(n−1−shift)`.
fn radial_upper(g: &ScalarField, shift: f64, cfg: &QuadratureConfig) -> Result<Option<Upper>> {
    let n = g.dim() as f64;
    match (g.decay(), cfg.truncation) {
        (Some(d), _) if d.coefficient == 0.0 => Ok(None),
        (_, Truncation::Radius(r)) => Ok(Some(Upper::Finite(r))),
        (Some(d), Truncation::Auto) => {
            let exponent = d.exponent + shift - (n - 1.0);
            if exponent > 1.0 {
                Ok(Some(Upper::Infinite { exponent }))
            } else {
                Err(Error::NonIntegrable {
                    exponent: d.exponent,
                    required: n - shift,
                })
            }
        }
        (None, Truncation::Auto) => Err(Error::MissingDecay(
            "potential needs a decay hint or an explicit truncation radius",
        )),
    }
}

fn to_result(out: crate::quadrature::RadialOut<1>) -> QuadResult {
    QuadResult {
        value: out.value[0],
        error_estimate: out.error[0],
        tail_correction: out.tail[0],
        evaluations: out.evaluations,
    }
}

/// `∫ g(y) / |x − y|^a dy`, in polar coordinates about `x`.
pub fn riesz_convolution(g: &ScalarField, x: &Point, a: f64, cfg: &QuadratureConfig) -> Result<QuadResult> {
    cfg.validate()?;
    check_point(g, x)?;
    let n = g.dim();
    if !(a >= 0.0 && a < n as f64) {
        return Err(Error::InvalidArgument(format!(
            "kernel exponent {a} must lie in [0, {n})"
        )));
    }
    let Some(hi) = radial_upper(g, a, cfg)? else {
        return Ok(QuadResult::zero());
    };
    let (frame, symmetry) = polar_frame(g, x);
    let power = n as f64 - 1.0 - a;
    let scale = g
        .focus()
        .map(|c| c.dist(x))
        .filter(|d| *d > 0.0)
        .map_or(1.0, |d| d.min(1.0));
    let out = polar(
        &frame,
        symmetry,
        x,
        0.0,
        hi,
        &RadialSpec {
            scale,
            origin_power: Some(power),
            noise: None,
            min_extent: field_extent(g, x),
        },
        |r| r.powf(power),
        |y, _, _| [g.eval(y)],
        cfg,
        &cfg.tolerance(),
        "Riesz potential",
    )?;
    Ok(to_result(out))
}

/// `(1/2π) ∫ g(y)/|x − y| dy` on ℝ², the inverse of the half-Laplacian.
pub fn riesz2d(g: &ScalarField, x: &Point, cfg: &QuadratureConfig) -> Result<QuadResult> {
    require_dim(g, 2)?;
    Ok(riesz_convolution(g, x, 1.0, cfg)?.scaled(1.0 / (2.0 * PI)))
}

/// `(1/4π) ∫ g(y)/|x − y| dy` on ℝ³, the inverse of the Laplacian.
pub fn newton3d(g: &ScalarField, x: &Point, cfg: &QuadratureConfig) -> Result<QuadResult> {
    require_dim(g, 3)?;
    Ok(riesz_convolution(g, x, 1.0, cfg)?.scaled(1.0 / (4.0 * PI)))
}

/// `(1/2π²) ∫ g(y)/|x − y|² dy` on ℝ³, the inverse of the half-Laplacian.
pub fn riesz3d_inv_halflap(g: &ScalarField, x: &Point, cfg: &QuadratureConfig) -> Result<QuadResult> {
    require_dim(g, 3)?;
    Ok(riesz_convolution(g, x, 2.0, cfg)?.scaled(1.0 / (2.0 * PI * PI)))
}

/// `P(y) = ∫ v(z)^{6−σ} / |y − z|^σ dz` on ℝ³.
pub fn hartree(v: &ScalarField, sigma: f64, y: &Point, cfg: &QuadratureConfig) -> Result<QuadResult> {
    require_dim(v, 3)?;
    if !(sigma > 0.0 && sigma < 3.0) {
        return Err(Error::InvalidArgument(format!("sigma = {sigma} outside (0, 3)")));
    }
    let density = field_power(v, 6.0 - sigma)?;
    riesz_convolution(&density, y, sigma, cfg)
}

fn require_dim(g: &ScalarField, n: usize) -> Result<()> {
    if g.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: g.dim(),
        });
    }
    Ok(())
}

/// `ζ(x) = (1/2π) ∫ ln(|y|/|x − y|) g(y) dy` on ℝ².
///
/// Computed as `∫ ln|y| g` (polar about the origin) minus `∫ ln|x − y| g`
/// (polar about `x`), each with its own logarithmic tail; at `x = 0` the
/// kernel vanishes identically and the result is exactly 0.
pub fn logpot2d(g: &ScalarField, x: &Point, cfg: &QuadratureConfig) -> Result<QuadResult> {
    require_dim(g, 2)?;
    cfg.validate()?;
    check_point(g, x)?;
    if x.norm() == 0.0 {
        return Ok(QuadResult::zero());
    }
    let origin = Point::xy(0.0, 0.0);
    let about_origin = log_moment(g, &origin, cfg)?;
    let about_x = log_moment(g, x, cfg)?;
    Ok(QuadResult {
        value: (about_origin.value - about_x.value) / (2.0 * PI),
        error_estimate: (about_origin.error_estimate + about_x.error_estimate) / (2.0 * PI),
        tail_correction: (about_origin.tail_correction - about_x.tail_correction) / (2.0 * PI),
        evaluations: about_origin.evaluations + about_x.evaluations,
    })
}

/// `∫ ln|c − y| g(y) dy`.
fn log_moment(g: &ScalarField, c: &Point, cfg: &QuadratureConfig) -> Result<QuadResult> {
    let Some(hi) = radial_upper(g, 0.0, cfg)? else {
        return Ok(QuadResult::zero());
    };
    let (frame, symmetry) = polar_frame(g, c);
    let scale = g
        .focus()
        .map(|f| f.dist(c))
        .filter(|d| *d > 0.0)
        .map_or(1.0, |d| d.min(1.0));
    let out = polar(
        &frame,
        symmetry,
        c,
        0.0,
        hi,
        &RadialSpec {
            scale,
            min_extent: field_extent(g, c),
            ..RadialSpec::default()
        },
        |r| if r > 0.0 { r * r.ln() } else { 0.0 },
        |y, _, _| [g.eval(y)],
        cfg,
        &cfg.tolerance(),
        "logarithmic potential",
    )?;
    Ok(to_result(out))
}

/// `I(γ) = π^{n/2} Γ((n − 2γ)/2) / Γ(n − γ)`, the value at `x` of
/// `∫ |x − y|^{−2γ} (1 + |y|²)^{−(n−γ)} dy / (1 + |x|²)^{−γ}`.
#[allow(non_snake_case)]
pub fn riesz_identity_I(n: usize, gamma_: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidDimension(n));
    }
    let nf = n as f64;
    if !(gamma_ > 0.0 && gamma_ < nf / 2.0) {
        return Err(Error::InvalidArgument(format!(
            "gamma = {gamma_} outside (0, {})",
            nf / 2.0
        )));
    }
    Ok(PI.powf(nf / 2.0) * gamma((nf - 2.0 * gamma_) / 2.0) / gamma(nf - gamma_))
}

/// Radius and normalization of the Green's function of `(−Δ)^{1/2}` on the
/// ball `B_R(0) ⊂ ℝ³`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreenBallParams {
    #[serde(rename = "R")]
    pub radius: f64,
    pub c0: f64,
}

static GREEN_C0: OnceLock<f64> = OnceLock::new();

/// `C₀ = (1/2π)·(∫₀^∞ db/((1 + b)√b))⁻¹`, from the improper integral.
pub fn green_constant(cfg: &QuadratureConfig) -> Result<QuadResult> {
    let inner = integrate_radial_with(
        |b| 1.0 / ((1.0 + b) * b.sqrt()),
        0.0,
        Upper::Infinite { exponent: 1.5 },
        Some(-0.5),
        cfg,
    )?;
    Ok(QuadResult {
        value: 1.0 / (2.0 * PI * inner.value),
        error_estimate: inner.error_estimate / (2.0 * PI * inner.value * inner.value),
        tail_correction: 0.0,
        evaluations: inner.evaluations,
    })
}

impl GreenBallParams {
    /// Ball of radius `radius` with `C₀` from [`green_constant`] at default
    /// quadrature settings (computed once).
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidArgument(format!("ball radius {radius}")));
        }
        let c0 = match GREEN_C0.get() {
            Some(c) => *c,
            None => {
                let c = green_constant(&QuadratureConfig::default())?.value;
                *GREEN_C0.get_or_init(|| c)
            }
        };
        Ok(GreenBallParams { radius, c0 })
    }
}

/// `G_R(x, y) = (C₀/|x − y|)·2·arctan(√(t_R/s_R))` for `x, y` inside the
/// ball, 0 otherwise.
pub fn green_half_ball(params: &GreenBallParams, x: &Point, y: &Point) -> Result<f64> {
    if x.dim() != 3 || y.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: if x.dim() != 3 { x.dim() } else { y.dim() },
        });
    }
    let d = x.dist(y);
    if d == 0.0 {
        return Err(Error::Singular(x.coords().to_vec()));
    }
    let r2 = params.radius * params.radius;
    let (x2, y2) = (x.norm_sq() / r2, y.norm_sq() / r2);
    if x2 >= 1.0 || y2 >= 1.0 {
        return Ok(0.0);
    }
    let s = d * d / r2;
    let t = (1.0 - x2) * (1.0 - y2);
    Ok(params.c0 / d * 2.0 * (t / s).sqrt().atan())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{make_radial_field, DecayHint};

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn identity_constant_values() {
        assert!((riesz_identity_I(3, 1.0).unwrap() - PI * PI).abs() < 1e-12);
        assert!(riesz_identity_I(3, 1.5).is_err());
        assert!(riesz_identity_I(3, 0.0).is_err());
        assert!(riesz_identity_I(2, 0.5).unwrap() > 0.0);
    }

    #[test]
    fn inverse_half_laplacian_of_profile_square() {
        let g = make_radial_field(
            3,
            |r| (1.0 + r * r).powi(-2),
            Point::origin(3).unwrap(),
            Some(DecayHint::new(4.0, 1.0, 1.0).unwrap()),
        )
        .unwrap();
        let v = riesz3d_inv_halflap(&g, &Point::origin(3).unwrap(), &cfg()).unwrap();
        assert!((v.value - 0.5).abs() < 1e-9, "{v:?}");
    }

    #[test]
    fn zero_field_gives_zero() {
        let z2 = ScalarField::constant(2, 0.0).unwrap();
        let z3 = ScalarField::constant(3, 0.0).unwrap();
        let x2 = Point::xy(0.3, 0.2);
        let x3 = Point::xyz(0.3, 0.2, 0.1);
        assert_eq!(riesz2d(&z2, &x2, &cfg()).unwrap().value, 0.0);
        assert_eq!(logpot2d(&z2, &x2, &cfg()).unwrap().value, 0.0);
        assert_eq!(newton3d(&z3, &x3, &cfg()).unwrap().value, 0.0);
        assert_eq!(riesz3d_inv_halflap(&z3, &x3, &cfg()).unwrap().value, 0.0);
        assert_eq!(hartree(&z3, 2.0, &x3, &cfg()).unwrap().value, 0.0);
    }

    #[test]
    fn missing_decay_is_reported() {
        let g = ScalarField::new(2, |x| (-x.norm_sq()).exp()).unwrap();
        assert!(matches!(
            riesz2d(&g, &Point::xy(0.0, 0.0), &cfg()),
            Err(Error::MissingDecay(_))
        ));
    }

    #[test]
    fn logpot_vanishes_at_origin() {
        let g = ScalarField::new(2, |x| (-x.norm_sq()).exp()).unwrap();
        assert_eq!(logpot2d(&g, &Point::xy(0.0, 0.0), &cfg()).unwrap().value, 0.0);
    }

    #[test]
    fn logpot_of_disc_like_density() {
        // g = e^{−|y|²}/π has ζ(x) = (1/2π)(∫ln|y| g − ∫ln|x−y| g); for a
        // radial g the second term is the potential of the enclosed mass plus
        // the outer shells, which for |x| large approaches ln|x|.
        let g = make_radial_field(
            2,
            |r| (-r * r).exp() / PI,
            Point::xy(0.0, 0.0),
            Some(DecayHint::new(12.0, 1e6, 1.0).unwrap()),
        )
        .unwrap();
        let x = Point::xy(30.0, 0.0);
        let zeta = logpot2d(&g, &x, &cfg()).unwrap().value;
        // ∫ ln|y| e^{−|y|²}/π dy = −γ_E/2
        let euler = 0.577_215_664_901_532_9;
        let expected = (-euler / 2.0 - 30f64.ln()) / (2.0 * PI);
        assert!((zeta - expected).abs() < 1e-9, "{zeta} vs {expected}");
    }

    #[test]
    fn green_constant_from_improper_integral() {
        let c = green_constant(&cfg()).unwrap();
        assert!((c.value - 1.0 / (2.0 * PI * PI)).abs() < 1e-10);
    }

    #[test]
    fn green_outside_is_zero_and_diagonal_rejected() {
        let p = GreenBallParams::new(1.0).unwrap();
        let a = Point::xyz(0.1, 0.2, 0.0);
        assert_eq!(green_half_ball(&p, &a, &Point::xyz(1.0, 0.0, 0.0)).unwrap(), 0.0);
        assert_eq!(green_half_ball(&p, &Point::xyz(0.0, 2.0, 0.0), &a).unwrap(), 0.0);
        assert!(green_half_ball(&p, &a, &a).is_err());
        assert!(green_half_ball(&p, &a, &Point::xyz(0.0, 0.0, 0.5)).unwrap() > 0.0);
    }
}
