//! The half-Laplacian by two independent definitions, its normalization
//! constant, and a finite-difference Laplacian.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{check_dim, make_radial_field, DecayHint, Point, ScalarField};
use crate::par::{self, Exec};
use crate::quadrature::{
    field_extent, integrate_pv, polar, polar_frame, richardson, sphere_area, Frame, PvKernel, QuadResult,
    QuadratureConfig, RadialSpec, Symmetry, Upper,
};

/// Normalization of `(−Δ)^{α/2}`.
///
/// `c_n_alpha` multiplies the singular-integral definition; `extension_constant`
/// multiplies the harmonic-extension definition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FracLapConvention {
    pub n: usize,
    pub alpha: f64,
    pub c_n_alpha: f64,
    pub extension_constant: f64,
}

static HALF_LAP_2D: OnceLock<FracLapConvention> = OnceLock::new();
static HALF_LAP_3D: OnceLock<FracLapConvention> = OnceLock::new();

impl FracLapConvention {
    /// The square root of the Laplacian on ℝⁿ. The singular-integral constant
    /// comes from [`cn_alpha`]; the extension constant is calibrated once
    /// against it on a Gaussian basis. Both are computed on first use.
    pub fn half_laplacian(n: usize) -> Result<Self> {
        check_dim(n)?;
        let cell = if n == 2 { &HALF_LAP_2D } else { &HALF_LAP_3D };
        if let Some(c) = cell.get() {
            return Ok(*c);
        }
        let cfg = QuadratureConfig::default();
        let c_n_alpha = cn_alpha(n, 1.0, &cfg)?;
        let mut conv = FracLapConvention {
            n,
            alpha: 1.0,
            c_n_alpha,
            extension_constant: 1.0,
        };
        conv.extension_constant = calibrate_extension_constant(&conv, &cfg)?.constant;
        let _ = cell.set(conv);
        Ok(*cell.get().expect("initialized above"))
    }
}

/// `∫_{ℝⁿ} (1 − cos(k ζ₁)) / |ζ|^{n+α} dζ` by radial–angular quadrature.
///
/// Below `|ζ| = 0.1/k` the angular mean is replaced by its Taylor series;
/// beyond `R = 400/k` the non-oscillatory part is integrated analytically and
/// the oscillatory remainder is bounded in the error estimate.
pub fn defining_integral(
    n: usize,
    alpha: f64,
    frequency: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadResult> {
    check_dim(n)?;
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha = {alpha} outside (0, 2)"
        )));
    }
    if !(frequency > 0.0) || !frequency.is_finite() {
        return Err(Error::InvalidArgument(format!("frequency {frequency}")));
    }
    cfg.validate()?;
    let k = frequency;
    let nf = n as f64;
    let area = sphere_area(n);
    let r_small = 0.1 / k;
    let r_big = 400.0 / k;

    // angular moments ⟨ω₁²⟩, ⟨ω₁⁴⟩, ⟨ω₁⁶⟩ on S^{n−1}
    let m2 = 1.0 / nf;
    let m4 = 3.0 / (nf * (nf + 2.0));
    let m6 = 15.0 / (nf * (nf + 2.0) * (nf + 4.0));
    // 1 − cos t = t²/2 − t⁴/24 + t⁶/720 − …
    let taylor = area
        * (k.powi(2) * m2 / 2.0 * r_small.powf(2.0 - alpha) / (2.0 - alpha)
            - k.powi(4) * m4 / 24.0 * r_small.powf(4.0 - alpha) / (4.0 - alpha)
            + k.powi(6) * m6 / 720.0 * r_small.powf(6.0 - alpha) / (6.0 - alpha));
    let taylor_err = area * k.powi(8) / 40320.0 * r_small.powf(8.0 - alpha) / (8.0 - alpha);

    let origin = Point::origin(n)?;
    let frame = Frame::new(n, None);
    let mid = polar(
        &frame,
        Symmetry::Axial,
        &origin,
        r_small,
        Upper::Finite(r_big),
        &RadialSpec {
            scale: PI / k,
            ..RadialSpec::default()
        },
        |r| r.powf(-1.0 - alpha),
        |y, _, _| [1.0 - (k * y.coords()[0]).cos()],
        cfg,
        &cfg.tolerance(),
        "normalization integral",
    )?;

    let tail = area * r_big.powf(-alpha) / alpha;
    // oscillatory remainder ~ |S| (k R)^{-(n-1)/2} R^{-α} / (k R)
    let osc_bound = area * (k * r_big).powf(-(nf - 1.0) / 2.0) * r_big.powf(-alpha) / (k * r_big);

    Ok(QuadResult {
        value: taylor + mid.value[0] + tail,
        error_estimate: taylor_err + mid.error[0] + osc_bound,
        tail_correction: tail,
        evaluations: mid.evaluations,
    })
}

/// Normalization constant of `(−Δ)^{α/2}` for the unit-frequency symbol
/// `|ξ|^α`: the reciprocal of [`defining_integral`] with frequency 1.
pub fn cn_alpha(n: usize, alpha: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(1.0 / defining_integral(n, alpha, 1.0, cfg)?.value)
}

/// The same constant with the `cos(2πζ₁)` normalization, which corresponds to
/// the symbol `|ξ|^α` under the `e^{−2πix·ξ}` Fourier transform. It equals
/// `(2π)^{−α}·cn_alpha`.
pub fn cn_alpha_two_pi(n: usize, alpha: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(1.0 / defining_integral(n, alpha, 2.0 * PI, cfg)?.value)
}

fn ensure_regular_point(f: &ScalarField, x: &Point) -> Result<()> {
    if x.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: x.dim(),
        });
    }
    if f.near_singularity(x, 0.0) {
        return Err(Error::Singular(x.coords().to_vec()));
    }
    Ok(())
}

/// `C_{n,α} P.V.∫ (f(x) − f(y)) / |x − y|^{n+α} dy`.
pub fn fraclap_pv(
    f: &ScalarField,
    x: &Point,
    convention: &FracLapConvention,
    cfg: &QuadratureConfig,
) -> Result<QuadResult> {
    ensure_regular_point(f, x)?;
    if convention.n != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: convention.n,
            got: f.dim(),
        });
    }
    let order = f.dim() as f64 + convention.alpha;
    let fx = f.eval(x);
    let k = |x: &Point, y: &Point| (fx - f.eval(y)) / x.dist(y).powf(order);
    let kernel = PvKernel { eval: &k, order };
    Ok(integrate_pv(&kernel, f, x, cfg)?.scaled(convention.c_n_alpha))
}

/// `∫ (|x−ξ|² − n y²)/(|x−ξ|² + y²)^{(n+3)/2} f(ξ) dξ` at a fixed height `y > 0`.
pub fn extension_derivative(
    f: &ScalarField,
    x: &Point,
    y: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadResult> {
    ensure_regular_point(f, x)?;
    if !(y > 0.0) {
        return Err(Error::InvalidArgument(format!("extension height {y} must be > 0")));
    }
    let n = f.dim();
    let nf = n as f64;
    let fx = f.eval(x);
    let (frame, symmetry) = polar_frame(f, x);
    let nm1 = (n - 1) as i32;
    let y2 = y * y;
    let noise = |r: f64| {
        64.0 * f64::EPSILON * (fx.abs() + f.eval(&x.offset(&frame.a, r)).abs())
    };
    let out = polar(
        &frame,
        symmetry,
        x,
        0.0,
        Upper::Infinite { exponent: 2.0 },
        &RadialSpec {
            scale: y,
            origin_power: None,
            noise: Some(&noise),
            min_extent: field_extent(f, x),
        },
        |r| {
            let r2 = r * r;
            r.powi(nm1) * (r2 - nf * y2) / (r2 + y2).powf((nf + 3.0) / 2.0)
        },
        |_, r, omega| {
            let fp = f.eval(&x.offset(omega, r));
            let fm = f.eval(&x.offset(omega, -r));
            [0.5 * (fp + fm) - fx]
        },
        cfg,
        &cfg.tolerance(),
        "extension integral",
    )?;
    Ok(QuadResult {
        value: out.value[0],
        error_estimate: out.error[0],
        tail_correction: out.tail[0],
        evaluations: out.evaluations,
    })
}

/// Raw extension limit `−lim_{y→0⁺} ∫ K_y(x − ξ) f(ξ) dξ` without the
/// constant, extrapolated over the heights `cfg.pv_epsilons`.
pub fn extension_limit(f: &ScalarField, x: &Point, cfg: &QuadratureConfig) -> Result<QuadResult> {
    cfg.validate()?;
    let mut samples = Vec::with_capacity(cfg.pv_epsilons.len());
    let mut error = 0.0;
    let mut evaluations = 0;
    for &y in &cfg.pv_epsilons {
        let r = extension_derivative(f, x, y, cfg)?;
        samples.push(-r.value);
        error += r.error_estimate;
        evaluations += r.evaluations;
    }
    let last = samples[samples.len() - 1];
    let ex = richardson(&samples, 100.0 * error + cfg.abs_tol + 1e-12 * last.abs())?;
    Ok(QuadResult {
        value: ex.value,
        error_estimate: ex.spread + error,
        tail_correction: 0.0,
        evaluations,
    })
}

/// `(−Δ)^{1/2} f(x)` through the harmonic extension.
pub fn fraclap_extension(
    f: &ScalarField,
    x: &Point,
    convention: &FracLapConvention,
    cfg: &QuadratureConfig,
) -> Result<QuadResult> {
    if convention.n != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: convention.n,
            got: f.dim(),
        });
    }
    if convention.alpha != 1.0 {
        return Err(Error::InvalidArgument(
            "the extension definition is implemented for α = 1 only".into(),
        ));
    }
    Ok(extension_limit(f, x, cfg)?.scaled(convention.extension_constant))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub constant: f64,
    /// Largest relative misfit over the basis after calibration.
    pub max_relative_misfit: f64,
    pub samples: usize,
}

/// Gaussians `exp(−|x|²/s²)` used for calibration and cross-checks.
pub fn gaussian(n: usize, width: f64) -> Result<ScalarField> {
    let w2 = width * width;
    make_radial_field(
        n,
        move |r| (-r * r / w2).exp(),
        Point::origin(n)?,
        Some(DecayHint::new(
            8.0,
            (4.0 * w2 / std::f64::consts::E).powi(4),
            1.0,
        )?),
    )
}

/// Least-squares fit of the extension constant so the extension definition
/// matches the singular-integral definition on a Gaussian basis.
pub fn calibrate_extension_constant(
    convention: &FracLapConvention,
    cfg: &QuadratureConfig,
) -> Result<Calibration> {
    let n = convention.n;
    let mut cases = Vec::new();
    for &w in &[0.5, 1.0, 2.0] {
        for &d in &[0.0, 0.5, 1.5] {
            let mut c = vec![0.0; n];
            c[0] = d;
            cases.push((w, Point::new(&c)?));
        }
    }
    let pairs: Vec<Result<(f64, f64)>> = par::map(Exec::default(), &cases, |(w, x)| {
        let g = gaussian(n, *w)?;
        let pv = fraclap_pv(&g, x, convention, cfg)?.value;
        let raw = extension_limit(&g, x, cfg)?.value;
        Ok((raw, pv))
    });
    let pairs: Vec<(f64, f64)> = pairs.into_iter().collect::<Result<_>>()?;
    let (num, den) = pairs
        .iter()
        .fold((0.0, 0.0), |(a, b), (e, v)| (a + e * v, b + e * e));
    let constant = num / den;
    let max_relative_misfit = pairs
        .iter()
        .map(|(e, v)| (constant * e - v).abs() / v.abs().max(1e-300))
        .fold(0.0, f64::max);
    Ok(Calibration {
        constant,
        max_relative_misfit,
        samples: pairs.len(),
    })
}

/// Default finite-difference step `1e−2·(1 + |x − center|)`.
pub fn default_fd_step(f: &ScalarField, x: &Point) -> f64 {
    let center = f.focus().unwrap_or_else(|| Point::origin(f.dim()).expect("valid dim"));
    1e-2 * (1.0 + x.dist(&center))
}

/// `−Δf(x)` by fourth-order central differences along each axis.
pub fn laplacian_fd(f: &ScalarField, x: &Point, h: f64) -> Result<f64> {
    if x.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: x.dim(),
        });
    }
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidArgument(format!("step {h} must be positive")));
    }
    if f.near_singularity(x, 2.0 * h * (1.0 + 1e-12)) {
        return Err(Error::Singular(x.coords().to_vec()));
    }
    let f0 = f.eval(x);
    let mut lap = 0.0;
    for i in 0..f.dim() {
        let e = Point::unit(f.dim(), i)?;
        let fp1 = f.eval(&x.offset(&e, h));
        let fm1 = f.eval(&x.offset(&e, -h));
        let fp2 = f.eval(&x.offset(&e, 2.0 * h));
        let fm2 = f.eval(&x.offset(&e, -2.0 * h));
        lap += (-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * h * h);
    }
    Ok(-lap)
}
