//! Exact bubble solutions, their constants and invariants, Kelvin transforms,
//! moving-spheres difference fields and the critical scale.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{make_radial_field, probe_directions, DecayHint, Point, ScalarField};
use crate::par::{self, Exec};
use crate::potentials::riesz_identity_I;

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} = {x} must be positive")))
    }
}

/// Decay hint about the origin for a profile bounded by `k·|x − c|^(−e)`
/// for `|x − c| ≥ valid`.
fn hint_about_origin(exponent: f64, k: f64, center: &Point, valid: f64) -> Result<DecayHint> {
    let shift = center.norm();
    DecayHint::new(exponent, k * 2f64.powf(exponent), valid.max(2.0 * shift).max(1e-3))
}

/// Parameters of the planar bubble `(u, v)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bubble2DParams {
    pub p: f64,
    pub mu: f64,
    pub center: Point,
}

/// Closed-form constants of the planar bubble.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bubble2DInvariants {
    /// Logarithmic decay rate of `v`, equal to `3/p`.
    pub alpha: f64,
    /// Limit of `|x|·u(x)`.
    pub beta: f64,
    /// Additive constant of the logarithmic representation of `v`, `v(0)`.
    pub gamma_const: f64,
    /// `∫ u⁴ = 6π/p`.
    pub total_u4: f64,
    /// `∫ e^{pv} = (6/p)^{1/4}·2π/√μ`.
    pub total_epv: f64,
    /// `∫ e^{4pv/3} = (6/p)^{1/3}π`.
    pub total_e4pv3: f64,
}

impl Bubble2DParams {
    pub fn new(p: f64, mu: f64, center: Point) -> Result<Self> {
        positive("p", p)?;
        positive("mu", mu)?;
        if center.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: center.dim(),
            });
        }
        Ok(Bubble2DParams { p, mu, center })
    }

    /// `(6/p)^{1/4}`
    fn amplitude(&self) -> f64 {
        (6.0 / self.p).powf(0.25)
    }

    pub fn u_profile(&self, r: f64) -> f64 {
        let mu = self.mu;
        self.amplitude() * (mu / (1.0 + mu * mu * r * r)).sqrt()
    }

    pub fn v_profile(&self, r: f64) -> f64 {
        let mu = self.mu;
        1.5 / self.p * ((6.0 / self.p).powf(1.0 / 6.0) * mu / (1.0 + mu * mu * r * r)).ln()
    }

    /// `e^{p v}` in closed form.
    pub fn epv_profile(&self, r: f64) -> f64 {
        let mu = self.mu;
        ((6.0 / self.p).powf(1.0 / 6.0) * mu / (1.0 + mu * mu * r * r)).powf(1.5)
    }

    pub fn u_field(&self) -> Result<ScalarField> {
        let b = *self;
        let k = self.amplitude() / self.mu.sqrt();
        make_radial_field(
            2,
            move |r| b.u_profile(r),
            self.center,
            Some(hint_about_origin(1.0, k, &self.center, 1.0 / self.mu)?),
        )
    }

    pub fn v_field(&self) -> Result<ScalarField> {
        let b = *self;
        make_radial_field(2, move |r| b.v_profile(r), self.center, None)
    }

    pub fn epv_field(&self) -> Result<ScalarField> {
        let b = *self;
        let k = (6.0 / self.p).powf(0.25) * self.mu.powf(-1.5);
        make_radial_field(
            2,
            move |r| b.epv_profile(r),
            self.center,
            Some(hint_about_origin(3.0, k, &self.center, 1.0 / self.mu)?),
        )
    }

    /// `u⁴ = (6/p)·μ²/(1 + μ²r²)²`
    pub fn u4_field(&self) -> Result<ScalarField> {
        let (c, mu) = (6.0 / self.p, self.mu);
        make_radial_field(
            2,
            move |r| c * mu * mu / (1.0 + mu * mu * r * r).powi(2),
            self.center,
            Some(hint_about_origin(4.0, c / (mu * mu), &self.center, 1.0 / mu)?),
        )
    }

    /// `e^{4pv/3} = ((6/p)^{1/6} μ/(1 + μ²r²))²`
    pub fn e4pv3_field(&self) -> Result<ScalarField> {
        let (c, mu) = ((6.0 / self.p).powf(1.0 / 6.0), self.mu);
        make_radial_field(
            2,
            move |r| (c * mu / (1.0 + mu * mu * r * r)).powi(2),
            self.center,
            Some(hint_about_origin(4.0, c * c / (mu * mu), &self.center, 1.0 / mu)?),
        )
    }
}

pub fn bubble2d_eval(params: &Bubble2DParams, x: &Point) -> (f64, f64) {
    let r = x.dist(&params.center);
    (params.u_profile(r), params.v_profile(r))
}

pub fn bubble2d_invariants(params: &Bubble2DParams) -> Bubble2DInvariants {
    let p = params.p;
    let alpha = 3.0 / p;
    Bubble2DInvariants {
        alpha,
        beta: (6.0 / p).powf(0.25) / params.mu.sqrt(),
        gamma_const: params.v_profile(params.center.norm()),
        total_u4: 2.0 * PI * alpha,
        total_epv: (6.0 / p).powf(0.25) * 2.0 * PI / params.mu.sqrt(),
        total_e4pv3: (6.0 / p).powf(1.0 / 3.0) * PI,
    }
}

/// Parameters and constants of the Hartree bubble in ℝ³.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bubble3DParams {
    pub sigma: f64,
    pub mu: f64,
    pub center: Point,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "Cprime")]
    pub c_prime: f64,
}

impl Bubble3DParams {
    pub fn new(sigma: f64, mu: f64, center: Point) -> Result<Self> {
        if !(sigma > 0.0 && sigma < 3.0) {
            return Err(Error::InvalidArgument(format!("sigma = {sigma} outside (0, 3)")));
        }
        positive("mu", mu)?;
        if center.dim() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                got: center.dim(),
            });
        }
        let (c, c_prime) = bubble3d_constants(sigma)?;
        Ok(Bubble3DParams {
            sigma,
            mu,
            center,
            c,
            c_prime,
        })
    }

    /// `μ/(1 + μ²r²)`
    fn shape(&self, r: f64) -> f64 {
        self.mu / (1.0 + self.mu * self.mu * r * r)
    }

    pub fn u_profile(&self, r: f64) -> f64 {
        self.c * self.shape(r)
    }

    pub fn v_profile(&self, r: f64) -> f64 {
        self.c_prime * self.shape(r).sqrt()
    }

    /// Closed form of the Hartree term `P = C′^{6−σ} I(σ/2) (μ/(1 + μ²r²))^{σ/2}`.
    pub fn hartree_profile(&self, r: f64) -> f64 {
        let i = riesz_identity_I(3, self.sigma / 2.0).expect("sigma validated on construction");
        self.c_prime.powf(6.0 - self.sigma) * i * self.shape(r).powf(self.sigma / 2.0)
    }

    fn field<P>(&self, profile: P, exponent: f64, k: f64) -> Result<ScalarField>
    where
        P: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        make_radial_field(
            3,
            profile,
            self.center,
            Some(hint_about_origin(exponent, k, &self.center, 1.0 / self.mu)?),
        )
    }

    pub fn u_field(&self) -> Result<ScalarField> {
        let b = *self;
        self.field(move |r| b.u_profile(r), 2.0, self.c / self.mu)
    }

    pub fn v_field(&self) -> Result<ScalarField> {
        let b = *self;
        self.field(move |r| b.v_profile(r), 1.0, self.c_prime / self.mu.sqrt())
    }

    pub fn hartree_field(&self) -> Result<ScalarField> {
        let b = *self;
        let k = self.hartree_profile(0.0) * self.mu.powf(-self.sigma);
        self.field(move |r| b.hartree_profile(r), self.sigma, k)
    }
}

/// `(C, C′)` for a given σ.
pub fn bubble3d_constants(sigma: f64) -> Result<(f64, f64)> {
    let i = riesz_identity_I(3, sigma / 2.0)?;
    let e = 1.0 / (24.0 - 5.0 * sigma);
    let c = (2.0 * 3f64.powf(2.0 * (5.0 - sigma)) / i).powf(e);
    let c_prime = (3.0 * 2f64.powf(2.5) / i.powf(2.5)).powf(e);
    Ok((c, c_prime))
}

pub fn bubble3d_eval(params: &Bubble3DParams, x: &Point) -> (f64, f64) {
    let r = x.dist(&params.center);
    (params.u_profile(r), params.v_profile(r))
}

/// Either bubble family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum BubbleParams {
    Planar(Bubble2DParams),
    Hartree(Bubble3DParams),
}

impl BubbleParams {
    pub fn dim(&self) -> usize {
        match self {
            BubbleParams::Planar(_) => 2,
            BubbleParams::Hartree(_) => 3,
        }
    }

    pub fn mu(&self) -> f64 {
        match self {
            BubbleParams::Planar(b) => b.mu,
            BubbleParams::Hartree(b) => b.mu,
        }
    }

    pub fn center(&self) -> Point {
        match self {
            BubbleParams::Planar(b) => b.center,
            BubbleParams::Hartree(b) => b.center,
        }
    }

    fn eval(&self, x: &Point) -> (f64, f64) {
        match self {
            BubbleParams::Planar(b) => bubble2d_eval(b, x),
            BubbleParams::Hartree(b) => bubble3d_eval(b, x),
        }
    }

    /// The radius of exact Kelvin self-similarity about `x0`,
    /// `√(1 + μ²d²)/μ` with `d = |x0 − center|`.
    pub fn algebraic_critical_scale(&self, x0: &Point) -> f64 {
        let mu = self.mu();
        let d = x0.dist(&self.center());
        (1.0 + mu * mu * d * d).sqrt() / mu
    }
}

/// Inversion in the sphere `|x − center| = lambda`, with conformal weight
/// exponent `nu`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KelvinSpec {
    pub center: Point,
    pub lambda: f64,
    pub nu: f64,
}

impl KelvinSpec {
    pub fn new(center: Point, lambda: f64, nu: f64) -> Result<Self> {
        positive("lambda", lambda)?;
        if !nu.is_finite() {
            return Err(Error::InvalidArgument(format!("nu = {nu}")));
        }
        Ok(KelvinSpec { center, lambda, nu })
    }

    /// `(λ/|x − x₀|, x^{x₀,λ})`
    fn ratio_and_image(&self, x: &Point) -> Result<(f64, Point)> {
        if x.dim() != self.center.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.center.dim(),
                got: x.dim(),
            });
        }
        let d = *x - self.center;
        let r2 = d.norm_sq();
        if r2 == 0.0 {
            return Err(Error::Singular(x.coords().to_vec()));
        }
        let image = self.center + d * (self.lambda * self.lambda / r2);
        Ok((self.lambda / r2.sqrt(), image))
    }
}

/// `x^{x₀,λ} = λ²(x − x₀)/|x − x₀|² + x₀`
pub fn kelvin_point(x: &Point, spec: &KelvinSpec) -> Result<Point> {
    Ok(spec.ratio_and_image(x)?.1)
}

/// `(λ/|x − x₀|)^ν f(x^{x₀,λ})`
pub fn kelvin_field(f: &ScalarField, spec: &KelvinSpec, x: &Point) -> Result<f64> {
    let (ratio, image) = spec.ratio_and_image(x)?;
    Ok(ratio.powf(spec.nu) * f.eval(&image))
}

/// `v(x^{x₀,λ}) + (3/p) ln(λ/|x − x₀|)`; `spec.nu` is not used.
pub fn kelvin_v_log(v: &ScalarField, p: f64, spec: &KelvinSpec, x: &Point) -> Result<f64> {
    positive("p", p)?;
    let (ratio, image) = spec.ratio_and_image(x)?;
    Ok(v.eval(&image) + 3.0 / p * ratio.ln())
}

/// Moving-spheres differences `(w_u, w_v)` at `x` for the sphere of `spec`.
///
/// The conformal exponents are those of the family (planar: `u` with 1, `v`
/// in log form; Hartree: `u` with 2, `v` with 1); `spec.nu` is not used.
pub fn msdiff(params: &BubbleParams, spec: &KelvinSpec, x: &Point) -> Result<(f64, f64)> {
    if spec.center.dim() != params.dim() {
        return Err(Error::DimensionMismatch {
            expected: params.dim(),
            got: spec.center.dim(),
        });
    }
    let (ratio, image) = spec.ratio_and_image(x)?;
    let (u, v) = params.eval(x);
    let (ui, vi) = params.eval(&image);
    Ok(match params {
        BubbleParams::Planar(b) => (ratio * ui - u, vi + 3.0 / b.p * ratio.ln() - v),
        BubbleParams::Hartree(_) => (ratio * ratio * ui - u, ratio * vi - v),
    })
}

/// 50 points on three concentric circles or spheres of radii
/// `0.25λ, 0.5λ, 0.9λ` about `x0`.
pub fn difference_probes(x0: &Point, lambda: f64) -> Vec<Point> {
    let counts = [16usize, 17, 17];
    let radii = [0.25, 0.5, 0.9];
    let mut out = Vec::with_capacity(50);
    for (ring, (&count, &frac)) in counts.iter().zip(radii.iter()).enumerate() {
        let r = frac * lambda;
        for j in 0..count {
            let dir = if x0.dim() == 2 {
                let t = 2.0 * PI * (j as f64 + 0.5 * ring as f64) / count as f64;
                Point::xy(t.cos(), t.sin())
            } else {
                // Fibonacci lattice
                let golden = PI * (3.0 - 5f64.sqrt());
                let z = 1.0 - 2.0 * (j as f64 + 0.5) / count as f64;
                let s = (1.0 - z * z).sqrt();
                let t = golden * j as f64 + ring as f64;
                Point::xyz(s * t.cos(), s * t.sin(), z)
            };
            out.push(x0.offset(&dir, r));
        }
    }
    out
}

/// Extremes of the difference fields over the probe set at one λ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DifferenceSummary {
    pub lambda: f64,
    pub min_w_u: f64,
    pub max_w_u: f64,
    pub max_abs_w_v: f64,
}

impl DifferenceSummary {
    pub fn max_abs_w_u(&self) -> f64 {
        self.min_w_u.abs().max(self.max_w_u.abs())
    }

    /// `1` or `−1` when `w_u` has a strict uniform sign, `0` otherwise.
    pub fn uniform_sign(&self) -> i32 {
        if self.min_w_u > 0.0 {
            1
        } else if self.max_w_u < 0.0 {
            -1
        } else {
            0
        }
    }
}

pub fn difference_summary(params: &BubbleParams, x0: &Point, lambda: f64) -> Result<DifferenceSummary> {
    let spec = KelvinSpec::new(*x0, lambda, 0.0)?;
    let mut s = DifferenceSummary {
        lambda,
        min_w_u: f64::INFINITY,
        max_w_u: f64::NEG_INFINITY,
        max_abs_w_v: 0.0,
    };
    for x in difference_probes(x0, lambda) {
        let (wu, wv) = msdiff(params, &spec, &x)?;
        s.min_w_u = s.min_w_u.min(wu);
        s.max_w_u = s.max_w_u.max(wu);
        s.max_abs_w_v = s.max_abs_w_v.max(wv.abs());
    }
    Ok(s)
}

/// [`difference_summary`] over several λ, evaluated in parallel and returned
/// in input order.
pub fn difference_scan(
    params: &BubbleParams,
    x0: &Point,
    lambdas: &[f64],
    exec: Exec,
) -> Result<Vec<DifferenceSummary>> {
    par::map(exec, lambdas, |l| difference_summary(params, x0, *l))
        .into_iter()
        .collect()
}

fn mean_w_u(params: &BubbleParams, x0: &Point, lambda: f64) -> Result<f64> {
    let spec = KelvinSpec::new(*x0, lambda, 0.0)?;
    let probes = difference_probes(x0, lambda);
    let mut sum = 0.0;
    for x in &probes {
        sum += msdiff(params, &spec, x)?.0;
    }
    Ok(sum / probes.len() as f64)
}

/// The λ at which `w_u` changes sign over `B_λ(x0)`, by bisection to an
/// absolute width `tol`.
///
/// The search brackets `[λ_alg/2, 2λ_alg]` around the algebraic prediction
/// and falls back to a geometric scan of `[1e−2, 1e2]`.
pub fn critical_scale(params: &BubbleParams, x0: &Point, tol: f64) -> Result<f64> {
    positive("tol", tol)?;
    if x0.dim() != params.dim() {
        return Err(Error::DimensionMismatch {
            expected: params.dim(),
            got: x0.dim(),
        });
    }
    let predicted = params.algebraic_critical_scale(x0);
    let s = |l: f64| mean_w_u(params, x0, l);
    let (mut lo, mut hi) = (0.5 * predicted, 2.0 * predicted);
    let (mut s_lo, s_hi) = (s(lo)?, s(hi)?);
    if s_lo * s_hi > 0.0 {
        let grid: Vec<f64> = (0..=80).map(|k| 1e-2 * 10f64.powf(k as f64 / 20.0)).collect();
        let mut found = None;
        let mut prev = (grid[0], s(grid[0])?);
        for &l in &grid[1..] {
            let cur = s(l)?;
            if prev.1 * cur <= 0.0 {
                found = Some((prev.0, l, prev.1));
                break;
            }
            prev = (l, cur);
        }
        let Some((a, b, sa)) = found else {
            return Err(Error::BracketFailure(format!(
                "w_u keeps one sign for λ in [1e-2, 1e2] about {x0}"
            )));
        };
        lo = a;
        hi = b;
        s_lo = sa;
    }
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let sm = s(mid)?;
        if sm == 0.0 {
            return Ok(mid);
        }
        if sm * s_lo > 0.0 {
            lo = mid;
            s_lo = sm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Fitted far-field constants of a planar solution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFit {
    /// Minus the least-squares slope of `v` against `ln|x|`.
    pub alpha_hat: f64,
    /// Mean of `|x|·u(x)`.
    pub beta_hat: f64,
    /// Minus the mean of `v(x)/ln|x|`, which converges only logarithmically.
    pub alpha_ratio: f64,
}

/// Geometric radii from 10² to 10⁴.
pub fn default_asymptotic_radii() -> Vec<f64> {
    (0..=8).map(|k| 100.0 * 10f64.powf(k as f64 / 4.0)).collect()
}

/// Fits the decay rates of `(u, v)` over the given radii and the eight
/// standard probe directions about the origin.
pub fn asymptotics_fit_fields(u: &ScalarField, v: &ScalarField, radii: &[f64]) -> Result<AsymptoticFit> {
    if u.dim() != 2 || v.dim() != 2 {
        return Err(Error::InvalidDimension(if u.dim() != 2 { u.dim() } else { v.dim() }));
    }
    if radii.len() < 2 {
        return Err(Error::InvalidArgument("need at least two radii".into()));
    }
    if radii.iter().any(|r| !(*r >= 100.0) || !r.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "radii must be at least 1e2 (got {radii:?})"
        )));
    }
    if radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("radii must be increasing".into()));
    }
    let dirs = probe_directions(2);
    let origin = Point::xy(0.0, 0.0);
    let (mut sl, mut sv, mut sll, mut slv) = (0.0, 0.0, 0.0, 0.0);
    let (mut beta, mut ratio) = (0.0, 0.0);
    let mut count = 0.0;
    for &r in radii {
        let l = r.ln();
        for d in &dirs {
            let x = origin.offset(d, r);
            let vx = v.eval(&x);
            sl += l;
            sv += vx;
            sll += l * l;
            slv += l * vx;
            beta += r * u.eval(&x);
            ratio += -vx / l;
            count += 1.0;
        }
    }
    let slope = (count * slv - sl * sv) / (count * sll - sl * sl);
    Ok(AsymptoticFit {
        alpha_hat: -slope,
        beta_hat: beta / count,
        alpha_ratio: ratio / count,
    })
}

pub fn asymptotics_fit(params: &Bubble2DParams, radii: &[f64]) -> Result<AsymptoticFit> {
    asymptotics_fit_fields(&params.u_field()?, &params.v_field()?, radii)
}
