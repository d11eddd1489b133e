use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use statrs::function::gamma::gamma;

use super::{default_probes, ie_probes, IntegralCheck, ResidualRecord, VerificationReport};
use crate::bubbles::{
    asymptotics_fit, bubble2d_invariants, bubble3d_constants, critical_scale, default_asymptotic_radii,
    difference_scan, difference_summary, kelvin_field, kelvin_point, kelvin_v_log, Bubble2DParams,
    Bubble3DParams, BubbleParams, KelvinSpec,
};
use crate::error::Result;
use crate::fields::{field_power, make_radial_field, DecayHint, Point, ScalarField};
use crate::fraclap::{cn_alpha, default_fd_step, fraclap_extension, fraclap_pv, gaussian, laplacian_fd, FracLapConvention};
use crate::inequalities::{explogl_gap, explogl_gap_sharp, hls_ratio, orlicz_pair};
use crate::par::{self, Exec};
use crate::potentials::{
    green_constant, green_half_ball, hartree, logpot2d, newton3d, riesz2d, riesz3d_inv_halflap,
    riesz_convolution, riesz_identity_I, GreenBallParams,
};
use crate::quadrature::{integrate_space, QuadratureConfig};

pub const PDE2D_FRACLAP_TOL: f64 = 1e-3;
pub const PDE2D_LAPLACIAN_TOL: f64 = 1e-6;
pub const IE2D_TOL: f64 = 1e-4;
pub const PDE3D_TOL: f64 = 1e-3;
pub const HARTREE_TOL: f64 = 1e-4;
pub const IE3D_TOL: f64 = 1e-3;
pub const TOTAL_INTEGRAL_TOL: f64 = 1e-6;
pub const RIESZ_IDENTITY_TOL: f64 = 1e-4;
pub const CONSTANT_IDENTITY_TOL: f64 = 1e-12;
pub const GREEN_CONSTANT_TOL: f64 = 1e-8;
pub const GREEN_SCALING_TOL: f64 = 1e-10;
pub const CN_ALPHA_TOL: f64 = 1e-6;
pub const EXTENSION_CONSTANT_TOL: f64 = 1e-4;
pub const ASYMPTOTIC_ALPHA_TOL: f64 = 0.02;
pub const ASYMPTOTIC_BETA_TOL: f64 = 0.01;
pub const CROSS_CHECK_TOL: f64 = 1e-3;
pub const INVOLUTION_TOL: f64 = 1e-12;
pub const CRITICAL_SCALE_TOL: f64 = 1e-6;
pub const CRITICAL_DIFFERENCE_TOL: f64 = 1e-8;
pub const GAP_TOL: f64 = 1e-12;
pub const HLS_SCALE_TOL: f64 = 1e-10;
pub const HLS_CLOSED_FORM_TOL: f64 = 1e-3;

/// Default seed for the randomized checks.
pub const DEFAULT_SEED: u64 = 42;

/// σ values for the 3D constant identities.
pub const CONSTANT_SIGMAS: [f64; 4] = [0.5, 1.0, 2.0, 2.5];

/// A candidate planar pair `(u, v)`; [`PlanarFields::exact`] is the bubble.
#[derive(Clone, Debug)]
pub struct PlanarFields {
    pub u: ScalarField,
    pub v: ScalarField,
}

impl PlanarFields {
    pub fn exact(params: &Bubble2DParams) -> Result<Self> {
        Ok(PlanarFields {
            u: params.u_field()?,
            v: params.v_field()?,
        })
    }
}

fn echo(suite: &str, params: impl serde::Serialize, probes: &[Point], cfg: &QuadratureConfig) -> serde_json::Value {
    json!({ "suite": suite, "params": params, "probes": probes, "quadrature": cfg })
}

fn err_string(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Residuals of `(−Δ)^{1/2}u = e^{pv}` and `−Δv = u⁴` at each probe.
pub fn verify_pde_2d(params: &Bubble2DParams, probes: &[Point], cfg: &QuadratureConfig) -> Result<VerificationReport> {
    verify_pde_2d_fields(params, &PlanarFields::exact(params)?, probes, cfg, Exec::default())
}

/// [`verify_pde_2d`] for an arbitrary candidate pair.
pub fn verify_pde_2d_fields(
    params: &Bubble2DParams,
    fields: &PlanarFields,
    probes: &[Point],
    cfg: &QuadratureConfig,
    exec: Exec,
) -> Result<VerificationReport> {
    let conv = FracLapConvention::half_laplacian(2)?;
    let p = params.p;
    let rows = par::map(exec, probes, |x| {
        let (u, v) = (&fields.u, &fields.v);
        let lhs = fraclap_pv(u, x, &conv, cfg).map(|q| q.value);
        let first = ResidualRecord::from_result("fraclap_u=exp_pv", *x, lhs, (p * v.eval(x)).exp(), PDE2D_FRACLAP_TOL);
        let lap = laplacian_fd(v, x, default_fd_step(v, x));
        let second = ResidualRecord::from_result("neg_laplacian_v=u4", *x, lap, u.eval(x).powi(4), PDE2D_LAPLACIAN_TOL);
        [first, second]
    });
    Ok(VerificationReport::new(
        "pde2d",
        rows.into_iter().flatten().collect(),
        BTreeMap::new(),
        echo("pde2d", params, probes, cfg),
    ))
}

/// Round trips `riesz2d(e^{pv}) = u` and `logpot2d(u⁴) + v(0) = v`.
pub fn verify_ie_2d(params: &Bubble2DParams, probes: &[Point], cfg: &QuadratureConfig) -> Result<VerificationReport> {
    verify_ie_2d_with(params, probes, cfg, Exec::default())
}

pub fn verify_ie_2d_with(
    params: &Bubble2DParams,
    probes: &[Point],
    cfg: &QuadratureConfig,
    exec: Exec,
) -> Result<VerificationReport> {
    let epv = params.epv_field()?;
    let u4 = params.u4_field()?;
    let gamma_const = bubble2d_invariants(params).gamma_const;
    let rows = par::map(exec, probes, |x| {
        let r = x.dist(&params.center);
        let first = ResidualRecord::from_result(
            "riesz2d(exp_pv)=u",
            *x,
            riesz2d(&epv, x, cfg).map(|q| q.value),
            params.u_profile(r),
            IE2D_TOL,
        );
        let second = ResidualRecord::from_result(
            "logpot2d(u4)+gamma=v",
            *x,
            logpot2d(&u4, x, cfg).map(|q| q.value + gamma_const),
            params.v_profile(r),
            IE2D_TOL,
        );
        [first, second]
    });
    Ok(VerificationReport::new(
        "ie2d",
        rows.into_iter().flatten().collect(),
        BTreeMap::new(),
        echo("ie2d", params, probes, cfg),
    ))
}

/// Residuals of `(−Δ)^{1/2}u = P v^{4−σ}` with `P` in closed form and by
/// quadrature, of `−Δv = u^{5/2}` by finite differences and in closed form,
/// and of the Hartree term itself.
pub fn verify_pde_3d(params: &Bubble3DParams, probes: &[Point], cfg: &QuadratureConfig) -> Result<VerificationReport> {
    verify_pde_3d_with(params, probes, cfg, Exec::default())
}

pub fn verify_pde_3d_with(
    params: &Bubble3DParams,
    probes: &[Point],
    cfg: &QuadratureConfig,
    exec: Exec,
) -> Result<VerificationReport> {
    let conv = FracLapConvention::half_laplacian(3)?;
    let u = params.u_field()?;
    let v = params.v_field()?;
    let sigma = params.sigma;
    let rows = par::map(exec, probes, |x| {
        let r = x.dist(&params.center);
        let v_pow = params.v_profile(r).powf(4.0 - sigma);
        let p_closed = params.hartree_profile(r);
        let p_quad = hartree(&v, sigma, x, cfg).map(|q| q.value).map_err(err_string);
        let lhs = fraclap_pv(&u, x, &conv, cfg).map(|q| q.value).map_err(err_string);
        let closed = ResidualRecord::from_result(
            "fraclap_u=P_closed*v^(4-sigma)",
            *x,
            lhs.clone(),
            p_closed * v_pow,
            PDE3D_TOL,
        );
        let quad = match &p_quad {
            Ok(pq) => ResidualRecord::from_result("fraclap_u=P_quad*v^(4-sigma)", *x, lhs, pq * v_pow, PDE3D_TOL),
            Err(e) => ResidualRecord::failed("fraclap_u=P_quad*v^(4-sigma)", *x, f64::NAN, PDE3D_TOL, e.clone()),
        };
        let lap = ResidualRecord::from_result(
            "neg_laplacian_v=u^(5/2)",
            *x,
            laplacian_fd(&v, x, default_fd_step(&v, x)),
            params.u_profile(r).powf(2.5),
            PDE3D_TOL,
        );
        // −Δ(C′W) = 3C′W⁵ for W = (μ/(1 + μ²r²))^{1/2}
        let w5 = (params.mu / (1.0 + params.mu * params.mu * r * r)).powf(2.5);
        let lap_closed = ResidualRecord::new(
            "neg_laplacian_v_closed=u^(5/2)",
            *x,
            3.0 * params.c_prime * w5,
            params.c.powf(2.5) * w5,
            CONSTANT_IDENTITY_TOL,
        );
        let hart = ResidualRecord::from_result("hartree_quad=hartree_closed", *x, p_quad, p_closed, HARTREE_TOL);
        [closed, quad, lap, lap_closed, hart]
    });
    Ok(VerificationReport::new(
        "pde3d",
        rows.into_iter().flatten().collect(),
        BTreeMap::new(),
        echo("pde3d", params, probes, cfg),
    ))
}

/// Round trips `riesz3d_inv_halflap(P v^{4−σ}) = u` (closed-form `P`) and
/// `newton3d(u^{5/2}) = v`.
pub fn verify_ie_3d(params: &Bubble3DParams, probes: &[Point], cfg: &QuadratureConfig) -> Result<VerificationReport> {
    verify_ie_3d_with(params, probes, cfg, Exec::default())
}

pub fn verify_ie_3d_with(
    params: &Bubble3DParams,
    probes: &[Point],
    cfg: &QuadratureConfig,
    exec: Exec,
) -> Result<VerificationReport> {
    let source = ScalarField::product(&params.hartree_field()?, &field_power(&params.v_field()?, 4.0 - params.sigma)?)?;
    let u52 = field_power(&params.u_field()?, 2.5)?;
    let rows = par::map(exec, probes, |x| {
        let r = x.dist(&params.center);
        let first = ResidualRecord::from_result(
            "riesz3d_inv_halflap(P*v^(4-sigma))=u",
            *x,
            riesz3d_inv_halflap(&source, x, cfg).map(|q| q.value),
            params.u_profile(r),
            IE3D_TOL,
        );
        let second = ResidualRecord::from_result(
            "newton3d(u^(5/2))=v",
            *x,
            newton3d(&u52, x, cfg).map(|q| q.value),
            params.v_profile(r),
            IE3D_TOL,
        );
        [first, second]
    });
    Ok(VerificationReport::new(
        "ie3d",
        rows.into_iter().flatten().collect(),
        BTreeMap::new(),
        echo("ie3d", params, probes, cfg),
    ))
}

fn planar_label(b: &Bubble2DParams) -> String {
    format!("p={} mu={} center={}", b.p, b.mu, b.center)
}

fn hartree_label(b: &Bubble3DParams) -> String {
    format!("sigma={} mu={} center={}", b.sigma, b.mu, b.center)
}

fn family_label(b: &BubbleParams) -> String {
    match b {
        BubbleParams::Planar(b) => planar_label(b),
        BubbleParams::Hartree(b) => hartree_label(b),
    }
}

/// Prefixes every record and integral id with `label/`.
fn relabel(mut report: VerificationReport, label: &str) -> VerificationReport {
    for r in &mut report.records {
        r.equation_id = format!("{label}/{}", r.equation_id);
    }
    report.integrals = std::mem::take(&mut report.integrals)
        .into_iter()
        .map(|(k, v)| (format!("{label}/{k}"), v))
        .collect();
    report
}

/// Concatenates per-parameter reports of one suite under labelled ids.
fn combine(suite: &str, parts: Vec<(String, VerificationReport)>, config_echo: serde_json::Value) -> VerificationReport {
    let mut records = Vec::new();
    let mut integrals = BTreeMap::new();
    for (label, part) in parts {
        let part = relabel(part, &label);
        records.extend(part.records);
        integrals.extend(part.integrals);
    }
    VerificationReport::new(suite, records, integrals, config_echo)
}

/// `p ∈ {1, 1.5, 3}`, `μ ∈ {0.5, 1, 2}`, centers `0` and `(1, −0.5)`.
pub fn default_planar_grid() -> Vec<Bubble2DParams> {
    let mut out = Vec::new();
    for p in [1.0, 1.5, 3.0] {
        for mu in [0.5, 1.0, 2.0] {
            for c in [Point::xy(0.0, 0.0), Point::xy(1.0, -0.5)] {
                out.push(Bubble2DParams::new(p, mu, c).expect("valid grid"));
            }
        }
    }
    out
}

/// `σ ∈ {1.3, 2, 2.5}`, `μ ∈ {1, 2}`, center `0`.
pub fn default_hartree_grid() -> Vec<Bubble3DParams> {
    let mut out = Vec::new();
    for sigma in [1.3, 2.0, 2.5] {
        for mu in [1.0, 2.0] {
            out.push(Bubble3DParams::new(sigma, mu, Point::xyz(0.0, 0.0, 0.0)).expect("valid grid"));
        }
    }
    out
}

pub fn run_pde2d_grid(grid: &[Bubble2DParams], cfg: &QuadratureConfig) -> Result<VerificationReport> {
    let mut parts = Vec::new();
    for b in grid {
        parts.push((planar_label(b), verify_pde_2d(b, &default_probes(&b.center, b.mu), cfg)?));
    }
    Ok(combine("pde2d", parts, json!({ "suite": "pde2d", "grid": grid, "quadrature": cfg })))
}

pub fn run_ie2d_grid(grid: &[Bubble2DParams], cfg: &QuadratureConfig) -> Result<VerificationReport> {
    let mut parts = Vec::new();
    for b in grid {
        parts.push((planar_label(b), verify_ie_2d(b, &ie_probes(&b.center, b.mu), cfg)?));
    }
    Ok(combine("ie2d", parts, json!({ "suite": "ie2d", "grid": grid, "quadrature": cfg })))
}

pub fn run_pde3d_grid(grid: &[Bubble3DParams], cfg: &QuadratureConfig) -> Result<VerificationReport> {
    let mut parts = Vec::new();
    for b in grid {
        parts.push((hartree_label(b), verify_pde_3d(b, &default_probes(&b.center, b.mu), cfg)?));
    }
    Ok(combine("pde3d", parts, json!({ "suite": "pde3d", "grid": grid, "quadrature": cfg })))
}

pub fn run_ie3d_grid(grid: &[Bubble3DParams], cfg: &QuadratureConfig) -> Result<VerificationReport> {
    let mut parts = Vec::new();
    for b in grid {
        parts.push((hartree_label(b), verify_ie_3d(b, &ie_probes(&b.center, b.mu), cfg)?));
    }
    Ok(combine("ie3d", parts, json!({ "suite": "ie3d", "grid": grid, "quadrature": cfg })))
}

/// Closed-form identities for one planar and one Hartree parameter set,
/// plus the parameter-free checks, with the default seed.
pub fn verify_identities(
    params2d: &Bubble2DParams,
    params3d: &Bubble3DParams,
    cfg: &QuadratureConfig,
) -> Result<VerificationReport> {
    run_identities_grid(&[*params2d], &[*params3d], DEFAULT_SEED, cfg)
}

/// Identity checks over parameter grids. Parameter-free checks run once.
pub fn run_identities_grid(
    planar: &[Bubble2DParams],
    hartree_grid: &[Bubble3DParams],
    seed: u64,
    cfg: &QuadratureConfig,
) -> Result<VerificationReport> {
    let mut parts = vec![("constants".to_string(), parameter_free_identities(seed, cfg)?)];
    for b in planar {
        parts.push((planar_label(b), planar_identities(b, cfg)?));
    }
    for b in hartree_grid {
        parts.push((hartree_label(b), hartree_identities(b, cfg)?));
    }
    Ok(combine(
        "identities",
        parts,
        json!({ "suite": "identities", "planar": planar, "hartree": hartree_grid, "seed": seed, "quadrature": cfg }),
    ))
}

/// Probes for the operator cross-check: the center and three radii along
/// the first axis.
fn cross_probes(center: &Point, scale: f64) -> Vec<Point> {
    let e1 = Point::unit(center.dim(), 0).expect("valid dim");
    let mut out = vec![*center];
    for r in [0.5, 1.0, 3.0] {
        out.push(center.offset(&e1, r * scale));
    }
    out
}

fn cross_check(id: &str, f: &ScalarField, probes: &[Point], cfg: &QuadratureConfig) -> Result<Vec<ResidualRecord>> {
    let conv = FracLapConvention::half_laplacian(f.dim())?;
    Ok(par::map(Exec::default(), probes, |x| {
        match fraclap_pv(f, x, &conv, cfg) {
            Ok(pv) => ResidualRecord::from_result(
                id,
                *x,
                fraclap_extension(f, x, &conv, cfg).map(|q| q.value),
                pv.value,
                CROSS_CHECK_TOL,
            ),
            Err(e) => ResidualRecord::failed(id, *x, f64::NAN, CROSS_CHECK_TOL, e.to_string()),
        }
    }))
}

fn planar_identities(b: &Bubble2DParams, cfg: &QuadratureConfig) -> Result<VerificationReport> {
    let inv = bubble2d_invariants(b);
    let mut integrals = BTreeMap::new();
    let totals = [
        ("int_u4", b.u4_field()?, inv.total_u4),
        ("int_exp_pv", b.epv_field()?, inv.total_epv),
        ("int_exp_4pv/3", b.e4pv3_field()?, inv.total_e4pv3),
    ];
    for (name, field, expected) in totals {
        integrals.insert(
            name.to_string(),
            IntegralCheck::from_result(integrate_space(&field, cfg).map(|q| q.value), expected, TOTAL_INTEGRAL_TOL),
        );
    }
    let fit = asymptotics_fit(b, &default_asymptotic_radii());
    integrals.insert(
        "asymptotic_alpha".into(),
        IntegralCheck::from_result(fit.as_ref().map(|f| f.alpha_hat), inv.alpha, ASYMPTOTIC_ALPHA_TOL),
    );
    integrals.insert(
        "asymptotic_beta".into(),
        IntegralCheck::from_result(fit.as_ref().map(|f| f.beta_hat), inv.beta, ASYMPTOTIC_BETA_TOL),
    );
    let records = cross_check("extension=pv(u)", &b.u_field()?, &cross_probes(&b.center, 1.0 / b.mu), cfg)?;
    Ok(VerificationReport::new("identities", records, integrals, serde_json::Value::Null))
}

fn hartree_identities(b: &Bubble3DParams, cfg: &QuadratureConfig) -> Result<VerificationReport> {
    let mut integrals = BTreeMap::new();
    constant_identities(b.sigma, &mut integrals)?;
    let records = cross_check("extension=pv(u)", &b.u_field()?, &cross_probes(&b.center, 1.0 / b.mu), cfg)?;
    Ok(VerificationReport::new("identities", records, integrals, serde_json::Value::Null))
}

fn constant_identities(sigma: f64, integrals: &mut BTreeMap<String, IntegralCheck>) -> Result<()> {
    let (c, cp) = bubble3d_constants(sigma)?;
    let i = riesz_identity_I(3, sigma / 2.0)?;
    integrals.insert(
        format!("C^(5/2)=3C'(sigma={sigma})"),
        IntegralCheck::new(c.powf(2.5), 3.0 * cp, CONSTANT_IDENTITY_TOL),
    );
    integrals.insert(
        format!("I(sigma/2)*C'^(10-2sigma)=2C(sigma={sigma})"),
        IntegralCheck::new(i * cp.powf(10.0 - 2.0 * sigma), 2.0 * c, CONSTANT_IDENTITY_TOL),
    );
    Ok(())
}

/// `(1 + |y|²)^{−a}` on ℝⁿ.
fn algebraic_profile(n: usize, a: f64) -> Result<ScalarField> {
    make_radial_field(
        n,
        move |r| (1.0 + r * r).powf(-a),
        Point::origin(n)?,
        Some(DecayHint::new(2.0 * a, 1.0, 1.0)?),
    )
}

fn parameter_free_identities(seed: u64, cfg: &QuadratureConfig) -> Result<VerificationReport> {
    let mut integrals = BTreeMap::new();

    let mut cases = Vec::new();
    for g in [0.5, 1.0, 1.25] {
        for d in [0.0, 1.0, 2.0] {
            cases.push((g, Point::xyz(d, 0.0, 0.0)));
        }
    }
    let values = par::map(Exec::default(), &cases, |(g, x)| {
        let f = algebraic_profile(3, 3.0 - g)?;
        riesz_convolution(&f, x, 2.0 * g, cfg).map(|q| q.value)
    });
    for ((g, x), v) in cases.iter().zip(values) {
        let expected = riesz_identity_I(3, *g)? * (1.0 + x.norm_sq()).powf(-g);
        integrals.insert(
            format!("I(gamma={g}) at x={x}"),
            IntegralCheck::from_result(v, expected, RIESZ_IDENTITY_TOL),
        );
    }
    integrals.insert(
        "I(1)=pi^2".into(),
        IntegralCheck::new(riesz_identity_I(3, 1.0)?, PI * PI, CONSTANT_IDENTITY_TOL),
    );
    for sigma in CONSTANT_SIGMAS {
        constant_identities(sigma, &mut integrals)?;
    }

    integrals.insert(
        "green_C0".into(),
        IntegralCheck::from_result(green_constant(cfg).map(|q| q.value), 1.0 / (2.0 * PI * PI), GREEN_CONSTANT_TOL),
    );
    for n in [2usize, 3] {
        let nf = n as f64;
        let closed = gamma((nf + 1.0) / 2.0) / (PI.powf(nf / 2.0) * gamma(0.5));
        integrals.insert(
            format!("C_n_alpha(n={n} alpha=1)"),
            IntegralCheck::from_result(cn_alpha(n, 1.0, cfg), closed, CN_ALPHA_TOL),
        );
        let poisson = gamma((nf + 1.0) / 2.0) / PI.powf((nf + 1.0) / 2.0);
        integrals.insert(
            format!("extension_constant(n={n})"),
            IntegralCheck::from_result(
                FracLapConvention::half_laplacian(n).map(|c| c.extension_constant),
                poisson,
                EXTENSION_CONSTANT_TOL,
            ),
        );
    }
    green_properties(seed, &mut integrals)?;

    let mut records = Vec::new();
    for n in [2usize, 3] {
        records.extend(cross_check(
            &format!("extension=pv(gaussian n={n})"),
            &gaussian(n, 1.0)?,
            &cross_probes(&Point::origin(n)?, 1.0),
            cfg,
        )?);
    }
    Ok(VerificationReport::new("identities", records, integrals, serde_json::Value::Null))
}

fn random_in_ball(rng: &mut ChaCha8Rng, radius: f64) -> Point {
    loop {
        let c = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let p = Point::xyz(c[0], c[1], c[2]);
        if p.norm_sq() < 1.0 && p.norm_sq() > 0.0 {
            return p * radius;
        }
    }
}

/// Symmetry, positivity, exterior vanishing and scaling of the half-ball
/// Green's function on 1000 seeded pairs.
fn green_properties(seed: u64, integrals: &mut BTreeMap<String, IntegralCheck>) -> Result<()> {
    const PAIRS: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = GreenBallParams::new(1.0)?;
    let (mut asym, mut nonpositive, mut exterior, mut scaling) = (0.0f64, 0.0, 0.0f64, 0.0f64);
    for k in 0..PAIRS {
        let x = random_in_ball(&mut rng, 1.0);
        let y = random_in_ball(&mut rng, 1.0);
        let gxy = green_half_ball(&unit, &x, &y)?;
        let gyx = green_half_ball(&unit, &y, &x)?;
        asym = asym.max((gxy - gyx).abs() / gxy.abs());
        if !(gxy > 0.0) {
            nonpositive += 1.0;
        }
        let out = x * (rng.gen_range(1.0..2.0) / x.norm());
        exterior = exterior.max(green_half_ball(&unit, &out, &y)?.abs());
        exterior = exterior.max(green_half_ball(&unit, &y, &out)?.abs());
        let radius = [0.5, 2.0, 3.7][k % 3];
        let big = GreenBallParams::new(radius)?;
        let scaled = green_half_ball(&big, &(x * radius), &(y * radius))? * radius;
        scaling = scaling.max((scaled - gxy).abs() / gxy.abs());
    }
    integrals.insert("green_max_asymmetry".into(), IntegralCheck::new(asym, 0.0, CONSTANT_IDENTITY_TOL));
    integrals.insert("green_nonpositive_count".into(), IntegralCheck::new(nonpositive, 0.0, 0.0));
    integrals.insert("green_max_exterior_value".into(), IntegralCheck::new(exterior, 0.0, 0.0));
    integrals.insert("green_max_scaling_defect".into(), IntegralCheck::new(scaling, 0.0, GREEN_SCALING_TOL));
    Ok(())
}

/// Default Kelvin parameter list: both default grids.
pub fn default_kelvin_params() -> Vec<BubbleParams> {
    default_planar_grid()
        .into_iter()
        .map(BubbleParams::Planar)
        .chain(default_hartree_grid().into_iter().map(BubbleParams::Hartree))
        .collect()
}

/// Kelvin involutions, the critical scale and the sign of the moving-spheres
/// differences for each parameter set.
pub fn verify_kelvin(params: &[BubbleParams]) -> Result<VerificationReport> {
    let mut parts = Vec::new();
    for b in params {
        parts.push((family_label(b), kelvin_one(b)?));
    }
    Ok(combine("kelvin", parts, json!({ "suite": "kelvin", "params": params })))
}

fn kelvin_one(b: &BubbleParams) -> Result<VerificationReport> {
    let n = b.dim();
    let center = b.center();
    let mu = b.mu();
    let mut records = Vec::new();

    let mut shift = vec![0.3, 0.2, 0.1];
    shift.truncate(n);
    let x0 = center + Point::new(&shift)?;
    let spec = KelvinSpec::new(x0, 0.7 / mu, 0.0)?;
    let probes = default_probes(&center, mu);
    let u = match b {
        BubbleParams::Planar(p) => p.u_field()?,
        BubbleParams::Hartree(p) => p.u_field()?,
    };
    for x in &probes {
        let back = kelvin_point(&kelvin_point(x, &spec)?, &spec)?;
        records.push(ResidualRecord::new("kelvin_point_involution", *x, back.dist(x), 0.0, INVOLUTION_TOL));
    }
    for nu in [0.0, 1.0, 2.0] {
        let spec = KelvinSpec { nu, ..spec };
        let (uf, s) = (u.clone(), spec);
        let once = ScalarField::new(n, move |y| kelvin_field(&uf, &s, y).unwrap_or(f64::NAN))?;
        for x in &probes {
            records.push(ResidualRecord::from_result(
                format!("kelvin_field_involution(nu={nu})"),
                *x,
                kelvin_field(&once, &spec, x),
                u.eval(x),
                INVOLUTION_TOL,
            ));
        }
    }
    if let BubbleParams::Planar(p) = b {
        let v = p.v_field()?;
        let (vf, s, pp) = (v.clone(), spec, p.p);
        let once = ScalarField::new(2, move |y| kelvin_v_log(&vf, pp, &s, y).unwrap_or(f64::NAN))?;
        for x in &probes {
            records.push(ResidualRecord::from_result(
                "kelvin_v_log_involution",
                *x,
                kelvin_v_log(&once, p.p, &spec, x),
                v.eval(x),
                INVOLUTION_TOL,
            ));
        }
    }

    let mut integrals = BTreeMap::new();
    let e1 = Point::unit(n, 0)?;
    let mut bases: Vec<Point> = [0.0, 1.0, 2.0].iter().map(|d| center.offset(&e1, *d)).collect();
    let mut off = vec![2.0, -1.0, 0.0];
    off.truncate(n);
    bases.push(center + Point::new(&off)?);
    for (k, x0) in bases.iter().enumerate() {
        let algebraic = b.algebraic_critical_scale(x0);
        if k < 3 {
            integrals.insert(
                format!("critical_scale(d={k})"),
                IntegralCheck::from_result(critical_scale(b, x0, 1e-10), algebraic, CRITICAL_SCALE_TOL),
            );
        }
        let at = difference_summary(b, x0, algebraic);
        integrals.insert(
            format!("max_abs_w_u at critical(x0={x0})"),
            IntegralCheck::from_result(at.as_ref().map(|s| s.max_abs_w_u()), 0.0, CRITICAL_DIFFERENCE_TOL),
        );
        integrals.insert(
            format!("max_abs_w_v at critical(x0={x0})"),
            IntegralCheck::from_result(at.as_ref().map(|s| s.max_abs_w_v), 0.0, CRITICAL_DIFFERENCE_TOL),
        );
        let factors = [0.5, 0.9, 1.1, 2.0];
        let lambdas: Vec<f64> = factors.iter().map(|f| f * algebraic).collect();
        let scan = difference_scan(b, x0, &lambdas, Exec::default())?;
        for (f, s) in factors.iter().zip(scan) {
            let expected = if *f < 1.0 { 1.0 } else { -1.0 };
            integrals.insert(
                format!("sign_w_u(x0={x0} lambda={f}*critical)"),
                IntegralCheck::new(s.uniform_sign() as f64, expected, 0.0),
            );
        }
    }
    Ok(VerificationReport::new("kelvin", records, integrals, serde_json::Value::Null))
}

/// Number of random pairs for the pointwise gap check.
pub const GAP_PAIRS: usize = 100_000;
/// Number of random field pairs for the Orlicz pairing contract.
pub const ORLICZ_PAIRS: usize = 100;

/// `Σ a_k exp(−|x − c_k|²/w_k²)` on ℝ².
fn random_mixture(rng: &mut ChaCha8Rng) -> Result<ScalarField> {
    let terms: Vec<[f64; 4]> = (0..3)
        .map(|_| {
            [
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-0.8..0.8),
                rng.gen_range(-0.8..0.8),
                rng.gen_range(0.2..1.0),
            ]
        })
        .collect();
    ScalarField::new(2, move |x| {
        let c = x.coords();
        terms
            .iter()
            .map(|[a, cx, cy, w]| a * (-((c[0] - cx).powi(2) + (c[1] - cy).powi(2)) / (w * w)).exp())
            .sum()
    })
}

/// `(1 + r²)^{−3/2}·c` on ℝ² with its radial metadata.
fn hls_test_field(c: f64) -> Result<ScalarField> {
    make_radial_field(
        2,
        move |r| c * (1.0 + r * r).powf(-1.5),
        Point::xy(0.0, 0.0),
        Some(DecayHint::new(3.0, c.abs(), 1.0)?),
    )
}

/// `‖∫ f(y)/|x − y| dy‖₃ / ‖f‖_{6/5}` for `f = (1 + r²)^{−3/2}` on ℝ².
pub fn hls_closed_form_ratio() -> Result<f64> {
    let i = riesz_identity_I(2, 0.5)?;
    // ∫_{ℝ²} (1 + r²)^{−a} = π Γ(a − 1)/Γ(a)
    let integral = |a: f64| PI * gamma(a - 1.0) / gamma(a);
    let potential = i * integral(1.5).powf(1.0 / 3.0);
    let f_norm = integral(1.8).powf(5.0 / 6.0);
    Ok(potential / f_norm)
}

/// Seeded checks of the `exp^L + L ln L` inequality, the Orlicz pairing and
/// the HLS ratio.
pub fn verify_inequalities(seed: u64, cfg: &QuadratureConfig) -> Result<VerificationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut integrals = BTreeMap::new();

    let (mut min_gap, mut sharp_excess) = (f64::INFINITY, 0.0f64);
    for _ in 0..GAP_PAIRS {
        let a = rng.gen_range(0.0..=50.0);
        let b = rng.gen_range(0.0..=50.0);
        let gap = explogl_gap(a, b)?;
        let sharp = explogl_gap_sharp(a, b)?;
        min_gap = min_gap.min(gap);
        sharp_excess = sharp_excess.max((sharp - gap) / gap.abs().max(1.0));
    }
    integrals.insert(
        "explogl_gap_negative_part".into(),
        IntegralCheck::new(min_gap.min(0.0), 0.0, GAP_TOL),
    );
    integrals.insert(
        "explogl_sharp_minus_gap_positive_part".into(),
        IntegralCheck::new(sharp_excess.max(0.0), 0.0, GAP_TOL),
    );

    let pairs: Vec<(ScalarField, ScalarField)> = (0..ORLICZ_PAIRS)
        .map(|_| Ok((random_mixture(&mut rng)?, random_mixture(&mut rng)?)))
        .collect::<Result<_>>()?;
    let ocfg = cfg.clone().with_rel_tol(cfg.rel_tol.max(1e-6));
    let reports = par::map(Exec::default(), &pairs, |(f, g)| orlicz_pair(f, g, 1.5, &ocfg));
    let (mut worst, mut failures) = (0.0f64, 0.0);
    let mut first_error = None;
    for r in reports {
        match r {
            Ok(rep) => {
                let scale = (rep.pair.exp_l_norm + rep.pair.l_ln_l_norm).max(1.0);
                worst = worst.min(rep.slack / scale);
                if rep.pair.exp_l_norm < 0.0 || rep.pair.l_ln_l_norm < 0.0 {
                    worst = worst.min(-1.0);
                }
            }
            Err(e) => {
                failures += 1.0;
                first_error.get_or_insert(e.to_string());
            }
        }
    }
    integrals.insert(
        "orlicz_slack_negative_part".into(),
        IntegralCheck::new(worst, 0.0, GAP_TOL),
    );
    integrals.insert(
        "orlicz_failures".into(),
        IntegralCheck {
            error: first_error,
            ..IntegralCheck::new(failures, 0.0, 0.0)
        },
    );

    let (s, p, q) = (1.0, 6.0 / 5.0, 3.0);
    let scales = [1.0, 2.0, 0.5, 3.7];
    let ratios = par::map(Exec::default(), &scales, |c| {
        hls_test_field(*c)
            .and_then(|f| hls_ratio(&f, 2, s, p, q, cfg))
            .map(|h| h.ratio)
            .map_err(err_string)
    });
    let base = ratios[0].clone();
    for (c, r) in scales.iter().zip(&ratios).skip(1) {
        let value = match (&base, r) {
            (Ok(b), Ok(r)) => Ok(r / b),
            (Err(e), _) | (_, Err(e)) => Err(e.clone()),
        };
        integrals.insert(
            format!("hls_ratio(c={c})/hls_ratio(c=1)"),
            IntegralCheck::from_result(value, 1.0, HLS_SCALE_TOL),
        );
    }
    integrals.insert(
        "hls_ratio closed form".into(),
        IntegralCheck::from_result(base, hls_closed_form_ratio()?, HLS_CLOSED_FORM_TOL),
    );
    Ok(VerificationReport::new(
        "inequalities",
        Vec::new(),
        integrals,
        json!({ "suite": "inequalities", "seed": seed, "gap_pairs": GAP_PAIRS, "orlicz_pairs": ORLICZ_PAIRS, "quadrature": cfg }),
    ))
}
