use std::f64::consts::PI;

use bubblekit::bubbles::{
    asymptotics_fit, asymptotics_fit_fields, critical_scale, default_asymptotic_radii, kelvin_point,
    Bubble2DParams, Bubble3DParams, BubbleParams, KelvinSpec,
};
use bubblekit::fraclap::{fraclap_extension, fraclap_pv, gaussian, laplacian_fd, FracLapConvention};
use bubblekit::inequalities::{hls_ratio, orlicz_pair};
use bubblekit::potentials::{hartree, newton3d, riesz2d};
use bubblekit::quadrature::{integrate_radial, integrate_space, Upper};
use bubblekit::{field_power, make_radial_field, DecayHint, Point, QuadratureConfig, ScalarField};

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn radial_integrals_with_antiderivative_oracles() {
    // d/dr[−π/(1 + r²)] = 2πr/(1 + r²)²
    let a = integrate_radial(|r| 2.0 * PI * r / (1.0 + r * r).powi(2), 0.0, Upper::Infinite { exponent: 3.0 }, &cfg())
        .unwrap();
    assert!(rel(a.value, PI) < 1e-9);
    // b = tan²θ turns the integrand into 2 dθ on (0, π/2)
    let b = integrate_radial(|b| 1.0 / ((1.0 + b) * b.sqrt()), 0.0, Upper::Infinite { exponent: 1.5 }, &cfg()).unwrap();
    assert!(rel(b.value, PI) < 1e-8);
    let c = integrate_radial(|r| r, 1.0, Upper::Finite(1.0), &cfg()).unwrap();
    assert_eq!(c.value, 0.0);
}

#[test]
fn gaussian_normalization() {
    let g = make_radial_field(
        2,
        |r| (-PI * r * r).exp(),
        Point::xy(0.0, 0.0),
        Some(DecayHint::new(8.0, 1.0, 2.0).unwrap()),
    )
    .unwrap();
    assert!((integrate_space(&g, &cfg()).unwrap().value - 1.0).abs() < 1e-9);
}

#[test]
fn half_laplacian_of_planar_bubble_at_center() {
    let b = Bubble2DParams::new(1.5, 1.0, Point::xy(0.0, 0.0)).unwrap();
    let conv = FracLapConvention::half_laplacian(2).unwrap();
    let v = fraclap_pv(&b.u_field().unwrap(), &Point::xy(0.0, 0.0), &conv, &cfg()).unwrap();
    assert!((v.value - 2f64.sqrt()).abs() < 1e-6);
}

#[test]
fn extension_agrees_with_singular_integral_for_gaussian() {
    let conv = FracLapConvention::half_laplacian(2).unwrap();
    let g = gaussian(2, 1.0).unwrap();
    let x = Point::xy(0.0, 0.0);
    let pv = fraclap_pv(&g, &x, &conv, &cfg()).unwrap().value;
    let ext = fraclap_extension(&g, &x, &conv, &cfg()).unwrap().value;
    assert!(rel(ext, pv) < 1e-3);
}

#[test]
fn riesz_potential_inverts_half_laplacian_on_gaussian() {
    // riesz2d((−Δ)^{1/2} G)(0) = G(0) = 1, with the half-Laplacian tabulated
    // on demand along a ray.
    let conv = FracLapConvention::half_laplacian(2).unwrap();
    let g = gaussian(2, 1.0).unwrap();
    let c = cfg();
    let lap = make_radial_field(
        2,
        move |r| fraclap_pv(&g, &Point::xy(r, 0.0), &conv, &c).unwrap().value,
        Point::xy(0.0, 0.0),
        // (−Δ)^{1/2}G ~ −(∫G)/(2π|x|³) = −1/(2|x|³)
        Some(DecayHint::new(3.0, 1.0, 4.0).unwrap()),
    )
    .unwrap();
    let back = riesz2d(&lap, &Point::xy(0.0, 0.0), &QuadratureConfig::default().with_rel_tol(1e-7)).unwrap();
    assert!((back.value - 1.0).abs() < 1e-5, "{}", back.value);
}

#[test]
fn finite_difference_laplacian_examples() {
    let q = ScalarField::new(2, |x| x.norm_sq()).unwrap();
    assert!((laplacian_fd(&q, &Point::xy(0.3, -0.2), 1e-2).unwrap() + 4.0).abs() < 1e-8);
    let b = Bubble2DParams::new(1.5, 1.0, Point::xy(0.0, 0.0)).unwrap();
    let v = b.v_field().unwrap();
    assert!((laplacian_fd(&v, &Point::xy(1.0, 0.0), 1e-2).unwrap() - 1.0).abs() < 1e-6);
    let at = ScalarField::new(3, |x| (1.0 + x.norm_sq()).powf(-0.5)).unwrap();
    assert!((laplacian_fd(&at, &Point::xyz(0.0, 0.0, 0.0), 1e-2).unwrap() - 3.0).abs() < 1e-6);
}

#[test]
fn potentials_at_bubble_centers() {
    let b = Bubble2DParams::new(1.5, 1.0, Point::xy(0.0, 0.0)).unwrap();
    let u = riesz2d(&b.epv_field().unwrap(), &b.center, &cfg()).unwrap().value;
    assert!((u - 2f64.sqrt()).abs() < 1e-8);

    let h = Bubble3DParams::new(2.0, 1.0, Point::xyz(0.0, 0.0, 0.0)).unwrap();
    let u52 = field_power(&h.u_field().unwrap(), 2.5).unwrap();
    let v = newton3d(&u52, &h.center, &cfg()).unwrap().value;
    assert!(rel(v, h.c_prime * h.mu.sqrt()) < 1e-8);
}

#[test]
fn hartree_term_has_power_law_tail() {
    let h = Bubble3DParams::new(1.3, 2.0, Point::xyz(0.0, 0.0, 0.0)).unwrap();
    let i = bubblekit::potentials::riesz_identity_I(3, h.sigma / 2.0).unwrap();
    let limit = h.c_prime.powf(6.0 - h.sigma) * i * h.mu.powf(-h.sigma / 2.0);
    let y = 200.0;
    let p = hartree(&h.v_field().unwrap(), h.sigma, &Point::xyz(0.0, y, 0.0), &cfg()).unwrap().value;
    assert!(rel(p * y.powf(h.sigma), limit) < 1e-3);
}

#[test]
fn kelvin_point_examples() {
    let spec = KelvinSpec::new(Point::xy(0.0, 0.0), 1.0, 0.0).unwrap();
    assert_eq!(kelvin_point(&Point::xy(2.0, 0.0), &spec).unwrap(), Point::xy(0.5, 0.0));
    let on = Point::xy(0.6, 0.8);
    assert!(kelvin_point(&on, &spec).unwrap().dist(&on) < 1e-15);
}

#[test]
fn critical_scale_matches_far_field_limit() {
    // λ^ν u(x0) = lim |x|^ν u(x)
    let b = Bubble2DParams::new(1.5, 1.0, Point::xy(0.0, 0.0)).unwrap();
    let x0 = Point::xy(1.0, 0.0);
    let lambda = critical_scale(&BubbleParams::Planar(b), &x0, 1e-10).unwrap();
    let fit = asymptotics_fit(&b, &default_asymptotic_radii()).unwrap();
    assert!(rel(lambda * b.u_profile(1.0), fit.beta_hat) < 1e-2);

    let h = Bubble3DParams::new(2.0, 1.0, Point::xyz(0.0, 0.0, 0.0)).unwrap();
    let x0 = Point::xyz(0.0, 2.0, 0.0);
    let lambda = critical_scale(&BubbleParams::Hartree(h), &x0, 1e-10).unwrap();
    let far: f64 = [1e2, 1e3, 1e4].iter().map(|r| r * r * h.u_profile(*r)).sum::<f64>() / 3.0;
    assert!(rel(lambda * lambda * h.u_profile(2.0), far) < 1e-2);
}

#[test]
fn asymptotic_fit_of_exact_power_law() {
    let beta = 1.7;
    let u = ScalarField::new(2, move |x| beta / x.norm()).unwrap();
    let v = ScalarField::new(2, |x| -2.0 * x.norm().ln() + 0.5).unwrap();
    let fit = asymptotics_fit_fields(&u, &v, &default_asymptotic_radii()).unwrap();
    assert!((fit.beta_hat - beta).abs() < 1e-14);
    assert!((fit.alpha_hat - 2.0).abs() < 1e-12);
}

#[test]
fn orlicz_pairing_with_log_spike() {
    let f = ScalarField::new(2, |x| (1.0 / x.norm()).ln()).unwrap();
    let b = Bubble2DParams::new(1.5, 1.0, Point::xy(0.0, 0.0)).unwrap();
    let g = b.u4_field().unwrap();
    let rep = orlicz_pair(&f, &g, 1.0, &cfg().with_rel_tol(1e-7)).unwrap();
    assert!(rep.product_integral > 0.0);
    assert!(rep.slack > 0.0);
    // e^{|f|} − |f| − 1 = 1/r − ln(1/r) − 1, whose disk integral is 2π − π/2 − π
    assert!(rel(rep.pair.exp_l_norm, PI / 2.0) < 1e-6);
}

#[test]
fn hls_ratio_of_gaussian_is_homogeneous() {
    let c = cfg().with_rel_tol(1e-6);
    let r1 = hls_ratio(&gaussian(2, 1.0).unwrap(), 2, 1.0, 1.2, 3.0, &c).unwrap();
    let g2 = make_radial_field(
        2,
        |r| 2.0 * (-r * r).exp(),
        Point::xy(0.0, 0.0),
        Some(DecayHint::new(8.0, 2.0 * (4.0 / std::f64::consts::E).powi(4), 1.0).unwrap()),
    )
    .unwrap();
    let r2 = hls_ratio(&g2, 2, 1.0, 1.2, 3.0, &c).unwrap();
    assert!(r1.ratio > 0.0 && r1.ratio.is_finite());
    assert!(rel(r2.ratio, r1.ratio) < 1e-10);
    assert!(rel(r2.f_norm, 2.0 * r1.f_norm) < 1e-10);
}
