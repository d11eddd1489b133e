//! The `exp^L + L ln L` inequality and an empirical Hardy–Littlewood–Sobolev
//! ratio.

use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{check_dim, make_radial_field, DecayHint, Point, ScalarField};
use crate::potentials::riesz_convolution;
use crate::quadrature::{integrate_ball, integrate_space, Frame, QuadratureConfig, Symmetry};

fn check_nonnegative(a: f64, b: f64) -> Result<()> {
    if a >= 0.0 && b >= 0.0 && a.is_finite() && b.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "inequality arguments must be finite and nonnegative (got {a}, {b})"
        )))
    }
}

/// `e^a − a − 1 + b ln(b + 1) − ab`, which is nonnegative for `a, b ≥ 0`.
pub fn explogl_gap(a: f64, b: f64) -> Result<f64> {
    check_nonnegative(a, b)?;
    Ok(a.exp_m1() - a + b * b.ln_1p() - a * b)
}

/// The sharper form `e^a − a − 1 + (b + 1) ln(b + 1) − b − ab`, bounded above
/// by [`explogl_gap`] and still nonnegative.
pub fn explogl_gap_sharp(a: f64, b: f64) -> Result<f64> {
    check_nonnegative(a, b)?;
    Ok(a.exp_m1() - a + (b + 1.0) * b.ln_1p() - b - a * b)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrliczPair {
    /// `∫ (e^{|f|} − |f| − 1)`
    #[serde(rename = "expL_norm")]
    pub exp_l_norm: f64,
    /// `∫ |g| ln(|g| + 1)`
    #[serde(rename = "LlnL_norm")]
    pub l_ln_l_norm: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrliczReport {
    pub pair: OrliczPair,
    /// `∫ f g`
    pub product_integral: f64,
    /// `expL_norm + LlnL_norm − product_integral`
    pub slack: f64,
}

/// The three integrals of the `exp^L + L ln L` pairing over the ball of
/// radius `domain_radius` about the origin.
///
/// All three are computed on one node set with positive weights, so the
/// pointwise inequality carries over to the computed values.
pub fn orlicz_pair(
    f: &ScalarField,
    g: &ScalarField,
    domain_radius: f64,
    cfg: &QuadratureConfig,
) -> Result<OrliczReport> {
    cfg.validate()?;
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: g.dim(),
        });
    }
    if !(domain_radius > 0.0) || !domain_radius.is_finite() {
        return Err(Error::InvalidArgument(format!("domain radius {domain_radius}")));
    }
    let n = f.dim();
    let origin = Point::origin(n)?;
    let centered = |h: &ScalarField| {
        h.radial()
            .is_some_and(|r| r.center.norm() <= 1e-14)
    };
    let symmetry = if centered(f) && centered(g) {
        Symmetry::Constant
    } else {
        Symmetry::None
    };
    let axis = f.focus().or_else(|| g.focus()).filter(|p| p.norm() > 0.0);
    let frame = Frame::new(n, axis);
    let out = integrate_ball::<3, _>(
        n,
        &origin,
        domain_radius,
        &frame,
        symmetry,
        |y| {
            let a = f.eval(y);
            let b = g.eval(y);
            let (aa, ab) = (a.abs(), b.abs());
            [aa.exp_m1() - aa, ab * ab.ln_1p(), a * b]
        },
        cfg,
    )?;
    let pair = OrliczPair {
        exp_l_norm: out.value[0],
        l_ln_l_norm: out.value[1],
    };
    Ok(OrliczReport {
        pair,
        product_integral: out.value[2],
        slack: pair.exp_l_norm + pair.l_ln_l_norm - out.value[2],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HlsRatio {
    /// `‖I_s f‖_q / ‖f‖_p`; 0 when `f` vanishes.
    pub ratio: f64,
    pub potential_norm: f64,
    pub f_norm: f64,
    /// Set when `f` vanished at every sample point and the ratio was not
    /// computed.
    pub zero_input: bool,
}

/// Empirical Hardy–Littlewood–Sobolev ratio
/// `‖∫ f(y)|· − y|^{s−n} dy‖_q / ‖f‖_p` with `s + n/q = n/p`.
///
/// `f` is first normalized by its largest sampled magnitude so the ratio is
/// invariant under `f ↦ c·f`. Radial fields use a one-dimensional outer
/// integral; other fields a full nested quadrature.
pub fn hls_ratio(
    f: &ScalarField,
    n: usize,
    s: f64,
    p: f64,
    q: f64,
    cfg: &QuadratureConfig,
) -> Result<HlsRatio> {
    check_dim(n)?;
    if f.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: f.dim(),
        });
    }
    let nf = n as f64;
    if !(s > 0.0 && s < nf) {
        return Err(Error::InvalidArgument(format!("s = {s} outside (0, {n})")));
    }
    if !(1.0 < p && p < q && q.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need 1 < p < q < ∞ (got p = {p}, q = {q})"
        )));
    }
    if (s + nf / q - nf / p).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "exponents violate s + n/q = n/p: {s} + {n}/{q} ≠ {n}/{p}"
        )));
    }
    let decay = f.decay().copied().ok_or(Error::MissingDecay(
        "HLS ratio needs a decay hint for f",
    ))?;
    if !(decay.exponent * p > nf) {
        return Err(Error::NonIntegrable {
            exponent: decay.exponent * p,
            required: nf,
        });
    }

    let base = f.focus().unwrap_or(Point::origin(n)?);
    let mut samples = vec![base];
    for &r in &[0.25, 0.5, 1.0, 2.0, 4.0] {
        for d in crate::fields::probe_directions(n) {
            samples.push(base.offset(&d, r));
        }
    }
    let scale = samples
        .iter()
        .filter(|x| !f.near_singularity(x, 0.0))
        .map(|x| f.eval(x).abs())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(HlsRatio {
            ratio: 0.0,
            potential_norm: 0.0,
            f_norm: 0.0,
            zero_input: true,
        });
    }

    let fs = f.clone();
    let mut normalized = ScalarField::new(n, move |x| fs.eval(x) / scale)?
        .with_decay(DecayHint::new(
            decay.exponent,
            decay.coefficient / scale,
            decay.valid_radius,
        )?)
        .with_singularities(f.singularities().to_vec());
    if let Some(c) = f.focus() {
        normalized = normalized.with_focus(c);
    }
    if let Some(r) = f.radial() {
        let profile = r.profile.clone();
        normalized = make_radial_field(
            n,
            move |t| profile(t) / scale,
            r.center,
            normalized.decay().copied(),
        )?;
    }

    let power = make_power_field(&normalized, p)?;
    let f_norm = integrate_space(&power, cfg)?.value.powf(1.0 / p);

    let failure: Arc<Mutex<Option<Error>>> = Arc::new(Mutex::new(None));
    let kernel = nf - s;
    let potential_q = {
        let g = normalized.clone();
        let fail = failure.clone();
        let cfg_inner = cfg.clone();
        move |x: &Point| match riesz_convolution(&g, x, kernel, &cfg_inner) {
            Ok(r) => r.value.abs().powf(q),
            Err(e) => {
                fail.lock().expect("unpoisoned").get_or_insert(e);
                f64::NAN
            }
        }
    };
    let out_decay = DecayHint::new(q * kernel, 1.0, decay.valid_radius.max(1.0))?;
    let outer = match normalized.radial() {
        Some(r) => {
            let center = r.center;
            let e1 = Point::unit(n, 0)?;
            make_radial_field(
                n,
                move |t| potential_q(&center.offset(&e1, t)),
                center,
                Some(out_decay),
            )?
        }
        None => {
            let mut h = ScalarField::new(n, potential_q)?.with_decay(out_decay);
            if let Some(c) = normalized.focus() {
                h = h.with_focus(c);
            }
            h
        }
    };
    let integral = integrate_space(&outer, cfg);
    if let Some(e) = failure.lock().expect("unpoisoned").take() {
        return Err(e);
    }
    let potential_norm = integral?.value.powf(1.0 / q);
    Ok(HlsRatio {
        ratio: potential_norm / f_norm,
        potential_norm: potential_norm * scale,
        f_norm: f_norm * scale,
        zero_input: false,
    })
}

/// `|f|^p`, keeping radial structure and scaling the decay hint.
fn make_power_field(f: &ScalarField, p: f64) -> Result<ScalarField> {
    let d = f.decay().copied();
    let hint = match d {
        Some(d) => Some(DecayHint::new(
            d.exponent * p,
            d.coefficient.powf(p),
            d.valid_radius,
        )?),
        None => None,
    };
    if let Some(r) = f.radial() {
        let profile = r.profile.clone();
        return make_radial_field(f.dim(), move |t| profile(t).abs().powf(p), r.center, hint);
    }
    let g = f.clone();
    let mut out = ScalarField::new(f.dim(), move |x| g.eval(x).abs().powf(p))?
        .with_singularities(f.singularities().to_vec());
    if let Some(h) = hint {
        out = out.with_decay(h);
    }
    if let Some(c) = f.focus() {
        out = out.with_focus(c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, PI};

    #[test]
    fn gap_examples() {
        assert!((explogl_gap(1.0, E - 1.0).unwrap() - (E - 2.0)).abs() < 1e-14);
        assert!((explogl_gap(0.0, 3.0).unwrap() - 3.0 * 4f64.ln()).abs() < 1e-14);
        assert!((explogl_gap(2.0, 0.0).unwrap() - (2f64.exp() - 3.0)).abs() < 1e-14);
        assert!(explogl_gap(-1.0, 0.0).is_err());
        assert!(explogl_gap_sharp(0.0, -2.0).is_err());
    }

    #[test]
    fn zero_f_has_zero_exp_norm_and_product() {
        let f = ScalarField::constant(2, 0.0).unwrap();
        let g = ScalarField::new(2, |x| 1.0 + x.norm_sq()).unwrap();
        let r = orlicz_pair(&f, &g, 1.0, &QuadratureConfig::default()).unwrap();
        assert_eq!(r.pair.exp_l_norm, 0.0);
        assert_eq!(r.product_integral, 0.0);
        assert!(r.pair.l_ln_l_norm > 0.0);
    }

    #[test]
    fn plateaus_on_unit_disk() {
        let plateau = || {
            make_radial_field(2, |r| if r < 1.0 { 1.0 } else { 0.0 }, Point::xy(0.0, 0.0), None)
                .unwrap()
        };
        let r = orlicz_pair(&plateau(), &plateau(), 1.0, &QuadratureConfig::default()).unwrap();
        assert!((r.product_integral - PI).abs() < 1e-10);
        assert!((r.pair.exp_l_norm - (E - 2.0) * PI).abs() < 1e-10);
        assert!((r.pair.l_ln_l_norm - PI * 2f64.ln()).abs() < 1e-10);
        assert!(r.slack > 0.0);
    }

    #[test]
    fn hls_rejects_bad_exponents() {
        let f = make_radial_field(
            2,
            |r| (-r * r).exp(),
            Point::xy(0.0, 0.0),
            Some(DecayHint::new(8.0, 1e3, 1.0).unwrap()),
        )
        .unwrap();
        let cfg = QuadratureConfig::default();
        assert!(hls_ratio(&f, 2, 1.0, 1.2, 2.0, &cfg).is_err());
        assert!(hls_ratio(&f, 2, 1.0, 0.8, 2.0, &cfg).is_err());
        let z = ScalarField::constant(2, 0.0).unwrap();
        let r = hls_ratio(&z, 2, 1.0, 1.2, 3.0, &cfg).unwrap();
        assert!(r.zero_input && r.ratio == 0.0);
    }
}
