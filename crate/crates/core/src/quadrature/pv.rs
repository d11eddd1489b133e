//! Principal-value integrals via excluded balls and Richardson extrapolation.

use super::{field_extent, polar, polar_frame, QuadResult, QuadratureConfig, RadialSpec, Tolerance, Upper};
use crate::error::{Error, Result};
use crate::fields::{Point, ScalarField};

/// A kernel `k(x, y)` singular only at `y = x`, behaving like `|x − y|^(-order)`
/// for large `|x − y|` when multiplied by bounded data.
pub struct PvKernel<'a> {
    pub eval: &'a (dyn Fn(&Point, &Point) -> f64 + Sync),
    pub order: f64,
}

/// Outcome of a Richardson extrapolation with geometric ratio 2.
#[derive(Clone, Debug, PartialEq)]
pub struct Extrapolation {
    pub value: f64,
    /// Spread of the last two extrapolants on the diagonal and the last row.
    pub spread: f64,
    /// Successive diagonal extrapolants.
    pub diagonal: Vec<f64>,
}

/// Richardson table for `A(h) = A₀ + a₁h + a₂h² + …` sampled at
/// `h, h/2, h/4, …`. Fails when the diagonal stops contracting above
/// `noise_floor`.
pub fn richardson(samples: &[f64], noise_floor: f64) -> Result<Extrapolation> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "Richardson extrapolation needs at least two samples".into(),
        ));
    }
    if samples.iter().any(|s| !s.is_finite()) {
        return Err(Error::ExtrapolationDiverged(format!(
            "non-finite samples {samples:?}"
        )));
    }
    let mut table: Vec<Vec<f64>> = vec![vec![samples[0]]];
    for k in 1..n {
        let mut row = vec![samples[k]];
        for j in 1..=k {
            let factor = 2f64.powi(j as i32) - 1.0;
            let v = row[j - 1] + (row[j - 1] - table[k - 1][j - 1]) / factor;
            row.push(v);
        }
        table.push(row);
    }
    let diagonal: Vec<f64> = (0..n).map(|k| table[k][k]).collect();
    let value = diagonal[n - 1];
    let last_row = &table[n - 1];
    let spread = (value - diagonal[n - 2])
        .abs()
        .max((value - last_row[n - 2]).abs());
    if n >= 3 {
        let d_prev = (diagonal[n - 2] - diagonal[n - 3]).abs();
        let d_last = (diagonal[n - 1] - diagonal[n - 2]).abs();
        if d_last > d_prev && d_last > noise_floor {
            return Err(Error::ExtrapolationDiverged(format!(
                "diagonal differences grew from {d_prev:e} to {d_last:e}"
            )));
        }
    }
    Ok(Extrapolation {
        value,
        spread,
        diagonal,
    })
}

/// `lim_{ε→0} ∫_{|y−x|≥ε} k(x, y) dy` over ℝⁿ.
///
/// Directions are paired antipodally so the odd part of the integrand cancels
/// on every sphere; the excluded-ball values `I(ε)` are then extrapolated over
/// `cfg.pv_epsilons` assuming a leading `O(ε)` error.
pub fn integrate_pv(
    kernel: &PvKernel<'_>,
    f: &ScalarField,
    x: &Point,
    cfg: &QuadratureConfig,
) -> Result<QuadResult> {
    cfg.validate()?;
    if x.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: x.dim(),
        });
    }
    let n = f.dim();
    let tail_exponent = kernel.order - (n as f64 - 1.0);
    if !(tail_exponent > 1.0) {
        return Err(Error::NonIntegrable {
            exponent: kernel.order,
            required: n as f64,
        });
    }
    let (frame, symmetry) = polar_frame(f, x);
    let nm1 = (n - 1) as i32;
    let paired = |_y: &Point, r: f64, omega: &Point| {
        let yp = x.offset(omega, r);
        let ym = x.offset(omega, -r);
        [0.5 * ((kernel.eval)(x, &yp) + (kernel.eval)(x, &ym))]
    };
    let noise = |r: f64| {
        let k = |d: &Point| (kernel.eval)(x, &x.offset(d, r)).abs();
        64.0 * f64::EPSILON * (k(&frame.a) + k(&(-frame.a)) + k(&frame.b) + k(&(-frame.b)))
    };
    let eps = &cfg.pv_epsilons;
    let outer = polar(
        &frame,
        symmetry,
        x,
        eps[0],
        Upper::Infinite {
            exponent: tail_exponent,
        },
        &RadialSpec {
            scale: eps[0],
            origin_power: None,
            noise: Some(&noise),
            min_extent: field_extent(f, x),
        },
        |r| r.powi(nm1),
        paired,
        cfg,
        &cfg.tolerance(),
        "principal value (outer)",
    )?;
    let mut evaluations = outer.evaluations;
    let mut error = outer.error[0];
    let inc_tol = Tolerance {
        abs: cfg.abs_tol.max(cfg.rel_tol * outer.value[0].abs() / eps.len() as f64),
        rel: cfg.rel_tol,
        l1_relative: false,
    };
    let mut samples = vec![outer.value[0]];
    let mut running = outer.value[0];
    for w in eps.windows(2) {
        let inc = polar(
            &frame,
            symmetry,
            x,
            w[1],
            Upper::Finite(w[0]),
            &RadialSpec {
                scale: w[1],
                origin_power: None,
                noise: Some(&noise),
                min_extent: 0.0,
            },
            |r| r.powi(nm1),
            paired,
            cfg,
            &inc_tol,
            "principal value (shell)",
        )?;
        evaluations += inc.evaluations;
        error += inc.error[0];
        running += inc.value[0];
        samples.push(running);
    }
    let floor = 100.0 * error + cfg.abs_tol + 1e-12 * running.abs();
    let ex = richardson(&samples, floor)?;
    Ok(QuadResult {
        value: ex.value,
        error_estimate: ex.spread + error,
        tail_correction: outer.tail[0],
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::make_radial_field;

    #[test]
    fn richardson_removes_linear_and_quadratic_terms() {
        let a = |h: f64| 3.0 + 2.0 * h - 5.0 * h * h + 0.5 * h * h * h;
        let s: Vec<f64> = (0..4).map(|k| a(0.1 / 2f64.powi(k))).collect();
        let ex = richardson(&s, 0.0).unwrap();
        assert!((ex.value - 3.0).abs() < 1e-13);
    }

    #[test]
    fn richardson_flags_divergence() {
        let s = [1.0, 1.0, 1.0, 50.0];
        assert!(matches!(
            richardson(&s, 1e-12),
            Err(Error::ExtrapolationDiverged(_))
        ));
    }

    #[test]
    fn constant_field_has_zero_pv() {
        let f = ScalarField::constant(2, 3.5).unwrap();
        let k = |x: &Point, y: &Point| (f.eval(x) - f.eval(y)) / x.dist(y).powi(3);
        let kernel = PvKernel { eval: &k, order: 3.0 };
        let r = integrate_pv(&kernel, &f, &Point::xy(0.3, 0.1), &QuadratureConfig::default()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn odd_integrand_cancels() {
        // k(x, y) = (y − x)₁ e^{−|y−x|²}/|y−x|³ is odd about x
        let f = make_radial_field(3, |_| 0.0, Point::origin(3).unwrap(), None).unwrap();
        let k = |x: &Point, y: &Point| {
            let d = *y - *x;
            d.coords()[0] * (-d.norm_sq()).exp() / d.norm().powi(3)
        };
        let kernel = PvKernel { eval: &k, order: 4.0 };
        let r = integrate_pv(&kernel, &f, &Point::xyz(0.2, 0.0, 0.0), &QuadratureConfig::default())
            .unwrap();
        assert!(r.value.abs() < 1e-15, "{r:?}");
    }
}
