//! One-dimensional radial integration on [lo, hi] or [lo, ∞) with graded
//! panels, an optional power-law substitution at r = 0, and an analytic
//! power-law tail beyond the truncation radius.

use super::gk::{Adaptive, Tolerance};
use super::{QuadratureConfig, Truncation};
use crate::error::{Error, Result};

/// Upper limit of a radial integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Upper {
    Finite(f64),
    /// Infinite upper limit; the integrand decays like `r^(-exponent)`.
    Infinite { exponent: f64 },
}

#[derive(Clone, Copy)]
pub(crate) struct RadialSpec<'a> {
    /// Length of the first panel (feature scale of the integrand).
    pub scale: f64,
    /// Integrand behaves like `r^origin_power` as `r → 0` (only used when lo = 0).
    pub origin_power: Option<f64>,
    /// Rounding-noise level of the angular integrand at radius `r`, for
    /// integrands formed by cancellation. Angular refinement stops there.
    pub noise: Option<&'a (dyn Fn(f64) -> f64 + Sync)>,
    /// Automatic truncation never stops before this radius.
    pub min_extent: f64,
}

impl Default for RadialSpec<'_> {
    fn default() -> Self {
        RadialSpec {
            scale: 1.0,
            origin_power: None,
            noise: None,
            min_extent: 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct RadialOut<const K: usize> {
    pub value: [f64; K],
    pub error: [f64; K],
    pub tail: [f64; K],
    pub evaluations: usize,
}

/// Map between the integration variable `t` and the radius `r`.
#[derive(Clone, Copy, Debug)]
enum Map {
    /// r = t
    Identity,
    /// r = s·t^m on t < 1, r = s·t beyond
    Graded { s: f64, m: f64 },
}

impl Map {
    fn r(&self, t: f64) -> f64 {
        match *self {
            Map::Identity => t,
            Map::Graded { s, m } => {
                if t < 1.0 {
                    s * t.powf(m)
                } else {
                    s * t
                }
            }
        }
    }

    fn jac(&self, t: f64) -> f64 {
        match *self {
            Map::Identity => 1.0,
            Map::Graded { s, m } => {
                if t < 1.0 {
                    s * m * t.powf(m - 1.0)
                } else {
                    s
                }
            }
        }
    }

    fn t(&self, r: f64) -> f64 {
        match *self {
            Map::Identity => r,
            Map::Graded { s, .. } => r / s,
        }
    }
}

const MAX_TRUNCATION_FACTOR: f64 = 1e18;

pub(crate) fn integrate<const K: usize, F>(
    h: &F,
    lo: f64,
    hi: Upper,
    spec: &RadialSpec<'_>,
    cfg: &QuadratureConfig,
    tol: &Tolerance,
    what: &'static str,
) -> Result<RadialOut<K>>
where
    F: Fn(f64) -> [f64; K],
{
    if !(lo >= 0.0) || !lo.is_finite() {
        return Err(Error::InvalidArgument(format!("radial lower limit {lo}")));
    }
    if let Upper::Finite(b) = hi {
        if b < lo {
            return Err(Error::InvalidArgument(format!("empty radial interval [{lo}, {b}]")));
        }
        if b == lo {
            return Ok(RadialOut {
                value: [0.0; K],
                error: [0.0; K],
                tail: [0.0; K],
                evaluations: 0,
            });
        }
    }
    let scale = if spec.scale > 0.0 { spec.scale } else { 1.0 };

    let map = if lo == 0.0 {
        let m = match spec.origin_power {
            Some(p) if p <= -1.0 => {
                return Err(Error::InvalidArgument(format!(
                    "integrand ~ r^{p} is not integrable at the origin"
                )))
            }
            Some(p) if p.fract() != 0.0 || p < 0.0 => 1.0 / (p + 1.0),
            _ => 1.0,
        };
        Map::Graded { s: scale, m }
    } else {
        Map::Identity
    };
    let g = |t: f64| {
        let r = map.r(t);
        let j = map.jac(t);
        let mut v = h(r);
        for x in v.iter_mut() {
            *x *= j;
        }
        v
    };

    // geometric breakpoints in r
    let mut breaks_r = vec![lo];
    let mut r = if lo == 0.0 { scale } else { 2.0 * lo };
    let initial_end = match (hi, cfg.truncation) {
        (Upper::Finite(b), _) => b,
        (Upper::Infinite { .. }, Truncation::Radius(rt)) => rt.max(lo),
        (Upper::Infinite { .. }, Truncation::Auto) => (16.0 * scale).max(4.0 * lo).max(spec.min_extent),
    };
    while r < initial_end {
        breaks_r.push(r);
        r *= 2.0;
    }
    breaks_r.push(initial_end);
    breaks_r.dedup();

    let mut ad: Adaptive<K> = Adaptive::new();
    for w in breaks_r.windows(2) {
        ad.push(&g, map.t(w[0]), map.t(w[1]));
    }
    let budget = cfg.max_subdivisions;
    let mut ok = ad.refine(&g, tol, budget);
    let mut end = initial_end;

    let mut tail = [0.0; K];
    let mut tail_err = [0.0; K];

    if let Upper::Infinite { exponent } = hi {
        if !(exponent > 1.0) {
            return Err(Error::NonIntegrable {
                exponent,
                required: 1.0,
            });
        }
        let coef = |r: f64| {
            let mut c = h(r);
            for x in c.iter_mut() {
                *x *= r.powf(exponent);
            }
            c
        };
        let tail_at = |c: &[f64; K], r: f64| {
            let mut t = [0.0; K];
            for k in 0..K {
                t[k] = c[k] * r.powf(1.0 - exponent) / (exponent - 1.0);
            }
            t
        };
        // error of the analytic tail: its size times the relative drift of
        // the power-law coefficient between R/2 and R
        let tail_error = |c_end: &[f64; K], c_half: &[f64; K], r: f64| {
            let t = tail_at(c_end, r);
            let mut e = [0.0; K];
            for k in 0..K {
                let drift = if c_end[k] != 0.0 {
                    ((c_end[k] - c_half[k]) / c_end[k]).abs().min(1.0)
                } else if c_half[k] != 0.0 {
                    1.0
                } else {
                    0.0
                };
                e[k] = t[k].abs() * drift;
            }
            (t, e)
        };
        let mut c_end = coef(end);
        if cfg.truncation == Truncation::Auto {
            loop {
                let (v, _, _) = ad.totals();
                let (t, te) = tail_error(&c_end, &coef(0.5 * end), end);
                let small = (0..K).all(|k| {
                    t[k].is_finite() && te[k] <= (tol.abs).max(tol.rel * 0.1 * v[k].abs())
                });
                if small {
                    break;
                }
                if end > MAX_TRUNCATION_FACTOR * scale.max(lo) {
                    let (v, e, _) = ad.totals();
                    return Err(Error::NonConvergence {
                        what: "tail truncation",
                        subdivisions: ad.subdivisions,
                        partial: super::QuadResult {
                            value: v[0],
                            error_estimate: e[0],
                            tail_correction: t[0],
                            evaluations: ad.evaluations,
                        },
                    });
                }
                ad.push(&g, map.t(end), map.t(2.0 * end));
                end *= 2.0;
                c_end = coef(end);
                ok = ad.refine(&g, tol, budget) && ok;
            }
        }
        (tail, tail_err) = tail_error(&c_end, &coef(0.5 * end), end);
    }

    let (v, e, _) = ad.totals();
    let mut value = [0.0; K];
    let mut error = [0.0; K];
    for k in 0..K {
        value[k] = v[k] + tail[k];
        error[k] = e[k] + tail_err[k];
    }
    if !ok || value.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonConvergence {
            what,
            subdivisions: ad.subdivisions,
            partial: super::QuadResult {
                value: value[0],
                error_estimate: error[0],
                tail_correction: tail[0],
                evaluations: ad.evaluations,
            },
        });
    }
    Ok(RadialOut {
        value,
        error,
        tail,
        evaluations: ad.evaluations,
    })
}
