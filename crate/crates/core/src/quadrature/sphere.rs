//! Integration over the unit circle / unit sphere with a chosen polar axis.

use std::f64::consts::PI;

use super::gk::{self, Tolerance};
use crate::fields::Point;

/// Orthonormal frame whose first vector is the polar axis.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Frame {
    pub dim: usize,
    pub a: Point,
    pub b: Point,
    pub c: Point,
}

impl Frame {
    /// Frame with polar axis along `axis` (normalized); falls back to e₁ when
    /// `axis` is absent or degenerate.
    pub fn new(dim: usize, axis: Option<Point>) -> Frame {
        let e1 = if dim == 2 {
            Point::xy(1.0, 0.0)
        } else {
            Point::xyz(1.0, 0.0, 0.0)
        };
        let a = match axis {
            Some(v) if v.norm() > 0.0 && v.norm().is_finite() => v * (1.0 / v.norm()),
            _ => e1,
        };
        if dim == 2 {
            let c = a.coords();
            return Frame {
                dim,
                a,
                b: Point::xy(-c[1], c[0]),
                c: Point::xy(0.0, 0.0),
            };
        }
        let ac = a.coords();
        // pick the coordinate axis least aligned with `a`
        let helper = if ac[0].abs() <= ac[1].abs() && ac[0].abs() <= ac[2].abs() {
            Point::xyz(1.0, 0.0, 0.0)
        } else if ac[1].abs() <= ac[2].abs() {
            Point::xyz(0.0, 1.0, 0.0)
        } else {
            Point::xyz(0.0, 0.0, 1.0)
        };
        let b = helper.offset(&a, -helper.dot(&a));
        let b = b * (1.0 / b.norm());
        let (x, y) = (a.coords(), b.coords());
        let c = Point::xyz(
            x[1] * y[2] - x[2] * y[1],
            x[2] * y[0] - x[0] * y[2],
            x[0] * y[1] - x[1] * y[0],
        );
        Frame { dim, a, b, c }
    }

    fn dir2(&self, theta: f64) -> Point {
        let (s, c) = theta.sin_cos();
        self.a * c + self.b * s
    }

    fn dir3(&self, theta: f64, phi: f64) -> Point {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        self.a * ct + (self.b * cp + self.c * sp) * st
    }
}

/// Surface measure of the unit sphere in ℝⁿ.
pub fn sphere_area(dim: usize) -> f64 {
    match dim {
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => panic!("unsupported dimension {dim}"),
    }
}

/// How the integrand depends on direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Symmetry {
    /// General dependence.
    None,
    /// Depends only on the angle to the polar axis.
    Axial,
    /// Independent of direction.
    Constant,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct AngularResult<const K: usize> {
    pub value: [f64; K],
    pub evaluations: usize,
    pub converged: bool,
}

/// ∫_{S^{n−1}} g(ω) dω.
pub(crate) fn integrate<const K: usize, G>(
    frame: &Frame,
    symmetry: Symmetry,
    g: &G,
    tol: &Tolerance,
    max_subdivisions: usize,
) -> AngularResult<K>
where
    G: Fn(&Point) -> [f64; K],
{
    let area = sphere_area(frame.dim);
    match symmetry {
        Symmetry::Constant => {
            let mut value = g(&frame.a);
            for v in value.iter_mut() {
                *v *= area;
            }
            AngularResult {
                value,
                evaluations: 1,
                converged: true,
            }
        }
        Symmetry::Axial if frame.dim == 2 => {
            let f = |t: f64| g(&frame.dir2(t));
            let (ad, ok) = gk::integrate(&f, &[0.0, PI], tol, max_subdivisions);
            let (mut v, _, _) = ad.totals();
            for x in v.iter_mut() {
                *x *= 2.0;
            }
            AngularResult {
                value: v,
                evaluations: ad.evaluations,
                converged: ok,
            }
        }
        Symmetry::Axial => {
            let f = |t: f64| {
                let mut v = g(&frame.dir3(t, 0.0));
                let w = 2.0 * PI * t.sin();
                for x in v.iter_mut() {
                    *x *= w;
                }
                v
            };
            let (ad, ok) = gk::integrate(&f, &[0.0, 0.5 * PI, PI], tol, max_subdivisions);
            let (v, _, _) = ad.totals();
            AngularResult {
                value: v,
                evaluations: ad.evaluations,
                converged: ok,
            }
        }
        Symmetry::None if frame.dim == 2 => {
            let f = |t: f64| g(&frame.dir2(t));
            let (ad, ok) = gk::integrate(&f, &[0.0, PI, 2.0 * PI], tol, max_subdivisions);
            let (v, _, _) = ad.totals();
            AngularResult {
                value: v,
                evaluations: ad.evaluations,
                converged: ok,
            }
        }
        Symmetry::None => {
            let inner_tol = Tolerance {
                abs: tol.abs / 10.0,
                rel: tol.rel / 10.0,
                l1_relative: true,
            };
            let evals = std::cell::Cell::new(0usize);
            let inner_ok = std::cell::Cell::new(true);
            let f = |t: f64| {
                let st = t.sin();
                let h = |p: f64| g(&frame.dir3(t, p));
                let (ad, ok) = gk::integrate(&h, &[0.0, PI, 2.0 * PI], &inner_tol, max_subdivisions);
                evals.set(evals.get() + ad.evaluations);
                if !ok {
                    inner_ok.set(false);
                }
                let (mut v, _, _) = ad.totals();
                for x in v.iter_mut() {
                    *x *= st;
                }
                v
            };
            let (ad, ok) = gk::integrate(&f, &[0.0, 0.5 * PI, PI], tol, max_subdivisions);
            let (v, _, _) = ad.totals();
            AngularResult {
                value: v,
                evaluations: evals.get(),
                converged: ok && inner_ok.get(),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: Tolerance = Tolerance {
        abs: 1e-14,
        rel: 1e-12,
        l1_relative: true,
    };

    #[test]
    fn frames_are_orthonormal() {
        for axis in [
            Point::xyz(0.3, -0.2, 0.9),
            Point::xyz(0.0, 0.0, 1.0),
            Point::xyz(-1.0, 0.0, 0.0),
        ] {
            let f = Frame::new(3, Some(axis));
            for (u, v) in [(f.a, f.b), (f.a, f.c), (f.b, f.c)] {
                assert!(u.dot(&v).abs() < 1e-15);
            }
            for u in [f.a, f.b, f.c] {
                assert!((u.norm() - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn second_moment_on_sphere() {
        // ∫ ω₁² dω = |S|/n
        for dim in [2, 3] {
            let frame = Frame::new(dim, Some(Point::new(&vec![0.3; dim]).unwrap()));
            let r = integrate(&frame, Symmetry::None, &|w: &Point| [w.coords()[0].powi(2)], &TOL, 100);
            assert!(r.converged);
            assert!((r.value[0] - sphere_area(dim) / dim as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn axial_path_matches_general_path() {
        let frame = Frame::new(3, Some(Point::xyz(0.0, 1.0, 0.0)));
        let g = |w: &Point| [(3.0 * w.coords()[1]).exp()];
        let a = integrate(&frame, Symmetry::Axial, &g, &TOL, 100);
        let n = integrate(&frame, Symmetry::None, &g, &TOL, 100);
        // ∫ e^{3t} dω = 2π (e³ − e⁻³)/3
        let exact = 2.0 * PI * (3f64.exp() - (-3f64).exp()) / 3.0;
        assert!((a.value[0] - exact).abs() < 1e-11 * exact);
        assert!((n.value[0] - exact).abs() < 1e-11 * exact);
        assert!(a.evaluations < n.evaluations);
    }
}
