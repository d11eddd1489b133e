//! Points, scalar fields and decay metadata on ℝ² and ℝ³.
//!
//! Fields are pure evaluation maps: closed-form solutions are evaluated
//! directly, never through a grid. Each field carries the metadata the
//! quadrature layer needs to pick coordinates and build tail corrections.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of ℝ² or ℝ³.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point {
    coords: [f64; 3],
    dim: usize,
}

impl Point {
    pub fn new(coords: &[f64]) -> Result<Self> {
        let dim = coords.len();
        check_dim(dim)?;
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite coordinate in {coords:?}"
            )));
        }
        let mut c = [0.0; 3];
        c[..dim].copy_from_slice(coords);
        Ok(Point { coords: c, dim })
    }

    pub const fn xy(x: f64, y: f64) -> Self {
        Point {
            coords: [x, y, 0.0],
            dim: 2,
        }
    }

    pub const fn xyz(x: f64, y: f64, z: f64) -> Self {
        Point {
            coords: [x, y, z],
            dim: 3,
        }
    }

    pub fn origin(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Point {
            coords: [0.0; 3],
            dim,
        })
    }

    /// The `i`-th unit basis vector.
    pub fn unit(dim: usize, i: usize) -> Result<Self> {
        let mut p = Point::origin(dim)?;
        if i >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {i} out of range for dimension {dim}"
            )));
        }
        p.coords[i] = 1.0;
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim]
    }

    pub fn dot(&self, other: &Point) -> f64 {
        self.coords[0] * other.coords[0]
            + self.coords[1] * other.coords[1]
            + self.coords[2] * other.coords[2]
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (*self - *other).norm()
    }

    /// `self + t·dir`
    pub fn offset(&self, dir: &Point, t: f64) -> Point {
        Point {
            coords: [
                self.coords[0] + t * dir.coords[0],
                self.coords[1] + t * dir.coords[1],
                self.coords[2] + t * dir.coords[2],
            ],
            dim: self.dim,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|c| c.is_finite())
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coords()).finish()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords().iter().map(|c| format!("{c}")).collect();
        write!(f, "({})", parts.join(" "))
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Point::new(&v)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.coords().to_vec()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        self.offset(&rhs, 1.0)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        self.offset(&rhs, -1.0)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point {
            coords: [self.coords[0] * s, self.coords[1] * s, self.coords[2] * s],
            dim: self.dim,
        }
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        self * -1.0
    }
}

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(Error::InvalidDimension(dim))
    }
}

/// Asserted power-law decay: `|f(x)| ≤ coefficient·|x|^(-exponent)` for `|x| ≥ valid_radius`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayHint {
    pub exponent: f64,
    pub coefficient: f64,
    pub valid_radius: f64,
}

impl DecayHint {
    pub fn new(exponent: f64, coefficient: f64, valid_radius: f64) -> Result<Self> {
        if !(coefficient >= 0.0) || !(valid_radius > 0.0) || exponent.is_nan() {
            return Err(Error::InvalidArgument(format!(
                "decay hint needs coefficient ≥ 0 and valid_radius > 0 (got {coefficient}, {valid_radius})"
            )));
        }
        Ok(DecayHint {
            exponent,
            coefficient,
            valid_radius,
        })
    }

    pub fn bound(&self, radius: f64) -> f64 {
        self.coefficient * radius.powf(-self.exponent)
    }

    /// Checks the asserted bound on a deterministic probe set with `|x| ≥ valid_radius`.
    pub fn spot_check(&self, field: &ScalarField) -> Result<()> {
        for k in 0..12 {
            let radius = self.valid_radius * 2f64.powi(k);
            for dir in probe_directions(field.dim()) {
                let x = Point::origin(field.dim())?.offset(&dir, radius);
                let value = field.eval(&x).abs();
                let bound = self.bound(radius);
                if value > bound * (1.0 + 1e-12) + f64::MIN_POSITIVE {
                    return Err(Error::DecayViolated {
                        radius,
                        value,
                        bound,
                    });
                }
            }
        }
        Ok(())
    }
}

/// A fixed set of unit directions used for spot checks.
pub fn probe_directions(dim: usize) -> Vec<Point> {
    if dim == 2 {
        (0..8)
            .map(|k| {
                let t = std::f64::consts::PI * (k as f64) / 4.0 + 0.1;
                Point::xy(t.cos(), t.sin())
            })
            .collect()
    } else {
        let s = 1.0 / 3f64.sqrt();
        vec![
            Point::xyz(1.0, 0.0, 0.0),
            Point::xyz(0.0, 1.0, 0.0),
            Point::xyz(0.0, 0.0, 1.0),
            Point::xyz(-1.0, 0.0, 0.0),
            Point::xyz(0.0, -1.0, 0.0),
            Point::xyz(0.0, 0.0, -1.0),
            Point::xyz(s, s, s),
            Point::xyz(-s, s, -s),
        ]
    }
}

pub type EvalFn = dyn Fn(&Point) -> f64 + Send + Sync;
pub type ProfileFn = dyn Fn(f64) -> f64 + Send + Sync;

/// Radial symmetry metadata: `f(x) = profile(|x − center|)`.
#[derive(Clone)]
pub struct Radial {
    pub center: Point,
    pub profile: Arc<ProfileFn>,
}

/// An evaluable real field on ℝⁿ, n ∈ {2, 3}.
///
/// Evaluation is a pure function; fields are cheap to clone and safe to
/// share across worker threads.
#[derive(Clone)]
pub struct ScalarField {
    dim: usize,
    eval: Arc<EvalFn>,
    decay: Option<DecayHint>,
    singularities: Vec<Point>,
    radial: Option<Radial>,
    focus: Option<Point>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("dim", &self.dim)
            .field("decay", &self.decay)
            .field("singularities", &self.singularities)
            .field("radial_center", &self.radial.as_ref().map(|r| r.center))
            .finish()
    }
}

impl ScalarField {
    pub fn new<F>(dim: usize, eval: F) -> Result<Self>
    where
        F: Fn(&Point) -> f64 + Send + Sync + 'static,
    {
        check_dim(dim)?;
        Ok(ScalarField {
            dim,
            eval: Arc::new(eval),
            decay: None,
            singularities: Vec::new(),
            radial: None,
            focus: None,
        })
    }

    pub fn constant(dim: usize, value: f64) -> Result<Self> {
        let origin = Point::origin(dim)?;
        let mut f = make_radial_field(dim, move |_| value, origin, None)?;
        if value == 0.0 {
            f.decay = Some(DecayHint::new(f64::INFINITY, 0.0, 1.0).expect("valid"));
        }
        Ok(f)
    }

    pub fn with_decay(mut self, decay: DecayHint) -> Self {
        self.decay = Some(decay);
        self
    }

    pub fn with_singularities(mut self, pts: Vec<Point>) -> Self {
        self.singularities = pts;
        self
    }

    /// Marks a point where the field concentrates; quadrature orients polar
    /// axes towards it.
    pub fn with_focus(mut self, focus: Point) -> Self {
        self.focus = Some(focus);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn eval(&self, x: &Point) -> f64 {
        (self.eval)(x)
    }

    pub fn decay(&self) -> Option<&DecayHint> {
        self.decay.as_ref()
    }

    pub fn singularities(&self) -> &[Point] {
        &self.singularities
    }

    pub fn radial(&self) -> Option<&Radial> {
        self.radial.as_ref()
    }

    /// The point quadrature should treat as the field's concentration center.
    pub fn focus(&self) -> Option<Point> {
        self.radial.as_ref().map(|r| r.center).or(self.focus)
    }

    /// True when `x` lies within `tol` of a listed singularity.
    pub fn near_singularity(&self, x: &Point, tol: f64) -> bool {
        self.singularities.iter().any(|s| s.dist(x) <= tol)
    }

    /// `a·f + b·g`, keeping radial symmetry when both share a center.
    pub fn linear_combination(a: f64, f: &ScalarField, b: f64, g: &ScalarField) -> Result<Self> {
        if f.dim != g.dim {
            return Err(Error::DimensionMismatch {
                expected: f.dim,
                got: g.dim,
            });
        }
        let (fe, ge) = (f.eval.clone(), g.eval.clone());
        let mut out = ScalarField::new(f.dim, move |x| a * fe(x) + b * ge(x))?;
        out.decay = match (f.decay, g.decay) {
            (Some(df), Some(dg)) => {
                let exponent = df.exponent.min(dg.exponent);
                let coefficient = a.abs() * df.coefficient + b.abs() * dg.coefficient;
                let valid_radius = df.valid_radius.max(dg.valid_radius).max(1.0);
                Some(DecayHint::new(exponent, coefficient, valid_radius)?)
            }
            _ => None,
        };
        out.singularities = f
            .singularities
            .iter()
            .chain(g.singularities.iter())
            .copied()
            .collect();
        if let (Some(rf), Some(rg)) = (&f.radial, &g.radial) {
            if rf.center == rg.center {
                let (pf, pg) = (rf.profile.clone(), rg.profile.clone());
                out.radial = Some(Radial {
                    center: rf.center,
                    profile: Arc::new(move |r| a * pf(r) + b * pg(r)),
                });
            }
        }
        out.focus = f.focus().or(g.focus());
        Ok(out)
    }

    /// Pointwise product; decay exponents add.
    pub fn product(f: &ScalarField, g: &ScalarField) -> Result<Self> {
        if f.dim != g.dim {
            return Err(Error::DimensionMismatch {
                expected: f.dim,
                got: g.dim,
            });
        }
        let (fe, ge) = (f.eval.clone(), g.eval.clone());
        let mut out = ScalarField::new(f.dim, move |x| fe(x) * ge(x))?;
        out.decay = match (f.decay, g.decay) {
            (Some(df), Some(dg)) => Some(DecayHint::new(
                df.exponent + dg.exponent,
                df.coefficient * dg.coefficient,
                df.valid_radius.max(dg.valid_radius),
            )?),
            _ => None,
        };
        out.singularities = f
            .singularities
            .iter()
            .chain(g.singularities.iter())
            .copied()
            .collect();
        if let (Some(rf), Some(rg)) = (&f.radial, &g.radial) {
            if rf.center == rg.center {
                let (pf, pg) = (rf.profile.clone(), rg.profile.clone());
                out.radial = Some(Radial {
                    center: rf.center,
                    profile: Arc::new(move |r| pf(r) * pg(r)),
                });
            }
        }
        out.focus = f.focus().or(g.focus());
        Ok(out)
    }

    /// `x ↦ f(x + shift)`; the translate of a field.
    pub fn translate(&self, shift: &Point) -> Result<Self> {
        if shift.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: shift.dim(),
            });
        }
        let e = self.eval.clone();
        let s = *shift;
        let mut out = ScalarField::new(self.dim, move |x| e(&(*x + s)))?;
        // the hint's |x| reference moves by |shift|
        out.decay = match self.decay {
            Some(d) => {
                let r0 = d.valid_radius + shift.norm();
                let grow = if d.exponent.is_finite() {
                    2f64.powf(d.exponent.max(0.0))
                } else {
                    1.0
                };
                Some(DecayHint::new(d.exponent, d.coefficient * grow, 2.0 * r0)?)
            }
            None => None,
        };
        out.singularities = self.singularities.iter().map(|p| *p - s).collect();
        out.radial = self.radial.as_ref().map(|r| Radial {
            center: r.center - s,
            profile: r.profile.clone(),
        });
        out.focus = self.focus.map(|p| p - s);
        Ok(out)
    }
}

/// Builds `x ↦ profile(|x − center|)`.
pub fn make_radial_field<P>(
    dim: usize,
    profile: P,
    center: Point,
    decay: Option<DecayHint>,
) -> Result<ScalarField>
where
    P: Fn(f64) -> f64 + Send + Sync + 'static,
{
    check_dim(dim)?;
    if center.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: center.dim(),
        });
    }
    let profile: Arc<ProfileFn> = Arc::new(profile);
    let p = profile.clone();
    let mut f = ScalarField::new(dim, move |x| p(x.dist(&center)))?;
    f.decay = decay;
    f.radial = Some(Radial { center, profile });
    Ok(f)
}

/// Probe points used to validate pointwise operations before they are built.
fn validation_probes(f: &ScalarField) -> Vec<Point> {
    let base = f.focus().unwrap_or_else(|| Point::origin(f.dim()).expect("valid dim"));
    let mut out = vec![base];
    for &r in &[0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0] {
        for d in probe_directions(f.dim()) {
            out.push(base.offset(&d, r));
        }
    }
    out
}

/// Pointwise power `f^q`. The decay exponent is multiplied by `q`.
///
/// Non-integer powers are rejected when `f` is negative at any validation
/// probe.
pub fn field_power(f: &ScalarField, q: f64) -> Result<ScalarField> {
    let integer = q.fract() == 0.0 && q.abs() < i32::MAX as f64;
    if !integer {
        for x in validation_probes(f) {
            if f.near_singularity(&x, 0.0) {
                continue;
            }
            let v = f.eval(&x);
            if v < 0.0 {
                return Err(Error::NegativeBase {
                    base: v,
                    exponent: q,
                });
            }
        }
    }
    let pow = move |v: f64| {
        if integer {
            v.powi(q as i32)
        } else {
            v.powf(q)
        }
    };
    let e = f.eval.clone();
    let mut out = ScalarField::new(f.dim, move |x| pow(e(x)))?;
    out.decay = match f.decay {
        Some(d) if q > 0.0 => Some(DecayHint::new(
            d.exponent * q,
            d.coefficient.powf(q),
            d.valid_radius,
        )?),
        _ => None,
    };
    out.singularities = f.singularities.clone();
    out.radial = f.radial.as_ref().map(|r| {
        let p = r.profile.clone();
        Radial {
            center: r.center,
            profile: Arc::new(move |s| pow(p(s))) as Arc<ProfileFn>,
        }
    });
    out.focus = f.focus;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_rejects_bad_dimensions_and_nan() {
        assert!(matches!(Point::new(&[1.0]), Err(Error::InvalidDimension(1))));
        assert!(Point::new(&[1.0, 2.0, 3.0, 4.0]).is_err());
        assert!(Point::new(&[f64::NAN, 0.0]).is_err());
        let p = Point::new(&[3.0, 4.0]).unwrap();
        assert_eq!(p.norm(), 5.0);
    }

    #[test]
    fn make_radial_field_rejects_dimension_one() {
        let c = Point::xy(0.0, 0.0);
        assert!(matches!(
            make_radial_field(1, |_| 1.0, c, None),
            Err(Error::InvalidDimension(1))
        ));
    }

    #[test]
    fn constant_profile_is_constant() {
        let f = make_radial_field(2, |_| 1.0, Point::xy(3.0, -1.0), None).unwrap();
        for x in [Point::xy(0.0, 0.0), Point::xy(10.0, 7.0), Point::xy(3.0, -1.0)] {
            assert_eq!(f.eval(&x), 1.0);
        }
    }

    #[test]
    fn bubble_profile_direct_evaluation() {
        let f = make_radial_field(
            3,
            |r| 1.0 / (1.0 + r * r),
            Point::origin(3).unwrap(),
            None,
        )
        .unwrap();
        assert_eq!(f.eval(&Point::xyz(1.0, 0.0, 0.0)), 0.5);

        let p = 1.5f64;
        let u = make_radial_field(
            2,
            move |r| (6.0 / p).powf(0.25) * (1.0 / (1.0 + r * r)).sqrt(),
            Point::origin(2).unwrap(),
            None,
        )
        .unwrap();
        assert!((u.eval(&Point::xy(0.0, 0.0)) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn field_power_values_and_decay() {
        let one = ScalarField::constant(2, 1.0).unwrap();
        let one4 = field_power(&one, 4.0).unwrap();
        assert_eq!(one4.eval(&Point::xy(2.0, 5.0)), 1.0);

        let p = 1.5f64;
        let u = make_radial_field(
            2,
            move |r| (6.0 / p).powf(0.25) * (1.0 / (1.0 + r * r)).sqrt(),
            Point::origin(2).unwrap(),
            Some(DecayHint::new(1.0, 2.0, 1.0).unwrap()),
        )
        .unwrap();
        let u4 = field_power(&u, 4.0).unwrap();
        assert!((u4.eval(&Point::xy(0.0, 0.0)) - 4.0).abs() < 1e-14);
        assert_eq!(u4.decay().unwrap().exponent, 4.0);
        assert_eq!(u4.decay().unwrap().coefficient, 16.0);
    }

    #[test]
    fn field_power_rejects_negative_base_for_fractional_exponent() {
        let f = ScalarField::new(2, |x| x.coords()[0]).unwrap();
        assert!(matches!(
            field_power(&f, 2.5),
            Err(Error::NegativeBase { .. })
        ));
        // integer powers of signed fields are fine
        let sq = field_power(&f, 2.0).unwrap();
        assert_eq!(sq.eval(&Point::xy(-3.0, 0.0)), 9.0);
    }

    #[test]
    fn decay_hint_spot_check() {
        let f = make_radial_field(
            2,
            |r| 1.0 / (1.0 + r * r),
            Point::origin(2).unwrap(),
            None,
        )
        .unwrap();
        assert!(DecayHint::new(2.0, 1.0, 1.0).unwrap().spot_check(&f).is_ok());
        assert!(matches!(
            DecayHint::new(3.0, 1.0, 1.0).unwrap().spot_check(&f),
            Err(Error::DecayViolated { .. })
        ));
        assert!(DecayHint::new(2.0, -1.0, 1.0).is_err());
        assert!(DecayHint::new(2.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn point_serializes_as_plain_array() {
        let p = Point::xyz(1.0, -2.0, 0.5);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[1.0,-2.0,0.5]");
        let back: Point = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<Point>("[1.0]").is_err());
    }
}
