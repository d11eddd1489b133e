//! Verification suites and their structured reports.

mod suites;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::fields::Point;

pub use suites::*;

/// Serde helper that writes non-finite floats as the strings `"NaN"`,
/// `"inf"` and `"-inf"` and accepts them back.
pub mod lenient_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("NaN")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => t
                .parse::<f64>()
                .map_err(|_| serde::de::Error::custom(format!("not a number: {t}"))),
        }
    }
}

/// One pointwise comparison of two sides of an equation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualRecord {
    pub equation_id: String,
    pub probe: Point,
    #[serde(with = "lenient_f64")]
    pub lhs: f64,
    #[serde(with = "lenient_f64")]
    pub rhs: f64,
    #[serde(with = "lenient_f64")]
    pub abs_err: f64,
    #[serde(with = "lenient_f64")]
    pub rel_err: f64,
    /// Bound on `rel_err` for this record to pass.
    pub tolerance: f64,
    /// Set when either side could not be computed.
    pub error: Option<String>,
}

impl ResidualRecord {
    pub fn new(equation_id: impl Into<String>, probe: Point, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let abs_err = (lhs - rhs).abs();
        ResidualRecord {
            equation_id: equation_id.into(),
            probe,
            lhs,
            rhs,
            abs_err,
            rel_err: abs_err / rhs.abs().max(1.0),
            tolerance,
            error: None,
        }
    }

    pub fn failed(equation_id: impl Into<String>, probe: Point, rhs: f64, tolerance: f64, error: String) -> Self {
        ResidualRecord {
            equation_id: equation_id.into(),
            probe,
            lhs: f64::NAN,
            rhs,
            abs_err: f64::NAN,
            rel_err: f64::NAN,
            tolerance,
            error: Some(error),
        }
    }

    /// Builds a passing or failed record from a computed left side.
    pub fn from_result<E: std::fmt::Display>(
        equation_id: impl Into<String>,
        probe: Point,
        lhs: std::result::Result<f64, E>,
        rhs: f64,
        tolerance: f64,
    ) -> Self {
        match lhs {
            Ok(l) => ResidualRecord::new(equation_id, probe, l, rhs, tolerance),
            Err(e) => ResidualRecord::failed(equation_id, probe, rhs, tolerance, e.to_string()),
        }
    }

    pub fn passed(&self) -> bool {
        self.error.is_none() && self.rel_err <= self.tolerance
    }
}

/// A computed scalar compared with its expected closed-form value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralCheck {
    #[serde(with = "lenient_f64")]
    pub computed: f64,
    pub expected: f64,
    /// Bound on `|computed − expected| / |expected|`, or on the absolute
    /// difference when `expected` is 0.
    pub tolerance: f64,
    pub error: Option<String>,
}

impl IntegralCheck {
    pub fn new(computed: f64, expected: f64, tolerance: f64) -> Self {
        IntegralCheck {
            computed,
            expected,
            tolerance,
            error: None,
        }
    }

    pub fn from_result<E: std::fmt::Display>(
        computed: std::result::Result<f64, E>,
        expected: f64,
        tolerance: f64,
    ) -> Self {
        match computed {
            Ok(c) => IntegralCheck::new(c, expected, tolerance),
            Err(e) => IntegralCheck {
                computed: f64::NAN,
                expected,
                tolerance,
                error: Some(e.to_string()),
            },
        }
    }

    pub fn rel_err(&self) -> f64 {
        let d = (self.computed - self.expected).abs();
        if self.expected == 0.0 {
            d
        } else {
            d / self.expected.abs()
        }
    }

    pub fn passed(&self) -> bool {
        self.error.is_none() && self.rel_err() <= self.tolerance
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite_id: String,
    pub records: Vec<ResidualRecord>,
    pub integrals: BTreeMap<String, IntegralCheck>,
    pub passed: bool,
    pub config_echo: serde_json::Value,
}

impl VerificationReport {
    /// Assembles a report; `passed` is derived from the contents.
    pub fn new(
        suite_id: impl Into<String>,
        records: Vec<ResidualRecord>,
        integrals: BTreeMap<String, IntegralCheck>,
        config_echo: serde_json::Value,
    ) -> Self {
        let mut r = VerificationReport {
            suite_id: suite_id.into(),
            records,
            integrals,
            passed: false,
            config_echo,
        };
        r.passed = r.recompute_passed();
        r
    }

    pub fn recompute_passed(&self) -> bool {
        self.records.iter().all(ResidualRecord::passed)
            && self.integrals.values().all(IntegralCheck::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ResidualRecord> {
        self.records.iter().filter(|r| !r.passed())
    }

    /// Largest relative error among records whose id starts with `prefix`.
    pub fn max_rel_err(&self, prefix: &str) -> f64 {
        self.records
            .iter()
            .filter(|r| r.equation_id.starts_with(prefix))
            .map(|r| if r.rel_err.is_nan() { f64::INFINITY } else { r.rel_err })
            .fold(0.0, f64::max)
    }

    /// Concatenates several reports; record and integral ids are prefixed
    /// with `"<suite_id>:"`.
    pub fn merge(suite_id: impl Into<String>, parts: Vec<VerificationReport>, config_echo: serde_json::Value) -> Self {
        let mut records = Vec::new();
        let mut integrals = BTreeMap::new();
        for part in parts {
            for mut r in part.records {
                r.equation_id = format!("{}:{}", part.suite_id, r.equation_id);
                records.push(r);
            }
            for (k, v) in part.integrals {
                integrals.insert(format!("{}:{}", part.suite_id, k), v);
            }
        }
        VerificationReport::new(suite_id, records, integrals, config_echo)
    }
}

/// Default probe set about `center`: the center, radii `{0.5, 1, 3}/μ` in
/// four directions, and two far probes at `10/μ`.
pub fn default_probes(center: &Point, mu: f64) -> Vec<Point> {
    let dirs = probe_axes(center.dim());
    let mut out = vec![*center];
    for r in [0.5, 1.0, 3.0] {
        for d in &dirs {
            out.push(center.offset(d, r / mu));
        }
    }
    out.push(center.offset(&dirs[0], 10.0 / mu));
    out.push(center.offset(&dirs[dirs.len() - 1], 10.0 / mu));
    out
}

/// Ten probes: the center and radii `{0.5, 1, 3}/μ` in three directions.
pub fn ie_probes(center: &Point, mu: f64) -> Vec<Point> {
    let dirs = probe_axes(center.dim());
    let mut out = vec![*center];
    for r in [0.5, 1.0, 3.0] {
        for d in &dirs[..3] {
            out.push(center.offset(d, r / mu));
        }
    }
    out
}

fn probe_axes(dim: usize) -> Vec<Point> {
    if dim == 2 {
        (0..4)
            .map(|k| {
                let t = 0.3 + std::f64::consts::FRAC_PI_2 * k as f64;
                Point::xy(t.cos(), t.sin())
            })
            .collect()
    } else {
        let s = 1.0 / 3f64.sqrt();
        vec![
            Point::xyz(1.0, 0.0, 0.0),
            Point::xyz(0.0, 1.0, 0.0),
            Point::xyz(0.0, 0.0, 1.0),
            Point::xyz(s, s, s),
        ]
    }
}
