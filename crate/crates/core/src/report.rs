//! Structured pass/fail records for identity checks.

use std::collections::BTreeMap;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bipoly::{residual, scale_of, BiPoly, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// The check failed where a known discrepancy in the source statement
    /// was expected, so it is a finding rather than a regression.
    BoundaryDeviation,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::BoundaryDeviation => "boundary-deviation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Real(f64),
    Complex {
        re: f64,
        im: f64,
    },
    /// Row-major entries as `[re, im]`.
    Matrix(Vec<Vec<[f64; 2]>>),
    Poly(BiPoly<f64>),
    Missing,
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Real(x)
    }
}

impl From<Complex64> for Value {
    fn from(z: Complex64) -> Self {
        Value::Complex { re: z.re, im: z.im }
    }
}

impl From<BiPoly<f64>> for Value {
    fn from(p: BiPoly<f64>) -> Self {
        Value::Poly(p)
    }
}

impl From<&crate::quaternion::MatrixRep> for Value {
    fn from(m: &crate::quaternion::MatrixRep) -> Self {
        Value::Matrix(
            m.0.iter()
                .map(|row| row.iter().map(|c| [c.re, c.im]).collect())
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub lhs: Value,
    pub rhs: Value,
    pub residual: f64,
    pub tolerance: f64,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip)]
    deviation_expected: bool,
}

impl IdentityReport {
    pub fn new(
        identity: impl Into<String>,
        lhs: impl Into<Value>,
        rhs: impl Into<Value>,
        residual: f64,
        tolerance: f64,
    ) -> Self {
        let status = if residual <= tolerance {
            Status::Pass
        } else {
            Status::Fail
        };
        Self {
            identity: identity.into(),
            parameters: BTreeMap::new(),
            lhs: lhs.into(),
            rhs: rhs.into(),
            residual,
            tolerance,
            status,
            note: None,
            deviation_expected: false,
        }
    }

    /// Coefficient comparison of two polynomials. Exact fields require a zero
    /// residual; floating point allows `1e-12` of the largest coefficient.
    pub fn poly<C: Scalar>(identity: impl Into<String>, lhs: &BiPoly<C>, rhs: &BiPoly<C>) -> Self {
        Self::poly_with_terms(identity, lhs, rhs, &[])
    }

    /// As [`IdentityReport::poly`], with the float tolerance also covering the
    /// coefficients of `terms`, the polynomials that were combined into `lhs`.
    pub fn poly_with_terms<C: Scalar>(
        identity: impl Into<String>,
        lhs: &BiPoly<C>,
        rhs: &BiPoly<C>,
        terms: &[&BiPoly<C>],
    ) -> Self {
        let res = residual(lhs, rhs);
        let tol = if C::is_exact() {
            0.0
        } else {
            1e-12 * scale_of(&[lhs, rhs]).max(scale_of(terms))
        };
        let mut r = Self::new(identity, lhs.to_f64(), rhs.to_f64(), res, tol);
        if C::is_exact() {
            r.parameters.insert("mode".into(), "rational".into());
        }
        r
    }

    /// Relative comparison `|lhs - rhs| <= rel·max(1, |rhs|)` with an absolute
    /// floor, for scalar checks.
    pub fn scalar(identity: impl Into<String>, lhs: Complex64, rhs: Complex64, rel: f64) -> Self {
        let res = (lhs - rhs).norm();
        Self::new(identity, lhs, rhs, res, rel * rhs.norm().max(1.0))
    }

    pub fn param(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    pub fn indices(self, m: usize, n: usize) -> Self {
        self.param("m", m).param("n", n)
    }

    pub fn beta(self, beta: f64) -> Self {
        self.param("beta", beta)
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Mark a failure as a known deviation of the printed statement.
    pub fn expect_deviation(mut self, note: impl Into<String>) -> Self {
        if self.status == Status::Fail {
            self.status = Status::BoundaryDeviation;
        }
        self.note = Some(note.into());
        self.deviation_expected = true;
        self
    }

    /// Multiply a nonzero tolerance by `factor` and recompute the status.
    /// Exact comparisons (tolerance 0) are left alone.
    pub fn rescale_tolerance(mut self, factor: f64) -> Self {
        if self.tolerance == 0.0 {
            return self;
        }
        self.tolerance *= factor;
        self.status = if self.residual <= self.tolerance {
            Status::Pass
        } else if self.deviation_expected {
            Status::BoundaryDeviation
        } else {
            Status::Fail
        };
        self.finalize()
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Status with NaN residuals counted as failures.
    pub fn finalize(mut self) -> Self {
        if self.residual.is_nan() {
            self.status = Status::Fail;
        }
        self
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
    pub boundary_deviation: usize,
}

impl Tally {
    pub fn of(reports: &[IdentityReport]) -> Self {
        let mut t = Tally::default();
        for r in reports {
            match r.status {
                Status::Pass => t.pass += 1,
                Status::Fail => t.fail += 1,
                Status::BoundaryDeviation => t.boundary_deviation += 1,
            }
        }
        t
    }

    pub fn total(&self) -> usize {
        self.pass + self.fail + self.boundary_deviation
    }

    /// 0 when everything passes, 1 on any failure, 2 when the only
    /// non-passing records are known deviations.
    pub fn exit_code(&self) -> i32 {
        if self.fail > 0 {
            1
        } else if self.boundary_deviation > 0 {
            2
        } else {
            0
        }
    }
}

pub fn write_json_lines<W: Write>(reports: &[IdentityReport], mut out: W) -> std::io::Result<()> {
    for r in reports {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipoly::rational;
    use num_rational::BigRational;

    #[test]
    fn status_follows_tolerance() {
        let r = IdentityReport::new("x", 1.0, 1.0 + 1e-13, 1e-13, 1e-12);
        assert!(r.passed());
        let r = IdentityReport::new("x", 1.0, 2.0, 1.0, 1e-12);
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.clone().expect_deviation("known").status, Status::BoundaryDeviation);
        let r = IdentityReport::new("x", 1.0, f64::NAN, f64::NAN, 1e-12).finalize();
        assert_eq!(r.status, Status::Fail);
    }

    #[test]
    fn exact_poly_requires_zero() {
        let p: BiPoly<BigRational> = BiPoly::from_terms([(1, 0, rational(1, 3))]);
        let q: BiPoly<BigRational> = BiPoly::from_terms([(1, 0, rational(1, 3))]);
        let r = IdentityReport::poly("same", &p, &q);
        assert!(r.passed());
        assert_eq!(r.tolerance, 0.0);
        let q2 = BiPoly::from_terms([(1, 0, rational(1, 3) + rational(1, 1_000_000_000))]);
        assert!(!IdentityReport::poly("off", &p, &q2).passed());
    }

    #[test]
    fn exit_codes() {
        let pass = IdentityReport::new("a", 0.0, 0.0, 0.0, 0.0);
        let fail = IdentityReport::new("b", 0.0, 1.0, 1.0, 0.0);
        let dev = fail.clone().expect_deviation("boundary");
        assert_eq!(Tally::of(std::slice::from_ref(&pass)).exit_code(), 0);
        assert_eq!(Tally::of(&[pass.clone(), dev.clone()]).exit_code(), 2);
        assert_eq!(Tally::of(&[pass, dev, fail]).exit_code(), 1);
    }

    #[test]
    fn json_lines_shape() {
        let r = IdentityReport::new("g", 1.0, Complex64::new(1.0, 0.5), 0.5, 1.0)
            .indices(2, 1)
            .beta(0.5)
            .expect_deviation("n");
        let mut buf = Vec::new();
        write_json_lines(&[r], &mut buf).unwrap();
        let line = String::from_utf8(buf).unwrap();
        let v: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
        assert_eq!(v["status"], "pass");
        assert_eq!(v["parameters"]["m"], 2);
        assert_eq!(v["rhs"]["im"], 0.5);
    }

    #[test]
    fn rescaled_tolerance() {
        let r = IdentityReport::new("x", 1.0, 1.0, 1e-9, 1e-10);
        assert_eq!(r.clone().rescale_tolerance(100.0).status, Status::Pass);
        let d = r.expect_deviation("known");
        assert_eq!(d.clone().rescale_tolerance(0.5).status, Status::BoundaryDeviation);
        assert_eq!(d.rescale_tolerance(100.0).status, Status::Pass);
        let exact = IdentityReport::new("y", 0.0, 0.0, 1e-30, 0.0);
        assert_eq!(exact.rescale_tolerance(1e9).status, Status::Fail);
    }
}
