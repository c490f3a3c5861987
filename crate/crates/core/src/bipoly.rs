//! Sparse Laurent polynomials in a commuting conjugate pair `(w, w̄)`.
//!
//! A [`BiPoly`] stores `sum c_{ab} w^a w̄^b` with integer (possibly negative)
//! exponents. Because every monomial lives in the commutative algebra
//! generated by `q` and `q̄`, the same object evaluates unambiguously at
//! complex numbers and at quaternions.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::quaternion::Quaternion;

/// Coefficient field for [`BiPoly`].
///
/// `f64` is the working mode; `BigRational` is the exact shadow mode used to
/// make identity checks bit-exact when `β` is rational.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_i64(v: i64) -> Self;
    fn to_f64(&self) -> f64;
    /// Whether arithmetic in this field is exact.
    fn is_exact() -> bool;

    fn from_usize(v: usize) -> Self {
        Self::from_i64(v as i64)
    }
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_exact() -> bool {
        false
    }
}

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_exact() -> bool {
        true
    }
}

/// Exact rational from a decimal-free `num/den` pair.
pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Convert a float with a short binary expansion (such as 0.5 or 2.5) to an
/// exact rational. Returns `None` for non-finite input.
pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

pub type Exponent = (i32, i32);

#[derive(Clone, PartialEq, Default)]
pub struct BiPoly<C = f64> {
    terms: BTreeMap<Exponent, C>,
}

impl<C: Scalar> BiPoly<C> {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn monomial(a: i32, b: i32, c: C) -> Self {
        let mut p = Self::zero();
        p.add_term(a, b, c);
        p
    }

    /// The generator `w`.
    pub fn w() -> Self {
        Self::monomial(1, 0, C::one())
    }

    /// The conjugate generator `w̄`.
    pub fn wbar() -> Self {
        Self::monomial(0, 1, C::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (i32, i32, C)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (a, b, c) in terms {
            p.add_term(a, b, c);
        }
        p
    }

    /// Accumulate `c w^a w̄^b`, pruning an exact zero.
    pub fn add_term(&mut self, a: i32, b: i32, c: C) {
        if c.is_zero() {
            return;
        }
        let key = (a, b);
        let merged = match self.terms.remove(&key) {
            Some(old) => old + c,
            None => c,
        };
        if !merged.is_zero() {
            self.terms.insert(key, merged);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, a: i32, b: i32) -> C {
        self.terms.get(&(a, b)).cloned().unwrap_or_else(C::zero)
    }

    /// Terms in lexicographic `(a, b)` order.
    pub fn terms(&self) -> impl Iterator<Item = (Exponent, &C)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    /// Largest `a + b` over the support; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<i32> {
        self.terms.keys().map(|(a, b)| a + b).max()
    }

    pub fn has_negative_exponents(&self) -> bool {
        self.terms.keys().any(|&(a, b)| a < 0 || b < 0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: &C) -> Self {
        Self::from_terms(self.terms.iter().map(|(&(a, b), c)| (a, b, c.clone() * s.clone())))
    }

    /// Multiply by `w^da w̄^db`.
    pub fn shift(&self, da: i32, db: i32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(&(a, b), c)| ((a + da, b + db), c.clone()))
                .collect(),
        }
    }

    /// Swap `w` and `w̄`. Coefficients are real, so this is complex conjugation.
    pub fn conjugate(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(&(a, b), c)| ((b, a), c.clone())).collect(),
        }
    }

    /// Formal `∂/∂w` with `w̄` held fixed.
    pub fn d_dw(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|(&(a, b), c)| (a - 1, b, c.clone() * C::from_i64(a as i64))),
        )
    }

    /// Formal `∂/∂w̄` with `w` held fixed.
    pub fn d_dwbar(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|(&(a, b), c)| (a, b - 1, c.clone() * C::from_i64(b as i64))),
        )
    }

    pub fn map_coeffs<D: Scalar>(&self, f: impl Fn(&C) -> D) -> BiPoly<D> {
        BiPoly::from_terms(self.terms.iter().map(|(&(a, b), c)| (a, b, f(c))))
    }

    pub fn to_f64(&self) -> BiPoly<f64> {
        self.map_coeffs(|c| c.to_f64())
    }

    pub fn eval_complex(&self, z: Complex64) -> Result<Complex64> {
        let zero = z == Complex64::new(0.0, 0.0);
        if zero && self.has_negative_exponents() {
            return Err(Error::PoleAtZero);
        }
        let zb = z.conj();
        let mut acc = Complex64::new(0.0, 0.0);
        for (&(a, b), c) in &self.terms {
            acc += z.powi(a) * zb.powi(b) * c.to_f64();
        }
        Ok(acc)
    }

    /// Evaluate with `w ↦ q`, `w̄ ↦ q̄` in quaternion arithmetic.
    pub fn eval_quaternion(&self, q: Quaternion) -> Result<Quaternion> {
        if self.is_zero() {
            return Ok(Quaternion::ZERO);
        }
        let (amin, amax, bmin, bmax) = self.exponent_bounds();
        if (amin < 0 || bmin < 0) && q.norm_sqr() == 0.0 {
            return Err(Error::PoleAtZero);
        }
        let qp = PowerTable::new(q, amin.min(0), amax.max(0));
        let qbp = PowerTable::new(q.conj(), bmin.min(0), bmax.max(0));
        Ok(self.eval_with_tables(&qp, &qbp))
    }

    pub(crate) fn exponent_bounds(&self) -> (i32, i32, i32, i32) {
        let mut bounds = (i32::MAX, i32::MIN, i32::MAX, i32::MIN);
        for &(a, b) in self.terms.keys() {
            bounds.0 = bounds.0.min(a);
            bounds.1 = bounds.1.max(a);
            bounds.2 = bounds.2.min(b);
            bounds.3 = bounds.3.max(b);
        }
        bounds
    }

    pub(crate) fn eval_with_tables(&self, qp: &PowerTable, qbp: &PowerTable) -> Quaternion {
        let mut acc = Quaternion::ZERO;
        for (&(a, b), c) in &self.terms {
            acc = acc + (qp.get(a) * qbp.get(b)).scale(c.to_f64());
        }
        acc
    }
}

/// Integer powers `q^lo ..= q^hi` of a fixed quaternion.
#[derive(Debug, Clone)]
pub(crate) struct PowerTable {
    lo: i32,
    powers: Vec<Quaternion>,
}

impl PowerTable {
    pub(crate) fn new(q: Quaternion, lo: i32, hi: i32) -> Self {
        debug_assert!(lo <= 0 && hi >= 0);
        let mut powers = vec![Quaternion::ONE; (hi - lo + 1) as usize];
        let zero_idx = (-lo) as usize;
        for k in 1..=hi as usize {
            powers[zero_idx + k] = powers[zero_idx + k - 1] * q;
        }
        if lo < 0 {
            let inv = q.inverse();
            for k in 1..=(-lo) as usize {
                powers[zero_idx - k] = powers[zero_idx - k + 1] * inv;
            }
        }
        Self { lo, powers }
    }

    pub(crate) fn get(&self, k: i32) -> Quaternion {
        self.powers[(k - self.lo) as usize]
    }
}

impl<C: Scalar> Debug for BiPoly<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&(a, b), c)| format!("{c:?}·w^{a}·w̄^{b}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<'a, C: Scalar> Add<&'a BiPoly<C>> for &'a BiPoly<C> {
    type Output = BiPoly<C>;
    fn add(self, rhs: &'a BiPoly<C>) -> BiPoly<C> {
        let mut out = self.clone();
        for (&(a, b), c) in &rhs.terms {
            out.add_term(a, b, c.clone());
        }
        out
    }
}

impl<'a, C: Scalar> Sub<&'a BiPoly<C>> for &'a BiPoly<C> {
    type Output = BiPoly<C>;
    fn sub(self, rhs: &'a BiPoly<C>) -> BiPoly<C> {
        let mut out = self.clone();
        for (&(a, b), c) in &rhs.terms {
            out.add_term(a, b, -c.clone());
        }
        out
    }
}

impl<'a, C: Scalar> Mul<&'a BiPoly<C>> for &'a BiPoly<C> {
    type Output = BiPoly<C>;
    fn mul(self, rhs: &'a BiPoly<C>) -> BiPoly<C> {
        let mut out = BiPoly::zero();
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &rhs.terms {
                out.add_term(a1 + a2, b1 + b2, c1.clone() * c2.clone());
            }
        }
        out
    }
}

impl<C: Scalar> Neg for &BiPoly<C> {
    type Output = BiPoly<C>;
    fn neg(self) -> BiPoly<C> {
        self.map_coeffs(|c| -c.clone())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<C: Scalar> $tr<BiPoly<C>> for BiPoly<C> {
            type Output = BiPoly<C>;
            fn $m(self, rhs: BiPoly<C>) -> BiPoly<C> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[derive(Serialize, Deserialize)]
struct TermRecord {
    a: i32,
    b: i32,
    c: f64,
}

#[derive(Serialize, Deserialize)]
struct PolyRecord {
    terms: Vec<TermRecord>,
}

impl<C: Scalar> Serialize for BiPoly<C> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRecord {
            terms: self
                .terms
                .iter()
                .map(|(&(a, b), c)| TermRecord { a, b, c: c.to_f64() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BiPoly<f64> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rec = PolyRecord::deserialize(d)?;
        Ok(BiPoly::from_terms(rec.terms.into_iter().map(|t| (t.a, t.b, t.c))))
    }
}

/// Maximum coefficient magnitude of `p - q`, with `0.0` meaning identical.
pub fn residual<C: Scalar>(p: &BiPoly<C>, q: &BiPoly<C>) -> f64 {
    (p - q).max_abs_coeff()
}

/// Max-coefficient scale used to turn absolute residuals into relative ones.
pub fn scale_of<C: Scalar>(polys: &[&BiPoly<C>]) -> f64 {
    polys.iter().map(|p| p.max_abs_coeff()).fold(1.0, f64::max)
}
