//! Scalar special-function kernel.
//!
//! Everything here works on real parameters and real arguments: every
//! hypergeometric argument that shows up for the 2D Laguerre family enters
//! through `z * conj(z) = r^2`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Truncation policy for non-terminating series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    pub max_terms: usize,
    pub rel_tol: f64,
}

impl SeriesControl {
    pub fn new(max_terms: usize, rel_tol: f64) -> Result<Self> {
        if max_terms == 0 {
            return Err(Error::InvalidArgument("max_terms must be at least 1".into()));
        }
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "rel_tol must lie in (0, 1), got {rel_tol}"
            )));
        }
        Ok(Self { max_terms, rel_tol })
    }
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            max_terms: 10_000,
            rel_tol: 1e-14,
        }
    }
}

/// Value of a truncated series together with the number of terms summed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub terms: usize,
}

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Rising factorial `a (a+1) ... (a+k-1)`, always by direct product.
///
/// Overflow shows up as a non-finite result; use [`pochhammer_checked`] when
/// that has to be an error.
pub fn pochhammer(a: f64, k: usize) -> f64 {
    let mut p = 1.0;
    for i in 0..k {
        p *= a + i as f64;
        if p == 0.0 {
            return 0.0;
        }
    }
    p
}

/// `Γ(x)`. Positive integers and half-integers are built as products from
/// `Γ(1) = 1` and `Γ(1/2) = √π`, which keeps factorial-type values within a few
/// ulps; other arguments go to `statrs`.
pub fn gamma(x: f64) -> f64 {
    let twice = 2.0 * x;
    if x > 0.0 && x <= 171.0 && twice == twice.round() {
        let (start, base) = if x == x.round() {
            (1.0, 1.0)
        } else {
            (0.5, std::f64::consts::PI.sqrt())
        };
        return base * pochhammer(start, (x - start) as usize);
    }
    statrs::function::gamma::gamma(x)
}

pub fn pochhammer_checked(a: f64, k: usize) -> Result<f64> {
    let p = pochhammer(a, k);
    if p.is_finite() {
        Ok(p)
    } else {
        Err(Error::Overflow { a, k })
    }
}

fn check_denominator(c: f64, upto: usize) -> Result<()> {
    // (c)_k for k <= upto vanishes iff c + i == 0 for some i < upto
    for i in 0..upto {
        if c + i as f64 == 0.0 {
            return Err(Error::PoleInDenominator { param: c, index: upto });
        }
    }
    Ok(())
}

fn exact(v: f64) -> Result<BigRational> {
    BigRational::from_float(v).ok_or_else(|| Error::InvalidArgument(format!("series argument must be finite, got {v}")))
}

fn nearest(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn int(k: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(k))
}

/// `sum_k prod_{i<k} ratio(i)` for `k = 0..=n`, accumulated exactly.
fn exact_terminating_sum(n: usize, ratio: impl Fn(usize) -> BigRational) -> BigRational {
    let mut term = BigRational::one();
    let mut acc = BigRational::one();
    for k in 0..n {
        term *= ratio(k);
        if term.is_zero() {
            break;
        }
        acc += &term;
    }
    acc
}

/// `1F1(-n; c; x)`, a polynomial of degree `n` in `x`.
///
/// The terms alternate and cancel heavily once `x` is comparable to `n`, so
/// the sum is formed exactly over the rationals (every finite double is one)
/// and rounded once.
pub fn hyp1f1_terminating(n: usize, c: f64, x: f64) -> Result<f64> {
    check_denominator(c, n)?;
    let (cq, xq, nq) = (exact(c)?, exact(x)?, int(n));
    let sum = exact_terminating_sum(n, |k| {
        let kq = int(k);
        (&kq - &nq) * &xq / ((&cq + &kq) * (kq + BigRational::one()))
    });
    Ok(nearest(&sum))
}

/// `2F0(-n, b; -; x)`, a polynomial of degree `n` in `x`. Non-finite input
/// gives NaN.
pub fn hyp2f0_terminating(n: usize, b: f64, x: f64) -> f64 {
    let (Ok(bq), Ok(xq)) = (exact(b), exact(x)) else {
        return f64::NAN;
    };
    let nq = int(n);
    let sum = exact_terminating_sum(n, |k| {
        let kq = int(k);
        (&kq - &nq) * (&bq + &kq) * &xq / (kq + BigRational::one())
    });
    nearest(&sum)
}

fn is_nonpositive_integer(c: f64) -> bool {
    c <= 0.0 && c.fract() == 0.0
}

/// `2F2(a1, a2; c1, c2; x)` summed until the next term drops below
/// `rel_tol` times the partial sum (while the terms are decreasing).
pub fn hyp2f2(a1: f64, a2: f64, c1: f64, c2: f64, x: f64, ctl: SeriesControl) -> Result<SeriesValue> {
    if is_nonpositive_integer(c1) {
        return Err(Error::PoleInDenominator { param: c1, index: 0 });
    }
    if is_nonpositive_integer(c2) {
        return Err(Error::PoleInDenominator { param: c2, index: 0 });
    }
    if !x.is_finite() {
        return Err(Error::InvalidArgument(format!("2F2 argument must be finite, got {x}")));
    }
    let mut term = 1.0;
    let mut acc = CompensatedSum::new();
    acc.add(term);
    let mut last_ratio = f64::INFINITY;
    for j in 0..ctl.max_terms {
        let jf = j as f64;
        let ratio = (a1 + jf) * (a2 + jf) * x / ((c1 + jf) * (c2 + jf) * (jf + 1.0));
        term *= ratio;
        if term == 0.0 {
            return Ok(SeriesValue {
                value: acc.value(),
                terms: j + 1,
            });
        }
        acc.add(term);
        let partial = acc.value();
        last_ratio = (term / partial).abs();
        if ratio.abs() < 1.0 && last_ratio < ctl.rel_tol {
            return Ok(SeriesValue {
                value: partial,
                terms: j + 2,
            });
        }
    }
    Err(Error::NoConvergence {
        terms: ctl.max_terms,
        last_ratio,
    })
}

/// Terminating Appell `F2(a; -n, -s; c1, c2; 1, 1)`.
pub fn appell_f2_terminating(a: f64, n: usize, s: usize, c1: f64, c2: f64) -> Result<f64> {
    check_denominator(c1, n)?;
    check_denominator(c2, s)?;
    let (aq, c1q, c2q) = (exact(a)?, exact(c1)?, exact(c2)?);
    let one = BigRational::one();
    // (a)_{j+k} (-n)_j (-s)_k / ((c1)_j (c2)_k j! k!)
    let mut acc = BigRational::zero();
    let mut row = one.clone();
    let mut poch_row = one.clone();
    for j in 0..=n {
        let mut col = one.clone();
        let mut poch = poch_row.clone();
        for k in 0..=s {
            acc += &poch * &row * &col;
            let kq = int(k);
            col *= (&kq - int(s)) / ((&c2q + &kq) * (&kq + &one));
            poch *= &aq + int(j + k);
        }
        let jq = int(j);
        row *= (&jq - int(n)) / ((&c1q + &jq) * (&jq + &one));
        poch_row *= &aq + &jq;
    }
    Ok(nearest(&acc))
}

/// Generalized Laguerre polynomial `L_n^{(a)}(x)` from its explicit
/// finite series `sum_k (-1)^k (a+k+1)_{n-k} x^k / ((n-k)! k!)`, summed exactly.
pub fn laguerre(n: usize, a: f64, x: f64) -> Result<f64> {
    let (aq, xq) = (exact(a)?, exact(x)?);
    let one = BigRational::one();
    // k = 0 term: (a+1)_n / n!
    let mut term = one.clone();
    for i in 1..=n {
        term *= (&aq + int(i)) / int(i);
    }
    let mut acc = term.clone();
    for k in 0..n {
        let denom = &aq + int(k + 1);
        if denom.is_zero() {
            return Err(Error::PoleInDenominator {
                param: a + 1.0,
                index: n - k,
            });
        }
        // ratio t_{k+1}/t_k = -(n-k) x / ((k+1)(a+k+1))
        term *= -(int(n - k) * &xq) / (int(k + 1) * denom);
        acc += &term;
    }
    Ok(nearest(&acc))
}

/// `L_n^{(a)}(x)` by the forward three-term recurrence, which stays accurate
/// in the oscillatory region where the explicit series cancels badly.
pub fn laguerre_by_recurrence(n: usize, a: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + a + 1.0 - x) * cur - (kf + a) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}
