//! Two-variable polynomials built from a one-variable orthogonal family,
//! and the Laguerre instance `Z_{m,n}^{(β)}`.
//!
//! For `m >= n`, `f_{m,n}(w, w̄) = w^{m-n} φ_n(w w̄; m - n + β)`; the `m < n`
//! case is the conjugate (exponent swap) of `f_{n,m}`.

use std::collections::HashMap;
use std::io::Write;
use std::sync::{OnceLock, RwLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::bipoly::{BiPoly, Scalar};
use crate::error::{Error, Result};
use crate::hypergeom::{gamma, hyp1f1_terminating, hyp2f0_terminating, laguerre_by_recurrence, pochhammer};
use crate::report::IdentityReport;

/// A one-variable orthogonal family `φ_n(x; α) = Σ_j C_j(n, α) x^{n-j}`.
pub trait Family1D<C: Scalar> {
    /// `C_j(n, α)`, the coefficient of `x^{n-j}`.
    fn coeff(&self, n: usize, alpha: &C, j: usize) -> C;
    /// Squared norm `ζ_n(α)` of `φ_n` under the family's weight.
    fn norm(&self, n: usize, alpha: f64) -> f64;
}

/// Generalized Laguerre polynomials, weight `x^α e^{-x}` on `[0, ∞)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct LaguerreFamily;

impl<C: Scalar> Family1D<C> for LaguerreFamily {
    fn coeff(&self, n: usize, alpha: &C, j: usize) -> C {
        // (-1)^{n-j} (α+n-j+1)_j / (j! (n-j)!)
        let mut c = C::one();
        for i in 0..j {
            c = c * (alpha.clone() + C::from_usize(n - j + 1 + i));
        }
        let mut den = C::one();
        for i in 1..=j {
            den = den * C::from_usize(i);
        }
        for i in 1..=(n - j) {
            den = den * C::from_usize(i);
        }
        let c = c / den;
        if (n - j) % 2 == 1 {
            -c
        } else {
            c
        }
    }

    fn norm(&self, n: usize, alpha: f64) -> f64 {
        (ln_gamma(n as f64 + alpha + 1.0) - ln_gamma(n as f64 + 1.0)).exp()
    }
}

pub fn build_f<C: Scalar, F: Family1D<C>>(fam: &F, m: usize, n: usize, beta: &C) -> BiPoly<C> {
    if m < n {
        return build_f(fam, n, m, beta).conjugate();
    }
    let alpha = beta.clone() + C::from_usize(m - n);
    let mut p = BiPoly::zero();
    for j in 0..=n {
        p.add_term((m - j) as i32, (n - j) as i32, fam.coeff(n, &alpha, j));
    }
    p
}

/// Index triple `(m, n, β)` of `Z_{m,n}^{(β)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZIndex {
    pub m: usize,
    pub n: usize,
    pub beta: f64,
}

impl ZIndex {
    pub fn new(m: usize, n: usize, beta: f64) -> Result<Self> {
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "beta must be finite and >= 0, got {beta}"
            )));
        }
        Ok(Self { m, n, beta })
    }

    pub fn swapped(self) -> Self {
        Self {
            m: self.n,
            n: self.m,
            beta: self.beta,
        }
    }

    pub fn lo(self) -> usize {
        self.m.min(self.n)
    }

    pub fn hi(self) -> usize {
        self.m.max(self.n)
    }

    /// Angular frequency `m - n`.
    pub fn frequency(self) -> i64 {
        self.m as i64 - self.n as i64
    }

    /// Squared norm `Γ(β + max + 1) / min!` under the Gaussian-Laguerre weight.
    pub fn norm(self) -> f64 {
        squared_norm(self.m, self.n, self.beta)
    }
}

pub fn squared_norm(m: usize, n: usize, beta: f64) -> f64 {
    let (lo, hi) = (m.min(n) as f64, m.max(n) as f64);
    let top = beta + hi + 1.0;
    if top <= 170.0 {
        gamma(top) / gamma(lo + 1.0)
    } else {
        (ln_gamma(top) - ln_gamma(lo + 1.0)).exp()
    }
}

/// Coefficients of `Z_{m,n}^{(β)}` in any scalar field.
pub fn z_poly_in<C: Scalar>(m: usize, n: usize, beta: &C) -> BiPoly<C> {
    build_f(&LaguerreFamily, m, n, beta)
}

type CacheKey = (usize, usize, u64);

fn cache() -> &'static RwLock<HashMap<CacheKey, BiPoly<f64>>> {
    static CACHE: OnceLock<RwLock<HashMap<CacheKey, BiPoly<f64>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Memoized floating-point `Z_{m,n}^{(β)}`.
pub fn z_poly(idx: ZIndex) -> BiPoly<f64> {
    let key = (idx.m, idx.n, idx.beta.to_bits());
    if let Some(p) = cache().read().ok().and_then(|c| c.get(&key).cloned()) {
        return p;
    }
    let p = z_poly_in(idx.m, idx.n, &idx.beta);
    if let Ok(mut c) = cache().write() {
        c.entry(key).or_insert_with(|| p.clone());
    }
    p
}

fn sign(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn factorial(k: usize) -> f64 {
    pochhammer(1.0, k)
}

fn zpow(z: Complex64, k: usize) -> Complex64 {
    z.powi(k as i32)
}

/// `((-1)^n / n!) z^{m-n} (-β-m)_n 1F1(-n; β+m-n+1; |z|²)` for `m >= n`,
/// conjugate symmetry otherwise.
pub fn z_eval_1f1(idx: ZIndex, z: Complex64) -> Complex64 {
    if idx.m < idx.n {
        return z_eval_1f1(idx.swapped(), z).conj();
    }
    let (m, n, beta) = (idx.m, idx.n, idx.beta);
    let f = hyp1f1_terminating(n, beta + (m - n) as f64 + 1.0, z.norm_sqr()).expect("lower parameter is at least 1");
    zpow(z, m - n) * (sign(n) / factorial(n) * pochhammer(-beta - m as f64, n) * f)
}

/// `((-1)^n / n!) z^m z̄^n 2F0(-n, -β-m; ; -1/|z|²)`; undefined at the origin.
pub fn z_eval_2f0(idx: ZIndex, z: Complex64) -> Result<Complex64> {
    if idx.m < idx.n {
        return z_eval_2f0(idx.swapped(), z).map(|v| v.conj());
    }
    let x = z.norm_sqr();
    if x == 0.0 {
        return Err(Error::PoleAtZero);
    }
    let (m, n, beta) = (idx.m, idx.n, idx.beta);
    let f = hyp2f0_terminating(n, -beta - m as f64, -1.0 / x);
    Ok(zpow(z, m) * zpow(z.conj(), n) * (sign(n) / factorial(n) * f))
}

/// Single expression for both orders, in terms of `min(m, n)` and `|m - n|`.
pub fn z_eval_combined(idx: ZIndex, z: Complex64) -> Complex64 {
    let (lo, hi) = (idx.lo(), idx.hi());
    let d = hi - lo;
    let f = hyp1f1_terminating(lo, idx.beta + d as f64 + 1.0, z.norm_sqr()).expect("lower parameter is at least 1");
    let pre = sign(lo) / factorial(lo) * pochhammer(-idx.beta - hi as f64, lo) * f;
    zpow(z, idx.m - lo) * zpow(z.conj(), idx.n - lo) * pre
}

/// `z^{m-n} L_n^{(β+m-n)}(|z|²)` with the Laguerre factor from its
/// three-term recurrence; used at large `|z|` by the quadrature routines.
pub fn z_eval_radial(idx: ZIndex, z: Complex64) -> Complex64 {
    let (lo, hi) = (idx.lo(), idx.hi());
    let l = laguerre_by_recurrence(lo, idx.beta + (hi - lo) as f64, z.norm_sqr());
    let phase = if idx.m >= idx.n {
        zpow(z, hi - lo)
    } else {
        zpow(z.conj(), hi - lo)
    };
    phase * l
}

/// Default pointwise evaluator.
pub fn z_eval(idx: ZIndex, z: Complex64) -> Complex64 {
    z_eval_1f1(idx, z)
}

/// The four index recurrences at `(m, n)`, each reported only when every
/// participating index pair stays in the `m >= n` regime:
///
/// - `Z_{m+1,n}^{(β)} = w Z_{m,n}^{(β+1)}`
/// - `Z_{m,n} = Z_{m-1,n-1} + w Z_{m-1,n}`
/// - `(β+m) Z_{m-1,n} = (n+1) Z_{m,n+1} + w̄ Z_{m,n}`
/// - `(β+m) w Z_{m-1,n} = (β+m-n) Z_{m,n} - w̄ Z_{m,n-1}`
pub fn z_recurrences_check<C: Scalar>(m: usize, n: usize, beta: &C) -> Vec<IdentityReport> {
    let z = |a: usize, b: usize| z_poly_in(a, b, beta);
    let w = BiPoly::<C>::w();
    let wb = BiPoly::<C>::wbar();
    let bm = beta.clone() + C::from_usize(m);
    let tag = |r: IdentityReport| r.indices(m, n).beta(beta.to_f64());
    let mut out = Vec::new();

    if m >= n {
        let shifted = z_poly_in(m, n, &(beta.clone() + C::one()));
        out.push(tag(IdentityReport::poly(
            "raise-m-shift-beta",
            &z(m + 1, n),
            &(&w * &shifted),
        )));
    }
    if n >= 1 && m > n {
        let rhs = &z(m - 1, n - 1) + &(&w * &z(m - 1, n));
        out.push(tag(IdentityReport::poly("diagonal-step", &z(m, n), &rhs)));
    }
    if m > n {
        let lhs = z(m - 1, n).scale(&bm);
        let rhs = &z(m, n + 1).scale(&C::from_usize(n + 1)) + &(&wb * &z(m, n));
        out.push(tag(IdentityReport::poly("lower-m-raise-n", &lhs, &rhs)));
    }
    if n >= 1 && m > n {
        let lhs = (&w * &z(m - 1, n)).scale(&bm);
        let rhs = &z(m, n).scale(&(bm.clone() - C::from_usize(n))) - &(&wb * &z(m, n - 1));
        out.push(tag(IdentityReport::poly("mixed-lowering", &lhs, &rhs)));
    }
    out
}

/// All applicable index recurrences with `m <= mmax`.
pub fn check_recurrences<C: Scalar>(mmax: usize, beta: &C) -> Vec<IdentityReport> {
    let mut out = Vec::new();
    for m in 0..=mmax {
        for n in 0..=m {
            out.extend(z_recurrences_check(m, n, beta));
        }
    }
    out
}

/// CSV rows `m,n,beta,a,b,coeff` for each index, terms in exponent order.
pub fn write_coeff_table<W: Write>(indices: &[ZIndex], out: W) -> std::result::Result<(), csv::Error> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["m", "n", "beta", "a", "b", "coeff"])?;
    for idx in indices {
        for ((a, b), c) in z_poly(*idx).terms() {
            wtr.write_record([
                idx.m.to_string(),
                idx.n.to_string(),
                idx.beta.to_string(),
                a.to_string(),
                b.to_string(),
                c.to_string(),
            ])?;
        }
    }
    wtr.flush()?;
    Ok(())
}
