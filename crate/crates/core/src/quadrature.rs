//! Gaussian rules and inner products for the measure
//! `dν = r^{2β+1} e^{-r²} dr dθ / π` on ℂ and its quaternionic lift.
//!
//! With `t = r²` the radial part becomes `½ t^β e^{-t} dt`, so a generalized
//! Gauss–Laguerre rule in `t` times a uniform rule in `θ` is exact for
//! polynomial integrands up to its degree.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::Write;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bipoly::BiPoly;
use crate::construct2d::{z_eval_radial, z_poly, ZIndex};
use crate::error::{Error, Result};
use crate::hypergeom::{gamma, hyp1f1_terminating, CompensatedSum};
use crate::quaternion::{sandwich, su2_element, su2_quadrature, MatrixRep, Quaternion};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum QuadratureKind {
    GaussLaguerre { alpha: f64 },
    GaussLegendre,
    Circle,
    ComplexProduct { beta: f64 },
    Su2Product,
    QuaternionProduct { beta: f64 },
}

/// Nodes are stored flat, `dim` coordinates per node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureRule {
    pub kind: QuadratureKind,
    pub dim: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub exactness_degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], &f64)> {
        self.nodes.chunks(self.dim).zip(self.weights.iter())
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().copied().collect::<CompensatedSum>().value()
    }

    /// CSV with one column per coordinate followed by the weight.
    pub fn write_csv<W: Write>(&self, out: W) -> std::result::Result<(), csv::Error> {
        let mut wtr = csv::Writer::from_writer(out);
        let mut header: Vec<String> = if self.dim == 1 {
            vec!["node".into()]
        } else {
            (0..self.dim).map(|d| format!("node{d}")).collect()
        };
        header.push("weight".into());
        wtr.write_record(&header)?;
        for (node, w) in self.iter() {
            let mut row: Vec<String> = node.iter().map(|x| format!("{x:e}")).collect();
            row.push(format!("{w:e}"));
            wtr.write_record(&row)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Node counts for the radial, circle and SU(2) factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub nr: usize,
    pub ntheta: usize,
    pub nphi: usize,
    pub npsi: usize,
}

impl Default for Resolution {
    fn default() -> Self {
        Self {
            nr: 32,
            ntheta: 64,
            nphi: 16,
            npsi: 16,
        }
    }
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit-shift QL.
/// `e[i]` couples rows `i` and `i+1`; both slices are overwritten.
fn tridiagonal_eigenvalues(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::EigenFailure(l));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

struct OrthoEval {
    /// `b_n p_n(x)` up to a positive scale factor.
    value: f64,
    deriv: f64,
    /// `ln Σ_{k<n} p_k(x)²`
    ln_sum_sq: f64,
}

/// Orthonormal recurrence `b_{k+1} p_{k+1} = (x - a_k) p_k - b_k p_{k-1}`,
/// rescaled on the fly so large nodes do not overflow.
fn eval_orthonormal(x: f64, a: &[f64], b: &[f64], mu0: f64) -> OrthoEval {
    const BIG: f64 = 1e150;
    let n = a.len();
    let (mut p_prev, mut dp_prev) = (0.0, 0.0);
    let (mut p, mut dp) = (1.0 / mu0.sqrt(), 0.0);
    let mut sum = 0.0;
    let mut ln_scale = 0.0;
    for k in 0..n {
        sum += p * p;
        let bk = if k == 0 { 0.0 } else { b[k - 1] };
        let bnext = if k + 1 < n { b[k] } else { 1.0 };
        let pn = ((x - a[k]) * p - bk * p_prev) / bnext;
        let dpn = ((x - a[k]) * dp + p - bk * dp_prev) / bnext;
        p_prev = p;
        dp_prev = dp;
        p = pn;
        dp = dpn;
        if p.abs().max(dp.abs()) > BIG {
            let s = 1.0 / BIG;
            p *= s;
            dp *= s;
            p_prev *= s;
            dp_prev *= s;
            sum *= s * s;
            ln_scale += BIG.ln();
        }
    }
    OrthoEval {
        value: p,
        deriv: dp,
        ln_sum_sq: sum.ln() + 2.0 * ln_scale,
    }
}

/// Gauss rule from a Jacobi matrix: QL eigenvalues, one Newton polish on the
/// recurrence, and Christoffel weights `1 / Σ p_k(x)²`.
fn gauss_from_jacobi(a: &[f64], b: &[f64], mu0: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = a.len();
    let mut d = a.to_vec();
    let mut e = b.to_vec();
    e.push(0.0);
    tridiagonal_eigenvalues(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for &x0 in &d {
        let mut x = x0;
        for _ in 0..8 {
            let ev = eval_orthonormal(x, a, b, mu0);
            if ev.deriv == 0.0 || !ev.deriv.is_finite() {
                break;
            }
            let dx = ev.value / ev.deriv;
            x -= dx;
            if dx.abs() <= 2.0 * f64::EPSILON * x.abs() {
                break;
            }
        }
        if !x.is_finite() || (x - x0).abs() > 1e-6 * (1.0 + x0.abs()) {
            x = x0;
        }
        nodes.push(x);
        weights.push((-eval_orthonormal(x, a, b, mu0).ln_sum_sq).exp());
    }
    Ok((nodes, weights))
}

/// Generalized Gauss–Laguerre rule for `∫₀^∞ g(t) t^α e^{-t} dt`.
pub fn gauss_laguerre(alpha: f64, npts: usize) -> Result<QuadratureRule> {
    if npts == 0 {
        return Err(Error::InvalidArgument(
            "Gauss–Laguerre rule needs at least one node".into(),
        ));
    }
    if !alpha.is_finite() || alpha <= -1.0 {
        return Err(Error::InvalidArgument(format!(
            "Gauss–Laguerre needs alpha > -1, got {alpha}"
        )));
    }
    let a: Vec<f64> = (0..npts).map(|k| 2.0 * k as f64 + alpha + 1.0).collect();
    let b: Vec<f64> = (1..npts).map(|k| (k as f64 * (k as f64 + alpha)).sqrt()).collect();
    let (nodes, weights) = gauss_from_jacobi(&a, &b, gamma(alpha + 1.0))?;
    Ok(QuadratureRule {
        kind: QuadratureKind::GaussLaguerre { alpha },
        dim: 1,
        nodes,
        weights,
        exactness_degree: 2 * npts - 1,
    })
}

/// Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(npts: usize) -> Result<QuadratureRule> {
    if npts == 0 {
        return Err(Error::InvalidArgument(
            "Gauss–Legendre rule needs at least one node".into(),
        ));
    }
    let a = vec![0.0; npts];
    let b: Vec<f64> = (1..npts)
        .map(|k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    let (nodes, weights) = gauss_from_jacobi(&a, &b, 2.0)?;
    Ok(QuadratureRule {
        kind: QuadratureKind::GaussLegendre,
        dim: 1,
        nodes,
        weights,
        exactness_degree: 2 * npts - 1,
    })
}

fn cached_laguerre(alpha: f64, npts: usize) -> Result<Arc<QuadratureRule>> {
    type Cache = RwLock<HashMap<(u64, usize), Arc<QuadratureRule>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    let key = (alpha.to_bits(), npts);
    if let Some(r) = cache.read().ok().and_then(|c| c.get(&key).cloned()) {
        return Ok(r);
    }
    let rule = Arc::new(gauss_laguerre(alpha, npts)?);
    if let Ok(mut c) = cache.write() {
        c.entry(key).or_insert_with(|| rule.clone());
    }
    Ok(rule)
}

/// Uniform rule for `dθ / 2π`; exact for `e^{ikθ}` with `|k| < n`.
pub fn circle_rule(n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::InvalidArgument("circle rule needs at least one node".into()));
    }
    Ok(QuadratureRule {
        kind: QuadratureKind::Circle,
        dim: 1,
        nodes: (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect(),
        weights: vec![1.0 / n as f64; n],
        exactness_degree: n - 1,
    })
}

/// `(sin, cos)` of `π num / den`, reduced to the first octant so that
/// reflected angles give bitwise reflected values.
fn sin_cos_pi_frac(num: i64, den: i64) -> (f64, f64) {
    let num = num.rem_euclid(2 * den);
    if num > den {
        let (s, c) = sin_cos_pi_frac(2 * den - num, den);
        (-s, c)
    } else if 2 * num > den {
        let (s, c) = sin_cos_pi_frac(den - num, den);
        (s, -c)
    } else if 4 * num > den {
        let (s, c) = sin_cos_pi_frac(den - 2 * num, 2 * den);
        (c, s)
    } else {
        (PI * num as f64 / den as f64).sin_cos()
    }
}

/// `e^{2πij/n}` for `j = 0..n` with the circle's reflection symmetries exact.
fn unit_roots(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|j| {
            let (s, c) = sin_cos_pi_frac(2 * j as i64, n as i64);
            Complex64::new(c, s)
        })
        .collect()
}

/// Product rule for `dν` on ℂ with nodes `(r, θ)`; total mass `Γ(β+1)`.
pub fn complex_product_rule(beta: f64, nr: usize, ntheta: usize) -> Result<QuadratureRule> {
    let radial = cached_laguerre(beta, nr)?;
    let circle = circle_rule(ntheta)?;
    let mut nodes = Vec::with_capacity(2 * nr * ntheta);
    let mut weights = Vec::with_capacity(nr * ntheta);
    for (t, wr) in radial.nodes.iter().zip(&radial.weights) {
        for (theta, wt) in circle.nodes.iter().zip(&circle.weights) {
            nodes.push(t.sqrt());
            nodes.push(*theta);
            weights.push(wr * wt);
        }
    }
    Ok(QuadratureRule {
        kind: QuadratureKind::ComplexProduct { beta },
        dim: 2,
        nodes,
        weights,
        exactness_degree: radial.exactness_degree.min(circle.exactness_degree),
    })
}

/// Product of the complex rule with the SU(2) rule; nodes `(r, θ, φ, ψ)`.
pub fn quaternion_product_rule(beta: f64, res: Resolution) -> Result<QuadratureRule> {
    let c = complex_product_rule(beta, res.nr, res.ntheta)?;
    let s = su2_quadrature(res.nphi, res.npsi)?;
    let mut nodes = Vec::with_capacity(4 * c.len() * s.len());
    let mut weights = Vec::with_capacity(c.len() * s.len());
    for (cn, cw) in c.iter() {
        for (sn, sw) in s.iter() {
            nodes.extend_from_slice(cn);
            nodes.extend_from_slice(sn);
            weights.push(cw * sw);
        }
    }
    Ok(QuadratureRule {
        kind: QuadratureKind::QuaternionProduct { beta },
        dim: 4,
        nodes,
        weights,
        exactness_degree: c.exactness_degree.min(s.exactness_degree),
    })
}

/// Weight functions for moment integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentFn {
    One,
    Z,
    Zbar,
    ZsqAbs,
    /// The polar angle `θ ∈ [0, 2π)`.
    Theta,
}

impl MomentFn {
    pub fn name(self) -> &'static str {
        match self {
            MomentFn::One => "one",
            MomentFn::Z => "z",
            MomentFn::Zbar => "zbar",
            MomentFn::ZsqAbs => "zsq_abs",
            MomentFn::Theta => "theta",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "one" | "1" => Some(MomentFn::One),
            "z" | "q" => Some(MomentFn::Z),
            "zbar" | "qbar" => Some(MomentFn::Zbar),
            "zsq_abs" | "zsq" | "abs2" => Some(MomentFn::ZsqAbs),
            "theta" => Some(MomentFn::Theta),
            _ => None,
        }
    }

    fn spectrum(self) -> Spectrum {
        match self {
            MomentFn::One | MomentFn::Theta => Spectrum { degree: 0, freq: 0 },
            MomentFn::Z | MomentFn::Zbar => Spectrum { degree: 1, freq: 1 },
            MomentFn::ZsqAbs => Spectrum { degree: 2, freq: 0 },
        }
    }

    fn eval(self, z: Complex64) -> Complex64 {
        match self {
            MomentFn::One => Complex64::new(1.0, 0.0),
            MomentFn::Z => z,
            MomentFn::Zbar => z.conj(),
            MomentFn::ZsqAbs => Complex64::new(z.norm_sqr(), 0.0),
            MomentFn::Theta => Complex64::new(z.arg().rem_euclid(2.0 * PI), 0.0),
        }
    }
}

impl std::str::FromStr for MomentFn {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        MomentFn::parse(s).ok_or_else(|| Error::InvalidArgument(format!("unknown moment function '{s}'")))
    }
}

impl std::fmt::Display for MomentFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Largest total degree and largest `|a - b|` of a polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Spectrum {
    degree: i64,
    freq: i64,
}

impl Spectrum {
    fn of_poly(p: &BiPoly<f64>) -> Result<Self> {
        if p.has_negative_exponents() {
            return Err(Error::QuadratureUnderResolved(
                "integrand has Laurent terms and is not integrable at the origin".into(),
            ));
        }
        let mut s = Spectrum { degree: 0, freq: 0 };
        for ((a, b), _) in p.terms() {
            s.degree = s.degree.max((a + b) as i64);
            s.freq = s.freq.max((a - b).abs() as i64);
        }
        Ok(s)
    }

    fn of_index(idx: ZIndex) -> Self {
        Spectrum {
            degree: (idx.m + idx.n) as i64,
            freq: idx.frequency().abs(),
        }
    }
}

fn check_resolution(f: MomentFn, p: Spectrum, q: Spectrum, nr: usize, ntheta: usize) -> Result<()> {
    let fs = f.spectrum();
    let t_degree = ((p.degree + q.degree + fs.degree) / 2) as usize;
    if 2 * nr < t_degree + 1 {
        return Err(Error::QuadratureUnderResolved(format!(
            "{nr} radial nodes integrate t-degree {} but the integrand needs {t_degree}",
            2 * nr - 1
        )));
    }
    let freq = (p.freq + q.freq + fs.freq) as usize;
    let needed = if f == MomentFn::Theta { 2 * freq + 1 } else { freq + 1 };
    if ntheta < needed {
        return Err(Error::QuadratureUnderResolved(format!(
            "{ntheta} angular nodes, integrand needs at least {needed}"
        )));
    }
    Ok(())
}

/// `∫₀^{2π} θ e^{ikθ} dθ / 2π`.
fn theta_weight(k: i64) -> Complex64 {
    if k == 0 {
        Complex64::new(PI, 0.0)
    } else {
        Complex64::new(0.0, -1.0 / k as f64)
    }
}

fn integrate<P, Q>(f: MomentFn, p: P, q: Q, max_freq: usize, beta: f64, nr: usize, ntheta: usize) -> Result<Complex64>
where
    P: Fn(Complex64) -> Complex64,
    Q: Fn(Complex64) -> Complex64,
{
    let thetas = circle_rule(ntheta)?.nodes;
    let roots = unit_roots(ntheta);
    if f != MomentFn::Theta {
        let radial = cached_laguerre(beta, nr)?;
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for (t, w) in radial.nodes.iter().zip(&radial.weights) {
            let r = t.sqrt();
            let mut ring_re = CompensatedSum::new();
            let mut ring_im = CompensatedSum::new();
            for root in &roots {
                let z = root * r;
                let v = f.eval(z) * p(z) * q(z).conj();
                ring_re.add(v.re);
                ring_im.add(v.im);
            }
            let s = w / ntheta as f64;
            re.add(ring_re.value() * s);
            im.add(ring_im.value() * s);
        }
        return Ok(Complex64::new(re.value(), im.value()));
    }
    // θ is not a trigonometric polynomial: take the discrete Fourier
    // coefficients of p·q̄ on each ring and integrate θ e^{ikθ} exactly.
    // Odd frequencies carry an odd power of r, hence the half-shifted rule.
    let k_max = max_freq as i64;
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    for parity in 0..2i64 {
        let radial = cached_laguerre(beta + 0.5 * parity as f64, nr)?;
        for (t, w) in radial.nodes.iter().zip(&radial.weights) {
            let r = t.sqrt();
            let samples: Vec<Complex64> = roots
                .iter()
                .map(|root| {
                    let z = root * r;
                    p(z) * q(z).conj()
                })
                .collect();
            let mut acc = Complex64::new(0.0, 0.0);
            for k in -k_max..=k_max {
                if k.rem_euclid(2) != parity {
                    continue;
                }
                let mut c = Complex64::new(0.0, 0.0);
                for (g, &th) in samples.iter().zip(&thetas) {
                    c += g * Complex64::from_polar(1.0, -(k as f64) * th);
                }
                acc += c / ntheta as f64 * theta_weight(k);
            }
            let v = acc * (w / r.powi(parity as i32));
            re.add(v.re);
            im.add(v.im);
        }
    }
    Ok(Complex64::new(re.value(), im.value()))
}

/// `∫ f · p · conj(q) dν` for polynomials `p`, `q`.
pub fn moment_inner(
    f: MomentFn,
    p: &BiPoly<f64>,
    q: &BiPoly<f64>,
    beta: f64,
    nr: usize,
    ntheta: usize,
) -> Result<Complex64> {
    let (sp, sq) = (Spectrum::of_poly(p)?, Spectrum::of_poly(q)?);
    check_resolution(f, sp, sq, nr, ntheta)?;
    let ev = |poly: &BiPoly<f64>, z: Complex64| poly.eval_complex(z).unwrap_or(Complex64::new(f64::NAN, 0.0));
    integrate(
        f,
        |z| ev(p, z),
        |z| ev(q, z),
        (sp.freq + sq.freq) as usize,
        beta,
        nr,
        ntheta,
    )
}

/// `⟨p | q⟩ = ∫ p · conj(q) dν`.
pub fn complex_inner(p: &BiPoly<f64>, q: &BiPoly<f64>, beta: f64, nr: usize, ntheta: usize) -> Result<Complex64> {
    moment_inner(MomentFn::One, p, q, beta, nr, ntheta)
}

/// `∫ f · Z_a · conj(Z_b) dν` using the radial-recurrence evaluator.
pub fn z_moment(f: MomentFn, a: ZIndex, b: ZIndex, nr: usize, ntheta: usize) -> Result<Complex64> {
    if a.beta != b.beta {
        return Err(Error::InvalidArgument("both indices must share beta".into()));
    }
    let (sa, sb) = (Spectrum::of_index(a), Spectrum::of_index(b));
    check_resolution(f, sa, sb, nr, ntheta)?;
    integrate(
        f,
        |z| z_eval_radial(a, z),
        |z| z_eval_radial(b, z),
        (sa.freq + sb.freq) as usize,
        a.beta,
        nr,
        ntheta,
    )
}

/// Gram matrix `G[i][j] = ⟨Z_i | Z_j⟩`, values tabulated once per node.
pub fn gram_matrix(indices: &[ZIndex], nr: usize, ntheta: usize) -> Result<DMatrix<Complex64>> {
    let Some(first) = indices.first() else {
        return Ok(DMatrix::zeros(0, 0));
    };
    let beta = first.beta;
    if indices.iter().any(|i| i.beta != beta) {
        return Err(Error::InvalidArgument("all indices must share beta".into()));
    }
    let worst = indices
        .iter()
        .map(|&i| Spectrum::of_index(i))
        .fold(Spectrum { degree: 0, freq: 0 }, |a, b| Spectrum {
            degree: a.degree.max(b.degree),
            freq: a.freq.max(b.freq),
        });
    check_resolution(MomentFn::One, worst, worst, nr, ntheta)?;
    let rule = complex_product_rule(beta, nr, ntheta)?;
    let values: Vec<Vec<Complex64>> = indices
        .iter()
        .map(|&idx| {
            rule.iter()
                .map(|(node, _)| z_eval_radial(idx, Complex64::from_polar(node[0], node[1])))
                .collect()
        })
        .collect();
    let k = indices.len();
    let mut g = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let mut re = CompensatedSum::new();
            let mut im = CompensatedSum::new();
            for (s, w) in rule.weights.iter().enumerate() {
                let v = values[i][s] * values[j][s].conj() * *w;
                re.add(v.re);
                im.add(v.im);
            }
            let v = Complex64::new(re.value(), im.value());
            g[(i, j)] = v;
            g[(j, i)] = v.conj();
        }
    }
    Ok(g)
}

/// Quaternionic moment `∫∫ f(q) Z_a(q) conj(Z_b(q)) dν dω` via the slice
/// factorization: the integrand is `u diag(I, conj I) u†` with `I` the complex
/// moment, averaged over the SU(2) rule.
pub fn quaternion_inner(a: ZIndex, b: ZIndex, f: MomentFn, res: Resolution) -> Result<MatrixRep> {
    let slice = z_moment(f, a, b, res.nr, res.ntheta)?;
    let su2 = su2_quadrature(res.nphi, res.npsi)?;
    let mut acc = MatrixRep::zero();
    for (node, w) in su2.iter() {
        let u = su2_element(node[0], node[1]);
        acc = acc + sandwich(&u, slice, slice.conj()).scale(*w);
    }
    Ok(acc)
}

fn quaternion_weight(f: MomentFn, q: Quaternion) -> Result<Quaternion> {
    Ok(match f {
        MomentFn::One => Quaternion::ONE,
        MomentFn::Z => q,
        MomentFn::Zbar => q.conj(),
        MomentFn::ZsqAbs => Quaternion::real(q.norm_sqr()),
        MomentFn::Theta => {
            return Err(Error::InvalidArgument(
                "theta has no direct quaternionic evaluation; use the slice route".into(),
            ))
        }
    })
}

/// Brute-force 4D product quadrature of `f(q) Z_a(q) conj(Z_b(q))` for several
/// index pairs at once, evaluating every polynomial in quaternion arithmetic.
pub fn quaternion_moments_4d(
    pairs: &[(ZIndex, ZIndex)],
    f: MomentFn,
    beta: f64,
    res: Resolution,
) -> Result<Vec<MatrixRep>> {
    if pairs.iter().any(|(a, b)| a.beta != beta || b.beta != beta) {
        return Err(Error::InvalidArgument("all indices must share beta".into()));
    }
    for (a, b) in pairs {
        check_resolution(f, Spectrum::of_index(*a), Spectrum::of_index(*b), res.nr, res.ntheta)?;
    }
    quaternion_weight(f, Quaternion::ONE)?;
    let mut distinct: Vec<ZIndex> = Vec::new();
    let slot = |list: &mut Vec<ZIndex>, idx: ZIndex| match list.iter().position(|&i| i == idx) {
        Some(p) => p,
        None => {
            list.push(idx);
            list.len() - 1
        }
    };
    let pair_slots: Vec<(usize, usize)> = pairs
        .iter()
        .map(|&(a, b)| (slot(&mut distinct, a), slot(&mut distinct, b)))
        .collect();
    let polys: Vec<BiPoly<f64>> = distinct.iter().map(|&i| z_poly(i)).collect();

    let complex = complex_product_rule(beta, res.nr, res.ntheta)?;
    let su2 = su2_quadrature(res.nphi, res.npsi)?;
    let units: Vec<(MatrixRep, f64)> = su2.iter().map(|(n, w)| (su2_element(n[0], n[1]), *w)).collect();

    let mut sums = vec![
        [
            CompensatedSum::new(),
            CompensatedSum::new(),
            CompensatedSum::new(),
            CompensatedSum::new()
        ];
        pairs.len()
    ];
    let mut vals = vec![Quaternion::ZERO; polys.len()];
    for (cn, cw) in complex.iter() {
        let z = Complex64::from_polar(cn[0], cn[1]);
        for (u, sw) in &units {
            let q = sandwich(u, z, z.conj()).project();
            for (v, p) in vals.iter_mut().zip(&polys) {
                *v = p.eval_quaternion(q)?;
            }
            let fq = quaternion_weight(f, q)?;
            let w = cw * sw;
            for (s, &(ia, ib)) in sums.iter_mut().zip(&pair_slots) {
                let term = (fq * vals[ia] * vals[ib].conj()).scale(w);
                for (acc, c) in s.iter_mut().zip(term.components()) {
                    acc.add(c);
                }
            }
        }
    }
    Ok(sums
        .iter()
        .map(|s| Quaternion::new(s[0].value(), s[1].value(), s[2].value(), s[3].value()).to_matrix())
        .collect())
}

pub fn quaternion_inner_4d(a: ZIndex, b: ZIndex, f: MomentFn, res: Resolution) -> Result<MatrixRep> {
    Ok(quaternion_moments_4d(&[(a, b)], f, a.beta, res)?[0])
}

/// `∫₀^∞ x^{c-1} e^{-x} 1F1(-m; c; x) 1F1(-n; c; x) dx` by Gauss–Laguerre.
pub fn f11_overlap(m: usize, n: usize, c: f64, npts: usize) -> Result<f64> {
    if 2 * npts < m + n + 1 {
        return Err(Error::QuadratureUnderResolved(format!(
            "{npts} nodes cannot integrate degree {}",
            m + n
        )));
    }
    let rule = cached_laguerre(c - 1.0, npts)?;
    let mut acc = CompensatedSum::new();
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        acc.add(w * hyp1f1_terminating(m, c, *x)? * hyp1f1_terminating(n, c, *x)?);
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_roots_are_symmetric() {
        for n in [1, 2, 3, 7, 8, 32, 33] {
            let r = unit_roots(n);
            for j in 1..n {
                assert_eq!(r[j], r[n - j].conj());
                let exact = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64);
                assert!((r[j] - exact).norm() < 1e-15);
            }
        }
        assert_eq!(unit_roots(4)[1], Complex64::new(0.0, 1.0));
        assert_eq!(unit_roots(8)[3].re, -unit_roots(8)[1].re);
    }

    use crate::construct2d::squared_norm;
    use statrs::function::gamma::ln_gamma;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn one_point_rule() {
        for &alpha in &[0.0, 0.5, 2.5] {
            let r = gauss_laguerre(alpha, 1).unwrap();
            assert!((r.nodes[0] - (alpha + 1.0)).abs() < 1e-15);
            assert!(rel(r.weights[0], gamma(alpha + 1.0)) < 1e-15);
        }
    }

    #[test]
    fn laguerre_moment_exactness() {
        for &alpha in &[0.0, 0.5, 1.0, 2.5] {
            for &n in &[1usize, 2, 5, 16, 33, 64] {
                let r = gauss_laguerre(alpha, n).unwrap();
                assert!(r.weights.iter().all(|&w| w >= 0.0));
                assert!(rel(r.total_mass(), gamma(alpha + 1.0)) < 1e-13);
                for k in 0..=(2 * n - 1) {
                    let got: f64 = r
                        .nodes
                        .iter()
                        .zip(&r.weights)
                        .filter(|(_, &w)| w > 0.0)
                        .map(|(&x, &w)| (w.ln() + k as f64 * x.ln()).exp())
                        .collect::<CompensatedSum>()
                        .value();
                    let want = ln_gamma(k as f64 + alpha + 1.0);
                    assert!(
                        (got.ln() - want).abs() < 1e-12 * want.abs().max(1.0),
                        "alpha={alpha} n={n} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn large_rule_stays_finite() {
        let r = gauss_laguerre(0.5, 256).unwrap();
        assert_eq!(r.len(), 256);
        assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
        assert!(r.weights.iter().all(|w| w.is_finite() && *w >= 0.0));
        assert!(rel(r.total_mass(), gamma(1.5)) < 1e-12);
    }

    #[test]
    fn legendre_exactness() {
        let r = gauss_legendre(10).unwrap();
        for k in 0..20 {
            let got: f64 = r.iter().map(|(x, w)| w * x[0].powi(k)).sum();
            let want = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((got - want).abs() < 1e-14, "k={k}");
        }
        assert!(gauss_legendre(0).is_err());
        assert!(gauss_laguerre(-1.0, 4).is_err());
    }

    #[test]
    fn circle_rule_exactness() {
        let n = 12;
        let r = circle_rule(n).unwrap();
        for k in -(n as i64 - 1)..(n as i64) {
            let s: Complex64 = r.iter().map(|(t, w)| Complex64::from_polar(*w, k as f64 * t[0])).sum();
            let want = if k == 0 { 1.0 } else { 0.0 };
            assert!((s - want).norm() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn complex_inner_examples() {
        for &beta in &[0.0, 0.5, 2.5] {
            let one = BiPoly::one();
            let v = complex_inner(&one, &one, beta, 4, 4).unwrap();
            assert!(rel(v.re, gamma(beta + 1.0)) < 1e-13 && v.im.abs() < 1e-15);
            let r = complex_product_rule(beta, 4, 4).unwrap();
            assert!(rel(r.total_mass(), gamma(beta + 1.0)) < 1e-13);
        }
        let z21 = z_poly(ZIndex::new(2, 1, 0.0).unwrap());
        let z20 = z_poly(ZIndex::new(2, 0, 0.0).unwrap());
        let z11 = z_poly(ZIndex::new(1, 1, 0.0).unwrap());
        let v = complex_inner(&z21, &z21, 0.0, 8, 8).unwrap();
        assert!((v.re - 2.0).abs() < 1e-13);
        assert!(complex_inner(&z20, &z11, 0.0, 8, 8).unwrap().norm() < 1e-14);
        assert!(matches!(
            complex_inner(&z21, &z21, 0.0, 1, 8),
            Err(Error::QuadratureUnderResolved(_))
        ));
        let laurent = BiPoly::monomial(-1, 0, 1.0);
        assert!(complex_inner(&laurent, &z11, 0.0, 8, 8).is_err());
    }

    #[test]
    fn moment_examples() {
        let one = BiPoly::one();
        let v = moment_inner(MomentFn::ZsqAbs, &one, &one, 0.0, 4, 4).unwrap();
        assert!((v.re - 1.0).abs() < 1e-14);
        for &beta in &[0.0, 1.0] {
            for m in 0..=4 {
                for n in 0..=4 {
                    let idx = ZIndex::new(m, n, beta).unwrap();
                    let p = z_poly(idx);
                    let v = moment_inner(MomentFn::Theta, &p, &p, beta, 16, 32).unwrap();
                    let want = PI * squared_norm(m, n, beta);
                    assert!(rel(v.re, want) < 1e-11 && v.im.abs() < 1e-11 * want, "m={m} n={n}");
                    let w = z_moment(MomentFn::Theta, idx, idx, 16, 32).unwrap();
                    assert!((w - v).norm() < 1e-11 * want);
                }
            }
        }
        let a = z_poly(ZIndex::new(2, 1, 0.5).unwrap());
        let b = z_poly(ZIndex::new(1, 1, 0.5).unwrap());
        assert!(moment_inner(MomentFn::Z, &a, &b, 0.5, 8, 8).unwrap().norm() < 1e-13);
    }

    #[test]
    fn theta_moment_of_plain_monomials() {
        // ∫ θ · z · 1 dν: radial ∫ r·r^{2β+1}e^{-r²}dr/π with θ-part 2π/i
        let beta = 0.0;
        let got = moment_inner(MomentFn::Theta, &BiPoly::w(), &BiPoly::one(), beta, 8, 8).unwrap();
        let radial = 0.5 * gamma(beta + 1.5);
        let want = Complex64::new(0.0, -2.0) * radial;
        assert!((got - want).norm() < 1e-13, "{got} vs {want}");
    }

    #[test]
    fn gram_is_diagonal() {
        for &beta in &[0.0, 1.0, 2.5] {
            let indices: Vec<ZIndex> = (0..=6)
                .flat_map(|m| (0..=6).map(move |n| ZIndex::new(m, n, beta).unwrap()))
                .collect();
            let g = gram_matrix(&indices, 16, 32).unwrap();
            for (i, a) in indices.iter().enumerate() {
                for (j, _) in indices.iter().enumerate() {
                    let want = if i == j { a.norm() } else { 0.0 };
                    let scale = (a.norm() * indices[j].norm()).sqrt();
                    assert!((g[(i, j)] - want).norm() <= 1e-11 * scale, "i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn f11_orthogonality() {
        for &c in &[1.0, 1.5, 3.0] {
            for m in 0..=8 {
                for n in 0..=8 {
                    let got = f11_overlap(m, n, c, 12).unwrap();
                    let want = if m == n {
                        gamma(c) * crate::hypergeom::pochhammer(1.0, n) / crate::hypergeom::pochhammer(c, n)
                    } else {
                        0.0
                    };
                    assert!((got - want).abs() <= 1e-10 * want.abs().max(1.0), "m={m} n={n} c={c}");
                }
            }
        }
        assert!(f11_overlap(8, 8, 1.0, 4).is_err());
    }

    #[test]
    fn quaternion_inner_slice_route() {
        let res = Resolution {
            nr: 12,
            ntheta: 16,
            nphi: 8,
            npsi: 8,
        };
        let a = ZIndex::new(2, 1, 0.5).unwrap();
        let m = quaternion_inner(a, a, MomentFn::One, res).unwrap();
        let want = MatrixRep::scalar(Complex64::new(a.norm(), 0.0));
        assert!(m.max_abs_diff(&want) < 1e-12 * a.norm());
    }

    #[test]
    fn quaternion_4d_matches_slice_route() {
        let res = Resolution {
            nr: 8,
            ntheta: 12,
            nphi: 6,
            npsi: 6,
        };
        let pairs: Vec<(ZIndex, ZIndex)> = [(1, 0, 1, 0), (2, 1, 2, 1), (1, 1, 0, 0), (2, 0, 1, 0)]
            .iter()
            .map(|&(m, n, s, t)| (ZIndex::new(m, n, 0.5).unwrap(), ZIndex::new(s, t, 0.5).unwrap()))
            .collect();
        for f in [MomentFn::One, MomentFn::ZsqAbs, MomentFn::Z] {
            let brute = quaternion_moments_4d(&pairs, f, 0.5, res).unwrap();
            for ((a, b), got) in pairs.iter().zip(&brute) {
                let slice = quaternion_inner(*a, *b, f, res).unwrap();
                assert!(
                    got.max_abs_diff(&slice) < 1e-11 * (1.0 + slice.max_abs()),
                    "{f} {a:?} {b:?}"
                );
            }
        }
        assert!(quaternion_inner_4d(pairs[0].0, pairs[0].1, MomentFn::Theta, res).is_err());
    }

    #[test]
    fn rule_csv_has_header_and_rows() {
        let mut buf = Vec::new();
        gauss_laguerre(0.0, 3).unwrap().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("node,weight"));
        assert_eq!(text.lines().count(), 4);
        let mut buf = Vec::new();
        complex_product_rule(0.0, 2, 3).unwrap().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("node0,node1,weight"));
        assert_eq!(text.lines().count(), 7);
    }
}
