//! Quaternions, their 2×2 complex matrix representation and the polar
//! factorization `q = u_q diag(z, z̄) u_q†`.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::construct2d::{z_eval, z_poly, ZIndex};
use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, QuadratureKind, QuadratureRule};
use crate::report::IdentityReport;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Quaternion {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Self { x0, x1, x2, x3 }
    }

    pub const fn real(x: f64) -> Self {
        Self::new(x, 0.0, 0.0, 0.0)
    }

    pub fn conj(self) -> Self {
        Self::new(self.x0, -self.x1, -self.x2, -self.x3)
    }

    pub fn norm_sqr(self) -> f64 {
        self.x0 * self.x0 + self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn vector_norm(self) -> f64 {
        (self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3).sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.x0 * s, self.x1 * s, self.x2 * s, self.x3 * s)
    }

    pub fn inverse(self) -> Self {
        self.conj().scale(1.0 / self.norm_sqr())
    }

    pub fn components(self) -> [f64; 4] {
        [self.x0, self.x1, self.x2, self.x3]
    }

    /// Largest componentwise absolute difference.
    pub fn max_abs_diff(self, other: Self) -> f64 {
        let d = self - other;
        d.components().iter().map(|c| c.abs()).fold(0.0, f64::max)
    }

    pub fn to_matrix(self) -> MatrixRep {
        MatrixRep([
            [Complex64::new(self.x0, self.x3), Complex64::new(-self.x2, self.x1)],
            [Complex64::new(self.x2, self.x1), Complex64::new(self.x0, -self.x3)],
        ])
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.x0 + o.x0, self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.x0 - o.x0, self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        self.scale(-1.0)
    }
}

/// Hamilton product (`ij = k`, `jk = i`, `ki = j`).
impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, o: Quaternion) -> Quaternion {
        let (a0, a1, a2, a3) = (self.x0, self.x1, self.x2, self.x3);
        let (b0, b1, b2, b3) = (o.x0, o.x1, o.x2, o.x3);
        Quaternion::new(
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        )
    }
}

/// 2×2 complex matrix `[[x0 + i x3, -x2 + i x1], [x2 + i x1, x0 - i x3]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixRep(pub [[Complex64; 2]; 2]);

impl MatrixRep {
    pub fn identity() -> Self {
        let o = Complex64::new(1.0, 0.0);
        let z = Complex64::new(0.0, 0.0);
        MatrixRep([[o, z], [z, o]])
    }

    pub fn zero() -> Self {
        let z = Complex64::new(0.0, 0.0);
        MatrixRep([[z, z], [z, z]])
    }

    pub fn diag(a: Complex64, b: Complex64) -> Self {
        let z = Complex64::new(0.0, 0.0);
        MatrixRep([[a, z], [z, b]])
    }

    pub fn scalar(s: Complex64) -> Self {
        Self::diag(s, s)
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        MatrixRep([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn det(&self) -> Complex64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        for row in out.0.iter_mut() {
            for e in row.iter_mut() {
                *e *= s;
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                d = d.max((self.0[r][c] - other.0[r][c]).norm());
            }
        }
        d
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs_diff(&MatrixRep::zero())
    }

    /// Inverse of [`Quaternion::to_matrix`]; rejects matrices off the pattern.
    pub fn to_quaternion(&self) -> Result<Quaternion> {
        let q = self.project();
        let deviation = self.max_abs_diff(&q.to_matrix());
        if deviation > 1e-10 * self.max_abs().max(1.0) {
            return Err(Error::NotAQuaternionMatrix { deviation });
        }
        Ok(q)
    }

    /// Closest quaternion in the Frobenius sense.
    pub fn project(&self) -> Quaternion {
        let m = &self.0;
        Quaternion::new(
            0.5 * (m[0][0].re + m[1][1].re),
            0.5 * (m[0][1].im + m[1][0].im),
            0.5 * (m[1][0].re - m[0][1].re),
            0.5 * (m[0][0].im - m[1][1].im),
        )
    }
}

impl Mul for MatrixRep {
    type Output = MatrixRep;
    fn mul(self, o: MatrixRep) -> MatrixRep {
        let (a, b) = (&self.0, &o.0);
        MatrixRep(std::array::from_fn(|r| {
            std::array::from_fn(|c| a[r][0] * b[0][c] + a[r][1] * b[1][c])
        }))
    }
}

impl Add for MatrixRep {
    type Output = MatrixRep;
    fn add(self, o: MatrixRep) -> MatrixRep {
        let mut out = self;
        for r in 0..2 {
            for c in 0..2 {
                out.0[r][c] += o.0[r][c];
            }
        }
        out
    }
}

pub fn to_matrix(q: Quaternion) -> MatrixRep {
    q.to_matrix()
}

pub fn from_matrix(m: &MatrixRep) -> Result<Quaternion> {
    m.to_quaternion()
}

/// `diag(e^{iψ/2}, e^{-iψ/2}) · [[cos φ/2, i sin φ/2], [i sin φ/2, cos φ/2]] · diag(e^{iψ/2}, e^{-iψ/2})`.
///
/// With this parametrization `u σ₃ u†` is the axis with polar angle `φ` and
/// azimuth `ψ - π/2`.
pub fn su2_element(phi: f64, psi: f64) -> MatrixRep {
    let d = MatrixRep::diag(
        Complex64::from_polar(1.0, psi / 2.0),
        Complex64::from_polar(1.0, -psi / 2.0),
    );
    let (s, c) = (phi / 2.0).sin_cos();
    let rot = MatrixRep([[Complex64::new(c, 0.0), I * s], [I * s, Complex64::new(c, 0.0)]]);
    d * rot * d
}

/// `u diag(a, b) u†`.
pub fn sandwich(u: &MatrixRep, a: Complex64, b: Complex64) -> MatrixRep {
    *u * MatrixRep::diag(a, b) * u.adjoint()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarFactors {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
    /// Parameter of [`su2_element`], not the axis azimuth.
    pub psi: f64,
    pub u: MatrixRep,
    pub zslice: Complex64,
    /// `sin θ` or `sin φ` vanished, so `(φ, ψ)` were fixed by convention.
    pub degenerate_axis: bool,
}

impl PolarFactors {
    pub fn reconstruct(&self) -> MatrixRep {
        sandwich(&self.u, self.zslice, self.zslice.conj())
    }
}

pub fn polar_factorize(q: Quaternion) -> PolarFactors {
    let r = q.norm();
    let v = q.vector_norm();
    let tiny = 1e-15 * r.max(f64::MIN_POSITIVE);
    let (theta, phi, axis_azimuth, degenerate) = if v <= tiny {
        let theta = if q.x0 < 0.0 { PI } else { 0.0 };
        (theta, 0.0, -PI / 2.0, true)
    } else {
        let theta = v.atan2(q.x0);
        let (n1, n2, n3) = (q.x1 / v, q.x2 / v, q.x3 / v);
        let rho = n1.hypot(n2);
        if rho <= 1e-15 {
            let phi = if n3 < 0.0 { PI } else { 0.0 };
            (theta, phi, -PI / 2.0, true)
        } else {
            (theta, rho.atan2(n3), n2.atan2(n1), false)
        }
    };
    let psi = (axis_azimuth + PI / 2.0).rem_euclid(2.0 * PI);
    PolarFactors {
        r,
        theta,
        phi,
        psi,
        u: su2_element(phi, psi),
        zslice: Complex64::from_polar(r, theta),
        degenerate_axis: degenerate,
    }
}

/// `Z_{m,n}(q, q̄)` through the slice value and the `u_q` conjugation.
pub fn sandwich_eval(idx: ZIndex, q: Quaternion) -> Quaternion {
    let pf = polar_factorize(q);
    let value = z_eval(idx, pf.zslice);
    sandwich(&pf.u, value, value.conj()).project()
}

/// Uniform sample from the ball `|q| <= radius`.
pub fn random_in_ball<R: Rng>(rng: &mut R, radius: f64) -> Quaternion {
    loop {
        let c: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let q = Quaternion::new(c[0], c[1], c[2], c[3]);
        if q.norm_sqr() <= 1.0 {
            return q.scale(radius);
        }
    }
}

/// Slice sandwich against the monomial expansion evaluated in quaternion
/// arithmetic, for every index `n <= m <= mmax` at `samples` points of the
/// ball `|q| <= radius`. Tolerance is `1e-12` per component relative to
/// `max(1, |Z(q)|)`.
pub fn check_dual_path(mmax: usize, beta: f64, samples: usize, radius: f64, seed: u64) -> Result<Vec<IdentityReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for m in 0..=mmax {
        for n in 0..=mmax {
            let idx = ZIndex::new(m, n, beta)?;
            let poly = z_poly(idx);
            let mut worst = 0.0f64;
            let mut scale = 1.0f64;
            let mut last = (Quaternion::ZERO, Quaternion::ZERO);
            for _ in 0..samples {
                let q = random_in_ball(&mut rng, radius);
                let lhs = sandwich_eval(idx, q);
                let rhs = poly.eval_quaternion(q)?;
                let s = rhs.norm().max(1.0);
                if lhs.max_abs_diff(rhs) / s > worst / scale {
                    worst = lhs.max_abs_diff(rhs);
                    scale = s;
                }
                last = (lhs, rhs);
            }
            out.push(
                IdentityReport::new(
                    "dual-path-quaternion",
                    Complex64::new(last.0.x0, last.0.vector_norm()),
                    Complex64::new(last.1.x0, last.1.vector_norm()),
                    worst,
                    1e-12 * scale,
                )
                .indices(m, n)
                .beta(beta)
                .param("samples", samples)
                .param("radius", radius)
                .param("seed", seed)
                .finalize(),
            );
        }
    }
    Ok(out)
}

/// Product rule for the normalized Haar measure `(1/4π) sin φ dφ dψ`:
/// Gauss–Legendre in `cos φ` times the uniform rule in `ψ`. Nodes are `(φ, ψ)`.
pub fn su2_quadrature(n_phi: usize, n_psi: usize) -> Result<QuadratureRule> {
    if n_phi < 2 || n_psi < 2 {
        return Err(Error::InvalidArgument(format!(
            "SU(2) rule needs at least 2×2 nodes, got {n_phi}×{n_psi}"
        )));
    }
    let gl = gauss_legendre(n_phi)?;
    let mut nodes = Vec::with_capacity(2 * n_phi * n_psi);
    let mut weights = Vec::with_capacity(n_phi * n_psi);
    for (x, w) in gl.nodes.iter().zip(&gl.weights) {
        let phi = x.clamp(-1.0, 1.0).acos();
        for j in 0..n_psi {
            nodes.push(phi);
            nodes.push(2.0 * PI * j as f64 / n_psi as f64);
            weights.push(0.5 * w / n_psi as f64);
        }
    }
    Ok(QuadratureRule {
        kind: QuadratureKind::Su2Product,
        dim: 2,
        nodes,
        weights,
        exactness_degree: gl.exactness_degree.min(n_psi - 1),
    })
}
