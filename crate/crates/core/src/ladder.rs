//! Ladder operators as formal maps on [`BiPoly`].
//!
//! For `m >= n`:
//! `a1 = β/w + ∂_w`, `a1† = w - ∂_w̄`, `a2 = -∂_w̄`, `a2† = β/w + ∂_w - w̄`.
//! The mirror operators (for `m < n`) swap `w` and `w̄`. The quaternionic
//! `b` operators have the same formal expressions with `(w, w̄)` read as
//! `(q, q̄)` and the Cullen derivative acting term by term.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bipoly::{BiPoly, Scalar};
use crate::construct2d::{z_poly, z_poly_in, ZIndex};
use crate::error::Result;
use crate::quadrature::{moment_inner, MomentFn, Resolution};
use crate::quaternion::{sandwich_eval, Quaternion};
use crate::report::IdentityReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LadderKind {
    #[serde(rename = "a1")]
    A1,
    #[serde(rename = "a1_dag")]
    A1Dag,
    #[serde(rename = "a2")]
    A2,
    #[serde(rename = "a2_dag")]
    A2Dag,
    #[serde(rename = "A1")]
    Mirror1,
    #[serde(rename = "A1_dag")]
    Mirror1Dag,
    #[serde(rename = "A2")]
    Mirror2,
    #[serde(rename = "A2_dag")]
    Mirror2Dag,
    #[serde(rename = "b1")]
    B1,
    #[serde(rename = "b1_dag")]
    B1Dag,
    #[serde(rename = "b2")]
    B2,
    #[serde(rename = "b2_dag")]
    B2Dag,
}

impl LadderKind {
    pub const COMPLEX: [LadderKind; 4] = [LadderKind::A1, LadderKind::A1Dag, LadderKind::A2, LadderKind::A2Dag];
    pub const MIRROR: [LadderKind; 4] = [
        LadderKind::Mirror1,
        LadderKind::Mirror1Dag,
        LadderKind::Mirror2,
        LadderKind::Mirror2Dag,
    ];
    pub const QUATERNIONIC: [LadderKind; 4] = [LadderKind::B1, LadderKind::B1Dag, LadderKind::B2, LadderKind::B2Dag];

    pub fn name(self) -> &'static str {
        match self {
            LadderKind::A1 => "a1",
            LadderKind::A1Dag => "a1_dag",
            LadderKind::A2 => "a2",
            LadderKind::A2Dag => "a2_dag",
            LadderKind::Mirror1 => "A1",
            LadderKind::Mirror1Dag => "A1_dag",
            LadderKind::Mirror2 => "A2",
            LadderKind::Mirror2Dag => "A2_dag",
            LadderKind::B1 => "b1",
            LadderKind::B1Dag => "b1_dag",
            LadderKind::B2 => "b2",
            LadderKind::B2Dag => "b2_dag",
        }
    }

    fn is_mirror(self) -> bool {
        LadderKind::MIRROR.contains(&self)
    }

    /// The `m >= n` operator with the same formal expression.
    fn base(self) -> LadderKind {
        match self {
            LadderKind::Mirror1 | LadderKind::B1 => LadderKind::A1,
            LadderKind::Mirror1Dag | LadderKind::B1Dag => LadderKind::A1Dag,
            LadderKind::Mirror2 | LadderKind::B2 => LadderKind::A2,
            LadderKind::Mirror2Dag | LadderKind::B2Dag => LadderKind::A2Dag,
            k => k,
        }
    }
}

impl std::fmt::Display for LadderKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderOp<C = f64> {
    pub kind: LadderKind,
    pub beta: C,
}

impl<C: Scalar> LadderOp<C> {
    pub fn new(kind: LadderKind, beta: C) -> Self {
        Self { kind, beta }
    }

    pub fn apply(&self, p: &BiPoly<C>) -> BiPoly<C> {
        if self.kind.is_mirror() {
            let base = LadderOp::new(self.kind.base(), self.beta.clone());
            return base.apply(&p.conjugate()).conjugate();
        }
        let beta_over_w = || p.shift(-1, 0).scale(&self.beta);
        match self.kind.base() {
            LadderKind::A1 => &beta_over_w() + &p.d_dw(),
            LadderKind::A1Dag => &p.shift(1, 0) - &p.d_dwbar(),
            LadderKind::A2 => -&p.d_dwbar(),
            LadderKind::A2Dag => &(&beta_over_w() + &p.d_dw()) - &p.shift(0, 1),
            _ => unreachable!("base() only returns the four complex kinds"),
        }
    }
}

/// Expected image of `Z_{m,n}` as `factor · Z_{m',n'}`, with a flag for the
/// equal-index boundary where the printed action does not hold.
struct Expected<C> {
    factor: C,
    target: (usize, usize),
    boundary: bool,
}

fn expected<C: Scalar>(kind: LadderKind, m: usize, n: usize, beta: &C) -> Option<Expected<C>> {
    if kind.is_mirror() {
        // mirror actions on n >= m are the conjugates of the base ones
        let e = expected(kind.base(), n, m, beta)?;
        return Some(Expected {
            target: (e.target.1, e.target.0),
            ..e
        });
    }
    if m < n {
        return None;
    }
    let b = |k: usize| beta.clone() + C::from_usize(k);
    match kind.base() {
        LadderKind::A1 if m >= 1 => Some(Expected {
            factor: b(m),
            target: (m - 1, n),
            boundary: m == n,
        }),
        LadderKind::A1Dag => Some(Expected {
            factor: C::one(),
            target: (m + 1, n),
            boundary: false,
        }),
        LadderKind::A2 if n >= 1 => Some(Expected {
            factor: C::one(),
            target: (m, n - 1),
            boundary: false,
        }),
        LadderKind::A2Dag => Some(Expected {
            factor: C::from_usize(n + 1),
            target: (m, n + 1),
            boundary: m == n,
        }),
        _ => None,
    }
}

const BOUNDARY_NOTE: &str = "equal-index boundary: the action holds only for m > n";

fn action_report<C: Scalar>(kind: LadderKind, m: usize, n: usize, beta: &C) -> Option<IdentityReport> {
    let e = expected(kind, m, n, beta)?;
    let op = LadderOp::new(kind, beta.clone());
    let lhs = op.apply(&z_poly_in(m, n, beta));
    let rhs = z_poly_in(e.target.0, e.target.1, beta).scale(&e.factor);
    let r = IdentityReport::poly(kind.name(), &lhs, &rhs)
        .indices(m, n)
        .beta(beta.to_f64())
        .param("target_m", e.target.0)
        .param("target_n", e.target.1);
    Some(if e.boundary {
        r.expect_deviation(BOUNDARY_NOTE)
    } else {
        r
    })
}

fn action_sweep<C: Scalar>(kinds: &[LadderKind], mmax: usize, beta: &C) -> Vec<IdentityReport> {
    let mut out = Vec::new();
    for &kind in kinds {
        for hi in 0..=mmax {
            for lo in 0..=hi {
                let (m, n) = if kind.is_mirror() { (lo, hi) } else { (hi, lo) };
                out.extend(action_report(kind, m, n, beta));
            }
        }
    }
    out
}

/// The four `a` actions on `m >= n` and the four mirror actions on `n >= m`,
/// indices up to `mmax`. Equal-index cases of `a1`, `a2†` and their mirrors
/// are reported as boundary deviations when they fail.
pub fn check_ladder_complex<C: Scalar>(mmax: usize, beta: &C) -> Vec<IdentityReport> {
    let mut out = action_sweep(&LadderKind::COMPLEX, mmax, beta);
    out.extend(action_sweep(&LadderKind::MIRROR, mmax, beta));
    out
}

/// Formal layer of the quaternionic actions: the `b` operators on the
/// `{q, q̄}` polynomial algebra.
pub fn check_ladder_quaternionic_formal<C: Scalar>(mmax: usize, beta: &C) -> Vec<IdentityReport> {
    action_sweep(&LadderKind::QUATERNIONIC, mmax, beta)
}

fn random_quaternion(rng: &mut ChaCha8Rng, radius: f64) -> Quaternion {
    Quaternion::new(
        rng.random_range(-radius..radius),
        rng.random_range(-radius..radius),
        rng.random_range(-radius..radius),
        rng.random_range(-radius..radius),
    )
}

/// Formal layer plus a numeric layer: `b Z_{m,n}` evaluated in quaternion
/// arithmetic against `factor · Z_{m',n'}` from the slice sandwich, at
/// `samples` seeded random quaternions (strict regime only).
pub fn check_ladder_quaternionic(mmax: usize, beta: f64, samples: usize, seed: u64) -> Vec<IdentityReport> {
    let mut out = check_ladder_quaternionic_formal(mmax, &beta);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for kind in LadderKind::QUATERNIONIC {
        for m in 0..=mmax {
            for n in 0..=m {
                let Some(e) = expected(kind, m, n, &beta) else { continue };
                if e.boundary {
                    continue;
                }
                let lhs_poly = LadderOp::new(kind, beta).apply(&z_poly(ZIndex { m, n, beta }));
                let target = ZIndex {
                    m: e.target.0,
                    n: e.target.1,
                    beta,
                };
                let mut worst = 0.0f64;
                let mut scale = 1.0f64;
                let mut last = (Quaternion::ZERO, Quaternion::ZERO);
                for _ in 0..samples {
                    let q = random_quaternion(&mut rng, 0.9);
                    let lhs = match lhs_poly.eval_quaternion(q) {
                        Ok(v) => v,
                        Err(_) => continue,
                    };
                    let rhs = sandwich_eval(target, q).scale(e.factor);
                    worst = worst.max(lhs.max_abs_diff(rhs));
                    scale = scale.max(rhs.norm());
                    last = (lhs, rhs);
                }
                let qv = |x: Quaternion| Complex64::new(x.x0, x.vector_norm());
                out.push(
                    IdentityReport::new(
                        format!("{}-numeric", kind.name()),
                        qv(last.0),
                        qv(last.1),
                        worst,
                        1e-11 * scale,
                    )
                    .indices(m, n)
                    .beta(beta)
                    .param("samples", samples)
                    .param("seed", seed),
                );
            }
        }
    }
    out
}

fn compose<C: Scalar>(ops: &[&LadderOp<C>], p: &BiPoly<C>) -> BiPoly<C> {
    ops.iter().rev().fold(p.clone(), |acc, op| op.apply(&acc))
}

/// `[a1, a2] = 0`, `[a_i, a_j†] = δ_ij` on `Z_{m,n}` with `m > n + 1`.
pub fn check_commutators<C: Scalar>(mmax: usize, beta: &C) -> Vec<IdentityReport> {
    use LadderKind::*;
    let op = |k| LadderOp::new(k, beta.clone());
    let (a1, a1d, a2, a2d) = (op(A1), op(A1Dag), op(A2), op(A2Dag));
    let cases: [(&str, &LadderOp<C>, &LadderOp<C>, bool); 5] = [
        ("[a1,a2]", &a1, &a2, false),
        ("[a1,a1_dag]", &a1, &a1d, true),
        ("[a2,a2_dag]", &a2, &a2d, true),
        ("[a1,a2_dag]", &a1, &a2d, false),
        ("[a2,a1_dag]", &a2, &a1d, false),
    ];
    let mut out = Vec::new();
    for m in 0..=mmax {
        for n in 0..=m {
            if m < n + 2 {
                continue;
            }
            let p = z_poly_in(m, n, beta);
            for (name, x, y, identity) in &cases {
                let (xy, yx) = (compose(&[x, y], &p), compose(&[y, x], &p));
                let lhs = &xy - &yx;
                let rhs = if *identity { p.clone() } else { BiPoly::zero() };
                out.push(
                    IdentityReport::poly_with_terms(*name, &lhs, &rhs, &[&xy, &yx])
                        .indices(m, n)
                        .beta(beta.to_f64()),
                );
            }
        }
    }
    out
}

/// `a1† a1 Z = (β+m) Z` and `a2† a2 Z = n Z` for `m > n`.
pub fn check_number_operators<C: Scalar>(mmax: usize, beta: &C) -> Vec<IdentityReport> {
    let a1 = LadderOp::new(LadderKind::A1, beta.clone());
    let a1d = LadderOp::new(LadderKind::A1Dag, beta.clone());
    let a2 = LadderOp::new(LadderKind::A2, beta.clone());
    let a2d = LadderOp::new(LadderKind::A2Dag, beta.clone());
    let mut out = Vec::new();
    for m in 1..=mmax {
        for n in 0..m {
            let p = z_poly_in(m, n, beta);
            let tag = |r: IdentityReport| r.indices(m, n).beta(beta.to_f64());
            let rhs = p.scale(&(beta.clone() + C::from_usize(m)));
            out.push(tag(IdentityReport::poly("a1_dag a1", &compose(&[&a1d, &a1], &p), &rhs)));
            let rhs = p.scale(&C::from_usize(n));
            out.push(tag(IdentityReport::poly("a2_dag a2", &compose(&[&a2d, &a2], &p), &rhs)));
        }
    }
    out
}

/// The differential recurrences on `m >= n >= 1` (the Euler relation on all
/// `m >= n`):
///
/// - `w∂_w Z = (m-n) Z - w̄ Z_{m,n-1}`
/// - `w∂_w Z = m Z - (β+m) Z_{m-1,n-1}`
/// - `w̄∂_w̄ Z = -w̄ Z_{m,n-1}`
/// - `w̄∂_w̄ Z = n Z - (β+m) Z_{m-1,n-1}`
/// - `(w∂_w - w̄∂_w̄) Z = (m-n) Z`
/// - `(n w∂_w - m w̄∂_w̄) Z = (m-n)(β+m) Z_{m-1,n-1}`
pub fn check_diff_recurrences<C: Scalar>(mmax: usize, beta: &C) -> Vec<IdentityReport> {
    let w = BiPoly::<C>::w();
    let wb = BiPoly::<C>::wbar();
    let k = |v: usize| C::from_usize(v);
    let mut out = Vec::new();
    for m in 0..=mmax {
        for n in 0..=m {
            let z = z_poly_in(m, n, beta);
            let wdw = &w * &z.d_dw();
            let wbdwb = &wb * &z.d_dwbar();
            let tag = |r: IdentityReport| r.indices(m, n).beta(beta.to_f64());
            out.push(tag(IdentityReport::poly(
                "euler",
                &(&wdw - &wbdwb),
                &z.scale(&k(m - n)),
            )));
            if n == 0 {
                continue;
            }
            let bm = beta.clone() + k(m);
            let lower_n = z_poly_in(m, n - 1, beta);
            let lower_both = z_poly_in(m - 1, n - 1, beta).scale(&bm);
            let wb_lower = &wb * &lower_n;
            out.push(tag(IdentityReport::poly(
                "w-derivative-n",
                &wdw,
                &(&z.scale(&k(m - n)) - &wb_lower),
            )));
            out.push(tag(IdentityReport::poly(
                "w-derivative-m",
                &wdw,
                &(&z.scale(&k(m)) - &lower_both),
            )));
            out.push(tag(IdentityReport::poly("wbar-derivative-n", &wbdwb, &(-&wb_lower))));
            out.push(tag(IdentityReport::poly(
                "wbar-derivative-m",
                &wbdwb,
                &(&z.scale(&k(n)) - &lower_both),
            )));
            let lhs = &wdw.scale(&k(n)) - &wbdwb.scale(&k(m));
            out.push(tag(IdentityReport::poly(
                "weighted-euler",
                &lhs,
                &lower_both.scale(&k(m - n)),
            )));
        }
    }
    out
}

/// `⟨a1 Z_{m,n}, Z_{s,t}⟩ = ⟨Z_{m,n}, a1† Z_{s,t}⟩` for `m > n`, `s >= t`, and
/// the `a2` pair for `m >= n >= 1`, `s > t`, by product quadrature.
pub fn check_adjointness(mmax: usize, beta: f64, res: Resolution) -> Result<Vec<IdentityReport>> {
    let pairs = [(LadderKind::A1, LadderKind::A1Dag), (LadderKind::A2, LadderKind::A2Dag)];
    let mut out = Vec::new();
    for (down, up) in pairs {
        let d = LadderOp::new(down, beta);
        let u = LadderOp::new(up, beta);
        for m in 0..=mmax {
            for n in 0..=m {
                let left_ok = match down {
                    LadderKind::A1 => m > n,
                    _ => n >= 1,
                };
                if !left_ok {
                    continue;
                }
                for s in 0..=mmax {
                    for t in 0..=s {
                        let right_ok = match up {
                            LadderKind::A1Dag => true,
                            _ => s > t,
                        };
                        if !right_ok {
                            continue;
                        }
                        let zmn = z_poly(ZIndex { m, n, beta });
                        let zst = z_poly(ZIndex { m: s, n: t, beta });
                        let lhs = moment_inner(MomentFn::One, &d.apply(&zmn), &zst, beta, res.nr, res.ntheta)?;
                        let rhs = moment_inner(MomentFn::One, &zmn, &u.apply(&zst), beta, res.nr, res.ntheta)?;
                        let scale = (ZIndex { m, n, beta }.norm() * ZIndex { m: s, n: t, beta }.norm()).sqrt()
                            * (beta + m as f64 + s as f64 + 1.0);
                        let residual = (lhs - rhs).norm();
                        out.push(
                            IdentityReport::new(
                                format!("adjoint {}/{}", down.name(), up.name()),
                                lhs,
                                rhs,
                                residual,
                                1e-9 * scale,
                            )
                            .indices(m, n)
                            .param("s", s)
                            .param("t", t)
                            .beta(beta),
                        );
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipoly::{rational, rational_from_f64};
    use crate::report::Status;
    use num_rational::BigRational;

    const BETAS: [f64; 4] = [0.0, 0.5, 1.0, 2.5];

    fn zf(m: usize, n: usize, beta: f64) -> BiPoly<f64> {
        z_poly(ZIndex::new(m, n, beta).unwrap())
    }

    #[test]
    fn apply_examples() {
        for &beta in &BETAS {
            let a1d = LadderOp::new(LadderKind::A1Dag, beta);
            let want = BiPoly::from_terms([(1, 0, beta + 2.0), (2, 1, -1.0)]);
            assert_eq!(a1d.apply(&zf(1, 1, beta)), want);
            let a2 = LadderOp::new(LadderKind::A2, beta);
            for m in 0..5 {
                assert!(a2.apply(&zf(m, 0, beta)).is_zero());
            }
            assert_eq!(a2.apply(&zf(2, 1, beta)), zf(2, 0, beta));
            let a1 = LadderOp::new(LadderKind::A1, beta);
            assert_eq!(a1.apply(&zf(2, 1, beta)), zf(1, 1, beta).scale(&(beta + 2.0)));
            // b2† on q²: β q + 2 q - q² q̄
            let b2d = LadderOp::new(LadderKind::B2Dag, beta);
            let want = BiPoly::from_terms([(1, 0, beta + 2.0), (2, 1, -1.0)]);
            assert_eq!(b2d.apply(&zf(2, 0, beta)), want);
        }
    }

    #[test]
    fn boundary_deviation_detected() {
        let beta = rational(1, 2);
        let a1 = LadderOp::new(LadderKind::A1, beta.clone());
        let got = a1.apply(&z_poly_in(1, 1, &beta));
        // β(β+1)/w - (β+1) w̄
        let bp1 = beta.clone() + rational(1, 1);
        let want = BiPoly::<BigRational>::from_terms([(-1, 0, beta.clone() * bp1.clone()), (0, 1, -bp1)]);
        assert_eq!(got, want);
        let r = action_report(LadderKind::A1, 1, 1, &beta).unwrap();
        assert_eq!(r.status, Status::BoundaryDeviation);
        let r = action_report(LadderKind::A2Dag, 2, 2, &beta).unwrap();
        assert_eq!(r.status, Status::BoundaryDeviation);
    }

    #[test]
    fn ladder_suite_exact_and_float() {
        for &beta in &BETAS {
            let exact = rational_from_f64(beta).unwrap();
            for reports in [
                check_ladder_complex(12, &exact),
                check_ladder_quaternionic_formal(12, &exact),
            ] {
                for r in &reports {
                    let at_boundary = r.parameters["m"] == r.parameters["n"]
                        && ["a1", "a2_dag", "A1", "A2_dag", "b1", "b2_dag"].contains(&r.identity.as_str());
                    if at_boundary {
                        assert_eq!(r.status, Status::BoundaryDeviation, "{r:?}");
                    } else {
                        assert_eq!(r.status, Status::Pass, "{r:?}");
                        assert_eq!(r.residual, 0.0);
                    }
                }
            }
            for r in check_ladder_complex(12, &beta) {
                assert_ne!(r.status, Status::Fail, "{r:?}");
            }
        }
    }

    #[test]
    fn quaternionic_numeric_layer() {
        for r in check_ladder_quaternionic(6, 0.5, 20, 1) {
            assert_ne!(r.status, Status::Fail, "{r:?}");
        }
        // b2 Z_{2,1} = Z_{2,0} at q = 1 + i + j
        let q = Quaternion::new(1.0, 1.0, 1.0, 0.0);
        let lhs = LadderOp::new(LadderKind::B2, 0.0)
            .apply(&zf(2, 1, 0.0))
            .eval_quaternion(q)
            .unwrap();
        assert!(lhs.max_abs_diff(q * q) < 1e-14);
    }

    #[test]
    fn commutators_and_number_operators() {
        for &beta in &BETAS {
            let exact = rational_from_f64(beta).unwrap();
            for r in check_commutators(12, &exact)
                .iter()
                .chain(&check_number_operators(12, &exact))
            {
                assert!(r.passed() && r.residual == 0.0, "{r:?}");
            }
        }
        let reports = check_commutators(3, &0.0);
        assert!(reports
            .iter()
            .all(|r| r.parameters["m"].as_u64().unwrap() >= r.parameters["n"].as_u64().unwrap() + 2));
    }

    #[test]
    fn diff_recurrences_exact() {
        for &beta in &BETAS {
            let exact = rational_from_f64(beta).unwrap();
            for r in check_diff_recurrences(12, &exact) {
                assert!(r.passed(), "{r:?}");
            }
        }
    }

    #[test]
    fn adjointness_examples() {
        let res = Resolution {
            nr: 16,
            ntheta: 32,
            nphi: 2,
            npsi: 2,
        };
        let reports = check_adjointness(4, 0.0, res).unwrap();
        assert!(!reports.is_empty());
        for r in &reports {
            assert!(r.passed(), "{r:?}");
        }
        // ((2,1),(1,1)) at β=0: (β+2)·C(1,1,0) = 2
        let lhs = moment_inner(
            MomentFn::One,
            &LadderOp::new(LadderKind::A1, 0.0).apply(&zf(2, 1, 0.0)),
            &zf(1, 1, 0.0),
            0.0,
            8,
            8,
        )
        .unwrap();
        assert!((lhs.re - 2.0).abs() < 1e-13);
    }
}
