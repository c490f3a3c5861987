//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p laguerre2d --test acceptance`.

use std::f64::consts::{E, PI};
use std::process::ExitCode;
use std::time::Instant;

use laguerre2d::analysis::{
    check_e_sum, check_moments, check_quaternion_moments, e_sum_closed, moment_closed, quantize,
};
use laguerre2d::bipoly::rational;
use laguerre2d::construct2d::{check_recurrences, squared_norm};
use laguerre2d::hypergeom::{pochhammer, SeriesControl};
use laguerre2d::ladder::{
    check_commutators, check_diff_recurrences, check_ladder_complex, check_ladder_quaternionic_formal,
};
use laguerre2d::quadrature::{f11_overlap, gram_matrix, quaternion_inner, z_moment};
use laguerre2d::quaternion::check_dual_path;
use laguerre2d::{IdentityReport, MatrixRep, MomentFn, Resolution, Status, ZIndex};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::gamma;

/// Criteria whose printed target is not met by the verified values.
/// 6: the printed θ-moment vanishes off the `m - n = t - s` block, where the
/// integral does not.
const KNOWN_FAILURES: &[usize] = &[6];

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn index_of(r: &IdentityReport, key: &str) -> Option<u64> {
    r.parameters.get(key).and_then(|v| v.as_u64())
}

fn count(reports: &[IdentityReport], status: Status) -> usize {
    reports.iter().filter(|r| r.status == status).count()
}

fn first_failure(reports: &[IdentityReport]) -> String {
    reports
        .iter()
        .find(|r| r.status == Status::Fail)
        .map(|r| {
            format!(
                " first failure: {} {:?} residual {:e}",
                r.identity, r.parameters, r.residual
            )
        })
        .unwrap_or_default()
}

const BETAS_EXACT: [(i64, i64); 4] = [(0, 1), (1, 2), (1, 1), (5, 2)];

fn ladder_actions() -> Outcome {
    let mut reports = Vec::new();
    let mut exact_nonzero = 0;
    for (p, q) in BETAS_EXACT {
        let b = rational(p, q);
        let mut exact = check_ladder_complex(12, &b);
        exact.extend(check_ladder_quaternionic_formal(12, &b));
        exact_nonzero += exact
            .iter()
            .filter(|r| r.status == Status::Pass && r.residual != 0.0)
            .count();
        reports.extend(exact);
        let bf = p as f64 / q as f64;
        reports.extend(check_ladder_complex(12, &bf));
        reports.extend(check_ladder_quaternionic_formal(12, &bf));
    }
    let boundary_missed = reports
        .iter()
        .filter(|r| matches!(r.identity.as_str(), "a1" | "a2_dag") && index_of(r, "m") == index_of(r, "n"))
        .filter(|r| r.status != Status::BoundaryDeviation)
        .count();
    let fails = count(&reports, Status::Fail);
    Outcome {
        pass: fails == 0 && boundary_missed == 0 && exact_nonzero == 0,
        detail: format!(
            "{} actions, {} pass, {} boundary-deviation, {fails} fail, {boundary_missed} undetected a1/a2_dag boundaries{}",
            reports.len(),
            count(&reports, Status::Pass),
            count(&reports, Status::BoundaryDeviation),
            first_failure(&reports)
        ),
    }
}

fn commutators() -> Outcome {
    let mut reports = Vec::new();
    for (p, q) in BETAS_EXACT {
        reports.extend(check_commutators(12, &rational(p, q)));
    }
    let nonzero = reports.iter().filter(|r| r.residual != 0.0).count();
    Outcome {
        pass: nonzero == 0 && count(&reports, Status::Pass) == reports.len(),
        detail: format!(
            "{} commutator actions, {nonzero} with nonzero residual{}",
            reports.len(),
            first_failure(&reports)
        ),
    }
}

fn recurrences() -> Outcome {
    let mut reports = Vec::new();
    for (p, q) in BETAS_EXACT {
        let b = rational(p, q);
        reports.extend(check_recurrences(12, &b));
        reports.extend(check_diff_recurrences(12, &b));
    }
    let nonzero = reports.iter().filter(|r| r.residual != 0.0).count();
    Outcome {
        pass: nonzero == 0 && count(&reports, Status::Pass) == reports.len(),
        detail: format!(
            "{} identities, {nonzero} with nonzero residual{}",
            reports.len(),
            first_failure(&reports)
        ),
    }
}

fn orthogonality() -> Outcome {
    let mut worst_complex = 0.0f64;
    let mut worst_quat = 0.0f64;
    for &beta in &[0.0, 1.0, 2.5] {
        let indices: Vec<ZIndex> = (0..=6)
            .flat_map(|m| (0..=6).map(move |n| ZIndex { m, n, beta }))
            .collect();
        let g = gram_matrix(&indices, 16, 32).expect("gram");
        let res = Resolution {
            nr: 16,
            ntheta: 32,
            nphi: 16,
            npsi: 16,
        };
        for (i, a) in indices.iter().enumerate() {
            for (j, b) in indices.iter().enumerate() {
                let scale = (a.norm() * b.norm()).sqrt();
                let want = if i == j { a.norm() } else { 0.0 };
                worst_complex = worst_complex.max((g[(i, j)] - want).norm() / scale);
                let q = quaternion_inner(*a, *b, MomentFn::One, res).expect("quaternion gram");
                let wq = MatrixRep::scalar(Complex64::new(want, 0.0));
                worst_quat = worst_quat.max(q.max_abs_diff(&wq) / scale);
            }
        }
    }
    Outcome {
        pass: worst_complex <= 1e-9 && worst_quat <= 1e-8,
        detail: format!(
            "49x49 Gram, beta in {{0,1,2.5}}: worst relative {worst_complex:.2e} (tol 1e-9); quaternionic 16x16 SU(2): {worst_quat:.2e} (tol 1e-8)"
        ),
    }
}

fn summation() -> Outcome {
    let ctl = SeriesControl::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut reports = Vec::new();
    for n in 0..=2 {
        for &beta in &[0.0, 0.5] {
            for _ in 0..20 {
                let z = Complex64::from_polar(2.0 * rng.random::<f64>().sqrt(), rng.random_range(0.0..2.0 * PI));
                reports.push(check_e_sum(n, beta, z, ctl).expect("e-sum"));
            }
        }
    }
    let anchor = e_sum_closed(0, 0.0, 1.0, ctl).expect("anchor").value;
    let anchor_err = (anchor - E).abs();
    let worst = reports.iter().map(|r| r.residual / r.tolerance).fold(0.0, f64::max);
    Outcome {
        pass: count(&reports, Status::Pass) == reports.len() && anchor_err <= 1e-10,
        detail: format!(
            "{} points, worst residual/tolerance {worst:.2e}; anchor |E_0(1) - e| = {anchor_err:.1e}{}",
            reports.len(),
            first_failure(&reports)
        ),
    }
}

fn moments() -> Outcome {
    let res = Resolution {
        nr: 16,
        ntheta: 32,
        ..Resolution::default()
    };
    let mut gef = Vec::new();
    let mut theta = Vec::new();
    let mut anchor_err = 0.0f64;
    for &beta in &[0.0, 0.5, 1.0] {
        for f in [MomentFn::ZsqAbs, MomentFn::Z, MomentFn::Zbar] {
            gef.extend(check_moments(f, 5, beta, res).expect("moments"));
        }
        theta.extend(check_moments(MomentFn::Theta, 5, beta, res).expect("theta moments"));
        for m in 0..=5 {
            for n in 0..=m {
                let idx = ZIndex { m, n, beta };
                let q = z_moment(MomentFn::Theta, idx, idx, 16, 32).expect("theta");
                let want = PI * gamma(beta + m as f64 + 1.0) / pochhammer(1.0, n);
                anchor_err = anchor_err.max((q - want).norm() / want);
            }
        }
    }
    let g00 = z_moment(
        MomentFn::ZsqAbs,
        ZIndex { m: 0, n: 0, beta: 0.0 },
        ZIndex { m: 0, n: 0, beta: 0.0 },
        4,
        4,
    )
    .expect("g00");
    let g00_err = (g00 - 1.0)
        .norm()
        .max((moment_closed(MomentFn::ZsqAbs, 0, 0, 0, 0, 0.0).unwrap() - 1.0).abs());

    let printed: Vec<&IdentityReport> = theta.iter().filter(|r| r.identity == "moment-theta").collect();
    let off_block = printed.iter().filter(|r| r.status == Status::BoundaryDeviation).count();
    let analytic: Vec<&IdentityReport> = theta.iter().filter(|r| r.identity == "moment-theta-analytic").collect();
    let analytic_ok = analytic.iter().filter(|r| r.status == Status::Pass).count();

    let start = Instant::now();
    let quad_res = Resolution {
        nr: 64,
        ntheta: 64,
        nphi: 16,
        npsi: 16,
    };
    let quat = check_quaternion_moments(5, 0.5, quad_res, true).expect("quaternion moments");
    let quat_ok = count(&quat, Status::Pass);

    let gef_ok = count(&gef, Status::Pass);
    let printed_ok = printed.iter().filter(|r| r.status == Status::Pass).count();
    Outcome {
        pass: gef_ok == gef.len()
            && printed_ok == printed.len()
            && anchor_err <= 1e-9
            && g00_err <= 1e-9
            && quat_ok == quat.len(),
        detail: format!(
            "|z|^2, z, zbar: {gef_ok}/{} match; theta printed form: {printed_ok}/{} match, {off_block} off-block tuples where it gives 0 but the integral is nonzero (analytic oracle agrees on {analytic_ok}/{}); anchors G_0(0,0) err {g00_err:.1e}, theta diagonal worst {anchor_err:.1e}; quaternionic 4D (m <= 5): {quat_ok}/{} in {:.1}s{}",
            gef.len(),
            printed.len(),
            analytic.len(),
            quat.len(),
            start.elapsed().as_secs_f64(),
            first_failure(&gef)
        ),
    }
}

fn dual_path() -> Outcome {
    let mut reports = Vec::new();
    for (seed, &beta) in [0.0, 0.5, 1.0, 2.5].iter().enumerate() {
        reports.extend(check_dual_path(8, beta, 50, 1.0, seed as u64).expect("dual path"));
    }
    let worst = reports.iter().map(|r| r.residual / r.tolerance).fold(0.0, f64::max);
    Outcome {
        pass: count(&reports, Status::Pass) == reports.len(),
        detail: format!(
            "{} indices x 50 points in |q| <= 1, worst residual/tolerance {worst:.2e}{}",
            reports.len(),
            first_failure(&reports)
        ),
    }
}

fn quantization() -> Outcome {
    let m_max = 8;
    let az = quantize(MomentFn::Z, 0, 0.0, m_max).expect("A_z");
    let azb = quantize(MomentFn::Zbar, 0, 0.0, m_max).expect("A_zbar");
    let mut shift = 0.0f64;
    for i in 0..=m_max {
        for j in 0..=m_max {
            let want = if j == i + 1 { (j as f64).sqrt() } else { 0.0 };
            shift = shift.max((az[(i, j)] - want).norm());
        }
    }
    let adjoint = (&azb - az.adjoint()).iter().map(|d| d.norm()).fold(0.0, f64::max);
    let comm = &az * &azb - &azb * &az;
    let mut interior = 0.0f64;
    for i in 0..m_max {
        for j in 0..m_max {
            let want = if i == j { 1.0 } else { 0.0 };
            interior = interior.max((comm[(i, j)] - want).norm());
        }
    }
    Outcome {
        pass: shift <= 1e-10 && adjoint <= 1e-10 && interior <= 1e-8,
        detail: format!(
            "shift diagonal err {shift:.1e}, adjoint err {adjoint:.1e}, interior commutator err {interior:.1e}"
        ),
    }
}

fn f11_integral() -> Outcome {
    let mut worst = 0.0f64;
    for &c in &[1.0, 1.5, 2.0, 3.5] {
        for m in 0..=8 {
            for n in 0..=8 {
                let got = f11_overlap(m, n, c, 12).expect("overlap");
                let want = if m == n {
                    gamma(c) * pochhammer(1.0, n) / pochhammer(c, n)
                } else {
                    0.0
                };
                worst = worst.max((got - want).abs() / want.abs().max(1.0));
            }
        }
    }
    let _ = squared_norm;
    Outcome {
        pass: worst <= 1e-10,
        detail: format!("m, n <= 8, c in {{1, 1.5, 2, 3.5}}: worst err {worst:.1e}"),
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("ladder actions (exact and float)", ladder_actions),
        ("commutators", commutators),
        ("recurrences and differential recurrences", recurrences),
        ("orthogonality (complex and quaternionic Gram)", orthogonality),
        ("summation formula vs brute force", summation),
        ("moment closed forms vs quadrature", moments),
        ("dual-path quaternionic evaluation", dual_path),
        ("quantization anchors", quantization),
        ("1F1 orthogonality integral", f11_integral),
    ];
    let mut unexpected = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let id = k + 1;
        let start = Instant::now();
        let out = run();
        println!(
            "{} {id}. {name}: {} [{:.1}s]",
            if out.pass { "PASS" } else { "FAIL" },
            out.detail,
            start.elapsed().as_secs_f64()
        );
        if out.pass == KNOWN_FAILURES.contains(&id) {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        println!("all outcomes as recorded (known failures: {KNOWN_FAILURES:?})");
        ExitCode::SUCCESS
    } else {
        println!("unexpected outcome for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
