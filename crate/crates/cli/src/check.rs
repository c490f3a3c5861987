use std::f64::consts::PI;
use std::io::Write;

use laguerre2d::analysis::{
    check_e_sum, check_moments, check_orthogonality, check_quantization, check_quaternion_moments,
    check_quaternion_sum, check_shifted_sum,
};
use laguerre2d::bipoly::{rational_from_f64, Scalar};
use laguerre2d::construct2d::check_recurrences;
use laguerre2d::hypergeom::SeriesControl;
use laguerre2d::ladder::{
    check_adjointness, check_commutators, check_diff_recurrences, check_ladder_complex, check_ladder_quaternionic,
    check_ladder_quaternionic_formal, check_number_operators,
};
use laguerre2d::quaternion::{check_dual_path, random_in_ball};
use laguerre2d::{IdentityReport, MomentFn, Resolution, Tally};
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::args::{CheckArgs, Cli, Format, Suite};
use crate::output::{sink, write_json};
use crate::CliError;

fn betas(a: &CheckArgs, default: &[f64]) -> Result<Vec<f64>, CliError> {
    let list = if a.beta.is_empty() {
        default.to_vec()
    } else {
        a.beta.clone()
    };
    for &b in &list {
        if !(b >= 0.0 && b.is_finite()) {
            return Err(laguerre2d::Error::InvalidArgument(format!("beta must be >= 0, got {b}")).into());
        }
    }
    Ok(list)
}

fn resolution(a: &CheckArgs, mmax: usize, base: Resolution) -> Resolution {
    Resolution {
        nr: a.nr.unwrap_or(base.nr.max(mmax + 4)),
        ntheta: a.ntheta.unwrap_or(base.ntheta.max(4 * mmax + 8)),
        nphi: a.nphi.unwrap_or(base.nphi),
        npsi: a.npsi.unwrap_or(base.npsi),
    }
}

/// Polynomial suites run in the scalar field chosen on the command line.
fn exact_or_float<F, G>(exact: bool, beta: f64, on_exact: F, on_float: G) -> Result<Vec<IdentityReport>, CliError>
where
    F: Fn(&BigRational) -> Vec<IdentityReport>,
    G: Fn(&f64) -> Vec<IdentityReport>,
{
    if exact {
        let b = rational_from_f64(beta)
            .ok_or_else(|| laguerre2d::Error::InvalidArgument(format!("beta {beta} is not finite")))?;
        Ok(on_exact(&b))
    } else {
        Ok(on_float(&beta))
    }
}

fn random_disk(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    Complex64::from_polar(radius * rng.random::<f64>().sqrt(), rng.random_range(0.0..2.0 * PI))
}

fn polynomial_suite<C: Scalar>(suite: Suite, mmax: usize, beta: &C) -> Vec<IdentityReport> {
    match suite {
        Suite::Ladder => {
            let mut r = check_ladder_complex(mmax, beta);
            r.extend(check_ladder_quaternionic_formal(mmax, beta));
            r
        }
        Suite::Commutators => {
            let mut r = check_commutators(mmax, beta);
            r.extend(check_number_operators(mmax, beta));
            r
        }
        _ => {
            let mut r = check_recurrences(mmax, beta);
            r.extend(check_diff_recurrences(mmax, beta));
            r
        }
    }
}

pub fn run(cli: &Cli, a: &CheckArgs) -> Result<u8, CliError> {
    let ctl = SeriesControl::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let mut reports = Vec::new();
    let mut config = json!({"seed": cli.seed, "tol_factor": cli.tol, "exact": a.exact});
    match a.suite {
        Suite::Ladder | Suite::Commutators | Suite::Recurrences => {
            let default_mmax = if a.suite == Suite::Ladder { 10 } else { 12 };
            let mmax = a.mmax.unwrap_or(default_mmax);
            let bs = betas(a, &[0.0, 0.5, 1.0])?;
            for &beta in &bs {
                reports.extend(exact_or_float(
                    a.exact,
                    beta,
                    |b| polynomial_suite(a.suite, mmax, b),
                    |b| polynomial_suite(a.suite, mmax, b),
                )?);
                if a.suite == Suite::Ladder && !a.exact {
                    // numeric layer for the quaternionic actions; the formal layer is already in
                    let numeric = check_ladder_quaternionic(mmax, beta, a.samples, cli.seed);
                    reports.extend(numeric.into_iter().filter(|r| r.identity.ends_with("-numeric")));
                }
            }
            config["mmax"] = json!(mmax);
            config["beta"] = json!(bs);
        }
        Suite::Ortho => {
            let mmax = a.mmax.unwrap_or(6);
            let bs = betas(a, &[0.0, 1.0, 2.5])?;
            let res = resolution(
                a,
                2 * mmax,
                Resolution {
                    nr: 16,
                    ntheta: 32,
                    nphi: 16,
                    npsi: 16,
                },
            );
            for &beta in &bs {
                reports.extend(check_orthogonality(mmax, beta, res, true)?);
                reports.extend(check_adjointness(mmax, beta, res)?);
            }
            config["mmax"] = json!(mmax);
            config["beta"] = json!(bs);
            config["resolution"] = json!(res);
        }
        Suite::Sums => {
            let nmax = a.n.unwrap_or(2);
            let bs = betas(a, &[0.0, 0.5])?;
            for n in 0..=nmax {
                for &beta in &bs {
                    for _ in 0..a.samples {
                        let z = random_disk(&mut rng, 2.0);
                        reports.push(check_e_sum(n, beta, z, ctl)?);
                    }
                    let z = random_disk(&mut rng, 1.0);
                    reports.extend(check_shifted_sum(n, beta, z, a.mmax.unwrap_or(60), ctl)?);
                    let q = random_in_ball(&mut rng, 1.5);
                    reports.push(check_quaternion_sum(n, beta, q, ctl)?);
                }
            }
            config["n_max"] = json!(nmax);
            config["beta"] = json!(bs);
            config["samples"] = json!(a.samples);
        }
        Suite::Moments => {
            let mmax = a.mmax.unwrap_or(4);
            let bs = betas(a, &[0.0])?;
            let fs = if a.f.is_empty() {
                vec![MomentFn::ZsqAbs, MomentFn::Z, MomentFn::Zbar, MomentFn::Theta]
            } else {
                a.f.clone()
            };
            if fs.contains(&MomentFn::One) {
                return Err(CliError::Usage(
                    "moments suite covers zsq_abs, z, zbar, theta; use ortho for one".into(),
                ));
            }
            let res = resolution(
                a,
                mmax,
                Resolution {
                    nr: 16,
                    ntheta: 32,
                    ..Resolution::default()
                },
            );
            for &beta in &bs {
                for &f in &fs {
                    reports.extend(check_moments(f, mmax, beta, res)?);
                }
            }
            config["mmax"] = json!(mmax);
            config["beta"] = json!(bs);
            config["f"] = json!(fs.iter().map(|f| f.name()).collect::<Vec<_>>());
            config["resolution"] = json!(res);
        }
        Suite::Quat => {
            let mmax = a.mmax.unwrap_or(4);
            let bs = betas(a, &[0.5])?;
            let base = if a.brute_force {
                Resolution {
                    nr: 64,
                    ntheta: 64,
                    nphi: 16,
                    npsi: 16,
                }
            } else {
                Resolution {
                    nr: 16,
                    ntheta: 32,
                    nphi: 16,
                    npsi: 16,
                }
            };
            let res = resolution(a, mmax, base);
            for &beta in &bs {
                reports.extend(check_dual_path(mmax, beta, a.samples, 1.0, cli.seed)?);
                reports.extend(check_quaternion_moments(mmax, beta, res, a.brute_force)?);
            }
            config["mmax"] = json!(mmax);
            config["beta"] = json!(bs);
            config["route"] = json!(if a.brute_force { "4d" } else { "slice" });
            config["resolution"] = json!(res);
        }
        Suite::Quantize => {
            let n = a.n.unwrap_or(0);
            let m_max = a.m_max.unwrap_or(8);
            if m_max < n {
                return Err(CliError::Usage(format!("--M {m_max} is below --n {n}")));
            }
            let bs = betas(a, &[0.0])?;
            for &beta in &bs {
                reports.extend(check_quantization(n, beta, m_max)?);
            }
            config["n"] = json!(n);
            config["M"] = json!(m_max);
            config["beta"] = json!(bs);
        }
    }
    if cli.tol != 1.0 {
        reports = reports.into_iter().map(|r| r.rescale_tolerance(cli.tol)).collect();
    }
    let tally = Tally::of(&reports);
    emit(cli, a.suite, &reports, config)?;
    eprintln!(
        "{}: {} pass, {} fail, {} boundary-deviation",
        a.suite.name(),
        tally.pass,
        tally.fail,
        tally.boundary_deviation
    );
    Ok(tally.exit_code() as u8)
}

fn emit(cli: &Cli, suite: Suite, reports: &[IdentityReport], config: serde_json::Value) -> Result<(), CliError> {
    match cli.format.unwrap_or(Format::Json) {
        Format::Json => write_json(
            cli,
            &json!({"suite": suite.name(), "reports": reports, "config": config}),
        ),
        Format::Csv => {
            let mut wtr = csv::Writer::from_writer(sink(cli)?);
            wtr.write_record(["identity", "status", "residual", "tolerance", "parameters", "note"])?;
            for r in reports {
                wtr.write_record([
                    r.identity.clone(),
                    r.status.as_str().to_string(),
                    format!("{:e}", r.residual),
                    format!("{:e}", r.tolerance),
                    serde_json::to_string(&r.parameters)?,
                    r.note.clone().unwrap_or_default(),
                ])?;
            }
            wtr.flush()?;
            let mut inner = wtr.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
            inner.flush()?;
            Ok(())
        }
    }
}
