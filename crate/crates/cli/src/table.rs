use std::io::Write;

use laguerre2d::analysis::{e_sum_closed, kernel, quantize, write_matrix_csv, KernelTruncation, MatrixJson};
use laguerre2d::construct2d::{squared_norm, write_coeff_table};
use laguerre2d::hypergeom::SeriesControl;
use laguerre2d::quadrature::{circle_rule, gauss_laguerre, gauss_legendre};
use laguerre2d::{z_poly, ZIndex};
use serde_json::json;

use crate::args::{Cli, Format, RuleKind, TableArgs, TableKind};
use crate::output::{parse_complex, sink, write_json};
use crate::CliError;

fn require<T>(v: Option<T>, flag: &str, what: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("table {what} needs {flag}")))
}

pub fn run(cli: &Cli, a: &TableArgs) -> Result<u8, CliError> {
    let format = cli.format.unwrap_or(Format::Csv);
    match a.what {
        TableKind::Coeffs => {
            let indices: Vec<ZIndex> = match (a.m, a.n, a.mmax) {
                (Some(m), Some(n), _) => vec![ZIndex::new(m, n, a.beta)?],
                (_, _, Some(mmax)) => (0..=mmax)
                    .flat_map(|m| (0..=mmax).map(move |n| (m, n)))
                    .map(|(m, n)| ZIndex::new(m, n, a.beta))
                    .collect::<Result<_, _>>()?,
                _ => return Err(CliError::Usage("table coeffs needs --m and --n, or --mmax".into())),
            };
            match format {
                Format::Csv => write_coeff_table(&indices, sink(cli)?)?,
                Format::Json => {
                    let rows: Vec<_> = indices
                        .iter()
                        .map(|i| {
                            let terms: Vec<_> = z_poly(*i)
                                .terms()
                                .map(|((p, q), c)| json!({"a": p, "b": q, "coeff": c}))
                                .collect();
                            json!({"m": i.m, "n": i.n, "beta": i.beta, "terms": terms})
                        })
                        .collect();
                    write_json(cli, &rows)?;
                }
            }
        }
        TableKind::Norms => {
            let mmax = require(a.mmax, "--mmax", "norms")?;
            ZIndex::new(0, 0, a.beta)?;
            let rows: Vec<(usize, usize, f64)> = (0..=mmax)
                .flat_map(|m| (0..=mmax).map(move |n| (m, n)))
                .map(|(m, n)| (m, n, squared_norm(m, n, a.beta)))
                .collect();
            match format {
                Format::Csv => {
                    let mut out = sink(cli)?;
                    writeln!(out, "m,n,beta,norm")?;
                    for (m, n, c) in rows {
                        writeln!(out, "{m},{n},{},{c}", a.beta)?;
                    }
                    out.flush()?;
                }
                Format::Json => {
                    let rows: Vec<_> = rows
                        .iter()
                        .map(|(m, n, c)| json!({"m": m, "n": n, "beta": a.beta, "norm": c}))
                        .collect();
                    write_json(cli, &rows)?;
                }
            }
        }
        TableKind::Kernel => {
            let n = a.n.unwrap_or(0);
            ZIndex::new(n, n, a.beta)?;
            if a.z.is_empty() {
                return Err(CliError::Usage("table kernel needs at least one --z".into()));
            }
            let mut rows = Vec::new();
            for s in &a.z {
                let z = parse_complex(s)?;
                let trunc = match a.m_max {
                    Some(m) => KernelTruncation::new(n, a.beta, m)?,
                    None => KernelTruncation::auto(n, a.beta, z),
                };
                let brute = kernel(&trunc, z);
                let closed = e_sum_closed(n, a.beta, z.norm_sqr(), SeriesControl::default())?.value;
                rows.push((z, trunc, brute, closed));
            }
            match format {
                Format::Csv => {
                    let mut out = sink(cli)?;
                    writeln!(out, "n,beta,z_re,z_im,truncation,tail_bound,kernel,closed_form")?;
                    for (z, t, k, c) in rows {
                        writeln!(
                            out,
                            "{n},{},{},{},{},{:e},{k},{c}",
                            a.beta, z.re, z.im, t.m_max, t.tail_bound
                        )?;
                    }
                    out.flush()?;
                }
                Format::Json => {
                    let rows: Vec<_> = rows
                        .iter()
                        .map(|(z, t, k, c)| {
                            json!({"n": n, "beta": a.beta, "z": [z.re, z.im], "truncation": t.m_max,
                                   "tail_bound": t.tail_bound, "kernel": k, "closed_form": c})
                        })
                        .collect();
                    write_json(cli, &rows)?;
                }
            }
        }
        TableKind::QuantizeMatrix => {
            let f = require(a.f, "--f", "quantize-matrix")?;
            let n = a.n.unwrap_or(0);
            let m_max = require(a.m_max, "--M", "quantize-matrix")?;
            let m = quantize(f, n, a.beta, m_max)?;
            match format {
                Format::Csv => write_matrix_csv(&m, sink(cli)?)?,
                Format::Json => write_json(cli, &MatrixJson::from(&m))?,
            }
        }
        TableKind::Rule => {
            let rule = match a.kind {
                RuleKind::Laguerre => gauss_laguerre(a.alpha, a.points)?,
                RuleKind::Legendre => gauss_legendre(a.points)?,
                RuleKind::Circle => circle_rule(a.points)?,
            };
            match format {
                Format::Csv => rule.write_csv(sink(cli)?)?,
                Format::Json => write_json(cli, &rule)?,
            }
        }
    }
    Ok(0)
}
