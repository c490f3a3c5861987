use std::io::Write;

use laguerre2d::construct2d::{z_eval_1f1, z_eval_2f0, z_eval_radial};
use laguerre2d::quaternion::sandwich_eval;
use laguerre2d::{z_poly, Quaternion, ZIndex};
use num_complex::Complex64;
use serde_json::json;

use crate::args::{Cli, EvalArgs, Format};
use crate::output::{fmt_complex, parse_complex, parse_quaternion, sink, write_json};
use crate::CliError;

fn fmt_quaternion(q: Quaternion) -> String {
    format!("{},{},{},{}", q.x0, q.x1, q.x2, q.x3)
}

pub fn run(cli: &Cli, a: &EvalArgs) -> Result<u8, CliError> {
    let idx = ZIndex::new(a.m, a.n, a.beta)?;
    let poly = z_poly(idx);
    let mut paths: Vec<(&str, Vec<f64>)> = Vec::new();
    let (point, value) = if let Some(q) = &a.q {
        let q = parse_quaternion(q)?;
        let v = sandwich_eval(idx, q);
        paths.push(("sandwich", v.components().to_vec()));
        paths.push(("monomial", poly.eval_quaternion(q)?.components().to_vec()));
        (q.components().to_vec(), v.components().to_vec())
    } else {
        let z = parse_complex(a.z.as_deref().unwrap_or_default())?;
        let v = z_eval_1f1(idx, z);
        let pair = |c: Complex64| vec![c.re, c.im];
        paths.push(("1f1", pair(v)));
        paths.push(("monomial", pair(poly.eval_complex(z)?)));
        paths.push(("radial", pair(z_eval_radial(idx, z))));
        if let Ok(w) = z_eval_2f0(idx, z) {
            paths.push(("2f0", pair(w)));
        }
        (pair(z), pair(v))
    };
    let spread = paths
        .iter()
        .flat_map(|(_, p)| p.iter().zip(&value).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max);

    match cli.format {
        Some(Format::Json) => {
            let mut doc = json!({"m": a.m, "n": a.n, "beta": a.beta, "point": point, "value": value});
            if a.dual_path {
                doc["paths"] = paths.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
                doc["max_difference"] = json!(spread);
            }
            write_json(cli, &doc)?;
        }
        Some(Format::Csv) => {
            let mut out = sink(cli)?;
            writeln!(out, "path,{}", if value.len() == 4 { "x0,x1,x2,x3" } else { "re,im" })?;
            let rows: Vec<_> = if a.dual_path {
                paths.clone()
            } else {
                vec![("value", value.clone())]
            };
            for (k, v) in rows {
                let cells: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                writeln!(out, "{k},{}", cells.join(","))?;
            }
            out.flush()?;
        }
        None => {
            let show = |v: &[f64]| {
                if v.len() == 4 {
                    fmt_quaternion(Quaternion::new(v[0], v[1], v[2], v[3]))
                } else {
                    fmt_complex(Complex64::new(v[0], v[1]))
                }
            };
            let mut out = sink(cli)?;
            writeln!(out, "{}", show(&value))?;
            if a.dual_path {
                for (k, v) in &paths {
                    writeln!(out, "  {k:<9} {}", show(v))?;
                }
                writeln!(out, "  max difference {spread:e}")?;
            }
            out.flush()?;
        }
    }
    Ok(0)
}
