use std::fs::File;
use std::io::{self, BufWriter, Write};

use crate::args::Cli;
use crate::CliError;

/// Stdout, or the `--out` file.
pub fn sink(cli: &Cli) -> Result<Box<dyn Write>, CliError> {
    Ok(match &cli.out {
        Some(path) => {
            let f = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            Box::new(BufWriter::new(f))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_json<T: serde::Serialize>(cli: &Cli, value: &T) -> Result<(), CliError> {
    let mut out = sink(cli)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

/// Parses `x0,x1,x2,x3`.
pub fn parse_quaternion(s: &str) -> Result<laguerre2d::Quaternion, CliError> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("quaternion '{s}': {e}")))?;
    match parts[..] {
        [a, b, c, d] => Ok(laguerre2d::Quaternion::new(a, b, c, d)),
        _ => Err(CliError::Usage(format!(
            "quaternion '{s}' needs four comma-separated components"
        ))),
    }
}

/// Parses `a+bi`, `a`, `bi`.
pub fn parse_complex(s: &str) -> Result<num_complex::Complex64, CliError> {
    s.trim()
        .replace(' ', "")
        .parse::<num_complex::Complex64>()
        .map_err(|_| CliError::Usage(format!("complex number '{s}' (expected a+bi)")))
}

pub fn fmt_complex(z: num_complex::Complex64) -> String {
    if z.im.is_sign_negative() && z.im != 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im.abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_points() {
        assert_eq!(
            parse_complex("0.7+0.3i").unwrap(),
            num_complex::Complex64::new(0.7, 0.3)
        );
        assert_eq!(parse_complex("-2i").unwrap(), num_complex::Complex64::new(0.0, -2.0));
        assert_eq!(
            parse_complex(" 1 - 1i").unwrap(),
            num_complex::Complex64::new(1.0, -1.0)
        );
        assert!(parse_complex("1+").is_err());
        let q = parse_quaternion("1, -2, 0.5, 3").unwrap();
        assert_eq!(q.components(), [1.0, -2.0, 0.5, 3.0]);
        assert!(parse_quaternion("1,2,3").is_err());
        assert_eq!(fmt_complex(num_complex::Complex64::new(1.0, -0.5)), "1-0.5i");
    }
}
