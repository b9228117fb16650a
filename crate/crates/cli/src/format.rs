//! Number formatting and the CSV layouts written by the CLI.
//!
//! Every file uses `.` as the decimal separator, `,` between fields and LF
//! line endings. Numbers carry at most 12 significant digits.

use std::io::{self, BufRead, Write};

use cascade_core::{make_grid, AmplitudeGrid2D, AmplitudeGrid3D, Complex64, GridSpec, Photon, SchmidtResult};
use ndarray::Array2;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Shortest decimal spelling of `x` rounded to 12 significant digits;
/// scientific notation outside `[1e-6, 1e15)`.
pub fn fmt_num(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 {
        return "0".into();
    }
    let a = r.abs();
    if (1e-6..1e15).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

pub const GRID_HEADER: &str = "axis1,axis2,re,im,abs";
pub const VOLUME_HEADER: &str = "axis1,axis2,axis3,abs_normalized";

pub fn write_grid_csv(grid: &AmplitudeGrid2D, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "{GRID_HEADER}")?;
    for (j, &x) in grid.axis.iter().enumerate() {
        for (k, &y) in grid.axis.iter().enumerate() {
            let v = grid.values[[j, k]];
            writeln!(
                out,
                "{},{},{},{},{}",
                fmt_num(x),
                fmt_num(y),
                fmt_num(v.re),
                fmt_num(v.im),
                fmt_num(v.norm())
            )?;
        }
    }
    out.flush()
}

fn bad(line: usize, msg: impl std::fmt::Display) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, format!("line {line}: {msg}"))
}

/// Reads a grid written by [`write_grid_csv`]. The rows must cover a square,
/// uniform, symmetric grid in row-major order; `axes` names the two photons.
pub fn read_grid_csv(input: impl BufRead, axes: [Photon; 2]) -> io::Result<AmplitudeGrid2D> {
    let mut lines = input.lines();
    match lines.next() {
        Some(Ok(h)) if h.trim_end() == GRID_HEADER => {}
        Some(Ok(h)) => return Err(bad(1, format!("expected header `{GRID_HEADER}`, got `{h}`"))),
        Some(Err(e)) => return Err(e),
        None => return Err(bad(1, "empty file")),
    }
    let mut rows: Vec<[f64; 4]> = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line?;
        let lineno = idx + 2;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(bad(lineno, format!("expected 5 fields, got {}", fields.len())));
        }
        let mut row = [0.0; 4];
        for (slot, field) in row.iter_mut().zip(&fields[..4]) {
            *slot = field
                .trim()
                .parse()
                .map_err(|_| bad(lineno, format!("`{field}` is not a number")))?;
        }
        rows.push(row);
    }
    let n = (rows.len() as f64).sqrt().round() as usize;
    if n < 2 || n * n != rows.len() {
        return Err(bad(0, format!("{} rows do not form a square grid", rows.len())));
    }
    let half_width = rows[n * n - 1][0];
    let spec = GridSpec::new(half_width, n, axes.to_vec());
    let axis = make_grid(&spec).map_err(|e| bad(0, e))?;
    let tol = 1e-9 * half_width.abs();
    let mut values = Array2::<Complex64>::zeros((n, n));
    for (r, row) in rows.iter().enumerate() {
        let (j, k) = (r / n, r % n);
        if (row[0] - axis[j]).abs() > tol || (row[1] - axis[k]).abs() > tol {
            return Err(bad(r + 2, "detunings do not match a uniform symmetric grid"));
        }
        values[[j, k]] = Complex64::new(row[2], row[3]);
    }
    AmplitudeGrid2D::from_values(spec, values).map_err(|e| bad(0, e))
}

/// Normalized modulus of a volume, one row per cell.
pub fn write_volume_csv(volume: &AmplitudeGrid3D, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "{VOLUME_HEADER}")?;
    let modulus = volume.normalized_modulus();
    let labels: Vec<String> = volume.axis.iter().map(|&x| fmt_num(x)).collect();
    for ((a, b, c), v) in modulus.indexed_iter() {
        writeln!(out, "{},{},{},{}", labels[a], labels[b], labels[c], fmt_num(*v))?;
    }
    out.flush()
}

/// Mode intensities `|psi_n|^2` and `|phi_n|^2` of the first `count` modes.
pub fn write_modes_csv(result: &SchmidtResult, count: usize, mut out: impl Write) -> io::Result<()> {
    let m = count.min(result.retained_modes());
    let mut header = vec!["axis".to_owned()];
    for n in 1..=m {
        header.push(format!("psi{n}_abs2"));
        header.push(format!("phi{n}_abs2"));
    }
    writeln!(out, "{}", header.join(","))?;
    for (j, &x) in result.axis.iter().enumerate() {
        let mut row = vec![fmt_num(x)];
        for n in 0..m {
            row.push(fmt_num(result.modes_psi[[j, n]].norm_sqr()));
            row.push(fmt_num(result.modes_phi[[j, n]].norm_sqr()));
        }
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_spelling() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(0.25), "0.25");
        assert_eq!(fmt_num(-200.0), "-200");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(2.0 / 3.0), "0.666666666667");
        assert_eq!(fmt_num(1.5e-9), "1.5e-9");
        assert_eq!(fmt_num(123456789.0123456), "123456789.012");
        assert_eq!(fmt_num(2e20), "2e20");
    }

    #[test]
    fn spelled_numbers_parse_back_at_twelve_digits() {
        for x in [std::f64::consts::PI, -1.234567890123456e-7, 9.87654321e13, 0.1 + 0.2] {
            let back: f64 = fmt_num(x).parse().unwrap();
            assert!(((back - x) / x).abs() < 1e-11, "{x} -> {back}");
        }
    }

    #[test]
    fn malformed_grid_csv() {
        let axes = [Photon::S, Photon::I];
        assert!(read_grid_csv("x,y\n".as_bytes(), axes).is_err());
        assert!(read_grid_csv(format!("{GRID_HEADER}\n1,2,3\n").as_bytes(), axes).is_err());
        let three_rows = format!("{GRID_HEADER}\n-1,-1,1,0,1\n-1,1,1,0,1\n1,-1,1,0,1\n");
        assert!(read_grid_csv(three_rows.as_bytes(), axes).is_err());
        let ok = format!("{GRID_HEADER}\n-1,-1,1,0,1\n-1,1,0,1,1\n1,-1,1,0,1\n1,1,2,0,2\n");
        let g = read_grid_csv(ok.as_bytes(), axes).unwrap();
        assert_eq!(g.values[[0, 1]], Complex64::new(0.0, 1.0));
        assert_eq!(g.spec.half_width, 1.0);
    }
}
