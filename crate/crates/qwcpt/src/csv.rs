//! Versioned CSV exchange format for sweep tables.
//!
//! Layout:
//!
//! ```text
//! # qwcpt-csv v1
//! delta,p11_p22,p33,p44,p33_p44,abs_probe,disp_probe,disp_strong,residual
//! -5.0000000000000000e-1,9.9996e-1,...
//! ```
//!
//! The first column is the sweep axis and carries the swept parameter's
//! name; the remaining columns are fixed. Values are written with 17
//! significant digits, so a write/read cycle reproduces every finite
//! binary64 value bit for bit.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::observables::ObservableRow;
use crate::sweep::SweepResult;

pub const CSV_MAGIC: &str = "# qwcpt-csv v1";

const COLUMNS: [&str; 8] = [
    "p11_p22",
    "p33",
    "p44",
    "p33_p44",
    "abs_probe",
    "disp_probe",
    "disp_strong",
    "residual",
];

/// In-memory form of one CSV file.
#[derive(Debug, Clone)]
pub struct CsvTable {
    pub axis_name: String,
    pub axis: Vec<f64>,
    pub rows: Vec<ObservableRow>,
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write a sweep table with the given axis name.
pub fn write_table(axis_name: &str, axis: &[f64], rows: &[ObservableRow], w: &mut dyn Write) -> Result<()> {
    if axis.len() != rows.len() {
        return Err(Error::InvalidParams(format!(
            "axis and row counts differ: {} vs {}",
            axis.len(),
            rows.len()
        )));
    }
    writeln!(w, "{CSV_MAGIC}")?;
    writeln!(w, "{axis_name},{}", COLUMNS.join(","))?;
    for (x, r) in axis.iter().zip(rows) {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            fmt(*x),
            fmt(r.p11_p22),
            fmt(r.p33),
            fmt(r.p44),
            fmt(r.p33_p44),
            fmt(r.absorption_probe),
            fmt(r.dispersion_probe),
            fmt(r.dispersion_strong),
            fmt(r.residual_inf),
        )?;
    }
    Ok(())
}

/// Write a solved sweep; the axis column is named after the swept parameter.
pub fn write_csv(result: &SweepResult, w: &mut dyn Write) -> Result<()> {
    write_table(result.spec.param.as_str(), &result.axis, &result.rows, w)
}

fn parse_field(field: &str, line_no: usize) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Format(format!("line {line_no}: invalid number {field:?}")))
}

/// Read a v1 CSV table back.
pub fn read_csv(r: impl BufRead) -> Result<CsvTable> {
    let mut lines = r.lines().enumerate();

    let (_, first) = lines
        .next()
        .ok_or_else(|| Error::Format("empty input, expected version header".into()))?;
    let first = first?;
    if first.trim_end_matches('\r') != CSV_MAGIC {
        return Err(Error::Format(format!(
            "line 1: expected version header {CSV_MAGIC:?}, found {:?}",
            first.trim_end_matches('\r')
        )));
    }

    let (_, second) = lines
        .next()
        .ok_or_else(|| Error::Format("missing column header".into()))?;
    let second = second?;
    let header: Vec<&str> = second.trim_end_matches('\r').split(',').collect();
    if header.len() != 9 || header[1..] != COLUMNS {
        return Err(Error::Format(format!(
            "line 2: expected columns <axis>,{}, found {:?}",
            COLUMNS.join(","),
            second.trim_end_matches('\r')
        )));
    }
    let axis_name = header[0].to_string();

    let mut axis = Vec::new();
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            return Err(Error::Format(format!("line {line_no}: unexpected blank line")));
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(Error::Format(format!(
                "line {line_no}: expected 9 fields, found {}",
                fields.len()
            )));
        }
        axis.push(parse_field(fields[0], line_no)?);
        rows.push(ObservableRow {
            p11_p22: parse_field(fields[1], line_no)?,
            p33: parse_field(fields[2], line_no)?,
            p44: parse_field(fields[3], line_no)?,
            p33_p44: parse_field(fields[4], line_no)?,
            absorption_probe: parse_field(fields[5], line_no)?,
            dispersion_probe: parse_field(fields[6], line_no)?,
            dispersion_strong: parse_field(fields[7], line_no)?,
            residual_inf: parse_field(fields[8], line_no)?,
        });
    }
    Ok(CsvTable { axis_name, axis, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::BufReader;

    fn sample_rows() -> (Vec<f64>, Vec<ObservableRow>) {
        let axis = vec![-0.5, 0.0, 0.5];
        let rows = vec![
            ObservableRow {
                p11_p22: 0.9999,
                p33: 1.2e-5,
                p44: 3.4e-5,
                p33_p44: 4.6e-5,
                absorption_probe: -0.06,
                dispersion_probe: 0.01,
                dispersion_strong: -0.02,
                residual_inf: 1e-14,
            },
            ObservableRow {
                p11_p22: 1.0,
                p33: 0.0,
                p44: 0.0,
                p33_p44: 0.0,
                absorption_probe: 0.0,
                dispersion_probe: 0.0,
                dispersion_strong: 0.0,
                residual_inf: f64::NAN,
            },
            ObservableRow {
                p11_p22: 0.123456789012345678,
                p33: std::f64::consts::PI * 1e-7,
                p44: f64::MIN_POSITIVE,
                p33_p44: -0.0,
                absorption_probe: 1.0 / 3.0,
                dispersion_probe: -2.0 / 3.0,
                dispersion_strong: 1e300,
                residual_inf: 5e-324,
            },
        ];
        (axis, rows)
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let (axis, rows) = sample_rows();
        let mut buf = Vec::new();
        write_table("delta", &axis, &rows, &mut buf).unwrap();
        let t = read_csv(BufReader::new(buf.as_slice())).unwrap();
        assert_eq!(t.axis_name, "delta");
        assert_eq!(t.axis, axis);
        for (a, b) in t.rows.iter().zip(&rows) {
            for (x, y) in [
                (a.p11_p22, b.p11_p22),
                (a.p33, b.p33),
                (a.p44, b.p44),
                (a.p33_p44, b.p33_p44),
                (a.absorption_probe, b.absorption_probe),
                (a.dispersion_probe, b.dispersion_probe),
                (a.dispersion_strong, b.dispersion_strong),
                (a.residual_inf, b.residual_inf),
            ] {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn header_and_shape_are_enforced() {
        let (axis, rows) = sample_rows();
        let mut buf = Vec::new();
        write_table("delta", &axis, &rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();

        let bad = text.replacen("v1", "v2", 1);
        assert!(matches!(read_csv(BufReader::new(bad.as_bytes())), Err(Error::Format(_))));

        let bad = text.replacen("p33_p44", "p34", 1);
        assert!(matches!(read_csv(BufReader::new(bad.as_bytes())), Err(Error::Format(_))));

        let mut bad = text.clone();
        bad.push_str("1,2,3\n");
        match read_csv(BufReader::new(bad.as_bytes())) {
            Err(Error::Format(msg)) => assert!(msg.contains("line 6"), "{msg}"),
            other => panic!("expected Format, got {other:?}"),
        }

        let bad = format!("{CSV_MAGIC}\ndelta,{}\nabc,1,2,3,4,5,6,7,8\n", super::COLUMNS.join(","));
        match read_csv(BufReader::new(bad.as_bytes())) {
            Err(Error::Format(msg)) => {
                assert!(msg.contains("invalid number"), "{msg}");
                assert!(msg.contains("line 3"), "{msg}");
            }
            other => panic!("expected Format, got {other:?}"),
        }

        assert!(matches!(read_csv(BufReader::new(&b""[..])), Err(Error::Format(_))));
    }

    #[test]
    fn axis_row_mismatch_is_rejected() {
        let (axis, rows) = sample_rows();
        let mut buf = Vec::new();
        assert!(write_table("delta", &axis[..2], &rows, &mut buf).is_err());
    }
}
