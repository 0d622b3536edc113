//! Artifact tables with fixed 17-significant-digit formatting, so identical runs
//! produce byte-identical files.

use std::path::Path;

use crate::error::CliError;

/// `printf("%.17g")`.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.into();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        trim_zeros(format!("{:.*}", (16 - exp) as usize, x))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Named numeric table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(file: &str, header: &[&str]) -> Self {
        Self { file: file.into(), header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let path = dir.join(&self.file);
        let io = |e: std::io::Error| CliError::Io { path: path.display().to_string(), source: e };
        let mut w = csv::Writer::from_path(&path).map_err(|e| io(e.into()))?;
        w.write_record(&self.header).map_err(|e| io(e.into()))?;
        for row in &self.rows {
            w.write_record(row.iter().map(|&x| fmt_g17(x))).map_err(|e| io(e.into()))?;
        }
        w.flush().map_err(io)
    }
}

/// `trace.csv`: `t, re_c1, im_c1, ..., re_cN, im_cN, survival`.
pub fn trace_table(times: &[f64], amplitudes: &[Vec<num_complex::Complex<f64>>]) -> Table {
    let n = amplitudes.first().map_or(0, Vec::len);
    let mut header = vec!["t".to_string()];
    for a in 1..=n {
        header.push(format!("re_c{a}"));
        header.push(format!("im_c{a}"));
    }
    header.push("survival".into());
    let mut table = Table { file: "trace.csv".into(), header, rows: Vec::with_capacity(times.len()) };
    for (t, c) in times.iter().zip(amplitudes) {
        let mut row = vec![*t];
        row.extend(c.iter().flat_map(|z| [z.re, z.im]));
        row.push(c.iter().map(|z| z.norm_sqr()).sum());
        table.rows.push(row);
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g17() {
        assert_eq!(fmt_g17(0.1), "0.10000000000000001");
        assert_eq!(fmt_g17(1.0), "1");
        assert_eq!(fmt_g17(-2.5), "-2.5");
        assert_eq!(fmt_g17(1e-5), "1.0000000000000001e-05");
        assert_eq!(fmt_g17(1.5e20), "1.5e+20");
        assert_eq!(fmt_g17(123456.0), "123456");
        assert_eq!(fmt_g17(0.0001), "0.0001");
        assert_eq!(fmt_g17(std::f64::consts::PI), "3.1415926535897931");
        assert_eq!(fmt_g17(1e16), "10000000000000000");
        assert_eq!(fmt_g17(1e17), "1e+17");
    }
}
