use crate::config::RunConfig;
use crate::error::CliResult;
use serde::Serialize;
use std::io::Write;
use std::path::Path;

/// `printf("%.12e")`.
pub fn fmt_e(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{v:.12e}");
    let (mant, exp) = s.split_once('e').unwrap_or((&s, "0"));
    let exp: i32 = exp.parse().unwrap_or(0);
    format!("{mant}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
}

#[derive(Serialize)]
pub struct Artifact<'a, T: Serialize> {
    pub command: &'a str,
    pub seed: u64,
    pub config: &'a RunConfig,
    pub result: T,
}

/// Writes JSON to `path`, or to stdout.
pub fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value)?;
    match path {
        Some(p) => std::fs::write(p, text + "\n")?,
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}")?;
        }
    }
    Ok(())
}

/// Numeric table; the first line is a `#` comment holding the resolved config.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, mut w: W, command: &str, config: &RunConfig) -> CliResult<()> {
        let meta = serde_json::json!({ "command": command, "seed": config.seed, "config": config });
        writeln!(w, "# {}", serde_json::to_string(&meta)?)?;
        let mut cw = csv::Writer::from_writer(w);
        cw.write_record(&self.header)?;
        for r in &self.rows {
            cw.write_record(r.iter().map(|v| fmt_e(*v)))?;
        }
        cw.flush()?;
        Ok(())
    }

    pub fn write_to(&self, path: Option<&Path>, command: &str, config: &RunConfig) -> CliResult<()> {
        match path {
            Some(p) => self.write(std::io::BufWriter::new(std::fs::File::create(p)?), command, config),
            None => self.write(std::io::stdout().lock(), command, config),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_style_exponent() {
        assert_eq!(fmt_e(1.0), "1.000000000000e+00");
        assert_eq!(fmt_e(-2.5e-7), "-2.500000000000e-07");
        assert_eq!(fmt_e(6.02e123), "6.020000000000e+123");
        assert_eq!(fmt_e(0.0), "0.000000000000e+00");
        assert_eq!(fmt_e(f64::NAN), "nan");
    }

    #[test]
    fn table_carries_config_line() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![1.0, 2.0]);
        let mut buf = Vec::new();
        t.write(&mut buf, "kernel", &RunConfig::default()).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let mut lines = s.lines();
        assert!(lines.next().unwrap().starts_with("# {"));
        assert_eq!(lines.next().unwrap(), "a,b");
        assert_eq!(lines.next().unwrap(), "1.000000000000e+00,2.000000000000e+00");
    }
}
