use std::fmt::Write as _;
use std::io::Write as _;

use serde_json::json;

use crate::commands::Outcome;
use crate::Common;

/// 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn to_json(o: &Outcome) -> String {
    let doc = json!({
        "command": o.command,
        "params": o.params,
        "checks": o.report.checks,
        "pass": o.pass,
        "data": o.data,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("report serialises");
    s.push('\n');
    s
}

fn to_text(o: &Outcome) -> String {
    let mut s = format!("respu {}\n", o.command);
    for c in &o.report.checks {
        let flag = if c.pass { "PASS" } else { "FAIL" };
        let _ = writeln!(s, "{flag}  {}  residual={}  tol={}", c.name, fmt_f64(c.residual), fmt_f64(c.tolerance));
    }
    let failed = o.report.failures().count();
    let _ = writeln!(
        s,
        "{} checks, {} failed: {}",
        o.report.checks.len(),
        failed,
        if o.pass { "PASS" } else { "FAIL" }
    );
    s
}

pub fn emit(common: &Common, o: &Outcome) -> Result<(), Box<dyn std::error::Error>> {
    let body = if common.json {
        to_json(o)
    } else if common.csv {
        o.table.to_csv()?
    } else {
        to_text(o)
    };
    match &common.out {
        Some(path) => std::fs::write(path, body)?,
        None => match std::io::stdout().lock().write_all(body.as_bytes()) {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
            other => other?,
        },
    }
    Ok(())
}
