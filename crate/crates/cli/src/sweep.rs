//! Forward map over a CSV file, one weight vector per row.

use std::f64::consts::PI;

use polymod::combinatorics::{validate_weight_with, Marking};
use polymod::moduli::{classify_hexahedron_with, controlling_sums, psi5, psi6};
use rayon::prelude::*;

use crate::commands::thread_pool;
use crate::config::RunConfig;
use crate::error::{exit, CliError};
use crate::parse::parse_angle;
use crate::SweepArgs;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn sign(x: f64, band: f64) -> &'static str {
    if x.abs() <= band {
        "0"
    } else if x > 0.0 {
        "+"
    } else {
        "-"
    }
}

fn header(n: usize) -> Vec<String> {
    let mut h = vec!["row".to_string()];
    h.extend((1..=n).map(|i| format!("theta{i}")));
    if n == 5 {
        h.extend(["P", "Q"].map(String::from));
    } else {
        h.extend(["P", "Q", "R", "type", "sign_P", "sign_Q", "sign_R"].map(String::from));
    }
    h
}

/// Output fields for one input row, or the diagnostic for a bad row.
fn process(fields: &[String], n: usize, m: &Marking, config: &RunConfig) -> Result<Vec<String>, String> {
    let angles = fields.iter().map(|f| parse_angle(f)).collect::<Result<Vec<f64>, String>>()?;
    if angles.len() != n {
        return Err(format!("DimensionMismatch: expected {n} angles, got {}", angles.len()));
    }
    let theta = validate_weight_with(&angles, config.tol_sum).map_err(|e| format!("{}: {e}", e.kind()))?;
    let mut out: Vec<String> = theta.angles().iter().map(|&a| num(a)).collect();
    if n == 5 {
        let s = psi5(&theta, m).map_err(|e| format!("{}: {e}", e.kind()))?;
        out.extend([num(s.p), num(s.q)]);
    } else {
        let s = psi6(&theta, m).map_err(|e| format!("{}: {e}", e.kind()))?;
        let t = classify_hexahedron_with(&s, config.tol_ideal);
        out.extend(s.params().map(num));
        out.push(t.letter.to_string());
        out.extend(controlling_sums(&theta, m).map(|x| sign(x - PI, config.tol_ideal).to_string()));
    }
    Ok(out)
}

/// Whether a first row holds column names rather than angles.
fn is_header(fields: &[String]) -> bool {
    !fields.is_empty() && fields.iter().all(|f| parse_angle(f).is_err())
}

pub fn sweep(config: &RunConfig, a: &SweepArgs) -> Result<i32, CliError> {
    if a.n != 5 && a.n != 6 {
        return Err(CliError::input("UnsupportedSize", format!("n must be 5 or 6, got {}", a.n)));
    }
    let m = Marking::parse(&a.label)?;
    if m.n() != a.n {
        return Err(CliError::input("DimensionMismatch", format!("label {m} has {} points, expected {}", m.n(), a.n)));
    }
    let unreadable = |e: &dyn std::fmt::Display| CliError::input("UnreadableInput", format!("{}: {e}", a.input.display()));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(&a.input)
        .map_err(|e| unreadable(&e))?;
    let mut rows: Vec<(u64, Result<Vec<String>, String>)> = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = rec.as_ref().ok().and_then(|r| r.position()).map(|p| p.line()).unwrap_or(i as u64 + 1);
        match rec {
            Ok(r) => {
                let fields: Vec<String> = r.iter().map(String::from).collect();
                if i == 0 && is_header(&fields) {
                    continue;
                }
                rows.push((line, Ok(fields)));
            }
            Err(e) => rows.push((line, Err(format!("CsvError: {e}")))),
        }
    }
    let pool = thread_pool(a.jobs.unwrap_or(config.jobs))?;
    let results: Vec<(u64, Result<Vec<String>, String>)> = pool.install(|| {
        rows.into_par_iter()
            .map(|(line, fields)| (line, fields.and_then(|f| process(&f, a.n, &m, config))))
            .collect()
    });

    let mut w = csv::Writer::from_writer(Vec::new());
    let out_err = |e: csv::Error| CliError::new(exit::FAILURES, "OutputError", e.to_string());
    w.write_record(header(a.n)).map_err(out_err)?;
    let (mut ok, mut skipped) = (0, 0);
    for (line, r) in results {
        match r {
            Ok(fields) => {
                let mut record = vec![line.to_string()];
                record.extend(fields);
                w.write_record(&record).map_err(out_err)?;
                ok += 1;
            }
            Err(msg) => {
                eprintln!("row {line}: {msg}");
                skipped += 1;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::new(exit::FAILURES, "OutputError", e.to_string()))?;
    match &a.out {
        Some(path) => std::fs::write(path, &bytes)
            .map_err(|e| CliError::input("UnwritableOutput", format!("{}: {e}", path.display())))?,
        None => crate::write_stdout(&String::from_utf8_lossy(&bytes)),
    }
    eprintln!("sweep: {ok} rows written, {skipped} skipped");
    Ok(exit::OK)
}
