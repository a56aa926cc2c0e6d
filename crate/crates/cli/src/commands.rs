use polymod::combinatorics::{Marking, WeightVector};
use polymod::complex::{build_complex, cusp_classes, euler_characteristic, export_adjacency, singular_edges, ExportFormat};
use polymod::fiber::{hexahedron_pair, invert5, invert6, pentagon_pair, recover_w5, recover_w6};
use polymod::moduli::{classify_hexahedron_with, controlling_sums, pentagon_side_lengths, psi5, psi6, HexahedronShape, PentagonShape};
use polymod::verify::{parse_suites, run_suites};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::{exit, CliError};
use crate::parse::{parse_shape, parse_theta};
use crate::{ComplexArgs, ForwardArgs, InvertArgs, VerifyArgs};

fn check_n(n: usize) -> Result<(), CliError> {
    if n == 5 || n == 6 {
        Ok(())
    } else {
        Err(CliError::input("UnsupportedSize", format!("n must be 5 or 6, got {n}")))
    }
}

/// Prints `body` with schema and version fields added.
pub fn emit(schema: &str, mut body: Value) -> Result<(), CliError> {
    body["schema"] = json!(schema);
    body["version"] = json!(env!("CARGO_PKG_VERSION"));
    let text = polymod::json::to_string(&body).map_err(|e| CliError::new(exit::FAILURES, "OutputError", e.to_string()))?;
    crate::write_stdout(&(text + "\n"));
    Ok(())
}

fn marking_for(text: &str, n: usize) -> Result<Marking, CliError> {
    let m = Marking::parse(text)?;
    if m.n() != n {
        return Err(CliError::input("DimensionMismatch", format!("label {m} has {} points, expected {n}", m.n())));
    }
    Ok(m)
}

fn pair_name(m: &Marking, j: usize) -> String {
    format!("({}{})", m.point(j), m.point(j + 1))
}

pub fn forward(config: &RunConfig, a: &ForwardArgs) -> Result<i32, CliError> {
    check_n(a.n)?;
    let theta = parse_theta(&a.theta, a.n, config.tol_sum)?;
    let m = marking_for(&a.label, a.n)?;
    let tol_ideal = a.tol_ideal.unwrap_or(config.tol_ideal);
    let body = if a.n == 5 {
        let s = psi5(&theta, &m)?;
        let names: Vec<String> = [0, 2, 4, 1, 3].iter().map(|&j| pair_name(&m, j)).collect();
        json!({
            "n": 5,
            "label": m.to_string(),
            "theta": theta.angles(),
            "shape": {"P": s.p, "Q": s.q},
            "admissible": s.is_admissible(),
            "sides": {
                "names": names,
                "lengths": pentagon_side_lengths(&s),
                "axis": {"P": names[0], "Q": names[1]},
            },
        })
    } else {
        let s = psi6(&theta, &m)?;
        let t = classify_hexahedron_with(&s, tol_ideal);
        let sums = controlling_sums(&theta, &m);
        json!({
            "n": 6,
            "label": m.to_string(),
            "theta": theta.angles(),
            "shape": {"P": s.p, "Q": s.q, "R": s.r},
            "folded": {"p": s.folded()[0], "q": s.folded()[1], "r": s.folded()[2]},
            "ideal": {"P": t.ideal[0], "Q": t.ideal[1], "R": t.ideal[2]},
            "classification": t,
            "triple_sums": {"P": sums[0], "Q": sums[1], "R": sums[2]},
        })
    };
    emit("polymod-forward/1", body)?;
    Ok(exit::OK)
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

pub fn invert(a: &InvertArgs) -> Result<i32, CliError> {
    check_n(a.n)?;
    let k = a.n - 3;
    let v1 = parse_shape(&a.shape1, k)?;
    let v2 = parse_shape(&a.shape2, k)?;
    let (w, theta, residual): (_, WeightVector, f64) = if a.n == 5 {
        let (s1, s2) = (PentagonShape { p: v1[0], q: v1[1] }, PentagonShape { p: v2[0], q: v2[1] });
        let w = recover_w5(&s1, &s2)?;
        let theta = invert5(&s1, &s2)?;
        let (m1, m2) = pentagon_pair();
        let (f1, f2) = (psi5(&theta, &m1)?, psi5(&theta, &m2)?);
        let residual = max_diff(&[f1.p, f1.q, f2.p, f2.q], &[s1.p, s1.q, s2.p, s2.q]);
        (w, theta, residual)
    } else {
        let s1 = HexahedronShape { p: v1[0], q: v1[1], r: v1[2] };
        let s2 = HexahedronShape { p: v2[0], q: v2[1], r: v2[2] };
        let w = recover_w6(&s1, &s2)?;
        let theta = invert6(&s1, &s2)?;
        let (m1, m2) = hexahedron_pair();
        let (f1, f2) = (psi6(&theta, &m1)?, psi6(&theta, &m2)?);
        let got: Vec<f64> = f1.params().into_iter().chain(f2.params()).collect();
        let given: Vec<f64> = v1.iter().chain(&v2).copied().collect();
        (w, theta, max_diff(&got, &given))
    };
    emit(
        "polymod-invert/1",
        json!({
            "n": a.n,
            "w": [w.value().re, w.value().im],
            "theta": theta.angles(),
            "residual": residual,
        }),
    )?;
    Ok(exit::OK)
}

pub fn complex(config: &RunConfig, a: &ComplexArgs) -> Result<i32, CliError> {
    check_n(a.n)?;
    let theta = match &a.theta {
        Some(t) => parse_theta(t, a.n, config.tol_sum)?,
        None => WeightVector::equal(a.n),
    };
    let format: ExportFormat = a.format.as_deref().unwrap_or(&config.format).parse()?;
    let c = build_complex(a.n, &theta)?;
    let label = |cell: usize| c.cells()[cell].to_string();
    let schema = polymod::complex::SCHEMA;
    let csv_only = |what: &str| {
        if format == ExportFormat::Csv {
            Err(CliError::input("UnknownFormat", format!("the {what} report is JSON only")))
        } else {
            Ok(())
        }
    };
    match a.report.as_str() {
        "euler" => {
            csv_only("euler")?;
            let chi = euler_characteristic(&c)?;
            emit(
                schema,
                json!({
                    "report": "euler",
                    "n": a.n,
                    "theta": theta.angles(),
                    "V": c.corner_classes().len(),
                    "E": c.pairings().len(),
                    "F": c.cells().len(),
                    "chi": chi,
                }),
            )?;
        }
        "cusps" => {
            csv_only("cusps")?;
            let cusps = cusp_classes(&c)?;
            let table: Vec<Value> = cusps
                .iter()
                .map(|k| {
                    let mut labels: Vec<String> = k.incidences.iter().map(|i| label(i.cell)).collect();
                    labels.sort();
                    labels.dedup();
                    json!({"partition": k.partition, "size": k.incidences.len(), "labels": labels})
                })
                .collect();
            emit(schema, json!({"report": "cusps", "n": a.n, "classes": cusps.len(), "table": table}))?;
        }
        "pairings" => match format {
            ExportFormat::Csv => crate::write_stdout(&export_adjacency(&c, ExportFormat::Csv)?),
            ExportFormat::Json => {
                let rows: Vec<Value> = c
                    .pairings()
                    .iter()
                    .map(|p| {
                        json!({
                            "key": p.key,
                            "a": {"cell": p.a.cell, "label": label(p.a.cell), "facet": p.a.facet},
                            "b": {"cell": p.b.cell, "label": label(p.b.cell), "facet": p.b.facet},
                        })
                    })
                    .collect();
                emit(schema, json!({"report": "pairings", "n": a.n, "count": rows.len(), "pairings": rows}))?;
            }
        },
        "singular" => {
            csv_only("singular")?;
            let edges = singular_edges(&c)?;
            let table: Vec<Value> = edges
                .iter()
                .map(|e| {
                    let corners: Vec<Value> =
                        e.corners.iter().map(|k| json!({"label": label(k.cell), "facets": k.facets})).collect();
                    json!({"key": e.key, "cone_angle": e.cone_angle, "dihedrals": e.dihedrals, "corners": corners})
                })
                .collect();
            emit(
                schema,
                json!({"report": "singular", "n": a.n, "theta": theta.angles(), "count": edges.len(), "edges": table}),
            )?;
        }
        "adjacency" => match format {
            ExportFormat::Json => crate::write_stdout(&(export_adjacency(&c, format)? + "\n")),
            ExportFormat::Csv => crate::write_stdout(&export_adjacency(&c, format)?),
        },
        other => return Err(CliError::input("UnknownReport", format!("unknown report {other:?}"))),
    }
    Ok(exit::OK)
}

pub fn verify(config: &RunConfig, a: &VerifyArgs) -> Result<i32, CliError> {
    let suites = parse_suites(&a.suite).map_err(|m| CliError::input("UnknownSuite", m))?;
    let ns = match a.n {
        Some(n) => {
            check_n(n)?;
            vec![n]
        }
        None => vec![5, 6],
    };
    let samples = a.samples.unwrap_or(config.samples);
    let seed = a.seed.unwrap_or(config.seed);
    let tol = a.tol.unwrap_or(config.tol_roundtrip);
    if !(tol > 0.0) {
        return Err(CliError::input("ConfigError", format!("tol must be positive, got {tol}")));
    }
    let pool = thread_pool(a.jobs.unwrap_or(config.jobs))?;
    let report = pool.install(|| run_suites(&suites, &ns, samples, seed, tol));
    let text = polymod::json::to_string(&report).map_err(|e| CliError::new(exit::FAILURES, "OutputError", e.to_string()))?;
    crate::write_stdout(&(text + "\n"));
    for s in &report.suites {
        eprintln!(
            "{} n={}: {} ({} checks, {} failures, max error {:e})",
            s.suite,
            s.n,
            if s.passed() { "ok" } else { "FAILED" },
            s.checks,
            s.failures.len(),
            s.max_error
        );
    }
    Ok(if report.passed { exit::OK } else { exit::FAILURES })
}

pub fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool, CliError> {
    if jobs == 0 {
        return Err(CliError::input("ConfigError", "jobs must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::new(exit::FAILURES, "ThreadPool", e.to_string()))
}
