//! CSV emission. Floats are written in shortest round-trip form.

use std::io::Write;
use std::path::Path;

use cavity_duet_core::observables::{ObservableSeries, RegimeReport, Verdict};
use cavity_duet_core::wei_norman::CoefficientTable;
use cavity_duet_core::{Observable, C64};

use crate::error::{CliError, CliResult};

/// Frozen column order of the observable CSV.
pub const SERIES_HEADER: [&str; 19] = [
    "tau", "n1_A", "n1_N", "n2_A", "n2_N", "sz1_A", "sz1_N", "sz2_A", "sz2_N", "m1_A", "m1_N",
    "m2_A", "m2_N", "mtot_A", "mtot_N", "d_n1", "d_n2", "d_sz1", "d_sz2",
];

const PAIRED: [Observable; 7] = [
    Observable::N1,
    Observable::N2,
    Observable::Sz1,
    Observable::Sz2,
    Observable::M1,
    Observable::M2,
    Observable::MTot,
];

const DIFFS: [Observable; 4] = [
    Observable::N1,
    Observable::N2,
    Observable::Sz1,
    Observable::Sz2,
];

fn series_rows(series: &ObservableSeries) -> Vec<Vec<f64>> {
    (0..series.len())
        .map(|i| {
            let mut row = Vec::with_capacity(SERIES_HEADER.len());
            row.push(series.tau[i]);
            for o in PAIRED {
                row.push(series.analytic.get(o)[i]);
                row.push(series.numeric.get(o)[i]);
            }
            row.extend(DIFFS.iter().map(|&o| series.diff.get(o)[i]));
            row
        })
        .collect()
}

fn write_table<W: Write>(out: W, header: &[String], rows: &[Vec<f64>]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn finite_or_fail(rows: &[Vec<f64>]) -> CliResult<()> {
    if rows.iter().flatten().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(CliError::Numerical(
            cavity_duet_core::Error::NumericalFailure("non-finite value in output"),
        ))
    }
}

fn save(path: &Path, header: &[String], rows: &[Vec<f64>]) -> CliResult<()> {
    finite_or_fail(rows)?;
    let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    write_table(std::io::BufWriter::new(file), header, rows).map_err(|e| {
        let io = match e.into_kind() {
            csv::ErrorKind::Io(io) => io,
            other => std::io::Error::other(format!("{other:?}")),
        };
        CliError::io(path, io)
    })
}

fn owned(header: &[&str]) -> Vec<String> {
    header.iter().map(|s| s.to_string()).collect()
}

pub fn series_csv(series: &ObservableSeries) -> String {
    let mut buf = Vec::new();
    write_table(&mut buf, &owned(&SERIES_HEADER), &series_rows(series)).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is UTF-8")
}

pub fn emit_csv(series: &ObservableSeries, path: &Path) -> CliResult<()> {
    save(path, &owned(&SERIES_HEADER), &series_rows(series))
}

/// `tau`, real and imaginary parts of the hopping coefficients, then
/// `b{cavity}_m{m}_{z,p,m}_{re,im}` for each integrated ladder.
pub fn emit_coeffs(table: &CoefficientTable, path: &Path) -> CliResult<()> {
    let mut header = owned(&["tau", "g1_re", "g1_im", "g2_re", "g2_im", "g3_re", "g3_im"]);
    for key in table.betas.keys() {
        for part in ["z", "p", "m"] {
            for c in ["re", "im"] {
                header.push(format!("b{}_m{}_{part}_{c}", key.cavity, key.m));
            }
        }
    }
    let push = |row: &mut Vec<f64>, z: C64| {
        row.push(z.re);
        row.push(z.im);
    };
    let rows: Vec<Vec<f64>> = table
        .tau
        .iter()
        .enumerate()
        .map(|(i, &tau)| {
            let g = &table.gammas[i];
            let mut row = vec![tau];
            for z in [g.gamma1, g.gamma2, g.gamma3] {
                push(&mut row, z);
            }
            for series in table.betas.values() {
                let b = &series[i];
                for z in [b.bz, b.bp, b.bm] {
                    push(&mut row, z);
                }
            }
            row
        })
        .collect();
    save(path, &header, &rows)
}

pub fn verdict_label(v: Verdict) -> &'static str {
    match v {
        Verdict::QuantitativeAndQualitative => "quantitative",
        Verdict::QualitativeOnly => "qualitative-only",
    }
}

/// One row per report: couplings, worst verdict-observable difference, and
/// the per-observable maxima.
pub fn emit_table(reports: &[RegimeReport], path: &Path) -> CliResult<()> {
    let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    let mut header = owned(&["g_ratio", "lambda_ratio", "worst"]);
    header.extend(
        Observable::ALL
            .iter()
            .map(|o| format!("max_d_{}", o.name())),
    );
    header.push("verdict".into());
    let wrap = |e: csv::Error| CliError::io(path, std::io::Error::other(e.to_string()));
    w.write_record(&header).map_err(wrap)?;
    for r in reports {
        let p = r
            .params
            .unwrap_or_else(|| cavity_duet_core::presets::study_params(0.0, 0.0));
        let mut rec = vec![
            p.g1.to_string(),
            p.lambda.to_string(),
            r.worst().to_string(),
        ];
        rec.extend(Observable::ALL.iter().map(|&o| r.max_diff(o).to_string()));
        rec.push(verdict_label(r.verdict).into());
        w.write_record(&rec).map_err(wrap)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}
