use std::io::{Read, Write};

use crate::tol::MARGIN;
use crate::{Error, Result};

use super::types::SweepRow;

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes rows with columns
/// `swept_name,swept_value,p_me,p_aveme,margin,captured_mass,p_k0,p_err_k0,…,backend`.
///
/// Suppressed outcomes are written with `p_k = 0` and `p_err = nan`.
pub fn write_csv<W: Write>(writer: W, rows: &[SweepRow]) -> Result<()> {
    let n_branches = rows.iter().map(|r| r.eval.branches.len()).max().unwrap_or(0);
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = ["swept_name", "swept_value", "p_me", "p_aveme", "margin", "captured_mass"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for k in 0..n_branches {
        header.push(format!("p_k{k}"));
        header.push(format!("p_err_k{k}"));
    }
    header.push("backend".into());
    w.write_record(&header)?;
    for row in rows {
        let e = &row.eval;
        let mut rec = vec![
            row.swept.name().to_string(),
            fmt(row.value),
            fmt(e.p_me),
            fmt(e.p_aveme),
            fmt(e.margin),
            fmt(e.captured_mass),
        ];
        for k in 0..n_branches {
            match e.branches.get(k).and_then(|b| b.p_err.map(|err| (b.p_k, err))) {
                Some((p, err)) => {
                    rec.push(fmt(p));
                    rec.push(fmt(err));
                }
                None => {
                    rec.push(fmt(0.0));
                    rec.push("nan".into());
                }
            }
        }
        rec.push(row.backend.as_str().into());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// A row read back from CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub swept_name: String,
    pub swept_value: f64,
    pub p_me: f64,
    pub p_aveme: f64,
    pub margin: f64,
    pub captured_mass: f64,
    /// `(p_k, p_err_k)`; `p_err_k` is NaN for suppressed outcomes.
    pub branches: Vec<(f64, f64)>,
    pub backend: String,
}

pub fn read_csv<R: Read>(reader: R) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_reader(reader);
    let header = r.headers()?.clone();
    let n = header.len();
    if n < 7 || (n - 7) % 2 != 0 || &header[0] != "swept_name" || &header[n - 1] != "backend" {
        return Err(Error::Csv(format!("unexpected header with {n} columns")));
    }
    let n_branches = (n - 7) / 2;
    let num = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Csv(format!("{s:?}: {e}")));
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let branches = (0..n_branches)
            .map(|k| Ok((num(&rec[6 + 2 * k])?, num(&rec[7 + 2 * k])?)))
            .collect::<Result<Vec<_>>>()?;
        rows.push(CsvRow {
            swept_name: rec[0].to_string(),
            swept_value: num(&rec[1])?,
            p_me: num(&rec[2])?,
            p_aveme: num(&rec[3])?,
            margin: num(&rec[4])?,
            captured_mass: num(&rec[5])?,
            branches,
            backend: rec[n - 1].to_string(),
        });
    }
    Ok(rows)
}

/// Re-checks the invariants of reloaded rows.
pub fn validate_csv_rows(rows: &[CsvRow]) -> Result<()> {
    let slack = 1e-12;
    let prob = |v: f64| (-slack..=1.0 + slack).contains(&v);
    for (i, r) in rows.iter().enumerate() {
        let bad = |what: &str| Err(Error::Csv(format!("row {i}: {what}")));
        if !matches!(r.backend.as_str(), "closed_form" | "engine") {
            return bad("unknown backend");
        }
        if !prob(r.p_me) || !prob(r.p_aveme) || !prob(r.captured_mass) {
            return bad("probability outside [0, 1]");
        }
        if (r.margin - (r.p_aveme - r.p_me)).abs() > slack {
            return bad("margin differs from p_aveme - p_me");
        }
        if r.margin < -MARGIN {
            return Err(Error::InvariantViolation { margin: r.margin });
        }
        let mut total = 0.0;
        for (k, &(p, err)) in r.branches.iter().enumerate() {
            if err.is_nan() {
                if p != 0.0 {
                    return bad(&format!("suppressed outcome {k} with nonzero p_k"));
                }
                continue;
            }
            if !prob(p) || !(-slack..=0.5 + slack).contains(&err) {
                return bad(&format!("outcome {k} out of range"));
            }
            total += p;
        }
        if total > r.captured_mass + 1e-10 {
            return bad("branch mass exceeds captured mass");
        }
    }
    Ok(())
}
