//! Versioned CSV: a `# schema=…` comment line, a header row, LF endings,
//! shortest round-trip decimals, empty cells for missing values.

use std::io::Write;

use crate::error::Result;

pub const SCHEMA: &str = "# schema=robloc-result-v1; std_bias=(estimate-mu)/sigma";

pub const RESULT_COLUMNS: [&str; 13] = [
    "family", "shape", "kurtosis", "estimator", "epsilon", "gamma", "k", "n", "estimate",
    "std_bias", "se", "seed", "note",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub family: String,
    pub shape: Option<f64>,
    pub kurtosis: Option<f64>,
    pub estimator: String,
    pub epsilon: Option<f64>,
    pub gamma: f64,
    pub k: Option<f64>,
    pub n: usize,
    pub estimate: Option<f64>,
    pub std_bias: Option<f64>,
    pub se: Option<f64>,
    pub seed: u64,
    /// Empty for a normal row; the skip reason otherwise.
    pub note: String,
}

pub fn num(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_nan() => "nan".into(),
        Some(x) if x.is_infinite() => if x > 0.0 { "inf".into() } else { "-inf".into() },
        Some(x) => format!("{x}"),
        None => String::new(),
    }
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

/// Generic table: schema line, optional extra comment lines, header, rows.
pub fn write_table<W: Write>(
    mut out: W,
    comments: &[String],
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<()> {
    writeln!(out, "{SCHEMA}")?;
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    let mut w = writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_results<W: Write>(out: W, comments: &[String], rows: &[ResultRow]) -> Result<()> {
    let records: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.family.clone(),
                num(r.shape),
                num(r.kurtosis),
                r.estimator.clone(),
                num(r.epsilon),
                num(Some(r.gamma)),
                num(r.k),
                r.n.to_string(),
                num(r.estimate),
                num(r.std_bias),
                num(r.se),
                r.seed.to_string(),
                r.note.clone(),
            ]
        })
        .collect();
    write_table(out, comments, &RESULT_COLUMNS, &records)
}

/// Parse a result CSV back (used by tests and downstream tooling).
pub fn read_results(text: &str) -> Result<Vec<ResultRow>> {
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut rdr = csv::ReaderBuilder::new().from_reader(body.as_bytes());
    let opt = |s: &str| -> Option<f64> {
        match s {
            "" => None,
            "inf" => Some(f64::INFINITY),
            "-inf" => Some(f64::NEG_INFINITY),
            "nan" => Some(f64::NAN),
            _ => s.parse().ok(),
        }
    };
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let r = rec?;
        rows.push(ResultRow {
            family: r[0].to_string(),
            shape: opt(&r[1]),
            kurtosis: opt(&r[2]),
            estimator: r[3].to_string(),
            epsilon: opt(&r[4]),
            gamma: opt(&r[5]).unwrap_or(f64::NAN),
            k: opt(&r[6]),
            n: r[7].parse().unwrap_or(0),
            estimate: opt(&r[8]),
            std_bias: opt(&r[9]),
            se: opt(&r[10]),
            seed: r[11].parse().unwrap_or(0),
            note: r[12].to_string(),
        });
    }
    Ok(rows)
}
