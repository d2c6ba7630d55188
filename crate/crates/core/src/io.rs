//! CSV emission and parsing for records, sidecars and sweep matrices.
//! Metadata lines precede the header and start with `#`.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{DickeError, Result};
use crate::record::Record;

pub type Metadata = Vec<(String, String)>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DickeError + '_ {
    move |source| DickeError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn fmt_err(e: impl std::fmt::Display) -> DickeError {
    DickeError::Format(e.to_string())
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        }
    }
    File::create(path).map(BufWriter::new).map_err(io_err(path))
}

pub fn write_metadata<W: Write>(w: &mut W, meta: &[(String, String)]) -> std::io::Result<()> {
    for (k, v) in meta {
        for (i, line) in v.lines().enumerate() {
            if i == 0 {
                writeln!(w, "# {k}: {line}")?;
            } else {
                writeln!(w, "#   {line}")?;
            }
        }
    }
    Ok(())
}

/// Splits `#` lines from the CSV body. Continuation lines are appended to
/// the previous value.
pub fn split_metadata(text: &str) -> (Metadata, String) {
    let mut meta: Metadata = Vec::new();
    let mut body = String::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(cont) = rest.strip_prefix("   ") {
                if let Some(last) = meta.last_mut() {
                    last.1.push('\n');
                    last.1.push_str(cont);
                }
            } else if let Some((k, v)) = rest.trim_start().split_once(": ") {
                meta.push((k.to_string(), v.to_string()));
            } else if let Some(k) = rest.trim().strip_suffix(':') {
                meta.push((k.to_string(), String::new()));
            }
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    (meta, body)
}

pub fn emit_records<W: Write>(mut w: W, meta: &[(String, String)], records: &[Record]) -> Result<()> {
    write_metadata(&mut w, meta).map_err(fmt_err)?;
    let mut csv = csv::Writer::from_writer(w);
    if records.is_empty() {
        csv.write_record(Record::COLUMNS).map_err(fmt_err)?;
    }
    for r in records {
        csv.serialize(r).map_err(fmt_err)?;
    }
    csv.flush().map_err(fmt_err)?;
    Ok(())
}

pub fn parse_records<R: Read>(mut r: R) -> Result<(Metadata, Vec<Record>)> {
    let mut text = String::new();
    r.read_to_string(&mut text).map_err(fmt_err)?;
    let (meta, body) = split_metadata(&text);
    let mut csv = csv::Reader::from_reader(body.as_bytes());
    let header = csv.headers().map_err(fmt_err)?.clone();
    if header.iter().ne(Record::COLUMNS.iter().copied()) {
        return Err(DickeError::Format(format!(
            "unexpected header {:?}",
            header.iter().collect::<Vec<_>>()
        )));
    }
    let records = csv
        .deserialize()
        .collect::<std::result::Result<Vec<Record>, _>>()
        .map_err(fmt_err)?;
    Ok((meta, records))
}

pub fn write_records(path: &Path, meta: &[(String, String)], records: &[Record]) -> Result<()> {
    emit_records(create(path)?, meta, records)
}

pub fn read_records(path: &Path) -> Result<(Metadata, Vec<Record>)> {
    parse_records(File::open(path).map_err(io_err(path))?)
}

/// Rows of `t, lambda, <prefix>0, <prefix>1, ...`.
pub fn write_vectors(
    path: &Path,
    meta: &[(String, String)],
    prefix: &str,
    rows: &[(f64, f64, &[f64])],
) -> Result<()> {
    let mut w = create(path)?;
    write_metadata(&mut w, meta).map_err(fmt_err)?;
    let width = rows.iter().map(|r| r.2.len()).max().unwrap_or(0);
    let mut csv = csv::Writer::from_writer(w);
    let mut header = vec!["t".to_string(), "lambda".to_string()];
    header.extend((0..width).map(|i| format!("{prefix}{i}")));
    csv.write_record(&header).map_err(fmt_err)?;
    for (t, lambda, v) in rows {
        let mut rec = vec![t.to_string(), lambda.to_string()];
        rec.extend((0..width).map(|i| v.get(i).copied().unwrap_or(0.0).to_string()));
        csv.write_record(&rec).map_err(fmt_err)?;
    }
    csv.flush().map_err(fmt_err)?;
    Ok(())
}

/// A Γ × sample matrix of one observable. Missing rows hold NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepMatrix {
    pub column: String,
    pub lambdas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

pub fn write_matrix(path: &Path, meta: &[(String, String)], m: &SweepMatrix) -> Result<()> {
    let mut w = create(path)?;
    let mut meta = meta.to_vec();
    meta.push(("observable".into(), m.column.clone()));
    meta.push((
        "lambda".into(),
        m.lambdas.iter().map(f64::to_string).collect::<Vec<_>>().join(","),
    ));
    write_metadata(&mut w, &meta).map_err(fmt_err)?;
    let mut csv = csv::Writer::from_writer(w);
    let mut header = vec!["gamma".to_string()];
    header.extend((0..m.lambdas.len()).map(|i| format!("s{i}")));
    csv.write_record(&header).map_err(fmt_err)?;
    for (g, row) in m.gammas.iter().zip(&m.values) {
        let mut rec = vec![g.to_string()];
        rec.extend(row.iter().map(f64::to_string));
        csv.write_record(&rec).map_err(fmt_err)?;
    }
    csv.flush().map_err(fmt_err)?;
    Ok(())
}

pub fn read_matrix(path: &Path) -> Result<SweepMatrix> {
    let mut text = String::new();
    File::open(path)
        .map_err(io_err(path))?
        .read_to_string(&mut text)
        .map_err(io_err(path))?;
    let (meta, body) = split_metadata(&text);
    let get = |k: &str| meta.iter().find(|(key, _)| key == k).map(|(_, v)| v.clone());
    let column = get("observable").ok_or_else(|| fmt_err("missing observable"))?;
    let lambdas = parse_list(&get("lambda").ok_or_else(|| fmt_err("missing lambda row"))?)?;
    let mut csv = csv::Reader::from_reader(body.as_bytes());
    let mut gammas = Vec::new();
    let mut values = Vec::new();
    for rec in csv.records() {
        let rec = rec.map_err(fmt_err)?;
        let nums = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(fmt_err))
            .collect::<Result<Vec<_>>>()?;
        gammas.push(nums[0]);
        values.push(nums[1..].to_vec());
    }
    Ok(SweepMatrix {
        column,
        lambdas,
        gammas,
        values,
    })
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(fmt_err))
        .collect()
}
