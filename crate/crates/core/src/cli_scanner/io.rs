//! CSV and JSON forms of a scan table. Floats are written with 17
//! significant digits so a table survives a round trip bit for bit.

use serde_json::{Map, Value};
use std::io::{Read, Write};

use super::ScanRow;
use crate::error::{Error, Result};

const FIXED: [&str; 5] = ["family", "param", "e", "class", "inside_bound"];

fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn eig_columns(rows: &[ScanRow]) -> usize {
    rows.iter().map(|r| r.eigenvalues.len()).max().unwrap_or(0)
}

fn io_err(err: impl std::fmt::Display) -> Error {
    Error::InvalidState(format!("table i/o: {err}"))
}

pub fn write_csv<W: Write>(rows: &[ScanRow], out: W) -> Result<()> {
    let n = eig_columns(rows);
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = FIXED.iter().map(|s| s.to_string()).collect();
    for k in 1..=n {
        header.push(format!("eig{k}_re"));
        header.push(format!("eig{k}_im"));
    }
    w.write_record(&header).map_err(io_err)?;
    for r in rows {
        let mut rec = vec![r.family.clone(), num(r.param), num(r.e), r.class.clone(), r.inside_bound.to_string()];
        for k in 0..n {
            match r.eigenvalues.get(k) {
                Some(&(re, im)) => {
                    rec.push(num(re));
                    rec.push(num(im));
                }
                None => rec.extend([String::new(), String::new()]),
            }
        }
        w.write_record(&rec).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::invalid(format!("bad {what} value {s:?}")))
}

fn parse_bool(s: &str) -> Result<bool> {
    s.trim().parse().map_err(|_| Error::invalid(format!("bad inside_bound value {s:?}")))
}

pub fn parse_csv<R: Read>(input: R) -> Result<Vec<ScanRow>> {
    let mut rd = csv::ReaderBuilder::new().flexible(false).from_reader(input);
    let header = rd.headers().map_err(|e| Error::invalid(format!("csv header: {e}")))?.clone();
    if header.len() < FIXED.len() || header.iter().zip(FIXED).any(|(a, b)| a != b) || (header.len() - FIXED.len()) % 2 != 0 {
        return Err(Error::invalid(format!("unexpected csv header {:?}", header.iter().collect::<Vec<_>>())));
    }
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| Error::invalid(format!("csv record: {e}")))?;
        let mut eigenvalues = Vec::new();
        let mut k = FIXED.len();
        while k + 1 < rec.len() && !rec[k].is_empty() {
            eigenvalues.push((parse_f64(&rec[k], "eigenvalue")?, parse_f64(&rec[k + 1], "eigenvalue")?));
            k += 2;
        }
        rows.push(ScanRow {
            family: rec[0].to_string(),
            param: parse_f64(&rec[1], "param")?,
            e: parse_f64(&rec[2], "e")?,
            class: rec[3].to_string(),
            inside_bound: parse_bool(&rec[4])?,
            eigenvalues,
        });
    }
    Ok(rows)
}

fn jnum(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// An array of row objects keyed like the CSV columns. Non-finite floats
/// become `null`.
pub fn write_json<W: Write>(rows: &[ScanRow], mut out: W) -> Result<()> {
    let arr: Vec<Value> = rows
        .iter()
        .map(|r| {
            let mut m = Map::new();
            m.insert("family".into(), Value::String(r.family.clone()));
            m.insert("param".into(), jnum(r.param));
            m.insert("e".into(), jnum(r.e));
            m.insert("class".into(), Value::String(r.class.clone()));
            m.insert("inside_bound".into(), Value::Bool(r.inside_bound));
            for (k, &(re, im)) in r.eigenvalues.iter().enumerate() {
                m.insert(format!("eig{}_re", k + 1), jnum(re));
                m.insert(format!("eig{}_im", k + 1), jnum(im));
            }
            Value::Object(m)
        })
        .collect();
    serde_json::to_writer_pretty(&mut out, &Value::Array(arr)).map_err(io_err)?;
    out.write_all(b"\n").map_err(io_err)
}

pub fn parse_json<R: Read>(input: R) -> Result<Vec<ScanRow>> {
    let v: Value = serde_json::from_reader(input).map_err(|e| Error::invalid(format!("json: {e}")))?;
    let arr = v.as_array().ok_or_else(|| Error::invalid("json scan table must be an array"))?;
    let f = |m: &Map<String, Value>, key: &str| -> Result<f64> {
        match m.get(key) {
            Some(Value::Null) => Ok(f64::NAN),
            Some(x) => x.as_f64().ok_or_else(|| Error::invalid(format!("{key} is not a number"))),
            None => Err(Error::invalid(format!("missing key {key}"))),
        }
    };
    arr.iter()
        .map(|item| {
            let m = item.as_object().ok_or_else(|| Error::invalid("json row must be an object"))?;
            let s = |key: &str| m.get(key).and_then(Value::as_str).map(str::to_string).ok_or_else(|| Error::invalid(format!("missing key {key}")));
            let mut eigenvalues = Vec::new();
            while m.contains_key(&format!("eig{}_re", eigenvalues.len() + 1)) {
                let k = eigenvalues.len() + 1;
                eigenvalues.push((f(m, &format!("eig{k}_re"))?, f(m, &format!("eig{k}_im"))?));
            }
            Ok(super::ScanRow {
                family: s("family")?,
                param: f(m, "param")?,
                e: f(m, "e")?,
                class: s("class")?,
                inside_bound: m.get("inside_bound").and_then(Value::as_bool).ok_or_else(|| Error::invalid("missing key inside_bound"))?,
                eigenvalues,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows() -> Vec<ScanRow> {
        vec![
            ScanRow {
                family: "gon[n=9;rule=all-corners]".into(),
                param: 0.1 + 0.2,
                e: 1.0 / 3.0,
                class: "EE;EH".into(),
                inside_bound: true,
                eigenvalues: vec![(0.6, -0.8), (f64::MIN_POSITIVE, 1e300)],
            },
            ScanRow { family: "lagrange".into(), param: 0.0, e: 0.9, class: "failed".into(), inside_bound: false, eigenvalues: vec![] },
        ]
    }

    #[test]
    fn csv_round_trip() {
        let mut buf = Vec::new();
        write_csv(&rows(), &mut buf).unwrap();
        assert_eq!(parse_csv(buf.as_slice()).unwrap(), rows());
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("family,param,e,class,inside_bound,eig1_re,eig1_im,eig2_re,eig2_im\n"));
    }

    #[test]
    fn json_round_trip() {
        let mut buf = Vec::new();
        write_json(&rows(), &mut buf).unwrap();
        assert_eq!(parse_json(buf.as_slice()).unwrap(), rows());
    }

    #[test]
    fn rejects_foreign_header() {
        assert!(parse_csv("a,b,c\n1,2,3\n".as_bytes()).is_err());
    }
}
