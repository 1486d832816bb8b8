//! Shared report schema for every verification command.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::Rational;

pub const SCHEMA_VERSION: &str = "1.0";

/// An exact rational, serialized as `{"num": .., "den": ..}`. Components that
/// fit in an `i64` are JSON numbers, larger ones are decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exact(pub Rational);

impl Exact {
    pub fn new(num: i64, den: i64) -> Self {
        Exact(Rational::new(num.into(), den.into()))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl From<Rational> for Exact {
    fn from(r: Rational) -> Self {
        Exact(r)
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

fn int_value(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(x) => Value::from(x),
        None => Value::String(v.to_string()),
    }
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Exact", 2)?;
        s.serialize_field("num", &int_value(self.0.numer()))?;
        s.serialize_field("den", &int_value(self.0.denom()))?;
        s.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum IntRepr {
    Small(i64),
    Big(String),
}

impl IntRepr {
    fn into_bigint<E: de::Error>(self) -> Result<BigInt, E> {
        match self {
            IntRepr::Small(v) => Ok(v.into()),
            IntRepr::Big(s) => BigInt::from_str(&s).map_err(E::custom),
        }
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            num: IntRepr,
            den: IntRepr,
        }
        let raw = Raw::deserialize(deserializer)?;
        let den = raw.den.into_bigint::<D::Error>()?;
        if den == BigInt::from(0) {
            return Err(de::Error::custom("zero denominator"));
        }
        Ok(Exact(Rational::new(raw.num.into_bigint::<D::Error>()?, den)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Diagnostic,
}

impl Verdict {
    pub fn is_fail(self) -> bool {
        self == Verdict::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: String,
    pub claim: String,
    pub parameters: BTreeMap<String, Value>,
    pub verdict: Verdict,
    pub payload: Value,
    pub seed: u64,
    pub runtime_ms: u64,
}

impl VerificationReport {
    pub fn new(claim: impl Into<String>, verdict: Verdict, payload: impl Serialize) -> Self {
        VerificationReport {
            schema_version: SCHEMA_VERSION.to_string(),
            claim: claim.into(),
            parameters: BTreeMap::new(),
            verdict,
            payload: serde_json::to_value(payload).expect("payload serializes"),
            seed: 0,
            runtime_ms: 0,
        }
    }

    pub fn with_param(mut self, key: &str, value: impl Serialize) -> Self {
        self.parameters
            .insert(key.to_string(), serde_json::to_value(value).expect("parameter serializes"));
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, ReportError> {
        Ok(serde_json::from_slice(bytes)?)
    }

    pub fn from_csv(bytes: &[u8]) -> Result<Self, ReportError> {
        let mut reader = csv::Reader::from_reader(bytes);
        let mut root = Value::Object(Default::default());
        for rec in reader.records() {
            let rec = rec?;
            let (path, raw) = (rec.get(0).unwrap_or(""), rec.get(1).unwrap_or(""));
            let value: Value = serde_json::from_str(raw)?;
            insert_path(&mut root, path, value)?;
        }
        Ok(serde_json::from_value(root)?)
    }
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed csv path {0}")]
    BadPath(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format {other:?}, expected json or csv")),
        }
    }
}

/// JSON is pretty printed with fields in declaration order and map keys sorted.
/// CSV has one `path,value` row per leaf, values JSON-encoded; empty arrays
/// and objects are kept as leaves so the layout round-trips.
pub fn emit_report(report: &VerificationReport, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(report).expect("report serializes");
            out.push(b'\n');
            out
        }
        Format::Csv => {
            let value = serde_json::to_value(report).expect("report serializes");
            let mut rows = Vec::new();
            flatten("", &value, &mut rows);
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["path", "value"]).expect("in-memory write");
            for (path, v) in rows {
                w.write_record([path, v.to_string()]).expect("in-memory write");
            }
            w.into_inner().expect("in-memory flush")
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) if !map.is_empty() => {
            for (k, x) in map {
                flatten(&join(&k.replace('~', "~0").replace('.', "~1")), x, out);
            }
        }
        Value::Array(items) if !items.is_empty() => {
            for (i, x) in items.iter().enumerate() {
                flatten(&join(&format!("[{i}]")), x, out);
            }
        }
        _ => out.push((prefix.to_string(), v.clone())),
    }
}

fn insert_path(root: &mut Value, path: &str, value: Value) -> Result<(), ReportError> {
    let bad = || ReportError::BadPath(path.to_string());
    let mut cur = root;
    let parts: Vec<&str> = path.split('.').collect();
    for (depth, part) in parts.iter().enumerate() {
        let last = depth + 1 == parts.len();
        let next_is_index = parts.get(depth + 1).is_some_and(|p| p.starts_with('['));
        let fresh = || {
            if next_is_index {
                Value::Array(Vec::new())
            } else {
                Value::Object(Default::default())
            }
        };
        if let Some(idx) = part.strip_prefix('[').and_then(|p| p.strip_suffix(']')) {
            let i: usize = idx.parse().map_err(|_| bad())?;
            let arr = cur.as_array_mut().ok_or_else(bad)?;
            if i != arr.len() && i + 1 != arr.len() {
                return Err(bad());
            }
            if i == arr.len() {
                arr.push(if last { value.clone() } else { fresh() });
            }
            cur = &mut arr[i];
        } else {
            let key = part.replace("~1", ".").replace("~0", "~");
            let map = cur.as_object_mut().ok_or_else(bad)?;
            if last {
                map.insert(key.clone(), value.clone());
            }
            cur = map.entry(key).or_insert_with(fresh);
        }
    }
    Ok(())
}

/// `n,representation_count` rows.
pub fn counts_to_csv(rows: &[(u64, u64)]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "representation_count"]).expect("in-memory write");
    for (n, c) in rows {
        w.serialize((n, c)).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn counts_from_csv(bytes: &[u8]) -> Result<Vec<(u64, u64)>, ReportError> {
    let mut r = csv::Reader::from_reader(bytes);
    Ok(r.deserialize().collect::<Result<Vec<(u64, u64)>, _>>()?)
}

/// `r,abs_coefficient` rows.
pub fn spectrum_to_csv(magnitudes: &[f64]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["r", "abs_coefficient"]).expect("in-memory write");
    for (r, m) in magnitudes.iter().enumerate() {
        w.serialize((r, m)).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}
