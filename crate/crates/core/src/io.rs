//! JSON file formats.
//!
//! Function files hold either a dense table,
//! `{"q":2,"n":3,"codomain":"alphabet","table":[...]}` in big-endian index
//! order, or a family oracle, `{"oracle":"plurality","params":{...}}`.
//! Measures are `{"q":3,"atoms":[...]}`, profiles
//! `{"m":3,"orders":[{"ranking":[...],"weight":1}]}` and choice functions
//! `{"m":3,"choices":{"<mask>":alt}}`. Written files carry a `"schema"`
//! field; readers accept files with or without it.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::families::FamilySpec;
use crate::qfun::{Body, Codomain, QaryFunction};

pub const FUNCTION_SCHEMA: &str = "threshold-lab/function/v1";
pub const MEASURE_SCHEMA: &str = "threshold-lab/measure/v1";
pub const PROFILE_SCHEMA: &str = "threshold-lab/profile/v1";
pub const CHOICE_SCHEMA: &str = "threshold-lab/choice-function/v1";
pub const TOURNAMENT_SCHEMA: &str = "threshold-lab/tournament/v1";

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum CodomainName {
    Alphabet,
    Real,
}

#[derive(Serialize, Deserialize)]
struct TableRecord {
    q: usize,
    n: usize,
    codomain: CodomainName,
    /// Alphabet size; defaults to `max(q, largest entry + 1)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    codomain_size: Option<usize>,
    table: Vec<f64>,
}

fn parse_err(e: impl std::fmt::Display) -> Error {
    Error::Parse(e.to_string())
}

fn function_to_value(f: &QaryFunction) -> Result<Value> {
    let record = match f.body() {
        Body::Oracle(spec) => return serde_json::to_value(spec).map_err(parse_err),
        Body::Symbols(t) => {
            let size = match f.codomain() {
                Codomain::Alphabet(k) => k,
                Codomain::Real => unreachable!("symbol tables have an alphabet codomain"),
            };
            let table: Vec<Value> = t.iter().map(|&s| Value::from(s)).collect();
            return Ok(serde_json::json!({
                "q": f.q(),
                "n": f.n(),
                "codomain": "alphabet",
                "codomain_size": size,
                "table": table,
            }));
        }
        Body::Reals(t) => TableRecord {
            q: f.q(),
            n: f.n(),
            codomain: CodomainName::Real,
            codomain_size: None,
            table: t.clone(),
        },
    };
    serde_json::to_value(record).map_err(parse_err)
}

fn function_from_value(mut value: Value) -> Result<QaryFunction> {
    let object = value.as_object_mut().ok_or_else(|| Error::Parse("function file must be a JSON object".into()))?;
    object.remove("schema");
    if object.contains_key("oracle") {
        let spec: FamilySpec = serde_json::from_value(value).map_err(parse_err)?;
        return QaryFunction::from_family(spec);
    }
    let r: TableRecord = serde_json::from_value(value).map_err(parse_err)?;
    match r.codomain {
        CodomainName::Real => QaryFunction::from_reals(r.q, r.n, r.table),
        CodomainName::Alphabet => {
            let symbols = r
                .table
                .iter()
                .map(|&v| {
                    if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
                        Ok(v as u32)
                    } else {
                        Err(Error::Parse(format!("alphabet entry {v} is not a symbol")))
                    }
                })
                .collect::<Result<Vec<u32>>>()?;
            let largest = symbols.iter().max().map_or(0, |&s| s as usize + 1);
            let size = r.codomain_size.unwrap_or(r.q.max(largest));
            QaryFunction::from_symbols(r.q, r.n, size, symbols)
        }
    }
}

impl Serialize for QaryFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        function_to_value(self).map_err(serde::ser::Error::custom)?.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QaryFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        function_from_value(Value::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// Serializes `value` and tags the resulting object with `schema`.
pub fn with_schema<T: Serialize + ?Sized>(schema: &str, value: &T) -> Result<Value> {
    let mut v = serde_json::to_value(value).map_err(parse_err)?;
    match v.as_object_mut() {
        Some(object) => {
            object.insert("schema".into(), Value::from(schema));
            Ok(v)
        }
        None => {
            let mut object = Map::new();
            object.insert("schema".into(), Value::from(schema));
            object.insert("data".into(), v);
            Ok(Value::Object(object))
        }
    }
}

/// Parses JSON, checking and dropping an optional `"schema"` field.
pub fn from_json_with_schema<T: DeserializeOwned>(text: &str, schema: &str) -> Result<T> {
    let mut value: Value = serde_json::from_str(text).map_err(parse_err)?;
    if let Some(object) = value.as_object_mut() {
        if let Some(found) = object.remove("schema") {
            if found.as_str() != Some(schema) {
                return Err(Error::Parse(format!("expected schema {schema}, found {found}")));
            }
        }
    }
    serde_json::from_value(value).map_err(parse_err)
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("values always serialize");
    s.push('\n');
    s
}
