//! Problem files: `{"version": 1, "factors": ..., "objects": {...}, "params": {...}}`.
//!
//! An optional `"flags"` object sets defaults for `p`, `depth` and
//! `precision`; flags given on the command line win.
//!
//! A string parameter that names an entry of `objects` stands for that entry.
//! Keys `expect` and `note` are carried along for documentation and ignored.

use std::sync::Arc;

use prodmeasure_core::factor::{FactorSequence, FactorSpace};
use prodmeasure_core::Rational;
use serde_json::{Map, Value};

use crate::codec;
use crate::error::{CliError, CliResult};

pub const VERSION: u64 = 1;

#[derive(Clone, Debug)]
pub struct Problem {
    pub factors: Arc<FactorSequence>,
    pub objects: Map<String, Value>,
    pub params: Map<String, Value>,
    pub flags: Map<String, Value>,
    pub expect: Option<Value>,
}

impl Default for Problem {
    fn default() -> Self {
        Problem {
            factors: Arc::new(FactorSequence::uniform(FactorSpace::Line)),
            objects: Map::new(),
            params: Map::new(),
            flags: Map::new(),
            expect: None,
        }
    }
}

impl Problem {
    pub fn parse(text: &str) -> CliResult<Self> {
        let doc: Value = serde_json::from_str(text).map_err(|e| CliError::Parse(format!("invalid JSON: {e}")))?;
        Self::from_value(&doc)
    }

    pub fn from_value(doc: &Value) -> CliResult<Self> {
        let top = doc.as_object().ok_or_else(|| CliError::Parse("problem file must be a JSON object".into()))?;
        for key in top.keys() {
            if !matches!(key.as_str(), "version" | "factors" | "objects" | "params" | "flags" | "expect" | "note") {
                return Err(CliError::Parse(format!("unknown top-level key \"{key}\"")));
            }
        }
        match top.get("version") {
            Some(v) if v.as_u64() == Some(VERSION) => {}
            Some(v) => return Err(CliError::Parse(format!("unsupported version {v}"))),
            None => return Err(CliError::Parse("missing \"version\"".into())),
        }
        let factors = match top.get("factors") {
            Some(f) => Arc::new(codec::factors(f)?),
            None => Arc::new(FactorSequence::uniform(FactorSpace::Line)),
        };
        let section = |key: &str| -> CliResult<Map<String, Value>> {
            match top.get(key) {
                None => Ok(Map::new()),
                Some(Value::Object(m)) => Ok(m.clone()),
                Some(v) => Err(CliError::Parse(format!("\"{key}\" must be an object, found {v}"))),
            }
        };
        Ok(Problem { factors, objects: section("objects")?, params: section("params")?,
            flags: section("flags")?,
            expect: top.get("expect").cloned() })
    }

    fn resolve<'a>(&'a self, v: &'a Value) -> &'a Value {
        match v {
            Value::String(s) => self.objects.get(s).unwrap_or(v),
            _ => v,
        }
    }

    pub fn has(&self, key: &str) -> bool {
        self.params.contains_key(key)
    }

    pub fn param(&self, key: &str) -> CliResult<&Value> {
        self.params
            .get(key)
            .map(|v| self.resolve(v))
            .ok_or_else(|| CliError::Parse(format!("missing parameter \"{key}\"")))
    }

    /// A list parameter whose entries may each name an object.
    pub fn list(&self, key: &str) -> CliResult<Vec<&Value>> {
        let v = self.param(key)?;
        let items = v.as_array().ok_or_else(|| CliError::Parse(format!("parameter \"{key}\" must be a list")))?;
        Ok(items.iter().map(|x| self.resolve(x)).collect())
    }

    pub fn usize_param(&self, key: &str) -> CliResult<usize> {
        codec::usize_value(self.param(key)?)
    }

    pub fn rational_param(&self, key: &str) -> CliResult<Rational> {
        codec::rational(self.param(key)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn objects_resolve_in_params_and_lists() {
        let pb = Problem::parse(
            r#"{"version": 1, "objects": {"a": "1/2"}, "params": {"x": "a", "xs": ["a", "3"], "y": "b"}}"#,
        )
        .unwrap();
        assert_eq!(pb.param("x").unwrap(), "1/2");
        assert_eq!(pb.list("xs").unwrap(), vec!["1/2", "3"]);
        assert_eq!(pb.param("y").unwrap(), "b");
        assert!(pb.param("z").is_err());
    }

    #[test]
    fn rejects_malformed_documents() {
        for text in ["[]", r#"{"version": 2}"#, r#"{"version": 1, "extra": 0}"#, r#"{"version": 1, "params": []}"#] {
            assert_eq!(Problem::parse(text).unwrap_err().exit_code(), 4, "{text}");
        }
    }
}
