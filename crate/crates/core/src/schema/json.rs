use serde_json::{Map, Value};
use thiserror::Error;

use super::{Field, HarmKind, IncidentRecord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("malformed JSON: {0}")]
    Parse(String),
    #[error("schema error: {0}")]
    Schema(String),
}

impl CodecError {
    pub fn code(&self) -> &'static str {
        match self {
            CodecError::Parse(_) => "PARSE_ERROR",
            CodecError::Schema(_) => "SCHEMA_ERROR",
        }
    }
}

/// Compact UTF-8 JSON with fields in canonical order.
pub fn to_canonical_json(record: &IncidentRecord) -> Vec<u8> {
    serde_json::to_vec(record).expect("records serialize")
}

/// Parses a canonical document. The schema is closed: every field must be
/// present (optional ones as `null`) and no other field is accepted, at any
/// nesting level.
pub fn from_canonical_json(bytes: &[u8]) -> Result<IncidentRecord, CodecError> {
    let value: Value = serde_json::from_slice(bytes).map_err(|e| CodecError::Parse(e.to_string()))?;
    check_closed(&value)?;
    serde_json::from_value(value).map_err(|e| CodecError::Schema(e.to_string()))
}

fn top_level_keys() -> Vec<&'static str> {
    let mut keys: Vec<&'static str> = Field::ALL
        .iter()
        .map(|f| f.path().split('.').next().expect("nonempty path"))
        .collect();
    keys.dedup();
    keys
}

fn check_closed(value: &Value) -> Result<(), CodecError> {
    let obj = as_object(value, "document")?;
    check_keys(obj, &top_level_keys(), "")?;

    if let Some(Value::Array(locations)) = obj.get("incident_locations") {
        for (i, loc) in locations.iter().enumerate() {
            let path = format!("incident_locations[{i}]");
            check_keys(as_object(loc, &path)?, &["country_code", "region"], &path)?;
        }
    }
    if let Some(t) = obj.get("application_transparency") {
        let path = "application_transparency";
        check_keys(as_object(t, path)?, &["level", "note"], path)?;
    }
    if let Some(h) = obj.get("harms") {
        let harms = as_object(h, "harms")?;
        let kinds: Vec<&str> = HarmKind::ALL.iter().map(|k| k.as_str()).collect();
        check_keys(harms, &kinds, "harms")?;
        for kind in kinds {
            let path = format!("harms.{kind}");
            check_keys(as_object(&harms[kind], &path)?, &["present", "description"], &path)?;
        }
    }
    Ok(())
}

fn as_object<'a>(value: &'a Value, path: &str) -> Result<&'a Map<String, Value>, CodecError> {
    value
        .as_object()
        .ok_or_else(|| CodecError::Schema(format!("`{path}` must be an object")))
}

fn check_keys(obj: &Map<String, Value>, expected: &[&str], path: &str) -> Result<(), CodecError> {
    let join = |k: &str| {
        if path.is_empty() {
            k.to_string()
        } else {
            format!("{path}.{k}")
        }
    };
    if let Some(extra) = obj.keys().find(|k| !expected.contains(&k.as_str())) {
        return Err(CodecError::Schema(format!("unknown field `{}`", join(extra))));
    }
    if let Some(missing) = expected.iter().find(|k| !obj.contains_key(**k)) {
        return Err(CodecError::Schema(format!("missing field `{}`", join(missing))));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::test_support::valid_record;

    fn doc() -> Value {
        serde_json::from_slice(&to_canonical_json(&valid_record())).unwrap()
    }

    #[test]
    fn round_trip() {
        let r = valid_record();
        assert_eq!(from_canonical_json(&to_canonical_json(&r)).unwrap(), r);
    }

    #[test]
    fn field_order_is_canonical() {
        let text = String::from_utf8(to_canonical_json(&valid_record())).unwrap();
        let positions: Vec<usize> = top_level_keys()
            .iter()
            .map(|k| text.find(&format!("\"{k}\":")).unwrap())
            .collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn extra_field_rejected() {
        let mut d = doc();
        d["severity_score"] = Value::from(3);
        let err = from_canonical_json(&serde_json::to_vec(&d).unwrap()).unwrap_err();
        assert_eq!(err.code(), "SCHEMA_ERROR");
        assert!(err.to_string().contains("severity_score"));
    }

    #[test]
    fn missing_field_named() {
        let mut d = doc();
        d.as_object_mut().unwrap().remove("incident_title");
        let err = from_canonical_json(&serde_json::to_vec(&d).unwrap()).unwrap_err();
        assert_eq!(err.code(), "SCHEMA_ERROR");
        assert!(err.to_string().contains("incident_title"));
    }

    #[test]
    fn missing_optional_field_rejected() {
        let mut d = doc();
        d.as_object_mut().unwrap().remove("application_version");
        assert!(from_canonical_json(&serde_json::to_vec(&d).unwrap()).is_err());
    }

    #[test]
    fn nested_closure() {
        let mut d = doc();
        d["harms"]["physical"]["severity"] = Value::from("x");
        let err = from_canonical_json(&serde_json::to_vec(&d).unwrap()).unwrap_err();
        assert!(err.to_string().contains("harms.physical.severity"));

        let mut d = doc();
        d["harms"].as_object_mut().unwrap().remove("human_rights");
        assert!(from_canonical_json(&serde_json::to_vec(&d).unwrap()).is_err());

        let mut d = doc();
        d["incident_locations"][0]["city"] = Value::from("Pune");
        assert!(from_canonical_json(&serde_json::to_vec(&d).unwrap()).is_err());
    }

    #[test]
    fn wrong_type_and_malformed() {
        let mut d = doc();
        d["affected_parties"] = Value::from("everyone");
        let err = from_canonical_json(&serde_json::to_vec(&d).unwrap()).unwrap_err();
        assert_eq!(err.code(), "SCHEMA_ERROR");

        let err = from_canonical_json(b"{\"incident_id\": ").unwrap_err();
        assert_eq!(err.code(), "PARSE_ERROR");
        let err = from_canonical_json(b"[]").unwrap_err();
        assert_eq!(err.code(), "SCHEMA_ERROR");
    }

    #[test]
    fn unknown_transparency_level_is_schema_error() {
        let mut d = doc();
        d["application_transparency"]["level"] = Value::from("opaque");
        let err = from_canonical_json(&serde_json::to_vec(&d).unwrap()).unwrap_err();
        assert_eq!(err.code(), "SCHEMA_ERROR");
    }
}
