//! Canonical JSON manifests: sorted keys, two-space indentation, trailing
//! newline. Serialising a parsed manifest reproduces it byte for byte.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::{Handlebody, HandlebodyError};

pub const MANIFEST_SCHEMA: &str = "nf-manifest/1";

/// Canonical pretty JSON for any serialisable value.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    // serde_json's default map is ordered, so going through Value sorts keys.
    let v = serde_json::to_value(value).expect("serialisable");
    let mut s = serde_json::to_string_pretty(&v).expect("value serialises");
    s.push('\n');
    s
}

/// Hex SHA-256 of a string.
pub fn content_hash(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

impl Handlebody {
    pub fn to_manifest_value(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("handlebody serialises");
        v.as_object_mut().expect("struct").insert("schema".into(), Value::String(MANIFEST_SCHEMA.into()));
        v
    }

    pub fn to_manifest(&self) -> String {
        canonical_json(&self.to_manifest_value())
    }

    pub fn from_manifest_value(v: &Value) -> Result<Handlebody, HandlebodyError> {
        let mut obj = v.as_object().ok_or_else(|| HandlebodyError::Manifest("not a JSON object".into()))?.clone();
        match obj.remove("schema") {
            Some(Value::String(s)) if s == MANIFEST_SCHEMA => {}
            Some(other) => return Err(HandlebodyError::Manifest(format!("unsupported schema {other}"))),
            None => return Err(HandlebodyError::Manifest("missing schema field".into())),
        }
        let x: Handlebody =
            serde_json::from_value(Value::Object(obj)).map_err(|e| HandlebodyError::Manifest(e.to_string()))?;
        x.validate()?;
        Ok(x)
    }

    pub fn from_manifest(text: &str) -> Result<Handlebody, HandlebodyError> {
        let v: Value = serde_json::from_str(text).map_err(|e| HandlebodyError::Manifest(e.to_string()))?;
        Self::from_manifest_value(&v)
    }

    /// Hash of the canonical manifest.
    pub fn content_hash(&self) -> String {
        content_hash(&self.to_manifest())
    }
}
