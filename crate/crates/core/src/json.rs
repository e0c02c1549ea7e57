//! Canonical JSON emission and serde helpers.
//!
//! Every artifact this library writes goes through [`to_canonical_string`]:
//! object keys are sorted, rationals are rendered as "num/den" strings, and
//! no floats appear in any value that feeds a verification decision. Equal
//! artifacts therefore serialize to byte-identical files.

use crate::exact::{format_rational, parse_rational};
use crate::groups::{AmbientGroup, Coordinate, GroupElement, GroupError};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::sync::Arc;

pub mod rational_string {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

pub mod biguint_string {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let text = String::deserialize(d)?;
        text.parse::<BigUint>().map_err(serde::de::Error::custom)
    }
}

pub mod bigint_string {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let text = String::deserialize(d)?;
        text.parse::<BigInt>().map_err(serde::de::Error::custom)
    }
}

pub mod rational_vec {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts
            .iter()
            .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

fn sort_value(value: Value) -> Value {
    match value {
        Value::Object(map) => {
            let mut sorted = Map::new();
            let mut entries: Vec<(String, Value)> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            for (k, v) in entries {
                sorted.insert(k, sort_value(v));
            }
            Value::Object(sorted)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(sort_value).collect()),
        other => other,
    }
}

/// Serializes with sorted object keys and a trailing newline.
pub fn to_canonical_string<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let value = sort_value(serde_json::to_value(value)?);
    let mut text = serde_json::to_string_pretty(&value)?;
    text.push('\n');
    Ok(text)
}

/// Group element as stored on disk: support entries only, the ambient group
/// comes from the enclosing document. Convert with [`ElementRepr::attach`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ElementRepr {
    pub support: Vec<EntryRepr>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EntryRepr {
    pub index: u64,
    #[serde(flatten)]
    pub value: Coordinate,
}

impl ElementRepr {
    pub fn of(element: &GroupElement) -> Self {
        ElementRepr {
            support: element
                .support()
                .map(|(i, c)| EntryRepr {
                    index: *i,
                    value: c.clone(),
                })
                .collect(),
        }
    }

    pub fn attach(&self, group: &Arc<AmbientGroup>) -> Result<GroupElement, GroupError> {
        GroupElement::new(
            group,
            self.support.iter().map(|e| (e.index, e.value.clone())),
        )
    }
}
