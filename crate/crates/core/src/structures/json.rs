//! Canonical JSON form:
//! `{"signature":[{"name":"S1","arity":2}],"domain":5,"relations":{"S1":[[0,1]]}}`
//! with relations listed in signature order and tuples sorted.

use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Signature, Structure, StructureError, Symbol, Tuple};

impl Serialize for Signature {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.symbols().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Signature {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let symbols = Vec::<Symbol>::deserialize(deserializer)?;
        Signature::new(symbols.into_iter().map(|s| (s.name, s.arity))).map_err(D::Error::custom)
    }
}

struct RelationsInOrder<'a>(&'a Structure);

impl Serialize for RelationsInOrder<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let s = self.0;
        let mut map = serializer.serialize_map(Some(s.signature().len()))?;
        for (sym, rel) in s.signature().symbols().iter().zip(s.relations()) {
            map.serialize_entry(&sym.name, rel)?;
        }
        map.end()
    }
}

impl Serialize for Structure {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(3))?;
        map.serialize_entry("signature", self.signature())?;
        map.serialize_entry("domain", &self.domain_size())?;
        map.serialize_entry("relations", &RelationsInOrder(self))?;
        map.end()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStructure {
    signature: Signature,
    domain: usize,
    #[serde(default)]
    relations: std::collections::BTreeMap<String, Vec<Tuple>>,
}

impl<'de> Deserialize<'de> for Structure {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawStructure::deserialize(deserializer)?;
        from_raw(raw).map_err(D::Error::custom)
    }
}

fn from_raw(raw: RawStructure) -> Result<Structure, StructureError> {
    let mut s = Structure::empty(raw.signature, raw.domain);
    for (name, tuples) in raw.relations {
        for t in tuples {
            s.insert_named(&name, t)?;
        }
    }
    Ok(s)
}

impl Structure {
    /// Canonical compact JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("structure serialises")
    }

    pub fn from_json(text: &str) -> Result<Structure, StructureError> {
        serde_json::from_str(text).map_err(|e| StructureError::Json(e.to_string()))
    }
}
