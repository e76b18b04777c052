//! Entity references and feature storage shared by every structure.
//!
//! All higher-order structures address their constituents through
//! [`EntityRef`]: a class tag plus an index into the owning structure's
//! canonical entity order. Features are kept in a sparse [`FeatureMap`];
//! entities without an entry implicitly carry the empty vector.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// The entity classes a structure can own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityClass {
    Vertex,
    Hyperedge,
    Cell,
    Tuple,
    Subgraph,
}

impl EntityClass {
    pub fn short(&self) -> &'static str {
        match self {
            EntityClass::Vertex => "v",
            EntityClass::Hyperedge => "e",
            EntityClass::Cell => "c",
            EntityClass::Tuple => "t",
            EntityClass::Subgraph => "s",
        }
    }

    pub fn from_short(s: &str) -> Option<Self> {
        match s {
            "v" => Some(EntityClass::Vertex),
            "e" => Some(EntityClass::Hyperedge),
            "c" => Some(EntityClass::Cell),
            "t" => Some(EntityClass::Tuple),
            "s" => Some(EntityClass::Subgraph),
            _ => None,
        }
    }
}

impl fmt::Display for EntityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            EntityClass::Vertex => "vertex",
            EntityClass::Hyperedge => "hyperedge",
            EntityClass::Cell => "cell",
            EntityClass::Tuple => "tuple",
            EntityClass::Subgraph => "subgraph",
        };
        f.write_str(name)
    }
}

/// Reference to one entity: class plus index in the canonical entity order
/// of the owning structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EntityRef {
    pub class: EntityClass,
    pub id: usize,
}

impl EntityRef {
    pub fn new(class: EntityClass, id: usize) -> Self {
        EntityRef { class, id }
    }

    pub fn vertex(id: usize) -> Self {
        EntityRef::new(EntityClass::Vertex, id)
    }

    pub fn hyperedge(id: usize) -> Self {
        EntityRef::new(EntityClass::Hyperedge, id)
    }

    pub fn cell(id: usize) -> Self {
        EntityRef::new(EntityClass::Cell, id)
    }

    pub fn tuple(id: usize) -> Self {
        EntityRef::new(EntityClass::Tuple, id)
    }

    pub fn subgraph(id: usize) -> Self {
        EntityRef::new(EntityClass::Subgraph, id)
    }
}

impl fmt::Display for EntityRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.class.short(), self.id)
    }
}

/// Sparse feature storage. Missing entities default to the empty vector;
/// present vectors must share one width per entity class (node-tuple
/// features are checked per tuple length because iso-type widths grow
/// with the tuple arity).
///
/// Serializes as a string-keyed map (`"v:0"`, `"e:3"`, ...) so documents
/// stay plain JSON objects with deterministic key order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureMap {
    map: BTreeMap<EntityRef, Vec<f64>>,
}

impl Serialize for FeatureMap {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = serializer.serialize_map(Some(self.map.len()))?;
        for (e, v) in &self.map {
            m.serialize_entry(&e.to_string(), v)?;
        }
        m.end()
    }
}

impl<'de> Deserialize<'de> for FeatureMap {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let raw: BTreeMap<String, Vec<f64>> = BTreeMap::deserialize(deserializer)?;
        let mut map = BTreeMap::new();
        for (key, value) in raw {
            let (class, id) = key
                .split_once(':')
                .ok_or_else(|| DeError::custom(format!("bad entity key {key:?}")))?;
            let class = EntityClass::from_short(class)
                .ok_or_else(|| DeError::custom(format!("bad entity class in {key:?}")))?;
            let id: usize = id
                .parse()
                .map_err(|_| DeError::custom(format!("bad entity id in {key:?}")))?;
            map.insert(EntityRef::new(class, id), value);
        }
        Ok(FeatureMap { map })
    }
}

impl FeatureMap {
    pub fn new() -> Self {
        FeatureMap::default()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn insert(&mut self, entity: EntityRef, features: Vec<f64>) {
        self.map.insert(entity, features);
    }

    /// Feature vector of `entity`; the empty slice when absent.
    pub fn get(&self, entity: EntityRef) -> &[f64] {
        self.map.get(&entity).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn remove(&mut self, entity: EntityRef) -> Option<Vec<f64>> {
        self.map.remove(&entity)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&EntityRef, &Vec<f64>)> {
        self.map.iter()
    }

    /// Width of the vectors stored for `class`, if any entry exists.
    pub fn class_width(&self, class: EntityClass) -> Option<usize> {
        self.map
            .iter()
            .find(|(e, _)| e.class == class)
            .map(|(_, v)| v.len())
    }

    /// Width over all classes, when uniform. `None` if the map is empty.
    pub fn uniform_width(&self) -> Option<usize> {
        let mut widths = self.map.values().map(Vec::len);
        let first = widths.next()?;
        widths.all(|w| w == first).then_some(first)
    }

    /// Rebuilds the map through an entity renaming. Entries whose entity is
    /// not renamed are dropped; `rename` must be injective on the support.
    pub fn renamed(&self, mut rename: impl FnMut(EntityRef) -> Option<EntityRef>) -> FeatureMap {
        let mut out = FeatureMap::new();
        for (e, v) in &self.map {
            if let Some(e2) = rename(*e) {
                out.insert(e2, v.clone());
            }
        }
        out
    }
}

impl FromIterator<(EntityRef, Vec<f64>)> for FeatureMap {
    fn from_iter<T: IntoIterator<Item = (EntityRef, Vec<f64>)>>(iter: T) -> Self {
        FeatureMap {
            map: iter.into_iter().collect(),
        }
    }
}
