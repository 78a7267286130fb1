//! Furniture objects and the catalog that defines descriptor axes.
//!
//! Catalogs are read from TOML (one `[[object]]` table per entry) or from the
//! equivalent JSON document `{"objects": [...]}`. See `data/CATALOG_FORMAT.md`.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::need::{EffectVector, Need, NEED_MAX};

/// Catalog shipped with the crate.
pub const DEFAULT_CATALOG_TOML: &str = include_str!("../data/catalog.toml");

/// Objects that must exist for the seed room and the design-balance checks.
pub const REQUIRED_OBJECTS: [&str; 7] = [
    "toilet",
    "bed",
    "fridge",
    "coffee_maker",
    "bidet",
    "foosball_table",
    "table_tennis",
];

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("failed to read catalog `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to parse catalog: {0}")]
    Parse(String),
    #[error("invalid catalog entry `{entry}`: {reason}")]
    Validation { entry: String, reason: String },
    #[error("unknown object id `{0}`")]
    UnknownObject(String),
}

/// How strictly a loaded catalog is checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Validation {
    /// Structural checks plus the required object set and balance constraints.
    #[default]
    Strict,
    /// Structural checks only (unique ids and chars, nonzero finite effects).
    NoRequiredObjects,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FurnitureObject {
    pub id: String,
    pub display_char: char,
    pub effects: EffectVector,
}

/// On-disk record. Effect fields default to zero so files can omit them.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectRecord {
    id: String,
    #[serde(rename = "char")]
    display_char: String,
    #[serde(default)]
    bladder: f64,
    #[serde(default)]
    fun: f64,
    #[serde(default)]
    hunger: f64,
    #[serde(default)]
    social: f64,
    #[serde(default)]
    energy: f64,
    #[serde(default)]
    hygiene: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct CatalogDocument {
    #[serde(alias = "objects", rename = "object")]
    objects: Vec<ObjectRecord>,
}

#[derive(Debug, Serialize)]
struct JsonCatalogDocument<'a> {
    objects: &'a [ObjectRecord],
}

/// Ordered, immutable set of furniture objects.
#[derive(Debug, Clone)]
pub struct Catalog {
    objects: Vec<FurnitureObject>,
    by_id: HashMap<String, usize>,
}

impl PartialEq for Catalog {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects
    }
}

impl Catalog {
    /// The catalog bundled with the crate, strictly validated.
    pub fn default_catalog() -> Self {
        Self::from_toml_str(DEFAULT_CATALOG_TOML, Validation::Strict)
            .expect("bundled catalog is valid")
    }

    pub fn from_objects(
        objects: Vec<FurnitureObject>,
        validation: Validation,
    ) -> Result<Self, CatalogError> {
        let mut by_id = HashMap::with_capacity(objects.len());
        let mut chars = HashMap::with_capacity(objects.len());
        for (i, obj) in objects.iter().enumerate() {
            validate_object(obj)?;
            if by_id.insert(obj.id.clone(), i).is_some() {
                return Err(invalid(&obj.id, "duplicate id"));
            }
            if let Some(prev) = chars.insert(obj.display_char, &obj.id) {
                return Err(invalid(
                    &obj.id,
                    format!(
                        "display char `{}` already used by `{prev}`",
                        obj.display_char
                    ),
                ));
            }
        }
        let catalog = Self { objects, by_id };
        if validation == Validation::Strict {
            catalog.check_required()?;
        }
        Ok(catalog)
    }

    pub fn from_toml_str(text: &str, validation: Validation) -> Result<Self, CatalogError> {
        let doc: CatalogDocument =
            toml::from_str(text).map_err(|e| CatalogError::Parse(e.to_string()))?;
        Self::from_document(doc, validation)
    }

    pub fn from_json_str(text: &str, validation: Validation) -> Result<Self, CatalogError> {
        let doc: CatalogDocument =
            serde_json::from_str(text).map_err(|e| CatalogError::Parse(e.to_string()))?;
        Self::from_document(doc, validation)
    }

    fn from_document(doc: CatalogDocument, validation: Validation) -> Result<Self, CatalogError> {
        let objects = doc
            .objects
            .into_iter()
            .map(FurnitureObject::try_from)
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_objects(objects, validation)
    }

    pub fn to_toml_string(&self) -> String {
        let doc = CatalogDocument {
            objects: self.records(),
        };
        toml::to_string(&doc).expect("catalog serializes to TOML")
    }

    pub fn to_json_string(&self) -> String {
        let records = self.records();
        serde_json::to_string_pretty(&JsonCatalogDocument { objects: &records })
            .expect("catalog serializes to JSON")
    }

    fn records(&self) -> Vec<ObjectRecord> {
        self.objects.iter().map(ObjectRecord::from).collect()
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn objects(&self) -> &[FurnitureObject] {
        &self.objects
    }

    pub fn get(&self, index: usize) -> Option<&FurnitureObject> {
        self.objects.get(index)
    }

    /// Position of `id` on the descriptor axes.
    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.by_id.get(id).copied()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.by_id.contains_key(id)
    }

    pub fn object(&self, id: &str) -> Result<&FurnitureObject, CatalogError> {
        self.index_of(id)
            .map(|i| &self.objects[i])
            .ok_or_else(|| CatalogError::UnknownObject(id.to_string()))
    }

    pub fn effect_of(&self, id: &str) -> Result<EffectVector, CatalogError> {
        self.object(id).map(|o| o.effects)
    }

    fn check_required(&self) -> Result<(), CatalogError> {
        for id in REQUIRED_OBJECTS {
            if !self.contains(id) {
                return Err(invalid(id, "required object missing"));
            }
        }
        let eff = |id: &str| self.objects[self.by_id[id]].effects;
        let (toilet, bed, coffee, bidet) =
            (eff("toilet"), eff("bed"), eff("coffee_maker"), eff("bidet"));
        if coffee[Need::Energy] <= bed[Need::Energy] {
            return Err(invalid(
                "coffee_maker",
                "energy effect must exceed the bed's energy effect",
            ));
        }
        if coffee[Need::Hunger] <= 0.0 {
            return Err(invalid("coffee_maker", "hunger effect must be positive"));
        }
        if bidet[Need::Bladder] != toilet[Need::Bladder] {
            return Err(invalid(
                "bidet",
                "bladder effect must equal the toilet's bladder effect",
            ));
        }
        if bidet[Need::Fun] <= 0.0 {
            return Err(invalid("bidet", "fun effect must be positive"));
        }
        let social_fun = |e: &EffectVector| e[Need::Social] + e[Need::Fun];
        let best = self
            .objects
            .iter()
            .map(|o| social_fun(&o.effects))
            .fold(f64::NEG_INFINITY, f64::max);
        for id in ["foosball_table", "table_tennis"] {
            if social_fun(&eff(id)) < best {
                return Err(invalid(
                    id,
                    "social + fun effect must be the largest in the catalog",
                ));
            }
        }
        Ok(())
    }
}

/// Loads a catalog file, choosing JSON for `.json` paths and TOML otherwise.
pub fn load_catalog(
    path: impl AsRef<Path>,
    validation: Validation,
) -> Result<Catalog, CatalogError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| CatalogError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let is_json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
        || text.trim_start().starts_with('{');
    if is_json {
        Catalog::from_json_str(&text, validation)
    } else {
        Catalog::from_toml_str(&text, validation)
    }
}

fn invalid(entry: &str, reason: impl Into<String>) -> CatalogError {
    CatalogError::Validation {
        entry: entry.to_string(),
        reason: reason.into(),
    }
}

fn validate_object(obj: &FurnitureObject) -> Result<(), CatalogError> {
    if obj.id.is_empty() {
        return Err(invalid("<empty>", "id must not be empty"));
    }
    let c = obj.display_char;
    if !c.is_ascii_graphic() || c == '.' {
        return Err(invalid(
            &obj.id,
            format!("display char `{c}` must be a printable ASCII character other than `.`"),
        ));
    }
    if !obj.effects.is_finite() {
        return Err(invalid(&obj.id, "effects must be finite"));
    }
    if obj.effects.is_zero() {
        return Err(invalid(
            &obj.id,
            "effect vector must have a nonzero component",
        ));
    }
    if obj.effects.max_component() >= NEED_MAX {
        return Err(invalid(
            &obj.id,
            format!("no effect may reach {NEED_MAX} in a single interaction"),
        ));
    }
    Ok(())
}

impl TryFrom<ObjectRecord> for FurnitureObject {
    type Error = CatalogError;

    fn try_from(r: ObjectRecord) -> Result<Self, CatalogError> {
        let mut chars = r.display_char.chars();
        let display_char = match (chars.next(), chars.next()) {
            (Some(c), None) => c,
            _ => {
                return Err(invalid(
                    &r.id,
                    format!("char must be a single character, got `{}`", r.display_char),
                ))
            }
        };
        Ok(Self {
            id: r.id,
            display_char,
            effects: EffectVector::new([r.bladder, r.fun, r.hunger, r.social, r.energy, r.hygiene]),
        })
    }
}

impl From<&FurnitureObject> for ObjectRecord {
    fn from(o: &FurnitureObject) -> Self {
        let e = o.effects;
        Self {
            id: o.id.clone(),
            display_char: o.display_char.to_string(),
            bladder: e[Need::Bladder],
            fun: e[Need::Fun],
            hunger: e[Need::Hunger],
            social: e[Need::Social],
            energy: e[Need::Energy],
            hygiene: e[Need::Hygiene],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obj(id: &str, c: char, effects: [f64; 6]) -> FurnitureObject {
        FurnitureObject {
            id: id.into(),
            display_char: c,
            effects: EffectVector::new(effects),
        }
    }

    #[test]
    fn default_catalog_has_seventy_objects() {
        assert_eq!(Catalog::default_catalog().len(), 70);
    }

    #[test]
    fn bidet_matches_toilet_bladder_and_adds_fun() {
        let cat = Catalog::default_catalog();
        let bidet = cat.effect_of("bidet").unwrap();
        let toilet = cat.effect_of("toilet").unwrap();
        assert_eq!(bidet[Need::Bladder], toilet[Need::Bladder]);
        assert!(bidet[Need::Fun] > 0.0);
        assert_eq!(toilet[Need::Fun], 0.0);
    }

    #[test]
    fn unknown_id_is_an_error() {
        let cat = Catalog::default_catalog();
        assert!(matches!(
            cat.effect_of("jacuzzi"),
            Err(CatalogError::UnknownObject(id)) if id == "jacuzzi"
        ));
    }

    #[test]
    fn duplicate_id_rejected() {
        let err = Catalog::from_objects(
            vec![
                obj("bed", 'B', [0.0, 0.0, 0.0, 0.0, 3.0, 0.0]),
                obj("bed", 'b', [0.0, 0.0, 0.0, 0.0, 2.0, 0.0]),
            ],
            Validation::NoRequiredObjects,
        )
        .unwrap_err();
        assert!(matches!(err, CatalogError::Validation { entry, .. } if entry == "bed"));
    }

    #[test]
    fn duplicate_char_rejected() {
        let err = Catalog::from_objects(
            vec![
                obj("bed", 'B', [0.0, 0.0, 0.0, 0.0, 3.0, 0.0]),
                obj("bench", 'B', [0.0, 0.0, 0.0, 1.0, 0.0, 0.0]),
            ],
            Validation::NoRequiredObjects,
        )
        .unwrap_err();
        assert!(matches!(err, CatalogError::Validation { entry, .. } if entry == "bench"));
    }

    #[test]
    fn zero_effect_rejected() {
        let err = Catalog::from_objects(
            vec![obj("rock", 'r', [0.0; 6])],
            Validation::NoRequiredObjects,
        )
        .unwrap_err();
        assert!(err.to_string().contains("rock"));
    }

    #[test]
    fn max_out_effect_rejected() {
        let err = Catalog::from_objects(
            vec![obj("miracle_bed", 'M', [0.0, 0.0, 0.0, 0.0, 10.0, 0.0])],
            Validation::NoRequiredObjects,
        )
        .unwrap_err();
        assert!(err.to_string().contains("miracle_bed"));
    }

    #[test]
    fn missing_toilet_only_rejected_in_strict_mode() {
        let cat = Catalog::default_catalog();
        let objects: Vec<_> = cat
            .objects()
            .iter()
            .filter(|o| o.id != "toilet")
            .cloned()
            .collect();
        let err = Catalog::from_objects(objects.clone(), Validation::Strict).unwrap_err();
        assert!(matches!(err, CatalogError::Validation { entry, .. } if entry == "toilet"));
        let relaxed = Catalog::from_objects(objects, Validation::NoRequiredObjects).unwrap();
        assert_eq!(relaxed.len(), 69);
    }

    #[test]
    fn nerfed_coffee_maker_fails_balance_check() {
        let cat = Catalog::default_catalog();
        let objects: Vec<_> = cat
            .objects()
            .iter()
            .cloned()
            .map(|mut o| {
                if o.id == "coffee_maker" {
                    o.effects[Need::Energy] = 1.0;
                }
                o
            })
            .collect();
        let err = Catalog::from_objects(objects.clone(), Validation::Strict).unwrap_err();
        assert!(err.to_string().contains("coffee_maker"));
        assert!(Catalog::from_objects(objects, Validation::NoRequiredObjects).is_ok());
    }

    #[test]
    fn multi_char_display_rejected() {
        let text = "[[object]]\nid = \"bed\"\nchar = \"BB\"\nenergy = 3.0\n";
        let err = Catalog::from_toml_str(text, Validation::NoRequiredObjects).unwrap_err();
        assert!(err.to_string().contains("bed"));
    }

    #[test]
    fn malformed_file_is_parse_error() {
        let err = Catalog::from_toml_str("[[object]\nid=", Validation::Strict).unwrap_err();
        assert!(matches!(err, CatalogError::Parse(_)));
    }

    #[test]
    fn json_rendering_accepted() {
        let cat = Catalog::default_catalog();
        let json = cat.to_json_string();
        assert_eq!(
            Catalog::from_json_str(&json, Validation::Strict).unwrap(),
            cat
        );
    }
}
