//! Competency framework catalog.
//!
//! The default catalog is the three-cycle Dublin Descriptor table (Bachelor, Master,
//! PhD across five skill families), shipped as a tab-separated data file so another
//! framework with the same shape can be substituted at load time.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::catalog_doc;

pub const LEVELS: u8 = 3;
pub const SKILLS_PER_LEVEL: u8 = 5;
pub const CATALOG_SIZE: usize = (LEVELS as usize) * (SKILLS_PER_LEVEL as usize);

const BUNDLED_CATALOG: &str = include_str!("../data/dublin_descriptors.tsv");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescriptorEntry {
    /// 1 = Bachelor, 2 = Master, 3 = PhD.
    pub level: u8,
    pub level_name: String,
    /// `<level>.<skill>`, e.g. `1.1`.
    pub skill_id: String,
    pub skill_name: String,
    /// Always `<skill_id>.1`: one request per skill and level.
    pub request_id: String,
    pub request_text: String,
}

impl DescriptorEntry {
    /// Skill number within the level (the `s` in `<level>.<s>`).
    pub fn skill_number(&self) -> u8 {
        parse_skill_id(&self.skill_id).map_or(0, |(_, s)| s)
    }

    fn validate(&self) -> Result<()> {
        if !(1..=LEVELS).contains(&self.level) {
            return Err(Error::Validation(format!(
                "entry {}: level {} outside 1..={LEVELS}",
                self.skill_id, self.level
            )));
        }
        match parse_skill_id(&self.skill_id) {
            Some((level, skill))
                if level == self.level && (1..=SKILLS_PER_LEVEL).contains(&skill) => {}
            _ => {
                return Err(Error::Validation(format!(
                    "skill_id `{}` does not match `{}.<1..{SKILLS_PER_LEVEL}>`",
                    self.skill_id, self.level
                )))
            }
        }
        if self.request_id != format!("{}.1", self.skill_id) {
            return Err(Error::Validation(format!(
                "request_id `{}` must be `{}.1`",
                self.request_id, self.skill_id
            )));
        }
        if self.request_text.trim().is_empty() {
            return Err(Error::Validation(format!(
                "entry {}: empty request_text",
                self.skill_id
            )));
        }
        Ok(())
    }
}

fn parse_skill_id(id: &str) -> Option<(u8, u8)> {
    let (level, skill) = id.split_once('.')?;
    Some((level.parse().ok()?, skill.parse().ok()?))
}

/// Validated, immutable collection of descriptor entries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DescriptorCatalog {
    entries: Vec<DescriptorEntry>,
}

impl DescriptorCatalog {
    /// Validates entries and orders them by (skill number, level).
    pub fn from_entries(mut entries: Vec<DescriptorEntry>) -> Result<Self> {
        for e in &entries {
            e.validate()?;
        }
        let mut seen = HashSet::new();
        for e in &entries {
            if !seen.insert((e.level, e.skill_id.as_str())) {
                return Err(Error::Validation(format!(
                    "duplicate entry for level {} skill `{}`",
                    e.level, e.skill_id
                )));
            }
        }
        if entries.len() != CATALOG_SIZE {
            return Err(Error::Validation(format!(
                "catalog has {} entries, expected {CATALOG_SIZE}",
                entries.len()
            )));
        }
        entries.sort_by_key(|e| (e.skill_number(), e.level));
        Ok(Self { entries })
    }

    /// The bundled Dublin Descriptor catalog.
    pub fn bundled() -> Self {
        load_catalog(BUNDLED_CATALOG).expect("bundled catalog is valid")
    }

    pub fn entries(&self) -> &[DescriptorEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lookup(&self, skill_id: &str) -> Result<&DescriptorEntry> {
        self.entries
            .iter()
            .find(|e| e.skill_id == skill_id)
            .ok_or_else(|| Error::NotFound(format!("skill `{skill_id}` not in catalog")))
    }

    pub fn contains(&self, skill_id: &str) -> bool {
        self.entries.iter().any(|e| e.skill_id == skill_id)
    }

    pub fn at_level(&self, level: u8) -> impl Iterator<Item = &DescriptorEntry> {
        self.entries.iter().filter(move |e| e.level == level)
    }
}

/// Parses and validates a catalog document (see [`crate::io::catalog_doc`]).
pub fn load_catalog(source: &str) -> Result<DescriptorCatalog> {
    DescriptorCatalog::from_entries(catalog_doc::parse(source)?)
}

pub fn bundled_source() -> &'static str {
    BUNDLED_CATALOG
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_catalog_has_table_entries() {
        let cat = DescriptorCatalog::bundled();
        assert_eq!(cat.len(), 15);
        let first = &cat.entries()[0];
        assert_eq!(first.level, 1);
        assert_eq!(first.skill_id, "1.1");
        assert_eq!(first.skill_name, "Knowledge and understanding");
        assert_eq!(first.level_name, "Bachelor");
        for level in 1..=3 {
            assert_eq!(cat.at_level(level).count(), 5);
        }
    }

    #[test]
    fn bundled_order_is_skill_then_level() {
        let ids: Vec<_> = DescriptorCatalog::bundled()
            .entries()
            .iter()
            .map(|e| e.skill_id.clone())
            .collect();
        assert_eq!(&ids[..6], ["1.1", "2.1", "3.1", "1.2", "2.2", "3.2"]);
        assert_eq!(ids[14], "3.5");
    }

    #[test]
    fn lookup_known_and_unknown() {
        let cat = DescriptorCatalog::bundled();
        let e = cat.lookup("3.3").unwrap();
        assert_eq!(e.skill_name, "Forming judgments");
        assert_eq!(e.level, 3);
        assert_eq!(cat.lookup("1.5").unwrap().skill_name, "Learning skills");
        assert!(matches!(cat.lookup("9.9"), Err(Error::NotFound(_))));
    }

    #[test]
    fn citation_markers_are_stripped() {
        for e in DescriptorCatalog::bundled().entries() {
            assert!(!e.request_text.contains("[1]"), "{}", e.request_id);
            assert!(!e.skill_name.contains("[1]"), "{}", e.skill_id);
        }
    }

    #[test]
    fn empty_document_is_rejected() {
        let header = bundled_source().lines().next().unwrap();
        assert!(matches!(load_catalog(""), Err(Error::Validation(_))));
        assert!(matches!(load_catalog(header), Err(Error::Validation(_))));
    }

    #[test]
    fn duplicate_skill_is_rejected() {
        let dup = bundled_source()
            .lines()
            .find(|l| l.contains("\t2.3\t"))
            .unwrap();
        let doc = format!("{}{dup}\n", bundled_source());
        let err = load_catalog(&doc).unwrap_err();
        assert!(err.to_string().contains("duplicate"), "{err}");
    }

    #[test]
    fn wrong_count_is_rejected() {
        let doc: String = bundled_source()
            .lines()
            .take(10)
            .map(|l| format!("{l}\n"))
            .collect();
        let err = load_catalog(&doc).unwrap_err();
        assert!(err.to_string().contains("expected 15"), "{err}");
    }

    #[test]
    fn mismatched_request_id_is_rejected() {
        let doc = bundled_source().replacen("\t1.1.1\t", "\t1.1.2\t", 1);
        assert!(matches!(load_catalog(&doc), Err(Error::Validation(_))));
    }
}
