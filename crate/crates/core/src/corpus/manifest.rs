use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CorpusError;

/// A scribe's hand as labelled in the manifest. `gamma?` and `gamma` are
/// distinct labels; merging hands is left to the analysis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ScribeLabel(String);

impl ScribeLabel {
    pub fn new(name: impl Into<String>) -> Result<Self, CorpusError> {
        let name = name.into();
        if name.trim().is_empty() {
            return Err(CorpusError::InvalidLabel(name));
        }
        Ok(Self(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for ScribeLabel {
    type Error = CorpusError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<ScribeLabel> for String {
    fn from(label: ScribeLabel) -> Self {
        label.0
    }
}

impl fmt::Display for ScribeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub file: PathBuf,
    pub codex: String,
    pub unit: String,
    pub scribe: ScribeLabel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub date_from: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub date_to: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

impl ManifestEntry {
    pub fn date_range(&self) -> Option<(i32, i32)> {
        match (self.date_from, self.date_to) {
            (Some(from), Some(to)) => Some((from, to)),
            (Some(year), None) | (None, Some(year)) => Some((year, year)),
            (None, None) => None,
        }
    }
}

/// The list of production units making up a corpus. Entry order is kept;
/// relative file paths are resolved against the manifest's directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
    pub base_dir: PathBuf,
}

impl Manifest {
    pub fn from_entries(entries: Vec<ManifestEntry>, base_dir: PathBuf) -> Result<Self, CorpusError> {
        let mut seen = HashSet::new();
        for entry in &entries {
            if !seen.insert((entry.codex.as_str(), entry.unit.as_str())) {
                return Err(CorpusError::DuplicateUnit {
                    codex: entry.codex.clone(),
                    unit: entry.unit.clone(),
                });
            }
        }
        let manifest = Self { entries, base_dir };
        for entry in &manifest.entries {
            let path = manifest.resolve(entry);
            if !path.is_file() {
                return Err(CorpusError::MissingFile(path));
            }
        }
        Ok(manifest)
    }

    pub fn resolve(&self, entry: &ManifestEntry) -> PathBuf {
        if entry.file.is_absolute() {
            entry.file.clone()
        } else {
            self.base_dir.join(&entry.file)
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.entries).expect("manifest serializes")
    }
}

pub fn load_manifest(path: &Path) -> Result<Manifest, CorpusError> {
    let text = std::fs::read_to_string(path).map_err(|source| match source.kind() {
        std::io::ErrorKind::NotFound => CorpusError::MalformedManifest {
            path: path.to_path_buf(),
            reason: "file not found".into(),
        },
        _ => CorpusError::Io {
            path: path.to_path_buf(),
            source,
        },
    })?;
    let entries: Vec<ManifestEntry> =
        serde_json::from_str(&text).map_err(|e| CorpusError::MalformedManifest {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
    let base_dir = path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    Manifest::from_entries(entries, base_dir)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
        let path = dir.join(name);
        fs::write(&path, body).unwrap();
        path
    }

    #[test]
    fn loads_in_order() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "b.txt", "b");
        write(dir.path(), "a.txt", "a");
        let manifest = write(
            dir.path(),
            "manifest.json",
            r#"[
              {"file": "b.txt", "codex": "Vienna, ÖNB, SN 65", "unit": "II", "scribe": "alpha", "date_from": 1380, "date_to": 1400},
              {"file": "a.txt", "codex": "Ghent, UL, 1374", "unit": "I", "scribe": "gamma?"}
            ]"#,
        );
        let m = load_manifest(&manifest).unwrap();
        assert_eq!(m.entries.len(), 2);
        assert_eq!(m.entries[0].unit, "II");
        assert_eq!(m.entries[0].date_range(), Some((1380, 1400)));
        assert_eq!(m.entries[1].scribe.as_str(), "gamma?");
        assert_eq!(m.entries[1].date_range(), None);
    }

    #[test]
    fn duplicate_unit() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "a.txt", "a");
        let manifest = write(
            dir.path(),
            "m.json",
            r#"[{"file": "a.txt", "codex": "C", "unit": "I", "scribe": "alpha"},
                {"file": "a.txt", "codex": "C", "unit": "I", "scribe": "beta"}]"#,
        );
        assert!(matches!(
            load_manifest(&manifest),
            Err(CorpusError::DuplicateUnit { .. })
        ));
    }

    #[test]
    fn missing_file() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = write(
            dir.path(),
            "m.json",
            r#"[{"file": "absent.txt", "codex": "C", "unit": "I", "scribe": "alpha"}]"#,
        );
        assert!(matches!(load_manifest(&manifest), Err(CorpusError::MissingFile(_))));
    }

    #[test]
    fn malformed() {
        let dir = tempfile::tempdir().unwrap();
        let bad_json = write(dir.path(), "m1.json", "[{");
        let missing_field = write(dir.path(), "m2.json", r#"[{"file": "a.txt", "codex": "C"}]"#);
        let empty_scribe = write(
            dir.path(),
            "m3.json",
            r#"[{"file": "a.txt", "codex": "C", "unit": "I", "scribe": " "}]"#,
        );
        for path in [bad_json, missing_field, empty_scribe] {
            assert!(matches!(
                load_manifest(&path),
                Err(CorpusError::MalformedManifest { .. })
            ));
        }
    }

    #[test]
    fn empty_manifest_is_valid() {
        let dir = tempfile::tempdir().unwrap();
        let path = write(dir.path(), "m.json", "[]");
        assert!(load_manifest(&path).unwrap().entries.is_empty());
    }
}
