use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CorpusError;

const DEFAULT_INVENTORY: &str = include_str!("../../data/default_inventory.json");

/// The set of code points that mark a grapheme cluster as a brevigraph.
///
/// A cluster is a brevigraph as soon as one of its code points is listed in
/// `code_points`, is one of the `combining_marks`, or falls in one of the
/// `pua_ranges`. The shipped default is closed under canonical equivalence:
/// a precomposed letter is listed iff its canonical decomposition contains a
/// listed mark, so NFC and NFD encodings of a text classify identically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrevigraphInventory {
    code_points: BTreeSet<char>,
    combining_marks: BTreeSet<char>,
    pua_ranges: Vec<(char, char)>,
}

#[derive(Serialize, Deserialize)]
struct InventoryFile {
    code_points: Vec<String>,
    combining_marks: Vec<String>,
    pua_ranges: Vec<[String; 2]>,
}

fn parse_hex(s: &str) -> Result<char, CorpusError> {
    let trimmed = s
        .trim()
        .trim_start_matches("U+")
        .trim_start_matches("u+")
        .trim_start_matches("0x");
    let value = u32::from_str_radix(trimmed, 16)
        .map_err(|_| CorpusError::InvalidInventory(format!("not a hex code point: {s:?}")))?;
    char::from_u32(value)
        .ok_or_else(|| CorpusError::InvalidInventory(format!("not a Unicode scalar value: {s:?}")))
}

fn is_basic_letter(c: char) -> bool {
    c.is_ascii_alphabetic()
}

impl BrevigraphInventory {
    pub fn new(
        code_points: impl IntoIterator<Item = char>,
        combining_marks: impl IntoIterator<Item = char>,
        pua_ranges: Vec<(char, char)>,
    ) -> Result<Self, CorpusError> {
        let inventory = Self {
            code_points: code_points.into_iter().collect(),
            combining_marks: combining_marks.into_iter().collect(),
            pua_ranges,
        };
        inventory.validate()?;
        Ok(inventory)
    }

    fn validate(&self) -> Result<(), CorpusError> {
        if let Some(c) = self
            .code_points
            .iter()
            .chain(self.combining_marks.iter())
            .find(|c| is_basic_letter(**c))
        {
            return Err(CorpusError::InvalidInventory(format!(
                "basic letter {c:?} cannot be a brevigraph"
            )));
        }
        for &(lo, hi) in &self.pua_ranges {
            if lo > hi {
                return Err(CorpusError::InvalidInventory(format!(
                    "range {:04X}..{:04X} is not well-ordered",
                    lo as u32, hi as u32
                )));
            }
            if ('A'..='z').any(|c| is_basic_letter(c) && (lo..=hi).contains(&c)) {
                return Err(CorpusError::InvalidInventory(format!(
                    "range {:04X}..{:04X} covers basic letters",
                    lo as u32, hi as u32
                )));
            }
        }
        Ok(())
    }

    /// The MUFI-oriented inventory shipped with the crate.
    pub fn default_mufi() -> Self {
        Self::from_json(DEFAULT_INVENTORY).expect("bundled inventory is valid")
    }

    pub fn from_json(json: &str) -> Result<Self, CorpusError> {
        let file: InventoryFile = serde_json::from_str(json)
            .map_err(|e| CorpusError::InvalidInventory(e.to_string()))?;
        let code_points = file
            .code_points
            .iter()
            .map(|s| parse_hex(s))
            .collect::<Result<Vec<_>, _>>()?;
        let combining_marks = file
            .combining_marks
            .iter()
            .map(|s| parse_hex(s))
            .collect::<Result<Vec<_>, _>>()?;
        let pua_ranges = file
            .pua_ranges
            .iter()
            .map(|[lo, hi]| Ok((parse_hex(lo)?, parse_hex(hi)?)))
            .collect::<Result<Vec<_>, CorpusError>>()?;
        Self::new(code_points, combining_marks, pua_ranges)
    }

    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let hex = |c: &char| format!("{:04X}", *c as u32);
        let file = InventoryFile {
            code_points: self.code_points.iter().map(hex).collect(),
            combining_marks: self.combining_marks.iter().map(hex).collect(),
            pua_ranges: self
                .pua_ranges
                .iter()
                .map(|(lo, hi)| [hex(lo), hex(hi)])
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("inventory serializes")
    }

    #[inline]
    pub fn contains(&self, c: char) -> bool {
        self.code_points.contains(&c)
            || self.combining_marks.contains(&c)
            || self
                .pua_ranges
                .iter()
                .any(|&(lo, hi)| (lo..=hi).contains(&c))
    }

    pub fn code_points(&self) -> impl Iterator<Item = char> + '_ {
        self.code_points.iter().copied()
    }

    pub fn combining_marks(&self) -> impl Iterator<Item = char> + '_ {
        self.combining_marks.iter().copied()
    }

    pub fn pua_ranges(&self) -> &[(char, char)] {
        &self.pua_ranges
    }
}

impl Default for BrevigraphInventory {
    fn default() -> Self {
        Self::default_mufi()
    }
}
