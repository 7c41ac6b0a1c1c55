use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bundled;
use crate::ingest::is_h_code;

pub const HGEN_HEADER: &str = "hgen-list/1";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HgenError {
    #[error("line 1: expected header `{HGEN_HEADER} <label>`")]
    MissingHeader,
    #[error("line {line}: {text:?} is not an H-code")]
    InvalidCode { line: usize, text: String },
}

/// The list of general hazard statements disclosed on a cover sheet.
///
/// File format: a `hgen-list/1 <label>` header, then one H-code per line.
/// Blank lines and `#` comments are ignored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralHazardList {
    pub label: String,
    pub codes: BTreeSet<String>,
}

impl GeneralHazardList {
    pub fn new(label: impl Into<String>, codes: impl IntoIterator<Item = String>) -> Result<Self, HgenError> {
        let codes: BTreeSet<String> = codes.into_iter().collect();
        if let Some(bad) = codes.iter().find(|c| !is_h_code(c)) {
            return Err(HgenError::InvalidCode {
                line: 0,
                text: bad.clone(),
            });
        }
        Ok(GeneralHazardList {
            label: label.into(),
            codes,
        })
    }

    pub fn empty(label: impl Into<String>) -> Self {
        GeneralHazardList {
            label: label.into(),
            codes: BTreeSet::new(),
        }
    }

    /// Every base H-code of GHS Rev.10.
    pub fn ghs_rev10() -> Self {
        Self::parse(bundled::HGEN_GHS_REV10).expect("bundled list is well-formed")
    }

    pub fn parse(text: &str) -> Result<Self, HgenError> {
        let mut lines = text.lines().enumerate();
        let label = lines
            .next()
            .and_then(|(_, l)| l.trim().strip_prefix(HGEN_HEADER))
            .filter(|rest| rest.starts_with(char::is_whitespace))
            .map(|rest| rest.trim().to_string())
            .filter(|l| !l.is_empty())
            .ok_or(HgenError::MissingHeader)?;
        let mut codes = BTreeSet::new();
        for (i, raw) in lines {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if !is_h_code(line) {
                return Err(HgenError::InvalidCode {
                    line: i + 1,
                    text: line.to_string(),
                });
            }
            codes.insert(line.to_string());
        }
        Ok(GeneralHazardList { label, codes })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{HGEN_HEADER} {}\n", self.label);
        for c in &self.codes {
            out.push_str(c);
            out.push('\n');
        }
        out
    }

    pub fn contains(&self, code: &str) -> bool {
        self.codes.contains(code)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_list() {
        let list = GeneralHazardList::ghs_rev10();
        assert_eq!(list.label, "ghs-rev10");
        assert!(list.contains("H319"));
        assert!(!list.contains("H350i"));
        assert_eq!(GeneralHazardList::parse(&list.to_text()).unwrap(), list);
    }

    #[test]
    fn errors() {
        assert_eq!(GeneralHazardList::parse(""), Err(HgenError::MissingHeader));
        assert_eq!(GeneralHazardList::parse("hgen-list/1\nH200"), Err(HgenError::MissingHeader));
        assert_eq!(
            GeneralHazardList::parse("hgen-list/1 x\n\nH2000\n"),
            Err(HgenError::InvalidCode {
                line: 3,
                text: "H2000".into()
            })
        );
    }
}
