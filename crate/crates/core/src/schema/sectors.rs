use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub const DEFAULT_SECTORS: [&str; 7] = [
    "telecommunications",
    "energy",
    "finance",
    "transport",
    "healthcare",
    "water",
    "government",
];

/// Allowed values for `sectors_impacted`. Configurable; the default set
/// covers the usual critical-infrastructure sectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SectorVocabulary(BTreeSet<String>);

impl SectorVocabulary {
    pub fn new<I, S>(sectors: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self(sectors.into_iter().map(Into::into).collect())
    }

    pub fn contains(&self, sector: &str) -> bool {
        self.0.contains(sector)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    /// Best-effort folding of free-text sector names (as found in upstream
    /// exports) onto this vocabulary. Exact matches win; otherwise a few
    /// keyword stems are tried for the default sectors.
    pub fn fold(&self, raw: &str) -> Option<String> {
        let lower = raw.trim().to_lowercase();
        if self.contains(&lower) {
            return Some(lower);
        }
        const STEMS: &[(&str, &[&str])] = &[
            ("telecommunications", &["telecom", "telco", "mobile network", "broadband"]),
            ("energy", &["energy", "power", "utilit", "electric", "oil", "gas"]),
            ("finance", &["financ", "bank", "insurance", "trading"]),
            ("transport", &["transport", "automotive", "aviation", "logistics", "rail"]),
            ("healthcare", &["health", "medic", "hospital", "pharma"]),
            ("water", &["water"]),
            ("government", &["govt", "government", "public sector", "police", "military"]),
        ];
        STEMS
            .iter()
            .filter(|(sector, _)| self.contains(sector))
            .find(|(_, stems)| stems.iter().any(|s| lower.contains(s)))
            .map(|(sector, _)| (*sector).to_string())
    }
}

impl Default for SectorVocabulary {
    fn default() -> Self {
        Self::new(DEFAULT_SECTORS)
    }
}
