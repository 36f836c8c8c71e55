use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::IngestError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    Aiid,
    Aiaaic,
}

pub const AIID_FIELDS: [&str; 7] = [
    "Incident-id",
    "Title",
    "Description",
    "Date",
    "Alleged deployer of AI system",
    "Alleged developer of AI system",
    "Alleged harmed or nearly harmed parties",
];

/// AIAAIC export columns. The harm group is split into one column per
/// external/internal harm kind; those columns are only present in exports
/// that include harm data.
pub const AIAAIC_FIELDS: [&str; 23] = [
    "AIAAIC ID",
    "Headline/title",
    "Type",
    "Released",
    "Occurred",
    "Country(ies)",
    "Sector(s)",
    "Deployer(s)",
    "Developer(s)",
    "System name(s)",
    "Technology(ies)",
    "Purpose(s)",
    "Media trigger(s)",
    "Issue(s)",
    "Transparency",
    "External harms (Individual)",
    "External harms (Societal)",
    "External harms (Environmental)",
    "Internal harms (Strategic/reputational)",
    "Internal harms (Operational)",
    "Internal harms (Financial)",
    "Internal harms (Legal/regulatory)",
    "Description/links",
];

impl SourceKind {
    pub fn fields(self) -> &'static [&'static str] {
        match self {
            SourceKind::Aiid => &AIID_FIELDS,
            SourceKind::Aiaaic => &AIAAIC_FIELDS,
        }
    }

    pub fn id_field(self) -> &'static str {
        self.fields()[0]
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SourceKind::Aiid => "aiid",
            SourceKind::Aiaaic => "aiaaic",
        }
    }

    /// Declared spelling of `header`, matched case-insensitively.
    pub fn canonical_header(self, header: &str) -> Option<&'static str> {
        let header = header.trim();
        self.fields()
            .iter()
            .copied()
            .find(|f| f.eq_ignore_ascii_case(header))
    }
}

impl fmt::Display for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SourceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "aiid" => Ok(SourceKind::Aiid),
            "aiaaic" => Ok(SourceKind::Aiaaic),
            _ => Err(format!("unknown source `{s}` (expected aiid or aiaaic)")),
        }
    }
}

/// One export row before harmonization. Only nonempty cells are kept, in
/// header order, under their declared column names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SourceRecord {
    pub source_kind: SourceKind,
    pub source_id: String,
    raw_fields: Vec<(String, String)>,
}

impl SourceRecord {
    /// Builds a record, rejecting any field name outside the declared list
    /// for `kind`.
    pub fn new<I, K, V>(kind: SourceKind, source_id: impl Into<String>, fields: I) -> Result<Self, IngestError>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: Into<String>,
    {
        let mut raw_fields = Vec::new();
        for (name, value) in fields {
            let canonical = kind.canonical_header(name.as_ref()).ok_or_else(|| IngestError::UnknownHeader {
                header: name.as_ref().to_string(),
                source_kind: kind,
            })?;
            let value = value.into();
            let value = value.trim();
            if !value.is_empty() {
                raw_fields.push((canonical.to_string(), value.to_string()));
            }
        }
        Ok(Self {
            source_kind: kind,
            source_id: source_id.into(),
            raw_fields,
        })
    }

    pub fn get(&self, field: &str) -> Option<&str> {
        self.raw_fields
            .iter()
            .find(|(k, _)| k == field)
            .map(|(_, v)| v.as_str())
    }

    pub fn fields(&self) -> impl Iterator<Item = (&str, &str)> {
        self.raw_fields.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

/// Parses an RFC 4180 CSV export with a header row. Headers are matched
/// case-insensitively against the declared columns for `kind`; short rows
/// yield records with absent fields.
pub fn parse_source_csv(bytes: &[u8], kind: SourceKind) -> Result<Vec<SourceRecord>, IngestError> {
    let bytes = bytes.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(bytes);
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Ok(Vec::new());
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(bytes);

    let headers = reader
        .headers()
        .map_err(|e| IngestError::Parse(e.to_string()))?
        .clone();
    let mut columns = Vec::with_capacity(headers.len());
    for header in headers.iter() {
        let canonical = kind.canonical_header(header).ok_or_else(|| IngestError::UnknownHeader {
            header: header.to_string(),
            source_kind: kind,
        })?;
        if columns.contains(&canonical) {
            return Err(IngestError::Parse(format!("duplicate header `{canonical}`")));
        }
        columns.push(canonical);
    }

    let mut out = Vec::new();
    for (row, result) in reader.records().enumerate() {
        let record = result.map_err(|e| IngestError::Parse(e.to_string()))?;
        if record.len() > columns.len() {
            return Err(IngestError::Parse(format!(
                "row {} has {} cells but the header has {}",
                row + 1,
                record.len(),
                columns.len()
            )));
        }
        if record.iter().all(|c| c.trim().is_empty()) {
            continue;
        }
        let pairs: Vec<(&str, &str)> = columns.iter().copied().zip(record.iter()).collect();
        let source_id = pairs
            .iter()
            .find(|(k, v)| *k == kind.id_field() && !v.trim().is_empty())
            .map(|(_, v)| v.trim().to_string())
            .unwrap_or_else(|| format!("row-{}", row + 1));
        out.push(SourceRecord::new(kind, source_id, pairs)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_aiid_headers() {
        let csv = "Incident-id,Title,Description,Date,Alleged deployer of AI system,\
                   Alleged developer of AI system,Alleged harmed or nearly harmed parties\n\
                   12,T,S,2023-05-01,Dep,Dev,\"A, B\"\n";
        let rows = parse_source_csv(csv.as_bytes(), SourceKind::Aiid).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].source_id, "12");
        assert_eq!(rows[0].get("Alleged harmed or nearly harmed parties"), Some("A, B"));
    }

    #[test]
    fn header_only_is_empty() {
        let rows = parse_source_csv(b"Title,Description,Date\n", SourceKind::Aiid).unwrap();
        assert!(rows.is_empty());
        assert!(parse_source_csv(b"", SourceKind::Aiid).unwrap().is_empty());
    }

    #[test]
    fn unknown_header_rejected() {
        let err = parse_source_csv(b"Title,Severity\nx,y\n", SourceKind::Aiid).unwrap_err();
        assert!(matches!(err, IngestError::UnknownHeader { ref header, .. } if header == "Severity"));
        assert_eq!(err.code(), "UNKNOWN_HEADER");
        // AIAAIC columns are not AIID columns
        assert!(parse_source_csv(b"Headline/title\nx\n", SourceKind::Aiid).is_err());
    }

    #[test]
    fn case_insensitive_headers_and_short_rows() {
        let csv = "TITLE,description,date\nOnly title\n";
        let rows = parse_source_csv(csv.as_bytes(), SourceKind::Aiid).unwrap();
        assert_eq!(rows[0].get("Title"), Some("Only title"));
        assert_eq!(rows[0].get("Description"), None);
        assert_eq!(rows[0].source_id, "row-1");
    }

    #[test]
    fn malformed_csv_is_parse_error() {
        let err = parse_source_csv(b"Title,Date\na,b,c\n", SourceKind::Aiid).unwrap_err();
        assert_eq!(err.code(), "PARSE_ERROR");
        let err = parse_source_csv(b"Title,title\na,b\n", SourceKind::Aiid).unwrap_err();
        assert_eq!(err.code(), "PARSE_ERROR");
        let err = parse_source_csv(b"Title\n\xff\xfe\n", SourceKind::Aiid).unwrap_err();
        assert_eq!(err.code(), "PARSE_ERROR");
    }
}
