use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use axum::extract::FromRequestParts;
use axum::http::header::AUTHORIZATION;
use axum::http::request::Parts;
use serde::Serialize;

use crate::schema::AccessTier;

use super::error::ApiError;
use super::AppState;

/// Caller capability. Public reads published incidents, submitter can also
/// submit, reviewer can do everything.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ApiTier {
    Public,
    Submitter,
    Reviewer,
}

impl ApiTier {
    pub fn as_str(self) -> &'static str {
        match self {
            ApiTier::Public => "public",
            ApiTier::Submitter => "submitter",
            ApiTier::Reviewer => "reviewer",
        }
    }

    pub fn access(self) -> AccessTier {
        match self {
            ApiTier::Reviewer => AccessTier::Reviewer,
            _ => AccessTier::Public,
        }
    }
}

impl fmt::Display for ApiTier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ApiTier {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "public" => Ok(ApiTier::Public),
            "submitter" => Ok(ApiTier::Submitter),
            "reviewer" => Ok(ApiTier::Reviewer),
            _ => Err(format!("unknown tier `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Principal {
    /// `None` for anonymous callers.
    pub key_id: Option<String>,
    pub tier: ApiTier,
}

impl Principal {
    pub fn anonymous() -> Self {
        Self {
            key_id: None,
            tier: ApiTier::Public,
        }
    }

    pub fn require(&self, tier: ApiTier) -> Result<(), ApiError> {
        if self.tier >= tier {
            return Ok(());
        }
        if self.key_id.is_none() {
            Err(ApiError::unauthorized(format!("this endpoint needs a {tier} key")))
        } else {
            Err(ApiError::forbidden(format!(
                "key tier {} cannot use this endpoint (needs {tier})",
                self.tier
            )))
        }
    }
}

/// API keys, loaded from a text file with one `key_id tier secret` entry
/// per line. Blank lines and lines starting with `#` are ignored.
#[derive(Debug, Clone, Default)]
pub struct KeyRing {
    by_secret: HashMap<String, (String, ApiTier)>,
}

impl KeyRing {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut ring = KeyRing::default();
        let mut ids = std::collections::HashSet::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [key_id, tier, secret] = parts[..] else {
                return Err(format!("line {}: expected `key_id tier secret`", n + 1));
            };
            let tier: ApiTier = tier.parse().map_err(|e| format!("line {}: {e}", n + 1))?;
            if !ids.insert(key_id.to_string()) {
                return Err(format!("line {}: duplicate key id `{key_id}`", n + 1));
            }
            if ring
                .by_secret
                .insert(secret.to_string(), (key_id.to_string(), tier))
                .is_some()
            {
                return Err(format!("line {}: duplicate secret", n + 1));
            }
        }
        Ok(ring)
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn len(&self) -> usize {
        self.by_secret.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_secret.is_empty()
    }

    /// Resolves an `Authorization` header value. A missing header is the
    /// anonymous public caller; a present but unknown key is an error.
    pub fn authenticate(&self, header: Option<&str>) -> Result<Principal, ApiError> {
        let Some(value) = header else {
            return Ok(Principal::anonymous());
        };
        let secret = value
            .strip_prefix("Bearer ")
            .ok_or_else(|| ApiError::unauthorized("expected `Authorization: Bearer <key>`"))?;
        let (key_id, tier) = self
            .by_secret
            .get(secret.trim())
            .ok_or_else(|| ApiError::unauthorized("unknown API key"))?;
        Ok(Principal {
            key_id: Some(key_id.clone()),
            tier: *tier,
        })
    }
}

impl FromRequestParts<AppState> for Principal {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &AppState) -> Result<Self, Self::Rejection> {
        let header = match parts.headers.get(AUTHORIZATION) {
            None => None,
            Some(v) => Some(
                v.to_str()
                    .map_err(|_| ApiError::unauthorized("Authorization header is not ASCII"))?,
            ),
        };
        state.keys.authenticate(header)
    }
}
