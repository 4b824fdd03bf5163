//! Federation manifests: one `member <id> <sparql|tpf|brtpf> <path>` line per
//! member, `#` comment lines, data paths relative to the manifest.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::{Federation, FederationError, InterfaceKind, Member, MemberId};
use crate::rdf::{parse_ntriples, Graph, NTriplesError};

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{}: {source}", path.display())]
    Data {
        path: PathBuf,
        #[source]
        source: NTriplesError,
    },
    #[error(transparent)]
    Federation(#[from] FederationError),
}

pub fn load_manifest(path: &Path) -> Result<Federation, ManifestError> {
    let text = fs::read_to_string(path).map_err(|source| ManifestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_manifest(&text, |rel| {
        let full = base.join(rel);
        let data = fs::read_to_string(&full).map_err(|source| ManifestError::Io {
            path: full.clone(),
            source,
        })?;
        parse_ntriples(&data).map_err(|source| ManifestError::Data { path: full, source })
    })
}

/// Parses manifest text, resolving each data path through `load`.
pub fn parse_manifest<F>(text: &str, mut load: F) -> Result<Federation, ManifestError>
where
    F: FnMut(&str) -> Result<Graph, ManifestError>,
{
    let mut members = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let syntax = |message: String| ManifestError::Syntax {
            line: idx + 1,
            message,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [keyword, id, kind, path] = fields[..] else {
            return Err(syntax(format!(
                "expected `member <id> <sparql|tpf|brtpf> <path>`, found {line:?}"
            )));
        };
        if keyword != "member" {
            return Err(syntax(format!("unknown directive {keyword:?}")));
        }
        let id = MemberId::new(id).map_err(|e| syntax(e.to_string()))?;
        let kind: InterfaceKind = kind
            .parse()
            .map_err(|e: FederationError| syntax(e.to_string()))?;
        members.push(Member::new(id, kind, load(path)?));
    }
    Ok(Federation::new(members)?)
}
