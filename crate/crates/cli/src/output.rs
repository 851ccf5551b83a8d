//! Artifact writing: provenance blocks and atomic file replacement.

use crate::error::{CliError, CliResult};
use serde::Serialize;
use std::io::Write;
use std::path::Path;

pub const TOOL_NAME: &str = "incsense";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance block embedded in every artifact: enough to re-run exactly.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub config: serde_json::Value,
}

impl Provenance {
    pub fn new(seed: u64, config: serde_json::Value) -> Self {
        Self {
            tool: TOOL_NAME,
            version: TOOL_VERSION,
            seed,
            config,
        }
    }

    /// Comment header lines for CSV artifacts.
    pub fn csv_header(&self) -> String {
        let config = serde_json::to_string(&self.config).unwrap_or_else(|_| "{}".into());
        format!(
            "# tool={} version={}\n# seed={}\n# config={}\n",
            self.tool, self.version, self.seed, config
        )
    }
}

/// JSON artifact: provenance plus result payload.
pub fn json_artifact<T: Serialize>(provenance: &Provenance, result: &T) -> CliResult<String> {
    let value = serde_json::json!({
        "provenance": provenance,
        "result": result,
    });
    serde_json::to_string_pretty(&value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CliError::Validation(format!("serializing result: {e}")))
}

/// Write to the target atomically (temp file in the same directory, then
/// rename), or to stdout when no target is given.
pub fn emit(target: Option<&Path>, content: &str) -> CliResult<()> {
    match target {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(path) => {
            let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
            let mut tmp = match dir {
                Some(d) => tempfile::NamedTempFile::new_in(d),
                None => tempfile::NamedTempFile::new_in("."),
            }
            .map_err(|e| CliError::Io(format!("creating temp file: {e}")))?;
            tmp.write_all(content.as_bytes())
                .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
            tmp.persist(path)
                .map_err(|e| CliError::Io(format!("renaming into {}: {e}", path.display())))?;
            Ok(())
        }
    }
}
