use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::format::round_json;
use crate::jobs::{Data, Job};

pub const MANIFEST_SCHEMA: &str = "entrobound-manifest-v1";

/// Record of one run: the full job (inputs and solver settings), the build
/// that ran it, and the numeric summary a rerun must reproduce.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub job: Job,
    pub version: String,
    pub git: Option<String>,
    pub wall_seconds: f64,
    pub summary: Value,
}

impl RunManifest {
    pub fn new(job: Job, wall_seconds: f64, mut summary: Value) -> Self {
        round_json(&mut summary);
        RunManifest {
            schema: MANIFEST_SCHEMA.into(),
            job,
            version: env!("CARGO_PKG_VERSION").into(),
            git: option_env!("ENTROBOUND_GIT").map(str::to_owned),
            wall_seconds,
            summary,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let m: RunManifest = serde_json::from_str(&text)
            .with_context(|| format!("parsing manifest {}", path.display()))?;
        if m.schema != MANIFEST_SCHEMA {
            bail!("unknown manifest schema {:?}", m.schema);
        }
        Ok(m)
    }

    fn to_value(&self) -> Result<Value> {
        let mut v = serde_json::to_value(self)?;
        round_json(&mut v);
        Ok(v)
    }

    /// Path of the manifest written beside `out`.
    pub fn path_for(out: &Path) -> PathBuf {
        let mut s = out.as_os_str().to_owned();
        s.push(".manifest.json");
        PathBuf::from(s)
    }

    /// Writes `data` to `out` with the manifest beside it. Without `out`,
    /// JSON results are printed together with the manifest as
    /// `{"result", "manifest"}`, and CSV goes to stdout with the manifest on
    /// stderr.
    pub fn emit(&self, data: &Data, out: Option<&Path>) -> Result<()> {
        let manifest = self.to_value()?;
        match out {
            Some(path) => {
                let body = match data {
                    Data::Json(v) => {
                        let mut v = v.clone();
                        round_json(&mut v);
                        serde_json::to_string_pretty(&v)? + "\n"
                    }
                    Data::Csv(text) => text.clone(),
                };
                std::fs::write(path, body)
                    .with_context(|| format!("writing {}", path.display()))?;
                let mpath = Self::path_for(path);
                std::fs::write(&mpath, serde_json::to_string_pretty(&manifest)? + "\n")
                    .with_context(|| format!("writing {}", mpath.display()))?;
            }
            None => match data {
                Data::Json(v) => {
                    let mut v = json!({"result": v, "manifest": manifest});
                    round_json(&mut v);
                    writeln!(
                        std::io::stdout().lock(),
                        "{}",
                        serde_json::to_string_pretty(&v)?
                    )?;
                }
                Data::Csv(text) => {
                    std::io::stdout().write_all(text.as_bytes())?;
                    eprintln!("{}", serde_json::to_string(&manifest)?);
                }
            },
        }
        Ok(())
    }
}
