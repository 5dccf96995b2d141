//! Batches of named experiments read from a JSON file.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::mc::{mc_irreducibility, ExperimentConfig};
use super::subset::{random_subset_alpha, SubsetConfig};
use super::SCHEMA_VERSION;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SuiteTask {
    McIrreducibility(ExperimentConfig),
    RandomSubset(SubsetConfig),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteEntry {
    pub name: String,
    #[serde(flatten)]
    pub task: SuiteTask,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    #[serde(default)]
    pub schema_version: Option<u32>,
    #[serde(default)]
    pub entries: Vec<SuiteEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub ok: bool,
    /// Report file, relative to the output directory.
    pub report: Option<String>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub entries: Vec<ManifestEntry>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn run_task(task: &SuiteTask) -> Result<String> {
    let json = match task {
        SuiteTask::McIrreducibility(c) => serde_json::to_string_pretty(&mc_irreducibility(c)?)?,
        SuiteTask::RandomSubset(c) => serde_json::to_string_pretty(&random_subset_alpha(c)?)?,
    };
    Ok(json + "\n")
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
        && !name.starts_with('.')
}

/// Runs every entry of the suite file in order, writing `NAME.json` for each
/// success and `manifest.json` listing all entries into `out_dir`. A failing
/// entry is recorded in the manifest and does not stop the others.
pub fn run_suite(config: &Path, out_dir: &Path) -> Result<Manifest> {
    let text = std::fs::read_to_string(config).map_err(io_err(config))?;
    let suite: SuiteConfig = serde_json::from_str(&text)?;
    if let Some(v) = suite.schema_version.filter(|&v| v != SCHEMA_VERSION) {
        return Err(Error::parse(format!("unsupported schema version {v}")));
    }
    std::fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let mut seen = BTreeSet::new();
    let mut entries = Vec::new();
    for e in &suite.entries {
        let result = if !valid_name(&e.name) {
            Err(Error::invalid(format!("bad entry name {:?}", e.name)))
        } else if !seen.insert(e.name.clone()) {
            Err(Error::invalid(format!("duplicate entry name {:?}", e.name)))
        } else {
            run_task(&e.task).and_then(|json| {
                let file = format!("{}.json", e.name);
                let path: PathBuf = out_dir.join(&file);
                std::fs::write(&path, json).map_err(io_err(&path))?;
                Ok(file)
            })
        };
        entries.push(match result {
            Ok(file) => ManifestEntry { name: e.name.clone(), ok: true, report: Some(file), error: None },
            Err(err) => ManifestEntry { name: e.name.clone(), ok: false, report: None, error: Some(err.to_string()) },
        });
    }
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        entries,
    };
    let path = out_dir.join("manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n").map_err(io_err(&path))?;
    Ok(manifest)
}
