use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::error::Result;
use crate::profile::Profile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Informational,
}

/// Outcome of one gate. `threshold` names the config entry it was judged by.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub status: Status,
    pub threshold: String,
    pub detail: String,
}

/// Result of a scenario run. Serializes with the keys `scenario`, `config`,
/// `findings`, `verdicts`, `artifacts` and `profiles`.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub config: BTreeMap<String, Value>,
    pub findings: BTreeMap<String, f64>,
    pub verdicts: BTreeMap<String, Verdict>,
    /// Paths relative to the output directory.
    pub artifacts: Vec<String>,
    pub profiles: Vec<String>,
    #[serde(skip)]
    files: Vec<(String, String)>,
    #[serde(skip)]
    tables: BTreeMap<String, Profile>,
}

impl ScenarioReport {
    pub(crate) fn new(scenario: &str) -> Self {
        ScenarioReport {
            scenario: scenario.to_string(),
            config: BTreeMap::new(),
            findings: BTreeMap::new(),
            verdicts: BTreeMap::new(),
            artifacts: Vec::new(),
            profiles: Vec::new(),
            files: Vec::new(),
            tables: BTreeMap::new(),
        }
    }

    pub(crate) fn echo(&mut self, key: &str, v: impl Serialize) {
        self.config.insert(
            key.to_string(),
            serde_json::to_value(v).unwrap_or(Value::Null),
        );
    }

    pub(crate) fn finding(&mut self, key: &str, v: f64) {
        self.findings.insert(key.to_string(), v);
    }

    /// Record a gate; a pass/fail verdict must name an echoed threshold.
    pub(crate) fn verdict(&mut self, key: &str, status: Status, threshold: &str, detail: String) {
        debug_assert!(
            threshold.is_empty() || self.config.contains_key(threshold),
            "{threshold}"
        );
        self.verdicts.insert(
            key.to_string(),
            Verdict {
                status,
                threshold: threshold.to_string(),
                detail,
            },
        );
    }

    pub(crate) fn gate(&mut self, key: &str, ok: bool, threshold: &str, detail: String) {
        let s = if ok { Status::Pass } else { Status::Fail };
        self.verdict(key, s, threshold, detail);
    }

    pub(crate) fn profile(&mut self, name: &str, p: Profile) {
        self.add_file(&format!("{name}.csv"), p.to_csv());
        self.profiles.push(name.to_string());
        self.tables.insert(name.to_string(), p);
    }

    pub(crate) fn add_file(&mut self, file: &str, content: String) {
        self.artifacts.push(format!("{}/{file}", self.scenario));
        self.files.push((file.to_string(), content));
    }

    /// A profile produced by the run.
    pub fn table(&self, name: &str) -> Option<&Profile> {
        self.tables.get(name)
    }

    /// CSV contents keyed by file name.
    pub fn files(&self) -> &[(String, String)] {
        &self.files
    }

    /// No gate failed.
    pub fn passed(&self) -> bool {
        self.verdicts.values().all(|v| v.status != Status::Fail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap_or_default() + "\n"
    }

    /// Write `report.json` and every artifact under `<outdir>/<scenario>/`;
    /// returns the report path.
    pub fn write(&self, outdir: &Path) -> Result<PathBuf> {
        let dir = outdir.join(&self.scenario);
        std::fs::create_dir_all(&dir)?;
        for (name, content) in &self.files {
            std::fs::File::create(dir.join(name))?.write_all(content.as_bytes())?;
        }
        let path = dir.join("report.json");
        std::fs::File::create(&path)?.write_all(self.to_json().as_bytes())?;
        Ok(path)
    }
}
