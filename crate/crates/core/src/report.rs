//! Line-delimited JSON trial records and the TOML run-configuration file.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::pipeline::{ParamValue, SuiteConfig, TrialReport, Verdict};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutationRecord {
    pub name: String,
    pub parameters: BTreeMap<String, ParamValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl From<&Verdict> for VerdictRecord {
    fn from(v: &Verdict) -> Self {
        match v {
            Verdict::Pass => VerdictRecord {
                kind: v.kind().to_owned(),
                stage: None,
                detail: None,
            },
            Verdict::Violation { detail } => VerdictRecord {
                kind: v.kind().to_owned(),
                stage: None,
                detail: Some(detail.clone()),
            },
            Verdict::ProgramError { stage, message } => VerdictRecord {
                kind: v.kind().to_owned(),
                stage: Some(stage.as_str().to_owned()),
                detail: Some(message.clone()),
            },
        }
    }
}

/// One trial, as written to a report file. Contains no timestamps, so
/// identical runs produce identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub schema_version: u32,
    pub suite: String,
    pub variant: String,
    pub trial_index: u64,
    pub trial_seed: u64,
    pub mode: String,
    pub mutation: Option<MutationRecord>,
    pub verdict: VerdictRecord,
    pub m1_repr: Option<String>,
    pub m1_prime_repr: Option<String>,
}

impl From<&TrialReport> for ReportRecord {
    fn from(r: &TrialReport) -> Self {
        ReportRecord {
            schema_version: SCHEMA_VERSION,
            suite: r.suite.clone(),
            variant: r.variant_id.clone(),
            trial_index: r.trial_index,
            trial_seed: r.trial_seed,
            mode: r.mode.as_str().to_owned(),
            mutation: r.mutation.as_ref().map(|m| MutationRecord {
                name: m.name.clone(),
                parameters: m.parameters.clone(),
            }),
            verdict: VerdictRecord::from(&r.verdict),
            m1_repr: r.transcript.m1.clone(),
            m1_prime_repr: r.transcript.m1_prime.clone(),
        }
    }
}

impl ReportRecord {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("report records always serialize")
    }
}

/// Writes one JSON record per line, in the order given.
pub fn write_jsonl<W: Write>(mut out: W, reports: &[TrialReport]) -> io::Result<()> {
    for r in reports {
        writeln!(out, "{}", ReportRecord::from(r).to_line())?;
    }
    out.flush()
}

pub fn read_jsonl(text: &str) -> Result<Vec<ReportRecord>, serde_json::Error> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}

fn default_variant() -> String {
    "correct".to_owned()
}
fn default_iterations() -> u64 {
    1000
}
fn default_eps() -> f64 {
    1e-10
}
fn default_step_cap() -> u64 {
    10_000_000
}

/// Run configuration file (TOML). Absent keys take their defaults; unknown
/// keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    pub suite: String,
    #[serde(default = "default_variant")]
    pub variant: String,
    #[serde(default = "default_iterations")]
    pub iterations: u64,
    /// `None` means "not set in the file"; the default seed is 42.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_step_cap")]
    pub step_cap: u64,
    #[serde(default)]
    pub report_path: Option<PathBuf>,
}

impl RunConfigFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::ConfigFile(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::ConfigFile(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn suite_config(&self) -> SuiteConfig {
        SuiteConfig {
            iterations: self.iterations,
            master_seed: self.seed.unwrap_or(DEFAULT_SEED),
            eps: self.eps,
            step_cap: self.step_cap,
            variant_id: self.variant.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{run_suite, MutationDescriptor, Stage};
    use crate::suites::notation::notation_suite;

    #[test]
    fn config_defaults_and_unknown_keys() {
        let cfg = RunConfigFile::parse("suite = \"fourier\"\n").unwrap();
        assert_eq!(cfg.variant, "correct");
        assert_eq!(cfg.iterations, 1000);
        assert_eq!(cfg.seed, None);
        assert_eq!(cfg.suite_config().master_seed, DEFAULT_SEED);
        assert_eq!(cfg.eps, 1e-10);
        assert_eq!(cfg.step_cap, 10_000_000);
        assert_eq!(cfg.report_path, None);
        assert!(RunConfigFile::parse("suite = \"x\"\nbogus = 1\n").is_err());
        assert!(RunConfigFile::parse("variant = \"correct\"\n").is_err());
    }

    #[test]
    fn verdict_records() {
        let pe = VerdictRecord::from(&Verdict::ProgramError {
            stage: Stage::BackwardExec,
            message: "boom".into(),
        });
        assert_eq!(
            serde_json::to_string(&pe).unwrap(),
            r#"{"kind":"program_error","stage":"backward_exec","detail":"boom"}"#
        );
        assert_eq!(
            serde_json::to_string(&VerdictRecord::from(&Verdict::Pass)).unwrap(),
            r#"{"kind":"pass"}"#
        );
    }

    #[test]
    fn field_names_and_roundtrip() {
        let suite = notation_suite();
        let (_, reports) = run_suite(&suite, &crate::SuiteConfig::default().iterations(3)).unwrap();
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &reports).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        for key in [
            "schema_version",
            "suite",
            "variant",
            "trial_index",
            "trial_seed",
            "mode",
            "mutation",
            "verdict",
            "m1_repr",
            "m1_prime_repr",
        ] {
            assert!(first.get(key).is_some(), "missing {key}");
        }
        assert_eq!(first["schema_version"], 1);
        assert_eq!(
            first["mutation"]["name"],
            MutationDescriptor::identity().name
        );
        let parsed = read_jsonl(&text).unwrap();
        assert_eq!(parsed.len(), 3);
        assert_eq!(parsed[2].trial_index, 2);
    }
}
