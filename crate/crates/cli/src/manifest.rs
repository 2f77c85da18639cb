use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::Serialize;

use crate::{Command, Output};

/// Record of one invocation: what ran, with which parameters, and what it wrote.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub input: Option<PathBuf>,
    pub parameters: BTreeMap<String, String>,
    pub version: String,
    pub outputs: Vec<PathBuf>,
}

fn output_params(p: &mut BTreeMap<String, String>, o: &Output) {
    p.insert("format".into(), format!("{:?}", o.format).to_lowercase());
}

fn houses(p: &mut BTreeMap<String, String>, h: &[String]) {
    if !h.is_empty() {
        p.insert("house".into(), h.join(","));
    }
}

impl RunManifest {
    pub fn start(cmd: &Command) -> Self {
        let mut p = BTreeMap::new();
        let (name, input) = match cmd {
            Command::Overround(a) => {
                houses(&mut p, &a.houses);
                output_params(&mut p, &a.output);
                ("overround", Some(a.input.clone()))
            }
            Command::Impute(a) | Command::Summarize(a) => {
                houses(&mut p, &a.houses);
                p.insert("tol".into(), a.tol.to_string());
                p.insert("paper_rounding".into(), a.paper_rounding.to_string());
                output_params(&mut p, &a.output);
                let name = if matches!(cmd, Command::Impute(_)) {
                    "impute"
                } else {
                    "summarize"
                };
                (name, Some(a.input.clone()))
            }
            Command::Compare(a) => {
                if let Some(r) = a.row {
                    p.insert("row".into(), r.to_string());
                }
                for (k, v) in [("date", &a.date), ("home", &a.home), ("away", &a.away)] {
                    if let Some(v) = v {
                        p.insert(k.into(), v.clone());
                    }
                }
                output_params(&mut p, &a.output);
                ("compare", Some(a.input.clone()))
            }
            Command::Hist(a) => {
                houses(&mut p, &a.houses);
                p.insert("bins".into(), a.bins.to_string());
                p.insert("tol".into(), a.tol.to_string());
                p.insert("paper_rounding".into(), a.paper_rounding.to_string());
                output_params(&mut p, &a.output);
                ("hist", Some(a.input.clone()))
            }
            Command::Simulate(a) => {
                p.insert("p".into(), a.p.to_string());
                if let Some(e) = a.epsilon {
                    p.insert("epsilon".into(), e.to_string());
                }
                if let Some(x) = a.payout {
                    p.insert("payout".into(), x.to_string());
                }
                p.insert("trials".into(), a.trials.to_string());
                p.insert("seed".into(), a.seed.to_string());
                output_params(&mut p, &a.output);
                ("simulate", None)
            }
        };
        Self {
            command: name.to_string(),
            input,
            parameters: p,
            version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: Vec::new(),
        }
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        for o in &self.outputs {
            if !o.exists() {
                bail!("listed output {} does not exist", o.display());
            }
        }
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json + "\n")
            .with_context(|| format!("writing manifest {}", path.display()))
    }
}
