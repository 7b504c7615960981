//! JSON run manifest for `tmi rank`. The schema is described in
//! `docs/manifest.md`.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::Value;
use tmi_core::ingest::FeatureFormat;
use tmi_core::methods::{Method, MethodConfig};

use crate::error::{CliError, CliResult};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub labels: PathBuf,
    #[serde(default)]
    pub accuracies: Option<PathBuf>,
    #[serde(default)]
    pub format: FeatureFormat,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub standardize: bool,
    #[serde(default)]
    pub methods: Option<Vec<String>>,
    /// Overrides applied to every method.
    #[serde(default)]
    pub config: BTreeMap<String, Value>,
    /// Overrides for one method, applied after `config`.
    #[serde(default)]
    pub method_config: BTreeMap<String, BTreeMap<String, Value>>,
    #[serde(default)]
    pub top_k: Option<Vec<usize>>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Allows several entries to reference the same file.
    #[serde(default)]
    pub shared_paths: bool,
    pub models: Vec<ModelEntry>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelEntry {
    pub id: String,
    pub features: PathBuf,
    #[serde(default)]
    pub source_preds: Option<PathBuf>,
}

/// A validated manifest with paths resolved against its directory.
#[derive(Debug)]
pub struct Run {
    pub labels: PathBuf,
    pub accuracies: Option<PathBuf>,
    pub format: FeatureFormat,
    pub methods: Vec<Method>,
    pub configs: BTreeMap<Method, MethodConfig>,
    pub top_k: Option<Vec<usize>>,
    pub output: Option<PathBuf>,
    pub models: Vec<ModelEntry>,
}

fn invalid(path: &Path, msg: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("{}: {msg}", path.display()))
}

fn config_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn load(path: &Path) -> CliResult<Run> {
    let text = fs::read_to_string(path).map_err(|e| invalid(path, e))?;
    let manifest: Manifest =
        serde_json::from_str(&text).map_err(|e| invalid(path, format!("invalid manifest: {e}")))?;
    let base = path.parent().unwrap_or(Path::new("."));
    resolve(manifest, base).map_err(|msg| invalid(path, msg))
}

fn resolve(m: Manifest, base: &Path) -> Result<Run, String> {
    if m.models.is_empty() {
        return Err("manifest lists no models".into());
    }
    let mut ids = BTreeSet::new();
    for entry in &m.models {
        if !ids.insert(entry.id.as_str()) {
            return Err(format!("duplicate model id {:?}", entry.id));
        }
    }
    let join = |p: &PathBuf| base.join(p);
    let models: Vec<ModelEntry> = m
        .models
        .iter()
        .map(|e| ModelEntry {
            id: e.id.clone(),
            features: join(&e.features),
            source_preds: e.source_preds.as_ref().map(join),
        })
        .collect();

    if !m.shared_paths {
        let mut seen = BTreeSet::new();
        let referenced = std::iter::once(join(&m.labels))
            .chain(m.accuracies.as_ref().map(join))
            .chain(models.iter().map(|e| e.features.clone()))
            .chain(models.iter().filter_map(|e| e.source_preds.clone()));
        for p in referenced {
            if !seen.insert(p.clone()) {
                return Err(format!(
                    "{} is referenced more than once; set \"shared_paths\": true if intended",
                    p.display()
                ));
            }
        }
    }

    let all_have_preds = models.iter().all(|e| e.source_preds.is_some());
    let methods: Vec<Method> = match &m.methods {
        Some(names) => {
            let mut out = Vec::new();
            for name in names {
                let method: Method = name.parse().map_err(|e: tmi_core::Error| e.to_string())?;
                if out.contains(&method) {
                    return Err(format!("method {name:?} listed twice"));
                }
                out.push(method);
            }
            out
        }
        None => Method::ALL
            .into_iter()
            .filter(|me| all_have_preds || !me.needs_source_predictions())
            .collect(),
    };
    if methods.is_empty() {
        return Err("manifest lists no methods".into());
    }
    for method in methods.iter().filter(|me| me.needs_source_predictions()) {
        if let Some(e) = models.iter().find(|e| e.source_preds.is_none()) {
            return Err(format!(
                "method {method} needs source_preds, missing for model {:?}",
                e.id
            ));
        }
    }

    let mut global = MethodConfig {
        standardize: m.standardize,
        ..MethodConfig::default()
    };
    if let Some(k) = m.k {
        global.set("k", &k.to_string()).map_err(|e| e.to_string())?;
    }
    for (key, value) in &m.config {
        global
            .set(key, &config_value(value))
            .map_err(|e| e.to_string())?;
    }
    for name in m.method_config.keys() {
        let method: Method = name.parse().map_err(|e: tmi_core::Error| e.to_string())?;
        if !methods.contains(&method) {
            return Err(format!(
                "method_config given for {name:?}, which is not run"
            ));
        }
    }
    let mut configs = BTreeMap::new();
    for &method in &methods {
        let mut config = global;
        if let Some(overrides) = m.method_config.get(method.name()) {
            for (key, value) in overrides {
                config
                    .set(key, &config_value(value))
                    .map_err(|e| e.to_string())?;
            }
        }
        if config.k == 0 {
            return Err(format!("{method}: k must be at least 1"));
        }
        config.baselines.validate().map_err(|e| e.to_string())?;
        configs.insert(method, config);
    }

    Ok(Run {
        labels: join(&m.labels),
        accuracies: m.accuracies.as_ref().map(join),
        format: m.format,
        methods,
        configs,
        top_k: m.top_k,
        output: m.output.as_ref().map(join),
        models,
    })
}
