use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};
use tmi_core::eval::{build_report, sensitivity_sweep, MethodScores};
use tmi_core::ingest::{
    generate_synthetic, load_accuracies, load_features, load_labels, load_source_predictions,
    save_features, save_labels, AccuracyVector, SyntheticSpec,
};
use tmi_core::methods::{score, Method, MethodConfig};
use tmi_core::{Error, ScoreResult};

use crate::args::{RankArgs, ScoreArgs, SweepArgs, SynthArgs};
use crate::error::{usage, CliError, CliResult};
use crate::{json, manifest};

/// `ScoreResult` as JSON, with its wall time moved under `timing`.
fn score_json(result: &ScoreResult, method: Method) -> CliResult<Value> {
    let mut v = json::to_value(result)?;
    let obj = v.as_object_mut().expect("struct serializes to an object");
    let wall = obj.remove("wall_time").unwrap_or(Value::Null);
    obj.insert("orientation".into(), json::to_value(&method.orientation())?);
    obj.insert("timing".into(), json!({ "wall_time_s": wall }));
    Ok(v)
}

pub fn score_cmd(args: ScoreArgs) -> CliResult<()> {
    let method: Method = args.method.parse().map_err(usage)?;
    if method.needs_source_predictions() && args.source_preds.is_none() {
        return Err(CliError::Usage(format!(
            "method {method} requires --source-preds PATH"
        )));
    }
    let mut config = MethodConfig::default();
    for pair in &args.config {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--config expects KEY=VAL, got {pair:?}")))?;
        config.set(key.trim(), value.trim()).map_err(usage)?;
    }
    if let Some(k) = args.k {
        config.k = k;
    }
    if config.k == 0 {
        return Err(CliError::Usage("k must be at least 1".into()));
    }
    config.baselines.validate().map_err(usage)?;
    config.standardize |= args.standardize;

    let features = load_features(&args.features, args.format)?;
    let labels = load_labels(&args.labels, None)?;
    let preds = args
        .source_preds
        .as_ref()
        .map(|p| load_source_predictions(p, args.format))
        .transpose()?;
    let result = score(method, &features, &labels, preds.as_ref(), &config)?;
    json::print(&score_json(&result, method)?)
}

pub fn sweep_cmd(args: SweepArgs) -> CliResult<()> {
    if args.ks.is_empty() || args.ks.contains(&0) {
        return Err(CliError::Usage("--ks needs one or more values >= 1".into()));
    }
    let features = load_features(&args.features, args.format)?;
    let labels = load_labels(&args.labels, None)?;
    let entries = sensitivity_sweep(&features, &labels, &args.ks);
    if let Some(first) = entries
        .first()
        .filter(|_| entries.iter().all(|e| e.error.is_some()))
    {
        return Err(CliError::Data(format!(
            "no k could be scored; k={}: {}",
            first.k,
            first.error.as_deref().unwrap_or_default()
        )));
    }
    json::print(&json::to_value(&entries)?)
}

/// Expands a list given once per class, or once for all classes.
fn per_class<T: Clone>(name: &str, values: &[T], classes: usize) -> CliResult<Vec<T>> {
    match values.len() {
        1 => Ok(vec![values[0].clone(); classes]),
        n if n == classes => Ok(values.to_vec()),
        n => Err(CliError::Usage(format!(
            "{name}: expected 1 or {classes} values, got {n}"
        ))),
    }
}

fn parse_means(text: &str, classes: usize, dim: usize) -> CliResult<Vec<Vec<f64>>> {
    let rows: Vec<Vec<f64>> = text
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| CliError::Usage(format!("--means: {v:?} is not a number")))
                })
                .collect()
        })
        .collect::<CliResult<_>>()?;
    let rows = per_class("--means", &rows, classes)?;
    let rows = rows
        .into_iter()
        .map(|r| if r.len() == 1 { vec![r[0]; dim] } else { r })
        .collect();
    Ok(rows)
}

pub fn synth_spec(args: &SynthArgs) -> CliResult<SyntheticSpec> {
    let c = args.num_classes;
    if c == 0 {
        return Err(CliError::Usage("--num-classes must be at least 1".into()));
    }
    let class_means = match &args.means {
        Some(text) => parse_means(text, c, args.dim)?,
        None => (0..c)
            .map(|i| vec![i as f64 * args.separation; args.dim])
            .collect(),
    };
    let spec = SyntheticSpec {
        num_classes: c,
        samples_per_class: per_class("--samples-per-class", &args.samples_per_class, c)?,
        dim: args.dim,
        class_means,
        class_spreads: per_class("--spreads", &args.spreads, c)?,
        seed: args.seed,
    };
    spec.validate().map_err(usage)?;
    Ok(spec)
}

pub fn synth_cmd(args: SynthArgs) -> CliResult<()> {
    let spec = synth_spec(&args)?;
    let (features, labels) = generate_synthetic(&spec)?;
    let prefix = args.out_prefix.to_string_lossy();
    let features_path = format!("{prefix}_features.{}", args.format.extension());
    let labels_path = format!("{prefix}_labels.csv");
    save_features(&features_path, &features, args.format)?;
    save_labels(&labels_path, &labels)?;
    let out = json!({
        "spec": json::to_value(&spec)?,
        "format": json::to_value(&args.format)?,
        "features": features_path,
        "labels": labels_path,
    });
    json::print(&out)
}

struct ModelScores {
    id: String,
    results: Vec<ScoreResult>,
}

fn score_model(
    entry: &manifest::ModelEntry,
    run: &manifest::Run,
    labels: &tmi_core::ingest::LabelVector,
) -> Result<Vec<ScoreResult>, String> {
    let features = load_features(&entry.features, run.format).map_err(|e| e.to_string())?;
    let preds = match &entry.source_preds {
        Some(p) => Some(load_source_predictions(p, run.format).map_err(|e| e.to_string())?),
        None => None,
    };
    run.methods
        .iter()
        .map(|&m| {
            score(m, &features, labels, preds.as_ref(), &run.configs[&m])
                .map_err(|e| format!("{m}: {e}"))
        })
        .collect()
}

fn check_ids(run: &manifest::Run, acc: &AccuracyVector) -> CliResult<()> {
    let ours: BTreeSet<&str> = run.models.iter().map(|e| e.id.as_str()).collect();
    let theirs: BTreeSet<&str> = acc.model_ids().iter().map(String::as_str).collect();
    let unmatched: Vec<String> = ours
        .symmetric_difference(&theirs)
        .map(|s| s.to_string())
        .collect();
    if unmatched.is_empty() {
        Ok(())
    } else {
        Err(Error::IdMismatch(unmatched).into())
    }
}

pub fn rank_cmd(args: RankArgs) -> CliResult<()> {
    let run = manifest::load(&args.manifest)?;
    let labels = load_labels(&run.labels, None)?;
    let accuracies = run.accuracies.as_ref().map(load_accuracies).transpose()?;
    if let Some(acc) = &accuracies {
        check_ids(&run, acc)?;
    }

    let mut warnings = Vec::new();
    let mut scored = Vec::new();
    for entry in &run.models {
        match score_model(entry, &run, &labels) {
            Ok(results) => scored.push(ModelScores {
                id: entry.id.clone(),
                results,
            }),
            Err(e) => warnings.push(format!(
                "model {:?} dropped from all methods: {e}",
                entry.id
            )),
        }
    }
    if scored.is_empty() {
        return Err(CliError::Data(format!(
            "no model could be scored: {}",
            warnings.join("; ")
        )));
    }

    let ids: Vec<String> = scored.iter().map(|s| s.id.clone()).collect();
    let accuracies = accuracies
        .map(|acc| {
            let values = ids
                .iter()
                .map(|id| acc.get(id).expect("ids checked"))
                .collect();
            AccuracyVector::new(ids.clone(), values)
        })
        .transpose()?;
    let mut method_scores = Vec::new();
    let mut score_warnings: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for (j, &method) in run.methods.iter().enumerate() {
        let results: Vec<&ScoreResult> = scored.iter().map(|s| &s.results[j]).collect();
        method_scores.push(MethodScores::new(
            method.name(),
            ids.clone(),
            results.iter().map(|r| r.value).collect(),
            results.iter().map(|r| r.wall_time).collect(),
            method.orientation(),
        )?);
        let list = score_warnings.entry(method.name()).or_default();
        for (id, r) in ids.iter().zip(&results) {
            list.extend(r.warnings.iter().map(|w| format!("{id}: {w}")));
        }
    }
    let ks = match &run.top_k {
        Some(ks) => ks.clone(),
        None => {
            let mut ks = vec![1, ids.len().min(5)];
            ks.dedup();
            ks
        }
    };
    let mut report = build_report(&method_scores, accuracies.as_ref(), &ks)?;
    for row in &mut report.methods {
        if let Some(extra) = score_warnings.remove(row.method.as_str()) {
            row.warnings.extend(extra);
        }
    }

    let mut v = json::to_value(&report)?;
    let obj = v.as_object_mut().expect("struct serializes to an object");
    let configs: BTreeMap<&str, &MethodConfig> =
        run.configs.iter().map(|(m, c)| (m.name(), c)).collect();
    obj.insert("config".into(), json::to_value(&configs)?);
    obj.insert("warnings".into(), json!(warnings));
    match &run.output {
        Some(path) => json::write(path, &v),
        None => json::print(&v),
    }
}
