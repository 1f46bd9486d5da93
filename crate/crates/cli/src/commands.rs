use std::path::{Path, PathBuf};

use lasvm_core::dataset::kdd::{read_kdd_file, AttackMap, Preprocessor};
use lasvm_core::dataset::{read_csv, write_csv_to};
use lasvm_core::engine::{comparison_table, evaluate_final, run_selection, write_trace_csv};
use lasvm_core::synth::generate;
use lasvm_core::{Dataset, FeatureId, SvmConfig, SynthSpec};
use serde_json::Value;

use crate::config;
use crate::error::{CliError, Result};
use crate::output::{ensure_dir, write_bytes, write_json};
use crate::{EvaluateArgs, PreprocessArgs, SelectArgs, SynthArgs};

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn csv_bytes(dataset: &Dataset) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_csv_to(dataset, &mut buf)?;
    Ok(buf)
}

fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("schema.json")
}

pub fn preprocess(args: &PreprocessArgs) -> Result<()> {
    let records =
        read_kdd_file(&args.raw).map_err(|e| CliError::Usage(format!("{}: {e}", args.raw.display())))?;
    let dataset = match &args.schema {
        Some(path) => {
            if args.attack_map.is_some() {
                log::warn!("--attack-map is ignored when reusing a schema");
            }
            let pre: Preprocessor =
                serde_json::from_str(&read_text(path)?).map_err(|source| CliError::Json {
                    path: path.clone(),
                    source,
                })?;
            pre.transform(&records)
                .map_err(|e| CliError::Usage(format!("{}: {e}", args.raw.display())))?
        }
        None => {
            let map = match &args.attack_map {
                Some(path) => AttackMap::from_file(path)?,
                None => AttackMap::default(),
            };
            let (pre, dataset) = Preprocessor::fit(&records, map)
                .map_err(|e| CliError::Usage(format!("{}: {e}", args.raw.display())))?;
            let sidecar = args.sidecar.clone().unwrap_or_else(|| sidecar_path(&args.out));
            write_json(&sidecar, &pre)?;
            dataset
        }
    };
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    write_bytes(&args.out, &csv_bytes(&dataset)?)?;
    println!(
        "{} rows, {} features, class counts {:?}",
        dataset.n_rows(),
        dataset.n_features(),
        dataset.class_counts()
    );
    Ok(())
}

pub fn synth(args: &SynthArgs) -> Result<()> {
    let spec = SynthSpec {
        samples: args.samples,
        informative: args.informative,
        noise: args.noise,
        classes: args.classes,
        margin: args.margin,
        seed: args.seed,
    };
    spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let data = generate(&spec)?;
    ensure_dir(&args.out)?;
    write_bytes(&args.out.join("synth.csv"), &csv_bytes(&data.dataset)?)?;
    write_json(&args.out.join("noise_features.json"), &data.noise_features)?;
    println!(
        "{} rows, {} features, noise features {}",
        data.dataset.n_rows(),
        data.dataset.n_features(),
        join_ids(&data.noise_features)
    );
    Ok(())
}

fn join_ids(ids: &[FeatureId]) -> String {
    ids.iter().map(FeatureId::to_string).collect::<Vec<_>>().join(",")
}

pub fn select(args: &SelectArgs) -> Result<()> {
    let cfg = config::resolve(args.config.as_deref(), &args.flags)?;
    if args.test.is_none() && !(args.test_fraction > 0.0 && args.test_fraction < 1.0) {
        return Err(CliError::Usage(format!(
            "--test-fraction must lie in (0, 1), got {}",
            args.test_fraction
        )));
    }
    let data = read_csv(&args.data)?;
    let (train, test) = match &args.test {
        Some(path) => {
            let test = read_csv(path)?;
            if test.feature_names() != data.feature_names() {
                return Err(CliError::Usage(
                    "training and test files have different columns".into(),
                ));
            }
            (data, test)
        }
        None => data.stratified_split(args.test_fraction, cfg.seed)?,
    };
    log::info!("{} training rows, {} test rows", train.n_rows(), test.n_rows());

    let result = run_selection(&train, &test, &cfg)?;
    let report = result.report();

    ensure_dir(&args.out)?;
    write_bytes(&args.out.join("report.json"), report.to_json()?.as_bytes())?;
    let mut trace = Vec::new();
    write_trace_csv(&result.trace, &mut trace)?;
    write_bytes(&args.out.join("trace.csv"), &trace)?;
    write_bytes(
        &args.out.join("model.json"),
        result.evaluation.reduced_model.to_json()?.as_bytes(),
    )?;
    write_json(&args.out.join("timing.json"), &result.evaluation.timing)?;

    println!("removed:   {}", join_ids(&result.removed));
    println!("surviving: {}", join_ids(&result.surviving));
    print!(
        "{}",
        comparison_table(&result.evaluation.metrics, Some(&result.evaluation.timing))
    );
    Ok(())
}

/// Accepts a bare JSON array of ids or a report with `removed_features`.
fn read_removed(path: &Path) -> Result<Vec<FeatureId>> {
    let value: Value = serde_json::from_str(&read_text(path)?).map_err(|source| CliError::Json {
        path: path.to_owned(),
        source,
    })?;
    let list = match &value {
        Value::Object(map) => map
            .get("removed_features")
            .cloned()
            .ok_or_else(|| CliError::Usage(format!("{}: no `removed_features` field", path.display())))?,
        other => other.clone(),
    };
    serde_json::from_value(list).map_err(|source| CliError::Json {
        path: path.to_owned(),
        source,
    })
}

pub fn evaluate(args: &EvaluateArgs) -> Result<()> {
    let svm = SvmConfig {
        c: args.svm_c,
        max_epochs: args.svm_epochs,
        seed: args.seed,
        ..Default::default()
    };
    svm.validate()?;
    let train = read_csv(&args.train)?;
    let test = read_csv(&args.test)?;
    if train.feature_names() != test.feature_names() {
        return Err(CliError::Usage(
            "training and test files have different columns".into(),
        ));
    }
    let removed = read_removed(&args.removed)?;
    if let Some(bad) = removed.iter().find(|f| train.position_of(**f).is_none()) {
        return Err(CliError::Usage(format!(
            "feature {bad} is not among the {} columns",
            train.n_features()
        )));
    }
    let ev = evaluate_final(&train, &test, &removed, &svm, args.repeats)?;

    ensure_dir(&args.out)?;
    write_json(&args.out.join("comparison.json"), &ev.metrics)?;
    write_json(&args.out.join("timing.json"), &ev.timing)?;
    let table = comparison_table(&ev.metrics, Some(&ev.timing));
    write_bytes(&args.out.join("comparison.txt"), table.as_bytes())?;
    print!("{table}");
    Ok(())
}
