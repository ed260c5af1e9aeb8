//! The plan → propagate → summarize workflow behind the `rafu` binary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::config::{load_config, ConfigError, GammaS, StudyConfig};
use crate::engine::{self, read_sample, write_sample, AlphaSchedule, EngineError, FuzzySample, Plan};
use crate::postprocess::{self, PBox, PostprocessError};

pub const PLAN_FILE: &str = "plan.json";
pub const SAMPLE_FILE: &str = "sample.csv";
pub const SIDECAR_FILE: &str = "sample.json";
pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Validate,
    Plan,
    Propagate,
    Summarize,
}

#[derive(Debug, Clone)]
pub struct CommandArgs {
    pub config: PathBuf,
    pub out: PathBuf,
    pub seed: Option<u64>,
}

/// What a command printed and wrote.
#[derive(Debug, Default)]
pub struct CommandOutput {
    pub report: String,
    pub written: Vec<PathBuf>,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
    pub details: Vec<String>,
    pub exit_code: i32,
}

impl CliError {
    fn validation(kind: &'static str, message: impl Into<String>) -> Self {
        Self { kind, message: message.into(), details: Vec::new(), exit_code: 1 }
    }

    fn runtime(kind: &'static str, message: impl Into<String>) -> Self {
        Self { kind, message: message.into(), details: Vec::new(), exit_code: 2 }
    }

    pub fn to_json(&self) -> Value {
        json!({ "error": { "kind": self.kind, "message": self.message, "details": self.details } })
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Semantic(items) => Self {
                kind: "config_invalid",
                message: "config failed validation".into(),
                details: items,
                exit_code: 1,
            },
            ConfigError::Parse { .. } => Self::validation("config_parse", e.to_string()),
            ConfigError::Io { .. } => Self::validation("config_unreadable", e.to_string()),
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Validation(_) => Self::validation("plan_invalid", e.to_string()),
            EngineError::DigestMismatch { .. } => Self::validation("digest_mismatch", e.to_string()),
            _ => Self::runtime("propagation_failed", e.to_string()),
        }
    }
}

impl From<PostprocessError> for CliError {
    fn from(e: PostprocessError) -> Self {
        Self::runtime("summarize_failed", e.to_string())
    }
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::runtime("io", format!("{}: {e}", path.display()))
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| io_error(path, e))?;
    std::fs::write(path, text + "\n").map_err(|e| io_error(path, e))
}

fn load(args: &CommandArgs) -> Result<StudyConfig, CliError> {
    let config = load_config(&args.config)?;
    Ok(match args.seed {
        Some(seed) => config.with_seed(seed),
        None => config,
    })
}

fn ensure_out(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))
}

/// Runs one command against a config file.
pub fn run_command(command: Command, args: &CommandArgs) -> Result<CommandOutput, CliError> {
    let config = load(args)?;
    match command {
        Command::Validate => Ok(CommandOutput { report: format!("config ok: {config}\n"), written: vec![] }),
        Command::Plan => {
            let plan = engine::plan(&config)?;
            ensure_out(&args.out)?;
            let path = args.out.join(PLAN_FILE);
            write_json(&path, &plan)?;
            Ok(CommandOutput { report: plan_report(&plan), written: vec![path] })
        }
        Command::Propagate => propagate(&config, args),
        Command::Summarize => summarize(&config, args),
    }
}

fn plan_report(plan: &Plan) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "sample_size={}", plan.sample_size);
    let _ = writeln!(s, "alpha_schedule={}", plan.alpha_schedule.kind());
    let _ = writeln!(s, "eval_count={}", plan.eval_count);
    match plan.rank_from_top {
        Some(r) => {
            let _ = writeln!(s, "rank={r}");
        }
        None => s.push_str("rank=none\n"),
    }
    match plan.achieved_confidence {
        Some(c) => {
            let _ = writeln!(s, "achieved_confidence={c}");
        }
        None => s.push_str("achieved_confidence=none\n"),
    }
    for w in &plan.warnings {
        let _ = writeln!(s, "warning={w}");
    }
    s
}

fn propagate(config: &StudyConfig, args: &CommandArgs) -> Result<CommandOutput, CliError> {
    ensure_out(&args.out)?;
    let plan_path = args.out.join(PLAN_FILE);
    let mut written = Vec::new();
    let plan: Plan = if plan_path.exists() {
        let text = std::fs::read_to_string(&plan_path).map_err(|e| io_error(&plan_path, e))?;
        serde_json::from_str(&text).map_err(|e| io_error(&plan_path, e))?
    } else {
        let plan = engine::plan(config)?;
        write_json(&plan_path, &plan)?;
        written.push(plan_path);
        plan
    };
    let sample = engine::propagate(&plan, config)?;
    let (csv, sidecar) = (args.out.join(SAMPLE_FILE), args.out.join(SIDECAR_FILE));
    write_sample(&sample, &csv, &sidecar)?;
    written.extend([csv, sidecar]);
    let report = format!(
        "records={}\nfailures={}\neval_count={}\n",
        sample.records.len(),
        sample.failure_count(),
        plan.eval_count
    );
    Ok(CommandOutput { report, written })
}

fn slug(label: &str) -> String {
    let mut s = String::from("pbox_");
    let mut last_sep = true;
    for c in label.chars() {
        if c.is_ascii_alphanumeric() || c == '.' {
            s.push(c);
            last_sep = false;
        } else if !last_sep {
            s.push('_');
            last_sep = true;
        }
    }
    s.trim_end_matches('_').to_string() + ".csv"
}

fn number(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(if v > 0.0 { "+inf" } else { "-inf" })
    }
}

fn failure_summary(sample: &FuzzySample) -> Value {
    let mut by_kind: BTreeMap<String, usize> = BTreeMap::new();
    let mut by_alpha: Vec<(f64, usize)> = Vec::new();
    for r in &sample.records {
        if let engine::Outcome::Failed(kind) = &r.outcome {
            *by_kind.entry(kind.clone()).or_default() += 1;
            match by_alpha.iter_mut().find(|e| e.0 == r.alpha) {
                Some(e) => e.1 += 1,
                None => by_alpha.push((r.alpha, 1)),
            }
        }
    }
    by_alpha.sort_by(|a, b| a.0.total_cmp(&b.0));
    json!({
        "total": sample.failure_count(),
        "by_kind": by_kind,
        "by_alpha": by_alpha.iter().map(|(a, n)| json!({"alpha": a, "count": n})).collect::<Vec<_>>(),
    })
}

fn summarize(config: &StudyConfig, args: &CommandArgs) -> Result<CommandOutput, CliError> {
    let (csv, sidecar) = (args.out.join(SAMPLE_FILE), args.out.join(SIDECAR_FILE));
    if !csv.exists() || !sidecar.exists() {
        return Err(CliError::runtime(
            "no_sample",
            format!("no sample found in {}; run propagate first", args.out.display()),
        ));
    }
    let sample = read_sample(&csv, &sidecar)?;
    if sample.config_digest != config.digest() {
        return Err(EngineError::DigestMismatch {
            plan: sample.config_digest.clone(),
            config: config.digest().to_string(),
        }
        .into());
    }
    let plan = sample.plan.clone();

    let mut pboxes: Vec<PBox> = Vec::new();
    let mut percentile = Value::Null;
    let mut percentile_error = Value::Null;
    match &plan.alpha_schedule {
        AlphaSchedule::Fixed { alpha } => {
            pboxes.push(postprocess::pbox_at_alpha(&sample, *alpha)?);
            if let (Some(rank), GammaS::Quantile(gamma_s)) = (plan.rank_from_top, config.triplet.gamma_s) {
                match postprocess::percentile_bound(&sample, &plan, config.failures_as_infinite) {
                    Ok(v) => {
                        percentile = json!({
                            "value": number(v),
                            "gamma_s": gamma_s,
                            "gamma_a": config.triplet.gamma_a,
                            "alpha": alpha,
                            "rank_from_top": rank,
                            "achieved_confidence": plan.achieved_confidence,
                        })
                    }
                    Err(e) => percentile_error = json!(e.to_string()),
                }
            }
        }
        AlphaSchedule::RandomAlpha { .. } => pboxes.push(postprocess::mean_pbox(&sample)?),
        AlphaSchedule::Dual => {
            let (pessimistic, optimistic) = postprocess::double_pair(&sample)?;
            pboxes.extend([pessimistic, optimistic]);
        }
        AlphaSchedule::Grid { .. } => {
            pboxes.extend(postprocess::alpha_slices(&sample)?);
            pboxes.push(postprocess::mean_pbox(&sample)?);
        }
    }

    let mut written = Vec::new();
    let mut listed = Vec::new();
    for p in &pboxes {
        let name = slug(&p.label);
        let path = args.out.join(&name);
        p.write_csv(&path)?;
        listed.push(json!({"label": p.label, "file": name, "records": p.records, "failures": p.failures}));
        written.push(path);
    }
    let summary = json!({
        "config_digest": sample.config_digest,
        "gamma_e": plan.alpha_schedule.kind(),
        "sample_size": plan.sample_size,
        "eval_count": plan.eval_count,
        "pboxes": listed,
        "percentile_bound": percentile,
        "percentile_bound_error": percentile_error,
        "failures": failure_summary(&sample),
    });
    let path = args.out.join(SUMMARY_FILE);
    write_json(&path, &summary)?;
    written.push(path);

    let mut report = format!("pboxes={}\nfailures={}\n", pboxes.len(), sample.failure_count());
    if let Some(v) = percentile.get("value") {
        let _ = writeln!(report, "percentile_bound={v}");
    }
    Ok(CommandOutput { report, written })
}
