use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::config::{ConfigError, Origin, Params, RawConfig};
use crate::kinds::{kind_registry, Outcome, RunContext};
use crate::{Result, EXIT_CHECK_FAILED};

pub const DEFAULT_OUTPUT_DIR: &str = "quanputer-out";
pub const MANIFEST_NAME: &str = "manifest.txt";

#[derive(Debug, Clone)]
pub struct RunRequest {
    pub kind: String,
    pub config: RawConfig,
    /// Preset name, echoed into the manifest.
    pub preset: Option<String>,
    /// Overrides `output_dir` from the config.
    pub out_dir: Option<PathBuf>,
    /// Overrides `seed` from the config.
    pub seed: Option<u64>,
}

#[derive(Debug)]
pub struct RunResult {
    pub outcome: Outcome,
    pub out_dir: PathBuf,
    pub seed: u64,
}

impl RunResult {
    pub fn exit_code(&self) -> i32 {
        if self.outcome.passed() {
            0
        } else {
            EXIT_CHECK_FAILED
        }
    }
}

fn top_level_seed(raw: &RawConfig) -> std::result::Result<Option<u64>, ConfigError> {
    raw.get("seed")
        .map(|e| {
            e.value.trim().parse::<u64>().map_err(|_| ConfigError::Invalid {
                key: "seed".into(),
                origin: e.origin,
                reason: format!("expected a non-negative integer, got `{}`", e.value),
            })
        })
        .transpose()
}

/// Validates, runs and writes outputs. Nothing is written unless the
/// computation finishes; a failed check still writes its report.
pub fn run_scenario(req: &RunRequest) -> Result<RunResult> {
    let kind = kind_registry().build_str(&req.kind)?;
    if let Some(declared) = req.config.get("kind") {
        if declared.value.trim() != kind.name() {
            return Err(ConfigError::KindMismatch {
                declared: declared.value.trim().to_string(),
                requested: kind.name().to_string(),
            }
            .into());
        }
    }
    let params = Params::resolve(&req.config, &kind.schema())?;
    let seed = match req.seed {
        Some(s) => s,
        None => top_level_seed(&req.config)?.unwrap_or(0),
    };
    let out_dir = req.out_dir.clone().unwrap_or_else(|| {
        req.config
            .get("output_dir")
            .map_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR), |e| PathBuf::from(e.value.trim().trim_matches('"')))
    });

    let started = Instant::now();
    let mut ctx = RunContext::new(seed);
    let outcome = kind.run(&params, &mut ctx)?;
    let wall = started.elapsed().as_secs_f64();

    write_outputs(&out_dir, &outcome, &manifest(kind.name(), req, &params, seed, wall, &outcome))?;
    Ok(RunResult { outcome, out_dir, seed })
}

fn manifest(kind: &str, req: &RunRequest, params: &Params, seed: u64, wall: f64, outcome: &Outcome) -> String {
    let mut m = String::new();
    let _ = writeln!(m, "quanputer {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(m, "kind = {kind}");
    if let Some(preset) = &req.preset {
        let _ = writeln!(m, "preset = {preset}");
    }
    let _ = writeln!(m, "seed = {seed}");
    let _ = writeln!(m, "wall_time_s = {wall:.3}");
    m.push_str("\n[config]\n");
    for (key, entry) in params.entries() {
        let origin = match entry.origin {
            Origin::Default => " (default)",
            Origin::Override => " (--set)",
            Origin::Line(_) => "",
        };
        let _ = writeln!(m, "{key} = {}{origin}", entry.value);
    }
    m.push_str("\n[summary]\n");
    for line in &outcome.summary {
        let _ = writeln!(m, "{line}");
    }
    if !outcome.warnings.is_empty() {
        m.push_str("\n[warnings]\n");
        for w in &outcome.warnings {
            let _ = writeln!(m, "{w}");
        }
    }
    m.push_str("\n[checks]\n");
    for c in &outcome.checks {
        let _ = writeln!(m, "{}", c.line());
    }
    m.push_str("\n[files]\n");
    for f in &outcome.files {
        let _ = writeln!(m, "{} {} bytes", f.name, f.contents.len());
    }
    m
}

fn write_outputs(dir: &Path, outcome: &Outcome, manifest: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    for f in &outcome.files {
        fs::write(dir.join(&f.name), &f.contents)?;
    }
    fs::write(dir.join(MANIFEST_NAME), manifest)?;
    Ok(())
}

