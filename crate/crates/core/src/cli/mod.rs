//! The `schurdyn` front end: configuration, seeded batch sampling,
//! statistics and the verification suite.

mod render;
mod stats;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{GTPattern, Partition, PlanePartition, PlanePartitionShape};
use crate::samplers::{batch, sample_gt_path, sample_spp, sample_spp_weighted, CharacterParams};
use crate::schur_eval::{spp_process_spec, spp_weighted_process_spec};
use crate::specializations::EdreiSpec;
use crate::suite::{run_suite, select, SuiteOptions};

pub use stats::{gt_stats, spp_stats, GtStats, SppStats};

/// Version tag carried by every emitted record.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),

    #[error(transparent)]
    Core(#[from] crate::Error),

    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },

    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::VerificationFailed(_) => 2,
            _ => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

#[derive(Debug, Parser)]
#[command(name = "schurdyn", version, about = "Exact sampling of Schur processes, plane partitions and Gelfand-Tsetlin paths")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample skew plane partitions with weight q^volume (or per-slice weights).
    SampleSpp(Params),
    /// Sample Gelfand-Tsetlin paths of an extreme character of U(infinity).
    SampleGt(Params),
    /// Aggregate statistics over sample files or freshly generated samples.
    Stats(StatsArgs),
    /// Run the verification suite against the brute-force oracles.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Jsonl,
    Ascii,
    Svg,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    #[default]
    Spp,
    Gt,
}

/// Flags shared by the sampling commands. Unset flags fall back to the
/// config file, then to the defaults.
#[derive(Clone, Debug, Default, Args)]
pub struct Params {
    /// Number of rows of the box.
    #[arg(long = "A")]
    pub a: Option<usize>,
    /// Number of columns of the box.
    #[arg(long = "B")]
    pub b: Option<usize>,
    /// Back wall partition, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub pi: Option<Vec<i64>>,
    /// Uniform weight q^volume, 0 < q < 1.
    #[arg(long, conflicts_with = "q_weights")]
    pub q: Option<f64>,
    /// Per-slice weights q_2, ..., q_{A+B}, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub q_weights: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub alpha_plus: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub alpha_minus: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub beta_plus: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub beta_minus: Option<Vec<f64>>,
    /// Rejected unless zero: the path sampler has no γ^± support.
    #[arg(long)]
    pub gamma_plus: Option<f64>,
    #[arg(long)]
    pub gamma_minus: Option<f64>,
    /// Depth of the Gelfand-Tsetlin path.
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses every core. Output does not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// TOML file with any of the above keys (A, B, pi, q, q_weights, ...).
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct StatsArgs {
    /// JSONL sample files; when absent, samples are generated from the flags.
    #[arg(long = "input", num_args = 1..)]
    pub inputs: Vec<PathBuf>,
    /// Model to generate when no input is given.
    #[arg(long, value_enum)]
    pub kind: Option<Kind>,
    #[command(flatten)]
    pub params: Params,
}

#[derive(Clone, Debug, Args)]
pub struct VerifyArgs {
    /// Criterion ids or keys, comma separated (e.g. `commutation` or `1,2`).
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub only: Vec<String>,
    /// Seeds of the statistical checks.
    #[arg(long, value_delimiter = ',', num_args = 3)]
    pub seeds: Option<Vec<u64>>,
    /// Multiplies every sample count of the suite.
    #[arg(long, default_value_t = 1.0)]
    pub sample_scale: f64,
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
}

/// Config file contents; keys match the flag names.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(rename = "A")]
    a: Option<usize>,
    #[serde(rename = "B")]
    b: Option<usize>,
    pi: Option<Vec<i64>>,
    q: Option<f64>,
    q_weights: Option<Vec<f64>>,
    alpha_plus: Option<Vec<f64>>,
    alpha_minus: Option<Vec<f64>>,
    beta_plus: Option<Vec<f64>>,
    beta_minus: Option<Vec<f64>>,
    gamma_plus: Option<f64>,
    gamma_minus: Option<f64>,
    #[serde(rename = "N")]
    n: Option<usize>,
    samples: Option<usize>,
    seed: Option<u64>,
    threads: Option<usize>,
    format: Option<Format>,
    out: Option<PathBuf>,
}

/// Effective settings of a run after merging flags, config file and defaults.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    #[serde(rename = "A")]
    pub a: usize,
    #[serde(rename = "B")]
    pub b: usize,
    pub pi: Vec<i64>,
    pub q: Option<f64>,
    pub q_weights: Option<Vec<f64>>,
    pub alpha_plus: Vec<f64>,
    pub alpha_minus: Vec<f64>,
    pub beta_plus: Vec<f64>,
    pub beta_minus: Vec<f64>,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    /// Not echoed: the output does not depend on it.
    #[serde(skip)]
    pub threads: usize,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// Merges `flags` over the config file they name over the defaults.
    pub fn resolve(command: &'static str, flags: &Params) -> CliResult<Self> {
        let file = match &flags.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|source| io_err(path, source))?;
                toml::from_str::<FileConfig>(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };
        // q and q_weights are one setting: the higher-precedence source wins
        let (q, q_weights) = if flags.q.is_some() || flags.q_weights.is_some() {
            (flags.q, flags.q_weights.clone())
        } else if file.q.is_some() || file.q_weights.is_some() {
            if file.q.is_some() && file.q_weights.is_some() {
                return Err(invalid("config sets both q and q_weights"));
            }
            (file.q, file.q_weights)
        } else {
            (Some(0.5), None)
        };
        Ok(RunConfig {
            command,
            a: flags.a.or(file.a).unwrap_or(4),
            b: flags.b.or(file.b).unwrap_or(3),
            pi: flags.pi.clone().or(file.pi).unwrap_or_default(),
            q,
            q_weights,
            alpha_plus: flags.alpha_plus.clone().or(file.alpha_plus).unwrap_or_default(),
            alpha_minus: flags.alpha_minus.clone().or(file.alpha_minus).unwrap_or_default(),
            beta_plus: flags.beta_plus.clone().or(file.beta_plus).unwrap_or_default(),
            beta_minus: flags.beta_minus.clone().or(file.beta_minus).unwrap_or_default(),
            gamma_plus: flags.gamma_plus.or(file.gamma_plus).unwrap_or(0.0),
            gamma_minus: flags.gamma_minus.or(file.gamma_minus).unwrap_or(0.0),
            n: flags.n.or(file.n).unwrap_or(1),
            samples: flags.samples.or(file.samples).unwrap_or(1),
            seed: flags.seed.or(file.seed).unwrap_or(0),
            threads: flags.threads.or(file.threads).unwrap_or(0),
            format: flags.format.or(file.format).unwrap_or_default(),
            out: flags.out.clone().or(file.out),
        })
    }

    pub fn shape(&self) -> CliResult<PlanePartitionShape> {
        let pi = Partition::new(self.pi.clone())?;
        Ok(PlanePartitionShape::new(self.a, self.b, pi)?)
    }

    /// The shape with its weights checked against the sampler preconditions.
    fn spp_model(&self) -> CliResult<(PlanePartitionShape, SppWeights)> {
        let shape = self.shape()?;
        let weights = match (&self.q, &self.q_weights) {
            (Some(q), None) => {
                spp_process_spec(&shape, *q)?;
                SppWeights::Uniform(*q)
            }
            (None, Some(w)) => {
                spp_weighted_process_spec(&shape, w)?;
                SppWeights::Slices(w.clone())
            }
            _ => return Err(invalid("exactly one of q and q_weights must be set")),
        };
        Ok((shape, weights))
    }

    fn character(&self) -> CliResult<CharacterParams> {
        if self.gamma_plus != 0.0 || self.gamma_minus != 0.0 {
            return Err(invalid(format!(
                "γ+ = {}, γ- = {} rejected: the exact path sampler only handles finitely many α± and β± parameters, \
                 so characters with a Plancherel (γ) factor cannot be sampled",
                self.gamma_plus, self.gamma_minus
            )));
        }
        if self.n == 0 {
            return Err(invalid("N must be at least 1"));
        }
        let spec = EdreiSpec::new(
            self.alpha_plus.clone(),
            self.alpha_minus.clone(),
            self.beta_plus.clone(),
            self.beta_minus.clone(),
            0.0,
            0.0,
        )?;
        Ok(CharacterParams::from_spec(spec)?)
    }
}

#[derive(Clone, Debug)]
enum SppWeights {
    Uniform(f64),
    Slices(Vec<f64>),
}

fn io_err(path: &Path, source: io::Error) -> CliError {
    CliError::Io { path: path.display().to_string(), source }
}

#[derive(Serialize)]
struct Header<'a, C: Serialize> {
    kind: &'static str,
    schema_version: u32,
    config: &'a C,
}

/// One sampled plane partition; `entries` covers the full box with `null`
/// on the cells of π.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanePartitionRecord {
    pub kind: String,
    pub schema_version: u32,
    pub index: usize,
    #[serde(rename = "A")]
    pub a: usize,
    #[serde(rename = "B")]
    pub b: usize,
    pub pi: Vec<i64>,
    pub q: Option<f64>,
    pub entries: Vec<Vec<Option<i64>>>,
    pub volume: i64,
    pub draws: u64,
    pub slices: Vec<Vec<i64>>,
}

impl PlanePartitionRecord {
    fn new(index: usize, pp: &PlanePartition, q: Option<f64>, draws: u64) -> Self {
        let shape = pp.shape();
        PlanePartitionRecord {
            kind: "plane_partition".into(),
            schema_version: SCHEMA_VERSION,
            index,
            a: shape.a,
            b: shape.b,
            pi: shape.pi.parts().to_vec(),
            q,
            entries: pp.height_grid(),
            volume: pp.volume(),
            draws,
            slices: pp.diagonal_slices().iter().map(|s| s.parts().to_vec()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GtPatternRecord {
    pub kind: String,
    pub schema_version: u32,
    pub index: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub levels: Vec<Vec<i64>>,
    pub draws: u64,
}

impl GtPatternRecord {
    fn new(index: usize, pattern: &GTPattern, draws: u64) -> Self {
        GtPatternRecord {
            kind: "gt_pattern".into(),
            schema_version: SCHEMA_VERSION,
            index,
            n: pattern.depth(),
            levels: pattern.levels().iter().map(|s| s.parts().to_vec()).collect(),
            draws,
        }
    }
}

fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| invalid(format!("cannot start {threads} worker threads: {e}")))?;
    Ok(pool.install(f))
}

/// Draws the configured plane partitions, in sample order.
pub fn generate_spp(cfg: &RunConfig) -> CliResult<Vec<PlanePartitionRecord>> {
    let (shape, weights) = cfg.spp_model()?;
    let q = match weights {
        SppWeights::Uniform(q) => Some(q),
        SppWeights::Slices(_) => None,
    };
    let draws = with_pool(cfg.threads, || {
        batch(cfg.samples, cfg.seed, |rng| match &weights {
            SppWeights::Uniform(q) => sample_spp(&shape, *q, rng),
            SppWeights::Slices(w) => sample_spp_weighted(&shape, w, rng),
        })
    })??;
    Ok(draws
        .iter()
        .enumerate()
        .map(|(i, (pp, counter))| PlanePartitionRecord::new(i, pp, q, counter.nontrivial_draws))
        .collect())
}

/// Draws the configured Gelfand-Tsetlin paths, in sample order.
pub fn generate_gt(cfg: &RunConfig) -> CliResult<Vec<GtPatternRecord>> {
    let chi = cfg.character()?;
    let draws = with_pool(cfg.threads, || batch(cfg.samples, cfg.seed, |rng| sample_gt_path(&chi, cfg.n, rng)))??;
    draws
        .iter()
        .enumerate()
        .map(|(i, (pattern, counter))| {
            // re-validates the interlacing of the sampled rows
            let checked = GTPattern::new(pattern.levels().to_vec())?;
            Ok(GtPatternRecord::new(i, &checked, counter.nontrivial_draws))
        })
        .collect()
}

fn json_line<T: Serialize>(out: &mut String, value: &T) {
    out.push_str(&serde_json::to_string(value).expect("records serialize"));
    out.push('\n');
}

pub fn cmd_sample_spp(cfg: &RunConfig) -> CliResult<String> {
    let records = generate_spp(cfg)?;
    if records.is_empty() {
        return Ok(String::new());
    }
    let mut out = String::new();
    match cfg.format {
        Format::Jsonl => {
            json_line(&mut out, &Header { kind: "header", schema_version: SCHEMA_VERSION, config: cfg });
            for r in &records {
                json_line(&mut out, r);
            }
        }
        Format::Ascii => {
            out.push_str(&render::ascii_header(cfg));
            for r in &records {
                out.push_str(&render::ascii_plane_partition(r));
            }
        }
        Format::Svg => out.push_str(&render::svg_plane_partitions(cfg, &records)),
    }
    Ok(out)
}

pub fn cmd_sample_gt(cfg: &RunConfig) -> CliResult<String> {
    if cfg.format == Format::Svg {
        return Err(invalid("svg output is only available for plane partitions"));
    }
    let records = generate_gt(cfg)?;
    if records.is_empty() {
        return Ok(String::new());
    }
    let summary = gt_stats(&records)?;
    let mut out = String::new();
    match cfg.format {
        Format::Jsonl => {
            json_line(&mut out, &Header { kind: "header", schema_version: SCHEMA_VERSION, config: cfg });
            for r in &records {
                json_line(&mut out, r);
            }
            json_line(&mut out, &summary);
        }
        _ => {
            out.push_str(&render::ascii_header(cfg));
            for r in &records {
                out.push_str(&render::ascii_gt_pattern(r));
            }
            out.push_str(&render::ascii_gt_stats(&summary));
        }
    }
    Ok(out)
}

/// Records read from sample files.
enum Loaded {
    Spp(Vec<PlanePartitionRecord>),
    Gt(Vec<GtPatternRecord>),
}

fn load_records(paths: &[PathBuf]) -> CliResult<Loaded> {
    let mut spp = Vec::new();
    let mut gt = Vec::new();
    for path in paths {
        let text = fs::read_to_string(path).map_err(|source| io_err(path, source))?;
        for (lineno, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let at = || format!("{}:{}", path.display(), lineno + 1);
            let value: serde_json::Value =
                serde_json::from_str(line).map_err(|e| invalid(format!("{}: {e}", at())))?;
            let version = value.get("schema_version").and_then(|v| v.as_u64());
            if version != Some(SCHEMA_VERSION as u64) {
                return Err(invalid(format!("{}: unsupported schema version {version:?}", at())));
            }
            let parse_err = |e: serde_json::Error| invalid(format!("{}: {e}", at()));
            match value.get("kind").and_then(|k| k.as_str()) {
                Some("plane_partition") => spp.push(serde_json::from_value(value).map_err(parse_err)?),
                Some("gt_pattern") => gt.push(serde_json::from_value(value).map_err(parse_err)?),
                _ => {}
            }
        }
    }
    match (spp.is_empty(), gt.is_empty()) {
        (false, true) => Ok(Loaded::Spp(spp)),
        (true, false) => Ok(Loaded::Gt(gt)),
        (true, true) => Err(invalid("no samples: the inputs hold no plane_partition or gt_pattern records")),
        (false, false) => Err(invalid("inputs mix plane partitions and Gelfand-Tsetlin patterns")),
    }
}

pub fn cmd_stats(args: &StatsArgs) -> CliResult<String> {
    let cfg = RunConfig::resolve("stats", &args.params)?;
    if cfg.format == Format::Svg {
        return Err(invalid("stats supports jsonl and ascii output"));
    }
    let loaded = if !args.inputs.is_empty() {
        load_records(&args.inputs)?
    } else {
        match args.kind.unwrap_or_default() {
            Kind::Spp => Loaded::Spp(generate_spp(&cfg)?),
            Kind::Gt => Loaded::Gt(generate_gt(&cfg)?),
        }
    };
    let mut out = String::new();
    match loaded {
        Loaded::Spp(records) => {
            let s = spp_stats(&records)?;
            match cfg.format {
                Format::Ascii => out.push_str(&render::ascii_spp_stats(&s)),
                _ => json_line(&mut out, &s),
            }
        }
        Loaded::Gt(records) => {
            let s = gt_stats(&records)?;
            match cfg.format {
                Format::Ascii => out.push_str(&render::ascii_gt_stats(&s)),
                _ => json_line(&mut out, &s),
            }
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    kind: &'static str,
    schema_version: u32,
    options: &'a SuiteOptions,
    pass: bool,
    criteria: &'a [crate::suite::CriterionReport],
}

/// Runs the suite; the report is returned together with the overall verdict.
pub fn cmd_verify(args: &VerifyArgs) -> CliResult<(String, bool)> {
    let ids = select(&args.only)?;
    let mut opts = SuiteOptions::default();
    if let Some(seeds) = &args.seeds {
        opts.seeds.copy_from_slice(seeds);
    }
    if !(args.sample_scale.is_finite() && args.sample_scale > 0.0) {
        return Err(invalid(format!("sample scale {} must be positive", args.sample_scale)));
    }
    opts.sample_scale = args.sample_scale;
    let reports = with_pool(args.threads.unwrap_or(0), || run_suite(&ids, &opts))??;
    let pass = reports.iter().all(|r| r.pass);
    let mut out = String::new();
    match args.format {
        Format::Jsonl => json_line(
            &mut out,
            &VerifyReport { kind: "verify_report", schema_version: SCHEMA_VERSION, options: &opts, pass, criteria: &reports },
        ),
        Format::Ascii => {
            for r in &reports {
                out.push_str(&r.summary_line());
                out.push('\n');
                for c in &r.checks {
                    out.push_str(&render::ascii_check(c));
                }
            }
        }
        Format::Svg => return Err(invalid("verify supports jsonl and ascii output")),
    }
    Ok((out, pass))
}

fn write_output(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| io_err(path, source)),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            })
        }
    }
}

/// Executes a parsed command line, writing its output.
pub fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::SampleSpp(p) => {
            let cfg = RunConfig::resolve("sample-spp", &p)?;
            write_output(cfg.out.as_deref(), &cmd_sample_spp(&cfg)?)
        }
        Command::SampleGt(p) => {
            let cfg = RunConfig::resolve("sample-gt", &p)?;
            write_output(cfg.out.as_deref(), &cmd_sample_gt(&cfg)?)
        }
        Command::Stats(args) => {
            let cfg = RunConfig::resolve("stats", &args.params)?;
            write_output(cfg.out.as_deref(), &cmd_stats(&args)?)
        }
        Command::Verify(args) => {
            let (text, pass) = cmd_verify(&args)?;
            write_output(args.out.as_deref(), &text)?;
            if pass {
                Ok(())
            } else {
                Err(CliError::VerificationFailed("at least one criterion failed".into()))
            }
        }
    }
}

/// Parses `args` and runs; returns the process exit code (0 success,
/// 1 validation error, 2 verification failure).
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(args: &[&str]) -> Params {
        let mut full = vec!["schurdyn", "sample-spp"];
        full.extend_from_slice(args);
        match Cli::try_parse_from(full).unwrap().command {
            Command::SampleSpp(p) => p,
            _ => unreachable!(),
        }
    }

    #[test]
    fn flags_override_config_over_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(&path, "A = 2\nB = 5\nq_weights = [0.5, 0.5, 0.5, 0.5, 0.5, 0.5]\nseed = 9\n").unwrap();
        let p = params(&["--config", path.to_str().unwrap(), "--B", "2", "--q", "0.3"]);
        let cfg = RunConfig::resolve("sample-spp", &p).unwrap();
        assert_eq!((cfg.a, cfg.b, cfg.seed), (2, 2, 9));
        assert_eq!((cfg.q, cfg.q_weights), (Some(0.3), None));
        assert_eq!(cfg.samples, 1);
        assert_eq!(cfg.format, Format::Jsonl);
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(&path, "qq = 0.5\n").unwrap();
        let p = params(&["--config", path.to_str().unwrap()]);
        assert!(matches!(RunConfig::resolve("sample-spp", &p), Err(CliError::Validation(_))));
    }

    #[test]
    fn validation_precedes_sampling() {
        let cfg = RunConfig::resolve("sample-spp", &params(&["--A", "2", "--B", "2", "--pi", "3"])).unwrap();
        assert!(generate_spp(&cfg).is_err());
        let cfg = RunConfig::resolve("sample-spp", &params(&["--q", "1.0"])).unwrap();
        assert!(generate_spp(&cfg).is_err());
    }

    #[test]
    fn spp_example_records() {
        let p = params(&["--A", "4", "--B", "3", "--pi", "2,1,1,0", "--q", "0.5", "--samples", "10", "--seed", "1"]);
        let cfg = RunConfig::resolve("sample-spp", &p).unwrap();
        let records = generate_spp(&cfg).unwrap();
        assert_eq!(records.len(), 10);
        for r in &records {
            assert!(r.draws <= 24);
            let total: i64 = r.entries.iter().flatten().flatten().sum();
            assert_eq!(total, r.volume);
            assert_eq!(r.slices.len(), 4 + 3 + 1);
        }
    }

    #[test]
    fn output_is_thread_count_independent() {
        let base = ["--A", "3", "--B", "3", "--q", "0.6", "--samples", "40", "--seed", "5"];
        let mut one = base.to_vec();
        one.extend(["--threads", "1"]);
        let mut four = base.to_vec();
        four.extend(["--threads", "4"]);
        let a = cmd_sample_spp(&RunConfig::resolve("sample-spp", &params(&one)).unwrap()).unwrap();
        let b = cmd_sample_spp(&RunConfig::resolve("sample-spp", &params(&four)).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn gamma_is_rejected_with_the_sampler_limitation() {
        let mut p = params(&["--alpha-plus", "0.1"]);
        p.gamma_plus = Some(0.5);
        let cfg = RunConfig::resolve("sample-gt", &p).unwrap();
        let err = generate_gt(&cfg).unwrap_err().to_string();
        assert!(err.contains("γ") && err.contains("path sampler"), "{err}");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["schurdyn", "sample-spp", "--samples", "0"]), 0);
        assert_eq!(run(["schurdyn", "sample-spp", "--q", "2"]), 1);
        assert_eq!(run(["schurdyn", "sample-spp", "--bogus"]), 1);
        assert_eq!(run(["schurdyn", "verify", "--only", "no-such-criterion"]), 1);
    }
}
