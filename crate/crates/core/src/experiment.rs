//! End-to-end trials: grow a tree from a seed, hide its labels, run a finder
//! on the view, and score the output against the hidden arrival order.
//!
//! Trial `t` draws all of its randomness from stream `t` of the master seed,
//! so results do not depend on scheduling or on the worker count.

use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{Moments, ProportionSummary};
use crate::finders::{find_seed, FinderKind, FinderParams, SeedEstimate};
use crate::format::{write_key, write_tree};
use crate::rng::{RngHandle, RNG_ALGORITHM};
use crate::tree::{generate, scramble, ArrivalTree, LabelKey, SeedSpec};

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

/// Environment variable that overrides the configured master seed.
pub const MASTER_SEED_ENV: &str = "SEED_ARCHEOLOGY_SEED";

/// Header of the per-trial CSV.
pub const TRIAL_CSV_HEADER: &str =
    "trial,success_first,success_second,overlap,output_size,deficit,elapsed_ns";

fn default_gamma() -> f64 {
    0.5
}

fn default_epsilon() -> f64 {
    0.1
}

fn default_c() -> f64 {
    1.0
}

fn default_parallelism() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub seed: SeedSpec,
    /// Final tree size; defaults to `100 * l`.
    #[serde(default)]
    pub n: Option<usize>,
    pub finder: FinderKind,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_c")]
    pub star_constant: f64,
    pub trials: u64,
    pub master_seed: u64,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    /// Fill `elapsed_ns`; off by default so the CSV is reproducible.
    #[serde(default)]
    pub record_timing: bool,
    /// Directory receiving each trial's tree, key and finder output.
    #[serde(default)]
    pub debug_dump: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(seed: SeedSpec, finder: FinderKind, trials: u64, master_seed: u64) -> Self {
        Self {
            schema_version: CONFIG_SCHEMA_VERSION,
            seed,
            n: None,
            finder,
            gamma: default_gamma(),
            epsilon: default_epsilon(),
            star_constant: default_c(),
            trials,
            master_seed,
            parallelism: 1,
            output_path: None,
            record_timing: false,
            debug_dump: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Replaces the master seed with the value of [`MASTER_SEED_ENV`], if set.
    pub fn apply_env_override(&mut self) -> Result<()> {
        if let Ok(value) = std::env::var(MASTER_SEED_ENV) {
            self.master_seed = value.trim().parse().map_err(|_| {
                Error::Config(format!("{MASTER_SEED_ENV}={value} is not a 64-bit integer"))
            })?;
        }
        Ok(())
    }

    pub fn final_size(&self) -> usize {
        self.n.unwrap_or(100 * self.seed.size())
    }

    pub fn params(&self) -> Result<FinderParams<f64>> {
        FinderParams::new(self.seed.size(), self.gamma, self.epsilon)?
            .with_star_constant(self.star_constant)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} is not supported (expected {CONFIG_SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.parallelism == 0 {
            return Err(Error::Config("parallelism must be at least 1".into()));
        }
        if self.seed.size() == 0 {
            return Err(Error::Config("seed size must be at least 1".into()));
        }
        if self.final_size() < self.seed.size() {
            return Err(Error::Config(format!(
                "n = {} is smaller than the seed ({})",
                self.final_size(),
                self.seed.size()
            )));
        }
        self.params().map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }
}

/// One trial's outcome row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    #[serde(rename = "trial")]
    pub trial_index: u64,
    /// Every output vertex is a seed vertex.
    #[serde(rename = "success_first")]
    pub success_first_kind: bool,
    /// Every seed vertex is in the output.
    #[serde(rename = "success_second")]
    pub success_second_kind: bool,
    pub overlap: usize,
    pub output_size: usize,
    pub deficit: bool,
    pub elapsed_ns: u64,
    /// For star seeds, whether the finder's anchor is the seed centre.
    #[serde(skip)]
    pub center_hit: Option<bool>,
}

/// Scores an estimate against the seed `{1..=seed_size}`.
pub fn score(
    trial_index: u64,
    estimate: &SeedEstimate,
    key: &LabelKey,
    seed_size: usize,
    star_seed: bool,
) -> TrialRecord {
    let overlap = estimate
        .vertices
        .iter()
        .filter(|&&s| key.arrival_of(s) <= seed_size)
        .count();
    let output_size = estimate.vertices.len();
    TrialRecord {
        trial_index,
        success_first_kind: overlap == output_size,
        success_second_kind: overlap == seed_size,
        overlap,
        output_size,
        deficit: estimate.deficit,
        elapsed_ns: 0,
        center_hit: if star_seed {
            estimate.anchor.map(|a| key.arrival_of(a) == 1)
        } else {
            None
        },
    }
}

/// Everything a trial produced, for dumping and auditing.
#[derive(Debug, Clone)]
pub struct TrialArtifacts {
    pub record: TrialRecord,
    pub tree: ArrivalTree,
    pub key: LabelKey,
    pub estimate: SeedEstimate,
}

pub fn run_trial_detailed(config: &ExperimentConfig, trial_index: u64) -> Result<TrialArtifacts> {
    let wrap = |e: Error| Error::Trial {
        trial: trial_index,
        source: Box::new(e),
    };
    let start = Instant::now();
    let params = config.params().map_err(wrap)?;
    let mut rng = RngHandle::new(config.master_seed, trial_index);
    let tree = generate(&config.seed, config.final_size(), &mut rng).map_err(wrap)?;
    let scrambled = scramble(&tree, &mut rng);
    let estimate = find_seed(config.finder, &scrambled.view, &params, &mut rng).map_err(wrap)?;
    let star_seed = matches!(config.seed, SeedSpec::Star { .. });
    let mut record = score(
        trial_index,
        &estimate,
        &scrambled.key,
        config.seed.size(),
        star_seed,
    );
    if config.record_timing {
        record.elapsed_ns = start.elapsed().as_nanos() as u64;
    }
    Ok(TrialArtifacts {
        record,
        tree,
        key: scrambled.key,
        estimate,
    })
}

pub fn run_trial(config: &ExperimentConfig, trial_index: u64) -> Result<TrialRecord> {
    run_trial_detailed(config, trial_index).map(|a| a.record)
}

fn dump_trial(dir: &Path, artifacts: &TrialArtifacts) -> Result<()> {
    let t = artifacts.record.trial_index;
    let write = |name: String, body: String| {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|e| Error::io(path, e))
    };
    write(format!("trial_{t}.tree"), write_tree(&artifacts.tree))?;
    write(format!("trial_{t}.key"), write_key(&artifacts.key))?;
    let found: String = artifacts
        .estimate
        .vertices
        .iter()
        .map(|v| format!("{v}\n"))
        .collect();
    write(format!("trial_{t}.found"), found)
}

/// Runs every trial on a pool of `config.parallelism` workers and returns the
/// records in trial order.
pub fn run_trials(config: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    config.validate()?;
    if let Some(dir) = &config.debug_dump {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        (0..config.trials)
            .into_par_iter()
            .map(|t| {
                let artifacts = run_trial_detailed(config, t)?;
                if let Some(dir) = &config.debug_dump {
                    dump_trial(dir, &artifacts)?;
                }
                Ok(artifacts.record)
            })
            .collect()
    })
}

pub fn write_records_csv<W: Write>(records: &[TrialRecord], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for record in records {
        writer.serialize(record)?;
    }
    if records.is_empty() {
        writer.write_record(TRIAL_CSV_HEADER.split(','))?;
    }
    writer.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn read_records_csv<R: std::io::Read>(input: R) -> Result<Vec<TrialRecord>> {
    let mut reader = csv::Reader::from_reader(input);
    reader
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSummary {
    pub mean: f64,
    pub std_error: f64,
}

impl MeanSummary {
    fn of(values: impl Iterator<Item = f64>) -> Self {
        let m: Moments<f64> = values.collect();
        Self {
            mean: m.mean(),
            std_error: m.std_error(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub config: ExperimentConfig,
    pub rng_algorithm: String,
    pub n: usize,
    pub trials: u64,
    pub success_first: ProportionSummary,
    pub success_second: ProportionSummary,
    pub deficit: ProportionSummary,
    /// Star seeds only: how often the finder anchored on the seed centre.
    pub center_hit: Option<ProportionSummary>,
    pub overlap: MeanSummary,
    pub output_size: MeanSummary,
    pub wall_time_ms: f64,
}

/// Folds records (in trial order) into a summary.
pub fn summarize(config: &ExperimentConfig, records: &[TrialRecord], wall_time_ms: f64) -> Summary {
    let trials = records.len() as u64;
    let count = |f: fn(&TrialRecord) -> bool| records.iter().filter(|r| f(r)).count() as u64;
    let centers: Vec<bool> = records.iter().filter_map(|r| r.center_hit).collect();
    Summary {
        config: config.clone(),
        rng_algorithm: RNG_ALGORITHM.to_string(),
        n: config.final_size(),
        trials,
        success_first: ProportionSummary::new(count(|r| r.success_first_kind), trials),
        success_second: ProportionSummary::new(count(|r| r.success_second_kind), trials),
        deficit: ProportionSummary::new(count(|r| r.deficit), trials),
        center_hit: (!centers.is_empty()).then(|| {
            ProportionSummary::new(
                centers.iter().filter(|&&c| c).count() as u64,
                centers.len() as u64,
            )
        }),
        overlap: MeanSummary::of(records.iter().map(|r| r.overlap as f64)),
        output_size: MeanSummary::of(records.iter().map(|r| r.output_size as f64)),
        wall_time_ms,
    }
}

/// Runs the experiment, writing the trial CSV to `config.output_path` when set.
/// The output file is created before any trial runs.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Summary> {
    config.validate()?;
    let out = match &config.output_path {
        Some(path) => Some(File::create(path).map_err(|e| Error::io(path, e))?),
        None => None,
    };
    let start = Instant::now();
    let records = run_trials(config)?;
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    if let Some(file) = out {
        write_records_csv(&records, std::io::BufWriter::new(file))?;
    }
    Ok(summarize(config, &records, wall_time_ms))
}

/// Repeats an experiment at several final sizes (in-memory, no CSV).
pub fn n_sweep(config: &ExperimentConfig, sizes: &[usize]) -> Result<Vec<Summary>> {
    sizes
        .iter()
        .map(|&n| {
            let mut c = config.clone();
            c.n = Some(n);
            c.output_path = None;
            c.debug_dump = None;
            let start = Instant::now();
            let records = run_trials(&c)?;
            Ok(summarize(&c, &records, start.elapsed().as_secs_f64() * 1e3))
        })
        .collect()
}
