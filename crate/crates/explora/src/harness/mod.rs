//! Episode runner and Monte-Carlo benchmark harness.
//!
//! One episode wires the pieces together exactly as the benchmarked
//! algorithms prescribe: initialize by pulling every arm once, then loop
//! (check the stopping rule, select an arm, sample, update) until the
//! evidence threshold is cleared or the step cap is hit. Episodes are pure
//! functions of their configuration: the `(seed, stream)` pair pins every
//! random draw, so results reproduce byte for byte (wall-clock fields aside)
//! no matter how the harness schedules them.

pub mod export;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bandit::{AgentState, GaussianBandit, RngStream};
use crate::error::{Error, Result};
use crate::problems::{answer, glr_statistic, Answer, ProblemSpec};
use crate::sampling::{initialize, Sampler, SamplerConfig};
use crate::stopping::{decide, threshold, ThresholdSpec};
use crate::util::uniform;

fn default_max_steps() -> u64 {
    10_000_000
}

/// Everything one episode needs: the true instance, the task, the sampling
/// rule, the stopping threshold, and the random stream key.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeConfig {
    /// True arm means of the environment.
    pub means: Vec<f64>,
    pub problem: ProblemSpec,
    pub sampler: SamplerConfig,
    pub threshold: ThresholdSpec,
    pub seed: u64,
    /// Sub-stream of the seed; the benchmark assigns one per episode.
    #[serde(default)]
    pub stream: u64,
    /// Step cap; hitting it yields a `Timeout` outcome, never a decision.
    #[serde(default = "default_max_steps")]
    pub max_steps: u64,
    /// Record every `stride`-th step of the trajectory; 0 disables recording.
    #[serde(default)]
    pub trajectory_stride: u64,
    /// Ignore the stopping rule and run to `max_steps`; used to study the
    /// sampling rule's long-run proportions in isolation.
    #[serde(default)]
    pub disable_stopping: bool,
}

impl EpisodeConfig {
    pub fn new(
        means: Vec<f64>,
        problem: ProblemSpec,
        sampler: SamplerConfig,
        threshold: ThresholdSpec,
        seed: u64,
    ) -> Self {
        Self {
            means,
            problem,
            sampler,
            threshold,
            seed,
            stream: 0,
            max_steps: default_max_steps(),
            trajectory_stride: 0,
            disable_stopping: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bandit = GaussianBandit::new(self.means.clone())?;
        self.problem.validate()?;
        self.sampler.validate()?;
        self.threshold.validate()?;
        if self.max_steps < bandit.arms() as u64 {
            return Err(Error::InvalidConfig(format!(
                "max_steps {} cannot cover the {}-arm initialization",
                self.max_steps,
                bandit.arms()
            )));
        }
        if answer(&self.problem, &self.means).is_none() {
            return Err(Error::InvalidConfig(
                "the true means lie on a class boundary, so no answer is correct".into(),
            ));
        }
        Ok(())
    }
}

/// How an episode ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Stopped,
    Timeout,
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::Stopped => "stopped",
            Outcome::Timeout => "timeout",
        }
    }
}

/// One recorded step of a trajectory. The mirror-ascent proposals are only
/// present for the rules that produce them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: u64,
    pub w_tilde: Option<Vec<f64>>,
    pub w_prime: Option<Vec<f64>>,
    pub mu_hat: Vec<f64>,
    pub glr: f64,
    pub counts: Vec<u64>,
}

/// The outcome of one episode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    /// Stopping time in total pulls (including initialization).
    pub tau: u64,
    /// The returned class; absent on timeout.
    pub decision: Option<Answer>,
    /// Whether the decision matches the true instance's class; always false
    /// on timeout.
    pub correct: bool,
    pub counts: Vec<u64>,
    pub outcome: Outcome,
    /// Total wall time; the only field exempt from reproducibility.
    pub wall_ms: f64,
    /// Times the Thompson challenger search hit its re-sampling cap.
    pub resample_overflows: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trajectory: Option<Vec<TrajectoryPoint>>,
}

/// Runs one episode to completion.
pub fn run_episode(config: &EpisodeConfig) -> Result<EpisodeResult> {
    run_episode_inner(config).map_err(|source| Error::Episode {
        stream: config.stream,
        source: Box::new(source),
    })
}

fn run_episode_inner(config: &EpisodeConfig) -> Result<EpisodeResult> {
    config.validate()?;
    let bandit = GaussianBandit::new(config.means.clone())?;
    let k = bandit.arms();
    let spec = &config.problem;
    let true_answer = answer(spec, bandit.means()).expect("validated as decided");

    let started = Instant::now();
    let mut rng = RngStream::new(config.seed, config.stream);
    let mut agent = AgentState::new(k);
    let pi = uniform(k);
    for arm in initialize(k) {
        let reward = bandit.sample(arm, &mut rng)?;
        agent.update(arm, reward)?;
        agent.credit_weights(&pi);
    }
    let mut sampler = Sampler::for_episode(&config.sampler, spec, bandit.means(), k as u64)?;
    let mut trajectory: Option<Vec<TrajectoryPoint>> =
        (config.trajectory_stride > 0).then(Vec::new);

    loop {
        let t = agent.t();
        let mu_hat = agent.empirical_means()?;
        let glr = glr_statistic(spec, agent.counts(), &mu_hat)?;

        if let Some(points) = trajectory.as_mut() {
            if (t - k as u64) % config.trajectory_stride == 0 {
                let (w_tilde, w_prime) = match sampler.last_proposals() {
                    Some((wt, wp)) => (Some(wt.to_vec()), Some(wp.to_vec())),
                    None => (None, None),
                };
                points.push(TrajectoryPoint {
                    t,
                    w_tilde,
                    w_prime,
                    mu_hat: mu_hat.clone(),
                    glr,
                    counts: agent.counts().to_vec(),
                });
            }
        }

        let beta = threshold(&config.threshold, agent.counts(), t as f64);
        if !config.disable_stopping && glr >= beta {
            let decision = decide(spec, &agent)?;
            let correct = decision == true_answer;
            return Ok(EpisodeResult {
                tau: t,
                decision: Some(decision),
                correct,
                counts: agent.counts().to_vec(),
                outcome: Outcome::Stopped,
                wall_ms: started.elapsed().as_secs_f64() * 1e3,
                resample_overflows: sampler.resample_overflows(),
                trajectory,
            });
        }
        if t >= config.max_steps {
            return Ok(EpisodeResult {
                tau: t,
                decision: None,
                correct: false,
                counts: agent.counts().to_vec(),
                outcome: Outcome::Timeout,
                wall_ms: started.elapsed().as_secs_f64() * 1e3,
                resample_overflows: sampler.resample_overflows(),
                trajectory,
            });
        }

        let arm = sampler.select(&mut agent, spec, &mut rng)?;
        let reward = bandit.sample(arm, &mut rng)?;
        agent.update(arm, reward)?;
    }
}

/// One benchmark episode, flattened for export.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub algorithm: String,
    pub delta: f64,
    /// The episode's sub-stream id under the benchmark's base seed.
    pub seed: u64,
    pub tau: u64,
    pub correct: bool,
    pub outcome: Outcome,
    pub wall_ms: f64,
}

/// Stopping-time quantiles over the stopped episodes (lower empirical
/// quantiles of the sorted sample).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TauQuantiles {
    pub p05: u64,
    pub p25: u64,
    pub p50: u64,
    pub p75: u64,
    pub p95: u64,
}

/// Per-configuration aggregate of a benchmark.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub algorithm: String,
    pub delta: f64,
    pub episodes: u64,
    pub stopped: u64,
    pub timeouts: u64,
    pub errors: u64,
    /// Wrong decisions over stopped episodes.
    pub error_rate: f64,
    /// Mean and quantiles of the stopping time, over stopped episodes only.
    pub mean_tau: f64,
    pub median_tau: f64,
    pub quantiles: TauQuantiles,
    /// Mean wall time per step; informational only, never asserted.
    pub mean_step_wall_ns: f64,
}

/// Streaming aggregation of episode records. Merging partial accumulators
/// gives the same summary as a single pass, so sharded runs aggregate
/// exactly.
#[derive(Clone, Debug, Default)]
pub struct BenchAccumulator {
    taus: Vec<u64>,
    episodes: u64,
    errors: u64,
    timeouts: u64,
    wall_ms: f64,
    steps: u64,
}

impl BenchAccumulator {
    pub fn push(&mut self, record: &EpisodeRecord) {
        self.episodes += 1;
        self.wall_ms += record.wall_ms;
        self.steps += record.tau;
        match record.outcome {
            Outcome::Stopped => {
                self.taus.push(record.tau);
                if !record.correct {
                    self.errors += 1;
                }
            }
            Outcome::Timeout => self.timeouts += 1,
        }
    }

    pub fn merge(&mut self, other: BenchAccumulator) {
        self.taus.extend(other.taus);
        self.episodes += other.episodes;
        self.errors += other.errors;
        self.timeouts += other.timeouts;
        self.wall_ms += other.wall_ms;
        self.steps += other.steps;
    }

    pub fn summarize(&self, algorithm: String, delta: f64) -> BenchSummary {
        let mut taus = self.taus.clone();
        taus.sort_unstable();
        let quantile = |q: f64| -> u64 {
            if taus.is_empty() {
                return 0;
            }
            let idx = ((q * taus.len() as f64).ceil() as usize)
                .saturating_sub(1)
                .min(taus.len() - 1);
            taus[idx]
        };
        let stopped = taus.len() as u64;
        let mean_tau = if taus.is_empty() {
            0.0
        } else {
            taus.iter().sum::<u64>() as f64 / taus.len() as f64
        };
        let quantiles = TauQuantiles {
            p05: quantile(0.05),
            p25: quantile(0.25),
            p50: quantile(0.50),
            p75: quantile(0.75),
            p95: quantile(0.95),
        };
        BenchSummary {
            algorithm,
            delta,
            episodes: self.episodes,
            stopped,
            timeouts: self.timeouts,
            errors: self.errors,
            error_rate: if stopped > 0 {
                self.errors as f64 / stopped as f64
            } else {
                0.0
            },
            mean_tau,
            median_tau: quantiles.p50 as f64,
            quantiles,
            mean_step_wall_ns: if self.steps > 0 {
                self.wall_ms * 1e6 / self.steps as f64
            } else {
                0.0
            },
        }
    }
}

/// A finished benchmark: every episode record plus one summary per
/// configuration, in configuration order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub episodes_per_config: u64,
    pub configs: Vec<EpisodeConfig>,
    pub records: Vec<EpisodeRecord>,
    pub summaries: Vec<BenchSummary>,
}

/// Runs `episodes_per_config` independent episodes of every configuration.
///
/// Episode `i` of every configuration runs on stream `i` of the
/// configuration's seed, so different rules see identical reward noise.
/// Execution order is irrelevant: records come back sorted by
/// (configuration, episode) no matter the parallelism.
pub fn run_bench(
    configs: &[EpisodeConfig],
    episodes_per_config: u64,
    parallelism: usize,
) -> Result<BenchReport> {
    if episodes_per_config == 0 {
        return Err(Error::InvalidConfig(
            "episodes_per_config must be at least one".into(),
        ));
    }
    for config in configs {
        config.validate()?;
    }
    let jobs: Vec<EpisodeConfig> = configs
        .iter()
        .flat_map(|config| {
            (0..episodes_per_config).map(move |stream| EpisodeConfig {
                stream,
                trajectory_stride: 0,
                ..config.clone()
            })
        })
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("could not build thread pool: {e}")))?;
    let results: Result<Vec<EpisodeResult>> =
        pool.install(|| jobs.par_iter().map(run_episode).collect());
    let results = results?;

    let records: Vec<EpisodeRecord> = jobs
        .iter()
        .zip(&results)
        .map(|(job, result)| EpisodeRecord {
            algorithm: job.sampler.name().to_string(),
            delta: job.threshold.delta(),
            seed: job.stream,
            tau: result.tau,
            correct: result.correct,
            outcome: result.outcome,
            wall_ms: result.wall_ms,
        })
        .collect();

    let summaries = configs
        .iter()
        .enumerate()
        .map(|(i, config)| {
            let mut acc = BenchAccumulator::default();
            let base = i as u64 * episodes_per_config;
            for record in &records[base as usize..(base + episodes_per_config) as usize] {
                acc.push(record);
            }
            acc.summarize(config.sampler.name().to_string(), config.threshold.delta())
        })
        .collect();

    Ok(BenchReport {
        episodes_per_config,
        configs: configs.to_vec(),
        records,
        summaries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn huge_gap_config(seed: u64) -> EpisodeConfig {
        EpisodeConfig::new(
            vec![0.0, 100.0],
            ProblemSpec::thresholding(50.0).unwrap(),
            SamplerConfig::lma(),
            ThresholdSpec::practical(0.1).unwrap(),
            seed,
        )
    }

    #[test]
    fn huge_gap_instances_stop_fast_and_correctly() {
        let mut correct = 0;
        for seed in 0..100 {
            let result = run_episode(&huge_gap_config(seed)).unwrap();
            assert!(result.tau <= 25, "tau = {}", result.tau);
            assert_eq!(result.outcome, Outcome::Stopped);
            if result.correct {
                correct += 1;
            }
        }
        assert!(correct >= 99, "only {correct}/100 correct");
    }

    #[test]
    fn validation_rejects_bad_configs() {
        // delta at the edge of the admissible range
        assert!(ThresholdSpec::practical(0.5).is_err());

        let mut config = huge_gap_config(0);
        config.max_steps = 1;
        assert!(config.validate().is_err());

        // a boundary instance has no correct answer
        let mut config = huge_gap_config(0);
        config.means = vec![50.0, 100.0];
        assert!(config.validate().is_err());

        let mut config = huge_gap_config(0);
        config.means = vec![1.0];
        assert!(config.validate().is_err());
    }

    #[test]
    fn identical_seeds_reproduce_identically() {
        let config = EpisodeConfig::new(
            vec![1.0, 0.85, 0.8, 0.75],
            ProblemSpec::best_arm(),
            SamplerConfig::lma(),
            ThresholdSpec::practical(0.1).unwrap(),
            99,
        );
        let mut a = run_episode(&config).unwrap();
        let mut b = run_episode(&config).unwrap();
        a.wall_ms = 0.0;
        b.wall_ms = 0.0;
        assert_eq!(a, b);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn initialization_pulls_every_arm_once() {
        let mut config = huge_gap_config(3);
        config.means = vec![0.0, 0.1, 100.0];
        config.disable_stopping = true;
        config.max_steps = 3;
        let result = run_episode(&config).unwrap();
        assert_eq!(result.counts, vec![1, 1, 1]);
        assert_eq!(result.outcome, Outcome::Timeout);
        assert_eq!(result.decision, None);
    }

    #[test]
    fn trajectory_recording_respects_stride() {
        let mut config = huge_gap_config(1);
        config.means = vec![0.0, 100.0];
        config.disable_stopping = true;
        config.max_steps = 12;
        config.trajectory_stride = 5;
        let result = run_episode(&config).unwrap();
        let points = result.trajectory.unwrap();
        let ts: Vec<u64> = points.iter().map(|p| p.t).collect();
        assert_eq!(ts, vec![2, 7, 12]);
        // LMA exposes its proposals; counts ride along for invariant checks.
        assert!(points[0].w_tilde.is_some());
        assert_eq!(points[0].counts, vec![1, 1]);
    }

    #[test]
    fn bench_is_parallelism_invariant() {
        let configs = vec![
            EpisodeConfig::new(
                vec![0.0, 100.0],
                ProblemSpec::thresholding(50.0).unwrap(),
                SamplerConfig::lma(),
                ThresholdSpec::practical(0.1).unwrap(),
                7,
            ),
            EpisodeConfig::new(
                vec![0.0, 100.0],
                ProblemSpec::thresholding(50.0).unwrap(),
                SamplerConfig::Uniform,
                ThresholdSpec::practical(0.1).unwrap(),
                7,
            ),
        ];
        let serial = run_bench(&configs, 16, 1).unwrap();
        let parallel = run_bench(&configs, 16, 8).unwrap();
        assert_eq!(serial.records.len(), 32);
        for (a, b) in serial.records.iter().zip(&parallel.records) {
            let mut a = a.clone();
            let mut b = b.clone();
            a.wall_ms = 0.0;
            b.wall_ms = 0.0;
            assert_eq!(a, b);
        }
        assert_eq!(serial.summaries[0].mean_tau, parallel.summaries[0].mean_tau);
    }

    #[test]
    fn accumulator_merge_matches_single_pass() {
        let report = run_bench(&[huge_gap_config(13)], 24, 4).unwrap();
        let mut whole = BenchAccumulator::default();
        let mut left = BenchAccumulator::default();
        let mut right = BenchAccumulator::default();
        for (i, record) in report.records.iter().enumerate() {
            whole.push(record);
            if i % 2 == 0 {
                left.push(record);
            } else {
                right.push(record);
            }
        }
        left.merge(right);
        // Wall-time means may differ in the last bit with summation order;
        // everything else must agree exactly.
        let mut a = whole.summarize("lma".into(), 0.1);
        let mut b = left.summarize("lma".into(), 0.1);
        a.mean_step_wall_ns = 0.0;
        b.mean_step_wall_ns = 0.0;
        assert_eq!(a, b);
    }

    #[test]
    fn timeouts_are_flagged_and_excluded() {
        let mut config = huge_gap_config(2);
        config.means = vec![0.0, 0.02];
        config.problem = ProblemSpec::thresholding(0.01).unwrap();
        config.max_steps = 20;
        let report = run_bench(&[config], 8, 2).unwrap();
        let summary = &report.summaries[0];
        assert_eq!(summary.timeouts, 8);
        assert_eq!(summary.stopped, 0);
        assert_eq!(summary.mean_tau, 0.0);
        for record in &report.records {
            assert_eq!(record.outcome, Outcome::Timeout);
            assert!(!record.correct);
        }
    }
}
