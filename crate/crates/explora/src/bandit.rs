//! Gaussian bandit environments, reproducible random streams, and the
//! per-episode sufficient statistics every sampling rule consumes.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::util::{check_finite, check_simplex};

/// A bandit instance: `K >= 2` arms, arm `a` paying out `N(means[a], 1)`.
///
/// The variance is fixed to one for every arm; instances are identified by
/// their mean vector alone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianBandit {
    means: Vec<f64>,
}

impl GaussianBandit {
    pub fn new(means: Vec<f64>) -> Result<Self> {
        if means.len() < 2 {
            return Err(Error::TooFewArms { arms: means.len() });
        }
        check_finite("mean vector", &means)?;
        Ok(Self { means })
    }

    pub fn arms(&self) -> usize {
        self.means.len()
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    /// Draws one reward from `arm`: its mean plus standard normal noise.
    pub fn sample<N: NormalSource>(&self, arm: usize, noise: &mut N) -> Result<f64> {
        let mean = self
            .means
            .get(arm)
            .copied()
            .ok_or(Error::ArmOutOfRange {
                arm,
                arms: self.means.len(),
            })?;
        Ok(mean + noise.next_normal())
    }
}

/// Source of standard normal draws. Implemented by [`RngStream`]; tests may
/// substitute a deterministic stub.
pub trait NormalSource {
    fn next_normal(&mut self) -> f64;
}

/// A reproducible random stream keyed by `(seed, stream)`.
///
/// Each Monte-Carlo episode gets its own stream id so episodes are
/// independent yet exactly reproducible, regardless of how the harness
/// schedules them. Normal variates use the Box-Muller transform, fixed once,
/// so identical keys give identical sequences everywhere.
#[derive(Clone, Debug)]
pub struct RngStream {
    rng: ChaCha8Rng,
    seed: u64,
    stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng, seed, stream }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Uniform draw in `[0, 1)` with 53 random bits.
    pub fn next_uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn next_uniform_open(&mut self) -> f64 {
        // In (0, 1]: safe as the log argument below.
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

impl NormalSource for RngStream {
    fn next_normal(&mut self) -> f64 {
        let u = self.next_uniform_open();
        let v = self.next_uniform();
        (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
    }
}

/// Kullback-Leibler divergence between unit-variance Gaussians,
/// `d(x, y) = (x - y)^2 / 2`.
#[inline]
pub fn kl_gaussian(x: f64, y: f64) -> f64 {
    let diff = x - y;
    diff * diff / 2.0
}

/// Kullback-Leibler divergence between two distributions on the arms,
/// `kl(w, v) = sum_a w_a log(w_a / v_a)`, with `0 log(0/x) = 0`.
///
/// Returns `+inf` when some `w_a > 0` has `v_a = 0`. Inputs off the simplex
/// beyond tolerance 1e-9 are rejected.
pub fn kl_categorical(w: &[f64], v: &[f64]) -> Result<f64> {
    check_simplex(w)?;
    check_simplex(v)?;
    if w.len() != v.len() {
        return Err(Error::NotASimplex {
            reason: format!("length mismatch: {} vs {}", w.len(), v.len()),
        });
    }
    let mut total = 0.0;
    for (&wa, &va) in w.iter().zip(v) {
        if wa <= 0.0 {
            continue;
        }
        if va <= 0.0 {
            return Ok(f64::INFINITY);
        }
        total += wa * (wa / va).ln();
    }
    Ok(total)
}

/// Running sufficient statistics of one episode.
///
/// Holds the step count `t`, per-arm pull counts `N_a(t)`, per-arm reward
/// sums, and the cumulative sum of proposed weight vectors used by the
/// tracking rule. Empirical means are recomputed from sums and counts on
/// demand rather than maintained incrementally.
#[derive(Clone, Debug, PartialEq)]
pub struct AgentState {
    t: u64,
    counts: Vec<u64>,
    sums: Vec<f64>,
    cum_weights: Vec<f64>,
}

impl AgentState {
    pub fn new(arms: usize) -> Self {
        Self {
            t: 0,
            counts: vec![0; arms],
            sums: vec![0.0; arms],
            cum_weights: vec![0.0; arms],
        }
    }

    pub fn arms(&self) -> usize {
        self.counts.len()
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn sums(&self) -> &[f64] {
        &self.sums
    }

    pub fn cum_weights(&self) -> &[f64] {
        &self.cum_weights
    }

    /// Records one observed reward: advances `t`, bumps the arm's count and
    /// reward sum, leaves everything else untouched.
    pub fn update(&mut self, arm: usize, reward: f64) -> Result<()> {
        if arm >= self.counts.len() {
            return Err(Error::ArmOutOfRange {
                arm,
                arms: self.counts.len(),
            });
        }
        self.t += 1;
        self.counts[arm] += 1;
        self.sums[arm] += reward;
        Ok(())
    }

    /// Adds one proposed weight vector to the cumulative tracking targets.
    pub fn credit_weights(&mut self, w: &[f64]) {
        debug_assert_eq!(w.len(), self.cum_weights.len());
        for (c, &x) in self.cum_weights.iter_mut().zip(w) {
            *c += x;
        }
    }

    /// Empirical mean of `arm`, or `None` before its first pull.
    pub fn empirical_mean(&self, arm: usize) -> Option<f64> {
        (self.counts[arm] > 0).then(|| self.sums[arm] / self.counts[arm] as f64)
    }

    /// Empirical mean vector; every arm must have been pulled at least once.
    pub fn empirical_means(&self) -> Result<Vec<f64>> {
        (0..self.arms())
            .map(|a| self.empirical_mean(a).ok_or(Error::UnpulledArm { arm: a }))
            .collect()
    }

    /// Empirical proportions of draws `N(t) / t`.
    pub fn proportions(&self) -> Vec<f64> {
        let t = self.t.max(1) as f64;
        self.counts.iter().map(|&n| n as f64 / t).collect()
    }

    pub fn fully_initialized(&self) -> bool {
        self.counts.iter().all(|&n| n > 0)
    }

    /// Counts as `f64`, the weighting used by the stopping statistic.
    pub fn counts_f64(&self) -> Vec<f64> {
        self.counts.iter().map(|&n| n as f64).collect()
    }
}
