//! Arm-selection rules behind one interface: the mirror-ascent tracking rule
//! and the classical competitors it is benchmarked against.
//!
//! All rules assume the standard initialization (each arm pulled once, in
//! index order, with the uniform distribution credited as the proposal for
//! those steps). Every rule is deterministic given the agent state except
//! top-two Thompson sampling, which consumes the episode's random stream.

use serde::{Deserialize, Serialize};

use crate::ascent::{force_exploration, AscentState, LearningRate};
use crate::bandit::{kl_gaussian, AgentState, RngStream};
use crate::error::{Error, Result};
use crate::problems::{answer, gradient_bound, subgradient, w_star, Family, ProblemSpec};
use crate::util::{argmax, uniform};

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Parameters of the mirror-ascent rules.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LmaConfig {
    /// Learning-rate scale `c` in `eta_t = c / sqrt(t)` (or `eta_t = c` for
    /// the constant-rate variant). `None` resolves to the reciprocal of the
    /// instance's gradient bound.
    pub learning_rate_scale: Option<f64>,
    /// Scale of the exploration mix `gamma_t = gamma_scale / sqrt(t)`.
    pub gamma_scale: f64,
    /// Gradient clip constant `M` (cap `M sqrt(t)`); `None` disables
    /// clipping, the recommended practical choice.
    pub clip: Option<f64>,
}

impl Default for LmaConfig {
    fn default() -> Self {
        Self {
            learning_rate_scale: None,
            gamma_scale: 0.25,
            clip: None,
        }
    }
}

/// Forced-exploration floor for the challenger/tracking rules: an arm with
/// fewer than `sqrt(t) - offset_scale * K` pulls is sampled unconditionally.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrackingConfig {
    pub offset_scale: f64,
}

impl Default for TrackingConfig {
    fn default() -> Self {
        Self { offset_scale: 0.5 }
    }
}

impl TrackingConfig {
    fn floor(&self, t: u64, k: usize) -> f64 {
        (t as f64).sqrt() - self.offset_scale * k as f64
    }
}

/// Parameters of top-two Thompson sampling (standard normal prior per arm).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TttsConfig {
    /// Challenger re-sampling cap; past it the rule falls back to the
    /// second-best posterior mean. Hitting the cap is counted, not an error.
    pub resample_cap: u64,
}

impl Default for TttsConfig {
    fn default() -> Self {
        Self {
            resample_cap: 10_000,
        }
    }
}

/// Which sampling rule an episode runs, with the rule's parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum SamplerConfig {
    /// Lazy mirror ascent with a decaying learning rate.
    Lma(LmaConfig),
    /// Lazy mirror ascent with a constant learning rate.
    Lmac(LmaConfig),
    /// Challenger comparison at empirical proportions (best-arm only).
    BestChallenger(TrackingConfig),
    /// Tracks the oracle weights of the empirical means.
    DirectTracking(TrackingConfig),
    /// Top-two Thompson sampling (best-arm only).
    Ttts(TttsConfig),
    /// Deterministic round robin.
    Uniform,
    /// One conditional-gradient step per round: pull the coordinate
    /// maximizing the sub-gradient at the empirical proportions.
    FrankWolfe,
}

impl SamplerConfig {
    pub fn lma() -> Self {
        SamplerConfig::Lma(LmaConfig::default())
    }

    pub fn lmac() -> Self {
        SamplerConfig::Lmac(LmaConfig::default())
    }

    pub fn best_challenger() -> Self {
        SamplerConfig::BestChallenger(TrackingConfig::default())
    }

    pub fn direct_tracking() -> Self {
        SamplerConfig::DirectTracking(TrackingConfig::default())
    }

    pub fn ttts() -> Self {
        SamplerConfig::Ttts(TttsConfig::default())
    }

    /// Short identifier used in exports and on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            SamplerConfig::Lma(_) => "lma",
            SamplerConfig::Lmac(_) => "lmac",
            SamplerConfig::BestChallenger(_) => "bc",
            SamplerConfig::DirectTracking(_) => "dt",
            SamplerConfig::Ttts(_) => "ttts",
            SamplerConfig::Uniform => "uniform",
            SamplerConfig::FrankWolfe => "fw",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "lma" => SamplerConfig::lma(),
            "lmac" => SamplerConfig::lmac(),
            "bc" | "best-challenger" => SamplerConfig::best_challenger(),
            "dt" | "direct-tracking" => SamplerConfig::direct_tracking(),
            "ttts" => SamplerConfig::ttts(),
            "uniform" | "unif" => SamplerConfig::Uniform,
            "fw" | "frank-wolfe" => SamplerConfig::FrankWolfe,
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown sampling rule '{other}' \
                     (expected lma|lmac|bc|dt|ttts|uniform|fw)"
                )))
            }
        })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SamplerConfig::Lma(cfg) | SamplerConfig::Lmac(cfg) => {
                if let Some(s) = cfg.learning_rate_scale {
                    if !(s.is_finite() && s > 0.0) {
                        return Err(Error::InvalidConfig(format!(
                            "learning-rate scale must be positive, got {s}"
                        )));
                    }
                }
                if !(cfg.gamma_scale.is_finite() && cfg.gamma_scale > 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "exploration scale must be positive, got {}",
                        cfg.gamma_scale
                    )));
                }
                if let Some(m) = cfg.clip {
                    if !(m.is_finite() && m > 0.0) {
                        return Err(Error::InvalidConfig(format!(
                            "clip constant must be positive, got {m}"
                        )));
                    }
                }
                Ok(())
            }
            SamplerConfig::BestChallenger(cfg) | SamplerConfig::DirectTracking(cfg) => {
                if cfg.offset_scale.is_finite() && cfg.offset_scale >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidConfig(format!(
                        "exploration offset must be nonnegative, got {}",
                        cfg.offset_scale
                    )))
                }
            }
            SamplerConfig::Ttts(cfg) => {
                if cfg.resample_cap >= 1 {
                    Ok(())
                } else {
                    Err(Error::InvalidConfig(
                        "resample cap must be at least one".into(),
                    ))
                }
            }
            SamplerConfig::Uniform | SamplerConfig::FrankWolfe => Ok(()),
        }
    }
}

// ---------------------------------------------------------------------------
// Selection rules
// ---------------------------------------------------------------------------

/// The initialization schedule: pull each arm once, in index order. The
/// runner credits the uniform distribution as the proposed weights of each
/// initialization step so the tracking sums are well defined from the start.
pub fn initialize(k: usize) -> Vec<usize> {
    (0..k).collect()
}

/// Smallest-index maximizer of the tracking deficit `cum_a - N_a`: the
/// tracking rule pulls the arm whose count most lags its cumulative target,
/// which keeps every count within `K` of its target.
pub fn tracking_deficit_argmax(cum: &[f64], counts: &[u64]) -> usize {
    let mut best = 0;
    let mut best_deficit = f64::NEG_INFINITY;
    for (a, (&c, &n)) in cum.iter().zip(counts).enumerate() {
        let deficit = c - n as f64;
        if deficit > best_deficit {
            best_deficit = deficit;
            best = a;
        }
    }
    best
}

fn lma_step(
    agent: &mut AgentState,
    ascent: &mut AscentState,
    spec: &ProblemSpec,
    gamma_scale: f64,
) -> Result<(usize, Vec<f64>, Vec<f64>)> {
    let t = agent.t();
    let mu_hat = agent.empirical_means()?;
    // The sub-gradient is taken at the current proposal, not at the
    // empirical proportions.
    let w_now = ascent.current_weights();
    let g = subgradient(spec, &w_now, &mu_hat)?;
    let w_tilde = ascent.step(&g)?;
    let w_prime = force_exploration(&w_tilde, t, gamma_scale);
    agent.credit_weights(&w_prime);
    let arm = tracking_deficit_argmax(agent.cum_weights(), agent.counts());
    Ok((arm, w_tilde, w_prime))
}

/// One mirror-ascent round: observe a sub-gradient at the current proposal,
/// advance the ascent, mix in exploration, credit the proposal, and pull the
/// arm whose count most lags its cumulative target.
pub fn lma_select(
    agent: &mut AgentState,
    ascent: &mut AscentState,
    spec: &ProblemSpec,
    gamma_scale: f64,
) -> Result<usize> {
    lma_step(agent, ascent, spec, gamma_scale).map(|(arm, _, _)| arm)
}

fn require_best_arm(spec: &ProblemSpec, rule: &'static str) -> Result<()> {
    if spec.family() == Family::BestArm {
        Ok(())
    } else {
        Err(Error::UnsupportedRule {
            rule,
            family: "best-arm",
        })
    }
}

/// The arm forced by the exploration floor, if any: the least-pulled arm when
/// its count sits below the floor.
fn forced_arm(agent: &AgentState, cfg: &TrackingConfig) -> Option<usize> {
    let floor = cfg.floor(agent.t(), agent.arms());
    let (arm, &n) = agent
        .counts()
        .iter()
        .enumerate()
        .min_by_key(|&(_, &n)| n)
        .expect("at least two arms");
    ((n as f64) < floor).then_some(arm)
}

/// Challenger rule for best-arm identification: find the cheapest-to-confuse
/// rival of the empirical leader at the empirical proportions, then pull
/// whichever of the two is currently easier to move to their weighted mean.
/// On an exact tie the challenger is pulled.
pub fn best_challenger_select(
    agent: &AgentState,
    spec: &ProblemSpec,
    cfg: &TrackingConfig,
) -> Result<usize> {
    require_best_arm(spec, "best-challenger")?;
    if let Some(arm) = forced_arm(agent, cfg) {
        return Ok(arm);
    }
    let mu_hat = agent.empirical_means()?;
    let w = agent.proportions();
    let leader = argmax(&mu_hat);

    let mut best_cost = f64::INFINITY;
    let mut challenger = usize::MAX;
    let mut challenger_mid = 0.0;
    for a in 0..agent.arms() {
        if a == leader {
            continue;
        }
        let mid = (w[leader] * mu_hat[leader] + w[a] * mu_hat[a]) / (w[leader] + w[a]);
        let cost = w[leader] * kl_gaussian(mu_hat[leader], mid) + w[a] * kl_gaussian(mu_hat[a], mid);
        if cost < best_cost {
            best_cost = cost;
            challenger = a;
            challenger_mid = mid;
        }
    }
    let leader_div = kl_gaussian(mu_hat[leader], challenger_mid);
    let challenger_div = kl_gaussian(mu_hat[challenger], challenger_mid);
    Ok(if leader_div > challenger_div {
        leader
    } else {
        challenger
    })
}

/// Tracks the oracle proportions of the empirical means, with the same
/// exploration floor as the challenger rule. Falls back to the round-robin
/// pull when the empirical means sit on a class boundary, where the oracle
/// weights are undefined.
pub fn direct_tracking_select(
    agent: &AgentState,
    spec: &ProblemSpec,
    cfg: &TrackingConfig,
) -> Result<usize> {
    if let Some(arm) = forced_arm(agent, cfg) {
        return Ok(arm);
    }
    let mu_hat = agent.empirical_means()?;
    if answer(spec, &mu_hat).is_none() {
        return Ok(uniform_select(agent));
    }
    let target = w_star(spec, &mu_hat)?;
    let t = agent.t() as f64;
    let mut best = 0;
    let mut best_deficit = f64::NEG_INFINITY;
    for (a, (&w, &n)) in target.iter().zip(agent.counts()).enumerate() {
        let deficit = w - n as f64 / t;
        if deficit > best_deficit {
            best_deficit = deficit;
            best = a;
        }
    }
    Ok(best)
}

/// Posterior mean and variance per arm for a standard normal prior and
/// unit-variance observations: `N(sums / (N + 1), 1 / (N + 1))`.
pub(crate) fn ttts_posterior(agent: &AgentState) -> (Vec<f64>, Vec<f64>) {
    let means = agent
        .sums()
        .iter()
        .zip(agent.counts())
        .map(|(&s, &n)| s / (n + 1) as f64)
        .collect();
    let vars = agent
        .counts()
        .iter()
        .map(|&n| 1.0 / (n + 1) as f64)
        .collect();
    (means, vars)
}

fn sample_posterior(means: &[f64], vars: &[f64], rng: &mut RngStream) -> Vec<f64> {
    use crate::bandit::NormalSource;
    means
        .iter()
        .zip(vars)
        .map(|(&m, &v)| m + v.sqrt() * rng.next_normal())
        .collect()
}

/// Top-two Thompson sampling: sample a leader from the posterior, re-sample
/// until a different arm leads (the challenger), then pull whichever of the
/// two moved further between the two posterior draws.
///
/// Returns the arm and whether the re-sampling cap was hit; on a cap hit the
/// challenger falls back to the best posterior mean among the other arms.
pub fn ttts_select(
    agent: &AgentState,
    spec: &ProblemSpec,
    rng: &mut RngStream,
    cfg: &TttsConfig,
) -> Result<(usize, bool)> {
    require_best_arm(spec, "ttts")?;
    let (means, vars) = ttts_posterior(agent);
    let first = sample_posterior(&means, &vars, rng);
    let leader = argmax(&first);

    let mut resample = sample_posterior(&means, &vars, rng);
    let mut rival = argmax(&resample);
    let mut overflow = false;
    let mut draws = 1;
    while rival == leader {
        if draws >= cfg.resample_cap {
            overflow = true;
            let mut best = if leader == 0 { 1 } else { 0 };
            for a in 0..agent.arms() {
                if a != leader && means[a] > means[best] {
                    best = a;
                }
            }
            rival = best;
            break;
        }
        resample = sample_posterior(&means, &vars, rng);
        rival = argmax(&resample);
        draws += 1;
    }

    let leader_move = kl_gaussian(first[leader], resample[leader]);
    let rival_move = kl_gaussian(first[rival], resample[rival]);
    Ok((if leader_move > rival_move { leader } else { rival }, overflow))
}

/// One conditional-gradient step: pull the smallest-index maximizer of the
/// sub-gradient at the empirical proportions. For the thresholding family
/// this coincides with pulling the arm minimizing `N_a d(mu_hat_a, thr)`.
pub fn frank_wolfe_select(agent: &AgentState, spec: &ProblemSpec) -> Result<usize> {
    let mu_hat = agent.empirical_means()?;
    let g = subgradient(spec, &agent.proportions(), &mu_hat)?;
    Ok(argmax(&g))
}

/// Deterministic uniform baseline: round robin over the arms.
pub fn uniform_select(agent: &AgentState) -> usize {
    (agent.t() % agent.arms() as u64) as usize
}

// ---------------------------------------------------------------------------
// Runtime dispatch
// ---------------------------------------------------------------------------

enum RuleState {
    Lma {
        ascent: AscentState,
        gamma_scale: f64,
        last_w_tilde: Vec<f64>,
        last_w_prime: Vec<f64>,
    },
    BestChallenger(TrackingConfig),
    DirectTracking(TrackingConfig),
    Ttts {
        cfg: TttsConfig,
        overflows: u64,
    },
    Uniform,
    FrankWolfe,
}

/// A configured sampling rule bound to one episode.
pub struct Sampler {
    rule: RuleState,
}

impl Sampler {
    /// Builds the per-episode rule state. `means` is the true instance; it
    /// only feeds the default learning-rate scale, which uses the instance's
    /// gradient bound. `start` is the step count consumed by initialization.
    pub fn for_episode(
        config: &SamplerConfig,
        spec: &ProblemSpec,
        means: &[f64],
        start: u64,
    ) -> Result<Self> {
        config.validate()?;
        let k = means.len();
        let rule = match config {
            SamplerConfig::Lma(cfg) | SamplerConfig::Lmac(cfg) => {
                let scale = match cfg.learning_rate_scale {
                    Some(s) => s,
                    None => {
                        let bound = gradient_bound(spec, means, 0.0);
                        if bound > 0.0 {
                            1.0 / bound
                        } else {
                            1.0
                        }
                    }
                };
                let rate = match config {
                    SamplerConfig::Lma(_) => LearningRate::InverseSqrt { scale },
                    _ => LearningRate::Constant { rate: scale },
                };
                RuleState::Lma {
                    ascent: AscentState::new(k, start, rate, cfg.clip.unwrap_or(f64::INFINITY)),
                    gamma_scale: cfg.gamma_scale,
                    last_w_tilde: uniform(k),
                    last_w_prime: uniform(k),
                }
            }
            SamplerConfig::BestChallenger(cfg) => {
                require_best_arm(spec, "best-challenger")?;
                RuleState::BestChallenger(*cfg)
            }
            SamplerConfig::DirectTracking(cfg) => RuleState::DirectTracking(*cfg),
            SamplerConfig::Ttts(cfg) => {
                require_best_arm(spec, "ttts")?;
                RuleState::Ttts {
                    cfg: *cfg,
                    overflows: 0,
                }
            }
            SamplerConfig::Uniform => RuleState::Uniform,
            SamplerConfig::FrankWolfe => RuleState::FrankWolfe,
        };
        Ok(Self { rule })
    }

    /// Picks the next arm to pull.
    pub fn select(
        &mut self,
        agent: &mut AgentState,
        spec: &ProblemSpec,
        rng: &mut RngStream,
    ) -> Result<usize> {
        match &mut self.rule {
            RuleState::Lma {
                ascent,
                gamma_scale,
                last_w_tilde,
                last_w_prime,
            } => {
                let (arm, w_tilde, w_prime) = lma_step(agent, ascent, spec, *gamma_scale)?;
                *last_w_tilde = w_tilde;
                *last_w_prime = w_prime;
                Ok(arm)
            }
            RuleState::BestChallenger(cfg) => best_challenger_select(agent, spec, cfg),
            RuleState::DirectTracking(cfg) => direct_tracking_select(agent, spec, cfg),
            RuleState::Ttts { cfg, overflows } => {
                let (arm, overflow) = ttts_select(agent, spec, rng, cfg)?;
                if overflow {
                    *overflows += 1;
                }
                Ok(arm)
            }
            RuleState::Uniform => Ok(uniform_select(agent)),
            RuleState::FrankWolfe => frank_wolfe_select(agent, spec),
        }
    }

    /// The mirror-ascent proposals in force at the current step, when the
    /// rule has them: `(w_tilde, w_prime)`.
    pub fn last_proposals(&self) -> Option<(&[f64], &[f64])> {
        match &self.rule {
            RuleState::Lma {
                last_w_tilde,
                last_w_prime,
                ..
            } => Some((last_w_tilde, last_w_prime)),
            _ => None,
        }
    }

    /// How often the Thompson challenger search hit its cap.
    pub fn resample_overflows(&self) -> u64 {
        match &self.rule {
            RuleState::Ttts { overflows, .. } => *overflows,
            _ => 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state_with(counts: &[u64], means: &[f64]) -> AgentState {
        let mut state = AgentState::new(counts.len());
        for (arm, (&n, &m)) in counts.iter().zip(means).enumerate() {
            for _ in 0..n {
                state.update(arm, m).unwrap();
            }
        }
        state
    }

    #[test]
    fn initialization_schedule() {
        assert_eq!(initialize(2), vec![0, 1]);
        assert_eq!(initialize(4), vec![0, 1, 2, 3]);
    }

    #[test]
    fn deficit_argmax_examples() {
        assert_eq!(tracking_deficit_argmax(&[2.0, 1.0], &[1, 2]), 0);
        assert_eq!(tracking_deficit_argmax(&[1.0, 1.0], &[1, 1]), 0);
        assert_eq!(tracking_deficit_argmax(&[0.2, 1.9], &[1, 1]), 1);
    }

    #[test]
    fn lma_select_breaks_symmetric_ties_low() {
        let spec = ProblemSpec::thresholding(1.0).unwrap();
        let mut agent = state_with(&[1, 1], &[2.0, 2.0]);
        agent.credit_weights(&[0.5, 0.5]);
        agent.credit_weights(&[0.5, 0.5]);
        let mut ascent =
            AscentState::new(2, 2, LearningRate::InverseSqrt { scale: 1.0 }, f64::INFINITY);
        let arm = lma_select(&mut agent, &mut ascent, &spec, 0.25).unwrap();
        assert_eq!(arm, 0);
    }

    #[test]
    fn lma_select_prefers_lagging_arm() {
        let spec = ProblemSpec::thresholding(1.0).unwrap();
        // Arm 0 lags its target badly: cum detaches from counts.
        let mut agent = state_with(&[1, 3], &[0.0, 2.0]);
        agent.credit_weights(&[2.0, 1.0]);
        let mut ascent =
            AscentState::new(2, 4, LearningRate::InverseSqrt { scale: 1.0 }, f64::INFINITY);
        let arm = lma_select(&mut agent, &mut ascent, &spec, 0.25).unwrap();
        assert_eq!(arm, 0);
    }

    #[test]
    fn best_challenger_examples() {
        let spec = ProblemSpec::best_arm();
        // Equal divergences to the midpoint: the tie goes to the challenger.
        let agent = state_with(&[10, 10], &[1.0, 0.0]);
        let cfg = TrackingConfig::default();
        assert_eq!(best_challenger_select(&agent, &spec, &cfg).unwrap(), 1);

        // Leader much closer to the weighted mean than the challenger.
        let agent = state_with(&[30, 10], &[1.0, 0.0]);
        assert_eq!(best_challenger_select(&agent, &spec, &cfg).unwrap(), 1);

        // Starved arm gets force-pulled: 5 < sqrt(100) - 1.
        let agent = state_with(&[95, 5], &[1.0, 0.0]);
        assert_eq!(best_challenger_select(&agent, &spec, &cfg).unwrap(), 1);

        let thr = ProblemSpec::thresholding(0.0).unwrap();
        assert!(matches!(
            best_challenger_select(&agent, &thr, &cfg),
            Err(Error::UnsupportedRule { .. })
        ));
    }

    #[test]
    fn direct_tracking_examples() {
        let spec = ProblemSpec::best_arm();
        let cfg = TrackingConfig::default();

        // Proportional counts at the instance means: the rule pushes toward
        // the under-sampled high-weight arms.
        let agent = state_with(&[100, 100, 100, 100], &[1.0, 0.85, 0.8, 0.75]);
        let arm = direct_tracking_select(&agent, &spec, &cfg).unwrap();
        assert_eq!(arm, 0);

        // Undecided empirical means fall back to round robin.
        let agent = state_with(&[100, 100], &[1.0, 1.0]);
        assert_eq!(
            direct_tracking_select(&agent, &spec, &cfg).unwrap(),
            uniform_select(&agent)
        );
    }

    #[test]
    fn direct_tracking_tie_goes_low() {
        // Counts exactly at the oracle weights: every deficit ties at zero.
        let spec = ProblemSpec::thresholding(1.0).unwrap();
        let agent = state_with(&[50, 50], &[0.0, 2.0]);
        let cfg = TrackingConfig { offset_scale: 5.0 };
        assert_eq!(direct_tracking_select(&agent, &spec, &cfg).unwrap(), 0);
    }

    #[test]
    fn ttts_posterior_conjugacy() {
        let agent = state_with(&[3, 1], &[2.0, 0.0]);
        let (means, vars) = ttts_posterior(&agent);
        assert_eq!(means[0], 1.5);
        assert_eq!(vars[0], 0.25);
    }

    #[test]
    fn ttts_selects_every_arm_under_symmetry() {
        let spec = ProblemSpec::best_arm();
        let agent = state_with(&[1, 1, 1], &[0.0, 0.0, 0.0]);
        let cfg = TttsConfig::default();
        let mut seen = [false; 3];
        for stream in 0..200 {
            let mut rng = RngStream::new(5, stream);
            let (arm, _) = ttts_select(&agent, &spec, &mut rng, &cfg).unwrap();
            seen[arm] = true;
        }
        assert_eq!(seen, [true, true, true]);
    }

    #[test]
    fn ttts_concentrated_posteriors_hit_the_cap() {
        let spec = ProblemSpec::best_arm();
        // Arm 0 towers over arm 1; the challenger re-sample nearly always
        // returns the leader again.
        let agent = state_with(&[400, 400], &[100.0, 0.0]);
        let cfg = TttsConfig { resample_cap: 50 };
        let mut rng = RngStream::new(11, 0);
        let (_, overflow) = ttts_select(&agent, &spec, &mut rng, &cfg).unwrap();
        assert!(overflow);
    }

    #[test]
    fn frank_wolfe_examples() {
        let thr = ProblemSpec::thresholding(1.0).unwrap();
        let agent = state_with(&[10, 40], &[0.0, 2.0]);
        // argmin N_a d(mu_a, thr): 10*0.5 < 40*0.5.
        assert_eq!(frank_wolfe_select(&agent, &thr).unwrap(), 0);

        let signed = ProblemSpec::signed(0.0).unwrap();
        let agent = state_with(&[10, 10], &[1.0, 2.0]);
        // Follow the leader: the largest divergence wins.
        assert_eq!(frank_wolfe_select(&agent, &signed).unwrap(), 1);

        // Equal products tie toward the smallest index.
        let agent = state_with(&[10, 10], &[0.0, 2.0]);
        assert_eq!(frank_wolfe_select(&agent, &thr).unwrap(), 0);
    }

    #[test]
    fn uniform_round_robin() {
        let mut agent = AgentState::new(3);
        for arm in initialize(3) {
            agent.update(arm, 0.0).unwrap();
        }
        assert_eq!(uniform_select(&agent), 0);
        agent.update(0, 0.0).unwrap();
        assert_eq!(uniform_select(&agent), 1);

        let mut agent = AgentState::new(3);
        for t in 0..30 {
            let _ = t;
            let arm = uniform_select(&agent);
            agent.update(arm, 0.0).unwrap();
        }
        assert_eq!(agent.counts(), &[10, 10, 10]);
    }

    #[test]
    fn sampler_rejects_mismatched_rules() {
        let thr = ProblemSpec::thresholding(0.0).unwrap();
        let bad = Sampler::for_episode(&SamplerConfig::ttts(), &thr, &[1.0, -1.0], 2);
        assert!(bad.is_err());
        let bad = Sampler::for_episode(&SamplerConfig::best_challenger(), &thr, &[1.0, -1.0], 2);
        assert!(bad.is_err());
    }

    #[test]
    fn rule_names_round_trip() {
        for name in ["lma", "lmac", "bc", "dt", "ttts", "uniform", "fw"] {
            let cfg = SamplerConfig::from_name(name).unwrap();
            assert_eq!(cfg.name(), name);
        }
        assert!(SamplerConfig::from_name("nope").is_err());
    }
}
