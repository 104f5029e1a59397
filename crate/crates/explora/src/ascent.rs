//! Anytime online lazy mirror ascent on the simplex.
//!
//! The optimizer never materializes intermediate iterates: it stores only the
//! running sum of (clipped) gradients and maps it through exponential weights
//! at the current learning rate. That makes the weights at any step a pure
//! function of the gradient history, so the schedule can be anytime: there is
//! no horizon baked in.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Learning-rate schedule. The decaying variant is the default; the constant
/// variant is the more aggressive configuration used for comparison runs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LearningRate {
    /// `eta_t = scale / sqrt(t)`.
    InverseSqrt { scale: f64 },
    /// `eta_t = rate` for every `t`.
    Constant { rate: f64 },
}

impl LearningRate {
    pub fn at(&self, t: u64) -> f64 {
        match *self {
            LearningRate::InverseSqrt { scale } => scale / (t.max(1) as f64).sqrt(),
            LearningRate::Constant { rate } => rate,
        }
    }
}

/// Cumulative state of the lazy mirror ascent: the clipped-gradient sum, the
/// step index, the learning-rate schedule, and the clip constant.
#[derive(Clone, Debug)]
pub struct AscentState {
    cum_grad: Vec<f64>,
    t: u64,
    rate: LearningRate,
    clip: f64,
}

impl AscentState {
    /// Starts the ascent at step `start` (the step count already consumed by
    /// initialization) with a zero gradient sum. `clip` of `f64::INFINITY`
    /// disables clipping.
    pub fn new(arms: usize, start: u64, rate: LearningRate, clip: f64) -> Self {
        Self {
            cum_grad: vec![0.0; arms],
            t: start,
            rate,
            clip,
        }
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn cum_grad(&self) -> &[f64] {
        &self.cum_grad
    }

    /// The proposed weights at the current step, recomputed from the gradient
    /// sum. Before any gradient arrives this is the uniform distribution.
    pub fn current_weights(&self) -> Vec<f64> {
        exp_weights(&self.cum_grad, self.rate.at(self.t))
    }

    /// Consumes the sub-gradient observed at the current step and returns the
    /// next proposed weights: clip, accumulate, advance, re-map.
    pub fn step(&mut self, g: &[f64]) -> Result<Vec<f64>> {
        let clipped = clip_gradient(g, self.t, self.clip)?;
        for (c, x) in self.cum_grad.iter_mut().zip(clipped) {
            *c += x;
        }
        self.t += 1;
        Ok(self.current_weights())
    }
}

/// Component-wise clip at `clip * sqrt(t)`; the identity when `clip` is
/// infinite. Rejects negative components.
pub fn clip_gradient(g: &[f64], t: u64, clip: f64) -> Result<Vec<f64>> {
    if let Some((arm, &value)) = g.iter().enumerate().find(|(_, &x)| x < 0.0) {
        return Err(Error::NegativeGradient { arm, value });
    }
    if clip == f64::INFINITY {
        return Ok(g.to_vec());
    }
    let cap = clip * (t as f64).sqrt();
    Ok(g.iter().map(|&x| x.min(cap)).collect())
}

/// Exponential weights for a cumulative gain vector:
/// `w_a = exp(eta G_a) / sum_b exp(eta G_b)`.
///
/// Computed with a max shift, so it is invariant under adding a constant to
/// every component and safe for gain sums that grow linearly in `t`. The
/// shifted exponent is floored at -700 to keep every weight strictly
/// positive in `f64`; the sub-gradient consumers require interior points,
/// and the mass moved by the floor is below 1e-304.
pub fn exp_weights(cum_grad: &[f64], eta: f64) -> Vec<f64> {
    let max = cum_grad.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut w: Vec<f64> = cum_grad
        .iter()
        .map(|&g| (eta * (g - max)).max(-700.0).exp())
        .collect();
    let total: f64 = w.iter().sum();
    for x in &mut w {
        *x /= total;
    }
    w
}

/// Mixes the proposed weights with the uniform distribution at rate
/// `gamma_t = gamma_scale / sqrt(t)`, guaranteeing every arm at least
/// `gamma_t / K` of the proposal.
pub fn force_exploration(w_tilde: &[f64], t: u64, gamma_scale: f64) -> Vec<f64> {
    let mut gamma = gamma_scale / (t.max(1) as f64).sqrt();
    if gamma > 1.0 {
        tracing::warn!(gamma, t, "exploration rate above one, clamping");
        gamma = 1.0;
    }
    let k = w_tilde.len() as f64;
    w_tilde
        .iter()
        .map(|&x| (1.0 - gamma) * x + gamma / k)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clip_examples() {
        assert_eq!(
            clip_gradient(&[0.5, 2.0], 4, f64::INFINITY).unwrap(),
            vec![0.5, 2.0]
        );
        assert_eq!(clip_gradient(&[0.5, 2.0], 1, 1.0).unwrap(), vec![0.5, 1.0]);
        assert_eq!(clip_gradient(&[0.0, 0.0], 9, 0.5).unwrap(), vec![0.0, 0.0]);
        assert!(clip_gradient(&[-0.1, 0.0], 1, 1.0).is_err());
    }

    #[test]
    fn exp_weights_examples() {
        let w = exp_weights(&[0.0, 0.0, 0.0], 3.7);
        for &x in &w {
            assert!((x - 1.0 / 3.0).abs() < 1e-15);
        }

        let w = exp_weights(&[2f64.ln(), 0.0], 1.0);
        assert!((w[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((w[1] - 1.0 / 3.0).abs() < 1e-15);

        // Shift invariance (up to rounding in the shifted inputs).
        let c = 123.456;
        let shifted = exp_weights(&[2f64.ln() + c, c], 1.0);
        for (a, b) in w.iter().zip(&shifted) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn exp_weights_is_a_positive_simplex_point() {
        let w = exp_weights(&[1e6, 0.0, 3.0], 1.0);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(w.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn ascent_step_examples() {
        let rate = LearningRate::InverseSqrt { scale: 1.0 };
        let mut state = AscentState::new(2, 1, rate, f64::INFINITY);
        let w = state.step(&[0.0, 0.0]).unwrap();
        assert_eq!(w, vec![0.5, 0.5]);

        let mut state = AscentState::new(2, 1, rate, f64::INFINITY);
        state.step(&[1.0, 0.0]).unwrap();
        let w = state.step(&[1.0, 0.0]).unwrap();
        assert!(w[0] > w[1]);

        // A persistent one-directional gradient concentrates the weights.
        let mut state = AscentState::new(2, 1, rate, f64::INFINITY);
        let mut w = vec![0.5, 0.5];
        for _ in 0..10_000 {
            w = state.step(&[1.0, 0.0]).unwrap();
        }
        assert!(w[0] > 0.999, "w = {w:?}");
    }

    #[test]
    fn lazy_weights_match_recomputation() {
        // The incremental path is the closed formula applied to the gradient
        // sum, so replaying the history must agree bit for bit.
        let rate = LearningRate::InverseSqrt { scale: 0.7 };
        let mut state = AscentState::new(3, 4, rate, f64::INFINITY);
        let history = [
            [0.3, 0.0, 0.1],
            [0.0, 0.5, 0.0],
            [0.2, 0.2, 0.9],
            [0.0, 0.0, 0.4],
        ];
        let mut last = Vec::new();
        for g in &history {
            last = state.step(g).unwrap();
        }
        let mut total = [0.0; 3];
        for g in &history {
            for (t, x) in total.iter_mut().zip(g) {
                *t += x;
            }
        }
        let replayed = exp_weights(&total, rate.at(4 + history.len() as u64));
        assert_eq!(last, replayed);
        assert_eq!(state.current_weights(), replayed);
    }

    #[test]
    fn force_exploration_examples() {
        let pi = vec![0.5, 0.5];
        assert_eq!(force_exploration(&pi, 17, 0.25), pi);

        let w = force_exploration(&[1.0, 0.0], 1, 0.25);
        assert_eq!(w, vec![0.875, 0.125]);

        for t in [1u64, 4, 100, 10_000] {
            let w = force_exploration(&[1.0, 0.0], t, 0.25);
            let floor = 0.25 / (t as f64).sqrt() / 2.0;
            assert!(w.iter().all(|&x| x >= floor - 1e-15));
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn force_exploration_clamps_large_gamma() {
        let w = force_exploration(&[1.0, 0.0], 1, 3.0);
        assert_eq!(w, vec![0.5, 0.5]);
    }
}
