//! The three identification tasks and their per-family machinery: answer
//! classification, the transportation value function `F(w, mu)`, a
//! sub-gradient of `F`, the likelihood-ratio stopping statistic, the
//! characteristic time, and the oracle proportions `w*(mu)`.
//!
//! Each task partitions the space of mean vectors into classes, and the goal
//! is to identify the class of the true instance:
//!
//! - **Thresholding**: one class per subset of arms lying strictly above a
//!   threshold.
//! - **BestArm**: one class per arm, holding the instances where that arm has
//!   the strictly largest mean.
//! - **Signed**: two classes, all means above or all means below a threshold.
//!
//! `F(w, mu)` is the smallest cost, under sampling proportions `w`, of moving
//! `mu` into a class other than its own, measuring per-arm moves by the
//! Gaussian divergence `d(x, y) = (x - y)^2 / 2`. On class boundaries (where
//! the instance belongs to no class) the infimum runs over every class, which
//! makes `F` zero there. All three families admit closed forms, used
//! throughout instead of generic convex projections.

use serde::{Deserialize, Serialize};

use crate::bandit::kl_gaussian;
use crate::error::{Error, Result};
use crate::util::{argmax, check_finite, check_positive_simplex, check_simplex};

/// The identification task family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Thresholding,
    BestArm,
    Signed,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Thresholding => "thresholding",
            Family::BestArm => "best-arm",
            Family::Signed => "signed",
        }
    }
}

/// Which identification task is being solved, plus its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    family: Family,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    threshold: Option<f64>,
}

impl ProblemSpec {
    pub fn thresholding(threshold: f64) -> Result<Self> {
        check_finite("threshold", &[threshold])?;
        Ok(Self {
            family: Family::Thresholding,
            threshold: Some(threshold),
        })
    }

    pub fn best_arm() -> Self {
        Self {
            family: Family::BestArm,
            threshold: None,
        }
    }

    pub fn signed(threshold: f64) -> Result<Self> {
        check_finite("threshold", &[threshold])?;
        Ok(Self {
            family: Family::Signed,
            threshold: Some(threshold),
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn threshold(&self) -> Option<f64> {
        self.threshold
    }

    /// Re-checks the invariants a hand-built (e.g. deserialized) spec may
    /// violate.
    pub fn validate(&self) -> Result<()> {
        match (self.family, self.threshold) {
            (Family::BestArm, None) => Ok(()),
            (Family::BestArm, Some(_)) => Err(Error::InvalidConfig(
                "the best-arm family takes no threshold".into(),
            )),
            (_, Some(t)) if t.is_finite() => Ok(()),
            (f, _) => Err(Error::InvalidConfig(format!(
                "the {} family needs a finite threshold",
                f.name()
            ))),
        }
    }

    fn thr(&self) -> f64 {
        self.threshold
            .expect("constructors guarantee a threshold for this family")
    }
}

/// Sign classes of the signed family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

/// A class index: the output of the decision rule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Answer {
    /// Arms with means strictly above the threshold (sorted, zero-based).
    AboveThreshold(Vec<usize>),
    /// The arm with the largest mean (zero-based).
    Best(usize),
    /// All means above (`Plus`) or below (`Minus`) the threshold.
    Sign(Sign),
}

impl std::fmt::Display for Answer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Answer::AboveThreshold(arms) => {
                write!(f, "{{")?;
                for (i, a) in arms.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, "}}")
            }
            Answer::Best(a) => write!(f, "arm {a}"),
            Answer::Sign(Sign::Plus) => write!(f, "+"),
            Answer::Sign(Sign::Minus) => write!(f, "-"),
        }
    }
}

/// A sub-gradient of `F(., mu)`: `K` nonnegative entries, nonzero only on the
/// family's active support (one arm for thresholding, leader and challenger
/// for best-arm, possibly every arm for signed).
#[derive(Clone, Debug, PartialEq)]
pub struct Subgradient(Vec<f64>);

impl Subgradient {
    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Deref for Subgradient {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for Subgradient {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// The class of `mu`, or `None` when `mu` sits on a boundary (an exact
/// threshold hit, a tied maximum, or mixed signs) and belongs to no class.
pub fn answer(spec: &ProblemSpec, mu: &[f64]) -> Option<Answer> {
    match spec.family {
        Family::Thresholding => {
            let thr = spec.thr();
            if mu.iter().any(|&m| m == thr) {
                return None;
            }
            Some(Answer::AboveThreshold(
                mu.iter()
                    .enumerate()
                    .filter(|(_, &m)| m > thr)
                    .map(|(a, _)| a)
                    .collect(),
            ))
        }
        Family::BestArm => {
            let leader = argmax(mu);
            let unique = mu
                .iter()
                .enumerate()
                .all(|(a, &m)| a == leader || m < mu[leader]);
            unique.then_some(Answer::Best(leader))
        }
        Family::Signed => classify_signed(spec.thr(), mu).map(Answer::Sign),
    }
}

fn classify_signed(thr: f64, mu: &[f64]) -> Option<Sign> {
    if mu.iter().all(|&m| m > thr) {
        Some(Sign::Plus)
    } else if mu.iter().all(|&m| m < thr) {
        Some(Sign::Minus)
    } else {
        None
    }
}

/// One-sided projection costs for the signed family: cost of moving every arm
/// below the threshold up to it, and every arm above it down to it.
pub(crate) fn signed_projection_costs(thr: f64, weights: &[f64], mu: &[f64]) -> (f64, f64) {
    let mut into_plus = 0.0;
    let mut into_minus = 0.0;
    for (&w, &m) in weights.iter().zip(mu) {
        if m < thr {
            into_plus += w * kl_gaussian(m, thr);
        } else if m > thr {
            into_minus += w * kl_gaussian(m, thr);
        }
    }
    (into_plus, into_minus)
}

/// Which linear/smooth piece of `F` attains the minimum.
enum ActivePiece {
    /// Thresholding: the arm whose move to the threshold is cheapest.
    CheapestArm(usize),
    /// Best-arm: leader and challenger pushed to their weighted mean.
    Challenger {
        leader: usize,
        challenger: usize,
        mid: f64,
    },
    /// Signed, inside a class: every arm moves to the threshold.
    AllArms,
    /// Signed, on no class: the cheaper one-sided projection.
    SignedBranch(Sign),
}

/// Shared evaluation of the weighted transportation cost. `weights` may be
/// unnormalized (the stopping statistic passes raw counts).
fn transport(spec: &ProblemSpec, weights: &[f64], mu: &[f64]) -> (f64, ActivePiece) {
    match spec.family {
        Family::Thresholding => {
            let thr = spec.thr();
            let mut best = 0usize;
            let mut best_val = f64::INFINITY;
            for (a, (&w, &m)) in weights.iter().zip(mu).enumerate() {
                let val = w * kl_gaussian(m, thr);
                if val < best_val {
                    best_val = val;
                    best = a;
                }
            }
            (best_val, ActivePiece::CheapestArm(best))
        }
        Family::BestArm => {
            let leader = argmax(mu);
            let mut best_val = f64::INFINITY;
            let mut best_arm = usize::MAX;
            let mut best_mid = mu[leader];
            for (a, (&w, &m)) in weights.iter().zip(mu).enumerate() {
                if a == leader {
                    continue;
                }
                let wl = weights[leader];
                let (val, mid) = if wl + w <= 0.0 {
                    // Both weights zero: the pair can move for free.
                    (0.0, mu[leader])
                } else {
                    let mid = (wl * mu[leader] + w * m) / (wl + w);
                    (
                        wl * kl_gaussian(mu[leader], mid) + w * kl_gaussian(m, mid),
                        mid,
                    )
                };
                if val < best_val {
                    best_val = val;
                    best_arm = a;
                    best_mid = mid;
                }
            }
            (
                best_val,
                ActivePiece::Challenger {
                    leader,
                    challenger: best_arm,
                    mid: best_mid,
                },
            )
        }
        Family::Signed => {
            let thr = spec.thr();
            let (into_plus, into_minus) = signed_projection_costs(thr, weights, mu);
            match classify_signed(thr, mu) {
                // Inside a class the only alternative is the opposite sign.
                Some(Sign::Plus) => (into_minus, ActivePiece::AllArms),
                Some(Sign::Minus) => (into_plus, ActivePiece::AllArms),
                None => {
                    if into_plus <= into_minus {
                        (into_plus, ActivePiece::SignedBranch(Sign::Plus))
                    } else {
                        (into_minus, ActivePiece::SignedBranch(Sign::Minus))
                    }
                }
            }
        }
    }
}

/// The value function `F(w, mu)`: cheapest weighted move of `mu` into a class
/// other than its own (over every class when `mu` is on a boundary).
pub fn value_f(spec: &ProblemSpec, w: &[f64], mu: &[f64]) -> Result<f64> {
    check_simplex(w)?;
    check_finite("mean vector", mu)?;
    Ok(transport(spec, w, mu).0)
}

/// A sub-gradient of the concave function `F(., mu)` at `w`.
///
/// Ties between minimizing pieces break toward the smallest arm index
/// (the positive branch for the signed family), so the output is a
/// deterministic function of its inputs.
pub fn subgradient(spec: &ProblemSpec, w: &[f64], mu: &[f64]) -> Result<Subgradient> {
    check_positive_simplex(w)?;
    check_finite("mean vector", mu)?;
    let mut g = vec![0.0; w.len()];
    match transport(spec, w, mu).1 {
        ActivePiece::CheapestArm(a) => {
            g[a] = kl_gaussian(mu[a], spec.thr());
        }
        ActivePiece::Challenger {
            leader,
            challenger,
            mid,
        } => {
            g[leader] = kl_gaussian(mu[leader], mid);
            g[challenger] = kl_gaussian(mu[challenger], mid);
        }
        ActivePiece::AllArms => {
            let thr = spec.thr();
            for (ga, &m) in g.iter_mut().zip(mu) {
                *ga = kl_gaussian(m, thr);
            }
        }
        ActivePiece::SignedBranch(sign) => {
            let thr = spec.thr();
            for (ga, &m) in g.iter_mut().zip(mu) {
                let wrong_side = match sign {
                    Sign::Plus => m < thr,
                    Sign::Minus => m > thr,
                };
                if wrong_side {
                    *ga = kl_gaussian(m, thr);
                }
            }
        }
    }
    Ok(Subgradient(g))
}

/// The stopping statistic: the transportation cost of `mu_hat` to the nearest
/// alternative, weighted by raw pull counts. Equals `t * F(N/t, mu_hat)`.
pub fn glr_statistic(spec: &ProblemSpec, counts: &[u64], mu_hat: &[f64]) -> Result<f64> {
    if let Some(arm) = counts.iter().position(|&n| n == 0) {
        return Err(Error::UnpulledArm { arm });
    }
    check_finite("empirical mean vector", mu_hat)?;
    let weights: Vec<f64> = counts.iter().map(|&n| n as f64).collect();
    Ok(transport(spec, &weights, mu_hat).0)
}

/// The characteristic time `T*(mu) = 1 / max_w F(w, mu)`, the constant in the
/// asymptotic sample-complexity lower bound. Defined only off class
/// boundaries.
pub fn characteristic_time(spec: &ProblemSpec, mu: &[f64]) -> Result<f64> {
    check_finite("mean vector", mu)?;
    if answer(spec, mu).is_none() {
        return Err(Error::UndefinedInstance {
            what: "the characteristic time",
        });
    }
    match spec.family {
        Family::Thresholding => {
            let thr = spec.thr();
            Ok(mu.iter().map(|&m| 1.0 / kl_gaussian(m, thr)).sum())
        }
        Family::Signed => {
            let thr = spec.thr();
            let dmax = mu
                .iter()
                .map(|&m| kl_gaussian(m, thr))
                .fold(0.0f64, f64::max);
            Ok(1.0 / dmax)
        }
        Family::BestArm => {
            let w = w_star(spec, mu)?;
            Ok(1.0 / transport(spec, &w, mu).0)
        }
    }
}

/// The oracle sampling proportions `w*(mu)`, the simplex point maximizing
/// `F(., mu)`.
///
/// Closed form for thresholding (inverse divergences) and signed (uniform on
/// the arms attaining the largest divergence). For best-arm the weights come
/// from a scalar equation solved by bisection, with one inner root-solve per
/// suboptimal arm.
pub fn w_star(spec: &ProblemSpec, mu: &[f64]) -> Result<Vec<f64>> {
    check_finite("mean vector", mu)?;
    if answer(spec, mu).is_none() {
        return Err(Error::UndefinedInstance {
            what: "the oracle proportions",
        });
    }
    match spec.family {
        Family::Thresholding => {
            let thr = spec.thr();
            let inv: Vec<f64> = mu.iter().map(|&m| 1.0 / kl_gaussian(m, thr)).collect();
            let total: f64 = inv.iter().sum();
            Ok(inv.into_iter().map(|x| x / total).collect())
        }
        Family::Signed => {
            let thr = spec.thr();
            let d: Vec<f64> = mu.iter().map(|&m| kl_gaussian(m, thr)).collect();
            let dmax = d.iter().copied().fold(0.0f64, f64::max);
            let winners = d.iter().filter(|&&x| x == dmax).count();
            Ok(d
                .iter()
                .map(|&x| if x == dmax { 1.0 / winners as f64 } else { 0.0 })
                .collect())
        }
        Family::BestArm => w_star_best_arm(mu),
    }
}

const INNER_TOL: f64 = 1e-10;
const OUTER_TOL: f64 = 1e-8;
const MAX_ITER: usize = 200;

/// Two-point cost of pushing the leader and one challenger to their weighted
/// mean, with weight 1 on the leader and `x` on the challenger. Strictly
/// increasing in `x`, from 0 toward the pairwise divergence.
fn pair_cost(mu_leader: f64, mu_other: f64, x: f64) -> f64 {
    let mid = (mu_leader + x * mu_other) / (1.0 + x);
    kl_gaussian(mu_leader, mid) + x * kl_gaussian(mu_other, mid)
}

/// Inverts `pair_cost` in `x` by bisection.
fn pair_cost_inverse(mu_leader: f64, mu_other: f64, y: f64) -> Result<f64> {
    let mut hi = 1.0;
    let mut grow = 0;
    while pair_cost(mu_leader, mu_other, hi) < y {
        hi *= 2.0;
        grow += 1;
        if grow > MAX_ITER {
            return Err(Error::NoConvergence {
                what: "bracketing the weight-ratio equation",
                max_iter: MAX_ITER,
            });
        }
    }
    let mut lo = 0.0;
    for _ in 0..MAX_ITER {
        if hi - lo <= INNER_TOL * hi.max(1.0) {
            return Ok(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        if pair_cost(mu_leader, mu_other, mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NoConvergence {
        what: "the weight-ratio equation",
        max_iter: MAX_ITER,
    })
}

fn w_star_best_arm(mu: &[f64]) -> Result<Vec<f64>> {
    let leader = argmax(mu);
    let others: Vec<usize> = (0..mu.len()).filter(|&a| a != leader).collect();
    let d_min = others
        .iter()
        .map(|&a| kl_gaussian(mu[leader], mu[a]))
        .fold(f64::INFINITY, f64::min);

    // At the optimum every challenger's two-point cost equals a common value
    // y, and the ratios x_a = w_a / w_leader solve pair_cost(x_a) = y. The
    // equalizing y is the root of an increasing function of the ratios,
    // bracketed by (0, d_min).
    let balance = |y: f64| -> Result<f64> {
        let mut total = 0.0;
        for &a in &others {
            let x = pair_cost_inverse(mu[leader], mu[a], y)?;
            let mid = (mu[leader] + x * mu[a]) / (1.0 + x);
            total += kl_gaussian(mu[leader], mid) / kl_gaussian(mu[a], mid);
        }
        Ok(total)
    };

    let mut lo = 0.0;
    let mut hi = d_min;
    let mut converged = false;
    for _ in 0..MAX_ITER {
        if hi - lo <= OUTER_TOL * d_min {
            converged = true;
            break;
        }
        let mid = 0.5 * (lo + hi);
        if balance(mid)? < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            what: "the oracle-weight equation",
            max_iter: MAX_ITER,
        });
    }
    let y = 0.5 * (lo + hi);
    let mut ratios = vec![1.0; mu.len()];
    for &a in &others {
        ratios[a] = pair_cost_inverse(mu[leader], mu[a], y)?;
    }
    let total: f64 = ratios.iter().sum();
    Ok(ratios.into_iter().map(|x| x / total).collect())
}

/// A conservative bound on sub-gradient entries of `F(., mu')` over all
/// simplex points and all `mu'` within `radius` of `mu` in the sup norm.
///
/// With radius zero this is the largest gradient entry attainable at the
/// instance itself, the natural scale for learning rates.
pub fn gradient_bound(spec: &ProblemSpec, mu: &[f64], radius: f64) -> f64 {
    match spec.family {
        Family::Thresholding | Family::Signed => {
            let thr = spec.thr();
            mu.iter()
                .map(|&m| {
                    let reach = (m - thr).abs() + radius;
                    reach * reach / 2.0
                })
                .fold(0.0f64, f64::max)
        }
        Family::BestArm => {
            // Gradient entries are divergences to a weighted mean of two
            // coordinates, bounded by the largest pairwise spread.
            let max = mu.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = mu.iter().copied().fold(f64::INFINITY, f64::min);
            let spread = max - min + 2.0 * radius;
            spread * spread / 2.0
        }
    }
}
