//! Brute-force reference implementations.
//!
//! These deliberately avoid the closed forms they are used to check: the
//! oracle weights come from exhaustive simplex-grid maximization of the value
//! function, the stopping statistic from exhaustive minimization over a
//! rectangular grid of alternatives, and sub-gradients are validated by
//! finite differences. They ship in the library (not only in tests) so the
//! command line can print the grid answer next to the closed-form one.

use crate::bandit::kl_gaussian;
use crate::error::{Error, Result};
use crate::problems::{answer, subgradient, value_f, ProblemSpec};

/// Exhaustive simplex-grid maximization of the value function.
///
/// Enumerates every weight vector with coordinates that are multiples of
/// `step` and returns the best grid point (first hit on ties). Cost grows
/// like `step^-(K-1)`, hence the arm and resolution caps.
pub fn grid_w_star(spec: &ProblemSpec, mu: &[f64], step: f64) -> Result<Vec<f64>> {
    let k = mu.len();
    if k > 4 {
        return Err(Error::TooManyArms {
            what: "grid search",
            max: 4,
            arms: k,
        });
    }
    if !(step >= 1e-3 && step <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "grid step must lie in [1e-3, 1], got {step}"
        )));
    }
    let n = (1.0 / step).round() as u64;
    let mut best_value = f64::NEG_INFINITY;
    let mut best_w = vec![0.0; k];
    let mut counts = vec![0u64; k];
    grid_recurse(spec, mu, n, n, 0, &mut counts, &mut best_value, &mut best_w)?;
    Ok(best_w)
}

fn grid_recurse(
    spec: &ProblemSpec,
    mu: &[f64],
    n: u64,
    remaining: u64,
    coord: usize,
    counts: &mut [u64],
    best_value: &mut f64,
    best_w: &mut [f64],
) -> Result<()> {
    if coord == counts.len() - 1 {
        counts[coord] = remaining;
        let w: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
        let value = value_f(spec, &w, mu)?;
        if value > *best_value {
            *best_value = value;
            best_w.copy_from_slice(&w);
        }
        return Ok(());
    }
    for c in 0..=remaining {
        counts[coord] = c;
        grid_recurse(spec, mu, n, remaining - c, coord + 1, counts, best_value, best_w)?;
    }
    Ok(())
}

/// Exhaustive grid minimization of the count-weighted transportation cost
/// over the alternatives of `mu_hat`, for two-arm problems.
///
/// Scans `lambda` over the square `[lo, hi]^2` at resolution `lambda_step`,
/// keeping points whose class differs from the class of `mu_hat` (any
/// decided class when `mu_hat` itself is undecided). The result upper-bounds
/// the exact infimum; [`grid_glr_error_bound`] bounds the gap.
pub fn grid_glr(
    spec: &ProblemSpec,
    counts: &[u64],
    mu_hat: &[f64],
    lambda_step: f64,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    if mu_hat.len() != 2 || counts.len() != 2 {
        return Err(Error::TooManyArms {
            what: "grid minimization",
            max: 2,
            arms: mu_hat.len(),
        });
    }
    if !(lambda_step > 0.0 && hi > lo) {
        return Err(Error::InvalidConfig(format!(
            "bad grid: step {lambda_step}, box [{lo}, {hi}]"
        )));
    }
    let own_class = answer(spec, mu_hat);
    let n0 = counts[0] as f64;
    let n1 = counts[1] as f64;
    let points = ((hi - lo) / lambda_step).floor() as usize + 1;
    let mut best = f64::INFINITY;
    let mut found = false;
    for i in 0..points {
        let l0 = lo + i as f64 * lambda_step;
        let cost0 = n0 * kl_gaussian(mu_hat[0], l0);
        if cost0 >= best {
            continue;
        }
        for j in 0..points {
            let l1 = lo + j as f64 * lambda_step;
            let class = answer(spec, &[l0, l1]);
            // In the alternative set: any decided class other than our own.
            if class.is_none() || class == own_class {
                continue;
            }
            let cost = cost0 + n1 * kl_gaussian(mu_hat[1], l1);
            if cost < best {
                best = cost;
                found = true;
            }
        }
    }
    if !found {
        return Err(Error::EmptyGrid);
    }
    Ok(best)
}

/// Bound on the excess of [`grid_glr`] over the exact infimum: the
/// constrained minimizer is within 1.5 grid steps per coordinate of an
/// admissible grid point, and the quadratic objective grows at most linearly
/// in that displacement at rate `N_a |mu_hat_a - lambda_a|`, plus a
/// second-order term.
pub fn grid_glr_error_bound(
    counts: &[u64],
    mu_hat: &[f64],
    lambda_step: f64,
    lo: f64,
    hi: f64,
) -> f64 {
    let h = 1.5 * lambda_step;
    counts
        .iter()
        .zip(mu_hat)
        .map(|(&n, &m)| {
            let reach = (m - lo).abs().max((m - hi).abs());
            n as f64 * (h * reach + h * h / 2.0)
        })
        .sum()
}

/// Checks the closed-form sub-gradient against central finite differences of
/// the value function along the simplex-tangent directions `e_i - e_j`.
///
/// Where the two one-sided slopes agree (a single smooth piece is active)
/// the central difference must match the sub-gradient's directional value;
/// across a kink only the supergradient inequality is checked. Returns the
/// largest discrepancy found.
pub fn finite_diff_check(spec: &ProblemSpec, w: &[f64], mu: &[f64], h: f64) -> Result<f64> {
    if !(1e-6..=1e-3).contains(&h) {
        return Err(Error::InvalidConfig(format!(
            "finite-difference step must lie in [1e-6, 1e-3], got {h}"
        )));
    }
    if let Some((arm, &value)) = w.iter().enumerate().find(|(_, &x)| x <= 2.0 * h) {
        return Err(Error::NonPositiveWeight { arm, value });
    }
    let g = subgradient(spec, w, mu)?;
    let f0 = value_f(spec, w, mu)?;
    // One-sided slopes further apart than this flag a kink; smooth pieces
    // differ across 2h by at most the curvature scale, far below it.
    let kink_tol = 1e-3;
    let mut max_gap = 0.0f64;
    for i in 0..w.len() {
        for j in (i + 1)..w.len() {
            let mut plus = w.to_vec();
            plus[i] += h;
            plus[j] -= h;
            let mut minus = w.to_vec();
            minus[i] -= h;
            minus[j] += h;
            let fp = value_f(spec, &plus, mu)?;
            let fm = value_f(spec, &minus, mu)?;
            let slope_up = (fp - f0) / h;
            let slope_down = (f0 - fm) / h;
            let directional = g[i] - g[j];
            if (slope_up - slope_down).abs() <= kink_tol {
                let central = (fp - fm) / (2.0 * h);
                max_gap = max_gap.max((central - directional).abs());
            } else {
                // Concavity: F(w') <= F(w) + g . (w' - w) on both sides.
                max_gap = max_gap.max(fp - f0 - h * directional);
                max_gap = max_gap.max(fm - f0 + h * directional);
            }
        }
    }
    Ok(max_gap)
}
