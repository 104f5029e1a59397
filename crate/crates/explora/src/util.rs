//! Small shared numeric helpers.

use crate::error::{Error, Result};

/// Tolerance on the simplex sum check.
pub(crate) const SIMPLEX_TOL: f64 = 1e-9;

/// The uniform distribution over `k` arms.
pub(crate) fn uniform(k: usize) -> Vec<f64> {
    vec![1.0 / k as f64; k]
}

pub(crate) fn check_finite(what: &'static str, xs: &[f64]) -> Result<()> {
    for (i, x) in xs.iter().enumerate() {
        if !x.is_finite() {
            return Err(Error::NotFinite { what, index: i });
        }
    }
    Ok(())
}

/// Validates that `w` is a probability vector: nonnegative entries summing to
/// one within [`SIMPLEX_TOL`].
pub(crate) fn check_simplex(w: &[f64]) -> Result<()> {
    check_finite("weight vector", w)?;
    if let Some((i, &x)) = w.iter().enumerate().find(|(_, &x)| x < -SIMPLEX_TOL) {
        return Err(Error::NotASimplex {
            reason: format!("entry {i} is negative ({x})"),
        });
    }
    let sum: f64 = w.iter().sum();
    if (sum - 1.0).abs() > SIMPLEX_TOL {
        return Err(Error::NotASimplex {
            reason: format!("entries sum to {sum}"),
        });
    }
    Ok(())
}

/// Validates that `w` is a simplex point with every entry strictly positive.
pub(crate) fn check_positive_simplex(w: &[f64]) -> Result<()> {
    check_simplex(w)?;
    for (arm, &x) in w.iter().enumerate() {
        if x <= 0.0 {
            return Err(Error::NonPositiveWeight { arm, value: x });
        }
    }
    Ok(())
}

/// Index of the largest entry, smallest index on ties.
pub(crate) fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_validation() {
        assert!(check_simplex(&[0.5, 0.5]).is_ok());
        assert!(check_simplex(&[1.0, 0.0]).is_ok());
        assert!(check_simplex(&[0.6, 0.6]).is_err());
        assert!(check_simplex(&[1.5, -0.5]).is_err());
        assert!(check_positive_simplex(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn argmax_breaks_ties_low() {
        assert_eq!(argmax(&[1.0, 1.0, 0.5]), 0);
        assert_eq!(argmax(&[0.0, 2.0, 2.0]), 1);
    }
}
