//! Statistical procedures for preference studies: the exact two-sided
//! sign test and Fleiss's kappa for inter-rater agreement.

use serde::{Deserialize, Serialize};

use super::EvalError;

/// Exact two-sided sign test over win/loss counts (ties must be dropped
/// by the caller before invoking this).
///
/// With `n = wins + losses` and `m = max(wins, losses)`, the p-value is
/// `min(1, 2 · P(X ≥ m))` for `X ~ Binomial(n, ½)`: the probability,
/// under the null hypothesis that either side of a pair is preferred
/// with equal chance, of an imbalance at least as extreme as observed,
/// in either direction.
pub fn sign_test(wins: u64, losses: u64) -> Result<f64, EvalError> {
    let n = wins + losses;
    if n == 0 {
        return Err(EvalError::NoInformativePairs);
    }
    let m = wins.max(losses);
    Ok((2.0 * binomial_half_tail(n, m)).min(1.0))
}

/// `P(X ≥ m)` for `X ~ Binomial(n, ½)`.
///
/// Up to `n = 120` the binomial coefficients are summed exactly in
/// `u128` (they fit comfortably) and scaled by the exact power of two,
/// so the result is correct to f64 rounding. Beyond that the tail is
/// accumulated through the term recurrence
/// `t(k+1) = t(k) · (n − k) / (k + 1)` seeded in log space.
fn binomial_half_tail(n: u64, m: u64) -> f64 {
    debug_assert!(m <= n);
    if n <= 120 {
        let sum: u128 = (m..=n).map(|k| choose(n, k)).sum();
        return sum as f64 / 2f64.powi(n as i32);
    }
    let nf = n as f64;
    // ln t(m) = ln C(n, m) − n ln 2, with ln C(n, m) = Σ ln((n−m+j)/j).
    let mut ln_term = -nf * std::f64::consts::LN_2;
    for j in 1..=m.min(n - m) {
        ln_term += ((nf - m.min(n - m) as f64 + j as f64) / j as f64).ln();
    }
    let mut term = ln_term.exp();
    let mut tail = 0.0;
    for k in m..=n {
        tail += term;
        term *= (nf - k as f64) / (k as f64 + 1.0);
    }
    tail.min(1.0)
}

/// Exact binomial coefficient via the multiplicative formula; every
/// intermediate division is exact, so no overflow short of the final
/// value itself. Safe in `u128` for all `n ≤ 120`.
fn choose(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut result: u128 = 1;
    for j in 1..=k {
        result = result * (n - k + j) as u128 / j as u128;
    }
    result
}

/// Fleiss's kappa with its degenerate case made explicit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Kappa {
    /// The agreement coefficient, in `[-1, 1]`.
    pub value: f64,
    /// True when expected chance agreement is 1 (every rating in every
    /// row landed in one single category), which makes the usual
    /// formula 0/0; the value is reported as 1.0 by convention.
    pub degenerate: bool,
}

/// An N×C matrix of rating counts: N subjects, C categories, each row
/// summing to the same rater count `n ≥ 2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<u64>>", into = "Vec<Vec<u64>>")]
pub struct RatingMatrix {
    rows: Vec<Vec<u64>>,
    raters: u64,
}

impl RatingMatrix {
    pub fn new(rows: Vec<Vec<u64>>) -> Result<Self, EvalError> {
        if rows.is_empty() {
            return Err(EvalError::InvalidMatrix(
                "matrix must have at least one subject row".to_owned(),
            ));
        }
        let categories = rows[0].len();
        if categories < 2 {
            return Err(EvalError::InvalidMatrix(format!(
                "matrix must have at least 2 categories, got {categories}"
            )));
        }
        let raters: u64 = rows[0].iter().sum();
        if raters < 2 {
            return Err(EvalError::InvalidMatrix(format!(
                "each subject needs at least 2 ratings, got {raters}"
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != categories {
                return Err(EvalError::InvalidMatrix(format!(
                    "row {i} has {} categories, expected {categories}",
                    row.len()
                )));
            }
            let sum: u64 = row.iter().sum();
            if sum != raters {
                return Err(EvalError::InvalidMatrix(format!(
                    "row {i} sums to {sum}, expected the constant rater count {raters}"
                )));
            }
        }
        Ok(RatingMatrix { rows, raters })
    }

    pub fn subjects(&self) -> usize {
        self.rows.len()
    }

    pub fn categories(&self) -> usize {
        self.rows[0].len()
    }

    pub fn raters(&self) -> u64 {
        self.raters
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }
}

impl TryFrom<Vec<Vec<u64>>> for RatingMatrix {
    type Error = EvalError;

    fn try_from(rows: Vec<Vec<u64>>) -> Result<Self, Self::Error> {
        RatingMatrix::new(rows)
    }
}

impl From<RatingMatrix> for Vec<Vec<u64>> {
    fn from(matrix: RatingMatrix) -> Self {
        matrix.rows
    }
}

/// Fleiss's kappa: `κ = (P̄ − P̄e) / (1 − P̄e)` with per-subject
/// agreement `P_i = (Σ_j n_ij² − n) / (n(n−1))` and chance agreement
/// `P̄e = Σ_j p_j²` over category shares `p_j = Σ_i n_ij / (N·n)`.
pub fn fleiss_kappa(matrix: &RatingMatrix) -> Kappa {
    let n = matrix.raters() as f64;
    let subjects = matrix.subjects() as f64;
    let categories = matrix.categories();

    let mut p_bar = 0.0;
    let mut column_sums = vec![0.0_f64; categories];
    for row in matrix.rows() {
        let mut sq = 0.0;
        for (j, &count) in row.iter().enumerate() {
            let c = count as f64;
            sq += c * c;
            column_sums[j] += c;
        }
        p_bar += (sq - n) / (n * (n - 1.0));
    }
    p_bar /= subjects;

    let p_e: f64 = column_sums
        .iter()
        .map(|&sum| {
            let share = sum / (subjects * n);
            share * share
        })
        .sum();

    if p_e >= 1.0 - 1e-12 {
        return Kappa {
            value: 1.0,
            degenerate: true,
        };
    }
    Kappa {
        value: (p_bar - p_e) / (1.0 - p_e),
        degenerate: false,
    }
}
