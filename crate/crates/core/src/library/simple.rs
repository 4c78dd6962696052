//! Small benchmark games: the four-action game, rock-paper-scissors and the traveler's dilemma.

use crate::error::{QreError, Result};
use crate::game::{numeric_labels, BimatrixGame};
use crate::linalg::Matrix;

/// Symmetric four-action game with parameter `theta` in the corner payoff.
pub fn four_action_game(theta: f64) -> Result<BimatrixGame> {
    if !(theta < 1.0 && theta.is_finite()) {
        return Err(QreError::InvalidParameter(format!(
            "theta must be below 1, got {theta}"
        )));
    }
    let a = Matrix::from_rows(&[
        vec![0.0, 0.0, 2.0, theta],
        vec![2.0, 0.0, 0.0, 0.0],
        vec![0.0, 2.0, 0.0, 0.0],
        vec![0.0, 0.0, 2.0, 1.0],
    ])
    .expect("square rows");
    Ok(BimatrixGame::symmetric(numeric_labels([1.0, 2.0, 3.0, 4.0]), a)?
        .with_metadata("family", "four-action")
        .with_metadata("theta", theta))
}

/// Standard zero-sum rock-paper-scissors with unit stakes.
pub fn rock_paper_scissors() -> BimatrixGame {
    let a =
        Matrix::from_rows(&[vec![0.0, -1.0, 1.0], vec![1.0, 0.0, -1.0], vec![-1.0, 1.0, 0.0]]).expect("square rows");
    BimatrixGame::symmetric(numeric_labels([0.0, 1.0, 2.0]), a)
        .expect("valid game")
        .with_metadata("family", "rock-paper-scissors")
}

/// Integer claims `low..=high` in steps of `step`.
pub fn travelers_claims(low: u32, high: u32, step: u32) -> Vec<f64> {
    (low..=high).step_by(step.max(1) as usize).map(f64::from).collect()
}

/// Traveler's dilemma: both get the lower claim `τ`; the strictly lower
/// claimant gets `τ + Δ` and the other `τ - Δ`.
pub fn travelers_dilemma(delta: f64, claims: &[f64]) -> Result<BimatrixGame> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(QreError::InvalidParameter(format!(
            "delta must be nonnegative, got {delta}"
        )));
    }
    if claims.windows(2).any(|w| w[1] <= w[0]) {
        return Err(QreError::InvalidParameter("claims must be strictly increasing".into()));
    }
    let labels = numeric_labels(claims.iter().copied());
    let n = claims.len();
    let a = Matrix::from_fn(n, n, |i, j| {
        let (ti, tj) = (claims[i], claims[j]);
        let tau = ti.min(tj);
        if ti < tj {
            tau + delta
        } else if ti > tj {
            tau - delta
        } else {
            tau
        }
    });
    Ok(BimatrixGame::symmetric(labels, a)?
        .with_metadata("family", "travelers")
        .with_metadata("delta", delta))
}
