//! Continuous-time centipede games over exit dates.

use serde::{Deserialize, Serialize};

use crate::error::{QreError, Result};
use crate::game::{numeric_labels, BimatrixGame};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Timing {
    /// Both players choose from the same dates.
    Symmetric,
    /// Disjoint interleaved dates, player 1 first.
    Alternating,
}

/// Size of the pie at the stopping date `τ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Pie {
    /// `S(τ) = τ`.
    Linear,
    /// `S(τ) = s0 · exp(b τ / tau_bar)`.
    Exponential { s0: f64, b: f64, tau_bar: f64 },
    /// `S(τ) = size`.
    Constant { size: f64 },
}

/// Share of the pie taken by the player who stops first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Share {
    Constant {
        a: f64,
    },
    /// `a(τ) = 1 - exp(-α τ / 100) / 2`.
    Decaying {
        alpha: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentipedeSpec {
    pub timing: Timing,
    pub exit_dates_1: Vec<f64>,
    pub exit_dates_2: Vec<f64>,
    pub pie: Pie,
    pub share: Share,
}

impl CentipedeSpec {
    /// Linear pie on dates `1..=100` with first-mover share `a`.
    pub fn linear(a: f64) -> Self {
        let dates: Vec<f64> = (1..=100).map(f64::from).collect();
        Self {
            timing: Timing::Symmetric,
            exit_dates_1: dates.clone(),
            exit_dates_2: dates,
            pie: Pie::Linear,
            share: Share::Constant { a },
        }
    }

    /// Exponential pie `exp(b t / 100)` on dates `0..=100` with share `a`.
    pub fn exponential(a: f64, b: f64) -> Self {
        let dates: Vec<f64> = (0..=100).map(f64::from).collect();
        Self {
            timing: Timing::Symmetric,
            exit_dates_1: dates.clone(),
            exit_dates_2: dates,
            pie: Pie::Exponential {
                s0: 1.0,
                b,
                tau_bar: 100.0,
            },
            share: Share::Constant { a },
        }
    }

    /// Zero-sum pie of unit size on dates `0..=100` with a share that grows from 1/2.
    pub fn constant_size(alpha: f64) -> Self {
        let dates: Vec<f64> = (0..=100).map(f64::from).collect();
        Self {
            timing: Timing::Symmetric,
            exit_dates_1: dates.clone(),
            exit_dates_2: dates,
            pie: Pie::Constant { size: 1.0 },
            share: Share::Decaying { alpha },
        }
    }

    /// Replaces the dates by `{0, ρ, …, nρ}` for both players, `ρ = tau_bar / n`.
    pub fn with_symmetric_dates(mut self, n: usize, tau_bar: f64) -> Self {
        let rho = tau_bar / n as f64;
        let dates: Vec<f64> = (0..=n).map(|k| k as f64 * rho).collect();
        self.timing = Timing::Symmetric;
        self.exit_dates_1 = dates.clone();
        self.exit_dates_2 = dates;
        self
    }

    /// `2n` alternating dates `0, ρ, …, (2n-1)ρ` spanning `[0, tau_bar]`;
    /// player 1 takes the even multiples of `ρ` and player 2 the odd ones.
    pub fn with_alternating_dates(mut self, n: usize, tau_bar: f64) -> Self {
        let rho = tau_bar / (2 * n - 1).max(1) as f64;
        self.timing = Timing::Alternating;
        self.exit_dates_1 = (0..n).map(|k| (2 * k) as f64 * rho).collect();
        self.exit_dates_2 = (0..n).map(|k| (2 * k + 1) as f64 * rho).collect();
        self
    }

    pub fn validate(&self) -> Result<()> {
        for dates in [&self.exit_dates_1, &self.exit_dates_2] {
            if dates.len() < 2 {
                return Err(QreError::InvalidParameter(
                    "each player needs at least two dates".into(),
                ));
            }
            if dates.iter().any(|d| !(d.is_finite() && *d >= 0.0)) || dates.windows(2).any(|w| w[1] <= w[0]) {
                return Err(QreError::InvalidParameter(
                    "dates must be nonnegative and strictly increasing".into(),
                ));
            }
        }
        if self.timing == Timing::Alternating && self.exit_dates_1.iter().any(|d| self.exit_dates_2.contains(d)) {
            return Err(QreError::InvalidParameter("alternating dates must be disjoint".into()));
        }
        match self.share {
            Share::Constant { a } if !(a > 0.5 && a <= 1.0) => {
                return Err(QreError::InvalidParameter(format!(
                    "share a must lie in (1/2, 1], got {a}"
                )))
            }
            Share::Decaying { alpha } if !(alpha >= 0.0 && alpha.is_finite()) => {
                return Err(QreError::InvalidParameter(format!(
                    "alpha must be nonnegative, got {alpha}"
                )))
            }
            _ => {}
        }
        match self.pie {
            Pie::Exponential { s0, tau_bar, .. } if !(s0 > 0.0 && tau_bar > 0.0) => Err(QreError::InvalidParameter(
                "exponential pie needs s0 > 0 and tau_bar > 0".into(),
            )),
            Pie::Constant { size } if !(size > 0.0) => {
                Err(QreError::InvalidParameter("pie size must be positive".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn pie_size(&self, tau: f64) -> f64 {
        match self.pie {
            Pie::Linear => tau,
            Pie::Exponential { s0, b, tau_bar } => s0 * (b * tau / tau_bar).exp(),
            Pie::Constant { size } => size,
        }
    }

    pub fn first_share(&self, tau: f64) -> f64 {
        match self.share {
            Share::Constant { a } => a,
            Share::Decaying { alpha } => 1.0 - 0.5 * (-alpha * tau / 100.0).exp(),
        }
    }

    /// Payoff to a player stopping at `own` when the opponent stops at `other`.
    pub fn payoff(&self, own: f64, other: f64) -> f64 {
        let tau = own.min(other);
        let s = self.pie_size(tau);
        let a = self.first_share(tau);
        if own < other {
            a * s
        } else if own > other {
            (1.0 - a) * s
        } else {
            s / 2.0
        }
    }
}

/// Timing game where the first to stop takes share `a(τ)` of the pie `S(τ)`.
pub fn centipede(spec: &CentipedeSpec) -> Result<BimatrixGame> {
    spec.validate()?;
    let (d1, d2) = (&spec.exit_dates_1, &spec.exit_dates_2);
    let g = BimatrixGame::from_fn(
        numeric_labels(d1.iter().copied()),
        numeric_labels(d2.iter().copied()),
        |i, j| (spec.payoff(d1[i], d2[j]), spec.payoff(d2[j], d1[i])),
    )?;
    Ok(g.with_metadata("family", "centipede")
        .with_metadata("spec", serde_json::to_value(spec).expect("spec serializes")))
}
