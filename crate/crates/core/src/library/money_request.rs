//! The 11-20 money-request game and its variants.

use serde::{Deserialize, Serialize};

use crate::error::{QreError, Result};
use crate::game::{numeric_labels, BimatrixGame};

/// Payoff structure of the request game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MoneyRequestVersion {
    /// Claim `t`, plus 20 for claiming exactly one below the opponent.
    Basic,
    /// Basic, and the top claim also earns the bonus against the bottom claim.
    Cycle,
    /// Top claim pays 20; any other claim pays 37 when one below the opponent and 17 otherwise.
    Costless,
    /// Costless on claims 110..=200 with a bonus `20(1 - α(t_j - t_i - 1))` for undercutting by at most 10.
    Fine { alpha: f64 },
}

/// Which claims the strategic players choose from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// All claims, including the top one.
    One,
    /// Claims strictly below the top one.
    Two,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoneyRequestSpec {
    pub version: MoneyRequestVersion,
    /// Mass of stubborn opponents who always make the top claim.
    pub pi: f64,
    pub variant: Variant,
    pub claims: Vec<f64>,
}

impl MoneyRequestSpec {
    /// Claims `11..=20`, or `110..=200` for the fine version.
    pub fn new(version: MoneyRequestVersion, pi: f64, variant: Variant) -> Self {
        let claims = match version {
            MoneyRequestVersion::Fine { .. } => (110..=200).map(f64::from).collect(),
            _ => (11..=20).map(f64::from).collect(),
        };
        Self {
            version,
            pi,
            variant,
            claims,
        }
    }

    pub fn basic() -> Self {
        Self::new(MoneyRequestVersion::Basic, 0.0, Variant::One)
    }

    fn top(&self) -> f64 {
        *self.claims.last().expect("validated nonempty")
    }

    fn bottom(&self) -> f64 {
        self.claims[0]
    }

    /// Payoff to claiming `ti` against a strategic claim `tj`, before the stubborn blend.
    pub fn base_payoff(&self, ti: f64, tj: f64) -> f64 {
        let top = self.top();
        match self.version {
            MoneyRequestVersion::Basic => ti + if ti == tj - 1.0 { 20.0 } else { 0.0 },
            MoneyRequestVersion::Cycle => {
                let bonus = ti == tj - 1.0 || (ti == top && tj == self.bottom());
                ti + if bonus { 20.0 } else { 0.0 }
            }
            MoneyRequestVersion::Costless => {
                if ti == top {
                    20.0
                } else if tj == ti + 1.0 {
                    37.0
                } else {
                    17.0
                }
            }
            MoneyRequestVersion::Fine { alpha } => {
                if ti == top {
                    20.0
                } else if tj - 10.0 <= ti && ti < tj {
                    17.0 + 20.0 * (1.0 - alpha * (tj - ti - 1.0))
                } else {
                    17.0
                }
            }
        }
    }

    /// `(1-π) u(ti, tj) + π u(ti, top)`.
    pub fn payoff(&self, ti: f64, tj: f64) -> f64 {
        (1.0 - self.pi) * self.base_payoff(ti, tj) + self.pi * self.base_payoff(ti, self.top())
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.pi) {
            return Err(QreError::InvalidParameter(format!(
                "pi must lie in [0, 1), got {}",
                self.pi
            )));
        }
        if self.claims.len() < 3 || self.claims.windows(2).any(|w| w[1] <= w[0]) {
            return Err(QreError::InvalidParameter(
                "claims must be strictly increasing with at least three entries".into(),
            ));
        }
        if let MoneyRequestVersion::Fine { alpha } = self.version {
            if !alpha.is_finite() {
                return Err(QreError::InvalidParameter("alpha must be finite".into()));
            }
        }
        Ok(())
    }
}

/// Two-player request game with an optional mass of stubborn top claimants.
pub fn money_request(spec: &MoneyRequestSpec) -> Result<BimatrixGame> {
    spec.validate()?;
    let strategic: Vec<f64> = match spec.variant {
        Variant::One => spec.claims.clone(),
        Variant::Two => spec.claims[..spec.claims.len() - 1].to_vec(),
    };
    let n = strategic.len();
    let labels = numeric_labels(strategic.iter().copied());
    let a = crate::linalg::Matrix::from_fn(n, n, |i, j| spec.payoff(strategic[i], strategic[j]));
    Ok(BimatrixGame::symmetric(labels, a)?
        .with_metadata("family", "money-request")
        .with_metadata("spec", serde_json::to_value(spec).expect("spec serializes")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{MixedProfile, DEFAULT_TIE_TOL};

    fn idx(g: &BimatrixGame, t: f64) -> usize {
        g.numeric_label_index(0, t).unwrap()
    }

    #[test]
    fn basic_payoffs() {
        let g = money_request(&MoneyRequestSpec::basic()).unwrap();
        assert_eq!(g.payoff_1()[(idx(&g, 19.0), idx(&g, 20.0))], 39.0);
        assert_eq!(g.payoff_1()[(idx(&g, 20.0), idx(&g, 11.0))], 20.0);
        let p = MixedProfile::pure(10, 9, 10, 9);
        assert_eq!(g.best_response_set(&p, DEFAULT_TIE_TOL).unwrap().0, vec![8]);
        assert!(g.pure_nash_equilibria(DEFAULT_TIE_TOL).is_empty());
    }

    #[test]
    fn cycle_bonus() {
        let g = money_request(&MoneyRequestSpec::new(MoneyRequestVersion::Cycle, 0.0, Variant::One)).unwrap();
        assert_eq!(g.payoff_1()[(idx(&g, 20.0), idx(&g, 11.0))], 40.0);
    }

    #[test]
    fn costless_payoffs() {
        let g = money_request(&MoneyRequestSpec::new(MoneyRequestVersion::Costless, 0.0, Variant::One)).unwrap();
        for j in 0..10 {
            assert_eq!(g.payoff_1()[(idx(&g, 20.0), j)], 20.0);
        }
        assert_eq!(g.payoff_1()[(idx(&g, 15.0), idx(&g, 16.0))], 37.0);
        assert_eq!(g.payoff_1()[(idx(&g, 15.0), idx(&g, 18.0))], 17.0);
    }

    #[test]
    fn stubborn_blend_and_variant_two() {
        let spec = MoneyRequestSpec::new(MoneyRequestVersion::Costless, 0.1, Variant::Two);
        let g = money_request(&spec).unwrap();
        assert_eq!(g.n1(), 9);
        // Claiming 19 earns 37 against the stubborn top claim.
        let v = g.payoff_1()[(idx(&g, 19.0), idx(&g, 12.0))];
        assert!((v - (0.9 * 17.0 + 0.1 * 37.0)).abs() < 1e-12);
    }

    #[test]
    fn fine_window() {
        let spec = MoneyRequestSpec::new(MoneyRequestVersion::Fine { alpha: 0.1 }, 0.0, Variant::One);
        let g = money_request(&spec).unwrap();
        assert_eq!(g.n1(), 91);
        assert!((g.payoff_1()[(idx(&g, 189.0), idx(&g, 190.0))] - 37.0).abs() < 1e-12);
        assert!((g.payoff_1()[(idx(&g, 180.0), idx(&g, 190.0))] - 19.0).abs() < 1e-12);
        assert_eq!(g.payoff_1()[(idx(&g, 179.0), idx(&g, 190.0))], 17.0);
        assert_eq!(g.payoff_1()[(idx(&g, 200.0), idx(&g, 120.0))], 20.0);
    }

    #[test]
    fn rejects_bad_pi() {
        let spec = MoneyRequestSpec::new(MoneyRequestVersion::Basic, 1.0, Variant::One);
        assert!(money_request(&spec).is_err());
    }
}
