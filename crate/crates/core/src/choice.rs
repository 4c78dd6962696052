//! Stochastic choice rules mapping payoff vectors to choice probabilities.

use serde::{Deserialize, Serialize};

use crate::error::{QreError, Result};

/// Choice rule. `Satisficing { c: 1.0 }` coincides with `Logit`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChoiceModel {
    #[default]
    Logit,
    /// Weights `exp(-(β(ū - u_k))^c)` with `ū = max_k u_k`.
    Satisficing { c: f64 },
}

impl ChoiceModel {
    pub fn satisficing(c: f64) -> Result<Self> {
        let m = ChoiceModel::Satisficing { c };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ChoiceModel::Logit => Ok(()),
            ChoiceModel::Satisficing { c } if c.is_finite() && *c >= 1.0 => Ok(()),
            ChoiceModel::Satisficing { c } => Err(QreError::InvalidParameter(format!(
                "satisficing exponent c must be >= 1, got {c}"
            ))),
        }
    }

    pub fn is_logit(&self) -> bool {
        matches!(self, ChoiceModel::Logit)
    }
}

/// Choice probabilities for payoff vector `u` at precision `beta`.
pub fn choice_distribution(u: &[f64], beta: f64, model: ChoiceModel) -> Result<Vec<f64>> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(QreError::InvalidParameter(format!(
            "precision must be nonnegative, got {beta}"
        )));
    }
    if u.is_empty() {
        return Err(QreError::InvalidParameter("empty payoff vector".into()));
    }
    if u.iter().any(|x| !x.is_finite()) {
        return Err(QreError::InvalidParameter(
            "payoff vector has non-finite entries".into(),
        ));
    }
    model.validate()?;
    let mut out = vec![0.0; u.len()];
    choice_into(u, beta, model, &mut out);
    Ok(out)
}

/// Unchecked kernel of [`choice_distribution`]; writes into `out`.
pub(crate) fn choice_into(u: &[f64], beta: f64, model: ChoiceModel, out: &mut [f64]) {
    let top = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    match model {
        ChoiceModel::Logit => {
            for (o, x) in out.iter_mut().zip(u) {
                *o = (beta * (x - top)).exp();
                total += *o;
            }
        }
        ChoiceModel::Satisficing { c } => {
            for (o, x) in out.iter_mut().zip(u) {
                let gap = beta * (top - x);
                *o = if gap == 0.0 { 1.0 } else { (-gap.powf(c)).exp() };
                total += *o;
            }
        }
    }
    let inv = 1.0 / total;
    for o in out.iter_mut() {
        *o *= inv;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_precision_is_uniform() {
        let p = choice_distribution(&[3.0, -1.0, 7.0, 0.0], 0.0, ChoiceModel::Logit).unwrap();
        assert!(p.iter().all(|x| (x - 0.25).abs() < 1e-16));
    }

    #[test]
    fn two_action_logit() {
        let p = choice_distribution(&[1.0, 0.0], 9f64.ln(), ChoiceModel::Logit).unwrap();
        assert!((p[0] - 0.9).abs() < 1e-15);
        assert!((p[1] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn no_overflow_at_large_range() {
        let p = choice_distribution(&[0.0, 700.0, 350.0], 1.0, ChoiceModel::Logit).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.iter().all(|x| x.is_finite()));
        assert!((p[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn satisficing_flattens_with_c() {
        let u = [1.0, 0.99, 0.0];
        let mut prev_ratio = 0.0;
        for c in [1.0, 2.0, 4.0, 8.0] {
            let p = choice_distribution(&u, 1.0, ChoiceModel::Satisficing { c }).unwrap();
            let ratio = p[1] / p[0];
            assert!(ratio >= prev_ratio - 1e-15);
            prev_ratio = ratio;
            // The gap of 1 is a fixed point of t^c, so the worst action keeps weight e^{-1} relative to the best.
            assert!((p[2] / p[0] - (-1.0f64).exp()).abs() < 1e-12);
        }
        assert!(prev_ratio > 0.999_999);
    }

    #[test]
    fn satisficing_c_one_is_logit() {
        let u = [0.3, -2.0, 5.0, 4.9];
        let a = choice_distribution(&u, 1.7, ChoiceModel::Logit).unwrap();
        let b = choice_distribution(&u, 1.7, ChoiceModel::Satisficing { c: 1.0 }).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(choice_distribution(&[1.0], -1.0, ChoiceModel::Logit).is_err());
        assert!(choice_distribution(&[f64::NAN, 1.0], 1.0, ChoiceModel::Logit).is_err());
        assert!(choice_distribution(&[1.0, 2.0], 1.0, ChoiceModel::Satisficing { c: 0.5 }).is_err());
    }
}
