//! Implementation noise: games over targets and their induced distributions
//! over alternatives.

use serde::{Deserialize, Serialize};

use crate::error::{QreError, Result};
use crate::game::{BimatrixGame, Label, MixedProfile};
use crate::linalg::Matrix;

/// How far apart two actions are for the tremble kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TrembleDistance {
    /// `|k - κ|` on numeric labels.
    #[default]
    LabelDifference,
    /// `|index(k) - index(κ)|`.
    IndexDifference,
}

/// Target `κ` is implemented as alternative `k` with probability proportional to `q^distance(k, κ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrembleModel {
    pub q: f64,
    pub distance: TrembleDistance,
}

impl TrembleModel {
    pub fn new(q: f64, distance: TrembleDistance) -> Result<Self> {
        let m = Self { q, distance };
        m.validate()?;
        Ok(m)
    }

    pub fn labels(q: f64) -> Result<Self> {
        Self::new(q, TrembleDistance::LabelDifference)
    }

    pub fn indices(q: f64) -> Result<Self> {
        Self::new(q, TrembleDistance::IndexDifference)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.q) {
            return Err(QreError::InvalidParameter(format!(
                "tremble q must lie in [0, 1), got {}",
                self.q
            )));
        }
        Ok(())
    }

    fn distance(&self, labels: &[Label], a: usize, b: usize) -> Result<f64> {
        match self.distance {
            TrembleDistance::IndexDifference => Ok(a.abs_diff(b) as f64),
            TrembleDistance::LabelDifference => match (labels[a].as_f64(), labels[b].as_f64()) {
                (Some(x), Some(y)) => Ok((x - y).abs()),
                _ => Err(QreError::InvalidParameter(format!(
                    "label distance needs numeric labels, got {} and {}",
                    labels[a], labels[b]
                ))),
            },
        }
    }

    fn weight(&self, d: f64) -> f64 {
        if d == 0.0 {
            1.0
        } else {
            self.q.powf(d)
        }
    }
}

/// Distribution over `labels` when aiming at `kappa`, normalized over the
/// full label set.
pub fn tremble_kernel(labels: &[Label], kappa: &Label, model: &TrembleModel) -> Result<Vec<f64>> {
    model.validate()?;
    let j = labels
        .iter()
        .position(|l| l == kappa)
        .ok_or_else(|| QreError::InvalidParameter(format!("target {kappa} is not an action label")))?;
    kernel_row(labels, j, model)
}

fn kernel_row(labels: &[Label], target: usize, model: &TrembleModel) -> Result<Vec<f64>> {
    let mut w = (0..labels.len())
        .map(|k| model.distance(labels, k, target).map(|d| model.weight(d)))
        .collect::<Result<Vec<f64>>>()?;
    let s: f64 = w.iter().sum();
    for x in &mut w {
        *x /= s;
    }
    Ok(w)
}

/// Row `κ` holds the kernel around target `κ`.
pub fn tremble_kernel_matrix(labels: &[Label], model: &TrembleModel) -> Result<Matrix> {
    model.validate()?;
    let n = labels.len();
    let mut k = Matrix::zeros(n, n);
    for j in 0..n {
        k.row_mut(j).copy_from_slice(&kernel_row(labels, j, model)?);
    }
    Ok(k)
}

/// Game over targets with a common tremble model.
pub fn target_game(game: &BimatrixGame, model: &TrembleModel) -> Result<BimatrixGame> {
    target_game_per_player(game, model, model)
}

/// Game over targets: `û_i = K₁ u_i K₂ᵀ`, each player's payoff including the
/// own tremble as well as the opponent's.
pub fn target_game_per_player(game: &BimatrixGame, m1: &TrembleModel, m2: &TrembleModel) -> Result<BimatrixGame> {
    let k1 = tremble_kernel_matrix(game.labels_1(), m1)?;
    let k2t = tremble_kernel_matrix(game.labels_2(), m2)?.transpose();
    let a = k1.matmul(game.payoff_1()).matmul(&k2t);
    let b = k1.matmul(game.payoff_2()).matmul(&k2t);
    let mut g = BimatrixGame::new(game.labels_1().to_vec(), game.labels_2().to_vec(), a, b)?;
    *g.metadata_mut() = game.metadata().clone();
    let tremble = if m1 == m2 {
        serde_json::to_value(m1)
    } else {
        serde_json::to_value([m1, m2])
    }
    .expect("tremble model serializes");
    g.metadata_mut().insert("tremble".into(), tremble);
    Ok(g)
}

/// Distribution over alternatives induced by a profile over targets.
pub fn induced_alternative_distribution(
    target_profile: &MixedProfile,
    labels_1: &[Label],
    labels_2: &[Label],
    model: &TrembleModel,
) -> Result<MixedProfile> {
    if target_profile.p1.len() != labels_1.len() || target_profile.p2.len() != labels_2.len() {
        return Err(QreError::DimensionMismatch(
            "target profile and label sets differ in size".into(),
        ));
    }
    let push = |p: &[f64], labels: &[Label]| -> Result<Vec<f64>> {
        let k = tremble_kernel_matrix(labels, model)?;
        let mut out = vec![0.0; labels.len()];
        for (j, pj) in p.iter().enumerate() {
            for (o, w) in out.iter_mut().zip(k.row(j)) {
                *o += pj * w;
            }
        }
        Ok(out)
    };
    Ok(MixedProfile {
        p1: push(&target_profile.p1, labels_1)?,
        p2: push(&target_profile.p2, labels_2)?,
    })
}
