//! Finite two-player games in dense bimatrix form.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{QreError, Result};
use crate::linalg::{dot, Matrix};

/// Default absolute tolerance for payoff ties in best-response sets.
pub const DEFAULT_TIE_TOL: f64 = 1e-9;

/// Tolerance on the sum of a probability vector.
pub const PROBABILITY_SUM_TOL: f64 = 1e-12;

/// Action label. Numeric labels carry semantic values (dates, claims,
/// shading factors) used by distance-based trembles and summary statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Num(f64),
    Text(String),
}

impl Label {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Label::Num(x) => Some(*x),
            Label::Text(_) => None,
        }
    }

    pub fn text(s: impl Into<String>) -> Self {
        Label::Text(s.into())
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Num(x) if x.fract() == 0.0 && x.abs() < 1e15 => write!(f, "{}", *x as i64),
            Label::Num(x) => write!(f, "{x}"),
            Label::Text(s) => f.write_str(s),
        }
    }
}

impl From<f64> for Label {
    fn from(x: f64) -> Self {
        Label::Num(x)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label::Text(s.to_string())
    }
}

/// Numeric labels from an iterator of values.
pub fn numeric_labels(values: impl IntoIterator<Item = f64>) -> Vec<Label> {
    values.into_iter().map(Label::Num).collect()
}

/// Pair of mixed strategies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedProfile {
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
}

impl MixedProfile {
    /// Validated constructor: entries nonnegative and each vector summing to 1.
    pub fn new(p1: Vec<f64>, p2: Vec<f64>) -> Result<Self> {
        check_probability(&p1, "p1")?;
        check_probability(&p2, "p2")?;
        Ok(Self { p1, p2 })
    }

    /// Rescales nonnegative weights to probability vectors.
    pub fn normalized(w1: Vec<f64>, w2: Vec<f64>) -> Result<Self> {
        Ok(Self {
            p1: normalize(w1, "p1")?,
            p2: normalize(w2, "p2")?,
        })
    }

    /// Both players use the same mixed strategy.
    pub fn symmetric(p: Vec<f64>) -> Result<Self> {
        Self::new(p.clone(), p)
    }

    pub fn pure(n1: usize, k1: usize, n2: usize, k2: usize) -> Self {
        let mut p1 = vec![0.0; n1];
        let mut p2 = vec![0.0; n2];
        p1[k1] = 1.0;
        p2[k2] = 1.0;
        Self { p1, p2 }
    }

    pub fn player(&self, i: usize) -> &[f64] {
        match i {
            0 => &self.p1,
            _ => &self.p2,
        }
    }

    /// L-infinity distance over both players.
    pub fn linf_distance(&self, other: &Self) -> f64 {
        crate::linalg::linf_distance(&self.p1, &other.p1).max(crate::linalg::linf_distance(&self.p2, &other.p2))
    }
}

fn check_probability(p: &[f64], name: &str) -> Result<()> {
    if p.is_empty() {
        return Err(QreError::InvalidProfile(format!("{name} is empty")));
    }
    if let Some(x) = p.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(QreError::InvalidProfile(format!("{name} has entry {x}")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > PROBABILITY_SUM_TOL * (p.len() as f64).max(1.0) {
        return Err(QreError::InvalidProfile(format!("{name} sums to {s}")));
    }
    Ok(())
}

fn normalize(w: Vec<f64>, name: &str) -> Result<Vec<f64>> {
    if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(QreError::InvalidProfile(format!(
            "{name} has a negative or non-finite weight"
        )));
    }
    let s: f64 = w.iter().sum();
    if s <= 0.0 {
        return Err(QreError::InvalidProfile(format!("{name} has zero total weight")));
    }
    Ok(w.into_iter().map(|x| x / s).collect())
}

/// Expected payoff of each action against the opponent's mixed strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PayoffVectors {
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
}

/// Two-player finite game.
///
/// Both payoff matrices are indexed `[k1, k2]`. Player 2's matrix is also
/// kept transposed so both players' expected payoffs are row dot products;
/// for symmetric games this makes the two players' computations identical
/// operation for operation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GameDocument", into = "GameDocument")]
pub struct BimatrixGame {
    labels_1: Vec<Label>,
    labels_2: Vec<Label>,
    payoff_1: Matrix,
    payoff_2: Matrix,
    payoff_2_t: Matrix,
    metadata: Map<String, Value>,
}

/// Serialized form of a game.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GameDocument {
    pub labels_1: Vec<Label>,
    pub labels_2: Vec<Label>,
    pub payoff_1: Vec<Vec<f64>>,
    pub payoff_2: Vec<Vec<f64>>,
    #[serde(default)]
    pub metadata: Map<String, Value>,
}

impl TryFrom<GameDocument> for BimatrixGame {
    type Error = QreError;
    fn try_from(doc: GameDocument) -> Result<Self> {
        let a =
            Matrix::from_rows(&doc.payoff_1).ok_or_else(|| QreError::InvalidGame("payoff_1 has ragged rows".into()))?;
        let b =
            Matrix::from_rows(&doc.payoff_2).ok_or_else(|| QreError::InvalidGame("payoff_2 has ragged rows".into()))?;
        let mut g = BimatrixGame::new(doc.labels_1, doc.labels_2, a, b)?;
        g.metadata = doc.metadata;
        Ok(g)
    }
}

impl From<BimatrixGame> for GameDocument {
    fn from(g: BimatrixGame) -> Self {
        GameDocument {
            payoff_1: g.payoff_1.to_rows(),
            payoff_2: g.payoff_2.to_rows(),
            labels_1: g.labels_1,
            labels_2: g.labels_2,
            metadata: g.metadata,
        }
    }
}

impl BimatrixGame {
    pub fn new(labels_1: Vec<Label>, labels_2: Vec<Label>, payoff_1: Matrix, payoff_2: Matrix) -> Result<Self> {
        let (n1, n2) = (labels_1.len(), labels_2.len());
        if n1 < 2 || n2 < 2 {
            return Err(QreError::InvalidGame(format!(
                "each player needs at least two actions, got {n1}x{n2}"
            )));
        }
        for (name, m) in [("payoff_1", &payoff_1), ("payoff_2", &payoff_2)] {
            if m.rows() != n1 || m.cols() != n2 {
                return Err(QreError::DimensionMismatch(format!(
                    "{name} is {}x{}, labels give {n1}x{n2}",
                    m.rows(),
                    m.cols()
                )));
            }
            if !m.all_finite() {
                return Err(QreError::InvalidGame(format!("{name} has non-finite entries")));
            }
        }
        let payoff_2_t = payoff_2.transpose();
        Ok(Self {
            labels_1,
            labels_2,
            payoff_1,
            payoff_2,
            payoff_2_t,
            metadata: Map::new(),
        })
    }

    /// Symmetric game: both players share `labels`, and `u2(k1,k2) = u1(k2,k1)`.
    pub fn symmetric(labels: Vec<Label>, payoff: Matrix) -> Result<Self> {
        if !payoff.is_square() {
            return Err(QreError::DimensionMismatch(
                "symmetric game needs a square matrix".into(),
            ));
        }
        let b = payoff.transpose();
        Self::new(labels.clone(), labels, payoff, b)
    }

    /// Builds a game from a payoff function over label pairs.
    pub fn from_fn(
        labels_1: Vec<Label>,
        labels_2: Vec<Label>,
        mut f: impl FnMut(usize, usize) -> (f64, f64),
    ) -> Result<Self> {
        let (n1, n2) = (labels_1.len(), labels_2.len());
        let mut a = Matrix::zeros(n1, n2);
        let mut b = Matrix::zeros(n1, n2);
        for i in 0..n1 {
            for j in 0..n2 {
                let (x, y) = f(i, j);
                a[(i, j)] = x;
                b[(i, j)] = y;
            }
        }
        Self::new(labels_1, labels_2, a, b)
    }

    pub fn with_metadata(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }

    pub fn metadata(&self) -> &Map<String, Value> {
        &self.metadata
    }

    pub fn metadata_mut(&mut self) -> &mut Map<String, Value> {
        &mut self.metadata
    }

    pub fn labels_1(&self) -> &[Label] {
        &self.labels_1
    }

    pub fn labels_2(&self) -> &[Label] {
        &self.labels_2
    }

    pub fn labels(&self, player: usize) -> &[Label] {
        match player {
            0 => &self.labels_1,
            _ => &self.labels_2,
        }
    }

    pub fn payoff_1(&self) -> &Matrix {
        &self.payoff_1
    }

    pub fn payoff_2(&self) -> &Matrix {
        &self.payoff_2
    }

    /// Player 2's matrix indexed `[k2, k1]`.
    pub fn payoff_2_transposed(&self) -> &Matrix {
        &self.payoff_2_t
    }

    pub fn n1(&self) -> usize {
        self.labels_1.len()
    }

    pub fn n2(&self) -> usize {
        self.labels_2.len()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.n1(), self.n2())
    }

    pub fn max_abs_payoff(&self) -> f64 {
        self.payoff_1.max_abs().max(self.payoff_2.max_abs())
    }

    /// True when labels coincide and `payoff_2` is the transpose of `payoff_1`.
    pub fn is_symmetric(&self) -> bool {
        self.labels_1 == self.labels_2 && self.payoff_1 == self.payoff_2_t
    }

    pub fn uniform_profile(&self) -> MixedProfile {
        let (n1, n2) = self.dims();
        MixedProfile {
            p1: vec![1.0 / n1 as f64; n1],
            p2: vec![1.0 / n2 as f64; n2],
        }
    }

    pub fn check_profile(&self, p: &MixedProfile) -> Result<()> {
        if p.p1.len() != self.n1() || p.p2.len() != self.n2() {
            return Err(QreError::DimensionMismatch(format!(
                "profile is {}+{}, game is {}x{}",
                p.p1.len(),
                p.p2.len(),
                self.n1(),
                self.n2()
            )));
        }
        check_probability(&p.p1, "p1")?;
        check_probability(&p.p2, "p2")
    }

    /// Unchecked kernel: `u1 = A p2`, `u2 = Bᵀ p1`.
    pub(crate) fn payoffs_into(&self, p1: &[f64], p2: &[f64], u1: &mut [f64], u2: &mut [f64]) {
        self.payoff_1.mul_vec_into(p2, u1);
        self.payoff_2_t.mul_vec_into(p1, u2);
    }

    pub fn expected_payoff_vectors(&self, p: &MixedProfile) -> Result<PayoffVectors> {
        self.check_profile(p)?;
        let mut u1 = vec![0.0; self.n1()];
        let mut u2 = vec![0.0; self.n2()];
        self.payoffs_into(&p.p1, &p.p2, &mut u1, &mut u2);
        Ok(PayoffVectors { u1, u2 })
    }

    /// Expected payoff of each player under the profile.
    pub fn expected_values(&self, p: &MixedProfile) -> Result<(f64, f64)> {
        let u = self.expected_payoff_vectors(p)?;
        Ok((dot(&u.u1, &p.p1), dot(&u.u2, &p.p2)))
    }

    /// Best-response index sets of both players against `p`.
    pub fn best_response_set(&self, p: &MixedProfile, tie_tol: f64) -> Result<(Vec<usize>, Vec<usize>)> {
        let u = self.expected_payoff_vectors(p)?;
        Ok((argmax_set(&u.u1, tie_tol), argmax_set(&u.u2, tie_tol)))
    }

    /// Multiplies player i's payoffs by `alpha_i`.
    pub fn rescale_payoffs(&self, alpha_1: f64, alpha_2: f64) -> Result<Self> {
        for a in [alpha_1, alpha_2] {
            if !(a > 0.0 && a.is_finite()) {
                return Err(QreError::InvalidParameter(format!(
                    "rescaling factor must be positive, got {a}"
                )));
            }
        }
        let mut g = Self::new(
            self.labels_1.clone(),
            self.labels_2.clone(),
            self.payoff_1.map(|x| x * alpha_1),
            self.payoff_2.map(|x| x * alpha_2),
        )?;
        g.metadata = self.metadata.clone();
        g.metadata
            .insert("rescaled".into(), serde_json::json!([alpha_1, alpha_2]));
        Ok(g)
    }

    /// Replaces every payoff `x` by `sign(x)·|x|^c`.
    pub fn payoff_power(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(QreError::InvalidParameter(format!(
                "payoff exponent must be positive, got {c}"
            )));
        }
        let f = |x: f64| x.signum() * x.abs().powf(c);
        let mut g = Self::new(
            self.labels_1.clone(),
            self.labels_2.clone(),
            self.payoff_1.map(f),
            self.payoff_2.map(f),
        )?;
        g.metadata = self.metadata.clone();
        g.metadata.insert("payoff_exponent".into(), serde_json::json!(c));
        Ok(g)
    }

    /// Adds a constant to each player's payoffs.
    pub fn shift_payoffs(&self, c1: f64, c2: f64) -> Result<Self> {
        let mut g = Self::new(
            self.labels_1.clone(),
            self.labels_2.clone(),
            self.payoff_1.map(|x| x + c1),
            self.payoff_2.map(|x| x + c2),
        )?;
        g.metadata = self.metadata.clone();
        Ok(g)
    }

    /// All pure-strategy Nash equilibria `(k1, k2)` by exhaustive check.
    pub fn pure_nash_equilibria(&self, tie_tol: f64) -> Vec<(usize, usize)> {
        let (n1, n2) = self.dims();
        let mut out = Vec::new();
        for k1 in 0..n1 {
            for k2 in 0..n2 {
                let best1 = (0..n1)
                    .map(|i| self.payoff_1[(i, k2)])
                    .fold(f64::NEG_INFINITY, f64::max);
                let best2 = self.payoff_2.row(k1).iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if self.payoff_1[(k1, k2)] >= best1 - tie_tol && self.payoff_2[(k1, k2)] >= best2 - tie_tol {
                    out.push((k1, k2));
                }
            }
        }
        out
    }

    /// Index of a label in player i's action set.
    pub fn label_index(&self, player: usize, label: &Label) -> Option<usize> {
        self.labels(player).iter().position(|l| l == label)
    }

    /// Index of the numeric label closest to `value`.
    pub fn numeric_label_index(&self, player: usize, value: f64) -> Option<usize> {
        self.labels(player)
            .iter()
            .enumerate()
            .filter_map(|(i, l)| l.as_f64().map(|x| (i, (x - value).abs())))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .filter(|(_, d)| *d < 1e-9)
            .map(|(i, _)| i)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("game serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| QreError::InvalidGame(e.to_string()))
    }
}

/// Indices within `tie_tol` of the maximum entry.
pub fn argmax_set(u: &[f64], tie_tol: f64) -> Vec<usize> {
    let m = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    u.iter()
        .enumerate()
        .filter(|(_, x)| **x >= m - tie_tol)
        .map(|(i, _)| i)
        .collect()
}

/// First index of the maximum entry.
pub fn argmax(u: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in u.iter().enumerate() {
        if *x > u[best] {
            best = i;
        }
    }
    best
}

/// Mean of numeric labels under `p`. Fails if positive mass sits on a text label.
pub fn label_mean(labels: &[Label], p: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for (l, w) in labels.iter().zip(p) {
        match l.as_f64() {
            Some(x) => s += x * w,
            None if *w > 0.0 => {
                return Err(QreError::InvalidParameter(format!(
                    "non-numeric label {l} carries weight {w}"
                )))
            }
            None => {}
        }
    }
    Ok(s)
}
