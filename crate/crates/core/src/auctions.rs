//! Two-bidder first-price and all-pay auctions over bid-function strategies.
//!
//! Values are lognormal, `v = exp(σ z)` with `z` standard normal, and
//! expectations over own value use a Gauss–Hermite rule. The opponent's
//! value is integrated in closed form through the normal CDF.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{QreError, Result};
use crate::game::{label_mean, BimatrixGame, Label};
use crate::linalg::Matrix;

/// Default number of quadrature nodes.
pub const DEFAULT_QUADRATURE_NODES: usize = 201;

/// Smallest accepted quadrature size.
pub const MIN_QUADRATURE_NODES: usize = 51;

/// Largest accepted quadrature size; beyond it the recurrence overflows.
pub const MAX_QUADRATURE_NODES: usize = 601;

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

fn phi(x: f64) -> f64 {
    if x == f64::INFINITY {
        1.0
    } else if x == f64::NEG_INFINITY {
        0.0
    } else {
        std_normal().cdf(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuctionFormat {
    /// Winner pays own bid.
    FirstPrice,
    /// Both bidders pay their bids.
    AllPay,
}

/// Gauss–Hermite rule for a standard normal variable: nodes `z` and
/// positive weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalQuadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl NormalQuadrature {
    /// `n`-point rule, exact for polynomials in `z` of degree `2n - 1`.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUADRATURE_NODES {
            return Err(QreError::InvalidParameter(format!(
                "quadrature nodes must lie in 1..={MAX_QUADRATURE_NODES}, got {n}"
            )));
        }
        let (x, w) = hermite_physicists(n);
        let total: f64 = w.iter().sum();
        Ok(Self {
            nodes: x.iter().map(|x| x * std::f64::consts::SQRT_2).collect(),
            weights: w.iter().map(|w| w / total).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn expect(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(z, w)| w * f(*z)).sum()
    }
}

/// Orthonormal Hermite value `h_n(x)` and derivative, for the weight `exp(-x²)`.
fn hermite_eval(n: usize, x: f64) -> (f64, f64) {
    const PIM4: f64 = 0.751_125_544_464_942_5;
    let mut p1 = PIM4;
    let mut p2 = 0.0;
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = x * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
    }
    (p1, (2.0 * n as f64).sqrt() * p2)
}

/// Roots and weights for the weight `exp(-x²)`. Positive roots are bracketed
/// by a scan finer than the smallest root gap and refined by bisection.
/// Nodes are returned in decreasing order.
fn hermite_physicists(n: usize) -> (Vec<f64>, Vec<f64>) {
    let nf = n as f64;
    let upper = (2.0 * nf + 1.0).sqrt() + 1.0;
    let h = 0.05 * std::f64::consts::PI / (2.0 * nf + 1.0).sqrt();
    let mut positive = Vec::with_capacity(n / 2);
    let mut a = h / 2.0;
    let mut fa = hermite_eval(n, a).0;
    while a < upper && positive.len() < n / 2 {
        let b = a + h;
        let fb = hermite_eval(n, b).0;
        if fa.signum() != fb.signum() {
            let (mut lo, mut hi, flo) = (a, b, fa);
            while hi - lo > f64::EPSILON * hi {
                let mid = 0.5 * (lo + hi);
                let fm = hermite_eval(n, mid).0;
                if fm.signum() == flo.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            positive.push(0.5 * (lo + hi));
        }
        a = b;
        fa = fb;
    }
    assert_eq!(positive.len(), n / 2, "hermite root scan missed a root");
    let weight = |x: f64| {
        let d = hermite_eval(n, x).1;
        2.0 / (d * d)
    };
    let mut x: Vec<f64> = positive.iter().rev().copied().collect();
    if n % 2 == 1 {
        x.push(0.0);
    }
    x.extend(positive.iter().map(|r| -r));
    let w = x.iter().map(|r| weight(*r)).collect();
    (x, w)
}

/// `(value, weight)` pairs representing `v = exp(σ z)`.
pub fn value_quadrature(sigma: f64, nodes: usize) -> Result<Vec<(f64, f64)>> {
    check_sigma(sigma)?;
    let q = NormalQuadrature::new(nodes)?;
    Ok(q.nodes
        .iter()
        .zip(&q.weights)
        .map(|(z, w)| ((sigma * z).exp(), *w))
        .collect())
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(QreError::InvalidParameter(format!(
            "sigma must be positive, got {sigma}"
        )))
    }
}

/// A bidding strategy `b(v)`, nonnegative and nondecreasing in the value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BidFunction {
    /// `b(v) = λ v`.
    Linear { lambda: f64 },
    /// Symmetric Bayesian all-pay equilibrium bid for lognormal values with
    /// log-dispersion `sigma`: `b(v) = ∫₀^v w f(w) dw`.
    BayesianAllPay { sigma: f64 },
    /// Piecewise linear through `(values[k], bids[k])`, flat outside the table.
    Tabulated {
        name: String,
        values: Vec<f64>,
        bids: Vec<f64>,
    },
}

impl BidFunction {
    pub fn linear(lambda: f64) -> Self {
        BidFunction::Linear { lambda }
    }

    pub fn bayesian_allpay(sigma: f64) -> Self {
        BidFunction::BayesianAllPay { sigma }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            BidFunction::Linear { lambda } if !(*lambda >= 0.0 && lambda.is_finite()) => Err(
                QreError::InvalidParameter(format!("shading must be nonnegative, got {lambda}")),
            ),
            BidFunction::BayesianAllPay { sigma } => check_sigma(*sigma),
            BidFunction::Tabulated { values, bids, .. } => {
                if values.len() != bids.len() || values.len() < 2 {
                    return Err(QreError::InvalidParameter(
                        "tabulated bids need at least two matching points".into(),
                    ));
                }
                if values.windows(2).any(|w| w[1] <= w[0]) || values[0] < 0.0 {
                    return Err(QreError::InvalidParameter(
                        "tabulated values must be nonnegative and increasing".into(),
                    ));
                }
                if bids.windows(2).any(|w| w[1] < w[0]) || bids[0] < 0.0 || bids.iter().any(|b| !b.is_finite()) {
                    return Err(QreError::InvalidParameter(
                        "tabulated bids must be nonnegative and nondecreasing".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Action label: the shading factor for linear bids, a name otherwise.
    pub fn label(&self) -> Label {
        match self {
            BidFunction::Linear { lambda } => Label::Num(*lambda),
            BidFunction::BayesianAllPay { sigma } => Label::text(format!("beq_{sigma}")),
            BidFunction::Tabulated { name, .. } => Label::text(name.clone()),
        }
    }

    pub fn bid(&self, v: f64) -> f64 {
        match self {
            BidFunction::Linear { lambda } => lambda * v,
            BidFunction::BayesianAllPay { sigma } => {
                if v <= 0.0 {
                    0.0
                } else {
                    (sigma * sigma / 2.0).exp() * phi((v.ln() - sigma * sigma) / sigma)
                }
            }
            BidFunction::Tabulated { values, bids, .. } => {
                let k = values.partition_point(|x| *x <= v);
                if k == 0 {
                    bids[0]
                } else if k == values.len() {
                    bids[k - 1]
                } else {
                    let t = (v - values[k - 1]) / (values[k] - values[k - 1]);
                    bids[k - 1] + t * (bids[k] - bids[k - 1])
                }
            }
        }
    }

    /// Threshold `t` on log-value with `b(v) < bid ⇔ ln v < t`.
    pub fn log_value_threshold(&self, bid: f64) -> f64 {
        if bid <= 0.0 {
            return f64::NEG_INFINITY;
        }
        match self {
            BidFunction::Linear { lambda } => {
                if *lambda == 0.0 {
                    f64::INFINITY
                } else {
                    (bid / lambda).ln()
                }
            }
            BidFunction::BayesianAllPay { sigma } => {
                let cap = (sigma * sigma / 2.0).exp();
                if bid >= cap {
                    f64::INFINITY
                } else {
                    sigma * sigma + sigma * std_normal().inverse_cdf(bid / cap)
                }
            }
            BidFunction::Tabulated { values, bids, .. } => {
                if bid <= bids[0] {
                    return f64::NEG_INFINITY;
                }
                let k = bids.partition_point(|b| *b < bid);
                if k == bids.len() {
                    return f64::INFINITY;
                }
                let t = (bid - bids[k - 1]) / (bids[k] - bids[k - 1]);
                (values[k - 1] + t * (values[k] - values[k - 1])).ln()
            }
        }
    }

    /// Samples this bid function at `values`.
    pub fn tabulate(&self, name: impl Into<String>, values: &[f64]) -> Self {
        BidFunction::Tabulated {
            name: name.into(),
            values: values.to_vec(),
            bids: values.iter().map(|v| self.bid(*v)).collect(),
        }
    }
}

/// The equilibrium bid of the symmetric all-pay auction, tabulated on the
/// value nodes of the matching quadrature rule.
pub fn bayesian_allpay_bid(sigma: f64, nodes: usize) -> Result<BidFunction> {
    let mut values: Vec<f64> = value_quadrature(sigma, nodes)?.into_iter().map(|(v, _)| v).collect();
    values.sort_by(f64::total_cmp);
    Ok(BidFunction::bayesian_allpay(sigma).tabulate(format!("beq_{sigma}_tab"), &values))
}

/// One component of a value-dispersion mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaComponent {
    pub sigma: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuctionSpec {
    pub format: AuctionFormat,
    /// Dispersion components; a single entry of weight 1 for a known `σ`.
    pub sigma: Vec<SigmaComponent>,
    /// Grid step; strategies are `λ = kδ` for `kδ < 1`.
    pub grid_delta: f64,
    /// Strategies appended after the grid.
    pub extra_strategies: Vec<BidFunction>,
    pub quadrature_nodes: usize,
}

impl AuctionSpec {
    pub fn new(format: AuctionFormat, sigma: f64, grid_delta: f64) -> Self {
        Self {
            format,
            sigma: vec![SigmaComponent { sigma, weight: 1.0 }],
            grid_delta,
            extra_strategies: Vec::new(),
            quadrature_nodes: DEFAULT_QUADRATURE_NODES,
        }
    }

    /// First-price auction where `σ` is 0.05 or 0.5 with equal probability.
    pub fn dispersion_uncertainty(grid_delta: f64) -> Self {
        Self::new(AuctionFormat::FirstPrice, 0.05, grid_delta).with_mixture(vec![
            SigmaComponent {
                sigma: 0.05,
                weight: 0.5,
            },
            SigmaComponent {
                sigma: 0.5,
                weight: 0.5,
            },
        ])
    }

    pub fn with_mixture(mut self, components: Vec<SigmaComponent>) -> Self {
        self.sigma = components;
        self
    }

    pub fn with_extra(mut self, bid: BidFunction) -> Self {
        self.extra_strategies.push(bid);
        self
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.quadrature_nodes = nodes;
        self
    }

    /// Shading grid `{0, δ, 2δ, …} ∩ [0, 1)`, rounded to ten decimals.
    pub fn grid(&self) -> Vec<f64> {
        let k = (1.0 / self.grid_delta - 1e-9).ceil() as usize;
        (0..k)
            .map(|i| ((i as f64 * self.grid_delta) * 1e10).round() / 1e10)
            .collect()
    }

    pub fn strategies(&self) -> Vec<BidFunction> {
        self.grid()
            .into_iter()
            .map(BidFunction::linear)
            .chain(self.extra_strategies.iter().cloned())
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.grid_delta > 0.0 && self.grid_delta < 1.0) {
            return Err(QreError::InvalidParameter(format!(
                "grid step must lie in (0, 1), got {}",
                self.grid_delta
            )));
        }
        if self.sigma.is_empty() {
            return Err(QreError::InvalidParameter(
                "at least one sigma component is required".into(),
            ));
        }
        for c in &self.sigma {
            check_sigma(c.sigma)?;
            if !(c.weight > 0.0) {
                return Err(QreError::InvalidParameter("mixture weights must be positive".into()));
            }
        }
        let total: f64 = self.sigma.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(QreError::InvalidParameter(format!(
                "mixture weights sum to {total}, not 1"
            )));
        }
        let nodes = self.quadrature_nodes;
        if !(MIN_QUADRATURE_NODES..=MAX_QUADRATURE_NODES).contains(&nodes) || nodes.is_multiple_of(2) {
            return Err(QreError::InvalidParameter(format!(
                "quadrature nodes must be odd and within {MIN_QUADRATURE_NODES}..={MAX_QUADRATURE_NODES}, got {}",
                self.quadrature_nodes
            )));
        }
        for b in &self.extra_strategies {
            b.validate()?;
        }
        Ok(())
    }
}

/// Expected payoff to a bidder using `own` against `other` when values have
/// log-dispersion `sigma`. The higher bid wins; if both use the same bid
/// function the higher value wins.
pub fn bid_payoff(
    format: AuctionFormat,
    own: &BidFunction,
    other: &BidFunction,
    sigma: f64,
    q: &NormalQuadrature,
) -> f64 {
    let same = own == other;
    q.expect(|z| {
        let v = (sigma * z).exp();
        let b = own.bid(v);
        let win = if same {
            phi(z)
        } else {
            phi(other.log_value_threshold(b) / sigma)
        };
        match format {
            AuctionFormat::FirstPrice => (v - b) * win,
            AuctionFormat::AllPay => v * win - b,
        }
    })
}

/// Symmetric payoff matrix over the grid and extra strategies.
pub fn auction_payoff_matrix(spec: &AuctionSpec) -> Result<BimatrixGame> {
    spec.validate()?;
    let strategies = spec.strategies();
    let n = strategies.len();
    let q = NormalQuadrature::new(spec.quadrature_nodes)?;
    let cells: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|c| {
            let (i, j) = (c / n, c % n);
            spec.sigma
                .iter()
                .map(|comp| comp.weight * bid_payoff(spec.format, &strategies[i], &strategies[j], comp.sigma, &q))
                .sum()
        })
        .collect();
    let a = Matrix::from_fn(n, n, |i, j| cells[i * n + j]);
    let labels = strategies.iter().map(BidFunction::label).collect();
    Ok(BimatrixGame::symmetric(labels, a)?
        .with_metadata("family", "auction")
        .with_metadata("tremble_distance", "index_difference")
        .with_metadata("spec", serde_json::to_value(spec).expect("spec serializes")))
}

/// `E[e^{σz} 1{z - z' > c}]` for independent standard normals.
fn win_value_term(sigma: f64, c: f64) -> f64 {
    (sigma * sigma / 2.0).exp() * phi((sigma - c) / std::f64::consts::SQRT_2)
}

/// Closed-form `(u1, u2)` for linear bids `λ1 v` against `λ2 v`.
pub fn closed_form_linear_payoff(format: AuctionFormat, lambda_1: f64, lambda_2: f64, sigma: f64) -> (f64, f64) {
    let one = |l1: f64, l2: f64| {
        let c = if l1 == l2 { 0.0 } else { (l2 / l1).ln() / sigma };
        let w = win_value_term(sigma, c);
        match format {
            AuctionFormat::FirstPrice => (1.0 - l1) * w,
            AuctionFormat::AllPay => w - l1 * (sigma * sigma / 2.0).exp(),
        }
    };
    (one(lambda_1, lambda_2), one(lambda_2, lambda_1))
}

/// Mean shading factor under a distribution over numeric grid labels.
pub fn expected_shading(labels: &[Label], p: &[f64]) -> Result<f64> {
    label_mean(labels, p)
}
