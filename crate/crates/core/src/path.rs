//! The evolutionary path: raise precision in steps of ν, re-iterate the
//! logit-response dynamics from the previous limit, and stop at the first
//! step that fails to converge to a locally stable point.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::choice::ChoiceModel;
use crate::dynamics::{
    classify_stability, iterate_unchecked, solve_qre_damped, IterationOptions, IterationStatus, StabilityOptions,
};
use crate::error::{QreError, Result};
use crate::format::fmt_g9;
use crate::game::{BimatrixGame, MixedProfile};

/// Default precision increment.
pub const DEFAULT_NU: f64 = 0.01;

/// Numerator of the automatic step rule `ν = AUTO_NU_SCALE / max|u|`.
pub const AUTO_NU_SCALE: f64 = 0.04;

/// Number of ν increments after which a still-stable path is reported as capped.
pub const DEFAULT_CAP_STEPS: usize = 20000;

/// Precision increment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NuRule {
    /// `AUTO_NU_SCALE / max|u|`, invariant under a common payoff rescaling.
    Auto,
    Fixed(f64),
}

impl Default for NuRule {
    fn default() -> Self {
        NuRule::Fixed(DEFAULT_NU)
    }
}

impl NuRule {
    pub fn resolve(&self, game: &BimatrixGame) -> Result<f64> {
        let nu = match *self {
            NuRule::Auto => {
                let m = game.max_abs_payoff();
                if m == 0.0 {
                    return Err(QreError::InvalidGame("all payoffs are zero".into()));
                }
                AUTO_NU_SCALE / m
            }
            NuRule::Fixed(nu) => nu,
        };
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(QreError::InvalidParameter(format!("nu must be positive, got {nu}")));
        }
        Ok(nu)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PathOptions {
    pub nu: NuRule,
    /// Largest precision attempted. Defaults to `DEFAULT_CAP_STEPS · ν`.
    pub beta_cap: Option<f64>,
    pub iteration: IterationOptions,
    pub stability: StabilityOptions,
}

impl PathOptions {
    pub fn with_nu(mut self, nu: NuRule) -> Self {
        self.nu = nu;
        self
    }

    pub fn with_beta_cap(mut self, cap: f64) -> Self {
        self.beta_cap = Some(cap);
        self
    }
}

/// A stable QRE on the path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QrePoint {
    pub beta: f64,
    pub profile: MixedProfile,
    pub spectral_radius: f64,
    pub stable: bool,
}

/// Limit precision. A path that stays stable up to the cap is reported as
/// unbounded together with the cap; it is never asserted to be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaStar {
    Finite(f64),
    Unbounded { cap: f64 },
}

impl BetaStar {
    pub fn finite(&self) -> Option<f64> {
        match self {
            BetaStar::Finite(b) => Some(*b),
            BetaStar::Unbounded { .. } => None,
        }
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(self, BetaStar::Unbounded { .. })
    }
}

impl std::fmt::Display for BetaStar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BetaStar::Finite(b) => f.write_str(&fmt_g9(*b)),
            BetaStar::Unbounded { .. } => f.write_str("unbounded"),
        }
    }
}

impl Serialize for BetaStar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BetaStar::Finite(b) => s.serialize_f64(*b),
            BetaStar::Unbounded { .. } => s.serialize_str("unbounded"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Instability,
    Nonconvergence,
    BetaCapReached,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Termination::Instability => "instability",
            Termination::Nonconvergence => "nonconvergence",
            Termination::BetaCapReached => "beta_cap_reached",
        })
    }
}

/// The step that ended the path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RejectedStep {
    pub beta: f64,
    pub iteration_status: IterationStatus,
    pub iterations_used: usize,
    pub residual: f64,
    /// Radius at the converged point, when the iteration converged.
    pub spectral_radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolutionaryPathResult {
    pub points: Vec<QrePoint>,
    pub beta_star: BetaStar,
    pub p_star: MixedProfile,
    pub termination: Termination,
    pub nu: f64,
    pub beta_cap: f64,
    pub rejected: Option<RejectedStep>,
}

impl EvolutionaryPathResult {
    /// `β*`, or the cap when the path never lost stability.
    pub fn beta_reached(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.beta)
    }

    pub fn last_point(&self) -> &QrePoint {
        self.points.last().expect("path always holds the starting point")
    }
}

/// Runs the evolutionary path from `(0, uniform)`.
///
/// Step `k` uses `β_k = k·ν` exactly, so `β*` is a multiple of `ν`. A step is
/// accepted only if the iteration converges and the limit is strictly stable;
/// marginal radii stop the path.
pub fn evolutionary_path(
    game: &BimatrixGame,
    model: ChoiceModel,
    opts: &PathOptions,
) -> Result<EvolutionaryPathResult> {
    model.validate()?;
    let nu = opts.nu.resolve(game)?;
    let cap_steps = match opts.beta_cap {
        None => DEFAULT_CAP_STEPS,
        Some(cap) if cap > 0.0 => (cap / nu + 1e-9).floor() as usize,
        Some(cap) => {
            return Err(QreError::InvalidParameter(format!(
                "beta cap must be positive, got {cap}"
            )))
        }
    };
    let beta_cap = cap_steps as f64 * nu;
    let start = game.uniform_profile();
    let mut points = vec![QrePoint {
        beta: 0.0,
        profile: start.clone(),
        spectral_radius: 0.0,
        stable: true,
    }];
    for k in 1..=cap_steps {
        let beta = k as f64 * nu;
        let prev = &points.last().expect("nonempty").profile;
        let out = iterate_unchecked(game, prev, beta, model, &opts.iteration);
        let mut rejected = RejectedStep {
            beta,
            iteration_status: out.status,
            iterations_used: out.iterations_used,
            residual: out.residual,
            spectral_radius: None,
        };
        let termination = if out.converged() {
            match classify_stability(game, &out.final_profile, beta, model, &opts.stability) {
                Ok(report) if report.stable => {
                    points.push(QrePoint {
                        beta,
                        profile: out.final_profile,
                        spectral_radius: report.spectral_radius,
                        stable: true,
                    });
                    continue;
                }
                Ok(report) => {
                    rejected.spectral_radius = Some(report.spectral_radius);
                    Termination::Instability
                }
                Err(_) => Termination::Nonconvergence,
            }
        } else {
            Termination::Nonconvergence
        };
        let last = points.last().expect("nonempty");
        return Ok(EvolutionaryPathResult {
            beta_star: BetaStar::Finite(last.beta),
            p_star: last.profile.clone(),
            termination,
            nu,
            beta_cap,
            rejected: Some(rejected),
            points,
        });
    }
    let last = points.last().expect("nonempty");
    Ok(EvolutionaryPathResult {
        beta_star: BetaStar::Unbounded { cap: beta_cap },
        p_star: last.profile.clone(),
        termination: Termination::BetaCapReached,
        nu,
        beta_cap,
        rejected: None,
        points,
    })
}

/// Settings for [`thick_barrier_scan`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierScanOptions {
    pub beta_max: f64,
    /// Grid step above `β*`. Defaults to the path's ν.
    pub step: Option<f64>,
    /// Iteration settings per grid point; the budget is smaller than for the
    /// path because unstable grid points are expected.
    pub iteration: IterationOptions,
    pub stability: StabilityOptions,
    /// Bisection rounds between the last failing and first passing grid points.
    pub refine_rounds: usize,
}

impl Default for BarrierScanOptions {
    fn default() -> Self {
        Self {
            beta_max: 50.0,
            step: None,
            iteration: IterationOptions::default().with_max_iter(20_000),
            stability: StabilityOptions::default(),
            refine_rounds: 0,
        }
    }
}

/// Restabilization precision `β̄̄`: the smallest grid precision above `β*`
/// at which undamped iteration started from `p*` converges to a stable QRE.
pub fn thick_barrier_scan(
    game: &BimatrixGame,
    result: &EvolutionaryPathResult,
    model: ChoiceModel,
    opts: &BarrierScanOptions,
) -> Result<Option<f64>> {
    let beta_star = match (result.termination, result.beta_star) {
        (Termination::BetaCapReached, _) | (_, BetaStar::Unbounded { .. }) => {
            return Err(QreError::InvalidParameter(
                "barrier scan needs a path that lost stability".into(),
            ))
        }
        (_, BetaStar::Finite(b)) => b,
    };
    let step = opts.step.unwrap_or(result.nu);
    if !(step > 0.0) {
        return Err(QreError::InvalidParameter(format!(
            "scan step must be positive, got {step}"
        )));
    }
    let restabilizes =
        |beta: f64| restabilizes_from(game, &result.p_star, beta, model, &opts.iteration, &opts.stability);
    let mut k = 1usize;
    loop {
        let beta = beta_star + k as f64 * step;
        if beta > opts.beta_max + 1e-12 {
            return Ok(None);
        }
        if restabilizes(beta) {
            let (mut lo, mut hi) = (beta - step, beta);
            for _ in 0..opts.refine_rounds {
                let mid = 0.5 * (lo + hi);
                if restabilizes(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(Some(hi));
        }
        k += 1;
    }
}

/// True when undamped iteration from `p` converges at `beta` to a stable point.
pub fn restabilizes_from(
    game: &BimatrixGame,
    p: &MixedProfile,
    beta: f64,
    model: ChoiceModel,
    iteration: &IterationOptions,
    stability: &StabilityOptions,
) -> bool {
    let out = iterate_unchecked(game, p, beta, model, iteration);
    out.converged() && classify_stability(game, &out.final_profile, beta, model, stability).is_ok_and(|r| r.stable)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NuRobustnessRow {
    pub nu: f64,
    pub beta_star: BetaStar,
    pub termination: Termination,
    /// L-infinity distance of this run's `p*` to the finest run's `p*`.
    pub drift: f64,
}

/// Runs the path at `ν0, ν0/2, …, ν0/2^halvings` with a common precision cap.
pub fn nu_robustness(
    game: &BimatrixGame,
    model: ChoiceModel,
    nu0: f64,
    halvings: usize,
    opts: &PathOptions,
) -> Result<Vec<NuRobustnessRow>> {
    if halvings == 0 {
        return Err(QreError::InvalidParameter("need at least one halving".into()));
    }
    if !(nu0 > 0.0) {
        return Err(QreError::InvalidParameter(format!("nu0 must be positive, got {nu0}")));
    }
    let cap = opts.beta_cap.unwrap_or(DEFAULT_CAP_STEPS as f64 * nu0);
    let runs: Vec<EvolutionaryPathResult> = (0..=halvings)
        .into_par_iter()
        .map(|h| {
            let o = PathOptions {
                nu: NuRule::Fixed(nu0 / f64::powi(2.0, h as i32)),
                beta_cap: Some(cap),
                ..*opts
            };
            evolutionary_path(game, model, &o)
        })
        .collect::<Result<_>>()?;
    let finest = &runs.last().expect("at least two runs").p_star;
    Ok(runs
        .iter()
        .map(|r| NuRobustnessRow {
            nu: r.nu,
            beta_star: r.beta_star,
            termination: r.termination,
            drift: r.p_star.linf_distance(finest),
        })
        .collect())
}

/// A point on the principal QRE branch found by damped continuation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchPoint {
    pub beta: f64,
    pub profile: Option<MixedProfile>,
    pub spectral_radius: Option<f64>,
}

/// Follows the QRE branch from the uniform profile over an increasing
/// precision grid, solving each point by damped iteration seeded with the
/// previous one. Points where the damped solver fails carry no profile and
/// the continuation restarts from the last success.
pub fn branch_radius(
    game: &BimatrixGame,
    model: ChoiceModel,
    betas: &[f64],
    damping: f64,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<BranchPoint>> {
    let mut seed = game.uniform_profile();
    let stability = StabilityOptions {
        fixed_point_tol: 10.0 * tol,
        ..StabilityOptions::default()
    };
    let mut out = Vec::with_capacity(betas.len());
    for &beta in betas {
        let sol = solve_qre_damped(game, &seed, beta, model, damping, tol, max_iter)?;
        if sol.converged() {
            let report = classify_stability(game, &sol.final_profile, beta, model, &stability)?;
            seed = sol.final_profile.clone();
            out.push(BranchPoint {
                beta,
                profile: Some(sol.final_profile),
                spectral_radius: Some(report.spectral_radius),
            });
        } else {
            out.push(BranchPoint {
                beta,
                profile: None,
                spectral_radius: None,
            });
        }
    }
    Ok(out)
}

/// First grid precision whose branch radius exceeds 1.
pub fn first_unstable_beta(branch: &[BranchPoint]) -> Option<f64> {
    branch
        .iter()
        .find(|b| b.spectral_radius.is_some_and(|r| r > 1.0))
        .map(|b| b.beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::numeric_labels;
    use crate::linalg::Matrix;

    fn coordination() -> BimatrixGame {
        BimatrixGame::symmetric(
            numeric_labels([0.0, 1.0]),
            Matrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap(),
        )
        .unwrap()
    }

    fn rps() -> BimatrixGame {
        BimatrixGame::symmetric(
            numeric_labels([0.0, 1.0, 2.0]),
            Matrix::from_rows(&[vec![0.0, -1.0, 1.0], vec![1.0, 0.0, -1.0], vec![-1.0, 1.0, 0.0]]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn auto_nu_is_scale_invariant() {
        let g = coordination();
        let nu = NuRule::Auto.resolve(&g).unwrap();
        assert!((nu - 0.02).abs() < 1e-15);
        let g2 = g.rescale_payoffs(4.0, 4.0).unwrap();
        assert!((NuRule::Auto.resolve(&g2).unwrap() * 4.0 - nu).abs() < 1e-15);
        assert!(NuRule::Fixed(-1.0).resolve(&g).is_err());
    }

    #[test]
    fn dominance_solvable_game_reaches_cap() {
        let g = coordination();
        let r = evolutionary_path(&g, ChoiceModel::Logit, &PathOptions::default().with_beta_cap(20.0)).unwrap();
        assert_eq!(r.termination, Termination::BetaCapReached);
        assert!(r.beta_star.is_unbounded());
        assert!(r.p_star.p1[0] > 0.99);
        assert!(r.points.iter().all(|p| p.stable));
        assert!((r.beta_cap - 20.0).abs() < 1e-9);
    }

    #[test]
    fn rps_path_is_bounded() {
        let g = rps();
        let r = evolutionary_path(&g, ChoiceModel::Logit, &PathOptions::default()).unwrap();
        assert_ne!(r.termination, Termination::BetaCapReached);
        let b = r.beta_star.finite().unwrap();
        // Radius at the uniform profile is β/√3.
        assert!((b - 3f64.sqrt()).abs() <= 2.0 * r.nu, "{b}");
        let k = (b / r.nu).round();
        assert_eq!(k * r.nu, b);
    }

    #[test]
    fn points_increase_by_nu() {
        let r = evolutionary_path(&rps(), ChoiceModel::Logit, &PathOptions::default()).unwrap();
        for (i, p) in r.points.iter().enumerate() {
            assert_eq!(p.beta, i as f64 * r.nu);
        }
    }

    #[test]
    fn barrier_scan_requires_finite_path() {
        let g = coordination();
        let r = evolutionary_path(&g, ChoiceModel::Logit, &PathOptions::default().with_beta_cap(1.0)).unwrap();
        assert!(thick_barrier_scan(&g, &r, ChoiceModel::Logit, &BarrierScanOptions::default()).is_err());
    }

    #[test]
    fn rps_never_restabilizes() {
        let g = rps();
        let r = evolutionary_path(&g, ChoiceModel::Logit, &PathOptions::default()).unwrap();
        let opts = BarrierScanOptions {
            beta_max: 3.0,
            step: Some(0.25),
            ..BarrierScanOptions::default()
        };
        assert_eq!(thick_barrier_scan(&g, &r, ChoiceModel::Logit, &opts).unwrap(), None);
    }

    #[test]
    fn branch_crossing_matches_rps_threshold() {
        let g = rps();
        let betas: Vec<f64> = (1..=100).map(|k| k as f64 * 0.02).collect();
        let branch = branch_radius(&g, ChoiceModel::Logit, &betas, 0.5, 1e-12, 100_000).unwrap();
        let b = first_unstable_beta(&branch).unwrap();
        assert!((b - 3f64.sqrt()).abs() < 0.03);
    }
}
