//! Logit-response dynamics: the response map, its iteration, Jacobians,
//! local stability and best-response cycles.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::choice::{choice_into, ChoiceModel};
use crate::error::{QreError, Result};
use crate::game::{argmax, BimatrixGame, MixedProfile};
use crate::linalg::{spectral_radius, Matrix};

/// Convergence and cycle-detection settings for [`iterate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationOptions {
    /// L-infinity step size at which the iteration counts as converged.
    pub tol: f64,
    pub max_iter: usize,
    /// Number of past iterates searched for a repeat. Zero disables cycle detection.
    pub cycle_window: usize,
    pub cycle_tol: f64,
}

impl Default for IterationOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 200_000,
            cycle_window: 1000,
            cycle_tol: 1e-8,
        }
    }
}

impl IterationOptions {
    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(QreError::InvalidParameter(
                "iteration needs tol > 0 and max_iter >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IterationStatus {
    Converged,
    CycleDetected,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationOutcome {
    pub status: IterationStatus,
    pub final_profile: MixedProfile,
    pub iterations_used: usize,
    /// L-infinity norm of the last step `φ(p) - p`.
    pub residual: f64,
    pub cycle_period: Option<usize>,
}

impl IterationOutcome {
    pub fn converged(&self) -> bool {
        self.status == IterationStatus::Converged
    }
}

/// Reusable buffers for repeated application of `φ_β`.
pub(crate) struct ResponseMap<'a> {
    game: &'a BimatrixGame,
    beta: f64,
    model: ChoiceModel,
    u1: Vec<f64>,
    u2: Vec<f64>,
}

impl<'a> ResponseMap<'a> {
    pub(crate) fn new(game: &'a BimatrixGame, beta: f64, model: ChoiceModel) -> Self {
        Self {
            game,
            beta,
            model,
            u1: vec![0.0; game.n1()],
            u2: vec![0.0; game.n2()],
        }
    }

    pub(crate) fn apply(&mut self, p1: &[f64], p2: &[f64], out1: &mut [f64], out2: &mut [f64]) {
        self.game.payoffs_into(p1, p2, &mut self.u1, &mut self.u2);
        choice_into(&self.u1, self.beta, self.model, out1);
        choice_into(&self.u2, self.beta, self.model, out2);
    }

    pub(crate) fn payoffs(&self) -> (&[f64], &[f64]) {
        (&self.u1, &self.u2)
    }
}

fn check_inputs(game: &BimatrixGame, p: &MixedProfile, beta: f64, model: ChoiceModel) -> Result<()> {
    game.check_profile(p)?;
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(QreError::InvalidParameter(format!(
            "precision must be nonnegative, got {beta}"
        )));
    }
    model.validate()
}

/// One application of the response map `φ_β`.
pub fn logit_response(game: &BimatrixGame, p: &MixedProfile, beta: f64, model: ChoiceModel) -> Result<MixedProfile> {
    check_inputs(game, p, beta, model)?;
    let mut out = game.uniform_profile();
    ResponseMap::new(game, beta, model).apply(&p.p1, &p.p2, &mut out.p1, &mut out.p2);
    Ok(out)
}

/// `‖φ_β(p) - p‖∞`.
pub fn fixed_point_residual(game: &BimatrixGame, p: &MixedProfile, beta: f64, model: ChoiceModel) -> Result<f64> {
    Ok(logit_response(game, p, beta, model)?.linf_distance(p))
}

const CYCLE_CHECK_STRIDE: usize = 8;
const PLATEAU_RATIO: f64 = 0.999;

/// Iterates `φ_β` from `p0` until convergence, a detected cycle, or the budget runs out.
///
/// A cycle is reported when the current iterate matches one from the history
/// window (lag at least 2) within `cycle_tol` while the step size stays on a
/// plateau, which separates genuine limit cycles from slowly damped
/// oscillations.
pub fn iterate(
    game: &BimatrixGame,
    p0: &MixedProfile,
    beta: f64,
    model: ChoiceModel,
    opts: &IterationOptions,
) -> Result<IterationOutcome> {
    check_inputs(game, p0, beta, model)?;
    opts.validate()?;
    Ok(iterate_unchecked(game, p0, beta, model, opts))
}

pub(crate) fn iterate_unchecked(
    game: &BimatrixGame,
    p0: &MixedProfile,
    beta: f64,
    model: ChoiceModel,
    opts: &IterationOptions,
) -> IterationOutcome {
    let mut map = ResponseMap::new(game, beta, model);
    let mut cur = p0.clone();
    let mut next = p0.clone();
    let window = opts.cycle_window;
    let mut history: VecDeque<Vec<f64>> = VecDeque::with_capacity(window + 1);
    let mut residuals: VecDeque<f64> = VecDeque::with_capacity(2 * window + 1);
    let mut residual = f64::INFINITY;
    for n in 1..=opts.max_iter {
        map.apply(&cur.p1, &cur.p2, &mut next.p1, &mut next.p2);
        residual = cur.linf_distance(&next);
        std::mem::swap(&mut cur, &mut next);
        if residual <= opts.tol {
            return IterationOutcome {
                status: IterationStatus::Converged,
                final_profile: cur,
                iterations_used: n,
                residual,
                cycle_period: None,
            };
        }
        if window == 0 {
            continue;
        }
        if residual > opts.cycle_tol && n % CYCLE_CHECK_STRIDE == 0 {
            if let Some(period) = find_repeat(&history, &cur, opts.cycle_tol) {
                if residual_plateau(&residuals, residual, period, window) {
                    return IterationOutcome {
                        status: IterationStatus::CycleDetected,
                        final_profile: cur,
                        iterations_used: n,
                        residual,
                        cycle_period: Some(period),
                    };
                }
            }
        }
        let mut slot = if history.len() == window {
            history.pop_front().unwrap_or_default()
        } else {
            Vec::with_capacity(cur.p1.len() + cur.p2.len())
        };
        slot.clear();
        slot.extend_from_slice(&cur.p1);
        slot.extend_from_slice(&cur.p2);
        history.push_back(slot);
        if residuals.len() == 2 * window {
            residuals.pop_front();
        }
        residuals.push_back(residual);
    }
    IterationOutcome {
        status: IterationStatus::BudgetExhausted,
        final_profile: cur,
        iterations_used: opts.max_iter,
        residual,
        cycle_period: None,
    }
}

/// Smallest lag `L >= 2` such that the iterate `L` steps back matches `cur`.
fn find_repeat(history: &VecDeque<Vec<f64>>, cur: &MixedProfile, tol: f64) -> Option<usize> {
    let len = history.len();
    (2..=len).find(|&lag| {
        let past = &history[len - lag];
        let (a, b) = past.split_at(cur.p1.len());
        within(a, &cur.p1, tol) && within(b, &cur.p2, tol)
    })
}

fn within(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

/// Compares the largest step over the latest period with the same quantity one window earlier.
fn residual_plateau(residuals: &VecDeque<f64>, current: f64, period: usize, window: usize) -> bool {
    let len = residuals.len();
    if len < window + period {
        return false;
    }
    let recent = residuals.iter().skip(len + 1 - period).copied().fold(current, f64::max);
    let earlier_end = len - window;
    let earlier = residuals
        .iter()
        .skip(earlier_end + 1 - period)
        .take(period)
        .copied()
        .fold(0.0, f64::max);
    earlier > 0.0 && recent >= PLATEAU_RATIO * earlier
}

/// Damped iteration `p ← (1-d)p + d·φ_β(p)`. Convergence is judged on the
/// undamped residual `‖φ_β(p) - p‖∞`, so a converged result is a fixed point
/// of `φ_β` whether or not undamped iteration would reach it.
pub fn solve_qre_damped(
    game: &BimatrixGame,
    p0: &MixedProfile,
    beta: f64,
    model: ChoiceModel,
    damping: f64,
    tol: f64,
    max_iter: usize,
) -> Result<IterationOutcome> {
    check_inputs(game, p0, beta, model)?;
    if !(damping > 0.0 && damping <= 1.0) {
        return Err(QreError::InvalidParameter(format!(
            "damping must lie in (0, 1], got {damping}"
        )));
    }
    if !(tol > 0.0) || max_iter == 0 {
        return Err(QreError::InvalidParameter(
            "damped solve needs tol > 0 and max_iter >= 1".into(),
        ));
    }
    let mut map = ResponseMap::new(game, beta, model);
    let mut cur = p0.clone();
    let mut resp = p0.clone();
    let mut residual = f64::INFINITY;
    for n in 1..=max_iter {
        map.apply(&cur.p1, &cur.p2, &mut resp.p1, &mut resp.p2);
        residual = cur.linf_distance(&resp);
        if residual <= tol {
            return Ok(IterationOutcome {
                status: IterationStatus::Converged,
                final_profile: resp,
                iterations_used: n,
                residual,
                cycle_period: None,
            });
        }
        for (c, r) in cur.p1.iter_mut().zip(&resp.p1).chain(cur.p2.iter_mut().zip(&resp.p2)) {
            *c += damping * (r - *c);
        }
    }
    Ok(IterationOutcome {
        status: IterationStatus::BudgetExhausted,
        final_profile: cur,
        iterations_used: max_iter,
        residual,
        cycle_period: None,
    })
}

/// Off-diagonal blocks of the logit Jacobian at `p`:
/// `J12 = ∂φ₁/∂p₂` (|A1|×|A2|) and `J21 = ∂φ₂/∂p₁` (|A2|×|A1|).
pub fn jacobian_blocks(game: &BimatrixGame, p: &MixedProfile, beta: f64) -> Result<(Matrix, Matrix)> {
    check_inputs(game, p, beta, ChoiceModel::Logit)?;
    let q = logit_response(game, p, beta, ChoiceModel::Logit)?;
    Ok((
        logit_block(game.payoff_1(), &q.p1, beta),
        logit_block(game.payoff_2_transposed(), &q.p2, beta),
    ))
}

/// `J[k,h] = β q_k (M[k,h] - Σ_m q_m M[m,h])` for an own-action-major payoff matrix `M`.
fn logit_block(m: &Matrix, q: &[f64], beta: f64) -> Matrix {
    let mut mean = vec![0.0; m.cols()];
    for (k, qk) in q.iter().enumerate() {
        for (acc, x) in mean.iter_mut().zip(m.row(k)) {
            *acc += qk * x;
        }
    }
    Matrix::from_fn(m.rows(), m.cols(), |k, h| beta * q[k] * (m[(k, h)] - mean[h]))
}

/// Full Jacobian of `φ_β` on the stacked coordinates `(p1, p2)`.
///
/// The diagonal blocks vanish because each player's response depends only on
/// the opponent's strategy. Each block has zero column sums, so the image of
/// the Jacobian lies in the tangent space of the product of simplices and no
/// projection is needed before taking eigenvalues.
pub fn jacobian(game: &BimatrixGame, p: &MixedProfile, beta: f64) -> Result<Matrix> {
    let (j12, j21) = jacobian_blocks(game, p, beta)?;
    Ok(assemble_blocks(&j12, &j21))
}

fn assemble_blocks(j12: &Matrix, j21: &Matrix) -> Matrix {
    let (n1, n2) = (j12.rows(), j12.cols());
    let mut full = Matrix::zeros(n1 + n2, n1 + n2);
    for i in 0..n1 {
        for j in 0..n2 {
            full[(i, n1 + j)] = j12[(i, j)];
            full[(n1 + j, i)] = j21[(j, i)];
        }
    }
    full
}

/// Central-difference Jacobian of `φ_β` for any choice model.
pub fn finite_difference_jacobian(
    game: &BimatrixGame,
    p: &MixedProfile,
    beta: f64,
    model: ChoiceModel,
    step: f64,
) -> Result<Matrix> {
    check_inputs(game, p, beta, model)?;
    let (n1, n2) = game.dims();
    let n = n1 + n2;
    let mut map = ResponseMap::new(game, beta, model);
    let mut full = Matrix::zeros(n, n);
    let mut plus = game.uniform_profile();
    let mut minus = game.uniform_profile();
    for j in 0..n {
        let mut a = p.clone();
        let mut b = p.clone();
        if j < n1 {
            a.p1[j] += step;
            b.p1[j] -= step;
        } else {
            a.p2[j - n1] += step;
            b.p2[j - n1] -= step;
        }
        map.apply(&a.p1, &a.p2, &mut plus.p1, &mut plus.p2);
        map.apply(&b.p1, &b.p2, &mut minus.p1, &mut minus.p2);
        for (i, (x, y)) in plus
            .p1
            .iter()
            .chain(&plus.p2)
            .zip(minus.p1.iter().chain(&minus.p2))
            .enumerate()
        {
            full[(i, j)] = (x - y) / (2.0 * step);
        }
    }
    Ok(full)
}

/// Spectral radius of the block matrix `[[0, J12], [J21, 0]]` computed as
/// `sqrt(ρ(J12·J21))` on the smaller of the two products.
pub fn block_spectral_radius(j12: &Matrix, j21: &Matrix) -> f64 {
    let prod = if j12.rows() <= j21.rows() {
        j12.matmul(j21)
    } else {
        j21.matmul(j12)
    };
    spectral_radius(&prod).sqrt()
}

/// Settings for [`classify_stability`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityOptions {
    /// A point is stable when its spectral radius is below `1 - margin`.
    pub margin: f64,
    /// Largest accepted `‖φ_β(p) - p‖∞` for the input point.
    pub fixed_point_tol: f64,
    /// Step for finite-difference Jacobians of non-logit models.
    pub fd_step: f64,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        Self {
            margin: 1e-6,
            fixed_point_tol: 1e-9,
            fd_step: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenMethod {
    pub algorithm: String,
    pub jacobian: String,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub spectral_radius: f64,
    pub stable: bool,
    /// Radius within `margin` of 1 on either side.
    pub marginal: bool,
    pub residual: f64,
    pub eigen_method: EigenMethod,
}

/// Local stability of a fixed point of `φ_β` from the Jacobian spectral radius.
pub fn classify_stability(
    game: &BimatrixGame,
    p: &MixedProfile,
    beta: f64,
    model: ChoiceModel,
    opts: &StabilityOptions,
) -> Result<StabilityReport> {
    let residual = fixed_point_residual(game, p, beta, model)?;
    if residual > opts.fixed_point_tol {
        return Err(QreError::NotAFixedPoint {
            residual,
            limit: opts.fixed_point_tol,
        });
    }
    let (radius, jac_kind) = match model {
        ChoiceModel::Logit => {
            let (j12, j21) = jacobian_blocks(game, p, beta)?;
            (block_spectral_radius(&j12, &j21), "analytic")
        }
        ChoiceModel::Satisficing { .. } => {
            let full = finite_difference_jacobian(game, p, beta, model, opts.fd_step)?;
            let (n1, n2) = game.dims();
            let j12 = Matrix::from_fn(n1, n2, |i, j| full[(i, n1 + j)]);
            let j21 = Matrix::from_fn(n2, n1, |i, j| full[(n1 + i, j)]);
            (block_spectral_radius(&j12, &j21), "central-difference")
        }
    };
    Ok(StabilityReport {
        spectral_radius: radius,
        stable: radius < 1.0 - opts.margin,
        marginal: (radius - 1.0).abs() <= opts.margin,
        residual,
        eigen_method: EigenMethod {
            algorithm: "balanced Hessenberg + Francis double-shift QR on J12*J21".into(),
            jacobian: jac_kind.into(),
            margin: opts.margin,
        },
    })
}

/// Fraction of small deterministic perturbations of `p` from which undamped
/// iteration returns to `p` within `10·tol`.
pub fn perturbation_reconvergence(
    game: &BimatrixGame,
    p: &MixedProfile,
    beta: f64,
    model: ChoiceModel,
    magnitude: f64,
    trials: usize,
    opts: &IterationOptions,
) -> Result<f64> {
    check_inputs(game, p, beta, model)?;
    if trials == 0 {
        return Ok(1.0);
    }
    let mut ok = 0;
    for t in 0..trials {
        let mut q = p.clone();
        perturb(&mut q.p1, t, magnitude);
        perturb(&mut q.p2, t + 1, magnitude);
        let out = iterate_unchecked(game, &q, beta, model, opts);
        if out.converged() && out.final_profile.linf_distance(p) <= 10.0 * opts.tol.max(1e-12) {
            ok += 1;
        }
    }
    Ok(ok as f64 / trials as f64)
}

/// Moves mass `magnitude` (or less, to stay nonnegative) between two coordinates chosen by `t`.
fn perturb(v: &mut [f64], t: usize, magnitude: f64) {
    let n = v.len();
    let j = t % n;
    let mut k = (t * 7 + 3) % n;
    if k == j {
        k = (j + 1) % n;
    }
    let (from, to) = if t.is_multiple_of(2) { (k, j) } else { (j, k) };
    let m = magnitude.min(v[from]);
    v[from] -= m;
    v[to] += m;
}

/// Settings for [`best_response_cycle`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleOptions {
    pub horizon: usize,
    /// Largest index difference between an entry and the same phase one period later.
    pub index_tol: usize,
    /// Number of consecutive periods the pattern must repeat at the end of the trace.
    pub min_repeats: usize,
}

impl Default for CycleOptions {
    fn default() -> Self {
        Self {
            horizon: 5000,
            index_tol: 1,
            min_repeats: 3,
        }
    }
}

/// Argmax-payoff actions along a logit-response path and their eventual cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestResponseCycle {
    pub trace_1: Vec<usize>,
    pub trace_2: Vec<usize>,
    /// Representative cycle of player-1 indices, or `None` if no period was found.
    pub cycle_1: Option<Vec<usize>>,
    pub cycle_2: Option<Vec<usize>>,
}

/// Records the payoff-maximizing action of each player at every iterate of
/// `φ_β` started at `p_start`, then extracts the periodic tail.
pub fn best_response_cycle(
    game: &BimatrixGame,
    p_start: &MixedProfile,
    beta: f64,
    model: ChoiceModel,
    opts: &CycleOptions,
) -> Result<BestResponseCycle> {
    check_inputs(game, p_start, beta, model)?;
    if opts.horizon == 0 {
        return Err(QreError::InvalidParameter("horizon must be at least 1".into()));
    }
    let mut map = ResponseMap::new(game, beta, model);
    let mut cur = p_start.clone();
    let mut next = p_start.clone();
    let mut trace_1 = Vec::with_capacity(opts.horizon);
    let mut trace_2 = Vec::with_capacity(opts.horizon);
    for _ in 0..opts.horizon {
        map.apply(&cur.p1, &cur.p2, &mut next.p1, &mut next.p2);
        let (u1, u2) = map.payoffs();
        trace_1.push(argmax(u1));
        trace_2.push(argmax(u2));
        std::mem::swap(&mut cur, &mut next);
    }
    let cycle_1 = detect_cycle(&trace_1, opts.index_tol, opts.min_repeats);
    let cycle_2 = detect_cycle(&trace_2, opts.index_tol, opts.min_repeats);
    Ok(BestResponseCycle {
        trace_1,
        trace_2,
        cycle_1,
        cycle_2,
    })
}

impl BestResponseCycle {
    pub fn labels_1<'g>(&self, game: &'g BimatrixGame) -> Option<Vec<&'g crate::game::Label>> {
        self.cycle_1
            .as_ref()
            .map(|c| c.iter().map(|&i| &game.labels_1()[i]).collect())
    }

    pub fn labels_2<'g>(&self, game: &'g BimatrixGame) -> Option<Vec<&'g crate::game::Label>> {
        self.cycle_2
            .as_ref()
            .map(|c| c.iter().map(|&i| &game.labels_2()[i]).collect())
    }
}

/// Smallest period `P` such that the last `min_repeats·P` entries satisfy
/// `|s[n] - s[n-P]| <= index_tol`. The representative cycle is the most
/// frequent exact period-length block over the whole tail on which that
/// relation holds (ties go to the latest), rotated to start right after its
/// largest jump.
pub fn detect_cycle(seq: &[usize], index_tol: usize, min_repeats: usize) -> Option<Vec<usize>> {
    let reps = min_repeats.max(2);
    let n = seq.len();
    let close = |a: usize, b: usize| a.abs_diff(b) <= index_tol;
    let period = (1..=n / reps).find(|&p| ((n - (reps - 1) * p)..n).all(|i| close(seq[i], seq[i - p])))?;
    let mut start = n - reps * period;
    while start > 0 && close(seq[start - 1 + period], seq[start - 1]) {
        start -= 1;
    }
    // Blocks aligned with the final period.
    let first = start + (n - start) % period;
    let blocks: Vec<&[usize]> = seq[first..].chunks_exact(period).collect();
    let mut counts: HashMap<&[usize], usize> = HashMap::new();
    for b in &blocks {
        *counts.entry(b).or_default() += 1;
    }
    let mut rep = blocks
        .iter()
        .enumerate()
        .max_by_key(|(i, b)| (counts[**b], *i))
        .map(|(_, b)| b.to_vec())?;
    if period > 1 {
        let jump_at = (0..period)
            .max_by_key(|&i| (rep[(i + 1) % period].abs_diff(rep[i]), std::cmp::Reverse(i)))
            .unwrap_or(0);
        rep.rotate_left((jump_at + 1) % period);
    }
    Some(rep)
}

/// Simultaneous pure best-response iteration `(k1, k2) ← (BR1(k2), BR2(k1))`
/// with ties broken toward the lowest index.
pub fn pure_best_response_sequence(game: &BimatrixGame, start: (usize, usize), steps: usize) -> Vec<(usize, usize)> {
    let (n1, _) = game.dims();
    let mut seq = Vec::with_capacity(steps + 1);
    let (mut k1, mut k2) = start;
    seq.push((k1, k2));
    for _ in 0..steps {
        let col: Vec<f64> = (0..n1).map(|i| game.payoff_1()[(i, k2)]).collect();
        let b1 = argmax(&col);
        let b2 = argmax(game.payoff_2().row(k1));
        k1 = b1;
        k2 = b2;
        seq.push((k1, k2));
    }
    seq
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::numeric_labels;

    fn four_action(theta: f64) -> BimatrixGame {
        let a = Matrix::from_rows(&[
            vec![0.0, 0.0, 2.0, theta],
            vec![2.0, 0.0, 0.0, 0.0],
            vec![0.0, 2.0, 0.0, 0.0],
            vec![0.0, 0.0, 2.0, 1.0],
        ])
        .unwrap();
        BimatrixGame::symmetric(numeric_labels([1.0, 2.0, 3.0, 4.0]), a).unwrap()
    }

    fn small_game() -> BimatrixGame {
        BimatrixGame::from_fn(
            numeric_labels([0.0, 1.0, 2.0]),
            numeric_labels([0.0, 1.0, 2.0]),
            |i, j| {
                let x = (i * 3 + j) as f64;
                ((x * 1.7).sin() * 2.0, (x * 0.9 + 0.4).cos() * 3.0)
            },
        )
        .unwrap()
    }

    #[test]
    fn zero_precision_maps_to_uniform() {
        let g = four_action(0.9);
        let p = MixedProfile::pure(4, 2, 4, 0);
        assert_eq!(
            logit_response(&g, &p, 0.0, ChoiceModel::Logit).unwrap(),
            g.uniform_profile()
        );
        let out = iterate(&g, &p, 0.0, ChoiceModel::Logit, &IterationOptions::default()).unwrap();
        assert!(out.converged());
        assert!(out.iterations_used <= 2);
        assert!(jacobian(&g, &p, 0.0).unwrap().max_abs() == 0.0);
    }

    #[test]
    fn high_precision_best_responds() {
        let g = four_action(0.9);
        let q = logit_response(&g, &MixedProfile::pure(4, 0, 4, 0), 1e4, ChoiceModel::Logit).unwrap();
        assert!((q.p1[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let g = small_game();
        let p = MixedProfile::new(vec![0.2, 0.5, 0.3], vec![0.6, 0.1, 0.3]).unwrap();
        let a = jacobian(&g, &p, 2.0).unwrap();
        let b = finite_difference_jacobian(&g, &p, 2.0, ChoiceModel::Logit, 1e-6).unwrap();
        let gap = a
            .as_slice()
            .iter()
            .zip(b.as_slice())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(gap < 1e-6, "{gap}");
    }

    #[test]
    fn jacobian_blocks_have_zero_column_sums() {
        let g = small_game();
        let (j12, j21) = jacobian_blocks(&g, &g.uniform_profile(), 3.0).unwrap();
        for m in [&j12, &j21] {
            for c in 0..m.cols() {
                let s: f64 = (0..m.rows()).map(|r| m[(r, c)]).sum();
                assert!(s.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn block_radius_equals_full_radius() {
        let g = small_game();
        let p = g.uniform_profile();
        let (j12, j21) = jacobian_blocks(&g, &p, 1.3).unwrap();
        let full = jacobian(&g, &p, 1.3).unwrap();
        assert!((block_spectral_radius(&j12, &j21) - spectral_radius(&full)).abs() < 1e-9);
    }

    #[test]
    fn stability_at_zero_precision() {
        let g = four_action(0.5);
        let r = classify_stability(
            &g,
            &g.uniform_profile(),
            0.0,
            ChoiceModel::Logit,
            &StabilityOptions::default(),
        )
        .unwrap();
        assert!(r.stable);
        assert_eq!(r.spectral_radius, 0.0);
    }

    #[test]
    fn stability_rejects_non_fixed_points() {
        let g = four_action(0.5);
        let err = classify_stability(
            &g,
            &MixedProfile::pure(4, 0, 4, 0),
            1.0,
            ChoiceModel::Logit,
            &StabilityOptions::default(),
        );
        assert!(matches!(err, Err(QreError::NotAFixedPoint { .. })));
    }

    #[test]
    fn damped_with_unit_damping_matches_iterate() {
        let g = four_action(0.7);
        let p0 = g.uniform_profile();
        let a = iterate(&g, &p0, 1.0, ChoiceModel::Logit, &IterationOptions::default()).unwrap();
        let b = solve_qre_damped(&g, &p0, 1.0, ChoiceModel::Logit, 1.0, 1e-10, 200_000).unwrap();
        assert!(a.converged() && b.converged());
        assert!(a.final_profile.linf_distance(&b.final_profile) < 1e-9);
        assert!(solve_qre_damped(&g, &p0, 1.0, ChoiceModel::Logit, 0.0, 1e-10, 10).is_err());
    }

    #[test]
    fn damped_solve_finds_unstable_point() {
        let g = four_action(0.7);
        let out = solve_qre_damped(
            &g,
            &g.uniform_profile(),
            5.0,
            ChoiceModel::Logit,
            0.05,
            1e-11,
            2_000_000,
        )
        .unwrap();
        assert!(out.converged());
        let r = classify_stability(
            &g,
            &out.final_profile,
            5.0,
            ChoiceModel::Logit,
            &StabilityOptions::default(),
        )
        .unwrap();
        assert!(!r.stable, "radius {}", r.spectral_radius);
    }

    #[test]
    fn matching_pennies_cycles_under_pure_best_response() {
        let g = BimatrixGame::from_fn(numeric_labels([0.0, 1.0]), numeric_labels([0.0, 1.0]), |i, j| {
            if i == j {
                (1.0, -1.0)
            } else {
                (-1.0, 1.0)
            }
        })
        .unwrap();
        let seq: Vec<usize> = pure_best_response_sequence(&g, (0, 0), 40)
            .iter()
            .map(|s| s.0)
            .collect();
        assert_eq!(detect_cycle(&seq, 0, 3).unwrap().len(), 4);
    }

    #[test]
    fn cycle_detection_basics() {
        assert_eq!(detect_cycle(&[4, 4, 4, 4, 4, 4], 0, 3), Some(vec![4]));
        let seq: Vec<usize> = (0..40).map(|i| [3, 9, 5][i % 3]).collect();
        assert_eq!(detect_cycle(&seq, 0, 3), Some(vec![9, 5, 3]));
        assert_eq!(detect_cycle(&[1, 2, 3, 4, 5, 6, 7], 0, 3), None);
    }

    #[test]
    fn genuine_cycle_is_detected() {
        // Rock-paper-scissors with large payoffs: the logit dynamics settles on a limit cycle.
        let g = BimatrixGame::symmetric(
            numeric_labels([0.0, 1.0, 2.0]),
            Matrix::from_rows(&[vec![0.0, -1.0, 1.0], vec![1.0, 0.0, -1.0], vec![-1.0, 1.0, 0.0]]).unwrap(),
        )
        .unwrap();
        let p0 = MixedProfile::new(vec![0.5, 0.3, 0.2], vec![0.2, 0.3, 0.5]).unwrap();
        let out = iterate(&g, &p0, 20.0, ChoiceModel::Logit, &IterationOptions::default()).unwrap();
        assert_ne!(out.status, IterationStatus::Converged);
    }
}
