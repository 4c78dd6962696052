//! Command-line front end: builds games from flags or a JSON config file,
//! runs paths, sweeps, cycles and table reproductions, and writes CSV or JSON.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::auctions::{auction_payoff_matrix, AuctionFormat, AuctionSpec, BidFunction, SigmaComponent};
use crate::choice::ChoiceModel;
use crate::dynamics::{best_response_cycle, detect_cycle, pure_best_response_sequence, CycleOptions};
use crate::error::QreError;
use crate::format::fmt_g9;
use crate::game::{argmax, label_mean, BimatrixGame, Label, MixedProfile};
use crate::library::{
    centipede, centipede_mp6, centipede_nt12, four_action_game, money_request, rock_paper_scissors, travelers_claims,
    travelers_dilemma, CentipedeSpec, CentipedeTree, MoneyRequestSpec, MoneyRequestVersion, Variant,
};
use crate::path::{
    evolutionary_path, thick_barrier_scan, BarrierScanOptions, BetaStar, EvolutionaryPathResult, NuRule, PathOptions,
    RejectedStep, Termination,
};
use crate::tables::{self, TableName};
use crate::trembles::{induced_alternative_distribution, target_game, TrembleDistance, TrembleModel};

/// Exit code for invalid configuration.
pub const EXIT_CONFIG: i32 = 2;
/// Exit code for numerical failure.
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<QreError> for CliError {
    fn from(e: QreError) -> Self {
        match e {
            QreError::NotAFixedPoint { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("i/o: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

#[derive(Debug, Parser)]
#[command(name = "limitqre", version, about = "Limit quantal response equilibrium solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads for parallel work (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the evolutionary path and report the limit distribution.
    Solve(SolveArgs),
    /// Run one solve per value of a single parameter.
    Sweep(SweepArgs),
    /// Extract the best-response cycle at a precision above the limit.
    Cycle(CycleArgs),
    /// Recompute a reference table and compare it cell by cell.
    Table(TableArgs),
    /// Write the constructed game.
    DumpGame(DumpArgs),
}

#[derive(Debug, Args)]
pub struct GameSelection {
    /// Game family (alternative to `--game`).
    #[arg(value_enum)]
    pub family: Option<GameFamily>,

    #[command(flatten)]
    pub config: RunConfig,

    /// JSON config file with the same keys as the flags; flags win on conflict.
    #[arg(long)]
    pub config_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub game: GameSelection,

    /// Also scan for the restabilization precision above `β*`.
    #[arg(long)]
    pub barrier: bool,

    /// Upper end of the restabilization scan.
    #[arg(long, default_value_t = 50.0)]
    pub barrier_max: f64,

    /// Output directory for `result.json` and `p_star.csv`; stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub game: GameSelection,

    /// Parameter to vary: a, b, alpha, delta, theta, sigma, q, pi, c or nu.
    #[arg(long)]
    pub param: String,

    /// Comma-separated values.
    #[arg(long, value_delimiter = ',', conflicts_with = "range")]
    pub values: Option<Vec<f64>>,

    /// Inclusive range `from:to:step`.
    #[arg(long)]
    pub range: Option<String>,

    /// Output file; stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CycleArgs {
    #[command(flatten)]
    pub game: GameSelection,

    /// Precision of the logit-response iteration.
    #[arg(long, required_unless_present = "pure")]
    pub beta: Option<f64>,

    /// Starting profile of the iteration.
    #[arg(long, value_enum, default_value_t = CycleStart::PStar)]
    pub start: CycleStart,

    /// Pure best-response iteration from the first strategy pair instead.
    #[arg(long)]
    pub pure: bool,

    /// Number of iterations recorded.
    #[arg(long, default_value_t = 5000)]
    pub horizon: usize,

    /// Output file; stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CycleStart {
    /// Limit distribution of the evolutionary path.
    PStar,
    Uniform,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// table1, table2, table3 or tableT1.
    pub name: String,

    /// Output file; stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DumpArgs {
    #[command(flatten)]
    pub game: GameSelection,

    /// Output file; stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GameFamily {
    FourAction,
    Rps,
    CentipedeLinear,
    CentipedeExponential,
    CentipedeConstant,
    CentipedeMp6,
    CentipedeNt12,
    Travelers,
    MoneyRequest,
    AuctionFirstPrice,
    AuctionAllPay,
    AuctionDispersion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RequestVersionArg {
    Basic,
    Cycle,
    Costless,
    Fine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimingArg {
    Symmetric,
    Alternating,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelArg {
    Logit,
    Satisficing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceArg {
    Labels,
    Indices,
}

/// `--nu` value: a fixed step or the payoff-scaled automatic rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NuArg {
    Value(f64),
    Keyword(NuKeyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NuKeyword {
    Auto,
}

impl NuArg {
    pub fn rule(self) -> NuRule {
        match self {
            NuArg::Value(v) => NuRule::Fixed(v),
            NuArg::Keyword(NuKeyword::Auto) => NuRule::Auto,
        }
    }
}

impl std::str::FromStr for NuArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(NuArg::Keyword(NuKeyword::Auto));
        }
        s.parse()
            .map(NuArg::Value)
            .map_err(|_| format!("expected a number or `auto`, got {s}"))
    }
}

/// Everything needed to build a game and run the solver. Every field is
/// optional so a config file and flags can be merged.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunConfig {
    #[arg(long, value_enum)]
    pub game: Option<GameFamily>,
    /// Four-action corner payoff.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Centipede first-mover share.
    #[arg(long)]
    pub a: Option<f64>,
    /// Exponential centipede growth rate.
    #[arg(long)]
    pub b: Option<f64>,
    /// Share decay (constant-size centipede) or fine-version bonus slope (money request).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Number of exit dates per player; replaces the default date grid.
    #[arg(long)]
    pub n_dates: Option<usize>,
    #[arg(long)]
    pub tau_bar: Option<f64>,
    #[arg(long, value_enum)]
    pub timing: Option<TimingArg>,
    /// Remove player 2's `never` strategy in the tree games.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub constrain_last_exit: Option<bool>,
    /// Traveler's dilemma bonus.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub claims_low: Option<u32>,
    #[arg(long)]
    pub claims_high: Option<u32>,
    #[arg(long)]
    pub claims_step: Option<u32>,
    #[arg(long, value_enum)]
    pub version: Option<RequestVersionArg>,
    /// Stubborn mass.
    #[arg(long)]
    pub pi: Option<f64>,
    /// 1 keeps the top claim in the strategic set, 2 removes it.
    #[arg(long)]
    pub variant: Option<u8>,
    /// Value dispersion `σ`, or a mixture `σ:w,σ:w`.
    #[arg(long)]
    pub sigma: Option<String>,
    #[arg(long)]
    pub grid_delta: Option<f64>,
    /// Append the Bayesian all-pay bid at each listed `σ`.
    #[arg(long, value_delimiter = ',')]
    pub beq: Option<Vec<f64>>,
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Multiply player 2's payoffs by this factor.
    #[arg(long)]
    pub rescale_2: Option<f64>,
    /// Replace payoffs `x` by `sign(x)|x|^e`.
    #[arg(long)]
    pub payoff_exponent: Option<f64>,
    /// Precision step: a positive number, or `auto` for `0.04 / max|u|`.
    #[arg(long)]
    pub nu: Option<NuArg>,
    #[arg(long)]
    pub beta_cap: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Tremble decay; the game is replaced by its game over targets.
    #[arg(long)]
    pub tremble_q: Option<f64>,
    #[arg(long, value_enum)]
    pub tremble_distance: Option<DistanceArg>,
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    /// Satisficing exponent.
    #[arg(long)]
    pub c: Option<f64>,
}

macro_rules! merge_fields {
    ($flags:expr, $file:expr, $($f:ident),*) => {
        RunConfig { $($f: $flags.$f.or($file.$f)),* }
    };
}

impl RunConfig {
    /// Field-wise merge where `self` wins over `file`.
    pub fn merged_over(self, file: RunConfig) -> RunConfig {
        merge_fields!(
            self,
            file,
            game,
            theta,
            a,
            b,
            alpha,
            n_dates,
            tau_bar,
            timing,
            constrain_last_exit,
            delta,
            claims_low,
            claims_high,
            claims_step,
            version,
            pi,
            variant,
            sigma,
            grid_delta,
            beq,
            nodes,
            rescale_2,
            payoff_exponent,
            nu,
            beta_cap,
            max_iter,
            tremble_q,
            tremble_distance,
            model,
            c
        )
    }

    pub fn from_json_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))
    }

    /// Family-specific parameters that are set.
    fn set_family_params(&self) -> Vec<&'static str> {
        let mut s = Vec::new();
        macro_rules! check {
            ($($f:ident),*) => { $( if self.$f.is_some() { s.push(stringify!($f)); } )* };
        }
        check!(
            theta,
            a,
            b,
            alpha,
            n_dates,
            tau_bar,
            timing,
            constrain_last_exit,
            delta,
            claims_low,
            claims_high,
            claims_step,
            version,
            pi,
            variant,
            sigma,
            grid_delta,
            beq,
            nodes
        );
        s
    }

    pub fn family(&self) -> CliResult<GameFamily> {
        self.game.ok_or_else(|| config_err("no game family given"))
    }

    fn validate_params(&self) -> CliResult<()> {
        use GameFamily::*;
        let family = self.family()?;
        let allowed: &[&str] = match family {
            FourAction => &["theta"],
            Rps => &[],
            CentipedeLinear => &["a", "n_dates", "tau_bar", "timing"],
            CentipedeExponential => &["a", "b", "n_dates", "tau_bar", "timing"],
            CentipedeConstant => &["alpha", "n_dates", "tau_bar", "timing"],
            CentipedeMp6 | CentipedeNt12 => &["constrain_last_exit"],
            Travelers => &["delta", "claims_low", "claims_high", "claims_step"],
            MoneyRequest => &["version", "pi", "variant", "alpha"],
            AuctionFirstPrice | AuctionAllPay => &["sigma", "grid_delta", "beq", "nodes"],
            AuctionDispersion => &["grid_delta", "beq", "nodes"],
        };
        let bad: Vec<&str> = self
            .set_family_params()
            .into_iter()
            .filter(|p| !allowed.contains(p))
            .collect();
        if !bad.is_empty() {
            return Err(config_err(format!(
                "parameter(s) {} do not apply to {}",
                bad.join(", "),
                family.to_possible_value().expect("named").get_name()
            )));
        }
        if self.model == Some(ModelArg::Logit) && self.c.is_some() {
            return Err(config_err("--c applies only to the satisficing model"));
        }
        Ok(())
    }

    pub fn choice_model(&self) -> CliResult<ChoiceModel> {
        match (self.model, self.c) {
            (None | Some(ModelArg::Logit), None) => Ok(ChoiceModel::Logit),
            (None | Some(ModelArg::Satisficing), Some(c)) => Ok(ChoiceModel::satisficing(c)?),
            (Some(ModelArg::Satisficing), None) => Err(config_err("the satisficing model needs --c")),
            (Some(ModelArg::Logit), Some(_)) => Err(config_err("--c applies only to the satisficing model")),
        }
    }

    pub fn path_options(&self) -> PathOptions {
        let mut o = PathOptions::default();
        if let Some(nu) = self.nu {
            o.nu = nu.rule();
        }
        o.beta_cap = self.beta_cap;
        if let Some(m) = self.max_iter {
            o.iteration.max_iter = m;
        }
        o
    }

    pub fn tremble(&self, family: GameFamily) -> CliResult<Option<TrembleModel>> {
        let Some(q) = self.tremble_q else {
            return Ok(None);
        };
        let auction = matches!(
            family,
            GameFamily::AuctionFirstPrice | GameFamily::AuctionAllPay | GameFamily::AuctionDispersion
        );
        let distance = match self.tremble_distance {
            Some(DistanceArg::Labels) => TrembleDistance::LabelDifference,
            Some(DistanceArg::Indices) => TrembleDistance::IndexDifference,
            None if auction => TrembleDistance::IndexDifference,
            None => TrembleDistance::LabelDifference,
        };
        Ok(Some(TrembleModel::new(q, distance)?))
    }

    /// Sets a sweepable parameter by name.
    pub fn set_param(&mut self, name: &str, value: f64) -> CliResult<()> {
        match name {
            "a" => self.a = Some(value),
            "b" => self.b = Some(value),
            "alpha" => self.alpha = Some(value),
            "delta" => self.delta = Some(value),
            "theta" => self.theta = Some(value),
            "sigma" => self.sigma = Some(value.to_string()),
            "q" | "tremble_q" => self.tremble_q = Some(value),
            "pi" => self.pi = Some(value),
            "c" => self.c = Some(value),
            "nu" => self.nu = Some(NuArg::Value(value)),
            _ => return Err(config_err(format!("parameter {name} cannot be swept"))),
        }
        Ok(())
    }
}

fn parse_sigma(s: &str) -> CliResult<Vec<SigmaComponent>> {
    let bad = || config_err(format!("cannot parse sigma '{s}'; expected a number or σ:w,σ:w"));
    if !s.contains(':') {
        let sigma = s.trim().parse().map_err(|_| bad())?;
        return Ok(vec![SigmaComponent { sigma, weight: 1.0 }]);
    }
    s.split(',')
        .map(|part| {
            let (a, b) = part.split_once(':').ok_or_else(bad)?;
            Ok(SigmaComponent {
                sigma: a.trim().parse().map_err(|_| bad())?,
                weight: b.trim().parse().map_err(|_| bad())?,
            })
        })
        .collect()
}

/// A constructed game ready for solving.
#[derive(Debug, Clone)]
pub struct BuiltGame {
    pub family: GameFamily,
    /// The game over alternatives.
    pub base: BimatrixGame,
    /// The game actually solved (over targets when trembles are on).
    pub solved: BimatrixGame,
    pub tremble: Option<TrembleModel>,
    pub tree: Option<CentipedeTree>,
}

fn require<T>(v: Option<T>, name: &str, family: &str) -> CliResult<T> {
    v.ok_or_else(|| config_err(format!("{family} needs --{}", name.replace('_', "-"))))
}

fn centipede_dates(spec: CentipedeSpec, cfg: &RunConfig) -> CliResult<CentipedeSpec> {
    match (cfg.n_dates, cfg.timing) {
        (None, None) if cfg.tau_bar.is_none() => Ok(spec),
        (Some(n), timing) => {
            let tau_bar = cfg.tau_bar.unwrap_or(100.0);
            Ok(match timing.unwrap_or(TimingArg::Symmetric) {
                TimingArg::Symmetric => spec.with_symmetric_dates(n, tau_bar),
                TimingArg::Alternating => spec.with_alternating_dates(n, tau_bar),
            })
        }
        (None, _) => Err(config_err("--timing and --tau-bar need --n-dates")),
    }
}

/// Builds the game described by `cfg`.
pub fn build_game(cfg: &RunConfig) -> CliResult<BuiltGame> {
    cfg.validate_params()?;
    let family = cfg.family()?;
    let name = family.to_possible_value().expect("named").get_name().to_string();
    let mut tree = None;
    let base = match family {
        GameFamily::FourAction => four_action_game(require(cfg.theta, "theta", &name)?)?,
        GameFamily::Rps => rock_paper_scissors(),
        GameFamily::CentipedeLinear => centipede(&centipede_dates(
            CentipedeSpec::linear(require(cfg.a, "a", &name)?),
            cfg,
        )?)?,
        GameFamily::CentipedeExponential => centipede(&centipede_dates(
            CentipedeSpec::exponential(require(cfg.a, "a", &name)?, require(cfg.b, "b", &name)?),
            cfg,
        )?)?,
        GameFamily::CentipedeConstant => centipede(&centipede_dates(
            CentipedeSpec::constant_size(require(cfg.alpha, "alpha", &name)?),
            cfg,
        )?)?,
        GameFamily::CentipedeMp6 | GameFamily::CentipedeNt12 => {
            let constrain = cfg.constrain_last_exit.unwrap_or(false);
            let t = if family == GameFamily::CentipedeMp6 {
                centipede_mp6(constrain)
            } else {
                centipede_nt12(constrain)
            };
            tree = Some(t.tree);
            t.game
        }
        GameFamily::Travelers => {
            let claims = travelers_claims(
                cfg.claims_low.unwrap_or(80),
                cfg.claims_high.unwrap_or(200),
                cfg.claims_step.unwrap_or(1),
            );
            travelers_dilemma(require(cfg.delta, "delta", &name)?, &claims)?
        }
        GameFamily::MoneyRequest => {
            let version = match cfg.version.unwrap_or(RequestVersionArg::Basic) {
                RequestVersionArg::Basic => MoneyRequestVersion::Basic,
                RequestVersionArg::Cycle => MoneyRequestVersion::Cycle,
                RequestVersionArg::Costless => MoneyRequestVersion::Costless,
                RequestVersionArg::Fine => MoneyRequestVersion::Fine {
                    alpha: require(cfg.alpha, "alpha", "the fine money-request version")?,
                },
            };
            if cfg.alpha.is_some() && !matches!(version, MoneyRequestVersion::Fine { .. }) {
                return Err(config_err("--alpha applies only to the fine money-request version"));
            }
            let variant = match cfg.variant.unwrap_or(1) {
                1 => Variant::One,
                2 => Variant::Two,
                v => return Err(config_err(format!("variant must be 1 or 2, got {v}"))),
            };
            money_request(&MoneyRequestSpec::new(version, cfg.pi.unwrap_or(0.0), variant))?
        }
        GameFamily::AuctionFirstPrice | GameFamily::AuctionAllPay | GameFamily::AuctionDispersion => {
            let delta = cfg.grid_delta.unwrap_or(0.05);
            let mut spec = match family {
                GameFamily::AuctionDispersion => AuctionSpec::dispersion_uncertainty(delta),
                _ => {
                    let format = if family == GameFamily::AuctionFirstPrice {
                        AuctionFormat::FirstPrice
                    } else {
                        AuctionFormat::AllPay
                    };
                    let sigma = parse_sigma(&require(cfg.sigma.clone(), "sigma", &name)?)?;
                    AuctionSpec::new(format, sigma[0].sigma, delta).with_mixture(sigma)
                }
            };
            for s in cfg.beq.iter().flatten() {
                spec = spec.with_extra(BidFunction::bayesian_allpay(*s));
            }
            if let Some(n) = cfg.nodes {
                spec = spec.with_nodes(n);
            }
            auction_payoff_matrix(&spec)?
        }
    };
    let mut base = base;
    if let Some(f) = cfg.rescale_2 {
        base = base.rescale_payoffs(1.0, f)?;
    }
    if let Some(e) = cfg.payoff_exponent {
        base = base.payoff_power(e)?;
    }
    let tremble = cfg.tremble(family)?;
    let solved = match &tremble {
        Some(m) => target_game(&base, m)?,
        None => base.clone(),
    };
    Ok(BuiltGame {
        family,
        base,
        solved,
        tremble,
        tree,
    })
}

/// Distribution per player with labels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabeledDistribution {
    pub labels_1: Vec<Label>,
    pub labels_2: Vec<Label>,
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
}

impl LabeledDistribution {
    fn new(game: &BimatrixGame, p: &MixedProfile) -> Self {
        Self {
            labels_1: game.labels_1().to_vec(),
            labels_2: game.labels_2().to_vec(),
            p1: p.p1.clone(),
            p2: p.p2.clone(),
        }
    }

    /// Player-1 mean label, if no weight sits on a text label.
    pub fn mean_1(&self) -> Option<f64> {
        label_mean(&self.labels_1, &self.p1).ok()
    }

    pub fn mode_1(&self) -> &Label {
        &self.labels_1[argmax(&self.p1)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiusPoint {
    pub beta: f64,
    pub spectral_radius: f64,
}

/// Result of `solve`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub config: RunConfig,
    pub game_metadata: serde_json::Map<String, serde_json::Value>,
    pub model: ChoiceModel,
    pub nu: f64,
    pub beta_cap: f64,
    pub beta_star: BetaStar,
    pub termination: Termination,
    /// Limit distribution over the solved game's strategies.
    pub p_star: LabeledDistribution,
    /// Distribution over alternatives; equals `p_star` without trembles.
    pub behavior: LabeledDistribution,
    pub mean_1: Option<f64>,
    pub mode_1: Label,
    pub radii: Vec<RadiusPoint>,
    pub rejected: Option<RejectedStep>,
    pub barrier: Option<f64>,
    /// Stopping-node masses for tree games.
    pub terminal_nodes: Option<Vec<f64>>,
}

/// Runs the evolutionary path on a built game.
pub fn solve(cfg: &RunConfig, built: &BuiltGame) -> CliResult<(SolveReport, EvolutionaryPathResult)> {
    let model = cfg.choice_model()?;
    let res = evolutionary_path(&built.solved, model, &cfg.path_options())?;
    let behavior_profile = match &built.tremble {
        Some(m) => induced_alternative_distribution(&res.p_star, built.base.labels_1(), built.base.labels_2(), m)?,
        None => res.p_star.clone(),
    };
    let behavior = LabeledDistribution::new(&built.base, &behavior_profile);
    let terminal_nodes = match &built.tree {
        Some(t) => Some(t.terminal_node_distribution(&behavior_profile)?),
        None => None,
    };
    let report = SolveReport {
        config: cfg.clone(),
        game_metadata: built.solved.metadata().clone(),
        model,
        nu: res.nu,
        beta_cap: res.beta_cap,
        beta_star: res.beta_star,
        termination: res.termination,
        p_star: LabeledDistribution::new(&built.solved, &res.p_star),
        mean_1: behavior.mean_1(),
        mode_1: behavior.mode_1().clone(),
        behavior,
        radii: res
            .points
            .iter()
            .map(|p| RadiusPoint {
                beta: p.beta,
                spectral_radius: p.spectral_radius,
            })
            .collect(),
        rejected: res.rejected.clone(),
        barrier: None,
        terminal_nodes,
    };
    Ok((report, res))
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn csv_finish(w: csv::Writer<Vec<u8>>) -> CliResult<String> {
    let bytes = w.into_inner().map_err(|e| config_err(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn csv_err(e: csv::Error) -> CliError {
    config_err(format!("csv: {e}"))
}

/// `player,label,probability` rows.
pub fn distribution_csv(d: &LabeledDistribution) -> CliResult<String> {
    let mut w = csv_writer();
    w.write_record(["player", "label", "probability"]).map_err(csv_err)?;
    for (player, labels, p) in [(1, &d.labels_1, &d.p1), (2, &d.labels_2, &d.p2)] {
        for (l, x) in labels.iter().zip(p.iter()) {
            w.write_record([player.to_string(), l.to_string(), fmt_g9(*x)])
                .map_err(csv_err)?;
        }
    }
    csv_finish(w)
}

fn to_json<T: Serialize>(v: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Numerical(format!("json: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn emit(out: Option<&Path>, content: &str) -> CliResult<()> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(p, content)?;
        }
        None => print!("{content}"),
    }
    Ok(())
}

fn resolve_config(sel: &GameSelection) -> CliResult<RunConfig> {
    let file = match &sel.config_file {
        Some(p) => RunConfig::from_json_file(p)?,
        None => RunConfig::default(),
    };
    let mut cfg = sel.config.clone().merged_over(file);
    if let Some(f) = sel.family {
        if cfg.game.is_some_and(|g| g != f) && sel.config.game.is_some() {
            return Err(config_err("positional family and --game disagree"));
        }
        cfg.game = Some(f);
    }
    Ok(cfg)
}

pub fn cmd_solve(args: &SolveArgs, format: OutputFormat) -> CliResult<SolveReport> {
    let cfg = resolve_config(&args.game)?;
    let built = build_game(&cfg)?;
    let (mut report, res) = solve(&cfg, &built)?;
    if args.barrier && res.termination != Termination::BetaCapReached {
        let opts = BarrierScanOptions {
            beta_max: args.barrier_max,
            ..BarrierScanOptions::default()
        };
        report.barrier = thick_barrier_scan(&built.solved, &res, report.model, &opts)?;
    }
    match &args.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            emit(Some(&dir.join("result.json")), &to_json(&report)?)?;
            emit(Some(&dir.join("p_star.csv")), &distribution_csv(&report.behavior)?)?;
            if built.tremble.is_some() {
                emit(
                    Some(&dir.join("p_star_targets.csv")),
                    &distribution_csv(&report.p_star)?,
                )?;
            }
        }
        None => match format {
            OutputFormat::Json => emit(None, &to_json(&report)?)?,
            OutputFormat::Csv => emit(None, &distribution_csv(&report.behavior)?)?,
        },
    }
    Ok(report)
}

/// One sweep row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: String,
    pub value: f64,
    pub beta_star: Option<BetaStar>,
    pub termination: Option<Termination>,
    pub mean_stat: Option<f64>,
    pub mode_label: Option<Label>,
    /// `ok` or the error message for this row.
    pub status: String,
}

fn parse_range(s: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| config_err(format!("cannot parse range '{s}'; expected from:to:step")))?;
    let [from, to, step] = parts[..] else {
        return Err(config_err(format!("range '{s}' needs from:to:step")));
    };
    if !(step > 0.0) || to < from {
        return Err(config_err(format!(
            "range '{s}' must be increasing with a positive step"
        )));
    }
    let n = ((to - from) / step + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|k| ((from + k as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

/// Runs one solve per parameter value; failures are recorded per row.
pub fn sweep(cfg: &RunConfig, param: &str, values: &[f64]) -> CliResult<Vec<SweepRow>> {
    let mut probe = cfg.clone();
    probe.set_param(param, values.first().copied().unwrap_or(0.0))?;
    Ok(values
        .par_iter()
        .map(|&v| {
            let mut c = cfg.clone();
            c.set_param(param, v).expect("validated above");
            let row = |status: String| SweepRow {
                param: param.to_string(),
                value: v,
                beta_star: None,
                termination: None,
                mean_stat: None,
                mode_label: None,
                status,
            };
            match build_game(&c).and_then(|g| solve(&c, &g)) {
                Ok((r, _)) => SweepRow {
                    beta_star: Some(r.beta_star),
                    termination: Some(r.termination),
                    mean_stat: r.mean_1,
                    mode_label: Some(r.mode_1),
                    ..row("ok".into())
                },
                Err(e) => row(e.to_string()),
            }
        })
        .collect())
}

pub fn sweep_csv(rows: &[SweepRow]) -> CliResult<String> {
    let mut w = csv_writer();
    w.write_record([
        "param",
        "value",
        "beta_star",
        "termination",
        "mean_stat",
        "mode_label",
        "status",
    ])
    .map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.param.clone(),
            fmt_g9(r.value),
            r.beta_star.map_or(String::new(), |b| match b {
                BetaStar::Finite(x) => fmt_g9(x),
                BetaStar::Unbounded { .. } => "unbounded".into(),
            }),
            r.termination.map_or(String::new(), |t| t.to_string()),
            r.mean_stat.map_or(String::new(), fmt_g9),
            r.mode_label.as_ref().map_or(String::new(), Label::to_string),
            r.status.clone(),
        ])
        .map_err(csv_err)?;
    }
    csv_finish(w)
}

pub fn cmd_sweep(args: &SweepArgs, format: OutputFormat) -> CliResult<Vec<SweepRow>> {
    let cfg = resolve_config(&args.game)?;
    let values = match (&args.values, &args.range) {
        (Some(v), None) => v.clone(),
        (None, Some(r)) => parse_range(r)?,
        _ => return Err(config_err("sweep needs exactly one of --values or --range")),
    };
    if values.is_empty() {
        return Err(config_err("sweep has no values"));
    }
    let rows = sweep(&cfg, &args.param, &values)?;
    let text = match format {
        OutputFormat::Csv => sweep_csv(&rows)?,
        OutputFormat::Json => to_json(&rows)?,
    };
    emit(args.out.as_deref(), &text)?;
    Ok(rows)
}

/// Result of `cycle`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleReport {
    pub beta: Option<f64>,
    pub pure: bool,
    pub beta_star: Option<BetaStar>,
    pub cycle_1: Option<Vec<Label>>,
    pub cycle_2: Option<Vec<Label>>,
}

pub fn cmd_cycle(args: &CycleArgs, format: OutputFormat) -> CliResult<CycleReport> {
    let cfg = resolve_config(&args.game)?;
    let built = build_game(&cfg)?;
    let g = &built.solved;
    let labels = |idx: Option<Vec<usize>>, ls: &[Label]| idx.map(|c| c.into_iter().map(|i| ls[i].clone()).collect());
    let report = if args.pure {
        let seq = pure_best_response_sequence(g, (0, 0), args.horizon);
        let s1: Vec<usize> = seq.iter().map(|s| s.0).collect();
        let s2: Vec<usize> = seq.iter().map(|s| s.1).collect();
        CycleReport {
            beta: None,
            pure: true,
            beta_star: None,
            cycle_1: labels(detect_cycle(&s1, 0, 3), g.labels_1()),
            cycle_2: labels(detect_cycle(&s2, 0, 3), g.labels_2()),
        }
    } else {
        let beta = args.beta.expect("required unless pure");
        let model = cfg.choice_model()?;
        let (start, beta_star) = match args.start {
            CycleStart::Uniform => (g.uniform_profile(), None),
            CycleStart::PStar => {
                let res = evolutionary_path(g, model, &cfg.path_options())?;
                (res.p_star, Some(res.beta_star))
            }
        };
        let opts = CycleOptions {
            horizon: args.horizon,
            ..CycleOptions::default()
        };
        let c = best_response_cycle(g, &start, beta, model, &opts)?;
        CycleReport {
            beta: Some(beta),
            pure: false,
            beta_star,
            cycle_1: labels(c.cycle_1, g.labels_1()),
            cycle_2: labels(c.cycle_2, g.labels_2()),
        }
    };
    let text = match format {
        OutputFormat::Json => to_json(&report)?,
        OutputFormat::Csv => {
            let mut w = csv_writer();
            w.write_record(["player", "position", "label"]).map_err(csv_err)?;
            for (player, c) in [(1, &report.cycle_1), (2, &report.cycle_2)] {
                for (k, l) in c.iter().flatten().enumerate() {
                    w.write_record([player.to_string(), k.to_string(), l.to_string()])
                        .map_err(csv_err)?;
                }
            }
            csv_finish(w)?
        }
    };
    emit(args.out.as_deref(), &text)?;
    Ok(report)
}

pub fn table_csv(name: &str, cells: &[tables::TableCell]) -> CliResult<String> {
    let mut w = csv_writer();
    w.write_record(["table", "row", "column", "computed", "reference", "delta"])
        .map_err(csv_err)?;
    for c in cells {
        w.write_record([
            name.to_string(),
            c.row.clone(),
            c.column.clone(),
            fmt_g9(c.computed),
            c.reference.map_or(String::new(), fmt_g9),
            c.delta().map_or(String::new(), fmt_g9),
        ])
        .map_err(csv_err)?;
    }
    csv_finish(w)
}

pub fn cmd_table(args: &TableArgs, format: OutputFormat) -> CliResult<Vec<tables::TableCell>> {
    let name: TableName = args.name.parse()?;
    let cells = tables::compute(name)?;
    let text = match format {
        OutputFormat::Csv => {
            let mut s = table_csv(&args.name, &cells)?;
            let _ = writeln!(s, "# max_abs_delta,{}", fmt_g9(tables::max_abs_delta(&cells)));
            s
        }
        OutputFormat::Json => to_json(&serde_json::json!({
            "table": args.name,
            "cells": cells,
            "max_abs_delta": tables::max_abs_delta(&cells),
        }))?,
    };
    emit(args.out.as_deref(), &text)?;
    Ok(cells)
}

pub fn cmd_dump_game(args: &DumpArgs, format: OutputFormat) -> CliResult<BimatrixGame> {
    let cfg = resolve_config(&args.game)?;
    let built = build_game(&cfg)?;
    let g = built.solved;
    let text = match format {
        OutputFormat::Json => {
            let mut s = g.to_json();
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let mut w = csv_writer();
            w.write_record(["label_1", "label_2", "payoff_1", "payoff_2"])
                .map_err(csv_err)?;
            for (i, l1) in g.labels_1().iter().enumerate() {
                for (j, l2) in g.labels_2().iter().enumerate() {
                    w.write_record([
                        l1.to_string(),
                        l2.to_string(),
                        fmt_g9(g.payoff_1()[(i, j)]),
                        fmt_g9(g.payoff_2()[(i, j)]),
                    ])
                    .map_err(csv_err)?;
                }
            }
            csv_finish(w)?
        }
    };
    emit(args.out.as_deref(), &text)?;
    Ok(g)
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Solve(a) => cmd_solve(a, cli.format).map(drop),
        Command::Sweep(a) => cmd_sweep(a, cli.format).map(drop),
        Command::Cycle(a) => cmd_cycle(a, cli.format).map(drop),
        Command::Table(a) => cmd_table(a, cli.format).map(drop),
        Command::DumpGame(a) => cmd_dump_game(a, cli.format).map(drop),
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => Err(config_err(format!("thread pool: {e}"))),
        },
        None => dispatch(&cli),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("limitqre: {e}");
            e.exit_code()
        }
    }
}
