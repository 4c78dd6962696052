//! Constructors for the game families used throughout the crate.

mod centipede;
mod empirical;
mod money_request;
mod simple;
mod trees;

pub use centipede::{centipede, CentipedeSpec, Pie, Share, Timing};
pub use empirical::{empirical_payoff_table, EmpiricalDataset, MP_NODE_COUNTS};
pub use money_request::{money_request, MoneyRequestSpec, MoneyRequestVersion, Variant};
pub use simple::{four_action_game, rock_paper_scissors, travelers_claims, travelers_dilemma};
pub use trees::{centipede_mp6, centipede_nt12, CentipedeTree, TreeGame};
