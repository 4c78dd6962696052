//! Experimental exit frequencies for centipede trees.

use serde::Serialize;

use crate::error::Result;
use crate::game::{BimatrixGame, MixedProfile, PayoffVectors};

use super::trees::centipede_mp6;

/// Observed stopping nodes in the six-node game, 29 plays (last entry: no exit).
pub const MP_NODE_COUNTS: [f64; 7] = [0.0, 3.0, 3.0, 9.0, 10.0, 3.0, 1.0];

/// Published per-player exit-strategy frequencies for a centipede tree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalDataset {
    pub name: &'static str,
    pub citation: &'static str,
    /// `"mp6"` or `"nt12"`.
    pub tree: &'static str,
    pub profile: MixedProfile,
}

fn percent(name: &'static str, citation: &'static str, p1: [f64; 4], p2: [f64; 4]) -> EmpiricalDataset {
    EmpiricalDataset {
        name,
        citation,
        tree: "mp6",
        profile: MixedProfile::normalized(p1.to_vec(), p2.to_vec()).expect("positive weights"),
    }
}

impl EmpiricalDataset {
    /// Six-node data, strategies inferred from node counts by hazard rates.
    pub fn mp() -> Self {
        let profile = centipede_mp6(false)
            .tree
            .strategies_from_node_masses(&MP_NODE_COUNTS)
            .expect("valid counts");
        Self {
            name: "MP",
            citation: "McKelvey and Palfrey (1992)",
            tree: "mp6",
            profile,
        }
    }

    pub fn kt() -> Self {
        percent(
            "KT",
            "Kawagoe and Takizawa (2012)",
            [2.3, 2.3, 62.7, 32.6],
            [2.3, 7.1, 69.7, 20.9],
        )
    }

    pub fn pvhs() -> Self {
        percent(
            "PVHs",
            "Palacios-Huerta and Volij (2009)",
            [7.5, 41.8, 40.6, 10.1],
            [16.2, 59.1, 24.6, 0.0],
        )
    }

    pub fn sls() -> Self {
        percent(
            "SLS",
            "Levitt, List and Sadoff (2011)",
            [3.9, 18.6, 45.5, 32.0],
            [10.2, 31.6, 36.8, 21.4],
        )
    }

    /// Twelve-node data, per-player strategy frequencies.
    pub fn nt() -> Self {
        Self {
            name: "NT",
            citation: "Nagel and Tang (1998)",
            tree: "nt12",
            profile: MixedProfile::normalized(
                vec![0.005, 0.016, 0.054, 0.261, 0.331, 0.225, 0.108],
                vec![0.009, 0.017, 0.113, 0.331, 0.311, 0.143, 0.076],
            )
            .expect("positive weights"),
        }
    }

    /// The four six-node datasets, in table order.
    pub fn six_node() -> Vec<Self> {
        vec![Self::mp(), Self::kt(), Self::pvhs(), Self::sls()]
    }
}

/// Expected payoff of each exit strategy against the opponent's empirical distribution.
pub fn empirical_payoff_table(game: &BimatrixGame, empirical: &MixedProfile) -> Result<PayoffVectors> {
    game.expected_payoff_vectors(empirical)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mp_strategies_from_counts() {
        let d = EmpiricalDataset::mp();
        let want1 = [0.0, 11.5, 63.2, 25.3];
        // The printed row is rounded to sum to 100, so 10.34 appears as 10.4.
        let want2 = [10.4, 35.1, 40.9, 13.6];
        for (x, w) in d.profile.p1.iter().zip(want1) {
            assert!((100.0 * x - w).abs() < 0.07, "{x}");
        }
        for (x, w) in d.profile.p2.iter().zip(want2) {
            assert!((100.0 * x - w).abs() < 0.07, "{x}");
        }
    }

    #[test]
    fn point_mass_on_earliest_exit_flattens_payoffs() {
        let t = centipede_mp6(false);
        let p = MixedProfile::pure(4, 0, 4, 0);
        let u = empirical_payoff_table(&t.game, &p).unwrap();
        assert!(u.u1.iter().skip(1).all(|x| *x == u.u1[1]));
        assert!(u.u2.iter().all(|x| *x == 1.0));
    }
}
