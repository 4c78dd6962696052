//! Extensive-form centipede trees reduced to exit-node strategies.

use serde::Serialize;

use crate::error::{QreError, Result};
use crate::game::{BimatrixGame, Label, MixedProfile};

/// Alternating-move centipede tree reduced to exit-date strategies.
///
/// Node `n` (1-based) belongs to player 1 when `n` is odd and to player 2
/// when even. A strategy is the node at which the player exits, or `never`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentipedeTree {
    pub name: String,
    /// Payoffs `(u1, u2)` when the game stops at node `n`, in node order.
    pub leaves: Vec<(f64, f64)>,
    /// Payoffs when nobody exits.
    pub terminal: (f64, f64),
    /// Removes player 2's `never` strategy so the last move is an exit.
    pub constrain_last_exit: bool,
}

/// A reduced tree together with its bimatrix form.
#[derive(Debug, Clone)]
pub struct TreeGame {
    pub tree: CentipedeTree,
    pub game: BimatrixGame,
}

const NEVER: &str = "never";

/// Six-node exponential centipede (McKelvey and Palfrey, 1992).
pub fn centipede_mp6(constrain_last_exit: bool) -> TreeGame {
    CentipedeTree {
        name: "mp6".into(),
        leaves: vec![
            (4.0, 1.0),
            (2.0, 8.0),
            (16.0, 4.0),
            (8.0, 32.0),
            (64.0, 16.0),
            (32.0, 128.0),
        ],
        terminal: (256.0, 64.0),
        constrain_last_exit,
    }
    .into_game()
}

/// Twelve-node exponential centipede (Nagel and Tang, 1998).
pub fn centipede_nt12(constrain_last_exit: bool) -> TreeGame {
    CentipedeTree {
        name: "nt12".into(),
        leaves: vec![
            (4.0, 1.0),
            (2.0, 5.0),
            (8.0, 2.0),
            (3.0, 11.0),
            (16.0, 4.0),
            (6.0, 22.0),
            (32.0, 8.0),
            (11.0, 45.0),
            (64.0, 16.0),
            (22.0, 90.0),
            (128.0, 32.0),
            (44.0, 180.0),
        ],
        terminal: (256.0, 64.0),
        constrain_last_exit,
    }
    .into_game()
}

impl CentipedeTree {
    pub fn nodes(&self) -> usize {
        self.leaves.len()
    }

    fn owner_nodes(&self, player: usize) -> Vec<usize> {
        (1..=self.nodes()).filter(|n| (n % 2 == 1) == (player == 0)).collect()
    }

    /// Exit node of each strategy; `None` is `never`.
    pub fn strategies(&self, player: usize) -> Vec<Option<usize>> {
        let mut s: Vec<Option<usize>> = self.owner_nodes(player).into_iter().map(Some).collect();
        let last_is_players = self.nodes().is_multiple_of(2) == (player == 1);
        if !(self.constrain_last_exit && player == 1 && last_is_players) {
            s.push(None);
        }
        s
    }

    fn labels(&self, player: usize) -> Vec<Label> {
        self.strategies(player)
            .into_iter()
            .map(|s| match s {
                Some(n) => Label::Num(n as f64),
                None => Label::text(NEVER),
            })
            .collect()
    }

    /// Node where play stops, or `None` when it reaches the terminal node.
    fn stop(a: Option<usize>, b: Option<usize>) -> Option<usize> {
        match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) | (None, x) => x,
        }
    }

    pub fn into_game(self) -> TreeGame {
        let s1 = self.strategies(0);
        let s2 = self.strategies(1);
        let game = BimatrixGame::from_fn(self.labels(0), self.labels(1), |i, j| match Self::stop(s1[i], s2[j]) {
            Some(n) => self.leaves[n - 1],
            None => self.terminal,
        })
        .expect("tree games have at least two strategies per player")
        .with_metadata("family", "centipede-tree")
        .with_metadata("tree", self.name.clone())
        .with_metadata("constrain_last_exit", self.constrain_last_exit);
        TreeGame { tree: self, game }
    }

    /// Probability that play stops at each node (last entry: terminal node)
    /// when exit strategies are drawn independently from `p`.
    pub fn terminal_node_distribution(&self, p: &MixedProfile) -> Result<Vec<f64>> {
        let s = [self.strategies(0), self.strategies(1)];
        if p.p1.len() != s[0].len() || p.p2.len() != s[1].len() {
            return Err(QreError::DimensionMismatch(
                "profile does not match the tree's strategy sets".into(),
            ));
        }
        let mut masses = vec![0.0; self.nodes() + 1];
        for (i, a) in s[0].iter().enumerate() {
            for (j, b) in s[1].iter().enumerate() {
                let slot = Self::stop(*a, *b).map_or(self.nodes(), |n| n - 1);
                masses[slot] += p.p1[i] * p.p2[j];
            }
        }
        Ok(masses)
    }

    /// Strategy distributions reproducing the given node masses: each node's
    /// hazard `m_n / Σ_{j≥n} m_j` is the owner's conditional exit probability.
    pub fn strategies_from_node_masses(&self, masses: &[f64]) -> Result<MixedProfile> {
        if masses.len() != self.nodes() + 1 {
            return Err(QreError::DimensionMismatch(format!(
                "expected {} node masses, got {}",
                self.nodes() + 1,
                masses.len()
            )));
        }
        let total: f64 = masses.iter().sum();
        if !(total > 0.0) || masses.iter().any(|m| *m < 0.0) {
            return Err(QreError::InvalidProfile(
                "node masses must be nonnegative with positive total".into(),
            ));
        }
        let m: Vec<f64> = masses.iter().map(|x| x / total).collect();
        let hazard = |n: usize| {
            let tail: f64 = m[n - 1..].iter().sum();
            if tail > 0.0 {
                m[n - 1] / tail
            } else {
                0.0
            }
        };
        let mut out = [Vec::new(), Vec::new()];
        for (player, dist) in out.iter_mut().enumerate() {
            let mut survive = 1.0;
            for s in self.strategies(player) {
                match s {
                    Some(n) => {
                        let h = hazard(n);
                        dist.push(survive * h);
                        survive *= 1.0 - h;
                    }
                    None => dist.push(survive),
                }
            }
            if self.strategies(player).last().is_some_and(Option::is_some) {
                // Constrained player: the final exit absorbs any remaining mass.
                *dist.last_mut().expect("nonempty") += survive;
            }
        }
        let [p1, p2] = out;
        MixedProfile::normalized(p1, p2)
    }
}
