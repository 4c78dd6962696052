//! Published reference tables and their recomputation, reported cell by cell.

use rayon::prelude::*;
use serde::Serialize;

use crate::auctions::{auction_payoff_matrix, AuctionFormat, AuctionSpec, BidFunction};
use crate::choice::ChoiceModel;
use crate::error::{QreError, Result};
use crate::library::{centipede_mp6, four_action_game, EmpiricalDataset};
use crate::path::{evolutionary_path, thick_barrier_scan, BarrierScanOptions, BetaStar, PathOptions, Termination};

/// One compared cell: `delta = computed - reference` when both are finite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableCell {
    pub row: String,
    pub column: String,
    pub computed: f64,
    pub reference: Option<f64>,
}

impl TableCell {
    fn new(row: impl Into<String>, column: impl Into<String>, computed: f64, reference: Option<f64>) -> Self {
        Self {
            row: row.into(),
            column: column.into(),
            computed,
            reference,
        }
    }

    pub fn delta(&self) -> Option<f64> {
        match self.reference {
            Some(r) if r.is_finite() && self.computed.is_finite() => Some(self.computed - r),
            Some(r) if r == self.computed => Some(0.0),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TableName {
    Table1,
    Table2,
    Table3,
    TableT1,
}

impl std::str::FromStr for TableName {
    type Err = QreError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "table1" => Ok(TableName::Table1),
            "table2" => Ok(TableName::Table2),
            "table3" => Ok(TableName::Table3),
            "tablet1" | "t1" => Ok(TableName::TableT1),
            _ => Err(QreError::InvalidParameter(format!(
                "unknown table {s}; expected table1, table2, table3 or tableT1"
            ))),
        }
    }
}

/// Computes the named table with default solver settings.
pub fn compute(name: TableName) -> Result<Vec<TableCell>> {
    match name {
        TableName::Table1 => table1_cells(TABLE1_THETA),
        TableName::Table2 => Ok(table2_cells(&table2(
            &PathOptions::default(),
            &BarrierScanOptions::default(),
        )?)),
        TableName::Table3 => table3_cells(),
        TableName::TableT1 => table_t1_cells(),
    }
}

/// Parameter value used when tabulating the four-action game.
pub const TABLE1_THETA: f64 = 0.9;

/// Player-1 payoffs of the four-action game at `theta`, row by row.
pub fn table1_reference(theta: f64) -> [[f64; 4]; 4] {
    [
        [0.0, 0.0, 2.0, theta],
        [2.0, 0.0, 0.0, 0.0],
        [0.0, 2.0, 0.0, 0.0],
        [0.0, 0.0, 2.0, 1.0],
    ]
}

fn table1_cells(theta: f64) -> Result<Vec<TableCell>> {
    let g = four_action_game(theta)?;
    let reference = table1_reference(theta);
    let mut cells = Vec::new();
    for (i, row) in reference.iter().enumerate() {
        for (j, r) in row.iter().enumerate() {
            cells.push(TableCell::new(
                format!("{}", i + 1),
                format!("{}", j + 1),
                g.payoff_1()[(i, j)],
                Some(*r),
            ));
        }
    }
    Ok(cells)
}

/// Printed row of the four-action results table. `None` precision means unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Table2Reference {
    pub theta: f64,
    pub p_star: [f64; 4],
    pub beta_star: Option<f64>,
    pub barrier: Option<f64>,
}

pub const TABLE2_REFERENCE: [Table2Reference; 4] = [
    Table2Reference {
        theta: 0.49,
        p_star: [0.0, 0.0, 0.0, 1.0],
        beta_star: None,
        barrier: None,
    },
    Table2Reference {
        theta: 0.5,
        p_star: [0.23, 0.19, 0.15, 0.43],
        beta_star: Some(3.02),
        barrier: Some(3.24),
    },
    Table2Reference {
        theta: 0.7,
        p_star: [0.26, 0.22, 0.18, 0.34],
        beta_star: Some(2.62),
        barrier: Some(7.24),
    },
    Table2Reference {
        theta: 0.9,
        p_star: [0.28, 0.23, 0.19, 0.30],
        beta_star: Some(2.42),
        barrier: Some(29.0),
    },
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table2Row {
    pub theta: f64,
    pub beta_star: BetaStar,
    pub termination: Termination,
    /// Player-1 limit distribution (the game is symmetric).
    pub p_star: Vec<f64>,
    pub barrier: Option<f64>,
}

/// Evolutionary path and restabilization scan for every reference `θ`.
pub fn table2(path: &PathOptions, barrier: &BarrierScanOptions) -> Result<Vec<Table2Row>> {
    TABLE2_REFERENCE
        .par_iter()
        .map(|r| {
            let g = four_action_game(r.theta)?;
            let res = evolutionary_path(&g, ChoiceModel::Logit, path)?;
            let barrier = if res.termination == Termination::BetaCapReached {
                None
            } else {
                thick_barrier_scan(&g, &res, ChoiceModel::Logit, barrier)?
            };
            Ok(Table2Row {
                theta: r.theta,
                beta_star: res.beta_star,
                termination: res.termination,
                p_star: res.p_star.p1.clone(),
                barrier,
            })
        })
        .collect()
}

pub fn table2_cells(rows: &[Table2Row]) -> Vec<TableCell> {
    let mut cells = Vec::new();
    for (row, r) in rows.iter().zip(TABLE2_REFERENCE.iter()) {
        let name = format!("theta={}", row.theta);
        for (k, (x, y)) in row.p_star.iter().zip(r.p_star).enumerate() {
            cells.push(TableCell::new(&name, format!("p{}", k + 1), *x, Some(y)));
        }
        let b = row.beta_star.finite().unwrap_or(f64::INFINITY);
        cells.push(TableCell::new(
            &name,
            "beta_star",
            b,
            Some(r.beta_star.unwrap_or(f64::INFINITY)),
        ));
        cells.push(TableCell::new(
            &name,
            "barrier",
            row.barrier.unwrap_or(f64::NAN),
            r.barrier,
        ));
    }
    cells
}

/// Printed all-pay payoff matrix: `σ = 0.3`, `δ = 0.1`, last strategy the
/// Bayesian equilibrium bid at `σ = 0.3`.
pub const TABLE3_REFERENCE: [[f64; 11]; 11] = [
    [0.61, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.94, 0.51, -0.01, -0.09, -0.09, -0.1, -0.1, -0.1, -0.1, -0.1, 0.08],
    [0.84, 0.8, 0.4, 0.03, -0.12, -0.17, -0.19, -0.2, -0.2, -0.2, 0.12],
    [0.73, 0.73, 0.6, 0.3, 0.02, -0.14, -0.22, -0.27, -0.29, -0.3, 0.14],
    [0.63, 0.63, 0.59, 0.43, 0.19, -0.01, -0.17, -0.27, -0.33, -0.36, 0.16],
    [0.52, 0.52, 0.51, 0.44, 0.28, 0.09, -0.08, -0.22, -0.32, -0.39, 0.16],
    [0.42, 0.42, 0.41, 0.38, 0.29, 0.14, -0.01, -0.16, -0.28, -0.38, 0.15],
    [0.31, 0.31, 0.31, 0.3, 0.25, 0.15, 0.02, -0.11, -0.24, -0.35, 0.12],
    [0.21, 0.21, 0.21, 0.2, 0.17, 0.11, 0.01, -0.1, -0.22, -0.33, 0.07],
    [0.1, 0.1, 0.1, 0.1, 0.09, 0.05, -0.01, -0.11, -0.21, -0.32, 0.01],
    [0.61, 0.51, 0.4, 0.3, 0.19, 0.09, 0.0, -0.1, -0.18, -0.25, 0.18],
];

pub fn table3_spec() -> AuctionSpec {
    AuctionSpec::new(AuctionFormat::AllPay, 0.3, 0.1).with_extra(BidFunction::bayesian_allpay(0.3))
}

fn table3_cells() -> Result<Vec<TableCell>> {
    let g = auction_payoff_matrix(&table3_spec())?;
    let labels = g.labels_1();
    let mut cells = Vec::new();
    for (i, row) in TABLE3_REFERENCE.iter().enumerate() {
        for (j, r) in row.iter().enumerate() {
            cells.push(TableCell::new(
                labels[i].to_string(),
                labels[j].to_string(),
                g.payoff_1()[(i, j)],
                Some(*r),
            ));
        }
    }
    Ok(cells)
}

/// Printed expected gains against each dataset, six-node tree payoffs × 10.
/// Columns are player 1 at dates 1, 3, 5, never and player 2 at 2, 4, 6, never.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableT1Reference {
    pub dataset: &'static str,
    pub player_1: [f64; 4],
    pub player_2: [f64; 4],
}

pub const TABLE_T1_REFERENCE: [TableT1Reference; 4] = [
    TableT1Reference {
        dataset: "MP",
        player_1: [40.0, 145.0, 379.0, 510.0],
        player_2: [80.0, 287.0, 429.0, 267.0],
    },
    TableT1Reference {
        dataset: "KT",
        player_1: [40.0, 156.0, 585.0, 764.0],
        player_2: [78.0, 306.0, 519.0, 310.0],
    },
    TableT1Reference {
        dataset: "PVHs",
        player_1: [40.0, 137.0, 208.0, 129.0],
        player_2: [74.0, 179.0, 212.0, 147.0],
    },
    TableT1Reference {
        dataset: "SLS",
        player_1: [40.0, 145.0, 400.0, 693.0],
        player_2: [77.0, 256.0, 490.0, 285.0],
    },
];

/// Scale applied to the six-node tree payoffs in the expected-gains table.
pub const TABLE_T1_SCALE: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableT1Row {
    pub dataset: &'static str,
    pub citation: &'static str,
    pub player_1: Vec<f64>,
    pub player_2: Vec<f64>,
}

/// Expected gain of each exit strategy against every six-node dataset.
pub fn table_t1() -> Result<Vec<TableT1Row>> {
    let g = centipede_mp6(false)
        .game
        .rescale_payoffs(TABLE_T1_SCALE, TABLE_T1_SCALE)?;
    EmpiricalDataset::six_node()
        .into_iter()
        .map(|d| {
            let u = g.expected_payoff_vectors(&d.profile)?;
            Ok(TableT1Row {
                dataset: d.name,
                citation: d.citation,
                player_1: u.u1,
                player_2: u.u2,
            })
        })
        .collect()
}

fn table_t1_cells() -> Result<Vec<TableCell>> {
    let rows = table_t1()?;
    let dates_1 = ["1", "3", "5", "never"];
    let dates_2 = ["2", "4", "6", "never"];
    let mut cells = Vec::new();
    for (row, r) in rows.iter().zip(TABLE_T1_REFERENCE.iter()) {
        for (k, d) in dates_1.iter().enumerate() {
            cells.push(TableCell::new(
                row.dataset,
                format!("p1:{d}"),
                row.player_1[k],
                Some(r.player_1[k]),
            ));
        }
        for (k, d) in dates_2.iter().enumerate() {
            cells.push(TableCell::new(
                row.dataset,
                format!("p2:{d}"),
                row.player_2[k],
                Some(r.player_2[k]),
            ));
        }
    }
    Ok(cells)
}

/// Largest absolute delta over cells with a finite reference.
pub fn max_abs_delta(cells: &[TableCell]) -> f64 {
    cells
        .iter()
        .filter_map(TableCell::delta)
        .map(f64::abs)
        .fold(0.0, f64::max)
}
