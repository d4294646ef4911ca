//! Closed-form relative efficiencies of the estimators and reproduction of
//! the published comparison tables.
//!
//! Every efficiency is a ratio of closed-form variances, so the rate θ₂
//! cancels and never appears here.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{aux_constants, delta_r, stage_ratio};

pub mod reference;

/// Grid shared by all three tables.
pub const TABLE_SET_SIZES: [usize; 9] = [2, 4, 6, 8, 10, 15, 20, 25, 30];
pub const TABLE_LAMBDAS: [f64; 4] = [0.25, 0.5, 0.75, 1.0];
pub const TABLE1_ALPHAS: [f64; 4] = [0.8, 1.0, 2.0, 5.0];
pub const TABLE2_ALPHAS: [f64; 2] = [0.8, 1.0];
pub const TABLE3_ALPHAS: [f64; 2] = [2.0, 5.0];
pub const TABLE_STAGES: [Stages; 5] = [
    Stages::Finite(1),
    Stages::Finite(2),
    Stages::Finite(5),
    Stages::Finite(13),
    Stages::Infinite,
];

/// Stage count for the multistage efficiencies; `Infinite` selects the
/// steady-state limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stages {
    Finite(u32),
    Infinite,
}

impl fmt::Display for Stages {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stages::Finite(l) => write!(f, "{l}"),
            Stages::Infinite => write!(f, "inf"),
        }
    }
}

/// Which efficiency a value belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EffStat {
    E1,
    E2,
    E5,
}

impl fmt::Display for EffStat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EffStat::E1 => write!(f, "e1"),
            EffStat::E2 => write!(f, "e2"),
            EffStat::E5 => write!(f, "e5"),
        }
    }
}

fn check_grid(n: usize, alpha2: f64, lambda: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::SetSizeTooSmall(n));
    }
    if !(alpha2 > 0.0) {
        return Err(Error::NonPositive {
            name: "alpha2",
            value: alpha2,
        });
    }
    if !(-1.0..=1.0).contains(&lambda) {
        return Err(Error::OutOfRange {
            name: "lambda",
            low: -1.0,
            high: 1.0,
            value: lambda,
        });
    }
    Ok(())
}

/// Efficiency of the BLUE relative to the plain RSS mean:
/// e1 = (C(α₂)/n) Σ_r H²(α₂,r)/W(α₂,r). Always ≥ 1; equals 1 at λ = 0.
pub fn e1(n: usize, alpha2: f64, lambda: f64) -> Result<f64> {
    check_grid(n, alpha2, lambda)?;
    let aux = aux_constants(alpha2)?;
    let c2 = aux_constants(2.0 * alpha2)?.c;
    let mut sum = 0.0;
    for r in 1..=n {
        let d = delta_r(n, r, lambda)?;
        let h = 1.0 - d * aux.d / aux.b;
        let w = aux.c + d * (c2 - aux.c);
        sum += h * h / w;
    }
    Ok(aux.c / n as f64 * sum)
}

/// Efficiency of the ERSS₂ estimator relative to the RSS mean:
/// e2 = 2nC / [(2n−1)C + 4λ²D²/((n+1)²(n+2))].
///
/// The ERSS₂ scheme itself needs odd n; the published grid nevertheless
/// tabulates this formula at even n too, so no parity check is applied.
pub fn e2(n: usize, alpha2: f64, lambda: f64) -> Result<f64> {
    check_grid(n, alpha2, lambda)?;
    let aux = aux_constants(alpha2)?;
    let nf = n as f64;
    let cov = 4.0 * lambda * lambda * aux.d * aux.d / ((nf + 1.0) * (nf + 1.0) * (nf + 2.0));
    Ok(2.0 * nf * aux.c / ((2.0 * nf - 1.0) * aux.c + cov))
}

/// Efficiency of the stage-l maximum-selection estimator relative to the
/// RSS mean: e5 = C ξ²_{nˡ} / γ_{nˡ}. `Stages::Infinite` gives the
/// steady-state value (e4), which does not depend on n; l = 1 gives e3.
pub fn e5(n: usize, alpha2: f64, lambda: f64, stages: Stages) -> Result<f64> {
    check_grid(n, alpha2, lambda)?;
    if lambda <= 0.0 {
        return Err(Error::LambdaNotPositive(lambda));
    }
    let aux = aux_constants(alpha2)?;
    let c2 = aux_constants(2.0 * alpha2)?.c;
    let ratio = match stages {
        Stages::Finite(l) if l >= 1 => stage_ratio(n, l),
        Stages::Finite(_) => {
            return Err(Error::InvalidScheme("stage count must be at least 1".into()))
        }
        Stages::Infinite => 1.0,
    };
    let xi = 1.0 + lambda * ratio * aux.d / aux.b;
    let gamma = aux.c + lambda * ratio * (aux.c - c2);
    Ok(aux.c * xi * xi / gamma)
}

/// Single-stage (URSS) efficiency: e3 = e5 with l = 1.
pub fn e3(n: usize, alpha2: f64, lambda: f64) -> Result<f64> {
    e5(n, alpha2, lambda, Stages::Finite(1))
}

/// Steady-state efficiency e4 = C Z²/I; independent of n.
pub fn e4(alpha2: f64, lambda: f64) -> Result<f64> {
    e5(2, alpha2, lambda, Stages::Infinite)
}

/// One evaluation point of a table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyRow {
    pub n: usize,
    pub lambda: f64,
    pub alpha2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stages: Option<Stages>,
    pub values: BTreeMap<EffStat, f64>,
}

/// Which published table to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TableId {
    One,
    Two,
    Three,
}

impl TableId {
    pub fn from_number(which: u8) -> Result<Self> {
        match which {
            1 => Ok(TableId::One),
            2 => Ok(TableId::Two),
            3 => Ok(TableId::Three),
            other => Err(Error::InvalidScheme(format!(
                "table number must be 1, 2, or 3, got {other}"
            ))),
        }
    }

    pub fn number(&self) -> u8 {
        match self {
            TableId::One => 1,
            TableId::Two => 2,
            TableId::Three => 3,
        }
    }

    /// Decimal places the published table prints.
    pub fn printed_decimals(&self) -> u32 {
        match self {
            TableId::One => 4,
            TableId::Two | TableId::Three => 3,
        }
    }

    pub fn alphas(&self) -> &'static [f64] {
        match self {
            TableId::One => &TABLE1_ALPHAS,
            TableId::Two => &TABLE2_ALPHAS,
            TableId::Three => &TABLE3_ALPHAS,
        }
    }
}

/// Compute every cell of a table on the published grid. Pass negative
/// lambdas through `build_table_rows` for the extension grid instead.
pub fn build_table(which: TableId) -> Vec<EfficiencyRow> {
    build_table_rows(which, &TABLE_LAMBDAS).expect("published grid is valid")
}

/// Table rows over an arbitrary λ list (λ > 0 required for tables 2-3).
pub fn build_table_rows(which: TableId, lambdas: &[f64]) -> Result<Vec<EfficiencyRow>> {
    let mut rows = Vec::new();
    for &n in &TABLE_SET_SIZES {
        for &lambda in lambdas {
            for &alpha2 in which.alphas() {
                match which {
                    TableId::One => {
                        let mut values = BTreeMap::new();
                        values.insert(EffStat::E1, e1(n, alpha2, lambda)?);
                        values.insert(EffStat::E2, e2(n, alpha2, lambda)?);
                        rows.push(EfficiencyRow {
                            n,
                            lambda,
                            alpha2,
                            stages: None,
                            values,
                        });
                    }
                    TableId::Two | TableId::Three => {
                        for &stages in &TABLE_STAGES {
                            let mut values = BTreeMap::new();
                            values.insert(EffStat::E5, e5(n, alpha2, lambda, stages)?);
                            rows.push(EfficiencyRow {
                                n,
                                lambda,
                                alpha2,
                                stages: Some(stages),
                                values,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(rows)
}

/// Round half-to-even at `dp` decimal places.
pub fn round_half_even(x: f64, dp: u32) -> f64 {
    let scale = 10f64.powi(dp as i32);
    (x * scale).round_ties_even() / scale
}

/// The value scaled to an integer at `dp` decimals, for exact cell
/// comparisons against printed values.
pub fn scaled_cell(x: f64, dp: u32) -> i64 {
    (x * 10f64.powi(dp as i32)).round_ties_even() as i64
}

/// Output format of a rendered table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Json,
    Markdown,
}

impl std::str::FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(TableFormat::Csv),
            "json" => Ok(TableFormat::Json),
            "md" | "markdown" => Ok(TableFormat::Markdown),
            other => Err(Error::InvalidScheme(format!("unknown format {other:?}"))),
        }
    }
}

/// Column headers in the published layout (after the n and λ columns).
fn value_headers(which: TableId) -> Vec<String> {
    let mut headers = Vec::new();
    match which {
        TableId::One => {
            for &alpha in which.alphas() {
                headers.push(format!("e1_a{alpha:.1}"));
                headers.push(format!("e2_a{alpha:.1}"));
            }
        }
        TableId::Two | TableId::Three => {
            for &alpha in which.alphas() {
                for stages in &TABLE_STAGES {
                    headers.push(format!("e5_a{alpha:.1}_l{stages}"));
                }
            }
        }
    }
    headers
}

/// Pivot computed rows into the published row layout: one line per (n, λ)
/// with the α (and stage) combinations across the columns.
fn pivot(which: TableId, rows: &[EfficiencyRow], dp: u32) -> Vec<(usize, f64, Vec<String>)> {
    let mut out: Vec<(usize, f64, Vec<String>)> = Vec::new();
    for row in rows {
        let printed = format!("{:.*}", dp as usize, round_half_even(row.cell(), dp));
        match out.last_mut() {
            Some((n, lambda, cells)) if *n == row.n && *lambda == row.lambda => {
                cells.push(printed)
            }
            _ => out.push((row.n, row.lambda, vec![printed])),
        }
    }
    debug_assert!(out
        .iter()
        .all(|(_, _, cells)| cells.len() == value_headers(which).len()));
    out
}

impl EfficiencyRow {
    /// The single table cell this row carries (tables print one value per
    /// (n, λ, α, l) combination; table 1 prints the e1/e2 pair as two cells).
    fn cell(&self) -> f64 {
        debug_assert_eq!(self.values.len(), 1);
        *self.values.values().next().expect("one value per pivot row")
    }

    fn cells(&self) -> impl Iterator<Item = (EffStat, f64)> + '_ {
        self.values.iter().map(|(&k, &v)| (k, v))
    }
}

/// Render a table. `dp` controls printed decimals (the published precision
/// by default); rows with negative λ, when present, follow the published
/// grid and are a non-published extension clearly recognizable by their
/// λ values.
pub fn render_table(
    which: TableId,
    rows: &[EfficiencyRow],
    format: TableFormat,
    dp: u32,
) -> String {
    // flatten table-1 rows (two stats per row) into per-cell rows for pivoting
    let flat: Vec<EfficiencyRow> = rows
        .iter()
        .flat_map(|row| {
            row.cells().map(move |(stat, value)| {
                let mut values = BTreeMap::new();
                values.insert(stat, value);
                EfficiencyRow {
                    values,
                    ..row.clone()
                }
            })
        })
        .collect();
    let headers = value_headers(which);
    let lines = pivot(which, &flat, dp);
    match format {
        TableFormat::Csv => {
            let mut out = String::from("n,lambda");
            for h in &headers {
                out.push(',');
                out.push_str(h);
            }
            out.push('\n');
            for (n, lambda, cells) in lines {
                out.push_str(&format!("{n},{lambda}"));
                for c in cells {
                    out.push(',');
                    out.push_str(&c);
                }
                out.push('\n');
            }
            out
        }
        TableFormat::Markdown => {
            let mut out = String::new();
            out.push_str(&format!("| n | lambda | {} |\n", headers.join(" | ")));
            out.push_str(&format!("|---|---|{}\n", "---|".repeat(headers.len())));
            for (n, lambda, cells) in lines {
                out.push_str(&format!("| {n} | {lambda} | {} |\n", cells.join(" | ")));
            }
            out
        }
        TableFormat::Json => serde_json::to_string_pretty(rows).expect("rows serialize"),
    }
}
