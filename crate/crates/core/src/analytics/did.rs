//! Difference-in-differences on open rates via a saturated 2×2 linear
//! probability model.
//!
//! With regressors `1, early, treat, early*treat` the OLS solution equals
//! the cell-mean contrasts, so the fit is computed in closed form.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::engagement::EngagementRecord;
use crate::composer::Condition;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiDCoefficients {
    pub intercept: f64,
    pub early_exposure: f64,
    pub message: f64,
    pub interaction: f64,
}

/// One of the four (exposure, arm) cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cell {
    pub early: bool,
    pub treated: bool,
}

impl Cell {
    pub const ALL: [Cell; 4] = [
        Cell { early: false, treated: false },
        Cell { early: true, treated: false },
        Cell { early: false, treated: true },
        Cell { early: true, treated: true },
    ];

    pub fn name(&self) -> &'static str {
        match (self.early, self.treated) {
            (false, false) => "late/control",
            (true, false) => "early/control",
            (false, true) => "late/treatment",
            (true, true) => "early/treatment",
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum DidError {
    #[error("no emails in the {0} cell")]
    EmptyCell(&'static str),
    #[error("the treatment condition must differ from control")]
    ControlAsTreatment,
}

impl DiDCoefficients {
    /// Implied open probability of a cell.
    pub fn cell_probability(&self, cell: Cell) -> f64 {
        let e = if cell.early { 1.0 } else { 0.0 };
        let t = if cell.treated { 1.0 } else { 0.0 };
        self.intercept + self.early_exposure * e + self.message * t + self.interaction * e * t
    }

    /// Every implied cell probability lies in `[0, 1]`.
    pub fn is_valid(&self) -> bool {
        Cell::ALL.iter().all(|c| {
            let p = self.cell_probability(*c);
            p.is_finite() && (0.0..=1.0).contains(&p)
        })
    }

    /// Coefficients from the four cell means.
    pub fn from_cell_means(late_ctl: f64, early_ctl: f64, late_trt: f64, early_trt: f64) -> Self {
        let intercept = late_ctl;
        let early_exposure = early_ctl - intercept;
        let message = late_trt - intercept;
        let interaction = early_trt - intercept - early_exposure - message;
        Self {
            intercept,
            early_exposure,
            message,
            interaction,
        }
    }
}

/// Per-cell counts of emails and opens.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CellCounts {
    pub n: [u64; 4],
    pub opened: [u64; 4],
}

impl CellCounts {
    fn slot(cell: Cell) -> usize {
        (cell.early as usize) + 2 * (cell.treated as usize)
    }

    pub fn add(&mut self, cell: Cell, opened: bool) {
        let s = Self::slot(cell);
        self.n[s] += 1;
        self.opened[s] += u64::from(opened);
    }

    pub fn mean(&self, cell: Cell) -> Result<f64, DidError> {
        let s = Self::slot(cell);
        if self.n[s] == 0 {
            return Err(DidError::EmptyCell(cell.name()));
        }
        Ok(self.opened[s] as f64 / self.n[s] as f64)
    }

    pub fn count(&self, cell: Cell) -> u64 {
        self.n[Self::slot(cell)]
    }
}

/// Tallies control emails and emails of `treatment`; other conditions are
/// ignored.
pub fn cell_counts(logs: &[EngagementRecord], treatment: Condition) -> Result<CellCounts, DidError> {
    if treatment == Condition::Control {
        return Err(DidError::ControlAsTreatment);
    }
    let mut counts = CellCounts::default();
    for r in logs {
        let treated = if r.condition == treatment {
            true
        } else if r.condition == Condition::Control {
            false
        } else {
            continue;
        };
        counts.add(Cell { early: r.early, treated }, r.opened);
    }
    Ok(counts)
}

pub fn did_fit(logs: &[EngagementRecord], treatment: Condition) -> Result<DiDCoefficients, DidError> {
    let counts = cell_counts(logs, treatment)?;
    let [late_ctl, early_ctl, late_trt, early_trt] = Cell::ALL.map(|c| counts.mean(c));
    Ok(DiDCoefficients::from_cell_means(
        late_ctl?, early_ctl?, late_trt?, early_trt?,
    ))
}
