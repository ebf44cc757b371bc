//! Statistical kernels for engagement analysis.

pub mod coefficients;
pub mod did;
pub mod engagement;
pub mod fairness;
pub mod logit;
pub mod lowess;
pub mod welch;

pub use did::{did_fit, Cell, CellCounts, DiDCoefficients, DidError};
pub use engagement::{engagement_summary, ConditionSummary, EngagementRecord};
pub use fairness::{aggregate_h, fairness_from_values, fairness_report, Aggregation, FairnessReport};
pub use logit::{logistic, peak_pct_featured, predict_ctr, CtrCovariates, ModelCoefficients};
pub use lowess::{lowess, lowess_with, LowessError, LowessParams};
pub use welch::{t_two_tailed_p, welch_t, WelchError, WelchResult};
