//! Click-through prediction from published logit coefficients.

use serde::{Deserialize, Serialize};

/// Fixed-effect coefficients of a logit model with a quadratic in the
/// featured fraction. Missing terms deserialize as zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelCoefficients {
    pub intercept: f64,
    pub beta_feat: f64,
    pub beta_feat2: f64,
    pub beta_npapers: f64,
    pub beta_claimed: f64,
    pub beta_hindex: f64,
    pub beta_feat_claimed: f64,
    pub beta_feat2_claimed: f64,
    pub beta_feat_hindex: f64,
    pub beta_feat2_hindex: f64,
}

/// Covariates of a single email.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CtrCovariates {
    pub n_papers_norm: f64,
    pub claimed: bool,
    pub h_norm: f64,
}

pub fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl ModelCoefficients {
    pub fn is_finite(&self) -> bool {
        [
            self.intercept,
            self.beta_feat,
            self.beta_feat2,
            self.beta_npapers,
            self.beta_claimed,
            self.beta_hindex,
            self.beta_feat_claimed,
            self.beta_feat2_claimed,
            self.beta_feat_hindex,
            self.beta_feat2_hindex,
        ]
        .iter()
        .all(|v| v.is_finite())
    }

    /// Linear and quadratic coefficients in the featured fraction once the
    /// interactions are folded in.
    pub fn effective_quadratic(&self, claimed: bool, h_norm: f64) -> (f64, f64) {
        let c = if claimed { 1.0 } else { 0.0 };
        (
            self.beta_feat + self.beta_feat_claimed * c + self.beta_feat_hindex * h_norm,
            self.beta_feat2 + self.beta_feat2_claimed * c + self.beta_feat2_hindex * h_norm,
        )
    }

    /// Linear predictor with the random intercept at zero.
    pub fn linear_predictor(&self, pct_featured: f64, cov: &CtrCovariates) -> f64 {
        let (lin, quad) = self.effective_quadratic(cov.claimed, cov.h_norm);
        let c = if cov.claimed { 1.0 } else { 0.0 };
        self.intercept
            + self.beta_npapers * cov.n_papers_norm
            + self.beta_claimed * c
            + self.beta_hindex * cov.h_norm
            + (lin + quad * pct_featured) * pct_featured
    }
}

pub fn predict_ctr(
    coeffs: &ModelCoefficients,
    pct_featured: f64,
    n_papers_norm: f64,
    claimed: bool,
    h_norm: f64,
) -> f64 {
    let cov = CtrCovariates {
        n_papers_norm,
        claimed,
        h_norm,
    };
    logistic(coeffs.linear_predictor(pct_featured, &cov))
}

const GRID_STEP: f64 = 1e-4;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Featured fraction in `[0, 1]` maximising predicted CTR.
///
/// A coarse grid locates the maximum and golden-section search refines it.
/// Returns `None` when the logit is not concave in the fraction and
/// increases up to the right boundary, i.e. there is no interior optimum.
pub fn peak_pct_featured(coeffs: &ModelCoefficients, claimed: bool, h_norm: f64) -> Option<f64> {
    let (lin, quad) = coeffs.effective_quadratic(claimed, h_norm);
    // The logistic link is monotone, so search the linear predictor, which
    // does not saturate.
    let cov = CtrCovariates {
        n_papers_norm: 0.0,
        claimed,
        h_norm,
    };
    let f = |x: f64| coeffs.linear_predictor(x, &cov);

    let steps = (1.0 / GRID_STEP).round() as usize;
    let mut best_k = 0usize;
    let mut best_v = f(0.0);
    for k in 1..=steps {
        let v = f(k as f64 * GRID_STEP);
        if v > best_v {
            best_v = v;
            best_k = k;
        }
    }
    if quad >= 0.0 && best_k == steps && lin + 2.0 * quad > 0.0 {
        return None;
    }

    let mut lo = (best_k as f64 - 1.0).max(0.0) * GRID_STEP;
    let mut hi = ((best_k + 1) as f64 * GRID_STEP).min(1.0);
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > 1e-12 {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    let x = 0.5 * (lo + hi);
    // Keep exact boundary optima exact.
    let candidates = [x, 0.0, 1.0];
    candidates
        .into_iter()
        .filter(|v| (v - x).abs() <= 2.0 * GRID_STEP)
        .max_by(|a, b| f(*a).partial_cmp(&f(*b)).unwrap_or(std::cmp::Ordering::Equal))
}
