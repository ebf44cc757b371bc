//! Locally weighted scatterplot smoothing.
//!
//! Each fitted value is a tricube-weighted linear fit over the
//! `floor(frac * n)` nearest neighbours of the point. The neighbourhood
//! radius is the distance to the farthest neighbour, so that neighbour gets
//! zero weight. Robustness iterations reweight by bisquare residual weights.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LowessError {
    #[error("need at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("frac must lie in (0, 1], got {0}")]
    Frac(f64),
    #[error("non-finite coordinate at index {0}")]
    NonFinite(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LowessParams {
    pub frac: f64,
    /// Robustifying iterations after the initial fit.
    pub iterations: usize,
}

impl Default for LowessParams {
    fn default() -> Self {
        Self {
            frac: 2.0 / 3.0,
            iterations: 0,
        }
    }
}

fn tricube(u: f64) -> f64 {
    if u >= 1.0 {
        0.0
    } else {
        let t = 1.0 - u * u * u;
        t * t * t
    }
}

fn bisquare(u: f64) -> f64 {
    if u >= 1.0 {
        0.0
    } else {
        let t = 1.0 - u * u;
        t * t
    }
}

/// Smoothed values for `points`, returned in input order.
pub fn lowess(points: &[(f64, f64)], frac: f64) -> Result<Vec<f64>, LowessError> {
    lowess_with(points, LowessParams { frac, iterations: 0 })
}

pub fn lowess_with(points: &[(f64, f64)], params: LowessParams) -> Result<Vec<f64>, LowessError> {
    let n = points.len();
    if n < 2 {
        return Err(LowessError::TooFewPoints(n));
    }
    if !(params.frac > 0.0 && params.frac <= 1.0) {
        return Err(LowessError::Frac(params.frac));
    }
    if let Some(i) = points.iter().position(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(LowessError::NonFinite(i));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| points[a].0.total_cmp(&points[b].0).then(a.cmp(&b)));
    let xs: Vec<f64> = order.iter().map(|&i| points[i].0).collect();
    let ys: Vec<f64> = order.iter().map(|&i| points[i].1).collect();

    let k = ((params.frac * n as f64 + 1e-10).floor() as usize).clamp(2, n);
    let mut robust = vec![1.0; n];
    let mut fit = vec![0.0; n];
    let mut weights = vec![0.0; n];

    for iter in 0..=params.iterations {
        let mut left = 0usize;
        for i in 0..n {
            // Slide the k-wide window while it brings the far edge closer.
            while left + k < n && xs[left + k] - xs[i] < xs[i] - xs[left] {
                left += 1;
            }
            let right = left + k;
            let radius = (xs[i] - xs[left]).max(xs[right - 1] - xs[i]);
            fit[i] = local_fit(&xs, &ys, &robust, &mut weights, i, left, right, radius);
        }
        if iter == params.iterations {
            break;
        }
        let mut abs_resid: Vec<f64> = ys.iter().zip(&fit).map(|(y, f)| (y - f).abs()).collect();
        let mut sorted = abs_resid.clone();
        sorted.sort_by(f64::total_cmp);
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        };
        let scale = 6.0 * median;
        let mean_abs = abs_resid.iter().sum::<f64>() / n as f64;
        // Residuals already negligible: further reweighting changes nothing.
        if scale <= 1e-7 * mean_abs || scale == 0.0 {
            break;
        }
        for (w, r) in robust.iter_mut().zip(abs_resid.iter_mut()) {
            *w = bisquare(*r / scale);
        }
    }

    let mut out = vec![0.0; n];
    for (sorted_pos, &orig) in order.iter().enumerate() {
        out[orig] = fit[sorted_pos];
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn local_fit(
    xs: &[f64],
    ys: &[f64],
    robust: &[f64],
    weights: &mut [f64],
    i: usize,
    left: usize,
    right: usize,
    radius: f64,
) -> f64 {
    let x0 = xs[i];
    let mut total = 0.0;
    for j in left..right {
        let w = if radius > 0.0 {
            tricube((xs[j] - x0).abs() / radius)
        } else {
            1.0
        };
        weights[j] = w * robust[j];
        total += weights[j];
    }
    if total <= 0.0 {
        return ys[i];
    }
    let mut xbar = 0.0;
    let mut ybar = 0.0;
    for j in left..right {
        weights[j] /= total;
        xbar += weights[j] * xs[j];
        ybar += weights[j] * ys[j];
    }
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for j in left..right {
        let dx = xs[j] - xbar;
        sxx += weights[j] * dx * dx;
        sxy += weights[j] * dx * (ys[j] - ybar);
    }
    // Degenerate spread in x: fall back to the weighted mean.
    if sxx <= 1e-12 * radius * radius {
        return ybar;
    }
    ybar + (sxy / sxx) * (x0 - xbar)
}
