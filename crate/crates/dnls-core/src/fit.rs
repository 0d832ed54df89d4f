//! Log–log convergence-rate fitting.
//!
//! Experiments report per-`N` estimates with standard errors; the fitted
//! slope of `log(estimate)` against `log(N)` is the measured convergence
//! rate. Points are weighted by the inverse variance of `log(estimate)`
//! (delta method: `se(log y) = se(y) / y`).

use crate::error::Error;
use crate::Result;

#[derive(Clone, Copy, Debug)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope. When per-point standard errors were
    /// supplied this is the known-variance weighted-least-squares error;
    /// otherwise it comes from the residual variance.
    pub slope_stderr: f64,
}

/// One point of a convergence sweep: `(n, estimate, stderr)`.
/// Pass `stderr = 0` for deterministic estimates.
pub fn loglog_slope(points: &[(f64, f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "slope fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    let mut xs = Vec::with_capacity(points.len());
    let mut ys = Vec::with_capacity(points.len());
    let mut ws = Vec::with_capacity(points.len());
    let have_se = points.iter().any(|&(_, _, se)| se > 0.0);
    for &(n, est, se) in points {
        if n <= 0.0 || est <= 0.0 {
            return Err(Error::InvalidArgument(
                "slope fit requires positive abscissae and estimates".into(),
            ));
        }
        xs.push(n.ln());
        ys.push(est.ln());
        let w = if have_se {
            // Floor the relative error so an exact point cannot dominate
            // the fit with infinite weight.
            let rel = (se / est).max(1e-6);
            1.0 / (rel * rel)
        } else {
            1.0
        };
        ws.push(w);
    }
    let wsum: f64 = ws.iter().sum();
    let xbar: f64 = xs.iter().zip(&ws).map(|(x, w)| x * w).sum::<f64>() / wsum;
    let ybar: f64 = ys.iter().zip(&ws).map(|(y, w)| y * w).sum::<f64>() / wsum;
    let sxx: f64 = xs.iter().zip(&ws).map(|(x, w)| w * (x - xbar) * (x - xbar)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("slope fit abscissae are all equal".into()));
    }
    let sxy: f64 = xs
        .iter()
        .zip(ys.iter())
        .zip(&ws)
        .map(|((x, y), w)| w * (x - xbar) * (y - ybar))
        .sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let slope_stderr = if have_se {
        (1.0 / sxx).sqrt()
    } else {
        let dof = (points.len() - 2) as f64;
        let ss_res: f64 = xs
            .iter()
            .zip(ys.iter())
            .map(|(x, y)| {
                let r = y - (intercept + slope * x);
                r * r
            })
            .sum();
        (ss_res / dof / sxx).sqrt()
    };
    Ok(SlopeFit { slope, intercept, slope_stderr })
}
