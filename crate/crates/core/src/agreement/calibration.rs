use serde::Serialize;

use crate::error::{Error, Result};

/// Normal quantile for 95% limits of agreement.
pub const LOA_Z: f64 = 1.96;

/// Leave-one-out calibration of one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LooFit {
    /// Intercept fitted on all other points.
    pub alpha: f64,
    /// Slope fitted on all other points.
    pub beta: f64,
    /// `alpha + beta * bench` for the held-out point.
    pub calibrated: f64,
}

/// For each point `i`, fits `bench ≈ alpha + beta * human` by ordinary least
/// squares on every other point and applies the fit to `bench_i`.
///
/// `pairs` holds `(human, bench)` per model.
pub fn loo_calibrate(pairs: &[(f64, f64)]) -> Result<Vec<LooFit>> {
    let n = pairs.len();
    if n < 4 {
        return Err(Error::InsufficientData { needed: 4, got: n });
    }
    if pairs.iter().any(|(h, b)| !(h.is_finite() && b.is_finite())) {
        return Err(Error::Domain("calibration inputs must be finite".into()));
    }
    (0..n)
        .map(|held_out| {
            let rest: Vec<(f64, f64)> = pairs
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != held_out)
                .map(|(_, p)| *p)
                .collect();
            let first_h = rest[0].0;
            if rest.iter().all(|(h, _)| *h == first_h) {
                return Err(Error::SingularFit(held_out));
            }
            let m = rest.len() as f64;
            let mean_h = rest.iter().map(|p| p.0).sum::<f64>() / m;
            let mean_b = rest.iter().map(|p| p.1).sum::<f64>() / m;
            let (mut sxy, mut sxx) = (0.0, 0.0);
            for (h, b) in &rest {
                sxy += (h - mean_h) * (b - mean_b);
                sxx += (h - mean_h).powi(2);
            }
            if sxx == 0.0 {
                return Err(Error::SingularFit(held_out));
            }
            let beta = sxy / sxx;
            let alpha = mean_b - beta * mean_h;
            Ok(LooFit {
                alpha,
                beta,
                calibrated: alpha + beta * pairs[held_out].1,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlandAltman {
    pub n: usize,
    /// Mean difference.
    pub bias: f64,
    /// Sample standard deviation of the differences (n − 1 denominator).
    pub sd: f64,
    pub loa_low: f64,
    pub loa_high: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlandAltmanPoint {
    pub mean: f64,
    pub diff: f64,
}

pub fn bland_altman_from_differences(diffs: &[f64]) -> Result<BlandAltman> {
    let n = diffs.len();
    if n < 3 {
        return Err(Error::InsufficientData { needed: 3, got: n });
    }
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(Error::Domain("differences must be finite".into()));
    }
    let bias = diffs.iter().sum::<f64>() / n as f64;
    let var = diffs.iter().map(|d| (d - bias).powi(2)).sum::<f64>() / (n - 1) as f64;
    let sd = var.sqrt();
    Ok(BlandAltman {
        n,
        bias,
        sd,
        loa_low: bias - LOA_Z * sd,
        loa_high: bias + LOA_Z * sd,
    })
}

/// Agreement between `bench` and calibrated human scores, given as
/// `(bench, calibrated)` pairs.
pub fn bland_altman(points: &[(f64, f64)]) -> Result<(BlandAltman, Vec<BlandAltmanPoint>)> {
    let per_point: Vec<BlandAltmanPoint> = points
        .iter()
        .map(|(b, h)| BlandAltmanPoint {
            mean: (b + h) / 2.0,
            diff: b - h,
        })
        .collect();
    let diffs: Vec<f64> = per_point.iter().map(|p| p.diff).collect();
    let summary = bland_altman_from_differences(&diffs)?;
    Ok((summary, per_point))
}
