use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cut points fitted at fixed quantile levels; `edges.len() + 1` bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileBinning {
    pub levels: Vec<f64>,
    pub edges: Vec<f64>,
}

/// Linear-interpolation quantile of an ascending sample at rank `(n - 1) q`.
fn interpolated(sorted: &[f64], q: f64) -> f64 {
    let rank = (sorted.len() - 1) as f64 * q;
    let lo = rank.floor() as usize;
    let frac = rank - lo as f64;
    match sorted.get(lo + 1) {
        Some(&hi) if frac > 0.0 => sorted[lo] + frac * (hi - sorted[lo]),
        _ => sorted[lo],
    }
}

pub fn fit_quantile_bins(values: &[f64], levels: &[f64]) -> Result<QuantileBinning> {
    if values.is_empty() {
        return Err(Error::Fit("quantile bins need at least one value".into()));
    }
    if levels.is_empty() {
        return Err(Error::Fit("at least one quantile level is required".into()));
    }
    if levels.iter().any(|&q| !(q > 0.0 && q < 1.0)) || levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Fit(format!(
            "quantile levels must be strictly ascending inside (0, 1): {levels:?}"
        )));
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("cannot bin value {bad}")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let edges = levels.iter().map(|&q| interpolated(&sorted, q)).collect();
    Ok(QuantileBinning {
        levels: levels.to_vec(),
        edges,
    })
}

impl QuantileBinning {
    pub fn bin_count(&self) -> usize {
        self.edges.len() + 1
    }

    /// Bin `i` holds `edges[i-1] <= x < edges[i]`; the outer bins are unbounded.
    pub fn assign_bin(&self, x: f64) -> Result<usize> {
        if !x.is_finite() {
            return Err(Error::NonFinite(format!("cannot bin value {x}")));
        }
        Ok(self.edges.partition_point(|&edge| edge <= x))
    }
}
