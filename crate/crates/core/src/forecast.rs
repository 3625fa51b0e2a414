//! Exponentially-smoothed load forecasting with a linear trend term.

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields, default))]
pub struct ForecastParams {
    pub alpha: f64,
    /// How many ticks ahead the trend is projected.
    pub horizon_ticks: u64,
    /// Load samples retained per node.
    pub history_window: usize,
}

impl Default for ForecastParams {
    fn default() -> Self {
        ForecastParams { alpha: 0.3, horizon_ticks: 5, history_window: 100 }
    }
}

/// `alpha * obs + (1 - alpha) * prev`.
pub fn ewma_update(prev: f64, obs: f64, alpha: f64) -> f64 {
    alpha * obs + (1.0 - alpha) * prev
}

/// Projects the load `horizon_ticks` ahead.
///
/// The level is an EWMA over the samples seeded with the first; the trend is
/// an EWMA over first differences seeded with the first difference (zero when
/// there are fewer than two samples). The projection is clamped at zero.
pub fn predict_load(history: &[f64], alpha: f64, horizon_ticks: u64) -> f64 {
    let Some(&first) = history.first() else { return 0.0 };
    let mut level = first;
    for &obs in &history[1..] {
        level = ewma_update(level, obs, alpha);
    }
    let mut trend = 0.0;
    if history.len() >= 2 {
        trend = history[1] - history[0];
        for w in history[1..].windows(2) {
            trend = ewma_update(trend, w[1] - w[0], alpha);
        }
    }
    (level + horizon_ticks as f64 * trend).max(0.0)
}

/// Acts early only when the projection crosses the threshold outright.
pub fn proactive_flag(forecast: f64, l_threshold: f64) -> bool {
    forecast > l_threshold
}
