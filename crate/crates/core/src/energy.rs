//! Power accounting and the idle-to-sleep state machine.

use crate::domain::{NodeState, PowerMode};
use crate::loadbal::NodeClass;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields, default))]
pub struct PowerParams {
    pub p_sleep_w: f64,
    pub p_base_w: f64,
    /// Dynamic draw per allocated hertz.
    pub k_dyn_w_per_hz: f64,
}

impl Default for PowerParams {
    fn default() -> Self {
        PowerParams { p_sleep_w: 2.0, p_base_w: 10.0, k_dyn_w_per_hz: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields, default))]
pub struct SleepPolicy {
    /// Load below `idle_frac * l_threshold` counts as idle.
    pub idle_frac: f64,
    /// Consecutive idle ticks before a node parks.
    pub idle_ticks_to_sleep: u64,
    /// Queued demand wakes a sleeping node at the next control interval.
    pub wake_on_demand: bool,
}

impl Default for SleepPolicy {
    fn default() -> Self {
        SleepPolicy { idle_frac: 0.25, idle_ticks_to_sleep: 50, wake_on_demand: true }
    }
}

/// Instantaneous draw: parked radios cost `p_sleep_w`, active ones
/// `p_base_w + k_dyn * allocated_hz`.
pub fn node_power_w(node: &NodeState, params: &PowerParams) -> f64 {
    match node.power_mode {
        PowerMode::Sleep => {
            debug_assert_eq!(node.allocated_bw_hz, 0.0, "sleeping node holds spectrum");
            params.p_sleep_w
        }
        PowerMode::Active => params.p_base_w + params.k_dyn_w_per_hz * node.allocated_bw_hz,
    }
}

/// Advances one node's sleep state by a tick. Returns the new mode and idle
/// streak; the caller is responsible for zeroing the grant of a node that
/// just parked.
pub fn update_sleep(
    mode: PowerMode,
    idle_streak: u64,
    demand_bits: u64,
    class: NodeClass,
    policy: &SleepPolicy,
) -> (PowerMode, u64) {
    if demand_bits > 0 && policy.wake_on_demand {
        return (PowerMode::Active, 0);
    }
    match mode {
        PowerMode::Sleep => (PowerMode::Sleep, idle_streak.saturating_add(1)),
        PowerMode::Active => {
            if class == NodeClass::Idle {
                let streak = idle_streak + 1;
                if streak >= policy.idle_ticks_to_sleep {
                    (PowerMode::Sleep, streak)
                } else {
                    (PowerMode::Active, streak)
                }
            } else {
                (PowerMode::Active, 0)
            }
        }
    }
}

/// Joules spent this tick across the site.
pub fn accumulate_energy(node_watts: &[f64], dt_s: f64) -> f64 {
    node_watts.iter().sum::<f64>() * dt_s
}
