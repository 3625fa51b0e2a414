//! Legacy comparison policy: a static even split of the pool plus a
//! proportional-fair scheduler for single-carrier contention.

use alloc::vec;
use alloc::vec::Vec;

use crate::domain::{check_distinct_ids, AllocationPlan, DomainError, NodeState, PlanEntry, Pool};

/// Floor for the smoothed-throughput average so the PF metric stays finite.
pub const PF_EPSILON_BPS: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields, default))]
pub struct BaselineParams {
    /// Averaging horizon of the PF throughput filter, in ticks.
    pub t_pf_ticks: u64,
    /// When set, the pool is a single carrier: one node transmits per tick,
    /// chosen by the PF metric, and gets the whole pool for that tick.
    pub contention_mode: bool,
}

impl Default for BaselineParams {
    fn default() -> Self {
        BaselineParams { t_pf_ticks: 100, contention_mode: false }
    }
}

/// Every node gets `b / n`, asleep or not — this policy has no sleep states
/// and no demand feedback.
pub fn fixed_split(
    interval_index: u64,
    nodes: &[NodeState],
    pool: &Pool,
) -> Result<AllocationPlan, DomainError> {
    if nodes.is_empty() {
        return Err(DomainError::EmptyNodeList);
    }
    check_distinct_ids(nodes)?;
    pool.validate()?;
    let share = pool.b_avail_hz / nodes.len() as f64;
    let entries = nodes
        .iter()
        .map(|n| PlanEntry { node_id: n.node_id.clone(), raw_sigmoid_hz: share, final_hz: share })
        .collect::<Vec<_>>();
    AllocationPlan::new(interval_index, entries, pool.b_avail_hz)
}

/// Per-node smoothed throughput for the PF metric.
#[derive(Debug, Clone, PartialEq)]
pub struct PfState {
    pub avg_tput_bps: Vec<f64>,
}

impl PfState {
    pub fn new(n_nodes: usize) -> Self {
        PfState { avg_tput_bps: vec![PF_EPSILON_BPS; n_nodes] }
    }
}

/// Picks the transmitter: the node with the highest instantaneous-rate to
/// smoothed-throughput ratio among those with queued demand. Rates derive
/// from the node's nominal grant. Ties keep the earliest index, so with
/// id-sorted inputs ties break toward the lowest node id. `None` when no
/// node has demand.
pub fn pf_select(
    nodes: &[NodeState],
    alloc_hz: &[f64],
    spectral_efficiency: f64,
    state: &PfState,
) -> Option<usize> {
    debug_assert_eq!(nodes.len(), alloc_hz.len());
    debug_assert_eq!(nodes.len(), state.avg_tput_bps.len());
    let mut best: Option<(usize, f64)> = None;
    for (i, n) in nodes.iter().enumerate() {
        if n.demand_bits == 0 {
            continue;
        }
        let metric = (alloc_hz[i] * spectral_efficiency) / state.avg_tput_bps[i];
        match best {
            Some((_, m)) if metric <= m => {}
            _ => best = Some((i, metric)),
        }
    }
    best.map(|(i, _)| i)
}

/// Exponential update of every node's smoothed throughput:
/// `avg' = max((1 - 1/t) avg + (1/t) served_rate, epsilon)`.
pub fn pf_update(state: &mut PfState, served_bits: &[u64], dt_s: f64, t_pf_ticks: u64) {
    debug_assert_eq!(state.avg_tput_bps.len(), served_bits.len());
    let w = 1.0 / t_pf_ticks as f64;
    for (avg, &bits) in state.avg_tput_bps.iter_mut().zip(served_bits) {
        let rate = bits as f64 / dt_s;
        *avg = ((1.0 - w) * *avg + w * rate).max(PF_EPSILON_BPS);
    }
}
