//! Demand-driven spectrum allocation: a logistic curve maps each node's load
//! ratio to a raw claim on the pool, then priority tiering normalizes the
//! claims so the pool is never oversubscribed.

use alloc::vec::Vec;

use crate::domain::{
    check_distinct_ids, AllocationPlan, DomainError, NodeState, PlanEntry, Pool, PowerMode,
};

/// Fraction of the pool a node at load `l` asks for:
/// `1 / (1 + e^(-k (l - l_threshold)))`.
///
/// Exactly 0.5 at the threshold; approaches 1 under heavy overload and the
/// floor `sigma(-k * l_threshold)` as the node idles.
pub fn sigmoid_share(l: f64, l_threshold: f64, k: f64) -> f64 {
    1.0 / (1.0 + libm::exp(-k * (l - l_threshold)))
}

/// A node's pre-normalization claim in Hz. Asleep nodes have no claim.
pub fn raw_share_hz(node: &NodeState, pool: &Pool) -> Result<f64, DomainError> {
    if node.power_mode == PowerMode::Sleep {
        return Err(DomainError::SleepingNode(node.node_id.clone()));
    }
    Ok(pool.b_avail_hz * sigmoid_share(node.l_current, pool.l_threshold, pool.sensitivity_k))
}

/// Builds the interval's plan.
///
/// Nodes carrying at least one VIP tag are granted their raw claim first; if
/// those claims alone exceed the pool they are scaled down proportionally and
/// the standard tier gets nothing. Otherwise standard nodes divide the
/// remainder in proportion to their smoothed usage (equally when no usage has
/// been observed), each capped at its own raw claim. Capacity nobody claims
/// stays idle. Sleeping nodes appear in the plan with a zero grant.
pub fn allocate(
    interval_index: u64,
    nodes: &[NodeState],
    pool: &Pool,
) -> Result<AllocationPlan, DomainError> {
    if nodes.is_empty() {
        return Err(DomainError::EmptyNodeList);
    }
    check_distinct_ids(nodes)?;
    pool.validate()?;
    for n in nodes {
        n.validate()?;
    }

    let b = pool.b_avail_hz;
    let mut entries: Vec<PlanEntry> = Vec::with_capacity(nodes.len());
    // (index into entries, raw claim) per awake node, split by tier.
    let mut vips: Vec<usize> = Vec::new();
    let mut stds: Vec<usize> = Vec::new();

    for n in nodes {
        let raw = if n.power_mode == PowerMode::Sleep {
            0.0
        } else {
            b * sigmoid_share(n.l_current, pool.l_threshold, pool.sensitivity_k)
        };
        let idx = entries.len();
        entries.push(PlanEntry { node_id: n.node_id.clone(), raw_sigmoid_hz: raw, final_hz: 0.0 });
        if n.power_mode == PowerMode::Sleep {
            continue;
        }
        if n.priority_mix.is_vip_tier() {
            vips.push(idx);
        } else {
            stds.push(idx);
        }
    }

    let vip_sum: f64 = vips.iter().map(|&i| entries[i].raw_sigmoid_hz).sum();
    if vip_sum > b {
        // Priority tier alone oversubscribes: scale it, starve the rest.
        let scale = b / vip_sum;
        for &i in &vips {
            entries[i].final_hz = entries[i].raw_sigmoid_hz * scale;
        }
    } else {
        for &i in &vips {
            entries[i].final_hz = entries[i].raw_sigmoid_hz;
        }
        let remaining = b - vip_sum;
        if !stds.is_empty() && remaining > 0.0 {
            let total_usage: f64 = stds
                .iter()
                .map(|&i| nodes_usage(nodes, &entries[i].node_id))
                .sum();
            let n_std = stds.len() as f64;
            for &i in &stds {
                let weight = if total_usage > 0.0 {
                    nodes_usage(nodes, &entries[i].node_id) / total_usage
                } else {
                    1.0 / n_std
                };
                let share = remaining * weight;
                entries[i].final_hz = share.min(entries[i].raw_sigmoid_hz);
            }
        }
    }

    AllocationPlan::new(interval_index, entries, b)
}

fn nodes_usage(nodes: &[NodeState], id: &str) -> f64 {
    // Entries are built from `nodes` in order, so the id always resolves.
    nodes.iter().find(|n| n.node_id == id).map(|n| n.usage_rate_bps).unwrap_or(0.0)
}
