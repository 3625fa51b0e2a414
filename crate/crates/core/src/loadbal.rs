//! Post-allocation rebalancing: idle nodes donate a fraction of their grant
//! to a pot that overloaded nodes split in proportion to their excess load.

use alloc::vec::Vec;

use crate::domain::{AllocationPlan, DomainError, NodeState, Pool};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields, default))]
pub struct RebalanceParams {
    /// Fraction of an idle node's grant that moves to the pot.
    pub transfer_frac: f64,
}

impl Default for RebalanceParams {
    fn default() -> Self {
        RebalanceParams { transfer_frac: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeClass {
    Overloaded,
    Nominal,
    Idle,
}

/// Overloaded strictly above the threshold, idle strictly below
/// `idle_frac * l_threshold`, nominal in between (inclusive on both edges).
pub fn classify(l: f64, l_threshold: f64, idle_frac: f64) -> NodeClass {
    if l > l_threshold {
        NodeClass::Overloaded
    } else if l < idle_frac * l_threshold {
        NodeClass::Idle
    } else {
        NodeClass::Nominal
    }
}

/// Shifts spectrum from idle donors to overloaded recipients.
///
/// Every donated hertz lands on some recipient: shares are proportional to
/// excess load `l - l_threshold`, except the last recipient in plan order,
/// which takes the exact remainder of the pot. With no overloaded node the
/// plan is returned unchanged.
pub fn rebalance(
    plan: &AllocationPlan,
    nodes: &[NodeState],
    pool: &Pool,
    idle_frac: f64,
    params: &RebalanceParams,
) -> Result<AllocationPlan, DomainError> {
    let load_of = |id: &str| -> Result<f64, DomainError> {
        nodes
            .iter()
            .find(|n| n.node_id == id)
            .map(|n| n.l_current)
            .ok_or_else(|| DomainError::UnknownNodeId(id.into()))
    };

    let mut donors: Vec<usize> = Vec::new();
    let mut recipients: Vec<(usize, f64)> = Vec::new(); // (entry idx, excess)
    for (i, e) in plan.entries.iter().enumerate() {
        let l = load_of(&e.node_id)?;
        match classify(l, pool.l_threshold, idle_frac) {
            NodeClass::Overloaded => recipients.push((i, l - pool.l_threshold)),
            NodeClass::Idle => donors.push(i),
            NodeClass::Nominal => {}
        }
    }

    if recipients.is_empty() {
        return Ok(plan.clone());
    }

    let mut entries = plan.entries.clone();
    let mut pot = 0.0f64;
    for &i in &donors {
        let donation = params.transfer_frac * entries[i].final_hz;
        entries[i].final_hz -= donation;
        pot += donation;
    }

    let total_excess: f64 = recipients.iter().map(|&(_, ex)| ex).sum();
    let mut given = 0.0f64;
    for (j, &(i, ex)) in recipients.iter().enumerate() {
        let share = if j + 1 == recipients.len() {
            pot - given // exact remainder: nothing donated is lost
        } else {
            pot * (ex / total_excess)
        };
        entries[i].final_hz += share;
        given += share;
    }

    AllocationPlan::new(plan.interval_index, entries, pool.b_avail_hz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{PlanEntry, PriorityMix, REL_TOL};
    use crate::rng::Pcg32;
    use alloc::string::String;
    use alloc::vec;

    fn node(id: &str, l: f64) -> NodeState {
        let mut n = NodeState::new(String::from(id), PriorityMix::default()).unwrap();
        n.l_current = l;
        n
    }

    fn plan_of(finals: &[(&str, f64)], b: f64) -> AllocationPlan {
        let entries = finals
            .iter()
            .map(|&(id, hz)| PlanEntry {
                node_id: String::from(id),
                raw_sigmoid_hz: hz,
                final_hz: hz,
            })
            .collect();
        AllocationPlan::new(0, entries, b).unwrap()
    }

    #[test]
    fn classify_edges() {
        assert_eq!(classify(1.5, 1.0, 0.25), NodeClass::Overloaded);
        assert_eq!(classify(1.0, 1.0, 0.25), NodeClass::Nominal); // threshold itself
        assert_eq!(classify(0.25, 1.0, 0.25), NodeClass::Nominal); // idle edge
        assert_eq!(classify(0.2, 1.0, 0.25), NodeClass::Idle);
        assert_eq!(classify(0.0, 1.0, 0.25), NodeClass::Idle);
    }

    #[test]
    fn idle_donates_half_to_overloaded() {
        let plan = plan_of(&[("N0", 40e6), ("N1", 30e6)], 100e6);
        let nodes = vec![node("N0", 0.1), node("N1", 1.8)];
        let pool = Pool { b_avail_hz: 100e6, l_threshold: 1.0, sensitivity_k: 1.0 };
        let out = rebalance(&plan, &nodes, &pool, 0.25, &RebalanceParams::default()).unwrap();
        assert_eq!(out.get("N0").unwrap().final_hz, 20e6);
        assert_eq!(out.get("N1").unwrap().final_hz, 50e6);
    }

    #[test]
    fn equal_excess_splits_pot_evenly() {
        let plan = plan_of(&[("N0", 20e6), ("N1", 35e6), ("N2", 35e6)], 100e6);
        let nodes = vec![node("N0", 0.0), node("N1", 2.0), node("N2", 2.0)];
        let pool = Pool { b_avail_hz: 100e6, l_threshold: 1.0, sensitivity_k: 1.0 };
        let out = rebalance(&plan, &nodes, &pool, 0.25, &RebalanceParams::default()).unwrap();
        // Pot is 10 MHz; both recipients are one full unit over threshold.
        assert_eq!(out.get("N0").unwrap().final_hz, 10e6);
        assert_eq!(out.get("N1").unwrap().final_hz, 40e6);
        assert_eq!(out.get("N2").unwrap().final_hz, 40e6);
    }

    #[test]
    fn pot_split_tracks_excess_ratio() {
        let plan = plan_of(&[("N0", 40e6), ("N1", 30e6), ("N2", 30e6)], 100e6);
        let nodes = vec![node("N0", 0.0), node("N1", 4.0), node("N2", 2.0)];
        let pool = Pool { b_avail_hz: 100e6, l_threshold: 1.0, sensitivity_k: 1.0 };
        let out = rebalance(&plan, &nodes, &pool, 0.25, &RebalanceParams::default()).unwrap();
        // Excesses 3:1 over a 20 MHz pot.
        assert!((out.get("N1").unwrap().final_hz - 45e6).abs() < 1.0);
        assert!((out.get("N2").unwrap().final_hz - 35e6).abs() < 1.0);
    }

    #[test]
    fn no_overload_means_no_change() {
        let plan = plan_of(&[("N0", 40e6), ("N1", 30e6)], 100e6);
        let nodes = vec![node("N0", 0.0), node("N1", 0.9)];
        let pool = Pool { b_avail_hz: 100e6, l_threshold: 1.0, sensitivity_k: 1.0 };
        let out = rebalance(&plan, &nodes, &pool, 0.25, &RebalanceParams::default()).unwrap();
        assert_eq!(out, plan);
    }

    #[test]
    fn overload_without_donors_changes_nothing_material() {
        let plan = plan_of(&[("N0", 50e6), ("N1", 50e6)], 100e6);
        let nodes = vec![node("N0", 2.0), node("N1", 0.9)];
        let pool = Pool { b_avail_hz: 100e6, l_threshold: 1.0, sensitivity_k: 1.0 };
        let out = rebalance(&plan, &nodes, &pool, 0.25, &RebalanceParams::default()).unwrap();
        assert_eq!(out.get("N0").unwrap().final_hz, 50e6);
        assert_eq!(out.get("N1").unwrap().final_hz, 50e6);
    }

    #[test]
    fn unknown_plan_node_is_an_error() {
        let plan = plan_of(&[("N0", 40e6), ("N9", 30e6)], 100e6);
        let nodes = vec![node("N0", 0.0)];
        let pool = Pool { b_avail_hz: 100e6, l_threshold: 1.0, sensitivity_k: 1.0 };
        let err = rebalance(&plan, &nodes, &pool, 0.25, &RebalanceParams::default());
        assert!(matches!(err, Err(DomainError::UnknownNodeId(id)) if id == "N9"));
    }

    #[test]
    fn random_plans_conserve_spectrum() {
        let mut rng = Pcg32::with_stream(99, 3);
        let pool = Pool { b_avail_hz: 200e6, l_threshold: 1.0, sensitivity_k: 1.0 };
        for round in 0..300 {
            let n = 1 + (rng.next_u32() % 20) as usize;
            let mut finals = Vec::new();
            let mut nodes = Vec::new();
            let mut budget = pool.b_avail_hz;
            for i in 0..n {
                let hz = rng.next_f64() * budget / 2.0;
                budget -= hz;
                let id = alloc::format!("N{i:02}");
                finals.push(PlanEntry {
                    node_id: id.clone(),
                    raw_sigmoid_hz: hz,
                    final_hz: hz,
                });
                nodes.push(node(&id, rng.next_f64() * 5.0));
            }
            let plan = AllocationPlan::new(round, finals, pool.b_avail_hz).unwrap();
            let out = rebalance(&plan, &nodes, &pool, 0.25, &RebalanceParams::default()).unwrap();
            let drift = (out.total_final_hz - plan.total_final_hz).abs();
            assert!(drift <= pool.b_avail_hz * REL_TOL, "drift {drift}");
            assert!(out.entries.iter().all(|e| e.final_hz >= 0.0));
        }
    }
}
