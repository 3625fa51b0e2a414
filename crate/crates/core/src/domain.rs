//! Shared value types: tags, nodes, pools, plans, scenarios and reports.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::baseline::BaselineParams;
use crate::digest::Fnv64;
use crate::energy::{PowerParams, SleepPolicy};
use crate::forecast::ForecastParams;
use crate::loadbal::RebalanceParams;

/// Ceiling on a node's load ratio; backlog far beyond the previous grant all
/// looks the same to the allocator.
pub const L_CAP: f64 = 10.0;

/// Relative tolerance for pool-conservation checks.
pub const REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum DomainError {
    EmptyNodeList,
    DuplicateNodeId(String),
    UnknownNodeId(String),
    /// Sigmoid shares are undefined for parked radios.
    SleepingNode(String),
    Invalid { field: String, reason: String },
}

impl fmt::Display for DomainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainError::EmptyNodeList => write!(f, "node list is empty"),
            DomainError::DuplicateNodeId(id) => write!(f, "duplicate node id {id:?}"),
            DomainError::UnknownNodeId(id) => write!(f, "unknown node id {id:?}"),
            DomainError::SleepingNode(id) => write!(f, "node {id:?} is asleep"),
            DomainError::Invalid { field, reason } => write!(f, "{field}: {reason}"),
        }
    }
}

impl DomainError {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        DomainError::Invalid { field: field.into(), reason: reason.into() }
    }
}

fn validate_token(field: &str, token: &str) -> Result<(), DomainError> {
    if token.is_empty() || token.len() > 32 {
        return Err(DomainError::invalid(field, "must be 1-32 characters"));
    }
    if !token.bytes().all(|b| b.is_ascii_alphanumeric()) {
        return Err(DomainError::invalid(field, "only ASCII letters and digits allowed"));
    }
    Ok(())
}

/// Tag ids are 1-32 ASCII alphanumerics.
pub fn validate_tag_id(token: &str) -> Result<(), DomainError> {
    validate_token("tag_id", token)
}

/// Node ids share the tag-id alphabet.
pub fn validate_node_id(token: &str) -> Result<(), DomainError> {
    validate_token("node_id", token)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PriorityClass {
    Vip,
    Std,
}

impl PriorityClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            PriorityClass::Vip => "VIP",
            PriorityClass::Std => "STD",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PriorityMix {
    pub vip: u32,
    pub std: u32,
}

impl PriorityMix {
    /// One VIP tag is enough to put the node in the priority tier.
    pub fn is_vip_tier(&self) -> bool {
        self.vip >= 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerMode {
    Active,
    Sleep,
}

/// One tag observation: which tag, where, what class, when.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagEvent {
    pub tag_id: String,
    pub node_id: String,
    pub class: PriorityClass,
    pub timestamp_ms: u64,
}

impl TagEvent {
    pub fn new(
        tag_id: impl Into<String>,
        node_id: impl Into<String>,
        class: PriorityClass,
        timestamp_ms: u64,
    ) -> Result<Self, DomainError> {
        let tag_id = tag_id.into();
        let node_id = node_id.into();
        validate_tag_id(&tag_id)?;
        validate_node_id(&node_id)?;
        Ok(TagEvent { tag_id, node_id, class, timestamp_ms })
    }
}

/// Per-node monitoring state the policies read and the engine maintains.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeState {
    pub node_id: String,
    /// Demand pressure: queued bits over the previous grant's capacity,
    /// capped at [`L_CAP`].
    pub l_current: f64,
    pub demand_bits: u64,
    /// Smoothed served rate; drives the standard-tier proportional split.
    pub usage_rate_bps: f64,
    pub priority_mix: PriorityMix,
    pub power_mode: PowerMode,
    pub allocated_bw_hz: f64,
}

impl NodeState {
    pub fn new(node_id: impl Into<String>, priority_mix: PriorityMix) -> Result<Self, DomainError> {
        let node_id = node_id.into();
        validate_node_id(&node_id)?;
        Ok(NodeState {
            node_id,
            l_current: 0.0,
            demand_bits: 0,
            usage_rate_bps: 0.0,
            priority_mix,
            power_mode: PowerMode::Active,
            allocated_bw_hz: 0.0,
        })
    }

    pub fn validate(&self) -> Result<(), DomainError> {
        validate_node_id(&self.node_id)?;
        if !(self.l_current >= 0.0 && self.l_current.is_finite()) {
            return Err(DomainError::invalid("l_current", "must be finite and non-negative"));
        }
        if !(self.usage_rate_bps >= 0.0 && self.usage_rate_bps.is_finite()) {
            return Err(DomainError::invalid("usage_rate_bps", "must be finite and non-negative"));
        }
        if !(self.allocated_bw_hz >= 0.0 && self.allocated_bw_hz.is_finite()) {
            return Err(DomainError::invalid("allocated_bw_hz", "must be finite and non-negative"));
        }
        if self.power_mode == PowerMode::Sleep && self.allocated_bw_hz != 0.0 {
            return Err(DomainError::invalid("allocated_bw_hz", "sleeping node holds spectrum"));
        }
        Ok(())
    }
}

/// The shared spectrum pool and the operating point of the logistic curve.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Pool {
    pub b_avail_hz: f64,
    pub l_threshold: f64,
    /// Steepness of the logistic curve; 1.0 is the plain form.
    #[cfg_attr(feature = "serde", serde(default = "default_sensitivity_k"))]
    pub sensitivity_k: f64,
}

#[cfg(feature = "serde")]
fn default_sensitivity_k() -> f64 {
    1.0
}

impl Pool {
    pub fn new(b_avail_hz: f64, l_threshold: f64, sensitivity_k: f64) -> Result<Self, DomainError> {
        let pool = Pool { b_avail_hz, l_threshold, sensitivity_k };
        pool.validate()?;
        Ok(pool)
    }

    pub fn validate(&self) -> Result<(), DomainError> {
        if !(self.b_avail_hz > 0.0 && self.b_avail_hz.is_finite()) {
            return Err(DomainError::invalid("pool.b_avail_hz", "must be finite and > 0"));
        }
        if !(self.l_threshold >= 0.0 && self.l_threshold.is_finite()) {
            return Err(DomainError::invalid("pool.l_threshold", "must be finite and >= 0"));
        }
        if !(self.sensitivity_k > 0.0 && self.sensitivity_k.is_finite()) {
            return Err(DomainError::invalid("pool.sensitivity_k", "must be finite and > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanEntry {
    pub node_id: String,
    /// Pre-normalization logistic grant.
    pub raw_sigmoid_hz: f64,
    pub final_hz: f64,
}

/// A per-interval allocation. Entries are sorted by descending grant,
/// ties by ascending node id; the total never exceeds the pool.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationPlan {
    pub interval_index: u64,
    pub entries: Vec<PlanEntry>,
    pub total_final_hz: f64,
}

impl AllocationPlan {
    pub fn new(
        interval_index: u64,
        mut entries: Vec<PlanEntry>,
        b_avail_hz: f64,
    ) -> Result<Self, DomainError> {
        for e in &entries {
            if !(e.final_hz >= 0.0 && e.final_hz.is_finite()) {
                return Err(DomainError::invalid("final_hz", "must be finite and non-negative"));
            }
            if !(e.raw_sigmoid_hz >= 0.0 && e.raw_sigmoid_hz.is_finite()) {
                return Err(DomainError::invalid("raw_sigmoid_hz", "must be finite and non-negative"));
            }
        }
        entries.sort_by(|a, b| {
            b.final_hz
                .total_cmp(&a.final_hz)
                .then_with(|| a.node_id.cmp(&b.node_id))
        });
        let total_final_hz: f64 = entries.iter().map(|e| e.final_hz).sum();
        if total_final_hz > b_avail_hz * (1.0 + REL_TOL) {
            return Err(DomainError::invalid("total_final_hz", "plan exceeds the pool"));
        }
        Ok(AllocationPlan { interval_index, entries, total_final_hz })
    }

    pub fn get(&self, node_id: &str) -> Option<&PlanEntry> {
        self.entries.iter().find(|e| e.node_id == node_id)
    }
}

/// Which policy produced a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Policy {
    Rfid,
    Baseline4g,
}

impl Policy {
    pub fn as_str(&self) -> &'static str {
        match self {
            Policy::Rfid => "rfid",
            Policy::Baseline4g => "baseline4g",
        }
    }
}

impl core::str::FromStr for Policy {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rfid" => Ok(Policy::Rfid),
            "baseline4g" => Ok(Policy::Baseline4g),
            _ => Err(DomainError::invalid("policy", "expected rfid or baseline4g")),
        }
    }
}

/// What one control interval did to the plan, feeding the status readout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanDelta {
    pub sum_final_hz: f64,
    pub b_avail_hz: f64,
    /// Mean excess load of overloaded nodes under the pre-rebalance plan...
    pub mean_excess_before: f64,
    /// ...and under the final plan; both zero when nothing is overloaded.
    pub mean_excess_after: f64,
}

// ---------------------------------------------------------------------------
// Scenario schema
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct SimParams {
    pub tick_dt_s: f64,
    pub duration_ticks: u64,
    pub seed: u64,
    #[cfg_attr(feature = "serde", serde(default = "default_spectral_efficiency"))]
    pub spectral_efficiency_bps_per_hz: f64,
}

#[cfg(feature = "serde")]
fn default_spectral_efficiency() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields, default))]
pub struct TrafficParams {
    pub packet_size_bits: u64,
    /// Arrivals cease from this tick on; `None` means traffic runs forever.
    pub stop_after_tick: Option<u64>,
}

impl Default for TrafficParams {
    fn default() -> Self {
        TrafficParams { packet_size_bits: 12_000, stop_after_tick: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields, default))]
pub struct ReplayParams {
    /// Demand added per tag observation when a feed drives the engine.
    pub bits_per_tag_event: u64,
}

impl Default for ReplayParams {
    fn default() -> Self {
        ReplayParams { bits_per_tag_event: 12_000 }
    }
}

/// A group of identically-configured nodes.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct NodeGroup {
    pub count: u32,
    #[cfg_attr(feature = "serde", serde(default))]
    pub vip_tags: u32,
    #[cfg_attr(feature = "serde", serde(default))]
    pub std_tags: u32,
    pub arrival_rate_pps: f64,
}

/// One expanded node: id plus its group's traffic and tag population.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSpec {
    pub node_id: String,
    pub priority_mix: PriorityMix,
    pub arrival_rate_pps: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Scenario {
    pub sim: SimParams,
    pub pool: Pool,
    #[cfg_attr(feature = "serde", serde(default))]
    pub traffic: TrafficParams,
    #[cfg_attr(feature = "serde", serde(default))]
    pub forecast: ForecastParams,
    #[cfg_attr(feature = "serde", serde(default))]
    pub rebalance: RebalanceParams,
    #[cfg_attr(feature = "serde", serde(default))]
    pub sleep: SleepPolicy,
    #[cfg_attr(feature = "serde", serde(default))]
    pub energy: PowerParams,
    #[cfg_attr(feature = "serde", serde(default))]
    pub baseline: BaselineParams,
    #[cfg_attr(feature = "serde", serde(default))]
    pub replay: ReplayParams,
    pub nodes: Vec<NodeGroup>,
}

impl Scenario {
    pub fn total_nodes(&self) -> u64 {
        self.nodes.iter().map(|g| g.count as u64).sum()
    }

    pub fn validate(&self) -> Result<(), DomainError> {
        let s = &self.sim;
        if !(s.tick_dt_s > 0.0 && s.tick_dt_s.is_finite()) {
            return Err(DomainError::invalid("sim.tick_dt_s", "must be finite and > 0"));
        }
        if s.duration_ticks == 0 {
            return Err(DomainError::invalid("sim.duration_ticks", "must be >= 1"));
        }
        if !(s.spectral_efficiency_bps_per_hz > 0.0 && s.spectral_efficiency_bps_per_hz.is_finite()) {
            return Err(DomainError::invalid("sim.spectral_efficiency_bps_per_hz", "must be finite and > 0"));
        }
        self.pool.validate()?;
        if self.traffic.packet_size_bits == 0 {
            return Err(DomainError::invalid("traffic.packet_size_bits", "must be >= 1"));
        }
        if self.replay.bits_per_tag_event == 0 {
            return Err(DomainError::invalid("replay.bits_per_tag_event", "must be >= 1"));
        }
        let f = &self.forecast;
        if !(f.alpha > 0.0 && f.alpha <= 1.0) {
            return Err(DomainError::invalid("forecast.alpha", "must be in (0, 1]"));
        }
        if f.history_window == 0 {
            return Err(DomainError::invalid("forecast.history_window", "must be >= 1"));
        }
        let r = &self.rebalance;
        if !(r.transfer_frac >= 0.0 && r.transfer_frac <= 1.0) {
            return Err(DomainError::invalid("rebalance.transfer_frac", "must be in [0, 1]"));
        }
        let sl = &self.sleep;
        if !(sl.idle_frac > 0.0 && sl.idle_frac < 1.0) {
            return Err(DomainError::invalid("sleep.idle_frac", "must be in (0, 1)"));
        }
        if sl.idle_ticks_to_sleep == 0 {
            return Err(DomainError::invalid("sleep.idle_ticks_to_sleep", "must be >= 1"));
        }
        let e = &self.energy;
        for (field, v) in [
            ("energy.p_sleep_w", e.p_sleep_w),
            ("energy.p_base_w", e.p_base_w),
            ("energy.k_dyn_w_per_hz", e.k_dyn_w_per_hz),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(DomainError::invalid(field, "must be finite and non-negative"));
            }
        }
        if self.baseline.t_pf_ticks == 0 {
            return Err(DomainError::invalid("baseline.t_pf_ticks", "must be >= 1"));
        }
        if self.nodes.is_empty() {
            return Err(DomainError::invalid("nodes", "at least one node group required"));
        }
        for (i, g) in self.nodes.iter().enumerate() {
            if g.count == 0 {
                return Err(DomainError::invalid(alloc::format!("nodes[{i}].count"), "must be >= 1"));
            }
            if !(g.arrival_rate_pps >= 0.0 && g.arrival_rate_pps.is_finite()) {
                return Err(DomainError::invalid(
                    alloc::format!("nodes[{i}].arrival_rate_pps"),
                    "must be finite and non-negative",
                ));
            }
        }
        Ok(())
    }

    /// Expands groups into nodes `N0..`, zero-padded so lexicographic id
    /// order equals numeric order.
    pub fn expand_nodes(&self) -> Vec<NodeSpec> {
        let total = self.total_nodes();
        let width = {
            let mut w = 1;
            let mut hi = total.saturating_sub(1);
            while hi >= 10 {
                hi /= 10;
                w += 1;
            }
            w
        };
        let mut specs = Vec::with_capacity(total as usize);
        let mut idx = 0u64;
        for g in &self.nodes {
            for _ in 0..g.count {
                specs.push(NodeSpec {
                    node_id: alloc::format!("N{idx:0width$}", idx = idx, width = width),
                    priority_mix: PriorityMix { vip: g.vip_tags, std: g.std_tags },
                    arrival_rate_pps: g.arrival_rate_pps,
                });
                idx += 1;
            }
        }
        specs
    }

    /// FNV-1a 64 over every field in fixed declaration order.
    pub fn digest(&self) -> String {
        let mut h = Fnv64::new();
        h.write_f64(self.sim.tick_dt_s);
        h.write_u64(self.sim.duration_ticks);
        h.write_u64(self.sim.seed);
        h.write_f64(self.sim.spectral_efficiency_bps_per_hz);
        h.write_f64(self.pool.b_avail_hz);
        h.write_f64(self.pool.l_threshold);
        h.write_f64(self.pool.sensitivity_k);
        h.write_u64(self.traffic.packet_size_bits);
        h.write_u64(self.traffic.stop_after_tick.unwrap_or(u64::MAX));
        h.write_f64(self.forecast.alpha);
        h.write_u64(self.forecast.horizon_ticks);
        h.write_u64(self.forecast.history_window as u64);
        h.write_f64(self.rebalance.transfer_frac);
        h.write_f64(self.sleep.idle_frac);
        h.write_u64(self.sleep.idle_ticks_to_sleep);
        h.write_u64(self.sleep.wake_on_demand as u64);
        h.write_f64(self.energy.p_sleep_w);
        h.write_f64(self.energy.p_base_w);
        h.write_f64(self.energy.k_dyn_w_per_hz);
        h.write_u64(self.baseline.t_pf_ticks);
        h.write_u64(self.baseline.contention_mode as u64);
        h.write_u64(self.replay.bits_per_tag_event);
        h.write_u64(self.nodes.len() as u64);
        for g in &self.nodes {
            h.write_u64(g.count as u64);
            h.write_u64(g.vip_tags as u64);
            h.write_u64(g.std_tags as u64);
            h.write_f64(g.arrival_rate_pps);
        }
        h.hex()
    }
}

// ---------------------------------------------------------------------------
// Run output
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Traces {
    pub spectrum_utilization: Vec<f64>,
    pub mean_latency_ms: Vec<f64>,
    pub throughput_bps: Vec<f64>,
    pub energy_joules: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct MetricsReport {
    pub policy: Policy,
    pub scenario_digest: String,
    pub seed: u64,
    pub spectrum_utilization: f64,
    pub mean_latency_ms: f64,
    pub throughput_bps: f64,
    pub energy_joules: f64,
    pub delivered_packets: u64,
    pub traces: Traces,
}

impl MetricsReport {
    pub fn validate(&self) -> Result<(), DomainError> {
        for (field, v) in [
            ("spectrum_utilization", self.spectrum_utilization),
            ("mean_latency_ms", self.mean_latency_ms),
            ("throughput_bps", self.throughput_bps),
            ("energy_joules", self.energy_joules),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(DomainError::invalid(field, "must be finite and non-negative"));
            }
        }
        if self.spectrum_utilization > 1.0 + REL_TOL {
            return Err(DomainError::invalid("spectrum_utilization", "cannot exceed 1"));
        }
        let n = self.traces.spectrum_utilization.len();
        if self.traces.mean_latency_ms.len() != n
            || self.traces.throughput_bps.len() != n
            || self.traces.energy_joules.len() != n
        {
            return Err(DomainError::invalid("traces", "trace lengths differ"));
        }
        Ok(())
    }
}

/// Rejects duplicate ids; used by every plan builder.
pub(crate) fn check_distinct_ids(nodes: &[NodeState]) -> Result<(), DomainError> {
    let mut seen = BTreeSet::new();
    for n in nodes {
        if !seen.insert(n.node_id.as_str()) {
            return Err(DomainError::DuplicateNodeId(n.node_id.clone()));
        }
    }
    Ok(())
}
