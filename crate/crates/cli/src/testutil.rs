//! Scenario builders shared by the unit tests.

use tagnet_core::baseline::BaselineParams;
use tagnet_core::domain::{NodeGroup, ReplayParams, Scenario, SimParams, TrafficParams};
use tagnet_core::energy::{PowerParams, SleepPolicy};
use tagnet_core::forecast::ForecastParams;
use tagnet_core::loadbal::RebalanceParams;
use tagnet_core::Pool;

pub fn small_scenario(nodes: u32, arrival_rate_pps: f64) -> Scenario {
    Scenario {
        sim: SimParams {
            tick_dt_s: 0.01,
            duration_ticks: 40,
            seed: 9,
            spectral_efficiency_bps_per_hz: 1.0,
        },
        pool: Pool { b_avail_hz: 1e7, l_threshold: 1.0, sensitivity_k: 1.0 },
        traffic: TrafficParams { packet_size_bits: 2000, stop_after_tick: None },
        forecast: ForecastParams::default(),
        rebalance: RebalanceParams::default(),
        sleep: SleepPolicy::default(),
        energy: PowerParams::default(),
        baseline: BaselineParams::default(),
        replay: ReplayParams::default(),
        nodes: vec![NodeGroup { count: nodes, vip_tags: 0, std_tags: 1, arrival_rate_pps }],
    }
}
