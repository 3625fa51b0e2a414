//! Deterministic simulation core for tag-driven radio resource management.
//!
//! Everything in this crate is pure computation over `alloc` collections:
//! the allocation policy, its static 4G-style reference, rebalancing,
//! sleep/energy accounting, load forecasting, the tick engine and the line
//! protocol. File formats, sockets and the CLI live in the companion
//! `tagnet-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod allocator;
pub mod baseline;
pub mod digest;
pub mod domain;
pub mod energy;
pub mod engine;
pub mod forecast;
pub mod loadbal;
pub mod rng;
pub mod wire;

pub use domain::{
    AllocationPlan, DomainError, MetricsReport, NodeState, PlanDelta, PlanEntry, Policy, Pool,
    PowerMode, PriorityClass, PriorityMix, Scenario, TagEvent, Traces,
};
pub use engine::{RunOutcome, RunStats, Simulation};
pub use rng::Pcg32;
