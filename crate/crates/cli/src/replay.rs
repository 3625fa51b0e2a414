//! Feed replay: drives a simulation from recorded tag reads instead of the
//! synthetic traffic model, echoing allocation decisions in wire form.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use tagnet_core::domain::{PriorityClass, PriorityMix, TagEvent};
use tagnet_core::wire::{AllocMsg, FeedParser, Message, StatusMsg};
use tagnet_core::{Policy, Scenario, Simulation};

use crate::error::CliError;
use crate::report::ReportDoc;

/// Tracks which node currently hosts each tag so a re-read at a new location
/// moves the tag (and its priority weight) instead of duplicating it.
#[derive(Default)]
pub struct TagRegistry {
    seen: BTreeMap<String, (String, PriorityClass)>,
}

impl TagRegistry {
    pub fn new() -> Self {
        TagRegistry { seen: BTreeMap::new() }
    }

    /// Applies one tag read: adjusts the priority mixes of the nodes the tag
    /// leaves and enters, then injects the configured demand. Returns the id
    /// of the node the event landed on.
    pub fn apply(
        &mut self,
        sim: &mut Simulation,
        ev: &TagEvent,
        bits_per_event: u64,
    ) -> Result<String, tagnet_core::DomainError> {
        let previous = self.seen.get(&ev.tag_id).cloned();
        let changed = match &previous {
            Some((node, class)) => node != &ev.node_id || *class != ev.class,
            None => true,
        };
        if changed {
            if let Some((old_node, old_class)) = previous {
                let mut mix = self.mix_of(sim, &old_node)?;
                retag(&mut mix, old_class, -1);
                sim.set_priority_mix(&old_node, mix)?;
            }
            let mut mix = self.mix_of(sim, &ev.node_id)?;
            retag(&mut mix, ev.class, 1);
            sim.set_priority_mix(&ev.node_id, mix)?;
            self.seen.insert(ev.tag_id.clone(), (ev.node_id.clone(), ev.class));
        }
        sim.inject_demand(&ev.node_id, bits_per_event)?;
        Ok(ev.node_id.clone())
    }

    fn mix_of(
        &self,
        sim: &Simulation,
        node_id: &str,
    ) -> Result<PriorityMix, tagnet_core::DomainError> {
        let idx = sim
            .node_index(node_id)
            .ok_or_else(|| tagnet_core::DomainError::UnknownNodeId(node_id.into()))?;
        Ok(sim.nodes()[idx].priority_mix)
    }
}

fn retag(mix: &mut PriorityMix, class: PriorityClass, delta: i32) {
    let slot = match class {
        PriorityClass::Vip => &mut mix.vip,
        PriorityClass::Std => &mut mix.std,
    };
    *slot = slot.saturating_add_signed(delta);
}

/// Echoes one control interval's outcome: an ALLOC line per touched node
/// (ascending id) and a single STATUS line.
pub fn emit_interval(
    sim: &Simulation,
    touched: &BTreeSet<String>,
    out: &mut impl Write,
) -> std::io::Result<()> {
    for node_id in touched {
        if let Some(idx) = sim.node_index(node_id) {
            let hz = sim.nodes()[idx].allocated_bw_hz;
            let msg = Message::Alloc(AllocMsg::new(node_id.clone(), hz).expect("valid alloc"));
            writeln!(out, "{msg}")?;
        }
    }
    if let Some(delta) = sim.last_delta() {
        writeln!(out, "{}", Message::Status(StatusMsg::from_delta(&delta)))?;
    }
    Ok(())
}

/// Replays a feed file against a scenario. Event timestamps are mapped to
/// control intervals; events beyond the scenario horizon are dropped with a
/// note on stderr.
pub fn replay_file(
    feed_path: &Path,
    scenario: &Scenario,
    policy: Policy,
    out_path: &Path,
) -> Result<(), CliError> {
    let text = fs::read_to_string(feed_path).map_err(|e| CliError::io(feed_path, e))?;
    let mut parser = FeedParser::new();
    let mut events: Vec<(u64, TagEvent)> = Vec::new();
    let ms_per_tick = scenario.sim.tick_dt_s * 1000.0;
    let mut dropped = 0u64;
    for line in text.lines() {
        match parser.push_line(line) {
            Ok(Some(ev)) => {
                let tick = (ev.timestamp_ms as f64 / ms_per_tick) as u64;
                if tick < scenario.sim.duration_ticks {
                    events.push((tick, ev));
                } else {
                    dropped += 1;
                }
            }
            Ok(None) => {}
            Err(e) => return Err(CliError::Feed(e.to_string())),
        }
    }
    if dropped > 0 {
        eprintln!(
            "note: dropped {dropped} event(s) at or beyond the {}-tick horizon",
            scenario.sim.duration_ticks
        );
    }

    let mut sim = Simulation::replay(scenario, policy)?;
    let mut registry = TagRegistry::new();
    let stdout = std::io::stdout();
    let mut echo = stdout.lock();
    let mut cursor = 0usize;
    for tick in 0..scenario.sim.duration_ticks {
        let mut touched = BTreeSet::new();
        while cursor < events.len() && events[cursor].0 == tick {
            let ev = &events[cursor].1;
            let node = registry.apply(&mut sim, ev, scenario.replay.bits_per_tag_event)?;
            touched.insert(node);
            cursor += 1;
        }
        sim.step()?;
        if !touched.is_empty() {
            emit_interval(&sim, &touched, &mut echo)
                .map_err(|e| CliError::Io(format!("stdout: {e}")))?;
        }
    }
    let outcome = sim.finish()?;
    ReportDoc::from_report(outcome.report).save(out_path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::small_scenario;

    fn scenario(nodes: u32) -> Scenario {
        small_scenario(nodes, 50.0)
    }

    #[test]
    fn a_moving_tag_carries_its_priority_weight() {
        let sc = scenario(3);
        let mut sim = Simulation::replay(&sc, Policy::Rfid).unwrap();
        let mut reg = TagRegistry::new();
        let read = |node: &str, ts| TagEvent::new("CART7", node, PriorityClass::Vip, ts).unwrap();

        reg.apply(&mut sim, &read("N0", 0), 500).unwrap();
        assert_eq!(sim.nodes()[0].priority_mix.vip, 1);

        reg.apply(&mut sim, &read("N2", 10), 500).unwrap();
        assert_eq!(sim.nodes()[0].priority_mix.vip, 0, "tag left N0");
        assert_eq!(sim.nodes()[2].priority_mix.vip, 1, "tag entered N2");

        // A re-read at the same spot must not double-count.
        reg.apply(&mut sim, &read("N2", 20), 500).unwrap();
        assert_eq!(sim.nodes()[2].priority_mix.vip, 1);
    }

    #[test]
    fn unknown_node_is_rejected() {
        let sc = scenario(2);
        let mut sim = Simulation::replay(&sc, Policy::Rfid).unwrap();
        let mut reg = TagRegistry::new();
        let ev = TagEvent::new("T1", "N9", PriorityClass::Std, 0).unwrap();
        assert!(reg.apply(&mut sim, &ev, 100).is_err());
    }
}
