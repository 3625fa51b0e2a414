//! Optional datagram transport: one canonical-form message per datagram,
//! request (TAG) / response (ALLOC, STATUS) pairing per node.

use std::net::{SocketAddr, UdpSocket};
use std::time::Duration;

use tagnet_core::wire::{parse_bytes, AllocMsg, Message, StatusMsg, MAX_DATAGRAM_BYTES};
use tagnet_core::{Policy, RunOutcome, Scenario, Simulation};

use crate::error::CliError;
use crate::replay::TagRegistry;

/// Serves one run over a bound socket. Each incoming TAG datagram lands in
/// the next control interval, whose outcome goes back to the sender as one
/// ALLOC and one STATUS datagram. A quiet period ends the feed and the
/// remaining intervals run with no external traffic.
pub fn serve(
    socket: &UdpSocket,
    scenario: &Scenario,
    policy: Policy,
    idle_timeout: Duration,
) -> Result<RunOutcome, CliError> {
    socket
        .set_read_timeout(Some(idle_timeout))
        .map_err(|e| CliError::Io(format!("socket: {e}")))?;
    let mut sim = Simulation::replay(scenario, policy)?;
    let mut registry = TagRegistry::new();
    let mut buf = [0u8; MAX_DATAGRAM_BYTES];
    let mut datagram_no = 0u64;
    let mut last_ts_ms = 0u64;
    while sim.tick() < scenario.sim.duration_ticks {
        match socket.recv_from(&mut buf) {
            Ok((len, peer)) => {
                datagram_no += 1;
                let ev = match parse_bytes(&buf[..len]) {
                    Ok(Message::Tag(ev)) => ev,
                    Ok(_) => {
                        return Err(CliError::Feed(format!(
                            "datagram {datagram_no}: feeds carry tag reads only"
                        )))
                    }
                    Err(e) => return Err(CliError::Feed(format!("datagram {datagram_no}: {e}"))),
                };
                if ev.timestamp_ms < last_ts_ms {
                    return Err(CliError::Feed(format!(
                        "datagram {datagram_no}: timestamp {} precedes {}",
                        ev.timestamp_ms, last_ts_ms
                    )));
                }
                last_ts_ms = ev.timestamp_ms;
                let node = registry.apply(&mut sim, &ev, scenario.replay.bits_per_tag_event)?;
                sim.step()?;
                let idx = sim.node_index(&node).expect("node resolved during apply");
                let alloc = AllocMsg::new(node, sim.nodes()[idx].allocated_bw_hz)
                    .expect("plan values are valid");
                reply(socket, peer, &Message::Alloc(alloc))?;
                if let Some(delta) = sim.last_delta() {
                    reply(socket, peer, &Message::Status(StatusMsg::from_delta(&delta)))?;
                }
            }
            Err(e)
                if e.kind() == std::io::ErrorKind::WouldBlock
                    || e.kind() == std::io::ErrorKind::TimedOut =>
            {
                // Feed went quiet: run out the clock without external events.
                while sim.tick() < scenario.sim.duration_ticks {
                    sim.step()?;
                }
            }
            Err(e) => return Err(CliError::Io(format!("socket: {e}"))),
        }
    }
    sim.finish().map_err(CliError::from)
}

fn reply(socket: &UdpSocket, peer: SocketAddr, msg: &Message) -> Result<(), CliError> {
    let line = format!("{msg}\n");
    debug_assert!(line.len() <= MAX_DATAGRAM_BYTES);
    socket.send_to(line.as_bytes(), peer).map_err(|e| CliError::Io(format!("socket: {e}")))?;
    Ok(())
}
