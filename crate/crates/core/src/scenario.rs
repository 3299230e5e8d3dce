// SPDX-License-Identifier: Apache-2.0

//! Trace generators for the named test scenarios. All randomness comes from
//! a seeded ChaCha stream so a (scenario, frames, seed) triple always yields
//! the same trace.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::frame::{EthernetFrame, MacAddress, HEADER_LEN, INTER_FRAME_GAP};
use crate::trace::{Trace, TraceRecord};

pub const SCENARIO_PORTS: usize = 4;
const ETHERTYPE: u16 = 0x88b5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    FloodThenLearn,
    CrcDrop,
    VoqFloodLeak,
    LineRate4Port,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::FloodThenLearn,
        Scenario::CrcDrop,
        Scenario::VoqFloodLeak,
        Scenario::LineRate4Port,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::FloodThenLearn => "flood-then-learn",
            Scenario::CrcDrop => "crc-drop",
            Scenario::VoqFloodLeak => "voq-flood-leak",
            Scenario::LineRate4Port => "line-rate-4port",
        }
    }

    pub fn default_frames(self) -> usize {
        match self {
            Scenario::FloodThenLearn => 2,
            Scenario::CrcDrop => 1,
            Scenario::VoqFloodLeak => 16,
            Scenario::LineRate4Port => 20,
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Scenario::FloodThenLearn => {
                "Every port sends `frames` frames in parallel. The first frame on each port goes to an \
                 unknown address and floods; later frames go to the host behind the next port and \
                 are unicast."
            }
            Scenario::CrcDrop => "Port 0 sends `frames` frames with a corrupted FCS; all are dropped.",
            Scenario::VoqFloodLeak => {
                "Host 3 announces itself, then ports 0-2 each send `frames` back-to-back minimum frames to \
                 host 3, overfilling VOQ 3. Port 1's last frame goes to an unknown address and floods \
                 while VOQ 3 is full."
            }
            Scenario::LineRate4Port => {
                "Each host announces itself with one flood, then after a quiet period every port sends \
                 `frames` back-to-back 200-byte frames to the host behind the next port."
            }
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Scenario::ALL.iter().map(|s| s.name()).collect();
                format!(
                    "unknown scenario {s:?} (expected one of {})",
                    names.join(", ")
                )
            })
    }
}

/// Sidecar description of a generated trace.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub scenario: Scenario,
    pub description: String,
    pub frames: usize,
    pub seed: u64,
    pub records: usize,
    /// Records before this index are warm-up traffic.
    pub measured_from: usize,
    pub recommended_flags: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub trace: Trace,
    pub manifest: Manifest,
}

/// Station attached to port `p`.
pub fn host_mac(p: usize) -> MacAddress {
    MacAddress([0x02, 0x00, 0x00, 0x00, 0x01, p as u8])
}

/// An address no station uses.
pub fn unknown_mac(i: usize) -> MacAddress {
    MacAddress([0x02, 0x00, 0x00, 0x00, 0xff, i as u8])
}

/// Body bytes = 14 header + payload + 4 FCS.
fn payload_for_body(body: usize) -> usize {
    body - 18
}

struct Builder {
    rng: ChaCha8Rng,
    next_start: Vec<u64>,
    records: Vec<TraceRecord>,
}

impl Builder {
    fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            next_start: vec![0; SCENARIO_PORTS],
            records: Vec::new(),
        }
    }

    /// Schedule a frame on `port` at the earliest legal cycle not before
    /// `not_before`.
    fn send(
        &mut self,
        port: usize,
        not_before: u64,
        dst: MacAddress,
        body: usize,
        corrupt: bool,
    ) -> u64 {
        let mut payload = vec![0u8; payload_for_body(body)];
        self.rng.fill(&mut payload[..]);
        let frame = EthernetFrame::new(dst, host_mac(port), ETHERTYPE, payload);
        let start = self.next_start[port].max(not_before);
        self.next_start[port] = start + (HEADER_LEN + body) as u64 + INTER_FRAME_GAP;
        self.records
            .push(TraceRecord::from_frame(port, start, &frame, corrupt));
        start
    }

    fn idle_until(&mut self, port: usize, cycle: u64) {
        self.next_start[port] = self.next_start[port].max(cycle);
    }

    fn finish(mut self) -> Vec<TraceRecord> {
        self.records.sort_by_key(|r| (r.start_gmii_cycle, r.port));
        self.records
    }
}

pub fn generate(scenario: Scenario, frames: Option<usize>, seed: u64) -> Generated {
    let frames = frames.unwrap_or_else(|| scenario.default_frames()).max(1);
    let mut b = Builder::new(seed);
    let mut recommended_flags = Vec::new();
    let mut measured_from = 0;
    match scenario {
        Scenario::FloodThenLearn => {
            for round in 0..frames {
                for p in 0..SCENARIO_PORTS {
                    let dst = if round == 0 {
                        unknown_mac(p)
                    } else {
                        host_mac((p + 1) % SCENARIO_PORTS)
                    };
                    b.send(p, 0, dst, 118, false);
                }
            }
        }
        Scenario::CrcDrop => {
            for _ in 0..frames {
                b.send(0, 0, unknown_mac(0), 118, true);
            }
        }
        Scenario::VoqFloodLeak => {
            let announce_end = b.send(3, 0, unknown_mac(3), 60, false) + 200;
            for p in 0..3 {
                b.idle_until(p, announce_end);
            }
            for _ in 1..frames {
                for p in 0..3 {
                    b.send(p, 0, host_mac(3), 60, false);
                }
            }
            // last round: the flood trails the two unicasts so they refill
            // VOQ 3 before it is routed
            b.send(0, 0, host_mac(3), 60, false);
            b.send(2, 0, host_mac(3), 60, false);
            let late = b.next_start[1] + 4;
            b.send(1, late, unknown_mac(1), 60, false);
            recommended_flags.push("--fix-flood-leak".into());
        }
        Scenario::LineRate4Port => {
            for p in 0..SCENARIO_PORTS {
                b.send(p, 0, unknown_mac(p), 60, false);
            }
            // the announcements drain well within this window
            let quiet = 600;
            for p in 0..SCENARIO_PORTS {
                b.idle_until(p, quiet);
            }
            measured_from = SCENARIO_PORTS;
            for _ in 0..frames {
                for p in 0..SCENARIO_PORTS {
                    b.send(p, 0, host_mac((p + 1) % SCENARIO_PORTS), 200, false);
                }
            }
        }
    }
    let records = b.finish();
    let manifest = Manifest {
        scenario,
        description: scenario.description().to_string(),
        frames,
        seed,
        records: records.len(),
        measured_from,
        recommended_flags,
    };
    Generated {
        trace: Trace::from_records(records),
        manifest,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Scenario::ALL {
            assert_eq!(s.name().parse::<Scenario>().unwrap(), s);
        }
        assert!("nope".parse::<Scenario>().is_err());
    }

    #[test]
    fn generated_traces_are_legal_and_seeded() {
        for s in Scenario::ALL {
            let a = generate(s, None, 7);
            assert!(a.trace.validate(4).unwrap().is_empty(), "{s}");
            assert_eq!(a.trace.to_jsonl(), generate(s, None, 7).trace.to_jsonl());
            assert_ne!(a.trace.to_jsonl(), generate(s, None, 8).trace.to_jsonl());
        }
    }

    #[test]
    fn flood_then_learn_shape() {
        let g = generate(Scenario::FloodThenLearn, None, 1);
        assert_eq!(g.trace.records.len(), 8);
        let firsts = g
            .trace
            .records
            .iter()
            .filter(|r| r.start_gmii_cycle == 0)
            .count();
        assert_eq!(firsts, 4);
    }

    #[test]
    fn line_rate_is_back_to_back() {
        let g = generate(Scenario::LineRate4Port, None, 1);
        let p0: Vec<u64> = g.trace.records[g.manifest.measured_from..]
            .iter()
            .filter(|r| r.port == 0)
            .map(|r| r.start_gmii_cycle)
            .collect();
        assert_eq!(p0.len(), 20);
        assert!(p0.windows(2).all(|w| w[1] - w[0] == 8 + 200 + 12));
        assert!(p0.last().unwrap() - p0[0] >= 1000);
    }
}
