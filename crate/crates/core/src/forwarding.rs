// SPDX-License-Identifier: Apache-2.0

//! Address learn table and the routing decision made for each committed
//! frame.
//!
//! The table is fully associative. Each valid entry has a small saturating
//! hit counter that starts at 1; a lookup hit bumps the hit entry and decays
//! every other valid entry, and a full table evicts the entry with the
//! lowest counter (lowest slot on ties).

use crate::frame::MacAddress;
use crate::sram::BlockIndex;

pub const DEFAULT_LEARN_ENTRIES: usize = 16;
pub const DEFAULT_COUNTER_BITS: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LearnTableEntry {
    pub valid: bool,
    pub mac: MacAddress,
    pub port: usize,
    pub counter: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LearnOutcome {
    /// Existing entry re-pointed and bumped.
    Refreshed {
        slot: usize,
    },
    Inserted {
        slot: usize,
    },
    Evicted {
        slot: usize,
        victim: MacAddress,
    },
}

#[derive(Debug, Clone)]
pub struct LearnTable {
    entries: Vec<LearnTableEntry>,
    max_counter: u8,
}

impl LearnTable {
    pub fn new(entries: usize, counter_bits: u32) -> Self {
        assert!(entries > 0 && (1..8).contains(&counter_bits));
        Self {
            entries: vec![LearnTableEntry::default(); entries],
            max_counter: ((1u32 << counter_bits) - 1) as u8,
        }
    }

    pub fn entries(&self) -> &[LearnTableEntry] {
        &self.entries
    }

    pub fn max_counter(&self) -> u8 {
        self.max_counter
    }

    fn find(&self, mac: MacAddress) -> Option<usize> {
        self.entries.iter().position(|e| e.valid && e.mac == mac)
    }

    pub fn learn(&mut self, src: MacAddress, port: usize) -> LearnOutcome {
        if let Some(slot) = self.find(src) {
            let e = &mut self.entries[slot];
            e.port = port;
            e.counter = (e.counter + 1).min(self.max_counter);
            return LearnOutcome::Refreshed { slot };
        }
        let fresh = LearnTableEntry {
            valid: true,
            mac: src,
            port,
            counter: 1.min(self.max_counter),
        };
        if let Some(slot) = self.entries.iter().position(|e| !e.valid) {
            self.entries[slot] = fresh;
            return LearnOutcome::Inserted { slot };
        }
        // min_by_key returns the first minimum, i.e. the lowest slot
        let slot = self
            .entries
            .iter()
            .enumerate()
            .min_by_key(|(_, e)| e.counter)
            .map(|(i, _)| i)
            .unwrap();
        let victim = self.entries[slot].mac;
        self.entries[slot] = fresh;
        LearnOutcome::Evicted { slot, victim }
    }

    /// A hit increments the hit entry and decrements every other valid
    /// entry. A miss leaves the counters alone.
    pub fn lookup(&mut self, dst: MacAddress) -> Option<usize> {
        let slot = self.find(dst)?;
        for (i, e) in self.entries.iter_mut().enumerate() {
            if !e.valid {
                continue;
            }
            if i == slot {
                e.counter = (e.counter + 1).min(self.max_counter);
            } else {
                e.counter = e.counter.saturating_sub(1);
            }
        }
        Some(self.entries[slot].port)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RouteKind {
    Unicast(usize),
    Flood,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RouteDecision {
    pub kind: RouteKind,
    pub start: BlockIndex,
    pub length: usize,
}

impl RouteDecision {
    /// Egress ports that receive the frame. A hit on the ingress port is
    /// sent back out of it; a flood skips the ingress port.
    pub fn targets(&self, ingress: usize, ports: usize) -> Vec<usize> {
        match self.kind {
            RouteKind::Unicast(p) => vec![p],
            RouteKind::Flood => (0..ports).filter(|&p| p != ingress).collect(),
        }
    }

    /// References each block of the frame must hold.
    pub fn share_count(&self, ports: usize) -> u8 {
        match self.kind {
            RouteKind::Unicast(_) => 1,
            RouteKind::Flood => (ports - 1) as u8,
        }
    }
}

/// Look the destination up and decide where the frame goes.
pub fn route(
    table: &mut LearnTable,
    dst: MacAddress,
    start: BlockIndex,
    length: usize,
) -> RouteDecision {
    let kind = match table.lookup(dst) {
        Some(p) => RouteKind::Unicast(p),
        None => RouteKind::Flood,
    };
    RouteDecision {
        kind,
        start,
        length,
    }
}
