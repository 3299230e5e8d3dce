// SPDX-License-Identifier: Apache-2.0

//! Reference models used as oracles by the integration tests. Each one is
//! written from the definition, not from the library code it checks.

#![allow(dead_code)]

use std::collections::VecDeque;

use l2switch_core::MacAddress;

fn reflect(mut v: u32, bits: u32) -> u32 {
    let mut out = 0;
    for _ in 0..bits {
        out = (out << 1) | (v & 1);
        v >>= 1;
    }
    out
}

/// CRC-32 computed one bit at a time with the normal (MSB-first)
/// polynomial 0x04C11DB7, reflecting input bytes and the result by hand.
pub fn bitwise_crc32(data: &[u8]) -> u32 {
    let mut reg: u32 = 0xFFFF_FFFF;
    for &byte in data {
        let b = reflect(byte as u32, 8);
        for i in (0..8).rev() {
            let bit = (b >> i) & 1;
            let top = reg >> 31;
            reg <<= 1;
            if top ^ bit == 1 {
                reg ^= 0x04C1_1DB7;
            }
        }
    }
    reflect(reg, 32) ^ 0xFFFF_FFFF
}

/// Learn table written as plain slot bookkeeping.
#[derive(Debug, Clone)]
pub struct RefLearnTable {
    pub slots: Vec<Option<(MacAddress, usize, u8)>>,
    pub max: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefLearn {
    Refreshed(usize),
    Inserted(usize),
    Evicted(usize, MacAddress),
}

impl RefLearnTable {
    pub fn new(size: usize, bits: u32) -> Self {
        Self {
            slots: vec![None; size],
            max: (1u8 << bits) - 1,
        }
    }

    pub fn learn(&mut self, mac: MacAddress, port: usize) -> RefLearn {
        for i in 0..self.slots.len() {
            if let Some((m, p, c)) = &mut self.slots[i] {
                if *m == mac {
                    *p = port;
                    if *c < self.max {
                        *c += 1;
                    }
                    return RefLearn::Refreshed(i);
                }
            }
        }
        for i in 0..self.slots.len() {
            if self.slots[i].is_none() {
                self.slots[i] = Some((mac, port, 1));
                return RefLearn::Inserted(i);
            }
        }
        let lowest = self.slots.iter().map(|s| s.unwrap().2).min().unwrap();
        let victim_slot = (0..self.slots.len())
            .find(|&i| self.slots[i].unwrap().2 == lowest)
            .unwrap();
        let victim = self.slots[victim_slot].unwrap().0;
        self.slots[victim_slot] = Some((mac, port, 1));
        RefLearn::Evicted(victim_slot, victim)
    }

    pub fn lookup(&mut self, mac: MacAddress) -> Option<usize> {
        let hit = (0..self.slots.len())
            .find(|&i| matches!(self.slots[i], Some((m, _, _)) if m == mac))?;
        let max = self.max;
        for (i, s) in self.slots.iter_mut().enumerate() {
            if let Some((_, _, c)) = s {
                if i == hit {
                    *c = (*c + 1).min(max);
                } else if *c > 0 {
                    *c -= 1;
                }
            }
        }
        self.slots[hit].map(|(_, p, _)| p)
    }
}

/// VOQ as a list with the boundary rules spelled out case by case.
#[derive(Debug, Clone, Default)]
pub struct RefVoq {
    pub items: VecDeque<u32>,
    pub cap: usize,
}

impl RefVoq {
    /// Returns (popped, accepted).
    pub fn step(&mut self, push: Option<u32>, pop: bool) -> (Option<u32>, bool) {
        match (push, pop, self.items.len()) {
            (None, false, _) => (None, false),
            (None, true, _) => (self.items.pop_front(), false),
            (Some(x), true, 0) => (Some(x), true),
            (Some(x), true, _) => {
                let head = self.items.pop_front();
                self.items.push_back(x);
                (head, true)
            }
            (Some(x), false, n) if n < self.cap => {
                self.items.push_back(x);
                (None, true)
            }
            (Some(_), false, _) => (None, false),
        }
    }
}
