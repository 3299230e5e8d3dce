// SPDX-License-Identifier: Apache-2.0

//! Egress port. The preamble is held back until the first block of the
//! frame is in hand, after which the frame drains to GMII without a hole.

use std::collections::VecDeque;

use crate::error::SimError;
use crate::frame::{GmiiSymbol, HEADER_LEN, INTER_FRAME_GAP, PREAMBLE_BYTE, PREAMBLE_LEN, SFD};
use crate::sram::{BlockIndex, MemoryBlock};
use crate::voq::VoqEntry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TxMode {
    #[default]
    Idle,
    WaitFirstBlock,
    Preamble,
    Body,
    Gap,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TxOutput {
    pub start_read: Option<(BlockIndex, bool)>,
    /// The current block is drained and more of the frame remains.
    pub want_block: bool,
    /// Present on GMII clock edges only.
    pub gmii: Option<GmiiSymbol>,
}

#[derive(Debug, Clone)]
pub struct TxState {
    port: usize,
    mode: TxMode,
    remaining: usize,
    preamble_count: usize,
    block: VecDeque<u8>,
    awaiting_block: bool,
    last_block_seen: bool,
    out_queue: VecDeque<u8>,
    out_capacity: usize,
    /// Bytes of the current frame still to leave on GMII.
    wire_left: usize,
    gap_count: u64,
}

impl TxState {
    pub fn new(port: usize, cdc_depth: usize) -> Self {
        Self {
            port,
            mode: TxMode::Idle,
            remaining: 0,
            preamble_count: 0,
            block: VecDeque::new(),
            awaiting_block: false,
            last_block_seen: false,
            out_queue: VecDeque::with_capacity(cdc_depth),
            out_capacity: cdc_depth,
            wire_left: 0,
            gap_count: 0,
        }
    }

    pub fn mode(&self) -> TxMode {
        self.mode
    }

    /// The VOQ ready bit.
    pub fn ready(&self) -> bool {
        self.mode == TxMode::Idle
    }

    pub fn is_quiet(&self) -> bool {
        self.mode == TxMode::Idle && self.out_queue.is_empty()
    }

    fn take_block(&mut self, block: MemoryBlock, last: bool) -> Result<(), SimError> {
        let n = self
            .remaining
            .saturating_sub(self.block.len())
            .min(block.payload.len());
        if last && self.block.len() + n != self.remaining {
            return Err(SimError::LengthMismatch { port: self.port });
        }
        self.block.extend(&block.payload[..n]);
        self.awaiting_block = false;
        self.last_block_seen = last;
        Ok(())
    }

    /// One switch cycle. `voq_head` is the entry popped for this port this
    /// cycle; `block_in` the block delivered by the read controller;
    /// `gmii_edge` marks switch cycles that carry a GMII transmit clock.
    pub fn tick(
        &mut self,
        cycle: u64,
        voq_head: Option<VoqEntry>,
        block_in: Option<(MemoryBlock, bool)>,
        gmii_edge: bool,
    ) -> Result<TxOutput, SimError> {
        let mut out = TxOutput::default();

        if let Some(entry) = voq_head {
            debug_assert_eq!(self.mode, TxMode::Idle, "VOQ popped while busy");
            self.mode = TxMode::WaitFirstBlock;
            self.remaining = entry.length;
            self.preamble_count = 0;
            self.block.clear();
            self.awaiting_block = true;
            self.last_block_seen = false;
            self.wire_left = HEADER_LEN + entry.length;
            out.start_read = Some((entry.start, entry.flood));
        }

        if let Some((block, last)) = block_in {
            self.take_block(block, last)?;
            if self.mode == TxMode::WaitFirstBlock {
                self.mode = TxMode::Preamble;
            }
        }

        // move one byte toward the GMII domain
        if self.out_queue.len() < self.out_capacity {
            match self.mode {
                TxMode::Preamble => {
                    let b = if self.preamble_count < PREAMBLE_LEN {
                        PREAMBLE_BYTE
                    } else {
                        SFD
                    };
                    self.out_queue.push_back(b);
                    self.preamble_count += 1;
                    if self.preamble_count == HEADER_LEN {
                        self.mode = TxMode::Body;
                    }
                }
                TxMode::Body => {
                    if let Some(b) = self.block.pop_front() {
                        self.out_queue.push_back(b);
                        self.remaining -= 1;
                        if self.remaining == 0 {
                            if !self.last_block_seen {
                                return Err(SimError::LengthMismatch { port: self.port });
                            }
                            self.mode = TxMode::Gap;
                            self.gap_count = 0;
                        }
                    }
                }
                _ => {}
            }
        }

        if matches!(self.mode, TxMode::Body)
            && self.block.is_empty()
            && !self.awaiting_block
            && !self.last_block_seen
            && self.remaining > 0
        {
            self.awaiting_block = true;
            out.want_block = true;
        }

        if gmii_edge {
            let sym = match self.out_queue.pop_front() {
                Some(b) => {
                    self.wire_left -= 1;
                    GmiiSymbol::byte(b)
                }
                None => {
                    if self.wire_left > 0 && matches!(self.mode, TxMode::Body | TxMode::Gap) {
                        return Err(SimError::TxUnderrun {
                            port: self.port,
                            cycle,
                        });
                    }
                    if self.mode == TxMode::Gap {
                        self.gap_count += 1;
                        if self.gap_count >= INTER_FRAME_GAP {
                            self.mode = TxMode::Idle;
                        }
                    }
                    GmiiSymbol::IDLE
                }
            };
            out.gmii = Some(sym);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{parse_frame, EthernetFrame, MacAddress};
    use crate::sram::BlockFooter;

    fn blocks_for(body: &[u8]) -> Vec<MemoryBlock> {
        let chunks: Vec<&[u8]> = body.chunks(63).collect();
        chunks
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let mut payload = c.to_vec();
                payload.resize(63, 0);
                MemoryBlock {
                    payload,
                    footer: BlockFooter {
                        next: BlockIndex::new(i + 1),
                        eop: i + 1 == chunks.len(),
                    },
                }
            })
            .collect()
    }

    /// Drive the egress with blocks supplied `latency` cycles after each
    /// request. Returns (first dv cycle, GMII bytes) per frame.
    fn run(body: &[u8], first_latency: u64, latency: u64) -> Vec<(u64, Vec<u8>)> {
        let blocks = blocks_for(body);
        let mut tx = TxState::new(0, 16);
        let mut next_block = 0usize;
        let mut deliver_at: Option<u64> = None;
        let mut frames = Vec::new();
        let mut cur: Option<(u64, Vec<u8>)> = None;
        let mut head = Some(VoqEntry {
            start: BlockIndex::new(0),
            flood: false,
            length: body.len(),
        });
        for cycle in 0..20_000u64 {
            let block = match deliver_at {
                Some(t) if t == cycle => {
                    deliver_at = None;
                    let b = blocks[next_block].clone();
                    next_block += 1;
                    Some((b.clone(), b.footer.eop))
                }
                _ => None,
            };
            let popped = if tx.ready() { head.take() } else { None };
            let out = tx.tick(cycle, popped, block, cycle % 4 == 0).unwrap();
            if out.start_read.is_some() {
                deliver_at = Some(cycle + first_latency);
            }
            if out.want_block {
                deliver_at = Some(cycle + latency);
            }
            if let Some(sym) = out.gmii {
                let g = cycle / 4;
                match (&mut cur, sym.dv) {
                    (None, true) => cur = Some((g, vec![sym.data])),
                    (Some(c), true) => c.1.push(sym.data),
                    (Some(_), false) => frames.push(cur.take().unwrap()),
                    (None, false) => {}
                }
            }
        }
        frames
    }

    fn body(payload: usize) -> Vec<u8> {
        EthernetFrame::new(
            MacAddress([0, 1, 2, 3, 4, 5]),
            MacAddress([6, 7, 8, 9, 10, 11]),
            0x0800,
            (0..payload).map(|i| i as u8).collect(),
        )
        .body(false)
    }

    #[test]
    fn contiguous_frame() {
        let b = body(200);
        let frames = run(&b, 3, 3);
        assert_eq!(frames.len(), 1);
        let wire = &frames[0].1;
        assert_eq!(wire.len(), 8 + b.len());
        assert_eq!(
            &wire[..8],
            &[0x55, 0x55, 0x55, 0x55, 0x55, 0x55, 0x55, 0xD5]
        );
        assert_eq!(&wire[8..], &b[..]);
        assert!(parse_frame(&wire[8..]).unwrap().1);
    }

    #[test]
    fn stalled_first_block_delays_preamble() {
        let b = body(100);
        let frames = run(&b, 400, 3);
        assert_eq!(frames.len(), 1);
        // nothing on the wire before the block arrives at cycle 400
        assert!(frames[0].0 >= 100);
        assert_eq!(frames[0].1.len(), 8 + b.len());
    }

    #[test]
    fn slow_refill_underruns() {
        let b = body(200);
        let mut tx = TxState::new(0, 16);
        let blocks = blocks_for(&b);
        let entry = VoqEntry {
            start: BlockIndex::new(0),
            flood: false,
            length: b.len(),
        };
        tx.tick(0, Some(entry), None, true).unwrap();
        tx.tick(1, None, Some((blocks[0].clone(), false)), false)
            .unwrap();
        let mut err = None;
        for cycle in 2..2000 {
            if let Err(e) = tx.tick(cycle, None, None, cycle % 4 == 0) {
                err = Some(e);
                break;
            }
        }
        assert!(matches!(err, Some(SimError::TxUnderrun { .. })));
    }

    #[test]
    fn idle_without_entries() {
        let mut tx = TxState::new(0, 16);
        for cycle in 0..100 {
            let out = tx.tick(cycle, None, None, cycle % 4 == 0).unwrap();
            assert!(out.gmii.is_none_or(|s| !s.dv));
            assert!(out.start_read.is_none());
        }
    }

    #[test]
    fn gap_before_next_entry() {
        let b = body(40);
        let mut tx = TxState::new(0, 16);
        let blocks = blocks_for(&b);
        let entry = VoqEntry {
            start: BlockIndex::new(0),
            flood: false,
            length: b.len(),
        };
        tx.tick(0, Some(entry), None, true).unwrap();
        tx.tick(1, None, Some((blocks[0].clone(), true)), false)
            .unwrap();
        let mut last_dv = 0;
        let mut cycle = 2;
        while !tx.ready() {
            let out = tx.tick(cycle, None, None, cycle % 4 == 0).unwrap();
            if out.gmii.is_some_and(|s| s.dv) {
                last_dv = cycle / 4;
            }
            cycle += 1;
        }
        // ready only after 12 idle GMII cycles
        assert!(cycle / 4 >= last_dv + 12);
    }
}
