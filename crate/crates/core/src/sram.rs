// SPDX-License-Identifier: Apache-2.0

//! Shared packet memory: fixed-size blocks linked through a one-byte footer,
//! with one read port and one write port of one-cycle latency.

use std::fmt;

use crate::error::SimError;

pub const DEFAULT_BLOCKS: usize = 64;
pub const DEFAULT_BLOCK_PAYLOAD: usize = 63;
pub const NEXT_INDEX_BITS: u32 = 6;
pub const MAX_BLOCKS: usize = 1 << NEXT_INDEX_BITS;

const NEXT_MASK: u8 = (MAX_BLOCKS - 1) as u8;
const EOP_BIT: u8 = 0x40;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BlockIndex(u8);

impl BlockIndex {
    /// Panics if `value` does not fit the 6-bit next field.
    pub fn new(value: usize) -> Self {
        assert!(value < MAX_BLOCKS, "block index {value} out of range");
        Self(value as u8)
    }

    pub fn get(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for BlockIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for BlockIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Bits 0..5 next index, bit 6 end-of-packet, bit 7 zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BlockFooter {
    pub next: BlockIndex,
    pub eop: bool,
}

impl BlockFooter {
    pub fn encode(self) -> u8 {
        self.next.0 | if self.eop { EOP_BIT } else { 0 }
    }

    pub fn decode(byte: u8) -> Self {
        Self {
            next: BlockIndex(byte & NEXT_MASK),
            eop: byte & EOP_BIT != 0,
        }
    }
}

pub fn encode_footer(f: BlockFooter) -> u8 {
    f.encode()
}

pub fn decode_footer(byte: u8) -> BlockFooter {
    BlockFooter::decode(byte)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemoryBlock {
    pub payload: Vec<u8>,
    pub footer: BlockFooter,
}

impl MemoryBlock {
    pub fn zeroed(payload_len: usize) -> Self {
        Self {
            payload: vec![0; payload_len],
            footer: BlockFooter::default(),
        }
    }

    /// Payload bytes followed by the encoded footer.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.payload.clone();
        out.push(self.footer.encode());
        out
    }
}

#[derive(Debug, Clone)]
pub struct BlockStore {
    blocks: Vec<MemoryBlock>,
    cycle: u64,
    pending_write: Option<(BlockIndex, MemoryBlock)>,
    pending_read: Option<BlockIndex>,
    read_out: Option<MemoryBlock>,
    reads: u64,
    writes: u64,
}

impl BlockStore {
    pub fn new(blocks: usize, payload_len: usize) -> Self {
        assert!(blocks <= MAX_BLOCKS);
        Self {
            blocks: vec![MemoryBlock::zeroed(payload_len); blocks],
            cycle: 0,
            pending_write: None,
            pending_read: None,
            read_out: None,
            reads: 0,
            writes: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn payload_len(&self) -> usize {
        self.blocks.first().map_or(0, |b| b.payload.len())
    }

    /// Schedule a write. It becomes visible to reads issued next cycle.
    pub fn write(&mut self, idx: BlockIndex, block: MemoryBlock) -> Result<(), SimError> {
        if self.pending_write.is_some() {
            return Err(SimError::PortConflict {
                cycle: self.cycle,
                port: "SRAM write",
            });
        }
        debug_assert_eq!(block.payload.len(), self.payload_len());
        self.pending_write = Some((idx, block));
        Ok(())
    }

    /// Issue a read. The data is returned by [`BlockStore::read_data`] on
    /// the following cycle, as the block stood before this cycle's write.
    pub fn read(&mut self, idx: BlockIndex) -> Result<(), SimError> {
        if self.pending_read.is_some() {
            return Err(SimError::PortConflict {
                cycle: self.cycle,
                port: "SRAM read",
            });
        }
        self.pending_read = Some(idx);
        Ok(())
    }

    /// Data for the read issued on the previous cycle.
    pub fn read_data(&self) -> Option<&MemoryBlock> {
        self.read_out.as_ref()
    }

    pub fn end_cycle(&mut self) {
        self.read_out = self.pending_read.take().map(|idx| {
            self.reads += 1;
            self.blocks[idx.get()].clone()
        });
        if let Some((idx, block)) = self.pending_write.take() {
            self.writes += 1;
            self.blocks[idx.get()] = block;
        }
        self.cycle += 1;
    }

    /// Direct inspection, bypassing the ports. For audits and test oracles.
    pub fn peek(&self, idx: BlockIndex) -> &MemoryBlock {
        &self.blocks[idx.get()]
    }

    /// Direct overwrite, bypassing the ports. Used for fault injection.
    pub fn poke(&mut self, idx: BlockIndex, block: MemoryBlock) {
        self.blocks[idx.get()] = block;
    }

    pub fn access_counts(&self) -> (u64, u64) {
        (self.reads, self.writes)
    }
}
