// SPDX-License-Identifier: Apache-2.0

//! Per-port memory read controller: walks a stored frame's block chain,
//! hands blocks to the egress one at a time and releases each one.

use std::collections::VecDeque;

use crate::error::SimError;
use crate::sram::{BlockIndex, MemoryBlock};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RdMode {
    #[default]
    Idle,
    /// Waiting for the read port, then for the data.
    Fetch,
    /// A block was delivered; waiting for the egress to ask for the next.
    Deliver,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RdOutput {
    pub mem_read_request: Option<BlockIndex>,
    /// Read port granted; the caller issues the block store read.
    pub mem_read_issue: Option<BlockIndex>,
    pub block_out: Option<(MemoryBlock, bool)>,
}

#[derive(Debug, Clone)]
pub struct ReadCtrl {
    mode: RdMode,
    cursor: Option<BlockIndex>,
    start: Option<BlockIndex>,
    is_flood: bool,
    in_flight: bool,
    hops: usize,
    hop_limit: usize,
    frees: VecDeque<BlockIndex>,
}

impl ReadCtrl {
    /// `hop_limit` is the pool size; a longer chain must contain a loop.
    pub fn new(hop_limit: usize) -> Self {
        Self {
            mode: RdMode::Idle,
            cursor: None,
            start: None,
            is_flood: false,
            in_flight: false,
            hops: 0,
            hop_limit,
            frees: VecDeque::new(),
        }
    }

    pub fn mode(&self) -> RdMode {
        self.mode
    }

    pub fn is_flood(&self) -> bool {
        self.is_flood
    }

    pub fn is_quiet(&self) -> bool {
        self.mode == RdMode::Idle && self.frees.is_empty()
    }

    pub fn free_request(&self) -> Option<BlockIndex> {
        self.frees.front().copied()
    }

    pub fn free_granted(&mut self) -> Option<BlockIndex> {
        self.frees.pop_front()
    }

    /// One switch cycle.
    ///
    /// * `start_req`: a new frame to traverse (accepted only when idle).
    /// * `read_grant`: the read port was granted for last cycle's request.
    /// * `read_data`: block returned for the read issued last cycle.
    /// * `want_block`: the egress has drained the delivered block.
    pub fn tick(
        &mut self,
        start_req: Option<(BlockIndex, bool)>,
        read_grant: bool,
        read_data: Option<&MemoryBlock>,
        want_block: bool,
    ) -> Result<RdOutput, SimError> {
        let mut out = RdOutput::default();

        if let Some((start, flood)) = start_req {
            debug_assert_eq!(self.mode, RdMode::Idle, "start while busy");
            self.mode = RdMode::Fetch;
            self.cursor = Some(start);
            self.start = Some(start);
            self.is_flood = flood;
            self.hops = 0;
            self.in_flight = false;
        }

        match self.mode {
            RdMode::Idle => {}
            RdMode::Fetch if self.in_flight => {
                if let Some(block) = read_data {
                    let idx = self.cursor.expect("cursor present while fetching");
                    self.in_flight = false;
                    self.hops += 1;
                    let last = block.footer.eop;
                    if !last && self.hops >= self.hop_limit {
                        return Err(SimError::ChainCycle {
                            start: self.start.unwrap(),
                            limit: self.hop_limit,
                        });
                    }
                    self.frees.push_back(idx);
                    out.block_out = Some((block.clone(), last));
                    if last {
                        self.mode = RdMode::Idle;
                        self.cursor = None;
                    } else {
                        self.cursor = Some(block.footer.next);
                        self.mode = RdMode::Deliver;
                    }
                }
            }
            RdMode::Fetch => {
                if read_grant {
                    out.mem_read_issue = self.cursor;
                    self.in_flight = true;
                }
            }
            RdMode::Deliver => {
                if want_block {
                    self.mode = RdMode::Fetch;
                }
            }
        }

        if self.mode == RdMode::Fetch && !self.in_flight {
            out.mem_read_request = self.cursor;
        }
        Ok(out)
    }
}
