// SPDX-License-Identifier: Apache-2.0

//! Per-port memory write controller.
//!
//! Bytes from the ingress parser are coalesced into block payloads. The
//! controller keeps a current and a look-ahead block allocated so each
//! footer can name its successor. A full block is only written once the next
//! byte (or the end of frame) shows whether it continues, so a frame that
//! exactly fills a block still ends in that block.

use std::collections::VecDeque;

use crate::rx::RxOutput;
use crate::sram::{BlockFooter, BlockIndex, MemoryBlock};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WrMode {
    #[default]
    Idle,
    WritePayload,
    Wait,
    Footer,
}

/// A frame has left the write side, committed or aborted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameDone {
    /// First block of the chain. `None` only for an aborted frame that never
    /// committed a block.
    pub start: Option<BlockIndex>,
    /// Blocks of the chain in order. Empty for aborted frames; their blocks
    /// are already queued for release.
    pub blocks: Vec<BlockIndex>,
    /// Stored body bytes, FCS included.
    pub length: usize,
    pub error: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WrOutput {
    /// Post one new allocation request this cycle.
    pub alloc_request: bool,
    /// Block index this controller wants to write (Footer state).
    pub write_request: Option<BlockIndex>,
    /// Write granted this cycle; the caller commits it to the block store.
    pub mem_write: Option<(BlockIndex, MemoryBlock)>,
    pub frame_done: Option<FrameDone>,
}

#[derive(Debug, Clone)]
struct Staged {
    payload: Vec<u8>,
    last: bool,
}

#[derive(Debug, Clone)]
pub struct WriteCtrl {
    payload_size: usize,
    mode: WrMode,
    buffer: Vec<u8>,
    staged: Option<Staged>,
    write: Option<(BlockIndex, MemoryBlock, bool)>,
    current: Option<BlockIndex>,
    next: Option<BlockIndex>,
    outstanding: usize,
    frame_blocks: Vec<BlockIndex>,
    frame_len: usize,
    pending_eof: bool,
    pending_error: bool,
    releases: VecDeque<BlockIndex>,
    active_cycles: u64,
    stall_cycles: u64,
}

impl WriteCtrl {
    pub fn new(payload_size: usize) -> Self {
        Self {
            payload_size,
            mode: WrMode::Idle,
            buffer: Vec::with_capacity(payload_size),
            staged: None,
            write: None,
            current: None,
            next: None,
            outstanding: 0,
            frame_blocks: Vec::new(),
            frame_len: 0,
            pending_eof: false,
            pending_error: false,
            releases: VecDeque::new(),
            active_cycles: 0,
            stall_cycles: 0,
        }
    }

    pub fn mode(&self) -> WrMode {
        self.mode
    }

    /// Low in Wait and while a footer write awaits its grant.
    pub fn ready(&self) -> bool {
        !matches!(self.mode, WrMode::Wait | WrMode::Footer)
    }

    /// Ready as seen by the parser in a cycle whose write grant is already
    /// known: a footer granted this cycle no longer holds the byte stream.
    pub fn ready_with_grant(&self, write_grant: bool) -> bool {
        match self.mode {
            WrMode::Wait => false,
            WrMode::Footer => write_grant,
            _ => true,
        }
    }

    pub fn current(&self) -> Option<BlockIndex> {
        self.current
    }

    pub fn next(&self) -> Option<BlockIndex> {
        self.next
    }

    pub fn outstanding_allocs(&self) -> usize {
        self.outstanding
    }

    /// Block that should be returned to the free list, if any.
    pub fn release_request(&self) -> Option<BlockIndex> {
        self.releases.front().copied()
    }

    pub fn release_granted(&mut self) -> Option<BlockIndex> {
        self.releases.pop_front()
    }

    /// Blocks owned by this controller that carry no reference count:
    /// the in-progress chain, current/look-ahead, and pending releases.
    pub fn held_blocks(&self) -> impl Iterator<Item = BlockIndex> + '_ {
        self.frame_blocks
            .iter()
            .copied()
            .chain(self.current)
            .chain(self.next)
            .chain(self.releases.iter().copied())
    }

    pub fn is_quiet(&self) -> bool {
        self.mode == WrMode::Idle
            && self.outstanding == 0
            && self.releases.is_empty()
            && self.current.is_none()
            && self.next.is_none()
    }

    pub fn active_cycles(&self) -> u64 {
        self.active_cycles
    }

    pub fn stall_cycles(&self) -> u64 {
        self.stall_cycles
    }

    fn take_grant(&mut self, idx: BlockIndex) {
        debug_assert!(self.outstanding > 0);
        self.outstanding -= 1;
        if self.mode == WrMode::Idle {
            self.releases.push_back(idx);
        } else if self.current.is_none() {
            self.current = Some(idx);
        } else if self.next.is_none() {
            self.next = Some(idx);
        } else {
            self.releases.push_back(idx);
        }
    }

    fn abort(&mut self) -> FrameDone {
        let start = self.frame_blocks.first().copied();
        self.releases.extend(self.frame_blocks.drain(..));
        self.releases.extend(self.current.take());
        self.releases.extend(self.next.take());
        self.staged = None;
        self.write = None;
        self.buffer.clear();
        self.pending_eof = false;
        self.pending_error = false;
        self.mode = WrMode::Idle;
        FrameDone {
            start,
            blocks: Vec::new(),
            length: std::mem::take(&mut self.frame_len),
            error: true,
        }
    }

    fn wanted_blocks(&self) -> usize {
        let final_block = self.staged.as_ref().is_some_and(|s| s.last)
            || self.write.as_ref().is_some_and(|w| w.2);
        match self.mode {
            WrMode::Idle => 0,
            _ if final_block => 1,
            _ => 2,
        }
    }

    pub fn tick(
        &mut self,
        rx: &RxOutput,
        alloc_grant: Option<BlockIndex>,
        write_grant: bool,
    ) -> WrOutput {
        let mut out = WrOutput::default();

        if let Some(idx) = alloc_grant {
            self.take_grant(idx);
        }

        if write_grant {
            let (idx, block, last) = self
                .write
                .take()
                .expect("write grant without a pending footer write");
            debug_assert_eq!(self.current, Some(idx));
            self.current = None;
            self.frame_blocks.push(idx);
            out.mem_write = Some((idx, block));
            if last {
                self.releases.extend(self.next.take());
                let blocks = std::mem::take(&mut self.frame_blocks);
                out.frame_done = Some(FrameDone {
                    start: blocks.first().copied(),
                    blocks,
                    length: std::mem::take(&mut self.frame_len),
                    error: false,
                });
                self.mode = WrMode::Idle;
            } else {
                self.current = self.next.take();
                self.mode = WrMode::WritePayload;
            }
        }

        if rx.byte_valid {
            if rx.sof {
                debug_assert_eq!(self.mode, WrMode::Idle, "sof during a frame");
                self.mode = WrMode::WritePayload;
                self.buffer.clear();
                self.frame_blocks.clear();
                self.frame_len = 0;
            }
            if self.mode != WrMode::Idle {
                self.frame_len += 1;
                if self.buffer.len() == self.payload_size {
                    debug_assert!(self.staged.is_none());
                    let payload =
                        std::mem::replace(&mut self.buffer, Vec::with_capacity(self.payload_size));
                    self.staged = Some(Staged {
                        payload,
                        last: false,
                    });
                }
                self.buffer.push(rx.byte);
            }
        }

        if rx.eof && self.mode != WrMode::Idle {
            self.pending_eof = true;
            self.pending_error |= rx.error;
        }

        if self.pending_eof && self.pending_error {
            out.frame_done = Some(self.abort());
        } else if self.pending_eof && self.staged.is_none() && self.write.is_none() {
            debug_assert!(!self.buffer.is_empty());
            let payload =
                std::mem::replace(&mut self.buffer, Vec::with_capacity(self.payload_size));
            self.staged = Some(Staged {
                payload,
                last: true,
            });
            self.pending_eof = false;
        }

        if self.write.is_none() {
            if let Some(staged) = &self.staged {
                let next = if staged.last { self.current } else { self.next };
                match (self.current, next) {
                    (Some(cur), Some(next)) => {
                        let Staged { mut payload, last } = self.staged.take().unwrap();
                        payload.resize(self.payload_size, 0);
                        let block = MemoryBlock {
                            payload,
                            footer: BlockFooter { next, eop: last },
                        };
                        self.write = Some((cur, block, last));
                        self.mode = WrMode::Footer;
                    }
                    _ => self.mode = WrMode::Wait,
                }
            }
        }

        let have = usize::from(self.current.is_some())
            + usize::from(self.next.is_some())
            + self.outstanding;
        if have < self.wanted_blocks() {
            out.alloc_request = true;
            self.outstanding += 1;
        }

        out.write_request = self.write.as_ref().map(|w| w.0);

        if self.mode != WrMode::Idle {
            self.active_cycles += 1;
            if !self.ready() {
                self.stall_cycles += 1;
            }
        }
        out
    }
}
