// SPDX-License-Identifier: Apache-2.0

//! Grant logic for the shared resources.
//!
//! Every resource except the allocation port uses an independent
//! round-robin pointer. Allocation requests are served strictly in arrival
//! order so that no port can be starved of blocks.

use std::collections::VecDeque;

use crate::free_list::FreeList;
use crate::sram::BlockIndex;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundRobin {
    last_granted: usize,
    requesters: usize,
}

impl RoundRobin {
    /// The pointer starts at the last requester so requester 0 wins the
    /// first contested cycle.
    pub fn new(requesters: usize) -> Self {
        assert!(requesters > 0);
        Self {
            last_granted: requesters - 1,
            requesters,
        }
    }

    pub fn with_last(requesters: usize, last_granted: usize) -> Self {
        assert!(last_granted < requesters);
        Self {
            last_granted,
            requesters,
        }
    }

    pub fn last_granted(&self) -> usize {
        self.last_granted
    }

    pub fn grant(&mut self, requests: &[bool]) -> Option<usize> {
        debug_assert_eq!(requests.len(), self.requesters);
        let n = self.requesters;
        let winner = (1..=n)
            .map(|k| (self.last_granted + k) % n)
            .find(|&i| requests[i])?;
        self.last_granted = winner;
        Some(winner)
    }
}

/// FIFO of pending block-allocation requests.
#[derive(Debug, Clone, Default)]
pub struct AllocQueue {
    pending: VecDeque<usize>,
}

impl AllocQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn pending(&self) -> impl Iterator<Item = usize> + '_ {
        self.pending.iter().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.pending.is_empty()
    }

    /// Enqueue this cycle's new requests (ascending port id on ties), then
    /// serve the head if the free list can pop.
    pub fn grant(
        &mut self,
        new_requests: &[bool],
        free_list: &mut FreeList,
    ) -> Option<(usize, BlockIndex)> {
        self.pending.extend(
            new_requests
                .iter()
                .enumerate()
                .filter(|(_, &r)| r)
                .map(|(p, _)| p),
        );
        let &port = self.pending.front()?;
        let idx = free_list.allocate()?;
        self.pending.pop_front();
        Some((port, idx))
    }
}
