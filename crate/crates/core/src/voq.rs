// SPDX-License-Identifier: Apache-2.0

//! Per-egress queue of frame pointers.

use std::collections::VecDeque;

use crate::sram::BlockIndex;

pub const DEFAULT_VOQ_DEPTH: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VoqEntry {
    pub start: BlockIndex,
    pub flood: bool,
    /// Stored body length, FCS included.
    pub length: usize,
}

#[derive(Debug, Clone)]
pub struct Voq {
    entries: VecDeque<VoqEntry>,
    capacity: usize,
}

impl Voq {
    pub fn new(capacity: usize) -> Self {
        Self {
            entries: VecDeque::with_capacity(capacity),
            capacity,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.entries.len() >= self.capacity
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn entries(&self) -> impl Iterator<Item = &VoqEntry> {
        self.entries.iter()
    }

    /// One cycle with optional push and pop. The pop is served first, so a
    /// push into a full queue succeeds when a pop frees the slot, and a push
    /// into an empty queue passes straight through to a same-cycle pop.
    /// Returns the popped entry and whether the push was accepted; a
    /// rejected push is dropped.
    pub fn tick(&mut self, push: Option<VoqEntry>, pop: bool) -> (Option<VoqEntry>, bool) {
        let mut popped = if pop { self.entries.pop_front() } else { None };
        let accepted = match push {
            None => false,
            Some(e) if popped.is_none() && pop => {
                popped = Some(e);
                true
            }
            Some(e) if self.entries.len() < self.capacity => {
                self.entries.push_back(e);
                true
            }
            Some(_) => false,
        };
        (popped, accepted)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: usize) -> VoqEntry {
        VoqEntry {
            start: BlockIndex::new(i),
            flood: i.is_multiple_of(2),
            length: 60 + i,
        }
    }

    #[test]
    fn fifo_order() {
        let mut q = Voq::new(16);
        for i in 0..3 {
            assert_eq!(q.tick(Some(e(i)), false), (None, true));
        }
        for i in 0..3 {
            assert_eq!(q.tick(None, true), (Some(e(i)), false));
        }
        assert_eq!(q.tick(None, true), (None, false));
    }

    #[test]
    fn empty_pass_through() {
        let mut q = Voq::new(16);
        assert_eq!(q.tick(Some(e(9)), true), (Some(e(9)), true));
        assert!(q.is_empty());
    }

    #[test]
    fn full_push_and_pop() {
        let mut q = Voq::new(16);
        for i in 0..16 {
            q.tick(Some(e(i)), false);
        }
        assert!(q.is_full());
        assert_eq!(q.tick(Some(e(40)), true), (Some(e(0)), true));
        assert_eq!(q.len(), 16);
        assert_eq!(q.entries().last(), Some(&e(40)));
    }

    #[test]
    fn tail_drop_when_full() {
        let mut q = Voq::new(2);
        q.tick(Some(e(0)), false);
        q.tick(Some(e(1)), false);
        assert_eq!(q.tick(Some(e(2)), false), (None, false));
        assert_eq!(q.entries().copied().collect::<Vec<_>>(), vec![e(0), e(1)]);
    }
}
