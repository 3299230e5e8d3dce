// SPDX-License-Identifier: Apache-2.0

//! Stack of free block indices plus per-block reference counters.
//!
//! Allocation pops immediately. Frees are registered: a block whose count
//! reaches zero is pushed at [`FreeList::commit`], so it cannot be handed out
//! again in the cycle it was freed.

use crate::error::SimError;
use crate::sram::BlockIndex;

/// Largest value of the 3-bit reference counter.
pub const MAX_REFCOUNT: u8 = 4;

#[derive(Debug, Clone)]
pub struct FreeList {
    stack: Vec<BlockIndex>,
    on_stack: Vec<bool>,
    refcount: Vec<u8>,
    pending_push: Vec<BlockIndex>,
    low_watermark: usize,
}

impl FreeList {
    /// All blocks free, pushed from the highest index down so that block 0
    /// is allocated first.
    pub fn new(blocks: usize) -> Self {
        Self {
            stack: (0..blocks).rev().map(BlockIndex::new).collect(),
            on_stack: vec![true; blocks],
            refcount: vec![0; blocks],
            pending_push: Vec::new(),
            low_watermark: blocks,
        }
    }

    pub fn capacity(&self) -> usize {
        self.refcount.len()
    }

    pub fn len(&self) -> usize {
        self.stack.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stack.is_empty()
    }

    pub fn low_watermark(&self) -> usize {
        self.low_watermark
    }

    pub fn allocate(&mut self) -> Option<BlockIndex> {
        let idx = self.stack.pop()?;
        self.on_stack[idx.get()] = false;
        self.low_watermark = self.low_watermark.min(self.stack.len());
        Some(idx)
    }

    pub fn set_refcount(&mut self, idx: BlockIndex, count: u8) -> Result<(), SimError> {
        if !(1..=MAX_REFCOUNT).contains(&count) {
            return Err(SimError::BadRefcount(count));
        }
        if self.on_stack[idx.get()] {
            return Err(SimError::BlockIsFree(idx));
        }
        self.refcount[idx.get()] = count;
        Ok(())
    }

    pub fn refcount(&self, idx: BlockIndex) -> u8 {
        self.refcount[idx.get()]
    }

    /// Drop one reference. Returns true when this was the last one.
    pub fn release(&mut self, idx: BlockIndex) -> Result<bool, SimError> {
        let rc = &mut self.refcount[idx.get()];
        if *rc == 0 {
            return Err(SimError::DoubleFree(idx));
        }
        *rc -= 1;
        if *rc == 0 {
            self.pending_push.push(idx);
            Ok(true)
        } else {
            Ok(false)
        }
    }

    /// Return a block that was allocated but never given references, e.g.
    /// the unused look-ahead block or the blocks of an aborted frame.
    pub fn reclaim(&mut self, idx: BlockIndex) -> Result<(), SimError> {
        if self.on_stack[idx.get()] || self.pending_push.contains(&idx) {
            return Err(SimError::DoubleFree(idx));
        }
        if self.refcount[idx.get()] != 0 {
            return Err(SimError::ReclaimReferenced(idx));
        }
        self.pending_push.push(idx);
        Ok(())
    }

    /// End of cycle: blocks freed this cycle become allocatable.
    pub fn commit(&mut self) {
        for idx in self.pending_push.drain(..) {
            debug_assert!(!self.on_stack[idx.get()]);
            self.on_stack[idx.get()] = true;
            self.stack.push(idx);
        }
    }

    pub fn is_free(&self, idx: BlockIndex) -> bool {
        self.on_stack[idx.get()]
    }

    /// Blocks with at least one outstanding reference.
    pub fn referenced(&self) -> impl Iterator<Item = BlockIndex> + '_ {
        self.refcount
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, _)| BlockIndex::new(i))
    }

    pub fn stack(&self) -> &[BlockIndex] {
        &self.stack
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(i: usize) -> BlockIndex {
        BlockIndex::new(i)
    }

    #[test]
    fn capacity_and_order() {
        let mut fl = FreeList::new(64);
        let expected: Vec<BlockIndex> = (0..64).rev().map(idx).collect();
        assert_eq!(fl.stack(), expected.as_slice());
        assert_eq!(fl.allocate(), Some(idx(0)));
        for _ in 1..64 {
            assert!(fl.allocate().is_some());
        }
        assert_eq!(fl.allocate(), None);
        assert_eq!(fl.low_watermark(), 0);
    }

    #[test]
    fn lifo_after_free() {
        let mut fl = FreeList::new(64);
        let all: Vec<_> = (0..64).map(|_| fl.allocate().unwrap()).collect();
        assert!(fl.is_empty());
        fl.set_refcount(all[5], 1).unwrap();
        assert!(fl.release(all[5]).unwrap());
        fl.commit();
        assert_eq!(fl.allocate(), Some(idx(5)));
    }

    #[test]
    fn refcounts() {
        let mut fl = FreeList::new(8);
        let b = fl.allocate().unwrap();
        assert_eq!(fl.set_refcount(b, 0), Err(SimError::BadRefcount(0)));
        assert_eq!(fl.set_refcount(b, 5), Err(SimError::BadRefcount(5)));
        fl.set_refcount(b, 3).unwrap();
        assert!(!fl.release(b).unwrap());
        fl.commit();
        assert!(!fl.is_free(b));
        assert!(!fl.release(b).unwrap());
        fl.commit();
        assert!(!fl.is_free(b));
        assert!(fl.release(b).unwrap());
        fl.commit();
        assert!(fl.is_free(b));
        assert_eq!(fl.release(b), Err(SimError::DoubleFree(b)));
        assert_eq!(fl.set_refcount(b, 1), Err(SimError::BlockIsFree(b)));
    }

    #[test]
    fn double_release_of_unicast() {
        let mut fl = FreeList::new(8);
        let b = fl.allocate().unwrap();
        fl.set_refcount(b, 1).unwrap();
        assert!(fl.release(b).unwrap());
        assert_eq!(fl.release(b), Err(SimError::DoubleFree(b)));
    }

    #[test]
    fn same_cycle_alloc_and_release_net_zero() {
        let mut fl = FreeList::new(64);
        let held: Vec<_> = (0..54).map(|_| fl.allocate().unwrap()).collect();
        assert_eq!(fl.len(), 10);
        fl.set_refcount(held[0], 1).unwrap();
        // cycle t
        assert!(fl.allocate().is_some());
        assert!(fl.release(held[0]).unwrap());
        fl.commit();
        assert_eq!(fl.len(), 10);
    }

    #[test]
    fn freed_block_not_forwarded_same_cycle() {
        let mut fl = FreeList::new(4);
        let held: Vec<_> = (0..4).map(|_| fl.allocate().unwrap()).collect();
        fl.set_refcount(held[2], 1).unwrap();
        // cycle t: completing release and an allocation
        assert!(fl.release(held[2]).unwrap());
        assert_eq!(fl.allocate(), None);
        fl.commit();
        // t+1
        assert_eq!(fl.len(), 1);
        assert_eq!(fl.allocate(), Some(held[2]));
    }

    #[test]
    fn non_completing_release_with_alloc() {
        let mut fl = FreeList::new(16);
        let b = fl.allocate().unwrap();
        fl.set_refcount(b, 2).unwrap();
        let before = fl.len();
        fl.allocate().unwrap();
        assert!(!fl.release(b).unwrap());
        fl.commit();
        assert_eq!(fl.len(), before - 1);
    }

    #[test]
    fn reclaim_rules() {
        let mut fl = FreeList::new(4);
        let a = fl.allocate().unwrap();
        let b = fl.allocate().unwrap();
        fl.reclaim(a).unwrap();
        assert_eq!(fl.reclaim(a), Err(SimError::DoubleFree(a)));
        fl.set_refcount(b, 1).unwrap();
        assert_eq!(fl.reclaim(b), Err(SimError::ReclaimReferenced(b)));
        fl.commit();
        assert!(fl.is_free(a));
    }
}
