// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use crate::sram::BlockIndex;

/// Malformed frames, schedules and traces. These are input conditions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameError {
    #[error("payload of {0} bytes exceeds the 1500-byte maximum")]
    PayloadTooLong(usize),
    #[error("runt frame: body of {0} bytes is shorter than 18")]
    Runt(usize),
    #[error("frame at cycle {start} overlaps the previous frame ending at cycle {prev_end}")]
    Overlap { start: u64, prev_end: u64 },
    #[error(
        "frame at cycle {start} leaves only {gap} idle cycles after the previous frame (need 12)"
    )]
    GapViolation { start: u64, gap: u64 },
    #[error("invalid MAC address {0:?}")]
    BadMac(String),
    #[error("invalid hex field {field}: {reason}")]
    BadHex { field: &'static str, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("need at least 2 ports, got {0}")]
    TooFewPorts(usize),
    #[error("flood reference count {0} does not fit the 3-bit counter (ports must be <= 5)")]
    TooManyPorts(usize),
    #[error("block count {0} must be between 2 and 64 (6-bit next index)")]
    BlockCount(usize),
    #[error("block payload must be at least 1 byte")]
    BlockPayload,
    #[error("clock ratio must be >= 1")]
    ClockRatio,
    #[error("{0} must be >= 1")]
    Zero(&'static str),
    #[error("counter width must be 1..=7 bits, got {0}")]
    CounterBits(u32),
}

/// Model invariant violations. Any of these indicates a bug in the model,
/// never a property of the input traffic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("cycle {cycle}: two {port} accesses scheduled in one cycle")]
    PortConflict { cycle: u64, port: &'static str },
    #[error("block {0} released with refcount 0 (double free)")]
    DoubleFree(BlockIndex),
    #[error("block {0} is on the free stack")]
    BlockIsFree(BlockIndex),
    #[error("refcount {0} out of range")]
    BadRefcount(u8),
    #[error("block {0} reclaimed while still referenced")]
    ReclaimReferenced(BlockIndex),
    #[error("block chain from {start} exceeds {limit} hops without end-of-packet")]
    ChainCycle { start: BlockIndex, limit: usize },
    #[error("port {port}: egress underrun at cycle {cycle}")]
    TxUnderrun { port: usize, cycle: u64 },
    #[error("port {port}: stored frame length disagrees with its block chain")]
    LengthMismatch { port: usize },
    #[error("port {port}: CDC queue overflow")]
    CdcOverflow { port: usize },
    #[error("cycle {cycle}: block conservation broken: {detail}")]
    Conservation { cycle: u64, detail: String },
    #[error("port {port}: egress frame could not be parsed: {source}")]
    EgressParse { port: usize, source: FrameError },
}

/// Anything that can stop [`crate::switch::run`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("invalid trace: {0}")]
    Trace(#[from] crate::trace::TraceError),
    #[error("invalid frame: {0}")]
    Frame(#[from] FrameError),
    #[error("simulation audit failed: {0}")]
    Sim(#[from] SimError),
}

impl RunError {
    /// True for problems with the input rather than the model.
    pub fn is_input(&self) -> bool {
        !matches!(self, RunError::Sim(_))
    }
}
