// SPDX-License-Identifier: Apache-2.0

//! Cycle-level model of a small store-and-forward Ethernet switch.
//!
//! Frames arrive on per-port GMII receive buses, are parsed and CRC-checked,
//! stored as linked chains of fixed-size blocks in one shared memory, routed
//! through an address learning table into per-egress queues, and replayed
//! onto the GMII transmit buses. [`switch::Switch`] wires the pieces together
//! and [`switch::run`] drives a whole trace.

pub mod arbiter;
pub mod crc;
pub mod error;
pub mod forwarding;
pub mod frame;
pub mod free_list;
pub mod read_ctrl;
pub mod rx;
pub mod scenario;
pub mod sram;
pub mod switch;
pub mod trace;
pub mod tx;
pub mod voq;
pub mod write_ctrl;

pub use crc::{crc32, Crc32};
pub use error::{ConfigError, FrameError, RunError, SimError};
pub use forwarding::{LearnTable, LearnTableEntry, RouteDecision, RouteKind};
pub use frame::{
    parse_frame, serialize_frame, EthernetFrame, GmiiSymbol, MacAddress, ScheduledFrame,
};
pub use scenario::{generate, Scenario};
pub use sram::{BlockFooter, BlockIndex, MemoryBlock};
pub use switch::{run, BlockAccounting, Switch, SwitchConfig, SwitchStats};
pub use trace::{EgressEvent, Trace, TraceError, TraceRecord};
pub use voq::VoqEntry;
