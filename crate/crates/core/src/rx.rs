// SPDX-License-Identifier: Apache-2.0

//! Ingress parser. Runs in the switch clock domain on bytes delivered by the
//! CDC queue; a `dv = false` sample marks the synchronized fall of data
//! valid.

use std::collections::VecDeque;

use crate::crc::Crc32;
use crate::frame::{GmiiSymbol, MacAddress, MIN_BODY, PREAMBLE_BYTE, PREAMBLE_LEN, SFD};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RxMode {
    #[default]
    Idle,
    Preamble,
    Dest,
    Src,
    Body,
}

#[derive(Debug, Clone, Default)]
pub struct RxState {
    pub mode: RxMode,
    /// Header bytes seen: 1..=7 in Preamble, 8 after SFD, then one per
    /// address byte up to 20.
    pub header_count: u32,
    crc: Crc32,
    /// Most recent emitted bytes; the CRC lags four bytes behind so the FCS
    /// never enters it.
    tail: VecDeque<u8>,
    emitted: usize,
    sof_pending: bool,
    corrupted: bool,
    dropped: bool,
    dst: [u8; 6],
    src: [u8; 6],
}

impl RxState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn frame_active(&self) -> bool {
        matches!(self.mode, RxMode::Dest | RxMode::Src | RxMode::Body)
    }

    pub fn is_idle(&self) -> bool {
        self.mode == RxMode::Idle
    }

    fn start_frame(&mut self) {
        self.mode = RxMode::Dest;
        self.header_count = PREAMBLE_LEN as u32 + 1;
        self.crc = Crc32::new();
        self.tail.clear();
        self.emitted = 0;
        self.sof_pending = true;
        self.corrupted = false;
        self.dropped = false;
    }

    fn reset(&mut self) {
        self.mode = RxMode::Idle;
        self.header_count = 0;
    }

    fn preamble_byte(&mut self, b: u8) {
        let count = if self.mode == RxMode::Preamble {
            self.header_count
        } else {
            0
        };
        if b == PREAMBLE_BYTE {
            self.mode = RxMode::Preamble;
            self.header_count = (count + 1).min(PREAMBLE_LEN as u32);
        } else if b == SFD && count == PREAMBLE_LEN as u32 {
            self.start_frame();
        } else {
            self.reset();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RxOutput {
    pub byte_valid: bool,
    pub byte: u8,
    pub sof: bool,
    pub eof: bool,
    pub error: bool,
    pub dst_ready: bool,
    pub dst: MacAddress,
    pub src_ready: bool,
    pub src: MacAddress,
    /// Set with eof when at least one byte was lost to back-pressure.
    pub backpressure_drop: bool,
    /// Bytes handed to the write controller for this frame, set with eof.
    pub length: usize,
}

/// Advance one switch cycle. `sample` is the byte (or dv fall) popped from
/// the CDC queue this cycle, if any.
pub fn rx_tick(state: &mut RxState, sample: Option<GmiiSymbol>, wr_ready: bool) -> RxOutput {
    let mut out = RxOutput::default();
    let Some(sym) = sample else {
        return out;
    };

    if !sym.dv {
        if state.frame_active() {
            out.eof = true;
            out.length = state.emitted;
            out.backpressure_drop = state.dropped;
            let fcs_ok = state.tail.len() == 4 && {
                let fcs = u32::from_le_bytes([
                    state.tail[0],
                    state.tail[1],
                    state.tail[2],
                    state.tail[3],
                ]);
                state.crc.finalize() == fcs
            };
            out.error = state.corrupted || state.emitted < MIN_BODY || !fcs_ok;
        }
        state.reset();
        return out;
    }

    let b = sym.data;
    match state.mode {
        RxMode::Idle | RxMode::Preamble => {
            state.preamble_byte(b);
            return out;
        }
        RxMode::Dest | RxMode::Src | RxMode::Body => {}
    }

    if sym.er {
        state.corrupted = true;
    }

    // Address capture sees every byte, even ones memory cannot take.
    let hc = state.header_count as usize;
    match state.mode {
        RxMode::Dest => {
            state.dst[hc - 8] = b;
            if hc == 13 {
                out.dst_ready = true;
                out.dst = MacAddress(state.dst);
                state.mode = RxMode::Src;
            }
            state.header_count += 1;
        }
        RxMode::Src => {
            state.src[hc - 14] = b;
            if hc == 19 {
                out.src_ready = true;
                out.src = MacAddress(state.src);
                state.mode = RxMode::Body;
            }
            state.header_count += 1;
        }
        _ => {}
    }

    if wr_ready {
        out.byte_valid = true;
        out.byte = b;
        out.sof = std::mem::take(&mut state.sof_pending);
        state.emitted += 1;
        state.tail.push_back(b);
        if state.tail.len() > 4 {
            let oldest = state.tail.pop_front().unwrap();
            state.crc.update_byte(oldest);
        }
    } else {
        state.corrupted = true;
        state.dropped = true;
    }
    out
}
