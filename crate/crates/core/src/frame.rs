// SPDX-License-Identifier: Apache-2.0

//! Ethernet frames, their on-wire serialization and the GMII symbol stream.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::crc::crc32;
use crate::error::FrameError;

pub const PREAMBLE_BYTE: u8 = 0x55;
pub const SFD: u8 = 0xD5;
pub const PREAMBLE_LEN: usize = 7;
/// Preamble plus SFD.
pub const HEADER_LEN: usize = PREAMBLE_LEN + 1;
pub const MAX_PAYLOAD: usize = 1500;
/// dst + src + ethertype + fcs.
pub const MIN_BODY: usize = 18;
/// Bodies shorter than this would be padded by a standard MAC.
pub const MIN_STANDARD_BODY: usize = 60;
pub const INTER_FRAME_GAP: u64 = 12;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MacAddress(pub [u8; 6]);

impl MacAddress {
    pub const fn new(octets: [u8; 6]) -> Self {
        Self(octets)
    }

    pub fn octets(&self) -> [u8; 6] {
        self.0
    }
}

impl fmt::Display for MacAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let o = &self.0;
        write!(
            f,
            "{:02x}:{:02x}:{:02x}:{:02x}:{:02x}:{:02x}",
            o[0], o[1], o[2], o[3], o[4], o[5]
        )
    }
}

impl fmt::Debug for MacAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MacAddress({self})")
    }
}

impl FromStr for MacAddress {
    type Err = FrameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FrameError::BadMac(s.to_string());
        let mut octets = [0u8; 6];
        let mut parts = s.split(':');
        for o in octets.iter_mut() {
            let part = parts.next().ok_or_else(bad)?;
            if part.len() != 2 {
                return Err(bad());
            }
            *o = u8::from_str_radix(part, 16).map_err(|_| bad())?;
        }
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(Self(octets))
    }
}

impl Serialize for MacAddress {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MacAddress {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A frame without its FCS. The ethertype is carried opaquely.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EthernetFrame {
    pub dst: MacAddress,
    pub src: MacAddress,
    pub ethertype: [u8; 2],
    pub payload: Vec<u8>,
}

impl EthernetFrame {
    pub fn new(dst: MacAddress, src: MacAddress, ethertype: u16, payload: Vec<u8>) -> Self {
        Self {
            dst,
            src,
            ethertype: ethertype.to_be_bytes(),
            payload,
        }
    }

    /// dst ‖ src ‖ ethertype ‖ payload, the span covered by the FCS.
    pub fn header_and_payload(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(14 + self.payload.len());
        out.extend_from_slice(&self.dst.0);
        out.extend_from_slice(&self.src.0);
        out.extend_from_slice(&self.ethertype);
        out.extend_from_slice(&self.payload);
        out
    }

    pub fn fcs(&self) -> u32 {
        crc32(&self.header_and_payload())
    }

    /// On-wire body length including the FCS.
    pub fn body_len(&self) -> usize {
        14 + self.payload.len() + 4
    }

    /// Body (no preamble) with the FCS appended LSB first.
    pub fn body(&self, corrupt_fcs: bool) -> Vec<u8> {
        let mut body = self.header_and_payload();
        let mut fcs = crc32(&body).to_le_bytes();
        if corrupt_fcs {
            fcs[0] ^= 0x01;
        }
        body.extend_from_slice(&fcs);
        body
    }
}

/// One GMII clock sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GmiiSymbol {
    pub data: u8,
    pub dv: bool,
    pub er: bool,
}

impl GmiiSymbol {
    pub const IDLE: GmiiSymbol = GmiiSymbol {
        data: 0,
        dv: false,
        er: false,
    };

    pub const fn byte(data: u8) -> Self {
        Self {
            data,
            dv: true,
            er: false,
        }
    }
}

/// Preamble, SFD, body and FCS. With `corrupt_fcs`, the lowest bit of the
/// first FCS byte is inverted.
pub fn serialize_frame(frame: &EthernetFrame, corrupt_fcs: bool) -> Result<Vec<u8>, FrameError> {
    if frame.payload.len() > MAX_PAYLOAD {
        return Err(FrameError::PayloadTooLong(frame.payload.len()));
    }
    let mut out = Vec::with_capacity(HEADER_LEN + frame.body_len());
    out.extend_from_slice(&[PREAMBLE_BYTE; PREAMBLE_LEN]);
    out.push(SFD);
    out.extend_from_slice(&frame.body(corrupt_fcs));
    Ok(out)
}

/// Split a received body (no preamble/SFD) into fields and check its FCS.
pub fn parse_frame(body: &[u8]) -> Result<(EthernetFrame, bool), FrameError> {
    if body.len() < MIN_BODY {
        return Err(FrameError::Runt(body.len()));
    }
    let (data, fcs) = body.split_at(body.len() - 4);
    let fcs = u32::from_le_bytes([fcs[0], fcs[1], fcs[2], fcs[3]]);
    let mut dst = [0u8; 6];
    let mut src = [0u8; 6];
    dst.copy_from_slice(&data[0..6]);
    src.copy_from_slice(&data[6..12]);
    let frame = EthernetFrame {
        dst: MacAddress(dst),
        src: MacAddress(src),
        ethertype: [data[12], data[13]],
        payload: data[14..].to_vec(),
    };
    Ok((frame, crc32(data) == fcs))
}

/// A frame scheduled on one port's GMII receive bus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduledFrame {
    pub frame: EthernetFrame,
    pub corrupt_fcs: bool,
    pub start_cycle: u64,
}

/// Lay one port's frames out on the GMII timeline. Index `i` of the result
/// is GMII cycle `i`; the vector ends with the last frame byte.
pub fn to_gmii_stream(frames: &[ScheduledFrame]) -> Result<Vec<GmiiSymbol>, FrameError> {
    let mut order: Vec<&ScheduledFrame> = frames.iter().collect();
    order.sort_by_key(|f| f.start_cycle);

    let mut stream = Vec::new();
    let mut prev_end: Option<u64> = None; // first idle cycle after the previous frame
    for f in order {
        let wire = serialize_frame(&f.frame, f.corrupt_fcs)?;
        if let Some(end) = prev_end {
            if f.start_cycle < end {
                return Err(FrameError::Overlap {
                    start: f.start_cycle,
                    prev_end: end - 1,
                });
            }
            let gap = f.start_cycle - end;
            if gap < INTER_FRAME_GAP {
                return Err(FrameError::GapViolation {
                    start: f.start_cycle,
                    gap,
                });
            }
        }
        let start = f.start_cycle as usize;
        stream.resize(start, GmiiSymbol::IDLE);
        stream.extend(wire.iter().map(|&b| GmiiSymbol::byte(b)));
        prev_end = Some(f.start_cycle + wire.len() as u64);
    }
    Ok(stream)
}
