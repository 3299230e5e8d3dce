// SPDX-License-Identifier: Apache-2.0

//! Line-delimited JSON records: input traces and egress events.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::FrameError;
use crate::frame::{
    serialize_frame, to_gmii_stream, EthernetFrame, GmiiSymbol, MacAddress, ScheduledFrame,
    INTER_FRAME_GAP, MAX_PAYLOAD, MIN_STANDARD_BODY,
};

/// One frame to inject on a port's GMII receive bus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceRecord {
    pub port: usize,
    pub start_gmii_cycle: u64,
    pub dst: MacAddress,
    pub src: MacAddress,
    /// Four lowercase hex digits.
    pub ethertype: String,
    pub payload_hex: String,
    #[serde(default)]
    pub corrupt_fcs: bool,
}

impl TraceRecord {
    pub fn from_frame(
        port: usize,
        start_gmii_cycle: u64,
        frame: &EthernetFrame,
        corrupt_fcs: bool,
    ) -> Self {
        Self {
            port,
            start_gmii_cycle,
            dst: frame.dst,
            src: frame.src,
            ethertype: hex::encode(frame.ethertype),
            payload_hex: hex::encode(&frame.payload),
            corrupt_fcs,
        }
    }

    pub fn frame(&self) -> Result<EthernetFrame, FrameError> {
        let et = hex::decode(&self.ethertype).map_err(|e| FrameError::BadHex {
            field: "ethertype",
            reason: e.to_string(),
        })?;
        let ethertype: [u8; 2] = et.try_into().map_err(|_| FrameError::BadHex {
            field: "ethertype",
            reason: "expected 4 hex digits".into(),
        })?;
        let payload = hex::decode(&self.payload_hex).map_err(|e| FrameError::BadHex {
            field: "payload_hex",
            reason: e.to_string(),
        })?;
        if payload.len() > MAX_PAYLOAD {
            return Err(FrameError::PayloadTooLong(payload.len()));
        }
        Ok(EthernetFrame {
            dst: self.dst,
            src: self.src,
            ethertype,
            payload,
        })
    }

    pub fn scheduled(&self) -> Result<ScheduledFrame, FrameError> {
        Ok(ScheduledFrame {
            frame: self.frame()?,
            corrupt_fcs: self.corrupt_fcs,
            start_cycle: self.start_gmii_cycle,
        })
    }

    pub fn wire_len(&self) -> Result<u64, FrameError> {
        Ok(serialize_frame(&self.frame()?, self.corrupt_fcs)?.len() as u64)
    }
}

/// A frame observed on a port's GMII transmit bus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EgressEvent {
    pub port: usize,
    pub first_gmii_cycle: u64,
    pub dst: MacAddress,
    pub src: MacAddress,
    pub ethertype: String,
    pub payload_hex: String,
    /// FCS bytes in wire order.
    pub fcs_hex: String,
    pub fcs_ok: bool,
}

impl EgressEvent {
    pub fn frame(&self) -> EthernetFrame {
        let et = hex::decode(&self.ethertype).expect("event ethertype is hex");
        EthernetFrame {
            dst: self.dst,
            src: self.src,
            ethertype: [et[0], et[1]],
            payload: hex::decode(&self.payload_hex).expect("event payload is hex"),
        }
    }

    /// Body bytes as transmitted, FCS included.
    pub fn body(&self) -> Vec<u8> {
        let mut b = self.frame().header_and_payload();
        b.extend(hex::decode(&self.fcs_hex).expect("event fcs is hex"));
        b
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceError {
    /// 1-based line number in the trace text.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for TraceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for TraceError {}

/// A parsed trace; `lines[i]` is the source line of `records[i]`.
#[derive(Debug, Clone, Default)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
    pub lines: Vec<usize>,
}

impl Trace {
    pub fn from_records(records: Vec<TraceRecord>) -> Self {
        let lines = (1..=records.len()).collect();
        Self { records, lines }
    }

    /// Blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self, TraceError> {
        let mut trace = Trace::default();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let rec: TraceRecord = serde_json::from_str(line).map_err(|e| TraceError {
                line: i + 1,
                message: e.to_string(),
            })?;
            trace.records.push(rec);
            trace.lines.push(i + 1);
        }
        Ok(trace)
    }

    pub fn to_jsonl(&self) -> String {
        records_to_jsonl(&self.records)
    }

    /// Check fields, port range and per-port spacing. Returns warnings
    /// (frames a standard MAC would pad).
    pub fn validate(&self, ports: usize) -> Result<Vec<String>, TraceError> {
        let mut warnings = Vec::new();
        let mut per_port: Vec<Vec<(u64, u64, usize)>> = vec![Vec::new(); ports];
        for (rec, &line) in self.records.iter().zip(&self.lines) {
            let err = |message: String| TraceError { line, message };
            if rec.port >= ports {
                return Err(err(format!(
                    "port {} out of range (switch has {ports})",
                    rec.port
                )));
            }
            let frame = rec.frame().map_err(|e| err(e.to_string()))?;
            if frame.body_len() < MIN_STANDARD_BODY {
                warnings.push(format!(
                    "line {line}: body of {} bytes is below the 60-byte minimum and is not padded",
                    frame.body_len()
                ));
            }
            let wire = rec.wire_len().map_err(|e| err(e.to_string()))?;
            per_port[rec.port].push((rec.start_gmii_cycle, wire, line));
        }
        for frames in &mut per_port {
            frames.sort();
            for w in frames.windows(2) {
                let (prev_start, prev_len, _) = w[0];
                let (start, _, line) = w[1];
                let end = prev_start + prev_len;
                if start < end {
                    return Err(TraceError {
                        line,
                        message: FrameError::Overlap {
                            start,
                            prev_end: end - 1,
                        }
                        .to_string(),
                    });
                }
                if start - end < INTER_FRAME_GAP {
                    return Err(TraceError {
                        line,
                        message: FrameError::GapViolation {
                            start,
                            gap: start - end,
                        }
                        .to_string(),
                    });
                }
            }
        }
        Ok(warnings)
    }

    /// Per-port GMII receive streams. Call [`Trace::validate`] first for
    /// line-numbered diagnostics.
    pub fn gmii_streams(&self, ports: usize) -> Result<Vec<Vec<GmiiSymbol>>, FrameError> {
        let mut per_port: Vec<Vec<ScheduledFrame>> = vec![Vec::new(); ports];
        for rec in &self.records {
            per_port[rec.port].push(rec.scheduled()?);
        }
        per_port.iter().map(|f| to_gmii_stream(f)).collect()
    }
}

pub fn records_to_jsonl<T: Serialize>(records: &[T]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}
