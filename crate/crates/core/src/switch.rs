// SPDX-License-Identifier: Apache-2.0

//! The switch: per-port pipelines around one shared block store, stepped
//! one switch clock at a time in a fixed phase order.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::arbiter::{AllocQueue, RoundRobin};
use crate::error::{ConfigError, RunError, SimError};
use crate::forwarding::{
    route, LearnOutcome, LearnTable, RouteKind, DEFAULT_COUNTER_BITS, DEFAULT_LEARN_ENTRIES,
};
use crate::frame::{
    parse_frame, GmiiSymbol, MacAddress, HEADER_LEN, PREAMBLE_BYTE, PREAMBLE_LEN, SFD,
};
use crate::free_list::{FreeList, MAX_REFCOUNT};
use crate::read_ctrl::ReadCtrl;
use crate::rx::{rx_tick, RxOutput, RxState};
use crate::sram::{
    BlockIndex, BlockStore, MemoryBlock, DEFAULT_BLOCKS, DEFAULT_BLOCK_PAYLOAD, MAX_BLOCKS,
};
use crate::trace::{EgressEvent, Trace};
use crate::tx::TxState;
use crate::voq::{Voq, VoqEntry, DEFAULT_VOQ_DEPTH};
use crate::write_ctrl::WriteCtrl;

/// Switch cycles between a GMII byte boundary and the byte reaching the
/// parser.
pub const CDC_LATENCY: u64 = 2;
pub const DEFAULT_CDC_DEPTH: usize = 16;
pub const DEFAULT_CLOCK_RATIO: u64 = 4;
pub const DEFAULT_MAX_CYCLES: u64 = 4_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SwitchConfig {
    pub ports: usize,
    pub blocks: usize,
    pub block_payload: usize,
    pub voq_depth: usize,
    pub learn_entries: usize,
    pub counter_bits: u32,
    pub cdc_depth: usize,
    pub clock_ratio: u64,
    pub fix_flood_leak: bool,
    /// Switch cycles.
    pub max_cycles: u64,
}

impl Default for SwitchConfig {
    fn default() -> Self {
        Self {
            ports: 4,
            blocks: DEFAULT_BLOCKS,
            block_payload: DEFAULT_BLOCK_PAYLOAD,
            voq_depth: DEFAULT_VOQ_DEPTH,
            learn_entries: DEFAULT_LEARN_ENTRIES,
            counter_bits: DEFAULT_COUNTER_BITS,
            cdc_depth: DEFAULT_CDC_DEPTH,
            clock_ratio: DEFAULT_CLOCK_RATIO,
            fix_flood_leak: false,
            max_cycles: DEFAULT_MAX_CYCLES,
        }
    }
}

impl SwitchConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.ports < 2 {
            return Err(ConfigError::TooFewPorts(self.ports));
        }
        if self.ports - 1 > MAX_REFCOUNT as usize {
            return Err(ConfigError::TooManyPorts(self.ports));
        }
        if !(2..=MAX_BLOCKS).contains(&self.blocks) {
            return Err(ConfigError::BlockCount(self.blocks));
        }
        if self.block_payload == 0 {
            return Err(ConfigError::BlockPayload);
        }
        if self.clock_ratio == 0 {
            return Err(ConfigError::ClockRatio);
        }
        if !(1..8).contains(&self.counter_bits) {
            return Err(ConfigError::CounterBits(self.counter_bits));
        }
        for (name, v) in [
            ("voq_depth", self.voq_depth),
            ("learn_entries", self.learn_entries),
            ("cdc_depth", self.cdc_depth),
        ] {
            if v == 0 {
                return Err(ConfigError::Zero(name));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PortStats {
    pub rx_frames: u64,
    pub rx_crc_drops: u64,
    pub rx_backpressure_corruptions: u64,
    pub tx_frames: u64,
    pub voq_drops: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SwitchStats {
    pub ports: Vec<PortStats>,
    pub floods: u64,
    pub unicasts: u64,
    pub learns: u64,
    pub evictions: u64,
    pub leaked_blocks: u64,
    pub free_list_low_watermark: usize,
    pub wr_stall_cycle_fraction: f64,
    pub wr_stall_cycles: u64,
    pub wr_active_cycles: u64,
    pub free_list_final: usize,
    pub cycles: u64,
    pub truncated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockAccounting {
    /// On the free stack.
    pub free: usize,
    /// Nonzero reference count.
    pub referenced: usize,
    /// Owned by a write controller or awaiting a routing decision.
    pub held: usize,
}

impl BlockAccounting {
    pub fn total(&self) -> usize {
        self.free + self.referenced + self.held
    }
}

/// What one call to [`Switch::step`] observed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleRecord {
    pub cycle: u64,
    /// Per-port transmit symbol on GMII edges.
    pub gmii_tx: Vec<Option<GmiiSymbol>>,
    pub free_blocks: usize,
    /// Egress frames completed this cycle.
    pub completed: Vec<EgressEvent>,
}

#[derive(Debug, Clone)]
struct PendingRoute {
    dst: MacAddress,
    blocks: Vec<BlockIndex>,
    length: usize,
}

/// Collects one port's transmit symbols into frames.
#[derive(Debug, Clone, Default)]
struct EgressMonitor {
    current: Option<(u64, Vec<u8>)>,
}

impl EgressMonitor {
    fn observe(
        &mut self,
        port: usize,
        gmii_cycle: u64,
        sym: GmiiSymbol,
    ) -> Result<Option<EgressEvent>, SimError> {
        match (&mut self.current, sym.dv) {
            (None, true) => self.current = Some((gmii_cycle, vec![sym.data])),
            (Some((_, bytes)), true) => bytes.push(sym.data),
            (Some(_), false) => {
                let (first, bytes) = self.current.take().unwrap();
                return Self::finish(port, first, &bytes).map(Some);
            }
            (None, false) => {}
        }
        Ok(None)
    }

    fn finish(port: usize, first_gmii_cycle: u64, bytes: &[u8]) -> Result<EgressEvent, SimError> {
        let mut header = [PREAMBLE_BYTE; HEADER_LEN];
        header[PREAMBLE_LEN] = SFD;
        if bytes.len() < HEADER_LEN || bytes[..HEADER_LEN] != header {
            return Err(SimError::Conservation {
                cycle: first_gmii_cycle,
                detail: format!("port {port}: egress frame without preamble and SFD"),
            });
        }
        let body = &bytes[HEADER_LEN..];
        let (frame, fcs_ok) =
            parse_frame(body).map_err(|source| SimError::EgressParse { port, source })?;
        Ok(EgressEvent {
            port,
            first_gmii_cycle,
            dst: frame.dst,
            src: frame.src,
            ethertype: hex::encode(frame.ethertype),
            payload_hex: hex::encode(&frame.payload),
            fcs_hex: hex::encode(&body[body.len() - 4..]),
            fcs_ok,
        })
    }
}

pub struct Switch {
    config: SwitchConfig,
    cycle: u64,

    ingress: Vec<Vec<GmiiSymbol>>,
    ingress_len: u64,
    prev_dv: Vec<bool>,
    cdc: Vec<VecDeque<(u64, GmiiSymbol)>>,

    rx: Vec<RxState>,
    wr: Vec<WriteCtrl>,
    rd: Vec<ReadCtrl>,
    tx: Vec<TxState>,
    voqs: Vec<Voq>,
    table: LearnTable,
    sram: BlockStore,
    free: FreeList,

    alloc_q: AllocQueue,
    write_rr: RoundRobin,
    read_rr: RoundRobin,
    release_rr: RoundRobin,
    table_rr: RoundRobin,

    // requests registered at the end of the previous cycle
    req_alloc: Vec<bool>,
    req_write: Vec<bool>,
    req_read: Vec<bool>,
    read_owner: Option<usize>,

    frame_dst: Vec<MacAddress>,
    pending_learn: Vec<Option<MacAddress>>,
    pending_route: Vec<VecDeque<PendingRoute>>,
    compensation: VecDeque<BlockIndex>,
    leaked: Vec<bool>,

    start_read: Vec<Option<(BlockIndex, bool)>>,
    want_block: Vec<bool>,

    monitors: Vec<EgressMonitor>,
    events: Vec<EgressEvent>,

    port_stats: Vec<PortStats>,
    floods: u64,
    unicasts: u64,
    learns: u64,
    evictions: u64,
    accepted_pushes: u64,
}

impl Switch {
    /// `ingress[p]` is port p's receive stream, one symbol per GMII cycle.
    pub fn new(
        config: SwitchConfig,
        mut ingress: Vec<Vec<GmiiSymbol>>,
    ) -> Result<Self, ConfigError> {
        config.validate()?;
        let n = config.ports;
        ingress.resize(n, Vec::new());
        let ingress_len = ingress.iter().map(|s| s.len() as u64).max().unwrap_or(0);
        Ok(Self {
            cycle: 0,
            ingress,
            ingress_len,
            prev_dv: vec![false; n],
            cdc: vec![VecDeque::new(); n],
            rx: vec![RxState::new(); n],
            wr: vec![WriteCtrl::new(config.block_payload); n],
            rd: vec![ReadCtrl::new(config.blocks); n],
            tx: (0..n).map(|p| TxState::new(p, config.cdc_depth)).collect(),
            voqs: vec![Voq::new(config.voq_depth); n],
            table: LearnTable::new(config.learn_entries, config.counter_bits),
            sram: BlockStore::new(config.blocks, config.block_payload),
            free: FreeList::new(config.blocks),
            alloc_q: AllocQueue::new(),
            write_rr: RoundRobin::new(n),
            read_rr: RoundRobin::new(n),
            release_rr: RoundRobin::new(2 * n + 1),
            table_rr: RoundRobin::new(2 * n),
            req_alloc: vec![false; n],
            req_write: vec![false; n],
            req_read: vec![false; n],
            read_owner: None,
            frame_dst: vec![MacAddress::default(); n],
            pending_learn: vec![None; n],
            pending_route: vec![VecDeque::new(); n],
            compensation: VecDeque::new(),
            leaked: vec![false; config.blocks],
            start_read: vec![None; n],
            want_block: vec![false; n],
            monitors: vec![EgressMonitor::default(); n],
            events: Vec::new(),
            port_stats: vec![PortStats::default(); n],
            floods: 0,
            unicasts: 0,
            learns: 0,
            evictions: 0,
            accepted_pushes: 0,
            config,
        })
    }

    pub fn from_trace(config: SwitchConfig, trace: &Trace) -> Result<Self, RunError> {
        config.validate()?;
        trace.validate(config.ports)?;
        let streams = trace.gmii_streams(config.ports)?;
        Ok(Self::new(config, streams)?)
    }

    pub fn config(&self) -> &SwitchConfig {
        &self.config
    }

    pub fn cycle(&self) -> u64 {
        self.cycle
    }

    pub fn free_list(&self) -> &FreeList {
        &self.free
    }

    pub fn block_store(&self) -> &BlockStore {
        &self.sram
    }

    /// Fault injection and white-box tests.
    pub fn block_store_mut(&mut self) -> &mut BlockStore {
        &mut self.sram
    }

    pub fn learn_table(&self) -> &LearnTable {
        &self.table
    }

    pub fn voq(&self, port: usize) -> &Voq {
        &self.voqs[port]
    }

    pub fn events(&self) -> &[EgressEvent] {
        &self.events
    }

    pub fn into_events(self) -> Vec<EgressEvent> {
        self.events
    }

    /// Trace exhausted and nothing left anywhere in the pipeline.
    pub fn is_quiescent(&self) -> bool {
        let n = self.config.ports;
        self.cycle / self.config.clock_ratio > self.ingress_len
            && self.alloc_q.is_empty()
            && self.compensation.is_empty()
            && (0..n).all(|p| {
                self.cdc[p].is_empty()
                    && self.rx[p].is_idle()
                    && self.wr[p].is_quiet()
                    && self.rd[p].is_quiet()
                    && self.tx[p].is_quiet()
                    && self.voqs[p].is_empty()
                    && self.pending_learn[p].is_none()
                    && self.pending_route[p].is_empty()
                    && self.start_read[p].is_none()
                    && self.monitors[p].current.is_none()
                    && !self.req_alloc[p]
                    && !self.req_write[p]
                    && !self.req_read[p]
            })
    }

    pub fn stats(&self) -> SwitchStats {
        let active: u64 = self.wr.iter().map(|w| w.active_cycles()).sum();
        let stall: u64 = self.wr.iter().map(|w| w.stall_cycles()).sum();
        SwitchStats {
            ports: self.port_stats.clone(),
            floods: self.floods,
            unicasts: self.unicasts,
            learns: self.learns,
            evictions: self.evictions,
            leaked_blocks: self.leaked.iter().filter(|&&l| l).count() as u64,
            free_list_low_watermark: self.free.low_watermark(),
            wr_stall_cycle_fraction: if active == 0 {
                0.0
            } else {
                stall as f64 / active as f64
            },
            wr_stall_cycles: stall,
            wr_active_cycles: active,
            free_list_final: self.free.len(),
            cycles: self.cycle,
            truncated: false,
        }
    }

    /// Advance one switch cycle.
    #[allow(clippy::needless_range_loop)]
    pub fn step(&mut self) -> Result<CycleRecord, SimError> {
        let n = self.config.ports;
        let c = self.cycle;
        let ratio = self.config.clock_ratio;
        let gmii_edge = c.is_multiple_of(ratio);

        // 1. GMII ingress into the CDC queues
        if gmii_edge {
            let g = (c / ratio) as usize;
            for p in 0..n {
                let sym = self.ingress[p].get(g).copied().unwrap_or(GmiiSymbol::IDLE);
                if sym.dv || self.prev_dv[p] {
                    if self.cdc[p].len() >= self.config.cdc_depth {
                        return Err(SimError::CdcOverflow { port: p });
                    }
                    self.cdc[p].push_back((c + CDC_LATENCY, sym));
                }
                self.prev_dv[p] = sym.dv;
            }
        }

        // 2. grants from last cycle's requests
        let alloc_grant = self.alloc_q.grant(&self.req_alloc, &mut self.free);
        let write_grant = self.write_rr.grant(&self.req_write);
        let read_grant = self.read_rr.grant(&self.req_read);

        let mut release_req = Vec::with_capacity(2 * n + 1);
        release_req.extend(self.rd.iter().map(|r| r.free_request().is_some()));
        release_req.extend(self.wr.iter().map(|w| w.release_request().is_some()));
        release_req.push(!self.compensation.is_empty());
        match self.release_rr.grant(&release_req) {
            Some(r) if r < n => {
                let idx = self.rd[r].free_granted().unwrap();
                self.free.release(idx)?;
            }
            Some(r) if r < 2 * n => {
                let idx = self.wr[r - n].release_granted().unwrap();
                self.free.reclaim(idx)?;
            }
            Some(_) => {
                let idx = self.compensation.pop_front().unwrap();
                self.free.release(idx)?;
            }
            None => {}
        }

        let mut table_req = Vec::with_capacity(2 * n);
        table_req.extend(self.pending_learn.iter().map(Option::is_some));
        table_req.extend(
            (0..n).map(|p| !self.pending_route[p].is_empty() && self.pending_learn[p].is_none()),
        );
        let table_grant = self.table_rr.grant(&table_req);

        // 3. parsers
        let mut rx_out = vec![RxOutput::default(); n];
        for p in 0..n {
            let sample = match self.cdc[p].front() {
                Some(&(due, sym)) if due <= c => {
                    self.cdc[p].pop_front();
                    Some(sym)
                }
                _ => None,
            };
            let ready = self.wr[p].ready_with_grant(write_grant == Some(p));
            let out = rx_tick(&mut self.rx[p], sample, ready);
            if out.dst_ready {
                self.frame_dst[p] = out.dst;
            }
            if out.src_ready {
                self.pending_learn[p] = Some(out.src);
            }
            if out.eof {
                let s = &mut self.port_stats[p];
                s.rx_frames += 1;
                if out.backpressure_drop {
                    s.rx_backpressure_corruptions += 1;
                } else if out.error {
                    s.rx_crc_drops += 1;
                }
            }
            rx_out[p] = out;
        }

        // 4. write controllers
        for p in 0..n {
            let grant = alloc_grant.and_then(|(port, idx)| (port == p).then_some(idx));
            let out = self.wr[p].tick(&rx_out[p], grant, write_grant == Some(p));
            if let Some((idx, block)) = out.mem_write {
                self.sram.write(idx, block)?;
            }
            self.req_alloc[p] = out.alloc_request;
            self.req_write[p] = out.write_request.is_some();
            if let Some(done) = out.frame_done {
                if !done.error {
                    self.pending_route[p].push_back(PendingRoute {
                        dst: self.frame_dst[p],
                        blocks: done.blocks,
                        length: done.length,
                    });
                }
            }
        }

        // 5. learn / lookup
        let mut pushes: Vec<Option<VoqEntry>> = vec![None; n];
        let mut pushed_blocks: Vec<BlockIndex> = Vec::new();
        match table_grant {
            Some(g) if g < n => {
                let src = self.pending_learn[g].take().unwrap();
                self.learns += 1;
                if let LearnOutcome::Evicted { .. } = self.table.learn(src, g) {
                    self.evictions += 1;
                }
            }
            Some(g) => {
                let ingress = g - n;
                let pr = self.pending_route[ingress].pop_front().unwrap();
                let start = pr.blocks[0];
                let decision = route(&mut self.table, pr.dst, start, pr.length);
                let share = decision.share_count(n);
                for &b in &pr.blocks {
                    self.free.set_refcount(b, share)?;
                }
                let flood = matches!(decision.kind, RouteKind::Flood);
                if flood {
                    self.floods += 1;
                } else {
                    self.unicasts += 1;
                }
                for t in decision.targets(ingress, n) {
                    pushes[t] = Some(VoqEntry {
                        start,
                        flood,
                        length: pr.length,
                    });
                }
                pushed_blocks = pr.blocks;
            }
            None => {}
        }

        // 6. VOQs
        let mut heads: Vec<Option<VoqEntry>> = vec![None; n];
        for q in 0..n {
            let pop = self.tx[q].ready();
            let push = pushes[q];
            let (head, accepted) = self.voqs[q].tick(push, pop);
            heads[q] = head;
            if push.is_some() {
                if accepted {
                    self.accepted_pushes += 1;
                } else {
                    self.port_stats[q].voq_drops += 1;
                    if self.config.fix_flood_leak {
                        self.compensation.extend(pushed_blocks.iter().copied());
                    } else {
                        for b in &pushed_blocks {
                            self.leaked[b.get()] = true;
                        }
                    }
                }
            }
        }

        // 7. read controllers
        let mut to_tx: Vec<Option<(MemoryBlock, bool)>> = vec![None; n];
        let mut next_owner = None;
        for p in 0..n {
            let data = if self.read_owner == Some(p) {
                self.sram.read_data()
            } else {
                None
            };
            let out = self.rd[p].tick(
                self.start_read[p].take(),
                read_grant == Some(p),
                data,
                std::mem::take(&mut self.want_block[p]),
            )?;
            if let Some(idx) = out.mem_read_issue {
                self.sram.read(idx)?;
                next_owner = Some(p);
            }
            self.req_read[p] = out.mem_read_request.is_some();
            to_tx[p] = out.block_out;
        }

        // 8. egress
        let mut gmii_tx = vec![None; n];
        let mut completed = Vec::new();
        for p in 0..n {
            let out = self.tx[p].tick(c, heads[p], to_tx[p].take(), gmii_edge)?;
            self.start_read[p] = out.start_read;
            self.want_block[p] = out.want_block;
            if let Some(sym) = out.gmii {
                gmii_tx[p] = Some(sym);
                if let Some(ev) = self.monitors[p].observe(p, c / ratio, sym)? {
                    self.port_stats[p].tx_frames += 1;
                    completed.push(ev);
                }
            }
        }
        self.events.extend(completed.iter().cloned());

        // 9. commit
        self.free.commit();
        self.sram.end_cycle();
        self.read_owner = next_owner;

        // 10. audits
        self.audit_blocks()?;

        self.cycle += 1;
        Ok(CycleRecord {
            cycle: c,
            gmii_tx,
            free_blocks: self.free.len(),
            completed,
        })
    }

    /// Where the blocks are right now.
    pub fn block_accounting(&self) -> BlockAccounting {
        let held = self
            .wr
            .iter()
            .map(|w| w.held_blocks().count())
            .sum::<usize>()
            + self
                .pending_route
                .iter()
                .flat_map(|q| q.iter())
                .map(|pr| pr.blocks.len())
                .sum::<usize>();
        BlockAccounting {
            free: self.free.len(),
            referenced: self.free.referenced().count(),
            held,
        }
    }

    /// Every block must be in exactly one place: the free stack, a
    /// reference count, or a controller's hands.
    fn audit_blocks(&self) -> Result<(), SimError> {
        let mut seen: Vec<u32> = (0..self.config.blocks)
            .map(BlockIndex::new)
            .map(|idx| u32::from(self.free.is_free(idx)) + u32::from(self.free.refcount(idx) > 0))
            .collect();
        for w in &self.wr {
            for b in w.held_blocks() {
                seen[b.get()] += 1;
            }
        }
        for q in &self.pending_route {
            for pr in q {
                for b in &pr.blocks {
                    seen[b.get()] += 1;
                }
            }
        }
        if let Some(i) = seen.iter().position(|&s| s != 1) {
            return Err(SimError::Conservation {
                cycle: self.cycle,
                detail: format!("block {i} accounted {} times", seen[i]),
            });
        }
        Ok(())
    }

    /// Step until quiescent or out of cycles.
    pub fn run_to_end(&mut self) -> Result<SwitchStats, SimError> {
        let mut quiet = false;
        while self.cycle < self.config.max_cycles {
            self.step()?;
            if self.is_quiescent() {
                quiet = true;
                break;
            }
        }
        let mut stats = self.stats();
        stats.truncated = !quiet;
        if quiet {
            let delivered: u64 = stats.ports.iter().map(|p| p.tx_frames).sum();
            if delivered != self.accepted_pushes {
                return Err(SimError::Conservation {
                    cycle: self.cycle,
                    detail: format!(
                        "{delivered} frames transmitted but {} queued",
                        self.accepted_pushes
                    ),
                });
            }
        }
        Ok(stats)
    }
}

/// Validate the trace, simulate it, and return the egress events and final
/// statistics.
pub fn run(
    config: &SwitchConfig,
    trace: &Trace,
) -> Result<(Vec<EgressEvent>, SwitchStats), RunError> {
    let mut sw = Switch::from_trace(config.clone(), trace)?;
    let stats = sw.run_to_end()?;
    Ok((sw.into_events(), stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::EthernetFrame;
    use crate::trace::TraceRecord;

    fn host(i: u8) -> MacAddress {
        MacAddress([0x02, 0, 0, 0, 0, i])
    }

    fn frame(dst: MacAddress, src: MacAddress, payload: usize) -> EthernetFrame {
        EthernetFrame::new(
            dst,
            src,
            0x0800,
            (0..payload).map(|i| (i * 7) as u8).collect(),
        )
    }

    #[test]
    fn config_limits() {
        assert!(SwitchConfig::default().validate().is_ok());
        let bad = |f: fn(&mut SwitchConfig)| {
            let mut c = SwitchConfig::default();
            f(&mut c);
            c.validate().is_err()
        };
        assert!(bad(|c| c.ports = 1));
        assert!(bad(|c| c.ports = 6));
        assert!(bad(|c| c.blocks = 65));
        assert!(bad(|c| c.clock_ratio = 0));
        assert!(bad(|c| c.voq_depth = 0));
    }

    #[test]
    fn idle_switch_stays_empty() {
        let mut sw = Switch::new(SwitchConfig::default(), vec![]).unwrap();
        for _ in 0..1000 {
            let rec = sw.step().unwrap();
            assert!(rec.completed.is_empty());
            assert_eq!(rec.free_blocks, 64);
        }
        let s = sw.stats();
        assert_eq!(s.floods + s.unicasts + s.learns, 0);
        assert!(s.ports.iter().all(|p| *p == PortStats::default()));
        assert_eq!(s.free_list_final, 64);
    }

    #[test]
    fn single_flood_reaches_other_ports() {
        let f = frame(host(9), host(1), 100);
        let trace = Trace::from_records(vec![TraceRecord::from_frame(0, 0, &f, false)]);
        let (events, stats) = run(&SwitchConfig::default(), &trace).unwrap();
        let mut ports: Vec<usize> = events.iter().map(|e| e.port).collect();
        ports.sort();
        assert_eq!(ports, vec![1, 2, 3]);
        assert!(events.iter().all(|e| e.fcs_ok && e.frame() == f));
        assert_eq!(stats.free_list_final, 64);
        assert_eq!(stats.floods, 1);
        assert!(!stats.truncated);
    }

    #[test]
    fn corrupt_frame_is_dropped() {
        let f = frame(host(9), host(1), 100);
        let trace = Trace::from_records(vec![TraceRecord::from_frame(2, 5, &f, true)]);
        let (events, stats) = run(&SwitchConfig::default(), &trace).unwrap();
        assert!(events.is_empty());
        assert_eq!(stats.ports[2].rx_crc_drops, 1);
        assert_eq!(stats.free_list_final, 64);
    }

    #[test]
    fn hairpin_unicast() {
        let a = frame(host(9), host(1), 60);
        let b = frame(host(1), host(2), 60);
        let trace = Trace::from_records(vec![
            TraceRecord::from_frame(1, 0, &a, false),
            TraceRecord::from_frame(1, 200, &b, false),
        ]);
        let (events, _) = run(&SwitchConfig::default(), &trace).unwrap();
        let hair: Vec<_> = events.iter().filter(|e| e.frame() == b).collect();
        assert_eq!(hair.len(), 1);
        assert_eq!(hair[0].port, 1);
    }

    #[test]
    fn corrupted_chain_is_caught() {
        let f = frame(host(9), host(1), 200);
        let trace = Trace::from_records(vec![TraceRecord::from_frame(0, 0, &f, false)]);
        let mut sw = Switch::from_trace(SwitchConfig::default(), &trace).unwrap();
        // run until the frame is stored and queued, then loop its last block
        while sw.voqs.iter().all(|q| q.is_empty()) && sw.tx.iter().all(|t| t.ready()) {
            sw.step().unwrap();
        }
        for i in 0..4 {
            let idx = BlockIndex::new(i);
            let mut b = sw.block_store().peek(idx).clone();
            if b.footer.eop {
                b.footer.eop = false;
                b.footer.next = BlockIndex::new(0);
                sw.block_store_mut().poke(idx, b);
            }
        }
        let err = sw.run_to_end().unwrap_err();
        assert!(
            matches!(
                err,
                SimError::ChainCycle { .. } | SimError::LengthMismatch { .. }
            ),
            "{err}"
        );
    }
}
