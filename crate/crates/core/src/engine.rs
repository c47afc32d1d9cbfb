//! Per-process state machine: local Dijkstra over owned vertices, distance
//! updates to the owners of ghost targets, activation on receipt, and idle
//! time split between pruning and termination probing.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::graph::{Dist, Partition, VertexId, INF};
use crate::termination::{TermError, TermMode, TermState, TermVerdict, Token};
use crate::transport::{Endpoint, Message, Payload, ProcStatus, Process, Rank, TransportError};
use crate::trishla::{prune_step, PruneState};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("rank {rank} received an update for vertex {v} it does not own")]
    Misrouted { rank: Rank, v: VertexId },
    #[error(transparent)]
    Termination(#[from] TermError),
    #[error(transparent)]
    Transport(#[from] TransportError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineConfig {
    pub term_mode: TermMode,
    /// Run triangle pruning while idle before activation.
    pub prune: bool,
    /// Candidate triangles examined per idle quantum.
    pub prune_budget: usize,
    /// Keep pruning whenever idle, not just before the first update.
    pub resume_pruning: bool,
    /// Record the order in which vertices are settled.
    pub trace_pops: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            term_mode: TermMode::TokenRing,
            prune: true,
            prune_budget: 256,
            resume_pruning: false,
            trace_pops: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Pruning,
    Working,
    ProbingTermination,
    Terminated,
}

/// Tentative distances for the owned range. Values only decrease.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistMap {
    base: usize,
    dist: Vec<Dist>,
}

impl DistMap {
    fn new(base: usize, len: usize) -> Self {
        DistMap { base, dist: vec![INF; len] }
    }

    pub fn get(&self, v: VertexId) -> Dist {
        self.dist[v as usize - self.base]
    }

    /// Lowers `dist(v)` to `d` if that is an improvement.
    fn improve(&mut self, v: VertexId, d: Dist) -> bool {
        let slot = &mut self.dist[v as usize - self.base];
        if d < *slot {
            *slot = d;
            true
        } else {
            false
        }
    }

    /// `(vertex, distance)` over the owned range.
    pub fn iter(&self) -> impl Iterator<Item = (VertexId, Dist)> + '_ {
        self.dist.iter().enumerate().map(|(i, &d)| ((self.base + i) as VertexId, d))
    }
}

/// Lazy-deletion min-queue keyed by `(distance, vertex)`.
#[derive(Debug, Clone, Default)]
pub struct LocalPq(BinaryHeap<Reverse<(Dist, VertexId)>>);

impl LocalPq {
    fn push(&mut self, d: Dist, v: VertexId) {
        self.0.push(Reverse((d, v)));
    }

    fn pop(&mut self) -> Option<(Dist, VertexId)> {
        self.0.pop().map(|Reverse(e)| e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct ProcState {
    part: Partition,
    cfg: EngineConfig,
    dmap: DistMap,
    pq: LocalPq,
    prune: PruneState,
    term: TermState,
    phase: Phase,
    verdict: TermVerdict,
    /// DistUpdates received.
    msg_count: u64,
    /// DistUpdates sent.
    sent_count: u64,
    relax_attempts: u64,
    pops: u64,
    pop_log: Vec<VertexId>,
}

impl ProcState {
    pub fn init(part: Partition, source: VertexId, cfg: EngineConfig) -> Self {
        let owned = part.owned();
        let mut dmap = DistMap::new(owned.start, owned.len());
        let mut pq = LocalPq::default();
        let is_source_owner = part.is_owned(source);
        if is_source_owner {
            dmap.improve(source, 0);
            pq.push(0, source);
        }
        let phase = if is_source_owner || !cfg.prune { Phase::Working } else { Phase::Pruning };
        ProcState {
            term: TermState::new(cfg.term_mode),
            part,
            cfg,
            dmap,
            pq,
            prune: PruneState::new(),
            phase,
            verdict: TermVerdict::default(),
            msg_count: 0,
            sent_count: 0,
            relax_attempts: 0,
            pops: 0,
            pop_log: Vec::new(),
        }
    }

    pub fn rank(&self) -> Rank {
        self.part.part_id()
    }

    pub fn partition(&self) -> &Partition {
        &self.part
    }

    pub fn dist(&self) -> &DistMap {
        &self.dmap
    }

    pub fn pq(&self) -> &LocalPq {
        &self.pq
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn term(&self) -> &TermState {
        &self.term
    }

    pub fn verdict(&self) -> TermVerdict {
        self.verdict
    }

    pub fn msg_count(&self) -> u64 {
        self.msg_count
    }

    pub fn sent_count(&self) -> u64 {
        self.sent_count
    }

    /// Edge examinations across all non-stale pops.
    pub fn relax_attempts(&self) -> u64 {
        self.relax_attempts
    }

    pub fn pops(&self) -> u64 {
        self.pops
    }

    /// Settled vertices in order, when `trace_pops` is on.
    pub fn pop_log(&self) -> &[VertexId] {
        &self.pop_log
    }

    pub fn pruned_edges(&self) -> usize {
        self.prune.removed()
    }

    fn pruning_enabled(&self) -> bool {
        self.cfg.prune
            && !self.prune.is_done()
            && (self.phase == Phase::Pruning || self.cfg.resume_pruning)
    }

    /// Folds received messages into local state. Returns the number of
    /// distance updates among them.
    pub fn absorb_messages(&mut self, msgs: Vec<Message>) -> Result<usize, EngineError> {
        let rank = self.rank();
        let mut updates = 0;
        for m in msgs {
            match m.payload {
                Payload::DistUpdate { v, d } => {
                    if !self.part.is_owned(v) {
                        return Err(EngineError::Misrouted { rank, v });
                    }
                    updates += 1;
                    self.msg_count += 1;
                    self.term.on_recv();
                    if self.dmap.improve(v, d) {
                        self.pq.push(d, v);
                    }
                }
                Payload::Token { color, count } => self.term.on_token(rank, Token { color, count })?,
                Payload::RedToken => self.term.on_red(),
            }
        }
        if updates > 0 {
            self.phase = Phase::Working;
        }
        Ok(updates)
    }

    /// Pops until the queue is empty, relaxing owned targets and shipping
    /// distances for ghost targets to their owners.
    pub fn dijkstra_drain(&mut self, ep: &mut dyn Endpoint) -> Result<(), EngineError> {
        let ProcState { part, dmap, pq, term, cfg, pop_log, pops, relax_attempts, sent_count, .. } = self;
        let layout = *part.layout();
        while let Some((d, u)) = pq.pop() {
            if d > dmap.get(u) {
                continue;
            }
            *pops += 1;
            if cfg.trace_pops {
                pop_log.push(u);
            }
            for (v, w) in part.neighbors(u) {
                *relax_attempts += 1;
                let nd = d.saturating_add(w);
                if part.is_owned(v) {
                    if dmap.improve(v, nd) {
                        pq.push(nd, v);
                    }
                } else {
                    ep.send(layout.owner_unchecked(v), Payload::DistUpdate { v, d: nd })?;
                    *sent_count += 1;
                    term.on_send();
                }
            }
        }
        Ok(())
    }

    /// One scheduler quantum: poll, absorb, drain, prune if idle, then
    /// consult the termination detector.
    pub fn step(&mut self, ep: &mut dyn Endpoint) -> Result<ProcStatus, EngineError> {
        if self.phase == Phase::Terminated {
            return Ok(ProcStatus::Terminated { clean: self.verdict.clean });
        }
        let updates = self.absorb_messages(ep.poll())?;
        if !self.pq.is_empty() {
            self.dijkstra_drain(ep)?;
        } else if self.pruning_enabled() {
            prune_step(&mut self.part, &mut self.prune, self.cfg.prune_budget);
        }
        let idle = self.pq.is_empty();
        let verdict = match self.cfg.term_mode {
            TermMode::TokenRing => self.term.token_step(ep, idle)?,
            TermMode::CountHeuristic => {
                let busy_pruning = self.pruning_enabled();
                self.term.record_poll(updates > 0, idle && !busy_pruning);
                self.term.heuristic_step(self.part.n_interedges(), ep.n_parts())
            }
            TermMode::CountHeuristicLiteral => {
                self.term.literal_step(self.msg_count, self.part.n_interedges(), ep.n_parts())
            }
        };
        if verdict.terminated {
            self.verdict = verdict;
            self.phase = Phase::Terminated;
            return Ok(ProcStatus::Terminated { clean: verdict.clean });
        }
        if self.phase == Phase::Working {
            self.phase = Phase::ProbingTermination;
        }
        Ok(ProcStatus::Running)
    }
}

impl Process for ProcState {
    type Error = EngineError;

    fn step(&mut self, ep: &mut dyn Endpoint) -> Result<ProcStatus, EngineError> {
        ProcState::step(self, ep)
    }

    fn has_pending_work(&self) -> bool {
        !self.pq.is_empty()
    }
}
