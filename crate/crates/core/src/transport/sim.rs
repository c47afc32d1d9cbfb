use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    check_send, DelayModel, Endpoint, Message, Payload, ProcStatus, Process, Rank, TransportConfig,
    TransportError,
};

/// Message accounting kept by the simulated network.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Ledger {
    n: usize,
    /// Indexed `src * n + dst`.
    pub sent: Vec<u64>,
    /// Messages handed to the destination by `poll`, same indexing.
    pub received: Vec<u64>,
    pub updates_sent: u64,
    pub updates_received: u64,
    pub tokens_sent: u64,
}

impl Ledger {
    fn new(n: usize) -> Self {
        Ledger { n, sent: vec![0; n * n], received: vec![0; n * n], ..Default::default() }
    }

    /// DistUpdates sent but not yet polled by their receiver.
    pub fn in_flight_updates(&self) -> u64 {
        self.updates_sent - self.updates_received
    }

    pub fn messages_sent(&self) -> u64 {
        self.sent.iter().sum()
    }

    pub fn channel(&self, src: Rank, dst: Rank) -> (u64, u64) {
        let c = src * self.n + dst;
        (self.sent[c], self.received[c])
    }

    /// Every sent message has been received on every channel.
    pub fn balanced(&self) -> bool {
        self.sent == self.received
    }
}

/// Discrete-event network: per-channel FIFO queues stamped with delivery
/// ticks, a per-rank inbox of delivered messages, and a seeded delay source.
#[derive(Debug)]
pub struct SimNetwork {
    n: usize,
    now: u64,
    rng: ChaCha8Rng,
    delay: DelayModel,
    channels: Vec<VecDeque<(u64, Message)>>,
    last_due: Vec<u64>,
    inbox: Vec<VecDeque<Message>>,
    terminated: Vec<bool>,
    ledger: Ledger,
}

impl SimNetwork {
    pub fn new(cfg: &TransportConfig) -> Result<Self, TransportError> {
        cfg.validate()?;
        let n = cfg.n_parts;
        Ok(SimNetwork {
            n,
            now: 0,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            delay: cfg.delay.clone(),
            channels: vec![VecDeque::new(); n * n],
            last_due: vec![0; n * n],
            inbox: vec![VecDeque::new(); n],
            terminated: vec![false; n],
            ledger: Ledger::new(n),
        })
    }

    pub fn now(&self) -> u64 {
        self.now
    }

    pub fn ledger(&self) -> &Ledger {
        &self.ledger
    }

    pub fn endpoint(&mut self, rank: Rank) -> SimEndpoint<'_> {
        SimEndpoint { net: self, rank }
    }

    /// Moves the clock to `tick` and delivers everything due by then.
    pub fn advance_to(&mut self, tick: u64) {
        self.now = tick;
        for c in 0..self.channels.len() {
            let dst = c % self.n;
            while let Some(&(due, msg)) = self.channels[c].front() {
                if due > tick {
                    break;
                }
                self.channels[c].pop_front();
                self.inbox[dst].push_back(msg);
            }
        }
    }

    fn draw_delay(&mut self, msg: &Message) -> u64 {
        let d = match &self.delay {
            DelayModel::Uniform { min, max } => self.rng.gen_range(*min..=*max),
            DelayModel::Custom(f) => f(msg, self.now, &mut self.rng),
        };
        d.max(1)
    }

    /// Queues `payload` on the `(src, dst)` channel and returns its delivery
    /// tick.
    pub fn send(&mut self, src: Rank, dst: Rank, payload: Payload) -> Result<u64, TransportError> {
        check_send(src, dst, self.n, &payload)?;
        if self.terminated[src] {
            return Err(TransportError::SendAfterTermination(src));
        }
        let msg = Message { src, dst, payload };
        let c = src * self.n + dst;
        // FIFO: never overtake an earlier message on the same channel.
        let due = (self.now + self.draw_delay(&msg)).max(self.last_due[c]);
        self.last_due[c] = due;
        self.channels[c].push_back((due, msg));
        self.ledger.sent[c] += 1;
        match payload {
            Payload::DistUpdate { .. } => self.ledger.updates_sent += 1,
            _ => self.ledger.tokens_sent += 1,
        }
        Ok(due)
    }

    pub fn poll(&mut self, rank: Rank) -> Vec<Message> {
        let msgs: Vec<Message> = self.inbox[rank].drain(..).collect();
        for m in &msgs {
            self.ledger.received[m.src * self.n + m.dst] += 1;
            if m.payload.is_update() {
                self.ledger.updates_received += 1;
            }
        }
        msgs
    }

    pub fn mark_terminated(&mut self, rank: Rank) {
        self.terminated[rank] = true;
    }
}

pub struct SimEndpoint<'a> {
    net: &'a mut SimNetwork,
    rank: Rank,
}

impl Endpoint for SimEndpoint<'_> {
    fn rank(&self) -> Rank {
        self.rank
    }

    fn n_parts(&self) -> usize {
        self.net.n
    }

    fn send(&mut self, dst: Rank, payload: Payload) -> Result<(), TransportError> {
        self.net.send(self.rank, dst, payload).map(|_| ())
    }

    fn poll(&mut self) -> Vec<Message> {
        self.net.poll(self.rank)
    }
}

/// A clean termination report issued while work remained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SafetyViolation {
    pub tick: u64,
    pub rank: Rank,
    pub in_flight_updates: u64,
    pub busy_ranks: Vec<Rank>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimOutcome {
    /// Ticks executed.
    pub ticks: u64,
    pub all_terminated: bool,
    /// Every process terminated and every one of them reported clean.
    pub all_clean: bool,
    pub tick_cap_hit: bool,
    /// First tick at whose end no DistUpdate was in flight and no process
    /// had queued work.
    pub quiescence_tick: Option<u64>,
    /// Tick in which the last process terminated.
    pub termination_tick: Option<u64>,
    pub violations: Vec<SafetyViolation>,
    pub ledger: Ledger,
}

/// Round-robin cooperative scheduler. Each tick delivers due messages, then
/// steps every live process once in rank order.
pub struct Simulation<P> {
    net: SimNetwork,
    procs: Vec<P>,
    status: Vec<Option<bool>>,
    tick: u64,
    tick_cap: u64,
    quiescence_tick: Option<u64>,
    termination_tick: Option<u64>,
    violations: Vec<SafetyViolation>,
}

impl<P: Process> Simulation<P> {
    pub fn new(procs: Vec<P>, cfg: &TransportConfig) -> Result<Self, TransportError> {
        if procs.len() != cfg.n_parts {
            return Err(TransportError::Config(format!(
                "{} processes for {} parts",
                procs.len(),
                cfg.n_parts
            )));
        }
        let n = procs.len();
        Ok(Simulation {
            net: SimNetwork::new(cfg)?,
            procs,
            status: vec![None; n],
            tick: 0,
            tick_cap: cfg.tick_cap,
            quiescence_tick: None,
            termination_tick: None,
            violations: Vec::new(),
        })
    }

    pub fn procs(&self) -> &[P] {
        &self.procs
    }

    pub fn network(&self) -> &SimNetwork {
        &self.net
    }

    pub fn tick_count(&self) -> u64 {
        self.tick
    }

    pub fn all_terminated(&self) -> bool {
        self.status.iter().all(Option::is_some)
    }

    fn busy_ranks(&self) -> Vec<Rank> {
        (0..self.procs.len()).filter(|&r| self.procs[r].has_pending_work()).collect()
    }

    /// Runs one tick. Returns false once every process has terminated.
    pub fn tick(&mut self) -> Result<bool, P::Error> {
        if self.all_terminated() {
            return Ok(false);
        }
        let now = self.tick;
        self.net.advance_to(now);
        for r in 0..self.procs.len() {
            if self.status[r].is_some() {
                continue;
            }
            let mut ep = self.net.endpoint(r);
            if let ProcStatus::Terminated { clean } = self.procs[r].step(&mut ep)? {
                self.status[r] = Some(clean);
                self.net.mark_terminated(r);
                let in_flight = self.net.ledger.in_flight_updates();
                let busy = self.busy_ranks();
                if clean && (in_flight > 0 || !busy.is_empty()) {
                    self.violations.push(SafetyViolation {
                        tick: now,
                        rank: r,
                        in_flight_updates: in_flight,
                        busy_ranks: busy,
                    });
                }
            }
        }
        if self.quiescence_tick.is_none()
            && self.net.ledger.in_flight_updates() == 0
            && self.busy_ranks().is_empty()
        {
            self.quiescence_tick = Some(now);
        }
        self.tick += 1;
        if self.all_terminated() {
            self.termination_tick = Some(now);
            return Ok(false);
        }
        Ok(true)
    }

    pub fn run(mut self) -> Result<(SimOutcome, Vec<P>), P::Error> {
        while self.tick < self.tick_cap && self.tick()? {}
        let all_terminated = self.all_terminated();
        let outcome = SimOutcome {
            ticks: self.tick,
            all_terminated,
            all_clean: all_terminated && self.status.iter().all(|s| *s == Some(true)),
            tick_cap_hit: !all_terminated,
            quiescence_tick: self.quiescence_tick,
            termination_tick: self.termination_tick,
            violations: self.violations,
            ledger: self.net.ledger.clone(),
        };
        Ok((outcome, self.procs))
    }
}

/// Runs `procs` to completion (or the tick cap) under the simulator.
pub fn run_simulation<P: Process>(
    procs: Vec<P>,
    cfg: &TransportConfig,
) -> Result<(SimOutcome, Vec<P>), P::Error> {
    Simulation::new(procs, cfg)?.run()
}
