//! Point-to-point messaging between logical processes.
//!
//! Delivery is reliable, unduplicated and FIFO per `(src, dst)` channel.
//! Receiving is a non-blocking drain of everything currently deliverable.

mod sim;
mod threaded;

use std::fmt;
use std::sync::Arc;
use std::time::Duration;

use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Dist, VertexId};

pub use sim::{run_simulation, Ledger, SafetyViolation, SimEndpoint, SimNetwork, SimOutcome, Simulation};
pub use threaded::{run_threaded, ThreadEndpoint, ThreadLedger, ThreadOutcome};

pub type Rank = usize;

/// Process and token color for ring termination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Color {
    White,
    Black,
}

impl Color {
    pub fn or(self, other: Color) -> Color {
        if self == Color::Black || other == Color::Black {
            Color::Black
        } else {
            Color::White
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Payload {
    /// Tentative distance `d` for vertex `v`, sent to `v`'s owner.
    DistUpdate { v: VertexId, d: Dist },
    Token { color: Color, count: i64 },
    RedToken,
}

impl Payload {
    pub fn is_update(&self) -> bool {
        matches!(self, Payload::DistUpdate { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Message {
    pub src: Rank,
    pub dst: Rank,
    pub payload: Payload,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TransportError {
    #[error("destination {dst} outside [0, {n})")]
    BadDestination { dst: Rank, n: usize },
    #[error("rank {0} sent a ring token to itself")]
    TokenToSelf(Rank),
    #[error("rank {0} sent after terminating")]
    SendAfterTermination(Rank),
    #[error("invalid transport config: {0}")]
    Config(String),
}

/// A process's handle on the network.
pub trait Endpoint {
    fn rank(&self) -> Rank;
    fn n_parts(&self) -> usize;
    fn send(&mut self, dst: Rank, payload: Payload) -> Result<(), TransportError>;
    /// Drains every message currently deliverable to this rank, in delivery
    /// order.
    fn poll(&mut self) -> Vec<Message>;
}

pub(crate) fn check_send(src: Rank, dst: Rank, n: usize, payload: &Payload) -> Result<(), TransportError> {
    if dst >= n {
        return Err(TransportError::BadDestination { dst, n });
    }
    if dst == src && !payload.is_update() {
        return Err(TransportError::TokenToSelf(src));
    }
    Ok(())
}

/// What a process reports after one quantum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProcStatus {
    Running,
    Terminated { clean: bool },
}

/// A logical process driven by a scheduler.
pub trait Process {
    type Error: From<TransportError>;

    fn step(&mut self, ep: &mut dyn Endpoint) -> Result<ProcStatus, Self::Error>;

    /// True while the process has local work queued (a non-empty priority
    /// queue). Pruning does not count.
    fn has_pending_work(&self) -> bool;
}

pub type DelayFn = dyn Fn(&Message, u64, &mut ChaCha8Rng) -> u64 + Send + Sync;

/// Per-message delivery delay in simulator ticks.
#[derive(Clone)]
pub enum DelayModel {
    /// Uniform integer draw in `[min, max]`.
    Uniform { min: u64, max: u64 },
    /// Arbitrary schedule: `(message, send tick, rng) -> delay`. Results
    /// below 1 are raised to 1.
    Custom(Arc<DelayFn>),
}

impl fmt::Debug for DelayModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DelayModel::Uniform { min, max } => write!(f, "Uniform({min}..={max})"),
            DelayModel::Custom(_) => f.write_str("Custom"),
        }
    }
}

impl DelayModel {
    pub fn uniform(min: u64, max: u64) -> Self {
        DelayModel::Uniform { min, max }
    }

    pub fn custom(f: impl Fn(&Message, u64, &mut ChaCha8Rng) -> u64 + Send + Sync + 'static) -> Self {
        DelayModel::Custom(Arc::new(f))
    }

    /// Largest delay the model can produce, when known.
    pub fn max_delay(&self) -> Option<u64> {
        match self {
            DelayModel::Uniform { max, .. } => Some(*max),
            DelayModel::Custom(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Simulated,
    Threaded,
}

#[derive(Debug, Clone)]
pub struct TransportConfig {
    pub n_parts: usize,
    pub mode: Mode,
    pub delay: DelayModel,
    pub seed: u64,
    /// Simulated runs stop here and report non-termination.
    pub tick_cap: u64,
    /// Wall-clock cap for threaded runs.
    pub time_cap: Duration,
}

impl TransportConfig {
    pub fn simulated(n_parts: usize, seed: u64) -> Self {
        TransportConfig {
            n_parts,
            mode: Mode::Simulated,
            delay: DelayModel::uniform(1, 8),
            seed,
            tick_cap: 1_000_000,
            time_cap: Duration::from_secs(120),
        }
    }

    pub fn threaded(n_parts: usize) -> Self {
        TransportConfig { mode: Mode::Threaded, ..Self::simulated(n_parts, 0) }
    }

    pub fn with_delay(mut self, delay: DelayModel) -> Self {
        self.delay = delay;
        self
    }

    pub fn validate(&self) -> Result<(), TransportError> {
        if self.n_parts == 0 {
            return Err(TransportError::Config("n_parts must be at least 1".into()));
        }
        if let DelayModel::Uniform { min, max } = self.delay {
            if min < 1 || max < min {
                return Err(TransportError::Config(format!("delay range [{min}, {max}] needs 1 <= min <= max")));
            }
        }
        Ok(())
    }
}
