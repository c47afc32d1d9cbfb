use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Instant;

use crossbeam_channel::{unbounded, Receiver, Sender};

use super::{check_send, Endpoint, Message, Payload, ProcStatus, Process, Rank, TransportConfig, TransportError};

#[derive(Debug, Default)]
pub struct ThreadLedger {
    pub messages_sent: AtomicU64,
    pub updates_sent: AtomicU64,
    pub updates_received: AtomicU64,
}

/// Endpoint backed by one unbounded channel per destination. A single
/// queue per receiver keeps each sender's messages in order. The owning
/// thread exits on termination, so a terminated rank cannot send.
pub struct ThreadEndpoint {
    rank: Rank,
    peers: Vec<Sender<Message>>,
    inbox: Receiver<Message>,
    ledger: Arc<ThreadLedger>,
}

impl Endpoint for ThreadEndpoint {
    fn rank(&self) -> Rank {
        self.rank
    }

    fn n_parts(&self) -> usize {
        self.peers.len()
    }

    fn send(&mut self, dst: Rank, payload: Payload) -> Result<(), TransportError> {
        check_send(self.rank, dst, self.peers.len(), &payload)?;
        // Receivers outlive every sender, so this cannot fail.
        let _ = self.peers[dst].send(Message { src: self.rank, dst, payload });
        self.ledger.messages_sent.fetch_add(1, Ordering::Relaxed);
        if payload.is_update() {
            self.ledger.updates_sent.fetch_add(1, Ordering::Relaxed);
        }
        Ok(())
    }

    fn poll(&mut self) -> Vec<Message> {
        let msgs: Vec<Message> = self.inbox.try_iter().collect();
        let updates = msgs.iter().filter(|m| m.payload.is_update()).count() as u64;
        self.ledger.updates_received.fetch_add(updates, Ordering::Relaxed);
        msgs
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThreadOutcome {
    pub wall_seconds: f64,
    pub all_terminated: bool,
    pub all_clean: bool,
    pub timed_out: bool,
    pub messages_sent: u64,
    pub updates_sent: u64,
    pub updates_received: u64,
}

/// A finished process and its verdict, `None` if it was aborted.
type ThreadResult<P> = Result<(P, Option<bool>), <P as Process>::Error>;

/// Runs each process on its own thread until all terminate or the wall
/// clock cap in `cfg` expires.
pub fn run_threaded<P>(procs: Vec<P>, cfg: &TransportConfig) -> Result<(ThreadOutcome, Vec<P>), P::Error>
where
    P: Process + Send,
    P::Error: Send,
{
    cfg.validate()?;
    let n = procs.len();
    if n != cfg.n_parts {
        return Err(TransportError::Config(format!("{n} processes for {} parts", cfg.n_parts)).into());
    }
    let (senders, receivers): (Vec<_>, Vec<_>) = (0..n).map(|_| unbounded()).unzip();
    let ledger = Arc::new(ThreadLedger::default());
    let abort = AtomicBool::new(false);
    let start = Instant::now();
    let cap = cfg.time_cap;

    let results: Vec<ThreadResult<P>> = std::thread::scope(|scope| {
        let handles: Vec<_> = procs
            .into_iter()
            .enumerate()
            .map(|(rank, mut proc)| {
                let mut ep = ThreadEndpoint {
                    rank,
                    peers: senders.clone(),
                    inbox: receivers[rank].clone(),
                    ledger: Arc::clone(&ledger),
                };
                let abort = &abort;
                scope.spawn(move || {
                    loop {
                        if abort.load(Ordering::Relaxed) {
                            return Ok((proc, None));
                        }
                        if let ProcStatus::Terminated { clean } = proc.step(&mut ep)? {
                            return Ok((proc, Some(clean)));
                        }
                        if !proc.has_pending_work() {
                            if start.elapsed() > cap {
                                abort.store(true, Ordering::Relaxed);
                            }
                            std::thread::yield_now();
                        }
                    }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("process thread panicked")).collect()
    });
    let wall_seconds = start.elapsed().as_secs_f64();

    let mut out_procs = Vec::with_capacity(n);
    let mut statuses = Vec::with_capacity(n);
    for r in results {
        let (p, s) = r?;
        out_procs.push(p);
        statuses.push(s);
    }
    let all_terminated = statuses.iter().all(Option::is_some);
    let outcome = ThreadOutcome {
        wall_seconds,
        all_terminated,
        all_clean: all_terminated && statuses.iter().all(|s| *s == Some(true)),
        timed_out: !all_terminated,
        messages_sent: ledger.messages_sent.load(Ordering::Relaxed),
        updates_sent: ledger.updates_sent.load(Ordering::Relaxed),
        updates_received: ledger.updates_received.load(Ordering::Relaxed),
    };
    Ok((outcome, out_procs))
}
