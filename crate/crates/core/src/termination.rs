//! Quiescence detection.
//!
//! `TokenRing` is a Safra-style ring: every process keeps a color and a
//! persistent counter (receives minus sends of distance updates). Rank 0
//! launches a white, zero-count token whenever it is idle and no round is
//! out; each idle holder folds in its color and counter, forwards, and
//! whitens itself. A round that returns white with a zero total while rank 0
//! is white and idle proves quiescence, and a red token then tells everyone
//! to stop.
//!
//! `CountHeuristic` stops a process after `P * max(1, interedges)`
//! consecutive idle polls. `CountHeuristicLiteral` stops it once it has
//! received `P * interedges` distance updates. Neither is sound; runs under
//! them are always checked against the oracle.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::transport::{Color, Endpoint, Payload, Rank, TransportError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermMode {
    TokenRing,
    CountHeuristic,
    CountHeuristicLiteral,
}

impl TermMode {
    pub const ALL: [TermMode; 3] =
        [TermMode::TokenRing, TermMode::CountHeuristic, TermMode::CountHeuristicLiteral];

    pub fn as_str(self) -> &'static str {
        match self {
            TermMode::TokenRing => "token_ring",
            TermMode::CountHeuristic => "count_heuristic",
            TermMode::CountHeuristicLiteral => "count_heuristic_literal",
        }
    }
}

impl fmt::Display for TermMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TermMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        TermMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown termination mode {s:?}"))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TermError {
    #[error("rank {0} received a token after the red token")]
    TokenAfterRed(Rank),
    #[error("rank {0} received a second token while holding one")]
    DuplicateToken(Rank),
    #[error(transparent)]
    Transport(#[from] TransportError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TermVerdict {
    pub terminated: bool,
    /// Protocol-backed termination. Heuristic verdicts are never clean.
    pub clean: bool,
}

impl TermVerdict {
    const RUNNING: TermVerdict = TermVerdict { terminated: false, clean: false };
    const CLEAN: TermVerdict = TermVerdict { terminated: true, clean: true };
    const HEURISTIC: TermVerdict = TermVerdict { terminated: true, clean: false };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token {
    pub color: Color,
    pub count: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermState {
    pub mode: TermMode,
    pub color: Color,
    /// Received minus sent distance updates, never reset.
    pub counter: i64,
    pub token: Option<Token>,
    pub red_seen: bool,
    pub idle_polls: u64,
    /// Rank 0 only: a token is circulating.
    pub round_out: bool,
    /// Ring rounds launched (rank 0 only).
    pub rounds: u64,
}

impl TermState {
    pub fn new(mode: TermMode) -> Self {
        TermState {
            mode,
            color: Color::White,
            counter: 0,
            token: None,
            red_seen: false,
            idle_polls: 0,
            round_out: false,
            rounds: 0,
        }
    }

    pub fn on_send(&mut self) {
        self.color = Color::Black;
        self.counter -= 1;
    }

    pub fn on_recv(&mut self) {
        self.color = Color::Black;
        self.counter += 1;
    }

    pub fn on_token(&mut self, rank: Rank, token: Token) -> Result<(), TermError> {
        if self.red_seen {
            return Err(TermError::TokenAfterRed(rank));
        }
        if self.token.replace(token).is_some() {
            return Err(TermError::DuplicateToken(rank));
        }
        Ok(())
    }

    pub fn on_red(&mut self) {
        self.red_seen = true;
    }

    /// Heuristic bookkeeping for one poll: any distance update resets the
    /// idle streak, an empty poll while idle extends it.
    pub fn record_poll(&mut self, got_updates: bool, idle: bool) {
        if got_updates {
            self.idle_polls = 0;
        } else if idle {
            self.idle_polls += 1;
        }
    }

    /// One ring-protocol step for `rank` in a ring of `n_parts`.
    pub fn token_step(
        &mut self,
        ep: &mut dyn Endpoint,
        is_idle: bool,
    ) -> Result<TermVerdict, TermError> {
        let rank = ep.rank();
        let n = ep.n_parts();
        let next = (rank + 1) % n;
        if self.red_seen {
            if next != 0 {
                ep.send(next, Payload::RedToken)?;
            }
            return Ok(TermVerdict::CLEAN);
        }
        if !is_idle {
            return Ok(TermVerdict::RUNNING);
        }
        if n == 1 {
            return Ok(if self.counter == 0 { TermVerdict::CLEAN } else { TermVerdict::RUNNING });
        }
        if rank == 0 {
            if let Some(tok) = self.token.take() {
                self.round_out = false;
                if tok.color == Color::White && self.color == Color::White && tok.count + self.counter == 0 {
                    self.red_seen = true;
                    ep.send(next, Payload::RedToken)?;
                    return Ok(TermVerdict::CLEAN);
                }
            }
            if !self.round_out {
                self.color = Color::White;
                self.round_out = true;
                self.rounds += 1;
                ep.send(next, Payload::Token { color: Color::White, count: 0 })?;
            }
        } else if let Some(tok) = self.token.take() {
            ep.send(next, Payload::Token { color: tok.color.or(self.color), count: tok.count + self.counter })?;
            self.color = Color::White;
        }
        Ok(TermVerdict::RUNNING)
    }

    /// Idle-poll timeout: stop after `n_parts * max(1, n_interedges)`
    /// consecutive idle polls.
    pub fn heuristic_step(&self, n_interedges: usize, n_parts: usize) -> TermVerdict {
        let window = (n_parts * n_interedges.max(1)) as u64;
        if self.idle_polls >= window {
            TermVerdict::HEURISTIC
        } else {
            TermVerdict::RUNNING
        }
    }

    /// Message-count trigger: stop once `msg_count >= n_parts * n_interedges`.
    pub fn literal_step(&self, msg_count: u64, n_interedges: usize, n_parts: usize) -> TermVerdict {
        if msg_count >= (n_parts * n_interedges) as u64 {
            TermVerdict::HEURISTIC
        } else {
            TermVerdict::RUNNING
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transport::Message;
    use std::collections::VecDeque;

    /// Hand-driven ring: sends go into a shared queue the test delivers.
    struct Wire<'a> {
        rank: Rank,
        n: usize,
        out: &'a mut VecDeque<Message>,
    }

    impl Endpoint for Wire<'_> {
        fn rank(&self) -> Rank {
            self.rank
        }
        fn n_parts(&self) -> usize {
            self.n
        }
        fn send(&mut self, dst: Rank, payload: Payload) -> Result<(), TransportError> {
            self.out.push_back(Message { src: self.rank, dst, payload });
            Ok(())
        }
        fn poll(&mut self) -> Vec<Message> {
            Vec::new()
        }
    }

    fn step(ts: &mut TermState, rank: Rank, n: usize, wire: &mut VecDeque<Message>) -> TermVerdict {
        ts.token_step(&mut Wire { rank, n, out: wire }, true).unwrap()
    }

    fn deliver(states: &mut [TermState], wire: &mut VecDeque<Message>) {
        while let Some(m) = wire.pop_front() {
            match m.payload {
                Payload::Token { color, count } => states[m.dst].on_token(m.dst, Token { color, count }).unwrap(),
                Payload::RedToken => states[m.dst].on_red(),
                Payload::DistUpdate { .. } => unreachable!(),
            }
        }
    }

    #[test]
    fn send_and_recv_rules() {
        let mut ts = TermState::new(TermMode::TokenRing);
        ts.on_send();
        assert_eq!((ts.color, ts.counter), (Color::Black, -1));
        ts.counter = -2;
        ts.on_send();
        assert_eq!((ts.color, ts.counter), (Color::Black, -3));
        ts.on_recv();
        assert_eq!(ts.counter, -2);

        let mut ts = TermState::new(TermMode::TokenRing);
        ts.on_recv();
        assert_eq!((ts.color, ts.counter), (Color::Black, 1));
    }

    #[test]
    fn single_process_terminates_at_once() {
        let mut wire = VecDeque::new();
        let mut ts = TermState::new(TermMode::TokenRing);
        assert_eq!(step(&mut ts, 0, 1, &mut wire), TermVerdict::CLEAN);
        assert!(wire.is_empty());
    }

    #[test]
    fn three_ring_with_balanced_counters() {
        let mut wire = VecDeque::new();
        let mut states: Vec<_> = (0..3).map(|_| TermState::new(TermMode::TokenRing)).collect();
        states[0].counter = 2;
        states[1].counter = -1;
        states[2].counter = -1;
        let mut terminated = [false; 3];
        for _ in 0..10 {
            for r in 0..3 {
                if !terminated[r] {
                    terminated[r] = step(&mut states[r], r, 3, &mut wire).terminated;
                }
            }
            deliver(&mut states, &mut wire);
        }
        assert_eq!(terminated, [true; 3]);
        assert_eq!(states[0].rounds, 1);
    }

    #[test]
    fn black_process_forces_another_round() {
        let mut wire = VecDeque::new();
        let mut states: Vec<_> = (0..2).map(|_| TermState::new(TermMode::TokenRing)).collect();
        states[1].color = Color::Black;
        step(&mut states[0], 0, 2, &mut wire);
        deliver(&mut states, &mut wire);
        step(&mut states[1], 1, 2, &mut wire);
        assert_eq!(wire[0].payload, Payload::Token { color: Color::Black, count: 0 });
        assert_eq!(states[1].color, Color::White);
        deliver(&mut states, &mut wire);
        // Round fails, second round launched.
        assert!(!step(&mut states[0], 0, 2, &mut wire).terminated);
        assert_eq!(states[0].rounds, 2);
        deliver(&mut states, &mut wire);
        step(&mut states[1], 1, 2, &mut wire);
        deliver(&mut states, &mut wire);
        assert!(step(&mut states[0], 0, 2, &mut wire).clean);
    }

    #[test]
    fn busy_holder_keeps_token() {
        let mut wire = VecDeque::new();
        let mut ts = TermState::new(TermMode::TokenRing);
        ts.on_token(1, Token { color: Color::White, count: 0 }).unwrap();
        let v = ts.token_step(&mut Wire { rank: 1, n: 3, out: &mut wire }, false).unwrap();
        assert!(!v.terminated);
        assert!(wire.is_empty());
        assert!(ts.token.is_some());
    }

    #[test]
    fn token_after_red_is_protocol_error() {
        let mut ts = TermState::new(TermMode::TokenRing);
        ts.on_red();
        assert_eq!(
            ts.on_token(2, Token { color: Color::White, count: 0 }),
            Err(TermError::TokenAfterRed(2))
        );
    }

    #[test]
    fn last_rank_does_not_return_red_to_initiator() {
        let mut wire = VecDeque::new();
        let mut ts = TermState::new(TermMode::TokenRing);
        ts.on_red();
        assert!(step(&mut ts, 2, 3, &mut wire).clean);
        assert!(wire.is_empty());
        assert!(step(&mut ts, 1, 3, &mut wire).clean);
        assert_eq!(wire[0].dst, 2);
    }

    #[test]
    fn heuristic_threshold_boundary() {
        let mut ts = TermState::new(TermMode::CountHeuristic);
        ts.idle_polls = 40;
        assert_eq!(ts.heuristic_step(10, 4), TermVerdict::HEURISTIC);
        ts.idle_polls = 39;
        assert_eq!(ts.heuristic_step(10, 4), TermVerdict::RUNNING);
        ts.idle_polls = 4;
        assert!(ts.heuristic_step(0, 4).terminated);
        assert!(!ts.heuristic_step(10, 4).clean);
    }

    #[test]
    fn idle_streak_resets_on_update() {
        let mut ts = TermState::new(TermMode::CountHeuristic);
        ts.record_poll(false, true);
        ts.record_poll(false, true);
        ts.record_poll(false, false);
        assert_eq!(ts.idle_polls, 2);
        ts.record_poll(true, true);
        assert_eq!(ts.idle_polls, 0);
    }

    #[test]
    fn literal_trigger() {
        let ts = TermState::new(TermMode::CountHeuristicLiteral);
        assert!(ts.literal_step(8, 2, 4).terminated);
        assert!(!ts.literal_step(7, 2, 4).terminated);
    }

    #[test]
    fn mode_names_round_trip() {
        for m in TermMode::ALL {
            assert_eq!(m.as_str().parse::<TermMode>().unwrap(), m);
        }
        assert!("tokenring".parse::<TermMode>().is_err());
    }
}
