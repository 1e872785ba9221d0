//! Party-to-party messaging with byte and round accounting.
//!
//! Every message is a frame: a 4-byte big-endian payload length, a 1-byte
//! message kind and the payload. Counters always charge the framed size, so
//! the in-memory and TCP backends report identical figures for the same
//! transcript.

mod mem;
mod tcp;

pub use mem::mem_network;
pub use tcp::{tcp_endpoint, tcp_network_local};

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::mpsc::{Receiver, RecvTimeoutError};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use crate::error::{Error, Result};

/// Length prefix plus kind byte.
pub const FRAME_HEADER: usize = 5;

/// Message kinds on the wire.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum MsgKind {
    Data = 1,
    Hash = 2,
    Commit = 3,
    Reveal = 4,
    Ot = 5,
    Control = 6,
}

impl MsgKind {
    pub fn from_byte(b: u8) -> Result<Self> {
        Ok(match b {
            1 => MsgKind::Data,
            2 => MsgKind::Hash,
            3 => MsgKind::Commit,
            4 => MsgKind::Reveal,
            5 => MsgKind::Ot,
            6 => MsgKind::Control,
            _ => return Err(Error::Decode(format!("unknown message kind {b}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub kind: MsgKind,
    pub payload: Vec<u8>,
}

impl Frame {
    pub fn framed_len(&self) -> usize {
        FRAME_HEADER + self.payload.len()
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.framed_len());
        out.extend_from_slice(&(self.payload.len() as u32).to_be_bytes());
        out.push(self.kind as u8);
        out.extend_from_slice(&self.payload);
        out
    }
}

/// One sent frame as seen by the sender.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TranscriptEntry {
    pub round: u64,
    pub to: usize,
    pub kind: u8,
    pub len: usize,
}

/// Shared counters for one network of `n` parties.
#[derive(Debug)]
pub struct Metrics {
    n: usize,
    bytes: Vec<AtomicU64>,
    frames: Vec<AtomicU64>,
    rounds: Vec<AtomicU64>,
    transcripts: Option<Vec<Mutex<Vec<TranscriptEntry>>>>,
    started: Instant,
}

impl Metrics {
    pub fn new(n: usize, record: bool) -> Self {
        Self {
            n,
            bytes: (0..n * n).map(|_| AtomicU64::new(0)).collect(),
            frames: (0..n * n).map(|_| AtomicU64::new(0)).collect(),
            rounds: (0..n).map(|_| AtomicU64::new(0)).collect(),
            transcripts: record.then(|| (0..n).map(|_| Mutex::new(Vec::new())).collect()),
            started: Instant::now(),
        }
    }

    pub fn parties(&self) -> usize {
        self.n
    }

    fn charge(&self, from: usize, to: usize, frame: &Frame, round: u64) {
        let idx = from * self.n + to;
        self.bytes[idx].fetch_add(frame.framed_len() as u64, Ordering::Relaxed);
        self.frames[idx].fetch_add(1, Ordering::Relaxed);
        if let Some(t) = &self.transcripts {
            t[from].lock().expect("transcript lock").push(TranscriptEntry {
                round,
                to,
                kind: frame.kind as u8,
                len: frame.framed_len(),
            });
        }
    }

    pub fn bytes_between(&self, from: usize, to: usize) -> u64 {
        self.bytes[from * self.n + to].load(Ordering::Relaxed)
    }

    pub fn frames_between(&self, from: usize, to: usize) -> u64 {
        self.frames[from * self.n + to].load(Ordering::Relaxed)
    }

    pub fn sent_by(&self, party: usize) -> u64 {
        (0..self.n).map(|to| self.bytes_between(party, to)).sum()
    }

    /// Sum over all ordered pairs.
    pub fn global_bytes(&self) -> u64 {
        self.bytes.iter().map(|b| b.load(Ordering::Relaxed)).sum()
    }

    pub fn rounds_of(&self, party: usize) -> u64 {
        self.rounds[party].load(Ordering::Relaxed)
    }

    /// Rounds of the slowest party.
    pub fn rounds(&self) -> u64 {
        (0..self.n).map(|p| self.rounds_of(p)).max().unwrap_or(0)
    }

    pub fn transcript(&self, party: usize) -> Option<Vec<TranscriptEntry>> {
        self.transcripts.as_ref().map(|t| t[party].lock().expect("transcript lock").clone())
    }

    pub fn elapsed(&self) -> Duration {
        self.started.elapsed()
    }

    pub fn snapshot(&self) -> NetSnapshot {
        NetSnapshot {
            bytes: (0..self.n).map(|f| (0..self.n).map(|t| self.bytes_between(f, t)).collect()).collect(),
            rounds: (0..self.n).map(|p| self.rounds_of(p)).collect(),
            wall_clock: self.elapsed(),
        }
    }
}

/// Plain copy of the counters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetSnapshot {
    /// `bytes[from][to]`.
    pub bytes: Vec<Vec<u64>>,
    pub rounds: Vec<u64>,
    pub wall_clock: Duration,
}

impl NetSnapshot {
    pub fn global_bytes(&self) -> u64 {
        self.bytes.iter().flatten().sum()
    }

    pub fn rounds(&self) -> u64 {
        self.rounds.iter().copied().max().unwrap_or(0)
    }
}

/// Outgoing link capacity of one party.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BandwidthCap {
    /// Bits per second; `None` is unlimited.
    pub rate_bps: Option<u64>,
    /// Bucket depth in bytes.
    pub burst: usize,
}

pub const DEFAULT_BURST: usize = 64 * 1024;

impl BandwidthCap {
    pub const UNLIMITED: BandwidthCap = BandwidthCap { rate_bps: None, burst: DEFAULT_BURST };

    pub fn gbps(g: u64) -> Self {
        BandwidthCap { rate_bps: Some(g * 1_000_000_000), burst: DEFAULT_BURST }
    }

    pub fn with_burst(mut self, burst: usize) -> Result<Self> {
        self.burst = burst;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.burst < FRAME_HEADER {
            return Err(Error::Config(format!("burst of {} bytes cannot hold a single frame", self.burst)));
        }
        if self.rate_bps == Some(0) {
            return Err(Error::Config("bandwidth cap of zero".into()));
        }
        Ok(())
    }

    /// Parses `unlimited`, `1g`, `5g`, `10g`, `20g` or a custom rate with a
    /// `k`, `m` or `g` suffix (bits per second).
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if s == "unlimited" || s == "none" {
            return Ok(Self::UNLIMITED);
        }
        let s = s.strip_suffix("bps").unwrap_or(&s);
        let (num, mult) = match s.chars().last() {
            Some('k') => (&s[..s.len() - 1], 1_000u64),
            Some('m') => (&s[..s.len() - 1], 1_000_000),
            Some('g') => (&s[..s.len() - 1], 1_000_000_000),
            _ => (s, 1),
        };
        let v: f64 = num.parse().map_err(|_| Error::Config(format!("bad bandwidth {s:?}")))?;
        let cap = BandwidthCap { rate_bps: Some((v * mult as f64) as u64), burst: DEFAULT_BURST };
        cap.validate()?;
        Ok(cap)
    }

    pub fn label(&self) -> String {
        match self.rate_bps {
            None => "unlimited".into(),
            Some(r) if r % 1_000_000_000 == 0 => format!("{}g", r / 1_000_000_000),
            Some(r) if r % 1_000_000 == 0 => format!("{}m", r / 1_000_000),
            Some(r) => format!("{r}"),
        }
    }
}

/// Token bucket; a frame larger than the bucket is admitted on credit and
/// the sender waits off the deficit.
#[derive(Debug)]
struct TokenBucket {
    rate: f64,
    burst: f64,
    tokens: f64,
    last: Instant,
}

impl TokenBucket {
    fn new(cap: BandwidthCap) -> Option<Self> {
        cap.rate_bps.map(|bps| TokenBucket {
            rate: bps as f64 / 8.0,
            burst: cap.burst as f64,
            tokens: cap.burst as f64,
            last: Instant::now(),
        })
    }

    fn consume(&mut self, bytes: usize) {
        let now = Instant::now();
        self.tokens = (self.tokens + now.duration_since(self.last).as_secs_f64() * self.rate).min(self.burst);
        self.last = now;
        self.tokens -= bytes as f64;
        if self.tokens < 0.0 {
            std::thread::sleep(Duration::from_secs_f64(-self.tokens / self.rate));
        }
    }
}

/// Destination of frames to one peer.
pub(crate) trait FrameSink: Send {
    fn deliver(&mut self, frame: Frame) -> Result<()>;
}

/// Default wait for a single message when no deadline is set.
pub const DEFAULT_RECV_TIMEOUT: Duration = Duration::from_secs(600);

/// One party's view of the network.
pub struct Endpoint {
    id: usize,
    n: usize,
    out: Vec<Option<Box<dyn FrameSink>>>,
    inc: Vec<Option<Receiver<Frame>>>,
    metrics: Arc<Metrics>,
    bucket: Option<TokenBucket>,
    deadline: Option<Instant>,
    round: u64,
}

impl std::fmt::Debug for Endpoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Endpoint").field("id", &self.id).field("n", &self.n).field("round", &self.round).finish()
    }
}

impl Endpoint {
    pub(crate) fn new(
        id: usize,
        n: usize,
        out: Vec<Option<Box<dyn FrameSink>>>,
        inc: Vec<Option<Receiver<Frame>>>,
        metrics: Arc<Metrics>,
        cap: BandwidthCap,
    ) -> Result<Self> {
        cap.validate()?;
        Ok(Self { id, n, out, inc, metrics, bucket: TokenBucket::new(cap), deadline: None, round: 0 })
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn parties(&self) -> usize {
        self.n
    }

    pub fn metrics(&self) -> &Arc<Metrics> {
        &self.metrics
    }

    pub fn set_deadline(&mut self, deadline: Option<Instant>) {
        self.deadline = deadline;
    }

    fn check_deadline(&self) -> Result<()> {
        match self.deadline {
            Some(d) if Instant::now() >= d => Err(Error::Timeout),
            _ => Ok(()),
        }
    }

    /// Marks a synchronization barrier.
    pub fn next_round(&mut self) {
        self.round += 1;
        self.metrics.rounds[self.id].store(self.round, Ordering::Relaxed);
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn send(&mut self, to: usize, kind: MsgKind, payload: Vec<u8>) -> Result<()> {
        self.check_deadline()?;
        let frame = Frame { kind, payload };
        if frame.payload.len() > u32::MAX as usize {
            return Err(Error::Transport("payload exceeds frame limit".into()));
        }
        if let Some(b) = &mut self.bucket {
            b.consume(frame.framed_len());
        }
        self.metrics.charge(self.id, to, &frame, self.round);
        let sink = self
            .out
            .get_mut(to)
            .and_then(Option::as_mut)
            .ok_or_else(|| Error::Transport(format!("no channel from {} to {to}", self.id)))?;
        sink.deliver(frame)
    }

    pub fn recv(&mut self, from: usize) -> Result<Frame> {
        let rx = self
            .inc
            .get(from)
            .and_then(Option::as_ref)
            .ok_or_else(|| Error::Transport(format!("no channel from {from} to {}", self.id)))?;
        let wait = match self.deadline {
            Some(d) => d.saturating_duration_since(Instant::now()),
            None => DEFAULT_RECV_TIMEOUT,
        };
        match rx.recv_timeout(wait) {
            Ok(f) => Ok(f),
            Err(RecvTimeoutError::Timeout) => Err(Error::Timeout),
            Err(RecvTimeoutError::Disconnected) => {
                Err(Error::Transport(format!("channel from {from} to {} closed", self.id)))
            }
        }
    }

    /// Receives and insists on `kind`.
    pub fn recv_kind(&mut self, from: usize, kind: MsgKind) -> Result<Vec<u8>> {
        let f = self.recv(from)?;
        if f.kind != kind {
            return Err(Error::Transport(format!("expected {kind:?} from {from}, got {:?}", f.kind)));
        }
        Ok(f.payload)
    }

    /// Sends `payload` to every other party and collects theirs; one round.
    /// The result is indexed by party and includes our own payload.
    pub fn broadcast(&mut self, kind: MsgKind, payload: Vec<u8>) -> Result<Vec<Vec<u8>>> {
        self.next_round();
        for to in 0..self.n {
            if to != self.id {
                self.send(to, kind, payload.clone())?;
            }
        }
        let mut out = vec![Vec::new(); self.n];
        for (from, slot) in out.iter_mut().enumerate() {
            *slot = if from == self.id { payload.clone() } else { self.recv_kind(from, kind)? };
        }
        Ok(out)
    }

    /// Drops every outgoing channel so peers blocked on us fail fast.
    pub fn close(&mut self) {
        self.out.iter_mut().for_each(|o| *o = None);
    }
}
