//! Protocol sessions: families, shares, and the primitive operations.

mod config;
mod input;
mod mult;
mod open;
mod session;
pub mod share;
mod validate;

use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

pub use config::{parse_kv, BucketParams, Conversion, DomainClass, Family, ProtocolConfig, TripleSource, Validation};
pub use session::{Counters, Fault, Session};
pub use share::Sh;

use crate::error::{Error, Result};
use crate::transport::{mem_network, tcp_network_local, BandwidthCap, Metrics, NetSnapshot};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Backend {
    #[default]
    Memory,
    Tcp,
}

impl std::str::FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mem" | "memory" => Ok(Backend::Memory),
            "tcp" => Ok(Backend::Tcp),
            _ => Err(Error::Config(format!("unknown backend {s:?}"))),
        }
    }
}

/// How to run a set of parties.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub seed: u64,
    pub cap: BandwidthCap,
    pub backend: Backend,
    /// Wall-clock limit of the whole run.
    pub timeout: Option<Duration>,
    /// Keep a per-message transcript.
    pub record: bool,
    /// Deviations, by party.
    pub faults: Vec<(usize, Fault)>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { seed: 1, cap: BandwidthCap::UNLIMITED, backend: Backend::Memory, timeout: None, record: false, faults: Vec::new() }
    }
}

impl RunOptions {
    pub fn seeded(seed: u64) -> Self {
        RunOptions { seed, ..Default::default() }
    }

    pub fn with_fault(mut self, party: usize, fault: Fault) -> Self {
        self.faults.push((party, fault));
        self
    }
}

/// What every party returned, with the shared traffic counters.
#[derive(Debug)]
pub struct RunResult<T> {
    pub outputs: Vec<T>,
    pub net: NetSnapshot,
    pub counters: Vec<Counters>,
    pub metrics: Arc<Metrics>,
}

fn severity(e: &Error) -> u8 {
    match e {
        Error::Abort(_) | Error::InconsistentBroadcast => 0,
        Error::Timeout => 1,
        Error::Transport(_) => 3,
        _ => 2,
    }
}

/// Runs `body` as every party, one thread each, then the deferred checks.
///
/// Outputs are only returned once every party's checks pass. When parties
/// fail, the most telling error is reported: detected cheating first, then
/// a timeout, then anything else, and lost connections last.
pub fn simulate<T, F>(cfg: &ProtocolConfig, opts: &RunOptions, body: F) -> Result<RunResult<T>>
where
    T: Send,
    F: Fn(&mut Session) -> Result<T> + Sync,
{
    cfg.validate()?;
    let n = cfg.n_parties;
    let (endpoints, metrics) = match opts.backend {
        Backend::Memory => mem_network(n, opts.cap, opts.record)?,
        Backend::Tcp => tcp_network_local(n, opts.cap, opts.record)?,
    };
    let deadline = opts.timeout.map(|t| Instant::now() + t);
    let results: Vec<Result<(T, Counters)>> = thread::scope(|s| {
        let handles: Vec<_> = endpoints
            .into_iter()
            .enumerate()
            .map(|(id, mut ep)| {
                let body = &body;
                let fault = opts.faults.iter().find(|(p, _)| *p == id).map(|&(_, f)| f);
                ep.set_deadline(deadline);
                s.spawn(move || {
                    let mut session = Session::new(cfg.clone(), ep, opts.seed, fault)?;
                    let res = body(&mut session).and_then(|out| session.finish().map(|_| out));
                    if res.is_err() {
                        session.endpoint().close();
                    }
                    res.map(|out| (out, session.counters()))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap_or_else(|_| Err(Error::Abort("party thread panicked".into())))).collect()
    });
    let mut outputs = Vec::with_capacity(n);
    let mut counters = Vec::with_capacity(n);
    let mut worst: Option<Error> = None;
    for r in results {
        match r {
            Ok((o, c)) => {
                outputs.push(o);
                counters.push(c);
            }
            Err(e) => {
                if worst.as_ref().is_none_or(|w| severity(&e) < severity(w)) {
                    worst = Some(e);
                }
            }
        }
    }
    if let Some(e) = worst {
        return Err(e);
    }
    Ok(RunResult { outputs, net: metrics.snapshot(), counters, metrics })
}
