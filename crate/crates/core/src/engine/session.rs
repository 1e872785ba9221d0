use std::collections::BTreeMap;
use std::sync::Arc;

use rand::RngCore;

use super::config::ProtocolConfig;
use super::share::{digest, Sh};
use crate::algebra::{Domain, Polynomial, Prg};
use crate::error::{Error, Result};
use crate::sharing::{split_sum, Scheme};
use crate::transport::{Endpoint, Metrics, MsgKind};

/// Consumption and work counters of one party.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    /// Arithmetic Beaver triples consumed by multiplications.
    pub triples: u64,
    /// Binary triples consumed by AND gates or their verification.
    pub bin_triples: u64,
    /// Secure multiplications over the arithmetic domain.
    pub mults: u64,
    /// Secure AND gates.
    pub ands: u64,
    pub dabits: u64,
    pub edabits: u64,
    pub random_bits: u64,
    /// Elements opened to all parties.
    pub opened: u64,
}

/// Deliberate deviations used to exercise the checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Adds one to this party's share of the `index`-th arithmetic product
    /// computed optimistically.
    CorruptProduct { index: u64 },
    /// Flips this party's share of the `index`-th AND output.
    CorruptAnd { index: u64 },
    /// Adds one to this party's share of `c` in the `index`-th Beaver triple.
    CorruptTriple { index: u64 },
    /// Sends a wrong value in the first opening.
    CorruptOpen,
    /// As input owner, sends a different masked value to one party.
    CorruptInput,
}

/// One party's state for one protocol run.
pub struct Session {
    pub(crate) id: usize,
    pub(crate) n: usize,
    pub(crate) cfg: ProtocolConfig,
    pub(crate) arith: Domain,
    pub(crate) net: Endpoint,
    /// Common stream shared with the simulated trusted dealer.
    pub(crate) dealer: Prg,
    /// Private randomness.
    pub(crate) local: Prg,
    seed: u64,
    prss: BTreeMap<u32, Prg>,
    joint: Option<Prg>,
    /// This party's share of the MAC key.
    pub(crate) alpha: u128,
    /// The global MAC key, only ever read by the dealer simulation.
    dealer_alpha: u128,
    /// Opened values with this party's tag shares, awaiting the MAC check.
    pub(crate) mac_log: Vec<(u128, u128)>,
    /// Optimistic arithmetic products `(x, y, z)` awaiting postprocessing.
    pub(crate) mult_log: Option<(Sh, Sh, Sh)>,
    /// Optimistic AND gates awaiting verification.
    pub(crate) and_log: Option<(Sh, Sh, Sh)>,
    pub(crate) stats: Counters,
    pub(crate) fault: Option<Fault>,
    pub(crate) products_seen: u64,
    pub(crate) ands_seen: u64,
    pub(crate) triples_seen: u64,
    pub(crate) opens_seen: u64,
}

impl std::fmt::Debug for Session {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Session").field("id", &self.id).field("family", &self.cfg.family).finish()
    }
}

impl Session {
    pub fn new(cfg: ProtocolConfig, net: Endpoint, seed: u64, fault: Option<Fault>) -> Result<Self> {
        cfg.validate()?;
        let id = net.id();
        let n = net.parties();
        if n != cfg.n_parties {
            return Err(Error::Config(format!("network has {n} parties, config {}", cfg.n_parties)));
        }
        let arith = cfg.arith_domain()?;
        let key = seed.to_le_bytes();
        let mut dealer = Prg::derive(&key, "dealer");
        let local = Prg::derive(&key, &format!("local/{id}"));
        let (mut alpha, mut dealer_alpha) = (0, 0);
        if cfg.family.uses_macs() {
            let key_domain = match arith {
                Domain::Ring(_) => Domain::Ring(cfg.params.s),
                d => d,
            };
            dealer_alpha = dealer.next(key_domain);
            alpha = split_sum(dealer_alpha, n, arith, &mut dealer)[id];
        }
        Ok(Session {
            id,
            n,
            cfg,
            arith,
            net,
            dealer,
            local,
            seed,
            prss: BTreeMap::new(),
            joint: None,
            alpha,
            dealer_alpha,
            mac_log: Vec::new(),
            mult_log: None,
            and_log: None,
            stats: Counters::default(),
            fault,
            products_seen: 0,
            ands_seen: 0,
            triples_seen: 0,
            opens_seen: 0,
        })
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn parties(&self) -> usize {
        self.n
    }

    pub fn config(&self) -> &ProtocolConfig {
        &self.cfg
    }

    /// Domain of arithmetic shares (possibly MAC- or check-extended).
    pub fn arith(&self) -> Domain {
        self.arith
    }

    /// Bit width of kernel integers.
    pub fn int_bits(&self) -> u32 {
        self.cfg.int_bits()
    }

    pub fn counters(&self) -> Counters {
        self.stats
    }

    pub fn metrics(&self) -> &Arc<Metrics> {
        self.net.metrics()
    }

    pub fn endpoint(&mut self) -> &mut Endpoint {
        &mut self.net
    }

    pub fn scheme(&self, domain: Domain) -> Result<Scheme> {
        let s = if domain == Domain::Binary { self.cfg.family.binary_scheme() } else { self.cfg.family.arith_scheme() };
        s.ok_or_else(|| Error::SchemeMismatch(format!("{} has no sharing over {domain}", self.cfg.family)))
    }

    pub fn components(&self, domain: Domain) -> Result<usize> {
        Ok(match self.scheme(domain)? {
            Scheme::Rep3 => 3,
            Scheme::Rep4 => 4,
            _ => 1,
        })
    }

    /// Summand index this party does not hold, for replicated schemes.
    pub(crate) fn missing(&self, scheme: Scheme) -> Option<usize> {
        match scheme {
            Scheme::Rep3 => Some((self.id + 1) % 3),
            Scheme::Rep4 => Some(self.id),
            _ => None,
        }
    }

    pub(crate) fn has_mac(&self, domain: Domain) -> bool {
        self.cfg.family.uses_macs() && domain == self.arith
    }

    pub(crate) fn is_malicious(&self) -> bool {
        self.cfg.family.is_malicious()
    }

    pub(crate) fn empty(&self, domain: Domain, len: usize) -> Result<Sh> {
        Ok(Sh::zeros(domain, self.components(domain)?, len, self.has_mac(domain)))
    }

    /// Sharing of public values that every party can form locally.
    pub fn constant(&self, domain: Domain, vals: &[u128]) -> Result<Sh> {
        let mut out = self.empty(domain, vals.len())?;
        let vals: Vec<u128> = vals.iter().map(|&v| domain.reduce(v)).collect();
        match self.scheme(domain)? {
            Scheme::Additive | Scheme::Xor => {
                if self.id == 0 {
                    out.parts[0] = vals.clone();
                }
            }
            Scheme::Shamir => out.parts[0] = vals.clone(),
            s @ (Scheme::Rep3 | Scheme::Rep4) => {
                if self.missing(s) != Some(0) {
                    out.parts[0] = vals.clone();
                }
            }
        }
        if let Some(m) = out.mac.as_mut() {
            *m = vals.iter().map(|&v| domain.mul(self.alpha, v)).collect();
        }
        Ok(out)
    }

    pub fn add_public(&self, x: &Sh, vals: &[u128]) -> Result<Sh> {
        Ok(x.add(&self.constant(x.domain, vals)?))
    }

    pub fn add_scalar(&self, x: &Sh, c: u128) -> Result<Sh> {
        self.add_public(x, &vec![c; x.len()])
    }

    /// `c - x` for a public vector `c`.
    pub fn public_sub(&self, vals: &[u128], x: &Sh) -> Result<Sh> {
        Ok(self.constant(x.domain, vals)?.sub(x))
    }

    /// This party's share of a fresh sharing of values known to the dealer.
    ///
    /// Every party runs the same dealer computation and keeps only its own
    /// piece, so all parties must request dealer material in the same order.
    pub(crate) fn deal(&mut self, domain: Domain, vals: &[u128]) -> Result<Sh> {
        let scheme = self.scheme(domain)?;
        let mut out = self.empty(domain, vals.len())?;
        let n = self.n;
        for (e, &v) in vals.iter().enumerate() {
            let v = domain.reduce(v);
            match scheme {
                Scheme::Additive | Scheme::Xor => {
                    out.parts[0][e] = split_sum(v, n, domain, &mut self.dealer)[self.id];
                }
                Scheme::Rep3 | Scheme::Rep4 => {
                    let k = if scheme == Scheme::Rep3 { 3 } else { 4 };
                    let buf = split_sum(v, k, domain, &mut self.dealer);
                    let miss = self.missing(scheme).unwrap();
                    for (j, part) in out.parts.iter_mut().enumerate() {
                        part[e] = if j == miss { 0 } else { buf[j] };
                    }
                }
                Scheme::Shamir => {
                    let f = Polynomial::random_with_constant(v, self.cfg.threshold, domain, &mut self.dealer);
                    out.parts[0][e] = f.eval(self.id as u128 + 1);
                }
            }
            if let Some(m) = out.mac.as_mut() {
                let tag = domain.mul(self.dealer_alpha, v);
                m[e] = split_sum(tag, n, domain, &mut self.dealer)[self.id];
            }
        }
        Ok(out)
    }

    /// Dealer sharing of fresh uniform values.
    pub(crate) fn deal_random(&mut self, domain: Domain, len: usize) -> Result<(Sh, Vec<u128>)> {
        let vals = self.dealer.fill(domain, len);
        Ok((self.deal(domain, &vals)?, vals))
    }

    /// Dealer sharing of uniform bits in `domain`.
    pub(crate) fn deal_bits(&mut self, domain: Domain, len: usize) -> Result<Sh> {
        let vals = self.dealer.fill(Domain::Binary, len);
        self.stats.random_bits += len as u64;
        self.deal(domain, &vals)
    }

    /// Stream keyed by a subset of parties; only members may use it.
    pub(crate) fn prss_stream(&mut self, mask: u32) -> &mut Prg {
        debug_assert!(mask & (1 << self.id) != 0, "party {} not in subset {mask:b}", self.id);
        let seed = self.seed;
        self.prss.entry(mask).or_insert_with(|| Prg::derive(&seed.to_le_bytes(), &format!("prss/{mask}")))
    }

    /// Key mask of replicated summand `j`: held by everyone except the party
    /// missing it.
    pub(crate) fn summand_mask(&self, scheme: Scheme, j: usize) -> u32 {
        match scheme {
            Scheme::Rep3 => (1 << j) | (1 << ((j + 1) % 3)),
            Scheme::Rep4 => 0b1111 & !(1 << j),
            _ => unreachable!("summand keys only exist for replicated schemes"),
        }
    }

    pub(crate) fn pair_mask(a: usize, b: usize) -> u32 {
        (1 << a) | (1 << b)
    }

    /// Uniformly random sharing of an unknown value.
    pub fn random(&mut self, domain: Domain, len: usize) -> Result<Sh> {
        let scheme = self.scheme(domain)?;
        if self.has_mac(domain) {
            return Ok(self.deal_random(domain, len)?.0);
        }
        let mut out = self.empty(domain, len)?;
        match scheme {
            Scheme::Additive | Scheme::Xor => out.parts[0] = self.local.fill(domain, len),
            Scheme::Rep3 | Scheme::Rep4 => {
                let miss = self.missing(scheme).unwrap();
                for j in 0..out.parts.len() {
                    if j != miss {
                        let mask = self.summand_mask(scheme, j);
                        out.parts[j] = self.prss_stream(mask).fill(domain, len);
                    }
                }
            }
            Scheme::Shamir => {
                let coeffs = self.shamir_prss_coeffs(domain)?;
                for (mask, c) in coeffs {
                    let r = self.prss_stream(mask).fill(domain, len);
                    for (o, v) in out.parts[0].iter_mut().zip(r) {
                        *o = domain.add(*o, domain.mul(c, v));
                    }
                }
            }
        }
        Ok(out)
    }

    /// For each subset `T` of size `n - t` containing this party, the value
    /// at our point of the degree-`t` polynomial that is 1 at zero and
    /// vanishes outside `T`.
    fn shamir_prss_coeffs(&self, domain: Domain) -> Result<Vec<(u32, u128)>> {
        let (n, t) = (self.n, self.cfg.threshold);
        let me = self.id as u128 + 1;
        let mut out = Vec::new();
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != n - t || mask & (1 << self.id) == 0 {
                continue;
            }
            let mut c = 1u128;
            for j in 0..n {
                if mask & (1 << j) == 0 {
                    let zj = j as u128 + 1;
                    c = domain.mul(c, domain.mul(domain.sub(me, zj), domain.inv(domain.neg(zj))?));
                }
            }
            out.push((mask, c));
        }
        Ok(out)
    }

    /// Additive sharing of zero for the replicated multiplication.
    pub(crate) fn rep3_zero(&mut self, domain: Domain, len: usize) -> Vec<u128> {
        let i = self.id;
        let next = Self::pair_mask(i, (i + 1) % 3);
        let prev = Self::pair_mask((i + 2) % 3, i);
        let a = self.prss_stream(next).fill(domain, len);
        let b = self.prss_stream(prev).fill(domain, len);
        a.iter().zip(&b).map(|(&x, &y)| domain.sub(x, y)).collect()
    }

    /// Coins known to all parties, seeded by a commit-reveal round on first
    /// use.
    pub fn joint(&mut self) -> Result<&mut Prg> {
        if self.joint.is_none() {
            let mut mine = [0u8; 32];
            self.local.fill_bytes(&mut mine);
            let commits = self.net.broadcast(MsgKind::Commit, digest(&mine))?;
            let reveals = self.net.broadcast(MsgKind::Reveal, mine.to_vec())?;
            let mut all = Vec::with_capacity(32 * self.n);
            for (c, r) in commits.iter().zip(&reveals) {
                if digest(r) != *c {
                    return Err(Error::Abort("coin commitment does not open".into()));
                }
                all.extend_from_slice(r);
            }
            self.joint = Some(Prg::new(&all));
        }
        Ok(self.joint.as_mut().unwrap())
    }

    pub(crate) fn log_product(&mut self, x: &Sh, y: &Sh, z: &Sh) {
        match self.mult_log.as_mut() {
            None => self.mult_log = Some((x.clone(), y.clone(), z.clone())),
            Some((a, b, c)) => {
                a.append(x);
                b.append(y);
                c.append(z);
            }
        }
    }

    pub(crate) fn log_and(&mut self, x: &Sh, y: &Sh, z: &Sh) {
        match self.and_log.as_mut() {
            None => self.and_log = Some((x.clone(), y.clone(), z.clone())),
            Some((a, b, c)) => {
                a.append(x);
                b.append(y);
                c.append(z);
            }
        }
    }
}
