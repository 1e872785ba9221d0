use rand::RngCore;

use super::ot::ot_cross_product;
use super::Triples;
use crate::algebra::Domain;
use crate::engine::{Fault, Family, Session, Sh, TripleSource, Validation};
use crate::error::{Error, Result};
use crate::sharing::{share_additive, Scheme, Share};

/// Every party's additive shares of one dealer triple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BeaverTriple {
    pub a: Vec<Share>,
    pub b: Vec<Share>,
    pub c: Vec<Share>,
}

/// Trusted-dealer triples outside any session.
pub fn deal_triples<R: RngCore + ?Sized>(n: usize, count: usize, domain: Domain, rng: &mut R) -> Result<Vec<BeaverTriple>> {
    (0..count)
        .map(|_| {
            let a = domain.sample(rng);
            let b = domain.sample(rng);
            Ok(BeaverTriple {
                a: share_additive(a, n, domain, rng)?,
                b: share_additive(b, n, domain, rng)?,
                c: share_additive(domain.mul(a, b), n, domain, rng)?,
            })
        })
        .collect()
}

/// Triples from the session's simulated dealer, in the family's sharing.
pub fn gen_triples_dealer(s: &mut Session, domain: Domain, count: usize) -> Result<Triples> {
    let (a, av) = s.deal_random(domain, count)?;
    let (b, bv) = s.deal_random(domain, count)?;
    let cv: Vec<u128> = av.iter().zip(&bv).map(|(&x, &y)| domain.mul(x, y)).collect();
    let c = s.deal(domain, &cv)?;
    Ok(Triples { a, b, c })
}

/// Triples from pairwise oblivious transfers between additive share holders.
pub fn gen_triples_ot(s: &mut Session, domain: Domain, count: usize) -> Result<Triples> {
    let a = s.local_fill(domain, count);
    let b = s.local_fill(domain, count);
    let c = ot_cross_product(s, domain, &a, &b)?;
    s.authenticate_local(domain, vec![a, b, c]).map(|mut v| {
        let c = v.pop().unwrap();
        let b = v.pop().unwrap();
        let a = v.pop().unwrap();
        Triples { a, b, c }
    })
}

impl Session {
    pub(crate) fn local_fill(&mut self, domain: Domain, len: usize) -> Vec<u128> {
        self.local.fill(domain, len)
    }

    /// Wraps additive share vectors as sharings, adding tags through
    /// oblivious transfer when the domain is authenticated.
    pub(crate) fn authenticate_local(&mut self, domain: Domain, vals: Vec<Vec<u128>>) -> Result<Vec<Sh>> {
        if self.scheme(domain)? != Scheme::Additive && self.scheme(domain)? != Scheme::Xor {
            return Err(Error::SchemeMismatch(format!("oblivious transfer triples need additive sharing, not {}", self.config().family)));
        }
        let mac = self.has_mac(domain);
        let mut out = Vec::with_capacity(vals.len());
        for v in vals {
            let tags = if mac {
                let key = vec![self.alpha; v.len()];
                Some(ot_cross_product(self, domain, &v, &key)?)
            } else {
                None
            };
            out.push(Sh { domain, parts: vec![v], mac: tags });
        }
        Ok(out)
    }

    /// Adds one to a held component of element `e`.
    pub(crate) fn bump(&self, sh: &mut Sh, e: usize) {
        let comp = match self.scheme(sh.domain).ok().and_then(|s| self.missing(s)) {
            Some(0) => 1,
            _ => 0,
        };
        sh.parts[comp][e] = sh.domain.add(sh.parts[comp][e], 1);
    }

    pub(crate) fn triple_fault(&mut self, t: &mut Sh) {
        let start = self.triples_seen;
        self.triples_seen += t.len() as u64;
        if let Some(Fault::CorruptTriple { index }) = self.fault {
            if index >= start && index < self.triples_seen {
                self.bump(t, (index - start) as usize);
            }
        }
    }

    /// Unvalidated triples from the configured source.
    pub(crate) fn raw_triples(&mut self, domain: Domain, len: usize) -> Result<Triples> {
        let mut t = match self.config().triple_source {
            TripleSource::Dealer => gen_triples_dealer(self, domain, len)?,
            TripleSource::Ot => gen_triples_ot(self, domain, len)?,
        };
        self.triple_fault(&mut t.c);
        Ok(t)
    }

    /// Triples `(a, b, c)` together with `(a', c')` where `c' = a' * b`.
    pub(crate) fn raw_extended(&mut self, domain: Domain, len: usize) -> Result<(Triples, Sh, Sh)> {
        let (mut t, a2, c2) = match self.config().triple_source {
            TripleSource::Dealer => {
                let (a, av) = self.deal_random(domain, len)?;
                let (b, bv) = self.deal_random(domain, len)?;
                let (a2, a2v) = self.deal_random(domain, len)?;
                let cv: Vec<u128> = av.iter().zip(&bv).map(|(&x, &y)| domain.mul(x, y)).collect();
                let c2v: Vec<u128> = a2v.iter().zip(&bv).map(|(&x, &y)| domain.mul(x, y)).collect();
                let c = self.deal(domain, &cv)?;
                let c2 = self.deal(domain, &c2v)?;
                (Triples { a, b, c }, a2, c2)
            }
            TripleSource::Ot => {
                let a = self.local_fill(domain, len);
                let a2 = self.local_fill(domain, len);
                let b = self.local_fill(domain, len);
                let both: Vec<u128> = a.iter().chain(&a2).copied().collect();
                let bb: Vec<u128> = b.iter().chain(&b).copied().collect();
                let cc = ot_cross_product(self, domain, &both, &bb)?;
                let (c, c2) = (cc[..len].to_vec(), cc[len..].to_vec());
                let mut v = self.authenticate_local(domain, vec![a, b, c, a2, c2])?;
                let c2 = v.pop().unwrap();
                let a2 = v.pop().unwrap();
                let c = v.pop().unwrap();
                let b = v.pop().unwrap();
                let a = v.pop().unwrap();
                (Triples { a, b, c }, a2, c2)
            }
        };
        self.triple_fault(&mut t.c);
        Ok((t, a2, c2))
    }

    /// Validated triples for `len` Beaver multiplications.
    pub(crate) fn beaver_triples(&mut self, domain: Domain, len: usize) -> Result<Triples> {
        if domain == Domain::Binary {
            self.stats.bin_triples += len as u64;
            return self.raw_triples(domain, len);
        }
        self.stats.triples += len as u64;
        match (self.config().family, self.config().validation) {
            (Family::SpdzField, Validation::Sacrifice) => {
                let t = self.raw_triples(domain, 2 * len)?;
                let (target, aux) = (t.slice(0..len), t.slice(len..2 * len));
                super::checks::pairwise_sacrifice_check(self, &target, &aux)?;
                Ok(target)
            }
            (Family::Spdz2k, Validation::RingCheck) => {
                let (t, a2, c2) = self.raw_extended(domain, len)?;
                let ok = super::checks::ring_check_verdicts(self, &t.a, &t.b, &t.c, &a2, &c2)?;
                if ok.iter().any(|v| !v) {
                    return Err(Error::Abort("triple failed the ring check".into()));
                }
                Ok(t)
            }
            _ => self.raw_triples(domain, len),
        }
    }
}
