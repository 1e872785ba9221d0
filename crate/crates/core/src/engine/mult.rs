use super::session::{Fault, Session};
use super::share::{decode, digest_vals, encode, Sh};
use crate::algebra::{lagrange_coefficients, Domain, Polynomial};
use crate::error::{Error, Result};
use crate::preprocessing::Triples;
use crate::sharing::Scheme;
use crate::transport::MsgKind;

/// Cross-term pairs of the four-party product; the first index receives.
const REP4_PAIRS: [(usize, usize); 6] = [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)];

impl Session {
    /// Offset inside a batch of `len` products where the armed fault hits.
    fn product_fault(&mut self, binary: bool, len: usize) -> Option<usize> {
        let seen = if binary { &mut self.ands_seen } else { &mut self.products_seen };
        let start = *seen;
        *seen += len as u64;
        match self.fault {
            Some(Fault::CorruptAnd { index }) if binary && index >= start && index < start + len as u64 => {
                Some((index - start) as usize)
            }
            Some(Fault::CorruptProduct { index }) if !binary && index >= start && index < start + len as u64 => {
                Some((index - start) as usize)
            }
            _ => None,
        }
    }

    /// Elementwise product of two sharings.
    pub fn mul(&mut self, x: &Sh, y: &Sh) -> Result<Sh> {
        self.mul_inner(x, y, true)
    }

    /// Product that is not recorded for postprocessing; used by the checks
    /// themselves and by preprocessing.
    pub(crate) fn mul_nolog(&mut self, x: &Sh, y: &Sh) -> Result<Sh> {
        self.mul_inner(x, y, false)
    }

    fn mul_inner(&mut self, x: &Sh, y: &Sh, log: bool) -> Result<Sh> {
        if x.domain != y.domain || x.len() != y.len() {
            return Err(Error::DomainMismatch(format!("multiplying {} by {}", x.domain, y.domain)));
        }
        let d = x.domain;
        let len = x.len();
        let binary = d == Domain::Binary;
        if binary {
            self.stats.ands += len as u64;
        } else {
            self.stats.mults += len as u64;
        }
        if len == 0 {
            return Ok(x.clone());
        }
        let fault = self.product_fault(binary, len);
        let z = match self.scheme(d)? {
            Scheme::Additive | Scheme::Xor => self.mul_beaver(x, y, fault)?,
            Scheme::Rep3 => self.mul_rep3(x, y, fault)?,
            Scheme::Shamir => self.mul_shamir(x, y, fault)?,
            Scheme::Rep4 => self.mul_rep4(x, y, fault)?,
        };
        if log && self.is_malicious() && !self.cfg.family.uses_macs() && !matches!(self.scheme(d)?, Scheme::Rep4) {
            if binary {
                self.log_and(x, y, &z);
                if self.and_log.as_ref().is_some_and(|l| l.0.len() >= super::validate::AND_FLUSH) {
                    self.verify_ands()?;
                }
            } else {
                self.log_product(x, y, &z);
            }
        }
        Ok(z)
    }

    /// Bitwise AND; the same as [`Session::mul`] on binary sharings.
    pub fn and(&mut self, x: &Sh, y: &Sh) -> Result<Sh> {
        debug_assert_eq!(x.domain, Domain::Binary);
        self.mul(x, y)
    }

    fn mul_beaver(&mut self, x: &Sh, y: &Sh, fault: Option<usize>) -> Result<Sh> {
        let t = self.beaver_triples(x.domain, x.len())?;
        let mut z = self.beaver_multiply(x, y, &t)?;
        if let Some(e) = fault {
            z.parts[0][e] = z.domain.add(z.parts[0][e], 1);
        }
        Ok(z)
    }

    /// One Beaver multiplication batch with a given triple: opens
    /// `eps = x + a` and `delta = y + b` together and returns
    /// `eps * [y] - delta * [a] + [c]`.
    pub fn beaver_multiply(&mut self, x: &Sh, y: &Sh, triple: &Triples) -> Result<Sh> {
        let Triples { a, b, c } = triple;
        let len = x.len();
        if a.len() != len || b.len() != len || c.len() != len || y.len() != len {
            return Err(Error::InsufficientRandomness(format!("need {len} triples")));
        }
        let masked = Sh::concat(&[&x.add(a), &y.add(b)]);
        let opened = self.open(&masked)?;
        let (eps, delta) = opened.split_at(len);
        Ok(y.scale_each(eps).sub(&a.scale_each(delta)).add(c))
    }

    fn mul_rep3(&mut self, x: &Sh, y: &Sh, fault: Option<usize>) -> Result<Sh> {
        let d = x.domain;
        let len = x.len();
        let i = self.id;
        let p = (i + 2) % 3;
        let alpha = self.rep3_zero(d, len);
        let mut t: Vec<u128> = (0..len)
            .map(|e| {
                let (xi, xp, yi, yp) = (x.parts[i][e], x.parts[p][e], y.parts[i][e], y.parts[p][e]);
                let s = d.add(d.add(d.mul(xi, yi), d.mul(xi, yp)), d.mul(xp, yi));
                d.add(s, alpha[e])
            })
            .collect();
        if let Some(e) = fault {
            t[e] = d.add(t[e], 1);
        }
        self.net.next_round();
        self.net.send((i + 1) % 3, MsgKind::Data, encode(d, &t))?;
        let got = decode(d, &self.net.recv_kind(p, MsgKind::Data)?, len)?;
        let mut z = Sh::zeros(d, 3, len, false);
        z.parts[i] = t;
        z.parts[p] = got;
        Ok(z)
    }

    fn mul_shamir(&mut self, x: &Sh, y: &Sh, fault: Option<usize>) -> Result<Sh> {
        let d = x.domain;
        let len = x.len();
        let (i, n, t) = (self.id, self.n, self.cfg.threshold);
        let mut local: Vec<u128> = x.parts[0].iter().zip(&y.parts[0]).map(|(&a, &b)| d.mul(a, b)).collect();
        if let Some(e) = fault {
            local[e] = d.add(local[e], 1);
        }
        let mut outgoing = vec![Vec::with_capacity(len); n];
        for &v in &local {
            let f = Polynomial::random_with_constant(v, t, d, &mut self.local);
            for (j, o) in outgoing.iter_mut().enumerate() {
                o.push(f.eval(j as u128 + 1));
            }
        }
        self.net.next_round();
        for (j, o) in outgoing.iter().enumerate() {
            if j != i {
                self.net.send(j, MsgKind::Data, encode(d, o))?;
            }
        }
        let xs: Vec<u128> = (1..=n as u128).collect();
        let w = lagrange_coefficients(&xs, 0, d)?;
        let mut z = vec![0u128; len];
        for j in 0..n {
            let sub = if j == i { std::mem::take(&mut outgoing[i]) } else { decode(d, &self.net.recv_kind(j, MsgKind::Data)?, len)? };
            for (o, v) in z.iter_mut().zip(sub) {
                *o = d.add(*o, d.mul(w[j], v));
            }
        }
        Ok(Sh { domain: d, parts: vec![z], mac: None })
    }

    fn mul_rep4(&mut self, x: &Sh, y: &Sh, fault: Option<usize>) -> Result<Sh> {
        let d = x.domain;
        let len = x.len();
        let i = self.id;
        let mut z = Sh::zeros(d, 4, len, false);
        for g in (0..4).filter(|&g| g != i) {
            for e in 0..len {
                z.parts[g][e] = d.mul(x.parts[g][e], y.parts[g][e]);
            }
        }
        let mut incoming = Vec::new();
        self.net.next_round();
        for (g, h) in REP4_PAIRS {
            let knowers: Vec<usize> = (0..4).filter(|&p| p != g && p != h).collect();
            let r = if i != g { self.prss_stream(0b1111 & !(1 << g)).fill(d, len) } else { Vec::new() };
            if i != g {
                for e in 0..len {
                    z.parts[g][e] = d.add(z.parts[g][e], r[e]);
                }
            }
            if knowers.contains(&i) {
                let mut rest: Vec<u128> = (0..len)
                    .map(|e| {
                        let v = d.add(d.mul(x.parts[g][e], y.parts[h][e]), d.mul(x.parts[h][e], y.parts[g][e]));
                        d.sub(v, r[e])
                    })
                    .collect();
                for e in 0..len {
                    z.parts[h][e] = d.add(z.parts[h][e], rest[e]);
                }
                if i == knowers[0] {
                    if let Some(e) = fault {
                        rest[e] = d.add(rest[e], 1);
                    }
                    self.net.send(g, MsgKind::Data, encode(d, &rest))?;
                } else {
                    self.net.send(g, MsgKind::Hash, digest_vals(d, &rest))?;
                }
            } else if i == g {
                incoming.push((h, knowers[0], knowers[1]));
            }
        }
        for (h, a, b) in incoming {
            let rest = decode(d, &self.net.recv_kind(a, MsgKind::Data)?, len)?;
            if self.net.recv_kind(b, MsgKind::Hash)? != digest_vals(d, &rest) {
                return Err(Error::Abort(format!("party {i}: product summand disagrees between senders")));
            }
            for e in 0..len {
                z.parts[h][e] = d.add(z.parts[h][e], rest[e]);
            }
        }
        Ok(z)
    }
}
