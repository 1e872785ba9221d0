use super::session::{Fault, Session};
use super::share::{decode, digest, encode, Sh};
use crate::algebra::{Domain, Polynomial};
use crate::error::{Error, Result};
use crate::sharing::Scheme;
use crate::transport::MsgKind;

impl Session {
    /// Secret-shares `len` values held by `owner`. Only the owner passes
    /// `Some(values)`.
    pub fn input(&mut self, owner: usize, domain: Domain, vals: Option<&[u128]>, len: usize) -> Result<Sh> {
        if owner >= self.n {
            return Err(Error::Param(format!("input owner {owner} out of range")));
        }
        let vals: Option<Vec<u128>> = match (self.id == owner, vals) {
            (true, Some(v)) if v.len() == len => Some(v.iter().map(|&x| domain.reduce(x)).collect()),
            (true, _) => return Err(Error::Param(format!("owner must supply {len} values"))),
            (false, Some(_)) => return Err(Error::Param("only the owner supplies input values".into())),
            (false, None) => None,
        };
        let scheme = self.scheme(domain)?;
        if self.has_mac(domain) || (self.is_malicious() && scheme != Scheme::Rep4) {
            return self.input_masked(owner, domain, vals, len);
        }
        match scheme {
            Scheme::Additive | Scheme::Xor => Ok(self.input_additive(owner, domain, vals, len)),
            Scheme::Rep3 => self.input_rep3(owner, domain, vals, len),
            Scheme::Shamir => self.input_shamir(owner, domain, vals, len),
            Scheme::Rep4 => self.input_rep4(owner, domain, vals, len),
        }
    }

    /// Non-owners take pairwise pseudorandom shares; the owner absorbs them.
    fn input_additive(&mut self, owner: usize, d: Domain, vals: Option<Vec<u128>>, len: usize) -> Sh {
        let mut out = Sh::zeros(d, 1, len, false);
        if self.id != owner {
            out.parts[0] = self.prss_stream(Self::pair_mask(owner, self.id)).fill(d, len);
        } else {
            let mut acc = vals.unwrap();
            for j in (0..self.n).filter(|&j| j != owner) {
                let r = self.prss_stream(Self::pair_mask(owner, j)).fill(d, len);
                for (a, v) in acc.iter_mut().zip(r) {
                    *a = d.sub(*a, v);
                }
            }
            out.parts[0] = acc;
        }
        out
    }

    fn input_rep3(&mut self, o: usize, d: Domain, vals: Option<Vec<u128>>, len: usize) -> Result<Sh> {
        let i = self.id;
        let prev = (o + 2) % 3;
        let mut out = Sh::zeros(d, 3, len, false);
        if i == o || i == (o + 1) % 3 {
            out.parts[o] = self.prss_stream(Self::pair_mask(o, (o + 1) % 3)).fill(d, len);
        }
        if i == o {
            let last: Vec<u128> = vals.unwrap().iter().zip(&out.parts[o]).map(|(&v, &r)| d.sub(v, r)).collect();
            self.net.next_round();
            self.net.send(prev, MsgKind::Data, encode(d, &last))?;
            out.parts[prev] = last;
        } else if i == prev {
            self.net.next_round();
            out.parts[prev] = decode(d, &self.net.recv_kind(o, MsgKind::Data)?, len)?;
        } else {
            self.net.next_round();
        }
        Ok(out)
    }

    fn input_shamir(&mut self, o: usize, d: Domain, vals: Option<Vec<u128>>, len: usize) -> Result<Sh> {
        let (i, n, t) = (self.id, self.n, self.cfg.threshold);
        self.net.next_round();
        let mine = if i == o {
            let mut per = vec![Vec::with_capacity(len); n];
            for v in vals.unwrap() {
                let f = Polynomial::random_with_constant(v, t, d, &mut self.local);
                for (j, p) in per.iter_mut().enumerate() {
                    p.push(f.eval(j as u128 + 1));
                }
            }
            for (j, p) in per.iter().enumerate() {
                if j != o {
                    self.net.send(j, MsgKind::Data, encode(d, p))?;
                }
            }
            std::mem::take(&mut per[o])
        } else {
            decode(d, &self.net.recv_kind(o, MsgKind::Data)?, len)?
        };
        Ok(Sh { domain: d, parts: vec![mine], mac: None })
    }

    /// Summand `o` is zero, two more come from keys the owner shares, and the
    /// owner sends the last to the two others holding it, who compare hashes.
    fn input_rep4(&mut self, o: usize, d: Domain, vals: Option<Vec<u128>>, len: usize) -> Result<Sh> {
        let i = self.id;
        let others: Vec<usize> = (0..4).filter(|&g| g != o).collect();
        let (g1, g2, g3) = (others[0], others[1], others[2]);
        let mut out = Sh::zeros(d, 4, len, false);
        for g in [g1, g2] {
            if i != g {
                out.parts[g] = self.prss_stream(0b1111 & !(1 << g)).fill(d, len);
            }
        }
        self.net.next_round();
        if i == o {
            let last: Vec<u128> = (0..len)
                .map(|e| d.sub(d.sub(vals.as_ref().unwrap()[e], out.parts[g1][e]), out.parts[g2][e]))
                .collect();
            let mut tampered = last.clone();
            if self.fault == Some(Fault::CorruptInput) && len > 0 {
                tampered[0] = d.add(tampered[0], 1);
            }
            self.net.send(g1, MsgKind::Data, encode(d, &last))?;
            self.net.send(g2, MsgKind::Data, encode(d, &tampered))?;
            out.parts[g3] = last;
            self.net.next_round();
        } else if i == g1 || i == g2 {
            let got = decode(d, &self.net.recv_kind(o, MsgKind::Data)?, len)?;
            let peer = if i == g1 { g2 } else { g1 };
            self.net.next_round();
            let h = crate::engine::share::digest_vals(d, &got);
            self.net.send(peer, MsgKind::Hash, h.clone())?;
            if self.net.recv_kind(peer, MsgKind::Hash)? != h {
                return Err(Error::InconsistentBroadcast);
            }
            out.parts[g3] = got;
        } else {
            self.net.next_round();
        }
        Ok(out)
    }

    /// Opens a random sharing `[r]` to the owner, who broadcasts `x - r`;
    /// everyone echoes a hash of what they received before accepting.
    fn input_masked(&mut self, o: usize, d: Domain, vals: Option<Vec<u128>>, len: usize) -> Result<Sh> {
        let r = self.random(d, len)?;
        let opened = self.open_to(&r, o)?;
        self.net.next_round();
        let w = if self.id == o {
            let w: Vec<u128> = vals.unwrap().iter().zip(opened.unwrap()).map(|(&v, r)| d.sub(v, r)).collect();
            let bytes = encode(d, &w);
            for j in (0..self.n).filter(|&j| j != o) {
                let mut b = bytes.clone();
                if self.fault == Some(Fault::CorruptInput) && j == (o + 1) % self.n && !w.is_empty() {
                    b = encode(d, &[vec![d.add(w[0], 1)], w[1..].to_vec()].concat());
                }
                self.net.send(j, MsgKind::Data, b)?;
            }
            w
        } else {
            decode(d, &self.net.recv_kind(o, MsgKind::Data)?, len)?
        };
        let mine = digest(&encode(d, &w));
        let echoes = self.net.broadcast(MsgKind::Hash, mine.clone())?;
        if echoes.iter().any(|h| *h != mine) {
            return Err(Error::InconsistentBroadcast);
        }
        self.add_public(&r, &w)
    }
}
