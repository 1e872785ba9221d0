use super::session::{Fault, Session};
use super::share::{decode, digest_vals, encode, Sh};
use crate::algebra::{lagrange_coefficients, Domain};
use crate::error::{Error, Result};
use crate::sharing::Scheme;
use crate::transport::MsgKind;

impl Session {
    /// Applies the open fault, if armed, to an outgoing vector.
    fn tamper_open(&mut self, domain: Domain, vals: &mut [u128]) {
        if self.fault == Some(Fault::CorruptOpen) && self.opens_seen == 0 && !vals.is_empty() {
            vals[0] = domain.add(vals[0], 1);
        }
    }

    /// Reveals `x` to every party.
    pub fn open(&mut self, x: &Sh) -> Result<Vec<u128>> {
        let d = x.domain;
        let len = x.len();
        let scheme = self.scheme(d)?;
        let out = match scheme {
            Scheme::Additive | Scheme::Xor => {
                let mut mine = x.parts[0].clone();
                self.tamper_open(d, &mut mine);
                let all = self.net.broadcast(MsgKind::Data, encode(d, &mine))?;
                let mut sum = vec![0u128; len];
                for bytes in &all {
                    for (s, v) in sum.iter_mut().zip(decode(d, bytes, len)?) {
                        *s = d.add(*s, v);
                    }
                }
                sum
            }
            Scheme::Shamir => {
                let mut mine = x.parts[0].clone();
                self.tamper_open(d, &mut mine);
                let all = self.net.broadcast(MsgKind::Data, encode(d, &mine))?;
                let pts = all.iter().map(|b| decode(d, b, len)).collect::<Result<Vec<_>>>()?;
                self.shamir_decode(d, &pts)?
            }
            Scheme::Rep3 | Scheme::Rep4 => self.open_replicated(x, scheme)?,
        };
        if let Some(m) = &x.mac {
            self.mac_log.extend(out.iter().copied().zip(m.iter().copied()));
        }
        self.opens_seen += 1;
        self.stats.opened += len as u64;
        Ok(out)
    }

    /// Interpolates the secret from all parties' points; a malicious
    /// configuration also checks that every point lies on one polynomial of
    /// degree at most `t`.
    pub(crate) fn shamir_decode(&self, d: Domain, pts: &[Vec<u128>]) -> Result<Vec<u128>> {
        let n = pts.len();
        let t = self.cfg.threshold;
        let base: Vec<u128> = (1..=t as u128 + 1).collect();
        let w0 = lagrange_coefficients(&base, 0, d)?;
        let combine = |w: &[u128], e: usize| w.iter().enumerate().fold(0, |acc, (j, &c)| d.add(acc, d.mul(c, pts[j][e])));
        let len = pts[0].len();
        if self.is_malicious() {
            for z in t + 1..n {
                let w = lagrange_coefficients(&base, z as u128 + 1, d)?;
                if (0..len).any(|e| combine(&w, e) != pts[z][e]) {
                    return Err(Error::InconsistentBroadcast);
                }
            }
            Ok((0..len).map(|e| combine(&w0, e)).collect())
        } else {
            let all: Vec<u128> = (1..=n as u128).collect();
            let w = lagrange_coefficients(&all, 0, d)?;
            Ok((0..len).map(|e| combine(&w, e)).collect())
        }
    }

    /// Each party gets its missing summand from the next party; malicious
    /// families also get a hash of it from the party after that.
    fn open_replicated(&mut self, x: &Sh, scheme: Scheme) -> Result<Vec<u128>> {
        let d = x.domain;
        let len = x.len();
        let (i, n) = (self.id, self.n);
        let miss = self.missing(scheme).unwrap();
        let next = (i + 1) % n;
        let prev = (i + n - 1) % n;
        // Summand the previous party misses, and the one the party two back misses.
        let give = (i + n - 1) % n;
        let give = if scheme == Scheme::Rep3 { (give + 1) % 3 } else { give };
        let mut data = x.parts[give].clone();
        self.tamper_open(d, &mut data);
        let hash_check = self.is_malicious() || scheme == Scheme::Rep4;
        self.net.next_round();
        self.net.send(prev, MsgKind::Data, encode(d, &data))?;
        let back2 = (i + n - 2) % n;
        if hash_check {
            let hsum = if scheme == Scheme::Rep3 { (back2 + 1) % 3 } else { back2 };
            self.net.send(back2, MsgKind::Hash, digest_vals(d, &x.parts[hsum]))?;
        }
        let got = decode(d, &self.net.recv_kind(next, MsgKind::Data)?, len)?;
        if hash_check {
            let h = self.net.recv_kind((i + 2) % n, MsgKind::Hash)?;
            if h != digest_vals(d, &got) {
                return Err(Error::Abort(format!("party {i}: opened summand disagrees between holders")));
            }
        }
        let mut out = got;
        for (j, part) in x.parts.iter().enumerate() {
            if j != miss {
                for (o, &v) in out.iter_mut().zip(part) {
                    *o = d.add(*o, v);
                }
            }
        }
        Ok(out)
    }

    /// Reveals `x` to party `to` only; others get `None`.
    pub fn open_to(&mut self, x: &Sh, to: usize) -> Result<Option<Vec<u128>>> {
        let d = x.domain;
        let len = x.len();
        let scheme = self.scheme(d)?;
        let (i, n) = (self.id, self.n);
        self.net.next_round();
        let out = match scheme {
            Scheme::Additive | Scheme::Xor | Scheme::Shamir => {
                if i != to {
                    self.net.send(to, MsgKind::Data, encode(d, &x.parts[0]))?;
                    None
                } else {
                    let mut pts = Vec::with_capacity(n);
                    for j in 0..n {
                        pts.push(if j == i { x.parts[0].clone() } else { decode(d, &self.net.recv_kind(j, MsgKind::Data)?, len)? });
                    }
                    Some(if scheme == Scheme::Shamir {
                        self.shamir_decode(d, &pts)?
                    } else {
                        pts.iter().fold(vec![0; len], |acc, p| acc.iter().zip(p).map(|(&a, &b)| d.add(a, b)).collect())
                    })
                }
            }
            Scheme::Rep3 | Scheme::Rep4 => {
                let hash_check = self.is_malicious() || scheme == Scheme::Rep4;
                let their_miss = match scheme {
                    Scheme::Rep3 => (to + 1) % 3,
                    _ => to,
                };
                if i == (to + 1) % n {
                    self.net.send(to, MsgKind::Data, encode(d, &x.parts[their_miss]))?;
                } else if hash_check && i == (to + 2) % n {
                    self.net.send(to, MsgKind::Hash, digest_vals(d, &x.parts[their_miss]))?;
                }
                if i != to {
                    None
                } else {
                    let got = decode(d, &self.net.recv_kind((i + 1) % n, MsgKind::Data)?, len)?;
                    if hash_check && self.net.recv_kind((i + 2) % n, MsgKind::Hash)? != digest_vals(d, &got) {
                        return Err(Error::Abort(format!("party {i}: private opening disagrees between holders")));
                    }
                    let miss = self.missing(scheme).unwrap();
                    let mut out = got;
                    for (j, part) in x.parts.iter().enumerate() {
                        if j != miss {
                            for (o, &v) in out.iter_mut().zip(part) {
                                *o = d.add(*o, v);
                            }
                        }
                    }
                    Some(out)
                }
            }
        };
        Ok(out)
    }
}
