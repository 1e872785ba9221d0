use std::ops::Range;

use sha2::{Digest, Sha256};

use crate::algebra::Domain;
use crate::error::{Error, Result};

/// One party's shares of a vector of secrets.
///
/// `parts[c][i]` is component `c` of element `i`. Additive and Shamir shares
/// have a single component. Replicated shares are indexed by summand: Rep3
/// uses three components and Rep4 four, with the component a party does not
/// hold kept at zero. `mac` carries the tag shares of authenticated values.
///
/// Linear operations panic when the operands do not have the same domain
/// and shape; mixing them is a programming error rather than a runtime
/// condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sh {
    pub domain: Domain,
    pub parts: Vec<Vec<u128>>,
    pub mac: Option<Vec<u128>>,
}

impl Sh {
    pub fn zeros(domain: Domain, components: usize, len: usize, mac: bool) -> Self {
        Sh { domain, parts: vec![vec![0; len]; components], mac: mac.then(|| vec![0; len]) }
    }

    pub fn len(&self) -> usize {
        self.parts[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn components(&self) -> usize {
        self.parts.len()
    }

    fn check(&self, o: &Sh) {
        assert_eq!(self.domain, o.domain, "share domains differ");
        assert_eq!(self.parts.len(), o.parts.len(), "share layouts differ");
        assert_eq!(self.len(), o.len(), "share lengths differ");
        assert_eq!(self.mac.is_some(), o.mac.is_some(), "authenticated and plain shares mixed");
    }

    fn map2(&self, o: &Sh, f: impl Fn(u128, u128) -> u128) -> Sh {
        self.check(o);
        let zip = |a: &Vec<u128>, b: &Vec<u128>| a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect::<Vec<_>>();
        Sh {
            domain: self.domain,
            parts: self.parts.iter().zip(&o.parts).map(|(a, b)| zip(a, b)).collect(),
            mac: self.mac.as_ref().map(|m| zip(m, o.mac.as_ref().unwrap())),
        }
    }

    fn map(&self, f: impl Fn(usize, u128) -> u128) -> Sh {
        let m = |v: &Vec<u128>| v.iter().enumerate().map(|(i, &x)| f(i, x)).collect::<Vec<_>>();
        Sh { domain: self.domain, parts: self.parts.iter().map(m).collect(), mac: self.mac.as_ref().map(m) }
    }

    pub fn add(&self, o: &Sh) -> Sh {
        let d = self.domain;
        self.map2(o, |a, b| d.add(a, b))
    }

    pub fn sub(&self, o: &Sh) -> Sh {
        let d = self.domain;
        self.map2(o, |a, b| d.sub(a, b))
    }

    pub fn neg(&self) -> Sh {
        let d = self.domain;
        self.map(|_, a| d.neg(a))
    }

    pub fn scale(&self, c: u128) -> Sh {
        let d = self.domain;
        let c = d.reduce(c);
        self.map(|_, a| d.mul(a, c))
    }

    /// Multiplies element `i` by the public `cs[i]`.
    pub fn scale_each(&self, cs: &[u128]) -> Sh {
        assert_eq!(cs.len(), self.len(), "coefficient count");
        let d = self.domain;
        self.map(|i, a| d.mul(a, d.reduce(cs[i])))
    }

    pub fn slice(&self, r: Range<usize>) -> Sh {
        Sh {
            domain: self.domain,
            parts: self.parts.iter().map(|p| p[r.clone()].to_vec()).collect(),
            mac: self.mac.as_ref().map(|m| m[r.clone()].to_vec()),
        }
    }

    pub fn select(&self, idx: &[usize]) -> Sh {
        let pick = |v: &Vec<u128>| idx.iter().map(|&i| v[i]).collect::<Vec<_>>();
        Sh { domain: self.domain, parts: self.parts.iter().map(pick).collect(), mac: self.mac.as_ref().map(pick) }
    }

    pub fn get(&self, i: usize) -> Sh {
        self.slice(i..i + 1)
    }

    /// Repeats every element `times` times in place: `[a, b] -> [a, a, b, b]`.
    pub fn stretch(&self, times: usize) -> Sh {
        let idx: Vec<usize> = (0..self.len()).flat_map(|i| std::iter::repeat(i).take(times)).collect();
        self.select(&idx)
    }

    /// Repeats the whole vector: `[a, b] -> [a, b, a, b]`.
    pub fn tile(&self, times: usize) -> Sh {
        let idx: Vec<usize> = (0..times).flat_map(|_| 0..self.len()).collect();
        self.select(&idx)
    }

    pub fn append(&mut self, o: &Sh) {
        assert_eq!(self.domain, o.domain, "share domains differ");
        assert_eq!(self.parts.len(), o.parts.len(), "share layouts differ");
        for (a, b) in self.parts.iter_mut().zip(&o.parts) {
            a.extend_from_slice(b);
        }
        if let (Some(a), Some(b)) = (self.mac.as_mut(), o.mac.as_ref()) {
            a.extend_from_slice(b);
        }
    }

    pub fn concat(items: &[&Sh]) -> Sh {
        let mut out = items[0].slice(0..0);
        for s in items {
            out.append(s);
        }
        out
    }

    /// Sum of all elements as a length-one vector.
    pub fn sum(&self) -> Sh {
        let d = self.domain;
        let s = |v: &Vec<u128>| vec![v.iter().fold(0, |acc, &x| d.add(acc, x))];
        Sh { domain: d, parts: self.parts.iter().map(s).collect(), mac: self.mac.as_ref().map(s) }
    }

    /// Sums consecutive chunks of `width` elements.
    pub fn chunk_sums(&self, width: usize) -> Sh {
        assert!(width > 0 && self.len() % width == 0, "chunk width");
        let d = self.domain;
        let s = |v: &Vec<u128>| v.chunks(width).map(|c| c.iter().fold(0, |acc, &x| d.add(acc, x))).collect();
        Sh { domain: d, parts: self.parts.iter().map(s).collect(), mac: self.mac.as_ref().map(s) }
    }

    /// Reinterprets the share values in another domain of the same layout,
    /// reducing every component. Only meaningful where reduction commutes
    /// with the sharing, e.g. from `Z_{2^{k+s}}` down to `Z_{2^k}`.
    pub fn reduce_into(&self, domain: Domain) -> Sh {
        let r = |v: &Vec<u128>| v.iter().map(|&x| domain.reduce(x)).collect::<Vec<_>>();
        Sh { domain, parts: self.parts.iter().map(r).collect(), mac: None }
    }
}

/// Fixed-width little-endian encoding; bits are packed eight to a byte.
pub fn encode(domain: Domain, vals: &[u128]) -> Vec<u8> {
    if domain == Domain::Binary {
        let mut out = vec![0u8; vals.len().div_ceil(8)];
        for (i, &v) in vals.iter().enumerate() {
            out[i / 8] |= ((v & 1) as u8) << (i % 8);
        }
        return out;
    }
    let w = domain.byte_width();
    let mut out = Vec::with_capacity(w * vals.len());
    for &v in vals {
        out.extend_from_slice(&v.to_le_bytes()[..w]);
    }
    out
}

pub fn decode(domain: Domain, bytes: &[u8], len: usize) -> Result<Vec<u128>> {
    if domain == Domain::Binary {
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::Decode(format!("expected {len} packed bits, got {} bytes", bytes.len())));
        }
        return Ok((0..len).map(|i| ((bytes[i / 8] >> (i % 8)) & 1) as u128).collect());
    }
    let w = domain.byte_width();
    if bytes.len() != w * len {
        return Err(Error::Decode(format!("expected {len} elements of {w} bytes, got {} bytes", bytes.len())));
    }
    bytes
        .chunks(w)
        .map(|c| {
            let mut b = [0u8; 16];
            b[..w].copy_from_slice(c);
            let v = u128::from_le_bytes(b);
            if domain.contains(v) {
                Ok(v)
            } else {
                Err(Error::Decode(format!("{v} outside {domain}")))
            }
        })
        .collect()
}

pub fn digest(bytes: &[u8]) -> Vec<u8> {
    Sha256::digest(bytes).to_vec()
}

pub fn digest_vals(domain: Domain, vals: &[u128]) -> Vec<u8> {
    digest(&encode(domain, vals))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codec_round_trip() {
        let v = vec![1u128, 0, 1, 1, 0, 0, 0, 1, 1];
        let e = encode(Domain::Binary, &v);
        assert_eq!(e.len(), 2);
        assert_eq!(decode(Domain::Binary, &e, 9).unwrap(), v);
        let d = Domain::Ring(12);
        let v = vec![4095u128, 7, 0];
        assert_eq!(decode(d, &encode(d, &v), 3).unwrap(), v);
        assert!(decode(d, &[0xff, 0xff], 1).is_err());
    }

    #[test]
    fn reshaping() {
        let s = Sh { domain: Domain::Ring(8), parts: vec![vec![1, 2, 3]], mac: None };
        assert_eq!(s.stretch(2).parts[0], vec![1, 1, 2, 2, 3, 3]);
        assert_eq!(s.tile(2).parts[0], vec![1, 2, 3, 1, 2, 3]);
        assert_eq!(s.sum().parts[0], vec![6]);
        assert_eq!(s.tile(2).chunk_sums(3).parts[0], vec![6, 6]);
    }
}
