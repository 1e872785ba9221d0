use std::io::{Read, Write};

use super::Triples;
use crate::algebra::Domain;
use crate::engine::share::{decode, encode};
use crate::engine::Sh;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"MPCPOOL1";

/// Fixed-size header of a triple pool file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PoolHeader {
    pub domain: Domain,
    pub count: u64,
    pub components: u8,
    pub authenticated: bool,
}

impl PoolHeader {
    fn encode(&self) -> Vec<u8> {
        let (kind, param) = match self.domain {
            Domain::Prime(p) => (0u8, p),
            Domain::Ring(k) => (1, k as u128),
            Domain::Binary => (2, 0),
        };
        let mut out = MAGIC.to_vec();
        out.push(kind);
        out.extend_from_slice(&param.to_le_bytes());
        out.extend_from_slice(&self.count.to_le_bytes());
        out.push(self.components);
        out.push(self.authenticated as u8);
        out
    }

    fn decode(b: &[u8; 36]) -> Result<Self> {
        if &b[..8] != MAGIC {
            return Err(Error::Decode("not a triple pool".into()));
        }
        let param = u128::from_le_bytes(b[9..25].try_into().unwrap());
        let domain = match b[8] {
            0 => Domain::prime(param)?,
            1 => Domain::ring(u32::try_from(param).map_err(|_| Error::Decode("ring width".into()))?)?,
            2 => Domain::Binary,
            k => return Err(Error::Decode(format!("domain tag {k}"))),
        };
        let count = u64::from_le_bytes(b[25..33].try_into().unwrap());
        let components = b[33];
        if components == 0 || components > 4 || b[34] > 1 {
            return Err(Error::Decode("bad pool flags".into()));
        }
        Ok(PoolHeader { domain, count, components, authenticated: b[34] == 1 })
    }
}

/// Streams of all share vectors of a batch in record order.
fn columns(t: &Triples) -> Vec<&Vec<u128>> {
    let mut cols = Vec::new();
    for sh in [&t.a, &t.b, &t.c] {
        cols.extend(sh.parts.iter());
        if let Some(m) = &sh.mac {
            cols.push(m);
        }
    }
    cols
}

/// Writes one party's triples: header, then one fixed-width record per
/// triple holding every component (and tag) of `a`, `b` and `c`.
pub fn write_pool<W: Write>(w: &mut W, t: &Triples) -> Result<()> {
    let header = PoolHeader {
        domain: t.a.domain,
        count: t.len() as u64,
        components: t.a.components() as u8,
        authenticated: t.a.mac.is_some(),
    };
    let mut bytes = header.encode();
    bytes.push(0);
    let cols = columns(t);
    for e in 0..t.len() {
        let rec: Vec<u128> = cols.iter().map(|c| c[e]).collect();
        bytes.extend_from_slice(&encode(t.a.domain, &rec));
    }
    w.write_all(&bytes)?;
    Ok(())
}

pub fn read_pool<R: Read>(r: &mut R) -> Result<(PoolHeader, Triples)> {
    let mut hb = [0u8; 36];
    r.read_exact(&mut hb)?;
    let h = PoolHeader::decode(&hb)?;
    let d = h.domain;
    let per = h.components as usize + h.authenticated as usize;
    let width = 3 * per;
    let rec_bytes = encode(d, &vec![0; width]).len();
    let count = usize::try_from(h.count).map_err(|_| Error::Decode("count".into()))?;
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if rest.len() != rec_bytes * count {
        return Err(Error::Decode(format!("expected {count} records of {rec_bytes} bytes")));
    }
    let make = || Sh::zeros(d, h.components as usize, count, h.authenticated);
    let mut t = Triples { a: make(), b: make(), c: make() };
    for (e, chunk) in rest.chunks(rec_bytes.max(1)).take(count).enumerate() {
        let rec = decode(d, chunk, width)?;
        let mut it = rec.into_iter();
        for sh in [&mut t.a, &mut t.b, &mut t.c] {
            for p in sh.parts.iter_mut() {
                p[e] = it.next().unwrap();
            }
            if let Some(m) = sh.mac.as_mut() {
                m[e] = it.next().unwrap();
            }
        }
    }
    Ok((h, t))
}
