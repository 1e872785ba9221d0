//! Dealer-side secret sharing: splitting single values into per-party
//! shares, reconstructing them and local linear combinations.
//!
//! These functions operate on whole share lists and never communicate. The
//! online engine stores replicated shares in a summand-indexed form; the
//! helpers [`rep3_to_araki`] and [`araki_to_rep3`] translate between that and
//! the `(v_i, a_i)` payload carried by [`Share`].

use std::collections::BTreeMap;

use rand::RngCore;

use crate::algebra::{lagrange_coefficients, Domain, Polynomial};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    Additive,
    Xor,
    Rep3,
    Shamir,
    Rep4,
}

impl Scheme {
    fn tag(self) -> u8 {
        match self {
            Scheme::Additive => 0,
            Scheme::Xor => 1,
            Scheme::Rep3 => 2,
            Scheme::Shamir => 3,
            Scheme::Rep4 => 4,
        }
    }

    fn from_tag(t: u8) -> Result<Self> {
        Ok(match t {
            0 => Scheme::Additive,
            1 => Scheme::Xor,
            2 => Scheme::Rep3,
            3 => Scheme::Shamir,
            4 => Scheme::Rep4,
            _ => return Err(Error::Decode(format!("unknown scheme tag {t}"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Payload {
    /// Additive or XOR share.
    Single(u128),
    /// Rep3 pair `(v_i, a_i)` with `sum v = 0` and `a_i = v_{i-1} - x`.
    Pair(u128, u128),
    /// Shamir evaluation `(z_i, f(z_i))` of a degree `t - 1` polynomial.
    Point { z: u128, y: u128, t: usize },
    /// Rep4: the three summands `x_j`, `j != i`, in increasing `j`.
    Triple([u128; 3]),
}

/// One party's piece of a single secret.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Share {
    pub scheme: Scheme,
    pub party: usize,
    pub n: usize,
    pub domain: Domain,
    pub payload: Payload,
}

/// Shares of a vector of secrets, indexed `[party][element]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecretVector {
    pub shares: Vec<Vec<Share>>,
}

impl SecretVector {
    pub fn len(&self) -> usize {
        self.shares.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn reconstruct(&self) -> Result<Vec<u128>> {
        (0..self.len())
            .map(|e| {
                let col: Vec<Share> = self.shares.iter().map(|p| p[e].clone()).collect();
                reconstruct(&col)
            })
            .collect()
    }
}

/// Shares every element of `xs` with `share` and transposes into per-party rows.
pub fn share_vector<F>(xs: &[u128], mut share: F) -> Result<SecretVector>
where
    F: FnMut(u128) -> Result<Vec<Share>>,
{
    let mut rows: Vec<Vec<Share>> = Vec::new();
    for &x in xs {
        let col = share(x)?;
        if rows.is_empty() {
            rows = vec![Vec::with_capacity(xs.len()); col.len()];
        }
        for (row, s) in rows.iter_mut().zip(col) {
            row.push(s);
        }
    }
    Ok(SecretVector { shares: rows })
}

fn check_parties(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Param(format!("need at least 2 parties, got {n}")));
    }
    Ok(())
}

/// Splits `x` into `n` values summing to `x`.
pub fn share_additive<R: RngCore + ?Sized>(x: u128, n: usize, domain: Domain, rng: &mut R) -> Result<Vec<Share>> {
    check_parties(n)?;
    let parts = split_sum(domain.reduce(x), n, domain, rng);
    Ok(parts
        .into_iter()
        .enumerate()
        .map(|(party, v)| Share { scheme: Scheme::Additive, party, n, domain, payload: Payload::Single(v) })
        .collect())
}

/// Raw additive split, used by the dealer.
pub fn split_sum<R: RngCore + ?Sized>(x: u128, n: usize, domain: Domain, rng: &mut R) -> Vec<u128> {
    let mut parts: Vec<u128> = (1..n).map(|_| domain.sample(rng)).collect();
    let rest = parts.iter().fold(x, |acc, &p| domain.sub(acc, p));
    parts.insert(0, rest);
    parts
}

/// XOR-shares a `width`-bit string packed little-endian into `x`.
pub fn share_xor<R: RngCore + ?Sized>(x: u128, width: u32, n: usize, rng: &mut R) -> Result<Vec<Share>> {
    check_parties(n)?;
    let domain = if width == 1 { Domain::Binary } else { Domain::ring(width)? };
    if !domain.contains(x) {
        return Err(Error::Overflow { value: x, bits: width });
    }
    let mut acc = x;
    let mut out = Vec::with_capacity(n);
    for party in 1..n {
        let r = domain.sample(rng);
        acc ^= r;
        out.push(Share { scheme: Scheme::Xor, party, n, domain, payload: Payload::Single(r) });
    }
    out.insert(0, Share { scheme: Scheme::Xor, party: 0, n, domain, payload: Payload::Single(acc) });
    Ok(out)
}

/// Araki et al. 2-of-3 replicated sharing.
///
/// Party `i` (0-based) receives `(v_i, a_i)` with `v_0 + v_1 + v_2 = 0` and
/// `a_i = v_{i-1} - x`, indices mod 3. Over `Z_2` addition is XOR.
pub fn share_rep3<R: RngCore + ?Sized>(x: u128, domain: Domain, rng: &mut R) -> Result<Vec<Share>> {
    let x = domain.reduce(x);
    let v0 = domain.sample(rng);
    let v1 = domain.sample(rng);
    let v2 = domain.neg(domain.add(v0, v1));
    let v = [v0, v1, v2];
    Ok((0..3)
        .map(|i| Share {
            scheme: Scheme::Rep3,
            party: i,
            n: 3,
            domain,
            payload: Payload::Pair(v[i], domain.sub(v[(i + 2) % 3], x)),
        })
        .collect())
}

/// Maps party `i`'s replicated summands `(S_i, S_{i-1})` to its `(v_i, a_i)`.
pub fn rep3_to_araki(domain: Domain, own: u128, prev: u128) -> (u128, u128) {
    let d = domain;
    if d == Domain::Binary {
        return (own ^ prev, own);
    }
    let v = d.sub(prev, own);
    let a = d.neg(d.add(own, d.add(prev, prev)));
    (v, a)
}

/// Inverse of [`rep3_to_araki`]; needs 3 to be invertible in `domain`.
pub fn araki_to_rep3(domain: Domain, v: u128, a: u128) -> Result<(u128, u128)> {
    let d = domain;
    if d == Domain::Binary {
        return Ok((a, a ^ v));
    }
    let inv3 = d.inv(d.reduce(3))?;
    let own = d.neg(d.mul(d.add(d.add(v, v), a), inv3));
    let prev = d.neg(d.mul(d.sub(a, v), inv3));
    Ok((own, prev))
}

/// Shamir sharing with threshold `t`: any `t` shares reconstruct. Party `i`
/// gets the evaluation at `z = i + 1`.
pub fn share_shamir<R: RngCore + ?Sized>(
    x: u128,
    n: usize,
    t: usize,
    domain: Domain,
    rng: &mut R,
) -> Result<Vec<Share>> {
    let p = match domain {
        Domain::Prime(p) => p,
        d => return Err(Error::DomainMismatch(format!("Shamir sharing needs a prime field, got {d}"))),
    };
    if t == 0 || t > n || n as u128 >= p {
        return Err(Error::Param(format!("invalid Shamir parameters n={n} t={t} p={p}")));
    }
    let f = Polynomial::random_with_constant(x, t - 1, domain, rng);
    Ok((0..n)
        .map(|i| {
            let z = i as u128 + 1;
            Share { scheme: Scheme::Shamir, party: i, n, domain, payload: Payload::Point { z, y: f.eval(z), t } }
        })
        .collect())
}

/// 3-of-4 replicated additive sharing: `x = x_0 + x_1 + x_2 + x_3` and party
/// `i` holds every summand except `x_i`.
pub fn share_rep4<R: RngCore + ?Sized>(x: u128, domain: Domain, rng: &mut R) -> Result<Vec<Share>> {
    let summands = split_sum(domain.reduce(x), 4, domain, rng);
    Ok((0..4)
        .map(|i| {
            let held: Vec<u128> = (0..4).filter(|&j| j != i).map(|j| summands[j]).collect();
            Share {
                scheme: Scheme::Rep4,
                party: i,
                n: 4,
                domain,
                payload: Payload::Triple([held[0], held[1], held[2]]),
            }
        })
        .collect())
}

/// Summand indices held by party `i` in a Rep4 payload, in payload order.
pub fn rep4_held(i: usize) -> [usize; 3] {
    let mut out = [0; 3];
    let mut k = 0;
    for j in 0..4 {
        if j != i {
            out[k] = j;
            k += 1;
        }
    }
    out
}

/// Recovers the secret, cross-checking redundant information.
pub fn reconstruct(shares: &[Share]) -> Result<u128> {
    let first = shares.first().ok_or(Error::InsufficientShares { needed: 1, got: 0 })?;
    let (scheme, domain) = (first.scheme, first.domain);
    let mut by_party = BTreeMap::new();
    for s in shares {
        if s.scheme != scheme {
            return Err(Error::SchemeMismatch(format!("{:?} mixed with {:?}", scheme, s.scheme)));
        }
        if s.domain != domain {
            return Err(Error::DomainMismatch(format!("{} mixed with {}", domain, s.domain)));
        }
        if by_party.insert(s.party, s.payload).is_some() {
            return Err(Error::Param(format!("two shares for party {}", s.party)));
        }
    }
    let d = domain;
    match scheme {
        Scheme::Additive | Scheme::Xor => {
            if by_party.len() < first.n {
                return Err(Error::InsufficientShares { needed: first.n, got: by_party.len() });
            }
            let mut acc = 0;
            for p in by_party.values() {
                let Payload::Single(v) = *p else { return Err(bad_payload(scheme)) };
                acc = if scheme == Scheme::Xor { acc ^ v } else { d.add(acc, v) };
            }
            Ok(acc)
        }
        Scheme::Rep3 => {
            if by_party.len() < 2 {
                return Err(Error::InsufficientShares { needed: 2, got: by_party.len() });
            }
            let mut pairs = BTreeMap::new();
            for (&i, p) in &by_party {
                let Payload::Pair(v, a) = *p else { return Err(bad_payload(scheme)) };
                pairs.insert(i, (v, a));
            }
            // x = v_i - a_{i+1} for every consecutive pair present
            let mut candidate = None;
            for i in 0..3 {
                if let (Some(&(v, _)), Some(&(_, a))) = (pairs.get(&i), pairs.get(&((i + 1) % 3))) {
                    let x = d.sub(v, a);
                    match candidate {
                        None => candidate = Some(x),
                        Some(c) if c != x => return Err(Error::InconsistentReplicas),
                        _ => {}
                    }
                }
            }
            if pairs.len() == 3 && pairs.values().fold(0, |acc, &(v, _)| d.add(acc, v)) != 0 {
                return Err(Error::InconsistentReplicas);
            }
            candidate.ok_or(Error::InsufficientShares { needed: 2, got: 1 })
        }
        Scheme::Shamir => {
            let mut pts = Vec::new();
            let mut t = 0;
            for p in by_party.values() {
                let Payload::Point { z, y, t: ti } = *p else { return Err(bad_payload(scheme)) };
                t = ti;
                pts.push((z, y));
            }
            if pts.len() < t {
                return Err(Error::InsufficientShares { needed: t, got: pts.len() });
            }
            let f = Polynomial::interpolate(&pts[..t], d)?;
            if pts[t..].iter().any(|&(z, y)| f.eval(z) != y) {
                return Err(Error::InconsistentReplicas);
            }
            Ok(f.eval(0))
        }
        Scheme::Rep4 => {
            let mut summands: [Option<u128>; 4] = [None; 4];
            for (&i, p) in &by_party {
                let Payload::Triple(vals) = *p else { return Err(bad_payload(scheme)) };
                for (j, v) in rep4_held(i).into_iter().zip(vals) {
                    match summands[j] {
                        None => summands[j] = Some(v),
                        Some(w) if w != v => return Err(Error::InconsistentReplicas),
                        _ => {}
                    }
                }
            }
            let got = summands.iter().filter(|s| s.is_some()).count();
            if got < 4 {
                return Err(Error::InsufficientShares { needed: 2, got: by_party.len() });
            }
            Ok(summands.iter().fold(0, |acc, s| d.add(acc, s.unwrap())))
        }
    }
}

fn bad_payload(scheme: Scheme) -> Error {
    Error::SchemeMismatch(format!("payload does not match scheme {scheme:?}"))
}

/// Party-local evaluation of `c0 + sum coeff * secret`.
///
/// All shares in `terms` must belong to the same party, scheme and domain.
pub fn local_linear(c0: u128, terms: &[(u128, &Share)]) -> Result<Share> {
    let first = terms.first().ok_or_else(|| Error::Param("empty linear combination".into()))?.1;
    let d = first.domain;
    let lin = |f: &dyn Fn(&Payload) -> Option<Vec<u128>>| -> Result<Vec<u128>> {
        let mut acc: Option<Vec<u128>> = None;
        for &(c, s) in terms {
            if s.domain != d {
                return Err(Error::DomainMismatch(format!("{} vs {}", d, s.domain)));
            }
            if s.scheme != first.scheme || s.party != first.party {
                return Err(Error::SchemeMismatch("terms from different schemes or parties".into()));
            }
            let v = f(&s.payload).ok_or_else(|| bad_payload(s.scheme))?;
            let c = d.reduce(c);
            let scaled: Vec<u128> = v.iter().map(|&x| if first.scheme == Scheme::Xor { if c & 1 == 1 { x } else { 0 } } else { d.mul(c, x) }).collect();
            acc = Some(match acc {
                None => scaled,
                Some(a) => a
                    .iter()
                    .zip(&scaled)
                    .map(|(&x, &y)| if first.scheme == Scheme::Xor { x ^ y } else { d.add(x, y) })
                    .collect(),
            });
        }
        Ok(acc.unwrap())
    };
    let c0 = d.reduce(c0);
    let payload = match first.payload {
        Payload::Single(_) => {
            let v = lin(&|p| if let Payload::Single(x) = p { Some(vec![*x]) } else { None })?[0];
            let v = if first.party == 0 {
                if first.scheme == Scheme::Xor { v ^ c0 } else { d.add(v, c0) }
            } else {
                v
            };
            Payload::Single(v)
        }
        Payload::Pair(..) => {
            let v = lin(&|p| if let Payload::Pair(a, b) = p { Some(vec![*a, *b]) } else { None })?;
            // a_i = v_{i-1} - x, so adding a constant to x lowers every a_i
            Payload::Pair(v[0], d.sub(v[1], c0))
        }
        Payload::Point { z, t, .. } => {
            let v = lin(&|p| if let Payload::Point { y, .. } = p { Some(vec![*y]) } else { None })?[0];
            Payload::Point { z, y: d.add(v, c0), t }
        }
        Payload::Triple(_) => {
            let mut v = lin(&|p| if let Payload::Triple(a) = p { Some(a.to_vec()) } else { None })?;
            // the constant lives in summand x_0, held by every party but P_0
            if first.party != 0 {
                v[0] = d.add(v[0], c0);
            }
            Payload::Triple([v[0], v[1], v[2]])
        }
    };
    Ok(Share { payload, ..first.clone() })
}

fn put_limb(out: &mut Vec<u8>, v: u128, width: usize) {
    out.extend_from_slice(&v.to_le_bytes()[..width]);
}

fn get_limb(bytes: &[u8], pos: &mut usize, width: usize) -> Result<u128> {
    let end = *pos + width;
    let slice = bytes.get(*pos..end).ok_or_else(|| Error::Decode("truncated share".into()))?;
    let mut buf = [0u8; 16];
    buf[..width].copy_from_slice(slice);
    *pos = end;
    Ok(u128::from_le_bytes(buf))
}

impl Share {
    /// Scheme tag (1 byte), party id (2 bytes, little-endian), then the
    /// payload as fixed-width little-endian limbs.
    pub fn encode(&self) -> Vec<u8> {
        let w = self.domain.byte_width();
        let mut out = vec![self.scheme.tag()];
        out.extend_from_slice(&(self.party as u16).to_le_bytes());
        match self.payload {
            Payload::Single(v) => put_limb(&mut out, v, w),
            Payload::Pair(v, a) => {
                put_limb(&mut out, v, w);
                put_limb(&mut out, a, w);
            }
            Payload::Point { z, y, t } => {
                put_limb(&mut out, z, w);
                put_limb(&mut out, y, w);
                out.extend_from_slice(&(t as u16).to_le_bytes());
            }
            Payload::Triple(vs) => vs.iter().for_each(|&v| put_limb(&mut out, v, w)),
        }
        out
    }

    pub fn decode(bytes: &[u8], domain: Domain, n: usize) -> Result<Self> {
        if bytes.len() < 3 {
            return Err(Error::Decode("share header truncated".into()));
        }
        let scheme = Scheme::from_tag(bytes[0])?;
        let party = u16::from_le_bytes([bytes[1], bytes[2]]) as usize;
        let w = domain.byte_width();
        let mut pos = 3;
        let mut limb = || get_limb(bytes, &mut pos, w);
        let payload = match scheme {
            Scheme::Additive | Scheme::Xor => Payload::Single(limb()?),
            Scheme::Rep3 => Payload::Pair(limb()?, limb()?),
            Scheme::Shamir => {
                let (z, y) = (limb()?, limb()?);
                let tb = bytes.get(pos..pos + 2).ok_or_else(|| Error::Decode("truncated threshold".into()))?;
                pos += 2;
                Payload::Point { z, y, t: u16::from_le_bytes([tb[0], tb[1]]) as usize }
            }
            Scheme::Rep4 => Payload::Triple([limb()?, limb()?, limb()?]),
        };
        if pos != bytes.len() {
            return Err(Error::Decode("trailing bytes after share".into()));
        }
        for v in match payload {
            Payload::Single(v) => vec![v],
            Payload::Pair(a, b) => vec![a, b],
            Payload::Point { z, y, .. } => vec![z, y],
            Payload::Triple(t) => t.to_vec(),
        } {
            if !domain.contains(v) {
                return Err(Error::Decode(format!("limb {v} outside {domain}")));
            }
        }
        Ok(Share { scheme, party, n, domain, payload })
    }
}

/// Lagrange weights that recombine Shamir shares of parties `0..m` at zero.
pub fn shamir_weights(parties: &[usize], domain: Domain) -> Result<Vec<u128>> {
    let xs: Vec<u128> = parties.iter().map(|&i| i as u128 + 1).collect();
    lagrange_coefficients(&xs, 0, domain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Prg;

    #[test]
    fn additive_examples() {
        let d = Domain::Prime(11);
        let mut rng = Prg::from_u64(1);
        let s = share_additive(5, 3, d, &mut rng).unwrap();
        assert_eq!(reconstruct(&s).unwrap(), 5);
        assert!(matches!(reconstruct(&s[..2]), Err(Error::InsufficientShares { .. })));
        let d5 = Domain::Prime(5);
        for seed in 0..100 {
            let mut rng = Prg::from_u64(seed);
            for x in 0..5 {
                assert_eq!(reconstruct(&share_additive(x, 2, d5, &mut rng).unwrap()).unwrap(), x);
            }
        }
    }

    #[test]
    fn xor_exhaustive_bytes() {
        let mut rng = Prg::from_u64(2);
        for x in 0..256u128 {
            let s = share_xor(x, 8, 3, &mut rng).unwrap();
            assert_eq!(reconstruct(&s).unwrap(), x);
        }
        let s = share_xor(1, 1, 2, &mut rng).unwrap();
        assert_eq!(reconstruct(&s).unwrap(), 1);
    }

    #[test]
    fn rep3_pairs_reconstruct_and_convert() {
        let d = Domain::Ring(4);
        let mut rng = Prg::from_u64(3);
        for x in 0..16u128 {
            let s = share_rep3(x, d, &mut rng).unwrap();
            for (i, j) in [(0, 1), (1, 2), (0, 2)] {
                assert_eq!(reconstruct(&[s[i].clone(), s[j].clone()]).unwrap(), x);
            }
            // Araki payloads and summand form describe the same sharing.
            let summands: Vec<(u128, u128)> = s
                .iter()
                .map(|sh| {
                    let Payload::Pair(v, a) = sh.payload else { unreachable!() };
                    araki_to_rep3(d, v, a).unwrap()
                })
                .collect();
            for i in 0..3 {
                assert_eq!(summands[i].1, summands[(i + 2) % 3].0);
                let Payload::Pair(v, a) = s[i].payload else { unreachable!() };
                assert_eq!(rep3_to_araki(d, summands[i].0, summands[i].1), (v, a));
            }
            let total = summands.iter().fold(0, |acc, p| d.add(acc, p.0));
            assert_eq!(total, x);
        }
        for x in 0..2u128 {
            let s = share_rep3(x, Domain::Binary, &mut rng).unwrap();
            assert_eq!(reconstruct(&s).unwrap(), x);
            let sm: Vec<_> = s
                .iter()
                .map(|sh| {
                    let Payload::Pair(v, a) = sh.payload else { unreachable!() };
                    araki_to_rep3(Domain::Binary, v, a).unwrap()
                })
                .collect();
            assert_eq!(sm[0].0 ^ sm[1].0 ^ sm[2].0, x);
        }
    }

    #[test]
    fn rep3_detects_tampering() {
        let d = Domain::Ring(8);
        let mut rng = Prg::from_u64(4);
        let mut s = share_rep3(77, d, &mut rng).unwrap();
        if let Payload::Pair(v, a) = s[1].payload {
            s[1].payload = Payload::Pair(v, d.add(a, 1));
        }
        assert!(matches!(reconstruct(&s), Err(Error::InconsistentReplicas)));
    }

    #[test]
    fn shamir_subsets_and_privacy() {
        let d = Domain::Prime(11);
        let mut rng = Prg::from_u64(5);
        let s = share_shamir(7, 3, 2, d, &mut rng).unwrap();
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            assert_eq!(reconstruct(&[s[i].clone(), s[j].clone()]).unwrap(), 7);
        }
        let one = share_shamir(4, 3, 1, d, &mut rng).unwrap();
        assert!(one.iter().all(|s| matches!(s.payload, Payload::Point { y: 4, .. })));
        assert!(share_shamir(1, 3, 4, d, &mut rng).is_err());
        assert!(share_shamir(1, 11, 2, d, &mut rng).is_err());
        // one share (t - 1 = 1) is consistent with every secret in Z_7
        let d7 = Domain::Prime(7);
        let s = share_shamir(3, 3, 2, d7, &mut rng).unwrap();
        let Payload::Point { z, y, .. } = s[0].payload else { unreachable!() };
        for cand in 0..7 {
            let f = Polynomial::interpolate(&[(0, cand), (z, y)], d7).unwrap();
            assert_eq!(f.eval(z), y);
        }
    }

    #[test]
    fn rep4_round_trip() {
        let d = Domain::Ring(8);
        let mut rng = Prg::from_u64(6);
        let s = share_rep4(200, d, &mut rng).unwrap();
        assert_eq!(reconstruct(&s[..2]).unwrap(), 200);
        assert!(matches!(reconstruct(&s[..1]), Err(Error::InsufficientShares { .. })));
    }

    #[test]
    fn linear_combinations() {
        let mut rng = Prg::from_u64(7);
        let d = Domain::Prime(11);
        let shares_of = |x: u128, scheme: Scheme, rng: &mut Prg| match scheme {
            Scheme::Additive => share_additive(x, 3, d, rng).unwrap(),
            Scheme::Rep3 => share_rep3(x, d, rng).unwrap(),
            Scheme::Shamir => share_shamir(x, 3, 2, d, rng).unwrap(),
            Scheme::Rep4 => share_rep4(x, d, rng).unwrap(),
            Scheme::Xor => unreachable!(),
        };
        for scheme in [Scheme::Additive, Scheme::Rep3, Scheme::Shamir, Scheme::Rep4] {
            let x = d.sample(&mut rng);
            let y = d.sample(&mut rng);
            let sx = shares_of(x, scheme, &mut rng);
            let sy = shares_of(y, scheme, &mut rng);
            let sum: Vec<Share> = sx.iter().zip(&sy).map(|(a, b)| local_linear(0, &[(1, a), (1, b)]).unwrap()).collect();
            assert_eq!(reconstruct(&sum).unwrap(), d.add(x, y), "{scheme:?}");
            let c: Vec<Share> = sx.iter().zip(&sy).map(|(a, b)| local_linear(9, &[(0, a), (0, b)]).unwrap()).collect();
            assert_eq!(reconstruct(&c).unwrap(), 9, "{scheme:?}");
            let back: Vec<Share> =
                sx.iter().map(|a| local_linear(0, &[(2, a), (d.neg(1), a)]).unwrap()).collect();
            assert_eq!(reconstruct(&back).unwrap(), x, "{scheme:?}");
        }
    }

    #[test]
    fn mixed_schemes_rejected() {
        let d = Domain::Prime(11);
        let mut rng = Prg::from_u64(8);
        let a = share_additive(1, 3, d, &mut rng).unwrap();
        let b = share_rep3(1, d, &mut rng).unwrap();
        assert!(matches!(reconstruct(&[a[0].clone(), b[1].clone()]), Err(Error::SchemeMismatch(_))));
    }

    #[test]
    fn encoding_round_trip() {
        let d = Domain::Prime(crate::algebra::MERSENNE_61);
        let mut rng = Prg::from_u64(9);
        let all = [
            share_additive(5, 3, d, &mut rng).unwrap(),
            share_rep3(5, d, &mut rng).unwrap(),
            share_shamir(5, 3, 2, d, &mut rng).unwrap(),
            share_rep4(5, d, &mut rng).unwrap(),
        ];
        for shares in all {
            for s in shares {
                let bytes = s.encode();
                assert_eq!(Share::decode(&bytes, d, s.n).unwrap(), s);
            }
        }
        assert!(Share::decode(&[9, 0, 0], d, 3).is_err());
    }
}
