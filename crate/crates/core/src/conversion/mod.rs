//! Moving secrets between arithmetic and bitwise representations.

pub mod circuits;

use circuits::{add_bits, add_public_bits, carry_save, less_than_public, mux, recompose, xor_fold, xor_public};

use crate::algebra::Domain;
use crate::engine::{Conversion, Session, Sh};
use crate::error::{Error, Result};
use crate::preprocessing::{gen_dabits, gen_edabits};
use crate::sharing::Scheme;

pub(crate) fn low_mask(w: u32) -> u128 {
    if w >= 128 {
        u128::MAX
    } else {
        (1u128 << w) - 1
    }
}

/// Arithmetic sharing whose replicated summands are the given `Z_2`
/// summands read as 0/1 values.
pub(crate) fn embed_summands(s: &Session, b: &Sh) -> Result<Sh> {
    let d = s.arith();
    let mut out = s.empty(d, b.len())?;
    for (o, p) in out.parts.iter_mut().zip(&b.parts) {
        *o = p.iter().map(|&v| d.reduce(v)).collect();
    }
    Ok(out)
}

/// One summand of a replicated sharing as a standalone sharing.
pub(crate) fn only_part(sh: &Sh, j: usize) -> Sh {
    let mut out = sh.scale(0);
    out.parts[j] = sh.parts[j].clone();
    out
}

/// Adds the three summands of a replicated value in binary: each summand
/// becomes a bitwise sharing without communication, then a carry-save step
/// and a ripple adder produce the `w` low bits of the total.
pub(crate) fn replicated_bits(s: &mut Session, parts: &[Vec<u128>], w: u32) -> Result<Vec<Sh>> {
    let len = parts[0].len();
    let zero = s.empty(Domain::Binary, len)?;
    if zero.parts.len() != 3 || parts.len() != 3 {
        return Err(Error::SchemeMismatch("summand-wise conversion needs three-party replication".into()));
    }
    let addend = |j: usize| -> Vec<Sh> {
        (0..w)
            .map(|i| {
                let mut b = zero.clone();
                b.parts[j] = parts[j].iter().map(|&x| (x >> i) & 1).collect();
                b
            })
            .collect()
    };
    let (a, b, c) = (addend(0), addend(1), addend(2));
    let (x, maj) = carry_save(s, &a, &b, &c, w)?;
    let mut shifted = vec![zero];
    shifted.extend(maj.into_iter().take(w as usize - 1));
    Ok(add_bits(s, &x, &shifted, w, false)?.0)
}

/// Bits of a three-party replicated ring value, converted summand-wise.
pub fn a2b_local(s: &mut Session, x: &Sh, w: u32) -> Result<Vec<Sh>> {
    if s.scheme(x.domain)? != Scheme::Rep3 || !matches!(x.domain, Domain::Ring(_)) {
        return Err(Error::SchemeMismatch("local conversion needs a replicated ring sharing".into()));
    }
    replicated_bits(s, &x.parts, w)
}

/// Arithmetic sharings of replicated `Z_2` bits: each summand is embedded
/// locally and the three are combined by arithmetic XOR.
pub fn b2a_local(s: &mut Session, bits: &[Sh]) -> Result<Vec<Sh>> {
    if bits.is_empty() {
        return Ok(Vec::new());
    }
    let len = bits[0].len();
    let all = Sh::concat(&bits.iter().collect::<Vec<_>>());
    if all.parts.len() != 3 {
        return Err(Error::SchemeMismatch("local conversion needs three-party replication".into()));
    }
    let whole = embed_summands(s, &all)?;
    let v = xor_fold(s, (0..3).map(|j| only_part(&whole, j)).collect())?;
    Ok((0..bits.len()).map(|i| v.slice(i * len..(i + 1) * len)).collect())
}

/// Arithmetic sharings of `Z_2` bits, one daBit each.
pub fn b2a_dabit(s: &mut Session, bits: &[Sh]) -> Result<Vec<Sh>> {
    if bits.is_empty() {
        return Ok(Vec::new());
    }
    let len = bits[0].len();
    let all = Sh::concat(&bits.iter().collect::<Vec<_>>());
    let db = gen_dabits(s, all.len())?;
    let c = s.open(&all.add(&db.bin))?;
    let v = xor_public(s, &db.arith, &c)?;
    Ok((0..bits.len()).map(|i| v.slice(i * len..(i + 1) * len)).collect())
}

/// Turns secret bits, in whatever form `to_bits` produced, into arithmetic
/// 0/1 sharings.
pub fn to_arith_bits(s: &mut Session, bits: &[Sh]) -> Result<Vec<Sh>> {
    match bits.first() {
        None => Ok(Vec::new()),
        Some(b) if b.domain != Domain::Binary || s.arith() == Domain::Binary => Ok(bits.to_vec()),
        Some(_) => match s.config().conversion {
            Conversion::Local => b2a_local(s, bits),
            _ => b2a_dabit(s, bits),
        },
    }
}

/// Arithmetic value from its bits.
pub fn from_bits(s: &mut Session, bits: &[Sh]) -> Result<Sh> {
    let ab = to_arith_bits(s, bits)?;
    if ab.is_empty() {
        return Err(Error::Param("no bits to recompose".into()));
    }
    Ok(recompose(&ab))
}

/// Random masks with their bits: `arith = sum 2^i bits[i]` modulo `2^w`, plus
/// a random multiple of `2^w` when the carrier is a wider ring. Over a field
/// the masks are uniform below `p`.
struct Mask {
    arith: Sh,
    bits: Vec<Sh>,
}

fn split_cols(v: &Sh, len: usize, w: usize) -> Vec<Sh> {
    (0..w).map(|i| v.slice(i * len..(i + 1) * len)).collect()
}

/// Bitwise random values from single random bits: daBits or dealer bits.
fn bitwise_masks(s: &mut Session, count: usize, w: u32) -> Result<Mask> {
    let n = count * w as usize;
    let (arith, bits) = match s.config().conversion {
        Conversion::Dabit => {
            let db = gen_dabits(s, n)?;
            (db.arith, db.bin)
        }
        _ => {
            let a = s.deal_bits(s.arith(), n)?;
            (a.clone(), a)
        }
    };
    let arith_cols = split_cols(&arith, count, w as usize);
    Ok(Mask { arith: recompose(&arith_cols), bits: split_cols(&bits, count, w as usize) })
}

fn masks(s: &mut Session, count: usize, w: u32) -> Result<Mask> {
    let d = s.arith();
    let mut m = if s.config().conversion == Conversion::Edabit {
        let e = gen_edabits(s, count, w)?;
        return Ok(Mask { arith: e.arith, bits: e.bits });
    } else if let Domain::Prime(p) = d {
        let mut kept: Option<Mask> = None;
        while kept.as_ref().map_or(0, |k| k.arith.len()) < count {
            let want = count - kept.as_ref().map_or(0, |k| k.arith.len());
            let cand = bitwise_masks(s, 2 * want + 8, w)?;
            let ok = less_than_public(s, &cand.bits, &vec![p; cand.arith.len()])?;
            let ok = s.open(&ok)?;
            let idx: Vec<usize> = ok.iter().enumerate().filter(|(_, &b)| b == 1).map(|(i, _)| i).take(want).collect();
            let pick = Mask { arith: cand.arith.select(&idx), bits: cand.bits.iter().map(|b| b.select(&idx)).collect() };
            kept = Some(match kept {
                None => pick,
                Some(mut k) => {
                    k.arith.append(&pick.arith);
                    for (a, b) in k.bits.iter_mut().zip(&pick.bits) {
                        a.append(b);
                    }
                    k
                }
            });
        }
        kept.unwrap()
    } else {
        bitwise_masks(s, count, w)?
    };
    if matches!(d, Domain::Ring(k) if k > w) {
        let high = s.random(d, count)?;
        m.arith = m.arith.add(&high.scale(1u128 << w));
    }
    Ok(m)
}

/// The low `w` bits of each shared value, least significant first. The
/// configured conversion decides whether the bits come back over `Z_2` or
/// as arithmetic 0/1 sharings.
pub fn to_bits(s: &mut Session, x: &Sh, w: u32) -> Result<Vec<Sh>> {
    let d = s.arith();
    if x.domain != d {
        return Err(Error::DomainMismatch(format!("expected {d}, got {}", x.domain)));
    }
    if d == Domain::Binary {
        return Err(Error::DomainMismatch("values are already bits".into()));
    }
    if w == 0 || w > d.bits() || (matches!(d, Domain::Prime(_)) && w != d.bits()) {
        return Err(Error::Param(format!("cannot take {w} bits of {d}")));
    }
    if s.config().conversion == Conversion::Local {
        return a2b_local(s, x, w);
    }
    let len = x.len();
    let mask = masks(s, len, w)?;
    let c = s.open(&x.sub(&mask.arith))?;
    match d {
        Domain::Prime(p) => {
            // c + r lies below 2p; its top bit against p picks the reduction.
            let top = low_mask(w + 1);
            let zero = mask.bits[0].scale(0);
            let mut r = mask.bits.clone();
            r.push(zero);
            let wide: Vec<Sh> = r.iter().map(|b| b.tile(2)).collect();
            let mut pubs = c.clone();
            pubs.extend(c.iter().map(|&v| v.wrapping_sub(p) & top));
            let (sum, _) = add_public_bits(s, &pubs, &wide, w + 1, 0, false)?;
            let borrow = sum[w as usize].slice(len..2 * len).tile(w as usize);
            let plain = Sh::concat(&sum[..w as usize].iter().map(|b| b.slice(0..len)).collect::<Vec<_>>().iter().collect::<Vec<_>>());
            let reduced = Sh::concat(&sum[..w as usize].iter().map(|b| b.slice(len..2 * len)).collect::<Vec<_>>().iter().collect::<Vec<_>>());
            let out = mux(s, &borrow, &reduced, &plain)?;
            Ok(split_cols(&out, len, w as usize))
        }
        _ => {
            let low: Vec<u128> = c.iter().map(|&v| v & low_mask(w)).collect();
            Ok(add_public_bits(s, &low, &mask.bits, w, 0, false)?.0)
        }
    }
}
