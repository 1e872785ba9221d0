//! Bit circuits over secret bits.
//!
//! A secret bit is either a `Z_2` sharing or a 0/1 value in an arithmetic
//! domain. The formulas below are written with the domain's own `+`, `-`
//! and `*`, which makes them valid in both: over `Z_2`, `a + b - 2ab`
//! collapses to `a ^ b`.
//!
//! Bit vectors are `Vec<Sh>` indexed by bit position, least significant
//! first; each entry holds that bit of every element in the batch.

use crate::engine::{Session, Sh};
use crate::error::{Error, Result};

/// Bit `i` of every public value.
pub fn public_bit(vals: &[u128], i: u32) -> Vec<u128> {
    vals.iter().map(|&v| if i < 128 { (v >> i) & 1 } else { 0 }).collect()
}

/// `a ^ b` given the product `ab`.
pub fn xor_with(a: &Sh, b: &Sh, ab: &Sh) -> Sh {
    a.add(b).sub(&ab.scale(2))
}

/// `a ^ c` for public bits `c`.
pub fn xor_public(s: &Session, a: &Sh, c: &[u128]) -> Result<Sh> {
    let d = a.domain;
    let flip: Vec<u128> = c.iter().map(|&b| d.sub(1, d.mul(2, b))).collect();
    s.add_public(&a.scale_each(&flip), c)
}

pub fn not(s: &Session, a: &Sh) -> Result<Sh> {
    s.public_sub(&vec![1; a.len()], a)
}

/// Elementwise `c ? y : x`.
pub fn mux(s: &mut Session, c: &Sh, x: &Sh, y: &Sh) -> Result<Sh> {
    Ok(x.add(&s.mul(c, &y.sub(x))?))
}

/// Multiplies many pairs in one round.
pub fn mul_many(s: &mut Session, pairs: &[(&Sh, &Sh)]) -> Result<Vec<Sh>> {
    if pairs.is_empty() {
        return Ok(Vec::new());
    }
    let xs: Vec<&Sh> = pairs.iter().map(|p| p.0).collect();
    let ys: Vec<&Sh> = pairs.iter().map(|p| p.1).collect();
    let prod = s.mul(&Sh::concat(&xs), &Sh::concat(&ys))?;
    let mut out = Vec::with_capacity(pairs.len());
    let mut at = 0;
    for (x, _) in pairs {
        out.push(prod.slice(at..at + x.len()));
        at += x.len();
    }
    Ok(out)
}

/// Adds public values `c` to secret bits `r` over `w` bits with a public
/// carry-in, ripple style: one multiplication per bit after the first.
/// Returns the `w` sum bits and, if asked, the carry out.
pub fn add_public_bits(s: &mut Session, c: &[u128], r: &[Sh], w: u32, cin: u128, carry_out: bool) -> Result<(Vec<Sh>, Option<Sh>)> {
    let len = c.len();
    if r.len() < w as usize {
        return Err(Error::Param(format!("adder needs {w} bits, got {}", r.len())));
    }
    let dom = r[0].domain;
    let mut sum = Vec::with_capacity(w as usize);
    let cin_v = vec![cin; len];
    let mut carry: Option<Sh> = None;
    for i in 0..w {
        let a = public_bit(c, i);
        let b = &r[i as usize];
        let (p, x) = match &carry {
            None => (b.scale(cin), xor_public(s, b, &cin_v)?),
            Some(cy) => {
                let p = s.mul(b, cy)?;
                let x = xor_with(b, cy, &p);
                (p, x)
            }
        };
        sum.push(xor_public(s, &x, &a)?);
        let last = i + 1 == w;
        if !last || carry_out {
            carry = Some(p.add(&x.scale_each(&a)));
        }
        debug_assert_eq!(sum[i as usize].domain, dom);
    }
    Ok((sum, if carry_out { carry } else { None }))
}

/// Secret plus secret over `Z_2` sharings: one AND per bit for the carry,
/// using `maj(a, b, c) = ((a ^ c)(b ^ c)) ^ c`.
pub fn add_bits(s: &mut Session, a: &[Sh], b: &[Sh], w: u32, carry_out: bool) -> Result<(Vec<Sh>, Option<Sh>)> {
    if a.first().map(|x| x.domain) != Some(crate::algebra::Domain::Binary) {
        return Err(Error::DomainMismatch("secret adder runs on binary sharings".into()));
    }
    let mut sum = Vec::with_capacity(w as usize);
    let mut carry: Option<Sh> = None;
    for i in 0..w as usize {
        let (x, y) = (&a[i], &b[i]);
        let last = i + 1 == w as usize;
        match &carry {
            None => {
                sum.push(x.add(y));
                if !last || carry_out {
                    carry = Some(s.and(x, y)?);
                }
            }
            Some(c) => {
                sum.push(x.add(y).add(c));
                if !last || carry_out {
                    let t = s.and(&x.add(c), &y.add(c))?;
                    carry = Some(t.add(c));
                }
            }
        }
    }
    Ok((sum, if carry_out { carry } else { None }))
}

/// Carry-save step for three binary addends: per bit the sum `a ^ b ^ c`
/// and the majority, all majorities in one round.
pub fn carry_save(s: &mut Session, a: &[Sh], b: &[Sh], c: &[Sh], w: u32) -> Result<(Vec<Sh>, Vec<Sh>)> {
    let w = w as usize;
    let sum: Vec<Sh> = (0..w).map(|i| a[i].add(&b[i]).add(&c[i])).collect();
    let l: Vec<Sh> = (0..w).map(|i| a[i].add(&c[i])).collect();
    let r: Vec<Sh> = (0..w).map(|i| b[i].add(&c[i])).collect();
    let pairs: Vec<(&Sh, &Sh)> = l.iter().zip(&r).collect();
    let prods = mul_many(s, &pairs)?;
    let maj = prods.iter().zip(c).map(|(p, ci)| p.add(ci)).collect();
    Ok((sum, maj))
}

/// Combines `(lt, eq)` pairs listed from most to least significant with a
/// balanced tree; `eq` of the root is not computed.
fn prefix_less(s: &mut Session, mut level: Vec<(Sh, Sh)>) -> Result<Sh> {
    while level.len() > 1 {
        let root = level.len() == 2;
        let pairs: Vec<(usize, usize)> = (0..level.len() / 2).map(|j| (2 * j, 2 * j + 1)).collect();
        let mut ops: Vec<(&Sh, &Sh)> = Vec::new();
        for &(h, l) in &pairs {
            ops.push((&level[h].1, &level[l].0));
        }
        if !root {
            for &(h, l) in &pairs {
                ops.push((&level[h].1, &level[l].1));
            }
        }
        let prods = mul_many(s, &ops)?;
        let mut next = Vec::with_capacity(level.len().div_ceil(2));
        for (j, &(h, _)) in pairs.iter().enumerate() {
            let lt = level[h].0.add(&prods[j]);
            let eq = if root { lt.clone() } else { prods[pairs.len() + j].clone() };
            next.push((lt, eq));
        }
        if level.len() % 2 == 1 {
            next.push(level.last().unwrap().clone());
        }
        level = next;
    }
    Ok(level.pop().expect("at least one bit").0)
}

/// `[a < b]` for unsigned secret bit vectors of equal width.
pub fn less_than_bits(s: &mut Session, a: &[Sh], b: &[Sh]) -> Result<Sh> {
    let w = a.len();
    if w == 0 || b.len() != w {
        return Err(Error::Param("comparison needs equal nonzero widths".into()));
    }
    let pairs: Vec<(&Sh, &Sh)> = a.iter().zip(b).collect();
    let ab = mul_many(s, &pairs)?;
    let mut leaves = Vec::with_capacity(w);
    for i in (0..w).rev() {
        let lt = b[i].sub(&ab[i]);
        let eq = not(s, &xor_with(&a[i], &b[i], &ab[i]))?;
        leaves.push((lt, eq));
    }
    prefix_less(s, leaves)
}

/// `[r < c]` for secret bits `r` and public values `c`.
pub fn less_than_public(s: &mut Session, r: &[Sh], c: &[u128]) -> Result<Sh> {
    let w = r.len();
    let mut leaves = Vec::with_capacity(w);
    for i in (0..w).rev() {
        let ci = public_bit(c, i as u32);
        let lt = r[i].scale_each(&ci).neg();
        let lt = s.add_public(&lt, &ci)?;
        let eq = not(s, &xor_public(s, &r[i], &ci)?)?;
        leaves.push((lt, eq));
    }
    prefix_less(s, leaves)
}

/// `sum_i 2^i bits[i]` for arithmetic bit sharings.
pub fn recompose(bits: &[Sh]) -> Sh {
    let mut acc = bits[0].scale(0);
    for (i, b) in bits.iter().enumerate() {
        let d = b.domain;
        acc = acc.add(&b.scale(d.reduce(if i < 128 { 1u128 << i } else { 0 })));
    }
    acc
}

/// XOR of a list of shared bits by a balanced tree of multiplications.
pub fn xor_fold(s: &mut Session, mut items: Vec<Sh>) -> Result<Sh> {
    while items.len() > 1 {
        let half = items.len() / 2;
        let pairs: Vec<(&Sh, &Sh)> = (0..half).map(|j| (&items[2 * j], &items[2 * j + 1])).collect();
        let prods = mul_many(s, &pairs)?;
        let mut next: Vec<Sh> = (0..half).map(|j| xor_with(&items[2 * j], &items[2 * j + 1], &prods[j])).collect();
        if items.len() % 2 == 1 {
            next.push(items.pop().unwrap());
        }
        items = next;
    }
    items.pop().ok_or_else(|| Error::Param("nothing to fold".into()))
}
