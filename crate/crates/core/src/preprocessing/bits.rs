use crate::algebra::Domain;
use crate::conversion::circuits::{add_public_bits, add_bits, mux, xor_fold};
use crate::conversion::{embed_summands, only_part, replicated_bits};
use crate::engine::Session;
use crate::engine::Sh;
use crate::error::{Error, Result};
use crate::sharing::Scheme;

/// Sampled and opened from each maliciously generated batch.
const SPOT: usize = 8;

/// The same random bits shared over the arithmetic domain and over `Z_2`.
#[derive(Clone, Debug)]
pub struct DaBits {
    pub arith: Sh,
    pub bin: Sh,
}

/// Random values shared arithmetically together with sharings of their low
/// `m` bits over `Z_2`. `bits[i]` holds bit `i` of every value.
#[derive(Clone, Debug)]
pub struct EdaBits {
    pub arith: Sh,
    pub bits: Vec<Sh>,
}

impl EdaBits {
    pub fn len(&self) -> usize {
        self.arith.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arith.is_empty()
    }

    pub fn select(&self, idx: &[usize]) -> EdaBits {
        EdaBits { arith: self.arith.select(idx), bits: self.bits.iter().map(|b| b.select(idx)).collect() }
    }
}

/// Opens a jointly chosen sample of `SPOT` generated items and checks the
/// two representations agree; returns the untouched remainder.
fn spot_check<T>(s: &mut Session, total: usize, pick: impl Fn(&[usize]) -> T, reveal: impl Fn(&mut Session, &T) -> Result<bool>) -> Result<T> {
    let perm = s.joint()?.permutation(total);
    let sample = pick(&perm[..SPOT]);
    if !reveal(s, &sample)? {
        return Err(Error::Abort("conversion material failed the spot check".into()));
    }
    Ok(pick(&perm[SPOT..]))
}

fn raw_dabits(s: &mut Session, count: usize) -> Result<DaBits> {
    let d = s.arith();
    match s.scheme(Domain::Binary)? {
        Scheme::Additive | Scheme::Xor => {
            let mine = s.local_fill(Domain::Binary, count);
            let bin = Sh { domain: Domain::Binary, parts: vec![mine.clone()], mac: None };
            let me = s.id();
            let mut items = Vec::with_capacity(s.parties());
            for j in 0..s.parties() {
                let v = (j == me).then_some(mine.as_slice());
                items.push(s.input(j, d, v, count)?);
            }
            let arith = xor_fold(s, items)?;
            Ok(DaBits { arith, bin })
        }
        Scheme::Rep3 => {
            let bin = s.random(Domain::Binary, count)?;
            let whole = embed_summands(s, &bin)?;
            let items = (0..3).map(|j| only_part(&whole, j)).collect();
            let arith = xor_fold(s, items)?;
            Ok(DaBits { arith, bin })
        }
        sch => Err(Error::SchemeMismatch(format!("no daBit generation for {sch:?} binary sharing"))),
    }
}

/// Generates `count` daBits from per-party (or per-summand) random bits
/// combined by arithmetic XOR.
pub fn gen_dabits(s: &mut Session, count: usize) -> Result<DaBits> {
    let malicious = s.is_malicious();
    let total = if malicious { count + SPOT } else { count };
    let raw = raw_dabits(s, total)?;
    s.stats.dabits += count as u64;
    if !malicious {
        return Ok(raw);
    }
    spot_check(
        s,
        total,
        |idx| DaBits { arith: raw.arith.select(idx), bin: raw.bin.select(idx) },
        |s, t| {
            let a = s.open(&t.arith)?;
            let b = s.open(&t.bin)?;
            Ok(a == b)
        },
    )
}

/// Bits `i` of each value in `vals`, as a sharing where only slot `j` is set.
fn bit_columns(vals_by_part: &[Vec<u128>], template: &Sh, m: u32) -> Vec<Sh> {
    (0..m)
        .map(|i| {
            let mut sh = template.clone();
            for (p, v) in sh.parts.iter_mut().zip(vals_by_part) {
                *p = v.iter().map(|&x| (x >> i) & 1).collect();
            }
            sh
        })
        .collect()
}

/// Keeps `S mod p` for an `m + 1`-bit binary sum of two values below `p`.
fn reduce_mod_p(s: &mut Session, sum: Vec<Sh>, p: u128, m: u32) -> Result<Vec<Sh>> {
    let len = sum[0].len();
    let q = 0u128.wrapping_sub(p) & crate::conversion::low_mask(m + 1);
    let (diff, _) = add_public_bits(s, &vec![q; len], &sum, m + 1, 0, false)?;
    let keep = diff[m as usize].clone();
    let stretched = keep.tile(m as usize);
    let lo_d = Sh::concat(&diff[..m as usize].iter().collect::<Vec<_>>());
    let lo_s = Sh::concat(&sum[..m as usize].iter().collect::<Vec<_>>());
    let out = mux(s, &stretched, &lo_d, &lo_s)?;
    Ok((0..m as usize).map(|i| out.slice(i * len..(i + 1) * len)).collect())
}

fn raw_edabits(s: &mut Session, count: usize, m: u32) -> Result<EdaBits> {
    let d = s.arith();
    let field = matches!(d, Domain::Prime(_));
    if field && m != d.bits() {
        return Err(Error::Param(format!("field edaBits carry exactly {} bits", d.bits())));
    }
    if !field && m > d.bits() {
        return Err(Error::Param(format!("{m} bits exceed the carrier")));
    }
    let bin_zero = s.empty(Domain::Binary, count)?;
    let (mut arith, bits) = match s.scheme(Domain::Binary)? {
        Scheme::Rep3 => {
            if field {
                return Err(Error::SchemeMismatch("replicated edaBits need a ring".into()));
            }
            let r = s.random(Domain::ring(m)?, count)?;
            let mut arith = s.empty(d, count)?;
            for (o, p) in arith.parts.iter_mut().zip(&r.parts) {
                *o = p.clone();
            }
            let sum = replicated_bits(s, &r.parts, m)?;
            (arith, sum)
        }
        Scheme::Additive | Scheme::Xor => {
            let me = s.id();
            let own_dom = if field { d } else { Domain::ring(m)? };
            let mine = s.local_fill(own_dom, count);
            let mut arith = s.empty(d, count)?;
            let mut acc: Option<Vec<Sh>> = None;
            for j in 0..s.parties() {
                let v = (j == me).then_some(mine.as_slice());
                arith = arith.add(&s.input(j, d, v, count)?);
                let held = if j == me { mine.clone() } else { vec![0; count] };
                let cols = bit_columns(&[held], &bin_zero, m);
                acc = Some(match acc {
                    None => cols,
                    Some(prev) if field => {
                        let (mut sum, carry) = add_bits(s, &prev, &cols, m, true)?;
                        sum.push(carry.unwrap());
                        reduce_mod_p(s, sum, d.order(), m)?
                    }
                    Some(prev) => add_bits(s, &prev, &cols, m, false)?.0,
                });
            }
            (arith, acc.unwrap())
        }
        sch => return Err(Error::SchemeMismatch(format!("no edaBit generation for {sch:?} binary sharing"))),
    };
    if !field && m < d.bits() {
        let high = s.random(d, count)?;
        arith = arith.add(&high.scale(1u128 << m));
    }
    Ok(EdaBits { arith, bits })
}

/// Generates `count` edaBits of width `m`: random summands are converted
/// bitwise and added with binary adders.
pub fn gen_edabits(s: &mut Session, count: usize, m: u32) -> Result<EdaBits> {
    if m == 0 {
        return Err(Error::Param("edaBits need at least one bit".into()));
    }
    let malicious = s.is_malicious();
    let total = if malicious { count + SPOT } else { count };
    let raw = raw_edabits(s, total, m)?;
    s.stats.edabits += count as u64;
    if !malicious {
        return Ok(raw);
    }
    let d = s.arith();
    spot_check(s, total, |idx| raw.select(idx), move |s, t| {
        let a = s.open(&t.arith)?;
        let cols: Vec<Vec<u128>> = t.bits.iter().map(|b| s.open(b)).collect::<Result<_>>()?;
        let low = if m >= 128 { u128::MAX } else { (1u128 << m) - 1 };
        Ok(a.iter().enumerate().all(|(e, &v)| {
            let r: u128 = cols.iter().enumerate().fold(0, |acc, (i, c)| acc | (c[e] << i));
            d.reduce(v) & low == r
        }))
    })
}
