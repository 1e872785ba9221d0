//! Exact arithmetic over prime fields `Z_p`, power-of-two rings `Z_{2^k}`
//! and bits `Z_2`.
//!
//! Every value is stored as a `u128` and reduced explicitly by its
//! [`Domain`]. Prime moduli are limited to `p < 2^127` so that the
//! reduction of a double-width product never overflows; the 127-bit
//! Mersenne prime is the largest supported modulus and has a dedicated
//! fast path.

mod poly;
mod prg;

pub use poly::{lagrange_coefficients, Polynomial};
pub use prg::{prg_sample, Prg};

use std::fmt;

use crate::error::{Error, Result};

/// `2^61 - 1`, the default modulus for 64-bit field runs.
pub const MERSENNE_61: u128 = (1 << 61) - 1;
/// `2^127 - 1`, the default modulus for 128-bit field runs.
pub const MERSENNE_127: u128 = (1 << 127) - 1;

const LOW64: u128 = u64::MAX as u128;

/// The algebraic structure a value lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Domain {
    /// `Z_p` for a prime `p < 2^127`.
    Prime(u128),
    /// `Z_{2^k}` with `1 <= k <= 128`.
    Ring(u32),
    /// `Z_2`, where addition is XOR and multiplication is AND.
    Binary,
}

impl Domain {
    pub fn prime(p: u128) -> Result<Self> {
        if p < 2 || p > MERSENNE_127 || !is_prime(p) {
            return Err(Error::Param(format!("{p} is not a supported prime")));
        }
        Ok(Domain::Prime(p))
    }

    pub fn ring(k: u32) -> Result<Self> {
        if !(1..=128).contains(&k) {
            return Err(Error::Param(format!("ring width {k} outside 1..=128")));
        }
        Ok(Domain::Ring(k))
    }

    /// Number of bits needed to write any element.
    pub fn bits(&self) -> u32 {
        match *self {
            Domain::Prime(p) => 128 - (p - 1).leading_zeros().min(127),
            Domain::Ring(k) => k,
            Domain::Binary => 1,
        }
    }

    /// Width of one element in the fixed-width little-endian wire encoding.
    pub fn byte_width(&self) -> usize {
        self.bits().div_ceil(8) as usize
    }

    /// Number of elements, saturating at `u128::MAX` for `Z_{2^128}`.
    pub fn order(&self) -> u128 {
        match *self {
            Domain::Prime(p) => p,
            Domain::Ring(128) => u128::MAX,
            Domain::Ring(k) => 1 << k,
            Domain::Binary => 2,
        }
    }

    pub fn is_field(&self) -> bool {
        matches!(self, Domain::Prime(_) | Domain::Binary)
    }

    pub fn contains(&self, v: u128) -> bool {
        match *self {
            Domain::Prime(p) => v < p,
            Domain::Ring(k) => k == 128 || v >> k == 0,
            Domain::Binary => v < 2,
        }
    }

    #[inline]
    pub fn reduce(&self, v: u128) -> u128 {
        match *self {
            Domain::Prime(p) => v % p,
            Domain::Ring(k) => v & ring_mask(k),
            Domain::Binary => v & 1,
        }
    }

    /// Embeds a signed integer.
    pub fn from_i128(&self, v: i128) -> u128 {
        if v >= 0 {
            self.reduce(v as u128)
        } else {
            self.neg(self.reduce(v.unsigned_abs()))
        }
    }

    #[inline]
    pub fn add(&self, a: u128, b: u128) -> u128 {
        match *self {
            Domain::Prime(p) => {
                let (s, carry) = a.overflowing_add(b);
                if carry || s >= p {
                    s.wrapping_sub(p)
                } else {
                    s
                }
            }
            Domain::Ring(k) => a.wrapping_add(b) & ring_mask(k),
            Domain::Binary => a ^ b,
        }
    }

    #[inline]
    pub fn sub(&self, a: u128, b: u128) -> u128 {
        match *self {
            Domain::Prime(p) => {
                if a >= b {
                    a - b
                } else {
                    p - (b - a)
                }
            }
            Domain::Ring(k) => a.wrapping_sub(b) & ring_mask(k),
            Domain::Binary => a ^ b,
        }
    }

    #[inline]
    pub fn neg(&self, a: u128) -> u128 {
        self.sub(0, a)
    }

    #[inline]
    pub fn mul(&self, a: u128, b: u128) -> u128 {
        match *self {
            Domain::Prime(p) => mul_mod(a, b, p),
            Domain::Ring(k) => a.wrapping_mul(b) & ring_mask(k),
            Domain::Binary => a & b,
        }
    }

    pub fn pow(&self, mut base: u128, mut exp: u128) -> u128 {
        let mut acc = self.reduce(1);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse: non-zero field elements and odd ring elements.
    pub fn inv(&self, a: u128) -> Result<u128> {
        match *self {
            Domain::Prime(p) => {
                if a % p == 0 {
                    return Err(Error::NotInvertible);
                }
                Ok(self.pow(a, p - 2))
            }
            Domain::Ring(k) => {
                if a & 1 == 0 {
                    return Err(Error::NotInvertible);
                }
                // Newton iteration doubles the number of correct low bits;
                // an odd a is its own inverse mod 8.
                let mut x = a;
                for _ in 0..7 {
                    x = x.wrapping_mul(2u128.wrapping_sub(a.wrapping_mul(x)));
                }
                Ok(x & ring_mask(k))
            }
            Domain::Binary => {
                if a & 1 == 0 {
                    Err(Error::NotInvertible)
                } else {
                    Ok(1)
                }
            }
        }
    }

    /// Uniform sample.
    pub fn sample<R: rand::RngCore + ?Sized>(&self, rng: &mut R) -> u128 {
        match *self {
            Domain::Prime(p) => {
                let bits = self.bits();
                let mask = if bits == 128 { u128::MAX } else { (1u128 << bits) - 1 };
                loop {
                    let v = random_u128(rng) & mask;
                    if v < p {
                        return v;
                    }
                }
            }
            Domain::Ring(k) => random_u128(rng) & ring_mask(k),
            Domain::Binary => (rng.next_u32() & 1) as u128,
        }
    }

    /// Uniform sample from the non-zero elements (fields only).
    pub fn sample_nonzero<R: rand::RngCore + ?Sized>(&self, rng: &mut R) -> u128 {
        loop {
            let v = self.sample(rng);
            if v != 0 {
                return v;
            }
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Prime(p) => write!(f, "Z_{p}"),
            Domain::Ring(k) => write!(f, "Z_2^{k}"),
            Domain::Binary => write!(f, "Z_2"),
        }
    }
}

#[inline]
pub fn ring_mask(k: u32) -> u128 {
    if k >= 128 {
        u128::MAX
    } else {
        (1u128 << k) - 1
    }
}

pub(crate) fn random_u128<R: rand::RngCore + ?Sized>(rng: &mut R) -> u128 {
    ((rng.next_u64() as u128) << 64) | rng.next_u64() as u128
}

/// Full 256-bit product as `(hi, lo)`.
#[inline]
fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    let (a1, a0) = (a >> 64, a & LOW64);
    let (b1, b0) = (b >> 64, b & LOW64);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & LOW64) + (p10 & LOW64);
    let lo = (p00 & LOW64) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

#[inline]
fn mul_mod(a: u128, b: u128, p: u128) -> u128 {
    if p <= LOW64 {
        return (a * b) % p;
    }
    let (hi, lo) = mul_wide(a, b);
    if p == MERSENNE_127 {
        // 2^127 = 1 (mod p)
        let top = (hi << 1) | (lo >> 127);
        let mut s = top + (lo & MERSENNE_127);
        s = (s & MERSENNE_127) + (s >> 127);
        if s >= p {
            s -= p;
        }
        return s;
    }
    let mut r = hi % p;
    for i in (0..128).rev() {
        r = (r << 1) | ((lo >> i) & 1);
        if r >= p {
            r -= p;
        }
    }
    r
}

/// Miller-Rabin with the first twelve prime bases; deterministic below
/// 3.3e24 and overwhelmingly reliable above.
pub fn is_prime(n: u128) -> bool {
    const BASES: [u128; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n == b {
            return true;
        }
        if n % b == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d & 1 == 0 {
        d >>= 1;
        r += 1;
    }
    let pow = |mut base: u128, mut e: u128| {
        let mut acc = 1u128;
        base %= n;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(acc, base, n);
            }
            base = mul_mod(base, base, n);
            e >>= 1;
        }
        acc
    };
    'outer: for &a in &BASES {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Kind tag of [`DomainParams`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainKind {
    PrimeField,
    Ring,
    Binary,
}

/// A domain together with the statistical security parameter `s` used by
/// ring MACs and masked ring inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DomainParams {
    pub domain: Domain,
    pub s: u32,
}

pub const DEFAULT_STAT_SEC: u32 = 40;

impl DomainParams {
    pub fn prime_field(p: u128) -> Result<Self> {
        Ok(Self { domain: Domain::prime(p)?, s: DEFAULT_STAT_SEC })
    }

    pub fn ring(k: u32) -> Result<Self> {
        if !(2..=128).contains(&k) {
            return Err(Error::Param(format!("ring width {k} outside 2..=128")));
        }
        Ok(Self { domain: Domain::Ring(k), s: DEFAULT_STAT_SEC })
    }

    pub fn binary() -> Self {
        Self { domain: Domain::Binary, s: DEFAULT_STAT_SEC }
    }

    pub fn with_stat_sec(mut self, s: u32) -> Result<Self> {
        if !(1..=64).contains(&s) {
            return Err(Error::Param(format!("statistical parameter {s} outside 1..=64")));
        }
        self.s = s;
        Ok(self)
    }

    pub fn kind(&self) -> DomainKind {
        match self.domain {
            Domain::Prime(_) => DomainKind::PrimeField,
            Domain::Ring(_) => DomainKind::Ring,
            Domain::Binary => DomainKind::Binary,
        }
    }

    pub fn modulus_p(&self) -> Option<u128> {
        match self.domain {
            Domain::Prime(p) => Some(p),
            _ => None,
        }
    }

    pub fn k(&self) -> Option<u32> {
        match self.domain {
            Domain::Ring(k) => Some(k),
            _ => None,
        }
    }

    /// The MAC-extended ring `Z_{2^{k+s}}` for ring domains.
    pub fn extended(&self) -> Result<Domain> {
        match self.domain {
            Domain::Ring(k) if k + self.s <= 128 => Ok(Domain::Ring(k + self.s)),
            Domain::Ring(k) => Err(Error::Param(format!(
                "extended ring Z_2^{} exceeds the 128-bit representation",
                k + self.s
            ))),
            d => Err(Error::DomainMismatch(format!("{d} has no extended ring"))),
        }
    }
}

/// A reduced value tagged with its domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DomainElement {
    value: u128,
    domain: Domain,
}

impl DomainElement {
    /// Reduces `value` into `domain`.
    pub fn new(value: u128, domain: Domain) -> Self {
        Self { value: domain.reduce(value), domain }
    }

    pub fn zero(domain: Domain) -> Self {
        Self { value: 0, domain }
    }

    pub fn value(&self) -> u128 {
        self.value
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    fn same(&self, other: &Self) -> Result<Domain> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch(format!("{} vs {}", self.domain, other.domain)));
        }
        Ok(self.domain)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let d = self.same(other)?;
        Ok(Self { value: d.add(self.value, other.value), domain: d })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let d = self.same(other)?;
        Ok(Self { value: d.sub(self.value, other.value), domain: d })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let d = self.same(other)?;
        Ok(Self { value: d.mul(self.value, other.value), domain: d })
    }

    pub fn neg(&self) -> Self {
        Self { value: self.domain.neg(self.value), domain: self.domain }
    }

    pub fn inv(&self) -> Result<Self> {
        Ok(Self { value: self.domain.inv(self.value)?, domain: self.domain })
    }
}

impl fmt::Display for DomainElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in {}", self.value, self.domain)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Neg,
    Inv,
}

/// Applies a unary or binary operation; `b` is ignored by `Neg`/`Inv`.
pub fn element_arith(op: ArithOp, a: DomainElement, b: Option<DomainElement>) -> Result<DomainElement> {
    let rhs = || b.ok_or_else(|| Error::Param("binary operation without right operand".into()));
    match op {
        ArithOp::Add => a.add(&rhs()?),
        ArithOp::Sub => a.sub(&rhs()?),
        ArithOp::Mul => a.mul(&rhs()?),
        ArithOp::Neg => Ok(a.neg()),
        ArithOp::Inv => a.inv(),
    }
}

/// Little-endian binary expansion of `x` into `m` bits.
pub fn bit_decompose_plain(x: u128, m: u32) -> Result<Vec<u8>> {
    if m < 128 && x >> m != 0 {
        return Err(Error::Overflow { value: x, bits: m });
    }
    Ok((0..m).map(|i| if i < 128 { ((x >> i) & 1) as u8 } else { 0 }).collect())
}

pub fn bit_recompose(bits: &[u8]) -> u128 {
    bits.iter().enumerate().fold(0u128, |acc, (i, &b)| acc | ((b as u128 & 1) << i))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(v: u128, d: Domain) -> DomainElement {
        DomainElement::new(v, d)
    }

    #[test]
    fn small_examples() {
        let z7 = Domain::prime(7).unwrap();
        assert_eq!(element_arith(ArithOp::Add, el(3, z7), Some(el(5, z7))).unwrap().value(), 1);
        // brute force oracle for the inverse of 3 mod 7
        let oracle = (1..7).find(|x| (3 * x) % 7 == 1).unwrap();
        assert_eq!(oracle, 5);
        assert_eq!(element_arith(ArithOp::Inv, el(3, z7), None).unwrap().value(), oracle);
        let z16 = Domain::ring(4).unwrap();
        assert!(matches!(el(4, z16).inv(), Err(Error::NotInvertible)));
        assert!(matches!(el(0, z7).inv(), Err(Error::NotInvertible)));
    }

    #[test]
    fn domain_mismatch() {
        let a = el(1, Domain::Prime(7));
        let b = el(1, Domain::Ring(4));
        assert!(matches!(a.add(&b), Err(Error::DomainMismatch(_))));
    }

    #[test]
    fn field_axioms_exhaustive() {
        for p in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
            let d = Domain::prime(p).unwrap();
            for a in 0..p {
                if a != 0 {
                    assert_eq!(d.mul(a, d.inv(a).unwrap()), 1, "p={p} a={a}");
                }
                for b in 0..p {
                    assert_eq!(d.add(a, b), (a + b) % p);
                    assert_eq!(d.mul(a, b), (a * b) % p);
                    for c in 0..p {
                        assert_eq!(d.mul(a, d.mul(b, c)), d.mul(d.mul(a, b), c));
                        assert_eq!(d.add(a, d.add(b, c)), d.add(d.add(a, b), c));
                        assert_eq!(d.mul(a, d.add(b, c)), d.add(d.mul(a, b), d.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn ring_units_are_the_odd_half() {
        for k in 1..=8u32 {
            let d = Domain::Ring(k);
            let units = (0..1u128 << k).filter(|&a| d.inv(a).is_ok()).count();
            assert_eq!(units, 1 << (k - 1));
            for a in (1..1u128 << k).step_by(2) {
                assert_eq!(d.mul(a, d.inv(a).unwrap()), 1);
            }
        }
        let d = Domain::Ring(128);
        let a = 0x1234_5678_9abc_def1_u128 | (7 << 100);
        assert_eq!(d.mul(a, d.inv(a).unwrap()), 1);
    }

    #[test]
    fn mersenne_reduction_matches_generic() {
        let p = MERSENNE_127;
        let samples = [0u128, 1, 2, p - 1, p - 2, 1 << 126, (1 << 126) + 12345, 0xdead_beef_cafe_babe_1234];
        for &a in &samples {
            for &b in &samples {
                let fast = mul_mod(a, b, p);
                let (hi, lo) = mul_wide(a, b);
                let mut r = hi % p;
                for i in (0..128).rev() {
                    r = (r << 1) | ((lo >> i) & 1);
                    if r >= p {
                        r -= p;
                    }
                }
                assert_eq!(fast, r);
            }
        }
        let d = Domain::prime(p).unwrap();
        let x = 0x0123_4567_89ab_cdef_0011_2233_4455u128;
        assert_eq!(d.mul(x, d.inv(x).unwrap()), 1);
    }

    #[test]
    fn primality() {
        assert!(is_prime(MERSENNE_61));
        assert!(is_prime(MERSENNE_127));
        assert!(!is_prime((1 << 61) + 1));
        assert!(Domain::prime(15).is_err());
        let naive = |n: u128| n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
        for n in 0..2000u128 {
            assert_eq!(is_prime(n), naive(n), "{n}");
        }
    }

    #[test]
    fn params_invariants() {
        assert!(DomainParams::ring(1).is_err());
        assert!(DomainParams::ring(129).is_err());
        assert!(DomainParams::ring(64).unwrap().with_stat_sec(0).is_err());
        let p = DomainParams::ring(64).unwrap().with_stat_sec(40).unwrap();
        assert_eq!(p.extended().unwrap(), Domain::Ring(104));
        assert!(DomainParams::ring(128).unwrap().extended().is_err());
    }

    #[test]
    fn bit_decomposition() {
        assert_eq!(bit_decompose_plain(5, 4).unwrap(), vec![1, 0, 1, 0]);
        assert_eq!(bit_decompose_plain(0, 6).unwrap(), vec![0; 6]);
        assert!(matches!(bit_decompose_plain(16, 4), Err(Error::Overflow { .. })));
        for x in 0..256u128 {
            assert_eq!(bit_recompose(&bit_decompose_plain(x, 8).unwrap()), x);
        }
    }
}
