//! Information-theoretic MACs on additively shared values.
//!
//! A secret `x` carries a tag `m = alpha * x`, both additively shared, with
//! the global key `alpha` additively shared as well. Over `Z_p` the key is a
//! uniform field element. Over rings the values live in `Z_{2^{k+s}}` and the
//! key is drawn from `Z_{2^s}`, so a forgery must guess `alpha` modulo a power
//! of two that the error cannot cancel.

use rand::RngCore;

use crate::algebra::{Domain, Prg};
use crate::error::{Error, Result};
use crate::sharing::{reconstruct, share_additive, Payload, Scheme, Share};

/// Flavor of the MAC domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MacFlavor {
    Field(u128),
    /// Values in `Z_{2^k}` carried in `Z_{2^{k+s}}`, key in `Z_{2^s}`.
    Ring { k: u32, s: u32 },
}

impl MacFlavor {
    /// Domain in which values, tags and key shares are added.
    pub fn domain(&self) -> Result<Domain> {
        match *self {
            MacFlavor::Field(p) => Domain::prime(p),
            MacFlavor::Ring { k, s } => Domain::ring(k + s),
        }
    }

    /// Domain the global key is sampled from.
    pub fn key_domain(&self) -> Domain {
        match *self {
            MacFlavor::Field(p) => Domain::Prime(p),
            MacFlavor::Ring { s, .. } => Domain::Ring(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MacKeyShare {
    pub party: usize,
    pub alpha: u128,
    pub flavor: MacFlavor,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuthShare {
    pub value: Share,
    pub mac: Share,
}

/// Dealer: samples a global key and splits it additively.
pub fn gen_mac_key<R: RngCore + ?Sized>(n: usize, flavor: MacFlavor, rng: &mut R) -> Result<Vec<MacKeyShare>> {
    let alpha = flavor.key_domain().sample(rng);
    share_key(alpha, n, flavor, rng)
}

/// Dealer: splits a chosen key.
pub fn share_key<R: RngCore + ?Sized>(alpha: u128, n: usize, flavor: MacFlavor, rng: &mut R) -> Result<Vec<MacKeyShare>> {
    let d = flavor.domain()?;
    Ok(share_additive(alpha, n, d, rng)?
        .into_iter()
        .map(|s| MacKeyShare { party: s.party, alpha: single(&s), flavor })
        .collect())
}

fn single(s: &Share) -> u128 {
    match s.payload {
        Payload::Single(v) => v,
        _ => unreachable!("additive share"),
    }
}

fn reconstruct_key(keys: &[MacKeyShare]) -> Result<(u128, Domain)> {
    let first = keys.first().ok_or(Error::InsufficientShares { needed: 1, got: 0 })?;
    let d = first.flavor.domain()?;
    let mut alpha = 0;
    for k in keys {
        if k.flavor != first.flavor {
            return Err(Error::DomainMismatch("MAC keys of different flavors".into()));
        }
        alpha = d.add(alpha, k.alpha);
    }
    Ok((alpha, d))
}

/// Dealer: attaches a fresh additive sharing of `alpha * x` to `x_shares`.
pub fn authenticate<R: RngCore + ?Sized>(
    x_shares: &[Share],
    keys: &[MacKeyShare],
    rng: &mut R,
) -> Result<Vec<AuthShare>> {
    let (alpha, d) = reconstruct_key(keys)?;
    for s in x_shares {
        if s.scheme != Scheme::Additive {
            return Err(Error::SchemeMismatch("MACs need additive shares".into()));
        }
        if s.domain != d {
            return Err(Error::DomainMismatch(format!("value in {}, MAC domain {}", s.domain, d)));
        }
    }
    if x_shares.len() != keys.len() {
        return Err(Error::InsufficientShares { needed: keys.len(), got: x_shares.len() });
    }
    let x = reconstruct(x_shares)?;
    let macs = share_additive(d.mul(alpha, x), keys.len(), d, rng)?;
    Ok(x_shares.iter().cloned().zip(macs).map(|(value, mac)| AuthShare { value, mac }).collect())
}

/// An opened value with every party's tag share.
#[derive(Clone, Debug)]
pub struct Opened {
    pub value: u128,
    pub mac_shares: Vec<u128>,
}

fn check_one(o: &Opened, alpha: u128, d: Domain) -> bool {
    let m = o.mac_shares.iter().fold(0, |acc, &v| d.add(acc, v));
    m == d.mul(alpha, d.reduce(o.value))
}

/// Per-value check over `Z_p`: `sum m_i - alpha * x = 0`.
pub fn mac_check_field(opened: &[Opened], keys: &[MacKeyShare]) -> Result<()> {
    let (alpha, d) = reconstruct_key(keys)?;
    if !matches!(d, Domain::Prime(_)) {
        return Err(Error::DomainMismatch(format!("field check over {d}")));
    }
    if opened.iter().all(|o| check_one(o, alpha, d)) {
        Ok(())
    } else {
        Err(Error::Abort("MAC check failed".into()))
    }
}

/// Per-value check over `Z_{2^{k+s}}`.
pub fn mac_check_ring(opened: &[Opened], keys: &[MacKeyShare], k: u32, s: u32) -> Result<()> {
    let (alpha, d) = reconstruct_key(keys)?;
    if d != Domain::Ring(k + s) {
        return Err(Error::DomainMismatch(format!("ring check for k={k}, s={s} over {d}")));
    }
    if opened.iter().all(|o| check_one(o, alpha, d)) {
        Ok(())
    } else {
        Err(Error::Abort("MAC check failed".into()))
    }
}

/// Coefficients for a random linear combination of openings.
///
/// They are drawn from the units of the domain, so a single tampered opening
/// survives exactly when it would survive on its own.
pub fn batch_coefficients(prg: &mut Prg, domain: Domain, count: usize) -> Vec<u128> {
    (0..count)
        .map(|_| match domain {
            Domain::Ring(_) => domain.sample(prg.rng()) | 1,
            _ => prg.next_nonzero(domain),
        })
        .collect()
}

/// One random linear combination checking all `opened` at once. An empty
/// batch is accepted.
pub fn mac_check_batch(opened: &[Opened], keys: &[MacKeyShare], coins: &mut Prg) -> Result<()> {
    if opened.is_empty() {
        return Ok(());
    }
    let (alpha, d) = reconstruct_key(keys)?;
    let chi = batch_coefficients(coins, d, opened.len());
    let n = keys.len();
    let mut y = 0;
    let mut m = vec![0u128; n];
    for (o, &c) in opened.iter().zip(&chi) {
        if o.mac_shares.len() != n {
            return Err(Error::InsufficientShares { needed: n, got: o.mac_shares.len() });
        }
        y = d.add(y, d.mul(c, o.value));
        for (acc, &share) in m.iter_mut().zip(&o.mac_shares) {
            *acc = d.add(*acc, d.mul(c, share));
        }
    }
    let combined = Opened { value: y, mac_shares: m };
    if check_one(&combined, alpha, d) {
        Ok(())
    } else {
        Err(Error::Abort("batched MAC check failed".into()))
    }
}

/// Opens authenticated shares: the value plus every tag share.
pub fn open_auth(shares: &[AuthShare]) -> Result<Opened> {
    let values: Vec<Share> = shares.iter().map(|a| a.value.clone()).collect();
    Ok(Opened { value: reconstruct(&values)?, mac_shares: shares.iter().map(|a| single(&a.mac)).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shares(x: u128, n: usize, d: Domain, rng: &mut Prg) -> Vec<Share> {
        share_additive(x, n, d, rng).unwrap()
    }

    #[test]
    fn authenticate_examples() {
        let mut rng = Prg::from_u64(1);
        let f = MacFlavor::Field(13);
        let keys = share_key(3, 3, f, &mut rng).unwrap();
        let a = authenticate(&shares(4, 3, Domain::Prime(13), &mut rng), &keys, &mut rng).unwrap();
        assert_eq!(open_auth(&a).unwrap().mac_shares.iter().sum::<u128>() % 13, 12);
        let r = MacFlavor::Ring { k: 4, s: 4 };
        let keys = share_key(5, 2, r, &mut rng).unwrap();
        let a = authenticate(&shares(9, 2, Domain::Ring(8), &mut rng), &keys, &mut rng).unwrap();
        assert_eq!(open_auth(&a).unwrap().mac_shares.iter().sum::<u128>() % 256, 45);
        let z = authenticate(&shares(0, 2, Domain::Ring(8), &mut rng), &keys, &mut rng).unwrap();
        assert_eq!(open_auth(&z).unwrap().mac_shares.iter().sum::<u128>() % 256, 0);
    }

    #[test]
    fn honest_openings_accept() {
        let mut rng = Prg::from_u64(2);
        let f = MacFlavor::Field(31);
        let keys = gen_mac_key(3, f, &mut rng).unwrap();
        let opened: Vec<Opened> = (0..50)
            .map(|x| {
                let a = authenticate(&shares(x, 3, Domain::Prime(31), &mut rng), &keys, &mut rng).unwrap();
                open_auth(&a).unwrap()
            })
            .collect();
        mac_check_field(&opened, &keys).unwrap();
        mac_check_batch(&opened, &keys, &mut Prg::from_u64(3)).unwrap();
        mac_check_batch(&[], &keys, &mut Prg::from_u64(3)).unwrap();
    }

    #[test]
    fn field_forgery_enumeration() {
        // delta = 1, epsilon = 0 in Z_5: accepted iff alpha = 0.
        let mut rng = Prg::from_u64(4);
        let f = MacFlavor::Field(5);
        let mut accepted = 0;
        for alpha in 0..5 {
            let keys = share_key(alpha, 2, f, &mut rng).unwrap();
            let a = authenticate(&shares(2, 2, Domain::Prime(5), &mut rng), &keys, &mut rng).unwrap();
            let mut o = open_auth(&a).unwrap();
            o.value = (o.value + 1) % 5;
            if mac_check_field(&[o], &keys).is_ok() {
                accepted += 1;
            }
        }
        assert_eq!(accepted, 1);
    }

    #[test]
    fn ring_forgery_counts_are_powers_of_two() {
        let (k, s) = (4, 4);
        let d = Domain::Ring(k + s);
        let flavor = MacFlavor::Ring { k, s };
        let mut rng = Prg::from_u64(5);
        for v in 0..4u32 {
            let delta = 3u128 << v;
            let guess = 7u128;
            let eps = d.mul(guess, delta);
            let mut accepted = 0;
            for alpha in 0..256u128 {
                let keys = share_key(alpha, 2, flavor, &mut rng).unwrap();
                let a = authenticate(&shares(6, 2, d, &mut rng), &keys, &mut rng).unwrap();
                let mut o = open_auth(&a).unwrap();
                o.value = d.add(o.value, delta);
                o.mac_shares[0] = d.add(o.mac_shares[0], eps);
                if mac_check_ring(&[o], &keys, k, s).is_ok() {
                    accepted += 1;
                }
            }
            assert_eq!(accepted, 1 << v);
        }
    }
}
