use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use super::Domain;

/// Deterministic generator keyed by arbitrary bytes.
///
/// The key is hashed to a 32-byte ChaCha20 seed, so two generators agree on
/// every output exactly when they were built from the same key.
#[derive(Clone, Debug)]
pub struct Prg {
    rng: ChaCha20Rng,
}

impl Prg {
    pub fn new(key: &[u8]) -> Self {
        let seed: [u8; 32] = Sha256::digest(key).into();
        Self { rng: ChaCha20Rng::from_seed(seed) }
    }

    pub fn from_u64(seed: u64) -> Self {
        Self::new(&seed.to_le_bytes())
    }

    /// Independent child stream for `label`.
    pub fn derive(key: &[u8], label: &str) -> Self {
        let mut h = Sha256::new();
        h.update((key.len() as u64).to_le_bytes());
        h.update(key);
        h.update(label.as_bytes());
        Self { rng: ChaCha20Rng::from_seed(h.finalize().into()) }
    }

    pub fn next(&mut self, domain: Domain) -> u128 {
        domain.sample(&mut self.rng)
    }

    pub fn fill(&mut self, domain: Domain, n: usize) -> Vec<u128> {
        (0..n).map(|_| domain.sample(&mut self.rng)).collect()
    }

    pub fn next_nonzero(&mut self, domain: Domain) -> u128 {
        domain.sample_nonzero(&mut self.rng)
    }

    /// Uniform index in `0..bound`.
    pub fn below(&mut self, bound: usize) -> usize {
        assert!(bound > 0);
        let zone = u64::MAX - (u64::MAX % bound as u64);
        loop {
            let v = self.rng.next_u64();
            if v < zone {
                return (v % bound as u64) as usize;
            }
        }
    }

    /// Fisher-Yates permutation of `0..n`.
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = self.below(i + 1);
            p.swap(i, j);
        }
        p
    }

    pub fn rng(&mut self) -> &mut ChaCha20Rng {
        &mut self.rng
    }
}

impl RngCore for Prg {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }
    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

/// `n` uniform elements of `domain` expanded from `seed`.
pub fn prg_sample(seed: &[u8], domain: Domain, n: usize) -> Vec<u128> {
    Prg::new(seed).fill(domain, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let d = Domain::Prime(super::super::MERSENNE_61);
        assert_eq!(prg_sample(b"k", d, 16), prg_sample(b"k", d, 16));
        assert_ne!(prg_sample(b"k", d, 16), prg_sample(b"j", d, 16));
        assert!(prg_sample(b"k", Domain::Ring(5), 100).iter().all(|&v| v < 32));
    }

    fn chi_square(counts: &[u64], total: u64) -> f64 {
        let e = total as f64 / counts.len() as f64;
        counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum()
    }

    #[test]
    fn uniform_over_small_domains() {
        // 30 degrees of freedom for Z_31; the 0.999 quantile is about 59.7.
        let n = 62_000u64;
        let mut counts = vec![0u64; 31];
        for v in prg_sample(b"chi", Domain::Prime(31), n as usize) {
            counts[v as usize] += 1;
        }
        assert!(chi_square(&counts, n) < 59.7);
        // 255 degrees of freedom for Z_2^8; the 0.999 quantile is about 330.5.
        let n = 256_000u64;
        let mut counts = vec![0u64; 256];
        for v in prg_sample(b"chi", Domain::Ring(8), n as usize) {
            counts[v as usize] += 1;
        }
        assert!(chi_square(&counts, n) < 330.5);
    }

    #[test]
    fn permutation_is_bijective() {
        let mut p = Prg::from_u64(1);
        let mut perm = p.permutation(50);
        perm.sort();
        assert_eq!(perm, (0..50).collect::<Vec<_>>());
    }
}
