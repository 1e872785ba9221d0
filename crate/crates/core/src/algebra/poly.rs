use rand::RngCore;

use super::Domain;
use crate::error::{Error, Result};

/// Dense polynomial, coefficients in increasing degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    pub coeffs: Vec<u128>,
    pub domain: Domain,
}

impl Polynomial {
    pub fn new(coeffs: Vec<u128>, domain: Domain) -> Self {
        let coeffs = coeffs.into_iter().map(|c| domain.reduce(c)).collect();
        Self { coeffs, domain }
    }

    /// Uniformly random polynomial of degree at most `degree` with the given
    /// constant term.
    pub fn random_with_constant<R: RngCore + ?Sized>(
        constant: u128,
        degree: usize,
        domain: Domain,
        rng: &mut R,
    ) -> Self {
        let mut coeffs = Vec::with_capacity(degree + 1);
        coeffs.push(domain.reduce(constant));
        coeffs.extend((0..degree).map(|_| domain.sample(rng)));
        Self { coeffs, domain }
    }

    /// Degree of the highest non-zero coefficient; the zero polynomial has
    /// degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0).unwrap_or(0)
    }

    pub fn eval(&self, x: u128) -> u128 {
        let d = self.domain;
        let x = d.reduce(x);
        self.coeffs.iter().rev().fold(0, |acc, &c| d.add(d.mul(acc, x), c))
    }

    /// The unique polynomial of degree `< points.len()` through `points`.
    ///
    /// Pairwise differences of the abscissae must be invertible, which in a
    /// ring means they must all be odd.
    pub fn interpolate(points: &[(u128, u128)], domain: Domain) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Ok(Self { coeffs: vec![0], domain });
        }
        let d = domain;
        let xs: Vec<u128> = points.iter().map(|p| d.reduce(p.0)).collect();
        let mut coeffs = vec![0u128; n];
        for (i, &(_, yi)) in points.iter().enumerate() {
            // basis numerator prod_{j != i} (X - x_j), built incrementally
            let mut basis = vec![1u128];
            let mut denom = d.reduce(1);
            for (j, &xj) in xs.iter().enumerate() {
                if j == i {
                    continue;
                }
                let diff = d.sub(xs[i], xj);
                if diff == 0 {
                    return Err(Error::DuplicatePoint);
                }
                denom = d.mul(denom, diff);
                let mut next = vec![0u128; basis.len() + 1];
                for (k, &b) in basis.iter().enumerate() {
                    next[k + 1] = d.add(next[k + 1], b);
                    next[k] = d.sub(next[k], d.mul(b, xj));
                }
                basis = next;
            }
            let scale = d.mul(d.reduce(yi), d.inv(denom)?);
            for (c, b) in coeffs.iter_mut().zip(basis) {
                *c = d.add(*c, d.mul(b, scale));
            }
        }
        Ok(Self { coeffs, domain })
    }
}

/// Coefficients `l_i` with `f(at) = sum_i l_i f(xs[i])` for every `f` of
/// degree `< xs.len()`.
pub fn lagrange_coefficients(xs: &[u128], at: u128, domain: Domain) -> Result<Vec<u128>> {
    let d = domain;
    let mut out = Vec::with_capacity(xs.len());
    for (i, &xi) in xs.iter().enumerate() {
        let mut num = d.reduce(1);
        let mut den = d.reduce(1);
        for (j, &xj) in xs.iter().enumerate() {
            if i == j {
                continue;
            }
            let diff = d.sub(xi, xj);
            if diff == 0 {
                return Err(Error::DuplicatePoint);
            }
            num = d.mul(num, d.sub(at, xj));
            den = d.mul(den, diff);
        }
        out.push(d.mul(num, d.inv(den)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn eval_known() {
        let d = Domain::Prime(31);
        // 3 + 2x + x^2 at 5 = 38 = 7 mod 31
        let f = Polynomial::new(vec![3, 2, 1], d);
        assert_eq!(f.eval(5), 7);
        assert_eq!(f.degree(), 2);
    }

    #[test]
    fn interpolation_round_trip() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for d in [Domain::Prime(31), Domain::Prime(super::super::MERSENNE_61)] {
            for deg in 0..6 {
                let f = Polynomial::random_with_constant(9, deg, d, &mut rng);
                let pts: Vec<_> = (1..=deg as u128 + 1).map(|x| (x, f.eval(x))).collect();
                let g = Polynomial::interpolate(&pts, d).unwrap();
                assert_eq!(g.coeffs, f.coeffs);
                let l = lagrange_coefficients(&pts.iter().map(|p| p.0).collect::<Vec<_>>(), 0, d).unwrap();
                let c = pts.iter().zip(&l).fold(0, |a, (p, li)| d.add(a, d.mul(p.1, *li)));
                assert_eq!(c, 9);
            }
        }
    }

    #[test]
    fn duplicate_points_rejected() {
        let d = Domain::Prime(31);
        assert!(matches!(
            Polynomial::interpolate(&[(1, 2), (32, 3)], d),
            Err(Error::DuplicatePoint)
        ));
    }

    #[test]
    fn ring_interpolation_needs_odd_gaps() {
        let d = Domain::Ring(8);
        let f = Polynomial::new(vec![7, 3], d);
        let g = Polynomial::interpolate(&[(0, f.eval(0)), (1, f.eval(1))], d).unwrap();
        assert_eq!(g, f);
        assert!(matches!(
            Polynomial::interpolate(&[(0, 1), (2, 3)], d),
            Err(Error::NotInvertible)
        ));
    }
}
