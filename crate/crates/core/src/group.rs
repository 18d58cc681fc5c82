//! Finite abelian groups with a fixed self-dual pairing.
//!
//! Two families are supported:
//! * `Cyclic { modulus: N }` with N prime; the pairing is
//!   `chi_a(x) = e^{2 pi i a x / N}`.
//! * `Vector { base: p, dim: n }`, the group F_p^n with p prime; the pairing
//!   is `chi_a(x) = e^{2 pi i <a, x> / p}` with the mod-p dot product.
//!
//! Elements and characters are both addressed as `u64` indices in
//! `[0, order)`. For vector groups the index encodes little-endian base-p
//! digits, so index arithmetic is digit-wise. The dual group is identified
//! with the group itself through the pairing; "character" below always means
//! such an index.
//!
//! Group order is capped at 2^20 so that every operation in this crate can
//! afford exact enumeration.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{CoreError, Result};

/// Hard cap on group order; constructors refuse anything larger.
pub const MAX_ORDER: u64 = 1 << 20;

/// Deterministic trial-division primality test, adequate for desk scale.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: u64) -> u64 {
    let mut k = n + 1;
    while !is_prime(k) {
        k += 1;
    }
    k
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Group {
    Cyclic { modulus: u64 },
    Vector { base: u64, dim: u32 },
}

/// Builds a cyclic group Z_N with N prime.
pub fn cyclic_group(modulus: u64) -> Result<Group> {
    if !is_prime(modulus) {
        return Err(CoreError::NonPrimeModulus(modulus));
    }
    if modulus > MAX_ORDER {
        return Err(CoreError::OrderTooLarge(modulus, MAX_ORDER));
    }
    Ok(Group::Cyclic { modulus })
}

/// Builds a vector group F_p^n with p prime and n >= 1.
pub fn vector_group(base: u64, dim: u32) -> Result<Group> {
    if dim == 0 {
        return Err(CoreError::DimensionZero);
    }
    if !is_prime(base) {
        return Err(CoreError::NonPrimeModulus(base));
    }
    let mut order: u64 = 1;
    for _ in 0..dim {
        order = order.saturating_mul(base);
        if order > MAX_ORDER {
            return Err(CoreError::OrderTooLarge(order, MAX_ORDER));
        }
    }
    Ok(Group::Vector { base, dim })
}

impl Group {
    pub fn order(&self) -> u64 {
        match self {
            Group::Cyclic { modulus } => *modulus,
            Group::Vector { base, dim } => base.pow(*dim),
        }
    }

    /// Exponent of the pairing's root of unity: N for cyclic, p for vector.
    pub fn pairing_modulus(&self) -> u64 {
        match self {
            Group::Cyclic { modulus } => *modulus,
            Group::Vector { base, .. } => *base,
        }
    }

    pub fn contains(&self, a: u64) -> bool {
        a < self.order()
    }

    pub fn zero(&self) -> u64 {
        0
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        match self {
            Group::Cyclic { modulus } => (a + b) % modulus,
            Group::Vector { base, dim } => {
                let (p, n) = (*base, *dim);
                let mut out = 0u64;
                let mut pw = 1u64;
                let (mut x, mut y) = (a, b);
                for _ in 0..n {
                    let d = (x % p + y % p) % p;
                    out += d * pw;
                    pw *= p;
                    x /= p;
                    y /= p;
                }
                out
            }
        }
    }

    pub fn neg(&self, a: u64) -> u64 {
        match self {
            Group::Cyclic { modulus } => (modulus - a % modulus) % modulus,
            Group::Vector { base, dim } => {
                let (p, n) = (*base, *dim);
                let mut out = 0u64;
                let mut pw = 1u64;
                let mut x = a;
                for _ in 0..n {
                    let d = (p - x % p) % p;
                    out += d * pw;
                    pw *= p;
                    x /= p;
                }
                out
            }
        }
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    /// Reduces a signed integer coefficient into `[0, q)` where q is the
    /// scalar modulus (N for cyclic, p for vector).
    pub fn reduce_scalar(&self, c: i64) -> u64 {
        let q = self.pairing_modulus() as i64;
        (((c % q) + q) % q) as u64
    }

    /// True when `c` acts invertibly, i.e. is nonzero mod the scalar modulus.
    pub fn is_unit_scalar(&self, c: i64) -> bool {
        self.reduce_scalar(c) != 0
    }

    /// Scalar dilation `c * a`. For cyclic groups this is multiplication
    /// mod N; for vector groups it scales every digit mod p.
    pub fn scale(&self, c: i64, a: u64) -> u64 {
        let cu = self.reduce_scalar(c);
        match self {
            Group::Cyclic { modulus } => (cu as u128 * a as u128 % *modulus as u128) as u64,
            Group::Vector { base, dim } => {
                let (p, n) = (*base, *dim);
                let mut out = 0u64;
                let mut pw = 1u64;
                let mut x = a;
                for _ in 0..n {
                    out += (cu * (x % p)) % p * pw;
                    pw *= p;
                    x /= p;
                }
                out
            }
        }
    }

    /// Inverse of a unit scalar mod the scalar modulus.
    pub fn scalar_inverse(&self, c: i64) -> Result<u64> {
        let q = self.pairing_modulus();
        let cu = self.reduce_scalar(c);
        if cu == 0 {
            return Err(CoreError::CoefficientNotUnit(c));
        }
        // q is prime, so Fermat inversion is exact.
        Ok(pow_mod(cu, q - 2, q))
    }

    /// The residue `r in [0, q)` with `chi_a(x) = e^{2 pi i r / q}`.
    pub fn pairing_residue(&self, chi: u64, x: u64) -> u64 {
        match self {
            Group::Cyclic { modulus } => (chi as u128 * x as u128 % *modulus as u128) as u64,
            Group::Vector { base, dim } => {
                let (p, n) = (*base, *dim);
                let mut acc = 0u64;
                let (mut a, mut v) = (chi, x);
                for _ in 0..n {
                    acc = (acc + (a % p) * (v % p)) % p;
                    a /= p;
                    v /= p;
                }
                acc
            }
        }
    }

    /// Character evaluation `chi(x)` as a unit complex number.
    pub fn character(&self, chi: u64, x: u64) -> Complex64 {
        let q = self.pairing_modulus();
        let r = self.pairing_residue(chi, x);
        let theta = 2.0 * PI * (r as f64) / (q as f64);
        Complex64::new(theta.cos(), theta.sin())
    }

    /// `|1 - chi(x)|`, computed as `2 |sin(pi r / q)|` with the residue first
    /// folded into `[0, q/2]` so that x and -x give bit-identical values.
    pub fn char_distance(&self, chi: u64, x: u64) -> f64 {
        let q = self.pairing_modulus();
        let r = self.pairing_residue(chi, x);
        let folded = if r == 0 { 0 } else { r.min(q - r) };
        2.0 * (PI * (folded as f64) / (q as f64)).sin().abs()
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.order()
    }
}

fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc: u128 = 1;
    let mut bb: u128 = (b % m) as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * bb % m as u128;
        }
        bb = bb * bb % m as u128;
        e >>= 1;
    }
    acc as u64
}

/// Validates a user-supplied list of elements: all in range, no repeats.
/// Returns the list sorted ascending.
pub fn checked_set(group: &Group, elements: &[u64]) -> Result<Vec<u64>> {
    let mut out = elements.to_vec();
    out.sort_unstable();
    for w in out.windows(2) {
        if w[0] == w[1] {
            return Err(CoreError::BadElement(w[0]));
        }
    }
    if let Some(&last) = out.last() {
        if !group.contains(last) {
            return Err(CoreError::BadElement(last));
        }
    }
    Ok(out)
}

/// True when the set (given sorted) is symmetric: `x in S => -x in S`.
pub fn is_symmetric_set(group: &Group, sorted: &[u64]) -> bool {
    sorted
        .iter()
        .all(|&x| sorted.binary_search(&group.neg(x)).is_ok())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(
            primes,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
        );
        assert_eq!(next_prime(509), 521);
    }

    #[test]
    fn constructors_enforce_contracts() {
        assert!(cyclic_group(101).is_ok());
        assert!(matches!(
            cyclic_group(100),
            Err(CoreError::NonPrimeModulus(100))
        ));
        assert!(matches!(vector_group(3, 0), Err(CoreError::DimensionZero)));
        assert!(matches!(
            vector_group(4, 2),
            Err(CoreError::NonPrimeModulus(4))
        ));
        assert!(matches!(
            cyclic_group(1_048_583), // first prime above 2^20
            Err(CoreError::OrderTooLarge(..))
        ));
    }

    #[test]
    #[allow(clippy::erasing_op, clippy::identity_op)] // spelled-out base-3 digits
    fn vector_index_arithmetic_is_digitwise() {
        let g = vector_group(3, 4).unwrap();
        // (0,1,2,0) + (2,2,1,1) = (2,0,0,1) little-endian.
        let a = 0 + 1 * 3 + 2 * 9 + 0 * 27;
        let b = 2 + 2 * 3 + 1 * 9 + 1 * 27;
        let s = 2 + 0 * 3 + 0 * 9 + 1 * 27;
        assert_eq!(g.add(a, b), s);
        assert_eq!(g.sub(s, b), a);
        assert_eq!(g.add(a, g.neg(a)), 0);
    }

    #[test]
    fn characters_are_homomorphisms() {
        for g in [cyclic_group(13).unwrap(), vector_group(3, 3).unwrap()] {
            let chi = 5 % g.order();
            for x in [0u64, 1, 7] {
                for y in [2u64, 11] {
                    let lhs = g.character(chi, g.add(x, y));
                    let rhs = g.character(chi, x) * g.character(chi, y);
                    assert!((lhs - rhs).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn char_distance_matches_direct_formula_and_is_even() {
        for g in [cyclic_group(17).unwrap(), vector_group(5, 2).unwrap()] {
            for chi in g.elements() {
                for x in g.elements() {
                    let d = g.char_distance(chi, x);
                    let direct = (Complex64::new(1.0, 0.0) - g.character(chi, x)).norm();
                    assert!((d - direct).abs() < 1e-12);
                    // x and -x must give bit-identical distances.
                    assert_eq!(d.to_bits(), g.char_distance(chi, g.neg(x)).to_bits());
                }
            }
        }
    }

    #[test]
    fn scalar_action() {
        let g = cyclic_group(7).unwrap();
        assert_eq!(g.scale(-2, 3), 1); // -6 = 1 mod 7
        assert_eq!(g.scalar_inverse(3).unwrap(), 5);
        assert!(!g.is_unit_scalar(7));
        let v = vector_group(3, 2).unwrap();
        assert!(v.is_unit_scalar(-2)); // -2 = 1 mod 3
        assert_eq!(v.scale(-2, 4), 4); // identity action digit-wise
    }

    #[test]
    fn checked_set_rejects_duplicates_and_range() {
        let g = cyclic_group(11).unwrap();
        assert!(checked_set(&g, &[1, 2, 2]).is_err());
        assert!(checked_set(&g, &[11]).is_err());
        assert_eq!(checked_set(&g, &[5, 1, 3]).unwrap(), vec![1, 3, 5]);
    }
}
