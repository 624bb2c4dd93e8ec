//! GF(2^m) arithmetic backed by log/antilog tables, plus binary polynomials
//! over GF(2). Field elements are bitmasks in polynomial basis (bit i is the
//! coefficient of x^i).

use thiserror::Error;

/// Errors from field construction and arithmetic.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("polynomial {poly:#x} does not generate the full multiplicative group of GF(2^{m})")]
    NotPrimitive { m: u32, poly: u32 },
    #[error("extension degree {0} out of supported range 2..=12")]
    UnsupportedDegree(u32),
    #[error("polynomial {poly:#x} does not have degree {m}")]
    DegreeMismatch { m: u32, poly: u32 },
    #[error("division by zero")]
    DivisionByZero,
}

/// Default primitive polynomials per extension degree m = 2..=12.
const DEFAULT_PRIMITIVE_POLY: [u32; 11] = [
    0b111,             // m=2:  x^2+x+1
    0b1011,            // m=3:  x^3+x+1
    0b1_0011,          // m=4:  x^4+x+1
    0b10_0101,         // m=5:  x^5+x^2+1
    0b100_0011,        // m=6:  x^6+x+1
    0b1000_1001,       // m=7:  x^7+x^3+1
    0b1_0001_1101,     // m=8:  x^8+x^4+x^3+x^2+1
    0b10_0001_0001,    // m=9:  x^9+x^4+1
    0b100_0000_1001,   // m=10: x^10+x^3+1
    0b1000_0000_0101,  // m=11: x^11+x^2+1
    0b1_0000_0101_0011 // m=12: x^12+x^6+x^4+x+1
];

/// Log/antilog tables for GF(2^m), immutable after construction.
#[derive(Debug, Clone)]
pub struct FieldTables {
    m: u32,
    primitive_poly: u32,
    /// Multiplicative group order, 2^m - 1.
    order: usize,
    /// log[x] for nonzero x; log[0] is a sentinel and must never be read.
    log: Vec<u32>,
    /// antilog[i] = alpha^i, stored for i in 0..2*(2^m-1) so that sums of two
    /// logs index directly without a reduction.
    antilog: Vec<u32>,
}

impl FieldTables {
    /// Builds tables for GF(2^m) from a degree-m primitive polynomial.
    ///
    /// Fails with `NotPrimitive` if x does not have multiplicative order
    /// 2^m - 1 modulo the polynomial, which is equivalent to the polynomial
    /// being primitive.
    pub fn new(m: u32, primitive_poly: u32) -> Result<Self, FieldError> {
        if !(2..=12).contains(&m) {
            return Err(FieldError::UnsupportedDegree(m));
        }
        if 32 - primitive_poly.leading_zeros() != m + 1 {
            return Err(FieldError::DegreeMismatch {
                m,
                poly: primitive_poly,
            });
        }
        let size = 1usize << m;
        let order = size - 1;
        let mut log = vec![u32::MAX; size];
        let mut antilog = vec![0u32; 2 * order];
        let mut x = 1u32;
        for i in 0..order {
            if x == 0 || log[x as usize] != u32::MAX {
                // Hit zero (poly divisible by x) or cycled early.
                return Err(FieldError::NotPrimitive {
                    m,
                    poly: primitive_poly,
                });
            }
            antilog[i] = x;
            antilog[i + order] = x;
            log[x as usize] = i as u32;
            x <<= 1;
            if x & (1 << m) != 0 {
                x ^= primitive_poly;
            }
        }
        if x != 1 {
            return Err(FieldError::NotPrimitive {
                m,
                poly: primitive_poly,
            });
        }
        Ok(Self {
            m,
            primitive_poly,
            order,
            log,
            antilog,
        })
    }

    /// Tables for GF(2^m) with the crate's pinned default primitive polynomial.
    pub fn with_default_poly(m: u32) -> Result<Self, FieldError> {
        if !(2..=12).contains(&m) {
            return Err(FieldError::UnsupportedDegree(m));
        }
        Self::new(m, DEFAULT_PRIMITIVE_POLY[(m - 2) as usize])
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn primitive_poly(&self) -> u32 {
        self.primitive_poly
    }

    /// Number of field elements, 2^m.
    pub fn num_elements(&self) -> usize {
        self.order + 1
    }

    /// Multiplicative group order, 2^m - 1.
    pub fn group_order(&self) -> usize {
        self.order
    }

    /// alpha^e for any non-negative exponent.
    #[inline]
    pub fn alpha_pow(&self, e: usize) -> u32 {
        self.antilog[e % self.order]
    }

    /// Discrete log of a nonzero element.
    #[inline]
    pub fn log(&self, a: u32) -> Option<u32> {
        if a == 0 {
            None
        } else {
            Some(self.log[a as usize])
        }
    }

    /// Product in GF(2^m).
    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.antilog[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    /// Multiplicative inverse; `DivisionByZero` on zero input.
    #[inline]
    pub fn inv(&self, a: u32) -> Result<u32, FieldError> {
        if a == 0 {
            return Err(FieldError::DivisionByZero);
        }
        let l = self.log[a as usize] as usize;
        Ok(self.antilog[(self.order - l) % self.order])
    }

    /// a^e by exponent arithmetic on logs.
    pub fn pow(&self, a: u32, e: usize) -> u32 {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let l = self.log[a as usize] as usize;
        self.antilog[(l * e) % self.order]
    }

    /// Squaring, the Frobenius map.
    #[inline]
    pub fn square(&self, a: u32) -> u32 {
        self.mul(a, a)
    }

    /// Minimal polynomial of alpha^power over GF(2): the product of
    /// (x + alpha^c) over the conjugacy class c = power * 2^j mod (2^m - 1).
    pub fn minimal_polynomial(&self, power: usize) -> BinaryPolynomial {
        let class = self.conjugacy_class(power);
        // Multiply out with coefficients in GF(2^m); the result is fixed by
        // Frobenius, so every coefficient lands in {0, 1}.
        let mut coeffs: Vec<u32> = vec![1];
        for &c in &class {
            let root = self.alpha_pow(c);
            let mut next = vec![0u32; coeffs.len() + 1];
            for (i, &co) in coeffs.iter().enumerate() {
                next[i + 1] ^= co;
                next[i] ^= self.mul(co, root);
            }
            coeffs = next;
        }
        debug_assert!(coeffs.iter().all(|&c| c <= 1));
        BinaryPolynomial::from_bits(coeffs.iter().map(|&c| c as u8).collect())
    }

    /// Cyclotomic coset of `power` modulo 2^m - 1, sorted ascending.
    pub fn conjugacy_class(&self, power: usize) -> Vec<usize> {
        let mut class = Vec::new();
        let mut c = power % self.order;
        loop {
            class.push(c);
            c = (c * 2) % self.order;
            if c == power % self.order {
                break;
            }
        }
        class.sort_unstable();
        class
    }
}

/// Polynomial over GF(2), coefficient bits stored lowest degree first with no
/// trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryPolynomial {
    bits: Vec<u8>,
}

impl BinaryPolynomial {
    pub fn zero() -> Self {
        Self { bits: Vec::new() }
    }

    pub fn one() -> Self {
        Self { bits: vec![1] }
    }

    /// From coefficient bits, lowest degree first (values 0/1).
    pub fn from_bits(mut bits: Vec<u8>) -> Self {
        while bits.last() == Some(&0) {
            bits.pop();
        }
        Self { bits }
    }

    /// From a bitmask, bit i holding the coefficient of x^i.
    pub fn from_mask(mask: u64) -> Self {
        Self::from_bits((0..64).map(|i| ((mask >> i) & 1) as u8).collect())
    }

    /// As a bitmask; only valid up to degree 63.
    pub fn to_mask(&self) -> u64 {
        assert!(self.bits.len() <= 64, "polynomial degree exceeds u64 mask");
        self.bits
            .iter()
            .enumerate()
            .fold(0u64, |m, (i, &b)| m | ((b as u64) << i))
    }

    pub fn is_zero(&self) -> bool {
        self.bits.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.bits.len().checked_sub(1)
    }

    /// Coefficient bits, lowest degree first.
    pub fn coefficients(&self) -> &[u8] {
        &self.bits
    }

    pub fn coefficient(&self, i: usize) -> u8 {
        self.bits.get(i).copied().unwrap_or(0)
    }

    /// Product over GF(2).
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![0u8; self.bits.len() + other.bits.len() - 1];
        for (i, &a) in self.bits.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.bits.iter().enumerate() {
                out[i + j] ^= b;
            }
        }
        Self::from_bits(out)
    }

    /// Evaluation at a GF(2^m) element.
    pub fn eval(&self, tables: &FieldTables, x: u32) -> u32 {
        let mut acc = 0u32;
        for &b in self.bits.iter().rev() {
            acc = tables.mul(acc, x) ^ b as u32;
        }
        acc
    }
}

impl std::fmt::Display for BinaryPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .bits
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &b)| b == 1)
            .map(|(i, _)| match i {
                0 => "1".to_string(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf16() -> FieldTables {
        FieldTables::new(4, 0b1_0011).unwrap()
    }

    #[test]
    fn gf16_antilog_matches_schoolbook() {
        let t = gf16();
        // alpha^4 = alpha + 1 under x^4 + x + 1.
        assert_eq!(t.alpha_pow(4), 0b0011);
        assert_eq!(t.alpha_pow(0), 1);
        assert_eq!(t.alpha_pow(15), 1); // period 2^m - 1
    }

    #[test]
    fn non_primitive_poly_rejected() {
        // x^4 + x^3 + x^2 + x + 1 is irreducible but has order 5.
        assert_eq!(
            FieldTables::new(4, 0b1_1111).unwrap_err(),
            FieldError::NotPrimitive { m: 4, poly: 0b1_1111 }
        );
    }

    #[test]
    fn smallest_field() {
        let t = FieldTables::new(2, 0b111).unwrap();
        assert_eq!(t.num_elements(), 4);
        assert_eq!(t.alpha_pow(3), 1);
    }

    #[test]
    fn mul_basics() {
        let t = gf16();
        let a5 = t.alpha_pow(5);
        assert_eq!(t.mul(0, a5), 0);
        assert_eq!(t.mul(1, a5), a5);
        let a2 = t.alpha_pow(2);
        assert_eq!(t.mul(a2, a2), 0b0011); // alpha^4
    }

    #[test]
    fn inv_basics() {
        let t = gf16();
        assert_eq!(t.inv(1).unwrap(), 1);
        assert_eq!(t.inv(t.alpha_pow(1)).unwrap(), t.alpha_pow(14));
        assert_eq!(t.inv(0).unwrap_err(), FieldError::DivisionByZero);
    }

    #[test]
    fn minimal_polynomials_gf16() {
        let t = gf16();
        assert_eq!(t.minimal_polynomial(1).to_mask(), 0b1_0011);
        assert_eq!(t.minimal_polynomial(3).to_mask(), 0b1_1111);
        assert_eq!(t.minimal_polynomial(5).to_mask(), 0b111);
    }

    #[test]
    fn default_polys_all_primitive() {
        for m in 2..=12 {
            let t = FieldTables::with_default_poly(m).unwrap();
            assert_eq!(t.num_elements(), 1 << m);
        }
    }

    #[test]
    fn minimal_polynomial_annihilates_conjugates() {
        let t = FieldTables::with_default_poly(6).unwrap();
        for power in 1..t.group_order() {
            let mp = t.minimal_polynomial(power);
            assert_eq!(mp.degree().unwrap() % 1, 0);
            assert!(mp.degree().unwrap() <= 6);
            for &c in &t.conjugacy_class(power) {
                assert_eq!(mp.eval(&t, t.alpha_pow(c)), 0, "power {power} conj {c}");
            }
            // Roots are exactly the conjugates.
            let n_roots = (0..t.group_order())
                .filter(|&e| mp.eval(&t, t.alpha_pow(e)) == 0)
                .count();
            assert_eq!(n_roots, t.conjugacy_class(power).len());
        }
    }

    proptest! {
        #[test]
        fn distributivity(a in 0u32..16, b in 0u32..16, c in 0u32..16) {
            let t = gf16();
            prop_assert_eq!(t.mul(a, b ^ c), t.mul(a, b) ^ t.mul(a, c));
        }

        #[test]
        fn commutative_associative(a in 0u32..16, b in 0u32..16, c in 0u32..16) {
            let t = gf16();
            prop_assert_eq!(t.mul(a, b), t.mul(b, a));
            prop_assert_eq!(t.mul(t.mul(a, b), c), t.mul(a, t.mul(b, c)));
        }

        #[test]
        fn lagrange(a in 1u32..16) {
            let t = gf16();
            prop_assert_eq!(t.pow(a, 15), 1);
        }

        #[test]
        fn inverse_round_trip(a in 1u32..256) {
            let t = FieldTables::with_default_poly(8).unwrap();
            prop_assert_eq!(t.mul(a, t.inv(a).unwrap()), 1);
        }

        #[test]
        fn poly_mul_degree(ma in 1u64..1024, mb in 1u64..1024) {
            let a = BinaryPolynomial::from_mask(ma);
            let b = BinaryPolynomial::from_mask(mb);
            let p = a.mul(&b);
            prop_assert_eq!(p.degree().unwrap(), a.degree().unwrap() + b.degree().unwrap());
        }
    }
}
