//! SPC and extended BCH component codes: construction from (family, n, t),
//! systematic encoding, membership tests, and bounded distance decoding.
//!
//! Bit layout of a codeword: positions 0..k-1 carry the message, positions
//! k..n-2 the cyclic parity (eBCH), and position n-1 the overall parity bit.
//! Position i of the cyclic part corresponds to degree n-2-i, so the message
//! occupies the high-degree coefficients as in the usual systematic encoder.

use crate::field::{BinaryPolynomial, FieldTables};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodeError {
    #[error("unsupported parameters: {0}")]
    UnsupportedParameters(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}

/// Component code family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeFamily {
    /// Single parity check, (n, n-1, 2).
    Spc,
    /// Extended BCH, (2^m, k, 2t+2).
    Ebch,
}

/// A component code with its decoding machinery.
#[derive(Debug, Clone)]
pub struct CodeSpec {
    family: CodeFamily,
    n: usize,
    k: usize,
    d: usize,
    t: usize,
    /// eBCH only: field tables for GF(2^m) with n = 2^m.
    field: Option<FieldTables>,
    /// eBCH only: generator polynomial of the (n-1, k) cyclic part.
    generator: Option<BinaryPolynomial>,
    /// Odd syndrome indices 1, 3, ..., 2t-1.
    odd_js: Vec<usize>,
}

/// Precomputed per-word decoding state: odd syndromes of the cyclic part,
/// parity of the cyclic part, and the extension bit.
#[derive(Debug, Clone)]
pub(crate) struct BddBase {
    pub odd_syndromes: Vec<u32>,
    pub cyclic_parity: u8,
    pub ext_bit: u8,
}

/// Reusable scratch buffers for syndrome decoding.
#[derive(Debug, Default)]
pub(crate) struct BddScratch {
    sigma: Vec<u32>,
    prev: Vec<u32>,
    tmp: Vec<u32>,
    syndromes: Vec<u32>,
    roots: Vec<usize>,
}

impl CodeSpec {
    /// Builds a component code. SPC requires t = 0 and n >= 2; eBCH requires
    /// n = 2^m (m in 2..=12) and t >= 1, and fails if the dimension would not
    /// be positive.
    pub fn build(family: CodeFamily, n: usize, t: usize) -> Result<Self, CodeError> {
        match family {
            CodeFamily::Spc => {
                if n < 2 {
                    return Err(CodeError::UnsupportedParameters(format!(
                        "SPC needs n >= 2, got {n}"
                    )));
                }
                if t != 0 {
                    return Err(CodeError::UnsupportedParameters(format!(
                        "SPC has decoding radius 0, got t={t}"
                    )));
                }
                Ok(Self {
                    family,
                    n,
                    k: n - 1,
                    d: 2,
                    t: 0,
                    field: None,
                    generator: None,
                    odd_js: Vec::new(),
                })
            }
            CodeFamily::Ebch => {
                if !n.is_power_of_two() || n < 4 {
                    return Err(CodeError::UnsupportedParameters(format!(
                        "eBCH needs n = 2^m >= 4, got {n}"
                    )));
                }
                if t < 1 {
                    return Err(CodeError::UnsupportedParameters(
                        "eBCH needs t >= 1".into(),
                    ));
                }
                let m = n.trailing_zeros();
                let field = FieldTables::with_default_poly(m).map_err(|e| {
                    CodeError::UnsupportedParameters(format!("field for n={n}: {e}"))
                })?;
                // Generator of the cyclic part: lcm of the minimal polynomials
                // of alpha^1..alpha^2t, i.e. the product over distinct
                // conjugacy classes.
                let mut reps: Vec<usize> = Vec::new();
                let mut generator = BinaryPolynomial::one();
                for j in 1..=2 * t {
                    let class = field.conjugacy_class(j);
                    let rep = class[0];
                    if !reps.contains(&rep) {
                        reps.push(rep);
                        generator = generator.mul(&field.minimal_polynomial(j));
                    }
                }
                let r = generator.degree().expect("generator is nonzero");
                if r + 1 >= n - 1 {
                    return Err(CodeError::UnsupportedParameters(format!(
                        "eBCH(n={n}, t={t}) has dimension {} <= 0",
                        n as i64 - 1 - r as i64
                    )));
                }
                let k = (n - 1) - r;
                Ok(Self {
                    family,
                    n,
                    k,
                    d: 2 * t + 2,
                    t,
                    field: Some(field),
                    generator: Some(generator),
                    odd_js: (0..t).map(|i| 2 * i + 1).collect(),
                })
            }
        }
    }

    pub fn spc(n: usize) -> Result<Self, CodeError> {
        Self::build(CodeFamily::Spc, n, 0)
    }

    pub fn ebch(n: usize, t: usize) -> Result<Self, CodeError> {
        Self::build(CodeFamily::Ebch, n, t)
    }

    pub fn family(&self) -> CodeFamily {
        self.family
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn min_distance(&self) -> usize {
        self.d
    }

    /// Decoding radius t = floor((d-1)/2).
    pub fn radius(&self) -> usize {
        self.t
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub fn generator_poly(&self) -> Option<&BinaryPolynomial> {
        self.generator.as_ref()
    }

    pub fn field(&self) -> Option<&FieldTables> {
        self.field.as_ref()
    }

    fn check_len(&self, len: usize, expected: usize) -> Result<(), CodeError> {
        if len != expected {
            Err(CodeError::LengthMismatch {
                expected,
                got: len,
            })
        } else {
            Ok(())
        }
    }

    /// Systematic encoding: message verbatim, cyclic parity, overall parity.
    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>, CodeError> {
        self.check_len(message.len(), self.k)?;
        let mut cw = Vec::with_capacity(self.n);
        cw.extend_from_slice(message);
        match self.family {
            CodeFamily::Spc => {
                let parity = message.iter().fold(0u8, |a, &b| a ^ b);
                cw.push(parity);
            }
            CodeFamily::Ebch => {
                let g = self.generator.as_ref().unwrap();
                let r = g.degree().unwrap();
                let g_bits = g.coefficients();
                // LFSR division computing (x^r * M(x)) mod g with the message
                // fed in from the high-degree end.
                let mut reg = vec![0u8; r];
                for &b in message {
                    let fb = b ^ reg[r - 1];
                    for j in (1..r).rev() {
                        reg[j] = reg[j - 1] ^ (fb & g_bits[j]);
                    }
                    reg[0] = fb & g_bits[0];
                }
                // Position k + i holds the coefficient of degree r-1-i.
                for i in 0..r {
                    cw.push(reg[r - 1 - i]);
                }
                let parity = cw.iter().fold(0u8, |a, &b| a ^ b);
                cw.push(parity);
            }
        }
        debug_assert_eq!(cw.len(), self.n);
        Ok(cw)
    }

    /// True iff the word satisfies every code constraint.
    pub fn is_codeword(&self, word: &[u8]) -> Result<bool, CodeError> {
        self.check_len(word.len(), self.n)?;
        let parity = word.iter().fold(0u8, |a, &b| a ^ b);
        if parity != 0 {
            return Ok(false);
        }
        match self.family {
            CodeFamily::Spc => Ok(true),
            CodeFamily::Ebch => {
                let base = self.base_state(word);
                Ok(base.odd_syndromes.iter().all(|&s| s == 0))
            }
        }
    }

    /// Bounded distance decoding with radius t. Returns the unique codeword
    /// within Hamming distance t of `word`, or None if there is none.
    pub fn bdd_decode(&self, word: &[u8]) -> Result<Option<Vec<u8>>, CodeError> {
        self.check_len(word.len(), self.n)?;
        match self.family {
            CodeFamily::Spc => {
                if word.iter().fold(0u8, |a, &b| a ^ b) == 0 {
                    Ok(Some(word.to_vec()))
                } else {
                    Ok(None)
                }
            }
            CodeFamily::Ebch => {
                let base = self.base_state(word);
                let mut scratch = BddScratch::default();
                let mut delta = Vec::new();
                if self.bdd_on_test_word(&base, &[], &mut scratch, &mut delta) {
                    let mut cw = word.to_vec();
                    for &p in &delta {
                        cw[p as usize] ^= 1;
                    }
                    Ok(Some(cw))
                } else {
                    Ok(None)
                }
            }
        }
    }

    /// Degree of cyclic-part position i.
    #[inline]
    fn deg_of(&self, pos: usize) -> usize {
        self.n - 2 - pos
    }

    /// Odd syndromes, cyclic parity and extension bit of a word.
    pub(crate) fn base_state(&self, word: &[u8]) -> BddBase {
        debug_assert_eq!(word.len(), self.n);
        match self.family {
            CodeFamily::Spc => BddBase {
                odd_syndromes: Vec::new(),
                cyclic_parity: word[..self.n - 1].iter().fold(0, |a, &b| a ^ b),
                ext_bit: word[self.n - 1],
            },
            CodeFamily::Ebch => {
                let f = self.field.as_ref().unwrap();
                let mut odd = vec![0u32; self.odd_js.len()];
                let mut parity = 0u8;
                for (pos, &b) in word[..self.n - 1].iter().enumerate() {
                    if b != 0 {
                        parity ^= 1;
                        let deg = self.deg_of(pos);
                        for (s, &j) in odd.iter_mut().zip(&self.odd_js) {
                            *s ^= f.alpha_pow(j * deg);
                        }
                    }
                }
                BddBase {
                    odd_syndromes: odd,
                    cyclic_parity: parity,
                    ext_bit: word[self.n - 1],
                }
            }
        }
    }

    /// Decodes the test word `base + flips`. On success fills `delta` with
    /// the sorted positions where the decoded codeword differs from the
    /// *base* word and returns true. `flips` holds distinct positions in 0..n.
    pub(crate) fn bdd_on_test_word(
        &self,
        base: &BddBase,
        flips: &[usize],
        scratch: &mut BddScratch,
        delta: &mut Vec<u16>,
    ) -> bool {
        delta.clear();
        match self.family {
            CodeFamily::Spc => {
                let total = base.cyclic_parity ^ base.ext_bit ^ (flips.len() as u8 & 1);
                if total == 0 {
                    delta.extend(flips.iter().map(|&p| p as u16));
                    delta.sort_unstable();
                    true
                } else {
                    false
                }
            }
            CodeFamily::Ebch => {
                let f = self.field.as_ref().unwrap();
                // Updated odd syndromes and parities of the test word.
                scratch.syndromes.clear();
                scratch.syndromes.extend_from_slice(&base.odd_syndromes);
                let mut cyc_parity = base.cyclic_parity;
                let mut ext_bit = base.ext_bit;
                for &p in flips {
                    if p == self.n - 1 {
                        ext_bit ^= 1;
                    } else {
                        cyc_parity ^= 1;
                        let deg = self.deg_of(p);
                        for (s, &j) in scratch.syndromes.iter_mut().zip(&self.odd_js) {
                            *s ^= f.alpha_pow(j * deg);
                        }
                    }
                }
                let e = match self.cyclic_corrections(f, scratch) {
                    Some(e) => e,
                    None => return false,
                };
                // e cyclic-part positions flipped on the test word, plus
                // possibly the extension bit.
                let corrected_cyc_parity = cyc_parity ^ (e as u8 & 1);
                let parity_fix = ext_bit != corrected_cyc_parity;
                if e + parity_fix as usize > self.t {
                    return false;
                }
                // Delta versus the base word = flips XOR corrections XOR fix.
                delta.extend(flips.iter().map(|&p| p as u16));
                for i in 0..e {
                    let p = scratch.roots[i] as u16;
                    if let Some(idx) = delta.iter().position(|&q| q == p) {
                        delta.swap_remove(idx);
                    } else {
                        delta.push(p);
                    }
                }
                if parity_fix {
                    let p = (self.n - 1) as u16;
                    if let Some(idx) = delta.iter().position(|&q| q == p) {
                        delta.swap_remove(idx);
                    } else {
                        delta.push(p);
                    }
                }
                delta.sort_unstable();
                true
            }
        }
    }

    /// Syndrome decoding of the cyclic part. Expects the test word's odd
    /// syndromes in `scratch.syndromes`; on success the error positions are
    /// left in `scratch.roots` and their count returned.
    fn cyclic_corrections(&self, f: &FieldTables, scratch: &mut BddScratch) -> Option<usize> {
        scratch.roots.clear();
        if scratch.syndromes.iter().all(|&s| s == 0) {
            return Some(0);
        }
        // Expand odd syndromes into the full run S_1..S_2t using the binary
        // Frobenius relation S_2j = S_j^2.
        let two_t = 2 * self.t;
        scratch.tmp.clear();
        scratch.tmp.resize(two_t + 1, 0);
        for (i, &j) in self.odd_js.iter().enumerate() {
            scratch.tmp[j] = scratch.syndromes[i];
        }
        for j in (2..=two_t).step_by(2) {
            scratch.tmp[j] = f.square(scratch.tmp[j / 2]);
        }
        let ell = berlekamp_massey(f, &scratch.tmp[1..], &mut scratch.sigma, &mut scratch.prev);
        if ell > self.t || scratch.sigma.len() != ell + 1 {
            return None;
        }
        // Locator roots. sigma(x) = prod (1 - X_k x) with X_k = alpha^deg of
        // an error location, so each root is alpha^{-deg}.
        match ell {
            1 => {
                let deg = f.log(scratch.sigma[1]).expect("sigma1 nonzero") as usize;
                if deg > self.n - 2 {
                    return None;
                }
                scratch.roots.push(self.n - 2 - deg);
            }
            _ => {
                // Chien search over x = alpha^{-deg}, deg = 0..n-2, stepping
                // each term by alpha^{-j} per iteration.
                let order = f.group_order();
                let mut terms = scratch.sigma[1..].to_vec();
                let steps: Vec<u32> = (1..=ell).map(|j| f.alpha_pow(order - j)).collect();
                for deg in 0..self.n - 1 {
                    if deg > 0 {
                        for (t_j, &st) in terms.iter_mut().zip(&steps) {
                            *t_j = f.mul(*t_j, st);
                        }
                    }
                    let val = terms.iter().fold(1u32, |a, &b| a ^ b);
                    if val == 0 {
                        scratch.roots.push(self.n - 2 - deg);
                        if scratch.roots.len() == ell {
                            break;
                        }
                    }
                }
                if scratch.roots.len() != ell {
                    return None;
                }
            }
        }
        // Verify the corrected word is a true codeword: the power sums of the
        // found locators must reproduce the odd syndromes.
        for (i, &j) in self.odd_js.iter().enumerate() {
            let mut p = 0u32;
            for &pos in &scratch.roots[..ell] {
                p ^= f.alpha_pow(j * (self.n - 2 - pos));
            }
            if p != scratch.syndromes[i] {
                return None;
            }
        }
        Some(ell)
    }
}

/// Berlekamp-Massey over GF(2^m): shortest LFSR `sigma` generating the
/// syndrome sequence `s`. Returns the LFSR length; `sigma` holds the
/// connection polynomial with sigma[0] = 1, trailing zeros trimmed.
fn berlekamp_massey(
    f: &FieldTables,
    s: &[u32],
    sigma: &mut Vec<u32>,
    prev: &mut Vec<u32>,
) -> usize {
    sigma.clear();
    sigma.push(1);
    prev.clear();
    prev.push(1);
    let mut ell = 0usize;
    let mut shift = 1usize;
    let mut prev_disc = 1u32;
    for i in 0..s.len() {
        let mut disc = s[i];
        for j in 1..=ell.min(i) {
            disc ^= f.mul(sigma[j], s[i - j]);
        }
        if disc == 0 {
            shift += 1;
        } else {
            let coef = f.mul(disc, f.inv(prev_disc).expect("prev discrepancy nonzero"));
            if 2 * ell <= i {
                let keep = sigma.clone();
                if sigma.len() < prev.len() + shift {
                    sigma.resize(prev.len() + shift, 0);
                }
                for (j, &b) in prev.iter().enumerate() {
                    sigma[j + shift] ^= f.mul(coef, b);
                }
                ell = i + 1 - ell;
                *prev = keep;
                prev_disc = disc;
                shift = 1;
            } else {
                if sigma.len() < prev.len() + shift {
                    sigma.resize(prev.len() + shift, 0);
                }
                for (j, &b) in prev.iter().enumerate() {
                    sigma[j + shift] ^= f.mul(coef, b);
                }
                shift += 1;
            }
        }
    }
    while sigma.last() == Some(&0) {
        sigma.pop();
    }
    ell
}
