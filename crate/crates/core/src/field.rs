//! Arithmetic in GF(2^233) with the irreducible polynomial
//! f(t) = t^233 + t^74 + 1.
//!
//! Addition, squaring, reduction and inversion are fixed word-level
//! routines; multiplication is delegated to a pluggable [`MultiplierPlan`]
//! running the 4-segment schedule, with a plan-free schoolbook fallback
//! ([`FieldElement::mul_base`]) for oracles and inversion chains.

use std::fmt;

use crate::error::{Error, Result};
use crate::polymul::{seg4_mul, BitPoly, MultiplierPlan, FIELD_WIDTH};

/// Degree of the field extension.
pub const M: usize = 233;
/// Middle exponent of the trinomial modulus.
pub const K: usize = 74;

const LIMBS: usize = 4;
const RAW_LIMBS: usize = 8;
const TOP_BITS: usize = M % 64; // 41
const TOP_MASK: u64 = (1 << TOP_BITS) - 1;

/// A reduced polynomial over GF(2) of degree < 233; bit `d` of the limb
/// vector holds the coefficient of `t^d`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement([u64; LIMBS]);

/// An unreduced product of two field elements, degree <= 464.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct RawPolynomial([u64; RAW_LIMBS]);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement([0; LIMBS]);
    pub const ONE: FieldElement = FieldElement([1, 0, 0, 0]);

    pub fn from_limbs(limbs: [u64; LIMBS]) -> Result<Self> {
        if limbs[LIMBS - 1] & !TOP_MASK != 0 {
            return Err(Error::validation("element exceeds 233 bits".to_string()));
        }
        Ok(FieldElement(limbs))
    }

    pub fn limbs(&self) -> &[u64; LIMBS] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0; LIMBS]
    }

    pub fn bit(&self, i: usize) -> bool {
        i < M && (self.0[i / 64] >> (i % 64)) & 1 == 1
    }

    /// The monomial t^d.
    pub fn monomial(d: usize) -> Self {
        assert!(d < M);
        let mut limbs = [0u64; LIMBS];
        limbs[d / 64] = 1 << (d % 64);
        FieldElement(limbs)
    }

    pub fn random<R: rand::Rng + ?Sized>(rng: &mut R) -> Self {
        let mut limbs = [0u64; LIMBS];
        for l in &mut limbs {
            *l = rng.gen();
        }
        limbs[LIMBS - 1] &= TOP_MASK;
        FieldElement(limbs)
    }

    /// Coefficient-wise XOR.
    pub fn add(&self, other: &FieldElement) -> FieldElement {
        let mut out = [0u64; LIMBS];
        for i in 0..LIMBS {
            out[i] = self.0[i] ^ other.0[i];
        }
        FieldElement(out)
    }

    /// Frobenius square: intersperse zero bits, then reduce.
    pub fn sqr(&self) -> FieldElement {
        let mut raw = [0u64; RAW_LIMBS];
        for (i, &limb) in self.0.iter().enumerate() {
            raw[2 * i] = spread_u32(limb as u32);
            raw[2 * i + 1] = spread_u32((limb >> 32) as u32);
        }
        reduce(&RawPolynomial(raw))
    }

    /// Plan-free schoolbook multiplication; the baseline multiplier used by
    /// the affine oracle and the Fermat inversion chain.
    pub fn mul_base(&self, other: &FieldElement) -> FieldElement {
        let mut raw = [0u64; RAW_LIMBS];
        for i in 0..LIMBS {
            let limb = self.0[i];
            if limb == 0 {
                continue;
            }
            for j in 0..64 {
                if (limb >> j) & 1 == 1 {
                    xor_shifted(&mut raw, &other.0, i * 64 + j);
                }
            }
        }
        reduce(&RawPolynomial(raw))
    }

    /// Fermat inversion: a^(2^233 - 2) as a plain left-to-right chain of
    /// 232 squarings and 231 multiplications.
    pub fn invert(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::validation("inverse of zero".to_string()));
        }
        let mut acc = *self;
        for i in 0..232 {
            acc = acc.sqr();
            if i < 231 {
                acc = acc.mul_base(self);
            }
        }
        Ok(acc)
    }

    /// Extended-Euclid inversion over GF(2)[t]; an independent route used
    /// to cross-check [`FieldElement::invert`] and to keep the affine
    /// oracle fast.
    pub fn invert_euclid(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::validation("inverse of zero".to_string()));
        }
        let mut u = Wide::from_fe(self);
        let mut v = Wide::modulus();
        let mut g1 = Wide::one();
        let mut g2 = Wide::zero();
        loop {
            if u.is_one() {
                return FieldElement::from_limbs(g1.low_limbs());
            }
            let mut j = u.degree() as isize - v.degree() as isize;
            if j < 0 {
                std::mem::swap(&mut u, &mut v);
                std::mem::swap(&mut g1, &mut g2);
                j = -j;
            }
            u.xor_shl(&v, j as usize);
            g1.xor_shl(&g2, j as usize);
        }
    }

    pub fn to_bits(&self) -> BitPoly {
        let mut p = BitPoly::zeros(FIELD_WIDTH);
        for i in 0..M {
            if self.bit(i) {
                p.set_bit(i, true);
            }
        }
        p
    }

    pub fn from_bits(p: &BitPoly) -> Result<Self> {
        if p.width() != FIELD_WIDTH {
            return Err(Error::argument(format!(
                "expected a {FIELD_WIDTH}-bit vector, got {}",
                p.width()
            )));
        }
        let mut limbs = [0u64; LIMBS];
        for (i, &l) in p.limbs().iter().enumerate() {
            limbs[i] = l;
        }
        FieldElement::from_limbs(limbs)
    }

    /// Big-endian hex, 59 digits, lowest bit = coefficient of t^0.
    pub fn to_hex(&self) -> String {
        format!(
            "{:011x}{:016x}{:016x}{:016x}",
            self.0[3], self.0[2], self.0[1], self.0[0]
        )
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        let s = s.trim().strip_prefix("0x").unwrap_or_else(|| s.trim());
        if s.is_empty() || s.len() > 59 {
            return Err(Error::validation(format!(
                "field element hex must be 1..=59 digits, got {} in {s:?}",
                s.len()
            )));
        }
        let mut limbs = [0u64; LIMBS];
        for (i, c) in s.bytes().rev().enumerate() {
            let nibble = match c {
                b'0'..=b'9' => (c - b'0') as u64,
                b'a'..=b'f' => (c - b'a' + 10) as u64,
                b'A'..=b'F' => (c - b'A' + 10) as u64,
                _ => {
                    return Err(Error::validation(format!(
                        "invalid hex digit {:?} in field element",
                        c as char
                    )))
                }
            };
            limbs[i / 16] |= nibble << (4 * (i % 16));
        }
        FieldElement::from_limbs(limbs)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement({})", self.to_hex())
    }
}

impl RawPolynomial {
    pub fn zero() -> Self {
        RawPolynomial([0; RAW_LIMBS])
    }

    pub fn from_bits(p: &BitPoly) -> Result<Self> {
        if p.width() > 2 * M - 1 {
            return Err(Error::argument(format!(
                "raw polynomial too wide: {}",
                p.width()
            )));
        }
        let mut limbs = [0u64; RAW_LIMBS];
        for (i, &l) in p.limbs().iter().enumerate() {
            limbs[i] = l;
        }
        Ok(RawPolynomial(limbs))
    }

    pub fn from_element(fe: &FieldElement) -> Self {
        let mut limbs = [0u64; RAW_LIMBS];
        limbs[..LIMBS].copy_from_slice(&fe.0);
        RawPolynomial(limbs)
    }

    /// The monomial t^d, d <= 464.
    pub fn monomial(d: usize) -> Self {
        assert!(d <= 2 * (M - 1));
        let mut limbs = [0u64; RAW_LIMBS];
        limbs[d / 64] = 1 << (d % 64);
        RawPolynomial(limbs)
    }

    pub fn bit(&self, i: usize) -> bool {
        i < RAW_LIMBS * 64 && (self.0[i / 64] >> (i % 64)) & 1 == 1
    }
}

fn xor_shifted(dst: &mut [u64; RAW_LIMBS], src: &[u64; LIMBS], shift: usize) {
    let word = shift / 64;
    let bits = shift % 64;
    for (i, &s) in src.iter().enumerate() {
        if s == 0 {
            continue;
        }
        dst[word + i] ^= s << bits;
        if bits != 0 {
            let spill = s >> (64 - bits);
            if spill != 0 {
                dst[word + i + 1] ^= spill;
            }
        }
    }
}

fn xor_u64_at(dst: &mut [u64; RAW_LIMBS], value: u64, pos: usize) {
    let word = pos / 64;
    let bits = pos % 64;
    dst[word] ^= value << bits;
    if bits != 0 {
        let spill = value >> (64 - bits);
        if spill != 0 {
            dst[word + 1] ^= spill;
        }
    }
}

/// Reduces a degree-<=464 polynomial modulo t^233 + t^74 + 1 by folding
/// every monomial t^(233+e) onto t^(74+e) + t^e, highest limbs first.
pub fn reduce(p: &RawPolynomial) -> FieldElement {
    let mut limbs = p.0;
    for i in (LIMBS..RAW_LIMBS).rev() {
        let w = limbs[i];
        if w == 0 {
            continue;
        }
        limbs[i] = 0;
        xor_u64_at(&mut limbs, w, i * 64 - M);
        xor_u64_at(&mut limbs, w, i * 64 - (M - K));
    }
    // bits 233..255 of the boundary limb
    let w = limbs[LIMBS - 1] >> TOP_BITS;
    if w != 0 {
        limbs[LIMBS - 1] &= TOP_MASK;
        xor_u64_at(&mut limbs, w, 0);
        xor_u64_at(&mut limbs, w, K);
    }
    FieldElement([limbs[0], limbs[1], limbs[2], limbs[3]])
}

/// Field multiplication through the 4-segment schedule under `plan`.
pub fn mul(a: &FieldElement, b: &FieldElement, plan: &MultiplierPlan) -> Result<FieldElement> {
    let product = seg4_mul(&a.to_bits(), &b.to_bits(), plan)?.product;
    Ok(reduce(&RawPolynomial::from_bits(&product)?))
}

fn spread_u32(v: u32) -> u64 {
    let mut x = v as u64;
    x = (x | (x << 16)) & 0x0000_ffff_0000_ffff;
    x = (x | (x << 8)) & 0x00ff_00ff_00ff_00ff;
    x = (x | (x << 4)) & 0x0f0f_0f0f_0f0f_0f0f;
    x = (x | (x << 2)) & 0x3333_3333_3333_3333;
    x = (x | (x << 1)) & 0x5555_5555_5555_5555;
    x
}

/// 256-bit scratch polynomial for the extended-Euclid loop; wide enough to
/// hold the modulus itself.
#[derive(Clone, Copy)]
struct Wide([u64; 4]);

impl Wide {
    fn zero() -> Self {
        Wide([0; 4])
    }

    fn one() -> Self {
        Wide([1, 0, 0, 0])
    }

    fn from_fe(fe: &FieldElement) -> Self {
        Wide(fe.0)
    }

    fn modulus() -> Self {
        let mut w = Wide::zero();
        w.0[M / 64] |= 1 << (M % 64);
        w.0[K / 64] |= 1 << (K % 64);
        w.0[0] |= 1;
        w
    }

    fn is_one(&self) -> bool {
        self.0 == [1, 0, 0, 0]
    }

    fn degree(&self) -> usize {
        for (i, &l) in self.0.iter().enumerate().rev() {
            if l != 0 {
                return i * 64 + 63 - l.leading_zeros() as usize;
            }
        }
        0
    }

    fn low_limbs(&self) -> [u64; 4] {
        self.0
    }

    fn xor_shl(&mut self, other: &Wide, shift: usize) {
        let word = shift / 64;
        let bits = shift % 64;
        for i in 0..4 {
            let s = other.0[i];
            if s == 0 {
                continue;
            }
            if word + i < 4 {
                self.0[word + i] ^= s << bits;
            }
            if bits != 0 && word + i + 1 < 4 {
                self.0[word + i + 1] ^= s >> (64 - bits);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polymul::{mixed_plan_random, MixedStyle};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Bit-at-a-time long-division oracle over a plain bool vector:
    /// substitutes t^(233+e) <- t^(74+e) + t^e from the highest bit down.
    fn reduce_oracle(p: &RawPolynomial) -> FieldElement {
        let mut bits = vec![false; 465];
        for (i, b) in bits.iter_mut().enumerate() {
            *b = p.bit(i);
        }
        for e in (M..465).rev() {
            if bits[e] {
                bits[e] = false;
                bits[e - M + K] ^= true;
                bits[e - M] ^= true;
            }
        }
        let mut limbs = [0u64; 4];
        for (i, &b) in bits.iter().enumerate().take(M) {
            if b {
                limbs[i / 64] |= 1 << (i % 64);
            }
        }
        FieldElement::from_limbs(limbs).unwrap()
    }

    fn raw_random(rng: &mut impl rand::Rng) -> RawPolynomial {
        let mut limbs = [0u64; 8];
        for l in &mut limbs {
            *l = rng.gen();
        }
        limbs[7] &= (1 << 17) - 1; // keep degree <= 464
        RawPolynomial(limbs)
    }

    #[test]
    fn addition_is_characteristic_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        for _ in 0..10_000 {
            let a = FieldElement::random(&mut rng);
            let b = FieldElement::random(&mut rng);
            assert!(a.add(&a).is_zero());
            assert_eq!(a.add(&b), b.add(&a));
            assert_eq!(a.add(&FieldElement::ZERO), a);
        }
        let t = FieldElement::monomial(1);
        let t_plus_1 = t.add(&FieldElement::ONE);
        assert_eq!(t_plus_1.add(&t), FieldElement::ONE);
    }

    #[test]
    fn addition_is_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..1000 {
            let a = FieldElement::random(&mut rng);
            let b = FieldElement::random(&mut rng);
            let c = FieldElement::random(&mut rng);
            assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        }
    }

    #[test]
    fn reduce_frozen_values() {
        // t^233 = t^74 + 1
        let got = reduce(&RawPolynomial::monomial(233));
        assert_eq!(got, FieldElement::monomial(74).add(&FieldElement::ONE));
        // t^464 = t^231 + t^146 + t^72, by substituting twice
        let got = reduce(&RawPolynomial::monomial(464));
        let want = FieldElement::monomial(231)
            .add(&FieldElement::monomial(146))
            .add(&FieldElement::monomial(72));
        assert_eq!(got, want);
        assert_eq!(reduce_oracle(&RawPolynomial::monomial(464)), want);
    }

    #[test]
    fn reduce_is_identity_below_the_modulus() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..1000 {
            let a = FieldElement::random(&mut rng);
            assert_eq!(reduce(&RawPolynomial::from_element(&a)), a);
        }
    }

    #[test]
    fn reduce_matches_long_division_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..2000 {
            let raw = raw_random(&mut rng);
            assert_eq!(reduce(&raw), reduce_oracle(&raw));
        }
    }

    #[test]
    fn squaring_is_frobenius() {
        // (t+1)^2 = t^2 + 1
        let t_plus_1 = FieldElement::monomial(1).add(&FieldElement::ONE);
        assert_eq!(
            t_plus_1.sqr(),
            FieldElement::monomial(2).add(&FieldElement::ONE)
        );
        assert!(FieldElement::ZERO.sqr().is_zero());
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for _ in 0..1000 {
            let a = FieldElement::random(&mut rng);
            let b = FieldElement::random(&mut rng);
            // Frobenius linearity
            assert_eq!(a.add(&b).sqr(), a.sqr().add(&b.sqr()));
            // cross-check against multiplication
            assert_eq!(a.sqr(), a.mul_base(&a));
        }
    }

    #[test]
    fn squaring_matches_planned_multiplication() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        let plan = MultiplierPlan::pm2();
        for _ in 0..1000 {
            let a = FieldElement::random(&mut rng);
            assert_eq!(a.sqr(), mul(&a, &a, &plan).unwrap());
        }
    }

    #[test]
    fn inversion_frozen_and_property() {
        assert_eq!(FieldElement::ONE.invert().unwrap(), FieldElement::ONE);
        assert!(FieldElement::ZERO.invert().is_err());
        // 1/t = t^232 + t^73, read off the modulus
        let want = FieldElement::monomial(232).add(&FieldElement::monomial(73));
        assert_eq!(FieldElement::monomial(1).invert().unwrap(), want);
        assert_eq!(FieldElement::monomial(1).invert_euclid().unwrap(), want);

        let mut rng = ChaCha8Rng::seed_from_u64(36);
        for _ in 0..1000 {
            let a = FieldElement::random(&mut rng);
            if a.is_zero() {
                continue;
            }
            let inv = a.invert().unwrap();
            assert_eq!(a.mul_base(&inv), FieldElement::ONE);
            assert_eq!(inv, a.invert_euclid().unwrap());
            assert_eq!(inv.invert().unwrap(), a);
        }
    }

    #[test]
    fn multiplication_agrees_across_plans() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let plans = [
            MultiplierPlan::pm1(),
            MultiplierPlan::pm2(),
            MultiplierPlan::pm3(),
            mixed_plan_random(5, MixedStyle::Pm4),
            mixed_plan_random(5, MixedStyle::Pm5),
        ];
        for _ in 0..200 {
            let a = FieldElement::random(&mut rng);
            let b = FieldElement::random(&mut rng);
            let want = a.mul_base(&b);
            for plan in &plans {
                assert_eq!(mul(&a, &b, plan).unwrap(), want);
            }
            assert_eq!(mul(&a, &FieldElement::ONE, &plans[0]).unwrap(), a);
            assert!(mul(&a, &FieldElement::ZERO, &plans[0]).unwrap().is_zero());
        }
    }

    #[test]
    fn multiplication_distributes_over_addition() {
        let mut rng = ChaCha8Rng::seed_from_u64(38);
        let plans = [MultiplierPlan::pm1(), MultiplierPlan::pm3()];
        for _ in 0..200 {
            let a = FieldElement::random(&mut rng);
            let b = FieldElement::random(&mut rng);
            let c = FieldElement::random(&mut rng);
            for plan in &plans {
                let lhs = mul(&a, &b.add(&c), plan).unwrap();
                let rhs = mul(&a, &b, plan).unwrap().add(&mul(&a, &c, plan).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn hex_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(39);
        for _ in 0..500 {
            let a = FieldElement::random(&mut rng);
            let hex = a.to_hex();
            assert_eq!(hex.len(), 59);
            assert_eq!(FieldElement::from_hex(&hex).unwrap(), a);
            assert_eq!(FieldElement::from_hex(&format!("0x{hex}")).unwrap(), a);
        }
        assert_eq!(FieldElement::from_hex("1").unwrap(), FieldElement::ONE);
        assert!(FieldElement::from_hex("").is_err());
        assert!(FieldElement::from_hex("xyz").is_err());
        // 60 digits is one too many
        assert!(FieldElement::from_hex(&"f".repeat(60)).is_err());
        // 2^236 - 1 needs 59 digits but exceeds the field width
        assert!(FieldElement::from_hex(&"f".repeat(59)).is_err());
    }

    proptest::proptest! {
        #[test]
        fn prop_reduce_idempotent(l0 in 0u64.., l1 in 0u64.., l5 in 0u64.., l7 in 0u64..) {
            let raw = RawPolynomial([l0, l1, 0, 0, 0, l5, 0, l7 & ((1 << 17) - 1)]);
            let once = reduce(&raw);
            let twice = reduce(&RawPolynomial::from_element(&once));
            proptest::prop_assert_eq!(once, twice);
        }
    }
}
