//! The B-233 curve: constants, affine points and the textbook affine group
//! law used as the oracle for the projective ladder.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::field::FieldElement;

/// Curve coefficient b of y^2 + xy = x^3 + x^2 + b.
pub const B_HEX: &str = "0066647ede6c332c7f8c0923bb58213b333b20e9ce4281fe115f7d8f90ad";
/// Base point x.
pub const GX_HEX: &str = "00fac9dfcbac8313bb2139f1bb755fef65bc391f8b36f8f8eb7371fd558b";
/// Base point y.
pub const GY_HEX: &str = "01006a08a41903350678e58528bebf8a0beff867a7ca36716f7e01f81052";
/// Order of the base point.
pub const ORDER_HEX: &str = "01000000000000000000000000000013e974e72f8a6922031d2603cfe0d7";

pub fn curve_b() -> FieldElement {
    static B: OnceLock<FieldElement> = OnceLock::new();
    *B.get_or_init(|| FieldElement::from_hex(B_HEX).unwrap())
}

pub fn base_point() -> AffinePoint {
    static G: OnceLock<AffinePoint> = OnceLock::new();
    *G.get_or_init(|| AffinePoint::Point {
        x: FieldElement::from_hex(GX_HEX).unwrap(),
        y: FieldElement::from_hex(GY_HEX).unwrap(),
    })
}

/// An affine point of B-233 or the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AffinePoint {
    Infinity,
    Point { x: FieldElement, y: FieldElement },
}

impl AffinePoint {
    pub fn new(x: FieldElement, y: FieldElement) -> Result<Self> {
        let p = AffinePoint::Point { x, y };
        if !p.on_curve() {
            return Err(Error::validation("point is not on B-233"));
        }
        Ok(p)
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, AffinePoint::Infinity)
    }

    pub fn on_curve(&self) -> bool {
        match self {
            AffinePoint::Infinity => true,
            AffinePoint::Point { x, y } => {
                let lhs = y.mul_base(y).add(&x.mul_base(y));
                let x2 = x.mul_base(x);
                let rhs = x2.mul_base(x).add(&x2).add(&curve_b());
                lhs == rhs
            }
        }
    }

    pub fn neg(&self) -> AffinePoint {
        match self {
            AffinePoint::Infinity => AffinePoint::Infinity,
            AffinePoint::Point { x, y } => AffinePoint::Point {
                x: *x,
                y: x.add(y),
            },
        }
    }

    /// Affine addition; inversions go through the Euclid route so the
    /// oracle stays independent of the Fermat chain under test.
    pub fn add(&self, other: &AffinePoint) -> AffinePoint {
        let (x1, y1) = match self {
            AffinePoint::Infinity => return *other,
            AffinePoint::Point { x, y } => (x, y),
        };
        let (x2, y2) = match other {
            AffinePoint::Infinity => return *self,
            AffinePoint::Point { x, y } => (x, y),
        };
        if x1 == x2 {
            if y1 == y2 {
                return self.double();
            }
            return AffinePoint::Infinity;
        }
        let lam = y1.add(y2).mul_base(&x1.add(x2).invert_euclid().unwrap());
        let x3 = lam
            .mul_base(&lam)
            .add(&lam)
            .add(x1)
            .add(x2)
            .add(&FieldElement::ONE);
        let y3 = lam.mul_base(&x1.add(&x3)).add(&x3).add(y1);
        AffinePoint::Point { x: x3, y: y3 }
    }

    pub fn double(&self) -> AffinePoint {
        let (x, y) = match self {
            AffinePoint::Infinity => return AffinePoint::Infinity,
            AffinePoint::Point { x, y } => (x, y),
        };
        if x.is_zero() {
            return AffinePoint::Infinity;
        }
        let lam = x.add(&y.mul_base(&x.invert_euclid().unwrap()));
        let x3 = lam.mul_base(&lam).add(&lam).add(&FieldElement::ONE);
        let y3 = x
            .mul_base(x)
            .add(&lam.add(&FieldElement::ONE).mul_base(&x3));
        AffinePoint::Point { x: x3, y: y3 }
    }
}

/// A nonzero scalar of up to 233 bits; bit l-1 is the leading one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scalar {
    limbs: [u64; 4],
}

impl Scalar {
    pub fn from_hex(s: &str) -> Result<Self> {
        let fe = FieldElement::from_hex(s)
            .map_err(|_| Error::validation(format!("invalid scalar hex {s:?}")))?;
        Scalar::from_limbs(*fe.limbs())
    }

    pub fn from_u64(v: u64) -> Result<Self> {
        Scalar::from_limbs([v, 0, 0, 0])
    }

    pub fn from_limbs(limbs: [u64; 4]) -> Result<Self> {
        let s = Scalar { limbs };
        if s.limbs == [0; 4] {
            return Err(Error::validation("scalar must be nonzero"));
        }
        Ok(s)
    }

    pub fn order() -> Scalar {
        static N: OnceLock<Scalar> = OnceLock::new();
        *N.get_or_init(|| Scalar::from_hex(ORDER_HEX).unwrap())
    }

    /// Uniform scalar with exactly `len` bits (leading bit forced).
    pub fn random_with_len<R: rand::Rng + ?Sized>(rng: &mut R, len: usize) -> Scalar {
        assert!((1..=233).contains(&len));
        let mut limbs = [0u64; 4];
        for l in &mut limbs {
            *l = rng.gen();
        }
        for i in len..256 {
            limbs[i / 64] &= !(1u64 << (i % 64));
        }
        limbs[(len - 1) / 64] |= 1 << ((len - 1) % 64);
        Scalar { limbs }
    }

    pub fn bit(&self, i: usize) -> bool {
        i < 256 && (self.limbs[i / 64] >> (i % 64)) & 1 == 1
    }

    /// Scalar length l: position of the leading one plus one.
    pub fn bit_len(&self) -> usize {
        for (i, &l) in self.limbs.iter().enumerate().rev() {
            if l != 0 {
                return i * 64 + 64 - l.leading_zeros() as usize;
            }
        }
        0
    }

    pub fn to_hex(&self) -> String {
        format!(
            "{:011x}{:016x}{:016x}{:016x}",
            self.limbs[3], self.limbs[2], self.limbs[1], self.limbs[0]
        )
    }
}
