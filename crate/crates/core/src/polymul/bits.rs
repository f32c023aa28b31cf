use std::fmt;

use rand::Rng;

/// A polynomial over GF(2) stored LSB-first: bit `d` holds the coefficient
/// of `t^d`.
///
/// The width is part of the value. It is the bus width the bits travel on,
/// not the degree of the polynomial; bits at positions `>= width` are zero
/// by construction.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitPoly {
    width: usize,
    limbs: Vec<u64>,
}

fn limbs_for(width: usize) -> usize {
    width.div_ceil(64)
}

impl BitPoly {
    pub fn zeros(width: usize) -> Self {
        BitPoly {
            width,
            limbs: vec![0; limbs_for(width)],
        }
    }

    /// Builds a width-bit vector from the low bits of `value`.
    pub fn from_u64(value: u64, width: usize) -> Self {
        let mut p = Self::zeros(width);
        if !p.limbs.is_empty() {
            p.limbs[0] = value;
        }
        p.mask_top();
        debug_assert!(
            width >= 64 || value >> width == 0,
            "value {value:#x} does not fit in {width} bits"
        );
        p
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, width: usize) -> Self {
        let mut p = Self::zeros(width);
        for limb in &mut p.limbs {
            *limb = rng.gen();
        }
        p.mask_top();
        p
    }

    fn mask_top(&mut self) {
        let used = self.width % 64;
        if used != 0 {
            if let Some(top) = self.limbs.last_mut() {
                *top &= (1u64 << used) - 1;
            }
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn limbs(&self) -> &[u64] {
        &self.limbs
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|&l| l == 0)
    }

    pub fn bit(&self, i: usize) -> bool {
        if i >= self.width {
            return false;
        }
        (self.limbs[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set_bit(&mut self, i: usize, value: bool) {
        assert!(i < self.width, "bit {i} out of range for width {}", self.width);
        let mask = 1u64 << (i % 64);
        if value {
            self.limbs[i / 64] |= mask;
        } else {
            self.limbs[i / 64] &= !mask;
        }
    }

    /// Position of the highest set bit, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        for (i, &limb) in self.limbs.iter().enumerate().rev() {
            if limb != 0 {
                return Some(i * 64 + 63 - limb.leading_zeros() as usize);
            }
        }
        None
    }

    pub fn count_ones(&self) -> u64 {
        self.limbs.iter().map(|l| l.count_ones() as u64).sum()
    }

    /// XORs `src << shift` into `self`. The shifted source must fit:
    /// `shift + src.width <= self.width`.
    pub fn xor_in_place(&mut self, src: &BitPoly, shift: usize) {
        assert!(
            shift + src.width <= self.width,
            "xor_in_place overflow: {} + {} > {}",
            shift,
            src.width,
            self.width
        );
        let word = shift / 64;
        let bits = shift % 64;
        for (i, &s) in src.limbs.iter().enumerate() {
            if s == 0 {
                continue;
            }
            self.limbs[word + i] ^= s << bits;
            if bits != 0 {
                let spill = s >> (64 - bits);
                if spill != 0 {
                    self.limbs[word + i + 1] ^= spill;
                }
            }
        }
    }

    /// Extracts `len` bits starting at `start` into a new vector.
    pub fn extract(&self, start: usize, len: usize) -> BitPoly {
        assert!(start + len <= self.width);
        let mut out = BitPoly::zeros(len);
        let word = start / 64;
        let bits = start % 64;
        for i in 0..out.limbs.len() {
            let mut v = self.limbs[word + i] >> bits;
            if bits != 0 && word + i + 1 < self.limbs.len() {
                v |= self.limbs[word + i + 1] << (64 - bits);
            }
            out.limbs[i] = v;
        }
        out.mask_top();
        out
    }

    /// Same bits on a wider bus.
    pub fn zero_extended(&self, width: usize) -> BitPoly {
        assert!(width >= self.width);
        let mut out = BitPoly::zeros(width);
        out.limbs[..self.limbs.len()].copy_from_slice(&self.limbs);
        out
    }

    /// Coefficient-wise XOR of two vectors of possibly different widths;
    /// the result is as wide as the wider input.
    pub fn xor_padded(a: &BitPoly, b: &BitPoly) -> BitPoly {
        let (wide, narrow) = if a.width >= b.width { (a, b) } else { (b, a) };
        let mut out = wide.clone();
        for (i, &l) in narrow.limbs.iter().enumerate() {
            out.limbs[i] ^= l;
        }
        out
    }
}

impl fmt::Debug for BitPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitPoly({}b, 0x", self.width)?;
        for limb in self.limbs.iter().rev() {
            write!(f, "{limb:016x}")?;
        }
        write!(f, ")")
    }
}
