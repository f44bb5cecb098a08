//! Scalar arithmetic in `Z/p^m` for machine-word moduli.
//!
//! These residues are the base case of the chain-ring machinery: the maximal
//! ideal is `(p)`, the uniformizer nilpotency exponent is `m`, and every
//! element factors as unit times `p^v`.

use super::chain::ChainScalar;

/// The ring `Z/p^m` with `p^m` fitting comfortably in a machine word.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct ZnRing {
    pub p: u64,
    pub m: u32,
    pub q: u64, // p^m
}

impl ZnRing {
    pub fn new(p: u64, m: u32) -> Self {
        assert!(p >= 2 && m >= 1, "need p >= 2, m >= 1");
        let mut q: u64 = 1;
        for _ in 0..m {
            q = q.checked_mul(p).expect("p^m overflows u64");
        }
        assert!(
            q < (1u64 << 62),
            "modulus too large for exact word arithmetic"
        );
        ZnRing { p, m, q }
    }

    #[inline]
    pub fn reduce_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.q as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a as u128 + b as u128;
        (s % self.q as u128) as u64
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        let s = a as u128 + (self.q - b) as u128;
        (s % self.q as u128) as u64
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.q as u128) as u64
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.q;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// p-adic valuation of `a`, capped at `m` (val(0) = m).
    pub fn vp(&self, a: u64) -> u32 {
        if a == 0 {
            return self.m;
        }
        let mut v = 0;
        let mut a = a;
        while a % self.p == 0 {
            a /= self.p;
            v += 1;
        }
        v
    }

    /// Inverse of a unit. Panics if `a` is not a unit.
    pub fn inv(&self, a: u64) -> u64 {
        let (g, x, _) = egcd(a as i128, self.q as i128);
        assert!(g == 1, "not a unit mod {}: {}", self.q, a);
        x.rem_euclid(self.q as i128) as u64
    }

    pub fn is_unit(&self, a: u64) -> bool {
        a % self.p != 0
    }

    pub fn elem(&self, v: u64) -> ZnElem {
        ZnElem {
            ring: *self,
            v: v % self.q,
        }
    }

    pub fn p_pow(&self, v: u32) -> u64 {
        if v >= self.m {
            return 0;
        }
        let mut r = 1u64;
        for _ in 0..v {
            r *= self.p;
        }
        r
    }
}

fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = egcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// A residue in `Z/p^m`, carrying its ring.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ZnElem {
    pub ring: ZnRing,
    pub v: u64,
}

impl std::fmt::Debug for ZnElem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (mod {})", self.v, self.ring.q)
    }
}

impl std::fmt::Display for ZnElem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl ChainScalar for ZnElem {
    fn is_zero(&self) -> bool {
        self.v == 0
    }

    fn gamma(&self) -> u32 {
        self.ring.m
    }

    fn val(&self) -> u32 {
        self.ring.vp(self.v)
    }

    fn zero_like(&self) -> Self {
        self.ring.elem(0)
    }

    fn one_like(&self) -> Self {
        self.ring.elem(1)
    }

    fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.ring, o.ring);
        self.ring.elem(self.ring.add(self.v, o.v))
    }

    fn sub(&self, o: &Self) -> Self {
        debug_assert_eq!(self.ring, o.ring);
        self.ring.elem(self.ring.sub(self.v, o.v))
    }

    fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.ring, o.ring);
        self.ring.elem(self.ring.mul(self.v, o.v))
    }

    fn neg(&self) -> Self {
        self.ring.elem(self.ring.neg(self.v))
    }

    fn pi_pow_like(&self, v: u32) -> Self {
        self.ring.elem(self.ring.p_pow(v))
    }

    fn unit_inv(&self) -> Self {
        self.ring.elem(self.ring.inv(self.v))
    }

    fn div_exact(&self, b: &Self) -> Self {
        debug_assert_eq!(self.ring, b.ring);
        let vb = b.val();
        debug_assert!(self.val() >= vb, "inexact division");
        let pb = self.ring.p_pow(vb);
        let unit = b.v / pb;
        // (a / p^vb) * unit^{-1}; the choice a / p^vb is the canonical residue
        let shifted = self.v / pb;
        self.ring.elem(self.ring.mul(shifted, self.ring.inv(unit)))
    }

    fn canon_mod_pi(&self, v: u32) -> Self {
        let pv = self.ring.p_pow(v);
        if pv == 0 {
            *self
        } else {
            self.ring.elem(self.v % pv)
        }
    }

    fn sort_key(&self) -> Vec<u64> {
        vec![self.v]
    }

    fn all_elements(&self) -> Option<Vec<Self>> {
        if self.ring.q > 1 << 16 {
            return None;
        }
        Some((0..self.ring.q).map(|v| self.ring.elem(v)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let r = ZnRing::new(3, 2);
        assert_eq!(r.q, 9);
        assert_eq!(r.add(5, 7), 3);
        assert_eq!(r.mul(5, 7), 8);
        assert_eq!(r.inv(2), 5);
        assert_eq!(r.vp(6), 1);
        assert_eq!(r.vp(0), 2);
        assert_eq!(r.pow(2, 6), 64 % 9);
    }

    #[test]
    fn div_exact_consistent() {
        let r = ZnRing::new(2, 3);
        for a in 0..8u64 {
            for b in 1..8u64 {
                if r.vp(a) >= r.vp(b) {
                    let q = r.elem(a).div_exact(&r.elem(b));
                    assert_eq!(r.mul(q.v, b), a, "{} / {} gave {}", a, b, q.v);
                }
            }
        }
    }
}
