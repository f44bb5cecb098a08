//! Number-field elements as polynomials modulo a monic integer polynomial.
//!
//! Elements carry rational coordinates in the power basis; integrality means
//! integer coordinates. Reduction into a coefficient ring happens through a
//! chosen root of the defining polynomial in that ring (found by Hensel
//! lifting from the residue field); roots are ordered canonically and the
//! chosen index is reported alongside any reduction.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::ring::{ModRing, RingElement};

#[derive(Debug, Error)]
pub enum NfError {
    #[error("defining polynomial must be monic of degree >= 1")]
    BadPolynomial,
    #[error("elements belong to different number fields")]
    MixedFields,
    #[error("division by zero")]
    DivisionByZero,
    #[error("no root of the defining polynomial in {0}")]
    NoCompatiblePrime(String),
    #[error("root index {0} out of range ({1} roots)")]
    BadRootIndex(usize, usize),
    #[error("coefficient has p in its denominator; not p-integral")]
    NotPIntegral,
}

/// A monic integer polynomial defining `Q[x]/(F)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NfPoly {
    /// c_0, ..., c_deg with c_deg = 1
    pub coeffs: Vec<BigInt>,
}

impl NfPoly {
    pub fn new(coeffs: Vec<BigInt>) -> Result<Arc<Self>, NfError> {
        if coeffs.len() < 2 || !coeffs.last().unwrap().is_one() {
            return Err(NfError::BadPolynomial);
        }
        Ok(Arc::new(NfPoly { coeffs }))
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Arc<Self>, NfError> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn to_string_coeffs(&self) -> String {
        self.coeffs
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// An element of `Q[x]/(F)` with rational power-basis coordinates.
#[derive(Clone, PartialEq, Debug)]
pub struct NfElem {
    pub poly: Arc<NfPoly>,
    pub coords: Vec<BigRational>,
}

impl NfElem {
    pub fn zero(poly: &Arc<NfPoly>) -> Self {
        NfElem {
            poly: poly.clone(),
            coords: vec![BigRational::zero(); poly.degree()],
        }
    }

    pub fn one(poly: &Arc<NfPoly>) -> Self {
        let mut e = Self::zero(poly);
        e.coords[0] = BigRational::one();
        e
    }

    pub fn gen(poly: &Arc<NfPoly>) -> Self {
        let mut e = Self::zero(poly);
        if poly.degree() >= 2 {
            e.coords[1] = BigRational::one();
        } else {
            // degree-1 field: x = -c_0
            e.coords[0] = BigRational::from(-poly.coeffs[0].clone());
        }
        e
    }

    pub fn from_rational(poly: &Arc<NfPoly>, c: BigRational) -> Self {
        let mut e = Self::zero(poly);
        e.coords[0] = c;
        e
    }

    pub fn from_int(poly: &Arc<NfPoly>, c: &BigInt) -> Self {
        Self::from_rational(poly, BigRational::from(c.clone()))
    }

    pub fn from_coords(poly: &Arc<NfPoly>, coords: Vec<BigRational>) -> Result<Self, NfError> {
        if coords.len() != poly.degree() {
            return Err(NfError::BadPolynomial);
        }
        Ok(NfElem {
            poly: poly.clone(),
            coords,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Integer coordinates in the power basis.
    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|c| c.denom().is_one())
    }

    fn same_field(&self, o: &NfElem) -> bool {
        Arc::ptr_eq(&self.poly, &o.poly) || self.poly == o.poly
    }

    pub fn add(&self, o: &NfElem) -> NfElem {
        assert!(self.same_field(o), "mixed number fields");
        let coords = self
            .coords
            .iter()
            .zip(&o.coords)
            .map(|(a, b)| a + b)
            .collect();
        NfElem {
            poly: self.poly.clone(),
            coords,
        }
    }

    pub fn sub(&self, o: &NfElem) -> NfElem {
        assert!(self.same_field(o), "mixed number fields");
        let coords = self
            .coords
            .iter()
            .zip(&o.coords)
            .map(|(a, b)| a - b)
            .collect();
        NfElem {
            poly: self.poly.clone(),
            coords,
        }
    }

    pub fn neg(&self) -> NfElem {
        NfElem {
            poly: self.poly.clone(),
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, o: &NfElem) -> NfElem {
        assert!(self.same_field(o), "mixed number fields");
        let d = self.poly.degree();
        let mut prod = vec![BigRational::zero(); 2 * d - 1];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coords.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                prod[i + j] = &prod[i + j] + &(a * b);
            }
        }
        // reduce x^k for k >= d via x^d = -(c_0 + ... + c_{d-1} x^{d-1})
        for k in (d..2 * d - 1).rev() {
            if prod[k].is_zero() {
                continue;
            }
            let c = prod[k].clone();
            prod[k] = BigRational::zero();
            for i in 0..d {
                let t = &prod[k - d + i] - &(&c * &BigRational::from(self.poly.coeffs[i].clone()));
                prod[k - d + i] = t;
            }
        }
        prod.truncate(d);
        NfElem {
            poly: self.poly.clone(),
            coords: prod,
        }
    }

    pub fn scale(&self, c: &BigRational) -> NfElem {
        NfElem {
            poly: self.poly.clone(),
            coords: self.coords.iter().map(|x| x * c).collect(),
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in `Q[x]`.
    /// Requires the defining polynomial to be coprime to this element's
    /// minimal polynomial factor (always true when `F` is irreducible).
    pub fn inverse(&self) -> Result<NfElem, NfError> {
        if self.is_zero() {
            return Err(NfError::DivisionByZero);
        }
        let d = self.poly.degree();
        // extended gcd of (self as poly) and F over Q[x]
        let mut r0: Vec<BigRational> = self
            .poly
            .coeffs
            .iter()
            .map(|c| BigRational::from(c.clone()))
            .collect();
        let mut r1: Vec<BigRational> = self.coords.clone();
        trim(&mut r0);
        trim(&mut r1);
        let mut s0: Vec<BigRational> = vec![BigRational::zero()];
        let mut s1: Vec<BigRational> = vec![BigRational::one()];
        while !(r1.len() == 1 && r1[0].is_zero()) {
            let (q, rem) = poly_divmod(&r0, &r1);
            let snew = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = r1;
            r1 = rem;
            s0 = s1;
            s1 = snew;
        }
        if r0.len() != 1 {
            // gcd has positive degree: self is a zero divisor
            return Err(NfError::DivisionByZero);
        }
        let lead_inv = r0[0].recip();
        let mut inv: Vec<BigRational> = s0.iter().map(|c| c * &lead_inv).collect();
        // reduce mod F and pad
        let (_, mut red) = {
            let f: Vec<BigRational> = self
                .poly
                .coeffs
                .iter()
                .map(|c| BigRational::from(c.clone()))
                .collect();
            if inv.len() >= f.len() {
                let (q, r) = poly_divmod(&inv, &f);
                (q, r)
            } else {
                (vec![], std::mem::take(&mut inv))
            }
        };
        red.resize(d, BigRational::zero());
        let out = NfElem {
            poly: self.poly.clone(),
            coords: red,
        };
        debug_assert_eq!(out.mul(self), NfElem::one(&self.poly));
        Ok(out)
    }

    pub fn div(&self, o: &NfElem) -> Result<NfElem, NfError> {
        Ok(self.mul(&o.inverse()?))
    }

    /// Evaluate this element at a root of the defining polynomial in `ring`.
    /// Denominators must be prime to p.
    pub fn reduce_at_root(&self, root: &RingElement) -> Result<RingElement, NfError> {
        let ring = root.ring().clone();
        let pm = BigInt::from(ring.pm());
        let p = BigInt::from(ring.p());
        let mut acc = ring.zero();
        let mut pw = ring.one();
        for c in &self.coords {
            if !c.is_zero() {
                let num = c.numer().mod_floor_big(&pm);
                let den = c.denom();
                if num_traits::Zero::is_zero(&(den % &p)) {
                    return Err(NfError::NotPIntegral);
                }
                let den_red = den.mod_floor_big(&pm);
                let den_inv = ring
                    .embed_base(den_red)
                    .inverse()
                    .map_err(|_| NfError::NotPIntegral)?;
                let term = ring.embed_base(num).mul(&den_inv).mul(&pw);
                acc = acc.add(&term);
            }
            pw = pw.mul(root);
        }
        Ok(acc)
    }
}

trait ModFloorBig {
    fn mod_floor_big(&self, m: &BigInt) -> u64;
}

impl ModFloorBig for BigInt {
    fn mod_floor_big(&self, m: &BigInt) -> u64 {
        use num_integer::Integer;
        let r = self.mod_floor(m);
        let (_, digits) = r.to_u64_digits();
        if digits.is_empty() {
            0
        } else {
            digits[0]
        }
    }
}

fn trim(v: &mut Vec<BigRational>) {
    while v.len() > 1 && v.last().unwrap().is_zero() {
        v.pop();
    }
}

fn poly_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    trim(&mut r);
    let mut b = b.to_vec();
    trim(&mut b);
    let db = b.len() - 1;
    if r.len() <= db && !(r.len() == 1 && db == 0) {
        return (vec![BigRational::zero()], r);
    }
    let mut q = vec![BigRational::zero(); r.len().saturating_sub(db)];
    let lead = b[db].clone();
    while r.len() - 1 >= db && !(r.len() == 1 && r[0].is_zero()) {
        let dr = r.len() - 1;
        let c = &r[dr] / &lead;
        q[dr - db] = c.clone();
        for i in 0..=db {
            let t = &r[dr - db + i] - &(&c * &b[i]);
            r[dr - db + i] = t;
        }
        trim(&mut r);
        if dr == db {
            break;
        }
    }
    trim(&mut q);
    (q, r)
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    trim(&mut out);
    out
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] = x.clone();
    }
    for (i, y) in b.iter().enumerate() {
        out[i] = &out[i] - y;
    }
    trim(&mut out);
    out
}

/// Evaluate an integer polynomial at a ring element.
fn eval_poly_in_ring(coeffs: &[BigInt], x: &RingElement) -> RingElement {
    let ring = x.ring().clone();
    let pm = BigInt::from(ring.pm());
    let mut acc = ring.zero();
    let mut pw = ring.one();
    for c in coeffs {
        if !c.is_zero() {
            acc = acc.add(&ring.embed_base(c.mod_floor_big(&pm)).mul(&pw));
        }
        pw = pw.mul(x);
    }
    acc
}

/// All roots of the monic polynomial `F` in `ring`, canonically ordered.
///
/// Simple residue-field roots are Hensel-lifted; if the reduction of `F` has
/// repeated roots the ring is enumerated when small enough, otherwise those
/// roots are not found and an error is raised if nothing was found at all.
pub fn roots_in_ring(poly: &NfPoly, ring: &ModRing) -> Result<Vec<RingElement>, NfError> {
    let p = ring.p();
    let f_res = ring.spec().f_res();
    let mut roots: Vec<RingElement> = Vec::new();
    let mut saw_multiple_root = false;

    // derivative
    let deriv: Vec<BigInt> = poly
        .coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect();

    // residue-field candidates: sum c_i u^i with c_i in 0..p
    let dim = f_res as usize;
    let gen = if dim > 1 { ring.unram_gen() } else { None };
    let mut c = vec![0u64; dim];
    loop {
        let mut x = ring.zero();
        for (i, &ci) in c.iter().enumerate() {
            if ci != 0 {
                let b = match (&gen, i) {
                    (_, 0) => ring.one(),
                    (Some(u), i) => u.pow(i as u64),
                    (None, _) => unreachable!(),
                };
                x = x.add(&b.scale(ci));
            }
        }
        let fx = eval_poly_in_ring(&poly.coeffs, &x);
        if fx.valuation() >= 1 {
            // residue root; check simplicity
            let dfx = eval_poly_in_ring(&deriv, &x);
            if dfx.is_unit() {
                // Newton: x <- x - F(x)/F'(x), valuation of F(x) strictly grows
                let mut xi = x.clone();
                for _ in 0..=ring.gamma_exp() + 2 {
                    let fxi = eval_poly_in_ring(&poly.coeffs, &xi);
                    if fxi.is_zero() {
                        break;
                    }
                    let dfxi = eval_poly_in_ring(&deriv, &xi);
                    let step = dfxi.inverse().map_err(|_| NfError::NotPIntegral)?.mul(&fxi);
                    xi = xi.sub(&step);
                }
                if eval_poly_in_ring(&poly.coeffs, &xi).is_zero() {
                    roots.push(xi);
                }
            } else {
                saw_multiple_root = true;
            }
        }
        let mut k = 0;
        loop {
            if k == c.len() {
                // done enumerating residue candidates
                if saw_multiple_root {
                    // exact fallback when the ring is small
                    if let Ok(all) = ring.enumerate() {
                        roots.clear();
                        for x in all {
                            if eval_poly_in_ring(&poly.coeffs, &x).is_zero() {
                                roots.push(x);
                            }
                        }
                    }
                }
                roots.sort_by_key(|r| r.coords().to_vec());
                roots.dedup();
                if roots.is_empty() {
                    return Err(NfError::NoCompatiblePrime(ring.to_string()));
                }
                return Ok(roots);
            }
            c[k] += 1;
            if c[k] < p {
                break;
            }
            c[k] = 0;
            k += 1;
        }
    }
}
