//! Truncated q-expansions and the operators acting on them.
//!
//! Expansions are generic over the coefficient domain: integers, rationals,
//! number-field elements, or ring-tower residues. Hecke operators act by
//! the classical coefficient formulas; every operation records its exact
//! truncation loss and refuses to proceed rather than silently shorten.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::character::{CharError, DirichletCharacter, RootOfUnity};
use crate::numfield::{roots_in_ring, NfElem, NfError};
use crate::ring::{ModRing, RingElement};

#[derive(Debug, Error)]
pub enum QexpError {
    #[error("insufficient truncation: need {needed} coefficients, have {have}")]
    InsufficientTruncation { needed: usize, have: usize },
    #[error("operator needs a character on Gamma1 expansions")]
    MissingCharacter,
    #[error("operator only acts on cuspidal expansions (constant term 0)")]
    NotCuspidal,
    #[error("operation requires a single-weight expansion")]
    WeightNotSingle,
    #[error("{0} must be prime to the level here")]
    BadIndex(u64),
    #[error("incompatible expansion metadata: {0}")]
    Metadata(String),
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    Nf(#[from] NfError),
    #[error("coefficient is not p-integral")]
    NotPIntegral,
}

/// Coefficient-domain interface for q-expansions.
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// Image of an integer.
    fn from_int_like(&self, n: &BigInt) -> Self;
    /// Image of a root of unity, when the domain can host it.
    fn unit_root_like(&self, root: RootOfUnity) -> Result<Self, QexpError>;
    /// Render for file output.
    fn render(&self) -> String;
}

impl Coeff for BigInt {
    fn zero_like(&self) -> Self {
        BigInt::zero()
    }
    fn one_like(&self) -> Self {
        BigInt::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_int_like(&self, n: &BigInt) -> Self {
        n.clone()
    }
    fn unit_root_like(&self, root: RootOfUnity) -> Result<Self, QexpError> {
        let r = root.reduced();
        if r.is_one() {
            Ok(BigInt::one())
        } else if r.is_minus_one() {
            Ok(-BigInt::one())
        } else {
            Err(QexpError::Char(CharError::ValueNotRepresentable(
                r.order,
                "the integers".into(),
            )))
        }
    }
    fn render(&self) -> String {
        self.to_string()
    }
}

impl Coeff for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_int_like(&self, n: &BigInt) -> Self {
        BigRational::from(n.clone())
    }
    fn unit_root_like(&self, root: RootOfUnity) -> Result<Self, QexpError> {
        let r = root.reduced();
        if r.is_one() {
            Ok(BigRational::one())
        } else if r.is_minus_one() {
            Ok(-BigRational::one())
        } else {
            Err(QexpError::Char(CharError::ValueNotRepresentable(
                r.order,
                "the rationals".into(),
            )))
        }
    }
    fn render(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

impl Coeff for NfElem {
    fn zero_like(&self) -> Self {
        NfElem::zero(&self.poly)
    }
    fn one_like(&self) -> Self {
        NfElem::one(&self.poly)
    }
    fn add(&self, o: &Self) -> Self {
        NfElem::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        NfElem::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        NfElem::mul(self, o)
    }
    fn neg(&self) -> Self {
        NfElem::neg(self)
    }
    fn is_zero(&self) -> bool {
        NfElem::is_zero(self)
    }
    fn from_int_like(&self, n: &BigInt) -> Self {
        NfElem::from_int(&self.poly, n)
    }
    fn unit_root_like(&self, root: RootOfUnity) -> Result<Self, QexpError> {
        let r = root.reduced();
        if r.is_one() {
            Ok(self.one_like())
        } else if r.is_minus_one() {
            Ok(self.one_like().neg())
        } else {
            Err(QexpError::Char(CharError::ValueNotRepresentable(
                r.order,
                "this number field (only +-1 supported)".into(),
            )))
        }
    }
    fn render(&self) -> String {
        self.coords
            .iter()
            .map(|c| {
                if c.denom().is_one() {
                    c.numer().to_string()
                } else {
                    format!("{}/{}", c.numer(), c.denom())
                }
            })
            .collect::<Vec<_>>()
            .join(";")
    }
}

impl Coeff for RingElement {
    fn zero_like(&self) -> Self {
        self.ring().zero()
    }
    fn one_like(&self) -> Self {
        self.ring().one()
    }
    fn add(&self, o: &Self) -> Self {
        RingElement::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        RingElement::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        RingElement::mul(self, o)
    }
    fn neg(&self) -> Self {
        RingElement::neg(self)
    }
    fn is_zero(&self) -> bool {
        RingElement::is_zero(self)
    }
    fn from_int_like(&self, n: &BigInt) -> Self {
        let pm = BigInt::from(self.ring().pm());
        let r = n.mod_floor(&pm).to_u64().expect("residue fits u64");
        self.ring().embed_base(r)
    }
    fn unit_root_like(&self, root: RootOfUnity) -> Result<Self, QexpError> {
        Ok(crate::character::root_of_unity_in_ring(
            self.ring(),
            root,
            (1, 1),
        )?)
    }
    fn render(&self) -> String {
        self.to_string()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Group {
    Gamma0,
    Gamma1,
}

impl fmt::Display for Group {
    fn fmt(&self, w: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Group::Gamma0 => write!(w, "g0"),
            Group::Gamma1 => write!(w, "g1"),
        }
    }
}

/// Single weight, or the weight multiset of a direct-sum member.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum WeightTag {
    Single(u32),
    Multi(Vec<u32>),
}

impl WeightTag {
    pub fn single(&self) -> Option<u32> {
        match self {
            WeightTag::Single(k) => Some(*k),
            WeightTag::Multi(ks) if ks.len() == 1 => Some(ks[0]),
            _ => None,
        }
    }

    pub fn max_weight(&self) -> u32 {
        match self {
            WeightTag::Single(k) => *k,
            WeightTag::Multi(ks) => ks.iter().copied().max().unwrap_or(1),
        }
    }
}

impl fmt::Display for WeightTag {
    fn fmt(&self, w: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightTag::Single(k) => write!(w, "{k}"),
            WeightTag::Multi(ks) => write!(
                w,
                "{}",
                ks.iter()
                    .map(|k| k.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            ),
        }
    }
}

/// A truncated q-expansion `a_0 + a_1 q + ... + a_B q^B` with level, weight
/// and character metadata. `a_0` is zero for cusp forms; Eisenstein series
/// carry a nonzero constant.
#[derive(Clone, PartialEq, Debug)]
pub struct QExpansion<C> {
    pub level: u64,
    pub weight: WeightTag,
    pub group: Group,
    pub character: Option<DirichletCharacter>,
    pub constant: C,
    /// a_1..a_B
    pub coeffs: Vec<C>,
    /// Root index recorded by number-field reduction.
    pub prime_choice: Option<usize>,
}

impl<C: Coeff> QExpansion<C> {
    pub fn cusp_form(
        level: u64,
        weight: u32,
        group: Group,
        character: Option<DirichletCharacter>,
        coeffs: Vec<C>,
    ) -> Self {
        assert!(!coeffs.is_empty(), "truncation must be >= 1");
        let constant = coeffs[0].zero_like();
        QExpansion {
            level,
            weight: WeightTag::Single(weight),
            group,
            character,
            constant,
            coeffs,
            prime_choice: None,
        }
    }

    /// Truncation bound B (a_1..a_B available).
    pub fn trunc(&self) -> usize {
        self.coeffs.len()
    }

    /// a_n for 1 <= n <= B.
    pub fn coeff(&self, n: usize) -> &C {
        &self.coeffs[n - 1]
    }

    pub fn is_cuspidal(&self) -> bool {
        self.constant.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Re-declare the level (the caller asserts the expansion lives there).
    pub fn with_level(mut self, level: u64) -> Self {
        self.level = level;
        self
    }

    pub fn with_weight(mut self, weight: WeightTag) -> Self {
        self.weight = weight;
        self
    }

    fn char_value(&self, d: u64) -> Result<Option<C>, QexpError> {
        if d.gcd(&self.level) != 1 {
            return Ok(None);
        }
        match &self.character {
            Some(chi) => match chi.value(d) {
                None => Ok(None),
                Some(v) => Ok(Some(self.constant.unit_root_like(v)?)),
            },
            None => match self.group {
                Group::Gamma0 => Ok(Some(self.constant.one_like())),
                Group::Gamma1 => Err(QexpError::MissingCharacter),
            },
        }
    }

    /// Hecke operator `T_n` by the coefficient formula
    /// `a_r(T_n f) = sum_{d | gcd(n,r)} chi(d) d^(k-1) a_(nr/d^2)(f)`,
    /// with `chi(d) = 0` for `gcd(d, level) > 1` (U_l behaviour at bad
    /// primes). Output truncation is `floor(B/n)`.
    pub fn hecke_tn(&self, n: u64) -> Result<QExpansion<C>, QexpError> {
        assert!(n >= 1);
        if !self.is_cuspidal() {
            return Err(QexpError::NotCuspidal);
        }
        let Some(k) = self.weight.single() else {
            return Err(QexpError::WeightNotSingle);
        };
        let out_trunc = self.trunc() / n as usize;
        if out_trunc < 1 {
            return Err(QexpError::InsufficientTruncation {
                needed: n as usize,
                have: self.trunc(),
            });
        }
        let mut out = Vec::with_capacity(out_trunc);
        for r in 1..=out_trunc as u64 {
            let mut acc = self.constant.zero_like();
            let g = n.gcd(&r);
            for d in 1..=g {
                if g % d != 0 {
                    continue;
                }
                let Some(chi_d) = self.char_value(d)? else {
                    continue;
                };
                let idx = (n / d) * (r / d);
                let scale = BigInt::from(d).pow(k - 1);
                let term = chi_d
                    .mul(&self.constant.from_int_like(&scale))
                    .mul(self.coeff(idx as usize));
                acc = acc.add(&term);
            }
            out.push(acc);
        }
        Ok(QExpansion {
            level: self.level,
            weight: self.weight.clone(),
            group: self.group,
            character: self.character.clone(),
            constant: self.constant.zero_like(),
            coeffs: out,
            prime_choice: self.prime_choice,
        })
    }

    /// Diamond operator through the declared character eigencomponent:
    /// `<d> f = chi(d) f`.
    pub fn diamond(&self, d: u64) -> Result<QExpansion<C>, QexpError> {
        let Some(chi_d) = self.char_value(d)? else {
            return Err(QexpError::BadIndex(d));
        };
        Ok(self.scale(&chi_d))
    }

    /// The weight-uniform operator `l (T_l^2 - T_{l^2})`, which equals
    /// `l^k <l>` on a weight-k character eigencomponent. Needs truncation
    /// `l^2` times the desired output truncation.
    pub fn stroke(&self, ell: u64) -> Result<QExpansion<C>, QexpError> {
        if self.level % ell == 0 {
            return Err(QexpError::BadIndex(ell));
        }
        let t1 = self.hecke_tn(ell)?.hecke_tn(ell)?;
        let mut t2 = self.hecke_tn(ell * ell)?;
        let n = t1.trunc().min(t2.trunc());
        t2.coeffs.truncate(n);
        let ell_big = BigInt::from(ell);
        let coeffs = t1.coeffs[..n]
            .iter()
            .zip(&t2.coeffs)
            .map(|(a, b)| a.sub(b).mul(&self.constant.from_int_like(&ell_big)))
            .collect();
        Ok(QExpansion {
            level: self.level,
            weight: self.weight.clone(),
            group: self.group,
            character: self.character.clone(),
            constant: self.constant.zero_like(),
            coeffs,
            prime_choice: self.prime_choice,
        })
    }

    /// Keep `a_n` with `gcd(n, c) = 1`, zero the rest.
    pub fn restrict_support(&self, c: u64) -> QExpansion<C> {
        let mut out = self.clone();
        for (i, a) in out.coeffs.iter_mut().enumerate() {
            let n = i as u64 + 1;
            if n.gcd(&c) != 1 {
                *a = a.zero_like();
            }
        }
        out
    }

    pub fn scale(&self, c: &C) -> QExpansion<C> {
        let mut out = self.clone();
        out.constant = out.constant.mul(c);
        for a in out.coeffs.iter_mut() {
            *a = a.mul(c);
        }
        out
    }

    pub fn add(&self, o: &QExpansion<C>) -> Result<QExpansion<C>, QexpError> {
        if self.level != o.level {
            return Err(QexpError::Metadata(format!(
                "level mismatch {} vs {}",
                self.level, o.level
            )));
        }
        let n = self.trunc().min(o.trunc());
        let mut weights = match &self.weight {
            WeightTag::Single(k) => vec![*k],
            WeightTag::Multi(ks) => ks.clone(),
        };
        match &o.weight {
            WeightTag::Single(k) => weights.push(*k),
            WeightTag::Multi(ks) => weights.extend_from_slice(ks),
        }
        weights.sort();
        weights.dedup();
        let weight = if weights.len() == 1 {
            WeightTag::Single(weights[0])
        } else {
            WeightTag::Multi(weights)
        };
        Ok(QExpansion {
            level: self.level,
            weight,
            group: self.group,
            character: self.character.clone(),
            constant: self.constant.add(&o.constant),
            coeffs: (0..n).map(|i| self.coeffs[i].add(&o.coeffs[i])).collect(),
            prime_choice: None,
        })
    }

    /// Series product. The audited truncation of the product is the minimum
    /// of the two inputs' truncations; weights add (single weights only),
    /// the level becomes the lcm.
    pub fn mul_series(&self, o: &QExpansion<C>) -> Result<QExpansion<C>, QexpError> {
        let (Some(k1), Some(k2)) = (self.weight.single(), o.weight.single()) else {
            return Err(QexpError::WeightNotSingle);
        };
        let n = self.trunc().min(o.trunc());
        let zero = self.constant.zero_like();
        let mut coeffs = vec![zero.clone(); n];
        let constant = self.constant.mul(&o.constant);
        for i in 0..=n {
            let a = if i == 0 {
                &self.constant
            } else {
                self.coeff(i)
            };
            if a.is_zero() {
                continue;
            }
            for j in 0..=n - i {
                let b = if j == 0 { &o.constant } else { o.coeff(j) };
                if b.is_zero() {
                    continue;
                }
                if i + j == 0 {
                    continue; // already in constant
                }
                coeffs[i + j - 1] = coeffs[i + j - 1].add(&a.mul(b));
            }
        }
        let character = match (&self.character, &o.character) {
            (None, None) => None,
            (Some(c), None) | (None, Some(c)) => Some(c.clone()),
            (Some(c1), Some(c2)) => {
                if c1.modulus() == c2.modulus() {
                    Some(c1.mul(c2)?)
                } else {
                    return Err(QexpError::Metadata(
                        "character moduli differ in series product".into(),
                    ));
                }
            }
        };
        Ok(QExpansion {
            level: self.level.lcm(&o.level),
            weight: WeightTag::Single(k1 + k2),
            group: self.group,
            character,
            constant,
            coeffs,
            prime_choice: None,
        })
    }

    /// Integer power of a series (for Eisenstein equalizers).
    pub fn pow_series(&self, e: u32) -> Result<QExpansion<C>, QexpError> {
        let mut acc: Option<QExpansion<C>> = None;
        let mut base = self.clone();
        let mut e = e;
        if e == 0 {
            let mut one = self.clone();
            one.constant = self.constant.one_like();
            for c in one.coeffs.iter_mut() {
                *c = c.zero_like();
            }
            one.weight = WeightTag::Single(0);
            return Ok(one);
        }
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul_series(&base)?,
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul_series(&base)?;
        }
        Ok(acc.expect("e >= 1"))
    }
}

/// Sturm bound `floor(k * [SL_2(Z) : Gamma] / 12)` with the standard index
/// formulas for `Gamma_0(M)` and `Gamma_1(M)`.
pub fn sturm_bound(level: u64, weight: u32, group: Group) -> u64 {
    assert!(level >= 1 && weight >= 1);
    let mut primes = Vec::new();
    let mut m = level;
    let mut d = 2u64;
    while d * d <= m {
        if m % d == 0 {
            primes.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        primes.push(m);
    }
    let idx: u128 = match group {
        Group::Gamma0 => {
            let mut idx = level as u128;
            for p in &primes {
                idx = idx / *p as u128 * (*p as u128 + 1);
            }
            idx
        }
        Group::Gamma1 => {
            let mut idx = (level as u128) * (level as u128);
            for p in &primes {
                let p2 = (*p as u128) * (*p as u128);
                idx = idx / p2 * (p2 - 1);
            }
            idx
        }
    };
    (weight as u128 * idx / 12) as u64
}

impl QExpansion<BigInt> {
    /// Coefficientwise reduction into a ring (through the base embedding).
    pub fn reduce_mod(&self, ring: &ModRing) -> QExpansion<RingElement> {
        let pm = BigInt::from(ring.pm());
        let red = |c: &BigInt| {
            let r = c.mod_floor(&pm).to_u64().expect("residue fits u64");
            ring.embed_base(r)
        };
        QExpansion {
            level: self.level,
            weight: self.weight.clone(),
            group: self.group,
            character: self.character.clone(),
            constant: red(&self.constant),
            coeffs: self.coeffs.iter().map(red).collect(),
            prime_choice: None,
        }
    }

    pub fn to_rational(&self) -> QExpansion<BigRational> {
        QExpansion {
            level: self.level,
            weight: self.weight.clone(),
            group: self.group,
            character: self.character.clone(),
            constant: BigRational::from(self.constant.clone()),
            coeffs: self
                .coeffs
                .iter()
                .map(|c| BigRational::from(c.clone()))
                .collect(),
            prime_choice: None,
        }
    }
}

impl QExpansion<BigRational> {
    /// Coefficientwise reduction of p-integral rationals.
    pub fn reduce_mod(&self, ring: &ModRing) -> Result<QExpansion<RingElement>, QexpError> {
        let pm = BigInt::from(ring.pm());
        let p = BigInt::from(ring.p());
        let red = |c: &BigRational| -> Result<RingElement, QexpError> {
            if num_traits::Zero::is_zero(&(c.denom() % &p)) {
                return Err(QexpError::NotPIntegral);
            }
            let num = c.numer().mod_floor(&pm).to_u64().expect("fits");
            let den = c.denom().mod_floor(&pm).to_u64().expect("fits");
            let den_inv = ring
                .embed_base(den)
                .inverse()
                .map_err(|_| QexpError::NotPIntegral)?;
            Ok(ring.embed_base(num).mul(&den_inv))
        };
        Ok(QExpansion {
            level: self.level,
            weight: self.weight.clone(),
            group: self.group,
            character: self.character.clone(),
            constant: red(&self.constant)?,
            coeffs: self.coeffs.iter().map(red).collect::<Result<_, _>>()?,
            prime_choice: None,
        })
    }

    /// Exact integer form when all coefficients are integral.
    pub fn to_integer(&self) -> Option<QExpansion<BigInt>> {
        if !self.constant.denom().is_one() || self.coeffs.iter().any(|c| !c.denom().is_one()) {
            return None;
        }
        Some(QExpansion {
            level: self.level,
            weight: self.weight.clone(),
            group: self.group,
            character: self.character.clone(),
            constant: self.constant.numer().clone(),
            coeffs: self.coeffs.iter().map(|c| c.numer().clone()).collect(),
            prime_choice: None,
        })
    }
}

impl QExpansion<NfElem> {
    /// Number of available prime choices (roots of the defining polynomial
    /// in the target ring).
    pub fn prime_choices(&self, ring: &ModRing) -> Result<usize, QexpError> {
        let poly = &self.coeffs[0].poly;
        Ok(roots_in_ring(poly, ring)?.len())
    }

    /// Reduce through the `choice`-th root (canonical ordering); the index
    /// is recorded in the output metadata.
    pub fn reduce_mod(
        &self,
        ring: &ModRing,
        choice: usize,
    ) -> Result<QExpansion<RingElement>, QexpError> {
        let poly = &self.coeffs[0].poly;
        let roots = roots_in_ring(poly, ring)?;
        let root = roots
            .get(choice)
            .ok_or(NfError::BadRootIndex(choice, roots.len()))?;
        Ok(QExpansion {
            level: self.level,
            weight: self.weight.clone(),
            group: self.group,
            character: self.character.clone(),
            constant: self.constant.reduce_at_root(root)?,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| c.reduce_at_root(root))
                .collect::<Result<_, _>>()?,
            prime_choice: Some(choice),
        })
    }
}

impl QExpansion<RingElement> {
    /// Coefficientwise equality up to the common truncation.
    pub fn congruent_to(&self, o: &QExpansion<RingElement>) -> bool {
        let n = self.trunc().min(o.trunc());
        self.constant == o.constant && (0..n).all(|i| self.coeffs[i] == o.coeffs[i])
    }
}
