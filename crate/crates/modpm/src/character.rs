//! Dirichlet characters with exact root-of-unity values.
//!
//! A character is stored by its exponent vector on a canonical generating
//! set of `(Z/M)^x`; values are abstract roots of unity `zeta_L^t` and can
//! be materialized in a coefficient ring when that ring contains the needed
//! roots (prime-to-p orders through Teichmueller representatives, p-power
//! orders through the cyclotomic generator). Root choices are explicit and
//! reported, never guessed.

use num_integer::Integer;

use thiserror::Error;

use crate::ring::{FieldKind, ModRing, RingElement, RingError};

#[derive(Debug, Error)]
pub enum CharError {
    #[error("bad character specification: {0}")]
    BadSpec(String),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("character value of order {0} cannot live in {1}")]
    ValueNotRepresentable(u64, String),
    #[error("root choice {0} is not coprime to the root order {1}")]
    BadRootChoice(u64, u64),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// One generator of `(Z/M)^x` with its order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UnitGen {
    pub g: u64,
    pub order: u64,
}

/// Canonical generators of `(Z/M)^x`: for each odd prime power factor
/// `q^e` (ascending `q`) the smallest primitive root mod `q^e`, CRT-lifted;
/// for the 2-part, `-1` and `5` as usual.
pub fn unit_group_gens(modulus: u64) -> Vec<UnitGen> {
    assert!(modulus >= 1);
    let mut gens = Vec::new();
    let mut m = modulus;
    let mut two_e = 0u32;
    while m % 2 == 0 {
        m /= 2;
        two_e += 1;
    }
    let mut odd_factors = Vec::new();
    let mut q = 3u64;
    let mut rest = m;
    while q * q <= rest {
        if rest % q == 0 {
            let mut qe = 1u64;
            while rest % q == 0 {
                rest /= q;
                qe *= q;
            }
            odd_factors.push((q, qe));
        }
        q += 2;
    }
    if rest > 1 {
        odd_factors.push((rest, rest));
    }
    odd_factors.sort();
    let two_part = 1u64 << two_e;
    if two_e == 2 {
        gens.push(UnitGen {
            g: crt_lift(3, two_part, modulus),
            order: 2,
        });
    } else if two_e >= 3 {
        gens.push(UnitGen {
            g: crt_lift(two_part - 1, two_part, modulus),
            order: 2,
        });
        gens.push(UnitGen {
            g: crt_lift(5 % two_part, two_part, modulus),
            order: two_part / 4,
        });
    }
    for (qp, qe) in odd_factors {
        let g = smallest_primitive_root(qp, qe);
        let order = qe / qp * (qp - 1);
        gens.push(UnitGen {
            g: crt_lift(g, qe, modulus),
            order,
        });
    }
    gens
}

/// Lift `a mod f` to the residue mod `modulus` that is `a` mod `f` and `1`
/// mod `modulus/f` (requires `gcd(f, modulus/f) = 1`).
fn crt_lift(a: u64, f: u64, modulus: u64) -> u64 {
    let cof = modulus / f;
    debug_assert_eq!(f.gcd(&cof), 1);
    if cof == 1 {
        return a % modulus;
    }
    // x = 1 + cof * t with cof * t = a - 1 mod f
    let inv_cof = mod_inverse(cof % f, f);
    let am1 = (a + f - 1) % f;
    let x = 1 + cof as u128 * ((am1 as u128 * inv_cof as u128) % f as u128);
    (x % modulus as u128) as u64
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    let mut t = (0i128, 1i128);
    let mut r = (m as i128, (a % m) as i128);
    while r.1 != 0 {
        let q = r.0 / r.1;
        t = (t.1, t.0 - q * t.1);
        r = (r.1, r.0 - q * r.1);
    }
    assert_eq!(r.0, 1, "{a} not invertible mod {m}");
    t.0.rem_euclid(m as i128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * a as u128 % m as u128) as u64;
        }
        a = (a as u128 * a as u128 % m as u128) as u64;
        e >>= 1;
    }
    acc
}

fn multiplicative_order(a: u64, m: u64, group_order: u64) -> u64 {
    let mut ord = group_order;
    let mut d = 2u64;
    let mut rest = group_order;
    let mut primes = Vec::new();
    while d * d <= rest {
        if rest % d == 0 {
            primes.push(d);
            while rest % d == 0 {
                rest /= d;
            }
        }
        d += 1;
    }
    if rest > 1 {
        primes.push(rest);
    }
    for p in primes {
        while ord % p == 0 && pow_mod(a, ord / p, m) == 1 {
            ord /= p;
        }
    }
    ord
}

fn smallest_primitive_root(q: u64, qe: u64) -> u64 {
    let group = qe / q * (q - 1);
    for g in 2..qe {
        if g % q == 0 {
            continue;
        }
        if multiplicative_order(g, qe, group) == group {
            return g;
        }
    }
    unreachable!("(Z/q^e)^x is cyclic for odd q")
}

fn dlog(base: u64, order: u64, target: u64, modulus: u64) -> Option<u64> {
    let mut acc = 1 % modulus;
    for x in 0..order {
        if acc == target % modulus {
            return Some(x);
        }
        acc = (acc as u128 * base as u128 % modulus as u128) as u64;
    }
    None
}

/// An abstract root of unity `zeta_order^power`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct RootOfUnity {
    pub order: u64,
    pub power: u64,
}

impl RootOfUnity {
    pub fn one() -> Self {
        RootOfUnity { order: 1, power: 0 }
    }

    /// Reduce to coprime (order, power) with power < order.
    pub fn reduced(self) -> Self {
        let p = self.power % self.order;
        if p == 0 {
            return RootOfUnity::one();
        }
        let g = p.gcd(&self.order);
        RootOfUnity {
            order: self.order / g,
            power: p / g,
        }
    }

    pub fn is_one(&self) -> bool {
        self.power % self.order == 0
    }

    pub fn is_minus_one(&self) -> bool {
        let r = self.reduced();
        r.order == 2 && r.power == 1
    }

    pub fn mul(&self, other: &RootOfUnity) -> RootOfUnity {
        let l = self.order.lcm(&other.order);
        RootOfUnity {
            order: l,
            power: (self.power * (l / self.order) + other.power * (l / other.order)) % l,
        }
        .reduced()
    }

    pub fn pow(&self, k: u64) -> RootOfUnity {
        RootOfUnity {
            order: self.order,
            power: ((self.power as u128 * k as u128) % self.order as u128) as u64,
        }
        .reduced()
    }
}

/// A Dirichlet character, stored via exponents on the canonical generators.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DirichletCharacter {
    modulus: u64,
    gens: Vec<UnitGen>,
    exps: Vec<u64>,
}

impl DirichletCharacter {
    pub fn trivial(modulus: u64) -> Self {
        let gens = unit_group_gens(modulus);
        let exps = vec![0; gens.len()];
        DirichletCharacter {
            modulus,
            gens,
            exps,
        }
    }

    /// Build from exponents on the canonical generators (entry `i` defines
    /// `chi(g_i) = zeta_{order_i}^{exps_i}`).
    pub fn from_exps(modulus: u64, exps: Vec<u64>) -> Result<Self, CharError> {
        let gens = unit_group_gens(modulus);
        if exps.len() != gens.len() {
            return Err(CharError::BadSpec(format!(
                "modulus {} has {} canonical generators, got {} exponents",
                modulus,
                gens.len(),
                exps.len()
            )));
        }
        let exps = exps.iter().zip(&gens).map(|(&e, g)| e % g.order).collect();
        Ok(DirichletCharacter {
            modulus,
            gens,
            exps,
        })
    }

    /// Parse `"none"` / `"1"` (trivial) or `"<modulus>:<e1>,<e2>,..."`.
    pub fn parse(text: &str, default_modulus: Option<u64>) -> Result<Option<Self>, CharError> {
        let t = text.trim();
        if t == "none" {
            return Ok(None);
        }
        if t == "1" || t == "trivial" {
            let m = default_modulus
                .ok_or_else(|| CharError::BadSpec("trivial character needs a modulus".into()))?;
            return Ok(Some(Self::trivial(m)));
        }
        let (ms, es) = t
            .split_once(':')
            .ok_or_else(|| CharError::BadSpec(format!("expected <mod>:<exps>, got {t}")))?;
        let m: u64 = ms
            .parse()
            .map_err(|_| CharError::BadSpec(format!("bad modulus {ms}")))?;
        if es.is_empty() || es == "trivial" {
            return Ok(Some(Self::trivial(m)));
        }
        let exps: Result<Vec<u64>, _> = es.split(',').map(str::parse).collect();
        let exps = exps.map_err(|_| CharError::BadSpec(format!("bad exponent list {es}")))?;
        Ok(Some(Self::from_exps(m, exps)?))
    }

    pub fn spec_string(&self) -> String {
        if self.exps.is_empty() {
            return format!("{}:trivial", self.modulus);
        }
        format!(
            "{}:{}",
            self.modulus,
            self.exps
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(",")
        )
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn generators(&self) -> &[UnitGen] {
        &self.gens
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exps
    }

    pub fn is_trivial(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    /// Order of the character.
    pub fn order(&self) -> u64 {
        let mut l = 1u64;
        for (g, &e) in self.gens.iter().zip(&self.exps) {
            if e > 0 {
                l = l.lcm(&(g.order / g.order.gcd(&e)));
            }
        }
        l
    }

    /// Joint discrete log of `a` over the canonical generators.
    fn decompose_unit(&self, a: u64) -> Option<Vec<u64>> {
        let a = a % self.modulus;
        if self.modulus == 1 {
            return Some(vec![]);
        }
        if a.gcd(&self.modulus) != 1 {
            return None;
        }
        // odd-part generators each live in one CRT factor; the 2-part may
        // need a joint search, so verify and fall back
        let mut out = Vec::with_capacity(self.gens.len());
        for g in &self.gens {
            let f = factor_modulus_of(g, self.modulus);
            let x = if f == 1 {
                0
            } else {
                dlog(g.g % f, g.order, a % f, f).unwrap_or(0)
            };
            out.push(x);
        }
        let mut acc = 1u64;
        for (g, &x) in self.gens.iter().zip(&out) {
            acc =
                (acc as u128 * pow_mod(g.g, x, self.modulus) as u128 % self.modulus as u128) as u64;
        }
        if acc == a {
            return Some(out);
        }
        self.decompose_search(a)
    }

    fn decompose_search(&self, a: u64) -> Option<Vec<u64>> {
        let mut exps = vec![0u64; self.gens.len()];
        loop {
            let mut acc = 1u64;
            for (g, &x) in self.gens.iter().zip(&exps) {
                acc = (acc as u128 * pow_mod(g.g, x, self.modulus) as u128 % self.modulus as u128)
                    as u64;
            }
            if acc == a % self.modulus {
                return Some(exps);
            }
            let mut k = 0;
            loop {
                if k == exps.len() {
                    return None;
                }
                exps[k] += 1;
                if exps[k] < self.gens[k].order {
                    break;
                }
                exps[k] = 0;
                k += 1;
            }
        }
    }

    /// `chi(a)` as an abstract root of unity; `None` when `gcd(a, M) > 1`.
    pub fn value(&self, a: u64) -> Option<RootOfUnity> {
        let xs = self.decompose_unit(a)?;
        let mut v = RootOfUnity::one();
        for ((g, &e), &x) in self.gens.iter().zip(&self.exps).zip(&xs) {
            v = v.mul(&RootOfUnity {
                order: g.order,
                power: ((e as u128 * x as u128) % g.order as u128) as u64,
            });
        }
        Some(v)
    }

    /// `chi(a)` when rational: `Some(1)` or `Some(-1)`; `None` on gcd > 1;
    /// error if the value has order greater than 2.
    pub fn value_rational(&self, a: u64) -> Result<Option<i64>, CharError> {
        match self.value(a) {
            None => Ok(None),
            Some(v) if v.is_one() => Ok(Some(1)),
            Some(v) if v.is_minus_one() => Ok(Some(-1)),
            Some(v) => Err(CharError::ValueNotRepresentable(
                v.order,
                "the integers".into(),
            )),
        }
    }

    /// Product of two characters mod the same modulus.
    pub fn mul(&self, other: &DirichletCharacter) -> Result<DirichletCharacter, CharError> {
        if self.modulus != other.modulus {
            return Err(CharError::ModulusMismatch(self.modulus, other.modulus));
        }
        let exps = self
            .exps
            .iter()
            .zip(&other.exps)
            .zip(&self.gens)
            .map(|((&a, &b), g)| (a + b) % g.order)
            .collect();
        Ok(DirichletCharacter {
            modulus: self.modulus,
            gens: self.gens.clone(),
            exps,
        })
    }

    pub fn pow(&self, k: u64) -> DirichletCharacter {
        let exps = self
            .exps
            .iter()
            .zip(&self.gens)
            .map(|(&e, g)| ((e as u128 * k as u128) % g.order as u128) as u64)
            .collect();
        DirichletCharacter {
            modulus: self.modulus,
            gens: self.gens.clone(),
            exps,
        }
    }

    /// View a character of modulus `N` at a larger modulus `M` (composition
    /// with the projection `(Z/M)^x -> (Z/N)^x`).
    pub fn lift_to(&self, modulus: u64) -> Result<DirichletCharacter, CharError> {
        if modulus % self.modulus != 0 {
            return Err(CharError::ModulusMismatch(self.modulus, modulus));
        }
        let gens = unit_group_gens(modulus);
        let mut exps = Vec::with_capacity(gens.len());
        for g in &gens {
            let v = self
                .value(g.g % self.modulus)
                .ok_or_else(|| CharError::BadSpec("generator not a unit at lower level".into()))?;
            if g.order % v.order != 0 {
                return Err(CharError::BadSpec(format!(
                    "value order {} does not divide generator order {}",
                    v.order, g.order
                )));
            }
            exps.push(v.power * (g.order / v.order) % g.order);
        }
        Ok(DirichletCharacter {
            modulus,
            gens,
            exps,
        })
    }

    /// Conductor: the smallest `c | M` such that the character factors
    /// through `(Z/c)^x`. Exhaustive over units; intended for desk-scale
    /// moduli.
    pub fn conductor(&self) -> u64 {
        let mut divs: Vec<u64> = (1..=self.modulus)
            .filter(|d| self.modulus % d == 0)
            .collect();
        divs.sort();
        'outer: for c in divs {
            for a in 1..self.modulus {
                if a.gcd(&self.modulus) == 1 && a % c == 1 % c {
                    if let Some(v) = self.value(a) {
                        if !v.is_one() {
                            continue 'outer;
                        }
                    }
                }
            }
            return c;
        }
        self.modulus
    }

    /// Materialize `chi(a)` in a coefficient ring. `root_choice = (j1, j2)`
    /// replaces the canonical prime-to-p root of unity by its `j1`-th power
    /// and the p-power root by its `j2`-th power.
    pub fn value_in_ring(
        &self,
        a: u64,
        ring: &ModRing,
        root_choice: (u64, u64),
    ) -> Result<Option<RingElement>, CharError> {
        match self.value(a) {
            None => Ok(None),
            Some(v) => Ok(Some(root_of_unity_in_ring(ring, v, root_choice)?)),
        }
    }

    /// Order of the character composed with reduction into `ring` (the
    /// "order mod p^m").
    pub fn order_in_ring(&self, ring: &ModRing, root_choice: (u64, u64)) -> Result<u64, CharError> {
        let mut ord = 1u64;
        for g in &self.gens {
            let v = self
                .value_in_ring(g.g, ring, root_choice)?
                .expect("generators are units");
            ord = ord.lcm(&element_mult_order(&v, self.order().max(1)));
        }
        Ok(ord)
    }
}

/// Multiplicative order of a unit whose order divides `bound`.
fn element_mult_order(v: &RingElement, bound: u64) -> u64 {
    let one = v.ring().one();
    let mut divs: Vec<u64> = (1..=bound).filter(|d| bound % d == 0).collect();
    divs.sort();
    for d in divs {
        if v.pow(d) == one {
            return d;
        }
    }
    panic!("element order does not divide the declared bound");
}

/// Materialize `zeta_order^power` in `ring`. The prime-to-p part needs the
/// residue field to contain those roots; the p-part needs a cyclotomic
/// component of sufficient level.
pub fn root_of_unity_in_ring(
    ring: &ModRing,
    root: RootOfUnity,
    root_choice: (u64, u64),
) -> Result<RingElement, CharError> {
    let root = root.reduced();
    if root.is_one() {
        return Ok(ring.one());
    }
    let p = ring.p();
    let mut p_part = 1u64;
    let mut p_exp = 0u32;
    let mut prime_to_p = root.order;
    while prime_to_p % p == 0 {
        prime_to_p /= p;
        p_part *= p;
        p_exp += 1;
    }
    let (j1, j2) = root_choice;
    if j1.gcd(&prime_to_p) != 1 {
        return Err(CharError::BadRootChoice(j1, prime_to_p));
    }
    if p_part > 1 && j2.gcd(&p) != 1 {
        return Err(CharError::BadRootChoice(j2, p_part));
    }

    let a1 = if prime_to_p == 1 {
        ring.one()
    } else {
        let f = ring.spec().f_res();
        let res_order = p.pow(f) - 1;
        if res_order % prime_to_p != 0 {
            return Err(CharError::ValueNotRepresentable(
                root.order,
                ring.to_string(),
            ));
        }
        let gen = residue_field_generator(ring)?;
        gen.pow(res_order / prime_to_p).pow(j1)
    };
    let a2 = if p_part == 1 {
        ring.one()
    } else {
        let s_ring = match ring.spec().kind {
            FieldKind::Cyclotomic { s } | FieldKind::Compositum { s, .. } => s,
            FieldKind::Unramified { .. } => 0,
        };
        if s_ring < p_exp {
            return Err(CharError::ValueNotRepresentable(
                root.order,
                ring.to_string(),
            ));
        }
        let z = ring.zeta().expect("ramified ring has zeta");
        z.pow(p.pow(s_ring - p_exp)).pow(j2)
    };
    // zeta_order = a1^{inv(p_part) mod prime_to_p} * a2^{inv(prime_to_p) mod p_part}
    let zeta = if prime_to_p == 1 {
        a2
    } else if p_part == 1 {
        a1
    } else {
        let e1 = mod_inverse(p_part % prime_to_p, prime_to_p);
        let e2 = mod_inverse(prime_to_p % p_part, p_part);
        a1.pow(e1).mul(&a2.pow(e2))
    };
    Ok(zeta.pow(root.power))
}

/// Canonical multiplicative generator of the residue field, as its
/// Teichmueller representative: the first unit in coordinate order whose
/// Teichmueller lift has multiplicative order `p^f - 1`.
fn residue_field_generator(ring: &ModRing) -> Result<RingElement, CharError> {
    let p = ring.p();
    let f = ring.spec().f_res();
    let target = p.pow(f) - 1;
    if f == 1 {
        for g in 1..p {
            if multiplicative_order(g, p, p - 1) == p - 1 {
                return Ok(ring.teichmuller(g)?);
            }
        }
        unreachable!("(Z/p)^x is cyclic");
    }
    let u = ring
        .unram_gen()
        .expect("f > 1 ring has unramified generator");
    let mut c = vec![0u64; f as usize];
    loop {
        let mut k = 0;
        loop {
            if k == c.len() {
                return Err(CharError::ValueNotRepresentable(target, ring.to_string()));
            }
            c[k] += 1;
            if c[k] < p {
                break;
            }
            c[k] = 0;
            k += 1;
        }
        let mut x = ring.zero();
        for (i, &ci) in c.iter().enumerate() {
            if ci != 0 {
                x = x.add(&u.pow(i as u64).scale(ci));
            }
        }
        if !x.is_zero() && x.is_unit() {
            let t = ring.teichmuller_of(&x)?;
            if element_mult_order(&t, target) == target {
                return Ok(t);
            }
        }
    }
}

fn factor_modulus_of(g: &UnitGen, modulus: u64) -> u64 {
    // the CRT factor where g is nontrivial: the prime-power divisor of the
    // modulus where g is not congruent to 1
    let mut best = 1u64;
    let mut m = modulus;
    let mut q = 2u64;
    while q * q <= m {
        if m % q == 0 {
            let mut qe = 1;
            while m % q == 0 {
                m /= q;
                qe *= q;
            }
            if g.g % qe != 1 {
                best = best.max(qe);
            }
        }
        q += 1;
    }
    if m > 1 && g.g % m != 1 {
        best = best.max(m);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::LocalFieldSpec;
    use num_integer::Integer;

    #[test]
    fn unit_gens_give_full_group() {
        for m in [1u64, 2, 3, 4, 5, 8, 9, 12, 16, 26, 45, 52, 72, 100] {
            let gens = unit_group_gens(m);
            let phi: u64 = (1..=m).filter(|a| a.gcd(&m) == 1).count() as u64;
            let prod: u64 = gens.iter().map(|g| g.order).product();
            assert_eq!(prod, phi.max(1), "order product mismatch for modulus {m}");
            for g in &gens {
                assert_eq!(g.g.gcd(&m), 1);
                assert_eq!(multiplicative_order(g.g, m, g.order), g.order);
            }
        }
    }

    #[test]
    fn multiplicativity_exhaustive() {
        for m in [5u64, 8, 9, 12, 26, 45, 52] {
            let gens = unit_group_gens(m);
            let exps: Vec<u64> = gens.iter().map(|g| 1 % g.order).collect();
            let chi = DirichletCharacter::from_exps(m, exps).unwrap();
            for a in 0..m {
                for b in 0..m {
                    let vab = chi.value(a * b % m);
                    match (chi.value(a), chi.value(b)) {
                        (Some(x), Some(y)) => {
                            assert_eq!(vab.unwrap(), x.mul(&y), "chi({a})chi({b}) m={m}")
                        }
                        _ => assert!((a * b % m).gcd(&m) != 1 && vab.is_none()),
                    }
                }
            }
            for a in 0..m {
                assert_eq!(chi.value(a).is_none(), a.gcd(&m) != 1);
            }
        }
    }

    #[test]
    fn quadratic_character_mod_5() {
        // the order-2 character mod 5: squares to 1, non-squares to -1
        let chi = DirichletCharacter::from_exps(5, vec![2]).unwrap();
        assert_eq!(chi.order(), 2);
        for a in 1..5u64 {
            let v = chi.value_rational(a).unwrap().unwrap();
            // Euler criterion: a^((5-1)/2) mod 5
            let euler = pow_mod(a, 2, 5);
            assert_eq!(v, if euler == 1 { 1 } else { -1 }, "at {a}");
        }
    }

    #[test]
    fn conductor_examples() {
        assert_eq!(DirichletCharacter::trivial(12).conductor(), 1);
        // quadratic character mod 9 (the omega part) has conductor 3
        let gens = unit_group_gens(9);
        assert_eq!(gens.len(), 1);
        assert_eq!(gens[0].order, 6);
        let chi = DirichletCharacter::from_exps(9, vec![3]).unwrap();
        assert_eq!(chi.order(), 2);
        assert_eq!(chi.conductor(), 3);
        // order-3 character mod 9 has conductor 9
        let eta = DirichletCharacter::from_exps(9, vec![2]).unwrap();
        assert_eq!(eta.order(), 3);
        assert_eq!(eta.conductor(), 9);
    }

    #[test]
    fn lift_and_values_agree() {
        let chi5 = DirichletCharacter::from_exps(5, vec![2]).unwrap();
        let chi45 = chi5.lift_to(45).unwrap();
        for a in 1..45u64 {
            if a.gcd(&45) == 1 {
                assert_eq!(chi45.value(a), chi5.value(a % 5));
            }
        }
        assert_eq!(chi45.conductor(), 5);
    }

    #[test]
    fn materialize_order_3_value_mod_9() {
        // order-3 character on (Z/9)^x in Z_3[zeta_3] at precision m=2
        let ring = ModRing::new(LocalFieldSpec::cyclotomic(3, 1).unwrap(), 2).unwrap();
        let eta = DirichletCharacter::from_exps(9, vec![2]).unwrap();
        let g = unit_group_gens(9)[0].g;
        let v = eta.value_in_ring(g, &ring, (1, 1)).unwrap().unwrap();
        assert_ne!(v, ring.one());
        assert_eq!(v.pow(3), ring.one());
        assert_eq!(eta.order_in_ring(&ring, (1, 1)).unwrap(), 3);
        // at precision m=1 the p-power part collapses to 1
        let ring1 = ModRing::new(LocalFieldSpec::cyclotomic(3, 1).unwrap(), 1).unwrap();
        assert_eq!(eta.order_in_ring(&ring1, (1, 1)).unwrap(), 1);
    }

    #[test]
    fn teichmuller_values_in_rings() {
        // order-4 values live in Z/25 via Teichmueller
        let ring = ModRing::zp(5, 2).unwrap();
        let chi = DirichletCharacter::from_exps(5, vec![1]).unwrap();
        assert_eq!(chi.order(), 4);
        let v = chi.value_in_ring(2, &ring, (1, 1)).unwrap().unwrap();
        assert_eq!(v.pow(4), ring.one());
        assert_ne!(v.pow(2), ring.one());
        // an order-3 value cannot live in Z/25
        let chi7 = DirichletCharacter::from_exps(7, vec![2]).unwrap();
        assert_eq!(chi7.order(), 3);
        assert!(chi7.value_in_ring(2, &ring, (1, 1)).is_err());
        // but it lives in the unramified quadratic extension (3 | 5^2 - 1)
        let ring2 = ModRing::new(LocalFieldSpec::unramified(5, 2, None).unwrap(), 2).unwrap();
        let v = chi7.value_in_ring(2, &ring2, (1, 1)).unwrap().unwrap();
        assert_eq!(v.pow(3), ring2.one());
        assert_ne!(v, ring2.one());
    }

    #[test]
    fn parse_spec_strings() {
        assert!(DirichletCharacter::parse("none", None).unwrap().is_none());
        let t = DirichletCharacter::parse("1", Some(26)).unwrap().unwrap();
        assert!(t.is_trivial());
        let chi = DirichletCharacter::parse("9:2", None).unwrap().unwrap();
        assert_eq!(chi.order(), 3);
        assert_eq!(chi.spec_string(), "9:2");
        assert!(DirichletCharacter::parse("9:1,2", None).is_err());
    }
}
