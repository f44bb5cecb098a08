//! Nebentypus decomposition `chi = psi omega^i eta` and the determinant
//! obstruction to weakly arising from level N.
//!
//! For odd p and p not dividing N, characters modulo `N p^r` split along
//! `(Z/Np^r)^x = (Z/N)^x x (Z/p^r)^x`, and the p-part splits further into
//! the Teichmueller power `omega^i` (order dividing p-1) and a p-power
//! order part `eta`. For `m >= 2` a nontrivial `eta` takes values outside
//! the image of `Z/p^m` in the cyclotomic quotient, which blocks the
//! determinant of any candidate level-N weak eigenform. The verdict is
//! decided by materializing the values and testing subring membership; the
//! shortcut "m >= 2 and eta nontrivial" is cross-checked against it.

use num_integer::Integer;
use thiserror::Error;

use crate::character::{unit_group_gens, CharError, DirichletCharacter};
use crate::classify::EigenSystem;
use crate::ring::{LocalFieldSpec, ModRing, RingElement, RingError};

#[derive(Debug, Error)]
pub enum NebentypusError {
    #[error("p = 2 is not supported here (the decomposition needs odd p)")]
    EvenPrime,
    #[error("{0} is not an odd prime")]
    BadPrime(u64),
    #[error("l = {0} is not usable (shares a factor with D, the level, or p, or out of bound)")]
    BadEll(u64),
    #[error("determinant data needs stroke values at l and l^2 within the bound")]
    MissingValues,
    #[error("determinant consistency l * det = stroke eigenvalue fails at l = {0}")]
    Inconsistent(u64),
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// `chi = psi omega^i eta` with `psi` of conductor dividing N, `omega` the
/// Teichmueller character, and `eta` of p-power order and conductor.
#[derive(Clone, Debug)]
pub struct CharacterDecomposition {
    pub chi: DirichletCharacter,
    pub p: u64,
    pub r: u32,
    pub psi: DirichletCharacter,
    pub teichmuller_exponent: u64,
    pub eta: DirichletCharacter,
    /// eta has order p^s.
    pub s: u32,
}

/// Decompose a character modulo `N p^r` (p odd, p not dividing N).
pub fn decompose_character(
    chi: &DirichletCharacter,
    p: u64,
) -> Result<CharacterDecomposition, NebentypusError> {
    if p == 2 {
        return Err(NebentypusError::EvenPrime);
    }
    if !crate::classify::is_prime(p) {
        return Err(NebentypusError::BadPrime(p));
    }
    let modulus = chi.modulus();
    let mut r = 0u32;
    let mut n = modulus;
    while n % p == 0 {
        n /= p;
        r += 1;
    }
    // psi: restriction to the N-part (chi on units congruent to 1 mod p^r)
    let n_gens = unit_group_gens(n);
    let pr = modulus / n;
    let mut psi_exps = Vec::with_capacity(n_gens.len());
    for g in &n_gens {
        // lift to a unit mod modulus that is g mod N and 1 mod p^r
        let lifted = crt(g.g, n, 1, pr);
        let v = chi.value(lifted).expect("lift is a unit");
        psi_exps.push(if v.is_one() {
            0
        } else {
            assert_eq!(g.order % v.order, 0, "value order divides generator order");
            v.power * (g.order / v.order)
        });
    }
    let psi = DirichletCharacter::from_exps(n, psi_exps)?;

    // p-part: chi on units congruent to 1 mod N
    let (teich_exp, eta, s) = if r == 0 {
        (0, DirichletCharacter::trivial(p), 0)
    } else {
        let p_gens = unit_group_gens(pr);
        assert_eq!(p_gens.len(), 1, "(Z/p^r)^x is cyclic for odd p");
        let g = &p_gens[0];
        let lifted = crt(1, n, g.g, pr);
        let v = chi.value(lifted).expect("lift is a unit");
        // exponent of chi_p on the generator, against order phi(p^r)
        let c = if v.is_one() {
            0
        } else {
            v.power * (g.order / v.order)
        };
        // split c along phi(p^r) = (p-1) p^(r-1)
        let a = p - 1;
        let b = p.pow(r - 1);
        // idempotent split: c = c_a + c_b with c_a killing the p-part
        let (e_a, e_b) = idempotents(a, b);
        let c_a = (c as u128 * e_a as u128 % g.order as u128) as u64;
        let c_b = (c as u128 * e_b as u128 % g.order as u128) as u64;
        // omega component: chi_1(g) = zeta_(p-1)^(c_a / b); omega(g) = zeta_(p-1)
        let i = (c_a / b) % a;
        let eta = DirichletCharacter::from_exps(pr, vec![c_b])?;
        let ord = eta.order();
        let mut s = 0u32;
        let mut o = ord;
        while o > 1 {
            assert_eq!(o % p, 0, "eta must have p-power order");
            o /= p;
            s += 1;
        }
        (i, eta, s)
    };
    Ok(CharacterDecomposition {
        chi: chi.clone(),
        p,
        r,
        psi,
        teichmuller_exponent: teich_exp,
        eta,
        s,
    })
}

/// x = a mod m1, x = b mod m2 (coprime moduli).
fn crt(a: u64, m1: u64, b: u64, m2: u64) -> u64 {
    if m1 == 1 {
        return b % m2.max(1);
    }
    if m2 == 1 {
        return a % m1;
    }
    let m = m1 * m2;
    for x in 0..m {
        if x % m1 == a % m1 && x % m2 == b % m2 {
            return x;
        }
    }
    unreachable!("crt over coprime moduli")
}

/// e_a = 1 mod a, 0 mod b; e_b = 1 - e_a (as residues mod a*b).
fn idempotents(a: u64, b: u64) -> (u64, u64) {
    let m = a * b;
    let mut e_a = 0;
    for x in 0..m {
        if x % a == 1 % a && x % b == 0 {
            e_a = x;
            break;
        }
    }
    (e_a, (m + 1 - e_a) % m)
}

impl CharacterDecomposition {
    /// Recompose and compare against chi on every unit (exhaustive).
    pub fn verify(&self) -> Result<bool, NebentypusError> {
        let modulus = self.chi.modulus();
        let psi_l = self.psi.lift_to(modulus)?;
        let eta_l = self.eta.lift_to(modulus)?;
        // omega^i as a character mod p (conductor p), lifted
        let omega_i = omega_power(self.p, self.teichmuller_exponent)?.lift_to(modulus)?;
        let prod = psi_l.mul(&omega_i)?.mul(&eta_l)?;
        for a in 1..modulus {
            if a.gcd(&modulus) == 1 && prod.value(a) != self.chi.value(a) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The Teichmueller character `omega^i` as a Dirichlet character mod p:
/// on the canonical generator g of `(Z/p)^x`, `omega(g) = zeta_(p-1)`.
pub fn omega_power(p: u64, i: u64) -> Result<DirichletCharacter, NebentypusError> {
    Ok(DirichletCharacter::from_exps(p, vec![i % (p - 1)])?)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Obstruction {
    Blocked,
    NotBlockedByThisTest,
}

impl std::fmt::Display for Obstruction {
    fn fmt(&self, w: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Obstruction::Blocked => write!(w, "blocked"),
            Obstruction::NotBlockedByThisTest => write!(w, "not_blocked_by_this_test"),
        }
    }
}

pub struct ObstructionReport {
    pub verdict: Obstruction,
    /// Values of eta on the generators of `(Z/p^r)^x`, materialized in the
    /// cyclotomic ring, with the subring test outcome per generator.
    pub generator_tests: Vec<(u64, bool)>,
    /// The ring in which values were materialized.
    pub ring_description: String,
    /// Shortcut prediction ("m >= 2 and eta nontrivial"), which must agree
    /// with the materialized verdict.
    pub shortcut_agrees: bool,
}

/// The determinant obstruction: materialize eta's values in the cyclotomic
/// ring at precision m and test membership in the image of `Z/p^m`; blocked
/// when some value falls outside. The shortcut "m >= 2 and eta != 1" is
/// cross-checked against the materialized test.
pub fn obstruction_check(
    decomp: &CharacterDecomposition,
    m: u32,
) -> Result<ObstructionReport, NebentypusError> {
    let p = decomp.p;
    let s = decomp.s.max(1);
    let ring = ModRing::new(LocalFieldSpec::cyclotomic(p, s)?, m)?;
    let pr = p.pow(decomp.r.max(1));
    let mut generator_tests = Vec::new();
    let mut blocked = false;
    for g in unit_group_gens(pr) {
        let val = decomp
            .eta
            .value_in_ring(g.g, &ring, (1, 1))?
            .expect("generator is a unit");
        let inside = ring.in_base_subring(&val).is_some();
        if !inside {
            blocked = true;
        }
        generator_tests.push((g.g, inside));
    }
    let verdict = if blocked {
        Obstruction::Blocked
    } else {
        Obstruction::NotBlockedByThisTest
    };
    let shortcut = m >= 2 && !decomp.eta.is_trivial();
    Ok(ObstructionReport {
        verdict,
        generator_tests,
        ring_description: ring.to_string(),
        shortcut_agrees: shortcut == blocked,
    })
}

/// Determinant bookkeeping value `l^(k-1) chi(l)` of an eigen system with
/// declared weight and nebentypus, verified against the stroke eigenvalue
/// through `l * det = l (T_l^2 - T_(l^2))`-eigenvalue.
pub fn det_data(
    e: &EigenSystem,
    weight: u32,
    chi: &DirichletCharacter,
    ell: u64,
    ring: &ModRing,
) -> Result<RingElement, NebentypusError> {
    if !crate::classify::is_prime(ell) {
        return Err(NebentypusError::BadEll(ell));
    }
    let chi_l = match chi.value_in_ring(ell, ring, (1, 1))? {
        Some(v) => v,
        None => return Err(NebentypusError::BadEll(ell)),
    };
    let base = ring.embed_base(ell % ring.pm());
    let det = base.pow(weight as u64 - 1).mul(&chi_l);
    // consistency: l * det = stroke eigenvalue l (a_l^2 - a_(l^2))
    let (Some(al), Some(al2)) = (e.values.get(&ell), e.values.get(&(ell * ell))) else {
        return Err(NebentypusError::MissingValues);
    };
    let stroke = base.mul(&al.mul(al).sub(al2));
    if base.mul(&det) != stroke {
        return Err(NebentypusError::Inconsistent(ell));
    }
    Ok(det)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_character_decomposes_trivially() {
        let chi = DirichletCharacter::trivial(45); // 45 = 9 * 5, p = 3
        let d = decompose_character(&chi, 3).unwrap();
        assert!(d.psi.is_trivial());
        assert_eq!(d.teichmuller_exponent, 0);
        assert!(d.eta.is_trivial());
        assert_eq!(d.s, 0);
        assert!(d.verify().unwrap());
    }

    #[test]
    fn order_3_mod_9_is_eta() {
        // (Z/9)^x is cyclic of order 6; the order-3 part has p-power order
        let chi = DirichletCharacter::from_exps(9, vec![2]).unwrap();
        let d = decompose_character(&chi, 3).unwrap();
        assert!(d.psi.is_trivial());
        assert_eq!(d.teichmuller_exponent, 0);
        assert_eq!(d.eta.order(), 3);
        assert_eq!(d.s, 1);
        assert!(d.verify().unwrap());
    }

    #[test]
    fn order_2_mod_9_is_omega() {
        let chi = DirichletCharacter::from_exps(9, vec![3]).unwrap();
        let d = decompose_character(&chi, 3).unwrap();
        assert!(d.psi.is_trivial());
        assert_eq!(d.teichmuller_exponent, 1);
        assert!(d.eta.is_trivial());
        assert!(d.verify().unwrap());
    }

    #[test]
    fn decomposition_round_trip_mixed_modulus() {
        // modulus 45 = 5 * 9, a character mixing all three parts
        let gens = unit_group_gens(45);
        let exps: Vec<u64> = gens.iter().map(|g| 1 % g.order).collect();
        let chi = DirichletCharacter::from_exps(45, exps).unwrap();
        let d = decompose_character(&chi, 3).unwrap();
        assert!(d.verify().unwrap(), "psi * omega^i * eta != chi");
        assert_eq!(d.psi.modulus(), 5);
        assert_eq!(d.eta.modulus(), 9);
        // p = 2 is rejected; p = 5 reads the same character with N = 9
        assert!(decompose_character(&chi, 2).is_err());
        let d5 = decompose_character(&chi, 5).unwrap();
        assert_eq!(d5.psi.modulus(), 9);
        assert!(d5.verify().unwrap());
    }

    #[test]
    fn obstruction_examples() {
        // eta of order 3 (s=1): blocked at m=2, not blocked at m=1
        let chi = DirichletCharacter::from_exps(9, vec![2]).unwrap();
        let d = decompose_character(&chi, 3).unwrap();
        let r2 = obstruction_check(&d, 2).unwrap();
        assert_eq!(r2.verdict, Obstruction::Blocked);
        assert!(r2.shortcut_agrees);
        let r1 = obstruction_check(&d, 1).unwrap();
        assert_eq!(r1.verdict, Obstruction::NotBlockedByThisTest);
        assert!(r1.shortcut_agrees);
        // trivial eta: never blocked by this test
        let triv = decompose_character(&DirichletCharacter::trivial(9), 3).unwrap();
        for m in 1..=3 {
            let r = obstruction_check(&triv, m).unwrap();
            assert_eq!(r.verdict, Obstruction::NotBlockedByThisTest);
            assert!(r.shortcut_agrees);
        }
    }

    #[test]
    fn shortcut_agrees_across_parameters() {
        // p in {3, 5}, s in {1, 2}, m in {1, 2, 3}
        for p in [3u64, 5] {
            for s in [1u32, 2] {
                let pr = p.pow(s + 1); // conductor p^(s+1) gives order-p^s parts
                let gens = unit_group_gens(pr);
                // the character of exact order p^s on the cyclic group
                let exp = gens[0].order / p.pow(s);
                let chi = DirichletCharacter::from_exps(pr, vec![exp]).unwrap();
                let d = decompose_character(&chi, p).unwrap();
                assert_eq!(d.s, s, "p={p} s={s}");
                for m in 1..=3 {
                    let r = obstruction_check(&d, m).unwrap();
                    assert!(
                        r.shortcut_agrees,
                        "shortcut disagrees at p={p}, s={s}, m={m}"
                    );
                }
            }
        }
    }
}
