//! Divided congruences, level stripping, weight congruences and Eisenstein
//! weight equalization.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::character::{CharError, DirichletCharacter};
use crate::hecke::{HeckeError, ReducedSpace, SpaceBasis};
use crate::linalg::chain::{self, ChainMat};
use crate::numfield::{NfElem, NfError};
use crate::qexp::{Group, QExpansion, QexpError};
use crate::ring::{ModRing, RingElement, RingError};

#[derive(Debug, Error)]
pub enum DividedError {
    #[error("congruence fails at coefficient index {0}: sum is not divisible by pi^m")]
    CongruenceFails(usize),
    #[error("divided form is not integral at coefficient index {0}")]
    NotIntegral(usize),
    #[error("Eisenstein construction needs p >= 5, got {0}")]
    SmallPrime(u64),
    #[error("normalization factor -2(p-1)/B_(p-1) is not divisible by {0}")]
    NotDivisible(u64),
    #[error("weights {0} and {1} are incongruent modulo {2}")]
    WeightIncongruent(u32, u32, u64),
    #[error("q-expansions changed modulo p^m during equalization at index {0}")]
    NotCongruentAfter(usize),
    #[error("mod-p reductions of the inputs are linearly dependent")]
    DependentReductions,
    #[error("the sum is not a stroke eigenform modulo p^m (values differ at l={0})")]
    NotStrokeEigen(u64),
    #[error("no basis data for weight {0} at level {1}")]
    MissingBasis(u32, u64),
    #[error("truncation shortfall: need {need}, have {have}")]
    Truncation { need: usize, have: usize },
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    Qexp(#[from] QexpError),
    #[error(transparent)]
    Hecke(#[from] HeckeError),
    #[error(transparent)]
    Nf(#[from] NfError),
}

// ---------------------------------------------------------------------------
// Bernoulli numbers and Eisenstein series

/// Exact Bernoulli number `B_n` (convention `B_1 = -1/2`), by the standard
/// recurrence `sum_{j<=n} C(n+1, j) B_j = 0`.
pub fn bernoulli(n: u32) -> BigRational {
    let mut b: Vec<BigRational> = Vec::with_capacity(n as usize + 1);
    b.push(BigRational::one());
    for m in 1..=n as usize {
        // B_m = -1/(m+1) * sum_{j<m} C(m+1, j) B_j
        let mut acc = BigRational::zero();
        let mut binom = BigInt::one(); // C(m+1, 0)
        for (j, bj) in b.iter().enumerate() {
            acc += bj * BigRational::from(binom.clone());
            // C(m+1, j+1) = C(m+1, j) * (m+1-j)/(j+1)
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        let mp1 = BigRational::from(BigInt::from(m + 1));
        b.push(-acc / mp1);
    }
    b[n as usize].clone()
}

/// Sum of the `k`-th powers of the divisors of `n`.
fn sigma(n: u64, k: u32) -> BigInt {
    let mut acc = BigInt::zero();
    for d in 1..=n {
        if n % d == 0 {
            acc += BigInt::from(d).pow(k);
        }
    }
    acc
}

/// The classical Eisenstein series `E_k` of level 1 and even weight
/// `k >= 4`, normalized with constant term 1:
/// `E_k = 1 - (2k / B_k) sum sigma_(k-1)(n) q^n`, with exact rational
/// coefficients.
pub fn eisenstein_weight(k: u32, trunc: usize) -> QExpansion<BigRational> {
    assert!(k >= 4 && k % 2 == 0, "E_k needs even weight >= 4");
    let bk = bernoulli(k);
    let factor = -BigRational::from(BigInt::from(2 * k)) / bk;
    let coeffs: Vec<BigRational> = (1..=trunc as u64)
        .map(|n| &factor * BigRational::from(sigma(n, k - 1)))
        .collect();
    QExpansion {
        level: 1,
        weight: crate::qexp::WeightTag::Single(k),
        group: Group::Gamma0,
        character: None,
        constant: BigRational::one(),
        coeffs,
        prime_choice: None,
    }
}

/// The Eisenstein series `E_(p-1)` for `p >= 5`. All positive-index
/// coefficients are checked (not assumed) to vanish modulo `p`.
pub fn eisenstein_series(p: u64, trunc: usize) -> Result<QExpansion<BigRational>, DividedError> {
    if p < 5 || !crate::classify::is_prime(p) {
        return Err(DividedError::SmallPrime(p));
    }
    let e = eisenstein_weight((p - 1) as u32, trunc);
    let p_big = BigInt::from(p);
    for c in &e.coeffs {
        if (c.denom() % &p_big).is_zero() || !(c.numer() % &p_big).is_zero() {
            return Err(DividedError::NotDivisible(p));
        }
    }
    Ok(e)
}

/// `E_(p-1)^(p^(m-1))`, the weight `phi(p^m)` equalizer congruent to 1
/// modulo `p^m`.
pub fn e_tilde(p: u64, m: u32, trunc: usize) -> Result<QExpansion<BigRational>, DividedError> {
    let e = eisenstein_series(p, trunc)?;
    Ok(e.pow_series(p.pow(m - 1) as u32)?)
}

// ---------------------------------------------------------------------------
// divided congruences

/// Witness that a congruence was divided: inputs, the divisor `pi^m`, the
/// integral output, and where the residual check ran.
#[derive(Debug)]
pub struct DividedCongruenceWitness<C> {
    pub inputs: Vec<QExpansion<C>>,
    pub exponent: u32,
    pub output: QExpansion<C>,
    pub checked_to: usize,
}

/// Divide the congruence `sum g_k = 0 mod pi^m` by `pi^m` over the
/// integers. The individual summands need not be divisible; only the sum
/// is, and that is checked coefficient by coefficient.
pub fn divide_congruence_int(
    forms: &[QExpansion<BigInt>],
    pi: &BigInt,
    m: u32,
) -> Result<DividedCongruenceWitness<BigInt>, DividedError> {
    assert!(!forms.is_empty());
    let trunc = forms.iter().map(|f| f.trunc()).min().unwrap();
    let pim = pi.pow(m);
    let mut out = Vec::with_capacity(trunc);
    for i in 0..trunc {
        let s: BigInt = forms.iter().map(|f| f.coeffs[i].clone()).sum();
        if !(&s % &pim).is_zero() {
            return Err(DividedError::CongruenceFails(i + 1));
        }
        out.push(&s / &pim);
    }
    let constant: BigInt = forms.iter().map(|f| f.constant.clone()).sum();
    if !(&constant % &pim).is_zero() {
        return Err(DividedError::CongruenceFails(0));
    }
    let mut weights: Vec<u32> = Vec::new();
    for f in forms {
        match &f.weight {
            crate::qexp::WeightTag::Single(k) => weights.push(*k),
            crate::qexp::WeightTag::Multi(ks) => weights.extend_from_slice(ks),
        }
    }
    weights.sort();
    weights.dedup();
    let output = QExpansion {
        level: forms[0].level,
        weight: if weights.len() == 1 {
            crate::qexp::WeightTag::Single(weights[0])
        } else {
            crate::qexp::WeightTag::Multi(weights)
        },
        group: forms[0].group,
        character: forms[0].character.clone(),
        constant: &constant / &pim,
        coeffs: out,
        prime_choice: None,
    };
    Ok(DividedCongruenceWitness {
        inputs: forms.to_vec(),
        exponent: m,
        output,
        checked_to: trunc,
    })
}

/// Number-field variant: `pi` may be any nonzero element of the field; the
/// sum must be divisible with integral quotient (integer coordinates in the
/// power basis).
pub fn divide_congruence_nf(
    forms: &[QExpansion<NfElem>],
    pi: &NfElem,
    m: u32,
) -> Result<DividedCongruenceWitness<NfElem>, DividedError> {
    assert!(!forms.is_empty());
    let trunc = forms.iter().map(|f| f.trunc()).min().unwrap();
    let mut pim = NfElem::one(&pi.poly);
    for _ in 0..m {
        pim = pim.mul(pi);
    }
    let pim_inv = pim.inverse()?;
    let mut out = Vec::with_capacity(trunc);
    for i in 0..trunc {
        let mut s = NfElem::zero(&pi.poly);
        for f in forms {
            s = s.add(&f.coeffs[i]);
        }
        let q = s.mul(&pim_inv);
        if !q.is_integral() {
            return Err(DividedError::CongruenceFails(i + 1));
        }
        out.push(q);
    }
    let output = QExpansion {
        level: forms[0].level,
        weight: forms[0].weight.clone(),
        group: forms[0].group,
        character: forms[0].character.clone(),
        constant: NfElem::zero(&pi.poly),
        coeffs: out,
        prime_choice: None,
    };
    Ok(DividedCongruenceWitness {
        inputs: forms.to_vec(),
        exponent: m,
        output,
        checked_to: trunc,
    })
}

// ---------------------------------------------------------------------------
// level stripping

/// Provider of level-N bases per weight, resolved by naming convention.
pub trait BasisResolver {
    /// The basis of `S_k(Gamma_1(N))` (or the best available stand-in), or
    /// `None` when no data exists for that weight.
    fn resolve(&mut self, weight: u32, level: u64) -> Option<Arc<SpaceBasis>>;
}

/// Result of a successful strip-level search.
pub struct StripWitness {
    /// Minimal direct-sum cap c at which a match appeared.
    pub weight_cap: u32,
    /// Coordinates in the assembled level-N direct sum.
    pub coords: Vec<RingElement>,
    /// The matching expansion (equals the input mod p^m by construction).
    pub values: Vec<RingElement>,
    /// Weights whose basis data was missing and treated as empty.
    pub missing_weights: Vec<u32>,
}

/// Search for a level-N representative of a mod-p^m expansion declared at
/// level `N p^r`: the smallest `c <= c_max` such that the coefficient
/// vector lies in the span of the reduced bases of `S_k(Gamma_1(N))` for
/// `k <= c`. An empty result means "not found up to (c_max, bound)", never
/// "does not exist".
pub fn strip_level_search(
    values: &[RingElement],
    ring: &ModRing,
    target_level: u64,
    c_max: u32,
    bound: usize,
    resolver: &mut dyn BasisResolver,
) -> Result<Option<StripWitness>, DividedError> {
    if values.len() < bound {
        return Err(DividedError::Truncation {
            need: bound,
            have: values.len(),
        });
    }
    let mut rows_mod: Vec<Vec<RingElement>> = Vec::new();
    let mut row_caps: Vec<u32> = Vec::new();
    let mut missing = Vec::new();
    let mut any_found = false;
    for c in 1..=c_max {
        match resolver.resolve(c, target_level) {
            None => missing.push(c),
            Some(basis) => {
                any_found = true;
                if basis.trunc < bound {
                    return Err(DividedError::Truncation {
                        need: bound,
                        have: basis.trunc,
                    });
                }
                for row in &basis.rows {
                    let red = row.reduce_mod(ring);
                    rows_mod.push(red.coeffs[..bound].to_vec());
                    row_caps.push(c);
                }
            }
        }
        if rows_mod.is_empty() {
            continue;
        }
        // solve: values = combination of the reduced rows available so far
        let a = ChainMat::from_rows(
            (0..bound)
                .map(|i| rows_mod.iter().map(|r| r[i].clone()).collect())
                .collect(),
        );
        if let Some(sol) = chain::solve_affine(&a, &values[..bound]) {
            let coords = sol.particular;
            let mut out_values = vec![ring.zero(); bound];
            for (x, row) in coords.iter().zip(&rows_mod) {
                for (v, r) in out_values.iter_mut().zip(row) {
                    *v = v.add(&x.mul(r));
                }
            }
            debug_assert!(out_values.iter().zip(values).all(|(a, b)| a == b));
            return Ok(Some(StripWitness {
                weight_cap: c,
                coords,
                values: out_values,
                missing_weights: missing,
            }));
        }
    }
    if !any_found {
        return Err(DividedError::MissingBasis(1, target_level));
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// weight congruences

/// One input to the weight-congruence checks: a form of a declared weight
/// whose stroke action is `l^k psi(l) eta(l)`.
pub struct WeightCongruenceInput {
    pub expansion: QExpansion<BigInt>,
    pub weight: u32,
    pub psi: DirichletCharacter,
    pub eta: DirichletCharacter,
}

#[derive(Debug, PartialEq, Eq)]
pub enum WeightCongruenceVerdict {
    Consistent {
        h: u64,
        modulus: u64,
    },
    /// A congruence fails; this falsifies one of the preconditions.
    Violation {
        h: u64,
        modulus: u64,
        pairs: Vec<(u32, u32)>,
    },
}

/// Check the weight congruences `k_i = k_j mod phi(p^m)/h` forced by a
/// stroke-eigen sum with mod-p independent members. Preconditions (mod-p
/// linear independence of the inputs, equality of the stroke eigenvalues
/// modulo p^m) are verified; `h` is the lcm of the orders of the eta_i
/// modulo p^m, computed by materializing their values.
pub fn weight_congruence_check(
    inputs: &[WeightCongruenceInput],
    p: u64,
    m: u32,
    d: u64,
    value_ring: &ModRing,
) -> Result<WeightCongruenceVerdict, DividedError> {
    assert!(!inputs.is_empty());
    if inputs.len() > 1 {
        check_independence_mod_p(&inputs.iter().map(|i| &i.expansion).collect::<Vec<_>>(), p)?;
        check_stroke_eigen_sum(inputs, p, d, value_ring)?;
    }
    let mut h = 1u64;
    for input in inputs {
        h = h.lcm(&input.eta.order_in_ring(value_ring, (1, 1))?);
    }
    let phi = (p - 1) * p.pow(m - 1);
    let modulus = phi / h;
    let mut pairs = Vec::new();
    for i in 0..inputs.len() {
        for j in i + 1..inputs.len() {
            let (ki, kj) = (inputs[i].weight, inputs[j].weight);
            let diff = ki.abs_diff(kj) as u64;
            if diff % modulus != 0 {
                pairs.push((ki, kj));
            }
        }
    }
    if pairs.is_empty() {
        Ok(WeightCongruenceVerdict::Consistent { h, modulus })
    } else {
        Ok(WeightCongruenceVerdict::Violation { h, modulus, pairs })
    }
}

/// The vanishing-sum variant: `f_1(q) + ... + f_t(q) = 0 mod p^m` with all
/// but one member mod-p independent yields the same weight congruences.
pub fn variant_congruence_check(
    inputs: &[WeightCongruenceInput],
    p: u64,
    m: u32,
    d: u64,
    value_ring: &ModRing,
) -> Result<WeightCongruenceVerdict, DividedError> {
    assert!(!inputs.is_empty());
    // the sum must vanish mod p^m
    let pm = BigInt::from(p).pow(m);
    let trunc = inputs.iter().map(|i| i.expansion.trunc()).min().unwrap();
    for idx in 0..trunc {
        let s: BigInt = inputs.iter().map(|i| i.expansion.coeffs[idx].clone()).sum();
        if !(s.mod_floor(&pm)).is_zero() {
            return Err(DividedError::CongruenceFails(idx + 1));
        }
    }
    // degenerate single form: f_1 = 0 mod p^m, vacuously consistent
    if inputs.len() == 1 {
        let phi = (p - 1) * p.pow(m - 1);
        return Ok(WeightCongruenceVerdict::Consistent { h: 1, modulus: phi });
    }
    // independence of the others for some i
    let mut ok = false;
    for skip in 0..inputs.len() {
        let rest: Vec<&QExpansion<BigInt>> = inputs
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .map(|(_, x)| &x.expansion)
            .collect();
        if rest.len() < 2 || check_independence_mod_p(&rest, p).is_ok() {
            ok = true;
            break;
        }
    }
    if !ok {
        return Err(DividedError::DependentReductions);
    }
    check_pairwise_stroke_values(inputs, p, d, value_ring)?;
    let mut h = 1u64;
    for input in inputs {
        h = h.lcm(&input.eta.order_in_ring(value_ring, (1, 1))?);
    }
    let phi = (p - 1) * p.pow(m - 1);
    let modulus = phi / h;
    let mut pairs = Vec::new();
    for i in 0..inputs.len() {
        for j in i + 1..inputs.len() {
            let (ki, kj) = (inputs[i].weight, inputs[j].weight);
            if (ki.abs_diff(kj) as u64) % modulus != 0 {
                pairs.push((ki, kj));
            }
        }
    }
    if pairs.is_empty() {
        Ok(WeightCongruenceVerdict::Consistent { h, modulus })
    } else {
        Ok(WeightCongruenceVerdict::Violation { h, modulus, pairs })
    }
}

fn check_independence_mod_p(forms: &[&QExpansion<BigInt>], p: u64) -> Result<(), DividedError> {
    let ring = ModRing::zp(p, 1)?;
    let trunc = forms.iter().map(|f| f.trunc()).min().unwrap();
    let rows: Vec<Vec<RingElement>> = forms
        .iter()
        .map(|f| f.reduce_mod(&ring).coeffs[..trunc].to_vec())
        .collect();
    // rank over F_p via the kernel: independent iff only the zero relation
    let a = ChainMat::from_rows(
        (0..trunc)
            .map(|i| rows.iter().map(|r| r[i].clone()).collect())
            .collect(),
    );
    let ker = chain::kernel(&a);
    if ker.iter().any(|g| g.iter().any(|x| !x.is_zero())) {
        return Err(DividedError::DependentReductions);
    }
    Ok(())
}

/// Closed-form stroke eigenvalues `l^k psi(l) eta(l)` must agree modulo
/// p^m across the inputs for the sum to be a stroke eigenform.
fn check_stroke_eigen_sum(
    inputs: &[WeightCongruenceInput],
    p: u64,
    d: u64,
    value_ring: &ModRing,
) -> Result<(), DividedError> {
    check_pairwise_stroke_values(inputs, p, d, value_ring)
}

fn check_pairwise_stroke_values(
    inputs: &[WeightCongruenceInput],
    p: u64,
    d: u64,
    value_ring: &ModRing,
) -> Result<(), DividedError> {
    let level = inputs[0].expansion.level;
    let mut ells = Vec::new();
    let mut l = 2u64;
    while ells.len() < 6 {
        if crate::classify::is_prime(l) && d % l != 0 && level % l != 0 && l != p {
            ells.push(l);
        }
        l += 1;
    }
    for &ell in &ells {
        let mut vals: Vec<RingElement> = Vec::new();
        for input in inputs {
            let base = value_ring.embed_base(ell % value_ring.pm());
            let lk = base.pow(input.weight as u64);
            let psi_v = input
                .psi
                .value_in_ring(ell, value_ring, (1, 1))?
                .expect("l is prime to the psi modulus");
            let eta_v = input
                .eta
                .value_in_ring(ell, value_ring, (1, 1))?
                .expect("l is prime to the eta modulus");
            vals.push(lk.mul(&psi_v).mul(&eta_v));
        }
        if vals.windows(2).any(|w| w[0] != w[1]) {
            return Err(DividedError::NotStrokeEigen(ell));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// weight equalization

pub struct EqualizedForm {
    pub expansion: QExpansion<BigRational>,
    pub original_weight: u32,
    pub power_used: u32,
    /// Truncation to which the mod-p^m agreement was verified.
    pub audited_trunc: usize,
}

/// Multiply each form by the power of `E_(p-1)^(p^(m-1))` that raises it to
/// the maximal input weight. q-expansions modulo p^m are unchanged
/// (verified coefficientwise up to the audited truncation, which shrinks
/// under series multiplication and is reported).
pub fn equalize_weights(
    forms: &[QExpansion<BigInt>],
    p: u64,
    m: u32,
) -> Result<Vec<EqualizedForm>, DividedError> {
    assert!(!forms.is_empty());
    let phi = ((p - 1) * p.pow(m - 1)) as u32;
    let weights: Vec<u32> = forms
        .iter()
        .map(|f| {
            f.weight
                .single()
                .expect("equalization needs single weights")
        })
        .collect();
    let k_max = *weights.iter().max().unwrap();
    for &k in &weights {
        if (k_max - k) % phi != 0 {
            return Err(DividedError::WeightIncongruent(k, k_max, phi as u64));
        }
    }
    let trunc = forms.iter().map(|f| f.trunc()).min().unwrap();
    let etilde = e_tilde(p, m, trunc)?;
    let ring = ModRing::zp(p, m)?;
    let mut out = Vec::new();
    for (f, &k) in forms.iter().zip(&weights) {
        let power = (k_max - k) / phi;
        let fq = f.to_rational();
        let result = if power == 0 {
            fq.clone()
        } else {
            fq.mul_series(&etilde.pow_series(power)?)?
        };
        // verify the expansion is unchanged mod p^m
        let before = fq.reduce_mod(&ring)?;
        let after = result.reduce_mod(&ring)?;
        let audited = result.trunc().min(f.trunc());
        for i in 0..audited {
            if before.coeffs[i] != after.coeffs[i] {
                return Err(DividedError::NotCongruentAfter(i + 1));
            }
        }
        out.push(EqualizedForm {
            expansion: result,
            original_weight: k,
            power_used: power,
            audited_trunc: audited,
        });
    }
    Ok(out)
}

/// Equalized inputs keep their eigen systems mod p^m: convenience check
/// used by tests and reports.
pub fn eigen_values_preserved(
    space: &Arc<SpaceBasis>,
    ring: &ModRing,
    original: &QExpansion<BigInt>,
    equalized: &QExpansion<BigRational>,
    d: u64,
    bound: usize,
) -> Result<bool, DividedError> {
    let rs = Arc::new(ReducedSpace::new(space.clone(), ring.clone()));
    let _ = rs;
    let before = original.reduce_mod(ring);
    let after = equalized.reduce_mod(ring)?;
    let idxs: BTreeMap<u64, ()> = crate::classify::constraint_indices(d, bound)
        .into_iter()
        .map(|n| (n, ()))
        .collect();
    Ok(idxs
        .keys()
        .all(|&n| before.coeffs[n as usize - 1] == after.coeffs[n as usize - 1]))
}
