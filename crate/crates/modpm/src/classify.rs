//! Weak, dc-weak and strong eigenforms modulo `p^m`.
//!
//! Eigenvalues are always read off the formal q-expansion (`f(T_n)` is the
//! n-th value), never obtained by spectral computation; eigenform checks
//! happen in the coordinate representation against the reduced Hecke
//! matrices. Enumeration works layer by layer: the residue layer by kernel
//! computations over `F_p`, each further layer by linearizing the quadratic
//! constraint `T_n f = f(T_n) f` around a fixed lower-layer point.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::hecke::{CoefficientForm, HeckeError, ReducedSpace, SpaceBasis};
use crate::linalg::chain::{self, ChainMat};
use crate::linalg::int::IntMatrix;
use crate::linalg::zn::{ZnElem, ZnRing};
use crate::ring::{ModRing, RingElement, RingError};
use crate::spacefile::{Catalog, CatalogEntry};

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("leading value f(T_1) is not a unit; the form cannot be normalized")]
    NonUnitLeading,
    #[error("enumeration works over base rings Z/p^m; got {0}")]
    NeedsBaseRing(String),
    #[error("enumeration exceeded the point budget ({0} points)")]
    TooManySolutions(usize),
    #[error("catalog entry '{label}' has truncation {have}, need {need}")]
    CatalogTruncation {
        label: String,
        have: usize,
        need: usize,
    },
    #[error("eigen systems live over incomparable rings")]
    IncomparableRings,
    #[error("half-sum construction needs an odd prime, got {0}")]
    EvenPrime(u64),
    #[error("half-sum inputs are not congruent modulo {0}")]
    NotCongruent(u64),
    #[error("input is not an eigenform away from D={d} (fails at T_{n})")]
    NotEigen { d: u64, n: u64 },
    #[error(transparent)]
    Hecke(#[from] HeckeError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// Provenance of an eigen system.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Provenance {
    /// Verified weak eigenform in a single-weight space.
    Weak,
    /// Verified eigenform in a direct-sum (divided-congruence) space.
    DcWeak,
    /// Reduction of an identified characteristic-zero eigenform.
    StrongLift(String),
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, w: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Provenance::Weak => write!(w, "weak"),
            Provenance::DcWeak => write!(w, "dc-weak"),
            Provenance::StrongLift(l) => write!(w, "strong-lift:{l}"),
        }
    }
}

/// A finite eigenvalue system `n -> f(T_n)` for `n <= bound` coprime to
/// `away_from`, the computational stand-in for Frobenius trace data.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub away_from: u64,
    pub bound: usize,
    pub values: BTreeMap<u64, RingElement>,
    pub provenance: Provenance,
}

impl EigenSystem {
    pub fn sort_key(&self) -> Vec<u64> {
        self.values
            .values()
            .flat_map(|v| v.coords().to_vec())
            .collect()
    }

    /// Coprime multiplicativity `f(T_n) f(T_r) = f(T_nr)` on the stored
    /// values, as far as the bound allows.
    pub fn is_multiplicative(&self) -> bool {
        for (&n, vn) in &self.values {
            for (&r, vr) in &self.values {
                if n.gcd(&r) == 1 && n * r <= self.bound as u64 {
                    if let Some(vnr) = self.values.get(&(n * r)) {
                        if &vn.mul(vr) != vnr {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// Indices `1 <= n <= bound` with `gcd(n, d) = 1`.
pub fn constraint_indices(d: u64, bound: usize) -> Vec<u64> {
    (1..=bound as u64).filter(|n| n.gcd(&d) == 1).collect()
}

fn apply_matrix(m: &[Vec<RingElement>], v: &[RingElement]) -> Vec<RingElement> {
    m.iter()
        .map(|row| {
            let mut acc = v[0].ring().zero();
            for (a, b) in row.iter().zip(v) {
                acc = acc.add(&a.mul(b));
            }
            acc
        })
        .collect()
}

/// Decide whether a coefficient form is a normalized eigenform for all
/// `T_n` with `n <= bound` coprime to `d`, returning its eigen system.
/// The form is rescaled by `f(T_1)^{-1}` first; a non-unit leading value is
/// an error.
pub fn is_weak_eigenform(
    f: &CoefficientForm,
    d: u64,
    bound: usize,
) -> Result<Option<EigenSystem>, ClassifyError> {
    eigen_check(f, d, bound, Provenance::Weak)
}

/// Same check over a direct-sum space presentation (weight-dependence is
/// avoided: only the stored integral operator matrices act).
pub fn is_dc_weak_eigenform(
    f: &CoefficientForm,
    d: u64,
    bound: usize,
) -> Result<Option<EigenSystem>, ClassifyError> {
    eigen_check(f, d, bound, Provenance::DcWeak)
}

fn eigen_check(
    f: &CoefficientForm,
    d: u64,
    bound: usize,
    provenance: Provenance,
) -> Result<Option<EigenSystem>, ClassifyError> {
    let a1 = f.value_at(1);
    if !a1.is_unit() {
        return Err(ClassifyError::NonUnitLeading);
    }
    let inv = a1.inverse()?;
    let coords: Vec<RingElement> = f.coords.iter().map(|c| c.mul(&inv)).collect();
    let rs = &f.space;
    let mut values = BTreeMap::new();
    for n in constraint_indices(d, bound) {
        let an = {
            let mut acc = rs.ring.zero();
            for (c, row) in coords.iter().zip(&rs.rows_mod) {
                acc = acc.add(&c.mul(&row[n as usize - 1]));
            }
            acc
        };
        if n > 1 {
            let m = rs.hecke_matrix_mod(n)?;
            let lhs = apply_matrix(&m, &coords);
            let rhs: Vec<RingElement> = coords.iter().map(|c| c.mul(&an)).collect();
            if lhs != rhs {
                return Ok(None);
            }
        }
        values.insert(n, an);
    }
    Ok(Some(EigenSystem {
        away_from: d,
        bound,
        values,
        provenance,
    }))
}

const POINT_BUDGET: usize = 200_000;

/// All normalized weak eigenforms away from `d` at truncation `bound` in a
/// space presented over `Z/p^m`, each exactly once, deterministically
/// ordered by eigen system then coordinates.
pub fn enumerate_weak_eigenforms(
    rs: &Arc<ReducedSpace>,
    d: u64,
    bound: usize,
) -> Result<Vec<(CoefficientForm, EigenSystem)>, ClassifyError> {
    let ring = &rs.ring;
    if ring.rank() != 1 || ring.spec().e() != 1 {
        return Err(ClassifyError::NeedsBaseRing(ring.to_string()));
    }
    let p = ring.p();
    let m = ring.m();
    let dim = rs.dim();
    let constraints: Vec<u64> = constraint_indices(d, bound)
        .into_iter()
        .filter(|&n| n > 1)
        .collect();

    let mats: Vec<(u64, Arc<IntMatrix>)> = constraints
        .iter()
        .map(|&n| Ok::<_, ClassifyError>((n, rs.space.hecke_matrix(n)?)))
        .collect::<Result<_, _>>()?;
    let basis = &rs.space.rows;
    let phi = |n: u64| -> Vec<BigInt> {
        basis
            .iter()
            .map(|r| r.coeffs[n as usize - 1].clone())
            .collect()
    };
    let phi1 = phi(1);

    let zn1 = ZnRing::new(p, 1);
    let to_zn = |zn: ZnRing, x: &BigInt| -> ZnElem {
        let q = BigInt::from(zn.q);
        zn.elem(x.mod_floor(&q).to_u64().unwrap())
    };

    // ---- residue layer: branch over candidate eigenvalues ----
    struct Branch {
        rows: Vec<Vec<ZnElem>>,
        rhs: Vec<ZnElem>,
    }
    let mut branches = vec![Branch {
        rows: vec![phi1.iter().map(|x| to_zn(zn1, x)).collect()],
        rhs: vec![zn1.elem(1)],
    }];
    for (n, mat) in &mats {
        let phin: Vec<ZnElem> = phi(*n).iter().map(|x| to_zn(zn1, x)).collect();
        let mut next = Vec::new();
        for br in &branches {
            for lam in 0..p {
                let mut rows = br.rows.clone();
                let mut rhs = br.rhs.clone();
                for i in 0..dim {
                    let mut row: Vec<ZnElem> =
                        (0..dim).map(|j| to_zn(zn1, mat.get(i, j))).collect();
                    row[i] = zn1.elem(zn1.sub(row[i].v, lam % p));
                    rows.push(row);
                    rhs.push(zn1.elem(0));
                }
                rows.push(phin.clone());
                rhs.push(zn1.elem(lam));
                let a = ChainMat::from_rows(rows.clone());
                if chain::solve_affine(&a, &rhs).is_some() {
                    next.push(Branch { rows, rhs });
                }
            }
        }
        branches = next;
        if branches.is_empty() {
            return Ok(Vec::new());
        }
    }
    let mut points: Vec<Vec<u64>> = Vec::new();
    for br in &branches {
        let a = ChainMat::from_rows(br.rows.clone());
        if let Some(sol) = chain::solve_affine(&a, &br.rhs) {
            let pts = sol
                .enumerate(POINT_BUDGET)
                .ok_or(ClassifyError::TooManySolutions(POINT_BUDGET))?;
            for pt in pts {
                points.push(pt.iter().map(|e| e.v).collect());
            }
        }
    }
    points.sort();
    points.dedup();

    // ---- lift through the precision layers ----
    for j in 1..m {
        let pj_big = BigInt::from(p.pow(j));
        let p_big = BigInt::from(p);
        let pj1 = &pj_big * &p_big;
        let mut next_points: Vec<Vec<u64>> = Vec::new();
        for pt in &points {
            let lift: Vec<BigInt> = pt.iter().map(|&v| BigInt::from(v)).collect();
            let mut rows: Vec<Vec<ZnElem>> = Vec::new();
            let mut rhs: Vec<ZnElem> = Vec::new();
            // normalization: phi1(c + p^j delta) = 1 mod p^{j+1}
            let phi1_c: BigInt =
                phi1.iter().zip(&lift).map(|(a, b)| a * b).sum::<BigInt>() - BigInt::one();
            debug_assert!((phi1_c.mod_floor(&pj_big)).is_zero());
            let e1 = (&phi1_c / &pj_big).mod_floor(&p_big);
            rows.push(phi1.iter().map(|x| to_zn(zn1, x)).collect());
            rhs.push(to_zn(zn1, &(-e1)));
            for (n, mat) in &mats {
                let phin = phi(*n);
                let phin_c: BigInt = phin.iter().zip(&lift).map(|(a, b)| a * b).sum::<BigInt>();
                let mc = mat.apply(&lift);
                for i in 0..dim {
                    let r_i = (&mc[i] - &phin_c * &lift[i]).mod_floor(&pj1);
                    debug_assert!((r_i.mod_floor(&pj_big)).is_zero());
                    let e_i = (&r_i / &pj_big).mod_floor(&p_big);
                    let mut row: Vec<ZnElem> = Vec::with_capacity(dim);
                    for k in 0..dim {
                        let mut entry = mat.get(i, k).clone();
                        if i == k {
                            entry -= &phin_c;
                        }
                        entry -= &lift[i] * &phin[k];
                        row.push(to_zn(zn1, &entry));
                    }
                    rows.push(row);
                    rhs.push(to_zn(zn1, &(-e_i)));
                }
            }
            let a = ChainMat::from_rows(rows);
            if let Some(sol) = chain::solve_affine(&a, &rhs) {
                let pts = sol
                    .enumerate(POINT_BUDGET)
                    .ok_or(ClassifyError::TooManySolutions(POINT_BUDGET))?;
                for delta in pts {
                    let new_pt: Vec<u64> = (0..dim)
                        .map(|i| {
                            let v = BigInt::from(pt[i]) + BigInt::from(delta[i].v) * &pj_big;
                            v.mod_floor(&pj1).to_u64().unwrap()
                        })
                        .collect();
                    next_points.push(new_pt);
                }
            }
            if next_points.len() > POINT_BUDGET {
                return Err(ClassifyError::TooManySolutions(POINT_BUDGET));
            }
        }
        next_points.sort();
        next_points.dedup();
        points = next_points;
    }

    // ---- package, verify, order deterministically ----
    let single_weight = rs
        .space
        .row_weights()
        .iter()
        .all(|w| matches!(w, crate::qexp::WeightTag::Single(_)));
    let mut out = Vec::new();
    for pt in points {
        let coords: Vec<RingElement> = pt.iter().map(|&v| ring.embed_base(v)).collect();
        let form = rs.form_from_coords(coords);
        let prov = if single_weight {
            Provenance::Weak
        } else {
            Provenance::DcWeak
        };
        let sys = eigen_check(&form, d, bound, prov)?
            .expect("enumerated point must verify as an eigenform");
        out.push((form, sys));
    }
    out.sort_by_key(|(f, s)| {
        (
            s.sort_key(),
            f.coords
                .iter()
                .flat_map(|c| c.coords().to_vec())
                .collect::<Vec<u64>>(),
        )
    });
    Ok(out)
}

/// A successful strong match: catalog label plus the prime-choice index
/// used for the reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrongMatch {
    pub label: String,
    pub prime_choice: usize,
}

/// Catalog members whose reduction (over every compatible prime-choice
/// index) agrees with the system at all `n <= bound` coprime to `D`.
pub fn strong_match(
    e: &EigenSystem,
    catalog: &Catalog,
    ring: &ModRing,
) -> Result<Vec<StrongMatch>, ClassifyError> {
    let idxs = constraint_indices(e.away_from, e.bound);
    let mut out = Vec::new();
    for entry in &catalog.entries {
        if entry.trunc() < e.bound {
            return Err(ClassifyError::CatalogTruncation {
                label: entry.label().to_string(),
                have: entry.trunc(),
                need: e.bound,
            });
        }
        match entry {
            CatalogEntry::Int(label, q) => {
                let red = q.reduce_mod(ring);
                let ok = idxs.iter().all(|&n| {
                    e.values
                        .get(&n)
                        .is_none_or(|v| v == &red.coeffs[n as usize - 1])
                });
                if ok {
                    out.push(StrongMatch {
                        label: label.clone(),
                        prime_choice: 0,
                    });
                }
            }
            CatalogEntry::Nf(label, q) => {
                let choices = q.prime_choices(ring).unwrap_or(0);
                for choice in 0..choices {
                    let Ok(red) = q.reduce_mod(ring, choice) else {
                        continue;
                    };
                    let ok = idxs.iter().all(|&n| {
                        e.values
                            .get(&n)
                            .is_none_or(|v| v == &red.coeffs[n as usize - 1])
                    });
                    if ok {
                        out.push(StrongMatch {
                            label: label.clone(),
                            prime_choice: choice,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Whether two systems agree at every prime `l <= min(bounds)` outside the
/// exclusion set (the artifact's notion of carrying the same attached
/// mod-p^m representation data). Values over different rings are compared
/// through a supported tower embedding.
pub fn systems_agree(
    e1: &EigenSystem,
    e2: &EigenSystem,
    exclusion: &[u64],
) -> Result<bool, ClassifyError> {
    let bound = e1.bound.min(e2.bound) as u64;
    for l in 2..=bound {
        if !is_prime(l) || exclusion.contains(&l) {
            continue;
        }
        let (Some(v1), Some(v2)) = (e1.values.get(&l), e2.values.get(&l)) else {
            continue;
        };
        let eq =
            crate::ring::congruent_mod_pm(v1, v2).map_err(|_| ClassifyError::IncomparableRings)?;
        if !eq {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Per-operator witness of the half-sum identity.
#[derive(Clone, Debug)]
pub struct HalfSumCertificate {
    pub entries: Vec<(u64, RingElement)>,
    /// Set when no prime with distinct eigenvalues mod p^2 was found; the
    /// combined system might then lift to characteristic zero.
    pub possibly_liftable: bool,
}

pub struct HalfSum {
    pub form: CoefficientForm,
    pub certificate: HalfSumCertificate,
    pub lambda: BTreeMap<u64, BigInt>,
    pub mu: BTreeMap<u64, BigInt>,
}

/// The half-sum construction: for integer eigenforms `f = g mod p` with
/// systems `lambda` and `mu`, the form `(f + g) 2^{-1} mod p^2` is an
/// eigenform mod `p^2` with system `(lambda_n + mu_n)/2`. Every certificate
/// entry is verified on the lattice; if no prime separates the systems mod
/// `p^2` the result is flagged as possibly liftable.
pub fn half_sum_construct(
    space: &Arc<SpaceBasis>,
    f_coords: &[BigInt],
    g_coords: &[BigInt],
    p: u64,
    d: u64,
    bound: usize,
) -> Result<HalfSum, ClassifyError> {
    if p == 2 {
        return Err(ClassifyError::EvenPrime(p));
    }
    let qf = space.expansion_of(f_coords);
    let qg = space.expansion_of(g_coords);
    let p_big = BigInt::from(p);
    for (a, b) in qf.coeffs.iter().zip(&qg.coeffs) {
        if !((a - b).mod_floor(&p_big)).is_zero() {
            return Err(ClassifyError::NotCongruent(p));
        }
    }
    let idxs: Vec<u64> = constraint_indices(d, bound)
        .into_iter()
        .filter(|&n| n > 1)
        .collect();
    let mut lambda = BTreeMap::new();
    let mut mu = BTreeMap::new();
    lambda.insert(1, BigInt::one());
    mu.insert(1, BigInt::one());
    for &n in &idxs {
        let m = space.hecke_matrix(n)?;
        for (coords, vals, q) in [(f_coords, &mut lambda, &qf), (g_coords, &mut mu, &qg)] {
            let an = q.coeffs[n as usize - 1].clone();
            let lhs = m.apply(coords);
            let rhs: Vec<BigInt> = coords.iter().map(|c| c * &an).collect();
            if lhs != rhs {
                return Err(ClassifyError::NotEigen { d, n });
            }
            vals.insert(n, an);
        }
    }
    let p2 = &p_big * &p_big;
    let distinct = idxs
        .iter()
        .any(|&n| is_prime(n) && !((&lambda[&n] - &mu[&n]).mod_floor(&p2)).is_zero());
    let ring2 = ModRing::zp(p, 2)?;
    let rs = Arc::new(ReducedSpace::new(space.clone(), ring2.clone()));
    let inv2 = ring2.embed_base(2).inverse()?;
    let h_coords: Vec<RingElement> = f_coords
        .iter()
        .zip(g_coords)
        .map(|(a, b)| {
            let s = (a + b).mod_floor(&p2).to_u64().unwrap();
            ring2.embed_base(s).mul(&inv2)
        })
        .collect();
    let form = rs.form_from_coords(h_coords.clone());
    let mut entries = Vec::new();
    for &n in &idxs {
        let nu = {
            let s = (&lambda[&n] + &mu[&n]).mod_floor(&p2).to_u64().unwrap();
            ring2.embed_base(s).mul(&inv2)
        };
        let m = rs.hecke_matrix_mod(n)?;
        let lhs = apply_matrix(&m, &h_coords);
        let rhs: Vec<RingElement> = h_coords.iter().map(|c| c.mul(&nu)).collect();
        if lhs != rhs {
            return Err(ClassifyError::NotEigen { d, n });
        }
        entries.push((n, nu));
    }
    Ok(HalfSum {
        form,
        certificate: HalfSumCertificate {
            entries,
            possibly_liftable: !distinct,
        },
        lambda,
        mu,
    })
}

/// The bare rank-2 mechanism: for `T f = lambda f`, `T g = mu g`,
/// `f = g mod p`, `lambda = mu mod p`, the vector `h = f + g` satisfies
/// `T h = (lambda + mu)/2 h mod p^2`. Used by the synthetic property suite.
pub fn half_sum_mechanism_holds(
    t: &IntMatrix,
    f: &[BigInt],
    g: &[BigInt],
    lambda: &BigInt,
    mu: &BigInt,
    p: u64,
) -> bool {
    let p2 = BigInt::from(p * p);
    let two_inv = {
        let zn = ZnRing::new(p, 2);
        BigInt::from(zn.inv(2))
    };
    let h: Vec<BigInt> = f.iter().zip(g).map(|(a, b)| a + b).collect();
    let th = t.apply(&h);
    let nu = ((lambda + mu) * &two_inv).mod_floor(&p2);
    th.iter()
        .zip(&h)
        .all(|(a, b)| ((a - &nu * b).mod_floor(&p2)).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constraint_indices_away_from_d() {
        assert_eq!(constraint_indices(156, 14), vec![1, 5, 7, 11]);
        assert_eq!(constraint_indices(78, 14), vec![1, 5, 7, 11]);
        assert_eq!(constraint_indices(15, 8), vec![1, 2, 4, 7, 8]);
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..20).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19]);
    }
}
