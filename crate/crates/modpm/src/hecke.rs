//! The integral Hecke algebra of a space of cusp forms, its pairing with
//! the space, and forms with coefficients in a ring.
//!
//! A space is an integral basis of truncated q-expansions. Hecke operators
//! become integer matrices in that basis by applying the coefficient
//! formulas to the expansions and solving exactly over the rationals; a
//! non-integral solution signals an unsaturated lattice and is an error
//! (ingestion repairs lattices up front). Matrices are memoized behind a
//! read-write lock keyed by the basis digest and the operator.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::character::DirichletCharacter;
use crate::linalg::chain::{self, ChainMat};
use crate::linalg::int::{self, IntMatrix};
use crate::qexp::{sturm_bound, Group, QExpansion, QexpError, WeightTag};
use crate::ring::{ModRing, RingElement};

#[derive(Debug, Error)]
pub enum HeckeError {
    #[error("basis rows have rank {got} but {want} rows were declared")]
    RankDeficient { got: usize, want: usize },
    #[error("insufficient truncation: operator T_{n} needs {needed}, basis has {have}")]
    InsufficientTruncation { n: u64, needed: usize, have: usize },
    #[error("Hecke operator T_{0} does not preserve the basis lattice (non-integral solution); the basis is not saturated")]
    NotIntegral(u64),
    #[error("Hecke operator T_{0} does not stabilize the space within truncation")]
    NotStable(u64),
    #[error("injectivity bound {0} exceeds the basis truncation {1}")]
    BoundExceedsTruncation(usize, usize),
    #[error("Hecke algebra rank {got} differs from the space dimension {want} (n_max too small or bad basis)")]
    AlgebraRankDeficient { got: usize, want: usize },
    #[error("coefficient vector is not in the span of the reduced basis")]
    NotInSpan,
    #[error("coefficient vector of length {0} leaves the solution underdetermined (needs {1})")]
    Underdetermined(usize, usize),
    #[error("lift is only defined over base rings Z/p^m (coordinate outside the base subring)")]
    LiftNeedsBaseRing,
    #[error(transparent)]
    Qexp(#[from] QexpError),
}

/// Operator tags for matrix caching.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum OpTag {
    Tn(u64),
    Diamond(u64),
    Stroke(u64),
}

impl std::fmt::Display for OpTag {
    fn fmt(&self, w: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OpTag::Tn(n) => write!(w, "T{n}"),
            OpTag::Diamond(d) => write!(w, "D{d}"),
            OpTag::Stroke(l) => write!(w, "S{l}"),
        }
    }
}

/// An integral basis of a space of cusp forms (possibly a direct sum of
/// weights), saturated in its coefficient lattice.
pub struct SpaceBasis {
    pub level: u64,
    pub group: Group,
    pub character: Option<DirichletCharacter>,
    pub trunc: usize,
    /// Saturated basis rows (what coordinates refer to).
    pub rows: Vec<QExpansion<BigInt>>,
    /// Labeled single-weight generating rows the Hecke formulas act on.
    gen_rows: Vec<QExpansion<BigInt>>,
    /// Each saturated row as a rational combination of the generating rows.
    sat_in_gen: Vec<Vec<BigRational>>,
    pub warnings: Vec<String>,
    digest: String,
    cache: RwLock<HashMap<OpTag, Arc<IntMatrix>>>,
    bound_cache: RwLock<Option<usize>>,
}

impl std::fmt::Debug for SpaceBasis {
    fn fmt(&self, w: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            w,
            "SpaceBasis(level={}, dim={}, trunc={}, group={})",
            self.level,
            self.rows.len(),
            self.trunc,
            self.group
        )
    }
}

impl SpaceBasis {
    /// Build and validate a basis: rank must equal the number of rows, and
    /// the lattice is saturated (repaired with a warning otherwise).
    pub fn new(
        level: u64,
        group: Group,
        character: Option<DirichletCharacter>,
        row_weights: Vec<u32>,
        coeff_rows: Vec<Vec<BigInt>>,
    ) -> Result<Self, HeckeError> {
        assert_eq!(row_weights.len(), coeff_rows.len());
        assert!(!coeff_rows.is_empty());
        let trunc = coeff_rows[0].len();
        assert!(coeff_rows.iter().all(|r| r.len() == trunc));
        let dim = coeff_rows.len();
        let mat = IntMatrix::from_rows(coeff_rows.clone());
        let rank = int::rank_q(&mat);
        if rank != dim {
            return Err(HeckeError::RankDeficient {
                got: rank,
                want: dim,
            });
        }
        let gen_rows: Vec<QExpansion<BigInt>> = coeff_rows
            .iter()
            .zip(&row_weights)
            .map(|(r, &k)| QExpansion::cusp_form(level, k, group, character.clone(), r.clone()))
            .collect();

        let (sat, divisors) = int::saturate_rows(&mat);
        let saturated = divisors.iter().all(|d| d.is_one());
        let mut warnings = Vec::new();
        let rows: Vec<QExpansion<BigInt>> = if saturated {
            gen_rows.clone()
        } else {
            warnings.push(format!(
                "basis lattice was not saturated (elementary divisors {}); repaired",
                divisors
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            ));
            let mut weights: Vec<u32> = row_weights.clone();
            weights.sort();
            weights.dedup();
            let wt = if weights.len() == 1 {
                WeightTag::Single(weights[0])
            } else {
                WeightTag::Multi(weights)
            };
            (0..sat.rows)
                .map(|i| {
                    let mut q = QExpansion::cusp_form(
                        level,
                        1,
                        group,
                        character.clone(),
                        sat.row(i).to_vec(),
                    );
                    q.weight = wt.clone();
                    q
                })
                .collect()
        };
        // express saturated rows in the generating rows (exact, rational)
        let gen_t = mat.transpose();
        let rhs: Vec<Vec<BigRational>> = rows
            .iter()
            .map(|r| {
                r.coeffs
                    .iter()
                    .map(|c| BigRational::from(c.clone()))
                    .collect()
            })
            .collect();
        let sols = int::solve_q_multi(&gen_t, &rhs).expect("dimensions agree");
        let sat_in_gen: Vec<Vec<BigRational>> = sols
            .into_iter()
            .map(|s| s.expect("saturation lies in the rational span"))
            .collect();

        let mut sb = SpaceBasis {
            level,
            group,
            character,
            trunc,
            rows,
            gen_rows,
            sat_in_gen,
            warnings,
            digest: String::new(),
            cache: RwLock::new(HashMap::new()),
            bound_cache: RwLock::new(None),
        };
        sb.digest = sb.compute_digest();
        Ok(sb)
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn digest(&self) -> &str {
        &self.digest
    }

    fn compute_digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update(format!(
            "space level={} group={} trunc={}\n",
            self.level, self.group, self.trunc
        ));
        for r in &self.rows {
            let line: Vec<String> = r.coeffs.iter().map(|c| c.to_string()).collect();
            h.update(line.join(","));
            h.update("\n");
        }
        hex_string(&h.finalize())
    }

    pub fn row_weights(&self) -> Vec<WeightTag> {
        self.rows.iter().map(|r| r.weight.clone()).collect()
    }

    pub fn weight_multiset(&self) -> Vec<u32> {
        let mut ws = Vec::new();
        for r in &self.gen_rows {
            ws.push(
                r.weight
                    .single()
                    .expect("generating rows are single weight"),
            );
        }
        ws
    }

    pub fn max_weight(&self) -> u32 {
        self.gen_rows
            .iter()
            .map(|r| r.weight.max_weight())
            .max()
            .unwrap_or(1)
    }

    fn distinct_weights(&self) -> Vec<u32> {
        let mut ws = self.weight_multiset();
        ws.sort();
        ws.dedup();
        ws
    }

    /// Truncation length at which the q-expansion map on this space is
    /// provably injective: the Sturm bound for a single weight, the audited
    /// sum rule (sum of the per-weight bounds plus one) for direct sums;
    /// verified by a rank check and raised if deficient.
    pub fn injectivity_bound(&self) -> Result<usize, HeckeError> {
        if let Some(b) = *self.bound_cache.read().unwrap() {
            return Ok(b);
        }
        let ws = self.distinct_weights();
        let mut bound: usize = if ws.len() == 1 {
            sturm_bound(self.level, ws[0], self.group) as usize
        } else {
            let b = self.max_weight();
            (1..=b)
                .map(|k| sturm_bound(self.level, k, self.group) as usize)
                .sum::<usize>()
                + 1
        };
        bound = bound.max(self.dim());
        loop {
            if bound > self.trunc {
                return Err(HeckeError::BoundExceedsTruncation(bound, self.trunc));
            }
            let sub = IntMatrix::from_rows(
                self.rows
                    .iter()
                    .map(|r| r.coeffs[..bound].to_vec())
                    .collect(),
            );
            if int::rank_q(&sub) == self.dim() {
                break;
            }
            bound += 1;
        }
        *self.bound_cache.write().unwrap() = Some(bound);
        Ok(bound)
    }

    /// Expansion (length `len`) of the image of saturated row `r` under an
    /// operator applied to the generating rows.
    fn image_expansion(
        &self,
        r: usize,
        len: usize,
        op: impl Fn(&QExpansion<BigInt>) -> Result<QExpansion<BigInt>, QexpError>,
    ) -> Result<Vec<BigRational>, HeckeError> {
        let mut acc = vec![BigRational::zero(); len];
        for (j, c) in self.sat_in_gen[r].iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let img = op(&self.gen_rows[j])?;
            if img.trunc() < len {
                return Err(HeckeError::InsufficientTruncation {
                    n: 0,
                    needed: len,
                    have: img.trunc(),
                });
            }
            for i in 0..len {
                acc[i] = &acc[i] + &(c * &BigRational::from(img.coeffs[i].clone()));
            }
        }
        Ok(acc)
    }

    /// Solve for the integer matrix of an operator given the expansions of
    /// its images on the basis.
    fn matrix_from_images(
        &self,
        n_label: u64,
        images: Vec<Vec<BigRational>>,
        len: usize,
    ) -> Result<IntMatrix, HeckeError> {
        // system: basis^T (len x d) * coords = image
        let basis_t = IntMatrix::from_rows(
            (0..len)
                .map(|i| self.rows.iter().map(|r| r.coeffs[i].clone()).collect())
                .collect(),
        );
        let sols = int::solve_q_multi(&basis_t, &images).expect("dimensions agree");
        let mut m = IntMatrix::zero(self.dim(), self.dim());
        for (j, sol) in sols.into_iter().enumerate() {
            let Some(x) = sol else {
                return Err(HeckeError::NotStable(n_label));
            };
            for (i, c) in x.into_iter().enumerate() {
                if !c.denom().is_one() {
                    return Err(HeckeError::NotIntegral(n_label));
                }
                m.set(i, j, c.numer().clone());
            }
        }
        Ok(m)
    }

    /// The integer matrix of `T_n` in this basis: column `j` holds the
    /// coordinates of `T_n f_j`. Requires truncation at least `n` times the
    /// injectivity bound. Memoized.
    pub fn hecke_matrix(&self, n: u64) -> Result<Arc<IntMatrix>, HeckeError> {
        self.matrix_for(OpTag::Tn(n))
    }

    /// Diamond operator matrix (scalar through the declared character).
    pub fn diamond_matrix(&self, d: u64) -> Result<Arc<IntMatrix>, HeckeError> {
        self.matrix_for(OpTag::Diamond(d))
    }

    /// The weight-uniform stroke operator `l (T_l^2 - T_{l^2})` as a matrix;
    /// well defined on direct sums.
    pub fn stroke_matrix(&self, ell: u64) -> Result<Arc<IntMatrix>, HeckeError> {
        self.matrix_for(OpTag::Stroke(ell))
    }

    pub fn matrix_for(&self, tag: OpTag) -> Result<Arc<IntMatrix>, HeckeError> {
        if let Some(m) = self.cache.read().unwrap().get(&tag) {
            return Ok(m.clone());
        }
        let bound = self.injectivity_bound()?;
        let m = match tag {
            OpTag::Tn(n) => {
                let needed = (n as usize) * bound;
                if needed > self.trunc {
                    return Err(HeckeError::InsufficientTruncation {
                        n,
                        needed,
                        have: self.trunc,
                    });
                }
                let images = (0..self.dim())
                    .map(|r| self.image_expansion(r, bound, |g| g.hecke_tn(n)))
                    .collect::<Result<Vec<_>, _>>()?;
                self.matrix_from_images(n, images, bound)?
            }
            OpTag::Diamond(d) => {
                let images = (0..self.dim())
                    .map(|r| self.image_expansion(r, bound, |g| g.diamond(d)))
                    .collect::<Result<Vec<_>, _>>()?;
                self.matrix_from_images(d, images, bound)?
            }
            OpTag::Stroke(l) => {
                let t_l = self.hecke_matrix(l)?;
                let t_l2 = self.hecke_matrix(l * l)?;
                let mut m = IntMatrix::zero(self.dim(), self.dim());
                let ell = BigInt::from(l);
                for i in 0..self.dim() {
                    for j in 0..self.dim() {
                        let mut acc = BigInt::zero();
                        for k in 0..self.dim() {
                            acc += t_l.get(i, k) * t_l.get(k, j);
                        }
                        m.set(i, j, (&acc - t_l2.get(i, j)) * &ell);
                    }
                }
                m
            }
        };
        let m = Arc::new(m);
        self.cache.write().unwrap().insert(tag, m.clone());
        Ok(m)
    }

    /// Z-rank of the span of the matrices `T_1 .. T_{n_max}` inside the
    /// matrix space, via the Smith form. Must equal the dimension of the
    /// space; a deficient rank (n_max too small, or a bad basis) is an
    /// error carrying the computed value.
    pub fn algebra_rank(&self, n_max: u64) -> Result<usize, HeckeError> {
        let d = self.dim();
        let mut rows = Vec::new();
        for n in 1..=n_max {
            let m = self.hecke_matrix(n)?;
            let mut row = Vec::with_capacity(d * d);
            for i in 0..d {
                for j in 0..d {
                    row.push(m.get(i, j).clone());
                }
            }
            rows.push(row);
        }
        let stacked = IntMatrix::from_rows(rows);
        let rank = int::smith_normal_form(&stacked).rank();
        if rank != d {
            return Err(HeckeError::AlgebraRankDeficient { got: rank, want: d });
        }
        Ok(rank)
    }

    /// The pairing matrix with entries `(i, j) = a_1(T_i f_j) = a_i(f_j)`
    /// for `i <= n_max`.
    pub fn pairing_matrix(&self, n_max: usize) -> IntMatrix {
        assert!(n_max <= self.trunc);
        IntMatrix::from_rows(
            (0..n_max)
                .map(|i| self.rows.iter().map(|r| r.coeffs[i].clone()).collect())
                .collect(),
        )
    }

    /// Integer-coordinate form from the basis: expansion = sum c_j f_j.
    pub fn expansion_of(&self, coords: &[BigInt]) -> QExpansion<BigInt> {
        assert_eq!(coords.len(), self.dim());
        let mut acc = vec![BigInt::zero(); self.trunc];
        for (c, row) in coords.iter().zip(&self.rows) {
            if c.is_zero() {
                continue;
            }
            for (x, y) in acc.iter_mut().zip(&row.coeffs) {
                *x += c * y;
            }
        }
        let mut weights: Vec<u32> = Vec::new();
        for r in &self.gen_rows {
            weights.push(r.weight.single().unwrap());
        }
        weights.sort();
        weights.dedup();
        let mut q = QExpansion::cusp_form(
            self.level,
            weights[0],
            self.group,
            self.character.clone(),
            acc,
        );
        if weights.len() > 1 {
            q.weight = WeightTag::Multi(weights);
        }
        q
    }

    /// Coordinates of an integer q-expansion in this basis, when it lies in
    /// the lattice.
    pub fn coordinates_of(&self, coeffs: &[BigInt]) -> Option<Vec<BigInt>> {
        let len = self.trunc.min(coeffs.len());
        if len < self.injectivity_bound().ok()? {
            return None;
        }
        let basis_t = IntMatrix::from_rows(
            (0..len)
                .map(|i| self.rows.iter().map(|r| r.coeffs[i].clone()).collect())
                .collect(),
        );
        let rhs: Vec<BigRational> = coeffs[..len]
            .iter()
            .map(|c| BigRational::from(c.clone()))
            .collect();
        let sol = int::solve_q_multi(&basis_t, &[rhs]).ok()?.pop()??;
        if sol.iter().any(|c| !c.denom().is_one()) {
            return None;
        }
        Some(sol.into_iter().map(|c| c.numer().clone()).collect())
    }
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// A space reduced modulo `p^m`: the coefficient-ring presentation of
/// `S(A)` as the `A`-span of the reduced saturated basis.
pub struct ReducedSpace {
    pub space: Arc<SpaceBasis>,
    pub ring: ModRing,
    pub rows_mod: Vec<Vec<RingElement>>,
}

impl ReducedSpace {
    pub fn new(space: Arc<SpaceBasis>, ring: ModRing) -> Self {
        let rows_mod = space
            .rows
            .iter()
            .map(|r| r.reduce_mod(&ring).coeffs)
            .collect();
        ReducedSpace {
            space,
            ring,
            rows_mod,
        }
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// The reduced matrix of `T_n` (entries embedded into the ring).
    pub fn hecke_matrix_mod(&self, n: u64) -> Result<Vec<Vec<RingElement>>, HeckeError> {
        let m = self.space.hecke_matrix(n)?;
        Ok(self.reduce_matrix(&m))
    }

    pub fn reduce_matrix(&self, m: &IntMatrix) -> Vec<Vec<RingElement>> {
        let pm = BigInt::from(self.ring.pm());
        (0..m.rows)
            .map(|i| {
                (0..m.cols)
                    .map(|j| {
                        let r = m.get(i, j).mod_floor(&pm).to_u64().expect("fits");
                        self.ring.embed_base(r)
                    })
                    .collect()
            })
            .collect()
    }

    /// Expansion values (a_1..a_trunc) of the form with given coordinates.
    pub fn values_of(&self, coords: &[RingElement]) -> Vec<RingElement> {
        let trunc = self.space.trunc;
        let mut acc = vec![self.ring.zero(); trunc];
        for (c, row) in coords.iter().zip(&self.rows_mod) {
            if c.is_zero() {
                continue;
            }
            for (x, y) in acc.iter_mut().zip(row) {
                *x = x.add(&c.mul(y));
            }
        }
        acc
    }

    /// Membership of a value vector in the span of the reduced basis,
    /// returning the coefficient form. The vector must determine the
    /// coordinates uniquely (full declared truncation always does).
    pub fn form_with_coefficients(
        self: &Arc<Self>,
        values: &[RingElement],
    ) -> Result<CoefficientForm, HeckeError> {
        let len = values.len().min(self.space.trunc);
        let rows: Vec<Vec<RingElement>> = (0..len)
            .map(|i| self.rows_mod.iter().map(|r| r[i].clone()).collect())
            .collect();
        let a = ChainMat::from_rows(rows);
        let sol = chain::solve_affine(&a, &values[..len]).ok_or(HeckeError::NotInSpan)?;
        if !sol.kernel.is_empty() && sol.kernel.iter().any(|g| g.iter().any(|x| !x.is_zero())) {
            return Err(HeckeError::Underdetermined(len, self.space.trunc));
        }
        Ok(CoefficientForm {
            space: self.clone(),
            coords: sol.particular,
        })
    }

    pub fn form_from_coords(self: &Arc<Self>, coords: Vec<RingElement>) -> CoefficientForm {
        assert_eq!(coords.len(), self.dim());
        CoefficientForm {
            space: self.clone(),
            coords,
        }
    }
}

/// An element of `S(A)`: a form over a coefficient ring, stored by its
/// coordinates in the reduced saturated basis.
#[derive(Clone)]
pub struct CoefficientForm {
    pub space: Arc<ReducedSpace>,
    pub coords: Vec<RingElement>,
}

impl CoefficientForm {
    /// Formal q-expansion values a_1..a_trunc.
    pub fn values(&self) -> Vec<RingElement> {
        self.space.values_of(&self.coords)
    }

    pub fn value_at(&self, n: usize) -> RingElement {
        let mut acc = self.space.ring.zero();
        for (c, row) in self.coords.iter().zip(&self.space.rows_mod) {
            acc = acc.add(&c.mul(&row[n - 1]));
        }
        acc
    }

    /// Coordinatewise least-nonnegative lift to an integer form; reduces
    /// back to this form.
    pub fn lift(&self) -> Result<(Vec<BigInt>, QExpansion<BigInt>), HeckeError> {
        let mut int_coords = Vec::with_capacity(self.coords.len());
        for c in &self.coords {
            let v = self
                .space
                .ring
                .in_base_subring(c)
                .ok_or(HeckeError::LiftNeedsBaseRing)?;
            int_coords.push(BigInt::from(v));
        }
        let q = self.space.space.expansion_of(&int_coords);
        Ok((int_coords, q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::refdata;

    /// A small synthetic space: span of q and q^2 at level 1 weight 2,
    /// truncation 12 (plenty for sturm bound 1).
    fn toy_space() -> SpaceBasis {
        let rows = vec![
            vec![1i64, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
            vec![0i64, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        ];
        SpaceBasis::new(
            1,
            Group::Gamma0,
            None,
            vec![2, 2],
            rows.iter()
                .map(|r| r.iter().map(|&c| BigInt::from(c)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn t1_is_identity() {
        let s = toy_space();
        let m = s.hecke_matrix(1).unwrap();
        assert_eq!(*m, IntMatrix::identity(2));
    }

    #[test]
    fn rank_deficient_rejected() {
        let rows = vec![
            vec![BigInt::from(1), BigInt::from(2)],
            vec![BigInt::from(2), BigInt::from(4)],
        ];
        assert!(matches!(
            SpaceBasis::new(1, Group::Gamma0, None, vec![2, 2], rows),
            Err(HeckeError::RankDeficient { .. })
        ));
    }

    #[test]
    fn saturation_repair_warns() {
        // lattice spanned by 3e1, e2 gets repaired to e1, e2
        let rows = vec![
            vec![BigInt::from(3), BigInt::from(0), BigInt::from(0)],
            vec![BigInt::from(0), BigInt::from(1), BigInt::from(0)],
        ];
        let s = SpaceBasis::new(1, Group::Gamma0, None, vec![2, 2], rows).unwrap();
        assert_eq!(s.warnings.len(), 1);
        assert_eq!(s.rows[0].coeffs[0], BigInt::one());
    }

    /// The real level-26 space from the reference coefficients (only 19
    /// coefficients here; enough for the injectivity bound 7 and small n).
    fn space_26_short() -> SpaceBasis {
        // rows: g itself and a second row making the pair full rank; we use
        // g and its "odd part companion" g(q^2) embedded at level 52 later,
        // so here just check rank/pairing on g alone.
        SpaceBasis::new(
            26,
            Group::Gamma0,
            None,
            vec![2],
            vec![refdata::G26_COEFFS
                .iter()
                .map(|&c| BigInt::from(c))
                .collect()],
        )
        .unwrap()
    }

    #[test]
    fn eigenform_row_gives_diagonal_matrices() {
        let s = space_26_short();
        assert_eq!(s.injectivity_bound().unwrap(), 7);
        // T_2 g = a_2(g) g = g
        let m2 = s.hecke_matrix(2).unwrap();
        assert_eq!(m2.get(0, 0), &BigInt::from(1));
        // pairing matrix is the coefficient column
        let p = s.pairing_matrix(7);
        assert_eq!(p.get(4, 0), &BigInt::from(-1));
        assert_eq!(int::rank_q(&p), 1);
        // algebra rank of a one-dimensional space is 1
        assert_eq!(s.algebra_rank(2).unwrap(), 1);
    }

    #[test]
    fn truncation_guard() {
        let s = space_26_short();
        // T_3 needs 3 * 7 = 21 > 19 coefficients
        assert!(matches!(
            s.hecke_matrix(3),
            Err(HeckeError::InsufficientTruncation { .. })
        ));
    }

    #[test]
    fn reduced_space_membership() {
        let ring = ModRing::zp(3, 2).unwrap();
        let s = Arc::new(toy_space());
        let rs = Arc::new(ReducedSpace::new(s, ring.clone()));
        // 2q + 5q^2 is in the span
        let mut values = vec![ring.zero(); 12];
        values[0] = ring.embed_base(2);
        values[1] = ring.embed_base(5);
        let f = rs.form_with_coefficients(&values).unwrap();
        assert_eq!(f.coords[0], ring.embed_base(2));
        assert_eq!(f.coords[1], ring.embed_base(5));
        assert_eq!(f.value_at(2), ring.embed_base(5));
        // q^3 is not
        let mut bad = vec![ring.zero(); 12];
        bad[2] = ring.one();
        assert!(matches!(
            rs.form_with_coefficients(&bad),
            Err(HeckeError::NotInSpan)
        ));
        // lift round trip
        let (coords, q) = f.lift().unwrap();
        assert_eq!(coords, vec![BigInt::from(2), BigInt::from(5)]);
        assert_eq!(q.coeffs[1], BigInt::from(5));
    }
}
