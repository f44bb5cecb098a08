//! Howell normal form, kernels, affine solving and layered lifting over
//! chain rings.
//!
//! A chain ring here is a finite local principal ideal ring: every element
//! factors as unit times `pi^v` for a uniformizer `pi` with `pi^gamma = 0`.
//! Row spans over such rings are captured by the Howell normal form, the
//! analogue of reduced echelon form that additionally contains all
//! annihilator shifts of its rows; Hermite-style forms are not enough
//! because `{x : A x = 0}` needs those shifts.

use super::LinalgError;

/// Scalar interface the chain-ring algorithms need. Implemented by `Z/p^m`
/// residues and by ring-tower elements.
pub trait ChainScalar: Clone + PartialEq + std::fmt::Debug {
    fn is_zero(&self) -> bool;
    /// Nilpotency exponent of the uniformizer: `pi^gamma = 0`.
    fn gamma(&self) -> u32;
    /// pi-adic valuation, with `val(0) = gamma`.
    fn val(&self) -> u32;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// The canonical element `pi^v` of the same ring.
    fn pi_pow_like(&self, v: u32) -> Self;
    /// Inverse of a unit (val 0). May panic on non-units.
    fn unit_inv(&self) -> Self;
    /// Some `q` with `q * b = self`; requires `val(self) >= val(b)`.
    /// Must be deterministic.
    fn div_exact(&self, b: &Self) -> Self;
    /// Canonical representative of `self` modulo the ideal `(pi^v)`.
    fn canon_mod_pi(&self, v: u32) -> Self;
    /// Deterministic total-order key (canonical coordinates).
    fn sort_key(&self) -> Vec<u64>;
    /// All ring elements, if the ring is small enough to enumerate.
    fn all_elements(&self) -> Option<Vec<Self>>;
}

/// Dense matrix over a chain scalar, row major. May have zero rows.
#[derive(Clone, PartialEq, Debug)]
pub struct ChainMat<T> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<T>,
}

impl<T: ChainScalar> ChainMat<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        assert!(!rows.is_empty() && !rows[0].is_empty(), "empty matrix");
        let r = rows.len();
        let c = rows[0].len();
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        ChainMat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn empty(cols: usize) -> Self {
        ChainMat {
            rows: 0,
            cols,
            data: Vec::new(),
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows_vec(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = x[0].zero_like();
                for j in 0..self.cols {
                    acc = acc.add(&self.get(i, j).mul(&x[j]));
                }
                acc
            })
            .collect()
    }
}

fn vec_sub_scaled<T: ChainScalar>(dst: &mut [T], src: &[T], q: &T) {
    if q.is_zero() {
        return;
    }
    for (d, s) in dst.iter_mut().zip(src.iter()) {
        *d = d.sub(&q.mul(s));
    }
}

fn vec_scale<T: ChainScalar>(v: &[T], c: &T) -> Vec<T> {
    v.iter().map(|x| x.mul(c)).collect()
}

struct WorkRow<T> {
    row: Vec<T>,
    combo: Vec<T>,
}

/// Howell normal form.
///
/// Returns `(h, t)` with `t * a = h`. The form is canonical for the row
/// span: pivots are `pi^v` chosen of minimal valuation (topmost on ties),
/// entries above a pivot are canonical representatives modulo that pivot,
/// and the span is closed under annihilator shifts.
pub fn howell_form<T: ChainScalar>(a: &ChainMat<T>) -> (ChainMat<T>, ChainMat<T>) {
    assert!(a.rows > 0, "howell_form needs at least one row");
    let zero = a.get(0, 0).zero_like();
    let one = a.get(0, 0).one_like();
    let gamma = a.get(0, 0).gamma();
    let ncombo = a.rows;
    let mut work: Vec<WorkRow<T>> = (0..a.rows)
        .map(|i| {
            let mut combo = vec![zero.clone(); ncombo];
            combo[i] = one.clone();
            WorkRow {
                row: a.row(i).to_vec(),
                combo,
            }
        })
        .collect();
    let mut placed: Vec<WorkRow<T>> = Vec::new();
    let mut pivot_info: Vec<(usize, u32)> = Vec::new(); // (pivot col, valuation)

    for j in 0..a.cols {
        // pivot: minimal valuation entry in column j among the remaining rows
        let mut best: Option<(usize, u32)> = None;
        for (i, wr) in work.iter().enumerate() {
            if wr.row[j].is_zero() {
                continue;
            }
            let v = wr.row[j].val();
            if best.is_none_or(|(_, bv)| v < bv) {
                best = Some((i, v));
            }
        }
        let Some((bi, v)) = best else {
            continue;
        };
        let mut piv = work.swap_remove(bi);
        // normalize pivot entry to exactly pi^v
        let pivval = piv.row[j].clone();
        let unit = pivval.div_exact(&pivval.pi_pow_like(v));
        let uinv = unit.unit_inv();
        piv.row = vec_scale(&piv.row, &uinv);
        piv.combo = vec_scale(&piv.combo, &uinv);
        let pivot = piv.row[j].clone();
        debug_assert_eq!(pivot, pivot.pi_pow_like(v));
        // eliminate column j from every other remaining row
        for wr in work.iter_mut() {
            if wr.row[j].is_zero() {
                continue;
            }
            let q = wr.row[j].div_exact(&pivot);
            vec_sub_scaled(&mut wr.row, &piv.row, &q);
            vec_sub_scaled(&mut wr.combo, &piv.combo, &q);
        }
        // annihilator shift keeps the span Howell-closed
        if v > 0 {
            let ann = pivot.pi_pow_like(gamma - v);
            let arow = vec_scale(&piv.row, &ann);
            let acombo = vec_scale(&piv.combo, &ann);
            if arow.iter().any(|x| !x.is_zero()) {
                work.push(WorkRow {
                    row: arow,
                    combo: acombo,
                });
            }
        }
        pivot_info.push((j, v));
        placed.push(piv);
    }

    // reduce entries above each pivot to their canonical representatives
    for i in (0..placed.len()).rev() {
        let (pj, pv) = pivot_info[i];
        let (above, rest) = placed.split_at_mut(i);
        let piv = &rest[0];
        for wr in above.iter_mut() {
            let e = &wr.row[pj];
            let canon = e.canon_mod_pi(pv);
            let diff = e.sub(&canon);
            if diff.is_zero() {
                continue;
            }
            let q = diff.div_exact(&piv.row[pj]);
            vec_sub_scaled(&mut wr.row, &piv.row, &q);
            vec_sub_scaled(&mut wr.combo, &piv.combo, &q);
        }
    }

    if placed.is_empty() {
        return (ChainMat::empty(a.cols), ChainMat::empty(a.rows));
    }
    let h = ChainMat::from_rows(placed.iter().map(|wr| wr.row.clone()).collect());
    let t = ChainMat::from_rows(placed.iter().map(|wr| wr.combo.clone()).collect());
    (h, t)
}

/// Pivot positions (row, col, valuation) of a matrix already in Howell form.
fn pivots_of<T: ChainScalar>(h: &ChainMat<T>) -> Vec<(usize, usize, u32)> {
    let mut out = Vec::new();
    for i in 0..h.rows {
        if let Some(j) = (0..h.cols).find(|&j| !h.get(i, j).is_zero()) {
            out.push((i, j, h.get(i, j).val()));
        }
    }
    out
}

/// Reduce `v` against a Howell form, returning the residual and the
/// combination used. `v` is in the row span iff the residual is zero.
fn reduce_against<T: ChainScalar>(h: &ChainMat<T>, v: &[T]) -> (Vec<T>, Vec<T>) {
    let zero = v[0].zero_like();
    let mut r = v.to_vec();
    let mut combo = vec![zero; h.rows];
    for (i, j, pv) in pivots_of(h) {
        if r[j].is_zero() {
            continue;
        }
        if r[j].val() >= pv {
            let q = r[j].div_exact(h.get(i, j));
            vec_sub_scaled(&mut r, h.row(i), &q);
            combo[i] = combo[i].add(&q);
        }
    }
    (r, combo)
}

/// Whether `v` lies in the row span of `a`.
pub fn in_row_span<T: ChainScalar>(a: &ChainMat<T>, v: &[T]) -> bool {
    if a.rows == 0 {
        return v.iter().all(|x| x.is_zero());
    }
    let (h, _) = howell_form(a);
    reduce_against(&h, v).0.iter().all(|x| x.is_zero())
}

/// Generating set of `{x : a x = 0}`. The generators span the kernel
/// exactly as a module.
pub fn kernel<T: ChainScalar>(a: &ChainMat<T>) -> Vec<Vec<T>> {
    let zero = a.get(0, 0).zero_like();
    let one = a.get(0, 0).one_like();
    // rows of [A^T | I]: the combination with coefficients x equals
    // [(A x)^T | x^T], so rows of the Howell form with zero left part
    // give exactly the kernel.
    let mut rows = Vec::with_capacity(a.cols);
    for j in 0..a.cols {
        let mut row = Vec::with_capacity(a.rows + a.cols);
        for i in 0..a.rows {
            row.push(a.get(i, j).clone());
        }
        for k in 0..a.cols {
            row.push(if k == j { one.clone() } else { zero.clone() });
        }
        rows.push(row);
    }
    let (h, _) = howell_form(&ChainMat::from_rows(rows));
    let mut gens = Vec::new();
    for i in 0..h.rows {
        if (0..a.rows).all(|c| h.get(i, c).is_zero()) {
            gens.push(h.row(i)[a.rows..].to_vec());
        }
    }
    gens
}

/// An affine solution set `particular + span(kernel)`.
#[derive(Clone, Debug)]
pub struct AffineSet<T> {
    pub particular: Vec<T>,
    pub kernel: Vec<Vec<T>>,
}

impl<T: ChainScalar> AffineSet<T> {
    /// Membership test, exact.
    pub fn contains(&self, x: &[T]) -> bool {
        let diff: Vec<T> = x
            .iter()
            .zip(&self.particular)
            .map(|(a, b)| a.sub(b))
            .collect();
        if self.kernel.is_empty() {
            return diff.iter().all(|v| v.is_zero());
        }
        in_row_span(&ChainMat::from_rows(self.kernel.clone()), &diff)
    }

    /// Enumerate all points of the set, if the scalar ring is enumerable
    /// and the point count stays within `limit`.
    pub fn enumerate(&self, limit: usize) -> Option<Vec<Vec<T>>> {
        let witness = self.particular.first()?;
        let elems = witness.all_elements()?;
        let mut pts: Vec<Vec<T>> = vec![self.particular.clone()];
        for gen in &self.kernel {
            let mut next: Vec<Vec<T>> = Vec::new();
            for p in &pts {
                for c in &elems {
                    let cand: Vec<T> = p
                        .iter()
                        .zip(gen.iter())
                        .map(|(a, g)| a.add(&c.mul(g)))
                        .collect();
                    next.push(cand);
                }
            }
            // dedupe by canonical key
            next.sort_by_key(|v| v.iter().flat_map(|x| x.sort_key()).collect::<Vec<u64>>());
            next.dedup();
            if next.len() > limit {
                return None;
            }
            pts = next;
        }
        Some(pts)
    }
}

/// Solve `a x = b`. Returns the full solution set, or `None` when `b` is
/// outside the column span.
pub fn solve_affine<T: ChainScalar>(a: &ChainMat<T>, b: &[T]) -> Option<AffineSet<T>> {
    assert_eq!(a.rows, b.len(), "dimension mismatch");
    let zero = a.get(0, 0).zero_like();
    let one = a.get(0, 0).one_like();
    let mut rows = Vec::with_capacity(a.cols);
    for j in 0..a.cols {
        let mut row = Vec::with_capacity(a.rows + a.cols);
        for i in 0..a.rows {
            row.push(a.get(i, j).clone());
        }
        for k in 0..a.cols {
            row.push(if k == j { one.clone() } else { zero.clone() });
        }
        rows.push(row);
    }
    let (h, _) = howell_form(&ChainMat::from_rows(rows));
    // reduce [b^T | 0] against rows of h using only left-block pivots;
    // the accumulated right part is -x for a particular solution x
    let mut target: Vec<T> = b.to_vec();
    target.extend(std::iter::repeat_with(|| zero.clone()).take(a.cols));
    let mut r = target;
    for (i, j, pv) in pivots_of(&h) {
        if j >= a.rows {
            break;
        }
        if !r[j].is_zero() && r[j].val() >= pv {
            let q = r[j].div_exact(h.get(i, j));
            vec_sub_scaled(&mut r, h.row(i), &q);
        }
    }
    if r[..a.rows].iter().any(|x| !x.is_zero()) {
        return None;
    }
    let particular: Vec<T> = r[a.rows..].iter().map(|x| x.neg()).collect();
    let mut kernel = Vec::new();
    for i in 0..h.rows {
        if (0..a.rows).all(|c| h.get(i, c).is_zero()) {
            kernel.push(h.row(i)[a.rows..].to_vec());
        }
    }
    debug_assert!(a.apply(&particular).iter().zip(b).all(|(x, y)| x == y));
    Some(AffineSet { particular, kernel })
}

/// Lift a complete solution set through one precision layer.
///
/// `a x = b` is posed over the finer ring; `prev` is the exact solution set
/// of the same system over the coarser ring, and `reduce` maps finer scalars
/// to coarser ones. Every returned vector solves over the finer ring and
/// reduces into `prev`; the parameterization is affine and complete. If the
/// computed solutions do not reduce into `prev`, the lower layer was not
/// exact and an error is returned.
pub fn lift_solutions<T: ChainScalar, S: ChainScalar>(
    a: &ChainMat<T>,
    b: &[T],
    prev: &AffineSet<S>,
    reduce: impl Fn(&T) -> S,
) -> Result<Option<AffineSet<T>>, LinalgError> {
    let Some(sol) = solve_affine(a, b) else {
        return Ok(None);
    };
    let red: Vec<S> = sol.particular.iter().map(&reduce).collect();
    if !prev.contains(&red) {
        return Err(LinalgError::MixedRings);
    }
    if !prev.kernel.is_empty() || !sol.kernel.is_empty() {
        if prev.kernel.is_empty() {
            let all_zero = sol
                .kernel
                .iter()
                .all(|g| g.iter().map(&reduce).all(|x| x.is_zero()));
            if !all_zero {
                return Err(LinalgError::MixedRings);
            }
        } else {
            let span = ChainMat::from_rows(prev.kernel.clone());
            let (h, _) = howell_form(&span);
            for g in &sol.kernel {
                let rg: Vec<S> = g.iter().map(&reduce).collect();
                if !reduce_against(&h, &rg).0.iter().all(|x| x.is_zero()) {
                    return Err(LinalgError::MixedRings);
                }
            }
        }
    }
    Ok(Some(sol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::zn::{ZnElem, ZnRing};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mat(r: ZnRing, rows: &[Vec<u64>]) -> ChainMat<ZnElem> {
        ChainMat::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&v| r.elem(v)).collect())
                .collect(),
        )
    }

    /// Enumerate the full row span by brute force (all coefficient vectors).
    fn span_points(r: ZnRing, rows: &[Vec<u64>], cols: usize) -> Vec<Vec<u64>> {
        let mut coeffs = vec![0u64; rows.len()];
        let mut out = Vec::new();
        loop {
            let mut v = vec![0u64; cols];
            for (c, row) in coeffs.iter().zip(rows) {
                for (x, y) in v.iter_mut().zip(row) {
                    *x = r.add(*x, r.mul(*c, *y));
                }
            }
            out.push(v);
            // odometer
            let mut k = 0;
            loop {
                if k == coeffs.len() {
                    out.sort();
                    out.dedup();
                    return out;
                }
                coeffs[k] += 1;
                if coeffs[k] < r.q {
                    break;
                }
                coeffs[k] = 0;
                k += 1;
            }
        }
    }

    #[test]
    fn howell_identity() {
        let r = ZnRing::new(3, 2);
        let a = mat(r, &[vec![1, 0], vec![0, 1]]);
        let (h, t) = howell_form(&a);
        assert_eq!(h, a);
        assert_eq!(t, a);
    }

    #[test]
    fn howell_single_row_2_mod_4() {
        // span of (2) over Z/4 is {0, 2}
        let r = ZnRing::new(2, 2);
        let a = mat(r, &[vec![2]]);
        let (h, _) = howell_form(&a);
        assert_eq!(h.rows, 1);
        assert_eq!(h.get(0, 0).v, 2);
        assert_eq!(span_points(r, &[vec![2]], 1), vec![vec![0], vec![2]]);
    }

    #[test]
    fn howell_span_size_27_mod_9() {
        let r = ZnRing::new(3, 2);
        let rows = vec![vec![3u64, 0], vec![0, 1]];
        let (h, _) = howell_form(&mat(r, &rows));
        let hrows: Vec<Vec<u64>> = (0..h.rows)
            .map(|i| h.row(i).iter().map(|e| e.v).collect())
            .collect();
        assert_eq!(span_points(r, &rows, 2).len(), 27);
        assert_eq!(span_points(r, &hrows, 2), span_points(r, &rows, 2));
    }

    #[test]
    fn transformer_reproduces_h() {
        let r = ZnRing::new(2, 3);
        let a = mat(r, &[vec![2, 6, 1], vec![4, 4, 0], vec![6, 2, 1]]);
        let (h, t) = howell_form(&a);
        assert_eq!(t.cols, a.rows);
        for i in 0..h.rows {
            for j in 0..a.cols {
                let mut acc = r.elem(0);
                for k in 0..a.rows {
                    acc = acc.add(&t.get(i, k).mul(a.get(k, j)));
                }
                assert_eq!(&acc, h.get(i, j));
            }
        }
    }

    #[test]
    fn kernel_examples() {
        let r9 = ZnRing::new(3, 2);
        // invertible matrix: trivial kernel
        let a = mat(r9, &[vec![1, 1], vec![0, 1]]);
        assert!(kernel(&a).is_empty());
        // (2) over Z/4: kernel generated by (2)
        let r4 = ZnRing::new(2, 2);
        let k = kernel(&mat(r4, &[vec![2]]));
        assert_eq!(k.len(), 1);
        assert_eq!(k[0][0].v, 2);
        // (p^{m-1}) over Z/p^m: kernel generated by (p)
        let r8 = ZnRing::new(2, 3);
        let k = kernel(&mat(r8, &[vec![4]]));
        let pts: Vec<u64> = {
            let gens: Vec<Vec<u64>> = k.iter().map(|g| g.iter().map(|e| e.v).collect()).collect();
            span_points(r8, &gens, 1)
                .into_iter()
                .map(|v| v[0])
                .collect()
        };
        assert_eq!(pts, vec![0, 2, 4, 6]);
    }

    #[test]
    fn solve_examples() {
        let r4 = ZnRing::new(2, 2);
        // (2)x = 1 has no solution
        assert!(solve_affine(&mat(r4, &[vec![2]]), &[r4.elem(1)]).is_none());
        // (2)x = 2 solved by 1 + {0,2}
        let sol = solve_affine(&mat(r4, &[vec![2]]), &[r4.elem(2)]).unwrap();
        let pts = sol.enumerate(16).unwrap();
        let mut vals: Vec<u64> = pts.iter().map(|p| p[0].v).collect();
        vals.sort();
        assert_eq!(vals, vec![1, 3]);
        // identity: unique solution
        let r9 = ZnRing::new(3, 2);
        let sol = solve_affine(
            &mat(r9, &[vec![1, 0], vec![0, 1]]),
            &[r9.elem(5), r9.elem(7)],
        )
        .unwrap();
        assert_eq!(
            sol.particular.iter().map(|e| e.v).collect::<Vec<_>>(),
            vec![5, 7]
        );
        assert!(sol.kernel.is_empty());
    }

    #[test]
    fn lift_example_p_times_x_eq_p() {
        // A = (p) over Z/p^2, b = p: solutions mod p^2 are {1 + kp}
        let r3 = ZnRing::new(3, 1);
        let r9 = ZnRing::new(3, 2);
        let prev = solve_affine(&mat(r3, &[vec![0]]), &[r3.elem(0)]).unwrap(); // all of Z/3
        let lifted = lift_solutions(&mat(r9, &[vec![3]]), &[r9.elem(3)], &prev, |e: &ZnElem| {
            r3.elem(e.v % 3)
        })
        .unwrap()
        .unwrap();
        let mut vals: Vec<u64> = lifted
            .enumerate(100)
            .unwrap()
            .iter()
            .map(|p| p[0].v)
            .collect();
        vals.sort();
        vals.dedup();
        assert_eq!(vals, vec![1, 4, 7]);
    }

    #[test]
    fn lift_trivial_cases() {
        let r3 = ZnRing::new(3, 1);
        let r9 = ZnRing::new(3, 2);
        // A = 0, b = 0: the full space mod p lifts to the full space mod p^2
        let prev = solve_affine(&mat(r3, &[vec![0, 0]]), &[r3.elem(0)]).unwrap();
        let lifted = lift_solutions(
            &mat(r9, &[vec![0, 0]]),
            &[r9.elem(0)],
            &prev,
            |e: &ZnElem| r3.elem(e.v % 3),
        )
        .unwrap()
        .unwrap();
        assert_eq!(lifted.enumerate(100).unwrap().len(), 81);
        // A = I: the unique solution lifts uniquely
        let prev = solve_affine(&mat(r3, &[vec![1]]), &[r3.elem(2)]).unwrap();
        let lifted = lift_solutions(&mat(r9, &[vec![1]]), &[r9.elem(5)], &prev, |e: &ZnElem| {
            r3.elem(e.v % 3)
        })
        .unwrap()
        .unwrap();
        let pts = lifted.enumerate(100).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0][0].v, 5);
    }

    /// Brute-force kernel for the oracle: all x with A x = 0.
    fn brute_kernel(r: ZnRing, a: &ChainMat<ZnElem>) -> Vec<Vec<u64>> {
        let mut x = vec![0u64; a.cols];
        let mut out = Vec::new();
        loop {
            let img: Vec<u64> = (0..a.rows)
                .map(|i| {
                    let mut acc = 0u64;
                    for j in 0..a.cols {
                        acc = r.add(acc, r.mul(a.get(i, j).v, x[j]));
                    }
                    acc
                })
                .collect();
            if img.iter().all(|&v| v == 0) {
                out.push(x.clone());
            }
            let mut k = 0;
            loop {
                if k == x.len() {
                    out.sort();
                    return out;
                }
                x[k] += 1;
                if x[k] < r.q {
                    break;
                }
                x[k] = 0;
                k += 1;
            }
        }
    }

    #[test]
    fn randomized_vs_enumeration() {
        // seeded corpus over Z/4, Z/8, Z/9, sizes up to 3x3
        let mut rng = ChaCha8Rng::seed_from_u64(20260810);
        let rings = [ZnRing::new(2, 2), ZnRing::new(2, 3), ZnRing::new(3, 2)];
        let mut count = 0;
        while count < 210 {
            let r = rings[count % rings.len()];
            let nr = rng.gen_range(1..=3);
            let nc = rng.gen_range(1..=3);
            let rows: Vec<Vec<u64>> = (0..nr)
                .map(|_| (0..nc).map(|_| rng.gen_range(0..r.q)).collect())
                .collect();
            let a = mat(r, &rows);
            // kernel agrees with enumeration
            let kg = kernel(&a);
            let kernel_pts: Vec<Vec<u64>> = if kg.is_empty() {
                vec![vec![0; nc]]
            } else {
                let gens: Vec<Vec<u64>> =
                    kg.iter().map(|g| g.iter().map(|e| e.v).collect()).collect();
                span_points(r, &gens, nc)
            };
            assert_eq!(
                kernel_pts,
                brute_kernel(r, &a),
                "kernel mismatch on {:?}",
                rows
            );
            // solve agrees with enumeration for a random rhs
            let b: Vec<u64> = (0..nr).map(|_| rng.gen_range(0..r.q)).collect();
            let belems: Vec<ZnElem> = b.iter().map(|&v| r.elem(v)).collect();
            let sol = solve_affine(&a, &belems);
            let brute: Vec<Vec<u64>> = {
                let mut x = vec![0u64; nc];
                let mut out = Vec::new();
                loop {
                    let img: Vec<u64> = (0..nr)
                        .map(|i| {
                            let mut acc = 0u64;
                            for j in 0..nc {
                                acc = r.add(acc, r.mul(a.get(i, j).v, x[j]));
                            }
                            acc
                        })
                        .collect();
                    if img == b {
                        out.push(x.clone());
                    }
                    let mut k = 0;
                    loop {
                        if k == x.len() {
                            out.sort();
                            break;
                        }
                        x[k] += 1;
                        if x[k] < r.q {
                            break;
                        }
                        x[k] = 0;
                        k += 1;
                    }
                    if x.iter().all(|&v| v == 0) {
                        break;
                    }
                }
                out
            };
            match sol {
                None => assert!(brute.is_empty(), "missed solutions on {:?} = {:?}", rows, b),
                Some(s) => {
                    let pts = s.enumerate(4096).unwrap();
                    let mut got: Vec<Vec<u64>> = pts
                        .iter()
                        .map(|p| p.iter().map(|e| e.v).collect())
                        .collect();
                    got.sort();
                    got.dedup();
                    assert_eq!(got, brute, "solution set mismatch on {:?} = {:?}", rows, b);
                }
            }
            count += 1;
        }
    }

    #[test]
    fn howell_uniqueness_under_row_mixing() {
        // row-equivalent matrices produce identical Howell forms
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let rings = [ZnRing::new(2, 2), ZnRing::new(3, 2), ZnRing::new(2, 3)];
        for trial in 0..60 {
            let r = rings[trial % rings.len()];
            let nr = rng.gen_range(1..=3);
            let nc = rng.gen_range(1..=3);
            let rows: Vec<Vec<u64>> = (0..nr)
                .map(|_| (0..nc).map(|_| rng.gen_range(0..r.q)).collect())
                .collect();
            let a = mat(r, &rows);
            // mixed: append random combinations of rows, then shuffle-ish
            let mut mixed = rows.clone();
            for _ in 0..rng.gen_range(1..=2) {
                let mut combo = vec![0u64; nc];
                for row in &rows {
                    let c = rng.gen_range(0..r.q);
                    for (x, y) in combo.iter_mut().zip(row) {
                        *x = r.add(*x, r.mul(c, *y));
                    }
                }
                mixed.push(combo);
            }
            let rot = rng.gen_range(0..mixed.len());
            mixed.rotate_left(rot);
            let b = mat(r, &mixed);
            // same span by construction; enumeration double-check when small
            if (r.q as u128).pow(nc as u32) <= 729 {
                let sa = span_points(r, &rows, nc);
                let sb = span_points(r, &mixed, nc);
                assert_eq!(sa, sb);
            }
            let (ha, _) = howell_form(&a);
            let (hb, _) = howell_form(&b);
            assert_eq!(ha, hb, "howell not canonical on {:?} vs {:?}", rows, mixed);
        }
    }
}
