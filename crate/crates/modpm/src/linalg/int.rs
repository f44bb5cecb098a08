//! Exact linear algebra over the integers: Smith and Hermite normal forms,
//! rank and solving over the rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Euclid, One, Signed, Zero};

use super::LinalgError;

/// Dense matrix with arbitrary-precision integer entries, row major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl std::fmt::Debug for IntMatrix {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(fm, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(fm, "  [{}]", row.join(", "))?;
        }
        write!(fm, "]")
    }
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        assert!(!rows.is_empty() && !rows[0].is_empty());
        let r = rows.len();
        let c = rows[0].len();
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        IntMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
                .collect(),
        )
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).sum())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += c * row[src]
    fn add_row_mul(&mut self, dst: usize, src: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self.get(dst, j) + c * self.get(src, j);
            self.set(dst, j, v);
        }
    }

    /// col[dst] += c * col[src]
    fn add_col_mul(&mut self, dst: usize, src: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = self.get(i, dst) + c * self.get(i, src);
            self.set(i, dst, v);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }
}

/// Result of a Smith decomposition `a = u * d * v` with `u`, `v` unimodular
/// and `d` diagonal with each diagonal entry dividing the next.
pub struct SmithForm {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    /// Diagonal entries of `d` (length min(rows, cols)).
    pub fn divisors(&self) -> Vec<BigInt> {
        let n = self.d.rows.min(self.d.cols);
        (0..n).map(|i| self.d.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.divisors().iter().filter(|x| !x.is_zero()).count()
    }
}

/// Smith normal form over the integers.
///
/// Returns `(u, d, v)` with `a = u d v`, `u` and `v` unimodular and the
/// diagonal of `d` a divisibility chain of nonnegative integers.
pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let mut b = a.clone();
    let mut u = IntMatrix::identity(a.rows);
    let mut v = IntMatrix::identity(a.cols);
    // Invariant throughout: a == u * b * v.
    // A row operation b <- E b is compensated by u <- u E^{-1}, and a column
    // operation b <- b E by v <- E^{-1} v.
    let n = a.rows.min(a.cols);
    for k in 0..n {
        loop {
            // find entry of minimal nonzero absolute value in the submatrix
            let mut pivot: Option<(usize, usize)> = None;
            for i in k..a.rows {
                for j in k..a.cols {
                    if !b.get(i, j).is_zero()
                        && pivot.is_none_or(|(pi, pj)| b.get(i, j).abs() < b.get(pi, pj).abs())
                    {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                break;
            };
            b.swap_rows(k, pi);
            u.swap_cols(k, pi);
            b.swap_cols(k, pj);
            v.swap_rows(k, pj);
            if b.get(k, k).is_negative() {
                b.negate_row(k);
                u.negate_col(k);
            }
            // clear column k below and row k to the right
            let mut dirty = false;
            for i in k + 1..a.rows {
                let q = -(b.get(i, k) / b.get(k, k));
                if !(b.get(i, k) % b.get(k, k)).is_zero() {
                    dirty = true;
                }
                b.add_row_mul(i, k, &q);
                u.add_col_mul(k, i, &-&q);
            }
            for j in k + 1..a.cols {
                let q = -(b.get(k, j) / b.get(k, k));
                if !(b.get(k, j) % b.get(k, k)).is_zero() {
                    dirty = true;
                }
                b.add_col_mul(j, k, &q);
                v.add_row_mul(k, j, &-&q);
            }
            if dirty {
                continue;
            }
            let cleared = (k + 1..a.rows).all(|i| b.get(i, k).is_zero())
                && (k + 1..a.cols).all(|j| b.get(k, j).is_zero());
            if !cleared {
                continue;
            }
            // enforce the divisibility chain: pivot must divide everything
            // in the remaining submatrix
            let mut offender = None;
            'scan: for i in k + 1..a.rows {
                for j in k + 1..a.cols {
                    if !(b.get(i, j) % b.get(k, k)).is_zero() {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            match offender {
                Some(i) => {
                    b.add_row_mul(k, i, &BigInt::one());
                    u.add_col_mul(i, k, &-BigInt::one());
                }
                None => break,
            }
        }
    }
    SmithForm { u, d: b, v }
}

/// Row-style Hermite normal form: echelon over the integers with positive
/// pivots and entries above each pivot reduced into `[0, pivot)`. Zero rows
/// are dropped. The result is the unique such basis of the row lattice.
pub fn hnf_rows(a: &IntMatrix) -> IntMatrix {
    let mut rows: Vec<Vec<BigInt>> = (0..a.rows).map(|i| a.row(i).to_vec()).collect();
    let cols = a.cols;
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row index in `rows`, column)
    let mut next = 0usize;
    for j in 0..cols {
        // gcd-reduce column j among rows >= next
        loop {
            let mut best: Option<usize> = None;
            for (i, row) in rows.iter().enumerate().skip(next) {
                if !row[j].is_zero() && best.is_none_or(|b| row[j].abs() < rows[b][j].abs()) {
                    best = Some(i);
                }
            }
            let Some(bi) = best else {
                break;
            };
            rows.swap(next, bi);
            if rows[next][j].is_negative() {
                for v in rows[next].iter_mut() {
                    *v = -&*v;
                }
            }
            let mut reduced = true;
            for i in next + 1..rows.len() {
                if rows[i][j].is_zero() {
                    continue;
                }
                let q = &rows[i][j] / &rows[next][j];
                for c in 0..cols {
                    let t = &rows[i][c] - &q * &rows[next][c];
                    rows[i][c] = t;
                }
                if !rows[i][j].is_zero() {
                    reduced = false;
                }
            }
            if reduced {
                break;
            }
        }
        if next < rows.len() && !rows[next][j].is_zero() {
            pivots.push((next, j));
            next += 1;
        }
    }
    rows.truncate(next);
    // reduce entries above pivots
    for &(pi, pj) in pivots.iter() {
        for i in 0..pi {
            let q = rows[i][pj].div_euclid(&rows[pi][pj]);
            if q.is_zero() {
                continue;
            }
            for c in 0..cols {
                let t = &rows[i][c] - &q * &rows[pi][c];
                rows[i][c] = t;
            }
        }
    }
    if rows.is_empty() {
        return IntMatrix::zero(1, cols);
    }
    IntMatrix::from_rows(rows)
}

/// Rank of the rational row span.
pub fn rank_q(a: &IntMatrix) -> usize {
    let mut rows: Vec<Vec<BigRational>> = (0..a.rows)
        .map(|i| {
            a.row(i)
                .iter()
                .map(|x| BigRational::from(x.clone()))
                .collect()
        })
        .collect();
    let mut rank = 0usize;
    for j in 0..a.cols {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][j].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = rows[rank][j].recip();
        for c in j..a.cols {
            let t = &rows[rank][c] * &inv;
            rows[rank][c] = t;
        }
        for i in 0..rows.len() {
            if i != rank && !rows[i][j].is_zero() {
                let f = rows[i][j].clone();
                for c in j..a.cols {
                    let t = &rows[i][c] - &f * &rows[rank][c];
                    rows[i][c] = t;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn det_bareiss(a: &IntMatrix) -> BigInt {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut m: Vec<Vec<BigInt>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(s) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, s);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = t;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Solve `a * x = b` over the rationals for several right-hand sides at once.
///
/// `a` is `r x c`; each right-hand side has length `r`. Returns one solution
/// per right-hand side, or `None` for inconsistent systems. When the solution
/// is not unique, free variables are set to zero (deterministically).
pub fn solve_q_multi(
    a: &IntMatrix,
    rhs: &[Vec<BigRational>],
) -> Result<Vec<Option<Vec<BigRational>>>, LinalgError> {
    for b in rhs {
        if b.len() != a.rows {
            return Err(LinalgError::DimensionMismatch);
        }
    }
    let nrhs = rhs.len();
    let width = a.cols + nrhs;
    let mut m: Vec<Vec<BigRational>> = (0..a.rows)
        .map(|i| {
            let mut row: Vec<BigRational> = a
                .row(i)
                .iter()
                .map(|x| BigRational::from(x.clone()))
                .collect();
            for b in rhs {
                row.push(b[i].clone());
            }
            row
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut rank = 0usize;
    for j in 0..a.cols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][j].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = m[rank][j].recip();
        for c in j..width {
            let t = &m[rank][c] * &inv;
            m[rank][c] = t;
        }
        for i in 0..m.len() {
            if i != rank && !m[i][j].is_zero() {
                let f = m[i][j].clone();
                for c in j..width {
                    let t = &m[i][c] - &f * &m[rank][c];
                    m[i][c] = t;
                }
            }
        }
        pivots.push((rank, j));
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    let mut out = Vec::with_capacity(nrhs);
    for k in 0..nrhs {
        let col = a.cols + k;
        // inconsistent iff some zero row has a nonzero rhs entry
        let bad = (rank..m.len()).any(|i| !m[i][col].is_zero());
        if bad {
            out.push(None);
            continue;
        }
        let mut x = vec![BigRational::zero(); a.cols];
        for &(pi, pj) in pivots.iter() {
            x[pj] = m[pi][col].clone();
        }
        out.push(Some(x));
    }
    Ok(out)
}

/// Basis of the saturation of the row lattice of `a` inside `Z^cols`:
/// all integer vectors in the rational row span. Returned in Hermite normal
/// form together with the elementary divisors of the input lattice inside
/// its saturation.
pub fn saturate_rows(a: &IntMatrix) -> (IntMatrix, Vec<BigInt>) {
    let sf = smith_normal_form(a);
    let rank = sf.rank();
    let mut gens: Vec<Vec<BigInt>> = Vec::with_capacity(rank);
    for i in 0..rank {
        gens.push(sf.v.row(i).to_vec());
    }
    let divisors = sf.divisors().into_iter().filter(|d| !d.is_zero()).collect();
    if gens.is_empty() {
        return (IntMatrix::zero(1, a.cols), divisors);
    }
    (hnf_rows(&IntMatrix::from_rows(gens)), divisors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_integer::Integer;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check_smith(a: &IntMatrix) {
        let sf = smith_normal_form(a);
        let recomposed = sf.u.mul(&sf.d).mul(&sf.v);
        assert_eq!(&recomposed, a, "u*d*v != a");
        assert_eq!(det_bareiss(&sf.u).abs(), BigInt::one(), "u not unimodular");
        assert_eq!(det_bareiss(&sf.v).abs(), BigInt::one(), "v not unimodular");
        let divs = sf.divisors();
        for w in divs.windows(2) {
            if !w[1].is_zero() || w[0].is_zero() {
                assert!(
                    w[0].is_zero() && w[1].is_zero() || (&w[1] % &w[0]).is_zero(),
                    "divisibility chain violated: {:?}",
                    divs
                );
            }
        }
        for i in 0..sf.d.rows {
            for j in 0..sf.d.cols {
                if i != j {
                    assert!(sf.d.get(i, j).is_zero());
                }
            }
        }
    }

    #[test]
    fn smith_identity() {
        let a = IntMatrix::identity(3);
        let sf = smith_normal_form(&a);
        assert_eq!(sf.d, IntMatrix::identity(3));
        check_smith(&a);
    }

    #[test]
    fn smith_diag_2_3() {
        // gcd chain: diag(2,3) has elementary divisors 1, 6
        let a = IntMatrix::from_i64_rows(&[vec![2, 0], vec![0, 3]]);
        let sf = smith_normal_form(&a);
        assert_eq!(sf.divisors(), vec![BigInt::from(1), BigInt::from(6)]);
        check_smith(&a);
    }

    #[test]
    fn smith_zero() {
        let a = IntMatrix::zero(2, 3);
        let sf = smith_normal_form(&a);
        assert!(sf.d.is_zero());
        check_smith(&a);
    }

    /// gcd of all k x k minors of a 3 x 3 matrix; d_1 * ... * d_k equals that
    /// gcd, which gives an independent oracle for the elementary divisors.
    fn minor_gcd(a: &IntMatrix, k: usize) -> BigInt {
        let n = a.rows;
        let idx: Vec<usize> = (0..n).collect();
        let mut g = BigInt::zero();
        for rs in combos(&idx, k) {
            for cs in combos(&idx, k) {
                let mut sub = IntMatrix::zero(k, k);
                for (ii, &i) in rs.iter().enumerate() {
                    for (jj, &j) in cs.iter().enumerate() {
                        sub.set(ii, jj, a.get(i, j).clone());
                    }
                }
                g = g.gcd(&det_bareiss(&sub));
            }
        }
        g
    }

    fn combos(idx: &[usize], k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for (i, &x) in idx.iter().enumerate() {
            for mut rest in combos(&idx[i + 1..], k - 1) {
                rest.insert(0, x);
                out.push(rest);
            }
        }
        out
    }

    #[test]
    fn smith_random_vs_minor_gcd() {
        let mut rng = ChaCha8Rng::seed_from_u64(991);
        for _ in 0..40 {
            let mut a = IntMatrix::zero(3, 3);
            for i in 0..3 {
                for j in 0..3 {
                    a.set(i, j, BigInt::from(rng.gen_range(-9i64..=9)));
                }
            }
            check_smith(&a);
            let sf = smith_normal_form(&a);
            let divs = sf.divisors();
            let mut prod = BigInt::one();
            for k in 1..=3usize {
                prod = &prod * &divs[k - 1];
                assert_eq!(
                    prod.abs(),
                    minor_gcd(&a, k).abs(),
                    "minor gcd mismatch at {k}"
                );
            }
        }
    }

    #[test]
    fn hnf_reduces_above() {
        let a = IntMatrix::from_i64_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]]);
        let h = hnf_rows(&a);
        // pivots positive, entries above pivots within range
        let mut pcols = Vec::new();
        for i in 0..h.rows {
            let j = (0..h.cols).find(|&j| !h.get(i, j).is_zero()).unwrap();
            assert!(h.get(i, j) > &BigInt::zero());
            pcols.push(j);
            for above in 0..i {
                assert!(h.get(above, j) >= &BigInt::zero() && h.get(above, j) < h.get(i, j));
            }
        }
        assert!(pcols.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn saturation_of_scaled_lattice() {
        // rows 3*e1, e2: saturation is e1, e2
        let a = IntMatrix::from_i64_rows(&[vec![3, 0], vec![0, 1]]);
        let (sat, divs) = saturate_rows(&a);
        assert_eq!(sat, IntMatrix::identity(2));
        assert_eq!(divs, vec![BigInt::from(1), BigInt::from(3)]);
    }

    #[test]
    fn solve_q_basic() {
        let a = IntMatrix::from_i64_rows(&[vec![2, 0], vec![0, 4], vec![2, 4]]);
        let b: Vec<BigRational> = [1i64, 2, 3]
            .iter()
            .map(|&v| BigRational::from(BigInt::from(v)))
            .collect();
        let sols = solve_q_multi(&a, &[b]).unwrap();
        let x = sols[0].as_ref().unwrap();
        assert_eq!(x[0], BigRational::new(BigInt::from(1), BigInt::from(2)));
        assert_eq!(x[1], BigRational::new(BigInt::from(1), BigInt::from(2)));
        // inconsistent
        let b2: Vec<BigRational> = [1i64, 2, 4]
            .iter()
            .map(|&v| BigRational::from(BigInt::from(v)))
            .collect();
        let sols2 = solve_q_multi(&a, &[b2]).unwrap();
        assert!(sols2[0].is_none());
    }

    #[test]
    fn rank_examples() {
        let a = IntMatrix::from_i64_rows(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(rank_q(&a), 1);
        let b = IntMatrix::from_i64_rows(&[vec![1, 2], vec![2, 5]]);
        assert_eq!(rank_q(&b), 2);
    }
}
