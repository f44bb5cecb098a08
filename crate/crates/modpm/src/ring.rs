//! Arithmetic in the coefficient rings `O_K / pi^((m-1)e+1)`.
//!
//! For a local field `K` over `Q_p` with ramification index `e`, reduction
//! modulo `p^m` happens at pi-adic precision `gamma = (m-1)e + 1`; this is
//! the exponent that makes `Z/p^m -> O_K/pi^gamma` an injection for every
//! `K`, so these quotients assemble into one coherent coefficient world for
//! everything computed modulo `p^m`.
//!
//! Supported fields: unramified extensions given by a monic polynomial
//! irreducible mod `p`, the cyclotomic fields `Q_p(zeta_{p^s})`, and their
//! composita. Internally a ring is a free `Z/p^m`-module with a polynomial
//! multiplication table; the quotient by `(pi^gamma)` is handled by reducing
//! coordinates against precomputed Howell forms of the ideals `(pi^t)`, so
//! equality is plain coordinate equality.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::linalg::chain::{self, ChainMat, ChainScalar};
use crate::linalg::zn::{ZnElem, ZnRing};

#[derive(Debug, Error)]
pub enum RingError {
    #[error("bad ring specification: {0}")]
    BadSpec(String),
    #[error("defining polynomial is not irreducible modulo {0}")]
    ReduciblePolynomial(u64),
    #[error("precision mismatch: expected m={expected}, got m={got}")]
    PrecisionMismatch { expected: u32, got: u32 },
    #[error("elements live in different rings with no declared common overring")]
    MixedRings,
    #[error("{0} is not a unit")]
    NotAUnit(String),
    #[error("no embedding of {0} into {1}")]
    UnsupportedEmbedding(String, String),
    #[error("ring too large to enumerate")]
    TooLarge,
}

/// Which local field over `Q_p`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum FieldKind {
    /// Unramified of degree `f`, defined by a monic polynomial (coefficients
    /// `c_0..c_f` with `c_f = 1`) irreducible modulo `p`.
    Unramified { f: u32, poly: Vec<i64> },
    /// `Q_p(zeta_{p^s})`, totally ramified of degree `p^(s-1)(p-1)`.
    Cyclotomic { s: u32 },
    /// Compositum of an unramified extension and `Q_p(zeta_{p^s})`.
    Compositum { f: u32, poly: Vec<i64>, s: u32 },
}

/// A described local field `K / Q_p`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LocalFieldSpec {
    pub p: u64,
    pub kind: FieldKind,
}

fn u64_is_prime(n: u64) -> bool {
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

impl LocalFieldSpec {
    pub fn qp(p: u64) -> Result<Self, RingError> {
        Self::unramified(p, 1, None)
    }

    pub fn unramified(p: u64, f: u32, poly: Option<Vec<i64>>) -> Result<Self, RingError> {
        if !u64_is_prime(p) || f < 1 {
            return Err(RingError::BadSpec(format!("need a prime p (got {p}) and f >= 1")));
        }
        let poly = match poly {
            Some(pl) => pl,
            None => default_unramified_poly(p, f),
        };
        validate_poly(p, f, &poly)?;
        Ok(LocalFieldSpec {
            p,
            kind: FieldKind::Unramified { f, poly },
        })
    }

    pub fn cyclotomic(p: u64, s: u32) -> Result<Self, RingError> {
        if !u64_is_prime(p) || s < 1 {
            return Err(RingError::BadSpec(format!("need a prime p (got {p}) and s >= 1")));
        }
        Ok(LocalFieldSpec {
            p,
            kind: FieldKind::Cyclotomic { s },
        })
    }

    pub fn compositum(p: u64, f: u32, poly: Option<Vec<i64>>, s: u32) -> Result<Self, RingError> {
        if !u64_is_prime(p) || f < 1 || s < 1 {
            return Err(RingError::BadSpec(format!(
                "need a prime p (got {p}), f >= 1 and s >= 1"
            )));
        }
        let poly = match poly {
            Some(pl) => pl,
            None => default_unramified_poly(p, f),
        };
        validate_poly(p, f, &poly)?;
        Ok(LocalFieldSpec {
            p,
            kind: FieldKind::Compositum { f, poly, s },
        })
    }

    /// Ramification index of `K / Q_p`.
    pub fn e(&self) -> u64 {
        match &self.kind {
            FieldKind::Unramified { .. } => 1,
            FieldKind::Cyclotomic { s } | FieldKind::Compositum { s, .. } => {
                self.p.pow(s - 1) * (self.p - 1)
            }
        }
    }

    /// Residue degree of `K / Q_p`.
    pub fn f_res(&self) -> u32 {
        match &self.kind {
            FieldKind::Unramified { f, .. } | FieldKind::Compositum { f, .. } => *f,
            FieldKind::Cyclotomic { .. } => 1,
        }
    }

    fn unram_parts(&self) -> (u32, Vec<i64>) {
        match &self.kind {
            FieldKind::Unramified { f, poly } | FieldKind::Compositum { f, poly, .. } => {
                (*f, poly.clone())
            }
            FieldKind::Cyclotomic { .. } => (1, vec![0, 1]),
        }
    }

    fn cyclo_s(&self) -> u32 {
        match &self.kind {
            FieldKind::Unramified { .. } => 0,
            FieldKind::Cyclotomic { s } | FieldKind::Compositum { s, .. } => *s,
        }
    }
}

impl fmt::Display for LocalFieldSpec {
    fn fmt(&self, w: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FieldKind::Unramified { f: 1, .. } => write!(w, "p={} qp", self.p),
            FieldKind::Unramified { f, poly } => {
                write!(w, "p={} unramified f={} poly={}", self.p, f, poly_str(poly))
            }
            FieldKind::Cyclotomic { s } => write!(w, "p={} cyclotomic s={}", self.p, s),
            FieldKind::Compositum { f, poly, s } => {
                write!(
                    w,
                    "p={} compositum f={} s={} poly={}",
                    self.p,
                    f,
                    s,
                    poly_str(poly)
                )
            }
        }
    }
}

fn poly_str(poly: &[i64]) -> String {
    poly.iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// The pi-adic precision `(m-1) e + 1` at which reduction modulo `p^m`
/// takes place in a field of ramification index `e`.
pub fn gamma(m: u32, e: u64) -> u64 {
    assert!(m >= 1 && e >= 1, "gamma needs m >= 1 and e >= 1");
    (m as u64 - 1) * e + 1
}

// ---------------------------------------------------------------------------
// polynomial helpers modulo p (for irreducibility testing)

fn poly_mod_p(poly: &[i64], p: u64) -> Vec<u64> {
    poly.iter()
        .map(|&c| c.rem_euclid(p as i64) as u64)
        .collect()
}

fn pm_trim(v: &mut Vec<u64>) {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
}

fn pm_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    pm_trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = inv_mod_u64(b[db], p);
    while r.len() - 1 >= db && !(r.len() == 1 && r[0] == 0) {
        let dr = r.len() - 1;
        let c = (r[dr] as u128 * lead_inv as u128 % p as u128) as u64;
        for i in 0..=db {
            let idx = dr - db + i;
            let sub = (c as u128 * b[i] as u128 % p as u128) as u64;
            r[idx] = (r[idx] + p - sub) % p;
        }
        pm_trim(&mut r);
        if r.len() - 1 < db {
            break;
        }
    }
    r
}

fn pm_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = ((out[i + j] as u128 + x as u128 * y as u128) % p as u128) as u64;
        }
    }
    pm_trim(&mut out);
    out
}

fn pm_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    pm_trim(&mut a);
    pm_trim(&mut b);
    while !(b.len() == 1 && b[0] == 0) {
        let r = pm_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn inv_mod_u64(a: u64, p: u64) -> u64 {
    let mut t = (0i128, 1i128);
    let mut r = (p as i128, (a % p) as i128);
    while r.1 != 0 {
        let q = r.0 / r.1;
        t = (t.1, t.0 - q * t.1);
        r = (r.1, r.0 - q * r.1);
    }
    assert!(r.0 == 1, "not invertible");
    t.0.rem_euclid(p as i128) as u64
}

/// `x^(p^k) mod f` over `F_p`.
fn frobenius_power(f: &[u64], p: u64, k: u32) -> Vec<u64> {
    let mut x = vec![0u64, 1];
    x = pm_rem(&x, f, p);
    let mut acc = x;
    // raise to p^k by k rounds of p-th powering
    for _ in 0..k {
        let mut powed = vec![1u64];
        let mut base = acc.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                powed = pm_rem(&pm_mul(&powed, &base, p), f, p);
            }
            base = pm_rem(&pm_mul(&base, &base, p), f, p);
            e >>= 1;
        }
        acc = powed;
    }
    acc
}

fn is_irreducible_mod_p(poly: &[i64], p: u64) -> bool {
    let f = poly_mod_p(poly, p);
    let deg = f.len() - 1;
    if deg == 0 || *f.last().unwrap() == 0 {
        return false;
    }
    if deg == 1 {
        return true;
    }
    // x^(p^deg) == x mod f, and gcd(x^(p^(deg/r)) - x, f) = 1 for primes r | deg
    let xp = frobenius_power(&f, p, deg as u32);
    let mut diff = xp.clone();
    while diff.len() < 2 {
        diff.push(0);
    }
    diff[1] = (diff[1] + p - 1) % p;
    pm_trim(&mut diff);
    if !(diff.len() == 1 && diff[0] == 0) {
        return false;
    }
    let mut d = deg;
    let mut primes = Vec::new();
    let mut q = 2;
    while q * q <= d {
        if d % q == 0 {
            primes.push(q);
            while d % q == 0 {
                d /= q;
            }
        }
        q += 1;
    }
    if d > 1 {
        primes.push(d);
    }
    for r in primes {
        let mut g = frobenius_power(&f, p, (deg / r) as u32);
        while g.len() < 2 {
            g.push(0);
        }
        g[1] = (g[1] + p - 1) % p;
        pm_trim(&mut g);
        let gc = pm_gcd(&f, &g, p);
        if gc.len() > 1 {
            return false;
        }
    }
    true
}

fn validate_poly(p: u64, f: u32, poly: &[i64]) -> Result<(), RingError> {
    if poly.len() != f as usize + 1 {
        return Err(RingError::BadSpec(format!(
            "defining polynomial must have degree {f} (got {} coefficients)",
            poly.len()
        )));
    }
    if *poly.last().unwrap() != 1 {
        return Err(RingError::BadSpec(
            "defining polynomial must be monic".into(),
        ));
    }
    if !is_irreducible_mod_p(poly, p) {
        return Err(RingError::ReduciblePolynomial(p));
    }
    Ok(())
}

/// Smallest monic polynomial of degree `f` irreducible modulo `p`, with the
/// coefficient vector `(c_0, .., c_{f-1})` minimal in base-`p` counting
/// order. This fixes the defining polynomials the crate ships.
pub fn default_unramified_poly(p: u64, f: u32) -> Vec<i64> {
    let n = f as usize;
    let total = (p as u128).pow(f);
    for t in 0..total {
        let mut c = Vec::with_capacity(n + 1);
        let mut tt = t;
        for _ in 0..n {
            c.push((tt % p as u128) as i64);
            tt /= p as u128;
        }
        c.push(1);
        if is_irreducible_mod_p(&c, p) {
            return c;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over F_p")
}

// ---------------------------------------------------------------------------
// ModRing

struct ModRingInner {
    spec: LocalFieldSpec,
    m: u32,
    zn: ZnRing,
    gamma: u64,
    f_deg: usize,
    e_deg: usize,
    rank: usize,
    /// reductions of x^(f..2f-2) as x-polynomials of degree < f
    x_red: Vec<Vec<u64>>,
    /// reductions of y^(e..2e-2) as y-polynomials of degree < e
    y_red: Vec<Vec<u64>>,
    /// canonical coordinates of pi^t for t = 0..=gamma
    pi_pows: Vec<Vec<u64>>,
    /// Howell forms of the modules pi^t * M for t = 0..=gamma
    ideal_forms: Vec<HowellU64>,
    card_log_p: u64,
}

/// Howell form over Z/p^m with pivot data, for fast canonical reduction.
struct HowellU64 {
    rows: Vec<Vec<u64>>,
    /// (row, col, p^v) per pivot
    pivots: Vec<(usize, usize, u64)>,
}

impl HowellU64 {
    fn reduce(&self, zn: &ZnRing, v: &mut [u64]) {
        for &(i, j, pv) in &self.pivots {
            let q = v[j] / pv;
            if q == 0 {
                continue;
            }
            for (x, y) in v.iter_mut().zip(&self.rows[i]) {
                *x = zn.sub(*x, zn.mul(q, *y));
            }
        }
    }

    fn is_member(&self, zn: &ZnRing, v: &[u64]) -> bool {
        let mut w = v.to_vec();
        self.reduce(zn, &mut w);
        w.iter().all(|&x| x == 0)
    }
}

fn howell_u64(zn: ZnRing, rows: Vec<Vec<u64>>) -> HowellU64 {
    if rows.is_empty() || rows.iter().all(|r| r.iter().all(|&x| x == 0)) {
        return HowellU64 {
            rows: Vec::new(),
            pivots: Vec::new(),
        };
    }
    let mat: ChainMat<ZnElem> = ChainMat::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|&v| zn.elem(v)).collect())
            .collect(),
    );
    let (h, _) = chain::howell_form(&mat);
    let mut out_rows = Vec::new();
    let mut pivots = Vec::new();
    for i in 0..h.rows {
        let row: Vec<u64> = h.row(i).iter().map(|e| e.v).collect();
        if let Some(j) = row.iter().position(|&x| x != 0) {
            pivots.push((i, j, row[j]));
        }
        out_rows.push(row);
    }
    HowellU64 {
        rows: out_rows,
        pivots,
    }
}

/// A coefficient ring `O_K / pi^((m-1)e+1)`, shared cheaply.
#[derive(Clone)]
pub struct ModRing(Arc<ModRingInner>);

impl PartialEq for ModRing {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.spec == other.0.spec && self.0.m == other.0.m)
    }
}
impl Eq for ModRing {}

impl fmt::Debug for ModRing {
    fn fmt(&self, w: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(w, "ModRing({} m={})", self.0.spec, self.0.m)
    }
}

impl fmt::Display for ModRing {
    fn fmt(&self, w: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            w,
            "ring {} m={} gamma={}",
            self.0.spec, self.0.m, self.0.gamma
        )
    }
}

impl ModRing {
    pub fn new(spec: LocalFieldSpec, m: u32) -> Result<Self, RingError> {
        if m < 1 {
            return Err(RingError::BadSpec("need m >= 1".into()));
        }
        let p = spec.p;
        let zn = ZnRing::new(p, m);
        let (f, poly) = spec.unram_parts();
        let s = spec.cyclo_s();
        let f_deg = f as usize;
        let e_deg = spec.e() as usize;
        let rank = f_deg * e_deg;
        let gamma = gamma(m, spec.e());

        // x^f = -(c_0 + c_1 x + ... + c_{f-1} x^{f-1})
        let mut x_red: Vec<Vec<u64>> = Vec::new();
        if f_deg > 1 {
            let base: Vec<u64> = (0..f_deg).map(|i| zn.neg(zn.reduce_i64(poly[i]))).collect();
            x_red.push(base);
            for _ in 1..f_deg - 1 {
                let prev = x_red.last().unwrap().clone();
                let mut next = vec![0u64; f_deg];
                for i in 0..f_deg - 1 {
                    next[i + 1] = prev[i];
                }
                let top = prev[f_deg - 1];
                if top != 0 {
                    for i in 0..f_deg {
                        next[i] = zn.add(next[i], zn.mul(top, x_red[0][i]));
                    }
                }
                x_red.push(next);
            }
        }

        // Phi_{p^s}(y) = sum_{i<p} y^(i p^(s-1)); y^e = -sum_{i<p-1} y^(i p^(s-1))
        let mut y_red: Vec<Vec<u64>> = Vec::new();
        if e_deg > 1 {
            let step = p.pow(s - 1) as usize;
            let mut base = vec![0u64; e_deg];
            for i in 0..(p - 1) as usize {
                base[i * step] = zn.neg(1 % zn.q);
            }
            y_red.push(base);
            for _ in 1..e_deg - 1 {
                let prev = y_red.last().unwrap().clone();
                let mut next = vec![0u64; e_deg];
                for i in 0..e_deg - 1 {
                    next[i + 1] = prev[i];
                }
                let top = prev[e_deg - 1];
                if top != 0 {
                    for i in 0..e_deg {
                        next[i] = zn.add(next[i], zn.mul(top, y_red[0][i]));
                    }
                }
                y_red.push(next);
            }
        }

        let mut inner = ModRingInner {
            spec: spec.clone(),
            m,
            zn,
            gamma,
            f_deg,
            e_deg,
            rank,
            x_red,
            y_red,
            pi_pows: Vec::new(),
            ideal_forms: Vec::new(),
            card_log_p: gamma * f as u64,
        };

        // pi = 1 - zeta for ramified rings, p otherwise
        let pi: Vec<u64> = if e_deg > 1 {
            let mut v = vec![0u64; rank];
            v[0] = 1 % zn.q;
            let zeta_idx = f_deg; // x^0 y^1
            v[zeta_idx] = zn.sub(v[zeta_idx], 1 % zn.q);
            v
        } else {
            let mut v = vec![0u64; rank];
            v[0] = p % zn.q;
            v
        };

        // powers of pi in the plain module (no ideal reduction yet)
        let mut raw_pows: Vec<Vec<u64>> = Vec::with_capacity(gamma as usize + 1);
        let mut one = vec![0u64; rank];
        one[0] = 1 % zn.q;
        raw_pows.push(one);
        for t in 1..=gamma {
            let prev = &raw_pows[(t - 1) as usize];
            raw_pows.push(inner.mul_raw(prev, &pi));
        }

        // Howell forms of pi^t * M for t = 0..=gamma
        let mut ideal_forms = Vec::with_capacity(gamma as usize + 1);
        for t in 0..=gamma {
            let gens: Vec<Vec<u64>> = (0..rank)
                .map(|j| {
                    let mut e_j = vec![0u64; rank];
                    e_j[j] = 1 % zn.q;
                    inner.mul_raw(&raw_pows[t as usize], &e_j)
                })
                .collect();
            ideal_forms.push(howell_u64(zn, gens));
        }
        inner.ideal_forms = ideal_forms;

        // canonical pi powers
        let mut pi_pows = Vec::with_capacity(gamma as usize + 1);
        for t in 0..=gamma {
            let mut v = raw_pows[t as usize].clone();
            inner.canon_inplace(&mut v);
            pi_pows.push(v);
        }
        inner.pi_pows = pi_pows;

        Ok(ModRing(Arc::new(inner)))
    }

    pub fn zp(p: u64, m: u32) -> Result<Self, RingError> {
        ModRing::new(LocalFieldSpec::qp(p)?, m)
    }

    pub fn spec(&self) -> &LocalFieldSpec {
        &self.0.spec
    }

    pub fn p(&self) -> u64 {
        self.0.spec.p
    }

    pub fn m(&self) -> u32 {
        self.0.m
    }

    pub fn gamma_exp(&self) -> u64 {
        self.0.gamma
    }

    pub fn rank(&self) -> usize {
        self.0.rank
    }

    /// log_p of the ring cardinality (= f_res * gamma).
    pub fn card_log_p(&self) -> u64 {
        self.0.card_log_p
    }

    pub fn pm(&self) -> u64 {
        self.0.zn.q
    }

    pub fn zero(&self) -> RingElement {
        RingElement {
            ring: self.clone(),
            coords: vec![0; self.0.rank],
        }
    }

    pub fn one(&self) -> RingElement {
        let mut v = vec![0; self.0.rank];
        v[0] = 1 % self.0.zn.q;
        self.elem_from_coords(v)
    }

    /// The uniformizer: `1 - zeta` for ramified rings, `p` otherwise.
    pub fn pi(&self) -> RingElement {
        self.pi_pow(1)
    }

    pub fn pi_pow(&self, t: u64) -> RingElement {
        let t = t.min(self.0.gamma);
        RingElement {
            ring: self.clone(),
            coords: self.0.pi_pows[t as usize].clone(),
        }
    }

    /// The class of zeta_{p^s} (ramified rings only).
    pub fn zeta(&self) -> Option<RingElement> {
        if self.0.e_deg == 1 {
            return None;
        }
        let mut v = vec![0; self.0.rank];
        v[self.0.f_deg] = 1 % self.0.zn.q;
        Some(self.elem_from_coords(v))
    }

    /// The class of the unramified generator (residue degree > 1 only).
    pub fn unram_gen(&self) -> Option<RingElement> {
        if self.0.f_deg == 1 {
            return None;
        }
        let mut v = vec![0; self.0.rank];
        v[1] = 1 % self.0.zn.q;
        Some(self.elem_from_coords(v))
    }

    pub fn elem_from_coords(&self, mut coords: Vec<u64>) -> RingElement {
        assert_eq!(coords.len(), self.0.rank);
        for c in coords.iter_mut() {
            *c %= self.0.zn.q;
        }
        self.0.canon_inplace(&mut coords);
        RingElement {
            ring: self.clone(),
            coords,
        }
    }

    /// Ring homomorphism `Z/p^m -> R`, injective.
    pub fn embed_base(&self, x: u64) -> RingElement {
        let mut v = vec![0; self.0.rank];
        v[0] = x % self.0.zn.q;
        self.elem_from_coords(v)
    }

    pub fn embed_base_i64(&self, x: i64) -> RingElement {
        self.embed_base(x.rem_euclid(self.0.zn.q as i64) as u64)
    }

    /// Decide whether `a` lies in the image of `embed_base`, returning the
    /// unique preimage modulo `p^m` when it does. Exact (linear solve, no
    /// enumeration).
    pub fn in_base_subring(&self, a: &RingElement) -> Option<u64> {
        assert!(a.ring == *self, "element of a different ring");
        let zn = self.0.zn;
        let jrows = &self.0.ideal_forms[self.0.gamma as usize].rows;
        // columns: the vector e_0 (image of 1), then the ideal generators
        let ncols = 1 + jrows.len();
        let mut rows: Vec<Vec<ZnElem>> = Vec::with_capacity(self.0.rank);
        for i in 0..self.0.rank {
            let mut row = Vec::with_capacity(ncols);
            row.push(zn.elem(if i == 0 { 1 } else { 0 }));
            for jr in jrows {
                row.push(zn.elem(jr[i]));
            }
            rows.push(row);
        }
        let b: Vec<ZnElem> = a.coords.iter().map(|&v| zn.elem(v)).collect();
        let sol = chain::solve_affine(&ChainMat::from_rows(rows), &b)?;
        Some(sol.particular[0].v)
    }

    /// Teichmueller lift: the unique element with `w^(p-1) = 1` and
    /// `w = a mod pi`.
    pub fn teichmuller(&self, a: u64) -> Result<RingElement, RingError> {
        let p = self.p();
        if a % p == 0 {
            return Err(RingError::NotAUnit(format!("{a} mod {p}")));
        }
        let mut x = self.embed_base(a);
        for _ in 0..=self.0.gamma + 2 {
            let next = x.pow(p);
            if next == x {
                break;
            }
            x = next;
        }
        debug_assert_eq!(x.pow(p), x, "teichmuller iteration did not converge");
        Ok(x)
    }

    /// Multiplicative Teichmueller representative of a residue-field element
    /// given as any unit of the ring (used for value materialization).
    pub fn teichmuller_of(&self, a: &RingElement) -> Result<RingElement, RingError> {
        if a.val() > 0 {
            return Err(RingError::NotAUnit(a.to_string()));
        }
        let mut x = a.clone();
        let steps = self.0.gamma + 2;
        for _ in 0..=steps {
            let next = x.pow(self.p());
            if next == x {
                break;
            }
            x = next;
        }
        Ok(x)
    }

    /// All elements, canonical and sorted, when the ring is small.
    pub fn enumerate(&self) -> Result<Vec<RingElement>, RingError> {
        let q = self.0.zn.q as u128;
        let total = q
            .checked_pow(self.0.rank as u32)
            .ok_or(RingError::TooLarge)?;
        if total > 1 << 20 {
            return Err(RingError::TooLarge);
        }
        let mut seen: Vec<Vec<u64>> = Vec::new();
        let mut v = vec![0u64; self.0.rank];
        loop {
            let mut c = v.clone();
            self.0.canon_inplace(&mut c);
            seen.push(c);
            let mut k = 0;
            loop {
                if k == v.len() {
                    seen.sort();
                    seen.dedup();
                    return Ok(seen
                        .into_iter()
                        .map(|coords| RingElement {
                            ring: self.clone(),
                            coords,
                        })
                        .collect());
                }
                v[k] += 1;
                if v[k] < self.0.zn.q {
                    break;
                }
                v[k] = 0;
                k += 1;
            }
        }
    }

    /// Embedding into a larger ring of the same `p` and `m`, when one of the
    /// supported tower maps applies.
    pub fn embed_into(&self, a: &RingElement, target: &ModRing) -> Result<RingElement, RingError> {
        assert!(a.ring == *self);
        if *self == *target {
            return Ok(a.clone());
        }
        if self.p() != target.p() {
            return Err(RingError::UnsupportedEmbedding(
                self.to_string(),
                target.to_string(),
            ));
        }
        if self.m() != target.m() {
            return Err(RingError::PrecisionMismatch {
                expected: target.m(),
                got: self.m(),
            });
        }
        let (sf, spoly) = self.0.spec.unram_parts();
        let (tf, tpoly) = target.0.spec.unram_parts();
        let ss = self.0.spec.cyclo_s();
        let ts = target.0.spec.cyclo_s();
        let unram_ok = sf == 1 || (sf == tf && spoly == tpoly);
        if !unram_ok || ss > ts {
            return Err(RingError::UnsupportedEmbedding(
                self.to_string(),
                target.to_string(),
            ));
        }
        // zeta_{p^ss} = zeta_{p^ts}^(p^(ts-ss))
        let x_img = if sf == 1 {
            target.one()
        } else {
            target.unram_gen().expect("residue degree matches")
        };
        let y_img = if ss == 0 {
            target.one()
        } else {
            let z = target.zeta().ok_or_else(|| {
                RingError::UnsupportedEmbedding(self.to_string(), target.to_string())
            })?;
            z.pow(self.p().pow(ts - ss))
        };
        let mut acc = target.zero();
        for j in 0..self.0.e_deg {
            for i in 0..self.0.f_deg {
                let c = a.coords[i + self.0.f_deg * j];
                if c == 0 {
                    continue;
                }
                let term = x_img.pow(i as u64).mul(&y_img.pow(j as u64));
                acc = acc.add(&term.scale(c));
            }
        }
        Ok(acc)
    }
}

impl ModRingInner {
    /// Multiply two coordinate vectors in the plain module (polynomial
    /// relations only, no ideal reduction).
    fn mul_raw(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let zn = &self.zn;
        let f = self.f_deg;
        let e = self.e_deg;
        let wx = 2 * f - 1;
        let wy = 2 * e - 1;
        let mut acc = vec![0u64; wx * wy];
        for ja in 0..e {
            for ia in 0..f {
                let ca = a[ia + f * ja];
                if ca == 0 {
                    continue;
                }
                for jb in 0..e {
                    for ib in 0..f {
                        let cb = b[ib + f * jb];
                        if cb == 0 {
                            continue;
                        }
                        let idx = (ia + ib) + wx * (ja + jb);
                        acc[idx] = zn.add(acc[idx], zn.mul(ca, cb));
                    }
                }
            }
        }
        // reduce x-degrees
        for d in (f..wx).rev() {
            for j in 0..wy {
                let c = acc[d + wx * j];
                if c == 0 {
                    continue;
                }
                acc[d + wx * j] = 0;
                for i in 0..f {
                    let t = zn.mul(c, self.x_red[d - f][i]);
                    acc[i + wx * j] = zn.add(acc[i + wx * j], t);
                }
            }
        }
        // reduce y-degrees
        for d in (e..wy).rev() {
            for i in 0..f {
                let c = acc[i + wx * d];
                if c == 0 {
                    continue;
                }
                acc[i + wx * d] = 0;
                for j in 0..e {
                    let t = zn.mul(c, self.y_red[d - e][j]);
                    acc[i + wx * j] = zn.add(acc[i + wx * j], t);
                }
            }
        }
        let mut out = vec![0u64; f * e];
        for j in 0..e {
            for i in 0..f {
                out[i + f * j] = acc[i + wx * j];
            }
        }
        out
    }

    /// Reduce coordinates to the canonical representative modulo the ideal
    /// `(pi^gamma)`.
    fn canon_inplace(&self, v: &mut [u64]) {
        self.ideal_forms[self.gamma as usize].reduce(&self.zn, v);
    }
}

/// An element of a [`ModRing`], stored as the canonical coordinate vector,
/// so equality is coordinate equality. Immutable; cheap to clone and safe
/// to share across threads.
#[derive(Clone, PartialEq, Eq)]
pub struct RingElement {
    ring: ModRing,
    coords: Vec<u64>,
}

impl RingElement {
    pub fn ring(&self) -> &ModRing {
        &self.ring
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn add(&self, o: &RingElement) -> RingElement {
        assert!(self.ring == o.ring, "mixed rings");
        let zn = &self.ring.0.zn;
        let coords = self
            .coords
            .iter()
            .zip(&o.coords)
            .map(|(&a, &b)| zn.add(a, b))
            .collect();
        self.ring.elem_from_coords(coords)
    }

    pub fn sub(&self, o: &RingElement) -> RingElement {
        assert!(self.ring == o.ring, "mixed rings");
        let zn = &self.ring.0.zn;
        let coords = self
            .coords
            .iter()
            .zip(&o.coords)
            .map(|(&a, &b)| zn.sub(a, b))
            .collect();
        self.ring.elem_from_coords(coords)
    }

    pub fn neg(&self) -> RingElement {
        let zn = &self.ring.0.zn;
        let coords = self.coords.iter().map(|&a| zn.neg(a)).collect();
        self.ring.elem_from_coords(coords)
    }

    pub fn mul(&self, o: &RingElement) -> RingElement {
        assert!(self.ring == o.ring, "mixed rings");
        let coords = self.ring.0.mul_raw(&self.coords, &o.coords);
        self.ring.elem_from_coords(coords)
    }

    pub fn scale(&self, c: u64) -> RingElement {
        let zn = &self.ring.0.zn;
        let coords = self.coords.iter().map(|&a| zn.mul(a, c % zn.q)).collect();
        self.ring.elem_from_coords(coords)
    }

    pub fn pow(&self, mut e: u64) -> RingElement {
        let mut base = self.clone();
        let mut acc = self.ring.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    /// pi-adic valuation, capped at gamma.
    pub fn valuation(&self) -> u64 {
        let inner = &self.ring.0;
        if self.is_zero() {
            return inner.gamma;
        }
        for t in 1..=inner.gamma {
            if !inner.ideal_forms[t as usize].is_member(&inner.zn, &self.coords) {
                return t - 1;
            }
        }
        inner.gamma
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == 0
    }

    /// Inverse of a unit.
    pub fn inverse(&self) -> Result<RingElement, RingError> {
        if !self.is_unit() {
            return Err(RingError::NotAUnit(self.to_string()));
        }
        let one = self.ring.one();
        Ok(self.solve_divide(&one).expect("unit divides 1"))
    }

    /// Some `q` with `q * self = target`; `None` when `self` does not divide
    /// `target`. Deterministic.
    pub fn solve_divide(&self, target: &RingElement) -> Option<RingElement> {
        assert!(self.ring == target.ring, "mixed rings");
        let inner = &self.ring.0;
        let zn = inner.zn;
        let jrows = &inner.ideal_forms[inner.gamma as usize].rows;
        let n = inner.rank;
        // mult-by-self matrix columns, then ideal generator columns
        let mut cols: Vec<Vec<u64>> = Vec::with_capacity(n + jrows.len());
        for j in 0..n {
            let mut e_j = vec![0u64; n];
            e_j[j] = 1 % zn.q;
            cols.push(inner.mul_raw(&self.coords, &e_j));
        }
        for jr in jrows {
            cols.push(jr.clone());
        }
        let rows: Vec<Vec<ZnElem>> = (0..n)
            .map(|i| cols.iter().map(|c| zn.elem(c[i])).collect())
            .collect();
        let b: Vec<ZnElem> = target.coords.iter().map(|&v| zn.elem(v)).collect();
        let sol = chain::solve_affine(&ChainMat::from_rows(rows), &b)?;
        let coords: Vec<u64> = sol.particular[..n].iter().map(|e| e.v).collect();
        Some(self.ring.elem_from_coords(coords))
    }
}

impl ChainScalar for RingElement {
    fn is_zero(&self) -> bool {
        RingElement::is_zero(self)
    }

    fn gamma(&self) -> u32 {
        self.ring.0.gamma as u32
    }

    fn val(&self) -> u32 {
        self.valuation() as u32
    }

    fn zero_like(&self) -> Self {
        self.ring.zero()
    }

    fn one_like(&self) -> Self {
        self.ring.one()
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

    fn pi_pow_like(&self, v: u32) -> Self {
        self.ring.pi_pow(v as u64)
    }

    fn unit_inv(&self) -> Self {
        self.inverse().expect("unit_inv on a non-unit")
    }

    fn div_exact(&self, b: &Self) -> Self {
        b.solve_divide(self).expect("inexact division")
    }

    fn canon_mod_pi(&self, v: u32) -> Self {
        let inner = &self.ring.0;
        let v = (v as u64).min(inner.gamma);
        let mut c = self.coords.clone();
        inner.ideal_forms[v as usize].reduce(&inner.zn, &mut c);
        inner.canon_inplace(&mut c);
        RingElement {
            ring: self.ring.clone(),
            coords: c,
        }
    }

    fn sort_key(&self) -> Vec<u64> {
        self.coords.clone()
    }

    fn all_elements(&self) -> Option<Vec<Self>> {
        self.ring.enumerate().ok()
    }
}

impl fmt::Debug for RingElement {
    fn fmt(&self, w: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(w, "{} in {}", self, self.ring)
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, w: &mut fmt::Formatter<'_>) -> fmt::Result {
        let f = self.ring.0.f_deg;
        let e = self.ring.0.e_deg;
        let mut terms = Vec::new();
        for j in 0..e {
            for i in 0..f {
                let c = self.coords[i + f * j];
                if c == 0 {
                    continue;
                }
                let mut t = c.to_string();
                if i > 0 {
                    t.push_str(&format!(
                        "*u{}",
                        if i > 1 {
                            format!("^{i}")
                        } else {
                            String::new()
                        }
                    ));
                }
                if j > 0 {
                    t.push_str(&format!(
                        "*z{}",
                        if j > 1 {
                            format!("^{j}")
                        } else {
                            String::new()
                        }
                    ));
                }
                terms.push(t);
            }
        }
        if terms.is_empty() {
            write!(w, "0")
        } else {
            write!(w, "{}", terms.join(" + "))
        }
    }
}

/// Equality modulo `p^m`: `a - b = 0` in the parent ring. Elements of
/// different rings are compared through a supported tower embedding.
pub fn congruent_mod_pm(a: &RingElement, b: &RingElement) -> Result<bool, RingError> {
    if a.ring == b.ring {
        return Ok(a == b);
    }
    if let Ok(ae) = a.ring.embed_into(a, &b.ring) {
        return Ok(&ae == b);
    }
    if let Ok(be) = b.ring.embed_into(b, &a.ring) {
        return Ok(a == &be);
    }
    Err(RingError::MixedRings)
}

/// Textual ring spec of the form
/// `ring p=<p> m=<m> (qp | unramified f=<f> [poly=c0,..,1] | cyclotomic s=<s> | compositum f=<f> s=<s> [poly=..])`.
pub fn parse_ring_spec(text: &str) -> Result<ModRing, RingError> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    if toks.is_empty() || toks[0] != "ring" {
        return Err(RingError::BadSpec("expected leading 'ring'".into()));
    }
    let mut p = None;
    let mut m = None;
    let mut f = None;
    let mut s = None;
    let mut poly: Option<Vec<i64>> = None;
    let mut kind = None;
    for t in &toks[1..] {
        if let Some((k, v)) = t.split_once('=') {
            match k {
                "p" => p = v.parse().ok(),
                "m" => m = v.parse().ok(),
                "f" => f = v.parse().ok(),
                "s" => s = v.parse().ok(),
                "poly" => {
                    let cs: Result<Vec<i64>, _> = v.split(',').map(str::parse).collect();
                    poly = Some(cs.map_err(|_| RingError::BadSpec("bad poly".into()))?);
                }
                _ => return Err(RingError::BadSpec(format!("unknown key {k}"))),
            }
        } else {
            kind = Some(t.to_string());
        }
    }
    let p = p.ok_or_else(|| RingError::BadSpec("missing p".into()))?;
    let m = m.ok_or_else(|| RingError::BadSpec("missing m".into()))?;
    let spec = match kind.as_deref() {
        Some("qp") | None => LocalFieldSpec::qp(p)?,
        Some("unramified") => LocalFieldSpec::unramified(
            p,
            f.ok_or_else(|| RingError::BadSpec("unramified needs f".into()))?,
            poly,
        )?,
        Some("cyclotomic") => LocalFieldSpec::cyclotomic(
            p,
            s.ok_or_else(|| RingError::BadSpec("cyclotomic needs s".into()))?,
        )?,
        Some("compositum") => LocalFieldSpec::compositum(
            p,
            f.ok_or_else(|| RingError::BadSpec("compositum needs f".into()))?,
            poly,
            s.ok_or_else(|| RingError::BadSpec("compositum needs s".into()))?,
        )?,
        Some(other) => return Err(RingError::BadSpec(format!("unknown field kind {other}"))),
    };
    ModRing::new(spec, m)
}
