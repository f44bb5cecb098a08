//! Regenerates the fixture corpus under `fixtures/`.
//!
//! The three newforms behind the fixtures are the L-series of rational
//! elliptic curves of conductors 26 and 52. Coefficients are computed by
//! exact point counting over prime fields plus the standard weight-2 Hecke
//! recursions, then cross-checked against the known leading coefficients
//! and the mod-3 congruence between the level-52 form and the odd part of
//! the level-26 form. The level-52 basis is the saturation of the
//! newform/oldform lattice, presented in Hermite normal form.

use std::path::PathBuf;

use num_bigint::BigInt;

use modpm::hecke::SpaceBasis;
use modpm::qexp::Group;
use modpm::refdata;
use modpm::spacefile::{write_catalog_file, write_space_file};

const TRUNC: usize = 200;

/// Discriminant of a Weierstrass model [a1, a2, a3, a4, a6].
fn discriminant(a: [i64; 5]) -> i64 {
    let [a1, a2, a3, a4, a6] = a;
    let b2 = a1 * a1 + 4 * a2;
    let b4 = 2 * a4 + a1 * a3;
    let b6 = a3 * a3 + 4 * a6;
    let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6
}

/// Trace of Frobenius at ell by exact point counting. Covers good
/// reduction (a = ell + 1 - #E) and bad reduction (a = ell - #E^ns).
fn trace_of_frobenius(a: [i64; 5], ell: u64) -> i64 {
    let l = ell as i64;
    let red = |v: i64| v.rem_euclid(l);
    let [a1, a2, a3, a4, a6] = a;
    let bad = discriminant(a).rem_euclid(l) == 0;
    let mut affine = 0i64;
    for x in 0..l {
        for y in 0..l {
            let lhs = red(y * y + a1 * x * y + a3 * y);
            let rhs = red(x * x * x + a2 * x * x + a4 * x + a6);
            if lhs != rhs {
                continue;
            }
            if bad {
                // smooth iff some partial derivative is nonzero
                let dy = red(2 * y + a1 * x + a3);
                let dx = red(3 * x * x + 2 * a2 * x + a4 - a1 * y);
                if dy == 0 && dx == 0 {
                    continue;
                }
            }
            affine += 1;
        }
    }
    if bad {
        // #E^ns = smooth affine points + the point at infinity
        l - 1 - affine
    } else {
        l - affine
    }
}

/// Full coefficient vector a_1..a_trunc of the weight-2 newform attached to
/// the curve, via multiplicativity and the prime-power recursions.
fn newform_coeffs(a: [i64; 5], conductor: u64, trunc: usize) -> Vec<i64> {
    let mut an = vec![0i64; trunc + 1];
    an[1] = 1;
    let mut primes = Vec::new();
    let mut sieve = vec![true; trunc + 1];
    for p in 2..=trunc {
        if sieve[p] {
            primes.push(p as u64);
            let mut q = p * p;
            while q <= trunc {
                sieve[q] = false;
                q += p;
            }
        }
    }
    for &p in &primes {
        let ap = trace_of_frobenius(a, p);
        let bad = conductor % p == 0;
        let mut powers = vec![1i64, ap];
        let mut pe = p;
        while pe * p <= trunc as u64 {
            pe *= p;
            let k = powers.len();
            let next = if bad {
                ap * powers[k - 1]
            } else {
                ap * powers[k - 1] - (p as i64) * powers[k - 2]
            };
            powers.push(next);
        }
        let mut q = p;
        let mut e = 1usize;
        while q <= trunc as u64 {
            an[q as usize] = powers[e];
            q *= p;
            e += 1;
        }
    }
    // multiplicative extension: n = pe * m with pe the largest power of the
    // smallest prime factor
    for n in 2..=trunc {
        if an[n] != 0 {
            continue;
        }
        let mut p = 2;
        while n % p != 0 {
            p += 1;
        }
        let mut m = n;
        let mut pe = 1;
        while m % p == 0 {
            m /= p;
            pe *= p;
        }
        if m > 1 {
            an[n] = an[pe] * an[m];
        }
    }
    an[1..].to_vec()
}

fn to_big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&c| BigInt::from(c)).collect()
}

/// g(q^2): shift indices by a factor of 2.
fn double_index(v: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64; v.len()];
    for (i, &c) in v.iter().enumerate() {
        let n = 2 * (i + 1);
        if n <= v.len() {
            out[n - 1] = c;
        }
    }
    out
}

fn odd_part(v: &[i64]) -> Vec<i64> {
    v.iter()
        .enumerate()
        .map(|(i, &c)| if (i + 1) % 2 == 1 { c } else { 0 })
        .collect()
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let out_dir = if args.len() > 1 {
        PathBuf::from(&args[1])
    } else {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
    };
    std::fs::create_dir_all(&out_dir).expect("create fixtures dir");

    assert_eq!(discriminant(refdata::CURVE_26A).unsigned_abs() % 26, 0);
    assert_eq!(discriminant(refdata::CURVE_26B).unsigned_abs() % 26, 0);
    assert_eq!(discriminant(refdata::CURVE_52A).unsigned_abs() % 26, 0);

    let cand_a = newform_coeffs(refdata::CURVE_26A, 26, TRUNC);
    let cand_b = newform_coeffs(refdata::CURVE_26B, 26, TRUNC);
    let f = newform_coeffs(refdata::CURVE_52A, 52, TRUNC);

    // match the reference leading coefficients to decide which curve is g
    let leading_match = |cand: &[i64], expect: &[i64]| cand[..expect.len()] == *expect;
    assert!(
        leading_match(&f, &refdata::F52_COEFFS),
        "level-52 point counts disagree with the reference coefficients"
    );
    let (g, g1, g_label) = if leading_match(&cand_a, &refdata::G26_COEFFS) {
        (cand_a, cand_b, "26A")
    } else if leading_match(&cand_b, &refdata::G26_COEFFS) {
        (cand_b, cand_a, "26B")
    } else {
        panic!("neither level-26 curve matches the reference coefficients");
    };

    // the odd part of g embedded at level 52 equals g(q) - g(q^2), and is
    // congruent to f mod 3 coefficientwise
    let gtilde = odd_part(&g);
    let g_q2 = double_index(&g);
    for i in 0..TRUNC {
        assert_eq!(gtilde[i], g[i] - g_q2[i], "gtilde identity at {}", i + 1);
        assert_eq!(
            (f[i] - gtilde[i]).rem_euclid(3),
            0,
            "mod-3 congruence between f and gtilde fails at n={}",
            i + 1
        );
    }

    let basis26 = SpaceBasis::new(
        26,
        Group::Gamma0,
        None,
        vec![2, 2],
        vec![to_big(&g), to_big(&g1)],
    )
    .expect("level 26 basis");
    println!(
        "level 26: dim {}, warnings: {:?}",
        basis26.dim(),
        basis26.warnings
    );

    let g1_q2 = double_index(&g1);
    let basis52 = SpaceBasis::new(
        52,
        Group::Gamma0,
        None,
        vec![2, 2, 2, 2, 2],
        vec![
            to_big(&f),
            to_big(&g),
            to_big(&g_q2),
            to_big(&g1),
            to_big(&g1_q2),
        ],
    )
    .expect("level 52 basis");
    println!(
        "level 52: dim {}, warnings: {:?}",
        basis52.dim(),
        basis52.warnings
    );

    // hard consistency gate: the Hecke algebra must stabilize both lattices
    // with integral matrices and full rank
    assert_eq!(basis26.algebra_rank(7).expect("rank 26"), 2);
    assert_eq!(basis52.algebra_rank(14).expect("rank 52"), 5);
    println!("Hecke stability verified (ranks 2 and 5)");

    let rows26: Vec<Vec<BigInt>> = basis26.rows.iter().map(|r| r.coeffs.clone()).collect();
    write_space_file(
        &out_dir.join("S_2_G0_26.basis"),
        26,
        &[2, 2],
        Group::Gamma0,
        "none",
        &rows26,
    )
    .expect("write 26");
    let rows52: Vec<Vec<BigInt>> = basis52.rows.iter().map(|r| r.coeffs.clone()).collect();
    write_space_file(
        &out_dir.join("S_2_G0_52.basis"),
        52,
        &[2; 5],
        Group::Gamma0,
        "none",
        &rows52,
    )
    .expect("write 52");

    // single-form files for the CLI (same grammar, one row)
    write_space_file(
        &out_dir.join("f_52.qexp"),
        52,
        &[2],
        Group::Gamma0,
        "none",
        &[to_big(&f)],
    )
    .expect("write f");
    write_space_file(
        &out_dir.join("gtilde_52.qexp"),
        52,
        &[2],
        Group::Gamma0,
        "none",
        &[to_big(&gtilde)],
    )
    .expect("write gtilde");

    write_catalog_file(
        &out_dir.join("catalog_26.cat"),
        26,
        2,
        Group::Gamma0,
        "none",
        &[
            ("g".to_string(), to_big(&g)),
            ("g1".to_string(), to_big(&g1)),
        ],
    )
    .expect("write catalog 26");
    write_catalog_file(
        &out_dir.join("catalog_52.cat"),
        52,
        2,
        Group::Gamma0,
        "none",
        &[
            ("f".to_string(), to_big(&f)),
            ("g".to_string(), to_big(&g)),
            ("g1".to_string(), to_big(&g1)),
        ],
    )
    .expect("write catalog 52");
    // the short reference truncation (integrity fixture)
    write_catalog_file(
        &out_dir.join("catalog_52_q19.cat"),
        52,
        2,
        Group::Gamma0,
        "none",
        &[
            ("f".to_string(), to_big(&refdata::F52_COEFFS)),
            ("g".to_string(), to_big(&refdata::G26_COEFFS)),
        ],
    )
    .expect("write reference catalog");

    println!(
        "g is the L-series of curve {g_label}; fixtures written to {}",
        out_dir.display()
    );
}
