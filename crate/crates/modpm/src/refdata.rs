//! Known leading coefficients of the newforms behind the shipped fixtures.
//!
//! `F52` is the unique newform of level 52 and weight 2 with trivial
//! character; `G26` is the second of the two rational newforms of level 26
//! (in the labeling the fixture corpus follows). These arrays pin the
//! fixture generator and the integrity tests; the full fixture expansions
//! are regenerated from elliptic-curve point counts and must byte-match
//! these leading terms.

/// a_1..a_19 of the level-52 newform f.
pub const F52_COEFFS: [i64; 19] = [1, 0, 0, 0, 2, 0, -2, 0, -3, 0, -2, 0, -1, 0, 0, 0, 6, 0, -6];

/// a_1..a_19 of the level-26 newform g.
pub const G26_COEFFS: [i64; 19] = [
    1, 1, -3, 1, -1, -3, 1, 1, 6, -1, -2, -3, -1, 1, 3, 1, -3, 6, 6,
];

/// a_1..a_19 of g with even-index coefficients removed (an eigenform of
/// level 52; equals `g(q) - g(q^2)` inside the level-52 oldspace).
pub const GTILDE52_COEFFS: [i64; 19] =
    [1, 0, -3, 0, -1, 0, 1, 0, 6, 0, -2, 0, -1, 0, 3, 0, -3, 0, 6];

/// Reference nonzero residues of `h = (f + gtilde)/2` mod 9 at the
/// indices the short catalogs pin, as (index, residue) pairs.
pub const H_MOD9_REFERENCE: [(usize, u64); 8] = [
    (1, 1),
    (3, 3),
    (5, 5),
    (7, 4),
    (9, 6),
    (11, 7),
    (15, 6),
    (17, 6),
];

/// The q^13 coefficient of h mod 9 (= -1), derivable from the f and g
/// arrays and kept separate from the reference list above.
pub const H_MOD9_A13: (usize, u64) = (13, 8);

/// Eigenvalue of T_5 on h mod 9: (a_5(f) + a_5(g)) / 2 = (2 - 1) * 2^{-1}.
pub const H_MOD9_T5: u64 = 5;

/// Weierstrass coefficients [a1, a2, a3, a4, a6] of rational elliptic
/// curves whose L-series give the fixture newforms. Which curve matches
/// which reference expansion is decided (and verified) by the generator.
pub const CURVE_26A: [i64; 5] = [1, 0, 1, -5, -8];
pub const CURVE_26B: [i64; 5] = [1, -1, 1, -3, 3];
pub const CURVE_52A: [i64; 5] = [0, 0, 0, 1, -10];
