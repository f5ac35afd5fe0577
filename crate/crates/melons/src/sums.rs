//! Closed sum formulas for the average heights H(n,1) and H(n,2).
//!
//! The building blocks are the divisor-weighted binomial sums
//!
//! ```text
//! S(n,a)   = ∑_{k≥1} d(k) · binom(2n, n−k+a) / binom(2n, n)
//! S(n,a,b) = ∑_{j,k≥1} d(gcd(j,k)) · binom(2n, n−j+a) binom(2n, n−k+b) / binom(2n, n)²
//! ```
//!
//! (out-of-range binomials vanish, so both sums are finite), combined into
//! the fixed linear combinations `big_s1` / `big_s2` and assembled into the
//! averages. In exact mode everything is rational arithmetic and the results
//! must equal the enumeration route *exactly* — that identity is this
//! module's reason to exist.
//!
//! The two combination coefficient tables are keyed in twice, independently
//! (`*_TERMS_PRIMARY` in the displayed grouping, `*_TERMS_SECONDARY` in
//! expanded/regrouped form); a test asserts they agree, guarding against
//! transcription slips in the most typo-prone constants of the project.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{MelonError, Result};
use crate::exact::{divisor_count_sieve, BinomRow};
use crate::hp::HPReal;

/// Arithmetic mode for the S-sums: exact rationals (cost grows with n;
/// intended for n ≲ 200) or high-precision floats at a given precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumMode {
    Exact,
    HighPrecision { prec_bits: usize },
}

/// Result carrier for the two modes.
#[derive(Debug, Clone)]
pub enum SumValue {
    Exact(BigRational),
    Hp(HPReal),
}

impl SumValue {
    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            SumValue::Exact(q) => Some(q),
            SumValue::Hp(_) => None,
        }
    }

    pub fn to_hp(&self, prec: usize) -> HPReal {
        match self {
            SumValue::Exact(q) => HPReal::from_ratio(q, prec),
            SumValue::Hp(x) => x.clone(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.to_hp(64).to_f64()
    }
}

/// Guard bits for the high-precision paths. The fixed combinations cancel
/// heavily (S₂(n) comes out ~10⁵× smaller than the individual double sums)
/// and the double sums accumulate O(n²) roundings, so intermediates run wider
/// and only the returned value is rounded to the requested precision.
const GUARD_BITS: usize = 64;

fn check_n(n: u64, what: &str) -> Result<()> {
    if n < 1 {
        return Err(MelonError::Domain(format!("{what} requires n >= 1, got {n}")));
    }
    Ok(())
}

/// S(n,a) in exact arithmetic: ∑_{k=1}^{n+a} d(k)·binom(2n, n−k+a) / binom(2n,n).
fn s1d_exact(n: u64, a: i64, row: &BinomRow, d: &[u32]) -> BigRational {
    let n_i = n as i64;
    let mut num = BigInt::zero();
    let kmax = n_i + a;
    for k in 1..=kmax.max(0) {
        let b = row.get(n_i - k + a);
        if !b.is_zero() {
            num += BigInt::from(d[k as usize]) * b;
        }
    }
    BigRational::new(num, row.get(n_i).clone())
}

/// Binomial quotient stream binom(2n, n−k+a)/binom(2n, n) for k = 1, 2, …
/// as a running product — magnitudes stay near 1, no huge factorials.
struct QuotientStream {
    n: i64,
    a: i64,
    k: i64,
    q: HPReal,
}

impl QuotientStream {
    fn new(n: u64, a: i64, prec: usize) -> Self {
        let n_i = n as i64;
        // Start at k = 0: binom(2n, n+a)/binom(2n, n) = ∏_{i=1}^{|a|} (n−i+1)/(n+i).
        let mut q = HPReal::one(prec);
        for i in 1..=a.unsigned_abs() as i64 {
            q = q
                .mul(&HPReal::from_i64(n_i - i + 1, prec))
                .div(&HPReal::from_i64(n_i + i, prec));
        }
        QuotientStream { n: n_i, a, k: 0, q }
    }

    /// Advance to the next k and return the quotient there (zero while the
    /// binomial argument sits outside [0, 2n]).
    fn next_quotient(&mut self, prec: usize) -> HPReal {
        // binom(2n, m−1) = binom(2n, m) · m/(2n−m+1) with m = n−k+a.
        let m = self.n - self.k + self.a;
        self.k += 1;
        if m <= 0 || m > 2 * self.n + 1 {
            return HPReal::zero(prec);
        }
        if m == 2 * self.n + 1 {
            // for a > n the walk starts above the binomial range, where the
            // running quotient is an unusable zero; re-seed it as the index
            // enters at 2n, where the quotient is 1/binom(2n, n)
            let center = crate::exact::binomial(2 * self.n, self.n);
            self.q = HPReal::one(prec).div(&HPReal::from_bigint(&center, prec));
            return self.q.clone();
        }
        self.q = self
            .q
            .mul(&HPReal::from_i64(m, prec))
            .div(&HPReal::from_i64(2 * self.n - m + 1, prec));
        self.q.clone()
    }
}

fn s1d_hp(n: u64, a: i64, prec: usize, d: &[u32]) -> HPReal {
    let mut acc = HPReal::zero(prec);
    let mut stream = QuotientStream::new(n, a, prec);
    let kmax = (n as i64 + a).max(0);
    for k in 1..=kmax {
        let q = stream.next_quotient(prec);
        acc = acc.add(&HPReal::from_u64(d[k as usize] as u64, prec).mul(&q));
    }
    acc
}

/// S(n,a): divisor-weighted single sum of binomial quotients.
pub fn s1d(n: u64, a: i64, mode: SumMode) -> Result<SumValue> {
    check_n(n, "s1d")?;
    let kmax = (n as i64 + a).max(1) as usize;
    let d = divisor_count_sieve(kmax);
    match mode {
        SumMode::Exact => {
            let row = BinomRow::new(2 * n);
            Ok(SumValue::Exact(s1d_exact(n, a, &row, &d)))
        }
        SumMode::HighPrecision { prec_bits } => {
            let wp = prec_bits + GUARD_BITS;
            Ok(SumValue::Hp(s1d_hp(n, a, wp, &d).round_to(prec_bits)))
        }
    }
}

fn s2d_exact(n: u64, a: i64, b: i64, row: &BinomRow, d: &[u32]) -> BigRational {
    let n_i = n as i64;
    let mut num = BigInt::zero();
    for j in 1..=(n_i + a).max(0) {
        let bj = row.get(n_i - j + a);
        if bj.is_zero() {
            continue;
        }
        for k in 1..=(n_i + b).max(0) {
            let bk = row.get(n_i - k + b);
            if bk.is_zero() {
                continue;
            }
            let g = num_integer::gcd(j, k) as usize;
            num += BigInt::from(d[g]) * bj * bk;
        }
    }
    let den = row.get(n_i);
    BigRational::new(num, den * den)
}

fn s2d_hp(n: u64, a: i64, b: i64, prec: usize, d: &[u32]) -> HPReal {
    let jmax = (n as i64 + a).max(0);
    let kmax = (n as i64 + b).max(0);
    let collect = |aa: i64, mx: i64| -> Vec<HPReal> {
        let mut stream = QuotientStream::new(n, aa, prec);
        (1..=mx).map(|_| stream.next_quotient(prec)).collect()
    };
    let qa = collect(a, jmax);
    let qb = collect(b, kmax);
    // Row-partitioned fixed-order summation keeps the result deterministic.
    let mut acc = HPReal::zero(prec);
    for (j, qj) in qa.iter().enumerate() {
        let mut rowsum = HPReal::zero(prec);
        for (k, qk) in qb.iter().enumerate() {
            let g = num_integer::gcd(j as i64 + 1, k as i64 + 1) as usize;
            rowsum = rowsum.add(&HPReal::from_u64(d[g] as u64, prec).mul(qk));
        }
        acc = acc.add(&qj.mul(&rowsum));
    }
    acc
}

/// S(n,a,b): gcd-divisor-weighted double sum of binomial quotients.
pub fn s2d(n: u64, a: i64, b: i64, mode: SumMode) -> Result<SumValue> {
    check_n(n, "s2d")?;
    let mx = (n as i64 + a.max(b)).max(1) as usize;
    let d = divisor_count_sieve(mx);
    match mode {
        SumMode::Exact => {
            let row = BinomRow::new(2 * n);
            Ok(SumValue::Exact(s2d_exact(n, a, b, &row, &d)))
        }
        SumMode::HighPrecision { prec_bits } => {
            let wp = prec_bits + GUARD_BITS;
            Ok(SumValue::Hp(s2d_hp(n, a, b, wp, &d).round_to(prec_bits)))
        }
    }
}

// ─── combination coefficient tables, keyed in twice ───────────────────────

/// First keying of the S₁ combination, grouped exactly as displayed:
/// coefficient-polynomial callbacks paired with the S(n,a) offsets they hit.
fn big_s1_terms_primary(n: i64) -> Vec<(BigInt, i64)> {
    let nb = |v: i64| BigInt::from(v);
    let mut t: Vec<(BigInt, i64)> = Vec::new();
    // −20(n−1)(n+2) S(n,0)
    t.push((nb(-20) * nb(n - 1) * nb(n + 2), 0));
    // 15n(n+1)(S(n,−1)+S(n,1))
    for a in [-1, 1] {
        t.push((nb(15) * nb(n) * nb(n + 1), a));
    }
    // (n+3)(6S(n,−1) − 16S(n,0) + 6S(n,1))
    t.push((nb(n + 3) * nb(6), -1));
    t.push((nb(n + 3) * nb(-16), 0));
    t.push((nb(n + 3) * nb(6), 1));
    // (n−2)(6S(n,−1) + 8S(n,0) + 6S(n,1))
    t.push((nb(n - 2) * nb(6), -1));
    t.push((nb(n - 2) * nb(8), 0));
    t.push((nb(n - 2) * nb(6), 1));
    // −6n(n+3)(S(n,−2)+S(n,2))
    for a in [-2, 2] {
        t.push((nb(-6) * nb(n) * nb(n + 3), a));
    }
    // (n+2)(n+3)(S(n,−3)+S(n,3))
    for a in [-3, 3] {
        t.push((nb(n + 2) * nb(n + 3), a));
    }
    t
}

/// Second, independent keying: expanded polynomial coefficients
/// [c₀, c₁, c₂] of the multiplier of S(n,a) for each offset a.
#[cfg(test)]
const BIG_S1_SECONDARY: [(i64, [i64; 3]); 7] = [
    (-3, [6, 5, 1]),
    (-2, [0, -18, -6]),
    (-1, [6, 27, 15]),
    (0, [-24, -28, -20]),
    (1, [6, 27, 15]),
    (2, [0, -18, -6]),
    (3, [6, 5, 1]),
];

#[cfg(test)]
fn big_s1_terms_secondary(n: i64) -> Vec<(BigInt, i64)> {
    BIG_S1_SECONDARY
        .iter()
        .map(|(a, c)| {
            let v = BigInt::from(c[0]) + BigInt::from(c[1]) * n + BigInt::from(c[2]) * n * n;
            (v, *a)
        })
        .collect()
}

/// Collapse a term list to the coefficient of each offset a.
fn collect_coeffs(terms: Vec<(BigInt, i64)>) -> std::collections::BTreeMap<i64, BigInt> {
    let mut m = std::collections::BTreeMap::new();
    for (c, a) in terms {
        *m.entry(a).or_insert_with(BigInt::zero) += c;
    }
    m.retain(|_, v| !v.is_zero());
    m
}

/// First keying of the S₂ combination: 19 integer-coefficient terms
/// (coefficient, a, b), listed in display order.
pub const BIG_S2_TERMS_PRIMARY: [(i64, i64, i64); 19] = [
    (1, -2, -2),
    (-1, -1, -3),
    (-2, -1, -2),
    (1, -1, -1),
    (2, -1, 0),
    (-1, -1, 3),
    (2, 0, -3),
    (-4, 0, 0),
    (2, 0, 3),
    (-1, 1, -3),
    (-2, 1, -2),
    (2, 1, -1),
    (2, 1, 0),
    (1, 1, 1),
    (-1, 1, 3),
    (2, 2, -2),
    (-2, 2, -1),
    (-2, 2, 1),
    (1, 2, 2),
];

/// Second keying, regrouped by coefficient value.
pub const BIG_S2_TERMS_SECONDARY: [(i64, i64, i64); 19] = [
    // coefficient +1
    (1, -2, -2),
    (1, -1, -1),
    (1, 1, 1),
    (1, 2, 2),
    // coefficient +2
    (2, -1, 0),
    (2, 0, -3),
    (2, 0, 3),
    (2, 1, -1),
    (2, 1, 0),
    (2, 2, -2),
    // coefficient −1
    (-1, -1, -3),
    (-1, -1, 3),
    (-1, 1, -3),
    (-1, 1, 3),
    // coefficient −2
    (-2, -1, -2),
    (-2, 1, -2),
    (-2, 2, -1),
    (-2, 2, 1),
    // coefficient −4
    (-4, 0, 0),
];

/// S₁(n): the fixed 6-group combination of S(n,a), a ∈ {−3,…,3}.
pub fn big_s1(n: u64, mode: SumMode) -> Result<SumValue> {
    check_n(n, "big_s1")?;
    let coeffs = collect_coeffs(big_s1_terms_primary(n as i64));
    match mode {
        SumMode::Exact => {
            let row = BinomRow::new(2 * n);
            let d = divisor_count_sieve(n as usize + 3);
            let mut acc = BigRational::zero();
            for (a, c) in &coeffs {
                acc += BigRational::from_integer(c.clone()) * s1d_exact(n, *a, &row, &d);
            }
            Ok(SumValue::Exact(acc))
        }
        SumMode::HighPrecision { prec_bits } => {
            let wp = prec_bits + GUARD_BITS;
            let d = divisor_count_sieve(n as usize + 3);
            let mut acc = HPReal::zero(wp);
            for (a, c) in &coeffs {
                acc = acc.add(&HPReal::from_bigint(c, wp).mul(&s1d_hp(n, *a, wp, &d)));
            }
            Ok(SumValue::Hp(acc.round_to(prec_bits)))
        }
    }
}

/// S₂(n): the fixed 19-term combination of S(n,a,b).
pub fn big_s2(n: u64, mode: SumMode) -> Result<SumValue> {
    check_n(n, "big_s2")?;
    match mode {
        SumMode::Exact => {
            let row = BinomRow::new(2 * n);
            let d = divisor_count_sieve(n as usize + 3);
            let mut acc = BigRational::zero();
            for (c, a, b) in BIG_S2_TERMS_PRIMARY {
                acc += BigRational::from_integer(BigInt::from(c)) * s2d_exact(n, a, b, &row, &d);
            }
            Ok(SumValue::Exact(acc))
        }
        SumMode::HighPrecision { prec_bits } => {
            let wp = prec_bits + GUARD_BITS;
            let d = divisor_count_sieve(n as usize + 3);
            let mut acc = HPReal::zero(wp);
            for (c, a, b) in BIG_S2_TERMS_PRIMARY {
                acc = acc.add(&HPReal::from_i64(c, wp).mul(&s2d_hp(n, a, b, wp, &d)));
            }
            Ok(SumValue::Hp(acc.round_to(prec_bits)))
        }
    }
}

/// H(n,1) via the sum formula: (n+1)(S(n,1) − 2S(n,0) + S(n,−1)) − 1.
/// In exact mode this must equal the enumeration route exactly.
pub fn avg_height1_sum(n: u64, mode: SumMode) -> Result<SumValue> {
    check_n(n, "avg_height1_sum")?;
    match mode {
        SumMode::Exact => {
            let row = BinomRow::new(2 * n);
            let d = divisor_count_sieve(n as usize + 1);
            let comb = s1d_exact(n, 1, &row, &d) - BigRational::from_integer(BigInt::from(2)) * s1d_exact(n, 0, &row, &d)
                + s1d_exact(n, -1, &row, &d);
            let v = comb * BigRational::from_integer(BigInt::from(n + 1)) - BigRational::one();
            Ok(SumValue::Exact(v))
        }
        SumMode::HighPrecision { prec_bits } => {
            let wp = prec_bits + GUARD_BITS;
            let d = divisor_count_sieve(n as usize + 1);
            let two = HPReal::from_i64(2, wp);
            let comb = s1d_hp(n, 1, wp, &d)
                .sub(&two.mul(&s1d_hp(n, 0, wp, &d)))
                .add(&s1d_hp(n, -1, wp, &d));
            let v = comb.mul(&HPReal::from_u64(n + 1, wp)).sub(&HPReal::one(wp));
            Ok(SumValue::Hp(v.round_to(prec_bits)))
        }
    }
}

/// H(n,2) via the sum formula:
/// ((n+1)(n+2) / (12(2n+1))) · ((n+1)(n+2)(n+3)·S₂(n) + S₁(n)) − 1,
/// with (n+1)(n+2) and (n+1)(n+2)(n+3) the rising factorials (n+1)^(2̄), (n+1)^(3̄).
/// In exact mode this must equal the enumeration route exactly.
pub fn avg_height2_sum(n: u64, mode: SumMode) -> Result<SumValue> {
    check_n(n, "avg_height2_sum")?;
    let n_i = n as i64;
    let rf2 = BigInt::from(n_i + 1) * BigInt::from(n_i + 2);
    let rf3 = &rf2 * BigInt::from(n_i + 3);
    let pre = BigRational::new(rf2, BigInt::from(12) * BigInt::from(2 * n_i + 1));
    match mode {
        SumMode::Exact => {
            let s1 = match big_s1(n, mode)? {
                SumValue::Exact(q) => q,
                _ => unreachable!(),
            };
            let s2 = match big_s2(n, mode)? {
                SumValue::Exact(q) => q,
                _ => unreachable!(),
            };
            let v = pre * (BigRational::from_integer(rf3) * s2 + s1) - BigRational::one();
            Ok(SumValue::Exact(v))
        }
        SumMode::HighPrecision { prec_bits } => {
            let wp = prec_bits + GUARD_BITS;
            let wide = SumMode::HighPrecision { prec_bits: wp };
            let s1 = big_s1(n, wide)?.to_hp(wp);
            let s2 = big_s2(n, wide)?.to_hp(wp);
            let v = HPReal::from_ratio(&pre, wp)
                .mul(&HPReal::from_bigint(&rf3, wp).mul(&s2).add(&s1))
                .sub(&HPReal::one(wp));
            Ok(SumValue::Hp(v.round_to(prec_bits)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::avg_height_exact;
    use num_traits::Signed;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn s1d_examples() {
        assert_eq!(*s1d(1, 1, SumMode::Exact).unwrap().as_exact().unwrap(), q(2, 1));
        assert_eq!(*s1d(2, 0, SumMode::Exact).unwrap().as_exact().unwrap(), q(1, 1));
        assert_eq!(*s1d(1, -1, SumMode::Exact).unwrap().as_exact().unwrap(), q(0, 1));
        assert_eq!(*s1d(2, 1, SumMode::Exact).unwrap().as_exact().unwrap(), q(8, 3));
        // empty when n+a < 1, and never negative
        assert_eq!(*s1d(3, -4, SumMode::Exact).unwrap().as_exact().unwrap(), q(0, 1));
        for n in 1..=12 {
            for a in -3..=3 {
                assert!(!s1d(n, a, SumMode::Exact).unwrap().as_exact().unwrap().is_negative());
            }
        }
    }

    #[test]
    fn s2d_examples() {
        assert_eq!(*s2d(1, 1, 1, SumMode::Exact).unwrap().as_exact().unwrap(), q(5, 2));
        assert_eq!(*s2d(1, -3, -3, SumMode::Exact).unwrap().as_exact().unwrap(), q(0, 1));
        assert_eq!(*s2d(2, 0, 0, SumMode::Exact).unwrap().as_exact().unwrap(), q(13, 18));
        // independent double-loop oracle for (2,0,0): j,k ∈ [1,4]²
        let mut acc = BigRational::zero();
        for j in 1..=4i64 {
            for k in 1..=4i64 {
                let dg = crate::exact::divisor_count(num_integer::gcd(j, k) as u64).unwrap();
                let t = BigRational::new(
                    BigInt::from(dg) * crate::exact::binomial(4, 2 - j) * crate::exact::binomial(4, 2 - k),
                    BigInt::from(36),
                );
                acc += t;
            }
        }
        assert_eq!(*s2d(2, 0, 0, SumMode::Exact).unwrap().as_exact().unwrap(), acc);
        // symmetry in (a,b)
        assert_eq!(
            s2d(5, 2, -1, SumMode::Exact).unwrap().as_exact().unwrap(),
            s2d(5, -1, 2, SumMode::Exact).unwrap().as_exact().unwrap()
        );
    }

    #[test]
    fn double_entry_tables_agree() {
        for n in 1..=40i64 {
            assert_eq!(
                collect_coeffs(big_s1_terms_primary(n)),
                collect_coeffs(big_s1_terms_secondary(n)),
                "S1 coefficient tables diverge at n={n}"
            );
        }
        let mut a = BIG_S2_TERMS_PRIMARY.to_vec();
        let mut b = BIG_S2_TERMS_SECONDARY.to_vec();
        a.sort_unstable();
        b.sort_unstable();
        assert_eq!(a, b, "S2 term tables diverge");
    }

    #[test]
    fn zero_inputs_give_zero_by_linearity() {
        // with every S forced to 0 the combinations vanish; the tables only
        // ever multiply S-values, so a zero vector maps to zero.
        let coeffs = collect_coeffs(big_s1_terms_primary(9));
        let zero_sum: BigRational =
            coeffs.values().map(|_| BigRational::zero()).fold(BigRational::zero(), |a, b| a + b);
        assert!(zero_sum.is_zero());
        let zero2: i64 = BIG_S2_TERMS_PRIMARY.iter().map(|(c, _, _)| c * 0).sum();
        assert_eq!(zero2, 0);
    }

    #[test]
    fn height1_formula_equals_enumeration() {
        assert_eq!(*avg_height1_sum(1, SumMode::Exact).unwrap().as_exact().unwrap(), q(1, 1));
        assert_eq!(*avg_height1_sum(2, SumMode::Exact).unwrap().as_exact().unwrap(), q(3, 2));
        assert_eq!(*avg_height1_sum(12, SumMode::Exact).unwrap().as_exact().unwrap(), q(36174, 7429));
        for n in 1..=20 {
            assert_eq!(
                *avg_height1_sum(n, SumMode::Exact).unwrap().as_exact().unwrap(),
                avg_height_exact(n, 1).unwrap(),
                "H(n,1) routes disagree at n={n}"
            );
        }
    }

    #[test]
    fn height2_formula_equals_enumeration() {
        assert_eq!(*avg_height2_sum(1, SumMode::Exact).unwrap().as_exact().unwrap(), q(3, 1));
        assert_eq!(*avg_height2_sum(2, SumMode::Exact).unwrap().as_exact().unwrap(), q(11, 3));
        for n in 1..=12 {
            assert_eq!(
                *avg_height2_sum(n, SumMode::Exact).unwrap().as_exact().unwrap(),
                avg_height_exact(n, 2).unwrap(),
                "H(n,2) routes disagree at n={n}"
            );
        }
    }

    #[test]
    fn mode_consistency() {
        // |high-precision − exact| ≤ 2^(−prec+20) relative.  n = 1 and 2 sit
        // below the largest shift in the tables (|a| = 3), exercising the
        // regime where the binomial index starts outside its admissible range.
        let prec = 128usize;
        let mode = SumMode::HighPrecision { prec_bits: prec };
        for n in [1u64, 2, 3, 5, 17, 40] {
            let ex = avg_height2_sum(n, SumMode::Exact).unwrap().as_exact().unwrap().clone();
            let hp = avg_height2_sum(n, mode).unwrap().to_hp(prec);
            let rel = hp.sub(&HPReal::from_ratio(&ex, prec)).abs().div(&HPReal::from_ratio(&ex, prec));
            let budget = 2f64.powi(-(prec as i32) + 20);
            assert!(
                rel.to_f64() < budget,
                "n={n}: hp deviates by {} (budget {budget})",
                rel.to_f64()
            );
        }
        // the same small-n regime for the bare sums, at every table shift
        for n in [1u64, 2, 3] {
            for a in -3i64..=3 {
                let ex = s1d(n, a, SumMode::Exact).unwrap().as_exact().unwrap().clone();
                let hp = s1d(n, a, mode).unwrap().to_hp(prec);
                let diff = hp.sub(&HPReal::from_ratio(&ex, prec)).abs();
                assert!(
                    diff.to_f64() < 2f64.powi(-(prec as i32) + 20),
                    "S({n},{a}) modes disagree: exact {ex}, hp {}",
                    hp.to_decimal_string(25)
                );
            }
        }
    }
}
