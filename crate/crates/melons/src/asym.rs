//! Large-n expansions of the divisor-weighted Gaussian sums and the
//! asymptotic average heights built from them.
//!
//! The single sum g(n,b) = Σ_{k≥1} k^b d(k) e^{−k²/n} and the double sum
//! g(n,a,b) = Σ_{k,l≥1} k^a l^b d(gcd(k,l)) e^{−(k²+l²)/n} are evaluated two
//! independent ways: by truncated summation with an explicit tail bound
//! (`g_direct`, `g2_direct`), and by residue expansions in closed form
//! (`g_asym`, `g2_asym`) whose error falls faster than any power of n.  The
//! expansions are then combined into the asymptotic forms of the S-sums from
//! `sums` and finally into the average-height asymptotics
//!
//! ```text
//!   H(n,1) ≍ √(πn) − 3/2,        H(n,2) ≍ K·√(πn) + const,
//! ```
//!
//! where K is an integer combination of the Dirichlet-series constants
//! c_{a,b} supplied by a `ConstantsSource`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dirichlet::ConstantsSource;
use crate::error::{MelonError, Result};
use crate::exact::divisor_count_sieve;
use crate::hp::HPReal;
use crate::specfun::{bernoulli, digamma_halfint, gamma_euler};

// ─── expansion carrier ──────────────────────────────────────────────────────

/// One term of a large-n expansion: coefficient · n^{n_power} · √(πn)^{0|1}
/// · (log n)^{0|1}.  `closed_form` is a display string for the coefficient.
#[derive(Debug, Clone)]
pub struct ExpansionTerm {
    pub n_power: i64,
    pub has_sqrt_pi_n: bool,
    pub has_log_n: bool,
    pub coefficient: HPReal,
    pub closed_form: String,
}

impl ExpansionTerm {
    /// Total order key: twice the effective power of n, with log-bearing
    /// terms ranked above log-free ones at equal power.
    fn order_key(&self) -> (i64, bool) {
        (2 * self.n_power + i64::from(self.has_sqrt_pi_n), self.has_log_n)
    }
}

/// A finite expansion in decreasing powers of n.  `order` records how many
/// residue correction terms beyond the main one were included.
#[derive(Debug, Clone)]
pub struct GExpansion {
    pub terms: Vec<ExpansionTerm>,
    pub order: u32,
}

impl GExpansion {
    /// Terms must come in strictly decreasing order of effective power and
    /// all coefficients must be finite.
    pub fn new(terms: Vec<ExpansionTerm>, order: u32) -> Result<Self> {
        for w in terms.windows(2) {
            if w[0].order_key() <= w[1].order_key() {
                return Err(MelonError::Internal(
                    "expansion terms are not in strictly decreasing power order".into(),
                ));
            }
        }
        if terms.iter().any(|t| !t.coefficient.is_finite()) {
            return Err(MelonError::Internal("expansion coefficient is not finite".into()));
        }
        Ok(GExpansion { terms, order })
    }

    /// Numeric value of the expansion at a concrete n ≥ 1.
    pub fn evaluate(&self, n: u64) -> HPReal {
        let wp = self.terms.iter().map(|t| t.coefficient.prec()).max().unwrap_or(64);
        let nh = HPReal::from_u64(n, wp);
        let sqrt_pi_n = HPReal::pi(wp).mul(&nh).sqrt();
        let log_n = nh.ln();
        let mut acc = HPReal::zero(wp);
        for t in &self.terms {
            let mut v = t.coefficient.mul(&nh.pow_i64(t.n_power));
            if t.has_sqrt_pi_n {
                v = v.mul(&sqrt_pi_n);
            }
            if t.has_log_n {
                v = v.mul(&log_n);
            }
            acc = acc.add(&v);
        }
        acc
    }
}

/// The √(πn)-coefficient of the p = 2 average height together with its
/// additive constant and the exact integer multipliers on each c_{a,b}.
#[derive(Debug, Clone)]
pub struct AsymptoticCoefficient {
    pub k: HPReal,
    pub constant: HPReal,
    pub multipliers: Vec<(u32, u32, i64)>,
}

/// Which form of the double-sum expansion to use when both indices are
/// positive: the re-derived residue coefficient, or the displayed one (whose
/// √(πn)-term carries an extra factor (2a)!(2b)!/(a!b!); `Derived` is what
/// the verified numerics support and what the S₂ assembly uses).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThirdCase {
    Derived,
    Printed,
}

// ─── small exact helpers ────────────────────────────────────────────────────

fn fact(m: u32) -> BigInt {
    (1..=u64::from(m)).map(BigInt::from).product()
}

/// (b−1)!! for even b ≥ 0 (empty product 1 at b = 0).
fn odd_double_factorial_below(b: u32) -> BigInt {
    (1..u64::from(b)).step_by(2).map(BigInt::from).product()
}

fn hp_ratio(q: &BigRational, wp: usize) -> HPReal {
    HPReal::from_ratio(q, wp)
}

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

// ─── truncated direct summation ─────────────────────────────────────────────

/// Smallest cutoff K such that Σ_{k>K} k^p e^{−k²/n} < tol, found by scanning
/// past the summand's peak and accumulating the remaining tail in f64 (the
/// tail converges in a few hundred terms once the Gaussian factor dominates).
fn direct_cutoff(n: u64, p: u32, tol: f64) -> Result<usize> {
    if !(tol > 0.0) {
        return Err(MelonError::Domain("direct summation requires tol > 0".into()));
    }
    let nf = n as f64;
    let pf = f64::from(p);
    let term = |k: f64| (pf * k.ln() - k * k / nf).exp();
    let peak = (nf * pf.max(1.0) / 2.0).sqrt();
    let mut k = peak.ceil().max(1.0);
    loop {
        let mut tail = 0.0;
        let mut j = k + 1.0;
        loop {
            let t = term(j);
            tail += t;
            if t < tol * 1e-6 || j > k + 2e6 {
                break;
            }
            j += 1.0;
        }
        if tail < tol {
            return Ok(k as usize);
        }
        k = (k * 1.3).ceil() + 8.0;
        if k > 5e7 {
            return Err(MelonError::Numeric(
                "direct-sum cutoff exceeded 5·10⁷ terms before the tail bound met tol".into(),
            ));
        }
    }
}

/// f64 estimate of Σ_{k≥1} k^p e^{−k²/n}, used to apportion the tail budget
/// of the double sum between its two indices.
fn weighted_gaussian_sum_f64(n: u64, p: u32) -> f64 {
    let nf = n as f64;
    let pf = f64::from(p);
    let mut s = 0.0;
    let mut k = 1.0f64;
    loop {
        let t = (pf * k.ln() - k * k / nf).exp();
        s += t;
        if (t < s * 1e-18 && k * k > nf * pf) || k > 1e7 {
            return s.max(f64::MIN_POSITIVE);
        }
        k += 1.0;
    }
}

/// g(n,b) = Σ_{k≥1} k^b d(k) e^{−k²/n} truncated so the discarded tail is
/// below tol (d(k) ≤ k absorbs the divisor count into the power).  The
/// result carries tol's precision.
pub fn g_direct(n: u64, b: u32, tol: &HPReal) -> Result<HPReal> {
    if n == 0 {
        return Err(MelonError::Domain("g_direct requires n ≥ 1".into()));
    }
    let prec = tol.prec();
    let kmax = direct_cutoff(n, b + 1, tol.to_f64())?;
    let d = divisor_count_sieve(kmax);
    let wp = prec + 16;
    let e1 = HPReal::one(wp).div(&HPReal::from_u64(n, wp)).neg().exp();
    let e1sq = e1.mul(&e1);
    let mut t = e1.clone(); // e^{−k²/n} at the current k
    let mut u = e1.mul(&e1sq); // e^{−(2k+1)/n} stepping factor
    let mut acc = HPReal::zero(wp);
    for k in 1..=kmax {
        let weight = BigInt::from(k).pow(b) * BigInt::from(d[k]);
        acc = acc.add(&t.mul(&HPReal::from_bigint(&weight, wp)));
        t = t.mul(&u);
        u = u.mul(&e1sq);
    }
    Ok(acc.round_to(prec))
}

/// g(n,a,b) = Σ_{k,l≥1} k^a l^b d(gcd(k,l)) e^{−(k²+l²)/n} truncated per
/// index; the tail over either index is bounded by d(gcd(k,l)) ≤ min(k,l)
/// times the full f64-estimated sum over the other index.
pub fn g2_direct(n: u64, a: u32, b: u32, tol: &HPReal) -> Result<HPReal> {
    if n == 0 {
        return Err(MelonError::Domain("g2_direct requires n ≥ 1".into()));
    }
    let prec = tol.prec();
    let tolf = tol.to_f64();
    if !(tolf > 0.0) {
        return Err(MelonError::Domain("g2_direct requires tol > 0".into()));
    }
    let full_b = weighted_gaussian_sum_f64(n, b + 1);
    let full_a = weighted_gaussian_sum_f64(n, a + 1);
    let ka = direct_cutoff(n, a, tolf / (2.0 * full_b))?;
    let kb = direct_cutoff(n, b, tolf / (2.0 * full_a))?;
    let wp = prec + 16;
    // e^{−k²/n} for k up to the larger cutoff, by the odd-step recurrence
    let kmax = ka.max(kb);
    let e1 = HPReal::one(wp).div(&HPReal::from_u64(n, wp)).neg().exp();
    let e1sq = e1.mul(&e1);
    let mut gauss = Vec::with_capacity(kmax + 1);
    gauss.push(HPReal::one(wp));
    let mut t = e1.clone();
    let mut u = e1.mul(&e1sq);
    for _ in 1..=kmax {
        gauss.push(t.clone());
        t = t.mul(&u);
        u = u.mul(&e1sq);
    }
    let d = divisor_count_sieve(ka.min(kb));
    let dhp: Vec<HPReal> =
        d.iter().map(|&c| HPReal::from_u64(u64::from(c), wp)).collect();
    let row: Vec<HPReal> = (0..=ka)
        .map(|k| HPReal::from_bigint(&BigInt::from(k).pow(a), wp).mul(&gauss[k]))
        .collect();
    let col: Vec<HPReal> = (0..=kb)
        .map(|l| HPReal::from_bigint(&BigInt::from(l).pow(b), wp).mul(&gauss[l]))
        .collect();
    let mut acc = HPReal::zero(wp);
    for k in 1..=ka {
        let mut rowacc = HPReal::zero(wp);
        for l in 1..=kb {
            rowacc = rowacc.add(&col[l].mul(&dhp[k.gcd(&l)]));
        }
        acc = acc.add(&row[k].mul(&rowacc));
    }
    Ok(acc.round_to(prec))
}

// ─── residue expansions ─────────────────────────────────────────────────────

/// Residue expansion of g(n,b) for even b:
///
/// ```text
///   n^{(b+1)/2} Γ((b+1)/2) ( ¼ log n + ¼ ψ((b+1)/2) + γ )
///     + Σ_{m<corrections} n^{−m} ((−1)^m/m!) (B_{2m+b+1}/(2m+b+1))²,
/// ```
///
/// where every correction term vanishes except m = 0 at b = 0 (value ¼),
/// because odd-index Bernoulli numbers beyond B₁ are zero.  The error falls
/// faster than any power of n.
pub fn g_asym(n: u64, b: u32, corrections: u32, prec: usize) -> Result<(HPReal, GExpansion)> {
    if n == 0 {
        return Err(MelonError::Domain("g_asym requires n ≥ 1".into()));
    }
    if b % 2 != 0 {
        return Err(MelonError::Domain(
            "g_asym is derived for even exponents only; odd b is unsupported".into(),
        ));
    }
    let wp = prec + 16;
    // Γ((b+1)/2) = √π (b−1)!!/2^{b/2}: the rational part q feeds the
    // √(πn)-normalized coefficients directly.
    let q = BigRational::new(odd_double_factorial_below(b), BigInt::from(2).pow(b / 2));
    let q_over_4 = &q / BigInt::from(4);
    let psi = digamma_halfint(u64::from(b) + 1, wp)?;
    let gamma = gamma_euler(wp);
    let half_pow = i64::from(b / 2);
    let mut terms = vec![
        ExpansionTerm {
            n_power: half_pow,
            has_sqrt_pi_n: true,
            has_log_n: true,
            coefficient: hp_ratio(&q_over_4, wp),
            closed_form: format!("{q_over_4}"),
        },
        ExpansionTerm {
            n_power: half_pow,
            has_sqrt_pi_n: true,
            has_log_n: false,
            coefficient: hp_ratio(&q, wp)
                .mul(&psi.div(&HPReal::from_i64(4, wp)).add(&gamma)),
            closed_form: format!("({q})·(ψ({}/2)/4 + γ)", b + 1),
        },
    ];
    for m in 0..corrections {
        let idx = (2 * m + b + 1) as usize;
        let bern = bernoulli(idx);
        if bern.is_zero() {
            continue;
        }
        let v = bern / BigInt::from(idx);
        let mut val = &v * &v / fact(m);
        if m % 2 == 1 {
            val = -val;
        }
        terms.push(ExpansionTerm {
            n_power: -i64::from(m),
            has_sqrt_pi_n: false,
            has_log_n: false,
            coefficient: hp_ratio(&val, wp),
            closed_form: format!("{val}"),
        });
    }
    let expansion = GExpansion::new(terms, corrections)?;
    Ok((expansion.evaluate(n).round_to(prec), expansion))
}

/// Exact rational coefficient of n^{a+b+1} in the double-sum expansion:
/// π³ (2a)!(2b)!/(24·4^{a+b} a! b!), returned without the π³ factor.
pub fn g2_leading_ratio(a: u32, b: u32) -> BigRational {
    BigRational::new(
        fact(2 * a) * fact(2 * b),
        BigInt::from(24) * BigInt::from(4).pow(a + b) * fact(a) * fact(b),
    )
}

/// Residue expansion of g(n,2a,2b) in terms of the half-indices (a,b); the
/// leading term is π³·g2_leading_ratio·n^{a+b+1} in every case, and the
/// √(πn)-order term carries c_{a,b} from `constants`.  With both indices
/// positive the √(πn) coefficient follows `case`; the `Derived` variant also
/// includes the constant −1/8 at (0,0), which truncated summation confirms.
pub fn g2_asym(
    n: u64,
    a: u32,
    b: u32,
    constants: &dyn ConstantsSource,
    case: ThirdCase,
    prec: usize,
) -> Result<(HPReal, GExpansion)> {
    if n == 0 {
        return Err(MelonError::Domain("g2_asym requires n ≥ 1".into()));
    }
    let (a, b) = if a >= b { (a, b) } else { (b, a) };
    let wp = prec + 16;
    let c = constants.constants(a, b)?.c_ab.round_to(wp);
    let pi_cubed = HPReal::pi(wp).pow_i64(3);
    let gamma = gamma_euler(wp);
    let four = HPReal::from_i64(4, wp);
    let lead = g2_leading_ratio(a, b);
    let mut terms = vec![ExpansionTerm {
        n_power: i64::from(a + b + 1),
        has_sqrt_pi_n: false,
        has_log_n: false,
        coefficient: hp_ratio(&lead, wp).mul(&pi_cubed),
        closed_form: format!("({lead})·π³"),
    }];
    let mut order = 0;
    if b == 0 && a == 0 {
        let psi = digamma_halfint(1, wp)?;
        terms.push(ExpansionTerm {
            n_power: 0,
            has_sqrt_pi_n: true,
            has_log_n: true,
            coefficient: hp_ratio(&ratio(-1, 4), wp),
            closed_form: "−1/4".into(),
        });
        let bracket = HPReal::from_i64(2, wp)
            .mul(&c)
            .sub(&psi)
            .sub(&gamma.mul(&HPReal::from_i64(2, wp)));
        terms.push(ExpansionTerm {
            n_power: 0,
            has_sqrt_pi_n: true,
            has_log_n: false,
            coefficient: bracket.div(&four),
            closed_form: "(2c_{0,0} − ψ(1/2) − 2γ)/4".into(),
        });
        if case == ThirdCase::Derived {
            terms.push(ExpansionTerm {
                n_power: 0,
                has_sqrt_pi_n: false,
                has_log_n: false,
                coefficient: hp_ratio(&ratio(-1, 8), wp),
                closed_form: "−1/8".into(),
            });
            order = 1;
        }
    } else if b == 0 {
        // prefactor 2^{−2a−3} (2a)!/a!
        let pref = BigRational::new(fact(2 * a), BigInt::from(2).pow(2 * a + 3) * fact(a));
        let pref_hp = hp_ratio(&pref, wp);
        let psi = digamma_halfint(2 * u64::from(a) + 1, wp)?;
        terms.push(ExpansionTerm {
            n_power: i64::from(a),
            has_sqrt_pi_n: true,
            has_log_n: true,
            coefficient: pref_hp.neg(),
            closed_form: format!("−({pref})"),
        });
        let bracket =
            four.mul(&c).sub(&psi).sub(&gamma.mul(&HPReal::from_i64(2, wp)));
        terms.push(ExpansionTerm {
            n_power: i64::from(a),
            has_sqrt_pi_n: true,
            has_log_n: false,
            coefficient: pref_hp.mul(&bracket),
            closed_form: format!("({pref})·(4c_{{{a},0}} − ψ({a}+1/2) − 2γ)"),
        });
    } else {
        let coef = match case {
            ThirdCase::Derived => {
                // (2a+2b)!/(2·4^{a+b}(a+b)!)
                BigRational::new(
                    fact(2 * (a + b)),
                    BigInt::from(2) * BigInt::from(4).pow(a + b) * fact(a + b),
                )
            }
            ThirdCase::Printed => {
                // 2^{−2a−2b−3}(2a)!(2b)!/(a!b!) · 4 · (2a+2b)!/(a+b)!
                BigRational::new(
                    BigInt::from(4) * fact(2 * a) * fact(2 * b) * fact(2 * (a + b)),
                    BigInt::from(2).pow(2 * (a + b) + 3) * fact(a) * fact(b) * fact(a + b),
                )
            }
        };
        terms.push(ExpansionTerm {
            n_power: i64::from(a + b),
            has_sqrt_pi_n: true,
            has_log_n: false,
            coefficient: hp_ratio(&coef, wp).mul(&c),
            closed_form: format!("({coef})·c_{{{a},{b}}}"),
        });
    }
    let expansion = GExpansion::new(terms, order)?;
    Ok((expansion.evaluate(n).round_to(prec), expansion))
}

// ─── asymptotic S-combinations ──────────────────────────────────────────────

/// Coefficient table for the single-sum combination: rows of
/// (b, [c₂, c₁, c₀], common denominator, power of n dividing the row), read
/// as (c₂n² + c₁n + c₀)/(den·n^pow) · g(n,b).
const S1_ASYM_ROWS: &[(u32, [i64; 3], i64, u32)] = &[
    (0, [-96, -480, -2136], 1, 3),
    (2, [384, 4260, 14624], 1, 4),
    (4, [-288, -4060, -12213], 1, 5),
    (6, [64, 856, 2680], 1, 6),
    (8, [0, -96, -521], 3, 7),
    (10, [0, 0, 10], 3, 8),
];

/// Asymptotic form of the single S-sum, assembled from the residue
/// expansions of g(n,b) for b = 0, 2, …, 10 with polynomial-in-n weights.
pub fn big_s1_asym(n: u64, prec: usize) -> Result<HPReal> {
    if n == 0 {
        return Err(MelonError::Domain("big_s1_asym requires n ≥ 1".into()));
    }
    let wp = prec + 16;
    let nq = BigInt::from(n);
    let mut acc = HPReal::zero(wp);
    for &(b, [c2, c1, c0], den, pow) in S1_ASYM_ROWS {
        let poly = BigInt::from(c2) * &nq * &nq + BigInt::from(c1) * &nq + BigInt::from(c0);
        let weight = BigRational::new(poly, BigInt::from(den) * nq.pow(pow));
        let g = g_asym(n, b, 1, wp)?.0;
        acc = acc.add(&hp_ratio(&weight, wp).mul(&g));
    }
    Ok(acc.round_to(prec))
}

/// Coefficient table for the double-sum combination: groups of raw even
/// index pairs (α, β) with weights Σ num/(den·n^pow) multiplying g(n,α,β).
/// The overall factor 1/2 of the combination is folded into the numerators.
const S2_ASYM_GROUPS: &[(u32, u32, &[(i64, i64, u32)])] = &[
    (0, 0, &[(-96, 1, 4), (816, 1, 5), (-4368, 1, 6)]),
    (2, 0, &[(768, 1, 5), (-8928, 1, 6), (61744, 1, 7)]),
    (2, 2, &[(-576, 1, 6), (9216, 1, 7), (-80744, 1, 8)]),
    (4, 0, &[(-576, 1, 6), (10336, 1, 7), (-99336, 1, 8)]),
    (4, 2, &[(384, 1, 7), (-10784, 1, 8), (138128, 1, 9)]),
    (4, 4, &[(256, 1, 8), (-3936, 1, 9), (29184, 1, 10)]),
    (6, 0, &[(128, 1, 7), (-4192, 1, 8), (300624, 5, 9)]),
    (6, 2, &[(-256, 1, 8), (6848, 1, 9), (-1517888, 15, 10)]),
    (6, 4, &[(2432, 3, 10), (-62368, 5, 11)]),
    (6, 6, &[(128, 3, 11), (-208, 15, 12)]),
    (8, 0, &[(544, 1, 9), (-225488, 15, 10)]),
    (8, 2, &[(-960, 1, 10), (398912, 15, 11)]),
    (8, 4, &[(-256, 3, 11), (31736, 15, 12)]),
    (8, 6, &[(1328, 45, 13)]),
    (8, 8, &[(64, 9, 14)]),
    (10, 0, &[(-64, 3, 10), (8672, 5, 11)]),
    (10, 2, &[(128, 3, 11), (-47504, 15, 12)]),
    (10, 4, &[(-7856, 45, 13)]),
    (10, 6, &[(-32, 3, 14)]),
    (12, 0, &[(-456, 5, 12)]),
    (12, 2, &[(2576, 15, 13)]),
    (12, 4, &[(64, 9, 14)]),
    (14, 0, &[(16, 9, 13)]),
    (14, 2, &[(-32, 9, 14)]),
];

/// Asymptotic form of the double S-sum: the weighted combination of
/// g(n, even, even) with the expansions supplied by `g2_asym` (derived
/// third-case coefficients).  Needs c_{a,b} for every half-index pair up to
/// (7,1), so `constants` is typically a quadrature-backed source.
pub fn big_s2_asym(n: u64, constants: &dyn ConstantsSource, prec: usize) -> Result<HPReal> {
    if n == 0 {
        return Err(MelonError::Domain("big_s2_asym requires n ≥ 1".into()));
    }
    let wp = prec + 16;
    let nq = BigInt::from(n);
    let mut acc = HPReal::zero(wp);
    for &(alpha, beta, weights) in S2_ASYM_GROUPS {
        let mut weight = BigRational::zero();
        for &(num, den, pow) in weights {
            weight += BigRational::new(BigInt::from(num), BigInt::from(den) * nq.pow(pow));
        }
        let g = g2_asym(n, alpha / 2, beta / 2, constants, ThirdCase::Derived, wp)?.0;
        acc = acc.add(&hp_ratio(&weight, wp).mul(&g));
    }
    Ok(acc.round_to(prec))
}

/// (n+1)(n+2)/(12(2n+1)) — the prefactor shared by both height parts.
fn height_prefactor(n: u64) -> BigRational {
    let nq = BigInt::from(n);
    BigRational::new(
        (&nq + BigInt::one()) * (&nq + BigInt::from(2)),
        BigInt::from(12) * (BigInt::from(2) * &nq + BigInt::one()),
    )
}

/// First part of the p = 2 height asymptotics:
/// (n+1)(n+2)/(12(2n+1)) · big_s1_asym(n) → (11/6)√(πn) − 1.
pub fn h2_first_part(n: u64, prec: usize) -> Result<HPReal> {
    let wp = prec + 16;
    let s1 = big_s1_asym(n, wp)?;
    Ok(hp_ratio(&height_prefactor(n), wp).mul(&s1).round_to(prec))
}

/// Second part: (n+1)(n+2)/(12(2n+1)) · (n+1)(n+2)(n+3) · big_s2_asym(n)
/// → √(πn)(K − 11/6) + 1/2 with K from `h2_coefficient`; all log n terms
/// cancel in the combination.
pub fn h2_second_part(n: u64, constants: &dyn ConstantsSource, prec: usize) -> Result<HPReal> {
    let wp = prec + 16;
    let s2 = big_s2_asym(n, constants, wp)?;
    let nq = BigInt::from(n);
    let rising = (&nq + BigInt::one()) * (&nq + BigInt::from(2)) * (&nq + BigInt::from(3));
    let pref = height_prefactor(n) * BigRational::from(rising);
    Ok(hp_ratio(&pref, wp).mul(&s2).round_to(prec))
}

// ─── average-height asymptotics ─────────────────────────────────────────────

/// Asymptotic average height of a single wall-bounded path: √(πn) − 3/2.
pub fn h1_asym(n: u64, prec: usize) -> HPReal {
    let wp = prec + 16;
    HPReal::pi(wp)
        .mul(&HPReal::from_u64(n, wp))
        .sqrt()
        .sub(&ratio_hp(3, 2, wp))
        .round_to(prec)
}

fn ratio_hp(num: i64, den: i64, wp: usize) -> HPReal {
    HPReal::from_i64(num, wp).div(&HPReal::from_i64(den, wp))
}

/// Integer multipliers on the c_{a,b} making up the √(πn)-coefficient of the
/// p = 2 average height.
pub const H2_COEFFICIENT_MULTIPLIERS: &[(u32, u32, i64)] = &[
    (0, 0, -2),
    (1, 0, 8),
    (1, 1, -9),
    (2, 0, -9),
    (2, 1, 15),
    (2, 2, 35),
    (3, 0, 5),
    (3, 1, -35),
];

/// K = −2c₀₀ + 8c₁₀ − 9c₁₁ − 9c₂₀ + 15c₂₁ + 35c₂₂ + 5c₃₀ − 35c₃₁ with the
/// additive constant −2, so the displayed asymptotic is K·√(πn) − 2.  (The
/// assembled first and second parts actually sum to K·√(πn) − 3/2; `verify`
/// reports on that without overriding the displayed constant.)
pub fn h2_coefficient(constants: &dyn ConstantsSource) -> Result<AsymptoticCoefficient> {
    let mut k: Option<HPReal> = None;
    for &(a, b, mult) in H2_COEFFICIENT_MULTIPLIERS {
        let c = constants.constants(a, b)?.c_ab;
        let wp = c.prec();
        let contrib = HPReal::from_i64(mult, wp).mul(&c);
        k = Some(match k {
            None => contrib,
            Some(acc) => acc.add(&contrib),
        });
    }
    let k = k.expect("multiplier table is nonempty");
    let constant = HPReal::from_i64(-2, k.prec());
    Ok(AsymptoticCoefficient {
        k,
        constant,
        multipliers: H2_COEFFICIENT_MULTIPLIERS.to_vec(),
    })
}

/// K·√(πn) + constant for a coefficient produced by `h2_coefficient`.
pub fn h2_asym(n: u64, coeff: &AsymptoticCoefficient, prec: usize) -> HPReal {
    let wp = prec + 16;
    let sqrt_pi_n = HPReal::pi(wp).mul(&HPReal::from_u64(n, wp)).sqrt();
    coeff.k.round_to(wp).mul(&sqrt_pi_n).add(&coeff.constant.round_to(wp)).round_to(prec)
}

/// The five-digit display form of K·√π used to normalize convergence data.
pub const DISPLAY_SQRT_COEFF: &str = "2.57758";

/// q(n) = H(n,2) / (2.57758·√n − 2), the convergence ratio against the
/// five-digit display coefficient (kept literal on purpose: q is defined
/// relative to the displayed normalization, not to the full-precision K).
/// H(n,2) is taken from the exact summation route in high-precision mode.
pub fn convergence_ratio(n: u64, prec: usize) -> Result<HPReal> {
    let wp = prec + 16;
    let h = crate::sums::avg_height2_sum(n, crate::sums::SumMode::HighPrecision { prec_bits: wp })?
        .to_hp(wp);
    let coeff = HPReal::parse(DISPLAY_SQRT_COEFF, wp)?;
    let denom = coeff
        .mul(&HPReal::from_u64(n, wp).sqrt())
        .sub(&HPReal::from_i64(2, wp));
    Ok(h.div(&denom).round_to(prec))
}
