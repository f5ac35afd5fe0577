//! Special functions: Bernoulli numbers, digamma at (half-)integers, zeta
//! values, gamma via the Stirling series, the theta function
//! θ̄(u) = ∑_{n∈ℤ} e^{−πn²u} with its u-derivatives, adaptive quadrature on
//! [1, ∞) for exponentially decaying integrands, and the Stirling-series
//! approximation of central binomial quotients.

use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{MelonError, Result};
use crate::exact::binomial;
use crate::hp::HPReal;

// ─── Bernoulli numbers ─────────────────────────────────────────────────────

static BERNOULLI_CACHE: RwLock<Vec<BigRational>> = RwLock::new(Vec::new());

/// Exact Bernoulli number B_k (convention B₁ = −1/2), memoized.
///
/// Computed by the recurrence ∑_{j=0}^{m} binom(m+1, j) B_j = 0 (m ≥ 1).
pub fn bernoulli(k: usize) -> BigRational {
    {
        let cache = BERNOULLI_CACHE.read().expect("bernoulli cache poisoned");
        if let Some(b) = cache.get(k) {
            return b.clone();
        }
    }
    let mut cache = BERNOULLI_CACHE.write().expect("bernoulli cache poisoned");
    while cache.len() <= k {
        let m = cache.len();
        if m == 0 {
            cache.push(BigRational::one());
            continue;
        }
        let mut acc = BigRational::zero();
        for (j, bj) in cache.iter().enumerate() {
            if !bj.is_zero() {
                acc += BigRational::from_integer(binomial(m as i64 + 1, j as i64)) * bj;
            }
        }
        let bm = -acc / BigRational::from_integer(BigInt::from(m + 1));
        cache.push(bm);
    }
    cache[k].clone()
}

// ─── Euler–Mascheroni constant ─────────────────────────────────────────────

/// γ to 60 significant digits.
const GAMMA_LITERAL: &str = "0.577215664901532860606512090082402431042159335939923598805767";

static GAMMA_VALIDATED: OnceLock<()> = OnceLock::new();

/// Independent computation of γ from the limit definition
/// γ = lim (H_N − ln N), accelerated with Euler–Maclaurin corrections.
fn gamma_from_limit(prec: usize) -> HPReal {
    let n = 100u64;
    let mut h = BigRational::zero();
    for j in 1..=n {
        h += BigRational::new(BigInt::one(), BigInt::from(j));
    }
    // γ = H_N − ln N − 1/(2N) + ∑_{k≥1} B_{2k}/(2k N^{2k})
    let mut g = HPReal::from_ratio(&h, prec)
        .sub(&HPReal::from_u64(n, prec).ln())
        .sub(&HPReal::from_ratio(&BigRational::new(BigInt::one(), BigInt::from(2 * n)), prec));
    for k in 1..=6usize {
        let c = bernoulli(2 * k)
            / (BigRational::from_integer(BigInt::from(2 * k)) * BigRational::from_integer(BigInt::from(n).pow(2 * k as u32)));
        g = g.add(&HPReal::from_ratio(&c, prec));
    }
    g
}

/// Euler–Mascheroni constant γ, from a 60-digit literal.
///
/// On first use the literal is validated to 10⁻¹² against an independent
/// limit-definition computation. Accurate to ~60 digits (≈199 bits); all
/// precisions used in this project stay below that.
pub fn gamma_euler(prec: usize) -> HPReal {
    GAMMA_VALIDATED.get_or_init(|| {
        let lit = HPReal::parse(GAMMA_LITERAL, 128).expect("gamma literal parses");
        let check = gamma_from_limit(128);
        let diff = lit.sub(&check).abs();
        let tol = HPReal::from_f64(1e-12, 128);
        assert!(
            diff.cmp_val(&tol) == std::cmp::Ordering::Less,
            "Euler–Mascheroni literal fails validation: |lit − limit| = {}",
            diff.to_f64()
        );
    });
    HPReal::parse(GAMMA_LITERAL, prec).expect("gamma literal parses")
}

// ─── digamma and zeta ──────────────────────────────────────────────────────

/// ψ(z) at z = two_z/2 for a positive integer `two_z`, via the closed forms
/// ψ(1) = −γ, ψ(1/2) = −γ − 2 ln 2 and the recurrence ψ(z+1) = ψ(z) + 1/z.
pub fn digamma_halfint(two_z: u64, prec: usize) -> Result<HPReal> {
    if two_z < 1 {
        return Err(MelonError::Domain(format!("digamma_halfint requires two_z >= 1, got {two_z}")));
    }
    let g = gamma_euler(prec);
    if two_z % 2 == 0 {
        // z = m: ψ(m) = −γ + H_{m−1}
        let m = two_z / 2;
        let mut h = BigRational::zero();
        for j in 1..m {
            h += BigRational::new(BigInt::one(), BigInt::from(j));
        }
        Ok(HPReal::from_ratio(&h, prec).sub(&g))
    } else {
        // z = m + 1/2: ψ(z) = −γ − 2 ln 2 + ∑_{j=0}^{m−1} 2/(2j+1)
        let m = (two_z - 1) / 2;
        let mut h = BigRational::zero();
        for j in 0..m {
            h += BigRational::new(BigInt::from(2), BigInt::from(2 * j + 1));
        }
        let two_ln2 = HPReal::ln2(prec).add(&HPReal::ln2(prec));
        Ok(HPReal::from_ratio(&h, prec).sub(&g).sub(&two_ln2))
    }
}

/// ζ(−m) = −B_{m+1}/(m+1), exactly. ζ(0) = −1/2, ζ(−2j) = 0 for j ≥ 1.
pub fn zeta_neg_int(m: usize) -> BigRational {
    if m == 0 {
        // the formula needs the B₁ = +1/2 convention here; B₁ is the only
        // Bernoulli number where the two conventions differ
        return BigRational::new(BigInt::from(-1), BigInt::from(2));
    }
    -bernoulli(m + 1) / BigRational::from_integer(BigInt::from(m + 1))
}

/// ζ(s) for real s > 1 to within `tol`, by direct summation with an
/// Euler–Maclaurin tail:
/// ζ(s) = ∑_{k<N} k^{−s} + N^{−s}/2 + N^{1−s}/(s−1)
///        + ∑_j B_{2j}/(2j)! · s(s+1)⋯(s+2j−2) · N^{1−s−2j}.
pub fn zeta_real(s: &HPReal, tol: &HPReal) -> Result<HPReal> {
    let prec = s.prec().max(96);
    let one = HPReal::one(prec);
    if s.cmp_val(&one) != std::cmp::Ordering::Greater {
        return Err(MelonError::Domain(format!("zeta_real requires s > 1, got {}", s.to_f64())));
    }
    if tol.is_zero() || tol.is_negative() {
        return Err(MelonError::Domain("zeta_real requires tol > 0".into()));
    }
    let wp = prec + 32;
    let s_w = s.round_to(wp);
    let s_neg = s_w.neg();
    let tol_w = tol.round_to(wp);
    let mut n = 24u64;
    for _attempt in 0..8 {
        let nf = HPReal::from_u64(n, wp);
        let mut acc = HPReal::zero(wp);
        for k in 1..n {
            acc = acc.add(&HPReal::from_u64(k, wp).pow(&s_neg));
        }
        let n_pow = nf.pow(&s_neg); // N^{−s}
        acc = acc.add(&n_pow.div(&HPReal::from_i64(2, wp)));
        acc = acc.add(&n_pow.mul(&nf).div(&s_w.sub(&HPReal::one(wp)))); // N^{1−s}/(s−1)
        // Euler–Maclaurin corrections
        let mut rising = s_w.clone(); // s(s+1)⋯(s+2j−2), starting at j=1
        let mut npow = n_pow.div(&nf); // N^{1−s−2j}, starting at j=1
        let mut fact = BigInt::from(2); // (2j)!
        let mut prev_mag: Option<HPReal> = None;
        let mut converged = false;
        for j in 1..200usize {
            let coef = bernoulli(2 * j) / BigRational::from_integer(fact.clone());
            let term = HPReal::from_ratio(&coef, wp).mul(&rising).mul(&npow);
            let mag = term.abs();
            if let Some(p) = &prev_mag {
                if mag.cmp_val(p) == std::cmp::Ordering::Greater {
                    break; // asymptotic series started diverging; restart with larger N
                }
            }
            acc = acc.add(&term);
            if mag.cmp_val(&tol_w) == std::cmp::Ordering::Less {
                converged = true;
                break;
            }
            prev_mag = Some(mag);
            rising = rising.mul(&s_w.add(&HPReal::from_u64(2 * j as u64 - 1, wp)));
            rising = rising.mul(&s_w.add(&HPReal::from_u64(2 * j as u64, wp)));
            npow = npow.div(&nf).div(&nf);
            fact *= BigInt::from(2 * j + 1) * BigInt::from(2 * j + 2);
        }
        if converged {
            return Ok(acc.round_to(prec));
        }
        n *= 2;
    }
    Err(MelonError::Numeric(format!(
        "zeta_real failed to reach tol {} for s = {}",
        tol.to_f64(),
        s.to_f64()
    )))
}

// ─── gamma function via Stirling ───────────────────────────────────────────

/// Γ(m + 1/2) = (2m)! √π / (4^m m!), the closed half-integer form.
pub fn gamma_half(m: u32, prec: usize) -> HPReal {
    let num: BigInt = (1..=2 * m as u64).map(BigInt::from).product();
    let den: BigInt = BigInt::from(4).pow(m) * (1..=m as u64).map(BigInt::from).product::<BigInt>();
    HPReal::from_ratio(&BigRational::new(num, den), prec).mul(&HPReal::pi(prec).sqrt())
}

fn ln_two_pi_half(prec: usize) -> HPReal {
    // ln(2π)/2
    HPReal::pi(prec)
        .mul(&HPReal::from_i64(2, prec))
        .ln()
        .div(&HPReal::from_i64(2, prec))
}

/// Truncated Stirling series for log Γ(z), z ≥ 10:
/// (z − 1/2) ln z − z + ln(2π)/2 + ∑_{j=1}^{terms} B_{2j}/((2j)(2j−1)) z^{1−2j}.
pub fn log_gamma_asym(z: &HPReal, terms: usize) -> Result<HPReal> {
    let prec = z.prec();
    if z.cmp_val(&HPReal::from_i64(10, prec)) == std::cmp::Ordering::Less {
        return Err(MelonError::Domain(format!(
            "log_gamma_asym requires z >= 10, got {}",
            z.to_f64()
        )));
    }
    let wp = prec + 32;
    let zw = z.round_to(wp);
    let half = HPReal::from_ratio(&BigRational::new(BigInt::one(), BigInt::from(2)), wp);
    let mut acc = zw.sub(&half).mul(&zw.ln()).sub(&zw).add(&ln_two_pi_half(wp));
    let z2 = zw.mul(&zw);
    let mut zpow = zw.recip(); // z^{1−2j}, starting at j=1
    for j in 1..=terms {
        let c = bernoulli(2 * j) / BigRational::from_integer(BigInt::from((2 * j) * (2 * j - 1)));
        acc = acc.add(&HPReal::from_ratio(&c, wp).mul(&zpow));
        zpow = zpow.div(&z2);
    }
    Ok(acc.round_to(prec))
}

/// Stirling series with the term count chosen adaptively for the working
/// precision (stops once a term drops below the target, or at the smallest
/// term if the divergent tail is reached first).
fn log_gamma_asym_auto(z: &HPReal, wp: usize) -> HPReal {
    let half = HPReal::from_ratio(&BigRational::new(BigInt::one(), BigInt::from(2)), wp);
    let mut acc = z.sub(&half).mul(&z.ln()).sub(z).add(&ln_two_pi_half(wp));
    let z2 = z.mul(z);
    let mut zpow = z.recip();
    let floor = HPReal::from_i64(2, wp).pow_i64(-(wp as i64) - 8).mul(&acc.abs().max_val(&HPReal::one(wp)));
    let mut prev_mag: Option<HPReal> = None;
    for j in 1..400usize {
        let c = bernoulli(2 * j) / BigRational::from_integer(BigInt::from((2 * j) * (2 * j - 1)));
        let term = HPReal::from_ratio(&c, wp).mul(&zpow);
        let mag = term.abs();
        if let Some(p) = &prev_mag {
            if mag.cmp_val(p) == std::cmp::Ordering::Greater {
                break;
            }
        }
        acc = acc.add(&term);
        if mag.cmp_val(&floor) == std::cmp::Ordering::Less {
            break;
        }
        prev_mag = Some(mag);
        zpow = zpow.div(&z2);
    }
    acc
}

/// Shift threshold: the Stirling tail at z reaches ~e^{−2πz}, so z must be
/// large enough that the optimally-truncated series meets the precision.
fn stirling_threshold(wp: usize) -> i64 {
    let z = (wp as f64) * std::f64::consts::LN_2 / (2.0 * std::f64::consts::PI) + 4.0;
    (z.ceil() as i64).max(16)
}

/// log Γ(z) for real z > 0 at `prec` bits: argument shifted up until the
/// Stirling series converges to the target, then corrected by −∑ ln(z+i).
pub fn log_gamma(z: &HPReal, prec: usize) -> Result<HPReal> {
    let wp = prec + 32;
    if z.is_zero() || z.is_negative() {
        return Err(MelonError::Domain(format!("log_gamma requires z > 0, got {}", z.to_f64())));
    }
    let zw = z.round_to(wp);
    let zb = stirling_threshold(wp);
    let shift = (zb as f64 - zw.to_f64()).ceil().max(0.0) as i64;
    let mut corr = HPReal::zero(wp);
    for i in 0..shift {
        corr = corr.add(&zw.add(&HPReal::from_i64(i, wp)).ln());
    }
    let w = zw.add(&HPReal::from_i64(shift, wp));
    Ok(log_gamma_asym_auto(&w, wp).sub(&corr).round_to(prec))
}

/// 1/Γ(s) for real s, as an entire function: exactly zero at s = 0, −1, −2, …
/// and 1/Γ(s) = (s)(s+1)⋯(s+m−1) / Γ(s+m) elsewhere, with the shift m chosen
/// so the Stirling series for Γ(s+m) converges to the working precision.
pub fn recip_gamma(s: &HPReal, prec: usize) -> HPReal {
    let q = s.to_ratio();
    if q.is_integer() && !q.numer().is_positive() {
        return HPReal::zero(prec);
    }
    let wp = prec + 32;
    let sw = s.round_to(wp);
    let zb = stirling_threshold(wp);
    let shift = (zb as f64 - sw.to_f64()).ceil().max(0.0) as i64;
    let mut prod = HPReal::one(wp);
    for i in 0..shift {
        prod = prod.mul(&sw.add(&HPReal::from_i64(i, wp)));
    }
    let w = sw.add(&HPReal::from_i64(shift, wp));
    prod.mul(&log_gamma_asym_auto(&w, wp).neg().exp()).round_to(prec)
}

// ─── theta function θ̄ and derivatives ──────────────────────────────────────

/// Truncation control for the theta series.
#[derive(Debug, Clone)]
pub struct ThetaSeriesParams {
    /// Stop once the next term magnitude drops below this (and the monotone
    /// guard below holds).
    pub tol: HPReal,
    /// Hard cap on summation index; exceeding it is a numeric error.
    pub n_max: usize,
}

impl ThetaSeriesParams {
    /// Tolerance 2^{−(prec+16)} with a generous term cap.
    pub fn for_precision(prec: usize) -> Self {
        ThetaSeriesParams {
            tol: HPReal::from_i64(2, prec).pow_i64(-(prec as i64) - 16),
            n_max: 100_000,
        }
    }
}

/// All of θ̄(u), θ̄₁(u), …, θ̄_A(u) in one pass (one `exp`, shared powers).
/// Index 0 holds the full θ̄(u) = 1 + 2∑ e^{−πn²u}; index a ≥ 1 holds
/// θ̄_a(u) = 2 ∑ (−πn²)^a e^{−πn²u}.
pub(crate) fn theta_bar_all(max_a: u32, u: &HPReal, params: &ThetaSeriesParams) -> Result<Vec<HPReal>> {
    if u.is_zero() || u.is_negative() {
        return Err(MelonError::Domain(format!("theta requires u > 0, got {}", u.to_f64())));
    }
    let prec = u.prec().max(params.tol.prec());
    let wp = prec + 16;
    let uw = u.round_to(wp);
    let pi = HPReal::pi(wp);
    let e1 = pi.neg().mul(&uw).exp(); // e^{−πu}
    let e2 = e1.mul(&e1);
    let mut cur = e1.clone(); // e^{−πn²u}
    let mut step = e1.mul(&e2); // e^{−π(2n+1)u}
    let mut sums = vec![HPReal::zero(wp); max_a as usize + 1];
    let u_f = uw.to_f64();
    let pi_f = std::f64::consts::PI;
    let mut n = 1u64;
    loop {
        // worst-converging component is a = max_a: (πn²)^{max_a} e^{−πn²u}
        let n2 = HPReal::from_u64(n * n, wp);
        let pin2 = pi.mul(&n2);
        let mut factor = HPReal::one(wp);
        for (a, sum) in sums.iter_mut().enumerate() {
            let term = factor.mul(&cur);
            *sum = sum.add(&term);
            if a < max_a as usize {
                factor = factor.mul(&pin2);
            }
        }
        let worst = factor.mul(&cur);
        if worst.cmp_val(&params.tol) == std::cmp::Ordering::Less
            && n >= 3
            && pi_f * (n * n) as f64 * u_f > max_a as f64
        {
            break;
        }
        n += 1;
        if n as usize > params.n_max {
            return Err(MelonError::Numeric(format!(
                "theta series did not converge within {} terms (u = {})",
                params.n_max,
                u.to_f64()
            )));
        }
        cur = cur.mul(&step);
        step = step.mul(&e2);
    }
    let two = HPReal::from_i64(2, wp);
    let mut out = Vec::with_capacity(sums.len());
    for (a, sum) in sums.iter().enumerate() {
        let mut v = two.mul(sum);
        if a == 0 {
            v = v.add(&HPReal::one(wp));
        } else if a % 2 == 1 {
            v = v.neg(); // (−πn²)^a carries sign (−1)^a
        }
        out.push(v.round_to(prec));
    }
    Ok(out)
}

/// θ̄(u) = 1 + 2 ∑_{n≥1} e^{−πn²u}.
pub fn theta_bar(u: &HPReal, params: &ThetaSeriesParams) -> Result<HPReal> {
    Ok(theta_bar_all(0, u, params)?.pop().expect("one component"))
}

/// a-th u-derivative θ̄_a(u) = 2 ∑_{n≥1} (−πn²)^a e^{−πn²u} for a ≥ 1;
/// equals θ̄(u) for a = 0.
pub fn theta_bar_deriv(a: u32, u: &HPReal, params: &ThetaSeriesParams) -> Result<HPReal> {
    Ok(theta_bar_all(a, u, params)?.swap_remove(a as usize))
}

// ─── quadrature on [1, ∞) ──────────────────────────────────────────────────

/// Result of a quadrature, with the error bound and whether it is rigorous
/// (here always heuristic: the tail coefficient is sampled, and the rule
/// error is estimated from the last level-to-level difference).
#[derive(Debug, Clone)]
pub struct QuadResult {
    pub value: HPReal,
    pub error_bound: HPReal,
    pub rigorous: bool,
}

/// One symmetric node pair of the tanh–sinh map x = c + d·tanh((π/2) sinh t)
/// on [c − d, c + d]: returns (x at +t, x at −t, common weight), everything
/// derived from a single exponential of t.
fn de_node(t: &HPReal, c: &HPReal, d: &HPReal, pi_half: &HPReal, wp: usize) -> (HPReal, HPReal, HPReal) {
    let two = HPReal::from_i64(2, wp);
    let e = t.exp();
    let einv = e.recip();
    let sinh_t = e.sub(&einv).div(&two);
    let cosh_t = e.add(&einv).div(&two);
    let arg = pi_half.mul(&sinh_t);
    let p = arg.exp();
    let pinv = p.recip();
    let denom = p.add(&pinv);
    let cosh_arg = denom.div(&two);
    let tanh_arg = p.sub(&pinv).div(&denom);
    let dx = d.mul(&tanh_arg);
    let weight = pi_half.mul(&cosh_t).mul(d).div(&cosh_arg.mul(&cosh_arg));
    (c.add(&dx), c.sub(&dx), weight)
}

/// ∫₁^∞ f(t) dt for integrands bounded by C·t^q·e^{−πt} (theta tails times
/// powers). The cutoff U is chosen from that bound so the tail is < tol/2;
/// [1, U] is integrated by the tanh–sinh rule, whose truncated trapezoid
/// levels converge double-exponentially for integrands analytic on the
/// interval. `growth_pow` is q; the coefficient C is sampled at a few points.
pub fn integrate_one_to_inf(
    f: &dyn Fn(&HPReal) -> HPReal,
    tol: &HPReal,
    growth_pow: i64,
    prec: usize,
) -> Result<QuadResult> {
    if tol.is_zero() || tol.is_negative() {
        return Err(MelonError::Domain("integrate_one_to_inf requires tol > 0".into()));
    }
    let wp = prec + 16;
    let pi = HPReal::pi(wp);
    // sample the decay coefficient: C ≈ max |f(t)| e^{πt} / t^q
    let mut c_est = HPReal::zero(wp);
    for t in [1i64, 2, 4, 8] {
        let th = HPReal::from_i64(t, wp);
        let v = f(&th).abs().mul(&pi.mul(&th).exp()).div(&th.pow_i64(growth_pow));
        c_est = c_est.max_val(&v);
    }
    c_est = c_est.mul(&HPReal::from_i64(4, wp)); // safety margin on the sampled bound
    let half_tol = tol.div(&HPReal::from_i64(2, wp)).round_to(wp);
    // smallest integer U ≥ max(4, q) with 2 C U^q e^{−πU}/π ≤ tol/2
    let mut u = 4i64.max(growth_pow);
    loop {
        let uh = HPReal::from_i64(u, wp);
        let tail = HPReal::from_i64(2, wp)
            .mul(&c_est)
            .mul(&uh.pow_i64(growth_pow))
            .mul(&pi.neg().mul(&uh).exp())
            .div(&pi);
        if tail.cmp_val(&half_tol) != std::cmp::Ordering::Greater {
            // Truncate the trapezoid sum at |t| = T, where the weights have
            // decayed like exp(−(π/2)e^T). T is scanned on a 1/16 grid (so
            // T and every step T/2^m are exact binary values) until the
            // discarded portion sits far below tolerance.
            let tolf = half_tol.to_f64().max(1e-300);
            let need = (8.0 / tolf).ln() + 2.0;
            let mut tf = 3.0f64;
            while std::f64::consts::FRAC_PI_2 * tf.sinh() - tf < need {
                tf += 0.0625;
            }
            let two = HPReal::from_i64(2, wp);
            let one = HPReal::one(wp);
            let c = one.add(&uh).div(&two);
            let d = uh.sub(&one).div(&two);
            let pi_half = pi.div(&two);
            // level 0: nodes t = 0, ±T with step h = T
            let t_hp = HPReal::from_f64(tf, wp);
            let (xp, xm, w) = de_node(&t_hp, &c, &d, &pi_half, wp);
            let g0 = pi_half.mul(&d).mul(&f(&c));
            let mut s = t_hp.mul(&g0.add(&w.mul(&f(&xp).add(&f(&xm)))));
            // level m halves the step and adds the odd multiples of it;
            // S_m = S_{m−1}/2 + h_m Σ_new. Stop when two consecutive
            // levels agree to tolerance (the true error is then far
            // smaller than the observed difference).
            for m in 1..=12u32 {
                let h = tf / f64::powi(2.0, m as i32);
                let h_hp = HPReal::from_f64(h, wp);
                let mut new_sum = HPReal::zero(wp);
                let mut j = 1u64;
                while (j as f64) * h <= tf {
                    let t = h_hp.mul(&HPReal::from_u64(j, wp));
                    let (xp, xm, w) = de_node(&t, &c, &d, &pi_half, wp);
                    new_sum = new_sum.add(&w.mul(&f(&xp).add(&f(&xm))));
                    j += 2;
                }
                let s_next = s.div(&two).add(&h_hp.mul(&new_sum));
                let diff = s_next.sub(&s).abs();
                s = s_next;
                if m >= 3 && diff.cmp_val(&half_tol) != std::cmp::Ordering::Greater {
                    let bound = diff.add(&tail);
                    return Ok(QuadResult {
                        value: s.round_to(prec),
                        error_bound: bound.round_to(prec),
                        rigorous: false,
                    });
                }
            }
            return Err(MelonError::Numeric(format!(
                "quadrature levels exhausted before reaching tolerance; partial result {}",
                s.to_decimal_string(20),
            )));
        }
        u += 1;
        if u > 400 {
            return Err(MelonError::Numeric(
                "quadrature tail cutoff exceeded U = 400; integrand decays too slowly".into(),
            ));
        }
    }
}

// ─── binomial quotient approximation ───────────────────────────────────────

/// Truncation order for `binom_quotient_approx`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApproxOrder {
    /// First `g` exponent groups (1 ≤ g ≤ 7, ordered n¹, n⁰, n^{−1}, n^{−3},
    /// n^{−5}, n^{−7}, n^{−9}), each x-series carried through x¹⁴.
    Groups(u8),
    /// All seven groups with every x-series truncated at x⁸ — the display
    /// form of the expansion, kept as a reference variant.
    Printed,
    /// All seven groups through x¹⁴ (the most accurate variant).
    Full,
}

/// Approximation of binom(2n, n+a−k)/binom(2n, n) with x = (k−a)/n.
#[derive(Debug, Clone)]
pub struct QuotientApprox {
    pub value: HPReal,
    /// Set when 1/2 < |x| ≤ 1: the expansion is evaluated but degrades there.
    pub low_accuracy: bool,
}

/// Stirling-series approximation of the central binomial quotient
/// binom(2n, n+a−k)/binom(2n, n) = exp(E(x, n)), x = (k−a)/n, where E splits
/// into exponent groups by power of n:
///
/// ```text
/// E = −2n ∑_r x^{2r}/(2r(2r−1))  +  ∑_r x^{2r}/(2r)
///     + ∑_{j≥1} B_{2j}/((2j)(2j−1)) · n^{1−2j} · (−2) ∑_m binom(2j−2+2m, 2m) x^{2m}
/// ```
///
/// (groups n¹, n⁰, n^{−1}, n^{−3}, n^{−5}, n^{−7}, n^{−9}). The quotient is
/// exactly zero for |x| > 1 and the expansion is reliable for |x| ≤ 1/2.
pub fn binom_quotient_approx(n: u64, a: i64, k: i64, order: ApproxOrder, prec: usize) -> Result<QuotientApprox> {
    if n < 1 {
        return Err(MelonError::Domain(format!("binom_quotient_approx requires n >= 1, got {n}")));
    }
    let (groups, rmax) = match order {
        ApproxOrder::Groups(g) => {
            if !(1..=7).contains(&g) {
                return Err(MelonError::Domain(format!("group count must be in 1..=7, got {g}")));
            }
            (g as usize, 7usize)
        }
        ApproxOrder::Printed => (7, 4),
        ApproxOrder::Full => (7, 7),
    };
    let t = k - a; // x = t/n
    if t.unsigned_abs() > n {
        return Ok(QuotientApprox { value: HPReal::zero(prec), low_accuracy: false });
    }
    if t == 0 {
        return Ok(QuotientApprox { value: HPReal::one(prec), low_accuracy: false });
    }
    let low_accuracy = 2 * t.unsigned_abs() > n;
    let wp = prec + 32;
    let x = HPReal::from_i64(t, wp).div(&HPReal::from_u64(n, wp));
    let x2 = x.mul(&x);
    let mut xs = Vec::with_capacity(rmax); // x², x⁴, …, x^{2·rmax}
    let mut cur = x2.clone();
    for _ in 0..rmax {
        xs.push(cur.clone());
        cur = cur.mul(&x2);
    }
    let nf = HPReal::from_u64(n, wp);
    let mut e = HPReal::zero(wp);
    // group 1 (n¹): −2n ∑ x^{2r}/(2r(2r−1))
    let mut g1 = HPReal::zero(wp);
    for (i, xp) in xs.iter().enumerate() {
        let r = (i + 1) as i64;
        g1 = g1.add(&xp.div(&HPReal::from_i64(r * (2 * r - 1), wp)));
    }
    e = e.sub(&nf.mul(&g1));
    // group 2 (n⁰): ∑ x^{2r}/(2r)
    if groups >= 2 {
        for (i, xp) in xs.iter().enumerate() {
            let r = (i + 1) as i64;
            e = e.add(&xp.div(&HPReal::from_i64(2 * r, wp)));
        }
    }
    // groups 3..=7 (n^{1−2j}, j = 1..=5)
    for j in 1..=(groups.saturating_sub(2)) {
        let lead = bernoulli(2 * j) / BigRational::from_integer(BigInt::from((2 * j) * (2 * j - 1)));
        let npow = nf.pow_i64(1 - 2 * j as i64);
        let mut series = HPReal::zero(wp);
        for (i, xp) in xs.iter().enumerate() {
            let m = (i + 1) as i64;
            let c = &lead * BigRational::from_integer(BigInt::from(-2) * binomial(2 * j as i64 - 2 + 2 * m, 2 * m));
            series = series.add(&HPReal::from_ratio(&c, wp).mul(xp));
        }
        e = e.add(&npow.mul(&series));
    }
    Ok(QuotientApprox { value: e.exp().round_to(prec), low_accuracy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    const P: usize = 128;

    fn hp(v: f64) -> HPReal {
        HPReal::from_f64(v, P)
    }

    fn assert_close(x: &HPReal, y: &HPReal, tol: f64, what: &str) {
        let d = x.sub(y).abs().to_f64();
        assert!(d < tol, "{what}: |{} − {}| = {d} ≥ {tol}", x.to_f64(), y.to_f64());
    }

    #[test]
    fn bernoulli_values() {
        let q = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
        assert_eq!(bernoulli(0), q(1, 1));
        assert_eq!(bernoulli(1), q(-1, 2));
        assert_eq!(bernoulli(2), q(1, 6));
        assert_eq!(bernoulli(12), q(-691, 2730));
        for j in 1..=20 {
            assert!(bernoulli(2 * j + 1).is_zero(), "B_{} should vanish", 2 * j + 1);
        }
    }

    #[test]
    fn digamma_halfint_values() {
        let g = gamma_euler(P);
        assert_close(&digamma_halfint(2, P).unwrap(), &g.neg(), 1e-30, "psi(1)");
        let psi_half = g.neg().sub(&HPReal::ln2(P).mul(&hp(2.0)));
        assert_close(&digamma_halfint(1, P).unwrap(), &psi_half, 1e-30, "psi(1/2)");
        // psi(5/2) = 8/3 − γ − 2 ln 2
        let expect = HPReal::from_ratio(&BigRational::new(BigInt::from(8), BigInt::from(3)), P).add(&psi_half);
        assert_close(&digamma_halfint(5, P).unwrap(), &expect, 1e-30, "psi(5/2)");
        assert!(digamma_halfint(0, P).is_err());
    }

    #[test]
    fn zeta_negative_integers() {
        let q = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
        assert_eq!(zeta_neg_int(0), q(-1, 2));
        assert_eq!(zeta_neg_int(1), q(-1, 12));
        assert_eq!(zeta_neg_int(2), q(0, 1));
        assert_eq!(zeta_neg_int(4), q(0, 1));
        assert_eq!(zeta_neg_int(3), q(1, 120));
    }

    #[test]
    fn zeta_real_matches_closed_forms() {
        let tol = hp(1e-30);
        let pi = HPReal::pi(P);
        let z2 = zeta_real(&hp(2.0), &tol).unwrap();
        assert_close(&z2, &pi.mul(&pi).div(&hp(6.0)), 1e-28, "zeta(2)");
        let z4 = zeta_real(&hp(4.0), &tol).unwrap();
        assert_close(&z4, &pi.pow_i64(4).div(&hp(90.0)), 1e-28, "zeta(4)");
        // direct 100-term oracle for s = 10 (tail < 100^{−9}/9 ≈ 1e-19)
        let mut direct = HPReal::zero(P);
        for k in 1..=100u64 {
            direct = direct.add(&HPReal::from_u64(k, P).pow_i64(-10));
        }
        let z10 = zeta_real(&hp(10.0), &tol).unwrap();
        assert_close(&z10, &direct, 1e-18, "zeta(10)");
        assert!(zeta_real(&hp(1.0), &tol).is_err());
        assert!(zeta_real(&hp(0.5), &tol).is_err());
    }

    #[test]
    fn gamma_family_consistency() {
        // Γ(m + 1/2) closed form vs. the shifted Stirling series
        for m in 0..=8u32 {
            let closed = gamma_half(m, P);
            let z = HPReal::from_u64(m as u64, P).add(&HPReal::from_ratio(
                &BigRational::new(BigInt::one(), BigInt::from(2)),
                P,
            ));
            let via_stirling = log_gamma(&z, P).unwrap().exp();
            let rel = closed.sub(&via_stirling).abs().div(&closed).to_f64();
            assert!(rel < 1e-28, "gamma(m+1/2) mismatch at m={m}: rel {rel}");
        }
        // 1/Γ at poles and simple points
        assert!(recip_gamma(&hp(0.0), P).is_zero());
        assert!(recip_gamma(&hp(-3.0), P).is_zero());
        let rg5 = recip_gamma(&hp(5.0), P);
        assert_close(&rg5, &hp(1.0).div(&hp(24.0)), 1e-30, "1/gamma(5)");
        let rg_half = recip_gamma(&hp(0.5), P);
        assert_close(&rg_half, &HPReal::pi(P).sqrt().recip(), 1e-30, "1/gamma(1/2)");
    }

    #[test]
    fn log_gamma_asym_examples() {
        // z = 10.5 with 5 correction terms vs. the exact half-integer product
        let z = hp(10.5);
        let lg = log_gamma_asym(&z, 5).unwrap();
        let exact = gamma_half(10, P).ln();
        assert_close(&lg, &exact, 1e-12, "log_gamma(10.5)");
        // self-consistency at z = 100: 4-term vs. 6-term
        let z100 = hp(100.0);
        let a = log_gamma_asym(&z100, 4).unwrap();
        let b = log_gamma_asym(&z100, 6).unwrap();
        let rel = a.sub(&b).abs().div(&b.abs()).to_f64();
        assert!(rel < 1e-20, "Stirling self-consistency at z=100: {rel}");
        // zero correction terms is the bare Stirling formula
        let z20 = hp(20.0);
        let bare = log_gamma_asym(&z20, 0).unwrap();
        let reference = z20
            .sub(&hp(0.5))
            .mul(&z20.ln())
            .sub(&z20)
            .add(&HPReal::pi(P).mul(&hp(2.0)).ln().div(&hp(2.0)));
        assert_close(&bare, &reference, 1e-35, "terms=0 closed form");
        assert!(log_gamma_asym(&hp(5.0), 3).is_err());
    }

    #[test]
    fn theta_values_and_reciprocity() {
        let params = ThetaSeriesParams::for_precision(P);
        let t1 = theta_bar(&hp(1.0), &params).unwrap();
        // closed form θ̄(1) = π^{1/4}/Γ(3/4)
        let closed = HPReal::pi(P).sqrt().sqrt().mul(&recip_gamma(&hp(0.75), P));
        assert_close(&t1, &closed, 1e-30, "theta(1) closed form");
        assert_close(&t1, &HPReal::parse("1.0864348112133080145753161215", P).unwrap(), 1e-25, "theta(1)");
        // tail: θ̄(50) − 1 < 1e-60
        let t50 = theta_bar(&hp(50.0), &params).unwrap();
        assert!(t50.sub(&HPReal::one(P)).to_f64() < 1e-60);
        // reciprocity θ̄(u) = θ̄(1/u)/√u at u ∈ {1/4, 1/2, 1, 2, 5}
        for u in [0.25, 0.5, 1.0, 2.0, 5.0] {
            let uu = hp(u);
            let lhs = theta_bar(&uu, &params).unwrap();
            let rhs = theta_bar(&uu.recip(), &params).unwrap().div(&uu.sqrt());
            assert_close(&lhs, &rhs, 1e-30, "reciprocity");
        }
    }

    #[test]
    fn theta_deriv_values() {
        let params = ThetaSeriesParams::for_precision(P);
        let d0 = theta_bar_deriv(0, &hp(1.0), &params).unwrap();
        let t = theta_bar(&hp(1.0), &params).unwrap();
        assert_close(&d0, &t, 1e-35, "a=0 equals theta_bar");
        let d1 = theta_bar_deriv(1, &hp(1.0), &params).unwrap();
        assert_close(&d1, &HPReal::parse("-0.271608702803327003643829030378", P).unwrap(), 1e-25, "theta'(1)");
        let d2 = theta_bar_deriv(2, &hp(1.0), &params).unwrap();
        assert_close(&d2, &HPReal::parse("0.854109954672113949552728212621", P).unwrap(), 1e-25, "theta''(1)");
        for a in 0..=6u32 {
            for u in [0.5, 1.0, 2.0, 5.0] {
                let d = theta_bar_deriv(a, &hp(u), &params).unwrap();
                assert_eq!(d.is_negative(), a % 2 == 1, "sign (−1)^a at a={a}, u={u}");
            }
        }
        assert!(theta_bar(&hp(0.0), &params).is_err());
        assert!(theta_bar(&hp(-1.0), &params).is_err());
    }

    #[test]
    fn quadrature_examples() {
        let tol = hp(1e-20);
        // closed-form oracle: ∫₁^∞ e^{−πt} dt = e^{−π}/π
        let r = integrate_one_to_inf(&|t| HPReal::pi(P).neg().mul(t).exp(), &tol, 0, P).unwrap();
        let exact = HPReal::pi(P).neg().exp().div(&HPReal::pi(P));
        assert_close(&r.value, &exact, 1e-18, "exp integral");
        assert!(!r.rigorous);
        // zero integrand
        let z = integrate_one_to_inf(&|_| HPReal::zero(P), &tol, 0, P).unwrap();
        assert!(z.value.is_zero());
        // ∫₁^∞ t^{−1/2}(θ̄(t)² − 1) dt
        let params = ThetaSeriesParams::for_precision(P);
        let f = move |t: &HPReal| {
            let th = theta_bar(t, &params).unwrap();
            th.mul(&th).sub(&HPReal::one(P)).div(&t.sqrt())
        };
        let r2 = integrate_one_to_inf(&f, &hp(1e-16), 0, P).unwrap();
        let expect = HPReal::parse("0.0498675399990220585772623316975", P).unwrap();
        assert_close(&r2.value, &expect, 1e-12, "theta^2 integral");
    }

    #[test]
    fn binom_quotient_examples() {
        // x = 0 is exactly 1
        let q0 = binom_quotient_approx(50, 3, 3, ApproxOrder::Full, P).unwrap();
        assert!(q0.value.sub(&HPReal::one(P)).is_zero());
        // |x| > 1 is exactly 0
        let qfar = binom_quotient_approx(50, 0, 51, ApproxOrder::Full, P).unwrap();
        assert!(qfar.value.is_zero());
        // exact-binomial oracle at (100, 0, 5) and (100, 1, 40)
        let exact = |n: i64, a: i64, k: i64| {
            let q = BigRational::new(binomial(2 * n, n + a - k), binomial(2 * n, n));
            HPReal::from_ratio(&q, P)
        };
        let q5 = binom_quotient_approx(100, 0, 5, ApproxOrder::Full, P).unwrap();
        let e5 = exact(100, 0, 5);
        assert!(q5.value.sub(&e5).abs().div(&e5).to_f64() < 1e-10, "(100,0,5)");
        assert!(!q5.low_accuracy);
        let q40 = binom_quotient_approx(100, 1, 40, ApproxOrder::Full, P).unwrap();
        let e40 = exact(100, 1, 40);
        assert!(q40.value.sub(&e40).abs().div(&e40).to_f64() < 1e-6, "(100,1,40)");
        // low-accuracy flag kicks in past |x| = 1/2
        let qflag = binom_quotient_approx(100, 0, 60, ApproxOrder::Full, P).unwrap();
        assert!(qflag.low_accuracy);
        // display-form variant is close but measurably worse at moderate x
        let qp = binom_quotient_approx(100, 0, 25, ApproxOrder::Printed, P).unwrap();
        let e25 = exact(100, 0, 25);
        let rel_printed = qp.value.sub(&e25).abs().div(&e25).to_f64();
        assert!(rel_printed < 5e-6, "printed variant envelope: {rel_printed}");
        let qf = binom_quotient_approx(100, 0, 25, ApproxOrder::Full, P).unwrap();
        let rel_full = qf.value.sub(&e25).abs().div(&e25).to_f64();
        assert!(rel_full < rel_printed, "full refines printed");
    }

    #[test]
    fn binom_quotient_group_monotonicity() {
        // worst relative error over |x| ≤ 1/4 is non-increasing in the group
        // count (up to rounding wobble at the ~1e-10 floor set by x¹⁴)
        let n = 100u64;
        let mut errs = Vec::new();
        for g in 1..=7u8 {
            let mut worst = 0f64;
            for k in -25i64..=25 {
                if k == 0 {
                    continue;
                }
                let approx = binom_quotient_approx(n, 0, k, ApproxOrder::Groups(g), P).unwrap();
                let exact = BigRational::new(binomial(200, 100 - k), binomial(200, 100));
                let e = HPReal::from_ratio(&exact, P);
                let rel = approx.value.sub(&e).abs().div(&e).to_f64();
                worst = worst.max(rel);
            }
            errs.push(worst);
        }
        for w in errs.windows(2) {
            assert!(w[1] <= w[0] * 1.001 + 1e-15, "error grew with more groups: {errs:?}");
        }
        assert!(errs[6] < 1e-6, "seven-group accuracy: {}", errs[6]);
    }

    #[test]
    fn bernoulli_recurrence_spotcheck_f64() {
        // denominator of B_2k is squarefree (von Staudt–Clausen consequence);
        // cheap structural sanity on the memo table
        for k in 1..=10 {
            let b = bernoulli(2 * k);
            let d = b.denom().to_i64().unwrap();
            for p in [2i64, 3, 5, 7, 11, 13] {
                assert!(d % (p * p) != 0, "denominator of B_{} divisible by {p}^2", 2 * k);
            }
        }
    }
}
