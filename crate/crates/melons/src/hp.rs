//! High-precision real scalar.
//!
//! `HPReal` wraps an arbitrary-precision binary float and carries its working
//! precision in bits. Every operation rounds to the larger precision of its
//! operands (round-half-even), so a computation started at `p` bits stays at
//! `p` bits unless explicitly widened. The minimum supported precision is 53
//! bits (an f64 mantissa); the library default is 128.
//!
//! Exact integers and rationals convert in losslessly up to the working
//! precision; conversion out to a rational is exact (binary floats are
//! dyadic), which is what makes decimal rendering reproducible.

use std::cell::RefCell;
use std::cmp::Ordering;

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::{BigInt, Sign as IntSign};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{MelonError, Result};

/// Smallest accepted working precision in bits.
pub const MIN_PRECISION_BITS: usize = 53;

/// Library default working precision in bits.
pub const DEFAULT_PRECISION_BITS: usize = 128;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    // Cache of algorithmic constants (pi, ln 2, ...) used by the
    // transcendental routines of the backing library.
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache allocation"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// High-precision real number with explicit working precision.
#[derive(Clone, Debug)]
pub struct HPReal {
    v: BigFloat,
    prec: usize,
}

impl HPReal {
    fn wrap(v: BigFloat, prec: usize) -> Self {
        HPReal { v, prec }
    }

    /// Working precision in bits.
    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn zero(prec: usize) -> Self {
        Self::from_i64(0, prec)
    }

    pub fn one(prec: usize) -> Self {
        Self::from_i64(1, prec)
    }

    pub fn from_i64(x: i64, prec: usize) -> Self {
        let p = prec.max(MIN_PRECISION_BITS);
        // i64 -> f64 is exact only to 53 bits; go through the sign/magnitude
        // split so 64-bit magnitudes convert exactly.
        let mag = BigFloat::from_u64(x.unsigned_abs(), p);
        let v = if x < 0 { mag.neg() } else { mag };
        Self::wrap(v, p)
    }

    pub fn from_u64(x: u64, prec: usize) -> Self {
        let p = prec.max(MIN_PRECISION_BITS);
        Self::wrap(BigFloat::from_u64(x, p), p)
    }

    pub fn from_f64(x: f64, prec: usize) -> Self {
        let p = prec.max(MIN_PRECISION_BITS);
        Self::wrap(BigFloat::from_f64(x, p), p)
    }

    /// Parse a decimal literal (used for stored reference constants).
    pub fn parse(s: &str, prec: usize) -> Result<Self> {
        let p = prec.max(MIN_PRECISION_BITS);
        let v = with_consts(|cc| BigFloat::parse(s, Radix::Dec, p, RM, cc));
        if v.is_nan() {
            return Err(MelonError::Domain(format!("unparsable decimal literal: {s:?}")));
        }
        Ok(Self::wrap(v, p))
    }

    pub fn from_bigint(x: &BigInt, prec: usize) -> Self {
        let p = prec.max(MIN_PRECISION_BITS);
        // Accumulate 64-bit limbs most-significant first: acc = acc*2^64 + limb.
        // Work at p+64 bits so only the final magnitude rounds.
        let pw = p + 64;
        let (sign, limbs) = x.to_u64_digits();
        let two64 = BigFloat::from_f64(18446744073709551616.0, pw); // 2^64, exact
        let mut acc = BigFloat::from_u64(0, pw);
        for limb in limbs.iter().rev() {
            acc = acc.mul(&two64, pw, RM).add(&BigFloat::from_u64(*limb, pw), pw, RM);
        }
        if sign == IntSign::Minus {
            acc = acc.neg();
        }
        let mut out = Self::wrap(acc, p);
        out.v.set_precision(p, RM).expect("precision reduce");
        out
    }

    pub fn from_ratio(x: &BigRational, prec: usize) -> Self {
        let p = prec.max(MIN_PRECISION_BITS);
        let num = Self::from_bigint(x.numer(), p + 64);
        let den = Self::from_bigint(x.denom(), p + 64);
        let mut q = num.div(&den);
        q.v.set_precision(p, RM).expect("precision reduce");
        q.prec = p;
        q
    }

    pub fn pi(prec: usize) -> Self {
        let p = prec.max(MIN_PRECISION_BITS);
        Self::wrap(with_consts(|cc| cc.pi(p, RM)), p)
    }

    pub fn ln2(prec: usize) -> Self {
        let p = prec.max(MIN_PRECISION_BITS);
        Self::wrap(with_consts(|cc| cc.ln_2(p, RM)), p)
    }

    fn p2(&self, rhs: &Self) -> usize {
        self.prec.max(rhs.prec)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let p = self.p2(rhs);
        Self::wrap(self.v.add(&rhs.v, p, RM), p)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let p = self.p2(rhs);
        Self::wrap(self.v.sub(&rhs.v, p, RM), p)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let p = self.p2(rhs);
        Self::wrap(self.v.mul(&rhs.v, p, RM), p)
    }

    pub fn div(&self, rhs: &Self) -> Self {
        let p = self.p2(rhs);
        Self::wrap(self.v.div(&rhs.v, p, RM), p)
    }

    pub fn neg(&self) -> Self {
        Self::wrap(self.v.neg(), self.prec)
    }

    pub fn abs(&self) -> Self {
        Self::wrap(self.v.abs(), self.prec)
    }

    pub fn recip(&self) -> Self {
        Self::one(self.prec).div(self)
    }

    pub fn sqrt(&self) -> Self {
        Self::wrap(self.v.sqrt(self.prec, RM), self.prec)
    }

    pub fn exp(&self) -> Self {
        Self::wrap(with_consts(|cc| self.v.exp(self.prec, RM, cc)), self.prec)
    }

    pub fn ln(&self) -> Self {
        Self::wrap(with_consts(|cc| self.v.ln(self.prec, RM, cc)), self.prec)
    }

    pub fn atan(&self) -> Self {
        Self::wrap(with_consts(|cc| self.v.atan(self.prec, RM, cc)), self.prec)
    }

    pub fn sin(&self) -> Self {
        Self::wrap(with_consts(|cc| self.v.sin(self.prec, RM, cc)), self.prec)
    }

    pub fn cos(&self) -> Self {
        Self::wrap(with_consts(|cc| self.v.cos(self.prec, RM, cc)), self.prec)
    }

    /// Real power via exp/ln (base must be positive).
    pub fn pow(&self, e: &Self) -> Self {
        let p = self.p2(e);
        Self::wrap(with_consts(|cc| self.v.pow(&e.v, p, RM, cc)), p)
    }

    /// Integer power by repeated squaring (exact exponent, any sign).
    pub fn pow_i64(&self, mut e: i64) -> Self {
        if e == 0 {
            return Self::one(self.prec);
        }
        let invert = e < 0;
        if invert {
            e = -e;
        }
        let mut base = self.clone();
        let mut acc = Self::one(self.prec);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        if invert {
            acc.recip()
        } else {
            acc
        }
    }

    /// Round to a (typically lower) precision. Used to strip internal guard
    /// bits before returning a result at the caller's requested precision.
    pub fn round_to(&self, prec: usize) -> Self {
        let p = prec.max(MIN_PRECISION_BITS);
        let mut v = self.v.clone();
        v.set_precision(p, RM).expect("precision change");
        Self::wrap(v, p)
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.v.is_negative() && !self.v.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !self.v.is_nan() && !self.v.is_inf()
    }

    pub fn cmp_val(&self, rhs: &Self) -> Ordering {
        self.v.partial_cmp(&rhs.v).expect("NaN in HPReal comparison")
    }

    pub fn max_val(&self, rhs: &Self) -> Self {
        if self.cmp_val(rhs) == Ordering::Less {
            rhs.clone()
        } else {
            self.clone()
        }
    }

    /// Exact dyadic-rational value of the stored float.
    pub fn to_ratio(&self) -> BigRational {
        if self.v.is_zero() {
            return BigRational::zero();
        }
        let (words, _p, sign, exp, _inexact) =
            self.v.as_raw_parts().expect("finite HPReal has raw parts");
        // Value = mantissa * 2^(exp - mantissa_bits) with the mantissa stored
        // as little-endian 64-bit words.
        let mant_bits = (words.len() * 64) as i64;
        let mut m = BigInt::zero();
        for w in words.iter().rev() {
            m = (m << 64) + BigInt::from(*w);
        }
        if sign == Sign::Neg {
            m = -m;
        }
        let shift = exp as i64 - mant_bits;
        if shift >= 0 {
            BigRational::from_integer(m << shift)
        } else {
            BigRational::new(m, BigInt::from(1) << (-shift) as usize)
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.v.is_zero() {
            return 0.0;
        }
        if !self.is_finite() {
            return if self.v.is_positive() { f64::INFINITY } else { f64::NEG_INFINITY };
        }
        self.to_ratio().to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal rendering at `digits` significant digits, round-half-even.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        decimal_string(&self.to_ratio(), digits)
    }
}

impl std::fmt::Display for HPReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        // Default display uses the full decimal resolution of the precision.
        let digits = (self.prec as f64 * 0.30103).floor() as usize;
        write!(f, "{}", self.to_decimal_string(digits.max(6)))
    }
}

/// Decimal rendering of an exact rational at `digits` significant digits,
/// round-half-even, trailing zeros trimmed. Plain notation for exponents in
/// [-4, digits), scientific otherwise. Deterministic by construction.
pub fn decimal_string(q: &BigRational, digits: usize) -> String {
    let digits = digits.max(1);
    if q.is_zero() {
        return "0".to_string();
    }
    let neg = q.is_negative();
    let q = q.abs();
    let (num, den) = (q.numer().clone(), q.denom().clone());

    // Decimal exponent e with 10^e <= q < 10^(e+1).
    let mut e = num.to_string().len() as i64 - den.to_string().len() as i64;
    let ten = BigInt::from(10);
    let scaled_ge_one = |e: i64| -> bool {
        // num / den >= 10^e  <=>  num >= den * 10^e
        if e >= 0 {
            num >= &den * ten.pow(e as u32)
        } else {
            &num * ten.pow((-e) as u32) >= den
        }
    };
    while !scaled_ge_one(e) {
        e -= 1;
    }
    while scaled_ge_one(e + 1) {
        e += 1;
    }

    // Mantissa m = round_half_even(q * 10^(digits-1-e)) in [10^(digits-1), 10^digits].
    let shift = digits as i64 - 1 - e;
    let (n_sc, d_sc) = if shift >= 0 {
        (&num * ten.pow(shift as u32), den.clone())
    } else {
        (num.clone(), &den * ten.pow((-shift) as u32))
    };
    let (mut m, r) = num_integer::Integer::div_rem(&n_sc, &d_sc);
    let twice_r = &r * 2;
    if twice_r > d_sc || (twice_r == d_sc && num_integer::Integer::is_odd(&m)) {
        m += 1;
    }
    let mut mant = m.to_string();
    if mant.len() > digits {
        // 9.99... rounded up to 10.0...: drop the extra zero, bump exponent.
        mant.truncate(digits);
        e += 1;
    }

    let body = if e >= -4 && (e as i128) < digits as i128 {
        if e >= 0 {
            let point = (e + 1) as usize;
            let int_part = &mant[..point];
            let frac_part = mant[point..].trim_end_matches('0');
            if frac_part.is_empty() {
                int_part.to_string()
            } else {
                format!("{int_part}.{frac_part}")
            }
        } else {
            let zeros = "0".repeat((-e - 1) as usize);
            let frac = format!("{zeros}{mant}");
            let frac = frac.trim_end_matches('0');
            format!("0.{frac}")
        }
    } else {
        let head = &mant[..1];
        let tail = mant[1..].trim_end_matches('0');
        let exp_part = format!("e{}{}", if e < 0 { "-" } else { "+" }, e.abs());
        if tail.is_empty() {
            format!("{head}{exp_part}")
        } else {
            format!("{head}.{tail}{exp_part}")
        }
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}
