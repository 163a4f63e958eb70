//! Configurable-precision real and complex arithmetic.
//!
//! [`Real`] wraps `astro_float::BigFloat` together with its working mantissa
//! size, so binary operations produce results at the larger of the two
//! operand precisions. [`Cplx`] is a rectangular complex number over two
//! `Real` components. Precision is requested in decimal digits and mapped
//! to bits with guard bits on top, rounded up to the 64-bit word size.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

const RM: RoundingMode = RoundingMode::ToEven;
const GUARD_BITS: usize = 64;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache allocation"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Maps a decimal-digit request to a mantissa size in bits (word multiple,
/// with guard bits).
pub fn digits_to_bits(digits: usize) -> usize {
    let raw = (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + GUARD_BITS;
    raw.div_ceil(64) * 64
}

/// A real number at a fixed working precision.
#[derive(Clone)]
pub struct Real {
    v: BigFloat,
    bits: usize,
}

impl Real {
    /// Zero at `digits` decimal digits of working precision.
    pub fn zero(digits: usize) -> Self {
        let bits = digits_to_bits(digits);
        Real { v: BigFloat::from_i64(0, bits), bits }
    }

    /// One at `digits` decimal digits of working precision.
    pub fn one(digits: usize) -> Self {
        Real::from_i64(1, digits)
    }

    pub fn from_i64(i: i64, digits: usize) -> Self {
        let bits = digits_to_bits(digits);
        Real { v: BigFloat::from_i64(i, bits), bits }
    }

    pub fn from_f64(f: f64, digits: usize) -> Self {
        let bits = digits_to_bits(digits);
        Real { v: BigFloat::from_f64(f, bits), bits }
    }

    /// Parses a decimal literal (`-1.25e-3` style) at the given precision.
    pub fn from_str_dec(s: &str, digits: usize) -> Self {
        let bits = digits_to_bits(digits);
        let v = with_consts(|cc| BigFloat::parse(s, Radix::Dec, bits, RM, cc));
        Real { v, bits }
    }

    pub fn from_bigint(i: &BigInt, digits: usize) -> Self {
        Real::from_str_dec(&i.to_string(), digits)
    }

    pub fn from_ratio(r: &BigRational, digits: usize) -> Self {
        let num = Real::from_bigint(r.numer(), digits);
        let den = Real::from_bigint(r.denom(), digits);
        &num / &den
    }

    pub fn pi(digits: usize) -> Self {
        let bits = digits_to_bits(digits);
        Real { v: with_consts(|cc| cc.pi(bits, RM)), bits }
    }

    /// Working precision in bits.
    pub fn bits(&self) -> usize {
        self.bits
    }

    /// Working precision in decimal digits (floor).
    pub fn digits(&self) -> usize {
        ((self.bits - GUARD_BITS) as f64 / std::f64::consts::LOG2_10).floor() as usize
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

    pub fn abs(&self) -> Self {
        let mut v = self.v.clone();
        if v.is_negative() {
            v.inv_sign();
        }
        Real { v, bits: self.bits }
    }

    pub fn sqrt(&self) -> Self {
        Real { v: self.v.sqrt(self.bits, RM), bits: self.bits }
    }

    pub fn exp(&self) -> Self {
        Real { v: with_consts(|cc| self.v.exp(self.bits, RM, cc)), bits: self.bits }
    }

    pub fn ln(&self) -> Self {
        Real { v: with_consts(|cc| self.v.ln(self.bits, RM, cc)), bits: self.bits }
    }

    pub fn sin(&self) -> Self {
        Real { v: with_consts(|cc| self.v.sin(self.bits, RM, cc)), bits: self.bits }
    }

    pub fn cos(&self) -> Self {
        Real { v: with_consts(|cc| self.v.cos(self.bits, RM, cc)), bits: self.bits }
    }

    /// Integer power; negative exponents go through the reciprocal.
    pub fn powi(&self, n: i64) -> Self {
        if n < 0 {
            let p = self.powi(-n);
            return &Real::one_bits(self.bits) / &p;
        }
        Real { v: self.v.powi(n as usize, self.bits, RM), bits: self.bits }
    }

    fn one_bits(bits: usize) -> Self {
        Real { v: BigFloat::from_i64(1, bits), bits }
    }

    /// Truncation toward zero.
    pub fn trunc(&self) -> Self {
        Real { v: self.v.int(), bits: self.bits }
    }

    /// Largest integer not above `self`.
    pub fn floor(&self) -> Self {
        let t = self.trunc();
        if self.cmp_total(&t) == Ordering::Less {
            &t - &Real::one_bits(self.bits)
        } else {
            t
        }
    }

    /// Total order; NaN operands panic (they indicate an internal bug).
    pub fn cmp_total(&self, other: &Real) -> Ordering {
        let s = self.v.cmp(&other.v).expect("NaN in comparison");
        match s {
            _ if s > 0 => Ordering::Greater,
            _ if s < 0 => Ordering::Less,
            _ => Ordering::Equal,
        }
    }

    pub fn max_val(&self, other: &Real) -> Real {
        if self.cmp_total(other) == Ordering::Less { other.clone() } else { self.clone() }
    }

    pub fn min_val(&self, other: &Real) -> Real {
        if self.cmp_total(other) == Ordering::Greater { other.clone() } else { self.clone() }
    }

    pub fn to_f64(&self) -> f64 {
        if self.v.is_zero() {
            return 0.0;
        }
        f64::from_str(&self.to_decimal_string()).unwrap_or(f64::NAN)
    }

    /// Exact value as a rational: mantissa times a power of two.
    pub fn to_rational(&self) -> BigRational {
        if self.v.is_zero() {
            return BigRational::zero();
        }
        let (words, n, sign, e, _) = self.v.as_raw_parts().expect("finite value");
        let mut m = BigInt::zero();
        for (i, w) in words.iter().enumerate() {
            m += BigInt::from(*w) << (64 * i);
        }
        if sign == Sign::Neg {
            m = -m;
        }
        let shift = e as i64 - n as i64;
        let num = BigRational::from_integer(m);
        if shift >= 0 {
            num * BigRational::from_integer(BigInt::one() << shift as usize)
        } else {
            num / BigRational::from_integer(BigInt::one() << (-shift) as usize)
        }
    }

    /// Full-precision decimal string, `d.ddd...e+EE` form; deterministic for
    /// a fixed precision.
    pub fn to_decimal_string(&self) -> String {
        with_consts(|cc| self.v.format(Radix::Dec, RM, cc)).unwrap_or_else(|_| "NaN".into())
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string())
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string())
    }
}

macro_rules! real_binop {
    ($trait:ident, $method:ident, $bf:ident) => {
        impl $trait for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                let bits = self.bits.max(rhs.bits);
                Real { v: self.v.$bf(&rhs.v, bits, RM), bits }
            }
        }
        impl $trait for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl $trait<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
    };
}

real_binop!(Add, add, add);
real_binop!(Sub, sub, sub);
real_binop!(Mul, mul, mul);
real_binop!(Div, div, div);

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        let mut v = self.v.clone();
        v.inv_sign();
        Real { v, bits: self.bits }
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        -&self
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_total(other) == Ordering::Equal
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_total(other))
    }
}

/// A complex number in rectangular form over [`Real`].
#[derive(Clone, Debug, PartialEq)]
pub struct Cplx {
    pub re: Real,
    pub im: Real,
}

impl Cplx {
    pub fn new(re: Real, im: Real) -> Self {
        Cplx { re, im }
    }

    pub fn zero(digits: usize) -> Self {
        Cplx { re: Real::zero(digits), im: Real::zero(digits) }
    }

    pub fn one(digits: usize) -> Self {
        Cplx { re: Real::one(digits), im: Real::zero(digits) }
    }

    pub fn from_real(re: Real) -> Self {
        let im = Real::zero(1).promote(re.bits);
        Cplx { re, im }
    }

    pub fn from_f64(re: f64, im: f64, digits: usize) -> Self {
        Cplx { re: Real::from_f64(re, digits), im: Real::from_f64(im, digits) }
    }

    /// `r * exp(i*theta)`.
    pub fn from_polar(r: &Real, theta: &Real) -> Self {
        Cplx { re: r * &theta.cos(), im: r * &theta.sin() }
    }

    pub fn conj(&self) -> Self {
        Cplx { re: self.re.clone(), im: -&self.im }
    }

    pub fn abs_sq(&self) -> Real {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn abs(&self) -> Real {
        self.abs_sq().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn scale(&self, s: &Real) -> Self {
        Cplx { re: &self.re * s, im: &self.im * s }
    }

    pub fn recip(&self) -> Self {
        let d = self.abs_sq();
        Cplx { re: &self.re / &d, im: &(-&self.im) / &d }
    }

    /// Integer power by binary exponentiation; negative exponents go through
    /// the reciprocal.
    pub fn powi(&self, n: i64) -> Self {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let digits_holder = self.re.bits;
        let mut acc = Cplx {
            re: Real::one_bits(digits_holder),
            im: Real { v: BigFloat::from_i64(0, digits_holder), bits: digits_holder },
        };
        let mut base = self.clone();
        let mut k = n as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }
}

impl Real {
    fn promote(&self, bits: usize) -> Real {
        if bits <= self.bits {
            self.clone()
        } else {
            let mut v = self.v.clone();
            v.set_precision(bits, RM).expect("precision raise");
            Real { v, bits }
        }
    }
}

impl Add for &Cplx {
    type Output = Cplx;
    fn add(self, rhs: &Cplx) -> Cplx {
        Cplx { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for &Cplx {
    type Output = Cplx;
    fn sub(self, rhs: &Cplx) -> Cplx {
        Cplx { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul for &Cplx {
    type Output = Cplx;
    fn mul(self, rhs: &Cplx) -> Cplx {
        let re = &(&self.re * &rhs.re) - &(&self.im * &rhs.im);
        let im = &(&self.re * &rhs.im) + &(&self.im * &rhs.re);
        Cplx { re, im }
    }
}

impl Div for &Cplx {
    type Output = Cplx;
    fn div(self, rhs: &Cplx) -> Cplx {
        let d = rhs.abs_sq();
        let re = &(&(&self.re * &rhs.re) + &(&self.im * &rhs.im)) / &d;
        let im = &(&(&self.im * &rhs.re) - &(&self.re * &rhs.im)) / &d;
        Cplx { re, im }
    }
}

impl Neg for &Cplx {
    type Output = Cplx;
    fn neg(self) -> Cplx {
        Cplx { re: -&self.re, im: -&self.im }
    }
}
