//! Probabilist's Hermite polynomials, the companion `Q_r` family, and the
//! reciprocal-Gamma constants that convert half-integer `t`-powers into
//! Hermite-basis coefficients.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::prec::Real;

/// Dense integer-coefficient polynomial; `coeffs[k]` multiplies `x^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    /// Builds from coefficients in increasing degree, trimming leading zeros.
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        let mut p = IntPolynomial { coeffs };
        while p.coeffs.len() > 1 && p.coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            p.coeffs.pop();
        }
        if p.coeffs.is_empty() {
            p.coeffs.push(BigInt::zero());
        }
        p
    }

    /// Builds from `i64` coefficients in increasing degree.
    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Coefficients in increasing degree.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Degree; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Leading coefficient.
    pub fn leading(&self) -> &BigInt {
        self.coeffs.last().expect("nonempty")
    }

    /// Whether all coefficients vanish.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return IntPolynomial::new(vec![BigInt::zero()]);
        }
        IntPolynomial::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(k, a)| a * BigInt::from(k + 1))
                .collect(),
        )
    }

    /// The polynomial `p(a x)`.
    pub fn scale_argument(&self, a: i64) -> Self {
        let mut pow = BigInt::one();
        let a = BigInt::from(a);
        IntPolynomial::new(
            self.coeffs
                .iter()
                .map(|cf| {
                    let out = cf * &pow;
                    pow = &pow * &a;
                    out
                })
                .collect(),
        )
    }

    /// The polynomial multiplied by an integer constant.
    pub fn scale(&self, a: &BigInt) -> Self {
        IntPolynomial::new(self.coeffs.iter().map(|cf| cf * a).collect())
    }

    /// Horner evaluation at a real argument.
    pub fn eval_real(&self, x: &Real) -> Real {
        let digits = x.digits();
        let mut acc = Real::zero(digits);
        for cf in self.coeffs.iter().rev() {
            acc = &(&acc * x) + &Real::from_ratio(&BigRational::from_integer(cf.clone()), digits);
        }
        acc
    }

    /// Horner evaluation over the rationals.
    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for cf in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(cf.clone());
        }
        acc
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, cf) in self.coeffs.iter().enumerate().rev() {
            if cf.is_zero() && self.coeffs.len() > 1 {
                continue;
            }
            if !first {
                write!(f, " {} ", if cf.is_negative() { "-" } else { "+" })?;
            } else if cf.is_negative() {
                write!(f, "-")?;
            }
            let mag = cf.magnitude();
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    write!(f, "x")?;
                    if k > 1 {
                        write!(f, "^{k}")?;
                    }
                }
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Probabilist's Hermite polynomial `He_i`, by the recurrence
/// `He_{i+1} = x He_i - He_i'`.
pub fn hermite(i: usize) -> IntPolynomial {
    let mut cur = IntPolynomial::from_i64(&[1]);
    for _ in 0..i {
        cur = step_x_minus_derivative(&cur);
    }
    cur
}

fn step_x_minus_derivative(p: &IntPolynomial) -> IntPolynomial {
    let shifted: Vec<BigInt> =
        std::iter::once(BigInt::zero()).chain(p.coeffs().iter().cloned()).collect();
    let mut coeffs = shifted;
    for (k, d) in p.derivative().coeffs().iter().enumerate() {
        coeffs[k] -= d;
    }
    IntPolynomial::new(coeffs)
}

/// Companion polynomial `Q_r`, by the recurrence `Q_{r+1} = -4x Q_r + Q_r'`
/// from `Q_0 = 1`.
pub fn q_family(r: usize) -> IntPolynomial {
    let mut cur = IntPolynomial::from_i64(&[1]);
    for _ in 0..r {
        let shifted: Vec<BigInt> = std::iter::once(BigInt::zero())
            .chain(cur.coeffs().iter().map(|c| c * BigInt::from(-4)))
            .collect();
        let mut coeffs = shifted;
        for (k, d) in cur.derivative().coeffs().iter().enumerate() {
            coeffs[k] += d;
        }
        cur = IntPolynomial::new(coeffs);
    }
    cur
}

/// Both polynomial families up to a maximum index, built once.
#[derive(Clone, Debug)]
pub struct HermiteTable {
    /// `He_0..He_max`.
    pub he: Vec<IntPolynomial>,
    /// `Q_0..Q_max`.
    pub q: Vec<IntPolynomial>,
}

impl HermiteTable {
    /// Builds tables for indices `0..=max`.
    pub fn new(max: usize) -> Self {
        let mut he = Vec::with_capacity(max + 1);
        let mut q = Vec::with_capacity(max + 1);
        he.push(IntPolynomial::from_i64(&[1]));
        q.push(IntPolynomial::from_i64(&[1]));
        for r in 0..max {
            he.push(step_x_minus_derivative(&he[r]));
            let shifted: Vec<BigInt> = std::iter::once(BigInt::zero())
                .chain(q[r].coeffs().iter().map(|c| c * BigInt::from(-4)))
                .collect();
            let mut coeffs = shifted;
            for (k, d) in q[r].derivative().coeffs().iter().enumerate() {
                coeffs[k] += d;
            }
            q.push(IntPolynomial::new(coeffs));
        }
        HermiteTable { he, q }
    }
}

thread_local! {
    static SPOUGE_CACHE: RefCell<HashMap<usize, (usize, Vec<Real>)>> = RefCell::new(HashMap::new());
}

/// Spouge coefficients `c_0 = sqrt(2 pi)`, `c_k = (-1)^{k-1}/(k-1)! *
/// (a-k)^{k-1/2} e^{a-k}`, cached per working precision.
fn spouge_coeffs(digits: usize) -> (usize, Vec<Real>) {
    SPOUGE_CACHE.with(|cache| {
        if let Some(hit) = cache.borrow().get(&digits) {
            return hit.clone();
        }
        // Relative error of Spouge's formula is about (2 pi)^{-(a+1/2)}.
        let a = (digits as f64 * 1.2533).ceil() as usize + 4;
        let two_pi = &Real::pi(digits) * &Real::from_i64(2, digits);
        let mut coeffs = Vec::with_capacity(a);
        coeffs.push(two_pi.sqrt());
        let mut factorial = Real::one(digits);
        for k in 1..a {
            if k > 1 {
                factorial = &factorial * &Real::from_i64(k as i64 - 1, digits);
            }
            let amk = Real::from_i64((a - k) as i64, digits);
            let half = Real::from_ratio(
                &BigRational::new(BigInt::from(2 * k as i64 - 1), BigInt::from(2)),
                digits,
            );
            let power = (&half * &amk.ln()).exp();
            let mut term = &(&power * &amk.exp()) / &factorial;
            if k % 2 == 0 {
                term = -term;
            }
            coeffs.push(term);
        }
        cache.borrow_mut().insert(digits, (a, coeffs.clone()));
        (a, coeffs)
    })
}

/// Gamma function by Spouge's approximation; requires `s > 0`.
fn gamma_positive(s: &Real) -> Real {
    let digits = s.digits();
    let (a, coeffs) = spouge_coeffs(digits);
    let one = Real::one(digits);
    let z = s - &one;
    let base = &z + &Real::from_i64(a as i64, digits);
    let mut sum = coeffs[0].clone();
    for (k, c) in coeffs.iter().enumerate().skip(1) {
        sum = &sum + &(c / &(&z + &Real::from_i64(k as i64, digits)));
    }
    let half = Real::from_ratio(&BigRational::new(BigInt::one(), BigInt::from(2)), digits);
    let exponent = &(&z + &half) * &base.ln();
    &(&exponent - &base).exp() * &sum
}

/// The entire function `G(s) = 1/Gamma(s)`.
///
/// For `s >= 1/2` this is the reciprocal of Spouge's Gamma; below that it is
/// evaluated in the reflection form `sin(pi s) Gamma(1-s) / pi`, which stays
/// finite through the Gamma poles at the nonpositive integers.
pub fn gamma_hankel(s: &Real) -> Real {
    let digits = s.digits();
    let half = Real::from_ratio(&BigRational::new(BigInt::one(), BigInt::from(2)), digits);
    if *s >= half {
        &Real::one(digits) / &gamma_positive(s)
    } else {
        let pi = Real::pi(digits);
        let reflected = gamma_positive(&(&Real::one(digits) - s));
        &(&(s * &pi).sin() * &reflected) / &pi
    }
}

/// Hermite-basis substitution rule for a half-integer power `t^{r/2}`:
/// returns the constant `1/((2 sqrt 2)^{r+1} sqrt(pi))` and the index `r+1`
/// of the Hermite polynomial (argument `4x`) it multiplies.
pub fn t_power_to_hermite(r: i64, digits: usize) -> (Real, usize) {
    assert!(r >= -1, "rule defined for r >= -1");
    let two = Real::from_i64(2, digits);
    let two_sqrt2 = &two * &two.sqrt();
    let denom = &two_sqrt2.powi(r + 1) * &Real::pi(digits).sqrt();
    (&Real::one(digits) / &denom, (r + 1) as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_base_cases() {
        assert_eq!(hermite(0), IntPolynomial::from_i64(&[1]));
        assert_eq!(hermite(1), IntPolynomial::from_i64(&[0, 1]));
        assert_eq!(hermite(2), IntPolynomial::from_i64(&[-1, 0, 1]));
    }

    #[test]
    fn family_degrees_and_leading_coefficients() {
        let table = HermiteTable::new(20);
        for i in 0..=20 {
            assert_eq!(table.he[i].degree(), i);
            assert_eq!(table.he[i].leading(), &BigInt::one());
            assert_eq!(table.q[i].degree(), i);
            assert_eq!(table.q[i].leading(), &BigInt::from(-4).pow(i as u32));
        }
    }

    #[test]
    fn q_family_matches_printed_table() {
        let expected: [&[i64]; 9] = [
            &[1],
            &[0, -4],
            &[-4, 0, 16],
            &[0, 48, 0, -64],
            &[48, 0, -384, 0, 256],
            &[0, -960, 0, 2560, 0, -1024],
            &[-960, 0, 11520, 0, -15360, 0, 4096],
            &[0, 26880, 0, -107520, 0, 86016, 0, -16384],
            &[26880, 0, -430080, 0, 860160, 0, -458752, 0, 65536],
        ];
        for (r, coeffs) in expected.iter().enumerate() {
            assert_eq!(q_family(r), IntPolynomial::from_i64(coeffs), "Q_{r}");
        }
    }

    /// The claimed identity Q_i(x) = (-1)^i He_i(4x) holds only for i <= 1 as
    /// the recurrences are written; the identity the generated families do
    /// satisfy at every index is Q_i(x) = (-2)^i He_i(2x).
    #[test]
    fn q_family_versus_rescaled_hermite() {
        let table = HermiteTable::new(20);
        for i in 0..=20 {
            let he4 = table.he[i].scale_argument(4);
            let signed = he4.scale(&BigInt::from(-1).pow(i as u32));
            if i <= 1 {
                assert_eq!(table.q[i], signed);
            } else {
                assert_ne!(table.q[i], signed, "printed identity unexpectedly holds at {i}");
            }
            let he2 = table.he[i].scale_argument(2).scale(&BigInt::from(-2).pow(i as u32));
            assert_eq!(table.q[i], he2, "scaled identity fails at {i}");
        }
    }

    #[test]
    fn gamma_reciprocal_reference_points() {
        let digits = 50;
        let tol = Real::from_str_dec("1e-40", digits);
        let pi = Real::pi(digits);
        let sqrt_pi = pi.sqrt();
        let half = Real::from_str_dec("0.5", digits);

        let cases: Vec<(Real, Real)> = vec![
            (half.clone(), &Real::one(digits) / &sqrt_pi),
            (-&half, -&(&Real::one(digits) / &(&Real::from_i64(2, digits) * &sqrt_pi))),
            (
                Real::from_str_dec("1.5", digits),
                &Real::from_i64(2, digits) / &sqrt_pi,
            ),
            (
                Real::from_str_dec("-1.5", digits),
                &Real::from_i64(3, digits) / &(&Real::from_i64(4, digits) * &sqrt_pi),
            ),
            (
                Real::from_str_dec("0.25", digits),
                &Real::one(digits)
                    / &Real::from_str_dec(
                        "3.6256099082219083119306851558676720029951676828800654674333",
                        digits,
                    ),
            ),
        ];
        for (s, expect) in cases {
            let got = gamma_hankel(&s);
            assert!((&got - &expect).abs() < tol, "s = {s}: got {got}, expect {expect}");
        }
    }

    #[test]
    fn gamma_reciprocal_is_entire_at_integers() {
        let digits = 50;
        let tiny = Real::from_str_dec("1e-40", digits);
        for k in 0..=20i64 {
            let g = gamma_hankel(&Real::from_i64(-k, digits));
            assert!(g.abs() < tiny, "G(-{k}) = {g}");
        }
        let mut factorial = 1i64;
        for k in 1..=10i64 {
            if k > 1 {
                factorial *= k - 1;
            }
            let g = gamma_hankel(&Real::from_i64(k, digits));
            let expect = &Real::one(digits) / &Real::from_i64(factorial, digits);
            assert!((&g - &expect).abs() < tiny, "G({k})");
        }
    }

    /// Expanding e^{-2x sqrt(2t)}/sqrt(t) in powers of sqrt(t) and replacing
    /// each t^{(j-1)/2} by its reciprocal-Gamma constant resums to
    /// e^{-2x^2}/sqrt(pi); only even-j terms survive the Gamma poles.
    #[test]
    fn composite_resummation_reaches_rayleigh_kernel() {
        let digits = 60;
        let x = Real::one(digits);
        let two = Real::from_i64(2, digits);
        let step = -&(&(&two * &x) * &two.sqrt());
        let mut power = Real::one(digits);
        let mut factorial = Real::one(digits);
        let mut sum = Real::zero(digits);
        for j in 0..=61i64 {
            if j > 0 {
                power = &power * &step;
                factorial = &factorial * &Real::from_i64(j, digits);
            }
            let arg =
                Real::from_ratio(&BigRational::new(BigInt::from(1 - j), BigInt::from(2)), digits);
            sum = &sum + &(&(&power / &factorial) * &gamma_hankel(&arg));
        }
        let expect = &(-&(&two * &(&x * &x))).exp() / &Real::pi(digits).sqrt();
        assert!((&sum - &expect).abs() < Real::from_str_dec("1e-12", digits), "sum {sum} vs {expect}");
    }

    #[test]
    fn t_power_rule_examples() {
        let digits = 50;
        let (c0, idx0) = t_power_to_hermite(-1, digits);
        assert_eq!(idx0, 0);
        let inv_sqrt_pi = &Real::one(digits) / &Real::pi(digits).sqrt();
        assert!((&c0 - &inv_sqrt_pi).abs() < Real::from_str_dec("1e-45", digits));
        let (c1, idx1) = t_power_to_hermite(0, digits);
        assert_eq!(idx1, 1);
        let two = Real::from_i64(2, digits);
        let expect = &inv_sqrt_pi / &(&two * &two.sqrt());
        assert!((&c1 - &expect).abs() < Real::from_str_dec("1e-45", digits));
    }
}
