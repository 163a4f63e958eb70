//! Weighted jump sets: parsing, validation, period arithmetic, structural
//! constants, and centering.
//!
//! A jump set is stored as its characteristic Laurent polynomial
//! `P(u) = sum_j p_j u^j` with exact positive rational weights, smallest jump
//! `-c` and largest jump `d`, both required present (`c, d >= 1`).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::prec::{Cplx, Real};
use crate::Result;

/// Arithmetic mode selector shared by enumeration and centering.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithMode {
    /// Exact big-rational arithmetic.
    Exact,
    /// Double-precision (enumeration) or rationalized high-precision
    /// approximation (centering).
    Float,
}

/// A weighted jump set / characteristic Laurent polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JumpPolynomial {
    weights: BTreeMap<i64, BigRational>,
}

fn rat_powi(x: &BigRational, n: i64) -> BigRational {
    if n == 0 {
        return BigRational::one();
    }
    let (num, den) = if n > 0 {
        (x.numer().clone(), x.denom().clone())
    } else {
        (x.denom().clone(), x.numer().clone())
    };
    let e = n.unsigned_abs() as u32;
    BigRational::new(num.pow(e), den.pow(e))
}

/// Falling factorial j(j-1)...(j-k+1) as a big integer.
fn falling(j: i64, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k as i64 {
        acc *= BigInt::from(j - i);
    }
    acc
}

impl JumpPolynomial {
    /// Builds a jump set from `(jump, weight)` pairs.
    ///
    /// Rejects duplicate jumps, non-positive weights, and jump sets missing a
    /// negative or a positive jump.
    pub fn from_weights<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, BigRational)>,
    {
        let mut weights = BTreeMap::new();
        for (j, w) in pairs {
            if w.is_zero() || w.is_negative() {
                return Err(Error::Parse(format!("weight for jump {j} must be positive")));
            }
            if weights.insert(j, w).is_some() {
                return Err(Error::Parse(format!("duplicate jump {j}")));
            }
        }
        let poly = JumpPolynomial { weights };
        if poly.weights.keys().next().copied().unwrap_or(0) >= 0 {
            return Err(Error::Parse("no negative jump present".into()));
        }
        if poly.weights.keys().next_back().copied().unwrap_or(0) <= 0 {
            return Err(Error::Parse("no positive jump present".into()));
        }
        Ok(poly)
    }

    /// Parses a comma-separated `jump:weight` list; weights are integers or
    /// `a/b` fractions.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for tok in text.split(',') {
            let tok = tok.trim();
            if tok.is_empty() {
                return Err(Error::Parse("empty jump:weight entry".into()));
            }
            let (js, ws) = tok
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("missing ':' in `{tok}`")))?;
            let j: i64 = js
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad jump `{}`", js.trim())))?;
            let w = parse_rational(ws.trim())?;
            pairs.push((j, w));
        }
        Self::from_weights(pairs)
    }

    /// The weight map, keyed by jump.
    pub fn weights(&self) -> &BTreeMap<i64, BigRational> {
        &self.weights
    }

    /// Magnitude of the largest negative jump.
    pub fn c(&self) -> i64 {
        -*self.weights.keys().next().expect("nonempty")
    }

    /// Largest positive jump.
    pub fn d(&self) -> i64 {
        *self.weights.keys().next_back().expect("nonempty")
    }

    /// Fundamental period: gcd of exponent gaps of `u^c * P(u)`.
    pub fn period(&self) -> u64 {
        let c = self.c();
        let mut g: u64 = 0;
        let mut prev: Option<i64> = None;
        for &j in self.weights.keys() {
            let e = (j + c) as u64;
            if let Some(p) = prev {
                g = g.gcd(&(e - p as u64));
            }
            prev = Some(e as i64);
        }
        if g == 0 {
            1
        } else {
            g
        }
    }

    /// Gcd of the support jumps; 1 means the walk is reduced.
    pub fn reduced_gcd(&self) -> u64 {
        let mut g: u64 = 0;
        for &j in self.weights.keys() {
            g = g.gcd(&j.unsigned_abs());
        }
        g.max(1)
    }

    /// `P(1) = 1` exactly.
    pub fn is_probabilistic(&self) -> bool {
        self.weights.values().sum::<BigRational>() == BigRational::one()
    }

    /// Mean jump `P'(1)`, exact.
    pub fn drift(&self) -> BigRational {
        self.moment_ff(1)
    }

    /// Falling-factorial moment `P^(k)(1) = sum_j j(j-1)...(j-k+1) p_j`,
    /// exact.
    pub fn moment_ff(&self, k: usize) -> BigRational {
        let mut acc = BigRational::zero();
        for (&j, w) in &self.weights {
            acc += w * BigRational::from_integer(falling(j, k));
        }
        acc
    }

    /// `P^(k)(x)` over the rationals; `x` must be nonzero when negative
    /// powers occur.
    pub fn eval_rational(&self, x: &BigRational, k: usize) -> BigRational {
        let mut acc = BigRational::zero();
        for (&j, w) in &self.weights {
            let ff = falling(j, k);
            if ff.is_zero() {
                continue;
            }
            acc += w * BigRational::from_integer(ff) * rat_powi(x, j - k as i64);
        }
        acc
    }

    /// `P^(k)(u)` at a real argument.
    pub fn eval_real(&self, u: &Real, k: usize) -> Real {
        let digits = u.digits();
        let mut acc = Real::zero(digits);
        for (&j, w) in &self.weights {
            let ff = falling(j, k);
            if ff.is_zero() {
                continue;
            }
            let coeff = Real::from_ratio(&(w * BigRational::from_integer(ff)), digits);
            acc = &acc + &(&coeff * &u.powi(j - k as i64));
        }
        acc
    }

    /// `P^(k)(u)` at a complex argument.
    pub fn eval_cplx(&self, u: &Cplx, k: usize) -> Cplx {
        let digits = u.re.digits();
        let mut acc = Cplx::zero(digits);
        for (&j, w) in &self.weights {
            let ff = falling(j, k);
            if ff.is_zero() {
                continue;
            }
            let coeff = Real::from_ratio(&(w * BigRational::from_integer(ff)), digits);
            acc = &acc + &u.powi(j - k as i64).scale(&coeff);
        }
        acc
    }

    /// Multiplies every weight by a positive rational factor.
    pub fn scale_weights(&self, factor: &BigRational) -> Result<Self> {
        Self::from_weights(self.weights.iter().map(|(&j, w)| (j, w * factor)))
    }

    /// The structural constant tau as an exact rational, when it is one.
    ///
    /// Finds tau numerically, rationalizes by continued fractions with a
    /// bounded denominator, and accepts only after verifying `P'(tau) = 0`
    /// exactly over the rationals.
    pub fn tau_rational(&self) -> Option<BigRational> {
        let profile = structural_constants(self, 60).ok()?;
        let cand = rationalize(&profile.tau.to_rational(), &BigInt::from(1_000_000_000_000u64));
        if cand.is_positive() && self.eval_rational(&cand, 1).is_zero() {
            Some(cand)
        } else {
            None
        }
    }
}

impl fmt::Display for JumpPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, w) in &self.weights {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{j}:{w}")?;
            first = false;
        }
        Ok(())
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad rational `{s}`"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (
            n.trim().parse::<BigInt>().map_err(|_| bad())?,
            d.trim().parse::<BigInt>().map_err(|_| bad())?,
        ),
        None => (s.parse::<BigInt>().map_err(|_| bad())?, BigInt::one()),
    };
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// Best rational approximation by continued fractions, with denominators
/// capped at `max_den`.
fn rationalize(x: &BigRational, max_den: &BigInt) -> BigRational {
    let mut a = x.clone();
    let mut h0 = BigInt::zero();
    let mut h1 = BigInt::one();
    let mut k0 = BigInt::one();
    let mut k1 = BigInt::zero();
    for _ in 0..200 {
        let q = a.floor().to_integer();
        let h2 = &q * &h1 + &h0;
        let k2 = &q * &k1 + &k0;
        if &k2 > max_den {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = &a - BigRational::from_integer(q);
        if frac.is_zero() {
            break;
        }
        a = frac.recip();
    }
    if k1.is_zero() {
        x.clone()
    } else {
        BigRational::new(h1, k1)
    }
}

/// Derived structural constants of a walk.
#[derive(Clone, Debug)]
pub struct WalkProfile {
    /// Fundamental period `p`.
    pub period: u64,
    /// Gcd of the support jumps.
    pub reduced_gcd: u64,
    /// Mean jump `P'(1)`, exact.
    pub drift: BigRational,
    /// Whether `P(1) = 1` exactly.
    pub probabilistic: bool,
    /// Unique positive root of `P'`.
    pub tau: Real,
    /// Dominant singularity radius `1/P(tau)`.
    pub rho: Real,
    /// `P(tau)`.
    pub ptau: Real,
    /// `P''(tau)`.
    pub sigma2_tau: Real,
    /// Exact moments `(P''(1), P'''(1), P''''(1))` when probabilistic.
    pub moments_at_1: Option<(BigRational, BigRational, BigRational)>,
    /// `(1/tau) * sqrt(P(tau)/P''(tau))`.
    pub lambda0: Real,
    /// Working precision the reals were computed at, in decimal digits.
    pub digits: usize,
}

/// Computes the structural constants of a walk at the requested precision.
///
/// Tau is bracketed by the sign change of `P'` on a geometric grid over
/// (1e-6, 1e6), narrowed by bisection, then polished by Newton iteration.
pub fn structural_constants(poly: &JumpPolynomial, digits: usize) -> Result<WalkProfile> {
    let tau = solve_tau(poly, digits)?;
    let ptau = poly.eval_real(&tau, 0);
    let sigma2_tau = poly.eval_real(&tau, 2);
    if !ptau.is_finite() || ptau <= Real::zero(digits) || sigma2_tau <= Real::zero(digits) {
        return Err(Error::NoConvergence("P(tau) or P''(tau) not positive".into()));
    }
    let rho = &Real::one(digits) / &ptau;
    let lambda0 = &(&ptau / &sigma2_tau).sqrt() / &tau;
    let probabilistic = poly.is_probabilistic();
    let moments_at_1 = probabilistic.then(|| (poly.moment_ff(2), poly.moment_ff(3), poly.moment_ff(4)));
    Ok(WalkProfile {
        period: poly.period(),
        reduced_gcd: poly.reduced_gcd(),
        drift: poly.drift(),
        probabilistic,
        tau,
        rho,
        ptau,
        sigma2_tau,
        moments_at_1,
        lambda0,
        digits,
    })
}

fn solve_tau(poly: &JumpPolynomial, digits: usize) -> Result<Real> {
    let derivative_sign = |u: &Real| -> i8 {
        let v = poly.eval_real(u, 1);
        if v.is_zero() {
            0
        } else if v.is_negative() {
            -1
        } else {
            1
        }
    };

    // Geometric grid over (1e-6, 1e6): ten points per decade; P' must change
    // sign exactly once (uniqueness of tau).
    let ratio = Real::from_str_dec("1.258925411794167210423954106395800606", digits);
    let mut u = Real::from_str_dec("1e-6", digits);
    let mut grid = Vec::with_capacity(121);
    for _ in 0..=120 {
        grid.push(u.clone());
        u = &u * &ratio;
    }
    let signs: Vec<i8> = grid.iter().map(|g| derivative_sign(g)).collect();
    let mut changes = Vec::new();
    for i in 0..signs.len() - 1 {
        if signs[i] < 0 && signs[i + 1] >= 0 {
            changes.push(i);
        } else if signs[i] >= 0 && signs[i + 1] < 0 {
            return Err(Error::NoConvergence("P' decreasing across the grid".into()));
        }
    }
    if changes.len() != 1 {
        return Err(Error::NoConvergence(format!(
            "expected exactly one sign change of P' on the bracketing grid, found {}",
            changes.len()
        )));
    }
    let mut lo = grid[changes[0]].clone();
    let mut hi = grid[changes[0] + 1].clone();

    let half = Real::from_str_dec("0.5", digits);
    for _ in 0..48 {
        let mid = &(&lo + &hi) * &half;
        if derivative_sign(&mid) < 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mut t = &(&lo + &hi) * &half;
    let tol = {
        let bits = t.bits() as i64;
        // Stop once the Newton step falls below ~2^-(bits-8) relative.
        let mut e = Real::one(digits);
        let h = Real::from_str_dec("0.5", digits);
        for _ in 0..(bits - 8) {
            e = &e * &h;
        }
        e
    };
    for _ in 0..200 {
        let d1 = poly.eval_real(&t, 1);
        let d2 = poly.eval_real(&t, 2);
        if d2.is_zero() {
            return Err(Error::NoConvergence("P'' vanished during Newton polish".into()));
        }
        let step = &d1 / &d2;
        t = &t - &step;
        if step.abs() <= &tol * &t.abs() {
            return Ok(t);
        }
    }
    Err(Error::NoConvergence("tau Newton polish hit the iteration cap".into()))
}

/// Reweights `p_j -> p_j tau^j / P(tau)` so the result is probabilistic with
/// zero drift.
///
/// `ArithMode::Exact` requires a rational tau and produces an exactly
/// centered walk. `ArithMode::Float` rationalizes the high-precision tau, so
/// `P(1) = 1` holds exactly but the drift is only zero to working precision.
pub fn center(poly: &JumpPolynomial, mode: ArithMode, digits: usize) -> Result<JumpPolynomial> {
    let tau = match mode {
        ArithMode::Exact => poly.tau_rational().ok_or(Error::IrrationalTau)?,
        ArithMode::Float => {
            let profile = structural_constants(poly, digits)?;
            profile.tau.to_rational()
        }
    };
    let ptau = poly.eval_rational(&tau, 0);
    JumpPolynomial::from_weights(
        poly.weights()
            .iter()
            .map(|(&j, w)| (j, w * rat_powi(&tau, j) / ptau.clone())),
    )
}
