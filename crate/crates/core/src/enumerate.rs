//! Exact dynamic-programming enumeration of bounded and unbounded walks and
//! bridges, plus the reflection-principle closed form for `+1/-1` bridges.
//!
//! Everything here is ground truth: the recurrence `f_{n+1}(u) = f_n(u) P(u)`
//! with terms above the ceiling dropped, run either over exact rationals
//! (big-integer numerators over a common power denominator) or over `f64`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::Error;
use crate::walk::{ArithMode, JumpPolynomial};
use crate::Result;

/// Hard cap on the total number of stored table entries.
pub const COUNT_TABLE_ENTRY_CAP: u64 = 4_000_000;

/// A walk weight in the arithmetic mode the table was built with.
#[derive(Clone, Debug, PartialEq)]
pub enum Weight {
    /// Exact big-rational weight.
    Exact(BigRational),
    /// Double-precision weight.
    Float(f64),
}

impl Weight {
    /// The weight as a double, rounding in exact mode.
    pub fn to_f64(&self) -> f64 {
        match self {
            Weight::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Weight::Float(x) => *x,
        }
    }

    /// The exact rational, when the weight was computed exactly.
    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Weight::Exact(r) => Some(r),
            Weight::Float(_) => None,
        }
    }

    /// Whether the weight is exactly zero.
    pub fn is_zero(&self) -> bool {
        match self {
            Weight::Exact(r) => r.is_zero(),
            Weight::Float(x) => *x == 0.0,
        }
    }
}

impl std::fmt::Display for Weight {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Weight::Exact(r) => write!(f, "{r}"),
            Weight::Float(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Debug)]
enum Rows {
    Exact(Vec<Vec<BigInt>>),
    Float(Vec<Vec<f64>>),
}

/// Table of walk weights `f_{i,j}` for `0 <= i <= n_max`, altitude `j`
/// constrained to stay at or below an optional ceiling.
#[derive(Debug)]
pub struct CountTable {
    ceiling: Option<i64>,
    n_max: i64,
    los: Vec<i64>,
    rows: Rows,
    /// Common denominator base: row `i` stores numerators over `denom^i`.
    denom: BigInt,
}

/// Clears the weights to integers: returns `(D, [(j, p_j * D)])`.
fn integer_weights(poly: &JumpPolynomial) -> (BigInt, Vec<(i64, BigInt)>) {
    let mut denom = BigInt::one();
    for w in poly.weights().values() {
        denom = denom.lcm(w.denom());
    }
    let cleared = poly
        .weights()
        .iter()
        .map(|(&j, w)| (j, (w * BigRational::from_integer(denom.clone())).to_integer()))
        .collect();
    (denom, cleared)
}

fn float_weights(poly: &JumpPolynomial) -> Vec<(i64, f64)> {
    poly.weights()
        .iter()
        .map(|(&j, w)| (j, w.to_f64().unwrap_or(f64::NAN)))
        .collect()
}

fn band(i: i64, c: i64, d: i64, ceiling: Option<i64>) -> (i64, i64) {
    let lo = -c * i;
    let hi = match ceiling {
        Some(h) => (d * i).min(h),
        None => d * i,
    };
    (lo, hi)
}

/// Builds the full table of bounded-walk weights by the product recurrence.
///
/// Errors with the memory guard when the table would exceed
/// [`COUNT_TABLE_ENTRY_CAP`] entries.
pub fn count_table(
    poly: &JumpPolynomial,
    n_max: i64,
    ceiling: Option<i64>,
    mode: ArithMode,
) -> Result<CountTable> {
    if n_max < 0 {
        return Err(Error::InvalidArgument("n_max must be >= 0".into()));
    }
    if let Some(h) = ceiling {
        if h < 0 {
            return Err(Error::InvalidArgument("ceiling must be >= 0".into()));
        }
    }
    let (c, d) = (poly.c(), poly.d());
    let mut needed: u64 = 0;
    for i in 0..=n_max {
        let (lo, hi) = band(i, c, d, ceiling);
        needed += (hi - lo + 1) as u64;
    }
    if needed > COUNT_TABLE_ENTRY_CAP {
        return Err(Error::MemoryGuard { needed, cap: COUNT_TABLE_ENTRY_CAP });
    }

    let mut los = Vec::with_capacity(n_max as usize + 1);
    for i in 0..=n_max {
        los.push(band(i, c, d, ceiling).0);
    }

    let rows = match mode {
        ArithMode::Exact => {
            let (_, cleared) = integer_weights(poly);
            let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n_max as usize + 1);
            rows.push(vec![BigInt::one()]);
            for i in 1..=n_max {
                let (lo, hi) = band(i, c, d, ceiling);
                let (plo, phi) = band(i - 1, c, d, ceiling);
                let prev = &rows[(i - 1) as usize];
                let mut row = Vec::with_capacity((hi - lo + 1) as usize);
                for v in lo..=hi {
                    let mut acc = BigInt::zero();
                    for (j, w) in &cleared {
                        let src = v - j;
                        if src >= plo && src <= phi {
                            acc += w * &prev[(src - plo) as usize];
                        }
                    }
                    row.push(acc);
                }
                rows.push(row);
            }
            Rows::Exact(rows)
        }
        ArithMode::Float => {
            let cleared = float_weights(poly);
            let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n_max as usize + 1);
            rows.push(vec![1.0]);
            for i in 1..=n_max {
                let (lo, hi) = band(i, c, d, ceiling);
                let (plo, phi) = band(i - 1, c, d, ceiling);
                let prev = &rows[(i - 1) as usize];
                let mut row = Vec::with_capacity((hi - lo + 1) as usize);
                for v in lo..=hi {
                    let mut acc = 0.0;
                    for (j, w) in &cleared {
                        let src = v - j;
                        if src >= plo && src <= phi {
                            acc += w * prev[(src - plo) as usize];
                        }
                    }
                    row.push(acc);
                }
                rows.push(row);
            }
            Rows::Float(rows)
        }
    };

    let denom = match mode {
        ArithMode::Exact => integer_weights(poly).0,
        ArithMode::Float => BigInt::one(),
    };
    Ok(CountTable { ceiling, n_max, los, rows, denom })
}

impl CountTable {
    /// Largest time step stored.
    pub fn n_max(&self) -> i64 {
        self.n_max
    }

    /// The ceiling the table was built with, if any.
    pub fn ceiling(&self) -> Option<i64> {
        self.ceiling
    }

    /// Arithmetic mode of the stored values.
    pub fn mode(&self) -> ArithMode {
        match self.rows {
            Rows::Exact(_) => ArithMode::Exact,
            Rows::Float(_) => ArithMode::Float,
        }
    }

    /// Altitude range `(lo, hi)` stored for step `i`.
    pub fn altitude_range(&self, i: i64) -> (i64, i64) {
        let lo = self.los[i as usize];
        let width = match &self.rows {
            Rows::Exact(rows) => rows[i as usize].len(),
            Rows::Float(rows) => rows[i as usize].len(),
        };
        (lo, lo + width as i64 - 1)
    }

    /// Weight of walks at step `i`, altitude `j`; zero outside the band.
    pub fn value(&self, i: i64, j: i64) -> Weight {
        let (lo, hi) = self.altitude_range(i);
        match &self.rows {
            Rows::Exact(rows) => {
                if j < lo || j > hi {
                    return Weight::Exact(BigRational::zero());
                }
                let num = rows[i as usize][(j - lo) as usize].clone();
                Weight::Exact(BigRational::new(num, self.denom.pow(i as u32)))
            }
            Rows::Float(rows) => {
                if j < lo || j > hi {
                    return Weight::Float(0.0);
                }
                Weight::Float(rows[i as usize][(j - lo) as usize])
            }
        }
    }

    /// Sum of the weights in row `i`.
    pub fn row_sum(&self, i: i64) -> Weight {
        match &self.rows {
            Rows::Exact(rows) => {
                let num: BigInt = rows[i as usize].iter().sum();
                Weight::Exact(BigRational::new(num, self.denom.pow(i as u32)))
            }
            Rows::Float(rows) => Weight::Float(rows[i as usize].iter().sum()),
        }
    }
}

/// Rolling-row bridge DP: weight of length-`n` walks ending at altitude 0,
/// staying at or below `ceiling` when one is set.
///
/// The altitude band is clipped both by reachability from 0 and by the
/// ability to return to 0 in the remaining steps, so memory stays linear in
/// `n`.
fn bridge_weight(poly: &JumpPolynomial, n: i64, ceiling: Option<i64>, mode: ArithMode) -> Weight {
    let (c, d) = (poly.c(), poly.d());
    let clip = |i: i64| -> (i64, i64) {
        let lo = (-c * i).max(-d * (n - i));
        let mut hi = (d * i).min(c * (n - i));
        if let Some(h) = ceiling {
            hi = hi.min(h);
        }
        (lo, hi)
    };
    match mode {
        ArithMode::Exact => {
            let (denom, cleared) = integer_weights(poly);
            let mut prev = vec![BigInt::one()];
            let mut plo = 0i64;
            for i in 1..=n {
                let (lo, hi) = clip(i);
                if lo > hi {
                    return Weight::Exact(BigRational::zero());
                }
                let phi = plo + prev.len() as i64 - 1;
                let mut row = Vec::with_capacity((hi - lo + 1) as usize);
                for v in lo..=hi {
                    let mut acc = BigInt::zero();
                    for (j, w) in &cleared {
                        let src = v - j;
                        if src >= plo && src <= phi {
                            acc += w * &prev[(src - plo) as usize];
                        }
                    }
                    row.push(acc);
                }
                prev = row;
                plo = lo;
            }
            let num = if plo <= 0 && 0 <= plo + prev.len() as i64 - 1 {
                prev[(-plo) as usize].clone()
            } else {
                BigInt::zero()
            };
            Weight::Exact(BigRational::new(num, denom.pow(n as u32)))
        }
        ArithMode::Float => {
            let cleared = float_weights(poly);
            let mut prev = vec![1.0f64];
            let mut plo = 0i64;
            for i in 1..=n {
                let (lo, hi) = clip(i);
                if lo > hi {
                    return Weight::Float(0.0);
                }
                let phi = plo + prev.len() as i64 - 1;
                let mut row = Vec::with_capacity((hi - lo + 1) as usize);
                for v in lo..=hi {
                    let mut acc = 0.0;
                    for (j, w) in &cleared {
                        let src = v - j;
                        if src >= plo && src <= phi {
                            acc += w * prev[(src - plo) as usize];
                        }
                    }
                    row.push(acc);
                }
                prev = row;
                plo = lo;
            }
            let val = if plo <= 0 && 0 <= plo + prev.len() as i64 - 1 {
                prev[(-plo) as usize]
            } else {
                0.0
            };
            Weight::Float(val)
        }
    }
}

/// Weight of length-`n` bridges whose maximum altitude strictly exceeds `h`.
pub fn bridge_tail(poly: &JumpPolynomial, n: i64, h: i64, mode: ArithMode) -> Result<Weight> {
    if n < 0 || h < 0 {
        return Err(Error::InvalidArgument("bridge_tail requires n >= 0 and h >= 0".into()));
    }
    let total = bridge_weight(poly, n, None, mode);
    let below = bridge_weight(poly, n, Some(h), mode);
    Ok(match (total, below) {
        (Weight::Exact(a), Weight::Exact(b)) => Weight::Exact(a - b),
        (Weight::Float(a), Weight::Float(b)) => Weight::Float(a - b),
        _ => unreachable!("modes match"),
    })
}

/// Weight of all length-`n` bridges: `V_n = [u^0] P(u)^n`.
pub fn unbounded_bridge_count(poly: &JumpPolynomial, n: i64, mode: ArithMode) -> Result<Weight> {
    if n < 0 {
        return Err(Error::InvalidArgument("n must be >= 0".into()));
    }
    Ok(bridge_weight(poly, n, None, mode))
}

/// Probability that a uniform `+1/-1` bridge of even length `m` reaches
/// altitude `h` or higher: `C(m, m/2 + h) / C(m, m/2)`.
pub fn andre_reflection(m: i64, h: i64) -> Result<BigRational> {
    if m < 0 || m % 2 != 0 {
        return Err(Error::InvalidArgument(format!("length {m} must be even and nonnegative")));
    }
    if h < 0 || h > m / 2 {
        return Err(Error::InvalidArgument(format!("height {h} must lie in [0, {}]", m / 2)));
    }
    let num = num_integer::binomial(BigInt::from(m), BigInt::from(m / 2 + h));
    let den = num_integer::binomial(BigInt::from(m), BigInt::from(m / 2));
    Ok(BigRational::new(num, den))
}
