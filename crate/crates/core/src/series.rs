//! Truncated power series over configurable-precision reals, in the ramified
//! variable `X` (with `z = 1 - X^2`) or in `t`, plus Newton expansion of the
//! conjugate kernel branches at the singularity.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::Error;
use crate::prec::Real;
use crate::walk::JumpPolynomial;
use crate::Result;

/// Formal variable tag carried by a series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesVar {
    /// Ramified singular variable, `z = 1 - X^2`.
    X,
    /// Rescaled time variable of the tail integral.
    T,
}

/// Named series operation for the dispatch entry point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesOp {
    Add,
    Mul,
    Div,
    Log,
    Exp,
    Sqrt,
    Compose,
}

/// Dense truncated series `a_0 + a_1 X + ... + a_N X^N`.
#[derive(Clone, Debug)]
pub struct TruncatedSeries {
    coeffs: Vec<Real>,
    var: SeriesVar,
}

impl TruncatedSeries {
    /// Wraps explicit coefficients `a_0..a_N`.
    pub fn new(coeffs: Vec<Real>, var: SeriesVar) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least the constant term");
        TruncatedSeries { coeffs, var }
    }

    /// The constant `value` as a series of the given order.
    pub fn constant(value: Real, order: usize, var: SeriesVar) -> Self {
        let digits = value.digits();
        let mut coeffs = vec![Real::zero(digits); order + 1];
        coeffs[0] = value;
        TruncatedSeries { coeffs, var }
    }

    /// The bare variable as a series of the given order.
    pub fn identity(order: usize, digits: usize, var: SeriesVar) -> Self {
        assert!(order >= 1, "identity needs order >= 1");
        let mut coeffs = vec![Real::zero(digits); order + 1];
        coeffs[1] = Real::one(digits);
        TruncatedSeries { coeffs, var }
    }

    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Variable tag.
    pub fn var(&self) -> SeriesVar {
        self.var
    }

    /// Working precision in decimal digits.
    pub fn digits(&self) -> usize {
        self.coeffs[0].digits()
    }

    /// Coefficient of the `k`-th power; zero beyond the order.
    pub fn coeff(&self, k: usize) -> Real {
        self.coeffs.get(k).cloned().unwrap_or_else(|| Real::zero(self.digits()))
    }

    /// All stored coefficients, ascending powers.
    pub fn coeffs(&self) -> &[Real] {
        &self.coeffs
    }

    /// Drops coefficients above order `n` (or zero-pads up to it).
    pub fn truncate(&self, n: usize) -> Self {
        let digits = self.digits();
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(n + 1, Real::zero(digits));
        TruncatedSeries { coeffs, var: self.var }
    }

    /// Coefficients with magnitude at or below this threshold are treated as
    /// zero noise when measuring valuation: 10^(-3*digits/5), which sits well
    /// above the rounding floor yet far below any honest coefficient.
    fn noise_floor(&self) -> Real {
        Real::from_str_dec(&format!("1e-{}", 3 * self.digits() / 5), self.digits())
    }

    /// Index of the first coefficient above the noise floor, if any.
    pub fn valuation(&self) -> Option<usize> {
        let eps = self.noise_floor();
        self.coeffs.iter().position(|c| c.abs() > eps)
    }

    fn assert_compatible(&self, rhs: &TruncatedSeries) {
        assert_eq!(self.var, rhs.var, "series variables must match");
    }

    /// Pointwise sum, truncated to the smaller order.
    pub fn add(&self, rhs: &TruncatedSeries) -> Self {
        self.assert_compatible(rhs);
        let n = self.order().min(rhs.order());
        let coeffs = (0..=n).map(|k| &self.coeffs[k] + &rhs.coeffs[k]).collect();
        TruncatedSeries { coeffs, var: self.var }
    }

    /// Pointwise difference, truncated to the smaller order.
    pub fn sub(&self, rhs: &TruncatedSeries) -> Self {
        self.assert_compatible(rhs);
        let n = self.order().min(rhs.order());
        let coeffs = (0..=n).map(|k| &self.coeffs[k] - &rhs.coeffs[k]).collect();
        TruncatedSeries { coeffs, var: self.var }
    }

    /// Negation.
    pub fn neg(&self) -> Self {
        TruncatedSeries { coeffs: self.coeffs.iter().map(|c| -c).collect(), var: self.var }
    }

    /// Multiplication by a constant.
    pub fn scale(&self, factor: &Real) -> Self {
        TruncatedSeries { coeffs: self.coeffs.iter().map(|c| c * factor).collect(), var: self.var }
    }

    /// Cauchy product, truncated to the smaller order.
    pub fn mul(&self, rhs: &TruncatedSeries) -> Self {
        self.assert_compatible(rhs);
        let n = self.order().min(rhs.order());
        let digits = self.digits();
        let mut coeffs = vec![Real::zero(digits); n + 1];
        for i in 0..=n.min(self.order()) {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=(n - i).min(rhs.order()) {
                coeffs[i + j] = &coeffs[i + j] + &(&self.coeffs[i] * &rhs.coeffs[j]);
            }
        }
        TruncatedSeries { coeffs, var: self.var }
    }

    /// Division, stripping any common valuation first.
    ///
    /// The divisor's valuation must not exceed the dividend's; both are
    /// shifted down by the divisor's valuation (noise-floor detection), so
    /// the result loses that many orders.
    pub fn div(&self, rhs: &TruncatedSeries) -> Result<Self> {
        self.assert_compatible(rhs);
        let vb = rhs
            .valuation()
            .ok_or_else(|| Error::Series("division by a numerically zero series".into()))?;
        let n = self.order().min(rhs.order());
        if vb > n {
            return Err(Error::Series("divisor valuation exceeds the working order".into()));
        }
        let out_order = n - vb;
        let digits = self.digits();
        if let Some(va) = self.valuation() {
            if va < vb {
                return Err(Error::Series(format!(
                    "division would create a pole: valuations {va} < {vb}"
                )));
            }
        } else {
            return Ok(TruncatedSeries::constant(Real::zero(digits), out_order, self.var));
        }
        let a: Vec<Real> = (vb..=n).map(|k| self.coeff(k)).collect();
        let b: Vec<Real> = (vb..=n).map(|k| rhs.coeff(k)).collect();
        let mut q = vec![Real::zero(digits); out_order + 1];
        for k in 0..=out_order {
            let mut acc = a[k].clone();
            for j in 1..=k {
                acc = &acc - &(&b[j] * &q[k - j]);
            }
            q[k] = &acc / &b[0];
        }
        Ok(TruncatedSeries { coeffs: q, var: self.var })
    }

    /// Formal derivative; the order drops by one.
    pub fn derivative(&self) -> Self {
        let digits = self.digits();
        if self.coeffs.len() == 1 {
            return TruncatedSeries::constant(Real::zero(digits), 0, self.var);
        }
        let coeffs = (1..self.coeffs.len())
            .map(|k| &self.coeffs[k] * &Real::from_i64(k as i64, digits))
            .collect();
        TruncatedSeries { coeffs, var: self.var }
    }

    /// Formal antiderivative with zero constant term; the order grows by one.
    pub fn integrate(&self) -> Self {
        let digits = self.digits();
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Real::zero(digits));
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c / &Real::from_i64(k as i64 + 1, digits));
        }
        TruncatedSeries { coeffs, var: self.var }
    }

    /// Series logarithm; the constant term must be positive.
    pub fn log(&self) -> Result<Self> {
        let a0 = &self.coeffs[0];
        if a0.abs() <= self.noise_floor() || a0.is_negative() {
            return Err(Error::Series("log needs a positive constant term".into()));
        }
        let ratio = self.derivative().div(&self.truncate(self.order().saturating_sub(1)))?;
        let mut out = ratio.integrate().truncate(self.order());
        out.coeffs[0] = a0.ln();
        Ok(out)
    }

    /// Series exponential.
    pub fn exp(&self) -> Self {
        let digits = self.digits();
        let n = self.order();
        let mut g = vec![Real::zero(digits); n + 1];
        g[0] = self.coeffs[0].exp();
        for k in 1..=n {
            let mut acc = Real::zero(digits);
            for j in 1..=k {
                let jf = Real::from_i64(j as i64, digits);
                acc = &acc + &(&(&jf * &self.coeffs[j]) * &g[k - j]);
            }
            g[k] = &acc / &Real::from_i64(k as i64, digits);
        }
        TruncatedSeries { coeffs: g, var: self.var }
    }

    /// Principal square root; the constant term must be positive. Callers
    /// wanting the other branch negate the result.
    pub fn sqrt(&self) -> Result<Self> {
        let digits = self.digits();
        let a0 = &self.coeffs[0];
        if a0.abs() <= self.noise_floor() || a0.is_negative() {
            return Err(Error::Series("sqrt needs a positive constant term".into()));
        }
        let n = self.order();
        let mut s = vec![Real::zero(digits); n + 1];
        s[0] = a0.sqrt();
        let two_s0 = &Real::from_i64(2, digits) * &s[0];
        for k in 1..=n {
            let mut acc = self.coeffs[k].clone();
            for j in 1..k {
                acc = &acc - &(&s[j] * &s[k - j]);
            }
            s[k] = &acc / &two_s0;
        }
        Ok(TruncatedSeries { coeffs: s, var: self.var })
    }

    /// Composition `self(rhs)`; `rhs` must have zero constant term.
    pub fn compose(&self, rhs: &TruncatedSeries) -> Result<Self> {
        if rhs.coeffs[0].abs() > rhs.noise_floor() {
            return Err(Error::Series("composition needs a zero constant term".into()));
        }
        let n = self.order().min(rhs.order());
        let digits = self.digits();
        let mut acc = TruncatedSeries::constant(Real::zero(digits), n, rhs.var);
        let inner = rhs.truncate(n);
        for k in (0..=n.min(self.order())).rev() {
            acc = acc.mul(&inner);
            acc.coeffs[0] = &acc.coeffs[0] + &self.coeffs[k];
        }
        Ok(acc)
    }

    /// Horner evaluation at a real point.
    pub fn eval(&self, x: &Real) -> Real {
        let digits = self.digits().max(x.digits());
        let mut acc = Real::zero(digits);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    /// Raises to an integer power `>= 0` at the series order.
    pub fn powi(&self, e: usize) -> Self {
        let mut acc = TruncatedSeries::constant(Real::one(self.digits()), self.order(), self.var);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

/// Dispatches a named operation; `rhs` is required for the binary ones.
pub fn series_arith(
    op: SeriesOp,
    lhs: &TruncatedSeries,
    rhs: Option<&TruncatedSeries>,
) -> Result<TruncatedSeries> {
    let need_rhs =
        || rhs.ok_or_else(|| Error::InvalidArgument(format!("{op:?} needs a second operand")));
    match op {
        SeriesOp::Add => Ok(lhs.add(need_rhs()?)),
        SeriesOp::Mul => Ok(lhs.mul(need_rhs()?)),
        SeriesOp::Div => lhs.div(need_rhs()?),
        SeriesOp::Log => lhs.log(),
        SeriesOp::Exp => Ok(lhs.exp()),
        SeriesOp::Sqrt => lhs.sqrt(),
        SeriesOp::Compose => lhs.compose(need_rhs()?),
    }
}

/// Which conjugate kernel branch to expand at `z = 1` (`X = 0`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// Small branch, seeded `1 - sqrt(2) X / sigma`.
    U1,
    /// Large branch, seeded `1 + sqrt(2) X / sigma`.
    V1,
}

/// A computed branch series together with the measured residual valuations
/// after each Newton update (order-doubling evidence).
#[derive(Clone, Debug)]
pub struct NewtonBranch {
    /// The branch series `w(X)` with `w(0) = 1`.
    pub series: TruncatedSeries,
    /// Valuation of `1 - (1 - X^2) P(w)` after each iteration.
    pub residual_valuations: Vec<usize>,
}

fn require_centered(poly: &JumpPolynomial) -> Result<()> {
    if !poly.is_probabilistic() || !poly.drift().is_zero() {
        return Err(Error::NotCentered(format!(
            "P(1) = {}, P'(1) = {}; both must be 1 and 0 exactly",
            poly.weights().values().sum::<BigRational>(),
            poly.drift()
        )));
    }
    Ok(())
}

/// Evaluates `P^(k)` at a series argument with nonzero constant term.
fn eval_poly_series(
    poly: &JumpPolynomial,
    w: &TruncatedSeries,
    k: usize,
    digits: usize,
) -> Result<TruncatedSeries> {
    let order = w.order();
    let one = TruncatedSeries::constant(Real::one(digits), order, w.var());
    let w_inv = one.div(w)?;
    let mut acc = TruncatedSeries::constant(Real::zero(digits), order, w.var());
    for (&j, weight) in poly.weights() {
        let mut ff = BigInt::from(1);
        for i in 0..k as i64 {
            ff *= BigInt::from(j - i);
        }
        if ff.is_zero() {
            continue;
        }
        let e = j - k as i64;
        let base = if e >= 0 { w.powi(e as usize) } else { w_inv.powi((-e) as usize) };
        let cf = Real::from_ratio(&(weight * BigRational::from_integer(ff)), digits);
        acc = acc.add(&base.scale(&cf));
    }
    Ok(acc)
}

/// Expands the chosen kernel branch of `1 - (1 - X^2) P(w(X)) = 0` with
/// `w(0) = 1` by Newton iteration, recording residual valuations.
///
/// Requires an exactly centered walk (`P(1) = 1`, `P'(1) = 0`); refuses a
/// flat branch point (`P''(1) <= 0`).
pub fn newton_branch(
    poly: &JumpPolynomial,
    branch: Branch,
    order: usize,
    digits: usize,
) -> Result<NewtonBranch> {
    require_centered(poly)?;
    let sigma2 = poly.moment_ff(2);
    if !sigma2.is_positive() {
        return Err(Error::RepeatedFactor(format!("P''(1) = {sigma2} must be positive")));
    }
    let order = order.max(2);
    let sigma = Real::from_ratio(&sigma2, digits).sqrt();
    let slope = &Real::from_i64(2, digits).sqrt() / &sigma;
    let slope = match branch {
        Branch::U1 => -slope,
        Branch::V1 => slope,
    };

    let mut w = TruncatedSeries::constant(Real::one(digits), order, SeriesVar::X);
    w = w.add(&TruncatedSeries::identity(order, digits, SeriesVar::X).scale(&slope));

    let z = {
        let mut s = TruncatedSeries::constant(Real::one(digits), order, SeriesVar::X);
        let x2 = TruncatedSeries::identity(order, digits, SeriesVar::X).powi(2);
        s = s.sub(&x2);
        s
    };
    let one = TruncatedSeries::constant(Real::one(digits), order, SeriesVar::X);

    let mut valuations = Vec::new();
    for iter in 0..40 {
        let f = one.sub(&z.mul(&eval_poly_series(poly, &w, 0, digits)?));
        match f.valuation() {
            None => {
                valuations.push(order + 1);
                break;
            }
            Some(v) => {
                valuations.push(v);
                if v > order {
                    break;
                }
            }
        }
        let df = z.mul(&eval_poly_series(poly, &w, 1, digits)?).neg();
        let step = f.div(&df)?;
        w = w.sub(&step.truncate(order));
        if iter == 0 {
            let first = w.coeff(1);
            let wrong = match branch {
                Branch::U1 => !first.is_negative(),
                Branch::V1 => first.is_negative(),
            };
            if wrong {
                return Err(Error::NoConvergence("seed drifted to the wrong branch".into()));
            }
        }
    }
    let last = valuations.last().copied().unwrap_or(0);
    if last <= order {
        return Err(Error::NoConvergence(format!(
            "kernel residual stalled at valuation {last} before reaching order {order}"
        )));
    }
    Ok(NewtonBranch { series: w, residual_valuations: valuations })
}

/// The branch-derived series feeding the tail integral, all in the variable
/// `X`; callers apply the `t = (X/nu)^2` change of variable themselves.
#[derive(Clone, Debug)]
pub struct LukaIntegrand {
    /// `sqrt(P''(1))`.
    pub sigma: Real,
    /// Small branch `u_1(X)`.
    pub u1: TruncatedSeries,
    /// Large branch `v_1(X)` (the conjugate, `u_1(-X)`).
    pub v1: TruncatedSeries,
    /// `-v_1'(X) / v_1(X)^2`, the `X`-form of `d/dt (1/v_1)`.
    pub m: TruncatedSeries,
    /// `u_1(X) * m(X)`, the full integrand slope.
    pub s: TruncatedSeries,
    /// Coefficients of `log u_1 - log v_1` (odd powers only).
    pub ell: Vec<Real>,
}

/// Builds the tail-integrand series for a centered Lukasiewicz walk
/// (single negative jump `-1`).
pub fn luka_integrand(poly: &JumpPolynomial, order: usize, digits: usize) -> Result<LukaIntegrand> {
    if poly.c() != 1 {
        return Err(Error::NotLukasiewicz(poly.c() as u64));
    }
    require_centered(poly)?;
    let u1 = newton_branch(poly, Branch::U1, order, digits)?.series;
    let v1 = newton_branch(poly, Branch::V1, order, digits)?.series;
    let m = v1.derivative().div(&v1.mul(&v1).truncate(order.saturating_sub(1)))?.neg();
    let s = u1.truncate(m.order()).mul(&m);
    let ell_series = u1.log()?.sub(&v1.log()?);
    let sigma = Real::from_ratio(&poly.moment_ff(2), digits).sqrt();
    Ok(LukaIntegrand { sigma, u1, v1, m, s, ell: ell_series.coeffs().to_vec() })
}
