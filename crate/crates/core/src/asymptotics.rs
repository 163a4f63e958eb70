//! Asymptotic results: saddle-point expansions of unbounded bridge counts,
//! the Rayleigh limit law for the bridge maximum, and the higher-order tail
//! expansion for centered Lukasiewicz walks in both the monomial and the
//! Hermite-family bases.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::Error;
use crate::hermite::{q_family, IntPolynomial};
use crate::prec::Real;
use crate::roots::singularities;
use crate::series::{luka_integrand, SeriesVar, TruncatedSeries};
use crate::walk::{structural_constants, JumpPolynomial};
use crate::Result;

/// Saddle-point expansion of the unbounded bridge count
/// `V_n ~ p lambda0 P(tau)^n / sqrt(2 pi n) * (d_0 + d_1/n + ...)`.
#[derive(Clone, Debug)]
pub struct SaddleExpansion {
    /// Fundamental period `p`.
    pub period: u64,
    /// Leading constant `(1/tau) sqrt(P(tau)/P''(tau))`.
    pub lambda0: Real,
    /// Growth base `P(tau)`.
    pub ptau: Real,
    /// Correction coefficients `d_0 = 1, d_1, ..., d_K` of the `1/n` series.
    pub corrections: Vec<Real>,
    /// Working precision in decimal digits.
    pub digits: usize,
}

/// Double factorial `(v-1)!! = 1*3*5*...*(v-1)` for even `v`; 1 at `v = 0`.
fn double_factorial_odd(v: usize, digits: usize) -> Real {
    let mut acc = Real::one(digits);
    let mut m = 1i64;
    while m < v as i64 {
        acc = &acc * &Real::from_i64(m, digits);
        m += 2;
    }
    acc
}

/// Correction coefficients `d_j` of the Gaussian saddle integral for a
/// probability family `q` with (numerically) zero mean: expands
/// `exp(sum_{k>=3} c_k (iy)^k n^{1-k/2} / k!)` termwise and integrates
/// against the Gaussian of variance `1/c_2`.
fn dseries(weights: &[(i64, Real)], jmax: usize, digits: usize) -> Result<Vec<Real>> {
    let order = 2 * jmax + 2;
    // Moment series of q as a power series in y: sum_m m_m y^m / m!.
    let mut factorial = Real::one(digits);
    let mut coeffs = Vec::with_capacity(order + 1);
    for m in 0..=order {
        if m > 0 {
            factorial = &factorial * &Real::from_i64(m as i64, digits);
        }
        let mut moment = Real::zero(digits);
        for (j, w) in weights {
            moment = &moment + &(w * &Real::from_i64(*j, digits).powi(m as i64));
        }
        coeffs.push(&moment / &factorial);
    }
    let kappa = TruncatedSeries::new(coeffs, SeriesVar::T).log()?;
    let c2 = &kappa.coeff(2) * &Real::from_i64(2, digits);
    if !(c2 > Real::zero(digits)) {
        return Err(Error::NoConvergence("vanishing variance in the saddle expansion".into()));
    }
    let sigma = c2.sqrt();

    // Bivariate exponent in (nu power, y power); each cumulant k >= 3
    // contributes at (k-2, k). The imaginary unit is folded in at the
    // Gaussian-reduction step as (-1)^{v/2}.
    let mut t_exp: BTreeMap<(usize, usize), Real> = BTreeMap::new();
    for k in 3..=order {
        let c = kappa.coeff(k);
        if !c.is_zero() && k - 2 <= 2 * jmax {
            t_exp.insert((k - 2, k), c);
        }
    }
    let vcap = 3 * 2 * jmax;
    let mut expanded: BTreeMap<(usize, usize), Real> = BTreeMap::new();
    expanded.insert((0, 0), Real::one(digits));
    let mut term: BTreeMap<(usize, usize), Real> = expanded.clone();
    for r in 1..=(2 * jmax).max(1) {
        let mut next: BTreeMap<(usize, usize), Real> = BTreeMap::new();
        for (&(m1, v1), c1) in &term {
            for (&(m2, v2), c2) in &t_exp {
                let (m, v) = (m1 + m2, v1 + v2);
                if m > 2 * jmax || v > vcap {
                    continue;
                }
                let add = c1 * c2;
                next.entry((m, v))
                    .and_modify(|e| *e = &*e + &add)
                    .or_insert(add);
            }
        }
        if next.is_empty() {
            break;
        }
        let rinv = &Real::one(digits) / &Real::from_i64(r as i64, digits);
        for v in next.values_mut() {
            *v = &*v * &rinv;
        }
        for (key, val) in &next {
            expanded
                .entry(*key)
                .and_modify(|e| *e = &*e + val)
                .or_insert_with(|| val.clone());
        }
        term = next;
    }

    let mut out = Vec::with_capacity(jmax + 1);
    for j in 0..=jmax {
        let mut dj = Real::zero(digits);
        for (&(m, v), c) in &expanded {
            if m != 2 * j || v % 2 != 0 {
                continue;
            }
            let sign = if (v / 2) % 2 == 0 { 1 } else { -1 };
            let factor = &(&double_factorial_odd(v, digits) / &sigma.powi(v as i64))
                * &Real::from_i64(sign, digits);
            dj = &dj + &(c * &factor);
        }
        out.push(dj);
    }
    Ok(out)
}

/// Builds the saddle expansion of `V_n` for a reduced walk; correction
/// coefficients come from the cumulants of the tau-tilted probability
/// family, so irrational tau is handled at working precision.
pub fn saddle_expansion(poly: &JumpPolynomial, order: usize, digits: usize) -> Result<SaddleExpansion> {
    let g = poly.reduced_gcd();
    if g != 1 {
        return Err(Error::NonReduced(g));
    }
    let profile = structural_constants(poly, digits)?;
    let tilted: Vec<(i64, Real)> = poly
        .weights()
        .iter()
        .map(|(&j, w)| {
            let q = &(&Real::from_ratio(w, digits) * &profile.tau.powi(j)) / &profile.ptau;
            (j, q)
        })
        .collect();
    let corrections = dseries(&tilted, order, digits)?;
    Ok(SaddleExpansion {
        period: profile.period,
        lambda0: profile.lambda0,
        ptau: profile.ptau,
        corrections,
        digits,
    })
}

/// Saddle estimate of the unbounded bridge count `V_n`: zero off multiples
/// of the period, `p * lambda0 * P(tau)^n / sqrt(2 pi n)` times the `1/n`
/// corrections otherwise.
pub fn vn_asymptotic(poly: &JumpPolynomial, n: i64, order: usize, digits: usize) -> Result<Real> {
    if n < 1 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    let exp = saddle_expansion(poly, order, digits)?;
    if n % exp.period as i64 != 0 {
        return Ok(Real::zero(digits));
    }
    let nreal = Real::from_i64(n, digits);
    let two_pi_n = &(&Real::pi(digits) * &Real::from_i64(2, digits)) * &nreal;
    let mut series = Real::zero(digits);
    let mut npow = Real::one(digits);
    for d in &exp.corrections {
        series = &series + &(d / &npow);
        npow = &npow * &nreal;
    }
    let lead = &(&Real::from_i64(exp.period as i64, digits) * &exp.lambda0)
        * &(&exp.ptau.powi(n) / &two_pi_n.sqrt());
    Ok(&lead * &series)
}

/// Limiting probability that a length-`n` bridge reaches `x sigma sqrt(n)`,
/// with `sigma^2 = P''(tau)`: `exp(-2 x^2 / (rho tau^2))`.
///
/// Requires a reduced walk whose branch points are all simple.
pub fn rayleigh_tail(poly: &JumpPolynomial, x: &Real, digits: usize) -> Result<Real> {
    if !(x > &Real::zero(digits)) {
        return Err(Error::InvalidArgument("x must be positive".into()));
    }
    let g = poly.reduced_gcd();
    if g != 1 {
        return Err(Error::NonReduced(g));
    }
    singularities(poly, digits)?;
    let profile = structural_constants(poly, digits)?;
    let exponent = &(&(&Real::from_i64(-2, digits) * &(x * x)) / &profile.rho)
        / &profile.tau.powi(2);
    Ok(exponent.exp())
}

/// Higher-order tail expansion `beta ~ e^{-2x^2} sum_k n^{-k/2} G_k(x)`.
///
/// `terms_x[k]` holds the divided polynomial `G_k` (ascending `x` powers);
/// `terms_he[k]` holds the undivided numerator `N_k` in the Hermite-family
/// basis as `(index j, x power a, coefficient)` triples, where the family is
/// the `Q`-recurrence one (signed); `dseries` is the denominator expansion
/// shared with the saddle machinery.
#[derive(Clone, Debug)]
pub struct TailExpansion {
    /// Highest power of `n^{-1/2}` included.
    pub order: usize,
    /// Per `k`: coefficients of `G_k(x)`.
    pub terms_x: Vec<Vec<Real>>,
    /// Per `k`: `(j, a, coeff)` meaning `coeff * x^a * B_j(x)` inside `N_k`.
    pub terms_he: Vec<Vec<(usize, usize, Real)>>,
    /// Denominator corrections `d_0 = 1, d_1, ...` (powers of `1/n`).
    pub dseries: Vec<Real>,
    /// `P''(1)`.
    pub sigma2: Real,
    /// `P'''(1)`.
    pub xi: Real,
    /// `P''''(1)`.
    pub theta: Real,
    /// Working precision in decimal digits.
    pub digits: usize,
}

fn alt_sign(j: usize) -> BigInt {
    BigInt::from(if j % 2 == 0 { 1 } else { -1 })
}

type Tri = BTreeMap<(usize, usize, usize), Real>;

fn tri_mul(a: &Tri, b: &Tri, kcap: usize, jcap: usize, acap: usize) -> Tri {
    let mut out = Tri::new();
    for (&(k1, j1, a1), c1) in a {
        if c1.is_zero() {
            continue;
        }
        for (&(k2, j2, a2), c2) in b {
            let (k, j, x) = (k1 + k2, j1 + j2, a1 + a2);
            if k > kcap || j > jcap || x > acap || c2.is_zero() {
                continue;
            }
            let add = c1 * c2;
            out.entry((k, j, x)).and_modify(|e| *e = &*e + &add).or_insert(add);
        }
    }
    out
}

fn tri_exp(t: &Tri, kcap: usize, jcap: usize, acap: usize, digits: usize) -> Tri {
    let mut acc = Tri::new();
    acc.insert((0, 0, 0), Real::one(digits));
    let mut term = acc.clone();
    for r in 1..=kcap.max(1) {
        term = tri_mul(&term, t, kcap, jcap, acap);
        if term.is_empty() {
            break;
        }
        let rinv = &Real::one(digits) / &Real::from_i64(r as i64, digits);
        for v in term.values_mut() {
            *v = &*v * &rinv;
        }
        for (key, val) in &term {
            acc.entry(*key).and_modify(|e| *e = &*e + val).or_insert_with(|| val.clone());
        }
    }
    acc
}

/// Builds the tail expansion for a centered Lukasiewicz walk up to order
/// `n^{-K/2}`.
pub fn luka_expansion(poly: &JumpPolynomial, k_order: usize, digits: usize) -> Result<TailExpansion> {
    singularities(poly, digits)?;
    let series_order = (2 * k_order + 2).max(16);
    let li = luka_integrand(poly, series_order, digits)?;
    let sigma = li.sigma.clone();

    let kcap = k_order;
    let jcap = 2 * k_order + 2;
    let acap = k_order.max(1);

    // Exponent of the z^{-n} factor: sum_{j>=1} s^{2j+2} nu^{2j} / (j+1).
    let mut exponent = Tri::new();
    for j in 1.. {
        let (k, s) = (2 * j, 2 * j + 2);
        if k > kcap || s > jcap {
            break;
        }
        exponent.insert(
            (k, s, 0),
            &Real::one(digits) / &Real::from_i64(j as i64 + 1, digits),
        );
    }
    // Exponent of the centered log-ratio factor:
    // x sigma sum_{i>=3 odd} ell_i s^i nu^{i-1}.
    let mut i = 3;
    while i < li.ell.len() && i - 1 <= kcap {
        if i % 2 == 1 && i <= jcap {
            let cf = &sigma * &li.ell[i];
            if !cf.is_zero() {
                exponent.insert((i - 1, i, 1), cf);
            }
        }
        i += 1;
    }
    let expanded = tri_exp(&exponent, kcap, jcap, acap, digits);

    let mut slope = Tri::new();
    for (idx, g) in li.s.coeffs().iter().enumerate() {
        if idx > kcap || idx > jcap {
            break;
        }
        if !g.is_zero() {
            slope.insert((idx, idx, 0), g.clone());
        }
    }
    let mut r_series = tri_mul(&expanded, &slope, kcap, jcap, acap);
    let half = Real::from_str_dec("0.5", digits);
    for v in r_series.values_mut() {
        *v = &*v * &half;
    }

    // Half-integer time powers become the signed Q-family polynomials:
    // each s^j picks up B_j(x) / (2 sqrt 2)^j and a global -sqrt(2) sigma.
    let sqrt2 = Real::from_i64(2, digits).sqrt();
    let global = -&(&sqrt2 * &sigma);
    let two_sqrt2 = &Real::from_i64(2, digits) * &sqrt2;
    let b_polys: Vec<IntPolynomial> = (0..=jcap).map(|j| q_family(j).scale(&alt_sign(j))).collect();

    let mut numerators: Vec<Vec<Real>> = vec![vec![Real::zero(digits)]; kcap + 1];
    let mut terms_he_maps: Vec<BTreeMap<(usize, usize), Real>> = vec![BTreeMap::new(); kcap + 1];
    for (&(k, j, a), cf) in &r_series {
        let factor = &(&global / &two_sqrt2.powi(j as i64)) * cf;
        terms_he_maps[k]
            .entry((j, a))
            .and_modify(|e| *e = &*e + &factor)
            .or_insert_with(|| factor.clone());
        let poly_b = &b_polys[j];
        let need = a + poly_b.degree() + 1;
        if numerators[k].len() < need {
            numerators[k].resize(need, Real::zero(digits));
        }
        for (deg, cb) in poly_b.coeffs().iter().enumerate() {
            let add = &factor * &Real::from_ratio(&BigRational::from_integer(cb.clone()), digits);
            numerators[k][a + deg] = &numerators[k][a + deg] + &add;
        }
    }

    let noise = Real::from_str_dec(&format!("1e-{}", digits / 2), digits);
    let n0_ok = (&numerators[0][0] - &Real::one(digits)).abs() < noise
        && numerators[0].iter().skip(1).all(|c| c.abs() < noise);
    if !n0_ok {
        return Err(Error::Series("leading tail term deviates from 1".into()));
    }

    let tilted: Vec<(i64, Real)> = poly
        .weights()
        .iter()
        .map(|(&j, w)| (j, Real::from_ratio(w, digits)))
        .collect();
    let dser = dseries(&tilted, kcap / 2 + 1, digits)?;

    let mut terms_x: Vec<Vec<Real>> = Vec::with_capacity(kcap + 1);
    for k in 0..=kcap {
        let mut g = numerators[k].clone();
        for j in 1..=k / 2 {
            let prev: &Vec<Real> = &terms_x[k - 2 * j];
            if g.len() < prev.len() {
                g.resize(prev.len(), Real::zero(digits));
            }
            for (deg, c) in prev.iter().enumerate() {
                g[deg] = &g[deg] - &(&dser[j] * c);
            }
        }
        terms_x.push(g);
    }

    let terms_he = terms_he_maps
        .into_iter()
        .map(|m| {
            m.into_iter()
                .filter(|(_, c)| c.abs() > noise)
                .map(|((j, a), c)| (j, a, c))
                .collect()
        })
        .collect();

    Ok(TailExpansion {
        order: kcap,
        terms_x,
        terms_he,
        dseries: dser,
        sigma2: Real::from_ratio(&poly.moment_ff(2), digits),
        xi: Real::from_ratio(&poly.moment_ff(3), digits),
        theta: Real::from_ratio(&poly.moment_ff(4), digits),
        digits,
    })
}

fn eval_poly(coeffs: &[Real], x: &Real, digits: usize) -> Real {
    let mut acc = Real::zero(digits);
    for c in coeffs.iter().rev() {
        acc = &(&acc * x) + c;
    }
    acc
}

/// Evaluates the expansion at finite `n`:
/// `e^{-2x^2} sum_k n^{-k/2} G_k(x)`.
pub fn evaluate_tail(expansion: &TailExpansion, n: i64, x: &Real) -> Result<Real> {
    let digits = expansion.digits;
    if n < 1 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    if !(x > &Real::zero(digits)) {
        return Err(Error::InvalidArgument("x must be positive".into()));
    }
    let nu = &Real::one(digits) / &Real::from_i64(n, digits).sqrt();
    let mut acc = Real::zero(digits);
    let mut nupow = Real::one(digits);
    for k in 0..=expansion.order {
        acc = &acc + &(&nupow * &eval_poly(&expansion.terms_x[k], x, digits));
        nupow = &nupow * &nu;
    }
    let gauss = (&(&Real::from_i64(-2, digits) * x) * x).exp();
    Ok(&gauss * &acc)
}

impl TailExpansion {
    /// Numerically expands the Hermite-basis storage (convolved with the
    /// inverse denominator series) and returns its largest deviation from
    /// `terms_x` over all orders at the sample point `x`.
    pub fn basis_gap(&self, x: &Real) -> Real {
        let digits = self.digits;
        // Inverse of the denominator series: e_0 = 1,
        // e_m = -sum_{i=1..m} d_i e_{m-i}.
        let mut inv = vec![Real::one(digits)];
        for m in 1..self.dseries.len() {
            let mut acc = Real::zero(digits);
            for i in 1..=m {
                acc = &acc + &(&self.dseries[i] * &inv[m - i]);
            }
            inv.push(-acc);
        }
        let b_eval = |j: usize, a: usize, c: &Real| -> Real {
            let b = q_family(j).scale(&alt_sign(j));
            let mut val = Real::from_ratio(
                &BigRational::from_integer(b.coeffs().last().unwrap().clone()),
                digits,
            );
            for cb in b.coeffs().iter().rev().skip(1) {
                val = &(&val * x) + &Real::from_ratio(&BigRational::from_integer(cb.clone()), digits);
            }
            &(c * &x.powi(a as i64)) * &val
        };
        let mut worst = Real::zero(digits);
        for k in 0..=self.order {
            let mut he_side = Real::zero(digits);
            for j in 0..=(k / 2).min(inv.len() - 1) {
                let mut nk = Real::zero(digits);
                for (bj, a, c) in &self.terms_he[k - 2 * j] {
                    nk = &nk + &b_eval(*bj, *a, c);
                }
                he_side = &he_side + &(&inv[j] * &nk);
            }
            let x_side = eval_poly(&self.terms_x[k], x, digits);
            worst = worst.max_val(&(&he_side - &x_side).abs());
        }
        worst
    }
}

/// Result of comparing a term's Hermite-family support against the
/// projection skeleton.
#[derive(Clone, Debug)]
pub struct SkeletonReport {
    /// Whether the observed support is contained in the allowed one.
    pub pass: bool,
    /// `(index, x power)` pairs present in the term.
    pub observed: Vec<(usize, usize)>,
    /// `(index, x power)` pairs the skeleton allows.
    pub allowed: Vec<(usize, usize)>,
}

/// Checks that term `k`'s Hermite-family support lies inside the skeleton:
/// indices `k + i` with `x` power `a`, where `0 <= i <= 2 floor(k/2)`,
/// `a = i (mod 2)`, and `a <= min(i, 2 floor(k/2) - i)`.
pub fn hermite_skeleton_check(expansion: &TailExpansion, k: usize) -> Result<SkeletonReport> {
    if k > expansion.order {
        return Err(Error::InvalidArgument(format!(
            "term {k} beyond expansion order {}",
            expansion.order
        )));
    }
    let cap = 2 * (k / 2);
    let mut allowed = Vec::new();
    for i in 0..=cap {
        for a in 0..=i.min(cap - i) {
            if a % 2 == i % 2 {
                allowed.push((k + i, a));
            }
        }
    }
    let observed: Vec<(usize, usize)> =
        expansion.terms_he[k].iter().map(|(j, a, _)| (*j, *a)).collect();
    let pass = observed.iter().all(|pair| allowed.contains(pair));
    Ok(SkeletonReport { pass, observed, allowed })
}
