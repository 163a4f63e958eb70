//! Kernel-root machinery: solve `1 - z P(u) = 0` at complex `z`, split the
//! roots into small and large families, track branches along paths, compute
//! the singularity set, check domination orderings, and evaluate the
//! altitude and tail generating functions from the roots.

use num_rational::BigRational;

use crate::error::Error;
use crate::prec::{Cplx, Real};
use crate::walk::{structural_constants, JumpPolynomial};
use crate::Result;

/// Relative modulus gap under which the small/large split is flagged.
const SPLIT_GAP: f64 = 1e-6;

/// How the small/large families were identified.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    /// Sorted by modulus at a single point.
    ByModulus,
    /// Continued from a real base point where modulus sorting is valid.
    ByTracking,
}

/// All roots of the kernel at one value of `z`.
#[derive(Clone, Debug)]
pub struct RootSystem {
    /// The argument the kernel was solved at.
    pub z: Cplx,
    /// The `c` small roots, sorted by decreasing modulus (`small[0]` is the
    /// dominant one when the split is clean).
    pub small: Vec<Cplx>,
    /// The `d` large roots, sorted by increasing modulus.
    pub large: Vec<Cplx>,
    /// Largest `|1 - z P(root)|` over all roots.
    pub residual: Real,
    /// Set when the `c`-th and `(c+1)`-th moduli are within a relative
    /// `1e-6`, meaning the modulus split is unreliable (e.g. at `z = rho`).
    pub degenerate_split: bool,
    /// How the families were classified.
    pub classification: Classification,
}

impl RootSystem {
    /// Small roots followed by large roots.
    pub fn all_roots(&self) -> Vec<Cplx> {
        self.small.iter().chain(self.large.iter()).cloned().collect()
    }
}

/// Branch points of the kernel roots: pairs of a critical point of `P` and
/// the corresponding singularity `1/P`.
#[derive(Clone, Debug)]
pub struct SingularitySet {
    /// `(upsilon, zeta = 1/P(upsilon))`, sorted by `|zeta|` then argument.
    pub pairs: Vec<(Cplx, Cplx)>,
    /// Index of the pair whose critical point is `tau` (so `zeta = rho`).
    pub rho_index: usize,
}

/// Outcome of a domination scan over a sampled grid of arguments.
#[derive(Clone, Debug)]
pub struct DominationReport {
    /// The sampled arguments.
    pub grid: Vec<Cplx>,
    /// Per sample: whether the strict chain
    /// `|u_i| < |u_1| < |v_1| < |v_j|` held.
    pub chain_ok: Vec<bool>,
    /// Largest observed `|u_k| / |u_1|` for `k >= 2`.
    pub a_hat: Real,
    /// Largest observed `|v_1| / |v_j|` for `j >= 2`.
    pub b_hat: Real,
    /// Indices of samples where the chain failed.
    pub violations: Vec<usize>,
    /// Indices of samples skipped because the modulus split was degenerate.
    pub skipped: Vec<usize>,
}

fn horner(coeffs: &[Cplx], w: &Cplx) -> Cplx {
    let digits = w.re.digits();
    let mut acc = Cplx::zero(digits);
    for c in coeffs.iter().rev() {
        acc = &(&acc * w) + c;
    }
    acc
}

fn horner_with_derivative(coeffs: &[Cplx], w: &Cplx) -> (Cplx, Cplx) {
    let digits = w.re.digits();
    let mut p = Cplx::zero(digits);
    let mut dp = Cplx::zero(digits);
    for c in coeffs.iter().rev() {
        dp = &(&dp * w) + &p;
        p = &(&p * w) + c;
    }
    (p, dp)
}

/// Simultaneous-iteration root finder for a dense complex polynomial.
///
/// Initial guesses sit on a circle at the Fujiwara root bound with a small
/// angular offset to break symmetry; Aberth updates then converge
/// quadratically for simple roots and linearly through multiple ones.
fn aberth_roots(coeffs: &[Cplx], digits: usize) -> Result<Vec<Cplx>> {
    let deg = coeffs.len() - 1;
    assert!(deg >= 1, "constant polynomial has no roots");
    let mags: Vec<f64> = coeffs.iter().map(|c| c.abs().to_f64()).collect();
    let lead = mags[deg];
    if !(lead > 0.0) {
        return Err(Error::NoConvergence("vanishing leading coefficient".into()));
    }
    let mut radius: f64 = 0.0;
    for k in 1..=deg {
        let m = mags[deg - k];
        if m > 0.0 {
            radius = radius.max((m / lead).powf(1.0 / k as f64));
        }
    }
    let radius = (2.0 * radius).max(1e-3);

    let mut roots: Vec<Cplx> = (0..deg)
        .map(|i| {
            let angle = 2.0 * std::f64::consts::PI * i as f64 / deg as f64 + 0.4 / deg as f64;
            Cplx::from_polar(
                &Real::from_f64(radius, digits),
                &Real::from_f64(angle, digits),
            )
        })
        .collect();

    let scale = coeffs.iter().map(|c| c.abs()).fold(Real::zero(digits), |a, b| a.max_val(&b));
    let target = &scale * &Real::from_str_dec(&format!("1e-{}", digits.saturating_sub(8)), digits);
    let accept = &scale * &Real::from_str_dec("1e-10", digits);

    let mut best = Real::from_f64(f64::INFINITY, digits);
    for _ in 0..2000 {
        let mut max_residual = Real::zero(digits);
        let mut next = roots.clone();
        for i in 0..deg {
            let (p, dp) = horner_with_derivative(coeffs, &roots[i]);
            let pr = p.abs();
            max_residual = max_residual.max_val(&pr);
            if dp.is_zero() {
                continue;
            }
            let newton = &p / &dp;
            let mut repulsion = Cplx::zero(digits);
            for (j, other) in roots.iter().enumerate() {
                if j != i {
                    let diff = &roots[i] - other;
                    if !diff.is_zero() {
                        repulsion = &repulsion + &diff.recip();
                    }
                }
            }
            let denom = &Cplx::one(digits) - &(&newton * &repulsion);
            if denom.is_zero() {
                continue;
            }
            next[i] = &roots[i] - &(&newton / &denom);
        }
        roots = next;
        if max_residual < target {
            return Ok(roots);
        }
        best = best.min_val(&max_residual);
    }
    let final_residual = roots
        .iter()
        .map(|r| horner(coeffs, r).abs())
        .fold(Real::zero(digits), |a, b| a.max_val(&b));
    if final_residual < accept {
        Ok(roots)
    } else {
        Err(Error::NoConvergence(format!(
            "root polish stalled at residual {final_residual} (scale {scale})"
        )))
    }
}

/// Ascending coefficients of `u^c - z u^c P(u)`, degree `c + d`.
fn kernel_coefficients(poly: &JumpPolynomial, z: &Cplx, digits: usize) -> Vec<Cplx> {
    let c = poly.c();
    let d = poly.d();
    let mut coeffs = vec![Cplx::zero(digits); (c + d + 1) as usize];
    coeffs[c as usize] = Cplx::one(digits);
    for (&j, w) in poly.weights() {
        let idx = (c + j) as usize;
        let wz = z.scale(&Real::from_ratio(w, digits));
        coeffs[idx] = &coeffs[idx] - &wz;
    }
    coeffs
}

/// Solves the kernel at `z` and splits the roots by modulus: `c` small,
/// `d` large.
pub fn roots_at(poly: &JumpPolynomial, z: &Cplx, digits: usize) -> Result<RootSystem> {
    if z.is_zero() {
        return Err(Error::InvalidArgument("kernel roots need z != 0".into()));
    }
    let coeffs = kernel_coefficients(poly, z, digits);
    let mut roots = aberth_roots(&coeffs, digits)?;
    roots.sort_by(|a, b| a.abs().cmp_total(&b.abs()));
    let c = poly.c() as usize;

    let gap_lo = roots[c - 1].abs();
    let gap_hi = roots[c].abs();
    let gap_scale = gap_hi.max_val(&Real::from_str_dec("1e-300", digits));
    let degenerate_split =
        (&gap_hi - &gap_lo).abs() < &gap_scale * &Real::from_f64(SPLIT_GAP, digits);

    let mut small: Vec<Cplx> = roots[..c].to_vec();
    small.reverse();
    let large: Vec<Cplx> = roots[c..].to_vec();

    let mut residual = Real::zero(digits);
    for r in roots.iter() {
        let val = &Cplx::one(digits) - &(z * &crate::walk::JumpPolynomial::eval_cplx(poly, r, 0));
        residual = residual.max_val(&val.abs());
    }
    let residual_cap = Real::from_str_dec(&format!("1e-{}", digits / 2), digits);
    if residual > residual_cap {
        return Err(Error::NoConvergence(format!(
            "kernel residual {residual} exceeds {residual_cap}"
        )));
    }
    Ok(RootSystem {
        z: z.clone(),
        small,
        large,
        residual,
        degenerate_split,
        classification: Classification::ByModulus,
    })
}

/// Greedy global nearest matching from `prev` to `cur`; errors when the
/// matching is ambiguous at the step resolution.
fn match_roots(prev: &[Cplx], cur: &[Cplx]) -> Result<Vec<usize>> {
    let n = prev.len();
    let digits = prev[0].re.digits();
    let mut pairs = Vec::with_capacity(n * n);
    for (i, p) in prev.iter().enumerate() {
        for (j, q) in cur.iter().enumerate() {
            pairs.push((i, j, (p - q).abs()));
        }
    }
    pairs.sort_by(|a, b| a.2.cmp_total(&b.2));

    // Each root's displacement is judged against its own distance to the
    // nearest other tracked root, so a fast-moving far-away branch does not
    // trip on a tight cluster elsewhere.
    let mut local_sep = vec![Real::from_f64(f64::INFINITY, digits); n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                local_sep[i] = local_sep[i].min_val(&(&prev[i] - &prev[j]).abs());
            }
        }
    }

    let mut assign = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let mut matched = 0;
    for (i, j, dist) in pairs {
        if assign[i] != usize::MAX || used[j] {
            continue;
        }
        if n > 1 && dist > &local_sep[i] * &Real::from_str_dec("0.45", digits) {
            return Err(Error::BranchCollision(format!(
                "step displacement {dist} is ambiguous against root separation {}",
                local_sep[i]
            )));
        }
        assign[i] = j;
        used[j] = true;
        matched += 1;
        if matched == n {
            break;
        }
    }
    if matched != n {
        return Err(Error::BranchCollision("roots could not be matched one-to-one".into()));
    }
    Ok(assign)
}

/// Tracks every kernel root along the straight segment from `z_start` to
/// `z_end` in `steps` equal steps; returns the full history of the tracked
/// family (step-major, ordered as at the start).
pub fn track_all_branches(
    poly: &JumpPolynomial,
    z_start: &Cplx,
    z_end: &Cplx,
    steps: usize,
    digits: usize,
) -> Result<Vec<Vec<Cplx>>> {
    let start = roots_at(poly, z_start, digits)?;
    let mut current = start.all_roots();
    let mut history = vec![current.clone()];
    if steps == 0 || (z_start - z_end).is_zero() {
        return Ok(history);
    }
    let delta = z_end - z_start;
    for k in 1..=steps {
        let t = Real::from_ratio(
            &BigRational::new(num_bigint::BigInt::from(k as i64), num_bigint::BigInt::from(steps as i64)),
            digits,
        );
        let zk = z_start + &delta.scale(&t);
        let fresh = roots_at(poly, &zk, digits)?;
        let pool = fresh.all_roots();
        let assign = match_roots(&current, &pool)?;
        current = assign.iter().map(|&j| pool[j].clone()).collect();
        history.push(current.clone());
    }
    Ok(history)
}

/// Tracks a single branch (index into small-then-large ordering at the
/// start point) along the segment; returns its value at every step.
pub fn track_branch(
    poly: &JumpPolynomial,
    z_start: &Cplx,
    z_end: &Cplx,
    steps: usize,
    branch: usize,
    digits: usize,
) -> Result<Vec<Cplx>> {
    let total = (poly.c() + poly.d()) as usize;
    if branch >= total {
        return Err(Error::InvalidArgument(format!("branch index {branch} out of 0..{total}")));
    }
    let history = track_all_branches(poly, z_start, z_end, steps, digits)?;
    Ok(history.into_iter().map(|row| row[branch].clone()).collect())
}

/// Computes the branch points: roots of `u^{c+1} P'(u)` paired with
/// `zeta = 1/P(upsilon)`.
///
/// Errors when any critical point is not simple (`|P''(upsilon)|` at noise
/// level), which puts the walk outside the supported class.
pub fn singularities(poly: &JumpPolynomial, digits: usize) -> Result<SingularitySet> {
    let c = poly.c();
    let d = poly.d();
    let mut coeffs = vec![Cplx::zero(digits); (c + d + 1) as usize];
    for (&j, w) in poly.weights() {
        if j == 0 {
            continue;
        }
        let cf = Real::from_ratio(&(w * BigRational::from_integer(j.into())), digits);
        coeffs[(j + c) as usize] = Cplx::from_real(cf);
    }
    let roots = aberth_roots(&coeffs, digits)?;

    let tol = Real::from_str_dec(&format!("1e-{}", 2 * digits / 5), digits);
    for u in &roots {
        let d2 = poly.eval_cplx(u, 2);
        if d2.abs() < tol {
            return Err(Error::RepeatedFactor(format!(
                "critical point {} + {}i has |P''| = {} below tolerance",
                u.re,
                u.im,
                d2.abs()
            )));
        }
    }

    let mut pairs: Vec<(Cplx, Cplx)> = roots
        .iter()
        .map(|u| {
            let zeta = poly.eval_cplx(u, 0).recip();
            (u.clone(), zeta)
        })
        .collect();
    pairs.sort_by(|a, b| {
        let (ma, mb) = (a.1.abs(), b.1.abs());
        let gap = (&ma - &mb).abs();
        let eps = Real::from_str_dec(&format!("1e-{}", digits / 2), digits);
        if gap < eps {
            let arg_a = a.1.im.to_f64().atan2(a.1.re.to_f64());
            let arg_b = b.1.im.to_f64().atan2(b.1.re.to_f64());
            arg_a.partial_cmp(&arg_b).unwrap_or(std::cmp::Ordering::Equal)
        } else {
            ma.cmp_total(&mb)
        }
    });

    let profile = structural_constants(poly, digits)?;
    let tau = Cplx::from_real(profile.tau.clone());
    let mut rho_index = 0;
    let mut best = Real::from_f64(f64::INFINITY, digits);
    for (i, (u, _)) in pairs.iter().enumerate() {
        let dist = (u - &tau).abs();
        if dist < best {
            best = dist;
            rho_index = i;
        }
    }
    Ok(SingularitySet { pairs, rho_index })
}

fn chain_scan(
    poly: &JumpPolynomial,
    grid: Vec<Cplx>,
    digits: usize,
) -> Result<DominationReport> {
    let mut chain_ok = Vec::with_capacity(grid.len());
    let mut violations = Vec::new();
    let mut skipped = Vec::new();
    let mut a_hat = Real::zero(digits);
    let mut b_hat = Real::zero(digits);
    for (idx, z) in grid.iter().enumerate() {
        let system = roots_at(poly, z, digits)?;
        if system.degenerate_split {
            skipped.push(idx);
            chain_ok.push(false);
            continue;
        }
        let ok = chain_holds(&system, &mut a_hat, &mut b_hat);
        chain_ok.push(ok);
        if !ok {
            violations.push(idx);
        }
    }
    Ok(DominationReport { grid, chain_ok, a_hat, b_hat, violations, skipped })
}

fn chain_holds(system: &RootSystem, a_hat: &mut Real, b_hat: &mut Real) -> bool {
    let u1 = system.small[0].abs();
    let v1 = system.large[0].abs();
    let mut ok = u1 < v1;
    for u in system.small.iter().skip(1) {
        let m = u.abs();
        ok &= m < u1;
        *a_hat = a_hat.max_val(&(&m / &u1));
    }
    for v in system.large.iter().skip(1) {
        let m = v.abs();
        ok &= v1 < m;
        *b_hat = b_hat.max_val(&(&v1 / &m));
    }
    ok
}

/// Checks the strict modulus chain on a real grid over `(0, rho)`.
pub fn verify_domination(
    poly: &JumpPolynomial,
    samples: usize,
    digits: usize,
) -> Result<DominationReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let profile = structural_constants(poly, digits)?;
    let grid = (1..=samples)
        .map(|i| {
            let t = Real::from_ratio(
                &BigRational::new((i as i64).into(), (samples as i64 + 1).into()),
                digits,
            );
            Cplx::from_real(&profile.rho * &t)
        })
        .collect();
    chain_scan(poly, grid, digits)
}

/// Checks the chain along the rotated ray `z = x kappa_ell^c`, `x` in
/// `(0, rho)`, where `kappa_ell = exp(2 pi i ell / p)`.
pub fn verify_domination_ray(
    poly: &JumpPolynomial,
    ell: u64,
    samples: usize,
    digits: usize,
) -> Result<DominationReport> {
    let p = poly.period();
    if ell >= p {
        return Err(Error::InvalidArgument(format!("ray index {ell} out of 0..{p}")));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let profile = structural_constants(poly, digits)?;
    let angle = 2.0 * std::f64::consts::PI * (ell as f64) * (poly.c() as f64) / (p as f64);
    let rot = Cplx::from_polar(&Real::one(digits), &Real::from_f64(angle, digits));
    let grid = (1..=samples)
        .map(|i| {
            let t = Real::from_ratio(
                &BigRational::new((i as i64).into(), (samples as i64 + 1).into()),
                digits,
            );
            rot.scale(&(&profile.rho * &t))
        })
        .collect();
    chain_scan(poly, grid, digits)
}

/// Scans the circle `|z| = r` with tracked root identities: branches are
/// continued from the real point `theta = 0` (where modulus classification
/// is valid) and the chain is evaluated against the tracked families.
pub fn domination_on_circle(
    poly: &JumpPolynomial,
    r: &Real,
    samples: usize,
    digits: usize,
) -> Result<DominationReport> {
    if samples < 8 {
        return Err(Error::InvalidArgument("circle scan needs >= 8 samples".into()));
    }
    let profile = structural_constants(poly, digits)?;
    if !(r > &Real::zero(digits) && r < &profile.rho) {
        return Err(Error::InvalidArgument("radius must sit in (0, rho)".into()));
    }
    let c = poly.c() as usize;

    let base = roots_at(poly, &Cplx::from_real(r.clone()), digits)?;
    let mut current = base.all_roots();
    let mut grid = Vec::with_capacity(samples);
    let mut chain_ok = Vec::with_capacity(samples);
    let mut violations = Vec::new();
    let mut a_hat = Real::zero(digits);
    let mut b_hat = Real::zero(digits);

    for k in 0..samples {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / samples as f64;
        let zk = Cplx::from_polar(r, &Real::from_f64(theta, digits));
        if k > 0 {
            let fresh = roots_at(poly, &zk, digits)?;
            let pool = fresh.all_roots();
            let assign = match_roots(&current, &pool)?;
            current = assign.iter().map(|&j| pool[j].clone()).collect();
        }
        grid.push(zk);

        let u1 = current[0].abs();
        let v1 = current[c].abs();
        let mut ok = u1 < v1;
        for u in current[1..c].iter() {
            let m = u.abs();
            ok &= m < u1;
            a_hat = a_hat.max_val(&(&m / &u1));
        }
        for v in current[c + 1..].iter() {
            let m = v.abs();
            ok &= v1 < m;
            b_hat = b_hat.max_val(&(&v1 / &m));
        }
        chain_ok.push(ok);
        if !ok {
            violations.push(k);
        }
    }
    Ok(DominationReport { grid, chain_ok, a_hat, b_hat, violations, skipped: Vec::new() })
}

/// Largest deviation in the rotation identities
/// `P^(k)(kappa_ell tau) = kappa_ell^{-(c+k)} P^(k)(tau)` over
/// `ell < period`, `k <= k_max`.
pub fn verify_rotation_identities(
    poly: &JumpPolynomial,
    k_max: usize,
    digits: usize,
) -> Result<Real> {
    let profile = structural_constants(poly, digits)?;
    let p = poly.period();
    let c = poly.c();
    let tau = Cplx::from_real(profile.tau.clone());
    let mut worst = Real::zero(digits);
    for ell in 0..p {
        let angle = 2.0 * std::f64::consts::PI * ell as f64 / p as f64;
        let kappa = Cplx::from_polar(&Real::one(digits), &Real::from_f64(angle, digits));
        for k in 0..=k_max {
            let lhs = poly.eval_cplx(&(&kappa * &tau), k);
            let rhs = &kappa.powi(-(c + k as i64)) * &poly.eval_cplx(&tau, k);
            worst = worst.max_val(&(&lhs - &rhs).abs());
        }
    }
    Ok(worst)
}

fn check_z_in_disk(poly: &JumpPolynomial, z: &Cplx, digits: usize) -> Result<Real> {
    let profile = structural_constants(poly, digits)?;
    let zm = z.abs();
    if z.is_zero() || zm >= profile.rho {
        return Err(Error::InvalidArgument(format!(
            "z must satisfy 0 < |z| < rho = {}",
            profile.rho
        )));
    }
    Ok(profile.rho)
}

/// Derivative of a small root from the kernel: `u' = -1 / (z^2 P'(u))`.
fn root_derivative(poly: &JumpPolynomial, z: &Cplx, u: &Cplx, digits: usize) -> Result<Cplx> {
    let dp = poly.eval_cplx(u, 1);
    let tol = Real::from_str_dec(&format!("1e-{}", 2 * digits / 5), digits);
    if dp.abs() < tol {
        return Err(Error::DegenerateSplit(format!(
            "P' vanishes at a sampled root (|P'| = {}); z sits at a branch point",
            dp.abs()
        )));
    }
    Ok((&z.powi(2) * &dp).recip().scale(&-Real::one(digits)))
}

/// Generating function of walks terminating at altitude `m < c`:
/// `W_m(z) = z sum_j u_j'(z) / u_j(z)^{m+1}` over the small roots.
pub fn evaluate_wm(poly: &JumpPolynomial, z: &Cplx, m: i64, digits: usize) -> Result<Cplx> {
    if m >= poly.c() {
        return Err(Error::InvalidArgument(format!(
            "altitude {m} must be below the deepest jump c = {}",
            poly.c()
        )));
    }
    check_z_in_disk(poly, z, digits)?;
    let system = roots_at(poly, z, digits)?;
    let mut sum = Cplx::zero(digits);
    for u in &system.small {
        let du = root_derivative(poly, z, u, digits)?;
        sum = &sum + &(&du / &u.powi(m + 1));
    }
    Ok(&sum * z)
}

/// Evaluation mode for the tail generating function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BhMode {
    /// Full double sum over all small and large roots.
    Full,
    /// Dominant `(u_1, v_1)` term only; reports its distance from the full
    /// sum.
    Dominant,
}

/// Value of the tail generating function, with the dominant-mode
/// approximation error when requested.
#[derive(Clone, Debug)]
pub struct BhValue {
    /// The evaluated (full or dominant-term) value.
    pub value: Cplx,
    /// `|full - dominant|`, present in dominant mode.
    pub discrepancy: Option<Real>,
}

/// Generating function `B_h(z)` of bridges whose maximum exceeds `h`,
/// assembled from the kernel roots.
pub fn evaluate_bh(
    poly: &JumpPolynomial,
    z: &Cplx,
    h: i64,
    mode: BhMode,
    digits: usize,
) -> Result<BhValue> {
    if h < 0 {
        return Err(Error::InvalidArgument("height must be >= 0".into()));
    }
    let rho = check_z_in_disk(poly, z, digits)?;
    if mode == BhMode::Dominant {
        let near_real = z.im.abs() < Real::from_str_dec(&format!("1e-{}", 2 * digits / 5), digits);
        if !near_real || z.re.is_negative() || z.re >= rho {
            return Err(Error::InvalidArgument(
                "dominant mode needs real z in (0, rho)".into(),
            ));
        }
    }
    let system = roots_at(poly, z, digits)?;
    let tol = Real::from_str_dec(&format!("1e-{}", 2 * digits / 5), digits);

    let q_eval = |w: &Cplx, skip: usize| -> Cplx {
        let mut acc = Cplx::one(digits);
        for (m, v) in system.large.iter().enumerate() {
            if m != skip {
                acc = &acc * &(w - v);
            }
        }
        acc
    };

    let mut full = Cplx::zero(digits);
    let mut dominant = Cplx::zero(digits);
    for (k, v) in system.large.iter().enumerate() {
        let qv = q_eval(v, k);
        if qv.abs() < tol {
            return Err(Error::DegenerateSplit(format!(
                "coincident large roots: |Q| = {} below tolerance",
                qv.abs()
            )));
        }
        for (j, u) in system.small.iter().enumerate() {
            let du = root_derivative(poly, z, u, digits)?;
            let ratio = u / v;
            let term = &(&ratio.powi(h) * &(&q_eval(u, k) / &qv)) * &(&du / v);
            full = &full + &term;
            if j == 0 && k == 0 {
                dominant = term;
            }
        }
    }
    full = &full * z;
    dominant = &dominant * z;
    Ok(match mode {
        BhMode::Full => BhValue { value: full, discrepancy: None },
        BhMode::Dominant => {
            let gap = (&full - &dominant).abs();
            BhValue { value: dominant, discrepancy: Some(gap) }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real_c(x: f64) -> Cplx {
        Cplx::from_f64(x, 0.0, 50)
    }

    fn close_f64(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() < tol
    }

    #[test]
    fn dyck_roots_at_one_half() {
        let dyck = JumpPolynomial::parse("-1:1/2,1:1/2").unwrap();
        let sys = roots_at(&dyck, &real_c(0.5), 50).unwrap();
        assert_eq!(sys.small.len(), 1);
        assert_eq!(sys.large.len(), 1);
        let sqrt3 = 3f64.sqrt();
        assert!(close_f64(sys.small[0].re.to_f64(), 2.0 - sqrt3, 1e-12));
        assert!(close_f64(sys.large[0].re.to_f64(), 2.0 + sqrt3, 1e-12));
        assert!(!sys.degenerate_split);
        assert!(sys.residual < Real::from_str_dec("1e-30", 50));
    }

    #[test]
    fn dyck_branch_point_is_flagged() {
        let dyck = JumpPolynomial::parse("-1:1/2,1:1/2").unwrap();
        let sys = roots_at(&dyck, &real_c(1.0), 50).unwrap();
        assert!(sys.degenerate_split);
        assert!(close_f64(sys.small[0].re.to_f64(), 1.0, 1e-10));
        assert!(close_f64(sys.large[0].re.to_f64(), 1.0, 1e-10));
    }

    #[test]
    fn duchon_small_roots_threefold_symmetric() {
        let duchon = JumpPolynomial::parse("2:1,-3:1").unwrap();
        let sys = roots_at(&duchon, &real_c(1e-3), 50).unwrap();
        assert_eq!(sys.small.len(), 3);
        let mut angles: Vec<f64> = sys
            .small
            .iter()
            .map(|u| {
                assert!(close_f64(u.abs().to_f64(), 0.1, 1e-4));
                u.im.to_f64().atan2(u.re.to_f64())
            })
            .collect();
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let spacing = 2.0 * std::f64::consts::PI / 3.0;
        assert!(close_f64(angles[1] - angles[0], spacing, 1e-4));
        assert!(close_f64(angles[2] - angles[1], spacing, 1e-4));
    }

    #[test]
    fn track_dyck_small_branch_along_real_axis() {
        let dyck = JumpPolynomial::parse("-1:1/2,1:1/2").unwrap();
        let path = track_branch(&dyck, &real_c(0.1), &real_c(0.9), 100, 0, 50).unwrap();
        assert_eq!(path.len(), 101);
        let closed = |z: f64| (1.0 - (1.0 - z * z).sqrt()) / z;
        assert!(close_f64(path[0].re.to_f64(), closed(0.1), 1e-12));
        assert!(close_f64(path[100].re.to_f64(), closed(0.9), 1e-12));
        for w in path.windows(2) {
            assert!(w[0].re < w[1].re, "branch must increase");
            assert!(w[1].im.abs() < Real::from_str_dec("1e-30", 50));
        }
    }

    #[test]
    fn zero_length_track_returns_start() {
        let dyck = JumpPolynomial::parse("-1:1/2,1:1/2").unwrap();
        let path = track_branch(&dyck, &real_c(0.3), &real_c(0.3), 5, 0, 50).unwrap();
        assert_eq!(path.len(), 1);
        let sys = roots_at(&dyck, &real_c(0.3), 50).unwrap();
        assert!((&path[0] - &sys.small[0]).abs() < Real::from_str_dec("1e-40", 50));
    }

    #[test]
    fn negcoef_singularities_match_reference() {
        let poly = JumpPolynomial::parse("1:17/24,-2:1/6,-3:1/8").unwrap();
        let set = singularities(&poly, 50).unwrap();
        assert_eq!(set.pairs.len(), 4);
        let expected = [
            (1.0, 0.0),
            (-0.28614809453581992561273508656, 1.10754974119571484130013236004),
            (-0.28614809453581992561273508656, -1.10754974119571484130013236004),
            (-1.92770381092836014877452982688, 0.0),
        ];
        for (re, im) in expected {
            let found = set.pairs.iter().any(|(_, zeta)| {
                close_f64(zeta.re.to_f64(), re, 1e-12) && close_f64(zeta.im.to_f64(), im, 1e-12)
            });
            assert!(found, "missing singularity {re} + {im}i");
        }
        let (u_rho, zeta_rho) = &set.pairs[set.rho_index];
        assert!(close_f64(u_rho.re.to_f64(), 1.0, 1e-12));
        assert!(close_f64(zeta_rho.re.to_f64(), 1.0, 1e-12));
    }

    #[test]
    fn dyck_singularities() {
        let dyck = JumpPolynomial::parse("-1:1/2,1:1/2").unwrap();
        let set = singularities(&dyck, 50).unwrap();
        assert_eq!(set.pairs.len(), 2);
        let mut zetas: Vec<f64> = set.pairs.iter().map(|(_, z)| z.re.to_f64()).collect();
        zetas.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(close_f64(zetas[0], -1.0, 1e-12));
        assert!(close_f64(zetas[1], 1.0, 1e-12));
    }

    #[test]
    fn flat_branch_point_is_refused() {
        let wallner = JumpPolynomial::parse("1:1,-1:3,-2:1").unwrap();
        assert!(matches!(singularities(&wallner, 50), Err(Error::RepeatedFactor(_))));
    }

    #[test]
    fn rotation_identities_hold() {
        let duchon = JumpPolynomial::parse("2:1,-3:1").unwrap();
        let dev = verify_rotation_identities(&duchon, 4, 50).unwrap();
        assert!(dev < Real::from_str_dec("1e-12", 50), "deviation {dev}");
        let motzkin = JumpPolynomial::parse("1:1/3,0:1/3,-1:1/3").unwrap();
        let dev = verify_rotation_identities(&motzkin, 4, 50).unwrap();
        assert!(dev < Real::from_str_dec("1e-40", 50));
    }

    #[test]
    fn domination_real_axis_examples() {
        for text in ["-1:1/2,1:1/2", "1:1/3,0:1/3,-1:1/3", "1:1,-1:3,-2:1"] {
            let poly = JumpPolynomial::parse(text).unwrap();
            let report = verify_domination(&poly, 40, 50).unwrap();
            assert!(report.violations.is_empty(), "{text}: {:?}", report.violations);
            assert!(report.skipped.is_empty());
            assert!(report.a_hat < Real::one(50));
            assert!(report.b_hat < Real::one(50));
        }
    }

    #[test]
    fn duchon_ray_domination() {
        let duchon = JumpPolynomial::parse("2:1,-3:1").unwrap();
        for ell in [0u64, 2] {
            let report = verify_domination_ray(&duchon, ell, 25, 50).unwrap();
            assert!(report.violations.is_empty(), "ray {ell}");
        }
        assert!(verify_domination_ray(&duchon, 5, 10, 50).is_err());
    }

    #[test]
    fn circle_scan_flips_on_lower_arc() {
        let wallner = JumpPolynomial::parse("1:1,-1:3,-2:1").unwrap();
        let r = Real::from_str_dec("1e-4", 50);
        let report = domination_on_circle(&wallner, &r, 144, 50).unwrap();
        for k in 1..72 {
            assert!(report.chain_ok[k], "upper-arc sample {k} unexpectedly violated");
        }
        for k in 73..144 {
            assert!(!report.chain_ok[k], "lower-arc sample {k} unexpectedly held");
        }
    }

    #[test]
    fn wm_dyck_closed_form() {
        let dyck = JumpPolynomial::parse("-1:1/2,1:1/2").unwrap();
        let w = evaluate_wm(&dyck, &real_c(0.5), 0, 50).unwrap();
        let expect = 2.0 / 3f64.sqrt();
        assert!(close_f64(w.re.to_f64(), expect, 1e-12));
        assert!(w.im.abs() < Real::from_str_dec("1e-30", 50));
        assert!(evaluate_wm(&dyck, &real_c(0.5), 1, 50).is_err());
    }

    #[test]
    fn bh_vanishes_for_tall_ceilings() {
        let dyck = JumpPolynomial::parse("-1:1/2,1:1/2").unwrap();
        let b5 = evaluate_bh(&dyck, &real_c(0.25), 5, BhMode::Full, 50).unwrap();
        let b15 = evaluate_bh(&dyck, &real_c(0.25), 15, BhMode::Full, 50).unwrap();
        assert!(b15.value.abs() < b5.value.abs());
        assert!(b15.value.abs() < Real::from_str_dec("1e-10", 50));
        let dom = evaluate_bh(&dyck, &real_c(0.25), 5, BhMode::Dominant, 50).unwrap();
        assert!(dom.discrepancy.unwrap() < Real::from_str_dec("1e-40", 50));
    }

    #[test]
    fn root_symmetric_functions_match_coefficients() {
        let poly = JumpPolynomial::parse("1:17/24,-2:1/6,-3:1/8").unwrap();
        let z = Cplx::from_f64(0.21, 0.13, 50);
        let sys = roots_at(&poly, &z, 50).unwrap();
        let coeffs = kernel_coefficients(&poly, &z, 50);
        let deg = coeffs.len() - 1;
        let mut sum = Cplx::zero(50);
        let mut prod = Cplx::one(50);
        for r in sys.all_roots() {
            sum = &sum + &r;
            prod = &prod * &r;
        }
        let neg_ratio = &coeffs[deg - 1] / &coeffs[deg];
        assert!((&sum + &neg_ratio).abs() < Real::from_str_dec("1e-35", 50));
        let const_ratio = &coeffs[0] / &coeffs[deg];
        let signed = if deg % 2 == 0 { const_ratio.clone() } else { -&const_ratio };
        assert!((&prod - &signed).abs() < Real::from_str_dec("1e-35", 50));
    }
}
