//! Python bindings: a `Walk` class over jump polynomials, a tail
//! `Expansion` class, and the reflection/Hermite helper functions. Reals
//! cross the boundary as decimal strings at the walk's working precision;
//! exact rationals as `num/den` strings.

use bridgetail_core::asymptotics::{
    evaluate_tail, hermite_skeleton_check, luka_expansion, rayleigh_tail, vn_asymptotic,
    TailExpansion,
};
use bridgetail_core::enumerate::{self, Weight};
use bridgetail_core::hermite::{hermite, q_family};
use bridgetail_core::prec::{Cplx, Real};
use bridgetail_core::roots::{
    evaluate_bh, evaluate_wm, roots_at, singularities, verify_domination, BhMode,
};
use bridgetail_core::walk::{center, structural_constants, ArithMode, JumpPolynomial};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: bridgetail_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_real(text: &str, digits: usize, what: &str) -> PyResult<Real> {
    let r = Real::from_str_dec(text, digits);
    if !r.is_finite() {
        return Err(PyValueError::new_err(format!(
            "{what} must be a decimal number, got `{text}`"
        )));
    }
    Ok(r)
}

fn cplx_pair(z: &Cplx) -> (String, String) {
    (z.re.to_decimal_string(), z.im.to_decimal_string())
}

fn weight_string(w: &Weight) -> String {
    w.to_string()
}

/// A weighted jump set together with a working precision.
#[pyclass(frozen)]
struct Walk {
    inner: JumpPolynomial,
    digits: usize,
}

#[pymethods]
impl Walk {
    #[new]
    #[pyo3(signature = (text, digits = 50))]
    fn new(text: &str, digits: usize) -> PyResult<Self> {
        let inner = JumpPolynomial::parse(text).map_err(err)?;
        Ok(Walk { inner, digits })
    }

    fn __repr__(&self) -> String {
        format!("Walk(\"{}\", digits={})", self.inner, self.digits)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    #[getter]
    fn c(&self) -> i64 {
        self.inner.c()
    }

    #[getter]
    fn d(&self) -> i64 {
        self.inner.d()
    }

    #[getter]
    fn period(&self) -> u64 {
        self.inner.period()
    }

    #[getter]
    fn reduced_gcd(&self) -> u64 {
        self.inner.reduced_gcd()
    }

    #[getter]
    fn probabilistic(&self) -> bool {
        self.inner.is_probabilistic()
    }

    #[getter]
    fn drift(&self) -> String {
        self.inner.drift().to_string()
    }

    #[getter]
    fn digits(&self) -> usize {
        self.digits
    }

    /// Structural constants: period, tau, rho, P(tau), P''(tau), lambda0,
    /// and the exact factorial moments when the weights sum to 1.
    fn analyze<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let p = structural_constants(&self.inner, self.digits).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("period", p.period)?;
        d.set_item("reduced_gcd", p.reduced_gcd)?;
        d.set_item("probabilistic", p.probabilistic)?;
        d.set_item("drift", p.drift.to_string())?;
        d.set_item("tau", p.tau.to_decimal_string())?;
        d.set_item("rho", p.rho.to_decimal_string())?;
        d.set_item("p_tau", p.ptau.to_decimal_string())?;
        d.set_item("sigma2_tau", p.sigma2_tau.to_decimal_string())?;
        d.set_item("lambda0", p.lambda0.to_decimal_string())?;
        match &p.moments_at_1 {
            Some((s, x, t)) => {
                d.set_item("moments_at_1", (s.to_string(), x.to_string(), t.to_string()))?
            }
            None => d.set_item("moments_at_1", py.None())?,
        }
        Ok(d)
    }

    /// The tilted walk `p_j tau^j / P(tau)`, centered exactly (rational
    /// tau required) or through a rational approximation of tau.
    #[pyo3(signature = (exact = true))]
    fn centered(&self, exact: bool) -> PyResult<Walk> {
        let mode = if exact { ArithMode::Exact } else { ArithMode::Float };
        let inner = center(&self.inner, mode, self.digits).map_err(err)?;
        Ok(Walk { inner, digits: self.digits })
    }

    /// Exact total weight of length-`n` bridges.
    fn bridge_count(&self, n: i64) -> PyResult<String> {
        let w = enumerate::unbounded_bridge_count(&self.inner, n, ArithMode::Exact).map_err(err)?;
        Ok(weight_string(&w))
    }

    /// Exact weight of length-`n` bridges whose maximum exceeds `h`.
    fn bridge_tail(&self, n: i64, h: i64) -> PyResult<String> {
        let w = enumerate::bridge_tail(&self.inner, n, h, ArithMode::Exact).map_err(err)?;
        Ok(weight_string(&w))
    }

    /// Limiting probability that a bridge maximum exceeds `x sigma sqrt(n)`.
    fn rayleigh_tail(&self, x: &str) -> PyResult<String> {
        let xr = parse_real(x, self.digits, "x")?;
        let v = rayleigh_tail(&self.inner, &xr, self.digits).map_err(err)?;
        Ok(v.to_decimal_string())
    }

    /// Saddle-point estimate of the total bridge weight of length `n`.
    #[pyo3(signature = (n, order = 2))]
    fn vn_estimate(&self, n: i64, order: usize) -> PyResult<String> {
        let v = vn_asymptotic(&self.inner, n, order, self.digits).map_err(err)?;
        Ok(v.to_decimal_string())
    }

    /// Tail expansion up to order `n^(-order/2)` (centered walks with a
    /// single negative jump -1 only).
    #[pyo3(signature = (order = 2))]
    fn expansion(&self, order: usize) -> PyResult<Expansion> {
        let inner = luka_expansion(&self.inner, order, self.digits).map_err(err)?;
        Ok(Expansion { inner })
    }

    /// Kernel branch points: `(critical point, singularity)` pairs and the
    /// index of the pair at `tau`.
    fn singularities<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let s = singularities(&self.inner, self.digits).map_err(err)?;
        let pairs: Vec<((String, String), (String, String))> =
            s.pairs.iter().map(|(u, z)| (cplx_pair(u), cplx_pair(z))).collect();
        let d = PyDict::new(py);
        d.set_item("pairs", pairs)?;
        d.set_item("rho_index", s.rho_index)?;
        Ok(d)
    }

    /// All kernel roots at `z`, split into small and large families.
    #[pyo3(signature = (z_re, z_im = "0"))]
    fn roots_at<'py>(&self, py: Python<'py>, z_re: &str, z_im: &str) -> PyResult<Bound<'py, PyDict>> {
        let z = Cplx::new(
            parse_real(z_re, self.digits, "z_re")?,
            parse_real(z_im, self.digits, "z_im")?,
        );
        let system = roots_at(&self.inner, &z, self.digits).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("small", system.small.iter().map(cplx_pair).collect::<Vec<_>>())?;
        d.set_item("large", system.large.iter().map(cplx_pair).collect::<Vec<_>>())?;
        d.set_item("residual", system.residual.to_decimal_string())?;
        d.set_item("degenerate_split", system.degenerate_split)?;
        Ok(d)
    }

    /// Modulus-chain scan over a real grid in `(0, rho)`.
    #[pyo3(signature = (samples = 100))]
    fn domination<'py>(&self, py: Python<'py>, samples: usize) -> PyResult<Bound<'py, PyDict>> {
        let report = verify_domination(&self.inner, samples, self.digits).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("samples", report.grid.len())?;
        d.set_item("a_hat", report.a_hat.to_decimal_string())?;
        d.set_item("b_hat", report.b_hat.to_decimal_string())?;
        d.set_item("violations", report.violations)?;
        d.set_item("skipped", report.skipped)?;
        Ok(d)
    }

    /// Generating function of walks ending at altitude `m < c`, from the
    /// small kernel roots.
    #[pyo3(signature = (z_re, m, z_im = "0"))]
    fn wm(&self, z_re: &str, m: i64, z_im: &str) -> PyResult<(String, String)> {
        let z = Cplx::new(
            parse_real(z_re, self.digits, "z_re")?,
            parse_real(z_im, self.digits, "z_im")?,
        );
        let v = evaluate_wm(&self.inner, &z, m, self.digits).map_err(err)?;
        Ok(cplx_pair(&v))
    }

    /// Generating function of bridges whose maximum exceeds `h`, assembled
    /// from the kernel roots (full double sum).
    #[pyo3(signature = (z_re, h, z_im = "0"))]
    fn bh(&self, z_re: &str, h: i64, z_im: &str) -> PyResult<(String, String)> {
        let z = Cplx::new(
            parse_real(z_re, self.digits, "z_re")?,
            parse_real(z_im, self.digits, "z_im")?,
        );
        let v = evaluate_bh(&self.inner, &z, h, BhMode::Full, self.digits).map_err(err)?;
        Ok(cplx_pair(&v.value))
    }
}

/// A truncated tail expansion in powers of `n^(-1/2)`.
#[pyclass(frozen)]
struct Expansion {
    inner: TailExpansion,
}

#[pymethods]
impl Expansion {
    fn __repr__(&self) -> String {
        format!("Expansion(order={}, digits={})", self.inner.order, self.inner.digits)
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order
    }

    #[getter]
    fn digits(&self) -> usize {
        self.inner.digits
    }

    #[getter]
    fn sigma2(&self) -> String {
        self.inner.sigma2.to_decimal_string()
    }

    #[getter]
    fn xi(&self) -> String {
        self.inner.xi.to_decimal_string()
    }

    #[getter]
    fn theta(&self) -> String {
        self.inner.theta.to_decimal_string()
    }

    #[getter]
    fn dseries(&self) -> Vec<String> {
        self.inner.dseries.iter().map(|d| d.to_decimal_string()).collect()
    }

    /// Evaluates the truncated tail probability at `(n, x)`.
    fn evaluate(&self, n: i64, x: &str) -> PyResult<String> {
        let xr = parse_real(x, self.inner.digits, "x")?;
        let v = evaluate_tail(&self.inner, n, &xr).map_err(err)?;
        Ok(v.to_decimal_string())
    }

    /// `(x power, coefficient)` pairs of the divided term `G_k`.
    fn monomial_terms(&self, k: usize) -> PyResult<Vec<(usize, String)>> {
        let terms = self.inner.terms_x.get(k).ok_or_else(|| {
            PyValueError::new_err(format!("term {k} beyond order {}", self.inner.order))
        })?;
        Ok(terms
            .iter()
            .enumerate()
            .map(|(a, c)| (a, c.to_decimal_string()))
            .collect())
    }

    /// `(family index, x power, coefficient)` triples of the numerator `N_k`.
    fn hermite_terms(&self, k: usize) -> PyResult<Vec<(usize, usize, String)>> {
        let terms = self.inner.terms_he.get(k).ok_or_else(|| {
            PyValueError::new_err(format!("term {k} beyond order {}", self.inner.order))
        })?;
        Ok(terms
            .iter()
            .map(|(j, a, c)| (*j, *a, c.to_decimal_string()))
            .collect())
    }

    /// Compares term `k`'s Hermite support against the projection skeleton.
    fn skeleton_check<'py>(&self, py: Python<'py>, k: usize) -> PyResult<Bound<'py, PyDict>> {
        let report = hermite_skeleton_check(&self.inner, k).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("pass", report.pass)?;
        d.set_item("observed", report.observed)?;
        d.set_item("allowed", report.allowed)?;
        Ok(d)
    }
}

/// Probability that a uniform `+1/-1` bridge of even length `m` reaches
/// altitude `h` or higher, as an exact rational string.
#[pyfunction]
fn andre_reflection(m: i64, h: i64) -> PyResult<String> {
    Ok(enumerate::andre_reflection(m, h).map_err(err)?.to_string())
}

/// Coefficients of the probabilist Hermite polynomial `He_i`, ascending,
/// as integer strings.
#[pyfunction]
fn hermite_coefficients(i: usize) -> Vec<String> {
    hermite(i).coeffs().iter().map(|c| c.to_string()).collect()
}

/// Coefficients of the Hermite-family polynomial `Q_r`, ascending, as
/// integer strings.
#[pyfunction]
fn q_family_coefficients(r: usize) -> Vec<String> {
    q_family(r).coeffs().iter().map(|c| c.to_string()).collect()
}

#[pymodule]
fn bridgetail(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Walk>()?;
    m.add_class::<Expansion>()?;
    m.add_function(wrap_pyfunction!(andre_reflection, m)?)?;
    m.add_function(wrap_pyfunction!(hermite_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(q_family_coefficients, m)?)?;
    Ok(())
}
