//! Subcommand implementations, each producing both a JSON document and a
//! CSV table from the same computation.

use bridgetail_core::asymptotics::{evaluate_tail, luka_expansion};
use bridgetail_core::enumerate::{
    andre_reflection, bridge_tail, count_table, unbounded_bridge_count, Weight,
};
use bridgetail_core::prec::{Cplx, Real};
use bridgetail_core::roots::{
    domination_on_circle, roots_at, singularities, verify_domination, Classification,
    DominationReport, RootSystem,
};
use bridgetail_core::walk::{structural_constants, ArithMode, JumpPolynomial};
use bridgetail_core::{Error, Result};
use serde_json::{json, Value};

/// One rendered subcommand result.
pub struct Output {
    pub json: Value,
    pub csv: String,
}

/// Comparison oracle for the `tail` subcommand.
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum CompareKind {
    Andre,
    Dp,
    None,
}

/// Decimal string of a high-precision real.
pub fn real_str(r: &Real) -> String {
    r.to_decimal_string()
}

/// JSON object with `re`/`im` decimal strings.
pub fn cplx_json(z: &Cplx) -> Value {
    json!({ "re": real_str(&z.re), "im": real_str(&z.im) })
}

/// Quotes a CSV field when it contains a delimiter or quote.
pub fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Appends one CSV row from already-rendered fields.
pub fn csv_row(out: &mut String, fields: &[&str]) {
    let quoted: Vec<String> = fields.iter().map(|f| csv_field(f)).collect();
    out.push_str(&quoted.join(","));
    out.push('\n');
}

/// Parses a decimal flag value, rejecting non-finite results.
pub fn parse_real(text: &str, digits: usize, flag: &str) -> Result<Real> {
    let r = Real::from_str_dec(text, digits);
    if !r.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "--{flag} must be a decimal number, got `{text}`"
        )));
    }
    Ok(r)
}

/// Converts a table weight to a working-precision real.
pub fn weight_real(w: &Weight, digits: usize) -> Real {
    match w {
        Weight::Exact(r) => Real::from_ratio(r, digits),
        Weight::Float(x) => Real::from_f64(*x, digits),
    }
}

fn mode_name(mode: ArithMode) -> &'static str {
    match mode {
        ArithMode::Exact => "exact",
        ArithMode::Float => "float",
    }
}

/// Structural constants of a walk.
pub fn run_analyze(poly_text: &str, digits: usize) -> Result<Output> {
    let poly = JumpPolynomial::parse(poly_text)?;
    let profile = structural_constants(&poly, digits)?;
    let jumps: Vec<Value> = poly
        .weights()
        .iter()
        .map(|(j, w)| json!({ "jump": j, "weight": w.to_string() }))
        .collect();
    let moments = match &profile.moments_at_1 {
        Some((s, x, t)) => json!({
            "sigma2": s.to_string(),
            "xi": x.to_string(),
            "theta": t.to_string(),
        }),
        None => Value::Null,
    };
    let json = json!({
        "command": "analyze",
        "polynomial": poly.to_string(),
        "precision_digits": digits,
        "jumps": jumps,
        "c": poly.c(),
        "d": poly.d(),
        "period": profile.period,
        "reduced_gcd": profile.reduced_gcd,
        "probabilistic": profile.probabilistic,
        "drift": profile.drift.to_string(),
        "tau": real_str(&profile.tau),
        "rho": real_str(&profile.rho),
        "p_tau": real_str(&profile.ptau),
        "sigma2_tau": real_str(&profile.sigma2_tau),
        "lambda0": real_str(&profile.lambda0),
        "moments_at_1": moments,
    });

    let mut csv = String::from("field,value\n");
    let mut rows: Vec<(String, String)> = vec![
        ("polynomial".into(), poly.to_string()),
        ("c".into(), poly.c().to_string()),
        ("d".into(), poly.d().to_string()),
        ("period".into(), profile.period.to_string()),
        ("reduced_gcd".into(), profile.reduced_gcd.to_string()),
        ("probabilistic".into(), profile.probabilistic.to_string()),
        ("drift".into(), profile.drift.to_string()),
        ("tau".into(), real_str(&profile.tau)),
        ("rho".into(), real_str(&profile.rho)),
        ("p_tau".into(), real_str(&profile.ptau)),
        ("sigma2_tau".into(), real_str(&profile.sigma2_tau)),
        ("lambda0".into(), real_str(&profile.lambda0)),
    ];
    if let Some((s, x, t)) = &profile.moments_at_1 {
        rows.push(("sigma2_at_1".into(), s.to_string()));
        rows.push(("xi_at_1".into(), x.to_string()));
        rows.push(("theta_at_1".into(), t.to_string()));
    }
    for (k, v) in &rows {
        csv_row(&mut csv, &[k, v]);
    }
    Ok(Output { json, csv })
}

/// Dynamic-programming tables of (optionally ceilinged) walk weights.
pub fn run_enumerate(
    poly_text: &str,
    n: i64,
    ceiling: Option<i64>,
    mode: ArithMode,
) -> Result<Output> {
    let poly = JumpPolynomial::parse(poly_text)?;
    if n < 0 {
        return Err(Error::InvalidArgument("--n must be >= 0".into()));
    }
    let table = count_table(&poly, n, ceiling, mode)?;

    let mut entries = Vec::new();
    let mut bridges = Vec::new();
    let mut csv = String::from("n,altitude,weight\n");
    for i in 0..=n {
        let (lo, hi) = table.altitude_range(i);
        for j in lo..=hi {
            let w = table.value(i, j);
            if w.is_zero() {
                continue;
            }
            let ws = w.to_string();
            entries.push(json!({ "n": i, "altitude": j, "weight": ws }));
            csv_row(&mut csv, &[&i.to_string(), &j.to_string(), &ws]);
        }
        bridges.push(json!({ "n": i, "weight": table.value(i, 0).to_string() }));
    }

    let json = json!({
        "command": "enumerate",
        "polynomial": poly.to_string(),
        "n": n,
        "ceiling": ceiling,
        "mode": mode_name(mode),
        "entries": entries,
        "bridge_weights": bridges,
    });
    Ok(Output { json, csv })
}

fn andre_comparison(poly: &JumpPolynomial, n: i64, threshold: i64, digits: usize) -> Result<(Real, Value)> {
    let w = poly.weights();
    let symmetric = w.len() == 2 && w.get(&-1).is_some() && w.get(&1) == w.get(&-1);
    if !symmetric {
        return Err(Error::InvalidArgument(
            "andre comparison needs the symmetric two-jump walk -1,+1 with equal weights".into(),
        ));
    }
    if n % 2 != 0 {
        return Err(Error::InvalidArgument(
            "andre comparison needs an even length n".into(),
        ));
    }
    let exact = andre_reflection(n, threshold + 1)?;
    let value = Real::from_ratio(&exact, digits);
    let detail = json!({
        "method": "andre",
        "value": real_str(&value),
        "value_exact": exact.to_string(),
    });
    Ok((value, detail))
}

fn dp_comparison(
    poly: &JumpPolynomial,
    n: i64,
    threshold: i64,
    mode: ArithMode,
    digits: usize,
) -> Result<(Real, Value)> {
    let tail = bridge_tail(poly, n, threshold.max(0), mode)?;
    let total = unbounded_bridge_count(poly, n, mode)?;
    if total.is_zero() {
        return Err(Error::InvalidArgument(format!(
            "no bridges of length {n}; pick n on the walk's period cycle"
        )));
    }
    let (value, exact_str) = match (&tail, &total) {
        (Weight::Exact(a), Weight::Exact(b)) => {
            let q = a / b;
            (Real::from_ratio(&q, digits), Some(q.to_string()))
        }
        _ => (
            &weight_real(&tail, digits) / &weight_real(&total, digits),
            None,
        ),
    };
    let detail = json!({
        "method": "dp",
        "value": real_str(&value),
        "value_exact": exact_str,
    });
    Ok((value, detail))
}

/// Tail-probability expansion at one `(n, x)`, with an optional oracle
/// comparison against the reflection formula or exact enumeration.
pub fn run_tail(
    poly_text: &str,
    n: i64,
    x_text: &str,
    order: usize,
    digits: usize,
    compare: CompareKind,
    mode: ArithMode,
) -> Result<Output> {
    let poly = JumpPolynomial::parse(poly_text)?;
    let x = parse_real(x_text, digits, "x")?;
    let expansion = luka_expansion(&poly, order, digits)?;
    let value = evaluate_tail(&expansion, n, &x)?;

    let sigma = expansion.sigma2.sqrt();
    let scaled = &(&x * &sigma) * &Real::from_i64(n, digits).sqrt();
    let threshold = scaled.floor().to_f64() as i64;

    let comparison = match compare {
        CompareKind::None => None,
        CompareKind::Andre => Some(andre_comparison(&poly, n, threshold, digits)?),
        CompareKind::Dp => Some(dp_comparison(&poly, n, threshold, mode, digits)?),
    };
    let (comparison_json, diff_str) = match comparison {
        Some((oracle, mut detail)) => {
            let diff = (&value - &oracle).abs();
            let ds = real_str(&diff);
            detail["absolute_difference"] = json!(ds);
            (detail, ds)
        }
        None => (Value::Null, String::new()),
    };

    let json = json!({
        "command": "tail",
        "polynomial": poly.to_string(),
        "n": n,
        "x": x_text,
        "order": order,
        "precision_digits": digits,
        "sigma": real_str(&sigma),
        "threshold": threshold,
        "expansion_value": real_str(&value),
        "comparison": comparison_json,
    });

    let mut csv = String::from("field,value\n");
    csv_row(&mut csv, &["n", &n.to_string()]);
    csv_row(&mut csv, &["x", x_text]);
    csv_row(&mut csv, &["order", &order.to_string()]);
    csv_row(&mut csv, &["sigma", &real_str(&sigma)]);
    csv_row(&mut csv, &["threshold", &threshold.to_string()]);
    csv_row(&mut csv, &["expansion_value", &real_str(&value)]);
    if let Some(obj) = json["comparison"].as_object() {
        csv_row(&mut csv, &["comparison_method", obj["method"].as_str().unwrap_or("")]);
        csv_row(&mut csv, &["comparison_value", obj["value"].as_str().unwrap_or("")]);
        csv_row(&mut csv, &["absolute_difference", &diff_str]);
    }
    Ok(Output { json, csv })
}

/// Full dump of a tail expansion: monomial and Hermite-basis terms plus the
/// shared denominator series.
pub fn run_expand(poly_text: &str, order: usize, digits: usize) -> Result<Output> {
    let poly = JumpPolynomial::parse(poly_text)?;
    let e = luka_expansion(&poly, order, digits)?;

    let mut terms = Vec::new();
    let mut csv = String::from("part,k,index,x_power,value\n");
    for (j, d) in e.dseries.iter().enumerate() {
        csv_row(&mut csv, &["dseries", &j.to_string(), "", "", &real_str(d)]);
    }
    for k in 0..=e.order {
        let monomial: Vec<Value> = e.terms_x[k]
            .iter()
            .enumerate()
            .map(|(a, c)| {
                csv_row(&mut csv, &["monomial", &k.to_string(), "", &a.to_string(), &real_str(c)]);
                json!({ "x_power": a, "coefficient": real_str(c) })
            })
            .collect();
        let hermite: Vec<Value> = e.terms_he[k]
            .iter()
            .map(|(j, a, c)| {
                csv_row(
                    &mut csv,
                    &["hermite", &k.to_string(), &j.to_string(), &a.to_string(), &real_str(c)],
                );
                json!({ "family_index": j, "x_power": a, "coefficient": real_str(c) })
            })
            .collect();
        terms.push(json!({
            "k": k,
            "monomial_terms": monomial,
            "hermite_terms": hermite,
        }));
    }

    let json = json!({
        "command": "expand",
        "polynomial": poly.to_string(),
        "order": e.order,
        "precision_digits": digits,
        "sigma2": real_str(&e.sigma2),
        "xi": real_str(&e.xi),
        "theta": real_str(&e.theta),
        "dseries": e.dseries.iter().map(real_str).collect::<Vec<_>>(),
        "terms": terms,
    });
    Ok(Output { json, csv })
}

fn scan_json(kind: &str, radius: Option<&Real>, samples: usize, report: &DominationReport) -> Value {
    json!({
        "kind": kind,
        "radius": radius.map(real_str),
        "samples": samples,
        "grid": report.grid.iter().map(cplx_json).collect::<Vec<_>>(),
        "chain_ok": report.chain_ok,
        "a_hat": real_str(&report.a_hat),
        "b_hat": real_str(&report.b_hat),
        "violations": report.violations,
        "skipped": report.skipped,
    })
}

fn system_json(system: &RootSystem) -> Value {
    let class = match system.classification {
        Classification::ByModulus => "by-modulus",
        Classification::ByTracking => "by-tracking",
    };
    json!({
        "z": cplx_json(&system.z),
        "small": system.small.iter().map(cplx_json).collect::<Vec<_>>(),
        "large": system.large.iter().map(cplx_json).collect::<Vec<_>>(),
        "residual": real_str(&system.residual),
        "degenerate_split": system.degenerate_split,
        "classification": class,
    })
}

/// Kernel roots and singularities, plus a domination scan over the real
/// axis or a circle `|z| = radius`.
pub fn run_roots(
    poly_text: &str,
    samples: usize,
    radius_text: Option<&str>,
    digits: usize,
) -> Result<Output> {
    let poly = JumpPolynomial::parse(poly_text)?;
    let profile = structural_constants(&poly, digits)?;

    let (kind, radius, report) = match radius_text {
        Some(text) => {
            let r = parse_real(text, digits, "radius")?;
            let report = domination_on_circle(&poly, &r, samples, digits)?;
            ("circle", Some(r), report)
        }
        None => ("real-axis", None, verify_domination(&poly, samples, digits)?),
    };

    let (sing_json, sing_err) = match singularities(&poly, digits) {
        Ok(s) => (
            json!({
                "pairs": s.pairs.iter().map(|(crit, zeta)| json!({
                    "critical_point": cplx_json(crit),
                    "singularity": cplx_json(zeta),
                })).collect::<Vec<_>>(),
                "rho_index": s.rho_index,
            }),
            Value::Null,
        ),
        Err(e @ Error::RepeatedFactor(_)) => (Value::Null, json!(e.to_string())),
        Err(e) => return Err(e),
    };

    let z_sample = match &radius {
        Some(r) => Cplx::from_real(r.clone()),
        None => Cplx::from_real(&profile.rho * &Real::from_str_dec("0.5", digits)),
    };
    let system = roots_at(&poly, &z_sample, digits)?;

    let mut csv = String::from("index,z_re,z_im,chain_ok\n");
    for (i, z) in report.grid.iter().enumerate() {
        csv_row(
            &mut csv,
            &[
                &i.to_string(),
                &real_str(&z.re),
                &real_str(&z.im),
                &report.chain_ok[i].to_string(),
            ],
        );
    }

    let json = json!({
        "command": "roots",
        "polynomial": poly.to_string(),
        "precision_digits": digits,
        "samples": samples,
        "scan": scan_json(kind, radius.as_ref(), samples, &report),
        "singularities": sing_json,
        "singularity_error": sing_err,
        "sample_system": system_json(&system),
    });
    Ok(Output { json, csv })
}
