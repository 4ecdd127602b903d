//! The five commands. Each returns its outputs, the checks it made, extra
//! diagnostics and a flat table for CSV output.

use serde::Serialize;
use serde_json::{json, Value};

use polyens_core::ensemble::equal_ratio_expectation;
use polyens_core::oracle::{mc_expect, mc_expect_ratio, quad_expect, quad_expect_ratio, sample_chgue_ext, sample_gue_ext};
use polyens_core::{InvertibleEnsemble, Nu, RatioQuery, SIntegration, SampleBatch, UContour, YoungDiagram, C64};

use crate::config::{Cx, EnsembleSpec, Method, Provider, RunConfig, SMode};
use crate::report::{num, Check, Table};
use crate::CliError;

pub struct CommandOutput {
    pub outputs: Value,
    pub checks: Vec<Check>,
    pub diagnostics: Value,
    pub table: Table,
}

fn cx(v: C64) -> Cx {
    [v.re, v.im]
}

fn to_c(v: &[Cx]) -> Vec<C64> {
    v.iter().map(|&[re, im]| C64::new(re, im)).collect()
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

/// Builds the ensemble on the first `n` parameters.
fn build(cfg: &RunConfig, n: usize) -> Result<InvertibleEnsemble, CliError> {
    let a = &cfg.ensemble.a()[..n];
    let ens = match cfg.ensemble {
        EnsembleSpec::GueExt { .. } => InvertibleEnsemble::gue_ext(a)?,
        EnsembleSpec::ChgueExt { nu, .. } => InvertibleEnsemble::chgue_ext(a, Nu::new(nu)?)?,
    };
    Ok(match cfg.numerics.nodes_line {
        Some(points) => ens.with_aux_points(points),
        None => ens,
    })
}

fn build_all(cfg: &RunConfig) -> Result<InvertibleEnsemble, CliError> {
    build(cfg, cfg.ensemble.a().len())
}

fn diagnostics(ens: &InvertibleEnsemble) -> Value {
    let cert = ens.certification();
    json!({
        "family": ens.family().name(),
        "domain_nodes": ens.polynomial().nodes(),
        "certification": { "moment_gap": cert.moment_gap, "transform_gap": cert.transform_gap },
    })
}

fn relative(got: C64, want: C64) -> f64 {
    (got - want).norm() / want.norm().max(f64::MIN_POSITIVE)
}

pub fn zcheck(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let ens = build_all(cfg)?;
    let formula = ens.polynomial().partition_function();
    let closed = ens.partition_function_closed_form();
    let gap = (formula - closed).abs() / closed.abs();
    let mut table = Table::new(&["n", "moment_determinant", "closed_form", "gap"]);
    table.push(vec![ens.n().to_string(), num(formula), num(closed), num(gap)]);
    Ok(CommandOutput {
        outputs: json!({ "n": ens.n(), "moment_determinant": formula, "closed_form": closed, "gap": gap }),
        checks: vec![Check::new("partition function", gap, cfg.tolerances.zcheck)],
        diagnostics: diagnostics(&ens),
        table,
    })
}

#[derive(Serialize)]
struct GiambelliRow {
    n: usize,
    lambda: Vec<usize>,
    frobenius: String,
    lhs: f64,
    rhs: f64,
    gap: f64,
    h_dets: [f64; 2],
    h_gap: f64,
}

pub fn giambelli(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let section = cfg.giambelli.clone().ok_or_else(|| CliError::Config("missing `giambelli` section".into()))?;
    let total = cfg.ensemble.a().len();
    let ns = section.n.unwrap_or_else(|| vec![total]);
    if let Some(&n) = ns.iter().find(|&&n| n == 0 || n > total) {
        return Err(CliError::Config(format!("N = {n} needs 1 ≤ N ≤ {total} (the length of ensemble.a)")));
    }
    let diagrams: Vec<YoungDiagram> = YoungDiagram::up_to(section.max_boxes).into_iter().filter(|d| !d.is_empty()).collect();
    let mut rows = Vec::new();
    let mut table = Table::new(&["n", "lambda", "frobenius", "lhs", "rhs", "gap", "h_gap"]);
    let (mut worst, mut worst_h) = (0.0f64, 0.0f64);
    let mut diag = Vec::new();
    for &n in &ns {
        let ens = build(cfg, n)?;
        diag.push(diagnostics(&ens));
        let moments = ens.polynomial().moments_for_boxes(section.max_boxes)?;
        for lambda in &diagrams {
            let c = moments.giambelli_check(lambda)?;
            let f = lambda.frobenius();
            let join = |v: &[usize]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
            let frobenius = format!("({}|{})", join(&f.p), join(&f.q));
            worst = worst.max(c.gap);
            worst_h = worst_h.max(c.h_gap);
            table.push(vec![n.to_string(), lambda.to_string(), frobenius.clone(), num(c.lhs), num(c.rhs), num(c.gap), num(c.h_gap)]);
            rows.push(GiambelliRow {
                n,
                lambda: lambda.parts().to_vec(),
                frobenius,
                lhs: c.lhs,
                rhs: c.rhs,
                gap: c.gap,
                h_dets: c.h_dets,
                h_gap: c.h_gap,
            });
        }
    }
    let tol = cfg.tolerances.giambelli;
    Ok(CommandOutput {
        outputs: json!({ "diagrams": rows.len(), "rows": to_value(rows) }),
        checks: vec![Check::new("hook determinant", worst, tol), Check::new("h determinants", worst_h, tol)],
        diagnostics: json!({ "ensembles": diag }),
        table,
    })
}

#[derive(Serialize)]
struct ProviderValue {
    provider: Provider,
    value: Cx,
    /// Own convergence gap (certification gap for the formula).
    #[serde(skip_serializing_if = "Option::is_none")]
    gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    std_error: Option<f64>,
    /// Relative deviation from the formula (standard errors for `mc`).
    #[serde(skip_serializing_if = "Option::is_none")]
    deviation: Option<f64>,
}

fn applicable(p: Provider, m: usize, l: usize, ens: &InvertibleEnsemble, nu: Option<f64>) -> bool {
    match p {
        Provider::Formula | Provider::Circle => true,
        Provider::EqualRatio => m == l && m > 0,
        Provider::Product => l == 0 && m > 0,
        Provider::Bordered => l == 1 && m >= 2,
        Provider::Inverse => m == 0 && l == 1,
        Provider::Quadrature => ens.n() <= 3,
        Provider::Mc => nu.is_none_or(|v| v.fract() == 0.0),
    }
}

/// A circle around the parameters, kept off the auxiliary path when it can be.
fn circle_for(ens: &InvertibleEnsemble, points: usize) -> UContour {
    let (lo, hi) = ens.a().iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let center = 0.5 * (lo + hi);
    let margin = (0.25 * (hi - lo)).max(0.1);
    let mut radius = 0.5 * (hi - lo) + margin;
    if !ens.polynomial().domain().contains(-1.0) {
        // The chiral s-path is the negative half-line; stay to its right.
        radius = radius.min(0.999 * center);
    }
    UContour::Circle { center, radius, points }
}

pub fn ratio(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let section = cfg.ratio.clone().ok_or_else(|| CliError::Config("missing `ratio` section".into()))?;
    let ens = build_all(cfg)?;
    let (zs, ys) = (to_c(&section.zs), to_c(&section.ys));
    let (m, l) = (zs.len(), ys.len());
    let nu = cfg.ensemble.nu();
    let requested = section.providers.clone();
    let providers: Vec<Provider> = match &requested {
        Some(list) => list.clone(),
        None => [
            Provider::Formula,
            Provider::EqualRatio,
            Provider::Product,
            Provider::Bordered,
            Provider::Inverse,
            Provider::Quadrature,
            Provider::Mc,
        ]
        .into_iter()
        .filter(|&p| applicable(p, m, l, &ens, nu))
        .collect(),
    };
    if let Some(&p) = providers.iter().find(|&&p| !applicable(p, m, l, &ens, nu)) {
        return Err(CliError::Core(polyens_core::Error::InvalidArgument(format!(
            "provider {p:?} does not apply to M = {m}, L = {l}, N = {}",
            ens.n()
        ))));
    }

    let query = RatioQuery::new(zs.clone(), ys.clone())?;
    let reference = ens.ratio_expectation(&query)?;
    let cert = ens.certification();
    let mut values = vec![ProviderValue {
        provider: Provider::Formula,
        value: cx(reference),
        gap: Some(cert.moment_gap.max(cert.transform_gap)),
        std_error: None,
        deviation: None,
    }];
    let tol = &cfg.tolerances;
    let mut checks = Vec::new();
    let mut diag = diagnostics(&ens);
    for p in providers.into_iter().filter(|&p| p != Provider::Formula) {
        let (value, gap, std_error, deviation, tolerance) = match p {
            Provider::EqualRatio => {
                let v = equal_ratio_expectation(&zs, &ys, |z, u| ens.ratio_expectation(&RatioQuery::new(vec![z], vec![u])?))?;
                (v, None, None, relative(v, reference), tol.agreement)
            }
            Provider::Product => {
                let v = ens.product_expectation(&zs)?;
                (v, None, None, relative(v, reference), tol.special)
            }
            Provider::Bordered => {
                let v = ens.ratio_m_plus_one_over_one(&zs, ys[0])?;
                (v, None, None, relative(v, reference), tol.special)
            }
            Provider::Inverse => {
                let inv = ens.polynomial().inverse_expectation(ys[0])?;
                (inv.value, Some(inv.gap), None, relative(inv.value, reference), tol.special)
            }
            Provider::Circle => {
                let v = ens.ratio_expectation_with(&query, &circle_for(&ens, cfg.numerics.nodes_circle))?;
                (v, None, None, relative(v, reference), tol.agreement)
            }
            Provider::Quadrature => {
                let g = quad_expect_ratio(ens.polynomial(), &zs, &ys)?;
                diag["quadrature_nodes"] = json!(g.nodes);
                (g.value, Some(g.gap), None, relative(g.value, reference), tol.agreement)
            }
            Provider::Mc => {
                let batch = sample(cfg, &ens)?;
                let est = mc_expect_ratio(&batch, &zs, &ys)?;
                diag["mc_samples"] = json!(est.count);
                (est.mean, None, Some(est.std_error), est.z_score(reference), tol.mc_sigmas)
            }
            Provider::Formula => unreachable!("filtered above"),
        };
        checks.push(Check::new(format!("{p:?} vs formula").to_lowercase(), deviation, tolerance));
        values.push(ProviderValue { provider: p, value: cx(value), gap, std_error, deviation: Some(deviation) });
    }

    let mut table = Table::new(&["provider", "re", "im", "gap", "std_error", "deviation"]);
    let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
    for v in &values {
        let name = to_value(v.provider).as_str().unwrap_or_default().to_string();
        table.push(vec![name, num(v.value[0]), num(v.value[1]), opt(v.gap), opt(v.std_error), opt(v.deviation)]);
    }
    Ok(CommandOutput {
        outputs: json!({ "m": m, "l": l, "n": ens.n(), "values": to_value(values) }),
        checks,
        diagnostics: diag,
        table,
    })
}

fn sample(cfg: &RunConfig, ens: &InvertibleEnsemble) -> Result<SampleBatch, CliError> {
    let (count, seed) = (cfg.numerics.mc_samples, cfg.numerics.seed);
    Ok(match cfg.ensemble.nu() {
        None => sample_gue_ext(ens.a(), count, seed)?,
        Some(nu) => sample_chgue_ext(ens.a(), nu, count, seed)?,
    })
}

pub fn kernel(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let section = cfg.kernel.clone().ok_or_else(|| CliError::Config("missing `kernel` section".into()))?;
    let (xs, ys) = (section.x.points(), section.y.points());
    if xs.is_empty() || ys.is_empty() {
        return Err(CliError::Config("kernel grid is empty".into()));
    }
    let mode = match (section.s_integration, &cfg.ensemble) {
        (Some(SMode::Quadrature), _) | (None, EnsembleSpec::GueExt { .. }) => SIntegration::Quadrature,
        (Some(SMode::Transform), _) | (None, EnsembleSpec::ChgueExt { .. }) => SIntegration::Transform,
    };
    let ens = build_all(cfg)?.with_s_integration(mode);
    let mut table = Table::new(&["x", "y", "K"]);
    let mut points = Vec::with_capacity(xs.len() * ys.len());
    for &x in &xs {
        for &y in &ys {
            let k = ens.kernel(x, y)?;
            table.push(vec![num(x), num(y), num(k)]);
            points.push([x, y, k]);
        }
    }
    let mut checks = Vec::new();
    let mut outputs = json!({ "n": ens.n(), "s_integration": format!("{mode:?}").to_lowercase(), "points": points });
    if section.trace {
        let trace = ens.kernel_trace()?;
        let gap = (trace - ens.n() as f64).abs();
        outputs["trace"] = json!({ "value": trace, "expected": ens.n(), "gap": gap });
        checks.push(Check::new("kernel trace", gap, cfg.tolerances.kernel_trace));
    }
    Ok(CommandOutput { outputs, checks, diagnostics: diagnostics(&ens), table })
}

#[derive(Serialize)]
struct OracleValue {
    observable: &'static str,
    method: Method,
    value: Cx,
    #[serde(skip_serializing_if = "Option::is_none")]
    std_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nodes: Option<usize>,
}

pub fn oracle(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let section = cfg.oracle.clone().ok_or_else(|| CliError::Config("missing `oracle` section".into()))?;
    if section.methods.is_empty() {
        return Err(CliError::Config("oracle.methods is empty".into()));
    }
    let ens = build_all(cfg)?;
    let (zs, ys) = (to_c(&section.zs), to_c(&section.ys));
    let with_ratio = !(zs.is_empty() && ys.is_empty());
    if with_ratio {
        RatioQuery::new(zs.clone(), ys.clone())?;
    }
    let n = ens.n() as f64;
    let a_sum: f64 = ens.a().iter().sum();
    // E[Σ x_i]: the source shifts the mean; the chiral Wishart part adds N(N + ν).
    let trace_exact = a_sum + cfg.ensemble.nu().map_or(0.0, |nu| n * (n + nu));
    let tol = &cfg.tolerances;
    let trace = |xs: &[f64]| C64::new(xs.iter().sum(), 0.0);

    let mut values = Vec::new();
    let mut checks = Vec::new();
    let mut ratio_mc = None;
    let mut ratio_quad = None;
    for &method in &section.methods {
        match method {
            Method::Mc => {
                let batch = sample(cfg, &ens)?;
                let est = mc_expect(&batch, trace)?;
                checks.push(Check::new("mc trace", est.z_score(C64::new(trace_exact, 0.0)), tol.mc_sigmas));
                values.push(OracleValue {
                    observable: "trace",
                    method,
                    value: cx(est.mean),
                    std_error: Some(est.std_error),
                    gap: None,
                    nodes: None,
                });
                if with_ratio {
                    let est = mc_expect_ratio(&batch, &zs, &ys)?;
                    ratio_mc = Some(est);
                    values.push(OracleValue {
                        observable: "ratio",
                        method,
                        value: cx(est.mean),
                        std_error: Some(est.std_error),
                        gap: None,
                        nodes: None,
                    });
                }
            }
            Method::Quadrature => {
                let g = quad_expect(ens.polynomial(), &trace)?;
                let dev = (g.value.re - trace_exact).abs() / trace_exact.abs().max(1.0);
                checks.push(Check::new("quadrature trace", dev, tol.agreement));
                values.push(OracleValue {
                    observable: "trace",
                    method,
                    value: cx(g.value),
                    std_error: None,
                    gap: Some(g.gap),
                    nodes: Some(g.nodes),
                });
                if with_ratio {
                    let g = quad_expect_ratio(ens.polynomial(), &zs, &ys)?;
                    ratio_quad = Some(g.value);
                    values.push(OracleValue {
                        observable: "ratio",
                        method,
                        value: cx(g.value),
                        std_error: None,
                        gap: Some(g.gap),
                        nodes: Some(g.nodes),
                    });
                }
            }
        }
    }
    if let (Some(mc), Some(quad)) = (ratio_mc, ratio_quad) {
        checks.push(Check::new("ratio mc vs quadrature", mc.z_score(quad), tol.mc_sigmas));
    }

    let mut table = Table::new(&["observable", "method", "re", "im", "std_error", "gap"]);
    let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
    for v in &values {
        let method = to_value(v.method).as_str().unwrap_or_default().to_string();
        table.push(vec![
            v.observable.into(),
            method,
            num(v.value[0]),
            num(v.value[1]),
            opt(v.std_error),
            opt(v.gap),
        ]);
    }
    Ok(CommandOutput {
        outputs: json!({ "trace_exact": trace_exact, "values": to_value(values) }),
        checks,
        diagnostics: json!({ "seed": cfg.numerics.seed, "mc_samples": cfg.numerics.mc_samples, "ensemble": diagnostics(&ens) }),
        table,
    })
}
