//! Gauss rules (Legendre, Hermite, generalized Laguerre) and the
//! node-doubling convergence gate.
//!
//! Nodes come from the eigenvalues of the Jacobi matrix (implicit QL), are
//! polished by Newton steps on the orthonormal three-term recurrence, and the
//! weights are Christoffel numbers `1 / Σ_k p_k(x)^2` accumulated with
//! running rescaling so that rules with several hundred nodes neither
//! overflow nor lose relative accuracy in the tails. Weights that underflow
//! to zero are dropped together with their nodes.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::sum::{ComplexSum, CompensatedSum};
use super::C64;
use crate::error::{Error, Result};
use crate::specfun::log_gamma;

/// Relative mismatch tolerated between the `n`- and `2n`-node evaluations.
pub const GATE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadratureKind {
    /// Weight 1 on `[a, b]`.
    Legendre { a: f64, b: f64 },
    /// Weight `e^{-x^2}` on the real line.
    Hermite,
    /// Weight `x^alpha e^{-x}` on `(0, ∞)`, `alpha > -1`.
    Laguerre { alpha: f64 },
}

impl QuadratureKind {
    /// The weight function evaluated at a point of the support.
    pub fn weight(&self, x: f64) -> f64 {
        match *self {
            QuadratureKind::Legendre { .. } => 1.0,
            QuadratureKind::Hermite => (-x * x).exp(),
            QuadratureKind::Laguerre { alpha } => x.powf(alpha) * (-x).exp(),
        }
    }

    fn key(&self) -> (u8, u64, u64) {
        match *self {
            QuadratureKind::Legendre { a, b } => (0, a.to_bits(), b.to_bits()),
            QuadratureKind::Hermite => (1, 0, 0),
            QuadratureKind::Laguerre { alpha } => (2, alpha.to_bits(), 0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub kind: QuadratureKind,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_i f(x_i)` in ascending node order, plus the absolute mass
    /// `Σ w_i |f(x_i)|` used as the scale of the convergence gate.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> C64) -> (C64, f64) {
        let mut acc = ComplexSum::new();
        let mut mass = CompensatedSum::new();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let v = w * f(x);
            acc.add(v);
            mass.add(v.norm());
        }
        (acc.value(), mass.value())
    }

    pub fn integrate_real(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        let mut acc = CompensatedSum::new();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(x));
        }
        acc.value()
    }
}

struct Recurrence {
    /// Diagonal of the Jacobi matrix.
    alpha: Vec<f64>,
    /// `sqrt(beta_k)`, k = 0..=n; entry 0 unused.
    sqrt_beta: Vec<f64>,
    mu0: f64,
}

fn recurrence(kind: QuadratureKind, n: usize) -> Result<Recurrence> {
    let mut alpha = vec![0.0; n];
    let mut sqrt_beta = vec![0.0; n + 1];
    let mu0 = match kind {
        QuadratureKind::Legendre { .. } => {
            for k in 1..=n {
                let k = k as f64;
                sqrt_beta[k as usize] = k / (4.0 * k * k - 1.0).sqrt();
            }
            2.0
        }
        QuadratureKind::Hermite => {
            for (k, sb) in sqrt_beta.iter_mut().enumerate().skip(1) {
                *sb = (k as f64 / 2.0).sqrt();
            }
            std::f64::consts::PI.sqrt()
        }
        QuadratureKind::Laguerre { alpha: a } => {
            if !(a > -1.0) || !a.is_finite() {
                return Err(Error::InvalidArgument(format!("Laguerre exponent {a} must exceed -1")));
            }
            for (k, d) in alpha.iter_mut().enumerate() {
                *d = 2.0 * k as f64 + a + 1.0;
            }
            for (k, sb) in sqrt_beta.iter_mut().enumerate().skip(1) {
                let k = k as f64;
                *sb = (k * (k + a)).sqrt();
            }
            log_gamma(a + 1.0)?.exp()
        }
    };
    Ok(Recurrence { alpha, sqrt_beta, mu0 })
}

/// Eigenvalues of a symmetric tridiagonal matrix (implicit QL with Wilkinson
/// shifts). `e[i]` couples rows `i` and `i + 1`; `e[n - 1]` is ignored.
fn tridiagonal_eigenvalues(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 100 {
                return Err(Error::NonConvergence {
                    what: "tridiagonal eigenvalues".into(),
                    gap: e[l].abs(),
                    tol: f64::EPSILON,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Orthonormal recurrence at `x`: returns `(p_n, p_n')` up to a common
/// positive scale and `ln(1 / Σ_{k<n} p_k^2)`.
fn orthonormal_eval(rec: &Recurrence, n: usize, x: f64) -> (f64, f64, f64) {
    const BIG: f64 = 1e100;
    let mut p_prev = 0.0;
    let mut p = 1.0 / rec.mu0.sqrt();
    let mut dp_prev = 0.0;
    let mut dp = 0.0;
    let mut sum = p * p;
    let mut log_scale = 0.0;
    for k in 0..n {
        let sb_next = rec.sqrt_beta[k + 1];
        let p_next = ((x - rec.alpha[k]) * p - rec.sqrt_beta[k] * p_prev) / sb_next;
        let dp_next = (p + (x - rec.alpha[k]) * dp - rec.sqrt_beta[k] * dp_prev) / sb_next;
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
        if k + 1 < n {
            sum += p * p;
        }
        if p.abs() > BIG || dp.abs() > BIG {
            p /= BIG;
            p_prev /= BIG;
            dp /= BIG;
            dp_prev /= BIG;
            sum /= BIG * BIG;
            log_scale += BIG.ln();
        }
    }
    (p, dp, -sum.ln() - 2.0 * log_scale)
}

/// `n`-point Gauss rule for `kind`, computed afresh.
pub fn build_rule(kind: QuadratureKind, n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::InvalidArgument("quadrature rule needs at least one node".into()));
    }
    if let QuadratureKind::Legendre { a, b } = kind {
        if !(b > a) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidArgument(format!("invalid interval [{a}, {b}]")));
        }
    }
    let rec = recurrence(kind, n)?;
    let mut d = rec.alpha.clone();
    let mut e: Vec<f64> = (0..n).map(|i| if i + 1 < n { rec.sqrt_beta[i + 1] } else { 0.0 }).collect();
    tridiagonal_eigenvalues(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);

    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for &x0 in &d {
        let mut x = x0;
        for _ in 0..8 {
            let (p, dp, _) = orthonormal_eval(&rec, n, x);
            if dp == 0.0 {
                break;
            }
            let step = p / dp;
            x -= step;
            if step.abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
                break;
            }
        }
        let (_, _, log_w) = orthonormal_eval(&rec, n, x);
        let w = log_w.exp();
        if w > 0.0 && w.is_finite() {
            nodes.push(x);
            weights.push(w);
        }
    }
    if nodes.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::NonConvergence {
            what: format!("{kind:?} nodes (n = {n})"),
            gap: f64::NAN,
            tol: 0.0,
        });
    }
    if let QuadratureKind::Legendre { a, b } = kind {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (x, w) in nodes.iter_mut().zip(weights.iter_mut()) {
            *x = mid + half * *x;
            *w *= half;
        }
    }
    Ok(QuadratureRule { kind, nodes, weights })
}

type RuleCache = Mutex<HashMap<((u8, u64, u64), usize), Arc<QuadratureRule>>>;

/// `n`-point Gauss rule for `kind`. Rules are cached process-wide.
pub fn gauss_rule(kind: QuadratureKind, n: usize) -> Result<Arc<QuadratureRule>> {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (kind.key(), n);
    if let Some(rule) = cache.lock().expect("rule cache poisoned").get(&key) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(build_rule(kind, n)?);
    cache.lock().expect("rule cache poisoned").insert(key, Arc::clone(&rule));
    Ok(rule)
}

/// A value accepted by the convergence gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gated {
    pub value: C64,
    /// `|v_2n - v_n| / mass_2n`.
    pub gap: f64,
    /// Node count of the accepted (finer) evaluation.
    pub nodes: usize,
}

/// Relative gap between two evaluations, measured against the absolute mass
/// of the finer one so that integrals with cancelling integrands (true value
/// near zero) are still judged on a meaningful scale.
pub fn relative_gap(coarse: C64, fine: C64, mass: f64) -> f64 {
    let diff = (fine - coarse).norm();
    if diff == 0.0 {
        0.0
    } else {
        diff / mass.max(fine.norm()).max(f64::MIN_POSITIVE)
    }
}

/// Evaluates `eval` with `n` and `2n` nodes and accepts the finer value when
/// the two agree to `tol`.
pub fn gated(
    what: &str,
    n: usize,
    tol: f64,
    mut eval: impl FnMut(usize) -> Result<(C64, f64)>,
) -> Result<Gated> {
    let (coarse, _) = eval(n)?;
    let (fine, mass) = eval(2 * n)?;
    if !(fine.re.is_finite() && fine.im.is_finite()) {
        return Err(Error::NonFinite(what.to_string()));
    }
    let gap = relative_gap(coarse, fine, mass);
    if gap > tol {
        return Err(Error::NonConvergence { what: what.to_string(), gap, tol });
    }
    Ok(Gated { value: fine, gap, nodes: 2 * n })
}

/// Like [`gated`], but keeps doubling (`n, 2n, 4n, …` up to `max_n`) while
/// consecutive evaluations disagree. Meant for integrands whose nearby poles
/// make the default count insufficient.
pub fn gated_escalating(
    what: &str,
    n: usize,
    max_n: usize,
    tol: f64,
    mut eval: impl FnMut(usize) -> Result<(C64, f64)>,
) -> Result<Gated> {
    let (mut coarse, _) = eval(n)?;
    let mut m = n;
    loop {
        let (fine, mass) = eval(2 * m)?;
        if !(fine.re.is_finite() && fine.im.is_finite()) {
            return Err(Error::NonFinite(what.to_string()));
        }
        let gap = relative_gap(coarse, fine, mass);
        if gap <= tol {
            return Ok(Gated { value: fine, gap, nodes: 2 * m });
        }
        if 4 * m > max_n {
            return Err(Error::NonConvergence { what: what.to_string(), gap, tol });
        }
        coarse = fine;
        m *= 2;
    }
}

/// Gated integral of `f` against the weight of `kind`.
pub fn gated_integral(
    what: &str,
    kind: QuadratureKind,
    n: usize,
    tol: f64,
    mut f: impl FnMut(f64) -> C64,
) -> Result<Gated> {
    gated(what, n, tol, |m| Ok(gauss_rule(kind, m)?.integrate(&mut f)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn escalation_resolves_a_near_pole() {
        // ∫ e^{-x²} / (x - y) dx with y close to the real axis.
        let y = C64::new(0.3, 0.3);
        let f = |m: usize| Ok(gauss_rule(QuadratureKind::Hermite, m)?.integrate(|x| 1.0 / (x - y)));
        assert!(gated("near pole", 32, 1e-10, f).is_err());
        let got = gated_escalating("near pole", 32, 4096, 1e-10, f).unwrap();
        assert!(got.nodes > 64);
        let reference = gated("reference", 2048, 1e-12, f).unwrap().value;
        assert!((got.value - reference).norm() < 1e-9);
        assert!(gated_escalating("capped", 32, 64, 1e-10, f).is_err());
    }

    #[test]
    fn legendre_integrates_quadratic() {
        let rule = gauss_rule(QuadratureKind::Legendre { a: -1.0, b: 1.0 }, 5).unwrap();
        assert!((rule.integrate_real(|x| x * x) - 2.0 / 3.0).abs() < 1e-12);
        let rule = gauss_rule(QuadratureKind::Legendre { a: 0.0, b: 2.0 }, 4).unwrap();
        assert!((rule.integrate_real(|x| x.powi(7)) - 32.0).abs() < 1e-12);
    }

    #[test]
    fn hermite_total_mass() {
        let rule = gauss_rule(QuadratureKind::Hermite, 20).unwrap();
        assert!((rule.integrate_real(|_| 1.0) - PI.sqrt()).abs() < 1e-12);
        // ∫ x^4 e^{-x^2} = 3√π/4
        assert!((rule.integrate_real(|x| x.powi(4)) - 0.75 * PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn laguerre_first_moment() {
        let rule = gauss_rule(QuadratureKind::Laguerre { alpha: 0.0 }, 20).unwrap();
        assert!((rule.integrate_real(|x| x) - 1.0).abs() < 1e-12);
        // ∫ x^2.5 e^{-x} x^3 = Γ(6.5)
        let rule = gauss_rule(QuadratureKind::Laguerre { alpha: 2.5 }, 10).unwrap();
        let g = log_gamma(6.5).unwrap().exp();
        assert!((rule.integrate_real(|x| x.powi(3)) - g).abs() < 1e-12 * g);
    }

    #[test]
    fn exact_to_degree_2n_minus_1() {
        for n in [1usize, 3, 8, 17] {
            let rule = gauss_rule(QuadratureKind::Hermite, n).unwrap();
            let deg = 2 * n - 2; // even moment of top admissible degree
            let want = log_gamma((deg as f64 + 1.0) / 2.0).unwrap().exp();
            let got = rule.integrate_real(|x| x.powi(deg as i32));
            assert!((got - want).abs() < 1e-11 * want, "n={n}: {got} vs {want}");
        }
    }

    #[test]
    fn large_rules_are_well_formed() {
        for kind in [QuadratureKind::Hermite, QuadratureKind::Laguerre { alpha: 0.0 }, QuadratureKind::Laguerre { alpha: 2.5 }] {
            for n in [128usize, 256, 400, 800] {
                let rule = gauss_rule(kind, n).unwrap();
                assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
                assert!(rule.weights.iter().all(|&w| w > 0.0));
                let mass = rule.integrate_real(|_| 1.0);
                let want = match kind {
                    QuadratureKind::Hermite => PI.sqrt(),
                    QuadratureKind::Laguerre { alpha } => log_gamma(alpha + 1.0).unwrap().exp(),
                    _ => unreachable!(),
                };
                assert!((mass - want).abs() < 1e-13 * want, "{kind:?} n={n}: {mass}");
                // A smooth non-polynomial integrand: ∫ cos(x) e^{-x^2} = √π e^{-1/4}
                if kind == QuadratureKind::Hermite {
                    let c = rule.integrate_real(f64::cos);
                    assert!((c - PI.sqrt() * (-0.25f64).exp()).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn doubling_leaves_converged_integrals_unchanged() {
        // ∫ e^{-x^2} / (x^2 + 1) dx, pole at distance 1 from the axis.
        let g = gated_integral("lorentzian", QuadratureKind::Hermite, 128, 1e-10, |x| C64::new(1.0 / (x * x + 1.0), 0.0)).unwrap();
        assert!(g.gap < 1e-10);
        // ∫_0^∞ x e^{-x} cos(x) dx = 0 (cancelling integrand, mass-relative gap)
        let g = gated_integral("cancel", QuadratureKind::Laguerre { alpha: 0.0 }, 64, 1e-10, |x| C64::new(x * x.cos(), 0.0)).unwrap();
        assert!(g.value.norm() < 1e-12);
    }

    #[test]
    fn gate_reports_nonconvergence() {
        let err = gated_integral("rough", QuadratureKind::Legendre { a: -1.0, b: 1.0 }, 8, 1e-8, |x| C64::new(x.abs().sqrt(), 0.0)).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
    }

    #[test]
    fn rejects_empty_rule() {
        assert!(gauss_rule(QuadratureKind::Hermite, 0).is_err());
        assert!(gauss_rule(QuadratureKind::Laguerre { alpha: -1.5 }, 4).is_err());
    }
}
