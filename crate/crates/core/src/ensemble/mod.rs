//! General polynomial ensembles: joint density `Δ_N(x) det[φ_l(x_k)] / Z_N`,
//! moments, Schur-polynomial averages, the Giambelli identity and its
//! indeterminate-based cross-check, the equal-ratio determinant and the
//! inverse characteristic polynomial.

mod young;

pub use young::{FrobeniusCoords, YoungDiagram};

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{gated_escalating, gauss_rule, relative_separation, ComplexMatrix, QuadratureKind, C64, GATE_TOL};
use crate::specfun::factorial;
use crate::vandermonde::vandermonde;

/// Default node count of the moment integrals (doubled by the gate).
pub const DEFAULT_NODES: usize = 200;

/// Cap on node doubling, as a multiple of the ensemble's node count.
pub const MAX_NODE_FACTOR: usize = 32;

/// Minimum relative separation demanded of points that must be distinct.
pub const DISTINCT_TOL: f64 = 1e-8;

/// Points closer than this (relative) to the real axis are rejected where the
/// formulas need `Im y ≠ 0`.
pub const AXIS_TOL: f64 = 1e-12;

/// The two evaluations of `E[1/D(y)]` must agree this closely.
pub const INVERSE_FORMS_TOL: f64 = 1e-9;

/// Support of the ensemble together with the weight the `φ_l` are divided by.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// `ℝ` with weight `e^{-x²}`.
    RealLine,
    /// `(0, ∞)` with weight `x^alpha e^{-x}`.
    PositiveHalfLine { alpha: f64 },
    /// `[lo, hi]` with weight 1.
    Interval { lo: f64, hi: f64 },
}

impl Domain {
    pub fn quadrature(&self) -> QuadratureKind {
        match *self {
            Domain::RealLine => QuadratureKind::Hermite,
            Domain::PositiveHalfLine { alpha } => QuadratureKind::Laguerre { alpha },
            Domain::Interval { lo, hi } => QuadratureKind::Legendre { a: lo, b: hi },
        }
    }

    pub fn weight(&self, x: f64) -> f64 {
        self.quadrature().weight(x)
    }

    pub fn contains(&self, x: f64) -> bool {
        match *self {
            Domain::RealLine => x.is_finite(),
            Domain::PositiveHalfLine { .. } => x >= 0.0 && x.is_finite(),
            Domain::Interval { lo, hi } => (lo..=hi).contains(&x),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Domain::PositiveHalfLine { alpha } if !(alpha > -1.0) => {
                Err(Error::InvalidArgument(format!("weight exponent {alpha} must exceed -1")))
            }
            Domain::Interval { lo, hi } if !(lo < hi) || !lo.is_finite() || !hi.is_finite() => {
                Err(Error::InvalidArgument(format!("[{lo}, {hi}] is not a finite interval")))
            }
            _ => Ok(()),
        }
    }
}

/// One weight function `φ_l`, given divided by the domain weight.
pub type ReducedPhi = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `N` functions `φ_1..φ_N` on a domain, with the partition function
/// computed (and checked to be nonzero) at construction.
#[derive(Clone)]
pub struct PolynomialEnsemble {
    domain: Domain,
    phis: Vec<ReducedPhi>,
    nodes: usize,
    gram: ComplexMatrix,
    z: f64,
}

impl fmt::Debug for PolynomialEnsemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PolynomialEnsemble")
            .field("n", &self.phis.len())
            .field("domain", &self.domain)
            .field("nodes", &self.nodes)
            .field("z", &self.z)
            .finish()
    }
}

impl PolynomialEnsemble {
    /// `phis[l]` evaluates `φ_{l+1}(x) / w(x)` for the weight `w` of `domain`.
    pub fn new(domain: Domain, phis: Vec<ReducedPhi>, nodes: usize) -> Result<Self> {
        domain.validate()?;
        if phis.is_empty() {
            return Err(Error::InvalidArgument("an ensemble needs at least one function".into()));
        }
        if nodes < 2 {
            return Err(Error::InvalidArgument(format!("{nodes} quadrature nodes are too few")));
        }
        let n = phis.len();
        let mut ens = Self { domain, phis, nodes, gram: ComplexMatrix::zeros(0, 0), z: 0.0 };
        ens.gram = ens.moment_matrix(n - 1)?;
        let det = checked_det(&ens.gram)?;
        let sign = if (n * (n - 1) / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
        ens.z = factorial(n) * sign * det.re;
        if !ens.z.is_finite() {
            return Err(Error::NonFinite("partition function".into()));
        }
        Ok(ens)
    }

    pub fn n(&self) -> usize {
        self.phis.len()
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// `φ_l(x)` with 1-based `l`.
    pub fn phi(&self, l: usize, x: f64) -> f64 {
        self.domain.weight(x) * (self.phis[l - 1])(x)
    }

    /// `φ_l(x) / w(x)` with 1-based `l`.
    pub fn phi_reduced(&self, l: usize, x: f64) -> f64 {
        (self.phis[l - 1])(x)
    }

    /// `Z_N = N! (-1)^{N(N-1)/2} det G`.
    pub fn partition_function(&self) -> f64 {
        self.z
    }

    /// The `N×N` moment matrix `g_{k,l} = ∫ x^{k-1} φ_l`.
    pub fn gram(&self) -> &ComplexMatrix {
        &self.gram
    }

    /// Joint density at `xs`.
    pub fn density(&self, xs: &[f64]) -> Result<f64> {
        let n = self.n();
        if xs.len() != n {
            return Err(Error::Dimension(format!("density needs {n} points, got {}", xs.len())));
        }
        if let Some(x) = xs.iter().find(|&&x| !self.domain.contains(x)) {
            return Err(Error::InvalidArgument(format!("{x} lies outside {:?}", self.domain)));
        }
        let pts: Vec<C64> = xs.iter().map(|&x| C64::new(x, 0.0)).collect();
        let dphi = ComplexMatrix::from_fn(n, n, |k, l| C64::new(self.phi(l + 1, xs[k]), 0.0)).det()?;
        let value = (vandermonde(&pts) * dphi).re / self.z;
        if !value.is_finite() {
            return Err(Error::NonFinite("density".into()));
        }
        Ok(value)
    }

    /// Gated `∫_I f(x) φ_l(x) dx` with 1-based `l`.
    pub fn integrate_against(&self, l: usize, what: &str, f: impl Fn(f64) -> C64) -> Result<C64> {
        let phi = &self.phis[l - 1];
        self.integrate_reduced(what, |x| f(x) * phi(x))
    }

    /// Gated `∫_I w(x) g(x) dx` for the domain weight `w`. The node count is
    /// doubled up to `MAX_NODE_FACTOR` times the default when poles near the
    /// real axis slow convergence.
    pub fn integrate_reduced(&self, what: &str, mut g: impl FnMut(f64) -> C64) -> Result<C64> {
        let kind = self.domain.quadrature();
        let eval = |m: usize| Ok(gauss_rule(kind, m)?.integrate(&mut g));
        Ok(gated_escalating(what, self.nodes, MAX_NODE_FACTOR * self.nodes, GATE_TOL, eval)?.value)
    }

    /// `A_{n,m} = ∫ x^n φ_m`, rows `n = 0..=max_power`, columns `m = 1..N`.
    pub fn moment_matrix(&self, max_power: usize) -> Result<ComplexMatrix> {
        let n = self.n();
        let mut a = ComplexMatrix::zeros(max_power + 1, n);
        for m in 0..n {
            for p in 0..=max_power {
                a[(p, m)] = self.integrate_against(m + 1, &format!("moment A[{p},{}]", m + 1), |x| {
                    C64::new(x.powi(p as i32), 0.0)
                })?;
            }
        }
        Ok(a)
    }

    /// Moments up to `x^max_power` with the derived quantities needed by the
    /// Schur-average machinery.
    pub fn moments(&self, max_power: usize) -> Result<Moments> {
        Moments::new(self.moment_matrix(max_power.max(self.n() - 1))?)
    }

    /// Moments sufficient for every diagram with at most `boxes` boxes.
    pub fn moments_for_boxes(&self, boxes: usize) -> Result<Moments> {
        self.moments(boxes + self.n() - 1)
    }

    pub fn schur_expectation(&self, lambda: &YoungDiagram) -> Result<f64> {
        self.moments_for(lambda)?.schur_expectation(lambda)
    }

    pub fn h_indeterminate(&self, r: i64, s: usize) -> Result<f64> {
        let needed = (self.n() as i64 + r.max(0)) as usize;
        self.moments(needed)?.h(r, s)
    }

    pub fn giambelli_check(&self, lambda: &YoungDiagram) -> Result<GiambelliCheck> {
        self.moments_for(lambda)?.giambelli_check(lambda)
    }

    fn moments_for(&self, lambda: &YoungDiagram) -> Result<Moments> {
        self.moments(lambda.part(1) + self.n() - 1)
    }

    /// `E[1/D_N(y)]` through the inverse moment matrix, cross-checked against
    /// the bordered determinant `det[g_1; …; g_{N-1}; r] / det G`.
    pub fn inverse_expectation(&self, y: C64) -> Result<InverseExpectation> {
        ensure_off_axis(y, "y")?;
        let n = self.n();
        let kernel = move |u: f64| {
            let u = C64::new(u, 0.0);
            (u / y).powu(n as u32 - 1) / (y - u)
        };
        let g = &self.gram;
        let r: Vec<C64> =
            (1..=n).map(|j| self.integrate_against(j, "inverse moment", kernel)).collect::<Result<_>>()?;
        let bordered_num = ComplexMatrix::from_fn(n, n, |i, j| if i + 1 < n { g[(i, j)] } else { r[j] }).det()?;
        let bordered = bordered_num / g.det()?;

        // c_{N,j} = (G^{-1})_{j,N}
        let ginv = g.invert()?;
        let coeffs: Vec<C64> = (0..n).map(|j| ginv[(j, n - 1)]).collect();
        let phis = &self.phis;
        let value = self.integrate_reduced("inverse expectation", |u| {
            let mut acc = C64::new(0.0, 0.0);
            for (c, phi) in coeffs.iter().zip(phis) {
                acc += c * phi(u);
            }
            kernel(u) * acc
        })?;
        let gap = (value - bordered).norm() / value.norm().max(bordered.norm()).max(f64::MIN_POSITIVE);
        if gap > INVERSE_FORMS_TOL {
            return Err(Error::NonConvergence { what: "inverse expectation forms".into(), gap, tol: INVERSE_FORMS_TOL });
        }
        Ok(InverseExpectation { value, bordered, gap })
    }
}

/// Both evaluations of `E[1/D_N(y)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseExpectation {
    pub value: C64,
    pub bordered: C64,
    pub gap: f64,
}

/// Outcome of the Giambelli comparison for one diagram.
#[derive(Debug, Clone, PartialEq)]
pub struct GiambelliCheck {
    /// `E[s_λ]`.
    pub lhs: f64,
    /// `det[E[s_{(p_i|q_j)}]]`.
    pub rhs: f64,
    /// `|lhs - rhs| / max(1, |lhs|)`.
    pub gap: f64,
    /// `det[h_{λ_i-i+j, j-1}]` at sizes `l(λ)` and `l(λ) + 2`.
    pub h_dets: [f64; 2],
    /// Largest relative deviation of `h_dets` from `lhs`.
    pub h_gap: f64,
}

/// Moment table `A_{n,m}` with the inverse `Q` of `G̃_{i,j} = A_{N-i,j}`.
#[derive(Debug, Clone)]
pub struct Moments {
    a: ComplexMatrix,
    q: ComplexMatrix,
    denom: f64,
}

impl Moments {
    pub fn new(a: ComplexMatrix) -> Result<Self> {
        let n = a.cols();
        if a.rows() < n {
            return Err(Error::Dimension(format!("need at least {n} moment rows, got {}", a.rows())));
        }
        let gt = ComplexMatrix::from_fn(n, n, |i, j| a[(n - 1 - i, j)]);
        let denom = checked_det(&gt)?.re;
        let q = gt.invert()?;
        Ok(Self { a, q, denom })
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    pub fn max_power(&self) -> usize {
        self.a.rows() - 1
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.a
    }

    fn row(&self, p: usize) -> Result<usize> {
        if p > self.max_power() {
            Err(Error::Dimension(format!("moment x^{p} beyond tabulated x^{}", self.max_power())))
        } else {
            Ok(p)
        }
    }

    /// `det[A_{λ_i+N-i, j}] / det[A_{N-i, j}]`; zero when `l(λ) > N`.
    pub fn schur_expectation(&self, lambda: &YoungDiagram) -> Result<f64> {
        let n = self.n();
        if lambda.len() > n {
            return Ok(0.0);
        }
        self.row(lambda.part(1) + n - 1)?;
        let num = ComplexMatrix::from_fn(n, n, |i, j| self.a[(lambda.part(i + 1) + n - 1 - i, j)]).det()?;
        Ok(num.re / self.denom)
    }

    /// `h_{r,s}`: `Σ_ν A_{N+r-s-1,ν} Q_{ν,s+1}` for `s < N`, `δ_{r,0}` for
    /// `s ≥ N`, and zero for `r < 0`.
    pub fn h(&self, r: i64, s: usize) -> Result<f64> {
        let n = self.n();
        if r < 0 {
            return Ok(0.0);
        }
        if s >= n {
            return Ok(if r == 0 { 1.0 } else { 0.0 });
        }
        let p = self.row(n + r as usize - s - 1)?;
        let v: C64 = (0..n).map(|nu| self.a[(p, nu)] * self.q[(nu, s)]).sum();
        Ok(v.re)
    }

    /// `det[h_{λ_i-i+j, j-1}]` of size `k ≥ l(λ)`.
    pub fn h_determinant(&self, lambda: &YoungDiagram, k: usize) -> Result<f64> {
        if k < lambda.len() {
            return Err(Error::InvalidArgument(format!("size {k} is below the length of {lambda}")));
        }
        let mut m = ComplexMatrix::zeros(k, k);
        for i in 1..=k {
            for j in 1..=k {
                let r = lambda.part(i) as i64 - i as i64 + j as i64;
                m[(i - 1, j - 1)] = C64::new(self.h(r, j - 1)?, 0.0);
            }
        }
        Ok(m.det()?.re)
    }

    pub fn giambelli_check(&self, lambda: &YoungDiagram) -> Result<GiambelliCheck> {
        let lhs = self.schur_expectation(lambda)?;
        let f = lambda.frobenius();
        let d = f.d();
        let mut hooks = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let hook = YoungDiagram::hook(f.p[i], f.q[j]);
                hooks[(i, j)] = C64::new(self.schur_expectation(&hook)?, 0.0);
            }
        }
        let rhs = hooks.det()?.re;
        let scale = lhs.abs().max(1.0);
        let l = lambda.len();
        let h_dets = [self.h_determinant(lambda, l)?, self.h_determinant(lambda, l + 2)?];
        let h_gap = h_dets.iter().map(|h| (h - lhs).abs() / scale).fold(0.0, f64::max);
        Ok(GiambelliCheck { lhs, rhs, gap: (lhs - rhs).abs() / scale, h_dets, h_gap })
    }
}

/// Schur polynomial by the bialternant `det[x_i^{λ_j+N-j}] / Δ_N(x)`.
pub fn schur(lambda: &YoungDiagram, xs: &[C64]) -> Result<C64> {
    let n = xs.len();
    if lambda.len() > n {
        return Ok(C64::new(0.0, 0.0));
    }
    crate::vandermonde::ensure_distinct(xs, DISTINCT_TOL, "x")?;
    let num = ComplexMatrix::from_fn(n, n, |i, j| xs[i].powu((lambda.part(j + 1) + n - 1 - j) as u32)).det()?;
    Ok(num / vandermonde(xs))
}

/// `E[∏_m D(z_m)/D(u_m)]` from single ratios:
/// `det[single_ratio(z_j, u_i) / (u_i - z_j)] / det[1 / (u_i - z_j)]`.
pub fn equal_ratio_expectation(
    zs: &[C64],
    us: &[C64],
    mut single_ratio: impl FnMut(C64, C64) -> Result<C64>,
) -> Result<C64> {
    if zs.len() != us.len() {
        return Err(Error::Dimension(format!("{} numerator vs {} denominator points", zs.len(), us.len())));
    }
    for &u in us {
        ensure_off_axis(u, "u")?;
    }
    crate::vandermonde::ensure_distinct(zs, DISTINCT_TOL, "z")?;
    crate::vandermonde::ensure_distinct(us, DISTINCT_TOL, "u")?;
    for (i, &u) in us.iter().enumerate() {
        for (j, &z) in zs.iter().enumerate() {
            if relative_separation(u, z) < DISTINCT_TOL {
                return Err(Error::Coincident(format!("u[{i}] = z[{j}] = {z}")));
            }
        }
    }
    let m = zs.len();
    let cauchy = ComplexMatrix::from_fn(m, m, |i, j| 1.0 / (us[i] - zs[j]));
    let c = cauchy.det()?;
    if c.norm() == 0.0 {
        return Err(Error::Singular);
    }
    let mut num = ComplexMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            num[(i, j)] = cauchy[(i, j)] * single_ratio(zs[j], us[i])?;
        }
    }
    Ok(num.det()? / c)
}

/// Rejects points within `AXIS_TOL` (relative) of the real axis.
pub fn ensure_off_axis(y: C64, label: &str) -> Result<()> {
    if y.im.abs() <= AXIS_TOL * y.norm().max(1.0) || !y.im.is_finite() {
        return Err(Error::OnRealAxis(format!("{label} = {y}")));
    }
    Ok(())
}

/// Determinant that must be nonzero relative to the Hadamard bound.
fn checked_det(m: &ComplexMatrix) -> Result<C64> {
    let det = m.det()?;
    let n = m.rows();
    let bound: f64 = (0..n).map(|i| (0..n).map(|j| m[(i, j)].norm_sqr()).sum::<f64>().sqrt()).product();
    if det.norm() <= 1e-13 * bound {
        return Err(Error::Singular);
    }
    Ok(det)
}

#[cfg(test)]
mod tests;
