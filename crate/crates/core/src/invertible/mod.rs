//! Invertible polynomial ensembles `φ_l(x) = φ(a_l, x)`: the general ratio
//! formula, its product and bordered special cases, and the correlation
//! kernel.
//!
//! Each contour integral around the parameters `a_n` is a residue sum,
//! `Σ_n φ(a_n, v) / (∏_{n'≠n} (a_n - a_{n'}) ∏_j (s_j - a_n))`. Once a
//! residue point is chosen for every `u_l`, the `s`-integrals and the
//! `v`-integrals each separate into a single determinant of one-dimensional
//! integrals (the Vandermonde factors are determinants whose columns depend
//! on one integration variable each), so the nested integral is evaluated
//! exactly as the sum over residue choices of those determinants.

pub mod family;
pub mod transform;

pub use family::{ChGueExt, GueExt, InvertibleFamily};

use std::collections::HashMap;
use std::sync::Arc;

use crate::ensemble::{ensure_off_axis, PolynomialEnsemble, ReducedPhi, DEFAULT_NODES, DISTINCT_TOL};
use crate::error::{Error, Result};
use crate::numerics::sum::ComplexSum;
use crate::numerics::{contour_integral_reduced, relative_separation, ComplexMatrix, ContourPath, C64, GATE_TOL};
use crate::specfun::{factorial, Nu};
use crate::vandermonde::{ensure_distinct, vandermonde};

/// Highest degree covered by the construction-time self-certification.
pub const CERTIFY_MAX_K: usize = 4;

/// Relative tolerance of the self-certification.
pub const CERTIFY_TOL: f64 = 1e-8;

/// Probe point of the self-certification of `F`.
pub const CERTIFY_PROBE: C64 = C64::new(0.7, 0.2);

/// How `s`-integrals of `F(s, z)` times a polynomial are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SIntegration {
    /// Gated quadrature along the auxiliary path.
    #[default]
    Quadrature,
    /// Exactly, through the expansion in the `π_k` basis.
    Transform,
}

/// How the contour integrals around the `a_n` are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum UContour {
    /// Exact residue sums.
    #[default]
    Residues,
    /// Trapezoidal rule on a circle enclosing every `a_n` and no point of
    /// the auxiliary path. Only useful for validating the residue sums.
    Circle { center: f64, radius: f64, points: usize },
}

/// Largest deviations seen by the construction-time checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certification {
    /// `max |∫ x^k φ(a_n, x) dx - π_k(a_n)| / max(1, |π_k(a_n)|)`.
    pub moment_gap: f64,
    /// `max |∫ F(s, z) π_k(s) ds - z^k| / max(1, |z|^k)` at the probe point.
    pub transform_gap: f64,
}

/// Numerator points `zs` and denominator points `ys` of a ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioQuery {
    zs: Vec<C64>,
    ys: Vec<C64>,
}

impl RatioQuery {
    pub fn new(zs: Vec<C64>, ys: Vec<C64>) -> Result<Self> {
        for &y in &ys {
            ensure_off_axis(y, "y")?;
        }
        ensure_distinct(&zs, DISTINCT_TOL, "z")?;
        ensure_distinct(&ys, DISTINCT_TOL, "y")?;
        for (m, &z) in zs.iter().enumerate() {
            if let Some(l) = ys.iter().position(|&y| relative_separation(y, z) < DISTINCT_TOL) {
                return Err(Error::Coincident(format!("z[{m}] = y[{l}] = {z}")));
            }
        }
        Ok(Self { zs, ys })
    }

    pub fn zs(&self) -> &[C64] {
        &self.zs
    }

    pub fn ys(&self) -> &[C64] {
        &self.ys
    }
}

/// A point `u` standing in for one contour integral around the `a_n`, with
/// its weight. Residue points remember which parameter they sit on.
#[derive(Debug, Clone, Copy)]
struct UNode {
    u: C64,
    coef: C64,
    residue_of: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct InvertibleEnsemble {
    family: Arc<dyn InvertibleFamily>,
    a: Vec<f64>,
    poly: PolynomialEnsemble,
    aux_points: usize,
    s_integration: SIntegration,
    certification: Certification,
}

impl InvertibleEnsemble {
    pub fn gue_ext(a: &[f64]) -> Result<Self> {
        Self::custom(Arc::new(GueExt), a)
    }

    pub fn chgue_ext(a: &[f64], nu: Nu) -> Result<Self> {
        Self::custom(Arc::new(ChGueExt { nu }), a)
    }

    /// Builds and self-certifies an ensemble for any invertible family.
    pub fn custom(family: Arc<dyn InvertibleFamily>, a: &[f64]) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidArgument("at least one parameter is needed".into()));
        }
        if let Some(x) = a.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(format!("parameter {x} is not finite")));
        }
        let pts: Vec<C64> = a.iter().map(|&x| C64::new(x, 0.0)).collect();
        ensure_distinct(&pts, DISTINCT_TOL, "a")?;
        family.check_parameters(a)?;
        let phis = a
            .iter()
            .map(|&al| {
                let fam = Arc::clone(&family);
                Arc::new(move |x: f64| fam.phi_reduced(C64::new(al, 0.0), x).map_or(f64::NAN, |v| v.re)) as ReducedPhi
            })
            .collect();
        let poly = PolynomialEnsemble::new(family.domain(), phis, DEFAULT_NODES)?;
        let aux_points = family.default_aux_points();
        let mut ens = Self {
            family,
            a: a.to_vec(),
            poly,
            aux_points,
            s_integration: SIntegration::default(),
            certification: Certification { moment_gap: 0.0, transform_gap: 0.0 },
        };
        ens.certification = ens.certify()?;
        Ok(ens)
    }

    pub fn with_s_integration(mut self, mode: SIntegration) -> Self {
        self.s_integration = mode;
        self
    }

    pub fn with_aux_points(mut self, points: usize) -> Self {
        self.aux_points = points;
        self
    }

    fn certify(&self) -> Result<Certification> {
        let mut moment_gap: f64 = 0.0;
        for (n, &al) in self.a.iter().enumerate() {
            for k in 0..=CERTIFY_MAX_K {
                let got = self.poly.integrate_against(n + 1, "certification moment", |x| {
                    C64::new(x.powi(k as i32), 0.0)
                })?;
                let want = self.family.pi(k, C64::new(al, 0.0));
                moment_gap = moment_gap.max((got - want).norm() / want.norm().max(1.0));
            }
        }
        let z = CERTIFY_PROBE;
        let mut transform_gap: f64 = 0.0;
        for k in 0..=CERTIFY_MAX_K {
            let got = self.s_quadrature(z, |s| self.family.pi(k, s))?;
            let want = z.powu(k as u32);
            transform_gap = transform_gap.max((got - want).norm() / want.norm().max(1.0));
        }
        let gap = moment_gap.max(transform_gap);
        if gap > CERTIFY_TOL {
            return Err(Error::NonConvergence {
                what: format!("self-certification of {}", self.family.name()),
                gap,
                tol: CERTIFY_TOL,
            });
        }
        Ok(Certification { moment_gap, transform_gap })
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn family(&self) -> &dyn InvertibleFamily {
        self.family.as_ref()
    }

    pub fn polynomial(&self) -> &PolynomialEnsemble {
        &self.poly
    }

    pub fn certification(&self) -> Certification {
        self.certification
    }

    pub fn s_integration(&self) -> SIntegration {
        self.s_integration
    }

    /// `N! Δ_N(a)`, the closed form of the partition function.
    pub fn partition_function_closed_form(&self) -> f64 {
        let pts: Vec<C64> = self.a.iter().map(|&x| C64::new(x, 0.0)).collect();
        factorial(self.n()) * vandermonde(&pts).re
    }

    /// `φ(u, x)` including the domain weight.
    pub fn phi(&self, u: C64, x: f64) -> Result<C64> {
        Ok(self.family.phi_reduced(u, x)? * self.poly.domain().weight(x))
    }

    /// `π_k(u)`.
    pub fn pi(&self, k: usize, u: C64) -> C64 {
        self.family.pi(k, u)
    }

    /// `∫_{I'} F(s, z) g(s) ds` by gated quadrature on the auxiliary path.
    pub fn s_quadrature(&self, z: C64, g: impl Fn(C64) -> C64) -> Result<C64> {
        let path = self.family.aux_path(z, self.aux_points);
        let fam = &self.family;
        Ok(contour_integral_reduced(&path, GATE_TOL, |s| Ok(fam.f_reduced(&path, s, z)? * g(s)))?.value)
    }

    /// `∫_{I'} F(s, z) p(s) ds` for a polynomial `p` given by ascending
    /// coefficients, using the configured [`SIntegration`].
    pub fn s_integral(&self, z: C64, p: &[C64]) -> Result<C64> {
        match self.s_integration {
            SIntegration::Quadrature => self.s_quadrature(z, |s| transform::horner(p, s)),
            SIntegration::Transform => Ok(transform::f_transform(self.family.as_ref(), p, z)),
        }
    }

    /// `1 / ∏_{n'≠n} (a_n - a_{n'})`.
    fn residue_weight(&self, n: usize) -> f64 {
        let an = self.a[n];
        1.0 / self.a.iter().enumerate().filter(|&(m, _)| m != n).map(|(_, &am)| an - am).product::<f64>()
    }

    fn u_nodes(&self, contour: &UContour, zs: &[C64]) -> Result<Vec<UNode>> {
        match *contour {
            UContour::Residues => Ok((0..self.n())
                .map(|n| UNode { u: C64::new(self.a[n], 0.0), coef: C64::new(self.residue_weight(n), 0.0), residue_of: Some(n) })
                .collect()),
            UContour::Circle { center, radius, points } => {
                let circle = ContourPath::circle(center, radius, points);
                circle.validate()?;
                if let Some(a) = self.a.iter().find(|&&a| (a - center).abs() >= radius) {
                    return Err(Error::InvalidArgument(format!("circle does not enclose parameter {a}")));
                }
                let probes: Vec<C64> = if zs.is_empty() { vec![C64::new(0.0, 0.0)] } else { zs.to_vec() };
                for z in probes {
                    let clear = match self.family.aux_path(z, self.aux_points) {
                        ContourPath::ImaginaryAxis { shift, .. } => (center - shift).abs() > radius,
                        ContourPath::NegativeHalfLine { .. } => center - radius > 0.0,
                        ContourPath::Circle { .. } => false,
                    };
                    if !clear {
                        return Err(Error::InvalidArgument("circle meets the auxiliary path".into()));
                    }
                }
                Ok((0..points)
                    .map(|k| {
                        let offset = C64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / points as f64);
                        let u = center + offset;
                        let denom: C64 = self.a.iter().map(|&a| u - a).product();
                        UNode { u, coef: offset / (points as f64 * denom), residue_of: None }
                    })
                    .collect())
            }
        }
    }

    /// `∫ F(s, z) s^power ∏_n (s - a_n) / ∏_{k∈picked} (s - u_k) ds`. Residue
    /// points cancel against the product; anything else needs quadrature.
    fn s_entry(&self, z: C64, power: usize, picked: &[UNode]) -> Result<C64> {
        let skip: Vec<usize> = picked.iter().filter_map(|u| u.residue_of).collect();
        let kept = (0..self.n()).filter(|n| !skip.contains(n)).map(|n| C64::new(self.a[n], 0.0));
        let p = transform::monomial_times_roots(power, kept);
        let poles: Vec<C64> = picked.iter().filter(|u| u.residue_of.is_none()).map(|u| u.u).collect();
        if poles.is_empty() {
            self.s_integral(z, &p)
        } else {
            self.s_quadrature(z, |s| transform::horner(&p, s) / poles.iter().map(|&u| s - u).product::<C64>())
        }
    }

    /// `E[∏_m D(z_m)] = det[B_i(z_j)] / Δ_M(z)` with
    /// `B_i(z) = ∫ F(s, z) s^{M-i} ∏_n (s - a_n) ds`.
    pub fn product_expectation(&self, zs: &[C64]) -> Result<C64> {
        ensure_distinct(zs, DISTINCT_TOL, "z")?;
        let m = zs.len();
        let mut b = ComplexMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                b[(i, j)] = self.s_entry(zs[j], m - 1 - i, &[])?;
            }
        }
        Ok(b.det()? / vandermonde(zs))
    }

    /// `E[∏_m D(z_m) / ∏_l D(y_l)]` for `L ≤ N`.
    pub fn ratio_expectation(&self, q: &RatioQuery) -> Result<C64> {
        self.ratio_expectation_with(q, &UContour::Residues)
    }

    pub fn ratio_expectation_with(&self, q: &RatioQuery, contour: &UContour) -> Result<C64> {
        let (zs, ys) = (q.zs(), q.ys());
        let (m, l, n) = (zs.len(), ys.len(), self.n());
        if l > n {
            return Err(Error::InvalidArgument(format!("{l} denominator points exceed N = {n}")));
        }
        let nodes = self.u_nodes(contour, zs)?;

        // v-integrals: t[(i, l)][k] = ∫ v^{L-1-i} w_l(v) φ(u_k, v) dv with
        // w_l(v) = (v/y_l)^{N-L} ∏_m (z_m - v) / ∏_j (y_j - v).
        let mut t = vec![vec![C64::new(0.0, 0.0); nodes.len()]; l * l];
        for i in 0..l {
            for col in 0..l {
                let y = ys[col];
                for (k, node) in nodes.iter().enumerate() {
                    let fam = &self.family;
                    let mut failure = None;
                    let value = self.poly.integrate_reduced("ratio v-integral", |v| {
                        let vc = C64::new(v, 0.0);
                        let w = (vc / y).powu((n - l) as u32) * zs.iter().map(|&z| z - vc).product::<C64>()
                            / ys.iter().map(|&yj| yj - vc).product::<C64>();
                        match fam.phi_reduced(node.u, v) {
                            Ok(phi) => vc.powu((l - 1 - i) as u32) * w * phi,
                            Err(e) => {
                                failure.get_or_insert(e);
                                C64::new(f64::NAN, 0.0)
                            }
                        }
                    });
                    if let Some(e) = failure {
                        return Err(e);
                    }
                    t[i * l + col][k] = value?;
                }
            }
        }

        let mut s_cache: HashMap<Vec<usize>, C64> = HashMap::new();
        let mut acc = ComplexSum::new();
        let mut tuple = Vec::with_capacity(l);
        let mut err = None;
        for_each_arrangement(nodes.len(), l, &mut tuple, &mut |tuple: &[usize]| {
            if err.is_some() {
                return;
            }
            let mut key = tuple.to_vec();
            key.sort_unstable();
            let s = match s_cache.get(&key) {
                Some(&s) => s,
                None => {
                    let picked: Vec<UNode> = key.iter().map(|&k| nodes[k]).collect();
                    let s = (|| {
                        let mut sm = ComplexMatrix::zeros(m, m);
                        for i in 0..m {
                            for j in 0..m {
                                sm[(i, j)] = self.s_entry(zs[j], m - 1 - i, &picked)?;
                            }
                        }
                        sm.det()
                    })();
                    match s {
                        Ok(s) => {
                            s_cache.insert(key, s);
                            s
                        }
                        Err(e) => {
                            err = Some(e);
                            return;
                        }
                    }
                }
            };
            let us: Vec<C64> = tuple.iter().map(|&k| nodes[k].u).collect();
            let coef: C64 = tuple.iter().map(|&k| nodes[k].coef).product();
            let v = ComplexMatrix::from_fn(l, l, |i, col| t[i * l + col][tuple[col]]).det();
            match v {
                Ok(v) => acc.add(coef * vandermonde(&us) * s * v),
                Err(e) => err = Some(e),
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        let sign = if (l * l.saturating_sub(1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let value = sign * acc.value() / (factorial(l) * vandermonde(zs));
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::NonFinite("ratio expectation".into()));
        }
        Ok(value)
    }

    /// `E[∏_{m=1}^{M+1} D(z_m) / D(y)]` through the bordered determinant
    /// with first row `A(z_j, a_n) = ∫ F(s, z_j) ∏_{n'≠n} (s - a_{n'}) ds`
    /// and rows `B_i(z_j)`, `i = 1..M`.
    pub fn ratio_m_plus_one_over_one(&self, zs: &[C64], y: C64) -> Result<C64> {
        if zs.len() < 2 {
            return Err(Error::InvalidArgument("the bordered form needs at least two numerator points".into()));
        }
        let q = RatioQuery::new(zs.to_vec(), vec![y])?;
        let (zs, n) = (q.zs(), self.n());
        let m = zs.len() - 1;
        let mut b = ComplexMatrix::zeros(m, m + 1);
        for i in 0..m {
            for j in 0..=m {
                b[(i, j)] = self.s_entry(zs[j], m - 1 - i, &[])?;
            }
        }
        let mut acc = ComplexSum::new();
        for k in 0..n {
            let an = C64::new(self.a[k], 0.0);
            let residue = UNode { u: an, coef: C64::new(0.0, 0.0), residue_of: Some(k) };
            let mut full = ComplexMatrix::zeros(m + 1, m + 1);
            for j in 0..=m {
                full[(0, j)] = self.s_entry(zs[j], 0, &[residue])?;
                for i in 0..m {
                    full[(i + 1, j)] = b[(i, j)];
                }
            }
            let r = self.poly.integrate_reduced("bordered v-integral", |v| {
                let vc = C64::new(v, 0.0);
                let w = (vc / y).powu((n - 1) as u32) * zs.iter().map(|&z| z - vc).product::<C64>() / (y - vc);
                w * self.family.phi_reduced(an, v).unwrap_or(C64::new(f64::NAN, 0.0))
            })?;
            acc.add(self.residue_weight(k) * r * full.det()?);
        }
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        Ok(sign * acc.value() / vandermonde(zs))
    }

    /// `K_N(x, y) / w(y)`, the kernel with the domain weight in `y` removed.
    pub fn kernel_reduced(&self, x: f64, y: f64) -> Result<f64> {
        self.kernel_reduced_with(x, y, &UContour::Residues)
    }

    pub fn kernel_reduced_with(&self, x: f64, y: f64, contour: &UContour) -> Result<f64> {
        let xc = C64::new(x, 0.0);
        let mut acc = ComplexSum::new();
        for node in self.u_nodes(contour, &[xc])? {
            let a_part = self.s_entry(xc, 0, &[node])?;
            acc.add(node.coef * self.family.phi_reduced(node.u, y)? * a_part);
        }
        Ok(acc.value().re)
    }

    /// `K_N(x, y) = Σ_n φ(a_n, y) / ∏_{n'≠n} (a_n - a_{n'}) · ∫ F(s, x) ∏_{n'≠n} (s - a_{n'}) ds`.
    pub fn kernel(&self, x: f64, y: f64) -> Result<f64> {
        self.check_in_domain(x)?;
        self.check_in_domain(y)?;
        Ok(self.kernel_reduced(x, y)? * self.poly.domain().weight(y))
    }

    fn check_in_domain(&self, x: f64) -> Result<()> {
        if self.poly.domain().contains(x) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("{x} lies outside {:?}", self.poly.domain())))
        }
    }

    /// `∫_I K_N(x, x) dx`.
    pub fn kernel_trace(&self) -> Result<f64> {
        let mut failure = None;
        let v = self.poly.integrate_reduced("kernel trace", |x| match self.kernel_reduced(x, x) {
            Ok(k) => C64::new(k, 0.0),
            Err(e) => {
                failure.get_or_insert(e);
                C64::new(f64::NAN, 0.0)
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(v?.re)
    }

    /// `∫_I K_N(x, y) K_N(y, z) dy`, to compare with `K_N(x, z)`.
    pub fn kernel_reproduce(&self, x: f64, z: f64) -> Result<f64> {
        let mut failure = None;
        let v = self.poly.integrate_reduced("kernel reproduction", |y| {
            match self.kernel_reduced(x, y).and_then(|k1| Ok(k1 * self.kernel(y, z)?)) {
                Ok(k) => C64::new(k, 0.0),
                Err(e) => {
                    failure.get_or_insert(e);
                    C64::new(f64::NAN, 0.0)
                }
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(v?.re)
    }
}

/// Calls `f` on every ordered selection of `len` distinct indices below `n`.
fn for_each_arrangement(n: usize, len: usize, prefix: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if prefix.len() == len {
        f(prefix);
        return;
    }
    for k in 0..n {
        if !prefix.contains(&k) {
            prefix.push(k);
            for_each_arrangement(n, len, prefix, f);
            prefix.pop();
        }
    }
}
