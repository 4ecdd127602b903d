//! Vandermonde products and the identities relating them under extension,
//! reduction and reordering, plus the partial-fraction (Lagrange
//! extrapolation) identity.

use crate::error::{Error, Result};
use crate::numerics::{relative_separation, C64};

/// Relative gap below which two points count as coincident.
pub const COINCIDENCE_TOL: f64 = 1e-10;

/// `Δ_N(x) = ∏_{i<j} (x_i - x_j)`; `Δ_0 = Δ_1 = 1`.
pub fn vandermonde(xs: &[C64]) -> C64 {
    let mut prod = C64::new(1.0, 0.0);
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            prod *= xs[i] - xs[j];
        }
    }
    prod
}

/// Fails when two entries of `xs` are closer than `tol` (relative).
pub fn ensure_distinct(xs: &[C64], tol: f64, label: &str) -> Result<()> {
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            if relative_separation(xs[i], xs[j]) < tol {
                return Err(Error::Coincident(format!("{label}[{i}] = {} and {label}[{j}] = {}", xs[i], xs[j])));
            }
        }
    }
    Ok(())
}

/// Sorted distinct 1-based positions `l_1 < … < l_L` within `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    positions: Vec<usize>,
}

impl IndexSet {
    pub fn new(positions: Vec<usize>, n: usize) -> Result<Self> {
        let ok = positions.windows(2).all(|w| w[0] < w[1])
            && positions.first().is_none_or(|&p| p >= 1)
            && positions.last().is_none_or(|&p| p <= n);
        if !ok {
            return Err(Error::InvalidArgument(format!("{positions:?} is not a sorted subset of 1..={n}")));
        }
        Ok(Self { positions })
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    fn contains(&self, p: usize) -> bool {
        self.positions.binary_search(&p).is_ok()
    }
}

/// Both sides of an identity and their absolute gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    pub lhs: C64,
    pub rhs: C64,
    pub gap: f64,
}

impl IdentityCheck {
    fn new(lhs: C64, rhs: C64) -> Self {
        Self { lhs, rhs, gap: (lhs - rhs).norm() }
    }

    /// Gap relative to the larger side (or 1).
    pub fn relative_gap(&self) -> f64 {
        self.gap / self.lhs.norm().max(self.rhs.norm()).max(1.0)
    }
}

/// `∏_{m,n} (x_n - z_m) Δ_N(x)` against `Δ_{N+M}(x, z) / Δ_M(z)`.
pub fn extended_vandermonde_check(xs: &[C64], zs: &[C64]) -> Result<IdentityCheck> {
    ensure_distinct(zs, COINCIDENCE_TOL, "z")?;
    let prod: C64 = zs.iter().flat_map(|&z| xs.iter().map(move |&x| x - z)).product();
    let lhs = prod * vandermonde(xs);
    let joined: Vec<C64> = xs.iter().chain(zs).copied().collect();
    let rhs = vandermonde(&joined) / vandermonde(zs);
    Ok(IdentityCheck::new(lhs, rhs))
}

/// The reduced Vandermonde computed directly (surviving indices) and by the
/// closed form `∏_j (-1)^{N-l_j} Δ_N(x) Δ_L(x_l) / ∏_j ∏_{n≠l_j} (x_n - x_{l_j})`.
pub fn reduced_vandermonde(xs: &[C64], removed: &IndexSet) -> Result<IdentityCheck> {
    ensure_distinct(xs, COINCIDENCE_TOL, "x")?;
    let n = xs.len();
    if removed.positions().last().is_some_and(|&p| p > n) {
        return Err(Error::InvalidArgument(format!("index set {removed:?} exceeds N = {n}")));
    }
    let survivors: Vec<C64> = (1..=n).filter(|&p| !removed.contains(p)).map(|p| xs[p - 1]).collect();
    let direct = vandermonde(&survivors);

    let picked: Vec<C64> = removed.positions().iter().map(|&p| xs[p - 1]).collect();
    let mut closed = vandermonde(xs) * vandermonde(&picked);
    for &l in removed.positions() {
        if (n - l) % 2 == 1 {
            closed = -closed;
        }
        let denom: C64 = (1..=n).filter(|&m| m != l).map(|m| xs[m - 1] - xs[l - 1]).product();
        closed /= denom;
    }
    Ok(IdentityCheck::new(direct, closed))
}

/// `Δ_{N+M}(x, z) = (-1)^{NM} Δ_{N+M}(z, x)` to `1e-12` relative.
pub fn vandermonde_swap_sign_check(xs: &[C64], zs: &[C64]) -> bool {
    let xz: Vec<C64> = xs.iter().chain(zs).copied().collect();
    let zx: Vec<C64> = zs.iter().chain(xs).copied().collect();
    let sign = if (xs.len() * zs.len()).is_multiple_of(2) { 1.0 } else { -1.0 };
    let lhs = vandermonde(&xz);
    let rhs = sign * vandermonde(&zx);
    (lhs - rhs).norm() <= 1e-12 * lhs.norm().max(rhs.norm()).max(f64::MIN_POSITIVE)
}

/// `1/∏_j (u - s_j)` against its partial-fraction expansion
/// `Σ_m (1/(u - s_m)) ∏_{j≠m} 1/(s_m - s_j)`.
pub fn lagrange_extrapolation_check(u: C64, ss: &[C64]) -> Result<IdentityCheck> {
    ensure_distinct(ss, COINCIDENCE_TOL, "s")?;
    if let Some(j) = ss.iter().position(|&s| relative_separation(u, s) < COINCIDENCE_TOL) {
        return Err(Error::Coincident(format!("u coincides with s[{j}]")));
    }
    let lhs = 1.0 / ss.iter().map(|&s| u - s).product::<C64>();
    let rhs = ss
        .iter()
        .enumerate()
        .map(|(m, &sm)| {
            let others: C64 = ss.iter().enumerate().filter(|&(j, _)| j != m).map(|(_, &sj)| sm - sj).product();
            1.0 / ((u - sm) * others)
        })
        .sum();
    Ok(IdentityCheck::new(lhs, rhs))
}
