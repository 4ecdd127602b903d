//! Exact `F`-transform of polynomials.
//!
//! Writing `p = Σ β_k π_k` gives `∫_{I'} F(s, z) p(s) ds = Σ β_k z^k` by the
//! defining property of `F`. This evaluates every `s`-integral whose
//! integrand is `F` times a polynomial without quadrature, which matters
//! where the integral is exponentially small compared with its integrand
//! (the chiral kernel far outside the bulk).

use super::family::InvertibleFamily;
use crate::numerics::C64;

/// Ascending coefficients of `s^power ∏ (s - r)`.
pub fn monomial_times_roots(power: usize, roots: impl IntoIterator<Item = C64>) -> Vec<C64> {
    let mut p = vec![C64::new(0.0, 0.0); power];
    p.push(C64::new(1.0, 0.0));
    for r in roots {
        p.push(C64::new(0.0, 0.0));
        for k in (0..p.len()).rev() {
            let lower = if k > 0 { p[k - 1] } else { C64::new(0.0, 0.0) };
            p[k] = lower - r * p[k];
        }
    }
    p
}

/// Evaluates a polynomial given by ascending coefficients.
pub fn horner(p: &[C64], s: C64) -> C64 {
    p.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * s + c)
}

/// Coefficients `β_k` of `p` in the basis `π_0, π_1, …` of `family`.
pub fn pi_coefficients(family: &dyn InvertibleFamily, p: &[C64]) -> Vec<C64> {
    let deg = p.len().saturating_sub(1);
    // basis[k] holds the ascending coefficients of π_k.
    let mut basis: Vec<Vec<C64>> = vec![vec![C64::new(1.0, 0.0)]];
    for k in 0..deg {
        let (b, c) = family.pi_recurrence(k);
        let mut next = vec![C64::new(0.0, 0.0); k + 2];
        for (j, &coef) in basis[k].iter().enumerate() {
            next[j + 1] += coef;
            next[j] -= b * coef;
        }
        if k > 0 {
            for (j, &coef) in basis[k - 1].iter().enumerate() {
                next[j] -= c * coef;
            }
        }
        basis.push(next);
    }
    let mut rest = p.to_vec();
    let mut beta = vec![C64::new(0.0, 0.0); p.len()];
    for k in (0..p.len()).rev() {
        beta[k] = rest[k];
        for (j, &coef) in basis[k].iter().enumerate() {
            rest[j] -= beta[k] * coef;
        }
    }
    beta
}

/// `∫_{I'} F(s, z) p(s) ds` for a polynomial `p` (ascending coefficients).
pub fn f_transform(family: &dyn InvertibleFamily, p: &[C64], z: C64) -> C64 {
    horner(&pi_coefficients(family, p), z)
}

#[cfg(test)]
mod tests {
    use super::super::family::{ChGueExt, GueExt};
    use super::*;
    use crate::specfun::Nu;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn roots_expand_correctly() {
        let p = monomial_times_roots(1, [c(1.0, 0.0), c(-2.0, 0.0)]);
        // s (s - 1)(s + 2) = s³ + s² - 2s
        assert_eq!(p, vec![c(0.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);
        let s = c(0.3, 0.7);
        assert!((horner(&p, s) - s * (s - 1.0) * (s + 2.0)).norm() < 1e-15);
    }

    #[test]
    fn basis_polynomials_map_to_monomials() {
        let fams: [&dyn InvertibleFamily; 2] = [&GueExt, &ChGueExt { nu: Nu::new(1.5).unwrap() }];
        let z = c(0.7, 0.2);
        for fam in fams {
            for k in 0..6 {
                // Coefficients of π_k recovered by interpolation-free expansion.
                let mut pk = vec![c(0.0, 0.0); k + 1];
                pk[k] = c(1.0, 0.0);
                let beta = pi_coefficients(fam, &pk);
                let back: C64 = beta.iter().enumerate().map(|(j, &b)| b * fam.pi(j, z)).sum();
                assert!((back - z.powu(k as u32)).norm() < 1e-12 * z.norm().powi(k as i32).max(1.0));
            }
        }
    }
}
