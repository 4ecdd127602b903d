//! The bivariate data `φ(u, x)`, `π_k`, `F(s, z)` and the auxiliary path
//! that make a polynomial ensemble invertible.

use std::f64::consts::PI;
use std::fmt;

use crate::ensemble::Domain;
use crate::error::{Error, Result};
use crate::numerics::{ContourPath, C64};
use crate::specfun::{bessel_i_reg, hermite_monic, laguerre_monic, Nu};

/// An invertible family: `∫_I x^k φ(a, x) dx = π_k(a)` and
/// `∫_{I'} F(s, z) π_k(s) ds = z^k` for all `k`.
///
/// Both `φ` and `F` are supplied divided by the weight of their integration
/// path (the domain weight for `φ`, [`ContourPath::weight`] for `F`), so the
/// quadratures never multiply huge and tiny factors.
pub trait InvertibleFamily: fmt::Debug + Send + Sync {
    fn name(&self) -> String;

    fn domain(&self) -> Domain;

    /// Extra conditions on the parameters `a` beyond pairwise distinctness.
    fn check_parameters(&self, _a: &[f64]) -> Result<()> {
        Ok(())
    }

    /// `φ(u, x) / w(x)`.
    fn phi_reduced(&self, u: C64, x: f64) -> Result<C64>;

    /// `π_k(u)` in closed form.
    fn pi(&self, k: usize, u: C64) -> C64;

    /// `(b_k, c_k)` with `π_{k+1}(s) = (s - b_k) π_k(s) - c_k π_{k-1}(s)`.
    fn pi_recurrence(&self, k: usize) -> (f64, f64);

    /// Integration path for `s ↦ F(s, z)`, which may depend on `z`.
    fn aux_path(&self, z: C64, points: usize) -> ContourPath;

    fn default_aux_points(&self) -> usize;

    /// `F(s, z) / weight(s)` for the weight of `path`.
    fn f_reduced(&self, path: &ContourPath, s: C64, z: C64) -> Result<C64>;
}

/// GUE with external source: `φ(a, x) = e^{-(x-a)²}/√π` on `ℝ`,
/// `π_k(a) = (2i)^{-k} H_k(ia)`, `F(s, z) = (i/√π) e^{(s-z)²}` on vertical lines.
#[derive(Debug, Clone, Copy, Default)]
pub struct GueExt;

impl InvertibleFamily for GueExt {
    fn name(&self) -> String {
        "gue_ext".into()
    }

    fn domain(&self) -> Domain {
        Domain::RealLine
    }

    fn phi_reduced(&self, u: C64, x: f64) -> Result<C64> {
        Ok((2.0 * u * x - u * u).exp() / PI.sqrt())
    }

    fn pi(&self, k: usize, u: C64) -> C64 {
        // (2i)^{-k} H_k(ia) = i^{-k} · 2^{-k} H_k(ia)
        C64::new(0.0, -1.0).powu(k as u32) * hermite_monic(k, C64::new(0.0, 1.0) * u)
    }

    fn pi_recurrence(&self, k: usize) -> (f64, f64) {
        (0.0, -(k as f64) / 2.0)
    }

    /// The line through `Re z`: there `F` is a pure Gaussian in `Im s`, so
    /// no cancellation occurs however large `z` is.
    fn aux_path(&self, z: C64, points: usize) -> ContourPath {
        ContourPath::vertical_line(z.re, points)
    }

    fn default_aux_points(&self) -> usize {
        128
    }

    fn f_reduced(&self, path: &ContourPath, s: C64, z: C64) -> Result<C64> {
        let ContourPath::ImaginaryAxis { shift, .. } = *path else {
            return Err(Error::InvalidArgument(format!("gue_ext integrates F along vertical lines, not {path:?}")));
        };
        // (s - z)² - (s - shift)²
        let exponent = (shift - z) * (2.0 * s - z - shift);
        Ok(C64::new(0.0, 1.0 / PI.sqrt()) * exponent.exp())
    }
}

/// Chiral GUE with external source: `φ(a, x) = x^ν e^{-(x+a)} g_ν(ax)` on
/// `ℝ₊`, `π_k(a) = k! L_k^ν(-a)`, `F(s, z) = (-s)^ν e^{s+z} g_ν(zs)` on `ℝ₋`.
#[derive(Debug, Clone, Copy)]
pub struct ChGueExt {
    pub nu: Nu,
}

impl InvertibleFamily for ChGueExt {
    fn name(&self) -> String {
        format!("chgue_ext(nu={})", self.nu.value())
    }

    fn domain(&self) -> Domain {
        Domain::PositiveHalfLine { alpha: self.nu.value() }
    }

    fn check_parameters(&self, a: &[f64]) -> Result<()> {
        match a.iter().find(|&&x| !(x > 0.0)) {
            Some(x) => Err(Error::InvalidArgument(format!("chgue_ext needs positive parameters, got {x}"))),
            None => Ok(()),
        }
    }

    fn phi_reduced(&self, u: C64, x: f64) -> Result<C64> {
        Ok((-u).exp() * bessel_i_reg(self.nu, u * x)?)
    }

    fn pi(&self, k: usize, u: C64) -> C64 {
        laguerre_monic(k, self.nu, u)
    }

    fn pi_recurrence(&self, k: usize) -> (f64, f64) {
        let k = k as f64;
        let nu = self.nu.value();
        (-(2.0 * k + nu + 1.0), k * (k + nu))
    }

    fn aux_path(&self, _z: C64, points: usize) -> ContourPath {
        ContourPath::negative_half_line(self.nu.value(), points)
    }

    fn default_aux_points(&self) -> usize {
        200
    }

    fn f_reduced(&self, path: &ContourPath, s: C64, z: C64) -> Result<C64> {
        match *path {
            ContourPath::NegativeHalfLine { alpha, .. } if alpha == self.nu.value() => {
                Ok(z.exp() * bessel_i_reg(self.nu, z * s)?)
            }
            _ => Err(Error::InvalidArgument(format!("chgue_ext integrates F along ℝ₋ with exponent ν, not {path:?}"))),
        }
    }
}
