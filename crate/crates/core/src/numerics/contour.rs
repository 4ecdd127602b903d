//! Integration along the three path families used by the toolkit.
//!
//! * `Circle`: counter-clockwise, equispaced-angle trapezoid. The result
//!   carries the `1/(2πi)` normalization, so a simple pole of residue `r`
//!   inside the circle contributes `r`.
//! * `ImaginaryAxis`: the vertical line `shift + iℝ` traversed from `+i∞`
//!   to `-i∞` (`s = shift - it`, `t` ascending), integrated with
//!   Gauss–Hermite in `t`. The unshifted line is `iℝ` itself.
//! * `NegativeHalfLine`: `ℝ₋` traversed from `-∞` to `0` (`s = -t`),
//!   integrated with generalized Gauss–Laguerre in `t`.
//!
//! The line kinds have a natural weight `w(s)` (`e^{(s-shift)²}` and
//! `(-s)^α e^{s}` respectively, i.e. `e^{-t²}` and `t^α e^{-t}`). Integrands that already
//! have the weight factored out analytically go through
//! [`contour_integral_reduced`], which avoids evaluating huge and tiny
//! factors separately in the tails.

use std::f64::consts::PI;

use super::quadrature::{gated_escalating, gauss_rule, Gated, QuadratureKind, GATE_TOL};
use super::sum::{CompensatedSum, ComplexSum};
use super::C64;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContourPath {
    Circle { center: f64, radius: f64, points: usize },
    /// Nodes with `|t| > truncation` are skipped.
    ImaginaryAxis { shift: f64, truncation: f64, points: usize },
    /// `alpha` is the exponent of the Laguerre weight `t^alpha e^{-t}`.
    NegativeHalfLine { alpha: f64, points: usize },
}

impl ContourPath {
    pub fn circle(center: f64, radius: f64, points: usize) -> Self {
        ContourPath::Circle { center, radius, points }
    }

    pub fn imaginary_axis(points: usize) -> Self {
        ContourPath::ImaginaryAxis { shift: 0.0, truncation: 40.0, points }
    }

    /// The vertical line through `shift`, same orientation as `iℝ`.
    pub fn vertical_line(shift: f64, points: usize) -> Self {
        ContourPath::ImaginaryAxis { shift, truncation: 40.0, points }
    }

    pub fn negative_half_line(alpha: f64, points: usize) -> Self {
        ContourPath::NegativeHalfLine { alpha, points }
    }

    pub fn points(&self) -> usize {
        match *self {
            ContourPath::Circle { points, .. }
            | ContourPath::ImaginaryAxis { points, .. }
            | ContourPath::NegativeHalfLine { points, .. } => points,
        }
    }

    pub fn with_points(self, points: usize) -> Self {
        match self {
            ContourPath::Circle { center, radius, .. } => ContourPath::Circle { center, radius, points },
            ContourPath::ImaginaryAxis { shift, truncation, .. } => {
                ContourPath::ImaginaryAxis { shift, truncation, points }
            }
            ContourPath::NegativeHalfLine { alpha, .. } => ContourPath::NegativeHalfLine { alpha, points },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points() < 8 {
            return Err(Error::InvalidArgument(format!("contour needs at least 8 points, got {}", self.points())));
        }
        match *self {
            ContourPath::Circle { radius, center, .. } if !(radius > 0.0) || !center.is_finite() => {
                Err(Error::InvalidArgument(format!("circle radius {radius} must be positive")))
            }
            ContourPath::ImaginaryAxis { shift, truncation, .. } if !(truncation > 0.0) || !shift.is_finite() => {
                Err(Error::InvalidArgument("line needs a finite shift and positive truncation".into()))
            }
            ContourPath::NegativeHalfLine { alpha, .. } if !(alpha > -1.0) => {
                Err(Error::InvalidArgument(format!("Laguerre exponent {alpha} must exceed -1")))
            }
            _ => Ok(()),
        }
    }

    /// Weight factored out by [`contour_integral_reduced`].
    pub fn weight(&self, s: C64) -> C64 {
        match *self {
            ContourPath::Circle { .. } => C64::new(1.0, 0.0),
            ContourPath::ImaginaryAxis { shift, .. } => ((s - shift) * (s - shift)).exp(),
            ContourPath::NegativeHalfLine { alpha, .. } => (-s).powf(alpha) * s.exp(),
        }
    }

    /// Evaluates one discretization of `∫ w(s) g(s) ds` with exactly
    /// `points` nodes. Returns the value and the absolute mass.
    fn discretize(&self, points: usize, g: &mut dyn FnMut(C64) -> Result<C64>) -> Result<(C64, f64)> {
        let mut acc = ComplexSum::new();
        let mut mass = CompensatedSum::new();
        match *self {
            ContourPath::Circle { center, radius, .. } => {
                for k in 0..points {
                    let theta = 2.0 * PI * k as f64 / points as f64;
                    let offset = C64::from_polar(radius, theta);
                    let v = g(center + offset)? * offset / points as f64;
                    acc.add(v);
                    mass.add(v.norm());
                }
            }
            ContourPath::ImaginaryAxis { shift, truncation, .. } => {
                let rule = gauss_rule(QuadratureKind::Hermite, points)?;
                for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
                    if t.abs() > truncation {
                        continue;
                    }
                    // ds = -i dt
                    let v = C64::new(0.0, -w) * g(C64::new(shift, -t))?;
                    acc.add(v);
                    mass.add(v.norm());
                }
            }
            ContourPath::NegativeHalfLine { alpha, .. } => {
                let rule = gauss_rule(QuadratureKind::Laguerre { alpha }, points)?;
                for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
                    let v = w * g(C64::new(-t, 0.0))?;
                    acc.add(v);
                    mass.add(v.norm());
                }
            }
        }
        Ok((acc.value(), mass.value()))
    }
}

/// Gated `∫_path f(s) ds` (with `1/(2πi)` for circles), `f` given in full.
pub fn contour_integral(path: &ContourPath, mut f: impl FnMut(C64) -> Result<C64>) -> Result<Gated> {
    let p = *path;
    contour_integral_reduced(path, GATE_TOL, move |s| {
        let w = p.weight(s);
        let v = f(s)?;
        // Nodes whose weight underflows carry no information in this form.
        Ok(if w.norm() == 0.0 { C64::new(0.0, 0.0) } else { v / w })
    })
}

/// Node doubling stops at this multiple of the path's point count.
pub const MAX_POINT_FACTOR: usize = 16;

/// Gated `∫_path w(s) g(s) ds` where `g = f / w` is supplied directly.
/// Points are doubled (up to [`MAX_POINT_FACTOR`] times the path's count)
/// while successive evaluations disagree, which handles poles near the path.
pub fn contour_integral_reduced(
    path: &ContourPath,
    tol: f64,
    mut g: impl FnMut(C64) -> Result<C64>,
) -> Result<Gated> {
    path.validate()?;
    let what = format!("{path:?}");
    let n = path.points();
    gated_escalating(&what, n, MAX_POINT_FACTOR * n, tol, |m| path.discretize(m, &mut g))
}
