use super::*;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn yd(p: &[usize]) -> YoungDiagram {
    YoungDiagram::new(p.to_vec()).unwrap()
}

/// `φ_l(x) = e^{-(x-a_l)²}/√π`, reduced against `e^{-x²}`.
fn shifted_gaussians(a: &[f64]) -> PolynomialEnsemble {
    let phis = a
        .iter()
        .map(|&al| Arc::new(move |x: f64| (2.0 * al * x - al * al).exp() / PI.sqrt()) as ReducedPhi)
        .collect();
    PolynomialEnsemble::new(Domain::RealLine, phis, DEFAULT_NODES).unwrap()
}

fn gaussian() -> PolynomialEnsemble {
    PolynomialEnsemble::new(Domain::RealLine, vec![Arc::new(|_| 1.0)], DEFAULT_NODES).unwrap()
}

#[test]
fn single_gaussian_density_and_moments() {
    let ens = gaussian();
    assert!((ens.partition_function() - PI.sqrt()).abs() < 1e-13);
    let d = ens.density(&[0.7]).unwrap();
    assert!((d - (-0.49f64).exp() / PI.sqrt()).abs() < 1e-14);
    let a = ens.moment_matrix(2).unwrap();
    assert!((a[(0, 0)].re - PI.sqrt()).abs() < 1e-13);
    assert!(a[(1, 0)].norm() < 1e-14);
    assert!((a[(2, 0)].re - PI.sqrt() / 2.0).abs() < 1e-13);
}

#[test]
fn density_vanishes_on_coincidence_and_is_symmetric() {
    let ens = shifted_gaussians(&[0.0, 0.5]);
    assert_eq!(ens.density(&[0.3, 0.3]).unwrap(), 0.0);
    let d12 = ens.density(&[0.2, -0.9]).unwrap();
    let d21 = ens.density(&[-0.9, 0.2]).unwrap();
    assert!((d12 - d21).abs() < 1e-15 * d12.abs().max(1e-300));
    assert!(d12 > 0.0);
    assert!(ens.density(&[0.1]).is_err());
}

#[test]
fn shifted_gaussian_mean() {
    let ens = shifted_gaussians(&[0.65]);
    let a = ens.moment_matrix(1).unwrap();
    assert!((a[(1, 0)] / a[(0, 0)] - 0.65).norm() < 1e-13);
}

#[test]
fn partition_function_of_shifted_gaussians() {
    // Z_N = N! Δ_N(a) for unit-mass shifted Gaussians.
    for a in [vec![0.4, -0.3], vec![0.0, 0.7, -0.7], vec![0.0, 0.7, -0.7, -1.3, 1.1]] {
        let ens = shifted_gaussians(&a);
        let pts: Vec<C64> = a.iter().map(|&x| c(x, 0.0)).collect();
        let want = factorial(a.len()) * vandermonde(&pts).re;
        let got = ens.partition_function();
        assert!((got - want).abs() <= 1e-8 * want.abs(), "{a:?}: {got} vs {want}");
    }
}

#[test]
fn repeated_functions_are_singular() {
    let phi: ReducedPhi = Arc::new(|_| 1.0);
    let err = PolynomialEnsemble::new(Domain::RealLine, vec![phi.clone(), phi], DEFAULT_NODES).unwrap_err();
    assert_eq!(err, Error::Singular);
}

#[test]
fn domain_validation() {
    let phi: ReducedPhi = Arc::new(|_| 1.0);
    assert!(PolynomialEnsemble::new(Domain::Interval { lo: 1.0, hi: 0.0 }, vec![phi.clone()], 20).is_err());
    assert!(PolynomialEnsemble::new(Domain::PositiveHalfLine { alpha: -1.5 }, vec![phi.clone()], 20).is_err());
    let unit = PolynomialEnsemble::new(Domain::Interval { lo: 0.0, hi: 1.0 }, vec![phi], 20).unwrap();
    assert!((unit.partition_function() - 1.0).abs() < 1e-14);
    assert!(unit.density(&[1.5]).is_err());
}

#[test]
fn schur_examples() {
    let xs = [c(1.0, 0.0), c(2.0, 0.0)];
    assert_eq!(schur(&YoungDiagram::empty(), &xs).unwrap(), c(1.0, 0.0));
    let x = [c(0.3, 0.2), c(-1.1, 0.5)];
    assert!((schur(&yd(&[1]), &x).unwrap() - (x[0] + x[1])).norm() < 1e-14);
    assert!((schur(&yd(&[2, 1]), &xs).unwrap() - 6.0).norm() < 1e-13);
    assert_eq!(schur(&yd(&[1, 1, 1]), &xs).unwrap(), c(0.0, 0.0));
    assert!(schur(&yd(&[1]), &[c(1.0, 0.0), c(1.0, 0.0)]).is_err());
}

#[test]
fn schur_expectation_basics() {
    let ens = shifted_gaussians(&[0.0, 0.7]);
    assert!((ens.schur_expectation(&YoungDiagram::empty()).unwrap() - 1.0).abs() < 1e-14);
    assert_eq!(ens.schur_expectation(&yd(&[1, 1, 1])).unwrap(), 0.0);
    // E[x_1 + x_2] is the sum of the shifts.
    assert!((ens.schur_expectation(&yd(&[1])).unwrap() - 0.7).abs() < 1e-12);
}

#[test]
fn h_indeterminate_cases() {
    let ens = shifted_gaussians(&[0.0, 0.7, -0.7]);
    assert_eq!(ens.h_indeterminate(-1, 1).unwrap(), 0.0);
    assert_eq!(ens.h_indeterminate(0, 3).unwrap(), 1.0);
    assert_eq!(ens.h_indeterminate(2, 5).unwrap(), 0.0);
    for s in 0..3 {
        assert!((ens.h_indeterminate(0, s).unwrap() - 1.0).abs() < 1e-12, "s={s}");
    }
}

#[test]
fn giambelli_examples() {
    let ens = shifted_gaussians(&[0.0, 0.7, -0.7]);
    let hook = ens.giambelli_check(&yd(&[3, 1])).unwrap();
    assert_eq!(hook.gap, 0.0);
    let square = ens.giambelli_check(&yd(&[2, 2])).unwrap();
    assert!(square.gap < 1e-8, "{square:?}");
    assert!(square.h_gap < 1e-8, "{square:?}");
    let long = ens.giambelli_check(&yd(&[1, 1, 1, 1])).unwrap();
    assert_eq!(long.lhs, 0.0);
    assert!(long.rhs.abs() < 1e-10);
}

#[test]
fn equal_ratio_degenerate_sizes() {
    let r = |z: C64, u: C64| Ok(z * u + 2.0);
    assert_eq!(equal_ratio_expectation(&[], &[], r).unwrap(), c(1.0, 0.0));
    let (z, u) = (c(0.3, 0.0), c(1.0, 1.0));
    assert!((equal_ratio_expectation(&[z], &[u], r).unwrap() - r(z, u).unwrap()).norm() < 1e-15);
}

#[test]
fn equal_ratio_permutation_invariance() {
    let r = |z: C64, u: C64| Ok((z - 0.2) / (u + 0.4 * z));
    let zs = [c(0.3, 0.0), c(-0.8, 0.1), c(0.5, -0.4)];
    let us = [c(1.0, 1.0), c(-2.0, 0.5), c(0.1, -0.9)];
    let base = equal_ratio_expectation(&zs, &us, r).unwrap();
    let zs2 = [zs[2], zs[0], zs[1]];
    let us2 = [us[1], us[2], us[0]];
    let other = equal_ratio_expectation(&zs2, &us2, r).unwrap();
    assert!((base - other).norm() < 1e-12 * base.norm().max(1.0));
}

#[test]
fn equal_ratio_preconditions() {
    let r = |_: C64, _: C64| Ok(c(1.0, 0.0));
    assert!(matches!(equal_ratio_expectation(&[c(0.0, 0.0)], &[c(1.0, 0.0)], r), Err(Error::OnRealAxis(_))));
    assert!(matches!(
        equal_ratio_expectation(&[c(0.0, 0.0), c(0.0, 0.0)], &[c(1.0, 1.0), c(2.0, 1.0)], r),
        Err(Error::Coincident(_))
    ));
    assert!(matches!(equal_ratio_expectation(&[c(1.0, 1.0)], &[c(1.0, 1.0)], r), Err(Error::Coincident(_))));
}

#[test]
fn inverse_expectation_single_function() {
    let ens = gaussian();
    let y = c(0.4, 1.0);
    let got = ens.inverse_expectation(y).unwrap();
    let direct = ens.integrate_against(1, "direct", |u| 1.0 / (y - u)).unwrap() / ens.gram()[(0, 0)];
    assert!((got.value - direct).norm() < 1e-13);
    assert!(got.gap < INVERSE_FORMS_TOL);
    let far = c(0.0, 1e3);
    let v = ens.inverse_expectation(far).unwrap().value;
    assert!((far * v - 1.0).norm() < 1e-2);
    assert!(matches!(ens.inverse_expectation(c(0.5, 0.0)), Err(Error::OnRealAxis(_))));
}

#[test]
fn inverse_expectation_forms_agree() {
    let ens = shifted_gaussians(&[0.0, 0.7, -1.3]);
    let got = ens.inverse_expectation(c(1.0, 1.0)).unwrap();
    assert!(got.gap < INVERSE_FORMS_TOL, "{got:?}");
}
