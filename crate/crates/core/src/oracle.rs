//! Brute-force ground truth: Monte Carlo over the two matrix models, and
//! tensor-product quadrature of the joint density for `N ≤ 3`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::ensemble::{ensure_off_axis, PolynomialEnsemble};
use crate::error::{Error, Result};
use crate::numerics::sum::{CompensatedSum, ComplexSum};
use crate::numerics::{gated_escalating, gauss_rule, ComplexMatrix, Gated, C64, GATE_TOL};
use crate::specfun::factorial;

/// Minimum nodes per axis of [`quad_expect`].
pub const QUAD_MIN_NODES: usize = 120;

/// Eigenvalue samples, one sorted row of `N` values per matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    n: usize,
    eigenvalues: Vec<f64>,
    seed: u64,
}

impl SampleBatch {
    pub fn count(&self) -> usize {
        self.eigenvalues.len() / self.n.max(1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn sample(&self, i: usize) -> &[f64] {
        &self.eigenvalues[i * self.n..(i + 1) * self.n]
    }

    pub fn samples(&self) -> impl Iterator<Item = &[f64]> {
        self.eigenvalues.chunks(self.n)
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: C64,
    pub std_error: f64,
    pub count: usize,
}

impl McEstimate {
    /// `|mean - reference|` in units of the standard error.
    pub fn z_score(&self, reference: C64) -> f64 {
        let d = (self.mean - reference).norm();
        if d == 0.0 {
            0.0
        } else {
            d / self.std_error
        }
    }
}

/// Generator for sample `index`: the seed picks the key, the index the stream.
fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn sample_batch(
    n: usize,
    count: usize,
    seed: u64,
    draw: impl Fn(&mut ChaCha8Rng) -> Result<Vec<f64>> + Sync,
) -> Result<SampleBatch> {
    if count == 0 {
        return Err(Error::InvalidArgument("at least one sample is needed".into()));
    }
    let rows: Vec<Vec<f64>> = (0..count).into_par_iter().map(|i| draw(&mut sample_rng(seed, i))).collect::<Result<_>>()?;
    Ok(SampleBatch { n, eigenvalues: rows.concat(), seed })
}

/// Eigenvalues of `H = A + W` with `A = diag(a)` and `W` distributed as
/// `exp(-Tr W²)`: diagonal variance 1/2, off-diagonal real and imaginary
/// parts of variance 1/4 each.
pub fn sample_gue_ext(a: &[f64], count: usize, seed: u64) -> Result<SampleBatch> {
    let n = a.len();
    let diag = Normal::new(0.0, 0.5f64.sqrt()).expect("valid deviation");
    let off = Normal::new(0.0, 0.5).expect("valid deviation");
    sample_batch(n, count, seed, |rng| {
        let mut h = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            h[(i, i)] = C64::new(a[i] + diag.sample(rng), 0.0);
            for j in i + 1..n {
                let w = C64::new(off.sample(rng), off.sample(rng));
                h[(i, j)] = w;
                h[(j, i)] = w.conj();
            }
        }
        h.hermitian_eigenvalues()
    })
}

/// Eigenvalues of `XX†` with `X = A + W`, `W` an `N×(N+ν)` matrix distributed
/// as `exp(-Tr WW†)` and `A_{jj} = √a_j`.
pub fn sample_chgue_ext(a: &[f64], nu: f64, count: usize, seed: u64) -> Result<SampleBatch> {
    if !(nu >= 0.0) || nu.fract() != 0.0 {
        return Err(Error::InvalidArgument(format!("the matrix model needs an integer ν ≥ 0, got {nu}")));
    }
    if let Some(x) = a.iter().find(|&&x| !(x >= 0.0)) {
        return Err(Error::InvalidArgument(format!("parameter {x} must be nonnegative")));
    }
    let n = a.len();
    let cols = n + nu as usize;
    let entry = Normal::new(0.0, 0.5f64.sqrt()).expect("valid deviation");
    sample_batch(n, count, seed, |rng| {
        let x = ComplexMatrix::from_fn(n, cols, |i, j| {
            let shift = if i == j { a[i].sqrt() } else { 0.0 };
            C64::new(shift + entry.sample(rng), entry.sample(rng))
        });
        let mut xx = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v: C64 = (0..cols).map(|k| x[(i, k)] * x[(j, k)].conj()).sum();
                xx[(i, j)] = v;
                xx[(j, i)] = v.conj();
            }
            xx[(i, i)] = C64::new(xx[(i, i)].re, 0.0);
        }
        xx.hermitian_eigenvalues()
    })
}

/// Sample mean and standard error of `f` over the batch.
pub fn mc_expect(batch: &SampleBatch, f: impl Fn(&[f64]) -> C64) -> Result<McEstimate> {
    let count = batch.count();
    if count < 2 {
        return Err(Error::InvalidArgument("a standard error needs at least two samples".into()));
    }
    let values: Vec<C64> = batch.samples().map(f).collect();
    let mut sum = ComplexSum::new();
    values.iter().for_each(|&v| sum.add(v));
    let mean = sum.value() / count as f64;
    let mut sq = CompensatedSum::new();
    values.iter().for_each(|&v| sq.add((v - mean).norm_sqr()));
    let variance = sq.value() / (count - 1) as f64;
    Ok(McEstimate { mean, std_error: (variance / count as f64).sqrt(), count })
}

/// `∏_m D(z_m) / ∏_l D(y_l)` at one sample.
pub fn ratio_at(xs: &[f64], zs: &[C64], ys: &[C64]) -> C64 {
    let mut v = C64::new(1.0, 0.0);
    for &x in xs {
        for &z in zs {
            v *= z - x;
        }
        for &y in ys {
            v /= y - x;
        }
    }
    v
}

/// Monte Carlo estimate of `E[∏_m D(z_m) / ∏_l D(y_l)]`.
pub fn mc_expect_ratio(batch: &SampleBatch, zs: &[C64], ys: &[C64]) -> Result<McEstimate> {
    for &y in ys {
        ensure_off_axis(y, "y")?;
    }
    mc_expect(batch, |xs| ratio_at(xs, zs, ys))
}

/// Largest per-axis node count tried by [`quad_expect`] for each `N`.
fn quad_max_nodes(n: usize) -> usize {
    match n {
        1 => 64 * QUAD_MIN_NODES,
        2 => 16 * QUAD_MIN_NODES,
        _ => 4 * QUAD_MIN_NODES,
    }
}

/// `E[f]` by tensor-product Gauss quadrature of `f` times the joint density
/// over `I^N`, normalized by the ensemble's partition function. `f` must be
/// symmetric: only ordered node tuples are visited (coincident nodes carry
/// zero density) and the result is multiplied by `N!`.
pub fn quad_expect(ens: &PolynomialEnsemble, f: &(dyn Fn(&[f64]) -> C64 + Sync)) -> Result<Gated> {
    let n = ens.n();
    if n > 3 {
        return Err(Error::InvalidArgument(format!("tensor quadrature is limited to N ≤ 3, got {n}")));
    }
    let kind = ens.domain().quadrature();
    let z = ens.partition_function();
    let eval = |m: usize| -> Result<(C64, f64)> {
        let rule = gauss_rule(kind, m)?;
        let len = rule.len();
        let phis: Vec<f64> =
            (0..len).flat_map(|i| (1..=n).map(move |l| (i, l))).map(|(i, l)| ens.phi_reduced(l, rule.nodes[i])).collect();
        let phi = |i: usize, l: usize| phis[i * n + l];
        let partials: Vec<(C64, f64)> = (0..len)
            .into_par_iter()
            .map(|i| {
                let mut acc = ComplexSum::new();
                let mut mass = CompensatedSum::new();
                let mut visit = |idx: &[usize]| {
                    let xs: Vec<f64> = idx.iter().map(|&k| rule.nodes[k]).collect();
                    let w: f64 = idx.iter().map(|&k| rule.weights[k]).product();
                    let density = vandermonde_real(&xs) * det_small(n, |r, l| phi(idx[r], l));
                    let v = f(&xs) * (w * density);
                    acc.add(v);
                    mass.add(v.norm());
                };
                match n {
                    1 => visit(&[i]),
                    2 => (i + 1..len).for_each(|j| visit(&[i, j])),
                    _ => (i + 1..len).for_each(|j| (j + 1..len).for_each(|k| visit(&[i, j, k]))),
                }
                (acc.value(), mass.value())
            })
            .collect();
        let mut acc = ComplexSum::new();
        let mut mass = CompensatedSum::new();
        for (v, m) in partials {
            acc.add(v);
            mass.add(m);
        }
        let scale = factorial(n) / z;
        Ok((acc.value() * scale, mass.value() * scale.abs()))
    };
    gated_escalating("tensor quadrature", QUAD_MIN_NODES, quad_max_nodes(n), GATE_TOL, eval)
}

/// Tensor-quadrature `E[∏_m D(z_m) / ∏_l D(y_l)]`.
pub fn quad_expect_ratio(ens: &PolynomialEnsemble, zs: &[C64], ys: &[C64]) -> Result<Gated> {
    for &y in ys {
        ensure_off_axis(y, "y")?;
    }
    quad_expect(ens, &|xs| ratio_at(xs, zs, ys))
}

fn vandermonde_real(xs: &[f64]) -> f64 {
    let mut v = 1.0;
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            v *= xs[i] - xs[j];
        }
    }
    v
}

/// Determinant of an `n×n` real matrix for `n ≤ 3`.
fn det_small(n: usize, m: impl Fn(usize, usize) -> f64) -> f64 {
    match n {
        1 => m(0, 0),
        2 => m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0),
        _ => {
            m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
                + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::YoungDiagram;
    use crate::invertible::InvertibleEnsemble;
    use crate::specfun::Nu;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn batches_are_reproducible_and_sorted() {
        let a = [0.5, -0.5, 1.0];
        let b1 = sample_gue_ext(&a, 200, 7).unwrap();
        let b2 = sample_gue_ext(&a, 200, 7).unwrap();
        assert_eq!(b1, b2);
        assert_ne!(b1, sample_gue_ext(&a, 200, 8).unwrap());
        assert!(b1.samples().all(|s| s.windows(2).all(|w| w[0] <= w[1])));
        let c1 = sample_chgue_ext(&a.map(f64::abs), 1.0, 100, 3).unwrap();
        assert_eq!(c1, sample_chgue_ext(&a.map(f64::abs), 1.0, 100, 3).unwrap());
        assert_eq!(c1.count(), 100);
    }

    #[test]
    fn batch_prefixes_do_not_depend_on_count() {
        let small = sample_gue_ext(&[0.1, 0.2], 10, 11).unwrap();
        let large = sample_gue_ext(&[0.1, 0.2], 50, 11).unwrap();
        assert_eq!(small.sample(9), large.sample(9));
    }

    #[test]
    fn gue_moments() {
        let a = [0.5, -0.5, 1.3];
        let batch = sample_gue_ext(&a, 100_000, 1).unwrap();
        let sum = mc_expect(&batch, |xs| c(xs.iter().sum(), 0.0)).unwrap();
        assert!(sum.z_score(c(1.3, 0.0)) < 3.0, "{sum:?}");
        let sq = mc_expect(&batch, |xs| c(xs.iter().map(|x| x * x).sum(), 0.0)).unwrap();
        let want = a.iter().map(|x| x * x).sum::<f64>() + 9.0 / 2.0;
        assert!(sq.z_score(c(want, 0.0)) < 3.0, "{sq:?} vs {want}");
    }

    #[test]
    fn chgue_moments_and_positivity() {
        let a = [0.3, 1.7];
        let batch = sample_chgue_ext(&a, 1.0, 100_000, 2).unwrap();
        let sum = mc_expect(&batch, |xs| c(xs.iter().sum(), 0.0)).unwrap();
        assert!(sum.z_score(c(2.0 + 2.0 * 3.0, 0.0)) < 3.0, "{sum:?}");
        let tiny = sample_chgue_ext(&[1e-6, 2e-6], 0.0, 2000, 3).unwrap();
        assert!(tiny.samples().all(|s| s[0] >= -1e-12));
        assert!(sample_chgue_ext(&a, 0.5, 10, 0).is_err());
    }

    #[test]
    fn mc_ratio_edge_cases() {
        let batch = sample_gue_ext(&[0.2, -0.4], 1000, 5).unwrap();
        let one = mc_expect_ratio(&batch, &[], &[]).unwrap();
        assert_eq!((one.mean, one.std_error), (c(1.0, 0.0), 0.0));
        let big = c(1e3, 0.0);
        let lead = mc_expect_ratio(&batch, &[big], &[]).unwrap();
        assert!((lead.mean / (big * big) - 1.0).norm() < 3.0 * lead.std_error / 1e6 + 1e-3);
        assert!(mc_expect_ratio(&batch, &[], &[c(0.3, 0.0)]).is_err());
    }

    #[test]
    fn quadrature_normalization_and_mean() {
        for ens in [
            InvertibleEnsemble::gue_ext(&[0.5, -0.5]).unwrap(),
            InvertibleEnsemble::gue_ext(&[0.0, 0.7, -1.3]).unwrap(),
            InvertibleEnsemble::chgue_ext(&[0.3, 1.7, 0.9], Nu::new(2.5).unwrap()).unwrap(),
        ] {
            let poly = ens.polynomial();
            let norm = quad_expect(poly, &|_| c(1.0, 0.0)).unwrap();
            assert!((norm.value - 1.0).norm() < 1e-6, "{norm:?}");
            let mean = quad_expect(poly, &|xs| c(xs.iter().sum(), 0.0)).unwrap().value;
            let schur = poly.schur_expectation(&YoungDiagram::new(vec![1]).unwrap()).unwrap();
            assert!((mean - schur).norm() < 1e-6 * schur.abs().max(1.0), "{mean} vs {schur}");
        }
        let sym = InvertibleEnsemble::gue_ext(&[0.5, -0.5]).unwrap();
        let mean = quad_expect(sym.polynomial(), &|xs| c(xs.iter().sum(), 0.0)).unwrap().value;
        assert!(mean.norm() < 1e-6);
    }

    #[test]
    fn quadrature_limits() {
        let ens = InvertibleEnsemble::gue_ext(&[0.0, 0.5, 1.0, 1.5]).unwrap();
        assert!(quad_expect(ens.polynomial(), &|_| c(1.0, 0.0)).is_err());
        let ens = InvertibleEnsemble::gue_ext(&[0.0, 0.5]).unwrap();
        assert!(quad_expect_ratio(ens.polynomial(), &[], &[c(0.1, 0.0)]).is_err());
    }

    #[test]
    fn estimators_ignore_eigenvalue_order() {
        let zs = [c(0.3, 0.0)];
        let ys = [c(1.0, 1.0)];
        let xs = [0.4, -1.2, 0.9];
        let rev = [0.9, -1.2, 0.4];
        assert!((ratio_at(&xs, &zs, &ys) - ratio_at(&rev, &zs, &ys)).norm() < 1e-15);
    }
}
