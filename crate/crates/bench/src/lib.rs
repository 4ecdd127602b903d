//! Shared inputs for the benchmarks under `benches/`.

use polyens_core::{ComplexMatrix, InvertibleEnsemble, Nu, RatioQuery, C64};

/// A well-conditioned dense complex matrix of size `n`.
pub fn matrix(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| {
        let d = if i == j { n as f64 } else { 0.0 };
        C64::new(d + ((i * 7 + j * 3) % 5) as f64 * 0.1, ((i + 2 * j) % 3) as f64 * 0.2)
    })
}

pub fn gue(n: usize) -> InvertibleEnsemble {
    let a = [0.0, 0.7, -0.7, -1.3, 1.1];
    InvertibleEnsemble::gue_ext(&a[..n]).expect("valid parameters")
}

pub fn chgue(n: usize, nu: f64) -> InvertibleEnsemble {
    let a = [0.3, 1.7, 0.9, 2.4, 1.2];
    InvertibleEnsemble::chgue_ext(&a[..n], Nu::new(nu).expect("valid nu")).expect("valid parameters")
}

/// The first `m` numerator and `l` denominator probe points.
pub fn query(m: usize, l: usize) -> RatioQuery {
    let zs = [C64::new(0.7, 0.2), C64::new(1.2, 0.0)];
    let ys = [C64::new(0.4, 1.0), C64::new(-0.6, 1.3)];
    RatioQuery::new(zs[..m].to_vec(), ys[..l].to_vec()).expect("valid query")
}
