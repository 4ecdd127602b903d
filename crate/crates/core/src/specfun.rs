//! Monic Hermite and Laguerre polynomials, the entire Bessel series
//! `g_ν`, and `ln Γ`.
//!
//! `g_ν(w) = Σ_k w^k / (k! Γ(k + ν + 1))` satisfies `I_ν(2√w) = w^{ν/2} g_ν(w)`
//! and `J_ν(2√x) = x^{ν/2} g_ν(-x)`. Being entire, it replaces every
//! fractional-power Bessel expression in the toolkit.

use crate::error::{Error, Result};
use crate::numerics::C64;

/// Series terms are added until the next one drops below this fraction of
/// the running sum.
pub const SERIES_REL_TOL: f64 = 1e-16;
pub const SERIES_MAX_TERMS: usize = 500;

/// Bessel/Laguerre order, constrained to `ν > -1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Nu(f64);

impl Nu {
    pub fn new(value: f64) -> Result<Self> {
        if value > -1.0 && value.is_finite() {
            Ok(Nu(value))
        } else {
            Err(Error::InvalidArgument(format!("order {value} must be finite and exceed -1")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

const LN_FACTORIALS: [f64; 21] = {
    let mut t = [0.0; 21];
    let mut f = 1.0f64;
    let mut i = 1;
    while i < 21 {
        f *= i as f64;
        t[i] = f;
        i += 1;
    }
    t
};

/// `n!` as a float; exact up to 20, via `ln Γ` beyond.
pub fn factorial(n: usize) -> f64 {
    if n == 0 {
        1.0
    } else if n <= 20 {
        LN_FACTORIALS[n]
    } else {
        log_gamma(n as f64 + 1.0).map(f64::exp).unwrap_or(f64::INFINITY)
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!("log_gamma needs a positive argument, got {x}")));
    }
    if x.fract() == 0.0 && x <= 21.0 {
        return Ok(factorial(x as usize - 1).ln());
    }
    if x < 0.5 {
        return Ok(log_gamma(x + 1.0)? - x.ln());
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    Ok(0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln())
}

/// `2^{-k} H_k(z)`, monic of degree `k`.
pub fn hermite_monic(k: usize, z: C64) -> C64 {
    let mut prev = C64::new(0.0, 0.0);
    let mut cur = C64::new(1.0, 0.0);
    for j in 0..k {
        let next = z * cur - (j as f64 / 2.0) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `k! L_k^ν(-z)`, monic of degree `k`.
pub fn laguerre_monic(k: usize, nu: Nu, z: C64) -> C64 {
    let nu = nu.value();
    let mut prev = C64::new(0.0, 0.0);
    let mut cur = C64::new(1.0, 0.0);
    for j in 0..k {
        let j = j as f64;
        let next = (z + 2.0 * j + nu + 1.0) * cur - j * (j + nu) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `g_ν(w) = Σ_k w^k / (k! Γ(k + ν + 1))`.
pub fn bessel_i_reg(nu: Nu, w: C64) -> Result<C64> {
    let nu = nu.value();
    let mut term = C64::new((-log_gamma(nu + 1.0)?).exp(), 0.0);
    let mut sum = term;
    for k in 0..SERIES_MAX_TERMS {
        let kf = k as f64;
        term *= w / ((kf + 1.0) * (kf + nu + 1.0));
        sum += term;
        // The ratio of successive terms only decreases once k exceeds √|w|.
        if kf * kf >= w.norm() && term.norm() <= SERIES_REL_TOL * sum.norm() {
            if !(sum.re.is_finite() && sum.im.is_finite()) {
                return Err(Error::NonFinite(format!("g_{nu}({w})")));
            }
            return Ok(sum);
        }
    }
    Err(Error::SeriesNonConvergence(format!("g_{nu}({w})")))
}
