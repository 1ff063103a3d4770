//! Scalar special functions: log-gamma, digamma, trigamma, log-beta and
//! log-binomial-coefficient.
//!
//! Everything is evaluated in log space so that large shape parameters never
//! overflow downstream formulas. Accuracy targets: relative error below 1e-12
//! for `log_gamma` on `[1e-3, 1e6]` and absolute error below 1e-10 for
//! `digamma` (both with plenty of margin in `f64`).

use crate::error::{Error, Result};
use crate::real::Real;

/// Lanczos coefficients for the Pugh formulation of ln Gamma
/// ("An Analysis of the Lanczos Gamma Approximation", G. R. Pugh, 2004).
const LANCZOS_DK: [f64; 11] = [
    2.4857408913875355e-5,
    1.0514237858172197,
    -3.4568709722201625,
    4.512277094668948,
    -2.9828522532357664,
    1.056397115771267,
    -1.9542877319164587e-1,
    1.709705434044412e-2,
    -5.719261174043057e-4,
    4.633994733599057e-6,
    -2.7199490848860772e-9,
];

/// Lanczos shift parameter `r` paired with the coefficients above.
const LANCZOS_R: f64 = 10.900511;

/// `ln(2 sqrt(e / pi))`
const LN_2_SQRT_E_OVER_PI: f64 = 0.6207822376352452;

/// `ln(pi)`
const LN_PI: f64 = 1.1447298858494002;

fn lanczos_sum<F: Real>(x: F) -> F {
    let mut s = F::from(LANCZOS_DK[0]).unwrap();
    for (i, &c) in LANCZOS_DK.iter().enumerate().skip(1) {
        s += F::from(c).unwrap() / (x + F::from(i - 1).unwrap());
    }
    s
}

/// Natural logarithm of the gamma function for `x > 0`.
pub fn log_gamma<F: Real>(x: F) -> Result<F> {
    if !x.is_finite() || x <= F::zero() {
        return Err(Error::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    let half = F::from(0.5).unwrap();
    let r = F::from(LANCZOS_R).unwrap();
    let e = F::from(std::f64::consts::E).unwrap();
    if x < half {
        // reflection through Gamma(x) Gamma(1-x) = pi / sin(pi x)
        let pi = F::from(std::f64::consts::PI).unwrap();
        let s = lanczos_sum(F::one() - x);
        Ok(F::from(LN_PI).unwrap()
            - (pi * x).sin().ln()
            - s.ln()
            - F::from(LN_2_SQRT_E_OVER_PI).unwrap()
            - (half - x) * ((half - x + r) / e).ln())
    } else {
        let s = lanczos_sum(x);
        Ok(s.ln()
            + F::from(LN_2_SQRT_E_OVER_PI).unwrap()
            + (x - half) * ((x - half + r) / e).ln())
    }
}

/// Digamma function `psi(x) = d/dx ln Gamma(x)` for `x > 0`.
///
/// Upward recurrence pushes the argument past 12, where the asymptotic
/// expansion with Bernoulli-number coefficients converges well below the
/// 1e-10 target.
pub fn digamma<F: Real>(x: F) -> Result<F> {
    if !x.is_finite() || x <= F::zero() {
        return Err(Error::Domain(format!("digamma requires x > 0, got {x}")));
    }
    let cutoff = F::from(12.0).unwrap();
    let mut z = x;
    let mut acc = F::zero();
    while z < cutoff {
        acc -= z.recip();
        z += F::one();
    }
    let inv = z.recip();
    let inv2 = inv * inv;
    // psi(z) ~ ln z - 1/(2z) - sum B_{2n} / (2n z^{2n})
    let series = inv2
        * (F::from(1.0 / 12.0).unwrap()
            - inv2
                * (F::from(1.0 / 120.0).unwrap()
                    - inv2
                        * (F::from(1.0 / 252.0).unwrap()
                            - inv2
                                * (F::from(1.0 / 240.0).unwrap()
                                    - inv2 * F::from(1.0 / 132.0).unwrap()))));
    Ok(acc + z.ln() - inv * F::from(0.5).unwrap() - series)
}

/// Trigamma function `psi'(x)` for `x > 0`.
pub fn trigamma<F: Real>(x: F) -> Result<F> {
    if !x.is_finite() || x <= F::zero() {
        return Err(Error::Domain(format!("trigamma requires x > 0, got {x}")));
    }
    let cutoff = F::from(12.0).unwrap();
    let mut z = x;
    let mut acc = F::zero();
    while z < cutoff {
        acc += (z * z).recip();
        z += F::one();
    }
    let inv = z.recip();
    let inv2 = inv * inv;
    // psi'(z) ~ 1/z + 1/(2 z^2) + sum B_{2n} / z^{2n+1}
    let series = inv
        * (F::one()
            + inv * F::from(0.5).unwrap()
            + inv2
                * (F::from(1.0 / 6.0).unwrap()
                    - inv2
                        * (F::from(1.0 / 30.0).unwrap()
                            - inv2
                                * (F::from(1.0 / 42.0).unwrap()
                                    - inv2 * F::from(1.0 / 30.0).unwrap()))));
    Ok(acc + series)
}

/// `ln B(a, b) = ln Gamma(a) + ln Gamma(b) - ln Gamma(a+b)` for `a, b > 0`.
pub fn log_beta<F: Real>(a: F, b: F) -> Result<F> {
    if !a.is_finite() || a <= F::zero() || !b.is_finite() || b <= F::zero() {
        return Err(Error::Domain(format!(
            "log_beta requires a > 0 and b > 0, got ({a}, {b})"
        )));
    }
    Ok(log_gamma(a)? + log_gamma(b)? - log_gamma(a + b)?)
}

/// `ln C(n, y)` via log-gamma; requires `y <= n`.
pub fn log_choose<F: Real>(n: u64, y: u64) -> Result<F> {
    if y > n {
        return Err(Error::Domain(format!(
            "log_choose requires y <= n, got y = {y}, n = {n}"
        )));
    }
    let nf = F::from_u64(n).unwrap();
    let yf = F::from_u64(y).unwrap();
    Ok(log_gamma(nf + F::one())? - log_gamma(yf + F::one())? - log_gamma(nf - yf + F::one())?)
}
