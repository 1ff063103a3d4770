//! Additive log-ratio (ALR) coordinates for the open simplex.
//!
//! A point `alpha` on the open `(K+1)`-simplex maps to `z in R^K` via
//! `z_i = ln(alpha_i / alpha_K)`; the inverse is a softmax over `[z, 0]`.
//! Both the optimizer and the Metropolis sampler work in `z` so that moves
//! stay feasible by construction.

use rand::{Rng, RngExt};

use crate::real::Real;

/// Softmax over `[z, 0]`, shifted by the maximum for overflow safety.
/// The result sums to one up to a couple of ulps.
pub(crate) fn alr_inverse<F: Real>(z: &[F]) -> Vec<F> {
    let mut m = F::zero();
    for &v in z {
        if v > m {
            m = v;
        }
    }
    let mut out = Vec::with_capacity(z.len() + 1);
    let mut sum = F::zero();
    for &v in z {
        let e = (v - m).exp();
        out.push(e);
        sum += e;
    }
    let last = (-m).exp();
    out.push(last);
    sum += last;
    for v in &mut out {
        *v /= sum;
    }
    out
}

/// Forward map; requires strictly positive coordinates.
pub(crate) fn alr_forward<F: Real>(alpha: &[F]) -> Vec<F> {
    let last = alpha[alpha.len() - 1];
    alpha[..alpha.len() - 1]
        .iter()
        .map(|&a| (a / last).ln())
        .collect()
}

/// Log-Jacobian of the ALR inverse: `sum_i ln alpha_i` over all K+1 coords.
pub(crate) fn log_alr_jacobian<F: Real>(alpha: &[F]) -> F {
    let mut s = F::zero();
    for &a in alpha {
        s += a.ln();
    }
    s
}

/// One uniform draw from the open simplex (Dirichlet with unit shape),
/// via normalized exponentials.
pub(crate) fn sample_simplex_uniform<F: Real, R: Rng>(rng: &mut R, len: usize) -> Vec<F> {
    let mut out = Vec::with_capacity(len);
    let mut sum = F::zero();
    for _ in 0..len {
        let u: f64 = rng.random();
        // -ln(1-u) is Exp(1); 1-u avoids ln(0)
        let e = F::from(-(1.0 - u).ln()).unwrap().max(F::min_positive_value());
        out.push(e);
        sum += e;
    }
    for v in &mut out {
        *v /= sum;
    }
    out
}
