//! Expert pools and the logarithmic pooling operator.
//!
//! For Beta opinions `f_i = Beta(a_i, b_i)` and weights `alpha` on the
//! simplex, the weighted geometric mixture `prod f_i^{alpha_i}` is the kernel
//! of `Beta(a*, b*)` with `a* = sum alpha_i a_i`, `b* = sum alpha_i b_i`; its
//! normalizing integral has the closed form
//!
//! ```text
//! ln I(alpha) = ln B(a*, b*) - sum_i alpha_i ln B(a_i, b_i)
//! ```
//!
//! The pooled density itself is `Beta(a*, b*)`, i.e. dividing the kernel by
//! `I(alpha)` restores a proper density (the normalizing constant of the pool
//! is the reciprocal of the integral). [`grid_pool`] provides the same
//! operation for arbitrary tabulated densities, normalized by quadrature; it
//! doubles as the independent oracle for the closed form.
//!
//! Weights with zero coordinates are accepted everywhere with the convention
//! `f^0 = 1`: both optimization criteria are allowed to choose boundary
//! solutions, so boundary weight vectors must evaluate cleanly.

use crate::error::{Error, Result};
use crate::quadrature::{integrate_01, QuadratureSpec};
use crate::real::Real;
use crate::special::log_beta;

fn sum_tolerance<F: Real>() -> F {
    F::from(1e-12)
        .unwrap()
        .max(F::epsilon() * F::from(8.0).unwrap())
}

/// One expert's prior: a Beta density with shape parameters `a` and `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaOpinion<F> {
    label: String,
    a: F,
    b: F,
    log_norm: F,
}

impl<F: Real> BetaOpinion<F> {
    pub fn new(label: impl Into<String>, a: F, b: F) -> Result<Self> {
        if !a.is_finite() || a <= F::zero() || !b.is_finite() || b <= F::zero() {
            return Err(Error::Domain(format!(
                "Beta shape parameters must be positive and finite, got ({a}, {b})"
            )));
        }
        Ok(Self {
            label: label.into(),
            a,
            b,
            log_norm: log_beta(a, b)?,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn a(&self) -> F {
        self.a
    }

    pub fn b(&self) -> F {
        self.b
    }

    /// `ln B(a, b)`, cached at construction.
    pub fn log_beta_norm(&self) -> F {
        self.log_norm
    }

    /// Log density at `theta in (0, 1)`.
    pub fn log_density(&self, theta: F) -> Result<F> {
        beta_log_density_raw(self.a, self.b, self.log_norm, theta)
    }

    /// Density at `theta in (0, 1)`.
    pub fn density(&self, theta: F) -> Result<F> {
        Ok(self.log_density(theta)?.exp())
    }
}

fn beta_log_density_raw<F: Real>(a: F, b: F, log_norm: F, theta: F) -> Result<F> {
    if !theta.is_finite() || theta <= F::zero() || theta >= F::one() {
        return Err(Error::Domain(format!(
            "density requires theta in (0, 1), got {theta}"
        )));
    }
    Ok((a - F::one()) * theta.ln() + (b - F::one()) * (F::one() - theta).ln() - log_norm)
}

/// Ordered, uniquely labelled collection of `K+1 >= 1` expert opinions.
#[derive(Debug, Clone, PartialEq)]
pub struct OpinionPool<F> {
    opinions: Vec<BetaOpinion<F>>,
}

impl<F: Real> OpinionPool<F> {
    pub fn new(opinions: Vec<BetaOpinion<F>>) -> Result<Self> {
        if opinions.is_empty() {
            return Err(Error::InvalidPool("pool must be non-empty".into()));
        }
        for (i, oi) in opinions.iter().enumerate() {
            for oj in opinions.iter().skip(i + 1) {
                if oi.label == oj.label {
                    return Err(Error::InvalidPool(format!(
                        "duplicate label {:?}",
                        oi.label
                    )));
                }
            }
        }
        Ok(Self { opinions })
    }

    /// Number of experts, `K+1`.
    pub fn len(&self) -> usize {
        self.opinions.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn opinions(&self) -> &[BetaOpinion<F>] {
        &self.opinions
    }

    pub fn get(&self, i: usize) -> &BetaOpinion<F> {
        &self.opinions[i]
    }

    /// Convenience wrapper around [`pool_beta`].
    pub fn pool(&self, weights: &WeightVector<F>) -> Result<PooledBeta<F>> {
        pool_beta(self, weights)
    }
}

/// A point on the `(K+1)`-simplex: non-negative coordinates summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector<F> {
    alpha: Vec<F>,
}

impl<F: Real> WeightVector<F> {
    pub fn new(alpha: Vec<F>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::InvalidWeights("weight vector is empty".into()));
        }
        let mut sum = F::zero();
        for &a in &alpha {
            if !a.is_finite() || a < F::zero() {
                return Err(Error::InvalidWeights(format!(
                    "weights must be non-negative and finite, got {a}"
                )));
            }
            sum += a;
        }
        if (sum - F::one()).abs() > sum_tolerance::<F>() {
            return Err(Error::InvalidWeights(format!(
                "weights must sum to 1, got {sum}"
            )));
        }
        Ok(Self { alpha })
    }

    /// Normalizes a non-negative vector with positive sum onto the simplex.
    pub fn from_unnormalized(raw: Vec<F>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::InvalidWeights("weight vector is empty".into()));
        }
        let mut sum = F::zero();
        for &a in &raw {
            if !a.is_finite() || a < F::zero() {
                return Err(Error::InvalidWeights(format!(
                    "weights must be non-negative and finite, got {a}"
                )));
            }
            sum += a;
        }
        if sum <= F::zero() {
            return Err(Error::InvalidWeights("weights sum to zero".into()));
        }
        let alpha = raw.into_iter().map(|a| a / sum).collect();
        Ok(Self { alpha })
    }

    /// Equal weights `1/(K+1)` on a pool of the given size.
    pub fn equal(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidWeights("weight vector is empty".into()));
        }
        let w = F::one() / F::from_usize(len).unwrap();
        Ok(Self {
            alpha: vec![w; len],
        })
    }

    /// Unit mass on coordinate `index`.
    pub fn vertex(len: usize, index: usize) -> Result<Self> {
        if index >= len {
            return Err(Error::InvalidWeights(format!(
                "vertex index {index} out of range for length {len}"
            )));
        }
        let mut alpha = vec![F::zero(); len];
        alpha[index] = F::one();
        Ok(Self { alpha })
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_slice(&self) -> &[F] {
        &self.alpha
    }

    pub fn get(&self, i: usize) -> F {
        self.alpha[i]
    }

    /// True when every coordinate exceeds `min`.
    pub fn is_interior(&self, min: F) -> bool {
        self.alpha.iter().all(|&a| a > min)
    }
}

/// The pooled prior `Beta(a*, b*)`, tagged with the weights that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct PooledBeta<F> {
    a_star: F,
    b_star: F,
    log_norm: F,
    weights: WeightVector<F>,
}

impl<F: Real> PooledBeta<F> {
    /// Direct construction from parameters (e.g. for oracle comparisons).
    pub fn from_parameters(a_star: F, b_star: F) -> Result<Self> {
        if !a_star.is_finite() || a_star <= F::zero() || !b_star.is_finite() || b_star <= F::zero() {
            return Err(Error::Domain(format!(
                "pooled parameters must be positive, got ({a_star}, {b_star})"
            )));
        }
        Ok(Self {
            a_star,
            b_star,
            log_norm: log_beta(a_star, b_star)?,
            weights: WeightVector::new(vec![F::one()])?,
        })
    }

    pub fn a_star(&self) -> F {
        self.a_star
    }

    pub fn b_star(&self) -> F {
        self.b_star
    }

    /// `ln B(a*, b*)`.
    pub fn log_beta_norm(&self) -> F {
        self.log_norm
    }

    /// The weights used to form this pool.
    pub fn weights(&self) -> &WeightVector<F> {
        &self.weights
    }

    /// Log density of the pooled prior at `theta in (0, 1)`.
    pub fn log_density(&self, theta: F) -> Result<F> {
        beta_log_density_raw(self.a_star, self.b_star, self.log_norm, theta)
    }

    pub fn density(&self, theta: F) -> Result<F> {
        Ok(self.log_density(theta)?.exp())
    }
}

/// Logarithmic pooling of Beta opinions: `(a*, b*) = (sum a_i alpha_i, sum b_i alpha_i)`.
pub fn pool_beta<F: Real>(pool: &OpinionPool<F>, w: &WeightVector<F>) -> Result<PooledBeta<F>> {
    if pool.len() != w.len() {
        return Err(Error::LengthMismatch {
            expected: pool.len(),
            got: w.len(),
        });
    }
    let mut a_star = F::zero();
    let mut b_star = F::zero();
    for (op, &alpha) in pool.opinions.iter().zip(w.as_slice()) {
        a_star += alpha * op.a;
        b_star += alpha * op.b;
    }
    Ok(PooledBeta {
        a_star,
        b_star,
        log_norm: log_beta(a_star, b_star)?,
        weights: w.clone(),
    })
}

/// Log density of the pooled prior at `theta`; equivalent to
/// [`PooledBeta::log_density`].
pub fn pooled_log_density<F: Real>(p: &PooledBeta<F>, theta: F) -> Result<F> {
    p.log_density(theta)
}

/// `ln integral prod_i f_i(theta)^{alpha_i} dtheta`, the log of the pooling
/// normalization integral.
///
/// By Hoelder's inequality this never exceeds zero and is convex in the
/// weights; its negation (the log of the normalizing constant) is the concave
/// quantity behind the uniqueness of the KL-optimal pool.
pub fn log_pool_integral<F: Real>(pool: &OpinionPool<F>, w: &WeightVector<F>) -> Result<F> {
    if pool.len() != w.len() {
        return Err(Error::LengthMismatch {
            expected: pool.len(),
            got: w.len(),
        });
    }
    let pooled = pool_beta(pool, w)?;
    let mut weighted = F::zero();
    for (op, &alpha) in pool.opinions.iter().zip(w.as_slice()) {
        weighted += alpha * op.log_norm;
    }
    Ok(pooled.log_norm - weighted)
}

/// A density tabulated on an open uniform grid over `(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityTable<F> {
    pub theta: Vec<F>,
    pub density: Vec<F>,
    /// `ln` of the normalization integral that was divided out.
    pub log_normalizer: F,
}

/// Generic-density pooling path: pointwise geometric mixture of arbitrary
/// densities, normalized to unit integral by quadrature and tabulated on an
/// open uniform grid of `grid_points` midpoints (clamped inside
/// `endpoint_epsilon`).
///
/// Zero weights follow the `f^0 = 1` convention. A non-finite or non-positive
/// normalization integral signals an improper pool (only reachable through
/// user-supplied non-density tables) and is reported as an error.
pub fn grid_pool<F: Real>(
    densities: &[&dyn Fn(F) -> F],
    w: &WeightVector<F>,
    spec: &QuadratureSpec<F>,
    grid_points: usize,
) -> Result<DensityTable<F>> {
    if densities.len() != w.len() {
        return Err(Error::LengthMismatch {
            expected: densities.len(),
            got: w.len(),
        });
    }
    if grid_points < 2 {
        return Err(Error::InvalidConfig(
            "grid_pool needs at least 2 grid points".into(),
        ));
    }
    spec.validate()?;

    let log_mixture = |theta: F| -> F {
        let mut s = F::zero();
        for (fi, &alpha) in densities.iter().zip(w.as_slice()) {
            if alpha == F::zero() {
                continue; // f^0 = 1 even where f vanishes or diverges
            }
            let v = fi(theta);
            if v > F::zero() {
                s += alpha * v.ln();
            } else {
                return F::neg_infinity();
            }
        }
        s
    };

    let norm = integrate_01(|theta| log_mixture(theta).exp(), spec)?;
    // A non-integrable mixture shows up either as a non-finite value or as an
    // endpoint-tail error estimate comparable to the truncated sum itself.
    let improper = !norm.value.is_finite()
        || norm.value <= F::zero()
        || norm.error_estimate > norm.value * F::from(0.1).unwrap();
    if improper {
        return Err(Error::NonFinite(format!(
            "pooled density has non-normalizable integral {} (error estimate {})",
            norm.value, norm.error_estimate
        )));
    }
    let log_z = norm.value.ln();

    let n = F::from_usize(grid_points).unwrap();
    let half = F::from(0.5).unwrap();
    let eps = spec.endpoint_epsilon;
    let mut theta = Vec::with_capacity(grid_points);
    let mut density = Vec::with_capacity(grid_points);
    for j in 0..grid_points {
        let t = ((F::from_usize(j).unwrap() + half) / n)
            .max(eps)
            .min(F::one() - eps);
        theta.push(t);
        density.push((log_mixture(t) - log_z).exp());
    }
    Ok(DensityTable {
        theta,
        density,
        log_normalizer: log_z,
    })
}
