//! Closed-form objectives over pooling weights: pooled entropy, KL loss and
//! beta-binomial evidence.

use crate::error::{Error, Result};
use crate::pool::{pool_beta, BetaOpinion, OpinionPool, PooledBeta, WeightVector};
use crate::real::Real;
use crate::special::{digamma, log_beta, log_choose};

/// Binomial data: `y` successes in `n` trials. `n = 0` encodes "no data".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Observation {
    y: u64,
    n: u64,
}

impl Observation {
    pub fn new(y: u64, n: u64) -> Result<Self> {
        if y > n {
            return Err(Error::Domain(format!(
                "observation requires y <= n, got y = {y}, n = {n}"
            )));
        }
        Ok(Self { y, n })
    }

    /// The empty observation (posterior equals prior).
    pub fn none() -> Self {
        Self { y: 0, n: 0 }
    }

    pub fn y(&self) -> u64 {
        self.y
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Maximum-likelihood estimate `y/n`; `None` without data.
    pub fn mle(&self) -> Option<f64> {
        (self.n > 0).then(|| self.y as f64 / self.n as f64)
    }
}

/// Differential entropy of `Beta(a, b)`:
///
/// `ln B(a,b) - (a-1) psi(a) - (b-1) psi(b) + (a+b-2) psi(a+b)`
pub fn beta_entropy<F: Real>(a: F, b: F) -> Result<F> {
    let two = F::from(2.0).unwrap();
    Ok(log_beta(a, b)? - (a - F::one()) * digamma(a)? - (b - F::one()) * digamma(b)?
        + (a + b - two) * digamma(a + b)?)
}

/// Entropy of the pooled prior (maximized by the entropy criterion).
pub fn pooled_entropy<F: Real>(p: &PooledBeta<F>) -> F {
    beta_entropy(p.a_star(), p.b_star()).expect("pooled parameters are positive")
}

/// `KL(Beta(a1,b1) || Beta(a2,b2))` in closed form.
pub fn kl_beta_divergence<F: Real>(a1: F, b1: F, a2: F, b2: F) -> Result<F> {
    let d = log_beta(a2, b2)? - log_beta(a1, b1)?
        + (a1 - a2) * digamma(a1)?
        + (b1 - b2) * digamma(b1)?
        + (a2 - a1 + b2 - b1) * digamma(a1 + b1)?;
    Ok(d)
}

/// KL divergence from one expert's opinion to the pooled prior.
pub fn kl_to_pool<F: Real>(opinion: &BetaOpinion<F>, p: &PooledBeta<F>) -> F {
    kl_beta_divergence(opinion.a(), opinion.b(), p.a_star(), p.b_star())
        .expect("opinion and pool parameters are positive")
}

/// Total KL loss `L(alpha) = sum_i KL(f_i || pool)`, the quantity minimized by
/// the KL criterion. Computed as the direct sum of the per-expert closed
/// forms.
pub fn total_kl_loss<F: Real>(pool: &OpinionPool<F>, w: &WeightVector<F>) -> Result<F> {
    let pooled = pool_beta(pool, w)?;
    let mut loss = F::zero();
    for op in pool.opinions() {
        loss += kl_to_pool(op, &pooled);
    }
    Ok(loss)
}

/// Diagnostic expansion of the total KL loss:
///
/// `L(alpha) = (K+1) ln I(alpha) + sum_j alpha_j sum_i KL(f_i || f_j)`
///
/// where `ln I` is the log pooling integral. Agrees with [`total_kl_loss`] to
/// rounding; the cross-divergence coefficient is `K+1`, one more than a naive
/// per-density count, because every one of the `K+1` divergences picks up the
/// same normalization term.
pub fn total_kl_loss_expanded<F: Real>(pool: &OpinionPool<F>, w: &WeightVector<F>) -> Result<F> {
    let log_integral = crate::pool::log_pool_integral(pool, w)?;
    let k1 = F::from_usize(pool.len()).unwrap();
    let mut cross = F::zero();
    for (j, oj) in pool.opinions().iter().enumerate() {
        let alpha_j = w.get(j);
        if alpha_j == F::zero() {
            continue;
        }
        let mut inner = F::zero();
        for oi in pool.opinions() {
            inner += kl_beta_divergence(oi.a(), oi.b(), oj.a(), oj.b())?;
        }
        cross += alpha_j * inner;
    }
    Ok(k1 * log_integral + cross)
}

/// Log of the beta-binomial marginal likelihood of `obs` under `Beta(a, b)`:
///
/// `ln C(n,y) + ln B(a+y, b+n-y) - ln B(a, b)`
pub fn log_evidence<F: Real>(a: F, b: F, obs: Observation) -> Result<F> {
    if !a.is_finite() || a <= F::zero() || !b.is_finite() || b <= F::zero() {
        return Err(Error::Domain(format!(
            "evidence requires positive shape parameters, got ({a}, {b})"
        )));
    }
    let y = F::from_u64(obs.y).unwrap();
    let nmy = F::from_u64(obs.n - obs.y).unwrap();
    Ok(log_choose::<F>(obs.n, obs.y)? + log_beta(a + y, b + nmy)? - log_beta(a, b)?)
}

/// Integrated (marginal) likelihood `l(y)` of `obs` under a `Beta(a, b)`
/// prior; the score used to compare expert and pooled priors.
pub fn evidence<F: Real>(a: F, b: F, obs: Observation) -> Result<F> {
    Ok(log_evidence(a, b, obs)?.exp())
}

/// Conjugate update: `Beta(a, b)` prior plus `obs` gives
/// `Beta(a + y, b + n - y)`.
pub fn posterior_beta<F: Real>(a: F, b: F, obs: Observation) -> (F, F) {
    (
        a + F::from_u64(obs.y).unwrap(),
        b + F::from_u64(obs.n - obs.y).unwrap(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pool::{pool_beta, BetaOpinion, OpinionPool, PooledBeta, WeightVector};
    use crate::quadrature::{entropy_oracle, integrate_01, QuadratureSpec};
    use rand::rngs::StdRng;
    use rand::{RngExt, SeedableRng};

    fn four_expert_pool() -> OpinionPool<f64> {
        let a = [18.10, 3.44, 8.32, 1.98];
        let b = [0.955, 0.860, 0.924, 0.848];
        OpinionPool::new(
            a.iter()
                .zip(&b)
                .enumerate()
                .map(|(i, (&ai, &bi))| BetaOpinion::new(format!("expert{i}"), ai, bi).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn observation_validation() {
        assert!(Observation::new(9, 10).is_ok());
        assert!(Observation::new(11, 10).is_err());
        assert_eq!(Observation::none().mle(), None);
        assert_eq!(Observation::new(9, 10).unwrap().mle(), Some(0.9));
    }

    #[test]
    fn entropy_trivial_and_derived_values() {
        assert!(beta_entropy(1.0f64, 1.0).unwrap().abs() < 1e-13);
        // ln(1/6) - 2 psi(2) + 2 psi(4), cross-checked by quadrature below
        let h22 = beta_entropy(2.0f64, 2.0).unwrap();
        assert!((h22 - (-0.1250928025613884)).abs() < 1e-12, "{h22}");
        let oracle = entropy_oracle(
            |t: f64| {
                PooledBeta::from_parameters(2.0, 2.0)
                    .unwrap()
                    .density(t)
                    .unwrap()
            },
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert!((h22 - oracle.value).abs() < 1e-9);
    }

    #[test]
    fn four_expert_vertex_entropies_against_quadrature() {
        // The widest opinion (expert 3) carries the highest entropy; every
        // closed-form value agrees with the quadrature oracle.
        let pool = four_expert_pool();
        let spec = QuadratureSpec::default();
        let mut entropies = Vec::new();
        for i in 0..4 {
            let op = pool.get(i).clone();
            let h = beta_entropy(op.a(), op.b()).unwrap();
            let oracle = entropy_oracle(|t| op.density(t).unwrap(), &spec).unwrap();
            assert!((h - oracle.value).abs() < 1e-8, "expert {i}");
            entropies.push(h);
        }
        let argmax = entropies
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert_eq!(argmax, 3);
    }

    #[test]
    fn kl_of_identical_distributions_is_zero() {
        let op = BetaOpinion::new("x", 2.0f64, 2.0).unwrap();
        let p = PooledBeta::from_parameters(2.0f64, 2.0).unwrap();
        assert!(kl_to_pool(&op, &p).abs() < 1e-14);
    }

    #[test]
    fn kl_derived_values_with_quadrature_oracle() {
        let spec = QuadratureSpec::default();
        // KL(Beta(2,2) || Beta(1,1)) = ln 6 + 2 psi(2) - 2 psi(4)
        let d = kl_beta_divergence(2.0f64, 2.0, 1.0, 1.0).unwrap();
        assert!((d - 0.1250928025613884).abs() < 1e-12, "{d}");
        // KL(Beta(1,1) || Beta(2,2)) = 2 - ln 6
        let d2 = kl_beta_divergence(1.0f64, 1.0, 2.0, 2.0).unwrap();
        assert!((d2 - (2.0 - 6.0f64.ln())).abs() < 1e-12, "{d2}");
        // both against the integral definition
        for (a1, b1, a2, b2, want) in [(2.0, 2.0, 1.0, 1.0, d), (1.0, 1.0, 2.0, 2.0, d2)] {
            let f = PooledBeta::from_parameters(a1, b1).unwrap();
            let g = PooledBeta::from_parameters(a2, b2).unwrap();
            let oracle = integrate_01(
                |t: f64| {
                    let fd = f.density(t).unwrap();
                    fd * (f.log_density(t).unwrap() - g.log_density(t).unwrap())
                },
                &spec,
            )
            .unwrap();
            assert!((oracle.value - want).abs() < 1e-9);
        }
    }

    #[test]
    fn gibbs_inequality_property() {
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..1000 {
            let a1: f64 = rng.random_range(0.3..25.0);
            let b1: f64 = rng.random_range(0.3..25.0);
            let a2: f64 = rng.random_range(0.3..25.0);
            let b2: f64 = rng.random_range(0.3..25.0);
            let d = kl_beta_divergence(a1, b1, a2, b2).unwrap();
            assert!(d >= -1e-12, "KL({a1},{b1}||{a2},{b2}) = {d}");
            if (a1 - a2).abs() < 1e-12 && (b1 - b2).abs() < 1e-12 {
                assert!(d.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn total_kl_loss_identical_pool_is_zero() {
        let twins = OpinionPool::new(vec![
            BetaOpinion::new("u", 3.0f64, 1.2).unwrap(),
            BetaOpinion::new("v", 3.0, 1.2).unwrap(),
        ])
        .unwrap();
        let w = WeightVector::new(vec![0.25, 0.75]).unwrap();
        assert!(total_kl_loss(&twins, &w).unwrap().abs() < 1e-12);
    }

    #[test]
    fn total_kl_loss_matches_per_term_quadrature() {
        let pool = four_expert_pool();
        let w = WeightVector::equal(4).unwrap();
        let loss = total_kl_loss(&pool, &w).unwrap();
        assert!(loss.is_finite() && loss > 0.0);
        let pooled = pool_beta(&pool, &w).unwrap();
        let spec = QuadratureSpec::default();
        let mut oracle = 0.0;
        for i in 0..4 {
            let op = pool.get(i).clone();
            let q = integrate_01(
                |t: f64| {
                    let fd = op.density(t).unwrap();
                    fd * (op.log_density(t).unwrap() - pooled.log_density(t).unwrap())
                },
                &spec,
            )
            .unwrap();
            oracle += q.value;
        }
        assert!((loss - oracle).abs() < 1e-6, "loss {loss}, oracle {oracle}");
    }

    #[test]
    fn expanded_loss_agrees_with_direct_sum() {
        let pool = four_expert_pool();
        let mut rng = StdRng::seed_from_u64(37);
        for _ in 0..50 {
            let raw: Vec<f64> = (0..4).map(|_| rng.random_range(0.01..1.0)).collect();
            let w = WeightVector::from_unnormalized(raw).unwrap();
            let direct = total_kl_loss(&pool, &w).unwrap();
            let expanded = total_kl_loss_expanded(&pool, &w).unwrap();
            assert!(
                (direct - expanded).abs() < 1e-10,
                "direct {direct}, expanded {expanded}"
            );
        }
    }

    #[test]
    fn evidence_uniform_prior_is_uniform_over_outcomes() {
        let obs = Observation::new(9, 10).unwrap();
        let e = evidence(1.0f64, 1.0, obs).unwrap();
        assert!((e - 1.0 / 11.0).abs() < 1e-12);
    }

    #[test]
    fn evidence_matches_quadrature_for_four_expert_pool() {
        let pool = four_expert_pool();
        let obs = Observation::new(9, 10).unwrap();
        let spec = QuadratureSpec::default();
        let ln_choose = 10.0f64.ln();
        for i in 0..4 {
            let op = pool.get(i).clone();
            let e = evidence(op.a(), op.b(), obs).unwrap();
            let q = integrate_01(
                |t: f64| {
                    (ln_choose + 9.0 * t.ln() + (1.0 - t).ln() + op.log_density(t).unwrap()).exp()
                },
                &spec,
            )
            .unwrap();
            assert!((e - q.value).abs() < 1e-8, "expert {i}: {e} vs {}", q.value);
        }
    }

    #[test]
    fn evidence_sum_rule() {
        // summing l(y) over all outcomes of n trials gives exactly 1
        let pool = four_expert_pool();
        for i in 0..4 {
            let op = pool.get(i);
            let total: f64 = (0..=10)
                .map(|y| evidence(op.a(), op.b(), Observation::new(y, 10).unwrap()).unwrap())
                .sum();
            assert!((total - 1.0).abs() < 1e-10, "expert {i}: {total}");
        }
    }

    #[test]
    fn posterior_update_is_conjugate() {
        let obs = Observation::new(9, 10).unwrap();
        assert_eq!(posterior_beta(1.0f64, 1.0, obs), (10.0, 2.0));
        let (a, b) = posterior_beta(18.10f64, 0.955, obs);
        assert!((a - 27.10).abs() < 1e-12 && (b - 1.955).abs() < 1e-12);
        let unchanged = posterior_beta(7.96f64, 0.89675, Observation::none());
        assert_eq!(unchanged, (7.96, 0.89675));
    }

    #[test]
    fn entropy_decomposition_against_quadrature() {
        // pooled entropy = sum_i alpha_i E_pool[-ln f_i] + ln I(alpha)
        let pool = four_expert_pool();
        let spec = QuadratureSpec::default();
        let mut rng = StdRng::seed_from_u64(41);
        for _ in 0..50 {
            let raw: Vec<f64> = (0..4).map(|_| rng.random_range(0.05..1.0)).collect();
            let w = WeightVector::from_unnormalized(raw).unwrap();
            let pooled = pool_beta(&pool, &w).unwrap();
            let h = pooled_entropy(&pooled);
            let log_integral = crate::pool::log_pool_integral(&pool, &w).unwrap();
            let mut expect = log_integral;
            for i in 0..4 {
                let op = pool.get(i).clone();
                let q = integrate_01(
                    |t: f64| -pooled.density(t).unwrap() * op.log_density(t).unwrap(),
                    &spec,
                )
                .unwrap();
                expect += w.get(i) * q.value;
            }
            assert!((h - expect).abs() < 1e-6, "h {h} vs decomposition {expect}");
        }
    }
}
