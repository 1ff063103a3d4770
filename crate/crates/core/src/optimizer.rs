//! Weight selection by optimization over the simplex.
//!
//! Two criteria are supported: maximize the entropy of the pooled prior, or
//! minimize the total KL divergence from the experts to the pool. Neither
//! criterion is restricted to the interior, and the entropy criterion in
//! particular tends to land on simplex vertices, so the search combines
//!
//! 1. an exact sweep over all `K+1` vertices (unreachable by any interior
//!    parameterization),
//! 2. the equal-weights center, and
//! 3. multi-start Nelder-Mead in additive log-ratio coordinates, restarted
//!    from uniform simplex draws under the configured seed, with the incumbent
//!    polished by two further Nelder-Mead runs at machine-level tolerance.
//!
//! Everything is deterministic for a fixed `(pool, config)`; ties within
//! 1e-12 of the best objective go to the lexicographically smallest weight
//! vector.

use rand::rngs::StdRng;
use rand::SeedableRng;

use crate::error::{Error, Result};
use crate::objectives::{pooled_entropy, total_kl_loss};
use crate::pool::{pool_beta, OpinionPool, WeightVector};
use crate::real::Real;
use crate::simplex::{alr_forward, alr_inverse, sample_simplex_uniform};

/// Search configuration; `seed` reproducibly determines all restart points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig<F> {
    pub restarts: usize,
    pub max_iterations: usize,
    /// Tolerance on the objective spread of the Nelder-Mead simplex.
    pub tolerance: F,
    pub seed: u64,
}

impl<F: Real> Default for OptimizerConfig<F> {
    fn default() -> Self {
        Self {
            restarts: 50,
            max_iterations: 2000,
            tolerance: F::from(1e-10).unwrap(),
            seed: 0,
        }
    }
}

impl<F: Real> OptimizerConfig<F> {
    fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iterations == 0 {
            return Err(Error::InvalidConfig(
                "restarts and max_iterations must be positive".into(),
            ));
        }
        if !self.tolerance.is_finite() || self.tolerance <= F::zero() {
            return Err(Error::InvalidConfig("tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// Which objective a result came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimMethod {
    MaxEnt,
    MinKl,
}

/// Outcome of one optimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimResult<F> {
    pub weights: WeightVector<F>,
    /// The criterion value at `weights` (entropy for MaxEnt, loss for MinKl).
    pub objective_value: F,
    pub method: OptimMethod,
    /// False when the winning local search ran out of iterations.
    pub converged: bool,
    /// Total objective evaluations across the candidate sweep and searches.
    pub candidates_evaluated: usize,
    /// True when any weight is below 1e-6.
    pub at_boundary: bool,
}

const BOUNDARY_EPS: f64 = 1e-6;
const TIE_EPS: f64 = 1e-12;

/// Maximize the entropy of the pooled prior over the simplex.
pub fn maximize_entropy<F: Real>(
    pool: &OpinionPool<F>,
    cfg: &OptimizerConfig<F>,
) -> Result<OptimResult<F>> {
    optimize(pool, cfg, OptimMethod::MaxEnt)
}

/// Minimize the total expert-to-pool KL divergence over the simplex.
///
/// The loss depends on the weights only through `(a*, b*)` and is convex, so
/// the pooled distribution found is unique even when boundary-degenerate
/// weight vectors are not.
pub fn minimize_kl<F: Real>(
    pool: &OpinionPool<F>,
    cfg: &OptimizerConfig<F>,
) -> Result<OptimResult<F>> {
    optimize(pool, cfg, OptimMethod::MinKl)
}

struct Candidate<F> {
    weights: Vec<F>,
    /// Value in minimization orientation.
    value: F,
    converged: bool,
}

fn optimize<F: Real>(
    pool: &OpinionPool<F>,
    cfg: &OptimizerConfig<F>,
    method: OptimMethod,
) -> Result<OptimResult<F>> {
    cfg.validate()?;
    let k1 = pool.len();
    let mut evals = 0usize;

    // Minimization-oriented objective.
    let eval = |alpha: &[F], evals: &mut usize| -> F {
        *evals += 1;
        let w = WeightVector::new(alpha.to_vec()).expect("candidates stay on the simplex");
        let v = match method {
            OptimMethod::MaxEnt => -pooled_entropy(&pool_beta(pool, &w).expect("length checked")),
            OptimMethod::MinKl => total_kl_loss(pool, &w).expect("length checked"),
        };
        if v.is_finite() {
            v
        } else {
            F::infinity()
        }
    };

    let mut candidates: Vec<Candidate<F>> = Vec::new();

    // Exact vertex sweep.
    for j in 0..k1 {
        let w = WeightVector::vertex(k1, j)?;
        let value = eval(w.as_slice(), &mut evals);
        candidates.push(Candidate {
            weights: w.as_slice().to_vec(),
            value,
            converged: true,
        });
    }

    // Equal-weights center, evaluated exactly.
    let center = WeightVector::equal(k1)?;
    let center_value = eval(center.as_slice(), &mut evals);
    candidates.push(Candidate {
        weights: center.as_slice().to_vec(),
        value: center_value,
        converged: true,
    });

    if k1 > 1 {
        let mut rng = StdRng::seed_from_u64(cfg.seed);
        let mut starts: Vec<Vec<F>> = vec![alr_forward(center.as_slice())];
        for _ in 0..cfg.restarts {
            let alpha: Vec<F> = sample_simplex_uniform(&mut rng, k1);
            starts.push(alr_forward(&alpha));
        }

        let mut local_best: Option<Candidate<F>> = None;
        for start in &starts {
            let outcome = nelder_mead(
                |z| {
                    let alpha = alr_inverse(z);
                    eval(&alpha, &mut evals)
                },
                start,
                F::from(0.25).unwrap(),
                cfg.tolerance,
                cfg.max_iterations,
            );
            let cand = Candidate {
                weights: alr_inverse(&outcome.z),
                value: outcome.value,
                converged: outcome.converged,
            };
            let better = match &local_best {
                None => true,
                Some(b) => cand.value < b.value,
            };
            if better {
                local_best = Some(cand);
            }
        }

        // Polish the best interior point down to the machine floor so that
        // independent seeds agree on the pooled distribution.
        if let Some(best) = local_best {
            let mut z = alr_forward(&clamp_interior(&best.weights));
            let mut value = best.value;
            let mut converged = best.converged;
            for step in [1e-3, 1e-5] {
                let outcome = nelder_mead(
                    |zz| {
                        let alpha = alr_inverse(zz);
                        eval(&alpha, &mut evals)
                    },
                    &z,
                    F::from(step).unwrap(),
                    F::epsilon() * F::from(4.0).unwrap(),
                    cfg.max_iterations,
                );
                if outcome.value <= value {
                    z = outcome.z;
                    value = outcome.value;
                    converged = outcome.converged || converged;
                }
            }
            candidates.push(Candidate {
                weights: alr_inverse(&z),
                value,
                converged,
            });
        }
    }

    // Deterministic winner: best value, ties broken lexicographically.
    let tie = F::from(TIE_EPS).unwrap();
    let best_value = candidates
        .iter()
        .map(|c| c.value)
        .fold(F::infinity(), F::min);
    let winner = candidates
        .iter()
        .filter(|c| c.value <= best_value + tie)
        .min_by(|x, y| {
            lex_cmp(&x.weights, &y.weights)
        })
        .expect("candidate list is non-empty");

    let weights = WeightVector::new(winner.weights.clone())?;
    let boundary_eps = F::from(BOUNDARY_EPS).unwrap();
    let at_boundary = !weights.is_interior(boundary_eps);
    let objective_value = match method {
        OptimMethod::MaxEnt => -winner.value,
        OptimMethod::MinKl => winner.value,
    };

    Ok(OptimResult {
        weights,
        objective_value,
        method,
        converged: winner.converged,
        candidates_evaluated: evals,
        at_boundary,
    })
}

fn lex_cmp<F: Real>(a: &[F], b: &[F]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(std::cmp::Ordering::Equal) | None => continue,
            Some(ord) => return ord,
        }
    }
    std::cmp::Ordering::Equal
}

/// Nudge exact zeros inside before mapping to ALR coordinates.
fn clamp_interior<F: Real>(alpha: &[F]) -> Vec<F> {
    let tiny = F::from(1e-15).unwrap();
    let mut out: Vec<F> = alpha.iter().map(|&a| a.max(tiny)).collect();
    let sum: F = out.iter().copied().sum();
    for v in &mut out {
        *v /= sum;
    }
    out
}

struct NmOutcome<F> {
    z: Vec<F>,
    value: F,
    converged: bool,
}

/// Plain Nelder-Mead with standard coefficients (reflect 1, expand 2,
/// contract 1/2, shrink 1/2), stopping on the objective spread of the
/// simplex.
fn nelder_mead<F: Real>(
    mut f: impl FnMut(&[F]) -> F,
    start: &[F],
    init_step: F,
    tolerance: F,
    max_iterations: usize,
) -> NmOutcome<F> {
    let dim = start.len();
    if dim == 0 {
        let value = f(start);
        return NmOutcome {
            z: start.to_vec(),
            value,
            converged: true,
        };
    }

    let mut simplex: Vec<(F, Vec<F>)> = Vec::with_capacity(dim + 1);
    let v0 = f(start);
    simplex.push((v0, start.to_vec()));
    for i in 0..dim {
        let mut p = start.to_vec();
        p[i] += init_step;
        let v = f(&p);
        simplex.push((v, p));
    }

    let mut converged = false;
    for _ in 0..max_iterations {
        simplex.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        let spread = simplex[dim].0 - simplex[0].0;
        if spread <= tolerance {
            converged = true;
            break;
        }

        // Centroid of all but the worst point.
        let mut centroid = vec![F::zero(); dim];
        for (_, p) in &simplex[..dim] {
            for (c, &x) in centroid.iter_mut().zip(p) {
                *c += x;
            }
        }
        let nf = F::from_usize(dim).unwrap();
        for c in &mut centroid {
            *c /= nf;
        }

        let worst = simplex[dim].clone();
        let reflect: Vec<F> = centroid
            .iter()
            .zip(&worst.1)
            .map(|(&c, &w)| c + (c - w))
            .collect();
        let fr = f(&reflect);

        if fr < simplex[0].0 {
            let expand: Vec<F> = centroid
                .iter()
                .zip(&reflect)
                .map(|(&c, &r)| c + (r - c) * F::from(2.0).unwrap())
                .collect();
            let fe = f(&expand);
            simplex[dim] = if fe < fr { (fe, expand) } else { (fr, reflect) };
        } else if fr < simplex[dim - 1].0 {
            simplex[dim] = (fr, reflect);
        } else {
            let half = F::from(0.5).unwrap();
            let toward = if fr < worst.0 { &reflect } else { &worst.1 };
            let contract: Vec<F> = centroid
                .iter()
                .zip(toward)
                .map(|(&c, &t)| c + (t - c) * half)
                .collect();
            let fc = f(&contract);
            if fc < worst.0.min(fr) {
                simplex[dim] = (fc, contract);
            } else {
                // Shrink everything toward the best point.
                let best = simplex[0].1.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let p: Vec<F> = best
                        .iter()
                        .zip(&entry.1)
                        .map(|(&b, &x)| b + (x - b) * half)
                        .collect();
                    entry.0 = f(&p);
                    entry.1 = p;
                }
            }
        }
    }

    simplex.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    NmOutcome {
        z: simplex[0].1.clone(),
        value: simplex[0].0,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::total_kl_loss;
    use crate::pool::BetaOpinion;
    use rand::RngExt;

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

    fn small_cfg(seed: u64) -> OptimizerConfig<f64> {
        OptimizerConfig {
            restarts: 20,
            max_iterations: 2000,
            tolerance: 1e-12,
            seed,
        }
    }

    #[test]
    fn single_expert_pool_is_trivial() {
        let pool = OpinionPool::new(vec![BetaOpinion::new("only", 2.0f64, 3.0).unwrap()]).unwrap();
        let r = maximize_entropy(&pool, &OptimizerConfig::default()).unwrap();
        assert_eq!(r.weights.as_slice(), &[1.0]);
        assert!(r.converged);
        let r = minimize_kl(&pool, &OptimizerConfig::default()).unwrap();
        assert_eq!(r.weights.as_slice(), &[1.0]);
        assert!(r.objective_value.abs() < 1e-12);
    }

    #[test]
    fn identical_opinions_make_objectives_constant() {
        let pool = OpinionPool::new(vec![
            BetaOpinion::new("u", 2.0f64, 2.0).unwrap(),
            BetaOpinion::new("v", 2.0, 2.0).unwrap(),
        ])
        .unwrap();
        let r = maximize_entropy(&pool, &small_cfg(1)).unwrap();
        let want = crate::objectives::beta_entropy(2.0f64, 2.0).unwrap();
        assert!((r.objective_value - want).abs() < 1e-10);
        let r = minimize_kl(&pool, &small_cfg(1)).unwrap();
        assert!(r.objective_value.abs() < 1e-12);
        let p = pool_beta(&pool, &r.weights).unwrap();
        assert!((p.a_star() - 2.0).abs() < 1e-12 && (p.b_star() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn maxent_dominates_vertices_and_center() {
        let pool = four_expert_pool();
        let r = maximize_entropy(&pool, &small_cfg(2)).unwrap();
        for j in 0..4 {
            let w = WeightVector::vertex(4, j).unwrap();
            let h = pooled_entropy(&pool_beta(&pool, &w).unwrap());
            assert!(r.objective_value >= h - 1e-12, "vertex {j}");
        }
        let center = WeightVector::equal(4).unwrap();
        let hc = pooled_entropy(&pool_beta(&pool, &center).unwrap());
        assert!(r.objective_value >= hc - 1e-12);
        assert!(r.at_boundary);
    }

    #[test]
    fn maxent_beats_random_search_oracle() {
        let pool = four_expert_pool();
        let r = maximize_entropy(&pool, &small_cfg(3)).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(99);
        for _ in 0..2000 {
            let w =
                WeightVector::new(crate::simplex::sample_simplex_uniform(&mut rng, 4)).unwrap();
            let h = pooled_entropy(&pool_beta(&pool, &w).unwrap());
            assert!(r.objective_value >= h - 1e-9);
        }
    }

    #[test]
    fn minkl_matches_dense_random_search_oracle() {
        // two identical Beta(2,2) opinions plus Beta(5,1): the loss depends on
        // the twins only through their combined weight, so a dense random
        // search pins the optimal loss very tightly
        let pool = OpinionPool::new(vec![
            BetaOpinion::new("t1", 2.0f64, 2.0).unwrap(),
            BetaOpinion::new("t2", 2.0, 2.0).unwrap(),
            BetaOpinion::new("odd", 5.0, 1.0).unwrap(),
        ])
        .unwrap();
        let r = minimize_kl(&pool, &small_cfg(4)).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let mut oracle = f64::INFINITY;
        for _ in 0..1_000_000 {
            let w =
                WeightVector::new(crate::simplex::sample_simplex_uniform(&mut rng, 3)).unwrap();
            oracle = oracle.min(total_kl_loss(&pool, &w).unwrap());
        }
        assert!(
            (r.objective_value - oracle).abs() < 1e-6,
            "optimizer {} vs oracle {oracle}",
            r.objective_value
        );
    }

    #[test]
    fn determinism_bit_for_bit() {
        let pool = four_expert_pool();
        let cfg = small_cfg(5);
        let r1 = maximize_entropy(&pool, &cfg).unwrap();
        let r2 = maximize_entropy(&pool, &cfg).unwrap();
        assert_eq!(r1, r2);
        let k1 = minimize_kl(&pool, &cfg).unwrap();
        let k2 = minimize_kl(&pool, &cfg).unwrap();
        assert_eq!(k1, k2);
    }

    #[test]
    fn minkl_distribution_unique_across_seeds() {
        let pool = four_expert_pool();
        let mut params: Vec<(f64, f64)> = Vec::new();
        for seed in 0..10u64 {
            let r = minimize_kl(&pool, &small_cfg(seed)).unwrap();
            let p = pool_beta(&pool, &r.weights).unwrap();
            params.push((p.a_star(), p.b_star()));
        }
        for i in 0..params.len() {
            for j in (i + 1)..params.len() {
                assert!(
                    (params[i].0 - params[j].0).abs() <= 1e-5
                        && (params[i].1 - params[j].1).abs() <= 1e-5,
                    "seeds {i},{j}: {:?} vs {:?}",
                    params[i],
                    params[j]
                );
            }
        }
    }

    #[test]
    fn objective_value_recomputes_at_weights() {
        let pool = four_expert_pool();
        let r = minimize_kl(&pool, &small_cfg(6)).unwrap();
        let re = total_kl_loss(&pool, &r.weights).unwrap();
        assert!((r.objective_value - re).abs() < 1e-9);
        let r = maximize_entropy(&pool, &small_cfg(6)).unwrap();
        let re = pooled_entropy(&pool_beta(&pool, &r.weights).unwrap());
        assert!((r.objective_value - re).abs() < 1e-9);
    }

    #[test]
    fn every_search_candidate_is_feasible() {
        // exercised indirectly: the objective closure constructs a validated
        // WeightVector for every evaluation, so any infeasible candidate
        // panics inside the optimizer
        let pool = four_expert_pool();
        let mut rng = rand::rngs::StdRng::seed_from_u64(123);
        for _ in 0..5 {
            let seed = rng.random::<u64>();
            minimize_kl(&pool, &small_cfg(seed)).unwrap();
            maximize_entropy(&pool, &small_cfg(seed)).unwrap();
        }
    }

    #[test]
    fn rejects_bad_config() {
        let pool = four_expert_pool();
        let cfg = OptimizerConfig::<f64> {
            restarts: 0,
            ..OptimizerConfig::default()
        };
        assert!(maximize_entropy(&pool, &cfg).is_err());
        let cfg = OptimizerConfig::<f64> {
            tolerance: 0.0,
            ..OptimizerConfig::default()
        };
        assert!(minimize_kl(&pool, &cfg).is_err());
    }
}
