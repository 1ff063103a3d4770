//! Run reports: deterministic text output, re-verification and CSV dumps.

use std::io::Write;
use std::path::Path;

use logpool_core::objectives::{
    evidence, pooled_entropy, posterior_beta, total_kl_loss, Observation,
};
use logpool_core::pool::{pool_beta, OpinionPool, PooledBeta, WeightVector};

use crate::CliError;

/// Everything a command reports about one pooled prior.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub method: String,
    pub labels: Vec<String>,
    pub weights: Vec<f64>,
    pub a_star: f64,
    pub b_star: f64,
    pub entropy: f64,
    pub total_kl: f64,
    pub evidence: Option<f64>,
    /// Ordered method-specific diagnostics (printed as given).
    pub diagnostics: Vec<(String, String)>,
}

impl RunReport {
    pub fn build(
        method: &str,
        pool: &OpinionPool<f64>,
        labels: &[String],
        weights: &WeightVector<f64>,
        obs: Option<Observation>,
    ) -> Result<Self, CliError> {
        let pooled = pool_beta(pool, weights).map_err(|e| CliError::Numeric(e.to_string()))?;
        let total_kl = total_kl_loss(pool, weights).map_err(|e| CliError::Numeric(e.to_string()))?;
        let ev = obs
            .map(|o| evidence(pooled.a_star(), pooled.b_star(), o))
            .transpose()
            .map_err(|e| CliError::Numeric(e.to_string()))?;
        Ok(RunReport {
            method: method.to_string(),
            labels: labels.to_vec(),
            weights: weights.as_slice().to_vec(),
            a_star: pooled.a_star(),
            b_star: pooled.b_star(),
            entropy: pooled_entropy(&pooled),
            total_kl,
            evidence: ev,
            diagnostics: Vec::new(),
        })
    }

    pub fn push_diag(&mut self, key: &str, value: String) {
        self.diagnostics.push((key.to_string(), value));
    }

    pub fn print(&self, out: &mut impl Write, sig: usize) -> std::io::Result<()> {
        writeln!(out, "method: {}", self.method)?;
        writeln!(out, "experts: {}", self.labels.join(", "))?;
        let w: Vec<String> = self.weights.iter().map(|&x| fmt_sig(x, sig)).collect();
        writeln!(out, "weights: {}", w.join(", "))?;
        writeln!(out, "pooled_a: {}", fmt_sig(self.a_star, sig))?;
        writeln!(out, "pooled_b: {}", fmt_sig(self.b_star, sig))?;
        writeln!(out, "entropy: {}", fmt_sig(self.entropy, sig))?;
        writeln!(out, "total_kl: {}", fmt_sig(self.total_kl, sig))?;
        if let Some(ev) = self.evidence {
            writeln!(out, "evidence: {}", fmt_sig(ev, sig))?;
        }
        for (k, v) in &self.diagnostics {
            writeln!(out, "{k}: {v}")?;
        }
        Ok(())
    }

    /// Recompute every scalar from `(pool, weights)` and fail on any mismatch
    /// beyond 1e-9.
    pub fn verify(&self, pool: &OpinionPool<f64>, obs: Option<Observation>) -> Result<(), CliError> {
        let w = WeightVector::new(self.weights.clone())
            .map_err(|e| CliError::Numeric(e.to_string()))?;
        let fresh = RunReport::build(&self.method, pool, &self.labels, &w, obs)?;
        let tol = 1e-9;
        let check = |name: &str, got: f64, want: f64| -> Result<(), CliError> {
            if (got - want).abs() > tol {
                Err(CliError::Numeric(format!(
                    "verification failed: {name} stored {got} but recomputes to {want}"
                )))
            } else {
                Ok(())
            }
        };
        check("pooled_a", self.a_star, fresh.a_star)?;
        check("pooled_b", self.b_star, fresh.b_star)?;
        check("entropy", self.entropy, fresh.entropy)?;
        check("total_kl", self.total_kl, fresh.total_kl)?;
        if let (Some(a), Some(b)) = (self.evidence, fresh.evidence) {
            check("evidence", a, b)?;
        }
        Ok(())
    }
}

/// Format with `sig` significant digits, fixed-point in the human range and
/// scientific outside it. Deterministic for identical inputs.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    let sig = sig.clamp(1, 17);
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..9).contains(&exp) {
        format!("{:.*e}", sig - 1, x)
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        format!("{:.*}", decimals, x)
    }
}

/// Write a `theta,prior,posterior` density CSV on the open midpoint grid
/// `(j + 1/2) / n`. The posterior column is the conjugate update of the prior
/// by `obs` (identical to the prior when there is no data).
pub fn write_density_csv(
    path: &Path,
    prior: &PooledBeta<f64>,
    obs: Option<Observation>,
    grid: usize,
    sig: usize,
) -> Result<(), CliError> {
    if grid < 2 {
        return Err(CliError::Input("--grid needs at least 2 points".into()));
    }
    let (pa, pb) = match obs {
        Some(o) => posterior_beta(prior.a_star(), prior.b_star(), o),
        None => (prior.a_star(), prior.b_star()),
    };
    let posterior =
        PooledBeta::from_parameters(pa, pb).map_err(|e| CliError::Numeric(e.to_string()))?;
    let mut body = String::from("theta,prior,posterior\n");
    let n = grid as f64;
    for j in 0..grid {
        let theta = (j as f64 + 0.5) / n;
        let p = prior
            .density(theta)
            .map_err(|e| CliError::Numeric(e.to_string()))?;
        let q = posterior
            .density(theta)
            .map_err(|e| CliError::Numeric(e.to_string()))?;
        body.push_str(&format!(
            "{},{},{}\n",
            fmt_sig(theta, sig),
            fmt_sig(p, sig),
            fmt_sig(q, sig)
        ));
    }
    std::fs::write(path, body)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

/// Dump thinned weight draws as CSV with one `alpha_i` column per expert.
pub fn write_draws_csv(
    path: &Path,
    draws: &[WeightVector<f64>],
    sig: usize,
) -> Result<(), CliError> {
    let k1 = draws.first().map_or(0, |d| d.len());
    let header: Vec<String> = (0..k1).map(|i| format!("alpha_{i}")).collect();
    let mut body = header.join(",");
    body.push('\n');
    for d in draws {
        let row: Vec<String> = d.as_slice().iter().map(|&x| fmt_sig(x, sig)).collect();
        body.push_str(&row.join(","));
        body.push('\n');
    }
    std::fs::write(path, body)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}
