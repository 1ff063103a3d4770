//! The four subcommands: pool, optimize, hier, report.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use logpool_core::hierarchical::{run_mcmc, McmcConfig};
use logpool_core::objectives::evidence;
use logpool_core::optimizer::{maximize_entropy, minimize_kl, OptimMethod, OptimizerConfig};
use logpool_core::pool::{pool_beta, PooledBeta, WeightVector};

use crate::input::PoolFile;
use crate::report::{fmt_sig, write_density_csv, write_draws_csv, RunReport};
use crate::{CliError, HierArgs, OptimizeArgs, PoolArgs, ReportArgs};

fn parse_weights(spec: &str, len: usize) -> Result<WeightVector<f64>, CliError> {
    if spec == "equal" {
        return WeightVector::equal(len).map_err(|e| CliError::Input(e.to_string()));
    }
    let parsed: Result<Vec<f64>, _> = spec
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect();
    let vals = parsed.map_err(|e| CliError::Input(format!("bad --weights value: {e}")))?;
    if vals.len() != len {
        return Err(CliError::Input(format!(
            "--weights has {} entries but the pool has {len} experts",
            vals.len()
        )));
    }
    WeightVector::new(vals).map_err(|e| CliError::Input(e.to_string()))
}

pub fn cmd_pool(args: &PoolArgs) -> Result<String, CliError> {
    let file = PoolFile::load(&args.input)?;
    let pool = file.to_pool()?;
    let obs = file.to_observation()?;
    let weights = parse_weights(&args.weights, pool.len())?;

    let mut report = RunReport::build("pool", &pool, &file.labels(), &weights, obs)?;
    let lpi = logpool_core::pool::log_pool_integral(&pool, &weights)
        .map_err(|e| CliError::Numeric(e.to_string()))?;
    report.push_diag("log_pool_integral", fmt_sig(lpi, args.precision));

    if args.verify {
        report.verify(&pool, obs)?;
    }
    if let Some(grid) = args.grid {
        let pooled = pool_beta(&pool, &weights).map_err(|e| CliError::Numeric(e.to_string()))?;
        write_density_csv(&args.csv, &pooled, obs, grid, args.precision)?;
    }

    let mut out = Vec::new();
    report
        .print(&mut out, args.precision)
        .map_err(|e| CliError::Input(e.to_string()))?;
    Ok(String::from_utf8(out).expect("report text is UTF-8"))
}

pub fn cmd_optimize(args: &OptimizeArgs) -> Result<String, CliError> {
    let file = PoolFile::load(&args.input)?;
    let pool = file.to_pool()?;
    let obs = file.to_observation()?;

    let cfg = OptimizerConfig {
        restarts: args.restarts,
        seed: args.seed,
        ..OptimizerConfig::default()
    };
    let result = match args.method.as_str() {
        "entropy" => maximize_entropy(&pool, &cfg),
        "kl" => minimize_kl(&pool, &cfg),
        other => {
            return Err(CliError::Input(format!(
                "--method must be `entropy` or `kl`, got {other:?}"
            )))
        }
    }
    .map_err(|e| CliError::Numeric(e.to_string()))?;

    let method_name = match result.method {
        OptimMethod::MaxEnt => "optimize/entropy",
        OptimMethod::MinKl => "optimize/kl",
    };
    let mut report = RunReport::build(method_name, &pool, &file.labels(), &result.weights, obs)?;
    report.push_diag(
        "objective_value",
        fmt_sig(result.objective_value, args.precision),
    );
    report.push_diag("converged", result.converged.to_string());
    report.push_diag(
        "candidates_evaluated",
        result.candidates_evaluated.to_string(),
    );
    report.push_diag("at_boundary", result.at_boundary.to_string());

    if args.verify {
        report.verify(&pool, obs)?;
    }
    let mut out = Vec::new();
    report
        .print(&mut out, args.precision)
        .map_err(|e| CliError::Input(e.to_string()))?;
    Ok(String::from_utf8(out).expect("report text is UTF-8"))
}

pub fn cmd_hier(args: &HierArgs) -> Result<String, CliError> {
    let file = PoolFile::load(&args.input)?;
    let pool = file.to_pool()?;
    let obs = file
        .to_observation()?
        .ok_or_else(|| CliError::Input("hier requires an `observation` in the input".into()))?;
    let prior = file.to_dirichlet()?;

    let cfg = McmcConfig {
        iterations: args.iterations,
        burn_in: args.burn_in,
        thin: args.thin,
        proposal_scale: args.proposal_scale,
        seed: args.seed,
    };
    let posterior =
        run_mcmc(&pool, &prior, obs, &cfg).map_err(|e| CliError::Numeric(e.to_string()))?;

    let mut report = RunReport::build(
        "hier",
        &pool,
        &file.labels(),
        &posterior.posterior_mean,
        Some(obs),
    )?;
    report.push_diag(
        "acceptance_rate",
        fmt_sig(posterior.acceptance_rate, args.precision),
    );
    let ess: Vec<String> = posterior
        .effective_sample_size
        .iter()
        .map(|&e| fmt_sig(e, args.precision))
        .collect();
    report.push_diag("effective_sample_size", ess.join(", "));
    report.push_diag("draws", posterior.draws.len().to_string());
    report.push_diag("degenerate", posterior.degenerate.to_string());

    if args.verify {
        report.verify(&pool, Some(obs))?;
    }
    if let Some(path) = &args.draws {
        write_draws_csv(path, &posterior.draws, args.precision)?;
    }

    let mut out = Vec::new();
    report
        .print(&mut out, args.precision)
        .map_err(|e| CliError::Input(e.to_string()))?;
    let text = String::from_utf8(out).expect("report text is UTF-8");
    if posterior.degenerate {
        // report is still printed by the caller before exiting non-zero
        print!("{text}");
        return Err(CliError::Numeric(
            "chain diagnostic failed: burn-in acceptance collapsed to 0 or 1".into(),
        ));
    }
    Ok(text)
}

struct MethodRow {
    name: &'static str,
    weights: WeightVector<f64>,
    pooled: PooledBeta<f64>,
}

pub fn cmd_report(args: &ReportArgs) -> Result<String, CliError> {
    let file = PoolFile::load(&args.input)?;
    let pool = file.to_pool()?;
    let obs = file
        .to_observation()?
        .ok_or_else(|| CliError::Input("report requires an `observation` in the input".into()))?;
    let prior = file.to_dirichlet()?;
    let sig = args.precision;

    let opt_cfg = OptimizerConfig {
        restarts: args.restarts,
        seed: args.seed,
        ..OptimizerConfig::default()
    };
    let mcmc_cfg = McmcConfig {
        iterations: args.iterations,
        burn_in: args.burn_in,
        thin: args.thin,
        seed: args.seed,
        ..McmcConfig::default()
    };

    let equal = WeightVector::equal(pool.len()).map_err(|e| CliError::Numeric(e.to_string()))?;
    let maxent = maximize_entropy(&pool, &opt_cfg).map_err(|e| CliError::Numeric(e.to_string()))?;
    let minkl = minimize_kl(&pool, &opt_cfg).map_err(|e| CliError::Numeric(e.to_string()))?;
    let hier =
        run_mcmc(&pool, &prior, obs, &mcmc_cfg).map_err(|e| CliError::Numeric(e.to_string()))?;

    let rows: Vec<MethodRow> = [
        ("equal", equal),
        ("max-entropy", maxent.weights),
        ("min-kl", minkl.weights),
        ("hierarchical", hier.posterior_mean.clone()),
    ]
    .into_iter()
    .map(|(name, weights)| -> Result<MethodRow, CliError> {
        let pooled = pool_beta(&pool, &weights).map_err(|e| CliError::Numeric(e.to_string()))?;
        Ok(MethodRow {
            name,
            weights,
            pooled,
        })
    })
    .collect::<Result<_, _>>()?;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "input: {} experts, observation y = {}, n = {}",
        pool.len(),
        obs.y(),
        obs.n()
    );
    let mle = obs
        .mle()
        .map_or_else(|| "none (n = 0)".into(), |m| fmt_sig(m, sig));
    let _ = writeln!(out, "mle: {mle}");
    let _ = writeln!(out);

    // method-by-weight table
    let _ = writeln!(out, "weights:");
    let name_w = 13;
    let mut header = format!("{:<name_w$}", "method");
    for i in 0..pool.len() {
        let _ = write!(header, " {:>12}", format!("alpha_{i}"));
    }
    let _ = writeln!(out, "{header}");
    for row in &rows {
        let mut line = format!("{:<name_w$}", row.name);
        for &w in row.weights.as_slice() {
            let _ = write!(line, " {:>12}", fmt_sig(w, sig));
        }
        let _ = writeln!(out, "{line}");
    }
    let _ = writeln!(out);

    // evidence table: experts then pooled priors
    let _ = writeln!(out, "evidence:");
    let label_w = file
        .labels()
        .iter()
        .map(|l| l.len() + 7)
        .chain(std::iter::once(20))
        .max()
        .unwrap();
    for (i, label) in file.labels().iter().enumerate() {
        let op = pool.get(i);
        let ev = evidence(op.a(), op.b(), obs).map_err(|e| CliError::Numeric(e.to_string()))?;
        let _ = writeln!(
            out,
            "{:<label_w$} {}",
            format!("expert {label}"),
            fmt_sig(ev, sig)
        );
    }
    for row in &rows {
        let ev = evidence(row.pooled.a_star(), row.pooled.b_star(), obs)
            .map_err(|e| CliError::Numeric(e.to_string()))?;
        let _ = writeln!(
            out,
            "{:<label_w$} {}",
            format!("pooled {}", row.name),
            fmt_sig(ev, sig)
        );
    }
    let _ = writeln!(out);

    // sampler diagnostics
    let _ = writeln!(
        out,
        "hierarchical: acceptance_rate {} draws {} degenerate {}",
        fmt_sig(hier.acceptance_rate, sig),
        hier.draws.len(),
        hier.degenerate
    );
    let _ = writeln!(
        out,
        "max-entropy: objective {} at_boundary {}",
        fmt_sig(maxent.objective_value, sig),
        maxent.at_boundary
    );
    let _ = writeln!(
        out,
        "min-kl: objective {} at_boundary {}",
        fmt_sig(minkl.objective_value, sig),
        minkl.at_boundary
    );
    let _ = writeln!(out);

    // density CSV bundle
    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::Input(format!("cannot create {}: {e}", args.out_dir.display())))?;
    let mut written: Vec<PathBuf> = Vec::new();
    for (i, _) in file.labels().iter().enumerate() {
        let op = pool.get(i);
        let prior_density = PooledBeta::from_parameters(op.a(), op.b())
            .map_err(|e| CliError::Numeric(e.to_string()))?;
        let path = args.out_dir.join(format!("expert_{i}.csv"));
        write_density_csv(&path, &prior_density, Some(obs), args.grid, sig)?;
        written.push(path);
    }
    for row in &rows {
        let path = args
            .out_dir
            .join(format!("pooled_{}.csv", row.name.replace('-', "_")));
        write_density_csv(&path, &row.pooled, Some(obs), args.grid, sig)?;
        written.push(path);
    }
    for path in &written {
        let _ = writeln!(out, "wrote: {}", display_path(path));
    }

    Ok(out)
}

/// Stable path rendering with forward slashes.
fn display_path(p: &Path) -> String {
    p.display().to_string().replace('\\', "/")
}
