use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use paramtune::experiments::{
    emit_records, emit_summary, load_records, run_scenario, summarize, threads_from_env,
    ConfiguratorKind, Family, ScenarioSpec, TrialRecord,
};
use paramtune::landscape::{
    check_approx_unimodal, check_slices, load_cached_landscape, minimal_certificate, Unimodality,
};
use paramtune::rng::{derive_seed, rng_from_seed};
use paramtune::sat::{evaluate_saps_landscape, parse_dimacs, planted_3sat, saps_grid, CnfFormula};

mod config;

use config::{required, CheckOptions, EvaluateOptions, RunOptions, SummarizeOptions};

/// Perturbative algorithm configuration experiments.
///
/// Set TUNE_THREADS to cap the worker pool.
#[derive(Parser, Debug)]
#[command(name = "tune", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a configurator repeatedly over growing parameter spaces and
    /// record calls to better() until an optimal configuration is sampled.
    Run(RunOptions),
    /// Compare two operators per space size (mean, stderr, Mann-Whitney p,
    /// Cliff's delta).
    Summarize(SummarizeOptions),
    /// Check a landscape for (α, β)-approximate unimodality.
    LandscapeCheck(CheckOptions),
    /// Evaluate SAPS exhaustively over the (α, ρ) grid and write a cached
    /// landscape.
    EvaluateLandscape(EvaluateOptions),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = configure_threads().and_then(|()| match cli.command {
        Command::Run(opts) => run(opts.resolve()?),
        Command::Summarize(opts) => summarize_cmd(opts.resolve()?),
        Command::LandscapeCheck(opts) => landscape_check(opts.resolve()?),
        Command::EvaluateLandscape(opts) => evaluate(opts.resolve()?),
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> Result<()> {
    if let Some(n) = threads_from_env()? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the worker pool")?;
    }
    Ok(())
}

fn run(opts: RunOptions) -> Result<ExitCode> {
    let family: Family = required(opts.family, "family")?.parse()?;
    let configurator: ConfiguratorKind =
        opts.configurator.as_deref().unwrap_or("paramrls").parse()?;
    let operators = required(opts.operator, "operator")?;
    let out = required(opts.out, "out")?;
    let cached = match (&opts.landscape, family) {
        (Some(path), _) => Some(Arc::new(load_cached_landscape(
            path,
            opts.top.unwrap_or(5),
        )?)),
        (None, Family::SapsCached) => bail!("saps-cached needs --landscape <csv>"),
        (None, _) => None,
    };
    let mut records: Vec<TrialRecord> = Vec::new();
    for operator in &operators {
        let mut spec = ScenarioSpec::new(family, configurator, operator);
        spec.sizes = required(opts.sizes.clone(), "sizes")?;
        spec.repetitions = opts.reps.unwrap_or(spec.repetitions);
        spec.runs = opts.r.unwrap_or(spec.runs);
        spec.kappa = opts.kappa;
        spec.master_seed = opts.seed.unwrap_or(0);
        spec.max_step = opts.max_step;
        if let Some(d) = &opts.direction {
            spec.direction = d.parse()?;
        }
        spec.n = opts.n.unwrap_or(spec.n);
        spec.top = opts.top.unwrap_or(spec.top);
        spec.cached = cached.clone();
        spec.max_calls = opts.max_calls;
        spec.ils.initial_samples = opts.ils_samples.unwrap_or(spec.ils.initial_samples);
        spec.ils.perturbation_strength =
            opts.ils_strength.unwrap_or(spec.ils.perturbation_strength);
        spec.ils.restart_probability = opts.ils_restart.unwrap_or(spec.ils.restart_probability);
        records.extend(run_scenario(&spec)?);
    }
    emit_records(&records, &out)?;
    let failed = records.iter().filter(|r| r.better_calls.is_none()).count();
    let censored = records.iter().filter(|r| r.is_censored()).count();
    eprintln!(
        "wrote {} records to {} ({failed} failed, {censored} censored)",
        records.len(),
        out.display()
    );
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn summarize_cmd(opts: SummarizeOptions) -> Result<ExitCode> {
    let mut records = Vec::new();
    for path in required(opts.raw, "raw")? {
        records.extend(load_records(&path)?);
    }
    let rows = summarize(
        &records,
        &required(opts.baseline, "baseline")?,
        &required(opts.candidate, "candidate")?,
    )?;
    let out = required(opts.out, "out")?;
    emit_summary(&rows, &out)?;
    for row in &rows {
        let cmp = match (row.p_value, row.cliffs_delta) {
            (Some(p), Some(d)) => format!("  p={p:.4} delta={d:+.3}"),
            _ => String::new(),
        };
        println!(
            "{} {} {:>10} size {:>4}: mean {:>9.2} ± {:<7.2} n={}{cmp}",
            row.family, row.configurator, row.operator, row.space_size, row.mean, row.stderr, row.n
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn landscape_check(opts: CheckOptions) -> Result<ExitCode> {
    let path = required(opts.file, "file")?;
    let landscape = load_cached_landscape(&path, 1)?;
    let step = opts.step.unwrap_or(0.01);
    if landscape.space().num_dims() > 1 {
        let (alpha, beta) = (opts.alpha.unwrap_or(1.0), opts.beta.unwrap_or(1));
        let mut all = true;
        for report in check_slices(&landscape, alpha, beta) {
            let fixed: Vec<String> = report
                .fixed
                .iter()
                .enumerate()
                .map(|(d, v)| {
                    if d == report.axis {
                        "*".into()
                    } else {
                        v.to_string()
                    }
                })
                .collect();
            let verdict = match &report.outcome {
                Ok(Unimodality::Pass) => "pass".to_owned(),
                Ok(Unimodality::Witness { x, y }) => format!("fail: witness x={x} y={y}"),
                Err(e) => format!("skipped: {e}"),
            };
            all &= matches!(report.outcome, Ok(Unimodality::Pass));
            println!("slice ({}) ({alpha}, {beta}): {verdict}", fixed.join(","));
        }
        return Ok(if all {
            ExitCode::SUCCESS
        } else {
            ExitCode::FAILURE
        });
    }
    match (opts.alpha, opts.beta) {
        (None, None) => {
            let report = minimal_certificate(&landscape, step)?;
            println!("optimum at position {}", landscape.optimum_position()?);
            for cert in &report.pareto {
                let witness = cert
                    .witness_below
                    .map(|(x, y)| format!("; α − {step} fails with x={x} y={y}"))
                    .unwrap_or_default();
                println!("(α={:.2}, β={}){witness}", cert.alpha, cert.beta);
            }
            Ok(ExitCode::SUCCESS)
        }
        (alpha, beta) => {
            let (alpha, beta) = (alpha.unwrap_or(1.0), beta.unwrap_or(1));
            match check_approx_unimodal(&landscape, alpha, beta)? {
                Unimodality::Pass => {
                    println!("({alpha}, {beta}): pass");
                    Ok(ExitCode::SUCCESS)
                }
                Unimodality::Witness { x, y } => {
                    println!("({alpha}, {beta}): fail, witness x={x} y={y}");
                    Ok(ExitCode::FAILURE)
                }
            }
        }
    }
}

fn read_instances(paths: &[PathBuf]) -> Result<Vec<CnfFormula>> {
    paths
        .iter()
        .map(|p| {
            let text =
                std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            parse_dimacs(&text).with_context(|| format!("parsing {}", p.display()))
        })
        .collect()
}

fn evaluate(opts: EvaluateOptions) -> Result<ExitCode> {
    let seed = opts.seed.unwrap_or(0);
    let instances = match (&opts.instances, opts.generate) {
        (Some(paths), None) => read_instances(paths)?,
        (None, Some(count)) => {
            let (vars, clauses) = (opts.vars.unwrap_or(400), opts.clauses.unwrap_or(1704));
            (0..count)
                .map(|i| {
                    let mut rng = rng_from_seed(derive_seed(seed, u64::MAX - i as u64));
                    planted_3sat(vars, clauses, &mut rng).map(|(f, _)| f)
                })
                .collect::<paramtune::Result<Vec<_>>>()?
        }
        (Some(_), Some(_)) => bail!("give either --instances or --generate, not both"),
        (None, None) => bail!("missing --instances or --generate"),
    };
    let grid = saps_grid(opts.alphas.unwrap_or(30))?;
    let out = required(opts.out, "out")?;
    let landscape = evaluate_saps_landscape(
        &instances,
        &grid,
        opts.reps.unwrap_or(10),
        opts.kappa.unwrap_or(1000),
        seed,
        5,
    )?;
    landscape.write_csv(&out)?;
    eprintln!(
        "wrote {} cells over {} instances to {}",
        landscape.qualities().len(),
        instances.len(),
        out.display()
    );
    Ok(ExitCode::SUCCESS)
}
