use std::path::PathBuf;
use std::process::ExitCode;

use ballspace_cli::experiments::{self, Check, ExperimentSpec, Outcome};
use ballspace_cli::io::{load_pointset, load_vectors};
use ballspace_cli::{render, CliError, Format, Result, ResultRow};
use ballspace_core::alignment::{align_configurations, procrustes, ConfigurationMatrix};
use ballspace_core::kernels::{truncation_order_self, truncation_order_tail};
use ballspace_core::multiplier::{min_multiplier_norm, mult_bm_bracket, PickInstance};
use ballspace_core::rkhs::rk_bm_distance;
use ballspace_core::set_metrics::{hausdorff, invariant_distances, symmetric, BaseMetric};
use ballspace_core::{Certificate, OptimizerConfig};
use clap::{Parser, Subcommand, ValueEnum};

/// Distances between finite point sets in the complex unit ball.
#[derive(Debug, Parser)]
#[command(name = "ballspace", version)]
struct Cli {
    /// Run every experiment assertion; exit with status 4 if any fails.
    #[arg(long, global = true)]
    check: bool,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Optimizer tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Random restarts of the local searches.
    #[arg(long, global = true, default_value_t = 64)]
    restarts: usize,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Metric {
    Euclidean,
    Pseudohyperbolic,
}

impl From<Metric> for BaseMetric {
    fn from(m: Metric) -> Self {
        match m {
            Metric::Euclidean => BaseMetric::Euclidean,
            Metric::Pseudohyperbolic => BaseMetric::Pseudohyperbolic,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Hausdorff and symmetric distances, optionally minimized over automorphisms.
    Dist {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long, value_enum, default_value_t = Metric::Pseudohyperbolic)]
        metric: Metric,
        /// Also search over automorphisms (pseudohyperbolic metric).
        #[arg(long)]
        invariant: bool,
    },
    /// Banach-Mazur distance between the kernel spaces.
    Rkbm {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
    },
    /// Bracket for the Banach-Mazur distance between the multiplier algebras.
    Multbm {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
    },
    /// Least norm of a row multiplier interpolating targets at nodes.
    Pick {
        #[arg(long)]
        nodes: PathBuf,
        /// Target vectors in the point-set format (no ball constraint).
        #[arg(long)]
        targets: PathBuf,
    },
    /// Unitary Procrustes alignment of two configurations.
    Procrustes {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
    },
    /// Truncation orders of the kernel series.
    TruncationOrder {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        eps: f64,
        /// Radius for the tail order; omitted means only the self order.
        #[arg(long)]
        r: Option<f64>,
    },
    /// Run a registered experiment.
    Experiment {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(experiments::EXPERIMENTS))]
        name: String,
        /// Parameter as key=value; lists are comma separated.
        #[arg(long = "param", short = 'p', value_parser = parse_kv)]
        params: Vec<(String, String)>,
        /// Base point set for main_theorem.
        #[arg(long)]
        x: Option<PathBuf>,
    },
}

fn parse_kv(s: &str) -> std::result::Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got {s:?}"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

fn single(row: ResultRow) -> Outcome {
    Outcome {
        rows: vec![row],
        checks: Vec::new(),
    }
}

fn execute(command: Command, cfg: &OptimizerConfig, output: Option<&PathBuf>) -> Result<Outcome> {
    match command {
        Command::Dist {
            x,
            y,
            metric,
            invariant,
        } => {
            let (x, y) = (load_pointset(x)?, load_pointset(y)?);
            let m = BaseMetric::from(metric);
            let mut row = ResultRow::new("dist").param("metric", format!("{metric:?}").to_lowercase());
            row.metric("hausdorff", hausdorff(&x, &y, m)?, Certificate::Exact)?;
            if x.len() == y.len() {
                row.metric("symmetric", symmetric(&x, &y, m)?.0, Certificate::Exact)?;
            }
            if invariant {
                let inv = invariant_distances(&x, &y, cfg)?;
                row.metric("invariant_hausdorff", inv.hausdorff.value, inv.hausdorff.certificate)?;
                if let Some(s) = inv.symmetric {
                    row.metric("invariant_symmetric", s.value, s.certificate)?;
                }
            }
            Ok(single(row))
        }
        Command::Rkbm { x, y } => {
            let (x, y) = (load_pointset(x)?, load_pointset(y)?);
            let rk = rk_bm_distance(&x, &y, cfg)?;
            let sigma: Vec<String> = rk.witness.sigma().iter().map(usize::to_string).collect();
            let mut row = ResultRow::new("rkbm").param("sigma", sigma.join(" "));
            row.metric("delta", rk.delta, rk.certificate)?;
            row.metric("rho", rk.rho, rk.certificate)?;
            Ok(single(row))
        }
        Command::Multbm { x, y } => {
            let (x, y) = (load_pointset(x)?, load_pointset(y)?);
            let b = mult_bm_bracket(&x, &y, cfg)?;
            let mut row = ResultRow::new("multbm");
            row.metric("lower", b.lower, Certificate::LowerBound)?;
            row.metric("upper", b.upper, Certificate::UpperBound)?;
            row.metric("forward_norm", b.lower_witness.forward_norm, Certificate::Exact)?;
            row.metric("backward_norm", b.lower_witness.backward_norm, Certificate::Exact)?;
            Ok(single(row))
        }
        Command::Pick { nodes, targets } => {
            let inst = PickInstance::new(load_pointset(nodes)?, load_vectors(targets)?)?;
            let mut row = ResultRow::new("pick");
            row.metric("min_norm", min_multiplier_norm(&inst)?, Certificate::Exact)?;
            Ok(single(row))
        }
        Command::Procrustes { x, y } => {
            let (x, y) = (load_pointset(x)?, load_pointset(y)?);
            x.check_same_len(&y)?;
            let sol = procrustes(
                &ConfigurationMatrix::from_point_set(&x),
                &ConfigurationMatrix::from_point_set(&y),
            )?;
            let phi = align_configurations(&x, &y)?;
            let moved = phi.apply_set(&y)?;
            let aligned = (0..x.len())
                .map(|i| BaseMetric::Pseudohyperbolic.distance(x.point(i).coords(), moved.point(i).coords()))
                .fold(0.0, f64::max);
            let mut row = ResultRow::new("procrustes");
            row.metric("residual", sol.residual, Certificate::Exact)?;
            row.metric("singular_value_optimum", sol.singular_value_optimum, Certificate::Exact)?;
            row.metric("aligned_ph_displacement", aligned, Certificate::UpperBound)?;
            Ok(single(row))
        }
        Command::TruncationOrder { x, eps, r } => {
            let x = load_pointset(x)?;
            let mut row = ResultRow::new("truncation_order").param("eps", eps);
            row.metric("self_order", truncation_order_self(&x, eps)? as f64, Certificate::Exact)?;
            if let Some(r) = r {
                row = row.param("r", r);
                row.metric("tail_order", truncation_order_tail(&x, r, eps)? as f64, Certificate::Exact)?;
            }
            Ok(single(row))
        }
        Command::Experiment { name, params, x } => {
            let mut spec = ExperimentSpec::new(&name)?;
            for (k, v) in &params {
                spec = spec.with_param(k, v);
            }
            spec.output_path = output.map(|p| p.display().to_string());
            let base = x.map(load_pointset).transpose()?;
            experiments::run(&spec, cfg, base.as_ref())
        }
    }
}

fn report_checks(checks: &[Check]) {
    for c in checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        eprintln!("{tag} {}: {}", c.name, c.detail);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = OptimizerConfig {
        seed: cli.seed,
        random_restarts: cli.restarts,
        tolerance: cli.tol,
        ..Default::default()
    };
    let outcome = match cli.command {
        Some(c) => execute(c, &cfg, cli.output.as_ref()),
        None if cli.check => experiments::check_suite(&cfg),
        None => Err(CliError::Validation("no subcommand given; see --help".into())),
    };
    let result = outcome.and_then(|out| {
        let text = render(&out.rows, cli.format)?;
        match &cli.output {
            Some(p) => std::fs::write(p, text)?,
            None => print!("{text}"),
        }
        Ok(out)
    });
    match result {
        Ok(out) => {
            if cli.check {
                report_checks(&out.checks);
                if !out.all_passed() {
                    return ExitCode::from(4);
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
