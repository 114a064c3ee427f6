// SPDX-License-Identifier: Apache-2.0
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use homtensor::bench::bench_sweep;
use homtensor::error::{ToolError, ToolResult};
use homtensor::format::{read_point, read_tangent, to_json_string};
use homtensor::report::{render_records, BenchRecord, OutputFormat, Report};
use homtensor::suites::{audit_geodesic, run_suite, unit_tangent, FlopAudit, Suite, Trials};
use homtensor_core::cp::CpShape;
use homtensor_core::homogeneous::{formula_slack, HomogeneousShape, Point};
use homtensor_core::rng::seeded;
use homtensor_core::tt::TtShape;
use homtensor_core::tucker::TuckerShape;
use num_rational::Ratio;

#[derive(Parser)]
#[command(name = "homtensor", version, about = "Geodesics on fixed-rank tensor manifolds")]
struct Cli {
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Replaces the upper bounds of the invariant checks, or the horizontality tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an invariant suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Use the full trial counts.
        #[arg(long)]
        full: bool,
    },
    /// Audit the flop ledger of one geodesic against the cost model.
    Flops {
        manifold: String,
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        ranks: Vec<usize>,
        /// Scaling exponent per mode; defaults to what the norms require.
        #[arg(long, value_delimiter = ',')]
        z: Option<Vec<u32>>,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
    },
    /// Time low-rank and dense geodesics over a sweep of extents.
    Bench {
        manifold: String,
        #[arg(long)]
        rank: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        /// Largest extent timed with the dense oracle.
        #[arg(long, default_value_t = 200)]
        dense_cap: usize,
    },
    /// Follow the geodesic from a point file along a tangent file.
    Geodesic {
        point: PathBuf,
        tangent: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
    },
}

fn emit(out: &Option<PathBuf>, text: &str) -> ToolResult<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn audit_shape<S: HomogeneousShape>(shape: S, z: Option<&[u32]>, t: f64, seed: u64) -> ToolResult<(S, FlopAudit)> {
    let mut rng = seeded(seed);
    let p = Point::random(shape.clone(), &mut rng)?;
    let x = unit_tangent(&p, &mut rng)?;
    Ok((shape, audit_geodesic(&p, &x, t, z)?))
}

fn flops(cli: &Cli, manifold: &str, dims: &[usize], ranks: &[usize], z: Option<&[u32]>, t: f64) -> ToolResult<bool> {
    let (dims_v, ranks_v) = (dims.to_vec(), ranks.to_vec());
    let (leading, audit) = match manifold {
        "cp" => {
            let r = match ranks {
                [r] => *r,
                _ => return Err(ToolError::Usage("cp takes a single rank".into())),
            };
            let (s, a) = audit_shape(CpShape::new(dims_v, r)?, z, t, cli.seed)?;
            (s.leading(), a)
        }
        "tucker" => {
            let (s, a) = audit_shape(TuckerShape::new(dims_v, ranks_v)?, z, t, cli.seed)?;
            (s.leading(), a)
        }
        "tt" => {
            let (s, a) = audit_shape(TtShape::new(dims_v, ranks_v)?, z, t, cli.seed)?;
            (s.leading(), a)
        }
        other => return Err(ToolError::Usage(format!("unknown manifold {other:?} (cp, tucker, tt)"))),
    };
    let slack = formula_slack(dims, &leading);
    let residual = audit.total - audit.formula;
    let within = audit.worst_mode_gap <= 1.0;
    let record = BenchRecord {
        manifold: manifold.into(),
        dims: dims.to_vec(),
        ranks: ranks.to_vec(),
        z: audit.zs.clone(),
        ledger_total: Some(audit.total),
        flops_model: audit.formula,
        time_median_s: 0.0,
        seed: cli.seed,
    };
    let text = match cli.format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Csv => {
            let mut s = String::from("mode,step,ledger,published,match\n");
            for l in &audit.lines {
                s += &format!("{},{},{},{},{}\n", l.mode + 1, l.step, l.ledger, l.published, l.matches());
            }
            s += &format!("all,total,{},{},{}\n", audit.total, audit.formula, within);
            s += &format!("all,residual,{},{},{}\n", residual, slack, within);
            s
        }
        OutputFormat::Json => {
            #[derive(serde::Serialize)]
            struct Line {
                mode: usize,
                step: &'static str,
                ledger: String,
                published: String,
                matches: bool,
            }
            #[derive(serde::Serialize)]
            struct Doc {
                record: BenchRecord,
                lines: Vec<Line>,
                residual: String,
                slack: String,
                within_slack: bool,
            }
            let lines = audit
                .lines
                .iter()
                .map(|l| Line {
                    mode: l.mode + 1,
                    step: l.step,
                    ledger: l.ledger.to_string(),
                    published: l.published.to_string(),
                    matches: l.matches(),
                })
                .collect();
            to_json_string(&Doc {
                record,
                lines,
                residual: residual.to_string(),
                slack: Ratio::to_string(&slack),
                within_slack: within,
            })
        }
    };
    emit(&cli.out, &text)?;
    Ok(within)
}

fn run(cli: &Cli) -> ToolResult<()> {
    match &cli.command {
        Command::Verify { suite, full } => {
            let trials = if *full { Trials::FULL } else { Trials::QUICK };
            let report = Report { seed: cli.seed, checks: run_suite(*suite, &trials, cli.seed, cli.tol)? };
            for c in &report.checks {
                eprintln!("{}", c.line());
            }
            emit(&cli.out, &report.render(cli.format.unwrap_or(OutputFormat::Json)))?;
            if !report.passed() {
                return Err(ToolError::Invariant(format!(
                    "{} of {} checks failed",
                    report.checks.iter().filter(|c| !c.passed).count(),
                    report.checks.len()
                )));
            }
        }
        Command::Flops { manifold, dims, ranks, z, t } => {
            if !flops(cli, manifold, dims, ranks, z.as_deref(), *t)? {
                return Err(ToolError::Invariant("ledger total outside the formula slack".into()));
            }
        }
        Command::Bench { manifold, rank, n, trials, dense_cap } => {
            let records = bench_sweep(manifold, *rank, n, *trials, *dense_cap, cli.seed)?;
            emit(&cli.out, &render_records(&records, cli.format.unwrap_or(OutputFormat::Csv)))?;
        }
        Command::Geodesic { point, tangent, t } => {
            let p = read_point(point)?;
            let x = read_tangent(tangent, &p)?;
            let tol = cli.tol.unwrap_or(1e-9);
            let residual = p.horizontal_residual(&x)?;
            if residual > tol * (1.0 + x.coefficient_norm()) {
                return Err(ToolError::Invariant(format!("tangent is not horizontal (residual {residual:e})")));
            }
            let q = p.geodesic(&x, *t)?;
            emit(&cli.out, &to_json_string(&q.to_doc()))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("homtensor: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
