// SPDX-License-Identifier: Apache-2.0
//! Wall-clock timings of low-rank and dense geodesics.

use std::time::Instant;

use homtensor_core::cp::CpShape;
use homtensor_core::gl::{lowrank_geodesic_step, HorizontalBlocks, ModeBlocks};
use homtensor_core::homogeneous::{geodesic_flop_formula, HomogeneousShape, Point};
use homtensor_core::oracle::dense_geodesic;
use homtensor_core::rng::{gaussian, seeded};
use homtensor_core::tt::TtShape;
use homtensor_core::tucker::TuckerShape;
use homtensor_core::{FlopLedger, Matrix};

use crate::error::{ToolError, ToolResult};
use crate::report::BenchRecord;
use crate::suites::unit_tangent;

/// Median wall time of `trials` runs after one warm-up run.
pub fn median_time<T>(trials: usize, mut f: impl FnMut() -> T) -> f64 {
    std::hint::black_box(f());
    let mut times: Vec<f64> = (0..trials.max(1))
        .map(|_| {
            let start = Instant::now();
            std::hint::black_box(f());
            start.elapsed().as_secs_f64()
        })
        .collect();
    times.sort_by(f64::total_cmp);
    let m = times.len() / 2;
    if times.len() % 2 == 1 { times[m] } else { 0.5 * (times[m - 1] + times[m]) }
}

/// Median time of one single-mode low-rank step with an `n × k` frame.
pub fn time_lowrank_step(n: usize, k: usize, trials: usize, seed: u64) -> ToolResult<f64> {
    let mut rng = seeded(seed);
    let blocks = ModeBlocks::from_columns(&gaussian(&mut rng, n, k))?;
    let x = HorizontalBlocks::new(&blocks, gaussian(&mut rng, n, k).scale(1.0 / (n as f64).sqrt()))?;
    lowrank_geodesic_step(&blocks, &x, 1.0, &mut FlopLedger::new())?;
    Ok(median_time(trials, || lowrank_geodesic_step(&blocks, &x, 1.0, &mut FlopLedger::new())))
}

/// Median time of the dense geodesic of one `n × n` factor.
pub fn time_dense_geodesic(n: usize, trials: usize, seed: u64) -> ToolResult<f64> {
    let mut rng = seeded(seed);
    let mut g = gaussian(&mut rng, n, n).scale(0.3 / (n as f64).sqrt());
    g.add_diagonal(1.0);
    let x = gaussian(&mut rng, n, n).scale(1.0 / n as f64);
    let (g, x): (Vec<Matrix>, Vec<Matrix>) = (vec![g], vec![x]);
    dense_geodesic(&g, &x, 1.0)?;
    Ok(median_time(trials, || dense_geodesic(&g, &x, 1.0)))
}

/// Benchmark shape with all extents near `n` and rank parameter `r`.
pub fn bench_shape_dims(manifold: &str, n: usize, r: usize) -> ToolResult<(Vec<usize>, Vec<usize>)> {
    Ok(match manifold {
        "cp" => (vec![n; 3], vec![r]),
        "tucker" => (vec![n.max(r * r), n, n], vec![r * r, r, r]),
        "tt" => (vec![n, n.max(r * r), n], vec![r, r]),
        other => return Err(ToolError::Usage(format!("unknown manifold {other:?} (cp, tucker, tt)"))),
    })
}

fn run_lowrank<S: HomogeneousShape>(
    shape: S,
    tag: &str,
    ranks: Vec<usize>,
    trials: usize,
    seed: u64,
) -> ToolResult<BenchRecord> {
    let mut rng = seeded(seed);
    let p = Point::random(shape.clone(), &mut rng)?;
    let x = unit_tangent(&p, &mut rng)?;
    let (_, report) = p.geodesic_report(&x, 1.0, None)?;
    let zs = report.zs();
    let time = median_time(trials, || p.geodesic(&x, 1.0, &mut FlopLedger::new()));
    Ok(BenchRecord {
        manifold: tag.into(),
        dims: shape.dims().to_vec(),
        ranks,
        flops_model: geodesic_flop_formula(shape.dims(), &shape.leading(), &zs),
        z: zs,
        ledger_total: Some(report.ledger().total()),
        time_median_s: time,
        seed,
    })
}

fn run_dense<S: HomogeneousShape>(
    shape: S,
    tag: &str,
    ranks: Vec<usize>,
    trials: usize,
    seed: u64,
) -> ToolResult<BenchRecord> {
    let mut rng = seeded(seed);
    let p = Point::random(shape.clone(), &mut rng)?;
    let x = unit_tangent(&p, &mut rng)?;
    let g = p.group_element()?;
    let xd = p.densify_tangent(&x)?;
    let (_, report) = p.geodesic_report(&x, 1.0, None)?;
    let time = median_time(trials, || dense_geodesic(g.factors(), xd.factors(), 1.0));
    let zs = report.zs();
    Ok(BenchRecord {
        manifold: format!("{tag}/dense"),
        dims: shape.dims().to_vec(),
        ranks,
        flops_model: geodesic_flop_formula(shape.dims(), &shape.leading(), &zs),
        z: zs,
        ledger_total: None,
        time_median_s: time,
        seed,
    })
}

/// Times full geodesics for each `n`; dense-oracle rows are added for `n ≤ dense_cap`.
pub fn bench_sweep(manifold: &str, r: usize, ns: &[usize], trials: usize, dense_cap: usize, seed: u64) -> ToolResult<Vec<BenchRecord>> {
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ToolError::Usage("sweep values must be ascending".into()));
    }
    let mut out = Vec::new();
    for dense in [false, true] {
        for &n in ns {
            if dense && n > dense_cap {
                continue;
            }
            let (dims, ranks) = bench_shape_dims(manifold, n, r)?;
            macro_rules! time {
                ($shape:expr) => {
                    if dense {
                        run_dense($shape, manifold, ranks, trials, seed)?
                    } else {
                        run_lowrank($shape, manifold, ranks, trials, seed)?
                    }
                };
            }
            let rec = match manifold {
                "cp" => time!(CpShape::new(dims, r)?),
                "tucker" => time!(TuckerShape::new(dims, ranks.clone())?),
                _ => time!(TtShape::new(dims, ranks.clone())?),
            };
            out.push(rec);
        }
    }
    Ok(out)
}
