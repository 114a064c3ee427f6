// SPDX-License-Identifier: Apache-2.0
//! Invariant suites behind `homtensor verify`.

use homtensor_core::cp::CpShape;
use homtensor_core::gl::{gl_exp, mode_apply, AlgebraElement, GroupElement, HorizontalBlocks, ModeBlocks};
use homtensor_core::homogeneous::{
    formula_slack, geodesic_flop_formula, published_step_costs, reductive_check, vertical_fraction,
    HomogeneousShape, Point, Tangent,
};
use homtensor_core::linalg::LowRankPair;
use homtensor_core::oracle::{dense_geodesic, mexp_dense, psi1_series, OracleConfig};
use homtensor_core::psi::{mexp_lowrank, psi1_pade};
use homtensor_core::rng::{gaussian, seeded, uniform, TestRng};
use homtensor_core::tt::TtShape;
use homtensor_core::tucker::TuckerShape;
use homtensor_core::{DenseTensor, FlopLedger, Matrix};
use num_rational::Ratio;
use rand::Rng;

use crate::error::ToolResult;
use crate::report::Check;

/// Trial counts used by a suite run.
#[derive(Clone, Copy, Debug)]
pub struct Trials {
    pub pade_per_k: usize,
    pub oracle: usize,
    pub completeness: usize,
    pub stabilizer: usize,
    pub reductive: usize,
    pub transport: usize,
    pub horizontal: usize,
    pub flop_shapes: usize,
}

impl Trials {
    /// Small counts for interactive runs.
    pub const QUICK: Trials = Trials {
        pade_per_k: 100,
        oracle: 3,
        completeness: 5,
        stabilizer: 20,
        reductive: 20,
        transport: 3,
        horizontal: 3,
        flop_shapes: 10,
    };
    /// Counts of the full acceptance run.
    pub const FULL: Trials = Trials {
        pade_per_k: 1000,
        oracle: 20,
        completeness: 50,
        stabilizer: 100,
        reductive: 100,
        transport: 20,
        horizontal: 20,
        flop_shapes: 50,
    };
}

fn with_norm(rng: &mut TestRng, k: usize, norm: f64) -> Matrix {
    let m = gaussian(rng, k, k);
    let f = m.frobenius_norm();
    m.scale(norm / f)
}

/// Largest `‖r₆₆(M) − ψ₁(M)‖_F` over random `M` with `‖M‖_F ≤ 1/2`, `k = 1…8`.
pub fn pade_accuracy(per_k: usize, seed: u64) -> ToolResult<Check> {
    let mut rng = seeded(seed);
    let cfg = OracleConfig::default();
    let mut worst: f64 = 0.0;
    for k in 1..=8 {
        for _ in 0..per_k {
            let norm = uniform(&mut rng, 0.0, 0.5);
            let m = with_norm(&mut rng, k, norm);
            let d = &psi1_pade(&m)? - &psi1_series(&m, &cfg)?.value;
            worst = worst.max(d.frobenius_norm());
        }
    }
    Ok(Check::at_most("psi", "pade_vs_series", worst, 1e-15))
}

/// Relative error of `I + Aψ₁(BA)B` against a dense exponential of `AB`.
pub fn lowrank_exp_accuracy(ns: &[usize], ks: &[usize], seed: u64) -> ToolResult<Check> {
    let mut rng = seeded(seed);
    let mut worst: f64 = 0.0;
    for &n in ns {
        for &k in ks {
            let a = gaussian(&mut rng, n, k).scale(1.0 / (n as f64).sqrt());
            let b = gaussian(&mut rng, k, n).scale(1.0 / (n as f64).sqrt());
            let low = mexp_lowrank(&LowRankPair::new(a.clone(), b.clone())?, &mut FlopLedger::new())?.densify();
            let dense = mexp_dense(&a.matmul(&b))?;
            worst = worst.max((&low - &dense).frobenius_norm() / dense.frobenius_norm());
        }
    }
    Ok(Check::at_most("psi", "lowrank_exp_vs_dense", worst, 1e-12))
}

/// One mode's low-rank step against the dense group exponential.
pub fn step_accuracy(trials: usize, seed: u64) -> ToolResult<Check> {
    let mut rng = seeded(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let (n, k) = (30, 3);
        let blocks = ModeBlocks::from_columns(&gaussian(&mut rng, n, k))?;
        let x = HorizontalBlocks::new(&blocks, gaussian(&mut rng, n, k).scale(0.3))?;
        let t = uniform(&mut rng, 0.2, 2.0);
        let step = homtensor_core::gl::lowrank_geodesic_step(&blocks, &x, t, &mut FlopLedger::new())?;
        let g = GroupElement::new(vec![blocks.densify()])?;
        let xd = AlgebraElement::new(vec![x.densify(&blocks)])?;
        let dense = gl_exp(&g, &xd, t)?.into_factors().remove(0);
        let want = dense.left_cols(k);
        let got = step.blocks.columns();
        worst = worst.max((&got - &want).frobenius_norm() / want.frobenius_norm());
    }
    Ok(Check::at_most("gl", "lowrank_step_vs_dense", worst, 1e-10))
}

/// Unit-length random horizontal tangent.
pub fn unit_tangent<S: HomogeneousShape>(p: &Point<S>, rng: &mut TestRng) -> ToolResult<Tangent> {
    let x = p.random_horizontal(rng)?;
    let n = p.tangent_norm(&x)?;
    Ok(x.scale(1.0 / n))
}

/// Embedding of the dense-oracle geodesic.
pub fn dense_embed<S: HomogeneousShape>(p: &Point<S>, x: &Tangent, t: f64) -> ToolResult<DenseTensor> {
    let g = p.group_element()?;
    let xd = p.densify_tangent(x)?;
    let path = GroupElement::new(dense_geodesic(g.factors(), xd.factors(), t)?)?;
    Ok(mode_apply(&path, &p.shape().reference_tensor())?)
}

fn rel(a: &DenseTensor, b: &DenseTensor) -> ToolResult<f64> {
    Ok(a.distance(b)? / b.frobenius_norm())
}

pub fn geodesic_oracle<S: HomogeneousShape>(shape: &S, trials: usize, seed: u64) -> ToolResult<Check> {
    let mut rng = seeded(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let p = Point::random(shape.clone(), &mut rng)?;
        let x = unit_tangent(&p, &mut rng)?;
        for t in [0.5, 1.0, 2.0] {
            let q = p.geodesic(&x, t, &mut FlopLedger::new())?;
            worst = worst.max(rel(&q.embed(), &dense_embed(&p, &x, t)?)?);
        }
    }
    Ok(Check::at_most(shape.tag(), "geodesic_vs_dense", worst, 1e-10))
}

/// Geodesics at `t = 100/‖x‖`; the metric counts failures.
pub fn completeness<S: HomogeneousShape>(shape: &S, trials: usize, seed: u64) -> ToolResult<Check> {
    let mut rng = seeded(seed);
    let mut failures = 0;
    for _ in 0..trials {
        let p = Point::random(shape.clone(), &mut rng)?;
        let x = p.random_horizontal(&mut rng)?;
        let t = 100.0 / p.tangent_norm(&x)?;
        match p.geodesic(&x, t, &mut FlopLedger::new()) {
            Ok(q) if q.leading_blocks_invertible() => {}
            _ => failures += 1,
        }
    }
    Ok(Check::at_most(shape.tag(), "completeness_failures", failures as f64, 0.0))
}

pub fn stabilizer_fixed_point<S: HomogeneousShape>(shape: &S, samples: usize, tol: f64, seed: u64) -> ToolResult<Check> {
    let mut rng = seeded(seed);
    let t = shape.reference_tensor();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let h = shape.sample_stabilizer(&mut rng, true);
        worst = worst.max(mode_apply(&h, &t)?.distance(&t)?);
    }
    Ok(Check::at_most(shape.tag(), "stabilizer_fixed_point", worst, tol))
}

/// Square shapes must keep `𝔪` invariant; others must yield a witness.
pub fn reductivity<S: HomogeneousShape>(shape: &S, trials: usize, seed: u64) -> ToolResult<Check> {
    let r = reductive_check(shape, trials, seed)?;
    let label = format!("reductive{:?}", shape.dims());
    Ok(if r.square {
        Check::at_most(shape.tag(), label, r.max_residual, 1e-12)
    } else {
        Check::at_least(shape.tag(), label, r.max_residual, 0.05)
    })
}

pub fn representative_independence<S: HomogeneousShape>(shape: &S, trials: usize, seed: u64) -> ToolResult<Check> {
    let mut rng = seeded(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let p = Point::random(shape.clone(), &mut rng)?;
        let x = unit_tangent(&p, &mut rng)?;
        let h = shape.sample_stabilizer(&mut rng, true);
        let (p2, x2) = p.translate(&h, &x)?;
        for t in [0.5, 1.0] {
            let a = p.geodesic(&x, t, &mut FlopLedger::new())?.embed();
            let b = p2.geodesic(&x2, t, &mut FlopLedger::new())?.embed();
            worst = worst.max(rel(&b, &a)?);
        }
    }
    Ok(Check::at_most(shape.tag(), "representative_independence", worst, 1e-8))
}

/// Vertical fraction of the finite-difference velocity of the dense path.
pub fn horizontality_preservation<S: HomogeneousShape>(shape: &S, trials: usize, seed: u64) -> ToolResult<Check> {
    let mut rng = seeded(seed);
    let h = OracleConfig::default().fd_step;
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let p = Point::random(shape.clone(), &mut rng)?;
        let x = unit_tangent(&p, &mut rng)?;
        let g = p.group_element()?;
        let xd = p.densify_tangent(&x)?;
        let path = |t: f64| -> ToolResult<GroupElement> {
            Ok(GroupElement::new(dense_geodesic(g.factors(), xd.factors(), t)?)?)
        };
        for t in [0.25, 0.5, 1.0] {
            let (a, b) = (path(t + h)?, path(t - h)?);
            let vel = AlgebraElement::new(
                a.factors().iter().zip(b.factors()).map(|(u, v)| (u - v).scale(0.5 / h)).collect(),
            )?;
            worst = worst.max(vertical_fraction(shape, &path(t)?, &vel)?);
        }
    }
    Ok(Check::at_most(shape.tag(), "horizontality_preservation", worst, 1e-5))
}

/// Per-mode ledger lines of one geodesic compared with the published item costs.
#[derive(Clone, Debug, PartialEq)]
pub struct LineComparison {
    pub mode: usize,
    pub step: &'static str,
    pub ledger: Ratio<i128>,
    pub published: Ratio<i128>,
}

impl LineComparison {
    pub fn matches(&self) -> bool {
        self.ledger == self.published
    }
}

/// Ledger-vs-formula audit of one instrumented geodesic.
#[derive(Clone, Debug)]
pub struct FlopAudit {
    pub zs: Vec<u32>,
    pub lines: Vec<LineComparison>,
    pub total: Ratio<i128>,
    pub formula: Ratio<i128>,
    /// Largest per-mode `|ledger − formula| / (100(nk + k²))`.
    pub worst_mode_gap: f64,
}

pub fn audit_geodesic<S: HomogeneousShape>(p: &Point<S>, x: &Tangent, t: f64, z: Option<&[u32]>) -> ToolResult<FlopAudit> {
    let (_, report) = p.geodesic_report(x, t, z)?;
    let mut lines = Vec::new();
    let mut worst: f64 = 0.0;
    for (i, m) in report.modes.iter().enumerate() {
        for (step, published) in published_step_costs(m.n, m.k, m.z) {
            let ledger = m.ledger.step(step).unwrap_or_default();
            lines.push(LineComparison { mode: i, step, ledger, published });
        }
        let f = geodesic_flop_formula(&[m.n], &[m.k], &[m.z]);
        let gap = m.ledger.total() - f;
        let slack = formula_slack(&[m.n], &[m.k]);
        worst = worst.max(ratio_f64(&gap).abs() / ratio_f64(&slack));
    }
    let shape = p.shape();
    Ok(FlopAudit {
        zs: report.zs(),
        formula: geodesic_flop_formula(shape.dims(), &shape.leading(), &report.zs()),
        total: report.ledger().total(),
        lines,
        worst_mode_gap: worst,
    })
}

pub fn ratio_f64(r: &Ratio<i128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn random_cp_shape(rng: &mut TestRng) -> CpShape {
    let r = rng_range(rng, 1, 6);
    CpShape::new((0..3).map(|_| rng_range(rng, r + 1, 60)).collect(), r).expect("valid CP shape")
}

pub fn random_tucker_shape(rng: &mut TestRng) -> TuckerShape {
    let (t2, t3) = (rng_range(rng, 1, 3), rng_range(rng, 1, 3));
    let t = [t2 * t3, t2, t3];
    TuckerShape::new(t.iter().map(|&ti| rng_range(rng, ti + 1, ti + 25)).collect(), t.to_vec()).expect("valid Tucker shape")
}

pub fn random_tt_shape(rng: &mut TestRng) -> TtShape {
    let s = [rng_range(rng, 1, 3), rng_range(rng, 1, 3)];
    let k = [s[0], s[0] * s[1], s[1]];
    TtShape::new(k.iter().map(|&ki| rng_range(rng, ki + 1, ki + 25)).collect(), s.to_vec()).expect("valid TT shape")
}

fn rng_range(rng: &mut TestRng, lo: usize, hi: usize) -> usize {
    rng.random_range(lo..=hi)
}

/// Audits geodesics on the given shapes with random velocities of varying length.
pub fn flop_audits<S: HomogeneousShape>(shapes: &[S], seed: u64) -> ToolResult<Vec<FlopAudit>> {
    let mut rng = seeded(seed);
    shapes
        .iter()
        .map(|s| {
            let p = Point::random(s.clone(), &mut rng)?;
            let x = unit_tangent(&p, &mut rng)?;
            let t = 2f64.powf(uniform(&mut rng, -2.0, 4.0));
            audit_geodesic(&p, &x, t, None)
        })
        .collect()
}

pub fn flop_total_check(tag: &str, audits: &[FlopAudit]) -> Check {
    let worst = audits.iter().map(|a| a.worst_mode_gap).fold(0.0, f64::max);
    Check::at_most(tag, "ledger_within_formula_slack", worst, 1.0)
}

pub fn flop_line_check(tag: &str, audits: &[FlopAudit]) -> Check {
    let mismatched = audits.iter().flat_map(|a| &a.lines).filter(|l| !l.matches()).count();
    Check::at_most(tag, "ledger_lines_mismatched", mismatched as f64, 0.0)
}

/// Test shapes of one manifold.
pub struct ShapeSet<S> {
    pub oracle: S,
    pub square: S,
    pub non_square: S,
}

pub fn cp_shapes() -> ShapeSet<CpShape> {
    ShapeSet {
        oracle: CpShape::new(vec![20, 20, 20], 3).expect("shape"),
        square: CpShape::new(vec![2, 2, 2], 2).expect("shape"),
        non_square: CpShape::new(vec![3, 3, 3], 2).expect("shape"),
    }
}

pub fn tucker_shapes() -> ShapeSet<TuckerShape> {
    ShapeSet {
        oracle: TuckerShape::new(vec![6, 4, 4], vec![4, 2, 2]).expect("shape"),
        square: TuckerShape::new(vec![4, 2, 2], vec![4, 2, 2]).expect("shape"),
        non_square: TuckerShape::new(vec![5, 2, 2], vec![4, 2, 2]).expect("shape"),
    }
}

pub fn tt_shapes() -> ShapeSet<TtShape> {
    ShapeSet {
        oracle: TtShape::new(vec![10, 20, 10], vec![2, 3]).expect("shape"),
        square: TtShape::new(vec![2, 4, 2], vec![2, 2]).expect("shape"),
        non_square: TtShape::new(vec![3, 4, 2], vec![2, 2]).expect("shape"),
    }
}

fn manifold_suite<S: HomogeneousShape>(
    set: &ShapeSet<S>,
    random_shape: fn(&mut TestRng) -> S,
    stab_tol: f64,
    trials: &Trials,
    seed: u64,
) -> ToolResult<Vec<Check>> {
    let tag = set.oracle.tag();
    let mut rng = seeded(seed ^ 0x5eed);
    let shapes: Vec<S> = (0..trials.flop_shapes).map(|_| random_shape(&mut rng)).collect();
    let audits = flop_audits(&shapes, seed)?;
    Ok(vec![
        geodesic_oracle(&set.oracle, trials.oracle, seed)?,
        completeness(&set.oracle, trials.completeness, seed)?,
        stabilizer_fixed_point(&set.oracle, trials.stabilizer, stab_tol, seed)?,
        reductivity(&set.square, trials.reductive, seed)?,
        reductivity(&set.non_square, trials.reductive, seed)?,
        representative_independence(&set.oracle, trials.transport, seed)?,
        horizontality_preservation(&set.oracle, trials.horizontal, seed)?,
        flop_total_check(tag, &audits),
    ])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Psi,
    Gl,
    Cp,
    Tucker,
    Tt,
    All,
}

/// Runs a suite; `tol` replaces every bound of the `max` kind when given.
pub fn run_suite(suite: Suite, trials: &Trials, seed: u64, tol: Option<f64>) -> ToolResult<Vec<Check>> {
    let mut checks = Vec::new();
    let wants = |s: Suite| suite == s || suite == Suite::All;
    if wants(Suite::Psi) {
        checks.push(pade_accuracy(trials.pade_per_k, seed)?);
        checks.push(lowrank_exp_accuracy(&[50, 100, 200], &[1, 3, 10], seed)?);
    }
    if wants(Suite::Gl) {
        checks.push(step_accuracy(trials.oracle, seed)?);
    }
    if wants(Suite::Cp) {
        checks.extend(manifold_suite(&cp_shapes(), random_cp_shape, 1e-13, trials, seed)?);
    }
    if wants(Suite::Tucker) {
        checks.extend(manifold_suite(&tucker_shapes(), random_tucker_shape, 1e-12, trials, seed)?);
    }
    if wants(Suite::Tt) {
        checks.extend(manifold_suite(&tt_shapes(), random_tt_shape, 1e-12, trials, seed)?);
    }
    if let Some(tol) = tol {
        for c in checks.iter_mut().filter(|c| c.sense == "max" && c.bound > 0.0) {
            c.bound = tol;
            c.passed = c.metric <= tol;
        }
    }
    Ok(checks)
}
