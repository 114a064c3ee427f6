// SPDX-License-Identifier: Apache-2.0
//! Machine-readable output of the verification suites, audits and benchmarks.

use num_rational::Ratio;
use serde::Serialize;

/// Bit-exact CSV header of benchmark output.
pub const BENCH_CSV_HEADER: &str = "manifold,n,r,z,flops_model,time_median_s,seed";

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Outcome of one invariant check: `metric` compared against `bound`.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub metric: f64,
    pub bound: f64,
    /// `"max"` when `metric ≤ bound` is required, `"min"` for `metric ≥ bound`.
    pub sense: &'static str,
    pub passed: bool,
}

impl Check {
    pub fn at_most(suite: &str, name: impl Into<String>, metric: f64, bound: f64) -> Self {
        Self { suite: suite.into(), name: name.into(), metric, bound, sense: "max", passed: metric <= bound }
    }
    pub fn at_least(suite: &str, name: impl Into<String>, metric: f64, bound: f64) -> Self {
        Self { suite: suite.into(), name: name.into(), metric, bound, sense: "min", passed: metric >= bound }
    }
    pub fn line(&self) -> String {
        let op = if self.sense == "max" { "<=" } else { ">=" };
        format!(
            "{} {}/{}: {:.3e} {op} {:.1e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.suite,
            self.name,
            self.metric,
            self.bound
        )
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => crate::format::to_json_string(self),
            OutputFormat::Csv => {
                let mut s = String::from("suite,check,metric,bound,sense,passed\n");
                for c in &self.checks {
                    s += &format!("{},{},{:e},{:e},{},{}\n", c.suite, c.name, c.metric, c.bound, c.sense, c.passed);
                }
                s
            }
        }
    }
}

fn ratio_string(r: &Ratio<i128>) -> String {
    r.to_string()
}

fn join_or_single<T: ToString + PartialEq>(v: &[T]) -> String {
    match v {
        [first, rest @ ..] if rest.iter().all(|x| x == first) => first.to_string(),
        _ => v.iter().map(T::to_string).collect::<Vec<_>>().join("x"),
    }
}

/// One timed or audited geodesic evaluation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRecord {
    /// Manifold tag, suffixed with `/dense` for oracle timings.
    pub manifold: String,
    pub dims: Vec<usize>,
    pub ranks: Vec<usize>,
    pub z: Vec<u32>,
    #[serde(serialize_with = "ser_ratio_opt")]
    pub ledger_total: Option<Ratio<i128>>,
    #[serde(serialize_with = "ser_ratio")]
    pub flops_model: Ratio<i128>,
    pub time_median_s: f64,
    pub seed: u64,
}

fn ser_ratio<S: serde::Serializer>(r: &Ratio<i128>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&ratio_string(r))
}

fn ser_ratio_opt<S: serde::Serializer>(r: &Option<Ratio<i128>>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&ratio_string(r)),
        None => s.serialize_none(),
    }
}

impl BenchRecord {
    /// A row under [`BENCH_CSV_HEADER`]; modes with differing values are joined with `x`.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{:e},{}",
            self.manifold,
            join_or_single(&self.dims),
            join_or_single(&self.ranks),
            join_or_single(&self.z),
            ratio_string(&self.flops_model),
            self.time_median_s,
            self.seed
        )
    }
}

pub fn render_records(records: &[BenchRecord], format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => crate::format::to_json_string(&records),
        OutputFormat::Csv => {
            let mut s = format!("{BENCH_CSV_HEADER}\n");
            for r in records {
                s += &r.csv_row();
                s.push('\n');
            }
            s
        }
    }
}
