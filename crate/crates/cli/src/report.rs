//! JSON schemas written by the CLI. The solution file is fully deterministic
//! for a given input and seed; wall-clock timings live only in the run report.

use congestflow::solver::RoundStats;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceInfo {
    pub n: usize,
    pub m: usize,
    /// Source file path, or a generator description.
    pub source: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub eps: f64,
    pub approx: String,
    pub alpha: f64,
    pub t: usize,
    pub seed: u64,
    pub method: String,
}

/// The solution file: everything needed to re-validate the run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionFile {
    pub schema: u32,
    pub instance: InstanceInfo,
    pub config: ConfigEcho,
    /// Demands as sparse `[vertex (1-indexed), value]` pairs.
    pub demands: Vec<(usize, f64)>,
    /// Signed flow per edge, in input edge order.
    pub flow: Vec<f64>,
    /// Cut side, 1-indexed sorted vertex ids.
    pub cut: Vec<usize>,
    pub cut_demand: f64,
    pub cut_capacity: f64,
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
    /// For source/sink runs: the achieved flow value (the stored flow and
    /// demands are already scaled to be feasible).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub st: Option<StInfo>,
    pub rounds: Vec<RoundStats>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StInfo {
    pub source: usize,
    pub sink: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ApproxInfo {
    pub kind: String,
    pub rows: usize,
    pub alpha_claimed: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_measured: Option<f64>,
    pub build_ms: f64,
}

/// The run report: solution summary plus wall-clock timings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: u32,
    pub instance: InstanceInfo,
    pub config: ConfigEcho,
    pub approximator: ApproxInfo,
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
    pub iterations_per_round: Vec<usize>,
    pub scalings_per_round: Vec<usize>,
    pub solve_ms: f64,
    pub total_ms: f64,
}

/// One row of the bench table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchRow {
    pub eps: f64,
    pub approx: String,
    pub alpha: f64,
    pub iterations: usize,
    pub scalings: usize,
    pub rounds: usize,
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
    pub build_ms: f64,
    pub solve_ms: f64,
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out =
        String::from("eps,approx,alpha,iterations,scalings,rounds,primal,dual,gap,build_ms,solve_ms\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.eps,
            r.approx,
            r.alpha,
            r.iterations,
            r.scalings,
            r.rounds,
            r.primal,
            r.dual,
            r.gap,
            r.build_ms,
            r.solve_ms
        ));
    }
    out
}
