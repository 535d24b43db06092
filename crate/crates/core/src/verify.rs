//! Randomized property suite: Lipschitz and energy inequalities of the test
//! functions, the elementary inequalities behind them, form/operator
//! consistency, and eigensolver agreement with a dense solver.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::exec::Exec;
use crate::graph::WeightedGraph;
use crate::metrics::{huang_lengths, metric_from, Convention, EdgeLengths};
use crate::random::{random_connected, rng_from_seed, MeasureMode, RandomGraphSpec};
use crate::spectral::{
    dirichlet_lowest, energy, energy_bound_check, lemma_elementary_first, lemma_elementary_second,
    lipschitz_check, test_pair_scaled, DirichletOperator, PairScope, SolverOptions,
    ENERGY_TOLERANCE, LIPSCHITZ_TOLERANCE,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub graphs: usize,
    pub max_vertices: usize,
    /// Test-function instances drawn per graph.
    pub instances_per_graph: usize,
    pub alpha_max: f64,
    pub r_max: usize,
    /// Vertex bound for the dense eigensolver comparison graphs.
    pub oracle_vertices: usize,
    pub seed: u64,
    pub exec: Exec,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            graphs: 50,
            max_vertices: 50,
            instances_per_graph: 4,
            alpha_max: 3.0,
            r_max: 5,
            oracle_vertices: 200,
            seed: 1,
            exec: Exec::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    /// Smallest slack seen (or largest deviation for oracle rows, negated).
    pub worst: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub rows: Vec<CheckRow>,
    pub all_passed: bool,
}

impl SuiteReport {
    /// Fixed-width pass/fail table.
    pub fn table(&self) -> String {
        let mut out = format!("{:<28} {:>7} {:>8} {:>14}  result\n", "check", "cases", "failed", "worst");
        for r in &self.rows {
            out.push_str(&format!(
                "{:<28} {:>7} {:>8} {:>14.6e}  {}\n",
                r.name,
                r.cases,
                r.failures,
                r.worst,
                if r.passed { "PASS" } else { "FAIL" }
            ));
        }
        out
    }
}

struct Tally {
    name: &'static str,
    cases: usize,
    failures: usize,
    worst: f64,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally { name, cases: 0, failures: 0, worst: f64::INFINITY }
    }

    fn record(&mut self, ok: bool, slack: f64) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
        }
        self.worst = self.worst.min(slack);
    }

    fn row(self) -> CheckRow {
        CheckRow {
            name: self.name.to_string(),
            cases: self.cases,
            failures: self.failures,
            worst: self.worst,
            passed: self.failures == 0,
        }
    }
}

/// Smallest eigenvalue of the Dirichlet restriction, assembled densely from
/// the edge list and solved with a full symmetric eigendecomposition.
pub fn dense_dirichlet_lowest(g: &WeightedGraph, domain: &[usize]) -> f64 {
    let k = domain.len();
    let mut pos = vec![usize::MAX; g.n()];
    for (i, &x) in domain.iter().enumerate() {
        pos[x] = i;
    }
    let m = g.measure();
    let mut a = DMatrix::<f64>::zeros(k, k);
    for e in g.edges() {
        let (i, j) = (pos[e.u], pos[e.v]);
        if i != usize::MAX {
            a[(i, i)] += e.w / m[e.u];
        }
        if j != usize::MAX {
            a[(j, j)] += e.w / m[e.v];
        }
        if i != usize::MAX && j != usize::MAX {
            let s = e.w / (m[e.u] * m[e.v]).sqrt();
            a[(i, j)] -= s;
            a[(j, i)] -= s;
        }
    }
    SymmetricEigen::new(a).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

pub const ORACLE_TOLERANCE: f64 = 1e-8;

/// Runs every check; failures are reported, never raised.
pub fn run_suite(cfg: &SuiteConfig) -> SuiteReport {
    let mut rng = rng_from_seed(cfg.seed);
    let mut lip = Tally::new("lipschitz (all pairs)");
    let mut lip_refined = Tally::new("lipschitz refined (rho<=1)");
    let mut en_half = Tally::new("energy half convention");
    let mut en_full = Tally::new("energy full (huang)");
    let mut form = Tally::new("form = <u, Lu>_m");
    let mut oracle = Tally::new("eigensolver vs dense");

    for _ in 0..cfg.graphs {
        let n = rng.gen_range(2..=cfg.max_vertices.max(2));
        let spec = RandomGraphSpec {
            n,
            extra_edge_prob: rng.gen_range(0.0..0.3),
            weight_range: (0.2, 2.0),
            measure: MeasureMode::WeightedDegree,
        };
        let Ok(g) = random_connected(&spec, &mut rng) else { continue };
        let natural = EdgeLengths::natural(&g);
        let huang = huang_lengths(&g).expect("connected graphs have no isolated vertex");

        for _ in 0..cfg.instances_per_graph {
            let alpha = rng.gen_range(0.0..cfg.alpha_max).max(1e-6);
            let r = rng.gen_range(1..=cfg.r_max) as f64;
            let root = rng.gen_range(0..g.n());

            let metric = metric_from(&g, &natural, root).expect("valid root");
            let pair = test_pair_scaled(&metric, r, alpha).expect("valid parameters");
            match lipschitz_check(&g, &natural, &pair, PairScope::AllPairs, cfg.exec) {
                Ok(rep) => {
                    lip.record(rep.ok, rep.worst_slack);
                    lip_refined.record(rep.refined_ok, rep.refined_worst_slack);
                }
                Err(_) => lip.record(false, f64::NEG_INFINITY),
            }
            match energy_bound_check(&g, &natural, &pair, Convention::Half) {
                Ok(rep) => en_half.record(rep.slack >= ENERGY_TOLERANCE, rep.slack),
                Err(_) => en_half.record(false, f64::NEG_INFINITY),
            }

            let hm = metric_from(&g, &huang, root).expect("valid root");
            let hr = (hm.eccentricity() * r / (2.0 * cfg.r_max as f64)).max(1e-3);
            let hpair = test_pair_scaled(&hm, hr, alpha).expect("valid parameters");
            match energy_bound_check(&g, &huang, &hpair, Convention::Full) {
                Ok(rep) => en_full.record(rep.slack >= ENERGY_TOLERANCE, rep.slack),
                Err(_) => en_full.record(false, f64::NEG_INFINITY),
            }
        }

        let mut domain: Vec<usize> = (0..g.n()).collect();
        domain.shuffle(&mut rng);
        domain.truncate(rng.gen_range(1..=g.n()));
        domain.sort_unstable();
        let op = DirichletOperator::new(&g, &domain, None).expect("valid domain");
        let u: Vec<f64> = domain.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
        let q = op.quadratic_form(&u, cfg.exec);
        let e = energy(&g, &op.to_host(&u)).expect("finite input");
        let dev = (q - e).abs() / e.abs().max(1e-300);
        form.record(dev <= 1e-10, -dev);
    }

    for _ in 0..cfg.graphs {
        let n = rng.gen_range(2..=cfg.oracle_vertices.max(2));
        let spec = RandomGraphSpec {
            n,
            extra_edge_prob: rng.gen_range(0.0..(8.0 / n as f64).min(1.0)),
            weight_range: (0.1, 3.0),
            measure: MeasureMode::Uniform { lo: 0.5, hi: 2.0 },
        };
        let Ok(g) = random_connected(&spec, &mut rng) else { continue };
        let mut domain: Vec<usize> = (0..g.n()).collect();
        domain.shuffle(&mut rng);
        domain.truncate(rng.gen_range(1..=g.n()));
        domain.sort_unstable();
        let opts = SolverOptions { exec: cfg.exec, seed: cfg.seed, ..SolverOptions::default() };
        match dirichlet_lowest(&g, &domain, None, &opts) {
            Ok(res) => {
                let dev = (res.lambda - dense_dirichlet_lowest(&g, &domain)).abs();
                oracle.record(dev <= ORACLE_TOLERANCE, -dev);
            }
            Err(_) => oracle.record(false, f64::NEG_INFINITY),
        }
    }

    let mut first = Tally::new("elementary (a) R in [0,10]");
    let mut second = Tally::new("elementary (b) R in [0,1]");
    for i in 1..=50 {
        let alpha = i as f64 * 0.1;
        for j in 0..=100 {
            let big_r = j as f64 * 0.1;
            let (l, r) = lemma_elementary_first(alpha, big_r);
            first.record(l <= r * (1.0 + 1e-14), r - l);
        }
        for j in 0..=100 {
            let big_r = j as f64 * 0.01;
            let (l, r) = lemma_elementary_second(alpha, big_r);
            second.record(l <= r * (1.0 + 1e-14), r - l);
        }
    }

    let mut rows: Vec<CheckRow> = [lip, lip_refined, en_half, en_full, form, oracle, first, second]
        .into_iter()
        .map(Tally::row)
        .collect();
    for row in &mut rows {
        if row.name.starts_with("lipschitz") {
            row.passed = row.failures == 0 && row.worst >= LIPSCHITZ_TOLERANCE;
        }
    }
    let all_passed = rows.iter().all(|r| r.passed);
    SuiteReport { seed: cfg.seed, rows, all_passed }
}
