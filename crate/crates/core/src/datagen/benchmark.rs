use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dpll::dpll_solve;
use super::graph::{gen_graph, GraphProblem, EDGE_PROB};
use super::item_rng;
use super::sr::{gen_sr_with, SrParams};
use crate::circuit::CnfFormula;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BenchmarkKind {
    /// SR(n) pairs with `n` uniform in `min_n..=max_n`.
    Sr { min_n: usize, max_n: usize },
    /// Graph problems on 6-10 vertex random graphs, `k` uniform in the problem's range.
    Graph { problem: GraphProblem },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub kind: String,
    pub index: u64,
    pub num_variables: usize,
    pub num_clauses: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub sat: bool,
    pub seed: u64,
}

/// Generates `count` items (pairs for SR, single instances for graphs) with
/// oracle-verified tags. Item `i` uses stream `i` of `seed`, so the output is
/// independent of scheduling.
pub fn build_benchmark(kind: BenchmarkKind, count: usize, seed: u64) -> Vec<(ManifestEntry, CnfFormula)> {
    let items: Vec<Vec<(ManifestEntry, CnfFormula)>> = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = item_rng(seed, i);
            match kind {
                BenchmarkKind::Sr { min_n, max_n } => {
                    let n = rng.random_range(min_n..=max_n);
                    let pair = gen_sr_with(n, &SrParams::default(), &mut rng).expect("n >= 3");
                    [(pair.sat, true), (pair.unsat, false)]
                        .into_iter()
                        .map(|(f, sat)| {
                            assert_eq!(dpll_solve(&f).is_sat(), sat);
                            let tag = if sat { "sat" } else { "unsat" };
                            let entry = ManifestEntry {
                                file: format!("sr{n}_{i:06}_{tag}.cnf"),
                                kind: "sr".into(),
                                index: i,
                                num_variables: f.num_variables(),
                                num_clauses: f.num_clauses(),
                                n: Some(n),
                                k: None,
                                sat,
                                seed,
                            };
                            (entry, f)
                        })
                        .collect()
                }
                BenchmarkKind::Graph { problem } => {
                    let g = gen_graph(6..=10, EDGE_PROB, &mut rng);
                    let k = rng.random_range(problem.k_range());
                    let f = problem.encode(&g, k);
                    let sat = dpll_solve(&f).is_sat();
                    let entry = ManifestEntry {
                        file: format!("{}_{i:06}.cnf", problem.name()),
                        kind: problem.name().into(),
                        index: i,
                        num_variables: f.num_variables(),
                        num_clauses: f.num_clauses(),
                        n: Some(g.num_vertices),
                        k: Some(k),
                        sat,
                        seed,
                    };
                    vec![(entry, f)]
                }
            }
        })
        .collect();
    items.into_iter().flatten().collect()
}

/// Writes DIMACS files and `manifest.jsonl` into `out_dir`.
pub fn write_benchmark(items: &[(ManifestEntry, CnfFormula)], out_dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(out_dir)?;
    let mut manifest = String::new();
    for (entry, f) in items {
        std::fs::write(out_dir.join(&entry.file), f.to_dimacs())?;
        writeln!(manifest, "{}", serde_json::to_string(entry).expect("serializable")).unwrap();
    }
    std::fs::write(out_dir.join("manifest.jsonl"), manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sr_benchmark_is_tagged_and_deterministic() {
        let kind = BenchmarkKind::Sr { min_n: 3, max_n: 10 };
        let items = build_benchmark(kind, 30, 9);
        assert_eq!(items.len(), 60);
        assert_eq!(items.iter().filter(|(e, _)| e.sat).count(), 30);
        for (e, f) in &items {
            assert_eq!(dpll_solve(f).is_sat(), e.sat);
        }
        let dir = tempfile::tempdir().unwrap();
        write_benchmark(&items, dir.path()).unwrap();
        let first = std::fs::read(dir.path().join("manifest.jsonl")).unwrap();
        write_benchmark(&build_benchmark(kind, 30, 9), dir.path()).unwrap();
        assert_eq!(first, std::fs::read(dir.path().join("manifest.jsonl")).unwrap());
    }

    #[test]
    fn empty_benchmark() {
        let items = build_benchmark(BenchmarkKind::Sr { min_n: 3, max_n: 10 }, 0, 1);
        assert!(items.is_empty());
        let dir = tempfile::tempdir().unwrap();
        write_benchmark(&items, dir.path()).unwrap();
        assert_eq!(std::fs::read_to_string(dir.path().join("manifest.jsonl")).unwrap(), "");
    }

    #[test]
    fn graph_benchmark() {
        let items = build_benchmark(BenchmarkKind::Graph { problem: GraphProblem::Clique }, 10, 2);
        assert_eq!(items.len(), 10);
        assert!(items.iter().all(|(e, _)| (3..=5).contains(&e.k.unwrap())));
    }
}
