//! Writes SR(3-10) pairs and the four graph-problem families as DIMACS files
//! with a JSON-lines manifest; every tag is checked by DPLL.
//!
//! ```text
//! cargo run --release --example generate_benchmarks -- [out_dir] [count]
//! ```

use std::path::PathBuf;

use aigsat::datagen::{build_benchmark, write_benchmark, BenchmarkKind, GraphProblem};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "benchmarks".into()));
    let count: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(20);

    let mut kinds = vec![("sr", BenchmarkKind::Sr { min_n: 3, max_n: 10 })];
    for p in GraphProblem::ALL {
        kinds.push((p.name(), BenchmarkKind::Graph { problem: p }));
    }
    for (name, kind) in kinds {
        let items = build_benchmark(kind, count, 1);
        let sat = items.iter().filter(|(e, _)| e.sat).count();
        write_benchmark(&items, &out.join(name))?;
        println!("{name:16} {:4} files, {sat:4} SAT", items.len());
    }
    Ok(())
}
