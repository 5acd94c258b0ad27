//! Builds simulation-labelled records for a few optimized SR instances and
//! prints the start of the dataset file.
//!
//! ```text
//! cargo run --release --example label_dataset
//! ```

use aigsat::circuit::cnf_to_aig;
use aigsat::datagen::gen_sr;
use aigsat::sim::{build_dataset, write_dataset, MaskPolicy, RecordLine, SimConfig};
use aigsat::synth::{optimize, RewriteLibrary};

fn main() -> anyhow::Result<()> {
    let lib = RewriteLibrary::bundled();
    let circuits = (0..8)
        .map(|i| Ok(optimize(&cnf_to_aig(&gen_sr(3 + i as usize % 4, i)?.sat), lib).0))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let cfg = SimConfig {
        num_patterns: 15_000,
        seed: 2,
        ..Default::default()
    };
    let (records, stats) = build_dataset(&circuits, MaskPolicy::default(), &cfg);
    println!("{} records, {} dropped", stats.records, stats.dropped);
    let lines: Vec<RecordLine> = records
        .iter()
        .map(|r| RecordLine {
            circuit: format!("sr-{}.aag", r.circuit),
            mask: r.mask.values().to_vec(),
            theta: r.theta.clone(),
        })
        .collect();
    for line in write_dataset(&lines).lines().take(6) {
        println!("{line}");
    }
    Ok(())
}
