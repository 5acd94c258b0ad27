//! Converts SR(10) instances to AIGs and runs the rewrite/balance script,
//! printing mean node count, depth and balance ratio before and after.
//!
//! ```text
//! cargo run --release --example optimize_sr -- [count] [n]
//! ```

use aigsat::circuit::cnf_to_aig;
use aigsat::datagen::gen_sr;
use aigsat::synth::{optimize, RewriteLibrary};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let count: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(50);
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(10);
    let lib = RewriteLibrary::bundled();

    let mut rows = Vec::new();
    for seed in 0..count {
        let pair = gen_sr(n, seed)?;
        let raw = cnf_to_aig(&pair.sat);
        let (_, report) = optimize(&raw, lib);
        rows.push(report);
    }
    let mean = |f: &dyn Fn(&aigsat::synth::OptimizeReport) -> f64| rows.iter().map(f).sum::<f64>() / rows.len() as f64;
    let br_down = rows
        .iter()
        .filter(|r| r.after.br.unwrap_or(1.0) < r.before.br.unwrap_or(1.0))
        .count();
    println!("instances      {}", rows.len());
    println!("nodes  before {:8.2}  after {:8.2}", mean(&|r| r.before.nodes as f64), mean(&|r| r.after.nodes as f64));
    println!("ands   before {:8.2}  after {:8.2}", mean(&|r| r.before.ands as f64), mean(&|r| r.after.ands as f64));
    println!("depth  before {:8.2}  after {:8.2}", mean(&|r| r.before.depth as f64), mean(&|r| r.after.depth as f64));
    println!(
        "br     before {:8.2}  after {:8.2}",
        mean(&|r| r.before.br.unwrap_or(1.0)),
        mean(&|r| r.after.br.unwrap_or(1.0))
    );
    println!("br decreased on {br_down} of {}", rows.len());
    Ok(())
}
