//! Regenerates the bundled NPN rewrite library.
//!
//! ```text
//! cargo run --release --example rewrite_library -- [max_gates] [out.json]
//! ```

use std::time::Instant;

use aigsat::synth::build_rewrite_library;

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let max: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(7);
    let out = args.next().unwrap_or_else(|| "crates/core/data/rewrite_library.json".into());
    let start = Instant::now();
    let lib = build_rewrite_library(max);
    eprintln!(
        "{} classes with at most {} gates in {:.1?}",
        lib.len(),
        max,
        start.elapsed()
    );
    std::fs::write(&out, lib.to_json())?;
    eprintln!("wrote {out}");
    Ok(())
}
