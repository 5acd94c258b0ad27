//! End to end at desk scale: SR(3-10) instances are converted, optimized and
//! labelled by conditional simulation, the model is trained on the records,
//! and the trained predictor solves held-out SR(10) instances.
//!
//! ```text
//! cargo run --release --example desk_training -- [circuits] [epochs] [learning_rate]
//! ```

use std::time::Instant;

use aigsat::circuit::{cnf_to_aig, AigCircuit};
use aigsat::datagen::{build_benchmark, BenchmarkKind};
use aigsat::model::{train, Example, TrainConfig};
use aigsat::sim::{build_dataset, MaskPolicy, SimConfig};
use aigsat::solver::{evaluate_suite, scheme_accuracy, ModelPredictor, RandomPredictor, Scheme};
use aigsat::synth::{optimize, RewriteLibrary};
use rayon::prelude::*;

fn optimized_sat(min_n: usize, max_n: usize, count: usize, seed: u64) -> anyhow::Result<Vec<AigCircuit>> {
    let lib = RewriteLibrary::bundled();
    let items = build_benchmark(BenchmarkKind::Sr { min_n, max_n }, count, seed);
    Ok(items
        .par_iter()
        .filter(|(e, _)| e.sat)
        .map(|(_, f)| optimize(&cnf_to_aig(f), lib).0)
        .collect())
}

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let circuits: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1000);
    let epochs: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(5);
    let lr: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1e-3);

    let t = Instant::now();
    let train_circuits = optimized_sat(3, 10, circuits, 1)?;
    let sim = SimConfig {
        num_patterns: 15_000,
        seed: 7,
        ..Default::default()
    };
    let (records, stats) = build_dataset(&train_circuits, MaskPolicy::default(), &sim);
    println!(
        "{} circuits, {} records ({} dropped) in {:.1}s",
        train_circuits.len(),
        stats.records,
        stats.dropped,
        t.elapsed().as_secs_f64()
    );

    // Hold out the records of the last tenth of the circuits.
    let cut = train_circuits.len() * 9 / 10;
    let examples: Vec<Example> = records
        .iter()
        .map(|r| Example {
            circuit: &train_circuits[r.circuit],
            mask: &r.mask,
            labels: &r.theta,
        })
        .collect();
    let mut train_set = Vec::new();
    let mut val_set = Vec::new();
    for (e, r) in examples.iter().zip(&records) {
        if r.circuit < cut {
            train_set.push(*e);
        } else {
            val_set.push(*e);
        }
    }

    let cfg = TrainConfig {
        learning_rate: lr,
        epochs,
        seed: 3,
        ..Default::default()
    };
    let (params, _) = train(&train_set, &val_set, &cfg, None, |row, _| {
        println!(
            "epoch {:2}  train PE {:.4}  val PE {:.4}  {:.0}s",
            row.epoch, row.train_pe, row.val_pe, row.wall_secs
        )
    })?;

    let held_out: Vec<(String, AigCircuit)> = optimized_sat(10, 10, 100, 2)?
        .into_iter()
        .enumerate()
        .map(|(i, c)| (format!("sr10-{i}"), c))
        .collect();
    let model = ModelPredictor { params, seed: 11 };
    let random = RandomPredictor { seed: 11 };
    let (_, m) = evaluate_suite(&held_out, &model)?;
    let (_, r) = evaluate_suite(&held_out, &random)?;
    println!(
        "model: {}/{} solved, mean samples {:.2}, histogram {:?}",
        m.solved, m.instances, m.mean_rounds, m.rounds_histogram
    );
    println!("random: {}/{} solved, mean samples {:.2}", r.solved, r.instances, r.mean_rounds);
    let circuits: Vec<AigCircuit> = held_out.into_iter().map(|(_, c)| c).collect();
    for s in Scheme::ALL {
        println!("{:15} {:.2}", s.name(), scheme_accuracy(&circuits, &model, s)?);
    }
    Ok(())
}
