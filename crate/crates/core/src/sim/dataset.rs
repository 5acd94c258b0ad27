use std::fmt::Write as _;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::estimate::{block_inputs, conditional_counts, conditional_estimate, SimConfig, SimError, SimKey};
use super::simulate_block;
use crate::circuit::{AigCircuit, Mask};

/// Stream reserved for mask selection, disjoint from the pattern blocks.
const MASK_STREAM: u64 = u64::MAX;

/// How many conditioned records to derive from each circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskPolicy {
    /// Records with extra masked PIs, on top of the PO-only record.
    pub extra_records: usize,
}

impl Default for MaskPolicy {
    fn default() -> Self {
        Self { extra_records: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    /// Index into the circuit list the dataset was built from.
    pub circuit: usize,
    pub mask: Mask,
    pub theta: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub records: usize,
    pub dropped: usize,
}

/// Labels every circuit with a PO-only record plus `policy.extra_records`
/// records that also mask `k ~ U{1..I-1}` PIs. The masked values are copied
/// from a random accepted pattern, so the condition is satisfiable. Records
/// with fewer than `cfg.min_accepted` accepted patterns are dropped.
pub fn build_dataset(circuits: &[AigCircuit], policy: MaskPolicy, cfg: &SimConfig) -> (Vec<DatasetRecord>, DatasetStats) {
    let per_circuit: Vec<(Vec<DatasetRecord>, usize)> = circuits
        .par_iter()
        .enumerate()
        .map(|(id, c)| circuit_records(id, c, policy, cfg))
        .collect();
    let mut records = Vec::new();
    let mut stats = DatasetStats::default();
    for (r, d) in per_circuit {
        stats.dropped += d;
        records.extend(r);
    }
    stats.records = records.len();
    (records, stats)
}

fn circuit_records(id: usize, c: &AigCircuit, policy: MaskPolicy, cfg: &SimConfig) -> (Vec<DatasetRecord>, usize) {
    let po_mask = Mask::po_only(c);
    let base = match conditional_estimate(c, &po_mask, cfg, SimKey::new(id as u64, 0)) {
        Ok(p) => p,
        Err(_) => return (Vec::new(), 1),
    };
    let mut out = vec![DatasetRecord {
        circuit: id,
        mask: po_mask.clone(),
        theta: base.theta,
    }];
    let mut dropped = 0;
    let n = c.num_pis();
    if n < 2 {
        return (out, dropped);
    }
    let counts = conditional_counts(c, &po_mask, cfg, SimKey::new(id as u64, 0));
    for r in 1..=policy.extra_records as u64 {
        let key = SimKey::new(id as u64, r);
        let mut rng = key.rng(cfg.seed, MASK_STREAM);
        let pick = rng.random_range(0..counts.accepted);
        let pattern = accepted_pattern(c, &po_mask, cfg, SimKey::new(id as u64, 0), &counts.per_block, pick);
        let k = rng.random_range(1..n);
        let mut mask = po_mask.clone();
        for pi in sample(&mut rng, n, k) {
            mask.set_bool(pi, pattern[pi]);
        }
        match conditional_estimate(c, &mask, cfg, key) {
            Ok(p) => out.push(DatasetRecord {
                circuit: id,
                mask,
                theta: p.theta,
            }),
            Err(_) => dropped += 1,
        }
    }
    (out, dropped)
}

/// PI values of the `pick`-th accepted pattern of a run.
fn accepted_pattern(c: &AigCircuit, mask: &Mask, cfg: &SimConfig, key: SimKey, per_block: &[u64], mut pick: u64) -> Vec<bool> {
    let block = per_block
        .iter()
        .position(|&a| {
            if pick < a {
                true
            } else {
                pick -= a;
                false
            }
        })
        .expect("pick is below the accepted count");
    let (words, valid) = block_inputs(c, mask, cfg, key, block);
    let vals = simulate_block(c, &words);
    let mut accept = valid & vals[c.po()];
    for _ in 0..pick {
        accept &= accept - 1;
    }
    let lane = accept.trailing_zeros();
    words.iter().map(|w| (w >> lane) & 1 == 1).collect()
}

/// One line of a dataset file: a circuit reference, the mask and the labels.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordLine {
    pub circuit: String,
    pub mask: Vec<i8>,
    pub theta: Vec<f64>,
}

/// Tab-separated: `circuit<TAB>m0,m1,...<TAB>t0,t1,...` with 6 decimals.
pub fn write_dataset(lines: &[RecordLine]) -> String {
    let mut out = String::new();
    for l in lines {
        out.push_str(&l.circuit);
        out.push('\t');
        let mask: Vec<String> = l.mask.iter().map(|v| v.to_string()).collect();
        out.push_str(&mask.join(","));
        out.push('\t');
        for (i, t) in l.theta.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{t:.6}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn read_dataset(text: &str) -> Result<Vec<RecordLine>, SimError> {
    let bad = |line: usize, reason: &str| SimError::Format {
        line,
        reason: reason.to_string(),
    };
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let mut parts = raw.split('\t');
        let (Some(circuit), Some(mask), Some(theta), None) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
            return Err(bad(line, "expected three tab-separated fields"));
        };
        let mask: Vec<i8> = mask
            .split(',')
            .map(|t| t.parse::<i8>().ok().filter(|v| (-1..=1).contains(v)))
            .collect::<Option<_>>()
            .ok_or_else(|| bad(line, "mask entries must be -1, 0 or 1"))?;
        let theta: Vec<f64> = theta
            .split(',')
            .map(|t| t.parse::<f64>().ok().filter(|v| (0.0..=1.0).contains(v)))
            .collect::<Option<_>>()
            .ok_or_else(|| bad(line, "labels must be numbers in [0, 1]"))?;
        if mask.len() != theta.len() {
            return Err(bad(line, "mask and label lengths differ"));
        }
        out.push(RecordLine {
            circuit: circuit.to_string(),
            mask,
            theta,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{cnf_to_aig, parse_dimacs};
    use crate::sim::exact_profile;

    fn phi() -> AigCircuit {
        cnf_to_aig(&parse_dimacs("p cnf 3 3\n-1 2 0\n-2 -3 0\n1 3 0\n").unwrap())
    }

    fn cfg() -> SimConfig {
        SimConfig {
            seed: 3,
            ..Default::default()
        }
    }

    #[test]
    fn po_only_record_matches_exact() {
        let c = phi();
        let (recs, stats) = build_dataset(std::slice::from_ref(&c), MaskPolicy { extra_records: 0 }, &cfg());
        assert_eq!(stats, DatasetStats { records: 1, dropped: 0 });
        let exact = exact_profile(&c, &Mask::po_only(&c)).unwrap();
        for (a, b) in recs[0].theta.iter().zip(&exact.theta) {
            assert!((a - b).abs() < 0.05);
        }
    }

    #[test]
    fn unsatisfiable_circuit_is_dropped() {
        let c = cnf_to_aig(&parse_dimacs("p cnf 2 2\n1 0\n-1 0\n").unwrap());
        let (recs, stats) = build_dataset(&[c], MaskPolicy::default(), &cfg());
        assert!(recs.is_empty());
        assert_eq!(stats.dropped, 1);
    }

    #[test]
    fn extra_records_are_consistent() {
        let c = phi();
        let (recs, stats) = build_dataset(std::slice::from_ref(&c), MaskPolicy { extra_records: 6 }, &cfg());
        assert_eq!(stats.records + stats.dropped, 7);
        for r in &recs[1..] {
            let masked: Vec<usize> = (0..3).filter(|&i| r.mask.is_masked(i)).collect();
            assert!(!masked.is_empty() && masked.len() < 3);
            for &i in &masked {
                let forced = if r.mask.get(i) == 1 { 1.0 } else { 0.0 };
                assert_eq!(r.theta[i], forced);
            }
            // Copied from an accepted pattern, so still satisfiable.
            assert!(exact_profile(&c, &r.mask).is_ok());
        }
        let again = build_dataset(&[c], MaskPolicy { extra_records: 6 }, &cfg()).0;
        assert_eq!(recs, again);
    }

    #[test]
    fn file_round_trip() {
        let lines = vec![RecordLine {
            circuit: "a.aag".into(),
            mask: vec![1, 0, -1, 1],
            theta: vec![1.0, 0.3333333, 0.0, 1.0],
        }];
        let text = write_dataset(&lines);
        assert_eq!(text, "a.aag\t1,0,-1,1\t1.000000,0.333333,0.000000,1.000000\n");
        let back = read_dataset(&text).unwrap();
        assert_eq!(back[0].mask, lines[0].mask);
        assert!((back[0].theta[1] - 0.333333).abs() < 1e-12);
        assert!(read_dataset("x\t1,2\t0.5,0.5\n").is_err());
        assert!(read_dataset("x\t1\t0.5,0.5\n").is_err());
    }
}
