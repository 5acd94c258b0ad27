//! The fixed optimization script.

use serde::{Deserialize, Serialize};

use crate::circuit::{AigCircuit, CircuitStats};

use super::balance::balance_pass;
use super::library::RewriteLibrary;
use super::rewrite::rewrite_pass;

/// Rounds of rewrite followed by balance.
pub const OPT_ROUNDS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeReport {
    pub before: CircuitStats,
    pub after: CircuitStats,
    pub replacements: usize,
}

/// `(rewrite; balance)` three times.
pub fn optimize(c: &AigCircuit, lib: &RewriteLibrary) -> (AigCircuit, OptimizeReport) {
    let before = CircuitStats::of(c);
    let mut cur = c.clone();
    let mut replacements = 0;
    for _ in 0..OPT_ROUNDS {
        let (rw, stats) = rewrite_pass(&cur, lib);
        replacements += stats.replacements;
        cur = balance_pass(&rw);
    }
    let after = CircuitStats::of(&cur);
    (
        cur,
        OptimizeReport {
            before,
            after,
            replacements,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{cnf_to_aig, parse_dimacs};
    use crate::synth::equivalent_exhaustive;

    #[test]
    fn optimizes_a_small_formula() {
        let f = parse_dimacs("p cnf 4 4\n1 2 0\n-1 3 0\n-2 3 4 0\n-3 -4 0\n").unwrap();
        let c = cnf_to_aig(&f);
        let (o, report) = optimize(&c, RewriteLibrary::bundled());
        assert!(equivalent_exhaustive(&c, &o));
        assert!(report.after.depth <= report.before.depth);
        assert_eq!(report.before.nodes, c.len());
        assert_eq!(report.after.nodes, o.len());
    }
}
