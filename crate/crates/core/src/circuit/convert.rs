use crate::synth::{Lit, Network};

use super::{AigCircuit, CnfFormula};

/// Builds the satisfiability circuit of `f`: each clause is the complement of a
/// left-deep AND over its negated literals, clauses are joined by a left-deep
/// AND chain, and every gate goes through structural hashing.
pub fn cnf_to_aig(f: &CnfFormula) -> AigCircuit {
    cnf_to_network(f).to_circuit()
}

pub(crate) fn cnf_to_network(f: &CnfFormula) -> Network {
    let mut net = Network::new(f.num_variables());
    let mut root: Option<Lit> = None;
    for clause in f.clauses() {
        let negated: Vec<Lit> = clause
            .iter()
            .map(|l| net.input(l.index()).xor(!l.is_negated()))
            .collect();
        let (&first, rest) = negated.split_first().expect("clauses are non-empty");
        let all_false = rest.iter().fold(first, |acc, &l| net.and(acc, l));
        let clause_lit = !all_false;
        root = Some(match root {
            None => clause_lit,
            Some(r) => net.and(r, clause_lit),
        });
    }
    net.set_po(root.unwrap_or(Lit::TRUE));
    net
}
