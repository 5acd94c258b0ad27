//! Reads a DIMACS file (or uses a three-clause example), converts it to an
//! AIG, checks the conversion against direct clause evaluation and prints the
//! ASCII AIGER text.
//!
//! ```text
//! cargo run --example cnf_to_aig -- [formula.cnf]
//! ```

use aigsat::circuit::{cnf_to_aig, parse_dimacs, write_aiger, Assignment, CircuitStats};

const EXAMPLE: &str = "p cnf 3 3\n-1 2 0\n-2 -3 0\n1 3 0\n";

fn main() -> anyhow::Result<()> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => EXAMPLE.to_string(),
    };
    let f = parse_dimacs(&text)?;
    let c = cnf_to_aig(&f);
    println!("{} variables, {} clauses", f.num_variables(), f.num_clauses());
    println!("{}", serde_json::to_string(&CircuitStats::of(&c))?);

    if f.num_variables() <= 16 {
        let n = f.num_variables();
        let mut models = 0;
        for m in 0..1u64 << n {
            let a = Assignment::from_index(n, m);
            assert_eq!(c.eval_po(a.values()), f.eval(a.values()));
            models += c.eval_po(a.values()) as usize;
        }
        println!("truth table matches the clauses; {models} satisfying assignments");
    }
    print!("{}", write_aiger(&c));
    Ok(())
}
