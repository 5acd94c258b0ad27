use crate::circuit::{Assignment, CnfFormula, Literal};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    Sat(Assignment),
    Unsat,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }
}

/// Complete DPLL search with unit propagation and pure-literal elimination.
/// Unconstrained variables come back as `false`.
pub fn dpll_solve(f: &CnfFormula) -> SatResult {
    let mut assign = vec![0i8; f.num_variables()];
    if !search(f.clauses(), &mut assign) {
        return SatResult::Unsat;
    }
    let values: Vec<bool> = assign.iter().map(|&v| v == 1).collect();
    assert!(f.eval(&values), "DPLL produced a non-model");
    SatResult::Sat(Assignment::new(values))
}

fn value(l: Literal, assign: &[i8]) -> i8 {
    let v = assign[l.index()];
    if l.is_negated() {
        -v
    } else {
        v
    }
}

fn set(l: Literal, assign: &mut [i8]) {
    assign[l.index()] = if l.is_negated() { -1 } else { 1 };
}

fn search(clauses: &[Vec<Literal>], assign: &mut Vec<i8>) -> bool {
    loop {
        // Unit propagation to a fixpoint; `None` on conflict.
        let mut changed = false;
        for clause in clauses {
            let mut unassigned = None;
            let mut free = 0;
            let mut satisfied = false;
            for &l in clause {
                match value(l, assign) {
                    1 => {
                        satisfied = true;
                        break;
                    }
                    0 => {
                        free += 1;
                        unassigned = Some(l);
                    }
                    _ => {}
                }
            }
            if satisfied {
                continue;
            }
            match free {
                0 => return false,
                1 => {
                    set(unassigned.unwrap(), assign);
                    changed = true;
                }
                _ => {}
            }
        }
        if changed {
            continue;
        }

        // Pure literals among the open clauses.
        let mut polarity = vec![0u8; assign.len()];
        let mut branch = None;
        for clause in clauses {
            if clause.iter().any(|&l| value(l, assign) == 1) {
                continue;
            }
            for &l in clause {
                if assign[l.index()] == 0 {
                    polarity[l.index()] |= if l.is_negated() { 2 } else { 1 };
                    branch.get_or_insert(l);
                }
            }
        }
        let mut pure = false;
        for (v, &p) in polarity.iter().enumerate() {
            if p == 1 || p == 2 {
                assign[v] = if p == 1 { 1 } else { -1 };
                pure = true;
            }
        }
        if pure {
            continue;
        }

        let Some(l) = branch else { return true };
        let saved = assign.clone();
        set(l, assign);
        if search(clauses, assign) {
            return true;
        }
        *assign = saved;
        set(l.negate(), assign);
        return search(clauses, assign);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_dimacs;

    fn brute_force(f: &CnfFormula) -> bool {
        (0..1u64 << f.num_variables()).any(|m| {
            let a: Vec<bool> = (0..f.num_variables()).map(|i| (m >> i) & 1 == 1).collect();
            f.eval(&a)
        })
    }

    #[test]
    fn examples() {
        let phi = parse_dimacs("p cnf 3 3\n-1 2 0\n-2 -3 0\n1 3 0\n").unwrap();
        let SatResult::Sat(a) = dpll_solve(&phi) else { panic!() };
        assert!(phi.eval(a.values()));
        assert!(phi.eval(&[false, false, true]));
        let contra = parse_dimacs("p cnf 1 2\n1 0\n-1 0\n").unwrap();
        assert_eq!(dpll_solve(&contra), SatResult::Unsat);
        assert!(dpll_solve(&CnfFormula::new(4)).is_sat());
    }

    #[test]
    fn agrees_with_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..300 {
            let n = rng.random_range(1..=8);
            let mut f = CnfFormula::new(n);
            for _ in 0..rng.random_range(1..=5 * n) {
                let k = rng.random_range(1..=3.min(n));
                let clause = (0..k)
                    .map(|_| Literal::new(rng.random_range(1..=n as u32), rng.random()))
                    .collect();
                f.add_clause(clause);
            }
            assert_eq!(dpll_solve(&f).is_sat(), brute_force(&f));
        }
    }
}
