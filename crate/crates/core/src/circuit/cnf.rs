//! CNF formulas and the DIMACS text format.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::ParseError;

/// A possibly negated occurrence of a 1-based variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    variable: u32,
    negated: bool,
}

impl Literal {
    /// Panics if `variable` is zero.
    pub fn new(variable: u32, negated: bool) -> Self {
        assert!(variable >= 1, "variables are 1-based");
        Self { variable, negated }
    }

    pub fn pos(variable: u32) -> Self {
        Self::new(variable, false)
    }

    pub fn neg(variable: u32) -> Self {
        Self::new(variable, true)
    }

    /// Converts a signed DIMACS integer (`-3` is `¬x3`).
    pub fn from_dimacs(value: i64) -> Option<Self> {
        if value == 0 || value.unsigned_abs() > u32::MAX as u64 {
            return None;
        }
        Some(Self::new(value.unsigned_abs() as u32, value < 0))
    }

    pub fn to_dimacs(self) -> i64 {
        if self.negated {
            -(self.variable as i64)
        } else {
            self.variable as i64
        }
    }

    pub fn variable(self) -> u32 {
        self.variable
    }

    /// Zero-based index of the variable, which is also its PI index in the AIG.
    pub fn index(self) -> usize {
        self.variable as usize - 1
    }

    pub fn is_negated(self) -> bool {
        self.negated
    }

    pub fn negate(self) -> Self {
        Self {
            variable: self.variable,
            negated: !self.negated,
        }
    }

    /// Truth value of the literal under a 0-based assignment.
    pub fn eval(self, assignment: &[bool]) -> bool {
        assignment[self.index()] ^ self.negated
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

pub type Clause = Vec<Literal>;

/// A conjunction of non-empty clauses over `num_variables` variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfFormula {
    num_variables: usize,
    clauses: Vec<Clause>,
}

impl CnfFormula {
    pub fn new(num_variables: usize) -> Self {
        Self {
            num_variables,
            clauses: Vec::new(),
        }
    }

    /// Builds a formula, checking the same invariants the parser checks.
    pub fn from_clauses(num_variables: usize, clauses: Vec<Clause>) -> Result<Self, ParseError> {
        let mut f = Self::new(num_variables);
        for clause in clauses {
            f.try_add_clause(clause)?;
        }
        Ok(f)
    }

    pub fn try_add_clause(&mut self, clause: Clause) -> Result<(), ParseError> {
        if clause.is_empty() {
            return Err(ParseError::EmptyClause {
                clause: self.clauses.len() + 1,
            });
        }
        if let Some(lit) = clause.iter().find(|l| l.index() >= self.num_variables) {
            return Err(ParseError::VariableOutOfRange {
                variable: lit.variable() as usize,
                declared: self.num_variables,
            });
        }
        self.clauses.push(clause);
        Ok(())
    }

    /// Panics on an empty clause or an out-of-range literal.
    pub fn add_clause(&mut self, clause: Clause) {
        self.try_add_clause(clause).expect("invalid clause");
    }

    pub fn num_variables(&self) -> usize {
        self.num_variables
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn clauses_mut(&mut self) -> &mut Vec<Clause> {
        &mut self.clauses
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|l| l.eval(assignment)))
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_variables, self.clauses.len());
        for clause in &self.clauses {
            for lit in clause {
                out.push_str(&lit.to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        out
    }
}

/// Parses DIMACS CNF. Comment lines (`c ...`) and a trailing `%` section are ignored.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut formula: Option<CnfFormula> = None;
    let mut current: Clause = Vec::new();

    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(ParseError::Header {
                    line: lineno + 1,
                    reason: "duplicate problem line".into(),
                });
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 || fields[0] != "p" || fields[1] != "cnf" {
                return Err(ParseError::Header {
                    line: lineno + 1,
                    reason: format!("expected `p cnf <vars> <clauses>`, got `{line}`"),
                });
            }
            let parse = |s: &str| {
                s.parse::<usize>().map_err(|_| ParseError::Header {
                    line: lineno + 1,
                    reason: format!("`{s}` is not a count"),
                })
            };
            let (vars, clauses) = (parse(fields[2])?, parse(fields[3])?);
            header = Some((vars, clauses));
            formula = Some(CnfFormula::new(vars));
            continue;
        }
        let Some(f) = formula.as_mut() else {
            return Err(ParseError::Header {
                line: lineno + 1,
                reason: "clause before problem line".into(),
            });
        };
        for tok in line.split_whitespace() {
            let value: i64 = tok.parse().map_err(|_| ParseError::Token {
                line: lineno + 1,
                token: tok.to_string(),
            })?;
            if value == 0 {
                f.try_add_clause(std::mem::take(&mut current))?;
            } else {
                let lit = Literal::from_dimacs(value).ok_or_else(|| ParseError::Token {
                    line: lineno + 1,
                    token: tok.to_string(),
                })?;
                if lit.index() >= f.num_variables() {
                    return Err(ParseError::VariableOutOfRange {
                        variable: lit.variable() as usize,
                        declared: f.num_variables(),
                    });
                }
                current.push(lit);
            }
        }
    }

    let mut f = formula.ok_or(ParseError::Header {
        line: 0,
        reason: "missing problem line".into(),
    })?;
    // A final clause without its terminating 0 is accepted.
    if !current.is_empty() {
        f.try_add_clause(current)?;
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    const PHI: &str = "c example\np cnf 3 3\n-1 2 0\n-2 -3 0\n1 3 0\n";

    #[test]
    fn parses_three_clause_example() {
        let f = parse_dimacs(PHI).unwrap();
        assert_eq!(f.num_variables(), 3);
        assert_eq!(f.num_clauses(), 3);
        assert_eq!(f.clauses()[0], vec![Literal::neg(1), Literal::pos(2)]);
    }

    #[test]
    fn single_unit_clause() {
        let f = parse_dimacs("p cnf 1 1\n1 0").unwrap();
        assert_eq!(f.num_variables(), 1);
        assert_eq!(f.clauses(), &[vec![Literal::pos(1)]]);
    }

    #[test]
    fn rejects_out_of_range_literal() {
        let err = parse_dimacs("p cnf 3 1\n5 0\n").unwrap_err();
        assert!(matches!(err, ParseError::VariableOutOfRange { variable: 5, declared: 3 }));
    }

    #[test]
    fn rejects_empty_clause_and_bad_header() {
        assert!(matches!(
            parse_dimacs("p cnf 2 2\n1 0\n0\n"),
            Err(ParseError::EmptyClause { .. })
        ));
        assert!(matches!(parse_dimacs("p dnf 2 1\n1 0\n"), Err(ParseError::Header { .. })));
        assert!(matches!(parse_dimacs("1 2 0\n"), Err(ParseError::Header { .. })));
        assert!(matches!(parse_dimacs("p cnf 2 1\n1 x 0\n"), Err(ParseError::Token { .. })));
    }

    #[test]
    fn clauses_may_span_lines() {
        let f = parse_dimacs("p cnf 3 1\n1 -2\n3 0\n").unwrap();
        assert_eq!(f.clauses()[0].len(), 3);
    }

    #[test]
    fn dimacs_round_trip() {
        let f = parse_dimacs(PHI).unwrap();
        assert_eq!(parse_dimacs(&f.to_dimacs()).unwrap(), f);
    }

    #[test]
    fn eval_matches_clause_semantics() {
        let f = parse_dimacs(PHI).unwrap();
        assert!(f.eval(&[false, false, true]));
        assert!(!f.eval(&[true, false, false]));
        let count = (0..8u32)
            .filter(|m| f.eval(&[(m & 1) != 0, (m & 2) != 0, (m & 4) != 0]))
            .count();
        assert_eq!(count, 2);
    }
}
