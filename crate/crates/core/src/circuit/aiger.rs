//! ASCII AIGER (`aag`) reading and writing for single-output combinational AIGs.
//!
//! Complemented literals become explicit NOT nodes on read (one per
//! complemented source variable) and are folded back into literals on write.

use std::fmt::Write as _;

use super::{AigCircuit, Gate, NodeId, ParseError};

pub fn write_aiger(c: &AigCircuit) -> String {
    // AIGER literal of every node; NOT nodes have no variable of their own.
    let mut lit = vec![0u32; c.len()];
    let mut ands = Vec::new();
    let mut next_var = c.num_pis() as u32 + 1;
    for (id, gate) in c.nodes().iter().enumerate() {
        lit[id] = match *gate {
            Gate::Const0 => 0,
            Gate::Pi => 2 * (id as u32 + 1),
            Gate::Not(a) => lit[a] ^ 1,
            Gate::And(a, b) => {
                let l = 2 * next_var;
                next_var += 1;
                let (x, y) = if lit[a] >= lit[b] { (lit[a], lit[b]) } else { (lit[b], lit[a]) };
                ands.push((l, x, y));
                l
            }
        };
    }
    let max_var = next_var - 1;
    let mut out = format!("aag {} {} 0 1 {}\n", max_var, c.num_pis(), ands.len());
    for i in 0..c.num_pis() {
        writeln!(out, "{}", 2 * (i + 1)).unwrap();
    }
    writeln!(out, "{}", lit[c.po()]).unwrap();
    for (l, x, y) in ands {
        writeln!(out, "{l} {x} {y}").unwrap();
    }
    out
}

pub fn parse_aiger(text: &str) -> Result<AigCircuit, ParseError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let err = |line: usize, reason: String| ParseError::Aiger { line: line + 1, reason };

    let (hline, header) = lines.next().ok_or_else(|| err(0, "empty input".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.first() != Some(&"aag") {
        return Err(err(hline, format!("bad magic in `{header}`")));
    }
    if fields.len() != 6 {
        return Err(err(hline, "header must be `aag M I L O A`".into()));
    }
    let nums: Vec<usize> = fields[1..]
        .iter()
        .map(|s| s.parse::<usize>().map_err(|_| err(hline, format!("`{s}` is not a count"))))
        .collect::<Result<_, _>>()?;
    let (max_var, num_in, num_latch, num_out, num_and) = (nums[0], nums[1], nums[2], nums[3], nums[4]);
    if num_latch != 0 {
        return Err(ParseError::Latches(num_latch));
    }
    if num_out != 1 {
        return Err(ParseError::OutputCount(num_out));
    }
    if max_var < num_in + num_and {
        return Err(err(hline, "M smaller than I + A".into()));
    }

    let mut next_line = |what: &str| {
        lines
            .next()
            .ok_or_else(|| err(0, format!("unexpected end of file reading {what}")))
    };
    let parse_lits = |line: usize, s: &str, n: usize| -> Result<Vec<usize>, ParseError> {
        let v: Vec<usize> = s
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| err(line, format!("`{t}` is not a literal"))))
            .collect::<Result<_, _>>()?;
        if v.len() != n {
            return Err(err(line, format!("expected {n} literals")));
        }
        Ok(v)
    };

    for i in 0..num_in {
        let (ln, s) = next_line("inputs")?;
        let l = parse_lits(ln, s, 1)?[0];
        if l != 2 * (i + 1) {
            return Err(ParseError::NonMonotone { line: ln + 1 });
        }
    }
    let (oline, s) = next_line("output")?;
    let out_lit = parse_lits(oline, s, 1)?[0];

    let mut nodes: Vec<Gate> = (0..num_in).map(|_| Gate::Pi).collect();
    // var -> explicit node; var 0 is the constant.
    let mut var_node: Vec<Option<NodeId>> = vec![None; max_var + 1];
    let mut var_inv: Vec<Option<NodeId>> = vec![None; max_var + 1];
    for i in 0..num_in {
        var_node[i + 1] = Some(i);
    }
    let mut prev_lhs = 2 * num_in;

    fn resolve(
        lit: usize,
        nodes: &mut Vec<Gate>,
        var_node: &mut [Option<NodeId>],
        var_inv: &mut [Option<NodeId>],
    ) -> Option<NodeId> {
        let var = lit / 2;
        if var >= var_node.len() {
            return None;
        }
        if var == 0 && var_node[0].is_none() {
            nodes.push(Gate::Const0);
            var_node[0] = Some(nodes.len() - 1);
        }
        let base = var_node[var]?;
        if lit & 1 == 0 {
            return Some(base);
        }
        Some(*var_inv[var].get_or_insert_with(|| {
            nodes.push(Gate::Not(base));
            nodes.len() - 1
        }))
    }

    for _ in 0..num_and {
        let (ln, s) = next_line("and gates")?;
        let v = parse_lits(ln, s, 3)?;
        let (lhs, r0, r1) = (v[0], v[1], v[2]);
        if lhs & 1 == 1 || lhs <= prev_lhs || r0 >= lhs || r1 >= lhs || lhs / 2 > max_var {
            return Err(ParseError::NonMonotone { line: ln + 1 });
        }
        prev_lhs = lhs;
        let a = resolve(r0, &mut nodes, &mut var_node, &mut var_inv)
            .ok_or(ParseError::NonMonotone { line: ln + 1 })?;
        let b = resolve(r1, &mut nodes, &mut var_node, &mut var_inv)
            .ok_or(ParseError::NonMonotone { line: ln + 1 })?;
        nodes.push(Gate::And(a, b));
        var_node[lhs / 2] = Some(nodes.len() - 1);
    }
    let po = resolve(out_lit, &mut nodes, &mut var_node, &mut var_inv)
        .ok_or_else(|| err(oline, format!("output literal {out_lit} is undefined")))?;

    let c = AigCircuit::new(nodes, num_in, po).map_err(|e| err(0, e.to_string()))?;
    Ok(c.cleanup())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{cnf_to_aig, parse_dimacs, AigBuilder};

    #[test]
    fn round_trip_preserves_size_and_function() {
        let f = parse_dimacs("p cnf 3 3\n-1 2 0\n-2 -3 0\n1 3 0\n").unwrap();
        let c = cnf_to_aig(&f);
        let text = write_aiger(&c);
        let back = parse_aiger(&text).unwrap();
        assert_eq!(back.len(), c.len());
        assert_eq!(back.num_ands(), c.num_ands());
        for m in 0..8u32 {
            let a: Vec<bool> = (0..3).map(|i| (m >> i) & 1 == 1).collect();
            assert_eq!(back.eval_po(&a), c.eval_po(&a));
        }
        assert_eq!(write_aiger(&back), text);
    }

    #[test]
    fn and_gate_text() {
        let (mut b, p) = AigBuilder::with_pis(2);
        let g = b.and(p[0], p[1]);
        let n = b.not(g);
        let c = b.finish(n);
        assert_eq!(write_aiger(&c), "aag 3 2 0 1 1\n2\n4\n7\n6 4 2\n");
    }

    #[test]
    fn rejects_two_outputs() {
        let text = "aag 3 2 0 2 1\n2\n4\n6\n7\n6 2 4\n";
        assert!(matches!(parse_aiger(text), Err(ParseError::OutputCount(2))));
    }

    #[test]
    fn rejects_bad_magic_latches_and_order() {
        assert!(matches!(parse_aiger("aig 1 1 0 1 0\n2\n2\n"), Err(ParseError::Aiger { .. })));
        assert!(matches!(parse_aiger("aag 2 1 1 1 0\n2\n4 2\n4\n"), Err(ParseError::Latches(1))));
        let backwards = "aag 4 2 0 1 2\n2\n4\n8\n8 2 4\n6 8 2\n";
        assert!(matches!(parse_aiger(backwards), Err(ParseError::NonMonotone { .. })));
    }

    #[test]
    fn constant_false_output() {
        let c = parse_aiger("aag 1 1 0 1 0\n2\n0\n").unwrap();
        assert_eq!(c.gate(c.po()), Gate::Const0);
        assert!(!c.eval_po(&[true]));
    }

    #[test]
    fn complemented_fanins_share_inverters() {
        // out = (!x1 & !x2) | (!x1 & x2)
        let text = "aag 5 2 0 1 3\n2\n4\n11\n6 3 5\n8 3 4\n10 7 9\n";
        let c = parse_aiger(text).unwrap();
        assert_eq!(c.num_ands(), 3);
        assert_eq!(c.num_nots(), 5);
        assert_eq!(c.evaluate(&[false, true]).len(), 10);
        assert!(!c.eval_po(&[true, true]));
        assert!(c.eval_po(&[false, true]));
        assert!(c.eval_po(&[false, false]));
    }
}
