use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{CnfFormula, Literal};

/// Edge probability of the novel-distribution graphs.
pub const EDGE_PROB: f64 = 0.37;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomGraph {
    pub num_vertices: usize,
    /// Unordered pairs stored as `(u, v)` with `u < v`.
    pub edges: BTreeSet<(usize, usize)>,
}

impl RandomGraph {
    pub fn new(num_vertices: usize) -> Self {
        Self {
            num_vertices,
            edges: BTreeSet::new(),
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v && u < self.num_vertices && v < self.num_vertices);
        self.edges.insert((u.min(v), u.max(v)));
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.num_vertices).filter(|&u| u != v && self.has_edge(u, v)).collect()
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }
}

/// Erdős–Rényi graph with a vertex count drawn uniformly from `n_range`.
pub fn gen_graph<R: Rng + ?Sized>(n_range: std::ops::RangeInclusive<usize>, edge_prob: f64, rng: &mut R) -> RandomGraph {
    let n = rng.random_range(n_range);
    let mut g = RandomGraph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(edge_prob) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum GraphProblem {
    Coloring,
    Clique,
    VertexCover,
    DominatingSet,
}

impl GraphProblem {
    pub const ALL: [GraphProblem; 4] = [
        GraphProblem::Coloring,
        GraphProblem::Clique,
        GraphProblem::VertexCover,
        GraphProblem::DominatingSet,
    ];

    /// Range of `k` used for the benchmark sets.
    pub fn k_range(self) -> std::ops::RangeInclusive<usize> {
        match self {
            GraphProblem::Coloring => 3..=5,
            GraphProblem::DominatingSet => 2..=4,
            GraphProblem::Clique => 3..=5,
            GraphProblem::VertexCover => 4..=6,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GraphProblem::Coloring => "coloring",
            GraphProblem::Clique => "clique",
            GraphProblem::VertexCover => "vertex-cover",
            GraphProblem::DominatingSet => "dominating-set",
        }
    }

    pub fn encode(self, g: &RandomGraph, k: usize) -> CnfFormula {
        match self {
            GraphProblem::Coloring => encode_coloring(g, k),
            GraphProblem::Clique => encode_clique(g, k),
            GraphProblem::VertexCover => encode_vertex_cover(g, k),
            GraphProblem::DominatingSet => encode_domset(g, k),
        }
    }

    pub fn holds(self, g: &RandomGraph, k: usize) -> bool {
        match self {
            GraphProblem::Coloring => has_coloring(g, k),
            GraphProblem::Clique => has_clique(g, k),
            GraphProblem::VertexCover => has_vertex_cover(g, k),
            GraphProblem::DominatingSet => has_dominating_set(g, k),
        }
    }
}

/// Variable `slot * n + v`, 1-based. Used for colors and selector slots alike.
fn var(n: usize, slot: usize, v: usize) -> u32 {
    (slot * n + v + 1) as u32
}

fn pos(x: u32) -> Literal {
    Literal::pos(x)
}

fn neg(x: u32) -> Literal {
    Literal::neg(x)
}

/// Each of `k` slots selects exactly one vertex.
fn exactly_one_per_slot(f: &mut CnfFormula, n: usize, k: usize) {
    for s in 0..k {
        f.add_clause((0..n).map(|v| pos(var(n, s, v))).collect());
        for u in 0..n {
            for v in u + 1..n {
                f.add_clause(vec![neg(var(n, s, u)), neg(var(n, s, v))]);
            }
        }
    }
}

/// Variable `x(v, c)` means vertex `v` has color `c`.
pub fn encode_coloring(g: &RandomGraph, k: usize) -> CnfFormula {
    let n = g.num_vertices;
    let x = |v: usize, c: usize| (v * k + c + 1) as u32;
    let mut f = CnfFormula::new(n * k);
    for v in 0..n {
        f.add_clause((0..k).map(|c| pos(x(v, c))).collect());
        for a in 0..k {
            for b in a + 1..k {
                f.add_clause(vec![neg(x(v, a)), neg(x(v, b))]);
            }
        }
    }
    for &(u, v) in &g.edges {
        for c in 0..k {
            f.add_clause(vec![neg(x(u, c)), neg(x(v, c))]);
        }
    }
    f
}

/// `k` slots pick pairwise distinct, pairwise adjacent vertices.
pub fn encode_clique(g: &RandomGraph, k: usize) -> CnfFormula {
    let n = g.num_vertices;
    let mut f = CnfFormula::new(n * k);
    exactly_one_per_slot(&mut f, n, k);
    for s in 0..k {
        for t in s + 1..k {
            for u in 0..n {
                for v in 0..n {
                    if u == v || !g.has_edge(u, v) {
                        f.add_clause(vec![neg(var(n, s, u)), neg(var(n, t, v))]);
                    }
                }
            }
        }
    }
    f
}

/// `k` slots whose chosen vertices (repeats allowed) touch every edge.
pub fn encode_vertex_cover(g: &RandomGraph, k: usize) -> CnfFormula {
    let n = g.num_vertices;
    let mut f = CnfFormula::new(n * k);
    exactly_one_per_slot(&mut f, n, k);
    for &(u, v) in &g.edges {
        f.add_clause((0..k).flat_map(|s| [pos(var(n, s, u)), pos(var(n, s, v))]).collect());
    }
    f
}

/// `k` slots whose chosen vertices (repeats allowed) dominate every vertex.
pub fn encode_domset(g: &RandomGraph, k: usize) -> CnfFormula {
    let n = g.num_vertices;
    let mut f = CnfFormula::new(n * k);
    exactly_one_per_slot(&mut f, n, k);
    for v in 0..n {
        let mut closed = g.neighbors(v);
        closed.push(v);
        f.add_clause((0..k).flat_map(|s| closed.iter().map(move |&u| pos(var(n, s, u)))).collect());
    }
    f
}

fn subsets(n: usize) -> impl Iterator<Item = u32> {
    0..(1u32 << n)
}

fn members(set: u32, n: usize) -> impl Iterator<Item = usize> {
    (0..n).filter(move |&v| (set >> v) & 1 == 1)
}

pub fn has_clique(g: &RandomGraph, k: usize) -> bool {
    let n = g.num_vertices;
    subsets(n).filter(|s| s.count_ones() as usize == k).any(|s| {
        let vs: Vec<usize> = members(s, n).collect();
        vs.iter().enumerate().all(|(i, &u)| vs[i + 1..].iter().all(|&v| g.has_edge(u, v)))
    })
}

pub fn has_vertex_cover(g: &RandomGraph, k: usize) -> bool {
    let n = g.num_vertices;
    k > 0 && subsets(n)
        .filter(|s| s.count_ones() as usize <= k)
        .any(|s| g.edges.iter().all(|&(u, v)| (s >> u) & 1 == 1 || (s >> v) & 1 == 1))
}

pub fn has_dominating_set(g: &RandomGraph, k: usize) -> bool {
    let n = g.num_vertices;
    if n == 0 {
        return true;
    }
    k > 0 && subsets(n).filter(|s| s.count_ones() as usize <= k).any(|s| {
        (0..n).all(|v| (s >> v) & 1 == 1 || g.neighbors(v).iter().any(|&u| (s >> u) & 1 == 1))
    })
}

/// Exhaustive search over all colorings, vertex by vertex.
pub fn has_coloring(g: &RandomGraph, k: usize) -> bool {
    fn extend(g: &RandomGraph, k: usize, colors: &mut Vec<usize>) -> bool {
        let v = colors.len();
        if v == g.num_vertices {
            return true;
        }
        for c in 0..k {
            if (0..v).all(|u| !(colors[u] == c && g.has_edge(u, v))) {
                colors.push(c);
                if extend(g, k, colors) {
                    return true;
                }
                colors.pop();
            }
        }
        false
    }
    extend(g, k, &mut Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{dpll_solve, item_rng};

    fn triangle() -> RandomGraph {
        RandomGraph::complete(3)
    }

    #[test]
    fn triangle_coloring() {
        assert!(dpll_solve(&encode_coloring(&triangle(), 3)).is_sat());
        assert!(!dpll_solve(&encode_coloring(&triangle(), 2)).is_sat());
        assert!(has_coloring(&triangle(), 3) && !has_coloring(&triangle(), 2));
    }

    #[test]
    fn extreme_edge_probabilities() {
        let mut rng = item_rng(0, 0);
        let g = gen_graph(6..=10, 0.0, &mut rng);
        assert!(g.edges.is_empty());
        let g = gen_graph(6..=10, 1.0, &mut rng);
        assert_eq!(g, RandomGraph::complete(g.num_vertices));
    }

    #[test]
    fn edge_density() {
        let mut rng = item_rng(1, 0);
        let (mut edges, mut pairs) = (0, 0);
        for _ in 0..1000 {
            let g = gen_graph(10..=10, EDGE_PROB, &mut rng);
            edges += g.edges.len();
            pairs += 45;
        }
        let density = edges as f64 / pairs as f64;
        assert!((density - EDGE_PROB).abs() < 0.03, "{density}");
    }

    #[test]
    fn encoders_agree_with_brute_force() {
        let mut rng = item_rng(2, 0);
        for i in 0..40 {
            let g = gen_graph(3..=8, EDGE_PROB, &mut rng);
            for p in GraphProblem::ALL {
                let k = 2 + i % 3;
                let sat = dpll_solve(&p.encode(&g, k)).is_sat();
                assert_eq!(sat, p.holds(&g, k), "{p:?} k={k} {g:?}");
            }
        }
    }

    #[test]
    fn random_eight_vertex_triangle() {
        let mut rng = item_rng(3, 0);
        for _ in 0..20 {
            let g = gen_graph(8..=8, EDGE_PROB, &mut rng);
            assert_eq!(dpll_solve(&encode_clique(&g, 3)).is_sat(), has_clique(&g, 3));
        }
    }
}
