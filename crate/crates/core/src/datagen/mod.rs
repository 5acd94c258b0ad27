//! SAT instance generators and a DPLL oracle.

mod benchmark;
mod dpll;
mod graph;
mod sr;

pub use benchmark::{build_benchmark, write_benchmark, BenchmarkKind, ManifestEntry};
pub use dpll::{dpll_solve, SatResult};
pub use graph::{
    encode_clique, encode_coloring, encode_domset, encode_vertex_cover, gen_graph, has_clique, has_coloring,
    has_dominating_set, has_vertex_cover, GraphProblem, RandomGraph, EDGE_PROB,
};
pub use sr::{gen_sr, gen_sr_with, sample_clause, SrError, SrPair, SrParams};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for item `index` of a run seeded with `seed`.
pub fn item_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
