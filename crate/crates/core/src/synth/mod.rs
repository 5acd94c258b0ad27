//! Logic synthesis: structural hashing, cut enumeration, NPN rewriting and
//! balancing.

pub mod balance;
pub mod cuts;
pub mod library;
pub mod network;
pub mod pipeline;
pub mod rewrite;
pub mod truth;

pub use balance::balance_pass;
pub use cuts::{cut_function, enumerate_cuts, mffc, reference_counts, Cut, DagView, NodeView};
pub use library::{build_rewrite_library, LibraryError, RewriteLibrary, Template};
pub use network::{Lit, Network};
pub use pipeline::{optimize, OptimizeReport, OPT_ROUNDS};
pub use rewrite::{rewrite_pass, RewriteStats};
pub use truth::{npn_canonicalize, NpnTransform, TruthTable4};

use crate::circuit::AigCircuit;

/// Structurally hashed copy of the PO cone.
pub fn strash(c: &AigCircuit) -> AigCircuit {
    Network::from_circuit(c).compact().to_circuit()
}

/// Compares two circuits over all input assignments; only practical for
/// small input counts.
pub fn equivalent_exhaustive(a: &AigCircuit, b: &AigCircuit) -> bool {
    assert!(a.num_pis() <= 24, "too many inputs for exhaustive comparison");
    if a.num_pis() != b.num_pis() {
        return false;
    }
    let (na, nb) = (Network::from_circuit(a), Network::from_circuit(b));
    let n = a.num_pis();
    let total: u64 = 1 << n;
    let mut start = 0u64;
    while start < total {
        let words: Vec<u64> = (0..n)
            .map(|i| {
                let mut w = 0u64;
                for k in 0..64 {
                    if ((start + k) >> i) & 1 == 1 {
                        w |= 1 << k;
                    }
                }
                w
            })
            .collect();
        let valid = if total - start >= 64 { !0 } else { (1u64 << (total - start)) - 1 };
        if (na.po_word(&words) ^ nb.po_word(&words)) & valid != 0 {
            return false;
        }
        start += 64;
    }
    true
}
