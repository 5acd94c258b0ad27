//! Precomputed minimum-size AIG templates for 4-input NPN classes.
//!
//! Templates are found by exhaustive structural enumeration: every AND
//! network with up to `max_template_nodes` gates over four inputs is visited
//! once (up to reordering of independent gates), and the smallest network
//! realizing each class is kept.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::network::{Lit, Network};
use super::truth::{npn_canonical_cached, NpnTransform, TruthTable4, VAR_TABLES};

pub const LIBRARY_FORMAT: &str = "aigsat-rewrite-library";
pub const LIBRARY_VERSION: u32 = 1;
pub const DEFAULT_MAX_TEMPLATE_NODES: usize = 7;

const BUNDLED: &str = include_str!("../../data/rewrite_library.json");

/// Template literal: `0`/`1` are constants, `2(i+1)+c` is input `i`
/// (`i < 4`), `2(5+j)+c` is gate `j`; `c` is the complement bit.
pub type TemplateLit = u8;

fn input_lit(i: usize, complemented: bool) -> TemplateLit {
    (2 * (i + 1)) as u8 | complemented as u8
}

fn gate_lit(j: usize) -> TemplateLit {
    (2 * (5 + j)) as u8
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Template {
    pub gates: Vec<(TemplateLit, TemplateLit)>,
    pub output: TemplateLit,
}

impl Template {
    pub fn num_gates(&self) -> usize {
        self.gates.len()
    }

    pub fn truth_table(&self) -> TruthTable4 {
        let mut vals: Vec<u16> = Vec::with_capacity(self.gates.len());
        let lit = |vals: &[u16], l: TemplateLit| {
            let base = match l >> 1 {
                0 => 0,
                v @ 1..=4 => VAR_TABLES[v as usize - 1],
                v => vals[v as usize - 5],
            };
            if l & 1 == 1 {
                !base
            } else {
                base
            }
        };
        for &(a, b) in &self.gates {
            let v = lit(&vals, a) & lit(&vals, b);
            vals.push(v);
        }
        TruthTable4(lit(&vals, self.output))
    }

    /// Instantiates the template with `inputs[i]` driving template input `i`.
    pub fn build(&self, net: &mut Network, inputs: [Lit; 4]) -> Lit {
        let mut gates: Vec<Lit> = Vec::with_capacity(self.gates.len());
        for &(a, b) in &self.gates {
            let x = resolve(a, &inputs, &gates);
            let y = resolve(b, &inputs, &gates);
            gates.push(net.and(x, y));
        }
        resolve(self.output, &inputs, &gates)
    }

    /// Given a template for `f`, returns one for `tr.apply(f)`.
    fn transformed(&self, tr: NpnTransform) -> Template {
        // g(y) = f(x) ^ o with x[perm[i]] = y[i] ^ n_i, so f's input j is
        // g's input q = perm^-1(j), complemented by n_q.
        let mut inv = [0usize; 4];
        for (i, &p) in tr.perm.iter().enumerate() {
            inv[p as usize] = i;
        }
        let map = |l: TemplateLit| -> TemplateLit {
            match l >> 1 {
                v @ 1..=4 => {
                    let q = inv[v as usize - 1];
                    input_lit(q, tr.input_negated(q)) ^ (l & 1)
                }
                _ => l,
            }
        };
        Template {
            gates: self.gates.iter().map(|&(a, b)| (map(a), map(b))).collect(),
            output: map(self.output) ^ tr.output_neg as u8,
        }
    }
}

fn resolve(l: TemplateLit, inputs: &[Lit; 4], gates: &[Lit]) -> Lit {
    let base = match l >> 1 {
        0 => Lit::FALSE,
        v @ 1..=4 => inputs[v as usize - 1],
        v => gates[v as usize - 5],
    };
    base.xor(l & 1 == 1)
}

#[derive(Debug, Error)]
pub enum LibraryError {
    #[error("not a rewrite library file: {0}")]
    Format(String),
    #[error("unsupported library version {0}")]
    Version(u32),
    #[error("checksum mismatch")]
    Checksum,
    #[error("template for class {class:#06x} computes {got:#06x}")]
    WrongFunction { class: u16, got: u16 },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Canonical NPN table to minimal template.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteLibrary {
    max_template_nodes: usize,
    entries: BTreeMap<u16, Template>,
}

#[derive(Serialize, Deserialize)]
struct LibraryFile {
    format: String,
    version: u32,
    max_template_nodes: usize,
    checksum: String,
    entries: Vec<LibraryEntry>,
}

#[derive(Serialize, Deserialize)]
struct LibraryEntry {
    class: u16,
    gates: Vec<(TemplateLit, TemplateLit)>,
    output: TemplateLit,
}

impl RewriteLibrary {
    /// The library shipped with the crate.
    pub fn bundled() -> &'static RewriteLibrary {
        static LIB: std::sync::OnceLock<RewriteLibrary> = std::sync::OnceLock::new();
        LIB.get_or_init(|| RewriteLibrary::from_json(BUNDLED).expect("bundled library is valid"))
    }

    pub fn get(&self, canonical: TruthTable4) -> Option<&Template> {
        self.entries.get(&canonical.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_template_nodes(&self) -> usize {
        self.max_template_nodes
    }

    pub fn classes(&self) -> impl Iterator<Item = (TruthTable4, &Template)> {
        self.entries.iter().map(|(&k, v)| (TruthTable4(k), v))
    }

    fn checksum(entries: &[LibraryEntry]) -> String {
        let body = serde_json::to_vec(entries).expect("entries serialize");
        hex::encode(Sha256::digest(&body))
    }

    pub fn to_json(&self) -> String {
        let entries: Vec<LibraryEntry> = self
            .entries
            .iter()
            .map(|(&class, t)| LibraryEntry {
                class,
                gates: t.gates.clone(),
                output: t.output,
            })
            .collect();
        let file = LibraryFile {
            format: LIBRARY_FORMAT.into(),
            version: LIBRARY_VERSION,
            max_template_nodes: self.max_template_nodes,
            checksum: Self::checksum(&entries),
            entries,
        };
        serde_json::to_string(&file).expect("library serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, LibraryError> {
        let file: LibraryFile = serde_json::from_str(text)?;
        if file.format != LIBRARY_FORMAT {
            return Err(LibraryError::Format(file.format));
        }
        if file.version != LIBRARY_VERSION {
            return Err(LibraryError::Version(file.version));
        }
        if Self::checksum(&file.entries) != file.checksum {
            return Err(LibraryError::Checksum);
        }
        let mut entries = BTreeMap::new();
        for e in file.entries {
            let t = Template {
                gates: e.gates,
                output: e.output,
            };
            let got = t.truth_table().0;
            if got != e.class {
                return Err(LibraryError::WrongFunction { class: e.class, got });
            }
            entries.insert(e.class, t);
        }
        Ok(Self {
            max_template_nodes: file.max_template_nodes,
            entries,
        })
    }
}

/// Exhaustive enumeration of AND networks up to `max_template_nodes` gates.
pub fn build_rewrite_library(max_template_nodes: usize) -> RewriteLibrary {
    let mut search = Search {
        max: max_template_nodes,
        tts: VAR_TABLES.to_vec(),
        gates: Vec::new(),
        keys: Vec::new(),
        used: Vec::new(),
        best: BTreeMap::new(),
    };
    // Zero-gate classes: constant and projection.
    search.record(0, Vec::new(), 0);
    search.record(VAR_TABLES[0], Vec::new(), input_lit(0, false));
    if max_template_nodes > 0 {
        search.extend();
    }
    RewriteLibrary {
        max_template_nodes,
        entries: search.best,
    }
}

struct Search {
    max: usize,
    /// Tables of inputs then gates, gates stored uncomplemented.
    tts: Vec<u16>,
    gates: Vec<(TemplateLit, TemplateLit)>,
    keys: Vec<u32>,
    /// Number of later gates reading each gate.
    used: Vec<u32>,
    best: BTreeMap<u16, Template>,
}

impl Search {
    fn lit_table(&self, l: TemplateLit) -> u16 {
        let base = self.tts[(l >> 1) as usize - 1];
        if l & 1 == 1 {
            !base
        } else {
            base
        }
    }

    fn record(&mut self, tt: u16, gates: Vec<(TemplateLit, TemplateLit)>, output: TemplateLit) {
        let (canon, tr) = npn_canonical_cached(TruthTable4(tt));
        if self.best.get(&canon.0).is_some_and(|t| t.num_gates() <= gates.len()) {
            return;
        }
        let t = Template { gates, output }.transformed(tr);
        debug_assert_eq!(t.truth_table(), canon);
        self.best.insert(canon.0, t);
    }

    fn extend(&mut self) {
        let depth = self.gates.len();
        let remaining = self.max - depth;
        let unused = self.used.iter().filter(|&&u| u == 0).count();
        // Every dangling gate but the final output has to be consumed, and a
        // gate consumes at most two while adding one.
        if unused > remaining + 1 {
            return;
        }
        let num_lits = 2 * (4 + depth);
        let prev_key = self.keys.last().copied();
        let last_gate = (depth > 0).then(|| 4 + depth);
        for hi in 2..num_lits + 2 {
            for lo in 2..hi {
                let (a, b) = (lo as TemplateLit, hi as TemplateLit);
                if a >> 1 == b >> 1 {
                    continue;
                }
                let key = ((b as u32) << 8) | a as u32;
                // Independent neighbours appear in increasing key order.
                if let (Some(pk), Some(lg)) = (prev_key, last_gate) {
                    let reads_prev = (a >> 1) as usize == lg || (b >> 1) as usize == lg;
                    if !reads_prev && key <= pk {
                        continue;
                    }
                }
                let tt = self.lit_table(a) & self.lit_table(b);
                if tt == 0 || tt == 0xFFFF || self.tts.iter().any(|&t| t == tt || t == !tt) {
                    continue;
                }
                // The new gate must absorb enough dangling gates.
                let consumed = [a, b]
                    .iter()
                    .filter(|&&l| (l >> 1) >= 5 && self.used[(l >> 1) as usize - 5] == 0)
                    .count();
                if unused - consumed + 1 > remaining {
                    continue;
                }

                self.tts.push(tt);
                self.gates.push((a, b));
                self.keys.push(key);
                for l in [a, b] {
                    if (l >> 1) >= 5 {
                        self.used[(l >> 1) as usize - 5] += 1;
                    }
                }
                self.used.push(0);

                let out = gate_lit(depth);
                let gates = self.gates.clone();
                self.record(tt, gates, out);
                if remaining > 1 {
                    self.extend();
                }

                self.used.pop();
                for l in [a, b] {
                    if (l >> 1) >= 5 {
                        self.used[(l >> 1) as usize - 5] -= 1;
                    }
                }
                self.keys.pop();
                self.gates.pop();
                self.tts.pop();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::truth::npn_canonicalize;

    fn class_of(t: u16) -> TruthTable4 {
        npn_canonicalize(TruthTable4(t)).0
    }

    #[test]
    fn small_budget_library() {
        let lib = build_rewrite_library(3);
        for (class, t) in lib.classes() {
            assert_eq!(t.truth_table(), class);
            assert!(t.num_gates() <= 3);
        }
        assert_eq!(lib.get(class_of(0xAAAA & 0xCCCC)).unwrap().num_gates(), 1);
        assert_eq!(lib.get(class_of(0xAAAA)).unwrap().num_gates(), 0);
        assert_eq!(lib.get(class_of(0)).unwrap().num_gates(), 0);
        let xor = 0xAAAA ^ 0xCCCC;
        assert_eq!(lib.get(class_of(xor)).unwrap().num_gates(), 3);
    }

    #[test]
    fn xor_needs_three_gates() {
        // Budget 2 cannot realize XOR: exhaustive search finds nothing.
        let lib = build_rewrite_library(2);
        assert!(lib.get(class_of(0xAAAA ^ 0xCCCC)).is_none());
    }

    #[test]
    fn bundled_library_is_consistent() {
        let lib = RewriteLibrary::bundled();
        assert_eq!(lib.max_template_nodes(), DEFAULT_MAX_TEMPLATE_NODES);
        for (class, t) in lib.classes() {
            assert_eq!(t.truth_table(), class);
            assert!(t.num_gates() <= lib.max_template_nodes());
        }
        // Minimality agrees with an independent small-budget search.
        let small = build_rewrite_library(4);
        for (class, t) in small.classes() {
            assert_eq!(lib.get(class).unwrap().num_gates(), t.num_gates(), "class {:#06x}", class.0);
        }
    }

    #[test]
    fn json_round_trip_and_checksum() {
        let lib = build_rewrite_library(2);
        let text = lib.to_json();
        assert_eq!(RewriteLibrary::from_json(&text).unwrap(), lib);
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["entries"][0]["output"] = serde_json::json!(1);
        assert!(matches!(
            RewriteLibrary::from_json(&v.to_string()),
            Err(LibraryError::Checksum)
        ));
    }
}
