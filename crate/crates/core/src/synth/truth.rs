//! 4-input truth tables and NPN canonicalization.
//!
//! Bit `i` of a table is the function value when input `j` equals bit `j` of
//! `i`. Functions of fewer inputs simply do not depend on the upper variables.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

/// Projection tables of the four inputs.
pub const VAR_TABLES: [u16; 4] = [0xAAAA, 0xCCCC, 0xF0F0, 0xFF00];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TruthTable4(pub u16);

impl TruthTable4 {
    pub const FALSE: Self = Self(0);
    pub const TRUE: Self = Self(0xFFFF);

    pub fn var(i: usize) -> Self {
        Self(VAR_TABLES[i])
    }

    pub fn bits(self) -> u16 {
        self.0
    }

    pub fn value(self, minterm: usize) -> bool {
        (self.0 >> minterm) & 1 == 1
    }

    pub fn depends_on(self, var: usize) -> bool {
        flip_input(self.0, var) != self.0
    }

    pub fn support_size(self) -> usize {
        (0..4).filter(|&v| self.depends_on(v)).count()
    }
}

impl std::ops::Not for TruthTable4 {
    type Output = Self;
    fn not(self) -> Self {
        Self(!self.0)
    }
}

/// Complements input `var`: swaps the cofactors.
#[inline]
pub fn flip_input(t: u16, var: usize) -> u16 {
    let shift = 1u32 << var;
    let hi = VAR_TABLES[var];
    ((t & hi) >> shift) | ((t & !hi) << shift)
}

/// Input permutation, input negation and output negation.
///
/// Applying a transform to `f` gives `f'(y) = f(x) ^ output_neg` where
/// `x[perm[i]] = y[i] ^ neg_i`. A template for the canonical function is
/// therefore instantiated for `f` by driving template input `i` with
/// `leaf[perm[i]]` complemented by `neg_i`, and complementing the output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NpnTransform {
    pub perm: [u8; 4],
    pub input_neg: u8,
    pub output_neg: bool,
}

impl NpnTransform {
    pub const IDENTITY: Self = Self {
        perm: [0, 1, 2, 3],
        input_neg: 0,
        output_neg: false,
    };

    pub fn input_negated(self, i: usize) -> bool {
        (self.input_neg >> i) & 1 == 1
    }

    pub fn apply(self, t: TruthTable4) -> TruthTable4 {
        let mut out = permute(t.0, self.perm);
        for i in 0..4 {
            if self.input_negated(i) {
                out = flip_input(out, i);
            }
        }
        if self.output_neg {
            out = !out;
        }
        TruthTable4(out)
    }

    /// Enumerates all 768 transforms.
    pub fn all() -> impl Iterator<Item = NpnTransform> {
        permutations().iter().flat_map(|&perm| {
            (0..16u8).flat_map(move |input_neg| {
                [false, true].into_iter().map(move |output_neg| NpnTransform {
                    perm,
                    input_neg,
                    output_neg,
                })
            })
        })
    }
}

/// `g(y) = t(x)` with `x[perm[i]] = y[i]`.
fn permute(t: u16, perm: [u8; 4]) -> u16 {
    let mut out = 0u16;
    for y in 0..16usize {
        let mut x = 0usize;
        for (i, &p) in perm.iter().enumerate() {
            x |= ((y >> i) & 1) << p;
        }
        out |= ((t >> x) & 1) << y;
    }
    out
}

fn permutations() -> &'static [[u8; 4]; 24] {
    static PERMS: OnceLock<[[u8; 4]; 24]> = OnceLock::new();
    PERMS.get_or_init(|| {
        let mut out = [[0u8; 4]; 24];
        let mut k = 0;
        for a in 0..4u8 {
            for b in 0..4u8 {
                for c in 0..4u8 {
                    for d in 0..4u8 {
                        if a != b && a != c && a != d && b != c && b != d && c != d {
                            out[k] = [a, b, c, d];
                            k += 1;
                        }
                    }
                }
            }
        }
        out
    })
}

/// Lexicographically smallest table over all NPN transforms, and a transform
/// that produces it. Ties keep the first transform in enumeration order.
pub fn npn_canonicalize(t: TruthTable4) -> (TruthTable4, NpnTransform) {
    let mut best = u16::MAX;
    let mut best_tr = NpnTransform::IDENTITY;
    let mut first = true;
    for &perm in permutations() {
        let mut q = permute(t.0, perm);
        let mut neg = 0u8;
        // Gray-code walk over the 16 input-negation masks.
        for k in 0..16u8 {
            if k > 0 {
                let var = k.trailing_zeros() as usize;
                q = flip_input(q, var);
                neg ^= 1 << var;
            }
            for (cand, out_neg) in [(q, false), (!q, true)] {
                if first || cand < best {
                    first = false;
                    best = cand;
                    best_tr = NpnTransform {
                        perm,
                        input_neg: neg,
                        output_neg: out_neg,
                    };
                }
            }
        }
    }
    (TruthTable4(best), best_tr)
}

/// Memoized canonical form of all 65536 tables.
pub fn npn_table() -> &'static [(TruthTable4, NpnTransform)] {
    static TABLE: OnceLock<Vec<(TruthTable4, NpnTransform)>> = OnceLock::new();
    TABLE.get_or_init(|| (0..=u16::MAX).map(|t| npn_canonicalize(TruthTable4(t))).collect())
}

pub fn npn_canonical_cached(t: TruthTable4) -> (TruthTable4, NpnTransform) {
    npn_table()[t.0 as usize]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const AND2: u16 = 0xAAAA & 0xCCCC;

    // Minterm-by-minterm reference for `NpnTransform::apply`.
    fn apply_reference(t: u16, tr: NpnTransform) -> u16 {
        let mut out = 0u16;
        for y in 0..16usize {
            let mut x = 0usize;
            for i in 0..4 {
                let bit = ((y >> i) & 1) ^ ((tr.input_neg as usize >> i) & 1);
                x |= bit << tr.perm[i];
            }
            let v = ((t >> x) & 1) ^ tr.output_neg as u16;
            out |= v << y;
        }
        out
    }

    #[test]
    fn apply_matches_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let all: Vec<_> = NpnTransform::all().collect();
        assert_eq!(all.len(), 768);
        for _ in 0..200 {
            let t: u16 = rng.random();
            let tr = all[rng.random_range(0..all.len())];
            assert_eq!(tr.apply(TruthTable4(t)).0, apply_reference(t, tr));
        }
    }

    #[test]
    fn canonical_is_brute_force_minimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let t = TruthTable4(rng.random());
            let min = NpnTransform::all().map(|tr| apply_reference(t.0, tr)).min().unwrap();
            let (canon, tr) = npn_canonicalize(t);
            assert_eq!(canon.0, min);
            assert_eq!(tr.apply(t), canon);
        }
    }

    #[test]
    fn and_and_or_share_a_class() {
        let or2 = 0xAAAA | 0xCCCC;
        let (a, _) = npn_canonicalize(TruthTable4(AND2));
        let (o, _) = npn_canonicalize(TruthTable4(or2));
        assert_eq!(a, o);
        let nand = !AND2;
        assert_eq!(npn_canonicalize(TruthTable4(nand)).0, a);
    }

    #[test]
    fn constant_class_is_invariant() {
        for tr in NpnTransform::all() {
            let out = tr.apply(TruthTable4::FALSE);
            assert!(out == TruthTable4::FALSE || out == TruthTable4::TRUE);
        }
        assert_eq!(npn_canonicalize(TruthTable4::TRUE).0, TruthTable4::FALSE);
    }

    #[test]
    fn canonical_invariant_under_random_transforms() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let all: Vec<_> = NpnTransform::all().collect();
        for _ in 0..1000 {
            let t = TruthTable4(rng.random());
            let tr = all[rng.random_range(0..all.len())];
            assert_eq!(npn_canonicalize(tr.apply(t)).0, npn_canonicalize(t).0);
        }
    }

    #[test]
    fn number_of_npn_classes() {
        let mut classes: Vec<u16> = npn_table().iter().map(|(c, _)| c.0).collect();
        classes.sort_unstable();
        classes.dedup();
        // Frozen from the exhaustive enumeration above.
        assert_eq!(classes.len(), 222);
    }

    #[test]
    fn support_detection() {
        assert_eq!(TruthTable4(AND2).support_size(), 2);
        assert!(!TruthTable4(AND2).depends_on(3));
        assert_eq!(TruthTable4::FALSE.support_size(), 0);
    }
}
