use std::io::Read as _;
use std::path::Path;

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use super::ModelError;

/// Hidden vector dimension.
pub const HIDDEN: usize = 64;
/// One-hot gate type: PI, AND, NOT.
pub const GATE_FEATURES: usize = 3;

const MAGIC: &[u8; 8] = b"AIGSATCK";
const VERSION: u32 = 1;

/// Attention vectors and GRU weights of one propagation direction. GRU
/// matrices stack the reset, update and candidate blocks in that order.
#[derive(Debug, Clone, PartialEq)]
pub struct PropLayer {
    pub w1: Array1<f64>,
    pub w2: Array1<f64>,
    /// `3d x (d + 3)`
    pub w_ih: Array2<f64>,
    /// `3d x d`
    pub w_hh: Array2<f64>,
    pub b_ih: Array1<f64>,
    pub b_hh: Array1<f64>,
}

impl PropLayer {
    pub fn zeros(d: usize) -> Self {
        Self {
            w1: Array1::zeros(d),
            w2: Array1::zeros(d),
            w_ih: Array2::zeros((3 * d, d + GATE_FEATURES)),
            w_hh: Array2::zeros((3 * d, d)),
            b_ih: Array1::zeros(3 * d),
            b_hh: Array1::zeros(3 * d),
        }
    }

    fn random(d: usize, rng: &mut ChaCha8Rng) -> Self {
        let a = 1.0 / (d as f64).sqrt();
        let mut l = Self::zeros(d);
        for t in l.tensors_mut() {
            t.iter_mut().for_each(|x| *x = rng.random_range(-a..a));
        }
        l
    }

    /// All-zero weights with the update gate saturated open: every node keeps
    /// its previous state.
    pub fn identity(d: usize) -> Self {
        let mut l = Self::zeros(d);
        l.b_hh.slice_mut(ndarray::s![d..2 * d]).fill(1e3);
        l
    }

    fn tensors(&self) -> [&[f64]; 6] {
        [
            self.w1.as_slice().unwrap(),
            self.w2.as_slice().unwrap(),
            self.w_ih.as_slice().unwrap(),
            self.w_hh.as_slice().unwrap(),
            self.b_ih.as_slice().unwrap(),
            self.b_hh.as_slice().unwrap(),
        ]
    }

    fn tensors_mut(&mut self) -> [&mut [f64]; 6] {
        [
            self.w1.as_slice_mut().unwrap(),
            self.w2.as_slice_mut().unwrap(),
            self.w_ih.as_slice_mut().unwrap(),
            self.w_hh.as_slice_mut().unwrap(),
            self.b_ih.as_slice_mut().unwrap(),
            self.b_hh.as_slice_mut().unwrap(),
        ]
    }
}

/// `d -> d -> d -> 1` with ReLU in between and a logistic output.
#[derive(Debug, Clone, PartialEq)]
pub struct Regressor {
    pub w1: Array2<f64>,
    pub b1: Array1<f64>,
    pub w2: Array2<f64>,
    pub b2: Array1<f64>,
    pub w3: Array2<f64>,
    pub b3: Array1<f64>,
}

impl Regressor {
    pub fn zeros(d: usize) -> Self {
        Self {
            w1: Array2::zeros((d, d)),
            b1: Array1::zeros(d),
            w2: Array2::zeros((d, d)),
            b2: Array1::zeros(d),
            w3: Array2::zeros((1, d)),
            b3: Array1::zeros(1),
        }
    }

    fn random(d: usize, rng: &mut ChaCha8Rng) -> Self {
        let a = 1.0 / (d as f64).sqrt();
        let mut r = Self::zeros(d);
        for t in r.tensors_mut() {
            t.iter_mut().for_each(|x| *x = rng.random_range(-a..a));
        }
        r
    }

    fn tensors(&self) -> [&[f64]; 6] {
        [
            self.w1.as_slice().unwrap(),
            self.b1.as_slice().unwrap(),
            self.w2.as_slice().unwrap(),
            self.b2.as_slice().unwrap(),
            self.w3.as_slice().unwrap(),
            self.b3.as_slice().unwrap(),
        ]
    }

    fn tensors_mut(&mut self) -> [&mut [f64]; 6] {
        [
            self.w1.as_slice_mut().unwrap(),
            self.b1.as_slice_mut().unwrap(),
            self.w2.as_slice_mut().unwrap(),
            self.b2.as_slice_mut().unwrap(),
            self.w3.as_slice_mut().unwrap(),
            self.b3.as_slice_mut().unwrap(),
        ]
    }
}

const LAYER_NAMES: [&str; 6] = ["attn.w1", "attn.w2", "gru.w_ih", "gru.w_hh", "gru.b_ih", "gru.b_hh"];
const REGRESSOR_NAMES: [&str; 6] = ["w1", "b1", "w2", "b2", "w3", "b3"];

/// Forward layer, reverse layer and regressor. The two layers are separate
/// values and never alias.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub forward: PropLayer,
    pub reverse: PropLayer,
    pub regressor: Regressor,
}

impl ModelParams {
    pub fn zeros(d: usize) -> Self {
        Self {
            forward: PropLayer::zeros(d),
            reverse: PropLayer::zeros(d),
            regressor: Regressor::zeros(d),
        }
    }

    /// Uniform `(-1/sqrt(d), 1/sqrt(d))` initialization.
    pub fn init(d: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self {
            forward: PropLayer::random(d, &mut rng),
            reverse: PropLayer::random(d, &mut rng),
            regressor: Regressor::random(d, &mut rng),
        }
    }

    pub fn hidden(&self) -> usize {
        self.forward.w1.len()
    }

    /// Named tensors in flat order.
    pub fn named_tensors(&self) -> Vec<(String, &[f64])> {
        let mut out = Vec::new();
        for (prefix, layer) in [("forward", &self.forward), ("reverse", &self.reverse)] {
            for (name, t) in LAYER_NAMES.iter().zip(layer.tensors()) {
                out.push((format!("{prefix}.{name}"), t));
            }
        }
        for (name, t) in REGRESSOR_NAMES.iter().zip(self.regressor.tensors()) {
            out.push((format!("regressor.{name}"), t));
        }
        out
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out: Vec<&mut [f64]> = Vec::new();
        out.extend(self.forward.tensors_mut());
        out.extend(self.reverse.tensors_mut());
        out.extend(self.regressor.tensors_mut());
        out
    }

    pub fn num_params(&self) -> usize {
        self.named_tensors().iter().map(|(_, t)| t.len()).sum()
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.named_tensors().into_iter().flat_map(|(_, t)| t.iter().copied()).collect()
    }

    pub fn from_flat(d: usize, flat: &[f64]) -> Self {
        let mut p = Self::zeros(d);
        p.set_flat(flat);
        p
    }

    pub fn set_flat(&mut self, flat: &[f64]) {
        assert_eq!(flat.len(), self.num_params());
        let mut off = 0;
        for t in self.tensors_mut() {
            t.copy_from_slice(&flat[off..off + t.len()]);
            off += t.len();
        }
    }

    /// The parameter at flat index `i`.
    pub fn param_mut(&mut self, mut i: usize) -> &mut f64 {
        for t in self.tensors_mut() {
            if i < t.len() {
                return &mut t[i];
            }
            i -= t.len();
        }
        panic!("parameter index out of range")
    }

    /// Flat index ranges of the named tensors.
    pub fn groups(&self) -> Vec<(String, std::ops::Range<usize>)> {
        let mut off = 0;
        self.named_tensors()
            .into_iter()
            .map(|(name, t)| {
                let r = off..off + t.len();
                off += t.len();
                (name, r)
            })
            .collect()
    }

    /// Binary checkpoint: magic, version, hidden size, value count, the
    /// little-endian values and a SHA-256 of everything before it.
    pub fn to_bytes(&self) -> Vec<u8> {
        let flat = self.to_flat();
        let mut out = Vec::with_capacity(24 + 8 * flat.len() + 32);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(self.hidden() as u32).to_le_bytes());
        out.extend_from_slice(&(flat.len() as u64).to_le_bytes());
        for x in flat {
            out.extend_from_slice(&x.to_le_bytes());
        }
        let digest = Sha256::digest(&out);
        out.extend_from_slice(&digest);
        out
    }

    pub fn from_bytes(bytes: &[u8], expected_hidden: usize) -> Result<Self, ModelError> {
        let bad = |reason: &str| ModelError::Checkpoint(reason.to_string());
        if bytes.len() < 24 + 32 {
            return Err(bad("file is truncated"));
        }
        if &bytes[..8] != MAGIC {
            return Err(bad("not a checkpoint"));
        }
        let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
        if version != VERSION {
            return Err(bad(&format!("unsupported version {version}")));
        }
        let d = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
        let len = u64::from_le_bytes(bytes[16..24].try_into().unwrap()) as usize;
        let body_end = 24 + 8 * len;
        if bytes.len() != body_end + 32 {
            return Err(bad("file is truncated"));
        }
        if Sha256::digest(&bytes[..body_end]).as_slice() != &bytes[body_end..] {
            return Err(bad("checksum mismatch"));
        }
        if d != expected_hidden {
            return Err(ModelError::Dimension {
                expected: expected_hidden,
                found: d,
            });
        }
        let mut p = Self::zeros(d);
        if p.num_params() != len {
            return Err(bad("parameter count does not match the hidden size"));
        }
        let flat: Vec<f64> = bytes[24..body_end]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        p.set_flat(&flat);
        Ok(p)
    }
}

pub fn save_checkpoint(params: &ModelParams, path: &Path) -> Result<(), ModelError> {
    std::fs::write(path, params.to_bytes())?;
    Ok(())
}

pub fn load_checkpoint(path: &Path, expected_hidden: usize) -> Result<ModelParams, ModelError> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    ModelParams::from_bytes(&bytes, expected_hidden)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_round_trip() {
        let p = ModelParams::init(8, 1);
        let q = ModelParams::from_flat(8, &p.to_flat());
        assert_eq!(p, q);
        let groups = p.groups();
        assert_eq!(groups.len(), 18);
        assert_eq!(groups.last().unwrap().1.end, p.num_params());
    }

    #[test]
    fn full_size_parameter_count() {
        let d = HIDDEN;
        let layer = 2 * d + 3 * d * (d + 3) + 3 * d * d + 6 * d;
        let regressor = 2 * d * d + 2 * d + d + 1;
        assert_eq!(ModelParams::zeros(d).num_params(), 2 * layer + regressor);
    }

    #[test]
    fn checkpoint_errors() {
        let p = ModelParams::init(8, 2);
        let bytes = p.to_bytes();
        assert_eq!(ModelParams::from_bytes(&bytes, 8).unwrap(), p);
        assert!(matches!(
            ModelParams::from_bytes(&bytes[..bytes.len() - 5], 8),
            Err(ModelError::Checkpoint(_))
        ));
        assert!(matches!(
            ModelParams::from_bytes(&bytes, 16),
            Err(ModelError::Dimension { expected: 16, found: 8 })
        ));
        let mut corrupt = bytes.clone();
        corrupt[40] ^= 1;
        assert!(matches!(ModelParams::from_bytes(&corrupt, 8), Err(ModelError::Checkpoint(_))));
    }
}
