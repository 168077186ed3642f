//! Shared label embedding, twin GRUs, and per-word feature extraction.
//!
//! The left-first sequence runs through one GRU and the right-first sequence
//! through another; both read from the same embedding table. The feature of
//! word `i` concatenates the left GRU state at the word's left-first position
//! with the right GRU state at its right-first position.

mod gru;

use serde::{Deserialize, Serialize};

pub use gru::{gru_backward, gru_forward, GruCache, GruGradients, GruParameters};

use crate::error::{Error, Result};
use crate::linearizer::{linearize_pair, LinearizationPair};
use crate::numerics::{Matrix, Rng};
use crate::treebank::{ConstituentTree, LabelId, LabelVocabulary};

pub const DEFAULT_EMBEDDING_DIM: usize = 32;
pub const DEFAULT_HIDDEN_DIM: usize = 64;
/// Half-width of the uniform initialization range.
pub const INIT_SCALE: f64 = 0.08;

/// Row `i` embeds label id `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EmbeddingTable {
    pub weights: Matrix,
}

impl EmbeddingTable {
    pub fn random(labels: usize, dim: usize, rng: &mut Rng) -> Self {
        let mut weights = Matrix::zeros(labels, dim);
        rng.fill_uniform(weights.as_mut_slice(), -INIT_SCALE, INIT_SCALE);
        EmbeddingTable { weights }
    }

    pub fn dim(&self) -> usize {
        self.weights.cols()
    }

    pub fn len(&self) -> usize {
        self.weights.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.rows() == 0
    }
}

pub fn embed_sequence(table: &EmbeddingTable, ids: &[LabelId]) -> Result<Matrix> {
    let mut out = Matrix::zeros(ids.len(), table.dim());
    for (t, id) in ids.iter().enumerate() {
        if id.0 >= table.len() {
            return Err(Error::IdOutOfRange { id: id.0, len: table.len() });
        }
        out.row_mut(t).copy_from_slice(table.weights.row(id.0));
    }
    Ok(out)
}

/// Per-word syntactic features `f_i`, each of width `2 · d_hid`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SyntacticFeatureSet {
    pub per_word: Vec<Vec<f64>>,
}

impl SyntacticFeatureSet {
    pub fn word_count(&self) -> usize {
        self.per_word.len()
    }

    pub fn dim(&self) -> usize {
        self.per_word.first().map_or(0, Vec::len)
    }
}

pub fn extract_features(
    left_states: &Matrix,
    right_states: &Matrix,
    pair: &LinearizationPair,
) -> Result<SyntacticFeatureSet> {
    let (ml, mr) = (left_states.rows(), right_states.rows());
    if ml != pair.left.len() || mr != pair.right.len() {
        return Err(Error::DimensionMismatch(format!(
            "states have {ml}/{mr} rows for sequences of length {}/{}",
            pair.left.len(),
            pair.right.len()
        )));
    }
    if pair.left.word_count() != pair.right.word_count() {
        return Err(Error::DimensionMismatch("word counts of the two traversals differ".into()));
    }
    let per_word = pair
        .left
        .word_positions
        .iter()
        .zip(&pair.right.word_positions)
        .map(|(&pl, &pr)| {
            if pl >= ml || pr >= mr {
                return Err(Error::DimensionMismatch(format!(
                    "word position {pl}/{pr} outside sequences of length {ml}/{mr}"
                )));
            }
            let mut f = left_states.row(pl).to_vec();
            f.extend_from_slice(right_states.row(pr));
            Ok(f)
        })
        .collect::<Result<_>>()?;
    Ok(SyntacticFeatureSet { per_word })
}

/// Embedding table shared by two GRUs with separate parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntacticEncoder {
    pub embedding: EmbeddingTable,
    pub gru_left: GruParameters,
    pub gru_right: GruParameters,
}

/// Everything [`SyntacticEncoder::backward`] needs from a forward pass.
#[derive(Debug, Clone)]
pub struct EncodeCache {
    pub pair: LinearizationPair,
    left: GruCache,
    right: GruCache,
    hidden_dim: usize,
}

#[derive(Debug, Clone)]
pub struct EncoderGradients {
    pub embedding: Matrix,
    pub gru_left: GruParameters,
    pub gru_right: GruParameters,
}

impl SyntacticEncoder {
    pub fn new(labels: usize, embedding_dim: usize, hidden_dim: usize, rng: &mut Rng) -> Self {
        let embedding = EmbeddingTable::random(labels, embedding_dim, rng);
        let gru_left = GruParameters::random(embedding_dim, hidden_dim, INIT_SCALE, rng);
        let gru_right = GruParameters::random(embedding_dim, hidden_dim, INIT_SCALE, rng);
        SyntacticEncoder { embedding, gru_left, gru_right }
    }

    pub fn zeros(labels: usize, embedding_dim: usize, hidden_dim: usize) -> Self {
        SyntacticEncoder {
            embedding: EmbeddingTable { weights: Matrix::zeros(labels, embedding_dim) },
            gru_left: GruParameters::zeros(embedding_dim, hidden_dim),
            gru_right: GruParameters::zeros(embedding_dim, hidden_dim),
        }
    }

    pub fn hidden_dim(&self) -> usize {
        self.gru_left.hidden_dim()
    }

    pub fn feature_dim(&self) -> usize {
        2 * self.hidden_dim()
    }

    pub fn forward(
        &self,
        tree: &ConstituentTree,
        vocab: &LabelVocabulary,
    ) -> Result<(SyntacticFeatureSet, EncodeCache)> {
        let pair = linearize_pair(tree, vocab)?;
        self.forward_pair(pair)
    }

    pub fn forward_pair(&self, pair: LinearizationPair) -> Result<(SyntacticFeatureSet, EncodeCache)> {
        let hidden_dim = self.hidden_dim();
        let h0 = vec![0.0; hidden_dim];
        let left_in = embed_sequence(&self.embedding, &pair.left.label_ids)?;
        let right_in = embed_sequence(&self.embedding, &pair.right.label_ids)?;
        let (left_states, left) = gru_forward(&self.gru_left, &left_in, &h0)?;
        let (right_states, right) = gru_forward(&self.gru_right, &right_in, &h0)?;
        let features = extract_features(&left_states, &right_states, &pair)?;
        Ok((features, EncodeCache { pair, left, right, hidden_dim }))
    }

    /// Gradients of a scalar loss given `∂L/∂f_i` for every word.
    pub fn backward(&self, cache: &EncodeCache, grad_features: &[Vec<f64>]) -> Result<EncoderGradients> {
        let hd = cache.hidden_dim;
        if grad_features.len() != cache.pair.left.word_count()
            || grad_features.iter().any(|g| g.len() != 2 * hd)
        {
            return Err(Error::CacheMismatch("feature gradient shape".into()));
        }
        let mut d_left = Matrix::zeros(cache.pair.left.len(), hd);
        let mut d_right = Matrix::zeros(cache.pair.right.len(), hd);
        for ((g, &pl), &pr) in grad_features
            .iter()
            .zip(&cache.pair.left.word_positions)
            .zip(&cache.pair.right.word_positions)
        {
            crate::numerics::axpy(1.0, &g[..hd], d_left.row_mut(pl));
            crate::numerics::axpy(1.0, &g[hd..], d_right.row_mut(pr));
        }
        let gl = gru_backward(&self.gru_left, &cache.left, &d_left)?;
        let gr = gru_backward(&self.gru_right, &cache.right, &d_right)?;

        let mut embedding = Matrix::zeros(self.embedding.len(), self.embedding.dim());
        for (ids, grads) in [(&cache.pair.left.label_ids, &gl.inputs), (&cache.pair.right.label_ids, &gr.inputs)] {
            for (t, id) in ids.iter().enumerate() {
                crate::numerics::axpy(1.0, grads.row(t), embedding.row_mut(id.0));
            }
        }
        Ok(EncoderGradients { embedding, gru_left: gl.params, gru_right: gr.params })
    }

    pub fn encode_sentence(&self, tree: &ConstituentTree, vocab: &LabelVocabulary) -> Result<SyntacticFeatureSet> {
        Ok(self.forward(tree, vocab)?.0)
    }

    /// `self += c · grads`.
    pub fn apply(&mut self, c: f64, grads: &EncoderGradients) {
        self.embedding.weights.add_scaled(c, &grads.embedding);
        self.gru_left.add_scaled(c, &grads.gru_left);
        self.gru_right.add_scaled(c, &grads.gru_right);
    }

    pub fn is_finite(&self) -> bool {
        self.embedding.weights.is_finite() && self.gru_left.is_finite() && self.gru_right.is_finite()
    }
}
