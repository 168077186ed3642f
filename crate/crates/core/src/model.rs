//! Trainable parameters, the combined objective, and the JSON checkpoint.

use serde::{Deserialize, Serialize};

use crate::encoder::{EncoderGradients, SyntacticEncoder, SyntacticFeatureSet, INIT_SCALE};
use crate::error::{Error, Result};
use crate::nml::{nml_loss, NmlResult};
use crate::numerics::Rng;
use crate::prosody::ProxyHead;
use crate::treebank::{ConstituentTree, LabelVocabulary};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub d_emb: usize,
    pub d_hid: usize,
    pub d_ph: usize,
}

impl Default for Dims {
    fn default() -> Self {
        Dims {
            d_emb: crate::encoder::DEFAULT_EMBEDDING_DIM,
            d_hid: crate::encoder::DEFAULT_HIDDEN_DIM,
            d_ph: crate::prosody::DEFAULT_PHONEME_DIM,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub dims: Dims,
    pub vocabulary: LabelVocabulary,
    pub encoder: SyntacticEncoder,
    pub head: ProxyHead,
}

#[derive(Debug, Clone)]
pub struct ModelGradients {
    pub encoder: EncoderGradients,
    pub head: ProxyHead,
}

impl ModelGradients {
    pub fn blocks(&self) -> Vec<&[f64]> {
        let e = &self.encoder;
        let mut out: Vec<&[f64]> = vec![e.embedding.as_slice()];
        out.extend(e.gru_left.blocks());
        out.extend(e.gru_right.blocks());
        out.push(&self.head.weights);
        out.push(std::slice::from_ref(&self.head.bias));
        out
    }
}

/// One evaluation of `task + λ · nml` with its gradient.
#[derive(Debug, Clone)]
pub struct Objective {
    pub task_loss: f64,
    pub nml: NmlResult,
    pub total: f64,
    pub grads: ModelGradients,
}

impl Model {
    /// Draws the embedding table, left GRU, right GRU and head, in that order.
    pub fn new(vocabulary: LabelVocabulary, dims: Dims, rng: &mut Rng) -> Self {
        let encoder = SyntacticEncoder::new(vocabulary.len(), dims.d_emb, dims.d_hid, rng);
        let head = ProxyHead::random(2 * dims.d_hid, INIT_SCALE, rng);
        Model { dims, vocabulary, encoder, head }
    }

    pub fn encode(&self, tree: &ConstituentTree) -> Result<SyntacticFeatureSet> {
        self.encoder.encode_sentence(tree, &self.vocabulary)
    }

    pub fn objective(&self, tree: &ConstituentTree, labels: &[u8], lambda: f64) -> Result<Objective> {
        let (features, cache) = self.encoder.forward(tree, &self.vocabulary)?;
        let head = self.head.loss(&features, labels)?;
        let mut encoder = self.encoder.backward(&cache, &head.grad_features)?;
        let nml = nml_loss(&self.encoder.embedding.weights)?;
        encoder.embedding.add_scaled(lambda, &nml.grad_table);
        Ok(Objective {
            task_loss: head.loss,
            total: head.loss + lambda * nml.loss,
            nml,
            grads: ModelGradients { encoder, head: head.grad_head },
        })
    }

    /// `self += c · grads`.
    pub fn apply(&mut self, c: f64, grads: &ModelGradients) {
        self.encoder.apply(c, &grads.encoder);
        self.head.add_scaled(c, &grads.head);
    }

    pub fn is_finite(&self) -> bool {
        self.encoder.is_finite() && self.head.is_finite()
    }

    /// Every trainable block, in the order of [`ModelGradients::blocks`].
    pub fn blocks_mut(&mut self) -> Vec<&mut [f64]> {
        let e = &mut self.encoder;
        let mut out: Vec<&mut [f64]> = vec![e.embedding.weights.as_mut_slice()];
        out.extend(e.gru_left.blocks_mut());
        out.extend(e.gru_right.blocks_mut());
        out.push(&mut self.head.weights);
        out.push(std::slice::from_mut(&mut self.head.bias));
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&CheckpointRef {
            format_version: FORMAT_VERSION,
            dims: self.dims,
            vocabulary: &self.vocabulary,
            encoder: &self.encoder,
            head: &self.head,
        })
        .expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Checkpoint =
            serde_json::from_str(text).map_err(|e| Error::Checkpoint(e.to_string()))?;
        if c.format_version != FORMAT_VERSION {
            return Err(Error::Checkpoint(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                c.format_version
            )));
        }
        let model = Model { dims: c.dims, vocabulary: c.vocabulary, encoder: c.encoder, head: c.head };
        model.check_shapes()?;
        Ok(model)
    }

    fn check_shapes(&self) -> Result<()> {
        let Dims { d_emb, d_hid, .. } = self.dims;
        let e = &self.encoder;
        let ok = e.embedding.weights.shape() == (self.vocabulary.len(), d_emb)
            && [&e.gru_left, &e.gru_right]
                .iter()
                .all(|g| g.input_dim() == d_emb && g.hidden_dim() == d_hid)
            && self.head.weights.len() == 2 * d_hid;
        let grus_ok = [&e.gru_left, &e.gru_right].iter().all(|g| {
            let probe = crate::numerics::Matrix::zeros(0, d_emb);
            crate::encoder::gru_forward(g, &probe, &vec![0.0; d_hid]).is_ok()
        });
        if ok && grus_ok {
            Ok(())
        } else {
            Err(Error::Checkpoint("parameter shapes disagree with dims".into()))
        }
    }
}

#[derive(Serialize)]
struct CheckpointRef<'a> {
    format_version: u32,
    dims: Dims,
    vocabulary: &'a LabelVocabulary,
    encoder: &'a SyntacticEncoder,
    head: &'a ProxyHead,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Checkpoint {
    format_version: u32,
    dims: Dims,
    vocabulary: LabelVocabulary,
    encoder: SyntacticEncoder,
    head: ProxyHead,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::{build_vocabulary, parse_tree};

    fn small_model() -> Model {
        let t = parse_tree("(S (NP (DT the) (NN cat)) (VP (VB sat)))").unwrap();
        let v = build_vocabulary([&t]).unwrap();
        Model::new(v, Dims { d_emb: 3, d_hid: 2, d_ph: 2 }, &mut Rng::new(4))
    }

    #[test]
    fn checkpoint_round_trip_is_exact() {
        let m = small_model();
        let json = m.to_json();
        assert!(json.starts_with(r#"{"format_version":1,"#));
        let back = Model::from_json(&json).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_json(), json);
    }

    #[test]
    fn checkpoint_rejects_bad_documents() {
        let json = small_model().to_json();
        let wrong_version = json.replacen("\"format_version\":1", "\"format_version\":2", 1);
        assert!(Model::from_json(&wrong_version).is_err());
        let wrong_dims = json.replacen("\"d_hid\":2", "\"d_hid\":3", 1);
        assert!(Model::from_json(&wrong_dims).is_err());
        assert!(Model::from_json("{}").is_err());
    }
}
