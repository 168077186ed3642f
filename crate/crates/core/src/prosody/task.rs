use serde::{Deserialize, Serialize};

use crate::encoder::SyntacticFeatureSet;
use crate::error::{Error, Result};
use crate::numerics::{dot, logistic, softplus, Rng};
use crate::treebank::{ConstituentTree, TreeNode};

/// Per-word break labels: `1` means a prosodic break follows the word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProxyTask {
    pub labels: Vec<u8>,
}

/// A word gets a break when it closes one of the root's children; the last
/// word always does.
pub fn oracle_breaks(tree: &ConstituentTree) -> ProxyTask {
    let w = tree.word_count();
    let mut labels = vec![0; w];
    let root = tree.root();
    if !root.is_preterminal() {
        let mut end = 0;
        for child in root.children() {
            end += child.leaf_count();
            labels[end - 1] = 1;
        }
    }
    labels[w - 1] = 1;
    debug_assert!(matches!(root, TreeNode::Internal { .. }));
    ProxyTask { labels }
}

/// Accuracy of always predicting the more frequent label.
pub fn majority_baseline(tasks: &[ProxyTask]) -> f64 {
    let total: usize = tasks.iter().map(|t| t.labels.len()).sum();
    let ones: usize = tasks.iter().map(|t| t.labels.iter().filter(|&&y| y == 1).count()).sum();
    ones.max(total - ones) as f64 / total as f64
}

/// Logistic regression on `f_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProxyHead {
    pub weights: Vec<f64>,
    pub bias: f64,
}

#[derive(Debug, Clone)]
pub struct HeadOutput {
    pub loss: f64,
    pub grad_features: Vec<Vec<f64>>,
    pub grad_head: ProxyHead,
}

impl ProxyHead {
    pub fn zeros(dim: usize) -> Self {
        ProxyHead { weights: vec![0.0; dim], bias: 0.0 }
    }

    pub fn random(dim: usize, scale: f64, rng: &mut Rng) -> Self {
        let mut weights = vec![0.0; dim];
        rng.fill_uniform(&mut weights, -scale, scale);
        ProxyHead { weights, bias: 0.0 }
    }

    pub fn logit(&self, feature: &[f64]) -> f64 {
        dot(&self.weights, feature) + self.bias
    }

    /// Break iff probability strictly exceeds one half.
    pub fn predict(&self, feature: &[f64]) -> u8 {
        u8::from(logistic(self.logit(feature)) > 0.5)
    }

    /// Mean per-word binary cross-entropy and its gradients.
    pub fn loss(&self, features: &SyntacticFeatureSet, labels: &[u8]) -> Result<HeadOutput> {
        let w = features.word_count();
        if labels.len() != w || w == 0 {
            return Err(Error::CountMismatch { expected: w, got: labels.len() });
        }
        let inv = 1.0 / w as f64;
        let mut loss = 0.0;
        let mut grad_features = Vec::with_capacity(w);
        let mut grad_head = ProxyHead::zeros(self.weights.len());
        for (f, &y) in features.per_word.iter().zip(labels) {
            let z = self.logit(f);
            let y = f64::from(y);
            loss += softplus(z) - y * z;
            let dz = (logistic(z) - y) * inv;
            grad_features.push(self.weights.iter().map(|wk| dz * wk).collect());
            crate::numerics::axpy(dz, f, &mut grad_head.weights);
            grad_head.bias += dz;
        }
        Ok(HeadOutput { loss: loss * inv, grad_features, grad_head })
    }

    pub fn add_scaled(&mut self, c: f64, other: &ProxyHead) {
        crate::numerics::axpy(c, &other.weights, &mut self.weights);
        self.bias += c * other.bias;
    }

    pub fn is_finite(&self) -> bool {
        self.bias.is_finite() && self.weights.iter().all(|x| x.is_finite())
    }
}
