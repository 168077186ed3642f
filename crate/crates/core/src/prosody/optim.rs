use serde::{Deserialize, Serialize};

use crate::model::{Model, ModelGradients};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    /// Adam with β₁ = 0.9, β₂ = 0.999, ε = 1e-8.
    #[default]
    Adam,
    Sgd,
}

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const EPSILON: f64 = 1e-8;

/// Fixed-learning-rate update rule over the model's parameter blocks.
#[derive(Debug, Clone)]
pub struct Optimizer {
    kind: OptimizerKind,
    learning_rate: f64,
    step: i32,
    first: Vec<Vec<f64>>,
    second: Vec<Vec<f64>>,
}

impl Optimizer {
    pub fn new(kind: OptimizerKind, learning_rate: f64, model: &mut Model) -> Self {
        let shapes: Vec<usize> = model.blocks_mut().iter().map(|b| b.len()).collect();
        let zeros = || shapes.iter().map(|&n| vec![0.0; n]).collect();
        Optimizer { kind, learning_rate, step: 0, first: zeros(), second: zeros() }
    }

    pub fn update(&mut self, model: &mut Model, grads: &ModelGradients) {
        match self.kind {
            OptimizerKind::Sgd => model.apply(-self.learning_rate, grads),
            OptimizerKind::Adam => {
                self.step = self.step.saturating_add(1);
                let c1 = 1.0 - BETA1.powi(self.step);
                let c2 = 1.0 - BETA2.powi(self.step);
                let lr = self.learning_rate;
                for (((p, g), m), v) in model
                    .blocks_mut()
                    .into_iter()
                    .zip(grads.blocks())
                    .zip(&mut self.first)
                    .zip(&mut self.second)
                {
                    for k in 0..p.len() {
                        m[k] = BETA1 * m[k] + (1.0 - BETA1) * g[k];
                        v[k] = BETA2 * v[k] + (1.0 - BETA2) * g[k] * g[k];
                        p[k] -= lr * (m[k] / c1) / ((v[k] / c2).sqrt() + EPSILON);
                    }
                }
            }
        }
    }
}
