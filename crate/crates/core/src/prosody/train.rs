use serde::{Deserialize, Serialize};

use super::optim::{Optimizer, OptimizerKind};
use super::task::{majority_baseline, oracle_breaks, ProxyTask};
use crate::error::{Error, Result};
use crate::model::{Dims, Model};
use crate::nml::nuclear_norm;
use crate::numerics::Rng;
use crate::treebank::{build_vocabulary, ConstituentTree};

/// Training hyper-parameters. Missing keys take their defaults; unknown keys
/// are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub lambda: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    pub d_emb: usize,
    pub d_hid: usize,
    pub d_ph: usize,
    pub optimizer: OptimizerKind,
}

impl Default for TrainConfig {
    fn default() -> Self {
        let dims = Dims::default();
        TrainConfig {
            lambda: 0.05,
            learning_rate: 1e-3,
            epochs: 50,
            seed: 42,
            d_emb: dims.d_emb,
            d_hid: dims.d_hid,
            d_ph: dims.d_ph,
            optimizer: OptimizerKind::Adam,
        }
    }
}

impl TrainConfig {
    pub fn dims(&self) -> Dims {
        Dims { d_emb: self.d_emb, d_hid: self.d_hid, d_ph: self.d_ph }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return bad("lambda must be a non-negative number");
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad("learning_rate must be positive");
        }
        if self.d_emb == 0 || self.d_hid == 0 || self.d_ph == 0 {
            return bad("dimensions must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepLog {
    pub task_loss: f64,
    pub nml: f64,
    pub total_loss: f64,
}

/// Means over the epoch's steps, plus the table's nuclear norm at epoch end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpochLog {
    pub epoch: usize,
    pub task_loss: f64,
    pub nml: f64,
    pub total_loss: f64,
    pub nuclear_norm: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TrainingLog {
    pub lambda: f64,
    pub epochs: Vec<EpochLog>,
    #[serde(skip)]
    pub steps: Vec<StepLog>,
}

/// Per-sentence updates on `mean BCE(head(f_i), oracle breaks) + λ · L_nml`.
///
/// The vocabulary comes from the corpus. The seeded generator first
/// initializes the model, then shuffles the sentence order once per epoch.
pub fn train(corpus: &[ConstituentTree], config: &TrainConfig) -> Result<(Model, TrainingLog)> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    config.validate()?;
    let vocabulary = build_vocabulary(corpus)?;
    let mut rng = Rng::new(config.seed);
    let mut model = Model::new(vocabulary, config.dims(), &mut rng);
    let mut optimizer = Optimizer::new(config.optimizer, config.learning_rate, &mut model);
    let tasks: Vec<ProxyTask> = corpus.iter().map(oracle_breaks).collect();
    let mut order: Vec<usize> = (0..corpus.len()).collect();
    let mut log = TrainingLog { lambda: config.lambda, ..Default::default() };

    for epoch in 1..=config.epochs {
        rng.shuffle(&mut order);
        let (mut task_sum, mut nml_sum, mut total_sum) = (0.0, 0.0, 0.0);
        for (step, &i) in order.iter().enumerate() {
            let obj = model.objective(&corpus[i], &tasks[i].labels, config.lambda)?;
            if !obj.total.is_finite() {
                return Err(Error::NonFiniteLoss { epoch, step });
            }
            optimizer.update(&mut model, &obj.grads);
            if !model.is_finite() {
                return Err(Error::NonFiniteLoss { epoch, step });
            }
            task_sum += obj.task_loss;
            nml_sum += obj.nml.loss;
            total_sum += obj.total;
            log.steps.push(StepLog { task_loss: obj.task_loss, nml: obj.nml.loss, total_loss: obj.total });
        }
        let n = corpus.len() as f64;
        log.epochs.push(EpochLog {
            epoch,
            task_loss: task_sum / n,
            nml: nml_sum / n,
            total_loss: total_sum / n,
            nuclear_norm: nuclear_norm(&model.encoder.embedding.weights)?,
        });
    }
    Ok((model, log))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    /// Fraction of words whose break label is predicted correctly.
    pub accuracy: f64,
    /// Mean over sentences of the per-sentence mean task loss.
    pub loss: f64,
    pub majority_baseline: f64,
    pub words: usize,
}

pub fn evaluate(model: &Model, corpus: &[ConstituentTree]) -> Result<Metrics> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let tasks: Vec<ProxyTask> = corpus.iter().map(oracle_breaks).collect();
    let (mut correct, mut words, mut loss) = (0usize, 0usize, 0.0);
    for (tree, task) in corpus.iter().zip(&tasks) {
        let features = model.encode(tree)?;
        loss += model.head.loss(&features, &task.labels)?.loss;
        for (f, &y) in features.per_word.iter().zip(&task.labels) {
            correct += usize::from(model.head.predict(f) == y);
            words += 1;
        }
    }
    Ok(Metrics {
        accuracy: correct as f64 / words as f64,
        loss: loss / corpus.len() as f64,
        majority_baseline: majority_baseline(&tasks),
        words,
    })
}
