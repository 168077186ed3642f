//! Word-to-phoneme upsampling, phoneme embeddings, and a break-prediction
//! proxy task trained jointly with the nuclear-norm term.

mod lexicon;
mod optim;
mod task;
mod train;

pub use lexicon::{Lexicon, LexiconPolicy, PhonemeTable};
pub use optim::{Optimizer, OptimizerKind};
pub use task::{majority_baseline, oracle_breaks, ProxyHead, ProxyTask};
pub use train::{evaluate, train, EpochLog, Metrics, StepLog, TrainConfig, TrainingLog};

use serde::Serialize;

use crate::encoder::SyntacticFeatureSet;
use crate::error::{Error, Result};
use crate::numerics::Matrix;

pub const DEFAULT_PHONEME_DIM: usize = 16;

/// Repeats the feature of word `i` `counts[i]` times, in word order.
pub fn upsample(features: &SyntacticFeatureSet, counts: &[usize]) -> Result<Matrix> {
    if counts.len() != features.word_count() {
        return Err(Error::CountMismatch { expected: features.word_count(), got: counts.len() });
    }
    if let Some(i) = counts.iter().position(|&c| c == 0) {
        return Err(Error::ZeroCount(i));
    }
    let total: usize = counts.iter().sum();
    let mut out = Matrix::zeros(total, features.dim());
    let mut row = 0;
    for (f, &c) in features.per_word.iter().zip(counts) {
        for _ in 0..c {
            out.row_mut(row).copy_from_slice(f);
            row += 1;
        }
    }
    Ok(out)
}

/// Phoneme-aligned input rows: syntactic half then phoneme embedding.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhonemeLevelFeatures {
    pub phonemes: Vec<String>,
    pub rows: Matrix,
}

pub fn make_phoneme_level(
    features: &SyntacticFeatureSet,
    words: &[&str],
    lexicon: &Lexicon,
    phoneme_table: &PhonemeTable,
    policy: LexiconPolicy,
) -> Result<PhonemeLevelFeatures> {
    if words.len() != features.word_count() {
        return Err(Error::CountMismatch { expected: features.word_count(), got: words.len() });
    }
    let mut phonemes = Vec::new();
    let mut counts = Vec::with_capacity(words.len());
    for w in words {
        let p = lexicon.phonemes(w, policy)?;
        counts.push(p.len());
        phonemes.extend(p);
    }
    let syntactic = upsample(features, &counts)?;
    let mut embeddings = Matrix::zeros(phonemes.len(), phoneme_table.dim());
    for (i, p) in phonemes.iter().enumerate() {
        let e = phoneme_table
            .embedding(p)
            .ok_or_else(|| Error::InvalidArgument(format!("phoneme `{p}` missing from table")))?;
        embeddings.row_mut(i).copy_from_slice(e);
    }
    Ok(PhonemeLevelFeatures { phonemes, rows: syntactic.hstack(&embeddings)? })
}
