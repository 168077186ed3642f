//! Seeded synthetic treebank for training and testing.
//!
//! Trees come from a small phrase-structure grammar over twelve labels
//! (`S NP VP PP ADJP ADVP DT NN VB JJ IN RB`) and are rejection-sampled to
//! the requested word-count range.

use crate::error::{Error, Result};
use crate::numerics::Rng;
use crate::treebank::{ConstituentTree, TreeNode};

pub const SYNTHETIC_LABELS: [&str; 12] =
    ["S", "NP", "VP", "PP", "ADJP", "ADVP", "DT", "NN", "VB", "JJ", "IN", "RB"];

const WORDS: [(&str, &[&str]); 6] = [
    ("DT", &["the", "a", "this"]),
    ("NN", &["cat", "dog", "swan", "goose", "lake", "day", "bird", "song"]),
    ("VB", &["sat", "swims", "sees", "likes", "sings"]),
    ("JJ", &["white", "big", "small", "quiet"]),
    ("IN", &["on", "in", "during", "with"]),
    ("RB", &["very", "now", "slowly"]),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusSpec {
    pub sentences: usize,
    pub min_words: usize,
    pub max_words: usize,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec { sentences: 200, min_words: 2, max_words: 8 }
    }
}

struct Grammar<'r> {
    rng: &'r mut Rng,
}

impl Grammar<'_> {
    fn word(&mut self, pos: &'static str) -> TreeNode {
        let list = WORDS.iter().find(|(p, _)| *p == pos).expect("known POS").1;
        let w = list[self.rng.below(list.len())];
        TreeNode::preterminal(pos, w)
    }

    fn pick(&mut self, weights: &[f64]) -> usize {
        let total: f64 = weights.iter().sum();
        let mut x = self.rng.uniform(0.0, total);
        for (i, w) in weights.iter().enumerate() {
            if x < *w {
                return i;
            }
            x -= w;
        }
        weights.len() - 1
    }

    fn sentence(&mut self) -> TreeNode {
        let children = match self.pick(&[5.0, 1.0, 1.0, 1.0]) {
            0 => vec![self.np(0), self.vp(0)],
            1 => vec![self.np(0), self.vp(0), self.advp()],
            2 => vec![self.advp(), self.np(0), self.vp(0)],
            _ => vec![self.pp(1), self.np(0), self.vp(0)],
        };
        TreeNode::internal("S", children)
    }

    fn np(&mut self, depth: usize) -> TreeNode {
        let recurse = if depth < 2 { 1.0 } else { 0.0 };
        let children = match self.pick(&[2.0, 3.0, 1.5, 1.0, 1.0 * recurse, 0.5]) {
            0 => vec![self.word("NN")],
            1 => vec![self.word("DT"), self.word("NN")],
            2 => vec![self.word("DT"), self.word("JJ"), self.word("NN")],
            3 => vec![self.word("JJ"), self.word("NN")],
            4 => vec![self.np(depth + 1), self.pp(depth + 1)],
            _ => vec![self.word("DT"), self.adjp(), self.word("NN")],
        };
        TreeNode::internal("NP", children)
    }

    fn vp(&mut self, depth: usize) -> TreeNode {
        let children = match self.pick(&[2.0, 3.0, 2.0, 1.0, 0.5]) {
            0 => vec![self.word("VB")],
            1 => vec![self.word("VB"), self.np(depth + 1)],
            2 => vec![self.word("VB"), self.pp(depth + 1)],
            3 => vec![self.word("VB"), self.np(depth + 1), self.pp(depth + 1)],
            _ => vec![self.advp(), self.word("VB"), self.np(depth + 1)],
        };
        TreeNode::internal("VP", children)
    }

    fn pp(&mut self, depth: usize) -> TreeNode {
        TreeNode::internal("PP", vec![self.word("IN"), self.np(depth + 1)])
    }

    fn adjp(&mut self) -> TreeNode {
        if self.rng.bernoulli(0.5) {
            TreeNode::internal("ADJP", vec![self.word("RB"), self.word("JJ")])
        } else {
            TreeNode::internal("ADJP", vec![self.word("JJ")])
        }
    }

    fn advp(&mut self) -> TreeNode {
        TreeNode::internal("ADVP", vec![self.word("RB")])
    }
}

/// Draws `spec.sentences` trees whose word counts lie in
/// `[min_words, max_words]`.
pub fn synthetic_corpus(spec: &CorpusSpec, rng: &mut Rng) -> Result<Vec<ConstituentTree>> {
    if spec.min_words < 2 || spec.min_words > spec.max_words {
        return Err(Error::InvalidArgument(format!(
            "word range [{}, {}] unsupported by the grammar",
            spec.min_words, spec.max_words
        )));
    }
    let mut grammar = Grammar { rng };
    let mut out = Vec::with_capacity(spec.sentences);
    let mut attempts = 0usize;
    while out.len() < spec.sentences {
        attempts += 1;
        if attempts > 1000 * (spec.sentences + 1) {
            return Err(Error::InvalidArgument("word range too narrow for the grammar".into()));
        }
        let root = grammar.sentence();
        let w = root.leaf_count();
        if (spec.min_words..=spec.max_words).contains(&w) {
            out.push(ConstituentTree::new(root)?);
        }
    }
    Ok(out)
}
