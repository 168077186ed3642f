//! Exhaustive enumeration of small trees and collision counts for the
//! left-first sequence alone versus the left/right pair.
//!
//! Keys include word positions: two trees look the same to the encoder only
//! if both label sequences and all word anchors agree.

use std::collections::HashMap;
use std::hash::Hash;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linearizer::{linearize_pair, Linearization, LinearizationPair};
use crate::treebank::{ConstituentTree, LabelVocabulary, TreeNode};

pub const MAX_WORDS: usize = 6;
pub const MAX_CHILDREN: usize = 3;
pub const MAX_LABELS: usize = 3;
pub const MAX_UNARY_CHAIN: usize = 3;
pub const MAX_TREES: u128 = 1_000_000;

/// The family of trees to enumerate.
///
/// Every tree spans exactly `words` leaves `w1..wk`, each under the
/// `preterminal` label. Above that, nodes take labels from `labels`; a
/// branching node has between 2 and `max_children` children, and at most
/// `max_unary_chain` non-preterminal unary nodes stack directly on any node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationSpec {
    pub words: usize,
    pub max_children: usize,
    pub labels: Vec<String>,
    pub preterminal: String,
    pub max_unary_chain: usize,
}

impl EnumerationSpec {
    pub fn new(words: usize, labels: &[&str], max_children: usize) -> Self {
        EnumerationSpec {
            words,
            max_children,
            labels: labels.iter().map(|s| s.to_string()).collect(),
            preterminal: "P".into(),
            max_unary_chain: 1,
        }
    }

    pub fn with_unary_chain(mut self, n: usize) -> Self {
        self.max_unary_chain = n;
        self
    }

    /// Exact size of the family.
    pub fn tree_count(&self) -> u128 {
        let l = self.labels.len() as u128;
        let chain: u128 = (0..=self.max_unary_chain as u32).map(|u| l.saturating_pow(u)).sum();
        // any[n]: trees over n words; branch[n]: those rooted at a branching node or preterminal
        let mut any = vec![0u128; self.words + 1];
        for n in 1..=self.words {
            let branch = if n == 1 {
                1
            } else {
                l.saturating_mul(compositions(n, self.max_children, &any))
            };
            any[n] = branch.saturating_mul(chain);
        }
        any[self.words]
    }

    fn validate(&self) -> Result<()> {
        let too_large = |m: String| Err(Error::SearchSpaceTooLarge(m));
        if self.words == 0 || self.words > MAX_WORDS {
            return too_large(format!("words must be in 1..={MAX_WORDS}, got {}", self.words));
        }
        if self.max_children < 2 || self.max_children > MAX_CHILDREN {
            return too_large(format!("max_children must be in 2..={MAX_CHILDREN}"));
        }
        if self.labels.is_empty() || self.labels.len() > MAX_LABELS {
            return too_large(format!("between 1 and {MAX_LABELS} labels required"));
        }
        if self.max_unary_chain > MAX_UNARY_CHAIN {
            return too_large(format!("max_unary_chain must be at most {MAX_UNARY_CHAIN}"));
        }
        let mut all = self.labels.clone();
        all.push(self.preterminal.clone());
        let vocab = LabelVocabulary::from_labels(all.iter().cloned());
        if vocab.len() != all.len() {
            return Err(Error::InvalidArgument("labels and preterminal must be distinct".into()));
        }
        let count = self.tree_count();
        if count > MAX_TREES {
            return too_large(format!("{count} trees exceed the limit of {MAX_TREES}"));
        }
        Ok(())
    }

    /// Vocabulary of the family: the labels, then the preterminal.
    pub fn vocabulary(&self) -> LabelVocabulary {
        LabelVocabulary::from_labels(self.labels.iter().cloned().chain([self.preterminal.clone()]))
    }
}

// Σ over splits of n into 2..=max_parts positive parts of Π any[part].
fn compositions(n: usize, max_parts: usize, any: &[u128]) -> u128 {
    fn go(rest: usize, parts_left: usize, placed: usize, any: &[u128]) -> u128 {
        if rest == 0 {
            return u128::from(placed >= 2);
        }
        if parts_left == 0 {
            return 0;
        }
        (1..=rest)
            .map(|first| any[first].saturating_mul(go(rest - first, parts_left - 1, placed + 1, any)))
            .fold(0u128, u128::saturating_add)
    }
    go(n, max_parts, 0, any)
}

struct Enumerator<'s> {
    spec: &'s EnumerationSpec,
    memo: HashMap<(usize, usize), Vec<TreeNode>>,
}

impl Enumerator<'_> {
    /// All trees over words `[start, end)`.
    fn any(&mut self, start: usize, end: usize) -> Vec<TreeNode> {
        if let Some(v) = self.memo.get(&(start, end)) {
            return v.clone();
        }
        let mut layer = self.branch(start, end);
        let mut out = layer.clone();
        for _ in 0..self.spec.max_unary_chain {
            layer = layer
                .iter()
                .flat_map(|t| {
                    self.spec.labels.iter().map(move |l| TreeNode::internal(l.clone(), vec![t.clone()]))
                })
                .collect();
            out.extend(layer.iter().cloned());
        }
        self.memo.insert((start, end), out.clone());
        out
    }

    fn branch(&mut self, start: usize, end: usize) -> Vec<TreeNode> {
        if end - start == 1 {
            return vec![TreeNode::preterminal(self.spec.preterminal.clone(), format!("w{}", start + 1))];
        }
        let mut child_lists = Vec::new();
        self.splits(start, end, 0, &mut Vec::new(), &mut child_lists);
        let mut out = Vec::new();
        for label in self.spec.labels.clone() {
            for children in &child_lists {
                out.push(TreeNode::internal(label.clone(), children.clone()));
            }
        }
        out
    }

    // Cartesian products of child trees over every split of [start, end).
    fn splits(
        &mut self,
        start: usize,
        end: usize,
        placed: usize,
        prefix: &mut Vec<TreeNode>,
        out: &mut Vec<Vec<TreeNode>>,
    ) {
        if start == end {
            if placed >= 2 {
                out.push(prefix.clone());
            }
            return;
        }
        if placed == self.spec.max_children {
            return;
        }
        for cut in start + 1..=end {
            if placed == 0 && cut == end {
                continue;
            }
            for child in self.any(start, cut) {
                prefix.push(child);
                self.splits(cut, end, placed + 1, prefix, out);
                prefix.pop();
            }
        }
    }
}

/// Every tree in the family, in a fixed order, without duplicates.
pub fn enumerate_trees(spec: &EnumerationSpec) -> Result<Vec<ConstituentTree>> {
    spec.validate()?;
    let mut e = Enumerator { spec, memo: HashMap::new() };
    e.any(0, spec.words).into_iter().map(ConstituentTree::new).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CollisionReport {
    pub tree_count: usize,
    pub distinct_left_sequences: usize,
    pub distinct_pairs: usize,
    /// Left-sequence classes holding two or more trees.
    pub left_collision_classes: usize,
    pub pair_collision_classes: usize,
}

fn classes<K: Hash + Eq>(keys: impl Iterator<Item = K>) -> (usize, usize) {
    let mut sizes: HashMap<K, usize> = HashMap::new();
    for k in keys {
        *sizes.entry(k).or_default() += 1;
    }
    (sizes.len(), sizes.values().filter(|&&n| n >= 2).count())
}

/// Left-first and pair keys for every tree.
pub fn keys(
    trees: &[ConstituentTree],
    vocab: &LabelVocabulary,
) -> Result<(Vec<Linearization>, Vec<LinearizationPair>)> {
    let pairs = trees.iter().map(|t| linearize_pair(t, vocab)).collect::<Result<Vec<_>>>()?;
    let lefts = pairs.iter().map(|p| p.left.clone()).collect();
    Ok((lefts, pairs))
}

pub fn collision_report(trees: &[ConstituentTree], vocab: &LabelVocabulary) -> Result<CollisionReport> {
    if trees.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let (lefts, pairs) = keys(trees, vocab)?;
    let (distinct_left_sequences, left_collision_classes) = classes(lefts.iter());
    let (distinct_pairs, pair_collision_classes) = classes(pairs.iter());
    Ok(CollisionReport {
        tree_count: trees.len(),
        distinct_left_sequences,
        distinct_pairs,
        left_collision_classes,
        pair_collision_classes,
    })
}

/// `(A (B (P w1) (P w2)))` and `(A (B (P w1)) (P w2))`: the same left-first
/// walk `A B P P` with anchors `[2, 3]`, but right-first walks `A B P P`
/// with anchors `[3, 2]` and `A P B P` with anchors `[3, 1]`.
pub fn witness_trees() -> [ConstituentTree; 2] {
    let p = |w: &str| TreeNode::preterminal("P", w);
    let t1 = TreeNode::internal("A", vec![TreeNode::internal("B", vec![p("w1"), p("w2")])]);
    let t2 = TreeNode::internal("A", vec![TreeNode::internal("B", vec![p("w1")]), p("w2")]);
    [t1, t2].map(|t| ConstituentTree::new(t).expect("well-formed witness"))
}

/// First two trees (in input order) that share a left-first key but differ
/// under the pair key.
pub fn separated_witness(
    trees: &[ConstituentTree],
    vocab: &LabelVocabulary,
) -> Result<Option<(usize, usize)>> {
    let (lefts, pairs) = keys(trees, vocab)?;
    let mut first_by_left: HashMap<&Linearization, usize> = HashMap::new();
    for (i, l) in lefts.iter().enumerate() {
        match first_by_left.get(l) {
            Some(&j) if pairs[j] != pairs[i] => return Ok(Some((j, i))),
            Some(_) => {}
            None => {
                first_by_left.insert(l, i);
            }
        }
    }
    Ok(None)
}

/// First two trees that share the pair key.
pub fn pair_witness(trees: &[ConstituentTree], vocab: &LabelVocabulary) -> Result<Option<(usize, usize)>> {
    let (_, pairs) = keys(trees, vocab)?;
    let mut first: HashMap<&LinearizationPair, usize> = HashMap::new();
    for (i, p) in pairs.iter().enumerate() {
        if let Some(&j) = first.get(p) {
            return Ok(Some((j, i)));
        }
        first.insert(p, i);
    }
    Ok(None)
}

/// Whether every pair class lies inside one left-first class.
pub fn pair_refines_left(trees: &[ConstituentTree], vocab: &LabelVocabulary) -> Result<bool> {
    let (lefts, pairs) = keys(trees, vocab)?;
    let mut left_of_pair: HashMap<&LinearizationPair, &Linearization> = HashMap::new();
    for (l, p) in lefts.iter().zip(&pairs) {
        if *left_of_pair.entry(p).or_insert(l) != l {
            return Ok(false);
        }
    }
    Ok(true)
}
