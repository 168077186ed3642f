//! Left-first and right-first pre-order linearization of constituency trees.
//!
//! Each internal node emits its label id once, on entry. Words emit nothing;
//! a word is anchored at the position where its preterminal was emitted.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::treebank::{ConstituentTree, LabelId, LabelVocabulary, TreeNode};

/// One traversal's label sequence plus each word's anchor position in it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Linearization {
    pub label_ids: Vec<LabelId>,
    /// `word_positions[i]` indexes the preterminal of word `i` in `label_ids`.
    pub word_positions: Vec<usize>,
}

impl Linearization {
    pub fn len(&self) -> usize {
        self.label_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.label_ids.is_empty()
    }

    pub fn word_count(&self) -> usize {
        self.word_positions.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct LinearizationPair {
    pub left: Linearization,
    pub right: Linearization,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Order {
    LeftFirst,
    RightFirst,
}

struct Walk<'v> {
    vocab: &'v LabelVocabulary,
    label_ids: Vec<LabelId>,
    // anchors in visit order; right-first visits words last-to-first
    anchors: Vec<usize>,
}

impl Walk<'_> {
    fn visit(&mut self, node: &TreeNode, order: Order) -> Result<()> {
        let TreeNode::Internal { label, children } = node else {
            return Ok(());
        };
        let id = self
            .vocab
            .id(label)
            .ok_or_else(|| Error::UnknownLabel(label.clone()))?;
        if node.is_preterminal() {
            self.anchors.push(self.label_ids.len());
        }
        self.label_ids.push(id);
        match order {
            Order::LeftFirst => children.iter().try_for_each(|c| self.visit(c, order)),
            Order::RightFirst => children.iter().rev().try_for_each(|c| self.visit(c, order)),
        }
    }
}

fn linearize(tree: &ConstituentTree, vocab: &LabelVocabulary, order: Order) -> Result<Linearization> {
    let mut walk = Walk {
        vocab,
        label_ids: Vec::with_capacity(tree.internal_count()),
        anchors: Vec::with_capacity(tree.word_count()),
    };
    walk.visit(tree.root(), order)?;
    if order == Order::RightFirst {
        walk.anchors.reverse();
    }
    Ok(Linearization { label_ids: walk.label_ids, word_positions: walk.anchors })
}

/// Pre-order walk visiting children left to right.
pub fn linearize_left(tree: &ConstituentTree, vocab: &LabelVocabulary) -> Result<Linearization> {
    linearize(tree, vocab, Order::LeftFirst)
}

/// Pre-order walk visiting children right to left. Word positions are still
/// indexed by left-to-right word order.
pub fn linearize_right(tree: &ConstituentTree, vocab: &LabelVocabulary) -> Result<Linearization> {
    linearize(tree, vocab, Order::RightFirst)
}

pub fn linearize_pair(tree: &ConstituentTree, vocab: &LabelVocabulary) -> Result<LinearizationPair> {
    let left = linearize_left(tree, vocab)?;
    let right = linearize_right(tree, vocab)?;
    debug_assert_eq!(left.len(), right.len());
    debug_assert_eq!(left.word_count(), right.word_count());
    debug_assert!({
        let mut a = left.label_ids.clone();
        let mut b = right.label_ids.clone();
        a.sort();
        b.sort();
        a == b
    });
    Ok(LinearizationPair { left, right })
}
