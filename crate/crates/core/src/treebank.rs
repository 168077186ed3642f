//! Bracketed constituency trees: parsing, validation, normalization and
//! canonical serialization.
//!
//! Accepted input is a single bracketed expression such as
//! `(S (NP (DT the) (NN cat)) (VP (VB sat)))`. Internal-node labels use the
//! alphabet `A-Z 0-9 - $`; words are any token free of whitespace and
//! parentheses. A word that sits directly under a branching node gets a
//! synthetic [`FILLER_PRETERMINAL`] parent so every word owns exactly one
//! preterminal.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseErrorKind, Result};

/// Label inserted above words that lack a unary preterminal.
pub const FILLER_PRETERMINAL: &str = "XX";

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TreeNode {
    Internal { label: String, children: Vec<TreeNode> },
    Leaf { word: String },
}

impl TreeNode {
    pub fn internal(label: impl Into<String>, children: Vec<TreeNode>) -> Self {
        TreeNode::Internal { label: label.into(), children }
    }

    pub fn leaf(word: impl Into<String>) -> Self {
        TreeNode::Leaf { word: word.into() }
    }

    /// `(label word)`.
    pub fn preterminal(label: impl Into<String>, word: impl Into<String>) -> Self {
        TreeNode::internal(label, vec![TreeNode::leaf(word)])
    }

    pub fn label(&self) -> Option<&str> {
        match self {
            TreeNode::Internal { label, .. } => Some(label),
            TreeNode::Leaf { .. } => None,
        }
    }

    pub fn children(&self) -> &[TreeNode] {
        match self {
            TreeNode::Internal { children, .. } => children,
            TreeNode::Leaf { .. } => &[],
        }
    }

    /// True for an internal node whose only child is a leaf.
    pub fn is_preterminal(&self) -> bool {
        matches!(self, TreeNode::Internal { children, .. }
            if children.len() == 1 && matches!(children[0], TreeNode::Leaf { .. }))
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Internal { children, .. } => children.iter().map(TreeNode::leaf_count).sum(),
        }
    }

    pub fn internal_count(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Internal { children, .. } => {
                1 + children.iter().map(TreeNode::internal_count).sum::<usize>()
            }
        }
    }

    fn collect_words<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            TreeNode::Leaf { word } => out.push(word),
            TreeNode::Internal { children, .. } => {
                children.iter().for_each(|c| c.collect_words(out))
            }
        }
    }

    fn write_bracketed(&self, out: &mut String) {
        match self {
            TreeNode::Leaf { word } => out.push_str(word),
            TreeNode::Internal { label, children } => {
                out.push('(');
                out.push_str(label);
                for child in children {
                    out.push(' ');
                    child.write_bracketed(out);
                }
                out.push(')');
            }
        }
    }

    fn mirrored(&self) -> TreeNode {
        match self {
            TreeNode::Leaf { .. } => self.clone(),
            TreeNode::Internal { label, children } => TreeNode::Internal {
                label: label.clone(),
                children: children.iter().rev().map(TreeNode::mirrored).collect(),
            },
        }
    }

    fn check(&self, is_root: bool) -> Result<()> {
        match self {
            TreeNode::Leaf { .. } if is_root => Err(ParseErrorKind::MissingLabel.into()),
            TreeNode::Leaf { .. } => Ok(()),
            TreeNode::Internal { label, children } => {
                validate_label(label)?;
                if children.is_empty() {
                    return Err(ParseErrorKind::EmptyNode.into());
                }
                if children.len() > 1
                    && children.iter().any(|c| matches!(c, TreeNode::Leaf { .. }))
                {
                    return Err(Error::InvalidArgument(format!(
                        "word directly under branching node `{label}`"
                    )));
                }
                children.iter().try_for_each(|c| c.check(false))
            }
        }
    }
}

/// A validated constituency tree. Every word sits under a unary preterminal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConstituentTree {
    root: TreeNode,
}

impl ConstituentTree {
    /// Validates `root` without normalizing it.
    pub fn new(root: TreeNode) -> Result<Self> {
        root.check(true)?;
        Ok(ConstituentTree { root })
    }

    pub fn root(&self) -> &TreeNode {
        &self.root
    }

    pub fn word_count(&self) -> usize {
        self.root.leaf_count()
    }

    pub fn internal_count(&self) -> usize {
        self.root.internal_count()
    }

    /// Words in left-to-right order.
    pub fn words(&self) -> Vec<&str> {
        let mut out = Vec::with_capacity(self.word_count());
        self.root.collect_words(&mut out);
        out
    }

    /// The same tree with the children of every node reversed.
    pub fn mirrored(&self) -> ConstituentTree {
        ConstituentTree { root: self.root.mirrored() }
    }
}

impl fmt::Display for ConstituentTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_tree(self))
    }
}

impl std::str::FromStr for ConstituentTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_tree(s)
    }
}

fn validate_label(label: &str) -> Result<()> {
    if label.is_empty() {
        return Err(ParseErrorKind::MissingLabel.into());
    }
    if !label
        .chars()
        .all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '-' || c == '$')
    {
        return Err(ParseErrorKind::InvalidLabel(label.to_string()).into());
    }
    Ok(())
}

#[derive(Debug, PartialEq)]
enum Token<'a> {
    Open,
    Close,
    Atom(&'a str),
}

fn tokenize(text: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        if c == '(' || c == ')' || c.is_whitespace() {
            if let Some(s) = start.take() {
                tokens.push(Token::Atom(&text[s..i]));
            }
            match c {
                '(' => tokens.push(Token::Open),
                ')' => tokens.push(Token::Close),
                _ => {}
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        tokens.push(Token::Atom(&text[s..]));
    }
    tokens
}

struct Parser<'a> {
    tokens: Vec<Token<'a>>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn next(&mut self) -> Option<&Token<'a>> {
        let t = self.tokens.get(self.pos);
        self.pos += 1;
        t
    }

    fn peek(&self) -> Option<&Token<'a>> {
        self.tokens.get(self.pos)
    }

    /// Parses a node whose opening bracket has already been consumed.
    fn node(&mut self) -> Result<TreeNode> {
        let label = match self.next() {
            None => return Err(ParseErrorKind::UnbalancedBrackets.into()),
            Some(Token::Close) => return Err(ParseErrorKind::EmptyNode.into()),
            Some(Token::Open) => return Err(ParseErrorKind::MissingLabel.into()),
            Some(Token::Atom(a)) => a.to_string(),
        };
        validate_label(&label)?;
        let mut children = Vec::new();
        loop {
            match self.next() {
                None => return Err(ParseErrorKind::UnbalancedBrackets.into()),
                Some(Token::Close) => break,
                Some(Token::Open) => children.push(self.node()?),
                Some(Token::Atom(w)) => children.push(TreeNode::leaf(*w)),
            }
        }
        if children.is_empty() {
            return Err(ParseErrorKind::EmptyNode.into());
        }
        if children.len() > 1 {
            for child in &mut children {
                if let TreeNode::Leaf { word } = child {
                    *child = TreeNode::preterminal(FILLER_PRETERMINAL, std::mem::take(word));
                }
            }
        }
        Ok(TreeNode::Internal { label, children })
    }
}

/// Parses and normalizes one bracketed tree.
pub fn parse_tree(text: &str) -> Result<ConstituentTree> {
    let tokens = tokenize(text);
    if tokens.is_empty() {
        return Err(ParseErrorKind::EmptyInput.into());
    }
    let opens = tokens.iter().filter(|t| **t == Token::Open).count();
    let closes = tokens.iter().filter(|t| **t == Token::Close).count();
    if opens != closes {
        return Err(ParseErrorKind::UnbalancedBrackets.into());
    }
    let mut parser = Parser { tokens, pos: 0 };
    let root = match parser.next() {
        Some(Token::Open) => parser.node()?,
        Some(Token::Close) => return Err(ParseErrorKind::UnbalancedBrackets.into()),
        Some(Token::Atom(a)) => return Err(ParseErrorKind::UnexpectedToken(a.to_string()).into()),
        None => unreachable!(),
    };
    if parser.peek().is_some() {
        return Err(ParseErrorKind::TrailingInput.into());
    }
    ConstituentTree::new(root)
}

/// Canonical single-line bracketed form.
pub fn serialize_tree(tree: &ConstituentTree) -> String {
    let mut out = String::new();
    tree.root.write_bracketed(&mut out);
    out
}

/// Parses a tree file: one tree per line, blank lines and `#` comments ignored.
/// Errors carry the 1-based line number.
pub fn parse_tree_file(text: &str) -> std::result::Result<Vec<ConstituentTree>, (usize, Error)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|(i, l)| parse_tree(l).map_err(|e| (i + 1, e)))
        .collect()
}

/// Dense 0-based id of a constituent label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LabelId(pub usize);

/// Insertion-ordered bijection between labels and [`LabelId`]s.
#[derive(Debug, Clone, Default)]
pub struct LabelVocabulary {
    labels: Vec<String>,
    index: HashMap<String, LabelId>,
}

impl PartialEq for LabelVocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
    }
}

impl LabelVocabulary {
    pub fn from_labels<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vocab = LabelVocabulary::default();
        for l in labels {
            vocab.insert(l.into());
        }
        vocab
    }

    /// Returns the existing id when the label is already present.
    pub fn insert(&mut self, label: String) -> LabelId {
        if let Some(&id) = self.index.get(&label) {
            return id;
        }
        let id = LabelId(self.labels.len());
        self.index.insert(label.clone(), id);
        self.labels.push(label);
        id
    }

    pub fn id(&self, label: &str) -> Option<LabelId> {
        self.index.get(label).copied()
    }

    pub fn label(&self, id: LabelId) -> Option<&str> {
        self.labels.get(id.0).map(String::as_str)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    fn add_tree(&mut self, node: &TreeNode) {
        if let TreeNode::Internal { label, children } = node {
            if !self.index.contains_key(label) {
                self.insert(label.clone());
            }
            children.iter().for_each(|c| self.add_tree(c));
        }
    }
}

impl Serialize for LabelVocabulary {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.labels.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LabelVocabulary {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let labels = Vec::<String>::deserialize(d)?;
        let vocab = LabelVocabulary::from_labels(labels.iter().cloned());
        if vocab.len() != labels.len() {
            return Err(serde::de::Error::custom("duplicate label in vocabulary"));
        }
        Ok(vocab)
    }
}

/// Collects every internal-node label in pre-order, first occurrence wins.
pub fn build_vocabulary<'a, I>(trees: I) -> Result<LabelVocabulary>
where
    I: IntoIterator<Item = &'a ConstituentTree>,
{
    let mut vocab = LabelVocabulary::default();
    let mut seen_any = false;
    for tree in trees {
        seen_any = true;
        vocab.add_tree(&tree.root);
    }
    if !seen_any {
        return Err(Error::EmptyCorpus);
    }
    Ok(vocab)
}
