//! Syntactic representations of constituency trees for prosody modelling.
//!
//! A parse tree is linearized twice, by left-first and right-first pre-order
//! walks. A shared label embedding feeds one GRU per walk, and each word's
//! feature concatenates the two GRU states at the word's preterminal. A
//! nuclear-norm term over the whole embedding table keeps label embeddings
//! spread out. Word features are upsampled to phoneme rate and joined with
//! phoneme embeddings for a downstream acoustic model; here a break-prediction
//! head stands in for that model during training.
//!
//! ```
//! use syntrav::treebank::{build_vocabulary, parse_tree};
//! use syntrav::linearizer::linearize_pair;
//!
//! let tree = parse_tree("(S (NP (DT the) (NN cat)) (VP (VB sat)))").unwrap();
//! let vocab = build_vocabulary([&tree]).unwrap();
//! let pair = linearize_pair(&tree, &vocab).unwrap();
//! assert_eq!(pair.left.word_positions, [2, 3, 5]);
//! assert_eq!(pair.right.word_positions, [5, 4, 2]);
//! ```
//!
//! The guide under `book/` walks through each stage; its code listings are
//! compiled and run as doc-tests of this crate.

pub mod ambiguity;
pub mod corpus;
pub mod encoder;
mod error;
pub mod linearizer;
pub mod model;
pub mod nml;
pub mod numerics;
pub mod prosody;
pub mod treebank;

pub use error::{Error, ParseErrorKind, Result};
pub use model::{Dims, Model};

macro_rules! book_chapters {
    ($($name:ident => $file:literal),* $(,)?) => {$(
        #[cfg(doctest)]
        #[doc = include_str!(concat!("../../../book/src/", $file))]
        pub mod $name {}
    )*};
}

book_chapters! {
    book_introduction => "introduction.md",
    book_trees => "trees.md",
    book_linearization => "linearization.md",
    book_encoder => "encoder.md",
    book_nml => "nml.md",
    book_prosody => "prosody.md",
    book_ambiguity => "ambiguity.md",
    book_cli => "cli.md",
}
