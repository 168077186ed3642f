use std::collections::HashMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Matrix, Rng};

/// What to do with a word the lexicon does not list.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LexiconPolicy {
    /// Unknown words are an error.
    #[default]
    Strict,
    /// Unknown words are spelled out, one phoneme per character.
    Fallback,
}

impl FromStr for LexiconPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(LexiconPolicy::Strict),
            "fallback" => Ok(LexiconPolicy::Fallback),
            other => Err(Error::InvalidArgument(format!("unknown lexicon policy `{other}`"))),
        }
    }
}

/// Word to phoneme-sequence map.
///
/// Text form: one entry per line, `word PH1 PH2 ...`; blank lines and lines
/// starting with `#` are skipped. A repeated word keeps its first entry.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    entries: HashMap<String, Vec<String>>,
    // first-seen order, for a deterministic phoneme inventory
    phoneme_order: Vec<String>,
}

impl Lexicon {
    pub fn insert(&mut self, word: impl Into<String>, phonemes: Vec<String>) -> Result<()> {
        let word = word.into();
        if phonemes.is_empty() {
            return Err(Error::InvalidArgument(format!("word `{word}` has no phonemes")));
        }
        if self.entries.contains_key(&word) {
            return Ok(());
        }
        for p in &phonemes {
            if !self.phoneme_order.contains(p) {
                self.phoneme_order.push(p.clone());
            }
        }
        self.entries.insert(word, phonemes);
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lex = Lexicon::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let word = parts.next().expect("non-empty line");
            let phonemes: Vec<String> = parts.map(str::to_string).collect();
            lex.insert(word, phonemes)
                .map_err(|e| Error::InvalidArgument(format!("lexicon line {}: {e}", n + 1)))?;
        }
        Ok(lex)
    }

    pub fn get(&self, word: &str) -> Option<&[String]> {
        self.entries.get(word).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn phonemes(&self, word: &str, policy: LexiconPolicy) -> Result<Vec<String>> {
        match (self.get(word), policy) {
            (Some(p), _) => Ok(p.to_vec()),
            (None, LexiconPolicy::Fallback) => Ok(word.chars().map(String::from).collect()),
            (None, LexiconPolicy::Strict) => Err(Error::UnknownWord(word.to_string())),
        }
    }
}

/// Phoneme inventory with one embedding row per phoneme.
#[derive(Debug, Clone, PartialEq)]
pub struct PhonemeTable {
    inventory: Vec<String>,
    index: HashMap<String, usize>,
    pub weights: Matrix,
}

impl PhonemeTable {
    pub fn new(inventory: Vec<String>, dim: usize, rng: &mut Rng) -> Self {
        let mut weights = Matrix::zeros(inventory.len(), dim);
        rng.fill_uniform(weights.as_mut_slice(), -crate::encoder::INIT_SCALE, crate::encoder::INIT_SCALE);
        let index = inventory.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        PhonemeTable { inventory, index, weights }
    }

    /// Inventory = lexicon phonemes in first-seen order, then any fallback
    /// graphemes met while spelling `words`.
    pub fn for_words<'a>(
        lexicon: &Lexicon,
        words: impl IntoIterator<Item = &'a str>,
        policy: LexiconPolicy,
        dim: usize,
        rng: &mut Rng,
    ) -> Result<Self> {
        let mut inventory = lexicon.phoneme_order.clone();
        for w in words {
            for p in lexicon.phonemes(w, policy)? {
                if !inventory.contains(&p) {
                    inventory.push(p);
                }
            }
        }
        Ok(Self::new(inventory, dim, rng))
    }

    pub fn dim(&self) -> usize {
        self.weights.cols()
    }

    pub fn inventory(&self) -> &[String] {
        &self.inventory
    }

    pub fn embedding(&self, phoneme: &str) -> Option<&[f64]> {
        self.index.get(phoneme).map(|&i| self.weights.row(i))
    }
}
