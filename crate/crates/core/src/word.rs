//! Corepresentation labels: words over the fundamental letter `a` and its
//! conjugate `b`. Labels of `A_o` only use `a`, so a level `k` is the word `a^k`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which universal quantum group a realization describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// `A_o(F)`: one self-conjugate fundamental object
    Ao,
    /// `A_u(F)`: fundamental object `a` and its conjugate `b`
    Au,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Ao => "ao",
            Variant::Au => "au",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "ao" => Ok(Variant::Ao),
            "au" => Ok(Variant::Au),
            _ => Err(Error::InvalidInput(format!("unknown variant {s:?}"))),
        }
    }

    /// Whether adjacent letters `(x, y)` can be joined by a cup.
    pub fn pairable(self, x: Letter, y: Letter) -> bool {
        match self {
            Variant::Ao => x == Letter::A && y == Letter::A,
            Variant::Au => x != y,
        }
    }

    /// Conjugate label.
    pub fn conj(self, w: &Word) -> Word {
        match self {
            Variant::Ao => w.clone(),
            Variant::Au => Word(w.0.iter().rev().map(|l| l.swap()).collect()),
        }
    }

    /// All labels of length exactly `len`, in lexicographic order.
    pub fn labels_of_length(self, len: usize) -> Vec<Word> {
        match self {
            Variant::Ao => vec![Word::level(len)],
            Variant::Au => (0..1usize << len)
                .map(|bits| {
                    Word((0..len)
                        .map(|i| if bits >> (len - 1 - i) & 1 == 0 { Letter::A } else { Letter::B })
                        .collect())
                })
                .collect(),
        }
    }

    /// All labels of length at most `max`, ordered by length then lexicographically.
    pub fn labels_up_to(self, max: usize) -> Vec<Word> {
        (0..=max).flat_map(|l| self.labels_of_length(l)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    A,
    B,
}

impl Letter {
    pub fn swap(self) -> Letter {
        match self {
            Letter::A => Letter::B,
            Letter::B => Letter::A,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn level(k: usize) -> Word {
        Word(vec![Letter::A; k])
    }

    /// Parse a word over `{a, b}`; `""` and `"e"` denote the empty word.
    pub fn parse(s: &str) -> Result<Word> {
        if s == "e" {
            return Ok(Word::empty());
        }
        s.chars()
            .map(|ch| match ch {
                'a' => Ok(Letter::A),
                'b' => Ok(Letter::B),
                _ => Err(Error::InvalidInput(format!("invalid letter {ch:?} in word {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        for l in &self.0 {
            write!(f, "{}", if *l == Letter::A { 'a' } else { 'b' })?;
        }
        Ok(())
    }
}
