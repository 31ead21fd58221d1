//! Nucleotide bases, base sets and validated sequences over {A,C,G,T}.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Base {
    A,
    C,
    G,
    T,
}

impl Base {
    pub const ALL: [Base; 4] = [Base::A, Base::C, Base::G, Base::T];

    /// Parses a single base, accepting lowercase.
    pub fn from_char(c: char) -> Option<Base> {
        match c {
            'A' | 'a' => Some(Base::A),
            'C' | 'c' => Some(Base::C),
            'G' | 'g' => Some(Base::G),
            'T' | 't' => Some(Base::T),
            _ => None,
        }
    }

    pub fn from_byte(b: u8) -> Option<Base> {
        Base::from_char(b as char)
    }

    pub fn as_char(self) -> char {
        match self {
            Base::A => 'A',
            Base::C => 'C',
            Base::G => 'G',
            Base::T => 'T',
        }
    }

    fn bit(self) -> u8 {
        match self {
            Base::A => 1,
            Base::C => 2,
            Base::G => 4,
            Base::T => 8,
        }
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// A subset of {A,C,G,T}. Iteration and display follow A,C,G,T order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct BaseSet(u8);

impl BaseSet {
    pub const EMPTY: BaseSet = BaseSet(0);
    pub const ANY: BaseSet = BaseSet(0b1111);

    pub fn of(bases: &[Base]) -> BaseSet {
        BaseSet(bases.iter().fold(0, |acc, b| acc | b.bit()))
    }

    pub fn single(base: Base) -> BaseSet {
        BaseSet(base.bit())
    }

    pub fn contains(self, base: Base) -> bool {
        self.0 & base.bit() != 0
    }

    pub fn insert(&mut self, base: Base) {
        self.0 |= base.bit();
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = Base> {
        Base::ALL.into_iter().filter(move |b| self.contains(*b))
    }

    /// Parses a compact letter list such as `"CGT"`.
    pub fn from_letters(s: &str) -> Option<BaseSet> {
        let mut set = BaseSet::EMPTY;
        for c in s.chars() {
            set.insert(Base::from_char(c)?);
        }
        Some(set)
    }

    /// Compact form used in trace files, e.g. `CGT`.
    pub fn letters(self) -> String {
        self.iter().map(Base::as_char).collect()
    }
}

impl fmt::Display for BaseSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|b| b.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl FromIterator<Base> for BaseSet {
    fn from_iter<I: IntoIterator<Item = Base>>(iter: I) -> Self {
        let mut set = BaseSet::EMPTY;
        for b in iter {
            set.insert(b);
        }
        set
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequenceError {
    #[error("sequence `{id}` is empty")]
    Empty { id: String },
    #[error("sequence `{id}`: invalid character {ch:?} at position {position}")]
    InvalidChar {
        id: String,
        ch: char,
        /// 1-based.
        position: usize,
    },
}

/// A labelled, non-empty sequence over {A,C,G,T}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NucleotideSequence {
    id: String,
    bases: Vec<Base>,
}

impl NucleotideSequence {
    /// Validates `text` and canonicalizes lowercase to uppercase.
    pub fn parse(id: impl Into<String>, text: &str) -> Result<Self, SequenceError> {
        let id = id.into();
        let mut bases = Vec::with_capacity(text.len());
        for (i, ch) in text.chars().enumerate() {
            match Base::from_char(ch) {
                Some(b) => bases.push(b),
                None => {
                    return Err(SequenceError::InvalidChar {
                        id,
                        ch,
                        position: i + 1,
                    })
                }
            }
        }
        NucleotideSequence::from_bases(id, bases)
    }

    pub fn from_bases(id: impl Into<String>, bases: Vec<Base>) -> Result<Self, SequenceError> {
        let id = id.into();
        if bases.is_empty() {
            return Err(SequenceError::Empty { id });
        }
        Ok(NucleotideSequence { id, bases })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn bases(&self) -> &[Base] {
        &self.bases
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    /// Complete codons in the given frame; a trailing partial codon is dropped.
    pub fn codons(&self, frame: usize) -> impl Iterator<Item = [Base; 3]> + '_ {
        self.bases
            .get(frame..)
            .unwrap_or(&[])
            .chunks_exact(3)
            .map(|c| [c[0], c[1], c[2]])
    }
}

impl fmt::Display for NucleotideSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bases {
            write!(f, "{}", b.as_char())?;
        }
        Ok(())
    }
}
