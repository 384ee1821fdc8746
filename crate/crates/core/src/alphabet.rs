//! Bijective codec between application symbols and dense [`SymbolId`]s in `[0, m)`.
//!
//! Two modes exist. [`Alphabet::bytes`] treats words as raw byte sequences
//! and maps every byte to itself (`m = 256`). [`Alphabet::explicit`] takes an
//! ordered list of distinct `char`s and assigns each its list position; words
//! are then read as `char` sequences.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use thiserror::Error;

/// Dense symbol index in `[0, m)`.
pub type SymbolId = u32;

/// An application-level symbol: a raw byte or a Unicode scalar value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Byte(u8),
    Char(char),
}

impl From<u8> for Symbol {
    fn from(b: u8) -> Self {
        Symbol::Byte(b)
    }
}

impl From<char> for Symbol {
    fn from(c: char) -> Self {
        Symbol::Char(c)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Byte(b) => write!(f, "0x{b:02x}"),
            Symbol::Char(c) => write!(f, "{c:?}"),
        }
    }
}

#[derive(Debug, Error)]
pub enum AlphabetError {
    #[error("alphabet must contain at least one symbol")]
    EmptyAlphabet,
    #[error("symbol {0} appears more than once")]
    DuplicateSymbol(Symbol),
    #[error("symbol {0} is not in the alphabet")]
    UnknownSymbol(Symbol),
    #[error("symbol id {id} out of range for alphabet of size {m}")]
    IdOutOfRange { id: SymbolId, m: usize },
    #[error("alphabet file line {line}: expected exactly one character, found {found:?}")]
    BadSymbolLine { line: usize, found: String },
    #[error("reading alphabet file: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Mode {
    Bytes256,
    Explicit {
        symbols: Vec<char>,
        index: HashMap<char, SymbolId>,
    },
}

/// Immutable symbol codec. Cheap to share between readers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    mode: Mode,
}

impl Alphabet {
    /// The identity byte alphabet, `m = 256`.
    pub fn bytes() -> Self {
        Self {
            mode: Mode::Bytes256,
        }
    }

    /// Builds an alphabet where `symbols[i]` gets id `i`.
    pub fn explicit<I>(symbols: I) -> Result<Self, AlphabetError>
    where
        I: IntoIterator<Item = char>,
    {
        let symbols: Vec<char> = symbols.into_iter().collect();
        if symbols.is_empty() {
            return Err(AlphabetError::EmptyAlphabet);
        }
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, &c) in symbols.iter().enumerate() {
            if index.insert(c, i as SymbolId).is_some() {
                return Err(AlphabetError::DuplicateSymbol(Symbol::Char(c)));
            }
        }
        Ok(Self {
            mode: Mode::Explicit { symbols, index },
        })
    }

    /// Parses an alphabet file: UTF-8, one symbol per line, order defines the id.
    ///
    /// A single trailing newline is allowed; every other line must hold exactly
    /// one character (a line holding a single space declares the space symbol).
    pub fn parse_list(text: &str) -> Result<Self, AlphabetError> {
        let body = text.strip_suffix('\n').unwrap_or(text);
        if body.is_empty() {
            return Err(AlphabetError::EmptyAlphabet);
        }
        let mut symbols = Vec::new();
        for (i, line) in body.split('\n').enumerate() {
            let mut chars = line.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => symbols.push(c),
                _ => {
                    return Err(AlphabetError::BadSymbolLine {
                        line: i + 1,
                        found: line.to_string(),
                    })
                }
            }
        }
        Self::explicit(symbols)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, AlphabetError> {
        Self::parse_list(&std::fs::read_to_string(path)?)
    }

    /// Alphabet size `m`.
    pub fn size(&self) -> usize {
        match &self.mode {
            Mode::Bytes256 => 256,
            Mode::Explicit { symbols, .. } => symbols.len(),
        }
    }

    pub fn is_bytes(&self) -> bool {
        matches!(self.mode, Mode::Bytes256)
    }

    pub fn encode(&self, sym: impl Into<Symbol>) -> Result<SymbolId, AlphabetError> {
        let sym = sym.into();
        match (&self.mode, sym) {
            (Mode::Bytes256, Symbol::Byte(b)) => Ok(SymbolId::from(b)),
            (Mode::Explicit { index, .. }, Symbol::Char(c)) => index
                .get(&c)
                .copied()
                .ok_or(AlphabetError::UnknownSymbol(sym)),
            _ => Err(AlphabetError::UnknownSymbol(sym)),
        }
    }

    pub fn decode(&self, id: SymbolId) -> Result<Symbol, AlphabetError> {
        let out_of_range = AlphabetError::IdOutOfRange {
            id,
            m: self.size(),
        };
        match &self.mode {
            Mode::Bytes256 => u8::try_from(id).map(Symbol::Byte).map_err(|_| out_of_range),
            Mode::Explicit { symbols, .. } => symbols
                .get(id as usize)
                .map(|&c| Symbol::Char(c))
                .ok_or(out_of_range),
        }
    }

    /// Lazily encodes `word` symbol by symbol: bytes in byte mode, chars otherwise.
    pub fn encode_word<'a>(
        &'a self,
        word: &'a str,
    ) -> impl Iterator<Item = Result<SymbolId, AlphabetError>> + 'a {
        let (bytes, chars) = match self.mode {
            Mode::Bytes256 => (Some(word.bytes()), None),
            Mode::Explicit { .. } => (None, Some(word.chars())),
        };
        bytes
            .into_iter()
            .flatten()
            .map(Symbol::Byte)
            .chain(chars.into_iter().flatten().map(Symbol::Char))
            .map(move |s| self.encode(s))
    }

    pub fn encode_word_vec(&self, word: &str) -> Result<Vec<SymbolId>, AlphabetError> {
        self.encode_word(word).collect()
    }

    /// Inverse of [`encode_word`](Self::encode_word).
    ///
    /// In byte mode the id sequence must form valid UTF-8; ids that came from
    /// encoding a `&str` always do.
    pub fn decode_word(&self, ids: &[SymbolId]) -> Result<String, AlphabetError> {
        match &self.mode {
            Mode::Bytes256 => {
                let mut bytes = Vec::with_capacity(ids.len());
                for &id in ids {
                    if let Symbol::Byte(b) = self.decode(id)? {
                        bytes.push(b);
                    }
                }
                Ok(String::from_utf8_lossy(&bytes).into_owned())
            }
            Mode::Explicit { .. } => {
                let mut word = String::with_capacity(ids.len());
                for &id in ids {
                    if let Symbol::Char(c) = self.decode(id)? {
                        word.push(c);
                    }
                }
                Ok(word)
            }
        }
    }
}
