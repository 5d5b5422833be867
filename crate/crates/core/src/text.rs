//! Tokenization and normalization of Devanagari (and general UTF-8) text.
//!
//! Every token handed to the rest of the crate is NFC-normalized, non-empty
//! and free of whitespace, so feature identity reduces to string equality.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TextError {
    #[error("invalid UTF-8: {0}")]
    Decode(String),
    #[error("empty token")]
    EmptyToken,
    #[error("token {0:?} contains whitespace")]
    Whitespace(String),
}

/// Characters that split tokens and are then discarded.
pub const DELIMITERS: &[char] = &[
    '।', '॥', '.', ',', ';', ':', '!', '?', '"', '\'', '(', ')', '-',
];

fn is_delimiter(c: char) -> bool {
    c.is_whitespace() || DELIMITERS.contains(&c)
}

/// A single normalized word.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Token(String);

impl Token {
    /// Builds a token from arbitrary text, normalizing it to NFC.
    pub fn new(surface: &str) -> Result<Self, TextError> {
        let nfc: String = surface.nfc().collect();
        if nfc.is_empty() {
            return Err(TextError::EmptyToken);
        }
        if nfc.chars().any(char::is_whitespace) {
            return Err(TextError::Whitespace(nfc));
        }
        Ok(Token(nfc))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Token {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Token {
    type Error = TextError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Token::new(&value)
    }
}

impl From<Token> for String {
    fn from(t: Token) -> String {
        t.0
    }
}

impl PartialEq<str> for Token {
    fn eq(&self, other: &str) -> bool {
        self.0 == other
    }
}

impl PartialEq<&str> for Token {
    fn eq(&self, other: &&str) -> bool {
        self.0 == *other
    }
}

pub type TokenSequence = Vec<Token>;

/// NFC-normalizes and trims surrounding whitespace.
pub fn normalize(raw: &str) -> String {
    raw.nfc().collect::<String>().trim().to_string()
}

/// Like [`normalize`], for raw bytes of unknown validity.
pub fn normalize_bytes(raw: &[u8]) -> Result<String, TextError> {
    let s = std::str::from_utf8(raw).map_err(|e| TextError::Decode(e.to_string()))?;
    Ok(normalize(s))
}

/// Splits normalized text on whitespace and the punctuation in [`DELIMITERS`].
/// Punctuation is dropped; words and digits are kept in source order.
pub fn tokenize(text: &str) -> TokenSequence {
    text.split(is_delimiter)
        .filter(|piece| !piece.is_empty())
        // pieces are non-empty and whitespace-free by construction
        .filter_map(|piece| Token::new(piece).ok())
        .collect()
}

/// All positions holding `target`, ascending.
pub fn find_target(tokens: &[Token], target: &Token) -> Vec<usize> {
    tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| *t == target)
        .map(|(i, _)| i)
        .collect()
}
