//! Sense-tagged lexical-sample corpora: loading, validation, stratified
//! splitting and summary statistics.
//!
//! The on-disk format is JSON Lines, one tagged occurrence per line:
//!
//! ```text
//! {"target": "हार", "sense": "माला", "text": "हीरे का हार पहनी एक"}
//! {"target": "हार", "sense": "पराजय", "tokens": ["केकेआर", "की", "हार"], "target_index": 2}
//! ```
//!
//! Exactly one of `text` (tokenized here) or `tokens` (taken as given) must be
//! present. Without `target_index` the first occurrence of the target is used.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::{self, Token, TokenSequence};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corpus not found: {}", .0.display())]
    NotFound(PathBuf),
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: invalid instance: {message}")]
    Validation { line: usize, message: String },
    #[error("corpus is empty")]
    Empty,
    #[error("train fraction must lie strictly between 0 and 1, got {0}")]
    InvalidFraction(f64),
}

/// A sense label scoped to its target word.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SenseId {
    pub target: Token,
    pub label: String,
}

impl SenseId {
    pub fn new(target: Token, label: impl Into<String>) -> Self {
        SenseId {
            target,
            label: label.into(),
        }
    }
}

impl fmt::Display for SenseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.target, self.label)
    }
}

/// One tagged occurrence of a target word in context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub target: Token,
    pub target_index: usize,
    pub tokens: TokenSequence,
    pub sense: SenseId,
}

impl Instance {
    /// Checked constructor; the target is read off `tokens[target_index]`.
    pub fn new(tokens: TokenSequence, target_index: usize, label: &str) -> Result<Self, String> {
        let target = tokens.get(target_index).cloned().ok_or_else(|| {
            format!(
                "target_index {target_index} out of range for {} tokens",
                tokens.len()
            )
        })?;
        Ok(Instance {
            sense: SenseId::new(target.clone(), label),
            target,
            target_index,
            tokens,
        })
    }

    fn check(&self) -> Option<String> {
        match self.tokens.get(self.target_index) {
            None => Some(format!(
                "target_index {} out of range for {} tokens",
                self.target_index,
                self.tokens.len()
            )),
            Some(t) if *t != self.target => Some(format!(
                "token at target_index {} is {:?}, expected target {:?}",
                self.target_index,
                t.as_str(),
                self.target.as_str()
            )),
            Some(_) if self.sense.target != self.target => Some(format!(
                "sense {} belongs to a different target than {:?}",
                self.sense,
                self.target.as_str()
            )),
            Some(_) => None,
        }
    }
}

/// Instances plus the sense inventory of every target word.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub instances: Vec<Instance>,
    pub inventory: BTreeMap<Token, BTreeSet<String>>,
}

impl Corpus {
    /// Builds a corpus whose inventory is exactly the senses seen in `instances`.
    pub fn from_instances(instances: Vec<Instance>) -> Self {
        let mut inventory: BTreeMap<Token, BTreeSet<String>> = BTreeMap::new();
        for inst in &instances {
            inventory
                .entry(inst.target.clone())
                .or_default()
                .insert(inst.sense.label.clone());
        }
        Corpus {
            instances,
            inventory,
        }
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn targets(&self) -> impl Iterator<Item = &Token> {
        self.inventory.keys()
    }

    /// Instances grouped by target word, in corpus order within each group.
    pub fn by_target(&self) -> BTreeMap<&Token, Vec<&Instance>> {
        let mut groups: BTreeMap<&Token, Vec<&Instance>> = BTreeMap::new();
        for inst in &self.instances {
            groups.entry(&inst.target).or_default().push(inst);
        }
        groups
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CorpusStats {
    pub word_count: usize,
    pub instance_count: usize,
    pub polysemous_word_count: usize,
}

pub fn corpus_stats(c: &Corpus) -> CorpusStats {
    CorpusStats {
        word_count: c.instances.iter().map(|i| i.tokens.len()).sum(),
        instance_count: c.instances.len(),
        polysemous_word_count: c.inventory.len(),
    }
}

/// Lists every broken invariant; empty means the corpus is well formed.
pub fn validate(c: &Corpus) -> Vec<String> {
    let mut violations = Vec::new();
    for (ordinal, inst) in c.instances.iter().enumerate() {
        if let Some(msg) = inst.check() {
            violations.push(format!("instance {ordinal}: {msg}"));
        }
        let known = c
            .inventory
            .get(&inst.target)
            .is_some_and(|senses| senses.contains(&inst.sense.label));
        if !known {
            violations.push(format!(
                "instance {ordinal}: sense {} missing from inventory",
                inst.sense
            ));
        }
    }
    for target in c.inventory.keys() {
        if !c.instances.iter().any(|i| &i.target == target) {
            violations.push(format!(
                "inventory target {:?} has no instances",
                target.as_str()
            ));
        }
    }
    violations
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    target: String,
    sense: String,
    #[serde(default)]
    text: Option<String>,
    #[serde(default)]
    tokens: Option<Vec<String>>,
    #[serde(default)]
    target_index: Option<usize>,
}

#[derive(Debug, Serialize)]
struct OutRecord<'a> {
    target: &'a str,
    sense: &'a str,
    tokens: Vec<&'a str>,
    target_index: usize,
}

fn parse_record(line: usize, raw: &str) -> Result<Instance, CorpusError> {
    let rec: RawRecord = serde_json::from_str(raw).map_err(|e| CorpusError::Parse {
        line,
        message: e.to_string(),
    })?;
    let invalid = |message: String| CorpusError::Validation { line, message };

    let target =
        Token::new(&text::normalize(&rec.target)).map_err(|e| invalid(format!("target: {e}")))?;
    if rec.sense.trim().is_empty() {
        return Err(invalid("empty sense label".into()));
    }
    let tokens = match (rec.text, rec.tokens) {
        (Some(raw_text), None) => text::tokenize(&text::normalize(&raw_text)),
        (None, Some(list)) => list
            .iter()
            .map(|t| Token::new(&text::normalize(t)))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| invalid(format!("tokens: {e}")))?,
        (Some(_), Some(_)) => {
            return Err(CorpusError::Parse {
                line,
                message: "record has both \"text\" and \"tokens\"".into(),
            })
        }
        (None, None) => {
            return Err(CorpusError::Parse {
                line,
                message: "record needs one of \"text\" or \"tokens\"".into(),
            })
        }
    };
    let target_index = match rec.target_index {
        Some(i) => i,
        None => *text::find_target(&tokens, &target).first().ok_or_else(|| {
            invalid(format!(
                "text does not contain target {:?}",
                target.as_str()
            ))
        })?,
    };
    let inst = Instance {
        sense: SenseId::new(target.clone(), rec.sense),
        target,
        target_index,
        tokens,
    };
    match inst.check() {
        Some(msg) => Err(invalid(msg)),
        None => Ok(inst),
    }
}

/// Parses JSON Lines corpus content. Blank lines are ignored.
pub fn parse_corpus(content: &str) -> Result<Corpus, CorpusError> {
    let mut instances = Vec::new();
    for (i, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        instances.push(parse_record(i + 1, line)?);
    }
    Ok(Corpus::from_instances(instances))
}

pub fn load_corpus(path: &Path) -> Result<Corpus, CorpusError> {
    let bytes = fs::read(path).map_err(|source| {
        if source.kind() == io::ErrorKind::NotFound {
            CorpusError::NotFound(path.to_path_buf())
        } else {
            CorpusError::Io {
                path: path.to_path_buf(),
                source,
            }
        }
    })?;
    let content = String::from_utf8(bytes).map_err(|e| CorpusError::Parse {
        line: 0,
        message: format!("invalid UTF-8: {e}"),
    })?;
    parse_corpus(&content)
}

/// Serializes a corpus in the pre-tokenized record form.
pub fn write_corpus<W: Write>(c: &Corpus, mut out: W) -> io::Result<()> {
    for inst in &c.instances {
        let rec = OutRecord {
            target: inst.target.as_str(),
            sense: &inst.sense.label,
            tokens: inst.tokens.iter().map(Token::as_str).collect(),
            target_index: inst.target_index,
        };
        serde_json::to_writer(&mut out, &rec)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Parses a word list: one token per line, `#` comment lines and blanks skipped.
pub fn parse_wordlist(content: &str) -> BTreeSet<Token> {
    content
        .lines()
        .map(text::normalize)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .filter_map(|l| Token::new(&l).ok())
        .collect()
}

pub fn load_wordlist(path: &Path) -> Result<BTreeSet<Token>, CorpusError> {
    let content = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parse_wordlist(&content))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Corpus,
    pub test: Corpus,
    pub warnings: Vec<String>,
}

/// Number of group members assigned to training: round-half-up of
/// `fraction * size`, kept within `1..=size`.
pub fn train_share(fraction: f64, size: usize) -> usize {
    let raw = (fraction * size as f64 + 0.5).floor() as usize;
    raw.clamp(1, size)
}

/// Stratified split: each (target, sense) group is shuffled with a seeded
/// ChaCha8 permutation and its first [`train_share`] members go to train.
/// Both halves keep the original corpus order.
pub fn split(c: &Corpus, train_fraction: f64, seed: u64) -> Result<Split, CorpusError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(CorpusError::InvalidFraction(train_fraction));
    }
    if c.is_empty() {
        return Err(CorpusError::Empty);
    }

    let mut groups: BTreeMap<&SenseId, Vec<usize>> = BTreeMap::new();
    for (i, inst) in c.instances.iter().enumerate() {
        groups.entry(&inst.sense).or_default().push(i);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_train = vec![false; c.len()];
    let mut warnings = Vec::new();
    for (sense, mut members) in groups {
        members.shuffle(&mut rng);
        let n_train = train_share(train_fraction, members.len());
        for &i in &members[..n_train] {
            in_train[i] = true;
        }
        if n_train == members.len() {
            warnings.push(format!(
                "sense {sense} has {} instance(s); none held out for testing",
                members.len()
            ));
        }
    }

    let (train, test): (Vec<_>, Vec<_>) = c
        .instances
        .iter()
        .cloned()
        .zip(in_train)
        .partition(|(_, t)| *t);
    Ok(Split {
        train: Corpus::from_instances(train.into_iter().map(|(i, _)| i).collect()),
        test: Corpus::from_instances(test.into_iter().map(|(i, _)| i).collect()),
        warnings,
    })
}
