//! Lexical attribute extractors over a ±j context window and the attribute
//! associations built by merging them.
//!
//! Every atom is namespaced by the extractor that produced it, so the word
//! "हार" seen as local context and as a stopword-filtered bag entry are two
//! different features once combined.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::corpus::{parse_wordlist, Instance};
use crate::text::Token;

const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords.txt");
const DEFAULT_VIBHAKTI: &str = include_str!("../data/vibhakti.txt");

/// Largest window accepted from configuration.
pub const MAX_WINDOW: usize = 25;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("unknown method {0:?}; valid methods: {names}", names = Method::NAMES.join(", "))]
    UnknownMethod(String),
    #[error("window must be between 1 and {MAX_WINDOW}, got {0}")]
    Window(usize),
    #[error("malformed atom {0:?}")]
    Atom(String),
}

/// Half-width j of the context window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WindowSize(usize);

impl WindowSize {
    pub fn new(j: usize) -> Result<Self, ConfigError> {
        if (1..=MAX_WINDOW).contains(&j) {
            Ok(WindowSize(j))
        } else {
            Err(ConfigError::Window(j))
        }
    }

    pub fn get(self) -> usize {
        self.0
    }
}

impl fmt::Display for WindowSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Namespace {
    Local,
    Collocation,
    Bag,
    BagNoStop,
    Vibhakti,
}

impl Namespace {
    pub fn code(self) -> &'static str {
        match self {
            Namespace::Local => "l",
            Namespace::Collocation => "c",
            Namespace::Bag => "b",
            Namespace::BagNoStop => "s",
            Namespace::Vibhakti => "v",
        }
    }

    fn from_code(code: &str) -> Option<Self> {
        Some(match code {
            "l" => Namespace::Local,
            "c" => Namespace::Collocation,
            "b" => Namespace::Bag,
            "s" => Namespace::BagNoStop,
            "v" => Namespace::Vibhakti,
            _ => return None,
        })
    }
}

/// One feature. `position` is set only for vibhakti atoms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeatureAtom {
    pub namespace: Namespace,
    pub position: Option<i32>,
    pub payload: String,
}

impl FeatureAtom {
    pub fn new(namespace: Namespace, payload: impl Into<String>) -> Self {
        FeatureAtom {
            namespace,
            position: None,
            payload: payload.into(),
        }
    }

    pub fn vibhakti(position: i32, payload: impl Into<String>) -> Self {
        FeatureAtom {
            namespace: Namespace::Vibhakti,
            position: Some(position),
            payload: payload.into(),
        }
    }

    /// `namespace:position:payload`, with an empty position field for
    /// non-positional atoms. The payload comes last so it may contain `:`.
    pub fn encode(&self) -> String {
        let pos = self.position.map(|p| p.to_string()).unwrap_or_default();
        format!("{}:{}:{}", self.namespace.code(), pos, self.payload)
    }

    pub fn decode(s: &str) -> Result<Self, ConfigError> {
        let bad = || ConfigError::Atom(s.to_string());
        let mut parts = s.splitn(3, ':');
        let ns = parts
            .next()
            .and_then(Namespace::from_code)
            .ok_or_else(bad)?;
        let pos = parts.next().ok_or_else(bad)?;
        let payload = parts.next().ok_or_else(bad)?;
        let position = match (ns, pos) {
            (Namespace::Vibhakti, p) => Some(p.parse::<i32>().map_err(|_| bad())?),
            (_, "") => None,
            _ => return Err(bad()),
        };
        Ok(FeatureAtom {
            namespace: ns,
            position,
            payload: payload.to_string(),
        })
    }
}

impl fmt::Display for FeatureAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

/// A multiset of atoms, kept in extraction order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeatureSet {
    pub atoms: Vec<FeatureAtom>,
}

impl FeatureSet {
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Multiplicity of each distinct atom.
    pub fn counts(&self) -> BTreeMap<&FeatureAtom, usize> {
        let mut m = BTreeMap::new();
        for a in &self.atoms {
            *m.entry(a).or_insert(0) += 1;
        }
        m
    }

    /// Multiset equality, ignoring order.
    pub fn same_multiset(&self, other: &FeatureSet) -> bool {
        self.counts() == other.counts()
    }

    pub fn payloads(&self) -> Vec<&str> {
        self.atoms.iter().map(|a| a.payload.as_str()).collect()
    }
}

impl FromIterator<FeatureAtom> for FeatureSet {
    fn from_iter<I: IntoIterator<Item = FeatureAtom>>(iter: I) -> Self {
        FeatureSet {
            atoms: iter.into_iter().collect(),
        }
    }
}

/// Stopword and vibhakti lists consulted by the extractors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resources {
    pub stopwords: BTreeSet<Token>,
    pub vibhakti: BTreeSet<Token>,
}

impl Default for Resources {
    fn default() -> Self {
        Resources {
            stopwords: parse_wordlist(DEFAULT_STOPWORDS),
            vibhakti: parse_wordlist(DEFAULT_VIBHAKTI),
        }
    }
}

/// Inclusive token range of the ±j window, truncated at the sequence ends.
fn window_bounds(inst: &Instance, j: WindowSize) -> (usize, usize) {
    let t = inst.target_index;
    let lo = t.saturating_sub(j.get());
    let hi = (t + j.get()).min(inst.tokens.len() - 1);
    (lo, hi)
}

fn window_tokens(inst: &Instance, j: WindowSize) -> &[Token] {
    let (lo, hi) = window_bounds(inst, j);
    &inst.tokens[lo..=hi]
}

/// Tokens from −j to +j around the target, target included.
pub fn local_context(inst: &Instance, j: WindowSize) -> FeatureSet {
    window_tokens(inst, j)
        .iter()
        .map(|t| FeatureAtom::new(Namespace::Local, t.as_str()))
        .collect()
}

/// Contiguous n-grams of 2..=j+1 tokens inside the window that cover the target.
pub fn collocation(inst: &Instance, j: WindowSize) -> FeatureSet {
    let (lo, hi) = window_bounds(inst, j);
    let t = inst.target_index;
    let mut atoms = Vec::new();
    for n in 2..=j.get() + 1 {
        // start s with lo <= s <= t and s + n - 1 in [t, hi]
        let first = lo.max((t + 1).saturating_sub(n));
        for s in first..=t {
            let end = s + n - 1;
            if end > hi {
                break;
            }
            let gram = inst.tokens[s..=end]
                .iter()
                .map(Token::as_str)
                .collect::<Vec<_>>()
                .join(" ");
            atoms.push(FeatureAtom::new(Namespace::Collocation, gram));
        }
    }
    FeatureSet { atoms }
}

/// Unordered window tokens, target included, stopwords kept.
pub fn bag_of_words(inst: &Instance, j: WindowSize) -> FeatureSet {
    window_tokens(inst, j)
        .iter()
        .map(|t| FeatureAtom::new(Namespace::Bag, t.as_str()))
        .collect()
}

/// Window tokens with stopwords dropped.
pub fn bag_no_stop(inst: &Instance, j: WindowSize, stopwords: &BTreeSet<Token>) -> FeatureSet {
    window_tokens(inst, j)
        .iter()
        .filter(|t| !stopwords.contains(*t))
        .map(|t| FeatureAtom::new(Namespace::BagNoStop, t.as_str()))
        .collect()
}

/// One positional atom per in-bounds context slot (target excluded): the
/// vibhakti at that slot, or an empty payload when the slot holds anything else.
pub fn vibhakti_features(inst: &Instance, j: WindowSize, vibhakti: &BTreeSet<Token>) -> FeatureSet {
    let (lo, hi) = window_bounds(inst, j);
    let t = inst.target_index as i64;
    (lo..=hi)
        .filter(|&i| i as i64 != t)
        .map(|i| {
            let tok = &inst.tokens[i];
            let payload = if vibhakti.contains(tok) {
                tok.as_str()
            } else {
                ""
            };
            FeatureAtom::vibhakti((i as i64 - t) as i32, payload)
        })
        .collect()
}

/// Multiset union.
pub fn combine<I>(parts: I) -> FeatureSet
where
    I: IntoIterator<Item = FeatureSet>,
{
    parts.into_iter().flat_map(|p| p.atoms).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Local,
    Collocation,
    Bag,
    BagNoStop,
    Vibhakti,
    LocalCollocation,
    CollocationBagNoStop,
    LocalCollocationVibhakti,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Local,
        Method::Collocation,
        Method::Bag,
        Method::BagNoStop,
        Method::Vibhakti,
        Method::LocalCollocation,
        Method::CollocationBagNoStop,
        Method::LocalCollocationVibhakti,
    ];

    pub const NAMES: [&'static str; 8] = ["l", "c", "b", "bs", "v", "l+c", "c+bs", "l+c+v"];

    /// The four methods compared in the standard sweep, in report order.
    pub const SWEEP_DEFAULT: [Method; 4] = [
        Method::CollocationBagNoStop,
        Method::LocalCollocationVibhakti,
        Method::LocalCollocation,
        Method::BagNoStop,
    ];

    pub fn name(self) -> &'static str {
        Self::NAMES[self as usize]
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        Self::NAMES
            .iter()
            .position(|n| *n == s)
            .map(|i| Self::ALL[i])
            .ok_or_else(|| ConfigError::UnknownMethod(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MethodSpec {
    pub method: Method,
    pub window: WindowSize,
}

impl MethodSpec {
    pub fn new(method: Method, window: WindowSize) -> Self {
        MethodSpec { method, window }
    }
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.method, self.window)
    }
}

pub fn extract(inst: &Instance, spec: MethodSpec, res: &Resources) -> FeatureSet {
    let j = spec.window;
    match spec.method {
        Method::Local => local_context(inst, j),
        Method::Collocation => collocation(inst, j),
        Method::Bag => bag_of_words(inst, j),
        Method::BagNoStop => bag_no_stop(inst, j, &res.stopwords),
        Method::Vibhakti => vibhakti_features(inst, j, &res.vibhakti),
        Method::LocalCollocation => combine([local_context(inst, j), collocation(inst, j)]),
        Method::CollocationBagNoStop => {
            combine([collocation(inst, j), bag_no_stop(inst, j, &res.stopwords)])
        }
        Method::LocalCollocationVibhakti => combine([
            local_context(inst, j),
            collocation(inst, j),
            vibhakti_features(inst, j, &res.vibhakti),
        ]),
    }
}

/// Namespace-free display strings in extraction order, except that vibhakti
/// atoms are emitted together in ascending position after all other atoms.
pub fn render(fs: &FeatureSet) -> Vec<String> {
    let mut plain: Vec<String> = Vec::new();
    let mut positional: Vec<(i32, &str)> = Vec::new();
    for a in &fs.atoms {
        match a.position {
            Some(p) => positional.push((p, &a.payload)),
            None => plain.push(a.payload.clone()),
        }
    }
    positional.sort_by_key(|(p, _)| *p);
    plain.extend(positional.into_iter().map(|(_, s)| s.to_string()));
    plain
}
