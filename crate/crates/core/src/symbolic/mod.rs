//! Words over the alphabet of a tuple and the three subshifts used by the
//! pressure: the full shift, the shift `Σ_A` of words whose prefix products
//! never vanish, and the full shift on the invertible letters.

mod automaton;
mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use automaton::{find_zero_product, has_infinite_nonzero_word, NonzeroWordVerdict, SigmaLiveness, ZeroProductSearch};
pub use tree::{NodeView, Product, TreeWalk, Visit};

use crate::error::{Error, Result};
use crate::ifs::AffineIfs;
use crate::mat2::Mat2;

/// Default cap on the number of tree nodes a single analysis may visit.
pub const DEFAULT_BUDGET: u64 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubshiftKind {
    /// `J^ℕ`.
    Full,
    /// Infinite words with every prefix product nonzero.
    Sigma,
    /// `I^ℕ`, `I` the invertible letters.
    Invertible,
}

impl fmt::Display for SubshiftKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SubshiftKind::Full => "full",
            SubshiftKind::Sigma => "sigma",
            SubshiftKind::Invertible => "invertible",
        })
    }
}

/// A finite word; letters are map indices.
/// Serialized as its display string, `"0111"`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<u8>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n.min(self.0.len())].to_vec())
    }

    /// Drop the first letter.
    pub fn shift(&self) -> Result<Word> {
        if self.0.is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(Word(self.0[1..].to_vec()))
    }

    pub fn repeat(&self, k: usize) -> Word {
        Word(self.0.repeat(k))
    }

    /// `A_𝚒`, the identity for the empty word.
    pub fn product(&self, ifs: &AffineIfs) -> Mat2 {
        self.0
            .iter()
            .fold(Mat2::IDENTITY, |acc, &l| acc * *ifs.linear(l as usize))
    }
}

impl From<Word> for String {
    fn from(w: Word) -> String {
        w.to_string()
    }
}

impl TryFrom<String> for Word {
    type Error = Error;

    fn try_from(s: String) -> Result<Word> {
        s.parse()
    }
}

impl From<Vec<u8>> for Word {
    fn from(v: Vec<u8>) -> Self {
        Word(v)
    }
}

/// Letters are written as digits when all are below ten, otherwise dot
/// separated.
impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&l| l < 10) {
            for l in &self.0 {
                write!(f, "{l}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
            f.write_str(&parts.join("."))
        }
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid("symbolic", format!("cannot parse word {s:?}"));
        if s.contains('.') {
            s.split('.')
                .map(|p| p.parse::<u8>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()
                .map(Word)
        } else {
            s.chars()
                .map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(bad))
                .collect::<Result<Vec<_>>>()
                .map(Word)
        }
    }
}

/// One nonzero word of a level set with its product.
#[derive(Clone, Debug)]
pub struct LevelEntry {
    pub word: Word,
    pub product: Mat2,
    pub rank: u8,
}

/// The words of length `depth` of a subshift.
///
/// For the full shift, words through a vanishing prefix are only counted in
/// `implicit_zero`; every listed entry has a nonzero product.
#[derive(Clone, Debug)]
pub struct LevelSet {
    pub kind: SubshiftKind,
    pub depth: usize,
    pub entries: Vec<LevelEntry>,
    pub implicit_zero: u128,
}

impl LevelSet {
    pub fn count(&self) -> u128 {
        self.entries.len() as u128 + self.implicit_zero
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.entries.binary_search_by(|e| e.word.cmp(w)).is_ok()
    }

    /// `σ` maps every listed word into `shorter` (the level one below).
    pub fn shift_closed_into(&self, shorter: &LevelSet) -> bool {
        shorter.depth + 1 == self.depth
            && self
                .entries
                .iter()
                .all(|e| e.word.shift().map(|w| shorter.contains(&w)).unwrap_or(false))
    }
}

/// Enumerate the level set of length `n`, in lexicographic order.
pub fn enumerate_level(ifs: &AffineIfs, kind: SubshiftKind, n: usize, budget: u64) -> Result<LevelSet> {
    let letters = ifs.len() as u128;
    let walk = TreeWalk::new(ifs, kind, n, budget, "symbolic");
    let shards = walk.run(
        || (Vec::new(), 0u128),
        |(entries, zero): &mut (Vec<LevelEntry>, u128), node| {
            let d = node.word.len();
            if node.product.rank() == 0 {
                *zero += letters.pow((n - d) as u32);
                return Visit::Prune;
            }
            if d == n {
                entries.push(LevelEntry {
                    word: Word(node.word.to_vec()),
                    product: node.product.matrix(),
                    rank: node.product.rank(),
                });
            }
            Visit::Descend
        },
    )?;
    let mut entries = Vec::new();
    let mut implicit_zero = 0;
    for (e, z) in shards {
        entries.extend(e);
        implicit_zero += z;
    }
    if n == 0 {
        entries.push(LevelEntry {
            word: Word::empty(),
            product: Mat2::IDENTITY,
            rank: 2,
        });
    }
    Ok(LevelSet {
        kind,
        depth: n,
        entries,
        implicit_zero,
    })
}
