use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: String,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: impl Into<String>, inverse: bool) -> Self {
        Letter { generator: generator.into(), inverse }
    }

    pub fn inverted(&self) -> Letter {
        Letter { generator: self.generator.clone(), inverse: !self.inverse }
    }

    fn cancels(&self, other: &Letter) -> bool {
        self.generator == other.generator && self.inverse != other.inverse
    }
}

/// Freely reduced word in the free group on the 1-handles. Text form:
/// space-separated generators, `a^-1` for inverses, empty for the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut w = Word(Vec::new());
        for l in letters {
            w.push(l);
        }
        w
    }

    /// `g^k`.
    pub fn power(generator: &str, k: i64) -> Self {
        let l = Letter::new(generator, k < 0);
        Word(std::iter::repeat_n(l, k.unsigned_abs() as usize).collect())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn push(&mut self, l: Letter) {
        if self.0.last().is_some_and(|last| last.cancels(&l)) {
            self.0.pop();
        } else {
            self.0.push(l);
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for l in &other.0 {
            w.push(l.clone());
        }
        w
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(Letter::inverted).collect())
    }

    /// Exponent sum per generator; zero sums omitted.
    pub fn abelianization(&self) -> BTreeMap<String, i64> {
        let mut out = BTreeMap::new();
        for l in &self.0 {
            *out.entry(l.generator.clone()).or_insert(0) += if l.inverse { -1 } else { 1 };
        }
        out.retain(|_, v| *v != 0);
        out
    }

    pub fn generators(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|l| l.generator.as_str())
    }

    /// Renames a generator throughout.
    pub fn rename(&self, from: &str, to: &str) -> Word {
        Word(
            self.0
                .iter()
                .map(|l| if l.generator == from { Letter::new(to, l.inverse) } else { l.clone() })
                .collect(),
        )
    }

    /// Deletes every occurrence of a generator (sets it to the identity).
    pub fn kill(&self, generator: &str) -> Word {
        Word::from_letters(self.0.iter().filter(|l| l.generator != generator).cloned())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", l.generator)?;
            if l.inverse {
                write!(f, "^-1")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordParseError(pub String);

impl fmt::Display for WordParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bad word token {:?}", self.0)
    }
}

impl std::error::Error for WordParseError {}

impl FromStr for Word {
    type Err = WordParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            let (name, inverse) = match tok.strip_suffix("^-1") {
                Some(n) => (n, true),
                None => (tok, false),
            };
            if name.is_empty() || name.contains('^') {
                return Err(WordParseError(tok.to_string()));
            }
            letters.push(Letter::new(name, inverse));
        }
        Ok(Word::from_letters(letters))
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
