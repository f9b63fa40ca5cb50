//! Finite prefixes of nested urn chains.
//!
//! A chain `Z_1 ⊂ Z_2 ⊂ …` with `|Z_k| = k` is stored as the sequence of
//! balls it adds: `Z_k` is the first `k` entries.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Balls are labelled by positive naturals.
pub type Ball = u64;

/// Urn contents at one level.
pub type Urn = BTreeSet<Ball>;

#[derive(Clone, Debug)]
pub struct ChainPrefix {
    added: Vec<Ball>,
    position: HashMap<Ball, usize>,
}

impl ChainPrefix {
    pub fn new(added: Vec<Ball>) -> Result<Self> {
        let mut position = HashMap::with_capacity(added.len());
        for (i, &b) in added.iter().enumerate() {
            if b == 0 {
                return Err(Error::Domain("balls are positive naturals; got 0".into()));
            }
            if position.insert(b, i).is_some() {
                return Err(Error::Domain(format!("ball {b} added twice")));
            }
        }
        Ok(Self { added, position })
    }

    /// `Z_n = {1, …, n}` added in increasing order.
    pub fn initial_segment(n: usize) -> Self {
        Self::new((1..=n as Ball).collect()).expect("1..=n is distinct and positive")
    }

    pub fn len(&self) -> usize {
        self.added.len()
    }

    pub fn is_empty(&self) -> bool {
        self.added.is_empty()
    }

    pub fn added(&self) -> &[Ball] {
        &self.added
    }

    /// `z_i`, 1-based.
    pub fn nth(&self, i: usize) -> Option<Ball> {
        i.checked_sub(1).and_then(|i| self.added.get(i).copied())
    }

    /// Balls of `Z_k`, in the order they were added.
    pub fn prefix(&self, k: usize) -> Result<&[Ball]> {
        self.check_level(k)?;
        Ok(&self.added[..k])
    }

    /// `Z_k` as a set.
    pub fn level_set(&self, k: usize) -> Result<Urn> {
        Ok(self.prefix(k)?.iter().copied().collect())
    }

    /// Whether `ball ∈ Z_k`.
    pub fn level_contains(&self, k: usize, ball: Ball) -> Result<bool> {
        self.check_level(k)?;
        Ok(self.position.get(&ball).is_some_and(|&i| i < k))
    }

    /// The level at which `ball` enters the chain, if it does.
    pub fn entry_level(&self, ball: Ball) -> Option<usize> {
        self.position.get(&ball).map(|i| i + 1)
    }

    /// The first `n` terms as their own chain.
    pub fn truncate(&self, n: usize) -> Result<Self> {
        Ok(Self::new(self.prefix(n)?.to_vec()).expect("prefix of a valid chain"))
    }

    fn check_level(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.added.len() {
            return Err(Error::Range(format!(
                "level {k} outside chain of length {}",
                self.added.len()
            )));
        }
        Ok(())
    }
}

impl PartialEq for ChainPrefix {
    fn eq(&self, other: &Self) -> bool {
        self.added == other.added
    }
}

impl Eq for ChainPrefix {}

#[derive(Serialize, Deserialize)]
struct ChainJson {
    added: Vec<Ball>,
}

impl Serialize for ChainPrefix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ChainJson { added: self.added.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ChainPrefix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ChainJson::deserialize(d)?;
        ChainPrefix::new(raw.added).map_err(serde::de::Error::custom)
    }
}
