//! Target sets `A ⊆ ℕ` with a structural handle on whether `A` and its
//! complement are infinite.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chain::Ball;
use crate::error::{Error, Result};

/// Size class of a target set and its complement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeClass {
    Finite,
    Cofinite,
    /// Both the set and its complement are infinite.
    InfiniteCoinfinite,
}

impl fmt::Display for SizeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SizeClass::Finite => "finite",
            SizeClass::Cofinite => "cofinite",
            SizeClass::InfiniteCoinfinite => "infinite with infinite complement",
        })
    }
}

/// Membership oracle for a subset of the balls.
///
/// `Residue` classes (modulus at least 2) always split ℕ into two infinite
/// parts. A `Periodic` word lists membership bit by bit, with `prefix[0]`
/// for ball 1, and then repeats `block` forever; it is infinite/co-infinite
/// exactly when the block holds both a `1` and a `0`. All-zero and all-one blocks
/// give the finite and cofinite sets used for the bound checks; chain
/// construction refuses them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TargetJson", into = "TargetJson")]
pub enum TargetSet {
    Residue { modulus: u64, residue: u64 },
    Periodic { prefix: Vec<bool>, block: Vec<bool> },
}

impl TargetSet {
    pub fn residue(modulus: u64, residue: u64) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::Domain(format!("residue modulus must be at least 2, got {modulus}")));
        }
        if residue >= modulus {
            return Err(Error::Domain(format!("residue {residue} not below modulus {modulus}")));
        }
        Ok(TargetSet::Residue { modulus, residue })
    }

    pub fn evens() -> Self {
        TargetSet::Residue { modulus: 2, residue: 0 }
    }

    pub fn periodic(prefix: &str, block: &str) -> Result<Self> {
        let bits = |s: &str| -> Result<Vec<bool>> {
            s.chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(Error::Parse(format!("bit string may only hold 0 and 1: {s:?}"))),
                })
                .collect()
        };
        let block = bits(block)?;
        if block.is_empty() {
            return Err(Error::Domain("periodic block must be nonempty".into()));
        }
        Ok(TargetSet::Periodic { prefix: bits(prefix)?, block })
    }

    /// Finite set as a degenerate periodic word.
    pub fn finite(members: &BTreeSet<Ball>) -> Result<Self> {
        Self::from_listed(members, false)
    }

    /// Cofinite set `ℕ \ excluded` as a degenerate periodic word.
    pub fn cofinite(excluded: &BTreeSet<Ball>) -> Result<Self> {
        Self::from_listed(excluded, true)
    }

    fn from_listed(listed: &BTreeSet<Ball>, complement: bool) -> Result<Self> {
        if listed.contains(&0) {
            return Err(Error::Domain("balls are positive naturals".into()));
        }
        let len = listed.last().copied().unwrap_or(0) as usize;
        let prefix = (1..=len as Ball).map(|b| listed.contains(&b) != complement).collect();
        Ok(TargetSet::Periodic { prefix, block: vec![complement] })
    }

    pub fn member(&self, ball: Ball) -> bool {
        match self {
            TargetSet::Residue { modulus, residue } => ball % modulus == *residue,
            TargetSet::Periodic { prefix, block } => {
                if ball == 0 {
                    return false;
                }
                let i = (ball - 1) as usize;
                match prefix.get(i) {
                    Some(&bit) => bit,
                    None => block[(i - prefix.len()) % block.len()],
                }
            }
        }
    }

    pub fn size_class(&self) -> SizeClass {
        match self {
            TargetSet::Residue { .. } => SizeClass::InfiniteCoinfinite,
            TargetSet::Periodic { block, .. } => {
                match (block.iter().any(|&b| b), block.iter().any(|&b| !b)) {
                    (true, true) => SizeClass::InfiniteCoinfinite,
                    (true, false) => SizeClass::Cofinite,
                    _ => SizeClass::Finite,
                }
            }
        }
    }

    /// The listed exceptions of a degenerate word: the members when finite,
    /// the non-members when cofinite. `None` for infinite/co-infinite sets.
    pub fn exceptions(&self) -> Option<BTreeSet<Ball>> {
        let TargetSet::Periodic { prefix, .. } = self else {
            return None;
        };
        let want = match self.size_class() {
            SizeClass::Finite => true,
            SizeClass::Cofinite => false,
            SizeClass::InfiniteCoinfinite => return None,
        };
        Some(
            prefix
                .iter()
                .enumerate()
                .filter(|&(_, &bit)| bit == want)
                .map(|(i, _)| i as Ball + 1)
                .collect(),
        )
    }
}

impl fmt::Display for TargetSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetSet::Residue { modulus, residue } => write!(f, "{{n ≡ {residue} mod {modulus}}}"),
            TargetSet::Periodic { prefix, block } => {
                let s = |v: &[bool]| v.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>();
                write!(f, "periodic({:?}, {:?})", s(prefix), s(block))
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum TargetJson {
    Residue {
        #[serde(rename = "mod")]
        modulus: u64,
        #[serde(rename = "res")]
        residue: u64,
    },
    Periodic { prefix: String, block: String },
}

impl TryFrom<TargetJson> for TargetSet {
    type Error = Error;

    fn try_from(raw: TargetJson) -> Result<Self> {
        match raw {
            TargetJson::Residue { modulus, residue } => TargetSet::residue(modulus, residue),
            TargetJson::Periodic { prefix, block } => TargetSet::periodic(&prefix, &block),
        }
    }
}

impl From<TargetSet> for TargetJson {
    fn from(t: TargetSet) -> Self {
        let s = |v: &[bool]| v.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>();
        match t {
            TargetSet::Residue { modulus, residue } => TargetJson::Residue { modulus, residue },
            TargetSet::Periodic { prefix, block } => TargetJson::Periodic {
                prefix: s(&prefix),
                block: s(&block),
            },
        }
    }
}
