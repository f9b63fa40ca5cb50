//! Single outcomes of the truncated process: which ball each god removes.

use std::ops::RangeInclusive;
use std::sync::Arc;

use crate::chain::{Ball, ChainPrefix, Urn};
use crate::error::{Error, Result};
use crate::event::{EventSpec, History};

/// One element of `F_n`: gods `n-1, …, 1` each remove a ball from `Z_n`,
/// leaving `final_ball`. Levels at or above `n` follow the base chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RemovalOrder {
    base: Arc<ChainPrefix>,
    n: usize,
    /// `removed[i]` is the ball god `n - 1 - i` takes.
    removed: Vec<Ball>,
    final_ball: Ball,
}

impl RemovalOrder {
    /// `removed` lists the balls in the order gods `n-1, …, 1` take them.
    pub fn new(base: Arc<ChainPrefix>, n: usize, removed: Vec<Ball>) -> Result<Self> {
        if n == 0 || n > base.len() {
            return Err(Error::Range(format!("truncation {n} outside chain of length {}", base.len())));
        }
        if removed.len() != n - 1 {
            return Err(Error::Domain(format!("{} removals for {} gods", removed.len(), n - 1)));
        }
        let mut urn = base.level_set(n)?;
        for (i, b) in removed.iter().enumerate() {
            if !urn.remove(b) {
                return Err(Error::Domain(format!("god {} cannot remove ball {b}: not in the urn", n - 1 - i)));
            }
        }
        let final_ball = *urn.first().expect("exactly one ball left");
        Ok(Self { base, n, removed, final_ball })
    }

    /// Trusted constructor for enumeration; caller guarantees validity.
    pub(crate) fn from_parts(base: Arc<ChainPrefix>, n: usize, removed: Vec<Ball>, final_ball: Ball) -> Self {
        Self { base, n, removed, final_ball }
    }

    pub fn base(&self) -> &ChainPrefix {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Balls in the order gods `n-1, …, 1` remove them.
    pub fn removed(&self) -> &[Ball] {
        &self.removed
    }

    pub fn final_ball(&self) -> Ball {
        self.final_ball
    }

    /// The ball god `k` removes (`1 ≤ k < n`).
    pub fn removed_by(&self, god: usize) -> Result<Ball> {
        if god == 0 || god >= self.n {
            return Err(Error::Range(format!("god {god} does not act below truncation {}", self.n)));
        }
        Ok(self.removed[self.n - 1 - god])
    }

    /// `B_k`, the urn after god `k` acted. Levels above `n` come from the chain.
    pub fn urn_at(&self, k: usize) -> Result<Urn> {
        if k == 0 || k > self.base.len() {
            return Err(Error::Range(format!("level {k} outside 1..={}", self.base.len())));
        }
        if k >= self.n {
            return self.base.level_set(k);
        }
        let mut urn = self.base.level_set(self.n)?;
        for b in &self.removed[..self.n - k] {
            urn.remove(b);
        }
        Ok(urn)
    }

    /// Urns `B_1, …, B_n`.
    pub fn urns(&self) -> Vec<Urn> {
        (1..=self.n).map(|k| self.urn_at(k).expect("k within 1..=n")).collect()
    }

    pub fn satisfies(&self, event: &EventSpec) -> Result<bool> {
        event.eval(self)
    }
}

impl History for RemovalOrder {
    fn levels(&self) -> RangeInclusive<usize> {
        1..=self.base.len()
    }

    fn contains(&self, level: usize, ball: Ball) -> bool {
        if level >= self.n {
            return self.base.level_contains(level, ball).unwrap_or(false);
        }
        self.base.level_contains(self.n, ball).unwrap_or(false) && !self.removed[..self.n - level].contains(&ball)
    }

    fn urn_equals(&self, level: usize, set: &Urn) -> bool {
        self.urn_at(level).is_ok_and(|u| &u == set)
    }

    fn any_in(&self, level: usize, pred: &dyn Fn(Ball) -> bool) -> bool {
        self.urn_at(level).is_ok_and(|u| u.iter().any(|&b| pred(b)))
    }
}
