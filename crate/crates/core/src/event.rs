//! Finitely observable events on chains of urns.
//!
//! An [`EventSpec`] at level `k` is a boolean formula over atoms that read the
//! urns `B_k, …, B_h`. Anything that can answer those atom queries is a
//! [`History`]: full removal orders, explicit urn stacks, and the bitmask
//! view used by the enumeration engine.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::chain::{Ball, Urn};
use crate::error::{Error, Result};
use crate::target::TargetSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "atom", rename_all = "snake_case")]
pub enum Atom {
    /// `ball ∈ B_level`
    Contains { level: usize, ball: Ball },
    /// `B_level = set`
    Equals { level: usize, set: Urn },
    /// `B_1 = {ball}`
    FinalIs { ball: Ball },
    /// The ball in `B_1` lies in `target`.
    FinalInTarget { target: TargetSet },
}

impl Atom {
    pub fn level(&self) -> usize {
        match self {
            Atom::Contains { level, .. } | Atom::Equals { level, .. } => *level,
            Atom::FinalIs { .. } | Atom::FinalInTarget { .. } => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Predicate {
    And { args: Vec<Predicate> },
    Or { args: Vec<Predicate> },
    Not { arg: Box<Predicate> },
    Atom {
        #[serde(flatten)]
        atom: Atom,
    },
}

impl Predicate {
    /// Empty conjunction.
    pub fn always() -> Self {
        Predicate::And { args: Vec::new() }
    }

    /// Empty disjunction.
    pub fn never() -> Self {
        Predicate::Or { args: Vec::new() }
    }

    pub fn atom(atom: Atom) -> Self {
        Predicate::Atom { atom }
    }

    pub fn contains(level: usize, ball: Ball) -> Self {
        Self::atom(Atom::Contains { level, ball })
    }

    pub fn equals(level: usize, set: impl IntoIterator<Item = Ball>) -> Self {
        Self::atom(Atom::Equals { level, set: set.into_iter().collect() })
    }

    pub fn final_is(ball: Ball) -> Self {
        Self::atom(Atom::FinalIs { ball })
    }

    pub fn final_in(target: TargetSet) -> Self {
        Self::atom(Atom::FinalInTarget { target })
    }

    pub fn and(args: impl IntoIterator<Item = Predicate>) -> Self {
        Predicate::And { args: args.into_iter().collect() }
    }

    pub fn or(args: impl IntoIterator<Item = Predicate>) -> Self {
        Predicate::Or { args: args.into_iter().collect() }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(arg: Predicate) -> Self {
        Predicate::Not { arg: Box::new(arg) }
    }

    /// Visits every atom in the formula.
    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            Predicate::And { args } | Predicate::Or { args } => {
                args.iter().for_each(|p| p.collect_atoms(out))
            }
            Predicate::Not { arg } => arg.collect_atoms(out),
            Predicate::Atom { atom } => out.push(atom),
        }
    }

    fn eval<H: History + ?Sized>(&self, h: &H) -> bool {
        match self {
            Predicate::And { args } => args.iter().all(|p| p.eval(h)),
            Predicate::Or { args } => args.iter().any(|p| p.eval(h)),
            Predicate::Not { arg } => !arg.eval(h),
            Predicate::Atom { atom } => match atom {
                Atom::Contains { level, ball } => h.contains(*level, *ball),
                Atom::Equals { level, set } => h.urn_equals(*level, set),
                Atom::FinalIs { ball } => h.urn_equals(1, &Urn::from([*ball])),
                Atom::FinalInTarget { target } => h.any_in(1, &|b| target.member(b)),
            },
        }
    }
}

/// Anything that can report urn contents over a contiguous band of levels.
pub trait History {
    fn levels(&self) -> RangeInclusive<usize>;
    fn contains(&self, level: usize, ball: Ball) -> bool;
    fn urn_equals(&self, level: usize, set: &Urn) -> bool;
    fn any_in(&self, level: usize, pred: &dyn Fn(Ball) -> bool) -> bool;
}

/// An event `S ⊆ Ω_k`, read on levels `level..=horizon`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "EventJson")]
pub struct EventSpec {
    level: usize,
    horizon: usize,
    predicate: Predicate,
}

#[derive(Deserialize)]
struct EventJson {
    level: usize,
    horizon: usize,
    predicate: Predicate,
}

impl TryFrom<EventJson> for EventSpec {
    type Error = Error;

    fn try_from(raw: EventJson) -> Result<Self> {
        EventSpec::new(raw.level, raw.horizon, raw.predicate)
    }
}

impl EventSpec {
    pub fn new(level: usize, horizon: usize, predicate: Predicate) -> Result<Self> {
        if level == 0 {
            return Err(Error::Domain("event level must be at least 1".into()));
        }
        if horizon < level {
            return Err(Error::Domain(format!("horizon {horizon} below level {level}")));
        }
        for atom in predicate.atoms() {
            let l = atom.level();
            if l < level || l > horizon {
                return Err(Error::Range(format!(
                    "atom {atom:?} reads level {l} outside [{level}, {horizon}]"
                )));
            }
            match atom {
                Atom::Equals { level: l, set } if set.len() != *l => {
                    return Err(Error::Domain(format!(
                        "Equals at level {l} needs a set of {l} balls, got {}",
                        set.len()
                    )));
                }
                Atom::Contains { ball: 0, .. } | Atom::FinalIs { ball: 0 } => {
                    return Err(Error::Domain("balls are positive naturals".into()));
                }
                _ => {}
            }
        }
        Ok(Self { level, horizon, predicate })
    }

    /// Smallest valid spec around `predicate`: level and horizon taken from its atoms.
    /// Atom-free predicates sit at `level` with horizon `level`.
    pub fn tight(level: usize, predicate: Predicate) -> Result<Self> {
        let horizon = predicate.atoms().iter().map(|a| a.level()).max().unwrap_or(level);
        Self::new(level, horizon.max(level), predicate)
    }

    /// Event that always holds at `level`.
    pub fn always(level: usize) -> Self {
        Self::new(level, level, Predicate::always()).expect("level >= 1 checked by caller")
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn predicate(&self) -> &Predicate {
        &self.predicate
    }

    /// Same predicate read over a longer band.
    pub fn with_horizon(&self, horizon: usize) -> Result<Self> {
        Self::new(self.level, horizon, self.predicate.clone())
    }

    /// Whether the outcome described by `history` lies in the event.
    pub fn eval<H: History + ?Sized>(&self, history: &H) -> Result<bool> {
        let band = history.levels();
        if self.level < *band.start() || self.horizon > *band.end() {
            return Err(Error::Range(format!(
                "event reads levels {}..={} but history covers {}..={}",
                self.level,
                self.horizon,
                band.start(),
                band.end()
            )));
        }
        Ok(self.predicate.eval(history))
    }
}

/// Explicit urns `B_start ⊂ B_{start+1} ⊂ … ⊂ B_end`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UrnStack {
    start: usize,
    urns: Vec<Urn>,
}

impl UrnStack {
    pub fn new(start: usize, urns: Vec<Urn>) -> Result<Self> {
        if start == 0 || urns.is_empty() {
            return Err(Error::Domain("an urn stack needs at least one level, starting at 1 or above".into()));
        }
        for (i, urn) in urns.iter().enumerate() {
            let level = start + i;
            if urn.len() != level {
                return Err(Error::Domain(format!("urn at level {level} holds {} balls", urn.len())));
            }
            if urn.contains(&0) {
                return Err(Error::Domain("balls are positive naturals".into()));
            }
            if i > 0 && !urns[i - 1].is_subset(urn) {
                return Err(Error::Domain(format!("urn at level {} is not inside level {level}", level - 1)));
            }
        }
        Ok(Self { start, urns })
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self) -> usize {
        self.start + self.urns.len() - 1
    }

    pub fn urn(&self, level: usize) -> Option<&Urn> {
        level.checked_sub(self.start).and_then(|i| self.urns.get(i))
    }

    /// The stack one level lower, obtained by taking `ball` out of the bottom urn.
    pub fn with_removed(&self, ball: Ball) -> Result<Self> {
        if self.start < 2 {
            return Err(Error::Range("no god acts below level 1".into()));
        }
        let mut bottom = self.urns[0].clone();
        if !bottom.remove(&ball) {
            return Err(Error::Domain(format!("ball {ball} is not in the urn at level {}", self.start)));
        }
        let mut urns = Vec::with_capacity(self.urns.len() + 1);
        urns.push(bottom);
        urns.extend(self.urns.iter().cloned());
        Ok(Self { start: self.start - 1, urns })
    }
}

impl History for UrnStack {
    fn levels(&self) -> RangeInclusive<usize> {
        self.start..=self.end()
    }

    fn contains(&self, level: usize, ball: Ball) -> bool {
        self.urn(level).is_some_and(|u| u.contains(&ball))
    }

    fn urn_equals(&self, level: usize, set: &Urn) -> bool {
        self.urn(level).is_some_and(|u| u == set)
    }

    fn any_in(&self, level: usize, pred: &dyn Fn(Ball) -> bool) -> bool {
        self.urn(level).is_some_and(|u| u.iter().any(|&b| pred(b)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stack_123() -> UrnStack {
        UrnStack::new(1, vec![Urn::from([1]), Urn::from([1, 2]), Urn::from([1, 2, 3])]).unwrap()
    }

    #[test]
    fn validates_atom_levels() {
        assert!(EventSpec::new(2, 3, Predicate::final_is(1)).is_err());
        assert!(EventSpec::new(1, 2, Predicate::contains(3, 1)).is_err());
        assert!(EventSpec::new(2, 2, Predicate::equals(2, [1])).is_err());
        assert!(EventSpec::new(2, 1, Predicate::always()).is_err());
        assert!(EventSpec::new(0, 1, Predicate::always()).is_err());
        assert!(EventSpec::new(2, 4, Predicate::and([Predicate::contains(2, 1), Predicate::equals(4, [1, 2, 3, 4])])).is_ok());
    }

    #[test]
    fn evaluates_on_stack() {
        let h = stack_123();
        let e = EventSpec::tight(1, Predicate::final_is(1)).unwrap();
        assert!(e.eval(&h).unwrap());
        let e = EventSpec::tight(1, Predicate::final_in(TargetSet::evens())).unwrap();
        assert!(!e.eval(&h).unwrap());
        let e = EventSpec::tight(2, Predicate::not(Predicate::contains(2, 3))).unwrap();
        assert!(e.eval(&h).unwrap());
        let e = EventSpec::new(1, 4, Predicate::always()).unwrap();
        assert!(matches!(e.eval(&h), Err(Error::Range(_))));
    }

    #[test]
    fn removal_lowers_the_stack() {
        let top = UrnStack::new(2, vec![Urn::from([1, 2]), Urn::from([1, 2, 3])]).unwrap();
        let lowered = top.with_removed(2).unwrap();
        assert_eq!(lowered, stack_123());
        assert!(top.with_removed(3).is_err());
    }

    #[test]
    fn rejects_non_nested_stacks() {
        assert!(UrnStack::new(1, vec![Urn::from([4]), Urn::from([1, 2])]).is_err());
        assert!(UrnStack::new(1, vec![Urn::from([1, 2])]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let e = EventSpec::new(
            1,
            3,
            Predicate::and([
                Predicate::final_is(1),
                Predicate::not(Predicate::contains(2, 3)),
                Predicate::or([Predicate::equals(3, [1, 2, 3]), Predicate::final_in(TargetSet::evens())]),
            ]),
        )
        .unwrap();
        let json = serde_json::to_string(&e).unwrap();
        assert!(json.contains(r#""op":"atom","atom":"final_is","ball":1"#), "{json}");
        let back: EventSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, e);
        let bad = r#"{"level":2,"horizon":2,"predicate":{"op":"atom","atom":"final_is","ball":1}}"#;
        assert!(serde_json::from_str::<EventSpec>(bad).is_err());
    }
}
