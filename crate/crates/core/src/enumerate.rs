//! Exact brute force over `F_n`.
//!
//! `F_n` holds the `n!` ways gods `n-1, …, 1` can empty `Z_n` down to one
//! ball. Outcomes are ranked in lexicographic removal order (god `n-1`'s
//! choice is the most significant digit, balls compared by label) and walked
//! as urn bitmasks, so contiguous rank blocks can be handed to independent
//! workers. All counts are exact; densities are rationals over `n!`.

use std::collections::{BTreeMap, BTreeSet};
use std::env;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::chain::{Ball, ChainPrefix, Urn};
use crate::error::{Error, Result};
use crate::event::{Atom, EventSpec, Predicate, UrnStack};
use crate::order::RemovalOrder;
use crate::par;
use crate::rational::{self, ratio, Rational};
use crate::target::TargetSet;

/// Largest truncation the engine enumerates (10! = 3 628 800 outcomes).
pub const HARD_CAP: usize = 10;

/// Environment variable that may lower (never raise) the cap.
pub const CAP_ENV: &str = "SUPERTASK_CAP";

/// Effective enumeration cap.
pub fn cap() -> usize {
    env::var(CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .map_or(HARD_CAP, |c| c.min(HARD_CAP))
}

pub fn factorial(n: usize) -> u64 {
    (2..=n as u64).product()
}

/// Enumeration settings: worker count and cap.
#[derive(Clone, Copy, Debug)]
pub struct Engine {
    pub workers: usize,
    pub cap: usize,
}

impl Default for Engine {
    fn default() -> Self {
        Self { workers: par::default_workers(), cap: cap() }
    }
}

type Mask = u32;

/// `Z_n` with balls sorted by label; bit `i` stands for `balls[i]`.
struct Frame<'c> {
    chain: &'c ChainPrefix,
    n: usize,
    balls: Vec<Ball>,
}

impl<'c> Frame<'c> {
    fn new(chain: &'c ChainPrefix, n: usize, cap: usize) -> Result<Self> {
        if n == 0 || n > chain.len() {
            return Err(Error::Range(format!("truncation {n} outside chain of length {}", chain.len())));
        }
        if n > cap {
            return Err(Error::Capacity { n, cap });
        }
        let mut balls = chain.prefix(n)?.to_vec();
        balls.sort_unstable();
        Ok(Self { chain, n, balls })
    }

    fn total(&self) -> u64 {
        factorial(self.n)
    }

    fn bit(&self, ball: Ball) -> Option<Mask> {
        self.balls.binary_search(&ball).ok().map(|i| 1 << i)
    }

    fn mask_of(&self, set: &Urn) -> Option<Mask> {
        set.iter().try_fold(0, |m, &b| self.bit(b).map(|bit| m | bit))
    }

    fn full(&self) -> Mask {
        ((1u64 << self.n) - 1) as Mask
    }

    fn ball_at(&self, bit: Mask) -> Ball {
        self.balls[bit.trailing_zeros() as usize]
    }

    fn compile(&self, event: &EventSpec) -> Result<Compiled> {
        if event.horizon() > self.chain.len() {
            return Err(Error::Range(format!(
                "event horizon {} beyond chain of length {}",
                event.horizon(),
                self.chain.len()
            )));
        }
        Ok(self.compile_pred(event.predicate()))
    }

    fn compile_pred(&self, p: &Predicate) -> Compiled {
        match p {
            Predicate::And { args } => Compiled::And(args.iter().map(|a| self.compile_pred(a)).collect()),
            Predicate::Or { args } => Compiled::Or(args.iter().map(|a| self.compile_pred(a)).collect()),
            Predicate::Not { arg } => Compiled::Not(Box::new(self.compile_pred(arg))),
            Predicate::Atom { atom } => self.compile_atom(atom),
        }
    }

    // Levels >= n are the same for every outcome in F_n, so they fold to constants.
    fn compile_atom(&self, atom: &Atom) -> Compiled {
        let n = self.n;
        let chain_level = |level: usize| self.chain.level_set(level).expect("horizon checked");
        match atom {
            Atom::Contains { level, ball } if *level >= n => Compiled::Const(chain_level(*level).contains(ball)),
            Atom::Contains { level, ball } => match self.bit(*ball) {
                Some(bit) => Compiled::Has(*level, bit),
                None => Compiled::Const(false),
            },
            Atom::Equals { level, set } if *level >= n => Compiled::Const(chain_level(*level) == *set),
            Atom::Equals { level, set } => match self.mask_of(set) {
                Some(mask) => Compiled::Is(*level, mask),
                None => Compiled::Const(false),
            },
            Atom::FinalIs { ball } if n == 1 => Compiled::Const(self.balls[0] == *ball),
            Atom::FinalIs { ball } => match self.bit(*ball) {
                Some(bit) => Compiled::Is(1, bit),
                None => Compiled::Const(false),
            },
            Atom::FinalInTarget { target } if n == 1 => Compiled::Const(target.member(self.balls[0])),
            Atom::FinalInTarget { target } => {
                let mask = self
                    .balls
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| target.member(b))
                    .fold(0, |m, (i, _)| m | (1 << i));
                Compiled::Meets(1, mask)
            }
        }
    }
}

/// Event predicate resolved against one frame. `masks[level]` is `B_level`.
#[derive(Debug)]
enum Compiled {
    Const(bool),
    Has(usize, Mask),
    Is(usize, Mask),
    Meets(usize, Mask),
    And(Vec<Compiled>),
    Or(Vec<Compiled>),
    Not(Box<Compiled>),
}

impl Compiled {
    fn eval(&self, masks: &[Mask]) -> bool {
        match self {
            Compiled::Const(v) => *v,
            Compiled::Has(l, bit) => masks[*l] & bit != 0,
            Compiled::Is(l, mask) => masks[*l] == *mask,
            Compiled::Meets(l, mask) => masks[*l] & mask != 0,
            Compiled::And(args) => args.iter().all(|c| c.eval(masks)),
            Compiled::Or(args) => args.iter().any(|c| c.eval(masks)),
            Compiled::Not(c) => !c.eval(masks),
        }
    }
}

fn nth_bit(mask: Mask, idx: usize) -> Mask {
    let mut m = mask;
    for _ in 0..idx {
        m &= m - 1;
    }
    m & m.wrapping_neg()
}

/// Position in the lexicographic walk of `F_n`.
///
/// `digits[g]` is the index (among the urn's balls in label order) of the
/// ball god `g` removes; `masks[l]` is `B_l` for `1 ≤ l ≤ n`.
struct Cursor {
    n: usize,
    digits: Vec<usize>,
    masks: Vec<Mask>,
}

impl Cursor {
    fn at(frame: &Frame<'_>, rank: u64) -> Self {
        let n = frame.n;
        let mut digits = vec![0; n];
        let mut rem = rank;
        for g in (1..n).rev() {
            let weight = factorial(g);
            digits[g] = (rem / weight) as usize;
            rem %= weight;
        }
        let mut masks = vec![0; n + 1];
        masks[n] = frame.full();
        let mut c = Self { n, digits, masks };
        c.refill(n - 1);
        c
    }

    /// Recomputes `B_g, …, B_1` from the digits of gods `g, …, 1`.
    fn refill(&mut self, from_god: usize) {
        for g in (1..=from_god).rev() {
            let above = self.masks[g + 1];
            self.masks[g] = above & !nth_bit(above, self.digits[g]);
        }
    }

    /// Steps to the next rank; `false` after the last outcome.
    fn advance(&mut self) -> bool {
        for g in 1..self.n {
            // god g chooses among g + 1 balls
            if self.digits[g] < g {
                self.digits[g] += 1;
                self.refill(g);
                return true;
            }
            self.digits[g] = 0;
        }
        false
    }

    fn final_bit(&self) -> Mask {
        self.masks[1]
    }
}

/// Lexicographic stream over `F_n`.
pub struct Orders<'c> {
    frame: Frame<'c>,
    base: Arc<ChainPrefix>,
    cursor: Option<Cursor>,
}

impl Iterator for Orders<'_> {
    type Item = RemovalOrder;

    fn next(&mut self) -> Option<RemovalOrder> {
        let cursor = self.cursor.as_mut()?;
        let n = self.frame.n;
        let removed = (1..n).rev().map(|g| self.frame.ball_at(cursor.masks[g + 1] ^ cursor.masks[g])).collect();
        let order = RemovalOrder::from_parts(self.base.clone(), n, removed, self.frame.ball_at(cursor.final_bit()));
        if !cursor.advance() {
            self.cursor = None;
        }
        Some(order)
    }
}

/// All `n!` removal orders below `Z_n`, in lexicographic removal order.
pub fn enumerate_orders(chain: &ChainPrefix, n: usize) -> Result<Orders<'_>> {
    let frame = Frame::new(chain, n, cap())?;
    let cursor = Some(Cursor::at(&frame, 0));
    Ok(Orders { frame, base: Arc::new(chain.clone()), cursor })
}

/// `x_n(S)` together with the counts that define it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityReport {
    pub event: EventSpec,
    pub n: usize,
    #[serde(with = "rational::serde_display")]
    pub hits: BigUint,
    #[serde(with = "rational::serde_display")]
    pub total: BigUint,
    #[serde(with = "rational::serde_str")]
    pub value: Rational,
}

impl DensityReport {
    pub fn decimal(&self) -> f64 {
        rational::to_f64(&self.value)
    }
}

/// One level-(k+1) history of the constraint check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryRow {
    /// Rank of the history among the `n! / (k+1)!` level-(k+1) histories.
    pub history: u64,
    /// `B_{k+1}`, sorted.
    pub urn: Vec<Ball>,
    /// Outcomes of `F_n` sharing this history.
    pub outcomes: u64,
    /// `N(S; B)`: balls of `B_{k+1}` whose removal lands in `S`.
    pub removals_into_event: usize,
    /// Outcomes sharing this history that also lie in `S`.
    pub in_event: u64,
}

impl HistoryRow {
    /// `(k+1) · in_event = N · outcomes`.
    pub fn holds(&self, k: usize) -> bool {
        (k as u128 + 1) * self.in_event as u128 == self.removals_into_event as u128 * self.outcomes as u128
    }
}

/// Totals over `P_j(S)` for one `j`: the joint and marginal densities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JSlice {
    pub j: usize,
    pub histories: u64,
    /// `x_n(H_k ∈ S, H_{k+1} ∈ P_j(S))`
    #[serde(with = "rational::serde_str")]
    pub joint: Rational,
    /// `x_n(H_{k+1} ∈ P_j(S))`
    #[serde(with = "rational::serde_str")]
    pub marginal: Rational,
    /// `joint = j/(k+1) · marginal`
    pub holds: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub k: usize,
    pub event: EventSpec,
    pub n: usize,
    pub per_history: Vec<HistoryRow>,
    pub verdict: Verdict,
}

impl ConstraintCheck {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Rows violating the per-history identity.
    pub fn failures(&self) -> impl Iterator<Item = &HistoryRow> {
        self.per_history.iter().filter(|r| !r.holds(self.k))
    }

    /// The identity aggregated over each `T = P_j(S)`, `j = 0..=k+1`.
    pub fn by_j(&self) -> Vec<JSlice> {
        let total = factorial(self.n);
        let mut acc: BTreeMap<usize, (u64, u64, u64)> = (0..=self.k + 1).map(|j| (j, (0, 0, 0))).collect();
        for row in &self.per_history {
            let e = acc.entry(row.removals_into_event).or_default();
            e.0 += 1;
            e.1 += row.in_event;
            e.2 += row.outcomes;
        }
        acc.into_iter()
            .map(|(j, (histories, joint, marginal))| {
                let joint = ratio(joint, total);
                let marginal = ratio(marginal, total);
                let holds = &joint * Rational::from_integer((self.k + 1).into())
                    == &marginal * Rational::from_integer(j.into());
                JSlice { j, histories, joint, marginal, holds }
            })
            .collect()
    }
}

/// Exact survival / final-ball bound for a finite or cofinite set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetBound {
    pub n: usize,
    /// `|Z_n ∩ A|` for a finite `A`, `|Z_n \ A^c|` for a cofinite one.
    pub in_urn: u64,
    /// `x_n(R ∈ A)`
    #[serde(with = "rational::serde_str")]
    pub value: Rational,
    /// `|A|/n` (finite, upper) or `1 - |A^c|/n` (cofinite, lower).
    #[serde(with = "rational::serde_str")]
    pub bound: Rational,
    pub holds: bool,
}

impl Engine {
    pub fn with_workers(workers: usize) -> Self {
        Self { workers, ..Self::default() }
    }

    pub fn density(&self, chain: &ChainPrefix, event: &EventSpec, n: usize) -> Result<DensityReport> {
        let frame = Frame::new(chain, n, self.cap)?;
        let compiled = frame.compile(event)?;
        let total = frame.total();
        let hits: u64 = par::map_blocks(total, self.workers, |ranks| {
            let mut cursor = Cursor::at(&frame, ranks.start);
            let mut hits = 0u64;
            for _ in ranks {
                hits += u64::from(compiled.eval(&cursor.masks));
                cursor.advance();
            }
            hits
        })
        .into_iter()
        .sum();
        Ok(DensityReport {
            event: event.clone(),
            n,
            hits: hits.into(),
            total: total.into(),
            value: ratio(hits, total),
        })
    }

    pub fn verify_constraint(&self, chain: &ChainPrefix, event: &EventSpec, n: usize) -> Result<ConstraintCheck> {
        let k = event.level();
        if k + 1 > n {
            return Err(Error::Range(format!("constraint at level {k} needs truncation n > {k}, got {n}")));
        }
        let frame = Frame::new(chain, n, self.cap)?;
        let compiled = frame.compile(event)?;
        let block = factorial(k + 1);
        let histories = frame.total() / block;

        let per_history: Vec<HistoryRow> = par::map_blocks(histories, self.workers, |hs| {
            let mut rows = Vec::with_capacity((hs.end - hs.start) as usize);
            let mut cursor = Cursor::at(&frame, hs.start * block);
            let mut probe = vec![0; n + 1];
            for history in hs {
                // N(S; B): try each removal from B_{k+1} with the levels above held fixed.
                probe.copy_from_slice(&cursor.masks);
                let upper = cursor.masks[k + 1];
                let mut removals_into_event = 0;
                let mut rest = upper;
                while rest != 0 {
                    let bit = rest & rest.wrapping_neg();
                    rest ^= bit;
                    probe[k] = upper & !bit;
                    removals_into_event += usize::from(compiled.eval(&probe));
                }
                let mut in_event = 0;
                for _ in 0..block {
                    in_event += u64::from(compiled.eval(&cursor.masks));
                    cursor.advance();
                }
                let urn = frame.balls.iter().enumerate().filter(|(i, _)| upper & (1 << i) != 0).map(|(_, &b)| b).collect();
                rows.push(HistoryRow { history, urn, outcomes: block, removals_into_event, in_event });
            }
            rows
        })
        .into_iter()
        .flatten()
        .collect();

        let verdict = if per_history.iter().all(|r| r.holds(k)) { Verdict::Pass } else { Verdict::Fail };
        Ok(ConstraintCheck { k, event: event.clone(), n, per_history, verdict })
    }

    /// `x_n(H_k ∈ S_k)` where `S_k` is "ball `a` is still in `B_k`".
    pub fn survival_density(&self, chain: &ChainPrefix, ball: Ball, k: usize, n: usize) -> Result<Rational> {
        if n == 0 || n > chain.len() {
            return Err(Error::Range(format!("truncation {n} outside chain of length {}", chain.len())));
        }
        if !chain.level_contains(n, ball)? {
            return Err(Error::Domain(format!("ball {ball} is not in Z_{n}")));
        }
        if k == 0 || k > n {
            return Err(Error::Range(format!("level {k} outside 1..={n}")));
        }
        let event = EventSpec::tight(k, Predicate::contains(k, ball))?;
        Ok(self.density(chain, &event, n)?.value)
    }
}

pub fn density(chain: &ChainPrefix, event: &EventSpec, n: usize) -> Result<DensityReport> {
    Engine::default().density(chain, event, n)
}

pub fn verify_constraint(chain: &ChainPrefix, event: &EventSpec, n: usize) -> Result<ConstraintCheck> {
    Engine::default().verify_constraint(chain, event, n)
}

pub fn survival_density(chain: &ChainPrefix, ball: Ball, k: usize, n: usize) -> Result<Rational> {
    Engine::default().survival_density(chain, ball, k, n)
}

/// `N(S; B)` for an event at level `k`, given explicit urns from `B_{k+1}` up
/// to at least the event's horizon.
pub fn count_n(event: &EventSpec, upper: &UrnStack) -> Result<usize> {
    let k = event.level();
    if upper.start() != k + 1 {
        return Err(Error::Range(format!(
            "event at level {k} needs urns starting at level {}, got {}",
            k + 1,
            upper.start()
        )));
    }
    if event.horizon() > upper.end() {
        return Err(Error::Range(format!(
            "event horizon {} not covered by urns up to level {}",
            event.horizon(),
            upper.end()
        )));
    }
    let bottom = upper.urn(k + 1).expect("start level present");
    let mut j = 0;
    for &b in bottom {
        if event.eval(&upper.with_removed(b)?)? {
            j += 1;
        }
    }
    Ok(j)
}

/// `x_n(R ∈ A) = |Z_n ∩ A| / n` for finite `A`, with the `|A|/n` ceiling.
///
/// Uses the uniform-final-ball law, so it runs at any `n` the chain reaches.
pub fn finite_set_bound(chain: &ChainPrefix, members: &BTreeSet<Ball>, n: usize) -> Result<SetBound> {
    let zn = chain.prefix(n)?;
    let in_urn = zn.iter().filter(|b| members.contains(b)).count() as u64;
    let value = ratio(in_urn, n as u64);
    let bound = ratio(members.len() as u64, n as u64);
    let holds = value <= bound;
    Ok(SetBound { n, in_urn, value, bound, holds })
}

/// `x_n(R ∈ ℕ \ excluded)` with the `1 - |excluded|/n` floor.
pub fn cofinite_set_bound(chain: &ChainPrefix, excluded: &BTreeSet<Ball>, n: usize) -> Result<SetBound> {
    let zn = chain.prefix(n)?;
    let in_urn = zn.iter().filter(|b| !excluded.contains(b)).count() as u64;
    let value = ratio(in_urn, n as u64);
    let bound = Rational::from_integer(1.into()) - ratio(excluded.len() as u64, n as u64);
    let holds = value >= bound;
    Ok(SetBound { n, in_urn, value, bound, holds })
}

/// Test-catalog of events at level `k` for truncation `n`: trivial events,
/// single-ball survival, urn equalities, compound formulas, atoms read above
/// the truncation, and (at `k = 1`) final-ball events.
pub fn catalog(chain: &ChainPrefix, n: usize, k: usize) -> Result<Vec<EventSpec>> {
    if k == 0 || k > n || n > chain.len() {
        return Err(Error::Range(format!("catalog needs 1 <= k <= n <= {}, got k={k}, n={n}", chain.len())));
    }
    let zn = chain.prefix(n)?;
    let mut sorted = zn.to_vec();
    sorted.sort_unstable();
    let outsider = sorted.last().copied().unwrap_or(0).max(chain.added().iter().copied().max().unwrap_or(0)) + 1;
    let c = Predicate::contains;

    let mut preds = vec![Predicate::always(), Predicate::not(Predicate::always()), c(k, outsider)];
    preds.extend(zn.iter().map(|&z| c(k, z)));
    preds.push(Predicate::equals(k, chain.prefix(k)?.iter().copied()));
    preds.push(Predicate::equals(k, sorted[n - k..].iter().copied()));
    if n >= 2 {
        let (a, b) = (zn[0], zn[n - 1]);
        preds.push(Predicate::and([c(k, a), Predicate::not(c(k, b))]));
        preds.push(Predicate::or([
            Predicate::and([c(k, a), Predicate::not(c(k, b))]),
            Predicate::and([Predicate::not(c(k, a)), c(k, b)]),
        ]));
    }
    if k < n {
        preds.push(Predicate::or([c(k, zn[n - 1]), Predicate::equals(k + 1, chain.prefix(k + 1)?.iter().copied())]));
        preds.push(Predicate::and([c(k, zn[0]), Predicate::not(c(k + 1, zn[n - 1]))]));
    }
    if chain.len() > n {
        let next = chain.added()[n];
        preds.push(Predicate::and([c(k, zn[0]), c(n + 1, next)]));
        preds.push(Predicate::or([c(k, zn[0]), Predicate::not(c(n + 1, next))]));
    }
    if k == 1 {
        preds.extend(zn.iter().map(|&z| Predicate::final_is(z)));
        preds.push(Predicate::final_in(TargetSet::evens()));
        preds.push(Predicate::final_in(TargetSet::residue(3, 1).expect("valid residue")));
        preds.push(Predicate::final_in(TargetSet::periodic("", "10").expect("valid word")));
        preds.push(Predicate::and([Predicate::final_in(TargetSet::evens()), Predicate::not(Predicate::final_is(zn[0]))]));
    }
    preds.into_iter().map(|p| EventSpec::tight(k, p)).collect()
}

/// `x_n` as an exact count, through generic event evaluation on
/// materialised orders. Slow; intended for cross-checks.
pub fn density_by_orders(chain: &ChainPrefix, event: &EventSpec, n: usize) -> Result<Rational> {
    let mut hits = 0u64;
    let mut total = 0u64;
    for order in enumerate_orders(chain, n)? {
        total += 1;
        hits += u64::from(event.eval(&order)?);
    }
    Ok(ratio(hits, total))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: usize) -> ChainPrefix {
        ChainPrefix::initial_segment(n)
    }

    fn ev(k: usize, p: Predicate) -> EventSpec {
        EventSpec::tight(k, p).unwrap()
    }

    #[test]
    fn walks_all_orders_lexicographically() {
        let orders: Vec<_> = enumerate_orders(&z(3), 3).unwrap().map(|o| o.removed().to_vec()).collect();
        assert_eq!(orders, vec![vec![1, 2], vec![1, 3], vec![2, 1], vec![2, 3], vec![3, 1], vec![3, 2]]);
        let single: Vec<_> = enumerate_orders(&z(1), 1).unwrap().collect();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].final_ball(), 1);
    }

    #[test]
    fn cursor_matches_rank_decoding() {
        let chain = ChainPrefix::new(vec![5, 2, 9, 4, 1]).unwrap();
        let frame = Frame::new(&chain, 5, HARD_CAP).unwrap();
        let mut walk = Cursor::at(&frame, 0);
        for rank in 0..120 {
            let direct = Cursor::at(&frame, rank);
            assert_eq!(walk.masks, direct.masks, "rank {rank}");
            walk.advance();
        }
    }

    #[test]
    fn capacity_and_range_errors() {
        let big = z(11);
        assert!(matches!(density(&big, &EventSpec::always(1), 11), Err(Error::Capacity { n: 11, .. })));
        assert!(matches!(density(&z(3), &EventSpec::always(1), 4), Err(Error::Range(_))));
        let high = EventSpec::new(1, 5, Predicate::always()).unwrap();
        assert!(matches!(density(&z(4), &high, 3), Err(Error::Range(_))));
        assert!(matches!(verify_constraint(&z(3), &EventSpec::always(3), 3), Err(Error::Range(_))));
    }

    #[test]
    fn density_examples() {
        let r = density(&z(3), &ev(1, Predicate::final_is(1)), 3).unwrap();
        assert_eq!((r.hits.clone(), r.total.clone()), (2u32.into(), 6u32.into()));
        assert_eq!(r.value, ratio(1, 3));
        assert_eq!(density(&z(5), &EventSpec::always(2), 5).unwrap().value, ratio(1, 1));
    }

    #[test]
    fn count_n_examples() {
        let s = ev(1, Predicate::final_is(1));
        let b2 = UrnStack::new(2, vec![Urn::from([1, 2])]).unwrap();
        assert_eq!(count_n(&s, &b2).unwrap(), 1);
        let b3 = UrnStack::new(3, vec![Urn::from([1, 2, 3])]).unwrap();
        assert_eq!(count_n(&EventSpec::always(2), &b3).unwrap(), 3);
        assert_eq!(count_n(&ev(2, Predicate::equals(2, [1, 2])), &b3).unwrap(), 1);
        let wide = EventSpec::new(2, 4, Predicate::always()).unwrap();
        assert!(matches!(count_n(&wide, &b3), Err(Error::Range(_))));
        assert!(matches!(count_n(&s, &b3), Err(Error::Range(_))));
    }

    #[test]
    fn verify_example_rows() {
        let check = verify_constraint(&z(3), &ev(1, Predicate::final_is(1)), 3).unwrap();
        assert!(check.passed());
        let rows: Vec<_> = check.per_history.iter().map(|r| (r.urn.clone(), r.outcomes, r.removals_into_event, r.in_event)).collect();
        assert_eq!(
            rows,
            vec![(vec![2, 3], 2, 0, 0), (vec![1, 3], 2, 1, 1), (vec![1, 2], 2, 1, 1)]
        );
        let slices = check.by_j();
        assert!(slices.iter().all(|s| s.holds));
        assert_eq!(slices[1].marginal, ratio(2, 3));
        assert_eq!(slices[1].joint, ratio(1, 3));
    }

    #[test]
    fn survival_examples() {
        assert_eq!(survival_density(&z(4), 1, 2, 4).unwrap(), ratio(1, 2));
        assert_eq!(survival_density(&z(5), 3, 1, 5).unwrap(), ratio(1, 5));
        assert_eq!(survival_density(&z(6), 4, 6, 6).unwrap(), ratio(1, 1));
        assert!(matches!(survival_density(&z(4), 9, 2, 4), Err(Error::Domain(_))));
        assert!(matches!(survival_density(&z(4), 1, 5, 4), Err(Error::Range(_))));
    }

    #[test]
    fn set_bounds() {
        let chain = ChainPrefix::new(vec![1, 2, 3, 4, 6, 5, 7, 9, 11, 8]).unwrap();
        let b = finite_set_bound(&chain, &BTreeSet::from([7]), 10).unwrap();
        assert_eq!(b.value, ratio(1, 10));
        assert!(b.holds);
        assert_eq!(finite_set_bound(&chain, &BTreeSet::new(), 10).unwrap().value, ratio(0, 1));
        let whole: BTreeSet<Ball> = chain.level_set(10).unwrap();
        assert_eq!(finite_set_bound(&chain, &whole, 10).unwrap().value, ratio(1, 1));
        let co = cofinite_set_bound(&chain, &BTreeSet::from([2, 10]), 10).unwrap();
        assert_eq!(co.value, ratio(9, 10));
        assert!(co.holds && co.bound == ratio(4, 5));
    }

    #[test]
    fn compiled_and_generic_routes_agree() {
        let chain = ChainPrefix::new(vec![3, 1, 4, 6, 2, 8]).unwrap();
        for n in 1..=5 {
            for k in 1..=n {
                for e in catalog(&chain, n, k).unwrap() {
                    let fast = density(&chain, &e, n).unwrap().value;
                    let slow = density_by_orders(&chain, &e, n).unwrap();
                    assert_eq!(fast, slow, "n={n} k={k} {e:?}");
                }
            }
        }
    }
}
