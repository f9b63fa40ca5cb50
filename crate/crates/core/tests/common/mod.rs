//! Independent brute-force oracle: recursive removal over explicit sets.
//! Shares nothing with the library's bitmask walk.

#![allow(dead_code)]

use std::collections::BTreeSet;

use supertask::{Ball, ChainPrefix, TargetSet};

/// One outcome as explicit urns: `urns[l - 1] = B_l` for `l = 1..=n`.
pub type Outcome = Vec<BTreeSet<Ball>>;

/// Every outcome below `Z_n`, by recursion from the top urn downward.
pub fn all_outcomes(chain: &ChainPrefix, n: usize) -> Vec<Outcome> {
    fn go(stack: &mut Vec<BTreeSet<Ball>>, out: &mut Vec<Outcome>) {
        let top = stack.last().unwrap().clone();
        if top.len() == 1 {
            let mut o = stack.clone();
            o.reverse();
            out.push(o);
            return;
        }
        for b in &top {
            let mut next = top.clone();
            next.remove(b);
            stack.push(next);
            go(stack, out);
            stack.pop();
        }
    }
    let zn: BTreeSet<Ball> = chain.added()[..n].iter().copied().collect();
    let mut out = Vec::new();
    go(&mut vec![zn], &mut out);
    out
}

pub fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

/// Reduced fraction as a pair.
pub fn reduce(num: u64, den: u64) -> (u64, u64) {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    let g = gcd(num, den).max(1);
    (num / g, den / g)
}

/// The listed Eq.-style greedy chain for evens at 1/3.
pub fn greedy_third_chain() -> ChainPrefix {
    ChainPrefix::new(vec![1, 2, 3, 4, 5, 7, 6, 9, 11]).unwrap()
}

pub fn fraction_in(set: &[Ball], target: &TargetSet) -> (u64, u64) {
    reduce(set.iter().filter(|b| target.member(**b)).count() as u64, set.len() as u64)
}
