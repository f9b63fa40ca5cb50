//! A ball in Z_n survives god k with probability exactly k/n, so every
//! single ball ends up final with probability 1/n.
//!
//! cargo run --example survival

use supertask::{density, format_rational, ratio, survival_density, ChainPrefix, EventSpec, Predicate};

fn main() -> supertask::Result<()> {
    let chain = ChainPrefix::new(vec![1, 2, 3, 4, 5, 7, 6, 9])?;
    let n = 8;
    let ball = 7;
    println!("ball {ball} in Z_{n} = {:?}", chain.added());
    for k in 1..=n {
        let s = survival_density(&chain, ball, k, n)?;
        assert_eq!(s, ratio(k as u64, n as u64));
        println!("  P(ball in B_{k}) = {}", format_rational(&s));
    }
    for n in [4, 6, 8] {
        let ev = EventSpec::tight(1, Predicate::final_is(1))?;
        println!("x_{n}(R = 1) = {}", format_rational(&density(&chain, &ev, n)?.value));
    }
    Ok(())
}
