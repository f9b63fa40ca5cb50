//! List every removal order below Z_3 = {1, 2, 3} and compute exact
//! final-ball densities by enumeration.
//!
//! cargo run --example enumerate_outcomes

use supertask::{density, enumerate_orders, ChainPrefix, EventSpec, Predicate, TargetSet};

fn main() -> supertask::Result<()> {
    let z3 = ChainPrefix::initial_segment(3);
    println!("outcomes below Z_3 (urns B_1, B_2, B_3):");
    for order in enumerate_orders(&z3, 3)? {
        let urns: Vec<String> = order.urns().iter().map(|u| format!("{u:?}")).collect();
        println!("  removed {:?} -> final {}   {}", order.removed(), order.final_ball(), urns.join(" ⊂ "));
    }
    for b in 1..=3 {
        let ev = EventSpec::tight(1, Predicate::final_is(b))?;
        let r = density(&z3, &ev, 3)?;
        println!("x_3(R = {b}) = {}/{} = {}", r.hits, r.total, supertask::format_rational(&r.value));
    }

    // The greedy chain 1,2,3,4,5,7,6,9,11 has three evens among nine balls.
    let chain = ChainPrefix::new(vec![1, 2, 3, 4, 5, 7, 6, 9, 11])?;
    let ev = EventSpec::tight(1, Predicate::final_in(TargetSet::evens()))?;
    let r = density(&chain, &ev, 9)?;
    println!("x_9(R even) = {} over {} orders", supertask::format_rational(&r.value), r.total);
    Ok(())
}
