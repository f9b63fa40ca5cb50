//! Check, history by history, that god k removes uniformly among the k+1
//! balls in the urn: (k+1)·|F_n ∩ S ∩ [h]| = N(S; h)·|F_n ∩ [h]|.
//!
//! cargo run --example verify_constraint

use supertask::enumerate::catalog;
use supertask::{format_rational, verify_constraint, ChainPrefix, EventSpec, Predicate};

fn main() -> supertask::Result<()> {
    let z5 = ChainPrefix::initial_segment(5);
    let pair = EventSpec::tight(2, Predicate::equals(2, [1, 2]))?;
    let check = verify_constraint(&z5, &pair, 5)?;
    println!("S = {{B_2 = {{1,2}}}} on Z_5: {:?} over {} histories", check.verdict, check.per_history.len());
    for slice in check.by_j() {
        println!(
            "  j={}: {} histories, joint {} = (j/(k+1)) · marginal {} -> {}",
            slice.j,
            slice.histories,
            format_rational(&slice.joint),
            format_rational(&slice.marginal),
            slice.holds
        );
    }

    let chain = ChainPrefix::new(vec![5, 2, 9, 4, 1, 12, 7, 3])?;
    let mut checked = 0;
    for n in 2..=7 {
        for k in 1..n {
            for ev in catalog(&chain, n, k)? {
                assert!(verify_constraint(&chain, &ev, n)?.passed());
                checked += 1;
            }
        }
    }
    println!("{checked} catalog events verified on chain {:?}", chain.added());
    Ok(())
}
