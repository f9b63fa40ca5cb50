//! Finite targets get vanishing probability, cofinite ones get probability
//! tending to one, and only infinite/co-infinite targets can be steered.
//!
//! cargo run --example trichotomy

use std::collections::BTreeSet;

use supertask::enumerate::cofinite_set_bound;
use supertask::{construct_chain, finite_set_bound, format_rational, ratio, ChainPrefix, ConstructionConfig, Mode, TargetSet};

fn main() -> supertask::Result<()> {
    let chain = ChainPrefix::initial_segment(1_000_000);
    let listed: BTreeSet<u64> = [3, 7, 11].into();
    for n in [10, 1_000, 1_000_000] {
        let f = finite_set_bound(&chain, &listed, n)?;
        let c = cofinite_set_bound(&chain, &listed, n)?;
        println!(
            "n = {n:>7}: x_n(R ∈ {{3,7,11}}) = {} ≤ {};  x_n(R ∉ {{3,7,11}}) = {} ≥ {}",
            format_rational(&f.value),
            format_rational(&f.bound),
            format_rational(&c.value),
            format_rational(&c.bound)
        );
    }
    for target in [TargetSet::finite(&listed)?, TargetSet::cofinite(&listed)?] {
        let refused = ConstructionConfig::new(target.clone(), ratio(1, 2), 100, Mode::PaperRule).and_then(|c| construct_chain(&c));
        println!("{:?} target refused: {}", target.size_class(), refused.unwrap_err());
    }
    Ok(())
}
