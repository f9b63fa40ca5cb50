//! Sample the supertask by Monte-Carlo and compare with exact enumeration.
//!
//! cargo run --example simulate

use supertask::simulate::DEFAULT_SEED;
use supertask::{construct_chain, crosscheck, ratio, simulate, ConstructionConfig, Mode, SimulationConfig, TargetSet};

fn main() -> supertask::Result<()> {
    let evens = TargetSet::evens();
    let chain = construct_chain(&ConstructionConfig::new(evens.clone(), ratio(1, 3), 19, Mode::PaperRule)?)?;

    let report = simulate(&SimulationConfig::new(chain.clone(), 1_000_000, DEFAULT_SEED)?.with_target(evens))?;
    println!("Z_20 = {:?}, {} trials", chain.added(), report.trials);
    for c in report.counts.iter().take(5) {
        println!("  ball {:>2}: {:.5}", c.ball, c.count as f64 / report.trials as f64);
    }
    println!("  ...  P(R even) ≈ {:.5}", report.target_frequency.unwrap_or_default());

    let x = crosscheck(&chain, 6, 100_000, DEFAULT_SEED)?;
    println!("crosscheck on Z_6: max deviation {:.5}, pass = {}", x.max_deviation, x.pass);
    for row in &x.rows {
        println!("  ball {:>2}: exact {} sampled {:.5} (bound {:.5})", row.ball, row.exact, row.sampled, row.bound);
    }
    Ok(())
}
