//! Convergence diagnostics on constructed density traces: a steerable target
//! converges, and an alternating sequence is reported as oscillating.
//!
//! cargo run --example limits

use supertask::{construct_chain, density_trace, diagnose, format_rational, ratio, ConstructionConfig, Mode, TargetSet};

fn main() -> supertask::Result<()> {
    let (window, tol) = (ratio(1, 10), ratio(1, 100));
    let target = TargetSet::residue(3, 0)?;
    for p in [ratio(1, 4), ratio(9, 10)] {
        let chain = construct_chain(&ConstructionConfig::new(target.clone(), p.clone(), 10_000, Mode::PaperRule)?)?;
        let d = diagnose(&density_trace(&chain, &target), &window, &tol)?;
        println!(
            "p = {}: liminf {:.5}, limsup {:.5}, Cesàro {:.5}, verdict {}",
            format_rational(&p),
            supertask::rational::to_f64(&d.liminf),
            supertask::rational::to_f64(&d.limsup),
            d.cesaro_mean,
            d.verdict
        );
    }
    let alternating: Vec<_> = (0..1000).map(|i| ratio(i % 2, 1)).collect();
    println!("0,1,0,1,...: {}", diagnose(&alternating, &window, &tol)?.verdict);
    Ok(())
}
