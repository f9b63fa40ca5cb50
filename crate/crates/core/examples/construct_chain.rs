//! Build a chain that steers the density of the even numbers to 1/3, with
//! both the square-exception rule and the plain greedy rule.
//!
//! cargo run --example construct_chain

use supertask::{construct_chain, density_trace, format_rational, ratio, ConstructionConfig, Mode, TargetSet};

fn main() -> supertask::Result<()> {
    let evens = TargetSet::evens();
    for mode in [Mode::Greedy, Mode::PaperRule] {
        let chain = construct_chain(&ConstructionConfig::new(evens.clone(), ratio(1, 3), 10, mode)?)?;
        let trace: Vec<String> = density_trace(&chain, &evens).iter().map(format_rational).collect();
        println!("{mode:?}: added {:?}", chain.added());
        println!("{:>width$}  density {}", "", trace.join(", "), width = format!("{mode:?}").len());
    }

    let long = construct_chain(&ConstructionConfig::new(evens.clone(), ratio(1, 3), 10_000, Mode::PaperRule)?)?;
    let last = density_trace(&long, &evens).pop().expect("nonempty");
    println!("after 10000 steps: density {} = {:.5}", format_rational(&last), supertask::rational::to_f64(&last));
    Ok(())
}
