//! Steer each residue class mod 3 to several densities and print the
//! exact, sampled and diagnostic results side by side.
//!
//! cargo run --example residue_demo

use supertask::enumerate::Engine;
use supertask::experiment::{residue_demo, Claim, Outputs, RunSettings};
use supertask::ratio;

fn show(c: &Claim) -> String {
    match c {
        Claim::Exact(s) | Claim::Diagnostic(s) => s.clone(),
        Claim::Sampled(v) => format!("{v:.4}"),
    }
}

fn main() -> supertask::Result<()> {
    let settings = RunSettings { trials: 50_000, ..RunSettings::default() };
    let report = residue_demo(3, &[ratio(1, 4), ratio(9, 10)], &settings, &Outputs::default(), Engine::default())?;
    for e in report.steering.entries() {
        println!(
            "{:?} p={}: x_{}(R ∈ A) exact {} sampled {}  diagnose {}",
            e.target,
            supertask::format_rational(&e.p),
            e.n,
            show(&e.enumerated),
            show(&e.sampled),
            e.diagnostics.verdict
        );
    }
    println!("checks: {:?}", report.checks);
    Ok(())
}
