//! Run an experiment manifest end to end and write its report.
//!
//! cargo run --example run_manifest -- manifests/steer-evens.json

use std::path::PathBuf;

use supertask::enumerate::Engine;
use supertask::experiment::{run_experiment, ExperimentManifest, Outputs};

fn main() -> supertask::Result<()> {
    let path = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "manifests/steer-evens.json".into()));
    let manifest = ExperimentManifest::load(&path)?;
    let out = path.parent().unwrap_or(&PathBuf::from(".")).join(&manifest.out_dir);
    let report = run_experiment(&manifest, &Outputs::to_dir(out.clone()), Engine::default())?;
    println!(
        "{}: {} steering runs, {} refused; checks {:?}; report in {}",
        report.name,
        report.steering.entries().len(),
        report.refused.entries().len(),
        report.checks,
        out.join("report.json").display()
    );
    Ok(())
}
