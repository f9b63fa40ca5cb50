//! Reproducible experiments: manifests in, trichotomy reports and artifact files out.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::chain::{Ball, ChainPrefix};
use crate::construct::{self, ConstructionConfig, Mode};
use crate::enumerate::{self, Engine, SetBound};
use crate::error::{Error, Result};
use crate::event::{EventSpec, Predicate};
use crate::limits::{self, Convergence};
use crate::rational::{self, ratio, Rational};
use crate::simulate::{self, SimulationConfig, DEFAULT_SEED};
use crate::target::{SizeClass, TargetSet};

pub const FORMAT_VERSION: u32 = 1;

/// How the limit is estimated; stated verbatim in every report.
pub const LIMIT_NOTE: &str = "limit values are trailing-window diagnostics of finite density traces; \
no ultrafilter limit is computed. On traces that converge the two agree.";

fn default_window() -> String {
    "1/10".into()
}

fn default_tol() -> String {
    "1/100".into()
}

fn default_n() -> usize {
    8
}

fn default_trials() -> u64 {
    100_000
}

fn default_mode() -> Mode {
    Mode::PaperRule
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetRequest {
    pub target: TargetSet,
    /// Rationals as strings: `"1/3"`, `"0.9"`, `"1"`.
    pub p: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentManifest {
    pub format_version: u32,
    pub name: String,
    #[serde(default)]
    pub targets: Vec<TargetRequest>,
    pub steps: usize,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    /// Truncation for the exact and sampled final-ball checks.
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_window")]
    pub window: String,
    #[serde(default = "default_tol")]
    pub tol: String,
    /// Finite sets `A` for the `x_n(R ∈ A) ≤ |A|/n` section.
    #[serde(default)]
    pub finite_sets: Vec<BTreeSet<Ball>>,
    /// Complements `A^c` of cofinite sets for the `≥ 1 - |A^c|/n` section.
    #[serde(default)]
    pub cofinite_sets: Vec<BTreeSet<Ball>>,
    /// Output directory, relative to the manifest's directory.
    pub out_dir: PathBuf,
}

impl ExperimentManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read manifest {}: {e}", path.display())))?;
        let m: Self = serde_json::from_str(&text).map_err(|e| Error::Config(format!("invalid manifest: {e}")))?;
        m.settings()?;
        Ok(m)
    }

    pub fn settings(&self) -> Result<RunSettings> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Config(format!(
                "manifest format version {} (expected {FORMAT_VERSION})",
                self.format_version
            )));
        }
        if self.steps == 0 || self.trials == 0 || self.n == 0 {
            return Err(Error::Config("steps, trials and n must be positive".into()));
        }
        for req in &self.targets {
            for p in &req.p {
                let p = rational::parse_rational(p).map_err(|e| Error::Config(e.to_string()))?;
                if !rational::in_unit_interval(&p) {
                    return Err(Error::Config(format!("p = {} outside [0, 1]", rational::format_rational(&p))));
                }
            }
        }
        Ok(RunSettings {
            steps: self.steps,
            mode: self.mode,
            n: self.n,
            trials: self.trials,
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            window: rational::parse_rational(&self.window).map_err(|e| Error::Config(e.to_string()))?,
            tol: rational::parse_rational(&self.tol).map_err(|e| Error::Config(e.to_string()))?,
        })
    }
}

/// Knobs shared by every steering run in one report.
#[derive(Clone, Debug)]
pub struct RunSettings {
    pub steps: usize,
    pub mode: Mode,
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub window: Rational,
    pub tol: Rational,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            steps: 10_000,
            mode: Mode::PaperRule,
            n: default_n(),
            trials: default_trials(),
            seed: DEFAULT_SEED,
            window: ratio(1, 10),
            tol: ratio(1, 100),
        }
    }
}

/// A reported number and where it came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "provenance", content = "value", rename_all = "snake_case")]
pub enum Claim {
    /// Exact rational, `"num/den"`.
    Exact(String),
    /// Monte-Carlo estimate.
    Sampled(f64),
    /// Window diagnostic, not a limit.
    Diagnostic(String),
}

impl Claim {
    fn exact(r: &Rational) -> Self {
        Claim::Exact(rational::format_rational(r))
    }
}

/// A report section that is present even when it has nothing to say.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Section<T> {
    Ok { entries: Vec<T> },
    Skipped { reason: String },
}

impl<T> Section<T> {
    fn from_entries(entries: Vec<T>, reason: &str) -> Self {
        if entries.is_empty() {
            Section::Skipped { reason: reason.into() }
        } else {
            Section::Ok { entries }
        }
    }

    pub fn entries(&self) -> &[T] {
        match self {
            Section::Ok { entries } => entries,
            Section::Skipped { .. } => &[],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainSummary {
    pub length: usize,
    pub head: Vec<Ball>,
    pub max_ball: Ball,
    pub file: Option<PathBuf>,
    pub trace_file: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub k: usize,
    pub density: Claim,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsSummary {
    pub verdict: Convergence,
    pub liminf: Claim,
    pub limsup: Claim,
    pub cesaro_mean: Claim,
    pub converged_to_p: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteeringEntry {
    pub target: TargetSet,
    #[serde(with = "rational::serde_str")]
    pub p: Rational,
    pub mode: Mode,
    pub steps: usize,
    pub chain: ChainSummary,
    pub trace_tail: Vec<TracePoint>,
    /// Truncation used for the exact and sampled checks.
    pub n: usize,
    /// `x_n(R ∈ A)` by full enumeration.
    pub enumerated: Claim,
    /// `|Z_n ∩ A| / n`.
    pub combinatorial: Claim,
    pub enumeration_agrees: bool,
    /// Per-history constraint check for `{R ∈ A}` at level 1.
    pub constraint_holds: bool,
    pub sampled: Claim,
    pub sampled_within_4_sigma: bool,
    pub diagnostics: DiagnosticsSummary,
    /// Residue demos only: converged to a value other than `1/m`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniformity_violated: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefusedEntry {
    pub target: TargetSet,
    pub size_class: SizeClass,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub n: usize,
    pub value: Claim,
    pub bound: Claim,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundEntry {
    /// Members of `A` (finite) or of `A^c` (cofinite).
    pub listed: BTreeSet<Ball>,
    pub chain: String,
    pub rows: Vec<BoundRow>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckTally {
    pub exact_passed: usize,
    pub exact_failed: usize,
    pub statistical_passed: usize,
    pub statistical_failed: usize,
}

impl CheckTally {
    fn exact(&mut self, ok: bool) {
        if ok {
            self.exact_passed += 1
        } else {
            self.exact_failed += 1
        }
    }

    fn statistical(&mut self, ok: bool) {
        if ok {
            self.statistical_passed += 1
        } else {
            self.statistical_failed += 1
        }
    }

    pub fn exact_ok(&self) -> bool {
        self.exact_failed == 0
    }

    pub fn all_ok(&self) -> bool {
        self.exact_failed == 0 && self.statistical_failed == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub format_version: u32,
    pub name: String,
    pub seed: u64,
    pub limit_note: String,
    pub steering: Section<SteeringEntry>,
    pub refused: Section<RefusedEntry>,
    pub finite: Section<BoundEntry>,
    pub cofinite: Section<BoundEntry>,
    pub checks: CheckTally,
}

/// Where artifacts go; `None` keeps everything in memory.
#[derive(Clone, Debug, Default)]
pub struct Outputs {
    pub dir: Option<PathBuf>,
}

impl Outputs {
    pub fn to_dir(dir: impl Into<PathBuf>) -> Self {
        Self { dir: Some(dir.into()) }
    }

    fn path(&self, name: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(name))
    }
}

pub fn write_chain(path: &Path, chain: &ChainPrefix) -> Result<()> {
    fs::write(path, serde_json::to_string(chain)? + "\n")?;
    Ok(())
}

pub fn read_chain(path: &Path) -> Result<ChainPrefix> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

#[derive(Serialize, Deserialize)]
struct TraceRow {
    k: usize,
    count: u64,
    density_num: String,
    density_den: String,
}

/// Writes `k, count, density_num, density_den` for `k = 1..=n`.
pub fn write_trace<W: std::io::Write>(out: W, chain: &ChainPrefix, target: &TargetSet) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (i, count) in construct::membership_counts(chain, target).into_iter().enumerate() {
        let d = ratio(count, i as u64 + 1);
        w.serialize(TraceRow { k: i + 1, count, density_num: d.numer().to_string(), density_den: d.denom().to_string() })?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the density column of a trace file back as exact rationals.
pub fn read_trace<R: std::io::Read>(input: R) -> Result<Vec<Rational>> {
    let mut r = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for (i, row) in r.deserialize::<TraceRow>().enumerate() {
        let row = row?;
        if row.k != i + 1 {
            return Err(Error::Parse(format!("trace row {} has k = {}", i + 1, row.k)));
        }
        out.push(rational::parse_rational(&format!("{}/{}", row.density_num, row.density_den))?);
    }
    Ok(out)
}

fn steer(
    index: usize,
    target: &TargetSet,
    p: &Rational,
    settings: &RunSettings,
    engine: Engine,
    outputs: &Outputs,
    tally: &mut CheckTally,
) -> Result<(SteeringEntry, ChainPrefix)> {
    let config = ConstructionConfig::new(target.clone(), p.clone(), settings.steps, settings.mode)?;
    let chain = construct::construct_chain(&config)?;

    let file = outputs.path(&format!("chain-{index}.json"));
    let trace_file = outputs.path(&format!("trace-{index}.csv"));
    if let Some(path) = &file {
        write_chain(path, &chain)?;
    }
    if let Some(path) = &trace_file {
        write_trace(fs::File::create(path)?, &chain, target)?;
    }

    let trace = construct::density_trace(&chain, target);
    let trace_tail = trace
        .iter()
        .enumerate()
        .skip(trace.len().saturating_sub(5))
        .map(|(i, d)| TracePoint { k: i + 1, density: Claim::exact(d) })
        .collect();

    let n = settings.n.min(engine.cap).min(chain.len());
    let final_in = EventSpec::tight(1, Predicate::final_in(target.clone()))?;
    let enumerated = engine.density(&chain, &final_in, n)?.value;
    let combinatorial = trace[n - 1].clone();
    let enumeration_agrees = enumerated == combinatorial;
    tally.exact(enumeration_agrees);
    let constraint_holds = n < 2 || engine.verify_constraint(&chain, &final_in, n)?.passed();
    tally.exact(constraint_holds);

    let sim = SimulationConfig::new(chain.truncate(n)?, settings.trials, settings.seed)?.with_target(target.clone());
    let sampled = simulate::simulate_with_workers(&sim, engine.workers)?.target_frequency.unwrap_or(f64::NAN);
    let exact_f = rational::to_f64(&enumerated);
    let sampled_ok = (sampled - exact_f).abs() <= 4.0 * simulate::binomial_sigma(exact_f, settings.trials);
    tally.statistical(sampled_ok);

    let diag = limits::diagnose_named(&format!("density trace #{index}"), &trace, &settings.window, &settings.tol)?;
    let converged_to_p = diag.verdict.converged_near(p, &settings.tol);
    tally.statistical(converged_to_p);

    let entry = SteeringEntry {
        target: target.clone(),
        p: p.clone(),
        mode: settings.mode,
        steps: settings.steps,
        chain: ChainSummary {
            length: chain.len(),
            head: chain.added().iter().take(12).copied().collect(),
            max_ball: chain.added().iter().copied().max().unwrap_or(0),
            file,
            trace_file,
        },
        trace_tail,
        n,
        enumerated: Claim::exact(&enumerated),
        combinatorial: Claim::exact(&combinatorial),
        enumeration_agrees,
        constraint_holds,
        sampled: Claim::Sampled(sampled),
        sampled_within_4_sigma: sampled_ok,
        diagnostics: DiagnosticsSummary {
            verdict: diag.verdict,
            liminf: Claim::Diagnostic(rational::format_rational(&diag.liminf)),
            limsup: Claim::Diagnostic(rational::format_rational(&diag.limsup)),
            cesaro_mean: Claim::Diagnostic(format!("{:.6}", diag.cesaro_mean)),
            converged_to_p,
        },
        uniformity_violated: None,
    };
    Ok((entry, chain))
}

/// Truncations `10, 100, …` up to `max_n`, plus `max_n` itself.
fn decades(max_n: usize) -> Vec<usize> {
    let mut ns: Vec<usize> = std::iter::successors(Some(10usize), |n| n.checked_mul(10)).take_while(|&n| n <= max_n).collect();
    if ns.last() != Some(&max_n) && max_n > 0 {
        ns.push(max_n);
    }
    ns
}

fn bound_rows(
    chain: &ChainPrefix,
    listed: &BTreeSet<Ball>,
    cofinite: bool,
    tally: &mut CheckTally,
) -> Result<Vec<BoundRow>> {
    decades(chain.len())
        .into_iter()
        .map(|n| {
            let b: SetBound = if cofinite {
                enumerate::cofinite_set_bound(chain, listed, n)?
            } else {
                enumerate::finite_set_bound(chain, listed, n)?
            };
            tally.exact(b.holds);
            Ok(BoundRow { n, value: Claim::exact(&b.value), bound: Claim::exact(&b.bound), holds: b.holds })
        })
        .collect()
}

/// Steering for every `(A, p)` plus the finite and cofinite bound sections.
pub fn run_experiment(manifest: &ExperimentManifest, outputs: &Outputs, engine: Engine) -> Result<TheoremReport> {
    let settings = manifest.settings()?;
    if let Some(dir) = &outputs.dir {
        fs::create_dir_all(dir)?;
    }
    let mut tally = CheckTally::default();
    let mut steering = Vec::new();
    let mut refused = Vec::new();
    let mut finite_sets = manifest.finite_sets.clone();
    let mut cofinite_sets = manifest.cofinite_sets.clone();
    let mut bound_chain: Option<ChainPrefix> = None;

    for req in &manifest.targets {
        let class = req.target.size_class();
        if class != SizeClass::InfiniteCoinfinite {
            let err = ConstructionConfig::new(req.target.clone(), ratio(0, 1), 1, settings.mode).unwrap_err();
            refused.push(RefusedEntry { target: req.target.clone(), size_class: class, reason: err.to_string() });
            let listed = req.target.exceptions().unwrap_or_default();
            match class {
                SizeClass::Finite => finite_sets.push(listed),
                _ => cofinite_sets.push(listed),
            }
            continue;
        }
        for p in &req.p {
            let p = rational::parse_rational(p)?;
            let (entry, chain) = steer(steering.len(), &req.target, &p, &settings, engine, outputs, &mut tally)?;
            steering.push(entry);
            bound_chain.get_or_insert(chain);
        }
    }

    let (chain, chain_name) = match bound_chain {
        Some(c) => (c, "chain-0".to_string()),
        None => (ChainPrefix::initial_segment(settings.steps + 1), "natural order".to_string()),
    };
    let finite = finite_sets
        .iter()
        .map(|set| Ok(BoundEntry { listed: set.clone(), chain: chain_name.clone(), rows: bound_rows(&chain, set, false, &mut tally)? }))
        .collect::<Result<Vec<_>>>()?;
    let cofinite = cofinite_sets
        .iter()
        .map(|set| Ok(BoundEntry { listed: set.clone(), chain: chain_name.clone(), rows: bound_rows(&chain, set, true, &mut tally)? }))
        .collect::<Result<Vec<_>>>()?;

    let report = TheoremReport {
        format_version: FORMAT_VERSION,
        name: manifest.name.clone(),
        seed: settings.seed,
        limit_note: LIMIT_NOTE.into(),
        steering: Section::from_entries(steering, "no infinite/co-infinite target requested"),
        refused: Section::from_entries(refused, "no finite or cofinite target requested for steering"),
        finite: Section::from_entries(finite, "no finite set requested"),
        cofinite: Section::from_entries(cofinite, "no cofinite set requested"),
        checks: tally,
    };
    if let Some(path) = outputs.path("report.json") {
        fs::write(path, serde_json::to_string_pretty(&report)? + "\n")?;
    }
    Ok(report)
}

/// Steers each residue class mod `m` to each requested `p`, flagging runs
/// that land away from `1/m`.
pub fn residue_demo(m: u64, ps: &[Rational], settings: &RunSettings, outputs: &Outputs, engine: Engine) -> Result<TheoremReport> {
    let targets = (0..m).map(|r| TargetSet::residue(m, r)).collect::<Result<Vec<_>>>()?;
    residue_demo_for(m, &targets, ps, settings, outputs, engine)
}

/// As [`residue_demo`], restricted to the given classes.
pub fn residue_demo_for(
    m: u64,
    classes: &[TargetSet],
    ps: &[Rational],
    settings: &RunSettings,
    outputs: &Outputs,
    engine: Engine,
) -> Result<TheoremReport> {
    if m < 2 {
        return Err(Error::Config("modulus must be at least 2".into()));
    }
    if let Some(p) = ps.iter().find(|p| !rational::in_unit_interval(p)) {
        return Err(Error::Config(format!("p = {} outside [0, 1]", rational::format_rational(p))));
    }
    if let Some(dir) = &outputs.dir {
        fs::create_dir_all(dir)?;
    }
    let uniform = ratio(1, m);
    let mut tally = CheckTally::default();
    let mut steering = Vec::new();
    for target in classes {
        for p in ps {
            let (mut entry, _) = steer(steering.len(), target, p, settings, engine, outputs, &mut tally)?;
            entry.uniformity_violated = Some(
                entry.diagnostics.converged_to_p && (p - &uniform).abs() > settings.tol,
            );
            steering.push(entry);
        }
    }
    let report = TheoremReport {
        format_version: FORMAT_VERSION,
        name: format!("residue classes mod {m}"),
        seed: settings.seed,
        limit_note: LIMIT_NOTE.into(),
        steering: Section::from_entries(steering, "no p requested"),
        refused: Section::Skipped { reason: "residue classes are always infinite and co-infinite".into() },
        finite: Section::Skipped { reason: "residue demo covers infinite/co-infinite targets only".into() },
        cofinite: Section::Skipped { reason: "residue demo covers infinite/co-infinite targets only".into() },
        checks: tally,
    };
    if let Some(path) = outputs.path("report.json") {
        fs::write(path, serde_json::to_string_pretty(&report)? + "\n")?;
    }
    Ok(report)
}
