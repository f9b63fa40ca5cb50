//! Finite-scale model of the infinite-lottery supertask.
//!
//! Balls `1, 2, 3, …` start in an urn; going backward in time, god `k` finds
//! `k + 1` balls and removes one uniformly at random, so a single ball
//! survives at the end. An outcome is a nested chain of urns
//! `B_1 ⊂ B_2 ⊂ …` with `|B_k| = k`. This crate works with finite prefixes
//! of such chains:
//!
//! - [`construct`] builds chains whose density in a target set `A` is steered
//!   toward any `p ∈ [0, 1]`;
//! - [`enumerate`] walks all `n!` removal orders below `Z_n` and checks the
//!   conditional-removal identities and survival laws in exact arithmetic;
//! - [`simulate`] samples removal orders with reproducible parallel streams;
//! - [`limits`] diagnoses convergence of density sequences;
//! - [`experiment`] and [`cli`] tie these into reports and a command line.

pub mod chain;
pub mod cli;
pub mod construct;
pub mod enumerate;
pub mod error;
pub mod event;
pub mod experiment;
pub mod limits;
pub mod order;
pub mod par;
pub mod rational;
pub mod simulate;
pub mod target;

pub use chain::{Ball, ChainPrefix, Urn};
pub use construct::{construct_chain, density_trace, ConstructionConfig, Mode};
pub use enumerate::{
    count_n, density, enumerate_orders, finite_set_bound, survival_density, verify_constraint, ConstraintCheck,
    DensityReport, Engine,
};
pub use error::{Error, Result};
pub use event::{Atom, EventSpec, History, Predicate, UrnStack};
pub use limits::{diagnose, Convergence, SequenceDiagnostics};
pub use order::RemovalOrder;
pub use rational::{format_rational, parse_rational, ratio, Rational};
pub use simulate::{crosscheck, simulate, SimulationConfig, SimulationReport};
pub use target::{SizeClass, TargetSet};
