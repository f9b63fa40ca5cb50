//! Convergence diagnostics for density sequences.
//!
//! The limit functional applied to `x(S)` is only ever needed here on
//! sequences the construction makes convergent, where it agrees with the
//! ordinary limit. These diagnostics read the trailing window of a finite
//! run: its minimum and maximum stand in for liminf and limsup, and a narrow
//! enough window counts as convergence. Non-convergent sequences are
//! reported as such rather than assigned a value.

use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Convergence {
    /// Window spread within tolerance; `value` is the window midpoint.
    Converged {
        #[serde(with = "rational::serde_str")]
        value: Rational,
        #[serde(with = "rational::serde_str")]
        tolerance: Rational,
    },
    /// Spread above tolerance with no dominant trend.
    Oscillating,
    /// Spread above tolerance and the window is still drifting.
    Undecided,
}

impl Convergence {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            Convergence::Converged { value, .. } => Some(value),
            _ => None,
        }
    }

    /// Converged to within `tol` of `target`.
    pub fn converged_near(&self, target: &Rational, tol: &Rational) -> bool {
        self.value().is_some_and(|v| (v - target).abs() <= *tol)
    }
}

impl std::fmt::Display for Convergence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Convergence::Converged { value, tolerance } => write!(
                f,
                "converged to {:.5} (±{})",
                rational::to_f64(value),
                rational::format_rational(tolerance)
            ),
            Convergence::Oscillating => f.write_str("oscillating"),
            Convergence::Undecided => f.write_str("undecided"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceDiagnostics {
    pub source: String,
    pub len: usize,
    #[serde(with = "rational::serde_str")]
    pub window: Rational,
    pub window_len: usize,
    /// Trailing-window minimum.
    #[serde(with = "rational::serde_str")]
    pub liminf: Rational,
    /// Trailing-window maximum.
    #[serde(with = "rational::serde_str")]
    pub limsup: Rational,
    /// Mean of all terms (floating point, diagnostic only).
    pub cesaro_mean: f64,
    /// Difference of the window's second-half and first-half means (diagnostic only).
    pub drift: f64,
    pub verdict: Convergence,
}

/// Length of the trailing window covering `fraction` of `len` terms (at least one).
pub fn window_len(len: usize, fraction: &Rational) -> usize {
    let scaled = (fraction * Rational::from_integer(len.into())).ceil();
    scaled.to_integer().to_usize().unwrap_or(len).clamp(1, len)
}

pub fn diagnose(seq: &[Rational], window: &Rational, tol: &Rational) -> Result<SequenceDiagnostics> {
    diagnose_named("sequence", seq, window, tol)
}

pub fn diagnose_named(source: &str, seq: &[Rational], window: &Rational, tol: &Rational) -> Result<SequenceDiagnostics> {
    if seq.is_empty() {
        return Err(Error::Domain("cannot diagnose an empty sequence".into()));
    }
    if *window <= Rational::zero() || *window > Rational::from_integer(1.into()) {
        return Err(Error::Domain(format!("window {} not in (0, 1]", rational::format_rational(window))));
    }
    if *tol < Rational::zero() {
        return Err(Error::Domain("tolerance must be nonnegative".into()));
    }
    let wlen = window_len(seq.len(), window);
    let tail = &seq[seq.len() - wlen..];
    let liminf = tail.iter().min().expect("nonempty").clone();
    let limsup = tail.iter().max().expect("nonempty").clone();
    let spread = &limsup - &liminf;

    let mean = |xs: &[Rational]| xs.iter().map(rational::to_f64).sum::<f64>() / xs.len() as f64;
    let cesaro_mean = mean(seq);
    let half = wlen / 2;
    let drift = if half == 0 { 0.0 } else { mean(&tail[wlen - half..]) - mean(&tail[..half]) };

    let verdict = if spread <= *tol {
        let two = Rational::from_integer(2.into());
        Convergence::Converged { value: (&liminf + &limsup) / two, tolerance: tol.clone() }
    } else if drift.abs() * 4.0 >= rational::to_f64(&spread) {
        Convergence::Undecided
    } else {
        Convergence::Oscillating
    };
    Ok(SequenceDiagnostics {
        source: source.to_string(),
        len: seq.len(),
        window: window.clone(),
        window_len: wlen,
        liminf,
        limsup,
        cesaro_mean,
        drift,
        verdict,
    })
}
