//! Exhaustive and windowed sweeps producing machine-readable reports.

mod enumerate;
mod gadgets;
mod hardware;
mod lemma_suite;
mod oscillation;
mod theorems;

use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use enumerate::{binade, enumerate_floats, ExpWindow};
pub use gadgets::{boundary_points, verify_gadgets};
pub use hardware::{adversarial_f32, hardware_conformance};
pub use lemma_suite::{run_lemma_suite, LemmaId};
pub use oscillation::{catastrophic_identity, eq3_closed_form, reproduce_oscillation, rounding_parity_table};
pub use theorems::{grid_points, overflow_scan, unit_box, verify_bound, verify_memorization};

/// Counterexamples kept per report.
pub const MAX_COUNTEREXAMPLES: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub input: Vec<String>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub format: String,
    pub domain: String,
    pub checked: u64,
    pub passed: u64,
    /// Smallest failing inputs in enumeration order.
    pub counterexamples: Vec<Counterexample>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Not serialized, so that documents stay byte-stable across runs.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl Report {
    pub fn new(suite: &str, format: &str, domain: &str) -> Self {
        Report {
            suite: suite.into(),
            format: format.into(),
            domain: domain.into(),
            checked: 0,
            passed: 0,
            counterexamples: vec![],
            notes: vec![],
            wall_time: Duration::ZERO,
        }
    }

    pub fn is_pass(&self) -> bool {
        self.passed == self.checked && self.counterexamples.is_empty()
    }

    pub fn failed(&self) -> u64 {
        self.checked - self.passed
    }

    pub fn absorb(&mut self, t: Tally) {
        self.checked += t.checked;
        self.passed += t.passed;
        for c in t.cex {
            if self.counterexamples.len() < MAX_COUNTEREXAMPLES {
                self.counterexamples.push(c);
            }
        }
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn summary(&self) -> String {
        format!(
            "{} [{}] {}: {}/{} passed{}",
            self.suite,
            self.format,
            self.domain,
            self.passed,
            self.checked,
            match self.counterexamples.first() {
                Some(c) => format!(", first failure ({}): {}", c.input.join(", "), c.detail),
                None => String::new(),
            }
        )
    }
}

/// Running totals of one sweep partition.
#[derive(Clone, Debug, Default)]
pub struct Tally {
    pub checked: u64,
    pub passed: u64,
    pub cex: Vec<Counterexample>,
}

impl Tally {
    pub fn pass(&mut self) {
        self.checked += 1;
        self.passed += 1;
    }

    pub fn fail(&mut self, input: Vec<String>, detail: impl Into<String>) {
        self.checked += 1;
        if self.cex.len() < MAX_COUNTEREXAMPLES {
            self.cex.push(Counterexample { input, detail: detail.into() });
        }
    }

    pub fn check(&mut self, ok: bool, input: impl FnOnce() -> Vec<String>, detail: impl FnOnce() -> String) {
        if ok {
            self.pass()
        } else {
            self.fail(input(), detail())
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.checked += other.checked;
        self.passed += other.passed;
        for c in other.cex {
            if self.cex.len() >= MAX_COUNTEREXAMPLES {
                break;
            }
            self.cex.push(c);
        }
        self
    }
}

/// Runs `f(i)` for i in 0..n across threads; tallies merge in index order, so the
/// kept counterexamples are the first ones in enumeration order.
pub fn par_tally(n: usize, f: impl Fn(usize, &mut Tally) + Sync) -> Tally {
    let chunk = (n / (rayon::current_num_threads() * 8)).max(1);
    let parts: Vec<Tally> = (0..n.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut t = Tally::default();
            for i in c * chunk..((c + 1) * chunk).min(n) {
                f(i, &mut t);
            }
            t
        })
        .collect();
    parts.into_iter().fold(Tally::default(), Tally::merge)
}
