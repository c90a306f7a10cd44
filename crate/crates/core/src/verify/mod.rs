//! Exhaustive and randomized checks of the constructions, shared by the
//! `verify` subcommand and the test suites.

mod e2e;
mod sweeps;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::oracle::DEFAULT_MAX_ELEMENTS;

pub use e2e::{
    negative_control, negative_control_fixture, oracle_completeness, random_automaton, thm7_e2e,
    thm9_e2e, LabelRange,
};
pub use sweeps::{gram, prop3, prop3_shift, prop5, prop8, sweep_words};

/// Default seed of the randomized suites.
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Counterexamples kept verbatim in a report.
const MAX_COUNTEREXAMPLES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Prop3,
    Prop3Shift,
    Prop5,
    Prop8,
    Thm7E2e,
    Thm9E2e,
    Gram,
    Oracle,
    NegativeControl,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Prop3,
        Suite::Prop3Shift,
        Suite::Prop5,
        Suite::Prop8,
        Suite::Thm7E2e,
        Suite::Thm9E2e,
        Suite::Gram,
        Suite::Oracle,
        Suite::NegativeControl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Prop3 => "prop3",
            Suite::Prop3Shift => "prop3-shift",
            Suite::Prop5 => "prop5",
            Suite::Prop8 => "prop8",
            Suite::Thm7E2e => "thm7-e2e",
            Suite::Thm9E2e => "thm9-e2e",
            Suite::Gram => "gram",
            Suite::Oracle => "oracle",
            Suite::NegativeControl => "negative-control",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
                Error::InvalidParameter(format!(
                    "unknown suite `{s}` (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

/// Size parameters; `None` picks the suite's default.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub max_len: Option<usize>,
    /// Number of random instances for the randomized suites.
    pub count: Option<usize>,
    pub max_elements: usize,
    pub parallel: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: DEFAULT_SEED,
            max_len: None,
            count: None,
            max_elements: DEFAULT_MAX_ELEMENTS,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checked: u64,
    pub failures: u64,
    pub counterexamples: Vec<String>,
    pub details: Value,
    pub wall_time: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite.name(),
            "passed": self.passed(),
            "checked": self.checked,
            "failures": self.failures,
            "counterexamples": self.counterexamples,
            "details": self.details,
            "wall_time_ms": self.wall_time.as_secs_f64() * 1e3,
        })
    }
}

/// Accumulates checks and failures for one report.
#[derive(Debug, Default)]
pub(crate) struct Tally {
    pub checked: u64,
    pub failures: u64,
    pub counterexamples: Vec<String>,
}

impl Tally {
    pub fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.fail(describe());
        }
    }

    pub fn fail(&mut self, message: String) {
        self.failures += 1;
        if self.counterexamples.len() < MAX_COUNTEREXAMPLES {
            self.counterexamples.push(message);
        }
    }

    pub fn merge(&mut self, other: Tally) {
        self.checked += other.checked;
        self.failures += other.failures;
        let room = MAX_COUNTEREXAMPLES.saturating_sub(self.counterexamples.len());
        self.counterexamples
            .extend(other.counterexamples.into_iter().take(room));
    }

    pub fn into_report(self, suite: Suite, details: Value, started: Instant) -> SuiteReport {
        SuiteReport {
            suite,
            checked: self.checked,
            failures: self.failures,
            counterexamples: self.counterexamples,
            details,
            wall_time: started.elapsed(),
        }
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<SuiteReport> {
    match suite {
        Suite::Prop3 => prop3(opts.max_len.unwrap_or(9)),
        Suite::Prop3Shift => prop3_shift(&[3, 4], opts.max_len.unwrap_or(7)),
        Suite::Prop5 => prop5(3, opts.max_len.unwrap_or(5)),
        Suite::Prop8 => prop8(2, opts.max_len.unwrap_or(3)),
        Suite::Gram => gram(),
        Suite::Thm7E2e => thm7_e2e(opts),
        Suite::Thm9E2e => thm9_e2e(opts),
        Suite::Oracle => oracle_completeness(opts),
        Suite::NegativeControl => negative_control(opts),
    }
}
