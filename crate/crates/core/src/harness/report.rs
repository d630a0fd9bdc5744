//! JSON-lines experiment reports.

use std::collections::BTreeMap;
use std::time::Duration;

use serde::Serialize;
use serde_json::{Map, Value};

use super::config::ExperimentKind;
use crate::error::{Error, Result};

/// Outcome of one dichotomy check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Every point is close, certified or (for sampled runs) observed.
    AllClose,
    /// Some point is far and the close count is within the threshold.
    Sound,
    /// Count above threshold with a far point that could not be certified.
    Inconclusive,
    /// A certified far point together with a count above the threshold, or
    /// a failed internal guarantee.
    Violation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub experiment: ExperimentKind,
    pub config: BTreeMap<String, String>,
    pub seed: u64,
    pub trials: Vec<Value>,
    pub aggregate: Map<String, Value>,
    pub violations: usize,
    /// Not serialized, so reports stay byte-identical across reruns.
    pub elapsed: Duration,
}

pub(crate) fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    serde_json::to_value(x).map_err(|e| Error::InvariantViolated(format!("serialization failed: {e}")))
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn trial_lines(&self) -> impl Iterator<Item = String> + '_ {
        self.trials.iter().enumerate().map(move |(i, t)| {
            let mut obj = Map::new();
            obj.insert("record".into(), "trial".into());
            obj.insert("experiment".into(), self.experiment.as_str().into());
            obj.insert("trial".into(), i.into());
            if let Value::Object(fields) = t {
                for (k, v) in fields {
                    obj.insert(k.clone(), v.clone());
                }
            } else {
                obj.insert("value".into(), t.clone());
            }
            Value::Object(obj).to_string()
        })
    }

    pub fn aggregate_line(&self) -> String {
        let mut obj = Map::new();
        obj.insert("record".into(), "aggregate".into());
        obj.insert("experiment".into(), self.experiment.as_str().into());
        obj.insert("seed".into(), self.seed.into());
        obj.insert("config".into(), serde_json::to_value(&self.config).expect("string map"));
        obj.insert("trials".into(), self.trials.len().into());
        obj.insert("violations".into(), self.violations.into());
        obj.insert("pass".into(), self.passed().into());
        for (k, v) in &self.aggregate {
            obj.insert(k.clone(), v.clone());
        }
        Value::Object(obj).to_string()
    }

    /// One line per trial and a trailing aggregate, each newline-terminated.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for line in self.trial_lines().chain(std::iter::once(self.aggregate_line())) {
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}

/// Count of each verdict.
pub(crate) fn tally(verdicts: &[Verdict]) -> Map<String, Value> {
    let mut out = Map::new();
    for v in [Verdict::AllClose, Verdict::Sound, Verdict::Inconclusive, Verdict::Violation] {
        let name = to_value(&v).expect("unit variant").as_str().expect("string").to_string();
        out.insert(name, verdicts.iter().filter(|&&x| x == v).count().into());
    }
    out
}
