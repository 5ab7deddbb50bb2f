//! Shared result type of every hypothesis test.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Acceptance region for the test statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Interval { lower: f64, upper: f64 },
    AtLeast { threshold: f64 },
    AtMost { threshold: f64 },
}

impl Region {
    pub fn contains(&self, x: f64) -> bool {
        match *self {
            Region::Interval { lower, upper } => x >= lower && x <= upper,
            Region::AtLeast { threshold } => x >= threshold,
            Region::AtMost { threshold } => x <= threshold,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Accept,
    Reject,
}

impl Decision {
    pub fn is_reject(self) -> bool {
        self == Decision::Reject
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Diagnostics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub good_event: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub good_event_min_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_hat_modulus: Option<f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Statistic, acceptance region, decision and every tuning constant used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub test: String,
    pub statistic: f64,
    pub region: Region,
    pub decision: Decision,
    pub tuning: BTreeMap<String, f64>,
    pub diagnostics: Diagnostics,
}

impl TestOutcome {
    /// The decision is derived from the statistic and region only.
    pub fn new(test: &str, statistic: f64, region: Region) -> Self {
        let decision = if region.contains(statistic) { Decision::Accept } else { Decision::Reject };
        Self {
            test: test.to_string(),
            statistic,
            region,
            decision,
            tuning: BTreeMap::new(),
            diagnostics: Diagnostics::default(),
        }
    }

    pub fn with_tuning(mut self, key: &str, value: f64) -> Self {
        self.tuning.insert(key.to_string(), value);
        self
    }

    pub fn rejects(&self) -> bool {
        self.decision.is_reject()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("outcome serializes")
    }
}
