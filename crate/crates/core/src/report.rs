//! Verification reports and their JSON form.

use std::fmt;

use serde::Serialize;

use crate::freealg::{Element, TensorElement};
use crate::scalars::QMode;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Item {
    pub id: String,
    /// The identity being checked, as text.
    #[serde(rename = "paper_eq")]
    pub identity: String,
    pub status: Status,
    pub residual: String,
}

impl Item {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Report {
    pub suite: String,
    pub items: Vec<Item>,
}

/// Engine settings echoed into JSON output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub q_mode: QMode,
    pub max_degree: usize,
    pub window: usize,
    pub tensor_twist: String,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            q_mode: QMode::Specialized,
            max_degree: 8,
            window: 4,
            tensor_twist: "auto".into(),
            seed: 0,
        }
    }
}

#[derive(Serialize)]
struct Summary {
    pass: usize,
    fail: usize,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    suite: &'a str,
    config: &'a RunConfig,
    items: &'a [Item],
    summary: Summary,
}

impl Report {
    pub fn new(suite: &str) -> Self {
        Report {
            suite: suite.into(),
            items: Vec::new(),
        }
    }

    /// Records a check whose residual must vanish.
    pub fn zero(&mut self, id: impl Into<String>, identity: impl Into<String>, residual: &Element) {
        self.record(id, identity, residual.is_zero(), residual.to_string());
    }

    pub fn zero_tensor(
        &mut self,
        id: impl Into<String>,
        identity: impl Into<String>,
        residual: &TensorElement,
    ) {
        self.record(id, identity, residual.is_zero(), residual.to_string());
    }

    pub fn record(
        &mut self,
        id: impl Into<String>,
        identity: impl Into<String>,
        ok: bool,
        residual: impl Into<String>,
    ) {
        self.items.push(Item {
            id: id.into(),
            identity: identity.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            residual: residual.into(),
        });
    }

    /// Appends another report's items under a prefix.
    pub fn absorb(&mut self, other: Report) {
        for mut it in other.items {
            it.id = format!("{}/{}", other.suite, it.id);
            self.items.push(it);
        }
    }

    pub fn pass_count(&self) -> usize {
        self.items.iter().filter(|i| i.passed()).count()
    }

    pub fn fail_count(&self) -> usize {
        self.items.len() - self.pass_count()
    }

    pub fn all_pass(&self) -> bool {
        self.items.iter().all(Item::passed)
    }

    pub fn item(&self, id: &str) -> Option<&Item> {
        self.items.iter().find(|i| i.id == id)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Item> {
        self.items.iter().filter(|i| !i.passed())
    }

    pub fn to_json(&self, config: &RunConfig) -> String {
        let doc = ReportJson {
            suite: &self.suite,
            config,
            items: &self.items,
            summary: Summary {
                pass: self.pass_count(),
                fail: self.fail_count(),
            },
        };
        serde_json::to_string_pretty(&doc).expect("report serializes")
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for it in &self.items {
            match it.status {
                Status::Pass => writeln!(f, "PASS {}  {}", it.id, it.identity)?,
                Status::Fail => writeln!(
                    f,
                    "FAIL {}  {}\n     residual: {}",
                    it.id, it.identity, it.residual
                )?,
            }
        }
        write!(
            f,
            "{}: {} passed, {} failed",
            self.suite,
            self.pass_count(),
            self.fail_count()
        )
    }
}
