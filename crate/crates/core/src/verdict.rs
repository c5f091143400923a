//! Operator check outcomes.

use serde::{Deserialize, Serialize};

use crate::history::History;
use crate::interface::Interface;

/// Whether a verdict covers all history lengths or only a finite window.
/// Checks over pure state machines are exact; any table-agent participant
/// truncates the quantifiers at its horizon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "semantics", rename_all = "snake_case")]
pub enum Semantics {
    Exact,
    Bounded { horizon: usize },
}

impl Semantics {
    pub fn is_exact(&self) -> bool {
        matches!(self, Semantics::Exact)
    }

    /// The weaker of two semantics: bounded wins, shorter horizon wins.
    pub fn combine(self, other: Semantics) -> Semantics {
        match (self, other) {
            (Semantics::Exact, s) | (s, Semantics::Exact) => s,
            (Semantics::Bounded { horizon: a }, Semantics::Bounded { horizon: b }) => {
                Semantics::Bounded { horizon: a.min(b) }
            }
        }
    }
}

/// The outcome of an operator check. When the check fails a universal claim,
/// `witness` is the canonically least counterexample history; when it
/// confirms an existential claim, it is the canonically least satisfying
/// history. Purely universal confirmations and purely global refutations
/// carry no witness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub holds: bool,
    #[serde(flatten)]
    pub semantics: Semantics,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<History>,
}

impl Verdict {
    pub fn exact(holds: bool, witness: Option<History>) -> Self {
        Verdict { holds, semantics: Semantics::Exact, witness }
    }

    pub fn bounded(holds: bool, horizon: usize, witness: Option<History>) -> Self {
        Verdict { holds, semantics: Semantics::Bounded { horizon }, witness }
    }

    /// JSON with symbols resolved against an interface, for reports.
    pub fn to_json(&self, interface: &Interface) -> serde_json::Value {
        let mut obj = serde_json::json!({
            "holds": self.holds,
            "semantics": match self.semantics {
                Semantics::Exact => "exact",
                Semantics::Bounded { .. } => "bounded",
            },
        });
        if let Semantics::Bounded { horizon } = self.semantics {
            obj["horizon"] = serde_json::json!(horizon);
        }
        if let Some(w) = &self.witness {
            let pairs: Vec<serde_json::Value> = w
                .pairs()
                .iter()
                .map(|(a, o)| {
                    serde_json::json!([interface.action_name(*a), interface.observation_name(*o)])
                })
                .collect();
            obj["witness"] = serde_json::Value::Array(pairs);
        }
        obj
    }
}
