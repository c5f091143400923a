//! Action/observation alphabets shared by an agent and an environment.

use serde::{Deserialize, Serialize};

use crate::error::CoreError;

/// A pair of finite ordered alphabets. Symbol order is significant: it fixes
/// the canonical history ordering and the rotation used when a distinct
/// action distribution is required.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interface {
    actions: Vec<String>,
    observations: Vec<String>,
}

impl Interface {
    pub fn new<S: Into<String>>(
        actions: impl IntoIterator<Item = S>,
        observations: impl IntoIterator<Item = S>,
    ) -> Result<Self, CoreError> {
        let actions: Vec<String> = actions.into_iter().map(Into::into).collect();
        let observations: Vec<String> = observations.into_iter().map(Into::into).collect();
        if actions.len() < 2 {
            return Err(CoreError::BadInterface(format!(
                "need at least 2 actions, got {}",
                actions.len()
            )));
        }
        if observations.is_empty() {
            return Err(CoreError::BadInterface("need at least 1 observation".into()));
        }
        for (name, list) in [("action", &actions), ("observation", &observations)] {
            let mut seen = std::collections::HashSet::new();
            for s in list {
                if !seen.insert(s) {
                    return Err(CoreError::BadInterface(format!("duplicate {name} symbol {s:?}")));
                }
            }
        }
        Ok(Interface { actions, observations })
    }

    /// Interface with actions `a0..a{n-1}` and observations `o0..o{m-1}`.
    pub fn indexed(num_actions: usize, num_observations: usize) -> Self {
        Interface::new(
            (0..num_actions).map(|i| format!("a{i}")),
            (0..num_observations).map(|i| format!("o{i}")),
        )
        .expect("indexed interface is well-formed")
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn num_observations(&self) -> usize {
        self.observations.len()
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn observations(&self) -> &[String] {
        &self.observations
    }

    pub fn action_name(&self, idx: u16) -> &str {
        &self.actions[idx as usize]
    }

    pub fn observation_name(&self, idx: u16) -> &str {
        &self.observations[idx as usize]
    }

    pub fn action_index(&self, name: &str) -> Option<u16> {
        self.actions.iter().position(|a| a == name).map(|i| i as u16)
    }

    pub fn observation_index(&self, name: &str) -> Option<u16> {
        self.observations.iter().position(|o| o == name).map(|i| i as u16)
    }

    /// Same alphabets in the same order.
    pub fn compatible_with(&self, other: &Interface) -> bool {
        self == other
    }
}
