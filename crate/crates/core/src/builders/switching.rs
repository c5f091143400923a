//! Embedding a family of tabular MDPs into a single finite environment that
//! silently switches the active member with fixed probability each step.
//!
//! Environment state is (active member, member state). The agent observes the
//! member state the transition landed on, tagged with the reward earned, so
//! the reward table can stay a function of (action, observation) while each
//! member keeps its own reward structure. The tag follows the convention that
//! the reward value may ride along inside the observation; the observation
//! alphabet is shared across members, so the active index itself is never
//! revealed. Entering a terminal state teleports the member to its start cell
//! (the observation still shows the terminal state, marking the episode
//! boundary).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::env::{FsmEnvironment, Outcome};
use crate::error::{CoreError, Result};
use crate::interface::Interface;
use crate::rational::Rational;

use super::mdp::TabularMdp;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SwitchingSpec {
    pub mdps: Vec<TabularMdp>,
    /// Per-step probability of jumping to a uniformly chosen other member.
    pub p_switch: Rational,
}

impl SwitchingSpec {
    pub fn validate(&self) -> Result<()> {
        if self.mdps.is_empty() {
            return Err(CoreError::SpaceMismatch("suite has no members".into()));
        }
        if self.p_switch.is_negative() || self.p_switch > Rational::one() {
            return Err(CoreError::BadSpec(format!(
                "switch probability must lie in [0, 1], got {}",
                self.p_switch
            )));
        }
        let first = &self.mdps[0];
        for m in &self.mdps {
            m.validate()?;
            if m.state_names != first.state_names {
                return Err(CoreError::SpaceMismatch(format!(
                    "member {:?} has a different state space than {:?}",
                    m.name, first.name
                )));
            }
            if m.action_names != first.action_names {
                return Err(CoreError::SpaceMismatch(format!(
                    "member {:?} has a different action space than {:?}",
                    m.name, first.name
                )));
            }
        }
        Ok(())
    }

    /// Every reward value occurring in any member, sorted ascending. The
    /// observation alphabet is built from these, identically for every
    /// member.
    pub fn reward_levels(&self) -> Vec<Rational> {
        let mut levels: Vec<Rational> = Vec::new();
        for m in &self.mdps {
            for per_action in &m.reward {
                for per_succ in per_action {
                    for r in per_succ {
                        if !levels.contains(r) {
                            levels.push(r.clone());
                        }
                    }
                }
            }
        }
        levels.sort();
        levels
    }

    /// Observation symbol for landing on `state` having earned `reward`.
    pub fn observation_symbol(state_name: &str, reward: &Rational) -> String {
        format!("{state_name}#{reward}")
    }
}

/// Build the switching environment. With a single member the switch
/// probability is irrelevant and the result is just that member, episodically
/// embedded.
pub fn build_switching_env(spec: &SwitchingSpec) -> Result<FsmEnvironment> {
    spec.validate()?;
    let n_members = spec.mdps.len();
    let first = &spec.mdps[0];
    let n_states = first.num_states();
    let levels = spec.reward_levels();

    let mut observations = Vec::new();
    let mut obs_index: BTreeMap<(usize, usize), u16> = BTreeMap::new();
    for (s, name) in first.state_names.iter().enumerate() {
        for (l, level) in levels.iter().enumerate() {
            obs_index.insert((s, l), observations.len() as u16);
            observations.push(SwitchingSpec::observation_symbol(name, level));
        }
    }
    let interface = Interface::new(first.action_names.clone(), observations)?;

    let level_of = |r: &Rational| levels.iter().position(|l| l == r).expect("level exists");

    // Env state (member, member-state) -> index.
    let env_state = |member: usize, s: usize| member * n_states + s;

    let mut dynamics = Vec::with_capacity(n_members * n_states);
    for member in 0..n_members {
        for s in 0..n_states {
            let mut per_action = Vec::with_capacity(first.num_actions());
            for a in 0..first.num_actions() {
                // Weight over the active member for this step.
                let mut weights: Vec<(usize, Rational)> = Vec::new();
                if n_members == 1 {
                    weights.push((member, Rational::one()));
                } else {
                    let stay = Rational::one() - spec.p_switch.clone();
                    if stay.is_positive() {
                        weights.push((member, stay));
                    }
                    let jump = &spec.p_switch * &Rational::new(1, (n_members - 1) as i64);
                    if jump.is_positive() {
                        for other in 0..n_members {
                            if other != member {
                                weights.push((other, jump.clone()));
                            }
                        }
                    }
                }
                // Merge outcomes by (next env state, observation).
                let mut merged: BTreeMap<(usize, u16), Rational> = BTreeMap::new();
                for (active, w) in &weights {
                    let mdp = &spec.mdps[*active];
                    for (succ, p) in &mdp.transition[s][a] {
                        let reward = &mdp.reward[s][a][*succ];
                        let obs = obs_index[&(*succ, level_of(reward))];
                        let landing = if mdp.terminal[*succ] { mdp.start } else { *succ };
                        let key = (env_state(*active, landing), obs);
                        *merged.entry(key).or_insert_with(Rational::zero) += &(w * p);
                    }
                }
                per_action.push(
                    merged
                        .into_iter()
                        .map(|((next_state, observation), prob)| Outcome {
                            next_state,
                            observation,
                            prob,
                        })
                        .collect(),
                );
            }
            dynamics.push(per_action);
        }
    }

    // Reward reads the level straight off the observation tag; observation
    // order is (state, level) with level varying fastest.
    let mut reward_row = Vec::with_capacity(interface.num_observations());
    for _ in 0..n_states {
        reward_row.extend(levels.iter().cloned());
    }
    let reward = vec![reward_row; interface.num_actions()];

    FsmEnvironment::new(
        interface,
        env_state(0, first.start),
        dynamics,
        reward,
        format!("switching[{}]", spec.mdps.iter().map(|m| m.name.as_str()).collect::<Vec<_>>().join(",")),
    )
}
