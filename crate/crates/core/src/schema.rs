//! Serde document schemas for agents, environments, learning rules, agent
//! sets, and classifier instances. Rationals appear as two-integer arrays
//! throughout; loaders reject distribution rows that do not sum to exactly 1.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::agent::{Agent, FsmAgent, TableAgent};
use crate::crl::CrlInstance;
use crate::dist::ActionDistribution;
use crate::env::{FsmEnvironment, Outcome};
use crate::error::{CoreError, Result};
use crate::history::History;
use crate::interface::Interface;
use crate::ops::LearningRuleFsm;
use crate::rational::Rational;
use crate::value::PerformanceSpec;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AgentSpec {
    /// Plays one fixed distribution everywhere. Give either `action` (a
    /// point mass) or `dist` (probabilities in action order).
    Constant {
        #[serde(skip_serializing_if = "Option::is_none")]
        action: Option<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        dist: Option<Vec<Rational>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
    /// outputs[state][action] = probability; step[state][action][observation]
    /// = next state.
    Fsm {
        initial: usize,
        outputs: Vec<Vec<Rational>>,
        step: Vec<Vec<Vec<usize>>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
    /// Explicit bounded history table. `entries` override `default` within
    /// the horizon; `fallback` answers queries beyond it.
    Table {
        horizon: usize,
        default: Vec<Rational>,
        fallback: Vec<Rational>,
        #[serde(default)]
        entries: Vec<TableEntry>,
        #[serde(skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableEntry {
    /// Symbol pairs, e.g. [["a0","o1"],["a1","o0"]].
    pub history: Vec<(String, String)>,
    pub dist: Vec<Rational>,
}

fn parse_history(interface: &Interface, pairs: &[(String, String)]) -> Result<History> {
    let mut h = History::empty();
    for (a, o) in pairs {
        let ai = interface
            .action_index(a)
            .ok_or_else(|| CoreError::BadSpec(format!("unknown action symbol {a:?}")))?;
        let oi = interface
            .observation_index(o)
            .ok_or_else(|| CoreError::BadSpec(format!("unknown observation symbol {o:?}")))?;
        h.push(ai, oi);
    }
    Ok(h)
}

pub fn history_to_symbols(interface: &Interface, h: &History) -> Vec<(String, String)> {
    h.pairs()
        .iter()
        .map(|(a, o)| {
            (
                interface.action_name(*a).to_string(),
                interface.observation_name(*o).to_string(),
            )
        })
        .collect()
}

impl AgentSpec {
    pub fn build(&self, interface: &Interface) -> Result<Agent> {
        match self {
            AgentSpec::Constant { action, dist, name } => {
                let dist = match (action, dist) {
                    (Some(a), None) => {
                        let idx = interface.action_index(a).ok_or_else(|| {
                            CoreError::BadSpec(format!("unknown action symbol {a:?}"))
                        })?;
                        ActionDistribution::point_mass(idx, interface.num_actions())
                    }
                    (None, Some(probs)) => ActionDistribution::new(probs.clone())?,
                    _ => {
                        return Err(CoreError::BadSpec(
                            "constant agent needs exactly one of `action` or `dist`".into(),
                        ))
                    }
                };
                let agent = FsmAgent::constant(interface.clone(), dist)?;
                Ok(Agent::Fsm(match name {
                    Some(n) => agent.with_name(n.clone()),
                    None => agent,
                }))
            }
            AgentSpec::Fsm { initial, outputs, step, name } => {
                let outs = outputs
                    .iter()
                    .map(|row| ActionDistribution::new(row.clone()))
                    .collect::<Result<Vec<_>>>()?;
                let num_obs = interface.num_observations();
                let mut flat = Vec::with_capacity(step.len());
                for (s, per_action) in step.iter().enumerate() {
                    if per_action.len() != interface.num_actions() {
                        return Err(CoreError::BadSpec(format!(
                            "step table of state {s} must have one row per action"
                        )));
                    }
                    let mut row = vec![0usize; interface.num_actions() * num_obs];
                    for (a, per_obs) in per_action.iter().enumerate() {
                        if per_obs.len() != num_obs {
                            return Err(CoreError::BadSpec(format!(
                                "step row ({s},{a}) must have one entry per observation"
                            )));
                        }
                        for (o, next) in per_obs.iter().enumerate() {
                            row[a * num_obs + o] = *next;
                        }
                    }
                    flat.push(row);
                }
                let agent = FsmAgent::new(
                    interface.clone(),
                    *initial,
                    outs,
                    flat,
                    name.clone().unwrap_or_else(|| "fsm".into()),
                )?;
                Ok(Agent::Fsm(agent))
            }
            AgentSpec::Table { horizon, default, fallback, entries, name } => {
                let default = ActionDistribution::new(default.clone())?;
                let fallback = ActionDistribution::new(fallback.clone())?;
                let mut table = HashMap::new();
                for entry in entries {
                    let h = parse_history(interface, &entry.history)?;
                    table.insert(h, ActionDistribution::new(entry.dist.clone())?);
                }
                let agent = TableAgent::from_entries(
                    interface.clone(),
                    *horizon,
                    table,
                    default,
                    fallback,
                    name.clone().unwrap_or_else(|| "table".into()),
                )?;
                Ok(Agent::Table(agent))
            }
        }
    }

    /// Inverse of `build`, for emitting spec files.
    pub fn from_agent(agent: &Agent) -> AgentSpec {
        match agent {
            Agent::Fsm(fsm) => {
                let interface = fsm.interface();
                let num_obs = interface.num_observations();
                let outputs = (0..fsm.num_states())
                    .map(|s| fsm.output(s).probs().to_vec())
                    .collect();
                let step = (0..fsm.num_states())
                    .map(|s| {
                        (0..interface.num_actions())
                            .map(|a| {
                                (0..num_obs)
                                    .map(|o| fsm.next_state(s, a as u16, o as u16))
                                    .collect()
                            })
                            .collect()
                    })
                    .collect();
                AgentSpec::Fsm {
                    initial: fsm.initial_state(),
                    outputs,
                    step,
                    name: Some(fsm.name().to_string()),
                }
            }
            Agent::Table(table) => {
                let interface = table.interface();
                let entries = {
                    let mut hs: Vec<&History> = table.entries().keys().collect();
                    hs.sort_by(|a, b| a.canonical_cmp(b));
                    hs.into_iter()
                        .map(|h| TableEntry {
                            history: history_to_symbols(interface, h),
                            dist: table.entries()[h].probs().to_vec(),
                        })
                        .collect()
                };
                AgentSpec::Table {
                    horizon: table.horizon(),
                    default: table.fallback().probs().to_vec(),
                    fallback: table.fallback().probs().to_vec(),
                    entries,
                    name: Some(table.name().to_string()),
                }
            }
        }
    }
}

/// A named collection of agents over one interface: the on-disk form of agent
/// sets, bases, and candidate pools.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AgentSetFile {
    pub interface: Interface,
    pub agents: Vec<AgentSpec>,
}

impl AgentSetFile {
    pub fn build(&self) -> Result<Vec<Agent>> {
        self.agents.iter().map(|spec| spec.build(&self.interface)).collect()
    }

    pub fn from_agents(interface: &Interface, agents: &[Agent]) -> AgentSetFile {
        AgentSetFile {
            interface: interface.clone(),
            agents: agents.iter().map(AgentSpec::from_agent).collect(),
        }
    }
}

/// On-disk environment: dynamics rows are [next_state, observation_symbol,
/// numerator, denominator].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnvironmentFile {
    pub interface: Interface,
    pub initial: usize,
    /// dynamics[state][action] = rows
    pub dynamics: Vec<Vec<Vec<DynamicsRow>>>,
    /// reward[action][observation]
    pub reward: Vec<Vec<Rational>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DynamicsRow(pub usize, pub String, pub i64, pub i64);

impl EnvironmentFile {
    pub fn build(&self) -> Result<FsmEnvironment> {
        let mut dynamics = Vec::with_capacity(self.dynamics.len());
        for per_state in &self.dynamics {
            let mut rows = Vec::with_capacity(per_state.len());
            for per_action in per_state {
                let outcomes = per_action
                    .iter()
                    .map(|DynamicsRow(next, obs, num, den)| {
                        let observation = self.interface.observation_index(obs).ok_or_else(|| {
                            CoreError::BadSpec(format!("unknown observation symbol {obs:?}"))
                        })?;
                        if *den <= 0 {
                            return Err(CoreError::BadSpec(format!(
                                "non-positive denominator in dynamics row for {obs:?}"
                            )));
                        }
                        Ok(Outcome {
                            next_state: *next,
                            observation,
                            prob: Rational::new(*num, *den),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                rows.push(outcomes);
            }
            dynamics.push(rows);
        }
        FsmEnvironment::new(
            self.interface.clone(),
            self.initial,
            dynamics,
            self.reward.clone(),
            self.name.clone().unwrap_or_else(|| "environment".into()),
        )
    }

    pub fn from_environment(env: &FsmEnvironment) -> EnvironmentFile {
        let interface = env.interface();
        let dynamics = (0..env.num_states())
            .map(|s| {
                (0..interface.num_actions())
                    .map(|a| {
                        env.outcomes(s, a as u16)
                            .iter()
                            .map(|o| {
                                use num_traits::ToPrimitive;
                                DynamicsRow(
                                    o.next_state,
                                    interface.observation_name(o.observation).to_string(),
                                    o.prob.numer().to_i64().expect("builder probabilities fit"),
                                    o.prob.denom().to_i64().expect("builder probabilities fit"),
                                )
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        EnvironmentFile {
            interface: interface.clone(),
            initial: env.initial_state(),
            dynamics,
            reward: env.reward_table().to_vec(),
            name: Some(env.name().to_string()),
        }
    }
}

/// On-disk learning rule: step[state][action][observation].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LearningRuleSpec {
    pub initial: usize,
    pub step: Vec<Vec<Vec<usize>>>,
    pub select: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl LearningRuleSpec {
    pub fn build(&self, interface: &Interface) -> Result<LearningRuleFsm> {
        let num_obs = interface.num_observations();
        let mut flat = Vec::with_capacity(self.step.len());
        for (s, per_action) in self.step.iter().enumerate() {
            if per_action.len() != interface.num_actions() {
                return Err(CoreError::BadSpec(format!(
                    "rule step table of state {s} must have one row per action"
                )));
            }
            let mut row = vec![0usize; interface.num_actions() * num_obs];
            for (a, per_obs) in per_action.iter().enumerate() {
                if per_obs.len() != num_obs {
                    return Err(CoreError::BadSpec(format!(
                        "rule step row ({s},{a}) must have one entry per observation"
                    )));
                }
                for (o, next) in per_obs.iter().enumerate() {
                    row[a * num_obs + o] = *next;
                }
            }
            flat.push(row);
        }
        LearningRuleFsm::new(
            num_obs,
            self.initial,
            flat,
            self.select.clone(),
            self.name.clone().unwrap_or_else(|| "rule".into()),
        )
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RuleSetFile {
    pub interface: Interface,
    pub rules: Vec<LearningRuleSpec>,
}

/// On-disk classifier instance: the basis is given as indices into `agents`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceFile {
    pub env: EnvironmentFile,
    pub perf: PerformanceSpec,
    pub agents: Vec<AgentSpec>,
    pub basis: Vec<usize>,
}

impl InstanceFile {
    pub fn build(&self) -> Result<CrlInstance> {
        let env = self.env.build()?;
        let interface = env.interface().clone();
        let agents = self
            .agents
            .iter()
            .map(|a| a.build(&interface))
            .collect::<Result<Vec<_>>>()?;
        let basis = self
            .basis
            .iter()
            .map(|i| {
                agents
                    .get(*i)
                    .cloned()
                    .ok_or_else(|| CoreError::BadSpec(format!("basis index {i} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        CrlInstance::new(env, self.perf.clone(), agents, basis)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::behaviorally_equal;
    use crate::rational::rat;

    #[test]
    fn agent_specs_round_trip_behaviorally() {
        let ifc = Interface::indexed(2, 2);
        let parity: Agent = FsmAgent::alternating(
            ifc.clone(),
            ActionDistribution::point_mass(0, 2),
            ActionDistribution::point_mass(1, 2),
        )
        .unwrap()
        .into();
        let table: Agent = TableAgent::from_fn(
            ifc.clone(),
            2,
            |h| ActionDistribution::point_mass((h.len() % 2) as u16, 2),
            ActionDistribution::uniform(2),
            "tbl",
        )
        .unwrap()
        .into();
        for agent in [parity, table] {
            let spec = AgentSpec::from_agent(&agent);
            let json = serde_json::to_string(&spec).unwrap();
            let parsed: AgentSpec = serde_json::from_str(&json).unwrap();
            let rebuilt = parsed.build(&ifc).unwrap();
            assert!(behaviorally_equal(&agent, &rebuilt));
        }
    }

    #[test]
    fn environment_file_round_trips() {
        let env = crate::env::bandit_environment(
            Interface::indexed(2, 2),
            vec![
                vec![(0, rat(1, 2)), (1, rat(1, 2))],
                vec![(1, rat(1, 1))],
            ],
            vec![vec![rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(-1, 1)]],
            "coin",
        )
        .unwrap();
        let file = EnvironmentFile::from_environment(&env);
        let json = serde_json::to_string_pretty(&file).unwrap();
        let parsed: EnvironmentFile = serde_json::from_str(&json).unwrap();
        let rebuilt = parsed.build().unwrap();
        assert!(crate::env::environments_bisimilar(&env, &rebuilt));
    }

    #[test]
    fn loader_rejects_bad_rows() {
        let ifc = Interface::indexed(2, 1);
        let bad = AgentSpec::Constant {
            action: None,
            dist: Some(vec![rat(1, 2), rat(1, 3)]),
            name: None,
        };
        assert!(bad.build(&ifc).is_err());

        let bad_env = EnvironmentFile {
            interface: ifc,
            initial: 0,
            dynamics: vec![vec![
                vec![DynamicsRow(0, "o0".into(), 1, 2)],
                vec![DynamicsRow(0, "o0".into(), 1, 1)],
            ]],
            reward: vec![vec![rat(0, 1)], vec![rat(0, 1)]],
            name: None,
        };
        assert!(bad_env.build().is_err(), "row summing to 1/2 must be rejected");
    }

    #[test]
    fn instance_file_builds() {
        let ifc = Interface::indexed(2, 1);
        let file = InstanceFile {
            env: EnvironmentFile {
                interface: ifc,
                initial: 0,
                dynamics: vec![vec![
                    vec![DynamicsRow(0, "o0".into(), 1, 1)],
                    vec![DynamicsRow(0, "o0".into(), 1, 1)],
                ]],
                reward: vec![vec![rat(1, 1)], vec![rat(0, 1)]],
                name: None,
            },
            perf: PerformanceSpec::Discounted { gamma: rat(1, 2) },
            agents: vec![
                AgentSpec::Constant { action: Some("a0".into()), dist: None, name: None },
                AgentSpec::Constant { action: Some("a1".into()), dist: None, name: None },
            ],
            basis: vec![0, 1],
        };
        let instance = file.build().unwrap();
        assert_eq!(instance.agents.len(), 2);
        assert_eq!(instance.basis.len(), 2);
    }
}
