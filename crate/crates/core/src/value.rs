//! Exact performance evaluation: discounted value by linear solve on the
//! agent-environment product chain, and finite-horizon average reward by
//! dynamic programming.

use serde::{Deserialize, Serialize};

use crate::agent::{Agent, FsmAgent};
use crate::env::FsmEnvironment;
use crate::error::{CoreError, Result};
use crate::history::History;
use crate::product::{product_reachable, ProductGraph};
use crate::rational::Rational;
use crate::solve::solve_linear;

/// How reward is aggregated into a single performance number. The discounted
/// form is exact on state machines via a linear solve; the average form
/// truncates at a finite horizon so it stays computable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PerformanceSpec {
    Discounted { gamma: Rational },
    FiniteHorizonAverage { horizon: usize },
}

impl PerformanceSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            PerformanceSpec::Discounted { gamma } => {
                if gamma.is_negative() || *gamma >= Rational::one() {
                    return Err(CoreError::BadSpec(format!(
                        "discount factor must satisfy 0 <= gamma < 1, got {gamma}"
                    )));
                }
            }
            PerformanceSpec::FiniteHorizonAverage { horizon } => {
                if *horizon == 0 {
                    return Err(CoreError::BadSpec("average-reward horizon must be >= 1".into()));
                }
            }
        }
        Ok(())
    }
}

/// The product chain of one FSM agent and an environment, with per-node
/// expected one-step reward.
pub struct ValueChain {
    pub graph: ProductGraph,
    pub expected_reward: Vec<Rational>,
}

pub fn value_chain(agent: &FsmAgent, env: &FsmEnvironment) -> Result<ValueChain> {
    let graph = product_reachable(&[agent], env)?;
    let expected_reward = (0..graph.num_nodes())
        .map(|n| {
            let mut total = Rational::zero();
            for e in graph.edges(n) {
                total += &(&e.prob * env.reward(e.action, e.observation));
            }
            total
        })
        .collect();
    Ok(ValueChain { graph, expected_reward })
}

/// Exact discounted values at every chain node: the unique solution of
/// `v = r + γ P v`.
pub fn discounted_values(chain: &ValueChain, gamma: &Rational) -> Vec<Rational> {
    let n = chain.graph.num_nodes();
    let mut a = vec![vec![Rational::zero(); n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = Rational::one();
        for e in chain.graph.edges(i) {
            let w = gamma * &e.prob;
            row[e.target] -= &w;
        }
    }
    solve_linear(a, chain.expected_reward.clone())
        .expect("I - gamma*P is non-singular for gamma < 1")
}

/// Expected total reward over exactly `steps` steps from each chain node.
pub fn finite_horizon_totals(chain: &ValueChain, steps: usize) -> Vec<Rational> {
    let n = chain.graph.num_nodes();
    let mut w = vec![Rational::zero(); n];
    for _ in 0..steps {
        let mut next = chain.expected_reward.clone();
        for (i, acc) in next.iter_mut().enumerate() {
            for e in chain.graph.edges(i) {
                *acc += &(&e.prob * &w[e.target]);
            }
        }
        w = next;
    }
    w
}

/// Exact conditional distribution over environment states given a realizable
/// prefix under `agent`.
fn belief_after_prefix(
    agent: &Agent,
    env: &FsmEnvironment,
    prefix: &History,
) -> Result<Vec<Rational>> {
    let mut belief = vec![Rational::zero(); env.num_states()];
    belief[env.initial_state()] = Rational::one();
    let mut sofar = History::empty();
    for (pos, (a, o)) in prefix.pairs().iter().enumerate() {
        let step_fails =
            || CoreError::UnrealizablePrefix { prefix: prefix.clone(), position: pos };
        let act_prob = agent.act(&sofar).prob(*a).clone();
        if !act_prob.is_positive() {
            return Err(step_fails());
        }
        let mut next = vec![Rational::zero(); env.num_states()];
        for (s, w) in belief.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            for out in env.outcomes(s, *a) {
                if out.observation == *o {
                    next[out.next_state] += &(w * &out.prob);
                }
            }
        }
        if next.iter().all(|p| p.is_zero()) {
            return Err(step_fails());
        }
        belief = next;
        sofar.push(*a, *o);
    }
    let mass: Rational = belief.iter().fold(Rational::zero(), |acc, p| acc + p);
    let scale = mass.recip();
    for p in belief.iter_mut() {
        *p = &*p * &scale;
    }
    Ok(belief)
}

/// Belief-state evaluation for table agents (and any agent, on small
/// horizons): expected total reward over `steps` steps following `prefix`,
/// tracking the exact conditional distribution over environment states.
fn belief_expected_total(
    agent: &Agent,
    env: &FsmEnvironment,
    prefix: &History,
    steps: usize,
) -> Result<Rational> {
    let belief = belief_after_prefix(agent, env, prefix)?;

    fn recurse(
        agent: &Agent,
        env: &FsmEnvironment,
        h: &History,
        belief: &[Rational],
        steps: usize,
    ) -> Rational {
        if steps == 0 {
            return Rational::zero();
        }
        let out = agent.act(h);
        let mut total = Rational::zero();
        for action in out.support() {
            let p_action = out.prob(action);
            // Joint weight over (observation, successor state).
            let mut per_obs: std::collections::BTreeMap<u16, Vec<Rational>> = Default::default();
            for (s, w) in belief.iter().enumerate() {
                if w.is_zero() {
                    continue;
                }
                for outc in env.outcomes(s, action) {
                    let entry = per_obs
                        .entry(outc.observation)
                        .or_insert_with(|| vec![Rational::zero(); env.num_states()]);
                    entry[outc.next_state] += &(w * &outc.prob);
                }
            }
            for (obs, weights) in per_obs {
                let p_obs: Rational = weights.iter().fold(Rational::zero(), |acc, p| acc + p);
                if p_obs.is_zero() {
                    continue;
                }
                let inv = p_obs.recip();
                let next_belief: Vec<Rational> = weights.iter().map(|w| w * &inv).collect();
                let next_h = h.extended(action, obs);
                let future = recurse(agent, env, &next_h, &next_belief, steps - 1);
                let step_value = env.reward(action, obs) + &future;
                total += &(&(p_action * &p_obs) * &step_value);
            }
        }
        total
    }

    Ok(recurse(agent, env, prefix, &belief, steps))
}

/// The performance of `agent` in `env` from history `from`, computed exactly.
///
/// Discounted performance requires a state-machine agent (the linear solve
/// runs on the product chain); table agents must use the finite-horizon
/// average or an explicit truncation via [`discounted_value_truncated`].
pub fn compute_value(
    agent: &Agent,
    env: &FsmEnvironment,
    perf: &PerformanceSpec,
    from: &History,
) -> Result<Rational> {
    perf.validate()?;
    match (perf, agent.as_fsm()) {
        (PerformanceSpec::Discounted { gamma }, Some(fsm)) => {
            let chain = value_chain(fsm, env)?;
            let node = chain.graph.walk(from).map_err(|position| {
                CoreError::UnrealizablePrefix { prefix: from.clone(), position }
            })?;
            Ok(discounted_values(&chain, gamma)[node].clone())
        }
        (PerformanceSpec::Discounted { .. }, None) => Err(CoreError::TruncationRequired),
        (PerformanceSpec::FiniteHorizonAverage { horizon }, Some(fsm)) => {
            let chain = value_chain(fsm, env)?;
            let node = chain.graph.walk(from).map_err(|position| {
                CoreError::UnrealizablePrefix { prefix: from.clone(), position }
            })?;
            let totals = finite_horizon_totals(&chain, *horizon);
            Ok(&totals[node] * &Rational::new(1, *horizon as i64))
        }
        (PerformanceSpec::FiniteHorizonAverage { horizon }, None) => {
            let total = belief_expected_total(agent, env, from, *horizon)?;
            Ok(&total * &Rational::new(1, *horizon as i64))
        }
    }
}

/// Truncated discounted value for agents without a finite state realization:
/// the exact partial sum over the first `depth` steps.
pub fn discounted_value_truncated(
    agent: &Agent,
    env: &FsmEnvironment,
    gamma: &Rational,
    from: &History,
    depth: usize,
) -> Result<Rational> {
    fn recurse(
        agent: &Agent,
        env: &FsmEnvironment,
        h: &History,
        belief: &[Rational],
        gamma: &Rational,
        depth: usize,
    ) -> Rational {
        if depth == 0 {
            return Rational::zero();
        }
        let out = agent.act(h);
        let mut total = Rational::zero();
        for action in out.support() {
            let p_action = out.prob(action);
            let mut per_obs: std::collections::BTreeMap<u16, Vec<Rational>> = Default::default();
            for (s, w) in belief.iter().enumerate() {
                if w.is_zero() {
                    continue;
                }
                for outc in env.outcomes(s, action) {
                    let entry = per_obs
                        .entry(outc.observation)
                        .or_insert_with(|| vec![Rational::zero(); env.num_states()]);
                    entry[outc.next_state] += &(w * &outc.prob);
                }
            }
            for (obs, weights) in per_obs {
                let p_obs: Rational = weights.iter().fold(Rational::zero(), |acc, p| acc + p);
                if p_obs.is_zero() {
                    continue;
                }
                let inv = p_obs.recip();
                let next_belief: Vec<Rational> = weights.iter().map(|w| w * &inv).collect();
                let next_h = h.extended(action, obs);
                let future = recurse(agent, env, &next_h, &next_belief, gamma, depth - 1);
                let step_value = env.reward(action, obs) + &(gamma * &future);
                total += &(&(p_action * &p_obs) * &step_value);
            }
        }
        total
    }
    let belief = belief_after_prefix(agent, env, from)?;
    Ok(recurse(agent, env, from, &belief, gamma, depth))
}

/// All exact maximizers of `v(λ, env)` from the empty history, as indices
/// into `agents`. Ties are preserved: every optimal agent is returned.
pub fn optimal_agents(
    agents: &[Agent],
    env: &FsmEnvironment,
    perf: &PerformanceSpec,
) -> Result<Vec<usize>> {
    if agents.is_empty() {
        return Err(CoreError::BadSpec("optimal-agent search over an empty set".into()));
    }
    let mut values = Vec::with_capacity(agents.len());
    for agent in agents {
        values.push(compute_value(agent, env, perf, &History::empty())?);
    }
    let best = values.iter().max().cloned().expect("non-empty");
    Ok(values
        .iter()
        .enumerate()
        .filter(|(_, v)| **v == best)
        .map(|(i, _)| i)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::TableAgent;
    use crate::dist::ActionDistribution;
    use crate::env::{bandit_environment, FsmEnvironment, Outcome};
    use crate::interface::Interface;
    use crate::rational::rat;

    fn ifc() -> Interface {
        Interface::indexed(2, 2)
    }

    #[test]
    fn geometric_series_value() {
        // Constant reward 1 at every step, gamma = 1/2: v = 1/(1-1/2) = 2.
        let env = bandit_environment(
            ifc(),
            vec![vec![(0, rat(1, 1))], vec![(0, rat(1, 1))]],
            vec![vec![rat(1, 1), rat(1, 1)], vec![rat(1, 1), rat(1, 1)]],
            "unit",
        )
        .unwrap();
        let agent: Agent = FsmAgent::constant_action(ifc(), 0).unwrap().into();
        let v = compute_value(
            &agent,
            &env,
            &PerformanceSpec::Discounted { gamma: rat(1, 2) },
            &History::empty(),
        )
        .unwrap();
        assert_eq!(v, rat(2, 1));
    }

    fn two_node_chain() -> FsmEnvironment {
        // Deterministic alternation between a reward-0 state and a reward-1
        // state; the observation reveals the state being left.
        let out = |o: u16, s: usize| Outcome { next_state: s, observation: o, prob: rat(1, 1) };
        FsmEnvironment::new(
            ifc(),
            0,
            vec![
                vec![vec![out(0, 1)], vec![out(0, 1)]],
                vec![vec![out(1, 0)], vec![out(1, 0)]],
            ],
            vec![vec![rat(0, 1), rat(1, 1)], vec![rat(0, 1), rat(1, 1)]],
            "alternator",
        )
        .unwrap()
    }

    #[test]
    fn alternating_chain_solves_to_two_thirds() {
        // Hand-solved 2x2 system: v0 = 0 + γ v1, v1 = 1 + γ v0 with γ = 1/2
        // gives v0 = γ/(1-γ²) = 2/3.
        let agent: Agent = FsmAgent::constant_action(ifc(), 0).unwrap().into();
        let v = compute_value(
            &agent,
            &two_node_chain(),
            &PerformanceSpec::Discounted { gamma: rat(1, 2) },
            &History::empty(),
        )
        .unwrap();
        assert_eq!(v, rat(2, 3));
    }

    #[test]
    fn finite_horizon_average_cancels() {
        // Rewards alternate 0, 1 deterministically: average over T=2 is 1/2;
        // with both rewards mapped to (1, -1) the average is 0.
        let out = |o: u16, s: usize| Outcome { next_state: s, observation: o, prob: rat(1, 1) };
        let env = FsmEnvironment::new(
            ifc(),
            0,
            vec![
                vec![vec![out(0, 1)], vec![out(0, 1)]],
                vec![vec![out(1, 0)], vec![out(1, 0)]],
            ],
            vec![vec![rat(1, 1), rat(-1, 1)], vec![rat(1, 1), rat(-1, 1)]],
            "plusminus",
        )
        .unwrap();
        let agent: Agent = FsmAgent::constant_action(ifc(), 0).unwrap().into();
        let v = compute_value(
            &agent,
            &env,
            &PerformanceSpec::FiniteHorizonAverage { horizon: 2 },
            &History::empty(),
        )
        .unwrap();
        assert_eq!(v, rat(0, 1));
    }

    #[test]
    fn belief_path_matches_chain_path_for_fsm_encodable_agent() {
        // The same behaviour encoded as a table agent must give the same
        // finite-horizon average as the state-machine path.
        let env = two_node_chain();
        let fsm: Agent = FsmAgent::constant_action(ifc(), 0).unwrap().into();
        let table: Agent = TableAgent::from_fn(
            ifc(),
            4,
            |_| ActionDistribution::point_mass(0, 2),
            ActionDistribution::point_mass(0, 2),
            "tbl",
        )
        .unwrap()
        .into();
        let perf = PerformanceSpec::FiniteHorizonAverage { horizon: 4 };
        let v_fsm = compute_value(&fsm, &env, &perf, &History::empty()).unwrap();
        let v_tbl = compute_value(&table, &env, &perf, &History::empty()).unwrap();
        assert_eq!(v_fsm, v_tbl);
        assert_eq!(v_fsm, rat(1, 2));
    }

    #[test]
    fn discounted_table_agent_requires_truncation() {
        let table: Agent = TableAgent::from_fn(
            ifc(),
            2,
            |_| ActionDistribution::point_mass(0, 2),
            ActionDistribution::point_mass(0, 2),
            "tbl",
        )
        .unwrap()
        .into();
        let err = compute_value(
            &table,
            &two_node_chain(),
            &PerformanceSpec::Discounted { gamma: rat(1, 2) },
            &History::empty(),
        );
        assert!(matches!(err, Err(CoreError::TruncationRequired)));
        let v = discounted_value_truncated(
            &table,
            &two_node_chain(),
            &rat(1, 2),
            &History::empty(),
            3,
        )
        .unwrap();
        // 0 + γ·1 + γ²·0 = 1/2.
        assert_eq!(v, rat(1, 2));
    }

    #[test]
    fn value_from_later_history_uses_reached_node() {
        let agent: Agent = FsmAgent::constant_action(ifc(), 0).unwrap().into();
        let h = History::from_pairs(vec![(0, 0)]);
        let v = compute_value(
            &agent,
            &two_node_chain(),
            &PerformanceSpec::Discounted { gamma: rat(1, 2) },
            &h,
        )
        .unwrap();
        // From the reward-1 node: v1 = 1 + γ v0 = 1 + (1/2)(2/3) = 4/3.
        assert_eq!(v, rat(4, 3));
    }

    #[test]
    fn optimal_agents_returns_all_ties() {
        let env = bandit_environment(
            ifc(),
            vec![vec![(0, rat(1, 1))], vec![(1, rat(1, 1))]],
            vec![vec![rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1)]],
            "bandit",
        )
        .unwrap();
        let a0: Agent = FsmAgent::constant_action(ifc(), 0).unwrap().into();
        let a1: Agent = FsmAgent::constant_action(ifc(), 1).unwrap().into();
        let perf = PerformanceSpec::Discounted { gamma: rat(1, 2) };
        // Both arms pay 1 on their own observation: exact tie, both returned.
        let ids = optimal_agents(&[a0.clone(), a1.clone()], &env, &perf).unwrap();
        assert_eq!(ids, vec![0, 1]);

        // Make arm 0 pay and arm 1 not: singleton argmax.
        let env2 = bandit_environment(
            ifc(),
            vec![vec![(0, rat(1, 1))], vec![(1, rat(1, 1))]],
            vec![vec![rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(0, 1)]],
            "bandit2",
        )
        .unwrap();
        let ids = optimal_agents(&[a0, a1], &env2, &perf).unwrap();
        assert_eq!(ids, vec![0]);
    }

    #[test]
    fn bellman_residual_is_exactly_zero() {
        let fsm = FsmAgent::constant(ifc(), ActionDistribution::uniform(2)).unwrap();
        let env = two_node_chain();
        let chain = value_chain(&fsm, &env).unwrap();
        let gamma = rat(9, 10);
        let v = discounted_values(&chain, &gamma);
        for n in 0..chain.graph.num_nodes() {
            let mut rhs = chain.expected_reward[n].clone();
            for e in chain.graph.edges(n) {
                rhs += &(&(&gamma * &e.prob) * &v[e.target]);
            }
            assert_eq!(v[n], rhs, "residual at node {n}");
        }
    }
}
