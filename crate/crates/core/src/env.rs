//! Finite stochastic environments with an exact reward table.

use crate::error::{CoreError, Result};
use crate::interface::Interface;
use crate::rational::Rational;

/// One positive-probability outcome of an environment transition.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub next_state: usize,
    pub observation: u16,
    pub prob: Rational,
}

/// A finite-state environment. Dynamics emit (next state, observation)
/// jointly so hidden state changes (a silent regime switch, say) can coincide
/// with an uninformative observation. Reward is a total table over
/// (action, observation), which keeps performance bounded.
#[derive(Clone, Debug, PartialEq)]
pub struct FsmEnvironment {
    interface: Interface,
    initial: usize,
    /// dynamics[state][action] = outcomes with positive probability, summing to 1
    dynamics: Vec<Vec<Vec<Outcome>>>,
    /// reward[action][observation]
    reward: Vec<Vec<Rational>>,
    name: String,
}

impl FsmEnvironment {
    pub fn new(
        interface: Interface,
        initial: usize,
        dynamics: Vec<Vec<Vec<Outcome>>>,
        reward: Vec<Vec<Rational>>,
        name: impl Into<String>,
    ) -> Result<Self> {
        let n = dynamics.len();
        if n == 0 {
            return Err(CoreError::BadMachine("environment needs at least one state".into()));
        }
        if initial >= n {
            return Err(CoreError::BadMachine(format!("initial state {initial} out of range")));
        }
        for (s, per_action) in dynamics.iter().enumerate() {
            if per_action.len() != interface.num_actions() {
                return Err(CoreError::BadMachine(format!(
                    "state {s} has dynamics for {} actions, interface has {}",
                    per_action.len(),
                    interface.num_actions()
                )));
            }
            for (a, outcomes) in per_action.iter().enumerate() {
                let mut total = Rational::zero();
                for out in outcomes {
                    if out.next_state >= n {
                        return Err(CoreError::BadMachine(format!(
                            "dynamics target {} out of range at state {s}, action {a}",
                            out.next_state
                        )));
                    }
                    if out.observation as usize >= interface.num_observations() {
                        return Err(CoreError::BadMachine(format!(
                            "observation {} out of range at state {s}, action {a}",
                            out.observation
                        )));
                    }
                    if !out.prob.is_positive() {
                        return Err(CoreError::BadMachine(format!(
                            "non-positive outcome probability {} at state {s}, action {a}",
                            out.prob
                        )));
                    }
                    total += &out.prob;
                }
                if total != Rational::one() {
                    return Err(CoreError::BadMachine(format!(
                        "dynamics row at state {s}, action {a} sums to {total}, expected exactly 1"
                    )));
                }
            }
        }
        if reward.len() != interface.num_actions()
            || reward.iter().any(|row| row.len() != interface.num_observations())
        {
            return Err(CoreError::BadMachine(
                "reward table must cover every (action, observation) pair".into(),
            ));
        }
        Ok(FsmEnvironment { interface, initial, dynamics, reward, name: name.into() })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn interface(&self) -> &Interface {
        &self.interface
    }

    pub fn num_states(&self) -> usize {
        self.dynamics.len()
    }

    pub fn initial_state(&self) -> usize {
        self.initial
    }

    pub fn outcomes(&self, state: usize, action: u16) -> &[Outcome] {
        &self.dynamics[state][action as usize]
    }

    pub fn reward(&self, action: u16, observation: u16) -> &Rational {
        &self.reward[action as usize][observation as usize]
    }

    pub fn reward_table(&self) -> &[Vec<Rational>] {
        &self.reward
    }

    /// Largest absolute reward, for value bounds.
    pub fn reward_bound(&self) -> Rational {
        let mut best = Rational::zero();
        for row in &self.reward {
            for r in row {
                let a = r.abs();
                if a > best {
                    best = a;
                }
            }
        }
        best
    }

    /// Successor states consistent with observing `observation` after taking
    /// `action` in `state`, in state order.
    pub fn consistent_successors(&self, state: usize, action: u16, observation: u16) -> Vec<usize> {
        let mut v: Vec<usize> = self.dynamics[state][action as usize]
            .iter()
            .filter(|o| o.observation == observation)
            .map(|o| o.next_state)
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Convenience constructor for a one-state environment (a bandit): each
/// action yields a distribution over observations.
pub fn bandit_environment(
    interface: Interface,
    emissions: Vec<Vec<(u16, Rational)>>,
    reward: Vec<Vec<Rational>>,
    name: impl Into<String>,
) -> Result<FsmEnvironment> {
    let dynamics = vec![emissions
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|(observation, prob)| Outcome { next_state: 0, observation, prob })
                .collect()
        })
        .collect()];
    FsmEnvironment::new(interface, 0, dynamics, reward, name)
}

/// Exact probabilistic bisimulation between two environments over the same
/// interface, by partition refinement on the disjoint union of their states.
/// Two states are equivalent when, for every action, they induce identical
/// distributions over (observation, successor class).
pub fn environments_bisimilar(e1: &FsmEnvironment, e2: &FsmEnvironment) -> bool {
    if !e1.interface().compatible_with(e2.interface()) {
        return false;
    }
    let n1 = e1.num_states();
    let total = n1 + e2.num_states();
    let outcomes = |s: usize, a: u16| -> &[Outcome] {
        if s < n1 {
            e1.outcomes(s, a)
        } else {
            e2.outcomes(s - n1, a)
        }
    };
    let num_actions = e1.interface().num_actions() as u16;
    let mut class = vec![0usize; total];
    loop {
        // Signature: for each action, the aggregated distribution over
        // (observation, successor class), canonically ordered.
        let mut signatures: Vec<Vec<Vec<((u16, usize), Rational)>>> = Vec::with_capacity(total);
        for s in 0..total {
            let mut per_action = Vec::with_capacity(num_actions as usize);
            for a in 0..num_actions {
                let mut agg: std::collections::BTreeMap<(u16, usize), Rational> =
                    std::collections::BTreeMap::new();
                for out in outcomes(s, a) {
                    // next_state is local to its own machine; shift e2's into
                    // the union index space.
                    let idx = if s < n1 { out.next_state } else { out.next_state + n1 };
                    *agg.entry((out.observation, class[idx])).or_insert_with(Rational::zero) +=
                        &out.prob;
                }
                per_action.push(agg.into_iter().collect::<Vec<_>>());
            }
            signatures.push(per_action);
        }
        let mut next_class = vec![0usize; total];
        let mut seen: Vec<(usize, usize)> = Vec::new(); // (representative, class id)
        let mut n_classes = 0usize;
        for s in 0..total {
            let mut assigned = None;
            for (rep, id) in &seen {
                if signatures[*rep] == signatures[s] && class[*rep] == class[s] {
                    assigned = Some(*id);
                    break;
                }
            }
            next_class[s] = match assigned {
                Some(id) => id,
                None => {
                    seen.push((s, n_classes));
                    n_classes += 1;
                    n_classes - 1
                }
            };
        }
        if next_class == class {
            break;
        }
        class = next_class;
    }
    class[e1.initial_state()] == class[n1 + e2.initial_state()]
}
