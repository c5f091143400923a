//! Tabular MDPs with exact transition and reward tables, plus exact policy
//! iteration used by the gridworld suite's distinctness check.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::rational::Rational;
use crate::solve::solve_linear;

/// A finite MDP. Rewards are attached to (state, action, successor) triples;
/// terminal states are flagged for the episodic embedding, where entering one
/// teleports back to the start state.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TabularMdp {
    pub name: String,
    pub state_names: Vec<String>,
    pub action_names: Vec<String>,
    /// transition[s][a] = list of (successor, probability), each row summing
    /// to exactly 1
    pub transition: Vec<Vec<Vec<(usize, Rational)>>>,
    /// reward[s][a][s']
    pub reward: Vec<Vec<Vec<Rational>>>,
    pub start: usize,
    pub terminal: Vec<bool>,
}

impl TabularMdp {
    pub fn validate(&self) -> Result<()> {
        let n = self.state_names.len();
        let m = self.action_names.len();
        if n == 0 || m == 0 {
            return Err(CoreError::BadMachine("MDP needs states and actions".into()));
        }
        if self.start >= n {
            return Err(CoreError::BadMachine("MDP start state out of range".into()));
        }
        if self.transition.len() != n || self.reward.len() != n || self.terminal.len() != n {
            return Err(CoreError::BadMachine("MDP tables must cover every state".into()));
        }
        for s in 0..n {
            if self.transition[s].len() != m || self.reward[s].len() != m {
                return Err(CoreError::BadMachine(format!(
                    "MDP state {s} must have a row per action"
                )));
            }
            for a in 0..m {
                let mut total = Rational::zero();
                for (succ, p) in &self.transition[s][a] {
                    if *succ >= n {
                        return Err(CoreError::BadMachine(format!(
                            "MDP transition target {succ} out of range at ({s},{a})"
                        )));
                    }
                    if !p.is_positive() {
                        return Err(CoreError::BadMachine(format!(
                            "non-positive transition probability at ({s},{a})"
                        )));
                    }
                    total += p;
                }
                if total != Rational::one() {
                    return Err(CoreError::BadMachine(format!(
                        "MDP transition row ({s},{a}) sums to {total}, expected exactly 1"
                    )));
                }
                if self.reward[s][a].len() != n {
                    return Err(CoreError::BadMachine(format!(
                        "MDP reward row ({s},{a}) must cover every successor"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn num_actions(&self) -> usize {
        self.action_names.len()
    }

    /// States reachable from the start under arbitrary action choices,
    /// stopping at terminals.
    pub fn reachable_states(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut stack = vec![self.start];
        seen[self.start] = true;
        while let Some(s) = stack.pop() {
            if self.terminal[s] {
                continue;
            }
            for a in 0..self.num_actions() {
                for (succ, _) in &self.transition[s][a] {
                    if !seen[*succ] {
                        seen[*succ] = true;
                        stack.push(*succ);
                    }
                }
            }
        }
        seen
    }
}

/// Result of exact policy iteration: the canonical optimal policy (lowest
/// action index among maximizers at each state), whether the argmax was
/// unique at every reachable non-terminal state, and the optimal values.
#[derive(Clone, Debug)]
pub struct PolicyAnalysis {
    pub policy: Vec<usize>,
    pub unique: bool,
    pub values: Vec<Rational>,
}

/// Exact policy iteration with discount `gamma`. Terminal states are treated
/// as absorbing with zero onward reward.
pub fn optimal_policy(mdp: &TabularMdp, gamma: &Rational) -> Result<PolicyAnalysis> {
    mdp.validate()?;
    if gamma.is_negative() || *gamma >= Rational::one() {
        return Err(CoreError::BadSpec(format!(
            "policy iteration needs 0 <= gamma < 1, got {gamma}"
        )));
    }
    let n = mdp.num_states();
    let m = mdp.num_actions();
    let mut policy = vec![0usize; n];
    loop {
        // Evaluate: v = r_pi + gamma P_pi v, with terminals pinned at 0.
        let mut a = vec![vec![Rational::zero(); n]; n];
        let mut b = vec![Rational::zero(); n];
        for s in 0..n {
            a[s][s] = Rational::one();
            if mdp.terminal[s] {
                continue;
            }
            for (succ, p) in &mdp.transition[s][policy[s]] {
                let w = gamma * p;
                a[s][*succ] -= &w;
                b[s] += &(p * &mdp.reward[s][policy[s]][*succ]);
            }
        }
        let values = solve_linear(a, b).expect("discounted evaluation is non-singular");

        // Improve greedily with exact comparisons.
        let q = |s: usize, act: usize| -> Rational {
            let mut total = Rational::zero();
            for (succ, p) in &mdp.transition[s][act] {
                let future = gamma * &values[*succ];
                total += &(p * &(&mdp.reward[s][act][*succ] + &future));
            }
            total
        };
        let mut next = policy.clone();
        for s in 0..n {
            if mdp.terminal[s] {
                continue;
            }
            let mut best = next[s];
            let mut best_q = q(s, best);
            for act in 0..m {
                let qa = q(s, act);
                if qa > best_q || (qa == best_q && act < best) {
                    best = act;
                    best_q = qa;
                }
            }
            next[s] = best;
        }
        if next == policy {
            // Converged; check argmax uniqueness at reachable states.
            let reachable = mdp.reachable_states();
            let mut unique = true;
            'outer: for s in 0..n {
                if mdp.terminal[s] || !reachable[s] {
                    continue;
                }
                let best_q = q(s, policy[s]);
                for act in 0..m {
                    if act != policy[s] && q(s, act) == best_q {
                        unique = false;
                        break 'outer;
                    }
                }
            }
            return Ok(PolicyAnalysis { policy, unique, values });
        }
        policy = next;
    }
}
