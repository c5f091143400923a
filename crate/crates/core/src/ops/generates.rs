//! The generates operator in its three forms: per-environment, uniform
//! (environment-free), and restricted to an explicit list of learning rules.

use crate::agent::{Agent, FsmAgent};
use crate::env::FsmEnvironment;
use crate::error::{CoreError, Result};
use crate::history::History;
use crate::ops::{all_histories, semantics_of};
use crate::product::{free_product, product_reachable, ProductGraph};
use crate::realizable::realizable_histories;
use crate::verdict::{Semantics, Verdict};

fn keep_least(best: &mut Option<History>, candidate: History) {
    match best {
        Some(cur) if cur.canonical_cmp(&candidate).is_le() => {}
        _ => *best = Some(candidate),
    }
}

/// Pointwise agreement over the realizable product of one target agent with
/// the basis as trackers: returns the canonically least history at which no
/// basis member matches, if any.
fn exact_pointwise_failure(
    target: &FsmAgent,
    basis: &[&FsmAgent],
    graph: &ProductGraph,
) -> Option<History> {
    let mut best: Option<History> = None;
    for idx in 0..graph.num_nodes() {
        let node = graph.node(idx);
        let target_out = target.output(node.agent_states[0]);
        let matched = basis
            .iter()
            .enumerate()
            .any(|(i, b)| b.output(node.agent_states[i + 1]) == target_out);
        if !matched {
            keep_least(&mut best, graph.witness_history(idx));
        }
    }
    best
}

/// Does `basis` generate `lambda_set` in `env`? Holds when every member of
/// the target set agrees with some basis member at every realizable history.
/// Exact over pure state machines; bounded at the largest table horizon
/// otherwise. Failing verdicts carry the least counterexample history.
pub fn check_generates(
    basis: &[Agent],
    lambda_set: &[Agent],
    env: &FsmEnvironment,
) -> Result<Verdict> {
    if basis.is_empty() {
        return Err(CoreError::EmptyBasis);
    }
    let semantics = semantics_of(basis.iter().chain(lambda_set));
    let mut best: Option<History> = None;
    for target in lambda_set {
        let failure = match semantics {
            Semantics::Exact => {
                let target_fsm = target.as_fsm().expect("exact semantics implies fsm");
                let basis_fsm: Vec<&FsmAgent> =
                    basis.iter().map(|b| b.as_fsm().expect("exact semantics")).collect();
                let mut participants = vec![target_fsm];
                participants.extend(basis_fsm.iter().copied());
                let graph = product_reachable(&participants, env)?;
                exact_pointwise_failure(target_fsm, &basis_fsm, &graph)
            }
            Semantics::Bounded { horizon } => {
                let mut failure = None;
                for h in realizable_histories(target, env, horizon)? {
                    let out = target.act(&h);
                    if !basis.iter().any(|b| b.act(&h) == out) {
                        failure = Some(h);
                        break; // canonical enumeration order: first is least
                    }
                }
                failure
            }
        };
        if let Some(h) = failure {
            keep_least(&mut best, h);
        }
    }
    Ok(Verdict { holds: best.is_none(), semantics, witness: best })
}

/// Uniform generation: the same pointwise condition quantified over *all*
/// histories, decided on the joint closure of the participants under every
/// (action, observation) input.
pub fn check_uniform_generates(basis: &[Agent], lambda_set: &[Agent]) -> Result<Verdict> {
    if basis.is_empty() {
        return Err(CoreError::EmptyBasis);
    }
    let semantics = semantics_of(basis.iter().chain(lambda_set));
    let mut best: Option<History> = None;
    for target in lambda_set {
        let failure = match semantics {
            Semantics::Exact => {
                let target_fsm = target.as_fsm().expect("exact semantics implies fsm");
                let basis_fsm: Vec<&FsmAgent> =
                    basis.iter().map(|b| b.as_fsm().expect("exact semantics")).collect();
                let mut participants = vec![target_fsm];
                participants.extend(basis_fsm.iter().copied());
                let graph = free_product(&participants)?;
                exact_pointwise_failure(target_fsm, &basis_fsm, &graph)
            }
            Semantics::Bounded { horizon } => {
                let mut failure = None;
                for h in all_histories(target.interface(), horizon) {
                    let out = target.act(&h);
                    if !basis.iter().any(|b| b.act(&h) == out) {
                        failure = Some(h);
                        break;
                    }
                }
                failure
            }
        };
        if let Some(h) = failure {
            keep_least(&mut best, h);
        }
    }
    Ok(Verdict { holds: best.is_none(), semantics, witness: best })
}

/// A finite-state learning rule: a deterministic machine over the interaction
/// stream whose states each select a basis index.
#[derive(Clone, Debug, PartialEq)]
pub struct LearningRuleFsm {
    initial: usize,
    /// step[state][action_idx * num_obs + obs_idx]
    step: Vec<Vec<usize>>,
    select: Vec<usize>,
    num_observations: usize,
    name: String,
}

impl LearningRuleFsm {
    pub fn new(
        num_observations: usize,
        initial: usize,
        step: Vec<Vec<usize>>,
        select: Vec<usize>,
        name: impl Into<String>,
    ) -> Result<Self> {
        let n = select.len();
        if n == 0 || step.len() != n || initial >= n {
            return Err(CoreError::BadMachine("malformed learning rule machine".into()));
        }
        for row in &step {
            if row.iter().any(|t| *t >= n) {
                return Err(CoreError::BadMachine("learning rule step target out of range".into()));
            }
        }
        Ok(LearningRuleFsm {
            initial,
            step,
            select,
            num_observations,
            name: name.into(),
        })
    }

    /// Rule that always selects one basis index.
    pub fn constant(index: usize, name: impl Into<String>) -> Self {
        LearningRuleFsm {
            initial: 0,
            step: vec![vec![0]],
            select: vec![index],
            num_observations: 1,
            name: name.into(),
        }
    }

    /// Rule cycling through the given indices, advancing one step per pair.
    pub fn cycling(indices: Vec<usize>, name: impl Into<String>) -> Self {
        let n = indices.len();
        let step: Vec<Vec<usize>> = (0..n).map(|s| vec![(s + 1) % n]).collect();
        LearningRuleFsm {
            initial: 0,
            step,
            select: indices,
            num_observations: 1,
            name: name.into(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_states(&self) -> usize {
        self.select.len()
    }

    pub fn initial_state(&self) -> usize {
        self.initial
    }

    pub fn selected(&self, state: usize) -> usize {
        self.select[state]
    }

    pub fn max_selected(&self) -> usize {
        *self.select.iter().max().expect("select is non-empty")
    }

    pub fn next_state(&self, state: usize, action: u16, observation: u16) -> usize {
        let row = &self.step[state];
        // Rules with a single-column step table ignore the stream content.
        if row.len() == 1 {
            row[0]
        } else {
            row[action as usize * self.num_observations + observation as usize]
        }
    }

    pub fn state_after(&self, h: &History) -> usize {
        h.pairs()
            .iter()
            .fold(self.initial, |s, (a, o)| self.next_state(s, *a, *o))
    }

    /// The basis index selected at a history.
    pub fn select_at(&self, h: &History) -> usize {
        self.selected(self.state_after(h))
    }
}

/// BFS over the joint states of (target, rule, basis members, optional env
/// state) looking for the canonically least history where the rule-selected
/// member's output differs from the target's. `None` means the rule produces
/// the target everywhere in scope.
fn rule_failure_exact(
    target: &FsmAgent,
    rule: &LearningRuleFsm,
    basis: &[&FsmAgent],
    env: Option<&FsmEnvironment>,
) -> Option<History> {
    #[derive(Clone, PartialEq, Eq, Hash)]
    struct Joint {
        target: usize,
        rule: usize,
        members: Vec<usize>,
        env: usize,
    }
    let interface = target.interface();
    let num_actions = interface.num_actions() as u16;
    let num_obs = interface.num_observations() as u16;
    let initial = Joint {
        target: target.initial_state(),
        rule: rule.initial_state(),
        members: basis.iter().map(|b| b.initial_state()).collect(),
        env: env.map(|e| e.initial_state()).unwrap_or(0),
    };
    let mut index = std::collections::HashMap::new();
    index.insert(initial.clone(), 0usize);
    let mut nodes = vec![initial];
    let mut paths: Vec<History> = vec![History::empty()];
    let mut cursor = 0;
    while cursor < nodes.len() {
        let node = nodes[cursor].clone();
        let chosen = rule.selected(node.rule);
        if basis[chosen].output(node.members[chosen]) != target.output(node.target) {
            return Some(paths[cursor].clone());
        }
        for action in 0..num_actions {
            // Realizable gating only applies in an environment.
            if env.is_some() && !target.output(node.target).prob(action).is_positive() {
                continue;
            }
            for obs in 0..num_obs {
                let env_targets: Vec<usize> = match env {
                    None => vec![0],
                    Some(e) => e
                        .outcomes(node.env, action)
                        .iter()
                        .filter(|o| o.observation == obs)
                        .map(|o| o.next_state)
                        .collect(),
                };
                for env_next in env_targets {
                    let next = Joint {
                        target: target.next_state(node.target, action, obs),
                        rule: rule.next_state(node.rule, action, obs),
                        members: node
                            .members
                            .iter()
                            .zip(basis)
                            .map(|(s, b)| b.next_state(*s, action, obs))
                            .collect(),
                        env: env_next,
                    };
                    if !index.contains_key(&next) {
                        index.insert(next.clone(), nodes.len());
                        paths.push(paths[cursor].extended(action, obs));
                        nodes.push(next);
                    }
                }
            }
        }
        cursor += 1;
    }
    None
}

/// Does some rule in `rules` turn `basis` into each member of `lambda_set`?
/// With `env = Some(..)` the condition is checked at every realizable
/// history; with `env = None` it is the uniform variant over all histories.
///
/// A failing verdict's witness is the failure point of the longest-surviving
/// rule for the first failing target.
pub fn check_sigma_generates(
    basis: &[Agent],
    rules: &[LearningRuleFsm],
    lambda_set: &[Agent],
    env: Option<&FsmEnvironment>,
) -> Result<Verdict> {
    if basis.is_empty() {
        return Err(CoreError::EmptyBasis);
    }
    if rules.is_empty() {
        return Err(CoreError::EmptyRules);
    }
    for rule in rules {
        if rule.max_selected() >= basis.len() {
            return Err(CoreError::BadMachine(format!(
                "rule {:?} selects index {} but the basis has {} members",
                rule.name(),
                rule.max_selected(),
                basis.len()
            )));
        }
    }
    let semantics = semantics_of(basis.iter().chain(lambda_set));

    let mut overall: Option<History> = None;
    for target in lambda_set {
        let mut best_rule_failure: Option<History> = None; // latest first-failure across rules
        let mut generated = false;
        for rule in rules {
            let first_failure = match semantics {
                Semantics::Exact => {
                    let basis_fsm: Vec<&FsmAgent> =
                        basis.iter().map(|b| b.as_fsm().expect("exact semantics")).collect();
                    rule_failure_exact(
                        target.as_fsm().expect("exact semantics"),
                        rule,
                        &basis_fsm,
                        env,
                    )
                }
                Semantics::Bounded { horizon } => {
                    let histories = match env {
                        Some(e) => realizable_histories(target, e, horizon)?,
                        None => all_histories(target.interface(), horizon),
                    };
                    let mut failure = None;
                    for h in &histories {
                        let chosen = &basis[rule.select_at(h)];
                        if chosen.act(h) != target.act(h) {
                            failure = Some(h.clone());
                            break;
                        }
                    }
                    failure
                }
            };
            match first_failure {
                None => {
                    generated = true;
                    break;
                }
                Some(h) => match &best_rule_failure {
                    Some(cur) if cur.canonical_cmp(&h).is_ge() => {}
                    _ => best_rule_failure = Some(h),
                },
            }
        }
        if !generated {
            if overall.is_none() {
                overall = best_rule_failure;
            }
            return Ok(Verdict { holds: false, semantics, witness: overall });
        }
    }
    Ok(Verdict { holds: true, semantics, witness: None })
}
