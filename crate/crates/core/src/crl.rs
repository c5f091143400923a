//! The continual-RL instance classifier and simple model-based learning
//! rules.
//!
//! An instance bundles an environment, a performance spec, a finite agent set
//! and a basis drawn from it. It is classified positive exactly when every
//! performance-optimal agent never reaches the basis. The two premises — the
//! basis is a proper behavioural subset of the agent set, and the basis
//! generates the agent set — are checked and reported rather than enforced,
//! so near-miss instances can be studied.

use serde::Serialize;

use crate::agent::{behaviorally_equal, Agent, FsmAgent};
use crate::dist::ActionDistribution;
use crate::env::FsmEnvironment;
use crate::error::{CoreError, Result};
use crate::history::History;
use crate::ops::{check_generates, check_reaches, ReachModality};
use crate::product::determinized_product;
use crate::rational::Rational;
use crate::realizable::realizable_histories;
use crate::value::{
    discounted_values, finite_horizon_totals, optimal_agents, value_chain, PerformanceSpec,
};
use crate::verdict::Verdict;

#[derive(Clone, Debug)]
pub struct CrlInstance {
    pub env: FsmEnvironment,
    pub perf: PerformanceSpec,
    pub agents: Vec<Agent>,
    pub basis: Vec<Agent>,
}

impl CrlInstance {
    pub fn new(
        env: FsmEnvironment,
        perf: PerformanceSpec,
        agents: Vec<Agent>,
        basis: Vec<Agent>,
    ) -> Result<Self> {
        perf.validate()?;
        if agents.is_empty() {
            return Err(CoreError::BadSpec("instance needs a non-empty agent set".into()));
        }
        if basis.is_empty() {
            return Err(CoreError::EmptyBasis);
        }
        for a in agents.iter().chain(&basis) {
            if !a.interface().compatible_with(env.interface()) {
                return Err(CoreError::InterfaceMismatch(format!(
                    "agent {:?} does not share the environment interface",
                    a.name()
                )));
            }
        }
        Ok(CrlInstance { env, perf, agents, basis })
    }

    /// Behavioural containment: every basis member equals some agent-set
    /// member, and some agent-set member is outside the basis.
    pub fn basis_is_proper_subset(&self) -> bool {
        let contained = self
            .basis
            .iter()
            .all(|b| self.agents.iter().any(|a| behaviorally_equal(a, b)));
        let proper = self
            .agents
            .iter()
            .any(|a| !self.basis.iter().any(|b| behaviorally_equal(a, b)));
        contained && proper
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReachEntry {
    pub agent: usize,
    pub modality: &'static str,
    pub holds: bool,
}

/// Classification outcome: the optimal set, the per-optimal-agent
/// never-reaches verdicts, and the premise checks.
#[derive(Clone, Debug)]
pub struct CrlReport {
    pub optimal: Vec<usize>,
    pub reaches: Vec<(usize, Verdict)>,
    pub is_crl: bool,
    pub basis_generates: Verdict,
    pub basis_is_proper_subset: bool,
}

impl CrlReport {
    pub fn to_json(&self, instance: &CrlInstance) -> serde_json::Value {
        let ifc = instance.env.interface();
        serde_json::json!({
            "is_crl": self.is_crl,
            "optimal": self.optimal.iter().map(|i| serde_json::json!({
                "id": i,
                "name": instance.agents[*i].name(),
            })).collect::<Vec<_>>(),
            "reaches": self.reaches.iter().map(|(i, v)| {
                let mut entry = v.to_json(ifc);
                entry["id"] = serde_json::json!(i);
                entry["modality"] = serde_json::json!("never");
                entry
            }).collect::<Vec<_>>(),
            "basis_generates": self.basis_generates.to_json(ifc),
            "basis_is_proper_subset": self.basis_is_proper_subset,
        })
    }
}

/// Classify an instance: compute the exact optimal set, then ask whether each
/// optimal agent never reaches the basis. Premise failures (basis not a
/// proper subset, basis failing to generate) are reported, not fatal.
pub fn classify_crl(instance: &CrlInstance) -> Result<CrlReport> {
    let optimal = optimal_agents(&instance.agents, &instance.env, &instance.perf)?;
    let basis_generates = check_generates(&instance.basis, &instance.agents, &instance.env)?;
    let mut reaches = Vec::with_capacity(optimal.len());
    let mut is_crl = true;
    for &i in &optimal {
        let v = check_reaches(
            &instance.agents[i],
            &instance.basis,
            &instance.env,
            ReachModality::Never,
        )?;
        is_crl &= v.holds;
        reaches.push((i, v));
    }
    Ok(CrlReport {
        optimal,
        reaches,
        is_crl,
        basis_generates,
        basis_is_proper_subset: instance.basis_is_proper_subset(),
    })
}

/// Enlarge the basis with every optimal agent. The result is never a positive
/// instance: each optimal agent is then a basis member and members always
/// reach their own set. Generation is preserved (a superset of a generating
/// basis still generates).
pub fn augment_with_optimal(instance: &CrlInstance) -> Result<CrlInstance> {
    let optimal = optimal_agents(&instance.agents, &instance.env, &instance.perf)?;
    let mut basis = instance.basis.clone();
    for &i in &optimal {
        let candidate = &instance.agents[i];
        if !basis.iter().any(|b| behaviorally_equal(b, candidate)) {
            basis.push(candidate.clone());
        }
    }
    CrlInstance::new(instance.env.clone(), instance.perf.clone(), instance.agents.clone(), basis)
}

/// A learning rule that, at every history, selects the basis member with the
/// best exact value in an internal environment model, ties broken by lowest
/// index. Its state is the joint of the model state and every basis member's
/// machine state, so selection depends on history only through machine
/// states.
///
/// The model state is advanced deterministically: after (action,
/// observation), move to the lowest-indexed model state consistent with the
/// observation, or stay put if the model cannot explain it.
#[derive(Clone, Debug)]
pub struct ModelBasedRule {
    basis: Vec<FsmAgent>,
    model: FsmEnvironment,
    perf: PerformanceSpec,
    /// values[member][member_state * model_states + model_state]
    values: Vec<Vec<Rational>>,
}

impl ModelBasedRule {
    pub fn basis(&self) -> &[FsmAgent] {
        &self.basis
    }

    pub fn model(&self) -> &FsmEnvironment {
        &self.model
    }

    pub fn perf(&self) -> &PerformanceSpec {
        &self.perf
    }

    /// Value of running `member` forever from the given joint configuration
    /// of its machine state and the model state.
    pub fn member_value(&self, member: usize, member_state: usize, model_state: usize) -> &Rational {
        &self.values[member][member_state * self.model.num_states() + model_state]
    }

    pub fn select(&self, member_states: &[usize], model_state: usize) -> usize {
        let mut best = 0usize;
        for i in 1..self.basis.len() {
            if self.member_value(i, member_states[i], model_state)
                > self.member_value(best, member_states[best], model_state)
            {
                best = i;
            }
        }
        best
    }

    fn next_model_state(&self, model_state: usize, action: u16, observation: u16) -> usize {
        self.model
            .consistent_successors(model_state, action, observation)
            .first()
            .copied()
            .unwrap_or(model_state)
    }

    /// The agent induced by following this rule: a state machine over
    /// (model state, basis machine states) whose output at each state is the
    /// selected member's output. Total over all inputs. Also returns the
    /// selected basis index per machine state.
    pub fn generated_agent_with_selections(&self) -> (FsmAgent, Vec<usize>) {
        #[derive(Clone, PartialEq, Eq, Hash)]
        struct RuleState {
            model: usize,
            members: Vec<usize>,
        }
        let interface = self.model.interface().clone();
        let num_actions = interface.num_actions() as u16;
        let num_obs = interface.num_observations() as u16;
        let initial = RuleState {
            model: self.model.initial_state(),
            members: self.basis.iter().map(|b| b.initial_state()).collect(),
        };
        let mut index = std::collections::HashMap::new();
        index.insert(initial.clone(), 0usize);
        let mut states = vec![initial];
        let mut step: Vec<Vec<usize>> = Vec::new();
        let mut outputs: Vec<ActionDistribution> = Vec::new();
        let mut selections: Vec<usize> = Vec::new();
        let mut cursor = 0;
        while cursor < states.len() {
            let st = states[cursor].clone();
            let chosen = self.select(&st.members, st.model);
            selections.push(chosen);
            outputs.push(self.basis[chosen].output(st.members[chosen]).clone());
            let mut row = Vec::with_capacity((num_actions * num_obs) as usize);
            for a in 0..num_actions {
                for o in 0..num_obs {
                    let next = RuleState {
                        model: self.next_model_state(st.model, a, o),
                        members: st
                            .members
                            .iter()
                            .zip(&self.basis)
                            .map(|(s, b)| b.next_state(*s, a, o))
                            .collect(),
                    };
                    let id = match index.get(&next) {
                        Some(i) => *i,
                        None => {
                            let i = states.len();
                            index.insert(next.clone(), i);
                            states.push(next);
                            i
                        }
                    };
                    row.push(id);
                }
            }
            step.push(row);
            cursor += 1;
        }
        let agent = FsmAgent::new(interface, 0, outputs, step, "model-based")
            .expect("rule state machine is well-formed");
        (agent, selections)
    }

    pub fn generated_agent(&self) -> FsmAgent {
        self.generated_agent_with_selections().0
    }

    /// Selected basis index after folding a history from the initial state.
    pub fn select_at(&self, h: &History) -> usize {
        let mut model_state = self.model.initial_state();
        let mut member_states: Vec<usize> =
            self.basis.iter().map(|b| b.initial_state()).collect();
        for (a, o) in h.pairs() {
            model_state = self.next_model_state(model_state, *a, *o);
            for (s, b) in member_states.iter_mut().zip(&self.basis) {
                *s = b.next_state(*s, *a, *o);
            }
        }
        self.select(&member_states, model_state)
    }
}

/// Precompute every member's exact value at every (member state, model state)
/// pair and package them as a rule.
pub fn make_model_based_rule(
    basis: &[Agent],
    model: &FsmEnvironment,
    perf: &PerformanceSpec,
) -> Result<ModelBasedRule> {
    if basis.is_empty() {
        return Err(CoreError::EmptyBasis);
    }
    perf.validate()?;
    let basis: Vec<FsmAgent> = basis
        .iter()
        .map(|a| {
            a.as_fsm().cloned().ok_or_else(|| {
                CoreError::BadSpec("model-based rules need state-machine basis members".into())
            })
        })
        .collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(basis.len());
    for member in &basis {
        // The full cartesian chain over (member state, model state): the rule
        // can find itself in configurations unreachable under the member's
        // own behaviour, so every pair needs a value.
        let n_member = member.num_states();
        let n_model = model.num_states();
        let n = n_member * n_model;
        let mut transitions: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); n];
        let mut reward = vec![Rational::zero(); n];
        for ms in 0..n_member {
            for es in 0..n_model {
                let idx = ms * n_model + es;
                let out = member.output(ms);
                for action in out.support() {
                    let p_action = out.prob(action).clone();
                    for outc in model.outcomes(es, action) {
                        let p = &p_action * &outc.prob;
                        reward[idx] += &(&p * model.reward(action, outc.observation));
                        let next =
                            member.next_state(ms, action, outc.observation) * n_model + outc.next_state;
                        transitions[idx].push((next, p));
                    }
                }
            }
        }
        let member_values = match perf {
            PerformanceSpec::Discounted { gamma } => {
                let mut a = vec![vec![Rational::zero(); n]; n];
                for (i, row) in a.iter_mut().enumerate() {
                    row[i] = Rational::one();
                    for (t, p) in &transitions[i] {
                        let w = gamma * p;
                        row[*t] -= &w;
                    }
                }
                crate::solve::solve_linear(a, reward.clone())
                    .expect("I - gamma*P is non-singular for gamma < 1")
            }
            PerformanceSpec::FiniteHorizonAverage { horizon } => {
                let mut w = vec![Rational::zero(); n];
                for _ in 0..*horizon {
                    let mut next = reward.clone();
                    for (i, acc) in next.iter_mut().enumerate() {
                        for (t, p) in &transitions[i] {
                            *acc += &(p * &w[*t]);
                        }
                    }
                    w = next;
                }
                let scale = Rational::new(1, *horizon as i64);
                w.into_iter().map(|v| &v * &scale).collect()
            }
        };
        values.push(member_values);
    }
    Ok(ModelBasedRule { basis, model: model.clone(), perf: perf.clone(), values })
}

/// Replanning behaviour of a model-based rule driven by the real environment.
#[derive(Clone, Debug, Serialize)]
pub struct ReplanReport {
    /// replans_per_depth[d] = number of realizable histories of length d+1
    /// whose selection differs from their parent's.
    pub replans_per_depth: Vec<usize>,
    pub total_replans: usize,
    /// True iff every reachable configuration can still realizably reach a
    /// configuration with a different selection — the finite-state reading of
    /// "replans forever".
    pub every_history_replans: bool,
}

pub fn count_replans(
    rule: &ModelBasedRule,
    env: &FsmEnvironment,
    horizon: usize,
) -> Result<ReplanReport> {
    if horizon == 0 {
        return Err(CoreError::BadSpec("replan counting needs a horizon >= 1".into()));
    }
    let (agent_fsm, state_selection) = rule.generated_agent_with_selections();
    let agent: Agent = agent_fsm.clone().into();

    // Bounded counts by direct enumeration.
    let histories = realizable_histories(&agent, env, horizon)?;
    let mut replans_per_depth = vec![0usize; horizon];
    for h in &histories {
        if h.is_empty() {
            continue;
        }
        let parent = h.prefix(h.len() - 1);
        if rule.select_at(h) != rule.select_at(&parent) {
            replans_per_depth[h.len() - 1] += 1;
        }
    }
    let total_replans = replans_per_depth.iter().sum();

    // Exact graph form: from every reachable history class, some history
    // class with a different selection must be realizably reachable. The
    // determinized product quotients histories exactly; its first agent
    // component is the rule state, which fixes the selection.
    let graph = determinized_product(&[&agent_fsm], env)?;
    let selections: Vec<usize> = (0..graph.num_nodes())
        .map(|n| state_selection[graph.node(n).agent_states[0]])
        .collect();
    let mut every_history_replans = true;
    'nodes: for start in 0..graph.num_nodes() {
        let own = selections[start];
        let mut seen = vec![false; graph.num_nodes()];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(n) = stack.pop() {
            for e in graph.edges(n) {
                if selections[e.target] != own {
                    continue 'nodes;
                }
                if !seen[e.target] {
                    seen[e.target] = true;
                    stack.push(e.target);
                }
            }
        }
        every_history_replans = false;
        break;
    }
    Ok(ReplanReport { replans_per_depth, total_replans, every_history_replans })
}

/// Exact discounted (or finite-horizon) values of each agent from the empty
/// history, exposed for reports.
pub fn agent_values(
    agents: &[Agent],
    env: &FsmEnvironment,
    perf: &PerformanceSpec,
) -> Result<Vec<Rational>> {
    agents
        .iter()
        .map(|a| crate::value::compute_value(a, env, perf, &History::empty()))
        .collect()
}

// Used by reports that want the chain values of one agent.
pub fn chain_values(
    agent: &FsmAgent,
    env: &FsmEnvironment,
    perf: &PerformanceSpec,
) -> Result<Vec<Rational>> {
    let chain = value_chain(agent, env)?;
    Ok(match perf {
        PerformanceSpec::Discounted { gamma } => discounted_values(&chain, gamma),
        PerformanceSpec::FiniteHorizonAverage { horizon } => {
            let scale = Rational::new(1, *horizon as i64);
            finite_horizon_totals(&chain, *horizon)
                .into_iter()
                .map(|v| &v * &scale)
                .collect()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{build_switching_env, SwitchingSpec, TabularMdp};
    use crate::rational::rat;

    /// One-state bandit member: action 0 pays `first`, action 1 pays `second`.
    fn bandit_member(name: &str, first: i64, second: i64) -> TabularMdp {
        TabularMdp {
            name: name.into(),
            state_names: vec!["s".into()],
            action_names: vec!["a0".into(), "a1".into()],
            transition: vec![vec![vec![(0, rat(1, 1))], vec![(0, rat(1, 1))]]],
            reward: vec![vec![vec![rat(first, 1)], vec![rat(second, 1)]]],
            start: 0,
            terminal: vec![false],
        }
    }

    /// The two-phase toy: a flip bandit whose paying arm swaps silently with
    /// probability `p` per step. Observations are "s#0" (no pay, index 0) and
    /// "s#1" (pay, index 1).
    pub(crate) fn two_phase_env(p: Rational) -> FsmEnvironment {
        build_switching_env(&SwitchingSpec {
            mdps: vec![bandit_member("pay0", 1, 0), bandit_member("pay1", 0, 1)],
            p_switch: p,
        })
        .unwrap()
    }

    /// Win-stay/lose-shift: repeat the last action after a paying
    /// observation, switch to the other one after a non-paying one. The next
    /// state depends only on the last (action, outcome) pair.
    pub(crate) fn win_stay_lose_shift(env: &FsmEnvironment) -> FsmAgent {
        let ifc = env.interface().clone();
        // row layout: (a0,lose)->1 (a0,win)->0 (a1,lose)->0 (a1,win)->1
        let row = vec![1, 0, 0, 1];
        FsmAgent::new(
            ifc,
            0,
            vec![
                ActionDistribution::point_mass(0, 2),
                ActionDistribution::point_mass(1, 2),
            ],
            vec![row.clone(), row],
            "win-stay-lose-shift",
        )
        .unwrap()
    }

    fn toy_instance() -> CrlInstance {
        let env = two_phase_env(rat(1, 10));
        let ifc = env.interface().clone();
        let c0: Agent = FsmAgent::constant_action(ifc.clone(), 0).unwrap().into();
        let c1: Agent = FsmAgent::constant_action(ifc, 1).unwrap().into();
        let tracker: Agent = win_stay_lose_shift(&env).into();
        CrlInstance::new(
            env,
            PerformanceSpec::Discounted { gamma: rat(9, 10) },
            vec![c0.clone(), c1.clone(), tracker],
            vec![c0, c1],
        )
        .unwrap()
    }

    #[test]
    fn tracker_value_beats_constants_exactly() {
        // Hand-solved chains at gamma = 9/10, p = 1/10. The tracker realigns
        // within one step of every switch (the pay observation reveals the
        // active phase), so it earns 1 exactly when no switch occurs:
        // v = (1-p)/(1-gamma) = 9. The aligned constant solves the two-state
        // system v0 = (1-p)(1 + g v0) + p g v1, v1 = (1-p) g v1 + p (1 + g v0)
        // giving 45/7.
        let instance = toy_instance();
        let values = agent_values(&instance.agents, &instance.env, &instance.perf).unwrap();
        assert_eq!(values[0], rat(45, 7));
        assert_eq!(values[1], rat(25, 7));
        assert_eq!(values[2], rat(9, 1));
        assert!(values[2] > values[0] && values[2] > values[1]);
    }

    #[test]
    fn two_phase_toy_is_a_positive_instance() {
        let instance = toy_instance();
        let report = classify_crl(&instance).unwrap();
        assert_eq!(report.optimal, vec![2], "the tracker is uniquely optimal");
        assert!(report.is_crl);
        assert!(report.basis_generates.holds);
        assert!(report.basis_is_proper_subset);
    }

    #[test]
    fn augmentation_flips_the_classification() {
        let instance = toy_instance();
        let augmented = augment_with_optimal(&instance).unwrap();
        assert_eq!(augmented.basis.len(), 3);
        let report = classify_crl(&augmented).unwrap();
        assert!(!report.is_crl);
        // And generation is preserved by the superset.
        assert!(report.basis_generates.holds);
        // Augmenting again is a no-op on the verdict.
        let again = augment_with_optimal(&augmented).unwrap();
        assert!(!classify_crl(&again).unwrap().is_crl);
        assert_eq!(again.basis.len(), 3);
    }

    #[test]
    fn agent_set_inside_basis_is_never_positive() {
        let env = two_phase_env(rat(1, 10));
        let ifc = env.interface().clone();
        let c0: Agent = FsmAgent::constant_action(ifc.clone(), 0).unwrap().into();
        let c1: Agent = FsmAgent::constant_action(ifc, 1).unwrap().into();
        let instance = CrlInstance::new(
            env,
            PerformanceSpec::Discounted { gamma: rat(1, 2) },
            vec![c0.clone(), c1.clone()],
            vec![c0, c1],
        )
        .unwrap();
        let report = classify_crl(&instance).unwrap();
        assert!(!report.is_crl);
        assert!(!report.basis_is_proper_subset);
    }

    #[test]
    fn model_based_rule_tracks_the_phase() {
        let env = two_phase_env(rat(1, 10));
        let ifc = env.interface().clone();
        let c0: Agent = FsmAgent::constant_action(ifc.clone(), 0).unwrap().into();
        let c1: Agent = FsmAgent::constant_action(ifc, 1).unwrap().into();
        let perf = PerformanceSpec::Discounted { gamma: rat(9, 10) };
        let rule = make_model_based_rule(&[c0, c1], &env, &perf).unwrap();
        // Conditional values: the aligned constant is worth 45/7, the
        // misaligned one 25/7, in both phases by symmetry.
        assert_eq!(*rule.member_value(0, 0, 0), rat(45, 7));
        assert_eq!(*rule.member_value(1, 0, 0), rat(25, 7));
        assert_eq!(*rule.member_value(0, 0, 1), rat(25, 7));
        assert_eq!(*rule.member_value(1, 0, 1), rat(45, 7));
        assert_eq!(rule.select(&[0, 0], 0), 0);
        assert_eq!(rule.select(&[0, 0], 1), 1);

        // The selection changes across a phase boundary.
        let h_win = History::from_pairs(vec![(0, 1)]);
        let h_lose = History::from_pairs(vec![(0, 0)]);
        assert_eq!(rule.select_at(&History::empty()), 0);
        assert_eq!(rule.select_at(&h_win), 0);
        assert_eq!(rule.select_at(&h_lose), 1);

        // The generated agent behaves like the hand-built tracker.
        let generated: Agent = rule.generated_agent().into();
        let tracker: Agent = win_stay_lose_shift(&env).into();
        assert!(behaviorally_equal(&generated, &tracker));
    }

    #[test]
    fn ties_select_the_lowest_index() {
        let env = two_phase_env(rat(1, 2));
        // With p = 1/2 the phase after any step is uniform, so both
        // constants have equal value everywhere: the rule must stick to
        // member 0.
        let ifc = env.interface().clone();
        let c0: Agent = FsmAgent::constant_action(ifc.clone(), 0).unwrap().into();
        let c1: Agent = FsmAgent::constant_action(ifc, 1).unwrap().into();
        let perf = PerformanceSpec::Discounted { gamma: rat(9, 10) };
        let rule = make_model_based_rule(&[c0, c1], &env, &perf).unwrap();
        let report = count_replans(&rule, &env, 4).unwrap();
        assert_eq!(report.total_replans, 0);
        assert!(!report.every_history_replans);
    }

    #[test]
    fn replans_forever_on_the_toy_and_never_on_a_static_model() {
        let env = two_phase_env(rat(1, 10));
        let ifc = env.interface().clone();
        let c0: Agent = FsmAgent::constant_action(ifc.clone(), 0).unwrap().into();
        let c1: Agent = FsmAgent::constant_action(ifc.clone(), 1).unwrap().into();
        let perf = PerformanceSpec::Discounted { gamma: rat(9, 10) };
        let rule = make_model_based_rule(&[c0.clone(), c1], &env, &perf).unwrap();
        let report = count_replans(&rule, &env, 8).unwrap();
        assert!(report.every_history_replans);
        assert!(report.total_replans > 0);
        // Every depth from 1 on sees at least one replanning history (a
        // phase flip is realizable at every step).
        assert!(report.replans_per_depth[1..].iter().all(|c| *c > 0));

        // Singleton basis: no alternative to switch to.
        let singleton = make_model_based_rule(std::slice::from_ref(&c0), &env, &perf).unwrap();
        let report = count_replans(&singleton, &env, 6).unwrap();
        assert_eq!(report.total_replans, 0);
        assert!(!report.every_history_replans);

        // Static model (no switching): selection never changes even though
        // the driving environment still switches.
        let static_env = two_phase_env(rat(0, 1));
        let ifc2 = static_env.interface().clone();
        let d0: Agent = FsmAgent::constant_action(ifc2.clone(), 0).unwrap().into();
        let d1: Agent = FsmAgent::constant_action(ifc2, 1).unwrap().into();
        let static_rule = make_model_based_rule(&[d0, d1], &static_env, &perf).unwrap();
        let report = count_replans(&static_rule, &env, 6).unwrap();
        assert_eq!(report.total_replans, 0);
        assert!(!report.every_history_replans);
    }

    #[test]
    fn classification_is_antitone_in_the_basis() {
        // Enlarging the basis can only flip positive -> negative.
        let instance = toy_instance();
        let positive = classify_crl(&instance).unwrap().is_crl;
        assert!(positive);
        let bigger = augment_with_optimal(&instance).unwrap();
        assert!(!classify_crl(&bigger).unwrap().is_crl);
    }

    #[test]
    fn reward_scaling_leaves_the_optimal_set_unchanged() {
        // Scale all member rewards by 3: argmax invariance.
        let scaled_env = build_switching_env(&SwitchingSpec {
            mdps: vec![bandit_member("pay0", 3, 0), bandit_member("pay1", 0, 3)],
            p_switch: rat(1, 10),
        })
        .unwrap();
        let base = toy_instance();
        let ifc = scaled_env.interface().clone();
        let c0: Agent = FsmAgent::constant_action(ifc.clone(), 0).unwrap().into();
        let c1: Agent = FsmAgent::constant_action(ifc, 1).unwrap().into();
        let tracker: Agent = win_stay_lose_shift(&scaled_env).into();
        let scaled = CrlInstance::new(
            scaled_env,
            base.perf.clone(),
            vec![c0.clone(), c1.clone(), tracker],
            vec![c0, c1],
        )
        .unwrap();
        let a = classify_crl(&base).unwrap();
        let b = classify_crl(&scaled).unwrap();
        assert_eq!(a.optimal, b.optimal);
        assert_eq!(a.is_crl, b.is_crl);
    }
}
