//! Finite agent representations: deterministic-state machines and bounded
//! history tables. These are the only agents on which operator checks are
//! decided; everything else (e.g. Q-learners) lives in the simulation layer.

use std::collections::HashMap;

use crate::dist::ActionDistribution;
use crate::error::{CoreError, Result};
use crate::history::History;
use crate::interface::Interface;

/// A finite-state agent. `step` is a total deterministic transition over
/// (state, action, observation); the output distribution depends only on the
/// current state, so the induced history function is well-defined everywhere.
#[derive(Clone, Debug, PartialEq)]
pub struct FsmAgent {
    interface: Interface,
    initial: usize,
    outputs: Vec<ActionDistribution>,
    /// step[state][action_idx * num_obs + obs_idx] = next state
    step: Vec<Vec<usize>>,
    name: String,
}

impl FsmAgent {
    pub fn new(
        interface: Interface,
        initial: usize,
        outputs: Vec<ActionDistribution>,
        step: Vec<Vec<usize>>,
        name: impl Into<String>,
    ) -> Result<Self> {
        let n = outputs.len();
        if n == 0 {
            return Err(CoreError::BadMachine("agent needs at least one state".into()));
        }
        if initial >= n {
            return Err(CoreError::BadMachine(format!("initial state {initial} out of range")));
        }
        if step.len() != n {
            return Err(CoreError::BadMachine(format!(
                "step table has {} rows, expected {n}",
                step.len()
            )));
        }
        let width = interface.num_actions() * interface.num_observations();
        for (s, row) in step.iter().enumerate() {
            if row.len() != width {
                return Err(CoreError::BadMachine(format!(
                    "step row for state {s} has {} entries, expected {width}",
                    row.len()
                )));
            }
            if let Some(bad) = row.iter().find(|t| **t >= n) {
                return Err(CoreError::BadMachine(format!(
                    "step target {bad} out of range in state {s}"
                )));
            }
        }
        for (s, out) in outputs.iter().enumerate() {
            if out.num_actions() != interface.num_actions() {
                return Err(CoreError::BadMachine(format!(
                    "output of state {s} covers {} actions, interface has {}",
                    out.num_actions(),
                    interface.num_actions()
                )));
            }
        }
        Ok(FsmAgent { interface, initial, outputs, step, name: name.into() })
    }

    /// Agent that plays the same distribution at every history.
    pub fn constant(interface: Interface, dist: ActionDistribution) -> Result<Self> {
        let width = interface.num_actions() * interface.num_observations();
        let name = match dist.as_point_mass() {
            Some(a) => format!("const-{}", interface.action_name(a)),
            None => "const".to_string(),
        };
        FsmAgent::new(interface, 0, vec![dist], vec![vec![0; width]], name)
    }

    /// Point-mass constant agent.
    pub fn constant_action(interface: Interface, action: u16) -> Result<Self> {
        let n = interface.num_actions();
        FsmAgent::constant(interface, ActionDistribution::point_mass(action, n))
    }

    /// Two-state agent that alternates between two distributions by history
    /// length, regardless of what it observes.
    pub fn alternating(
        interface: Interface,
        even: ActionDistribution,
        odd: ActionDistribution,
    ) -> Result<Self> {
        let width = interface.num_actions() * interface.num_observations();
        FsmAgent::new(
            interface,
            0,
            vec![even, odd],
            vec![vec![1; width], vec![0; width]],
            "alternating",
        )
    }

    /// Memoryless reactive agent: output depends only on the most recent
    /// observation (state 0 holds the pre-observation output).
    pub fn from_observation_map(
        interface: Interface,
        initial_output: ActionDistribution,
        per_observation: Vec<ActionDistribution>,
    ) -> Result<Self> {
        let num_obs = interface.num_observations();
        if per_observation.len() != num_obs {
            return Err(CoreError::BadMachine(format!(
                "observation map covers {} observations, interface has {num_obs}",
                per_observation.len()
            )));
        }
        let num_actions = interface.num_actions();
        let mut outputs = vec![initial_output];
        outputs.extend(per_observation);
        // State o+1 means "last observation was o"; transitions ignore state.
        let row: Vec<usize> = (0..num_actions * num_obs).map(|i| i % num_obs + 1).collect();
        let step = vec![row; num_obs + 1];
        FsmAgent::new(interface, 0, outputs, step, "reactive")
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
        self.outputs.len()
    }

    pub fn initial_state(&self) -> usize {
        self.initial
    }

    pub fn output(&self, state: usize) -> &ActionDistribution {
        &self.outputs[state]
    }

    pub fn next_state(&self, state: usize, action: u16, observation: u16) -> usize {
        self.step[state][action as usize * self.interface.num_observations() + observation as usize]
    }

    /// State after folding `step` along a history from the initial state.
    pub fn state_after(&self, h: &History) -> usize {
        h.pairs()
            .iter()
            .fold(self.initial, |s, (a, o)| self.next_state(s, *a, *o))
    }
}

/// A bounded-horizon agent given by an explicit history table. The table is
/// total on histories of length <= horizon; longer queries return `fallback`.
/// Any operator check involving a table agent is only decidable to a finite
/// depth and is tagged `bounded`.
#[derive(Clone, Debug, PartialEq)]
pub struct TableAgent {
    interface: Interface,
    horizon: usize,
    table: HashMap<History, ActionDistribution>,
    fallback: ActionDistribution,
    name: String,
}

impl TableAgent {
    /// Materializes the full table by evaluating `f` on every history of
    /// length <= horizon. Exponential in the horizon; intended for the small
    /// depths the bounded semantics work at.
    pub fn from_fn(
        interface: Interface,
        horizon: usize,
        mut f: impl FnMut(&History) -> ActionDistribution,
        fallback: ActionDistribution,
        name: impl Into<String>,
    ) -> Result<Self> {
        let mut table = HashMap::new();
        let mut frontier = vec![History::empty()];
        let num_actions = interface.num_actions() as u16;
        let num_obs = interface.num_observations() as u16;
        for depth in 0..=horizon {
            let mut next = Vec::new();
            for h in frontier {
                let dist = f(&h);
                if dist.num_actions() != interface.num_actions() {
                    return Err(CoreError::BadMachine(format!(
                        "table entry at {h:?} covers {} actions, interface has {}",
                        dist.num_actions(),
                        interface.num_actions()
                    )));
                }
                if depth < horizon {
                    for a in 0..num_actions {
                        for o in 0..num_obs {
                            next.push(h.extended(a, o));
                        }
                    }
                }
                table.insert(h, dist);
            }
            frontier = next;
        }
        Ok(TableAgent {
            interface,
            horizon,
            table,
            fallback,
            name: name.into(),
        })
    }

    pub fn from_entries(
        interface: Interface,
        horizon: usize,
        entries: HashMap<History, ActionDistribution>,
        default_within_horizon: ActionDistribution,
        fallback: ActionDistribution,
        name: impl Into<String>,
    ) -> Result<Self> {
        for h in entries.keys() {
            if h.len() > horizon {
                return Err(CoreError::BadMachine(format!(
                    "table entry at {h:?} exceeds horizon {horizon}"
                )));
            }
        }
        TableAgent::from_fn(
            interface,
            horizon,
            |h| entries.get(h).cloned().unwrap_or_else(|| default_within_horizon.clone()),
            fallback,
            name,
        )
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

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn entries(&self) -> &HashMap<History, ActionDistribution> {
        &self.table
    }

    pub fn fallback(&self) -> &ActionDistribution {
        &self.fallback
    }

    pub fn act(&self, h: &History) -> &ActionDistribution {
        if h.len() > self.horizon {
            &self.fallback
        } else {
            self.table
                .get(h)
                .expect("table agents are total up to their horizon")
        }
    }
}

/// Either finite agent representation. Operator checks are exact when every
/// participant is an `Fsm`; any `Table` participant bounds them at a horizon.
#[derive(Clone, Debug, PartialEq)]
pub enum Agent {
    Fsm(FsmAgent),
    Table(TableAgent),
}

impl Agent {
    pub fn interface(&self) -> &Interface {
        match self {
            Agent::Fsm(a) => a.interface(),
            Agent::Table(a) => a.interface(),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Agent::Fsm(a) => a.name(),
            Agent::Table(a) => a.name(),
        }
    }

    pub fn as_fsm(&self) -> Option<&FsmAgent> {
        match self {
            Agent::Fsm(a) => Some(a),
            Agent::Table(_) => None,
        }
    }

    pub fn table_horizon(&self) -> Option<usize> {
        match self {
            Agent::Fsm(_) => None,
            Agent::Table(a) => Some(a.horizon()),
        }
    }

    /// The induced action distribution at a history.
    pub fn act(&self, h: &History) -> ActionDistribution {
        match self {
            Agent::Fsm(a) => a.output(a.state_after(h)).clone(),
            Agent::Table(a) => a.act(h).clone(),
        }
    }
}

impl From<FsmAgent> for Agent {
    fn from(a: FsmAgent) -> Agent {
        Agent::Fsm(a)
    }
}

impl From<TableAgent> for Agent {
    fn from(a: TableAgent) -> Agent {
        Agent::Table(a)
    }
}

/// λ(h) with an interface guard: every symbol of `h` must be in range for the
/// agent's interface.
pub fn run_agent(agent: &Agent, h: &History) -> Result<ActionDistribution> {
    let ifc = agent.interface();
    for (pos, (a, o)) in h.pairs().iter().enumerate() {
        if *a as usize >= ifc.num_actions() || *o as usize >= ifc.num_observations() {
            return Err(CoreError::InterfaceMismatch(format!(
                "history symbol ({a},{o}) at position {pos} outside interface \
                 ({} actions, {} observations)",
                ifc.num_actions(),
                ifc.num_observations()
            )));
        }
    }
    Ok(agent.act(h))
}

/// Exact behavioural equality for pure state machines: outputs agree at every
/// joint state reachable under every (action, observation) input.
pub fn fsm_behaviorally_equal(a: &FsmAgent, b: &FsmAgent) -> bool {
    if !a.interface().compatible_with(b.interface()) {
        return false;
    }
    let num_actions = a.interface().num_actions() as u16;
    let num_obs = a.interface().num_observations() as u16;
    let mut seen = std::collections::HashSet::new();
    let mut stack = vec![(a.initial_state(), b.initial_state())];
    seen.insert((a.initial_state(), b.initial_state()));
    while let Some((sa, sb)) = stack.pop() {
        if a.output(sa) != b.output(sb) {
            return false;
        }
        for act in 0..num_actions {
            for obs in 0..num_obs {
                let next = (a.next_state(sa, act, obs), b.next_state(sb, act, obs));
                if seen.insert(next) {
                    stack.push(next);
                }
            }
        }
    }
    true
}

/// Behavioural equality for any two agents. Exact for FSM pairs; if a table
/// agent participates the comparison enumerates all histories up to the
/// larger table horizon and the result is only meaningful to that depth.
pub fn behaviorally_equal(a: &Agent, b: &Agent) -> bool {
    match (a, b) {
        (Agent::Fsm(x), Agent::Fsm(y)) => fsm_behaviorally_equal(x, y),
        _ => {
            if !a.interface().compatible_with(b.interface()) {
                return false;
            }
            let horizon = a
                .table_horizon()
                .into_iter()
                .chain(b.table_horizon())
                .max()
                .unwrap_or(0);
            let ifc = a.interface();
            let mut frontier = vec![History::empty()];
            for depth in 0..=horizon {
                let mut next = Vec::new();
                for h in &frontier {
                    if a.act(h) != b.act(h) {
                        return false;
                    }
                    if depth < horizon {
                        for act in 0..ifc.num_actions() as u16 {
                            for obs in 0..ifc.num_observations() as u16 {
                                next.push(h.extended(act, obs));
                            }
                        }
                    }
                }
                frontier = next;
            }
            true
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn ifc() -> Interface {
        Interface::indexed(2, 2)
    }

    #[test]
    fn constant_agent_ignores_history() {
        let a: Agent = FsmAgent::constant_action(ifc(), 0).unwrap().into();
        let h = History::from_pairs(vec![(1, 1), (0, 1), (1, 0)]);
        assert_eq!(run_agent(&a, &h).unwrap(), ActionDistribution::point_mass(0, 2));
        assert_eq!(
            run_agent(&a, &History::empty()).unwrap(),
            ActionDistribution::point_mass(0, 2)
        );
    }

    #[test]
    fn alternating_agent_tracks_parity() {
        // Outputs a0 at even-length histories, a1 at odd: at |h| = 1 the
        // output is the point mass on a1.
        let parity: Agent = FsmAgent::alternating(
            ifc(),
            ActionDistribution::point_mass(0, 2),
            ActionDistribution::point_mass(1, 2),
        )
        .unwrap()
        .into();
        let h1 = History::from_pairs(vec![(0, 0)]);
        assert_eq!(run_agent(&parity, &h1).unwrap(), ActionDistribution::point_mass(1, 2));
        let h2 = History::from_pairs(vec![(0, 0), (1, 1)]);
        assert_eq!(run_agent(&parity, &h2).unwrap(), ActionDistribution::point_mass(0, 2));
    }

    #[test]
    fn toggling_fsm_matches_hand_unrolled_table() {
        // Two states; observing o1 toggles, o0 keeps. Output in state 0 is a
        // point mass on a0, in state 1 it is (1/3, 2/3). Hand unroll to depth
        // 2: the state after a history equals the parity of o1 observations.
        let toggled = ActionDistribution::new(vec![rat(1, 3), rat(2, 3)]).unwrap();
        let base = ActionDistribution::point_mass(0, 2);
        let step = vec![
            // state 0: (a0,o0)->0 (a0,o1)->1 (a1,o0)->0 (a1,o1)->1
            vec![0, 1, 0, 1],
            // state 1: toggles back on o1
            vec![1, 0, 1, 0],
        ];
        let agent: Agent = FsmAgent::new(ifc(), 0, vec![base.clone(), toggled.clone()], step, "toggle")
            .unwrap()
            .into();

        // Independent oracle: explicit table for all histories of length <= 2.
        let expected = |h: &History| {
            let flips = h.pairs().iter().filter(|(_, o)| *o == 1).count();
            if flips % 2 == 0 {
                base.clone()
            } else {
                toggled.clone()
            }
        };
        let mut all = vec![History::empty()];
        for a in 0..2u16 {
            for o in 0..2u16 {
                all.push(History::from_pairs(vec![(a, o)]));
                for a2 in 0..2u16 {
                    for o2 in 0..2u16 {
                        all.push(History::from_pairs(vec![(a, o), (a2, o2)]));
                    }
                }
            }
        }
        for h in &all {
            assert_eq!(run_agent(&agent, h).unwrap(), expected(h), "mismatch at {h:?}");
        }
        // The named case: h = a1 o1 yields the toggled distribution.
        assert_eq!(
            run_agent(&agent, &History::from_pairs(vec![(1, 1)])).unwrap(),
            toggled
        );
    }

    #[test]
    fn out_of_range_symbol_is_interface_mismatch() {
        let a: Agent = FsmAgent::constant_action(ifc(), 0).unwrap().into();
        let h = History::from_pairs(vec![(5, 0)]);
        assert!(matches!(run_agent(&a, &h), Err(CoreError::InterfaceMismatch(_))));
    }

    #[test]
    fn behavioral_equality_ignores_state_count() {
        let one = FsmAgent::constant_action(ifc(), 1).unwrap();
        // Two-state machine that bounces between states with identical outputs.
        let two = FsmAgent::new(
            ifc(),
            0,
            vec![
                ActionDistribution::point_mass(1, 2),
                ActionDistribution::point_mass(1, 2),
            ],
            vec![vec![1; 4], vec![0; 4]],
            "bouncy",
        )
        .unwrap();
        assert!(fsm_behaviorally_equal(&one, &two));
        let other = FsmAgent::constant_action(ifc(), 0).unwrap();
        assert!(!fsm_behaviorally_equal(&one, &other));
    }

    #[test]
    fn table_agent_from_fn_is_total_and_falls_back() {
        let fallback = ActionDistribution::uniform(2);
        let t = TableAgent::from_fn(
            ifc(),
            2,
            |h| ActionDistribution::point_mass((h.len() % 2) as u16, 2),
            fallback.clone(),
            "tbl",
        )
        .unwrap();
        assert_eq!(t.entries().len(), 1 + 4 + 16);
        let deep = History::from_pairs(vec![(0, 0), (0, 0), (0, 0)]);
        assert_eq!(t.act(&deep), &fallback);
        let a: Agent = t.into();
        let parity: Agent = FsmAgent::alternating(
            ifc(),
            ActionDistribution::point_mass(0, 2),
            ActionDistribution::point_mass(1, 2),
        )
        .unwrap()
        .into();
        // The bounded comparison only looks up to the table horizon, where
        // the two agree, even though they diverge at depth 3.
        assert!(behaviorally_equal(&a, &parity));
        assert_ne!(parity.act(&deep), a.act(&deep));
    }
}
