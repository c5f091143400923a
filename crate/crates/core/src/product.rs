//! Reachable joint-state graphs. Every operator decision in this workspace is
//! a question about one of two graphs:
//!
//! * the *realizable* product of an acting agent, passive tracker agents, and
//!   an environment, whose edges are exactly the (action, observation) steps
//!   with positive probability; or
//! * the *free* product of a set of agents driven by every (action,
//!   observation) pair, used by the uniform (environment-independent)
//!   operators.
//!
//! Nodes are discovered breadth-first with edges expanded in (action,
//! observation) order, so the recorded first-visit path to a node is the
//! canonically least shortest history reaching it.

use std::collections::HashMap;

use crate::agent::FsmAgent;
use crate::env::FsmEnvironment;
use crate::error::{CoreError, Result};
use crate::history::History;
use crate::interface::Interface;
use crate::rational::Rational;

/// A joint state: one machine state per participating agent, plus the
/// environment state (0 for free products).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProductNode {
    pub agent_states: Vec<usize>,
    pub env_state: usize,
}

#[derive(Clone, Debug)]
pub struct ProductEdge {
    pub action: u16,
    pub observation: u16,
    pub target: usize,
    /// Probability of this step; exactly 1 for free products.
    pub prob: Rational,
}

#[derive(Clone, Debug)]
pub struct ProductGraph {
    interface: Interface,
    nodes: Vec<ProductNode>,
    edges: Vec<Vec<ProductEdge>>,
    /// (parent node, action, observation) recorded at first visit; None for
    /// the initial node.
    parent: Vec<Option<(usize, u16, u16)>>,
}

impl ProductGraph {
    pub fn interface(&self) -> &Interface {
        &self.interface
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, idx: usize) -> &ProductNode {
        &self.nodes[idx]
    }

    pub fn nodes(&self) -> &[ProductNode] {
        &self.nodes
    }

    pub fn edges(&self, node: usize) -> &[ProductEdge] {
        &self.edges[node]
    }

    pub const INITIAL: usize = 0;

    /// The canonically least shortest history from the initial node.
    pub fn witness_history(&self, node: usize) -> History {
        let mut rev = Vec::new();
        let mut cur = node;
        while let Some((p, a, o)) = self.parent[cur] {
            rev.push((a, o));
            cur = p;
        }
        rev.reverse();
        History::from_pairs(rev)
    }

    /// BFS depth of each node from the initial node.
    pub fn depths(&self) -> Vec<usize> {
        let mut d = vec![usize::MAX; self.nodes.len()];
        d[Self::INITIAL] = 0;
        let mut queue = std::collections::VecDeque::from([Self::INITIAL]);
        while let Some(n) = queue.pop_front() {
            for e in &self.edges[n] {
                if d[e.target] == usize::MAX {
                    d[e.target] = d[n] + 1;
                    queue.push_back(e.target);
                }
            }
        }
        d
    }

    /// Node reached by walking a history from the initial node, if every step
    /// exists in the graph. On failure returns the position of the first
    /// missing step.
    pub fn walk(&self, h: &History) -> std::result::Result<usize, usize> {
        let mut cur = Self::INITIAL;
        for (pos, (a, o)) in h.pairs().iter().enumerate() {
            match self.edges[cur].iter().find(|e| e.action == *a && e.observation == *o) {
                Some(e) => cur = e.target,
                None => return Err(pos),
            }
        }
        Ok(cur)
    }
}

fn check_shared_interface(agents: &[&FsmAgent], interface: &Interface) -> Result<()> {
    for a in agents {
        if !a.interface().compatible_with(interface) {
            return Err(CoreError::InterfaceMismatch(format!(
                "agent {:?} does not share the reference interface",
                a.name()
            )));
        }
    }
    Ok(())
}

/// Reachable joint graph of `participants` against `env`. The first
/// participant is the actor: an (action, observation) edge exists iff the
/// actor gives the action positive probability and the environment emits the
/// observation with positive probability. Remaining participants are passive
/// trackers stepped along the same stream.
pub fn product_reachable(
    participants: &[&FsmAgent],
    env: &FsmEnvironment,
) -> Result<ProductGraph> {
    let Some(actor) = participants.first() else {
        return Err(CoreError::EmptyParticipants);
    };
    check_shared_interface(participants, env.interface())?;
    let _ = actor;
    let interface = env.interface().clone();
    let num_actions = interface.num_actions() as u16;

    let initial = ProductNode {
        agent_states: participants.iter().map(|a| a.initial_state()).collect(),
        env_state: env.initial_state(),
    };
    let mut index: HashMap<ProductNode, usize> = HashMap::new();
    index.insert(initial.clone(), 0);
    let mut nodes = vec![initial];
    let mut edges: Vec<Vec<ProductEdge>> = Vec::new();
    let mut parent = vec![None];
    let mut cursor = 0;
    while cursor < nodes.len() {
        let node = nodes[cursor].clone();
        let actor_out = participants[0].output(node.agent_states[0]).clone();
        let mut out_edges = Vec::new();
        for action in 0..num_actions {
            let p_action = actor_out.prob(action).clone();
            if !p_action.is_positive() {
                continue;
            }
            // Environment outcomes aggregate over hidden successor states per
            // observation only for the probability; the joint target keeps
            // each successor distinct.
            let mut outs: Vec<&crate::env::Outcome> =
                env.outcomes(node.env_state, action).iter().collect();
            outs.sort_by_key(|o| (o.observation, o.next_state));
            for out in outs {
                let target = ProductNode {
                    agent_states: node
                        .agent_states
                        .iter()
                        .zip(participants)
                        .map(|(s, a)| a.next_state(*s, action, out.observation))
                        .collect(),
                    env_state: out.next_state,
                };
                let target_idx = match index.get(&target) {
                    Some(i) => *i,
                    None => {
                        let i = nodes.len();
                        index.insert(target.clone(), i);
                        nodes.push(target);
                        edges.push(Vec::new()); // placeholder, filled when visited
                        parent.push(Some((cursor, action, out.observation)));
                        i
                    }
                };
                out_edges.push(ProductEdge {
                    action,
                    observation: out.observation,
                    target: target_idx,
                    prob: &p_action * &out.prob,
                });
            }
        }
        if cursor >= edges.len() {
            edges.push(out_edges);
        } else {
            edges[cursor] = out_edges;
        }
        cursor += 1;
    }
    Ok(ProductGraph { interface, nodes, edges, parent })
}

/// A determinized joint node: agent machine states plus the *set* of
/// environment states consistent with the history. Environments may branch
/// silently (same observation, different hidden successor), so a single
/// history can be consistent with several environment states; quantifiers
/// over a history's future must range over all of them.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DetNode {
    pub agent_states: Vec<usize>,
    /// Sorted, deduplicated.
    pub env_states: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct DetEdge {
    pub action: u16,
    pub observation: u16,
    pub target: usize,
}

/// Deterministic history-quotient graph: every realizable history maps to
/// exactly one node, and two histories at the same node have identical
/// realizable futures and agent outputs.
#[derive(Clone, Debug)]
pub struct DetGraph {
    nodes: Vec<DetNode>,
    edges: Vec<Vec<DetEdge>>,
    parent: Vec<Option<(usize, u16, u16)>>,
}

impl DetGraph {
    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, idx: usize) -> &DetNode {
        &self.nodes[idx]
    }

    pub fn edges(&self, node: usize) -> &[DetEdge] {
        &self.edges[node]
    }

    pub fn witness_history(&self, node: usize) -> History {
        let mut rev = Vec::new();
        let mut cur = node;
        while let Some((p, a, o)) = self.parent[cur] {
            rev.push((a, o));
            cur = p;
        }
        rev.reverse();
        History::from_pairs(rev)
    }
}

/// Subset-construction product of `participants` against `env`: the first
/// participant acts, the rest track. Edge (a, o) exists iff the actor gives
/// `a` positive probability and some consistent environment state can emit
/// `o`; the target aggregates every consistent successor.
pub fn determinized_product(
    participants: &[&FsmAgent],
    env: &FsmEnvironment,
) -> Result<DetGraph> {
    if participants.is_empty() {
        return Err(CoreError::EmptyParticipants);
    }
    check_shared_interface(participants, env.interface())?;
    let num_actions = env.interface().num_actions() as u16;
    let num_obs = env.interface().num_observations() as u16;
    let initial = DetNode {
        agent_states: participants.iter().map(|a| a.initial_state()).collect(),
        env_states: vec![env.initial_state()],
    };
    let mut index: HashMap<DetNode, usize> = HashMap::new();
    index.insert(initial.clone(), 0);
    let mut nodes = vec![initial];
    let mut edges: Vec<Vec<DetEdge>> = Vec::new();
    let mut parent = vec![None];
    let mut cursor = 0;
    while cursor < nodes.len() {
        let node = nodes[cursor].clone();
        let actor_out = participants[0].output(node.agent_states[0]).clone();
        let mut out_edges = Vec::new();
        for action in 0..num_actions {
            if !actor_out.prob(action).is_positive() {
                continue;
            }
            for observation in 0..num_obs {
                let mut env_targets: Vec<usize> = node
                    .env_states
                    .iter()
                    .flat_map(|s| env.consistent_successors(*s, action, observation))
                    .collect();
                env_targets.sort_unstable();
                env_targets.dedup();
                if env_targets.is_empty() {
                    continue;
                }
                let target = DetNode {
                    agent_states: node
                        .agent_states
                        .iter()
                        .zip(participants)
                        .map(|(s, a)| a.next_state(*s, action, observation))
                        .collect(),
                    env_states: env_targets,
                };
                let target_idx = match index.get(&target) {
                    Some(i) => *i,
                    None => {
                        let i = nodes.len();
                        index.insert(target.clone(), i);
                        nodes.push(target);
                        edges.push(Vec::new());
                        parent.push(Some((cursor, action, observation)));
                        i
                    }
                };
                out_edges.push(DetEdge { action, observation, target: target_idx });
            }
        }
        if cursor >= edges.len() {
            edges.push(out_edges);
        } else {
            edges[cursor] = out_edges;
        }
        cursor += 1;
    }
    Ok(DetGraph { nodes, edges, parent })
}

/// Joint graph of `agents` closed under *every* (action, observation) input,
/// with no environment and no realizability gating. Carrier of the uniform
/// operators, which quantify over all histories.
pub fn free_product(agents: &[&FsmAgent]) -> Result<ProductGraph> {
    let Some(first) = agents.first() else {
        return Err(CoreError::EmptyParticipants);
    };
    let interface = first.interface().clone();
    check_shared_interface(agents, &interface)?;
    let num_actions = interface.num_actions() as u16;
    let num_obs = interface.num_observations() as u16;

    let initial = ProductNode {
        agent_states: agents.iter().map(|a| a.initial_state()).collect(),
        env_state: 0,
    };
    let mut index: HashMap<ProductNode, usize> = HashMap::new();
    index.insert(initial.clone(), 0);
    let mut nodes = vec![initial];
    let mut edges: Vec<Vec<ProductEdge>> = Vec::new();
    let mut parent = vec![None];
    let mut cursor = 0;
    while cursor < nodes.len() {
        let node = nodes[cursor].clone();
        let mut out_edges = Vec::new();
        for action in 0..num_actions {
            for observation in 0..num_obs {
                let target = ProductNode {
                    agent_states: node
                        .agent_states
                        .iter()
                        .zip(agents)
                        .map(|(s, a)| a.next_state(*s, action, observation))
                        .collect(),
                    env_state: 0,
                };
                let target_idx = match index.get(&target) {
                    Some(i) => *i,
                    None => {
                        let i = nodes.len();
                        index.insert(target.clone(), i);
                        nodes.push(target);
                        edges.push(Vec::new());
                        parent.push(Some((cursor, action, observation)));
                        i
                    }
                };
                out_edges.push(ProductEdge {
                    action,
                    observation,
                    target: target_idx,
                    prob: Rational::one(),
                });
            }
        }
        if cursor >= edges.len() {
            edges.push(out_edges);
        } else {
            edges[cursor] = out_edges;
        }
        cursor += 1;
    }
    Ok(ProductGraph { interface, nodes, edges, parent })
}
