//! The reaches operator. An agent sometimes reaches a basis when from some
//! realizable history a basis member matches its outputs on every realizable
//! continuation. On pure state machines the "forever after" quantifier has a
//! finite carrier: per basis member, the greatest fixpoint of
//!
//! ```text
//! S = { joint nodes with equal outputs } ∩ { nodes all of whose realizable
//!       successors stay in S }
//! ```
//!
//! computed by stripping violating nodes until stable. Sometimes-reaches holds
//! iff some reachable node lies in the union of these regions; never-reaches
//! is its negation; always-reaches holds iff no realizable cycle avoids the
//! union (with finite branching, every infinite run must otherwise enter it).

use serde::{Deserialize, Serialize};

use crate::agent::{Agent, FsmAgent};
use crate::env::FsmEnvironment;
use crate::error::{CoreError, Result};
use crate::history::History;
use crate::ops::semantics_of;
use crate::product::{determinized_product, DetGraph};
use crate::realizable::{realizable_histories, realizable_suffixes};
use crate::verdict::{Semantics, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReachModality {
    Sometimes,
    Never,
    Always,
}

impl std::str::FromStr for ReachModality {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "sometimes" => Ok(ReachModality::Sometimes),
            "never" => Ok(ReachModality::Never),
            "always" => Ok(ReachModality::Always),
            other => Err(format!("unknown reach modality {other:?}")),
        }
    }
}

/// Greatest fixpoint of `seed ∩ pre(S)` on the determinized graph: the nodes
/// from which every realizable path stays inside `seed` forever.
fn safety_region(graph: &DetGraph, seed: &[bool]) -> Vec<bool> {
    let mut inside = seed.to_vec();
    loop {
        let mut changed = false;
        for n in 0..graph.num_nodes() {
            if inside[n] && graph.edges(n).iter().any(|e| !inside[e.target]) {
                inside[n] = false;
                changed = true;
            }
        }
        if !changed {
            return inside;
        }
    }
}

/// Nodes with an infinite outgoing path confined to `allowed`: repeatedly
/// strip allowed nodes whose allowed successors have all been stripped.
fn can_avoid_forever(graph: &DetGraph, allowed: &[bool]) -> Vec<bool> {
    let mut alive = allowed.to_vec();
    loop {
        let mut changed = false;
        for n in 0..graph.num_nodes() {
            if alive[n] && !graph.edges(n).iter().any(|e| alive[e.target]) {
                alive[n] = false;
                changed = true;
            }
        }
        if !changed {
            return alive;
        }
    }
}

fn least_witness(graph: &DetGraph, flags: &[bool]) -> Option<History> {
    let mut best: Option<History> = None;
    for (n, flag) in flags.iter().enumerate() {
        if *flag {
            let h = graph.witness_history(n);
            match &best {
                Some(cur) if cur.canonical_cmp(&h).is_le() => {}
                _ => best = Some(h),
            }
        }
    }
    best
}

fn exact_reaches(
    agent: &FsmAgent,
    basis: &[&FsmAgent],
    env: &FsmEnvironment,
    modality: ReachModality,
) -> Result<Verdict> {
    let mut participants = vec![agent];
    participants.extend(basis.iter().copied());
    // The determinized product quotients histories exactly: silently
    // branching environments leave several hidden states consistent with one
    // history, and the forever-after quantifier ranges over all of them.
    let graph = determinized_product(&participants, env)?;
    let n = graph.num_nodes();

    // Union over basis members of their forever-agreement regions.
    let mut good = vec![false; n];
    for (i, member) in basis.iter().enumerate() {
        let seed: Vec<bool> = (0..n)
            .map(|idx| {
                let node = graph.node(idx);
                member.output(node.agent_states[i + 1]) == agent.output(node.agent_states[0])
            })
            .collect();
        for (g, s) in good.iter_mut().zip(safety_region(&graph, &seed)) {
            *g = *g || s;
        }
    }

    let verdict = match modality {
        ReachModality::Sometimes => {
            let witness = least_witness(&graph, &good);
            Verdict::exact(witness.is_some(), witness)
        }
        ReachModality::Never => {
            let witness = least_witness(&graph, &good);
            Verdict::exact(witness.is_none(), witness)
        }
        ReachModality::Always => {
            let outside: Vec<bool> = good.iter().map(|g| !g).collect();
            let trapped = can_avoid_forever(&graph, &outside);
            let witness = least_witness(&graph, &trapped);
            Verdict::exact(witness.is_none(), witness)
        }
    };
    Ok(verdict)
}

/// Bounded variant used whenever a table agent participates: candidate
/// prefixes run to the watch horizon and the forever quantifier is truncated
/// at the full horizon. The verdict is an approximation and is tagged as
/// such.
fn bounded_reaches(
    agent: &Agent,
    basis: &[Agent],
    env: &FsmEnvironment,
    modality: ReachModality,
    horizon: usize,
) -> Result<Verdict> {
    let watch = horizon / 2;
    let prefixes = realizable_histories(agent, env, watch)?;
    let agrees_from = |h: &History| -> Result<bool> {
        let suffixes = realizable_suffixes(agent, env, h, horizon)?;
        'member: for member in basis {
            for suffix in &suffixes {
                let full = h.concat(suffix);
                if member.act(&full) != agent.act(&full) {
                    continue 'member;
                }
            }
            return Ok(true);
        }
        Ok(false)
    };
    match modality {
        ReachModality::Sometimes | ReachModality::Never => {
            let mut witness = None;
            for h in &prefixes {
                if agrees_from(h)? {
                    witness = Some(h.clone());
                    break;
                }
            }
            let reached = witness.is_some();
            let holds = match modality {
                ReachModality::Sometimes => reached,
                _ => !reached,
            };
            Ok(Verdict::bounded(holds, horizon, witness))
        }
        ReachModality::Always => {
            // Every realizable watch-length history must sit in an agreement
            // window that lasts to the horizon.
            for h in prefixes.iter().filter(|h| h.len() == watch) {
                if !agrees_from(h)? {
                    return Ok(Verdict::bounded(false, horizon, Some(h.clone())));
                }
            }
            Ok(Verdict::bounded(true, horizon, None))
        }
    }
}

/// Does `agent` reach `basis` in `env` under the given modality?
pub fn check_reaches(
    agent: &Agent,
    basis: &[Agent],
    env: &FsmEnvironment,
    modality: ReachModality,
) -> Result<Verdict> {
    if basis.is_empty() {
        return Err(CoreError::EmptyBasis);
    }
    let semantics = semantics_of(std::iter::once(agent).chain(basis));
    match semantics {
        Semantics::Exact => {
            let basis_fsm: Vec<&FsmAgent> =
                basis.iter().map(|b| b.as_fsm().expect("exact semantics")).collect();
            exact_reaches(agent.as_fsm().expect("exact semantics"), &basis_fsm, env, modality)
        }
        Semantics::Bounded { horizon } => bounded_reaches(agent, basis, env, modality, horizon),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::ActionDistribution;
    use crate::env::bandit_environment;
    use crate::interface::Interface;
    use crate::rational::rat;

    fn ifc3() -> Interface {
        Interface::indexed(3, 1)
    }

    fn ifc2() -> Interface {
        Interface::indexed(2, 2)
    }

    fn trivial_env(interface: Interface) -> FsmEnvironment {
        let num_actions = interface.num_actions();
        bandit_environment(
            interface.clone(),
            vec![vec![(0, rat(1, 1))]; num_actions],
            vec![vec![rat(0, 1); interface.num_observations()]; num_actions],
            "sink",
        )
        .unwrap()
    }

    fn coin_env() -> FsmEnvironment {
        bandit_environment(
            ifc2(),
            vec![
                vec![(0, rat(1, 2)), (1, rat(1, 2))],
                vec![(0, rat(1, 2)), (1, rat(1, 2))],
            ],
            vec![vec![rat(0, 1); 2]; 2],
            "coin",
        )
        .unwrap()
    }

    fn const3(a: u16) -> Agent {
        FsmAgent::constant_action(ifc3(), a).unwrap().into()
    }

    #[test]
    fn member_always_reaches_its_own_set() {
        let basis = vec![const3(0), const3(2)];
        let env = trivial_env(ifc3());
        for member in &basis {
            let always = check_reaches(member, &basis, &env, ReachModality::Always).unwrap();
            assert!(always.holds);
            let sometimes = check_reaches(member, &basis, &env, ReachModality::Sometimes).unwrap();
            assert!(sometimes.holds);
            assert_eq!(sometimes.witness, Some(History::empty()));
        }
    }

    #[test]
    fn disjoint_action_support_never_reaches() {
        // Agents over {a0, a2} never reach the singleton that always plays
        // a1, and conversely: the three-action transitivity violation.
        let env = trivial_env(ifc3());
        let lambda1 = vec![const3(0), const3(2)];
        let lambda2 = vec![const3(1)];
        for agent in &lambda1 {
            assert!(check_reaches(agent, &lambda2, &env, ReachModality::Never).unwrap().holds);
        }
        assert!(check_reaches(&lambda2[0], &lambda1, &env, ReachModality::Never)
            .unwrap()
            .holds);
        // Yet each member of the first set always reaches the first set.
        for agent in &lambda1 {
            assert!(check_reaches(agent, &lambda1, &env, ReachModality::Always).unwrap().holds);
        }
    }

    #[test]
    fn sometimes_and_never_complement() {
        let env = coin_env();
        let a: Agent = FsmAgent::constant_action(ifc2(), 1).unwrap().into();
        let basis = vec![Agent::from(FsmAgent::constant_action(ifc2(), 0).unwrap())];
        let s = check_reaches(&a, &basis, &env, ReachModality::Sometimes).unwrap();
        let n = check_reaches(&a, &basis, &env, ReachModality::Never).unwrap();
        assert!(s.holds != n.holds);
        assert!(n.holds, "constant-a1 never reaches the constant-a0 singleton");
    }

    #[test]
    fn eventually_agreeing_agent_sometimes_but_not_always_reaches() {
        // Plays a1 until it first observes o1, then a0 forever. Against the
        // constant-a0 basis in the coin environment it sometimes (indeed
        // almost surely) reaches, but the all-o0 run avoids agreement
        // forever, so always-reaches fails.
        let switcher = FsmAgent::new(
            ifc2(),
            0,
            vec![
                ActionDistribution::point_mass(1, 2),
                ActionDistribution::point_mass(0, 2),
            ],
            vec![vec![0, 1, 0, 1], vec![1, 1, 1, 1]],
            "switch-on-o1",
        )
        .unwrap();
        let agent: Agent = switcher.into();
        let basis = vec![Agent::from(FsmAgent::constant_action(ifc2(), 0).unwrap())];
        let env = coin_env();
        let s = check_reaches(&agent, &basis, &env, ReachModality::Sometimes).unwrap();
        assert!(s.holds);
        assert_eq!(s.witness, Some(History::from_pairs(vec![(1, 1)])));
        let a = check_reaches(&agent, &basis, &env, ReachModality::Always).unwrap();
        assert!(!a.holds);
        assert!(a.witness.is_some());
    }

    #[test]
    fn hidden_branching_defeats_naive_state_products() {
        // From the start the environment silently branches into a safe state
        // (only o0 forever) or a risky one (o1 possible forever), both
        // emitting o0. Every all-o0 history stays consistent with the risky
        // state, so the switch-on-o1 agent has no history from which it
        // agrees with the constant forever, even though the (agent, safe)
        // pair would agree along its own futures.
        let ifc = ifc2();
        let out = |s: usize, o: u16, num: i64, den: i64| crate::env::Outcome {
            next_state: s,
            observation: o,
            prob: rat(num, den),
        };
        let env = FsmEnvironment::new(
            ifc.clone(),
            0,
            vec![
                // s0: silent branch into safe (1) or risky (2)
                vec![
                    vec![out(1, 0, 1, 2), out(2, 0, 1, 2)],
                    vec![out(1, 0, 1, 2), out(2, 0, 1, 2)],
                ],
                // s1 (safe): only o0
                vec![vec![out(1, 0, 1, 1)], vec![out(1, 0, 1, 1)]],
                // s2 (risky): o0 or o1
                vec![
                    vec![out(2, 0, 1, 2), out(2, 1, 1, 2)],
                    vec![out(2, 0, 1, 2), out(2, 1, 1, 2)],
                ],
            ],
            vec![vec![rat(0, 1); 2]; 2],
            "silent-branch",
        )
        .unwrap();
        let switcher: Agent = FsmAgent::new(
            ifc.clone(),
            0,
            vec![
                ActionDistribution::point_mass(0, 2),
                ActionDistribution::point_mass(1, 2),
            ],
            vec![vec![0, 1, 0, 1], vec![1, 1, 1, 1]],
            "switch-on-o1",
        )
        .unwrap()
        .into();
        let basis = vec![Agent::from(FsmAgent::constant_action(ifc, 0).unwrap())];
        let v = check_reaches(&switcher, &basis, &env, ReachModality::Sometimes).unwrap();
        assert!(!v.holds, "the risky state haunts every all-o0 history");
        assert!(check_reaches(&switcher, &basis, &env, ReachModality::Never).unwrap().holds);
    }

    #[test]
    fn bounded_semantics_kick_in_with_table_agents() {
        let table = crate::agent::TableAgent::from_fn(
            ifc2(),
            4,
            |_| ActionDistribution::point_mass(0, 2),
            ActionDistribution::point_mass(0, 2),
            "tbl",
        )
        .unwrap();
        let agent: Agent = table.into();
        let basis = vec![Agent::from(FsmAgent::constant_action(ifc2(), 0).unwrap())];
        let v = check_reaches(&agent, &basis, &coin_env(), ReachModality::Sometimes).unwrap();
        assert!(v.holds);
        assert_eq!(v.semantics, Semantics::Bounded { horizon: 4 });
    }
}
