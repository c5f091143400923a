//! Enumeration of the histories an (agent, environment) pair can produce
//! with positive probability, in canonical order (length-major, then
//! lexicographic by action/observation index).

use crate::agent::Agent;
use crate::env::FsmEnvironment;
use crate::error::{CoreError, Result};
use crate::history::History;

fn check_interfaces(agent: &Agent, env: &FsmEnvironment) -> Result<()> {
    if !agent.interface().compatible_with(env.interface()) {
        return Err(CoreError::InterfaceMismatch(format!(
            "agent {:?} and environment {:?} have different interfaces",
            agent.name(),
            env.name()
        )));
    }
    Ok(())
}

/// One exploration state: the history so far plus the environment state it
/// leads to. Environment states consistent with the same labelled history can
/// differ (hidden branching), so a history may appear with several states;
/// the history list is deduplicated.
struct Frontier {
    history: History,
    env_states: Vec<usize>,
}

fn expand(agent: &Agent, env: &FsmEnvironment, frontier: &[Frontier]) -> Vec<Frontier> {
    let mut next: Vec<Frontier> = Vec::new();
    for f in frontier {
        let out = agent.act(&f.history);
        for action in out.support() {
            // Aggregate successor env states per observation across all
            // current consistent env states.
            let mut per_obs: std::collections::BTreeMap<u16, Vec<usize>> = Default::default();
            for &s in &f.env_states {
                for o in env.outcomes(s, action) {
                    per_obs.entry(o.observation).or_default().push(o.next_state);
                }
            }
            for (obs, mut states) in per_obs {
                states.sort_unstable();
                states.dedup();
                next.push(Frontier { history: f.history.extended(action, obs), env_states: states });
            }
        }
    }
    next.sort_by(|a, b| a.history.canonical_cmp(&b.history));
    next
}

/// Exactly the histories of length <= `horizon` realizable by the pair, in
/// canonical order. The empty history is always realizable.
pub fn realizable_histories(
    agent: &Agent,
    env: &FsmEnvironment,
    horizon: usize,
) -> Result<Vec<History>> {
    check_interfaces(agent, env)?;
    let mut out = Vec::new();
    let mut frontier = vec![Frontier {
        history: History::empty(),
        env_states: vec![env.initial_state()],
    }];
    for depth in 0..=horizon {
        out.extend(frontier.iter().map(|f| f.history.clone()));
        if depth < horizon {
            frontier = expand(agent, env, &frontier);
        }
    }
    Ok(out)
}

/// Walks `prefix` through the pair, verifying every step has positive
/// probability. Returns the set of environment states consistent with it.
fn walk_prefix(agent: &Agent, env: &FsmEnvironment, prefix: &History) -> Result<Vec<usize>> {
    let mut env_states = vec![env.initial_state()];
    let mut sofar = History::empty();
    for (pos, (a, o)) in prefix.pairs().iter().enumerate() {
        let out = agent.act(&sofar);
        let step_fails = |position| CoreError::UnrealizablePrefix {
            prefix: prefix.clone(),
            position,
        };
        if *a as usize >= agent.interface().num_actions() || !out.prob(*a).is_positive() {
            return Err(step_fails(pos));
        }
        let mut next = Vec::new();
        for &s in &env_states {
            for outc in env.outcomes(s, *a) {
                if outc.observation == *o {
                    next.push(outc.next_state);
                }
            }
        }
        next.sort_unstable();
        next.dedup();
        if next.is_empty() {
            return Err(step_fails(pos));
        }
        env_states = next;
        sofar.push(*a, *o);
    }
    Ok(env_states)
}

/// All suffixes h' with |prefix · h'| <= `horizon` such that prefix · h' is
/// realizable. The empty suffix is always included. The prefix itself must be
/// realizable, otherwise the error carries the first failing step.
pub fn realizable_suffixes(
    agent: &Agent,
    env: &FsmEnvironment,
    prefix: &History,
    horizon: usize,
) -> Result<Vec<History>> {
    check_interfaces(agent, env)?;
    let env_states = walk_prefix(agent, env, prefix)?;
    let mut out = Vec::new();
    let mut frontier = vec![Frontier { history: prefix.clone(), env_states }];
    let mut depth = prefix.len();
    loop {
        out.extend(
            frontier
                .iter()
                .map(|f| History::from_pairs(f.history.pairs()[prefix.len()..].to_vec())),
        );
        if depth >= horizon {
            break;
        }
        frontier = expand(agent, env, &frontier);
        depth += 1;
        if frontier.is_empty() {
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::FsmAgent;
    use crate::dist::ActionDistribution;
    use crate::env::bandit_environment;
    use crate::interface::Interface;
    use crate::rational::rat;

    fn ifc() -> Interface {
        Interface::indexed(2, 2)
    }

    fn det_env() -> FsmEnvironment {
        bandit_environment(
            ifc(),
            vec![vec![(0, rat(1, 1))], vec![(1, rat(1, 1))]],
            vec![vec![rat(0, 1); 2]; 2],
            "det",
        )
        .unwrap()
    }

    fn coin_env() -> FsmEnvironment {
        bandit_environment(
            ifc(),
            vec![
                vec![(0, rat(1, 2)), (1, rat(1, 2))],
                vec![(0, rat(1, 2)), (1, rat(1, 2))],
            ],
            vec![vec![rat(0, 1); 2]; 2],
            "coin",
        )
        .unwrap()
    }

    #[test]
    fn deterministic_pair_is_a_single_chain() {
        let agent: Agent = FsmAgent::constant_action(ifc(), 0).unwrap().into();
        let hs = realizable_histories(&agent, &det_env(), 2).unwrap();
        assert_eq!(
            hs,
            vec![
                History::empty(),
                History::from_pairs(vec![(0, 0)]),
                History::from_pairs(vec![(0, 0), (0, 0)]),
            ]
        );
    }

    #[test]
    fn support_exclusion() {
        let agent: Agent = FsmAgent::constant(
            ifc(),
            ActionDistribution::new(vec![rat(1, 1), rat(0, 1)]).unwrap(),
        )
        .unwrap()
        .into();
        let hs = realizable_histories(&agent, &coin_env(), 3).unwrap();
        assert!(!hs.is_empty());
        for h in &hs {
            assert!(h.pairs().iter().all(|(a, _)| *a == 0));
        }
    }

    #[test]
    fn uniform_times_coin_spans_all_pairs() {
        // Enumerating the four (action, observation) pairs by hand gives h0
        // plus 4 length-1 histories.
        let agent: Agent = FsmAgent::constant(ifc(), ActionDistribution::uniform(2))
            .unwrap()
            .into();
        let hs = realizable_histories(&agent, &coin_env(), 1).unwrap();
        assert_eq!(hs.len(), 5);
        assert_eq!(hs[0], History::empty());
        let level1: Vec<_> = (0..2u16)
            .flat_map(|a| (0..2u16).map(move |o| History::from_pairs(vec![(a, o)])))
            .collect();
        assert_eq!(&hs[1..], &level1[..]);
    }

    #[test]
    fn prefix_closure() {
        let agent: Agent = FsmAgent::constant(ifc(), ActionDistribution::uniform(2))
            .unwrap()
            .into();
        let hs = realizable_histories(&agent, &coin_env(), 3).unwrap();
        let set: std::collections::HashSet<_> = hs.iter().cloned().collect();
        for h in &hs {
            for len in 0..h.len() {
                assert!(set.contains(&h.prefix(len)));
            }
        }
    }

    #[test]
    fn empty_prefix_suffixes_equal_realizable_histories() {
        let agent: Agent = FsmAgent::constant(ifc(), ActionDistribution::uniform(2))
            .unwrap()
            .into();
        let env = coin_env();
        assert_eq!(
            realizable_suffixes(&agent, &env, &History::empty(), 2).unwrap(),
            realizable_histories(&agent, &env, 2).unwrap()
        );
    }

    #[test]
    fn deterministic_suffix_window_of_one() {
        let agent: Agent = FsmAgent::constant_action(ifc(), 0).unwrap().into();
        let env = det_env();
        let h = History::from_pairs(vec![(0, 0)]);
        let sufs = realizable_suffixes(&agent, &env, &h, 2).unwrap();
        assert_eq!(
            sufs,
            vec![History::empty(), History::from_pairs(vec![(0, 0)])]
        );
    }

    #[test]
    fn suffixes_match_filtered_full_enumeration() {
        // Definition-level cross-check: suffixes of h are exactly the
        // realizable histories extending h, with the prefix stripped.
        let agent: Agent = FsmAgent::constant(ifc(), ActionDistribution::uniform(2))
            .unwrap()
            .into();
        let env = coin_env();
        let t = 3;
        let h = History::from_pairs(vec![(1, 0)]);
        let sufs = realizable_suffixes(&agent, &env, &h, t).unwrap();
        let filtered: Vec<History> = realizable_histories(&agent, &env, t)
            .unwrap()
            .into_iter()
            .filter(|full| h.is_prefix_of(full))
            .map(|full| History::from_pairs(full.pairs()[h.len()..].to_vec()))
            .collect();
        assert_eq!(sufs, filtered);
    }

    #[test]
    fn unrealizable_prefix_reports_first_bad_step() {
        let agent: Agent = FsmAgent::constant_action(ifc(), 0).unwrap().into();
        let env = det_env();
        // Action a1 has zero probability under the constant-a0 agent.
        let h = History::from_pairs(vec![(0, 0), (1, 1)]);
        match realizable_suffixes(&agent, &env, &h, 4) {
            Err(CoreError::UnrealizablePrefix { position, .. }) => assert_eq!(position, 1),
            other => panic!("expected unrealizable-prefix error, got {other:?}"),
        }
    }
}
