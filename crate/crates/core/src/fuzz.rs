//! Seeded random-instance generation, definition-level oracles, and the
//! operator-law property suite. The oracles decide each operator by direct
//! enumeration of histories — no product graphs, no fixpoints — so they can
//! cross-check the exact deciders on small instances.

use rand::prelude::IndexedRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::agent::{behaviorally_equal, Agent, FsmAgent, TableAgent};
use crate::dist::ActionDistribution;
use crate::env::{FsmEnvironment, Outcome};
use crate::error::Result;
use crate::history::History;
use crate::interface::Interface;
use crate::ops::{
    check_generates, check_reaches, check_sigma_generates, check_uniform_generates,
    LearningRuleFsm, ReachModality,
};
use crate::product::product_reachable;
use crate::rational::{rat, Rational};

pub struct InstanceGen {
    rng: ChaCha8Rng,
}

impl InstanceGen {
    pub fn new(seed: u64) -> Self {
        InstanceGen { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn interface(&mut self) -> Interface {
        let num_obs = *[1usize, 2].choose(&mut self.rng).unwrap();
        Interface::indexed(2, num_obs)
    }

    fn distribution(&mut self) -> ActionDistribution {
        // Mostly point masses so pointwise agreement between independent
        // agents is actually possible; the occasional uniform keeps the
        // stochastic case exercised.
        match self.rng.random_range(0..5u8) {
            0 => ActionDistribution::uniform(2),
            1 | 2 => ActionDistribution::point_mass(0, 2),
            _ => ActionDistribution::point_mass(1, 2),
        }
    }

    pub fn agent(&mut self, interface: &Interface) -> Agent {
        let states = self.rng.random_range(1..=2usize);
        let width = interface.num_actions() * interface.num_observations();
        let outputs = (0..states).map(|_| self.distribution()).collect();
        let step = (0..states)
            .map(|_| (0..width).map(|_| self.rng.random_range(0..states)).collect())
            .collect();
        Agent::Fsm(
            FsmAgent::new(interface.clone(), 0, outputs, step, "fuzz").expect("valid machine"),
        )
    }

    pub fn agent_set(&mut self, interface: &Interface, max_size: usize) -> Vec<Agent> {
        // A quarter of the sets are the two point-mass constants: full
        // coverage of deterministic outputs, so generation premises fire
        // often enough to make the transitivity laws non-vacuous.
        if max_size >= 2 && self.rng.random_range(0..4u8) == 0 {
            return vec![
                Agent::Fsm(FsmAgent::constant_action(interface.clone(), 0).unwrap()),
                Agent::Fsm(FsmAgent::constant_action(interface.clone(), 1).unwrap()),
            ];
        }
        let size = self.rng.random_range(1..=max_size);
        (0..size).map(|_| self.agent(interface)).collect()
    }

    pub fn environment(&mut self, interface: &Interface) -> FsmEnvironment {
        let states = self.rng.random_range(1..=2usize);
        let num_obs = interface.num_observations() as u16;
        let mut dynamics = Vec::with_capacity(states);
        for _ in 0..states {
            let mut per_action = Vec::with_capacity(interface.num_actions());
            for _ in 0..interface.num_actions() {
                let max_branches = (states * num_obs as usize).min(2);
                let branches = self.rng.random_range(1..=max_branches);
                let mut outcomes = Vec::new();
                let mut used: Vec<(usize, u16)> = Vec::new();
                let prob = rat(1, branches as i64);
                while outcomes.len() < branches {
                    let key = (
                        self.rng.random_range(0..states),
                        self.rng.random_range(0..num_obs),
                    );
                    if used.contains(&key) {
                        continue;
                    }
                    used.push(key);
                    outcomes.push(Outcome {
                        next_state: key.0,
                        observation: key.1,
                        prob: prob.clone(),
                    });
                }
                per_action.push(outcomes);
            }
            dynamics.push(per_action);
        }
        let reward = (0..interface.num_actions())
            .map(|_| {
                (0..num_obs)
                    .map(|_| rat(self.rng.random_range(-1..=1i64), 1))
                    .collect()
            })
            .collect();
        FsmEnvironment::new(interface.clone(), 0, dynamics, reward, "fuzz-env")
            .expect("valid environment")
    }
}

/// Definition-level enumeration of realizable histories: a history is kept
/// when the acting agent gives each action positive probability and some
/// hidden environment state path emits each observation.
pub fn oracle_realizable_histories(
    agent: &Agent,
    env: &FsmEnvironment,
    depth: usize,
) -> Vec<History> {
    fn visit(
        agent: &Agent,
        env: &FsmEnvironment,
        h: &History,
        states: &[usize],
        depth: usize,
        out: &mut Vec<History>,
    ) {
        out.push(h.clone());
        if h.len() == depth {
            return;
        }
        let dist = agent.act(h);
        for action in dist.support() {
            for obs in 0..env.interface().num_observations() as u16 {
                let mut next: Vec<usize> = states
                    .iter()
                    .flat_map(|s| env.consistent_successors(*s, action, obs))
                    .collect();
                next.sort_unstable();
                next.dedup();
                if !next.is_empty() {
                    visit(agent, env, &h.extended(action, obs), &next, depth, out);
                }
            }
        }
    }
    let mut out = Vec::new();
    visit(agent, env, &History::empty(), &[env.initial_state()], depth, &mut out);
    out.sort_by(|a, b| a.canonical_cmp(b));
    out
}

fn all_histories_to(interface: &Interface, depth: usize) -> Vec<History> {
    crate::ops::all_histories(interface, depth)
}

/// Brute-force generates: at every enumerated history of every target, some
/// basis member matches.
pub fn oracle_generates(
    basis: &[Agent],
    targets: &[Agent],
    env: &FsmEnvironment,
    depth: usize,
) -> bool {
    targets.iter().all(|t| {
        oracle_realizable_histories(t, env, depth)
            .iter()
            .all(|h| basis.iter().any(|b| b.act(h) == t.act(h)))
    })
}

pub fn oracle_uniform_generates(basis: &[Agent], targets: &[Agent], depth: usize) -> bool {
    targets.iter().all(|t| {
        all_histories_to(t.interface(), depth)
            .iter()
            .all(|h| basis.iter().any(|b| b.act(h) == t.act(h)))
    })
}

/// Brute-force sometimes-reaches on the depth-bounded realizable tree:
/// some history no longer than `watch` from which some member matches on
/// every realizable continuation out to `depth`.
pub fn oracle_sometimes_reaches(
    agent: &Agent,
    basis: &[Agent],
    env: &FsmEnvironment,
    depth: usize,
    watch: usize,
) -> bool {
    let histories = oracle_realizable_histories(agent, env, depth);
    histories
        .iter()
        .filter(|h| h.len() <= watch)
        .any(|h| {
            basis.iter().any(|b| {
                histories
                    .iter()
                    .filter(|full| h.is_prefix_of(full))
                    .all(|full| b.act(full) == agent.act(full))
            })
        })
}

/// Outcome of one law-fuzzing run.
#[derive(Debug, Default)]
pub struct LawFuzzReport {
    pub instances: usize,
    pub violations: Vec<String>,
    /// How often each law's premise fired: (label, count).
    pub premise_counts: Vec<(&'static str, usize)>,
    pub oracle_checked: usize,
    pub oracle_mismatches: Vec<String>,
}

impl LawFuzzReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty() && self.oracle_mismatches.is_empty()
    }
}

fn count(counts: &mut Vec<(&'static str, usize)>, label: &'static str) {
    match counts.iter_mut().find(|(l, _)| *l == label) {
        Some((_, c)) => *c += 1,
        None => counts.push((label, 1)),
    }
}

/// Run the operator-law property suite over `instances` random instances.
/// Exact semantics throughout; agents have at most 2 states, environments at
/// most 2 states. Every verdict is additionally compared against the
/// depth-6 brute-force oracle when the relevant product stays within
/// `oracle_node_cap` nodes.
pub fn run_law_fuzz(instances: usize, seed: u64, oracle_node_cap: usize) -> Result<LawFuzzReport> {
    let mut g = InstanceGen::new(seed);
    let mut report = LawFuzzReport { instances, ..Default::default() };
    const ORACLE_DEPTH: usize = 6;

    for i in 0..instances {
        let ifc = g.interface();
        let env = g.environment(&ifc);
        let set1 = g.agent_set(&ifc, 2);
        let set2 = g.agent_set(&ifc, 2);
        let set3 = g.agent_set(&ifc, 2);
        let mut fail = |msg: String| report.violations.push(format!("instance {i}: {msg}"));

        // Generates transitivity.
        let g12 = check_generates(&set1, &set2, &env)?;
        let g23 = check_generates(&set2, &set3, &env)?;
        if g12.holds && g23.holds {
            count(&mut report.premise_counts, "generates-transitivity");
            if !check_generates(&set1, &set3, &env)?.holds {
                fail("generates transitivity violated".into());
            }
        }

        // Uniform generates transitivity.
        let u12 = check_uniform_generates(&set1, &set2)?;
        let u23 = check_uniform_generates(&set2, &set3)?;
        if u12.holds && u23.holds {
            count(&mut report.premise_counts, "uniform-transitivity");
            if !check_uniform_generates(&set1, &set3)?.holds {
                fail("uniform generates transitivity violated".into());
            }
        }

        // Uniform generation implies generation in every environment.
        if u12.holds {
            count(&mut report.premise_counts, "uniform-implies-env");
            for _ in 0..3 {
                let other_env = g.environment(&ifc);
                if !check_generates(&set1, &set2, &other_env)?.holds {
                    fail("uniform generation failed in a specific environment".into());
                }
            }
        }

        // Superset monotonicity.
        if g12.holds {
            count(&mut report.premise_counts, "superset-monotonicity");
            let mut bigger = set1.clone();
            bigger.extend(set3.iter().cloned());
            if !check_generates(&bigger, &set2, &env)?.holds {
                fail("superset of a generating basis failed to generate".into());
            }
        }

        // Reaches: complementation, always => sometimes, membership => always.
        let probe = &set2[0];
        let sometimes = check_reaches(probe, &set1, &env, ReachModality::Sometimes)?;
        let never = check_reaches(probe, &set1, &env, ReachModality::Never)?;
        let always = check_reaches(probe, &set1, &env, ReachModality::Always)?;
        if sometimes.holds == never.holds {
            fail("sometimes and never are not complementary".into());
        }
        if always.holds && !sometimes.holds {
            fail("always-reaches held without sometimes-reaches".into());
        }
        let mut containing = set1.clone();
        containing.push(probe.clone());
        if !check_reaches(probe, &containing, &env, ReachModality::Always)?.holds {
            fail("member failed to always-reach its own set".into());
        }

        // Pigeonhole: fewer rules than pairwise-distinct targets can never
        // uniformly produce them all.
        let mut distinct: Vec<Agent> = vec![set1[0].clone()];
        for a in set1.iter().chain(&set2).chain(&set3) {
            if !distinct.iter().any(|d| behaviorally_equal(d, a)) {
                distinct.push(a.clone());
            }
        }
        if distinct.len() >= 2 {
            count(&mut report.premise_counts, "pigeonhole");
            let rules: Vec<LearningRuleFsm> = (0..distinct.len() - 1)
                .map(|r| LearningRuleFsm::constant(r % distinct.len(), format!("r{r}")))
                .collect();
            if check_sigma_generates(&distinct, &rules, &distinct, None)?.holds {
                fail("fewer rules than distinct agents still covered them".into());
            }
        }

        // Bounded-vs-exact: a pure machine instance re-encoded as tables at a
        // horizon covering the product state count gives the same generates
        // verdict. Kept to thin branching so the tables stay small.
        if ifc.num_observations() == 1 {
            let fsm_refs: Vec<&FsmAgent> = std::iter::once(&set2[0])
                .chain(set1.iter())
                .map(|a| a.as_fsm().unwrap())
                .collect();
            let nodes = product_reachable(&fsm_refs, &env)?.num_nodes();
            if nodes <= 8 {
                count(&mut report.premise_counts, "bounded-vs-exact");
                let exact = check_generates(&set1, &set2[..1], &env)?;
                let to_table = |a: &Agent| -> Result<Agent> {
                    Ok(Agent::Table(TableAgent::from_fn(
                        ifc.clone(),
                        nodes,
                        |h| a.act(h),
                        ActionDistribution::uniform(2),
                        "tbl",
                    )?))
                };
                let basis_t: Vec<Agent> = set1.iter().map(&to_table).collect::<Result<_>>()?;
                let target_t = vec![to_table(&set2[0])?];
                let bounded = check_generates(&basis_t, &target_t, &env)?;
                if bounded.holds != exact.holds {
                    fail(format!(
                        "bounded@{} generates verdict {} disagrees with exact {}",
                        nodes, bounded.holds, exact.holds
                    ));
                }
            }
        }

        // Oracle agreement on small products.
        let fsm_refs: Vec<&FsmAgent> = std::iter::once(&set2[0])
            .chain(set1.iter())
            .map(|a| a.as_fsm().unwrap())
            .collect();
        let nodes = product_reachable(&fsm_refs, &env)?.num_nodes();
        if nodes <= oracle_node_cap {
            report.oracle_checked += 1;
            let exact_gen = check_generates(&set1, &set2[..1], &env)?.holds;
            let oracle_gen = oracle_generates(&set1, &set2[..1], &env, ORACLE_DEPTH);
            if exact_gen != oracle_gen {
                report.oracle_mismatches.push(format!(
                    "instance {i}: generates exact={exact_gen} oracle={oracle_gen}"
                ));
            }
            let exact_ugen = check_uniform_generates(&set1, &set2[..1])?.holds;
            let oracle_ugen = oracle_uniform_generates(&set1, &set2[..1], ORACLE_DEPTH);
            if exact_ugen != oracle_ugen {
                report.oracle_mismatches.push(format!(
                    "instance {i}: uniform-generates exact={exact_ugen} oracle={oracle_ugen}"
                ));
            }
            let oracle_some =
                oracle_sometimes_reaches(&set2[0], &set1, &env, ORACLE_DEPTH, ORACLE_DEPTH / 2);
            if sometimes.holds != oracle_some {
                report.oracle_mismatches.push(format!(
                    "instance {i}: sometimes-reaches exact={} oracle={oracle_some}",
                    sometimes.holds
                ));
            }
        }
    }
    Ok(report)
}
