//! Continual supervised learning as an environment: a phase schedule of
//! distributions over (input, label) pairs, observed as (fresh input, label
//! of the previous input), rewarded +1 for a correct previous-step prediction
//! and -1 otherwise.
//!
//! The phase clock lives in the environment state, so the drifting
//! distribution sequence is an ordinary function of history. The label slot
//! of the very first observation carries a designated ignore symbol; no
//! action matches it, so the first step rewards every agent equally.

use serde::{Deserialize, Serialize};

use crate::env::{FsmEnvironment, Outcome};
use crate::error::{CoreError, Result};
use crate::interface::Interface;
use crate::rational::Rational;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CslPhase {
    /// (input index, label index, probability); probabilities sum to exactly 1.
    pub dist: Vec<(usize, usize, Rational)>,
    /// Steps spent in this phase; `None` marks the final unbounded phase of a
    /// non-repeating schedule.
    pub duration: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CslSchedule {
    pub inputs: Vec<String>,
    pub labels: Vec<String>,
    pub phases: Vec<CslPhase>,
    /// When true the phase list repeats cyclically forever; when false the
    /// final phase must be unbounded.
    #[serde(default)]
    pub repeat: bool,
}

impl CslSchedule {
    pub fn validate(&self) -> Result<()> {
        if self.inputs.is_empty() || self.labels.len() < 2 {
            return Err(CoreError::BadSpec(
                "schedule needs at least one input and two labels".into(),
            ));
        }
        if self.phases.is_empty() {
            return Err(CoreError::BadSpec("schedule needs at least one phase".into()));
        }
        for (i, phase) in self.phases.iter().enumerate() {
            let mut total = Rational::zero();
            for (x, y, p) in &phase.dist {
                if *x >= self.inputs.len() {
                    return Err(CoreError::BadSpec(format!(
                        "phase {i} references input index {x} out of range"
                    )));
                }
                if *y >= self.labels.len() {
                    return Err(CoreError::LabelOutsideActions(format!("label index {y}")));
                }
                if !p.is_positive() {
                    return Err(CoreError::BadSpec(format!(
                        "phase {i} has a non-positive probability"
                    )));
                }
                total += p;
            }
            if total != Rational::one() {
                return Err(CoreError::BadSpec(format!(
                    "phase {i} distribution sums to {total}, expected exactly 1"
                )));
            }
            let is_last = i + 1 == self.phases.len();
            match (phase.duration, is_last, self.repeat) {
                (None, true, false) => {}
                (None, _, _) => {
                    return Err(CoreError::BadSpec(format!(
                        "phase {i} may only be unbounded when it is the final phase of a \
                         non-repeating schedule"
                    )))
                }
                (Some(0), _, _) => {
                    return Err(CoreError::BadSpec(format!("phase {i} has zero duration")))
                }
                (Some(_), true, false) => {
                    return Err(CoreError::BadSpec(
                        "a non-repeating schedule must end in an unbounded phase".into(),
                    ))
                }
                (Some(_), _, _) => {}
            }
        }
        Ok(())
    }

    pub fn ignore_symbol() -> &'static str {
        "_"
    }

    pub fn observation_symbol(&self, input: usize, label: Option<usize>) -> String {
        match label {
            Some(y) => format!("{}|{}", self.inputs[input], self.labels[y]),
            None => format!("{}|{}", self.inputs[input], Self::ignore_symbol()),
        }
    }
}

/// Clock positions: one per (phase, step-within-phase) for bounded phases,
/// one absorbing position for an unbounded final phase.
fn clock_positions(schedule: &CslSchedule) -> Vec<(usize, usize)> {
    let mut positions = Vec::new();
    for (p, phase) in schedule.phases.iter().enumerate() {
        match phase.duration {
            Some(d) => positions.extend((0..d).map(|s| (p, s))),
            None => positions.push((p, 0)),
        }
    }
    positions
}

fn next_clock(schedule: &CslSchedule, positions: &[(usize, usize)], idx: usize) -> usize {
    let (p, s) = positions[idx];
    match schedule.phases[p].duration {
        None => idx, // unbounded final phase
        Some(d) => {
            if s + 1 < d {
                idx + 1
            } else if p + 1 < schedule.phases.len() {
                positions.iter().position(|x| *x == (p + 1, 0)).expect("next phase exists")
            } else {
                // Last bounded phase: repeat from the top.
                0
            }
        }
    }
}

/// Build the environment. States are (clock position, pending label), where
/// the pending label is the label of the most recent input, revealed in the
/// next observation.
pub fn build_csl_env(schedule: &CslSchedule) -> Result<FsmEnvironment> {
    schedule.validate()?;
    let positions = clock_positions(schedule);
    let n_labels = schedule.labels.len();
    // pending: 0..n_labels = a label, n_labels = the initial ignore slot.
    let pending_slots = n_labels + 1;
    let state_of = |clock: usize, pending: usize| clock * pending_slots + pending;

    let mut observations = Vec::new();
    for x in 0..schedule.inputs.len() {
        for y in 0..n_labels {
            observations.push(schedule.observation_symbol(x, Some(y)));
        }
        observations.push(schedule.observation_symbol(x, None));
    }
    let obs_of = |x: usize, pending: usize| (x * pending_slots + pending) as u16;
    let interface = Interface::new(schedule.labels.clone(), observations)?;

    let num_states = positions.len() * pending_slots;
    let mut dynamics = Vec::with_capacity(num_states);
    for clock in 0..positions.len() {
        let (phase_idx, _) = positions[clock];
        let phase = &schedule.phases[phase_idx];
        let next = next_clock(schedule, &positions, clock);
        for pending in 0..pending_slots {
            // The environment ignores the action: the stream is exogenous.
            let row: Vec<Outcome> = phase
                .dist
                .iter()
                .map(|(x, y, p)| Outcome {
                    next_state: state_of(next, *y),
                    observation: obs_of(*x, pending),
                    prob: p.clone(),
                })
                .collect();
            // Merge duplicates (two (x,y) entries with equal x and y cannot
            // occur after validation, but equal observations can if the
            // distribution repeats an input with different labels).
            let mut merged: std::collections::BTreeMap<(usize, u16), Rational> = Default::default();
            for o in row {
                *merged.entry((o.next_state, o.observation)).or_insert_with(Rational::zero) +=
                    &o.prob;
            }
            let row: Vec<Outcome> = merged
                .into_iter()
                .map(|((next_state, observation), prob)| Outcome { next_state, observation, prob })
                .collect();
            dynamics.push(vec![row; n_labels]);
        }
    }

    // reward(a, (x, y)) = +1 iff a == y; the ignore slot never matches.
    let mut reward = Vec::with_capacity(n_labels);
    for action in 0..n_labels {
        let mut row = Vec::with_capacity(interface.num_observations());
        for _x in 0..schedule.inputs.len() {
            for pending in 0..pending_slots {
                row.push(if pending == action { Rational::one() } else { Rational::new(-1, 1) });
            }
        }
        reward.push(row);
    }

    FsmEnvironment::new(
        interface,
        state_of(0, n_labels), // clock at phase 0 step 0, pending = ignore
        dynamics,
        reward,
        "csl",
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::{Agent, FsmAgent};
    use crate::rational::rat;
    use crate::realizable::realizable_histories;

    fn deterministic_schedule() -> CslSchedule {
        // Single input, label always y0.
        CslSchedule {
            inputs: vec!["x".into()],
            labels: vec!["y0".into(), "y1".into()],
            phases: vec![CslPhase { dist: vec![(0, 0, rat(1, 1))], duration: None }],
            repeat: false,
        }
    }

    /// Labels flip between y0 and y1 every `d` steps, forever.
    pub(crate) fn flip_schedule(d: usize) -> CslSchedule {
        CslSchedule {
            inputs: vec!["x".into()],
            labels: vec!["y0".into(), "y1".into()],
            phases: vec![
                CslPhase { dist: vec![(0, 0, rat(1, 1))], duration: Some(d) },
                CslPhase { dist: vec![(0, 1, rat(1, 1))], duration: Some(d) },
            ],
            repeat: true,
        }
    }

    #[test]
    fn constant_correct_classifier_earns_plus_one_after_warmup() {
        let env = build_csl_env(&deterministic_schedule()).unwrap();
        let agent: Agent =
            FsmAgent::constant_action(env.interface().clone(), 0).unwrap().into();
        let histories = realizable_histories(&agent, &env, 4).unwrap();
        // Single deterministic path: one history per length.
        assert_eq!(histories.len(), 5);
        for h in &histories {
            for (t, (a, o)) in h.pairs().iter().enumerate() {
                let r = env.reward(*a, *o);
                if t == 0 {
                    assert_eq!(*r, rat(-1, 1), "ignore-labelled first step");
                } else {
                    assert_eq!(*r, rat(1, 1), "step {t} of {h:?}");
                }
            }
        }
    }

    #[test]
    fn reward_stream_matches_the_matching_rule() {
        // Independent restatement: reward at step t is +1 iff the action at
        // step t equals the label revealed by the observation at step t.
        let env = build_csl_env(&flip_schedule(2)).unwrap();
        let ifc = env.interface().clone();
        let agent: Agent = FsmAgent::constant(ifc.clone(), crate::dist::ActionDistribution::uniform(2))
            .unwrap()
            .into();
        for h in realizable_histories(&agent, &env, 5).unwrap() {
            for (a, o) in h.pairs() {
                let obs_name = ifc.observation_name(*o);
                let label = obs_name.split('|').nth(1).unwrap();
                let expected = if label == ifc.action_name(*a) { rat(1, 1) } else { rat(-1, 1) };
                assert_eq!(*env.reward(*a, *o), expected, "at {h:?}");
            }
        }
    }

    #[test]
    fn label_flips_occur_on_schedule() {
        let env = build_csl_env(&flip_schedule(1)).unwrap();
        let ifc = env.interface().clone();
        let agent: Agent = FsmAgent::constant_action(ifc.clone(), 0).unwrap().into();
        let hs = realizable_histories(&agent, &env, 4).unwrap();
        let path = hs.iter().find(|h| h.len() == 4).unwrap();
        let labels: Vec<&str> = path
            .pairs()
            .iter()
            .map(|(_, o)| ifc.observation_name(*o).split('|').nth(1).unwrap())
            .collect();
        // Pending label lags the draw by one step: ignore, then the phase
        // sequence y0, y1, y0 under d = 1.
        assert_eq!(labels, vec!["_", "y0", "y1", "y0"]);
    }

    #[test]
    fn schedule_validation_rejects_bad_shapes() {
        let mut s = deterministic_schedule();
        s.phases[0].duration = Some(3);
        assert!(s.validate().is_err(), "non-repeating schedule must end unbounded");
        let mut s = flip_schedule(2);
        s.phases[1].dist[0].2 = rat(1, 2);
        assert!(s.validate().is_err(), "distribution must sum to 1");
        let mut s = flip_schedule(2);
        s.phases[0].dist[0].1 = 7;
        assert!(matches!(s.validate(), Err(CoreError::LabelOutsideActions(_))));
    }
}
