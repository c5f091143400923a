//! Constructive basis generation: for any agent and environment, build k+1
//! table agents, none behaviourally equal to the agent, that jointly generate
//! it. Member i matches the agent exactly on the realizable histories whose
//! canonical enumeration index is congruent to i-1 modulo k+1, and plays a
//! rotated distribution everywhere else.

use std::collections::HashMap;

use crate::agent::{Agent, TableAgent};
use crate::dist::ActionDistribution;
use crate::env::FsmEnvironment;
use crate::error::{CoreError, Result};
use crate::history::History;
use crate::realizable::realizable_histories;

/// Build the k+1 member generating basis for `agent` in `env`, with table
/// horizon `horizon`. Fails when fewer than k+1 realizable histories exist up
/// to the horizon, since then some member could not be made to disagree with
/// the agent anywhere realizable.
pub fn construct_generating_basis(
    agent: &Agent,
    env: &FsmEnvironment,
    k: usize,
    horizon: usize,
) -> Result<Vec<Agent>> {
    if k == 0 {
        return Err(CoreError::BadSpec("basis construction needs k >= 1".into()));
    }
    if horizon == 0 {
        return Err(CoreError::BadSpec("basis construction needs a horizon >= 1".into()));
    }
    let histories = realizable_histories(agent, env, horizon)?;
    let parts = k + 1;
    if histories.len() < parts {
        return Err(CoreError::TooFewHistories {
            available: histories.len(),
            needed: parts,
            horizon,
        });
    }
    let index: HashMap<History, usize> =
        histories.iter().cloned().enumerate().map(|(i, h)| (h, i)).collect();
    let fallback = ActionDistribution::uniform(agent.interface().num_actions());
    let mut basis = Vec::with_capacity(parts);
    for member in 0..parts {
        let table = TableAgent::from_fn(
            agent.interface().clone(),
            horizon,
            |h| {
                let out = agent.act(h);
                match index.get(h) {
                    Some(i) if i % parts == member => out,
                    _ => out.rotated(),
                }
            },
            fallback.clone(),
            format!("slice{}of{parts}", member + 1),
        )?;
        basis.push(Agent::Table(table));
    }
    Ok(basis)
}
