//! Exact decision procedures for the agent-basis operators.
//!
//! A basis *generates* a set when at every (realizable) history some basis
//! member produces the target agent's action distribution; under the set of
//! all learning rules the existential over rules collapses to this pointwise
//! condition. An agent *reaches* a basis when from some realizable history a
//! basis member matches it on every realizable continuation; the carrier of
//! that "forever after" quantifier is a greatest-fixpoint agreement region on
//! the joint product graph.

mod construct;
mod generates;
mod reaches;

pub use construct::construct_generating_basis;
pub use generates::{
    check_generates, check_sigma_generates, check_uniform_generates, LearningRuleFsm,
};
pub use reaches::{check_reaches, ReachModality};

use crate::agent::Agent;
use crate::verdict::Semantics;

/// Exact when every participant is a pure state machine, otherwise bounded at
/// the largest participating table horizon.
pub(crate) fn semantics_of<'a>(agents: impl IntoIterator<Item = &'a Agent>) -> Semantics {
    match agents.into_iter().filter_map(Agent::table_horizon).max() {
        None => Semantics::Exact,
        Some(h) => Semantics::Bounded { horizon: h },
    }
}

/// All histories over an interface up to `horizon`, in canonical order.
/// Exponential; only the bounded uniform checks use it, at small depths.
pub(crate) fn all_histories(
    interface: &crate::interface::Interface,
    horizon: usize,
) -> Vec<crate::history::History> {
    let num_actions = interface.num_actions() as u16;
    let num_obs = interface.num_observations() as u16;
    let mut out = vec![crate::history::History::empty()];
    let mut level = vec![crate::history::History::empty()];
    for _ in 0..horizon {
        let mut next = Vec::new();
        for h in &level {
            for a in 0..num_actions {
                for o in 0..num_obs {
                    next.push(h.extended(a, o));
                }
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}
