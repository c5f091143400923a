//! Builders for the two worked example families: switching MDPs (with a
//! gridworld suite generator) and continual supervised learning streams.

mod csl;
mod gridworld;
mod mdp;
mod switching;

pub use csl::{build_csl_env, CslPhase, CslSchedule};
pub use gridworld::{build_gridworld_suite, GridworldLayout, GridworldSuite};
pub use mdp::{optimal_policy, PolicyAnalysis, TabularMdp};
pub use switching::{build_switching_env, SwitchingSpec};
