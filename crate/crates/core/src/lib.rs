//! An executable laboratory for finite-state agent semantics: exact decision
//! procedures for the generates and reaches operators, basis analysis (rank,
//! minimality, fragment universality, orthogonal/parallel relations), value
//! computation and a continual-RL instance classifier, plus builders for
//! switching-MDP and continual-supervised-learning environments.
//!
//! Probabilities, rewards, and values are exact rationals everywhere;
//! realizability ("positive probability") and argmax ties are decided with
//! zero tolerance. Floating point appears only in the separate Monte Carlo
//! simulation crate.

pub mod agent;
pub mod analysis;
pub mod builders;
pub mod crl;
pub mod dist;
pub mod env;
pub mod error;
pub mod fuzz;
pub mod history;
pub mod interface;
pub mod ops;
pub mod product;
pub mod rational;
pub mod realizable;
pub mod schema;
pub mod solve;
pub mod value;
pub mod verdict;

pub use agent::{behaviorally_equal, fsm_behaviorally_equal, run_agent, Agent, FsmAgent, TableAgent};
pub use analysis::{
    are_orthogonal, are_parallel, is_minimal_over_pool, is_universal_fragment, rank_over_pool,
    CandidatePool, RankResult,
};
pub use builders::{
    build_csl_env, build_gridworld_suite, build_switching_env, optimal_policy, CslPhase,
    CslSchedule, GridworldLayout, GridworldSuite, SwitchingSpec, TabularMdp,
};
pub use crl::{
    augment_with_optimal, classify_crl, count_replans, make_model_based_rule, CrlInstance,
    CrlReport, ModelBasedRule, ReplanReport,
};
pub use dist::ActionDistribution;
pub use env::{bandit_environment, environments_bisimilar, FsmEnvironment, Outcome};
pub use error::{CoreError, Result};
pub use history::History;
pub use interface::Interface;
pub use ops::{
    check_generates, check_reaches, check_sigma_generates, check_uniform_generates,
    construct_generating_basis, LearningRuleFsm, ReachModality,
};
pub use product::{
    determinized_product, free_product, product_reachable, DetGraph, DetNode, ProductGraph,
    ProductNode,
};
pub use rational::{rat, Rational};
pub use realizable::{realizable_histories, realizable_suffixes};
pub use value::{compute_value, discounted_value_truncated, optimal_agents, PerformanceSpec};
pub use verdict::{Semantics, Verdict};
