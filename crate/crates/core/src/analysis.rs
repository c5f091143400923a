//! Basis analysis over finite candidate pools: rank (smallest uniformly
//! generating subset), minimality, universality restricted to a finite output
//! menu, and the orthogonal/parallel relations.
//!
//! Rank here is pool-relative: the minimum runs over subsets of a supplied
//! finite pool rather than over all agents, which keeps the search decidable.
//! Reports carry this caveat ("pool-rank"). Universality is likewise a
//! fragment notion: a basis is fragment-universal when at every reachable
//! joint state its members' outputs cover a finite menu of distributions
//! (point masses by default). Finite fragment-universal bases exist, unlike
//! in the unrestricted setting.

use serde::Serialize;

use crate::agent::{behaviorally_equal, Agent, FsmAgent};
use crate::dist::ActionDistribution;
use crate::error::{CoreError, Result};
use crate::interface::Interface;
use crate::ops::check_uniform_generates;
use crate::product::free_product;
use crate::verdict::Verdict;

/// A finite ordered list of candidate agents. Behavioural duplicates are
/// permitted but reported.
#[derive(Clone, Debug)]
pub struct CandidatePool {
    agents: Vec<Agent>,
}

impl CandidatePool {
    pub fn new(agents: Vec<Agent>) -> Result<Self> {
        if agents.is_empty() {
            return Err(CoreError::BadSpec("candidate pool must be non-empty".into()));
        }
        Ok(CandidatePool { agents })
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    /// Indices of members behaviourally equal to an earlier member.
    pub fn duplicate_indices(&self) -> Vec<usize> {
        let mut dups = Vec::new();
        for i in 1..self.agents.len() {
            if self.agents[..i].iter().any(|a| behaviorally_equal(a, &self.agents[i])) {
                dups.push(i);
            }
        }
        dups
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RankResult {
    pub rank: usize,
    /// Pool indices of the winning subset, in canonical (index) order.
    pub witness_basis: Vec<usize>,
    /// All strictly smaller subsets were refuted before this one won.
    pub exhausted: bool,
}

/// Enumerate the size-k subsets of `0..n` in lexicographic order.
fn subsets_of_size(n: usize, k: usize, mut visit: impl FnMut(&[usize]) -> Result<bool>) -> Result<bool> {
    fn go(
        n: usize,
        k: usize,
        start: usize,
        current: &mut Vec<usize>,
        visit: &mut impl FnMut(&[usize]) -> Result<bool>,
    ) -> Result<bool> {
        if current.len() == k {
            return visit(current);
        }
        for i in start..n {
            if n - i < k - current.len() {
                break;
            }
            current.push(i);
            if go(n, k, i + 1, current, visit)? {
                return Ok(true);
            }
            current.pop();
        }
        Ok(false)
    }
    go(n, k, 0, &mut Vec::new(), &mut visit)
}

/// Pool-rank of `target`: the size of the first (smallest, then
/// lexicographically least) pool subset that uniformly generates every member
/// of `target`.
pub fn rank_over_pool(target: &[Agent], pool: &CandidatePool) -> Result<RankResult> {
    for size in 1..=pool.len() {
        let mut winner: Option<Vec<usize>> = None;
        subsets_of_size(pool.len(), size, |subset| {
            let basis: Vec<Agent> = subset.iter().map(|i| pool.agents[*i].clone()).collect();
            if check_uniform_generates(&basis, target)?.holds {
                winner = Some(subset.to_vec());
                return Ok(true);
            }
            Ok(false)
        })?;
        if let Some(witness_basis) = winner {
            return Ok(RankResult { rank: size, witness_basis, exhausted: true });
        }
    }
    Err(CoreError::NoBasisInPool)
}

/// Is `basis` minimal relative to the pool: does no strictly smaller
/// candidate subset uniformly generate it? The basis's own members count as
/// candidates, so a basis carrying a behavioural duplicate is never minimal.
pub fn is_minimal_over_pool(basis: &[Agent], pool: &CandidatePool) -> Result<bool> {
    if basis.is_empty() {
        return Err(CoreError::EmptyBasis);
    }
    let mut candidates: Vec<Agent> = pool.agents.clone();
    for b in basis {
        if !candidates.iter().any(|c| behaviorally_equal(c, b)) {
            candidates.push(b.clone());
        }
    }
    for size in 1..basis.len() {
        let mut found = false;
        subsets_of_size(candidates.len(), size, |subset| {
            let small: Vec<Agent> = subset.iter().map(|i| candidates[*i].clone()).collect();
            if check_uniform_generates(&small, basis)?.holds {
                found = true;
                return Ok(true);
            }
            Ok(false)
        })?;
        if found {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Fragment universality: at every joint state reachable under all inputs (up
/// to `depth`, exact once the depth covers the joint state count), every menu
/// distribution appears among the basis members' outputs. `menu = None`
/// defaults to the point masses.
pub fn is_universal_fragment(
    basis: &[Agent],
    interface: &Interface,
    menu: Option<&[ActionDistribution]>,
    depth: Option<usize>,
) -> Result<Verdict> {
    if basis.is_empty() {
        return Err(CoreError::EmptyBasis);
    }
    let point_masses: Vec<ActionDistribution> = (0..interface.num_actions())
        .map(|a| ActionDistribution::point_mass(a as u16, interface.num_actions()))
        .collect();
    let menu = menu.unwrap_or(&point_masses);
    if menu.is_empty() {
        return Err(CoreError::BadSpec("universality menu must be non-empty".into()));
    }
    let fsm: Vec<&FsmAgent> = basis
        .iter()
        .map(|a| {
            a.as_fsm().ok_or_else(|| {
                CoreError::BadSpec("fragment universality is decided on state machines".into())
            })
        })
        .collect::<Result<_>>()?;
    let graph = free_product(&fsm)?;
    let depths = graph.depths();
    let cap = depth.unwrap_or(usize::MAX);
    let mut witness = None;
    'nodes: for n in 0..graph.num_nodes() {
        if depths[n] > cap {
            continue;
        }
        let node = graph.node(n);
        for want in menu {
            let covered = fsm
                .iter()
                .enumerate()
                .any(|(i, b)| *b.output(node.agent_states[i]) == *want);
            if !covered {
                witness = Some(graph.witness_history(n));
                break 'nodes;
            }
        }
    }
    // Depth caps below the joint state count leave deeper nodes unchecked.
    let exact = cap >= graph.num_nodes();
    Ok(match (witness, exact) {
        (w @ Some(_), true) => Verdict::exact(false, w),
        (None, true) => Verdict::exact(true, None),
        (w @ Some(_), false) => Verdict::bounded(false, cap, w),
        (None, false) => Verdict::bounded(true, cap, None),
    })
}

/// Orthogonality: the families the two bases uniformly generate are always
/// disjoint. Under the full rule set an agent generated by both exists
/// exactly when at every joint state the two output sets intersect, so the
/// bases are orthogonal iff some reachable joint state has disjoint outputs.
pub fn are_orthogonal(b1: &[Agent], b2: &[Agent]) -> Result<Verdict> {
    if b1.is_empty() || b2.is_empty() {
        return Err(CoreError::EmptyBasis);
    }
    let fsm1: Vec<&FsmAgent> = b1
        .iter()
        .map(|a| {
            a.as_fsm()
                .ok_or_else(|| CoreError::BadSpec("orthogonality is decided on state machines".into()))
        })
        .collect::<Result<_>>()?;
    let fsm2: Vec<&FsmAgent> = b2
        .iter()
        .map(|a| {
            a.as_fsm()
                .ok_or_else(|| CoreError::BadSpec("orthogonality is decided on state machines".into()))
        })
        .collect::<Result<_>>()?;
    let all: Vec<&FsmAgent> = fsm1.iter().chain(fsm2.iter()).copied().collect();
    let graph = free_product(&all)?;
    let mut witness: Option<crate::history::History> = None;
    for n in 0..graph.num_nodes() {
        let node = graph.node(n);
        let outputs1: Vec<&ActionDistribution> = fsm1
            .iter()
            .enumerate()
            .map(|(i, b)| b.output(node.agent_states[i]))
            .collect();
        let disjoint = !fsm2.iter().enumerate().any(|(j, b)| {
            let out2 = b.output(node.agent_states[fsm1.len() + j]);
            outputs1.iter().any(|o1| *o1 == out2)
        });
        if disjoint {
            let h = graph.witness_history(n);
            match &witness {
                Some(cur) if cur.canonical_cmp(&h).is_le() => {}
                _ => witness = Some(h),
            }
        }
    }
    Ok(Verdict::exact(witness.is_some(), witness))
}

/// Parallelism: the two bases uniformly generate the same families, decided
/// through mutual uniform generation (each generates the other, and uniform
/// generation is transitive).
pub fn are_parallel(b1: &[Agent], b2: &[Agent]) -> Result<Verdict> {
    if b1.is_empty() || b2.is_empty() {
        return Err(CoreError::EmptyBasis);
    }
    let forward = check_uniform_generates(b1, b2)?;
    if !forward.holds {
        return Ok(forward);
    }
    let backward = check_uniform_generates(b2, b1)?;
    if !backward.holds {
        return Ok(backward);
    }
    Ok(Verdict {
        holds: true,
        semantics: forward.semantics.combine(backward.semantics),
        witness: None,
    })
}
