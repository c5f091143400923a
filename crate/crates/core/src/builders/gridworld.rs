//! Seeded generation of gridworld variant suites sharing one grid and action
//! set but differing in walls and goal/hazard placement, with an exact
//! distinctness check on the variants' optimal policies.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::rational::{rat, Rational};

use super::mdp::{optimal_policy, TabularMdp};
use super::switching::SwitchingSpec;

pub const ACTIONS: [&str; 4] = ["up", "down", "left", "right"];
const DELTAS: [(i64, i64); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];

/// One variant's layout, kept alongside the MDP encoding for inspection.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridworldLayout {
    pub width: usize,
    pub height: usize,
    pub walls: Vec<(usize, usize)>,
    pub goal: (usize, usize),
    pub hazard: (usize, usize),
    pub start: (usize, usize),
    /// Whether the optimal policy's argmax was unique at every reachable
    /// non-terminal cell (reported, not required).
    pub unique_optimal_policy: bool,
}

impl GridworldLayout {
    /// ASCII rendering: S start, G goal, X hazard, # wall, . open.
    pub fn ascii(&self) -> String {
        let mut out = String::new();
        for r in 0..self.height {
            for c in 0..self.width {
                let ch = if (r, c) == self.start {
                    'S'
                } else if (r, c) == self.goal {
                    'G'
                } else if (r, c) == self.hazard {
                    'X'
                } else if self.walls.contains(&(r, c)) {
                    '#'
                } else {
                    '.'
                };
                out.push(ch);
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridworldSuite {
    pub spec: SwitchingSpec,
    pub layouts: Vec<GridworldLayout>,
    pub seed: u64,
    /// Discount used for the policy distinctness check.
    pub policy_gamma: Rational,
}

fn cell_index(width: usize, r: usize, c: usize) -> usize {
    r * width + c
}

fn layout_to_mdp(layout: &GridworldLayout, name: &str) -> TabularMdp {
    let (w, h) = (layout.width, layout.height);
    let n = w * h;
    let is_wall = |r: usize, c: usize| layout.walls.contains(&(r, c));
    let state_names: Vec<String> = (0..h)
        .flat_map(|r| (0..w).map(move |c| format!("{r},{c}")))
        .collect();
    let goal = cell_index(w, layout.goal.0, layout.goal.1);
    let hazard = cell_index(w, layout.hazard.0, layout.hazard.1);
    let mut transition = Vec::with_capacity(n);
    let mut reward = Vec::with_capacity(n);
    let mut terminal = vec![false; n];
    terminal[goal] = true;
    terminal[hazard] = true;
    for r in 0..h {
        for c in 0..w {
            let s = cell_index(w, r, c);
            let mut per_action = Vec::with_capacity(4);
            let mut per_action_reward = Vec::with_capacity(4);
            for (dr, dc) in DELTAS {
                let target = if terminal[s] || is_wall(r, c) {
                    s // unreachable or absorbing; self-loop keeps rows valid
                } else {
                    let nr = r as i64 + dr;
                    let nc = c as i64 + dc;
                    if nr < 0 || nc < 0 || nr >= h as i64 || nc >= w as i64 {
                        s
                    } else {
                        let (nr, nc) = (nr as usize, nc as usize);
                        if is_wall(nr, nc) {
                            s
                        } else {
                            cell_index(w, nr, nc)
                        }
                    }
                };
                per_action.push(vec![(target, rat(1, 1))]);
                let mut row = vec![Rational::zero(); n];
                row[goal] = rat(1, 1);
                row[hazard] = rat(-1, 1);
                if terminal[s] {
                    row = vec![Rational::zero(); n];
                }
                per_action_reward.push(row);
            }
            transition.push(per_action);
            reward.push(per_action_reward);
        }
    }
    TabularMdp {
        name: name.into(),
        state_names,
        action_names: ACTIONS.iter().map(|a| a.to_string()).collect(),
        transition,
        reward,
        start: cell_index(w, layout.start.0, layout.start.1),
        terminal,
    }
}

fn goal_reachable(layout: &GridworldLayout) -> bool {
    let (w, h) = (layout.width, layout.height);
    let is_wall = |r: usize, c: usize| layout.walls.contains(&(r, c));
    let mut seen = vec![false; w * h];
    let mut stack = vec![layout.start];
    seen[cell_index(w, layout.start.0, layout.start.1)] = true;
    while let Some((r, c)) = stack.pop() {
        if (r, c) == layout.goal {
            return true;
        }
        if (r, c) == layout.hazard {
            continue;
        }
        for (dr, dc) in DELTAS {
            let nr = r as i64 + dr;
            let nc = c as i64 + dc;
            if nr < 0 || nc < 0 || nr >= h as i64 || nc >= w as i64 {
                continue;
            }
            let (nr, nc) = (nr as usize, nc as usize);
            if !is_wall(nr, nc) && !seen[cell_index(w, nr, nc)] {
                seen[cell_index(w, nr, nc)] = true;
                stack.push((nr, nc));
            }
        }
    }
    false
}

/// The policy restricted to cells reachable in the variant, as comparable
/// (cell, action) pairs.
fn policy_signature(mdp: &TabularMdp, policy: &[usize]) -> Vec<(usize, usize)> {
    let reachable = mdp.reachable_states();
    (0..mdp.num_states())
        .filter(|s| reachable[*s] && !mdp.terminal[*s])
        .map(|s| (s, policy[s]))
        .collect()
}

/// Two variants' optimal policies are distinct when they disagree at some
/// cell reachable and non-terminal in both.
fn policies_distinct(a: &[(usize, usize)], b: &[(usize, usize)]) -> bool {
    for (s, act) in a {
        if let Some((_, other)) = b.iter().find(|(t, _)| t == s) {
            if act != other {
                return true;
            }
        }
    }
    false
}

/// Generate `n` gridworld variants over a shared `width` x `height` grid with
/// pairwise-distinct optimal policies, retrying placements until the
/// distinctness check passes or the attempt budget runs out. Deterministic in
/// `seed`. The switch probability defaults to 1/1000 and can be overridden on
/// the returned spec.
pub fn build_gridworld_suite(
    width: usize,
    height: usize,
    n: usize,
    seed: u64,
) -> Result<GridworldSuite> {
    if n == 0 {
        return Err(CoreError::BadSpec("suite needs at least one variant".into()));
    }
    if width < 2 || height < 2 {
        return Err(CoreError::BadSpec("grid must be at least 2x2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gamma = rat(19, 20);
    let start = (0usize, 0usize);
    let budget = 60 * n;
    let mut layouts: Vec<GridworldLayout> = Vec::new();
    let mut mdps: Vec<TabularMdp> = Vec::new();
    let mut signatures: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut attempts = 0;
    while layouts.len() < n {
        attempts += 1;
        if attempts > budget {
            return Err(CoreError::DistinctnessUnachievable { wanted: n, attempts });
        }
        // Sample special cells and walls.
        let mut free: Vec<(usize, usize)> = (0..height)
            .flat_map(|r| (0..width).map(move |c| (r, c)))
            .filter(|cell| *cell != start)
            .collect();
        let goal = free.remove(rng.random_range(0..free.len()));
        let hazard = free.remove(rng.random_range(0..free.len()));
        let walls: Vec<(usize, usize)> = free
            .iter()
            .copied()
            .filter(|_| rng.random_range(0..6u8) == 0)
            .collect();
        let mut layout = GridworldLayout {
            width,
            height,
            walls,
            goal,
            hazard,
            start,
            unique_optimal_policy: false,
        };
        if !goal_reachable(&layout) {
            continue;
        }
        let mdp = layout_to_mdp(&layout, &format!("grid{}", layouts.len()));
        let analysis = optimal_policy(&mdp, &gamma)?;
        let signature = policy_signature(&mdp, &analysis.policy);
        if signatures.iter().any(|s| !policies_distinct(s, &signature)) {
            continue;
        }
        layout.unique_optimal_policy = analysis.unique;
        signatures.push(signature);
        layouts.push(layout);
        mdps.push(mdp);
    }
    Ok(GridworldSuite {
        spec: SwitchingSpec { mdps, p_switch: rat(1, 1000) },
        layouts,
        seed,
        policy_gamma: gamma,
    })
}
