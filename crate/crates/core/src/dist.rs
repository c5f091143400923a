//! Probability distributions over the action alphabet.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::rational::Rational;

/// An exact distribution over actions, stored densely in action order.
/// Probabilities are non-negative rationals summing to exactly one.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActionDistribution {
    probs: Vec<Rational>,
}

impl ActionDistribution {
    pub fn new(probs: Vec<Rational>) -> Result<Self, CoreError> {
        if probs.is_empty() {
            return Err(CoreError::BadDistribution("empty probability vector".into()));
        }
        let mut total = Rational::zero();
        for (i, p) in probs.iter().enumerate() {
            if p.is_negative() {
                return Err(CoreError::BadDistribution(format!(
                    "probability of action {i} is negative: {p}"
                )));
            }
            total += p;
        }
        if total != Rational::one() {
            return Err(CoreError::BadDistribution(format!(
                "probabilities sum to {total}, expected exactly 1"
            )));
        }
        Ok(ActionDistribution { probs })
    }

    /// All mass on a single action.
    pub fn point_mass(action: u16, num_actions: usize) -> Self {
        let mut probs = vec![Rational::zero(); num_actions];
        probs[action as usize] = Rational::one();
        ActionDistribution { probs }
    }

    pub fn uniform(num_actions: usize) -> Self {
        let p = Rational::new(1, num_actions as i64);
        ActionDistribution { probs: vec![p; num_actions] }
    }

    pub fn num_actions(&self) -> usize {
        self.probs.len()
    }

    pub fn prob(&self, action: u16) -> &Rational {
        &self.probs[action as usize]
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    /// Actions with strictly positive probability, in action order.
    pub fn support(&self) -> impl Iterator<Item = u16> + '_ {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, p)| p.is_positive())
            .map(|(i, _)| i as u16)
    }

    /// If this is a point mass, the action carrying all the mass.
    pub fn as_point_mass(&self) -> Option<u16> {
        let mut sole = None;
        for (i, p) in self.probs.iter().enumerate() {
            if p.is_positive() {
                if sole.is_some() {
                    return None;
                }
                sole = Some(i as u16);
            }
        }
        sole
    }

    /// Cyclically shift all mass one position forward in action order. If the
    /// distribution is shift-invariant (e.g. uniform), fall back to a point
    /// mass on the first action, which is guaranteed to differ because
    /// shift-invariant distributions over two or more actions are never point
    /// masses.
    pub fn rotated(&self) -> ActionDistribution {
        let n = self.probs.len();
        let mut probs = vec![Rational::zero(); n];
        for (i, p) in self.probs.iter().enumerate() {
            probs[(i + 1) % n] = p.clone();
        }
        let rotated = ActionDistribution { probs };
        if rotated == *self {
            ActionDistribution::point_mass(0, n)
        } else {
            rotated
        }
    }
}

impl fmt::Debug for ActionDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dist[")?;
        for (i, p) in self.probs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    #[test]
    fn rejects_bad_sums() {
        assert!(ActionDistribution::new(vec![rat(1, 2), rat(1, 3)]).is_err());
        assert!(ActionDistribution::new(vec![rat(3, 2), rat(-1, 2)]).is_err());
        assert!(ActionDistribution::new(vec![rat(1, 2), rat(1, 2)]).is_ok());
    }

    #[test]
    fn rotation_differs_from_original() {
        let pm = ActionDistribution::point_mass(1, 3);
        assert_eq!(pm.rotated(), ActionDistribution::point_mass(2, 3));
        assert_eq!(
            ActionDistribution::point_mass(2, 3).rotated(),
            ActionDistribution::point_mass(0, 3)
        );
        // Shift-invariant case falls back to a point mass.
        let u = ActionDistribution::uniform(2);
        assert_ne!(u.rotated(), u);
        assert_eq!(u.rotated(), ActionDistribution::point_mass(0, 2));
    }

    proptest! {
        #[test]
        fn rotation_never_fixes(weights in proptest::collection::vec(0u32..5, 2..5)) {
            prop_assume!(weights.iter().any(|w| *w > 0));
            let total: i64 = weights.iter().map(|w| *w as i64).sum();
            let probs = weights.iter().map(|w| rat(*w as i64, total)).collect();
            let d = ActionDistribution::new(probs).unwrap();
            prop_assert_ne!(d.rotated(), d);
        }
    }
}
