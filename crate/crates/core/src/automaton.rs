//! Variable-structure learning automaton whose actions are candidate
//! features.
//!
//! The automaton keeps a probability vector over the active features and
//! follows a linear reward-inaction scheme: on reward every other action
//! loses `step` (floored at zero) and the chosen action absorbs exactly the
//! mass the others lost; on penalty nothing changes.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::FeatureId;
use crate::error::{Error, Result};

/// Environment response. `beta = 0` is a reward, `beta = 1` a penalty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Feedback {
    Reward,
    Penalty,
}

impl Feedback {
    pub fn beta(self) -> u8 {
        match self {
            Feedback::Reward => 0,
            Feedback::Penalty => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Automaton {
    actions: Vec<FeatureId>,
    probabilities: Vec<f64>,
    step: f64,
    threshold: f64,
}

impl Automaton {
    /// Uniform distribution over `actions`.
    pub fn new(mut actions: Vec<FeatureId>, step: f64, threshold: f64) -> Result<Self> {
        if actions.is_empty() {
            return Err(Error::config("automaton needs at least one action"));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::config(format!("step size must be positive, got {step}")));
        }
        if !(threshold > 0.0 && threshold <= 1.0) {
            return Err(Error::config(format!(
                "removal threshold must lie in (0, 1], got {threshold}"
            )));
        }
        actions.sort_unstable();
        actions.dedup();
        let n = actions.len();
        if step >= 1.0 / n as f64 {
            log::warn!("step size {step} is not below 1/{n}; a single reward can zero every other action");
        }
        Ok(Automaton {
            probabilities: vec![1.0 / n as f64; n],
            actions,
            step,
            threshold,
        })
    }

    /// Starts from an explicit distribution instead of the uniform one.
    pub fn with_probabilities(
        actions: Vec<FeatureId>,
        probabilities: Vec<f64>,
        step: f64,
        threshold: f64,
    ) -> Result<Self> {
        if actions.len() != probabilities.len() {
            return Err(Error::Dimension {
                expected: actions.len(),
                found: probabilities.len(),
            });
        }
        if actions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config("actions must be strictly increasing"));
        }
        if probabilities.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::config("probabilities must lie in [0, 1]"));
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::config(format!("probabilities sum to {sum}, not 1")));
        }
        let mut a = Automaton::new(actions, step, threshold)?;
        a.probabilities = probabilities;
        Ok(a)
    }

    pub fn actions(&self) -> &[FeatureId] {
        &self.actions
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn probability(&self, action: FeatureId) -> Option<f64> {
        self.position(action).ok().map(|k| self.probabilities[k])
    }

    fn position(&self, action: FeatureId) -> Result<usize> {
        self.actions
            .binary_search(&action)
            .map_err(|_| Error::UnknownFeature(action))
    }

    /// Draws an action from the current distribution.
    pub fn select_action<R: Rng + ?Sized>(&self, rng: &mut R) -> FeatureId {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut last_positive = 0;
        for (k, &p) in self.probabilities.iter().enumerate() {
            if p <= 0.0 {
                continue;
            }
            last_positive = k;
            acc += p;
            if u < acc {
                return self.actions[k];
            }
        }
        // rounding left u just above the accumulated mass
        self.actions[last_positive]
    }

    /// Reward update for `chosen`:
    ///
    /// ```text
    /// p_j ← max(p_j − step, 0)        for j ≠ i
    /// p_i ← min(1 − Σ_{j≠i} p_j, 1)
    /// ```
    pub fn reward(&mut self, chosen: FeatureId) -> Result<()> {
        let i = self.position(chosen)?;
        let mut others = 0.0;
        for (k, p) in self.probabilities.iter_mut().enumerate() {
            if k != i {
                *p = (*p - self.step).max(0.0);
                others += *p;
            }
        }
        self.probabilities[i] = (1.0 - others).clamp(0.0, 1.0);
        Ok(())
    }

    /// Reward-inaction: a penalty leaves the distribution unchanged.
    pub fn penalty(&mut self) {}

    pub fn update(&mut self, chosen: FeatureId, feedback: Feedback) -> Result<()> {
        match feedback {
            Feedback::Reward => self.reward(chosen),
            Feedback::Penalty => {
                self.position(chosen)?;
                self.penalty();
                Ok(())
            }
        }
    }

    /// Largest probability and its action; ties go to the lowest feature id.
    pub fn max_action(&self) -> (FeatureId, f64) {
        let mut best = 0;
        for k in 1..self.probabilities.len() {
            if self.probabilities[k] > self.probabilities[best] {
                best = k;
            }
        }
        (self.actions[best], self.probabilities[best])
    }

    pub fn max_probability(&self) -> f64 {
        self.max_action().1
    }

    /// The most probable action if its probability has reached the threshold.
    pub fn check_threshold(&self) -> Option<FeatureId> {
        let (action, p) = self.max_action();
        (p >= self.threshold).then_some(action)
    }

    /// Drops `removed` from the action set and resets to uniform.
    pub fn reinitialize(&mut self, removed: FeatureId) -> Result<()> {
        let k = self.position(removed)?;
        if self.actions.len() == 1 {
            return Err(Error::config("cannot remove the last remaining action"));
        }
        self.actions.remove(k);
        let n = self.actions.len();
        self.probabilities = vec![1.0 / n as f64; n];
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ids(n: usize) -> Vec<FeatureId> {
        (1..=n).map(FeatureId).collect()
    }

    fn with_probabilities(p: &[f64], step: f64, threshold: f64) -> Automaton {
        Automaton::with_probabilities(ids(p.len()), p.to_vec(), step, threshold).unwrap()
    }

    #[test]
    fn init_is_uniform() {
        let a = Automaton::new(ids(41), 0.00244, 0.8).unwrap();
        assert!(a.probabilities().iter().all(|&p| p == 1.0 / 41.0));
        assert!((a.probabilities()[0] - 0.02439).abs() < 1e-5);
        let one = Automaton::new(ids(1), 0.1, 0.8).unwrap();
        assert_eq!(one.probabilities(), &[1.0]);
        assert!(Automaton::new(vec![], 0.1, 0.8).is_err());
    }

    #[test]
    fn reward_uniform_four() {
        let mut a = Automaton::new(ids(4), 0.05, 0.8).unwrap();
        a.reward(FeatureId(1)).unwrap();
        let expect = [0.40, 0.20, 0.20, 0.20];
        for (p, e) in a.probabilities().iter().zip(expect) {
            assert!((p - e).abs() < 1e-15, "{p} vs {e}");
        }
    }

    #[test]
    fn reward_clamps_and_caps() {
        let mut a = with_probabilities(&[0.98, 0.01, 0.01], 0.05, 0.8);
        a.reward(FeatureId(1)).unwrap();
        assert_eq!(a.probabilities(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn reward_inactive_action_is_error() {
        let mut a = Automaton::new(ids(3), 0.05, 0.8).unwrap();
        assert!(a.reward(FeatureId(9)).is_err());
    }

    #[test]
    fn threshold_is_inclusive_and_ties_go_low() {
        assert_eq!(
            with_probabilities(&[0.81, 0.19], 0.1, 0.8).check_threshold(),
            Some(FeatureId(1))
        );
        assert_eq!(
            with_probabilities(&[0.8, 0.2], 0.1, 0.8).check_threshold(),
            Some(FeatureId(1))
        );
        assert_eq!(Automaton::new(ids(41), 0.1, 0.8).unwrap().check_threshold(), None);
        assert_eq!(
            with_probabilities(&[0.5, 0.5], 0.1, 0.5).check_threshold(),
            Some(FeatureId(1))
        );
    }

    #[test]
    fn explicit_distribution_is_validated() {
        assert!(Automaton::with_probabilities(ids(2), vec![0.5, 0.6], 0.1, 0.8).is_err());
        assert!(Automaton::with_probabilities(ids(2), vec![1.5, -0.5], 0.1, 0.8).is_err());
        assert!(Automaton::with_probabilities(ids(3), vec![0.5, 0.5], 0.1, 0.8).is_err());
        assert!(
            Automaton::with_probabilities(vec![FeatureId(2), FeatureId(1)], vec![0.5, 0.5], 0.1, 0.8)
                .is_err()
        );
    }

    #[test]
    fn penalty_changes_nothing() {
        let mut a = Automaton::new(ids(5), 0.05, 0.8).unwrap();
        let before = a.clone();
        for _ in 0..100 {
            a.penalty();
        }
        assert_eq!(a, before);

        let mut b = before.clone();
        b.update(FeatureId(2), Feedback::Penalty).unwrap();
        b.reward(FeatureId(2)).unwrap();
        let mut c = before;
        c.reward(FeatureId(2)).unwrap();
        assert_eq!(b, c);
    }

    #[test]
    fn reinitialize_removes_and_resets() {
        let mut a = Automaton::new(ids(41), 0.00244, 0.8).unwrap();
        a.reward(FeatureId(7)).unwrap();
        a.reinitialize(FeatureId(7)).unwrap();
        assert_eq!(a.len(), 40);
        assert!(!a.actions().contains(&FeatureId(7)));
        assert!(a.probabilities().iter().all(|&p| p == 0.025));

        let mut two = Automaton::new(ids(2), 0.1, 0.8).unwrap();
        two.reinitialize(FeatureId(1)).unwrap();
        assert_eq!(two.actions(), &[FeatureId(2)]);
        assert_eq!(two.probabilities(), &[1.0]);
        assert!(two.reinitialize(FeatureId(2)).is_err());
    }

    #[test]
    fn select_action_edge_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let one = Automaton::new(vec![FeatureId(17)], 0.1, 0.8).unwrap();
        assert_eq!(one.select_action(&mut rng), FeatureId(17));
        let skewed = with_probabilities(&[0.0, 1.0], 0.1, 0.8);
        for _ in 0..1000 {
            assert_eq!(skewed.select_action(&mut rng), FeatureId(2));
        }
    }

    #[test]
    fn select_action_frequencies() {
        // 99% binomial bound at n = 1e4, p = 0.5 is about ±0.013
        let a = with_probabilities(&[0.5, 0.5], 0.1, 0.8);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 10_000;
        let first = (0..n)
            .filter(|_| a.select_action(&mut rng) == FeatureId(1))
            .count();
        let freq = first as f64 / n as f64;
        assert!((freq - 0.5).abs() <= 0.02, "{freq}");
    }

    #[test]
    fn select_reports_original_ids_after_removal() {
        let mut a = Automaton::new(vec![FeatureId(3), FeatureId(10), FeatureId(40)], 0.1, 0.8).unwrap();
        a.reinitialize(FeatureId(10)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let id = a.select_action(&mut rng);
            assert!(id == FeatureId(3) || id == FeatureId(40));
        }
    }

    proptest! {
        #[test]
        fn reward_is_monotone_and_conserves_mass(
            n in 2usize..30,
            step in 1e-4f64..0.2,
            picks in proptest::collection::vec(0usize..30, 1..60),
        ) {
            let mut a = Automaton::new(ids(n), step, 1.0).unwrap();
            for pick in picks {
                let chosen = FeatureId(pick % n + 1);
                let before = a.probabilities().to_vec();
                a.reward(chosen).unwrap();
                let after = a.probabilities();
                let i = chosen.0 - 1;
                prop_assert!(after[i] >= before[i]);
                let mut lost = 0.0;
                for k in 0..n {
                    if k != i {
                        prop_assert!(after[k] <= before[k]);
                        lost += before[k] - after[k];
                    }
                }
                prop_assert!(((after[i] - before[i]) - lost).abs() < 1e-12);
                let sum: f64 = after.iter().sum();
                prop_assert!((sum - 1.0).abs() < 1e-9);
            }
        }
    }
}
