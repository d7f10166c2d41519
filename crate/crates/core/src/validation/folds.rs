use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{GlcError, Result};

/// Assignment of every point to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub stratified: bool,
    pub assignments: Vec<usize>,
}

impl FoldPlan {
    /// Shuffles with ChaCha8 seeded by `seed` and deals points round-robin.
    ///
    /// When stratified, each class (in sorted label order) is shuffled and
    /// dealt in turn, the dealing position carrying over from one class to
    /// the next, so both per-class and overall fold sizes differ by at most
    /// one.
    pub fn new(d: &Dataset, k: usize, seed: u64, stratified: bool) -> Result<Self> {
        if k < 2 || k > d.len() {
            return Err(GlcError::InvalidParameter(format!(
                "k must be in 2..={}, got {k}",
                d.len()
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut assignments = vec![0; d.len()];
        let groups: Vec<Vec<usize>> = if stratified {
            let (classes, ids) = d.class_ids();
            (0..classes.len())
                .map(|c| (0..d.len()).filter(|&i| ids[i] == c).collect())
                .collect()
        } else {
            vec![(0..d.len()).collect()]
        };
        let mut offset = 0;
        for mut g in groups {
            g.shuffle(&mut rng);
            for (pos, i) in g.iter().enumerate() {
                assignments[*i] = (offset + pos) % k;
            }
            offset += g.len();
        }
        Ok(FoldPlan {
            k,
            seed,
            stratified,
            assignments,
        })
    }

    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] != fold)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }
}
