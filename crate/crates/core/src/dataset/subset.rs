//! Stratified subset sampling: a quota of normal rows, a quota of DoS rows,
//! and every row of the minority classes.

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SubsetSpec {
    pub normal_quota: usize,
    pub dos_quota: usize,
    pub include_minority: bool,
}

impl Default for SubsetSpec {
    fn default() -> Self {
        SubsetSpec {
            normal_quota: 5000,
            dos_quota: 5000,
            include_minority: true,
        }
    }
}

pub fn sample_subset<R: Rng + ?Sized>(dataset: &Dataset, spec: &SubsetSpec, rng: &mut R) -> Dataset {
    let mut by_class: [Vec<usize>; 5] = Default::default();
    for (i, &l) in dataset.labels().iter().enumerate() {
        by_class[l as usize].push(i);
    }

    let mut rows = Vec::new();
    for (class, quota) in [(0, spec.normal_quota), (1, spec.dos_quota)] {
        let pool = &by_class[class];
        if pool.len() <= quota {
            if pool.len() < quota {
                log::info!(
                    "class {class}: quota {quota} exceeds {} available rows, taking all",
                    pool.len()
                );
            }
            rows.extend_from_slice(pool);
        } else {
            rows.extend(index::sample(rng, pool.len(), quota).into_iter().map(|k| pool[k]));
        }
    }
    if spec.include_minority {
        for pool in &by_class[2..] {
            rows.extend_from_slice(pool);
        }
    }
    rows.shuffle(rng);
    dataset.select_rows(&rows)
}

/// `r` independently drawn subsets, each from its own derived seed.
#[derive(Debug, Clone)]
pub struct SubsetPool {
    pub subsets: Vec<Dataset>,
    pub seeds: Vec<u64>,
}

impl SubsetPool {
    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }
}

pub fn build_subset_pool<R: Rng + ?Sized>(
    dataset: &Dataset,
    r: usize,
    spec: &SubsetSpec,
    rng: &mut R,
) -> Result<SubsetPool> {
    if r < 2 {
        return Err(Error::config(format!(
            "subset pool needs at least 2 members, got {r}"
        )));
    }
    let mut seeds: Vec<u64> = Vec::with_capacity(r);
    while seeds.len() < r {
        let s = rng.random();
        if !seeds.contains(&s) {
            seeds.push(s);
        }
    }
    let subsets = seeds
        .iter()
        .map(|&s| sample_subset(dataset, spec, &mut ChaCha8Rng::seed_from_u64(s)))
        .collect();
    Ok(SubsetPool { subsets, seeds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::NUM_CLASSES;
    use crate::matrix::Matrix;

    fn with_counts(counts: [usize; NUM_CLASSES]) -> Dataset {
        let labels: Vec<u8> = counts
            .iter()
            .enumerate()
            .flat_map(|(c, &n)| std::iter::repeat_n(c as u8, n))
            .collect();
        let rows: Vec<[f64; 1]> = (0..labels.len()).map(|i| [i as f64]).collect();
        Dataset::with_default_ids(Matrix::from_rows(&rows).unwrap(), labels).unwrap()
    }

    #[test]
    fn default_quotas_produce_expected_row_count() {
        let ds = with_counts([6000, 7000, 52, 1126, 4107]);
        let sub = sample_subset(&ds, &SubsetSpec::default(), &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(sub.n_rows(), 5000 + 5000 + 52 + 1126 + 4107);
        assert_eq!(sub.class_counts(), [5000, 5000, 52, 1126, 4107]);
        // sampled without replacement
        let mut ids: Vec<u64> = sub.features().column(0).map(|v| v as u64).collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), sub.n_rows());
    }

    #[test]
    fn shortfall_takes_all_available() {
        let ds = with_counts([3, 10, 0, 0, 0]);
        let sub = sample_subset(&ds, &SubsetSpec::default(), &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(sub.class_counts(), [3, 10, 0, 0, 0]);
    }

    #[test]
    fn same_seed_same_subset() {
        let ds = with_counts([100, 100, 5, 5, 5]);
        let spec = SubsetSpec {
            normal_quota: 10,
            dos_quota: 20,
            include_minority: true,
        };
        let a = sample_subset(&ds, &spec, &mut ChaCha8Rng::seed_from_u64(11));
        let b = sample_subset(&ds, &spec, &mut ChaCha8Rng::seed_from_u64(11));
        assert_eq!(a, b);
    }

    #[test]
    fn pool_sizes_and_seeds() {
        let ds = with_counts([50, 50, 2, 2, 2]);
        let spec = SubsetSpec {
            normal_quota: 10,
            dos_quota: 10,
            include_minority: true,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pool = build_subset_pool(&ds, 10, &spec, &mut rng).unwrap();
        assert_eq!(pool.len(), 10);
        let mut seeds = pool.seeds.clone();
        seeds.sort_unstable();
        seeds.dedup();
        assert_eq!(seeds.len(), 10);

        assert_eq!(build_subset_pool(&ds, 2, &spec, &mut rng).unwrap().len(), 2);
        assert!(matches!(
            build_subset_pool(&ds, 1, &spec, &mut rng),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn excluding_minority_drops_classes_two_to_four() {
        let ds = with_counts([5, 5, 5, 5, 5]);
        let spec = SubsetSpec {
            normal_quota: 2,
            dos_quota: 2,
            include_minority: false,
        };
        let sub = sample_subset(&ds, &spec, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(sub.class_counts(), [2, 2, 0, 0, 0]);
    }
}
