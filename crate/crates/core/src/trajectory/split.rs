use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SplitError {
    #[error("requested {requested} items but the dataset has {available}")]
    InvalidSplit { requested: usize, available: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSplit {
    pub train: Vec<u64>,
    pub dev: Vec<u64>,
    pub test: Vec<u64>,
}

/// Seeded shuffle (ChaCha8, `seed_from_u64`) followed by consecutive cuts.
/// Ids past `train + dev + test` are left out.
pub fn split_dataset(ids: &[u64], sizes: (usize, usize, usize), seed: u64) -> Result<DatasetSplit, SplitError> {
    let (train, dev, test) = sizes;
    let requested = train + dev + test;
    if requested > ids.len() {
        return Err(SplitError::InvalidSplit { requested, available: ids.len() });
    }
    let mut shuffled = ids.to_vec();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut rest = shuffled.into_iter();
    let mut take = |n: usize| rest.by_ref().take(n).collect::<Vec<_>>();
    Ok(DatasetSplit { train: take(train), dev: take(dev), test: take(test) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn full_size_split() {
        let ids: Vec<u64> = (0..5500).collect();
        let s = split_dataset(&ids, (4700, 400, 400), 13).unwrap();
        assert_eq!((s.train.len(), s.dev.len(), s.test.len()), (4700, 400, 400));
        let all: HashSet<u64> = s.train.iter().chain(&s.dev).chain(&s.test).copied().collect();
        assert_eq!(all.len(), 5500);
        assert_eq!(s, split_dataset(&ids, (4700, 400, 400), 13).unwrap());
        assert_ne!(s, split_dataset(&ids, (4700, 400, 400), 14).unwrap());
    }

    #[test]
    fn all_train_and_oversubscription() {
        let ids: Vec<u64> = (0..10).collect();
        let s = split_dataset(&ids, (10, 0, 0), 0).unwrap();
        assert_eq!(s.train.len(), 10);
        assert!(s.dev.is_empty() && s.test.is_empty());
        let ids: Vec<u64> = (0..5500).collect();
        assert_eq!(
            split_dataset(&ids, (6000, 0, 0), 0),
            Err(SplitError::InvalidSplit { requested: 6000, available: 5500 })
        );
    }
}
