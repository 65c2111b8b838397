use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::train::{predict, train, TrainConfig, Variant};
use super::{BoostError, FeatureMatrix};

pub const N_FOLDS: usize = 5;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub true_positive: usize,
    pub false_positive: usize,
    pub true_negative: usize,
    pub false_negative: usize,
}

impl Confusion {
    fn record(&mut self, actual: bool, predicted: bool) {
        match (actual, predicted) {
            (true, true) => self.true_positive += 1,
            (false, true) => self.false_positive += 1,
            (false, false) => self.true_negative += 1,
            (true, false) => self.false_negative += 1,
        }
    }

    fn add(&mut self, o: &Confusion) {
        self.true_positive += o.true_positive;
        self.false_positive += o.false_positive;
        self.true_negative += o.true_negative;
        self.false_negative += o.false_negative;
    }

    pub fn total(&self) -> usize {
        self.true_positive + self.false_positive + self.true_negative + self.false_negative
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub n_test: usize,
    pub accuracy: f64,
    pub confusion: Confusion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub variant: Variant,
    pub n_folds: usize,
    pub seed: u64,
    pub n_samples: usize,
    pub n_positive: usize,
    /// Mean of the per-fold accuracies.
    pub accuracy: f64,
    pub folds: Vec<FoldResult>,
    pub confusion: Confusion,
}

/// Stratified fold index for every sample.
///
/// Each class is shuffled separately and dealt round-robin, the negatives
/// continuing where the positives stopped so fold sizes differ by at most one.
pub fn fold_assignment(y: &[bool], seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos: Vec<usize> = (0..y.len()).filter(|&i| y[i]).collect();
    let mut neg: Vec<usize> = (0..y.len()).filter(|&i| !y[i]).collect();
    pos.shuffle(&mut rng);
    neg.shuffle(&mut rng);
    let mut fold = vec![0; y.len()];
    for (k, &i) in pos.iter().chain(&neg).enumerate() {
        fold[i] = k % N_FOLDS;
    }
    fold
}

/// Stratified 5-fold cross-validated accuracy at threshold 0.5.
pub fn evaluate(
    x: &FeatureMatrix,
    y: &[bool],
    config: &TrainConfig,
    variant: Variant,
) -> Result<AccuracyReport, BoostError> {
    config.validate()?;
    if x.n_rows() != y.len() {
        return Err(BoostError::LabelCount {
            rows: x.n_rows(),
            labels: y.len(),
        });
    }
    let positives = y.iter().filter(|&&v| v).count();
    let negatives = y.len() - positives;
    if positives < N_FOLDS || negatives < N_FOLDS {
        return Err(BoostError::InsufficientClass {
            positives,
            negatives,
            min: N_FOLDS,
        });
    }

    let fold_of = fold_assignment(y, config.seed);
    let mut folds = Vec::with_capacity(N_FOLDS);
    let mut confusion = Confusion::default();
    for fold in 0..N_FOLDS {
        let (test, train_idx): (Vec<usize>, Vec<usize>) = (0..y.len()).partition(|&i| fold_of[i] == fold);
        let x_train = x.select(&train_idx);
        let y_train: Vec<bool> = train_idx.iter().map(|&i| y[i]).collect();
        let model = train(&x_train, &y_train, config, variant)?.model;
        let mut c = Confusion::default();
        for &i in &test {
            c.record(y[i], predict(&model, x.row(i))? >= 0.5);
        }
        confusion.add(&c);
        folds.push(FoldResult {
            fold,
            n_test: test.len(),
            accuracy: (c.true_positive + c.true_negative) as f64 / test.len() as f64,
            confusion: c,
        });
    }
    let accuracy = folds.iter().map(|f| f.accuracy).sum::<f64>() / N_FOLDS as f64;
    Ok(AccuracyReport {
        variant,
        n_folds: N_FOLDS,
        seed: config.seed,
        n_samples: y.len(),
        n_positive: positives,
        accuracy,
        folds,
        confusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn folds_are_stratified() {
        let y: Vec<bool> = (0..53).map(|i| i % 4 == 0).collect();
        let f = fold_assignment(&y, 7);
        for k in 0..N_FOLDS {
            let members: Vec<usize> = (0..y.len()).filter(|&i| f[i] == k).collect();
            let pos = members.iter().filter(|&&i| y[i]).count();
            assert!((10..=11).contains(&members.len()));
            assert!((2..=3).contains(&pos));
        }
        assert_eq!(f, fold_assignment(&y, 7));
        assert_ne!(f, fold_assignment(&y, 8));
    }

    fn dataset(n: usize, separable: bool, seed: u64) -> (FeatureMatrix, Vec<bool>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for i in 0..n {
            let label = i % 3 == 0;
            let a: f64 = rng.random();
            let b: f64 = rng.random();
            let shift = if separable && label { 2.0 } else { 0.0 };
            rows.push([a + shift, b]);
            y.push(if separable { label } else { rng.random::<bool>() });
        }
        (FeatureMatrix::from_rows(&rows).unwrap(), y)
    }

    #[test]
    fn separable_data_is_learned() {
        let (x, y) = dataset(150, true, 1);
        for v in [Variant::FirstOrder, Variant::SecondOrder] {
            let r = evaluate(&x, &y, &TrainConfig::default(), v).unwrap();
            assert!(r.accuracy >= 0.98, "{v:?}: {}", r.accuracy);
            assert_eq!(r.confusion.total(), 150);
        }
    }

    #[test]
    fn random_labels_near_chance() {
        let (x, y) = dataset(400, false, 2);
        let r = evaluate(&x, &y, &TrainConfig::default(), Variant::SecondOrder).unwrap();
        assert!((r.accuracy - 0.5).abs() <= 0.1, "{}", r.accuracy);
    }

    #[test]
    fn small_class_rejected() {
        let x = FeatureMatrix::new((0..20).map(f64::from).collect(), 1).unwrap();
        let y: Vec<bool> = (0..20).map(|i| i < 4).collect();
        assert_eq!(
            evaluate(&x, &y, &TrainConfig::default(), Variant::FirstOrder),
            Err(BoostError::InsufficientClass {
                positives: 4,
                negatives: 16,
                min: 5
            })
        );
    }
}
