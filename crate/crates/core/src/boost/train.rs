use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::tree::{GrowParams, RegressionTree, SplitCriterion};
use super::{BoostError, FeatureMatrix};
use crate::math::{exp, ln, ln_1p, sigmoid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub n_trees: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub min_samples_leaf: usize,
    pub lambda: f64,
    pub gamma: f64,
    pub seed: u64,
    pub early_window_fraction: f64,
    pub session_gap_cap_seconds: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            n_trees: 50,
            max_depth: 3,
            learning_rate: 0.1,
            min_samples_leaf: 5,
            lambda: 1.0,
            gamma: 0.0,
            seed: 42,
            early_window_fraction: 0.1,
            session_gap_cap_seconds: 1800.0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), BoostError> {
        if self.n_trees == 0 {
            return Err(BoostError::InvalidConfig("n_trees must be at least 1"));
        }
        if self.max_depth == 0 {
            return Err(BoostError::InvalidConfig("max_depth must be at least 1"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(BoostError::InvalidConfig("learning_rate must be in (0, 1]"));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) || !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(BoostError::InvalidConfig(
                "lambda and gamma must be finite and non-negative",
            ));
        }
        if !(self.early_window_fraction > 0.0 && self.early_window_fraction < 1.0) {
            return Err(BoostError::InvalidConfig("early_window_fraction must be in (0, 1)"));
        }
        if self.session_gap_cap_seconds.is_nan() || self.session_gap_cap_seconds < 0.0 {
            return Err(BoostError::InvalidConfig(
                "session_gap_cap_seconds must be non-negative",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Gradient boosting with variance-reduction splits and Newton leaves.
    FirstOrder,
    /// Second-order boosting with L2-regularized leaves and a split gain threshold.
    SecondOrder,
}

impl Variant {
    pub const fn as_str(self) -> &'static str {
        match self {
            Variant::FirstOrder => "first_order",
            Variant::SecondOrder => "second_order",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostedModel {
    pub variant: Variant,
    pub base_score: f64,
    pub learning_rate: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub n_features: usize,
    pub trees: Vec<RegressionTree>,
}

impl BoostedModel {
    /// Checks a model read from outside before it is used for prediction.
    pub fn validate(&self) -> Result<(), BoostError> {
        if !self.base_score.is_finite() {
            return Err(BoostError::InvalidModel("base_score must be finite"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(BoostError::InvalidModel("learning_rate must be in (0, 1]"));
        }
        if self.lambda.is_nan() || self.gamma.is_nan() || self.lambda < 0.0 || self.gamma < 0.0 {
            return Err(BoostError::InvalidModel("lambda and gamma must be non-negative"));
        }
        if self.trees.iter().any(|t| !t.is_well_formed(self.n_features)) {
            return Err(BoostError::InvalidModel("malformed tree"));
        }
        Ok(())
    }

    /// `base_score + learning_rate * sum of tree outputs`.
    pub fn raw_score(&self, x: &[f64]) -> f64 {
        self.base_score + self.learning_rate * self.trees.iter().map(|t| t.predict(x)).sum::<f64>()
    }
}

/// Logistic loss of label `y` at raw score `f`, computed without overflow.
pub fn logistic_loss(y: bool, f: f64) -> f64 {
    // -[y ln p + (1-y) ln(1-p)] with p = sigmoid(f) is softplus(f) - y f.
    let softplus = if f > 0.0 { f + ln_1p(exp(-f)) } else { ln_1p(exp(f)) };
    if y {
        softplus - f
    } else {
        softplus
    }
}

/// Gradient and hessian of [`logistic_loss`] with respect to the raw score.
pub fn logistic_grad_hess(y: bool, f: f64) -> (f64, f64) {
    let p = sigmoid(f);
    (p - if y { 1.0 } else { 0.0 }, p * (1.0 - p))
}

pub fn mean_logistic_loss(y: &[bool], scores: &[f64]) -> f64 {
    y.iter().zip(scores).map(|(&y, &f)| logistic_loss(y, f)).sum::<f64>() / y.len() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub model: BoostedModel,
    /// Mean training loss before the first tree and after each tree.
    pub loss_history: Vec<f64>,
}

const MAX_BACKTRACK: usize = 30;
const LOSS_TOLERANCE: f64 = 1e-12;

/// Fits a boosted ensemble.
///
/// A tree whose step would raise training loss has its leaves halved until
/// it no longer does; after [`MAX_BACKTRACK`] halvings its leaves are zeroed.
pub fn train(
    x: &FeatureMatrix,
    y: &[bool],
    config: &TrainConfig,
    variant: Variant,
) -> Result<TrainOutcome, BoostError> {
    config.validate()?;
    let n = x.n_rows();
    if n != y.len() {
        return Err(BoostError::LabelCount {
            rows: n,
            labels: y.len(),
        });
    }
    if n < 2 {
        return Err(BoostError::TooFewSamples(n));
    }
    let positives = y.iter().filter(|&&v| v).count();
    if positives == 0 || positives == n {
        return Err(BoostError::SingleClass);
    }

    let p_bar = positives as f64 / n as f64;
    let base_score = ln(p_bar / (1.0 - p_bar));
    let criterion = match variant {
        Variant::FirstOrder => SplitCriterion::Variance,
        Variant::SecondOrder => SplitCriterion::Regularized {
            lambda: config.lambda,
            gamma: config.gamma,
        },
    };
    let params = GrowParams {
        max_depth: config.max_depth,
        min_samples_leaf: config.min_samples_leaf,
        criterion,
    };

    let mut scores = vec![base_score; n];
    let mut loss = mean_logistic_loss(y, &scores);
    let mut loss_history = vec![loss];
    let mut trees = Vec::with_capacity(config.n_trees);
    let mut grad = vec![0.0; n];
    let mut hess = vec![0.0; n];
    let mut trial = vec![0.0; n];
    for _ in 0..config.n_trees {
        for i in 0..n {
            (grad[i], hess[i]) = logistic_grad_hess(y[i], scores[i]);
        }
        let mut tree = RegressionTree::grow(x, &grad, &hess, params);
        let outputs: Vec<f64> = (0..n).map(|i| tree.predict(x.row(i))).collect();
        let mut factor = 1.0;
        let mut accepted = false;
        for _ in 0..=MAX_BACKTRACK {
            for i in 0..n {
                trial[i] = scores[i] + config.learning_rate * factor * outputs[i];
            }
            let trial_loss = mean_logistic_loss(y, &trial);
            if trial_loss <= loss {
                loss = trial_loss;
                accepted = true;
                break;
            }
            factor *= 0.5;
        }
        if accepted {
            if factor != 1.0 {
                tree.scale_leaves(factor);
            }
            core::mem::swap(&mut scores, &mut trial);
        } else {
            tree.scale_leaves(0.0);
        }
        assert!(
            loss <= loss_history[loss_history.len() - 1] + LOSS_TOLERANCE,
            "training loss increased"
        );
        loss_history.push(loss);
        trees.push(tree);
    }

    Ok(TrainOutcome {
        model: BoostedModel {
            variant,
            base_score,
            learning_rate: config.learning_rate,
            lambda: config.lambda,
            gamma: config.gamma,
            n_features: x.n_cols(),
            trees,
        },
        loss_history,
    })
}

pub fn train_first_order(x: &FeatureMatrix, y: &[bool], config: &TrainConfig) -> Result<BoostedModel, BoostError> {
    train(x, y, config, Variant::FirstOrder).map(|o| o.model)
}

pub fn train_second_order(x: &FeatureMatrix, y: &[bool], config: &TrainConfig) -> Result<BoostedModel, BoostError> {
    train(x, y, config, Variant::SecondOrder).map(|o| o.model)
}

/// Probability of the positive class, strictly inside `(0, 1)`.
pub fn predict(model: &BoostedModel, x: &[f64]) -> Result<f64, BoostError> {
    if x.len() != model.n_features {
        return Err(BoostError::DimensionMismatch {
            expected: model.n_features,
            got: x.len(),
        });
    }
    let p = sigmoid(model.raw_score(x));
    Ok(p.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0))
}
