//! Training loop: relative-L2 loss, Adam, step learning-rate schedule.
//!
//! The loop is deterministic in the seed: shuffling uses a seeded stream and
//! batch gradients are reduced in sample order regardless of how many
//! threads computed them.

use ndarray::{Array1, Array2, ArrayView2, ArrayView3};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::adam::Adam;
use super::OperatorModel;
use crate::error::{Error, Result};

/// ‖pred − truth‖₂ / ‖truth‖₂
pub fn relative_l2(pred: &[f64], truth: &[f64]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::Shape(format!(
            "prediction length {} vs truth length {}",
            pred.len(),
            truth.len()
        )));
    }
    let norm: f64 = truth.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::DegenerateTarget);
    }
    let diff: f64 = pred
        .iter()
        .zip(truth)
        .map(|(p, t)| (p - t) * (p - t))
        .sum::<f64>()
        .sqrt();
    Ok(diff / norm)
}

/// Mean relative L2 over rows of two equally shaped stacks.
pub fn relative_l2_batch(pred: &Array2<f64>, truth: &Array2<f64>) -> Result<f64> {
    if pred.dim() != truth.dim() {
        return Err(Error::Shape("batch shape mismatch".into()));
    }
    let mut total = 0.0;
    for (p, t) in pred.outer_iter().zip(truth.outer_iter()) {
        total += relative_l2(p.as_slice().unwrap(), t.as_slice().unwrap())?;
    }
    Ok(total / pred.nrows() as f64)
}

#[derive(Debug, Clone, Copy)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    /// initial learning rate
    pub lr: f64,
    /// decay factor applied every `step` epochs
    pub gamma: f64,
    pub step: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 500,
            batch_size: 20,
            lr: 1e-3,
            gamma: 0.5,
            step: 100,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub train_rel_l2: f64,
    pub test_rel_l2: f64,
    pub lr: f64,
    pub wall_seconds: f64,
}

/// Paired input/output samples; 1-D stacks are (n, len), 2-D stacks are
/// (n, r, r).
#[derive(Clone, Copy)]
pub enum SamplePairs<'a> {
    One {
        inputs: ArrayView2<'a, f64>,
        outputs: ArrayView2<'a, f64>,
    },
    Two {
        inputs: ArrayView3<'a, f64>,
        outputs: ArrayView3<'a, f64>,
    },
}

impl<'a> SamplePairs<'a> {
    pub fn len(&self) -> usize {
        match self {
            SamplePairs::One { inputs, .. } => inputs.nrows(),
            SamplePairs::Two { inputs, .. } => inputs.dim().0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// loss plus parameter gradient of the mean relative-L2 over one sample
fn sample_loss_grad(
    model: &OperatorModel,
    data: &SamplePairs<'_>,
    index: usize,
) -> Result<(f64, Vec<f64>)> {
    match data {
        SamplePairs::One { inputs, outputs } => {
            let x: Array1<f64> = inputs.row(index).to_owned();
            let y = outputs.row(index);
            let (pred, trace) = model.forward_traced(&x)?;
            let loss = relative_l2(pred.as_slice().unwrap(), y.as_slice().unwrap())?;
            let norm_t: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            let diff = &pred - &y.to_owned();
            let norm_d: f64 = diff.iter().map(|v| v * v).sum::<f64>().sqrt();
            let upstream = if norm_d == 0.0 {
                Array1::zeros(pred.len())
            } else {
                diff / (norm_d * norm_t)
            };
            let (grads, _) = model.backward_from_trace(&trace, &upstream);
            Ok((loss, grads))
        }
        SamplePairs::Two { inputs, outputs } => {
            let x = inputs.index_axis(ndarray::Axis(0), index).to_owned();
            let y = outputs.index_axis(ndarray::Axis(0), index).to_owned();
            let (pred, trace) = model.forward_traced_2d(&x)?;
            let loss = relative_l2(
                pred.as_slice().unwrap(),
                y.as_slice().expect("contiguous sample"),
            )?;
            let norm_t: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            let diff = &pred - &y;
            let norm_d: f64 = diff.iter().map(|v| v * v).sum::<f64>().sqrt();
            let upstream = if norm_d == 0.0 {
                ndarray::Array2::zeros(pred.dim())
            } else {
                diff / (norm_d * norm_t)
            };
            let (grads, _) = model.backward_from_trace_2d(&trace, &upstream);
            Ok((loss, grads))
        }
    }
}

fn sample_loss(model: &OperatorModel, data: &SamplePairs<'_>, index: usize) -> Result<f64> {
    match data {
        SamplePairs::One { inputs, outputs } => {
            let x: Array1<f64> = inputs.row(index).to_owned();
            let pred = model.forward(&x)?;
            relative_l2(
                pred.as_slice().unwrap(),
                outputs.row(index).as_slice().unwrap(),
            )
        }
        SamplePairs::Two { inputs, outputs } => {
            let x = inputs.index_axis(ndarray::Axis(0), index).to_owned();
            let pred = model.forward_2d(&x)?;
            let y = outputs.index_axis(ndarray::Axis(0), index);
            relative_l2(pred.as_slice().unwrap(), y.to_owned().as_slice().unwrap())
        }
    }
}

/// Mean relative L2 of the model over a sample set.
pub fn evaluate(model: &OperatorModel, data: &SamplePairs<'_>) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::InvalidSpec("empty evaluation set".into()));
    }
    let losses: Result<Vec<f64>> = (0..data.len())
        .into_par_iter()
        .map(|i| sample_loss(model, data, i))
        .collect();
    let losses = losses?;
    Ok(losses.iter().sum::<f64>() / losses.len() as f64)
}

/// Train in place; returns the per-epoch metric history.
pub fn train(
    model: &mut OperatorModel,
    train_data: SamplePairs<'_>,
    test_data: SamplePairs<'_>,
    cfg: &TrainConfig,
) -> Result<Vec<EpochMetrics>> {
    if train_data.is_empty() {
        return Err(Error::InvalidSpec("empty training set".into()));
    }
    let n = train_data.len();
    let batch = cfg.batch_size.max(1).min(n);
    let mut adam = Adam::new(model.parameter_count());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut history = Vec::with_capacity(cfg.epochs);
    let started = std::time::Instant::now();

    for epoch in 0..cfg.epochs {
        let lr = cfg.lr * cfg.gamma.powi((epoch / cfg.step.max(1)) as i32);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);

        let mut loss_sum = 0.0;
        for chunk in order.chunks(batch) {
            let results: Result<Vec<(f64, Vec<f64>)>> = chunk
                .par_iter()
                .map(|&i| sample_loss_grad(model, &train_data, i))
                .collect();
            let results = results?;
            let mut grad = vec![0.0; model.parameter_count()];
            let scale = 1.0 / chunk.len() as f64;
            for (loss, g) in &results {
                loss_sum += loss;
                for (acc, v) in grad.iter_mut().zip(g) {
                    *acc += v * scale;
                }
            }
            adam.step(model.params_mut(), &grad, lr);
        }
        let train_loss = loss_sum / n as f64;
        if !train_loss.is_finite() {
            return Err(Error::Divergence { epoch });
        }
        let test_loss = if test_data.is_empty() {
            f64::NAN
        } else {
            evaluate(model, &test_data)?
        };
        history.push(EpochMetrics {
            epoch,
            train_rel_l2: train_loss,
            test_rel_l2: test_loss,
            lr,
            wall_seconds: started.elapsed().as_secs_f64(),
        });
    }
    Ok(history)
}
