//! Trainable model families for the synthetic task.
//!
//! The default is multinomial logistic regression (convex, fast). A
//! one-hidden-layer MLP built on the dense-net module exercises the
//! non-convex path with the same interface.

use ndarray::ArrayView1;

use crate::fl::data::{SyntheticDataset, N_CLASSES, N_FEATURES};
use crate::nn::{DenseNet, ParamVector};
use crate::rng::Stream;

/// A differentiable classifier over the synthetic dataset.
pub trait FlTask {
    fn param_len(&self) -> usize;

    fn init_params(&self, rng: &mut Stream) -> ParamVector;

    /// Mean cross-entropy loss and its gradient over the given rows.
    fn loss_and_grad(&self, w: &[f64], data: &SyntheticDataset, rows: &[usize]) -> (f64, Vec<f64>);

    /// Per-class scores for one sample; argmax is the prediction.
    fn scores(&self, w: &[f64], x: ArrayView1<f64>) -> Vec<f64>;
}

fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Multinomial logistic regression: scores = Wx + b.
/// Parameter layout: W row-major (C x F), then b (C).
#[derive(Debug, Clone, Copy, Default)]
pub struct LogisticTask;

impl FlTask for LogisticTask {
    fn param_len(&self) -> usize {
        N_CLASSES * (N_FEATURES + 1)
    }

    fn init_params(&self, _rng: &mut Stream) -> ParamVector {
        // Zero start: symmetric, gives exact chance-level argmax ties.
        ParamVector::zeros(self.param_len())
    }

    fn loss_and_grad(&self, w: &[f64], data: &SyntheticDataset, rows: &[usize]) -> (f64, Vec<f64>) {
        let mut grad = vec![0.0; self.param_len()];
        let mut loss = 0.0;
        let inv = 1.0 / rows.len() as f64;
        for &r in rows {
            let x = data.features.row(r);
            let y = data.labels[r];
            let scores = self.scores(w, x);
            let probs = softmax(&scores);
            loss -= (probs[y].max(1e-300)).ln() * inv;
            for c in 0..N_CLASSES {
                let d = (probs[c] - if c == y { 1.0 } else { 0.0 }) * inv;
                let row_off = c * N_FEATURES;
                for f in 0..N_FEATURES {
                    grad[row_off + f] += d * x[f];
                }
                grad[N_CLASSES * N_FEATURES + c] += d;
            }
        }
        (loss, grad)
    }

    fn scores(&self, w: &[f64], x: ArrayView1<f64>) -> Vec<f64> {
        (0..N_CLASSES)
            .map(|c| {
                let row = &w[c * N_FEATURES..(c + 1) * N_FEATURES];
                let bias = w[N_CLASSES * N_FEATURES + c];
                row.iter().zip(x.iter()).map(|(wi, xi)| wi * xi).sum::<f64>() + bias
            })
            .collect()
    }
}

/// One-hidden-layer MLP (tanh) over the same data.
#[derive(Debug, Clone)]
pub struct MlpTask {
    template: DenseNet,
}

impl MlpTask {
    pub fn new(hidden: usize) -> Self {
        MlpTask {
            template: DenseNet::zeros(vec![N_FEATURES, hidden, N_CLASSES]),
        }
    }

    fn with_params(&self, w: &[f64]) -> DenseNet {
        let mut net = self.template.clone();
        net.params.values.copy_from_slice(w);
        net
    }
}

impl FlTask for MlpTask {
    fn param_len(&self) -> usize {
        self.template.params.len()
    }

    fn init_params(&self, rng: &mut Stream) -> ParamVector {
        DenseNet::init(self.template.layer_sizes().to_vec(), rng).params
    }

    fn loss_and_grad(&self, w: &[f64], data: &SyntheticDataset, rows: &[usize]) -> (f64, Vec<f64>) {
        let net = self.with_params(w);
        let mut grad = vec![0.0; self.param_len()];
        let mut loss = 0.0;
        let inv = 1.0 / rows.len() as f64;
        for &r in rows {
            let x: Vec<f64> = data.features.row(r).to_vec();
            let y = data.labels[r];
            let cache = net.forward_cached(&x).expect("row matches input width");
            let probs = softmax(cache.output());
            loss -= (probs[y].max(1e-300)).ln() * inv;
            let upstream: Vec<f64> = probs
                .iter()
                .enumerate()
                .map(|(c, p)| (p - if c == y { 1.0 } else { 0.0 }) * inv)
                .collect();
            let (g, _) = net.backward(&cache, &upstream).expect("shapes match");
            for (gi, gv) in grad.iter_mut().zip(g) {
                *gi += gv;
            }
        }
        (loss, grad)
    }

    fn scores(&self, w: &[f64], x: ArrayView1<f64>) -> Vec<f64> {
        let net = self.with_params(w);
        net.forward(&x.to_vec()).expect("row matches input width")
    }
}
