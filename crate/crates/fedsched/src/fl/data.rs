//! Synthetic classification data with a tunable Non-IID partition.
//!
//! Samples are Gaussian class-conditional clusters. Each user's shard draws a
//! `noniid_ratio` fraction from one dominant class (assigned round-robin over
//! classes across users) and the rest uniformly from the other classes. A
//! separate balanced held-out set, 20% of the combined total, serves accuracy
//! evaluation.

use ndarray::Array2;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::config::SimConfig;
use crate::rng::Stream;

pub const N_CLASSES: usize = 10;
pub const N_FEATURES: usize = 32;

/// Spread of the class means around the origin.
const CLASS_MEAN_SCALE: f64 = 1.0;
/// Per-feature noise around the class mean. Sets the task difficulty.
const SAMPLE_NOISE_STD: f64 = 1.6;

#[derive(Debug, Clone)]
pub struct SyntheticDataset {
    /// All samples, training shards first, held-out rows last.
    pub features: Array2<f64>,
    pub labels: Vec<usize>,
    /// Per-user row-index lists; disjoint, covering the training rows.
    pub shards: Vec<Vec<usize>>,
    /// Row indices of the balanced held-out evaluation set.
    pub held_out: Vec<usize>,
}

impl SyntheticDataset {
    pub fn shard_sizes(&self) -> Vec<usize> {
        self.shards.iter().map(|s| s.len()).collect()
    }
}

/// Generates shards per the Non-IID rule. With `a = 0` (or shards small
/// enough that `floor(a*D_n) = 0`) classes are drawn uniformly, the IID case.
pub fn generate_noniid(cfg: &SimConfig, rng: &mut Stream) -> SyntheticDataset {
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut means = Array2::<f64>::zeros((N_CLASSES, N_FEATURES));
    for v in means.iter_mut() {
        *v = CLASS_MEAN_SCALE * normal.sample(rng);
    }

    let [lo, hi] = cfg.samples_range;
    let shard_sizes: Vec<usize> = (0..cfg.n_users).map(|_| rng.random_range(lo..=hi)).collect();
    let train_total: usize = shard_sizes.iter().sum();
    // 20% of the combined pool: held/(held+train) = 1/5.
    let held_count = (train_total as f64 / 4.0).round() as usize;
    let total = train_total + held_count;

    let mut features = Array2::<f64>::zeros((total, N_FEATURES));
    let mut labels = Vec::with_capacity(total);
    let mut row = 0;
    let mut draw_sample = |class: usize, row: usize, features: &mut Array2<f64>, rng: &mut Stream| {
        for f in 0..N_FEATURES {
            features[(row, f)] = means[(class, f)] + SAMPLE_NOISE_STD * normal.sample(rng);
        }
    };

    let mut shards = Vec::with_capacity(cfg.n_users);
    for (user, &d_n) in shard_sizes.iter().enumerate() {
        let dominant = user % N_CLASSES;
        let n_dom = (cfg.noniid_ratio * d_n as f64).floor() as usize;
        let mut shard = Vec::with_capacity(d_n);
        for i in 0..d_n {
            let class = if i < n_dom {
                dominant
            } else if n_dom == 0 {
                rng.random_range(0..N_CLASSES)
            } else {
                // uniform over the other classes
                let mut c = rng.random_range(0..N_CLASSES - 1);
                if c >= dominant {
                    c += 1;
                }
                c
            };
            draw_sample(class, row, &mut features, rng);
            labels.push(class);
            shard.push(row);
            row += 1;
        }
        shards.push(shard);
    }

    let mut held_out = Vec::with_capacity(held_count);
    for i in 0..held_count {
        let class = i % N_CLASSES;
        draw_sample(class, row, &mut features, rng);
        labels.push(class);
        held_out.push(row);
        row += 1;
    }

    SyntheticDataset {
        features,
        labels,
        shards,
        held_out,
    }
}
