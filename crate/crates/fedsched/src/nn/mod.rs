//! Minimal dense neural network with exact backpropagation.
//!
//! Hidden layers use tanh, the output layer is linear. Parameters live in a
//! single flat vector (weights row-major, then biases, per layer) so the same
//! container serves the federated model, the PPO actor and the PPO critic.
//! Snapshots serialize as flat little-endian f64 arrays with a JSON sidecar
//! holding the layer sizes.

pub mod adam;
pub mod beta;

use std::fs;
use std::path::Path;

use rand::Rng;

use crate::error::{Result, SimError};
use crate::rng::Stream;

/// Flat container of model weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    pub values: Vec<f64>,
}

impl ParamVector {
    pub fn zeros(len: usize) -> Self {
        ParamVector {
            values: vec![0.0; len],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

impl From<Vec<f64>> for ParamVector {
    fn from(values: Vec<f64>) -> Self {
        ParamVector { values }
    }
}

/// Fully-connected network: tanh hidden layers, linear output.
#[derive(Debug, Clone)]
pub struct DenseNet {
    layer_sizes: Vec<usize>,
    pub params: ParamVector,
}

/// Cached activations from a forward pass, consumed by [`DenseNet::backward`].
pub struct ForwardCache {
    /// Activations per layer, starting with the input itself.
    activations: Vec<Vec<f64>>,
}

impl ForwardCache {
    pub fn output(&self) -> &[f64] {
        self.activations.last().expect("cache has layers")
    }
}

impl DenseNet {
    /// Total parameter count for a layer-size list: sum of (in+1)*out.
    pub fn param_count(layer_sizes: &[usize]) -> usize {
        layer_sizes
            .windows(2)
            .map(|w| (w[0] + 1) * w[1])
            .sum()
    }

    /// All-zero network with the given architecture.
    pub fn zeros(layer_sizes: Vec<usize>) -> Self {
        assert!(layer_sizes.len() >= 2, "need at least input and output");
        let n = Self::param_count(&layer_sizes);
        DenseNet {
            layer_sizes,
            params: ParamVector::zeros(n),
        }
    }

    /// Glorot-uniform initialization; biases start at zero.
    pub fn init(layer_sizes: Vec<usize>, rng: &mut Stream) -> Self {
        let mut net = Self::zeros(layer_sizes);
        let mut offset = 0;
        for w in net.layer_sizes.clone().windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            for i in 0..fan_in * fan_out {
                net.params.values[offset + i] = rng.random_range(-bound..bound);
            }
            offset += (fan_in + 1) * fan_out;
        }
        net
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn input_len(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_len(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    fn check_input(&self, input: &[f64]) -> Result<()> {
        if input.len() != self.input_len() {
            return Err(SimError::Domain(format!(
                "input length {} does not match first layer {}",
                input.len(),
                self.input_len()
            )));
        }
        Ok(())
    }

    /// Affine + activation composition; returns the output layer.
    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        Ok(self.forward_cached(input)?.output().to_vec())
    }

    /// Forward pass that keeps every layer's activation for backprop.
    pub fn forward_cached(&self, input: &[f64]) -> Result<ForwardCache> {
        self.check_input(input)?;
        let n_layers = self.layer_sizes.len() - 1;
        let mut activations = Vec::with_capacity(n_layers + 1);
        activations.push(input.to_vec());
        let mut offset = 0;
        for (l, w) in self.layer_sizes.windows(2).enumerate() {
            let (fan_in, fan_out) = (w[0], w[1]);
            let weights = &self.params.values[offset..offset + fan_in * fan_out];
            let biases = &self.params.values[offset + fan_in * fan_out..offset + (fan_in + 1) * fan_out];
            let prev = activations.last().unwrap();
            let mut z = vec![0.0; fan_out];
            for o in 0..fan_out {
                let row = &weights[o * fan_in..(o + 1) * fan_in];
                let mut acc = biases[o];
                for (wi, xi) in row.iter().zip(prev.iter()) {
                    acc += wi * xi;
                }
                z[o] = if l + 1 < n_layers { acc.tanh() } else { acc };
            }
            activations.push(z);
            offset += (fan_in + 1) * fan_out;
        }
        Ok(ForwardCache { activations })
    }

    /// Exact gradient of `<upstream, forward(input)>` w.r.t. all parameters.
    /// Also returns the gradient w.r.t. the input.
    pub fn backward(&self, cache: &ForwardCache, upstream: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        if upstream.len() != self.output_len() {
            return Err(SimError::Domain(format!(
                "upstream length {} does not match output layer {}",
                upstream.len(),
                self.output_len()
            )));
        }
        let n_layers = self.layer_sizes.len() - 1;
        let mut grad = vec![0.0; self.params.len()];
        let mut delta = upstream.to_vec();

        // Offsets of each layer's parameter block.
        let mut offsets = Vec::with_capacity(n_layers);
        let mut off = 0;
        for w in self.layer_sizes.windows(2) {
            offsets.push(off);
            off += (w[0] + 1) * w[1];
        }

        for l in (0..n_layers).rev() {
            let fan_in = self.layer_sizes[l];
            let fan_out = self.layer_sizes[l + 1];
            let offset = offsets[l];
            let a_in = &cache.activations[l];
            let weights = &self.params.values[offset..offset + fan_in * fan_out];

            for o in 0..fan_out {
                let d = delta[o];
                let g_row = &mut grad[offset + o * fan_in..offset + (o + 1) * fan_in];
                for (gi, xi) in g_row.iter_mut().zip(a_in.iter()) {
                    *gi += d * xi;
                }
                grad[offset + fan_in * fan_out + o] += d;
            }

            let mut prev_delta = vec![0.0; fan_in];
            for o in 0..fan_out {
                let d = delta[o];
                let row = &weights[o * fan_in..(o + 1) * fan_in];
                for (pd, wi) in prev_delta.iter_mut().zip(row.iter()) {
                    *pd += d * wi;
                }
            }
            if l > 0 {
                // a_in is tanh output of the previous layer
                for (pd, a) in prev_delta.iter_mut().zip(a_in.iter()) {
                    *pd *= 1.0 - a * a;
                }
            }
            delta = prev_delta;
        }
        Ok((grad, delta))
    }
}

/// Writes `<name>.bin` (flat little-endian f64) and `<name>.json` (layer
/// sizes) under `dir`.
pub fn save_net(dir: &Path, name: &str, net: &DenseNet) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| SimError::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    let bin_path = dir.join(format!("{name}.bin"));
    let mut bytes = Vec::with_capacity(net.params.len() * 8);
    for v in &net.params.values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(&bin_path, bytes).map_err(|e| SimError::Io {
        path: bin_path.clone(),
        source: e,
    })?;
    let json_path = dir.join(format!("{name}.json"));
    let sidecar = serde_json::json!({ "layer_sizes": net.layer_sizes() });
    fs::write(&json_path, serde_json::to_string_pretty(&sidecar).unwrap()).map_err(|e| {
        SimError::Io {
            path: json_path.clone(),
            source: e,
        }
    })
}

/// Loads a network saved by [`save_net`].
pub fn load_net(dir: &Path, name: &str) -> Result<DenseNet> {
    let json_path = dir.join(format!("{name}.json"));
    let text = fs::read_to_string(&json_path).map_err(|e| SimError::Io {
        path: json_path.clone(),
        source: e,
    })?;
    let sidecar: serde_json::Value = serde_json::from_str(&text).map_err(|e| SimError::Parse {
        path: json_path.clone(),
        reason: e.to_string(),
    })?;
    let layer_sizes: Vec<usize> = sidecar
        .get("layer_sizes")
        .and_then(|v| v.as_array())
        .map(|a| a.iter().filter_map(|x| x.as_u64().map(|u| u as usize)).collect())
        .ok_or_else(|| SimError::Parse {
            path: json_path.clone(),
            reason: "missing layer_sizes".into(),
        })?;
    let bin_path = dir.join(format!("{name}.bin"));
    let bytes = fs::read(&bin_path).map_err(|e| SimError::Io {
        path: bin_path.clone(),
        source: e,
    })?;
    let expected = DenseNet::param_count(&layer_sizes);
    if bytes.len() != expected * 8 {
        return Err(SimError::Parse {
            path: bin_path,
            reason: format!(
                "parameter file holds {} bytes, architecture needs {}",
                bytes.len(),
                expected * 8
            ),
        });
    }
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(DenseNet {
        layer_sizes,
        params: ParamVector { values },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::make_rng;
    use approx::assert_relative_eq;

    /// Independent dense evaluation used as the forward oracle: plain nested
    /// loops over an explicit (weights, biases) view.
    fn forward_oracle(net: &DenseNet, input: &[f64]) -> Vec<f64> {
        let sizes = net.layer_sizes();
        let mut a = input.to_vec();
        let mut offset = 0;
        let n_layers = sizes.len() - 1;
        for (l, w) in sizes.windows(2).enumerate() {
            let (fi, fo) = (w[0], w[1]);
            let mut next = vec![0.0; fo];
            for o in 0..fo {
                let mut acc = net.params.values[offset + fi * fo + o];
                for i in 0..fi {
                    acc += net.params.values[offset + o * fi + i] * a[i];
                }
                next[o] = if l + 1 < n_layers { acc.tanh() } else { acc };
            }
            a = next;
            offset += (fi + 1) * fo;
        }
        a
    }

    #[test]
    fn zero_net_maps_to_zero() {
        let net = DenseNet::zeros(vec![4, 8, 3]);
        let out = net.forward(&[1.0, -2.0, 0.5, 3.0]).unwrap();
        assert!(out.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn identity_linear_layer_passes_input_through() {
        let mut net = DenseNet::zeros(vec![3, 3]);
        for i in 0..3 {
            net.params.values[i * 3 + i] = 1.0;
        }
        let input = [0.3, -1.2, 2.5];
        let out = net.forward(&input).unwrap();
        for (o, i) in out.iter().zip(input.iter()) {
            assert_relative_eq!(o, i, max_relative = 1e-15);
        }
    }

    #[test]
    fn forward_matches_independent_oracle() {
        let mut rng = make_rng(11, "nn-test");
        for sizes in [vec![5, 7, 4], vec![3, 16, 16, 2], vec![8, 1]] {
            let net = DenseNet::init(sizes, &mut rng);
            let input: Vec<f64> = (0..net.input_len())
                .map(|_| rng.random_range(-1.0..1.0))
                .collect();
            let ours = net.forward(&input).unwrap();
            let oracle = forward_oracle(&net, &input);
            for (a, b) in ours.iter().zip(oracle.iter()) {
                assert_relative_eq!(a, b, max_relative = 1e-12, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn forward_rejects_bad_input_length() {
        let net = DenseNet::zeros(vec![4, 2]);
        assert!(net.forward(&[1.0, 2.0]).is_err());
    }

    /// Central finite differences on `<upstream, forward(x)>`.
    fn fd_grad(net: &DenseNet, input: &[f64], upstream: &[f64], idx: usize) -> f64 {
        let h = 1e-5;
        let mut plus = net.clone();
        plus.params.values[idx] += h;
        let mut minus = net.clone();
        minus.params.values[idx] -= h;
        let f = |n: &DenseNet| -> f64 {
            n.forward(input)
                .unwrap()
                .iter()
                .zip(upstream)
                .map(|(o, u)| o * u)
                .sum()
        };
        (f(&plus) - f(&minus)) / (2.0 * h)
    }

    #[test]
    fn backward_matches_finite_differences() {
        let mut rng = make_rng(13, "nn-test");
        let net = DenseNet::init(vec![6, 10, 8, 3], &mut rng);
        let input: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
        let upstream: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let cache = net.forward_cached(&input).unwrap();
        let (grad, _) = net.backward(&cache, &upstream).unwrap();
        for _ in 0..30 {
            let idx = rng.random_range(0..net.params.len());
            let fd = fd_grad(&net, &input, &upstream, idx);
            let scale = fd.abs().max(grad[idx].abs()).max(1e-8);
            assert!(
                (fd - grad[idx]).abs() / scale <= 1e-4,
                "param {idx}: analytic {} vs fd {fd}",
                grad[idx]
            );
        }
    }

    #[test]
    fn zero_upstream_gives_zero_gradient() {
        let mut rng = make_rng(17, "nn-test");
        let net = DenseNet::init(vec![4, 6, 2], &mut rng);
        let cache = net.forward_cached(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        let (grad, input_grad) = net.backward(&cache, &[0.0, 0.0]).unwrap();
        assert!(grad.iter().all(|&g| g == 0.0));
        assert!(input_grad.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn linear_net_gradient_is_outer_product() {
        let mut rng = make_rng(19, "nn-test");
        let net = DenseNet::init(vec![3, 2], &mut rng);
        let input = [0.5, -1.0, 2.0];
        let upstream = [0.7, -0.3];
        let cache = net.forward_cached(&input).unwrap();
        let (grad, _) = net.backward(&cache, &upstream).unwrap();
        for o in 0..2 {
            for i in 0..3 {
                assert_relative_eq!(grad[o * 3 + i], upstream[o] * input[i], max_relative = 1e-14);
            }
            assert_relative_eq!(grad[6 + o], upstream[o], max_relative = 1e-14);
        }
    }

    #[test]
    fn save_load_roundtrip() {
        let mut rng = make_rng(23, "nn-test");
        let net = DenseNet::init(vec![5, 8, 2], &mut rng);
        let dir = std::env::temp_dir().join(format!("fedsched-nn-{}", std::process::id()));
        save_net(&dir, "actor", &net).unwrap();
        let back = load_net(&dir, "actor").unwrap();
        std::fs::remove_dir_all(&dir).ok();
        assert_eq!(back.layer_sizes(), net.layer_sizes());
        assert_eq!(back.params.values, net.params.values);
    }

    #[test]
    fn param_count_formula() {
        assert_eq!(DenseNet::param_count(&[4, 8, 3]), (4 + 1) * 8 + (8 + 1) * 3);
    }
}
