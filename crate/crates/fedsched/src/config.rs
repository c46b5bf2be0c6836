//! Experiment configuration and per-user physical profiles.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

/// Full experiment configuration, loaded from a JSON file with the same field
/// names in snake_case. All floating-point quantities are 64-bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Number of users N.
    pub n_users: usize,
    /// Number of uplink subcarriers M.
    pub n_subcarriers: usize,
    /// Bandwidth per subcarrier, Hz.
    pub bandwidth_hz: f64,
    /// Noise power spectral density, dBm/Hz.
    pub noise_psd_dbm_hz: f64,
    /// Uploaded model package size, bits.
    pub model_bits: f64,
    /// Local epochs per global round.
    pub local_epochs: usize,
    /// CPU cycles needed per bit of data.
    pub cycles_per_bit: f64,
    /// Effective switched capacitance, J*s^2/cycle^3.
    pub kappa: f64,
    /// Lowest selectable CPU frequency, Hz.
    pub f_min_hz: f64,
    /// Highest selectable CPU frequency, Hz.
    pub f_max_hz: f64,
    /// Per-user transmit power cap, W.
    pub p_max_w: f64,
    /// Range [low, high] of the initial per-user energy budget, J.
    pub e0_range_j: [f64; 2],
    /// Expected harvested energy per round, J.
    pub eh_mean_j: f64,
    /// Battery capacity, J.
    pub e_max_j: f64,
    /// Non-IID ratio `a`: fraction of each shard drawn from one dominant class.
    pub noniid_ratio: f64,
    /// Range [low, high] of per-user sample counts.
    pub samples_range: [usize; 2],
    /// Accuracy at which an FL task counts as done.
    pub target_accuracy: f64,
    /// Hard cap on global rounds per task.
    pub max_rounds: usize,
    /// Master seed; all named streams derive from it.
    pub rng_seed: u64,
}

impl Default for SimConfig {
    /// Stock 20-user / 64-subcarrier configuration.
    fn default() -> Self {
        SimConfig {
            n_users: 20,
            n_subcarriers: 64,
            bandwidth_hz: 15_000.0,
            noise_psd_dbm_hz: -174.0,
            model_bits: 51_200.0,
            local_epochs: 8,
            cycles_per_bit: 20.0,
            kappa: 1e-28,
            f_min_hz: 0.5e9,
            f_max_hz: 3.0e9,
            p_max_w: 1.0,
            e0_range_j: [0.5, 1.0],
            eh_mean_j: 0.2,
            e_max_j: 1.0,
            noniid_ratio: 0.8,
            samples_range: [200, 500],
            target_accuracy: 0.8,
            max_rounds: 60,
            rng_seed: 42,
        }
    }
}

impl SimConfig {
    /// Checks every structural invariant, naming the offending field.
    pub fn validate(&self) -> Result<()> {
        fn fail(field: &str, reason: impl Into<String>) -> Result<()> {
            Err(SimError::Config {
                field: field.to_string(),
                reason: reason.into(),
            })
        }
        if self.n_users == 0 {
            return fail("n_users", "must be at least 1");
        }
        if self.n_subcarriers == 0 {
            return fail("n_subcarriers", "must be at least 1");
        }
        if !(self.bandwidth_hz > 0.0) {
            return fail("bandwidth_hz", "must be strictly positive");
        }
        if !self.noise_psd_dbm_hz.is_finite() {
            return fail("noise_psd_dbm_hz", "must be finite");
        }
        if !(self.model_bits > 0.0) {
            return fail("model_bits", "must be strictly positive");
        }
        if self.local_epochs == 0 {
            return fail("local_epochs", "must be at least 1");
        }
        if !(self.cycles_per_bit > 0.0) {
            return fail("cycles_per_bit", "must be strictly positive");
        }
        if !(self.kappa > 0.0) {
            return fail("kappa", "must be strictly positive");
        }
        if !(self.f_min_hz > 0.0) {
            return fail("f_min_hz", "must be strictly positive");
        }
        if self.f_min_hz > self.f_max_hz {
            return fail("f_min_hz", "must not exceed f_max_hz");
        }
        if !(self.p_max_w > 0.0) {
            return fail("p_max_w", "must be strictly positive");
        }
        if !(self.e0_range_j[0] > 0.0) {
            return fail("e0_range_j", "low end must be strictly positive");
        }
        if self.e0_range_j[0] > self.e0_range_j[1] {
            return fail("e0_range_j", "low end must not exceed high end");
        }
        if self.e0_range_j[1] > self.e_max_j {
            return fail("e0_range_j", "high end must not exceed e_max_j");
        }
        if !(self.eh_mean_j > 0.0) {
            return fail("eh_mean_j", "must be strictly positive");
        }
        if !(self.e_max_j > 0.0) {
            return fail("e_max_j", "must be strictly positive");
        }
        if !(0.0..=1.0).contains(&self.noniid_ratio) {
            return fail("noniid_ratio", "must lie in [0, 1]");
        }
        if self.samples_range[0] == 0 {
            return fail("samples_range", "low end must be at least 1");
        }
        if self.samples_range[0] > self.samples_range[1] {
            return fail("samples_range", "low end must not exceed high end");
        }
        if !(self.target_accuracy > 0.0 && self.target_accuracy <= 1.0) {
            return fail("target_accuracy", "must lie in (0, 1]");
        }
        if self.max_rounds == 0 {
            return fail("max_rounds", "must be at least 1");
        }
        Ok(())
    }
}

/// Loads and validates a [`SimConfig`] from a JSON file.
pub fn load_config(path: &Path) -> Result<SimConfig> {
    let text = fs::read_to_string(path).map_err(|e| SimError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let cfg: SimConfig = serde_json::from_str(&text).map_err(|e| SimError::Parse {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

/// Static physics of one user: compute cost, radio limits and placement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserProfile {
    pub user_id: usize,
    /// CPU cycles per bit.
    pub cycles_per_bit: f64,
    /// Bits processed per local mini-batch.
    pub batch_bits: f64,
    pub f_min_hz: f64,
    pub f_max_hz: f64,
    pub p_max_w: f64,
    /// Distance to the base station, m.
    pub distance_m: f64,
    /// Log-normal shadowing draw for this user, dB.
    pub shadowing_db: f64,
    /// Index of this user's dataset shard.
    pub shard: usize,
}

impl UserProfile {
    /// Total CPU cycles for one global round of local training.
    pub fn round_cycles(&self, epochs: usize) -> f64 {
        epochs as f64 * self.cycles_per_bit * self.batch_bits
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_tmp(contents: &str) -> tempdir::TmpFile {
        tempdir::TmpFile::new(contents)
    }

    /// Minimal scoped temp-file helper so config tests need no extra deps.
    mod tempdir {
        use std::io::Write;
        use std::path::PathBuf;

        pub struct TmpFile {
            pub path: PathBuf,
        }

        impl TmpFile {
            pub fn new(contents: &str) -> Self {
                let mut path = std::env::temp_dir();
                let unique = format!(
                    "fedsched-cfg-{}-{}.json",
                    std::process::id(),
                    std::time::SystemTime::now()
                        .duration_since(std::time::UNIX_EPOCH)
                        .unwrap()
                        .as_nanos()
                );
                path.push(unique);
                let mut f = std::fs::File::create(&path).unwrap();
                f.write_all(contents.as_bytes()).unwrap();
                TmpFile { path }
            }
        }

        impl Drop for TmpFile {
            fn drop(&mut self) {
                let _ = std::fs::remove_file(&self.path);
            }
        }
    }

    fn default_json() -> String {
        serde_json::to_string_pretty(&SimConfig::default()).unwrap()
    }

    #[test]
    fn loads_defaults_file() {
        let tmp = write_tmp(&default_json());
        let cfg = load_config(&tmp.path).unwrap();
        assert_eq!(cfg.n_users, 20);
        assert_eq!(cfg.n_subcarriers, 64);
        assert_eq!(cfg.bandwidth_hz, 15_000.0);
    }

    #[test]
    fn rejects_f_min_above_f_max() {
        let mut cfg = SimConfig::default();
        cfg.f_min_hz = 4.0e9;
        let tmp = write_tmp(&serde_json::to_string(&cfg).unwrap());
        match load_config(&tmp.path) {
            Err(SimError::Config { field, .. }) => assert_eq!(field, "f_min_hz"),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_missing_seed() {
        let json = default_json();
        // Strip the rng_seed line; the seed is mandatory for determinism.
        let without: String = json
            .lines()
            .filter(|l| !l.contains("rng_seed"))
            .collect::<Vec<_>>()
            .join("\n");
        let without = without.replace("\"max_rounds\": 60,", "\"max_rounds\": 60");
        let tmp = write_tmp(&without);
        match load_config(&tmp.path) {
            Err(SimError::Parse { reason, .. }) => {
                assert!(reason.contains("rng_seed"), "reason was: {reason}")
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_noniid_ratio() {
        let mut cfg = SimConfig::default();
        cfg.noniid_ratio = 1.5;
        let tmp = write_tmp(&serde_json::to_string(&cfg).unwrap());
        assert!(matches!(
            load_config(&tmp.path),
            Err(SimError::Config { field, .. }) if field == "noniid_ratio"
        ));
    }

    #[test]
    fn rejects_e0_above_battery_cap() {
        let mut cfg = SimConfig::default();
        cfg.e0_range_j = [0.5, 2.0];
        let tmp = write_tmp(&serde_json::to_string(&cfg).unwrap());
        assert!(matches!(
            load_config(&tmp.path),
            Err(SimError::Config { field, .. }) if field == "e0_range_j"
        ));
    }

    #[test]
    fn io_error_carries_path() {
        let missing = Path::new("/definitely/not/here.json");
        match load_config(missing) {
            Err(SimError::Io { path, .. }) => assert_eq!(path, missing),
            other => panic!("expected io error, got {other:?}"),
        }
    }

    #[test]
    fn round_cycles_is_product() {
        let p = UserProfile {
            user_id: 0,
            cycles_per_bit: 20.0,
            batch_bits: 1e6,
            f_min_hz: 0.5e9,
            f_max_hz: 3e9,
            p_max_w: 1.0,
            distance_m: 100.0,
            shadowing_db: 0.0,
            shard: 0,
        };
        assert_eq!(p.round_cycles(8), 8.0 * 20.0 * 1e6);
    }
}
