//! Wireless and compute physics: channel realization, per-round time and
//! energy formulas, energy harvesting and battery bookkeeping.

use ndarray::Array2;
use rand::Rng;
use rand_distr::{Distribution, Exp, Poisson};

use crate::config::{SimConfig, UserProfile};
use crate::error::{Result, SimError};
use crate::rng::Stream;

/// Harvested energy arrives in quanta of this size; the Poisson count is
/// scaled so the per-round expectation equals `eh_mean_j`.
pub const EH_QUANTUM_J: f64 = 0.05;

/// Tolerance absorbing floating-point residue from the allocator when
/// checking energy spends against budgets.
pub const ENERGY_TOL_J: f64 = 1e-9;

/// Converts dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Large-scale fading in dB: 38.4 + 30 log10(d) plus the user's shadowing.
pub fn pathloss_db(distance_m: f64, shadowing_db: f64) -> f64 {
    38.4 + 30.0 * distance_m.log10() + shadowing_db
}

/// One round's channel: linear power gains and the derived channel-to-noise
/// ratios (gain over N0*B) for every (user, subcarrier) pair.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    pub gain: Array2<f64>,
    pub cnr: Array2<f64>,
}

impl ChannelRealization {
    pub fn n_users(&self) -> usize {
        self.gain.nrows()
    }

    pub fn n_subcarriers(&self) -> usize {
        self.gain.ncols()
    }

    /// Per-user mean linear gain across subcarriers.
    pub fn mean_gain(&self) -> Vec<f64> {
        (0..self.n_users())
            .map(|n| self.gain.row(n).mean().unwrap_or(0.0))
            .collect()
    }
}

/// Draws small-scale fading on top of each user's static pathloss.
///
/// Gains are `10^(-PL/10) * g` with `g ~ Exp(1)` i.i.d. per (user,
/// subcarrier): the squared magnitude of unit-variance Rayleigh fading.
pub fn draw_channel(
    profiles: &[UserProfile],
    cfg: &SimConfig,
    rng: &mut Stream,
) -> ChannelRealization {
    assert!(!profiles.is_empty(), "draw_channel needs at least one user");
    let n = profiles.len();
    let m = cfg.n_subcarriers;
    let noise_w = dbm_to_watts(cfg.noise_psd_dbm_hz) * cfg.bandwidth_hz;
    let fading = Exp::new(1.0).expect("unit-rate exponential");
    let mut gain = Array2::<f64>::zeros((n, m));
    for (i, p) in profiles.iter().enumerate() {
        let large_scale = 10f64.powf(-pathloss_db(p.distance_m, p.shadowing_db) / 10.0);
        for j in 0..m {
            let g: f64 = fading.sample(rng);
            // Exp(1) support is [0, inf); resample the measure-zero 0 draw so
            // every gain stays strictly positive.
            let g = if g > 0.0 { g } else { f64::MIN_POSITIVE };
            gain[(i, j)] = large_scale * g;
        }
    }
    let cnr = gain.mapv(|h| h / noise_w);
    ChannelRealization { gain, cnr }
}

/// Local computation time for one global round: E*c*d / f.
pub fn compute_time(profile: &UserProfile, f_hz: f64, epochs: usize) -> Result<f64> {
    if f_hz < profile.f_min_hz || f_hz > profile.f_max_hz {
        return Err(SimError::Domain(format!(
            "frequency {f_hz} Hz outside [{}, {}]",
            profile.f_min_hz, profile.f_max_hz
        )));
    }
    Ok(profile.round_cycles(epochs) / f_hz)
}

/// Local computation energy for one global round: kappa*E*f^2*c*d.
pub fn compute_energy(profile: &UserProfile, f_hz: f64, epochs: usize, kappa: f64) -> Result<f64> {
    if f_hz < profile.f_min_hz || f_hz > profile.f_max_hz {
        return Err(SimError::Domain(format!(
            "frequency {f_hz} Hz outside [{}, {}]",
            profile.f_min_hz, profile.f_max_hz
        )));
    }
    Ok(kappa * f_hz * f_hz * profile.round_cycles(epochs))
}

/// Uplink rate over the user's assigned subcarriers: sum of B*log2(1 + P*phi).
pub fn rate(cnr_row: &[f64], power_w: &[f64], assignment: &[bool], b_hz: f64) -> Result<f64> {
    debug_assert_eq!(cnr_row.len(), power_w.len());
    debug_assert_eq!(cnr_row.len(), assignment.len());
    let mut total = 0.0;
    for ((&phi, &p), &used) in cnr_row.iter().zip(power_w).zip(assignment) {
        if p < 0.0 {
            return Err(SimError::Domain(format!("negative power {p} W")));
        }
        if used {
            total += b_hz * (1.0 + p * phi).log2();
        }
    }
    Ok(total)
}

/// Upload time and energy for a fixed rate: t = bits/rate, e = (sum P)*t.
pub fn comm_time_energy(
    rate_bps: f64,
    power_w: &[f64],
    assignment: &[bool],
    model_bits: f64,
) -> Result<(f64, f64)> {
    if !(rate_bps > 0.0) {
        return Err(SimError::InfeasibleRate);
    }
    let t = model_bits / rate_bps;
    let total_power: f64 = power_w
        .iter()
        .zip(assignment)
        .filter(|(_, &used)| used)
        .map(|(&p, _)| p)
        .sum();
    Ok((t, total_power * t))
}

/// Per-user battery levels at the start of a round plus last round's income.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyState {
    pub budgets_j: Vec<f64>,
    pub harvested_last_j: Vec<f64>,
}

impl EnergyState {
    /// Initial budgets drawn uniformly from the configured range.
    pub fn init(cfg: &SimConfig, rng: &mut Stream) -> Self {
        let [lo, hi] = cfg.e0_range_j;
        let budgets_j = (0..cfg.n_users)
            .map(|_| rng.random_range(lo..=hi))
            .collect();
        EnergyState {
            budgets_j,
            harvested_last_j: vec![0.0; cfg.n_users],
        }
    }
}

/// Advances batteries by one round: subtract spends, add quantized-Poisson
/// harvest, clamp to [0, E_max].
pub fn advance_energy(
    state: &EnergyState,
    spent_j: &[f64],
    rng: &mut Stream,
    cfg: &SimConfig,
) -> Result<EnergyState> {
    if spent_j.len() != state.budgets_j.len() {
        return Err(SimError::Domain(format!(
            "spent vector has length {}, expected {}",
            spent_j.len(),
            state.budgets_j.len()
        )));
    }
    let poisson = Poisson::new(cfg.eh_mean_j / EH_QUANTUM_J)
        .map_err(|e| SimError::Domain(format!("bad harvest rate: {e}")))?;
    let mut budgets = Vec::with_capacity(state.budgets_j.len());
    let mut harvested = Vec::with_capacity(state.budgets_j.len());
    for (n, (&old, &spent)) in state.budgets_j.iter().zip(spent_j).enumerate() {
        if spent > old + ENERGY_TOL_J {
            return Err(SimError::EnergyContract(format!(
                "user {n} spent {spent} J with only {old} J budgeted"
            )));
        }
        let income = EH_QUANTUM_J * poisson.sample(rng);
        let new = (old - spent + income).min(cfg.e_max_j).max(0.0);
        budgets.push(new);
        harvested.push(income);
    }
    Ok(EnergyState {
        budgets_j: budgets,
        harvested_last_j: harvested,
    })
}

/// Round completion time: the straggler's total.
pub fn round_time(per_user_totals: &[f64]) -> Result<f64> {
    per_user_totals
        .iter()
        .copied()
        .fold(None, |acc: Option<f64>, t| Some(acc.map_or(t, |a| a.max(t))))
        .ok_or_else(|| SimError::Domain("round_time of empty user list".into()))
}
