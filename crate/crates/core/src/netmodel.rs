//! Network configuration, symbol-extension dimensions, channel draws and
//! per-stream power allocation for the M x N wireless X network.
//!
//! Indices are 0-based throughout the crate: receiver `j` is `0..N`,
//! transmitter `i` is `0..M`, and transmitter `0` plays the special role
//! (more streams per message) in the alignment scheme.

use std::f64::consts::PI;

use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Default channel gain magnitude range.
pub const DEFAULT_MAGNITUDE_RANGE: (f64, f64) = (0.7, 1.4);
/// Outer bounds accepted for the magnitude range.
pub const MAGNITUDE_GUARD: (f64, f64) = (0.5, 2.0);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkConfig {
    transmitters: usize,
    receivers: usize,
    m: u32,
    seed: u64,
    snr_list: Vec<f64>,
    magnitude_range: (f64, f64),
}

impl NetworkConfig {
    /// `snr_list` holds linear powers P (noise variance is 1).
    pub fn new(
        transmitters: usize,
        receivers: usize,
        m: u32,
        seed: u64,
        snr_list: Vec<f64>,
        magnitude_range: (f64, f64),
    ) -> Result<Self> {
        if transmitters < 2 || receivers < 2 {
            return Err(Error::InvalidConfig(format!(
                "need M >= 2 and N >= 2, got M={transmitters}, N={receivers}"
            )));
        }
        if m < 1 {
            return Err(Error::InvalidConfig("alignment parameter m must be >= 1".into()));
        }
        let (lo, hi) = magnitude_range;
        if !(lo.is_finite() && hi.is_finite()) || lo < MAGNITUDE_GUARD.0 || hi > MAGNITUDE_GUARD.1 || lo > hi {
            return Err(Error::InvalidConfig(format!(
                "magnitude_range ({lo}, {hi}) must satisfy {} <= lower <= upper <= {}",
                MAGNITUDE_GUARD.0, MAGNITUDE_GUARD.1
            )));
        }
        if snr_list.iter().any(|p| !p.is_finite() || *p <= 0.0) {
            return Err(Error::InvalidConfig("snr_list entries must be positive".into()));
        }
        if snr_list.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig("snr_list must be strictly increasing".into()));
        }
        // validates the dimension arithmetic up front
        compute_dimensions(transmitters, receivers, m)?;
        Ok(Self { transmitters, receivers, m, seed, snr_list, magnitude_range })
    }

    /// Builds a config from SNR values in dB, `P = 10^(dB/10)`.
    pub fn from_db(
        transmitters: usize,
        receivers: usize,
        m: u32,
        seed: u64,
        snr_db: &[f64],
        magnitude_range: (f64, f64),
    ) -> Result<Self> {
        let snr_list = snr_db.iter().map(|db| db_to_linear(*db)).collect();
        Self::new(transmitters, receivers, m, seed, snr_list, magnitude_range)
    }

    pub fn transmitters(&self) -> usize {
        self.transmitters
    }

    pub fn receivers(&self) -> usize {
        self.receivers
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn snr_list(&self) -> &[f64] {
        &self.snr_list
    }

    pub fn magnitude_range(&self) -> (f64, f64) {
        self.magnitude_range
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    pub fn dimensions(&self) -> DimensionSummary {
        compute_dimensions(self.transmitters, self.receivers, self.m)
            .expect("validated at construction")
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Symbol-extension bookkeeping for one `(M, N, m)` triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionSummary {
    pub transmitters: usize,
    pub receivers: usize,
    pub m: u32,
    /// Number of relative-channel matrices per message group, (N-1)(M-1).
    pub gamma: u32,
    /// Extension length.
    pub extension: u64,
    /// Streams per message from transmitter 0.
    pub m1: u64,
    /// Streams per message from every other transmitter.
    pub mi: u64,
}

impl DimensionSummary {
    /// Stream count for a message sent by transmitter `tx`.
    pub fn streams(&self, tx: usize) -> u64 {
        if tx == 0 {
            self.m1
        } else {
            self.mi
        }
    }

    /// Dimension of the aligned interference space at any receiver.
    pub fn interference_dim(&self) -> u64 {
        (self.receivers as u64 - 1) * self.m1
    }

    /// Dimension of the desired signal space at any receiver.
    pub fn desired_dim(&self) -> u64 {
        self.m1 + (self.transmitters as u64 - 1) * self.mi
    }
}

pub fn compute_dimensions(transmitters: usize, receivers: usize, m: u32) -> Result<DimensionSummary> {
    if transmitters < 2 || receivers < 2 {
        return Err(Error::InvalidConfig(format!(
            "alignment scheme needs M >= 2 and N >= 2, got M={transmitters}, N={receivers}"
        )));
    }
    if m < 1 {
        return Err(Error::InvalidConfig("alignment parameter m must be >= 1".into()));
    }
    let overflow = || Error::InvalidConfig(format!("dimensions overflow for M={transmitters}, N={receivers}, m={m}"));
    let gamma = (transmitters as u64 - 1)
        .checked_mul(receivers as u64 - 1)
        .and_then(|g| u32::try_from(g).ok())
        .ok_or_else(overflow)?;
    let m1 = (m as u64 + 1).checked_pow(gamma).ok_or_else(overflow)?;
    let mi = (m as u64).checked_pow(gamma).ok_or_else(overflow)?;
    let extension = (receivers as u64)
        .checked_mul(m1)
        .and_then(|a| (transmitters as u64 - 1).checked_mul(mi).and_then(|b| a.checked_add(b)))
        .filter(|f| *f < (1u64 << 63))
        .ok_or_else(overflow)?;
    Ok(DimensionSummary { transmitters, receivers, m, gamma, extension, m1, mi })
}

/// Diagonals of the extended channel matrices, indexed `[receiver][transmitter][slot]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedChannel {
    gains: Vec<Vec<Vec<C64>>>,
}

impl ExtendedChannel {
    /// Wraps explicit diagonals. All lists must share one length.
    pub fn from_diagonals(gains: Vec<Vec<Vec<C64>>>) -> Result<Self> {
        let len = gains
            .first()
            .and_then(|row| row.first())
            .map(Vec::len)
            .ok_or_else(|| Error::ShapeMismatch("empty channel".into()))?;
        let transmitters = gains[0].len();
        for row in &gains {
            if row.len() != transmitters || row.iter().any(|d| d.len() != len) {
                return Err(Error::ShapeMismatch("ragged channel diagonals".into()));
            }
        }
        Ok(Self { gains })
    }

    /// Every channel equal to the identity over `extension` slots.
    pub fn identity(transmitters: usize, receivers: usize, extension: usize) -> Self {
        Self { gains: vec![vec![vec![C64::new(1.0, 0.0); extension]; transmitters]; receivers] }
    }

    pub fn receivers(&self) -> usize {
        self.gains.len()
    }

    pub fn transmitters(&self) -> usize {
        self.gains[0].len()
    }

    pub fn extension(&self) -> usize {
        self.gains[0][0].len()
    }

    /// Diagonal of the channel from transmitter `tx` to receiver `rx`.
    pub fn diagonal(&self, rx: usize, tx: usize) -> &[C64] {
        &self.gains[rx][tx]
    }

    pub fn iter_gains(&self) -> impl Iterator<Item = &C64> {
        self.gains.iter().flatten().flatten()
    }
}

/// Draws i.i.d. gains with magnitude uniform in the configured range and
/// uniform phase. Draw order is receiver, transmitter, slot.
pub fn draw_extended_channel(config: &NetworkConfig) -> ExtendedChannel {
    let dims = config.dimensions();
    let (lo, hi) = config.magnitude_range;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let gains = (0..config.receivers)
        .map(|_| {
            (0..config.transmitters)
                .map(|_| {
                    (0..dims.extension)
                        .map(|_| {
                            let mag = if hi > lo { rng.random_range(lo..hi) } else { lo };
                            let phase = rng.random_range(0.0..2.0 * PI);
                            C64::from_polar(mag, phase)
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    ExtendedChannel { gains }
}

/// Per-stream transmit powers for unit-norm precoder columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerAllocation {
    pub total: f64,
    pub per_stream: Vec<f64>,
    /// Maps the budget to a transmitter's per-stream power: `p_i = total / normalizer_i`.
    pub normalizers: Vec<f64>,
}

impl PowerAllocation {
    pub fn stream_power(&self, tx: usize) -> f64 {
        self.per_stream[tx]
    }

    /// Expected transmit power of `tx` when every precoder column is unit-norm.
    pub fn transmit_power(&self, tx: usize, dims: &DimensionSummary) -> f64 {
        self.per_stream[tx] * (dims.receivers as u64 * dims.streams(tx)) as f64
    }

    /// Allocation with every stream silent; used for zero-power sanity checks.
    pub fn silent(transmitters: usize) -> Self {
        Self { total: 0.0, per_stream: vec![0.0; transmitters], normalizers: vec![1.0; transmitters] }
    }
}

/// Splits the per-transmitter budget evenly over its `N * m_i` streams.
pub fn allocate_power(total: f64, dims: &DimensionSummary) -> Result<PowerAllocation> {
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::InvalidConfig(format!("power budget must be positive, got {total}")));
    }
    let normalizers: Vec<f64> = (0..dims.transmitters)
        .map(|tx| (dims.receivers as u64 * dims.streams(tx)) as f64)
        .collect();
    let per_stream = normalizers.iter().map(|c| total / c).collect();
    Ok(PowerAllocation { total, per_stream, normalizers })
}
