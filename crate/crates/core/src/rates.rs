//! Secure-rate evaluation under the four secrecy constraints, the layered
//! rate split behind the random-binning code, and exact closed-form DoF.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::Serialize;

use crate::alignment::{build_precoders, check_alignment};
use crate::error::{Error, Result};
use crate::linalg::DEFAULT_RANK_TOL;
use crate::mi::{desired_mi, dof_slope, secrecy_penalty, EffectiveChannelSet, MessageId, MiResult};
use crate::netmodel::{allocate_power, draw_extended_channel, DimensionSummary, NetworkConfig, PowerAllocation};

pub type Rational = Ratio<i128>;

/// Which unintended-message set must stay secret at each receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Constraint {
    /// All unintended messages.
    One,
    /// Unintended messages of any `M-1` transmitters.
    Two,
    /// Unintended messages of the uncompromised transmitters.
    Three,
    /// Unintended messages of any `|S^c|-1` uncompromised transmitters.
    Four,
}

impl Constraint {
    pub fn number(self) -> u8 {
        match self {
            Constraint::One => 1,
            Constraint::Two => 2,
            Constraint::Three => 3,
            Constraint::Four => 4,
        }
    }

    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Constraint::One),
            2 => Ok(Constraint::Two),
            3 => Ok(Constraint::Three),
            4 => Ok(Constraint::Four),
            _ => Err(Error::InvalidScenario(format!("constraint must be 1..=4, got {n}"))),
        }
    }

    fn uses_excluded(self) -> bool {
        matches!(self, Constraint::Two | Constraint::Four)
    }

    fn uses_compromised(self) -> bool {
        matches!(self, Constraint::Three | Constraint::Four)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ExcludedTx {
    Fixed(usize),
    WorstCase,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SecrecyScenario {
    pub constraint: Constraint,
    pub compromised: BTreeSet<usize>,
    pub excluded: Option<ExcludedTx>,
}

impl SecrecyScenario {
    pub fn all_unintended() -> Self {
        Self { constraint: Constraint::One, compromised: BTreeSet::new(), excluded: None }
    }

    pub fn all_but_one(excluded: ExcludedTx) -> Self {
        Self { constraint: Constraint::Two, compromised: BTreeSet::new(), excluded: Some(excluded) }
    }

    pub fn compromised(compromised: BTreeSet<usize>) -> Self {
        Self { constraint: Constraint::Three, compromised, excluded: None }
    }

    pub fn compromised_all_but_one(compromised: BTreeSet<usize>, excluded: ExcludedTx) -> Self {
        Self { constraint: Constraint::Four, compromised, excluded: Some(excluded) }
    }

    /// Scenario for `constraint` with its default worst-case exclusion.
    pub fn with_constraint(constraint: Constraint, compromised: BTreeSet<usize>) -> Self {
        let excluded = constraint.uses_excluded().then_some(ExcludedTx::WorstCase);
        Self { constraint, compromised, excluded }
    }

    pub fn validate(&self, transmitters: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        if !self.constraint.uses_compromised() && !self.compromised.is_empty() {
            return bad(format!("constraint {} takes no compromised set", self.constraint.number()));
        }
        if self.constraint.uses_excluded() != self.excluded.is_some() {
            return bad(format!(
                "constraint {} {} an excluded transmitter",
                self.constraint.number(),
                if self.constraint.uses_excluded() { "needs" } else { "takes no" }
            ));
        }
        if let Some(&i) = self.compromised.iter().find(|&&i| i >= transmitters) {
            return bad(format!("compromised transmitter {i} out of range"));
        }
        if self.compromised.len() + 2 > transmitters {
            return bad(format!(
                "|S| = {} exceeds M - 2 = {}",
                self.compromised.len(),
                transmitters as i64 - 2
            ));
        }
        if let Some(ExcludedTx::Fixed(l)) = self.excluded {
            if l >= transmitters {
                return bad(format!("excluded transmitter {l} out of range"));
            }
            if self.compromised.contains(&l) {
                return bad(format!("excluded transmitter {l} is also compromised"));
            }
        }
        Ok(())
    }

    /// Divisor applied to the penalty in the rate formula.
    pub fn divisor(&self, transmitters: usize, receivers: usize) -> u64 {
        let (m, n, s) = (transmitters as u64, receivers as u64, self.compromised.len() as u64);
        let tx_count = match self.constraint {
            Constraint::One => m,
            Constraint::Two => m - 1,
            Constraint::Three => m - s,
            Constraint::Four => m - s - 1,
        };
        tx_count * (n - 1)
    }

    /// Transmitters whose messages carry a secure rate.
    pub fn active_transmitters(&self, transmitters: usize) -> Vec<usize> {
        (0..transmitters).filter(|i| !self.compromised.contains(i)).collect()
    }
}

impl fmt::Display for SecrecyScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "constraint {}", self.constraint.number())?;
        if !self.compromised.is_empty() {
            write!(f, ", S = {:?}", self.compromised)?;
        }
        match self.excluded {
            Some(ExcludedTx::Fixed(l)) => write!(f, ", l = {l}"),
            Some(ExcludedTx::WorstCase) => write!(f, ", worst-case l"),
            None => Ok(()),
        }
    }
}

/// The maximizing penalty and where it was found.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PenaltyWitness {
    pub value: MiResult,
    pub receiver: usize,
    pub compromised: BTreeSet<usize>,
    pub per_receiver_bits: Vec<f64>,
}

fn subsets_of_size(n: usize, size: usize) -> Vec<BTreeSet<usize>> {
    (0u64..1 << n)
        .filter(|mask| mask.count_ones() as usize == size)
        .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
        .collect()
}

/// Penalty maximized over receivers and, for constraints 3 and 4, over every
/// compromised coalition of the scenario's size (avoiding a fixed `l`).
/// `per_receiver_bits` holds the per-receiver maxima over coalitions.
pub fn worst_case_penalty(
    scenario: &SecrecyScenario,
    effective: &EffectiveChannelSet,
    power: &PowerAllocation,
) -> Result<PenaltyWitness> {
    let dims = effective.dims();
    scenario.validate(dims.transmitters)?;
    let coalitions = if scenario.constraint.uses_compromised() {
        subsets_of_size(dims.transmitters, scenario.compromised.len())
            .into_iter()
            .filter(|s| !matches!(scenario.excluded, Some(ExcludedTx::Fixed(l)) if s.contains(&l)))
            .collect()
    } else {
        vec![BTreeSet::new()]
    };
    let mut per_receiver_bits = vec![f64::NEG_INFINITY; dims.receivers];
    let mut best: Option<(MiResult, usize, BTreeSet<usize>)> = None;
    for coalition in coalitions {
        let sc = SecrecyScenario { compromised: coalition.clone(), ..scenario.clone() };
        for (k, slot) in per_receiver_bits.iter_mut().enumerate() {
            let r = secrecy_penalty(&sc, k, effective, power)?;
            *slot = slot.max(r.value_bits);
            if best.as_ref().is_none_or(|(b, _, _)| r.value_bits > b.value_bits) {
                best = Some((r, k, coalition.clone()));
            }
        }
    }
    let (value, receiver, compromised) = best.expect("at least one coalition");
    Ok(PenaltyWitness { value, receiver, compromised, per_receiver_bits })
}

/// One message at one power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateEntry {
    pub desired_mi_bits: f64,
    pub penalty_bits: f64,
    /// Bits per channel use per extension slot, before clamping.
    pub raw_rate: f64,
    /// `max(raw_rate, 0)`.
    pub rate: f64,
    pub clamped: bool,
}

/// `R = I_desired / F - max_k I_penalty(k) / (F * D)`.
pub fn achievable_rate(
    scenario: &SecrecyScenario,
    desired_bits: f64,
    penalties_bits: &[f64],
    dims: &DimensionSummary,
) -> Result<RateEntry> {
    scenario.validate(dims.transmitters)?;
    if penalties_bits.is_empty() {
        return Err(Error::InvalidScenario("no penalties supplied".into()));
    }
    let penalty = penalties_bits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let f = dims.extension as f64;
    let d = scenario.divisor(dims.transmitters, dims.receivers) as f64;
    let raw_rate = desired_bits / f - penalty / (f * d);
    let clamped = raw_rate < 0.0;
    Ok(RateEntry { desired_mi_bits: desired_bits, penalty_bits: penalty, raw_rate, rate: raw_rate.max(0.0), clamped })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MessageRates {
    pub message: MessageId,
    /// One entry per SNR of the configuration.
    pub entries: Vec<RateEntry>,
    /// Slope of the raw rate between the first and last SNR.
    pub estimated_dof: Option<f64>,
    pub finite_m_dof: f64,
    pub limit_dof: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecureRateReport {
    pub scenario: SecrecyScenario,
    pub dims: DimensionSummary,
    pub seed: u64,
    pub snr_list: Vec<f64>,
    pub penalties: Vec<PenaltyWitness>,
    pub messages: Vec<MessageRates>,
}

/// Full pipeline for one channel draw: precoders, alignment certificate,
/// MI at every SNR and the resulting secure rates.
pub fn evaluate_rates(config: &NetworkConfig, scenario: &SecrecyScenario) -> Result<SecureRateReport> {
    let dims = config.dimensions();
    scenario.validate(dims.transmitters)?;
    let channel = draw_extended_channel(config);
    let precoders = build_precoders(&channel, &dims)?;
    check_alignment(&channel, &precoders, &dims, DEFAULT_RANK_TOL)?.certify()?;
    let effective = EffectiveChannelSet::new(&channel, &precoders, &dims)?;

    let active = scenario.active_transmitters(dims.transmitters);
    let mut penalties = Vec::with_capacity(config.snr_list().len());
    let mut entries: Vec<Vec<RateEntry>> = vec![Vec::new(); dims.receivers * active.len()];
    let mut desired_low_high: Vec<Vec<MiResult>> = vec![Vec::new(); entries.len()];
    for &p in config.snr_list() {
        let power = allocate_power(p, &dims)?;
        let witness = worst_case_penalty(scenario, &effective, &power)?;
        for j in 0..dims.receivers {
            for (a, &i) in active.iter().enumerate() {
                let idx = j * active.len() + a;
                let desired = desired_mi(&effective, MessageId::new(j, i), &power)?;
                let entry = achievable_rate(scenario, desired.value_bits, &[witness.value.value_bits], &dims)?;
                entries[idx].push(entry);
                desired_low_high[idx].push(desired);
            }
        }
        penalties.push(witness);
    }

    let snr = config.snr_list();
    let mut messages = Vec::with_capacity(entries.len());
    for j in 0..dims.receivers {
        for (a, &i) in active.iter().enumerate() {
            let idx = j * active.len() + a;
            let series = &entries[idx];
            let estimated_dof = if snr.len() >= 2 {
                let lo = MiResult { value_bits: series[0].raw_rate, at_power: snr[0] };
                let hi = MiResult { value_bits: series[series.len() - 1].raw_rate, at_power: snr[snr.len() - 1] };
                Some(dof_slope(&lo, &hi)?)
            } else {
                None
            };
            messages.push(MessageRates {
                message: MessageId::new(j, i),
                entries: series.clone(),
                estimated_dof,
                finite_m_dof: to_f64(finite_m_dof(scenario, dims.transmitters, dims.receivers, dims.m, i)?),
                limit_dof: to_f64(limit_dof(scenario, dims.transmitters, dims.receivers)?),
            });
        }
    }
    Ok(SecureRateReport { scenario: scenario.clone(), dims, seed: config.seed(), snr_list: snr.to_vec(), penalties, messages })
}

/// Layered split of one message's rate for the constraint-1 binning code.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateSplit {
    pub rate: f64,
    /// `layer_rates[k-1]` is the rate of sub-bin layer `k`, `k = 1..N-1`.
    pub layer_rates: Vec<f64>,
    pub r_dagger: f64,
    /// Receivers sorted by ascending penalty.
    pub ordering: Vec<usize>,
    pub epsilon: f64,
}

impl RateSplit {
    /// `R + sum_{k > N - rank} R^k + R_dagger` for the receiver at 1-based
    /// position `rank` of the ascending penalty order.
    pub fn secured_sum(&self, rank: usize) -> f64 {
        let n = self.layer_rates.len() + 1;
        let layers: f64 = (n - rank + 1..n).map(|k| self.layer_rates[k - 1]).sum();
        self.rate + layers + self.r_dagger
    }

    pub fn total(&self) -> f64 {
        self.rate + self.layer_rates.iter().sum::<f64>() + self.r_dagger
    }
}

pub fn rate_split(
    penalties_bits: &[f64],
    desired_bits: f64,
    dims: &DimensionSummary,
    epsilon: f64,
) -> Result<RateSplit> {
    let n = dims.receivers;
    if n < 2 || penalties_bits.len() != n {
        return Err(Error::ShapeMismatch(format!("need one penalty per receiver ({n}), got {}", penalties_bits.len())));
    }
    let mut ordering: Vec<usize> = (0..n).collect();
    ordering.sort_by(|a, b| penalties_bits[*a].total_cmp(&penalties_bits[*b]).then(a.cmp(b)));
    // sorted[r-1] is the r-th smallest penalty
    let sorted: Vec<f64> = ordering.iter().map(|&k| penalties_bits[k]).collect();
    let f = dims.extension as f64;
    let scale = 1.0 / (f * (dims.transmitters * (n - 1)) as f64);
    let layer_rates: Vec<f64> = (1..n).map(|k| scale * (sorted[n - k] - sorted[n - k - 1])).collect();
    if let Some((k, r)) = layer_rates.iter().enumerate().find(|(_, r)| **r < 0.0) {
        return Err(Error::NegativeLayer(format!("layer {} rate {r}", k + 1)));
    }
    let r_dagger = scale * sorted[0] - epsilon;
    let rate = desired_bits / f - scale * sorted[n - 1];
    Ok(RateSplit { rate, layer_rates, r_dagger, ordering, epsilon })
}

/// Closed-form results, X network and K-user interference channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Theorem {
    /// X network, constraint 1.
    XAllUnintended,
    /// X network, constraint 2.
    XAllButOne,
    /// X network, constraint 3 with compromised transmitters.
    XCompromised,
    /// X network, constraint 4 with compromised transmitters.
    XCompromisedAllButOne,
    /// K-user interference channel, constraint 2.
    IcAllButOne,
    /// K-user interference channel, constraint 4 with compromised users.
    IcCompromised,
    /// K-user interference channel with all unintended messages secured.
    IcBaseline,
}

impl Theorem {
    pub const ALL: [Theorem; 7] = [
        Theorem::XAllUnintended,
        Theorem::XAllButOne,
        Theorem::XCompromised,
        Theorem::XCompromisedAllButOne,
        Theorem::IcAllButOne,
        Theorem::IcCompromised,
        Theorem::IcBaseline,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Theorem::XAllUnintended => "1",
            Theorem::XAllButOne => "2",
            Theorem::XCompromised => "3-c3",
            Theorem::XCompromisedAllButOne => "3-c4",
            Theorem::IcAllButOne => "4",
            Theorem::IcCompromised => "5",
            Theorem::IcBaseline => "ic-baseline",
        }
    }

    pub fn is_x_network(self) -> bool {
        matches!(
            self,
            Theorem::XAllUnintended | Theorem::XAllButOne | Theorem::XCompromised | Theorem::XCompromisedAllButOne
        )
    }

    pub fn uses_compromised(self) -> bool {
        matches!(self, Theorem::XCompromised | Theorem::XCompromisedAllButOne | Theorem::IcCompromised)
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.label() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown theorem {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DofValue {
    #[serde(serialize_with = "ser_ratio")]
    pub per_message: Rational,
    #[serde(serialize_with = "ser_ratio")]
    pub total: Rational,
}

fn ser_ratio<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn violation(msg: String) -> Error {
    Error::ConstraintViolation(msg)
}

/// Exact per-message and total secure DoF. `transmitters`/`receivers` are
/// read for X-network results, `users` for interference-channel results,
/// `compromised` where the result has a compromised set.
pub fn closed_form_dof(
    theorem: Theorem,
    transmitters: usize,
    receivers: usize,
    users: usize,
    compromised: usize,
) -> Result<DofValue> {
    let r = |n: i128, d: i128| Rational::new(n, d);
    let (m, n, k, s) = (transmitters as i128, receivers as i128, users as i128, compromised as i128);
    if theorem.is_x_network() && (m < 2 || n < 2) {
        return Err(violation(format!("X network needs M >= 2 and N >= 2, got M={m}, N={n}")));
    }
    if !theorem.is_x_network() && k < 2 {
        return Err(violation(format!("interference channel needs K >= 2, got K={k}")));
    }
    if !theorem.uses_compromised() && s != 0 {
        return Err(violation(format!("theorem {} takes no compromised set", theorem.label())));
    }
    let (per_message, messages) = match theorem {
        Theorem::XAllUnintended => (r(m - 1, m * (m + n - 1)), m * n),
        Theorem::XAllButOne => (r(1, m + n - 1), m * n),
        Theorem::XCompromised | Theorem::XCompromisedAllButOne => {
            if s > m - 2 {
                return Err(violation(format!("|S| <= M - 2 violated: |S| = {s}, M = {m}")));
            }
            let per = if theorem == Theorem::XCompromised {
                r(1, m + n - 1) * (r(1, 1) - r(1, m - s))
            } else {
                r(1, m + n - 1)
            };
            (per, n * (m - s))
        }
        Theorem::IcAllButOne => (r(1, 2), k),
        Theorem::IcCompromised => {
            if s >= k - 2 {
                return Err(violation(format!("|S| < K - 2 violated: |S| = {s}, K = {k}")));
            }
            (r(1, 2), k - s)
        }
        Theorem::IcBaseline => (r(k - 2, 2 * k - 2), k),
    };
    Ok(DofValue { per_message, total: per_message * messages })
}

/// Finite-`m` prelog of a message from transmitter `tx`, divided by `F`.
pub fn finite_m_dof(
    scenario: &SecrecyScenario,
    transmitters: usize,
    receivers: usize,
    m: u32,
    tx: usize,
) -> Result<Rational> {
    scenario.validate(transmitters)?;
    let dims = crate::netmodel::compute_dimensions(transmitters, receivers, m)?;
    if tx >= transmitters {
        return Err(Error::InvalidScenario(format!("transmitter {tx} out of range")));
    }
    let a = dims.m1 as i128;
    let b = dims.mi as i128;
    let f = dims.extension as i128;
    let eta = dims.streams(tx) as i128;
    let big_m = transmitters as i128;
    let s = scenario.compromised.len() as i128;
    let q = match scenario.constraint {
        Constraint::One => Rational::new(eta * big_m - a, big_m * f),
        Constraint::Two => Rational::new((big_m - 1) * eta - (a - b), f * (big_m - 1)),
        Constraint::Three => Rational::new((big_m - s) * eta - a, (big_m - s) * f),
        Constraint::Four => Rational::new((big_m - s - 1) * eta - (a - b), f * (big_m - s - 1)),
    };
    Ok(q)
}

/// `m -> infinity` limit of [`finite_m_dof`], identical for every message.
pub fn limit_dof(scenario: &SecrecyScenario, transmitters: usize, receivers: usize) -> Result<Rational> {
    scenario.validate(transmitters)?;
    let theorem = match scenario.constraint {
        Constraint::One => Theorem::XAllUnintended,
        Constraint::Two => Theorem::XAllButOne,
        Constraint::Three => Theorem::XCompromised,
        Constraint::Four => Theorem::XCompromisedAllButOne,
    };
    Ok(closed_form_dof(theorem, transmitters, receivers, 0, scenario.compromised.len())?.per_message)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::compute_dimensions;

    fn q(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn scenario_validation() {
        assert!(SecrecyScenario::all_unintended().validate(2).is_ok());
        assert!(SecrecyScenario::compromised([0].into_iter().collect()).validate(2).is_err());
        assert!(SecrecyScenario::compromised([0].into_iter().collect()).validate(3).is_ok());
        assert!(SecrecyScenario::compromised([0, 1].into_iter().collect()).validate(3).is_err());
        let sc = SecrecyScenario::compromised_all_but_one([1].into_iter().collect(), ExcludedTx::Fixed(1));
        assert!(sc.validate(4).is_err());
        let sc = SecrecyScenario { excluded: None, ..SecrecyScenario::all_but_one(ExcludedTx::WorstCase) };
        assert!(sc.validate(3).is_err());
    }

    #[test]
    fn divisors() {
        assert_eq!(SecrecyScenario::all_unintended().divisor(3, 2), 3);
        assert_eq!(SecrecyScenario::all_but_one(ExcludedTx::WorstCase).divisor(3, 3), 4);
        let s: BTreeSet<usize> = [2].into_iter().collect();
        assert_eq!(SecrecyScenario::compromised(s.clone()).divisor(4, 2), 3);
        assert_eq!(SecrecyScenario::compromised_all_but_one(s, ExcludedTx::WorstCase).divisor(4, 2), 2);
    }

    #[test]
    fn zero_power_rate_is_zero() {
        let d = compute_dimensions(2, 2, 1).unwrap();
        let e = achievable_rate(&SecrecyScenario::all_unintended(), 0.0, &[0.0, 0.0], &d).unwrap();
        assert_eq!(e.raw_rate, 0.0);
        assert!(!e.clamped);
    }

    #[test]
    fn negative_rate_is_clamped() {
        let d = compute_dimensions(3, 2, 1).unwrap();
        let e = achievable_rate(&SecrecyScenario::all_unintended(), 1.0, &[30.0, 10.0], &d).unwrap();
        assert!(e.raw_rate < 0.0 && e.clamped && e.rate == 0.0);
        assert_eq!(e.penalty_bits, 30.0);
    }

    #[test]
    fn equal_penalties_collapse_layers() {
        let d = compute_dimensions(2, 3, 1).unwrap();
        let split = rate_split(&[6.0, 6.0, 6.0], 20.0, &d, 0.01).unwrap();
        assert!(split.layer_rates.iter().all(|r| *r == 0.0));
        let f = d.extension as f64;
        assert!((split.r_dagger - (6.0 / (f * 4.0) - 0.01)).abs() < 1e-15);
    }

    #[test]
    fn split_sum_identity_and_order() {
        let d = compute_dimensions(3, 3, 1).unwrap();
        let split = rate_split(&[9.0, 2.5, 4.0], 31.0, &d, 0.0).unwrap();
        assert_eq!(split.ordering, vec![1, 2, 0]);
        assert!((split.total() - 31.0 / d.extension as f64).abs() < 1e-12);
        assert!(split.layer_rates.iter().all(|r| *r >= 0.0) && split.r_dagger >= 0.0);
    }

    #[test]
    fn split_rejects_wrong_length() {
        let d = compute_dimensions(2, 2, 1).unwrap();
        assert!(rate_split(&[1.0], 3.0, &d, 0.0).is_err());
    }

    #[test]
    fn closed_form_examples() {
        let v = closed_form_dof(Theorem::XAllUnintended, 3, 2, 0, 0).unwrap();
        assert_eq!((v.per_message, v.total), (q(1, 6), q(1, 1)));
        let v = closed_form_dof(Theorem::XCompromisedAllButOne, 4, 2, 0, 1).unwrap();
        assert_eq!((v.per_message, v.total), (q(1, 5), q(6, 5)));
        let v = closed_form_dof(Theorem::XAllButOne, 2, 2, 0, 0).unwrap();
        assert_eq!((v.per_message, v.total), (q(1, 3), q(4, 3)));
        let e = closed_form_dof(Theorem::IcCompromised, 0, 0, 5, 3).unwrap_err();
        assert!(matches!(e, Error::ConstraintViolation(ref m) if m.contains("|S| < K - 2")));
        assert!(closed_form_dof(Theorem::XCompromised, 3, 2, 0, 2).is_err());
    }

    #[test]
    fn theorem_labels_parse() {
        for t in Theorem::ALL {
            assert_eq!(t.label().parse::<Theorem>().unwrap(), t);
        }
        assert!("6".parse::<Theorem>().is_err());
    }

    #[test]
    fn finite_m_examples() {
        let c1 = SecrecyScenario::all_unintended();
        assert_eq!(finite_m_dof(&c1, 2, 2, 1, 0).unwrap(), q(1, 5));
        assert_eq!(finite_m_dof(&c1, 2, 2, 1, 1).unwrap(), q(0, 1));
        let c2 = SecrecyScenario::all_but_one(ExcludedTx::WorstCase);
        assert_eq!(finite_m_dof(&c2, 2, 2, 1, 1).unwrap(), q(0, 1));
        assert_eq!(finite_m_dof(&c2, 2, 3, 2, 0).unwrap(), q(4, 31));
        // M=3, m=1: 1 - 4/3 < 0 for secondary transmitters
        assert!(finite_m_dof(&c1, 3, 2, 1, 1).unwrap() < q(0, 1));
    }

    #[test]
    fn finite_m_sequence_decreases_to_limit() {
        let c1 = SecrecyScenario::all_unintended();
        let seq: Vec<Rational> = (1..=8).map(|m| finite_m_dof(&c1, 2, 2, m, 0).unwrap()).collect();
        let limit = limit_dof(&c1, 2, 2).unwrap();
        assert_eq!(limit, q(1, 6));
        assert!(seq.windows(2).all(|w| w[1] < w[0]));
        assert!(seq.iter().all(|v| *v > limit));
        assert!(to_f64((seq[7] - limit) / limit) < 0.1);
    }
}
