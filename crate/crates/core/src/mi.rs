//! Gaussian mutual information between stream groups and a receiver's
//! extended observation, by log-determinants of received covariances.
//!
//! All streams are independent circularly-symmetric Gaussians, so
//! conditioning on a message removes its term from the covariance:
//!
//! `I(A; Y_k | C) = log2 det K(excl. C) - log2 det K(excl. C u A)`
//!
//! where `K(excl. E) = I + sum_{(r,i) not in E} p_i G_{k,(r,i)} G_{k,(r,i)}^H`.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::alignment::PrecoderSet;
use crate::error::{Error, Result};
use crate::linalg::diag_mul;
use crate::netmodel::{DimensionSummary, ExtendedChannel, PowerAllocation, C64};
use crate::rates::{Constraint, ExcludedTx, SecrecyScenario};

/// Message `W_{rx,tx}`: from transmitter `tx` to receiver `rx`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct MessageId {
    pub rx: usize,
    pub tx: usize,
}

impl MessageId {
    pub fn new(rx: usize, tx: usize) -> Self {
        Self { rx, tx }
    }
}

pub type MessageSet = BTreeSet<MessageId>;

/// Product set `receivers x transmitters`.
pub fn product_set(
    receivers: impl IntoIterator<Item = usize>,
    transmitters: impl IntoIterator<Item = usize> + Clone,
) -> MessageSet {
    receivers
        .into_iter()
        .flat_map(|rx| transmitters.clone().into_iter().map(move |tx| MessageId { rx, tx }))
        .collect()
}

/// `G_{k,(r,i)} = H_ki V_ri` for every receiver `k` and message `(r,i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannelSet {
    dims: DimensionSummary,
    gains: Vec<Vec<Vec<DMatrix<C64>>>>,
}

impl EffectiveChannelSet {
    pub fn new(channel: &ExtendedChannel, precoders: &PrecoderSet, dims: &DimensionSummary) -> Result<Self> {
        if channel.receivers() != dims.receivers
            || channel.transmitters() != dims.transmitters
            || channel.extension() as u64 != dims.extension
            || precoders.receivers() != dims.receivers
            || precoders.transmitters() != dims.transmitters
        {
            return Err(Error::ShapeMismatch("channel, precoders and dimensions disagree".into()));
        }
        let gains = (0..dims.receivers)
            .map(|k| {
                (0..dims.receivers)
                    .map(|r| {
                        (0..dims.transmitters)
                            .map(|i| diag_mul(channel.diagonal(k, i), precoders.matrix(r, i)))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(Self { dims: *dims, gains })
    }

    pub fn dims(&self) -> &DimensionSummary {
        &self.dims
    }

    pub fn gain(&self, k: usize, msg: MessageId) -> &DMatrix<C64> {
        &self.gains[k][msg.rx][msg.tx]
    }

    pub fn all_messages(&self) -> MessageSet {
        product_set(0..self.dims.receivers, 0..self.dims.transmitters)
    }

    fn contains(&self, msg: &MessageId) -> bool {
        msg.rx < self.dims.receivers && msg.tx < self.dims.transmitters
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiQuery {
    pub receiver: usize,
    pub target: MessageSet,
    pub conditioned: MessageSet,
    pub power: PowerAllocation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MiResult {
    pub value_bits: f64,
    pub at_power: f64,
}

/// Negative round-off below this magnitude is clamped to zero.
pub const MI_CLAMP_GUARD: f64 = 1e-9;

pub fn received_covariance(
    effective: &EffectiveChannelSet,
    receiver: usize,
    excluded: &MessageSet,
    power: &PowerAllocation,
) -> Result<DMatrix<C64>> {
    let dims = effective.dims();
    if receiver >= dims.receivers || power.per_stream.len() != dims.transmitters {
        return Err(Error::ShapeMismatch(format!("receiver {receiver} or power allocation out of range")));
    }
    if let Some(bad) = excluded.iter().find(|m| !effective.contains(m)) {
        return Err(Error::ShapeMismatch(format!("unknown message {bad:?}")));
    }
    let f = dims.extension as usize;
    let mut cov = DMatrix::<C64>::identity(f, f);
    for msg in effective.all_messages().difference(excluded) {
        let p = power.stream_power(msg.tx);
        if p == 0.0 {
            continue;
        }
        let g = effective.gain(receiver, *msg);
        cov.gemm(C64::new(p, 0.0), g, &g.adjoint(), C64::new(1.0, 0.0));
    }
    // the rank-one updates leave tiny anti-Hermitian round-off
    let herm = (&cov + cov.adjoint()) * C64::new(0.5, 0.0);
    Ok(herm)
}

/// `log2 det` of a Hermitian positive-definite matrix via Cholesky.
pub fn log2_det_hpd(matrix: DMatrix<C64>) -> Result<f64> {
    let chol = matrix
        .cholesky()
        .ok_or_else(|| Error::NumericalFailure("covariance is not positive definite".into()))?;
    let l = chol.l_dirty();
    // complex sqrt never fails, so a non-positive pivot shows up as a non-real diagonal
    let mut acc = 0.0;
    for d in 0..l.nrows() {
        let z = l[(d, d)];
        if !(z.re > 0.0) || z.im.abs() > 1e-12 * z.re {
            return Err(Error::NumericalFailure("covariance is not positive definite".into()));
        }
        acc += z.re.log2();
    }
    Ok(2.0 * acc)
}

pub fn gaussian_mi(query: &MiQuery, effective: &EffectiveChannelSet) -> Result<MiResult> {
    if !query.target.is_disjoint(&query.conditioned) {
        return Err(Error::InvalidScenario("target and conditioned sets overlap".into()));
    }
    let at_power = query.power.total;
    if query.target.is_empty() {
        return Ok(MiResult { value_bits: 0.0, at_power });
    }
    let with_target = received_covariance(effective, query.receiver, &query.conditioned, &query.power)?;
    let without: MessageSet = query.conditioned.union(&query.target).copied().collect();
    let without_target = received_covariance(effective, query.receiver, &without, &query.power)?;
    let value = log2_det_hpd(with_target)? - log2_det_hpd(without_target)?;
    let value_bits = if value < 0.0 {
        if value < -MI_CLAMP_GUARD {
            return Err(Error::NumericalFailure(format!("mutual information {value} bits is negative")));
        }
        0.0
    } else {
        value
    };
    Ok(MiResult { value_bits, at_power })
}

/// `I(X_{msg}; Y_{msg.rx})` with every other stream present.
pub fn desired_mi(effective: &EffectiveChannelSet, msg: MessageId, power: &PowerAllocation) -> Result<MiResult> {
    let query = MiQuery {
        receiver: msg.rx,
        target: [msg].into_iter().collect(),
        conditioned: MessageSet::new(),
        power: power.clone(),
    };
    gaussian_mi(&query, effective)
}

/// Target and conditioned sets of a penalty term at receiver `k`, with a
/// concrete excluded transmitter where the constraint uses one.
pub fn penalty_sets(
    scenario: &SecrecyScenario,
    k: usize,
    excluded: Option<usize>,
    dims: &DimensionSummary,
) -> (MessageSet, MessageSet) {
    let others = (0..dims.receivers).filter(move |&r| r != k);
    let all_tx: Vec<usize> = (0..dims.transmitters).collect();
    let kept: Vec<usize> = all_tx.iter().copied().filter(|i| !scenario.compromised.contains(i)).collect();
    let compromised: Vec<usize> = scenario.compromised.iter().copied().collect();
    let drop_l = |set: &[usize]| -> Vec<usize> { set.iter().copied().filter(|&i| Some(i) != excluded).collect() };
    match scenario.constraint {
        Constraint::One => (product_set(others, all_tx.clone()), product_set([k], all_tx)),
        Constraint::Two => (product_set(others, drop_l(&all_tx)), product_set([k], all_tx)),
        Constraint::Three | Constraint::Four => {
            let targets = if scenario.constraint == Constraint::Three { kept.clone() } else { drop_l(&kept) };
            let mut conditioned = product_set([k], kept);
            conditioned.extend(product_set(0..dims.receivers, compromised));
            (product_set(others, targets), conditioned)
        }
    }
}

/// Secrecy penalty at receiver `k`. With `ExcludedTx::WorstCase` the
/// maximum over admissible excluded transmitters is returned.
pub fn secrecy_penalty(
    scenario: &SecrecyScenario,
    k: usize,
    effective: &EffectiveChannelSet,
    power: &PowerAllocation,
) -> Result<MiResult> {
    let dims = effective.dims();
    scenario.validate(dims.transmitters)?;
    if k >= dims.receivers {
        return Err(Error::ShapeMismatch(format!("receiver {k} out of range")));
    }
    let candidates: Vec<Option<usize>> = match scenario.excluded {
        None => vec![None],
        Some(ExcludedTx::Fixed(l)) => vec![Some(l)],
        Some(ExcludedTx::WorstCase) => (0..dims.transmitters)
            .filter(|i| !scenario.compromised.contains(i))
            .map(Some)
            .collect(),
    };
    let mut best: Option<MiResult> = None;
    for l in candidates {
        let (target, conditioned) = penalty_sets(scenario, k, l, dims);
        let query = MiQuery { receiver: k, target, conditioned, power: power.clone() };
        let r = gaussian_mi(&query, effective)?;
        if best.is_none_or(|b| r.value_bits > b.value_bits) {
            best = Some(r);
        }
    }
    Ok(best.expect("at least one candidate"))
}

/// Prelog estimate `(I_high - I_low) / (log2 P_high - log2 P_low)`.
pub fn dof_slope(low: &MiResult, high: &MiResult) -> Result<f64> {
    if !(high.at_power > low.at_power) || low.at_power <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "slope needs 0 < low power < high power, got {} and {}",
            low.at_power, high.at_power
        )));
    }
    Ok((high.value_bits - low.value_bits) / (high.at_power.log2() - low.at_power.log2()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alignment::build_precoders;
    use crate::netmodel::{allocate_power, draw_extended_channel, NetworkConfig, DEFAULT_MAGNITUDE_RANGE};

    fn effective(m_tx: usize, n_rx: usize, m: u32, seed: u64) -> EffectiveChannelSet {
        let cfg = NetworkConfig::from_db(m_tx, n_rx, m, seed, &[60.0], DEFAULT_MAGNITUDE_RANGE).unwrap();
        let h = draw_extended_channel(&cfg);
        let d = cfg.dimensions();
        let v = build_precoders(&h, &d).unwrap();
        EffectiveChannelSet::new(&h, &v, &d).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn covariance_noise_only_cases() {
        let eff = effective(2, 2, 1, 1);
        let p = allocate_power(100.0, eff.dims()).unwrap();
        let cov = received_covariance(&eff, 0, &eff.all_messages(), &p).unwrap();
        assert_eq!(cov, DMatrix::identity(5, 5));
        let silent = PowerAllocation::silent(2);
        let cov = received_covariance(&eff, 1, &MessageSet::new(), &silent).unwrap();
        assert_eq!(cov, DMatrix::identity(5, 5));
    }

    #[test]
    fn covariance_trace_grows_with_power() {
        let eff = effective(2, 2, 1, 1);
        let p = allocate_power(100.0, eff.dims()).unwrap();
        let cov = received_covariance(&eff, 0, &MessageSet::new(), &p).unwrap();
        let trace: f64 = (0..5).map(|d| cov[(d, d)].re).sum();
        assert!(trace >= 5.0 + 1.0);
        assert!((&cov - cov.adjoint()).norm() < 1e-9);
    }

    #[test]
    fn empty_target_and_zero_power_give_zero() {
        let eff = effective(2, 2, 1, 2);
        let p = allocate_power(1e6, eff.dims()).unwrap();
        let q = MiQuery { receiver: 0, target: MessageSet::new(), conditioned: MessageSet::new(), power: p };
        assert_eq!(gaussian_mi(&q, &eff).unwrap().value_bits, 0.0);
        let r = desired_mi(&eff, MessageId::new(0, 0), &PowerAllocation::silent(2)).unwrap();
        assert_eq!(r.value_bits, 0.0);
    }

    #[test]
    fn overlapping_sets_rejected() {
        let eff = effective(2, 2, 1, 2);
        let p = allocate_power(10.0, eff.dims()).unwrap();
        let s: MessageSet = [MessageId::new(1, 0)].into_iter().collect();
        let q = MiQuery { receiver: 0, target: s.clone(), conditioned: s, power: p };
        assert!(matches!(gaussian_mi(&q, &eff), Err(Error::InvalidScenario(_))));
    }

    #[test]
    fn log_det_rejects_indefinite() {
        let mut m = DMatrix::<C64>::identity(2, 2);
        m[(1, 1)] = C64::new(-1.0, 0.0);
        assert!(matches!(log2_det_hpd(m), Err(Error::NumericalFailure(_))));
    }

    #[test]
    fn slope_definitions() {
        let lo = MiResult { value_bits: 3.0, at_power: 1e6 };
        let hi = MiResult { value_bits: 3.0, at_power: 1e8 };
        assert_eq!(dof_slope(&lo, &hi).unwrap(), 0.0);
        let lo = MiResult { value_bits: 1e6f64.log2(), at_power: 1e6 };
        let hi = MiResult { value_bits: 1e8f64.log2(), at_power: 1e8 };
        assert!(close(dof_slope(&lo, &hi).unwrap(), 1.0, 1e-12));
        assert!(dof_slope(&hi, &hi).is_err());
    }

    #[test]
    fn penalty_sets_match_constraints() {
        let eff = effective(3, 2, 1, 3);
        let d = eff.dims();
        let (t, c) = penalty_sets(&SecrecyScenario::all_unintended(), 0, None, d);
        assert_eq!(t, product_set([1], 0..3));
        assert_eq!(c, product_set([0], 0..3));
        let sc = SecrecyScenario::all_but_one(ExcludedTx::Fixed(1));
        let (t, _) = penalty_sets(&sc, 0, Some(1), d);
        assert_eq!(t, product_set([1], [0, 2]));
        let sc = SecrecyScenario::compromised([2].into_iter().collect());
        let (t, c) = penalty_sets(&sc, 1, None, d);
        assert_eq!(t, product_set([0], [0, 1]));
        let mut expect = product_set([1], [0, 1]);
        expect.extend(product_set(0..2, [2]));
        assert_eq!(c, expect);
        let sc = SecrecyScenario::compromised_all_but_one([2].into_iter().collect(), ExcludedTx::Fixed(0));
        let (t, _) = penalty_sets(&sc, 1, Some(0), d);
        assert_eq!(t, product_set([0], [1]));
    }

    #[test]
    fn chain_rule_small_instances() {
        for seed in 0..4 {
            let eff = effective(3, 2, 1, seed);
            let p = allocate_power(1e3, eff.dims()).unwrap();
            let a: MessageSet = product_set([1], [0]);
            let b: MessageSet = product_set([1], [1, 2]);
            let c: MessageSet = product_set([0], [0, 2]);
            let mi = |t: &MessageSet, cond: &MessageSet| {
                let q = MiQuery { receiver: 0, target: t.clone(), conditioned: cond.clone(), power: p.clone() };
                gaussian_mi(&q, &eff).unwrap().value_bits
            };
            let ab: MessageSet = a.union(&b).copied().collect();
            let ca: MessageSet = c.union(&a).copied().collect();
            assert!(close(mi(&ab, &c), mi(&a, &c) + mi(&b, &ca), 1e-6));
        }
    }

    #[test]
    fn constraint_three_without_compromise_equals_constraint_one() {
        let eff = effective(3, 2, 1, 6);
        let p = allocate_power(1e6, eff.dims()).unwrap();
        for k in 0..2 {
            let a = secrecy_penalty(&SecrecyScenario::all_unintended(), k, &eff, &p).unwrap();
            let b = secrecy_penalty(&SecrecyScenario::compromised(BTreeSet::new()), k, &eff, &p).unwrap();
            assert_eq!(a.value_bits, b.value_bits);
        }
    }

    #[test]
    fn oversized_compromise_rejected() {
        let eff = effective(3, 2, 1, 6);
        let p = allocate_power(1e6, eff.dims()).unwrap();
        let sc = SecrecyScenario::compromised([1, 2].into_iter().collect());
        assert!(matches!(secrecy_penalty(&sc, 0, &eff, &p), Err(Error::InvalidScenario(_))));
    }
}
