//! Asymptotic interference-alignment precoders for the X network and the
//! rank census that certifies them.
//!
//! For the messages intended for receiver `j`, every transmitter `i >= 1` and
//! every other receiver `k` contributes one relative channel
//! `T = H_k0^{-1} H_ki`. Precoder columns are monomials `prod_s T_s^{a_s}`
//! applied to a group base vector: exponents range over `{0..m}` for
//! transmitter 0 and over `{0..m-1}` for the rest. Since every `T` is
//! diagonal they commute, so `H_ki v(a) = H_k0 v(a + e_s)`: the interference
//! of transmitter `i` at receiver `k` lands exactly on columns of transmitter
//! 0's interference.
//!
//! The base vector of group `j` is `H_j0^{-1} 1` rather than the plain
//! all-ones vector. With a shared all-ones base the `a = 0` column of every
//! group arrives at receiver `k` as `H_k0 1`, once as desired signal and once
//! as interference, and the joint rank drops below `F`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{diag_mul, hstack, numerical_rank};
use crate::netmodel::{DimensionSummary, ExtendedChannel, C64};

/// One relative channel `H_{k0}^{-1} H_{ki}` of a message group.
#[derive(Debug, Clone, PartialEq)]
pub struct RelativeChannel {
    pub tx: usize,
    pub rx: usize,
    pub diagonal: Vec<C64>,
}

/// Relative channels grouped by intended receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct RelativeChannelSet {
    groups: Vec<Vec<RelativeChannel>>,
}

impl RelativeChannelSet {
    pub fn group(&self, j: usize) -> &[RelativeChannel] {
        &self.groups[j]
    }

    pub fn groups(&self) -> usize {
        self.groups.len()
    }

    /// Exponent slot of the pair `(tx, rx)` inside group `j`.
    pub fn slot(&self, j: usize, tx: usize, rx: usize) -> Option<usize> {
        self.groups[j].iter().position(|t| t.tx == tx && t.rx == rx)
    }
}

pub fn build_relative_channels(channel: &ExtendedChannel) -> Result<RelativeChannelSet> {
    if channel.iter_gains().any(|g| g.norm() == 0.0) {
        return Err(Error::Degenerate("channel contains a zero gain".into()));
    }
    let (n_rx, n_tx) = (channel.receivers(), channel.transmitters());
    let groups = (0..n_rx)
        .map(|j| {
            let mut group = Vec::with_capacity((n_tx - 1) * (n_rx - 1));
            for tx in 1..n_tx {
                for rx in (0..n_rx).filter(|&k| k != j) {
                    let diagonal = channel
                        .diagonal(rx, tx)
                        .iter()
                        .zip(channel.diagonal(rx, 0))
                        .map(|(hi, h0)| hi / h0)
                        .collect();
                    group.push(RelativeChannel { tx, rx, diagonal });
                }
            }
            group
        })
        .collect();
    Ok(RelativeChannelSet { groups })
}

/// Precoders `V_ji`, indexed `[j][i]`, with the exponent tuple behind each column.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecoderSet {
    matrices: Vec<Vec<DMatrix<C64>>>,
    exponents: Vec<Vec<Vec<Vec<u32>>>>,
    relative: RelativeChannelSet,
}

impl PrecoderSet {
    pub fn matrix(&self, j: usize, tx: usize) -> &DMatrix<C64> {
        &self.matrices[j][tx]
    }

    pub fn column_exponents(&self, j: usize, tx: usize) -> &[Vec<u32>] {
        &self.exponents[j][tx]
    }

    pub fn relative_channels(&self) -> &RelativeChannelSet {
        &self.relative
    }

    pub fn receivers(&self) -> usize {
        self.matrices.len()
    }

    pub fn transmitters(&self) -> usize {
        self.matrices[0].len()
    }
}

/// All tuples in `{0..base-1}^len`, first coordinate varying fastest.
pub fn exponent_tuples(base: u32, len: u32) -> Vec<Vec<u32>> {
    let count = (base as usize).pow(len);
    (0..count)
        .map(|mut idx| {
            (0..len)
                .map(|_| {
                    let d = (idx % base as usize) as u32;
                    idx /= base as usize;
                    d
                })
                .collect()
        })
        .collect()
}

/// Column position of `tuple` in the enumeration produced by [`exponent_tuples`].
pub fn tuple_index(tuple: &[u32], base: u32) -> usize {
    tuple.iter().rev().fold(0usize, |acc, &d| acc * base as usize + d as usize)
}

/// Unnormalized monomial `prod_s T_s^{a_s} * base`.
pub fn monomial(group: &[RelativeChannel], exponents: &[u32], base: &[C64]) -> Vec<C64> {
    base.iter()
        .enumerate()
        .map(|(f, b)| {
            group
                .iter()
                .zip(exponents)
                .fold(*b, |acc, (t, &a)| acc * t.diagonal[f].powu(a))
        })
        .collect()
}

/// Base vector of group `j`: `H_j0^{-1} 1`.
pub fn group_base(channel: &ExtendedChannel, j: usize) -> Vec<C64> {
    channel.diagonal(j, 0).iter().map(|h| h.inv()).collect()
}

fn check_shapes(channel: &ExtendedChannel, dims: &DimensionSummary) -> Result<()> {
    if channel.receivers() != dims.receivers
        || channel.transmitters() != dims.transmitters
        || channel.extension() as u64 != dims.extension
    {
        return Err(Error::ShapeMismatch(format!(
            "channel is {}x{} over {} slots, dimensions expect {}x{} over {}",
            channel.receivers(),
            channel.transmitters(),
            channel.extension(),
            dims.receivers,
            dims.transmitters,
            dims.extension
        )));
    }
    Ok(())
}

pub fn build_precoders(channel: &ExtendedChannel, dims: &DimensionSummary) -> Result<PrecoderSet> {
    check_shapes(channel, dims)?;
    let relative = build_relative_channels(channel)?;
    let f = dims.extension as usize;
    let mut matrices = Vec::with_capacity(dims.receivers);
    let mut exponents = Vec::with_capacity(dims.receivers);
    for j in 0..dims.receivers {
        let group = relative.group(j);
        let base_vec = group_base(channel, j);
        let mut per_tx = Vec::with_capacity(dims.transmitters);
        let mut per_tx_exp = Vec::with_capacity(dims.transmitters);
        for tx in 0..dims.transmitters {
            let base = if tx == 0 { dims.m + 1 } else { dims.m };
            let tuples = exponent_tuples(base, dims.gamma);
            let mut v = DMatrix::zeros(f, tuples.len());
            for (c, alpha) in tuples.iter().enumerate() {
                let col = monomial(group, alpha, &base_vec);
                let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                for (r, z) in col.into_iter().enumerate() {
                    v[(r, c)] = z / norm;
                }
            }
            per_tx.push(v);
            per_tx_exp.push(tuples);
        }
        matrices.push(per_tx);
        exponents.push(per_tx_exp);
    }
    Ok(PrecoderSet { matrices, exponents, relative })
}

/// Interference column of `(group, tx)` at some receiver that aligns with a
/// column of `(group, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AlignmentLink {
    pub group: usize,
    pub tx: usize,
    pub column: usize,
    pub target_column: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReceiverAlignment {
    pub receiver: usize,
    pub interference_rank: usize,
    pub desired_rank: usize,
    pub joint_rank: usize,
    pub alignment_residual_max: f64,
    pub alignment_map: Vec<AlignmentLink>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlignmentReport {
    pub tolerance: f64,
    pub expected_interference_rank: usize,
    pub expected_desired_rank: usize,
    pub expected_joint_rank: usize,
    pub receivers: Vec<ReceiverAlignment>,
    /// Some rank fell below its generic value.
    pub degenerate: bool,
    /// Every mapped pair was collinear to within the tolerance.
    pub aligned: bool,
}

impl AlignmentReport {
    /// Fails with `Degenerate` on a rank shortfall, `NumericalFailure` on a
    /// collinearity miss.
    pub fn certify(&self) -> Result<()> {
        if self.degenerate {
            let bad: Vec<String> = self
                .receivers
                .iter()
                .filter(|r| {
                    r.interference_rank < self.expected_interference_rank
                        || r.desired_rank < self.expected_desired_rank
                        || r.joint_rank < self.expected_joint_rank
                })
                .map(|r| {
                    format!(
                        "receiver {}: ranks ({}, {}, {})",
                        r.receiver, r.interference_rank, r.desired_rank, r.joint_rank
                    )
                })
                .collect();
            return Err(Error::Degenerate(bad.join("; ")));
        }
        if !self.aligned {
            return Err(Error::NumericalFailure(format!(
                "alignment residual above tolerance {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

/// Relative distance of `a` from the line spanned by `b`.
pub fn collinearity_residual(a: &[C64], b: &[C64]) -> f64 {
    let bb: f64 = b.iter().map(|z| z.norm_sqr()).sum();
    let aa: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    if aa == 0.0 {
        return 0.0;
    }
    if bb == 0.0 {
        return 1.0;
    }
    let proj: C64 = b.iter().zip(a).map(|(x, y)| x.conj() * y).sum::<C64>() / bb;
    let resid: f64 = a.iter().zip(b).map(|(y, x)| (y - proj * x).norm_sqr()).sum();
    (resid / aa).sqrt()
}

pub fn check_alignment(
    channel: &ExtendedChannel,
    precoders: &PrecoderSet,
    dims: &DimensionSummary,
    tol: f64,
) -> Result<AlignmentReport> {
    check_shapes(channel, dims)?;
    if precoders.receivers() != dims.receivers || precoders.transmitters() != dims.transmitters {
        return Err(Error::ShapeMismatch("precoder set does not match dimensions".into()));
    }
    let f = dims.extension as usize;
    let relative = precoders.relative_channels();
    let mut receivers = Vec::with_capacity(dims.receivers);
    for k in 0..dims.receivers {
        // received[j][i] = H_ki V_ji
        let received: Vec<Vec<DMatrix<C64>>> = (0..dims.receivers)
            .map(|j| {
                (0..dims.transmitters)
                    .map(|i| diag_mul(channel.diagonal(k, i), precoders.matrix(j, i)))
                    .collect()
            })
            .collect();
        let interference: Vec<&DMatrix<C64>> = (0..dims.receivers)
            .filter(|&j| j != k)
            .flat_map(|j| received[j].iter())
            .collect();
        let desired: Vec<&DMatrix<C64>> = received[k].iter().collect();
        let all: Vec<&DMatrix<C64>> = received.iter().flatten().collect();
        let interference_rank = numerical_rank(&hstack(&interference, f), tol);
        let desired_rank = numerical_rank(&hstack(&desired, f), tol);
        let joint_rank = numerical_rank(&hstack(&all, f), tol);

        let mut residual_max: f64 = 0.0;
        let mut alignment_map = Vec::new();
        for j in (0..dims.receivers).filter(|&j| j != k) {
            for tx in 1..dims.transmitters {
                let slot = relative
                    .slot(j, tx, k)
                    .ok_or_else(|| Error::ShapeMismatch(format!("missing relative channel ({j},{tx},{k})")))?;
                for (c, alpha) in precoders.column_exponents(j, tx).iter().enumerate() {
                    let mut shifted = alpha.clone();
                    shifted[slot] += 1;
                    let target = tuple_index(&shifted, dims.m + 1);
                    let a: Vec<C64> = received[j][tx].column(c).iter().copied().collect();
                    let b: Vec<C64> = received[j][0].column(target).iter().copied().collect();
                    residual_max = residual_max.max(collinearity_residual(&a, &b));
                    alignment_map.push(AlignmentLink { group: j, tx, column: c, target_column: target });
                }
            }
        }
        receivers.push(ReceiverAlignment {
            receiver: k,
            interference_rank,
            desired_rank,
            joint_rank,
            alignment_residual_max: residual_max,
            alignment_map,
        });
    }
    let expected_interference_rank = dims.interference_dim() as usize;
    let expected_desired_rank = dims.desired_dim() as usize;
    let expected_joint_rank = f;
    let degenerate = receivers.iter().any(|r| {
        r.interference_rank < expected_interference_rank
            || r.desired_rank < expected_desired_rank
            || r.joint_rank < expected_joint_rank
    });
    let aligned = receivers.iter().all(|r| r.alignment_residual_max < tol);
    Ok(AlignmentReport {
        tolerance: tol,
        expected_interference_rank,
        expected_desired_rank,
        expected_joint_rank,
        receivers,
        degenerate,
        aligned,
    })
}
