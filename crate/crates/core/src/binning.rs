//! Exhaustively enumerable random-binning laboratory.
//!
//! A toy layered codebook: `bins` message bins, each split into
//! `layers[0]` sub-bins, each of those into `layers[1]` sub-bins and so on,
//! with `leaves` codewords in every last-layer sub-bin. The encoder picks
//! every sub-bin index and the leaf uniformly. An optional independent
//! "own" codebook plays the receiver's desired signal, which the
//! eavesdropping receiver knows when the equivocation bound is derived.
//!
//! Codewords pass through a memoryless discrete channel whose input symbol
//! is `x * own_alphabet + u`. Every joint probability is enumerated, so all
//! entropies below are exact up to floating-point summation.

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on enumerated joint states (codeword x own codeword x output sequence).
pub const ENUMERATION_LIMIT: u128 = 10_000_000;
/// Tolerance for entropy identities and inequalities.
pub const CHAIN_TOL: f64 = 1e-12;

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodebookSpec {
    pub bins: usize,
    pub layers: Vec<usize>,
    pub leaves: usize,
    pub n: usize,
    pub input_alphabet: usize,
    pub output_alphabet: usize,
    #[serde(default = "one")]
    pub own_codewords: usize,
    #[serde(default = "one")]
    pub own_alphabet: usize,
    /// Symbol distribution for codeword draws; uniform when absent.
    #[serde(default)]
    pub input_distribution: Option<Vec<f64>>,
    /// Redraw until all codewords differ (needs `input_alphabet^n >= total`).
    #[serde(default)]
    pub distinct: bool,
    pub seed: u64,
}

impl CodebookSpec {
    pub fn total_codewords(&self) -> u128 {
        self.bins as u128 * self.layers.iter().map(|c| *c as u128).product::<u128>() * self.leaves as u128
    }

    /// Number of enumerated joint states.
    pub fn joint_states(&self) -> Option<u128> {
        let outputs = (self.output_alphabet as u128).checked_pow(self.n as u32)?;
        self.total_codewords().checked_mul(self.own_codewords as u128)?.checked_mul(outputs)
    }

    pub fn channel_inputs(&self) -> usize {
        self.input_alphabet * self.own_alphabet
    }
}

/// Index of one codeword: message bin, one sub-bin per layer, leaf.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FullIndex {
    pub bin: usize,
    pub sub_bins: Vec<usize>,
    pub leaf: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayeredCodebook {
    spec: CodebookSpec,
    /// Flat mixed-radix order: bin most significant, leaf least.
    codewords: Vec<Vec<u32>>,
    own: Vec<Vec<u32>>,
}

fn draw_word(rng: &mut ChaCha8Rng, n: usize, alphabet: usize, dist: Option<&WeightedIndex<f64>>) -> Vec<u32> {
    (0..n)
        .map(|_| match dist {
            Some(d) => d.sample(rng) as u32,
            None => rng.random_range(0..alphabet as u32),
        })
        .collect()
}

pub fn build_codebook(spec: &CodebookSpec) -> Result<LayeredCodebook> {
    let invalid = |m: String| Err(Error::InvalidConfig(m));
    if spec.bins == 0 || spec.leaves == 0 || spec.layers.contains(&0) {
        return invalid("bin, layer and leaf counts must be >= 1".into());
    }
    if spec.n == 0 || spec.input_alphabet == 0 || spec.output_alphabet == 0 {
        return invalid("n and alphabet sizes must be >= 1".into());
    }
    if spec.own_codewords == 0 || spec.own_alphabet == 0 {
        return invalid("own codebook size and alphabet must be >= 1".into());
    }
    match spec.joint_states() {
        Some(s) if s <= ENUMERATION_LIMIT => {}
        _ => {
            return Err(Error::EnumerationLimit(format!(
                "{} joint states exceed the limit of {ENUMERATION_LIMIT}",
                spec.joint_states().map_or("overflowing".to_string(), |s| s.to_string())
            )))
        }
    }
    let dist = match &spec.input_distribution {
        Some(w) if w.len() != spec.input_alphabet => {
            return invalid(format!("input distribution has {} weights for {} symbols", w.len(), spec.input_alphabet))
        }
        Some(w) => Some(WeightedIndex::new(w).map_err(|e| Error::InvalidConfig(format!("input distribution: {e}")))?),
        None => None,
    };
    let total = spec.total_codewords() as usize;
    if spec.distinct {
        let space = (spec.input_alphabet as u128).checked_pow(spec.n as u32);
        if space.is_some_and(|s| s < total as u128) {
            return invalid(format!("cannot draw {total} distinct codewords of length {}", spec.n));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut codewords: Vec<Vec<u32>> = Vec::with_capacity(total);
    let mut seen = std::collections::BTreeSet::new();
    while codewords.len() < total {
        let word = draw_word(&mut rng, spec.n, spec.input_alphabet, dist.as_ref());
        if spec.distinct && !seen.insert(word.clone()) {
            continue;
        }
        codewords.push(word);
    }
    let own = (0..spec.own_codewords)
        .map(|_| draw_word(&mut rng, spec.n, spec.own_alphabet, None))
        .collect();
    Ok(LayeredCodebook { spec: spec.clone(), codewords, own })
}

impl LayeredCodebook {
    pub fn spec(&self) -> &CodebookSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    pub fn own_codewords(&self) -> &[Vec<u32>] {
        &self.own
    }

    pub fn flat_index(&self, idx: &FullIndex) -> usize {
        let mut flat = idx.bin;
        for (b, count) in idx.sub_bins.iter().zip(&self.spec.layers) {
            flat = flat * count + b;
        }
        flat * self.spec.leaves + idx.leaf
    }

    pub fn full_index(&self, mut flat: usize) -> FullIndex {
        let leaf = flat % self.spec.leaves;
        flat /= self.spec.leaves;
        let mut sub_bins = vec![0; self.spec.layers.len()];
        for (slot, count) in sub_bins.iter_mut().zip(&self.spec.layers).rev() {
            *slot = flat % count;
            flat /= count;
        }
        FullIndex { bin: flat, sub_bins, leaf }
    }

    pub fn codeword(&self, idx: &FullIndex) -> &[u32] {
        &self.codewords[self.flat_index(idx)]
    }

    /// Stochastic encoder: uniform sub-bin in every layer, uniform leaf.
    pub fn encode<R: Rng>(&self, bin: usize, rng: &mut R) -> FullIndex {
        let sub_bins = self.spec.layers.iter().map(|c| rng.random_range(0..*c)).collect();
        let leaf = rng.random_range(0..self.spec.leaves);
        FullIndex { bin, sub_bins, leaf }
    }

    /// True when no two codewords coincide.
    pub fn is_injective(&self) -> bool {
        let mut words: Vec<&Vec<u32>> = self.codewords.iter().collect();
        words.sort();
        words.windows(2).all(|w| w[0] != w[1])
    }

    /// Index tuples sharing each `(bin, first revealed layers)` prefix.
    pub fn prefix_counts(&self, revealed: usize) -> BTreeMap<(usize, Vec<usize>), usize> {
        let mut counts = BTreeMap::new();
        for flat in 0..self.len() {
            let idx = self.full_index(flat);
            *counts.entry((idx.bin, idx.sub_bins[..revealed].to_vec())).or_insert(0) += 1;
        }
        counts
    }

    /// `prod_{k > revealed} layers[k] * leaves`.
    pub fn expected_prefix_count(&self, revealed: usize) -> usize {
        self.spec.layers[revealed..].iter().product::<usize>() * self.spec.leaves
    }
}

/// Row-stochastic transition matrix `rows[input][output]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteChannel {
    rows: Vec<Vec<f64>>,
}

impl DiscreteChannel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let width = rows.first().map(Vec::len).unwrap_or(0);
        if width == 0 || rows.iter().any(|r| r.len() != width) {
            return Err(Error::InvalidConfig("channel rows must be non-empty and equally long".into()));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.iter().any(|p| !(*p >= 0.0)) {
                return Err(Error::InvalidConfig(format!("channel row {i} has a negative entry")));
            }
            let s: f64 = r.iter().sum();
            if (s - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidConfig(format!("channel row {i} sums to {s}")));
            }
        }
        Ok(Self { rows })
    }

    pub fn identity(size: usize) -> Self {
        let rows = (0..size).map(|i| (0..size).map(|o| if i == o { 1.0 } else { 0.0 }).collect()).collect();
        Self { rows }
    }

    /// Binary symmetric channel.
    pub fn binary_symmetric(crossover: f64) -> Result<Self> {
        Self::new(vec![vec![1.0 - crossover, crossover], vec![crossover, 1.0 - crossover]])
    }

    /// Every input row equal to `output`: the output carries no information.
    pub fn constant(inputs: usize, output: Vec<f64>) -> Result<Self> {
        Self::new(vec![output; inputs])
    }

    pub fn inputs(&self) -> usize {
        self.rows.len()
    }

    pub fn outputs(&self) -> usize {
        self.rows[0].len()
    }

    pub fn prob(&self, input: usize, output: usize) -> f64 {
        self.rows[input][output]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }
}

/// Exact entropies for one revealed-layer prefix `B = (B^1..B^L)`.
/// `U` is the own codeword, `X` the eavesdropped codeword.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrefixTerms {
    pub revealed_layers: usize,
    /// H(W,Y|U)
    pub h_wy_given_u: f64,
    /// H(W,Y|U,B)
    pub h_wy_given_ub: f64,
    /// H(W,X,Y|U,B)
    pub h_wxy_given_ub: f64,
    /// H(X|W,Y,U,B), the Fano-side residual.
    pub fano_residual: f64,
    /// H(W,X|U,B)
    pub h_wx_given_ub: f64,
    /// H(Y|W,X,U,B)
    pub h_y_given_wxub: f64,
    /// H(W,X|B)
    pub h_wx_given_b: f64,
    /// H(Y|X,U)
    pub h_y_given_xu: f64,
    /// H(X|B)
    pub h_x_given_b: f64,
    /// I(X;Y|U)
    pub mi_xy_given_u: f64,
    /// H(X|B) - I(X;Y|U) - H(X|W,Y,U,B)
    pub lower_bound: f64,
    /// H(X|W,B)
    pub h_x_given_wb: f64,
    /// Smallest and largest number of index tuples behind one `(W, B)` prefix.
    pub prefix_count_min: usize,
    pub prefix_count_max: usize,
    pub expected_prefix_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivocationReport {
    /// H(W|Y)
    pub exact_equivocation_bits: f64,
    /// H(W)
    pub message_entropy_bits: f64,
    /// H(W|Y,U)
    pub equivocation_given_own_bits: f64,
    /// H(Y|U)
    pub h_y_given_u: f64,
    /// H(W) - H(W|Y)
    pub leakage_bits: f64,
    pub injective: bool,
    pub bins: usize,
    pub prefixes: Vec<PrefixTerms>,
}

impl EquivocationReport {
    /// `(H(X|B), I(X;Y|U), Fano residual, lower bound)` for every layer revealed.
    pub fn bound_terms(&self) -> (f64, f64, f64, f64) {
        let p = self.prefixes.last().expect("at least the empty prefix");
        (p.h_x_given_b, p.mi_xy_given_u, p.fano_residual, p.lower_bound)
    }
}

#[derive(Clone, Copy)]
enum Var {
    W,
    B,
    X,
    U,
    Y,
}

struct JointState {
    w: u64,
    /// Prefix key per revealed-layer count.
    prefix: Vec<u64>,
    x: u64,
    u: u64,
    y: u64,
    p: f64,
}

struct Joint {
    states: Vec<JointState>,
}

impl Joint {
    fn entropy(&self, vars: &[Var], revealed: usize) -> f64 {
        let mut marg: BTreeMap<[u64; 5], f64> = BTreeMap::new();
        for s in &self.states {
            let mut key = [u64::MAX; 5];
            for v in vars {
                match v {
                    Var::W => key[0] = s.w,
                    Var::B => key[1] = s.prefix[revealed],
                    Var::X => key[2] = s.x,
                    Var::U => key[3] = s.u,
                    Var::Y => key[4] = s.y,
                }
            }
            *marg.entry(key).or_insert(0.0) += s.p;
        }
        marg.values().filter(|p| **p > 0.0).map(|p| -p * p.log2()).sum()
    }

    fn cond(&self, of: &[Var], given: &[Var], revealed: usize) -> f64 {
        let joint: Vec<Var> = of.iter().chain(given).copied().collect();
        self.entropy(&joint, revealed) - self.entropy(given, revealed)
    }
}

fn content_ids(words: &[Vec<u32>]) -> Vec<u64> {
    let mut ids = BTreeMap::new();
    words
        .iter()
        .map(|w| {
            let next = ids.len() as u64;
            *ids.entry(w.clone()).or_insert(next)
        })
        .collect()
}

fn enumerate_joint(codebook: &LayeredCodebook, channel: &DiscreteChannel) -> Result<Joint> {
    let spec = codebook.spec();
    if channel.inputs() != spec.channel_inputs() || channel.outputs() != spec.output_alphabet {
        return Err(Error::ShapeMismatch(format!(
            "channel is {}x{}, codebook needs {}x{}",
            channel.inputs(),
            channel.outputs(),
            spec.channel_inputs(),
            spec.output_alphabet
        )));
    }
    match spec.joint_states() {
        Some(s) if s <= ENUMERATION_LIMIT => {}
        _ => return Err(Error::EnumerationLimit("codebook exceeds the enumeration guard".into())),
    }
    let x_ids = content_ids(&codebook.codewords);
    let u_ids = content_ids(&codebook.own);
    let outputs = spec.output_alphabet;
    let y_count = outputs.pow(spec.n as u32);
    let p_index = 1.0 / (codebook.len() as f64 * codebook.own.len() as f64);
    let mut states = Vec::with_capacity(codebook.len() * codebook.own.len() * y_count);
    for flat in 0..codebook.len() {
        let idx = codebook.full_index(flat);
        let prefix: Vec<u64> = (0..=spec.layers.len())
            .map(|l| {
                idx.sub_bins[..l]
                    .iter()
                    .zip(&spec.layers)
                    .fold(0u64, |acc, (b, c)| acc * *c as u64 + *b as u64)
            })
            .collect();
        let word = &codebook.codewords[flat];
        for (ui, own) in codebook.own.iter().enumerate() {
            for y in 0..y_count {
                let mut rest = y;
                let mut p = p_index;
                for t in 0..spec.n {
                    let out = rest % outputs;
                    rest /= outputs;
                    let input = word[t] as usize * spec.own_alphabet + own[t] as usize;
                    p *= channel.prob(input, out);
                }
                states.push(JointState {
                    w: idx.bin as u64,
                    prefix: prefix.clone(),
                    x: x_ids[flat],
                    u: u_ids[ui],
                    y: y as u64,
                    p,
                });
            }
        }
    }
    Ok(Joint { states })
}

pub fn exact_equivocation(codebook: &LayeredCodebook, channel: &DiscreteChannel) -> Result<EquivocationReport> {
    use Var::*;
    let joint = enumerate_joint(codebook, channel)?;
    let h_w = joint.entropy(&[W], 0);
    let h_w_given_y = joint.cond(&[W], &[Y], 0);
    let h_w_given_yu = joint.cond(&[W], &[Y, U], 0);
    let h_y_given_u = joint.cond(&[Y], &[U], 0);
    let spec = codebook.spec();
    let prefixes = (0..=spec.layers.len())
        .map(|l| {
            let fano_residual = joint.cond(&[X], &[W, Y, U, B], l);
            let h_x_given_b = joint.cond(&[X], &[B], l);
            let h_y_given_xu = joint.cond(&[Y], &[X, U], l);
            let mi_xy_given_u = h_y_given_u - h_y_given_xu;
            let counts = codebook.prefix_counts(l);
            PrefixTerms {
                revealed_layers: l,
                h_wy_given_u: joint.cond(&[W, Y], &[U], l),
                h_wy_given_ub: joint.cond(&[W, Y], &[U, B], l),
                h_wxy_given_ub: joint.cond(&[W, X, Y], &[U, B], l),
                fano_residual,
                h_wx_given_ub: joint.cond(&[W, X], &[U, B], l),
                h_y_given_wxub: joint.cond(&[Y], &[W, X, U, B], l),
                h_wx_given_b: joint.cond(&[W, X], &[B], l),
                h_y_given_xu,
                h_x_given_b,
                mi_xy_given_u,
                lower_bound: h_x_given_b - mi_xy_given_u - fano_residual,
                h_x_given_wb: joint.cond(&[X], &[W, B], l),
                prefix_count_min: counts.values().copied().min().unwrap_or(0),
                prefix_count_max: counts.values().copied().max().unwrap_or(0),
                expected_prefix_count: codebook.expected_prefix_count(l),
            }
        })
        .collect();
    Ok(EquivocationReport {
        exact_equivocation_bits: h_w_given_y,
        message_entropy_bits: h_w,
        equivocation_given_own_bits: h_w_given_yu,
        h_y_given_u,
        leakage_bits: h_w - h_w_given_y,
        injective: codebook.is_injective(),
        bins: spec.bins,
        prefixes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StepKind {
    /// `lhs == rhs` within tolerance.
    Identity,
    /// `lhs >= rhs` within tolerance.
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepCheck {
    pub name: String,
    pub revealed_layers: Option<usize>,
    pub kind: StepKind,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs - rhs`.
    pub slack: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainVerdict {
    pub steps: Vec<StepCheck>,
    pub passed: bool,
}

impl ChainVerdict {
    pub fn failures(&self) -> impl Iterator<Item = &StepCheck> {
        self.steps.iter().filter(|s| !s.holds)
    }
}

fn step(name: &str, revealed: Option<usize>, kind: StepKind, lhs: f64, rhs: f64) -> StepCheck {
    let slack = lhs - rhs;
    let holds = match kind {
        StepKind::Identity => slack.abs() <= CHAIN_TOL,
        StepKind::AtLeast => slack >= -CHAIN_TOL,
    };
    StepCheck { name: name.to_string(), revealed_layers: revealed, kind, lhs, rhs, slack, holds }
}

/// Re-checks every step of the equivocation lower-bound chain, plus the
/// codeword counting identity for each revealed prefix.
pub fn verify_bound_chain(report: &EquivocationReport) -> ChainVerdict {
    use StepKind::*;
    let mut steps = vec![
        step("range: H(W) >= H(W|Y)", None, AtLeast, report.message_entropy_bits, report.exact_equivocation_bits),
        step("range: H(W|Y) >= 0", None, AtLeast, report.exact_equivocation_bits, 0.0),
        step(
            "conditioning: H(W|Y) >= H(W|Y,U)",
            None,
            AtLeast,
            report.exact_equivocation_bits,
            report.equivocation_given_own_bits,
        ),
    ];
    for p in &report.prefixes {
        let l = Some(p.revealed_layers);
        steps.push(step(
            "chain: H(W|Y,U) = H(W,Y|U) - H(Y|U)",
            l,
            Identity,
            report.equivocation_given_own_bits,
            p.h_wy_given_u - report.h_y_given_u,
        ));
        steps.push(step("conditioning: H(W,Y|U) >= H(W,Y|U,B)", l, AtLeast, p.h_wy_given_u, p.h_wy_given_ub));
        steps.push(step(
            "chain: H(W,Y|U,B) = H(W,X,Y|U,B) - H(X|W,Y,U,B)",
            l,
            Identity,
            p.h_wy_given_ub,
            p.h_wxy_given_ub - p.fano_residual,
        ));
        steps.push(step(
            "chain: H(W,X,Y|U,B) = H(W,X|U,B) + H(Y|W,X,U,B)",
            l,
            Identity,
            p.h_wxy_given_ub,
            p.h_wx_given_ub + p.h_y_given_wxub,
        ));
        steps.push(step("independence: H(W,X|U,B) = H(W,X|B)", l, Identity, p.h_wx_given_ub, p.h_wx_given_b));
        steps.push(step("markov: H(Y|W,X,U,B) = H(Y|X,U)", l, Identity, p.h_y_given_wxub, p.h_y_given_xu));
        steps.push(step("monotonicity: H(W,X|B) >= H(X|B)", l, AtLeast, p.h_wx_given_b, p.h_x_given_b));
        steps.push(step("bound: H(W|Y) >= lower bound", l, AtLeast, report.exact_equivocation_bits, p.lower_bound));
        steps.push(step(
            "counting: tuples per prefix (min)",
            l,
            Identity,
            p.prefix_count_min as f64,
            p.expected_prefix_count as f64,
        ));
        steps.push(step(
            "counting: tuples per prefix (max)",
            l,
            Identity,
            p.prefix_count_max as f64,
            p.expected_prefix_count as f64,
        ));
        let log_count = (p.expected_prefix_count as f64).log2();
        if report.injective {
            steps.push(step("counting: H(X|W,B) = log2 count", l, Identity, p.h_x_given_wb, log_count));
            steps.push(step(
                "counting: H(X|B) = log2(bins * count)",
                l,
                Identity,
                p.h_x_given_b,
                (report.bins as f64).log2() + log_count,
            ));
        } else {
            steps.push(step("counting: log2 count >= H(X|W,B)", l, AtLeast, log_count, p.h_x_given_wb));
        }
    }
    let passed = steps.iter().all(|s| s.holds);
    ChainVerdict { steps, passed }
}

/// Exact joint pmf over a tuple of messages and one observation, indexed
/// `(w_0, .., w_{k-1}, y)` in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MessageJoint {
    alphabets: Vec<usize>,
    observations: usize,
    probs: Vec<f64>,
}

impl MessageJoint {
    pub fn new(alphabets: Vec<usize>, observations: usize, probs: Vec<f64>) -> Result<Self> {
        let size = alphabets.iter().product::<usize>() * observations;
        if alphabets.is_empty() || alphabets.contains(&0) || observations == 0 || probs.len() != size {
            return Err(Error::InvalidConfig(format!("joint needs {size} probabilities, got {}", probs.len())));
        }
        if probs.iter().any(|p| !(*p >= 0.0)) || (probs.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig("joint is not a probability distribution".into()));
        }
        Ok(Self { alphabets, observations, probs })
    }

    pub fn components(&self) -> usize {
        self.alphabets.len()
    }

    fn decode(&self, mut flat: usize) -> (Vec<usize>, usize) {
        let y = flat % self.observations;
        flat /= self.observations;
        let mut w = vec![0; self.alphabets.len()];
        for (slot, a) in w.iter_mut().zip(&self.alphabets).rev() {
            *slot = flat % a;
            flat /= a;
        }
        (w, y)
    }

    /// `H(W_S)` and `H(W_S | Y)` for the components selected by `mask`.
    pub fn subset_entropies(&self, mask: u64) -> (f64, f64) {
        let mut with_y: BTreeMap<(Vec<usize>, usize), f64> = BTreeMap::new();
        let mut y_only: BTreeMap<usize, f64> = BTreeMap::new();
        let mut w_only: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for (flat, &p) in self.probs.iter().enumerate() {
            let (w, y) = self.decode(flat);
            let sel: Vec<usize> = w.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, v)| *v).collect();
            *with_y.entry((sel.clone(), y)).or_insert(0.0) += p;
            *y_only.entry(y).or_insert(0.0) += p;
            *w_only.entry(sel).or_insert(0.0) += p;
        }
        let h = |it: &mut dyn Iterator<Item = f64>| -> f64 { it.filter(|p| *p > 0.0).map(|p| -p * p.log2()).sum() };
        let h_w = h(&mut w_only.values().copied());
        let h_wy = h(&mut with_y.values().copied());
        let h_y = h(&mut y_only.values().copied());
        (h_w, h_wy - h_y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetSecrecyOutcome {
    /// `H(W_all|Y) >= H(W_all) - eps`.
    pub premise_holds: bool,
    pub premise_slack: f64,
    /// Smallest `H(W_S|Y) - H(W_S) + eps` over non-empty subsets.
    pub worst_slack: f64,
    pub worst_subset: Vec<usize>,
    pub subsets_checked: usize,
    /// No subset violates the conclusion while the premise holds.
    pub lemma_holds: bool,
}

/// Independence tolerance for `H(W_all) = sum_s H(W_s)`.
pub const INDEPENDENCE_TOL: f64 = 1e-10;

pub fn subset_secrecy_check(joint: &MessageJoint, epsilon: f64) -> Result<SubsetSecrecyOutcome> {
    let k = joint.components();
    if k > 20 {
        return Err(Error::EnumerationLimit(format!("{k} message components")));
    }
    let full = (1u64 << k) - 1;
    let (h_all, h_all_given_y) = joint.subset_entropies(full);
    let h_sum: f64 = (0..k).map(|s| joint.subset_entropies(1 << s).0).sum();
    if (h_all - h_sum).abs() > INDEPENDENCE_TOL {
        return Err(Error::NotIndependent(format!(
            "H(W_all) = {h_all} but the component entropies sum to {h_sum}"
        )));
    }
    let premise_slack = h_all_given_y - h_all + epsilon;
    let premise_holds = premise_slack >= 0.0;
    let mut worst_slack = f64::INFINITY;
    let mut worst_mask = full;
    for mask in 1..=full {
        let (h_s, h_s_given_y) = joint.subset_entropies(mask);
        let slack = h_s_given_y - h_s + epsilon;
        if slack < worst_slack {
            worst_slack = slack;
            worst_mask = mask;
        }
    }
    let worst_subset = (0..k).filter(|i| worst_mask >> i & 1 == 1).collect();
    Ok(SubsetSecrecyOutcome {
        premise_holds,
        premise_slack,
        worst_slack,
        worst_subset,
        subsets_checked: full as usize,
        lemma_holds: !premise_holds || worst_slack >= -CHAIN_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(bins: usize, layers: Vec<usize>, leaves: usize, n: usize) -> CodebookSpec {
        CodebookSpec {
            bins,
            layers,
            leaves,
            n,
            input_alphabet: 2,
            output_alphabet: 2,
            own_codewords: 1,
            own_alphabet: 1,
            input_distribution: None,
            distinct: false,
            seed: 3,
        }
    }

    #[test]
    fn codebook_counts() {
        let cb = build_codebook(&spec(2, vec![1], 1, 1)).unwrap();
        assert_eq!(cb.len(), 2);
        let cb = build_codebook(&spec(2, vec![2], 2, 2)).unwrap();
        assert_eq!(cb.len(), 8);
        assert!(cb.codewords.iter().all(|w| w.len() == 2));
    }

    #[test]
    fn codebook_is_deterministic() {
        let s = spec(3, vec![2, 2], 2, 3);
        assert_eq!(build_codebook(&s).unwrap(), build_codebook(&s).unwrap());
        let other = CodebookSpec { seed: 4, ..s.clone() };
        assert_ne!(build_codebook(&s).unwrap(), build_codebook(&other).unwrap());
    }

    #[test]
    fn enumeration_guard() {
        let mut s = spec(64, vec![64], 64, 4);
        s.output_alphabet = 8;
        assert!(matches!(build_codebook(&s), Err(Error::EnumerationLimit(_))));
    }

    #[test]
    fn distinct_codebook_is_injective() {
        let s = CodebookSpec { distinct: true, ..spec(2, vec![2], 2, 3) };
        assert!(build_codebook(&s).unwrap().is_injective());
        let s = CodebookSpec { distinct: true, ..spec(2, vec![2], 2, 2) };
        assert!(build_codebook(&s).is_err());
    }

    #[test]
    fn index_round_trip_and_encoder_range() {
        let cb = build_codebook(&spec(3, vec![2, 3], 2, 1)).unwrap();
        for flat in 0..cb.len() {
            assert_eq!(cb.flat_index(&cb.full_index(flat)), flat);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let idx = cb.encode(2, &mut rng);
            assert_eq!(idx.bin, 2);
            assert!(idx.sub_bins[0] < 2 && idx.sub_bins[1] < 3 && idx.leaf < 2);
        }
    }

    #[test]
    fn channel_validation() {
        assert!(DiscreteChannel::new(vec![vec![0.5, 0.6]]).is_err());
        assert!(DiscreteChannel::new(vec![vec![1.5, -0.5]]).is_err());
        assert!(DiscreteChannel::new(vec![vec![1.0], vec![0.5, 0.5]]).is_err());
        assert!(DiscreteChannel::binary_symmetric(0.1).is_ok());
    }

    #[test]
    fn noiseless_channel_reveals_message() {
        let s = CodebookSpec { distinct: true, ..spec(2, vec![1], 1, 2) };
        let cb = build_codebook(&s).unwrap();
        let rep = exact_equivocation(&cb, &DiscreteChannel::identity(2)).unwrap();
        assert!(rep.exact_equivocation_bits.abs() < 1e-12);
        assert!((rep.message_entropy_bits - 1.0).abs() < 1e-12);
        assert!(rep.prefixes.iter().all(|p| p.fano_residual.abs() < 1e-12));
    }

    #[test]
    fn useless_channel_keeps_message_secret() {
        let cb = build_codebook(&spec(2, vec![2], 2, 2)).unwrap();
        let ch = DiscreteChannel::constant(2, vec![0.3, 0.7]).unwrap();
        let rep = exact_equivocation(&cb, &ch).unwrap();
        assert!((rep.exact_equivocation_bits - rep.message_entropy_bits).abs() < 1e-12);
        assert!(rep.leakage_bits.abs() < 1e-12);
        let (_, mi, _, _) = rep.bound_terms();
        assert!(mi.abs() < 1e-12);
        assert!(verify_bound_chain(&rep).passed);
    }

    #[test]
    fn channel_shape_checked() {
        let cb = build_codebook(&spec(2, vec![1], 1, 1)).unwrap();
        assert!(matches!(exact_equivocation(&cb, &DiscreteChannel::identity(3)), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn chain_holds_with_own_signal() {
        let s = CodebookSpec { own_codewords: 2, own_alphabet: 2, ..spec(2, vec![2], 2, 2) };
        let cb = build_codebook(&s).unwrap();
        let ch = DiscreteChannel::new(vec![
            vec![0.8, 0.2],
            vec![0.3, 0.7],
            vec![0.6, 0.4],
            vec![0.1, 0.9],
        ])
        .unwrap();
        let rep = exact_equivocation(&cb, &ch).unwrap();
        let verdict = verify_bound_chain(&rep);
        assert!(verdict.passed, "{:?}", verdict.failures().collect::<Vec<_>>());
        assert_eq!(rep.prefixes.len(), 2);
    }

    fn independent_joint(leak: f64) -> MessageJoint {
        // two independent bits, Y = W_0 XOR W_1 through a noisy mixture
        let pw = [[0.5, 0.5], [0.3, 0.7]];
        let mut probs = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                let x = a ^ b;
                for y in 0..2 {
                    let py = (1.0 - leak) * 0.5 + leak * if y == x { 1.0 } else { 0.0 };
                    probs.push(pw[0][a] * pw[1][b] * py);
                }
            }
        }
        MessageJoint::new(vec![2, 2], 2, probs).unwrap()
    }

    #[test]
    fn subset_lemma_independent_observation() {
        let out = subset_secrecy_check(&independent_joint(0.0), 0.05).unwrap();
        assert!(out.premise_holds && out.lemma_holds);
        assert!((out.worst_slack - 0.05).abs() < 1e-12);
        assert_eq!(out.subsets_checked, 3);
    }

    #[test]
    fn subset_lemma_with_leakage() {
        let joint = independent_joint(0.3);
        let (h_all, h_all_y) = joint.subset_entropies(0b11);
        let eps = h_all - h_all_y + 1e-3;
        let out = subset_secrecy_check(&joint, eps).unwrap();
        assert!(out.premise_holds && out.lemma_holds);
    }

    #[test]
    fn subset_lemma_single_message() {
        let joint = MessageJoint::new(vec![2], 2, vec![0.4, 0.1, 0.1, 0.4]).unwrap();
        let out = subset_secrecy_check(&joint, 0.0).unwrap();
        assert!(!out.premise_holds);
        assert!((out.worst_slack - out.premise_slack).abs() < 1e-15);
    }

    #[test]
    fn dependent_messages_rejected() {
        // W_1 = W_0
        let probs = vec![0.25, 0.25, 0.0, 0.0, 0.0, 0.0, 0.25, 0.25];
        let joint = MessageJoint::new(vec![2, 2], 2, probs).unwrap();
        assert!(matches!(subset_secrecy_check(&joint, 0.1), Err(Error::NotIndependent(_))));
    }
}
