//! Subcommand bodies. Each returns named artifacts; `main` decides whether
//! they go to files or stdout.

use serde::Serialize;

use sdof::alignment::AlignmentReport;
use sdof::linalg::DEFAULT_RANK_TOL;
use sdof::rates::{to_f64, ExcludedTx};
use sdof::{
    build_codebook, build_precoders, check_alignment, closed_form_dof, draw_extended_channel, evaluate_rates,
    exact_equivocation, verify_bound_chain, Constraint, DiscreteChannel, Error, SecrecyScenario, Theorem,
};

use crate::args::{parse_seeds, BinlabArgs, DofTableArgs, NetworkArgs, RatesArgs};
use crate::config::{read_json, BinlabFile, NetworkRun};
use crate::error::CliError;

pub struct Artifact {
    pub name: String,
    pub contents: String,
}

fn csv_artifact<T: Serialize>(name: &str, rows: &[T]) -> Result<Artifact, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    let contents = String::from_utf8(bytes).map_err(|e| CliError::Config(e.to_string()))?;
    Ok(Artifact { name: name.to_string(), contents })
}

#[derive(Serialize)]
struct DimsRow {
    #[serde(rename = "M")]
    transmitters: usize,
    #[serde(rename = "N")]
    receivers: usize,
    m: u32,
    gamma: u32,
    #[serde(rename = "F")]
    extension: u64,
    m1: u64,
    mi: u64,
    interference_dim: u64,
    desired_dim: u64,
}

pub fn dims(args: &NetworkArgs) -> Result<Vec<Artifact>, CliError> {
    let run = NetworkRun::resolve(args)?;
    let d = run.configs[0].dimensions();
    let row = DimsRow {
        transmitters: d.transmitters,
        receivers: d.receivers,
        m: d.m,
        gamma: d.gamma,
        extension: d.extension,
        m1: d.m1,
        mi: d.mi,
        interference_dim: d.interference_dim(),
        desired_dim: d.desired_dim(),
    };
    Ok(vec![csv_artifact("dims.csv", &[row])?])
}

#[derive(Serialize)]
struct LinkOut {
    group: usize,
    tx: usize,
    column: usize,
    target_column: usize,
}

#[derive(Serialize)]
struct ReceiverOut {
    receiver: usize,
    interference_rank: usize,
    desired_rank: usize,
    joint_rank: usize,
    alignment_residual_max: f64,
    alignment_map: Vec<LinkOut>,
}

#[derive(Serialize)]
struct AlignOut {
    #[serde(rename = "M")]
    transmitters: usize,
    #[serde(rename = "N")]
    receivers: usize,
    m: u32,
    seed: u64,
    gamma: u32,
    #[serde(rename = "F")]
    extension: u64,
    tolerance: f64,
    expected_interference_rank: usize,
    expected_desired_rank: usize,
    expected_joint_rank: usize,
    degenerate: bool,
    aligned: bool,
    per_receiver: Vec<ReceiverOut>,
}

/// Receivers, groups and transmitters are 1-based; column positions stay 0-based.
fn align_out(report: &AlignmentReport, cfg: &sdof::NetworkConfig) -> AlignOut {
    let d = cfg.dimensions();
    AlignOut {
        transmitters: d.transmitters,
        receivers: d.receivers,
        m: d.m,
        seed: cfg.seed(),
        gamma: d.gamma,
        extension: d.extension,
        tolerance: report.tolerance,
        expected_interference_rank: report.expected_interference_rank,
        expected_desired_rank: report.expected_desired_rank,
        expected_joint_rank: report.expected_joint_rank,
        degenerate: report.degenerate,
        aligned: report.aligned,
        per_receiver: report
            .receivers
            .iter()
            .map(|r| ReceiverOut {
                receiver: r.receiver + 1,
                interference_rank: r.interference_rank,
                desired_rank: r.desired_rank,
                joint_rank: r.joint_rank,
                alignment_residual_max: r.alignment_residual_max,
                alignment_map: r
                    .alignment_map
                    .iter()
                    .map(|l| LinkOut { group: l.group + 1, tx: l.tx + 1, column: l.column, target_column: l.target_column })
                    .collect(),
            })
            .collect(),
    }
}

/// Emits every report, then fails with `DEGENERATE_CHANNEL` if any seed was degenerate.
pub fn align(args: &NetworkArgs) -> Result<(Vec<Artifact>, Option<CliError>), CliError> {
    let run = NetworkRun::resolve(args)?;
    let mut artifacts = Vec::with_capacity(run.configs.len());
    let mut degenerate = Vec::new();
    for cfg in &run.configs {
        let d = cfg.dimensions();
        let channel = draw_extended_channel(cfg);
        let precoders = build_precoders(&channel, &d)?;
        let report = check_alignment(&channel, &precoders, &d, DEFAULT_RANK_TOL)?;
        if report.degenerate {
            degenerate.push(cfg.seed().to_string());
        }
        let mut contents = serde_json::to_string_pretty(&align_out(&report, cfg))?;
        contents.push('\n');
        artifacts.push(Artifact { name: format!("align_seed_{}.json", cfg.seed()), contents });
    }
    let failure = (!degenerate.is_empty())
        .then(|| CliError::Core(Error::Degenerate(format!("rank shortfall for seeds {}", degenerate.join(",")))));
    Ok((artifacts, failure))
}

#[derive(Serialize)]
struct RateRow {
    constraint: u8,
    compromised: String,
    excluded_tx: String,
    #[serde(rename = "M")]
    transmitters: usize,
    #[serde(rename = "N")]
    receivers: usize,
    m: u32,
    seed: u64,
    j: usize,
    i: usize,
    snr_db: f64,
    desired_mi_bits: f64,
    penalty_bits: f64,
    raw_rate_bits_per_dim: f64,
    rate_bits_per_dim: f64,
    clamped: bool,
    estimated_dof: Option<f64>,
    finite_m_dof: f64,
    limit_dof: f64,
}

pub fn scenario_from_args(args: &RatesArgs) -> Result<SecrecyScenario, CliError> {
    let constraint = Constraint::from_number(args.constraint)?;
    let compromised = args
        .compromised
        .iter()
        .map(|&i| {
            i.checked_sub(1)
                .ok_or_else(|| CliError::Config("transmitter indices are 1-based".into()))
        })
        .collect::<Result<_, _>>()?;
    let mut scenario = SecrecyScenario::with_constraint(constraint, compromised);
    if let Some(text) = &args.excluded_tx {
        let excluded = if text == "worst" {
            ExcludedTx::WorstCase
        } else {
            let l: usize = text
                .parse()
                .ok()
                .filter(|l| *l >= 1)
                .ok_or_else(|| CliError::Config(format!("--excluded-tx expects a 1-based index or `worst`, got {text:?}")))?;
            ExcludedTx::Fixed(l - 1)
        };
        scenario.excluded = Some(excluded);
    }
    Ok(scenario)
}

pub fn rates(args: &RatesArgs) -> Result<Vec<Artifact>, CliError> {
    let run = NetworkRun::resolve(&args.network)?;
    let scenario = scenario_from_args(args)?;
    let compromised = scenario.compromised.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(";");
    let excluded_tx = match scenario.excluded {
        None => String::new(),
        Some(ExcludedTx::WorstCase) => "worst".to_string(),
        Some(ExcludedTx::Fixed(l)) => (l + 1).to_string(),
    };
    let mut rows = Vec::new();
    for cfg in &run.configs {
        let report = evaluate_rates(cfg, &scenario)?;
        let d = report.dims;
        for msg in &report.messages {
            for (entry, db) in msg.entries.iter().zip(&run.snr_db) {
                rows.push(RateRow {
                    constraint: scenario.constraint.number(),
                    compromised: compromised.clone(),
                    excluded_tx: excluded_tx.clone(),
                    transmitters: d.transmitters,
                    receivers: d.receivers,
                    m: d.m,
                    seed: report.seed,
                    j: msg.message.rx + 1,
                    i: msg.message.tx + 1,
                    snr_db: *db,
                    desired_mi_bits: entry.desired_mi_bits,
                    penalty_bits: entry.penalty_bits,
                    raw_rate_bits_per_dim: entry.raw_rate,
                    rate_bits_per_dim: entry.rate,
                    clamped: entry.clamped,
                    estimated_dof: msg.estimated_dof,
                    finite_m_dof: msg.finite_m_dof,
                    limit_dof: msg.limit_dof,
                });
            }
        }
    }
    Ok(vec![csv_artifact("rates.csv", &rows)?])
}

#[derive(Serialize)]
struct DofRow {
    theorem: &'static str,
    #[serde(rename = "M")]
    transmitters: Option<usize>,
    #[serde(rename = "N")]
    receivers: Option<usize>,
    #[serde(rename = "K")]
    users: Option<usize>,
    #[serde(rename = "S")]
    compromised: usize,
    per_message: String,
    total: String,
    total_decimal: f64,
}

const GRID_MN: [usize; 3] = [2, 3, 4];
const GRID_K: [usize; 3] = [3, 4, 5];

/// Legal compromised-set sizes of a theorem at one grid point.
fn legal_sizes(theorem: Theorem, transmitters: usize, users: usize) -> Vec<usize> {
    match theorem {
        Theorem::XCompromised | Theorem::XCompromisedAllButOne => (0..=transmitters - 2).collect(),
        Theorem::IcCompromised => (0..users - 2).collect(),
        _ => vec![0],
    }
}

pub fn dof_table(args: &DofTableArgs) -> Result<Vec<Artifact>, CliError> {
    let theorems: Vec<Theorem> = match &args.theorem {
        Some(t) => vec![t.parse()?],
        None => Theorem::ALL.to_vec(),
    };
    let pick = |given: Option<usize>, grid: &[usize]| given.map_or_else(|| grid.to_vec(), |v| vec![v]);
    let mut rows = Vec::new();
    for theorem in theorems {
        let points: Vec<(usize, usize, usize)> = if theorem.is_x_network() {
            let mut p = Vec::new();
            for m in pick(args.transmitters, &GRID_MN) {
                for n in pick(args.receivers, &GRID_MN) {
                    p.push((m, n, 0));
                }
            }
            p
        } else {
            pick(args.users, &GRID_K).into_iter().map(|k| (0, 0, k)).collect()
        };
        for (m, n, k) in points {
            let sizes = match args.compromised {
                Some(s) => vec![s],
                None => legal_sizes(theorem, m.max(2), k.max(2)),
            };
            for s in sizes {
                let dof = closed_form_dof(theorem, m, n, k, s)?;
                let x = theorem.is_x_network();
                rows.push(DofRow {
                    theorem: theorem.label(),
                    transmitters: x.then_some(m),
                    receivers: x.then_some(n),
                    users: (!x).then_some(k),
                    compromised: s,
                    per_message: dof.per_message.to_string(),
                    total: dof.total.to_string(),
                    total_decimal: to_f64(dof.total),
                });
            }
        }
    }
    Ok(vec![csv_artifact("dof_table.csv", &rows)?])
}

#[derive(Serialize)]
struct BinlabRow {
    seed: u64,
    revealed_layers: usize,
    injective: bool,
    message_entropy_bits: f64,
    exact_equivocation_bits: f64,
    leakage_bits: f64,
    h_x_given_b: f64,
    mi_xy_given_u: f64,
    fano_residual: f64,
    lower_bound: f64,
    bound_slack: f64,
    prefix_count: usize,
    counting_exact: bool,
    max_identity_error: f64,
    chain_passed: bool,
}

pub fn binlab(args: &BinlabArgs) -> Result<Vec<Artifact>, CliError> {
    let file: BinlabFile = read_json(&args.config)?;
    let channel = DiscreteChannel::new(file.channel.clone())?;
    let seeds = match &args.seeds {
        Some(s) => parse_seeds(s)?,
        None => vec![file.codebook.seed],
    };
    let mut rows = Vec::new();
    for seed in seeds {
        let spec = sdof::CodebookSpec { seed, ..file.codebook.clone() };
        let codebook = build_codebook(&spec)?;
        let report = exact_equivocation(&codebook, &channel)?;
        let verdict = verify_bound_chain(&report);
        for p in &report.prefixes {
            let max_identity_error = verdict
                .steps
                .iter()
                .filter(|s| s.revealed_layers == Some(p.revealed_layers) && s.kind == sdof::binning::StepKind::Identity)
                .map(|s| s.slack.abs())
                .fold(0.0, f64::max);
            rows.push(BinlabRow {
                seed,
                revealed_layers: p.revealed_layers,
                injective: report.injective,
                message_entropy_bits: report.message_entropy_bits,
                exact_equivocation_bits: report.exact_equivocation_bits,
                leakage_bits: report.leakage_bits,
                h_x_given_b: p.h_x_given_b,
                mi_xy_given_u: p.mi_xy_given_u,
                fano_residual: p.fano_residual,
                lower_bound: p.lower_bound,
                bound_slack: report.exact_equivocation_bits - p.lower_bound,
                prefix_count: p.expected_prefix_count,
                counting_exact: p.prefix_count_min == p.expected_prefix_count
                    && p.prefix_count_max == p.expected_prefix_count,
                max_identity_error,
                chain_passed: verdict.passed,
            });
        }
    }
    Ok(vec![csv_artifact("binlab.csv", &rows)?])
}
