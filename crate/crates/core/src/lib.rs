//! Secure degrees of freedom of X networks via real-free vector alignment.
//!
//! Pipeline: [`netmodel`] draws symbol-extended channels, [`alignment`]
//! builds monomial precoders and certifies the rank conditions, [`mi`]
//! evaluates Gaussian mutual information, and [`rates`] turns that into
//! per-message secure rates and DoF. [`binning`] is a small exact lab for
//! the layered random-binning equivocation bound.

pub mod alignment;
pub mod binning;
pub mod error;
pub mod linalg;
pub mod mi;
pub mod netmodel;
pub mod rates;

pub use alignment::{build_precoders, check_alignment, AlignmentReport, PrecoderSet, ReceiverAlignment};
pub use binning::{
    build_codebook, exact_equivocation, subset_secrecy_check, verify_bound_chain, CodebookSpec, DiscreteChannel,
    EquivocationReport, LayeredCodebook, MessageJoint,
};
pub use error::{Error, Result};
pub use mi::{desired_mi, gaussian_mi, secrecy_penalty, EffectiveChannelSet, MessageId, MessageSet, MiQuery, MiResult};
pub use netmodel::{
    allocate_power, compute_dimensions, draw_extended_channel, DimensionSummary, ExtendedChannel, NetworkConfig,
    PowerAllocation, C64,
};
pub use rates::{
    closed_form_dof, evaluate_rates, rate_split, Constraint, DofValue, ExcludedTx, RateSplit, Rational,
    SecrecyScenario, SecureRateReport, Theorem,
};
