//! Boltzmann samplers and exact-size rejection.

mod exact;
mod independent;
mod multiset;
mod stats;

pub use exact::{sample_bec_exact, sample_weighted_exact, Batch, BatchRecord, ExactSampler, SamplerOptions, RETRY_CAP_FACTOR};
pub use independent::{Generator, IndependentSampler};
pub use multiset::{
    sample_colored_summand, sample_multiset_class, ColoredSummands, MultisetSampler, SummandClass, WeightedSummands,
    INNER_RETRY_CAP,
};
pub use stats::SamplerStats;
