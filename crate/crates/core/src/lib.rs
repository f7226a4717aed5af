//! Exact uniform sampling of weighted integer partitions with Boltzmann
//! samplers and rejection, including the three-color condensate model.
//!
//! The numeric layers ([`ogf`], [`tuner`], [`analysis`]) are generic over the
//! floating-point type; the `*64` and `*32` aliases fix it. Samplers work in
//! `f64`.
//!
//! ```
//! use boltzpart::{ExactSampler, RandomSource, SamplerStats};
//!
//! let sampler = ExactSampler::bec(50).unwrap();
//! let mut rng = RandomSource::seeded(7);
//! let p = sampler.sample(&mut rng, &mut SamplerStats::default()).unwrap();
//! assert_eq!(p.size(), 50);
//! ```

pub mod analysis;
pub mod class;
pub mod distributions;
pub mod error;
pub mod ogf;
pub mod oracle;
pub mod partition;
pub mod rng;
pub mod samplers;
pub mod scalar;
pub mod tuner;

pub use analysis::{
    acceptance_lower_bound, condition_iii_witness, dirichlet_profile, forward_differences, local_limit_probability,
    zeta_real, ConditionIiiPoint, DirichletProfile, NewtonCoefficients, Pole,
};
pub use class::{multichoose, ClassKind, ClassSpec};
pub use error::{Error, Result};
pub use ogf::OgfTable;
pub use oracle::{chi_square_goodness_of_fit, chi_square_two_sample, chi_square_uniformity, count, enumerate, ChiSquare, ConfigurationList, CountTable};
pub use partition::{CanonicalKey, EnergyState, Partition, Summand, SummandType};
pub use rng::RandomSource;
pub use samplers::{
    sample_bec_exact, sample_colored_summand, sample_multiset_class, sample_weighted_exact, Batch, BatchRecord,
    ColoredSummands, ExactSampler, Generator, IndependentSampler, MultisetSampler, SamplerOptions, SamplerStats,
    SummandClass, WeightedSummands,
};
pub use scalar::Real;
pub use tuner::{tune, tune_table, tuning_window, Tuned, TuningWindow};

pub type OgfTable64 = OgfTable<f64>;
pub type OgfTable32 = OgfTable<f32>;
pub type Tuned64 = Tuned<f64>;
pub type Tuned32 = Tuned<f32>;
pub type TuningWindow64 = TuningWindow<f64>;
pub type DirichletProfile64 = DirichletProfile<f64>;
pub type DirichletProfile32 = DirichletProfile<f32>;
