//! Coupled random environments: static i.i.d. weights and the dynamical
//! Poisson-clock environment.

mod distribution;
mod field;
mod mixing;

pub use distribution::DistributionSpec;
pub use field::{
    y_statistic, DynamicalWeightField, EdgeTimeline, EdgeWeights, Envelope, EnvelopePair, TimeSlice,
    WeightField,
};
pub use mixing::{hash_key, replica_seed, uniform, STREAM_CLOCK, STREAM_WEIGHT};
