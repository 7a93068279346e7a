// Negated comparisons are used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit;
pub mod classifier;
pub mod io;
pub mod learner;
pub mod metrics;
pub mod numerics;
pub mod params;
pub mod pipeline;
pub mod rng;
pub mod stabilizer;
