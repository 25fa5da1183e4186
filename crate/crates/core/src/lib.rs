//! Generalized bounded variation toolkit: weight and Schramm sequences,
//! exact and bounded variation functionals on step functions, embedding
//! criteria, counterexample constructions and an inequality lab.
//!
//! Numeric code is generic over [`scalar::Real`]; the aliases below fix the
//! scalar for the common cases.

pub mod counterexamples;
pub mod criteria;
pub mod error;
pub mod inequality;
pub mod roots;
pub mod scalar;
pub mod seq;
pub mod step_fn;
pub mod variation;

pub use error::{Error, Result};

pub type StepFunction64 = step_fn::StepFunction<f64>;
pub type StepFunction32 = step_fn::StepFunction<f32>;
pub type IntervalCollection64 = step_fn::IntervalCollection<f64>;
pub type WeightSequence64 = seq::WeightSequence<f64>;
pub type WeightSequence32 = seq::WeightSequence<f32>;
pub type SchrammFamily64 = seq::SchrammFamily<f64>;
pub type SchrammFamily32 = seq::SchrammFamily<f32>;
pub type VariationResult64 = variation::VariationResult<f64>;
pub type VariationResult32 = variation::VariationResult<f32>;
pub type CriterionReport64 = criteria::CriterionReport<f64>;
pub type ConstructionSpec64 = counterexamples::ConstructionSpec<f64>;
pub type CertificationReport64 = counterexamples::CertificationReport<f64>;
pub type TripleSample64 = inequality::TripleSample<f64>;
pub type TripleSample32 = inequality::TripleSample<f32>;
pub type ExactCheck = inequality::ExactCheck<num_rational::BigRational>;
