//! Grammatical error annotation and evaluation over Universal Dependencies
//! input.
//!
//! The pipeline is: CoNLL-U sentence pairs ([`conllu`]) are aligned
//! ([`align`]), aligned operations are merged into edits ([`edit`]), edits are
//! typed by a language-agnostic core ([`typology`]) refined by a language
//! profile ([`profile`]), written as M2 ([`m2`]) and scored ([`scorer`]).
//!
//! Costs, similarities and scores are generic over [`Scalar`]; the aliases
//! below fix the common choices.

pub mod align;
pub mod annotate;
pub mod cli;
pub mod conllu;
pub mod edit;
pub mod lcs;
pub mod m2;
pub mod profile;
mod scalar;
pub mod scorer;
pub mod similarity;
pub mod typology;

pub use scalar::Scalar;

pub use num_rational::Rational64;

pub type Cost = f64;
pub type CostConfig = align::CostConfig<f64>;
pub type ExactCostConfig = align::CostConfig<Rational64>;
pub type AlignmentOp = align::AlignmentOp<f64>;
pub type Thresholds = similarity::ThresholdConfig<f64>;
pub type ExactThresholds = similarity::ThresholdConfig<Rational64>;
pub type Settings = annotate::Settings<f64>;
pub type Prf = scorer::Prf<f64>;
