//! Analytic copula and marginal models, deterministic sampling, and the
//! CLI model mini-language.

pub mod copula;
pub mod marginal;
pub mod numeric;
pub mod parse;
pub mod rng;

pub use copula::{simulate_bivariate, CopulaModel, NoisyLineMixture};
pub use marginal::MarginalModel;
pub use parse::{parse_copula_spec, parse_marginal_spec};
pub use rng::SplitMix64;
