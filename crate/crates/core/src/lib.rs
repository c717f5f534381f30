//! Loss analysis for chains of interface adapters.
//!
//! Each method of an interface takes one argument whose values are grouped
//! into abstract values. An adapter records, for every combination of
//! abstract values the source interface can handle, which abstract values
//! each target method can then handle. Adapting a whole availability vector
//! is the union of that dependency function over the Cartesian product of the
//! vector's components, and chains compose by ordinary function composition.
//!
//! - [`model`]: interfaces, lifted domains, adapters, the adapter graph
//! - [`semantics`]: availability vectors, adaptation, pipelines, tables
//! - [`search`]: chain scoring, best-first search, exhaustive oracle
//! - [`generator`]: seeded random instances
//! - [`document`]: the JSON graph format

pub mod document;
pub mod error;
pub mod fixtures;
pub mod generator;
pub mod model;
pub mod search;
pub mod semantics;

pub use document::{parse_document, render_document, GraphDocument};
pub use error::{Error, Result};
pub use generator::{random_instance, GenParams, GeneratedInstance, SplitMix64};
pub use model::{
    AbstractDomain, AbstractValue, Adapter, AdapterGraph, DependencyEntry, Interface, MethodSpec,
    ValueSet, BOTTOM,
};
pub use search::{
    count_abstract, enumerate_chains, greedy_chain, oracle_optimal, ChainResult, WeightMap,
    DEFAULT_ORACLE_LIMIT,
};
pub use semantics::{
    apply_adaptation, function_sizes, tabulate_adaptation, tabulate_pipeline, AdaptationPipeline,
    AvailabilityVector, FunctionSizes, TabulatedAdaptation, DEFAULT_TABULATE_CAP,
};
