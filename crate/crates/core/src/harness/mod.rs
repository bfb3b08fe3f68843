//! Experiment harness: instance generation, the distortion-vs-rate runner,
//! parameter sweeps, CSV/SVG emission and the file-level compress pipeline.

mod config;
mod experiment;
mod instance;
mod pipeline;
mod plot;

pub use crate::rng::{rng_from_seed, RngStream, SplitMix64};
pub use config::{parse_key_values, ConfigMap};
pub use experiment::{
    run_experiment, sweep, AggregateRow, DetailRow, ExperimentConfig, ExperimentResult, SweepAxis,
    SweepBest, SweepResult, AGGREGATE_HEADER, DETAIL_HEADER, SCHEMA_VERSION,
};
pub use instance::gen_instance;
pub use pipeline::{
    bits_from_bytes, bits_from_text, bits_to_bytes, bits_to_text, compress, decompress, Compressed,
};
pub use plot::svg_plot;
