//! J-UNIWARD embedding costs for JPEG luminance planes.
//!
//! The cost of changing a quantized DCT coefficient by ±1 is the wavelet
//! relative distortion it introduces, evaluated against a precomputed cover
//! residual. The residual window can be read at the corrected position
//! ([`WindowMode::Fixed`]) or at the position used by the widely distributed
//! reference code, which is shifted one sample down and right
//! ([`WindowMode::Original`]).
//!
//! Module map:
//! - [`container`]: DCTC v1 JSON containers, TSV/PGM grids.
//! - [`jpeg`]: 8×8 DCT basis, decompression, quantization tables.
//! - [`filterbank`]: db8 directional kernels, symmetric padding, correlation.
//! - [`costmap`]: impact tables, fast costs, brute-force oracle, block costs.
//! - [`embed`]: payload-constrained change probabilities and a simulator.
//! - [`analysis`]: original-vs-fixed comparisons and synthetic covers.
//! - [`cli`]: the `juniward` command line.

pub mod analysis;
pub mod cli;
pub mod container;
pub mod costmap;
pub mod embed;
mod error;
pub mod filterbank;
pub mod grid;
pub mod jpeg;
pub mod rng;

pub use analysis::{compare, quality_sweep, synth_cover, AnalysisReport, Pattern, SweepRow};
pub use container::{read_container, write_container, write_grid, DctContainer, GridFormat};
pub use costmap::{
    block_costs, build_impact_lut, compute_costmap, costmap_oracle, window_bounds, CostMap, CostParams, ImpactLut,
    WindowBounds, WindowMode,
};
pub use embed::{simulate, solve_lambda, ProbMap};
pub use error::{Error, Result};
pub use filterbank::{Direction, FilterBank};
pub use grid::Grid;
pub use jpeg::{decompress, forward_quantize, quality_table, QuantTable, SpatialImage};
