//! Per-coefficient J-UNIWARD costs.
//!
//! The cost of a ±1 change to coefficient `(u, v)` of block `(br, bc)` is
//!
//! ```text
//! rho = Σ_k Σ_{a,b} lut[k][u][v](a, b) / (sigma + |W_k(r0 + a, c0 + b)|)
//! ```
//!
//! where `W_k` is the cover residual and `(r0, c0)` is the top-left corner of
//! the block's 23×23 window. [`WindowMode::Fixed`] places that corner at
//! `(8br + 8, 8bc + 8)`, the first residual sample the block influences.
//! [`WindowMode::Original`] reads one sample further down and right, which is
//! what the distributed reference code does.

mod lut;
mod oracle;

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use lut::{build_impact_lut, ImpactLut, SPAN, SPAN_AREA};
pub use oracle::{costmap_oracle, costmap_oracle_with, Summation};

use crate::container::DctContainer;
use crate::error::Error;
use crate::filterbank::{residuals, FilterBank, PAD};
use crate::grid::Grid;
use crate::jpeg::{decompress, BLOCK};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowMode {
    /// Window shifted by (+1, +1), as in the reference implementation.
    Original,
    Fixed,
}

impl WindowMode {
    pub const BOTH: [WindowMode; 2] = [WindowMode::Original, WindowMode::Fixed];

    /// Translation of the denominator window relative to the true support.
    pub fn shift(self) -> usize {
        match self {
            WindowMode::Original => 1,
            WindowMode::Fixed => 0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            WindowMode::Original => "original",
            WindowMode::Fixed => "fixed",
        }
    }
}

impl fmt::Display for WindowMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WindowMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "original" => Ok(WindowMode::Original),
            "fixed" => Ok(WindowMode::Fixed),
            other => Err(Error::invalid("mode", format!("expected 'original' or 'fixed', got {other:?}"))),
        }
    }
}

/// Default stabilizer, 2^-6.
pub const DEFAULT_SIGMA: f64 = 1.0 / 64.0;
pub const DEFAULT_WET_COST: f64 = 1e13;
/// Coefficients with |X| at or above this cannot move without leaving
/// [-1024, 1023].
pub const DEFAULT_WET_THRESHOLD: u32 = 1023;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostParams {
    pub sigma: f64,
    pub wet_cost: f64,
    pub wet_threshold: u32,
}

impl Default for CostParams {
    fn default() -> Self {
        CostParams { sigma: DEFAULT_SIGMA, wet_cost: DEFAULT_WET_COST, wet_threshold: DEFAULT_WET_THRESHOLD }
    }
}

impl CostParams {
    pub fn with_sigma(sigma: f64) -> Self {
        CostParams { sigma, ..Default::default() }
    }

    /// No coefficient is ever wet.
    pub fn without_wet(mut self) -> Self {
        self.wet_threshold = u32::MAX;
        self
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::invalid("sigma", format!("{} must be positive and finite", self.sigma)));
        }
        if !(self.wet_cost > 0.0 && self.wet_cost.is_finite()) {
            return Err(Error::invalid("wet_cost", format!("{} must be positive and finite", self.wet_cost)));
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn is_wet(&self, x: i32) -> bool {
        x.unsigned_abs() >= self.wet_threshold
    }
}

/// Inclusive residual-plane window read for one block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WindowBounds {
    pub row0: usize,
    pub col0: usize,
}

impl WindowBounds {
    pub fn rows(&self) -> RangeInclusive<usize> {
        self.row0..=self.row0 + SPAN - 1
    }

    pub fn cols(&self) -> RangeInclusive<usize> {
        self.col0..=self.col0 + SPAN - 1
    }
}

/// Window in padded-residual coordinates (0-based, inclusive).
pub fn window_bounds(br: usize, bc: usize, mode: WindowMode) -> WindowBounds {
    let first = PAD - BLOCK + mode.shift();
    WindowBounds { row0: BLOCK * br + first, col0: BLOCK * bc + first }
}

/// Per-coefficient costs in block layout.
#[derive(Clone, Debug, PartialEq)]
pub struct CostMap {
    height: usize,
    width: usize,
    rho: Vec<f64>,
    wet: Vec<bool>,
    mode: WindowMode,
    nzac: usize,
}

impl CostMap {
    /// Assembles a costmap from raw parts, e.g. for solver experiments.
    pub fn from_parts(
        height: usize,
        width: usize,
        rho: Vec<f64>,
        wet: Vec<bool>,
        mode: WindowMode,
        nzac: usize,
    ) -> Result<Self, Error> {
        if rho.len() != height * width || wet.len() != height * width {
            return Err(Error::invalid("costmap", "cost and wet mask sizes do not match the dimensions"));
        }
        if let Some(i) = rho.iter().position(|r| r.is_nan() || *r < 0.0) {
            return Err(Error::invalid(format!("rho[{}][{}]", i / width, i % width), "cost must be >= 0"));
        }
        Ok(CostMap { height, width, rho, wet, mode, nzac })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn mode(&self) -> WindowMode {
        self.mode
    }

    pub fn nzac(&self) -> usize {
        self.nzac
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn wet(&self) -> &[bool] {
        &self.wet
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.rho[row * self.width + col]
    }

    pub fn is_wet(&self, row: usize, col: usize) -> bool {
        self.wet[row * self.width + col]
    }

    pub fn to_grid(&self) -> Grid {
        Grid::from_vec(self.height, self.width, self.rho.clone())
    }
}

/// Cover residuals and impact tables, computed once and shared by both
/// window modes.
#[derive(Clone, Debug)]
pub struct CostModel<'a> {
    cover: &'a DctContainer,
    params: CostParams,
    residuals: [Grid; 3],
    lut: ImpactLut,
}

impl<'a> CostModel<'a> {
    pub fn new(cover: &'a DctContainer, params: CostParams) -> Result<Self, Error> {
        let fb = FilterBank::db8();
        let residuals = residuals(&decompress(cover), &fb);
        Self::with_residuals(cover, params, residuals)
    }

    /// Uses caller-supplied residual planes in place of the cover's own.
    /// Each plane must be `(height + 32) × (width + 32)`.
    pub fn with_residuals(cover: &'a DctContainer, params: CostParams, residuals: [Grid; 3]) -> Result<Self, Error> {
        params.validate()?;
        let expected = (cover.height() + 2 * PAD, cover.width() + 2 * PAD);
        if residuals.iter().any(|w| w.shape() != expected) {
            return Err(Error::invalid("residuals", format!("planes must be {}x{}", expected.0, expected.1)));
        }
        let lut = build_impact_lut(cover.quant(), &FilterBank::db8());
        Ok(CostModel { cover, params, residuals, lut })
    }

    pub fn residuals(&self) -> &[Grid; 3] {
        &self.residuals
    }

    pub fn lut(&self) -> &ImpactLut {
        &self.lut
    }

    /// `1 / (sigma + |W_k|)` over the block's window, k-major then row-major.
    fn window_weights(&self, br: usize, bc: usize, mode: WindowMode) -> [[f64; SPAN_AREA]; 3] {
        let win = window_bounds(br, bc, mode);
        let mut out = [[0.0; SPAN_AREA]; 3];
        for (plane, dst) in self.residuals.iter().zip(out.iter_mut()) {
            for a in 0..SPAN {
                let row = &plane.row(win.row0 + a)[win.col0..win.col0 + SPAN];
                for (d, w) in dst[a * SPAN..(a + 1) * SPAN].iter_mut().zip(row) {
                    *d = 1.0 / (self.params.sigma + w.abs());
                }
            }
        }
        out
    }

    pub fn costmap(&self, mode: WindowMode) -> CostMap {
        let (h, w) = (self.cover.height(), self.cover.width());
        let mut rho = vec![0.0; h * w];
        rho.par_chunks_mut(BLOCK * w).enumerate().for_each(|(br, band)| {
            for bc in 0..w / BLOCK {
                let weights = self.window_weights(br, bc, mode);
                for u in 0..BLOCK {
                    for v in 0..BLOCK {
                        let col = bc * BLOCK + v;
                        let x = self.cover.coeff(br * BLOCK + u, col);
                        band[u * w + col] = if self.params.is_wet(x) {
                            self.params.wet_cost
                        } else {
                            let mut acc = 0.0;
                            for (k, wk) in weights.iter().enumerate() {
                                for (t, c) in self.lut.table(k, u, v).iter().zip(wk) {
                                    acc += t * c;
                                }
                            }
                            acc
                        };
                    }
                }
            }
        });
        let wet = self.cover.coeffs().iter().map(|&x| self.params.is_wet(x)).collect();
        CostMap { height: h, width: w, rho, wet, mode, nzac: self.cover.nzac() }
    }

    /// Block cost with the numerator fixed to 1: Σ_k Σ_window 1/(sigma + |W_k|).
    pub fn block_costs(&self, mode: WindowMode) -> Grid {
        let (bt, bw) = (self.cover.blocks_tall(), self.cover.blocks_wide());
        let values: Vec<f64> = (0..bt * bw)
            .into_par_iter()
            .map(|i| {
                let weights = self.window_weights(i / bw, i % bw, mode);
                let mut acc = 0.0;
                for wk in &weights {
                    for c in wk {
                        acc += c;
                    }
                }
                acc
            })
            .collect();
        Grid::from_vec(bt, bw, values)
    }
}

pub fn compute_costmap(c: &DctContainer, mode: WindowMode, p: &CostParams) -> Result<CostMap, Error> {
    Ok(CostModel::new(c, *p)?.costmap(mode))
}

/// `(n1/8) × (n2/8)` grid of block costs.
pub fn block_costs(c: &DctContainer, mode: WindowMode, p: &CostParams) -> Result<Grid, Error> {
    Ok(CostModel::new(c, *p)?.block_costs(mode))
}

/// `|a - b| / max(|a|, |b|, 1e-300)`.
pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}
