//! Original-vs-fixed comparisons: block-cost grids and their difference,
//! per-block and per-coefficient scatter rows, synthetic smooth/textured
//! covers and JPEG quality sweeps.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::container::{write_grid, DctContainer, GridFormat};
use crate::costmap::{CostModel, CostParams, WindowMode};
use crate::embed::{solve_lambda, ProbMap};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::jpeg::{forward_quantize, quality_table, SpatialImage, BLOCK};
use crate::rng::{CoordRng, DOMAIN_SYNTH};

pub const STRIPES: usize = 5;
const SMOOTH_LEVEL: f64 = 128.0;
/// Texture strength used by [`synth_cover`]: uniform noise on [115.2, 140.7).
/// Full-range noise survives quantization at every quality, so it cannot show
/// the cost increase that coarse quantization causes on real textures.
pub const DEFAULT_TEXTURE: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pattern {
    /// Five vertical bands, smooth | textured | smooth | textured | smooth.
    #[serde(rename = "stripes_h")]
    StripesH,
    /// 5×5 checkerboard of smooth and textured cells, smooth in the corners.
    #[serde(rename = "stripes_2d")]
    Stripes2d,
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stripes_h" => Ok(Pattern::StripesH),
            "stripes_2d" => Ok(Pattern::Stripes2d),
            other => Err(Error::invalid("pattern", format!("expected stripes_h or stripes_2d, got {other:?}"))),
        }
    }
}

/// Stripe index of pixel `i` along an axis of length `n`.
pub fn stripe_of(i: usize, n: usize) -> usize {
    i * STRIPES / n
}

impl Pattern {
    pub fn is_textured(self, row: usize, col: usize, height: usize, width: usize) -> bool {
        let c = stripe_of(col, width);
        match self {
            Pattern::StripesH => c % 2 == 1,
            Pattern::Stripes2d => (stripe_of(row, height) + c) % 2 == 1,
        }
    }
}

/// Synthetic spatial image in [0, 255]. Smooth cells are constant 128;
/// textured cells are `128 + texture · (255u - 128)` for uniform `u`, so
/// `texture = 1` gives uniform noise on [0, 255) and `texture = 0` a flat
/// image.
pub fn synth_spatial(pattern: Pattern, height: usize, width: usize, seed: u64, texture: f64) -> Result<SpatialImage> {
    let min_height = match pattern {
        Pattern::StripesH => BLOCK,
        Pattern::Stripes2d => STRIPES * BLOCK,
    };
    if !(0.0..=1.0).contains(&texture) {
        return Err(Error::invalid("texture", format!("{texture} is outside [0, 1]")));
    }
    if width < STRIPES * BLOCK || height < min_height {
        return Err(Error::invalid(
            "dimensions",
            format!("{height}x{width} is too small for {STRIPES} stripes of at least one block"),
        ));
    }
    let rng = CoordRng::new(seed, DOMAIN_SYNTH);
    let mut noise = vec![0.0; width];
    let mut px = Grid::zeros(height, width);
    for r in 0..height {
        rng.fill_row(r, &mut noise);
        for c in 0..width {
            px[(r, c)] = if pattern.is_textured(r, c, height, width) {
                SMOOTH_LEVEL + texture * (255.0 * noise[c] - SMOOTH_LEVEL)
            } else {
                SMOOTH_LEVEL
            };
        }
    }
    SpatialImage::new(px)
}

/// JPEG-style compression of a [0, 255] image: level shift by -128, then
/// quantize with the quality-scaled table.
pub fn compress(img: &SpatialImage, quality: u32) -> Result<DctContainer> {
    let q = quality_table(quality)?;
    let shifted = SpatialImage::new(img.pixels().map(|v| v - 128.0))?;
    Ok(forward_quantize(&shifted, &q))
}

/// [`synth_spatial`] at [`DEFAULT_TEXTURE`], compressed at `quality`.
pub fn synth_cover(pattern: Pattern, height: usize, width: usize, quality: u32, seed: u64) -> Result<DctContainer> {
    compress(&synth_spatial(pattern, height, width, seed, DEFAULT_TEXTURE)?, quality)
}

/// One scatter sample: a block (or coefficient) and its value under both modes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScatterPoint {
    pub row: usize,
    pub col: usize,
    pub original: f64,
    pub fixed: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModeSummary {
    pub mode: WindowMode,
    /// `None` when the cover has no nonzero AC coefficient to carry a payload.
    pub lambda: Option<f64>,
    pub achieved_payload_bits: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub height: usize,
    pub width: usize,
    pub sigma: f64,
    pub payload_bpnzac: f64,
    pub nzac: usize,
    pub target_payload_bits: f64,
    pub modes: Vec<ModeSummary>,
    pub max_abs_block_diff: f64,
    pub mean_abs_block_diff: f64,
    pub max_block_cost: f64,
}

#[derive(Clone, Debug)]
pub struct AnalysisReport {
    pub block_orig: Grid,
    pub block_fixed: Grid,
    /// `block_orig - block_fixed`; negative where the original window under-prices.
    pub block_diff: Grid,
    pub scatter_blocks: Vec<ScatterPoint>,
    /// Non-wet coefficients only.
    pub scatter_probs: Vec<ScatterPoint>,
    pub summary: Summary,
}

fn probabilities(model: &CostModel<'_>, mode: WindowMode, payload: f64) -> Result<(ProbMap, Option<f64>)> {
    let cm = model.costmap(mode);
    if cm.nzac() == 0 {
        let n = cm.height() * cm.width();
        let pm = ProbMap {
            height: cm.height(),
            width: cm.width(),
            p: vec![0.0; n],
            lambda: f64::INFINITY,
            target_payload: 0.0,
            achieved_payload: 0.0,
        };
        return Ok((pm, None));
    }
    let pm = solve_lambda(&cm, payload)?;
    let lambda = Some(pm.lambda);
    Ok((pm, lambda))
}

/// Runs both window modes on `c` and assembles grids, scatters and summary.
/// Covers without nonzero AC coefficients carry no payload; their
/// probabilities are all zero and λ is reported as `None`.
pub fn compare(c: &DctContainer, p: &CostParams, payload: f64) -> Result<AnalysisReport> {
    if !(payload > 0.0 && payload <= 3f64.log2()) {
        return Err(Error::invalid("payload", format!("{payload} bpnzAC is outside (0, log2 3]")));
    }
    let model = CostModel::new(c, *p)?;
    let block_orig = model.block_costs(WindowMode::Original);
    let block_fixed = model.block_costs(WindowMode::Fixed);
    let block_diff = block_orig.sub(&block_fixed);

    let (prob_orig, lambda_orig) = probabilities(&model, WindowMode::Original, payload)?;
    let (prob_fixed, lambda_fixed) = probabilities(&model, WindowMode::Fixed, payload)?;

    let scatter_blocks = (0..block_orig.rows())
        .flat_map(|r| (0..block_orig.cols()).map(move |c| (r, c)))
        .map(|(row, col)| ScatterPoint { row, col, original: block_orig[(row, col)], fixed: block_fixed[(row, col)] })
        .collect();

    let w = c.width();
    let scatter_probs = (0..c.height() * w)
        .filter(|&i| !p.is_wet(c.coeffs()[i]))
        .map(|i| ScatterPoint { row: i / w, col: i % w, original: prob_orig.p[i], fixed: prob_fixed.p[i] })
        .collect();

    let abs_diff: Vec<f64> = block_diff.as_slice().iter().map(|d| d.abs()).collect();
    let summary = Summary {
        height: c.height(),
        width: c.width(),
        sigma: p.sigma,
        payload_bpnzac: payload,
        nzac: c.nzac(),
        target_payload_bits: payload * c.nzac() as f64,
        modes: vec![
            ModeSummary {
                mode: WindowMode::Original,
                lambda: lambda_orig,
                achieved_payload_bits: prob_orig.achieved_payload,
            },
            ModeSummary {
                mode: WindowMode::Fixed,
                lambda: lambda_fixed,
                achieved_payload_bits: prob_fixed.achieved_payload,
            },
        ],
        max_abs_block_diff: abs_diff.iter().copied().fold(0.0, f64::max),
        mean_abs_block_diff: abs_diff.iter().sum::<f64>() / abs_diff.len() as f64,
        max_block_cost: block_orig.as_slice().iter().chain(block_fixed.as_slice()).copied().fold(0.0, f64::max),
    };

    Ok(AnalysisReport { block_orig, block_fixed, block_diff, scatter_blocks, scatter_probs, summary })
}

pub fn scatter_csv(points: &[ScatterPoint]) -> String {
    let mut out = String::from("row,col,original,fixed\n");
    for pt in points {
        writeln!(out, "{},{},{},{}", pt.row, pt.col, pt.original, pt.fixed).unwrap();
    }
    out
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })
}

impl AnalysisReport {
    pub const FILES: [&'static str; 6] = [
        "block_orig.tsv",
        "block_fixed.tsv",
        "block_diff.tsv",
        "scatter_blocks.csv",
        "scatter_probs.csv",
        "summary.json",
    ];

    /// Writes every artifact in [`Self::FILES`] into `dir`, creating it if needed.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.to_path_buf(), source: e })?;
        write_grid(&self.block_orig, dir.join("block_orig.tsv"), GridFormat::Tsv)?;
        write_grid(&self.block_fixed, dir.join("block_fixed.tsv"), GridFormat::Tsv)?;
        write_grid(&self.block_diff, dir.join("block_diff.tsv"), GridFormat::Tsv)?;
        write_text(&dir.join("scatter_blocks.csv"), &scatter_csv(&self.scatter_blocks))?;
        write_text(&dir.join("scatter_probs.csv"), &scatter_csv(&self.scatter_probs))?;
        let mut json = serde_json::to_string_pretty(&self.summary).expect("summary serializes");
        json.push('\n');
        write_text(&dir.join("summary.json"), &json)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub quality: u32,
    pub mean_block_cost_fixed: f64,
    pub mean_abs_block_diff: f64,
}

/// Compresses one synthetic image at each quality and reports block statistics.
pub fn quality_sweep(
    pattern: Pattern,
    height: usize,
    width: usize,
    seed: u64,
    texture: f64,
    qualities: &[u32],
    p: &CostParams,
) -> Result<Vec<SweepRow>> {
    if qualities.is_empty() {
        return Err(Error::invalid("qualities", "at least one quality is required"));
    }
    for &q in qualities {
        quality_table(q)?;
    }
    let img = synth_spatial(pattern, height, width, seed, texture)?;
    qualities
        .iter()
        .map(|&quality| {
            let cover = compress(&img, quality)?;
            let model = CostModel::new(&cover, *p)?;
            let fixed = model.block_costs(WindowMode::Fixed);
            let diff = model.block_costs(WindowMode::Original).sub(&fixed);
            Ok(SweepRow {
                quality,
                mean_block_cost_fixed: fixed.mean(),
                mean_abs_block_diff: diff.map(f64::abs).mean(),
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("quality,mean_block_cost_fixed,mean_abs_block_diff\n");
    for r in rows {
        writeln!(out, "{},{},{}", r.quality, r.mean_block_cost_fixed, r.mean_abs_block_diff).unwrap();
    }
    out
}
