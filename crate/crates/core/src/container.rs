//! DCTC v1 containers and grid output formats.
//!
//! A container is one JSON document holding a single luminance plane:
//!
//! ```json
//! {"coeffs":[[...],...],"dctc_version":1,"height":8,"quant":[...64 ints...],"width":8}
//! ```
//!
//! Coefficient `(u, v)` of block `(br, bc)` lives at `coeffs[8*br + u][8*bc + v]`.
//! The quantization table is stored in natural row-major order, not zigzag.
//! [`write_container`] emits keys in sorted order with no whitespace so that
//! equal containers always serialize to equal bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::jpeg::{QuantTable, BLOCK, COEFF_MAX, COEFF_MIN};

pub const DCTC_VERSION: u32 = 1;

/// Quantized luminance DCT coefficients in block layout plus their table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DctContainer {
    height: usize,
    width: usize,
    quant: QuantTable,
    coeffs: Vec<i32>,
}

/// Wire form. Field order is the canonical (sorted) key order.
#[derive(Serialize, Deserialize)]
struct Wire {
    coeffs: Vec<Vec<i64>>,
    dctc_version: u32,
    height: i64,
    quant: Vec<i64>,
    width: i64,
}

fn check_dims(height: usize, width: usize) -> Result<()> {
    for (name, n) in [("height", height), ("width", width)] {
        if n == 0 || n % BLOCK != 0 {
            return Err(Error::invalid(name, format!("{n} is not a positive multiple of 8")));
        }
    }
    Ok(())
}

fn check_coeff(row: usize, col: usize, value: i64) -> Result<i32> {
    if value < i64::from(COEFF_MIN) || value > i64::from(COEFF_MAX) {
        return Err(Error::invalid(
            format!("coeffs[{row}][{col}]"),
            format!("{value} outside [{COEFF_MIN}, {COEFF_MAX}]"),
        ));
    }
    Ok(value as i32)
}

impl DctContainer {
    pub fn zeros(height: usize, width: usize, quant: QuantTable) -> Result<Self> {
        check_dims(height, width)?;
        Ok(DctContainer { height, width, quant, coeffs: vec![0; height * width] })
    }

    /// Builds a container from a row-major coefficient vector.
    pub fn from_parts(height: usize, width: usize, quant: QuantTable, coeffs: Vec<i32>) -> Result<Self> {
        check_dims(height, width)?;
        if coeffs.len() != height * width {
            return Err(Error::invalid("coeffs", format!("expected {} values, got {}", height * width, coeffs.len())));
        }
        for (i, &x) in coeffs.iter().enumerate() {
            check_coeff(i / width, i % width, i64::from(x))?;
        }
        Ok(DctContainer { height, width, quant, coeffs })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn blocks_tall(&self) -> usize {
        self.height / BLOCK
    }

    pub fn blocks_wide(&self) -> usize {
        self.width / BLOCK
    }

    pub fn quant(&self) -> &QuantTable {
        &self.quant
    }

    pub fn coeffs(&self) -> &[i32] {
        &self.coeffs
    }

    #[inline]
    pub fn coeff(&self, row: usize, col: usize) -> i32 {
        self.coeffs[row * self.width + col]
    }

    /// Panics if `value` is outside the coefficient range.
    pub fn set_coeff(&mut self, row: usize, col: usize, value: i32) {
        assert!((COEFF_MIN..=COEFF_MAX).contains(&value), "coefficient {value} out of range");
        self.coeffs[row * self.width + col] = value;
    }

    /// Nonzero AC coefficients (DC is mode (0, 0) of each block).
    pub fn nzac(&self) -> usize {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|&(i, &x)| {
                x != 0 && !((i / self.width).is_multiple_of(BLOCK) && (i % self.width).is_multiple_of(BLOCK))
            })
            .count()
    }

    /// Transposes the plane and its quantization table.
    pub fn transpose(&self) -> Self {
        let mut coeffs = vec![0; self.coeffs.len()];
        for r in 0..self.height {
            for c in 0..self.width {
                coeffs[c * self.height + r] = self.coeff(r, c);
            }
        }
        DctContainer { height: self.width, width: self.height, quant: self.quant.transpose(), coeffs }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: Wire = serde_json::from_str(text)
            .map_err(|e| Error::Malformed { what: "DCTC container", message: e.to_string() })?;
        if wire.dctc_version != DCTC_VERSION {
            return Err(Error::invalid("dctc_version", format!("unsupported version {}", wire.dctc_version)));
        }
        let dim = |name: &str, v: i64| -> Result<usize> {
            let n = usize::try_from(v).map_err(|_| Error::invalid(name, format!("{v} is negative")))?;
            Ok(n)
        };
        let height = dim("height", wire.height)?;
        let width = dim("width", wire.width)?;
        check_dims(height, width)?;

        if wire.quant.len() != 64 {
            return Err(Error::invalid("quant", format!("expected 64 entries, got {}", wire.quant.len())));
        }
        let mut steps = [[0u16; 8]; 8];
        for (i, &q) in wire.quant.iter().enumerate() {
            if !(1..=i64::from(u16::MAX)).contains(&q) {
                return Err(Error::invalid(format!("quant[{i}]"), format!("{q} is not in 1..=65535")));
            }
            steps[i / 8][i % 8] = q as u16;
        }

        if wire.coeffs.len() != height {
            return Err(Error::invalid("coeffs", format!("expected {height} rows, got {}", wire.coeffs.len())));
        }
        let mut coeffs = Vec::with_capacity(height * width);
        for (r, row) in wire.coeffs.iter().enumerate() {
            if row.len() != width {
                return Err(Error::invalid(
                    format!("coeffs[{r}]"),
                    format!("expected {width} values, got {}", row.len()),
                ));
            }
            for (c, &x) in row.iter().enumerate() {
                coeffs.push(check_coeff(r, c, x)?);
            }
        }
        Ok(DctContainer { height, width, quant: QuantTable::new(steps)?, coeffs })
    }

    /// Canonical serialization: sorted keys, compact integers, trailing newline.
    pub fn to_json(&self) -> String {
        let wire = Wire {
            coeffs: self.coeffs.chunks(self.width).map(|r| r.iter().map(|&x| i64::from(x)).collect()).collect(),
            dctc_version: DCTC_VERSION,
            height: self.height as i64,
            quant: self.quant.steps().iter().flatten().map(|&q| i64::from(q)).collect(),
            width: self.width as i64,
        };
        let mut s = serde_json::to_string(&wire).expect("container serializes");
        s.push('\n');
        s
    }
}

pub fn read_container(path: impl AsRef<Path>) -> Result<DctContainer> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    DctContainer::from_json(&text)
}

pub fn write_container(c: &DctContainer, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, c.to_json()).map_err(|e| Error::io(path, e))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridFormat {
    Tsv,
    Pgm,
}

impl GridFormat {
    /// Guesses the format from a `.pgm` extension, defaulting to TSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("pgm") => GridFormat::Pgm,
            _ => GridFormat::Tsv,
        }
    }
}

fn check_finite(grid: &Grid) -> Result<()> {
    if let Some(i) = grid.as_slice().iter().position(|v| !v.is_finite()) {
        let (r, c) = (i / grid.cols(), i % grid.cols());
        return Err(Error::invalid(format!("grid[{r}][{c}]"), format!("non-finite value {}", grid[(r, c)])));
    }
    Ok(())
}

/// Row-major, tab-separated, `\n`-terminated rows. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn encode_tsv(grid: &Grid) -> Result<String> {
    check_finite(grid)?;
    let mut out = String::new();
    for r in 0..grid.rows() {
        for (c, v) in grid.row(r).iter().enumerate() {
            if c > 0 {
                out.push('\t');
            }
            write!(out, "{v}").unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn decode_tsv(text: &str) -> Result<Grid> {
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (r, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let before = data.len();
        for (c, field) in line.split('\t').enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| Error::Malformed {
                what: "TSV grid",
                message: format!("row {r}, column {c}: cannot parse {field:?}"),
            })?;
            data.push(v);
        }
        let n = data.len() - before;
        match cols {
            None => cols = Some(n),
            Some(expected) if expected != n => {
                return Err(Error::Malformed {
                    what: "TSV grid",
                    message: format!("row {r} has {n} columns, expected {expected}"),
                })
            }
            _ => {}
        }
        rows += 1;
    }
    Ok(Grid::from_vec(rows, cols.unwrap_or(0), data))
}

/// Binary P5 with maxval 255; min maps to 0 and max to 255. A constant grid
/// maps to all zeros.
pub fn encode_pgm(grid: &Grid) -> Result<Vec<u8>> {
    check_finite(grid)?;
    let mut out = format!("P5\n{} {}\n255\n", grid.cols(), grid.rows()).into_bytes();
    let (lo, hi) = grid.min_max().unwrap_or((0.0, 0.0));
    let span = hi - lo;
    out.extend(grid.as_slice().iter().map(|&v| {
        if span > 0.0 {
            ((v - lo) / span * 255.0).round().clamp(0.0, 255.0) as u8
        } else {
            0
        }
    }));
    Ok(out)
}

pub fn write_grid(grid: &Grid, path: impl AsRef<Path>, format: GridFormat) -> Result<()> {
    let path = path.as_ref();
    let bytes = match format {
        GridFormat::Tsv => encode_tsv(grid)?.into_bytes(),
        GridFormat::Pgm => encode_pgm(grid)?,
    };
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_grid_tsv(path: impl AsRef<Path>) -> Result<Grid> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    decode_tsv(&text)
}
