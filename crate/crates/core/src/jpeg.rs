//! 8×8 block DCT model: orthonormal basis, linear decompression, forward
//! quantization for synthetic covers, and IJG quality-scaled tables.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::OnceLock;

use crate::container::DctContainer;
use crate::error::{Error, Result};
use crate::grid::Grid;

pub const BLOCK: usize = 8;

/// Smallest and largest representable quantized coefficient.
pub const COEFF_MIN: i32 = -1024;
pub const COEFF_MAX: i32 = 1023;

/// Annex K luminance table, natural (row-major) order.
const LUMA_BASE: [[u16; 8]; 8] = [
    [16, 11, 10, 16, 24, 40, 51, 61],
    [12, 12, 14, 19, 26, 58, 60, 55],
    [14, 13, 16, 24, 40, 57, 69, 56],
    [14, 17, 22, 29, 51, 87, 80, 62],
    [18, 22, 37, 56, 68, 109, 103, 77],
    [24, 35, 55, 64, 81, 104, 113, 92],
    [49, 64, 78, 87, 103, 121, 120, 101],
    [72, 92, 95, 98, 112, 100, 103, 99],
];

/// Quantization steps `q[u][v]`, all ≥ 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuantTable([[u16; 8]; 8]);

impl QuantTable {
    pub fn new(steps: [[u16; 8]; 8]) -> Result<Self> {
        for (u, row) in steps.iter().enumerate() {
            for (v, &q) in row.iter().enumerate() {
                if q == 0 {
                    return Err(Error::invalid(format!("quant[{}]", u * 8 + v), "entry must be >= 1"));
                }
            }
        }
        Ok(QuantTable(steps))
    }

    pub fn flat(value: u16) -> Self {
        assert!(value >= 1);
        QuantTable([[value; 8]; 8])
    }

    /// Annex K luminance table (quality 50).
    pub fn standard_luma() -> Self {
        QuantTable(LUMA_BASE)
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> u16 {
        self.0[u][v]
    }

    pub fn steps(&self) -> &[[u16; 8]; 8] {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        let mut t = [[0u16; 8]; 8];
        for (u, row) in self.0.iter().enumerate() {
            for (v, &q) in row.iter().enumerate() {
                t[v][u] = q;
            }
        }
        QuantTable(t)
    }

    pub fn max_step(&self) -> u16 {
        self.0.iter().flatten().copied().max().unwrap_or(1)
    }
}

/// IJG quality scaling of the Annex K luminance table.
pub fn quality_table(quality: u32) -> Result<QuantTable> {
    if !(1..=100).contains(&quality) {
        return Err(Error::invalid("quality", format!("{quality} is outside 1..=100")));
    }
    let scale = if quality < 50 { 5000 / quality } else { 200 - 2 * quality };
    let mut steps = [[0u16; 8]; 8];
    for (dst, src) in steps.iter_mut().flatten().zip(LUMA_BASE.iter().flatten()) {
        *dst = ((u32::from(*src) * scale + 50) / 100).clamp(1, 255) as u16;
    }
    Ok(QuantTable(steps))
}

/// Spatial-domain luminance, unrounded and unclamped.
#[derive(Clone, Debug, PartialEq)]
pub struct SpatialImage {
    pixels: Grid,
}

impl SpatialImage {
    pub fn new(pixels: Grid) -> Result<Self> {
        let (h, w) = pixels.shape();
        if h == 0 || w == 0 || h % BLOCK != 0 || w % BLOCK != 0 {
            return Err(Error::invalid("dimensions", format!("{h}x{w} is not a positive multiple of 8")));
        }
        if let Some(i) = pixels.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("pixel ({}, {})", i / w, i % w), "non-finite value"));
        }
        Ok(SpatialImage { pixels })
    }

    pub fn pixels(&self) -> &Grid {
        &self.pixels
    }

    pub fn into_grid(self) -> Grid {
        self.pixels
    }

    pub fn height(&self) -> usize {
        self.pixels.rows()
    }

    pub fn width(&self) -> usize {
        self.pixels.cols()
    }
}

/// 8×8 block stored row-major.
pub type Block = [f64; 64];

fn basis_table() -> &'static [Block; 64] {
    static TABLE: OnceLock<Box<[Block; 64]>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Box::new([[0.0; 64]; 64]);
        for u in 0..BLOCK {
            for v in 0..BLOCK {
                // Normalization c(u)c(v)/4 with c(0) = 1/sqrt(2), kept as a
                // single product so B_00 is exactly 1/8.
                let norm = match (u, v) {
                    (0, 0) => 0.5,
                    (0, _) | (_, 0) => FRAC_1_SQRT_2,
                    _ => 1.0,
                } * 0.25;
                let block = &mut table[u * BLOCK + v];
                for x in 0..BLOCK {
                    let cu = ((2 * x + 1) as f64 * u as f64 * PI / 16.0).cos();
                    for y in 0..BLOCK {
                        let cv = ((2 * y + 1) as f64 * v as f64 * PI / 16.0).cos();
                        block[x * BLOCK + y] = norm * cu * cv;
                    }
                }
            }
        }
        table
    })
}

/// Orthonormal 2-D DCT-II basis block for mode `(u, v)`, i.e. the inverse
/// transform of a unit coefficient. `u` indexes vertical frequency.
pub fn dct_basis(u: usize, v: usize) -> Block {
    assert!(u < BLOCK && v < BLOCK, "DCT mode ({u}, {v}) out of range");
    basis_table()[u * BLOCK + v]
}

/// Linear decompression: each block becomes Σ coeff·q·B. No rounding,
/// clamping, or level shift.
pub fn decompress(c: &DctContainer) -> SpatialImage {
    let (h, w) = (c.height(), c.width());
    let basis = basis_table();
    let q = c.quant();
    let mut pixels = Grid::zeros(h, w);
    for br in 0..h / BLOCK {
        for bc in 0..w / BLOCK {
            let mut block = [0.0; 64];
            for u in 0..BLOCK {
                for v in 0..BLOCK {
                    let x = c.coeff(br * BLOCK + u, bc * BLOCK + v);
                    if x == 0 {
                        continue;
                    }
                    let scale = f64::from(x) * f64::from(q.get(u, v));
                    for (dst, b) in block.iter_mut().zip(&basis[u * BLOCK + v]) {
                        *dst += scale * b;
                    }
                }
            }
            for x in 0..BLOCK {
                for y in 0..BLOCK {
                    pixels[(br * BLOCK + x, bc * BLOCK + y)] = block[x * BLOCK + y];
                }
            }
        }
    }
    SpatialImage { pixels }
}

/// Per block, `round(<block, B_uv> / q[u][v])` with ties away from zero,
/// clamped to the coefficient range. The image is used as-is; callers that
/// want the JPEG level shift subtract 128 first.
pub fn forward_quantize(img: &SpatialImage, q: &QuantTable) -> DctContainer {
    let (h, w) = (img.height(), img.width());
    let basis = basis_table();
    let px = img.pixels();
    let mut coeffs = vec![0i32; h * w];
    for br in 0..h / BLOCK {
        for bc in 0..w / BLOCK {
            for u in 0..BLOCK {
                for v in 0..BLOCK {
                    let b = &basis[u * BLOCK + v];
                    let mut dot = 0.0;
                    for x in 0..BLOCK {
                        for y in 0..BLOCK {
                            dot += px[(br * BLOCK + x, bc * BLOCK + y)] * b[x * BLOCK + y];
                        }
                    }
                    let level = (dot / f64::from(q.get(u, v))).round();
                    let level = level.clamp(f64::from(COEFF_MIN), f64::from(COEFF_MAX)) as i32;
                    coeffs[(br * BLOCK + u) * w + bc * BLOCK + v] = level;
                }
            }
        }
    }
    DctContainer::from_parts(h, w, *q, coeffs).expect("forward_quantize produces a valid container")
}
