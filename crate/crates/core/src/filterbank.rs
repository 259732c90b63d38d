//! Directional db8 wavelet kernels and the padding/correlation conventions
//! used to build cover residuals.
//!
//! Offsets matter here. A cover is symmetric-padded by [`PAD`] samples per
//! side and then cross-correlated with each 16×16 kernel using "same" output
//! size and zero fill, anchored at tap [`ANCHOR`]. Under this convention the
//! first residual sample that depends on cover pixel (0, 0) is (8, 8).

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::jpeg::SpatialImage;

pub const TAPS: usize = 16;
/// Kernel tap aligned with the output sample in [`correlate_same`].
pub const ANCHOR: usize = 7;
/// Symmetric padding applied to the cover before filtering.
pub const PAD: usize = 16;

pub type Kernel = [[f64; TAPS]; TAPS];

/// db8 decomposition low-pass filter (8 vanishing moments), Σh = √2, Σh² = 1.
const DB8_LOW: [f64; TAPS] = [
    -0.00011747678412476953,
    0.0006754494064505693,
    -0.00039174037337694705,
    -0.004870352993451574,
    0.008746094047405777,
    0.013981027917398282,
    -0.044088253930794755,
    -0.017369301001807547,
    0.12874742662047847,
    0.0004724845739132828,
    -0.2840155429615469,
    -0.015829105256349306,
    0.5853546836542067,
    0.6756307362972898,
    0.31287159091429995,
    0.05441584224310401,
];

/// Kernel orientation. `Lh` is low-pass down columns and high-pass across
/// rows, so it responds to horizontal texture.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Lh,
    Hl,
    Hh,
}

impl Direction {
    pub const ALL: [Direction; 3] = [Direction::Lh, Direction::Hl, Direction::Hh];

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Debug)]
pub struct FilterBank {
    low: [f64; TAPS],
    high: [f64; TAPS],
    kernels: [Kernel; 3],
}

fn outer(col: &[f64; TAPS], row: &[f64; TAPS]) -> Kernel {
    let mut k = [[0.0; TAPS]; TAPS];
    for (a, kr) in k.iter_mut().enumerate() {
        for (b, v) in kr.iter_mut().enumerate() {
            *v = col[a] * row[b];
        }
    }
    k
}

impl FilterBank {
    /// db8 pair with `g[i] = (-1)^i h[15 - i]` and kernels
    /// LH = h⊗g, HL = g⊗h, HH = g⊗g (first factor runs down rows).
    pub fn db8() -> Self {
        let low = DB8_LOW;
        let mut high = [0.0; TAPS];
        for (i, g) in high.iter_mut().enumerate() {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            *g = sign * low[TAPS - 1 - i];
        }
        Self::from_filters(low, high)
    }

    /// Builds the separable kernels from an arbitrary filter pair.
    pub fn from_filters(low: [f64; TAPS], high: [f64; TAPS]) -> Self {
        let kernels = [outer(&low, &high), outer(&high, &low), outer(&high, &high)];
        FilterBank { low, high, kernels }
    }

    pub fn low(&self) -> &[f64; TAPS] {
        &self.low
    }

    pub fn high(&self) -> &[f64; TAPS] {
        &self.high
    }

    pub fn kernel(&self, dir: Direction) -> &Kernel {
        &self.kernels[dir.index()]
    }

    pub fn kernels(&self) -> &[Kernel; 3] {
        &self.kernels
    }
}

impl Default for FilterBank {
    fn default() -> Self {
        Self::db8()
    }
}

/// Index into `0..n` under half-sample symmetric extension with period 2n.
#[inline]
fn reflect(i: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let m = i.rem_euclid(period) as usize;
    if m < n {
        m
    } else {
        2 * n - 1 - m
    }
}

/// Extends `img` by `pad` samples on every side, mirroring with the edge
/// sample repeated (`padded[-1] = img[0]`, `padded[-2] = img[1]`, ...).
/// Padding wider than the image keeps reflecting back and forth.
pub fn pad_symmetric(img: &Grid, pad: usize) -> Result<Grid> {
    let (h, w) = img.shape();
    if h == 0 || w == 0 {
        return Err(Error::invalid("image", "cannot pad an empty image"));
    }
    let cols: Vec<usize> = (0..w + 2 * pad).map(|j| reflect(j as isize - pad as isize, w)).collect();
    let mut out = Grid::zeros(h + 2 * pad, w + 2 * pad);
    let ow = out.cols();
    let dst = out.as_mut_slice();
    for i in 0..h + 2 * pad {
        let src = img.row(reflect(i as isize - pad as isize, h));
        for (d, &c) in dst[i * ow..(i + 1) * ow].iter_mut().zip(&cols) {
            *d = src[c];
        }
    }
    Ok(out)
}

/// "Same"-size cross-correlation (no kernel flip) with zero fill:
/// `out(i, j) = Σ_{a,b} K(a, b) · img(i + a - 7, j + b - 7)`.
pub fn correlate_same(img: &Grid, kernel: &Kernel) -> Grid {
    let (h, w) = img.shape();
    let mut out = Grid::zeros(h, w);
    let dst = out.as_mut_slice();
    for i in 0..h {
        let out_row = &mut dst[i * w..(i + 1) * w];
        for (a, krow) in kernel.iter().enumerate() {
            let src_r = i as isize + a as isize - ANCHOR as isize;
            if src_r < 0 || src_r >= h as isize {
                continue;
            }
            let src = img.row(src_r as usize);
            for (b, &k) in krow.iter().enumerate() {
                // Output columns j with 0 <= j + b - 7 < w.
                let j_lo = ANCHOR.saturating_sub(b);
                let j_hi = (w + ANCHOR).saturating_sub(b).min(w);
                if j_lo >= j_hi {
                    continue;
                }
                let s0 = j_lo + b - ANCHOR;
                for (o, s) in out_row[j_lo..j_hi].iter_mut().zip(&src[s0..s0 + (j_hi - j_lo)]) {
                    *o += k * s;
                }
            }
        }
    }
    out
}

/// Symmetric-pads `img` by [`PAD`] and correlates with every kernel. Each
/// plane is `(n1 + 32) × (n2 + 32)`, indexed by [`Direction::index`].
pub fn residuals_of(img: &Grid, fb: &FilterBank) -> Result<[Grid; 3]> {
    let padded = pad_symmetric(img, PAD)?;
    Ok(residuals_of_padded(&padded, fb))
}

pub fn residuals_of_padded(padded: &Grid, fb: &FilterBank) -> [Grid; 3] {
    fb.kernels().each_ref().map(|k| correlate_same(padded, k))
}

/// Cover residuals `W[k] = correlate_same(pad_symmetric(cover, 16), K[k])`.
pub fn residuals(cover: &SpatialImage, fb: &FilterBank) -> [Grid; 3] {
    residuals_of(cover.pixels(), fb).expect("spatial images are never empty")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg_grid(rows: usize, cols: usize, mut seed: u64) -> Grid {
        Grid::from_fn(rows, cols, |_, _| {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 11) as f64 / (1u64 << 53) as f64) * 255.0
        })
    }

    /// Direct evaluation of the correlation definition.
    fn correlate_brute(img: &Grid, k: &Kernel) -> Grid {
        let (h, w) = img.shape();
        Grid::from_fn(h, w, |i, j| {
            let mut acc = 0.0;
            for (a, krow) in k.iter().enumerate() {
                for (b, &tap) in krow.iter().enumerate() {
                    let r = i as isize + a as isize - 7;
                    let c = j as isize + b as isize - 7;
                    if r >= 0 && c >= 0 && (r as usize) < h && (c as usize) < w {
                        acc += tap * img[(r as usize, c as usize)];
                    }
                }
            }
            acc
        })
    }

    #[test]
    fn filter_normalization() {
        let fb = FilterBank::db8();
        let sum_h: f64 = fb.low().iter().sum();
        let energy: f64 = fb.low().iter().map(|v| v * v).sum();
        let sum_g: f64 = fb.high().iter().sum();
        assert!((sum_h - 2f64.sqrt()).abs() < 1e-10);
        assert!((energy - 1.0).abs() < 1e-10);
        assert!(sum_g.abs() < 1e-10);
        for k in fb.kernels() {
            assert!(k.iter().flatten().sum::<f64>().abs() < 1e-9);
        }
    }

    #[test]
    fn high_pass_has_eight_vanishing_moments() {
        let g = FilterBank::db8().high;
        for p in 0..8 {
            let s: Vec<f64> = (0..24).map(|i| (i as f64).powi(p)).collect();
            for start in 0..=s.len() - TAPS {
                let out: f64 = (0..TAPS).map(|t| g[t] * s[start + t]).sum();
                assert!(out.abs() <= 1e-6, "degree {p} at {start}: {out}");
            }
        }
    }

    #[test]
    fn kernels_are_outer_products() {
        let fb = FilterBank::db8();
        let (h, g) = (fb.low(), fb.high());
        for a in 0..TAPS {
            for b in 0..TAPS {
                assert_eq!(fb.kernel(Direction::Lh)[a][b], h[a] * g[b]);
                assert_eq!(fb.kernel(Direction::Hl)[a][b], g[a] * h[b]);
                assert_eq!(fb.kernel(Direction::Hh)[a][b], g[a] * g[b]);
            }
        }
    }

    #[test]
    fn pad_sizes_and_reflection() {
        let padded = pad_symmetric(&Grid::zeros(8, 8), PAD).unwrap();
        assert_eq!(padded.shape(), (40, 40));

        let small = Grid::from_vec(2, 2, vec![1.0, 2.0, 3.0, 4.0]);
        let p = pad_symmetric(&small, 1).unwrap();
        let expected = [1., 1., 2., 2., 1., 1., 2., 2., 3., 3., 4., 4., 3., 3., 4., 4.];
        assert_eq!(p.as_slice(), &expected);

        let c = pad_symmetric(&Grid::filled(3, 5, 9.0), 16).unwrap();
        assert!(c.as_slice().iter().all(|&v| v == 9.0));

        assert!(pad_symmetric(&Grid::zeros(0, 4), 1).is_err());
    }

    #[test]
    fn pad_wider_than_image_keeps_reflecting() {
        let g = Grid::from_vec(1, 3, vec![1.0, 2.0, 3.0]);
        let p = pad_symmetric(&g, 4).unwrap();
        assert_eq!(p.row(4), &[3., 3., 2., 1., 1., 2., 3., 3., 2., 1., 1.]);
        assert!(p.as_slice().chunks(11).all(|r| r == p.row(4)));
    }

    #[test]
    fn identity_kernel_is_exact() {
        let mut k = [[0.0; TAPS]; TAPS];
        k[ANCHOR][ANCHOR] = 1.0;
        let img = lcg_grid(19, 23, 3);
        assert_eq!(correlate_same(&img, &k), img);
    }

    #[test]
    fn correlate_matches_brute_force() {
        let fb = FilterBank::db8();
        let img = lcg_grid(24, 24, 42);
        for k in fb.kernels() {
            let fast = correlate_same(&img, k);
            let slow = correlate_brute(&img, k);
            for (a, b) in fast.as_slice().iter().zip(slow.as_slice()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn first_cover_dependent_output_is_eight() {
        // Perturbing cover pixel (0, 0) of an 8x8 cover, placed at (16, 16)
        // in the 40x40 padded plane, first shows up at output (8, 8).
        let mut delta = Grid::zeros(40, 40);
        delta[(PAD, PAD)] = 1.0;
        let mut ones = [[0.0; TAPS]; TAPS];
        ones.iter_mut().flatten().for_each(|v| *v = 1.0);
        let out = correlate_same(&delta, &ones);
        let touched: Vec<(usize, usize)> =
            (0..40).flat_map(|i| (0..40).map(move |j| (i, j))).filter(|&(i, j)| out[(i, j)] != 0.0).collect();
        assert_eq!(touched.first(), Some(&(8, 8)));
        assert_eq!(touched.last(), Some(&(23, 23)));
    }

    #[test]
    fn constant_cover_has_zero_interior_residual() {
        let cover = SpatialImage::new(Grid::filled(16, 24, 37.5)).unwrap();
        let w = residuals(&cover, &FilterBank::db8());
        for plane in &w {
            assert_eq!(plane.shape(), (48, 56));
            for i in 7..=48 - 9 {
                for j in 7..=56 - 9 {
                    assert!(plane[(i, j)].abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn column_only_variation_vanishes_in_row_high_pass() {
        // Rows are identical, so anything high-pass down the rows (HL, HH)
        // annihilates it away from the zero fill.
        let row: Vec<f64> = lcg_grid(1, 32, 7).into_vec();
        let img = Grid::from_fn(24, 32, |_, c| row[c]);
        let w = residuals(&SpatialImage::new(img).unwrap(), &FilterBank::db8());
        for dir in [Direction::Hl, Direction::Hh] {
            let plane = &w[dir.index()];
            for i in 7..=plane.rows() - 9 {
                for j in 7..=plane.cols() - 9 {
                    assert!(plane[(i, j)].abs() < 1e-9, "{dir:?} at ({i}, {j})");
                }
            }
        }
        assert!(w[Direction::Lh.index()].as_slice().iter().any(|v| v.abs() > 1.0));
    }

    #[test]
    fn residuals_are_linear() {
        let fb = FilterBank::db8();
        let x = lcg_grid(16, 16, 1);
        let y = lcg_grid(16, 16, 2);
        let sum = Grid::from_fn(16, 16, |r, c| x[(r, c)] + y[(r, c)]);
        let (wx, wy, ws) =
            (residuals_of(&x, &fb).unwrap(), residuals_of(&y, &fb).unwrap(), residuals_of(&sum, &fb).unwrap());
        for k in 0..3 {
            for i in 0..wx[k].as_slice().len() {
                let lhs = ws[k].as_slice()[i];
                let rhs = wx[k].as_slice()[i] + wy[k].as_slice()[i];
                assert!((lhs - rhs).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn polynomial_surfaces_vanish_along_high_pass_axis() {
        let fb = FilterBank::db8();
        // Degree 7 along columns, arbitrary along rows; LH is high-pass across
        // columns.
        let img = Grid::from_fn(24, 24, |r, c| {
            let x = c as f64 / 4.0;
            (r as f64).sin() * (x.powi(7) - 3.0 * x.powi(4) + x)
        });
        let out = correlate_same(&img, fb.kernel(Direction::Lh));
        for i in 0..24 {
            for j in 7..=24 - 9 {
                assert!(out[(i, j)].abs() <= 1e-6, "({i}, {j}): {}", out[(i, j)]);
            }
        }
    }
}
