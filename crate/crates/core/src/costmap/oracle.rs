//! Brute-force costs: perturb one coefficient, decompress, refilter the whole
//! plane and evaluate the relative distortion directly. Quadratic in the image
//! area; meant for small covers only.

use rayon::prelude::*;

use super::{window_bounds, CostMap, CostParams, WindowMode, SPAN};
use crate::container::DctContainer;
use crate::error::Error;
use crate::filterbank::{pad_symmetric, residuals_of_padded, FilterBank, PAD};
use crate::grid::Grid;
use crate::jpeg::{decompress, BLOCK, COEFF_MAX};

/// Which residual positions the oracle sums over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Summation {
    /// Only the 23×23 support of the changed block.
    Windowed,
    /// Every residual position whose (mode-shifted) denominator exists.
    Unrestricted,
}

pub fn costmap_oracle(c: &DctContainer, mode: WindowMode, p: &CostParams) -> Result<CostMap, Error> {
    costmap_oracle_with(c, mode, p, Summation::Windowed)
}

/// The padding border of the perturbed image is the cover's own border: the
/// change is written into the interior of the padded cover, so it is never
/// mirrored into the padding.
pub fn costmap_oracle_with(
    c: &DctContainer,
    mode: WindowMode,
    p: &CostParams,
    summation: Summation,
) -> Result<CostMap, Error> {
    p.validate()?;
    let fb = FilterBank::db8();
    let (h, w) = (c.height(), c.width());
    let cover_px = decompress(c).into_grid();
    let padded = pad_symmetric(&cover_px, PAD)?;
    let base = residuals_of_padded(&padded, &fb);
    let shift = mode.shift();

    let rho: Vec<f64> = (0..h * w)
        .into_par_iter()
        .map(|idx| {
            let (row, col) = (idx / w, idx % w);
            let x = c.coeff(row, col);
            if p.is_wet(x) {
                return p.wet_cost;
            }
            let mut stego = c.clone();
            // ±1 cost the same; decrement only when +1 is unrepresentable.
            stego.set_coeff(row, col, if x < COEFF_MAX { x + 1 } else { x - 1 });
            let stego_px = decompress(&stego).into_grid();
            let mut stego_padded = padded.clone();
            for r in 0..h {
                let dst = &mut stego_padded.as_mut_slice()[(r + PAD) * (w + 2 * PAD) + PAD..][..w];
                dst.copy_from_slice(stego_px.row(r));
            }
            let changed = residuals_of_padded(&stego_padded, &fb);

            let mut acc = 0.0;
            match summation {
                Summation::Windowed => {
                    let support = window_bounds(row / BLOCK, col / BLOCK, WindowMode::Fixed);
                    for k in 0..3 {
                        for a in 0..SPAN {
                            for b in 0..SPAN {
                                let (i, j) = (support.row0 + a, support.col0 + b);
                                acc += term(&base[k], &changed[k], i, j, shift, p.sigma);
                            }
                        }
                    }
                }
                Summation::Unrestricted => {
                    let (ph, pw) = base[0].shape();
                    for k in 0..3 {
                        for i in 0..ph - shift {
                            for j in 0..pw - shift {
                                acc += term(&base[k], &changed[k], i, j, shift, p.sigma);
                            }
                        }
                    }
                }
            }
            acc
        })
        .collect();

    let wet = c.coeffs().iter().map(|&x| p.is_wet(x)).collect();
    CostMap::from_parts(h, w, rho, wet, mode, c.nzac())
}

#[inline]
fn term(cover: &Grid, stego: &Grid, i: usize, j: usize, shift: usize, sigma: f64) -> f64 {
    (cover[(i, j)] - stego[(i, j)]).abs() / (sigma + cover[(i + shift, j + shift)].abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costmap::{compute_costmap, relative_error};
    use crate::jpeg::{quality_table, QuantTable};

    fn random_cover(h: usize, w: usize, quality: u32, seed: u64) -> DctContainer {
        let mut state = seed;
        let mut c = DctContainer::zeros(h, w, quality_table(quality).unwrap()).unwrap();
        for r in 0..h {
            for col in 0..w {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                c.set_coeff(r, col, ((state >> 33) % 15) as i32 - 7);
            }
        }
        c
    }

    fn max_rel(a: &CostMap, b: &CostMap) -> f64 {
        a.rho().iter().zip(b.rho()).map(|(x, y)| relative_error(*x, *y)).fold(0.0, f64::max)
    }

    #[test]
    fn zero_container_matches_fast_path() {
        let c = DctContainer::zeros(8, 16, QuantTable::flat(4)).unwrap();
        let p = CostParams::default();
        for mode in WindowMode::BOTH {
            let fast = compute_costmap(&c, mode, &p).unwrap();
            let slow = costmap_oracle(&c, mode, &p).unwrap();
            assert!(max_rel(&fast, &slow) < 1e-12);
        }
    }

    #[test]
    fn unrestricted_sum_equals_windowed_sum() {
        let c = random_cover(16, 8, 75, 11);
        let p = CostParams::default();
        let windowed = costmap_oracle_with(&c, WindowMode::Fixed, &p, Summation::Windowed).unwrap();
        let full = costmap_oracle_with(&c, WindowMode::Fixed, &p, Summation::Unrestricted).unwrap();
        assert!(max_rel(&windowed, &full) < 1e-12);
    }

    #[test]
    fn oracle_matches_fast_path_on_random_cover() {
        let c = random_cover(16, 16, 75, 21);
        let p = CostParams::default();
        for mode in WindowMode::BOTH {
            let fast = compute_costmap(&c, mode, &p).unwrap();
            let slow = costmap_oracle(&c, mode, &p).unwrap();
            assert!(max_rel(&fast, &slow) <= 1e-9, "{mode}: {}", max_rel(&fast, &slow));
            assert_eq!(fast.wet(), slow.wet());
        }
    }

    #[test]
    fn wet_handling_matches_fast_path() {
        let mut c = random_cover(8, 8, 95, 1);
        c.set_coeff(2, 2, 1023);
        let p = CostParams::default();
        let slow = costmap_oracle(&c, WindowMode::Fixed, &p).unwrap();
        assert_eq!(slow.get(2, 2), p.wet_cost);
        // Without wet handling the saturated coefficient is costed via -1.
        let dry = costmap_oracle(&c, WindowMode::Fixed, &p.without_wet()).unwrap();
        let fast = compute_costmap(&c, WindowMode::Fixed, &p.without_wet()).unwrap();
        assert!(relative_error(dry.get(2, 2), fast.get(2, 2)) < 1e-9);
    }
}
