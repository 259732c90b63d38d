use crate::filterbank::{FilterBank, Kernel, TAPS};
use crate::jpeg::{dct_basis, QuantTable, BLOCK};

/// Side of the residual window touched by one 8×8 block: 8 + 16 - 1.
pub const SPAN: usize = BLOCK + TAPS - 1;
pub const SPAN_AREA: usize = SPAN * SPAN;

/// Absolute wavelet-domain impact of a +1 change to each DCT mode, per
/// kernel. Entry `(a, b)` of a table lines up with offset `(a, b)` of the
/// block's residual window.
#[derive(Clone, Debug)]
pub struct ImpactLut {
    tables: Vec<[f64; SPAN_AREA]>,
}

impl ImpactLut {
    /// 23×23 row-major table for kernel `k` and mode `(u, v)`.
    pub fn table(&self, k: usize, u: usize, v: usize) -> &[f64; SPAN_AREA] {
        &self.tables[k * 64 + u * BLOCK + v]
    }

    pub fn get(&self, k: usize, u: usize, v: usize, a: usize, b: usize) -> f64 {
        self.table(k, u, v)[a * SPAN + b]
    }
}

/// Full cross-correlation of an 8×8 block with a 16×16 kernel, in absolute
/// value. Output offset `(r, s)` sees block sample `(x, y)` through kernel tap
/// `(x + 15 - r, y + 15 - s)`.
fn abs_full_correlation(block: &[f64; 64], kernel: &Kernel) -> [f64; SPAN_AREA] {
    let mut out = [0.0; SPAN_AREA];
    for r in 0..SPAN {
        for s in 0..SPAN {
            let mut acc = 0.0;
            for x in 0..BLOCK {
                let Some(a) = (x + TAPS - 1).checked_sub(r).filter(|&a| a < TAPS) else { continue };
                for y in 0..BLOCK {
                    let Some(b) = (y + TAPS - 1).checked_sub(s).filter(|&b| b < TAPS) else { continue };
                    acc += kernel[a][b] * block[x * BLOCK + y];
                }
            }
            out[r * SPAN + s] = acc.abs();
        }
    }
    out
}

pub fn build_impact_lut(q: &QuantTable, fb: &FilterBank) -> ImpactLut {
    let mut tables = Vec::with_capacity(3 * 64);
    for kernel in fb.kernels() {
        for u in 0..BLOCK {
            for v in 0..BLOCK {
                let step = f64::from(q.get(u, v));
                let spatial = dct_basis(u, v).map(|b| b * step);
                tables.push(abs_full_correlation(&spatial, kernel));
            }
        }
    }
    ImpactLut { tables }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::container::DctContainer;
    use crate::filterbank::residuals;
    use crate::jpeg::{decompress, quality_table};

    #[test]
    fn every_table_is_23_by_23_and_nonnegative() {
        let lut = build_impact_lut(&quality_table(75).unwrap(), &FilterBank::db8());
        assert_eq!(SPAN, 23);
        for k in 0..3 {
            for uv in 0..64 {
                let t = lut.table(k, uv / 8, uv % 8);
                assert!(t.iter().all(|&x| x >= 0.0));
                // Support reaches every border of the 23x23 square.
                let edge_max = |f: &dyn Fn(usize) -> usize| (0..SPAN).map(|i| t[f(i)]).fold(0.0f64, f64::max);
                assert!(edge_max(&|i| i) > 0.0);
                assert!(edge_max(&|i| (SPAN - 1) * SPAN + i) > 0.0);
                assert!(edge_max(&|i| i * SPAN) > 0.0);
                assert!(edge_max(&|i| i * SPAN + SPAN - 1) > 0.0);
            }
        }
    }

    #[test]
    fn scales_linearly_with_quant_step() {
        let fb = FilterBank::db8();
        let base = quality_table(80).unwrap();
        let mut doubled = *base.steps();
        doubled[2][5] *= 2;
        let a = build_impact_lut(&base, &fb);
        let b = build_impact_lut(&QuantTable::new(doubled).unwrap(), &fb);
        for k in 0..3 {
            for (x, y) in a.table(k, 2, 5).iter().zip(b.table(k, 2, 5)) {
                assert!((2.0 * x - y).abs() <= 1e-12 * y.abs().max(1.0));
            }
            assert_eq!(a.table(k, 2, 4), b.table(k, 2, 4));
        }
    }

    #[test]
    fn matches_residual_difference_on_interior_block() {
        // Block (2, 2) of a 40x40 cover is at least 16 pixels from every
        // edge, so mirrored padding never sees the change.
        let fb = FilterBank::db8();
        let q = quality_table(75).unwrap();
        let mut cover = DctContainer::zeros(40, 40, q).unwrap();
        let mut state = 99u64;
        for r in 0..40 {
            for c in 0..40 {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                cover.set_coeff(r, c, ((state >> 40) % 21) as i32 - 10);
            }
        }
        let lut = build_impact_lut(&q, &fb);
        let base = residuals(&decompress(&cover), &fb);
        for (u, v) in [(0, 0), (0, 1), (3, 6), (7, 7)] {
            let mut y = cover.clone();
            y.set_coeff(16 + u, 16 + v, cover.coeff(16 + u, 16 + v) + 1);
            let changed = residuals(&decompress(&y), &fb);
            for k in 0..3 {
                let plane = changed[k].sub(&base[k]);
                for i in 0..plane.rows() {
                    for j in 0..plane.cols() {
                        let d = plane[(i, j)].abs();
                        let inside = (24..24 + SPAN).contains(&i) && (24..24 + SPAN).contains(&j);
                        let expected = if inside { lut.get(k, u, v, i - 24, j - 24) } else { 0.0 };
                        assert!((d - expected).abs() < 1e-9, "k={k} ({u},{v}) at ({i},{j}): {d} vs {expected}");
                    }
                }
            }
        }
    }
}
