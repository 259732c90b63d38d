//! Payload-limited ternary embedding simulation.
//!
//! Costs become change probabilities through a Gibbs distribution,
//! `p = e^{-λρ} / (1 + 2e^{-λρ})` for each of +1 and -1, and λ is chosen so
//! the total ternary entropy matches the requested payload.

use rayon::prelude::*;

use crate::container::DctContainer;
use crate::costmap::CostMap;
use crate::error::{Error, Result};
use crate::jpeg::{COEFF_MAX, COEFF_MIN};
use crate::rng::{CoordRng, DOMAIN_EMBED};

/// Allowed gap between achieved and target payload, in bits.
pub const PAYLOAD_TOLERANCE_BITS: f64 = 1e-3;
const MAX_ITERATIONS: usize = 200;
const MAX_DOUBLINGS: usize = 1100;

/// Probability of a +1 change at each coefficient (equal to that of -1).
#[derive(Clone, Debug, PartialEq)]
pub struct ProbMap {
    pub height: usize,
    pub width: usize,
    pub p: Vec<f64>,
    pub lambda: f64,
    /// Bits.
    pub target_payload: f64,
    /// Bits, Σ H3(p).
    pub achieved_payload: f64,
}

impl ProbMap {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.p[row * self.width + col]
    }

    /// Expected number of changed coefficients, Σ 2p.
    pub fn expected_changes(&self) -> f64 {
        self.p.iter().map(|p| 2.0 * p).sum()
    }
}

/// Ternary entropy in bits of the distribution {p, p, 1 - 2p}, with 0·log 0 = 0.
pub fn ternary_entropy(p: f64) -> f64 {
    let xlog = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    2.0 * xlog(p) + xlog(1.0 - 2.0 * p)
}

#[inline]
pub fn change_probability(rho: f64, lambda: f64) -> f64 {
    let e = (-lambda * rho).exp();
    e / (1.0 + 2.0 * e)
}

fn probabilities(cm: &CostMap, lambda: f64) -> Vec<f64> {
    cm.rho().iter().zip(cm.wet()).map(|(&rho, &wet)| if wet { 0.0 } else { change_probability(rho, lambda) }).collect()
}

fn total_entropy(cm: &CostMap, lambda: f64) -> f64 {
    cm.rho()
        .iter()
        .zip(cm.wet())
        .filter(|(_, &wet)| !wet)
        .map(|(&rho, _)| ternary_entropy(change_probability(rho, lambda)))
        .sum()
}

/// Finds λ by bisection so that Σ H3(p) equals `payload_bpnzac · nzac` bits
/// within [`PAYLOAD_TOLERANCE_BITS`]. Wet coefficients get p = 0.
///
/// A payload of exactly log2(3) bpnzAC is accepted; it is only reachable at
/// λ = 0 when every coefficient is a nonzero AC.
pub fn solve_lambda(cm: &CostMap, payload_bpnzac: f64) -> Result<ProbMap> {
    let max_rate = 3f64.log2();
    if !(payload_bpnzac > 0.0 && payload_bpnzac <= max_rate) {
        return Err(Error::invalid("payload", format!("{payload_bpnzac} bpnzAC is outside (0, log2 3]")));
    }
    if cm.nzac() == 0 {
        return Err(Error::Solver("cover has no nonzero AC coefficients".into()));
    }
    let target = payload_bpnzac * cm.nzac() as f64;
    let finish = |lambda: f64, achieved: f64| ProbMap {
        height: cm.height(),
        width: cm.width(),
        p: probabilities(cm, lambda),
        lambda,
        target_payload: target,
        achieved_payload: achieved,
    };

    let capacity = total_entropy(cm, 0.0);
    if capacity < target - PAYLOAD_TOLERANCE_BITS {
        return Err(Error::Solver(format!("payload of {target:.3} bits exceeds capacity of {capacity:.3} bits")));
    }
    if capacity <= target + PAYLOAD_TOLERANCE_BITS {
        return Ok(finish(0.0, capacity));
    }

    // Bracket: entropy(lo) > target >= entropy(hi).
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut h_hi = total_entropy(cm, hi);
    let mut doublings = 0;
    while h_hi > target {
        lo = hi;
        hi *= 2.0;
        h_hi = total_entropy(cm, hi);
        doublings += 1;
        if doublings > MAX_DOUBLINGS || !hi.is_finite() {
            return Err(Error::Solver("could not bracket lambda".into()));
        }
    }
    if lo == 0.0 {
        while hi > f64::MIN_POSITIVE && total_entropy(cm, hi / 2.0) < target {
            hi /= 2.0;
        }
        lo = hi / 2.0;
    }

    let mut best = (hi, h_hi);
    for _ in 0..MAX_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        let h = total_entropy(cm, mid);
        if (h - target).abs() < (best.1 - target).abs() {
            best = (mid, h);
        }
        if (h - target).abs() <= PAYLOAD_TOLERANCE_BITS || mid == lo || mid == hi {
            break;
        }
        if h > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (lambda, achieved) = best;
    if (achieved - target).abs() > PAYLOAD_TOLERANCE_BITS {
        return Err(Error::Solver(format!("bisection stalled at {achieved:.6} bits for a {target:.6} bit target")));
    }
    Ok(finish(lambda, achieved))
}

/// Draws one uniform `r` per coefficient, keyed by `(seed, row, col)`, and
/// applies -1 when `r < p`, +1 when `p <= r < 2p`.
pub fn simulate(pm: &ProbMap, c: &DctContainer, seed: u64) -> Result<DctContainer> {
    if (pm.height, pm.width) != (c.height(), c.width()) || pm.p.len() != pm.height * pm.width {
        return Err(Error::invalid(
            "probabilities",
            format!("{}x{} map does not match {}x{} container", pm.height, pm.width, c.height(), c.width()),
        ));
    }
    let rng = CoordRng::new(seed, DOMAIN_EMBED);
    let w = c.width();
    let mut coeffs = c.coeffs().to_vec();
    coeffs.par_chunks_mut(w).zip(pm.p.par_chunks(w)).enumerate().for_each(|(row, (dst, probs))| {
        let mut r = vec![0.0; w];
        rng.fill_row(row, &mut r);
        for ((x, &p), &u) in dst.iter_mut().zip(probs).zip(&r) {
            let delta = if u < p {
                -1
            } else if u < 2.0 * p {
                1
            } else {
                0
            };
            *x = (*x + delta).clamp(COEFF_MIN, COEFF_MAX);
        }
    });
    DctContainer::from_parts(c.height(), w, *c.quant(), coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costmap::WindowMode;
    use crate::jpeg::QuantTable;

    fn costmap(rho: Vec<f64>, wet: Vec<bool>, h: usize, w: usize, nzac: usize) -> CostMap {
        CostMap::from_parts(h, w, rho, wet, WindowMode::Fixed, nzac).unwrap()
    }

    fn random_costs(h: usize, w: usize, seed: u64) -> Vec<f64> {
        let rng = CoordRng::new(seed, 0);
        (0..h * w).map(|i| 10f64.powf(1.0 + 4.0 * rng.uniform(i / w, i % w))).collect()
    }

    #[test]
    fn entropy_edges() {
        assert_eq!(ternary_entropy(0.0), 0.0);
        assert!((ternary_entropy(1.0 / 3.0) - 3f64.log2()).abs() < 1e-12);
        assert!((ternary_entropy(0.5) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn equal_costs_at_full_rate_give_one_third() {
        let n = 64;
        let cm = costmap(vec![5.0; n], vec![false; n], 8, 8, n);
        let pm = solve_lambda(&cm, 3f64.log2()).unwrap();
        assert_eq!(pm.lambda, 0.0);
        assert!(pm.p.iter().all(|&p| (p - 1.0 / 3.0).abs() < 1e-12));
    }

    #[test]
    fn small_payload_drives_probabilities_to_zero() {
        let (h, w) = (32, 32);
        let cm = costmap(random_costs(h, w, 1), vec![false; h * w], h, w, 700);
        let big = solve_lambda(&cm, 0.4).unwrap();
        let tiny = solve_lambda(&cm, 1e-4).unwrap();
        assert!(tiny.lambda > 10.0 * big.lambda);
        assert!(tiny.p.iter().all(|&p| p < 1e-3));
    }

    #[test]
    fn achieved_payload_matches_target() {
        let (h, w) = (32, 32);
        let mut wet = vec![false; h * w];
        wet[17] = true;
        let mut rho = random_costs(h, w, 2);
        rho[17] = 1e13;
        let cm = costmap(rho, wet, h, w, 800);
        let pm = solve_lambda(&cm, 0.4).unwrap();
        let independent: f64 = pm.p.iter().map(|&p| ternary_entropy(p)).sum();
        assert!((independent - 0.4 * 800.0).abs() <= 1e-3);
        assert!((pm.achieved_payload - independent).abs() < 1e-9);
        assert_eq!(pm.p[17], 0.0);
        assert!(pm.p.iter().all(|&p| (0.0..0.5).contains(&p)));
    }

    #[test]
    fn entropy_decreases_in_lambda() {
        let cm = costmap(random_costs(16, 16, 3), vec![false; 256], 16, 16, 200);
        let mut prev = f64::INFINITY;
        for i in 0..40 {
            let h = total_entropy(&cm, 1e-6 * 1.5f64.powi(i));
            assert!(h <= prev);
            prev = h;
        }
    }

    #[test]
    fn solver_errors() {
        let cm = costmap(vec![1.0; 64], vec![false; 64], 8, 8, 10);
        assert!(solve_lambda(&cm, 0.0).is_err());
        assert!(solve_lambda(&cm, -1.0).is_err());
        assert!(solve_lambda(&cm, 1.6).is_err());
        assert!(solve_lambda(&cm, f64::NAN).is_err());
        let none = costmap(vec![1.0; 64], vec![false; 64], 8, 8, 0);
        assert!(matches!(solve_lambda(&none, 0.4), Err(Error::Solver(_))));
        let all_wet = costmap(vec![1e13; 64], vec![true; 64], 8, 8, 10);
        assert!(matches!(solve_lambda(&all_wet, 0.4), Err(Error::Solver(_))));
    }

    fn flat_map(h: usize, w: usize, p: f64) -> ProbMap {
        ProbMap { height: h, width: w, p: vec![p; h * w], lambda: 0.0, target_payload: 0.0, achieved_payload: 0.0 }
    }

    #[test]
    fn zero_probability_changes_nothing() {
        let mut c = DctContainer::zeros(16, 16, QuantTable::flat(2)).unwrap();
        c.set_coeff(3, 3, 1023);
        let out = simulate(&flat_map(16, 16, 0.0), &c, 5).unwrap();
        assert_eq!(out, c);
    }

    #[test]
    fn change_rate_matches_probability() {
        let (h, w) = (128, 128);
        let c = DctContainer::zeros(h, w, QuantTable::flat(1)).unwrap();
        let out = simulate(&flat_map(h, w, 1.0 / 3.0), &c, 1234).unwrap();
        let n = (h * w) as f64;
        let changed = out.coeffs().iter().filter(|&&x| x != 0).count() as f64;
        let plus = out.coeffs().iter().filter(|&&x| x == 1).count() as f64;
        let sd = (n * (2.0 / 3.0) * (1.0 / 3.0)).sqrt();
        assert!((changed - n * 2.0 / 3.0).abs() <= 3.0 * sd, "{changed}");
        assert!((plus - n / 3.0).abs() <= 3.0 * (n * (1.0 / 3.0) * (2.0 / 3.0)).sqrt());
    }

    #[test]
    fn simulation_is_deterministic_across_thread_counts() {
        let (h, w) = (64, 48);
        let c = DctContainer::zeros(h, w, QuantTable::flat(1)).unwrap();
        let pm = flat_map(h, w, 0.2);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| simulate(&pm, &c, 77).unwrap())
        };
        let a = run(1);
        assert_eq!(a, run(4));
        assert_eq!(a, simulate(&pm, &c, 77).unwrap());
        assert_ne!(a, simulate(&pm, &c, 78).unwrap());
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let c = DctContainer::zeros(8, 8, QuantTable::flat(1)).unwrap();
        assert!(simulate(&flat_map(8, 16, 0.1), &c, 0).is_err());
    }
}
