//! Direct (interval-based) discretization strategies: trapezoid sampling,
//! interval averages on linear/logarithmic grids, the mean method, and the
//! equal-weight method.

use crate::bath::DiscreteBath;
use crate::error::{BathError, Result};
use crate::quad::{clip_pieces, integrate_complex, integrate_real};
use crate::spectral::{total_weight, SpectralDensity};
use num_complex::Complex64;
use std::collections::VecDeque;

/// Partition a = b_0 < b_1 < … < b_{N_b} = b of the support into intervals
/// I_n = [b_{n−1}, b_n].
#[derive(Debug, Clone)]
pub struct IntervalPartition {
    breakpoints: Vec<f64>,
}

impl IntervalPartition {
    pub fn new(breakpoints: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(BathError::InvalidPartition("need at least two breakpoints".into()));
        }
        if !breakpoints.iter().all(|b| b.is_finite()) {
            return Err(BathError::InvalidPartition("non-finite breakpoint".into()));
        }
        if !breakpoints.windows(2).all(|w| w[0] < w[1]) {
            return Err(BathError::InvalidPartition(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(IntervalPartition { breakpoints })
    }

    /// Equal-width intervals.
    pub fn linear(a: f64, b: f64, n_b: usize) -> Result<Self> {
        if !(a < b) || n_b == 0 {
            return Err(BathError::InvalidPartition(format!(
                "invalid linear partition [{a}, {b}] with {n_b} intervals"
            )));
        }
        let mut bps: Vec<f64> = (0..=n_b)
            .map(|k| a + (b - a) * k as f64 / n_b as f64)
            .collect();
        bps[n_b] = b;
        IntervalPartition::new(bps)
    }

    /// Interval widths decrease geometrically (ratio `lambda_disc`) toward the
    /// accumulation point from both sides; the interval count is split between
    /// the sides in proportion to their lengths.
    pub fn logarithmic(a: f64, b: f64, n_b: usize, lambda_disc: f64, x_accum: f64) -> Result<Self> {
        if !(a < b) || n_b == 0 {
            return Err(BathError::InvalidPartition(format!(
                "invalid log partition [{a}, {b}] with {n_b} intervals"
            )));
        }
        if !(lambda_disc > 1.0) {
            return Err(BathError::InvalidPartition(format!(
                "lambda_disc = {lambda_disc} must be > 1"
            )));
        }
        if !(a..=b).contains(&x_accum) {
            return Err(BathError::InvalidPartition(format!(
                "x_accum = {x_accum} outside [{a}, {b}]"
            )));
        }
        if n_b == 1 {
            return IntervalPartition::new(vec![a, b]);
        }
        let len_l = x_accum - a;
        let len_r = b - x_accum;
        // proportional split, with at least one interval per nonempty side
        let mut n_l = ((n_b as f64) * len_l / (b - a)).round() as usize;
        if len_l > 0.0 {
            n_l = n_l.clamp(1, if len_r > 0.0 { n_b - 1 } else { n_b });
        } else {
            n_l = 0;
        }
        let n_r = n_b - n_l;
        let mut bps = Vec::with_capacity(n_b + 1);
        // left side: distances from x_accum shrink geometrically toward it
        bps.push(a);
        for k in 1..n_l {
            bps.push(x_accum - len_l / lambda_disc.powi(k as i32));
        }
        if n_l > 0 || n_r > 0 {
            bps.push(x_accum);
        }
        for k in (1..n_r).rev() {
            bps.push(x_accum + len_r / lambda_disc.powi(k as i32));
        }
        bps.push(b);
        bps.dedup();
        IntervalPartition::new(bps)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Number of intervals.
    pub fn len(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn support(&self) -> (f64, f64) {
        (self.breakpoints[0], *self.breakpoints.last().unwrap())
    }

    /// Each interval split in half: a 2× refinement.
    pub fn refine(&self) -> IntervalPartition {
        let mut bps = Vec::with_capacity(2 * self.len() + 1);
        for w in self.breakpoints.windows(2) {
            bps.push(w[0]);
            bps.push(0.5 * (w[0] + w[1]));
        }
        bps.push(*self.breakpoints.last().unwrap());
        IntervalPartition { breakpoints: bps }
    }
}

/// Weight and first moment of J over [lo, hi], via a single shared-refinement
/// quadrature pass (J packed in the real part, x·J in the imaginary part).
fn interval_moments(j: &SpectralDensity, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)> {
    let pieces = clip_pieces(&j.pieces(), lo, hi);
    if pieces.is_empty() {
        return Ok((0.0, 0.0));
    }
    let f = |x: f64| Complex64::new(j.eval(x), x * j.eval(x));
    let (v, _) = integrate_complex(f, &pieces, tol, None)?;
    Ok((v.re, v.im))
}

fn interval_weight(j: &SpectralDensity, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let pieces = clip_pieces(&j.pieces(), lo, hi);
    if pieces.is_empty() {
        return Ok(0.0);
    }
    let (v, _) = integrate_real(|x| j.eval(x), &pieces, tol, None)?;
    Ok(v)
}

/// Sample J at the midpoints of N_b equal intervals: x_n linearly spaced,
/// |V_n|² = J(x_n)·Δx. First-order; does not conserve the total weight.
pub fn trapezoid_discretize(j: &SpectralDensity, n_b: usize) -> Result<DiscreteBath> {
    if n_b == 0 {
        return Err(BathError::EmptyBath);
    }
    let (a, b) = j.support();
    let dx = (b - a) / n_b as f64;
    let energies: Vec<f64> = (0..n_b).map(|n| a + (n as f64 + 0.5) * dx).collect();
    let weights: Vec<f64> = energies.iter().map(|x| j.eval(*x) * dx).collect();
    DiscreteBath::new(energies, weights, "trapezoid", (a, b))
}

/// Interval averages: |V_n|² = ∫_{I_n} J, x_n = ∫_{I_n} x·J / |V_n|².
pub fn interval_discretize(j: &SpectralDensity, partition: &IntervalPartition) -> Result<DiscreteBath> {
    interval_discretize_tagged(j, partition, "interval")
}

fn interval_discretize_tagged(
    j: &SpectralDensity,
    partition: &IntervalPartition,
    tag: &str,
) -> Result<DiscreteBath> {
    let (a, b) = j.support();
    let (pa, pb) = partition.support();
    if pa < a - 1e-12 * (b - a) || pb > b + 1e-12 * (b - a) {
        return Err(BathError::InvalidPartition(format!(
            "partition [{pa}, {pb}] exceeds support [{a}, {b}]"
        )));
    }
    let w_tot = total_weight(j)?;
    let scale = w_tot * (1.0 + a.abs().max(b.abs()));
    let mut energies = Vec::with_capacity(partition.len());
    let mut weights = Vec::with_capacity(partition.len());
    for seg in partition.breakpoints().windows(2) {
        let tol = (1e-13 * scale * (seg[1] - seg[0]) / (pb - pa)).max(1e-300);
        let (w, m1) = interval_moments(j, seg[0], seg[1], tol)?;
        if w > 0.0 {
            energies.push((m1 / w).clamp(seg[0], seg[1]));
            weights.push(w);
        } else {
            // zero-weight interval: dropped (counted by the bath constructor)
            energies.push(0.5 * (seg[0] + seg[1]));
            weights.push(0.0);
        }
    }
    DiscreteBath::new(energies, weights, tag, (a, b))
}

/// Interval averages on an equal-width grid.
pub fn linear_discretize(j: &SpectralDensity, n_b: usize) -> Result<DiscreteBath> {
    let (a, b) = j.support();
    interval_discretize_tagged(j, &IntervalPartition::linear(a, b, n_b)?, "linear")
}

/// Interval averages on a logarithmic grid accumulating at `x_accum`.
pub fn log_discretize(
    j: &SpectralDensity,
    n_b: usize,
    lambda_disc: f64,
    x_accum: f64,
) -> Result<DiscreteBath> {
    let (a, b) = j.support();
    interval_discretize_tagged(
        j,
        &IntervalPartition::logarithmic(a, b, n_b, lambda_disc, x_accum)?,
        "log",
    )
}

/// The mean method: the first energy is the spectral mean of [a,b]; each
/// placed energy splits its interval in two, and sub-intervals are processed
/// breadth-first, left-to-right, until N_b energies exist. Weights are then
/// integrals of J over midpoint-bounded cells (first starting at a, last
/// ending at b).
pub fn mean_method(j: &SpectralDensity, n_b: usize) -> Result<DiscreteBath> {
    if n_b == 0 {
        return Err(BathError::EmptyBath);
    }
    let (a, b) = j.support();
    let w_tot = total_weight(j)?;
    if w_tot <= 0.0 {
        return Err(BathError::EmptyBath);
    }
    let scale = w_tot * (1.0 + a.abs().max(b.abs()));
    // a sub-interval whose weight is indistinguishable from zero at quadrature
    // accuracy halts its branch
    let halt_weight = 1e-13 * w_tot;
    let halt_width = 1e-14 * (b - a);
    let moment_tol = (1e-14 * scale).max(1e-300);

    let mut energies: Vec<f64> = Vec::with_capacity(n_b);
    let mut queue: VecDeque<(f64, f64)> = VecDeque::new();
    queue.push_back((a, b));
    while energies.len() < n_b {
        let Some((lo, hi)) = queue.pop_front() else {
            return Err(BathError::MeanMethodExhausted {
                requested: n_b,
                achievable: energies.len(),
            });
        };
        let (w, m1) = interval_moments(j, lo, hi, moment_tol)?;
        if w <= halt_weight {
            continue;
        }
        let mean = (m1 / w).clamp(lo, hi);
        energies.push(mean);
        if mean - lo > halt_width {
            queue.push_back((lo, mean));
        }
        if hi - mean > halt_width {
            queue.push_back((mean, hi));
        }
    }
    energies.sort_by(|p, q| p.partial_cmp(q).unwrap());

    // midpoint-bounded weight cells
    let mut cells = Vec::with_capacity(n_b + 1);
    cells.push(a);
    for w in energies.windows(2) {
        cells.push(0.5 * (w[0] + w[1]));
    }
    cells.push(b);
    let mut weights = Vec::with_capacity(n_b);
    for seg in cells.windows(2) {
        let tol = (1e-13 * scale * ((seg[1] - seg[0]) / (b - a)).max(1e-6)).max(1e-300);
        weights.push(interval_weight(j, seg[0], seg[1], tol)?);
    }
    DiscreteBath::new(energies, weights, "mean_breadth_first", (a, b))
}

/// The equal-weight method: breakpoints are the k/N_b quantiles of J (leftmost
/// solution in flat-zero regions), energies/weights by interval averages.
pub fn equal_weight_method(j: &SpectralDensity, n_b: usize) -> Result<DiscreteBath> {
    if n_b == 0 {
        return Err(BathError::EmptyBath);
    }
    let (a, b) = j.support();
    let w_tot = total_weight(j)?;
    if w_tot <= 0.0 {
        return Err(BathError::EmptyBath);
    }
    let quantile_tol = 1e-12 * (b - a);
    let weight_slack = 1e-13 * w_tot;
    let probe_tol = (1e-14 * w_tot).max(1e-300);

    let mut bps = Vec::with_capacity(n_b + 1);
    bps.push(a);
    let mut f_prev = 0.0; // cumulative weight up to bps.last()
    for k in 1..n_b {
        let target = w_tot * k as f64 / n_b as f64;
        let anchor = *bps.last().unwrap();
        // lower-bound bisection: smallest x with F(x) >= target, which picks
        // the leftmost solution across flat-zero plateaus
        let mut lo = anchor;
        let mut hi = b;
        while hi - lo > quantile_tol {
            let mid = 0.5 * (lo + hi);
            let f_mid = f_prev + interval_weight(j, anchor, mid, probe_tol)?;
            if f_mid >= target - weight_slack {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let bk = hi;
        if bk <= *bps.last().unwrap() {
            return Err(BathError::InvalidPartition(format!(
                "quantile breakpoints collided at k={k}; N_b={n_b} too large for this density"
            )));
        }
        f_prev += interval_weight(j, anchor, bk, probe_tol)?;
        bps.push(bk);
    }
    bps.push(b);
    let partition = IntervalPartition::new(bps)?;
    interval_discretize_tagged(j, &partition, "equal_weight")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn fig1_density() -> SpectralDensity {
        SpectralDensity::caldeira_leggett(1.0, 0.5, 10.0, 50.0).unwrap()
    }

    fn ramp_density() -> SpectralDensity {
        // J(x) = x on [0, 1]
        SpectralDensity::tabulated(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap()
    }

    #[test]
    fn trapezoid_flat_and_ramp() {
        let f = SpectralDensity::flat(1.0, (0.0, 1.0)).unwrap();
        let bath = trapezoid_discretize(&f, 2).unwrap();
        assert_eq!(bath.energies(), &[0.25, 0.75]);
        assert_eq!(bath.weights(), &[0.5, 0.5]);
        assert_eq!(bath.method_tag(), "trapezoid");
        let bath = trapezoid_discretize(&ramp_density(), 1).unwrap();
        assert_eq!(bath.energies(), &[0.5]);
        assert_eq!(bath.weights(), &[0.5]);
    }

    #[test]
    fn trapezoid_drops_vanishing_samples() {
        // narrow peak away from all sample nodes: the off-peak samples underflow
        let j = SpectralDensity::gaussian_mix(vec![0.5], 1e-5, (0.0, 1.0)).unwrap();
        let bath = trapezoid_discretize(&j, 3).unwrap();
        assert_eq!(bath.n_b(), 1);
        assert_eq!(bath.dropped_modes(), 2);
        assert_relative_eq!(bath.energies()[0], 0.5);
    }

    #[test]
    fn trapezoid_weight_deviation_shrinks() {
        let j = fig1_density();
        let w = total_weight(&j).unwrap();
        let devs: Vec<f64> = [16, 32, 64]
            .iter()
            .map(|n| (trapezoid_discretize(&j, *n).unwrap().total_weight() - w).abs())
            .collect();
        assert!(devs[1] < devs[0]);
        assert!(devs[2] < devs[1]);
    }

    #[test]
    fn linear_partition_breakpoints() {
        let p = IntervalPartition::linear(0.0, 1.0, 4).unwrap();
        assert_eq!(p.breakpoints(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(p.len(), 4);
        assert!(IntervalPartition::linear(1.0, 0.0, 4).is_err());
        assert!(IntervalPartition::new(vec![0.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn log_partition_accumulates_geometrically() {
        let p = IntervalPartition::logarithmic(-1.0, 1.0, 6, 2.0, 0.0).unwrap();
        let expect = [-1.0, -0.5, -0.25, 0.0, 0.25, 0.5, 1.0];
        for (got, want) in p.breakpoints().iter().zip(&expect) {
            assert_relative_eq!(got, want, epsilon = 1e-15);
        }
        // widths halve toward the accumulation point on each side
        let widths: Vec<f64> = p.breakpoints().windows(2).map(|w| w[1] - w[0]).collect();
        assert_relative_eq!(widths[0] / widths[1], 2.0, epsilon = 1e-12);
        assert_relative_eq!(widths[6 - 1] / widths[6 - 2], 2.0, epsilon = 1e-12);
        // accumulation at the left edge: one-sided
        let p = IntervalPartition::logarithmic(0.0, 1.0, 4, 2.0, 0.0).unwrap();
        let expect = [0.0, 0.125, 0.25, 0.5, 1.0];
        for (got, want) in p.breakpoints().iter().zip(&expect) {
            assert_relative_eq!(got, want, epsilon = 1e-15);
        }
        assert!(IntervalPartition::logarithmic(0.0, 1.0, 4, 1.0, 0.0).is_err());
        assert!(IntervalPartition::logarithmic(0.0, 1.0, 4, 2.0, 2.0).is_err());
    }

    #[test]
    fn interval_averages_match_moments() {
        let f = SpectralDensity::flat(1.0, (0.0, 1.0)).unwrap();
        let bath = interval_discretize(&f, &IntervalPartition::linear(0.0, 1.0, 2).unwrap()).unwrap();
        assert_relative_eq!(bath.energies()[0], 0.25, epsilon = 1e-13);
        assert_relative_eq!(bath.energies()[1], 0.75, epsilon = 1e-13);
        assert_relative_eq!(bath.weights()[0], 0.5, epsilon = 1e-13);
        // J(x)=x on one interval: weight 1/2, energy (1/3)/(1/2) = 2/3
        let bath = interval_discretize(&ramp_density(), &IntervalPartition::linear(0.0, 1.0, 1).unwrap())
            .unwrap();
        assert_relative_eq!(bath.energies()[0], 2.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(bath.weights()[0], 0.5, epsilon = 1e-13);
    }

    #[test]
    fn interval_weight_conservation() {
        let j = fig1_density();
        let w = total_weight(&j).unwrap();
        for bath in [
            linear_discretize(&j, 7).unwrap(),
            log_discretize(&j, 9, 2.0, 0.0).unwrap(),
        ] {
            assert_relative_eq!(bath.total_weight(), w, max_relative = 1e-12);
        }
    }

    #[test]
    fn mean_method_flat_hand_values() {
        let f = SpectralDensity::flat(1.0, (0.0, 1.0)).unwrap();
        let bath = mean_method(&f, 1).unwrap();
        assert_relative_eq!(bath.energies()[0], 0.5, epsilon = 1e-13);
        assert_relative_eq!(bath.weights()[0], 1.0, epsilon = 1e-12);
        let bath = mean_method(&f, 3).unwrap();
        let expect_x = [0.25, 0.5, 0.75];
        let expect_w = [0.375, 0.25, 0.375];
        for ((x, w), (ex, ew)) in bath
            .energies()
            .iter()
            .zip(bath.weights())
            .zip(expect_x.iter().zip(&expect_w))
        {
            assert_relative_eq!(x, ex, epsilon = 1e-12);
            assert_relative_eq!(w, ew, epsilon = 1e-11);
        }
        assert_eq!(bath.method_tag(), "mean_breadth_first");
    }

    /// Simpson-rule moments of the triple-Gaussian density over [lo, hi]:
    /// an oracle independent of the adaptive Gauss–Legendre engine.
    fn simpson_moments_g3(lo: f64, hi: f64) -> (f64, f64) {
        let jg3 = |x: f64| -> f64 {
            [-4.0f64, 0.0, 4.0]
                .iter()
                .map(|c| (-(x - c) * (x - c) / 0.5).exp())
                .sum()
        };
        let n = 4096; // even
        let h = (hi - lo) / n as f64;
        let (mut w, mut m1) = (0.0, 0.0);
        for i in 0..=n {
            let x = lo + i as f64 * h;
            let coeff = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w += coeff * jg3(x);
            m1 += coeff * x * jg3(x);
        }
        (w * h / 3.0, m1 * h / 3.0)
    }

    #[test]
    fn mean_method_nodes_follow_mass() {
        let g = SpectralDensity::triple_gaussian(0.5).unwrap();
        let n_b = 30;
        let bath = mean_method(&g, n_b).unwrap();
        // independent re-run of the breadth-first recursion
        let mut oracle = Vec::new();
        let mut queue = std::collections::VecDeque::from([(-5.0f64, 5.0f64)]);
        while oracle.len() < n_b {
            let (lo, hi) = queue.pop_front().unwrap();
            let (w, m1) = simpson_moments_g3(lo, hi);
            if w <= 1e-13 * 3.7 {
                continue;
            }
            let mean = m1 / w;
            oracle.push(mean);
            queue.push_back((lo, mean));
            queue.push_back((mean, hi));
        }
        oracle.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in bath.energies().iter().zip(&oracle) {
            assert!((got - want).abs() < 1e-8, "node {got} vs oracle {want}");
        }
        // nodes concentrate near the three peaks in proportion to their mass,
        // up to the bias of the count-balanced interval tree
        let count = |lo: f64, hi: f64| {
            bath.energies()
                .iter()
                .filter(|x| **x >= lo && **x < hi)
                .count() as f64
        };
        let w_tot = total_weight(&g).unwrap();
        for (lo, hi) in [(-5.0, -2.0), (-2.0, 2.0), (2.0, 5.0)] {
            let mass = interval_weight(&g, lo, hi, 1e-12).unwrap();
            let expect = n_b as f64 * mass / w_tot;
            let got = count(lo, hi);
            assert!(
                (got - expect).abs() <= 6.0,
                "region [{lo},{hi}]: {got} nodes vs mass share {expect:.1}"
            );
        }
        assert_relative_eq!(bath.total_weight(), w_tot, max_relative = 1e-10);
    }

    #[test]
    fn equal_weight_hand_values() {
        let f = SpectralDensity::flat(1.0, (0.0, 1.0)).unwrap();
        let bath = equal_weight_method(&f, 2).unwrap();
        assert_relative_eq!(bath.energies()[0], 0.25, epsilon = 1e-11);
        assert_relative_eq!(bath.energies()[1], 0.75, epsilon = 1e-11);
        assert_relative_eq!(bath.weights()[0], 0.5, epsilon = 1e-12);
        // J(x)=x: quantile breakpoint at 1/sqrt(2), conditional means
        // (2/3)·b³/b² on each side of it
        let bath = equal_weight_method(&ramp_density(), 2).unwrap();
        let b1 = std::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(bath.energies()[0], 2.0 / 3.0 * b1, max_relative = 1e-9);
        assert_relative_eq!(
            bath.energies()[1],
            2.0 / 3.0 * (1.0 - b1.powi(3)) / (1.0 - b1.powi(2)),
            max_relative = 1e-9
        );
        assert_eq!(bath.method_tag(), "equal_weight");
    }

    #[test]
    fn equal_weight_weights_are_equal() {
        let j = fig1_density();
        let bath = equal_weight_method(&j, 7).unwrap();
        let w = total_weight(&j).unwrap() / 7.0;
        for wn in bath.weights() {
            assert_relative_eq!(wn, &w, max_relative = 1e-10);
        }
    }

    #[test]
    fn equal_weight_takes_leftmost_quantile_in_plateaus() {
        // J vanishes identically on [0.4, 0.6]; the N_b=2 breakpoint is the
        // half-weight quantile, whose leftmost solution is 0.4
        let j = SpectralDensity::tabulated(vec![0.0, 0.4, 0.6, 1.0], vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let bath = equal_weight_method(&j, 2).unwrap();
        // energies are conditional means of [0, 0.4] and [0.6, 1]
        let m_left = (0.4f64.powi(2) / 2.0 - 0.4f64.powi(3) / 3.0 / 0.4) / 0.2;
        assert_relative_eq!(bath.energies()[0], m_left, max_relative = 1e-6);
        assert!(bath.energies()[1] > 0.6);
        assert_relative_eq!(bath.weights()[0], bath.weights()[1], max_relative = 1e-10);
    }

    #[test]
    fn refinement_is_nested() {
        let p = IntervalPartition::linear(0.0, 1.0, 2).unwrap();
        let r = p.refine();
        assert_eq!(r.breakpoints(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn random_tabulated_invariants(
            values in proptest::collection::vec(0.05f64..1.0, 4..9),
            n_b in 1usize..7,
        ) {
            let grid: Vec<f64> = (0..values.len())
                .map(|i| i as f64 / (values.len() - 1) as f64)
                .collect();
            let j = SpectralDensity::tabulated(grid, values).unwrap();
            let w = total_weight(&j).unwrap();
            for bath in [
                linear_discretize(&j, n_b).unwrap(),
                mean_method(&j, n_b).unwrap(),
                equal_weight_method(&j, n_b).unwrap(),
            ] {
                // ordering and containment
                prop_assert!(bath.energies().windows(2).all(|p| p[0] < p[1]));
                prop_assert!(bath.energies().iter().all(|x| (0.0..=1.0).contains(x)));
                prop_assert!(bath.weights().iter().all(|w| *w > 0.0));
                // weight conservation (not required of trapezoid)
                prop_assert!((bath.total_weight() - w).abs() <= 1e-10 * w);
            }
        }

        #[test]
        fn refinement_improves_hybridization(
            values in proptest::collection::vec(0.05f64..1.0, 4..7),
        ) {
            let grid: Vec<f64> = (0..values.len())
                .map(|i| i as f64 / (values.len() - 1) as f64)
                .collect();
            let j = SpectralDensity::tabulated(grid, values).unwrap();
            let coarse = IntervalPartition::linear(0.0, 1.0, 6).unwrap();
            let fine = coarse.refine();
            let bath_c = interval_discretize(&j, &coarse).unwrap();
            let bath_f = interval_discretize(&j, &fine).unwrap();
            // fixed off-axis probe points
            for im in [0.5, 1.0, 2.0] {
                let z = num_complex::Complex64::new(0.5, im);
                let exact = crate::spectral::hybridization(&j, z).unwrap();
                let err_c = (bath_c.lambda_z(z) - exact).norm();
                let err_f = (bath_f.lambda_z(z) - exact).norm();
                prop_assert!(err_f <= err_c * (1.0 + 1e-9),
                    "refinement worsened the hybridization error: {err_c:e} -> {err_f:e}");
            }
        }
    }
}
