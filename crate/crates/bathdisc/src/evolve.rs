//! Exact real-time evolution of quadratic models: single-excitation
//! spin-boson dynamics, the U=0 impurity filled-sea Green's function, error
//! metrics, and predicted/empirical validity horizons.
//!
//! Evolution is by full diagonalization (no integrator error): star geometry
//! through an arrowhead secular solver, chain geometry through the symmetric
//! tridiagonal QL.

use crate::bath::{ChainCoefficients, DiscreteBath};
use crate::bessel::bessel_jn;
use crate::direct::linear_discretize;
use crate::error::{BathError, Result};
use crate::series::{RealSeries, TimeGrid, TimeSeries};
use crate::spectral::SpectralDensity;
use crate::tridiag::eigen_first_row;
use num_complex::Complex64;
use rayon::prelude::*;

/// Bath representation attached to the system level.
#[derive(Debug, Clone)]
pub enum BathGeometry {
    Star(DiscreteBath),
    Chain(ChainCoefficients),
}

/// System level ε0 coupled to a discretized bath (or isolated when none).
#[derive(Debug, Clone)]
pub struct SingleParticleModel {
    eps0: f64,
    geometry: Option<BathGeometry>,
}

impl SingleParticleModel {
    pub fn isolated(eps0: f64) -> Self {
        SingleParticleModel {
            eps0,
            geometry: None,
        }
    }

    pub fn star(eps0: f64, bath: DiscreteBath) -> Self {
        SingleParticleModel {
            eps0,
            geometry: Some(BathGeometry::Star(bath)),
        }
    }

    pub fn chain(eps0: f64, chain: ChainCoefficients) -> Self {
        SingleParticleModel {
            eps0,
            geometry: Some(BathGeometry::Chain(chain)),
        }
    }

    pub fn eps0(&self) -> f64 {
        self.eps0
    }

    pub fn n_b(&self) -> usize {
        match &self.geometry {
            None => 0,
            Some(BathGeometry::Star(b)) => b.n_b(),
            Some(BathGeometry::Chain(c)) => c.n_b(),
        }
    }

    pub fn geometry(&self) -> Option<&BathGeometry> {
        self.geometry.as_ref()
    }
}

/// Dense symmetric single-particle matrix (system site first). Star baths
/// give an arrowhead matrix with couplings √weight; chains give the bordered
/// tridiagonal.
pub fn single_particle_matrix(model: &SingleParticleModel) -> Vec<Vec<f64>> {
    let n = model.n_b() + 1;
    let mut h = vec![vec![0.0; n]; n];
    h[0][0] = model.eps0;
    match &model.geometry {
        None => {}
        Some(BathGeometry::Star(bath)) => {
            for (k, (x, w)) in bath.energies().iter().zip(bath.weights()).enumerate() {
                h[k + 1][k + 1] = *x;
                let v = w.sqrt();
                h[0][k + 1] = v;
                h[k + 1][0] = v;
            }
        }
        Some(BathGeometry::Chain(chain)) => {
            h[0][1] = chain.v_tot();
            h[1][0] = chain.v_tot();
            for (k, a) in chain.alphas().iter().enumerate() {
                h[k + 1][k + 1] = *a;
            }
            for (k, t) in chain.hoppings().iter().enumerate() {
                h[k + 1][k + 2] = *t;
                h[k + 2][k + 1] = *t;
            }
        }
    }
    h
}

/// Spectral decomposition restricted to the system site: eigenvalues E_n and
/// survival weights |⟨ψ0|E_n⟩|² of the unit vector on that site.
#[derive(Debug, Clone)]
pub struct SpEigen {
    energies: Vec<f64>,
    weights: Vec<f64>,
}

impl SpEigen {
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn max_abs_energy(&self) -> f64 {
        self.energies.iter().fold(0.0f64, |a, e| a.max(e.abs()))
    }
}

/// Secular function f(λ) = λ − ε0 − Σ w_n/(λ−x_n) for the arrowhead matrix.
fn secular(eps0: f64, xs: &[f64], ws: &[f64], lambda: f64) -> f64 {
    let mut s = lambda - eps0;
    for (x, w) in xs.iter().zip(ws) {
        s -= w / (lambda - x);
    }
    s
}

/// One arrowhead eigenpair: the root of the secular equation inside the k-th
/// interlacing interval, solved in the gap variable d = λ − x_anchor so that
/// λ − x_n stays accurate even when the root hugs a pole.
fn arrowhead_root(eps0: f64, xs: &[f64], ws: &[f64], k: usize) -> Result<(f64, f64)> {
    let n = xs.len();
    let span = (xs[n - 1] - xs[0]).max(1.0);
    // bracket in λ, then pick the anchor pole by the secular sign at midpoint
    let (lo, hi, anchor) = if k == 0 {
        let mut lo = xs[0] - 0.5 * span;
        while secular(eps0, xs, ws, lo) > 0.0 {
            lo = xs[0] - 2.0 * (xs[0] - lo);
        }
        (lo, xs[0], 0usize)
    } else if k == n {
        let mut hi = xs[n - 1] + 0.5 * span;
        while secular(eps0, xs, ws, hi) < 0.0 {
            hi = xs[n - 1] + 2.0 * (hi - xs[n - 1]);
        }
        (xs[n - 1], hi, n - 1)
    } else {
        let mid = 0.5 * (xs[k - 1] + xs[k]);
        if secular(eps0, xs, ws, mid) > 0.0 {
            (xs[k - 1], mid, k - 1)
        } else {
            (mid, xs[k], k)
        }
    };
    let xa = xs[anchor];
    // gap-variable secular g(d) = f(xa + d); deltas formed as (xa−x_n)+d
    let eval = |d: f64| -> (f64, f64) {
        let mut g = xa + d - eps0;
        let mut dg = 1.0;
        for (x, w) in xs.iter().zip(ws) {
            let delta = (xa - x) + d;
            g -= w / delta;
            dg += w / (delta * delta);
        }
        (g, dg)
    };
    let mut d_lo = lo - xa;
    let mut d_hi = hi - xa;
    let mut d = 0.5 * (d_lo + d_hi);
    for _ in 0..200 {
        let (g, dg) = eval(d);
        if g > 0.0 {
            d_hi = d;
        } else {
            d_lo = d;
        }
        let newton = d - g / dg;
        d = if newton > d_lo && newton < d_hi {
            newton
        } else {
            0.5 * (d_lo + d_hi)
        };
        if (d_hi - d_lo).abs() <= 4.0 * f64::EPSILON * (xa.abs() + d.abs().max(f64::MIN_POSITIVE)) {
            break;
        }
    }
    // weight |⟨ψ0|E⟩|² = 1/(1 + Σ w_n/(λ−x_n)²)
    let mut s = 1.0;
    for (x, w) in xs.iter().zip(ws) {
        let delta = (xa - x) + d;
        s += w / (delta * delta);
    }
    let lambda = xa + d;
    if !lambda.is_finite() || !s.is_finite() {
        return Err(BathError::EigenNonConvergence(n + 1));
    }
    Ok((lambda, 1.0 / s))
}

fn arrowhead_eigen(eps0: f64, xs: &[f64], ws: &[f64]) -> Result<SpEigen> {
    let n = xs.len();
    let pairs: Vec<Result<(f64, f64)>> = (0..=n)
        .into_par_iter()
        .map(|k| arrowhead_root(eps0, xs, ws, k))
        .collect();
    let mut energies = Vec::with_capacity(n + 1);
    let mut weights = Vec::with_capacity(n + 1);
    for p in pairs {
        let (e, w) = p?;
        energies.push(e);
        weights.push(w);
    }
    Ok(SpEigen { energies, weights })
}

/// Diagonalize the model in its native geometry.
pub fn diagonalize(model: &SingleParticleModel) -> Result<SpEigen> {
    match &model.geometry {
        None => Ok(SpEigen {
            energies: vec![model.eps0],
            weights: vec![1.0],
        }),
        Some(BathGeometry::Star(bath)) => arrowhead_eigen(model.eps0, bath.energies(), bath.weights()),
        Some(BathGeometry::Chain(chain)) => {
            let mut diag = Vec::with_capacity(chain.n_b() + 1);
            diag.push(model.eps0);
            diag.extend_from_slice(chain.alphas());
            let mut offdiag = Vec::with_capacity(chain.n_b());
            offdiag.push(chain.v_tot());
            offdiag.extend(chain.hoppings());
            let (energies, weights) = eigen_first_row(&diag, &offdiag)?;
            Ok(SpEigen { energies, weights })
        }
    }
}

/// dt resolving the fastest phase: min(0.01, π/(10·max|E_n|)).
pub fn default_grid(eigen: &SpEigen, t_end: f64) -> TimeGrid {
    let dt = (std::f64::consts::PI / (10.0 * eigen.max_abs_energy().max(1e-12))).min(0.01);
    TimeGrid::spanning(dt, t_end)
}

/// G(t) = −i Σ_n |⟨ψ0|E_n⟩|² e^{−iE_n t} from a spectral decomposition.
pub fn greens_from_eigen(eigen: &SpEigen, grid: &TimeGrid) -> TimeSeries {
    let values: Vec<Complex64> = grid
        .times()
        .par_iter()
        .map(|t| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (e, w) in eigen.energies.iter().zip(&eigen.weights) {
                acc += w * Complex64::new(0.0, -e * t).exp();
            }
            Complex64::new(0.0, -1.0) * acc
        })
        .collect();
    TimeSeries::new(grid.clone(), values)
}

/// System Green's function G(t) with |G(0)| = 1.
pub fn greens_function(model: &SingleParticleModel, grid: &TimeGrid) -> Result<TimeSeries> {
    Ok(greens_from_eigen(&diagonalize(model)?, grid))
}

/// Survival probability P(t) = |iG(t)|² of the initial excitation.
pub fn population(model: &SingleParticleModel, grid: &TimeGrid) -> Result<RealSeries> {
    let g = greens_function(model, grid)?;
    let values: Vec<f64> = g.values().iter().map(|v| v.norm_sqr()).collect();
    Ok(RealSeries::new(grid.clone(), values))
}

/// Filled-Fermi-sea overlap for the noninteracting impurity at half filling:
/// iG(t) = Σ_{E_n ≥ 0} |⟨ψ0|E_n⟩|² e^{−iE_n t} (occupied orbitals E_n < 0
/// Pauli-block the added electron). |iG(0)| ≤ 1.
pub fn filled_sea_overlap(model: &SingleParticleModel, grid: &TimeGrid) -> Result<TimeSeries> {
    let eigen = diagonalize(model)?;
    let values: Vec<Complex64> = grid
        .times()
        .par_iter()
        .map(|t| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (e, w) in eigen.energies.iter().zip(&eigen.weights) {
                if *e >= 0.0 {
                    acc += w * Complex64::new(0.0, -e * t).exp();
                }
            }
            acc
        })
        .collect();
    Ok(TimeSeries::new(grid.clone(), values))
}

/// Pointwise |reference − approx| of complex series.
pub fn error_series(reference: &TimeSeries, approx: &TimeSeries) -> Result<RealSeries> {
    let diff = reference.abs_diff(approx)?;
    Ok(diff)
}

/// Pointwise |reference − approx| of real series.
pub fn error_series_real(reference: &RealSeries, approx: &RealSeries) -> Result<RealSeries> {
    reference.abs_diff(approx)
}

/// Which validity-horizon formula applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TmaxKind {
    /// Bath observables (hybridization): degree-of-exactness 2N_b−1.
    Bath,
    /// System observables: the coupled chain adds one polynomial degree.
    System,
}

/// Predicted validity horizon of an N_b-mode discretization on [a,b]:
/// bath 2(2N_b−1)/(b−a), system 2(2N_b+1)/(b−a).
pub fn tmax_predict(n_b: usize, a: f64, b: f64, kind: TmaxKind) -> f64 {
    assert!(n_b >= 1 && b > a);
    let degree = match kind {
        TmaxKind::Bath => 2.0 * n_b as f64 - 1.0,
        TmaxKind::System => 2.0 * n_b as f64 + 1.0,
    };
    2.0 * degree / (b - a)
}

/// First time the error exceeds `threshold` and stays above it for at least
/// three consecutive samples; +∞ when it never does (single-sample crossings
/// are grid artifacts and are ignored).
pub fn tmax_empirical(err: &RealSeries, threshold: f64) -> f64 {
    assert!(threshold > 0.0);
    let v = err.values();
    for i in 0..v.len().saturating_sub(2) {
        if v[i] > threshold && v[i + 1] > threshold && v[i + 2] > threshold {
            return err.grid().time(i);
        }
    }
    f64::INFINITY
}

/// Chebyshev-expansion remainder envelope |c_n| = (2/(b−a))·|J_n((b−a)t/2)|
/// for the propagator e^{−ixt} on [a,b]: super-exponentially small once
/// n exceeds (b−a)t/2, which is what makes the horizon sharp.
pub fn chebyshev_remainder(n: usize, t: f64, a: f64, b: f64) -> f64 {
    assert!(b > a && t >= 0.0);
    let arg = 0.5 * (b - a) * t;
    2.0 / (b - a) * bessel_jn(n, arg).abs()
}

/// Quasi-continuum reference Green's function: an N_ref-mode linear
/// discretization, certified by sup-norm agreement of its population with the
/// N_ref/2 run to 1e-6.
pub fn reference_solution(
    j: &SpectralDensity,
    eps0: f64,
    grid: &TimeGrid,
    n_ref: usize,
) -> Result<TimeSeries> {
    reference_with(j, eps0, grid, n_ref, greens_function)
}

/// Quasi-continuum filled-sea reference (noninteracting impurity), certified
/// like [`reference_solution`].
pub fn reference_filled_sea(
    j: &SpectralDensity,
    eps0: f64,
    grid: &TimeGrid,
    n_ref: usize,
) -> Result<TimeSeries> {
    reference_with(j, eps0, grid, n_ref, filled_sea_overlap)
}

fn reference_with(
    j: &SpectralDensity,
    eps0: f64,
    grid: &TimeGrid,
    n_ref: usize,
    propagate: fn(&SingleParticleModel, &TimeGrid) -> Result<TimeSeries>,
) -> Result<TimeSeries> {
    if n_ref < 1000 {
        return Err(BathError::InvalidPartition(format!(
            "reference needs at least 1000 modes, got {n_ref}"
        )));
    }
    let full = propagate(&SingleParticleModel::star(eps0, linear_discretize(j, n_ref)?), grid)?;
    let half = propagate(
        &SingleParticleModel::star(eps0, linear_discretize(j, n_ref / 2)?),
        grid,
    )?;
    let defect = full
        .values()
        .iter()
        .zip(half.values())
        .map(|(a, b)| (a.norm_sqr() - b.norm_sqr()).abs())
        .fold(0.0f64, f64::max);
    if defect >= 1e-6 {
        return Err(BathError::ReferenceNotConverged {
            defect,
            tolerance: 1e-6,
        });
    }
    Ok(full)
}
