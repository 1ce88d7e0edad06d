//! Continuous bath spectral densities J(x) and their integral transforms.
//!
//! The hybridization function Λ(z) = ∫ J(x)/(z−x) dx, its Fourier transform
//! Λ(t) = ∫ J(x) e^{−ixt} dx, the Sokhotski–Plemelj broadened density, and the
//! retarded system Green's function on the real axis.

use crate::error::{BathError, Result};
use crate::precision::Real;
use crate::quad::{integrate_complex, integrate_real, Piece, PieceMap};
use crate::series::{TimeGrid, TimeSeries};
use num_complex::Complex64;
use rayon::prelude::*;

/// Parametric family of a spectral density.
#[derive(Debug, Clone)]
pub enum Family {
    /// α · x^s · ω_c^{1−s} · e^{−x/ω_c} on (0, ω_max], zero elsewhere.
    CaldeiraLeggett {
        alpha: f64,
        s: f64,
        omega_c: f64,
        omega_max: f64,
    },
    /// Σ_c exp(−(x−c)²/(2η²)) over the given centers, restricted to the support.
    GaussianMix {
        centers: Vec<f64>,
        eta: f64,
        support: (f64, f64),
    },
    /// Constant height on the support.
    Flat { height: f64, support: (f64, f64) },
    /// Piecewise-linear interpolation of (grid, values).
    Tabulated { grid: Vec<f64>, values: Vec<f64> },
}

/// A continuous, nonnegative spectral density with finite support [a, b].
#[derive(Debug, Clone)]
pub struct SpectralDensity {
    family: Family,
}

/// Sign convention for the hybridization term in the system Green's function.
///
/// The printed form uses `+Λ(x)`; the common literature convention is `−Λ(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HybridizationSign {
    #[default]
    Plus,
    Minus,
}

impl SpectralDensity {
    pub fn caldeira_leggett(alpha: f64, s: f64, omega_c: f64, omega_max: f64) -> Result<Self> {
        if !(alpha >= 0.0) {
            return Err(BathError::InvalidDensity(format!("alpha = {alpha} must be >= 0")));
        }
        if !(s > 0.0) {
            return Err(BathError::InvalidDensity(format!("s = {s} must be > 0")));
        }
        if !(omega_c > 0.0) || !(omega_max > 0.0) {
            return Err(BathError::InvalidDensity(
                "omega_c and omega_max must be positive".into(),
            ));
        }
        Ok(SpectralDensity {
            family: Family::CaldeiraLeggett {
                alpha,
                s,
                omega_c,
                omega_max,
            },
        })
    }

    pub fn gaussian_mix(centers: Vec<f64>, eta: f64, support: (f64, f64)) -> Result<Self> {
        if !(eta > 0.0) {
            return Err(BathError::InvalidDensity(format!("eta = {eta} must be > 0")));
        }
        if !(support.0 < support.1) || !support.0.is_finite() || !support.1.is_finite() {
            return Err(BathError::InvalidDensity("support must be a finite interval".into()));
        }
        if centers.is_empty() {
            return Err(BathError::InvalidDensity("centers must be nonempty".into()));
        }
        Ok(SpectralDensity {
            family: Family::GaussianMix { centers, eta, support },
        })
    }

    /// The triple-Gaussian benchmark density: peaks at −4, 0, 4 on [−5, 5].
    pub fn triple_gaussian(eta: f64) -> Result<Self> {
        Self::gaussian_mix(vec![-4.0, 0.0, 4.0], eta, (-5.0, 5.0))
    }

    pub fn flat(height: f64, support: (f64, f64)) -> Result<Self> {
        if !(height >= 0.0) {
            return Err(BathError::InvalidDensity(format!("height = {height} must be >= 0")));
        }
        if !(support.0 < support.1) || !support.0.is_finite() || !support.1.is_finite() {
            return Err(BathError::InvalidDensity("support must be a finite interval".into()));
        }
        Ok(SpectralDensity {
            family: Family::Flat { height, support },
        })
    }

    pub fn tabulated(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() < 2 || grid.len() != values.len() {
            return Err(BathError::InvalidDensity(
                "tabulated density needs >= 2 grid points and matching value count".into(),
            ));
        }
        if !grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(BathError::InvalidDensity("tabulated grid must be strictly increasing".into()));
        }
        if values.iter().any(|v| !(*v >= 0.0)) {
            return Err(BathError::InvalidDensity("tabulated values must be nonnegative".into()));
        }
        Ok(SpectralDensity {
            family: Family::Tabulated { grid, values },
        })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Support interval [a, b].
    pub fn support(&self) -> (f64, f64) {
        match &self.family {
            Family::CaldeiraLeggett { omega_max, .. } => (0.0, *omega_max),
            Family::GaussianMix { support, .. } => *support,
            Family::Flat { support, .. } => *support,
            Family::Tabulated { grid, .. } => (grid[0], *grid.last().unwrap()),
        }
    }

    /// Mass of the truncated exponential tail beyond ω_max (Caldeira–Leggett
    /// only): reported so callers can judge the hard-cutoff error.
    pub fn truncated_tail_mass(&self) -> f64 {
        match &self.family {
            Family::CaldeiraLeggett {
                alpha,
                s,
                omega_c,
                omega_max,
            } => {
                // ∫_{ωmax}^∞ α x^s ωc^{1−s} e^{−x/ωc} dx by rapidly converging
                // panel sums (integrand decays like e^{−x/ωc})
                let mut mass = 0.0;
                let mut lo = *omega_max;
                let step = 4.0 * omega_c;
                for _ in 0..64 {
                    let hi = lo + step;
                    let (v, _) = integrate_real(
                        |x| alpha * x.powf(*s) * omega_c.powf(1.0 - s) * (-x / omega_c).exp(),
                        &[Piece::plain(lo, hi)],
                        1e-14,
                        None,
                    )
                    .unwrap_or((0.0, 0.0));
                    mass += v;
                    if v < 1e-16 * mass.max(1e-300) {
                        break;
                    }
                    lo = hi;
                }
                mass
            }
            _ => 0.0,
        }
    }

    /// J(x); zero outside the support.
    pub fn eval(&self, x: f64) -> f64 {
        self.eval_in::<f64>(&x)
    }

    /// J(x) in the generic precision backend (recurrence generation needs the
    /// weight function at extended accuracy).
    pub fn eval_in<T: Real>(&self, x: &T) -> T {
        let xf = x.to_f64();
        let (a, b) = self.support();
        match &self.family {
            Family::CaldeiraLeggett {
                alpha,
                s,
                omega_c,
                omega_max,
            } => {
                if xf <= 0.0 || xf > *omega_max {
                    return T::zero();
                }
                let wc = T::from_f64(*omega_c);
                T::from_f64(*alpha)
                    * x.powf(*s)
                    * wc.powf(1.0 - s)
                    * (-(x.clone() / T::from_f64(*omega_c))).exp()
            }
            Family::GaussianMix { centers, eta, .. } => {
                if xf < a || xf > b {
                    return T::zero();
                }
                let two_eta2 = T::from_f64(2.0 * eta * eta);
                let mut acc = T::zero();
                for c in centers {
                    let d = x.clone() - T::from_f64(*c);
                    acc = acc + (-(d.clone() * d / two_eta2.clone())).exp();
                }
                acc
            }
            Family::Flat { height, .. } => {
                if xf < a || xf > b {
                    T::zero()
                } else {
                    T::from_f64(*height)
                }
            }
            Family::Tabulated { grid, values } => {
                if xf < a || xf > b {
                    return T::zero();
                }
                let idx = match grid.binary_search_by(|g| g.partial_cmp(&xf).unwrap()) {
                    Ok(i) => i.min(grid.len() - 2),
                    Err(i) => i.saturating_sub(1).min(grid.len() - 2),
                };
                let (x0, x1) = (grid[idx], grid[idx + 1]);
                let (y0, y1) = (values[idx], values[idx + 1]);
                let t = (x.clone() - T::from_f64(x0)) / T::from_f64(x1 - x0);
                T::from_f64(y0) + t * T::from_f64(y1 - y0)
            }
        }
    }

    /// Piecewise-smooth decomposition of the support for quadrature. The
    /// Caldeira–Leggett x^s endpoint kink is removed by the u² map.
    pub fn pieces(&self) -> Vec<Piece> {
        match &self.family {
            Family::CaldeiraLeggett {
                omega_c, omega_max, ..
            } => {
                let split = omega_c.min(*omega_max);
                let mut ps = vec![Piece {
                    lo: 0.0,
                    hi: split.sqrt(),
                    map: PieceMap::Square,
                }];
                if split < *omega_max {
                    ps.push(Piece::plain(split, *omega_max));
                }
                ps
            }
            Family::GaussianMix { centers, support, .. } => {
                let mut cuts: Vec<f64> = vec![support.0];
                let mut inner: Vec<f64> = centers
                    .iter()
                    .copied()
                    .filter(|c| *c > support.0 && *c < support.1)
                    .collect();
                inner.sort_by(|a, b| a.partial_cmp(b).unwrap());
                cuts.extend(inner);
                cuts.push(support.1);
                cuts.dedup();
                cuts.windows(2).map(|w| Piece::plain(w[0], w[1])).collect()
            }
            Family::Flat { support, .. } => vec![Piece::plain(support.0, support.1)],
            Family::Tabulated { grid, .. } => {
                grid.windows(2).map(|w| Piece::plain(w[0], w[1])).collect()
            }
        }
    }
}

/// |V_tot|² = ∫ J(x) dx to 1e-12 relative tolerance.
pub fn total_weight(j: &SpectralDensity) -> Result<f64> {
    let pieces = j.pieces();
    let mut scale = 0.0;
    for p in &pieces {
        let (v, _) = integrate_real(|x| j.eval(x), std::slice::from_ref(p), 1e-6, None)?;
        scale += v.abs();
    }
    let tol = (1e-12 * scale).max(1e-300);
    let (v, _) = integrate_real(|x| j.eval(x), &pieces, tol, None)?;
    Ok(v)
}

/// Λ(z) = ∫ J(x)/(z−x) dx to 1e-10 relative tolerance. Real z strictly inside
/// the support is a singular evaluation and is rejected.
pub fn hybridization(j: &SpectralDensity, z: Complex64) -> Result<Complex64> {
    let (a, b) = j.support();
    if z.im == 0.0 && z.re >= a && z.re <= b {
        return Err(BathError::OnSupportSingularity);
    }
    let pieces = j.pieces();
    let f = |x: f64| j.eval(x) / (z - x);
    let mut scale = 0.0;
    for p in &pieces {
        let (v, _) = integrate_complex(f, std::slice::from_ref(p), 1e-5, None)?;
        scale += v.norm();
    }
    let tol = (1e-10 * scale).max(1e-300);
    let (v, _) = integrate_complex(f, &pieces, tol, None)?;
    Ok(v)
}

/// −(1/π) Im Λ(x + iη): the Lorentzian-broadened density.
pub fn broadened_density(j: &SpectralDensity, x: f64, eta: f64) -> Result<f64> {
    assert!(eta > 0.0, "broadening eta must be positive");
    let lam = hybridization(j, Complex64::new(x, eta))?;
    Ok(-lam.im / std::f64::consts::PI)
}

/// Oscillation-aware panel cap for phase x·t on a piece, in the piece's own
/// integration variable (chain rule through the u² map).
fn osc_cap(piece: &Piece, t: f64) -> Option<f64> {
    if t == 0.0 {
        return None;
    }
    let base = std::f64::consts::PI / (4.0 * t.abs());
    match piece.map {
        PieceMap::Identity => Some(base),
        PieceMap::Square => {
            let umax = piece.lo.abs().max(piece.hi.abs()).max(1e-30);
            Some(base / (2.0 * umax))
        }
    }
}

/// Λ(t) = ∫ J(x) e^{−ixt} dx on a uniform time grid.
pub fn lambda_time(j: &SpectralDensity, grid: &TimeGrid) -> Result<TimeSeries> {
    let w_tot = total_weight(j)?;
    let pieces = j.pieces();
    let tol = (1e-11 * w_tot.abs()).max(1e-300);
    let values: Result<Vec<Complex64>> = grid
        .times()
        .par_iter()
        .map(|&t| {
            let mut acc = Complex64::new(0.0, 0.0);
            for p in &pieces {
                let f = |x: f64| j.eval(x) * Complex64::new(0.0, -x * t).exp();
                let (v, _) =
                    integrate_complex(f, std::slice::from_ref(p), tol / pieces.len() as f64, osc_cap(p, t))?;
                acc += v;
            }
            Ok(acc)
        })
        .collect();
    Ok(TimeSeries::new(grid.clone(), values?))
}

/// Retarded system Green's function on the real axis:
/// 1/(x + iη − ε0 + σ·Λ(x+iη)).
pub fn system_greens_real_axis(
    j: &SpectralDensity,
    eps0: f64,
    x: f64,
    eta: f64,
    sign: HybridizationSign,
) -> Result<Complex64> {
    assert!(eta > 0.0, "eta must be positive");
    let lam = hybridization(j, Complex64::new(x, eta))?;
    let s = match sign {
        HybridizationSign::Plus => 1.0,
        HybridizationSign::Minus => -1.0,
    };
    let den = Complex64::new(x - eps0, eta) + s * lam;
    if den.norm() < 1e-300 {
        return Err(BathError::PoleEncountered(den.norm()));
    }
    Ok(1.0 / den)
}
