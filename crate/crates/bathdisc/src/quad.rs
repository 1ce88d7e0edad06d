//! Adaptive composite Gauss–Legendre quadrature.
//!
//! All continuous integrals in the crate go through this engine: composite
//! 32-point Gauss–Legendre panels, bisected until the inter-refinement change
//! of each panel drops below its share of the tolerance. Oscillatory
//! integrands (Fourier transforms at time t) cap the initial panel width at
//! pi/(4|t|) so no panel sees more than an eighth of a period.

use crate::error::{BathError, Result};
use crate::precision::Real;
use num_complex::Complex64;
use std::sync::OnceLock;

/// Panel order of the composite rule.
pub const PANEL_ORDER: usize = 32;

/// Hard cap on the number of accepted panels before giving up.
const PANEL_BUDGET: usize = 1 << 20;

/// Nodes and weights of an n-point Gauss–Legendre rule on [-1, 1].
///
/// Newton iteration on the Legendre recurrence; seeds from the Chebyshev-angle
/// approximation. Generic so the extended backend gets nodes accurate to its
/// own precision (seeded from a converged double iteration, then polished).
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1);
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for k in 0..n {
        // double-precision seed
        let mut x = seed_f64(n, k);
        for _ in 0..60 {
            let (p, dp) = legendre_pair(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        // polish in the target type: each step doubles the correct digits
        let mut xt = T::from_f64(x);
        for _ in 0..6 {
            let (p, dp) = legendre_pair_t(n, &xt);
            xt = xt - p / dp.clone();
        }
        let (_, dp) = legendre_pair_t(n, &xt);
        let one = T::one();
        let two = T::from_f64(2.0);
        let w = two / ((one.clone() - xt.clone() * xt.clone()) * dp.clone() * dp);
        nodes.push(xt);
        weights.push(w);
    }
    (nodes, weights)
}

fn seed_f64(n: usize, k: usize) -> f64 {
    let nf = n as f64;
    let theta = std::f64::consts::PI * (k as f64 + 0.75) / (nf + 0.5);
    -theta.cos()
}

/// (P_n(x), P_n'(x)) in double precision.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let dp = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn legendre_pair_t<T: Real>(n: usize, x: &T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x.clone();
    if n == 0 {
        return (T::one(), T::zero());
    }
    for k in 1..n {
        let kf = T::from_f64(k as f64);
        let k1 = T::from_f64((k + 1) as f64);
        let two_k1 = T::from_f64(2.0 * k as f64 + 1.0);
        let p2 = (two_k1 * x.clone() * p1.clone() - kf * p0.clone()) / k1;
        p0 = p1;
        p1 = p2;
    }
    let nf = T::from_f64(n as f64);
    let dp = nf * (x.clone() * p1.clone() - p0) / (x.clone() * x.clone() - T::one());
    (p1, dp)
}

fn rule32() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre::<f64>(PANEL_ORDER))
}

/// One 32-point panel of a complex-valued integrand on [lo, hi].
fn panel<F: Fn(f64) -> Complex64>(f: &F, lo: f64, hi: f64) -> Complex64 {
    let (xs, ws) = rule32();
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in xs.iter().zip(ws) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// A maximal smooth sub-interval of the integration domain.
///
/// `Square` maps the panel variable u to x = u^2 (Jacobian 2u), which removes
/// the x^s endpoint kink of Caldeira–Leggett-type densities at x = 0.
#[derive(Debug, Clone, Copy)]
pub enum PieceMap {
    Identity,
    Square,
}

#[derive(Debug, Clone, Copy)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub map: PieceMap,
}

impl Piece {
    pub fn plain(lo: f64, hi: f64) -> Self {
        Piece {
            lo,
            hi,
            map: PieceMap::Identity,
        }
    }

    /// The x-interval this piece covers.
    pub fn x_range(&self) -> (f64, f64) {
        match self.map {
            PieceMap::Identity => (self.lo, self.hi),
            PieceMap::Square => (self.lo * self.lo, self.hi * self.hi),
        }
    }

    /// Restrict the piece to x ∈ [x_lo, x_hi]; None when disjoint. Square
    /// pieces must have nonnegative endpoints (u ≥ 0 branch).
    pub fn clip(&self, x_lo: f64, x_hi: f64) -> Option<Piece> {
        let (a, b) = self.x_range();
        let lo = a.max(x_lo);
        let hi = b.min(x_hi);
        if !(lo < hi) {
            return None;
        }
        Some(match self.map {
            PieceMap::Identity => Piece::plain(lo, hi),
            PieceMap::Square => Piece {
                lo: lo.sqrt(),
                hi: hi.sqrt(),
                map: PieceMap::Square,
            },
        })
    }
}

/// Clip a list of pieces to x ∈ [x_lo, x_hi].
pub fn clip_pieces(pieces: &[Piece], x_lo: f64, x_hi: f64) -> Vec<Piece> {
    pieces.iter().filter_map(|p| p.clip(x_lo, x_hi)).collect()
}

/// Adaptive integral of a complex integrand over a piecewise-smooth domain.
///
/// `max_width` caps the initial panel width in the *mapped* variable (used for
/// oscillatory integrands); `tol` is absolute. Returns the value and an error
/// estimate (sum of final inter-refinement changes).
pub fn integrate_complex<F>(
    f: F,
    pieces: &[Piece],
    tol: f64,
    max_width: Option<f64>,
) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Complex64,
{
    let mut total = Complex64::new(0.0, 0.0);
    let mut err_est = 0.0;
    // accumulated change of panels force-accepted at the depth cap: nonzero
    // defect means the bisection could not localize the difficulty
    let mut defect = 0.0;
    let mut panels_used = 0usize;
    for piece in pieces {
        let g = |u: f64| -> Complex64 {
            match piece.map {
                PieceMap::Identity => f(u),
                PieceMap::Square => f(u * u) * (2.0 * u),
            }
        };
        // initial split honoring the oscillation cap
        let width = piece.hi - piece.lo;
        let nseg = match max_width {
            Some(w) if w > 0.0 && width > w => (width / w).ceil() as usize,
            _ => 1,
        };
        let seg = width / nseg as f64;
        // worklist of (lo, hi, coarse_value, depth)
        let mut stack: Vec<(f64, f64, Complex64, u32)> = Vec::new();
        for i in 0..nseg {
            let lo = piece.lo + i as f64 * seg;
            let hi = if i + 1 == nseg {
                piece.hi
            } else {
                piece.lo + (i + 1) as f64 * seg
            };
            stack.push((lo, hi, panel(&g, lo, hi), 0));
        }
        let piece_tol = tol / pieces.len() as f64;
        while let Some((lo, hi, coarse, depth)) = stack.pop() {
            let mid = 0.5 * (lo + hi);
            let left = panel(&g, lo, mid);
            let right = panel(&g, mid, hi);
            let fine = left + right;
            let change = (fine - coarse).norm();
            panels_used += 2;
            if panels_used > PANEL_BUDGET {
                return Err(BathError::QuadratureTolerance {
                    requested: tol,
                    achieved: change,
                    panels: panels_used,
                });
            }
            // accept when the refinement changed less than this panel's share
            let share = piece_tol * (hi - lo) / width;
            if change <= share.max(1e-300) {
                total += fine;
                err_est += change;
            } else if depth >= 48 || mid <= lo || mid >= hi {
                // cannot split further: accept but record the unmet share
                total += fine;
                err_est += change;
                defect += change;
            } else {
                stack.push((lo, mid, left, depth + 1));
                stack.push((mid, hi, right, depth + 1));
            }
        }
    }
    if defect > tol {
        return Err(BathError::QuadratureTolerance {
            requested: tol,
            achieved: err_est,
            panels: panels_used,
        });
    }
    Ok((total, err_est))
}

/// Adaptive integral of a real integrand.
pub fn integrate_real<F>(f: F, pieces: &[Piece], tol: f64, max_width: Option<f64>) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let (v, e) = integrate_complex(|x| Complex64::new(f(x), 0.0), pieces, tol, max_width)?;
    Ok((v.re, e))
}

/// Relative-tolerance driver: picks an absolute target from a one-pass
/// magnitude estimate, then integrates adaptively.
pub fn integrate_real_rel<F>(f: F, pieces: &[Piece], rel_tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64 + Copy,
{
    let mut scale = 0.0;
    for piece in pieces {
        let g = |u: f64| -> Complex64 {
            match piece.map {
                PieceMap::Identity => Complex64::new(f(u), 0.0),
                PieceMap::Square => Complex64::new(f(u * u) * 2.0 * u, 0.0),
            }
        };
        scale += panel(&g, piece.lo, piece.hi).re.abs();
    }
    let tol = (rel_tol * scale.max(1e-300)).max(1e-300);
    integrate_real(f, pieces, tol, None)
}
