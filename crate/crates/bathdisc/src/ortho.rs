//! Orthogonal-polynomial machinery: Stieltjes recurrence generation for an
//! arbitrary weight function, Gaussian quadrature via the Jacobi matrix
//! (Golub–Welsch), and the BSDO/Legendre bath discretizations.

use crate::bath::{ChainCoefficients, DiscreteBath};
use crate::error::{BathError, Result};
use crate::precision::{MpFloat, Precision, Real};
use crate::quad::{gauss_legendre, Piece, PieceMap};
use crate::spectral::SpectralDensity;
use crate::tridiag::eigen_first_row;

/// Weight function for recurrence generation: a spectral density or the unit
/// weight on an interval.
#[derive(Debug, Clone, Copy)]
pub enum WeightSpec<'a> {
    Density(&'a SpectralDensity),
    Unit(f64, f64),
}

impl WeightSpec<'_> {
    fn support(&self) -> (f64, f64) {
        match self {
            WeightSpec::Density(j) => j.support(),
            WeightSpec::Unit(a, b) => (*a, *b),
        }
    }

    fn pieces(&self) -> Vec<Piece> {
        match self {
            WeightSpec::Density(j) => j.pieces(),
            WeightSpec::Unit(a, b) => vec![Piece::plain(*a, *b)],
        }
    }

    fn eval_in<T: Real>(&self, x: &T) -> T {
        match self {
            WeightSpec::Density(j) => j.eval_in(x),
            WeightSpec::Unit(..) => T::one(),
        }
    }

    fn tag(&self) -> WeightTag {
        match self {
            WeightSpec::Density(_) => WeightTag::Bsdo,
            WeightSpec::Unit(..) => WeightTag::Unit,
        }
    }
}

/// Which measure the coefficients orthogonalize against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightTag {
    Bsdo,
    Unit,
}

/// Monic three-term recurrence coefficients p_{n+1} = (x − α_n)p_n − β_n p_{n−1},
/// with norm_0 = ∫ w dx.
#[derive(Debug, Clone)]
pub struct RecurrenceCoefficients {
    alphas: Vec<f64>,
    betas: Vec<f64>,
    norm0: f64,
    weight_tag: WeightTag,
    support: (f64, f64),
    used_extended: bool,
}

impl RecurrenceCoefficients {
    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    /// β_1..β_{N−1}.
    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn norm0(&self) -> f64 {
        self.norm0
    }

    pub fn weight_tag(&self) -> WeightTag {
        self.weight_tag
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// True when the coefficients were generated with the extended backend.
    pub fn used_extended(&self) -> bool {
        self.used_extended
    }
}

/// Gaussian quadrature rule for a weight function.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    christoffel_weights: Vec<f64>,
    norm: f64,
}

impl QuadratureRule {
    fn new(nodes: Vec<f64>, christoffel_weights: Vec<f64>, norm: f64) -> Result<Self> {
        if !nodes.windows(2).all(|w| w[0] < w[1]) {
            return Err(BathError::EigenNonConvergence(nodes.len()));
        }
        let mass: f64 = christoffel_weights.iter().sum();
        if (mass - norm).abs() > 1e-12 * norm.abs().max(1e-300) {
            return Err(BathError::QuadratureTolerance {
                requested: 1e-12,
                achieved: (mass - norm).abs() / norm.abs().max(1e-300),
                panels: nodes.len(),
            });
        }
        Ok(QuadratureRule {
            nodes,
            christoffel_weights,
            norm,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn christoffel_weights(&self) -> &[f64] {
        &self.christoffel_weights
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }
}

/// Discrete measure (atoms and masses) approximating ∫·w dx by a composite
/// Gauss–Legendre rule with at least `m_per_piece` nodes on each smooth piece.
fn discrete_measure<T: Real>(w: &WeightSpec, m_per_piece: usize) -> (Vec<T>, Vec<T>) {
    const PANEL: usize = 64;
    let mut xs = Vec::new();
    let mut ms = Vec::new();
    let (gl_nodes, gl_weights) = gauss_legendre::<T>(PANEL);
    for piece in w.pieces() {
        let panels = m_per_piece.div_ceil(PANEL).max(1);
        let width = (piece.hi - piece.lo) / panels as f64;
        // each interior boundary is one shared f64 value, so adjacent panels
        // tile without the ulp-level gaps that would otherwise accumulate
        let bounds: Vec<f64> = (0..=panels)
            .map(|p| match p {
                0 => piece.lo,
                p if p == panels => piece.hi,
                p => piece.lo + p as f64 * width,
            })
            .collect();
        for p in 0..panels {
            let lo = T::from_f64(bounds[p]);
            let hi = T::from_f64(bounds[p + 1]);
            let half = (hi.clone() - lo.clone()) * T::from_f64(0.5);
            let mid = (hi + lo) * T::from_f64(0.5);
            for (xi, wi) in gl_nodes.iter().zip(&gl_weights) {
                let u = mid.clone() + half.clone() * xi.clone();
                let (x, jac) = match piece.map {
                    PieceMap::Identity => (u.clone(), T::one()),
                    PieceMap::Square => (u.clone() * u.clone(), T::from_f64(2.0) * u.clone()),
                };
                let mass = w.eval_in(&x) * jac * wi.clone() * half.clone();
                xs.push(x);
                ms.push(mass);
            }
        }
    }
    (xs, ms)
}

/// Stieltjes recursion over a fixed discrete measure, in orthonormalized form
/// (each polynomial is scaled by its norm, so values stay O(1)).
fn stieltjes_on_measure<T: Real>(xs: &[T], ms: &[T], n: usize) -> Result<(Vec<T>, Vec<T>, T)> {
    let dot = |p: &[T], q: &[T]| -> T {
        p.iter()
            .zip(q)
            .zip(ms)
            .fold(T::zero(), |acc, ((a, b), m)| acc + a.clone() * b.clone() * m.clone())
    };
    let norm0 = ms.iter().fold(T::zero(), |a, b| a + b.clone());
    if !(norm0.to_f64() > 0.0) {
        return Err(BathError::EmptyBath);
    }
    // β below roundoff scale means the measure cannot support another
    // orthogonal polynomial (or orthogonality has collapsed)
    let breakdown_tol = T::epsilon().to_f64().powf(1.5);
    let mut scale = xs.iter().fold(0.0f64, |a, x| a.max(x.to_f64().powi(2)));
    let inv_sqrt = T::one() / norm0.sqrt();
    let mut cur: Vec<T> = vec![inv_sqrt; xs.len()];
    let mut prev: Vec<T> = vec![T::zero(); xs.len()];
    let xcur = |cur: &[T]| -> Vec<T> { xs.iter().zip(cur).map(|(x, c)| x.clone() * c.clone()).collect() };
    let mut alphas = Vec::with_capacity(n);
    let mut betas = Vec::with_capacity(n.saturating_sub(1));
    alphas.push(dot(&xcur(&cur), &cur));
    let mut sqrt_beta_prev = T::zero();
    for k in 1..n {
        // r = (x − α_{k−1})·q_{k−1} − √β_{k−1}·q_{k−2}
        let alpha_prev = alphas[k - 1].clone();
        let r: Vec<T> = xs
            .iter()
            .zip(&cur)
            .zip(&prev)
            .map(|((x, c), p)| {
                (x.clone() - alpha_prev.clone()) * c.clone() - sqrt_beta_prev.clone() * p.clone()
            })
            .collect();
        let beta = dot(&r, &r);
        if !(beta.to_f64() > breakdown_tol * scale) || !beta.is_finite() {
            return Err(BathError::RecurrenceInstability {
                order: k,
                beta: beta.to_f64(),
            });
        }
        scale = scale.max(beta.to_f64());
        let sb = beta.sqrt();
        let next: Vec<T> = r.into_iter().map(|v| v / sb.clone()).collect();
        alphas.push(dot(&xcur(&next), &next));
        betas.push(beta);
        sqrt_beta_prev = sb;
        prev = cur;
        cur = next;
    }
    Ok((alphas, betas, norm0))
}

/// Relative coefficient change between two Stieltjes runs.
fn coeff_change<T: Real>(a: &(Vec<T>, Vec<T>, T), b: &(Vec<T>, Vec<T>, T)) -> f64 {
    let mut change = ((a.2.clone() - b.2.clone()).abs().to_f64())
        / (1.0 + a.2.to_f64().abs());
    for (x, y) in a.0.iter().zip(&b.0).chain(a.1.iter().zip(&b.1)) {
        let d = (x.clone() - y.clone()).abs().to_f64() / (1.0 + x.to_f64().abs());
        change = change.max(d);
    }
    change
}

/// Stieltjes coefficients of the first `n` orthogonal polynomials of the
/// weight, computed on grids doubled until the coefficients stop moving.
fn stieltjes_in<T: Real>(w: &WeightSpec, n: usize, change_tol: f64) -> Result<(Vec<T>, Vec<T>, T)> {
    let mut m = (4 * n).max(64);
    let (xs, ms) = discrete_measure::<T>(w, m);
    let mut prev = stieltjes_on_measure(&xs, &ms, n)?;
    let mut last_change = f64::INFINITY;
    for _ in 0..8 {
        m *= 2;
        let (xs, ms) = discrete_measure::<T>(w, m);
        let cur = stieltjes_on_measure(&xs, &ms, n)?;
        last_change = coeff_change(&prev, &cur);
        if last_change < change_tol {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(BathError::QuadratureTolerance {
        requested: change_tol,
        achieved: last_change,
        panels: m,
    })
}

/// Recurrence coefficients α_0..α_{N−1}, β_1..β_{N−1} for the weight.
/// Extended precision is enforced automatically for N > 40.
pub fn stieltjes_recurrence(w: &WeightSpec, n: usize, precision: Precision) -> Result<RecurrenceCoefficients> {
    stieltjes_recurrence_with_threshold(w, n, precision, None)
}

/// As [`stieltjes_recurrence`] but with a configurable auto-extension threshold.
pub fn stieltjes_recurrence_with_threshold(
    w: &WeightSpec,
    n: usize,
    precision: Precision,
    threshold: Option<usize>,
) -> Result<RecurrenceCoefficients> {
    if n == 0 {
        return Err(BathError::EmptyBath);
    }
    let effective = precision.effective(n, threshold);
    let (alphas, betas, norm0, used_extended) = match effective {
        Precision::Double => {
            // the doubling check cannot resolve changes near the f64 roundoff
            let (a, b, g) = stieltjes_in::<f64>(w, n, 5e-13)?;
            (a, b, g, false)
        }
        Precision::Extended => {
            let (a, b, g) = stieltjes_in::<MpFloat>(w, n, 1e-16)?;
            (
                a.iter().map(Real::to_f64).collect(),
                b.iter().map(Real::to_f64).collect(),
                g.to_f64(),
                true,
            )
        }
    };
    Ok(RecurrenceCoefficients {
        alphas,
        betas,
        norm0,
        weight_tag: w.tag(),
        support: w.support(),
        used_extended,
    })
}

/// Gaussian nodes and Christoffel weights from the Jacobi matrix: nodes are
/// its eigenvalues, weights are norm_0 times the squared first components of
/// the orthonormal eigenvectors.
pub fn golub_welsch(rc: &RecurrenceCoefficients) -> Result<QuadratureRule> {
    let offdiag: Vec<f64> = rc.betas.iter().map(|b| b.sqrt()).collect();
    let (nodes, first_sq) = eigen_first_row(&rc.alphas, &offdiag)?;
    let weights: Vec<f64> = first_sq.iter().map(|c| rc.norm0 * c).collect();
    QuadratureRule::new(nodes, weights, rc.norm0)
}

/// Full generic pipeline: recurrence + Jacobi diagonalization in the backend
/// `T`, returning double-precision nodes and weights.
fn gauss_rule_in<T: Real>(w: &WeightSpec, n: usize, change_tol: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let (alphas, betas, norm0) = stieltjes_in::<T>(w, n, change_tol)?;
    let offdiag: Vec<T> = betas.iter().map(|b| b.sqrt()).collect();
    let (nodes, first_sq) = eigen_first_row(&alphas, &offdiag)?;
    Ok((
        nodes.iter().map(Real::to_f64).collect(),
        first_sq
            .iter()
            .map(|c| (norm0.clone() * c.clone()).to_f64())
            .collect(),
    ))
}

/// Bath-spectral-density-orthogonal discretization: energies are the Gauss
/// nodes of the measure J(x)dx, weights its Christoffel weights.
pub fn bsdo_discretize(j: &SpectralDensity, n_b: usize, precision: Precision) -> Result<DiscreteBath> {
    if n_b == 0 {
        return Err(BathError::EmptyBath);
    }
    let w = WeightSpec::Density(j);
    let (nodes, weights) = match precision.effective(n_b, None) {
        Precision::Double => gauss_rule_in::<f64>(&w, n_b, 5e-13)?,
        Precision::Extended => gauss_rule_in::<MpFloat>(&w, n_b, 1e-16)?,
    };
    DiscreteBath::new(nodes, weights, "bsdo", j.support())
}

/// Gauss–Legendre discretization: unit-weight nodes on [a,b], weights
/// W_n·J(x_n). Nodes where J vanishes are dropped.
pub fn legendre_discretize(j: &SpectralDensity, n_b: usize) -> Result<DiscreteBath> {
    if n_b == 0 {
        return Err(BathError::EmptyBath);
    }
    let (a, b) = j.support();
    let (xi, wi) = gauss_legendre::<f64>(n_b);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let nodes: Vec<f64> = xi.iter().map(|x| mid + half * x).collect();
    let weights: Vec<f64> = nodes.iter().zip(&wi).map(|(x, w)| half * w * j.eval(*x)).collect();
    DiscreteBath::new(nodes, weights, "legendre", (a, b))
}

/// Chain coefficients of the continuous measure: V_tot = √∫J, on-site and
/// hopping coefficients from the Stieltjes recurrence of w = J.
pub fn chain_from_weight(j: &SpectralDensity, n_b: usize, precision: Precision) -> Result<ChainCoefficients> {
    let rc = stieltjes_recurrence(&WeightSpec::Density(j), n_b, precision)?;
    ChainCoefficients::new(rc.norm0.sqrt(), rc.alphas, rc.betas)
}
