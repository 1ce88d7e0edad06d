//! Desk-scale exact dynamics of the interacting single-impurity Anderson
//! model.
//!
//! The impurity hybridizes identically with each spin species of a discrete
//! bath, written at the particle-hole-symmetric chemical potential (mu = -U/2
//! absorbed into the interaction term):
//!
//! H = U (n_d_up - 1/2)(n_d_dn - 1/2) + sum_{k,s} x_k n_{k,s}
//!     + sum_{k,s} sqrt(w_k) (d_s^dag c_{k,s} + c_{k,s}^dag d_s).
//!
//! Fermions are mapped to bits by a Jordan-Wigner string over spin-orbitals
//! ordered impurity-up, impurity-down, then bath modes ascending in energy and
//! interleaved by spin; orbital j of a state word is the bit at position
//! 2L-1-j. Both spin populations (N_up, N_dn) are conserved, so Hamiltonians
//! are assembled sector by sector and a propagated state can never leak out of
//! its sector by construction.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bath::DiscreteBath;
use crate::error::{BathError, Result};
use crate::series::{TimeGrid, TimeSeries};
use crate::tridiag::eigen_tridiag;

/// Hard cap on interacting bath sizes; beyond this the Fock dimension is not
/// a desk-scale object no matter the sector.
const BATH_CAP: usize = 12;
/// Default limit on a single sector's dimension. The ground-state solver keeps
/// a full Krylov basis, so memory scales as ~240 x dim x 8 bytes.
const DEFAULT_SECTOR_BUDGET: usize = 2_000_000;
/// Two sector energies closer than this are treated as one degenerate level.
const DEGENERACY_GAP: f64 = 1e-10;
/// Target residual for the ground-state eigenpair.
const GS_RESIDUAL_TOL: f64 = 1e-11;
/// Local (per-step) error target of the Krylov propagator.
const KRYLOV_TOL: f64 = 1e-10;
/// Largest Krylov dimension tried before a step is subdivided.
const KRYLOV_MAX: usize = 48;

/// Occupation-number basis of one (N_up, N_dn) sector, as sorted bit words.
#[derive(Debug, Clone)]
pub struct FockBasis {
    sites: usize,
    n_up: usize,
    n_dn: usize,
    states: Vec<u32>,
}

/// All `sites`-bit masks with exactly `n` bits set, ascending.
fn spin_masks(sites: usize, n: usize) -> Vec<u32> {
    (0u32..1 << sites)
        .filter(|m| m.count_ones() as usize == n)
        .collect()
}

/// Place bit b of a per-site mask at bit 2b of the output.
fn spread(mask: u32) -> u32 {
    let mut out = 0;
    let mut m = mask;
    while m != 0 {
        let b = m.trailing_zeros();
        out |= 1 << (2 * b);
        m &= m - 1;
    }
    out
}

impl FockBasis {
    /// Enumerate the sector. Site 0 is the impurity; site k+1 is bath mode k.
    pub fn new(sites: usize, n_up: usize, n_dn: usize) -> Self {
        assert!(sites >= 1 && sites <= 16, "site count out of range");
        assert!(n_up <= sites && n_dn <= sites, "spin count exceeds sites");
        let ups = spin_masks(sites, n_up);
        let dns = spin_masks(sites, n_dn);
        let mut states = Vec::with_capacity(ups.len() * dns.len());
        for &u in &ups {
            for &d in &dns {
                states.push((spread(u) << 1) | spread(d));
            }
        }
        states.sort_unstable();
        FockBasis { sites, n_up, n_dn, states }
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn sector(&self) -> (usize, usize) {
        (self.n_up, self.n_dn)
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[u32] {
        &self.states
    }

    fn index_of(&self, state: u32) -> Option<usize> {
        self.states.binary_search(&state).ok()
    }

    /// Bit mask of spin-orbital j (0 = impurity-up, 1 = impurity-down,
    /// 2k+2 / 2k+3 = bath mode k up / down).
    fn orbital_mask(&self, j: usize) -> u32 {
        1 << (2 * self.sites - 1 - j)
    }

    /// Parity of the occupied orbitals strictly between i and j (i < j).
    fn string_sign(&self, state: u32, i: usize, j: usize) -> f64 {
        let span = j - i - 1;
        if span == 0 {
            return 1.0;
        }
        let mask = ((1u32 << span) - 1) << (2 * self.sites - j);
        if (state & mask).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// C(n, k) without overflow at the site counts admitted here.
fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Interacting impurity Hamiltonian. Held as bath parameters; per-sector
/// sparse matrices are assembled on demand.
#[derive(Debug, Clone)]
pub struct SparseHamiltonian {
    u: f64,
    energies: Vec<f64>,
    couplings: Vec<f64>,
    sector_budget: usize,
}

/// Star-geometry interacting Hamiltonian from a discretized bath.
pub fn build_siam(u: f64, bath: &DiscreteBath) -> Result<SparseHamiltonian> {
    SparseHamiltonian::from_modes(u, bath.energies(), bath.weights())
}

impl SparseHamiltonian {
    /// Bath modes given directly as (energy, weight) arrays; weights enter as
    /// hybridization amplitudes sqrt(w). An empty bath is the atomic limit.
    pub fn from_modes(u: f64, energies: &[f64], weights: &[f64]) -> Result<Self> {
        if energies.len() != weights.len() {
            return Err(BathError::Parse(format!(
                "bath has {} energies but {} weights",
                energies.len(),
                weights.len()
            )));
        }
        if energies.len() > BATH_CAP {
            return Err(BathError::InvalidPartition(format!(
                "bath has {} modes; the interacting solver is capped at {BATH_CAP}",
                energies.len()
            )));
        }
        if !u.is_finite() {
            return Err(BathError::Parse(format!("interaction U = {u} is not finite")));
        }
        let mut modes: Vec<(f64, f64)> = Vec::with_capacity(energies.len());
        for (&x, &w) in energies.iter().zip(weights) {
            if !x.is_finite() || !w.is_finite() || w < 0.0 {
                return Err(BathError::Parse(format!("invalid bath mode ({x}, {w})")));
            }
            modes.push((x, w));
        }
        modes.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
        Ok(SparseHamiltonian {
            u,
            energies: modes.iter().map(|m| m.0).collect(),
            couplings: modes.iter().map(|m| m.1.sqrt()).collect(),
            sector_budget: DEFAULT_SECTOR_BUDGET,
        })
    }

    /// Replace the per-sector dimension budget (memory guard).
    pub fn with_sector_budget(mut self, budget: usize) -> Self {
        self.sector_budget = budget;
        self
    }

    /// Orbital pairs per spin: impurity plus bath.
    pub fn sites(&self) -> usize {
        1 + self.energies.len()
    }

    pub fn interaction(&self) -> f64 {
        self.u
    }

    pub fn bath_energies(&self) -> &[f64] {
        &self.energies
    }

    fn sector_matrix(&self, n_up: usize, n_dn: usize) -> Result<SectorMatrix> {
        let l = self.sites();
        if n_up > l || n_dn > l {
            return Err(BathError::InvalidPartition(format!(
                "sector ({n_up}, {n_dn}) does not fit {l} sites"
            )));
        }
        let dim = binomial(l, n_up) * binomial(l, n_dn);
        if dim > self.sector_budget {
            return Err(BathError::SectorTooLarge { dim, budget: self.sector_budget });
        }
        let basis = FockBasis::new(l, n_up, n_dn);
        let rows: Vec<(f64, Vec<(u32, f64)>)> = basis
            .states
            .par_iter()
            .map(|&s| {
                let occ = |j: usize| (s & basis.orbital_mask(j)) != 0;
                let nup0 = if occ(0) { 1.0 } else { 0.0 };
                let ndn0 = if occ(1) { 1.0 } else { 0.0 };
                let mut diag = self.u * (nup0 - 0.5) * (ndn0 - 0.5);
                let mut hops: Vec<(u32, f64)> = Vec::new();
                for (k, (&x, &v)) in self.energies.iter().zip(&self.couplings).enumerate() {
                    for spin in 0..2 {
                        let ji = spin; // impurity orbital
                        let jb = 2 * k + 2 + spin; // bath orbital
                        if occ(jb) {
                            diag += x;
                        }
                        if v != 0.0 && occ(ji) != occ(jb) {
                            let partner = s ^ basis.orbital_mask(ji) ^ basis.orbital_mask(jb);
                            let col = basis
                                .index_of(partner)
                                .expect("hop conserves the sector") as u32;
                            hops.push((col, v * basis.string_sign(s, ji, jb)));
                        }
                    }
                }
                hops.sort_unstable_by_key(|h| h.0);
                (diag, hops)
            })
            .collect();
        let mut diag = Vec::with_capacity(dim);
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for (d, hops) in rows {
            diag.push(d);
            for (c, v) in hops {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Ok(SectorMatrix { basis, diag, row_ptr, cols, vals })
    }
}

/// Sparse symmetric sector Hamiltonian (diagonal kept separate).
struct SectorMatrix {
    basis: FockBasis,
    diag: Vec<f64>,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl SectorMatrix {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply_f64(&self, x: &[f64], y: &mut [f64]) {
        y.par_iter_mut().enumerate().for_each(|(r, out)| {
            let mut acc = self.diag[r] * x[r];
            for idx in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[idx] * x[self.cols[idx] as usize];
            }
            *out = acc;
        });
    }

    fn apply_c64(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.par_iter_mut().enumerate().for_each(|(r, out)| {
            let mut acc = x[r] * self.diag[r];
            for idx in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += x[self.cols[idx] as usize] * self.vals[idx];
            }
            *out = acc;
        });
    }

    #[cfg(test)]
    fn dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut a = vec![vec![0.0; n]; n];
        for r in 0..n {
            a[r][r] = self.diag[r];
            for idx in self.row_ptr[r]..self.row_ptr[r + 1] {
                a[r][self.cols[idx] as usize] += self.vals[idx];
            }
        }
        a
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Lowest eigenpair by restarted Lanczos with full reorthogonalization.
/// Returns (energy, normalized vector, residual norm).
fn lowest_eigenpair(mat: &SectorMatrix) -> Result<(f64, Vec<f64>, f64)> {
    let dim = mat.dim();
    if dim == 1 {
        return Ok((mat.diag[0], vec![1.0], 0.0));
    }
    // deterministic start: the basis state of lowest diagonal energy
    let start = mat
        .diag
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let mut v = vec![0.0; dim];
    v[start] = 1.0;
    let max_inner = dim.min(240);
    let mut hv = vec![0.0; dim];
    for _restart in 0..40 {
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_inner);
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        let nv = norm(&v);
        basis.push(v.iter().map(|x| x / nv).collect());
        let mut scale: f64 = 1e-300;
        loop {
            let j = alphas.len();
            mat.apply_f64(&basis[j], &mut hv);
            let alpha = dot(&hv, &basis[j]);
            for (w, q) in hv.iter_mut().zip(&basis[j]) {
                *w -= alpha * q;
            }
            if j > 0 {
                let b = betas[j - 1];
                for (w, q) in hv.iter_mut().zip(&basis[j - 1]) {
                    *w -= b * q;
                }
            }
            for _pass in 0..2 {
                for q in &basis {
                    let c = dot(&hv, q);
                    for (w, qi) in hv.iter_mut().zip(q) {
                        *w -= c * qi;
                    }
                }
            }
            let beta = norm(&hv);
            alphas.push(alpha);
            scale = scale.max(alpha.abs()).max(beta);
            if beta <= 1e-14 * scale || alphas.len() == max_inner {
                break;
            }
            betas.push(beta);
            basis.push(hv.iter().map(|x| x / beta).collect());
        }
        let eig = eigen_tridiag(&alphas, &betas, alphas.len())?;
        let mut y = vec![0.0; dim];
        for (r, q) in basis.iter().enumerate() {
            let c = eig.vectors[r][0];
            for (yi, qi) in y.iter_mut().zip(q) {
                *yi += c * qi;
            }
        }
        let ny = norm(&y);
        for yi in y.iter_mut() {
            *yi /= ny;
        }
        let lambda = eig.values[0];
        mat.apply_f64(&y, &mut hv);
        let resid = hv
            .iter()
            .zip(&y)
            .map(|(h, yi)| (h - lambda * yi).powi(2))
            .sum::<f64>()
            .sqrt();
        if resid < GS_RESIDUAL_TOL {
            return Ok((lambda, y, resid));
        }
        v = y;
    }
    Err(BathError::EigenNonConvergence(0))
}

/// Amplitudes over one sector's Fock basis.
#[derive(Debug, Clone)]
pub struct ManyBodyState {
    basis: FockBasis,
    amplitudes: Vec<f64>,
}

impl ManyBodyState {
    pub fn sector(&self) -> (usize, usize) {
        self.basis.sector()
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }
}

/// Sectors whose ground energies are indistinguishable at the detection gap.
#[derive(Debug, Clone)]
pub struct DegeneracyReport {
    pub gap: f64,
    pub sectors: Vec<(usize, usize)>,
}

/// Converged lowest eigenpair plus solver diagnostics.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub state: ManyBodyState,
    pub residual: f64,
    pub degeneracy: Option<DegeneracyReport>,
}

/// Ground state within one explicit (N_up, N_dn) sector.
pub fn ground_state_in(h: &SparseHamiltonian, sector: (usize, usize)) -> Result<GroundState> {
    let mat = h.sector_matrix(sector.0, sector.1)?;
    let (energy, amplitudes, residual) = lowest_eigenpair(&mat)?;
    Ok(GroundState {
        energy,
        state: ManyBodyState { basis: mat.basis, amplitudes },
        residual,
        degeneracy: None,
    })
}

/// Global ground state over the half-filling sectors (N in {floor, ceil} of
/// L/2 for each spin). Sector-degenerate minima (gap below 1e-10) resolve to
/// the lexicographically smallest (N_up, N_dn) and are reported.
pub fn ground_state(h: &SparseHamiltonian) -> Result<GroundState> {
    let l = h.sites();
    let lo = l / 2;
    let hi = l - lo;
    let mut sectors: Vec<(usize, usize)> =
        vec![(lo, lo), (lo, hi), (hi, lo), (hi, hi)];
    sectors.sort_unstable();
    sectors.dedup();
    let mut runs = Vec::with_capacity(sectors.len());
    for &sec in &sectors {
        runs.push(ground_state_in(h, sec)?);
    }
    let e_min = runs
        .iter()
        .map(|r| r.energy)
        .fold(f64::INFINITY, f64::min);
    let tied: Vec<usize> = (0..runs.len())
        .filter(|&i| runs[i].energy - e_min < DEGENERACY_GAP)
        .collect();
    let degeneracy = if tied.len() > 1 {
        let gap = tied
            .iter()
            .map(|&i| runs[i].energy - e_min)
            .fold(0.0f64, f64::max);
        Some(DegeneracyReport {
            gap,
            sectors: tied.iter().map(|&i| sectors[i]).collect(),
        })
    } else {
        None
    };
    // sectors are scanned in lexicographic order, so the first tie wins
    let mut winner = runs.swap_remove(tied[0]);
    winner.degeneracy = degeneracy;
    Ok(winner)
}

/// One Green's-overlap propagation: iG(t) with its run diagnostics.
#[derive(Debug, Clone)]
pub struct OverlapRun {
    /// iG(t) = <psi0| e^{-i(H-E0)t} |psi0>, psi0 = d_up^dag |E0> (unnormalized).
    pub series: TimeSeries,
    pub ground_energy: f64,
    /// Sector of the ground state the excitation was built on.
    pub sector: (usize, usize),
    /// |d_up^dag |E0>|^2; equals iG(0).
    pub excitation_weight: f64,
    pub degeneracy: Option<DegeneracyReport>,
    /// Largest Krylov dimension any step needed.
    pub max_krylov_dim: usize,
    /// Largest |  |psi(t)| - 1 | seen on the grid.
    pub norm_drift: f64,
}

/// Impurity Green's overlap from the searched ground state.
pub fn greens_overlap(h: &SparseHamiltonian, grid: &TimeGrid) -> Result<OverlapRun> {
    let gs = ground_state(h)?;
    overlap_from_ground(h, &gs, grid)
}

/// Impurity Green's overlap from a caller-supplied ground state.
pub fn overlap_from_ground(
    h: &SparseHamiltonian,
    gs: &GroundState,
    grid: &TimeGrid,
) -> Result<OverlapRun> {
    let l = h.sites();
    let (n_up, n_dn) = gs.state.sector();
    if n_up + 1 > l {
        return Err(BathError::EmptyExcitation);
    }
    let excited = FockBasis::new(l, n_up + 1, n_dn);
    // d_up^dag targets orbital 0: no orbitals precede it, so no string sign
    let mask0 = excited.orbital_mask(0);
    let mut psi0 = vec![0.0; excited.dim()];
    for (i, &s) in gs.state.basis.states.iter().enumerate() {
        if s & mask0 == 0 {
            let j = excited
                .index_of(s | mask0)
                .expect("adding one up particle lands in the excited sector");
            psi0[j] = gs.state.amplitudes[i];
        }
    }
    let weight: f64 = psi0.iter().map(|a| a * a).sum();
    if weight <= 1e-290 {
        return Err(BathError::EmptyExcitation);
    }
    let wsqrt = weight.sqrt();
    let phi0: Vec<f64> = psi0.iter().map(|a| a / wsqrt).collect();
    let mat = h.sector_matrix(n_up + 1, n_dn)?;
    let mut psi: Vec<Complex64> = phi0.iter().map(|&a| Complex64::new(a, 0.0)).collect();
    let mut stepper = KrylovStepper {
        mat: &mat,
        shift: gs.energy,
        max_used: 0,
    };
    let mut values = Vec::with_capacity(grid.len());
    let mut norm_drift = 0.0f64;
    for k in 0..grid.len() {
        if k > 0 {
            stepper.step(&mut psi, grid.dt(), 0)?;
        }
        let overlap: Complex64 = phi0
            .iter()
            .zip(&psi)
            .map(|(&a, z)| z * a)
            .sum();
        values.push(overlap * weight);
        let nrm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        norm_drift = norm_drift.max((nrm - 1.0).abs());
    }
    Ok(OverlapRun {
        series: TimeSeries::new(grid.clone(), values),
        ground_energy: gs.energy,
        sector: (n_up, n_dn),
        excitation_weight: weight,
        degeneracy: gs.degeneracy.clone(),
        max_krylov_dim: stepper.max_used,
        norm_drift,
    })
}

/// Short-iterate Lanczos exponential e^{-i(H-shift)dt} applied step by step.
struct KrylovStepper<'a> {
    mat: &'a SectorMatrix,
    shift: f64,
    max_used: usize,
}

impl KrylovStepper<'_> {
    fn step(&mut self, psi: &mut [Complex64], dt: f64, depth: usize) -> Result<()> {
        let dim = psi.len();
        let cap = dim.min(KRYLOV_MAX);
        let beta0 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(cap);
        basis.push(psi.iter().map(|z| z / beta0).collect());
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        let mut w = vec![Complex64::default(); dim];
        let mut scale: f64 = 1e-300;
        loop {
            let j = alphas.len();
            self.mat.apply_c64(&basis[j], &mut w);
            for (wi, q) in w.iter_mut().zip(&basis[j]) {
                *wi -= self.shift * q;
            }
            let alpha: f64 = w
                .iter()
                .zip(&basis[j])
                .map(|(wi, q)| (wi * q.conj()).re)
                .sum();
            for (wi, q) in w.iter_mut().zip(&basis[j]) {
                *wi -= alpha * q;
            }
            if j > 0 {
                let b = betas[j - 1];
                for (wi, q) in w.iter_mut().zip(&basis[j - 1]) {
                    *wi -= b * q;
                }
            }
            for _pass in 0..2 {
                for q in &basis {
                    let c: Complex64 = w.iter().zip(q).map(|(wi, qi)| wi * qi.conj()).sum();
                    for (wi, qi) in w.iter_mut().zip(q) {
                        *wi -= c * qi;
                    }
                }
            }
            let beta = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            alphas.push(alpha);
            let m = alphas.len();
            scale = scale.max(alpha.abs()).max(beta);
            if beta <= 1e-13 * scale {
                // invariant subspace: the propagation is exact in this span
                let phi = expm_tridiag_e1(&alphas, &betas, dt)?;
                compose(psi, &basis, &phi, beta0);
                self.max_used = self.max_used.max(m);
                return Ok(());
            }
            if m % 4 == 0 || m == cap {
                let phi = expm_tridiag_e1(&alphas, &betas, dt)?;
                let est = beta * dt * phi[m - 1].norm();
                if est < KRYLOV_TOL {
                    compose(psi, &basis, &phi, beta0);
                    self.max_used = self.max_used.max(m);
                    return Ok(());
                }
            }
            if m == cap {
                // the step is too long for this subspace: split it
                if depth >= 16 {
                    return Err(BathError::StepSizeCheck {
                        defect: beta * dt,
                        tolerance: KRYLOV_TOL,
                    });
                }
                self.step(psi, dt / 2.0, depth + 1)?;
                self.step(psi, dt / 2.0, depth + 1)?;
                return Ok(());
            }
            betas.push(beta);
            basis.push(w.iter().map(|z| z / beta).collect());
        }
    }
}

/// phi = e^{-i T dt} e_1 for the real symmetric tridiagonal T.
fn expm_tridiag_e1(alphas: &[f64], betas: &[f64], dt: f64) -> Result<Vec<Complex64>> {
    let m = alphas.len();
    let eig = eigen_tridiag(alphas, &betas[..m - 1], m)?;
    let phases: Vec<Complex64> = eig
        .values
        .iter()
        .map(|&lam| (Complex64::new(0.0, -lam * dt)).exp())
        .collect();
    Ok((0..m)
        .map(|r| {
            (0..m)
                .map(|i| phases[i] * (eig.vectors[r][i] * eig.vectors[0][i]))
                .sum()
        })
        .collect())
}

fn compose(psi: &mut [Complex64], basis: &[Vec<Complex64>], phi: &[Complex64], beta0: f64) {
    psi.par_iter_mut().enumerate().for_each(|(d, out)| {
        let mut acc = Complex64::default();
        for (r, coeff) in phi.iter().enumerate() {
            acc += coeff * basis[r][d];
        }
        *out = acc * beta0;
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolve::{diagonalize, filled_sea_overlap, greens_function, SingleParticleModel};
    use crate::ortho::bsdo_discretize;
    use crate::precision::Precision;
    use crate::spectral::SpectralDensity;
    use approx::assert_relative_eq;

    fn two_mode() -> SparseHamiltonian {
        SparseHamiltonian::from_modes(4.0, &[-1.0, 0.7], &[0.36, 0.49]).unwrap()
    }

    fn two_mode_bath() -> DiscreteBath {
        DiscreteBath::new(vec![-1.0, 0.7], vec![0.36, 0.49], "manual", (-2.0, 2.0)).unwrap()
    }

    /// Full spectrum of a small dense symmetric matrix by cyclic Jacobi.
    fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
        let n = a.len();
        for _sweep in 0..200 {
            let mut off = 0.0;
            for r in 0..n {
                for c in r + 1..n {
                    off += a[r][c] * a[r][c];
                }
            }
            if off.sqrt() < 1e-14 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    if a[p][q].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                    let root = (theta * theta + 1.0).sqrt();
                    let t = if theta >= 0.0 {
                        1.0 / (theta + root)
                    } else {
                        -1.0 / (-theta + root)
                    };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for r in 0..n {
                        let arp = a[r][p];
                        let arq = a[r][q];
                        a[r][p] = c * arp - s * arq;
                        a[r][q] = s * arp + c * arq;
                    }
                    for r in 0..n {
                        let apr = a[p][r];
                        let aqr = a[q][r];
                        a[p][r] = c * apr - s * aqr;
                        a[q][r] = s * apr + c * aqr;
                    }
                }
            }
        }
        let mut d: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
        d.sort_by(|x, y| x.partial_cmp(y).unwrap());
        d
    }

    #[test]
    fn atomic_limit_spectrum_and_phase() {
        let h = SparseHamiltonian::from_modes(4.0, &[], &[]).unwrap();
        // four impurity states: U/4, -U/4, -U/4, U/4 over the four sectors
        let mut diag = Vec::new();
        for sec in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let gs = ground_state_in(&h, sec).unwrap();
            diag.push(gs.energy);
        }
        assert_eq!(diag, vec![1.0, -1.0, -1.0, 1.0]);

        let gs = ground_state(&h).unwrap();
        assert_relative_eq!(gs.energy, -1.0, max_relative = 1e-14);
        assert_eq!(gs.state.sector(), (0, 1));
        let report = gs.degeneracy.as_ref().expect("singly occupied pair is degenerate");
        assert_eq!(report.sectors, vec![(0, 1), (1, 0)]);
        assert!(report.gap < 1e-12);

        // iG(t) = e^{-i(U/2)t}: a pure two-level phase
        let grid = TimeGrid::new(0.1, 10);
        let run = greens_overlap(&h, &grid).unwrap();
        assert_relative_eq!(run.excitation_weight, 1.0, max_relative = 1e-14);
        for (k, v) in run.series.values().iter().enumerate() {
            let t = grid.time(k);
            let exact = Complex64::new(0.0, -2.0 * t).exp();
            assert!((v - exact).norm() < 1e-12, "t={t}: {v} vs {exact}");
        }
        let v9 = run.series.values()[9];
        assert!((v9 - Complex64::new(-2.27202094693087109e-1, -9.73847630878195147e-1)).norm() < 1e-12);
        assert!(run.norm_drift < 1e-12);
    }

    #[test]
    fn interacting_two_mode_reference_values() {
        let h = two_mode();
        let gs = ground_state(&h).unwrap();
        assert_relative_eq!(gs.energy, -3.34447108681996763, max_relative = 1e-13);
        assert_eq!(gs.state.sector(), (1, 2));
        assert!(gs.residual < 1e-10);
        // spin-swapped partner sector is exactly degenerate
        let report = gs.degeneracy.as_ref().expect("(1,2)/(2,1) degeneracy");
        assert_eq!(report.sectors, vec![(1, 2), (2, 1)]);

        let grid = TimeGrid::new(0.1, 8);
        let run = greens_overlap(&h, &grid).unwrap();
        assert_relative_eq!(run.excitation_weight, 9.20102189564816930e-1, max_relative = 1e-12);
        assert!(run.series.values()[0].im.abs() < 1e-14);
        assert!(run.excitation_weight <= 1.0);
        let ig3 = run.series.values()[3];
        let ig7 = run.series.values()[7];
        assert!(
            (ig3 - Complex64::new(7.28045930233598204e-1, -4.63824717523850960e-1)).norm() < 1e-11
        );
        assert!(
            (ig7 - Complex64::new(1.22725598971185568e-1, -6.23937945950857720e-1)).norm() < 1e-11
        );
        assert!(run.norm_drift < 1e-9);
        assert!(run.max_krylov_dim >= 2 && run.max_krylov_dim <= KRYLOV_MAX);
    }

    #[test]
    fn quadratic_limit_matches_single_particle() {
        let h = SparseHamiltonian::from_modes(0.0, &[-1.0, 0.7], &[0.36, 0.49]).unwrap();
        let gs = ground_state(&h).unwrap();
        assert_relative_eq!(gs.energy, -2.96373865138776527, max_relative = 1e-13);
        assert_eq!(gs.state.sector(), (2, 2));
        assert!(gs.degeneracy.is_none());

        // E0 = both spins filling every negative single-particle level
        let model = SingleParticleModel::star(0.0, two_mode_bath());
        let eig = diagonalize(&model).unwrap();
        let sea: f64 = eig.energies().iter().filter(|&&e| e < 0.0).sum();
        assert_relative_eq!(gs.energy, 2.0 * sea, max_relative = 1e-12);

        let grid = TimeGrid::new(0.1, 11);
        let run = greens_overlap(&h, &grid).unwrap();
        assert_relative_eq!(run.excitation_weight, 3.13884132101642732e-1, max_relative = 1e-12);
        let ig5 = run.series.values()[5];
        assert!(
            (ig5 - Complex64::new(2.60655757105492936e-1, -1.74876598414321294e-1)).norm() < 1e-11
        );

        // the quadratic construction gives the same overlap
        let sea_series = filled_sea_overlap(&model, &grid).unwrap();
        for (a, b) in run.series.values().iter().zip(sea_series.values()) {
            assert!((a - b).norm() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn six_mode_quadratic_cross_check() {
        // asymmetric bath chosen so the half-filling search matches the sea
        let xs = [-1.5, -0.9, -0.3, 0.4, 0.8, 1.6];
        let ws = [0.3, 0.25, 0.2, 0.2, 0.25, 0.3];
        let h = SparseHamiltonian::from_modes(0.0, &xs, &ws).unwrap();
        let gs = ground_state(&h).unwrap();
        assert_eq!(gs.state.sector(), (3, 3));

        let bath = DiscreteBath::new(xs.to_vec(), ws.to_vec(), "manual", (-2.0, 2.0)).unwrap();
        let model = SingleParticleModel::star(0.0, bath);
        let eig = diagonalize(&model).unwrap();
        let sea: f64 = eig.energies().iter().filter(|&&e| e < 0.0).sum();
        assert_relative_eq!(gs.energy, 2.0 * sea, max_relative = 1e-12);

        let grid = TimeGrid::new(0.05, 61);
        let run = overlap_from_ground(&h, &gs, &grid).unwrap();
        let sea_series = filled_sea_overlap(&model, &grid).unwrap();
        let worst = run
            .series
            .values()
            .iter()
            .zip(sea_series.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-8, "quadratic-limit deviation {worst:e}");
        assert!(run.norm_drift < 1e-9);
    }

    #[test]
    fn u_zero_spectrum_is_sum_of_levels() {
        let h = SparseHamiltonian::from_modes(0.0, &[-1.0, 0.7], &[0.36, 0.49]).unwrap();
        let eig = diagonalize(&SingleParticleModel::star(0.0, two_mode_bath())).unwrap();
        let lam = eig.energies();

        // sector (1,1): all pairwise sums lam_i + lam_j
        let mut expect: Vec<f64> = Vec::new();
        for &a in lam {
            for &b in lam {
                expect.push(a + b);
            }
        }
        expect.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let got = jacobi_eigenvalues(h.sector_matrix(1, 1).unwrap().dense());
        assert_eq!(got.len(), expect.len());
        for (g, e) in got.iter().zip(&expect) {
            assert!((g - e).abs() < 1e-10, "{g} vs {e}");
        }

        // sector (2,1): two distinct up levels plus one down level
        let mut expect: Vec<f64> = Vec::new();
        for i in 0..lam.len() {
            for j in i + 1..lam.len() {
                for &c in lam {
                    expect.push(lam[i] + lam[j] + c);
                }
            }
        }
        expect.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let got = jacobi_eigenvalues(h.sector_matrix(2, 1).unwrap().dense());
        assert_eq!(got.len(), expect.len());
        for (g, e) in got.iter().zip(&expect) {
            assert!((g - e).abs() < 1e-10, "{g} vs {e}");
        }
    }

    #[test]
    fn sector_matrices_are_exactly_hermitian() {
        let h = two_mode();
        for sec in [(1, 1), (1, 2), (2, 2)] {
            let a = h.sector_matrix(sec.0, sec.1).unwrap().dense();
            let n = a.len();
            for r in 0..n {
                for c in 0..n {
                    assert_eq!(a[r][c], a[c][r], "sector {sec:?} at ({r},{c})");
                }
            }
        }
    }

    #[test]
    fn interaction_breaks_discretization_optimality() {
        // The Gauss-rule bath is constructed so that, for a quadratic model,
        // refining it changes nothing until the propagation horizon: the
        // vacuum survival amplitude of the star model agrees between N_b and
        // N_b + 2 modes to near machine precision at early times.  Switching
        // on the impurity interaction (same baths, U = 4) destroys that
        // exactness by orders of magnitude at the very same times, and the
        // interacting defect reaches the percent scale before the quadratic
        // horizon is ever approached.  Odd mode counts keep the total site
        // count even; an odd count would pin a bath level exactly at the
        // Fermi energy of this symmetric density and make the half-filled
        // ground state ambiguous.
        let j = SpectralDensity::gaussian_mix(vec![-4.0, 0.0, 4.0], 0.5, (-5.0, 5.0)).unwrap();
        // (n_b, probe index on a dt = 0.02 grid, bounds for the two defects)
        for (n_b, k, vac_cap, int_floor) in [(3usize, 10usize, 1e-6, 1e-4), (5, 20, 1e-7, 1e-4)] {
            let grid = TimeGrid::spanning(0.02, 0.02 * k as f64 + 1e-12);
            let coarse = bsdo_discretize(&j, n_b, Precision::Double).unwrap();
            let fine = bsdo_discretize(&j, n_b + 2, Precision::Double).unwrap();
            let gc = greens_function(&SingleParticleModel::star(0.0, coarse.clone()), &grid).unwrap();
            let gf = greens_function(&SingleParticleModel::star(0.0, fine.clone()), &grid).unwrap();
            let ic = greens_overlap(&build_siam(4.0, &coarse).unwrap(), &grid).unwrap();
            let if_ = greens_overlap(&build_siam(4.0, &fine).unwrap(), &grid).unwrap();
            let vacuum = (gc.values()[k] - gf.values()[k]).norm();
            let interacting = (ic.series.values()[k] - if_.series.values()[k]).norm();
            assert!(vacuum < vac_cap, "n_b={n_b} vacuum defect {vacuum:e}");
            assert!(interacting > int_floor, "n_b={n_b} interacting defect {interacting:e}");
            assert!(interacting > 1e3 * vacuum, "n_b={n_b}: {interacting:e} vs {vacuum:e}");
        }
        // by the N_b = 3 quadratic horizon the interacting defect is O(1e-2)
        let horizon = 2.0 * (2.0 * 3.0 + 1.0) / 10.0;
        let grid = TimeGrid::spanning(0.02, horizon);
        let ic = greens_overlap(
            &build_siam(4.0, &bsdo_discretize(&j, 3, Precision::Double).unwrap()).unwrap(),
            &grid,
        )
        .unwrap();
        let if_ = greens_overlap(
            &build_siam(4.0, &bsdo_discretize(&j, 5, Precision::Double).unwrap()).unwrap(),
            &grid,
        )
        .unwrap();
        let late = (ic.series.values()[grid.len() - 1] - if_.series.values()[grid.len() - 1]).norm();
        assert!(late > 1e-2, "late interacting defect {late:e}");
    }

    #[test]
    fn guards_reject_oversized_problems() {
        let xs: Vec<f64> = (0..13).map(|k| k as f64 * 0.1 - 0.6).collect();
        let ws = vec![0.1; 13];
        match SparseHamiltonian::from_modes(1.0, &xs, &ws) {
            Err(BathError::InvalidPartition(_)) => {}
            other => panic!("expected bath-size cap, got {other:?}"),
        }

        let h = SparseHamiltonian::from_modes(0.0, &[-0.5, 0.1, 0.4, 0.9], &[0.2; 4])
            .unwrap()
            .with_sector_budget(10);
        match ground_state(&h) {
            Err(BathError::SectorTooLarge { dim, budget }) => {
                assert!(dim > budget);
                assert_eq!(budget, 10);
            }
            other => panic!("expected sector budget error, got {other:?}"),
        }
    }

    #[test]
    fn vanishing_excitation_is_an_error() {
        let h = SparseHamiltonian::from_modes(4.0, &[], &[]).unwrap();
        // impurity-up already occupied in every basis state of (1, 0)
        let gs = ground_state_in(&h, (1, 0)).unwrap();
        let grid = TimeGrid::new(0.1, 3);
        match overlap_from_ground(&h, &gs, &grid) {
            Err(BathError::EmptyExcitation) => {}
            other => panic!("expected empty excitation, got {other:?}"),
        }
        // no room for another up particle at all
        let gs = ground_state_in(&h, (1, 1)).unwrap();
        match overlap_from_ground(&h, &gs, &grid) {
            Err(BathError::EmptyExcitation) => {}
            other => panic!("expected empty excitation, got {other:?}"),
        }
    }
}
