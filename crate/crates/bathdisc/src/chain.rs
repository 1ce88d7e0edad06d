//! Star ↔ chain maps: Lanczos tridiagonalization of a discrete bath (with
//! full reorthogonalization) and its inverse via diagonalization of the chain
//! tridiagonal.

use crate::bath::{ChainCoefficients, DiscreteBath};
use crate::error::Result;
use crate::precision::{MpFloat, Precision, Real};
use crate::tridiag::eigen_first_row;

/// Result of a Lanczos run. A breakdown before step N_b is not an error: the
/// shorter chain is exact (it signals numerically coincident bath energies).
#[derive(Debug, Clone)]
pub struct LanczosOutcome {
    pub chain: ChainCoefficients,
    /// Step at which β vanished, if the recursion terminated early.
    pub breakdown_order: Option<usize>,
    /// Worst deviation of the Krylov basis from orthonormality.
    pub ortho_defect: f64,
}

fn lanczos_in<T: Real>(energies: &[f64], weights: &[f64]) -> (Vec<f64>, Vec<f64>, Option<usize>, f64) {
    let n = energies.len();
    let xs: Vec<T> = energies.iter().map(|x| T::from_f64(*x)).collect();
    let w_tot = weights.iter().fold(T::zero(), |a, w| a + T::from_f64(*w));
    // start vector: V_n/V_tot, the normalized superposition of all star modes
    let q0: Vec<T> = weights
        .iter()
        .map(|w| (T::from_f64(*w) / w_tot.clone()).sqrt())
        .collect();
    let dot = |p: &[T], q: &[T]| -> T {
        p.iter()
            .zip(q)
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    };
    let eps = T::epsilon().to_f64();
    // double: the documented 1e-28 absolute-in-scaled-units cutoff; extended:
    // the equivalent margin above its own roundoff
    let breakdown_factor = if eps > 1e-20 { 1e-28 } else { eps * eps * 1e4 };
    let scale = energies.iter().fold(0.0f64, |a, x| a.max(x * x)).max(1e-300);
    let mut basis: Vec<Vec<T>> = vec![q0.clone()];
    let mut alphas = Vec::with_capacity(n);
    let mut betas = Vec::with_capacity(n.saturating_sub(1));
    let mut breakdown = None;
    let mut cur = q0;
    let mut prev: Vec<T> = vec![T::zero(); n];
    let mut sqrt_beta_prev = T::zero();
    for k in 0..n {
        let hcur: Vec<T> = xs.iter().zip(&cur).map(|(x, c)| x.clone() * c.clone()).collect();
        let alpha = dot(&hcur, &cur);
        alphas.push(alpha.to_f64());
        if k + 1 == n {
            break;
        }
        let mut r: Vec<T> = hcur
            .iter()
            .zip(&cur)
            .zip(&prev)
            .map(|((h, c), p)| {
                h.clone() - alpha.clone() * c.clone() - sqrt_beta_prev.clone() * p.clone()
            })
            .collect();
        // full reorthogonalization, two passes
        for _ in 0..2 {
            for b in &basis {
                let ov = dot(b, &r);
                for (ri, bi) in r.iter_mut().zip(b) {
                    *ri = ri.clone() - ov.clone() * bi.clone();
                }
            }
        }
        let beta = dot(&r, &r);
        if beta.to_f64() < breakdown_factor * scale {
            breakdown = Some(k + 1);
            break;
        }
        betas.push(beta.to_f64());
        let sb = beta.sqrt();
        let next: Vec<T> = r.into_iter().map(|v| v / sb.clone()).collect();
        basis.push(next.clone());
        prev = cur;
        cur = next;
        sqrt_beta_prev = sb;
    }
    let mut defect = 0.0f64;
    for i in 0..basis.len() {
        for j in i..basis.len() {
            let ov = dot(&basis[i], &basis[j]).to_f64();
            let target = if i == j { 1.0 } else { 0.0 };
            defect = defect.max((ov - target).abs());
        }
    }
    (alphas, betas, breakdown, defect)
}

/// Chain coefficients of a discrete bath: tridiagonalize diag(x_n) with the
/// start vector V_n/V_tot. Extended precision is enforced for N_b > 40.
pub fn lanczos_tridiagonalize(bath: &DiscreteBath, precision: Precision) -> Result<LanczosOutcome> {
    let (alphas, betas, breakdown_order, ortho_defect) =
        match precision.effective(bath.n_b(), None) {
            Precision::Double => lanczos_in::<f64>(bath.energies(), bath.weights()),
            Precision::Extended => lanczos_in::<MpFloat>(bath.energies(), bath.weights()),
        };
    let chain = ChainCoefficients::new(bath.total_weight().sqrt(), alphas, betas)?;
    Ok(LanczosOutcome {
        chain,
        breakdown_order,
        ortho_defect,
    })
}

/// Invert the chain map: diagonalize the bath tridiagonal (α on the diagonal,
/// √β off it); energies are the eigenvalues, weights v_tot² times the squared
/// first eigenvector components. `support` overrides the recorded interval
/// (defaults to the eigenvalue span).
pub fn star_from_chain(chain: &ChainCoefficients, support: Option<(f64, f64)>) -> Result<DiscreteBath> {
    let offdiag = chain.hoppings();
    let (values, first_sq) = eigen_first_row(chain.alphas(), &offdiag)?;
    let v2 = chain.v_tot() * chain.v_tot();
    let weights: Vec<f64> = first_sq.iter().map(|c| v2 * c).collect();
    let support = support.unwrap_or_else(|| {
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let pad = 1e-9 * (hi - lo).max(lo.abs().max(hi.abs())).max(1.0);
        (lo - pad, hi + pad)
    });
    DiscreteBath::new(values, weights, "chain_eigen", support)
}
