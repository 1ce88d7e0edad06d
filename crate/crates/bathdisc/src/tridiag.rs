//! Symmetric tridiagonal eigensolver (implicit-shift QL), generic over the
//! precision backend.
//!
//! Gaussian quadrature rules only need the *first* component of each
//! eigenvector (Christoffel weights), so the transform accumulation is
//! restricted to the rows actually requested: one row for quadrature, all rows
//! for dense spectral decompositions.

use crate::error::{BathError, Result};
use crate::precision::Real;

/// Eigendecomposition of a symmetric tridiagonal matrix.
///
/// `vectors` holds the first `rows_kept` rows of the orthonormal eigenvector
/// matrix: `vectors[r][i]` is component r of the i-th eigenvector. Eigenvalues
/// ascend.
#[derive(Debug, Clone)]
pub struct TridiagEigen<T> {
    pub values: Vec<T>,
    pub vectors: Vec<Vec<T>>,
}

/// Hypotenuse without overflow, in the generic type.
fn pythag<T: Real>(a: &T, b: &T) -> T {
    let aa = a.abs();
    let ab = b.abs();
    if aa > ab {
        let r = ab / aa.clone();
        aa.clone() * (T::one() + r.clone() * r).sqrt()
    } else if ab > T::zero() {
        let r = aa / ab.clone();
        ab.clone() * (T::one() + r.clone() * r).sqrt()
    } else {
        T::zero()
    }
}

fn sign_of<T: Real>(magnitude: T, sign_source: &T) -> T {
    if *sign_source < T::zero() {
        -magnitude.abs()
    } else {
        magnitude.abs()
    }
}

/// Eigenvalues and the first `rows` rows of the eigenvector matrix of the
/// symmetric tridiagonal matrix with diagonal `diag` and off-diagonal
/// `offdiag` (length one less).
pub fn eigen_tridiag<T: Real>(diag: &[T], offdiag: &[T], rows: usize) -> Result<TridiagEigen<T>> {
    let n = diag.len();
    assert_eq!(offdiag.len() + 1, n.max(1), "off-diagonal length mismatch");
    let rows = rows.min(n);
    let mut d: Vec<T> = diag.to_vec();
    // e is padded to length n with a trailing zero, Fortran-style
    let mut e: Vec<T> = offdiag.to_vec();
    e.push(T::zero());
    // tracked rows of the accumulated rotation product, initialized to the
    // corresponding rows of the identity
    let mut z: Vec<Vec<T>> = (0..rows)
        .map(|r| {
            (0..n)
                .map(|c| if r == c { T::one() } else { T::zero() })
                .collect()
        })
        .collect();

    let max_iter = 80;
    for l in 0..n {
        let mut iter = 0;
        loop {
            // locate a negligible off-diagonal element
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > max_iter {
                return Err(BathError::EigenNonConvergence(l));
            }
            // implicit shift from the 2x2 at the top of the active block
            let two = T::from_f64(2.0);
            let mut g = (d[l + 1].clone() - d[l].clone()) / (two.clone() * e[l].clone());
            let r = pythag(&g, &T::one());
            g = d[m].clone() - d[l].clone() + e[l].clone() / (g.clone() + sign_of(r, &g));
            let mut s = T::one();
            let mut c = T::one();
            let mut p = T::zero();
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s.clone() * e[i].clone();
                let b = c.clone() * e[i].clone();
                let r = pythag(&f, &g);
                e[i + 1] = r.clone();
                if r == T::zero() {
                    d[i + 1] = d[i + 1].clone() - p.clone();
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r.clone();
                c = g.clone() / r;
                g = d[i + 1].clone() - p.clone();
                let rr = (d[i].clone() - g.clone()) * s.clone() + two.clone() * c.clone() * b.clone();
                p = s.clone() * rr.clone();
                d[i + 1] = g.clone() + p.clone();
                g = c.clone() * rr - b;
                for zr in z.iter_mut() {
                    let f = zr[i + 1].clone();
                    zr[i + 1] = s.clone() * zr[i].clone() + c.clone() * f.clone();
                    zr[i] = c.clone() * zr[i].clone() - s.clone() * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] = d[l].clone() - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }

    // sort ascending, permuting the tracked rows alongside
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap_or(std::cmp::Ordering::Equal));
    let values: Vec<T> = order.iter().map(|&i| d[i].clone()).collect();
    let vectors: Vec<Vec<T>> = z
        .iter()
        .map(|row| order.iter().map(|&i| row[i].clone()).collect())
        .collect();
    Ok(TridiagEigen { values, vectors })
}

/// Convenience: eigenvalues plus squared first components (quadrature form).
pub fn eigen_first_row<T: Real>(diag: &[T], offdiag: &[T]) -> Result<(Vec<T>, Vec<T>)> {
    let eig = eigen_tridiag(diag, offdiag, 1)?;
    let first_sq = eig.vectors[0].iter().map(|v| v.clone() * v.clone()).collect();
    Ok((eig.values, first_sq))
}
