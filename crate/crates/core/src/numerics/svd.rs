//! Thin singular value decomposition by one-sided (Hestenes) Jacobi rotations.
//!
//! Columns of a working copy of `A` are pairwise orthogonalized by plane
//! rotations, accumulated into `V`. At convergence the column norms are the
//! singular values and the normalized columns form `U`. Wide matrices are
//! handled through their transpose.

use super::matrix::{dot, norm, Matrix};
use crate::error::{Error, Result};

pub const MAX_SWEEPS: usize = 100;

// Relative off-diagonal threshold for declaring a column pair orthogonal.
const ORTHOGONALITY_TOL: f64 = 1e-15;

/// `a = u · diag(s) · vᵀ` with `s` sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct Svd {
    /// `rows × k`, orthonormal columns, `k = min(rows, cols)`.
    pub u: Matrix,
    pub s: Vec<f64>,
    /// `cols × k`, orthonormal columns.
    pub v: Matrix,
}

impl Svd {
    pub fn reconstruct(&self) -> Matrix {
        let mut us = self.u.clone();
        for i in 0..us.rows() {
            for (x, s) in us.row_mut(i).iter_mut().zip(&self.s) {
                *x *= s;
            }
        }
        us.matmul(&self.v.transpose()).expect("svd factors are conformant")
    }

    pub fn nuclear_norm(&self) -> f64 {
        self.s.iter().sum()
    }

    /// `u · vᵀ`, the polar factor (a subgradient of the nuclear norm).
    pub fn polar(&self) -> Matrix {
        self.u.matmul(&self.v.transpose()).expect("svd factors are conformant")
    }
}

pub fn svd(a: &Matrix) -> Result<Svd> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(Error::DegenerateInput("svd of an empty matrix"));
    }
    if !a.is_finite() {
        return Err(Error::NonFiniteInput);
    }
    // rotate a copy normalized by a power of two so dot products cannot overflow
    let max = a.max_abs();
    let scale = if max > 0.0 { 2f64.powi(max.log2().floor() as i32) } else { 0.0 };
    let work = if scale > 0.0 { a.scale(1.0 / scale) } else { a.clone() };
    let mut dec = if work.rows() >= work.cols() {
        tall_svd(&work)?
    } else {
        let t = tall_svd(&work.transpose())?;
        Svd { u: t.v, s: t.s, v: t.u }
    };
    if scale > 0.0 {
        dec.s.iter_mut().for_each(|s| *s *= scale);
    }
    Ok(dec)
}

fn tall_svd(a: &Matrix) -> Result<Svd> {
    let (m, n) = a.shape();
    let mut w: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    // columns below this squared norm are rounding noise; rotating them
    // against a large column never settles
    let total: f64 = w.iter().map(|c| dot(c, c)).sum();
    let negligible = (f64::EPSILON * f64::EPSILON) * total;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&w[p], &w[p]);
                let beta = dot(&w[q], &w[q]);
                let gamma = dot(&w[p], &w[q]);
                if gamma == 0.0
                    || alpha.min(beta) <= negligible
                    || gamma.abs() <= ORTHOGONALITY_TOL * (alpha * beta).sqrt()
                {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }

    let mut sigma: Vec<f64> = w.iter().map(|c| norm(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]).then(i.cmp(&j)));

    let cutoff = sigma[order[0]] * f64::EPSILON * m.max(n) as f64;
    let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut s_sorted = Vec::with_capacity(n);
    let mut v_cols = Vec::with_capacity(n);
    let mut deficient = Vec::new();
    for &j in &order {
        if sigma[j] > cutoff && sigma[j] > 0.0 {
            u_cols.push(w[j].iter().map(|x| x / sigma[j]).collect());
        } else {
            sigma[j] = 0.0;
            deficient.push(u_cols.len());
            u_cols.push(Vec::new());
        }
        s_sorted.push(sigma[j]);
        v_cols.push(std::mem::take(&mut v[j]));
    }
    for slot in deficient {
        u_cols[slot] = orthonormal_complement(&u_cols, m);
    }

    Ok(Svd {
        u: Matrix::from_fn(m, n, |i, j| u_cols[j][i]),
        s: s_sorted,
        v: Matrix::from_fn(n, n, |i, j| v_cols[j][i]),
    })
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (lo, hi) = cols.split_at_mut(q);
    for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
        let (xp, yq) = (*x, *y);
        *x = c * xp - s * yq;
        *y = s * xp + c * yq;
    }
}

/// A unit vector orthogonal to every non-empty column in `basis`, picked as
/// the standard basis vector with the largest residual after two rounds of
/// Gram-Schmidt.
fn orthonormal_complement(basis: &[Vec<f64>], m: usize) -> Vec<f64> {
    let project_out = |mut x: Vec<f64>| {
        for _ in 0..2 {
            for b in basis.iter().filter(|b| !b.is_empty()) {
                let d = dot(&x, b);
                super::matrix::axpy(-d, b, &mut x);
            }
        }
        x
    };
    let best = (0..m)
        .map(|k| {
            let mut e = vec![0.0; m];
            e[k] = 1.0;
            project_out(e)
        })
        .max_by(|a, b| norm(a).total_cmp(&norm(b)))
        .expect("m >= 1");
    let nrm = norm(&best);
    best.into_iter().map(|x| x / nrm).collect()
}
