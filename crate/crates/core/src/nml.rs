//! Nuclear-norm maximization loss over the full label-embedding table.
//!
//! `loss = -(1/N) Σ σᵢ(table)` for an `N`-row table. Its gradient is
//! `-(1/N) U Vᵀ` from the thin SVD; where singular values vanish that product
//! is one valid subgradient.

use crate::error::{Error, Result};
use crate::numerics::{svd, Matrix};

#[derive(Debug, Clone, PartialEq)]
pub struct NmlResult {
    pub loss: f64,
    pub grad_table: Matrix,
    pub singular_values: Vec<f64>,
}

impl NmlResult {
    pub fn nuclear_norm(&self) -> f64 {
        self.singular_values.iter().sum()
    }
}

pub fn nuclear_norm(a: &Matrix) -> Result<f64> {
    Ok(svd(a)?.nuclear_norm())
}

pub fn nml_loss(table: &Matrix) -> Result<NmlResult> {
    let n = table.rows();
    if n == 0 {
        return Err(Error::DegenerateInput("empty embedding table"));
    }
    let dec = svd(table)?;
    let scale = -1.0 / n as f64;
    Ok(NmlResult {
        loss: scale * dec.nuclear_norm(),
        grad_table: dec.polar().scale(scale),
        singular_values: dec.s,
    })
}
