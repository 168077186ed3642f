//! Dense linear algebra and verification helpers, all in `f64`.

mod gradcheck;
mod matrix;
mod pca;
mod rng;
mod svd;

pub use gradcheck::check_gradient;
pub use matrix::{axpy, dot, norm, Matrix};
pub use pca::pca_2d;
pub use rng::Rng;
pub use svd::{svd, Svd, MAX_SWEEPS};

/// Logistic sigmoid, split by sign so neither branch overflows.
pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + eˣ)` without overflow.
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Mean Euclidean distance over all unordered row pairs.
pub fn mean_pairwise_distance(m: &Matrix) -> f64 {
    let n = m.rows();
    if n < 2 {
        return 0.0;
    }
    let mut total = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let d: f64 = m.row(i).iter().zip(m.row(j)).map(|(a, b)| (a - b) * (a - b)).sum();
            total += d.sqrt();
        }
    }
    total / (n * (n - 1) / 2) as f64
}
