use super::matrix::Matrix;
use super::svd::svd;
use crate::error::{Error, Result};

/// Projects centered rows onto the top two principal directions.
///
/// Each direction is signed so that its largest-magnitude coordinate is
/// positive. A point set with no spread yields all-zero scores.
pub fn pca_2d(points: &Matrix) -> Result<Matrix> {
    let (n, d) = points.shape();
    if n < 2 {
        return Err(Error::DegenerateInput("PCA needs at least two rows"));
    }
    if d < 2 {
        return Err(Error::DegenerateInput("PCA needs at least two columns"));
    }
    let mut centered = points.clone();
    for j in 0..d {
        let mean = points.column(j).iter().sum::<f64>() / n as f64;
        for i in 0..n {
            centered[(i, j)] -= mean;
        }
    }
    let dec = svd(&centered)?;
    let mut directions = dec.v.select_columns(&[0, 1]);
    for j in 0..2 {
        let col = directions.column(j);
        let pivot = col
            .iter()
            .enumerate()
            .fold(0, |best, (i, x)| if x.abs() > col[best].abs() { i } else { best });
        if col[pivot] < 0.0 {
            for i in 0..d {
                directions[(i, j)] = -directions[(i, j)];
            }
        }
    }
    centered.matmul(&directions)
}
