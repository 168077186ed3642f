//! Single-layer uni-directional GRU with an analytic backward pass.
//!
//! For each step `t`:
//!
//! ```text
//! z = σ(W_z x + U_z h₋ + b_z)
//! r = σ(W_r x + U_r h₋ + b_r)
//! ĥ = tanh(W_h x + U_h (r ⊙ h₋) + b_h)
//! h = (1 − z) ⊙ h₋ + z ⊙ ĥ
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{logistic, Matrix, Rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GruParameters {
    pub w_z: Matrix,
    pub w_r: Matrix,
    pub w_h: Matrix,
    pub u_z: Matrix,
    pub u_r: Matrix,
    pub u_h: Matrix,
    pub b_z: Vec<f64>,
    pub b_r: Vec<f64>,
    pub b_h: Vec<f64>,
}

impl GruParameters {
    pub fn zeros(input_dim: usize, hidden_dim: usize) -> Self {
        let w = Matrix::zeros(hidden_dim, input_dim);
        let u = Matrix::zeros(hidden_dim, hidden_dim);
        GruParameters {
            w_z: w.clone(),
            w_r: w.clone(),
            w_h: w,
            u_z: u.clone(),
            u_r: u.clone(),
            u_h: u,
            b_z: vec![0.0; hidden_dim],
            b_r: vec![0.0; hidden_dim],
            b_h: vec![0.0; hidden_dim],
        }
    }

    /// Weights uniform in `[-scale, scale)`, biases zero.
    pub fn random(input_dim: usize, hidden_dim: usize, scale: f64, rng: &mut Rng) -> Self {
        let mut p = Self::zeros(input_dim, hidden_dim);
        for m in [&mut p.w_z, &mut p.w_r, &mut p.w_h, &mut p.u_z, &mut p.u_r, &mut p.u_h] {
            rng.fill_uniform(m.as_mut_slice(), -scale, scale);
        }
        p
    }

    pub fn input_dim(&self) -> usize {
        self.w_z.cols()
    }

    pub fn hidden_dim(&self) -> usize {
        self.w_z.rows()
    }

    /// Every parameter block as a flat slice, in a fixed order.
    pub fn blocks(&self) -> [&[f64]; 9] {
        [
            self.w_z.as_slice(),
            self.w_r.as_slice(),
            self.w_h.as_slice(),
            self.u_z.as_slice(),
            self.u_r.as_slice(),
            self.u_h.as_slice(),
            &self.b_z,
            &self.b_r,
            &self.b_h,
        ]
    }

    pub fn blocks_mut(&mut self) -> [&mut [f64]; 9] {
        [
            self.w_z.as_mut_slice(),
            self.w_r.as_mut_slice(),
            self.w_h.as_mut_slice(),
            self.u_z.as_mut_slice(),
            self.u_r.as_mut_slice(),
            self.u_h.as_mut_slice(),
            &mut self.b_z,
            &mut self.b_r,
            &mut self.b_h,
        ]
    }

    pub const BLOCK_NAMES: [&'static str; 9] =
        ["W_z", "W_r", "W_h", "U_z", "U_r", "U_h", "b_z", "b_r", "b_h"];

    /// `self += c · other`, block by block.
    pub fn add_scaled(&mut self, c: f64, other: &GruParameters) {
        for (dst, src) in self.blocks_mut().into_iter().zip(other.blocks()) {
            crate::numerics::axpy(c, src, dst);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.blocks().iter().all(|b| b.iter().all(|x| x.is_finite()))
    }

    fn check_shapes(&self) -> Result<()> {
        let (h, d) = (self.hidden_dim(), self.input_dim());
        let ok = [&self.w_r, &self.w_h].iter().all(|m| m.shape() == (h, d))
            && [&self.u_z, &self.u_r, &self.u_h].iter().all(|m| m.shape() == (h, h))
            && [&self.b_z, &self.b_r, &self.b_h].iter().all(|b| b.len() == h);
        if ok {
            Ok(())
        } else {
            Err(Error::DimensionMismatch("inconsistent GRU parameter shapes".into()))
        }
    }
}

/// Per-step intermediates saved by [`gru_forward`].
#[derive(Debug, Clone)]
pub struct GruCache {
    inputs: Matrix,
    /// Row `t` is `h_{t-1}`; row 0 is `h0`.
    prev: Matrix,
    z: Matrix,
    r: Matrix,
    candidate: Matrix,
}

#[derive(Debug, Clone)]
pub struct GruGradients {
    pub params: GruParameters,
    pub inputs: Matrix,
    pub h0: Vec<f64>,
}

/// Runs the GRU over the rows of `inputs`; returns the `m × d_hid` states.
pub fn gru_forward(params: &GruParameters, inputs: &Matrix, h0: &[f64]) -> Result<(Matrix, GruCache)> {
    params.check_shapes()?;
    let (hd, id) = (params.hidden_dim(), params.input_dim());
    if inputs.cols() != id || h0.len() != hd {
        return Err(Error::DimensionMismatch(format!(
            "GRU expects inputs of width {id} and h0 of length {hd}, got {} and {}",
            inputs.cols(),
            h0.len()
        )));
    }
    let m = inputs.rows();
    let mut states = Matrix::zeros(m, hd);
    let mut cache = GruCache {
        inputs: inputs.clone(),
        prev: Matrix::zeros(m, hd),
        z: Matrix::zeros(m, hd),
        r: Matrix::zeros(m, hd),
        candidate: Matrix::zeros(m, hd),
    };
    let mut h = h0.to_vec();
    for t in 0..m {
        let x = inputs.row(t);
        let mut z = params.w_z.mul_vec(x);
        let mut r = params.w_r.mul_vec(x);
        let uz = params.u_z.mul_vec(&h);
        let ur = params.u_r.mul_vec(&h);
        for k in 0..hd {
            z[k] = logistic(z[k] + uz[k] + params.b_z[k]);
            r[k] = logistic(r[k] + ur[k] + params.b_r[k]);
        }
        let rh: Vec<f64> = r.iter().zip(&h).map(|(a, b)| a * b).collect();
        let mut cand = params.w_h.mul_vec(x);
        let uh = params.u_h.mul_vec(&rh);
        for k in 0..hd {
            cand[k] = (cand[k] + uh[k] + params.b_h[k]).tanh();
        }
        cache.prev.row_mut(t).copy_from_slice(&h);
        for k in 0..hd {
            h[k] = (1.0 - z[k]) * h[k] + z[k] * cand[k];
        }
        states.row_mut(t).copy_from_slice(&h);
        cache.z.row_mut(t).copy_from_slice(&z);
        cache.r.row_mut(t).copy_from_slice(&r);
        cache.candidate.row_mut(t).copy_from_slice(&cand);
    }
    Ok((states, cache))
}

/// Backpropagation through time given `∂L/∂h_t` for every step.
pub fn gru_backward(
    params: &GruParameters,
    cache: &GruCache,
    grad_states: &Matrix,
) -> Result<GruGradients> {
    let (m, hd) = cache.z.shape();
    if grad_states.shape() != (m, hd) || params.hidden_dim() != hd {
        return Err(Error::CacheMismatch(format!(
            "cache holds {m}x{hd} states, gradient is {}x{}",
            grad_states.rows(),
            grad_states.cols()
        )));
    }
    let mut g = GruParameters::zeros(params.input_dim(), hd);
    let mut grad_inputs = Matrix::zeros(m, params.input_dim());
    let mut carry = vec![0.0; hd];
    let mut da_z = vec![0.0; hd];
    let mut da_r = vec![0.0; hd];
    let mut da_h = vec![0.0; hd];
    let mut rh = vec![0.0; hd];

    for t in (0..m).rev() {
        let (x, h_prev) = (cache.inputs.row(t), cache.prev.row(t));
        let (z, r, cand) = (cache.z.row(t), cache.r.row(t), cache.candidate.row(t));
        let mut dh_prev = vec![0.0; hd];
        for k in 0..hd {
            let dh = grad_states[(t, k)] + carry[k];
            da_h[k] = dh * z[k] * (1.0 - cand[k] * cand[k]);
            da_z[k] = dh * (cand[k] - h_prev[k]) * z[k] * (1.0 - z[k]);
            dh_prev[k] = dh * (1.0 - z[k]);
            rh[k] = r[k] * h_prev[k];
        }
        // through U_h (r ⊙ h₋)
        let mut d_rh = vec![0.0; hd];
        params.u_h.add_mul_transpose_vec(&da_h, &mut d_rh);
        for k in 0..hd {
            da_r[k] = d_rh[k] * h_prev[k] * r[k] * (1.0 - r[k]);
            dh_prev[k] += d_rh[k] * r[k];
        }
        params.u_z.add_mul_transpose_vec(&da_z, &mut dh_prev);
        params.u_r.add_mul_transpose_vec(&da_r, &mut dh_prev);

        g.w_z.add_outer(&da_z, x);
        g.w_r.add_outer(&da_r, x);
        g.w_h.add_outer(&da_h, x);
        g.u_z.add_outer(&da_z, h_prev);
        g.u_r.add_outer(&da_r, h_prev);
        g.u_h.add_outer(&da_h, &rh);
        for k in 0..hd {
            g.b_z[k] += da_z[k];
            g.b_r[k] += da_r[k];
            g.b_h[k] += da_h[k];
        }
        let dx = grad_inputs.row_mut(t);
        params.w_z.add_mul_transpose_vec(&da_z, dx);
        params.w_r.add_mul_transpose_vec(&da_r, dx);
        params.w_h.add_mul_transpose_vec(&da_h, dx);
        carry = dh_prev;
    }
    Ok(GruGradients { params: g, inputs: grad_inputs, h0: carry })
}
