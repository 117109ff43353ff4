use nalgebra::{Cholesky, DMatrix};

use crate::{linear_to_db, C64};

/// `log2 det(I + H̃ H̃^H)`, bps/Hz, with unit power per Tx antenna.
///
/// The determinant is taken on the smaller Gram matrix (Sylvester's
/// identity) through a Cholesky factor: `log2 det = 2 Σ log2 L_ii`.
pub fn capacity(h_tilde: &DMatrix<C64>) -> f64 {
    let (n_r, n_t) = h_tilde.shape();
    if n_r == 0 || n_t == 0 {
        return 0.0;
    }
    let gram = if n_r <= n_t {
        h_tilde * h_tilde.adjoint()
    } else {
        h_tilde.adjoint() * h_tilde
    };
    let n = gram.nrows();
    let a = DMatrix::<C64>::identity(n, n) + gram;
    match Cholesky::new(a) {
        Some(ch) => {
            let l = ch.l_dirty();
            let c: f64 = (0..n).map(|i| 2.0 * l[(i, i)].re.log2()).sum();
            c.max(0.0)
        }
        None => f64::NAN,
    }
}

/// `tr(H̃ H̃^H) / N_r`, linear.
pub fn snr(h_tilde: &DMatrix<C64>) -> f64 {
    let n_r = h_tilde.nrows();
    if n_r == 0 {
        return 0.0;
    }
    h_tilde.iter().map(|v| v.norm_sqr()).sum::<f64>() / n_r as f64
}

pub fn snr_db(h_tilde: &DMatrix<C64>) -> f64 {
    linear_to_db(snr(h_tilde))
}
