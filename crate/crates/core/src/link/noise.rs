use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::ris::Phi;
use crate::{Error, Result, C64};

/// Noise powers of the RIS amplifiers and of the receiver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub sigma_v2: f64,
    pub sigma_z2: f64,
}

impl NoiseSpec {
    pub fn new(sigma_v2: f64, sigma_z2: f64) -> Result<Self> {
        let n = Self { sigma_v2, sigma_z2 };
        n.validate()?;
        Ok(n)
    }

    /// Receiver noise only.
    pub fn passive(sigma_z2: f64) -> Result<Self> {
        Self::new(0.0, sigma_z2)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_z2 > 0.0) || !self.sigma_z2.is_finite() {
            return Err(Error::invalid(format!("sigma_z2 must be > 0, got {}", self.sigma_z2)));
        }
        if !(self.sigma_v2 >= 0.0) || !self.sigma_v2.is_finite() {
            return Err(Error::invalid(format!("sigma_v2 must be >= 0, got {}", self.sigma_v2)));
        }
        Ok(())
    }
}

/// `R_v = σ_v² (H_am_r Φ)(H_am_r Φ)^H`.
pub fn ris_noise_cov(h_am_r: &DMatrix<C64>, phi: &Phi, sigma_v2: f64) -> Result<DMatrix<C64>> {
    if h_am_r.ncols() != phi.len() {
        return Err(Error::invalid(format!(
            "H_am_r has {} columns but Φ has {} entries",
            h_am_r.ncols(),
            phi.len()
        )));
    }
    let n_r = h_am_r.nrows();
    if sigma_v2 == 0.0 {
        return Ok(DMatrix::zeros(n_r, n_r));
    }
    let mut b = h_am_r.clone();
    for (k, p) in phi.diagonal().iter().enumerate() {
        for r in 0..n_r {
            b[(r, k)] *= p;
        }
    }
    Ok((&b * b.adjoint()) * C64::new(sigma_v2, 0.0))
}

/// Hermitian inverse square root through the eigendecomposition.
pub fn inv_sqrt_hermitian(r: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    if !r.is_square() {
        return Err(Error::invalid("covariance must be square"));
    }
    // symmetrise against round-off before decomposing
    let herm = (r + r.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let max = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if !min.is_finite() || !(min > max * 1e-13) || !(min > 0.0) {
        return Err(Error::SingularCovariance { min_eigenvalue: min });
    }
    let u = &eig.eigenvectors;
    let mut scaled = u.clone();
    for (j, lam) in eig.eigenvalues.iter().enumerate() {
        let s = C64::new(lam.sqrt().recip(), 0.0);
        for i in 0..scaled.nrows() {
            scaled[(i, j)] *= s;
        }
    }
    Ok(scaled * u.adjoint())
}

/// Channel after left-multiplication by `R_n^{-1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct WhitenedChannel {
    pub h_tilde: DMatrix<C64>,
}

pub fn whiten(h: &DMatrix<C64>, r_n: &DMatrix<C64>) -> Result<WhitenedChannel> {
    if r_n.nrows() != h.nrows() {
        return Err(Error::invalid(format!(
            "covariance is {}x{} but H has {} rows",
            r_n.nrows(),
            r_n.ncols(),
            h.nrows()
        )));
    }
    let w = inv_sqrt_hermitian(r_n)?;
    Ok(WhitenedChannel { h_tilde: w * h })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn cn(rng: &mut impl Rng, var: f64) -> C64 {
        let s = (var / 2.0).sqrt();
        C64::new(
            rng.sample::<f64, _>(StandardNormal) * s,
            rng.sample::<f64, _>(StandardNormal) * s,
        )
    }

    fn random_matrix(rng: &mut impl Rng, r: usize, c: usize) -> DMatrix<C64> {
        DMatrix::from_fn(r, c, |_, _| cn(rng, 1.0))
    }

    #[test]
    fn passive_noise_is_zero() {
        let mut rng = rng_from_seed(1);
        let h = random_matrix(&mut rng, 4, 3);
        let r = ris_noise_cov(&h, &Phi::from_diagonal(vec![C64::new(2.0, 0.0); 3]), 0.0).unwrap();
        assert!(r.iter().all(|v| *v == C64::new(0.0, 0.0)));
    }

    #[test]
    fn scalar_expansion() {
        let h = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
        let g = 2.5;
        let r = ris_noise_cov(&h, &Phi::from_diagonal(vec![C64::from_polar(g, 0.7)]), 0.3).unwrap();
        assert_relative_eq!(r[(0, 0)].re, 0.3 * g * g, epsilon = 1e-14);
        assert_relative_eq!(r[(0, 0)].im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn ris_noise_matches_monte_carlo() {
        let mut rng = rng_from_seed(17);
        let (n_r, k) = (3, 5);
        let h = random_matrix(&mut rng, n_r, k);
        let phi = Phi::from_diagonal((0..k).map(|i| C64::from_polar(1.8, i as f64)).collect());
        let sv2 = 0.4;
        let r = ris_noise_cov(&h, &phi, sv2).unwrap();
        let b = &h * phi.to_matrix();
        let n = 100_000;
        let mut emp = DMatrix::<C64>::zeros(n_r, n_r);
        for _ in 0..n {
            let v = nalgebra::DVector::from_fn(k, |_, _| cn(&mut rng, sv2));
            let x = &b * v;
            emp += &x * x.adjoint();
        }
        emp /= C64::new(n as f64, 0.0);
        let rel = (&emp - &r).norm() / r.norm();
        assert!(rel < 0.02, "relative Frobenius error {rel}");
    }

    #[test]
    fn scalar_whitening() {
        let mut rng = rng_from_seed(2);
        let h = random_matrix(&mut rng, 4, 4);
        let sz2 = 0.25;
        let r = DMatrix::<C64>::identity(4, 4) * C64::new(sz2, 0.0);
        let w = whiten(&h, &r).unwrap();
        assert_relative_eq!(
            (w.h_tilde - &h / C64::new(sz2.sqrt(), 0.0)).norm(),
            0.0,
            epsilon = 1e-12
        );
        let w = whiten(&h, &DMatrix::identity(4, 4)).unwrap();
        assert_relative_eq!((w.h_tilde - &h).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn inverse_square_root_identity() {
        let mut rng = rng_from_seed(3);
        let a = random_matrix(&mut rng, 4, 6);
        let r = &a * a.adjoint() * C64::new(0.7, 0.0) + DMatrix::identity(4, 4) * C64::new(0.1, 0.0);
        let w = inv_sqrt_hermitian(&r).unwrap();
        let id = &w * &r * w.adjoint();
        assert_relative_eq!((id - DMatrix::<C64>::identity(4, 4)).norm(), 0.0, epsilon = 1e-9);
        // Hermitian
        assert_relative_eq!((&w - w.adjoint()).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn singular_covariance_rejected() {
        let v = DMatrix::from_column_slice(2, 1, &[C64::new(1.0, 0.0), C64::new(0.0, 1.0)]);
        let r = &v * v.adjoint();
        assert!(matches!(inv_sqrt_hermitian(&r), Err(Error::SingularCovariance { .. })));
        assert!(matches!(
            inv_sqrt_hermitian(&DMatrix::zeros(3, 3)),
            Err(Error::SingularCovariance { .. })
        ));
    }

    #[test]
    fn noise_spec_validation() {
        assert!(NoiseSpec::new(0.0, 0.0).is_err());
        assert!(NoiseSpec::new(-1.0, 1.0).is_err());
        assert!(NoiseSpec::new(0.0, 1.0).is_ok());
    }
}
