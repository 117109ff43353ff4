use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::noise::{inv_sqrt_hermitian, NoiseSpec};
use super::qam::QamConstellation;
use crate::ris::Phi;
use crate::{Error, Result, C64};

fn cn_vector<R: Rng + ?Sized>(rng: &mut R, n: usize, var: f64) -> DVector<C64> {
    let s = (var / 2.0).sqrt();
    DVector::from_fn(n, |_, _| {
        C64::new(
            rng.sample::<f64, _>(StandardNormal) * s,
            rng.sample::<f64, _>(StandardNormal) * s,
        )
    })
}

/// `y = H s + H_am_r Φ v + z` with `v ~ CN(0, σ_v² I_K)` and
/// `z ~ CN(0, σ_z² I_{N_r})`. Pass `None` for `ris` when the RIS is absent.
pub fn transmit<R: Rng + ?Sized>(
    h: &DMatrix<C64>,
    ris: Option<(&DMatrix<C64>, &Phi)>,
    s: &DVector<C64>,
    noise: &NoiseSpec,
    rng: &mut R,
) -> Result<DVector<C64>> {
    if h.ncols() != s.len() {
        return Err(Error::invalid(format!(
            "H has {} columns but s has {} entries",
            h.ncols(),
            s.len()
        )));
    }
    let n_r = h.nrows();
    let mut y = h * s;
    if let Some((am_r, phi)) = ris {
        if am_r.nrows() != n_r || am_r.ncols() != phi.len() {
            return Err(Error::invalid("H_am_r / Φ dimensions do not match H"));
        }
        if noise.sigma_v2 > 0.0 {
            let mut v = cn_vector(rng, phi.len(), noise.sigma_v2);
            for (vk, p) in v.iter_mut().zip(phi.diagonal()) {
                *vk *= p;
            }
            y += am_r * v;
        }
    }
    if noise.sigma_z2 > 0.0 {
        y += cn_vector(rng, n_r, noise.sigma_z2);
    }
    Ok(y)
}

/// Per-stream estimates and hard decisions.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub estimates: Vec<C64>,
    pub labels: Vec<usize>,
}

impl Detection {
    /// Hard bits, stream-major, most significant first.
    pub fn bits(&self, q: &QamConstellation) -> Vec<u8> {
        self.labels.iter().flat_map(|&l| q.label_bits(l)).collect()
    }
}

/// Linear MMSE detection followed by per-stream hard slicing.
///
/// `ŝ = H^H (H H^H + R_n)^{-1} y`, then each stream is divided by its gain
/// `[H^H (H H^H + R_n)^{-1} H]_ii` so that higher-order QAM is sliced on an
/// unbiased estimate. Streams with zero gain are left at zero.
pub fn lmmse_detect(y: &DVector<C64>, h: &DMatrix<C64>, r_n: &DMatrix<C64>, q: &QamConstellation) -> Result<Detection> {
    let n_r = h.nrows();
    if y.len() != n_r || r_n.shape() != (n_r, n_r) {
        return Err(Error::invalid("y, H and R_n dimensions disagree"));
    }
    let a = h * h.adjoint() + r_n;
    let ch = Cholesky::new(a).ok_or_else(|| Error::DetectionFailure("H H^H + R_n is not positive definite".into()))?;
    let t = ch.solve(y);
    let g = ch.solve(h);
    let mut est = h.adjoint() * t;
    let gain = h.adjoint() * g;
    for i in 0..est.len() {
        let mu = gain[(i, i)].re;
        if mu > 1e-12 {
            est[i] /= mu;
        }
    }
    if est.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::DetectionFailure("non-finite symbol estimate".into()));
    }
    let labels = est.iter().map(|&z| q.slice(z)).collect();
    Ok(Detection {
        estimates: est.iter().cloned().collect(),
        labels,
    })
}

/// Exhaustive maximum-likelihood detection, minimising
/// `‖R_n^{-1/2}(y − H s)‖²` over all `M^{N_t}` symbol vectors. Limited to
/// small problems (at most 4096 hypotheses).
pub fn ml_detect(y: &DVector<C64>, h: &DMatrix<C64>, r_n: &DMatrix<C64>, q: &QamConstellation) -> Result<Detection> {
    let n_t = h.ncols();
    let m = q.order();
    let total = (m as u64)
        .checked_pow(n_t as u32)
        .filter(|&t| t <= 4096)
        .ok_or_else(|| Error::invalid(format!("ML search over {m}^{n_t} hypotheses is too large")))?;
    let w = inv_sqrt_hermitian(r_n)?;
    let yw = &w * y;
    let hw = &w * h;
    let mut best = (f64::INFINITY, vec![0usize; n_t]);
    let mut labels = vec![0usize; n_t];
    for idx in 0..total {
        let mut rem = idx;
        for l in labels.iter_mut() {
            *l = (rem % m as u64) as usize;
            rem /= m as u64;
        }
        let s = DVector::from_iterator(n_t, labels.iter().map(|&l| q.map(l)));
        let d = (&yw - &hw * s).norm_squared();
        if d < best.0 {
            best = (d, labels.clone());
        }
    }
    Ok(Detection {
        estimates: best.1.iter().map(|&l| q.map(l)).collect(),
        labels: best.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;
    use approx::assert_relative_eq;

    #[test]
    fn noiseless_identity_recovers_symbols() {
        let q = QamConstellation::new(64).unwrap();
        let h = DMatrix::<C64>::identity(4, 4);
        let mut rng = rng_from_seed(1);
        let noise = NoiseSpec {
            sigma_v2: 0.0,
            sigma_z2: 0.0,
        };
        let r_n = DMatrix::<C64>::identity(4, 4) * C64::new(1e-12, 0.0);
        for _ in 0..200 {
            let labels: Vec<usize> = (0..4).map(|_| rng.random_range(0..64)).collect();
            let s = DVector::from_iterator(4, labels.iter().map(|&l| q.map(l)));
            let y = transmit(&h, None, &s, &noise, &mut rng).unwrap();
            assert_eq!(y, s);
            let d = lmmse_detect(&y, &h, &r_n, &q).unwrap();
            assert_eq!(d.labels, labels);
        }
    }

    #[test]
    fn receiver_noise_only_when_channel_is_zero() {
        let h = DMatrix::<C64>::zeros(2, 2);
        let am_r = DMatrix::<C64>::zeros(2, 3);
        let phi = Phi::zeros(3);
        let s = DVector::from_element(2, C64::new(1.0, 0.0));
        let noise = NoiseSpec {
            sigma_v2: 1.0,
            sigma_z2: 0.3,
        };
        let mut rng = rng_from_seed(4);
        let n = 50_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let y = transmit(&h, Some((&am_r, &phi)), &s, &noise, &mut rng).unwrap();
            acc += y.norm_squared();
        }
        let var = acc / (2 * n) as f64;
        assert_relative_eq!(var, 0.3, max_relative = 0.02);
    }

    #[test]
    fn deterministic_per_seed() {
        let h = DMatrix::<C64>::identity(2, 2);
        let s = DVector::from_element(2, C64::new(1.0, 0.0));
        let noise = NoiseSpec {
            sigma_v2: 0.0,
            sigma_z2: 0.1,
        };
        let a = transmit(&h, None, &s, &noise, &mut rng_from_seed(9)).unwrap();
        let b = transmit(&h, None, &s, &noise, &mut rng_from_seed(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn dimension_checks() {
        let h = DMatrix::<C64>::identity(2, 2);
        let s = DVector::from_element(3, C64::new(1.0, 0.0));
        let noise = NoiseSpec {
            sigma_v2: 0.0,
            sigma_z2: 0.1,
        };
        assert!(transmit(&h, None, &s, &noise, &mut rng_from_seed(1)).is_err());
        let q = QamConstellation::new(4).unwrap();
        let y = DVector::from_element(3, C64::new(0.0, 0.0));
        assert!(lmmse_detect(&y, &h, &DMatrix::identity(2, 2), &q).is_err());
    }

    #[test]
    fn singular_system_fails_detection() {
        let q = QamConstellation::new(4).unwrap();
        let h = DMatrix::<C64>::zeros(2, 2);
        let y = DVector::from_element(2, C64::new(0.0, 0.0));
        assert!(matches!(
            lmmse_detect(&y, &h, &DMatrix::zeros(2, 2), &q),
            Err(Error::DetectionFailure(_))
        ));
    }

    #[test]
    fn ml_matches_noiseless_truth() {
        let q = QamConstellation::new(4).unwrap();
        let mut rng = rng_from_seed(3);
        let h = DMatrix::from_fn(2, 2, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let r = DMatrix::<C64>::identity(2, 2) * C64::new(1e-6, 0.0);
        for l0 in 0..4 {
            for l1 in 0..4 {
                let s = DVector::from_vec(vec![q.map(l0), q.map(l1)]);
                let d = ml_detect(&(&h * &s), &h, &r, &q).unwrap();
                assert_eq!(d.labels, vec![l0, l1]);
            }
        }
        let big = QamConstellation::new(256).unwrap();
        assert!(ml_detect(&DVector::zeros(2), &h, &r, &big).is_err());
    }
}
