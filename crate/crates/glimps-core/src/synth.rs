//! Seeded synthetic instances: gaussian basis and coefficients, added
//! gaussian noise, and per-coordinate outlier replacement.
//!
//! Draw order is fixed so that equal seeds give bit-identical
//! instances: the basis, coefficients, noise, and outlier decisions
//! each come from their own substream of the seed, which keeps
//! instances paired across noise levels (same subspace, same outlier
//! pattern) when only `sigma` changes.

use alloc::vec::Vec;

use crate::linalg::{Matrix, Vector};
use crate::rng::{derive_seed, Xoshiro256PlusPlus};
use crate::{Error, Result};

const STREAM_BASIS: u64 = 0x42415349;
const STREAM_COEF: u64 = 0x434f4546;
const STREAM_NOISE: u64 = 0x4e4f4953;
const STREAM_OUTLIER: u64 = 0x4f555433;

/// Parameters of one synthetic instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceSpec {
    /// Ambient dimension.
    pub d: usize,
    /// Subspace dimension.
    pub r: usize,
    /// Outlier probability per coordinate.
    pub p: f64,
    /// Inlier noise standard deviation.
    pub sigma: f64,
    /// Reproducibility key.
    pub seed: u64,
}

impl InstanceSpec {
    pub fn new(d: usize, r: usize, p: f64, sigma: f64, seed: u64) -> Result<Self> {
        if r == 0 || r >= d {
            return Err(Error::Config("need 0 < r < d"));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Config("outlier probability must lie in [0, 1]"));
        }
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(Error::Config("sigma must be finite and nonnegative"));
        }
        Ok(Self { d, r, p, sigma, seed })
    }
}

/// A generated instance with its ground truth.
#[derive(Debug, Clone)]
pub struct Instance {
    pub u: Matrix,
    pub x: Vector,
    pub theta_true: Vector,
    /// `true` where the coordinate was replaced by an outlier.
    pub outlier_mask: Vec<bool>,
}

impl Instance {
    pub fn num_outliers(&self) -> usize {
        self.outlier_mask.iter().filter(|&&m| m).count()
    }

    /// Indices of the true inliers (zero-based).
    pub fn true_inliers(&self) -> Vec<usize> {
        self.outlier_mask.iter().enumerate().filter(|(_, &m)| !m).map(|(i, _)| i).collect()
    }
}

/// Generates the instance determined by `spec`; a pure function.
pub fn generate(spec: &InstanceSpec) -> Instance {
    let d = spec.d;
    let r = spec.r;
    let mut rng_basis = Xoshiro256PlusPlus::seed_from_u64(derive_seed(spec.seed, &[STREAM_BASIS]));
    let mut rng_coef = Xoshiro256PlusPlus::seed_from_u64(derive_seed(spec.seed, &[STREAM_COEF]));
    let mut rng_noise = Xoshiro256PlusPlus::seed_from_u64(derive_seed(spec.seed, &[STREAM_NOISE]));
    let mut rng_outlier =
        Xoshiro256PlusPlus::seed_from_u64(derive_seed(spec.seed, &[STREAM_OUTLIER]));

    let mut u_data = Vec::with_capacity(d * r);
    for _ in 0..d * r {
        u_data.push(rng_basis.next_normal());
    }
    let u = Matrix::from_vec(d, r, u_data).expect("gaussian entries are finite");

    let theta_true =
        Vector::new((0..r).map(|_| rng_coef.next_normal()).collect()).expect("nonempty");

    let mut x = u.mul_vec(&theta_true).expect("shapes match");
    for i in 0..d {
        let eps = rng_noise.next_normal();
        x.set(i, x.get(i) + spec.sigma * eps);
    }

    let mut outlier_mask = Vec::with_capacity(d);
    for i in 0..d {
        let is_outlier = rng_outlier.next_bool(spec.p);
        if is_outlier {
            x.set(i, rng_outlier.next_normal());
        }
        outlier_mask.push(is_outlier);
    }

    Instance { u, x, theta_true, outlier_mask }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_instance_fits_exactly() {
        let spec = InstanceSpec::new(20, 3, 0.0, 0.0, 7).unwrap();
        let inst = generate(&spec);
        assert_eq!(inst.num_outliers(), 0);
        let fit = inst.u.mul_vec(&inst.theta_true).unwrap();
        for i in 0..20 {
            assert!((fit.get(i) - inst.x.get(i)).abs() < 1e-12);
        }
    }

    #[test]
    fn p_one_replaces_everything() {
        let spec = InstanceSpec::new(10, 2, 1.0, 0.0, 3).unwrap();
        let inst = generate(&spec);
        assert_eq!(inst.num_outliers(), 10);
    }

    #[test]
    fn same_seed_same_instance() {
        let spec = InstanceSpec::new(30, 4, 0.4, 1e-3, 99).unwrap();
        let a = generate(&spec);
        let b = generate(&spec);
        assert_eq!(a.u, b.u);
        assert_eq!(a.x, b.x);
        assert_eq!(a.theta_true, b.theta_true);
        assert_eq!(a.outlier_mask, b.outlier_mask);
    }

    #[test]
    fn sigma_change_keeps_subspace_and_mask() {
        let lo = generate(&InstanceSpec::new(25, 3, 0.3, 1e-9, 5).unwrap());
        let hi = generate(&InstanceSpec::new(25, 3, 0.3, 1e-1, 5).unwrap());
        assert_eq!(lo.u, hi.u);
        assert_eq!(lo.theta_true, hi.theta_true);
        assert_eq!(lo.outlier_mask, hi.outlier_mask);
    }

    #[test]
    fn mask_frequency_tracks_p() {
        let mut total = 0usize;
        let trials = 400;
        let d = 50;
        for seed in 0..trials {
            let spec = InstanceSpec::new(d, 2, 0.5, 0.0, seed).unwrap();
            total += generate(&spec).num_outliers();
        }
        let freq = total as f64 / (trials as usize * d) as f64;
        // Binomial(20000, 0.5): four sigma is about 0.014.
        assert!((freq - 0.5).abs() < 0.015, "freq {freq}");
    }

    #[test]
    fn spec_validation() {
        assert!(InstanceSpec::new(5, 5, 0.1, 0.0, 1).is_err());
        assert!(InstanceSpec::new(5, 0, 0.1, 0.0, 1).is_err());
        assert!(InstanceSpec::new(5, 2, 1.5, 0.0, 1).is_err());
        assert!(InstanceSpec::new(5, 2, 0.5, -1.0, 1).is_err());
    }
}
