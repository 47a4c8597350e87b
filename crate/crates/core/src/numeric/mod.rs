//! Numerical verification layer: rank oracles, spectral radius, centralized
//! Kalman Monte-Carlo and the distributed estimator.

mod distributed;
mod kalman;

pub use distributed::{build_dh, distributed_estimator, error_matrix, DistributedSetup};
pub use kalman::{is_plateau, kalman_gains, kalman_mc, KalmanSchedule, LinearSystem, SimConfig, SimResult, SimSummary};

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::structmat::WeightedMatrix;

/// Matrices up to this size use a dense eigensolve for the spectral radius.
pub const DENSE_EIGEN_LIMIT: usize = 64;

/// Numeric rank from singular values, tolerance `max(rows, cols) * eps * sigma_max`.
pub fn numeric_rank(m: &DMatrix<f64>) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    let tol = m.nrows().max(m.ncols()) as f64 * f64::EPSILON * max;
    sv.iter().filter(|&&s| s > tol).count()
}

/// Rank of `[H; HA; ...; HA^(m-1)]`. Each block is rescaled to unit Frobenius norm
/// before the next power is formed, which leaves its row space unchanged.
pub fn observability_rank(a: &WeightedMatrix, h: &WeightedMatrix) -> Result<usize> {
    let m = a.rows();
    if a.cols() != m {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if h.cols() != m {
        return Err(Error::DimensionMismatch(format!(
            "output matrix has {} columns, state dimension is {m}",
            h.cols()
        )));
    }
    if m == 0 {
        return Ok(0);
    }
    let p = h.rows();
    if p == 0 {
        return Ok(0);
    }
    let mut stacked = DMatrix::zeros(p * m, m);
    let mut block = h.matrix().clone();
    for k in 0..m {
        let norm = block.norm();
        if norm > 0.0 {
            block /= norm;
        }
        stacked.rows_mut(k * p, p).copy_from(&block);
        block = &block * a.matrix();
    }
    let sv = stacked.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let tol = m as f64 * f64::EPSILON * max;
    Ok(sv.iter().filter(|&&s| s > tol && max > 0.0).count())
}

/// Rank of `[B, AB, ..., A^(m-1)B]` via the dual observability test.
pub fn controllability_rank(a: &WeightedMatrix, b: &WeightedMatrix) -> Result<usize> {
    observability_rank(
        &WeightedMatrix::new(a.matrix().transpose()),
        &WeightedMatrix::new(b.matrix().transpose()),
    )
}

/// Largest eigenvalue modulus. Dense eigensolve up to [`DENSE_EIGEN_LIMIT`],
/// subspace iteration beyond.
pub fn spectral_radius(a: &WeightedMatrix) -> Result<f64> {
    if a.rows() != a.cols() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if a.rows() <= DENSE_EIGEN_LIMIT {
        Ok(dense_spectral_radius(a.matrix()))
    } else {
        Ok(subspace_spectral_radius(a.matrix(), 0))
    }
}

pub fn dense_spectral_radius(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Orthogonal (block power) iteration with Rayleigh-Ritz extraction. Restarts
/// from a fresh random block when the iterate collapses to zero.
pub fn subspace_spectral_radius(a: &DMatrix<f64>, seed: u64) -> f64 {
    let m = a.nrows();
    if m == 0 {
        return 0.0;
    }
    let block = m.min(8);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_block = |rng: &mut ChaCha8Rng| {
        DMatrix::from_fn(m, block, |_, _| StandardNormal.sample(rng))
    };
    let mut q = random_block(&mut rng).qr().q();
    let mut estimate = f64::NAN;
    let mut restarts = 0;
    for iter in 0..20_000 {
        let z = a * &q;
        if z.norm() == 0.0 {
            if restarts > 3 {
                return 0.0;
            }
            restarts += 1;
            q = random_block(&mut rng).qr().q();
            continue;
        }
        q = z.qr().q();
        if iter % 10 == 9 {
            let ritz = q.transpose() * a * &q;
            let next = dense_spectral_radius(&ritz);
            if (next - estimate).abs() <= 1e-13 * next.max(f64::MIN_POSITIVE) {
                return next;
            }
            estimate = next;
        }
    }
    estimate
}

/// Rescales `a` so its spectral radius equals `target`.
pub fn scale_to_spectral_radius(a: &WeightedMatrix, target: f64) -> Result<WeightedMatrix> {
    let rho = spectral_radius(a)?;
    if rho == 0.0 {
        return Err(Error::InvalidConfig(
            "cannot rescale a nilpotent matrix to a nonzero spectral radius".into(),
        ));
    }
    Ok(a.scaled(target / rho))
}

pub(crate) fn standard_normal_vector(rng: &mut ChaCha8Rng, len: usize, std: f64) -> DVector<f64> {
    DVector::from_fn(len, |_, _| {
        let z: f64 = StandardNormal.sample(rng);
        std * z
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structmat::{random_pattern, random_weights, Pattern, WeightRange};

    #[test]
    fn spectral_radius_examples() {
        let id = WeightedMatrix::new(DMatrix::identity(3, 3));
        assert!((spectral_radius(&id).unwrap() - 1.0).abs() < 1e-12);
        let d = WeightedMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 2.0])));
        assert!((spectral_radius(&d).unwrap() - 2.0).abs() < 1e-12);
        assert!(spectral_radius(&WeightedMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn subspace_iteration_matches_dense_eigensolve() {
        let factor = Pattern::from_edges(3, [(0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (2, 0)]).unwrap();
        let replica = Pattern::from_edges(4, [(0, 1), (1, 0), (0, 2), (2, 0), (0, 3), (3, 3)]).unwrap();
        let composite = factor.kronecker(&replica).unwrap();
        for seed in 0..10 {
            let w = random_weights(&composite, seed, WeightRange::default()).unwrap();
            let dense = dense_spectral_radius(w.matrix());
            let iterative = subspace_spectral_radius(w.matrix(), seed);
            assert!(
                (dense - iterative).abs() <= 1e-6 * dense,
                "seed {seed}: dense {dense} vs iterative {iterative}"
            );
        }
    }

    #[test]
    fn large_matrices_take_the_iterative_route() {
        let p = random_pattern(80, 0.05, 5).unwrap();
        let w = random_weights(&p, 6, WeightRange::default()).unwrap();
        let rho = spectral_radius(&w).unwrap();
        let dense = dense_spectral_radius(w.matrix());
        assert!((rho - dense).abs() <= 1e-6 * dense);
    }

    #[test]
    fn observability_rank_examples() {
        let a = WeightedMatrix::new(DMatrix::identity(2, 2));
        let h = WeightedMatrix::new(DMatrix::from_row_slice(1, 2, &[1.0, 0.0]));
        assert_eq!(observability_rank(&a, &h).unwrap(), 1);

        // chain 0 -> 1 -> 2 measured at the sink: [e2; e2 A; e2 A^2] = anti-diagonal
        let mut chain = DMatrix::zeros(3, 3);
        chain[(1, 0)] = 0.7;
        chain[(2, 1)] = -1.3;
        let sink = WeightedMatrix::new(DMatrix::from_row_slice(1, 3, &[0.0, 0.0, 1.0]));
        assert_eq!(observability_rank(&WeightedMatrix::new(chain.clone()), &sink).unwrap(), 3);
        let source = WeightedMatrix::new(DMatrix::from_row_slice(1, 3, &[1.0, 0.0, 0.0]));
        assert_eq!(observability_rank(&WeightedMatrix::new(chain), &source).unwrap(), 1);
    }

    #[test]
    fn observability_rank_survives_large_spectral_radius() {
        let mut a = DMatrix::zeros(6, 6);
        for i in 0..6 {
            a[(i, i)] = 50.0 + i as f64;
            if i > 0 {
                a[(i, i - 1)] = 1.0;
            }
        }
        let mut h = DMatrix::zeros(1, 6);
        h[(0, 5)] = 1.0;
        let rank = observability_rank(&WeightedMatrix::new(a), &WeightedMatrix::new(h)).unwrap();
        assert_eq!(rank, 6);
    }

    #[test]
    fn rescaling_hits_the_target_radius() {
        let p = Pattern::cycle(5);
        let w = random_weights(&p, 1, WeightRange::default()).unwrap();
        let scaled = scale_to_spectral_radius(&w, 1.93).unwrap();
        assert!((spectral_radius(&scaled).unwrap() - 1.93).abs() < 1e-9);
        let nilpotent = random_weights(&Pattern::from_edges(2, [(0, 1)]).unwrap(), 1, WeightRange::default()).unwrap();
        assert!(scale_to_spectral_radius(&nilpotent, 1.0).is_err());
    }
}
