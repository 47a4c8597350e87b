use nalgebra::{DMatrix, DVector};

use super::kalman::{invert_or_pinv, SimConfig, SimResult};
use super::{dense_spectral_radius, spectral_radius, standard_normal_vector};
use crate::error::{Error, Result};
use crate::structmat::WeightedMatrix;

/// Networked estimator: `N` agents communicating over `w` each estimate the full
/// state of the `n`-node system `a`, agent `j` observing through `h[j]`.
#[derive(Clone, Debug)]
pub struct DistributedSetup {
    pub w: WeightedMatrix,
    pub a: WeightedMatrix,
    pub h: Vec<WeightedMatrix>,
    /// Block-diagonal `nN x nN` gain. `None` lets every agent run its own
    /// covariance recursion on the fused innovation.
    pub gain: Option<WeightedMatrix>,
    pub process_std: f64,
    pub measurement_std: f64,
}

impl DistributedSetup {
    pub fn agents(&self) -> usize {
        self.w.rows()
    }

    pub fn states(&self) -> usize {
        self.a.rows()
    }

    pub fn validate(&self) -> Result<()> {
        let (big_n, n) = (self.agents(), self.states());
        if self.w.cols() != big_n {
            return Err(Error::NotSquare {
                rows: self.w.rows(),
                cols: self.w.cols(),
            });
        }
        if self.a.cols() != n {
            return Err(Error::NotSquare {
                rows: self.a.rows(),
                cols: self.a.cols(),
            });
        }
        if self.h.len() != big_n {
            return Err(Error::DimensionMismatch(format!(
                "{} measurement matrices for {big_n} agents",
                self.h.len()
            )));
        }
        if let Some(j) = self.h.iter().position(|h| h.cols() != n) {
            return Err(Error::DimensionMismatch(format!(
                "agent {j} measurement matrix has {} columns, system has {n} states",
                self.h[j].cols()
            )));
        }
        if let Some(k) = &self.gain {
            if k.rows() != big_n * n || k.cols() != big_n * n {
                return Err(Error::DimensionMismatch(format!(
                    "gain is {}x{}, expected {}x{}",
                    k.rows(),
                    k.cols(),
                    big_n * n,
                    big_n * n
                )));
            }
        }
        if !(self.process_std >= 0.0 && self.measurement_std >= 0.0) {
            return Err(Error::InvalidConfig("noise standard deviations must be >= 0".into()));
        }
        Ok(())
    }

    /// Agents `j` with `W_ij != 0`.
    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.agents()).filter(|&j| self.w.get(i, j) != 0.0).collect()
    }

    /// Fused information matrix of agent `i`: the sum of `H_jᵀ H_j` over its neighbours.
    fn fused_information(&self, i: usize) -> DMatrix<f64> {
        let n = self.states();
        self.neighbors(i)
            .into_iter()
            .fold(DMatrix::zeros(n, n), |acc, j| {
                let h = self.h[j].matrix();
                acc + h.transpose() * h
            })
    }

    fn system(&self) -> DMatrix<f64> {
        self.w.matrix().kronecker(self.a.matrix())
    }
}

/// Block-diagonal global measurement matrix; block `i` is `Σ_{j ∈ N(i)} H_jᵀ H_j`.
pub fn build_dh(setup: &DistributedSetup) -> Result<WeightedMatrix> {
    setup.validate()?;
    let n = setup.states();
    let big_n = setup.agents();
    let mut dh = DMatrix::zeros(big_n * n, big_n * n);
    for i in 0..big_n {
        dh.view_mut((i * n, i * n), (n, n))
            .copy_from(&setup.fused_information(i));
    }
    Ok(WeightedMatrix::new(dh))
}

/// Error propagation matrix `(W ⊗ A) - K D_H (W ⊗ A)` for the given gain.
pub fn error_matrix(setup: &DistributedSetup, gain: &WeightedMatrix) -> Result<WeightedMatrix> {
    let dh = build_dh(setup)?;
    let wa = setup.system();
    if gain.rows() != wa.nrows() || gain.cols() != wa.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "gain is {}x{}, expected {}x{}",
            gain.rows(),
            gain.cols(),
            wa.nrows(),
            wa.nrows()
        )));
    }
    Ok(WeightedMatrix::new(&wa - gain.matrix() * dh.matrix() * &wa))
}

/// Per-step block gains `K_k^i`.
fn gain_schedule(setup: &DistributedSetup, steps: usize, initial_std: f64) -> Vec<Vec<DMatrix<f64>>> {
    let n = setup.states();
    let big_n = setup.agents();
    if let Some(k) = &setup.gain {
        let blocks: Vec<DMatrix<f64>> = (0..big_n)
            .map(|i| k.matrix().view((i * n, i * n), (n, n)).into_owned())
            .collect();
        return vec![blocks; steps];
    }

    // Local recursion: the fused innovation Σ H_jᵀ(y_j - H_j x̂) has information
    // matrix D_i and noise covariance σ² D_i, for which K = P (σ² I + D_i P)⁻¹
    // reproduces the Kalman update.
    let a = setup.a.matrix();
    let q = DMatrix::<f64>::identity(n, n) * setup.process_std.powi(2);
    let r = setup.measurement_std.powi(2);
    let eye = DMatrix::<f64>::identity(n, n);
    let fused: Vec<DMatrix<f64>> = (0..big_n).map(|i| setup.fused_information(i)).collect();
    let mut cov: Vec<DMatrix<f64>> = vec![eye.clone() * initial_std.powi(2); big_n];
    let mut schedule = Vec::with_capacity(steps);
    for _ in 0..steps {
        let mut blocks = Vec::with_capacity(big_n);
        for i in 0..big_n {
            let pred = a * &cov[i] * a.transpose() + &q;
            let k = &pred * invert_or_pinv_general(&(&eye * r + &fused[i] * &pred));
            let mut post = (&eye - &k * &fused[i]) * &pred;
            post = (&post + post.transpose()) * 0.5;
            cov[i] = post;
            blocks.push(k);
        }
        schedule.push(blocks);
    }
    schedule
}

/// `D P` is not symmetric, so Cholesky does not apply; fall back to the
/// pseudo-inverse only when LU fails.
fn invert_or_pinv_general(m: &DMatrix<f64>) -> DMatrix<f64> {
    match m.clone().try_inverse() {
        Some(inv) if inv.iter().all(|v| v.is_finite()) => inv,
        _ => invert_or_pinv(&(m.transpose() * m)) * m.transpose(),
    }
}

/// Monte-Carlo run of the prediction-fusion / observation-fusion estimator.
///
/// Per step, agent `i` predicts `Σ_j W_ij A x̂ʲ` and corrects with
/// `K^i Σ_{j ∈ N(i)} H_jᵀ (y_j - H_j x̂ⁱ)`. MSEE is taken over the stacked error of
/// all agents. `spectral_radius` reports the error matrix at the final gain.
pub fn distributed_estimator(setup: &DistributedSetup, cfg: &SimConfig) -> Result<SimResult> {
    setup.validate()?;
    cfg.validate()?;
    let n = setup.states();
    let big_n = setup.agents();
    let a = setup.a.matrix();
    let w = setup.w.matrix();
    let schedule = gain_schedule(setup, cfg.steps, cfg.initial_std);
    let neighbors: Vec<Vec<usize>> = (0..big_n).map(|i| setup.neighbors(i)).collect();

    let trials = cfg.run_trials(|trial| {
        let mut rng = cfg.trial_rng(trial);
        let mut x = standard_normal_vector(&mut rng, n, cfg.initial_std);
        let mut est: Vec<DVector<f64>> = vec![DVector::zeros(n); big_n];
        let mut errors = Vec::with_capacity(cfg.steps);
        let mut norms = Vec::with_capacity(cfg.steps);
        for gains in &schedule {
            let v = standard_normal_vector(&mut rng, n, setup.process_std);
            x = a * &x + v;
            let y: Vec<DVector<f64>> = setup
                .h
                .iter()
                .map(|h| {
                    let noise = standard_normal_vector(&mut rng, h.rows(), setup.measurement_std);
                    h.matrix() * &x + noise
                })
                .collect();

            let propagated: Vec<DVector<f64>> = est.iter().map(|e| a * e).collect();
            let mut next = Vec::with_capacity(big_n);
            let mut err = 0.0;
            for i in 0..big_n {
                let mut pred = DVector::zeros(n);
                for j in 0..big_n {
                    let wij = w[(i, j)];
                    if wij != 0.0 {
                        pred += &propagated[j] * wij;
                    }
                }
                let mut fused = DVector::zeros(n);
                for &j in &neighbors[i] {
                    let h = setup.h[j].matrix();
                    fused += h.transpose() * (&y[j] - h * &pred);
                }
                let updated = &pred + &gains[i] * fused;
                err += (&x - &updated).norm_squared();
                next.push(updated);
            }
            est = next;
            let err = err / (big_n * n).max(1) as f64;
            errors.push(if err.is_finite() { err } else { f64::INFINITY });
            let norm = x.norm();
            norms.push(if norm.is_finite() { norm } else { f64::INFINITY });
        }
        (errors, norms)
    })?;

    let rho = match schedule.last() {
        Some(blocks) => {
            let mut k = DMatrix::zeros(big_n * n, big_n * n);
            for (i, b) in blocks.iter().enumerate() {
                k.view_mut((i * n, i * n), (n, n)).copy_from(b);
            }
            let em = error_matrix(setup, &WeightedMatrix::new(k))?;
            if em.rows() <= super::DENSE_EIGEN_LIMIT {
                dense_spectral_radius(em.matrix())
            } else {
                spectral_radius(&em)?
            }
        }
        None => 0.0,
    };
    Ok(SimResult::from_trials(trials, cfg.steps, rho))
}
