use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{spectral_radius, standard_normal_vector};
use crate::error::{Error, Result};
use crate::structmat::WeightedMatrix;

/// `x(k+1) = A x(k) + v(k)`, `y(k) = H x(k) + w(k)` with isotropic Gaussian noise.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    pub a: WeightedMatrix,
    pub h: WeightedMatrix,
    pub process_std: f64,
    pub measurement_std: f64,
}

impl LinearSystem {
    pub fn new(a: WeightedMatrix, h: WeightedMatrix, process_std: f64, measurement_std: f64) -> Result<Self> {
        if a.rows() != a.cols() {
            return Err(Error::NotSquare {
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        if h.cols() != a.rows() {
            return Err(Error::DimensionMismatch(format!(
                "output matrix has {} columns, state dimension is {}",
                h.cols(),
                a.rows()
            )));
        }
        if !(process_std >= 0.0 && measurement_std >= 0.0) {
            return Err(Error::InvalidConfig("noise standard deviations must be >= 0".into()));
        }
        Ok(Self {
            a,
            h,
            process_std,
            measurement_std,
        })
    }

    pub fn states(&self) -> usize {
        self.a.rows()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub steps: usize,
    pub trials: usize,
    pub seed: u64,
    pub initial_std: f64,
    /// Worker cap for the trial loop; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            steps: 200,
            trials: 1000,
            seed: 0,
            initial_std: 1.0,
            threads: None,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 || self.trials == 0 {
            return Err(Error::InvalidConfig("steps and trials must be >= 1".into()));
        }
        if self.initial_std.is_nan() || self.initial_std < 0.0 {
            return Err(Error::InvalidConfig("initial std must be >= 0".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidConfig("thread count must be >= 1".into()));
        }
        Ok(())
    }

    /// Random stream for one trial: the seed fixes the key, the trial index the stream.
    pub(crate) fn trial_rng(&self, trial: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial as u64);
        rng
    }

    /// Runs `f` for every trial (possibly in parallel) and returns results in trial order.
    pub(crate) fn run_trials<T, F>(&self, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize) -> T + Send + Sync,
    {
        match self.threads {
            None => Ok((0..self.trials).into_par_iter().map(&f).collect()),
            Some(threads) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .map_err(|e| Error::InvalidConfig(e.to_string()))?;
                Ok(pool.install(|| (0..self.trials).into_par_iter().map(&f).collect()))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimResult {
    /// `msee[k - 1]` is the mean over trials of `|x(k) - x̂(k|k)|² / m`, `k = 1..=steps`.
    pub msee: Vec<f64>,
    /// Mean over trials of the true state norm `|x(k)|`, same indexing.
    pub state_norm: Vec<f64>,
    pub spectral_radius: f64,
    pub bounded: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimSummary {
    pub rho: f64,
    pub bounded: bool,
    pub final_msee: f64,
    pub steps: usize,
}

impl SimResult {
    pub(crate) fn from_trials(trials: Vec<(Vec<f64>, Vec<f64>)>, steps: usize, spectral_radius: f64) -> Self {
        let count = trials.len() as f64;
        let mut msee = vec![0.0; steps];
        let mut state_norm = vec![0.0; steps];
        for (errors, norms) in &trials {
            for k in 0..steps {
                msee[k] += errors[k];
                state_norm[k] += norms[k];
            }
        }
        for v in msee.iter_mut().chain(state_norm.iter_mut()) {
            *v = if v.is_finite() { *v / count } else { f64::INFINITY };
        }
        let bounded = is_plateau(&msee);
        Self {
            msee,
            state_norm,
            spectral_radius,
            bounded,
        }
    }

    pub fn summary(&self) -> SimSummary {
        SimSummary {
            rho: self.spectral_radius,
            bounded: self.bounded,
            final_msee: self.msee.last().copied().unwrap_or(0.0),
            steps: self.msee.len(),
        }
    }

    /// `step,msee` rows, one per step starting at 1.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,msee\n");
        for (k, v) in self.msee.iter().enumerate() {
            out.push_str(&format!("{},{}\n", k + 1, v));
        }
        out
    }
}

/// Tail-plateau boundedness: over the last quarter of the series, the maximum
/// stays within 3x the median. Non-finite values fail.
pub fn is_plateau(series: &[f64]) -> bool {
    if series.is_empty() {
        return true;
    }
    if series.iter().any(|v| !v.is_finite()) {
        return false;
    }
    let tail_len = (series.len() / 4).max(1);
    let mut tail = series[series.len() - tail_len..].to_vec();
    tail.sort_by(f64::total_cmp);
    let median = if tail_len % 2 == 1 {
        tail[tail_len / 2]
    } else {
        0.5 * (tail[tail_len / 2 - 1] + tail[tail_len / 2])
    };
    let max = tail[tail_len - 1];
    max <= 3.0 * median
}

/// Gain and posterior covariance per step. The Riccati recursion does not depend
/// on the data, so it is shared by every trial.
#[derive(Clone, Debug)]
pub struct KalmanSchedule {
    pub gains: Vec<DMatrix<f64>>,
    pub covariances: Vec<DMatrix<f64>>,
}

pub fn kalman_gains(sys: &LinearSystem, steps: usize, initial_std: f64) -> KalmanSchedule {
    let m = sys.states();
    let p_out = sys.h.rows();
    let a = sys.a.matrix();
    let h = sys.h.matrix();
    let q = DMatrix::<f64>::identity(m, m) * sys.process_std.powi(2);
    let r = DMatrix::<f64>::identity(p_out, p_out) * sys.measurement_std.powi(2);
    let eye = DMatrix::<f64>::identity(m, m);

    let mut p = DMatrix::<f64>::identity(m, m) * initial_std.powi(2);
    let mut gains = Vec::with_capacity(steps);
    let mut covariances = Vec::with_capacity(steps);
    for _ in 0..steps {
        let pred = a * &p * a.transpose() + &q;
        let s = h * &pred * h.transpose() + &r;
        let s_inv = invert_or_pinv(&s);
        let k = &pred * h.transpose() * s_inv;
        let ikh = &eye - &k * h;
        // Joseph form keeps the update symmetric positive semidefinite.
        let mut post = &ikh * &pred * ikh.transpose() + &k * &r * k.transpose();
        post = (&post + post.transpose()) * 0.5;
        gains.push(k);
        covariances.push(post.clone());
        p = post;
    }
    KalmanSchedule { gains, covariances }
}

pub(crate) fn invert_or_pinv(s: &DMatrix<f64>) -> DMatrix<f64> {
    if s.is_empty() {
        return s.clone();
    }
    if let Some(chol) = s.clone().cholesky() {
        let inv = chol.inverse();
        if inv.iter().all(|v| v.is_finite()) {
            return inv;
        }
    }
    s.clone()
        .pseudo_inverse(f64::EPSILON * s.nrows() as f64 * s.amax())
        .unwrap_or_else(|_| DMatrix::zeros(s.ncols(), s.nrows()))
}

/// Monte-Carlo run of the centralized time-varying Kalman filter.
///
/// The estimate starts at zero with covariance `initial_std² I`. Each trial draws
/// `x(0)`, then per step the process noise followed by the measurement noise, from
/// its own counter-derived stream. The estimation error is propagated directly
/// (`e = x - x̂`), which is algebraically the same filter but keeps the error
/// exact when the state itself grows without bound.
pub fn kalman_mc(sys: &LinearSystem, cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    let m = sys.states();
    let schedule = kalman_gains(sys, cfg.steps, cfg.initial_std);
    let a = sys.a.matrix();
    let h = sys.h.matrix();
    let p_out = sys.h.rows();

    let trials = cfg.run_trials(|trial| {
        let mut rng = cfg.trial_rng(trial);
        let mut x = standard_normal_vector(&mut rng, m, cfg.initial_std);
        let mut e = x.clone();
        let mut errors = Vec::with_capacity(cfg.steps);
        let mut norms = Vec::with_capacity(cfg.steps);
        for k in &schedule.gains {
            let v = standard_normal_vector(&mut rng, m, sys.process_std);
            let w = standard_normal_vector(&mut rng, p_out, sys.measurement_std);
            x = a * &x + &v;
            let pred = a * &e + &v;
            let innovation = h * &pred + &w;
            e = &pred - k * innovation;
            let err = e.norm_squared() / m.max(1) as f64;
            errors.push(if err.is_finite() { err } else { f64::INFINITY });
            let norm = x.norm();
            norms.push(if norm.is_finite() { norm } else { f64::INFINITY });
        }
        (errors, norms)
    })?;
    Ok(SimResult::from_trials(trials, cfg.steps, spectral_radius(&sys.a)?))
}
