use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{perplexity_calibration, DimredError, EmbeddingMatrix};

const P_FLOOR: f64 = 1e-12;
const INIT_SD: f64 = 1e-4;
const MIN_GAIN: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TsneParams {
    pub perplexity: f64,
    pub iterations: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub early_exaggeration: f64,
    /// Iterations run with exaggerated affinities and the initial momentum.
    pub early_iterations: usize,
    pub initial_momentum: f64,
    pub final_momentum: f64,
}

impl Default for TsneParams {
    fn default() -> Self {
        TsneParams {
            perplexity: 30.0,
            iterations: 1000,
            learning_rate: 200.0,
            seed: 0,
            early_exaggeration: 12.0,
            early_iterations: 250,
            initial_momentum: 0.5,
            final_momentum: 0.8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TsneResult {
    pub coords: Vec<[f64; 2]>,
    /// KL(P‖Q) at the random initialization.
    pub initial_kl: f64,
    pub final_kl: f64,
    /// `|ΣP − 1|`.
    pub p_sum_error: f64,
    /// Largest `|ΣQ − 1|` seen over all iterations.
    pub max_q_sum_error: f64,
    /// Rows whose perplexity target could not be met.
    pub clamped_rows: Vec<usize>,
    /// `(iteration, KL)` samples every 50 iterations.
    pub kl_trace: Vec<(usize, f64)>,
}

/// Symmetric joint affinities `p_ij = (p_j|i + p_i|j) / 2N`, row-major N×N
/// with a zero diagonal. Off-diagonal entries are floored at 1e-12 and the
/// matrix renormalized to sum to one.
pub fn joint_probabilities(
    x: &EmbeddingMatrix,
    perplexity: f64,
) -> Result<(Vec<f64>, Vec<usize>), DimredError> {
    let n = x.rows();
    let rows: Vec<(Vec<f64>, bool)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let d: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| x.sq_dist(i, j)).collect();
            let cal = perplexity_calibration(&d, perplexity)?;
            let (cond, _) = super::conditional_distribution(&d, cal.sigma);
            let mut row = Vec::with_capacity(n);
            row.extend_from_slice(&cond[..i]);
            row.push(0.0);
            row.extend_from_slice(&cond[i..]);
            Ok((row, cal.clamped))
        })
        .collect::<Result<_, DimredError>>()?;

    let clamped = rows
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.1.then_some(i))
        .collect();
    let mut p = vec![0.0; n * n];
    let scale = 2.0 * n as f64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                p[i * n + j] = ((rows[i].0[j] + rows[j].0[i]) / scale).max(P_FLOOR);
            }
        }
    }
    let total: f64 = row_sums(&p, n).iter().sum();
    p.iter_mut().for_each(|v| *v /= total);
    Ok((p, clamped))
}

fn row_sums(m: &[f64], n: usize) -> Vec<f64> {
    m.par_chunks(n).map(|r| r.iter().sum()).collect()
}

/// Normalized Student-t affinities of a 2D layout, row-major N×N.
pub fn q_distribution(y: &[[f64; 2]]) -> Vec<f64> {
    let n = y.len();
    let num: Vec<f64> = (0..n * n)
        .map(|ij| {
            let (i, j) = (ij / n, ij % n);
            if i == j {
                0.0
            } else {
                student_t(y[i], y[j])
            }
        })
        .collect();
    let z: f64 = row_sums(&num, n).iter().sum();
    num.into_iter().map(|v| v / z).collect()
}

fn student_t(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    1.0 / (1.0 + dx * dx + dy * dy)
}

/// Sum of unnormalized Student-t kernels over ordered pairs.
fn kernel_total(y: &[[f64; 2]]) -> f64 {
    let n = y.len();
    let per_row: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| (0..n).filter(|&j| j != i).map(|j| student_t(y[i], y[j])).sum())
        .collect();
    per_row.iter().sum()
}

/// KL(P‖Q) for the layout `y`.
pub fn kl_divergence(p: &[f64], y: &[[f64; 2]]) -> f64 {
    let n = y.len();
    let z = kernel_total(y);
    let per_row: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let pij = p[i * n + j];
                    if pij > 0.0 {
                        pij * (pij / (student_t(y[i], y[j]) / z)).ln()
                    } else {
                        0.0
                    }
                })
                .sum()
        })
        .collect();
    per_row.iter().sum()
}

/// `∂KL/∂y_i = 4 Σ_j (p_ij − q_ij)(y_i − y_j) / (1 + |y_i − y_j|²)`, with
/// every `p_ij` multiplied by `exaggeration`.
pub fn kl_gradient(p: &[f64], y: &[[f64; 2]], exaggeration: f64) -> Vec<[f64; 2]> {
    gradient_and_q_sum(p, y, exaggeration).0
}

fn gradient_and_q_sum(p: &[f64], y: &[[f64; 2]], exaggeration: f64) -> (Vec<[f64; 2]>, f64) {
    let n = y.len();
    let z = kernel_total(y);
    let rows: Vec<([f64; 2], f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut g = [0.0; 2];
            let mut q_row = 0.0;
            for j in 0..n {
                if j == i {
                    continue;
                }
                let k = student_t(y[i], y[j]);
                let q = k / z;
                q_row += q;
                let coef = 4.0 * (exaggeration * p[i * n + j] - q) * k;
                g[0] += coef * (y[i][0] - y[j][0]);
                g[1] += coef * (y[i][1] - y[j][1]);
            }
            (g, q_row)
        })
        .collect();
    let q_sum = rows.iter().map(|r| r.1).sum();
    (rows.into_iter().map(|r| r.0).collect(), q_sum)
}

/// Exact t-SNE into two dimensions.
///
/// Gradient descent on KL(P‖Q) with momentum and per-coordinate adaptive
/// gains (+0.2 when the gradient flips sign against the last update,
/// ×0.8 otherwise, floored at 0.01). The first `early_iterations` use
/// exaggerated affinities and the initial momentum. The layout starts from
/// an isotropic Gaussian with sd 1e-4 drawn from ChaCha20 seeded by
/// `params.seed`, and is re-centered after every step.
pub fn tsne(x: &EmbeddingMatrix, params: &TsneParams) -> Result<TsneResult, DimredError> {
    let n = x.rows();
    if n < 4 {
        return Err(DimredError::Input(format!("t-SNE needs at least 4 rows, got {n}")));
    }
    if !(params.perplexity > 0.0) || params.perplexity >= n as f64 {
        return Err(DimredError::Input(format!(
            "perplexity {} must lie in (0, N = {n})",
            params.perplexity
        )));
    }
    if params.iterations == 0 || !(params.learning_rate > 0.0) || !(params.early_exaggeration > 0.0)
    {
        return Err(DimredError::Input("t-SNE parameters must be positive".into()));
    }
    if x.is_constant() {
        return Err(DimredError::ZeroVariance);
    }

    // Calibration requires a target of at least one effective neighbour.
    let (p, clamped_rows) = joint_probabilities(x, params.perplexity.max(1.0))?;
    let p_sum_error = (row_sums(&p, n).iter().sum::<f64>() - 1.0).abs();

    let mut rng = ChaCha20Rng::seed_from_u64(params.seed);
    let normal = Normal::new(0.0, INIT_SD).expect("valid normal");
    let mut y: Vec<[f64; 2]> = (0..n)
        .map(|_| [normal.sample(&mut rng), normal.sample(&mut rng)])
        .collect();

    let initial_kl = kl_divergence(&p, &y);
    let mut kl_trace = vec![(0, initial_kl)];
    let mut update = vec![[0.0f64; 2]; n];
    let mut gains = vec![[1.0f64; 2]; n];
    let mut max_q_sum_error = 0.0f64;

    for iter in 0..params.iterations {
        let early = iter < params.early_iterations;
        let exaggeration = if early { params.early_exaggeration } else { 1.0 };
        let momentum = if early {
            params.initial_momentum
        } else {
            params.final_momentum
        };

        let (grad, q_sum) = gradient_and_q_sum(&p, &y, exaggeration);
        max_q_sum_error = max_q_sum_error.max((q_sum - 1.0).abs());

        for i in 0..n {
            for d in 0..2 {
                let g = grad[i][d];
                gains[i][d] = if (g > 0.0) != (update[i][d] > 0.0) {
                    gains[i][d] + 0.2
                } else {
                    gains[i][d] * 0.8
                }
                .max(MIN_GAIN);
                update[i][d] = momentum * update[i][d] - params.learning_rate * gains[i][d] * g;
                y[i][d] += update[i][d];
            }
        }
        let mean = [
            y.iter().map(|p| p[0]).sum::<f64>() / n as f64,
            y.iter().map(|p| p[1]).sum::<f64>() / n as f64,
        ];
        for pt in &mut y {
            pt[0] -= mean[0];
            pt[1] -= mean[1];
        }

        if (iter + 1) % 50 == 0 {
            kl_trace.push((iter + 1, kl_divergence(&p, &y)));
        }
    }

    let final_kl = kl_divergence(&p, &y);
    Ok(TsneResult {
        coords: y,
        initial_kl,
        final_kl,
        p_sum_error,
        max_q_sum_error,
        clamped_rows,
        kl_trace,
    })
}
