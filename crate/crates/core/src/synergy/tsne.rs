//! Exact t-SNE to two dimensions.
//!
//! Affinities use squared Euclidean distances with a per-point Gaussian
//! bandwidth calibrated by bisection to the target perplexity; the embedding
//! kernel is Student-t with one degree of freedom. Optimization is gradient
//! descent with momentum, per-parameter gains and early exaggeration. Once
//! exaggeration ends, a step that would raise the KL divergence is replaced
//! by a backtracked plain gradient step with momentum reset, so the recorded
//! divergence never increases.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::SynergyError;

const P_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TsneConfig {
    pub perplexity: f64,
    pub iterations: usize,
    pub learning_rate: f64,
    pub early_exaggeration: f64,
    pub exaggeration_iterations: usize,
    pub initial_momentum: f64,
    pub final_momentum: f64,
    pub momentum_switch: usize,
    pub min_gain: f64,
    pub init_sd: f64,
    /// Tolerance on the conditional entropy, nats.
    pub entropy_tol: f64,
    pub seed: u64,
}

impl Default for TsneConfig {
    fn default() -> Self {
        TsneConfig {
            perplexity: 30.0,
            iterations: 1000,
            learning_rate: 200.0,
            early_exaggeration: 12.0,
            exaggeration_iterations: 250,
            initial_momentum: 0.5,
            final_momentum: 0.8,
            momentum_switch: 250,
            min_gain: 0.01,
            init_sd: 1e-4,
            entropy_tol: 1e-5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    pub points: Vec<[f64; 2]>,
    pub final_kl: f64,
    pub seed: u64,
    /// Perplexity after capping to the dataset size.
    pub perplexity: f64,
    /// KL divergence (unexaggerated) after every iteration.
    pub kl_history: Vec<f64>,
}

/// Perplexity actually used for `n` points: at most `(n - 1) / 3`.
pub fn effective_perplexity(perplexity: f64, n: usize) -> Result<f64, SynergyError> {
    if n < 4 {
        return Err(SynergyError::InsufficientData(format!("t-SNE needs at least 4 points, got {n}")));
    }
    let limit = (n - 1) as f64;
    if !(perplexity.is_finite() && perplexity > 1.0 && perplexity < limit) {
        return Err(SynergyError::Domain(format!(
            "perplexity {perplexity} infeasible for {n} points (need 1 < perplexity < {limit})"
        )));
    }
    Ok(perplexity.min(limit / 3.0))
}

pub fn squared_distances(x: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let s: f64 = x[i].iter().zip(&x[j]).map(|(a, b)| (a - b) * (a - b)).sum();
            d[i][j] = s;
            d[j][i] = s;
        }
    }
    d
}

/// Row `i` of the conditional distribution for precision `beta`, with its
/// Shannon entropy in nats.
fn conditional_row(d2: &[f64], i: usize, beta: f64) -> (Vec<f64>, f64) {
    let dmin = d2
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &v)| v)
        .fold(f64::INFINITY, f64::min);
    let mut p: Vec<f64> = d2
        .iter()
        .enumerate()
        .map(|(j, &v)| if j == i { 0.0 } else { (-beta * (v - dmin)).exp() })
        .collect();
    let sum: f64 = p.iter().sum();
    let mut h = 0.0;
    for (j, pj) in p.iter_mut().enumerate() {
        *pj /= sum;
        if j != i && *pj > 0.0 {
            h -= *pj * pj.ln();
        }
    }
    (p, h)
}

/// Conditional probabilities `p_{j|i}` whose entropies match
/// `ln(perplexity)`, with the calibrated precisions.
pub fn conditional_probabilities(
    d2: &[Vec<f64>],
    perplexity: f64,
    tol: f64,
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let target = perplexity.ln();
    let mut rows = Vec::with_capacity(d2.len());
    let mut betas = Vec::with_capacity(d2.len());
    for (i, di) in d2.iter().enumerate() {
        let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
        let mut beta = 1.0;
        let scale = di.iter().copied().filter(|v| *v > 0.0).fold(0.0, f64::max);
        if scale > 0.0 {
            beta = 1.0 / scale;
        }
        let (mut p, mut h) = conditional_row(di, i, beta);
        for _ in 0..200 {
            let diff = h - target;
            if diff.abs() <= tol {
                break;
            }
            if diff > 0.0 {
                lo = beta;
                beta = if hi.is_finite() { 0.5 * (beta + hi) } else { beta * 2.0 };
            } else {
                hi = beta;
                beta = 0.5 * (beta + lo);
            }
            (p, h) = conditional_row(di, i, beta);
        }
        rows.push(p);
        betas.push(beta);
    }
    (rows, betas)
}

pub fn entropy(row: &[f64]) -> f64 {
    row.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum()
}

/// `P_ij = (p_{j|i} + p_{i|j}) / 2n`.
pub fn joint_probabilities(cond: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = cond.len();
    let denom = 2.0 * n as f64;
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { 0.0 } else { (cond[i][j] + cond[j][i]) / denom })
                .collect()
        })
        .collect()
}

/// Student-t numerators `1 / (1 + |y_i - y_j|^2)` and their sum.
fn kernel(y: &[[f64; 2]]) -> (Vec<Vec<f64>>, f64) {
    let n = y.len();
    let mut num = vec![vec![0.0; n]; n];
    let mut sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let dx = y[i][0] - y[j][0];
            let dy = y[i][1] - y[j][1];
            let v = 1.0 / (1.0 + dx * dx + dy * dy);
            num[i][j] = v;
            num[j][i] = v;
            sum += 2.0 * v;
        }
    }
    (num, sum)
}

pub fn kl_divergence(p: &[Vec<f64>], y: &[[f64; 2]]) -> f64 {
    let (num, sum) = kernel(y);
    let mut kl = 0.0;
    for (i, row) in p.iter().enumerate() {
        for (j, &pij) in row.iter().enumerate() {
            if i != j && pij > 0.0 {
                let q = (num[i][j] / sum).max(P_FLOOR);
                kl += pij * (pij.max(P_FLOOR) / q).ln();
            }
        }
    }
    kl
}

/// `dKL/dy_i = 4 sum_j (P_ij - Q_ij) (y_i - y_j) / (1 + |y_i - y_j|^2)`.
pub fn kl_gradient(p: &[Vec<f64>], y: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let (num, sum) = kernel(y);
    let n = y.len();
    let mut g = vec![[0.0; 2]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let m = 4.0 * (p[i][j] - num[i][j] / sum) * num[i][j];
            g[i][0] += m * (y[i][0] - y[j][0]);
            g[i][1] += m * (y[i][1] - y[j][1]);
        }
    }
    g
}

/// `y + v`, recentred on the origin.
fn step(y: &[[f64; 2]], v: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut out: Vec<[f64; 2]> = y.iter().zip(v).map(|(a, d)| [a[0] + d[0], a[1] + d[1]]).collect();
    let n = out.len() as f64;
    for k in 0..2 {
        let m = out.iter().map(|p| p[k]).sum::<f64>() / n;
        out.iter_mut().for_each(|p| p[k] -= m);
    }
    out
}

pub fn tsne_embed(x: &[Vec<f64>], cfg: &TsneConfig) -> Result<Embedding, SynergyError> {
    let n = x.len();
    let perplexity = effective_perplexity(cfg.perplexity, n)?;
    if x.iter().flatten().any(|v| !v.is_finite()) {
        return Err(SynergyError::Domain("non-finite feature value".into()));
    }
    if let Some(r) = x.iter().find(|r| r.len() != x[0].len()) {
        return Err(SynergyError::DimensionMismatch {
            expected: x[0].len(),
            got: r.len(),
        });
    }
    let (cond, _) = conditional_probabilities(&squared_distances(x), perplexity, cfg.entropy_tol);
    let p = joint_probabilities(&cond);
    let p_exag: Vec<Vec<f64>> = p
        .iter()
        .map(|r| r.iter().map(|v| v * cfg.early_exaggeration).collect())
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let init = Normal::new(0.0, cfg.init_sd).map_err(|e| SynergyError::Domain(e.to_string()))?;
    let mut y: Vec<[f64; 2]> = (0..n).map(|_| [init.sample(&mut rng), init.sample(&mut rng)]).collect();
    let mut velocity = vec![[0.0; 2]; n];
    let mut gains = vec![[1.0f64; 2]; n];
    let mut kl_history = Vec::with_capacity(cfg.iterations);

    let mut kl = kl_divergence(&p, &y);
    for it in 0..cfg.iterations {
        let exaggerated = it < cfg.exaggeration_iterations;
        let target = if exaggerated { &p_exag } else { &p };
        let momentum = if it < cfg.momentum_switch {
            cfg.initial_momentum
        } else {
            cfg.final_momentum
        };
        let grad = kl_gradient(target, &y);
        let mut next_gains = gains.clone();
        let mut next_velocity = velocity.clone();
        for i in 0..n {
            for k in 0..2 {
                let g = grad[i][k];
                next_gains[i][k] = if (g > 0.0) != (velocity[i][k] > 0.0) {
                    gains[i][k] + 0.2
                } else {
                    (gains[i][k] * 0.8).max(cfg.min_gain)
                };
                next_velocity[i][k] = momentum * velocity[i][k] - cfg.learning_rate * next_gains[i][k] * g;
            }
        }
        let mut next = step(&y, &next_velocity);
        let mut next_kl = kl_divergence(&p, &next);
        if !exaggerated && next_kl > kl {
            // Restart: drop momentum and gains, backtrack along the gradient.
            next_gains = vec![[1.0; 2]; n];
            let mut rate = cfg.learning_rate;
            (next, next_kl, next_velocity) = (y.clone(), kl, vec![[0.0; 2]; n]);
            for _ in 0..60 {
                let v: Vec<[f64; 2]> = grad.iter().map(|g| [-rate * g[0], -rate * g[1]]).collect();
                let cand = step(&y, &v);
                let cand_kl = kl_divergence(&p, &cand);
                if cand_kl <= kl {
                    (next, next_kl, next_velocity) = (cand, cand_kl, v);
                    break;
                }
                rate *= 0.5;
            }
        }
        (y, kl, velocity, gains) = (next, next_kl, next_velocity, next_gains);
        kl_history.push(kl);
    }
    Ok(Embedding {
        points: y,
        final_kl: kl,
        seed: cfg.seed,
        perplexity,
        kl_history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn random_points(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| (0..d).map(|_| rng.random_range(-3.0..3.0)).collect()).collect()
    }

    #[test]
    fn equidistant_triangle_is_uniform() {
        let d2 = vec![vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]];
        for perp in [1.2, 1.5, 1.9] {
            let (p, _) = conditional_probabilities(&d2, perp, 1e-5);
            for (i, row) in p.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    let want = if i == j { 0.0 } else { 0.5 };
                    assert!((v - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn calibration_hits_target_entropy() {
        let x = random_points(40, 5, 1);
        let (p, _) = conditional_probabilities(&squared_distances(&x), 8.0, 1e-5);
        for row in &p {
            assert!((entropy(row) - 8f64.ln()).abs() <= 1e-5);
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn joint_is_symmetric_and_normalized() {
        let x = random_points(12, 3, 2);
        let (c, _) = conditional_probabilities(&squared_distances(&x), 3.0, 1e-5);
        let p = joint_probabilities(&c);
        let total: f64 = p.iter().flatten().sum();
        assert!((total - 1.0).abs() < 1e-12);
        for i in 0..12 {
            for j in 0..12 {
                assert_eq!(p[i][j], p[j][i]);
            }
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let x = random_points(10, 4, 3);
        let (c, _) = conditional_probabilities(&squared_distances(&x), 3.0, 1e-5);
        let p = joint_probabilities(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let y: Vec<[f64; 2]> = (0..10).map(|_| [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)]).collect();
        let g = kl_gradient(&p, &y);
        let h = 1e-5;
        for i in 0..10 {
            for k in 0..2 {
                let mut a = y.clone();
                let mut b = y.clone();
                a[i][k] += h;
                b[i][k] -= h;
                let fd = (kl_divergence(&p, &a) - kl_divergence(&p, &b)) / (2.0 * h);
                assert!((fd - g[i][k]).abs() <= 1e-4 * g[i][k].abs().max(1e-3), "{i} {k}: {fd} vs {}", g[i][k]);
            }
        }
    }

    #[test]
    fn perplexity_limits() {
        assert!(effective_perplexity(5.0, 3).is_err());
        assert!(effective_perplexity(9.0, 10).is_err());
        assert_eq!(effective_perplexity(8.0, 10).unwrap(), 3.0);
        assert_eq!(effective_perplexity(30.0, 260).unwrap(), 30.0);
    }

    #[test]
    fn embedding_is_deterministic() {
        let x = random_points(20, 3, 5);
        let cfg = TsneConfig {
            perplexity: 5.0,
            iterations: 200,
            seed: 7,
            ..Default::default()
        };
        let a = tsne_embed(&x, &cfg).unwrap();
        let b = tsne_embed(&x, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.final_kl >= 0.0);
        assert!(a.points.iter().flatten().all(|v| v.is_finite()));
        let c = tsne_embed(&x, &TsneConfig { seed: 8, ..cfg }).unwrap();
        assert_ne!(a.points, c.points);
    }

    #[test]
    fn kl_never_rises_after_exaggeration() {
        let x = random_points(30, 4, 9);
        let cfg = TsneConfig {
            perplexity: 6.0,
            iterations: 400,
            seed: 3,
            ..Default::default()
        };
        let e = tsne_embed(&x, &cfg).unwrap();
        assert_eq!(e.kl_history.len(), 400);
        for w in e.kl_history[cfg.exaggeration_iterations..].windows(2) {
            assert!(w[1] <= w[0], "{} -> {}", w[0], w[1]);
        }
        assert_eq!(e.final_kl, *e.kl_history.last().unwrap());
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let mut x = random_points(10, 2, 6);
        x[3][1] = f64::NAN;
        assert!(matches!(tsne_embed(&x, &TsneConfig { perplexity: 2.0, ..Default::default() }), Err(SynergyError::Domain(_))));
    }
}
