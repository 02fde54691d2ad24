//! Principal component analysis of hold-phase feature vectors, and elbow
//! selection of the component count.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::SynergyError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PcaOptions {
    /// Divide each centred feature by its sample standard deviation.
    /// Constant features are left unscaled.
    pub zscore: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// Per-feature divisor when fitted on z-scores.
    pub scale: Option<Vec<f64>>,
    /// Orthonormal rows in descending variance order.
    pub components: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    pub explained: Vec<f64>,
}

impl PcaModel {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn cumulative(&self) -> Vec<f64> {
        self.explained
            .iter()
            .scan(0.0, |acc, e| {
                *acc += e;
                Some(*acc)
            })
            .collect()
    }

    fn standardize(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .enumerate()
            .map(|(j, v)| {
                let c = v - self.mean[j];
                match &self.scale {
                    Some(s) => c / s[j],
                    None => c,
                }
            })
            .collect()
    }

    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>, SynergyError> {
        if x.len() != self.dim() {
            return Err(SynergyError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let c = self.standardize(x);
        Ok(self
            .components
            .iter()
            .map(|row| row.iter().zip(&c).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Map scores on the leading components back to feature space.
    pub fn reconstruct(&self, scores: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.dim()];
        for (row, s) in self.components.iter().zip(scores) {
            for (xj, r) in x.iter_mut().zip(row) {
                *xj += r * s;
            }
        }
        for (j, xj) in x.iter_mut().enumerate() {
            if let Some(s) = &self.scale {
                *xj *= s[j];
            }
            *xj += self.mean[j];
        }
        x
    }
}

pub fn pca_fit(rows: &[Vec<f64>]) -> Result<PcaModel, SynergyError> {
    pca_fit_with(rows, PcaOptions::default())
}

pub fn pca_fit_with(rows: &[Vec<f64>], opts: PcaOptions) -> Result<PcaModel, SynergyError> {
    let n = rows.len();
    if n < 2 {
        return Err(SynergyError::InsufficientData(format!(
            "PCA needs at least 2 observations, got {n}"
        )));
    }
    let d = rows[0].len();
    if d == 0 {
        return Err(SynergyError::Domain("PCA needs at least one feature".into()));
    }
    if let Some(r) = rows.iter().find(|r| r.len() != d) {
        return Err(SynergyError::DimensionMismatch {
            expected: d,
            got: r.len(),
        });
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(SynergyError::Domain("non-finite feature value".into()));
    }
    let nf = n as f64;
    let mean: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / nf).collect();
    let mut x = DMatrix::from_fn(n, d, |i, j| rows[i][j] - mean[j]);
    let scale = opts.zscore.then(|| {
        (0..d)
            .map(|j| {
                let sd = (x.column(j).norm_squared() / (nf - 1.0)).sqrt();
                if sd > 0.0 {
                    sd
                } else {
                    1.0
                }
            })
            .collect::<Vec<f64>>()
    });
    if let Some(s) = &scale {
        for j in 0..d {
            x.column_mut(j).unscale_mut(s[j]);
        }
    }
    let cov = (x.transpose() * &x) / (nf - 1.0);
    let trace = cov.trace();
    if !(trace > 0.0) {
        return Err(SynergyError::Degenerate("all observations are identical".into()));
    }
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k].max(0.0)).collect();
    let total: f64 = eigenvalues.iter().sum();
    let explained = eigenvalues.iter().map(|l| l / total).collect();
    let components = order
        .iter()
        .map(|&k| {
            let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
            let lead = (0..d).fold(0, |best, j| if v[j].abs() > v[best].abs() { j } else { best });
            if v[lead] < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            v
        })
        .collect();
    Ok(PcaModel {
        mean,
        scale,
        components,
        eigenvalues,
        explained,
    })
}

pub fn pca_project(model: &PcaModel, x: &[f64]) -> Result<Vec<f64>, SynergyError> {
    model.project(x)
}

/// Component count at the knee of the cumulative explained-variance curve:
/// the `k` whose cumulative value lies furthest above the chord from
/// `(1, cum_1)` to `(D, 1)`. Trailing zero-variance components are ignored;
/// a straight curve gives 1.
pub fn elbow_select(explained: &[f64]) -> usize {
    let d = explained
        .iter()
        .rposition(|&e| e > 1e-12)
        .map_or(explained.len().min(1), |i| i + 1);
    if d <= 2 {
        return 1;
    }
    let total: f64 = explained[..d].iter().sum();
    let mut cum = Vec::with_capacity(d);
    let mut acc = 0.0;
    for e in &explained[..d] {
        acc += e / total;
        cum.push(acc);
    }
    let (c1, cd) = (cum[0], cum[d - 1]);
    let mut best = (1, 1e-12);
    for (k, &c) in cum.iter().enumerate() {
        let chord = c1 + (cd - c1) * k as f64 / (d - 1) as f64;
        if c - chord > best.1 {
            best = (k + 1, c - chord);
        }
    }
    best.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Cyclic Jacobi eigen-solver, independent of nalgebra.
    fn jacobi(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
        let n = a.len();
        let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
        for _ in 0..100 {
            let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
            if off < 1e-30 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    if a[p][q].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let (akp, akq) = (a[k][p], a[k][q]);
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let (apk, aqk) = (a[p][k], a[q][k]);
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                    for k in 0..n {
                        let (vkp, vkq) = (v[k][p], v[k][q]);
                        v[k][p] = c * vkp - s * vkq;
                        v[k][q] = s * vkp + c * vkq;
                    }
                }
            }
        }
        ((0..n).map(|i| a[i][i]).collect(), v)
    }

    fn oracle(rows: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
        let n = rows.len() as f64;
        let d = rows[0].len();
        let mean: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n).collect();
        let cov: Vec<Vec<f64>> = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| rows.iter().map(|r| (r[i] - mean[i]) * (r[j] - mean[j])).sum::<f64>() / (n - 1.0))
                    .collect()
            })
            .collect();
        let (vals, vecs) = jacobi(cov);
        let mut idx: Vec<usize> = (0..d).collect();
        idx.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
        (
            idx.iter().map(|&k| vals[k]).collect(),
            idx.iter().map(|&k| (0..d).map(|i| vecs[i][k]).collect()).collect(),
        )
    }

    #[test]
    fn line_data_is_rank_one() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 2.0 * i as f64]).collect();
        let m = pca_fit(&rows).unwrap();
        assert!((m.explained[0] - 1.0).abs() < 1e-12 && m.explained[1].abs() < 1e-12);
        let c = &m.components[0];
        assert!((c[0] - 1.0 / 5f64.sqrt()).abs() < 1e-12 && (c[1] - 2.0 / 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cross_toy_explains_eighty_twenty() {
        let rows = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 0.5], vec![0.0, -0.5]];
        let m = pca_fit(&rows).unwrap();
        assert!((m.explained[0] - 0.8).abs() < 1e-12 && (m.explained[1] - 0.2).abs() < 1e-12);
        assert!((m.eigenvalues[0] - 2.0 / 3.0).abs() < 1e-12 && (m.eigenvalues[1] - 1.0 / 6.0).abs() < 1e-12);
        let s = m.project(&[1.0, 0.0]).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-12 && s[1].abs() < 1e-12);
    }

    #[test]
    fn projection_examples() {
        let rows = vec![vec![1.0, 2.0, 0.5], vec![3.0, -1.0, 2.0], vec![0.0, 0.0, 1.0], vec![2.0, 5.0, -1.0]];
        let m = pca_fit(&rows).unwrap();
        assert!(m.project(&m.mean).unwrap().iter().all(|s| s.abs() < 1e-12));
        let x: Vec<f64> = m.mean.iter().zip(&m.components[0]).map(|(a, b)| a + b).collect();
        let s = m.project(&x).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-12 && s[1].abs() < 1e-12 && s[2].abs() < 1e-12);
        assert!(matches!(m.project(&[1.0]), Err(SynergyError::DimensionMismatch { .. })));
    }

    #[test]
    fn identical_rows_are_degenerate() {
        assert!(matches!(
            pca_fit(&[vec![1.0, 2.0], vec![1.0, 2.0]]),
            Err(SynergyError::Degenerate(_))
        ));
        assert!(pca_fit(&[vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn zscore_scales_features() {
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, 100.0 * ((i * 7) % 5) as f64, 3.0]).collect();
        let m = pca_fit_with(&rows, PcaOptions { zscore: true }).unwrap();
        let s = m.scale.as_ref().unwrap();
        assert_eq!(s[2], 1.0);
        assert!((m.eigenvalues.iter().sum::<f64>() - 2.0).abs() < 1e-9);
        let back = m.reconstruct(&m.project(&rows[3]).unwrap());
        for (a, b) in back.iter().zip(&rows[3]) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn elbow_examples() {
        let from_cum = |c: &[f64]| {
            let mut prev = 0.0;
            c.iter()
                .map(|x| {
                    let e = x / 100.0 - prev;
                    prev = x / 100.0;
                    e
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(elbow_select(&from_cum(&[60.0, 90.0, 95.0, 97.5, 100.0])), 2);
        assert_eq!(elbow_select(&from_cum(&[25.0, 50.0, 75.0, 100.0])), 1);
        assert_eq!(elbow_select(&from_cum(&[50.0, 98.0, 99.0, 99.5, 100.0])), 2);
        assert_eq!(elbow_select(&[1.0]), 1);
        assert_eq!(elbow_select(&[0.7, 0.3]), 1);
    }

    fn toy() -> impl Strategy<Value = Vec<Vec<f64>>> {
        (1usize..=4, 5usize..30).prop_flat_map(|(d, n)| {
            proptest::collection::vec(proptest::collection::vec(-10.0..10.0f64, d), n)
        })
    }

    proptest! {
        #[test]
        fn matches_jacobi_oracle(rows in toy()) {
            let m = pca_fit(&rows).unwrap();
            let (vals, vecs) = oracle(&rows);
            for k in 0..vals.len() {
                prop_assert!((m.eigenvalues[k] - vals[k].max(0.0)).abs() < 1e-8 * (1.0 + vals[0]));
                // Compare directions only where the eigenvalue is isolated.
                let gap = (0..vals.len()).filter(|&j| j != k).map(|j| (vals[j] - vals[k]).abs()).fold(f64::INFINITY, f64::min);
                if gap > 1e-3 * (1.0 + vals[0]) {
                    let dot: f64 = m.components[k].iter().zip(&vecs[k]).map(|(a, b)| a * b).sum();
                    prop_assert!((dot.abs() - 1.0).abs() < 1e-8);
                }
            }
        }

        #[test]
        fn model_invariants(rows in toy()) {
            let m = pca_fit(&rows).unwrap();
            prop_assert!((m.explained.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!(m.explained.windows(2).all(|w| w[0] >= w[1]));
            prop_assert!(m.explained.iter().all(|&e| e >= 0.0));
            for (i, a) in m.components.iter().enumerate() {
                for (j, b) in m.components.iter().enumerate() {
                    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                    prop_assert!((dot - f64::from(u8::from(i == j))).abs() < 1e-8);
                }
                let lead = a.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
                prop_assert!(lead > 0.0);
            }
            for r in &rows {
                let back = m.reconstruct(&m.project(r).unwrap());
                for (a, b) in back.iter().zip(r) {
                    prop_assert!((a - b).abs() < 1e-9);
                }
            }
        }

        #[test]
        fn elbow_ignores_trailing_zero_components(
            raw in proptest::collection::vec(0.01..1.0f64, 1..8),
            zeros in 0usize..5,
        ) {
            let mut e = raw.clone();
            e.sort_by(|a, b| b.total_cmp(a));
            let s: f64 = e.iter().sum();
            e.iter_mut().for_each(|x| *x /= s);
            let k = elbow_select(&e);
            let mut padded = e.clone();
            padded.extend(std::iter::repeat_n(0.0, zeros));
            prop_assert_eq!(elbow_select(&padded), k);
        }
    }
}
