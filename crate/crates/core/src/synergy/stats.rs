//! Pearson correlations between finger channels, per grasp type.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::SynergyError;
use crate::dataset::Dataset;
use crate::hand::{Channels, Domain, FingerId, GraspType};
use crate::trial::AnalyzedTrial;

/// Product-moment correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, SynergyError> {
    if x.len() != y.len() {
        return Err(SynergyError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(SynergyError::InsufficientData(format!(
            "pearson needs at least 2 samples, got {}",
            x.len()
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if !(sxx > 0.0 && syy > 0.0) {
        return Err(SynergyError::UndefinedCorrelation);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Which samples of a trial enter the correlation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationWindow {
    FullTrial,
    HoldOnly,
}

/// Finger-pair correlations. Entries are absent where a channel is
/// constant; `undefined` flags that any entry is absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub labels: [FingerId; 5],
    pub r: [[Option<f64>; 5]; 5],
    pub undefined: bool,
    pub samples: usize,
}

impl CorrelationMatrix {
    /// Within-domain matrix of the columns of `rows`.
    pub fn of_rows(rows: &[Channels]) -> Self {
        let cols: Vec<Vec<f64>> = (0..5).map(|c| rows.iter().map(|r| r[c]).collect()).collect();
        let mut r = [[None; 5]; 5];
        for i in 0..5 {
            for j in i..5 {
                let v = if i == j {
                    pearson(&cols[i], &cols[i]).ok().map(|_| 1.0)
                } else {
                    pearson(&cols[i], &cols[j]).ok()
                };
                r[i][j] = v;
                r[j][i] = v;
            }
        }
        Self::finish(r, rows.len())
    }

    /// Rows are channels of `a`, columns channels of `b`; not symmetric.
    pub fn cross(a: &[Channels], b: &[Channels]) -> Self {
        let col = |rows: &[Channels], c: usize| rows.iter().map(|r| r[c]).collect::<Vec<_>>();
        let mut r = [[None; 5]; 5];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = pearson(&col(a, i), &col(b, j)).ok();
            }
        }
        Self::finish(r, a.len().min(b.len()))
    }

    fn finish(r: [[Option<f64>; 5]; 5], samples: usize) -> Self {
        CorrelationMatrix {
            labels: FingerId::ALL,
            undefined: r.iter().flatten().any(Option::is_none),
            r,
            samples,
        }
    }

    pub fn get(&self, a: FingerId, b: FingerId) -> Option<f64> {
        self.r[a.index()][b.index()]
    }
}

/// Rows of one trial inside the chosen window.
fn window_rows<'a>(
    ds: &'a Dataset,
    analyzed: &[AnalyzedTrial],
    domain: Domain,
    window: CorrelationWindow,
    index: usize,
) -> Option<&'a [Channels]> {
    let rows = ds.entries[index].trial.rows(domain);
    match window {
        CorrelationWindow::FullTrial => Some(rows),
        CorrelationWindow::HoldOnly => analyzed
            .iter()
            .find(|a| a.index == index)
            .map(|a| &rows[a.phases.hold_start..a.phases.hold_end.min(rows.len())]),
    }
}

fn concat_by_type(
    ds: &Dataset,
    analyzed: &[AnalyzedTrial],
    domain: Domain,
    window: CorrelationWindow,
) -> BTreeMap<GraspType, Vec<Channels>> {
    ds.by_grasp_type()
        .into_iter()
        .map(|(g, idx)| {
            let rows: Vec<Channels> = idx
                .iter()
                .filter_map(|&i| window_rows(ds, analyzed, domain, window, i))
                .flatten()
                .copied()
                .collect();
            (g, rows)
        })
        .filter(|(_, rows)| !rows.is_empty())
        .collect()
}

/// Per grasp type, correlations of the concatenated trial series. `analyzed`
/// is only consulted for the hold-only window.
pub fn grasp_type_correlations(
    ds: &Dataset,
    analyzed: &[AnalyzedTrial],
    domain: Domain,
    window: CorrelationWindow,
) -> BTreeMap<GraspType, CorrelationMatrix> {
    concat_by_type(ds, analyzed, domain, window)
        .into_iter()
        .map(|(g, rows)| (g, CorrelationMatrix::of_rows(&rows)))
        .collect()
}

/// Per grasp type, force channel (row) against posture channel (column).
pub fn cross_domain_correlations(
    ds: &Dataset,
    analyzed: &[AnalyzedTrial],
    window: CorrelationWindow,
) -> BTreeMap<GraspType, CorrelationMatrix> {
    let f = concat_by_type(ds, analyzed, Domain::Force, window);
    let p = concat_by_type(ds, analyzed, Domain::Posture, window);
    f.into_iter()
        .filter_map(|(g, fr)| p.get(&g).map(|pr| (g, CorrelationMatrix::cross(&fr, pr))))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairExtrema {
    pub a: FingerId,
    pub b: FingerId,
    pub max_r: Option<f64>,
    pub max_type: Option<GraspType>,
    pub min_r: Option<f64>,
    pub min_type: Option<GraspType>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationExtrema {
    pub domain: Domain,
    pub pairs: Vec<PairExtrema>,
}

impl CorrelationExtrema {
    pub fn pair(&self, a: FingerId, b: FingerId) -> Option<&PairExtrema> {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        self.pairs.iter().find(|p| p.a == a && p.b == b)
    }
}

/// Scan grasp types for the largest and smallest coefficient of every finger
/// pair. Ties go to the earlier grasp type.
pub fn correlation_extrema(domain: Domain, per_type: &BTreeMap<GraspType, CorrelationMatrix>) -> CorrelationExtrema {
    let mut pairs = Vec::new();
    for (i, &a) in FingerId::ALL.iter().enumerate() {
        for &b in &FingerId::ALL[i + 1..] {
            let mut e = PairExtrema {
                a,
                b,
                max_r: None,
                max_type: None,
                min_r: None,
                min_type: None,
            };
            for (&g, m) in per_type {
                let Some(r) = m.get(a, b) else { continue };
                if e.max_r.is_none_or(|x| r > x) {
                    e.max_r = Some(r);
                    e.max_type = Some(g);
                }
                if e.min_r.is_none_or(|x| r < x) {
                    e.min_r = Some(r);
                    e.min_type = Some(g);
                }
            }
            pairs.push(e);
        }
    }
    CorrelationExtrema { domain, pairs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Textbook single-pass formula on raw sums.
    fn oracle(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len() as f64;
        let (sx, sy): (f64, f64) = (x.iter().sum(), y.iter().sum());
        let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
        let sxx: f64 = x.iter().map(|a| a * a).sum();
        let syy: f64 = y.iter().map(|b| b * b).sum();
        (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt())
    }

    #[test]
    fn pearson_examples() {
        assert!((pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
        assert!((pearson(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn pearson_errors() {
        assert_eq!(
            pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(SynergyError::UndefinedCorrelation)
        );
        assert!(matches!(
            pearson(&[1.0, 2.0], &[1.0, 2.0, 3.0]),
            Err(SynergyError::LengthMismatch(2, 3))
        ));
        assert!(pearson(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn identical_channels_correlate_perfectly() {
        let rows: Vec<Channels> = (0..20).map(|t| [t as f64 * 0.7 + 1.0; 5]).collect();
        let m = CorrelationMatrix::of_rows(&rows);
        assert!(!m.undefined);
        assert!(m.r.iter().flatten().all(|v| (v.unwrap() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn constant_channel_is_flagged() {
        let rows: Vec<Channels> = (0..20).map(|t| [t as f64, 1.0, (t * t) as f64, 2.0, -(t as f64)]).collect();
        let m = CorrelationMatrix::of_rows(&rows);
        assert!(m.undefined);
        assert_eq!(m.get(FingerId::Index, FingerId::Thumb), None);
        assert_eq!(m.get(FingerId::Index, FingerId::Index), None);
        assert_eq!(m.get(FingerId::Thumb, FingerId::Thumb), Some(1.0));
        assert!((m.get(FingerId::Thumb, FingerId::Pinky).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn extrema_scan_two_types() {
        let with = |r: f64| {
            let mut m = CorrelationMatrix::of_rows(&[[0.0, 1.0, 2.0, 3.0, 4.0], [1.0, 0.0, 1.0, 0.0, 1.0]]);
            m.r[1][2] = Some(r);
            m.r[2][1] = Some(r);
            m
        };
        let per = BTreeMap::from([
            (GraspType::SphericalGrip, with(0.9)),
            (GraspType::CylindricalGrip, with(0.4)),
        ]);
        let e = correlation_extrema(Domain::Force, &per);
        let p = e.pair(FingerId::Middle, FingerId::Index).unwrap();
        assert_eq!((p.max_r, p.max_type), (Some(0.9), Some(GraspType::SphericalGrip)));
        assert_eq!((p.min_r, p.min_type), (Some(0.4), Some(GraspType::CylindricalGrip)));
        assert_eq!(e.pairs.len(), 10);

        let single = BTreeMap::from([(GraspType::HookGrip, with(0.3))]);
        let p = correlation_extrema(Domain::Force, &single).pairs[5].clone();
        assert_eq!(p.max_r, p.min_r);
    }

    proptest! {
        #[test]
        fn pearson_matches_oracle(pairs in proptest::collection::vec((-100.0..100.0f64, -100.0..100.0f64), 3..60)) {
            let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            if let Ok(r) = pearson(&x, &y) {
                prop_assert!((r - oracle(&x, &y)).abs() < 1e-10);
                prop_assert!((-1.0..=1.0).contains(&r));
            }
        }

        #[test]
        fn pearson_is_symmetric_and_affine_invariant(
            pairs in proptest::collection::vec((-10.0..10.0f64, -10.0..10.0f64), 3..40),
            a in prop_oneof![-5.0..-0.1f64, 0.1..5.0f64],
            b in -10.0..10.0f64,
        ) {
            let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            if let (Ok(r), Ok(s)) = (pearson(&x, &y), pearson(&y, &x)) {
                prop_assert_eq!(r, s);
                let ax: Vec<f64> = x.iter().map(|v| a * v + b).collect();
                let r2 = pearson(&ax, &y).unwrap();
                prop_assert!((r2 - a.signum() * r).abs() < 1e-9);
            }
        }
    }
}
