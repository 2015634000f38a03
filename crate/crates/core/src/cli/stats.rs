//! Aggregates over batches of sample records.

use serde::Serialize;

use super::{invalid, CliResult, GtPatternRecord, PlanePartitionRecord, SCHEMA_VERSION};
use crate::combinatorics::{Partition, PlanePartitionShape};
use crate::oracle::mean_volume_closed_form;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SppStats {
    pub kind: &'static str,
    pub schema_version: u32,
    pub samples: usize,
    #[serde(rename = "A")]
    pub a: usize,
    #[serde(rename = "B")]
    pub b: usize,
    pub pi: Vec<i64>,
    pub q: Option<f64>,
    /// Mean height of every box, `null` on the cells of π.
    pub mean_height: Vec<Vec<Option<f64>>>,
    pub mean_volume: f64,
    /// Standard error of the mean volume; absent for a single sample.
    pub volume_std_error: Option<f64>,
    /// Exact mean volume, available for uniform q.
    pub closed_form_mean_volume: Option<f64>,
    /// (empirical − exact) / standard error.
    pub z_score: Option<f64>,
    pub mean_draws: f64,
    pub max_draws: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GtStats {
    pub kind: &'static str,
    pub schema_version: u32,
    pub samples: usize,
    #[serde(rename = "N")]
    pub n: usize,
    /// Entrywise mean of every level t_k.
    pub mean_levels: Vec<Vec<f64>>,
    pub min_levels: Vec<Vec<i64>>,
    pub max_levels: Vec<Vec<i64>>,
    pub mean_draws: f64,
}

fn mean_and_error(xs: impl Iterator<Item = f64> + Clone) -> (f64, Option<f64>) {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, None);
    }
    let var = xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, Some((var / n).sqrt()))
}

pub fn spp_stats(records: &[PlanePartitionRecord]) -> CliResult<SppStats> {
    let first = records.first().ok_or_else(|| invalid("no samples to aggregate"))?;
    if let Some(r) = records.iter().find(|r| (r.a, r.b, &r.pi, r.q) != (first.a, first.b, &first.pi, first.q)) {
        return Err(invalid(format!("sample {} has a different shape or weight than sample {}", r.index, first.index)));
    }
    let n = records.len() as f64;
    let mean_height = (0..first.a)
        .map(|i| {
            (0..first.b)
                .map(|j| {
                    let col: Option<Vec<i64>> = records.iter().map(|r| r.entries.get(i)?.get(j).copied().flatten()).collect();
                    col.map(|c| c.iter().sum::<i64>() as f64 / n)
                })
                .collect()
        })
        .collect();
    let (mean_volume, volume_std_error) = mean_and_error(records.iter().map(|r| r.volume as f64));
    let closed_form_mean_volume = match first.q {
        Some(q) => {
            let shape = PlanePartitionShape::new(first.a, first.b, Partition::new(first.pi.clone())?)?;
            Some(mean_volume_closed_form(&shape, q))
        }
        None => None,
    };
    let z_score = match (closed_form_mean_volume, volume_std_error) {
        (Some(exact), Some(se)) if se > 0.0 => Some((mean_volume - exact) / se),
        _ => None,
    };
    Ok(SppStats {
        kind: "spp_stats",
        schema_version: SCHEMA_VERSION,
        samples: records.len(),
        a: first.a,
        b: first.b,
        pi: first.pi.clone(),
        q: first.q,
        mean_height,
        mean_volume,
        volume_std_error,
        closed_form_mean_volume,
        z_score,
        mean_draws: records.iter().map(|r| r.draws as f64).sum::<f64>() / n,
        max_draws: records.iter().map(|r| r.draws).max().unwrap_or(0),
    })
}

pub fn gt_stats(records: &[GtPatternRecord]) -> CliResult<GtStats> {
    let first = records.first().ok_or_else(|| invalid("no samples to aggregate"))?;
    if let Some(r) = records.iter().find(|r| r.n != first.n || r.levels.len() != first.n) {
        return Err(invalid(format!("sample {} does not have depth {}", r.index, first.n)));
    }
    let n = records.len() as f64;
    let fold = |f: fn(i64, i64) -> i64| -> Vec<Vec<i64>> {
        let mut acc = first.levels.clone();
        for r in &records[1..] {
            for (a, l) in acc.iter_mut().zip(&r.levels) {
                for (x, &y) in a.iter_mut().zip(l) {
                    *x = f(*x, y);
                }
            }
        }
        acc
    };
    let mean_levels = (0..first.n)
        .map(|k| (0..=k).map(|i| records.iter().map(|r| r.levels[k][i] as f64).sum::<f64>() / n).collect())
        .collect();
    Ok(GtStats {
        kind: "gt_stats",
        schema_version: SCHEMA_VERSION,
        samples: records.len(),
        n: first.n,
        mean_levels,
        min_levels: fold(i64::min),
        max_levels: fold(i64::max),
        mean_draws: records.iter().map(|r| r.draws as f64).sum::<f64>() / n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::{generate_spp, Params, RunConfig};

    fn spp_config(a: usize, b: usize, q: f64, samples: usize, seed: u64) -> RunConfig {
        let p = Params { a: Some(a), b: Some(b), q: Some(q), samples: Some(samples), seed: Some(seed), ..Params::default() };
        RunConfig::resolve("stats", &p).unwrap()
    }

    #[test]
    fn ten_unit_box_samples_match_closed_form() {
        let records = generate_spp(&spp_config(1, 1, 0.5, 10, 3)).unwrap();
        let s = spp_stats(&records).unwrap();
        assert_eq!(s.closed_form_mean_volume, Some(1.0));
        // 3σ with σ the exact standard deviation of Geom(1/2): sqrt(2/10)
        assert!((s.mean_volume - 1.0).abs() <= 3.0 * (2.0f64 / 10.0).sqrt(), "{}", s.mean_volume);
    }

    #[test]
    fn zero_samples_is_an_error() {
        assert!(spp_stats(&[]).is_err());
        assert!(gt_stats(&[]).is_err());
    }

    #[test]
    fn duplicated_batch_has_the_same_mean() {
        let records = generate_spp(&spp_config(2, 3, 0.4, 25, 8)).unwrap();
        let twice: Vec<_> = records.iter().chain(&records).cloned().collect();
        let (a, b) = (spp_stats(&records).unwrap(), spp_stats(&twice).unwrap());
        assert_eq!(a.mean_height, b.mean_height);
        assert_eq!(a.mean_volume, b.mean_volume);
    }
}
