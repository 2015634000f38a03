//! Python bindings: samplers, the exact small-instance law, and the
//! verification suite.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use schur_dynamics::combinatorics::{Partition, PlanePartition, PlanePartitionShape};
use schur_dynamics::oracle::{exact_spp_measure, mean_volume_closed_form};
use schur_dynamics::samplers::{batch, sample_gt_path, sample_spp, sample_spp_weighted, stream_rng, CharacterParams};
use schur_dynamics::suite::{run_suite, select, SuiteOptions};

type Grid = Vec<Vec<Option<i64>>>;

fn py_err(e: schur_dynamics::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn shape(a: usize, b: usize, pi: Option<Vec<i64>>) -> PyResult<PlanePartitionShape> {
    let pi = Partition::new(pi.unwrap_or_default()).map_err(py_err)?;
    PlanePartitionShape::new(a, b, pi).map_err(py_err)
}

fn summary(pp: &PlanePartition, draws: u64) -> (Grid, i64, u64) {
    (pp.height_grid(), pp.volume(), draws)
}

/// One plane partition with weight q^volume on the A×B box minus π, drawn from
/// stream `index` of `seed`. Returns (heights with None on π, volume, draws).
#[pyfunction]
#[pyo3(signature = (a, b, q, pi=None, seed=0, index=0))]
fn sample_plane_partition(a: usize, b: usize, q: f64, pi: Option<Vec<i64>>, seed: u64, index: u64) -> PyResult<(Grid, i64, u64)> {
    let sh = shape(a, b, pi)?;
    let (pp, draws) = sample_spp(&sh, q, &mut stream_rng(seed, index)).map_err(py_err)?;
    Ok(summary(&pp, draws.nontrivial_draws))
}

/// `samples` independent plane partitions; sample i uses stream i of `seed`,
/// so the result matches the command-line sampler. Either `q` or the per-slice
/// `q_weights` must be given.
#[pyfunction]
#[pyo3(signature = (a, b, samples, q=None, q_weights=None, pi=None, seed=0))]
#[allow(clippy::too_many_arguments)]
fn sample_plane_partitions(
    py: Python<'_>,
    a: usize,
    b: usize,
    samples: usize,
    q: Option<f64>,
    q_weights: Option<Vec<f64>>,
    pi: Option<Vec<i64>>,
    seed: u64,
) -> PyResult<Vec<(Grid, i64, u64)>> {
    let sh = shape(a, b, pi)?;
    let draws = py.detach(|| match (q, q_weights) {
        (Some(q), None) => batch(samples, seed, |rng| sample_spp(&sh, q, rng)),
        (None, Some(w)) => batch(samples, seed, |rng| sample_spp_weighted(&sh, &w, rng)),
        _ => Err(schur_dynamics::Error::InvalidParameter("give exactly one of q and q_weights".into())),
    });
    Ok(draws.map_err(py_err)?.iter().map(|(pp, d)| summary(pp, d.nontrivial_draws)).collect())
}

/// A Gelfand-Tsetlin path of depth `n` for the character with the given
/// Edrei parameters; returns the levels t_1, ..., t_n.
#[pyfunction]
#[pyo3(signature = (n, alpha_plus=vec![], alpha_minus=vec![], beta_plus=vec![], beta_minus=vec![], seed=0, index=0))]
fn sample_gt_pattern(
    n: usize,
    alpha_plus: Vec<f64>,
    alpha_minus: Vec<f64>,
    beta_plus: Vec<f64>,
    beta_minus: Vec<f64>,
    seed: u64,
    index: u64,
) -> PyResult<Vec<Vec<i64>>> {
    let chi = CharacterParams::new(alpha_plus, alpha_minus, beta_plus, beta_minus).map_err(py_err)?;
    let (pattern, _) = sample_gt_path(&chi, n, &mut stream_rng(seed, index)).map_err(py_err)?;
    Ok(pattern.levels().iter().map(|s| s.parts().to_vec()).collect())
}

/// Exact expected volume under q^volume.
#[pyfunction]
#[pyo3(signature = (a, b, q, pi=None))]
fn mean_volume(a: usize, b: usize, q: f64, pi: Option<Vec<i64>>) -> PyResult<f64> {
    Ok(mean_volume_closed_form(&shape(a, b, pi)?, q))
}

/// Every plane partition of volume at most `max_volume` with its exact
/// probability, plus the mass beyond the cutoff.
#[pyfunction]
#[pyo3(signature = (a, b, q, max_volume, pi=None))]
fn exact_plane_partition_law(a: usize, b: usize, q: f64, max_volume: i64, pi: Option<Vec<i64>>) -> PyResult<(Vec<(Grid, f64)>, f64)> {
    let m = exact_spp_measure(&shape(a, b, pi)?, q, max_volume).map_err(py_err)?;
    Ok((m.iter().map(|(pp, p)| (pp.height_grid(), p)).collect(), m.tail_bound))
}

/// Runs the selected acceptance criteria (ids or keys; all when empty).
/// Returns (all passed, [(id, key, passed, seconds, check lines)]).
#[pyfunction]
#[pyo3(signature = (only=vec![], sample_scale=1.0))]
#[allow(clippy::type_complexity)]
fn verify(py: Python<'_>, only: Vec<String>, sample_scale: f64) -> PyResult<(bool, Vec<(u8, String, bool, f64, Vec<String>)>)> {
    let ids = select(&only).map_err(py_err)?;
    let opts = SuiteOptions { sample_scale, ..SuiteOptions::default() };
    let reports = py.detach(|| run_suite(&ids, &opts)).map_err(py_err)?;
    let rows = reports
        .iter()
        .map(|r| (r.id, r.key.to_string(), r.pass, r.seconds, r.checks.iter().map(|c| c.summary_line()).collect()))
        .collect();
    Ok((reports.iter().all(|r| r.pass), rows))
}

#[pymodule]
fn pyschur(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(sample_plane_partition, m)?)?;
    m.add_function(wrap_pyfunction!(sample_plane_partitions, m)?)?;
    m.add_function(wrap_pyfunction!(sample_gt_pattern, m)?)?;
    m.add_function(wrap_pyfunction!(mean_volume, m)?)?;
    m.add_function(wrap_pyfunction!(exact_plane_partition_law, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
