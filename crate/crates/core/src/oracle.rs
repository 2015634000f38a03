//! Independent references for the samplers: brute-force enumeration,
//! exact measures from definitional weights, dense transition matrices and
//! statistical tests.
//!
//! Nothing here calls into `kernels`; the dense matrices are built straight
//! from Schur function evaluations.

use std::collections::HashMap;
use std::hash::Hash;

use nalgebra::DMatrix;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::combinatorics::{
    partitions_in_box, signatures_in_range, GTPattern, Partition, PlanePartition, PlanePartitionShape, Signature,
};
use crate::dynamics::{product_residual, LinkSystem, Residual, TwoSidedState};
use crate::error::{Error, Result};
use crate::measure::TruncatedMeasure;
use crate::schur_eval::{
    partition_function_schur, partition_function_two_sided, schur, skew_schur, skew_schur_branch, skew_schur_sig,
    spp_process_spec, spp_weighted_process_spec, two_sided_weight_with, PsiEval, SchurProcessSpec, TwoSidedSpec,
};
use crate::specializations::{pairing_h, EdreiSpec, Specialization};

/// Minimum expected count per chi-square bin.
pub const MIN_EXPECTED: f64 = 5.0;

/// Guard on the number of states any enumeration may produce.
pub const STATE_CAP: usize = 2_000_000;

/// Outcome of one verification.
#[derive(Clone, Debug, Serialize)]
pub struct TestReport {
    pub name: String,
    pub pass: bool,
    pub statistic: Option<f64>,
    pub p_value: Option<f64>,
    pub max_residual: Option<f64>,
    pub tolerance: f64,
    pub sample_size: Option<usize>,
    pub seed: Option<u64>,
    pub detail: String,
}

impl TestReport {
    /// A deterministic residual check passing when max_residual ≤ tol + tail.
    pub fn from_residual(name: impl Into<String>, r: Residual, tol: f64) -> Self {
        TestReport {
            name: name.into(),
            pass: r.within(tol) && r.max_residual.is_finite(),
            statistic: None,
            p_value: None,
            max_residual: Some(r.max_residual),
            tolerance: tol,
            sample_size: None,
            seed: None,
            detail: format!("tail {:.2e}, {} rows", r.tail, r.rows_checked),
        }
    }

    /// A goodness-of-fit test passing when p ≥ `level`.
    pub fn from_chi_square(name: impl Into<String>, c: &ChiSquare, level: f64, sample_size: usize, seed: u64) -> Self {
        TestReport {
            name: name.into(),
            pass: c.p_value >= level,
            statistic: Some(c.statistic),
            p_value: Some(c.p_value),
            max_residual: None,
            tolerance: level,
            sample_size: Some(sample_size),
            seed: Some(seed),
            detail: format!("{} bins, {} dof", c.bins, c.dof),
        }
    }

    /// A scalar that must stay within `tol` of a reference.
    pub fn from_deviation(name: impl Into<String>, deviation: f64, tol: f64, detail: String) -> Self {
        TestReport {
            name: name.into(),
            pass: deviation.abs() <= tol,
            statistic: None,
            p_value: None,
            max_residual: Some(deviation.abs()),
            tolerance: tol,
            sample_size: None,
            seed: None,
            detail,
        }
    }

    /// One-line rendering: verdict, name, value, tolerance and detail.
    pub fn summary_line(&self) -> String {
        let mark = if self.pass { "ok  " } else { "FAIL" };
        let value = match (self.p_value, self.max_residual) {
            (Some(p), _) => format!(" p={p:.3e}"),
            (None, Some(r)) => format!(" value={r:.3e}"),
            _ => String::new(),
        };
        format!("{mark} {}{value} (tolerance {:.1e}) {}", self.name, self.tolerance, self.detail)
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

// ---------------------------------------------------------------------------
// plane partitions

/// Every plane partition with support π̄ and entries ≤ `entry_cap`, filled
/// cell by cell in row-major order. Fails past `state_cap` fillings.
pub fn enumerate_spp(shape: &PlanePartitionShape, entry_cap: i64, state_cap: usize) -> Result<Vec<PlanePartition>> {
    let cells: Vec<(usize, usize)> =
        (0..shape.a).flat_map(|i| (0..shape.b).map(move |j| (i, j))).filter(|&(i, j)| shape.in_support(i, j)).collect();
    let mut grid = vec![vec![None::<i64>; shape.b]; shape.a];
    let mut out = Vec::new();

    fn rec(
        idx: usize,
        cells: &[(usize, usize)],
        grid: &mut Vec<Vec<Option<i64>>>,
        cap: i64,
        state_cap: usize,
        shape: &PlanePartitionShape,
        out: &mut Vec<PlanePartition>,
    ) -> Result<()> {
        if idx == cells.len() {
            if out.len() >= state_cap {
                return Err(Error::EnumerationCap(state_cap));
            }
            let entries = (0..shape.a)
                .map(|i| grid[i][shape.pi.part(i) as usize..].iter().map(|v| v.expect("filled")).collect())
                .collect();
            out.push(PlanePartition::new(shape.clone(), entries)?);
            return Ok(());
        }
        let (i, j) = cells[idx];
        let mut bound = cap;
        if j > 0 {
            if let Some(v) = grid[i][j - 1] {
                bound = bound.min(v);
            }
        }
        if i > 0 {
            if let Some(v) = grid[i - 1][j] {
                bound = bound.min(v);
            }
        }
        for v in 0..=bound {
            grid[i][j] = Some(v);
            rec(idx + 1, cells, grid, cap, state_cap, shape, out)?;
        }
        grid[i][j] = None;
        Ok(())
    }

    rec(0, &cells, &mut grid, entry_cap, state_cap, shape, &mut out)?;
    Ok(out)
}

/// The number of plane partitions with support π̄ and entries ≤ `entry_cap`,
/// by a row-to-row transfer count.
pub fn count_spp_transfer(shape: &PlanePartitionShape, entry_cap: i64) -> u128 {
    fn rows(len: usize, cap: i64) -> Vec<Vec<i64>> {
        fn rec(len: usize, bound: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
            if prefix.len() == len {
                out.push(prefix.clone());
                return;
            }
            for v in 0..=bound {
                prefix.push(v);
                rec(len, v, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(len, cap, &mut Vec::new(), &mut out);
        out
    }
    // rows are stored over the full width with columns of π left as None
    let full = |i: usize, r: &[i64]| -> Vec<Option<i64>> {
        let off = shape.pi.part(i) as usize;
        (0..shape.b).map(|j| if j < off { None } else { Some(r[j - off]) }).collect()
    };
    let mut counts: HashMap<Vec<Option<i64>>, u128> = HashMap::new();
    for r in rows(shape.b - shape.pi.part(0) as usize, entry_cap) {
        *counts.entry(full(0, &r)).or_insert(0) += 1;
    }
    for i in 1..shape.a {
        let candidates: Vec<Vec<Option<i64>>> =
            rows(shape.b - shape.pi.part(i) as usize, entry_cap).iter().map(|r| full(i, r)).collect();
        let mut next: HashMap<Vec<Option<i64>>, u128> = HashMap::new();
        for (above, &c) in &counts {
            for row in &candidates {
                let ok = above.iter().zip(row).all(|(a, b)| match (a, b) {
                    (Some(a), Some(b)) => b <= a,
                    _ => true,
                });
                if ok {
                    *next.entry(row.clone()).or_insert(0) += c;
                }
            }
        }
        counts = next;
    }
    counts.values().sum()
}

/// The law q^{vol}/Z on plane partitions with entries ≤ `entry_cap`; Z comes
/// from the product formula, so the tail is the mass beyond the cap.
pub fn exact_spp_measure(shape: &PlanePartitionShape, q: f64, entry_cap: i64) -> Result<TruncatedMeasure<PlanePartition>> {
    let z = partition_function_schur(&spp_process_spec(shape, q)?)?;
    let items = enumerate_spp(shape, entry_cap, STATE_CAP)?
        .into_iter()
        .map(|pp| {
            let w = q.powi(pp.volume() as i32) / z;
            (pp, w)
        })
        .collect();
    TruncatedMeasure::from_probs(items)
}

/// The law ∏_j q_j^{|λ^{(j)}|}/Z with `q_weights[i]` the weight of slice i+2.
pub fn exact_spp_weighted_measure(
    shape: &PlanePartitionShape,
    q_weights: &[f64],
    entry_cap: i64,
) -> Result<TruncatedMeasure<PlanePartition>> {
    let z = partition_function_schur(&spp_weighted_process_spec(shape, q_weights)?)?;
    let items = enumerate_spp(shape, entry_cap, STATE_CAP)?
        .into_iter()
        .map(|pp| {
            let slices = pp.diagonal_slices();
            let w: f64 = q_weights.iter().enumerate().map(|(i, q)| q.powi(slices[i + 1].size() as i32)).product();
            (pp, w / z)
        })
        .collect();
    TruncatedMeasure::from_probs(items)
}

/// Σ q^{vol} over plane partitions with support π̄ and volume ≤ `max_volume`,
/// and a bound on the remainder: at most C(n+c−1, c−1) fillings of c cells
/// have volume n.
pub fn definitional_partition_function(shape: &PlanePartitionShape, q: f64, max_volume: i64) -> Result<(f64, f64)> {
    let cells: Vec<(usize, usize)> =
        (0..shape.a).flat_map(|i| (0..shape.b).map(move |j| (i, j))).filter(|&(i, j)| shape.in_support(i, j)).collect();
    let mut by_volume = vec![0u64; max_volume.max(0) as usize + 1];
    let mut grid = vec![vec![None::<i64>; shape.b]; shape.a];

    fn rec(idx: usize, cells: &[(usize, usize)], grid: &mut Vec<Vec<Option<i64>>>, used: i64, by_volume: &mut [u64]) {
        if idx == cells.len() {
            by_volume[used as usize] += 1;
            return;
        }
        let (i, j) = cells[idx];
        let mut bound = by_volume.len() as i64 - 1 - used;
        if j > 0 {
            if let Some(v) = grid[i][j - 1] {
                bound = bound.min(v);
            }
        }
        if i > 0 {
            if let Some(v) = grid[i - 1][j] {
                bound = bound.min(v);
            }
        }
        for v in 0..=bound {
            grid[i][j] = Some(v);
            rec(idx + 1, cells, grid, used + v, by_volume);
        }
        grid[i][j] = None;
    }

    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidParameter(format!("q = {q} must lie in (0, 1)")));
    }
    rec(0, &cells, &mut grid, 0, &mut by_volume);
    let sum = by_volume.iter().enumerate().map(|(n, &c)| c as f64 * q.powi(n as i32)).sum();
    // Σ_{n > V} C(n+c−1, c−1) q^n, summed until the terms are negligible and falling
    let c = cells.len() as f64;
    let mut tail = 0.0;
    if !cells.is_empty() {
        let mut n = max_volume + 1;
        let mut log_binom: f64 = (1..=cells.len() - 1).map(|k| ((n as f64 + k as f64) / k as f64).ln()).sum();
        loop {
            let term = (log_binom + n as f64 * q.ln()).exp();
            tail += term;
            let ratio = (n as f64 + c) / (n as f64 + 1.0) * q;
            if ratio < 1.0 && term < 1e-30 * sum {
                break;
            }
            log_binom += ((n as f64 + c) / (n as f64 + 1.0)).ln();
            n += 1;
        }
    }
    Ok((sum, tail))
}

/// The Schur process law on chains whose partitions lie in a max_len ×
/// max_part box, dropping configurations below `min_prob`; the tail is the
/// rest of the mass, with Z from the product formula.
pub fn schur_process_measure(
    proc: &SchurProcessSpec,
    max_len: usize,
    max_part: i64,
    min_prob: f64,
) -> Result<TruncatedMeasure<crate::dynamics::SchurState>> {
    let z = partition_function_schur(proc)?;
    let n = proc.n();
    let plus: Vec<Specialization> = (0..n).map(|j| proc.plus_union(j)).collect();
    // λ_j also lies in 𝕐(ρ⁻_{[j,N]}) and μ_j in 𝕐(ρ⁻_{[j+1,N]})
    let levels: Vec<Vec<Partition>> = chain_levels(&plus, max_len, max_part)
        .into_iter()
        .enumerate()
        .map(|(k, states)| {
            let minus = proc.minus_union_from(k / 2 + 1 + k % 2);
            states.into_iter().filter(|x| schur(x, &minus) > 0.0).collect()
        })
        .collect();
    let mut items = Vec::new();
    let mut chain: Vec<Partition> = Vec::new();

    #[allow(clippy::too_many_arguments)]
    fn rec(
        k: usize,
        w: f64,
        chain: &mut Vec<Partition>,
        levels: &[Vec<Partition>],
        proc: &SchurProcessSpec,
        z: f64,
        min_prob: f64,
        items: &mut Vec<(crate::dynamics::SchurState, f64)>,
    ) -> Result<()> {
        if k == levels.len() {
            let top = chain.last().expect("nonempty chain");
            let p = w * schur(top, &proc.rho_minus[proc.n() - 1]) / z;
            if p > min_prob {
                items.push((crate::dynamics::SchurState::from_chain(chain.clone())?, p));
                if items.len() > STATE_CAP {
                    return Err(Error::EnumerationCap(STATE_CAP));
                }
            }
            return Ok(());
        }
        for x in &levels[k] {
            let f = match k {
                0 => schur(x, &proc.rho_plus[0]),
                // μ_j below λ_j
                _ if k % 2 == 1 => skew_schur(&chain[k - 1], x, &proc.rho_minus[(k - 1) / 2]),
                // λ_{j+1} above μ_j
                _ => skew_schur(x, &chain[k - 1], &proc.rho_plus[k / 2]),
            };
            if f > 0.0 {
                chain.push(x.clone());
                rec(k + 1, w * f, chain, levels, proc, z, min_prob, items)?;
                chain.pop();
            }
        }
        Ok(())
    }

    rec(0, 1.0, &mut chain, &levels, proc, z, min_prob, &mut items)?;
    TruncatedMeasure::from_probs(items)
}

/// Σ_{i ∈ 𝓛, j ∉ 𝓛, i < j} (j−i) q^{j−i} / (1 − q^{j−i}) over labels 1..=A+B.
pub fn mean_volume_closed_form(shape: &PlanePartitionShape, q: f64) -> f64 {
    let ups = shape.up_steps();
    let labels = 1..=shape.a + shape.b;
    let mut total = 0.0;
    for i in labels.clone().filter(|i| ups.contains(i)) {
        for j in labels.clone().filter(|j| !ups.contains(j) && *j > i) {
            let d = (j - i) as i32;
            let qd = q.powi(d);
            total += d as f64 * qd / (1.0 - qd);
        }
    }
    total
}

// ---------------------------------------------------------------------------
// statistics

pub fn histogram<T: Eq + Hash>(samples: impl IntoIterator<Item = T>) -> HashMap<T, u64> {
    let mut h = HashMap::new();
    for x in samples {
        *h.entry(x).or_insert(0) += 1;
    }
    h
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub bins: usize,
}

/// Pearson goodness of fit against a reference law. States with expected
/// count ≥ 5 get their own bin; everything else, the reference tail
/// included, is pooled, and a pooled bin that is still too small is merged
/// into the last regular bin.
pub fn chi_square<T: Clone + Eq + Hash>(counts: &HashMap<T, u64>, reference: &TruncatedMeasure<T>) -> Result<ChiSquare> {
    let s: u64 = counts.values().sum();
    if s == 0 {
        return Err(Error::InsufficientSamples("no samples".into()));
    }
    let sf = s as f64;
    let mut probs: Vec<(T, f64)> = reference.to_map().into_iter().collect();
    probs.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut obs = Vec::new();
    let mut exp = Vec::new();
    for (x, p) in &probs {
        if sf * p < MIN_EXPECTED {
            break;
        }
        obs.push(counts.get(x).copied().unwrap_or(0) as f64);
        exp.push(sf * p);
    }
    let rest_obs = sf - obs.iter().sum::<f64>();
    let rest_exp = (sf - exp.iter().sum::<f64>()).max(0.0);
    if rest_exp >= MIN_EXPECTED {
        obs.push(rest_obs);
        exp.push(rest_exp);
    } else if let (Some(o), Some(e)) = (obs.last_mut(), exp.last_mut()) {
        *o += rest_obs;
        *e += rest_exp;
    }
    if exp.len() < 2 {
        return Err(Error::InsufficientSamples(format!("{s} samples give fewer than two bins")));
    }
    let statistic: f64 = obs.iter().zip(&exp).map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = exp.len() - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok(ChiSquare { statistic, dof, p_value: dist.sf(statistic), bins: exp.len() })
}

/// Pearson test of uniformity over `cells` equally likely outcomes.
pub fn chi_square_uniform<T: Clone + Eq + Hash>(counts: &HashMap<T, u64>, cells: &[T]) -> Result<ChiSquare> {
    let p = 1.0 / cells.len() as f64;
    let reference = TruncatedMeasure::from_probs(cells.iter().map(|c| (c.clone(), p)).collect())?;
    chi_square(counts, &reference)
}

/// Total variation between the empirical law and a reference, counting the
/// reference tail as disagreement.
pub fn tv_distance<T: Clone + Eq + Hash>(counts: &HashMap<T, u64>, reference: &TruncatedMeasure<T>) -> f64 {
    let s: u64 = counts.values().sum();
    let sf = s.max(1) as f64;
    let r = reference.to_map();
    let mut l1 = 0.0;
    for (x, p) in &r {
        l1 += (counts.get(x).copied().unwrap_or(0) as f64 / sf - p).abs();
    }
    for (x, &c) in counts {
        if !r.contains_key(x) {
            l1 += c as f64 / sf;
        }
    }
    0.5 * (l1 + reference.tail_bound)
}

/// A two-sided binomial z-score of `k` successes in `n` trials against `p`.
pub fn binomial_z(k: u64, n: u64, p: f64) -> f64 {
    let nf = n as f64;
    (k as f64 - nf * p) / (nf * p * (1.0 - p)).sqrt()
}

// ---------------------------------------------------------------------------
// dense p↑ / p↓

/// The partitions of a max_len × max_part box in 𝕐(ρ); an order ideal of 𝕐(ρ).
///
/// Without γ the support lies in the (#α, #β) hook, which bounds the search.
pub fn support_truncation(rho: &Specialization, max_len: usize, max_part: i64) -> Vec<Partition> {
    let candidates = if rho.gamma() > 0.0 {
        partitions_in_box(max_len, max_part)
    } else {
        partitions_in_hook(max_len, max_part, rho.alphas().len(), rho.betas().len() as i64)
    };
    candidates.into_iter().filter(|l| schur(l, rho) > 0.0).collect()
}

fn partitions_in_hook(max_len: usize, max_part: i64, rows: usize, cols: i64) -> Vec<Partition> {
    fn rec(prefix: &mut Vec<i64>, max_len: usize, bound: i64, rows: usize, cols: i64, out: &mut Vec<Partition>) {
        out.push(Partition::new(prefix.clone()).expect("decreasing by construction"));
        if prefix.len() == max_len {
            return;
        }
        let cap = if prefix.len() >= rows { bound.min(cols) } else { bound };
        for v in 1..=cap {
            prefix.push(v);
            rec(prefix, max_len, v, rows, cols, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), max_len, max_part, rows, cols, &mut out);
    out
}

/// p↑(y; z) on `states` ⊆ 𝕐(y):
/// s_μ(y) s_{μ/λ}(z) / (s_λ(y) H(y; z)).
pub fn p_up_matrix(states: &[Partition], y: &Specialization, z: &Specialization) -> Result<DMatrix<f64>> {
    let h = pairing_h(y, z)?;
    let sy: Vec<f64> = states.iter().map(|l| schur(l, y)).collect();
    check_support(&sy)?;
    Ok(DMatrix::from_fn(states.len(), states.len(), |i, j| {
        sy[j] * skew_schur(&states[j], &states[i], z) / (sy[i] * h)
    }))
}

/// p↓(y; t) from `rows` ⊆ 𝕐(y ∪ t) to `cols` ⊆ 𝕐(y):
/// s_ν(y) s_{λ/ν}(t) / s_λ(y ∪ t).
pub fn p_down_matrix(rows: &[Partition], cols: &[Partition], y: &Specialization, t: &Specialization) -> Result<DMatrix<f64>> {
    let yt = y.union(t);
    let s_rows: Vec<f64> = rows.iter().map(|l| schur(l, &yt)).collect();
    check_support(&s_rows)?;
    let s_cols: Vec<f64> = cols.iter().map(|l| schur(l, y)).collect();
    Ok(DMatrix::from_fn(rows.len(), cols.len(), |i, j| s_cols[j] * skew_schur(&rows[i], &cols[j], t) / s_rows[i]))
}

fn check_support(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !(*v > 0.0)) {
        Some(i) => Err(Error::EmptySupport(format!("state {i} lies outside the support"))),
        None => Ok(()),
    }
}

/// 𝕊(x; y)(λ) = s_λ(x) s_λ(y) / H(x; y) on `states`.
pub fn schur_measure_vector(states: &[Partition], x: &Specialization, y: &Specialization) -> Result<Vec<f64>> {
    let h = pairing_h(x, y)?;
    Ok(states.iter().map(|l| schur(l, x) * schur(l, y) / h).collect())
}

/// Specializations for the p↑/p↓ identity checks. z and t play the roles
/// z₁, z₂ in the up-up commutation and t₁, t₂ (as t, z) in the down-down one.
#[derive(Clone, Debug)]
pub struct UpDownCheck {
    pub x: Specialization,
    pub y: Specialization,
    pub z: Specialization,
    pub t: Specialization,
    pub max_len: usize,
    pub max_part: i64,
}

/// Residuals of the five identities
///
/// 𝕊(x; y) p↑(y; z) = 𝕊(x ∪ z; y),
/// 𝕊(x; y ∪ t) p↓(y; t) = 𝕊(x; y),
/// p↑(y; z) p↑(y; t) = p↑(y; t) p↑(y; z),
/// p↓(y ∪ z; t) p↓(y; z) = p↓(y ∪ t; z) p↓(y; t),
/// p↑(y ∪ t; z) p↓(y; t) = p↓(y; t) p↑(y; z),
///
/// one per entry, on box truncations of the supports. Products that only
/// move down, or only up, stay inside the order ideal and are exact; the
/// remaining ones skip rows whose truncation deficit exceeds `row_tol`.
pub fn verify_p_updown(c: &UpDownCheck, row_tol: f64) -> Result<Vec<(String, Residual)>> {
    let trunc = |rho: &Specialization| support_truncation(rho, c.max_len, c.max_part);
    let ty = trunc(&c.y);
    let yt = c.y.union(&c.t);
    let yz = c.y.union(&c.z);
    let tyt = trunc(&yt);
    let tyz = trunc(&yz);
    let tyzt = trunc(&yz.union(&c.t));
    let mut out = Vec::new();

    let vec_residual = |lhs: &[f64], rhs: &[f64], tail: f64| Residual {
        max_residual: lhs.iter().zip(rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max),
        tail,
        rows_checked: lhs.len(),
    };
    let exact = |a: DMatrix<f64>, b: DMatrix<f64>| Residual {
        max_residual: (a - b).abs().max(),
        tail: 0.0,
        rows_checked: 0,
    };

    let up_z = p_up_matrix(&ty, &c.y, &c.z)?;
    let up_t = p_up_matrix(&ty, &c.y, &c.t)?;

    let s_xy = schur_measure_vector(&ty, &c.x, &c.y)?;
    let lhs: Vec<f64> = (0..ty.len()).map(|j| (0..ty.len()).map(|i| s_xy[i] * up_z[(i, j)]).sum()).collect();
    let rhs = schur_measure_vector(&ty, &c.x.union(&c.z), &c.y)?;
    out.push(("growth of a Schur measure".into(), vec_residual(&lhs, &rhs, 0.0)));

    let s_xyt = schur_measure_vector(&tyt, &c.x, &yt)?;
    let down_t = p_down_matrix(&tyt, &ty, &c.y, &c.t)?;
    let lhs: Vec<f64> = (0..ty.len()).map(|j| (0..tyt.len()).map(|i| s_xyt[i] * down_t[(i, j)]).sum()).collect();
    let tail = (1.0 - s_xyt.iter().sum::<f64>()).max(0.0);
    out.push(("decay of a Schur measure".into(), vec_residual(&lhs, &s_xy, tail)));

    let mut r = exact(&up_z * &up_t, &up_t * &up_z);
    r.rows_checked = ty.len();
    out.push(("up-up commutation".into(), r));

    let a = p_down_matrix(&tyzt, &tyz, &yz, &c.t)?;
    let b = p_down_matrix(&tyz, &ty, &c.y, &c.z)?;
    let cc = p_down_matrix(&tyzt, &tyt, &yt, &c.z)?;
    let d = p_down_matrix(&tyt, &ty, &c.y, &c.t)?;
    let mut r = exact(&a * &b, &cc * &d);
    r.rows_checked = tyzt.len();
    out.push(("down-down commutation".into(), r));

    let a = p_up_matrix(&tyt, &yt, &c.z)?;
    let d = p_up_matrix(&ty, &c.y, &c.z)?;
    out.push(("up-down commutation".into(), product_residual(&a, &down_t, &down_t, &d, row_tol)));
    Ok(out)
}

/// Dense link system of the growth dynamics on a process with N levels:
/// S_{2j−1} = S_{2j} = 𝕐(ρ⁺_{[0,j−1]}), links p↓(ρ⁺_{[0,j−1]}; ρ_j^+) and
/// p↑(ρ⁺_{[0,j−1]}; ρ_j^−), and P_k = p↑(·; π). Returns the system, the
/// state lists of each level and the top marginal 𝕊(ρ⁺_{[0,N−1]}; ρ_N^−).
pub fn growth_link_system(
    proc: &SchurProcessSpec,
    pi: &Specialization,
    max_len: usize,
    max_part: i64,
) -> Result<(LinkSystem, Vec<Vec<Partition>>, Vec<f64>)> {
    let plus: Vec<Specialization> = (0..proc.n()).map(|j| proc.plus_union(j)).collect();
    let levels = chain_levels(&plus, max_len, max_part);
    let p = levels.iter().enumerate().map(|(k, s)| p_up_matrix(s, &plus[k / 2], pi)).collect::<Result<Vec<_>>>()?;
    let links = chain_links(proc, &plus, &levels, &levels)?;
    let top = levels.last().expect("N ≥ 1");
    let m_n = schur_measure_vector(top, &proc.rho_minus[proc.n() - 1], &plus[proc.n() - 1])?;
    Ok((LinkSystem::new(p, links.clone(), links)?, levels, m_n))
}

/// Dense link system of the decay dynamics: the tilde side replaces ρ_0^+
/// by ρ_0^+/σ and P_k = p↓(·; σ). Returns the system, the state lists of
/// each level on both sides and the top marginal.
#[allow(clippy::type_complexity)]
pub fn decay_link_system(
    proc: &SchurProcessSpec,
    sigma: &Specialization,
    max_len: usize,
    max_part: i64,
) -> Result<(LinkSystem, Vec<Vec<Partition>>, Vec<Vec<Partition>>, Vec<f64>)> {
    let mut rho_plus = proc.rho_plus.clone();
    rho_plus[0] = rho_plus[0].divide(sigma)?;
    let flat = SchurProcessSpec::new(rho_plus, proc.rho_minus.clone())?;
    let plus: Vec<Specialization> = (0..proc.n()).map(|j| proc.plus_union(j)).collect();
    let plus_flat: Vec<Specialization> = (0..flat.n()).map(|j| flat.plus_union(j)).collect();
    let levels = chain_levels(&plus, max_len, max_part);
    let levels_flat = chain_levels(&plus_flat, max_len, max_part);
    let p = (0..levels.len())
        .map(|k| p_down_matrix(&levels[k], &levels_flat[k], &plus_flat[k / 2], sigma))
        .collect::<Result<Vec<_>>>()?;
    let links = chain_links(proc, &plus, &levels, &levels)?;
    let links_flat = chain_links(&flat, &plus_flat, &levels_flat, &levels_flat)?;
    let top = levels.last().expect("N ≥ 1");
    let m_n = schur_measure_vector(top, &proc.rho_minus[proc.n() - 1], &plus[proc.n() - 1])?;
    Ok((LinkSystem::new(p, links, links_flat)?, levels, levels_flat, m_n))
}

fn chain_levels(plus: &[Specialization], max_len: usize, max_part: i64) -> Vec<Vec<Partition>> {
    let n = 2 * plus.len() - 1;
    let by_j: Vec<Vec<Partition>> = plus.iter().map(|p| support_truncation(p, max_len, max_part)).collect();
    (0..n).map(|k| by_j[k / 2].clone()).collect()
}

fn chain_links(
    proc: &SchurProcessSpec,
    plus: &[Specialization],
    rows: &[Vec<Partition>],
    cols: &[Vec<Partition>],
) -> Result<Vec<DMatrix<f64>>> {
    // 0-based level k holds λ_{k/2+1} for even k and μ_{(k+1)/2} for odd k
    (1..rows.len())
        .map(|k| {
            let j = k.div_ceil(2);
            if k % 2 == 1 {
                p_up_matrix(&rows[k], &plus[j - 1], &proc.rho_minus[j - 1])
            } else {
                p_down_matrix(&rows[k], &cols[k - 1], &plus[j - 1], &proc.rho_plus[j])
            }
        })
        .collect()
}

/// Pairs the truncated measure of a dense system's top level with state labels.
pub fn label_measure<T: Clone + Eq + Hash>(dist: Vec<(Vec<usize>, f64)>, label: impl Fn(&[usize]) -> T) -> TruncatedMeasure<T> {
    let mut m: HashMap<T, f64> = HashMap::new();
    for (x, p) in dist {
        *m.entry(label(&x)).or_insert(0.0) += p;
    }
    let items: Vec<(T, f64)> = m.into_iter().collect();
    let total: f64 = items.iter().map(|(_, p)| p).sum();
    let (support, probs) = items.into_iter().unzip();
    TruncatedMeasure { support, probs, tail_bound: (1.0 - total).max(0.0) }
}

// ---------------------------------------------------------------------------
// signatures and Gelfand–Tsetlin patterns

/// Signatures of length len(λ)−1 interlacing λ from below.
pub fn interlacing_below(lam: &Signature) -> Vec<Signature> {
    let n = lam.len();
    if n == 0 {
        return Vec::new();
    }
    let mut out = vec![Vec::with_capacity(n - 1)];
    for i in 0..n - 1 {
        let mut next = Vec::new();
        for prefix in &out {
            for v in lam.part(i + 1)..=lam.part(i) {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    out.into_iter().map(|v| Signature::new(v).expect("interlacing parts decrease")).collect()
}

/// Every Gelfand–Tsetlin pattern with top row `top`.
pub fn gt_patterns_below(top: &Signature) -> Vec<GTPattern> {
    fn rec(stack: &mut Vec<Signature>, out: &mut Vec<GTPattern>) {
        let last = stack.last().expect("nonempty").clone();
        if last.len() == 1 {
            let levels = stack.iter().rev().cloned().collect();
            out.push(GTPattern::new(levels).expect("interlacing by construction"));
            return;
        }
        for s in interlacing_below(&last) {
            stack.push(s);
            rec(stack, out);
            stack.pop();
        }
    }
    let mut out = Vec::new();
    if !top.is_empty() {
        rec(&mut vec![top.clone()], &mut out);
    }
    out
}

/// The rational Schur function s_λ(a_1, …, a_n) by branching,
/// s_λ(a) = Σ_{μ ≺ λ} s_μ(a_1, …, a_{n−1}) a_n^{|λ|−|μ|}.
pub fn schur_poly_sig(lam: &Signature, a: &[f64]) -> Result<f64> {
    if lam.len() != a.len() {
        return Err(Error::LengthMismatch { expected: a.len(), got: lam.len() });
    }
    let mut memo = HashMap::new();
    Ok(schur_poly_rec(lam, a, &mut memo))
}

fn schur_poly_rec(lam: &Signature, a: &[f64], memo: &mut HashMap<Signature, f64>) -> f64 {
    let n = lam.len();
    if n == 0 {
        return 1.0;
    }
    if let Some(&v) = memo.get(lam) {
        return v;
    }
    let an = a[n - 1];
    let v = interlacing_below(lam)
        .iter()
        .map(|mu| schur_poly_rec(mu, &a[..n - 1], memo) * an.powi((lam.size() - mu.size()) as i32))
        .sum();
    memo.insert(lam.clone(), v);
    v
}

/// T(a_1..a_n; M)_{λμ} = s_μ(a)/s_λ(a) · s_{λ/μ}(M) / ∏_j H(M; a_j^{−1}) on `states`.
pub fn t_matrix(states: &[Signature], a: &[f64], m: &EdreiSpec, tail_tol: f64) -> Result<DMatrix<f64>> {
    let h: f64 = a.iter().map(|&aj| m.eval_h(1.0 / aj)).product();
    let s: Vec<f64> = states.iter().map(|l| schur_poly_sig(l, a)).collect::<Result<_>>()?;
    let mut t = DMatrix::zeros(states.len(), states.len());
    for (i, lam) in states.iter().enumerate() {
        for (j, mu) in states.iter().enumerate() {
            let v = skew_schur_sig(lam, mu, m, tail_tol)?;
            if v != 0.0 {
                t[(i, j)] = s[j] / s[i] * v / h;
            }
        }
    }
    Ok(t)
}

/// T(a_1..a_n)_{λμ} = s_μ(a_1..a_{n−1}) a_n^{|λ|−|μ|} / s_λ(a) for μ ≺ λ.
pub fn t_branch_matrix(rows: &[Signature], cols: &[Signature], a: &[f64]) -> Result<DMatrix<f64>> {
    let n = a.len();
    let sr: Vec<f64> = rows.iter().map(|l| schur_poly_sig(l, a)).collect::<Result<_>>()?;
    let sc: Vec<f64> = cols.iter().map(|l| schur_poly_sig(l, &a[..n - 1])).collect::<Result<_>>()?;
    let mut t = DMatrix::zeros(rows.len(), cols.len());
    for (i, lam) in rows.iter().enumerate() {
        for (j, mu) in cols.iter().enumerate() {
            let v = skew_schur_branch(lam, mu, a[n - 1])?;
            if v != 0.0 {
                t[(i, j)] = sc[j] * v / sr[i];
            }
        }
    }
    Ok(t)
}

/// Residuals of stochasticity, T(a; M) T(a) = T(a) T(a₁..a_{n−1}; M) and
/// T(a; M₁) T(a; M₂) = T(a; M₂) T(a; M₁) for finitely supported M (β
/// parameters only), on signatures with entries in [lo, hi]. Only rows far
/// enough from the boundary that no step leaves the window are compared.
pub fn verify_t_relations(a: &[f64], ms: &[EdreiSpec], lo: i64, hi: i64) -> Result<Vec<(String, Residual)>> {
    let n = a.len();
    if n < 2 {
        return Err(Error::InvalidParameter("T-matrix relations need n ≥ 2".into()));
    }
    let reach = |m: &EdreiSpec| -> Result<i64> {
        if !m.alpha_plus.is_empty() || !m.alpha_minus.is_empty() || m.has_gamma() {
            return Err(Error::InvalidParameter("T-matrix checks need finitely supported M".into()));
        }
        Ok((m.beta_plus.len() + m.beta_minus.len()) as i64)
    };
    let rows_n = signatures_in_range(n, lo, hi);
    let rows_m = signatures_in_range(n - 1, lo, hi);
    let branch = t_branch_matrix(&rows_n, &rows_m, a)?;
    let interior = |s: &Signature, margin: i64| (0..s.len()).all(|i| s.part(i) >= lo + margin && s.part(i) <= hi - margin);
    let masked = |lhs: DMatrix<f64>, rhs: DMatrix<f64>, rows: &[Signature], margin: i64| {
        let mut r = Residual::default();
        for (i, s) in rows.iter().enumerate() {
            if !interior(s, margin) {
                continue;
            }
            r.rows_checked += 1;
            for j in 0..lhs.ncols() {
                r.max_residual = r.max_residual.max((lhs[(i, j)] - rhs[(i, j)]).abs());
            }
        }
        r
    };
    let stochastic = |t: &DMatrix<f64>, rows: &[Signature], margin: i64| {
        let mut r = Residual::default();
        for (i, s) in rows.iter().enumerate() {
            if interior(s, margin) {
                r.rows_checked += 1;
                r.max_residual = r.max_residual.max((1.0 - t.row(i).sum()).abs());
            }
        }
        r
    };

    let mut out = vec![("T(a) stochastic".to_string(), stochastic(&branch, &rows_n, 0))];
    let mut tn = Vec::new();
    for (idx, m) in ms.iter().enumerate() {
        let w = reach(m)?;
        let t = t_matrix(&rows_n, a, m, 1e-15)?;
        let t_low = t_matrix(&rows_m, &a[..n - 1], m, 1e-15)?;
        out.push((format!("T(a; M{}) stochastic", idx + 1), stochastic(&t, &rows_n, w)));
        out.push((
            format!("T(a; M{}) T(a) = T(a) T(a'; M{})", idx + 1, idx + 1),
            masked(&t * &branch, &branch * &t_low, &rows_n, w),
        ));
        tn.push((t, w));
    }
    for i in 0..tn.len() {
        for j in i + 1..tn.len() {
            let ((ti, wi), (tj, wj)) = (&tn[i], &tn[j]);
            out.push((
                format!("T(a; M{}) T(a; M{}) commute", i + 1, j + 1),
                masked(ti * tj, tj * ti, &rows_n, wi + wj),
            ));
        }
    }
    Ok(out)
}

/// All two-sided configurations with every entry in [lo, hi] and positive
/// weight, with probabilities W/Z; the tail is the mass outside the window.
pub fn two_sided_measure(spec: &TwoSidedSpec, lo: i64, hi: i64, tail_tol: f64) -> Result<TruncatedMeasure<TwoSidedState>> {
    spec.validate()?;
    let z = partition_function_two_sided(spec, tail_tol)?;
    let psi = PsiEval::new(&spec.psi, tail_tol)?;
    let ranges: Vec<Vec<Signature>> = (1..=spec.n()).map(|k| signatures_in_range(k, lo, hi)).collect();
    let mut positions = Vec::new();
    for k in 0..spec.n() {
        for l in 0..=spec.c[k] {
            positions.push((k, l));
        }
    }
    let mut items = Vec::new();
    let mut chain: Vec<Signature> = Vec::new();

    #[allow(clippy::too_many_arguments)]
    fn rec(
        idx: usize,
        positions: &[(usize, usize)],
        ranges: &[Vec<Signature>],
        chain: &mut Vec<Signature>,
        spec: &TwoSidedSpec,
        psi: &PsiEval<'_>,
        z: f64,
        tol: f64,
        items: &mut Vec<(TwoSidedState, f64)>,
    ) -> Result<()> {
        if idx == positions.len() {
            let state = TwoSidedState::from_chain(chain.clone(), spec)?;
            let w = two_sided_weight_with(&state.levels, spec, psi, tol)?;
            if w > 0.0 {
                items.push((state, w / z));
            }
            if items.len() > STATE_CAP {
                return Err(Error::EnumerationCap(STATE_CAP));
            }
            return Ok(());
        }
        let (k, l) = positions[idx];
        for s in &ranges[k] {
            let factor = match (idx, l) {
                (0, _) => skew_schur_branch(s, &Signature::empty(), spec.a[0])?,
                (_, 0) => skew_schur_branch(s, chain.last().expect("previous level"), spec.a[k])?,
                _ => skew_schur_sig(s, chain.last().expect("previous entry"), &spec.m[k][l - 1], tol)?,
            };
            if factor > 0.0 {
                chain.push(s.clone());
                rec(idx + 1, positions, ranges, chain, spec, psi, z, tol, items)?;
                chain.pop();
            }
        }
        Ok(())
    }

    rec(0, &positions, &ranges, &mut chain, spec, &psi, z, tail_tol, &mut items)?;
    TruncatedMeasure::from_probs(items)
}

/// Law of the single entry of level 1 under the character measure with
/// H(χ; u) = Σ ψ_k u^k: P(t_1 = k) = ψ_k.
pub fn gt_level1_law(chi: &EdreiSpec, tol: f64) -> Result<TruncatedMeasure<i64>> {
    let series = chi.laurent_series(tol)?;
    let items = series.coeffs.iter().enumerate().map(|(i, &p)| (series.offset + i as i64, p)).collect();
    TruncatedMeasure::from_probs(items)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p(v: &[i64]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    fn sig(v: &[i64]) -> Signature {
        Signature::new(v.to_vec()).unwrap()
    }

    #[test]
    fn spp_enumeration_matches_transfer_count() {
        for (a, b, pi, cap) in [(1, 1, vec![], 5), (2, 2, vec![], 4), (2, 3, vec![1], 3), (3, 3, vec![2, 1], 3)] {
            let shape = PlanePartitionShape::new(a, b, p(&pi)).unwrap();
            let n = enumerate_spp(&shape, cap, 1_000_000).unwrap().len() as u128;
            assert_eq!(n, count_spp_transfer(&shape, cap), "{a}x{b} π={pi:?}");
        }
        // 2x2 box, entries ≤ 1: monotone 0/1 fillings are order ideals of a 2x2 grid
        assert_eq!(count_spp_transfer(&PlanePartitionShape::full_box(2, 2).unwrap(), 1), 6);
    }

    #[test]
    fn one_by_one_box_is_geometric() {
        let shape = PlanePartitionShape::full_box(1, 1).unwrap();
        let m = exact_spp_measure(&shape, 0.5, 40).unwrap();
        for (pp, prob) in m.iter() {
            assert_abs_diff_eq!(prob, 0.5f64.powi(pp.volume() as i32 + 1), epsilon = 1e-15);
        }
        assert!(m.tail_bound < 1e-12);
        assert_abs_diff_eq!(mean_volume_closed_form(&shape, 0.5), 1.0, epsilon = 1e-15);
        let shape = PlanePartitionShape::full_box(1, 2).unwrap();
        assert_abs_diff_eq!(mean_volume_closed_form(&shape, 0.5), 5.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn definitional_sum_matches_product() {
        for (a, b, pi) in [(1, 1, vec![]), (1, 2, vec![]), (2, 2, vec![1])] {
            let shape = PlanePartitionShape::new(a, b, p(&pi)).unwrap();
            let z = partition_function_schur(&spp_process_spec(&shape, 0.3).unwrap()).unwrap();
            let (sum, tail) = definitional_partition_function(&shape, 0.3, 40).unwrap();
            assert!(tail < 1e-12, "{tail}");
            assert!((sum - z).abs() <= tail + 1e-13 * z, "{sum} vs {z}");
        }
    }

    #[test]
    fn process_measure_sums_to_one() {
        let proc = SchurProcessSpec::new(
            vec![Specialization::beta(0.2).unwrap(), Specialization::alpha(0.3).unwrap()],
            vec![Specialization::alpha(0.25).unwrap(), Specialization::beta(0.3).unwrap()],
        )
        .unwrap();
        let m = schur_process_measure(&proc, 10, 12, 0.0).unwrap();
        assert!(m.tail_bound < 1e-6, "{}", m.tail_bound);
    }

    #[test]
    fn chi_square_pools_small_bins() {
        let reference = TruncatedMeasure::from_probs(vec![(0, 0.5), (1, 0.3), (2, 0.199), (3, 0.001)]).unwrap();
        let counts: HashMap<i32, u64> = [(0, 500), (1, 300), (2, 199), (3, 1)].into_iter().collect();
        let c = chi_square(&counts, &reference).unwrap();
        assert_eq!(c.bins, 3);
        assert!(c.statistic < 1e-9);
        assert!(c.p_value > 0.999);
        assert_abs_diff_eq!(tv_distance(&counts, &reference), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn p_updown_identities_hold() {
        let c = UpDownCheck {
            x: Specialization::alpha(0.3).unwrap(),
            y: Specialization::new(vec![0.4], vec![0.3], 0.0).unwrap(),
            z: Specialization::alpha(0.2).unwrap(),
            t: Specialization::beta(0.5).unwrap(),
            max_len: 4,
            max_part: 8,
        };
        for (name, r) in verify_p_updown(&c, 1e-10).unwrap() {
            assert!(r.within(1e-12), "{name}: {r:?}");
        }
    }

    #[test]
    fn schur_poly_of_signatures() {
        assert_abs_diff_eq!(schur_poly_sig(&sig(&[1, 0]), &[2.0, 3.0]).unwrap(), 5.0, epsilon = 1e-12);
        // s_{(0,−1)}(a, b) = 1/a + 1/b
        assert_abs_diff_eq!(schur_poly_sig(&sig(&[0, -1]), &[2.0, 4.0]).unwrap(), 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(schur_poly_sig(&sig(&[2, 2]), &[1.0, 1.0]).unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(gt_patterns_below(&sig(&[3, 1, 0])).len() as u128, crate::combinatorics::count_gt_patterns(&sig(&[3, 1, 0])));
    }

    #[test]
    fn t_relations_hold() {
        let ms = [
            EdreiSpec::new(vec![], vec![], vec![0.3], vec![], 0.0, 0.0).unwrap(),
            EdreiSpec::new(vec![], vec![], vec![], vec![0.5], 0.0, 0.0).unwrap(),
        ];
        for a in [[1.0, 1.0], [0.9, 1.1]] {
            for (name, r) in verify_t_relations(&a, &ms, -4, 4).unwrap() {
                assert!(r.rows_checked > 0, "{name}");
                assert!(r.within(1e-12), "{name}: {r:?}");
            }
        }
    }

    #[test]
    fn level_one_law_is_laurent() {
        let chi = EdreiSpec::new(vec![0.2], vec![0.1], vec![], vec![], 0.0, 0.0).unwrap();
        let m = gt_level1_law(&chi, 1e-14).unwrap();
        assert!((m.total() - 1.0).abs() < 1e-12);
        assert!(m.prob(&0) > m.prob(&1));
    }
}
