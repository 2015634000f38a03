//! Markov dynamics on Schur processes built from the sequential update of
//! intertwined chains: growth (ℙ↑_π adds π to ρ_N^−), decay (ℙ↓_σ removes
//! σ from ρ_0^+) and the two-sided step ℙ_Q (multiplies Ψ by Q).
//!
//! A state is read as a chain x_1, …, x_n (λ^{(1)}, μ^{(1)}, λ^{(2)}, … for
//! one-sided processes; λ^{(1,0)}, …, λ^{(1,c(1))}, λ^{(2,0)}, … for
//! two-sided ones). One step replaces x_k by a draw from a kernel whose
//! arguments are the new y_{k−1} and the old x_k.

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::combinatorics::{Partition, Signature};
use crate::error::{Error, Result};
use crate::kernels::{DrawCounter, KernelMode, PartitionKernel, SignatureKernel};
use crate::measure::TruncatedMeasure;
use crate::schur_eval::{skew_schur_branch, skew_schur_positive, skew_schur_sig_single, SchurProcessSpec, TwoSidedSpec};
use crate::specializations::{pairing_h, EdreiSpec, SingleEdrei, SingleSpec, Specialization};

/// Per-kernel truncation used by the exact one-step distributions.
pub const STEP_TOL: f64 = 1e-15;

/// (λ^{(1)}, …, λ^{(N)}; μ^{(1)}, …, μ^{(N−1)}) of a one-sided Schur process.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SchurState {
    pub lambdas: Vec<Partition>,
    pub mus: Vec<Partition>,
}

impl SchurState {
    pub fn empty(n: usize) -> Self {
        SchurState { lambdas: vec![Partition::empty(); n], mus: vec![Partition::empty(); n.saturating_sub(1)] }
    }

    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    /// λ^{(1)}, μ^{(1)}, λ^{(2)}, …, λ^{(N)}.
    pub fn chain(&self) -> Vec<Partition> {
        let mut out = Vec::with_capacity(2 * self.n());
        for (k, lam) in self.lambdas.iter().enumerate() {
            out.push(lam.clone());
            if let Some(mu) = self.mus.get(k) {
                out.push(mu.clone());
            }
        }
        out
    }

    pub fn from_chain(chain: Vec<Partition>) -> Result<Self> {
        if chain.len().is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("a state chain has odd length, got {}", chain.len())));
        }
        let mut lambdas = Vec::new();
        let mut mus = Vec::new();
        for (i, p) in chain.into_iter().enumerate() {
            if i % 2 == 0 { lambdas.push(p) } else { mus.push(p) }
        }
        Ok(SchurState { lambdas, mus })
    }

    /// Appends λ^{(N+1)} = μ^{(N)} = ∅.
    pub fn extended(&self) -> Self {
        let mut s = self.clone();
        s.mus.push(Partition::empty());
        s.lambdas.push(Partition::empty());
        s
    }

    /// Whether every factor of the weight is positive.
    pub fn in_support(&self, spec: &SchurProcessSpec) -> bool {
        let n = spec.n();
        if self.n() != n || self.mus.len() + 1 != n {
            return false;
        }
        let empty = Partition::empty();
        if !positive(&self.lambdas[0], &empty, &spec.rho_plus[0]) {
            return false;
        }
        for k in 1..n {
            let mu = &self.mus[k - 1];
            if !positive(&self.lambdas[k - 1], mu, &spec.rho_minus[k - 1]) || !positive(&self.lambdas[k], mu, &spec.rho_plus[k]) {
                return false;
            }
        }
        positive(&self.lambdas[n - 1], &empty, &spec.rho_minus[n - 1])
    }
}

fn positive(outer: &Partition, inner: &Partition, rho: &Specialization) -> bool {
    skew_schur_positive(outer, inner, rho)
}

/// `levels[k−1]` = (λ^{(k,0)}, …, λ^{(k,c(k))}), each a signature of length k.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TwoSidedState {
    pub levels: Vec<Vec<Signature>>,
}

impl TwoSidedState {
    pub fn zeros(spec: &TwoSidedSpec) -> Self {
        let levels = (1..=spec.n()).map(|k| vec![Signature::zeros(k); spec.c[k - 1] + 1]).collect();
        TwoSidedState { levels }
    }

    pub fn chain(&self) -> Vec<Signature> {
        self.levels.iter().flatten().cloned().collect()
    }

    pub fn from_chain(chain: Vec<Signature>, spec: &TwoSidedSpec) -> Result<Self> {
        let total: usize = spec.c.iter().map(|c| c + 1).sum();
        if chain.len() != total {
            return Err(Error::LengthMismatch { expected: total, got: chain.len() });
        }
        let mut it = chain.into_iter();
        let levels = spec.c.iter().map(|&c| it.by_ref().take(c + 1).collect()).collect();
        Ok(TwoSidedState { levels })
    }

    /// Whether every branching and M-factor of the weight is positive.
    pub fn in_support(&self, spec: &TwoSidedSpec) -> bool {
        if self.levels.len() != spec.n() {
            return false;
        }
        let mut prev = Signature::empty();
        for (k, level) in self.levels.iter().enumerate() {
            if level.len() != spec.c[k] + 1 || level.iter().any(|s| s.len() != k + 1) {
                return false;
            }
            if !matches!(skew_schur_branch(&level[0], &prev, spec.a[k]), Ok(w) if w > 0.0) {
                return false;
            }
            for l in 1..level.len() {
                let ok = match spec.m[k][l - 1].single() {
                    Ok(m) => matches!(skew_schur_sig_single(&level[l], &level[l - 1], m), Ok(w) if w > 0.0),
                    Err(_) => true,
                };
                if !ok {
                    return false;
                }
            }
            prev = level[level.len() - 1].clone();
        }
        true
    }
}

fn single_of(rho: &Specialization, what: &str) -> Result<SingleSpec> {
    rho.single().map_err(|e| match e {
        Error::NotSingleParameter(_) => Error::NotSingleParameter(format!("{what} = {rho:?}")),
        e => e,
    })
}

/// Kernel data for coordinate i of a one-sided chain.
struct OneSidedStep {
    rho: SingleSpec,
    mode: KernelMode,
}

fn up_steps(proc: &SchurProcessSpec, pi: SingleSpec) -> Result<Vec<OneSidedStep>> {
    let n = proc.n();
    let mut steps = Vec::with_capacity(2 * n - 1);
    for k in 0..n {
        steps.push(OneSidedStep { rho: single_of(&proc.rho_plus[k], &format!("ρ_{k}^+"))?, mode: KernelMode::UpUp });
        if k + 1 < n {
            let rho = single_of(&proc.rho_minus[k], &format!("ρ_{}^−", k + 1))?;
            steps.push(OneSidedStep { rho, mode: KernelMode::DownUp });
        }
    }
    let plus = proc.plus_union(n - 1);
    let pi_spec = single_spec(pi)?;
    pairing_h(&plus, &pi_spec)?;
    Ok(steps)
}

fn down_steps(proc: &SchurProcessSpec, sigma: &Specialization) -> Result<Vec<OneSidedStep>> {
    let flat = proc.rho_plus[0].divide(sigma)?;
    let n = proc.n();
    let mut steps = Vec::with_capacity(2 * n - 1);
    for k in 0..n {
        let rho = if k == 0 { &flat } else { &proc.rho_plus[k] };
        steps.push(OneSidedStep { rho: single_of(rho, &format!("ρ_{k}^+ after removal"))?, mode: KernelMode::UpDown });
        if k + 1 < n {
            let rho = single_of(&proc.rho_minus[k], &format!("ρ_{}^−", k + 1))?;
            steps.push(OneSidedStep { rho, mode: KernelMode::DownDown });
        }
    }
    Ok(steps)
}

fn single_spec(s: SingleSpec) -> Result<Specialization> {
    match s {
        SingleSpec::Trivial => Ok(Specialization::trivial()),
        SingleSpec::Alpha(a) => Specialization::alpha(a),
        SingleSpec::Beta(b) => Specialization::beta(b),
    }
}

fn one_sided_kernel(step: &OneSidedStep, prev: &Partition, old: &Partition, pi: SingleSpec, i: usize) -> Result<PartitionKernel> {
    PartitionKernel::new(prev, old, step.rho, pi, step.mode).map_err(|e| {
        Error::Invariant(format!("kernel {:?} at chain position {} from ({prev}, {old}): {e}", step.mode, i + 1))
    })
}

fn run_one_sided<R: Rng + ?Sized>(
    state: &SchurState,
    steps: &[OneSidedStep],
    pi: SingleSpec,
    rng: &mut R,
    counter: &mut DrawCounter,
) -> Result<SchurState> {
    let old = state.chain();
    let mut new: Vec<Partition> = Vec::with_capacity(old.len());
    for (i, (step, x)) in steps.iter().zip(&old).enumerate() {
        let prev = new.last().cloned().unwrap_or_else(Partition::empty);
        let k = one_sided_kernel(step, &prev, x, pi, i)?;
        new.push(k.sample(rng, counter));
    }
    SchurState::from_chain(new)
}

fn distribution_one_sided(state: &SchurState, steps: &[OneSidedStep], pi: SingleSpec, tol: f64) -> Result<TruncatedMeasure<SchurState>> {
    let old = state.chain();
    let m = chain_distribution(old.len(), |i, prefix: &[Partition]| {
        let prev = prefix.last().cloned().unwrap_or_else(Partition::empty);
        one_sided_kernel(&steps[i], &prev, &old[i], pi, i)?.distribution(tol)
    })?;
    into_states(m, SchurState::from_chain)
}

fn into_states<T, S: Clone + Eq + std::hash::Hash>(
    m: TruncatedMeasure<Vec<T>>,
    f: impl Fn(Vec<T>) -> Result<S>,
) -> Result<TruncatedMeasure<S>> {
    let tail = m.tail_bound;
    let mut out = TruncatedMeasure::from_probs(
        m.support.into_iter().zip(m.probs).map(|(c, p)| Ok((f(c)?, p))).collect::<Result<Vec<_>>>()?,
    )?;
    out.tail_bound = out.tail_bound.max(tail);
    Ok(out)
}

/// Law of a chain drawn coordinate by coordinate, each from a truncated
/// conditional law given the coordinates already drawn.
pub fn chain_distribution<T: Clone + Eq + std::hash::Hash>(
    len: usize,
    step: impl Fn(usize, &[T]) -> Result<TruncatedMeasure<T>>,
) -> Result<TruncatedMeasure<Vec<T>>> {
    let mut items: Vec<(Vec<T>, f64)> = Vec::new();
    let mut stack: Vec<(Vec<T>, f64)> = vec![(Vec::new(), 1.0)];
    while let Some((prefix, p)) = stack.pop() {
        if prefix.len() == len {
            items.push((prefix, p));
            continue;
        }
        let m = step(prefix.len(), &prefix)?;
        for (x, q) in m.iter() {
            let mut next = prefix.clone();
            next.push(x.clone());
            stack.push((next, p * q));
        }
    }
    let mut m = TruncatedMeasure::from_probs(items)?;
    m.tail_bound = (1.0 - m.total()).max(0.0);
    Ok(m)
}

/// One step of ℙ↑_π. Multi-parameter π is applied one parameter at a time,
/// α's first; every ρ_j^± with j < N must have at most one parameter.
pub fn apply_up<R: Rng + ?Sized>(
    state: &SchurState,
    proc: &SchurProcessSpec,
    pi: &Specialization,
    rng: &mut R,
    counter: &mut DrawCounter,
) -> Result<SchurState> {
    check_n(state.n(), proc.n())?;
    let mut cur = state.clone();
    for piece in pi.decompose()? {
        let steps = up_steps(proc, piece)?;
        cur = run_one_sided(&cur, &steps, piece, rng, counter)?;
    }
    Ok(cur)
}

/// The exact law of one ℙ↑_π step from `state`, up to kernel truncation `tol`.
pub fn apply_up_distribution(state: &SchurState, proc: &SchurProcessSpec, pi: &Specialization, tol: f64) -> Result<TruncatedMeasure<SchurState>> {
    check_n(state.n(), proc.n())?;
    let mut m = TruncatedMeasure::point(state.clone());
    for piece in pi.decompose()? {
        let steps = up_steps(proc, piece)?;
        m = push_forward(&m, |s| distribution_one_sided(s, &steps, piece, tol))?;
    }
    Ok(m)
}

/// The process after removing σ from ρ_0^+.
pub fn decayed_spec(proc: &SchurProcessSpec, sigma: &Specialization) -> Result<SchurProcessSpec> {
    let mut rho_plus = proc.rho_plus.clone();
    rho_plus[0] = rho_plus[0].divide(sigma)?;
    SchurProcessSpec::new(rho_plus, proc.rho_minus.clone())
}

/// One step of ℙ↓_σ. σ must divide ρ_0^+; multi-parameter σ is removed one
/// parameter at a time.
pub fn apply_down<R: Rng + ?Sized>(
    state: &SchurState,
    proc: &SchurProcessSpec,
    sigma: &Specialization,
    rng: &mut R,
    counter: &mut DrawCounter,
) -> Result<SchurState> {
    check_n(state.n(), proc.n())?;
    proc.rho_plus[0].divide(sigma)?;
    let mut cur = state.clone();
    let mut spec = proc.clone();
    for piece in sigma.decompose()? {
        let piece_spec = single_spec(piece)?;
        let steps = down_steps(&spec, &piece_spec)?;
        cur = run_one_sided(&cur, &steps, piece, rng, counter)?;
        spec = decayed_spec(&spec, &piece_spec)?;
    }
    Ok(cur)
}

pub fn apply_down_distribution(
    state: &SchurState,
    proc: &SchurProcessSpec,
    sigma: &Specialization,
    tol: f64,
) -> Result<TruncatedMeasure<SchurState>> {
    check_n(state.n(), proc.n())?;
    proc.rho_plus[0].divide(sigma)?;
    let mut m = TruncatedMeasure::point(state.clone());
    let mut spec = proc.clone();
    for piece in sigma.decompose()? {
        let piece_spec = single_spec(piece)?;
        let steps = down_steps(&spec, &piece_spec)?;
        m = push_forward(&m, |s| distribution_one_sided(s, &steps, piece, tol))?;
        spec = decayed_spec(&spec, &piece_spec)?;
    }
    Ok(m)
}

fn check_n(state: usize, spec: usize) -> Result<()> {
    if state != spec {
        return Err(Error::LengthMismatch { expected: spec, got: state });
    }
    Ok(())
}

/// m ↦ Σ_x m(x) K(x, ·), accumulating every truncation into the tail.
pub fn push_forward<T: Clone + Eq + std::hash::Hash>(
    m: &TruncatedMeasure<T>,
    kernel: impl Fn(&T) -> Result<TruncatedMeasure<T>>,
) -> Result<TruncatedMeasure<T>> {
    let mut acc: std::collections::HashMap<T, f64> = std::collections::HashMap::new();
    let mut order = Vec::new();
    for (x, p) in m.iter() {
        for (y, q) in kernel(x)?.iter() {
            match acc.get_mut(y) {
                Some(v) => *v += p * q,
                None => {
                    order.push(y.clone());
                    acc.insert(y.clone(), p * q);
                }
            }
        }
    }
    let items = order.into_iter().map(|y| { let p = acc[&y]; (y, p) }).collect();
    TruncatedMeasure::from_probs(items)
}

fn q_pieces(spec: &TwoSidedSpec, q: &EdreiSpec) -> Result<Vec<SingleEdrei>> {
    let pieces = q.decompose()?;
    for piece in &pieces {
        let ann = piece.to_spec().analyticity_annulus();
        if let Some(&a) = spec.a.iter().find(|&&a| !ann.contains(a)) {
            return Err(Error::AnnulusViolation { a, r1: ann.r1, r2: ann.r2 });
        }
    }
    Ok(pieces)
}

/// Kernel for position (k, l) of a two-sided chain, 0-based k.
fn two_sided_kernel(spec: &TwoSidedSpec, k: usize, l: usize, prev: &Signature, old: &Signature, q: SingleEdrei) -> Result<SignatureKernel> {
    let built = if l == 0 {
        SignatureKernel::branch(prev, old, spec.a[k], q)
    } else {
        let m = spec.m[k][l - 1]
            .single()
            .map_err(|_| Error::NotSingleParameter(format!("M^({},{}) = {:?}", k + 1, l, spec.m[k][l - 1])))?;
        SignatureKernel::pair(prev, old, m, q)
    };
    built.map_err(|e| match e {
        Error::NotSingleParameter(_) | Error::InvalidParameter(_) => e,
        e => Error::Invariant(format!("two-sided kernel at ({}, {l}) from ({prev}, {old}): {e}", k + 1)),
    })
}

fn positions(spec: &TwoSidedSpec) -> Vec<(usize, usize)> {
    spec.c.iter().enumerate().flat_map(|(k, &c)| (0..=c).map(move |l| (k, l))).collect()
}

/// One step of ℙ_Q; a multi-parameter Q is applied one parameter at a time
/// in the order α⁺, α⁻, β⁺, β⁻. Every M^{(k,l)} must have at most one parameter.
pub fn apply_q<R: Rng + ?Sized>(
    state: &TwoSidedState,
    spec: &TwoSidedSpec,
    q: &EdreiSpec,
    rng: &mut R,
    counter: &mut DrawCounter,
) -> Result<TwoSidedState> {
    let pos = positions(spec);
    let mut cur = state.chain();
    if cur.len() != pos.len() {
        return Err(Error::LengthMismatch { expected: pos.len(), got: cur.len() });
    }
    for piece in q_pieces(spec, q)? {
        let mut new: Vec<Signature> = Vec::with_capacity(cur.len());
        for (i, &(k, l)) in pos.iter().enumerate() {
            let prev = if i == 0 { Signature::empty() } else { new[i - 1].clone() };
            new.push(two_sided_kernel(spec, k, l, &prev, &cur[i], piece)?.sample(rng, counter));
        }
        cur = new;
    }
    TwoSidedState::from_chain(cur, spec)
}

pub fn apply_q_distribution(state: &TwoSidedState, spec: &TwoSidedSpec, q: &EdreiSpec, tol: f64) -> Result<TruncatedMeasure<TwoSidedState>> {
    let pos = positions(spec);
    let mut m = TruncatedMeasure::point(state.clone());
    for piece in q_pieces(spec, q)? {
        m = push_forward(&m, |s| {
            let old = s.chain();
            let chain = chain_distribution(old.len(), |i, prefix: &[Signature]| {
                let (k, l) = pos[i];
                let prev = prefix.last().cloned().unwrap_or_else(Signature::empty);
                two_sided_kernel(spec, k, l, &prev, &old[i], piece)?.distribution(tol)
            })?;
            into_states(chain, |c| TwoSidedState::from_chain(c, spec))
        })?;
    }
    Ok(m)
}

/// Dense truncations of the chains P_k and links Λ^k_{k−1}, Λ̃^k_{k−1}.
///
/// `p[k−1]` is P_k : S_k × S̃_k; `links[k−2]` is Λ^k_{k−1} : S_k × S_{k−1} and
/// `links_tilde[k−2]` is Λ̃^k_{k−1} : S̃_k × S̃_{k−1}. Rows may sum to less than
/// one where the truncation cuts off mass.
#[derive(Clone, Debug)]
pub struct LinkSystem {
    pub p: Vec<DMatrix<f64>>,
    pub links: Vec<DMatrix<f64>>,
    pub links_tilde: Vec<DMatrix<f64>>,
}

/// Largest entrywise residual of a matrix identity, with the truncation
/// error allowed for it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Residual {
    pub max_residual: f64,
    pub tail: f64,
    pub rows_checked: usize,
}

impl Residual {
    pub fn within(&self, tol: f64) -> bool {
        self.max_residual <= tol + self.tail
    }

    pub fn merge(self, other: Residual) -> Residual {
        Residual {
            max_residual: self.max_residual.max(other.max_residual),
            tail: self.tail.max(other.tail),
            rows_checked: self.rows_checked + other.rows_checked,
        }
    }
}

pub fn row_deficit(m: &DMatrix<f64>, i: usize) -> f64 {
    (1.0 - m.row(i).sum()).max(0.0)
}

/// max |AB − CD| over rows whose truncation deficit (of A plus C) is at
/// most `row_tol`; the deficits bound the entrywise truncation error.
pub fn product_residual(a: &DMatrix<f64>, b: &DMatrix<f64>, c: &DMatrix<f64>, d: &DMatrix<f64>, row_tol: f64) -> Residual {
    let lhs = a * b;
    let rhs = c * d;
    let mut r = Residual::default();
    for i in 0..lhs.nrows() {
        let def = row_deficit(a, i) + row_deficit(c, i);
        if def > row_tol {
            continue;
        }
        r.rows_checked += 1;
        r.tail = r.tail.max(def);
        for j in 0..lhs.ncols() {
            r.max_residual = r.max_residual.max((lhs[(i, j)] - rhs[(i, j)]).abs());
        }
    }
    r
}

impl LinkSystem {
    pub fn new(p: Vec<DMatrix<f64>>, links: Vec<DMatrix<f64>>, links_tilde: Vec<DMatrix<f64>>) -> Result<Self> {
        let n = p.len();
        if n == 0 || links.len() + 1 != n || links_tilde.len() + 1 != n {
            return Err(Error::LengthMismatch { expected: n.saturating_sub(1), got: links.len() });
        }
        for k in 1..n {
            let (l, lt) = (&links[k - 1], &links_tilde[k - 1]);
            let ok = l.nrows() == p[k].nrows()
                && l.ncols() == p[k - 1].nrows()
                && lt.nrows() == p[k].ncols()
                && lt.ncols() == p[k - 1].ncols();
            if !ok {
                return Err(Error::InvalidShape(format!("level {}: matrix dimensions do not chain", k + 1)));
            }
        }
        Ok(LinkSystem { p, links, links_tilde })
    }

    pub fn n(&self) -> usize {
        self.p.len()
    }

    /// Δ^k_{k−1} = P_k Λ̃^k_{k−1}, k ≥ 2.
    pub fn delta(&self, k: usize) -> DMatrix<f64> {
        &self.p[k - 1] * &self.links_tilde[k - 2]
    }

    /// Residuals of Λ^k_{k−1} P_{k−1} = P_k Λ̃^k_{k−1} for every k.
    pub fn check_commutation(&self, row_tol: f64) -> Residual {
        (2..=self.n()).fold(Residual::default(), |acc, k| {
            acc.merge(product_residual(&self.links[k - 2], &self.p[k - 2], &self.p[k - 1], &self.links_tilde[k - 2], row_tol))
        })
    }

    /// Draws Y from X by the sequential update; states are indices into the truncations.
    pub fn sequential_update<R: Rng + ?Sized>(&self, x: &[usize], rng: &mut R) -> Result<Vec<usize>> {
        let mut y: Vec<usize> = Vec::with_capacity(self.n());
        for k in 1..=self.n() {
            let weights: Vec<f64> = if k == 1 {
                self.p[0].row(x[0]).iter().copied().collect()
            } else {
                let lt = &self.links_tilde[k - 2];
                (0..self.p[k - 1].ncols()).map(|j| self.p[k - 1][(x[k - 1], j)] * lt[(j, y[k - 2])]).collect()
            };
            let total: f64 = weights.iter().sum();
            if !(total > 0.0) {
                return Err(Error::Invariant(format!("Δ vanishes at level {k} from {x:?}, partial update {y:?}")));
            }
            let mut u = rng.gen::<f64>() * total;
            let mut pick = weights.iter().rposition(|&w| w > 0.0).unwrap_or(0);
            for (j, &w) in weights.iter().enumerate() {
                if u < w {
                    pick = j;
                    break;
                }
                u -= w;
            }
            y.push(pick);
        }
        Ok(y)
    }

    /// P^{(n)}(X, ·) on the truncation, as a list of (Y, probability).
    pub fn sequential_distribution(&self, x: &[usize]) -> Vec<(Vec<usize>, f64)> {
        let mut out = Vec::new();
        let mut stack: Vec<(Vec<usize>, f64)> = vec![(Vec::new(), 1.0)];
        while let Some((y, p)) = stack.pop() {
            let k = y.len() + 1;
            if k > self.n() {
                out.push((y, p));
                continue;
            }
            if k == 1 {
                for (j, &w) in self.p[0].row(x[0]).iter().enumerate() {
                    if w > 0.0 {
                        stack.push((vec![j], p * w));
                    }
                }
                continue;
            }
            let prev = y[k - 2];
            let delta: f64 = self.delta(k)[(x[k - 1], prev)];
            if delta <= 0.0 {
                continue;
            }
            for j in 0..self.p[k - 1].ncols() {
                let w = self.p[k - 1][(x[k - 1], j)] * self.links_tilde[k - 2][(j, prev)];
                if w > 0.0 {
                    let mut next = y.clone();
                    next.push(j);
                    stack.push((next, p * w / delta));
                }
            }
        }
        out
    }

    /// m^{(n)} as (X, probability) pairs for a measure `m_n` on S_n.
    pub fn lift(&self, m_n: &[f64], links: &[DMatrix<f64>]) -> Vec<(Vec<usize>, f64)> {
        let n = self.n();
        let mut out = Vec::new();
        let mut stack: Vec<(Vec<usize>, f64)> =
            m_n.iter().enumerate().filter(|(_, &p)| p > 0.0).map(|(i, &p)| (vec![i], p)).collect();
        while let Some((rev, p)) = stack.pop() {
            if rev.len() == n {
                out.push((rev.into_iter().rev().collect(), p));
                continue;
            }
            let k = n - rev.len() + 1;
            let top = *rev.last().expect("nonempty");
            let l = &links[k - 2];
            for j in 0..l.ncols() {
                let w = l[(top, j)];
                if w > 0.0 {
                    let mut next = rev.clone();
                    next.push(j);
                    stack.push((next, p * w));
                }
            }
        }
        out
    }

    /// max_Y |(m^{(n)} P^{(n)})(Y) − m̃^{(n)}(Y)| for a measure `m_n` on S_n;
    /// the tail is the mass of m^{(n)} P^{(n)} and m̃^{(n)} lost to truncation.
    pub fn verify_intertwining(&self, m_n: &[f64]) -> Residual {
        use std::collections::HashMap;
        let n = self.n();
        let mut lhs: HashMap<Vec<usize>, f64> = HashMap::new();
        let mut lhs_mass = 0.0;
        for (x, p) in self.lift(m_n, &self.links) {
            for (y, q) in self.sequential_distribution(&x) {
                *lhs.entry(y).or_insert(0.0) += p * q;
                lhs_mass += p * q;
            }
        }
        let m_tilde: Vec<f64> = (0..self.p[n - 1].ncols())
            .map(|j| m_n.iter().enumerate().map(|(i, &p)| p * self.p[n - 1][(i, j)]).sum())
            .collect();
        let rhs: HashMap<Vec<usize>, f64> = self.lift(&m_tilde, &self.links_tilde).into_iter().collect();
        let rhs_mass: f64 = rhs.values().sum();
        let mut worst: f64 = 0.0;
        for (y, &p) in &lhs {
            worst = worst.max((p - rhs.get(y).copied().unwrap_or(0.0)).abs());
        }
        for (y, &p) in &rhs {
            if !lhs.contains_key(y) {
                worst = worst.max(p);
            }
        }
        Residual { max_residual: worst, tail: (1.0 - lhs_mass).max(0.0) + (1.0 - rhs_mass).max(0.0), rows_checked: rhs.len() }
    }
}
