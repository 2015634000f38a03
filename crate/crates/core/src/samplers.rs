//! Exact samplers: one-sided Schur processes grown one specialization at a
//! time, skew plane partitions with q^{volume} weights, and
//! Gelfand–Tsetlin paths of extreme characters of U(∞).

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{GTPattern, PlanePartition, PlanePartitionShape, Signature};
use crate::dynamics::{apply_q, apply_up, SchurState, TwoSidedState};
use crate::error::{Error, Result};
use crate::kernels::DrawCounter;
use crate::schur_eval::{spp_process_spec, spp_weighted_process_spec, Psi, SchurProcessSpec, TwoSidedSpec};
use crate::specializations::{EdreiSpec, SingleEdrei, SingleSpec, Specialization};

/// Parameters of an extreme character of U(∞) that the path sampler accepts:
/// finitely many α^± and β^± and no γ^±.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CharacterParams {
    pub spec: EdreiSpec,
}

impl CharacterParams {
    pub fn new(alpha_plus: Vec<f64>, alpha_minus: Vec<f64>, beta_plus: Vec<f64>, beta_minus: Vec<f64>) -> Result<Self> {
        Self::from_spec(EdreiSpec::new(alpha_plus, alpha_minus, beta_plus, beta_minus, 0.0, 0.0)?)
    }

    pub fn from_spec(spec: EdreiSpec) -> Result<Self> {
        spec.validate()?;
        if spec.has_gamma() {
            return Err(Error::GammaUnsupported);
        }
        if let Some(b) = spec.beta_plus.iter().chain(&spec.beta_minus).find(|&&b| b >= 1.0) {
            return Err(Error::InvalidParameter(format!("β = {b}: the path sampler needs β < 1")));
        }
        Ok(CharacterParams { spec })
    }
}

/// A refinement of a Schur process into single-parameter steps together with
/// the positions of the original λ's and μ's inside it.
struct Refined {
    spec: SchurProcessSpec,
    lambda_at: Vec<usize>,
    mu_at: Vec<usize>,
}

/// Splits every multi-parameter ρ_j^± into single-parameter pieces (α's then
/// β's), inserting trivial specializations of the opposite sign between
/// consecutive pieces of the same sign. Single-parameter processes are
/// returned unchanged.
fn refine(proc: &SchurProcessSpec) -> Result<Refined> {
    let n = proc.n();
    let mut tokens: Vec<(bool, Specialization)> = Vec::new();
    let mut lambda_at = Vec::with_capacity(n);
    let mut mu_at = Vec::with_capacity(n.saturating_sub(1));
    let push = |tokens: &mut Vec<(bool, Specialization)>, plus: bool, rho: &Specialization| -> Result<()> {
        let mut pieces: Vec<Specialization> = rho.decompose()?.into_iter().map(to_spec).collect::<Result<_>>()?;
        if pieces.is_empty() {
            pieces.push(Specialization::trivial());
        }
        for piece in pieces {
            if tokens.last().is_some_and(|t| t.0 == plus) || (tokens.is_empty() && !plus) {
                tokens.push((!plus, Specialization::trivial()));
            }
            tokens.push((plus, piece));
        }
        Ok(())
    };
    for k in 0..n {
        push(&mut tokens, true, &proc.rho_plus[k])?;
        lambda_at.push(tokens.len() / 2);
        push(&mut tokens, false, &proc.rho_minus[k])?;
        if k + 1 < n {
            mu_at.push(tokens.len() / 2 - 1);
        }
    }
    let (plus, minus): (Vec<_>, Vec<_>) = tokens.into_iter().partition(|t| t.0);
    let spec = SchurProcessSpec {
        rho_plus: plus.into_iter().map(|t| t.1).collect(),
        rho_minus: minus.into_iter().map(|t| t.1).collect(),
    };
    Ok(Refined { spec, lambda_at, mu_at })
}

fn to_spec(s: SingleSpec) -> Result<Specialization> {
    match s {
        SingleSpec::Trivial => Ok(Specialization::trivial()),
        SingleSpec::Alpha(a) => Specialization::alpha(a),
        SingleSpec::Beta(b) => Specialization::beta(b),
    }
}

/// The process on levels 1..=n of `proc` with ρ_n^− replaced by the trivial specialization.
fn prefix(proc: &SchurProcessSpec, n: usize) -> SchurProcessSpec {
    let mut rho_minus = proc.rho_minus[..n].to_vec();
    rho_minus[n - 1] = Specialization::trivial();
    SchurProcessSpec { rho_plus: proc.rho_plus[..n].to_vec(), rho_minus }
}

/// Exact sample of a Schur process by induction on N: the process with
/// ρ_N^− trivial is the (N−1)-level sample extended by ∅, and one growth
/// step with π = ρ_N^− turns it into the N-level process.
///
/// `trace` receives the state after every induction step.
fn grow<R: Rng + ?Sized>(
    proc: &SchurProcessSpec,
    rng: &mut R,
    counter: &mut DrawCounter,
    mut trace: Option<&mut Vec<SchurState>>,
) -> Result<SchurState> {
    for rho in proc.rho_plus.iter().chain(&proc.rho_minus) {
        if rho.gamma() > 0.0 {
            return Err(Error::GammaUnsupported);
        }
    }
    proc.partition_function()?;
    let mut state = SchurState::empty(0);
    for n in 1..=proc.n() {
        state = state.extended();
        if n == 1 {
            state.mus.clear();
        }
        let sub = prefix(proc, n);
        state = apply_up(&state, &sub, &proc.rho_minus[n - 1], rng, counter)?;
        if let Some(t) = trace.as_deref_mut() {
            t.push(state.clone());
        }
    }
    Ok(state)
}

fn project(refined: &Refined, state: SchurState) -> SchurState {
    SchurState {
        lambdas: refined.lambda_at.iter().map(|&i| state.lambdas[i].clone()).collect(),
        mus: refined.mu_at.iter().map(|&i| state.mus[i].clone()).collect(),
    }
}

/// Exact sample of the Schur process `proc` (all γ = 0).
pub fn sample_schur_process<R: Rng + ?Sized>(proc: &SchurProcessSpec, rng: &mut R) -> Result<(SchurState, DrawCounter)> {
    let refined = refine(proc)?;
    let mut counter = DrawCounter::new();
    let state = grow(&refined.spec, rng, &mut counter, None)?;
    let out = project(&refined, state);
    if !out.in_support(proc) {
        return Err(Error::Invariant(format!("sampled state left the support: {out:?}")));
    }
    Ok((out, counter))
}

/// Exact sample of q^{vol} on plane partitions with support π̄, 0 < q < 1.
pub fn sample_spp<R: Rng + ?Sized>(shape: &PlanePartitionShape, q: f64, rng: &mut R) -> Result<(PlanePartition, DrawCounter)> {
    let proc = spp_process_spec(shape, q)?;
    spp_from_process(shape, &proc, rng, None)
}

/// As [`sample_spp`], also returning the slice state after every induction step.
pub fn sample_spp_with_trace<R: Rng + ?Sized>(
    shape: &PlanePartitionShape,
    q: f64,
    rng: &mut R,
) -> Result<(PlanePartition, DrawCounter, Vec<SchurState>)> {
    let proc = spp_process_spec(shape, q)?;
    let mut trace = Vec::new();
    let (pp, counter) = spp_from_process(shape, &proc, rng, Some(&mut trace))?;
    Ok((pp, counter, trace))
}

/// Exact sample with weight ∏_j q_j^{|λ^{(j)}|}; `q_weights[i]` weights slice i+2
/// (the A+B−1 slices that can be nonempty).
pub fn sample_spp_weighted<R: Rng + ?Sized>(
    shape: &PlanePartitionShape,
    q_weights: &[f64],
    rng: &mut R,
) -> Result<(PlanePartition, DrawCounter)> {
    let proc = spp_weighted_process_spec(shape, q_weights)?;
    spp_from_process(shape, &proc, rng, None)
}

fn spp_from_process<R: Rng + ?Sized>(
    shape: &PlanePartitionShape,
    proc: &SchurProcessSpec,
    rng: &mut R,
    trace: Option<&mut Vec<SchurState>>,
) -> Result<(PlanePartition, DrawCounter)> {
    let mut counter = DrawCounter::new();
    let state = grow(proc, rng, &mut counter, trace)?;
    let pp = PlanePartition::from_slices(&state.lambdas, shape.clone())?;
    Ok((pp, counter))
}

/// The one-sided process carrying the α^+/β^+ part of a character on N levels:
/// ρ_j^+ = α(1) and ρ_N^− made of α(α/(1+α)) and β(β/(1−β)).
pub fn gt_positive_process(chi: &CharacterParams, n: usize) -> Result<SchurProcessSpec> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    let last = Specialization::new(
        chi.spec.alpha_plus.iter().map(|&a| a / (1.0 + a)).collect(),
        chi.spec.beta_plus.iter().map(|&b| b / (1.0 - b)).collect(),
        0.0,
    )?;
    let mut rho_minus = vec![Specialization::trivial(); n];
    rho_minus[n - 1] = last;
    SchurProcessSpec::new(vec![Specialization::alpha(1.0)?; n], rho_minus)
}

/// Exact sample of the path t_1 ≺ … ≺ t_N of an extreme character: the
/// α^+/β^+ part as a one-sided process on nonnegative signatures, then one
/// two-sided step per α^− and β^− parameter (α^− first, in list order).
pub fn sample_gt_path<R: Rng + ?Sized>(chi: &CharacterParams, n: usize, rng: &mut R) -> Result<(GTPattern, DrawCounter)> {
    let order: Vec<SingleEdrei> = chi
        .spec
        .alpha_minus
        .iter()
        .map(|&a| SingleEdrei::AlphaMinus(a))
        .chain(chi.spec.beta_minus.iter().map(|&b| SingleEdrei::BetaMinus(b)))
        .collect();
    sample_gt_path_ordered(chi, n, &order, rng)
}

/// As [`sample_gt_path`] with the negative parameters applied in the given order.
pub fn sample_gt_path_ordered<R: Rng + ?Sized>(
    chi: &CharacterParams,
    n: usize,
    negative: &[SingleEdrei],
    rng: &mut R,
) -> Result<(GTPattern, DrawCounter)> {
    CharacterParams::from_spec(chi.spec.clone())?;
    let proc = gt_positive_process(chi, n)?;
    let (state, mut counter) = sample_schur_process(&proc, rng)?;
    let levels = state
        .lambdas
        .iter()
        .enumerate()
        .map(|(k, lam)| Signature::from_partition(lam, k + 1).map(|s| vec![s]))
        .collect::<Result<Vec<_>>>()?;
    let mut two = TwoSidedState { levels };
    let spec = TwoSidedSpec::new(vec![1.0; n], vec![0; n], vec![Vec::new(); n], Psi::Toeplitz(EdreiSpec::trivial()))?;
    for piece in negative {
        if !matches!(piece, SingleEdrei::AlphaMinus(_) | SingleEdrei::BetaMinus(_)) {
            return Err(Error::InvalidParameter(format!("{piece:?} is not a negative parameter")));
        }
        two = apply_q(&two, &spec, &piece.to_spec(), rng, &mut counter)?;
    }
    let pattern = GTPattern::new(two.levels.into_iter().map(|mut l| l.remove(0)).collect())?;
    Ok((pattern, counter))
}

/// The RNG of sample `index` in a batch seeded by `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs `f` for samples 0..count in parallel, sample i on `stream_rng(seed, i)`,
/// and returns the results in index order.
pub fn batch<T, F>(count: usize, seed: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> Result<T> + Sync,
{
    (0..count).into_par_iter().map(|i| f(&mut stream_rng(seed, i as u64))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::Partition;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn refinement_keeps_single_parameter_processes() {
        let proc = spp_process_spec(&PlanePartitionShape::full_box(2, 2).unwrap(), 0.5).unwrap();
        let r = refine(&proc).unwrap();
        assert_eq!(r.spec, proc);
        assert_eq!(r.lambda_at, (0..proc.n()).collect::<Vec<_>>());
        assert_eq!(r.mu_at, (0..proc.n() - 1).collect::<Vec<_>>());
    }

    #[test]
    fn refinement_of_multi_parameter_groups() {
        let two = Specialization::new(vec![0.2, 0.3], vec![0.4], 0.0).unwrap();
        let proc = SchurProcessSpec::new(vec![two.clone(), Specialization::alpha(0.5).unwrap()], vec![two.clone(), two]).unwrap();
        let r = refine(&proc).unwrap();
        assert_eq!(r.spec.n(), 8);
        assert!(r.spec.rho_plus.iter().chain(&r.spec.rho_minus).all(|s| s.single().is_ok()));
        assert_eq!(r.lambda_at, vec![2, 5]);
        assert_eq!(r.mu_at, vec![4]);
        assert!((r.spec.partition_function().unwrap() - proc.partition_function().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn trivial_minus_gives_empty_process() {
        let proc = SchurProcessSpec::new(vec![Specialization::alpha(0.5).unwrap(); 3], vec![Specialization::trivial(); 3]).unwrap();
        let (s, c) = sample_schur_process(&proc, &mut rng(1)).unwrap();
        assert!(s.lambdas.iter().chain(&s.mus).all(Partition::is_empty));
        assert_eq!(c.nontrivial_draws, 0);
    }

    #[test]
    fn spp_samples_are_valid_and_counted() {
        let shape = PlanePartitionShape::new(4, 3, Partition::new(vec![2, 1, 1]).unwrap()).unwrap();
        let mut r = rng(3);
        for _ in 0..200 {
            let (pp, c) = sample_spp(&shape, 0.7, &mut r).unwrap();
            assert!(c.nontrivial_draws <= 24);
            assert_eq!(pp.diagonal_slices().len(), 8);
        }
        let tiny = PlanePartitionShape::full_box(2, 2).unwrap();
        for _ in 0..100 {
            assert_eq!(sample_spp(&tiny, 1e-6, &mut r).unwrap().0.volume(), 0);
        }
        assert!(sample_spp(&tiny, 1.0, &mut r).is_err());
    }

    #[test]
    fn weighted_sampler_couples_with_uniform_q() {
        let shape = PlanePartitionShape::full_box(2, 3).unwrap();
        for seed in 0..20 {
            let a = sample_spp(&shape, 0.6, &mut rng(seed)).unwrap();
            let b = sample_spp_weighted(&shape, &[0.6; 4], &mut rng(seed)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn trace_ends_at_the_sample() {
        let shape = PlanePartitionShape::full_box(2, 2).unwrap();
        let (pp, _, trace) = sample_spp_with_trace(&shape, 0.5, &mut rng(4)).unwrap();
        assert_eq!(trace.len(), 5);
        assert_eq!(trace.last().unwrap().lambdas, pp.diagonal_slices());
    }

    #[test]
    fn gt_paths_interlace() {
        let chi = CharacterParams::new(vec![0.1; 10], vec![0.1; 10], vec![0.5; 5], vec![]).unwrap();
        let mut r = rng(8);
        for _ in 0..3 {
            let (g, _) = sample_gt_path(&chi, 12, &mut r).unwrap();
            assert_eq!(g.depth(), 12);
        }
        let trivial = CharacterParams::default();
        let (g, c) = sample_gt_path(&trivial, 5, &mut r).unwrap();
        assert!(g.levels().iter().all(|l| l.parts().iter().all(|&x| x == 0)));
        assert_eq!(c.nontrivial_draws, 0);
        assert!(matches!(
            CharacterParams::from_spec(EdreiSpec::new(vec![], vec![], vec![], vec![], 0.5, 0.0).unwrap()),
            Err(Error::GammaUnsupported)
        ));
        assert!(CharacterParams::new(vec![], vec![], vec![1.0], vec![]).is_err());
    }

    #[test]
    fn batches_are_reproducible() {
        let shape = PlanePartitionShape::full_box(2, 2).unwrap();
        let run = || batch(16, 42, |r| sample_spp(&shape, 0.5, r)).unwrap();
        assert_eq!(run(), run());
        let single: Vec<_> = (0..16).map(|i| sample_spp(&shape, 0.5, &mut stream_rng(42, i)).unwrap()).collect();
        assert_eq!(run(), single);
    }
}
