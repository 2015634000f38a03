//! Skew Schur function evaluations, process weights and partition functions.

use std::collections::HashMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{equal_length_interlaces, interlaces, signature_interlaces, Partition, PlanePartitionShape, Signature};
use crate::error::{Error, Result};
use crate::specializations::{pairing_h, Annulus, EdreiSpec, LaurentSeries, SingleEdrei, SingleSpec, Specialization};

/// Default tail tolerance for Laurent coefficient truncations.
pub const DEFAULT_TAIL_TOL: f64 = 1e-15;

pub(crate) fn det(n: usize, f: impl Fn(usize, usize) -> f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    DMatrix::from_fn(n, n, f).determinant()
}

fn pow_i64(x: f64, k: i64) -> f64 {
    if k == 0 {
        1.0
    } else {
        x.powi(i32::try_from(k).expect("exponent fits in i32"))
    }
}

/// s_{λ/μ}(α) for a single α: α^{|λ|−|μ|} if μ ≺ λ, else 0.
pub fn skew_schur_alpha(lam: &Partition, mu: &Partition, alpha: f64) -> f64 {
    if interlaces(mu, lam) {
        pow_i64(alpha, lam.size() - mu.size())
    } else {
        0.0
    }
}

/// s_{λ/μ}(β) for a single β: β^{|λ|−|μ|} if λ_j − μ_j ∈ {0, 1} for all j, else 0.
pub fn skew_schur_beta(lam: &Partition, mu: &Partition, beta: f64) -> f64 {
    let n = lam.len().max(mu.len());
    if (0..n).all(|j| matches!(lam.part(j) - mu.part(j), 0 | 1)) {
        pow_i64(beta, lam.size() - mu.size())
    } else {
        0.0
    }
}

pub fn skew_schur_single(lam: &Partition, mu: &Partition, rho: SingleSpec) -> f64 {
    match rho {
        SingleSpec::Trivial => f64::from(u8::from(lam == mu)),
        SingleSpec::Alpha(a) => skew_schur_alpha(lam, mu, a),
        SingleSpec::Beta(b) => skew_schur_beta(lam, mu, b),
    }
}

/// Jacobi–Trudi determinant det[h_{λ_i − i − μ_j + j}].
pub fn skew_schur_jt(lam: &Partition, mu: &Partition, spec: &Specialization) -> f64 {
    let r = lam.len().max(mu.len());
    if r == 0 {
        return 1.0;
    }
    let h = spec.h_coeffs((lam.part(0) + r as i64).max(0) as usize);
    det(r, |i, j| {
        let k = lam.part(i) - i as i64 - mu.part(j) + j as i64;
        if k < 0 {
            0.0
        } else {
            h[k as usize]
        }
    })
}

/// All ν with τ ⊆ ν ⊆ x and s_{x/ν}(ρ) > 0 for a single-parameter ρ, with their weights.
fn single_step_down(x: &Partition, tau: &Partition, rho: SingleSpec, out: &mut Vec<(Partition, f64)>) {
    fn rec(
        j: usize,
        x: &Partition,
        tau: &Partition,
        rho: SingleSpec,
        prefix: &mut Vec<i64>,
        out: &mut Vec<(Partition, f64)>,
    ) {
        if j == x.len() {
            let nu = Partition::canonical(prefix.clone());
            let w = skew_schur_single(x, &nu, rho);
            if w > 0.0 {
                out.push((nu, w));
            }
            return;
        }
        let (lo, hi) = match rho {
            SingleSpec::Trivial => (x.part(j), x.part(j)),
            SingleSpec::Alpha(_) => (x.part(j + 1), x.part(j)),
            SingleSpec::Beta(_) => (x.part(j) - 1, x.part(j)),
        };
        let hi = if j > 0 { hi.min(prefix[j - 1]) } else { hi };
        for v in lo.max(tau.part(j)).max(0)..=hi {
            prefix.push(v);
            rec(j + 1, x, tau, rho, prefix, out);
            prefix.pop();
        }
    }
    if !x.contains(tau) {
        return;
    }
    rec(0, x, tau, rho, &mut Vec::with_capacity(x.len()), out);
}

/// Whether s_{κ/τ}(ρ) > 0, decided combinatorially: with a α's and b β's
/// it is positive iff ν_i = max(τ_i, κ_i − b) leaves at most a boxes of
/// ν/τ in every column (ν/τ is then filled by α's, κ/ν by β's).
pub fn skew_schur_positive(kappa: &Partition, tau: &Partition, spec: &Specialization) -> bool {
    if !kappa.contains(tau) {
        return false;
    }
    if spec.gamma() > 0.0 {
        return true;
    }
    let (a, b) = (spec.alphas().len(), spec.betas().len() as i64);
    let nu: Vec<i64> = (0..kappa.len()).map(|i| tau.part(i).max(kappa.part(i) - b)).collect();
    // column j of ν/τ spans the rows i with τ_i ≤ j < ν_i, which are consecutive
    let width = nu.first().copied().unwrap_or(0);
    (0..width).all(|j| (0..nu.len()).filter(|&i| tau.part(i) <= j && j < nu[i]).count() <= a)
}

/// s_{κ/τ}(ρ) for a general nonnegative specialization.
///
/// Without γ this is the branching rule over single-parameter pieces,
/// which keeps exact zeros and is free of cancellation; with γ > 0 the
/// Jacobi–Trudi determinant is used.
pub fn skew_schur(kappa: &Partition, tau: &Partition, spec: &Specialization) -> f64 {
    if spec.gamma() > 0.0 {
        return skew_schur_jt(kappa, tau, spec);
    }
    let pieces = spec.decompose().expect("gamma handled above");
    if pieces.is_empty() {
        return f64::from(u8::from(kappa == tau));
    }
    if !kappa.contains(tau) {
        return 0.0;
    }
    let mut current: HashMap<Partition, f64> = HashMap::from([(kappa.clone(), 1.0)]);
    let mut buf = Vec::new();
    for (idx, &rho) in pieces.iter().enumerate() {
        let last = idx + 1 == pieces.len();
        let mut next: HashMap<Partition, f64> = HashMap::new();
        for (x, w) in &current {
            if last {
                let v = skew_schur_single(x, tau, rho);
                if v > 0.0 {
                    *next.entry(tau.clone()).or_default() += w * v;
                }
                continue;
            }
            buf.clear();
            single_step_down(x, tau, rho, &mut buf);
            for (nu, v) in buf.drain(..) {
                *next.entry(nu).or_default() += w * v;
            }
        }
        current = next;
    }
    current.get(tau).copied().unwrap_or(0.0)
}

pub fn schur(lam: &Partition, spec: &Specialization) -> f64 {
    skew_schur(lam, &Partition::empty(), spec)
}

/// Direction of a single-parameter Toeplitz matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

fn check_len(lam: &Signature, mu: &Signature) -> Result<()> {
    if lam.len() != mu.len() {
        return Err(Error::LengthMismatch { expected: lam.len(), got: mu.len() });
    }
    Ok(())
}

/// s_{λ/μ}(M) for M with a single α^± parameter.
///
/// Nonzero exactly when the signatures interlace in the direction of the
/// sign (λ above μ for +, μ above λ for −), with value
/// (1+α)^{−n} (α/(1+α))^{±(|λ|−|μ|)}.
pub fn skew_schur_sig_alpha(lam: &Signature, mu: &Signature, alpha: f64, sign: Sign) -> Result<f64> {
    check_len(lam, mu)?;
    let n = lam.len() as i32;
    let p = alpha / (1.0 + alpha);
    let (ok, diff) = match sign {
        Sign::Plus => (equal_length_interlaces(mu, lam), lam.size() - mu.size()),
        Sign::Minus => (equal_length_interlaces(lam, mu), mu.size() - lam.size()),
    };
    Ok(if ok { (1.0 + alpha).powi(-n) * pow_i64(p, diff) } else { 0.0 })
}

/// s_{λ/μ}(M) for M with a single β^± parameter, β < 1.
pub fn skew_schur_sig_beta(lam: &Signature, mu: &Signature, beta: f64, sign: Sign) -> Result<f64> {
    check_len(lam, mu)?;
    if beta >= 1.0 {
        return Err(Error::InvalidParameter("β = 1 has undefined odds".into()));
    }
    let s = match sign {
        Sign::Plus => 1,
        Sign::Minus => -1,
    };
    let ok = (0..lam.len()).all(|j| matches!(s * (lam.part(j) - mu.part(j)), 0 | 1));
    let n = lam.len() as i32;
    Ok(if ok { (1.0 - beta).powi(n) * pow_i64(beta / (1.0 - beta), s * (lam.size() - mu.size())) } else { 0.0 })
}

/// s_{ν/λ}(c) for ν of length n+1 and λ of length n: c^{|ν|−|λ|} if λ ≺ ν, with 0⁰ = 1.
pub fn skew_schur_branch(nu: &Signature, lam: &Signature, c: f64) -> Result<f64> {
    Ok(if signature_interlaces(lam, nu)? { pow_i64(c, nu.size() - lam.size()) } else { 0.0 })
}

/// Toeplitz minor det[M_{λ_i − i − μ_j + j}] from precomputed Laurent coefficients.
pub fn skew_schur_toeplitz_series(lam: &Signature, mu: &Signature, series: &LaurentSeries) -> Result<f64> {
    check_len(lam, mu)?;
    let n = lam.len();
    Ok(det(n, |i, j| series.coeff(lam.part(i) - i as i64 - mu.part(j) + j as i64)))
}

pub fn skew_schur_toeplitz(lam: &Signature, mu: &Signature, espec: &EdreiSpec, tail_tol: f64) -> Result<f64> {
    let series = espec.laurent_series(tail_tol)?;
    skew_schur_toeplitz_series(lam, mu, &series)
}

pub fn skew_schur_sig_single(lam: &Signature, mu: &Signature, m: SingleEdrei) -> Result<f64> {
    match m {
        SingleEdrei::Trivial => {
            check_len(lam, mu)?;
            Ok(f64::from(u8::from(lam == mu)))
        }
        SingleEdrei::AlphaPlus(a) => skew_schur_sig_alpha(lam, mu, a, Sign::Plus),
        SingleEdrei::AlphaMinus(a) => skew_schur_sig_alpha(lam, mu, a, Sign::Minus),
        SingleEdrei::BetaPlus(b) => skew_schur_sig_beta(lam, mu, b, Sign::Plus),
        SingleEdrei::BetaMinus(b) => skew_schur_sig_beta(lam, mu, b, Sign::Minus),
    }
}

/// s_{λ/μ}(M): closed form for single-parameter M below β = 1, Toeplitz minor otherwise.
pub fn skew_schur_sig(lam: &Signature, mu: &Signature, espec: &EdreiSpec, tail_tol: f64) -> Result<f64> {
    match espec.single() {
        Ok(SingleEdrei::BetaPlus(b) | SingleEdrei::BetaMinus(b)) if b >= 1.0 => {
            skew_schur_toeplitz(lam, mu, espec, tail_tol)
        }
        Ok(single) => skew_schur_sig_single(lam, mu, single),
        Err(_) => skew_schur_toeplitz(lam, mu, espec, tail_tol),
    }
}

/// Specializations (ρ_0^+, …, ρ_{N−1}^+; ρ_1^−, …, ρ_N^−) of a Schur process.
///
/// `rho_plus[i]` is ρ_i^+ and `rho_minus[j]` is ρ_{j+1}^−.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchurProcessSpec {
    pub rho_plus: Vec<Specialization>,
    pub rho_minus: Vec<Specialization>,
}

impl SchurProcessSpec {
    pub fn new(rho_plus: Vec<Specialization>, rho_minus: Vec<Specialization>) -> Result<Self> {
        if rho_plus.len() != rho_minus.len() {
            return Err(Error::LengthMismatch { expected: rho_plus.len(), got: rho_minus.len() });
        }
        if rho_plus.is_empty() {
            return Err(Error::InvalidParameter("a Schur process needs N ≥ 1".into()));
        }
        let spec = SchurProcessSpec { rho_plus, rho_minus };
        spec.partition_function()?;
        Ok(spec)
    }

    pub fn n(&self) -> usize {
        self.rho_plus.len()
    }

    /// ∏_{0 ≤ i < j ≤ N} H(ρ_i^+; ρ_j^−).
    pub fn partition_function(&self) -> Result<f64> {
        let n = self.n();
        let mut z = 1.0;
        for i in 0..n {
            for j in i..n {
                z *= pairing_h(&self.rho_plus[i], &self.rho_minus[j])?;
            }
        }
        Ok(z)
    }

    /// ρ^+_{[0, j]}.
    pub fn plus_union(&self, upto: usize) -> Specialization {
        self.rho_plus[..=upto].iter().fold(Specialization::trivial(), |acc, s| acc.union(s))
    }

    /// ρ^−_{[j, N]} with 1-based j.
    pub fn minus_union_from(&self, j: usize) -> Specialization {
        self.rho_minus[j - 1..].iter().fold(Specialization::trivial(), |acc, s| acc.union(s))
    }
}

/// The weight W(λ, μ) of a Schur process configuration.
pub fn process_weight(lams: &[Partition], mus: &[Partition], spec: &SchurProcessSpec) -> Result<f64> {
    let n = spec.n();
    if lams.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: lams.len() });
    }
    if mus.len() + 1 != n {
        return Err(Error::LengthMismatch { expected: n - 1, got: mus.len() });
    }
    let mut w = schur(&lams[0], &spec.rho_plus[0]);
    for k in 1..n {
        if w == 0.0 {
            return Ok(0.0);
        }
        w *= skew_schur(&lams[k - 1], &mus[k - 1], &spec.rho_minus[k - 1]);
        w *= skew_schur(&lams[k], &mus[k - 1], &spec.rho_plus[k]);
    }
    Ok(w * schur(&lams[n - 1], &spec.rho_minus[n - 1]))
}

pub fn partition_function_schur(spec: &SchurProcessSpec) -> Result<f64> {
    spec.partition_function()
}

/// The Schur process whose slices carry the measure ∏_j q_j^{|λ^{(j)}|} on
/// plane partitions with support π̄; `q_weights[i]` is the weight of slice i+2.
pub fn spp_weighted_process_spec(shape: &PlanePartitionShape, q_weights: &[f64]) -> Result<SchurProcessSpec> {
    let nslices = shape.a + shape.b;
    if q_weights.len() + 1 != nslices {
        return Err(Error::LengthMismatch { expected: nslices - 1, got: q_weights.len() });
    }
    if let Some(q) = q_weights.iter().find(|&&q| !(q.is_finite() && q > 0.0)) {
        return Err(Error::InvalidParameter(format!("slice weight {q} must be positive")));
    }
    let ups = shape.up_steps();
    // z_1 = q_2 and z_j = z_{j−1} q_j; the overall scale of z cancels in every weight
    let mut z = Vec::with_capacity(nslices);
    z.push(q_weights[0]);
    for &q in q_weights {
        let last = *z.last().expect("nonempty");
        z.push(last * q);
    }
    let n = nslices + 1;
    let mut rho_plus = vec![Specialization::trivial(); n];
    let mut rho_minus = vec![Specialization::trivial(); n];
    for j in 1..=nslices {
        let zj = z[j - 1];
        if ups.contains(&j) {
            rho_plus[j] = Specialization::alpha(1.0 / zj)?;
        } else {
            rho_minus[j - 1] = Specialization::alpha(zj)?;
        }
    }
    SchurProcessSpec::new(rho_plus, rho_minus)
}

/// The Schur process of the measure q^{vol} on plane partitions with support π̄:
/// ρ_j^+ = α(q^{−j}) for j ∈ 𝓛(π) and ρ_j^− = α(q^j) otherwise.
pub fn spp_process_spec(shape: &PlanePartitionShape, q: f64) -> Result<SchurProcessSpec> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidParameter(format!("q = {q} must lie in (0, 1)")));
    }
    spp_weighted_process_spec(shape, &vec![q; shape.a + shape.b - 1])
}

/// The boundary matrix Ψ of a two-sided Schur process.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Psi {
    /// Ψ_{i,−j} = ψ_{i+j} with ψ the Laurent coefficients of an admissible Toeplitz matrix.
    Toeplitz(EdreiSpec),
    /// Finitely supported table: `columns[j−1][i − n_min]` = Ψ_{i,−j}.
    Table { n_min: i64, columns: Vec<Vec<f64>> },
}

/// Parameters of a two-sided Schur process.
///
/// `m[k−1][l−1]` is M^{(k,l)}; `c[k−1]` = c(k) must equal `m[k−1].len()`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoSidedSpec {
    pub a: Vec<f64>,
    pub c: Vec<usize>,
    pub m: Vec<Vec<EdreiSpec>>,
    pub psi: Psi,
}

/// Ψ with its Laurent data evaluated once.
pub struct PsiEval<'a> {
    psi: &'a Psi,
    series: Option<LaurentSeries>,
}

impl<'a> PsiEval<'a> {
    pub fn new(psi: &'a Psi, tail_tol: f64) -> Result<Self> {
        let series = match psi {
            Psi::Toeplitz(e) => Some(e.laurent_series(tail_tol)?),
            Psi::Table { .. } => None,
        };
        Ok(PsiEval { psi, series })
    }

    /// Ψ_{i,−j}, j ≥ 1.
    pub fn entry(&self, i: i64, j: usize) -> f64 {
        match (self.psi, &self.series) {
            (Psi::Toeplitz(_), Some(s)) => s.coeff(i + j as i64),
            (Psi::Table { n_min, columns }, _) => {
                let idx = i - n_min;
                if idx < 0 {
                    return 0.0;
                }
                columns.get(j - 1).and_then(|c| c.get(idx as usize)).copied().unwrap_or(0.0)
            }
            _ => unreachable!("series is present for Toeplitz Ψ"),
        }
    }

    /// Ψ_j(u) = Σ_n Ψ_{n,−j} u^{n+j}.
    pub fn generating(&self, j: usize, u: f64) -> f64 {
        match self.psi {
            Psi::Toeplitz(e) => e.eval_h(u),
            Psi::Table { n_min, columns } => columns[j - 1]
                .iter()
                .enumerate()
                .map(|(idx, &v)| v * u.powi((n_min + idx as i64 + j as i64) as i32))
                .sum(),
        }
    }
}

impl TwoSidedSpec {
    pub fn new(a: Vec<f64>, c: Vec<usize>, m: Vec<Vec<EdreiSpec>>, psi: Psi) -> Result<Self> {
        let spec = TwoSidedSpec { a, c, m, psi };
        spec.validate()?;
        Ok(spec)
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if n == 0 {
            return Err(Error::InvalidParameter("a two-sided process needs N ≥ 1".into()));
        }
        if self.c.len() != n || self.m.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: self.c.len().min(self.m.len()) });
        }
        for (k, (ck, mk)) in self.c.iter().zip(&self.m).enumerate() {
            if *ck != mk.len() {
                return Err(Error::InvalidParameter(format!("c({}) = {ck} but {} matrices given", k + 1, mk.len())));
            }
            for e in mk {
                e.validate()?;
            }
        }
        if let Some(&x) = self.a.iter().find(|&&x| !(x.is_finite() && x > 0.0)) {
            return Err(Error::InvalidParameter(format!("a = {x} must be positive")));
        }
        match &self.psi {
            Psi::Toeplitz(e) => e.validate()?,
            Psi::Table { columns, .. } => {
                if columns.len() != n {
                    return Err(Error::LengthMismatch { expected: n, got: columns.len() });
                }
            }
        }
        for j in 0..n {
            let ann = self.annulus_for(j);
            if !ann.contains(self.a[j]) {
                return Err(Error::AnnulusViolation { a: self.a[j], r1: ann.r1, r2: ann.r2 });
            }
        }
        Ok(())
    }

    /// Common annulus for a_{j+1}: H(M^{(k,l)}; u^{−1}) for k ≥ j+1 and the Ψ generating functions.
    pub fn annulus_for(&self, j: usize) -> Annulus {
        let mut ann = match &self.psi {
            Psi::Toeplitz(e) => e.analyticity_annulus(),
            Psi::Table { .. } => Annulus { r1: 0.0, r2: f64::INFINITY },
        };
        for mk in &self.m[j..] {
            for e in mk {
                ann = ann.intersect(&e.analyticity_annulus().inverted());
            }
        }
        ann
    }

    fn distinct_a(&self) -> Result<()> {
        for i in 0..self.n() {
            for j in i + 1..self.n() {
                if self.a[i] == self.a[j] {
                    return Err(Error::CoincidentParameters(self.a[i]));
                }
            }
        }
        Ok(())
    }

    fn m_product(&self) -> f64 {
        let mut v = 1.0;
        for (k, mk) in self.m.iter().enumerate() {
            for e in mk {
                for j in 0..=k {
                    v *= e.eval_h(1.0 / self.a[j]);
                }
            }
        }
        v
    }

    /// det[a_i^{−j} Ψ_j(a_i)].
    fn psi_denominator(&self, psi: &PsiEval<'_>) -> f64 {
        det(self.n(), |i, j| self.a[i].powi(-(j as i32 + 1)) * psi.generating(j + 1, self.a[i]))
    }
}

/// The weight W of a two-sided configuration; `levels[k−1]` holds
/// (λ^{(k,0)}, …, λ^{(k,c(k))}), each of length k.
pub fn two_sided_weight(levels: &[Vec<Signature>], spec: &TwoSidedSpec, tail_tol: f64) -> Result<f64> {
    let psi = PsiEval::new(&spec.psi, tail_tol)?;
    two_sided_weight_with(levels, spec, &psi, tail_tol)
}

pub fn two_sided_weight_with(
    levels: &[Vec<Signature>],
    spec: &TwoSidedSpec,
    psi: &PsiEval<'_>,
    tail_tol: f64,
) -> Result<f64> {
    let n = spec.n();
    if levels.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: levels.len() });
    }
    let mut prev = Signature::empty();
    let mut w = 1.0;
    for (k, level) in levels.iter().enumerate() {
        if level.len() != spec.c[k] + 1 {
            return Err(Error::LengthMismatch { expected: spec.c[k] + 1, got: level.len() });
        }
        if let Some(bad) = level.iter().find(|s| s.len() != k + 1) {
            return Err(Error::LengthMismatch { expected: k + 1, got: bad.len() });
        }
        w *= skew_schur_branch(&level[0], &prev, spec.a[k])?;
        for l in 1..level.len() {
            if w == 0.0 {
                return Ok(0.0);
            }
            w *= skew_schur_sig(&level[l], &level[l - 1], &spec.m[k][l - 1], tail_tol)?;
        }
        prev = level.last().expect("nonempty level").clone();
    }
    let top = &prev;
    Ok(w * det(n, |i, j| psi.entry(top.part(i) - i as i64 - 1, j + 1)))
}

/// Partition function of a two-sided process: ∏ψ(a_i)·∏H in the Toeplitz case,
/// the determinant ratio times ∏H otherwise (distinct a_i required).
pub fn partition_function_two_sided(spec: &TwoSidedSpec, tail_tol: f64) -> Result<f64> {
    spec.validate()?;
    let mp = spec.m_product();
    match &spec.psi {
        Psi::Toeplitz(e) => Ok(spec.a.iter().map(|&a| e.eval_h(a)).product::<f64>() * mp),
        Psi::Table { .. } => {
            spec.distinct_a()?;
            let psi = PsiEval::new(&spec.psi, tail_tol)?;
            let n = spec.n();
            let vander = det(n, |i, j| spec.a[i].powi(-(j as i32 + 1)));
            Ok(spec.psi_denominator(&psi) / vander * mp)
        }
    }
}

/// m^Ψ(λ) = det[a_i^{λ_j − j}] det[Ψ_{λ_i − i, −j}] / det[a_i^{−j} Ψ_j(a_i)].
pub fn m_psi(lam: &Signature, spec: &TwoSidedSpec, tail_tol: f64) -> Result<f64> {
    let psi = PsiEval::new(&spec.psi, tail_tol)?;
    m_psi_with(lam, spec, &psi)
}

pub fn m_psi_with(lam: &Signature, spec: &TwoSidedSpec, psi: &PsiEval<'_>) -> Result<f64> {
    let n = spec.n();
    if lam.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: lam.len() });
    }
    spec.distinct_a()?;
    let num_a = det(n, |i, j| pow_i64(spec.a[i], lam.part(j) - j as i64 - 1));
    let num_psi = det(n, |i, j| psi.entry(lam.part(i) - i as i64 - 1, j + 1));
    Ok(num_a * num_psi / spec.psi_denominator(psi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{partitions_in_box, signatures_in_range, PlanePartition};
    use approx::assert_abs_diff_eq;

    fn p(v: &[i64]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    fn s(v: &[i64]) -> Signature {
        Signature::new(v.to_vec()).unwrap()
    }

    fn alpha(a: f64) -> Specialization {
        Specialization::alpha(a).unwrap()
    }

    fn beta(b: f64) -> Specialization {
        Specialization::beta(b).unwrap()
    }

    #[test]
    fn combinatorial_positivity_matches_evaluation() {
        let specs = [
            Specialization::trivial(),
            Specialization::new(vec![0.3], vec![], 0.0).unwrap(),
            Specialization::new(vec![0.3, 0.2], vec![0.4], 0.0).unwrap(),
            Specialization::new(vec![], vec![0.4, 0.1], 0.0).unwrap(),
            Specialization::new(vec![0.2], vec![0.3, 0.5], 0.0).unwrap(),
            Specialization::new(vec![0.1; 3], vec![0.2; 2], 0.0).unwrap(),
            Specialization::new(vec![], vec![], 0.5).unwrap(),
        ];
        let parts = partitions_in_box(4, 4);
        for spec in &specs {
            for kappa in &parts {
                for tau in &parts {
                    let value = if kappa.contains(tau) { skew_schur(kappa, tau, spec) } else { 0.0 };
                    assert_eq!(skew_schur_positive(kappa, tau, spec), value > 0.0, "{kappa}/{tau} at {spec:?}");
                }
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        assert_abs_diff_eq!(skew_schur_alpha(&p(&[3, 1]), &p(&[2]), 0.5), 0.25);
        assert_eq!(skew_schur_alpha(&p(&[2, 1]), &p(&[2, 1]), 0.3), 1.0);
        assert_eq!(skew_schur_alpha(&p(&[1, 1]), &Partition::empty(), 0.5), 0.0);
        assert_abs_diff_eq!(skew_schur_beta(&p(&[2, 1]), &p(&[1, 1]), 0.7), 0.7);
        assert_eq!(skew_schur_beta(&p(&[3]), &p(&[1]), 0.7), 0.0);
        assert_abs_diff_eq!(skew_schur_jt(&p(&[3, 1]), &p(&[2]), &alpha(0.5)), 0.25, epsilon = 1e-15);
        assert_eq!(skew_schur_jt(&p(&[1]), &p(&[2]), &alpha(0.5)), 0.0);
        let u = alpha(0.5).union(&alpha(0.5));
        assert_abs_diff_eq!(skew_schur_jt(&p(&[2]), &Partition::empty(), &u), 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(schur(&p(&[2]), &u), 0.75, epsilon = 1e-15);
    }

    #[test]
    fn closed_forms_match_jacobi_trudi() {
        let parts = partitions_in_box(4, 5);
        for lam in &parts {
            for mu in &parts {
                for x in [0.3, 0.8] {
                    assert_abs_diff_eq!(skew_schur_alpha(lam, mu, x), skew_schur_jt(lam, mu, &alpha(x)), epsilon = 1e-10);
                    assert_abs_diff_eq!(skew_schur_beta(lam, mu, x), skew_schur_jt(lam, mu, &beta(x)), epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn branching_matches_jacobi_trudi() {
        let spec = Specialization::new(vec![0.4, 0.25], vec![0.5, 0.3], 0.0).unwrap();
        for lam in partitions_in_box(3, 4) {
            for mu in partitions_in_box(2, 2) {
                let a = skew_schur(&lam, &mu, &spec);
                let b = skew_schur_jt(&lam, &mu, &spec);
                assert!(a >= 0.0);
                assert_abs_diff_eq!(a, b, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn signature_examples() {
        assert_abs_diff_eq!(skew_schur_sig_alpha(&s(&[0]), &s(&[2]), 1.0, Sign::Minus).unwrap(), 0.125);
        assert_abs_diff_eq!(skew_schur_sig_alpha(&s(&[1, 0]), &s(&[1, 0]), 1.0, Sign::Plus).unwrap(), 0.25);
        assert_abs_diff_eq!(skew_schur_sig_alpha(&s(&[1, 0]), &s(&[1, 0]), 1.0, Sign::Minus).unwrap(), 0.25);
        assert_eq!(skew_schur_sig_alpha(&s(&[0]), &s(&[2]), 1.0, Sign::Plus).unwrap(), 0.0);
        assert_abs_diff_eq!(skew_schur_sig_beta(&s(&[1, 0]), &s(&[0, 0]), 0.5, Sign::Plus).unwrap(), 0.25);
        assert_abs_diff_eq!(skew_schur_sig_beta(&s(&[3, 1]), &s(&[3, 1]), 0.3, Sign::Minus).unwrap(), 0.49, epsilon = 1e-15);
        assert_eq!(skew_schur_sig_beta(&s(&[2]), &s(&[0]), 0.3, Sign::Plus).unwrap(), 0.0);
        assert!(skew_schur_sig_beta(&s(&[1]), &s(&[0]), 1.0, Sign::Plus).is_err());
        assert!(skew_schur_sig_alpha(&s(&[1]), &s(&[0, 0]), 1.0, Sign::Plus).is_err());
        assert_eq!(skew_schur_branch(&s(&[4, -1]), &s(&[3]), 1.0).unwrap(), 1.0);
        assert_eq!(skew_schur_branch(&s(&[4, -1]), &s(&[5]), 1.0).unwrap(), 0.0);
        assert_eq!(skew_schur_branch(&s(&[2, 0]), &s(&[1]), 0.5).unwrap(), 0.5);
    }

    #[test]
    fn toeplitz_examples() {
        let am = EdreiSpec::new(vec![], vec![1.0], vec![], vec![], 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(skew_schur_toeplitz(&s(&[0]), &s(&[2]), &am, 1e-15).unwrap(), 0.125, epsilon = 1e-14);
        assert_eq!(skew_schur_toeplitz(&s(&[3, 1]), &s(&[3, 1]), &EdreiSpec::trivial(), 1e-15).unwrap(), 1.0);
        let bp = EdreiSpec::new(vec![], vec![], vec![0.5], vec![], 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(skew_schur_toeplitz(&s(&[1, 0]), &s(&[0, 0]), &bp, 1e-15).unwrap(), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn signature_closed_forms_match_toeplitz_minors() {
        let singles = [
            SingleEdrei::AlphaPlus(0.7),
            SingleEdrei::AlphaMinus(0.4),
            SingleEdrei::BetaPlus(0.3),
            SingleEdrei::BetaMinus(0.6),
        ];
        for single in singles {
            let series = single.to_spec().laurent_series(1e-16).unwrap();
            for n in 1..=3 {
                let sigs = signatures_in_range(n, -4, 4);
                for lam in &sigs {
                    for mu in &sigs {
                        let closed = skew_schur_sig_single(lam, mu, single).unwrap();
                        let minor = skew_schur_toeplitz_series(lam, mu, &series).unwrap();
                        assert_abs_diff_eq!(closed, minor, epsilon = 1e-10);
                    }
                }
            }
        }
    }

    fn shape_and_process(a: usize, b: usize, pi: &[i64], q: f64) -> (PlanePartitionShape, SchurProcessSpec) {
        let shape = PlanePartitionShape::new(a, b, p(pi)).unwrap();
        let spec = spp_process_spec(&shape, q).unwrap();
        (shape, spec)
    }

    #[test]
    fn spp_spec_structure() {
        let (_, spec) = shape_and_process(4, 3, &[2, 1, 1], 0.5);
        assert_eq!(spec.n(), 8);
        let nontrivial: Vec<usize> = (0..8).filter(|&j| !spec.rho_plus[j].is_trivial()).collect();
        assert_eq!(nontrivial, vec![1, 3, 4, 6]);
        assert!(spec.rho_minus[7].is_trivial());
        assert!(spp_process_spec(&PlanePartitionShape::full_box(1, 1).unwrap(), 1.0).is_err());
    }

    #[test]
    fn partition_function_examples() {
        let (_, spec) = shape_and_process(1, 1, &[], 0.5);
        assert_abs_diff_eq!(partition_function_schur(&spec).unwrap(), 2.0, epsilon = 1e-14);
        let (_, spec) = shape_and_process(1, 2, &[], 0.5);
        assert_abs_diff_eq!(partition_function_schur(&spec).unwrap(), 8.0 / 3.0, epsilon = 1e-14);
        let trivial_minus = SchurProcessSpec::new(vec![alpha(0.5), beta(0.3)], vec![Specialization::trivial(); 2]).unwrap();
        assert_eq!(partition_function_schur(&trivial_minus).unwrap(), 1.0);
    }

    fn slices_to_process(slices: &[Partition], shape: &PlanePartitionShape) -> (Vec<Partition>, Vec<Partition>) {
        // μ^{(j)} is the smaller of the two neighbouring slices
        let ups = shape.up_steps();
        let lams = slices.to_vec();
        let mus = (1..slices.len())
            .map(|j| if ups.contains(&j) { slices[j - 1].clone() } else { slices[j].clone() })
            .collect();
        (lams, mus)
    }

    #[test]
    fn process_weight_reproduces_q_volume() {
        let (shape, spec) = shape_and_process(4, 3, &[2, 1, 1], 0.9);
        let slices = vec![
            Partition::empty(),
            p(&[4]),
            p(&[3]),
            p(&[5, 1]),
            p(&[10, 2]),
            p(&[6]),
            p(&[8]),
            Partition::empty(),
        ];
        let (lams, mus) = slices_to_process(&slices, &shape);
        let w = process_weight(&lams, &mus, &spec).unwrap();
        assert!((w / 0.9f64.powi(39) - 1.0).abs() < 1e-12);
        let empty = vec![Partition::empty(); 8];
        assert_eq!(process_weight(&empty, &empty[..7], &spec).unwrap(), 1.0);
        let n1 = SchurProcessSpec::new(vec![alpha(0.3)], vec![alpha(0.6)]).unwrap();
        assert_abs_diff_eq!(process_weight(&[p(&[1])], &[], &n1).unwrap(), 0.18, epsilon = 1e-15);
    }

    #[test]
    fn weighted_spec_matches_uniform_bitwise() {
        let shape = PlanePartitionShape::new(2, 3, p(&[1])).unwrap();
        let a = spp_process_spec(&shape, 0.37).unwrap();
        let b = spp_weighted_process_spec(&shape, &[0.37; 4]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn weighted_spec_weights_slices() {
        let shape = PlanePartitionShape::full_box(2, 2).unwrap();
        let q = [0.3, 0.5, 0.2];
        let spec = spp_weighted_process_spec(&shape, &q).unwrap();
        let pp = PlanePartition::new(shape.clone(), vec![vec![3, 1], vec![2, 0]]).unwrap();
        let slices = pp.diagonal_slices();
        let (lams, mus) = slices_to_process(&slices, &shape);
        let w = process_weight(&lams, &mus, &spec).unwrap();
        let expected: f64 = (2..=4).map(|j| q[j - 2].powi(slices[j - 1].size() as i32)).product();
        assert!((w / expected - 1.0).abs() < 1e-12);
    }

    fn toeplitz_spec(a: Vec<f64>, c: Vec<usize>, m: Vec<Vec<EdreiSpec>>, psi: EdreiSpec) -> TwoSidedSpec {
        TwoSidedSpec::new(a, c, m, Psi::Toeplitz(psi)).unwrap()
    }

    fn am(x: f64) -> EdreiSpec {
        EdreiSpec::new(vec![], vec![x], vec![], vec![], 0.0, 0.0).unwrap()
    }

    fn bm(x: f64) -> EdreiSpec {
        EdreiSpec::new(vec![], vec![], vec![], vec![x], 0.0, 0.0).unwrap()
    }

    #[test]
    fn two_sided_examples() {
        let spec = toeplitz_spec(vec![1.0], vec![0], vec![vec![]], am(1.0));
        let w = two_sided_weight(&[vec![s(&[-2])]], &spec, 1e-15).unwrap();
        assert_abs_diff_eq!(w, 0.125, epsilon = 1e-14);
        assert_abs_diff_eq!(partition_function_two_sided(&spec, 1e-15).unwrap(), 1.0, epsilon = 1e-15);
        let spec2 = toeplitz_spec(vec![1.0, 1.1], vec![0, 0], vec![vec![], vec![]], EdreiSpec::trivial());
        assert_abs_diff_eq!(partition_function_two_sided(&spec2, 1e-15).unwrap(), 1.0, epsilon = 1e-15);
        // interlacing violated
        let spec3 = toeplitz_spec(vec![0.9, 1.1], vec![0, 0], vec![vec![], vec![]], am(1.0));
        let bad = two_sided_weight(&[vec![s(&[2])], vec![s(&[0, -1])]], &spec3, 1e-15).unwrap();
        assert_eq!(bad, 0.0);
    }

    #[test]
    fn two_sided_minimal_beta_weights() {
        // with Ψ = β⁻ and M = β⁻ the minimal configuration has weight ∏(1−β)^n factors
        let spec = toeplitz_spec(vec![1.0], vec![1], vec![vec![bm(0.3)]], bm(0.4));
        let w = two_sided_weight(&[vec![s(&[0]), s(&[0])]], &spec, 1e-15).unwrap();
        assert_abs_diff_eq!(w, 0.7 * 0.6, epsilon = 1e-15);
    }

    #[test]
    fn two_sided_partition_function_matches_truncated_sum() {
        let spec = toeplitz_spec(vec![0.9, 1.1], vec![0, 1], vec![vec![], vec![bm(0.3)]], am(1.0));
        let z = partition_function_two_sided(&spec, 1e-16).unwrap();
        let psi = PsiEval::new(&spec.psi, 1e-16).unwrap();
        let mut total = 0.0;
        for l1 in signatures_in_range(1, -60, 1) {
            for l20 in signatures_in_range(2, -60, 1) {
                let w0 = skew_schur_branch(&l20, &l1, 0.9).unwrap();
                if w0 == 0.0 {
                    continue;
                }
                for d0 in 0..2 {
                    for d1 in 0..2 {
                        let parts = vec![l20.part(0) - d0, l20.part(1) - d1];
                        let Ok(l21) = Signature::new(parts) else { continue };
                        let w = two_sided_weight_with(&[vec![l1.clone()], vec![l20.clone(), l21]], &spec, &psi, 1e-16).unwrap();
                        total += w;
                    }
                }
            }
        }
        assert!((total / z - 1.0).abs() < 1e-6, "{total} vs {z}");
    }

    #[test]
    fn m_psi_examples() {
        let spec = toeplitz_spec(vec![1.0], vec![0], vec![vec![]], am(1.0));
        for k in 0..5 {
            let v = m_psi(&s(&[-k]), &spec, 1e-16).unwrap();
            assert_abs_diff_eq!(v, 0.5f64.powi(k as i32 + 1), epsilon = 1e-15);
        }
        assert_eq!(m_psi(&s(&[1]), &spec, 1e-16).unwrap(), 0.0);
        let ap = EdreiSpec::new(vec![0.2], vec![], vec![], vec![], 0.0, 0.0).unwrap();
        let spec = toeplitz_spec(vec![0.9, 1.1], vec![0, 0], vec![vec![], vec![]], ap);
        let psi = PsiEval::new(&spec.psi, 1e-16).unwrap();
        let total: f64 = signatures_in_range(2, 0, 40).iter().map(|l| m_psi_with(l, &spec, &psi).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-8);
        let trivial = toeplitz_spec(vec![0.9, 1.1], vec![0, 0], vec![vec![], vec![]], EdreiSpec::trivial());
        assert_abs_diff_eq!(m_psi(&s(&[0, 0]), &trivial, 1e-16).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m_psi(&s(&[1, 0]), &trivial, 1e-16).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn table_psi_matches_toeplitz_form() {
        // a finitely supported Toeplitz Ψ written as a table must give the same Z
        let bp = EdreiSpec::new(vec![], vec![], vec![0.4], vec![0.3], 0.0, 0.0).unwrap();
        let series = bp.laurent_series(1e-16).unwrap();
        let n_min = -4;
        let columns: Vec<Vec<f64>> = (1..=2).map(|j| (n_min..=4).map(|i| series.coeff(i + j)).collect()).collect();
        let table = TwoSidedSpec::new(vec![0.8, 1.3], vec![0, 0], vec![vec![], vec![]], Psi::Table { n_min, columns }).unwrap();
        let toep = toeplitz_spec(vec![0.8, 1.3], vec![0, 0], vec![vec![], vec![]], bp);
        assert_abs_diff_eq!(
            partition_function_two_sided(&table, 1e-16).unwrap(),
            partition_function_two_sided(&toep, 1e-16).unwrap(),
            epsilon = 1e-12
        );
        let coincident = TwoSidedSpec::new(vec![1.0, 1.0], vec![0, 0], vec![vec![], vec![]], table.psi.clone()).unwrap();
        assert!(matches!(partition_function_two_sided(&coincident, 1e-16), Err(Error::CoincidentParameters(_))));
    }

    #[test]
    fn annulus_violation_rejected() {
        let err = TwoSidedSpec::new(vec![0.3], vec![0], vec![vec![]], Psi::Toeplitz(am(1.0)));
        assert!(matches!(err, Err(Error::AnnulusViolation { .. })));
    }
}
