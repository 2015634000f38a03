//! Nonnegative specializations of the ring of symmetric functions and
//! admissible two-sided Toeplitz matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_params(name: &str, xs: &[f64]) -> Result<()> {
    for &x in xs {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::InvalidParameter(format!("{name} parameter {x} must be finite and nonnegative")));
        }
    }
    Ok(())
}

/// Parameters (α, β, γ) of H(ρ; u) = e^{γu} ∏ (1 + β_i u) / (1 − α_i u).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Specialization {
    alphas: Vec<f64>,
    betas: Vec<f64>,
    gamma: f64,
}

/// A specialization with at most one nonzero parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SingleSpec {
    Trivial,
    Alpha(f64),
    Beta(f64),
}

impl Specialization {
    /// Zero parameters are dropped, so a specialization with only zeros is trivial.
    pub fn new(alphas: Vec<f64>, betas: Vec<f64>, gamma: f64) -> Result<Self> {
        check_params("alpha", &alphas)?;
        check_params("beta", &betas)?;
        check_params("gamma", &[gamma])?;
        Ok(Specialization {
            alphas: alphas.into_iter().filter(|&a| a > 0.0).collect(),
            betas: betas.into_iter().filter(|&b| b > 0.0).collect(),
            gamma,
        })
    }

    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn alpha(a: f64) -> Result<Self> {
        Self::new(vec![a], vec![], 0.0)
    }

    pub fn beta(b: f64) -> Result<Self> {
        Self::new(vec![], vec![b], 0.0)
    }

    pub fn gamma_only(g: f64) -> Result<Self> {
        Self::new(vec![], vec![], g)
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn is_trivial(&self) -> bool {
        self.alphas.is_empty() && self.betas.is_empty() && self.gamma == 0.0
    }

    pub fn num_params(&self) -> usize {
        self.alphas.len() + self.betas.len() + usize::from(self.gamma > 0.0)
    }

    /// The supremum radius r of discs where H(ρ; u) is holomorphic: 1 / max α.
    pub fn admissibility_radius(&self) -> f64 {
        let amax = self.alphas.iter().cloned().fold(0.0, f64::max);
        if amax == 0.0 {
            f64::INFINITY
        } else {
            1.0 / amax
        }
    }

    /// max α < 1.
    pub fn is_admissible(&self) -> bool {
        self.alphas.iter().all(|&a| a < 1.0)
    }

    /// The single nonzero parameter, if there is at most one.
    pub fn single(&self) -> Result<SingleSpec> {
        if self.gamma > 0.0 {
            return Err(Error::GammaUnsupported);
        }
        match (self.alphas.as_slice(), self.betas.as_slice()) {
            ([], []) => Ok(SingleSpec::Trivial),
            ([a], []) => Ok(SingleSpec::Alpha(*a)),
            ([], [b]) => Ok(SingleSpec::Beta(*b)),
            _ => Err(Error::NotSingleParameter(format!("{self:?}"))),
        }
    }

    /// Splits into single-parameter pieces: α's in list order, then β's.
    pub fn decompose(&self) -> Result<Vec<SingleSpec>> {
        if self.gamma > 0.0 {
            return Err(Error::GammaUnsupported);
        }
        Ok(self
            .alphas
            .iter()
            .map(|&a| SingleSpec::Alpha(a))
            .chain(self.betas.iter().map(|&b| SingleSpec::Beta(b)))
            .collect())
    }

    pub fn union(&self, other: &Specialization) -> Specialization {
        let mut alphas = self.alphas.clone();
        alphas.extend_from_slice(&other.alphas);
        let mut betas = self.betas.clone();
        betas.extend_from_slice(&other.betas);
        Specialization { alphas, betas, gamma: self.gamma + other.gamma }
    }

    /// Removes the parameters of `sigma` from `self` (multiset difference).
    /// Fails if `sigma` is not contained in `self`.
    pub fn divide(&self, sigma: &Specialization) -> Result<Specialization> {
        fn remove(from: &mut Vec<f64>, what: &[f64]) -> bool {
            for &x in what {
                match from.iter().position(|&y| y == x) {
                    Some(i) => {
                        from.remove(i);
                    }
                    None => return false,
                }
            }
            true
        }
        let mut alphas = self.alphas.clone();
        let mut betas = self.betas.clone();
        let gamma = self.gamma - sigma.gamma;
        if !remove(&mut alphas, &sigma.alphas) || !remove(&mut betas, &sigma.betas) || gamma < 0.0 {
            return Err(Error::InvalidParameter(format!("{sigma:?} does not divide {self:?}")));
        }
        Ok(Specialization { alphas, betas, gamma })
    }

    /// Taylor coefficients h_0..h_{n_max} of H(ρ; u).
    pub fn h_coeffs(&self, n_max: usize) -> Vec<f64> {
        let mut h = vec![0.0; n_max + 1];
        h[0] = 1.0;
        for &a in &self.alphas {
            // multiply by 1/(1 − a u): h_n += a h_{n−1}
            for n in 1..=n_max {
                h[n] += a * h[n - 1];
            }
        }
        for &b in &self.betas {
            for n in (1..=n_max).rev() {
                h[n] += b * h[n - 1];
            }
        }
        if self.gamma > 0.0 {
            let mut e = vec![0.0; n_max + 1];
            e[0] = 1.0;
            for n in 1..=n_max {
                e[n] = e[n - 1] * self.gamma / n as f64;
            }
            h = convolve_prefix(&h, &e);
        }
        h
    }

    /// Newton power sum p_n(ρ).
    pub fn power_sum(&self, n: u32) -> f64 {
        assert!(n >= 1, "power sums start at n = 1");
        let sa: f64 = self.alphas.iter().map(|a| a.powi(n as i32)).sum();
        let sb: f64 = self.betas.iter().map(|b| b.powi(n as i32)).sum();
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        let g = if n == 1 { self.gamma } else { 0.0 };
        g + sa + sign * sb
    }

    /// H(ρ; u) at a real point inside the disc of analyticity.
    pub fn eval_h(&self, u: f64) -> f64 {
        let mut v = (self.gamma * u).exp();
        for &a in &self.alphas {
            v /= 1.0 - a * u;
        }
        for &b in &self.betas {
            v *= 1.0 + b * u;
        }
        v
    }
}

fn convolve_prefix(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    (0..n).map(|k| (0..=k).map(|i| a[i] * b[k - i]).sum()).collect()
}

/// H(ρ_1; ρ_2) = Σ_λ s_λ(ρ_1) s_λ(ρ_2), in closed product form.
pub fn pairing_h(s1: &Specialization, s2: &Specialization) -> Result<f64> {
    let mut v = 1.0;
    for &a in &s1.alphas {
        for &a2 in &s2.alphas {
            if a * a2 >= 1.0 {
                return Err(Error::Divergent(format!("α·α' = {} ≥ 1", a * a2)));
            }
            v /= 1.0 - a * a2;
        }
        for &b2 in &s2.betas {
            v *= 1.0 + a * b2;
        }
    }
    for &b in &s1.betas {
        for &a2 in &s2.alphas {
            v *= 1.0 + b * a2;
        }
        for &b2 in &s2.betas {
            if b * b2 >= 1.0 {
                return Err(Error::Divergent(format!("β·β' = {} ≥ 1", b * b2)));
            }
            v /= 1.0 - b * b2;
        }
    }
    let lin1: f64 = s1.alphas.iter().chain(&s1.betas).sum();
    let lin2: f64 = s2.alphas.iter().chain(&s2.betas).sum();
    v *= (s1.gamma * s2.gamma + s1.gamma * lin2 + s2.gamma * lin1).exp();
    Ok(v)
}

/// Analyticity annulus r1 < |u| < r2 of H(M; u).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Annulus {
    pub r1: f64,
    pub r2: f64,
}

impl Annulus {
    pub fn contains(&self, u: f64) -> bool {
        self.r1 < u && u < self.r2
    }

    /// Annulus of u ↦ H(M; u^{-1}).
    pub fn inverted(&self) -> Annulus {
        Annulus { r1: 1.0 / self.r2, r2: if self.r1 == 0.0 { f64::INFINITY } else { 1.0 / self.r1 } }
    }

    pub fn intersect(&self, other: &Annulus) -> Annulus {
        Annulus { r1: self.r1.max(other.r1), r2: self.r2.min(other.r2) }
    }
}

/// Parameters of an admissible totally nonnegative Toeplitz matrix.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EdreiSpec {
    pub alpha_plus: Vec<f64>,
    pub alpha_minus: Vec<f64>,
    pub beta_plus: Vec<f64>,
    pub beta_minus: Vec<f64>,
    #[serde(default)]
    pub gamma_plus: f64,
    #[serde(default)]
    pub gamma_minus: f64,
}

/// A Toeplitz matrix with exactly one nonzero parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SingleEdrei {
    Trivial,
    AlphaPlus(f64),
    AlphaMinus(f64),
    BetaPlus(f64),
    BetaMinus(f64),
}

impl SingleEdrei {
    pub fn to_spec(self) -> EdreiSpec {
        let mut e = EdreiSpec::default();
        match self {
            SingleEdrei::Trivial => {}
            SingleEdrei::AlphaPlus(a) => e.alpha_plus.push(a),
            SingleEdrei::AlphaMinus(a) => e.alpha_minus.push(a),
            SingleEdrei::BetaPlus(b) => e.beta_plus.push(b),
            SingleEdrei::BetaMinus(b) => e.beta_minus.push(b),
        }
        e
    }
}

/// Laurent coefficients M_n for n in `offset .. offset + coeffs.len()`,
/// with the discarded mass bounded by `tail`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentSeries {
    pub offset: i64,
    pub coeffs: Vec<f64>,
    pub tail: f64,
}

impl LaurentSeries {
    pub fn coeff(&self, n: i64) -> f64 {
        let idx = n - self.offset;
        if idx < 0 {
            return 0.0;
        }
        self.coeffs.get(idx as usize).copied().unwrap_or(0.0)
    }

    fn point() -> Self {
        LaurentSeries { offset: 0, coeffs: vec![1.0], tail: 0.0 }
    }

    fn convolve(&self, other: &LaurentSeries) -> LaurentSeries {
        let mut coeffs = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &x) in self.coeffs.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (j, &y) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += x * y;
            }
        }
        LaurentSeries { offset: self.offset + other.offset, coeffs, tail: self.tail + other.tail }
    }

    fn mirrored(self) -> LaurentSeries {
        let len = self.coeffs.len() as i64;
        let mut coeffs = self.coeffs;
        coeffs.reverse();
        LaurentSeries { offset: -(self.offset + len - 1), coeffs, tail: self.tail }
    }
}

const LAURENT_TERM_CAP: usize = 1_000_000;

fn geometric_law(alpha: f64, tol: f64) -> Result<LaurentSeries> {
    // 1/(1 − α(u − 1)) = Σ_k (1/(1+α)) p^k u^k with p = α/(1+α); mass beyond K terms is p^K
    let p = alpha / (1.0 + alpha);
    let mut coeffs = Vec::new();
    let mut term = 1.0 / (1.0 + alpha);
    let mut tail = 1.0;
    while tail >= tol {
        if coeffs.len() >= LAURENT_TERM_CAP {
            return Err(Error::TailUnreachable { tol, cap: LAURENT_TERM_CAP });
        }
        coeffs.push(term);
        term *= p;
        tail *= p;
    }
    Ok(LaurentSeries { offset: 0, coeffs, tail })
}

fn poisson_law(gamma: f64, tol: f64) -> Result<LaurentSeries> {
    let mut coeffs = Vec::new();
    let mut term = (-gamma).exp();
    loop {
        coeffs.push(term);
        let k = coeffs.len() as f64;
        let next = term * gamma / k;
        // later terms decay at least by the ratio γ/(k+1)
        let ratio = gamma / (k + 1.0);
        if ratio < 1.0 {
            let bound = next / (1.0 - ratio);
            if bound < tol {
                return Ok(LaurentSeries { offset: 0, coeffs, tail: bound });
            }
        }
        if coeffs.len() >= LAURENT_TERM_CAP {
            return Err(Error::TailUnreachable { tol, cap: LAURENT_TERM_CAP });
        }
        term = next;
    }
}

impl EdreiSpec {
    pub fn new(
        alpha_plus: Vec<f64>,
        alpha_minus: Vec<f64>,
        beta_plus: Vec<f64>,
        beta_minus: Vec<f64>,
        gamma_plus: f64,
        gamma_minus: f64,
    ) -> Result<Self> {
        let e = EdreiSpec {
            alpha_plus: alpha_plus.into_iter().filter(|&x| x != 0.0).collect(),
            alpha_minus: alpha_minus.into_iter().filter(|&x| x != 0.0).collect(),
            beta_plus: beta_plus.into_iter().filter(|&x| x != 0.0).collect(),
            beta_minus: beta_minus.into_iter().filter(|&x| x != 0.0).collect(),
            gamma_plus,
            gamma_minus,
        };
        e.validate()?;
        Ok(e)
    }

    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        check_params("alpha+", &self.alpha_plus)?;
        check_params("alpha-", &self.alpha_minus)?;
        check_params("beta+", &self.beta_plus)?;
        check_params("beta-", &self.beta_minus)?;
        check_params("gamma", &[self.gamma_plus, self.gamma_minus])?;
        if let Some(b) = self.beta_plus.iter().chain(&self.beta_minus).find(|&&b| b > 1.0) {
            return Err(Error::InvalidParameter(format!("beta parameter {b} exceeds 1")));
        }
        Ok(())
    }

    /// max β⁺ + max β⁻ ≤ 1, the condition making the parametrization unique.
    pub fn is_canonical(&self) -> bool {
        let bp = self.beta_plus.iter().cloned().fold(0.0, f64::max);
        let bm = self.beta_minus.iter().cloned().fold(0.0, f64::max);
        bp + bm <= 1.0
    }

    pub fn has_gamma(&self) -> bool {
        self.gamma_plus > 0.0 || self.gamma_minus > 0.0
    }

    pub fn is_trivial(&self) -> bool {
        self.num_factors() == 0
    }

    fn num_factors(&self) -> usize {
        self.alpha_plus.len()
            + self.alpha_minus.len()
            + self.beta_plus.len()
            + self.beta_minus.len()
            + usize::from(self.gamma_plus > 0.0)
            + usize::from(self.gamma_minus > 0.0)
    }

    /// Product of Toeplitz matrices: concatenated parameters.
    pub fn product(&self, other: &EdreiSpec) -> EdreiSpec {
        let cat = |a: &[f64], b: &[f64]| a.iter().chain(b).cloned().collect::<Vec<_>>();
        EdreiSpec {
            alpha_plus: cat(&self.alpha_plus, &other.alpha_plus),
            alpha_minus: cat(&self.alpha_minus, &other.alpha_minus),
            beta_plus: cat(&self.beta_plus, &other.beta_plus),
            beta_minus: cat(&self.beta_minus, &other.beta_minus),
            gamma_plus: self.gamma_plus + other.gamma_plus,
            gamma_minus: self.gamma_minus + other.gamma_minus,
        }
    }

    /// Transposed matrix: H(Q^t; u) = H(Q; u^{-1}).
    pub fn transpose(&self) -> EdreiSpec {
        EdreiSpec {
            alpha_plus: self.alpha_minus.clone(),
            alpha_minus: self.alpha_plus.clone(),
            beta_plus: self.beta_minus.clone(),
            beta_minus: self.beta_plus.clone(),
            gamma_plus: self.gamma_minus,
            gamma_minus: self.gamma_plus,
        }
    }

    pub fn single(&self) -> Result<SingleEdrei> {
        if self.has_gamma() {
            return Err(Error::GammaUnsupported);
        }
        match (
            self.alpha_plus.as_slice(),
            self.alpha_minus.as_slice(),
            self.beta_plus.as_slice(),
            self.beta_minus.as_slice(),
        ) {
            ([], [], [], []) => Ok(SingleEdrei::Trivial),
            ([a], [], [], []) => Ok(SingleEdrei::AlphaPlus(*a)),
            ([], [a], [], []) => Ok(SingleEdrei::AlphaMinus(*a)),
            ([], [], [b], []) => Ok(SingleEdrei::BetaPlus(*b)),
            ([], [], [], [b]) => Ok(SingleEdrei::BetaMinus(*b)),
            _ => Err(Error::NotSingleParameter(format!("{self:?}"))),
        }
    }

    /// Splits into single-parameter factors: α⁺, α⁻, β⁺, β⁻ in list order.
    pub fn decompose(&self) -> Result<Vec<SingleEdrei>> {
        if self.has_gamma() {
            return Err(Error::GammaUnsupported);
        }
        let mut out: Vec<SingleEdrei> = self.alpha_plus.iter().map(|&a| SingleEdrei::AlphaPlus(a)).collect();
        out.extend(self.alpha_minus.iter().map(|&a| SingleEdrei::AlphaMinus(a)));
        out.extend(self.beta_plus.iter().map(|&b| SingleEdrei::BetaPlus(b)));
        out.extend(self.beta_minus.iter().map(|&b| SingleEdrei::BetaMinus(b)));
        Ok(out)
    }

    pub fn analyticity_annulus(&self) -> Annulus {
        let r1 = self.alpha_minus.iter().map(|&a| a / (1.0 + a)).fold(0.0, f64::max);
        let r2 = self.alpha_plus.iter().map(|&a| (1.0 + a) / a).fold(f64::INFINITY, f64::min);
        Annulus { r1, r2 }
    }

    /// H(M; u) at a real point of the annulus.
    pub fn eval_h(&self, u: f64) -> f64 {
        let inv = 1.0 / u;
        let mut v = (self.gamma_plus * (u - 1.0) + self.gamma_minus * (inv - 1.0)).exp();
        for &a in &self.alpha_plus {
            v /= 1.0 - a * (u - 1.0);
        }
        for &a in &self.alpha_minus {
            v /= 1.0 - a * (inv - 1.0);
        }
        for &b in &self.beta_plus {
            v *= 1.0 + b * (u - 1.0);
        }
        for &b in &self.beta_minus {
            v *= 1.0 + b * (inv - 1.0);
        }
        v
    }

    /// All Laurent coefficients carrying mass, with total discarded mass below `tol`.
    ///
    /// Each factor of H(M; u) is the generating function of a probability
    /// law on ℤ, so M is their convolution; every infinite factor is cut
    /// where its tail drops below tol / #factors.
    pub fn laurent_series(&self, tol: f64) -> Result<LaurentSeries> {
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tail tolerance {tol} must be positive")));
        }
        let per = tol / self.num_factors().max(1) as f64;
        let mut acc = LaurentSeries::point();
        for &a in &self.alpha_plus {
            acc = acc.convolve(&geometric_law(a, per)?);
        }
        for &a in &self.alpha_minus {
            acc = acc.convolve(&geometric_law(a, per)?.mirrored());
        }
        for &b in &self.beta_plus {
            acc = acc.convolve(&LaurentSeries { offset: 0, coeffs: vec![1.0 - b, b], tail: 0.0 });
        }
        for &b in &self.beta_minus {
            acc = acc.convolve(&LaurentSeries { offset: -1, coeffs: vec![b, 1.0 - b], tail: 0.0 });
        }
        if self.gamma_plus > 0.0 {
            acc = acc.convolve(&poisson_law(self.gamma_plus, per)?);
        }
        if self.gamma_minus > 0.0 {
            acc = acc.convolve(&poisson_law(self.gamma_minus, per)?.mirrored());
        }
        Ok(acc)
    }

    /// M_{n_min}, …, M_{n_max}.
    pub fn laurent_coeffs(&self, n_min: i64, n_max: i64, tol: f64) -> Result<Vec<f64>> {
        if n_min > n_max {
            return Err(Error::InvalidParameter(format!("empty range {n_min}..={n_max}")));
        }
        let series = self.laurent_series(tol)?;
        Ok((n_min..=n_max).map(|n| series.coeff(n)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn h_coeffs_examples() {
        let h = Specialization::alpha(0.5).unwrap().h_coeffs(3);
        assert_eq!(h, vec![1.0, 0.5, 0.25, 0.125]);
        let h = Specialization::beta(0.7).unwrap().h_coeffs(3);
        assert_eq!(h, vec![1.0, 0.7, 0.0, 0.0]);
        assert_eq!(Specialization::trivial().h_coeffs(2), vec![1.0, 0.0, 0.0]);
        let u = Specialization::alpha(0.5).unwrap().union(&Specialization::alpha(0.5).unwrap());
        assert_abs_diff_eq!(u.h_coeffs(2)[2], 0.75, epsilon = 1e-15);
        let g = Specialization::gamma_only(2.0).unwrap().h_coeffs(3);
        assert_abs_diff_eq!(g[3], 8.0 / 6.0, epsilon = 1e-15);
    }

    #[test]
    fn power_sum_examples() {
        assert_abs_diff_eq!(Specialization::alpha(0.5).unwrap().power_sum(3), 0.125);
        assert_abs_diff_eq!(Specialization::beta(0.5).unwrap().power_sum(2), -0.25);
        assert_eq!(Specialization::trivial().power_sum(4), 0.0);
    }

    #[test]
    fn pairing_examples() {
        let a = Specialization::alpha(0.5).unwrap();
        assert_abs_diff_eq!(pairing_h(&a, &a).unwrap(), 4.0 / 3.0, epsilon = 1e-15);
        let b = Specialization::alpha(0.3).unwrap();
        let c = Specialization::beta(0.6).unwrap();
        assert_abs_diff_eq!(pairing_h(&c, &b).unwrap(), 1.18, epsilon = 1e-15);
        assert_eq!(pairing_h(&a, &Specialization::trivial()).unwrap(), 1.0);
        let big = Specialization::alpha(2.0).unwrap();
        assert!(matches!(pairing_h(&big, &a), Err(Error::Divergent(_))));
    }

    #[test]
    fn pairing_matches_power_sum_series() {
        let s1 = Specialization::new(vec![0.3, 0.2], vec![0.4], 0.1).unwrap();
        let s2 = Specialization::new(vec![0.5], vec![0.25, 0.1], 0.3).unwrap();
        let series: f64 = (1..200).map(|n| s1.power_sum(n) * s2.power_sum(n) / n as f64).sum();
        assert_abs_diff_eq!(pairing_h(&s1, &s2).unwrap(), series.exp(), epsilon = 1e-12);
    }

    #[test]
    fn divide_removes_parameters() {
        let s = Specialization::new(vec![0.3], vec![0.2, 0.4], 0.0).unwrap();
        let sigma = Specialization::beta(0.2).unwrap();
        let rest = s.divide(&sigma).unwrap();
        assert_eq!(rest, Specialization::new(vec![0.3], vec![0.4], 0.0).unwrap());
        assert!(s.divide(&Specialization::alpha(0.9).unwrap()).is_err());
    }

    #[test]
    fn laurent_examples() {
        let e = EdreiSpec::new(vec![], vec![1.0], vec![], vec![], 0.0, 0.0).unwrap();
        let m = e.laurent_coeffs(-3, 1, 1e-15).unwrap();
        assert_abs_diff_eq!(m[0], 1.0 / 16.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m[3], 0.5, epsilon = 1e-15);
        assert_eq!(m[4], 0.0);
        let m = EdreiSpec::trivial().laurent_coeffs(-1, 1, 1e-12).unwrap();
        assert_eq!(m, vec![0.0, 1.0, 0.0]);
        let e = EdreiSpec::new(vec![], vec![], vec![0.5], vec![], 0.0, 0.0).unwrap();
        assert_eq!(e.laurent_coeffs(-1, 2, 1e-12).unwrap(), vec![0.0, 0.5, 0.5, 0.0]);
    }

    #[test]
    fn laurent_series_mass_and_tail() {
        let e = EdreiSpec::new(vec![0.3, 0.7], vec![0.5], vec![0.2], vec![0.6], 0.4, 0.2).unwrap();
        let s = e.laurent_series(1e-13).unwrap();
        let total: f64 = s.coeffs.iter().sum();
        assert!(s.tail < 1e-13);
        assert!((1.0 - total - s.tail).abs() < 1e-12);
        assert!(s.coeffs.iter().all(|&c| c >= -1e-15));
        // generating function at u = 1.3 against the closed form
        let value: f64 = s.coeffs.iter().enumerate().map(|(i, c)| c * 1.3f64.powi(s.offset as i32 + i as i32)).sum();
        assert_abs_diff_eq!(value, e.eval_h(1.3), epsilon = 1e-9);
    }

    #[test]
    fn annulus_examples() {
        let e = EdreiSpec::new(vec![0.1], vec![], vec![], vec![], 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(e.analyticity_annulus().r2, 11.0, epsilon = 1e-12);
        let t = EdreiSpec::trivial().analyticity_annulus();
        assert_eq!((t.r1, t.r2), (0.0, f64::INFINITY));
        let e = EdreiSpec::new(vec![1.0], vec![1.0], vec![], vec![], 0.0, 0.0).unwrap();
        let a = e.analyticity_annulus();
        assert_eq!((a.r1, a.r2), (0.5, 2.0));
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(Specialization::alpha(-0.1).is_err());
        assert!(EdreiSpec::new(vec![], vec![], vec![1.5], vec![], 0.0, 0.0).is_err());
        assert!(Specialization::alpha(f64::NAN).is_err());
    }
}
