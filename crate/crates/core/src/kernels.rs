//! Truncated geometric and Bernoulli laws and the conditional update
//! kernels P(λ, μ ⇒ ν) built from them.
//!
//! Every kernel is described coordinatewise. Each of its two skew Schur
//! factors contributes, for each coordinate ν_j, an interval of allowed
//! values and a ratio r with weight r^{ν_j}; the kernel is the product of
//! these weights subject to all intervals. Horizontal strips (single α and
//! the branching factor) force ν_j ≥ ν_{j+1} on their own, so the
//! coordinates are independent draws from truncated geometric laws. When
//! both factors are vertical strips (two β's) the ordering of ν has to be
//! imposed separately and the coordinates are drawn one after another from
//! exact conditionals computed by a backward pass.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{partitions_between, partitions_containing_of_size, Partition, Signature};
use crate::error::{Error, Result};
use crate::measure::TruncatedMeasure;
use crate::schur_eval::skew_schur;
use crate::specializations::{pairing_h, SingleEdrei, SingleSpec, Specialization};

/// Geometric ratios this close to 1 are refused on unbounded supports.
pub const XI_GUARD: f64 = 1e-12;

/// Default cap on the number of states produced by exact enumeration.
pub const ENUMERATION_CAP: usize = 2_000_000;

/// G^ξ_{m,n}: the law on {m, …, n} with P(k) ∝ ξ^k; `n = None` means +∞.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncGeom {
    pub xi: f64,
    pub m: i64,
    pub n: Option<i64>,
}

impl TruncGeom {
    pub fn new(xi: f64, m: i64, n: Option<i64>) -> Result<Self> {
        if !(xi.is_finite() && xi >= 0.0) {
            return Err(Error::InvalidParameter(format!("geometric ratio {xi} must be finite and nonnegative")));
        }
        match n {
            Some(n) if n < m => return Err(Error::EmptySupport(format!("[{m}, {n}]"))),
            None if xi >= 1.0 - XI_GUARD => {
                return Err(Error::Divergent(format!("geometric ratio {xi} on [{m}, ∞)")));
            }
            _ => {}
        }
        Ok(TruncGeom { xi, m, n })
    }

    pub fn is_singleton(&self) -> bool {
        self.n == Some(self.m) || self.xi == 0.0
    }

    pub fn pmf(&self, k: i64) -> f64 {
        if k < self.m || self.n.is_some_and(|n| k > n) {
            return 0.0;
        }
        if self.xi == 0.0 {
            return f64::from(u8::from(k == self.m));
        }
        let t = (k - self.m) as f64;
        match self.n {
            None => self.xi.powf(t) * (1.0 - self.xi),
            Some(n) => {
                let s = (n - self.m + 1) as f64;
                if self.xi == 1.0 {
                    1.0 / s
                } else if self.xi < 1.0 {
                    let ln = self.xi.ln();
                    (t * ln).exp() * -ln.exp_m1() / -(s * ln).exp_m1()
                } else {
                    let ln = -self.xi.ln();
                    ((n - k) as f64 * ln).exp() * -ln.exp_m1() / -(s * ln).exp_m1()
                }
            }
        }
    }

    /// Inverse-transform draw with U uniform on (0, 1].
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        if self.is_singleton() {
            return self.m;
        }
        let u = 1.0 - rng.gen::<f64>();
        match self.n {
            None => self.m + clamp_offset((u.ln() / self.xi.ln()).floor(), i64::MAX / 2),
            Some(n) => {
                let s = n - self.m + 1;
                if self.xi == 1.0 {
                    self.m + clamp_offset((u * s as f64).ceil() - 1.0, s - 1)
                } else if self.xi < 1.0 {
                    self.m + truncated_offset(self.xi.ln(), s, u)
                } else {
                    n - truncated_offset(-self.xi.ln(), s, u)
                }
            }
        }
    }
}

fn clamp_offset(t: f64, max: i64) -> i64 {
    if t.is_nan() || t <= 0.0 {
        0
    } else if t >= max as f64 {
        max
    } else {
        t as i64
    }
}

/// Offset t ∈ [0, s) with P(t) ∝ e^{t·ln}, ln < 0.
fn truncated_offset(ln: f64, s: i64, u: f64) -> i64 {
    // P(T ≥ k) = (x^k − x^s)/(1 − x^s), inverted through V = 1 − U(1 − x^s)
    let mass = -(s as f64 * ln).exp_m1();
    let v_ln = (-u * mass).ln_1p();
    clamp_offset((v_ln / ln).floor(), s - 1)
}

pub fn geom_pmf(g: &TruncGeom, k: i64) -> f64 {
    g.pmf(k)
}

pub fn geom_sample<R: Rng + ?Sized>(g: &TruncGeom, rng: &mut R) -> i64 {
    g.sample(rng)
}

/// B^p_{m,n} with n ∈ {m, m+1} and odds p = P(m+1)/P(m).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncBern {
    pub p: f64,
    pub m: i64,
    pub n: i64,
}

impl TruncBern {
    pub fn new(p: f64, m: i64, n: i64) -> Result<Self> {
        if !(p.is_finite() && p >= 0.0) {
            return Err(Error::InvalidParameter(format!("Bernoulli odds {p} must be finite and nonnegative")));
        }
        if n != m && n != m + 1 {
            return Err(Error::InvalidParameter(format!("Bernoulli support [{m}, {n}] must have one or two points")));
        }
        Ok(TruncBern { p, m, n })
    }

    pub fn pmf(&self, k: i64) -> f64 {
        TruncGeom { xi: self.p, m: self.m, n: Some(self.n) }.pmf(k)
    }
}

pub fn bern_sample<R: Rng + ?Sized>(b: &TruncBern, rng: &mut R) -> i64 {
    TruncGeom { xi: b.p, m: b.m, n: Some(b.n) }.sample(rng)
}

/// Number of one-dimensional draws whose support had more than one point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DrawCounter {
    pub nontrivial_draws: u64,
}

impl DrawCounter {
    pub fn new() -> Self {
        Self::default()
    }

    fn record(&mut self) {
        self.nontrivial_draws += 1;
    }
}

/// The four kernels: the first arrow relates ν to λ (↑: s_{ν/λ}, ↓: s_{λ/ν}),
/// the second relates ν to μ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KernelMode {
    UpUp,
    DownUp,
    UpDown,
    DownDown,
}

impl KernelMode {
    fn arrows(self) -> (bool, bool) {
        match self {
            KernelMode::UpUp => (true, true),
            KernelMode::DownUp => (false, true),
            KernelMode::UpDown => (true, false),
            KernelMode::DownDown => (false, false),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Strip {
    Fixed,
    Horizontal,
    Vertical,
}

/// One skew Schur factor seen from ν: `above` means the factor is s_{ν/x}.
#[derive(Clone, Copy, Debug)]
struct Relation<'a> {
    reference: &'a [i64],
    strip: Strip,
    above: bool,
    ratio: f64,
}

impl Relation<'_> {
    /// Bounds on ν_j; `None` is −∞ as a lower and +∞ as an upper bound.
    /// References are padded by `pad` past their end.
    fn window(&self, j: usize, pad: Option<i64>) -> (Option<i64>, Option<i64>) {
        let x = |i: usize| self.reference.get(i).copied().or(pad);
        let prev = |i: usize| if i == 0 { None } else { x(i - 1) };
        match (self.strip, self.above) {
            (Strip::Fixed, _) => (x(j), x(j)),
            (Strip::Horizontal, true) => (x(j), prev(j)),
            (Strip::Horizontal, false) => (x(j + 1), x(j)),
            (Strip::Vertical, true) => (x(j), x(j).map(|v| v + 1)),
            (Strip::Vertical, false) => (x(j).map(|v| v - 1), x(j)),
        }
    }
}

/// A single coordinate law: either G^ξ_{m,n} or the mirror image of one.
#[derive(Clone, Copy, Debug)]
enum CoordLaw {
    Up(TruncGeom),
    Down(TruncGeom),
}

impl CoordLaw {
    fn new(xi: f64, lo: Option<i64>, hi: Option<i64>) -> Result<Self> {
        match (lo, hi) {
            (Some(lo), Some(hi)) if xi <= 1.0 => Ok(CoordLaw::Up(TruncGeom::new(xi, lo, Some(hi))?)),
            (Some(lo), Some(hi)) => Ok(CoordLaw::Down(TruncGeom::new(1.0 / xi, -hi, Some(-lo))?)),
            (Some(lo), None) => Ok(CoordLaw::Up(TruncGeom::new(xi, lo, None)?)),
            (None, Some(hi)) => {
                if xi == 0.0 {
                    return Err(Error::EmptySupport(format!("zero ratio on (−∞, {hi}]")));
                }
                Ok(CoordLaw::Down(TruncGeom::new(1.0 / xi, -hi, None)?))
            }
            (None, None) => Err(Error::Divergent("coordinate unbounded on both sides".into())),
        }
    }

    fn is_singleton(&self) -> bool {
        match self {
            CoordLaw::Up(g) | CoordLaw::Down(g) => g.is_singleton(),
        }
    }

    fn pmf(&self, k: i64) -> f64 {
        match self {
            CoordLaw::Up(g) => g.pmf(k),
            CoordLaw::Down(g) => g.pmf(-k),
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R, counter: &mut DrawCounter) -> i64 {
        if !self.is_singleton() {
            counter.record();
        }
        match self {
            CoordLaw::Up(g) => g.sample(rng),
            CoordLaw::Down(g) => -g.sample(rng),
        }
    }

    /// Support points, cut where the remaining mass drops below `tol`.
    fn values(&self, tol: f64) -> Vec<i64> {
        let (g, sign) = match self {
            CoordLaw::Up(g) => (g, 1),
            CoordLaw::Down(g) => (g, -1),
        };
        if g.is_singleton() {
            return vec![sign * g.m];
        }
        let end = match g.n {
            Some(n) => n,
            None => {
                // mass beyond K points is ξ^K
                let k = (tol.ln() / g.xi.ln()).ceil().max(1.0) as i64;
                g.m + k - 1
            }
        };
        (g.m..=end).map(|v| sign * v).collect()
    }
}

/// Exact conditionals for a chain of finite windows with ν_j ≥ ν_{j+1}.
#[derive(Clone, Debug)]
struct Chain {
    lo: Vec<i64>,
    /// `f[j][v − lo[j]]` is proportional to the total weight of coordinates
    /// j, j+1, … given ν_j = v.
    f: Vec<Vec<f64>>,
}

#[derive(Clone, Debug)]
enum Coords {
    Independent(Vec<CoordLaw>),
    Ordered(Chain),
}

/// The law of ν as a product over coordinates, possibly followed by a
/// trailing column of ones whose length K ≥ 0 has weight ξ^K.
#[derive(Clone, Debug)]
struct KernelLaw {
    xi: f64,
    coords: Coords,
    tail: bool,
}

impl KernelLaw {
    fn build(rels: [Relation<'_>; 2], len: usize, nonnegative: bool, tail: bool) -> Result<Self> {
        let xi = rels[0].ratio * rels[1].ratio;
        let pad = nonnegative.then_some(0);
        let mut windows = Vec::with_capacity(len);
        for j in 0..len {
            let (mut lo, mut hi): (Option<i64>, Option<i64>) = (nonnegative.then_some(0), None);
            for r in &rels {
                let (l, h) = r.window(j, pad);
                lo = match (lo, l) {
                    (Some(a), Some(b)) => Some(a.max(b)),
                    (a, b) => a.or(b),
                };
                hi = match (hi, h) {
                    (Some(a), Some(b)) => Some(a.min(b)),
                    (a, b) => a.or(b),
                };
            }
            if let (Some(l), Some(h)) = (lo, hi) {
                if l > h {
                    return Err(Error::EmptySupport(format!("coordinate {} has window [{l}, {h}]", j + 1)));
                }
            }
            windows.push((lo, hi));
        }
        let ordered_by_strip = rels.iter().any(|r| r.strip != Strip::Vertical);
        if tail && xi >= 1.0 - XI_GUARD {
            return Err(Error::Divergent(format!("trailing column ratio {xi}")));
        }
        let coords = if ordered_by_strip {
            Coords::Independent(
                windows.into_iter().map(|(lo, hi)| CoordLaw::new(xi, lo, hi)).collect::<Result<_>>()?,
            )
        } else {
            let finite: Vec<(i64, i64)> = windows
                .into_iter()
                .map(|w| match w {
                    (Some(l), Some(h)) => Ok((l, h)),
                    _ => Err(Error::Invariant("vertical strips produced an unbounded window".into())),
                })
                .collect::<Result<_>>()?;
            Coords::Ordered(Chain::new(&finite, xi, tail)?)
        };
        Ok(KernelLaw { xi, coords, tail })
    }

    fn len(&self) -> usize {
        match &self.coords {
            Coords::Independent(c) => c.len(),
            Coords::Ordered(ch) => ch.lo.len(),
        }
    }

    fn tail_allowed(&self, nu: &[i64]) -> bool {
        self.tail && nu.last().is_none_or(|&v| v >= 1)
    }

    fn tail_law(&self) -> TruncGeom {
        TruncGeom { xi: self.xi, m: 0, n: None }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R, counter: &mut DrawCounter) -> Vec<i64> {
        let mut nu = match &self.coords {
            Coords::Independent(c) => c.iter().map(|law| law.sample(rng, counter)).collect(),
            Coords::Ordered(ch) => ch.sample(rng, counter),
        };
        if self.tail_allowed(&nu) {
            let g = self.tail_law();
            if !g.is_singleton() {
                counter.record();
            }
            let k = g.sample(rng);
            nu.extend(std::iter::repeat_n(1, k as usize));
        }
        nu
    }

    /// Probability of ν, given as coordinates with any trailing zeros.
    fn pmf(&self, nu: &[i64]) -> f64 {
        let len = self.len();
        let head: Vec<i64> = (0..len).map(|j| nu.get(j).copied().unwrap_or(0)).collect();
        let rest = if nu.len() > len { &nu[len..] } else { &[][..] };
        let p = match &self.coords {
            Coords::Independent(c) => c.iter().zip(&head).map(|(law, &v)| law.pmf(v)).product(),
            Coords::Ordered(ch) => ch.pmf(&head),
        };
        if p == 0.0 {
            return 0.0;
        }
        let k = rest.iter().take_while(|&&v| v == 1).count();
        if rest[k..].iter().any(|&v| v != 0) {
            return 0.0;
        }
        if self.tail_allowed(&head) {
            p * self.tail_law().pmf(k as i64)
        } else if k == 0 {
            p
        } else {
            0.0
        }
    }

    /// All ν carrying mass, except for a remainder of total mass below about `tol`.
    fn enumerate(&self, tol: f64, cap: usize) -> Result<Vec<(Vec<i64>, f64)>> {
        let mut out = Vec::new();
        let heads: Vec<Vec<i64>> = match &self.coords {
            Coords::Independent(c) => {
                let n_inf = c.iter().filter(|l| matches!(l, CoordLaw::Up(g) | CoordLaw::Down(g) if g.n.is_none())).count();
                let per = tol / (n_inf.max(1) + usize::from(self.tail)) as f64;
                let values: Vec<Vec<i64>> = c.iter().map(|l| l.values(per)).collect();
                cartesian(&values, cap)?
            }
            Coords::Ordered(ch) => ch.support(cap)?,
        };
        let per_tail = tol / 2.0;
        let kmax = if self.tail && self.xi > 0.0 { (per_tail.ln() / self.xi.ln()).ceil().max(1.0) as usize } else { 0 };
        for head in heads {
            let p = self.pmf(&head);
            if p == 0.0 {
                continue;
            }
            if self.tail_allowed(&head) {
                for k in 0..=kmax {
                    let mut nu = head.clone();
                    nu.extend(std::iter::repeat_n(1, k));
                    let pk = self.pmf(&nu);
                    out.push((nu, pk));
                }
            } else {
                out.push((head, p));
            }
            if out.len() > cap {
                return Err(Error::EnumerationCap(cap));
            }
        }
        Ok(out)
    }
}

fn cartesian(values: &[Vec<i64>], cap: usize) -> Result<Vec<Vec<i64>>> {
    let mut out: Vec<Vec<i64>> = vec![Vec::new()];
    for vs in values {
        let mut next = Vec::with_capacity(out.len() * vs.len());
        for prefix in &out {
            for &v in vs {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        if next.len() > cap {
            return Err(Error::EnumerationCap(cap));
        }
        out = next;
    }
    Ok(out)
}

impl Chain {
    fn new(windows: &[(i64, i64)], xi: f64, tail: bool) -> Result<Self> {
        let len = windows.len();
        let lo: Vec<i64> = windows.iter().map(|w| w.0).collect();
        let mut f: Vec<Vec<f64>> = vec![Vec::new(); len];
        let tail_factor = if tail { 1.0 / (1.0 - xi) } else { 1.0 };
        for j in (0..len).rev() {
            let (l, h) = windows[j];
            let mut row = Vec::with_capacity((h - l + 1) as usize);
            for v in l..=h {
                let base = xi.powi((v - l) as i32);
                let cont = if j + 1 == len {
                    if v >= 1 { tail_factor } else { 1.0 }
                } else {
                    let (l2, h2) = windows[j + 1];
                    (l2..=h2.min(v)).map(|w| f[j + 1][(w - l2) as usize]).sum()
                };
                row.push(base * cont);
            }
            let max = row.iter().cloned().fold(0.0, f64::max);
            if max == 0.0 || !max.is_finite() {
                return Err(Error::EmptySupport(format!("no ordered completion from coordinate {}", j + 1)));
            }
            row.iter_mut().for_each(|x| *x /= max);
            f[j] = row;
        }
        Ok(Chain { lo, f })
    }

    /// Feasible values of ν_j given ν_{j−1}, with their conditional weights.
    fn options(&self, j: usize, prev: Option<i64>) -> impl Iterator<Item = (i64, f64)> + '_ {
        let l = self.lo[j];
        self.f[j]
            .iter()
            .enumerate()
            .map(move |(i, &w)| (l + i as i64, w))
            .filter(move |&(v, w)| w > 0.0 && prev.is_none_or(|p| v <= p))
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R, counter: &mut DrawCounter) -> Vec<i64> {
        let mut nu = Vec::with_capacity(self.lo.len());
        for j in 0..self.lo.len() {
            let opts: Vec<(i64, f64)> = self.options(j, nu.last().copied()).collect();
            let v = if opts.len() == 1 {
                opts[0].0
            } else {
                counter.record();
                let total: f64 = opts.iter().map(|o| o.1).sum();
                let mut u = rng.gen::<f64>() * total;
                let mut pick = opts[opts.len() - 1].0;
                for &(v, w) in &opts {
                    if u < w {
                        pick = v;
                        break;
                    }
                    u -= w;
                }
                pick
            };
            nu.push(v);
        }
        nu
    }

    fn pmf(&self, nu: &[i64]) -> f64 {
        let mut p = 1.0;
        let mut prev = None;
        for (j, &v) in nu.iter().enumerate() {
            let mut total = 0.0;
            let mut hit = 0.0;
            for (w, x) in self.options(j, prev) {
                total += x;
                if w == v {
                    hit = x;
                }
            }
            if hit == 0.0 {
                return 0.0;
            }
            p *= hit / total;
            prev = Some(v);
        }
        p
    }

    fn support(&self, cap: usize) -> Result<Vec<Vec<i64>>> {
        let mut out: Vec<Vec<i64>> = vec![Vec::new()];
        for j in 0..self.lo.len() {
            let mut next = Vec::new();
            for prefix in &out {
                for (v, _) in self.options(j, prefix.last().copied()) {
                    let mut p = prefix.clone();
                    p.push(v);
                    next.push(p);
                }
            }
            if next.len() > cap {
                return Err(Error::EnumerationCap(cap));
            }
            out = next;
        }
        Ok(out)
    }
}

fn partition_relation(x: &Partition, rho: SingleSpec, up: bool) -> Relation<'_> {
    let (strip, ratio) = match rho {
        SingleSpec::Trivial => (Strip::Fixed, 1.0),
        SingleSpec::Alpha(a) => (Strip::Horizontal, if up { a } else { 1.0 / a }),
        SingleSpec::Beta(b) => (Strip::Vertical, if up { b } else { 1.0 / b }),
    };
    Relation { reference: x.parts(), strip, above: up, ratio }
}

/// P_{ρ1,ρ2}(λ, μ ⇒ ν) for single-parameter (or trivial) ρ1, ρ2.
#[derive(Clone, Debug)]
pub struct PartitionKernel {
    law: KernelLaw,
}

impl PartitionKernel {
    pub fn new(lam: &Partition, mu: &Partition, rho1: SingleSpec, rho2: SingleSpec, mode: KernelMode) -> Result<Self> {
        for rho in [rho1, rho2] {
            match rho {
                SingleSpec::Alpha(x) | SingleSpec::Beta(x) if !(x > 0.0 && x.is_finite()) => {
                    return Err(Error::InvalidParameter(format!("kernel parameter {x} must be positive")));
                }
                _ => {}
            }
        }
        let (up1, up2) = mode.arrows();
        let r1 = partition_relation(lam, rho1, up1);
        let r2 = partition_relation(mu, rho2, up2);
        Self::from_relations(r1, r2, lam.len().max(mu.len()))
    }

    fn from_relations(r1: Relation<'_>, r2: Relation<'_>, max_len: usize) -> Result<Self> {
        let column = [r1, r2].iter().all(|r| r.strip == Strip::Vertical && r.above);
        let len = if column { max_len } else { max_len + 1 };
        Ok(PartitionKernel { law: KernelLaw::build([r1, r2], len, true, column)? })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, counter: &mut DrawCounter) -> Partition {
        let nu = self.law.sample(rng, counter);
        debug_assert!(nu.windows(2).all(|w| w[0] >= w[1]) && nu.iter().all(|&v| v >= 0));
        Partition::canonical(nu)
    }

    pub fn pmf(&self, nu: &Partition) -> f64 {
        self.law.pmf(nu.parts())
    }

    /// The law of ν on all states except a remainder of mass at most about `tol`.
    pub fn distribution(&self, tol: f64) -> Result<TruncatedMeasure<Partition>> {
        let items = self.law.enumerate(tol, ENUMERATION_CAP)?;
        TruncatedMeasure::from_probs(items.into_iter().map(|(nu, p)| (Partition::canonical(nu), p)).collect())
    }
}

fn check_ratio(name: &str, x: f64) -> Result<()> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::InvalidParameter(format!("{name} = {x} must be finite and nonnegative")));
    }
    Ok(())
}

fn horizontal(x: &Partition, above: bool, ratio: f64) -> Relation<'_> {
    Relation { reference: x.parts(), strip: Strip::Horizontal, above, ratio }
}

fn vertical(x: &Partition, above: bool, ratio: f64) -> Relation<'_> {
    Relation { reference: x.parts(), strip: Strip::Vertical, above, ratio }
}

/// ν ∼ const · s_{ν/λ}(a) s_{ν/μ}(b) with single α's a, b; needs ab < 1.
pub fn up_up_alpha<R: Rng + ?Sized>(lam: &Partition, mu: &Partition, a: f64, b: f64, rng: &mut R) -> Result<Partition> {
    check_ratio("a", a)?;
    check_ratio("b", b)?;
    if a * b >= 1.0 {
        return Err(Error::Divergent(format!("ab = {} ≥ 1", a * b)));
    }
    let k = PartitionKernel::from_relations(horizontal(lam, true, a), horizontal(mu, true, b), lam.len().max(mu.len()))?;
    Ok(k.sample(rng, &mut DrawCounter::new()))
}

/// ν ∼ const · s_{λ/ν}(a) s_{ν/μ}(b): coordinates G^{b/a} on finite windows.
pub fn down_up_alpha<R: Rng + ?Sized>(lam: &Partition, mu: &Partition, a: f64, b: f64, rng: &mut R) -> Result<Partition> {
    check_ratio("b", b)?;
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidParameter(format!("a = {a} must be positive")));
    }
    let k =
        PartitionKernel::from_relations(horizontal(lam, false, 1.0 / a), horizontal(mu, true, b), lam.len().max(mu.len()))?;
    Ok(k.sample(rng, &mut DrawCounter::new()))
}

/// ν ∼ const · s_{ν/λ}(β = c) s_{ν/μ}(α = b): Bernoulli coordinates with odds bc.
pub fn up_up_beta_alpha<R: Rng + ?Sized>(lam: &Partition, mu: &Partition, c: f64, b: f64, rng: &mut R) -> Result<Partition> {
    check_ratio("c", c)?;
    check_ratio("b", b)?;
    let k = PartitionKernel::from_relations(vertical(lam, true, c), horizontal(mu, true, b), lam.len().max(mu.len()))?;
    Ok(k.sample(rng, &mut DrawCounter::new()))
}

/// ν ∼ const · s_{λ/ν}(β = c) s_{ν/μ}(α = b): Bernoulli coordinates with odds b/c.
pub fn down_up_beta_alpha<R: Rng + ?Sized>(lam: &Partition, mu: &Partition, c: f64, b: f64, rng: &mut R) -> Result<Partition> {
    check_ratio("b", b)?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("c = {c} must be positive")));
    }
    let k =
        PartitionKernel::from_relations(vertical(lam, false, 1.0 / c), horizontal(mu, true, b), lam.len().max(mu.len()))?;
    Ok(k.sample(rng, &mut DrawCounter::new()))
}

/// The kernel law by brute force: all ν weighted by the product of skew
/// Schur evaluations. The ↑↑ normalization is H(ρ1; ρ2) Σ_κ s_{λ/κ}(ρ2)
/// s_{μ/κ}(ρ1) and the enumeration stops once the missing mass is below `tol`.
pub fn generic_kernel(
    lam: &Partition,
    mu: &Partition,
    rho1: &Specialization,
    rho2: &Specialization,
    mode: KernelMode,
    tol: f64,
) -> Result<TruncatedMeasure<Partition>> {
    let meet = Partition::canonical((0..lam.len().min(mu.len())).map(|i| lam.part(i).min(mu.part(i))).collect());
    let weigh = |nu: &Partition| -> f64 {
        let (a, b) = match mode {
            KernelMode::UpUp => (skew_schur(nu, lam, rho1), skew_schur(nu, mu, rho2)),
            KernelMode::DownUp => (skew_schur(lam, nu, rho1), skew_schur(nu, mu, rho2)),
            KernelMode::UpDown => (skew_schur(nu, lam, rho1), skew_schur(mu, nu, rho2)),
            KernelMode::DownDown => (skew_schur(lam, nu, rho1), skew_schur(mu, nu, rho2)),
        };
        a * b
    };
    let candidates = match mode {
        KernelMode::UpUp => {
            let z = pairing_h(rho1, rho2)?
                * partitions_between(&Partition::empty(), &meet)
                    .iter()
                    .map(|k| skew_schur(lam, k, rho2) * skew_schur(mu, k, rho1))
                    .sum::<f64>();
            if z == 0.0 {
                return Err(Error::EmptySupport(format!("↑↑ from ({lam}, {mu})")));
            }
            let join =
                Partition::canonical((0..lam.len().max(mu.len())).map(|i| lam.part(i).max(mu.part(i))).collect());
            let mut items = Vec::new();
            let mut mass = 0.0;
            const MAX_EXTRA: i64 = 60;
            for size in join.size()..=join.size() + MAX_EXTRA {
                for nu in partitions_containing_of_size(&join, size) {
                    let w = weigh(&nu);
                    if w > 0.0 {
                        mass += w / z;
                        items.push((nu, w / z));
                    }
                }
                if 1.0 - mass < tol {
                    return TruncatedMeasure::from_probs(items);
                }
                if items.len() > ENUMERATION_CAP {
                    return Err(Error::EnumerationCap(ENUMERATION_CAP));
                }
            }
            return Err(Error::TailUnreachable { tol, cap: MAX_EXTRA as usize });
        }
        KernelMode::DownUp => partitions_between(&Partition::empty(), lam),
        KernelMode::UpDown => partitions_between(&Partition::empty(), mu),
        KernelMode::DownDown => partitions_between(&Partition::empty(), &meet),
    };
    let items: Vec<(Partition, f64)> =
        candidates.into_iter().map(|nu| (nu.clone(), weigh(&nu))).filter(|(_, w)| *w > 0.0).collect();
    TruncatedMeasure::from_weights(items)
}

/// The relation of ν to x under s_{ν/x}(M) for single-parameter M.
fn signature_relation(x: &Signature, m: SingleEdrei) -> Result<Relation<'_>> {
    let (strip, above, ratio) = match m {
        SingleEdrei::Trivial => (Strip::Fixed, true, 1.0),
        SingleEdrei::AlphaPlus(a) => (Strip::Horizontal, true, a / (1.0 + a)),
        SingleEdrei::AlphaMinus(a) => (Strip::Horizontal, false, (1.0 + a) / a),
        SingleEdrei::BetaPlus(b) | SingleEdrei::BetaMinus(b) if b >= 1.0 => {
            return Err(Error::InvalidParameter("β = 1 has undefined odds".into()));
        }
        SingleEdrei::BetaPlus(b) => (Strip::Vertical, true, b / (1.0 - b)),
        SingleEdrei::BetaMinus(b) => (Strip::Vertical, false, (1.0 - b) / b),
    };
    if let SingleEdrei::AlphaPlus(v) | SingleEdrei::AlphaMinus(v) | SingleEdrei::BetaPlus(v) | SingleEdrei::BetaMinus(v) = m
    {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!("parameter {v} must be positive")));
        }
    }
    Ok(Relation { reference: x.parts(), strip, above, ratio })
}

/// P_{a,Q}(λ, μ ‖ ν) and P_{M,Q}(λ, μ ‖ ν) on signatures of length n.
#[derive(Clone, Debug)]
pub struct SignatureKernel {
    law: KernelLaw,
}

impl SignatureKernel {
    /// ν ∼ const · s_{ν/λ}(a) s_{ν/μ}(Q) with λ of length n−1 and μ of length n.
    pub fn branch(lam: &Signature, mu: &Signature, a: f64, q: SingleEdrei) -> Result<Self> {
        if lam.len() + 1 != mu.len() {
            return Err(Error::LengthMismatch { expected: lam.len() + 1, got: mu.len() });
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter(format!("a = {a} must be positive")));
        }
        let r1 = Relation { reference: lam.parts(), strip: Strip::Horizontal, above: true, ratio: a };
        let r2 = signature_relation(mu, q)?;
        Ok(SignatureKernel { law: KernelLaw::build([r1, r2], mu.len(), false, false)? })
    }

    /// ν ∼ const · s_{ν/λ}(M) s_{ν/μ}(Q) with λ, μ of equal length.
    pub fn pair(lam: &Signature, mu: &Signature, m: SingleEdrei, q: SingleEdrei) -> Result<Self> {
        if lam.len() != mu.len() {
            return Err(Error::LengthMismatch { expected: lam.len(), got: mu.len() });
        }
        let r1 = signature_relation(lam, m)?;
        let r2 = signature_relation(mu, q)?;
        Ok(SignatureKernel { law: KernelLaw::build([r1, r2], mu.len(), false, false)? })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, counter: &mut DrawCounter) -> Signature {
        let nu = self.law.sample(rng, counter);
        debug_assert!(nu.windows(2).all(|w| w[0] >= w[1]));
        Signature::from_vec_unchecked(nu)
    }

    pub fn pmf(&self, nu: &Signature) -> f64 {
        if nu.len() != self.law.len() {
            return 0.0;
        }
        self.law.pmf(nu.parts())
    }

    pub fn distribution(&self, tol: f64) -> Result<TruncatedMeasure<Signature>> {
        let items = self.law.enumerate(tol, ENUMERATION_CAP)?;
        TruncatedMeasure::from_probs(items.into_iter().map(|(nu, p)| (Signature::from_vec_unchecked(nu), p)).collect())
    }
}

/// One draw of P_{a,Q}(λ, μ ‖ ·) for single-parameter Q.
pub fn sig_kernel_a_q<R: Rng + ?Sized>(
    lam: &Signature,
    mu: &Signature,
    q: &crate::specializations::EdreiSpec,
    a: f64,
    rng: &mut R,
) -> Result<Signature> {
    let k = SignatureKernel::branch(lam, mu, a, q.single()?)?;
    Ok(k.sample(rng, &mut DrawCounter::new()))
}

/// One draw of P_{M,Q}(λ, μ ‖ ·) for single-parameter M and Q.
pub fn sig_kernel_m_q<R: Rng + ?Sized>(
    lam: &Signature,
    mu: &Signature,
    m: &crate::specializations::EdreiSpec,
    q: &crate::specializations::EdreiSpec,
    rng: &mut R,
) -> Result<Signature> {
    let k = SignatureKernel::pair(lam, mu, m.single()?, q.single()?)?;
    Ok(k.sample(rng, &mut DrawCounter::new()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specializations::EdreiSpec;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(v: &[i64]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    fn s(v: &[i64]) -> Signature {
        Signature::new(v.to_vec()).unwrap()
    }

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(11)
    }

    #[test]
    fn geometric_pmf_examples() {
        let g = TruncGeom::new(0.5, 0, Some(2)).unwrap();
        for (k, v) in [(0, 4.0 / 7.0), (1, 2.0 / 7.0), (2, 1.0 / 7.0)] {
            assert_abs_diff_eq!(g.pmf(k), v, epsilon = 1e-15);
        }
        let inf = TruncGeom::new(0.5, 3, None).unwrap();
        assert_abs_diff_eq!(inf.pmf(3), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(inf.pmf(5), 0.125, epsilon = 1e-15);
        assert_eq!(inf.pmf(2), 0.0);
        let point = TruncGeom::new(0.7, 4, Some(4)).unwrap();
        assert_eq!(point.pmf(4), 1.0);
        assert_eq!(point.sample(&mut rng()), 4);
        assert!(TruncGeom::new(1.0, 0, None).is_err());
        assert!(TruncGeom::new(0.5, 2, Some(1)).is_err());
        let up = TruncGeom::new(3.0, -2, Some(4)).unwrap();
        let total: f64 = (-2..=4).map(|k| up.pmf(k)).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(up.pmf(4) / up.pmf(3), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn geometric_sampling_frequencies() {
        let mut r = rng();
        for g in [TruncGeom::new(0.5, 0, Some(2)).unwrap(), TruncGeom::new(2.5, 1, Some(3)).unwrap(), TruncGeom::new(0.4, -1, None).unwrap()] {
            let n = 200_000;
            let mut counts = std::collections::HashMap::new();
            for _ in 0..n {
                let k = g.sample(&mut r);
                assert!(k >= g.m && g.n.is_none_or(|hi| k <= hi));
                *counts.entry(k).or_insert(0usize) += 1;
            }
            for (k, c) in counts {
                let f = c as f64 / n as f64;
                assert!((f - g.pmf(k)).abs() < 5e-3, "k = {k}: {f} vs {}", g.pmf(k));
            }
        }
    }

    #[test]
    fn bernoulli_examples() {
        let b = TruncBern::new(3.0, 2, 3).unwrap();
        assert_abs_diff_eq!(b.pmf(3), 0.75, epsilon = 1e-15);
        let fixed = TruncBern::new(3.0, 2, 2).unwrap();
        assert_eq!(bern_sample(&fixed, &mut rng()), 2);
        assert!(TruncBern::new(1.0, 0, 2).is_err());
        let fair = TruncBern::new(1.0, 0, 1).unwrap();
        assert_eq!(fair.pmf(0), 0.5);
    }

    fn kernel(lam: &[i64], mu: &[i64], r1: SingleSpec, r2: SingleSpec, mode: KernelMode) -> PartitionKernel {
        PartitionKernel::new(&p(lam), &p(mu), r1, r2, mode).unwrap()
    }

    #[test]
    fn up_up_alpha_example() {
        let k = kernel(&[1], &[], SingleSpec::Alpha(0.5), SingleSpec::Alpha(0.5), KernelMode::UpUp);
        for n in 1..6 {
            assert_abs_diff_eq!(k.pmf(&p(&[n])), 0.75 * 0.25f64.powi(n as i32 - 1), epsilon = 1e-15);
        }
        assert_eq!(k.pmf(&p(&[1, 1])), 0.0);
        assert_eq!(k.pmf(&Partition::empty()), 0.0);
    }

    #[test]
    fn down_up_alpha_example() {
        let k = kernel(&[2], &[], SingleSpec::Alpha(1.0), SingleSpec::Alpha(0.5), KernelMode::DownUp);
        assert_abs_diff_eq!(k.pmf(&Partition::empty()), 4.0 / 7.0, epsilon = 1e-15);
        assert_abs_diff_eq!(k.pmf(&p(&[1])), 2.0 / 7.0, epsilon = 1e-15);
        assert_abs_diff_eq!(k.pmf(&p(&[2])), 1.0 / 7.0, epsilon = 1e-15);
        let forced = kernel(&[1], &[1], SingleSpec::Alpha(1.0), SingleSpec::Alpha(1.0), KernelMode::DownUp);
        assert_eq!(forced.pmf(&p(&[1])), 1.0);
        let nu = down_up_alpha(&p(&[3, 1]), &p(&[1]), 1.0, 0.0, &mut rng()).unwrap();
        assert_eq!(nu, p(&[1]));
    }

    #[test]
    fn beta_alpha_examples() {
        let k = kernel(&[1], &[1], SingleSpec::Beta(1.0), SingleSpec::Alpha(1.0), KernelMode::UpUp);
        for nu in [&[1][..], &[2], &[1, 1], &[2, 1]] {
            assert_eq!(k.pmf(&p(nu)), 0.25);
        }
        let k = kernel(&[1], &[], SingleSpec::Beta(1.0), SingleSpec::Alpha(1.0), KernelMode::DownUp);
        assert_eq!(k.pmf(&Partition::empty()), 0.5);
        assert_eq!(k.pmf(&p(&[1])), 0.5);
        let nu = up_up_beta_alpha(&p(&[2, 1]), &p(&[1, 1]), 0.7, 0.0, &mut rng()).unwrap();
        assert_eq!(nu, p(&[2, 1]));
    }

    #[test]
    fn beta_beta_column_tail() {
        let k = kernel(&[], &[], SingleSpec::Beta(0.5), SingleSpec::Beta(0.4), KernelMode::UpUp);
        for n in 0..6 {
            let col = Partition::canonical(vec![1; n]);
            assert_abs_diff_eq!(k.pmf(&col), 0.8 * 0.2f64.powi(n as i32), epsilon = 1e-15);
        }
        let d = k.distribution(1e-14).unwrap();
        assert!(d.tail_bound < 1e-13);
    }

    #[test]
    fn kernels_match_generic_kernel() {
        let specs = [SingleSpec::Alpha(0.4), SingleSpec::Beta(0.3), SingleSpec::Alpha(1.7), SingleSpec::Beta(0.6)];
        let to_spec = |s: SingleSpec| match s {
            SingleSpec::Alpha(a) => Specialization::alpha(a).unwrap(),
            SingleSpec::Beta(b) => Specialization::beta(b).unwrap(),
            SingleSpec::Trivial => Specialization::trivial(),
        };
        let shapes = [vec![], vec![1], vec![2, 1], vec![2, 2], vec![3, 1, 1], vec![1, 1]];
        let modes = [KernelMode::UpUp, KernelMode::DownUp, KernelMode::UpDown, KernelMode::DownDown];
        let mut checked = 0;
        for &r1 in &specs {
            for &r2 in &specs {
                for mode in modes {
                    let (x1, x2) = (to_spec(r1), to_spec(r2));
                    let param = |r: SingleSpec| match r {
                        SingleSpec::Alpha(x) | SingleSpec::Beta(x) => x,
                        SingleSpec::Trivial => 0.0,
                    };
                    // brute-force ↑↑ enumeration is only affordable for fast decay
                    if mode == KernelMode::UpUp && param(r1) * param(r2) > 0.25 {
                        continue;
                    }
                    for lam in &shapes {
                        for mu in &shapes {
                            let (lam, mu) = (p(lam), p(mu));
                            let oracle = generic_kernel(&lam, &mu, &x1, &x2, mode, 1e-12);
                            let fast = PartitionKernel::new(&lam, &mu, r1, r2, mode);
                            match (oracle, fast) {
                                (Ok(o), Ok(f)) => {
                                    let d = f.distribution(1e-13).unwrap();
                                    let tv = o.tv_bound(&d);
                                    assert!(tv < 1e-10, "{r1:?} {r2:?} {mode:?} λ={lam} μ={mu}: tv {tv}");
                                    checked += 1;
                                }
                                (Err(_), Err(_)) => {}
                                // (λ, μ) outside the support of the process: the oracle has no mass
                                (Err(Error::EmptySupport(_)), Ok(_)) => {}
                                (o, f) => panic!("{r1:?} {r2:?} {mode:?} λ={lam} μ={mu}: {o:?} vs {f:?}"),
                            }
                        }
                    }
                }
            }
        }
        assert!(checked > 150, "checked {checked}");
    }

    #[test]
    fn signature_kernel_examples() {
        // n = 1, λ = ∅, μ = (0), Q = α⁻ = 1, a = 1
        let k = SignatureKernel::branch(&Signature::empty(), &s(&[0]), 1.0, SingleEdrei::AlphaMinus(1.0)).unwrap();
        for j in 0..6 {
            assert_abs_diff_eq!(k.pmf(&s(&[-j])), 0.5f64.powi(j as i32 + 1), epsilon = 1e-15);
        }
        assert_eq!(k.pmf(&s(&[1])), 0.0);
        // M = Q = α⁻ = 1, λ = μ = (0)
        let k = SignatureKernel::pair(&s(&[0]), &s(&[0]), SingleEdrei::AlphaMinus(1.0), SingleEdrei::AlphaMinus(1.0)).unwrap();
        for j in 0..6 {
            assert_abs_diff_eq!(k.pmf(&s(&[-j])), 0.75 * 0.25f64.powi(j as i32), epsilon = 1e-15);
        }
        // M = β⁺ = 0.5, Q = β⁻ = 0.5, λ = (0), μ = (1)
        let k = SignatureKernel::pair(&s(&[0]), &s(&[1]), SingleEdrei::BetaPlus(0.5), SingleEdrei::BetaMinus(0.5)).unwrap();
        assert_abs_diff_eq!(k.pmf(&s(&[0])), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(k.pmf(&s(&[1])), 0.5, epsilon = 1e-15);
        let k = SignatureKernel::pair(&s(&[2, -1]), &s(&[3, 0]), SingleEdrei::AlphaPlus(0.3), SingleEdrei::Trivial).unwrap();
        assert_eq!(k.pmf(&s(&[3, 0])), 1.0);
        let q = EdreiSpec::new(vec![], vec![], vec![], vec![1.0], 0.0, 0.0).unwrap();
        assert!(sig_kernel_a_q(&s(&[0]), &s(&[1, 0]), &q, 1.0, &mut rng()).is_err());
    }

    #[test]
    fn draw_counter_skips_singletons() {
        let mut c = DrawCounter::new();
        let k = kernel(&[2, 1], &[2, 1], SingleSpec::Trivial, SingleSpec::Alpha(0.5), KernelMode::UpUp);
        assert_eq!(k.sample(&mut rng(), &mut c), p(&[2, 1]));
        assert_eq!(c.nontrivial_draws, 0);
        let k = kernel(&[], &[], SingleSpec::Alpha(0.5), SingleSpec::Alpha(0.5), KernelMode::UpUp);
        k.sample(&mut rng(), &mut c);
        assert_eq!(c.nontrivial_draws, 1);
    }
}
