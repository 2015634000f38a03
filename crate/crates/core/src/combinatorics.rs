//! Partitions, signatures, interlacing, skew plane partitions and
//! Gelfand–Tsetlin patterns.
//!
//! All indexing is 0-based. The only 1-based quantities are *slice labels*
//! of a plane partition (`1..=A+B+1`) and the elements of the up-step set
//! returned by [`PlanePartitionShape::up_steps`], which are slice labels.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// A weakly decreasing sequence of nonnegative integers with finite support.
///
/// Stored without trailing zeros, so the derived equality and hashing agree
/// with equality of the underlying infinite sequences.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Partition(Vec<i64>);

impl Partition {
    pub fn new(parts: Vec<i64>) -> Result<Self> {
        if parts.iter().any(|&p| p < 0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(parts));
        }
        Ok(Self::canonical(parts))
    }

    /// Builds a partition from parts already known to be valid.
    pub(crate) fn canonical(mut parts: Vec<i64>) -> Self {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        debug_assert!(parts.windows(2).all(|w| w[0] >= w[1]));
        Partition(parts)
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of nonzero parts, ℓ(λ).
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Part `i` (0-based), zero beyond the length.
    pub fn part(&self, i: usize) -> i64 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn parts(&self) -> &[i64] {
        &self.0
    }

    /// |λ| = Σ λ_i.
    pub fn size(&self) -> i64 {
        self.0
            .iter()
            .try_fold(0i64, |acc, &p| acc.checked_add(p))
            .expect("partition size overflows i64")
    }

    /// μ ⊆ λ as Young diagrams.
    pub fn contains(&self, mu: &Partition) -> bool {
        mu.len() <= self.len() && (0..mu.len()).all(|i| mu.part(i) <= self.part(i))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "∅");
        }
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// A weakly decreasing integer vector of fixed length; entries may be negative.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Signature(Vec<i64>);

impl Signature {
    pub fn new(parts: Vec<i64>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidSignature(parts));
        }
        Ok(Signature(parts))
    }

    pub(crate) fn from_vec_unchecked(parts: Vec<i64>) -> Self {
        debug_assert!(parts.windows(2).all(|w| w[0] >= w[1]));
        Signature(parts)
    }

    /// The unique signature of length zero.
    pub fn empty() -> Self {
        Signature(Vec::new())
    }

    pub fn zeros(n: usize) -> Self {
        Signature(vec![0; n])
    }

    /// Pads a partition with zeros to length `n`.
    pub fn from_partition(p: &Partition, n: usize) -> Result<Self> {
        if p.len() > n {
            return Err(Error::LengthMismatch { expected: n, got: p.len() });
        }
        let mut v = p.parts().to_vec();
        v.resize(n, 0);
        Ok(Signature(v))
    }

    /// The partition underlying a nonnegative signature.
    pub fn to_partition(&self) -> Option<Partition> {
        if self.0.iter().any(|&x| x < 0) {
            return None;
        }
        Some(Partition::canonical(self.0.clone()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn parts(&self) -> &[i64] {
        &self.0
    }

    pub fn part(&self, i: usize) -> i64 {
        self.0[i]
    }

    pub fn size(&self) -> i64 {
        self.0
            .iter()
            .try_fold(0i64, |acc, &p| acc.checked_add(p))
            .expect("signature size overflows i64")
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// μ ≺ ν: ν_1 ≥ μ_1 ≥ ν_2 ≥ μ_2 ≥ … with implicit zeros.
pub fn interlaces(mu: &Partition, nu: &Partition) -> bool {
    let n = mu.len().max(nu.len());
    (0..n).all(|i| nu.part(i) >= mu.part(i) && mu.part(i) >= nu.part(i + 1))
}

/// λ ≺ ν for signatures of lengths n and n+1: ν_1 ≥ λ_1 ≥ ν_2 ≥ … ≥ λ_n ≥ ν_{n+1}.
pub fn signature_interlaces(lam: &Signature, nu: &Signature) -> Result<bool> {
    if nu.len() != lam.len() + 1 {
        return Err(Error::LengthMismatch { expected: lam.len() + 1, got: nu.len() });
    }
    Ok((0..lam.len()).all(|i| nu.part(i) >= lam.part(i) && lam.part(i) >= nu.part(i + 1)))
}

/// Interlacing of two signatures of the same length n:
/// upper_1 ≥ lower_1 ≥ upper_2 ≥ lower_2 ≥ … ≥ upper_n ≥ lower_n.
pub fn equal_length_interlaces(lower: &Signature, upper: &Signature) -> bool {
    let n = lower.len();
    upper.len() == n
        && (0..n).all(|i| {
            upper.part(i) >= lower.part(i) && (i + 1 == n || lower.part(i) >= upper.part(i + 1))
        })
}

/// Shape data of a skew plane partition: the back wall π inside the A×B box.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PlanePartitionShape {
    pub a: usize,
    pub b: usize,
    pub pi: Partition,
}

impl PlanePartitionShape {
    pub fn new(a: usize, b: usize, pi: Partition) -> Result<Self> {
        if a == 0 || b == 0 {
            return Err(Error::InvalidShape(format!("box {a}x{b} must be nonempty")));
        }
        if pi.len() > a || pi.part(0) > b as i64 {
            return Err(Error::InvalidShape(format!("π = {pi} does not fit in a {a}x{b} box")));
        }
        Ok(Self { a, b, pi })
    }

    /// The full box, π = ∅.
    pub fn full_box(a: usize, b: usize) -> Result<Self> {
        Self::new(a, b, Partition::empty())
    }

    /// Number of slices A+B+1.
    pub fn num_slices(&self) -> usize {
        self.a + self.b + 1
    }

    /// The up-step set 𝓛(π) = {A + π_i − i + 1 : i = 1..A} as 1-based slice labels.
    pub fn up_steps(&self) -> BTreeSet<usize> {
        (0..self.a)
            .map(|i| {
                // 1-based row r = i + 1: A + π_r − r + 1 = A + π_i − i
                (self.a as i64 + self.pi.part(i) - i as i64) as usize
            })
            .collect()
    }

    /// Whether box (i, j) (0-based) belongs to π̄ = B^A / π.
    pub fn in_support(&self, i: usize, j: usize) -> bool {
        i < self.a && j < self.b && (j as i64) >= self.pi.part(i)
    }

    /// Number of boxes in π̄.
    pub fn support_size(&self) -> usize {
        (0..self.a).map(|i| self.b - self.pi.part(i) as usize).sum()
    }

    /// Boxes of π̄ on the diagonal of slice label `k` (1-based), in increasing row order.
    ///
    /// Slice k holds boxes (i, i + k − A − 1) in 1-based coordinates, i.e.
    /// column − row = k − A − 1.
    pub fn diagonal_cells(&self, k: usize) -> Vec<(usize, usize)> {
        let offset = k as i64 - self.a as i64 - 1;
        (0..self.a)
            .filter_map(|i| {
                let j = i as i64 + offset;
                (j >= 0 && self.in_support(i, j as usize)).then_some((i, j as usize))
            })
            .collect()
    }
}

/// A monotone filling of π̄ by nonnegative integers.
///
/// `entries[i]` holds row i restricted to π̄, i.e. columns π_i..B (0-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PlanePartition {
    shape: PlanePartitionShape,
    entries: Vec<Vec<i64>>,
}

impl PlanePartition {
    pub fn new(shape: PlanePartitionShape, entries: Vec<Vec<i64>>) -> Result<Self> {
        if entries.len() != shape.a {
            return Err(Error::InvalidPlanePartition(format!(
                "expected {} rows, got {}",
                shape.a,
                entries.len()
            )));
        }
        for (i, row) in entries.iter().enumerate() {
            let expected = shape.b - shape.pi.part(i) as usize;
            if row.len() != expected {
                return Err(Error::InvalidPlanePartition(format!(
                    "row {i} has {} entries, expected {expected}",
                    row.len()
                )));
            }
        }
        let pp = PlanePartition { shape, entries };
        pp.check_monotone()?;
        Ok(pp)
    }

    pub fn zero(shape: PlanePartitionShape) -> Self {
        let entries = (0..shape.a)
            .map(|i| vec![0; shape.b - shape.pi.part(i) as usize])
            .collect();
        PlanePartition { shape, entries }
    }

    fn check_monotone(&self) -> Result<()> {
        let s = &self.shape;
        for i in 0..s.a {
            for j in 0..s.b {
                let Some(v) = self.get(i, j) else { continue };
                if v < 0 {
                    return Err(Error::InvalidPlanePartition(format!("negative entry at ({i},{j})")));
                }
                if let Some(right) = self.get(i, j + 1) {
                    if right > v {
                        return Err(Error::InvalidPlanePartition(format!(
                            "row monotonicity fails at ({i},{j})"
                        )));
                    }
                }
                if let Some(down) = self.get(i + 1, j) {
                    if down > v {
                        return Err(Error::InvalidPlanePartition(format!(
                            "column monotonicity fails at ({i},{j})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn shape(&self) -> &PlanePartitionShape {
        &self.shape
    }

    pub fn entries(&self) -> &[Vec<i64>] {
        &self.entries
    }

    /// Π_{i,j} for (i, j) ∈ π̄ (0-based), `None` outside the support.
    pub fn get(&self, i: usize, j: usize) -> Option<i64> {
        if !self.shape.in_support(i, j) {
            return None;
        }
        let offset = self.shape.pi.part(i) as usize;
        Some(self.entries[i][j - offset])
    }

    /// Heights on the full box with cells of π reported as `None`.
    pub fn height_grid(&self) -> Vec<Vec<Option<i64>>> {
        (0..self.shape.a)
            .map(|i| (0..self.shape.b).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn volume(&self) -> i64 {
        self.entries
            .iter()
            .flatten()
            .try_fold(0i64, |acc, &v| acc.checked_add(v))
            .expect("volume overflows i64")
    }

    /// The diagonal slices λ^{(1)}, …, λ^{(A+B+1)}; index k−1 holds λ^{(k)}.
    pub fn diagonal_slices(&self) -> Vec<Partition> {
        (1..=self.shape.num_slices())
            .map(|k| {
                let parts = self
                    .shape
                    .diagonal_cells(k)
                    .into_iter()
                    .map(|(i, j)| self.get(i, j).expect("cell in support"))
                    .collect();
                // monotone along diagonals, so already weakly decreasing
                Partition::canonical(parts)
            })
            .collect()
    }

    /// Inverse of [`diagonal_slices`](Self::diagonal_slices).
    pub fn from_slices(slices: &[Partition], shape: PlanePartitionShape) -> Result<Self> {
        let n = shape.num_slices();
        if slices.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: slices.len() });
        }
        if !slices[0].is_empty() || !slices[n - 1].is_empty() {
            return Err(Error::InvalidPlanePartition("boundary slices must be empty".into()));
        }
        let ups = shape.up_steps();
        for k in 1..n {
            let (left, right) = (&slices[k - 1], &slices[k]);
            let ok = if ups.contains(&k) { interlaces(left, right) } else { interlaces(right, left) };
            if !ok {
                return Err(Error::InterlacingViolation { left: k, right: k + 1 });
            }
        }
        let mut pp = PlanePartition::zero(shape);
        for (idx, slice) in slices.iter().enumerate() {
            let cells = pp.shape.diagonal_cells(idx + 1);
            if slice.len() > cells.len() {
                return Err(Error::InvalidPlanePartition(format!(
                    "slice {} has {} parts but its diagonal holds {}",
                    idx + 1,
                    slice.len(),
                    cells.len()
                )));
            }
            for (pos, (i, j)) in cells.into_iter().enumerate() {
                let offset = pp.shape.pi.part(i) as usize;
                pp.entries[i][j - offset] = slice.part(pos);
            }
        }
        pp.check_monotone()?;
        Ok(pp)
    }
}

/// An interlacing chain t_1 ≺ t_2 ≺ … ≺ t_N with t_k of length k.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GTPattern {
    levels: Vec<Signature>,
}

impl GTPattern {
    pub fn new(levels: Vec<Signature>) -> Result<Self> {
        for (k, level) in levels.iter().enumerate() {
            if level.len() != k + 1 {
                return Err(Error::LengthMismatch { expected: k + 1, got: level.len() });
            }
        }
        for k in 1..levels.len() {
            if !signature_interlaces(&levels[k - 1], &levels[k])? {
                return Err(Error::InterlacingViolation { left: k, right: k + 1 });
            }
        }
        Ok(GTPattern { levels })
    }

    pub fn levels(&self) -> &[Signature] {
        &self.levels
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn top(&self) -> Option<&Signature> {
        self.levels.last()
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Number of Gelfand–Tsetlin patterns with top row `lam`, by the Weyl
/// dimension formula ∏_{i<j} (λ_i − i − λ_j + j)/(j − i).
///
/// Panics if the exact value does not fit in 128 bits.
pub fn count_gt_patterns(lam: &Signature) -> u128 {
    let n = lam.len();
    let (mut num, mut den) = (1u128, 1u128);
    for i in 0..n {
        for j in i + 1..n {
            let top = (lam.part(i) - lam.part(j) + (j - i) as i64) as u128;
            let bottom = (j - i) as u128;
            let g = gcd(top, den);
            let (top, d) = (top / g, den / g);
            let g = gcd(num, bottom);
            num = (num / g).checked_mul(top).expect("pattern count overflows u128");
            den = d.checked_mul(bottom / g).expect("pattern count overflows u128");
        }
    }
    debug_assert_eq!(num % den, 0);
    num / den
}

/// All partitions with at most `max_len` parts, each at most `max_part`.
pub fn partitions_in_box(max_len: usize, max_part: i64) -> Vec<Partition> {
    fn rec(prefix: &mut Vec<i64>, max_len: usize, bound: i64, out: &mut Vec<Partition>) {
        out.push(Partition::canonical(prefix.clone()));
        if prefix.len() == max_len {
            return;
        }
        for v in 1..=bound {
            prefix.push(v);
            rec(prefix, max_len, v, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), max_len, max_part, &mut out);
    out
}

/// All partitions with |λ| ≤ `max_size`.
pub fn partitions_up_to_size(max_size: i64) -> Vec<Partition> {
    fn rec(prefix: &mut Vec<i64>, remaining: i64, bound: i64, out: &mut Vec<Partition>) {
        out.push(Partition::canonical(prefix.clone()));
        for v in 1..=bound.min(remaining) {
            prefix.push(v);
            rec(prefix, remaining - v, v, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), max_size, max_size, &mut out);
    out
}

/// All ν with μ ⊆ ν ⊆ λ.
pub fn partitions_between(mu: &Partition, lam: &Partition) -> Vec<Partition> {
    fn rec(i: usize, prefix: &mut Vec<i64>, mu: &Partition, lam: &Partition, out: &mut Vec<Partition>) {
        if i == lam.len() {
            out.push(Partition::canonical(prefix.clone()));
            return;
        }
        let hi = if i == 0 { lam.part(0) } else { lam.part(i).min(prefix[i - 1]) };
        for v in mu.part(i)..=hi {
            prefix.push(v);
            rec(i + 1, prefix, mu, lam, out);
            prefix.pop();
        }
    }
    if !lam.contains(mu) {
        return Vec::new();
    }
    let mut out = Vec::new();
    rec(0, &mut Vec::new(), mu, lam, &mut out);
    out
}

/// All ν ⊇ μ with |ν| = `size`.
pub fn partitions_containing_of_size(mu: &Partition, size: i64) -> Vec<Partition> {
    fn rec(i: usize, prefix: &mut Vec<i64>, remaining: i64, bound: i64, mu: &Partition, out: &mut Vec<Partition>) {
        // the rows still to come need at least the rest of μ
        let need: i64 = (i..mu.len()).map(|k| mu.part(k)).sum();
        if remaining < need {
            return;
        }
        if remaining == 0 {
            out.push(Partition::canonical(prefix.clone()));
            return;
        }
        let lo = mu.part(i).max(1);
        for v in lo..=bound.min(remaining) {
            prefix.push(v);
            rec(i + 1, prefix, remaining - v, v, mu, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if size >= mu.size() {
        rec(0, &mut Vec::new(), size, size, mu, &mut out);
    }
    out
}

/// All signatures of length n with entries in [lo, hi].
pub fn signatures_in_range(n: usize, lo: i64, hi: i64) -> Vec<Signature> {
    fn rec(n: usize, lo: i64, bound: i64, prefix: &mut Vec<i64>, out: &mut Vec<Signature>) {
        if prefix.len() == n {
            out.push(Signature(prefix.clone()));
            return;
        }
        for v in lo..=bound {
            prefix.push(v);
            rec(n, lo, v, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if lo <= hi || n == 0 {
        rec(n, lo, hi, &mut Vec::new(), &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[i64]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    fn s(v: &[i64]) -> Signature {
        Signature::new(v.to_vec()).unwrap()
    }

    #[test]
    fn partition_canonical_form() {
        assert_eq!(p(&[3, 1, 0, 0]), p(&[3, 1]));
        assert_eq!(p(&[0, 0]), Partition::empty());
        assert!(Partition::new(vec![1, 2]).is_err());
        assert!(Partition::new(vec![1, -1]).is_err());
    }

    #[test]
    fn interlacing_examples() {
        assert!(interlaces(&p(&[5, 1]), &p(&[10, 2])));
        assert!(interlaces(&Partition::empty(), &Partition::empty()));
        assert!(!interlaces(&p(&[3]), &p(&[2])));
        assert!(!interlaces(&p(&[1, 1]), &p(&[2])));
    }

    #[test]
    fn signature_interlacing_examples() {
        assert!(signature_interlaces(&s(&[3]), &s(&[4, -1])).unwrap());
        assert!(signature_interlaces(&s(&[5, 0, -5]), &s(&[5, 1, -2, -7])).unwrap());
        assert!(Signature::new(vec![1, 2]).is_err());
        assert!(signature_interlaces(&s(&[1]), &s(&[1])).is_err());
    }

    #[test]
    fn up_steps_examples() {
        let shape = PlanePartitionShape::new(4, 3, p(&[2, 1, 1])).unwrap();
        assert_eq!(shape.up_steps().into_iter().collect::<Vec<_>>(), vec![1, 3, 4, 6]);
        let shape = PlanePartitionShape::full_box(1, 1).unwrap();
        assert_eq!(shape.up_steps().into_iter().collect::<Vec<_>>(), vec![1]);
        let shape = PlanePartitionShape::new(2, 2, p(&[2, 2])).unwrap();
        assert_eq!(shape.up_steps().into_iter().collect::<Vec<_>>(), vec![3, 4]);
    }

    #[test]
    fn shape_rejects_oversized_pi() {
        assert!(PlanePartitionShape::new(2, 2, p(&[3])).is_err());
        assert!(PlanePartitionShape::new(1, 2, p(&[1, 1])).is_err());
    }

    #[test]
    fn slices_of_small_plane_partition() {
        let shape = PlanePartitionShape::full_box(2, 2).unwrap();
        let pp = PlanePartition::new(shape.clone(), vec![vec![2, 1], vec![1, 0]]).unwrap();
        let slices = pp.diagonal_slices();
        assert_eq!(slices, vec![Partition::empty(), p(&[1]), p(&[2]), p(&[1]), Partition::empty()]);
        assert_eq!(pp.volume(), 4);
        assert_eq!(PlanePartition::from_slices(&slices, shape).unwrap(), pp);
    }

    #[test]
    fn single_cell_and_zero_fillings() {
        let shape = PlanePartitionShape::full_box(1, 1).unwrap();
        let pp = PlanePartition::new(shape.clone(), vec![vec![3]]).unwrap();
        assert_eq!(pp.diagonal_slices(), vec![Partition::empty(), p(&[3]), Partition::empty()]);
        let zero = PlanePartition::zero(PlanePartitionShape::new(3, 4, p(&[2, 1])).unwrap());
        assert!(zero.diagonal_slices().iter().all(Partition::is_empty));
        assert_eq!(zero.volume(), 0);
        let empty_slices = vec![Partition::empty(); 8];
        let back = PlanePartition::from_slices(&empty_slices, zero.shape().clone()).unwrap();
        assert_eq!(back, zero);
    }

    #[test]
    fn from_slices_rejects_bad_interlacing() {
        let shape = PlanePartitionShape::full_box(2, 2).unwrap();
        let slices = vec![Partition::empty(), p(&[1]), p(&[3]), p(&[5]), Partition::empty()];
        assert!(matches!(
            PlanePartition::from_slices(&slices, shape.clone()),
            Err(Error::InterlacingViolation { .. })
        ));
        let too_long = vec![Partition::empty(), p(&[1, 1]), p(&[2, 1]), p(&[1]), Partition::empty()];
        assert!(PlanePartition::from_slices(&too_long, shape).is_err());
    }

    #[test]
    fn figure_back_wall_slices_have_volume_39() {
        let shape = PlanePartitionShape::new(4, 3, p(&[2, 1, 1])).unwrap();
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
        let pp = PlanePartition::from_slices(&slices, shape).unwrap();
        assert_eq!(pp.volume(), 39);
        assert_eq!(pp.diagonal_slices(), slices);
    }

    #[test]
    fn plane_partition_monotonicity_enforced() {
        let shape = PlanePartitionShape::full_box(2, 2).unwrap();
        assert!(PlanePartition::new(shape.clone(), vec![vec![1, 2], vec![0, 0]]).is_err());
        assert!(PlanePartition::new(shape, vec![vec![1, 1], vec![2, 0]]).is_err());
    }

    fn brute_gt_count(top: &Signature) -> u128 {
        if top.len() <= 1 {
            return 1;
        }
        let n = top.len();
        let below = signatures_in_range(n - 1, top.part(n - 1), top.part(0));
        below
            .iter()
            .filter(|lam| signature_interlaces(lam, top).unwrap())
            .map(brute_gt_count)
            .sum()
    }

    #[test]
    fn gt_counts_small_cases() {
        assert_eq!(count_gt_patterns(&s(&[1, 0])), 2);
        assert_eq!(count_gt_patterns(&s(&[7])), 1);
        assert_eq!(count_gt_patterns(&Signature::empty()), 1);
        let top = s(&[5, 1, -2, -7]);
        assert_eq!(count_gt_patterns(&top), brute_gt_count(&top));
    }

    #[test]
    fn gt_counts_match_enumeration_exhaustively() {
        for n in 1..=4 {
            for top in signatures_in_range(n, -4, 4) {
                assert_eq!(count_gt_patterns(&top), brute_gt_count(&top), "top = {top}");
            }
        }
    }

    #[test]
    fn gt_pattern_validation() {
        let levels = vec![s(&[3]), s(&[4, -1]), s(&[5, 0, -5]), s(&[5, 1, -2, -7])];
        let pat = GTPattern::new(levels).unwrap();
        assert_eq!(pat.depth(), 4);
        assert!(GTPattern::new(vec![s(&[3]), s(&[2, 1])]).is_err());
    }

    #[test]
    fn enumeration_helpers() {
        assert_eq!(partitions_in_box(2, 2).len(), 6);
        assert_eq!(partitions_up_to_size(4).len(), 1 + 1 + 2 + 3 + 5);
        assert_eq!(partitions_between(&p(&[1]), &p(&[2, 1])).len(), 4);
        assert_eq!(signatures_in_range(2, -1, 1).len(), 6);
    }
}
