//! The dynamical systems: full-branch expanding circle maps `x -> b x mod 1` and
//! unimodular integer automorphisms of the 2-torus.
//!
//! Orbits are simulated without rounding. Expanding maps act on a lazily
//! generated base-`b` digit expansion (one step drops the leading digit);
//! toral automorphisms act on the lattice `(Z / 2^64)^2`, where an integer
//! matrix with determinant `±1` is a bijection.

use std::cmp::Ordering;
use std::collections::VecDeque;

use num_bigint::BigInt;
use num_traits::{One, Pow, ToPrimitive, Zero};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{IntervalSet, Rational};

/// Default cap on the number of interval pieces a preimage computation may create.
pub const DEFAULT_PREIMAGE_BUDGET: u128 = 2_000_000;

/// A dynamical system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapSpec {
    /// `x -> b x mod 1` on the circle, preserving Lebesgue measure.
    ExpandingBase(u32),
    /// The automorphism of `T^2` induced by an integer matrix with `|det| = 1`.
    ToralAuto([[i64; 2]; 2]),
}

impl MapSpec {
    pub fn expanding(base: u32) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidMap(format!("expanding base must be >= 2, got {base}")));
        }
        Ok(MapSpec::ExpandingBase(base))
    }

    pub fn toral(matrix: [[i64; 2]; 2]) -> Result<Self> {
        let [[a, b], [c, d]] = matrix;
        let det = a * d - b * c;
        let tr = a + d;
        if det.abs() != 1 {
            return Err(Error::InvalidMap(format!("|det| must be 1, got det = {det}")));
        }
        // hyperbolic: no eigenvalue on the unit circle
        let hyperbolic = if det == 1 { tr * tr > 4 } else { tr != 0 };
        if !hyperbolic {
            return Err(Error::InvalidMap(format!("matrix {matrix:?} is not hyperbolic")));
        }
        Ok(MapSpec::ToralAuto(matrix))
    }

    pub fn doubling() -> Self {
        MapSpec::ExpandingBase(2)
    }

    pub fn tripling() -> Self {
        MapSpec::ExpandingBase(3)
    }

    /// The automorphism induced by `((2, 1), (1, 1))`.
    pub fn cat() -> Self {
        MapSpec::ToralAuto([[2, 1], [1, 1]])
    }

    pub fn name(&self) -> &'static str {
        match self {
            MapSpec::ExpandingBase(_) => "expanding circle map",
            MapSpec::ToralAuto(_) => "toral automorphism",
        }
    }

    pub fn base(&self) -> Option<u32> {
        match self {
            MapSpec::ExpandingBase(b) => Some(*b),
            MapSpec::ToralAuto(_) => None,
        }
    }

    /// Eigen-data of a toral automorphism.
    pub fn eigen(&self) -> Result<EigenData> {
        match self {
            MapSpec::ToralAuto(m) => Ok(EigenData::of(*m)),
            MapSpec::ExpandingBase(_) => Err(Error::Unsupported("eigen-data of an expanding circle map")),
        }
    }

    /// Exact image of a rational circle point.
    pub fn apply_rational(&self, x: &Rational) -> Result<Rational> {
        match self {
            MapSpec::ExpandingBase(b) => Ok(crate::geometry::frac(&(x * BigInt::from(*b)))),
            MapSpec::ToralAuto(_) => Err(Error::TypeMismatch("toral automorphism acts on lattice points")),
        }
    }

    /// One exact application of the map.
    pub fn step(&self, point: &mut Point) -> Result<()> {
        match (self, point) {
            (MapSpec::ExpandingBase(b), Point::Digits(p)) => {
                if p.base() != *b {
                    return Err(Error::TypeMismatch("digit point base differs from map base"));
                }
                p.step();
                Ok(())
            }
            (MapSpec::ToralAuto(m), Point::Lattice(p)) => {
                *p = p.mapped(m);
                Ok(())
            }
            (MapSpec::ExpandingBase(_), _) => Err(Error::TypeMismatch("expanding map needs a digit point")),
            (MapSpec::ToralAuto(_), _) => Err(Error::TypeMismatch("toral automorphism needs a lattice point")),
        }
    }

    /// `f^{-1}(s) = union_k (s + k) / b`.
    pub fn preimage(&self, s: &IntervalSet) -> Result<IntervalSet> {
        self.iterated_preimage(s, 1, DEFAULT_PREIMAGE_BUDGET)
    }

    /// `f^{-j}(s)`, exact. Fails when `b^j * |s|` exceeds `budget` pieces.
    pub fn iterated_preimage(&self, s: &IntervalSet, j: usize, budget: u128) -> Result<IntervalSet> {
        let b = self.expanding_base("exact preimages under a toral automorphism")?;
        if j == 0 {
            return Ok(s.clone());
        }
        let branches = checked_pow(b, j).unwrap_or(u128::MAX);
        let components = branches.saturating_mul(s.pieces().len() as u128);
        if components > budget {
            return Err(Error::BudgetExceeded {
                achieved_j: j,
                components,
                budget,
            });
        }
        let scale_int: BigInt = BigInt::from(b).pow(j as u32);
        let scale = Rational::new(BigInt::one(), scale_int.clone());
        let mut pieces = Vec::with_capacity(components as usize);
        let mut k = BigInt::zero();
        while k < scale_int {
            let shift = Rational::from_integer(k.clone());
            pieces.extend(s.affine_pieces(&shift, &scale));
            k += 1;
        }
        Ok(IntervalSet::from_pieces(pieces))
    }

    /// `domain ∩ f^{-j}(target)`, computed branch by branch over `domain` only.
    ///
    /// Cost is proportional to `b^j * measure(domain)` rather than `b^j * |target|`,
    /// which keeps small domains cheap for large `j`.
    pub fn pullback_within(
        &self,
        domain: &IntervalSet,
        target: &IntervalSet,
        j: usize,
        budget: u128,
    ) -> Result<IntervalSet> {
        let b = self.expanding_base("exact preimages under a toral automorphism")?;
        if j == 0 {
            return Ok(domain.intersect(target));
        }
        if domain.is_empty() || target.is_empty() {
            return Ok(IntervalSet::empty());
        }
        let scale_int: BigInt = BigInt::from(b).pow(j as u32);
        let scale = Rational::from_integer(scale_int.clone());
        let inv = Rational::new(BigInt::one(), scale_int.clone());

        // branch ranges first, so the budget is checked before any work
        let mut ranges = Vec::with_capacity(domain.pieces().len());
        let mut total: u128 = 0;
        for (c, d) in domain.pieces() {
            let lo = (c * &scale).floor().to_integer();
            let hi_excl = (d * &scale).ceil().to_integer();
            let count = (&hi_excl - &lo).to_u128().unwrap_or(u128::MAX);
            total = total.saturating_add(count);
            if total > budget {
                return Err(Error::BudgetExceeded {
                    achieved_j: j,
                    components: total,
                    budget,
                });
            }
            ranges.push((c, d, lo, hi_excl));
        }

        let tp = target.pieces();
        let mut out = Vec::new();
        for (c, d, lo, hi_excl) in ranges {
            let mut k = lo;
            while k < hi_excl {
                let k_rat = Rational::from_integer(k.clone());
                let branch_lo = &k_rat * &inv;
                let branch_hi = (&k_rat + Rational::one()) * &inv;
                let sub_lo = c.max(&branch_lo);
                let sub_hi = d.min(&branch_hi);
                if sub_lo < sub_hi {
                    let img_lo = sub_lo * &scale - &k_rat;
                    let img_hi = sub_hi * &scale - &k_rat;
                    let start = tp.partition_point(|(_, e)| *e <= img_lo);
                    for (ta, tb) in &tp[start..] {
                        if *ta >= img_hi {
                            break;
                        }
                        let lo_i = ta.max(&img_lo);
                        let hi_i = tb.min(&img_hi);
                        if lo_i < hi_i {
                            out.push(((lo_i + &k_rat) * &inv, (hi_i + &k_rat) * &inv));
                        }
                    }
                }
                k += 1;
            }
        }
        Ok(IntervalSet::from_pieces(out))
    }

    /// `measure(domain ∩ f^{-j}(target))`, exact.
    ///
    /// Branches lying inside `domain` each contribute `measure(target) / b^j`; only the
    /// partial branches at piece ends are intersected explicitly. The budget bounds
    /// `j * ceil(log2 b) * |domain|`, the size of the branch arithmetic.
    pub fn pullback_measure_within(
        &self,
        domain: &IntervalSet,
        target: &IntervalSet,
        j: usize,
        budget: u128,
    ) -> Result<Rational> {
        let b = self.expanding_base("exact preimages under a toral automorphism")?;
        if j == 0 {
            return Ok(domain.intersect(target).measure());
        }
        if domain.is_empty() || target.is_empty() {
            return Ok(Rational::zero());
        }
        let bits = u128::from(32 - (b - 1).leading_zeros());
        let cost = (j as u128)
            .saturating_mul(bits)
            .saturating_mul(domain.pieces().len() as u128);
        if cost > budget {
            return Err(Error::BudgetExceeded {
                achieved_j: j,
                components: cost,
                budget,
            });
        }
        let scale_int: BigInt = BigInt::from(b).pow(j as u32);
        let scale = Rational::from_integer(scale_int.clone());
        let inv = Rational::new(BigInt::one(), scale_int);
        let tp = target.pieces();
        let target_measure = target.measure();
        let mut total = Rational::zero();
        for (c, d) in domain.pieces() {
            let (cs, ds) = (c * &scale, d * &scale);
            let full_lo = cs.ceil().to_integer();
            let full_hi = ds.floor().to_integer();
            if full_hi > full_lo {
                total += &target_measure * &inv * Rational::from_integer(&full_hi - &full_lo);
            }
            let mut partial = Vec::with_capacity(2);
            let first = cs.floor().to_integer();
            if first < full_lo {
                partial.push(first);
            }
            if full_hi >= full_lo && full_hi < ds.ceil().to_integer() {
                partial.push(full_hi.clone());
            }
            partial.dedup();
            for k in partial {
                let k_rat = Rational::from_integer(k);
                let img_lo = (&cs - &k_rat).max(Rational::zero());
                let img_hi = (&ds - &k_rat).min(Rational::one());
                if img_lo >= img_hi {
                    continue;
                }
                let start = tp.partition_point(|(_, e)| *e <= img_lo);
                for (ta, tb) in &tp[start..] {
                    if *ta >= img_hi {
                        break;
                    }
                    let lo_i = ta.max(&img_lo);
                    let hi_i = tb.min(&img_hi);
                    if lo_i < hi_i {
                        total += (hi_i - lo_i) * &inv;
                    }
                }
            }
        }
        Ok(total)
    }

    /// Smallest `j` in `1..=j_max` with `s ∩ f^{-j}(s) ≠ ∅`.
    pub fn first_return(&self, s: &IntervalSet, j_max: usize, budget: u128) -> Result<Option<usize>> {
        self.expanding_base("exact first returns under a toral automorphism")?;
        for j in 1..=j_max {
            if !self.pullback_within(s, s, j, budget)?.is_empty() {
                return Ok(Some(j));
            }
        }
        Ok(None)
    }

    /// Stream of `count` independent Lebesgue-distributed points, reproducible from `seed`.
    pub fn sample_stationary(&self, seed: u64, count: usize) -> StationarySampler {
        StationarySampler {
            map: self.clone(),
            seed,
            next: 0,
            count,
            lattice_rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn expanding_base(&self, what: &'static str) -> Result<u32> {
        match self {
            MapSpec::ExpandingBase(b) => Ok(*b),
            MapSpec::ToralAuto(_) => Err(Error::Unsupported(what)),
        }
    }
}

fn checked_pow(b: u32, j: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..j {
        acc = acc.checked_mul(b as u128)?;
    }
    Some(acc)
}

/// Iterator returned by [`MapSpec::sample_stationary`].
pub struct StationarySampler {
    map: MapSpec,
    seed: u64,
    next: usize,
    count: usize,
    lattice_rng: ChaCha8Rng,
}

impl Iterator for StationarySampler {
    type Item = Point;

    fn next(&mut self) -> Option<Point> {
        if self.next >= self.count {
            return None;
        }
        let i = self.next as u64;
        self.next += 1;
        Some(match &self.map {
            MapSpec::ExpandingBase(b) => Point::Digits(LazyDigitPoint::new(*b, self.seed, i)),
            MapSpec::ToralAuto(_) => Point::Lattice(LatticePoint2D::random(&mut self.lattice_rng)),
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let rest = self.count - self.next;
        (rest, Some(rest))
    }
}

/// A phase-space point of either kind of system.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum Point {
    Digits(LazyDigitPoint),
    Lattice(LatticePoint2D),
}

/// Eigenvalue and eigen-directions of a hyperbolic toral automorphism.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenData {
    /// Expanding eigenvalue, `|lambda| > 1`.
    pub lambda: f64,
    pub unstable: (f64, f64),
    pub stable: (f64, f64),
}

impl EigenData {
    fn of(m: [[i64; 2]; 2]) -> Self {
        let [[a, b], [c, d]] = m.map(|r| r.map(|x| x as f64));
        let tr = a + d;
        let det = a * d - b * c;
        let disc = (tr * tr - 4.0 * det).sqrt();
        let (l1, l2) = ((tr + disc) / 2.0, (tr - disc) / 2.0);
        let (lu, ls) = if l1.abs() > l2.abs() { (l1, l2) } else { (l2, l1) };
        let dir = |l: f64| {
            let v = if b != 0.0 { (b, l - a) } else { (l - d, c) };
            let norm = v.0.hypot(v.1);
            (v.0 / norm, v.1 / norm)
        };
        EigenData {
            lambda: lu,
            unstable: dir(lu),
            stable: dir(ls),
        }
    }

    /// Coordinates `(u, s)` of a plane vector in the eigen-frame.
    ///
    /// For symmetric matrices the frame is orthonormal and this is a pair of dot products.
    #[inline]
    pub fn project(&self, x: f64, y: f64) -> (f64, f64) {
        let (ux, uy) = self.unstable;
        let (sx, sy) = self.stable;
        // solve x = u * U + s * S
        let det = ux * sy - uy * sx;
        ((x * sy - y * sx) / det, (ux * y - uy * x) / det)
    }
}

/// A point of the lattice `(2^-64 Z / Z)^2` on the torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LatticePoint2D {
    pub u: u64,
    pub v: u64,
}

const TWO_POW_64: f64 = 18_446_744_073_709_551_616.0;

impl LatticePoint2D {
    pub fn new(u: u64, v: u64) -> Self {
        LatticePoint2D { u, v }
    }

    pub fn random<R: RngCore>(rng: &mut R) -> Self {
        LatticePoint2D {
            u: rng.next_u64(),
            v: rng.next_u64(),
        }
    }

    /// Exact matrix action modulo `2^64`.
    #[inline]
    pub fn mapped(&self, m: &[[i64; 2]; 2]) -> Self {
        let [[a, b], [c, d]] = *m;
        LatticePoint2D {
            u: (a as u64)
                .wrapping_mul(self.u)
                .wrapping_add((b as u64).wrapping_mul(self.v)),
            v: (c as u64)
                .wrapping_mul(self.u)
                .wrapping_add((d as u64).wrapping_mul(self.v)),
        }
    }

    /// Coordinates in `[0, 1)^2`.
    pub fn to_f64(&self) -> (f64, f64) {
        (self.u as f64 / TWO_POW_64, self.v as f64 / TWO_POW_64)
    }

    /// Representative in `[-1/2, 1/2)^2`, the lift closest to the origin.
    #[inline]
    pub fn centered(&self) -> (f64, f64) {
        ((self.u as i64) as f64 / TWO_POW_64, (self.v as i64) as f64 / TWO_POW_64)
    }
}

/// Number of base-`b` digits held in the `u128` window: largest `k` with `b^k <= 2^127`.
fn window_len(base: u32) -> usize {
    let mut k = 0usize;
    let mut acc: u128 = 1;
    while let Some(next) = acc.checked_mul(base as u128) {
        if next > 1u128 << 127 {
            break;
        }
        acc = next;
        k += 1;
    }
    k
}

/// Largest `k` with `b^k <= 2^64`, and `b^k` itself.
fn block_len(base: u32) -> (usize, u128) {
    let mut k = 0usize;
    let mut acc: u128 = 1;
    while acc * base as u128 <= 1u128 << 64 {
        acc *= base as u128;
        k += 1;
    }
    (k, acc)
}

/// A Lebesgue-random point of the circle represented by its base-`b` expansion.
///
/// Digits are drawn from a seeded ChaCha stream on demand. The leading
/// `window` digits are kept as an integer so that comparisons with rational
/// thresholds are usually decided in one integer comparison; ties are
/// resolved by reading further digits, so every comparison is exact.
#[derive(Debug, Clone)]
pub struct LazyDigitPoint {
    base: u32,
    window_len: usize,
    lead_weight: u128,
    window: u128,
    digits: VecDeque<u8>,
    rng: ChaCha8Rng,
    block_len: usize,
    block_modulus: u128,
    seed: u64,
    stream: u64,
    steps: u64,
}

impl LazyDigitPoint {
    /// Fresh point from stream `stream` of `seed`.
    pub fn new(base: u32, seed: u64, stream: u64) -> Self {
        Self::with_prefix(base, &[], seed, stream)
    }

    /// Point whose expansion starts with `prefix`, continued by random digits.
    pub fn with_prefix(base: u32, prefix: &[u8], seed: u64, stream: u64) -> Self {
        assert!(base >= 2, "digit base must be >= 2");
        assert!(prefix.iter().all(|&d| (d as u32) < base), "digit out of range");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let window_len = window_len(base);
        let (block_len, block_modulus) = block_len(base);
        let mut p = LazyDigitPoint {
            base,
            window_len,
            lead_weight: (base as u128).pow(window_len as u32 - 1),
            window: 0,
            digits: prefix.iter().copied().collect(),
            rng,
            block_len,
            block_modulus,
            seed,
            stream,
            steps: 0,
        };
        p.ensure(window_len + 1);
        p.window = p
            .digits
            .iter()
            .take(window_len)
            .fold(0u128, |acc, &d| acc * base as u128 + d as u128);
        p
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn seed(&self) -> (u64, u64) {
        (self.seed, self.stream)
    }

    /// Number of map applications so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    fn refill(&mut self) {
        let block: u128 = if self.block_modulus == 1u128 << 64 {
            self.rng.next_u64() as u128
        } else {
            self.rng.random_range(0..self.block_modulus as u64) as u128
        };
        let start = self.digits.len();
        let mut v = block;
        for _ in 0..self.block_len {
            self.digits.push_back((v % self.base as u128) as u8);
            v /= self.base as u128;
        }
        // most significant digit first
        self.digits.make_contiguous()[start..].reverse();
    }

    fn ensure(&mut self, len: usize) {
        while self.digits.len() < len {
            self.refill();
        }
    }

    /// `x -> b x mod 1`: drop the leading digit.
    #[inline]
    pub fn step(&mut self) {
        if self.digits.len() <= self.window_len {
            self.ensure(self.window_len + 1);
        }
        let lead = self.digits.pop_front().expect("window is non-empty") as u128;
        let incoming = self.digits[self.window_len - 1] as u128;
        self.window = (self.window - lead * self.lead_weight) * self.base as u128 + incoming;
        self.steps += 1;
    }

    /// The first `k` digits of the current point.
    pub fn leading_digits(&mut self, k: usize) -> Vec<u8> {
        self.ensure(k);
        self.digits.iter().take(k).copied().collect()
    }

    /// Current point rounded down to double precision.
    pub fn to_f64(&self) -> f64 {
        self.window as f64 / (self.base as f64).powi(self.window_len as i32)
    }

    /// Compiles `r ∈ [0, 1]` into a threshold for fast comparisons against points of this base.
    pub fn threshold(base: u32, r: &Rational) -> DigitThreshold {
        let k = window_len(base);
        let scale = Rational::from_integer(BigInt::from(base).pow(k as u32));
        let scaled = r * scale;
        let floor = scaled.floor();
        let rem = &scaled - &floor;
        DigitThreshold {
            floor: floor.to_integer().to_u128().expect("threshold lies in [0, 1]"),
            rem,
        }
    }

    /// Exact comparison of the current point with `r`. A point equal to `r`
    /// (a null event) compares as `Greater`, matching half-open arcs `[a, b)`.
    pub fn compare(&mut self, r: &Rational) -> Ordering {
        let t = Self::threshold(self.base, r);
        self.compare_threshold(&t)
    }

    #[inline]
    pub fn compare_threshold(&mut self, t: &DigitThreshold) -> Ordering {
        match self.window.cmp(&t.floor) {
            Ordering::Equal => self.compare_tail(&t.rem),
            other => other,
        }
    }

    #[cold]
    fn compare_tail(&mut self, rem: &Rational) -> Ordering {
        let base = BigInt::from(self.base);
        let mut rem = rem.clone();
        let mut idx = self.window_len;
        loop {
            if rem.is_zero() {
                return Ordering::Greater;
            }
            let shifted = &rem * &base;
            let digit = shifted.floor();
            rem = &shifted - &digit;
            let want = digit.to_integer().to_u32().expect("digit below base");
            self.ensure(idx + 1);
            let have = self.digits[idx] as u32;
            match have.cmp(&want) {
                Ordering::Equal => idx += 1,
                other => return other,
            }
        }
    }
}

/// A rational threshold pre-scaled for [`LazyDigitPoint`] comparisons.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitThreshold {
    floor: u128,
    rem: Rational,
}

/// An [`IntervalSet`] compiled for membership tests of [`LazyDigitPoint`]s.
#[derive(Debug, Clone)]
pub struct DigitSet {
    pieces: Vec<(DigitThreshold, DigitThreshold)>,
}

impl DigitSet {
    pub fn new(base: u32, set: &IntervalSet) -> Self {
        DigitSet {
            pieces: set
                .pieces()
                .iter()
                .map(|(a, b)| (LazyDigitPoint::threshold(base, a), LazyDigitPoint::threshold(base, b)))
                .collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    #[inline]
    pub fn contains(&self, p: &mut LazyDigitPoint) -> bool {
        for (lo, hi) in &self.pieces {
            if p.window < lo.floor {
                return false;
            }
            if p.compare_threshold(lo) != Ordering::Less && p.compare_threshold(hi) == Ordering::Less {
                return true;
            }
        }
        false
    }
}

/// Period of a rational point under an expanding map, if at most `max`.
pub fn rational_period(map: &MapSpec, x: &Rational, max: usize) -> Option<usize> {
    let mut y = x.clone();
    for k in 1..=max {
        y = map.apply_rational(&y).ok()?;
        if y == *x {
            return Some(k);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{rat, rint};

    #[test]
    fn pullback_measure_matches_materialized_set() {
        let sets = [
            IntervalSet::from_pieces(vec![(rat(1, 7), rat(2, 7)), (rat(1, 2), rat(13, 20))]),
            IntervalSet::from_pieces(vec![(rat(0, 1), rat(1, 3))]),
            IntervalSet::from_pieces(vec![(rat(5, 81), rat(6, 81)), (rat(2, 3), rat(1, 1))]),
            IntervalSet::from_pieces(vec![(rat(1, 1000), rat(3, 1000))]),
        ];
        for map in [MapSpec::doubling(), MapSpec::tripling(), MapSpec::expanding(5).unwrap()] {
            for a in &sets {
                for t in &sets {
                    for j in 0..7 {
                        let want = map.pullback_within(a, t, j, u128::MAX).unwrap().measure();
                        let got = map.pullback_measure_within(a, t, j, u128::MAX).unwrap();
                        assert_eq!(got, want, "{} j={j}", map.name());
                    }
                }
            }
        }
        let a = &sets[0];
        assert!(matches!(
            MapSpec::tripling().pullback_measure_within(a, a, 10, 39),
            Err(Error::BudgetExceeded { achieved_j: 10, .. })
        ));
    }

    #[test]
    fn digit_set_checks_every_piece() {
        let set = IntervalSet::from_pieces(vec![(rat(1, 8), rat(1, 4)), (rat(1, 2), rat(3, 4))]);
        let ds = DigitSet::new(2, &set);
        for (digits, inside) in [
            (&[0, 0, 1, 1][..], true),
            (&[0, 1, 1, 0][..], false),
            (&[1, 0, 1, 0][..], true),
            (&[1, 1, 0, 1][..], false),
            (&[0, 0, 0, 1][..], false),
        ] {
            let mut p = LazyDigitPoint::with_prefix(2, digits, 3, 0);
            assert_eq!(ds.contains(&mut p), inside, "{digits:?}");
        }
    }

    #[test]
    fn doubling_step_shifts_digits() {
        let mut p = LazyDigitPoint::with_prefix(2, &[0, 1, 1, 0, 1, 0], 1, 0);
        p.step();
        assert_eq!(p.leading_digits(5), vec![1, 1, 0, 1, 0]);
    }

    #[test]
    fn tripling_step_shifts_digits() {
        let mut p = LazyDigitPoint::with_prefix(3, &[2, 1], 1, 0);
        p.step();
        assert_eq!(p.leading_digits(1), vec![1]);
        let mut m = Point::Digits(LazyDigitPoint::with_prefix(3, &[2, 1], 1, 0));
        MapSpec::tripling().step(&mut m).unwrap();
        assert!(MapSpec::doubling().step(&mut m).is_err());
    }

    #[test]
    fn many_steps_equal_dropping_digits() {
        let mut a = LazyDigitPoint::new(3, 9, 4);
        let digits = a.leading_digits(500);
        for _ in 0..300 {
            a.step();
        }
        assert_eq!(a.leading_digits(200), digits[300..].to_vec());
    }

    #[test]
    fn window_matches_digits_after_steps() {
        for base in [2u32, 3, 5, 10] {
            let mut p = LazyDigitPoint::new(base, 3, 1);
            for _ in 0..1000 {
                p.step();
            }
            let k = p.window_len;
            let d = p.leading_digits(k);
            let w = d.iter().fold(0u128, |acc, &x| acc * base as u128 + x as u128);
            assert_eq!(w, p.window);
        }
    }

    #[test]
    fn cat_map_half_zero() {
        let p = LatticePoint2D::new(1 << 63, 0);
        let q = p.mapped(&[[2, 1], [1, 1]]);
        assert_eq!(q, LatticePoint2D::new(0, 1 << 63));
        let mut pt = Point::Lattice(p);
        MapSpec::cat().step(&mut pt).unwrap();
        match pt {
            Point::Lattice(l) => assert_eq!(l, q),
            _ => unreachable!(),
        }
    }

    #[test]
    fn cat_map_permutes_quarter_lattice() {
        let m = [[2, 1], [1, 1]];
        let pts: Vec<LatticePoint2D> = (0..4u64)
            .flat_map(|i| (0..4u64).map(move |j| LatticePoint2D::new(i << 62, j << 62)))
            .collect();
        let mut images: Vec<_> = pts.iter().map(|p| p.mapped(&m)).collect();
        images.sort_by_key(|p| (p.u, p.v));
        let mut sorted = pts.clone();
        sorted.sort_by_key(|p| (p.u, p.v));
        assert_eq!(images, sorted);
    }

    #[test]
    fn cat_eigen_data() {
        let e = MapSpec::cat().eigen().unwrap();
        let lambda = (3.0 + 5f64.sqrt()) / 2.0;
        assert!((e.lambda - lambda).abs() <= f64::EPSILON * lambda);
        let dot = e.unstable.0 * e.stable.0 + e.unstable.1 * e.stable.1;
        assert!(dot.abs() < 1e-15);
        let (u, s) = e.project(e.unstable.0, e.unstable.1);
        assert!((u - 1.0).abs() < 1e-15 && s.abs() < 1e-15);
    }

    #[test]
    fn toral_validation() {
        assert!(MapSpec::toral([[1, 1], [0, 1]]).is_err());
        assert!(MapSpec::toral([[2, 0], [0, 1]]).is_err());
        assert!(MapSpec::toral([[2, 1], [1, 1]]).is_ok());
        assert!(MapSpec::expanding(1).is_err());
    }

    #[test]
    fn preimage_examples() {
        let eps = rat(1, 100);
        let s = IntervalSet::ball(&rat(1, 3), &eps).unwrap();
        let pre = MapSpec::doubling().preimage(&s).unwrap();
        let half = &eps / rint(2);
        let expect = IntervalSet::ball(&rat(1, 6), &half)
            .unwrap()
            .union(&IntervalSet::ball(&rat(2, 3), &half).unwrap());
        assert_eq!(pre, expect);
        assert!(MapSpec::tripling().preimage(&IntervalSet::full()).unwrap().is_full());
        assert!(MapSpec::doubling().preimage(&IntervalSet::empty()).unwrap().is_empty());
        assert!(MapSpec::cat().preimage(&s).is_err());
    }

    #[test]
    fn iterated_preimage_examples() {
        let s = IntervalSet::from_pieces([(rat(1, 10), rat(1, 5))]);
        let m = MapSpec::doubling();
        assert_eq!(m.iterated_preimage(&s, 0, DEFAULT_PREIMAGE_BUDGET).unwrap(), s);
        let two = m.iterated_preimage(&s, 2, DEFAULT_PREIMAGE_BUDGET).unwrap();
        assert_eq!(two.num_components(), 4);
        assert!(two.arcs().iter().all(|a| a.length() == rat(1, 40)));
        let many = IntervalSet::from_pieces((0..100).map(|i| (rat(2 * i, 200), rat(2 * i + 1, 200))));
        assert_eq!(many.num_components(), 100);
        match m.iterated_preimage(&many, 70, DEFAULT_PREIMAGE_BUDGET) {
            Err(Error::BudgetExceeded { achieved_j, .. }) => assert_eq!(achieved_j, 70),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn pullback_matches_global_preimage() {
        let m = MapSpec::tripling();
        let dom = IntervalSet::from_pieces([(rat(1, 7), rat(2, 5)), (rat(3, 5), rat(4, 5))]);
        let tgt = IntervalSet::from_pieces([(rat(1, 9), rat(1, 4)), (rat(1, 2), rat(2, 3))]);
        for j in 0..5 {
            let global = dom.intersect(&m.iterated_preimage(&tgt, j, DEFAULT_PREIMAGE_BUDGET).unwrap());
            let local = m.pullback_within(&dom, &tgt, j, DEFAULT_PREIMAGE_BUDGET).unwrap();
            assert_eq!(global, local, "j = {j}");
        }
    }

    #[test]
    fn first_return_examples() {
        let m = MapSpec::doubling();
        let b = IntervalSet::ball(&rat(1, 3), &rat(1, 100)).unwrap();
        assert_eq!(m.first_return(&b, 30, DEFAULT_PREIMAGE_BUDGET).unwrap(), Some(2));
        let b = IntervalSet::ball(&rat(1, 5), &rat(1, 1000)).unwrap();
        assert_eq!(m.first_return(&b, 30, DEFAULT_PREIMAGE_BUDGET).unwrap(), Some(4));
        assert_eq!(
            m.first_return(&IntervalSet::full(), 5, DEFAULT_PREIMAGE_BUDGET)
                .unwrap(),
            Some(1)
        );
    }

    #[test]
    fn first_return_grows_near_irrational_point() {
        // rational approximations of sqrt(2) - 1
        let zeta = rat(41_421_356_237, 100_000_000_000);
        let m = MapSpec::doubling();
        let mut last = 0;
        for k in 2..=6u32 {
            let r = Rational::new(BigInt::one(), BigInt::from(10u64.pow(k)));
            let b = IntervalSet::ball(&zeta, &r).unwrap();
            let ret = m.first_return(&b, 64, DEFAULT_PREIMAGE_BUDGET).unwrap().unwrap();
            assert!(ret >= last, "k = {k}: {ret} < {last}");
            last = ret;
        }
    }

    #[test]
    fn rational_periods() {
        assert_eq!(rational_period(&MapSpec::doubling(), &rat(1, 3), 10), Some(2));
        assert_eq!(rational_period(&MapSpec::doubling(), &rat(1, 5), 10), Some(4));
        assert_eq!(rational_period(&MapSpec::doubling(), &rat(1, 12), 10), None);
    }

    #[test]
    fn sampling_is_deterministic() {
        let m = MapSpec::doubling();
        let a: Vec<f64> = m
            .sample_stationary(7, 2)
            .map(|p| match p {
                Point::Digits(d) => d.to_f64(),
                _ => unreachable!(),
            })
            .collect();
        let b: Vec<f64> = m
            .sample_stationary(7, 2)
            .map(|p| match p {
                Point::Digits(d) => d.to_f64(),
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(a, b);
        assert_eq!(m.sample_stationary(7, 0).count(), 0);
    }

    #[test]
    fn exact_comparisons() {
        // 0.0101... in base 2 with random tail
        let mut p = LazyDigitPoint::with_prefix(2, &[0, 1, 0, 1], 5, 0);
        assert_eq!(p.compare(&rat(1, 4)), Ordering::Greater);
        assert_eq!(p.compare(&rat(3, 8)), Ordering::Less);
        // 1/3 = 0.010101... ; a long agreeing prefix forces tail comparisons
        let prefix: Vec<u8> = (0..200).map(|i| (i % 2) as u8).collect();
        let mut q = LazyDigitPoint::with_prefix(2, &prefix, 5, 0);
        let ord = q.compare(&rat(1, 3));
        let next = q.leading_digits(201)[200];
        assert_eq!(ord, if next == 1 { Ordering::Greater } else { Ordering::Less });
    }
}
