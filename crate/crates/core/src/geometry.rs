//! Exact set algebra on the circle `[0, 1)` and axis-aligned boxes on the 2-torus.
//!
//! An [`IntervalSet`] is a finite union of half-open arcs with rational
//! endpoints. Internally it is stored as sorted, disjoint, non-touching
//! intervals `[a, b)` with `0 <= a < b <= 1`; an arc that wraps through `0`
//! is kept as its two linear pieces `[0, b)` and `[a, 1)` and re-joined by
//! [`IntervalSet::arcs`]. This canonical form makes structural equality the
//! same as set equality.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary precision rational, always in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Shorthand for `p / q` as a [`Rational`].
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Integer as a [`Rational`].
pub fn rint(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// Fractional part `x - floor(x)`, in `[0, 1)`.
pub fn frac(x: &Rational) -> Rational {
    x - x.floor()
}

/// Lossy conversion used for reporting.
pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Exact conversion of a finite `f64` (every finite double is a dyadic rational).
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// How balls are formed near the ends of `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    /// Balls wrap modulo 1.
    #[default]
    Circle,
    /// Balls are clipped to `[0, 1)`.
    Interval,
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "circle" => Ok(Boundary::Circle),
            "interval" => Ok(Boundary::Interval),
            other => Err(Error::Domain(format!("unknown boundary mode '{other}'"))),
        }
    }
}

/// A half-open arc `[start, end)` on the circle. `start > end` means the arc wraps through 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub start: Rational,
    pub end: Rational,
}

impl Arc {
    pub fn wraps(&self) -> bool {
        self.start > self.end
    }

    pub fn length(&self) -> Rational {
        if self.wraps() {
            Rational::one() - &self.start + &self.end
        } else {
            &self.end - &self.start
        }
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.start, self.end)
    }
}

/// Finite disjoint union of half-open arcs on the circle.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntervalSet {
    pieces: Vec<(Rational, Rational)>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { pieces: Vec::new() }
    }

    pub fn full() -> Self {
        IntervalSet {
            pieces: vec![(Rational::zero(), Rational::one())],
        }
    }

    /// The arc `[start, end)` taken modulo 1. Both endpoints are reduced into `[0, 1)`;
    /// equal endpoints give the empty set.
    pub fn arc(start: &Rational, end: &Rational) -> Self {
        let a = frac(start);
        let b = frac(end);
        match a.cmp(&b) {
            Ordering::Less => IntervalSet { pieces: vec![(a, b)] },
            Ordering::Equal => IntervalSet::empty(),
            Ordering::Greater => Self::from_pieces(vec![(Rational::zero(), b), (a, Rational::one())]),
        }
    }

    /// Normalizes arbitrary linear intervals inside `[0, 1]`. Empty or inverted pieces are dropped.
    pub fn from_pieces<I>(pieces: I) -> Self
    where
        I: IntoIterator<Item = (Rational, Rational)>,
    {
        let zero = Rational::zero();
        let one = Rational::one();
        let mut v: Vec<(Rational, Rational)> = pieces
            .into_iter()
            .map(|(a, b)| (a.max(zero.clone()), b.min(one.clone())))
            .filter(|(a, b)| a < b)
            .collect();
        v.sort_by(|x, y| x.0.cmp(&y.0));
        let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(v.len());
        for (a, b) in v {
            if let Some(last) = out.last_mut() {
                if a <= last.1 {
                    if b > last.1 {
                        last.1 = b;
                    }
                    continue;
                }
            }
            out.push((a, b));
        }
        IntervalSet { pieces: out }
    }

    /// Linear pieces of the canonical form, sorted and pairwise non-touching.
    pub fn pieces(&self) -> &[(Rational, Rational)] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.pieces.len() == 1 && self.pieces[0].0.is_zero() && self.pieces[0].1.is_one()
    }

    /// Maximal arcs on the circle, with a piece touching 1 glued to a piece starting at 0.
    pub fn arcs(&self) -> Vec<Arc> {
        let n = self.pieces.len();
        if n >= 2 && self.pieces[0].0.is_zero() && self.pieces[n - 1].1.is_one() {
            let mut out = Vec::with_capacity(n - 1);
            out.push(Arc {
                start: self.pieces[n - 1].0.clone(),
                end: self.pieces[0].1.clone(),
            });
            for (a, b) in &self.pieces[1..n - 1] {
                out.push(Arc {
                    start: a.clone(),
                    end: b.clone(),
                });
            }
            out.sort_by(|x, y| x.start.cmp(&y.start));
            out
        } else {
            self.pieces
                .iter()
                .map(|(a, b)| Arc {
                    start: a.clone(),
                    end: b.clone(),
                })
                .collect()
        }
    }

    /// Number of maximal arcs on the circle.
    pub fn num_components(&self) -> usize {
        let n = self.pieces.len();
        if n >= 2 && self.pieces[0].0.is_zero() && self.pieces[n - 1].1.is_one() {
            n - 1
        } else {
            n
        }
    }

    pub fn measure(&self) -> Rational {
        self.pieces.iter().fold(Rational::zero(), |acc, (a, b)| acc + (b - a))
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let x = frac(x);
        // last piece whose start is <= x
        let idx = self.pieces.partition_point(|(a, _)| *a <= x);
        idx > 0 && x < self.pieces[idx - 1].1
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        Self::from_pieces(self.pieces.iter().chain(other.pieces.iter()).cloned())
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.pieces.len() && j < other.pieces.len() {
            let (a0, a1) = &self.pieces[i];
            let (b0, b1) = &other.pieces[j];
            let lo = a0.max(b0);
            let hi = a1.min(b1);
            if lo < hi {
                out.push((lo.clone(), hi.clone()));
            }
            if a1 < b1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        // inputs are canonical, so the output pieces never touch
        IntervalSet { pieces: out }
    }

    pub fn complement(&self) -> IntervalSet {
        let mut out = Vec::with_capacity(self.pieces.len() + 1);
        let mut cursor = Rational::zero();
        for (a, b) in &self.pieces {
            if cursor < *a {
                out.push((cursor.clone(), a.clone()));
            }
            cursor = b.clone();
        }
        if cursor < Rational::one() {
            out.push((cursor, Rational::one()));
        }
        IntervalSet { pieces: out }
    }

    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        self.intersect(&other.complement())
    }

    /// Open ball `(center - radius, center + radius)` on the circle, as a half-open arc.
    pub fn ball(center: &Rational, radius: &Rational) -> Result<IntervalSet> {
        Self::ball_with(center, radius, Boundary::Circle)
    }

    /// Ball with the chosen boundary treatment. Requires `0 < radius < 1/2`.
    pub fn ball_with(center: &Rational, radius: &Rational, boundary: Boundary) -> Result<IntervalSet> {
        if !radius.is_positive() || *radius >= rat(1, 2) {
            return Err(Error::DegenerateBall {
                radius: radius.to_string(),
            });
        }
        Ok(Self::ball_unchecked(center, radius, boundary))
    }

    /// Like [`IntervalSet::ball_with`] but saturating: radius `<= 0` gives the empty set
    /// and a radius covering everything gives the full circle.
    pub fn ball_unchecked(center: &Rational, radius: &Rational, boundary: Boundary) -> IntervalSet {
        if !radius.is_positive() {
            return IntervalSet::empty();
        }
        let c = frac(center);
        match boundary {
            Boundary::Circle => {
                if *radius >= rat(1, 2) {
                    IntervalSet::full()
                } else {
                    IntervalSet::arc(&(&c - radius), &(&c + radius))
                }
            }
            Boundary::Interval => IntervalSet::from_pieces([(&c - radius, &c + radius)]),
        }
    }

    /// Applies `x -> (x + shift) * scale` to every piece; the caller guarantees the
    /// image stays inside `[0, 1]`.
    pub(crate) fn affine_pieces<'a>(
        &'a self,
        shift: &'a Rational,
        scale: &'a Rational,
    ) -> impl Iterator<Item = (Rational, Rational)> + 'a {
        self.pieces
            .iter()
            .map(move |(a, b)| ((a + shift) * scale, (b + shift) * scale))
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "{{}}");
        }
        let arcs: Vec<String> = self.arcs().iter().map(|a| a.to_string()).collect();
        write!(f, "{{{}}}", arcs.join(", "))
    }
}

/// Distance on the circle `R/Z`.
pub fn circle_distance(x: &Rational, y: &Rational) -> Rational {
    let d = frac(&(x - y));
    let other = Rational::one() - &d;
    d.min(other)
}

/// A box on the 2-torus written in a local frame `(u, s)`: the box is
/// `|u - center.0| < half_widths.0` and `|s - center.1| < half_widths.1`.
///
/// Frames for the toral automorphism are its eigen-directions, which are
/// irrational, so coordinates are `f64`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusRect {
    pub center: (f64, f64),
    pub half_widths: (f64, f64),
}

impl TorusRect {
    pub fn new(center: (f64, f64), half_widths: (f64, f64)) -> Result<Self> {
        let (w1, w2) = half_widths;
        if !(w1 > 0.0 && w2 > 0.0) || 4.0 * w1 * w2 > 1.0 {
            return Err(Error::Domain(format!(
                "torus rectangle half-widths ({w1}, {w2}) must be positive with area <= 1"
            )));
        }
        Ok(TorusRect { center, half_widths })
    }

    pub fn measure(&self) -> f64 {
        4.0 * self.half_widths.0 * self.half_widths.1
    }

    #[inline]
    pub fn contains(&self, u: f64, s: f64) -> bool {
        (u - self.center.0).abs() < self.half_widths.0 && (s - self.center.1).abs() < self.half_widths.1
    }

    pub fn intersects(&self, other: &TorusRect) -> bool {
        (self.center.0 - other.center.0).abs() < self.half_widths.0 + other.half_widths.0
            && (self.center.1 - other.center.1).abs() < self.half_widths.1 + other.half_widths.1
    }

    pub fn overlap_area(&self, other: &TorusRect) -> f64 {
        let side = |c1: f64, w1: f64, c2: f64, w2: f64| ((c1 + w1).min(c2 + w2) - (c1 - w1).max(c2 - w2)).max(0.0);
        side(self.center.0, self.half_widths.0, other.center.0, other.half_widths.0)
            * side(self.center.1, self.half_widths.1, other.center.1, other.half_widths.1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(pieces: &[(i64, i64, i64, i64)]) -> IntervalSet {
        IntervalSet::from_pieces(pieces.iter().map(|&(a, b, c, d)| (rat(a, b), rat(c, d))))
    }

    #[test]
    fn measure_examples() {
        assert_eq!(IntervalSet::empty().measure(), rint(0));
        assert_eq!(set(&[(0, 1, 1, 3)]).measure(), rat(1, 3));
        let wrap = IntervalSet::arc(&rat(7, 8), &rat(1, 8));
        assert_eq!(wrap.measure(), rat(1, 4));
        assert_eq!(wrap.num_components(), 1);
        assert_eq!(
            wrap.arcs(),
            vec![Arc {
                start: rat(7, 8),
                end: rat(1, 8)
            }]
        );
    }

    #[test]
    fn set_operation_examples() {
        let u = set(&[(0, 1, 1, 4)]).union(&set(&[(1, 8, 1, 2)]));
        assert_eq!(u, set(&[(0, 1, 1, 2)]));
        assert!(set(&[(0, 1, 1, 4)]).intersect(&set(&[(1, 2, 3, 4)])).is_empty());
        let d = set(&[(0, 1, 1, 2)]).difference(&set(&[(1, 4, 1, 3)]));
        assert_eq!(d, set(&[(0, 1, 1, 4), (1, 3, 1, 2)]));
    }

    #[test]
    fn adjacent_pieces_merge() {
        let s = set(&[(0, 1, 1, 4), (1, 4, 1, 2)]);
        assert_eq!(s.pieces().len(), 1);
    }

    #[test]
    fn ball_examples() {
        let b = IntervalSet::ball(&rat(1, 2), &rat(1, 8)).unwrap();
        assert_eq!(b, set(&[(3, 8, 5, 8)]));
        let w = IntervalSet::ball(&rint(0), &rat(1, 8)).unwrap();
        assert_eq!(w.measure(), rat(1, 4));
        assert_eq!(w, IntervalSet::arc(&rat(7, 8), &rat(1, 8)));
        assert!(matches!(
            IntervalSet::ball(&rat(1, 3), &rat(1, 2)),
            Err(Error::DegenerateBall { .. })
        ));
        assert!(IntervalSet::ball(&rat(1, 3), &rint(0)).is_err());
    }

    #[test]
    fn interval_boundary_clips() {
        let b = IntervalSet::ball_with(&rint(0), &rat(1, 8), Boundary::Interval).unwrap();
        assert_eq!(b.measure(), rat(1, 8));
    }

    #[test]
    fn contains_respects_half_open() {
        let s = set(&[(1, 4, 1, 2)]);
        assert!(s.contains(&rat(1, 4)));
        assert!(!s.contains(&rat(1, 2)));
        assert!(s.contains(&rat(5, 4)));
    }

    #[test]
    fn complement_of_empty_is_full() {
        assert!(IntervalSet::empty().complement().is_full());
        assert!(IntervalSet::full().complement().is_empty());
    }

    #[test]
    fn circle_distance_wraps() {
        assert_eq!(circle_distance(&rat(1, 10), &rat(9, 10)), rat(1, 5));
    }

    #[test]
    fn torus_rect_rejects_bad_widths() {
        assert!(TorusRect::new((0.0, 0.0), (0.0, 0.1)).is_err());
        let r = TorusRect::new((0.0, 0.0), (0.25, 0.5)).unwrap();
        assert!((r.measure() - 0.5).abs() < 1e-15);
        assert!(r.contains(0.1, -0.4));
        assert!(!r.contains(0.3, 0.0));
    }
}
