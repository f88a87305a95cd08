//! Observables `psi_i = g_i(dist(., Z_i))`, exact finite-n thresholds and exceedance sets.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::{circle_distance, from_f64, rat, to_f64, Boundary, IntervalSet, Rational, TorusRect};

/// Shape of `g` in `psi = g(dist)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GType {
    /// `g(t) = -log t`
    Log,
    /// `g(t) = t^(-1/alpha)`
    Pareto(f64),
    /// `g(t) = D - t^(1/alpha)`
    Bounded { d: f64, alpha: f64 },
}

impl GType {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            GType::Log => true,
            GType::Pareto(a) => a > 0.0 && a.is_finite(),
            GType::Bounded { d, alpha } => d.is_finite() && alpha > 0.0 && alpha.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidObservable(format!("{self:?}")))
        }
    }

    /// `g(t)` for a distance `t >= 0`.
    pub fn g(&self, t: f64) -> f64 {
        match *self {
            GType::Log => -t.ln(),
            GType::Pareto(a) => t.powf(-1.0 / a),
            GType::Bounded { d, alpha } => d - t.powf(1.0 / alpha),
        }
    }

    /// Radius `g^-1(u)`: the exceedance set `{psi > u}` is the open `r`-neighbourhood of `Z`.
    pub fn inverse(&self, u: f64) -> Result<f64> {
        match *self {
            GType::Log => Ok((-u).exp()),
            GType::Pareto(a) => {
                if u <= 0.0 {
                    Err(Error::BelowInvertibleRange(u))
                } else {
                    Ok(u.powf(-a))
                }
            }
            GType::Bounded { d, alpha } => {
                if u >= d {
                    Ok(0.0)
                } else {
                    Ok((d - u).powf(alpha))
                }
            }
        }
    }

    /// Supremum of `g`, attained on `Z`.
    pub fn sup(&self) -> f64 {
        match *self {
            GType::Log | GType::Pareto(_) => f64::INFINITY,
            GType::Bounded { d, .. } => d,
        }
    }
}

impl fmt::Display for GType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GType::Log => write!(f, "log"),
            GType::Pareto(a) => write!(f, "pareto({a})"),
            GType::Bounded { d, alpha } => write!(f, "bounded({d},{alpha})"),
        }
    }
}

/// Where an observable attains its maximum.
#[derive(Debug, Clone, PartialEq)]
pub enum MaximalSet {
    /// Finitely many rational points of the circle.
    FinitePoints(Vec<Rational>),
    /// A segment `(center_u - half_len, center_u + half_len) x {0}` of the local
    /// unstable manifold through the origin, in eigen-coordinates `(u, s)`.
    UnstableSegment { center_u: f64, half_len: f64 },
}

impl MaximalSet {
    pub fn points(points: Vec<Rational>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidObservable("maximal set has no points".into()));
        }
        let mut reduced: Vec<Rational> = points.iter().map(crate::geometry::frac).collect();
        reduced.sort();
        if reduced.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidObservable("maximal points must be distinct".into()));
        }
        Ok(MaximalSet::FinitePoints(points))
    }

    pub fn segment(center_u: f64, half_len: f64) -> Result<Self> {
        if !(half_len > 0.0 && center_u.is_finite()) {
            return Err(Error::InvalidObservable(format!("segment half-length {half_len}")));
        }
        Ok(MaximalSet::UnstableSegment { center_u, half_len })
    }

    pub fn is_circle(&self) -> bool {
        matches!(self, MaximalSet::FinitePoints(_))
    }
}

/// One component `psi_i` of the vector observable.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSpec {
    pub g: GType,
    pub z: MaximalSet,
}

impl ObservableSpec {
    pub fn new(g: GType, z: MaximalSet) -> Result<Self> {
        g.validate()?;
        Ok(ObservableSpec { g, z })
    }

    pub fn log_at(points: Vec<Rational>) -> Result<Self> {
        Self::new(GType::Log, MaximalSet::points(points)?)
    }

    /// `psi(x)` for a circle point.
    pub fn evaluate_circle(&self, x: f64) -> Result<f64> {
        match &self.z {
            MaximalSet::FinitePoints(zs) => {
                let d = zs
                    .iter()
                    .map(|z| {
                        let t = (x - to_f64(z)).rem_euclid(1.0);
                        t.min(1.0 - t)
                    })
                    .fold(f64::INFINITY, f64::min);
                Ok(self.g.g(d))
            }
            MaximalSet::UnstableSegment { .. } => Err(Error::TypeMismatch("circle point for a torus observable")),
        }
    }

    /// `psi(x)` for an exact circle point.
    pub fn evaluate_rational(&self, x: &Rational) -> Result<f64> {
        match &self.z {
            MaximalSet::FinitePoints(zs) => {
                let d = zs.iter().map(|z| circle_distance(x, z)).min().expect("non-empty");
                Ok(self.g.g(to_f64(&d)))
            }
            MaximalSet::UnstableSegment { .. } => Err(Error::TypeMismatch("circle point for a torus observable")),
        }
    }

    /// `psi` at eigen-coordinates `(u, s)`, with distance measured along the stable axis only.
    pub fn evaluate_torus(&self, u: f64, s: f64) -> Result<f64> {
        match &self.z {
            MaximalSet::UnstableSegment { center_u, half_len } => {
                if (u - center_u).abs() < *half_len {
                    Ok(self.g.g(s.abs()))
                } else {
                    Ok(f64::NEG_INFINITY)
                }
            }
            MaximalSet::FinitePoints(_) => Err(Error::TypeMismatch("torus point for a circle observable")),
        }
    }

    /// `{psi > u}` on the circle.
    pub fn exceedance_set(&self, u: f64, boundary: Boundary) -> Result<IntervalSet> {
        let r = self.g.inverse(u)?;
        let r = from_f64(r).ok_or_else(|| Error::Domain(format!("radius for level {u}")))?;
        self.exceedance_set_for_radius(&r, boundary)
    }

    /// Union of open balls of radius `r` around `Z`, as half-open arcs.
    pub fn exceedance_set_for_radius(&self, r: &Rational, boundary: Boundary) -> Result<IntervalSet> {
        match &self.z {
            MaximalSet::FinitePoints(zs) => {
                if !r.is_positive() {
                    return Ok(IntervalSet::empty());
                }
                Ok(zs.iter().fold(IntervalSet::empty(), |acc, z| {
                    acc.union(&IntervalSet::ball_unchecked(z, r, boundary))
                }))
            }
            MaximalSet::UnstableSegment { .. } => Err(Error::TypeMismatch("use exceedance_rect for torus observables")),
        }
    }

    /// `{psi > u}` on the torus for a stable-direction radius `r`.
    pub fn exceedance_rect(&self, r: f64) -> Result<Option<TorusRect>> {
        match &self.z {
            MaximalSet::UnstableSegment { center_u, half_len } => {
                if r <= 0.0 {
                    Ok(None)
                } else {
                    TorusRect::new((*center_u, 0.0), (*half_len, r)).map(Some)
                }
            }
            MaximalSet::FinitePoints(_) => Err(Error::TypeMismatch("use exceedance_set for circle observables")),
        }
    }

    /// Lebesgue measure of the `r`-neighbourhood of `Z` as a function of `r`.
    pub fn mass_at_radius(&self, r: &Rational, boundary: Boundary) -> Rational {
        match &self.z {
            MaximalSet::FinitePoints(zs) => point_mass(zs, r, boundary),
            MaximalSet::UnstableSegment { half_len, .. } => {
                from_f64(4.0 * half_len * to_f64(r)).unwrap_or_else(Rational::zero)
            }
        }
    }

    /// Smallest radius whose neighbourhood has measure `mass`.
    pub fn radius_for_mass(&self, mass: &Rational, boundary: Boundary) -> Result<Rational> {
        if mass.is_negative() {
            return Err(Error::InvalidFrequency(format!("negative mass {mass}")));
        }
        match &self.z {
            MaximalSet::FinitePoints(zs) => invert_point_mass(zs, mass, boundary),
            MaximalSet::UnstableSegment { half_len, .. } => {
                if *mass > Rational::one() {
                    return Err(Error::InfeasibleThreshold {
                        requested: mass.to_string(),
                    });
                }
                let r = to_f64(mass) / (4.0 * half_len);
                from_f64(r).ok_or_else(|| Error::Domain(format!("radius {r}")))
            }
        }
    }
}

/// Sorted distinct representatives in `[0, 1)`.
fn sorted_points(zs: &[Rational]) -> Vec<Rational> {
    let mut p: Vec<Rational> = zs.iter().map(crate::geometry::frac).collect();
    p.sort();
    p.dedup();
    p
}

/// `sum over gaps of min(2r, gap)` (circle), with half-gap endpoint terms in interval mode.
fn point_mass(zs: &[Rational], r: &Rational, boundary: Boundary) -> Rational {
    if !r.is_positive() {
        return Rational::zero();
    }
    let two_r = r * rat(2, 1);
    let p = sorted_points(zs);
    let mut total = Rational::zero();
    for w in p.windows(2) {
        total += (&w[1] - &w[0]).min(two_r.clone());
    }
    match boundary {
        Boundary::Circle => {
            let wrap = &p[0] + Rational::one() - &p[p.len() - 1];
            total += wrap.min(two_r);
        }
        Boundary::Interval => {
            total += p[0].clone().min(r.clone());
            total += (Rational::one() - &p[p.len() - 1]).min(r.clone());
        }
    }
    total
}

fn invert_point_mass(zs: &[Rational], mass: &Rational, boundary: Boundary) -> Result<Rational> {
    let p = sorted_points(zs);
    let mut breaks = vec![Rational::zero()];
    for w in p.windows(2) {
        breaks.push((&w[1] - &w[0]) / rat(2, 1));
    }
    match boundary {
        Boundary::Circle => breaks.push((&p[0] + Rational::one() - &p[p.len() - 1]) / rat(2, 1)),
        Boundary::Interval => {
            breaks.push(p[0].clone());
            breaks.push(Rational::one() - &p[p.len() - 1]);
        }
    }
    breaks.sort();
    breaks.dedup();
    let top = point_mass(zs, breaks.last().expect("non-empty"), boundary);
    if *mass > top {
        return Err(Error::InfeasibleThreshold {
            requested: mass.to_string(),
        });
    }
    if mass.is_zero() {
        return Ok(Rational::zero());
    }
    let mut prev = Rational::zero();
    let mut prev_mass = Rational::zero();
    for b in breaks.into_iter().skip(1) {
        let m = point_mass(zs, &b, boundary);
        if m >= *mass {
            // linear between consecutive breakpoints
            return Ok(&prev + (mass - &prev_mass) * (&b - &prev) / (&m - &prev_mass));
        }
        prev = b;
        prev_mass = m;
    }
    unreachable!("mass bounded by top breakpoint")
}

/// Asymptotic frequency vector `tau`, non-negative and not identically zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FrequencyVector(Vec<Rational>);

impl FrequencyVector {
    pub fn new(tau: Vec<Rational>) -> Result<Self> {
        if tau.is_empty() {
            return Err(Error::InvalidFrequency("empty vector".into()));
        }
        if tau.iter().any(|t| t.is_negative()) {
            return Err(Error::InvalidFrequency("negative component".into()));
        }
        if tau.iter().all(|t| t.is_zero()) {
            return Err(Error::InvalidFrequency("all components are zero".into()));
        }
        Ok(FrequencyVector(tau))
    }

    pub fn from_f64(tau: &[f64]) -> Result<Self> {
        let v = tau
            .iter()
            .map(|&t| from_f64(t).ok_or_else(|| Error::InvalidFrequency(format!("{t}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(v)
    }

    /// `tau = (alpha_1, ..., alpha_{d-1}, 1 - sum alpha)`.
    pub fn from_simplex(alpha: &[Rational]) -> Result<Self> {
        let s: Rational = alpha.iter().cloned().fold(Rational::zero(), |a, b| a + b);
        let mut v = alpha.to_vec();
        v.push(Rational::one() - s);
        Self::new(v)
    }

    pub fn components(&self) -> &[Rational] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> Rational {
        self.0.iter().cloned().fold(Rational::zero(), |a, b| a + b)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(to_f64).collect()
    }

    pub fn scaled(&self, c: &Rational) -> Result<Self> {
        Self::new(self.0.iter().map(|t| t * c).collect())
    }
}

impl fmt::Display for FrequencyVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|t| t.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Exact finite-n levels: radius `r_i` with `mu(U_i) = tau_i / n`, and `u_i = g_i(r_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdVector {
    pub n: u64,
    /// `None` when `tau_i = 0` (level `+inf`, empty exceedance set).
    pub radii: Vec<Option<Rational>>,
    pub levels: Vec<f64>,
}

/// Exact quantile thresholds `u_n(tau)`.
pub fn thresholds(
    obs: &[ObservableSpec],
    tau: &FrequencyVector,
    n: u64,
    boundary: Boundary,
) -> Result<ThresholdVector> {
    if obs.len() != tau.dim() {
        return Err(Error::InvalidFrequency(format!(
            "dimension {} does not match {} observables",
            tau.dim(),
            obs.len()
        )));
    }
    if n == 0 {
        return Err(Error::Domain("block length n must be >= 1".into()));
    }
    let nr = Rational::from_integer(n.into());
    let mut radii = Vec::with_capacity(obs.len());
    let mut levels = Vec::with_capacity(obs.len());
    for (o, t) in obs.iter().zip(tau.components()) {
        if t.is_zero() {
            radii.push(None);
            levels.push(f64::INFINITY);
            continue;
        }
        let r = o.radius_for_mass(&(t / &nr), boundary)?;
        levels.push(o.g.g(to_f64(&r)));
        radii.push(Some(r));
    }
    Ok(ThresholdVector { n, radii, levels })
}

/// Exceedance sets `U_i^(n)(tau_i)` on the circle.
pub fn exceedance_sets(obs: &[ObservableSpec], th: &ThresholdVector, boundary: Boundary) -> Result<Vec<IntervalSet>> {
    obs.iter()
        .zip(&th.radii)
        .map(|(o, r)| match r {
            None => Ok(IntervalSet::empty()),
            Some(r) => o.exceedance_set_for_radius(r, boundary),
        })
        .collect()
}

/// Finite-n spatial overlap fractions.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapFractions {
    /// `p_i = mu(V_i) / mu(U_i)`, the share of `U_i` around unshared points.
    pub p: Vec<Rational>,
    /// `q_i = mu(V_hat) / mu(V_hat_i)`, zero when nothing is shared.
    pub q: Vec<Rational>,
}

/// Splits each `U_i` into its part around points private to `Z_i` (`V_i`) and around
/// points shared with another maximal set (`V_hat_i`), and measures the overlap.
pub fn overlap_fractions(
    obs: &[ObservableSpec],
    tau: &FrequencyVector,
    n: u64,
    boundary: Boundary,
) -> Result<OverlapFractions> {
    let th = thresholds(obs, tau, n, boundary)?;
    let point_sets: Vec<&Vec<Rational>> = obs
        .iter()
        .map(|o| match &o.z {
            MaximalSet::FinitePoints(p) => Ok(p),
            MaximalSet::UnstableSegment { .. } => Err(Error::TypeMismatch("overlap fractions need circle observables")),
        })
        .collect::<Result<_>>()?;
    let mut v = Vec::new();
    let mut v_hat = Vec::new();
    for (i, (pts, r)) in point_sets.iter().zip(&th.radii).enumerate() {
        let (mut own, mut shared) = (IntervalSet::empty(), IntervalSet::empty());
        if let Some(r) = r {
            for z in pts.iter() {
                let is_shared = point_sets.iter().enumerate().any(|(j, other)| {
                    j != i
                        && other
                            .iter()
                            .any(|w| crate::geometry::frac(w) == crate::geometry::frac(z))
                });
                let b = IntervalSet::ball_unchecked(z, r, boundary);
                if is_shared {
                    shared = shared.union(&b);
                } else {
                    own = own.union(&b);
                }
            }
        }
        v.push(own);
        v_hat.push(shared);
    }
    let common = v_hat.iter().skip(1).fold(v_hat[0].clone(), |acc, s| acc.intersect(s));
    let mc = common.measure();
    let p = v
        .iter()
        .zip(&v_hat)
        .map(|(a, b)| {
            let total = a.measure() + b.measure();
            if total.is_zero() {
                Rational::zero()
            } else {
                a.measure() / total
            }
        })
        .collect();
    let q = v_hat
        .iter()
        .map(|b| {
            let m = b.measure();
            if m.is_zero() {
                Rational::zero()
            } else {
                &mc / m
            }
        })
        .collect();
    Ok(OverlapFractions { p, q })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::rint;

    #[test]
    fn evaluate_examples() {
        let o = ObservableSpec::log_at(vec![rat(1, 2)]).unwrap();
        let e = std::f64::consts::E;
        assert!((o.evaluate_circle(0.5 + 1.0 / e).unwrap() - 1.0).abs() < 1e-12);
        let p = ObservableSpec::new(GType::Pareto(1.0), MaximalSet::points(vec![rint(0)]).unwrap()).unwrap();
        assert!((p.evaluate_rational(&rat(1, 4)).unwrap() - 4.0).abs() < 1e-12);
        let b = ObservableSpec::new(
            GType::Bounded { d: 5.0, alpha: 1.0 },
            MaximalSet::points(vec![rat(1, 3)]).unwrap(),
        )
        .unwrap();
        assert_eq!(b.evaluate_rational(&rat(1, 3)).unwrap(), 5.0);
        assert_eq!(o.evaluate_rational(&rat(1, 2)).unwrap(), f64::INFINITY);
    }

    #[test]
    fn exceedance_examples() {
        let o = ObservableSpec::log_at(vec![rat(1, 2)]).unwrap();
        let s = o.exceedance_set(8f64.ln(), Boundary::Circle).unwrap();
        let expect = IntervalSet::ball(&rat(1, 2), &rat(1, 8)).unwrap();
        assert!((to_f64(&s.measure()) - 0.25).abs() < 1e-12);
        assert_eq!(s.num_components(), 1);
        assert!((to_f64(&s.pieces()[0].0) - to_f64(&expect.pieces()[0].0)).abs() < 1e-12);

        let two = ObservableSpec::log_at(vec![rat(1, 5), rat(3, 5)]).unwrap();
        let r = rat(1, 1000);
        let s = two.exceedance_set_for_radius(&r, Boundary::Circle).unwrap();
        assert_eq!(s.num_components(), 2);
        assert_eq!(s.measure(), rat(4, 1000));
        let tiny = two.exceedance_set(200.0, Boundary::Circle).unwrap();
        assert!(to_f64(&tiny.measure()) < 1e-80);

        let p = ObservableSpec::new(GType::Pareto(1.0), MaximalSet::points(vec![rat(1, 2)]).unwrap()).unwrap();
        assert!(matches!(
            p.exceedance_set(-1.0, Boundary::Circle),
            Err(Error::BelowInvertibleRange(_))
        ));
    }

    #[test]
    fn threshold_examples() {
        let o = ObservableSpec::log_at(vec![rat(1, 3)]).unwrap();
        let tau = FrequencyVector::new(vec![rint(1)]).unwrap();
        let th = thresholds(&[o], &tau, 100, Boundary::Circle).unwrap();
        assert_eq!(th.radii[0], Some(rat(1, 200)));
        assert!((th.levels[0] - 200f64.ln()).abs() < 1e-12);

        let p = ObservableSpec::new(GType::Pareto(1.0), MaximalSet::points(vec![rat(1, 3)]).unwrap()).unwrap();
        let th = thresholds(&[p], &tau, 100, Boundary::Circle).unwrap();
        assert!((th.levels[0] - 200.0).abs() < 1e-9);

        let a = ObservableSpec::log_at(vec![rat(1, 3)]).unwrap();
        let b = ObservableSpec::log_at(vec![rat(1, 7)]).unwrap();
        let tau = FrequencyVector::new(vec![rint(0), rint(2)]).unwrap();
        let th = thresholds(&[a, b], &tau, 10, Boundary::Circle).unwrap();
        assert_eq!(th.radii[0], None);
        assert_eq!(th.levels[0], f64::INFINITY);
    }

    #[test]
    fn threshold_inversion_handles_merging_and_boundaries() {
        let o = ObservableSpec::log_at(vec![rat(1, 10), rat(2, 10)]).unwrap();
        // gap 1/10 saturates at r = 1/20
        for (num, den) in [(1, 100), (3, 20), (1, 2), (1, 1)] {
            let m = rat(num, den);
            let r = o.radius_for_mass(&m, Boundary::Circle).unwrap();
            let s = o.exceedance_set_for_radius(&r, Boundary::Circle).unwrap();
            assert_eq!(s.measure(), m, "mass {m}");
        }
        let e = ObservableSpec::log_at(vec![rat(1, 100)]).unwrap();
        let m = rat(1, 10);
        let r = e.radius_for_mass(&m, Boundary::Interval).unwrap();
        assert_eq!(r, rat(9, 100));
        assert_eq!(
            e.exceedance_set_for_radius(&r, Boundary::Interval).unwrap().measure(),
            m
        );
        assert!(o.radius_for_mass(&rat(3, 2), Boundary::Circle).is_err());
    }

    #[test]
    fn frequency_vector_validation() {
        assert!(FrequencyVector::new(vec![rint(0), rint(0)]).is_err());
        assert!(FrequencyVector::new(vec![rint(-1), rint(2)]).is_err());
        let t = FrequencyVector::from_simplex(&[rat(1, 4)]).unwrap();
        assert_eq!(t.components(), &[rat(1, 4), rat(3, 4)]);
    }

    #[test]
    fn overlap_examples() {
        let z1 = ObservableSpec::log_at(vec![rat(1, 12), rat(1, 6)]).unwrap();
        let z2 = ObservableSpec::log_at(vec![rat(7, 12), rat(1, 6)]).unwrap();
        let tau = FrequencyVector::new(vec![rint(1), rint(1)]).unwrap();
        let f = overlap_fractions(&[z1.clone(), z2.clone()], &tau, 1 << 18, Boundary::Circle).unwrap();
        assert_eq!(f.p, vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(f.q, vec![rint(1), rint(1)]);

        let tau = FrequencyVector::new(vec![rint(1), rint(2)]).unwrap();
        let f = overlap_fractions(&[z1, z2], &tau, 1 << 18, Boundary::Circle).unwrap();
        assert_eq!(f.q[0], rint(1));
        assert_eq!(f.q[1], rat(1, 2));

        let a = ObservableSpec::log_at(vec![rat(1, 12)]).unwrap();
        let b = ObservableSpec::log_at(vec![rat(1, 10)]).unwrap();
        let f = overlap_fractions(&[a, b], &tau, 1 << 18, Boundary::Circle).unwrap();
        assert_eq!(f.q, vec![rint(0), rint(0)]);
    }
}
