//! Acceptance checks tying the exact engine, the Monte Carlo estimators and the closed-form catalog together.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dependence::{
    catalog, closed_form, validate, DependenceFunctions, Logistic, PickandsModel, ValidationConfig,
};
use crate::engine::{
    delta_prime_exact, fit_two_piece_breakpoint, gamma_hat, mc_block_maxima, mc_theta_runs, theta_exact,
    ConditionCheckConfig, RunsConfig, Status,
};
use crate::error::Result;
use crate::geometry::{rat, rint, IntervalSet, Rational};
use crate::observables::FrequencyVector;
use crate::presets::ExampleId;
use crate::report::{alpha_grid, curves_csv, pickands_csv, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Full,
    /// Skips every Monte Carlo check.
    ExactOnly,
}

/// Deliberate corruption used to confirm that checks can fail.
#[derive(Debug, Clone, PartialEq)]
pub enum Fault {
    /// Shifts the closed-form `theta` of one example at one simplex cell by `1/1000`.
    CatalogCell { example: ExampleId, alpha: Vec<Rational> },
    /// Replaces the Pickands function of one example by `alpha^2`.
    CorruptPickands(ExampleId),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub mode: Mode,
    /// Examples to exercise; checks with no selected example are skipped.
    pub examples: Vec<ExampleId>,
    pub seed: u64,
    pub block_n: u64,
    pub block_trials: u64,
    pub cat_orbit: u64,
    pub geometry_instances: usize,
    pub faults: Vec<Fault>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            mode: Mode::Full,
            examples: ExampleId::ALL.to_vec(),
            seed: 20240601,
            block_n: 5000,
            block_trials: 200_000,
            cat_orbit: 10_000_000,
            geometry_instances: 10_000,
            faults: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub number: u8,
    pub name: &'static str,
    pub outcome: Outcome,
    pub detail: String,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.outcome != Outcome::Fail
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.outcome {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Skipped => "SKIP",
        };
        write!(f, "[{tag}] {}. {}: {}", self.number, self.name, self.detail)
    }
}

/// Exact `theta` grid used for the catalog comparison: `k/20` cells, both coordinates for three components.
pub const THETA_GRID_DEN: i64 = 20;
pub const EXACT_N: u64 = 1 << 18;
pub const DELTA_N: u64 = 1 << 40;

struct Ctx<'a> {
    opts: &'a VerifyOptions,
}

impl Ctx<'_> {
    fn selected(&self, ids: &[ExampleId]) -> Vec<ExampleId> {
        ids.iter().copied().filter(|i| self.opts.examples.contains(i)).collect()
    }

    fn mc(&self) -> bool {
        self.opts.mode == Mode::Full
    }

    fn cell_fault(&self, id: ExampleId, alpha: &[Rational]) -> Rational {
        let hit =
            self.opts.faults.iter().any(
                |f| matches!(f, Fault::CatalogCell { example, alpha: a } if *example == id && a.as_slice() == alpha),
            );
        if hit {
            rat(1, 1000)
        } else {
            rint(0)
        }
    }

    fn pickands_corrupted(&self, id: ExampleId) -> bool {
        self.opts.faults.contains(&Fault::CorruptPickands(id))
    }
}

fn result(number: u8, name: &'static str, pass: bool, detail: String) -> CheckResult {
    CheckResult {
        number,
        name,
        outcome: if pass { Outcome::Pass } else { Outcome::Fail },
        detail,
    }
}

fn skipped(number: u8, name: &'static str, why: &str) -> CheckResult {
    CheckResult {
        number,
        name,
        outcome: Outcome::Skipped,
        detail: why.to_string(),
    }
}

fn error(number: u8, name: &'static str, e: crate::error::Error) -> CheckResult {
    result(number, name, false, format!("error: {e}"))
}

/// Runs every acceptance check in order.
pub fn run_all(opts: &VerifyOptions) -> Vec<CheckResult> {
    (1..=8).map(|k| run_check(k, opts)).collect()
}

pub fn run_check(number: u8, opts: &VerifyOptions) -> CheckResult {
    let ctx = Ctx { opts };
    let (name, r) = match number {
        1 => ("exact catalog agreement", check_catalog(&ctx)),
        2 => ("stable dependence formulas", check_gamma_hat(&ctx)),
        3 => ("block-maxima limit law", check_block_maxima(&ctx)),
        4 => ("cat-map extremal index", check_cat(&ctx)),
        5 => ("marginal extremal indices", check_marginals(&ctx)),
        6 => ("property suites", check_properties(&ctx)),
        7 => ("anti-clustering sums", check_delta_prime(&ctx)),
        8 => ("curve features", check_curves(&ctx)),
        _ => ("unknown", Ok(skipped(number, "unknown", "no such check"))),
    };
    match r {
        Ok(mut c) => {
            c.number = number;
            c.name = name;
            c
        }
        Err(e) => error(number, name, e),
    }
}

/// Simplex cells `(k/20)` or `(i/20, j/20)` with every coordinate positive.
pub fn theta_cells(dim: usize) -> Vec<Vec<Rational>> {
    let d = THETA_GRID_DEN;
    if dim == 2 {
        (1..d).map(|k| vec![rat(k, d)]).collect()
    } else {
        (1..d)
            .flat_map(|i| (1..d - i).map(move |j| vec![rat(i, d), rat(j, d)]))
            .collect()
    }
}

fn check_catalog(ctx: &Ctx) -> Result<CheckResult> {
    let ids = ctx.selected(&ExampleId::ALL.into_iter().filter(|e| e.is_circle()).collect::<Vec<_>>());
    if ids.is_empty() {
        return Ok(skipped(1, "", "no circle example selected"));
    }
    let mut cells = 0;
    let mut bad = Vec::new();
    for id in &ids {
        let sys = id.system();
        for alpha in theta_cells(id.dim()) {
            let tau = FrequencyVector::from_simplex(&alpha)?;
            let got = theta_exact(&sys, &tau, EXACT_N, id.preset_q())?;
            let want = catalog::theta_on_simplex(*id, tau.components())? + ctx.cell_fault(*id, &alpha);
            cells += 1;
            if got.exact.as_ref() != Some(&want) {
                let shown: Vec<String> = alpha.iter().map(|a| a.to_string()).collect();
                bad.push(format!(
                    "{id} alpha=({}) engine={} formula={want}",
                    shown.join(","),
                    got.exact.map(|x| x.to_string()).unwrap_or_else(|| "none".into())
                ));
            }
        }
    }
    let detail = if bad.is_empty() {
        format!("{cells} cells over {} examples equal as rationals at n=2^18", ids.len())
    } else {
        format!("{} of {cells} cells differ: {}", bad.len(), bad.join("; "))
    };
    Ok(result(1, "", bad.is_empty(), detail))
}

fn check_gamma_hat(ctx: &Ctx) -> Result<CheckResult> {
    let ids = ctx.selected(&[
        ExampleId::CommonPoint,
        ExampleId::DisjointPoints,
        ExampleId::OverlapNonPeriodic,
        ExampleId::OverlapPeriodic,
    ]);
    if ids.is_empty() {
        return Ok(skipped(2, "", "no example with a stated hat Gamma selected"));
    }
    let values = [rat(1, 4), rat(1, 2), rint(1), rat(3, 2), rint(2), rint(3)];
    let mut bad = Vec::new();
    let mut count = 0;
    for id in &ids {
        let sys = id.system();
        for a in &values {
            for b in &values {
                let expect = match id {
                    ExampleId::CommonPoint => a.max(b).clone(),
                    ExampleId::DisjointPoints => a + b,
                    _ => a + b - a.min(b) / rint(2),
                };
                let tau = FrequencyVector::new(vec![a.clone(), b.clone()])?;
                let got = gamma_hat(&sys, &tau, EXACT_N)?;
                count += 1;
                if got.exact.as_ref() != Some(&expect) {
                    bad.push(format!("{id} tau=({a},{b}) engine={:?} formula={expect}", got.exact));
                }
            }
        }
    }
    let detail = if bad.is_empty() {
        format!("{count} tau points exact at n=2^18")
    } else {
        bad.join("; ")
    };
    Ok(result(2, "", bad.is_empty(), detail))
}

fn check_block_maxima(ctx: &Ctx) -> Result<CheckResult> {
    if !ctx.mc() {
        return Ok(skipped(3, "", "exact-only mode"));
    }
    let ids = ctx.selected(&[
        ExampleId::DisjointPoints,
        ExampleId::LinkedPeriodic,
        ExampleId::OverlapNonPeriodic,
    ]);
    if ids.is_empty() {
        return Ok(skipped(3, "", "no example selected"));
    }
    let tau = FrequencyVector::new(vec![rint(1), rint(1)])?;
    let mut pass = true;
    let mut parts = Vec::new();
    for (k, id) in ids.iter().enumerate() {
        let cf = closed_form(*id);
        let target = cf.g(&[1.0, 1.0]);
        let est = mc_block_maxima(
            &id.system(),
            &tau,
            ctx.opts.block_n,
            ctx.opts.block_trials,
            ctx.opts.seed + k as u64,
        )?;
        let ok = est.within(target, 3.0, 0.01);
        pass &= ok;
        parts.push(format!(
            "{id}: {:.5} +- {:.5} vs {:.5}{}",
            est.value,
            est.stderr,
            target,
            if ok { "" } else { " OUTSIDE" }
        ));
    }
    Ok(result(3, "", pass, parts.join("; ")))
}

/// Simplex points used for the cat-map runs estimates and breakpoint fit.
pub fn cat_alpha_grid() -> Vec<f64> {
    (6..=19).map(|k| k as f64 * 0.05).collect()
}

fn check_cat(ctx: &Ctx) -> Result<CheckResult> {
    if !ctx.mc() {
        return Ok(skipped(4, "", "exact-only mode"));
    }
    if ctx.selected(&[ExampleId::CatMap]).is_empty() {
        return Ok(skipped(4, "", "cat map not selected"));
    }
    let id = ExampleId::CatMap;
    let sys = id.system();
    let n = id.torus_n().expect("torus example");
    let cf = closed_form(id);
    let xs = cat_alpha_grid();
    let mut ys = Vec::new();
    let mut pass = true;
    let mut parts = Vec::new();
    for (k, &a) in xs.iter().enumerate() {
        let tau = FrequencyVector::from_f64(&[a, 1.0 - a])?;
        let est = mc_theta_runs(
            &sys,
            &tau,
            n,
            id.preset_q(),
            RunsConfig::new(ctx.opts.cat_orbit),
            ctx.opts.seed + 100 + k as u64,
        )?;
        ys.push(est.value);
        if [0.3, 0.5, 0.9].iter().any(|x| (x - a).abs() < 1e-9) {
            let target = cf.theta(&[a, 1.0 - a]);
            let ok = est.within(target, 3.0, 0.01);
            pass &= ok;
            parts.push(format!(
                "alpha={a:.2}: {:.4} +- {:.4} vs {target:.4}",
                est.value, est.stderr
            ));
        }
    }
    let b = fit_two_piece_breakpoint(&xs, &ys)?;
    let in_range = b.x > 0.70 && b.x < 0.82;
    pass &= in_range;
    parts.push(format!(
        "fitted breakpoint {:.4} (formula {:.4})",
        b.x,
        catalog::cat_turning_point()
    ));
    Ok(result(4, "", pass, parts.join("; ")))
}

fn check_marginals(ctx: &Ctx) -> Result<CheckResult> {
    let exact_ids = ctx.selected(&[
        ExampleId::LinkedNonPeriodic,
        ExampleId::LinkedPeriodic,
        ExampleId::LinkedPeriodic2,
        ExampleId::OverlapPeriodic,
    ]);
    let mut pass = true;
    let mut parts = Vec::new();
    for id in &exact_ids {
        let sys = id.system();
        let want = catalog::marginals::<Rational>(*id)?;
        let mut got = Vec::new();
        for j in 0..2 {
            let mut t = vec![rint(0), rint(0)];
            t[j] = rint(1);
            let th = theta_exact(&sys, &FrequencyVector::new(t)?, EXACT_N, id.preset_q())?;
            got.push(th.exact.unwrap_or_default());
        }
        let ok = got == want;
        pass &= ok;
        parts.push(format!(
            "{id}: ({}, {}){}",
            got[0],
            got[1],
            if ok { "" } else { " MISMATCH" }
        ));
    }
    let cat = !ctx.selected(&[ExampleId::CatMap]).is_empty();
    if cat && ctx.mc() {
        let id = ExampleId::CatMap;
        let sys = id.system();
        let want = catalog::marginals::<f64>(id)?;
        for j in 0..2 {
            let mut t = vec![rint(0), rint(0)];
            t[j] = rint(1);
            let est = mc_theta_runs(
                &sys,
                &FrequencyVector::new(t)?,
                id.torus_n().expect("torus example"),
                id.preset_q(),
                RunsConfig::new(ctx.opts.cat_orbit),
                ctx.opts.seed + 200 + j as u64,
            )?;
            let ok = est.within(want[j], 3.0, 1e-12);
            pass &= ok;
            parts.push(format!(
                "{id} theta_{}: {:.4} +- {:.4} vs {:.4}",
                j + 1,
                est.value,
                est.stderr,
                want[j]
            ));
        }
    } else if cat {
        parts.push("cat map skipped in exact-only mode".into());
    }
    if exact_ids.is_empty() && !(cat && ctx.mc()) {
        return Ok(skipped(5, "", "no example selected"));
    }
    Ok(result(5, "", pass, parts.join("; ")))
}

/// Random unions of arcs with endpoints on `1/12` for the set-algebra identities.
fn random_set(rng: &mut ChaCha8Rng) -> IntervalSet {
    let k = rng.random_range(0..4);
    (0..k).fold(IntervalSet::empty(), |acc, _| {
        let a = rng.random_range(0..12);
        let len = rng.random_range(1..12);
        acc.union(&IntervalSet::arc(&rat(a, 12), &rat(a + len, 12)))
    })
}

/// Additivity and De Morgan on `count` random instances; returns the failures.
pub fn geometry_properties(count: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = Vec::new();
    for i in 0..count {
        let (a, b) = (random_set(&mut rng), random_set(&mut rng));
        let additive = a.union(&b).measure() + a.intersect(&b).measure() == a.measure() + b.measure();
        let morgan_u = a.union(&b).complement() == a.complement().intersect(&b.complement());
        let morgan_i = a.intersect(&b).complement() == a.complement().union(&b.complement());
        let diff = a.difference(&b).measure() == a.measure() - a.intersect(&b).measure();
        if !(additive && morgan_u && morgan_i && diff) {
            bad.push(format!("instance {i}: {:?} / {:?}", a.pieces(), b.pieces()));
        }
    }
    bad
}

fn check_properties(ctx: &Ctx) -> Result<CheckResult> {
    let cfg = ValidationConfig::default();
    let mut failures = Vec::new();
    let mut models = 0;
    for id in ctx.selected(&ExampleId::ALL) {
        let rep = if ctx.pickands_corrupted(id) {
            validate(&PickandsModel::new(format!("{id} (corrupted)"), |a: f64| a * a), &cfg)
        } else {
            validate(&closed_form(id), &cfg)
        };
        models += 1;
        if !rep.passed() {
            let first = rep.violations.first().map(|v| v.to_string()).unwrap_or_default();
            failures.push(format!("{}: {:?} (first: {first})", rep.model, rep.failed_checks()));
        }
    }
    for b in 1..=9 {
        let rep = validate(&Logistic::new(b as f64 / 10.0)?, &cfg);
        models += 1;
        if !rep.passed() {
            failures.push(format!("{}: {:?}", rep.model, rep.failed_checks()));
        }
    }
    let geo = geometry_properties(ctx.opts.geometry_instances, ctx.opts.seed);
    if !geo.is_empty() {
        failures.push(format!("{} geometry instances fail, e.g. {}", geo.len(), geo[0]));
    }
    let detail = if failures.is_empty() {
        format!(
            "{models} models pass on a 0.01 grid; {} set-algebra instances pass",
            ctx.opts.geometry_instances
        )
    } else {
        failures.join("; ")
    };
    Ok(result(6, "", failures.is_empty(), detail))
}

fn delta_taus(id: ExampleId) -> Vec<Vec<Rational>> {
    if id.dim() == 3 {
        vec![
            vec![rat(1, 3), rat(1, 3), rat(1, 3)],
            vec![rat(1, 2), rat(1, 4), rat(1, 4)],
        ]
    } else {
        vec![vec![rat(1, 2), rat(1, 2)], vec![rat(4, 5), rat(1, 5)]]
    }
}

fn check_delta_prime(ctx: &Ctx) -> Result<CheckResult> {
    let cfg = ConditionCheckConfig::for_n(DELTA_N);
    let mut pass = true;
    let mut parts = Vec::new();
    let mut any = false;
    let delta = |id: ExampleId, tau: &[Rational], q: usize| -> Result<(Option<Rational>, Status)> {
        let d = delta_prime_exact(&id.system(), &FrequencyVector::new(tau.to_vec())?, DELTA_N, q, &cfg)?;
        Ok((d.estimate.exact.clone(), d.estimate.status))
    };
    if !ctx.selected(&[ExampleId::DisjointPoints]).is_empty() {
        any = true;
        let (v, st) = delta(ExampleId::DisjointPoints, &[rint(1), rint(1)], 0)?;
        let ok = st == Status::Ok && v == Some(rint(0));
        pass &= ok;
        parts.push(format!("{}: q=0 -> {}", ExampleId::DisjointPoints, show(&v, st)));
    }
    let linked = ctx.selected(&[
        ExampleId::LinkedNonPeriodic,
        ExampleId::LinkedPeriodic,
        ExampleId::LinkedPeriodic2,
        ExampleId::OverlapNonPeriodic,
        ExampleId::Trivariate,
        ExampleId::OverlapPeriodic,
    ]);
    for id in linked {
        any = true;
        let q = id.stabilizing_q();
        let mut at_q = Vec::new();
        let mut below = Vec::new();
        let mut positive_below = false;
        for tau in delta_taus(id) {
            let (v, st) = delta(id, &tau, q)?;
            pass &= st == Status::Ok && v == Some(rint(0));
            at_q.push(show(&v, st));
            if q > 0 {
                let (w, st) = delta(id, &tau, q - 1)?;
                positive_below |= st == Status::Ok && w.as_ref().is_some_and(|w| *w > rint(0));
                below.push(show(&w, st));
            }
        }
        let periodic = matches!(
            id,
            ExampleId::LinkedPeriodic | ExampleId::LinkedPeriodic2 | ExampleId::OverlapPeriodic
        );
        if periodic {
            pass &= positive_below;
        }
        parts.push(format!(
            "{id}: q={q} -> [{}], q={} -> [{}]",
            at_q.join(", "),
            q.saturating_sub(1),
            below.join(", ")
        ));
    }
    if !any {
        return Ok(skipped(7, "", "no example selected"));
    }
    Ok(result(7, "", pass, parts.join("; ")))
}

fn show(v: &Option<Rational>, st: Status) -> String {
    match (v, st) {
        (Some(x), Status::Ok) => x.to_string(),
        (_, st) => st.to_string(),
    }
}

/// Grid intervals containing a change of slope.
///
/// A kink on a grid point changes one slope pair and lies in `[x_{k-1}, x_{k+1}]`;
/// a kink strictly between `x_k` and `x_{k+1}` changes two consecutive pairs.
pub fn kinks(xs: &[f64], ys: &[f64]) -> Vec<(f64, f64)> {
    let slopes: Vec<f64> = xs
        .windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
        .collect();
    let changed: Vec<usize> = (1..slopes.len())
        .filter(|&k| (slopes[k] - slopes[k - 1]).abs() > 1e-6)
        .collect();
    let mut runs: Vec<(usize, usize)> = Vec::new();
    for k in changed {
        match runs.last_mut() {
            Some(r) if r.1 + 1 == k => r.1 = k,
            _ => runs.push((k, k)),
        }
    }
    runs.into_iter()
        .map(|(a, b)| match b - a {
            0 => (xs[a - 1], xs[a + 1]),
            1 => (xs[a], xs[b]),
            _ => (xs[a - 1], xs[b + 1]),
        })
        .collect()
}

fn kinks_at(xs: &[f64], ys: &[f64], expected: &[f64]) -> bool {
    let k = kinks(xs, ys);
    k.len() == expected.len() && k.iter().zip(expected).all(|((lo, hi), e)| lo <= e && e <= hi)
}

/// `y = value` exactly on `(lo, hi]` and nowhere else, except at `lo` where continuity allows it.
fn plateau(xs: &[f64], ys: &[f64], lo: f64, hi: f64, value: f64) -> bool {
    xs.iter().zip(ys).all(|(x, y)| {
        let on = (y - value).abs() < 1e-12;
        if *x > lo + 1e-12 && *x <= hi + 1e-12 {
            on
        } else {
            !on || (x - lo).abs() < 1e-12
        }
    })
}

fn curve(id: ExampleId, ctx: &Ctx) -> Result<Table> {
    let text = curves_csv(id, &alpha_grid(0.01)?)?;
    let mut t = Table::parse(&text)?;
    if ctx.pickands_corrupted(id) {
        let alpha = t.numeric("alpha")?;
        let di = t.header.iter().position(|h| h == "D").expect("curves have D");
        for (row, a) in t.rows.iter_mut().zip(alpha) {
            row[di] = (a * a).to_string();
        }
    }
    Ok(t)
}

fn check_curves(ctx: &Ctx) -> Result<CheckResult> {
    let mut pass = true;
    let mut parts = Vec::new();
    let mut record = |label: &str, ok: bool| {
        pass &= ok;
        parts.push(format!("{label}: {}", if ok { "ok" } else { "FAILED" }));
    };
    let sel = |id| ctx.opts.examples.contains(&id);

    if sel(ExampleId::LinkedNonPeriodic) {
        let t = curve(ExampleId::LinkedNonPeriodic, ctx)?;
        let (x, d) = (t.numeric("alpha")?, t.numeric("D")?);
        record("linked non-periodic D kink at 1/3", kinks_at(&x, &d, &[1.0 / 3.0]));
    }
    if sel(ExampleId::LinkedPeriodic) {
        let t = curve(ExampleId::LinkedPeriodic, ctx)?;
        let (x, d) = (t.numeric("alpha")?, t.numeric("D")?);
        record(
            "linked periodic D kinks at 1/3, 2/3",
            kinks_at(&x, &d, &[1.0 / 3.0, 2.0 / 3.0]),
        );
        record(
            "linked periodic D plateau 2/3",
            plateau(&x, &d, 1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0),
        );
    }
    if sel(ExampleId::OverlapPeriodic) {
        let t = curve(ExampleId::OverlapPeriodic, ctx)?;
        let (x, d, th) = (t.numeric("alpha")?, t.numeric("D")?, t.numeric("theta")?);
        record(
            "overlap periodic D plateau 3/4 on (1/4, 3/4]",
            plateau(&x, &d, 0.25, 0.75, 0.75),
        );
        record("overlap periodic D kinks at 1/4, 3/4", kinks_at(&x, &d, &[0.25, 0.75]));
        let mid = x.iter().position(|a| (a - 0.5).abs() < 1e-12).expect("grid has 1/2");
        record("overlap periodic theta(1/2) = 2/3", (th[mid] - 2.0 / 3.0).abs() < 1e-12);
    }
    if sel(ExampleId::Trivariate) {
        let t = curve(ExampleId::Trivariate, ctx)?;
        let (a, b, d) = (t.numeric("alpha")?, t.numeric("beta")?, t.numeric("D")?);
        let bounds = a.iter().zip(&b).zip(&d).all(|((a, b), d)| {
            let lo = a.max(*b).max(1.0 - a - b);
            *d >= lo - 1e-12 && *d <= 1.0 + 1e-12
        });
        record("trivariate D within bounds", bounds);
        let (imin, dmin) = d
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |m, (i, v)| if *v < m.1 { (i, *v) } else { m });
        record(
            "trivariate D minimum 1/2 at (1/4, 1/4)",
            (dmin - 0.5).abs() < 1e-12 && (a[imin] - 0.25).abs() < 1e-12 && (b[imin] - 0.25).abs() < 1e-12,
        );
    }
    if sel(ExampleId::CatMap) {
        let t = curve(ExampleId::CatMap, ctx)?;
        let (x, d, th) = (t.numeric("alpha")?, t.numeric("D")?, t.numeric("theta")?);
        record("cat D kink at 2/3", kinks_at(&x, &d, &[2.0 / 3.0]));
        record(
            "cat D(0) = D(1) = 1",
            (d[0] - 1.0).abs() < 1e-12 && (d[d.len() - 1] - 1.0).abs() < 1e-12,
        );
        record(
            "cat theta kink at turning point",
            kinks_at(&x, &th, &[catalog::cat_turning_point()]),
        );
    }
    let models: Vec<Logistic> = (1..=9).map(|b| Logistic::new(b as f64 / 10.0)).collect::<Result<_>>()?;
    let refs: Vec<&dyn DependenceFunctions> = models.iter().map(|m| m as &dyn DependenceFunctions).collect();
    let t = Table::parse(&pickands_csv(&refs, &alpha_grid(0.01)?)?)?;
    let (names, x, d) = (t.column("model")?, t.numeric("alpha")?, t.numeric("D")?);
    let per = x.len() / models.len();
    let monotone = (0..per).all(|i| (1..models.len()).all(|m| d[m * per + i] >= d[(m - 1) * per + i] - 1e-12))
        && names
            .chunks(per)
            .enumerate()
            .all(|(m, c)| c.iter().all(|n| *n == models[m].name()));
    let bounded = x
        .iter()
        .zip(&d)
        .all(|(a, v)| *v >= a.max(1.0 - a) - 1e-12 && *v <= 1.0 + 1e-12);
    record("logistic D increasing in beta", monotone);
    record("logistic D within bounds", bounded);
    Ok(result(8, "", pass, parts.join("; ")))
}
