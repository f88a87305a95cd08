use std::io::Write;
use std::path::PathBuf;

use dynex_core::engine::{
    aq_set, delta_prime_exact, delta_prime_mc, g_value, gamma_hat, mc_block_maxima, mc_theta_runs, theta_limit,
    ConditionCheckConfig, RunsConfig, DEFAULT_N_SCHEDULE, DEFAULT_Q_MAX,
};
use dynex_core::presets::CAT_N;
use dynex_core::report::{alpha_grid, curves_csv, estimates_csv, pickands_csv, EstimateRow};
use dynex_core::verify::{run_all, Fault, Mode, VerifyOptions};
use dynex_core::{
    observables::overlap_fractions, rat, ClosedForm, DependenceFunctions, Error, EstimateResult, ExampleId,
    FrequencyVector, Logistic, MaximalSet, Rational, Status, System,
};
use rayon::prelude::*;

use crate::config::{self, parse_count, ExperimentConfig};
use crate::{CliError, Common, VerifyArgs};

const DEFAULT_ALPHA_STEP: f64 = 0.01;
const DEFAULT_MC_N: u64 = 5000;
const DEFAULT_TRIALS: u64 = 200_000;
const DEFAULT_DELTA_TRIALS: u64 = 100_000;
const DEFAULT_ORBIT: u64 = 10_000_000;
const DEFAULT_DELTA_N: u64 = 1 << 40;

fn config_error(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

/// Config file first, then command-line flags on top.
fn experiment(c: &Common) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &c.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(ex) = &c.example {
        if cfg.map.is_some() {
            return Err(config_error(
                "--example conflicts with the custom system in the config file",
            ));
        }
        cfg.example = Some(ex.parse().map_err(config_error)?);
    }
    if !c.tau.is_empty() {
        cfg.taus = Some(
            c.tau
                .iter()
                .filter(|t| !t.trim().is_empty())
                .map(|t| config::parse_rationals(t))
                .collect::<Result<_, _>>()
                .map_err(config_error)?,
        );
    }
    if c.alpha_grid.is_some() {
        cfg.alpha_step = c.alpha_grid;
    }
    if let Some(s) = &c.n_schedule {
        cfg.n_schedule = Some(config::parse_u64_list(s).map_err(config_error)?);
    }
    if c.q_max.is_some() {
        cfg.q_max = c.q_max;
    }
    if let Some(t) = &c.trials {
        cfg.trials = Some(parse_count(t).map_err(config_error)?);
    }
    if let Some(o) = &c.orbit {
        cfg.orbit = Some(parse_count(o).map_err(config_error)?);
    }
    if c.seed.is_some() {
        cfg.seed = c.seed;
    }
    if let Some(b) = &c.budget {
        cfg.budget = Some(parse_count(b).map_err(config_error)?);
    }
    if let Some(b) = &c.boundary {
        cfg.boundary = b.parse().map_err(config_error)?;
    }
    if c.mode.is_some() {
        cfg.mode = c.mode.clone();
    }
    if let Some(ns) = &cfg.n_schedule {
        if ns.is_empty() || ns.contains(&0) || ns.windows(2).any(|w| w[0] >= w[1]) {
            return Err(config_error("n-schedule must be positive and strictly increasing"));
        }
    }
    Ok(cfg)
}

/// Explicit `tau` vectors plus interior simplex points of the alpha grid.
/// Without either, the single vector of ones.
fn tau_grid(cfg: &ExperimentConfig, dim: usize) -> Result<Vec<FrequencyVector>, CliError> {
    let mut out = Vec::new();
    for t in cfg.taus.iter().flatten() {
        if t.len() != dim {
            return Err(config_error(format!(
                "tau has {} components, system has {dim}",
                t.len()
            )));
        }
        out.push(FrequencyVector::new(t.clone()).map_err(config_error)?);
    }
    if let Some(step) = cfg.alpha_step {
        let grid = alpha_grid(step).map_err(config_error)?;
        let inner = &grid[1..grid.len() - 1];
        let one = rat(1, 1);
        match dim {
            2 => {
                for a in inner {
                    out.push(FrequencyVector::from_simplex(std::slice::from_ref(a))?);
                }
            }
            3 => {
                for a in inner {
                    for b in inner.iter().filter(|b| a + *b < one) {
                        out.push(FrequencyVector::from_simplex(&[a.clone(), b.clone()])?);
                    }
                }
            }
            _ => return Err(config_error("alpha grids need two or three components")),
        }
    }
    if cfg.taus.is_none() && cfg.alpha_step.is_none() {
        out.push(FrequencyVector::new(vec![rat(1, 1); dim])?);
    }
    Ok(out)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())?;
            so.flush()?;
        }
    }
    Ok(())
}

/// Turns recoverable engine errors into a marked row.
fn marked(r: dynex_core::Result<EstimateResult>, n: u64, q: usize) -> Result<EstimateResult, CliError> {
    let status = match r {
        Ok(e) => return Ok(e),
        Err(Error::BudgetExceeded { .. }) => Status::BudgetExceeded,
        Err(Error::InfeasibleThreshold { .. }) => Status::Infeasible,
        Err(Error::Undefined(_)) | Err(Error::DegenerateBall { .. }) => Status::Undefined,
        Err(e) => return Err(e.into()),
    };
    let mut e = EstimateResult::approx(f64::NAN, f64::NAN, n, q);
    e.status = status;
    Ok(e)
}

struct Rows<'a> {
    label: &'a str,
    tau: &'a FrequencyVector,
    rows: Vec<EstimateRow>,
}

impl Rows<'_> {
    fn push(&mut self, quantity: &str, estimate: EstimateResult) {
        self.rows.push(EstimateRow {
            example: self.label.to_string(),
            tau: self.tau.components().to_vec(),
            quantity: quantity.to_string(),
            estimate,
        });
    }
}

fn require_circle(sys: &System, what: &str) -> Result<(), CliError> {
    if sys.is_circle() {
        Ok(())
    } else {
        Err(config_error(format!(
            "{what} needs a circle map; use the Monte Carlo mode"
        )))
    }
}

pub fn closed_form(c: &Common) -> Result<(), CliError> {
    let cfg = experiment(c)?;
    let id = cfg.example.ok_or_else(|| config_error("closed-form needs --example"))?;
    let grid = alpha_grid(cfg.alpha_step.unwrap_or(DEFAULT_ALPHA_STEP)).map_err(config_error)?;
    emit(&c.out, &curves_csv(id, &grid)?)
}

fn shares(a: &MaximalSet, b: &MaximalSet) -> bool {
    match (a, b) {
        (MaximalSet::FinitePoints(p), MaximalSet::FinitePoints(q)) => p.iter().any(|x| q.contains(x)),
        _ => false,
    }
}

fn exact_rows(
    sys: &System,
    label: &str,
    tau: &FrequencyVector,
    ns: &[u64],
    qs: &[usize],
    cfg: &ExperimentConfig,
) -> Result<Vec<EstimateRow>, CliError> {
    let mut r = Rows {
        label,
        tau,
        rows: Vec::new(),
    };
    for &n in ns {
        r.push("gamma_hat", marked(gamma_hat(sys, tau, n), n, 0)?);
    }
    // shared-point fractions, reported per n so their drift is visible
    let obs = &sys.observables;
    let shared = (0..obs.len()).any(|i| (i + 1..obs.len()).any(|j| shares(&obs[i].z, &obs[j].z)));
    if shared {
        for &n in ns {
            if let Ok(f) = overlap_fractions(&sys.observables, tau, n, sys.boundary) {
                for (i, q) in f.q.iter().enumerate() {
                    r.push(&format!("overlap_q{}", i + 1), EstimateResult::exact(q.clone(), n, 0));
                }
            }
        }
    }
    for &n in ns {
        for &q in qs {
            if let Ok(a) = aq_set(sys, tau, n, q) {
                let k = Rational::from_integer(a.components().into());
                r.push("aq_components", EstimateResult::exact(k, n, q));
            }
        }
    }
    let n_last = *ns.last().expect("non-empty schedule");
    match theta_limit(sys, tau, qs, ns) {
        Ok(lim) => {
            for cell in &lim.cells {
                let mut e = match &cell.value {
                    Some(v) => EstimateResult::exact(v.clone(), cell.n, cell.q),
                    None => EstimateResult::approx(f64::NAN, f64::NAN, cell.n, cell.q),
                };
                e.status = cell.status;
                r.push("theta_exact", e);
            }
            if let Some(n0) = lim.n0 {
                r.push(
                    "theta_n0",
                    EstimateResult::exact(Rational::from_integer(n0.into()), n_last, lim.estimate.q),
                );
            }
            r.push("theta_limit", lim.estimate);
        }
        Err(e) => r.push("theta_limit", marked(Err(e), n_last, 0)?),
    }
    for &n in ns {
        let dc = condition_config(cfg, n);
        for &q in qs {
            let e = delta_prime_exact(sys, tau, n, q, &dc).map(|d| d.estimate);
            r.push("delta_prime", marked(e, n, q)?);
        }
    }
    Ok(r.rows)
}

pub fn exact(c: &Common) -> Result<(), CliError> {
    let cfg = experiment(c)?;
    let sys = cfg.system()?;
    require_circle(&sys, "exact")?;
    let taus = tau_grid(&cfg, sys.dim())?;
    let ns = cfg.n_schedule.clone().unwrap_or_else(|| DEFAULT_N_SCHEDULE.to_vec());
    let qs: Vec<usize> = (0..=cfg.q_max.unwrap_or(DEFAULT_Q_MAX)).collect();
    let label = cfg.label();
    let rows: Vec<Vec<EstimateRow>> = taus
        .par_iter()
        .map(|t| exact_rows(&sys, &label, t, &ns, &qs, &cfg))
        .collect::<Result<_, _>>()?;
    emit(&c.out, &estimates_csv(sys.dim(), &rows.concat()))
}

fn condition_config(cfg: &ExperimentConfig, n: u64) -> ConditionCheckConfig {
    let mut c = ConditionCheckConfig::for_n(n);
    if let Some(b) = cfg.budget {
        c.budget = b.into();
    }
    c
}

fn require_seed(cfg: &ExperimentConfig) -> Result<u64, CliError> {
    cfg.seed
        .ok_or_else(|| config_error("a seed is required for Monte Carlo runs"))
}

fn default_q(cfg: &ExperimentConfig) -> usize {
    cfg.q_max.unwrap_or_else(|| cfg.example.map_or(1, |id| id.preset_q()))
}

pub fn mc(c: &Common) -> Result<(), CliError> {
    let cfg = experiment(c)?;
    let seed = require_seed(&cfg)?;
    let sys = cfg.system()?;
    let taus = tau_grid(&cfg, sys.dim())?;
    let default_n = if sys.is_circle() { DEFAULT_MC_N } else { CAT_N };
    let ns = cfg.n_schedule.clone().unwrap_or_else(|| vec![default_n]);
    let q = default_q(&cfg);
    let trials = cfg.trials.unwrap_or(DEFAULT_TRIALS);
    let orbit = cfg.orbit.unwrap_or(DEFAULT_ORBIT);
    let label = cfg.label();
    let mut rows = Vec::new();
    for tau in &taus {
        let mut r = Rows {
            label: &label,
            tau,
            rows: Vec::new(),
        };
        for &n in &ns {
            let gh = marked(gamma_hat(&sys, tau, n), n, 0)?;
            let bm = marked(mc_block_maxima(&sys, tau, n, trials, seed), n, 0)?;
            let runs = marked(mc_theta_runs(&sys, tau, n, q, RunsConfig::new(orbit), seed), n, q)?;
            r.push("g_runs", g_value(&runs, &gh));
            r.push("gamma_hat", gh);
            r.push("block_maxima", bm);
            r.push("theta_runs", runs);
        }
        rows.extend(r.rows);
    }
    emit(&c.out, &estimates_csv(sys.dim(), &rows))
}

pub fn delta_prime(c: &Common) -> Result<(), CliError> {
    let cfg = experiment(c)?;
    let sys = cfg.system()?;
    let mode = cfg
        .mode
        .as_deref()
        .unwrap_or(if sys.is_circle() { "exact" } else { "mc" });
    let (use_exact, use_mc) = match mode {
        "exact" => (true, false),
        "mc" => (false, true),
        "both" => (true, true),
        m => return Err(config_error(format!("unknown mode '{m}'"))),
    };
    if use_exact {
        require_circle(&sys, "exact delta-prime")?;
    }
    let seed = if use_mc { Some(require_seed(&cfg)?) } else { None };
    let taus = tau_grid(&cfg, sys.dim())?;
    let ns = cfg.n_schedule.clone().unwrap_or_else(|| vec![DEFAULT_DELTA_N]);
    let qs: Vec<usize> = (0..=default_q(&cfg)).collect();
    let trials = cfg.trials.unwrap_or(DEFAULT_DELTA_TRIALS);
    let label = cfg.label();
    let mut rows = Vec::new();
    let mut truncated = Vec::new();
    for tau in &taus {
        let mut r = Rows {
            label: &label,
            tau,
            rows: Vec::new(),
        };
        for &n in &ns {
            let dc = condition_config(&cfg, n);
            for &q in &qs {
                if use_exact {
                    let e = marked(delta_prime_exact(&sys, tau, n, q, &dc).map(|d| d.estimate), n, q)?;
                    if e.status == Status::BudgetExceeded {
                        truncated.push(format!("tau={:?} n={n} q={q}", tau.to_f64()));
                    }
                    r.push("delta_prime", e);
                }
                if let Some(seed) = seed {
                    r.push(
                        "delta_prime_mc",
                        marked(delta_prime_mc(&sys, tau, n, q, &dc, trials, seed), n, q)?,
                    );
                }
            }
        }
        rows.extend(r.rows);
    }
    emit(&c.out, &estimates_csv(sys.dim(), &rows))?;
    if mode == "exact" && !truncated.is_empty() {
        return Err(CliError::Budget(truncated.join("; ")));
    }
    Ok(())
}

fn parse_examples(s: Option<&str>) -> Result<Vec<ExampleId>, CliError> {
    match s.map(str::trim) {
        None | Some("all") => Ok(ExampleId::ALL.to_vec()),
        Some(list) => list.split(',').map(|e| e.parse().map_err(config_error)).collect(),
    }
}

fn parse_fault(s: &str) -> Result<Fault, CliError> {
    let parts: Vec<&str> = s.splitn(3, ':').collect();
    match parts.as_slice() {
        ["cell", ex, alpha] => Ok(Fault::CatalogCell {
            example: ex.parse().map_err(config_error)?,
            alpha: config::parse_rationals(alpha).map_err(config_error)?,
        }),
        ["pickands", ex] => Ok(Fault::CorruptPickands(ex.parse().map_err(config_error)?)),
        _ => Err(config_error(format!(
            "bad fault '{s}'; use cell:EXAMPLE:a[,b] or pickands:EXAMPLE"
        ))),
    }
}

pub fn verify(v: &VerifyArgs) -> Result<(), CliError> {
    let c = &v.common;
    if c.config.is_some() {
        return Err(config_error("verify takes flags only"));
    }
    let mut opts = VerifyOptions {
        mode: match c.mode.as_deref() {
            None | Some("mc") | Some("both") => Mode::Full,
            Some("exact") | Some("exact-only") => Mode::ExactOnly,
            Some(m) => return Err(config_error(format!("unknown mode '{m}'"))),
        },
        examples: parse_examples(c.example.as_deref())?,
        faults: v.fault.iter().map(|f| parse_fault(f)).collect::<Result<_, _>>()?,
        ..VerifyOptions::default()
    };
    if let Some(s) = c.seed {
        opts.seed = s;
    }
    if let Some(t) = &c.trials {
        opts.block_trials = parse_count(t).map_err(config_error)?;
    }
    if let Some(o) = &c.orbit {
        opts.cat_orbit = parse_count(o).map_err(config_error)?;
    }
    let results = run_all(&opts);
    let mut text: String = results.iter().map(|r| format!("{r}\n")).collect();
    let failed = results.iter().filter(|r| !r.passed()).count();
    text.push_str(&format!("{} of {} checks failed\n", failed, results.len()));
    emit(&c.out, &text)?;
    if failed > 0 {
        return Err(CliError::Verification);
    }
    Ok(())
}

pub fn pickands_table(c: &Common) -> Result<(), CliError> {
    let cfg = experiment(&Common {
        example: None,
        ..c.clone()
    })?;
    let grid = alpha_grid(cfg.alpha_step.unwrap_or(DEFAULT_ALPHA_STEP)).map_err(config_error)?;
    let presets: Vec<ClosedForm> = match &c.example {
        Some(list) => parse_examples(Some(list))?,
        None => ExampleId::ALL.to_vec(),
    }
    .into_iter()
    .filter(|id| id.dim() == 2)
    .map(ClosedForm)
    .collect();
    let logistic: Vec<Logistic> = if c.example.is_some() {
        Vec::new()
    } else {
        [0.25, 0.5, 0.75, 1.0]
            .iter()
            .map(|&b| Logistic::new(b))
            .collect::<Result<_, _>>()?
    };
    let models: Vec<&dyn DependenceFunctions> = logistic
        .iter()
        .map(|m| m as &dyn DependenceFunctions)
        .chain(presets.iter().map(|m| m as &dyn DependenceFunctions))
        .collect();
    if models.is_empty() {
        return Err(config_error("no bivariate model selected"));
    }
    emit(&c.out, &pickands_csv(&models, &grid)?)
}
