//! Experiment files: flat `key = value` lines grouped under `[section]` headers.
//!
//! ```text
//! [experiment]
//! example = LinkedPeriodic_3_2_2
//! tau = 1, 1
//! tau = 2, 1
//! seed = 7
//!
//! [system]
//! map = tripling
//!
//! [observable]
//! g = log
//! points = 1/6, 1/2
//! ```
//!
//! `[system]` and `[observable]` describe a custom system and are rejected next to
//! `example`. Each `[observable]` section adds one component, in file order.

use std::path::Path;

use dynex_core::{Boundary, ExampleId, GType, MapSpec, MaximalSet, ObservableSpec, Rational, System};

use crate::CliError;

/// One experiment, after presets and command-line overrides are applied.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentConfig {
    pub name: String,
    pub example: Option<ExampleId>,
    pub map: Option<MapSpec>,
    pub observables: Vec<ObservableSpec>,
    /// `None` means "not given"; `Some(vec![])` is an explicitly empty grid.
    pub taus: Option<Vec<Vec<Rational>>>,
    pub alpha_step: Option<f64>,
    pub n_schedule: Option<Vec<u64>>,
    pub q_max: Option<usize>,
    pub trials: Option<u64>,
    pub orbit: Option<u64>,
    pub seed: Option<u64>,
    /// Cost budget for exact anti-clustering sums.
    pub budget: Option<u64>,
    pub boundary: Boundary,
    pub mode: Option<String>,
}

fn cfg_err(line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("line {line}: {msg}"))
}

/// `p/q`, an integer, or a finite decimal, converted exactly.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| format!("bad numerator in '{s}'"))?;
        let q: i64 = q.trim().parse().map_err(|_| format!("bad denominator in '{s}'"))?;
        if q == 0 {
            return Err(format!("zero denominator in '{s}'"));
        }
        return Ok(Rational::new(p.into(), q.into()));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty()
        || !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
        || frac.len() > 18
    {
        return Err(format!("not a number: '{s}'"));
    }
    let num: num_bigint::BigInt = format!("{whole}{frac}")
        .parse()
        .map_err(|_| format!("not a number: '{s}'"))?;
    let den = num_bigint::BigInt::from(10u64.pow(frac.len() as u32));
    let r = Rational::new(num, den);
    Ok(if neg { -r } else { r })
}

pub fn parse_rationals(s: &str) -> Result<Vec<Rational>, String> {
    s.split(',').map(parse_rational).collect()
}

pub fn parse_u64_list(s: &str) -> Result<Vec<u64>, String> {
    s.split(',').map(parse_count).collect()
}

/// Plain integers, `2^k`, or scientific notation such as `2e5`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    let t = s.trim().replace('_', "");
    if let Some((b, e)) = t.split_once('^') {
        let b: u64 = b.parse().map_err(|_| format!("bad count '{s}'"))?;
        let e: u32 = e.parse().map_err(|_| format!("bad count '{s}'"))?;
        return b.checked_pow(e).ok_or_else(|| format!("count '{s}' overflows"));
    }
    if let Some((m, e)) = t.split_once(['e', 'E']) {
        let m: u64 = m.parse().map_err(|_| format!("bad count '{s}'"))?;
        let e: u32 = e.parse().map_err(|_| format!("bad count '{s}'"))?;
        return 10u64
            .checked_pow(e)
            .and_then(|p| p.checked_mul(m))
            .ok_or_else(|| format!("count '{s}' overflows"));
    }
    t.parse().map_err(|_| format!("bad count '{s}'"))
}

pub fn parse_map(s: &str) -> Result<MapSpec, String> {
    let s = s.trim();
    let (name, args) = s.split_once(':').unwrap_or((s, ""));
    let ints = || -> Result<Vec<i64>, String> {
        args.split(',')
            .map(|a| a.trim().parse().map_err(|_| format!("bad map argument in '{s}'")))
            .collect()
    };
    match name.trim() {
        "doubling" => Ok(MapSpec::doubling()),
        "tripling" => Ok(MapSpec::tripling()),
        "cat" => Ok(MapSpec::cat()),
        "expanding" => {
            let b = ints()?;
            match b.as_slice() {
                [b] if *b >= 2 && *b <= u32::MAX as i64 => MapSpec::expanding(*b as u32).map_err(|e| e.to_string()),
                _ => Err(format!("expanding map needs one base >= 2: '{s}'")),
            }
        }
        "toral" => {
            let m = ints()?;
            match m.as_slice() {
                [a, b, c, d] => MapSpec::toral([[*a, *b], [*c, *d]]).map_err(|e| e.to_string()),
                _ => Err(format!("toral map needs four entries: '{s}'")),
            }
        }
        _ => Err(format!("unknown map '{s}'")),
    }
}

pub fn parse_g(s: &str) -> Result<GType, String> {
    let s = s.trim();
    let (name, args) = s.split_once(':').unwrap_or((s, ""));
    let nums: Vec<f64> = if args.is_empty() {
        Vec::new()
    } else {
        args.split(',')
            .map(|a| a.trim().parse::<f64>().map_err(|_| format!("bad argument in '{s}'")))
            .collect::<Result<_, _>>()?
    };
    let g = match (name.trim(), nums.as_slice()) {
        ("log", []) => GType::Log,
        ("pareto", [a]) => GType::Pareto(*a),
        ("bounded", [d, a]) => GType::Bounded { d: *d, alpha: *a },
        _ => return Err(format!("unknown observable shape '{s}'")),
    };
    g.validate().map_err(|e| e.to_string())?;
    Ok(g)
}

#[derive(Default)]
struct ObsDraft {
    line: usize,
    g: Option<GType>,
    z: Option<MaximalSet>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = ExperimentConfig::default();
        let mut section = String::new();
        let mut drafts: Vec<ObsDraft> = Vec::new();
        let mut saw_system = false;
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| cfg_err(ln, "unterminated section header"))?
                    .trim()
                    .to_ascii_lowercase();
                match name.as_str() {
                    "experiment" => {}
                    "system" => saw_system = true,
                    "observable" => drafts.push(ObsDraft {
                        line: ln,
                        ..Default::default()
                    }),
                    _ => return Err(cfg_err(ln, format!("unknown section [{name}]"))),
                }
                section = name;
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| cfg_err(ln, "expected key = value"))?;
            let key = key.trim().to_ascii_lowercase().replace('_', "-");
            let value = value.trim();
            let bad = |m: String| cfg_err(ln, m);
            match (section.as_str(), key.as_str()) {
                ("experiment", "example") => {
                    cfg.example = Some(value.parse().map_err(|e: dynex_core::Error| bad(e.to_string()))?)
                }
                ("experiment", "name") => cfg.name = value.to_string(),
                ("experiment", "tau") => {
                    let grid = cfg.taus.get_or_insert_with(Vec::new);
                    if !value.is_empty() {
                        grid.push(parse_rationals(value).map_err(bad)?);
                    }
                }
                ("experiment", "alpha-grid") => {
                    cfg.alpha_step = Some(value.parse().map_err(|_| bad(format!("bad step '{value}'")))?)
                }
                ("experiment", "n-schedule") => cfg.n_schedule = Some(parse_u64_list(value).map_err(bad)?),
                ("experiment", "q-max") => {
                    cfg.q_max = Some(value.parse().map_err(|_| bad(format!("bad q-max '{value}'")))?)
                }
                ("experiment", "trials") => cfg.trials = Some(parse_count(value).map_err(bad)?),
                ("experiment", "orbit") => cfg.orbit = Some(parse_count(value).map_err(bad)?),
                ("experiment", "budget") => cfg.budget = Some(parse_count(value).map_err(bad)?),
                ("experiment", "seed") => cfg.seed = Some(parse_count(value).map_err(bad)?),
                ("experiment", "boundary") => {
                    cfg.boundary = value.parse().map_err(|e: dynex_core::Error| bad(e.to_string()))?
                }
                ("experiment", "mode") => cfg.mode = Some(value.to_string()),
                ("system", "map") => cfg.map = Some(parse_map(value).map_err(bad)?),
                ("observable", "g") => drafts.last_mut().unwrap().g = Some(parse_g(value).map_err(bad)?),
                ("observable", "points") => {
                    let pts = parse_rationals(value).map_err(bad)?;
                    drafts.last_mut().unwrap().z = Some(MaximalSet::points(pts).map_err(|e| bad(e.to_string()))?);
                }
                ("observable", "segment") => {
                    let v: Vec<f64> = value
                        .split(',')
                        .map(|x| x.trim().parse::<f64>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| bad(format!("bad segment '{value}'")))?;
                    let [c, h] = v[..] else {
                        return Err(bad("segment needs center, half-length".into()));
                    };
                    drafts.last_mut().unwrap().z = Some(MaximalSet::segment(c, h).map_err(|e| bad(e.to_string()))?);
                }
                ("", _) => return Err(cfg_err(ln, "key outside any section")),
                _ => return Err(cfg_err(ln, format!("unknown key '{key}' in [{section}]"))),
            }
        }
        for d in drafts {
            let z =
                d.z.ok_or_else(|| cfg_err(d.line, "observable without points or segment"))?;
            let obs = ObservableSpec::new(d.g.unwrap_or(GType::Log), z).map_err(|e| cfg_err(d.line, e))?;
            cfg.observables.push(obs);
        }
        if cfg.example.is_some() && (saw_system || !cfg.observables.is_empty()) {
            return Err(CliError::Config(
                "a preset example cannot be combined with [system] or [observable]".into(),
            ));
        }
        if cfg.example.is_none() && (cfg.map.is_some() || !cfg.observables.is_empty()) {
            if cfg.map.is_none() {
                return Err(CliError::Config("[system] map is missing".into()));
            }
            if cfg.observables.is_empty() {
                return Err(CliError::Config("no [observable] sections".into()));
            }
        }
        Ok(cfg)
    }

    /// Preset or custom system with the configured boundary.
    pub fn system(&self) -> Result<System, CliError> {
        let sys = match (self.example, &self.map) {
            (Some(id), _) => id.system(),
            (None, Some(map)) => {
                System::new(map.clone(), self.observables.clone()).map_err(|e| CliError::Config(e.to_string()))?
            }
            (None, None) => return Err(CliError::Config("no example or system given".into())),
        };
        Ok(sys.with_boundary(self.boundary))
    }

    /// Label used in the `example` column.
    pub fn label(&self) -> String {
        match self.example {
            Some(id) => id.key().to_string(),
            None if self.name.is_empty() => "custom".to_string(),
            None => self.name.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dynex_core::rat;

    #[test]
    fn rationals_parse_exactly() {
        assert_eq!(parse_rational("1/12").unwrap(), rat(1, 12));
        assert_eq!(parse_rational("0.05").unwrap(), rat(1, 20));
        assert_eq!(parse_rational("-2.5").unwrap(), rat(-5, 2));
        assert_eq!(parse_rational("3").unwrap(), rat(3, 1));
        for bad in ["", ".", "1/0", "x", "1e3"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn counts_accept_powers_and_exponents() {
        assert_eq!(parse_count("2^40").unwrap(), 1 << 40);
        assert_eq!(parse_count("2e5").unwrap(), 200_000);
        assert_eq!(parse_count("10_000").unwrap(), 10_000);
        assert!(parse_count("2^70").is_err());
    }

    #[test]
    fn custom_system_parses() {
        let cfg = ExperimentConfig::parse(
            "[experiment]\nname = mine\ntau = 1,1\nseed = 3\n[system]\nmap = expanding:5\n\
             [observable]\npoints = 1/7\n[observable]\ng = pareto:2\npoints = 2/7, 3/7\n",
        )
        .unwrap();
        assert_eq!(cfg.label(), "mine");
        assert_eq!(cfg.observables.len(), 2);
        assert_eq!(cfg.system().unwrap().map, MapSpec::expanding(5).unwrap());
        assert_eq!(cfg.taus, Some(vec![vec![rat(1, 1), rat(1, 1)]]));
    }

    #[test]
    fn presets_and_empty_grids() {
        let cfg = ExperimentConfig::parse("[experiment]\nexample = DisjointPoints\ntau =\n").unwrap();
        assert_eq!(cfg.example, Some(ExampleId::DisjointPoints));
        assert_eq!(cfg.taus, Some(vec![]));
    }

    #[test]
    fn malformed_files_are_rejected() {
        for text in [
            "tau = 1,1\n",
            "[experiment]\nexample = Nope\n",
            "[experiment]\nfoo = 1\n",
            "[bogus]\n",
            "[experiment]\nexample = CatMap\n[system]\nmap = cat\n",
            "[system]\nmap = doubling\n",
            "[system]\nmap = doubling\n[observable]\ng = log\n",
            "[system]\nmap = doubling\n[observable]\npoints = 1/3, 4/3\n",
            "[system]\nmap = toral:1,1,1\n",
        ] {
            assert!(
                matches!(ExperimentConfig::parse(text), Err(CliError::Config(_))),
                "{text}"
            );
        }
    }
}
