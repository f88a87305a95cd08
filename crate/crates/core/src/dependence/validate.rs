use std::fmt;

use super::{DependenceFunctions, SimplexPoint};

/// Grid and tolerance settings for [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationConfig {
    /// Simplex grid spacing.
    pub step: f64,
    /// Spacing of the `[0, 1]^d` grid for copula checks.
    pub copula_step: f64,
    /// Total masses `sum tau` used for the `tau` grid.
    pub masses: Vec<f64>,
    /// Scale factors for homogeneity and max-stability.
    pub scales: Vec<f64>,
    pub tol: f64,
    /// Violations kept per check; all are counted.
    pub max_reported: usize,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig {
            step: 0.01,
            copula_step: 0.05,
            masses: vec![0.5, 1.0, 2.5],
            scales: vec![0.5, 2.0, 3.0],
            tol: 1e-12,
            max_reported: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub check: &'static str,
    pub point: Vec<f64>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {:?}: {}", self.check, self.point, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckSummary {
    pub name: &'static str,
    pub evaluated: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub model: String,
    pub checks: Vec<CheckSummary>,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.failed == 0) && self.checks.iter().all(|c| c.evaluated > 0)
    }

    pub fn failed_checks(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| c.failed > 0).map(|c| c.name).collect()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {}: {}/{} failed", self.model, c.name, c.failed, c.evaluated)?;
        }
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

struct Recorder<'a> {
    cfg: &'a ValidationConfig,
    checks: Vec<CheckSummary>,
    violations: Vec<Violation>,
}

impl Recorder<'_> {
    fn check(&mut self, name: &'static str, point: &[f64], ok: bool, detail: impl FnOnce() -> String) {
        let idx = match self.checks.iter().position(|c| c.name == name) {
            Some(i) => i,
            None => {
                self.checks.push(CheckSummary {
                    name,
                    evaluated: 0,
                    failed: 0,
                });
                self.checks.len() - 1
            }
        };
        let c = &mut self.checks[idx];
        c.evaluated += 1;
        if !ok {
            c.failed += 1;
            if c.failed <= self.cfg.max_reported {
                self.violations.push(Violation {
                    check: name,
                    point: point.to_vec(),
                    detail: detail(),
                });
            }
        }
    }

    fn close(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.cfg.tol * a.abs().max(b.abs()).max(1.0)
    }

    fn le(&self, a: f64, b: f64) -> bool {
        a <= b + self.cfg.tol * a.abs().max(b.abs()).max(1.0)
    }
}

/// Integer simplex points `k` with `sum k <= n`, `d - 1` coordinates each.
fn simplex_lattice(d: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..d - 1 {
        out = out
            .into_iter()
            .flat_map(|p| {
                let used: usize = p.iter().sum();
                (0..=n - used).map(move |k| {
                    let mut q = p.clone();
                    q.push(k);
                    q
                })
            })
            .collect();
    }
    out
}

fn cube_grid(d: usize, n: usize) -> Vec<Vec<f64>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p: Vec<f64>| {
                (0..=n).map(move |k| {
                    let mut q = p.clone();
                    q.push(k as f64 / n as f64);
                    q
                })
            })
            .collect();
    }
    out
}

/// Grid checks of the structural properties every dependence model must have.
///
/// Never passes silently: each violation is counted and reported with its grid point.
pub fn validate(df: &dyn DependenceFunctions, cfg: &ValidationConfig) -> ValidationReport {
    let d = df.dim();
    let mut rec = Recorder {
        cfg,
        checks: Vec::new(),
        violations: Vec::new(),
    };
    let n = (1.0 / cfg.step).round().max(1.0) as usize;
    let lattice = simplex_lattice(d, n);
    let to_alpha = |k: &[usize]| -> Vec<f64> { k.iter().map(|&x| x as f64 / n as f64).collect() };
    let pick = |k: &[usize]| -> f64 {
        let a = SimplexPoint::new(to_alpha(k)).expect("lattice lies on the simplex");
        df.pickands(&a).unwrap_or(f64::NAN)
    };

    for k in &lattice {
        let alpha = SimplexPoint::new(to_alpha(k)).expect("lattice lies on the simplex");
        let full = alpha.full();
        let dv = pick(k);
        let lo = full.iter().cloned().fold(0.0, f64::max);
        rec.check("pickands lower bound", &full, dv.is_finite() && rec.le(lo, dv), || {
            format!("D = {dv} < {lo}")
        });
        rec.check("pickands upper bound", &full, dv.is_finite() && rec.le(dv, 1.0), || {
            format!("D = {dv} > 1")
        });

        for &mass in &cfg.masses {
            let tau: Vec<f64> = full.iter().map(|a| a * mass).collect();
            let (gh, th, gm) = (df.gamma_hat(&tau), df.theta(&tau), df.gamma(&tau));
            let (mx, sm) = (tau.iter().cloned().fold(0.0, f64::max), mass);
            rec.check("gamma_hat bounds", &tau, rec.le(mx, gh) && rec.le(gh, sm), || {
                format!("{mx} <= {gh} <= {sm} fails")
            });
            rec.check("gamma bounds", &tau, rec.le(mx, gm) && rec.le(gm, sm), || {
                format!("{mx} <= {gm} <= {sm} fails")
            });
            rec.check(
                "theta range",
                &tau,
                th.is_finite() && rec.le(0.0, th) && rec.le(th, 1.0),
                || format!("theta = {th}"),
            );
            for &c in &cfg.scales {
                let ct: Vec<f64> = tau.iter().map(|t| t * c).collect();
                let (gh_c, th_c) = (df.gamma_hat(&ct), df.theta(&ct));
                rec.check("gamma_hat homogeneity", &tau, rec.close(gh_c, c * gh), || {
                    format!("hat Gamma({c} tau) = {gh_c}, {c} hat Gamma(tau) = {}", c * gh)
                });
                rec.check("theta homogeneity", &tau, rec.close(th_c, th), || {
                    format!("theta({c} tau) = {th_c} vs {th}")
                });
            }
            let g = df.g(&tau);
            let direct = (-th * gh).exp();
            let et: Vec<f64> = tau.iter().map(|t| (-t).exp()).collect();
            let h = df.h(&et);
            rec.check(
                "consistency G = exp(-theta hat Gamma)",
                &tau,
                rec.close(g, direct),
                || format!("G = {g}, exp(-theta hat Gamma) = {direct}"),
            );
            rec.check("consistency H(exp(-tau)) = G", &tau, rec.close(h, g), || {
                format!("H = {h}, G = {g}")
            });
        }
    }

    // convexity of D along lattice directions
    let dirs: Vec<Vec<isize>> = match d {
        2 => vec![vec![1]],
        3 => vec![vec![1, 0], vec![0, 1], vec![1, -1]],
        _ => (0..d - 1)
            .map(|i| (0..d - 1).map(|j| isize::from(i == j)).collect())
            .collect(),
    };
    let in_simplex = |k: &[isize]| k.iter().all(|&x| x >= 0) && k.iter().sum::<isize>() <= n as isize;
    for k in &lattice {
        let ki: Vec<isize> = k.iter().map(|&x| x as isize).collect();
        for dir in &dirs {
            let plus: Vec<isize> = ki.iter().zip(dir).map(|(a, b)| a + b).collect();
            let minus: Vec<isize> = ki.iter().zip(dir).map(|(a, b)| a - b).collect();
            if !in_simplex(&plus) || !in_simplex(&minus) {
                continue;
            }
            let u = |v: &[isize]| -> Vec<usize> { v.iter().map(|&x| x as usize).collect() };
            let second = pick(&u(&plus)) - 2.0 * pick(k) + pick(&u(&minus));
            rec.check("pickands convexity", &to_alpha(k), rec.le(0.0, second), || {
                format!("second difference {second} along {dir:?}")
            });
        }
    }

    let cn = (1.0 / cfg.copula_step).round().max(1.0) as usize;
    for t in cube_grid(d, cn) {
        let c = df.copula(&t);
        let lo: f64 = t.iter().product();
        let hi = t.iter().cloned().fold(1.0, f64::min);
        rec.check("copula bounds", &t, rec.le(lo, c) && rec.le(c, hi), || {
            format!("{lo} <= C = {c} <= {hi} fails")
        });
        for &s in &cfg.scales {
            let ts: Vec<f64> = t.iter().map(|x| x.powf(s)).collect();
            let (lhs, rhs) = (df.copula(&ts), c.powf(s));
            rec.check("max-stability", &t, rec.close(lhs, rhs), || {
                format!("C(t^{s}) = {lhs}, C(t)^{s} = {rhs}")
            });
        }
    }

    ValidationReport {
        model: df.name(),
        checks: rec.checks,
        violations: rec.violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_sizes() {
        assert_eq!(simplex_lattice(2, 100).len(), 101);
        assert_eq!(simplex_lattice(3, 4).len(), 15);
        assert_eq!(cube_grid(2, 4).len(), 25);
    }
}
