//! CSV tables: closed-form curves, Pickands tables and engine estimates.

use std::fmt::Write as _;

use crate::dependence::{catalog, closed_form, DependenceFunctions, SimplexPoint};
use crate::engine::EstimateResult;
use crate::error::{Error, Result};
use crate::geometry::{rat, to_f64, Rational};
use crate::presets::ExampleId;

pub const CURVES_SCHEMA: &str = "curves-v1";
pub const CURVES3_SCHEMA: &str = "curves3-v1";
pub const PICKANDS_SCHEMA: &str = "pickands-v1";
pub const ESTIMATES_SCHEMA: &str = "estimates-v1";

/// Decimal rendering with 15 significant digits and no trailing zeros.
pub fn fmt_sig(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let mag = v.abs().log10().floor() as i32;
    if !(-5..=15).contains(&mag) {
        return format!("{v:.14e}");
    }
    let decimals = (14 - mag).max(0) as usize;
    let s = format!("{v:.decimals$}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

/// Simplex grid `0, h, 2h, ..., 1` as exact fractions `k / round(1/h)`.
pub fn alpha_grid(step: f64) -> Result<Vec<Rational>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::Domain(format!("grid step {step} outside (0, 1]")));
    }
    let n = (1.0 / step).round() as i64;
    Ok((0..=n).map(|k| rat(k, n)).collect())
}

fn curve_values(id: ExampleId, alpha: &[Rational]) -> Result<[f64; 4]> {
    let full: Vec<Rational> = {
        let mut v = alpha.to_vec();
        v.push(Rational::from_integer(1.into()) - alpha.iter().cloned().fold(Rational::default(), |a, b| a + b));
        v
    };
    if id.is_circle() {
        let th = catalog::theta_on_simplex(id, &full)?;
        let d = catalog::pickands(id, &full)?;
        let gh = catalog::gamma_hat(id, &full)?;
        let g = (-to_f64(&th) * to_f64(&gh)).exp();
        Ok([to_f64(&th), to_f64(&d), to_f64(&d), g])
    } else {
        let f: Vec<f64> = full.iter().map(to_f64).collect();
        let cf = closed_form(id);
        let d = cf.pickands(&SimplexPoint::new(f[..f.len() - 1].to_vec())?)?;
        Ok([cf.theta(&f), d, d, cf.g(&f)])
    }
}

/// `theta`, `D`, `Gamma` and `G` along the simplex; exact arithmetic for circle examples.
pub fn curves_csv(id: ExampleId, grid: &[Rational]) -> Result<String> {
    let mut out = String::new();
    if id.dim() == 2 {
        out.push_str("schema,example,alpha,theta,D,Gamma,G\n");
        for a in grid {
            let v = curve_values(id, std::slice::from_ref(a))?;
            writeln!(out, "{CURVES_SCHEMA},{id},{},{}", fmt_sig(to_f64(a)), join(&v)).unwrap();
        }
    } else {
        out.push_str("schema,example,alpha,beta,theta,D,Gamma,G\n");
        for a in grid {
            for b in grid.iter().filter(|b| a + *b <= Rational::from_integer(1.into())) {
                let v = curve_values(id, &[a.clone(), b.clone()])?;
                writeln!(
                    out,
                    "{CURVES3_SCHEMA},{id},{},{},{}",
                    fmt_sig(to_f64(a)),
                    fmt_sig(to_f64(b)),
                    join(&v)
                )
                .unwrap();
            }
        }
    }
    Ok(out)
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| fmt_sig(*x)).collect::<Vec<_>>().join(",")
}

/// Pickands functions of bivariate models on a common grid.
pub fn pickands_csv(models: &[&dyn DependenceFunctions], grid: &[Rational]) -> Result<String> {
    let mut out = String::from("schema,model,alpha,D\n");
    for m in models {
        if m.dim() != 2 {
            return Err(Error::Domain(format!("{} is not bivariate", m.name())));
        }
        for a in grid {
            let d = m.pickands(&SimplexPoint::new(vec![to_f64(a)])?)?;
            writeln!(
                out,
                "{PICKANDS_SCHEMA},{},{},{}",
                m.name(),
                fmt_sig(to_f64(a)),
                fmt_sig(d)
            )
            .unwrap();
        }
    }
    Ok(out)
}

/// One line of an estimates table.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRow {
    pub example: String,
    pub tau: Vec<Rational>,
    pub quantity: String,
    pub estimate: EstimateResult,
}

/// Header for `d`-dimensional estimates.
pub fn estimates_header(d: usize) -> String {
    let taus: Vec<String> = (1..=d).map(|i| format!("tau{i}")).collect();
    format!(
        "schema,example,{},n,q,quantity,value,stderr,exact_flag,status,exact\n",
        taus.join(",")
    )
}

/// Rows sorted by key so output does not depend on completion order.
pub fn estimates_csv(d: usize, rows: &[EstimateRow]) -> String {
    let mut rows: Vec<&EstimateRow> = rows.iter().collect();
    rows.sort_by(|a, b| {
        (&a.example, &a.tau, a.estimate.n, a.estimate.q, &a.quantity).cmp(&(
            &b.example,
            &b.tau,
            b.estimate.n,
            b.estimate.q,
            &b.quantity,
        ))
    });
    let mut out = estimates_header(d);
    for r in rows {
        let e = &r.estimate;
        let taus: Vec<String> = r.tau.iter().map(|t| fmt_sig(to_f64(t))).collect();
        writeln!(
            out,
            "{ESTIMATES_SCHEMA},{},{},{},{},{},{},{},{},{},{}",
            r.example,
            taus.join(","),
            e.n,
            e.q,
            r.quantity,
            fmt_sig(e.value),
            fmt_sig(e.stderr),
            u8::from(e.is_exact()),
            e.status,
            e.exact.as_ref().map(|x| x.to_string()).unwrap_or_default()
        )
        .unwrap();
    }
    out
}

/// Minimal CSV reader for the tables written here: header names and string cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<String> = lines
            .next()
            .ok_or_else(|| Error::Domain("empty table".into()))?
            .split(',')
            .map(str::to_string)
            .collect();
        let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
        if let Some(bad) = rows.iter().position(|r| r.len() != header.len()) {
            return Err(Error::Domain(format!("row {} has the wrong width", bad + 1)));
        }
        Ok(Table { header, rows })
    }

    pub fn column(&self, name: &str) -> Result<Vec<&str>> {
        let i = self
            .header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Domain(format!("no column '{name}'")))?;
        Ok(self.rows.iter().map(|r| r[i].as_str()).collect())
    }

    pub fn numeric(&self, name: &str) -> Result<Vec<f64>> {
        self.column(name)?
            .into_iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::Domain(format!("'{s}' in column '{name}' is not a number")))
            })
            .collect()
    }
}
