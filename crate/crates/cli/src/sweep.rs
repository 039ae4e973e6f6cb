//! Grid runs driven by a JSON config.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;

use qsym_core::symmetry::{check_budget, TheoremKind, DEFAULT_PERMUTATION_BUDGET};
use qsym_core::QParam;

use crate::certificate::{content_name, write_atomic, Certificate};
use crate::commands::{run_padic, run_verify, PadicParameters, VerifyParameters};
use crate::{Outcome, PadicCheck};

pub const OUT_DIR_ENV: &str = "QSYM_OUT_DIR";

/// Inclusive integer range.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub min: i64,
    pub max: i64,
}

impl Range {
    fn values(&self, what: &str) -> Result<Vec<i64>, String> {
        if self.min > self.max {
            return Err(format!(
                "{what} range [{}, {}] is empty",
                self.min, self.max
            ));
        }
        Ok((self.min..=self.max).collect())
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PadicSweep {
    pub checks: Vec<PadicCheck>,
    pub p: Vec<u32>,
    pub q_offset: Vec<i64>,
    pub n: Range,
    pub n_max: u32,
    pub precision: u32,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub theorem: Option<TheoremKind>,
    pub n: Option<Range>,
    pub m: Option<Range>,
    pub x: Option<Range>,
    #[serde(default)]
    pub q: Vec<String>,
    pub weights: Option<Range>,
    #[serde(default = "default_budget")]
    pub budget: u128,
    pub padic: Option<PadicSweep>,
    pub output_dir: Option<PathBuf>,
}

fn default_budget() -> u128 {
    DEFAULT_PERMUTATION_BUDGET
}

fn require<T: Copy>(value: Option<T>, name: &str) -> Result<T, String> {
    value.ok_or_else(|| format!("config is missing {name:?}"))
}

fn weight_tuples(n: usize, lo: u64, hi: u64) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (lo..=hi).map(move |w| {
                    let mut next = prefix.clone();
                    next.push(w);
                    next
                })
            })
            .collect();
    }
    out
}

fn symmetry_points(
    cfg: &SweepConfig,
    theorem: TheoremKind,
) -> Result<Vec<VerifyParameters>, String> {
    let ns = require(cfg.n, "n")?.values("n")?;
    let ms = require(cfg.m, "m")?.values("m")?;
    let xs = require(cfg.x, "x")?.values("x")?;
    let wr = require(cfg.weights, "weights")?;
    wr.values("weights")?;
    if wr.min < 1 {
        return Err("weights must be positive".into());
    }
    if cfg.q.is_empty() {
        return Err("q list is empty".into());
    }
    let mut qs = cfg
        .q
        .iter()
        .map(|t| t.parse::<QParam>().map_err(|e| format!("q = {t:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    // grid order, and hence summary order, is lexicographic in (n, w, m, x, q)
    qs.sort_by(|a, b| a.value().cmp(b.value()));
    qs.dedup();
    let mut points = Vec::new();
    for &n in &ns {
        if n < 2 {
            return Err(format!("n = {n} is below 2"));
        }
        let n = n as usize;
        check_budget(n, cfg.budget).map_err(|e| e.to_string())?;
        for weights in weight_tuples(n, wr.min as u64, wr.max as u64) {
            for &m in &ms {
                let m = u32::try_from(m).map_err(|_| format!("m = {m} is negative"))?;
                for &x in &xs {
                    for q in &qs {
                        points.push(VerifyParameters {
                            theorem,
                            n,
                            m,
                            x,
                            q: q.clone(),
                            weights: weights.clone(),
                            budget: cfg.budget,
                        });
                    }
                }
            }
        }
    }
    Ok(points)
}

fn sorted<T: Ord + Clone>(values: &[T]) -> Vec<T> {
    let mut out = values.to_vec();
    out.sort();
    out.dedup();
    out
}

fn padic_points(sweep: &PadicSweep) -> Result<Vec<PadicParameters>, String> {
    if sweep.checks.is_empty() || sweep.p.is_empty() || sweep.q_offset.is_empty() {
        return Err("padic checks, p and q_offset lists must be nonempty".into());
    }
    let ns = sweep.n.values("padic n")?;
    let mut points = Vec::new();
    for check in sorted(&sweep.checks) {
        for p in sorted(&sweep.p) {
            for q_offset in sorted(&sweep.q_offset) {
                for &n in &ns {
                    let n = u32::try_from(n).map_err(|_| format!("padic n = {n} is negative"))?;
                    points.push(PadicParameters {
                        check,
                        p,
                        q_offset,
                        n,
                        x: 0,
                        n_max: sweep.n_max,
                        precision: sweep.precision,
                        coeffs: None,
                    });
                }
            }
        }
    }
    Ok(points)
}

enum Point {
    Symmetry(VerifyParameters),
    Padic(PadicParameters),
}

struct PointResult {
    label: String,
    file: PathBuf,
    verdict: bool,
}

fn run_point(point: &Point, dir: &Path) -> Result<PointResult, String> {
    match point {
        Point::Symmetry(params) => {
            let report = run_verify(params)?;
            let cert = Certificate::new("symmetry", params, &report, report.verdict);
            let file = write_atomic(dir, &content_name("symmetry", params)?, &cert.to_json()?)?;
            let label = format!(
                "{} n={} m={} x={} q={} w={:?}",
                params.theorem, params.n, params.m, params.x, params.q, params.weights
            );
            Ok(PointResult {
                label,
                file,
                verdict: report.verdict,
            })
        }
        Point::Padic(params) => {
            let report = run_padic(params)?;
            let verdict = report.verdict();
            let cert = Certificate::new("padic", params, &report, verdict);
            let file = write_atomic(dir, &content_name("padic", params)?, &cert.to_json()?)?;
            let label = format!(
                "padic {:?} p={} u={} n={}",
                params.check, params.p, params.q_offset, params.n
            );
            Ok(PointResult {
                label,
                file,
                verdict,
            })
        }
    }
}

pub fn load_config(path: &Path) -> Result<SweepConfig, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("parsing {}: {e}", path.display()))
}

pub fn run(path: &Path) -> Result<Outcome, String> {
    let cfg = load_config(path)?;
    let mut points = Vec::new();
    if let Some(theorem) = cfg.theorem {
        points.extend(
            symmetry_points(&cfg, theorem)?
                .into_iter()
                .map(Point::Symmetry),
        );
    }
    if let Some(padic) = &cfg.padic {
        points.extend(padic_points(padic)?.into_iter().map(Point::Padic));
    }
    if points.is_empty() {
        return Err("config selects no checks (set \"theorem\" and/or \"padic\")".into());
    }
    let dir = std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("certificates"));
    fs::create_dir_all(&dir).map_err(|e| format!("creating {}: {e}", dir.display()))?;

    let results = points
        .par_iter()
        .map(|p| run_point(p, &dir))
        .collect::<Result<Vec<_>, _>>()?;
    let failed: Vec<&PointResult> = results.iter().filter(|r| !r.verdict).collect();
    for r in &failed {
        println!("FAIL {} -> {}", r.label, r.file.display());
    }
    println!(
        "{} passed, {} failed",
        results.len() - failed.len(),
        failed.len()
    );
    Ok(if failed.is_empty() {
        Outcome::Verified
    } else {
        Outcome::Falsified
    })
}
