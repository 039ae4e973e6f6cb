use serde::{Deserialize, Serialize};

use qsym_core::carlitz::{beta_poly as eval_beta_poly, carlitz_beta};
use qsym_core::padic::{
    valuation_of_rational, verify_functional_equation, verify_integral_representation_at,
    verify_monomial_difference, FunctionalEquationReport, IntegralRepresentationReport,
    PadicContext, QExpPoly,
};
use qsym_core::rational::{format_rational, parse_rational, serde_text, BigRational};
use qsym_core::symmetry::{t_sum, verify_theorem, TheoremKind, VerificationReport};
use qsym_core::{QParam, SymmetryInstance, WeightVector};

use crate::certificate::Certificate;
use crate::{Outcome, PadicArgs, PadicCheck, VerifyArgs, VerifyKind};

fn parse_q(text: &str) -> Result<QParam, String> {
    text.parse::<QParam>().map_err(|e| e.to_string())
}

fn print_json<T: Serialize>(value: &T) -> Result<(), String> {
    println!(
        "{}",
        serde_json::to_string(value).map_err(|e| e.to_string())?
    );
    Ok(())
}

#[derive(Serialize)]
struct BetaOutput<'a> {
    n: usize,
    q: &'a QParam,
    #[serde(with = "serde_text")]
    beta: BigRational,
}

pub fn beta(n: usize, q: &str) -> Result<Outcome, String> {
    let q = parse_q(q)?;
    print_json(&BetaOutput {
        n,
        beta: carlitz_beta(n, &q),
        q: &q,
    })?;
    Ok(Outcome::Verified)
}

#[derive(Serialize)]
struct BetaPolyOutput<'a> {
    n: usize,
    q: &'a QParam,
    x: i64,
    #[serde(with = "serde_text")]
    value: BigRational,
}

pub fn beta_poly(n: usize, q: &str, x: i64) -> Result<Outcome, String> {
    let q = parse_q(q)?;
    print_json(&BetaPolyOutput {
        n,
        x,
        value: eval_beta_poly(n, &q, x),
        q: &q,
    })?;
    Ok(Outcome::Verified)
}

#[derive(Serialize)]
struct TsumOutput<'a> {
    m: u32,
    l: u32,
    q: &'a QParam,
    weights: &'a [u64],
    #[serde(with = "serde_text")]
    value: BigRational,
}

pub fn tsum(m: u32, l: u32, q: &str, w: &[u64]) -> Result<Outcome, String> {
    let q = parse_q(q)?;
    if w.is_empty() || w.contains(&0) {
        return Err("--w needs at least one positive weight".into());
    }
    let value = t_sum(m, l, &q, w).map_err(|e| e.to_string())?;
    print_json(&TsumOutput {
        m,
        l,
        q: &q,
        weights: w,
        value,
    })?;
    Ok(Outcome::Verified)
}

/// Everything needed to rerun one symmetry check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyParameters {
    pub theorem: TheoremKind,
    pub n: usize,
    pub m: u32,
    pub x: i64,
    pub q: QParam,
    pub weights: Vec<u64>,
    pub budget: u128,
}

pub fn run_verify(params: &VerifyParameters) -> Result<VerificationReport, String> {
    if params.weights.len() != params.n {
        return Err(format!(
            "--w has {} weights but --n is {}",
            params.weights.len(),
            params.n
        ));
    }
    let weights = WeightVector::new(params.weights.clone()).map_err(|e| e.to_string())?;
    let inst = SymmetryInstance::new(params.m, params.x, params.q.clone(), weights);
    verify_theorem(params.theorem, &inst, params.budget).map_err(|e| e.to_string())
}

pub fn report_mismatch(report: &VerificationReport) {
    if let Some(mm) = &report.mismatch {
        eprintln!(
            "mismatch at m = {}: sigma = {} gives {}, {} gives {}",
            mm.m,
            mm.first,
            format_rational(&mm.first_value),
            mm.second,
            format_rational(&mm.second_value)
        );
    }
}

pub fn verify(args: &VerifyArgs) -> Result<Outcome, String> {
    let theorem = match args.kind {
        VerifyKind::Thm1 => TheoremKind::Thm1,
        VerifyKind::Thm2 => TheoremKind::Thm2,
        VerifyKind::Thm3 => TheoremKind::Thm3,
        VerifyKind::Cross => TheoremKind::Cross,
    };
    let params = VerifyParameters {
        theorem,
        n: args.n.unwrap_or(args.w.len()),
        m: args.m,
        x: args.x,
        q: parse_q(&args.q)?,
        weights: args.w.clone(),
        budget: args.budget,
    };
    let report = run_verify(&params)?;
    print!(
        "{}",
        Certificate::new("symmetry", &params, &report, report.verdict).to_json()?
    );
    report_mismatch(&report);
    Ok(if report.verdict {
        Outcome::Verified
    } else {
        Outcome::Falsified
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PadicParameters {
    pub check: PadicCheck,
    pub p: u32,
    pub q_offset: i64,
    pub n: u32,
    pub x: i64,
    pub n_max: u32,
    pub precision: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<String>,
}

#[derive(Serialize)]
#[serde(untagged)]
pub enum PadicReport {
    Integral(IntegralRepresentationReport),
    Functional(FunctionalEquationReport),
}

impl PadicReport {
    pub fn verdict(&self) -> bool {
        match self {
            PadicReport::Integral(r) => r.verdict,
            PadicReport::Functional(r) => r.verdict,
        }
    }
}

/// Parses `k:c,k:c` into a function over the context's `q`. The pole order is
/// read off the most negative coefficient valuation.
fn parse_coefficients(text: &str, ctx: &PadicContext) -> Result<QExpPoly, String> {
    let mut coeffs = Vec::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, c) = part
            .split_once(':')
            .ok_or_else(|| format!("coefficient {part:?} is not of the form k:c"))?;
        let k: u32 = k
            .trim()
            .parse()
            .map_err(|_| format!("bad exponent in {part:?}"))?;
        let c = parse_rational(c).map_err(|e| e.to_string())?;
        coeffs.push((k, c));
    }
    if coeffs.is_empty() {
        return Err("--coeffs is empty".into());
    }
    let v = i64::from(ctx.q_minus_one_valuation());
    let worst = coeffs
        .iter()
        .filter_map(|(_, c)| valuation_of_rational(c, ctx.prime()))
        .min()
        .unwrap_or(0);
    let pole = if worst < 0 { (-worst + v - 1) / v } else { 0 };
    Ok(QExpPoly::new(ctx.q(), coeffs, pole as u32))
}

pub fn run_padic(params: &PadicParameters) -> Result<PadicReport, String> {
    let ctx = PadicContext::new(params.p, params.q_offset, params.precision)
        .map_err(|e| e.to_string())?;
    let err = |e: qsym_core::Error| e.to_string();
    Ok(match params.check {
        PadicCheck::Eq6 => PadicReport::Integral(
            verify_integral_representation_at(params.n, params.x, params.n_max, &ctx)
                .map_err(err)?,
        ),
        PadicCheck::Eq7 => PadicReport::Functional(
            verify_monomial_difference(params.n, params.n_max, &ctx).map_err(err)?,
        ),
        PadicCheck::Eq2 => {
            let f = match &params.coeffs {
                Some(text) => parse_coefficients(text, &ctx)?,
                None => QExpPoly::q_monomial(params.n, &ctx.q()),
            };
            PadicReport::Functional(
                verify_functional_equation(&f, params.n_max, &ctx).map_err(err)?,
            )
        }
    })
}

pub fn padic(args: &PadicArgs) -> Result<Outcome, String> {
    if args.coeffs.is_some() && args.check != PadicCheck::Eq2 {
        return Err("--coeffs only applies to eq2".into());
    }
    let params = PadicParameters {
        check: args.check,
        p: args.p,
        q_offset: args.q_offset,
        n: args.n,
        x: args.x,
        n_max: args.n_max,
        precision: args.precision,
        coeffs: args.coeffs.clone(),
    };
    let report = run_padic(&params)?;
    let verdict = report.verdict();
    print!(
        "{}",
        Certificate::new("padic", &params, &report, verdict).to_json()?
    );
    Ok(if verdict {
        Outcome::Verified
    } else {
        Outcome::Falsified
    })
}
