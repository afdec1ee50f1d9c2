//! Output documents. Every number is written so that parsing it back gives
//! the same `f64`.

use std::fmt::Write as _;

use ordshrink_core::adapt::{FitResult, RiskReport};
use ordshrink_core::oracle::{Simulation, GENERATOR};
use ordshrink_core::{Layout, VarianceMethod};
use serde::Serialize;
use serde_json::value::RawValue;

/// Shortest representation that round-trips.
pub fn num(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_owned()
    } else {
        format!("{x:?}")
    }
}

/// 17 significant digits, as a JSON number.
fn json_num(x: f64) -> Box<RawValue> {
    let text = if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_owned()
    };
    RawValue::from_string(text).expect("formatted float is valid JSON")
}

#[derive(Serialize)]
struct FitDocument {
    family: &'static str,
    penalty: String,
    alpha: Option<Box<RawValue>>,
    estimated_risk: Box<RawValue>,
    sigma2: Box<RawValue>,
    q: Option<usize>,
    mu_hat: Vec<Box<RawValue>>,
    residuals: Vec<Box<RawValue>>,
}

pub fn fit_json(res: &FitResult) -> String {
    let doc = FitDocument {
        family: res.family.as_str(),
        penalty: res.penalty.to_string(),
        alpha: res.alpha.map(json_num),
        estimated_risk: json_num(res.estimated_risk),
        sigma2: json_num(res.sigma2.sigma2),
        q: res.sigma2.q,
        mu_hat: res.mu_hat.iter().copied().map(json_num).collect(),
        residuals: res.residuals.iter().copied().map(json_num).collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("document serializes");
    out.push('\n');
    out
}

pub fn fit_text(res: &FitResult, layout: &Layout) -> String {
    let mut out = String::new();
    let opt = |x: Option<f64>| x.map_or_else(|| "-".to_owned(), num);
    let method = match res.sigma2.method {
        VarianceMethod::LeastSquares => "least-squares".to_owned(),
        VarianceMethod::HighComponent => {
            format!("high-component, q = {}", res.sigma2.q.unwrap_or(0))
        }
    };
    writeln!(out, "family          {}", res.family).unwrap();
    writeln!(out, "penalty         {}", res.penalty).unwrap();
    writeln!(out, "alpha           {}", opt(res.alpha)).unwrap();
    writeln!(out, "nu              {}", opt(res.plan.nu)).unwrap();
    writeln!(out, "threshold       {}", opt(res.plan.threshold)).unwrap();
    writeln!(out, "estimated_risk  {}", num(res.estimated_risk)).unwrap();
    writeln!(out, "sigma2          {} ({method})", num(res.sigma2.sigma2)).unwrap();
    writeln!(out).unwrap();
    writeln!(out, "level\tn\tmu_hat\tshrinkage").unwrap();
    for (i, (&level, group)) in layout.levels().iter().zip(layout.groups()).enumerate() {
        writeln!(
            out,
            "{}\t{}\t{}\t{}",
            num(level),
            group.len(),
            num(res.mu_hat[i]),
            num(res.plan.f[i])
        )
        .unwrap();
    }
    out
}

pub fn compare_csv(report: &RiskReport) -> String {
    let mut out = String::from("family,penalty,alpha,estimated_risk\n");
    for row in &report.rows {
        writeln!(
            out,
            "{},{},{},{}",
            row.family,
            row.penalty,
            row.alpha.map(num).unwrap_or_default(),
            num(row.estimated_risk)
        )
        .unwrap();
    }
    out
}

#[derive(Serialize)]
struct CompareRow {
    family: &'static str,
    penalty: String,
    alpha: Option<Box<RawValue>>,
    estimated_risk: Box<RawValue>,
}

pub fn compare_json(report: &RiskReport) -> String {
    let rows: Vec<CompareRow> = report
        .rows
        .iter()
        .map(|r| CompareRow {
            family: r.family.as_str(),
            penalty: r.penalty.to_string(),
            alpha: r.alpha.map(json_num),
            estimated_risk: json_num(r.estimated_risk),
        })
        .collect();
    let mut out = serde_json::to_string_pretty(&rows).expect("document serializes");
    out.push('\n');
    out
}

pub fn simulation_csv(sim: &Simulation, scenario: &str, p: usize) -> String {
    let mut out = format!(
        "# scenario={scenario} p={p} sigma={} seed={} replicate={} generator={GENERATOR}\n",
        num(sim.sigma),
        sim.seed,
        sim.replicate
    );
    out.push_str("family,penalty,alpha,estimated_risk,loss\n");
    for row in &sim.rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            row.family,
            row.penalty,
            row.alpha.map(num).unwrap_or_default(),
            num(row.estimated_risk),
            num(row.loss)
        )
        .unwrap();
    }
    out
}

/// `index<TAB>signed_root_coef`, no header.
pub fn economy_tsv(profile: &[(usize, f64)]) -> String {
    let mut out = String::new();
    for (i, v) in profile {
        writeln!(out, "{i}\t{}", num(*v)).unwrap();
    }
    out
}
