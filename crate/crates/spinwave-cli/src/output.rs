//! Data formatting: 9-significant-digit CSV, JSON datasets, and the
//! JSON sidecar with the run's derived quantities.

use crate::config::Resolved;
use serde::Serialize;
use spinwave::{oscillation_period, BipartitePoint, MinScanSummary, TripartitePoint};

/// Format with 9 significant digits, plain decimal notation where it is
/// compact (exponent -4..9), scientific otherwise; trailing zeros
/// trimmed. Deterministic for a given value.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.8e}", x);
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("numeric exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let fixed = format!("{:.*}", decimals, x);
        let trimmed = fixed.trim_end_matches('0').trim_end_matches('.');
        if trimmed == "-0" {
            "0".to_string()
        } else {
            trimmed.to_string()
        }
    } else {
        let mant = mant.trim_end_matches('0').trim_end_matches('.');
        format!("{mant}e{exp}")
    }
}

pub const BIPARTITE_HEADER: &str = "t,V,n1_total,n1_fluct,n2_total,n2_fluct";
pub const TRIPARTITE_HEADER: &str = "t,V12,V13,V23,g1,g2,g3,n1_fluct,n2_fluct,n3_fluct";

fn bipartite_row(p: &BipartitePoint) -> [f64; 6] {
    [
        p.t,
        p.v,
        p.n1.total,
        p.n1.fluctuation,
        p.n2.total,
        p.n2.fluctuation,
    ]
}

fn tripartite_row(p: &TripartitePoint) -> [f64; 10] {
    [
        p.t,
        p.v12,
        p.v13,
        p.v23,
        p.gains.g1,
        p.gains.g2,
        p.gains.g3,
        p.n1.fluctuation,
        p.n2.fluctuation,
        p.n3.fluctuation,
    ]
}

fn csv<const N: usize>(header: &str, rows: impl Iterator<Item = [f64; N]>) -> String {
    let mut out = String::with_capacity(4096);
    out.push_str(header);
    out.push('\n');
    for row in rows {
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            first = false;
            out.push_str(&fmt_sig(v));
        }
        out.push('\n');
    }
    out
}

fn json<const N: usize>(header: &str, rows: impl Iterator<Item = [f64; N]>) -> String {
    let keys: Vec<&str> = header.split(',').collect();
    let objects: Vec<serde_json::Value> = rows
        .map(|row| {
            let map: serde_json::Map<String, serde_json::Value> = keys
                .iter()
                .zip(row)
                .map(|(k, v)| (k.to_string(), serde_json::json!(v)))
                .collect();
            serde_json::Value::Object(map)
        })
        .collect();
    let mut text =
        serde_json::to_string_pretty(&objects).expect("dataset serialization cannot fail");
    text.push('\n');
    text
}

pub fn bipartite_csv(points: &[BipartitePoint]) -> String {
    csv(BIPARTITE_HEADER, points.iter().map(bipartite_row))
}

pub fn tripartite_csv(points: &[TripartitePoint]) -> String {
    csv(TRIPARTITE_HEADER, points.iter().map(tripartite_row))
}

pub fn bipartite_json(points: &[BipartitePoint]) -> String {
    json(BIPARTITE_HEADER, points.iter().map(bipartite_row))
}

pub fn tripartite_json(points: &[TripartitePoint]) -> String {
    json(TRIPARTITE_HEADER, points.iter().map(tripartite_row))
}

#[derive(Serialize)]
pub struct ParamsJson {
    pub k1: f64,
    pub k2: f64,
    pub k3: Option<f64>,
    pub c: f64,
    pub n_atoms: u64,
    pub t_max: f64,
    pub steps: usize,
}

#[derive(Serialize)]
pub struct BetaJson {
    pub re: f64,
    pub im: f64,
}

/// Sidecar written next to sweep output files.
#[derive(Serialize)]
pub struct Sidecar {
    pub params: ParamsJson,
    pub convention: &'static str,
    pub beta: BetaJson,
    pub period_exact: Option<f64>,
    pub period_approx: Option<f64>,
    /// Grid minimum of the swept criterion (Duan V for two fields,
    /// max(V12, V13, V23) for three).
    pub min_v: f64,
    pub argmin_t: f64,
}

/// Report printed by `period`.
#[derive(Serialize)]
pub struct PeriodReport {
    pub k1: f64,
    pub k2: f64,
    pub k3: Option<f64>,
    pub c: f64,
    pub coupling_gap: f64,
    pub beta: BetaJson,
    pub period_exact: Option<f64>,
    pub period_approx: Option<f64>,
}

pub fn period_report(r: &Resolved) -> PeriodReport {
    let beta = r.params.beta();
    let period = oscillation_period(&r.params).ok();
    PeriodReport {
        k1: r.params.k1(),
        k2: r.params.k2(),
        k3: r.params.k3(),
        c: r.params.c(),
        coupling_gap: r.params.coupling_gap(),
        beta: BetaJson {
            re: beta.re,
            im: beta.im,
        },
        period_exact: period.as_ref().map(|p| p.exact),
        period_approx: period.as_ref().map(|p| p.approx),
    }
}

/// Report printed by `min-scan`.
#[derive(Serialize)]
pub struct MinScanReport {
    pub params: ParamsJson,
    pub convention: &'static str,
    pub criterion: &'static str,
    pub min_v: f64,
    pub argmin_t: f64,
    pub ratio_half_period: Option<f64>,
    pub empirical_period: Option<f64>,
}

pub fn params_json(r: &Resolved) -> ParamsJson {
    ParamsJson {
        k1: r.params.k1(),
        k2: r.params.k2(),
        k3: r.params.k3(),
        c: r.params.c(),
        n_atoms: r.n_atoms,
        t_max: r.t_max,
        steps: r.steps,
    }
}

pub fn sidecar(r: &Resolved, min_v: f64, argmin_t: f64) -> Sidecar {
    let beta = r.params.beta();
    let period = oscillation_period(&r.params).ok();
    Sidecar {
        params: params_json(r),
        convention: r.convention_name(),
        beta: BetaJson {
            re: beta.re,
            im: beta.im,
        },
        period_exact: period.as_ref().map(|p| p.exact),
        period_approx: period.as_ref().map(|p| p.approx),
        min_v,
        argmin_t,
    }
}

pub fn min_scan_report(r: &Resolved, s: &MinScanSummary) -> MinScanReport {
    MinScanReport {
        params: params_json(r),
        convention: r.convention_name(),
        criterion: if r.params.is_tripartite() {
            "max(V12,V13,V23)"
        } else {
            "duan"
        },
        min_v: s.min_v,
        argmin_t: s.argmin_t,
        ratio_half_period: s.ratio_half_period,
        empirical_period: s.empirical_period,
    }
}
