//! One function per run mode. Each returns its CSV files and summary lines.

use crate::config::{ConfigError, ExperimentConfig, ThresholdKind};
use clap::ValueEnum;
use hetnet::ccdf::{rate_backhaul_ccdf, rate_ccdf, sinr_ccdf, threshold_grid, CcdfCurve};
use hetnet::claims::{bias_upper_bound, check_claim1, check_claim3};
use hetnet::closed::{sinr_coverage_alpha4_closed, ClosedFormParams};
use hetnet::model::db_to_linear;
use hetnet::sim::{empirical_ccdf, run_drops, Metric};
use hetnet::{
    optimize_joint, rate_coverage, rate_coverage_backhaul, sinr_coverage, Coverage, NetworkConfig,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Sinr,
    Rate,
    Backhaul,
    Validate,
    Optimize,
    Claims,
}

pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

pub struct Report {
    pub files: Vec<OutputFile>,
    pub summary: Vec<String>,
    /// False when a claim check failed.
    pub passed: bool,
}

impl Report {
    fn new(files: Vec<OutputFile>, summary: Vec<String>) -> Self {
        Report {
            files,
            summary,
            passed: true,
        }
    }
}

pub fn run(mode: Mode, exp: &ExperimentConfig) -> anyhow::Result<Report> {
    let cfg = exp.network()?;
    match mode {
        Mode::Sinr => sinr(exp, &cfg),
        Mode::Rate => rate(exp, &cfg),
        Mode::Backhaul => backhaul(exp, &cfg),
        Mode::Validate => validate(exp, &cfg),
        Mode::Optimize => optimize(exp, &cfg),
        Mode::Claims => claims(exp, &cfg),
    }
}

const CLASS_COLUMNS: &str = "coverage,class_macro,class_small,class_offloaded";

fn or_blank(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn coverage_row(out: &mut String, threshold: f64, c: &Coverage) {
    let [m, s, o] = c.per_class;
    writeln!(
        out,
        "{threshold},{},{},{},{}",
        c.total,
        or_blank(m),
        or_blank(s),
        or_blank(o)
    )
    .unwrap();
}

fn file(name: &str, contents: String) -> OutputFile {
    OutputFile {
        name: name.to_string(),
        contents,
    }
}

fn sinr(exp: &ExperimentConfig, cfg: &NetworkConfig) -> anyhow::Result<Report> {
    let th_db = exp.thresholds(ThresholdKind::Sinr)?;
    let rows: Vec<Coverage> = th_db
        .par_iter()
        .map(|&db| sinr_coverage(cfg, db_to_linear(db)))
        .collect::<hetnet::Result<_>>()?;
    let mut out = format!("threshold_db,{CLASS_COLUMNS}\n");
    for (db, c) in th_db.iter().zip(&rows) {
        coverage_row(&mut out, *db, c);
    }
    Ok(Report::new(
        vec![file("sinr.csv", out)],
        vec![format!("{} SINR thresholds", th_db.len())],
    ))
}

fn rate(exp: &ExperimentConfig, cfg: &NetworkConfig) -> anyhow::Result<Report> {
    let th = exp.thresholds(ThresholdKind::Rate)?;
    let rows: Vec<Coverage> = th
        .par_iter()
        .map(|&rho| rate_coverage(cfg, rho))
        .collect::<hetnet::Result<_>>()?;
    let mut out = format!("threshold_bps,{CLASS_COLUMNS}\n");
    for (rho, c) in th.iter().zip(&rows) {
        coverage_row(&mut out, *rho, c);
    }
    Ok(Report::new(
        vec![file("rate.csv", out)],
        vec![format!("{} rate thresholds", th.len())],
    ))
}

fn backhaul(exp: &ExperimentConfig, cfg: &NetworkConfig) -> anyhow::Result<Report> {
    if cfg.tiers.iter().all(|t| t.backhaul.is_none()) {
        return Err(ConfigError(
            "backhaul mode needs tiers[].backhaul_mbps on at least one tier".into(),
        )
        .into());
    }
    let th = exp.thresholds(ThresholdKind::Rate)?;
    let rows: Vec<(Coverage, f64)> = th
        .par_iter()
        .map(|&rho| {
            Ok((
                rate_coverage_backhaul(cfg, rho)?,
                rate_coverage(cfg, rho)?.total,
            ))
        })
        .collect::<hetnet::Result<_>>()?;
    let mut out = format!("threshold_bps,{CLASS_COLUMNS},coverage_unlimited\n");
    for (rho, (c, unlimited)) in th.iter().zip(&rows) {
        let mut line = String::new();
        coverage_row(&mut line, *rho, c);
        writeln!(out, "{},{unlimited}", line.trim_end()).unwrap();
    }
    Ok(Report::new(
        vec![file("backhaul.csv", out)],
        vec![format!("{} rate thresholds", th.len())],
    ))
}

fn gap_table(
    header: &str,
    thresholds: &[f64],
    analytic: &CcdfCurve,
    empirical: &CcdfCurve,
) -> (String, f64) {
    let mut out = format!("{header},analytic,empirical,ci_halfwidth,abs_gap\n");
    let hw = empirical
        .halfwidths
        .clone()
        .unwrap_or_else(|| vec![0.0; thresholds.len()]);
    let mut worst = 0.0f64;
    for i in 0..thresholds.len() {
        let gap = (analytic.values[i] - empirical.values[i]).abs();
        worst = worst.max(gap);
        writeln!(
            out,
            "{},{},{},{},{gap}",
            thresholds[i], analytic.values[i], empirical.values[i], hw[i]
        )
        .unwrap();
    }
    (out, worst)
}

fn validate(exp: &ExperimentConfig, cfg: &NetworkConfig) -> anyhow::Result<Report> {
    let opts = exp.sim_options();
    let results = run_drops(cfg, &opts)?;
    let mut files = Vec::new();
    let mut summary = vec![format!(
        "{} drops, window {} km, seed {}",
        results.len(),
        opts.window_km,
        opts.seed
    )];

    let th_db = exp.thresholds(ThresholdKind::Sinr)?;
    let th_sinr: Vec<f64> = th_db.iter().map(|&db| db_to_linear(db)).collect();
    let (out, gap) = gap_table(
        "threshold_db",
        &th_db,
        &sinr_ccdf(cfg, &th_sinr)?,
        &empirical_ccdf(&results, &th_sinr, Metric::Sinr)?,
    );
    files.push(file("validate_sinr.csv", out));
    summary.push(format!("max gap sinr {gap:.4}"));

    let th_rate = exp.thresholds(ThresholdKind::Rate)?;
    let (out, gap) = gap_table(
        "threshold_bps",
        &th_rate,
        &rate_ccdf(cfg, &th_rate, Default::default())?,
        &empirical_ccdf(&results, &th_rate, Metric::Rate)?,
    );
    files.push(file("validate_rate.csv", out));
    summary.push(format!("max gap rate {gap:.4}"));

    if cfg.tiers.iter().any(|t| t.backhaul.is_some()) {
        let (out, gap) = gap_table(
            "threshold_bps",
            &th_rate,
            &rate_backhaul_ccdf(cfg, &th_rate)?,
            &empirical_ccdf(&results, &th_rate, Metric::RateBackhaul)?,
        );
        files.push(file("validate_backhaul.csv", out));
        summary.push(format!("max gap backhaul rate {gap:.4}"));
    }
    Ok(Report::new(files, summary))
}

fn optimize(exp: &ExperimentConfig, cfg: &NetworkConfig) -> anyhow::Result<Report> {
    let spec = exp
        .sweep
        .as_ref()
        .ok_or_else(|| ConfigError("sweep is required in optimize mode".into()))?;
    let opt = optimize_joint(cfg, spec)?;
    let mut surface = String::from("bias_db,eta,objective,error\n");
    for cell in &opt.surface {
        let error = cell.error.as_deref().unwrap_or("").replace(',', ";");
        writeln!(
            surface,
            "{},{},{},{error}",
            cell.bias_db,
            cell.eta,
            or_blank(cell.value)
        )
        .unwrap();
    }
    let best = format!(
        "bias_db,eta,objective,offload_fraction\n{},{},{},{}\n",
        opt.bias_db, opt.eta, opt.objective, opt.offload_fraction
    );
    let mut summary: Vec<String> = opt
        .failed_cells()
        .map(|c| {
            format!(
                "cell bias_db={} eta={} failed: {}",
                c.bias_db,
                c.eta,
                c.error.as_deref().unwrap_or("")
            )
        })
        .collect();
    summary.push(format!(
        "optimum bias {} dB, eta {}: objective {}, offload fraction {:.4}",
        opt.bias_db, opt.eta, opt.objective, opt.offload_fraction
    ));
    Ok(Report::new(
        vec![file("surface.csv", surface), file("optimum.csv", best)],
        summary,
    ))
}

/// Bias maximizing partitioned closed-form coverage on a log grid up to 10⁶.
fn grid_argmax_bias(a: f64, p: f64, t: f64) -> hetnet::Result<f64> {
    let mut best = (f64::NEG_INFINITY, 1.0);
    for i in 0..=6000 {
        let b = 10f64.powf(i as f64 / 1000.0);
        let s = sinr_coverage_alpha4_closed(ClosedFormParams::new(a, p, b)?, t, true)?;
        if s > best.0 {
            best = (s, b);
        }
    }
    Ok(best.1)
}

fn claims(exp: &ExperimentConfig, cfg: &NetworkConfig) -> anyhow::Result<Report> {
    cfg.validate_two_tier()?;
    let (m, s) = (cfg.macro_tier(), cfg.small_tier());
    let (a, p) = (s.density / m.density, s.tx_power / m.tx_power);
    let th_db = exp.thresholds(ThresholdKind::Sinr)?;
    let th: Vec<f64> = th_db.iter().map(|&db| db_to_linear(db)).collect();

    let mut out = String::from("check,threshold_db,value,limit,passed\n");
    let mut passed = true;
    let b_grid = threshold_grid(1.0, 100.0, 41, true)?;
    let monotone = check_claim1(&[(a, p)], &b_grid, &th)?;
    for (db, &t) in th_db.iter().zip(&th) {
        let at_t = monotone.points.iter().filter(|q| q.t == t);
        let worst = at_t
            .clone()
            .map(|q| q.derivative)
            .fold(f64::NEG_INFINITY, f64::max);
        let verdict = if at_t.clone().any(|q| q.in_scope) {
            let ok = worst <= hetnet::claims::DERIVATIVE_TOL;
            passed &= ok;
            ok.to_string()
        } else {
            "out_of_scope".to_string()
        };
        writeln!(
            out,
            "unpartitioned_bias_derivative,{db},{worst},{},{verdict}",
            hetnet::claims::DERIVATIVE_TOL
        )
        .unwrap();
    }
    for (db, &t) in th_db.iter().zip(&th) {
        let bound = bias_upper_bound(a, p, t)?.bias_bound;
        let argmax = grid_argmax_bias(a, p, t)?;
        let ok = bound >= argmax;
        passed &= ok;
        writeln!(out, "partitioned_optimal_bias,{db},{argmax},{bound},{ok}").unwrap();
    }
    for (db, &t) in th_db.iter().zip(&th) {
        let r = check_claim3(a, p, t)?;
        passed &= r.passed();
        writeln!(
            out,
            "full_offload_margin,{db},{},0,{}",
            r.margin,
            r.passed()
        )
        .unwrap();
    }

    let mut summary = vec![format!("density ratio {a}, power ratio {p}")];
    if cfg.tiers.iter().any(|t| t.ple != 4.0) || cfg.noise_power > 0.0 {
        summary.push("note: checks use the noise-free closed forms at path-loss exponent 4".into());
    }
    summary.push(if passed {
        "all claim checks passed".into()
    } else {
        "claim checks FAILED".into()
    });
    Ok(Report {
        files: vec![file("claims.csv", out)],
        summary,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coverage_row_leaves_empty_classes_blank() {
        let mut s = String::new();
        coverage_row(
            &mut s,
            1e4,
            &Coverage {
                total: 0.5,
                per_class: [Some(0.25), None, Some(1.0)],
            },
        );
        assert_eq!(s, "10000,0.5,0.25,,1\n");
    }

    #[test]
    fn argmax_of_unit_ratio_network_is_finite() {
        let b = grid_argmax_bias(1.0, 0.01, 0.5).unwrap();
        assert!(b > 1.0 && b < 1e6);
    }
}
