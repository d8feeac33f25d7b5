//! Simulator against analytics.

use hetnet::ccdf::{rate_ccdf, sinr_ccdf, threshold_grid};
use hetnet::model::db_to_linear;
use hetnet::rate::rate_percentile;
use hetnet::sim::{
    empirical_ccdf, empirical_load_pmf, run_drops, sample_drop, Metric, ProbeResult, SimOptions,
    DEFAULT_WINDOW_KM,
};
use hetnet::{
    association_probabilities, ktier_sinr_coverage, load_pmf, mean_load, serving_distance_pdf,
    KTierForm, NetworkConfig, RatePath, TierConfig, UserClass,
};
use std::f64::consts::PI;

fn drops(cfg: &NetworkConfig, window_km: f64, n: usize, seed: u64) -> Vec<ProbeResult> {
    run_drops(
        cfg,
        &SimOptions {
            window_km,
            drops: n,
            seed,
        },
    )
    .unwrap()
}

/// Reference network with a sparse user population; loads are irrelevant
/// to SINR and association, and few users keep the drops cheap.
fn sparse_users(bias_db: f64, eta: f64) -> NetworkConfig {
    let mut cfg = NetworkConfig::reference(bias_db, eta);
    cfg.user_density = 1.0;
    cfg
}

fn ks_distance(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn class_frequencies_match_association_probabilities() {
    let cfg = sparse_users(10.0, 0.5);
    let results = drops(&cfg, 10.0, 10_000, 3);
    let n = results.len() as f64;
    let assoc = association_probabilities(&cfg).unwrap();
    for class in UserClass::ALL {
        let freq = results.iter().filter(|r| r.class == class).count() as f64 / n;
        let a = assoc.get(class);
        let halfwidth = 1.96 * (a * (1.0 - a) / n).sqrt();
        assert!(
            (freq - a).abs() <= halfwidth,
            "{class:?}: {freq} vs {a} ± {halfwidth}"
        );
    }
}

#[test]
fn nearest_ap_distance_is_rayleigh() {
    let mut cfg = sparse_users(0.0, 0.0);
    cfg.user_density = 1e-3;
    let draws = 100_000u64;
    for k in 0..2 {
        let lambda = cfg.tiers[k].density;
        let mut d: Vec<f64> = (0..draws)
            .map(|i| {
                let r = sample_drop(&cfg, 8.0, 11, i).unwrap();
                r.nearest(k, &r.probe).unwrap().1
            })
            .collect();
        let ks = ks_distance(&mut d, |z| 1.0 - (-PI * lambda * z * z).exp());
        assert!(ks <= 0.01, "tier {k}: KS {ks}");
    }
}

#[test]
fn offloaded_serving_distance_matches_density() {
    let cfg = sparse_users(10.0, 0.5);
    let results = drops(&cfg, 8.0, 100_000, 5);
    let mut d: Vec<f64> = results
        .iter()
        .filter(|r| r.class == UserClass::Offloaded)
        .map(|r| r.serving_distance)
        .collect();
    assert!(d.len() > 10_000);

    // cumulative trapezoid of the density on a fine grid
    let step = 1e-4;
    let grid: Vec<f64> = (0..20_001).map(|i| i as f64 * step).collect();
    let pdf: Vec<f64> = grid
        .iter()
        .map(|&y| serving_distance_pdf(&cfg, UserClass::Offloaded, y).unwrap())
        .collect();
    let mut cdf = vec![0.0; grid.len()];
    for i in 1..grid.len() {
        cdf[i] = cdf[i - 1] + 0.5 * step * (pdf[i] + pdf[i - 1]);
    }
    assert!((cdf[cdf.len() - 1] - 1.0).abs() < 1e-4);
    let lookup = |y: f64| {
        let i = ((y / step) as usize).min(grid.len() - 2);
        let w = (y - grid[i]) / step;
        cdf[i] + w * (cdf[i + 1] - cdf[i])
    };
    let ks = ks_distance(&mut d, lookup);
    assert!(ks <= 0.02, "KS {ks}");
}

#[test]
fn sinr_ccdf_within_confidence_band() {
    let cfg = sparse_users(10.0, 0.5);
    let th: Vec<f64> = [-3.0, 0.0, 5.0, 10.0]
        .iter()
        .map(|&db| db_to_linear(db))
        .collect();
    let analytic = sinr_ccdf(&cfg, &th).unwrap();
    let empirical = empirical_ccdf(&drops(&cfg, 20.0, 10_000, 7), &th, Metric::Sinr).unwrap();
    let hw = empirical.halfwidths.as_ref().unwrap();
    for i in 0..th.len() {
        let gap = (analytic.values[i] - empirical.values[i]).abs();
        assert!(
            gap <= hw[i],
            "threshold {}: {} vs {} ± {}",
            th[i],
            analytic.values[i],
            empirical.values[i],
            hw[i]
        );
    }
}

#[test]
fn doubling_window_stays_within_confidence_band() {
    let cfg = sparse_users(10.0, 0.0);
    let th = threshold_grid(0.1, 100.0, 10, true).unwrap();
    let base = empirical_ccdf(
        &drops(&cfg, DEFAULT_WINDOW_KM, 10_000, 13),
        &th,
        Metric::Sinr,
    )
    .unwrap();
    let wide = empirical_ccdf(
        &drops(&cfg, 2.0 * DEFAULT_WINDOW_KM, 10_000, 13),
        &th,
        Metric::Sinr,
    )
    .unwrap();
    let hw = base.halfwidths.as_ref().unwrap();
    for i in 0..th.len() {
        let gap = (base.values[i] - wide.values[i]).abs();
        assert!(gap <= hw[i], "threshold {}: gap {gap} vs {}", th[i], hw[i]);
    }
}

#[test]
fn three_tier_classes_match_simulation() {
    let mut cfg = NetworkConfig::reference(10.0, 0.5);
    cfg.tiers.push(TierConfig::new(10.0, 20.0, 5.0, 4.0));
    cfg.user_density = 1.0;
    let results = drops(&cfg, 10.0, 20_000, 17);
    let n = results.len() as f64;
    let t = 1.0;
    for j in 1..3 {
        let analytic = ktier_sinr_coverage(&cfg, j, t, KTierForm::Exact).unwrap();
        for (class, a, s) in [
            (
                UserClass::SmallUnbiased,
                analytic.a_unbiased,
                analytic.s_unbiased.unwrap(),
            ),
            (
                UserClass::Offloaded,
                analytic.a_offloaded,
                analytic.s_offloaded.unwrap(),
            ),
        ] {
            let members: Vec<&ProbeResult> = results
                .iter()
                .filter(|r| r.serving_tier == j && r.class == class)
                .collect();
            let m = members.len() as f64;
            let freq = m / n;
            assert!(
                (freq - a).abs() <= 3.0 * (a * (1.0 - a) / n).sqrt(),
                "tier {j} {class:?}: {freq} vs {a}"
            );
            let covered = members.iter().filter(|r| r.sinr > t).count() as f64 / m;
            assert!(
                (covered - s).abs() <= 3.0 * (s * (1.0 - s) / m).sqrt() + 0.01,
                "tier {j} {class:?}: {covered} vs {s}"
            );
        }
    }
}

#[test]
fn two_tier_reduction_matches_simulation() {
    let cfg = sparse_users(10.0, 0.5);
    let results = drops(&cfg, 10.0, 10_000, 19);
    let analytic = ktier_sinr_coverage(&cfg, 1, 1.0, KTierForm::Exact).unwrap();
    let offloaded: Vec<&ProbeResult> = results
        .iter()
        .filter(|r| r.class == UserClass::Offloaded)
        .collect();
    let m = offloaded.len() as f64;
    let covered = offloaded.iter().filter(|r| r.sinr > 1.0).count() as f64 / m;
    let s = analytic.s_offloaded.unwrap();
    assert!(
        (covered - s).abs() <= 3.0 * (s * (1.0 - s) / m).sqrt(),
        "{covered} vs {s}"
    );
}

#[test]
fn rate_ccdf_tracks_simulation_with_partitioning() {
    let cfg = NetworkConfig::reference(10.0, 0.3);
    let th = threshold_grid(1e4, 1e7, 20, true).unwrap();
    let analytic = rate_ccdf(&cfg, &th, RatePath::Full).unwrap();
    let empirical = empirical_ccdf(&drops(&cfg, 20.0, 2000, 23), &th, Metric::Rate).unwrap();
    assert!(analytic.sup_gap(&empirical).unwrap() <= 0.04);
}

#[test]
fn fifth_percentile_rate_within_ten_percent() {
    let cfg = NetworkConfig::reference(10.0, 0.3);
    let analytic = rate_percentile(&cfg, 0.05, RatePath::Full).unwrap();
    assert!(analytic.bracketed);
    let mut rates: Vec<f64> = drops(&cfg, 20.0, 2000, 29).iter().map(|r| r.rate).collect();
    rates.sort_by(f64::total_cmp);
    let empirical = rates[(0.05 * rates.len() as f64) as usize];
    let rel = analytic.rate_bps / empirical - 1.0;
    assert!(rel.abs() <= 0.1, "{} vs {empirical}", analytic.rate_bps);
}

#[test]
fn single_tier_load_follows_voronoi_model() {
    let cfg = NetworkConfig::new(
        vec![
            TierConfig::new(1.0, 46.0, 0.0, 3.5),
            TierConfig::new(1e-3, -50.0, 0.0, 4.0),
        ],
        10.0,
        -10.0,
        0.0,
    );
    let results = drops(&cfg, 20.0, 20_000, 31);
    let hist = empirical_load_pmf(&results, UserClass::Macro).unwrap();
    let pmf = load_pmf(&cfg, UserClass::Macro).unwrap();
    let mean = mean_load(&cfg, UserClass::Macro).unwrap();
    assert!(hist.total_variation(|n| pmf.mass(n), pmf.n_max()) <= 0.05);
    assert!((hist.mean() / mean - 1.0).abs() <= 0.02);
}

#[test]
fn without_bias_nobody_is_offloaded() {
    let results = drops(&sparse_users(0.0, 0.5), 10.0, 2000, 37);
    assert!(results.iter().all(|r| r.class != UserClass::Offloaded));
}
