//! Monte Carlo simulator.
//!
//! Each drop samples every tier as a PPP in a square window centred on the
//! probe user at the origin, draws Rayleigh fading and activity for every
//! probe link, and samples the other users only around the probe's serving
//! AP, where they can load it.

mod grid;
mod stats;

pub use stats::{empirical_ccdf, empirical_load_pmf, LoadHistogram, Metric};

use crate::error::{HetnetError, Result};
use crate::model::{NetworkConfig, UserClass};
use grid::Grid;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Side of the default window [km].
pub const DEFAULT_WINDOW_KM: f64 = 40.0;

/// Window, drop count and master seed of a simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    pub window_km: f64,
    pub drops: usize,
    pub seed: u64,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            window_km: DEFAULT_WINDOW_KM,
            drops: 2000,
            seed: 1,
        }
    }
}

/// Where a realization's randomness came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedLineage {
    pub master: u64,
    /// Stream index; the drop number when produced by [`run_drops`].
    pub stream: u64,
}

/// Axis-aligned rectangle `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl Rect {
    pub fn area(&self) -> f64 {
        (self.hi[0] - self.lo[0]) * (self.hi[1] - self.lo[1])
    }
}

/// Serving AP and class of one user.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Association {
    tier: usize,
    ap: usize,
    distance: f64,
    /// The serving tier wins even with the bias of its own tier removed.
    unbiased: bool,
}

/// One sampled network drop.
#[derive(Debug, Clone)]
pub struct Realization {
    pub window: f64,
    /// AP locations per tier.
    pub ap_points: Vec<Vec<[f64; 2]>>,
    /// Fading power of the link from each AP to the probe.
    pub fading: Vec<Vec<f64>>,
    /// Whether each AP transmits on the probe's resources.
    pub active: Vec<Vec<bool>>,
    /// Users other than the probe, sampled inside `user_region`.
    pub user_points: Vec<[f64; 2]>,
    /// Region that contains every location the probe's serving AP can serve.
    pub user_region: Rect,
    pub probe: [f64; 2],
    pub seed: SeedLineage,
    /// The window is narrower than ten typical macro inter-site distances.
    pub window_too_small: bool,
    grids: Vec<Grid>,
}

impl Realization {
    /// Nearest AP of tier `k` to `x`: index and distance.
    pub fn nearest(&self, k: usize, x: &[f64; 2]) -> Option<(usize, f64)> {
        self.grids[k]
            .nearest(x, &self.ap_points[k])
            .map(|(i, d2)| (i, d2.sqrt()))
    }

    fn associate(&self, cfg: &NetworkConfig, x: &[f64; 2]) -> Option<Association> {
        let near: Vec<Option<(usize, f64)>> =
            (0..cfg.tiers.len()).map(|k| self.nearest(k, x)).collect();
        let metric = |k: usize, biased: bool| -> f64 {
            match near[k] {
                None => f64::NEG_INFINITY,
                Some((_, d)) => {
                    let t = &cfg.tiers[k];
                    t.tx_power.ln() + if biased { t.bias.ln() } else { 0.0 } - t.ple * d.ln()
                }
            }
        };
        let tier =
            (0..cfg.tiers.len()).max_by(|&a, &b| metric(a, true).total_cmp(&metric(b, true)))?;
        let (ap, distance) = near[tier]?;
        let own = metric(tier, false);
        let unbiased = (0..cfg.tiers.len())
            .filter(|&k| k != tier)
            .all(|k| own > metric(k, true));
        Some(Association {
            tier,
            ap,
            distance,
            unbiased,
        })
    }
}

fn window_rect(half: f64) -> Rect {
    Rect {
        lo: [-half, -half],
        hi: [half, half],
    }
}

/// True if no point of the segment `a → b` is closer to `s` than to every
/// other point of `pts`.
fn segment_outside_cell(a: [f64; 2], b: [f64; 2], s: usize, pts: &[[f64; 2]]) -> bool {
    let d = [b[0] - a[0], b[1] - a[1]];
    let ps = pts[s];
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for (i, q) in pts.iter().enumerate() {
        if i == s {
            continue;
        }
        // |x − s|² ≤ |x − q|²  ⇔  2x·(q − s) ≤ |q|² − |s|²
        let w = [q[0] - ps[0], q[1] - ps[1]];
        let c = q[0] * q[0] + q[1] * q[1] - ps[0] * ps[0] - ps[1] * ps[1];
        let base = 2.0 * (a[0] * w[0] + a[1] * w[1]);
        let slope = 2.0 * (d[0] * w[0] + d[1] * w[1]);
        if slope > 0.0 {
            hi = hi.min((c - base) / slope);
        } else if slope < 0.0 {
            lo = lo.max((c - base) / slope);
        } else if base > c {
            return true;
        }
        if lo > hi {
            return true;
        }
    }
    false
}

/// Smallest square around AP `s` (clipped to the window) that holds its
/// whole Voronoi cell among `pts`, found by doubling.
fn cell_bounding_region(pts: &[[f64; 2]], s: usize, half: f64, spacing: f64) -> Rect {
    let c = pts[s];
    let mut h = 1.5 * spacing;
    loop {
        let r = Rect {
            lo: [(c[0] - h).max(-half), (c[1] - h).max(-half)],
            hi: [(c[0] + h).min(half), (c[1] + h).min(half)],
        };
        let corners = [
            [r.lo[0], r.lo[1]],
            [r.hi[0], r.lo[1]],
            [r.hi[0], r.hi[1]],
            [r.lo[0], r.hi[1]],
        ];
        let on_boundary = [
            r.lo[1] <= -half,
            r.hi[0] >= half,
            r.hi[1] >= half,
            r.lo[0] <= -half,
        ];
        let contained = (0..4)
            .filter(|&e| !on_boundary[e])
            .all(|e| segment_outside_cell(corners[e], corners[(e + 1) % 4], s, pts));
        if contained || on_boundary.iter().all(|&b| b) {
            return r;
        }
        h *= 2.0;
    }
}

fn uniform_in(rng: &mut ChaCha8Rng, r: &Rect) -> [f64; 2] {
    [
        rng.random_range(r.lo[0]..=r.hi[0]),
        rng.random_range(r.lo[1]..=r.hi[1]),
    ]
}

fn poisson_count(rng: &mut ChaCha8Rng, mean: f64) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean)
        .map(|p| p.sample(rng) as usize)
        .unwrap_or(0)
}

/// Samples the drop for stream `stream` of master seed `master`.
pub fn sample_drop(
    cfg: &NetworkConfig,
    window_km: f64,
    master: u64,
    stream: u64,
) -> Result<Realization> {
    cfg.validate()?;
    if !(window_km > 0.0) || !window_km.is_finite() {
        return Err(HetnetError::config("mc.window_km must be > 0"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    let half = 0.5 * window_km;
    let win = window_rect(half);

    let mut ap_points = Vec::with_capacity(cfg.tiers.len());
    let mut fading = Vec::with_capacity(cfg.tiers.len());
    let mut active = Vec::with_capacity(cfg.tiers.len());
    let mut grids = Vec::with_capacity(cfg.tiers.len());
    for tier in &cfg.tiers {
        let n = poisson_count(&mut rng, tier.density * win.area());
        let pts: Vec<[f64; 2]> = (0..n).map(|_| uniform_in(&mut rng, &win)).collect();
        fading.push((0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect());
        active.push(
            (0..n)
                .map(|_| tier.activity >= 1.0 || rng.random::<f64>() < tier.activity)
                .collect(),
        );
        grids.push(Grid::new(&pts, -half, window_km));
        ap_points.push(pts);
    }
    let mut r = Realization {
        window: window_km,
        ap_points,
        fading,
        active,
        user_points: Vec::new(),
        user_region: win,
        probe: [0.0, 0.0],
        seed: SeedLineage { master, stream },
        window_too_small: window_km < 10.0 / cfg.tiers[0].density.sqrt(),
        grids,
    };

    if let Some(a) = r.associate(cfg, &r.probe) {
        let spacing = 1.0 / cfg.tiers[a.tier].density.sqrt();
        r.user_region = cell_bounding_region(&r.ap_points[a.tier], a.ap, half, spacing);
        let n = poisson_count(&mut rng, cfg.user_density * r.user_region.area());
        r.user_points = (0..n)
            .map(|_| uniform_in(&mut rng, &r.user_region))
            .collect();
    }
    Ok(r)
}

/// Samples one drop with stream 0 of `seed`.
pub fn sample_realization(cfg: &NetworkConfig, window_km: f64, seed: u64) -> Result<Realization> {
    sample_drop(cfg, window_km, seed, 0)
}

/// What the probe user experiences in one drop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    /// For more than two tiers, `SmallUnbiased` and `Offloaded` refer to the
    /// unbiased and offloaded users of `serving_tier`.
    pub class: UserClass,
    pub serving_tier: usize,
    pub serving_distance: f64,
    pub signal: f64,
    /// Received power from active non-serving APs, per tier.
    pub interference: Vec<f64>,
    /// The probe is offloaded onto protected resources and ignores tier 0.
    pub protected: bool,
    pub noise: f64,
    pub sinr: f64,
    /// Users sharing the probe's resources, probe included.
    pub load: usize,
    /// Unbiased users at the serving AP, probe included if unbiased.
    pub load_unbiased: usize,
    /// Offloaded users at the serving AP, probe included if offloaded.
    pub load_offloaded: usize,
    pub rate: f64,
    /// Rate after the serving AP's backhaul is split over all its users.
    pub rate_backhaul: f64,
}

impl ProbeResult {
    /// Users at the serving AP, probe included.
    pub fn total_load(&self) -> usize {
        self.load_unbiased + self.load_offloaded
    }
}

/// Associates the probe and every sampled user, counts loads and computes
/// the probe's SINR and rates. `None` if no AP was sampled at all.
pub fn evaluate_probe(r: &Realization, cfg: &NetworkConfig) -> Option<ProbeResult> {
    let a = r.associate(cfg, &r.probe)?;
    let class = match (a.tier, a.unbiased) {
        (0, _) => UserClass::Macro,
        (_, true) => UserClass::SmallUnbiased,
        (_, false) => UserClass::Offloaded,
    };

    let (mut load_unbiased, mut load_offloaded) = (1usize, 0usize);
    if !a.unbiased {
        (load_unbiased, load_offloaded) = (0, 1);
    }
    for u in &r.user_points {
        if let Some(b) = r.associate(cfg, u) {
            if b.tier == a.tier && b.ap == a.ap {
                if b.unbiased {
                    load_unbiased += 1;
                } else {
                    load_offloaded += 1;
                }
            }
        }
    }

    let serving = &cfg.tiers[a.tier];
    let signal = serving.tx_power * r.fading[a.tier][a.ap] * a.distance.powf(-serving.ple);
    let mut interference = vec![0.0; cfg.tiers.len()];
    for (k, tier) in cfg.tiers.iter().enumerate() {
        let mut sum = 0.0;
        for (i, p) in r.ap_points[k].iter().enumerate() {
            if (k == a.tier && i == a.ap) || !r.active[k][i] {
                continue;
            }
            let d2 = (p[0] - r.probe[0]).powi(2) + (p[1] - r.probe[1]).powi(2);
            sum += r.fading[k][i] * d2.powf(-0.5 * tier.ple);
        }
        interference[k] = tier.tx_power * sum;
    }
    let protected = class == UserClass::Offloaded && cfg.partitioned();
    let counted: f64 = interference
        .iter()
        .enumerate()
        .filter(|&(k, _)| !(protected && k == 0))
        .map(|(_, v)| v)
        .sum();
    let sinr = signal / (counted + cfg.noise_power);

    let total = load_unbiased + load_offloaded;
    let load = if a.tier == 0 || !cfg.partitioned() {
        total
    } else if a.unbiased {
        load_unbiased
    } else {
        load_offloaded
    };
    let rate = cfg.bandwidth / (class.resource_divisor(cfg.eta) * load as f64) * sinr.ln_1p()
        / std::f64::consts::LN_2;
    let rate_backhaul = match serving.backhaul {
        Some(c) => rate.min(c / total as f64),
        None => rate,
    };
    Some(ProbeResult {
        class,
        serving_tier: a.tier,
        serving_distance: a.distance,
        signal,
        interference,
        protected,
        noise: cfg.noise_power,
        sinr,
        load,
        load_unbiased,
        load_offloaded,
        rate,
        rate_backhaul,
    })
}

/// Runs `opts.drops` independent drops; drop `i` uses stream `i` of
/// `opts.seed`, so results do not depend on thread scheduling.
pub fn run_drops(cfg: &NetworkConfig, opts: &SimOptions) -> Result<Vec<ProbeResult>> {
    cfg.validate()?;
    let out: Vec<Option<ProbeResult>> = (0..opts.drops as u64)
        .into_par_iter()
        .map(|i| sample_drop(cfg, opts.window_km, opts.seed, i).map(|r| evaluate_probe(&r, cfg)))
        .collect::<Result<_>>()?;
    Ok(out.into_iter().flatten().collect())
}
