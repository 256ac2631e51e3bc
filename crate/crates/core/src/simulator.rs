//! Seeded Monte Carlo engine.
//!
//! Per trial, every user draws an independent exponential gain for its direct
//! and interference links; the user with the largest gain ratio wins. Draws
//! come from counter-based ChaCha streams keyed by `(master seed, user,
//! link)`, with the word position tied to the trial index, so any partition
//! of the trial range into blocks reproduces exactly the same variates.
//! Blocks run in parallel and merge in block order; the result is
//! bit-identical for any worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{selection_probabilities, AlphaVector, AnalyticMethod, SelectionProbabilities};
use crate::channel::{exp_inverse_cdf, instantaneous_snr, PowerMode, PrimarySide, UserLink};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureConfig;

pub const DEFAULT_BETA: f64 = 3.0;
pub const DEFAULT_TRIALS: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 42;

/// Trials per scheduling block. Results are independent of this partition by
/// construction; it only bounds per-task work.
const BLOCK_TRIALS: u64 = 1 << 16;

// Stream ids: direct link of user k -> 4k, interference link -> 4k + 1.
// The primary interference draw, shared by all users, lives on id 3, which
// no user stream can occupy.
const PD_STREAM: u64 = 3;

/// Full description of one simulated system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub users: Vec<UserLink>,
    pub beta: f64,
    pub primary: PrimarySide,
    pub power_mode: PowerMode,
    pub trials: u64,
    pub seed: u64,
    /// Draw the primary interference gain and record per-user mean SNR.
    /// Selection frequencies do not depend on this.
    pub record_snr: bool,
}

impl Scenario {
    /// Builds a scenario from `(d_sd, d_sp)` pairs with default controls.
    pub fn from_distances(distances: &[(f64, f64)], beta: f64) -> Result<Self> {
        let users = distances
            .iter()
            .map(|&(d_sd, d_sp)| UserLink::new(d_sd, d_sp, beta))
            .collect::<Result<Vec<_>>>()?;
        let scenario = Self {
            users,
            beta,
            primary: PrimarySide::default(),
            power_mode: PowerMode::default(),
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            record_snr: false,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    /// Builds a scenario whose geometry realizes the given gain ratios
    /// (unit direct-link distances, `d_sp = alpha^(-1/beta)`).
    pub fn from_alphas(alphas: &[f64], beta: f64) -> Result<Self> {
        let distances = alphas
            .iter()
            .map(|&a| {
                if a <= 0.0 || !a.is_finite() {
                    return Err(Error::NonPositive {
                        name: "alpha",
                        value: a,
                    });
                }
                Ok((1.0, a.powf(-1.0 / beta)))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_distances(&distances, beta)
    }

    pub fn validate(&self) -> Result<()> {
        if self.users.len() < 2 {
            return Err(Error::TooFewUsers {
                got: self.users.len(),
            });
        }
        if self.beta <= 0.0 || self.beta.is_nan() {
            return Err(Error::NonPositive {
                name: "beta",
                value: self.beta,
            });
        }
        if self.trials == 0 {
            return Err(Error::ZeroTrials);
        }
        self.primary.validate()?;
        for user in &self.users {
            let smallest = user.delta_sd_sq.min(user.delta_sp_sq);
            if smallest <= 0.0 || smallest.is_nan() {
                return Err(Error::NonPositive {
                    name: "average gain",
                    value: smallest,
                });
            }
        }
        Ok(())
    }

    pub fn alpha_vector(&self) -> Result<AlphaVector> {
        AlphaVector::new(self.users.iter().map(|u| u.alpha).collect())
    }
}

/// Tallies from one Monte Carlo run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    /// Per-user selection tallies; sums to `trials`.
    pub counts: Vec<u64>,
    /// `counts / trials`.
    pub freqs: Vec<f64>,
    /// Per-user `1.96 * sqrt(f (1 - f) / trials)`.
    pub ci95_halfwidth: Vec<f64>,
    /// Per-user mean of `10 log10(snr)` over winning trials, when recorded;
    /// `0.0` for a user that never won.
    pub mean_snr_db: Option<Vec<f64>>,
    /// In exact power mode, the number of (trial, user) draws where the
    /// maximum-power cap was the binding constraint.
    pub pm_cap_binds: Option<u64>,
    pub seed: u64,
    pub trials: u64,
}

/// Index of the user with the largest `gains_sd / gains_sp` ratio; ties go
/// to the smallest index.
pub fn select_user(gains_sd: &[f64], gains_sp: &[f64]) -> Result<usize> {
    if gains_sd.len() != gains_sp.len() {
        return Err(Error::LengthMismatch {
            left: gains_sd.len(),
            right: gains_sp.len(),
        });
    }
    if gains_sd.len() < 2 {
        return Err(Error::TooFewUsers {
            got: gains_sd.len(),
        });
    }
    for &g in gains_sd.iter().chain(gains_sp.iter()) {
        if g <= 0.0 || !g.is_finite() {
            return Err(Error::NonPositive {
                name: "gain",
                value: g,
            });
        }
    }
    Ok(argmax_ratio(gains_sd, gains_sp))
}

#[inline]
fn argmax_ratio(gains_sd: &[f64], gains_sp: &[f64]) -> usize {
    let mut best = 0;
    let mut best_metric = gains_sd[0] / gains_sp[0];
    for i in 1..gains_sd.len() {
        let metric = gains_sd[i] / gains_sp[i];
        if metric > best_metric {
            best = i;
            best_metric = metric;
        }
    }
    best
}

fn stream_rng(seed: u64, stream: u64, first_trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    // One u64 per trial and stream: two 32-bit words.
    rng.set_word_pos(u128::from(first_trial) * 2);
    rng
}

#[derive(Clone)]
struct BlockTally {
    counts: Vec<u64>,
    snr_db_sums: Vec<f64>,
    cap_binds: u64,
}

fn run_block(scenario: &Scenario, lo: u64, hi: u64) -> BlockTally {
    let k = scenario.users.len();
    let seed = scenario.seed;

    let mut sd_rngs: Vec<ChaCha8Rng> = (0..k)
        .map(|i| stream_rng(seed, 4 * i as u64, lo))
        .collect();
    let mut sp_rngs: Vec<ChaCha8Rng> = (0..k)
        .map(|i| stream_rng(seed, 4 * i as u64 + 1, lo))
        .collect();
    let mut pd_rng = scenario
        .record_snr
        .then(|| stream_rng(seed, PD_STREAM, lo));

    let cap_gain = scenario.primary.p_a / scenario.primary.p_m;
    let track_cap = scenario.power_mode == PowerMode::Exact;

    let mut tally = BlockTally {
        counts: vec![0; k],
        snr_db_sums: vec![0.0; k],
        cap_binds: 0,
    };
    let mut gains_sd = vec![0.0f64; k];
    let mut gains_sp = vec![0.0f64; k];

    for _ in lo..hi {
        for i in 0..k {
            gains_sd[i] = exp_inverse_cdf(scenario.users[i].delta_sd_sq, rand::RngCore::next_u64(&mut sd_rngs[i]));
        }
        for i in 0..k {
            gains_sp[i] = exp_inverse_cdf(scenario.users[i].delta_sp_sq, rand::RngCore::next_u64(&mut sp_rngs[i]));
        }

        let winner = argmax_ratio(&gains_sd, &gains_sp);
        tally.counts[winner] += 1;

        if track_cap {
            tally.cap_binds += gains_sp.iter().filter(|&&g| g <= cap_gain).count() as u64;
        }

        if let Some(pd) = pd_rng.as_mut() {
            let g_pd = exp_inverse_cdf(scenario.primary.delta_pd_sq, rand::RngCore::next_u64(pd));
            let snr = instantaneous_snr(
                gains_sd[winner],
                gains_sp[winner],
                g_pd,
                &scenario.primary,
                scenario.power_mode,
            )
            .expect("sampled gains are strictly positive");
            tally.snr_db_sums[winner] += 10.0 * snr.log10();
        }
    }
    tally
}

/// Runs the scenario's trials and tallies selection frequencies.
///
/// Deterministic in `(seed, trials, K)`: the same scenario yields a
/// bit-identical report no matter how many threads execute the blocks.
pub fn run_monte_carlo(scenario: &Scenario) -> Result<McReport> {
    scenario.validate()?;
    let k = scenario.users.len();
    let trials = scenario.trials;

    let n_blocks = trials.div_ceil(BLOCK_TRIALS);
    let block_tallies: Vec<BlockTally> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let lo = b * BLOCK_TRIALS;
            let hi = (lo + BLOCK_TRIALS).min(trials);
            run_block(scenario, lo, hi)
        })
        .collect();

    // Merge in block order so float sums are reproducible.
    let mut counts = vec![0u64; k];
    let mut snr_db_sums = vec![0.0f64; k];
    let mut cap_binds = 0u64;
    for tally in block_tallies {
        for i in 0..k {
            counts[i] += tally.counts[i];
            snr_db_sums[i] += tally.snr_db_sums[i];
        }
        cap_binds += tally.cap_binds;
    }

    let freqs: Vec<f64> = counts.iter().map(|&c| c as f64 / trials as f64).collect();
    let ci95_halfwidth: Vec<f64> = freqs
        .iter()
        .map(|&f| 1.96 * (f * (1.0 - f) / trials as f64).sqrt())
        .collect();
    let mean_snr_db = scenario.record_snr.then(|| {
        snr_db_sums
            .iter()
            .zip(&counts)
            .map(|(&s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
            .collect()
    });

    Ok(McReport {
        counts,
        freqs,
        ci95_halfwidth,
        mean_snr_db,
        pm_cap_binds: (scenario.power_mode == PowerMode::Exact).then_some(cap_binds),
        seed: scenario.seed,
        trials,
    })
}

/// One user's row of an analytic-vs-empirical comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub user: usize,
    pub analytic: f64,
    pub empirical: f64,
    pub abs_diff: f64,
    pub ci95: f64,
    /// `3 sqrt(p (1 - p) / trials)` with `p` the analytic probability.
    pub bound_3sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McComparison {
    pub rows: Vec<ComparisonRow>,
    /// True when every user's |analytic - empirical| is within 3 sigma.
    pub pass: bool,
}

/// Checks an existing Monte Carlo report against an analytic vector.
pub fn compare_to_analytic(analytic: &[f64], report: &McReport) -> Result<McComparison> {
    if analytic.len() != report.freqs.len() {
        return Err(Error::LengthMismatch {
            left: analytic.len(),
            right: report.freqs.len(),
        });
    }
    let trials = report.trials as f64;
    let rows: Vec<ComparisonRow> = analytic
        .iter()
        .enumerate()
        .map(|(user, &p)| {
            let empirical = report.freqs[user];
            ComparisonRow {
                user,
                analytic: p,
                empirical,
                abs_diff: (p - empirical).abs(),
                ci95: report.ci95_halfwidth[user],
                bound_3sigma: 3.0 * (p * (1.0 - p) / trials).sqrt(),
            }
        })
        .collect();
    let pass = rows.iter().all(|r| r.abs_diff <= r.bound_3sigma);
    Ok(McComparison { rows, pass })
}

/// Runs the scenario, computes the analytic probabilities for its gain
/// ratios, and compares the two at the 3-sigma binomial bound.
pub fn mc_vs_analytic(
    scenario: &Scenario,
    method: AnalyticMethod,
    cfg: &QuadratureConfig,
) -> Result<(SelectionProbabilities, McReport, McComparison)> {
    let alphas = scenario.alpha_vector()?;
    let analytic = selection_probabilities(&alphas, method, cfg)?;
    let report = run_monte_carlo(scenario)?;
    let comparison = compare_to_analytic(analytic.probs(), &report)?;
    Ok((analytic, report, comparison))
}
