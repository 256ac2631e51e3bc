//! Physical-layer model.
//!
//! Distances map to average link gains through a power law, per-link gain
//! samples are exponential (Rayleigh-faded amplitudes), the secondary
//! transmitter caps its power against an interference threshold, and the
//! resulting instantaneous SNR at the destination follows from those pieces.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the secondary transmitter resolves its power against the cap.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PowerMode {
    /// `min(p_m, p_a / g_sp)`: the cap on the maximum transmit power binds.
    Exact,
    /// `p_a / g_sp`: assumes the maximum transmit power is large enough that
    /// the interference threshold is always the active constraint.
    #[default]
    Approx,
}

/// Average gain of a link at distance `d` under path-loss exponent `beta`:
/// `d^(-beta)`.
pub fn gains_from_distance(d: f64, beta: f64) -> Result<f64> {
    check_positive("distance", d)?;
    check_positive("beta", beta)?;
    Ok(d.powf(-beta))
}

/// One secondary user's geometry and the channel statistics derived from it.
///
/// `delta_sd_sq` and `delta_sp_sq` are the average gains of the direct and
/// interference links; `alpha` is their ratio `delta_sp_sq / delta_sd_sq`,
/// the single parameter that governs the user's scheduling metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserLink {
    pub d_sd: f64,
    pub d_sp: f64,
    pub delta_sd_sq: f64,
    pub delta_sp_sq: f64,
    pub alpha: f64,
}

impl UserLink {
    /// Validates the distances and caches the derived gains for `beta`.
    pub fn new(d_sd: f64, d_sp: f64, beta: f64) -> Result<Self> {
        let delta_sd_sq = gains_from_distance(d_sd, beta).map_err(rename_to("d_sd"))?;
        let delta_sp_sq = gains_from_distance(d_sp, beta).map_err(rename_to("d_sp"))?;
        let mut link = Self {
            d_sd,
            d_sp,
            delta_sd_sq,
            delta_sp_sq,
            alpha: f64::NAN,
        };
        link.alpha = alpha_of(&link, beta)?;
        Ok(link)
    }
}

fn rename_to(name: &'static str) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::NonPositive { value, .. } => Error::NonPositive { name, value },
        other => other,
    }
}

/// Ratio of the link's average gains, computed as `(d_sd / d_sp)^beta`.
///
/// Working on the distance ratio directly keeps the value exact under joint
/// rescaling of both distances.
pub fn alpha_of(link: &UserLink, beta: f64) -> Result<f64> {
    check_positive("d_sd", link.d_sd)?;
    check_positive("d_sp", link.d_sp)?;
    check_positive("beta", beta)?;
    Ok((link.d_sd / link.d_sp).powf(beta))
}

/// Primary-side parameters: transmit power, interference threshold, the
/// secondary power cap, noise power, and the average gain of the primary
/// interference link into the destination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimarySide {
    pub p_u: f64,
    pub p_a: f64,
    pub p_m: f64,
    pub eta0: f64,
    pub delta_pd_sq: f64,
}

impl Default for PrimarySide {
    /// Selection probabilities do not depend on these values; the defaults
    /// only matter for SNR reporting.
    fn default() -> Self {
        Self {
            p_u: 1.0,
            p_a: 1.0,
            p_m: 1e3,
            eta0: 1.0,
            delta_pd_sq: 1.0,
        }
    }
}

impl PrimarySide {
    pub fn validate(&self) -> Result<()> {
        if self.p_u < 0.0 || !self.p_u.is_finite() {
            return Err(Error::NonPositive {
                name: "p_u",
                value: self.p_u,
            });
        }
        check_positive("p_a", self.p_a)?;
        check_positive("p_m", self.p_m)?;
        check_positive("eta0", self.eta0)?;
        check_positive("delta_pd_sq", self.delta_pd_sq)?;
        Ok(())
    }
}

/// Secondary transmit power for an interference-link gain sample `g_sp`.
pub fn transmit_power(g_sp: f64, p: &PrimarySide, mode: PowerMode) -> Result<f64> {
    check_positive("g_sp", g_sp)?;
    let uncapped = p.p_a / g_sp;
    Ok(match mode {
        PowerMode::Exact => uncapped.min(p.p_m),
        PowerMode::Approx => uncapped,
    })
}

/// Instantaneous SNR at the destination for one user's gain samples.
///
/// `g_pd` is the gain of the primary interference link into the destination,
/// common to all users within a trial.
pub fn instantaneous_snr(g_sd: f64, g_sp: f64, g_pd: f64, p: &PrimarySide, mode: PowerMode) -> Result<f64> {
    check_positive("g_sd", g_sd)?;
    check_positive("g_pd", g_pd)?;
    let power = transmit_power(g_sp, p, mode)?;
    Ok(power * g_sd / (p.eta0 + p.p_u * g_pd))
}

/// Exponential variate with the given mean, by inversion.
///
/// The uniform draw is taken from the midpoint lattice strictly inside
/// (0, 1), so the result is always finite and strictly positive.
pub fn sample_exponential<R: RngCore + ?Sized>(mean: f64, rng: &mut R) -> Result<f64> {
    check_positive("mean", mean)?;
    Ok(exp_inverse_cdf(mean, rng.next_u64()))
}

#[inline]
pub(crate) fn exp_inverse_cdf(mean: f64, bits: u64) -> f64 {
    -mean * unit_open(bits).ln()
}

/// Maps 64 raw bits to the open interval (0, 1).
#[inline]
fn unit_open(bits: u64) -> f64 {
    ((bits >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::NonFinite { name, value });
    }
    if value <= 0.0 {
        return Err(Error::NonPositive { name, value });
    }
    Ok(())
}
