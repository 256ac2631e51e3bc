//! Analytic selection probabilities.
//!
//! Each user's scheduling metric is the ratio of two independent exponential
//! gains, so its CDF is `1 - (1 + alpha*y)^-1` with `alpha` the ratio of the
//! average link gains. The probability that user `k` wins the argmax is the
//! integral over `[0, inf)` of its density times the product of the other
//! users' CDFs. For K = 2 and K = 3 that integral collapses to closed forms
//! built from two integral identities; for any K it is evaluated by adaptive
//! quadrature.
//!
//! The identities require pairwise-distinct parameters and cancel
//! catastrophically as parameters coalesce, so the closed forms detect
//! relative gaps below [`REL_GAP_THRESHOLD`] and fall back to quadrature
//! (fully symmetric inputs short-circuit to `1/K`). Above the threshold the
//! log terms are evaluated through a `log1p`-based kernel that stays accurate
//! for nearby parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_semi_infinite, QuadratureConfig};

/// Relative gap under which the closed-form identities are treated as
/// near-degenerate and quadrature takes over.
pub const REL_GAP_THRESHOLD: f64 = 1e-6;

/// How a probability vector was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

/// Analytic route selector (Monte Carlo needs a full scenario, not just
/// alphas; see the simulator module).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnalyticMethod {
    ClosedForm,
    Quadrature,
}

impl From<AnalyticMethod> for Method {
    fn from(m: AnalyticMethod) -> Self {
        match m {
            AnalyticMethod::ClosedForm => Method::ClosedForm,
            AnalyticMethod::Quadrature => Method::Quadrature,
        }
    }
}

/// Ordered vector of per-user gain ratios, K >= 2, all finite and positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaVector {
    alphas: Vec<f64>,
}

impl AlphaVector {
    pub fn new(alphas: Vec<f64>) -> Result<Self> {
        if alphas.len() < 2 {
            return Err(Error::TooFewUsers { got: alphas.len() });
        }
        for &a in &alphas {
            if !a.is_finite() {
                return Err(Error::NonFinite {
                    name: "alpha",
                    value: a,
                });
            }
            if a <= 0.0 {
                return Err(Error::NonPositive {
                    name: "alpha",
                    value: a,
                });
            }
        }
        Ok(Self { alphas })
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.alphas
    }
}

/// Per-user selection probabilities with provenance.
///
/// Entries are clamped to `[0, 1]`; `raw_sum` records the pre-clamp,
/// pre-renormalization sum so the defect `raw_sum - 1` stays observable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionProbabilities {
    probs: Vec<f64>,
    method: Method,
    raw_sum: f64,
    renormalized: bool,
}

impl SelectionProbabilities {
    fn new(mut probs: Vec<f64>, method: Method, renormalize_tol: Option<f64>) -> Self {
        let raw_sum: f64 = probs.iter().sum();
        let mut renormalized = false;
        if let Some(tol) = renormalize_tol {
            if (raw_sum - 1.0).abs() > tol && raw_sum > 0.0 {
                for p in &mut probs {
                    *p /= raw_sum;
                }
                renormalized = true;
            }
        }
        for p in &mut probs {
            *p = p.clamp(0.0, 1.0);
        }
        Self {
            probs,
            method,
            raw_sum,
            renormalized,
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// Sum of the entries before renormalization and clamping.
    pub fn raw_sum(&self) -> f64 {
        self.raw_sum
    }

    /// `raw_sum - 1`, a quality signal for the quadrature route.
    pub fn sum_defect(&self) -> f64 {
        self.raw_sum - 1.0
    }

    pub fn renormalized(&self) -> bool {
        self.renormalized
    }
}

/// CDF of one user's metric: `0` for `y <= 0`, else `1 - (1 + alpha*y)^-1`.
pub fn cdf_metric(y: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if y <= 0.0 {
        return Ok(0.0);
    }
    let ay = alpha * y;
    if ay.is_infinite() {
        return Ok(1.0);
    }
    // alpha*y / (1 + alpha*y): exact complement, no cancellation for small y.
    Ok(ay / (1.0 + ay))
}

/// Density of one user's metric: `0` for `y < 0`, else `alpha (1 + alpha*y)^-2`.
pub fn pdf_metric(y: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if y < 0.0 {
        return Ok(0.0);
    }
    let denom = 1.0 + alpha * y;
    Ok(alpha / (denom * denom))
}

/// `int_0^inf (1 + a*y)^-2 (1 + b*y)^-1 dy` for positive `a != b`.
///
/// Rejects inputs whose relative gap is at or below [`REL_GAP_THRESHOLD`];
/// the value tends to `1/(2a)` as `b -> a`.
pub fn identity_i2(a: f64, b: f64) -> Result<f64> {
    check_alpha(a)?;
    check_alpha(b)?;
    require_gap(a, b)?;
    Ok(i2(a, b))
}

/// `int_0^inf (1 + a*y)^-2 (1 + b*y)^-1 (1 + c*y)^-1 dy` for positive,
/// pairwise-distinct parameters. Symmetric in `(b, c)`.
pub fn identity_i3(a: f64, b: f64, c: f64) -> Result<f64> {
    check_alpha(a)?;
    check_alpha(b)?;
    check_alpha(c)?;
    require_gap(a, b)?;
    require_gap(a, c)?;
    require_gap(b, c)?;
    Ok(i3(a, b, c))
}

/// `(r - ln(1+r)) / r^2`, the kernel behind both identities; -> 1/2 as r -> 0.
///
/// The direct expression cancels badly for small `r`, so switch to the
/// alternating series `1/2 - r/3 + r^2/4 - ...` there.
fn log_ratio_kernel(r: f64) -> f64 {
    if r.abs() < 1e-3 {
        0.5 + r * (-1.0 / 3.0 + r * (0.25 + r * (-0.2 + r * (1.0 / 6.0 + r * (-1.0 / 7.0 + r * 0.125)))))
    } else {
        (r - r.ln_1p()) / (r * r)
    }
}

fn i2(a: f64, b: f64) -> f64 {
    // With r = (a - b)/b the identity reduces to (r - ln(1+r)) / (b r^2);
    // the log of the ratio enters through ln_1p, which keeps nearby
    // parameters accurate.
    let r = (a - b) / b;
    log_ratio_kernel(r) / b
}

fn i3(a: f64, b: f64, c: f64) -> f64 {
    // Splitting the two single poles: (b*i2(a,b) - c*i2(a,c)) / (b - c).
    (b * i2(a, b) - c * i2(a, c)) / (b - c)
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.max(b)
}

fn require_gap(a: f64, b: f64) -> Result<()> {
    if relative_gap(a, b) <= REL_GAP_THRESHOLD {
        return Err(Error::NearDegenerate {
            a,
            b,
            threshold: REL_GAP_THRESHOLD,
        });
    }
    Ok(())
}

/// Probability that the user with ratio `a` beats the users with ratios in
/// `rest`, assembled from the integral identities. Valid for K = 2 (one
/// entry in `rest`) and K = 3 (two entries), with all gaps above threshold.
fn win_probability(a: f64, rest: &[f64]) -> f64 {
    match rest {
        [b] => 1.0 - a * i2(a, *b),
        [b, c] => 1.0 - a * (i2(a, *b) + i2(a, *c)) + a * i3(a, *b, *c),
        _ => unreachable!("closed forms cover K = 2 and K = 3 only"),
    }
}

/// Closed-form probabilities for two users.
///
/// Exactly equal ratios short-circuit to `(1/2, 1/2)`; a relative gap at or
/// below [`REL_GAP_THRESHOLD`] falls back to quadrature under `cfg`.
pub fn closed_form_k2(alphas: &AlphaVector, cfg: &QuadratureConfig) -> Result<SelectionProbabilities> {
    let [a1, a2] = *expect_len::<2>(alphas)?;
    if a1 == a2 {
        return Ok(SelectionProbabilities::new(vec![0.5, 0.5], Method::ClosedForm, None));
    }
    if relative_gap(a1, a2) <= REL_GAP_THRESHOLD {
        return quadrature_all(alphas, cfg);
    }
    let p1 = win_probability(a1, &[a2]);
    let p2 = 1.0 - p1;
    Ok(SelectionProbabilities::new(vec![p1, p2], Method::ClosedForm, None))
}

/// Closed-form probabilities for three users.
///
/// The first two entries come from the win-probability formula (the second
/// by swapping the first two indices); the third is the complement, so the
/// vector sums to one by construction. All-equal ratios short-circuit to
/// `1/3`; any pair within [`REL_GAP_THRESHOLD`] falls back to quadrature.
pub fn closed_form_k3(alphas: &AlphaVector, cfg: &QuadratureConfig) -> Result<SelectionProbabilities> {
    let [a1, a2, a3] = *expect_len::<3>(alphas)?;
    if a1 == a2 && a2 == a3 {
        let third = 1.0 / 3.0;
        return Ok(SelectionProbabilities::new(
            vec![third, third, third],
            Method::ClosedForm,
            None,
        ));
    }
    if relative_gap(a1, a2) <= REL_GAP_THRESHOLD
        || relative_gap(a1, a3) <= REL_GAP_THRESHOLD
        || relative_gap(a2, a3) <= REL_GAP_THRESHOLD
    {
        return quadrature_all(alphas, cfg);
    }
    let p1 = win_probability(a1, &[a2, a3]);
    let p2 = win_probability(a2, &[a1, a3]);
    let p3 = 1.0 - (p1 + p2);
    Ok(SelectionProbabilities::new(vec![p1, p2, p3], Method::ClosedForm, None))
}

fn expect_len<const N: usize>(alphas: &AlphaVector) -> Result<&[f64; N]> {
    alphas
        .as_slice()
        .try_into()
        .map_err(|_| Error::AlphaCount {
            expected: N,
            got: alphas.len(),
        })
}

/// Selection probability of user `k` by adaptive quadrature of the defining
/// integral. Works for any K >= 2, equal ratios included.
///
/// The integral is invariant under common scaling of the ratios, so the
/// vector is first normalized by its largest entry; every scale-equivalent
/// input then runs through the same numerics.
pub fn quadrature_selection(alphas: &AlphaVector, k: usize, cfg: &QuadratureConfig) -> Result<f64> {
    if k >= alphas.len() {
        return Err(Error::IndexOutOfRange {
            index: k,
            k: alphas.len(),
        });
    }
    let max = alphas.as_slice().iter().cloned().fold(f64::MIN, f64::max);
    let a: Vec<f64> = alphas.as_slice().iter().map(|v| v / max).collect();
    let ak = a[k];
    let outcome = integrate_semi_infinite(
        |y| {
            let denom = 1.0 + ak * y;
            let mut v = ak / (denom * denom);
            for (l, &al) in a.iter().enumerate() {
                if l != k {
                    let aly = al * y;
                    v *= aly / (1.0 + aly);
                }
            }
            v
        },
        cfg,
    )?;
    Ok(outcome.value)
}

fn quadrature_all(alphas: &AlphaVector, cfg: &QuadratureConfig) -> Result<SelectionProbabilities> {
    let probs = (0..alphas.len())
        .map(|k| quadrature_selection(alphas, k, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(SelectionProbabilities::new(
        probs,
        Method::Quadrature,
        Some(cfg.abs_tol),
    ))
}

/// Dispatches to the closed forms (K = 2 or 3) or to quadrature (any K).
///
/// The quadrature route renormalizes only when the raw sum strays from one
/// by more than `cfg.abs_tol`; the raw sum is recorded either way.
pub fn selection_probabilities(
    alphas: &AlphaVector,
    method: AnalyticMethod,
    cfg: &QuadratureConfig,
) -> Result<SelectionProbabilities> {
    match method {
        AnalyticMethod::ClosedForm => match alphas.len() {
            2 => closed_form_k2(alphas, cfg),
            3 => closed_form_k3(alphas, cfg),
            k => Err(Error::UnsupportedK { k }),
        },
        AnalyticMethod::Quadrature => quadrature_all(alphas, cfg),
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() {
        return Err(Error::NonFinite {
            name: "alpha",
            value: alpha,
        });
    }
    if alpha <= 0.0 {
        return Err(Error::NonPositive {
            name: "alpha",
            value: alpha,
        });
    }
    Ok(())
}
