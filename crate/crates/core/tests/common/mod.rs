//! Shared test oracles, independent of the library's integration machinery.
//!
//! Semi-infinite integrals are folded onto [0, 1] with `u = 1/(1 + y)`,
//! which turns every integrand used here into a smooth rational function
//! with finite endpoint values, then integrated by recursive adaptive
//! Simpson with Richardson correction.

#![allow(dead_code)]

use rand::Rng;

pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Integrates over [0, 1] to near machine precision relative to the value.
fn unit_integral<F: Fn(f64) -> f64>(f: F) -> f64 {
    let rough = adaptive_simpson(&f, 0.0, 1.0, 1e-9);
    adaptive_simpson(&f, 0.0, 1.0, 1e-14 * (1.0 + rough.abs()))
}

/// Oracle for `int_0^inf (1 + a y)^-2 (1 + b y)^-1 dy`.
pub fn oracle_i2(a: f64, b: f64) -> f64 {
    unit_integral(move |u| {
        let om = 1.0 - u;
        let da = u + a * om;
        let db = u + b * om;
        u / (da * da * db)
    })
}

/// Oracle for `int_0^inf (1 + a y)^-2 (1 + b y)^-1 (1 + c y)^-1 dy`.
pub fn oracle_i3(a: f64, b: f64, c: f64) -> f64 {
    unit_integral(move |u| {
        let om = 1.0 - u;
        let da = u + a * om;
        let db = u + b * om;
        let dc = u + c * om;
        u * u / (da * da * db * dc)
    })
}

/// Oracle for the selection probability of user `k` given gain ratios.
pub fn oracle_selection(alphas: &[f64], k: usize) -> f64 {
    let alphas = alphas.to_vec();
    unit_integral(move |u| {
        let om = 1.0 - u;
        let dk = u + alphas[k] * om;
        let mut v = alphas[k] / (dk * dk);
        for (l, &al) in alphas.iter().enumerate() {
            if l != k {
                v *= al * om / (u + al * om);
            }
        }
        v
    })
}

/// Log-uniform draw from `[10^lo, 10^hi]`.
pub fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    10f64.powf(rng.gen_range(lo..hi))
}

/// Draws a vector of `k` log-uniform ratios in `[1e-2, 1e2]` whose pairwise
/// relative gaps all exceed `min_gap`.
pub fn distinct_ratios<R: Rng>(rng: &mut R, k: usize, min_gap: f64) -> Vec<f64> {
    'outer: loop {
        let v: Vec<f64> = (0..k).map(|_| log_uniform(rng, -2.0, 2.0)).collect();
        for i in 0..k {
            for j in (i + 1)..k {
                if (v[i] - v[j]).abs() / v[i].max(v[j]) <= min_gap {
                    continue 'outer;
                }
            }
        }
        return v;
    }
}
