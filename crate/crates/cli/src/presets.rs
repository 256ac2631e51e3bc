//! Built-in three-user geometries.
//!
//! All distances sit near two length units but carry small unique offsets so
//! that no two users share a gain ratio; the closed-form identities require
//! pairwise-distinct parameters. The "close" positions keep the same offset
//! pattern one unit down.
//!
//! - `fig1`: every user roughly equidistant from both receivers.
//! - `fig2`: the middle user close to the destination (`d_sd ~ 1`).
//! - `fig3`: the middle user close to the protected receiver (`d_sp ~ 1`).
//! - `fig4`: the middle user close to both, so its distance ratio matches
//!   the others again.

use cr_sched_core::{Scenario, DEFAULT_BETA};

pub const PRESET_NAMES: [&str; 4] = ["fig1", "fig2", "fig3", "fig4"];

/// Distance pairs `(d_sd, d_sp)` for a preset name, if it is one.
pub fn preset_distances(name: &str) -> Option<[(f64, f64); 3]> {
    let mut distances = [(2.002, 2.001), (2.004, 2.003), (2.006, 2.005)];
    match name {
        "fig1" => {}
        "fig2" => distances[1].0 = 1.004,
        "fig3" => distances[1].1 = 1.003,
        "fig4" => distances[1] = (1.004, 1.003),
        _ => return None,
    }
    Some(distances)
}

/// The preset scenario with default simulation controls.
pub fn preset_scenario(name: &str) -> Option<Scenario> {
    let distances = preset_distances(name)?;
    Some(
        Scenario::from_distances(&distances, DEFAULT_BETA)
            .expect("preset distances are valid"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_build() {
        for name in PRESET_NAMES {
            let scenario = preset_scenario(name).unwrap();
            assert_eq!(scenario.users.len(), 3);
            assert_eq!(scenario.beta, 3.0);
        }
        assert!(preset_scenario("fig5").is_none());
    }

    #[test]
    fn ratios_are_pairwise_distinct() {
        for name in PRESET_NAMES {
            let scenario = preset_scenario(name).unwrap();
            let alphas: Vec<f64> = scenario.users.iter().map(|u| u.alpha).collect();
            for i in 0..3 {
                for j in (i + 1)..3 {
                    let gap = (alphas[i] - alphas[j]).abs() / alphas[i].max(alphas[j]);
                    assert!(
                        gap > cr_sched_core::REL_GAP_THRESHOLD,
                        "{name}: users {i} and {j} share a ratio"
                    );
                }
            }
        }
    }
}
