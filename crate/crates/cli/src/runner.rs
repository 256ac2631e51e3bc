//! Orchestrates one scenario run: computes the requested probability
//! columns, assembles the report, and optionally checks simulation against
//! analytics at the 3-sigma binomial bound.

use std::time::Instant;

use anyhow::Result;
use cr_sched_core::{
    compare_to_analytic, run_monte_carlo, selection_probabilities, AnalyticMethod, McComparison,
    McReport, QuadratureConfig, Scenario, SelectionProbabilities,
};

use crate::report::{ReportMeta, RunReport, UserRow};
use crate::scenario_file::MethodArg;

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub method: MethodArg,
    pub check: bool,
    pub quad_cfg: QuadratureConfig,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            method: MethodArg::All,
            check: false,
            quad_cfg: QuadratureConfig::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: RunReport,
    pub check: Option<McComparison>,
}

pub fn execute(scenario: &Scenario, label: &str, opts: &RunOptions) -> Result<RunOutcome> {
    let start = Instant::now();
    scenario.validate()?;
    let alphas = scenario.alpha_vector()?;
    let k = alphas.len();

    let mut closed: Option<SelectionProbabilities> = None;
    let mut quad: Option<SelectionProbabilities> = None;
    // `all` means every applicable method: the closed forms stop at K = 3,
    // so only an explicit closed-form request errors beyond that.
    if matches!(opts.method, MethodArg::ClosedForm) || (matches!(opts.method, MethodArg::All) && k <= 3)
    {
        closed = Some(selection_probabilities(
            &alphas,
            AnalyticMethod::ClosedForm,
            &opts.quad_cfg,
        )?);
    }
    if matches!(opts.method, MethodArg::Quadrature | MethodArg::All) {
        quad = Some(selection_probabilities(
            &alphas,
            AnalyticMethod::Quadrature,
            &opts.quad_cfg,
        )?);
    }
    // A check needs an analytic reference; prefer the closed form where the
    // paper-sized K allows it.
    if opts.check && closed.is_none() && quad.is_none() {
        let method = if k <= 3 {
            AnalyticMethod::ClosedForm
        } else {
            AnalyticMethod::Quadrature
        };
        let probs = selection_probabilities(&alphas, method, &opts.quad_cfg)?;
        match method {
            AnalyticMethod::ClosedForm => closed = Some(probs),
            AnalyticMethod::Quadrature => quad = Some(probs),
        }
    }

    let mc: Option<McReport> =
        if matches!(opts.method, MethodArg::MonteCarlo | MethodArg::All) || opts.check {
            Some(run_monte_carlo(scenario)?)
        } else {
            None
        };

    let check = if opts.check {
        let analytic = closed
            .as_ref()
            .or(quad.as_ref())
            .expect("check always computes an analytic column");
        let report = mc.as_ref().expect("check always runs the simulation");
        Some(compare_to_analytic(analytic.probs(), report)?)
    } else {
        None
    };

    let rows = scenario
        .users
        .iter()
        .enumerate()
        .map(|(i, user)| UserRow {
            user: i,
            d_sd: user.d_sd,
            d_sp: user.d_sp,
            alpha: user.alpha,
            analytic_closed: closed.as_ref().map(|p| p.probs()[i]),
            analytic_quadrature: quad.as_ref().map(|p| p.probs()[i]),
            mc_freq: mc.as_ref().map(|r| r.freqs[i]),
            ci95: mc.as_ref().map(|r| r.ci95_halfwidth[i]),
        })
        .collect();

    let report = RunReport {
        label: label.to_string(),
        rows,
        meta: ReportMeta {
            seed: scenario.seed,
            trials: scenario.trials,
            beta: scenario.beta,
            sum_defect_closed: closed.as_ref().map(|p| p.sum_defect()),
            sum_defect_quadrature: quad.as_ref().map(|p| p.sum_defect()),
            wall_time_s: start.elapsed().as_secs_f64(),
        },
    };

    Ok(RunOutcome { report, check })
}
