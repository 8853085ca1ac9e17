//! Experiment driver: wires a catalog problem to the discretizer and a
//! solver, measures errors on an evaluation grid, and emits CSV rows with a
//! stable schema.

use std::time::Instant;

use crate::assembly::RfmSystem;
use crate::collocation::CurveSampling;
use crate::error::BenchError;
use crate::features::Deriv;
use crate::geometry::Classification;
use crate::matrix::norm2;
use crate::partition::MAX_DIM;
use crate::pou::PouKind;
use crate::problems::make_problem;
use crate::solvers::{
    amipn_solve, gauss_newton_solve, ipn_solve, lm_solve, NlsSystem, ScalingMode, SolverConfig,
    SolverReport, Termination,
};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Ipn,
    Amipn,
    Lm,
    GaussNewton,
}

impl SolverKind {
    pub fn parse(s: &str) -> Result<Self, BenchError> {
        match s {
            "ipn" => Ok(Self::Ipn),
            "amipn" => Ok(Self::Amipn),
            "lm" => Ok(Self::Lm),
            "gauss_newton" => Ok(Self::GaussNewton),
            other => Err(BenchError::Config(format!("unknown solver `{other}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Ipn => "ipn",
            Self::Amipn => "amipn",
            Self::Lm => "lm",
            Self::GaussNewton => "gauss_newton",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub problem: String,
    /// Subdomains per axis (N).
    pub subdivisions: Vec<usize>,
    /// Collocation points per axis per subdomain (Q).
    pub q: Vec<usize>,
    /// Random features per subdomain (J).
    pub features: usize,
    pub solver: SolverKind,
    pub solver_params: SolverConfig,
    /// Overrides the problem's feature weight range when set.
    pub feature_range: Option<f64>,
    pub pou: PouKind,
    pub seed: u64,
    /// Evaluation grid per axis; 50 per axis when empty.
    pub eval_grid: Vec<usize>,
    pub row_scaling: bool,
    pub curve_override: Option<CurveSampling>,
    /// Iteration cap for the classical baseline solvers.
    pub baseline_max_iter: usize,
    pub baseline_grad_tol: f64,
}

impl ExperimentConfig {
    pub fn new(problem: &str, subdivisions: &[usize], q: &[usize], features: usize) -> Self {
        Self {
            problem: problem.to_string(),
            subdivisions: subdivisions.to_vec(),
            q: q.to_vec(),
            features,
            solver: SolverKind::Amipn,
            solver_params: SolverConfig::default(),
            feature_range: None,
            pou: PouKind::A,
            seed: 0,
            eval_grid: Vec::new(),
            row_scaling: true,
            curve_override: None,
            baseline_max_iter: 60,
            baseline_grad_tol: 1e-6,
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.subdivisions.is_empty() || self.subdivisions.len() != self.q.len() {
            return Err(BenchError::Config("N and Q must have matching dimensions".into()));
        }
        if self.subdivisions.iter().any(|&n| n == 0) || self.q.iter().any(|&q| q < 2) {
            return Err(BenchError::Config("counts must be positive (Q >= 2)".into()));
        }
        if self.features == 0 {
            return Err(BenchError::Config("J must be positive".into()));
        }
        self.solver_params.validate().map_err(BenchError::Config)
    }
}

#[derive(Debug, Clone)]
pub struct ErrorReport {
    pub relative_l2: Vec<f64>,
    pub relative_h1: Vec<f64>,
    pub residual_norm: f64,
    pub outer_iterations: usize,
    pub jacobian_evaluations: usize,
    pub assemble_seconds: f64,
    pub solve_seconds: f64,
    pub precondition_seconds_total: f64,
    pub lsqr_iteration_totals: usize,
    pub termination: Option<Termination>,
    pub n_unknowns: usize,
    pub m_residuals: usize,
    pub status: String,
}

impl ErrorReport {
    fn failed(status: String) -> Self {
        Self {
            relative_l2: Vec::new(),
            relative_h1: Vec::new(),
            residual_norm: f64::NAN,
            outer_iterations: 0,
            jacobian_evaluations: 0,
            assemble_seconds: f64::NAN,
            solve_seconds: f64::NAN,
            precondition_seconds_total: f64::NAN,
            lsqr_iteration_totals: 0,
            termination: None,
            n_unknowns: 0,
            m_residuals: 0,
            status,
        }
    }
}

/// A solved discretization kept around for self-convergence comparisons.
pub struct SolvedSystem {
    pub system: RfmSystem,
    pub final_u: Vec<f64>,
}

pub struct ExperimentOutcome {
    pub report: ErrorReport,
    pub solved: Option<SolvedSystem>,
}

/// Discrete relative L2 distance between two sampled fields.
pub fn relative_l2_error(numerical: &[f64], exact: &[f64]) -> Result<f64, BenchError> {
    assert_eq!(numerical.len(), exact.len());
    let mut num = 0.0;
    let mut den = 0.0;
    for (a, b) in numerical.iter().zip(exact) {
        num += (a - b) * (a - b);
        den += b * b;
    }
    if den == 0.0 {
        return Err(BenchError::ZeroReference);
    }
    Ok((num / den).sqrt())
}

/// Discrete relative H1 distance: values plus gradients, gradients given as
/// one slice per axis.
pub fn relative_h1_error(
    numerical: &[f64],
    numerical_grads: &[Vec<f64>],
    exact: &[f64],
    exact_grads: &[Vec<f64>],
) -> Result<f64, BenchError> {
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..numerical.len() {
        num += (numerical[i] - exact[i]).powi(2);
        den += exact[i].powi(2);
        for a in 0..numerical_grads.len() {
            num += (numerical_grads[a][i] - exact_grads[a][i]).powi(2);
            den += exact_grads[a][i].powi(2);
        }
    }
    if den == 0.0 {
        return Err(BenchError::ZeroReference);
    }
    Ok((num / den).sqrt())
}

/// Interior points of the evaluation grid (each point classified at its own
/// time coordinate).
pub fn evaluation_points(system: &RfmSystem, per_axis: &[usize]) -> Vec<[f64; MAX_DIM]> {
    let dim = system.partition().dim();
    let bounds = system.partition().bounds();
    let mut grids = Vec::with_capacity(dim);
    for a in 0..dim {
        let n = per_axis.get(a).copied().unwrap_or(50).max(2);
        grids.push(
            (0..n)
                .map(|i| bounds[a][0] + (bounds[a][1] - bounds[a][0]) * i as f64 / (n - 1) as f64)
                .collect::<Vec<f64>>(),
        );
    }
    let mut total = 1usize;
    for g in &grids {
        total *= g.len();
    }
    let geometry = &system.problem().geometry;
    let chunks = par::ordered_chunk_fold(total, 1024, |range| {
        let mut pts = Vec::new();
        for flat in range {
            let mut rem = flat;
            let mut x = [0.0; MAX_DIM];
            for a in (0..dim).rev() {
                x[a] = grids[a][rem % grids[a].len()];
                rem /= grids[a].len();
            }
            if geometry.classify(&x) == Classification::Interior {
                pts.push(x);
            }
        }
        pts
    });
    chunks.into_iter().flatten().collect()
}

/// Relative L2 and H1 errors of a solved field against the exact solution.
pub fn measure_errors(
    system: &RfmSystem,
    u: &[f64],
    per_axis: &[usize],
) -> Result<(Vec<f64>, Vec<f64>), BenchError> {
    let problem = system.problem();
    if problem.exact.is_none() {
        return Ok((
            vec![f64::NAN; problem.components],
            vec![f64::NAN; problem.components],
        ));
    }
    let pts = evaluation_points(system, per_axis);
    if pts.is_empty() {
        return Err(BenchError::ZeroReference);
    }
    let dim = problem.dim;
    let mut derivs = vec![Deriv::VALUE];
    for a in 0..dim {
        derivs.push(Deriv::axis(a, 1));
    }
    let mut l2 = Vec::new();
    let mut h1 = Vec::new();
    for c in 0..problem.components {
        let rows = par::ordered_chunk_fold(pts.len(), 256, |range| {
            let mut vals = Vec::with_capacity(range.len() * (dim + 1) * 2);
            for i in range {
                let x = &pts[i];
                let num = system.eval_field(u, c, x, &derivs).expect("inside bounding box");
                vals.extend_from_slice(&num);
                for d in &derivs {
                    vals.push(problem.exact.as_ref().unwrap()[c].eval(*d, x));
                }
            }
            vals
        });
        let stride = (dim + 1) * 2;
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        let npts = flat.len() / stride;
        let mut num_vals = Vec::with_capacity(npts);
        let mut ex_vals = Vec::with_capacity(npts);
        let mut num_grads = vec![Vec::with_capacity(npts); dim];
        let mut ex_grads = vec![Vec::with_capacity(npts); dim];
        for p in 0..npts {
            let rec = &flat[p * stride..(p + 1) * stride];
            num_vals.push(rec[0]);
            for a in 0..dim {
                num_grads[a].push(rec[1 + a]);
            }
            ex_vals.push(rec[dim + 1]);
            for a in 0..dim {
                ex_grads[a].push(rec[dim + 2 + a]);
            }
        }
        l2.push(relative_l2_error(&num_vals, &ex_vals)?);
        h1.push(relative_h1_error(&num_vals, &num_grads, &ex_vals, &ex_grads)?);
    }
    Ok((l2, h1))
}

/// Build, solve and measure one experiment. Failures are captured in the
/// report status rather than propagated.
pub fn run_experiment(config: &ExperimentConfig) -> ExperimentOutcome {
    if let Err(e) = config.validate() {
        return ExperimentOutcome { report: ErrorReport::failed(format!("config: {e}")), solved: None };
    }
    let mut problem = match make_problem(&config.problem) {
        Ok(p) => p,
        Err(e) => {
            return ExperimentOutcome { report: ErrorReport::failed(e.to_string()), solved: None }
        }
    };
    if let Some(r) = config.feature_range {
        problem.feature_range = r;
    }
    let scaling = if config.row_scaling { ScalingMode::RowScaleC100 } else { ScalingMode::None };

    let t0 = Instant::now();
    let system = match RfmSystem::build(
        problem,
        &config.subdivisions,
        &config.q,
        config.features,
        config.seed,
        config.pou,
        scaling,
        config.curve_override,
    ) {
        Ok(s) => s,
        Err(e) => {
            return ExperimentOutcome { report: ErrorReport::failed(e.to_string()), solved: None }
        }
    };
    let assemble_seconds = t0.elapsed().as_secs_f64();

    let u0 = vec![0.0; system.n_unknowns()];
    let mut params = config.solver_params.clone();
    params.seed = config.seed;
    let solved: Result<SolverReport, String> = match config.solver {
        SolverKind::Ipn => ipn_solve(&system, &u0, &params).map_err(|e| e.to_string()),
        SolverKind::Amipn => amipn_solve(&system, &u0, &params).map_err(|e| e.to_string()),
        SolverKind::Lm => {
            lm_solve(&system, &u0, config.baseline_max_iter, config.baseline_grad_tol)
                .map_err(|e| e.to_string())
        }
        SolverKind::GaussNewton => {
            gauss_newton_solve(&system, &u0, config.baseline_max_iter, config.baseline_grad_tol)
                .map_err(|e| e.to_string())
        }
    };
    let report = match solved {
        Ok(rep) => rep,
        Err(e) => {
            return ExperimentOutcome {
                report: ErrorReport::failed(format!("solver: {e}")),
                solved: None,
            }
        }
    };

    let (l2, h1) = match measure_errors(&system, &report.final_u, &config.eval_grid) {
        Ok(v) => v,
        Err(e) => {
            return ExperimentOutcome {
                report: ErrorReport::failed(format!("error eval: {e}")),
                solved: None,
            }
        }
    };

    let final_residual = {
        let mut f = vec![0.0; system.m_residuals()];
        system.residual(&report.final_u, &mut f);
        norm2(&f)
    };

    let out = ErrorReport {
        relative_l2: l2,
        relative_h1: h1,
        residual_norm: final_residual,
        outer_iterations: report.outer_iterations,
        jacobian_evaluations: report.jacobian_evaluations,
        assemble_seconds,
        solve_seconds: report.total_seconds,
        precondition_seconds_total: report.precondition_seconds.iter().sum(),
        lsqr_iteration_totals: report.total_lsqr_iterations(),
        termination: Some(report.termination),
        n_unknowns: system.n_unknowns(),
        m_residuals: system.m_residuals(),
        status: "ok".into(),
    };
    ExperimentOutcome {
        report: out,
        solved: Some(SolvedSystem { system, final_u: report.final_u }),
    }
}

/// Run a list of experiments in config order. Problems without an exact
/// solution get their error columns filled by comparison against the last
/// successful run of the same problem (the reference) on its evaluation grid.
pub fn run_sweep(configs: &[ExperimentConfig]) -> Vec<(ExperimentConfig, ErrorReport)> {
    let mut outcomes: Vec<(ExperimentConfig, ErrorReport, Option<SolvedSystem>)> = Vec::new();
    for cfg in configs {
        let out = run_experiment(cfg);
        outcomes.push((cfg.clone(), out.report, out.solved));
    }
    // self-convergence pass per problem without exact solutions
    let needs_reference: Vec<usize> = outcomes
        .iter()
        .enumerate()
        .filter(|(_, (_, r, s))| {
            r.status == "ok"
                && s.as_ref().is_some_and(|sv| sv.system.problem().exact.is_none())
        })
        .map(|(i, _)| i)
        .collect();
    if needs_reference.len() >= 2 {
        let &ref_idx = needs_reference.last().unwrap();
        let (ref_sys, ref_u) = {
            let s = outcomes[ref_idx].2.as_ref().unwrap();
            (&s.system, s.final_u.clone())
        };
        let grid = outcomes[ref_idx].0.eval_grid.clone();
        let pts = evaluation_points(ref_sys, &grid);
        let components = ref_sys.problem().components;
        let mut ref_vals: Vec<Vec<f64>> = Vec::new();
        for c in 0..components {
            ref_vals.push(
                pts.iter()
                    .map(|x| ref_sys.eval_field(&ref_u, c, x, &[Deriv::VALUE]).unwrap()[0])
                    .collect(),
            );
        }
        let compare: Vec<(usize, Vec<f64>)> = needs_reference
            .iter()
            .filter(|&&i| i != ref_idx)
            .map(|&i| {
                let s = outcomes[i].2.as_ref().unwrap();
                let mut errs = Vec::new();
                for c in 0..components {
                    let vals: Vec<f64> = pts
                        .iter()
                        .map(|x| {
                            s.system.eval_field(&s.final_u, c, x, &[Deriv::VALUE]).unwrap()[0]
                        })
                        .collect();
                    errs.push(relative_l2_error(&vals, &ref_vals[c]).unwrap_or(f64::NAN));
                }
                (i, errs)
            })
            .collect();
        for (i, errs) in compare {
            outcomes[i].1.relative_l2 = errs;
            outcomes[i].1.status = "ok(self-convergence)".into();
        }
        outcomes[ref_idx].1.status = "ok(reference)".into();
    }
    outcomes.into_iter().map(|(c, r, _)| (c, r)).collect()
}

/// Fixed CSV schema; per-component error columns expand to the sweep's
/// maximum component count.
pub fn csv_header(max_components: usize) -> String {
    let mut h = String::from(
        "problem,solver,Nx,Ny,Nz,Qx,Qy,Qz,J,seed,IT,NJ,assemble_s,solve_s,precond_s,residual",
    );
    for c in 0..max_components {
        h.push_str(&format!(",err_l2_c{c}"));
    }
    for c in 0..max_components {
        h.push_str(&format!(",err_h1_c{c}"));
    }
    h.push_str(",status");
    h
}

pub fn csv_row(cfg: &ExperimentConfig, r: &ErrorReport, max_components: usize) -> String {
    let axis = |v: &[usize], i: usize| v.get(i).copied().unwrap_or(1);
    let fmt_err = |v: &[f64], c: usize| {
        v.get(c).map_or(String::new(), |e| {
            if e.is_nan() {
                "nan".to_string()
            } else {
                format!("{e:.6e}")
            }
        })
    };
    let mut row = format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{:.3},{:.3},{:.3},{:.6e}",
        cfg.problem,
        cfg.solver.name(),
        axis(&cfg.subdivisions, 0),
        axis(&cfg.subdivisions, 1),
        axis(&cfg.subdivisions, 2),
        axis(&cfg.q, 0),
        axis(&cfg.q, 1),
        axis(&cfg.q, 2),
        cfg.features,
        cfg.seed,
        r.outer_iterations,
        r.jacobian_evaluations,
        r.assemble_seconds,
        r.solve_seconds,
        r.precondition_seconds_total,
        r.residual_norm,
    );
    for c in 0..max_components {
        row.push(',');
        row.push_str(&fmt_err(&r.relative_l2, c));
    }
    for c in 0..max_components {
        row.push(',');
        row.push_str(&fmt_err(&r.relative_h1, c));
    }
    row.push(',');
    row.push_str(&r.status);
    row
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l2_metric_basics() {
        let u = vec![1.0, 2.0, -1.0];
        assert_eq!(relative_l2_error(&u, &u).unwrap(), 0.0);
        let scaled: Vec<f64> = u.iter().map(|v| 1.1 * v).collect();
        assert!((relative_l2_error(&scaled, &u).unwrap() - 0.1).abs() < 1e-14);
        assert!(matches!(
            relative_l2_error(&u, &[0.0, 0.0, 0.0]),
            Err(BenchError::ZeroReference)
        ));
    }

    // Oracle: closed form of the discrete norm for a constant offset.
    #[test]
    fn l2_constant_offset_closed_form() {
        let u = vec![1.0, -2.0, 0.5, 3.0];
        let c = 1e-3;
        let off: Vec<f64> = u.iter().map(|v| v + c).collect();
        let expect = c * (u.len() as f64).sqrt() / u.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((relative_l2_error(&off, &u).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn h1_metric_basics() {
        let vals = vec![1.0, 2.0];
        let grads = vec![vec![0.5, -0.5]];
        assert_eq!(relative_h1_error(&vals, &grads, &vals, &grads).unwrap(), 0.0);
        let sv: Vec<f64> = vals.iter().map(|v| 1.1 * v).collect();
        let sg: Vec<Vec<f64>> = grads.iter().map(|g| g.iter().map(|v| 1.1 * v).collect()).collect();
        assert!((relative_h1_error(&sv, &sg, &vals, &grads).unwrap() - 0.1).abs() < 1e-14);
    }

    // Oracle: 3-point hand evaluation with an offset on values only.
    #[test]
    fn h1_hand_evaluated_offset() {
        let vals = vec![1.0, 0.0, 2.0];
        let grads = vec![vec![1.0, 1.0, 1.0]];
        let off: Vec<f64> = vals.iter().map(|v| v + 0.5).collect();
        let num = (3.0 * 0.25f64).sqrt();
        let den = (1.0 + 0.0 + 4.0 + 3.0f64).sqrt();
        let got = relative_h1_error(&off, &grads, &vals, &grads).unwrap();
        assert!((got - num / den).abs() < 1e-14);
    }

    #[test]
    fn csv_schema_is_stable() {
        assert_eq!(
            csv_header(1),
            "problem,solver,Nx,Ny,Nz,Qx,Qy,Qz,J,seed,IT,NJ,assemble_s,solve_s,precond_s,residual,err_l2_c0,err_h1_c0,status"
        );
        let h3 = csv_header(3);
        assert!(h3.contains("err_l2_c0,err_l2_c1,err_l2_c2,err_h1_c0,err_h1_c1,err_h1_c2,status"));
    }

    #[test]
    fn tiny_experiment_runs_and_is_deterministic() {
        let mut cfg = ExperimentConfig::new("cubic_elliptic_2d", &[1, 1], &[12, 12], 80);
        cfg.eval_grid = vec![15, 15];
        cfg.seed = 3;
        let a = run_experiment(&cfg);
        let b = run_experiment(&cfg);
        assert_eq!(a.report.status, "ok");
        assert_eq!(a.report.relative_l2, b.report.relative_l2);
        assert_eq!(a.report.residual_norm, b.report.residual_norm);
        assert!(a.report.relative_l2[0] < 1e-3, "err = {}", a.report.relative_l2[0]);
    }

    #[test]
    fn unknown_problem_reports_status() {
        let cfg = ExperimentConfig::new("nope", &[1, 1], &[5, 5], 5);
        let out = run_experiment(&cfg);
        assert_ne!(out.report.status, "ok");
    }
}
