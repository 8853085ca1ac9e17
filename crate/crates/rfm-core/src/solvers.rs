//! Outer nonlinear least-squares iterations: sketch-preconditioned inexact
//! Newton (single-step and adaptive multi-step variants) plus Gauss-Newton
//! and Levenberg-Marquardt baselines.

use std::time::Instant;

use crate::error::LinalgError;
use crate::linesearch::golden_section;
use crate::lsqr::{lsqr, LsqrResult};
use crate::matrix::{norm2, DenseMatrix};
use crate::qr::{right_precondition_in_place, thin_qr, UpperTriangular};
use crate::scaling::row_scale_in_place;
use crate::sketch::SketchPlan;
use crate::{matrix, rng};

/// Residual/Jacobian evaluator pair with fixed dimensions. Both evaluators
/// must be deterministic functions of `u`.
pub trait NlsSystem: Sync {
    fn n_unknowns(&self) -> usize;
    fn m_residuals(&self) -> usize;
    fn residual(&self, u: &[f64], out: &mut [f64]);
    fn jacobian(&self, u: &[f64]) -> DenseMatrix;
    fn scaling(&self) -> ScalingMode {
        ScalingMode::None
    }

    fn residual_vec(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.m_residuals()];
        self.residual(u, &mut out);
        out
    }
}

/// Row treatment applied to the linearized subproblem at every Jacobian
/// refresh. The line search and the stopping test always use the raw
/// residual norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScalingMode {
    #[default]
    None,
    /// lambda_i = c / max_j |J_ij| with c = 100.
    RowScaleC100,
}

#[derive(Debug, Clone, Copy)]
pub struct LineSearchParams {
    pub lo: f64,
    pub hi: f64,
    pub alpha_tol: f64,
    pub max_evals: usize,
}

impl Default for LineSearchParams {
    fn default() -> Self {
        Self { lo: 0.0, hi: 2.0, alpha_tol: 1e-3, max_evals: 40 }
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Sketch oversampling factor.
    pub gamma: f64,
    /// LSQR termination tolerance.
    pub eta: f64,
    /// Outer stagnation tolerance on the residual-norm change.
    pub epsilon: f64,
    /// Maximum outer iterations.
    pub max_outer: usize,
    /// Maximum inner steps per preconditioned Jacobian (multi-step solver).
    pub m_max: usize,
    /// Inner early-stop threshold relative to the entry residual norm.
    pub tau_rel: f64,
    pub line_search: LineSearchParams,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            gamma: 3.0,
            eta: 1e-6,
            epsilon: 1e-10,
            max_outer: 60,
            m_max: 3,
            tau_rel: 1e-3,
            line_search: LineSearchParams::default(),
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.gamma > 1.0) {
            return Err("gamma must exceed 1".into());
        }
        if !(self.eta > 0.0) || !(self.epsilon > 0.0) {
            return Err("eta and epsilon must be positive".into());
        }
        if self.m_max < 1 {
            return Err("m_max must be at least 1".into());
        }
        if self.tau_rel < 0.0 {
            return Err("tau_rel must be nonnegative".into());
        }
        if !(self.line_search.lo < self.line_search.hi) {
            return Err("line search bracket is empty".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Residual-norm change dropped below epsilon.
    Stagnation,
    MaxOuter,
    LineSearchFailure,
}

#[derive(Debug, Clone)]
pub struct SolverReport {
    /// IT: outer iterations executed.
    pub outer_iterations: usize,
    /// NJ: Jacobian evaluations.
    pub jacobian_evaluations: usize,
    /// ||F(u_k)|| at u_0 and after every accepted outer step.
    pub residual_history: Vec<f64>,
    /// LSQR iteration counts, one inner list per outer iteration.
    pub inner_lsqr_counts: Vec<Vec<usize>>,
    /// Wall seconds spent building each preconditioner.
    pub precondition_seconds: Vec<f64>,
    pub total_seconds: f64,
    pub final_u: Vec<f64>,
    pub termination: Termination,
}

impl SolverReport {
    pub fn final_residual(&self) -> f64 {
        *self.residual_history.last().unwrap_or(&f64::NAN)
    }

    pub fn total_lsqr_iterations(&self) -> usize {
        self.inner_lsqr_counts.iter().flatten().sum()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Preconditioned Jacobian state shared by the two sketching solvers.
struct Preconditioned {
    /// J(u) R^{-1}, row-scaled when requested; overwritten in place.
    jt: DenseMatrix,
    r: UpperTriangular,
    lambda: Option<Vec<f64>>,
}

impl Preconditioned {
    fn scaled_neg_residual(&self, f: &[f64]) -> Vec<f64> {
        match &self.lambda {
            Some(l) => f.iter().zip(l).map(|(v, s)| -v * s).collect(),
            None => f.iter().map(|v| -v).collect(),
        }
    }
}

fn build_preconditioner<S: NlsSystem>(
    system: &S,
    u: &[f64],
    cfg: &SolverConfig,
    refresh_index: u64,
) -> Result<Preconditioned, SolverError> {
    let mut j = system.jacobian(u);
    let lambda = match system.scaling() {
        ScalingMode::None => None,
        ScalingMode::RowScaleC100 => {
            let mut dummy = vec![0.0; j.rows()];
            Some(row_scale_in_place(&mut j, &mut dummy, crate::scaling::DEFAULT_ROW_SCALE))
        }
    };
    let m = j.rows();
    let n = j.cols();
    let s = (cfg.gamma * n as f64).ceil() as usize;
    let seed = cfg.seed.wrapping_add(refresh_index);

    let r = if m >= s {
        match sketch_qr(&j, n, cfg.gamma, seed) {
            Ok(r) => r,
            Err(LinalgError::RankDeficient { .. }) => {
                // A sketch collision can occasionally degrade an otherwise
                // well-conditioned compression; one fresh draw before failing.
                log::debug!("rank-deficient sketch at refresh {refresh_index}, retrying");
                sketch_qr(&j, n, cfg.gamma, rng::derive_key(seed, 0x7265_7472_79))?
            }
            Err(e) => return Err(e.into()),
        }
    } else {
        // Too few rows for the sketch to compress; factor the full matrix.
        // This is the exact preconditioner and only arises at small scale.
        log::debug!("m = {m} < gamma*n = {s}; thin QR of the full Jacobian");
        thin_qr(&j)?
    };
    right_precondition_in_place(&mut j, &r)?;
    Ok(Preconditioned { jt: j, r, lambda })
}

fn sketch_qr(
    j: &DenseMatrix,
    n: usize,
    gamma: f64,
    seed: u64,
) -> Result<UpperTriangular, LinalgError> {
    let plan = SketchPlan::new(j.rows(), n, gamma, seed)?;
    let b = plan.apply(j)?;
    thin_qr(&b)
}

fn solve_direction(pre: &Preconditioned, f: &[f64], cfg: &SolverConfig) -> (Vec<f64>, usize) {
    let rhs = pre.scaled_neg_residual(f);
    let n = pre.jt.cols();
    let LsqrResult { solution, iterations, .. } = lsqr(&pre.jt, &rhs, cfg.eta, 2 * n);
    (pre.r.solve_upper(&solution), iterations)
}

struct LineSearchOutcome {
    u: Vec<f64>,
    f: Vec<f64>,
    norm: f64,
}

/// Golden-section search on the raw residual norm; falls back to halving
/// backtracking so an accepted step never increases ||F||.
fn search_step<S: NlsSystem>(
    system: &S,
    z: &[f64],
    d: &[f64],
    f0_norm: f64,
    params: &LineSearchParams,
) -> Option<LineSearchOutcome> {
    let trial_norm = |alpha: f64| -> f64 {
        let mut trial = z.to_vec();
        matrix::axpy(alpha, d, &mut trial);
        let f = system.residual_vec(&trial);
        norm2(&f)
    };
    let (mut alpha, best) =
        golden_section(trial_norm, params.lo, params.hi, params.alpha_tol, params.max_evals);
    if best >= f0_norm {
        let mut found = false;
        let mut a = 1.0;
        for _ in 0..=10 {
            if trial_norm(a) < f0_norm {
                alpha = a;
                found = true;
                break;
            }
            a *= 0.5;
        }
        if !found {
            return None;
        }
    }
    let mut u = z.to_vec();
    matrix::axpy(alpha, d, &mut u);
    let f = system.residual_vec(&u);
    Some(LineSearchOutcome { norm: norm2(&f), u, f })
}

/// Inexact preconditioned Newton: one sketch-QR preconditioner and one LSQR
/// solve per outer iteration, globalized by golden-section line search, and
/// stopped when the residual norm stagnates.
pub fn ipn_solve<S: NlsSystem>(
    system: &S,
    u0: &[f64],
    cfg: &SolverConfig,
) -> Result<SolverReport, SolverError> {
    assert_eq!(u0.len(), system.n_unknowns());
    cfg.validate().expect("invalid solver config");
    let start = Instant::now();

    let mut u = u0.to_vec();
    let mut f = system.residual_vec(&u);
    let mut fnorm = norm2(&f);
    let mut history = vec![fnorm];
    let mut inner_counts = Vec::new();
    let mut precond_secs = Vec::new();
    let mut nj = 0usize;
    let mut it = 0usize;
    let mut termination = Termination::MaxOuter;

    for k in 0..cfg.max_outer {
        let t0 = Instant::now();
        let pre = build_preconditioner(system, &u, cfg, k as u64)?;
        nj += 1;
        precond_secs.push(t0.elapsed().as_secs_f64());

        let (d, its) = solve_direction(&pre, &f, cfg);
        inner_counts.push(vec![its]);

        let Some(step) = search_step(system, &u, &d, fnorm, &cfg.line_search) else {
            it = k + 1;
            termination = Termination::LineSearchFailure;
            break;
        };
        u = step.u;
        f = step.f;
        history.push(step.norm);
        it = k + 1;
        if (step.norm - fnorm).abs() < cfg.epsilon {
            termination = Termination::Stagnation;
            break;
        }
        fnorm = step.norm;
    }
    if it == cfg.max_outer && termination == Termination::MaxOuter {
        // ran the full budget
    }

    Ok(SolverReport {
        outer_iterations: it,
        jacobian_evaluations: nj,
        residual_history: history,
        inner_lsqr_counts: inner_counts,
        precondition_seconds: precond_secs,
        total_seconds: start.elapsed().as_secs_f64(),
        final_u: u,
        termination,
    })
}

/// Adaptive multi-step variant: the preconditioned Jacobian is reused for up
/// to `m_max` inner steps, and when the inner loop stops early the factor is
/// carried into the next outer iteration instead of being recomputed.
pub fn amipn_solve<S: NlsSystem>(
    system: &S,
    u0: &[f64],
    cfg: &SolverConfig,
) -> Result<SolverReport, SolverError> {
    assert_eq!(u0.len(), system.n_unknowns());
    cfg.validate().expect("invalid solver config");
    let start = Instant::now();

    let mut u = u0.to_vec();
    let mut f = system.residual_vec(&u);
    let mut fnorm = norm2(&f);
    let mut history = vec![fnorm];
    let mut inner_counts = Vec::new();
    let mut precond_secs = Vec::new();

    let t0 = Instant::now();
    let mut pre = build_preconditioner(system, &u, cfg, 0)?;
    precond_secs.push(t0.elapsed().as_secs_f64());
    let mut nj = 1usize;
    // true when `pre` was retained from an earlier iterate rather than
    // rebuilt at the current one
    let mut stale = false;

    let mut it = 0usize;
    let mut termination = Termination::MaxOuter;

    'outer: for k in 0..cfg.max_outer {
        let mut z = u.clone();
        let mut fz = f.clone();
        let mut fz_norm = fnorm;
        let entry_norm = fnorm;
        let mut flag = true; // refresh wanted unless the inner loop stops early
        let mut counts_k = Vec::new();
        let mut retried = false;

        let mut i = 0;
        while i < cfg.m_max {
            let (d, its) = solve_direction(&pre, &fz, cfg);
            counts_k.push(its);

            match search_step(system, &z, &d, fz_norm, &cfg.line_search) {
                Some(step) => {
                    let mut diff = 0.0;
                    for (a, b) in step.f.iter().zip(&fz) {
                        diff += (a - b) * (a - b);
                    }
                    let diff = diff.sqrt();
                    z = step.u;
                    fz = step.f;
                    fz_norm = step.norm;
                    if diff < cfg.tau_rel * entry_norm {
                        flag = false;
                        break;
                    }
                }
                None => {
                    if i == 0 && stale && !retried {
                        // The retained factor no longer produces a descent
                        // direction; rebuild at the current iterate and retry.
                        let t0 = Instant::now();
                        pre = build_preconditioner(system, &u, cfg, k as u64)?;
                        precond_secs.push(t0.elapsed().as_secs_f64());
                        nj += 1;
                        stale = false;
                        retried = true;
                        counts_k.pop();
                        continue;
                    }
                    if i == 0 {
                        it = k + 1;
                        termination = Termination::LineSearchFailure;
                        inner_counts.push(counts_k);
                        break 'outer;
                    }
                    // Progress was made earlier in this inner loop; keep it
                    // and force a refresh for the next outer iteration.
                    flag = true;
                    break;
                }
            }
            i += 1;
        }

        u = z;
        f = fz;
        history.push(fz_norm);
        inner_counts.push(counts_k);
        it = k + 1;

        if (fz_norm - fnorm).abs() < cfg.epsilon {
            termination = Termination::Stagnation;
            break;
        }
        fnorm = fz_norm;

        if flag {
            if k + 1 < cfg.max_outer {
                let t0 = Instant::now();
                pre = build_preconditioner(system, &u, cfg, (k + 1) as u64)?;
                precond_secs.push(t0.elapsed().as_secs_f64());
                nj += 1;
                stale = false;
            }
        } else {
            stale = true;
        }
    }

    Ok(SolverReport {
        outer_iterations: it,
        jacobian_evaluations: nj,
        residual_history: history,
        inner_lsqr_counts: inner_counts,
        precondition_seconds: precond_secs,
        total_seconds: start.elapsed().as_secs_f64(),
        final_u: u,
        termination,
    })
}

/// Gauss-Newton baseline: full dense QR least-squares step, unit step length.
pub fn gauss_newton_solve<S: NlsSystem>(
    system: &S,
    u0: &[f64],
    max_iter: usize,
    grad_tol: f64,
) -> Result<SolverReport, SolverError> {
    let start = Instant::now();
    let mut u = u0.to_vec();
    let mut history = Vec::new();
    let mut nj = 0;
    let mut it = 0;
    let mut termination = Termination::MaxOuter;

    let mut f = system.residual_vec(&u);
    history.push(norm2(&f));
    for _ in 0..max_iter {
        let j = system.jacobian(&u);
        nj += 1;
        let mut grad = vec![0.0; j.cols()];
        j.matvec_transpose(&f, &mut grad);
        if norm2(&grad) < grad_tol {
            termination = Termination::Stagnation;
            break;
        }
        let neg_f: Vec<f64> = f.iter().map(|v| -v).collect();
        let delta = crate::qr::householder_ls_solve(&j, &neg_f)?;
        matrix::axpy(1.0, &delta, &mut u);
        it += 1;
        f = system.residual_vec(&u);
        history.push(norm2(&f));
    }

    Ok(SolverReport {
        outer_iterations: it,
        jacobian_evaluations: nj,
        residual_history: history,
        inner_lsqr_counts: Vec::new(),
        precondition_seconds: Vec::new(),
        total_seconds: start.elapsed().as_secs_f64(),
        final_u: u,
        termination,
    })
}

/// Levenberg-Marquardt with damping lambda_k = ||F_k||, solved through the
/// damped normal equations by Cholesky factorization.
pub fn lm_solve<S: NlsSystem>(
    system: &S,
    u0: &[f64],
    max_iter: usize,
    grad_tol: f64,
) -> Result<SolverReport, SolverError> {
    let start = Instant::now();
    let mut u = u0.to_vec();
    let mut history = Vec::new();
    let mut nj = 0;
    let mut it = 0;
    let mut termination = Termination::MaxOuter;

    let mut f = system.residual_vec(&u);
    history.push(norm2(&f));
    for _ in 0..max_iter {
        let j = system.jacobian(&u);
        nj += 1;
        let n = j.cols();
        let mut grad = vec![0.0; n];
        j.matvec_transpose(&f, &mut grad);
        if norm2(&grad) < grad_tol {
            termination = Termination::Stagnation;
            break;
        }
        // normal matrix J^T J
        let mut g = DenseMatrix::zeros(n, n);
        for row in 0..j.rows() {
            let r = j.row(row);
            for a in 0..n {
                if r[a] != 0.0 {
                    let ra = r[a];
                    for b in a..n {
                        *g.at_mut(a, b) += ra * r[b];
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..a {
                *g.at_mut(a, b) = g.at(b, a);
            }
        }
        let damping = norm2(&f);
        let rhs: Vec<f64> = grad.iter().map(|v| -v).collect();
        let delta = crate::qr::cholesky_solve(&g, damping, &rhs)?;
        matrix::axpy(1.0, &delta, &mut u);
        it += 1;
        f = system.residual_vec(&u);
        history.push(norm2(&f));
    }

    Ok(SolverReport {
        outer_iterations: it,
        jacobian_evaluations: nj,
        residual_history: history,
        inner_lsqr_counts: Vec::new(),
        precondition_seconds: Vec::new(),
        total_seconds: start.elapsed().as_secs_f64(),
        final_u: u,
        termination,
    })
}

/// Affine residual F(u) = A u - b; Newton is exact for these, which makes
/// them the primary solver sanity fixture.
pub struct AffineSystem {
    pub a: DenseMatrix,
    pub b: Vec<f64>,
    pub scaling: ScalingMode,
}

impl AffineSystem {
    pub fn new(a: DenseMatrix, b: Vec<f64>) -> Self {
        Self { a, b, scaling: ScalingMode::None }
    }
}

impl NlsSystem for AffineSystem {
    fn n_unknowns(&self) -> usize {
        self.a.cols()
    }
    fn m_residuals(&self) -> usize {
        self.a.rows()
    }
    fn residual(&self, u: &[f64], out: &mut [f64]) {
        self.a.matvec(u, out);
        for (o, b) in out.iter_mut().zip(&self.b) {
            *o -= b;
        }
    }
    fn jacobian(&self, _u: &[f64]) -> DenseMatrix {
        self.a.clone()
    }
    fn scaling(&self) -> ScalingMode {
        self.scaling
    }
}

/// Closure-backed system for small test problems.
pub struct FnSystem<R, J>
where
    R: Fn(&[f64], &mut [f64]) + Sync,
    J: Fn(&[f64]) -> DenseMatrix + Sync,
{
    pub n: usize,
    pub m: usize,
    pub res: R,
    pub jac: J,
}

impl<R, J> NlsSystem for FnSystem<R, J>
where
    R: Fn(&[f64], &mut [f64]) + Sync,
    J: Fn(&[f64]) -> DenseMatrix + Sync,
{
    fn n_unknowns(&self) -> usize {
        self.n
    }
    fn m_residuals(&self) -> usize {
        self.m
    }
    fn residual(&self, u: &[f64], out: &mut [f64]) {
        (self.res)(u, out)
    }
    fn jacobian(&self, u: &[f64]) -> DenseMatrix {
        (self.jac)(u)
    }
}

/// Max relative error between analytic Jacobian columns and central finite
/// differences of the residual, probed at `n_probes` random columns.
pub fn jacobian_fd_max_rel_error<S: NlsSystem>(
    system: &S,
    u: &[f64],
    n_probes: usize,
    seed: u64,
) -> f64 {
    let n = system.n_unknowns();
    let m = system.m_residuals();
    let j = system.jacobian(u);
    let mut worst = 0.0f64;
    let mut fp = vec![0.0; m];
    let mut fm = vec![0.0; m];
    for p in 0..n_probes {
        let col = (rng::word(seed, p as u64) % n as u64) as usize;
        let h = 1e-6 * (1.0 + u[col].abs());
        let mut up = u.to_vec();
        up[col] += h;
        system.residual(&up, &mut fp);
        up[col] = u[col] - h;
        system.residual(&up, &mut fm);
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..m {
            let fd = (fp[i] - fm[i]) / (2.0 * h);
            let an = j.at(i, col);
            num += (fd - an) * (fd - an);
            den += an * an;
        }
        let rel = num.sqrt() / den.sqrt().max(1e-8);
        worst = worst.max(rel);
    }
    worst
}
