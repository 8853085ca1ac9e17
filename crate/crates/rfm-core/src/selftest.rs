//! Fast property suite: the statistical and algebraic checks behind the
//! randomized kernels and the discretizer, runnable from the command line
//! and reused by the acceptance tests.

use crate::collocation::CurveSampling;
use crate::geometry::Classification;
use crate::matrix::{norm2, DenseMatrix};
use crate::partition::{Partition, MAX_DIM};
use crate::pou::{pou_eval, PouKind};
use crate::problems::{make_problem, CATALOG};
use crate::qr::{right_precondition_in_place, thin_qr};
use crate::sketch::SketchPlan;
use crate::solvers::{
    amipn_solve, ipn_solve, jacobian_fd_max_rel_error, AffineSystem, NlsSystem, SolverConfig,
};
use crate::svd::estimate_condition;
use crate::{assembly, lsqr, qr, rng, scaling, solvers};

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self { name, passed, detail }
    }
}

fn gaussian(key: u64, n: u64) -> f64 {
    // Box-Muller on counter-based uniforms
    let u1 = rng::unit_f64(key, 2 * n).max(1e-300);
    let u2 = rng::unit_f64(key, 2 * n + 1);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn gaussian_matrix(m: usize, n: usize, key: u64) -> DenseMatrix {
    let mut d = vec![0.0; m * n];
    for (i, v) in d.iter_mut().enumerate() {
        *v = gaussian(key, i as u64);
    }
    DenseMatrix::from_vec(m, n, d)
}

/// Explicit Q = B R^{-1} on a working copy.
fn orthonormal_columns(b: &DenseMatrix) -> DenseMatrix {
    let r = thin_qr(b).expect("full rank");
    let mut q = b.clone();
    right_precondition_in_place(&mut q, &r).unwrap();
    q
}

fn gram_max_error(q: &DenseMatrix) -> f64 {
    let n = q.cols();
    let mut worst: f64 = 0.0;
    let mut col = vec![0.0; q.rows()];
    for i in 0..n {
        for r in 0..q.rows() {
            col[r] = q.at(r, i);
        }
        let mut gram_row = vec![0.0; n];
        q.matvec_transpose(&col, &mut gram_row);
        for (j, g) in gram_row.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - target).abs());
        }
    }
    worst
}

/// Matrix with prescribed condition number via U diag V^T.
fn matrix_with_condition(m: usize, n: usize, kappa: f64, key: u64) -> DenseMatrix {
    let u = orthonormal_columns(&gaussian_matrix(m, n, key));
    let v = orthonormal_columns(&gaussian_matrix(n, n, rng::derive_key(key, 1)));
    // singular values log-spaced from 1 down to 1/kappa
    let sv: Vec<f64> = (0..n)
        .map(|i| (-(i as f64) / (n as f64 - 1.0) * kappa.ln()).exp())
        .collect();
    let mut a = DenseMatrix::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += u.at(i, k) * sv[k] * v.at(j, k);
            }
            *a.at_mut(i, j) = s;
        }
    }
    a
}

/// 1. Sketch-then-QR produces a right preconditioner that orthogonalizes the
/// sketched matrix: (S J) R^{-1} has orthonormal columns to 1e-10.
pub fn check_sketch_qr_identity() -> CheckResult {
    let mut worst: f64 = 0.0;
    for seed in 0..20u64 {
        let j = gaussian_matrix(300, 60, rng::derive_key(100, seed));
        let plan = SketchPlan::new(300, 60, 3.0, seed).unwrap();
        let b = plan.apply(&j).unwrap();
        let q = orthonormal_columns(&b);
        worst = worst.max(gram_max_error(&q));
    }
    CheckResult::new(
        "sketch_qr_identity",
        worst <= 1e-10,
        format!("max ||Q^T Q - I|| = {worst:.3e} over 20 matrices (tol 1e-10)"),
    )
}

/// 2. Preconditioning quality: for a 500 x 100 matrix with condition 1e8,
/// the sketched right preconditioner brings kappa(J R^{-1}) under 3 in at
/// least 18 of 20 sketch draws at gamma = 3.
pub fn check_preconditioning_bound() -> CheckResult {
    let a = matrix_with_condition(500, 100, 1e8, 12345);
    let mut ok = 0;
    let mut worst: f64 = 0.0;
    for seed in 0..20u64 {
        let plan = SketchPlan::new(500, 100, 3.0, seed).unwrap();
        let b = plan.apply(&a).unwrap();
        let r = thin_qr(&b).unwrap();
        let mut pre = a.clone();
        right_precondition_in_place(&mut pre, &r).unwrap();
        let kappa = estimate_condition(&pre).unwrap();
        worst = worst.max(kappa);
        if kappa <= 3.0 {
            ok += 1;
        }
    }
    CheckResult::new(
        "preconditioning_bound",
        ok >= 18,
        format!("kappa(J R^-1) <= 3 in {ok}/20 seeds (worst {worst:.3})"),
    )
}

/// 3. LSQR agrees with the dense QR pseudoinverse route on 50 random
/// full-rank systems up to 200 x 50, to relative error 1e-8 at eta = 1e-12.
pub fn check_lsqr_against_pseudoinverse() -> CheckResult {
    let mut worst: f64 = 0.0;
    for trial in 0..50u64 {
        let key = rng::derive_key(777, trial);
        let n = 5 + (rng::word(key, 0) % 46) as usize; // 5..=50
        let m = n + 1 + (rng::word(key, 1) % (200 - n as u64)) as usize;
        let m = m.min(200);
        let a = gaussian_matrix(m, n, rng::derive_key(key, 2));
        let b: Vec<f64> = (0..m).map(|i| gaussian(rng::derive_key(key, 3), i as u64)).collect();
        let direct = qr::householder_ls_solve(&a, &b).unwrap();
        let iter = lsqr::lsqr(&a, &b, 1e-12, 4 * n);
        let mut diff = 0.0;
        for i in 0..n {
            diff += (direct[i] - iter.solution[i]).powi(2);
        }
        let rel = diff.sqrt() / norm2(&direct).max(1e-300);
        worst = worst.max(rel);
    }
    CheckResult::new(
        "lsqr_vs_pseudoinverse",
        worst <= 1e-8,
        format!("max relative difference {worst:.3e} over 50 systems (tol 1e-8)"),
    )
}

fn reduced_system(name: &str) -> Result<assembly::RfmSystem, crate::error::RfmError> {
    let p = make_problem(name)?;
    let dim = p.dim;
    assembly::RfmSystem::build(
        p,
        &vec![2; dim],
        &vec![6; dim],
        20,
        11,
        PouKind::A,
        solvers::ScalingMode::RowScaleC100,
        Some(CurveSampling { points_per_slice: 100, time_slices: 5, sphere_points: 600 }),
    )
}

/// 4. Analytic Jacobians match central finite differences for every catalog
/// problem at a reduced configuration.
pub fn check_jacobian_finite_differences() -> CheckResult {
    let mut worst: f64 = 0.0;
    let mut worst_name = "";
    for name in CATALOG {
        let sys = match reduced_system(name) {
            Ok(s) => s,
            Err(e) => {
                return CheckResult::new(
                    "jacobian_fd",
                    false,
                    format!("{name}: build failed: {e}"),
                )
            }
        };
        let n = sys.n_unknowns();
        let u: Vec<f64> = (0..n)
            .map(|i| rng::symmetric_f64(rng::derive_key(31, i as u64), 0, 0.3))
            .collect();
        let err = jacobian_fd_max_rel_error(&sys, &u, 100, 13);
        if err > worst {
            worst = err;
            worst_name = name;
        }
    }
    CheckResult::new(
        "jacobian_fd",
        worst <= 1e-5,
        format!("max relative FD error {worst:.3e} ({worst_name}) over the catalog (tol 1e-5)"),
    )
}

/// 5. Manufactured-source consistency: the exact solution satisfies its own
/// source to 1e-10 at 100 random interior points of every problem that has
/// a closed-form solution.
pub fn check_manufactured_sources() -> CheckResult {
    let mut worst: f64 = 0.0;
    let mut worst_name = "";
    for name in CATALOG {
        let p = make_problem(name).unwrap();
        if p.exact.is_none() {
            continue;
        }
        let mut found = 0;
        let mut attempt = 0u64;
        while found < 100 && attempt < 100_000 {
            let mut x = [0.0; MAX_DIM];
            for a in 0..p.dim {
                let b = p.bounds[a];
                x[a] = b[0] + rng::unit_f64(rng::derive_key(41, attempt), a as u64) * (b[1] - b[0]);
            }
            attempt += 1;
            if p.geometry.classify(&x) != Classification::Interior {
                continue;
            }
            found += 1;
            let w = p.exact_slots(&x).unwrap();
            let lhs = (p.op)(&x, &w);
            let rhs = p.source(&x).unwrap();
            for c in 0..p.components {
                let r = (lhs[c] - rhs[c]).abs();
                if r > worst {
                    worst = r;
                    worst_name = name;
                }
            }
        }
    }
    CheckResult::new(
        "manufactured_sources",
        worst <= 1e-10,
        format!("max |P(u_exact) - f| = {worst:.3e} ({worst_name}) (tol 1e-10)"),
    )
}

/// 6. The multi-step solver with m_max = 1 and tau_rel = 0 reproduces the
/// single-step solver iterate-for-iterate on the 2-D cubic elliptic problem.
pub fn check_degenerate_multistep_equivalence() -> CheckResult {
    let build = || {
        let p = make_problem("cubic_elliptic_2d").unwrap();
        assembly::RfmSystem::build(
            p,
            &[2, 2],
            &[8, 8],
            25,
            3,
            PouKind::A,
            solvers::ScalingMode::RowScaleC100,
            None,
        )
        .unwrap()
    };
    let sys = build();
    let cfg = SolverConfig { m_max: 1, tau_rel: 0.0, seed: 17, ..Default::default() };
    let u0 = vec![0.0; sys.n_unknowns()];
    let a = ipn_solve(&sys, &u0, &cfg).unwrap();
    let b = amipn_solve(&sys, &u0, &cfg).unwrap();
    let same_len = a.residual_history.len() == b.residual_history.len();
    let mut max_rel: f64 = 0.0;
    if same_len {
        for (x, y) in a.residual_history.iter().zip(&b.residual_history) {
            max_rel = max_rel.max((x - y).abs() / x.abs().max(1e-300));
        }
        for (x, y) in a.final_u.iter().zip(&b.final_u) {
            max_rel = max_rel.max((x - y).abs() / x.abs().max(1.0));
        }
    }
    CheckResult::new(
        "degenerate_multistep_equivalence",
        same_len && max_rel <= 1e-13,
        format!(
            "histories {} / {} iterates, max relative gap {max_rel:.3e} (tol 1e-13)",
            a.residual_history.len(),
            b.residual_history.len()
        ),
    )
}

/// 7. Affine exactness: one preconditioned Newton step reaches the linear
/// least-squares optimum on a random 500 x 100 system.
pub fn check_affine_exactness() -> CheckResult {
    let a = gaussian_matrix(500, 100, 2024);
    let b: Vec<f64> = (0..500).map(|i| gaussian(2025, i as u64)).collect();
    let direct = qr::householder_ls_solve(&a, &b).unwrap();
    let mut resid = vec![0.0; 500];
    let sys = AffineSystem::new(a, b);
    sys.residual(&direct, &mut resid);
    let ropt = norm2(&resid);
    let cfg = SolverConfig { seed: 5, ..Default::default() };
    let u0 = vec![0.0; 100];
    let ipn = ipn_solve(&sys, &u0, &cfg).unwrap();
    let ami = amipn_solve(&sys, &u0, &cfg).unwrap();
    let f0 = ipn.residual_history[0];
    let budget = ropt + 10.0 * cfg.eta * f0;
    let ipn_one = ipn.residual_history[1];
    let ami_one = ami.residual_history[1];
    CheckResult::new(
        "affine_exactness",
        ipn_one <= budget && ami_one <= budget && ami.jacobian_evaluations == 1,
        format!(
            "one-step residuals {ipn_one:.6e} / {ami_one:.6e} vs optimum {ropt:.6e} (+10 eta ||F0||)"
        ),
    )
}

/// 8. The two moving obstacles are disjoint at t = 0 and t = 2 and overlap
/// at t = 1 on a 200 x 200 grid.
pub fn check_obstacle_topology() -> CheckResult {
    let p = make_problem("klein_gordon_flowers").unwrap();
    let overlap = |t: f64| -> usize {
        let mut n = 0;
        for i in 0..200 {
            for j in 0..200 {
                let x = -1.0 + 2.0 * (i as f64 + 0.5) / 200.0;
                let y = -1.0 + 2.0 * (j as f64 + 0.5) / 200.0;
                let s1 = (p.geometry.excised[0].signed)(&[x, y, t]);
                let s2 = (p.geometry.excised[1].signed)(&[x, y, t]);
                if s1 < 0.0 && s2 < 0.0 {
                    n += 1;
                }
            }
        }
        n
    };
    let (o0, o1, o2) = (overlap(0.0), overlap(1.0), overlap(2.0));
    CheckResult::new(
        "obstacle_topology",
        o0 == 0 && o1 > 0 && o2 == 0,
        format!("overlap cells at t=0/1/2: {o0}/{o1}/{o2}"),
    )
}

/// 9. Partition-of-unity identities: the C^1 weight pair sums to one across
/// a shared interface, and the indicator weight covers every interior
/// collocation point exactly once.
pub fn check_pou_identities() -> CheckResult {
    let mut worst: f64 = 0.0;
    for k in 0..=1000 {
        let y = 0.75 + 0.5 * k as f64 / 1000.0;
        let s = pou_eval(PouKind::B, y) + pou_eval(PouKind::B, 2.0 - y);
        worst = worst.max((s - 1.0).abs());
    }
    let part = Partition::new(&[[0.0, 1.0], [0.0, 1.0]], &[3, 2]).unwrap();
    let geometry = crate::geometry::Geometry::unobstructed(2, None);
    let colloc = crate::collocation::generate_collocation(
        &part,
        &[7, 7],
        &geometry,
        &[[false; 2]; MAX_DIM],
        &CurveSampling::default(),
    )
    .unwrap();
    let mut tiling_ok = true;
    for p in &colloc.interior {
        // half-open tiling: count subdomains owning the point
        let mut owners = 0;
        for sub in 0..part.len() {
            if part.containing_subdomain(&p.x) == sub {
                owners += 1;
            }
        }
        if owners != 1 {
            tiling_ok = false;
        }
    }
    CheckResult::new(
        "pou_identities",
        worst <= 1e-15 && tiling_ok,
        format!("max |phi_b pair sum - 1| = {worst:.3e} (tol 1e-15); indicator tiling {}",
            if tiling_ok { "unique" } else { "BROKEN" }),
    )
}

/// Extra structural checks folded into the fast suite: sketch isometry in
/// expectation and the row-scaling fixed point.
pub fn check_sketch_isometry() -> CheckResult {
    let m = 120;
    let x: Vec<f64> = (0..m).map(|i| gaussian(55, i as u64)).collect();
    let xx: f64 = x.iter().map(|v| v * v).sum();
    let mut mean = 0.0;
    for seed in 0..200u64 {
        let plan = SketchPlan::new(m, 20, 2.0, seed).unwrap();
        let sx = plan.apply_vec(&x);
        mean += sx.iter().map(|v| v * v).sum::<f64>();
    }
    mean /= 200.0;
    let rel = (mean - xx).abs() / xx;
    CheckResult::new(
        "sketch_isometry",
        rel <= 0.05,
        format!("mean ||Sx||^2 off by {:.2}% (tol 5%)", 100.0 * rel),
    )
}

pub fn check_row_scaling() -> CheckResult {
    let j = gaussian_matrix(40, 7, 909);
    let f: Vec<f64> = (0..40).map(|i| gaussian(910, i as u64)).collect();
    let (js, fs, lambda) = scaling::row_scale(&j, &f, 100.0);
    let mut ok = true;
    for i in 0..40 {
        let max = js.row(i).iter().fold(0.0f64, |a, &x| a.max(x.abs()));
        ok &= (max - 100.0).abs() <= 1e-12 * 100.0;
        ok &= (fs[i] - lambda[i] * f[i]).abs() <= 1e-12 * fs[i].abs().max(1.0);
    }
    CheckResult::new("row_scaling", ok, "scaled rows reach max-abs 100".into())
}

/// Run the full fast suite in order.
pub fn run_fast_suite() -> Vec<CheckResult> {
    vec![
        check_sketch_qr_identity(),
        check_preconditioning_bound(),
        check_lsqr_against_pseudoinverse(),
        check_jacobian_finite_differences(),
        check_manufactured_sources(),
        check_degenerate_multistep_equivalence(),
        check_affine_exactness(),
        check_obstacle_topology(),
        check_pou_identities(),
        check_sketch_isometry(),
        check_row_scaling(),
    ]
}
