//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured quantities. Run with `cargo test --test acceptance` (add
//! `-- --nocapture` to see the lines for passing criteria).

use std::sync::Mutex;

use rfm_core::bench::{run_experiment, ExperimentConfig, SolverKind};
use rfm_core::geometry::Classification;
use rfm_core::selftest;
use rfm_core::solvers::{NlsSystem, Termination};

// Heavy and timing-sensitive criteria run one at a time.
static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn report(criterion: &str, passed: bool, detail: &str) {
    println!(
        "acceptance {criterion}: {} - {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
    assert!(passed, "{criterion}: {detail}");
}

fn check(criterion: &str, c: selftest::CheckResult) {
    report(criterion, c.passed, &c.detail);
}

#[test]
fn criterion_01_sketch_qr_identity() {
    check("01 (sketch/QR identity)", selftest::check_sketch_qr_identity());
}

#[test]
fn criterion_02_preconditioning_bound() {
    check("02 (preconditioning bound)", selftest::check_preconditioning_bound());
}

#[test]
fn criterion_03_lsqr_oracle() {
    check("03 (LSQR vs pseudoinverse)", selftest::check_lsqr_against_pseudoinverse());
}

#[test]
fn criterion_04_jacobian_fd() {
    let _g = serial();
    check("04 (Jacobian finite differences)", selftest::check_jacobian_finite_differences());
}

#[test]
fn criterion_05_manufactured_sources() {
    check("05 (manufactured sources)", selftest::check_manufactured_sources());
}

#[test]
fn criterion_06_degenerate_equivalence() {
    let _g = serial();
    check("06 (multi-step degeneracy)", selftest::check_degenerate_multistep_equivalence());
}

#[test]
fn criterion_07_affine_exactness() {
    let _g = serial();
    check("07 (affine exactness)", selftest::check_affine_exactness());
}

#[test]
fn criterion_08_obstacle_topology() {
    check("08 (obstacle topology)", selftest::check_obstacle_topology());
}

#[test]
fn criterion_09_pou_identities() {
    check("09 (partition of unity)", selftest::check_pou_identities());
}

/// Peak resident set size of this process in bytes, from /proc.
fn peak_rss_bytes() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    for line in status.lines() {
        if let Some(rest) = line.strip_prefix("VmHWM:") {
            let kb: u64 = rest.trim().trim_end_matches(" kB").trim().parse().ok()?;
            return Some(kb * 1024);
        }
    }
    None
}

#[test]
fn criterion_10_cubic_2d_feature_sweep() {
    let _g = serial();
    // J counts total degrees of freedom here (J / 4 features per subdomain):
    // with Q = 15^2 the system has 1140 rows, so per-subdomain J >= 100
    // would make every sweep point underdetermined.
    let mut errs = Vec::new();
    let mut its = Vec::new();
    let mut njs = Vec::new();
    for j_total in [100usize, 200, 400] {
        let mut cfg = ExperimentConfig::new("cubic_elliptic_2d", &[2, 2], &[15, 15], j_total / 4);
        cfg.solver = SolverKind::Amipn;
        cfg.seed = 1;
        let out = run_experiment(&cfg);
        assert_eq!(out.report.status, "ok", "run failed: {}", out.report.status);
        errs.push(out.report.relative_l2[0]);
        its.push(out.report.outer_iterations);
        njs.push(out.report.jacobian_evaluations);
    }
    let strictly_decreasing = errs[1] < errs[0] && errs[2] < errs[1];
    let five_fold = errs[0] / errs[1] >= 5.0 && errs[1] / errs[2] >= 5.0;
    let tail = errs[2] <= 1e-6;
    let iters_ok = its.iter().all(|&i| i <= 6) && njs.iter().all(|&n| n <= 4);
    report(
        "10 (2D cubic elliptic J-sweep)",
        strictly_decreasing && five_fold && tail && iters_ok,
        &format!(
            "errors {:.3e} / {:.3e} / {:.3e}, IT {:?}, NJ {:?}",
            errs[0], errs[1], errs[2], its, njs
        ),
    );
}

#[test]
fn criterion_11_cubic_3d_reduced() {
    let _g = serial();
    let mut cfg = ExperimentConfig::new("cubic_elliptic_3d", &[2, 2, 2], &[12, 12, 12], 200);
    cfg.solver = SolverKind::Amipn;
    cfg.seed = 1;
    cfg.eval_grid = vec![30, 30, 30];
    let out = run_experiment(&cfg);
    assert_eq!(out.report.status, "ok");
    let err = out.report.relative_l2[0];
    let solved = out.solved.as_ref().unwrap();
    // monotone residual history comes from the solver report; re-run cheaply
    let hist_ok = {
        let u0 = vec![0.0; solved.system.n_unknowns()];
        let mut params = cfg.solver_params.clone();
        params.seed = cfg.seed;
        let rep = rfm_core::amipn_solve(&solved.system, &u0, &params).unwrap();
        rep.residual_history.windows(2).all(|w| w[1] <= w[0] + 1e-12)
    };
    let mem = peak_rss_bytes().unwrap_or(0);
    let mem_ok = mem < 4 * 1024 * 1024 * 1024;
    report(
        "11 (3D cubic elliptic reduced)",
        err <= 1e-3 && hist_ok && mem_ok,
        &format!(
            "relative L2 error {err:.3e} (tol 1e-3), monotone history {hist_ok}, peak RSS {:.2} GiB",
            mem as f64 / (1024.0 * 1024.0 * 1024.0)
        ),
    );
}

#[test]
fn criterion_12_helmholtz_solver_comparison() {
    let _g = serial();
    let base = ExperimentConfig::new("helmholtz_cosh_3d", &[2, 2, 2], &[12, 12, 12], 200);
    let mut ipn_cfg = base.clone();
    ipn_cfg.solver = SolverKind::Ipn;
    ipn_cfg.seed = 1;
    ipn_cfg.eval_grid = vec![25, 25, 25];
    let mut ami_cfg = ipn_cfg.clone();
    ami_cfg.solver = SolverKind::Amipn;

    let ipn = run_experiment(&ipn_cfg).report;
    let ami = run_experiment(&ami_cfg).report;
    assert_eq!(ipn.status, "ok");
    assert_eq!(ami.status, "ok");
    let nj_ok = ami.jacobian_evaluations < ipn.jacobian_evaluations;
    let (e1, e2) = (ipn.relative_l2[0], ami.relative_l2[0]);
    let errors_close = e1 / e2 <= 2.0 && e2 / e1 <= 2.0;
    let speedup = ipn.solve_seconds / ami.solve_seconds;
    report(
        "12 (Helmholtz IPN vs AMIPN)",
        nj_ok && errors_close && speedup >= 1.2,
        &format!(
            "NJ {} vs {}, errors {e1:.3e} vs {e2:.3e}, speedup {speedup:.2}x",
            ipn.jacobian_evaluations, ami.jacobian_evaluations
        ),
    );
}

#[test]
fn criterion_13_allen_cahn_moving_hole() {
    let _g = serial();
    let mut cfg = ExperimentConfig::new("allen_cahn_moving_hole", &[2, 2, 2], &[10, 10, 10], 150);
    cfg.solver = SolverKind::Amipn;
    cfg.seed = 1;
    cfg.eval_grid = vec![25, 25, 25];
    let out = run_experiment(&cfg);
    assert_eq!(out.report.status, "ok");
    let err = out.report.relative_l2[0];
    let converged = out.report.termination == Some(Termination::Stagnation);
    // no collocation point of any kind sits inside the hole at its own time
    let solved = out.solved.as_ref().unwrap();
    let geo = &solved.system.problem().geometry;
    let colloc = solved.system.collocation();
    let mut inside = 0usize;
    for p in colloc
        .interior
        .iter()
        .map(|p| p.x)
        .chain(colloc.interface.iter().map(|p| p.x))
        .chain(colloc.boundary.iter().map(|p| p.x))
    {
        if geo.classify(&p) == Classification::Excluded {
            inside += 1;
        }
    }
    report(
        "13 (Allen-Cahn moving hole)",
        converged && err <= 1e-3 && inside == 0,
        &format!(
            "termination {:?}, relative L2 error {err:.3e} (tol 1e-3), {inside} points inside the hole",
            out.report.termination
        ),
    );
}

#[test]
fn criterion_14_gray_scott_system() {
    let _g = serial();
    let mut cfg = ExperimentConfig::new("gray_scott_3d", &[2, 2, 2], &[10, 10, 10], 150);
    cfg.solver = SolverKind::Amipn;
    cfg.seed = 1;
    cfg.eval_grid = vec![25, 25, 25];
    let out = run_experiment(&cfg);
    assert_eq!(out.report.status, "ok");
    let (eu, ev) = (out.report.relative_l2[0], out.report.relative_l2[1]);
    let both_small = eu <= 5e-3 && ev <= 5e-3;
    let ratio = (eu / ev).max(ev / eu);
    report(
        "14 (Gray-Scott two components)",
        both_small && ratio <= 10.0,
        &format!("component errors {eu:.3e} / {ev:.3e} (tol 5e-3), ratio {ratio:.2}"),
    );
}
